use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use lpdlab_core::exponents::{alpha_crit_search, certificate, C15Reading, ExponentParams};
use lpdlab_core::factor_graph::{read_alist, sample_seeded, write_alist, EnsembleParams, FactorGraph};
use lpdlab_core::harness::{emit_results, run_montecarlo, ExperimentConfig};
use lpdlab_core::lp_decoder::{build_full_relaxation, decode_lp, primal_lp_text, DecodeConfig, DecodeMode};
use lpdlab_core::matching::{find_contraction_bruteforce, find_pq_matching, DEFAULT_CONTRACTION_BUDGET};
use lpdlab_core::witness::{
    canonicalize_to_hyperflow, check_dual_witness, default_chi, find_dual_witness_lp, hyperflow_from_matching,
    WitnessLpConfig, DEFAULT_MARGIN,
};
use lpdlab_core::{gamma_from_flips, FlipPattern};

const EXIT_CHAIN_BREAK: u8 = 2;

#[derive(Parser)]
#[command(name = "lpdlab", version, about = "LP decoding experiments for LDPC codes")]
struct Cli {
    /// JSON config (montecarlo: an experiment config)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file or directory, depending on the subcommand
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a bit-regular code and write it as alist
    GenCode(GenCode),
    /// LP-decode one flip pattern
    Decode(Decode),
    /// Search for a dual witness and canonicalize it to a hyperflow
    Witness(Instance),
    /// Look for a (p,q)-matching, or a contraction when none exists
    Matching(MatchingArgs),
    /// Evaluate the threshold certificate or search for the critical fraction
    Threshold(Threshold),
    /// Monte Carlo sweep over flip fractions
    Montecarlo(MonteCarlo),
}

#[derive(Args)]
struct GenCode {
    #[arg(long, default_value_t = 0.5)]
    rate: f64,
    #[arg(long, default_value_t = 8)]
    dv: usize,
    #[arg(long)]
    n: usize,
}

#[derive(Args)]
struct Instance {
    #[arg(long)]
    alist: PathBuf,
    /// JSON index list, inline or as a file path
    #[arg(long, default_value = "[]")]
    flips: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Cuts,
    Full,
}

#[derive(Args)]
struct Decode {
    #[command(flatten)]
    inst: Instance,
    #[arg(long, value_enum, default_value_t = ModeArg::Cuts)]
    mode: ModeArg,
    /// Dump the final constraint system in LP format
    #[arg(long)]
    emit_lp: Option<PathBuf>,
}

#[derive(Args)]
struct MatchingArgs {
    #[command(flatten)]
    inst: Instance,
    #[arg(long, default_value_t = 6)]
    p: usize,
    #[arg(long, default_value_t = 5)]
    q: usize,
}

#[derive(Args)]
struct Threshold {
    #[arg(long, default_value_t = 0.5)]
    rate: f64,
    #[arg(long, default_value_t = 8)]
    dv: usize,
    #[arg(long, default_value_t = 6)]
    p: usize,
    #[arg(long, default_value_t = 5)]
    q: usize,
    #[arg(long, conflicts_with = "search", required_unless_present = "search")]
    alpha: Option<f64>,
    #[arg(long)]
    search: bool,
    #[arg(long, default_value_t = 0.0)]
    eps1: f64,
    /// Read the third threshold condition as a product instead of a sum
    #[arg(long)]
    c15_product: bool,
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct MonteCarlo {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated flip fractions
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
}

fn load_instance(inst: &Instance) -> Result<(FactorGraph, FlipPattern)> {
    let g = read_alist(&inst.alist)?;
    let text = if inst.flips.trim_start().starts_with('[') {
        inst.flips.clone()
    } else {
        fs::read_to_string(&inst.flips).with_context(|| format!("reading flips from {}", inst.flips))?
    };
    let flips = FlipPattern::from_json(g.n(), &text).map_err(|e| anyhow::anyhow!("flips: {e}"))?;
    Ok((g, flips))
}

fn emit(value: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn gen_code(cli: &Cli, a: &GenCode) -> Result<u8> {
    let params = EnsembleParams { rate: a.rate, dv: a.dv, n: a.n, seed: cli.seed.unwrap_or(1) };
    let g = sample_seeded(&params)?;
    match &cli.out {
        Some(p) => write_alist(&g, p)?,
        None => print!("{}", lpdlab_core::factor_graph::format_alist(&g)),
    }
    Ok(0)
}

fn decode(cli: &Cli, a: &Decode) -> Result<u8> {
    let (g, flips) = load_instance(&a.inst)?;
    let gamma = gamma_from_flips(&flips);
    let mode = match a.mode {
        ModeArg::Cuts => DecodeMode::Cuts,
        ModeArg::Full => DecodeMode::Full,
    };
    let cfg = DecodeConfig { mode, ..DecodeConfig::default() };
    let r = decode_lp(&g, &gamma, &cfg)?;
    if let Some(path) = &a.emit_lp {
        let cuts = match mode {
            DecodeMode::Cuts => r.cuts.clone(),
            DecodeMode::Full => build_full_relaxation(&g, cfg.degree_cap)?.forbidding,
        };
        fs::write(path, primal_lp_text(&gamma, &cuts)).with_context(|| format!("writing {}", path.display()))?;
    }
    let v = json!({
        "status": r.status,
        "objective": r.objective,
        "all_zero": r.is_all_zero_codeword(),
        "y": r.y,
        "cuts_added": r.cuts_added,
        "iterations": r.iterations,
        "rounds": r.rounds,
        "optimality": r.report,
    });
    emit(&v, cli.out.as_deref())?;
    Ok(0)
}

fn witness(cli: &Cli, inst: &Instance) -> Result<u8> {
    let (g, flips) = load_instance(inst)?;
    let gamma = gamma_from_flips(&flips);
    let out = find_dual_witness_lp(&g, &gamma, &WitnessLpConfig::default())?;
    let mut v = json!({ "margin": out.margin, "found": out.weights.is_some() });
    if let Some(w) = &out.weights {
        let hf = canonicalize_to_hyperflow(&g, w)?;
        let check = check_dual_witness(&g, &gamma, &hf.to_edge_weights(&g), DEFAULT_MARGIN);
        v["hyperflow"] = serde_json::to_value(&hf)?;
        v["hyperflow_passes"] = json!(check.passed() && hf.is_well_formed(&g));
    }
    emit(&v, cli.out.as_deref())?;
    Ok(0)
}

fn matching(cli: &Cli, a: &MatchingArgs) -> Result<u8> {
    let (g, flips) = load_instance(&a.inst)?;
    let gamma = gamma_from_flips(&flips);
    let mut code = 0;
    let v = match find_pq_matching(&g, &flips, a.p, a.q)? {
        Some(m) => {
            let chi = default_chi(a.p, a.q, g.max_var_degree())?;
            let hf = hyperflow_from_matching(&g, &flips, &m, a.p, a.q, chi)?;
            let ok = check_dual_witness(&g, &gamma, &hf.to_edge_weights(&g), DEFAULT_MARGIN).passed();
            if !ok {
                code = EXIT_CHAIN_BREAK;
            }
            json!({ "found": true, "assignment": m.assignment, "chi": chi, "hyperflow_passes": ok })
        }
        None => {
            let c = find_contraction_bruteforce(&g, &flips, a.p, a.q, DEFAULT_CONTRACTION_BUDGET);
            let contraction = match c {
                Ok(c) => serde_json::to_value(c)?,
                Err(e) => json!({ "skipped": e.to_string() }),
            };
            json!({ "found": false, "contraction": contraction })
        }
    };
    emit(&v, cli.out.as_deref())?;
    Ok(code)
}

fn threshold(cli: &Cli, a: &Threshold) -> Result<u8> {
    let mut params = ExponentParams::<f64>::new(a.rate, a.dv, a.p, a.q, a.alpha.unwrap_or(0.002)).with_eps1(a.eps1);
    if a.c15_product {
        params.c15_reading = C15Reading::Product;
    }
    let out = a.json_out.as_deref().or(cli.out.as_deref());
    if a.search {
        let s = alpha_crit_search(&params)?;
        eprintln!("alpha* = {} (verified below: {})", s.alpha_star, s.verified);
        emit(&json!({ "schema_version": lpdlab_core::exponents::REPORT_SCHEMA_VERSION, "search": s }), out)?;
    } else {
        let r = certificate(&params)?;
        eprintln!("alpha = {}: F = {:e}, certified = {}", params.alpha, r.f.value, r.certified);
        emit(&serde_json::to_value(&r)?, out)?;
    }
    Ok(0)
}

fn montecarlo(cli: &Cli, a: &MonteCarlo) -> Result<u8> {
    let mut cfg: ExperimentConfig = match &cli.config {
        Some(p) => serde_json::from_str(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)
            .with_context(|| format!("parsing {}", p.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.master_seed = s;
    }
    if let Some(w) = cli.workers {
        cfg.workers = Some(w);
    }
    if let Some(n) = a.n {
        cfg.ensemble.n = n;
    }
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    if let Some(al) = &a.alphas {
        cfg.alphas = al.clone();
    }
    if let Some(o) = &cli.out {
        cfg.out_dir = Some(o.clone());
    }
    let Some(dir) = cfg.out_dir.clone() else {
        bail!("montecarlo needs --out DIR (or out_dir in the config)");
    };
    let res = run_montecarlo(&cfg)?;
    emit_results(&res, &dir)?;
    for s in &res.summary {
        eprintln!(
            "alpha {:<8} lp {:.3} [{:.3}, {:.3}]  matching {:.3}  witness {:.3}  chain breaks {}",
            s.alpha, s.lp.rate, s.lp.ci_lo, s.lp.ci_hi, s.matching.rate, s.witness.rate, s.chain_breaks
        );
    }
    Ok(if res.chain_breaks() > 0 { EXIT_CHAIN_BREAK } else { 0 })
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.cmd {
        Cmd::GenCode(a) => gen_code(cli, a),
        Cmd::Decode(a) => decode(cli, a),
        Cmd::Witness(a) => witness(cli, a),
        Cmd::Matching(a) => matching(cli, a),
        Cmd::Threshold(a) => threshold(cli, a),
        Cmd::Montecarlo(a) => montecarlo(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
