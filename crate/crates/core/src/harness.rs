//! Monte Carlo sweeps that run the decoder and both certificates on the same
//! trials and check the sufficiency chain matching ⇒ hyperflow ⇒ LP success.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::channel::{gamma_from_flips, sample_flips, ChannelError, FlipMode};
use crate::factor_graph::{sample_bit_regular, sample_seeded, EnsembleParams, FactorGraph, GraphError};
use crate::lp_decoder::{decode_lp, DecodeConfig, DecodeStatus};
use crate::matching::{find_pq_matching, validate_pq, MatchingError};
use crate::witness::{
    check_dual_witness, default_chi, find_dual_witness_lp, hyperflow_from_matching, WitnessError, WitnessLpConfig,
    DEFAULT_MARGIN,
};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub ensemble: EnsembleParams,
    pub alphas: Vec<f64>,
    pub trials: usize,
    pub p: usize,
    pub q: usize,
    pub flip_mode: FlipMode,
    pub master_seed: u64,
    pub out_dir: Option<PathBuf>,
    pub decoder: DecodeConfig,
    /// Run the auxiliary witness LP when it fits the row budget.
    pub witness_lp: bool,
    pub witness_cfg: WitnessLpConfig,
    /// Reuse one graph (sampled from `ensemble.seed`) for every trial.
    pub fixed_graph: bool,
    /// Routing parameter; midpoint of the valid interval when unset.
    pub chi: Option<f64>,
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            ensemble: EnsembleParams { rate: 0.5, dv: 8, n: 500, seed: 1 },
            alphas: vec![0.001, 0.002, 0.005, 0.01],
            trials: 100,
            p: 6,
            q: 5,
            flip_mode: FlipMode::Exact,
            master_seed: 2008,
            out_dir: None,
            decoder: DecodeConfig::default(),
            witness_lp: true,
            witness_cfg: WitnessLpConfig::default(),
            fixed_graph: false,
            chi: None,
            workers: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if self.alphas.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(HarnessError::Config("alphas must be strictly ascending".into()));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(HarnessError::Config(format!("alpha {a} outside [0, 1]")));
        }
        if self.workers == Some(0) {
            return Err(HarnessError::Config("workers must be at least 1".into()));
        }
        self.ensemble.validate()?;
        validate_pq(self.p, self.q, self.ensemble.dv)?;
        Ok(())
    }
}

/// Per-trial seed: the first 8 bytes of SHA-256(master ‖ α index ‖ trial).
pub fn trial_seed(master: u64, alpha_index: usize, trial: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update((alpha_index as u64).to_le_bytes());
    h.update((trial as u64).to_le_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpOutcome {
    IntegralCodeword,
    Fractional,
    DegenerateTie,
    /// Round cap or simplex failure; recorded, not fatal.
    Error,
}

impl From<DecodeStatus> for LpOutcome {
    fn from(s: DecodeStatus) -> Self {
        match s {
            DecodeStatus::IntegralCodeword => LpOutcome::IntegralCodeword,
            DecodeStatus::Fractional => LpOutcome::Fractional,
            DecodeStatus::DegenerateTie => LpOutcome::DegenerateTie,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub alpha_index: usize,
    pub trial: usize,
    pub seed: u64,
    pub alpha: f64,
    pub n: usize,
    pub flips: usize,
    pub lp_status: LpOutcome,
    pub lp_objective: Option<f64>,
    /// All-zero output with integral status.
    pub lp_success: bool,
    pub matching_found: bool,
    /// Hyperflow built from the matching passes the witness check.
    pub hyperflow_valid: Option<bool>,
    /// Auxiliary LP found a witness; empty when skipped (row budget).
    pub witness_lp_found: Option<bool>,
    pub witness_found: bool,
    pub certificate_implies_success_ok: bool,
    pub error: Option<String>,
    /// Kept out of trials.csv so that file stays byte-stable.
    #[serde(skip)]
    pub wall_ms: f64,
}

/// Runs one trial; `graph` overrides sampling (fixed-graph mode).
pub fn run_trial(cfg: &ExperimentConfig, graph: Option<&FactorGraph>, alpha_index: usize, trial: usize) -> Result<TrialRecord, HarnessError> {
    let start = Instant::now();
    let seed = trial_seed(cfg.master_seed, alpha_index, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = cfg.alphas[alpha_index];
    let sampled;
    let g = match graph {
        Some(g) => g,
        None => {
            sampled = sample_bit_regular(&cfg.ensemble, &mut rng)?;
            &sampled
        }
    };
    let flips = sample_flips(g.n(), alpha, cfg.flip_mode, &mut rng)?;
    let gamma = gamma_from_flips(&flips);
    let mut errors = Vec::new();

    let (lp_status, lp_objective, lp_success) = match decode_lp(g, &gamma, &cfg.decoder) {
        Ok(r) => (r.status.into(), Some(r.objective), r.is_all_zero_codeword()),
        Err(e) => {
            errors.push(format!("lp: {e}"));
            (LpOutcome::Error, None, false)
        }
    };

    let matching = find_pq_matching(g, &flips, cfg.p, cfg.q)?;
    let hyperflow_valid = match &matching {
        None => None,
        Some(m) => {
            let chi = match cfg.chi {
                Some(c) => c,
                None => default_chi(cfg.p, cfg.q, g.max_var_degree()).map_err(|e| HarnessError::Config(e.to_string()))?,
            };
            Some(match hyperflow_from_matching(g, &flips, m, cfg.p, cfg.q, chi) {
                Ok(hf) => hf.is_well_formed(g) && check_dual_witness(g, &gamma, &hf.to_edge_weights(g), DEFAULT_MARGIN).passed(),
                Err(e) => {
                    errors.push(format!("hyperflow: {e}"));
                    false
                }
            })
        }
    };

    let witness_lp_found = if cfg.witness_lp {
        match find_dual_witness_lp(g, &gamma, &cfg.witness_cfg) {
            Ok(out) => Some(out.weights.is_some_and(|w| check_dual_witness(g, &gamma, &w, DEFAULT_MARGIN).passed())),
            Err(WitnessError::TooLarge { .. }) => None,
            Err(e) => {
                errors.push(format!("witness lp: {e}"));
                None
            }
        }
    } else {
        None
    };

    let matching_found = matching.is_some();
    let witness_found = hyperflow_valid == Some(true) || witness_lp_found == Some(true);
    // A break needs a finished LP that disagrees; decoder errors are logged separately.
    let lp_done = lp_status != LpOutcome::Error;
    let chain = (!matching_found || hyperflow_valid == Some(true)) && (!witness_found || !lp_done || lp_success);
    Ok(TrialRecord {
        alpha_index,
        trial,
        seed,
        alpha,
        n: g.n(),
        flips: flips.len(),
        lp_status,
        lp_objective,
        lp_success,
        matching_found,
        hyperflow_valid,
        witness_lp_found,
        witness_found,
        certificate_implies_success_ok: chain,
        error: (!errors.is_empty()).then(|| errors.join("; ")),
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    const Z: f64 = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z * Z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub count: usize,
    pub rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl Rate {
    fn new(count: usize, trials: usize) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(count, trials);
        Rate { count, rate: if trials == 0 { 0.0 } else { count as f64 / trials as f64 }, ci_lo, ci_hi }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSummary {
    pub alpha_index: usize,
    pub alpha: f64,
    pub trials: usize,
    pub lp: Rate,
    pub matching: Rate,
    pub witness: Rate,
    pub witness_lp_runs: usize,
    pub ties: usize,
    pub fractional: usize,
    pub errors: usize,
    pub chain_breaks: usize,
}

pub fn summarize(alphas: &[f64], trials: &[TrialRecord]) -> Vec<AlphaSummary> {
    alphas
        .iter()
        .enumerate()
        .map(|(k, &alpha)| {
            let rows: Vec<&TrialRecord> = trials.iter().filter(|t| t.alpha_index == k).collect();
            let n = rows.len();
            let count = |f: &dyn Fn(&TrialRecord) -> bool| rows.iter().filter(|t| f(t)).count();
            AlphaSummary {
                alpha_index: k,
                alpha,
                trials: n,
                lp: Rate::new(count(&|t| t.lp_success), n),
                matching: Rate::new(count(&|t| t.matching_found), n),
                witness: Rate::new(count(&|t| t.witness_found), n),
                witness_lp_runs: count(&|t| t.witness_lp_found.is_some()),
                ties: count(&|t| t.lp_status == LpOutcome::DegenerateTie),
                fractional: count(&|t| t.lp_status == LpOutcome::Fractional),
                errors: count(&|t| t.error.is_some()),
                chain_breaks: count(&|t| !t.certificate_implies_success_ok),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonteCarloResults {
    pub config: ExperimentConfig,
    pub trials: Vec<TrialRecord>,
    pub summary: Vec<AlphaSummary>,
}

impl MonteCarloResults {
    pub fn chain_breaks(&self) -> usize {
        self.summary.iter().map(|s| s.chain_breaks).sum()
    }

    /// Pairs `(i, j)`, `i < j`, whose LP success intervals show a rate
    /// increase in α beyond statistical overlap.
    pub fn monotonicity_violations(&self) -> Vec<(usize, usize)> {
        let s = &self.summary;
        let mut out = Vec::new();
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                if s[j].lp.ci_lo > s[i].lp.ci_hi {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

pub fn run_montecarlo(cfg: &ExperimentConfig) -> Result<MonteCarloResults, HarnessError> {
    cfg.validate()?;
    let fixed = if cfg.fixed_graph {
        Some(sample_seeded(&cfg.ensemble)?)
    } else {
        None
    };
    let jobs: Vec<(usize, usize)> = (0..cfg.alphas.len()).flat_map(|a| (0..cfg.trials).map(move |t| (a, t))).collect();
    let work = || -> Result<Vec<TrialRecord>, HarnessError> {
        jobs.par_iter().map(|&(a, t)| run_trial(cfg, fixed.as_ref(), a, t)).collect()
    };
    let mut trials = match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| HarnessError::Pool(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    trials.sort_by_key(|t| (t.alpha_index, t.trial));
    let summary = summarize(&cfg.alphas, &trials);
    Ok(MonteCarloResults { config: cfg.clone(), trials, summary })
}

#[derive(Serialize)]
struct SummaryRow {
    alpha_index: usize,
    alpha: f64,
    trials: usize,
    lp_success: usize,
    lp_rate: f64,
    lp_ci_lo: f64,
    lp_ci_hi: f64,
    matching: usize,
    matching_rate: f64,
    matching_ci_lo: f64,
    matching_ci_hi: f64,
    witness: usize,
    witness_rate: f64,
    witness_ci_lo: f64,
    witness_ci_hi: f64,
    witness_lp_runs: usize,
    ties: usize,
    fractional: usize,
    errors: usize,
    chain_breaks: usize,
}

impl From<&AlphaSummary> for SummaryRow {
    fn from(s: &AlphaSummary) -> Self {
        SummaryRow {
            alpha_index: s.alpha_index,
            alpha: s.alpha,
            trials: s.trials,
            lp_success: s.lp.count,
            lp_rate: s.lp.rate,
            lp_ci_lo: s.lp.ci_lo,
            lp_ci_hi: s.lp.ci_hi,
            matching: s.matching.count,
            matching_rate: s.matching.rate,
            matching_ci_lo: s.matching.ci_lo,
            matching_ci_hi: s.matching.ci_hi,
            witness: s.witness.count,
            witness_rate: s.witness.rate,
            witness_ci_lo: s.witness.ci_lo,
            witness_ci_hi: s.witness.ci_hi,
            witness_lp_runs: s.witness_lp_runs,
            ties: s.ties,
            fractional: s.fractional,
            errors: s.errors,
            chain_breaks: s.chain_breaks,
        }
    }
}

#[derive(Serialize)]
struct PlotRow {
    alpha: f64,
    success_rate: f64,
    ci_lo: f64,
    ci_hi: f64,
}

#[derive(Serialize)]
struct TimingRow {
    alpha_index: usize,
    trial: usize,
    wall_ms: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    tool: &'static str,
    version: &'static str,
    master_seed: u64,
    seed_derivation: &'static str,
    config: &'a ExperimentConfig,
    files: [&'static str; 4],
}

// serde can't flatten into csv headers, so fields are listed by hand
const TRIAL_HEADER: [&str; 15] = [
    "alpha_index",
    "trial",
    "seed",
    "alpha",
    "n",
    "flips",
    "lp_status",
    "lp_objective",
    "lp_success",
    "matching_found",
    "hyperflow_valid",
    "witness_lp_found",
    "witness_found",
    "certificate_implies_success_ok",
    "error",
];

fn write_csv<S: Serialize>(path: &Path, header: Option<&[&str]>, rows: impl IntoIterator<Item = S>) -> Result<(), HarnessError> {
    let err = |source| HarnessError::Csv { path: path.to_owned(), source };
    let mut w = csv::WriterBuilder::new().has_headers(header.is_none()).from_path(path).map_err(err)?;
    if let Some(h) = header {
        w.write_record(h).map_err(err)?;
    }
    let mut any = false;
    for r in rows {
        w.serialize(r).map_err(err)?;
        any = true;
    }
    if !any && header.is_none() {
        return Err(HarnessError::Config(format!("{}: cannot derive headers from zero rows", path.display())));
    }
    w.flush().map_err(|source| HarnessError::Io { path: path.to_owned(), source })
}

fn write_headers(path: &Path, header: &[&str]) -> Result<(), HarnessError> {
    write_csv::<()>(path, Some(header), std::iter::empty())
}

const SUMMARY_HEADER: [&str; 20] = [
    "alpha_index",
    "alpha",
    "trials",
    "lp_success",
    "lp_rate",
    "lp_ci_lo",
    "lp_ci_hi",
    "matching",
    "matching_rate",
    "matching_ci_lo",
    "matching_ci_hi",
    "witness",
    "witness_rate",
    "witness_ci_lo",
    "witness_ci_hi",
    "witness_lp_runs",
    "ties",
    "fractional",
    "errors",
    "chain_breaks",
];

/// Writes manifest.json, trials.csv, summary.csv, plotdata.csv (all
/// byte-stable for a fixed config) and timings.csv (wall clock).
pub fn emit_results(results: &MonteCarloResults, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.to_owned(), source })?;
    let manifest = dir.join("manifest.json");
    let m = Manifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        tool: "lpdlab",
        version: env!("CARGO_PKG_VERSION"),
        master_seed: results.config.master_seed,
        seed_derivation: "ChaCha8 seeded with the first 8 bytes (LE) of SHA-256(master_seed LE64 || alpha_index LE64 || trial LE64)",
        config: &results.config,
        files: ["trials.csv", "summary.csv", "plotdata.csv", "timings.csv"],
    };
    let mut text = serde_json::to_string_pretty(&m)?;
    text.push('\n');
    fs::write(&manifest, text).map_err(|source| HarnessError::Io { path: manifest.clone(), source })?;

    let trials = dir.join("trials.csv");
    write_csv(&trials, Some(&TRIAL_HEADER), &results.trials)?;
    let summary = dir.join("summary.csv");
    if results.summary.is_empty() {
        write_headers(&summary, &SUMMARY_HEADER)?;
    } else {
        write_csv(&summary, Some(&SUMMARY_HEADER), results.summary.iter().map(SummaryRow::from))?;
    }
    let plot = dir.join("plotdata.csv");
    let plot_rows = results.summary.iter().map(|s| PlotRow { alpha: s.alpha, success_rate: s.lp.rate, ci_lo: s.lp.ci_lo, ci_hi: s.lp.ci_hi });
    write_csv(&plot, Some(&["alpha", "success_rate", "ci_lo", "ci_hi"]), plot_rows)?;
    let timings = dir.join("timings.csv");
    let timing_rows = results.trials.iter().map(|t| TimingRow { alpha_index: t.alpha_index, trial: t.trial, wall_ms: t.wall_ms });
    write_csv(&timings, Some(&["alpha_index", "trial", "wall_ms"]), timing_rows)?;
    Ok(vec![manifest, trials, summary, plot, timings])
}
