use std::collections::HashSet;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{build_full_relaxation, is_codeword, separate, to_lp_text, LinearConstraint, LpError, DEFAULT_DEGREE_CAP};
use crate::channel::Gamma;
use crate::factor_graph::FactorGraph;
use crate::scalar::Scalar;
use crate::simplex::{LpModel, OptimalityReport, Row, Sense, Simplex, SimplexError, VarStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecodeMode {
    #[default]
    Cuts,
    /// All odd-subset inequalities at once (small check degrees only).
    Full,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DecodeConfig {
    pub mode: DecodeMode,
    pub max_rounds: usize,
    pub degree_cap: usize,
    pub integrality_tol: f64,
    /// Re-solve once under a tiny random cost perturbation to detect ties.
    pub tie_probe: bool,
    pub perturbation: f64,
    pub probe_seed: u64,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        DecodeConfig {
            mode: DecodeMode::Cuts,
            max_rounds: 500,
            degree_cap: DEFAULT_DEGREE_CAP,
            integrality_tol: 1e-6,
            tie_probe: true,
            perturbation: 1e-9,
            probe_seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecodeStatus {
    IntegralCodeword,
    Fractional,
    DegenerateTie,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecodeResult {
    pub y: Vec<f64>,
    pub objective: f64,
    pub status: DecodeStatus,
    pub cuts_added: usize,
    pub iterations: usize,
    pub rounds: usize,
    pub report: OptimalityReport,
    pub mode: DecodeMode,
    /// Final constraint set (cut mode) and the optimal basis, kept for
    /// exact re-solves.
    #[serde(skip)]
    pub cuts: Vec<LinearConstraint>,
    #[serde(skip)]
    pub basis: Vec<VarStatus>,
}

impl DecodeResult {
    pub fn rounded(&self) -> Vec<bool> {
        self.y.iter().map(|&v| v > 0.5).collect()
    }

    /// Success in the experiments' sense: the all-zero word, no tie.
    pub fn is_all_zero_codeword(&self) -> bool {
        self.status == DecodeStatus::IntegralCodeword && self.rounded().iter().all(|&b| !b)
    }
}

fn simplex_err<T: Scalar>(source: SimplexError, model: &LpModel<T>) -> LpError {
    LpError::Simplex {
        source,
        dump: to_lp_text(model),
    }
}

fn unit_box<T: Scalar>(cost: Vec<T>) -> LpModel<T> {
    let n = cost.len();
    LpModel::new(cost, vec![Some(T::zero()); n], vec![Some(T::one()); n])
}

fn primal_cut_model<T: Scalar>(cost: &[f64], cuts: &[LinearConstraint]) -> LpModel<T> {
    let mut m = unit_box(cost.iter().map(|&c| T::from_f64_lossy(c)).collect());
    m.rows = cuts.iter().map(LinearConstraint::to_row).collect();
    m
}

/// Dual of `min γ·y, Gy ≥ h, 0 ≤ y ≤ 1`:
/// `min −h·λ + 1·μ` s.t. `Gᵀλ − μ ≤ γ`, `λ, μ ≥ 0`. One row per variable, so
/// the basis stays `n × n` no matter how many forbidding rows exist.
/// LP text of the primal relaxation `min γᵀy` over the box and `cuts`.
pub fn primal_lp_text(gamma: &Gamma, cuts: &[LinearConstraint]) -> String {
    to_lp_text(&primal_cut_model::<f64>(gamma.values(), cuts))
}

fn dual_full_model<T: Scalar>(n: usize, cost: &[f64], forbidding: &[LinearConstraint]) -> LpModel<T> {
    let nl = forbidding.len();
    let mut c: Vec<T> = forbidding.iter().map(|f| T::from_i64_exact(-(f.rhs as i64))).collect();
    c.extend((0..n).map(|_| T::one()));
    let mut m = LpModel::new(c, vec![Some(T::zero()); nl + n], vec![None; nl + n]);
    let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
    for (r, f) in forbidding.iter().enumerate() {
        for &(i, a) in &f.coeffs {
            rows[i].push((r, T::from_i64_exact(a as i64)));
        }
    }
    for (i, mut coeffs) in rows.into_iter().enumerate() {
        coeffs.push((nl + i, -T::one()));
        m.rows.push(Row {
            coeffs,
            sense: Sense::Le,
            rhs: T::from_f64_lossy(cost[i]),
        });
    }
    m
}

struct Solved {
    y: Vec<f64>,
    objective: f64,
    cuts: Vec<LinearConstraint>,
    basis: Vec<VarStatus>,
    iterations: usize,
    rounds: usize,
    report: OptimalityReport,
}

fn solve_cuts(g: &FactorGraph, cost: &[f64], cfg: &DecodeConfig) -> Result<Solved, LpError> {
    let mut s = Simplex::<f64>::new(unit_box(cost.to_vec()));
    let mut cuts = Vec::new();
    let mut seen = HashSet::new();
    let mut rounds = 0;
    loop {
        s.solve().map_err(|e| simplex_err(e, &s.model()))?;
        rounds += 1;
        let y: Vec<f64> = s.structural_values().iter().map(|v| v.clamp(0.0, 1.0)).collect();
        let mut added = 0;
        for a in 0..g.m() {
            if let Some((cut, _)) = separate(&y, g, a) {
                if seen.insert(cut.clone()) {
                    s.add_row(cut.to_row());
                    cuts.push(cut);
                    added += 1;
                }
            }
        }
        if added == 0 {
            return Ok(Solved {
                objective: cost.iter().zip(&y).map(|(c, v)| c * v).sum(),
                y,
                cuts,
                basis: s.statuses().to_vec(),
                iterations: s.iterations(),
                rounds,
                report: s.report(),
            });
        }
        if rounds >= cfg.max_rounds {
            let partial = DecodeResult {
                objective: cost.iter().zip(&y).map(|(c, v)| c * v).sum(),
                y,
                status: DecodeStatus::Fractional,
                cuts_added: cuts.len(),
                iterations: s.iterations(),
                rounds,
                report: s.report(),
                mode: DecodeMode::Cuts,
                cuts,
                basis: s.statuses().to_vec(),
            };
            return Err(LpError::RoundLimit {
                rounds,
                partial: Box::new(partial),
            });
        }
    }
}

fn solve_full(g: &FactorGraph, cost: &[f64], cfg: &DecodeConfig) -> Result<Solved, LpError> {
    let full = build_full_relaxation(g, cfg.degree_cap)?;
    let model = dual_full_model::<f64>(g.n(), cost, &full.forbidding);
    let mut s = Simplex::new(model.clone());
    s.solve().map_err(|e| simplex_err(e, &model))?;
    // primal values are the negated multipliers of the per-variable rows
    let y: Vec<f64> = s.row_duals().iter().map(|p| (-p).clamp(0.0, 1.0)).collect();
    Ok(Solved {
        objective: -s.objective(),
        y,
        cuts: full.forbidding,
        basis: s.statuses().to_vec(),
        iterations: s.iterations(),
        rounds: 1,
        report: s.report(),
    })
}

fn solve_mode(g: &FactorGraph, cost: &[f64], cfg: &DecodeConfig) -> Result<Solved, LpError> {
    match cfg.mode {
        DecodeMode::Cuts => solve_cuts(g, cost, cfg),
        DecodeMode::Full => solve_full(g, cost, cfg),
    }
}

fn integral_codeword(g: &FactorGraph, y: &[f64], tol: f64) -> bool {
    y.iter().all(|&v| v <= tol || v >= 1.0 - tol)
        && is_codeword(g, &y.iter().map(|&v| v > 0.5).collect::<Vec<_>>())
}

/// Minimizes `Σ γ_i y_i` over the first-order relaxation.
pub fn decode_lp(g: &FactorGraph, gamma: &Gamma, cfg: &DecodeConfig) -> Result<DecodeResult, LpError> {
    if gamma.len() != g.n() {
        return Err(LpError::SizeMismatch {
            got: gamma.len(),
            want: g.n(),
        });
    }
    let cost = gamma.values();
    let solved = solve_mode(g, cost, cfg)?;
    let mut status = if integral_codeword(g, &solved.y, cfg.integrality_tol) {
        DecodeStatus::IntegralCodeword
    } else {
        DecodeStatus::Fractional
    };
    if cfg.tie_probe && status == DecodeStatus::IntegralCodeword {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.probe_seed);
        let perturbed: Vec<f64> = cost
            .iter()
            .map(|&c| c + cfg.perturbation * rng.gen_range(-1.0..=1.0))
            .collect();
        let probe = solve_mode(g, &perturbed, cfg)?;
        let support = |y: &[f64]| y.iter().map(|&v| v > 0.5).collect::<Vec<_>>();
        if support(&probe.y) != support(&solved.y) {
            status = DecodeStatus::DegenerateTie;
        }
    }
    Ok(DecodeResult {
        y: solved.y,
        objective: solved.objective,
        status,
        cuts_added: solved.cuts.len(),
        iterations: solved.iterations,
        rounds: solved.rounds,
        report: solved.report,
        mode: cfg.mode,
        cuts: solved.cuts,
        basis: solved.basis,
    })
}

#[derive(Debug, Clone)]
pub struct ExactResolve {
    pub objective: BigRational,
    pub y: Vec<BigRational>,
    /// The floating point basis was dual feasible and reused.
    pub warm_started: bool,
    pub iterations: usize,
}

/// Re-solves the final LP of `result` in exact rational arithmetic, starting
/// from the floating point basis when it is still dual feasible.
pub fn exact_resolve(g: &FactorGraph, gamma: &Gamma, result: &DecodeResult) -> Result<ExactResolve, LpError> {
    let cost = gamma.values();
    let model: LpModel<BigRational> = match result.mode {
        DecodeMode::Cuts => primal_cut_model(cost, &result.cuts),
        DecodeMode::Full => dual_full_model(g.n(), cost, &result.cuts),
    };
    let (mut s, warm) = match Simplex::with_basis(model.clone(), &result.basis) {
        Ok(Some(s)) => (s, true),
        _ => (Simplex::new(model.clone()), false),
    };
    s.solve().map_err(|e| simplex_err(e, &model))?;
    let (objective, y) = match result.mode {
        DecodeMode::Cuts => (s.objective(), s.structural_values()),
        DecodeMode::Full => (-s.objective(), s.row_duals().into_iter().map(|p| -p).collect()),
    };
    Ok(ExactResolve {
        objective,
        y,
        warm_started: warm,
        iterations: s.iterations(),
    })
}
