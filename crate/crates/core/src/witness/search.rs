use serde::{Deserialize, Serialize};

use super::{EdgeWeights, WitnessError};
use crate::channel::Gamma;
use crate::factor_graph::FactorGraph;
use crate::simplex::{LpModel, Row, Sense, Simplex};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WitnessLpConfig {
    /// Witnesses are reported only for an optimal margin above this.
    pub min_margin: f64,
    /// Dense-basis guard on the number of LP rows.
    pub row_budget: usize,
}

impl Default for WitnessLpConfig {
    fn default() -> Self {
        WitnessLpConfig {
            min_margin: 1e-7,
            row_budget: 2500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessLpOutcome {
    /// Optimal margin `δ`.
    pub margin: f64,
    pub weights: Option<EdgeWeights>,
}

/// Maximizes `δ ∈ [0, 1]` subject to `τ_{ia} + τ_{ja} ≥ 0` for every check
/// and pair of its neighbors, and `Σ_a τ_{ia} + δ ≤ γ_i` for every bit.
pub fn find_dual_witness_lp(g: &FactorGraph, gamma: &Gamma, cfg: &WitnessLpConfig) -> Result<WitnessLpOutcome, WitnessError> {
    let ne = g.num_edges();
    let pair_rows: usize = (0..g.m()).map(|a| g.check_degree(a) * g.check_degree(a).saturating_sub(1) / 2).sum();
    let rows = pair_rows + g.n();
    if rows > cfg.row_budget {
        return Err(WitnessError::TooLarge { rows, budget: cfg.row_budget });
    }
    let delta = ne;
    let mut cost = vec![0.0; ne + 1];
    cost[delta] = -1.0;
    let mut lower = vec![None; ne + 1];
    let mut upper = vec![None; ne + 1];
    lower[delta] = Some(0.0);
    upper[delta] = Some(1.0);
    let mut model = LpModel::new(cost, lower, upper);
    for a in 0..g.m() {
        let e: Vec<usize> = g.check_neighbors(a).iter().map(|&i| g.edge_id(i, a).expect("edge")).collect();
        for x in 0..e.len() {
            for y in x + 1..e.len() {
                model.rows.push(Row { coeffs: vec![(e[x], 1.0), (e[y], 1.0)], sense: Sense::Ge, rhs: 0.0 });
            }
        }
    }
    for i in 0..g.n() {
        let mut coeffs: Vec<(usize, f64)> = g.var_neighbors(i).iter().map(|&a| (g.edge_id(i, a).expect("edge"), 1.0)).collect();
        coeffs.push((delta, 1.0));
        model.rows.push(Row { coeffs, sense: Sense::Le, rhs: gamma.values()[i] });
    }
    let mut s = Simplex::new(model);
    s.solve()?;
    let x = s.structural_values();
    let margin = x[delta];
    let weights = (margin > cfg.min_margin).then(|| EdgeWeights { tau: x[..ne].to_vec() });
    Ok(WitnessLpOutcome { margin, weights })
}
