//! Dual witnesses for LP decoding success, their canonical hyperflow form,
//! hyperflows routed along a (p,q)-matching, and an LP search for witnesses.

mod search;

pub use search::{find_dual_witness_lp, WitnessLpConfig, WitnessLpOutcome};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{FlipPattern, Gamma};
use crate::factor_graph::FactorGraph;
use crate::matching::{request_numbers, validate_pq, MatchingError, MatchingResult};
use crate::simplex::SimplexError;

pub const PAIR_TOL: f64 = 1e-9;
pub const DEFAULT_MARGIN: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("check {check} carries {count} negative weights")]
    MultipleNegative { check: usize, count: usize },
    #[error("weights violate the pairwise check condition: {0:?}")]
    NotAWitness(Vec<Violation>),
    #[error("weight vector has {got} entries, graph has {want} edges")]
    SizeMismatch { got: usize, want: usize },
    #[error("routing parameter {chi} outside the open interval ({lo}, {hi})")]
    ChiOutOfRange { chi: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error("witness LP has {rows} rows, above the budget {budget}")]
    TooLarge { rows: usize, budget: usize },
    #[error("witness LP failed: {0}")]
    Simplex(#[from] SimplexError),
}

/// `τ_{ia}` per edge, indexed by the graph's var-major edge ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeWeights {
    pub tau: Vec<f64>,
}

impl EdgeWeights {
    pub fn zeros(g: &FactorGraph) -> Self {
        EdgeWeights { tau: vec![0.0; g.num_edges()] }
    }

    pub fn get(&self, g: &FactorGraph, var: usize, check: usize) -> Option<f64> {
        g.edge_id(var, check).map(|e| self.tau[e])
    }

    /// `(var, check, τ)` triples, for reports.
    pub fn triples(&self, g: &FactorGraph) -> Vec<(usize, usize, f64)> {
        g.edges().map(|(e, i, a)| (i, a, self.tau[e])).collect()
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        EdgeWeights { tau: self.tau.iter().map(|t| t * lambda).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    /// `τ_{ia} + τ_{ja} < 0` at check `a`.
    Pair { check: usize, i: usize, j: usize, slack: f64 },
    /// `Σ_a τ_{ia}` not below `γ_i` by the margin.
    Node { var: usize, slack: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub violations: Vec<Violation>,
}

impl WitnessCheck {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_pairs(g: &FactorGraph, tau: &EdgeWeights, out: &mut Vec<Violation>) {
    for a in 0..g.m() {
        let nb = g.check_neighbors(a);
        let w: Vec<f64> = nb.iter().map(|&i| tau.tau[g.edge_id(i, a).expect("edge")]).collect();
        for x in 0..nb.len() {
            for y in x + 1..nb.len() {
                let s = w[x] + w[y];
                if s < -PAIR_TOL {
                    out.push(Violation::Pair { check: a, i: nb[x], j: nb[y], slack: s });
                }
            }
        }
    }
}

/// Verifies the pairwise condition at every check and the strict per-bit
/// condition `Σ_a τ_{ia} < γ_i`, realized as `≤ γ_i − margin`.
pub fn check_dual_witness(g: &FactorGraph, gamma: &Gamma, tau: &EdgeWeights, margin: f64) -> WitnessCheck {
    let mut violations = Vec::new();
    check_pairs(g, tau, &mut violations);
    for i in 0..g.n() {
        let sum: f64 = g.var_neighbors(i).iter().map(|&a| tau.tau[g.edge_id(i, a).expect("edge")]).sum();
        let slack = gamma.values()[i] - margin - sum;
        if slack < 0.0 {
            violations.push(Violation::Node { var: i, slack });
        }
    }
    WitnessCheck { violations }
}

/// One source and one poison magnitude per check: the source edge carries
/// `−P_j`, every other edge of the check `+P_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperflow {
    pub source: Vec<Option<usize>>,
    pub poison: Vec<f64>,
}

impl Hyperflow {
    pub fn to_edge_weights(&self, g: &FactorGraph) -> EdgeWeights {
        let mut w = EdgeWeights::zeros(g);
        for (e, i, a) in g.edges() {
            let p = self.poison[a];
            w.tau[e] = if self.source[a] == Some(i) { -p } else { p };
        }
        w
    }

    /// Shape invariants: `P_j ≥ 0` and the source is a neighbor.
    pub fn is_well_formed(&self, g: &FactorGraph) -> bool {
        self.poison.len() == g.m()
            && self.source.len() == g.m()
            && (0..g.m()).all(|a| {
                self.poison[a] >= 0.0
                    && match self.source[a] {
                        Some(i) => g.check_neighbors(a).contains(&i),
                        None => g.check_neighbors(a).is_empty(),
                    }
            })
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Hyperflow {
            source: self.source.clone(),
            poison: self.poison.iter().map(|p| p * lambda).collect(),
        }
    }
}

/// Canonical form of one check's weights, listed in neighbor order:
/// `(source position, P)`. No negative weight → zero poison from the first
/// neighbor; otherwise the most negative weight `τ₁` (first on ties) is the
/// source with `P = −τ₁`. Solver noise can leave several weights a hair below
/// zero, so only weights below `−PAIR_TOL` count as further negatives.
pub fn canonicalize_check(weights: &[f64]) -> Result<(usize, f64), usize> {
    let Some(k) = (0..weights.len()).reduce(|b, j| if weights[j] < weights[b] { j } else { b }) else {
        return Ok((0, 0.0));
    };
    let extra = (0..weights.len()).filter(|&j| j != k && weights[j] < -PAIR_TOL).count();
    if extra > 0 && weights[k] < -PAIR_TOL {
        return Err(extra + 1);
    }
    if weights[k] >= 0.0 {
        return Ok((0, 0.0));
    }
    Ok((k, -weights[k]))
}

/// Turns a valid dual witness into a hyperflow with the same validity.
pub fn canonicalize_to_hyperflow(g: &FactorGraph, tau: &EdgeWeights) -> Result<Hyperflow, WitnessError> {
    if tau.tau.len() != g.num_edges() {
        return Err(WitnessError::SizeMismatch { got: tau.tau.len(), want: g.num_edges() });
    }
    let mut violations = Vec::new();
    check_pairs(g, tau, &mut violations);
    if !violations.is_empty() {
        return Err(WitnessError::NotAWitness(violations));
    }
    let mut source = Vec::with_capacity(g.m());
    let mut poison = Vec::with_capacity(g.m());
    for a in 0..g.m() {
        let nb = g.check_neighbors(a);
        if nb.is_empty() {
            source.push(None);
            poison.push(0.0);
            continue;
        }
        let w: Vec<f64> = nb.iter().map(|&i| tau.tau[g.edge_id(i, a).expect("edge")]).collect();
        let (k, p) = canonicalize_check(&w).map_err(|count| WitnessError::MultipleNegative { check: a, count })?;
        source.push(Some(nb[k]));
        poison.push(p);
    }
    Ok(Hyperflow { source, poison })
}

/// Open interval of valid routing parameters, `(1/(2p − d_v), 1/(d_v − q))`.
pub fn chi_interval(p: usize, q: usize, dv: usize) -> Result<(f64, f64), WitnessError> {
    validate_pq(p, q, dv)?;
    Ok((1.0 / (2 * p - dv) as f64, 1.0 / (dv - q) as f64))
}

pub fn default_chi(p: usize, q: usize, dv: usize) -> Result<f64, WitnessError> {
    let (lo, hi) = chi_interval(p, q, dv)?;
    Ok(0.5 * (lo + hi))
}

/// Every flipped bit sends `χ` into each of its matched checks, which pass
/// `χ` on to all their other neighbors; all other checks stay clean.
pub fn hyperflow_from_matching(
    g: &FactorGraph,
    flips: &FlipPattern,
    matching: &MatchingResult,
    p: usize,
    q: usize,
    chi: f64,
) -> Result<Hyperflow, WitnessError> {
    let (lo, hi) = chi_interval(p, q, g.max_var_degree())?;
    if !(chi > lo && chi < hi) {
        return Err(WitnessError::ChiOutOfRange { chi, lo, hi });
    }
    let req = request_numbers(g, flips, p, q)?;
    matching.validate(g, flips, &req)?;
    let mut source: Vec<Option<usize>> = (0..g.m()).map(|a| g.check_neighbors(a).first().copied()).collect();
    let mut poison = vec![0.0; g.m()];
    for &i in flips.flipped() {
        for &a in matching.assignment.get(&i).map(Vec::as_slice).unwrap_or(&[]) {
            source[a] = Some(i);
            poison[a] = chi;
        }
    }
    Ok(Hyperflow { source, poison })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::gamma_from_flips;
    use crate::matching::find_pq_matching;

    #[test]
    fn zero_weights() {
        let g = FactorGraph::from_var_adj(2, vec![vec![0, 1], vec![0], vec![1]]).unwrap();
        let tau = EdgeWeights::zeros(&g);
        assert!(check_dual_witness(&g, &gamma_from_flips(&FlipPattern::none(3)), &tau, DEFAULT_MARGIN).passed());
        let flips = FlipPattern::new(3, vec![0, 2]).unwrap();
        let c = check_dual_witness(&g, &gamma_from_flips(&flips), &tau, DEFAULT_MARGIN);
        let vars: Vec<usize> = c
            .violations
            .iter()
            .filter_map(|v| match v {
                Violation::Node { var, .. } => Some(*var),
                _ => None,
            })
            .collect();
        assert_eq!(vars, vec![0, 2]);
    }

    #[test]
    fn appendix_cases() {
        assert_eq!(canonicalize_check(&[0.2, 0.1, 0.3]), Ok((0, 0.0)));
        let (k, p) = canonicalize_check(&[-0.3, 0.5, 0.4]).unwrap();
        assert_eq!((k, p), (0, 0.3));
        assert_eq!(canonicalize_check(&[-0.1, -0.1, 0.5]), Err(2));
        assert_eq!(canonicalize_check(&[0.4, -1e-17, -0.2, -3e-16]), Ok((2, 0.2)));
        assert_eq!(canonicalize_check(&[]), Ok((0, 0.0)));

        let g = FactorGraph::from_var_adj(1, vec![vec![0]; 3]).unwrap();
        let hf = canonicalize_to_hyperflow(&g, &EdgeWeights { tau: vec![-0.3, 0.5, 0.4] }).unwrap();
        assert_eq!(hf.to_edge_weights(&g).tau, vec![-0.3, 0.3, 0.3]);
        assert!(matches!(
            canonicalize_to_hyperflow(&g, &EdgeWeights { tau: vec![-0.1, -0.1, 0.5] }),
            Err(WitnessError::NotAWitness(_))
        ));
        let hf = canonicalize_to_hyperflow(&g, &EdgeWeights { tau: vec![0.2, 0.1, 0.3] }).unwrap();
        assert_eq!(hf.poison, vec![0.0]);
        assert_eq!(hf.source, vec![Some(0)]);
    }

    #[test]
    fn chi_examples() {
        assert_eq!(chi_interval(6, 5, 8).unwrap(), (0.25, 1.0 / 3.0));
        assert_eq!(chi_interval(6, 6, 8).unwrap(), (0.25, 0.5));
        assert!(matches!(
            chi_interval(2, 3, 4),
            Err(WitnessError::Matching(MatchingError::Restriction { rule: "2p + q > 2d_v", .. }))
        ));
    }

    fn two_flip_instance() -> (FactorGraph, FlipPattern) {
        // bits 0 and 1 flipped, sharing two checks; bits 2..5 unflipped
        let adj = vec![
            vec![0, 1, 2, 3, 4, 5, 6, 7],
            vec![6, 7, 8, 9, 10, 11, 12, 13],
            vec![0, 8, 14, 15, 16, 17, 18, 19],
            vec![1, 9, 20, 21, 22, 23, 24, 25],
            vec![2, 3, 10, 11, 26, 27, 28, 29],
            vec![14, 20, 26, 30, 31, 32, 33, 34],
        ];
        (FactorGraph::from_var_adj(35, adj).unwrap(), FlipPattern::new(6, vec![0, 1]).unwrap())
    }

    #[test]
    fn matching_hyperflow_is_witness() {
        let (g, flips) = two_flip_instance();
        let m = find_pq_matching(&g, &flips, 6, 5).unwrap().expect("matching exists");
        let hf = hyperflow_from_matching(&g, &flips, &m, 6, 5, 0.3).unwrap();
        assert!(hf.is_well_formed(&g));
        let tau = hf.to_edge_weights(&g);
        assert!(check_dual_witness(&g, &gamma_from_flips(&flips), &tau, DEFAULT_MARGIN).passed());
        let mid = default_chi(6, 5, 8).unwrap();
        let hf = hyperflow_from_matching(&g, &flips, &m, 6, 5, mid).unwrap();
        assert!(check_dual_witness(&g, &gamma_from_flips(&flips), &hf.to_edge_weights(&g), DEFAULT_MARGIN).passed());
    }

    #[test]
    fn chi_boundary_rejected() {
        let (g, flips) = two_flip_instance();
        let m = find_pq_matching(&g, &flips, 6, 5).unwrap().unwrap();
        assert!(matches!(
            hyperflow_from_matching(&g, &flips, &m, 6, 5, 0.25),
            Err(WitnessError::ChiOutOfRange { .. })
        ));
    }

    #[test]
    fn empty_matching_gives_zero_weights() {
        let (g, _) = two_flip_instance();
        let none = FlipPattern::none(6);
        let m = find_pq_matching(&g, &none, 6, 5).unwrap().unwrap();
        let hf = hyperflow_from_matching(&g, &none, &m, 6, 5, 0.3).unwrap();
        assert!(hf.to_edge_weights(&g).tau.iter().all(|&t| t == 0.0));
        assert!(check_dual_witness(&g, &gamma_from_flips(&none), &hf.to_edge_weights(&g), DEFAULT_MARGIN).passed());
    }

    #[test]
    fn scaling_down_keeps_pairs() {
        let (g, flips) = two_flip_instance();
        let m = find_pq_matching(&g, &flips, 6, 5).unwrap().unwrap();
        let hf = hyperflow_from_matching(&g, &flips, &m, 6, 5, 0.3).unwrap();
        for lambda in [1.0, 0.5, 0.01] {
            let mut v = Vec::new();
            check_pairs(&g, &hf.scaled(lambda).to_edge_weights(&g), &mut v);
            assert!(v.is_empty());
        }
    }
}
