//! Request numbers, (p,q)-matchings via max-flow, and exhaustive search for
//! contracting pairs (the Hall obstruction to a matching).

mod dinic;

pub use dinic::FlowNetwork;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::FlipPattern;
use crate::factor_graph::FactorGraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("(p, q, d_v) = ({p}, {q}, {dv}) violates {rule}")]
    Restriction { p: usize, q: usize, dv: usize, rule: &'static str },
    #[error("flip pattern has length {got}, graph has {want} variables")]
    SizeMismatch { got: usize, want: usize },
    #[error("contraction search exceeded its budget of {budget} subsets")]
    Budget { budget: u64 },
    #[error("invalid matching: {0}")]
    Invalid(String),
}

/// Checks the standing restrictions `p ≥ q`, `2p + q > 2d_v`, `d_v ≥ p + 2`
/// (non-strict where printed so). The first failing rule is reported.
pub fn validate_pq(p: usize, q: usize, dv: usize) -> Result<(), MatchingError> {
    let err = |rule| Err(MatchingError::Restriction { p, q, dv, rule });
    if 2 * p + q <= 2 * dv {
        return err("2p + q > 2d_v");
    }
    if p < q {
        return err("p >= q");
    }
    if dv < p + 2 {
        return err("d_v >= p + 2");
    }
    Ok(())
}

/// `X_j = max{q − d_v + Z_j, 0}`.
pub fn request_of(q: usize, dv: usize, z: usize) -> usize {
    (q + z).saturating_sub(dv)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequestVector {
    pub p: usize,
    pub q: usize,
    /// Requests per variable: `p` on flipped bits, `X_j` elsewhere.
    pub requests: Vec<usize>,
    /// `Z_j = |N(j) ∩ N(F)|` for unflipped `j`; flipped bits carry their degree.
    pub z: Vec<usize>,
    pub flipped: Vec<bool>,
}

impl RequestVector {
    pub fn total(&self) -> usize {
        self.requests.iter().sum()
    }
}

/// `N(F)` as a membership mask over checks.
fn dirty_mask(g: &FactorGraph, flips: &FlipPattern) -> Vec<bool> {
    let mut m = vec![false; g.m()];
    for &i in flips.flipped() {
        for &a in g.var_neighbors(i) {
            m[a] = true;
        }
    }
    m
}

pub fn request_numbers(g: &FactorGraph, flips: &FlipPattern, p: usize, q: usize) -> Result<RequestVector, MatchingError> {
    validate_pq(p, q, g.max_var_degree())?;
    if flips.n() != g.n() {
        return Err(MatchingError::SizeMismatch { got: flips.n(), want: g.n() });
    }
    let nf = dirty_mask(g, flips);
    let flipped = flips.mask();
    let mut requests = Vec::with_capacity(g.n());
    let mut z = Vec::with_capacity(g.n());
    for j in 0..g.n() {
        let zj = g.var_neighbors(j).iter().filter(|&&a| nf[a]).count();
        z.push(zj);
        requests.push(if flipped[j] { p } else { request_of(q, g.var_degree(j), zj) });
    }
    Ok(RequestVector { p, q, requests, z, flipped })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingResult {
    /// Matched checks per variable, only for variables with positive requests.
    pub assignment: BTreeMap<usize, Vec<usize>>,
}

impl MatchingResult {
    /// Verifies disjointness, eligibility and cardinalities against `req`.
    pub fn validate(&self, g: &FactorGraph, flips: &FlipPattern, req: &RequestVector) -> Result<(), MatchingError> {
        let nf = dirty_mask(g, flips);
        let mut used = vec![false; g.m()];
        for j in 0..g.n() {
            let got = self.assignment.get(&j).map_or(0, Vec::len);
            if got != req.requests[j] {
                return Err(MatchingError::Invalid(format!(
                    "variable {j} matched to {got} checks, requests {}",
                    req.requests[j]
                )));
            }
        }
        for (&j, checks) in &self.assignment {
            for &a in checks {
                if !g.var_neighbors(j).contains(&a) || (!req.flipped[j] && !nf[a]) {
                    return Err(MatchingError::Invalid(format!("check {a} is not eligible for variable {j}")));
                }
                if std::mem::replace(&mut used[a], true) {
                    return Err(MatchingError::Invalid(format!("check {a} used twice")));
                }
            }
        }
        Ok(())
    }
}

/// Builds the flow network source → variable (capacity = request) →
/// eligible check (1) → sink (1) and extracts an assignment iff the max flow
/// saturates every request.
pub fn find_pq_matching(g: &FactorGraph, flips: &FlipPattern, p: usize, q: usize) -> Result<Option<MatchingResult>, MatchingError> {
    let req = request_numbers(g, flips, p, q)?;
    Ok(match_requests(g, flips, &req))
}

pub fn match_requests(g: &FactorGraph, flips: &FlipPattern, req: &RequestVector) -> Option<MatchingResult> {
    let nf = dirty_mask(g, flips);
    let (n, m) = (g.n(), g.m());
    let (src, sink) = (n + m, n + m + 1);
    let mut net = FlowNetwork::new(n + m + 2);
    let mut var_edges: Vec<(usize, usize, usize)> = Vec::new();
    for j in 0..n {
        let r = req.requests[j];
        if r == 0 {
            continue;
        }
        net.add_edge(src, j, r as u32);
        for &a in g.var_neighbors(j) {
            if req.flipped[j] || nf[a] {
                var_edges.push((net.add_edge(j, n + a, 1), j, a));
            }
        }
    }
    for a in 0..m {
        net.add_edge(n + a, sink, 1);
    }
    if net.max_flow(src, sink) != req.total() as u64 {
        return None;
    }
    let mut assignment: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (id, j, a) in var_edges {
        if net.flow(id) > 0 {
            assignment.entry(j).or_default().push(a);
        }
    }
    Some(MatchingResult { assignment })
}

/// Bookkeeping check: every unflipped bit with requests keeps at
/// least `q` checks outside the dirty set, `(d_v − Z_j) + X_j ≥ q`.
pub fn clean_neighbor_bound_holds(g: &FactorGraph, req: &RequestVector) -> bool {
    (0..g.n()).all(|j| req.flipped[j] || req.requests[j] == 0 || g.var_degree(j) - req.z[j] + req.requests[j] >= req.q)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionWitness {
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
    /// `|N(S₁) ∪ (N(S₂) ∩ N(F))|`.
    pub neighborhood_size: usize,
    /// `p|S₁| + Σ_{S₂} X_j`.
    pub total_requests: usize,
}

pub const DEFAULT_CONTRACTION_BUDGET: u64 = 1 << 22;

/// Smallest pair `(S₁ ⊆ F, S₂ ⊆ F^c)` with strictly more requests than
/// eligible checks, searched by increasing `|S₁| + |S₂|` and lexicographically
/// within a size. Only unflipped bits with positive requests enter `S₂`.
pub fn find_contraction_bruteforce(
    g: &FactorGraph,
    flips: &FlipPattern,
    p: usize,
    q: usize,
    budget: u64,
) -> Result<Option<ContractionWitness>, MatchingError> {
    let req = request_numbers(g, flips, p, q)?;
    let nf = dirty_mask(g, flips);
    let universe: Vec<usize> = (0..g.n()).filter(|&j| req.requests[j] > 0).collect();
    let eligible: Vec<Vec<usize>> = universe
        .iter()
        .map(|&j| {
            g.var_neighbors(j)
                .iter()
                .copied()
                .filter(|&a| req.flipped[j] || nf[a])
                .collect()
        })
        .collect();
    let u = universe.len();
    let mut visited = 0u64;
    let mut count = vec![0u32; g.m()];
    for k in 1..=u {
        let mut comb: Vec<usize> = (0..k).collect();
        loop {
            visited += 1;
            if visited > budget {
                return Err(MatchingError::Budget { budget });
            }
            let mut size = 0;
            let mut total = 0;
            for &c in &comb {
                total += req.requests[universe[c]];
                for &a in &eligible[c] {
                    if count[a] == 0 {
                        size += 1;
                    }
                    count[a] += 1;
                }
            }
            for &c in &comb {
                for &a in &eligible[c] {
                    count[a] -= 1;
                }
            }
            if size < total {
                let (s1, s2) = comb.iter().map(|&c| universe[c]).partition(|&j| req.flipped[j]);
                return Ok(Some(ContractionWitness {
                    s1,
                    s2,
                    neighborhood_size: size,
                    total_requests: total,
                }));
            }
            // next combination in lexicographic order
            let Some(i) = (0..k).rev().find(|&i| comb[i] < u - k + i) else {
                break;
            };
            comb[i] += 1;
            for t in i + 1..k {
                comb[t] = comb[t - 1] + 1;
            }
        }
    }
    Ok(None)
}
