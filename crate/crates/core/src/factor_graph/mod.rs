//! Factor graphs of binary linear codes and the bit-degree-regular ensemble.

mod alist;
mod expansion;

pub use alist::{format_alist, parse_alist, read_alist, write_alist, AlistError};
pub use expansion::{
    check_expansion_exhaustive, max_certified_size, ExpansionOutcome, ExpansionSpec, DEFAULT_BUDGET,
};

use std::collections::BTreeSet;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("variable {var} lists check {check}, but the graph has only {m} checks")]
    CheckOutOfRange { var: usize, check: usize, m: usize },
    #[error("variable {var} lists check {check} more than once")]
    DuplicateEdge { var: usize, check: usize },
    #[error("variable index {0} out of range (n = {1})")]
    VariableOutOfRange(usize, usize),
    #[error("invalid ensemble parameters: {0}")]
    InvalidEnsemble(String),
    #[error("invalid expansion parameters: {0}")]
    InvalidExpansion(String),
    #[error("expansion check exceeded its budget of {budget} subset evaluations")]
    BudgetExceeded { budget: u64 },
}

/// Bipartite variable/check adjacency of a parity-check matrix.
///
/// Immutable after construction. `check_adj` is always the exact transpose of
/// `var_adj`, and every adjacency list is sorted and duplicate free.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphDoc", into = "GraphDoc")]
pub struct FactorGraph {
    n: usize,
    m: usize,
    var_adj: Vec<Vec<usize>>,
    check_adj: Vec<Vec<usize>>,
    // edge ids are var-major: edge_offset[i] + position of the check in var_adj[i]
    edge_offset: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    n: usize,
    m: usize,
    var_adj: Vec<Vec<usize>>,
}

impl TryFrom<GraphDoc> for FactorGraph {
    type Error = GraphError;

    fn try_from(doc: GraphDoc) -> Result<Self, GraphError> {
        if doc.var_adj.len() != doc.n {
            return Err(GraphError::InvalidEnsemble(format!(
                "document declares n = {} but lists {} variables",
                doc.n,
                doc.var_adj.len()
            )));
        }
        FactorGraph::from_var_adj(doc.m, doc.var_adj)
    }
}

impl From<FactorGraph> for GraphDoc {
    fn from(g: FactorGraph) -> Self {
        GraphDoc {
            n: g.n,
            m: g.m,
            var_adj: g.var_adj,
        }
    }
}

impl FactorGraph {
    /// Builds a graph from per-variable check lists. Lists are sorted; duplicate
    /// or out-of-range entries are rejected.
    pub fn from_var_adj(m: usize, mut var_adj: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        for (var, checks) in var_adj.iter_mut().enumerate() {
            checks.sort_unstable();
            for w in checks.windows(2) {
                if w[0] == w[1] {
                    return Err(GraphError::DuplicateEdge { var, check: w[0] });
                }
            }
            if let Some(&check) = checks.last() {
                if check >= m {
                    return Err(GraphError::CheckOutOfRange { var, check, m });
                }
            }
        }
        let n = var_adj.len();
        let mut check_adj = vec![Vec::new(); m];
        let mut edge_offset = Vec::with_capacity(n + 1);
        let mut acc = 0;
        for (var, checks) in var_adj.iter().enumerate() {
            edge_offset.push(acc);
            acc += checks.len();
            for &a in checks {
                check_adj[a].push(var);
            }
        }
        edge_offset.push(acc);
        Ok(FactorGraph {
            n,
            m,
            var_adj,
            check_adj,
            edge_offset,
        })
    }

    /// Builds a graph from dense parity-check rows (`rows[a][i] == true` iff
    /// variable `i` participates in check `a`).
    pub fn from_dense_rows(n: usize, rows: &[Vec<bool>]) -> Result<Self, GraphError> {
        let mut var_adj = vec![Vec::new(); n];
        for (a, row) in rows.iter().enumerate() {
            for (i, &bit) in row.iter().enumerate() {
                if bit {
                    if i >= n {
                        return Err(GraphError::VariableOutOfRange(i, n));
                    }
                    var_adj[i].push(a);
                }
            }
        }
        Self::from_var_adj(rows.len(), var_adj)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn num_edges(&self) -> usize {
        self.edge_offset[self.n]
    }

    pub fn var_neighbors(&self, var: usize) -> &[usize] {
        &self.var_adj[var]
    }

    pub fn check_neighbors(&self, check: usize) -> &[usize] {
        &self.check_adj[check]
    }

    pub fn var_adj(&self) -> &[Vec<usize>] {
        &self.var_adj
    }

    pub fn check_adj(&self) -> &[Vec<usize>] {
        &self.check_adj
    }

    pub fn var_degree(&self, var: usize) -> usize {
        self.var_adj[var].len()
    }

    pub fn check_degree(&self, check: usize) -> usize {
        self.check_adj[check].len()
    }

    pub fn max_var_degree(&self) -> usize {
        self.var_adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn max_check_degree(&self) -> usize {
        self.check_adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edge id of `(var, check)`, if the edge exists.
    pub fn edge_id(&self, var: usize, check: usize) -> Option<usize> {
        self.var_adj
            .get(var)?
            .binary_search(&check)
            .ok()
            .map(|pos| self.edge_offset[var] + pos)
    }

    /// Iterates `(edge_id, var, check)` in var-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.var_adj.iter().enumerate().flat_map(move |(i, checks)| {
            checks
                .iter()
                .enumerate()
                .map(move |(k, &a)| (self.edge_offset[i] + k, i, a))
        })
    }

    /// `N(S)`: the union of the check neighborhoods of `vars`.
    pub fn neighborhood<I>(&self, vars: I) -> Result<BTreeSet<usize>, GraphError>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut out = BTreeSet::new();
        for v in vars {
            if v >= self.n {
                return Err(GraphError::VariableOutOfRange(v, self.n));
            }
            out.extend(self.var_adj[v].iter().copied());
        }
        Ok(out)
    }

    /// Number of unordered variable pairs whose neighborhoods coincide
    /// completely. Reported in experiment metadata; the ensemble allows them.
    pub fn identical_neighborhood_pairs(&self) -> usize {
        let mut sorted: Vec<&Vec<usize>> = self.var_adj.iter().filter(|a| !a.is_empty()).collect();
        sorted.sort();
        let mut pairs = 0;
        let mut run = 1;
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                run += 1;
            } else {
                pairs += run * (run - 1) / 2;
                run = 1;
            }
        }
        pairs + run * (run - 1) / 2
    }
}

/// Parameters of the bit-degree-regular ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub rate: f64,
    pub dv: usize,
    pub n: usize,
    pub seed: u64,
}

impl EnsembleParams {
    /// `m = ⌊(1 − R) n⌋`.
    pub fn num_checks(&self) -> usize {
        ((1.0 - self.rate) * self.n as f64 + 1e-9).floor() as usize
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if !(self.rate > 0.0 && self.rate < 1.0) {
            return Err(GraphError::InvalidEnsemble(format!(
                "rate {} outside (0, 1)",
                self.rate
            )));
        }
        if self.dv == 0 {
            return Err(GraphError::InvalidEnsemble("d_v must be at least 1".into()));
        }
        let m = self.num_checks();
        if m < self.dv {
            return Err(GraphError::InvalidEnsemble(format!(
                "m = {m} checks cannot host d_v = {} distinct neighbors",
                self.dv
            )));
        }
        Ok(())
    }
}

/// Samples a graph where each variable picks a uniformly random `d_v`-subset of
/// the checks, independently of every other variable.
pub fn sample_bit_regular<R: Rng + ?Sized>(
    params: &EnsembleParams,
    rng: &mut R,
) -> Result<FactorGraph, GraphError> {
    params.validate()?;
    let m = params.num_checks();
    let var_adj = (0..params.n)
        .map(|_| index::sample(rng, m, params.dv).into_vec())
        .collect();
    FactorGraph::from_var_adj(m, var_adj)
}

/// [`sample_bit_regular`] driven by ChaCha8 seeded from `params.seed`.
pub fn sample_seeded(params: &EnsembleParams) -> Result<FactorGraph, GraphError> {
    use rand::SeedableRng;
    sample_bit_regular(params, &mut rand_chacha::ChaCha8Rng::seed_from_u64(params.seed))
}
