//! Exhaustive `(μn, p)` expansion check.
//!
//! A minimum-size violating set is always connected in the variable overlap
//! graph (variables adjacent iff they share a check): if it split into parts
//! with disjoint neighborhoods, each part would be smaller and hence expand,
//! and the neighborhood sizes would add up. So only connected sets are
//! enumerated, each exactly once (ESU enumeration rooted at its smallest member).

use serde::{Deserialize, Serialize};

use super::{FactorGraph, GraphError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionSpec {
    pub mu: f64,
    pub p_expand: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpansionOutcome {
    Pass,
    /// A violating set of minimum size, lexicographically first among those.
    Counterexample(Vec<usize>),
}

pub const DEFAULT_BUDGET: u64 = 200_000_000;

/// Checks `|N(S)| ≥ p|S|` for every `S` with `|S| ≤ ⌊μn⌋`.
pub fn check_expansion_exhaustive(
    graph: &FactorGraph,
    spec: &ExpansionSpec,
    budget: u64,
) -> Result<ExpansionOutcome, GraphError> {
    if !(spec.mu > 0.0 && spec.mu <= 1.0) {
        return Err(GraphError::InvalidExpansion(format!("mu = {} outside (0, 1]", spec.mu)));
    }
    let dv = graph.max_var_degree() as f64;
    if !(spec.p_expand > 0.0) || spec.p_expand > dv {
        return Err(GraphError::InvalidExpansion(format!(
            "p = {} must lie in (0, d_v = {dv}]",
            spec.p_expand
        )));
    }
    let max_size = (spec.mu * graph.n() as f64 + 1e-9).floor() as usize;
    let mut search = Search::new(graph, spec.p_expand, max_size, budget);
    search.run()?;
    Ok(match search.best {
        Some(s) => ExpansionOutcome::Counterexample(s),
        None => ExpansionOutcome::Pass,
    })
}

/// Largest `k ≤ cap` such that all sets of size `≤ k` expand by `p`, i.e. the
/// largest `μn` the exhaustive checker certifies. Stops early on the budget and
/// reports what was fully verified before it ran out.
pub fn max_certified_size(graph: &FactorGraph, p_expand: f64, cap: usize, budget: u64) -> usize {
    let mut verified = 0;
    for k in 1..=cap.min(graph.n()) {
        let mut search = Search::new(graph, p_expand, k, budget);
        match search.run() {
            Ok(()) if search.best.is_none() => verified = k,
            _ => break,
        }
    }
    verified
}

struct Search<'g> {
    g: &'g FactorGraph,
    p: f64,
    max_size: usize,
    budget: u64,
    visited: u64,
    overlap: Vec<Vec<usize>>,
    check_count: Vec<u32>,
    distinct: usize,
    // members of S plus their overlap neighbors, with multiplicity
    near: Vec<u32>,
    set: Vec<usize>,
    best: Option<Vec<usize>>,
}

impl<'g> Search<'g> {
    fn new(g: &'g FactorGraph, p: f64, max_size: usize, budget: u64) -> Self {
        let overlap = (0..g.n())
            .map(|v| {
                let mut o: Vec<usize> = g
                    .var_neighbors(v)
                    .iter()
                    .flat_map(|&a| g.check_neighbors(a).iter().copied())
                    .filter(|&u| u != v)
                    .collect();
                o.sort_unstable();
                o.dedup();
                o
            })
            .collect();
        Search {
            g,
            p,
            max_size,
            budget,
            visited: 0,
            overlap,
            check_count: vec![0; g.m()],
            distinct: 0,
            near: vec![0; g.n()],
            set: Vec::new(),
            best: None,
        }
    }

    fn run(&mut self) -> Result<(), GraphError> {
        for v in 0..self.g.n() {
            if self.max_size == 0 {
                break;
            }
            self.push(v);
            let ext: Vec<usize> = self.overlap[v].iter().copied().filter(|&u| u > v).collect();
            let r = self.extend(ext, v);
            self.pop();
            r?;
        }
        Ok(())
    }

    fn push(&mut self, v: usize) {
        self.set.push(v);
        for &a in self.g.var_neighbors(v) {
            if self.check_count[a] == 0 {
                self.distinct += 1;
            }
            self.check_count[a] += 1;
        }
        self.near[v] += 1;
        for &u in &self.overlap[v] {
            self.near[u] += 1;
        }
    }

    fn pop(&mut self) {
        let v = self.set.pop().expect("non-empty set");
        for &a in self.g.var_neighbors(v) {
            self.check_count[a] -= 1;
            if self.check_count[a] == 0 {
                self.distinct -= 1;
            }
        }
        self.near[v] -= 1;
        for &u in &self.overlap[v] {
            self.near[u] -= 1;
        }
    }

    fn extend(&mut self, mut ext: Vec<usize>, root: usize) -> Result<(), GraphError> {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(GraphError::BudgetExceeded { budget: self.budget });
        }
        if (self.distinct as f64) < self.p * self.set.len() as f64 {
            let mut s = self.set.clone();
            s.sort_unstable();
            let better = match &self.best {
                None => true,
                Some(b) => (s.len(), &s) < (b.len(), b),
            };
            if better {
                // nothing larger can be the minimum any more
                self.max_size = s.len();
                self.best = Some(s);
            }
        }
        if self.set.len() >= self.max_size {
            return Ok(());
        }
        while let Some(w) = ext.pop() {
            // exclusive neighbors of w: not in S and not adjacent to S
            let mut next = ext.clone();
            next.extend(
                self.overlap[w]
                    .iter()
                    .copied()
                    .filter(|&u| u > root && self.near[u] == 0),
            );
            self.push(w);
            let r = self.extend(next, root);
            self.pop();
            r?;
            if self.set.len() >= self.max_size {
                break;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn private_checks(n: usize, dv: usize) -> FactorGraph {
        FactorGraph::from_var_adj(n * dv, (0..n).map(|i| (i * dv..(i + 1) * dv).collect()).collect())
            .unwrap()
    }

    #[test]
    fn private_neighborhoods_pass() {
        let g = private_checks(6, 3);
        for p in [1.0, 2.0, 3.0] {
            let spec = ExpansionSpec { mu: 1.0, p_expand: p };
            assert_eq!(check_expansion_exhaustive(&g, &spec, DEFAULT_BUDGET).unwrap(), ExpansionOutcome::Pass);
        }
    }

    #[test]
    fn identical_pair_is_counterexample() {
        let g = FactorGraph::from_var_adj(6, vec![vec![0, 1, 2], vec![3, 4, 5], vec![0, 1, 2]]).unwrap();
        let spec = ExpansionSpec { mu: 1.0, p_expand: 3.0 };
        assert_eq!(
            check_expansion_exhaustive(&g, &spec, DEFAULT_BUDGET).unwrap(),
            ExpansionOutcome::Counterexample(vec![0, 2])
        );
    }

    #[test]
    fn singletons_expand() {
        let g = FactorGraph::from_var_adj(4, vec![vec![0, 1], vec![0, 1], vec![2, 3]]).unwrap();
        let spec = ExpansionSpec { mu: 1.0, p_expand: 2.0 };
        match check_expansion_exhaustive(&g, &spec, DEFAULT_BUDGET).unwrap() {
            ExpansionOutcome::Counterexample(s) => assert!(s.len() > 1),
            ExpansionOutcome::Pass => panic!("pair {{0,1}} violates"),
        }
    }

    #[test]
    fn budget_guard() {
        let g = private_checks(30, 1);
        let spec = ExpansionSpec { mu: 1.0, p_expand: 1.0 };
        assert!(check_expansion_exhaustive(&g, &spec, 5).is_err());
    }

    #[test]
    fn rejects_p_above_degree() {
        let g = private_checks(2, 2);
        let spec = ExpansionSpec { mu: 1.0, p_expand: 3.0 };
        assert!(check_expansion_exhaustive(&g, &spec, DEFAULT_BUDGET).is_err());
    }

    // independent oracle: all subsets by bitmask
    fn brute(g: &FactorGraph, p: f64, k: usize) -> Option<Vec<usize>> {
        let n = g.n();
        let mut best: Option<Vec<usize>> = None;
        for mask in 1u32..(1 << n) {
            let s: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if s.len() > k {
                continue;
            }
            let ns = g.neighborhood(s.iter().copied()).unwrap().len();
            if (ns as f64) < p * s.len() as f64 {
                let better = match &best {
                    None => true,
                    Some(b) => (s.len(), &s) < (b.len(), b),
                };
                if better {
                    best = Some(s);
                }
            }
        }
        best
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn matches_bruteforce(
                adj in proptest::collection::vec(proptest::collection::btree_set(0usize..8, 3), 1..11),
                p in 1.0f64..3.0,
                k in 1usize..6,
            ) {
                let g = FactorGraph::from_var_adj(8, adj.into_iter().map(|s| s.into_iter().collect()).collect()).unwrap();
                let mu = k as f64 / g.n() as f64;
                let got = check_expansion_exhaustive(&g, &ExpansionSpec { mu: mu.min(1.0), p_expand: p }, DEFAULT_BUDGET).unwrap();
                let want = brute(&g, p, k.min(g.n()));
                match (got, want) {
                    (ExpansionOutcome::Pass, None) => {}
                    (ExpansionOutcome::Counterexample(s), Some(b)) => {
                        prop_assert_eq!(&s, &b);
                        let ns = g.neighborhood(s.iter().copied()).unwrap().len();
                        prop_assert!((ns as f64) < p * s.len() as f64);
                    }
                    (a, b) => prop_assert!(false, "disagree: {:?} vs {:?}", a, b),
                }
            }
        }
    }
}
