use serde::{Deserialize, Serialize};

use super::{is_codeword, LpError};
use crate::channel::Gamma;
use crate::factor_graph::FactorGraph;
use crate::gf2::nullspace_basis;

pub const DEFAULT_MAX_DIMENSION: usize = 22;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlResult {
    pub codeword: Vec<bool>,
    pub cost: f64,
    /// Another codeword attains the same cost.
    pub tie: bool,
}

/// Exhaustive ML decoding over all `2^k` codewords, walked in Gray-code order.
/// Ties resolve to the lexicographically smallest word and are flagged.
pub fn decode_ml_bruteforce(g: &FactorGraph, gamma: &Gamma, max_k: usize) -> Result<MlResult, LpError> {
    if gamma.len() != g.n() {
        return Err(LpError::SizeMismatch { got: gamma.len(), want: g.n() });
    }
    let basis = nullspace_basis(g);
    let k = basis.len();
    if k > max_k {
        return Err(LpError::Budget { k, max_k });
    }
    let supports: Vec<Vec<usize>> = basis
        .iter()
        .map(|b| b.iter().enumerate().filter(|(_, &x)| x).map(|(i, _)| i).collect())
        .collect();
    let gv = gamma.values();
    let mut word = vec![false; g.n()];
    let mut cost = 0.0;
    let mut best = word.clone();
    let mut best_cost = 0.0;
    let mut tie = false;
    for step in 1u64..(1u64 << k) {
        let bit = step.trailing_zeros() as usize;
        for &i in &supports[bit] {
            cost += if word[i] { -gv[i] } else { gv[i] };
            word[i] = !word[i];
        }
        if cost < best_cost - 1e-12 {
            best_cost = cost;
            best.clone_from(&word);
            tie = false;
        } else if (cost - best_cost).abs() <= 1e-12 {
            tie = true;
            if word < best {
                best.clone_from(&word);
            }
        }
    }
    debug_assert!(is_codeword(g, &best));
    Ok(MlResult {
        codeword: best,
        cost: best_cost,
        tie,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{gamma_from_flips, FlipPattern};

    fn repetition3() -> FactorGraph {
        FactorGraph::from_var_adj(2, vec![vec![0], vec![0, 1], vec![1]]).unwrap()
    }

    #[test]
    fn no_flips_gives_zero() {
        let g = repetition3();
        let r = decode_ml_bruteforce(&g, &gamma_from_flips(&FlipPattern::none(3)), 22).unwrap();
        assert_eq!(r.codeword, vec![false; 3]);
        assert_eq!(r.cost, 0.0);
        assert!(!r.tie);
    }

    #[test]
    fn repetition_single_flip() {
        // 000 costs 0, 111 costs −1 + 1 + 1 = 1
        let g = repetition3();
        let gamma = gamma_from_flips(&FlipPattern::new(3, vec![0]).unwrap());
        let r = decode_ml_bruteforce(&g, &gamma, 22).unwrap();
        assert_eq!(r.codeword, vec![false; 3]);
        // two flips tip it over: 111 costs −1
        let gamma = gamma_from_flips(&FlipPattern::new(3, vec![0, 2]).unwrap());
        let r = decode_ml_bruteforce(&g, &gamma, 22).unwrap();
        assert_eq!(r.codeword, vec![true; 3]);
        assert_eq!(r.cost, -1.0);
    }

    #[test]
    fn full_rank_has_only_zero() {
        let g = FactorGraph::from_var_adj(2, vec![vec![0], vec![1]]).unwrap();
        let gamma = gamma_from_flips(&FlipPattern::new(2, vec![0, 1]).unwrap());
        let r = decode_ml_bruteforce(&g, &gamma, 0).unwrap();
        assert_eq!(r.codeword, vec![false, false]);
    }

    #[test]
    fn tie_is_flagged() {
        // code {00, 11}, γ = (−1, +1): both cost 0
        let g = FactorGraph::from_var_adj(1, vec![vec![0], vec![0]]).unwrap();
        let gamma = gamma_from_flips(&FlipPattern::new(2, vec![0]).unwrap());
        let r = decode_ml_bruteforce(&g, &gamma, 22).unwrap();
        assert!(r.tie);
        assert_eq!(r.codeword, vec![false, false]);
    }

    #[test]
    fn budget() {
        let g = FactorGraph::from_var_adj(0, vec![vec![]; 5]).unwrap();
        let gamma = gamma_from_flips(&FlipPattern::none(5));
        assert!(matches!(decode_ml_bruteforce(&g, &gamma, 4), Err(LpError::Budget { k: 5, .. })));
    }
}
