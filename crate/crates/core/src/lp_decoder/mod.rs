//! First-order LP relaxation: forbidding inequalities, separation, the
//! cutting-plane decoder and a brute-force ML oracle for tiny codes.

mod decode;
mod lpformat;
mod ml;

pub use decode::{decode_lp, exact_resolve, primal_lp_text, DecodeConfig, DecodeMode, DecodeResult, DecodeStatus, ExactResolve};
pub use lpformat::to_lp_text;
pub use ml::{decode_ml_bruteforce, MlResult, DEFAULT_MAX_DIMENSION};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::factor_graph::FactorGraph;
use crate::scalar::Scalar;
use crate::simplex::{Row, Sense, SimplexError};

pub const DEFAULT_DEGREE_CAP: usize = 12;
pub const CUT_VIOLATION_TOL: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("subset for check {check} has even size {size}")]
    EvenSubset { check: usize, size: usize },
    #[error("variable {var} is not a neighbor of check {check}")]
    NotANeighbor { check: usize, var: usize },
    #[error("check {check} has degree {degree}, above the full-enumeration cap {cap}; use cut generation")]
    DegreeCap { check: usize, degree: usize, cap: usize },
    #[error("cost vector has length {got}, graph has {want} variables")]
    SizeMismatch { got: usize, want: usize },
    #[error("cut loop did not converge within {rounds} rounds")]
    RoundLimit { rounds: usize, partial: Box<DecodeResult> },
    #[error("simplex failure: {source}")]
    Simplex {
        #[source]
        source: SimplexError,
        /// LP text of the instance that failed, for offline inspection.
        dump: String,
    },
    #[error("code dimension {k} exceeds the enumeration budget 2^{max_k}")]
    Budget { k: usize, max_k: usize },
}

/// `Σ coeff_i y_i ≥ rhs` with small integer data, so it converts to any scalar.
///
/// Forbidding cuts are stored in the moved-to-right-hand-side form
/// `Σ_{N(a)∖S} y_i − Σ_S y_i ≥ 1 − |S|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub check: Option<usize>,
    pub coeffs: Vec<(usize, i32)>,
    pub rhs: i32,
}

impl LinearConstraint {
    pub fn lhs(&self, y: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(i, a)| a as f64 * y[i]).sum()
    }

    /// Positive when `y` violates the constraint.
    pub fn violation(&self, y: &[f64]) -> f64 {
        self.rhs as f64 - self.lhs(y)
    }

    pub fn to_row<T: Scalar>(&self) -> Row<T> {
        Row {
            coeffs: self
                .coeffs
                .iter()
                .map(|&(i, a)| (i, T::from_i64_exact(a as i64)))
                .collect(),
            sense: Sense::Ge,
            rhs: T::from_i64_exact(self.rhs as i64),
        }
    }

    /// Odd set `S` of a forbidding cut (the variables with coefficient −1).
    pub fn odd_set(&self) -> Vec<usize> {
        self.coeffs.iter().filter(|c| c.1 < 0).map(|c| c.0).collect()
    }
}

pub fn forbidding_inequality(g: &FactorGraph, check: usize, s: &[usize]) -> Result<LinearConstraint, LpError> {
    let nbrs = g.check_neighbors(check);
    let mut s = s.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() % 2 == 0 {
        return Err(LpError::EvenSubset { check, size: s.len() });
    }
    if let Some(&var) = s.iter().find(|v| nbrs.binary_search(v).is_err()) {
        return Err(LpError::NotANeighbor { check, var });
    }
    let coeffs = nbrs
        .iter()
        .map(|&i| (i, if s.binary_search(&i).is_ok() { -1 } else { 1 }))
        .collect();
    Ok(LinearConstraint {
        check: Some(check),
        coeffs,
        rhs: 1 - s.len() as i32,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullRelaxation {
    pub forbidding: Vec<LinearConstraint>,
    /// `y_i ≥ 0` and `−y_i ≥ −1`.
    pub boxes: Vec<LinearConstraint>,
}

/// Every odd-subset inequality of every check plus the unit box.
pub fn build_full_relaxation(g: &FactorGraph, degree_cap: usize) -> Result<FullRelaxation, LpError> {
    for a in 0..g.m() {
        if g.check_degree(a) > degree_cap {
            return Err(LpError::DegreeCap {
                check: a,
                degree: g.check_degree(a),
                cap: degree_cap,
            });
        }
    }
    let mut forbidding = Vec::new();
    for a in 0..g.m() {
        let nbrs = g.check_neighbors(a);
        let d = nbrs.len();
        for mask in 0u32..(1u32 << d) {
            if mask.count_ones() % 2 == 1 {
                let s: Vec<usize> = (0..d).filter(|&k| mask >> k & 1 == 1).map(|k| nbrs[k]).collect();
                forbidding.push(forbidding_inequality(g, a, &s)?);
            }
        }
    }
    let boxes = (0..g.n())
        .flat_map(|i| {
            [
                LinearConstraint { check: None, coeffs: vec![(i, 1)], rhs: 0 },
                LinearConstraint { check: None, coeffs: vec![(i, -1)], rhs: -1 },
            ]
        })
        .collect();
    Ok(FullRelaxation { forbidding, boxes })
}

/// Most violated forbidding inequality of `check` at `y`, with its violation.
///
/// `S* = {i : y_i > ½}`; when `|S*|` is even the member of `N(a)` closest to ½
/// is toggled. This maximizes `Σ_S (2y_i − 1) − Σ_{N(a)} y_i` over odd `S`.
pub fn separate(y: &[f64], g: &FactorGraph, check: usize) -> Option<(LinearConstraint, f64)> {
    let nbrs = g.check_neighbors(check);
    if nbrs.is_empty() {
        return None;
    }
    let mut s: Vec<usize> = nbrs.iter().copied().filter(|&i| y[i] > 0.5).collect();
    if s.len() % 2 == 0 {
        let &closest = nbrs
            .iter()
            .min_by(|&&a, &&b| {
                (y[a] - 0.5)
                    .abs()
                    .partial_cmp(&(y[b] - 0.5).abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.cmp(&b))
            })
            .expect("non-empty neighborhood");
        match s.binary_search(&closest) {
            Ok(pos) => {
                s.remove(pos);
            }
            Err(pos) => s.insert(pos, closest),
        }
    }
    let cut = forbidding_inequality(g, check, &s).expect("odd subset of the neighborhood");
    let v = cut.violation(y);
    (v > CUT_VIOLATION_TOL).then_some((cut, v))
}

pub fn is_codeword(g: &FactorGraph, y: &[bool]) -> bool {
    (0..g.m()).all(|a| g.check_neighbors(a).iter().filter(|&&i| y[i]).count() % 2 == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::nullspace_basis;

    fn one_check(deg: usize) -> FactorGraph {
        FactorGraph::from_var_adj(1, vec![vec![0]; deg]).unwrap()
    }

    #[test]
    fn forbidding_shape() {
        let g = one_check(3);
        // S = {0}: y1 + y2 + (1 − y0) ≥ 1
        let c = forbidding_inequality(&g, 0, &[0]).unwrap();
        assert_eq!(c.coeffs, vec![(0, -1), (1, 1), (2, 1)]);
        assert_eq!(c.rhs, 0);
        // S = N(a): Σ(1 − y_i) ≥ 1 cuts off the all-ones word
        let all = forbidding_inequality(&g, 0, &[0, 1, 2]).unwrap();
        assert_eq!(all.rhs, -2);
        assert!(all.violation(&[1.0, 1.0, 1.0]) > 0.0);
        assert!(matches!(forbidding_inequality(&g, 0, &[0, 1]), Err(LpError::EvenSubset { .. })));
        let g2 = FactorGraph::from_var_adj(2, vec![vec![0], vec![1]]).unwrap();
        assert!(matches!(forbidding_inequality(&g2, 0, &[1]), Err(LpError::NotANeighbor { .. })));
    }

    #[test]
    fn full_relaxation_counts() {
        assert_eq!(build_full_relaxation(&one_check(3), 12).unwrap().forbidding.len(), 4);
        for d in 1..=8 {
            assert_eq!(build_full_relaxation(&one_check(d), 12).unwrap().forbidding.len(), 1 << (d - 1));
        }
        assert!(matches!(build_full_relaxation(&one_check(13), 12), Err(LpError::DegreeCap { .. })));
    }

    fn brute_separate(y: &[f64], g: &FactorGraph, a: usize) -> f64 {
        let nbrs = g.check_neighbors(a);
        let mut best = f64::NEG_INFINITY;
        for mask in 0u32..(1 << nbrs.len()) {
            if mask.count_ones() % 2 == 1 {
                let s: Vec<usize> = (0..nbrs.len()).filter(|&k| mask >> k & 1 == 1).map(|k| nbrs[k]).collect();
                best = best.max(forbidding_inequality(g, a, &s).unwrap().violation(y));
            }
        }
        best
    }

    #[test]
    fn separation_examples() {
        let g = one_check(2);
        // integral point on the check
        assert!(separate(&[1.0, 1.0], &g, 0).is_none());
        // both coordinates above ½: every odd cut is satisfied
        assert!(brute_separate(&[0.9, 0.9], &g, 0) <= 0.0);
        assert!(separate(&[0.9, 0.9], &g, 0).is_none());
        let (cut, v) = separate(&[0.9, 0.1], &g, 0).unwrap();
        assert!((v - 0.8).abs() < 1e-12);
        assert!((brute_separate(&[0.9, 0.1], &g, 0) - 0.8).abs() < 1e-12);
        assert_eq!(cut.odd_set(), vec![0]);
        // all-½: every odd cut has violation 1 − d/2, so only degree 1 is cut
        for d in 1..=6 {
            let g = one_check(d);
            let y = vec![0.5; d];
            let closed = 1.0 - d as f64 / 2.0;
            assert!((brute_separate(&y, &g, 0) - closed).abs() < 1e-12);
            match separate(&y, &g, 0) {
                Some((_, v)) => assert!(d == 1 && (v - closed).abs() < 1e-12),
                None => assert!(d > 1),
            }
        }
    }

    #[test]
    fn codeword_check() {
        let g = FactorGraph::from_var_adj(2, vec![vec![0], vec![0, 1], vec![1]]).unwrap();
        assert!(is_codeword(&g, &[false; 3]));
        assert!(is_codeword(&g, &[true; 3]));
        assert!(!is_codeword(&g, &[true, true, false]));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::{Rng, SeedableRng};

        fn arb_graph() -> impl Strategy<Value = FactorGraph> {
            (1usize..7, 2usize..14).prop_flat_map(|(m, n)| {
                proptest::collection::vec(proptest::collection::btree_set(0..m, 1..=m.min(3)), n).prop_map(
                    move |adj| FactorGraph::from_var_adj(m, adj.into_iter().map(|s| s.into_iter().collect()).collect()).unwrap(),
                )
            })
        }

        proptest! {
            #[test]
            fn separation_is_maximal(g in arb_graph(), seed in any::<u64>()) {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let y: Vec<f64> = (0..g.n()).map(|_| rng.gen::<f64>()).collect();
                for a in 0..g.m() {
                    if g.check_degree(a) > 10 { continue; }
                    let best = brute_separate(&y, &g, a);
                    match separate(&y, &g, a) {
                        Some((_, v)) => prop_assert!((v - best).abs() < 1e-12),
                        None => prop_assert!(best <= CUT_VIOLATION_TOL),
                    }
                }
            }

            #[test]
            fn codewords_satisfy_all_cuts(g in arb_graph(), seed in any::<u64>()) {
                let basis = nullspace_basis(&g);
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let mut word = vec![false; g.n()];
                for b in &basis {
                    if rng.gen::<bool>() {
                        for (w, &x) in word.iter_mut().zip(b) { *w ^= x; }
                    }
                }
                prop_assert!(is_codeword(&g, &word));
                let y: Vec<f64> = word.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
                let Ok(full) = build_full_relaxation(&g, 12) else { return Ok(()) };
                for c in full.forbidding.iter().chain(&full.boxes) {
                    prop_assert!(c.violation(&y) <= 0.0);
                }
            }

            #[test]
            fn dense_parity_oracle(g in arb_graph(), seed in any::<u64>()) {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let y: Vec<bool> = (0..g.n()).map(|_| rng.gen()).collect();
                // H as a dense 0/1 matrix, multiplied mod 2
                let h: Vec<Vec<u8>> = (0..g.m())
                    .map(|a| (0..g.n()).map(|i| g.var_neighbors(i).contains(&a) as u8).collect())
                    .collect();
                let syndrome_zero = h.iter().all(|row| row.iter().zip(&y).map(|(&h, &b)| h as u32 * b as u32).sum::<u32>() % 2 == 0);
                prop_assert_eq!(is_codeword(&g, &y), syndrome_zero);
            }
        }
    }
}
