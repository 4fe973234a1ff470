//! Dense GF(2) linear algebra on bit-packed rows.

use crate::factor_graph::FactorGraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitRow {
    words: Vec<u64>,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        BitRow {
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        let bit = 1u64 << (i % 64);
        if v {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    pub fn xor_assign(&mut self, other: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }
}

fn parity_rows(g: &FactorGraph) -> Vec<BitRow> {
    (0..g.m())
        .map(|a| {
            let mut r = BitRow::zeros(g.n());
            for &i in g.check_neighbors(a) {
                r.set(i, true);
            }
            r
        })
        .collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(rows: &mut [BitRow], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&k| rows[k].get(c)) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            if k != r && row.get(c) {
                row.xor_assign(&pivot);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(g: &FactorGraph) -> usize {
    let mut rows = parity_rows(g);
    rref(&mut rows, g.n()).len()
}

/// Basis of the code `{x : Hx = 0}`, one binary vector per free column.
pub fn nullspace_basis(g: &FactorGraph) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut rows = parity_rows(g);
    let pivots = rref(&mut rows, n);
    let mut is_pivot = vec![false; n];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    (0..n)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![false; n];
            v[f] = true;
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = rows[r].get(f);
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp_decoder::is_codeword;

    #[test]
    fn repetition_code() {
        // checks x0+x1, x1+x2
        let g = FactorGraph::from_var_adj(2, vec![vec![0], vec![0, 1], vec![1]]).unwrap();
        assert_eq!(rank(&g), 2);
        assert_eq!(nullspace_basis(&g), vec![vec![true, true, true]]);
    }

    #[test]
    fn full_rank_has_trivial_code() {
        let g = FactorGraph::from_var_adj(2, vec![vec![0], vec![1]]).unwrap();
        assert_eq!(rank(&g), 2);
        assert!(nullspace_basis(&g).is_empty());
    }

    #[test]
    fn basis_vectors_are_codewords() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let p = crate::factor_graph::EnsembleParams { rate: 0.5, dv: 3, n: 70, seed: 0 };
        let g = crate::factor_graph::sample_bit_regular(&p, &mut rng).unwrap();
        let basis = nullspace_basis(&g);
        assert_eq!(basis.len(), g.n() - rank(&g));
        for v in &basis {
            assert!(is_codeword(&g, v));
        }
    }
}
