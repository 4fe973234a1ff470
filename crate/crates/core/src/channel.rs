//! Binary symmetric channel under the all-zero-codeword convention.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("flip fraction {0} outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("flipped index {index} out of range for block length {n}")]
    IndexOutOfRange { index: usize, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlipMode {
    /// Exactly `⌈αn⌉` bits, uniformly chosen.
    #[default]
    Exact,
    /// Every bit flips independently with probability α.
    Bernoulli,
}

/// Set of flipped positions. Serializes as a bare JSON index list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipPattern {
    n: usize,
    flipped: Vec<usize>,
}

impl FlipPattern {
    pub fn new(n: usize, mut flipped: Vec<usize>) -> Result<Self, ChannelError> {
        flipped.sort_unstable();
        flipped.dedup();
        if let Some(&index) = flipped.last() {
            if index >= n {
                return Err(ChannelError::IndexOutOfRange { index, n });
            }
        }
        Ok(FlipPattern { n, flipped })
    }

    pub fn none(n: usize) -> Self {
        FlipPattern { n, flipped: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sorted flipped indices.
    pub fn flipped(&self) -> &[usize] {
        &self.flipped
    }

    pub fn len(&self) -> usize {
        self.flipped.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flipped.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.flipped.binary_search(&i).is_ok()
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.n];
        for &i in &self.flipped {
            m[i] = true;
        }
        m
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.flipped).expect("index list serializes")
    }

    pub fn from_json(n: usize, text: &str) -> Result<Self, Box<dyn std::error::Error + Send + Sync>> {
        let idx: Vec<usize> = serde_json::from_str(text)?;
        Ok(Self::new(n, idx)?)
    }
}

/// Normalized log-likelihoods: −1 on flipped bits, +1 elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gamma {
    values: Vec<f64>,
}

impl Gamma {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Cost `Σ γ_i y_i`.
    pub fn cost(&self, y: &[f64]) -> f64 {
        self.values.iter().zip(y).map(|(g, v)| g * v).sum()
    }
}

pub fn sample_flips<R: Rng + ?Sized>(
    n: usize,
    alpha: f64,
    mode: FlipMode,
    rng: &mut R,
) -> Result<FlipPattern, ChannelError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(ChannelError::AlphaOutOfRange(alpha));
    }
    let flipped = match mode {
        FlipMode::Exact => {
            // guard against 0.002 * 1000 = 2.0000000000000004 style round-up
            let k = ((alpha * n as f64) - 1e-9).ceil().max(0.0) as usize;
            index::sample(rng, n, k.min(n)).into_vec()
        }
        FlipMode::Bernoulli => (0..n).filter(|_| rng.gen_bool(alpha)).collect(),
    };
    FlipPattern::new(n, flipped)
}

pub fn gamma_from_flips(pattern: &FlipPattern) -> Gamma {
    let mut values = vec![1.0; pattern.n];
    for &i in &pattern.flipped {
        values[i] = -1.0;
    }
    Gamma { values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_flips(10, 0.0, FlipMode::Exact, &mut rng).unwrap().is_empty());
        assert_eq!(sample_flips(10, 1.0, FlipMode::Exact, &mut rng).unwrap().flipped(), (0..10).collect::<Vec<_>>());
        assert_eq!(sample_flips(1000, 0.002, FlipMode::Exact, &mut rng).unwrap().len(), 2);
        assert_eq!(sample_flips(1000, 0.0021, FlipMode::Exact, &mut rng).unwrap().len(), 3);
    }

    #[test]
    fn rejects_bad_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_flips(10, 1.5, FlipMode::Exact, &mut rng).is_err());
        assert!(sample_flips(10, -0.1, FlipMode::Bernoulli, &mut rng).is_err());
    }

    #[test]
    fn bernoulli_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = sample_flips(100_000, 0.1, FlipMode::Bernoulli, &mut rng).unwrap();
        assert!((f.len() as f64 - 10_000.0).abs() < 400.0);
    }

    #[test]
    fn gamma_signs() {
        let g = |f: Vec<usize>| gamma_from_flips(&FlipPattern::new(3, f).unwrap()).values().to_vec();
        assert_eq!(g(vec![]), vec![1.0, 1.0, 1.0]);
        assert_eq!(g(vec![0]), vec![-1.0, 1.0, 1.0]);
        assert_eq!(g(vec![0, 2]), vec![-1.0, 1.0, -1.0]);
    }

    #[test]
    fn json_index_list() {
        let f = FlipPattern::new(5, vec![3, 1]).unwrap();
        assert_eq!(f.to_json(), "[1,3]");
        assert_eq!(FlipPattern::from_json(5, "[3,1]").unwrap(), f);
        assert!(FlipPattern::from_json(2, "[3]").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn gamma_sum(n in 1usize..200, alpha in 0.0f64..1.0, seed in any::<u64>()) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let f = sample_flips(n, alpha, FlipMode::Exact, &mut rng).unwrap();
                let g = gamma_from_flips(&f);
                let s: f64 = g.values().iter().sum();
                prop_assert_eq!(s, n as f64 - 2.0 * f.len() as f64);
                prop_assert_eq!(f.len(), (alpha * n as f64 - 1e-9).ceil().max(0.0) as usize);
            }
        }
    }
}
