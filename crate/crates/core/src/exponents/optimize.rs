use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::scalar::ExponentFloat;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    /// Grid points per outer axis on the first pass.
    pub grid_points: usize,
    /// Grid points per request-fraction axis (fixed across refinements).
    pub y_points: usize,
    /// Grid maxima used as pattern-search starts.
    pub top_k: usize,
    pub min_step: f64,
    pub max_refinements: usize,
    /// Stop refining once `slack < slack_ratio · |best|`.
    pub slack_ratio: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            grid_points: 9,
            y_points: 9,
            top_k: 8,
            min_step: 1e-8,
            max_refinements: 2,
            slack_ratio: 0.1,
        }
    }
}

/// Result of maximizing over a unit box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimumReport<T> {
    /// Best value found (grid + refinement).
    pub value: T,
    /// Maximizer in unit-box coordinates.
    pub point: Vec<T>,
    pub grid_value: T,
    /// Refinement gain over the grid; the margin the verdict must survive.
    pub slack: T,
    /// `value + slack < 0`.
    pub certified_negative: bool,
    /// Outer-axis grid density of the last pass.
    pub grid_points: usize,
    pub evaluations: u64,
}

/// A maximization over `[0,1]^{k+q}` split into `k` outer axes (with a cheap
/// upper bound over the remaining ones) and `q` inner axes whose grid
/// summaries are precomputed once.
pub(crate) trait BoxProblem<T: ExponentFloat>: Sync {
    type Outer;
    type Inner: Send + Sync;
    fn outer_dims(&self) -> usize;
    fn inner_dims(&self) -> usize;
    fn outer(&self, u: &[T]) -> Self::Outer;
    /// Upper bound on `value(o, ·)` over all inner points.
    fn bound(&self, o: &Self::Outer) -> T;
    fn inner(&self, u: &[T]) -> Self::Inner;
    fn value(&self, o: &Self::Outer, y: &Self::Inner) -> T;

    fn eval(&self, u: &[T]) -> T {
        let k = self.outer_dims();
        let v = self.value(&self.outer(&u[..k]), &self.inner(&u[k..]));
        if v.is_nan() {
            T::neg_infinity()
        } else {
            v
        }
    }
}

#[derive(Clone, Copy)]
struct Cand<T> {
    value: T,
    outer: usize,
    inner: usize,
}

impl<T: ExponentFloat> Cand<T> {
    // larger value first, then lexicographically smaller point
    fn better(&self, o: &Self) -> bool {
        self.value > o.value || (self.value == o.value && (self.outer, self.inner) < (o.outer, o.inner))
    }
}

struct TopK<T> {
    k: usize,
    items: Vec<Cand<T>>,
}

impl<T: ExponentFloat> TopK<T> {
    fn new(k: usize) -> Self {
        TopK { k, items: Vec::with_capacity(k + 1) }
    }

    fn floor(&self) -> Option<T> {
        (self.items.len() == self.k).then(|| self.items[self.k - 1].value)
    }

    fn push(&mut self, c: Cand<T>) {
        if self.items.len() == self.k && !c.better(&self.items[self.k - 1]) {
            return;
        }
        let pos = self.items.iter().position(|x| c.better(x)).unwrap_or(self.items.len());
        self.items.insert(pos, c);
        self.items.truncate(self.k);
    }

    fn merge(mut self, other: Self) -> Self {
        for c in other.items {
            self.push(c);
        }
        self
    }
}

fn coords<T: ExponentFloat>(mut flat: usize, dims: usize, points: usize, out: &mut [T]) {
    let denom = T::from_usize(points - 1).expect("small");
    for d in (0..dims).rev() {
        out[d] = T::from_usize(flat % points).expect("small") / denom;
        flat /= points;
    }
}

fn grid_search<T: ExponentFloat, P: BoxProblem<T>>(prob: &P, points: usize, cfg: &OptimizerConfig) -> (TopK<T>, u64) {
    let (k, q) = (prob.outer_dims(), prob.inner_dims());
    let yp = if q == 0 { 1 } else { cfg.y_points.max(2) };
    let ny = yp.pow(q as u32);
    let inner: Vec<P::Inner> = (0..ny)
        .map(|j| {
            let mut u = vec![T::zero(); q];
            if q > 0 {
                coords(j, q, yp, &mut u);
            }
            prob.inner(&u)
        })
        .collect();
    let nouter = points.pow(k as u32);
    let (top, evals) = (0..nouter)
        .into_par_iter()
        .fold(
            || (TopK::new(cfg.top_k.max(1)), 0u64),
            |(mut top, mut evals), flat| {
                let mut u = vec![T::zero(); k];
                coords(flat, k, points, &mut u);
                let o = prob.outer(&u);
                if let Some(f) = top.floor() {
                    if prob.bound(&o) < f {
                        return (top, evals);
                    }
                }
                for (j, y) in inner.iter().enumerate() {
                    let mut v = prob.value(&o, y);
                    if v.is_nan() {
                        v = T::neg_infinity();
                    }
                    top.push(Cand { value: v, outer: flat, inner: j });
                }
                evals += ny as u64;
                (top, evals)
            },
        )
        .reduce(|| (TopK::new(cfg.top_k.max(1)), 0), |(a, ea), (b, eb)| (a.merge(b), ea + eb));
    (top, evals)
}

fn point_of<T: ExponentFloat>(c: &Cand<T>, k: usize, q: usize, points: usize, yp: usize) -> Vec<T> {
    let mut u = vec![T::zero(); k + q];
    coords(c.outer, k, points, &mut u[..k]);
    if q > 0 {
        coords(c.inner, q, yp, &mut u[k..]);
    }
    u
}

/// Compass search on the unit box; moves on strict improvement only.
fn pattern_search<T: ExponentFloat, P: BoxProblem<T>>(prob: &P, start: Vec<T>, steps: Vec<T>, min_step: T) -> (T, Vec<T>, u64) {
    let mut u = start;
    let mut best = prob.eval(&u);
    let mut steps = steps;
    let mut evals = 1u64;
    let two = T::lit(2.0);
    while steps.iter().any(|&s| s >= min_step) && evals < 2_000_000 {
        let mut mv: Option<(T, usize, T)> = None;
        for d in 0..u.len() {
            for sign in [T::one(), -T::one()] {
                let x = (u[d] + sign * steps[d]).max(T::zero()).min(T::one());
                if x == u[d] {
                    continue;
                }
                let old = u[d];
                u[d] = x;
                let v = prob.eval(&u);
                u[d] = old;
                evals += 1;
                if v > best && mv.map_or(true, |(bv, _, _)| v > bv) {
                    mv = Some((v, d, x));
                }
            }
        }
        match mv {
            Some((v, d, x)) => {
                best = v;
                u[d] = x;
            }
            None => steps.iter_mut().for_each(|s| *s = *s / two),
        }
    }
    (best, u, evals)
}

pub(crate) fn maximize<T: ExponentFloat, P: BoxProblem<T>>(prob: &P, cfg: &OptimizerConfig) -> OptimumReport<T> {
    let (k, q) = (prob.outer_dims(), prob.inner_dims());
    let yp = if q == 0 { 1 } else { cfg.y_points.max(2) };
    let mut points = cfg.grid_points.max(2);
    let mut evaluations = 0u64;
    let mut refinements = 0;
    loop {
        let (top, ev) = grid_search(prob, points, cfg);
        evaluations += ev;
        let grid_best = top.items[0].value;
        let mut steps = vec![T::lit(0.5) / T::from_usize(points - 1).expect("small"); k];
        steps.extend(std::iter::repeat(T::lit(0.5) / T::from_usize(yp.max(2) - 1).expect("small")).take(q));
        let mut best = (grid_best, point_of(&top.items[0], k, q, points, yp));
        for c in &top.items {
            let (v, u, ev) = pattern_search(prob, point_of(c, k, q, points, yp), steps.clone(), T::lit(cfg.min_step));
            evaluations += ev;
            if v > best.0 {
                best = (v, u);
            }
        }
        let slack = if best.0 == grid_best { T::zero() } else { best.0 - grid_best };
        let done = slack < T::lit(cfg.slack_ratio) * best.0.abs() || slack.is_zero() || refinements >= cfg.max_refinements;
        if done {
            return OptimumReport {
                value: best.0,
                point: best.1,
                grid_value: grid_best,
                slack,
                certified_negative: best.0 + slack < T::zero(),
                grid_points: points,
                evaluations,
            };
        }
        points = 2 * points - 1;
        refinements += 1;
    }
}
