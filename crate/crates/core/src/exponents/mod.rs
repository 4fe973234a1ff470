//! Asymptotic rate functions behind the correctable-fraction threshold.
//!
//! Everything here is per-bit (already divided by `n`) and uses the `n → ∞`
//! limits of the finite-length ratios. Points outside an entropy's domain are
//! mapped to `-∞` ("contributes nothing to a sup"); NaN never escapes.

mod certificate;
mod optimize;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matching::{validate_pq, MatchingError};
use crate::scalar::ExponentFloat;
use crate::Rational;

pub use certificate::{
    alpha_crit_search, certificate, f_alpha, f_prime, is_certified, AlphaSearch, Conditions, Eps2Row, ExponentReport,
    FPoint, ALPHA_RESOLUTION, ALPHA_SEARCH_CEILING, REPORT_SCHEMA_VERSION,
};
pub use optimize::{OptimizerConfig, OptimumReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExponentError {
    #[error("entropy argument {0} outside [0, 1]")]
    EntropyDomain(f64),
    #[error("flip density t = {0} exceeds 1")]
    DensityAboveOne(f64),
    #[error("alpha = {0} outside (0, 1)")]
    Alpha(f64),
    #[error("eps1 = {0} is negative")]
    Eps1(f64),
    #[error("bad expansion parameters: {0}")]
    Expansion(String),
    #[error(transparent)]
    Restriction(#[from] MatchingError),
}

/// How the third threshold condition is read: its two factors are printed
/// without an operator between them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum C15Reading {
    #[default]
    Sum,
    Product,
}

pub const DEFAULT_EPS2_GRID: [f64; 10] = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentParams<T> {
    pub rate: T,
    pub dv: usize,
    pub p: usize,
    pub q: usize,
    pub alpha: T,
    pub eps1: T,
    pub eps2_grid: Vec<T>,
    #[serde(default)]
    pub c15_reading: C15Reading,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
}

impl<T: ExponentFloat> ExponentParams<T> {
    pub fn new(rate: f64, dv: usize, p: usize, q: usize, alpha: f64) -> Self {
        ExponentParams {
            rate: T::lit(rate),
            dv,
            p,
            q,
            alpha: T::lit(alpha),
            eps1: T::zero(),
            eps2_grid: DEFAULT_EPS2_GRID.iter().map(|&e| T::lit(e)).collect(),
            c15_reading: C15Reading::Sum,
            optimizer: OptimizerConfig::default(),
        }
    }

    pub fn with_alpha(&self, alpha: T) -> Self {
        ExponentParams { alpha, ..self.clone() }
    }

    pub fn with_eps1(mut self, eps1: T) -> Self {
        self.eps1 = eps1;
        self
    }

    /// Domain checks that make the formulas meaningful; the (p, q, d_v)
    /// restrictions are a separate certificate condition.
    pub fn validate(&self) -> Result<(), ExponentError> {
        let a = self.alpha.to_f64().unwrap_or(f64::NAN);
        if !(a > 0.0 && a < 1.0) {
            return Err(ExponentError::Alpha(a));
        }
        if self.eps1 < T::zero() {
            return Err(ExponentError::Eps1(self.eps1.to_f64().unwrap_or(f64::NAN)));
        }
        if self.q == 0 || self.q > self.dv {
            return Err(ExponentError::Expansion(format!("q = {} must lie in 1..=d_v = {}", self.q, self.dv)));
        }
        let t = self.density();
        if t > T::one() {
            return Err(ExponentError::DensityAboveOne(t.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(())
    }

    pub fn restrictions(&self) -> Result<(), MatchingError> {
        validate_pq(self.p, self.q, self.dv)
    }

    pub(crate) fn one_minus_r(&self) -> T {
        T::one() - self.rate
    }

    pub(crate) fn dvf(&self) -> T {
        T::from_usize(self.dv).expect("small integer")
    }

    pub(crate) fn pf(&self) -> T {
        T::from_usize(self.p).expect("small integer")
    }

    /// Fraction of checks hit by one flipped edge, `αd_v/(1−R)`.
    pub fn density(&self) -> T {
        self.alpha * self.dvf() / self.one_minus_r()
    }
}

fn idx<T: ExponentFloat>(i: usize) -> T {
    T::from_usize(i).expect("small integer")
}

// Rounding slop tolerated at entropy domain edges.
fn edge_tol<T: ExponentFloat>() -> T {
    T::epsilon() * T::lit(64.0)
}

/// Binary entropy in bits, `None` outside `[0, 1]` (modulo rounding slop).
pub(crate) fn h<T: ExponentFloat>(x: T) -> Option<T> {
    if x.is_nan() || x < -edge_tol::<T>() || x > T::one() + edge_tol::<T>() {
        return None;
    }
    let x = x.max(T::zero()).min(T::one());
    if x.is_zero() || x == T::one() {
        return Some(T::zero());
    }
    let y = T::one() - x;
    Some(-(x * x.log2()) - y * y.log2())
}

pub fn entropy<T: ExponentFloat>(x: T) -> Result<T, ExponentError> {
    if x.is_nan() || x < T::zero() || x > T::one() {
        return Err(ExponentError::EntropyDomain(x.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(h(x).expect("checked domain"))
}

/// `c · log₂(z)` with `0 · log₂(anything) = 0`.
pub(crate) fn clog2<T: ExponentFloat>(c: T, z: T) -> T {
    if c.is_zero() {
        T::zero()
    } else if z <= T::zero() {
        T::neg_infinity()
    } else {
        c * z.log2()
    }
}

/// `w · H(num/den)` with `0 · H(·) = 0`; `None` when infeasible.
pub(crate) fn weighted_h<T: ExponentFloat>(w: T, num: T, den: T) -> Option<T> {
    if w.is_zero() {
        return Some(T::zero());
    }
    if den <= T::zero() {
        return if num.abs() <= edge_tol::<T>() { Some(T::zero()) } else { None };
    }
    h(num / den).map(|v| w * v)
}

fn or_neg_inf<T: ExponentFloat>(v: Option<T>) -> T {
    v.unwrap_or_else(T::neg_infinity)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// `b_i = C(d_v, d_v−q+i) t^{d_v−q+i} (1−t)^{q−i}` for `i = 1..q`.
pub fn b_coeffs<T: ExponentFloat>(params: &ExponentParams<T>) -> Result<Vec<T>, ExponentError> {
    let t = params.density();
    if t > T::one() {
        return Err(ExponentError::DensityAboveOne(t.to_f64().unwrap_or(f64::NAN)));
    }
    let (dv, q) = (params.dv, params.q);
    Ok((1..=q)
        .map(|i| {
            let k = dv + i - q;
            T::lit(binomial(dv, k)) * t.powi(k as i32) * (T::one() - t).powi((q - i) as i32)
        })
        .collect())
}

pub fn ybar_up<T: ExponentFloat>(params: &ExponentParams<T>) -> Result<Vec<T>, ExponentError> {
    let one_a = T::one() - params.alpha;
    Ok(b_coeffs(params)?.into_iter().map(|b| b * one_a + params.eps1).collect())
}

pub fn vbar<T: ExponentFloat>(params: &ExponentParams<T>) -> Result<T, ExponentError> {
    Ok(ybar_up(params)?
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (k, &y)| acc + idx::<T>(k + 1) * y))
}

/// The upper-regime exponent; `None` when an entropy argument leaves `[0, 1]`.
pub fn f_exponent<T: ExponentFloat>(s: T, params: &ExponentParams<T>, vbar: T) -> Option<T> {
    let (a, omr) = (params.alpha, params.one_minus_r());
    let r = (params.pf() * s + vbar) / omr;
    let t1 = weighted_h(a, s, a)?;
    let t2 = weighted_h(omr, params.pf() * s + vbar, omr)?;
    Some(t1 + t2 + clog2(params.dvf() * s, r))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SCrit<T> {
    pub value: T,
    /// False if `f` left its entropy domain somewhere on `[s_crit, α]`.
    pub domain_ok: bool,
}

pub const S_SCAN_STEP: f64 = 1e-6;

/// `min{α, inf{s : f < 0 on [s, α]}}`: scan down from `α`, then bisect the
/// first sign change.
pub fn s_crit<T: ExponentFloat>(params: &ExponentParams<T>) -> Result<SCrit<T>, ExponentError> {
    s_crit_with_step(params, T::lit(S_SCAN_STEP))
}

pub fn s_crit_with_step<T: ExponentFloat>(params: &ExponentParams<T>, step: T) -> Result<SCrit<T>, ExponentError> {
    let vb = vbar(params)?;
    let a = params.alpha;
    let neg = |s: T| f_exponent(s, params, vb).map(|v| v < T::zero());
    match neg(a) {
        Some(true) => {}
        Some(false) => return Ok(SCrit { value: a, domain_ok: true }),
        None => return Ok(SCrit { value: a, domain_ok: false }),
    }
    let steps = (a / step).ceil().to_usize().unwrap_or(usize::MAX);
    let mut hi = a; // f < 0 on [hi, α]
    for k in 1..=steps {
        let s = (a - idx::<T>(k) * step).max(T::zero());
        match neg(s) {
            Some(true) => {
                hi = s;
                if s.is_zero() {
                    return Ok(SCrit { value: T::zero(), domain_ok: true });
                }
            }
            r => {
                let mut lo = s;
                for _ in 0..200 {
                    let mid = (lo + hi) / T::lit(2.0);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if neg(mid) == Some(true) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return Ok(SCrit { value: hi, domain_ok: r.is_some() });
            }
        }
    }
    Ok(SCrit { value: hi, domain_ok: true })
}

/// Root of `2 + d_v s̄₁ log₂(γ/(1−R)) = 0`, capped at `d_v s̄₁`.
pub fn gamma1_crit<T: ExponentFloat>(s1: T, dv: usize, rate: T) -> T {
    if s1 <= T::zero() {
        return T::zero();
    }
    let dvs = idx::<T>(dv) * s1;
    let root = (T::one() - rate) * T::lit(2.0).powf(-T::lit(2.0) / dvs);
    root.min(dvs)
}

/// `b(γ)` on `γ ∈ [0, (1−R) − d_v s̄_crit]`.
pub fn b_gamma<T: ExponentFloat>(gamma: T, params: &ExponentParams<T>, sc: T) -> T {
    let (a, omr, dv) = (params.alpha, params.one_minus_r(), params.dvf());
    let t1 = or_neg_inf(weighted_h(a, sc, a));
    let t2 = or_neg_inf(weighted_h(T::one(), gamma, omr - dv * sc));
    t1 + t2 + clog2(dv * (a - sc), (gamma + dv * sc) / omr)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gamma2Star<T> {
    pub value: T,
    /// `b(0⁺) < 0`, i.e. the third condition in its sum reading.
    pub limit_negative: bool,
    /// No root: `b < 0` up to the end of its domain.
    pub at_boundary: bool,
}

/// Largest `γ` with `b < 0` on `(0, γ]`. `b` rises on the first half of its
/// domain, so a log-spaced scan catches roots arbitrarily close to zero.
pub fn gamma2_star<T: ExponentFloat>(params: &ExponentParams<T>, sc: T) -> Gamma2Star<T> {
    let top = params.one_minus_r() - params.dvf() * sc;
    let b = |g: T| b_gamma(g, params, sc);
    let zero = Gamma2Star { value: T::zero(), limit_negative: false, at_boundary: false };
    if top <= T::zero() || !(b(T::zero()) < T::zero()) {
        return zero;
    }
    let mut grid: Vec<T> = (0..=600).map(|k| top * T::lit(10f64.powf(-15.0 + 15.0 * k as f64 / 600.0))).collect();
    grid.extend((1..2000).map(|k| top * T::lit(k as f64 / 2000.0)));
    grid.sort_by(|x, y| x.partial_cmp(y).expect("finite grid"));
    let mut lo = T::zero();
    for g in grid {
        if b(g) < T::zero() {
            lo = g;
            continue;
        }
        let mut hi = g;
        for _ in 0..200 {
            let mid = (lo + hi) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if b(mid) < T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return Gamma2Star { value: lo, limit_negative: true, at_boundary: false };
    }
    Gamma2Star { value: top, limit_negative: true, at_boundary: true }
}

/// `(Σ i y_i, ν(y))`.
pub(crate) fn y_moments<T: ExponentFloat>(y: &[T], dv: usize, q: usize) -> (T, T) {
    y.iter().enumerate().fold((T::zero(), T::zero()), |(a, n), (k, &v)| {
        let i = k + 1;
        (a + idx::<T>(i) * v, n + idx::<T>(dv + i - q) * v)
    })
}

/// `β = p s̄₁ − γ̄₁ + Σ i ȳ_i`, `ν = Σ (d_v−q+i) ȳ_i`.
pub fn beta_nu<T: ExponentFloat>(s1: T, gamma1: T, y: &[T], params: &ExponentParams<T>) -> (T, T) {
    let (iy, nu) = y_moments(y, params.dv, params.q);
    (params.pf() * s1 - gamma1 + iy, nu)
}

/// `Σ ȳ^up_i H(ȳ_i/ȳ^up_i)`.
pub(crate) fn y_entropy<T: ExponentFloat>(y: &[T], yup: &[T]) -> T {
    y.iter().zip(yup).fold(T::zero(), |acc, (&v, &u)| acc + or_neg_inf(weighted_h(u, v, u)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GValue<T> {
    pub total: T,
    pub g: [T; 4],
}

/// `G₄`, shared with its primed sibling: `γ₂ H(m/γ₂) + ν log₂((c+m)/(c+γ₂))`
/// with `m = min{γ₂, β}`.
pub(crate) fn g4_like<T: ExponentFloat>(gamma2: T, beta: T, nu: T, c: T) -> T {
    if beta < T::zero() {
        return T::neg_infinity();
    }
    let m = gamma2.min(beta);
    let ent = or_neg_inf(weighted_h(gamma2, m, gamma2));
    let den = c + gamma2;
    let log = if den <= T::zero() { T::zero() } else { clog2(nu, (c + m) / den) };
    ent + log
}

pub(crate) fn g2<T: ExponentFloat>(s1: T, gamma1: T, params: &ExponentParams<T>) -> T {
    let omr = params.one_minus_r();
    or_neg_inf(weighted_h(omr, gamma1, omr)) + clog2(params.dvf() * s1, gamma1 / omr)
}

pub(crate) fn g3<T: ExponentFloat>(s1: T, gamma1: T, gamma2: T, params: &ExponentParams<T>) -> T {
    let omr = params.one_minus_r();
    let rest = omr - gamma1;
    or_neg_inf(weighted_h(rest, gamma2, rest)) + clog2(params.dvf() * (params.alpha - s1), (gamma1 + gamma2) / omr)
}

/// `G = Σ_k min{0, G_k}` and its components.
pub fn g_value<T: ExponentFloat>(s1: T, gamma1: T, gamma2: T, y: &[T], params: &ExponentParams<T>, yup: &[T]) -> GValue<T> {
    let a = params.alpha;
    let g1 = or_neg_inf(weighted_h(a, s1, a)) + y_entropy(y, yup);
    let g2 = g2(s1, gamma1, params);
    let g3 = g3(s1, gamma1, gamma2, params);
    let (beta, nu) = beta_nu(s1, gamma1, y, params);
    let g4 = g4_like(gamma2, beta, nu, gamma1);
    let g = [g1, g2, g3, g4];
    let total = g.iter().fold(T::zero(), |acc, &v| acc + v.min(T::zero()));
    GValue { total: if total.is_nan() { T::neg_infinity() } else { total }, g }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GPrimeValue<T> {
    pub total: T,
    pub g: [T; 3],
}

/// `G′ = min{0, G′₁} + min{0, G′₂} + G′₃`.
pub fn g_prime_value<T: ExponentFloat>(gamma2: T, y: &[T], eps2: T, params: &ExponentParams<T>, yup: &[T]) -> GPrimeValue<T> {
    let (a, omr, dv) = (params.alpha, params.one_minus_r(), params.dvf());
    let rest = omr - dv * eps2;
    let g1 = or_neg_inf(weighted_h(rest, gamma2, rest)) + clog2(dv * (a - eps2), (dv * eps2 + gamma2) / omr);
    let (iy, nu) = y_moments(y, params.dv, params.q);
    let g2 = g4_like(gamma2, iy + params.pf() * eps2, nu, dv * eps2);
    let g3 = or_neg_inf(weighted_h(a, eps2, a)) + y_entropy(y, yup);
    let total = g1.min(T::zero()) + g2.min(T::zero()) + g3;
    GPrimeValue { total: if total.is_nan() { T::neg_infinity() } else { total }, g: [g1, g2, g3] }
}

/// Literal evaluation of the three threshold inequalities.
pub fn three_inequalities<T: ExponentFloat>(params: &ExponentParams<T>, sc: T) -> [bool; 3] {
    let (a, omr, dv) = (params.alpha, params.one_minus_r(), params.dvf());
    let two = T::lit(2.0);
    let c1 = sc < a / two;
    let c2 = a * dv < (omr - dv * sc) / two;
    let ent = or_neg_inf(weighted_h(a, sc, a));
    let log = clog2(dv * (a - sc), dv * sc / omr);
    let c3 = match params.c15_reading {
        C15Reading::Sum => ent + log < T::zero(),
        // 0 · (−∞) is not negative
        C15Reading::Product => ent > T::zero() && log < T::zero() && (ent * log) < T::zero(),
    };
    [c1, c2, c3]
}

/// `(3p−2)/(2p−1)`, exactly.
pub fn feldman_coefficient(p: u32) -> Rational {
    let p = i64::from(p);
    Rational::new((3 * p - 2).into(), (2 * p - 1).into())
}

/// Fraction of errors corrected by the expansion argument of Feldman et al.
pub fn feldman_bound(p_expand: f64, mu: f64) -> Result<f64, ExponentError> {
    if !(p_expand >= 1.0) {
        return Err(ExponentError::Expansion(format!("p_expand = {p_expand} < 1")));
    }
    if !(0.0..=1.0).contains(&mu) {
        return Err(ExponentError::Expansion(format!("mu = {mu} outside [0, 1]")));
    }
    Ok((3.0 * p_expand - 2.0) / (2.0 * p_expand - 1.0) * mu)
}

/// Worst-case fraction previously known for rate-½ LDPC codes.
pub const FELDMAN_QUOTED_FRACTION: f64 = 0.000177;
