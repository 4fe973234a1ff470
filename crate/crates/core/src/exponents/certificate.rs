use serde::{Deserialize, Serialize};

use super::optimize::{maximize, BoxProblem};
use super::{
    b_coeffs, g2, g3, g4_like, gamma1_crit, gamma2_star, h, three_inequalities, vbar, weighted_h, y_entropy, y_moments,
    ybar_up, C15Reading, ExponentError, ExponentParams, Gamma2Star, OptimumReport, SCrit,
};
use crate::scalar::ExponentFloat;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

fn y_of<T: ExponentFloat>(u: &[T], yup: &[T]) -> Vec<T> {
    u.iter().zip(yup).map(|(&t, &up)| up * (T::one() + t) / T::lit(2.0)).collect()
}

struct InnerY<T> {
    iy: T,
    nu: T,
}

// Sup of G over s̄₁ ∈ [0, s̄_crit], γ̄₁ ∈ [0, d_v s̄₁], γ̄₂ ∈ [0, d_v(α−s̄₁)],
// ȳ_i ∈ [ȳ^up_i/2, ȳ^up_i], parametrized by the unit cube.
struct FProblem<'a, T> {
    params: &'a ExponentParams<T>,
    sc: T,
    yup: Vec<T>,
}

struct FOuter<T> {
    s: T,
    g1: T,
    g2: T,
    /// min{0,G₂} + min{0,G₃}
    clipped: T,
}

impl<'a, T: ExponentFloat> FProblem<'a, T> {
    fn point(&self, u: &[T]) -> FPoint<T> {
        let dv = self.params.dvf();
        let s = u[0] * self.sc;
        FPoint {
            s1: s,
            gamma1: u[1] * dv * s,
            gamma2: u[2] * dv * (self.params.alpha - s),
            y: y_of(&u[3..], &self.yup),
        }
    }
}

impl<'a, T: ExponentFloat> BoxProblem<T> for FProblem<'a, T> {
    type Outer = FOuter<T>;
    type Inner = InnerY<T>;

    fn outer_dims(&self) -> usize {
        3
    }

    fn inner_dims(&self) -> usize {
        self.yup.len()
    }

    fn outer(&self, u: &[T]) -> FOuter<T> {
        let dv = self.params.dvf();
        let s = u[0] * self.sc;
        let g1 = u[1] * dv * s;
        let g2v = u[2] * dv * (self.params.alpha - s);
        let clipped = g2(s, g1, self.params).min(T::zero()) + g3(s, g1, g2v, self.params).min(T::zero());
        FOuter { s, g1, g2: g2v, clipped }
    }

    fn bound(&self, o: &FOuter<T>) -> T {
        o.clipped
    }

    fn inner(&self, u: &[T]) -> InnerY<T> {
        let (iy, nu) = y_moments(&y_of(u, &self.yup), self.params.dv, self.params.q);
        InnerY { iy, nu }
    }

    // G₁ ≥ 0 on the whole box, so min{0, G₁} drops out.
    fn value(&self, o: &FOuter<T>, y: &InnerY<T>) -> T {
        let beta = self.params.pf() * o.s - o.g1 + y.iy;
        o.clipped + g4_like(o.g2, beta, y.nu, o.g1).min(T::zero())
    }
}

struct FPrimeProblem<'a, T> {
    params: &'a ExponentParams<T>,
    eps2: T,
    yup: Vec<T>,
    /// αH(ε₂/α)
    head: T,
}

struct FPrimeOuter<T> {
    g2: T,
    clipped: T,
}

struct FPrimeInner<T> {
    iy: T,
    nu: T,
    ent: T,
}

impl<'a, T: ExponentFloat> BoxProblem<T> for FPrimeProblem<'a, T> {
    type Outer = FPrimeOuter<T>;
    type Inner = FPrimeInner<T>;

    fn outer_dims(&self) -> usize {
        1
    }

    fn inner_dims(&self) -> usize {
        self.yup.len()
    }

    fn outer(&self, u: &[T]) -> FPrimeOuter<T> {
        let p = self.params;
        let (omr, dv) = (p.one_minus_r(), p.dvf());
        let g2 = u[0] * dv * p.alpha;
        let rest = omr - dv * self.eps2;
        let g1 = weighted_h(rest, g2, rest).unwrap_or_else(T::neg_infinity)
            + super::clog2(dv * (p.alpha - self.eps2), (dv * self.eps2 + g2) / omr);
        FPrimeOuter { g2, clipped: g1.min(T::zero()) }
    }

    fn bound(&self, o: &FPrimeOuter<T>) -> T {
        // H ≤ 1 in every request-fraction term of G′₃
        o.clipped + self.head + self.yup.iter().fold(T::zero(), |a, &v| a + v)
    }

    fn inner(&self, u: &[T]) -> FPrimeInner<T> {
        let y = y_of(u, &self.yup);
        let (iy, nu) = y_moments(&y, self.params.dv, self.params.q);
        FPrimeInner { iy, nu, ent: y_entropy(&y, &self.yup) }
    }

    fn value(&self, o: &FPrimeOuter<T>, y: &FPrimeInner<T>) -> T {
        let p = self.params;
        let beta = y.iy + p.pf() * self.eps2;
        let g2 = g4_like(o.g2, beta, y.nu, p.dvf() * self.eps2);
        o.clipped + g2.min(T::zero()) + self.head + y.ent
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FPoint<T> {
    pub s1: T,
    pub gamma1: T,
    pub gamma2: T,
    pub y: Vec<T>,
}

/// `F(α)` for a given `s̄_crit`, with its maximizer.
pub fn f_alpha<T: ExponentFloat>(params: &ExponentParams<T>, sc: T) -> Result<(OptimumReport<T>, FPoint<T>), ExponentError> {
    params.validate()?;
    let prob = FProblem { params, sc, yup: ybar_up(params)? };
    let rep = maximize(&prob, &params.optimizer);
    let pt = prob.point(&rep.point);
    Ok((rep, pt))
}

/// `F′(α, ε₂)`; `None` unless `0 < ε₂ < α` (outside it the partition is void
/// and the entropy term leaves its domain).
pub fn f_prime<T: ExponentFloat>(params: &ExponentParams<T>, eps2: T) -> Result<Option<OptimumReport<T>>, ExponentError> {
    params.validate()?;
    if !(eps2 > T::zero() && eps2 < params.alpha) {
        return Ok(None);
    }
    let head = params.alpha * h(eps2 / params.alpha).expect("eps2 < alpha");
    let prob = FPrimeProblem { params, eps2, yup: ybar_up(params)?, head };
    Ok(Some(maximize(&prob, &params.optimizer)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eps2Row<T> {
    pub eps2: T,
    pub fprime: Option<OptimumReport<T>>,
    pub gamma1_crit: T,
}

impl<T: ExponentFloat> Eps2Row<T> {
    pub fn passes(&self) -> bool {
        self.fprime.as_ref().is_some_and(|r| r.certified_negative)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conditions {
    pub c15a: bool,
    pub c15b: bool,
    pub c15c: bool,
    pub c15c_reading: C15Reading,
    pub s_crit_domain_ok: bool,
    /// `F(α) < 0` with the optimizer margin.
    pub f_negative: bool,
    /// `2p+q > 2d_v`, `p ≥ q`, `d_v ≥ p+2`.
    pub restrictions: bool,
    pub restriction_error: Option<String>,
    pub fprime_negative: bool,
}

impl Conditions {
    pub fn all(&self) -> bool {
        self.c15a && self.c15b && self.c15c && self.s_crit_domain_ok && self.f_negative && self.restrictions && self.fprime_negative
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport<T> {
    pub schema_version: u32,
    pub params: ExponentParams<T>,
    pub b: Vec<T>,
    pub ybar_up: Vec<T>,
    pub vbar: T,
    pub s_crit: SCrit<T>,
    pub gamma2_star: Gamma2Star<T>,
    pub f: OptimumReport<T>,
    pub f_point: FPoint<T>,
    pub eps2: Vec<Eps2Row<T>>,
    /// `γ̄_crit(ε₂)` at the first passing ε₂ (or the smallest one tried).
    pub gamma1_crit: T,
    pub conditions: Conditions,
    pub certified: bool,
}

/// Full report; the verdict needs every condition plus one passing ε₂.
pub fn certificate<T: ExponentFloat>(params: &ExponentParams<T>) -> Result<ExponentReport<T>, ExponentError> {
    params.validate()?;
    let restr = params.restrictions();
    let sc = super::s_crit(params)?;
    let [c15a, c15b, c15c] = three_inequalities(params, sc.value);
    let (f, f_point) = f_alpha(params, sc.value)?;
    let mut eps2 = Vec::with_capacity(params.eps2_grid.len());
    for &e in &params.eps2_grid {
        eps2.push(Eps2Row {
            eps2: e,
            fprime: f_prime(params, e)?,
            gamma1_crit: gamma1_crit(e, params.dv, params.rate),
        });
    }
    let passing = eps2.iter().find(|r| r.passes());
    let gamma1 = passing
        .or_else(|| eps2.iter().filter(|r| r.fprime.is_some()).last())
        .map_or(T::zero(), |r| r.gamma1_crit);
    let conditions = Conditions {
        c15a,
        c15b,
        c15c,
        c15c_reading: params.c15_reading,
        s_crit_domain_ok: sc.domain_ok,
        f_negative: f.certified_negative,
        restrictions: restr.is_ok(),
        restriction_error: restr.err().map(|e| e.to_string()),
        fprime_negative: passing.is_some(),
    };
    Ok(ExponentReport {
        schema_version: REPORT_SCHEMA_VERSION,
        params: params.clone(),
        b: b_coeffs(params)?,
        ybar_up: ybar_up(params)?,
        vbar: vbar(params)?,
        s_crit: sc,
        gamma2_star: gamma2_star(params, sc.value),
        f,
        f_point,
        eps2,
        gamma1_crit: gamma1,
        certified: conditions.all(),
        conditions,
    })
}

/// Same verdict as [`certificate`], stopping at the first failed condition.
pub fn is_certified<T: ExponentFloat>(params: &ExponentParams<T>) -> Result<bool, ExponentError> {
    params.validate()?;
    if params.restrictions().is_err() {
        return Ok(false);
    }
    let sc = super::s_crit(params)?;
    if !sc.domain_ok || three_inequalities(params, sc.value).contains(&false) {
        return Ok(false);
    }
    if !f_alpha(params, sc.value)?.0.certified_negative {
        return Ok(false);
    }
    for &e in &params.eps2_grid {
        if f_prime(params, e)?.is_some_and(|r| r.certified_negative) {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSearch {
    /// Largest certified α found; 0 if none.
    pub alpha_star: f64,
    pub resolution: f64,
    /// Every α tried, in order, with its verdict.
    pub path: Vec<(f64, bool)>,
    /// Multiples of α* re-checked after the bisection.
    pub verification: Vec<(f64, bool)>,
    pub verified: bool,
}

pub const ALPHA_SEARCH_CEILING: f64 = 0.05;
pub const ALPHA_RESOLUTION: f64 = 1e-5;

/// Bisection on α (the `alpha` field of `base` is ignored).
pub fn alpha_crit_search<T: ExponentFloat>(base: &ExponentParams<T>) -> Result<AlphaSearch, ExponentError> {
    let mut path = Vec::new();
    let mut out = AlphaSearch { alpha_star: 0.0, resolution: ALPHA_RESOLUTION, path: vec![], verification: vec![], verified: false };
    if base.restrictions().is_err() {
        return Ok(out);
    }
    let dv = base.dv as f64;
    let omr = 1.0 - base.rate.to_f64().expect("finite rate");
    let mut hi = ALPHA_SEARCH_CEILING.min(0.999 * omr / dv);
    let verdict = |a: f64, path: &mut Vec<(f64, bool)>| -> Result<bool, ExponentError> {
        let ok = is_certified(&base.with_alpha(T::lit(a)))?;
        path.push((a, ok));
        Ok(ok)
    };
    let mut lo = 0.0;
    if verdict(hi, &mut path)? {
        lo = hi;
    } else {
        while hi - lo > ALPHA_RESOLUTION {
            let mid = 0.5 * (lo + hi);
            if verdict(mid, &mut path)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    out.alpha_star = lo;
    if lo > 0.0 {
        for f in [0.5, 0.6, 0.7, 0.8, 0.9] {
            let a = f * lo;
            let ok = is_certified(&base.with_alpha(T::lit(a)))?;
            out.verification.push((a, ok));
        }
        out.verified = out.verification.iter().all(|v| v.1);
    }
    out.path = path;
    Ok(out)
}
