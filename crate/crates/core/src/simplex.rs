//! Bounded-variable dual simplex with an explicit dense basis inverse.
//!
//! Every row `a·x (≥|≤|=) b` is written as `a·x − s = 0` with the slack `s`
//! carrying the row bounds, so the constraint matrix is `[A | −I]` with a zero
//! right-hand side. The solver starts from the all-slack basis, which is dual
//! feasible once every structural variable sits at the bound its cost prefers;
//! adding a row later keeps dual feasibility, which is what makes the
//! cutting-plane loop warm-startable.
//!
//! Generic over [`Scalar`]: `f64` for production, `BigRational` for exact
//! re-solves (where all tolerances collapse to zero).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Ge,
    Le,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row<T> {
    pub coeffs: Vec<(usize, T)>,
    pub sense: Sense,
    pub rhs: T,
}

/// `minimize cost·x` subject to `rows` and `lower ≤ x ≤ upper` (`None` = infinite).
#[derive(Debug, Clone, PartialEq)]
pub struct LpModel<T> {
    pub cost: Vec<T>,
    pub lower: Vec<Option<T>>,
    pub upper: Vec<Option<T>>,
    pub rows: Vec<Row<T>>,
}

impl<T: Clone> LpModel<T> {
    pub fn new(cost: Vec<T>, lower: Vec<Option<T>>, upper: Vec<Option<T>>) -> Self {
        assert_eq!(cost.len(), lower.len());
        assert_eq!(cost.len(), upper.len());
        LpModel {
            cost,
            lower,
            upper,
            rows: Vec::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.cost.len()
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> LpModel<U> {
        let opt = |v: &Option<T>| v.as_ref().map(&f);
        LpModel {
            cost: self.cost.iter().map(&f).collect(),
            lower: self.lower.iter().map(opt).collect(),
            upper: self.upper.iter().map(opt).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| Row {
                    coeffs: r.coeffs.iter().map(|(j, a)| (*j, f(a))).collect(),
                    sense: r.sense,
                    rhs: f(&r.rhs),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable parked at zero.
    AtZero,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimplexError {
    #[error("problem is infeasible (row of basic variable {var} cannot be repaired)")]
    Infeasible { var: usize },
    #[error("problem is unbounded along variable {var}")]
    Unbounded { var: usize },
    #[error("iteration limit {0} reached")]
    IterationLimit(usize),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("warm-start basis has {got} basic variables, expected {want}")]
    BadBasis { got: usize, want: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalityReport {
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub complementarity: f64,
}

impl OptimalityReport {
    pub fn within(&self, tol: f64) -> bool {
        self.primal_infeasibility <= tol && self.dual_infeasibility <= tol && self.complementarity <= tol
    }
}

const ARTIFICIAL_BOUND: f64 = 1e7;
const REFACTOR_EVERY: usize = 64;
const DEGENERATE_SWITCH: usize = 50;

pub struct Simplex<T: Scalar> {
    ncols: usize,
    cost: Vec<T>,
    lower: Vec<Option<T>>,
    upper: Vec<Option<T>>,
    artificial: Vec<bool>,
    cols: Vec<Vec<(usize, T)>>,
    rows: Vec<Row<T>>,
    status: Vec<VarStatus>,
    basis: Vec<usize>,
    binv: Vec<Vec<T>>,
    xb: Vec<T>,
    d: Vec<T>,
    iterations: usize,
    since_refactor: usize,
    degenerate_run: usize,
    pub max_iterations: usize,
}

fn zero<T: Scalar>() -> T {
    T::zero()
}

impl<T: Scalar> Simplex<T> {
    /// Builds the solver at the all-slack basis.
    pub fn new(model: LpModel<T>) -> Self {
        let ncols = model.ncols();
        let mut s = Simplex {
            ncols,
            cost: model.cost,
            lower: model.lower,
            upper: model.upper,
            artificial: vec![false; ncols],
            cols: vec![Vec::new(); ncols],
            rows: Vec::new(),
            status: Vec::with_capacity(ncols),
            basis: Vec::new(),
            binv: Vec::new(),
            xb: Vec::new(),
            d: Vec::new(),
            iterations: 0,
            since_refactor: 0,
            degenerate_run: 0,
            max_iterations: 200_000,
        };
        let big = T::from_f64_lossy(ARTIFICIAL_BOUND);
        for j in 0..ncols {
            let c = s.cost[j].clone();
            let st = if c.is_pos_tol() || (c.is_zero_tol() && s.lower[j].is_some()) {
                if s.lower[j].is_none() {
                    s.lower[j] = Some(-big.clone());
                    s.artificial[j] = true;
                }
                VarStatus::AtLower
            } else if c.is_neg_tol() || s.upper[j].is_some() {
                if s.upper[j].is_none() {
                    s.upper[j] = Some(big.clone());
                    s.artificial[j] = true;
                }
                VarStatus::AtUpper
            } else {
                VarStatus::AtZero
            };
            s.status.push(st);
            s.d.push(c);
        }
        for row in model.rows {
            s.add_row(row);
        }
        s
    }

    /// Builds the solver at a given basis, e.g. one produced by a floating
    /// point solve. Returns `Ok(None)` when that basis is not dual feasible
    /// for this model, so the caller can fall back to a cold start.
    pub fn with_basis(model: LpModel<T>, statuses: &[VarStatus]) -> Result<Option<Self>, SimplexError> {
        let nrows = model.rows.len();
        let mut s = Simplex::new(model);
        assert_eq!(statuses.len(), s.nvars());
        let got = statuses.iter().filter(|&&st| st == VarStatus::Basic).count();
        if got != nrows {
            return Err(SimplexError::BadBasis { got, want: nrows });
        }
        for (j, &st) in statuses.iter().enumerate() {
            let ok = match st {
                VarStatus::AtLower => s.lower[j].is_some(),
                VarStatus::AtUpper => s.upper[j].is_some(),
                _ => true,
            };
            if !ok {
                return Ok(None);
            }
        }
        s.status = statuses.to_vec();
        s.basis = (0..s.nvars()).filter(|&j| statuses[j] == VarStatus::Basic).collect();
        if s.refactor().is_err() {
            return Ok(None);
        }
        if s.dual_infeasibility() > T::tolerance().to_f64_lossy() {
            return Ok(None);
        }
        Ok(Some(s))
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn nvars(&self) -> usize {
        self.ncols + self.rows.len()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn rows(&self) -> &[Row<T>] {
        &self.rows
    }

    pub fn statuses(&self) -> &[VarStatus] {
        &self.status
    }

    /// The model as currently held (original bounds, all added rows).
    pub fn model(&self) -> LpModel<T> {
        let unart = |v: &Option<T>, j: usize| if self.artificial[j] { None } else { v.clone() };
        LpModel {
            cost: self.cost[..self.ncols].to_vec(),
            lower: (0..self.ncols).map(|j| unart(&self.lower[j], j)).collect(),
            upper: (0..self.ncols).map(|j| unart(&self.upper[j], j)).collect(),
            rows: self.rows.clone(),
        }
    }

    fn column(&self, j: usize) -> ColumnIter<'_, T> {
        if j < self.ncols {
            ColumnIter::Structural(self.cols[j].iter())
        } else {
            ColumnIter::Slack(Some(j - self.ncols))
        }
    }

    fn nonbasic_value(&self, j: usize) -> T {
        match self.status[j] {
            VarStatus::AtLower => self.lower[j].clone().expect("finite lower"),
            VarStatus::AtUpper => self.upper[j].clone().expect("finite upper"),
            _ => zero(),
        }
    }

    /// Current value of every variable (structural then slack).
    pub fn values(&self) -> Vec<T> {
        let mut v: Vec<T> = (0..self.nvars())
            .map(|j| {
                if self.status[j] == VarStatus::Basic {
                    zero()
                } else {
                    self.nonbasic_value(j)
                }
            })
            .collect();
        for (i, &j) in self.basis.iter().enumerate() {
            v[j] = self.xb[i].clone();
        }
        v
    }

    pub fn structural_values(&self) -> Vec<T> {
        let mut v = self.values();
        v.truncate(self.ncols);
        v
    }

    pub fn objective(&self) -> T {
        self.structural_values()
            .into_iter()
            .zip(&self.cost)
            .fold(zero(), |acc, (x, c)| acc + x * c.clone())
    }

    /// Row multipliers `π = c_B B⁻¹`.
    pub fn row_duals(&self) -> Vec<T> {
        let m = self.nrows();
        let mut pi = vec![zero::<T>(); m];
        for (i, &j) in self.basis.iter().enumerate() {
            let c = &self.cost[j];
            if c.is_zero() {
                continue;
            }
            for k in 0..m {
                if !self.binv[i][k].is_zero() {
                    pi[k] = pi[k].clone() + c.clone() * self.binv[i][k].clone();
                }
            }
        }
        pi
    }

    pub fn reduced_costs(&self) -> &[T] {
        &self.d
    }

    /// Appends `a·x (sense) b`; the new slack enters the basis. Preserves dual
    /// feasibility, so a following [`solve`](Self::solve) warm-starts.
    pub fn add_row(&mut self, row: Row<T>) {
        let r = self.rows.len();
        let (lo, up) = match row.sense {
            Sense::Ge => (Some(row.rhs.clone()), None),
            Sense::Le => (None, Some(row.rhs.clone())),
            Sense::Eq => (Some(row.rhs.clone()), Some(row.rhs.clone())),
        };
        let mut dense = vec![zero::<T>(); self.ncols];
        for (j, a) in &row.coeffs {
            dense[*j] = dense[*j].clone() + a.clone();
        }
        for (j, a) in dense.iter().enumerate() {
            if !a.is_zero() {
                self.cols[j].push((r, a.clone()));
            }
        }
        // new row of B⁻¹ is (a_B B⁻¹, −1)
        let mut new_row = vec![zero::<T>(); r + 1];
        for (i, &j) in self.basis.iter().enumerate() {
            if j < self.ncols && !dense[j].is_zero() {
                for k in 0..r {
                    if !self.binv[i][k].is_zero() {
                        new_row[k] = new_row[k].clone() + dense[j].clone() * self.binv[i][k].clone();
                    }
                }
            }
        }
        new_row[r] = -T::one();
        let x = self.structural_values();
        let s_val = dense
            .iter()
            .zip(&x)
            .fold(zero::<T>(), |acc, (a, v)| if a.is_zero() { acc } else { acc + a.clone() * v.clone() });
        for row in &mut self.binv {
            row.push(zero());
        }
        self.binv.push(new_row);
        self.rows.push(row);
        self.cost.push(zero());
        self.lower.push(lo);
        self.upper.push(up);
        self.artificial.push(false);
        self.status.push(VarStatus::Basic);
        self.d.push(zero());
        self.basis.push(self.ncols + r);
        self.xb.push(s_val);
    }

    fn infeasibility(&self, i: usize) -> Option<(T, bool)> {
        let j = self.basis[i];
        let x = &self.xb[i];
        if let Some(l) = &self.lower[j] {
            let v = l.clone() - x.clone();
            if v.is_pos_tol() {
                return Some((v, true));
            }
        }
        if let Some(u) = &self.upper[j] {
            let v = x.clone() - u.clone();
            if v.is_pos_tol() {
                return Some((v, false));
            }
        }
        None
    }

    fn choose_leaving(&self) -> Option<(usize, bool)> {
        let bland = self.degenerate_run >= DEGENERATE_SWITCH || T::is_exact();
        let mut best: Option<(usize, T, bool)> = None;
        for i in 0..self.basis.len() {
            if let Some((v, to_lower)) = self.infeasibility(i) {
                let better = match &best {
                    None => true,
                    Some((bi, bv, _)) => {
                        if bland {
                            self.basis[i] < self.basis[*bi]
                        } else {
                            v > *bv
                        }
                    }
                };
                if better {
                    best = Some((i, v, to_lower));
                }
            }
        }
        best.map(|(i, _, l)| (i, l))
    }

    /// Runs dual simplex pivots until primal feasibility (= optimality).
    pub fn solve(&mut self) -> Result<(), SimplexError> {
        let mut verified = false;
        loop {
            if self.iterations >= self.max_iterations {
                return Err(SimplexError::IterationLimit(self.iterations));
            }
            let Some((r, to_lower)) = self.choose_leaving() else {
                if !T::is_exact() && !verified && self.since_refactor > 0 {
                    // clear accumulated drift before declaring optimality
                    self.refactor()?;
                    verified = true;
                    continue;
                }
                break;
            };
            verified = false;
            self.pivot(r, to_lower)?;
            if !T::is_exact() && self.since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }
        }
        for j in 0..self.nvars() {
            if self.artificial[j] && self.status[j] != VarStatus::Basic && !self.d[j].is_zero_tol() {
                return Err(SimplexError::Unbounded { var: j });
            }
        }
        Ok(())
    }

    fn pivot(&mut self, r: usize, to_lower: bool) -> Result<(), SimplexError> {
        let m = self.nrows();
        let p = self.basis[r];
        let rho = self.binv[r].clone();
        let piv_tol = T::tolerance();
        let mut enter: Option<(usize, T, T)> = None; // (var, ratio, alpha)
        for j in 0..self.nvars() {
            let st = self.status[j];
            if st == VarStatus::Basic || (self.lower[j].is_some() && self.lower[j] == self.upper[j]) {
                continue;
            }
            let alpha = self.column(j).fold(zero::<T>(), |acc, (k, a)| {
                if rho[k].is_zero() {
                    acc
                } else {
                    acc + rho[k].clone() * a
                }
            });
            if alpha.abs() <= piv_tol || alpha.is_zero() {
                continue;
            }
            // x_p moves by −α_j per unit of x_j
            let eligible = match (st, to_lower) {
                (VarStatus::AtZero, _) => true,
                (VarStatus::AtLower, true) => alpha.is_negative(),
                (VarStatus::AtUpper, true) => alpha.is_positive(),
                (VarStatus::AtLower, false) => alpha.is_positive(),
                (VarStatus::AtUpper, false) => alpha.is_negative(),
                (VarStatus::Basic, _) => unreachable!(),
            };
            if !eligible {
                continue;
            }
            let dj = match st {
                VarStatus::AtLower => self.d[j].clone(),
                VarStatus::AtUpper => -self.d[j].clone(),
                _ => self.d[j].abs(),
            };
            let dj = if dj.is_negative() { zero() } else { dj };
            let ratio = dj / alpha.abs();
            let better = match &enter {
                None => true,
                Some((_, br, ba)) => ratio < *br || (!T::is_exact() && ratio == *br && alpha.abs() > ba.abs()),
            };
            if better {
                enter = Some((j, ratio, alpha));
            }
        }
        let Some((q, _, alpha_q)) = enter else {
            return Err(SimplexError::Infeasible { var: p });
        };

        // primal step
        let target = if to_lower {
            self.lower[p].clone().expect("violated lower is finite")
        } else {
            self.upper[p].clone().expect("violated upper is finite")
        };
        let mut w = vec![zero::<T>(); m];
        for (k, a) in self.column(q) {
            for (i, wi) in w.iter_mut().enumerate() {
                if !self.binv[i][k].is_zero() {
                    *wi = wi.clone() + self.binv[i][k].clone() * a.clone();
                }
            }
        }
        let delta = (self.xb[r].clone() - target.clone()) / alpha_q.clone();
        let xq = self.nonbasic_value(q) + delta.clone();
        for i in 0..m {
            if !w[i].is_zero() {
                self.xb[i] = self.xb[i].clone() - w[i].clone() * delta.clone();
            }
        }
        self.xb[r] = xq;

        // dual step
        let theta = self.d[q].clone() / alpha_q.clone();
        if theta.is_zero_tol() {
            self.degenerate_run += 1;
        } else {
            self.degenerate_run = 0;
        }
        if !theta.is_zero() {
            for j in 0..self.nvars() {
                if self.status[j] == VarStatus::Basic || j == q {
                    continue;
                }
                let alpha = self.column(j).fold(zero::<T>(), |acc, (k, a)| {
                    if rho[k].is_zero() {
                        acc
                    } else {
                        acc + rho[k].clone() * a
                    }
                });
                if !alpha.is_zero() {
                    self.d[j] = self.d[j].clone() - theta.clone() * alpha;
                }
            }
        }
        self.d[q] = zero();
        self.d[p] = -theta;

        // basis inverse
        let inv = T::one() / alpha_q;
        for v in self.binv[r].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() * inv.clone();
            }
        }
        let pivot_row = self.binv[r].clone();
        for i in 0..m {
            if i == r || w[i].is_zero() {
                continue;
            }
            let f = w[i].clone();
            for (k, pv) in pivot_row.iter().enumerate() {
                if !pv.is_zero() {
                    self.binv[i][k] = self.binv[i][k].clone() - f.clone() * pv.clone();
                }
            }
        }

        self.status[p] = if to_lower {
            VarStatus::AtLower
        } else {
            VarStatus::AtUpper
        };
        self.status[q] = VarStatus::Basic;
        self.basis[r] = q;
        self.iterations += 1;
        self.since_refactor += 1;
        Ok(())
    }

    /// Recomputes `B⁻¹` by Gauss–Jordan elimination, then `x_B` and `d`.
    fn refactor(&mut self) -> Result<(), SimplexError> {
        let m = self.nrows();
        let mut b = vec![vec![zero::<T>(); m]; m];
        for (i, &j) in self.basis.iter().enumerate() {
            for (k, a) in self.column(j) {
                b[k][i] = a;
            }
        }
        let mut inv: Vec<Vec<T>> = (0..m)
            .map(|i| {
                let mut row = vec![zero::<T>(); m];
                row[i] = T::one();
                row
            })
            .collect();
        for c in 0..m {
            let piv = (c..m)
                .filter(|&k| !b[k][c].is_zero())
                .max_by(|&x, &y| {
                    b[x][c]
                        .magnitude()
                        .partial_cmp(&b[y][c].magnitude())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .ok_or_else(|| SimplexError::Numerical("singular basis".into()))?;
            if b[piv][c].magnitude() < 1e-12 && !T::is_exact() {
                return Err(SimplexError::Numerical("near-singular basis".into()));
            }
            b.swap(c, piv);
            inv.swap(c, piv);
            let f = T::one() / b[c][c].clone();
            for v in b[c].iter_mut().chain(inv[c].iter_mut()) {
                if !v.is_zero() {
                    *v = v.clone() * f.clone();
                }
            }
            let sparse = |row: &[T]| -> Vec<(usize, T)> {
                row.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(t, v)| (t, v.clone())).collect()
            };
            let (brow, irow) = (sparse(&b[c]), sparse(&inv[c]));
            for k in 0..m {
                if k == c || b[k][c].is_zero() {
                    continue;
                }
                let g = b[k][c].clone();
                for (t, v) in &brow {
                    b[k][*t] = b[k][*t].clone() - g.clone() * v.clone();
                }
                for (t, v) in &irow {
                    inv[k][*t] = inv[k][*t].clone() - g.clone() * v.clone();
                }
            }
        }
        // rows of inv are indexed by basis position, matching the columns of b
        self.binv = inv;
        self.recompute_primal();
        self.recompute_duals();
        self.since_refactor = 0;
        Ok(())
    }

    fn recompute_primal(&mut self) {
        let m = self.nrows();
        let mut rhs = vec![zero::<T>(); m];
        for j in 0..self.nvars() {
            if self.status[j] == VarStatus::Basic {
                continue;
            }
            let v = self.nonbasic_value(j);
            if v.is_zero() {
                continue;
            }
            for (k, a) in self.column(j) {
                rhs[k] = rhs[k].clone() + a * v.clone();
            }
        }
        self.xb = (0..m)
            .map(|i| {
                -self.binv[i]
                    .iter()
                    .zip(&rhs)
                    .fold(zero::<T>(), |acc, (b, r)| if b.is_zero() || r.is_zero() { acc } else { acc + b.clone() * r.clone() })
            })
            .collect();
    }

    fn recompute_duals(&mut self) {
        let pi = self.row_duals();
        for j in 0..self.nvars() {
            self.d[j] = if self.status[j] == VarStatus::Basic {
                zero()
            } else {
                let c = self.cost[j].clone();
                self.column(j).fold(c, |acc, (k, a)| acc - pi[k].clone() * a)
            };
        }
    }

    fn dual_infeasibility(&self) -> f64 {
        (0..self.nvars())
            .map(|j| {
                let d = self.d[j].to_f64_lossy();
                match self.status[j] {
                    VarStatus::Basic => 0.0,
                    VarStatus::AtLower if self.upper[j] == self.lower[j] => 0.0,
                    VarStatus::AtLower => (-d).max(0.0),
                    VarStatus::AtUpper if self.upper[j] == self.lower[j] => 0.0,
                    VarStatus::AtUpper => d.max(0.0),
                    VarStatus::AtZero => d.abs(),
                }
            })
            .fold(0.0, f64::max)
    }

    /// Optimality measures computed from scratch: the primal point is checked
    /// against the original rows and bounds, and reduced costs are rebuilt from
    /// the row multipliers.
    pub fn report(&self) -> OptimalityReport {
        let z = self.values();
        let zf: Vec<f64> = z.iter().map(|v| v.to_f64_lossy()).collect();
        let mut primal = 0.0f64;
        for (r, row) in self.rows.iter().enumerate() {
            let ax: f64 = row.coeffs.iter().map(|(j, a)| a.to_f64_lossy() * zf[*j]).sum();
            primal = primal.max((ax - zf[self.ncols + r]).abs());
        }
        for j in 0..self.nvars() {
            if let Some(l) = &self.lower[j] {
                primal = primal.max(l.to_f64_lossy() - zf[j]);
            }
            if let Some(u) = &self.upper[j] {
                primal = primal.max(zf[j] - u.to_f64_lossy());
            }
        }
        let pi: Vec<f64> = self.row_duals().iter().map(|v| v.to_f64_lossy()).collect();
        let mut dual = 0.0f64;
        let mut compl = 0.0f64;
        for j in 0..self.nvars() {
            let c = self.cost[j].to_f64_lossy();
            let d = self.column(j).fold(c, |acc, (k, a)| acc - pi[k] * a.to_f64_lossy());
            let lo = self.lower[j].as_ref().map(|v| v.to_f64_lossy());
            let up = self.upper[j].as_ref().map(|v| v.to_f64_lossy());
            // d > 0 needs a finite lower bound the variable sits on, d < 0 an upper one
            if d > 0.0 {
                match lo {
                    Some(l) => compl = compl.max(d * (zf[j] - l).abs()),
                    None => dual = dual.max(d),
                }
            } else if d < 0.0 {
                match up {
                    Some(u) => compl = compl.max(-d * (u - zf[j]).abs()),
                    None => dual = dual.max(-d),
                }
            }
        }
        OptimalityReport {
            primal_infeasibility: primal.max(0.0),
            dual_infeasibility: dual,
            complementarity: compl,
        }
    }
}

enum ColumnIter<'a, T> {
    Structural(std::slice::Iter<'a, (usize, T)>),
    Slack(Option<usize>),
}

impl<T: Scalar> Iterator for ColumnIter<'_, T> {
    type Item = (usize, T);

    fn next(&mut self) -> Option<(usize, T)> {
        match self {
            ColumnIter::Structural(it) => it.next().map(|(k, a)| (*k, a.clone())),
            ColumnIter::Slack(r) => r.take().map(|k| (k, -T::one())),
        }
    }
}

pub type FloatSimplex = Simplex<f64>;
pub type ExactSimplex = Simplex<num_rational::BigRational>;
