//! Hastings–McLeod solution of Painlevé II, `u'' = 2u³ + xu`, and the Lax
//! pair for `(f, g)`.
//!
//! The solution is stored on a uniform grid of nodes carrying `u`, `u'`,
//! `v = −∫_x^∞ u²` and `E = exp(∫_x^∞ u)`. Between nodes everything is
//! evaluated from the Taylor jet of the ODE at the nearest node, so values
//! off the grid are as accurate as values on it.

use std::fmt::Write as _;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::series::{binomial, eval, eval_deriv, factorial, integrate, product_coeff};
use crate::special_functions::{airy, cauchy_airy};
use crate::{Error, Result};

/// Target node spacing of the solver grid.
pub const SEGMENT: f64 = 1.0 / 16.0;
const JET_ORDER: usize = 40;
const MAX_NEWTON: usize = 60;

/// Lower end of [`default_table`].
pub const DEFAULT_X_MIN: f64 = -12.0;
/// Upper end of [`default_table`].
pub const DEFAULT_X_MAX: f64 = 10.0;
pub const DEFAULT_TOL: f64 = 1e-12;

/// Taylor coefficients of the Painlevé II solution through `(x0, u0, u0')`.
fn pii_jet(x0: f64, u0: f64, up0: f64, order: usize) -> Vec<f64> {
    let mut u = vec![0.0; order + 1];
    let mut sq = vec![0.0; order + 1];
    let mut cube = vec![0.0; order + 1];
    u[0] = u0;
    if order >= 1 {
        u[1] = up0;
    }
    for k in 0..order.saturating_sub(1) {
        sq[k] = product_coeff(&u, &u, k);
        cube[k] = product_coeff(&sq, &u, k);
        let prev = if k > 0 { u[k - 1] } else { 0.0 };
        u[k + 2] = (2.0 * cube[k] + x0 * u[k] + prev) / ((k + 1) * (k + 2)) as f64;
    }
    u
}

/// Jets of the two fundamental solutions of the linearization
/// `δ'' = (6u² + x) δ` along the jet `u`.
fn variational_jets(x0: f64, u: &[f64]) -> [Vec<f64>; 2] {
    let order = u.len() - 1;
    let sq: Vec<f64> = (0..=order).map(|k| product_coeff(u, u, k)).collect();
    let mut out = [vec![0.0; order + 1], vec![0.0; order + 1]];
    out[0][0] = 1.0;
    out[1][1] = 1.0;
    for d in out.iter_mut() {
        for k in 0..order - 1 {
            let coupled = 6.0 * product_coeff(&sq, d, k);
            let prev = if k > 0 { d[k - 1] } else { 0.0 };
            d[k + 2] = (coupled + x0 * d[k] + prev) / ((k + 1) * (k + 2)) as f64;
        }
    }
    out
}

/// `−√(−x/2)` times the first terms of its large-`|x|` correction series.
pub fn left_asymptotic(x: f64) -> f64 {
    let y = 1.0 / (x * x * x);
    let corr = [1.0, 1.0 / 8.0, -73.0 / 128.0, 10657.0 / 1024.0, -13912277.0 / 32768.0, 8045883943.0 / 262144.0];
    let series = corr.iter().rev().fold(0.0, |acc, c| acc * y + c);
    -(-x / 2.0).sqrt() * series
}

fn initial_guess(x: f64) -> (f64, f64) {
    let (a, ap) = airy(x);
    let s = a * a + (-x).max(0.0) / 2.0;
    let ds = 2.0 * a * ap - if x < 0.0 { 0.5 } else { 0.0 };
    let r = s.sqrt();
    (-r, -ds / (2.0 * r))
}

/// `∫_x^∞ (s − x) Ai(s)² ds`.
fn airy_sq_moment(x: f64) -> f64 {
    let (a, ap) = airy(x);
    (2.0 * x * x * a * a - 2.0 * x * ap * ap - a * ap) / 3.0
}

/// `∫_x^∞ Ai(s) ds`.
fn airy_tail_integral(x: f64) -> Result<f64> {
    Ok(1.0 - cauchy_airy(x, 0.0)?)
}

/// Values of the Hastings–McLeod data at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiiPoint {
    pub u: f64,
    pub u_prime: f64,
    pub v: f64,
    pub e: f64,
    pub log_f0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PainleveTable {
    pub x_min: f64,
    pub x_max: f64,
    pub tol: f64,
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub u_prime: Vec<f64>,
    pub v: Vec<f64>,
    pub e: Vec<f64>,
    log_f0: Vec<f64>,
    jets: Vec<Vec<f64>>,
}

/// Solves the Hastings–McLeod boundary value problem on `[x_min, x_max]`.
///
/// Multiple shooting with Taylor-jet segments of length at most 1/16 and a
/// damped Newton iteration on all node values at once. Boundary data are
/// `u(x_max) = −Ai(x_max)` and the large-`|x|` series at `x_min`.
pub fn solve_hastings_mcleod(x_min: f64, x_max: f64, tol: f64) -> Result<PainleveTable> {
    if !(x_min >= -12.0 && x_max >= 8.0 && x_min < x_max && tol >= 1e-12 && x_max.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "need x_min >= -12, x_max >= 8, tol >= 1e-12 (got {x_min}, {x_max}, {tol})"
        )));
    }
    let segs = ((x_max - x_min) / SEGMENT).ceil() as usize;
    let h = (x_max - x_min) / segs as f64;
    let grid: Vec<f64> = (0..=segs).map(|i| if i == segs { x_max } else { x_min + i as f64 * h }).collect();
    let dim = 2 * (segs + 1);
    let mut state = DVector::zeros(dim);
    for (i, &x) in grid.iter().enumerate() {
        let (u, up) = initial_guess(x);
        state[2 * i] = u;
        state[2 * i + 1] = up;
    }
    let left = left_asymptotic(x_min);
    let right = -airy(x_max).0;

    let residual = |s: &DVector<f64>| -> DVector<f64> {
        let mut r = DVector::zeros(dim);
        r[0] = s[0] - left;
        for i in 0..segs {
            let jet = pii_jet(grid[i], s[2 * i], s[2 * i + 1], JET_ORDER);
            r[1 + 2 * i] = eval(&jet, h) - s[2 * i + 2];
            r[2 + 2 * i] = eval_deriv(&jet, h) - s[2 * i + 3];
        }
        r[dim - 1] = s[dim - 2] - right;
        r
    };

    let mut res = residual(&state);
    let mut last_update = f64::INFINITY;
    let mut converged = false;
    for _ in 0..MAX_NEWTON {
        let mut jac = DMatrix::zeros(dim, dim);
        jac[(0, 0)] = 1.0;
        for i in 0..segs {
            let jet = pii_jet(grid[i], state[2 * i], state[2 * i + 1], JET_ORDER);
            let [d1, d2] = variational_jets(grid[i], &jet);
            jac[(1 + 2 * i, 2 * i)] = eval(&d1, h);
            jac[(1 + 2 * i, 2 * i + 1)] = eval(&d2, h);
            jac[(2 + 2 * i, 2 * i)] = eval_deriv(&d1, h);
            jac[(2 + 2 * i, 2 * i + 1)] = eval_deriv(&d2, h);
            jac[(1 + 2 * i, 2 * i + 2)] = -1.0;
            jac[(2 + 2 * i, 2 * i + 3)] = -1.0;
        }
        jac[(dim - 1, dim - 2)] = 1.0;
        let step = jac
            .lu()
            .solve(&(-&res))
            .ok_or_else(|| Error::BvpNotConverged { iterations: 0, last_update })?;
        let norm0 = res.amax();
        let mut lambda = 1.0;
        loop {
            let trial = &state + &step * lambda;
            let r = residual(&trial);
            if r.iter().all(|v| v.is_finite()) && (r.amax() < norm0 || lambda < 1e-3 || norm0 < 1e-13) {
                state = trial;
                res = r;
                break;
            }
            lambda *= 0.5;
        }
        last_update = step.amax() * lambda;
        if lambda == 1.0 && last_update <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::BvpNotConverged { iterations: MAX_NEWTON, last_update });
    }

    let u: Vec<f64> = (0..=segs).map(|i| state[2 * i]).collect();
    let u_prime: Vec<f64> = (0..=segs).map(|i| state[2 * i + 1]).collect();
    // v and E by integrating the node jets from the right end downwards.
    let (a, ap) = airy(x_max);
    let mut v = vec![0.0; segs + 1];
    let mut log_e = vec![0.0; segs + 1];
    v[segs] = -(ap * ap - x_max * a * a);
    log_e[segs] = -airy_tail_integral(x_max)?;
    for i in (0..segs).rev() {
        let jet = pii_jet(grid[i], u[i], u_prime[i], JET_ORDER);
        let sq: Vec<f64> = (0..=JET_ORDER).map(|k| product_coeff(&jet, &jet, k)).collect();
        v[i] = v[i + 1] - eval(&integrate(&sq, 0.0), h);
        log_e[i] = log_e[i + 1] + eval(&integrate(&jet, 0.0), h);
    }
    let e = log_e.iter().map(|l| l.exp()).collect();
    Ok(PainleveTable::assemble(x_min, x_max, tol, grid, u, u_prime, v, e))
}

/// Table on `[−12, 10]`, solved once per process.
pub fn default_table() -> Result<&'static PainleveTable> {
    static TABLE: OnceLock<Result<PainleveTable>> = OnceLock::new();
    TABLE
        .get_or_init(|| solve_hastings_mcleod(DEFAULT_X_MIN, DEFAULT_X_MAX, DEFAULT_TOL))
        .as_ref()
        .map_err(Clone::clone)
}

impl PainleveTable {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        x_min: f64,
        x_max: f64,
        tol: f64,
        grid: Vec<f64>,
        u: Vec<f64>,
        u_prime: Vec<f64>,
        v: Vec<f64>,
        e: Vec<f64>,
    ) -> Self {
        let m = grid.len();
        let jets: Vec<Vec<f64>> = (0..m).map(|i| pii_jet(grid[i], u[i], u_prime[i], JET_ORDER)).collect();
        let mut log_f0 = vec![0.0; m];
        log_f0[m - 1] = -airy_sq_moment(grid[m - 1]);
        for i in (0..m - 1).rev() {
            let h = grid[i + 1] - grid[i];
            let sq: Vec<f64> = (0..=JET_ORDER).map(|k| product_coeff(&jets[i], &jets[i], k)).collect();
            let vj = integrate(&sq, v[i]);
            log_f0[i] = log_f0[i + 1] + eval(&integrate(&vj, 0.0), h);
        }
        PainleveTable { x_min, x_max, tol, grid, u, u_prime, v, e, log_f0, jets }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.len() - 1) as f64
    }

    /// All stored quantities at `x`. Above `x_max` the `u ≈ −Ai` tail is
    /// used; below `x_min` this is an error.
    pub fn point(&self, x: f64) -> Result<PiiPoint> {
        if !x.is_finite() || x < self.x_min - 1e-12 {
            return Err(Error::InvalidParams(format!(
                "x = {x} is below the table range [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        if x > self.x_max {
            let (a, ap) = airy(x);
            return Ok(PiiPoint {
                u: -a,
                u_prime: -ap,
                v: -(ap * ap - x * a * a),
                e: (-airy_tail_integral(x)?).exp(),
                log_f0: -airy_sq_moment(x),
            });
        }
        let i = (((x - self.x_min) / self.step()).round() as usize).min(self.len() - 1);
        let h = x - self.grid[i];
        let jet = &self.jets[i];
        let sq: Vec<f64> = (0..=JET_ORDER).map(|k| product_coeff(jet, jet, k)).collect();
        let vj = integrate(&sq, self.v[i]);
        Ok(PiiPoint {
            u: eval(jet, h),
            u_prime: eval_deriv(jet, h),
            v: eval(&vj, h),
            e: (self.e[i].ln() - eval(&integrate(jet, 0.0), h)).exp(),
            log_f0: self.log_f0[i] - eval(&integrate(&vj, 0.0), h),
        })
    }

    /// Taylor coefficients of `u` about `x`.
    pub fn u_jet(&self, x: f64, order: usize) -> Result<Vec<f64>> {
        let p = self.point(x)?;
        Ok(pii_jet(x, p.u, p.u_prime, order.max(1)))
    }

    pub fn f0(&self, x: f64) -> Result<f64> {
        Ok(self.point(x)?.log_f0.exp())
    }

    pub fn e_at(&self, x: f64) -> Result<f64> {
        Ok(self.point(x)?.e)
    }

    /// Largest mismatch between each node's jet continued to the next node
    /// and the values stored there, for `u` and for `u''` against the ODE.
    pub fn continuity_defect(&self) -> (f64, f64) {
        let mut du: f64 = 0.0;
        let mut d2: f64 = 0.0;
        for i in 0..self.len() - 1 {
            let h = self.grid[i + 1] - self.grid[i];
            let jet = &self.jets[i];
            du = du.max((eval(jet, h) - self.u[i + 1]).abs());
            let second: Vec<f64> = (2..jet.len()).map(|k| (k * (k - 1)) as f64 * jet[k]).collect();
            let (x, u) = (self.grid[i + 1], self.u[i + 1]);
            d2 = d2.max((eval(&second, h) - (2.0 * u * u * u + x * u)).abs());
        }
        (du, d2)
    }

    /// Plain-text dump: a header line then `x u u' v E` per node.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# painleve-hm {:?} {:?} {} {:?}", self.x_min, self.x_max, self.len(), self.tol);
        for i in 0..self.len() {
            let _ = writeln!(
                out,
                "{:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
                self.grid[i], self.u[i], self.u_prime[i], self.v[i], self.e[i]
            );
        }
        out
    }

    /// Inverse of [`PainleveTable::dump`].
    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or_else(|| err(1, "empty input"))?;
        let tokens: Vec<&str> = header.split_whitespace().collect();
        if tokens.len() != 6 || tokens[0] != "#" || tokens[1] != "painleve-hm" {
            return Err(err(hl + 1, "expected '# painleve-hm x_min x_max m tol'"));
        }
        let num = |s: &str, line: usize| -> Result<f64> {
            let v: f64 = s.parse().map_err(|_| err(line, &format!("bad number '{s}'")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(err(line, "non-finite value"))
            }
        };
        let x_min = num(tokens[2], hl + 1)?;
        let x_max = num(tokens[3], hl + 1)?;
        let m: usize = tokens[4].parse().map_err(|_| err(hl + 1, "bad row count"))?;
        let tol = num(tokens[5], hl + 1)?;
        if m < 2 || x_min >= x_max {
            return Err(err(hl + 1, "need at least two rows and x_min < x_max"));
        }
        let mut cols: [Vec<f64>; 5] = Default::default();
        for (ln, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 5 {
                return Err(err(ln + 1, "expected 5 columns"));
            }
            if cols[0].len() == m {
                return Err(err(ln + 1, "more rows than the header declares"));
            }
            for (c, f) in cols.iter_mut().zip(&fields) {
                c.push(num(f, ln + 1)?);
            }
        }
        if cols[0].len() != m {
            return Err(err(hl + 1, "row count does not match header"));
        }
        let [grid, u, u_prime, v, e] = cols;
        let step = (x_max - x_min) / (m - 1) as f64;
        for (i, &x) in grid.iter().enumerate() {
            let expect = x_min + i as f64 * step;
            if (x - expect).abs() > 1e-9 * (1.0 + expect.abs()) {
                return Err(err(hl + 2 + i, "grid is not uniform on [x_min, x_max]"));
            }
            if !(e[i] > 0.0 && e[i] <= 1.0) || u[i] >= 0.0 || v[i] > 0.0 {
                return Err(err(hl + 2 + i, "row violates u < 0, v <= 0, 0 < E <= 1"));
            }
        }
        Ok(Self::assemble(x_min, x_max, tol, grid, u, u_prime, v, e))
    }
}

/// `F_0(x) = exp(−∫_x^∞ (s − x) u(s)² ds)`.
pub fn f0_painleve(x: f64, table: &PainleveTable) -> Result<f64> {
    table.f0(x)
}

/// `(f, g)` at `(x, w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaxState {
    pub x: f64,
    pub w: Complex64,
    pub f: Complex64,
    pub g: Complex64,
}

fn lax_w_matrices(x: f64, u: f64, up: f64, w0: Complex64) -> [[Complex64; 4]; 3] {
    let c = |v: f64| Complex64::new(v, 0.0);
    let a0 = [c(u * u), -w0 * u - up, -w0 * u + up, w0 * w0 - x - u * u];
    let a1 = [c(0.0), c(-u), c(-u), w0 * 2.0];
    let a2 = [c(0.0), c(0.0), c(0.0), c(1.0)];
    [a0, a1, a2]
}

fn mat_vec(m: &[Complex64; 4], y: (Complex64, Complex64)) -> (Complex64, Complex64) {
    (m[0] * y.0 + m[1] * y.1, m[2] * y.0 + m[3] * y.1)
}

/// Taylor coefficients in `ε` of `(f, g)(x, w0 + ε)` from the value at `w0`.
fn lax_w_series(x: f64, u: f64, up: f64, w0: Complex64, y0: (Complex64, Complex64), order: usize) -> Vec<(Complex64, Complex64)> {
    let mats = lax_w_matrices(x, u, up, w0);
    let mut ys = Vec::with_capacity(order + 1);
    ys.push(y0);
    for k in 0..order {
        let mut acc = (Complex64::default(), Complex64::default());
        for (l, m) in mats.iter().enumerate() {
            if k >= l {
                let t = mat_vec(m, ys[k - l]);
                acc.0 += t.0;
                acc.1 += t.1;
            }
        }
        let s = 1.0 / (k + 1) as f64;
        ys.push((acc.0 * s, acc.1 * s));
    }
    ys
}

/// Integrates the `w`-equation of the Lax pair from `w = 0`, where
/// `(f, g) = (E, −E)`, along the straight segment to `w`.
pub fn lax_propagate_w(x: f64, w: Complex64, table: &PainleveTable) -> Result<LaxState> {
    let p = table.point(x)?;
    lax_propagate_w_at(x, w, &p)
}

fn lax_propagate_w_at(x: f64, w: Complex64, p: &PiiPoint) -> Result<LaxState> {
    if !w.re.is_finite() || !w.im.is_finite() {
        return Err(Error::InvalidParams(format!("non-finite w = {w}")));
    }
    let scale = 1.0 + (x.abs() + w.norm_sqr() + p.u * p.u + p.u_prime.abs()).sqrt();
    let steps = (w.norm() * scale / 0.5).ceil().max(1.0) as usize;
    let dw = w / steps as f64;
    let mut y = (Complex64::new(p.e, 0.0), Complex64::new(-p.e, 0.0));
    for s in 0..steps {
        let w0 = dw * s as f64;
        let ys = lax_w_series(x, p.u, p.u_prime, w0, y, 60);
        let mut acc = (Complex64::default(), Complex64::default());
        let mut pow = Complex64::new(1.0, 0.0);
        for (k, c) in ys.iter().enumerate() {
            let t = (c.0 * pow, c.1 * pow);
            acc.0 += t.0;
            acc.1 += t.1;
            if k > 8 && t.0.norm() + t.1.norm() < 1e-17 * (acc.0.norm() + acc.1.norm()) {
                break;
            }
            pow *= dw;
        }
        y = acc;
    }
    Ok(LaxState { x, w, f: y.0, g: y.1 })
}

/// Integrates the `x`-equation of the Lax pair from `x_from` to `x_to`.
pub fn lax_propagate_x(x_from: f64, x_to: f64, w: Complex64, state: LaxState, table: &PainleveTable) -> Result<LaxState> {
    let dist = x_to - x_from;
    let steps = (dist.abs() / SEGMENT).ceil() as usize;
    let mut f = state.f;
    let mut g = state.g;
    const ORDER: usize = 40;
    for s in 0..steps {
        let x0 = x_from + dist * s as f64 / steps as f64;
        let h = dist / steps as f64;
        let uj: Vec<Complex64> = table.u_jet(x0, ORDER)?.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        let mut fj = vec![Complex64::default(); ORDER + 1];
        let mut gj = vec![Complex64::default(); ORDER + 1];
        fj[0] = f;
        gj[0] = g;
        for k in 0..ORDER {
            let ug = product_coeff(&uj, &gj, k);
            let uf = product_coeff(&uj, &fj, k);
            fj[k + 1] = ug / (k + 1) as f64;
            gj[k + 1] = (uf - w * gj[k]) / (k + 1) as f64;
        }
        f = eval(&fj, h);
        g = eval(&gj, h);
    }
    Ok(LaxState { x: x_to, w, f, g })
}

/// `∂_w^a (f, g)(x, w)` for `a = 0..=a_max`.
pub fn lax_w_derivatives(a_max: usize, x: f64, w: f64, table: &PainleveTable) -> Result<Vec<(f64, f64)>> {
    let p = table.point(x)?;
    let st = lax_propagate_w_at(x, Complex64::new(w, 0.0), &p)?;
    let ys = lax_w_series(x, p.u, p.u_prime, Complex64::new(w, 0.0), (st.f, st.g), a_max);
    Ok(ys.iter().enumerate().map(|(a, y)| (y.0.re * factorial(a), y.1.re * factorial(a))).collect())
}

/// `out[j][a]` is the `ε^a` coefficient of `(w + D_x)^j f` at `w = w0 + ε`,
/// i.e. `(1/a!) ∂_w^a (w + D_x)^j f(x, w0)`, for `j ≤ j_max`, `a ≤ a_max`.
pub fn wdx_pow_series(j_max: usize, a_max: usize, x: f64, w0: f64, table: &PainleveTable) -> Result<Vec<Vec<f64>>> {
    let p = table.point(x)?;
    let st = lax_propagate_w_at(x, Complex64::new(w0, 0.0), &p)?;
    let ys = lax_w_series(x, p.u, p.u_prime, Complex64::new(w0, 0.0), (st.f, st.g), a_max);
    let na = a_max + 1;
    let uj = pii_jet(x, p.u, p.u_prime, j_max.max(1));
    // x-jets whose coefficients are ε-series.
    let mut fx = vec![vec![0.0; na]; j_max + 1];
    let mut gx = vec![vec![0.0; na]; j_max + 1];
    for a in 0..na {
        fx[0][a] = ys[a].0.re;
        gx[0][a] = ys[a].1.re;
    }
    for i in 0..j_max {
        for a in 0..na {
            let mut ug = 0.0;
            let mut uf = 0.0;
            for l in 0..=i {
                ug += uj[l] * gx[i - l][a];
                uf += uj[l] * fx[i - l][a];
            }
            let shift = if a > 0 { gx[i][a - 1] } else { 0.0 };
            fx[i + 1][a] = ug / (i + 1) as f64;
            gx[i + 1][a] = (uf - w0 * gx[i][a] - shift) / (i + 1) as f64;
        }
    }
    let mut out = vec![vec![0.0; na]; j_max + 1];
    for (j, row) in out.iter_mut().enumerate() {
        for i in 0..=j {
            // C(j,i) i! (w0 + ε)^{j−i} D_x^i f / i! with D_x^i f = i! fx[i].
            let c = binomial(j, i) * factorial(i);
            let e = j - i;
            for b in 0..=e.min(a_max) {
                let wb = binomial(e, b) * w0.powi((e - b) as i32);
                for a in 0..na - b {
                    row[a + b] += c * wb * fx[i][a];
                }
            }
        }
    }
    Ok(out)
}

/// `(w + D_x)^j f(x, w)`.
pub fn wdx_pow(j: usize, x: f64, w: f64, table: &PainleveTable) -> Result<f64> {
    Ok(wdx_pow_series(j, 0, x, w, table)?[j][0])
}

/// `(F_1, F_2, F_3)` at `x` from the closed forms in `F_0`, `E`, `u`, `u'`.
pub fn f123(x: f64, table: &PainleveTable) -> Result<(f64, f64, f64)> {
    let p = table.point(x)?;
    let f0 = p.log_f0.exp();
    let b = x + 2.0 * p.u * p.u + 2.0 * p.u_prime;
    let f1 = f0 * p.e;
    let f2 = f1 * p.e * (1.0 + p.u * b);
    let f3 = f1 * p.e * p.e * (1.0 + 2.0 * p.u * b + 0.5 * (p.u * p.u - p.u_prime) * b * b);
    Ok((f1, f2, f3))
}

/// `F_k(x)` for `k ≤ 3` with all spikes at zero.
pub fn fk_closed_form(k: usize, x: f64, table: &PainleveTable) -> Result<f64> {
    match k {
        0 => table.f0(x),
        1..=3 => {
            let (a, b, c) = f123(x, table)?;
            Ok([a, b, c][k - 1])
        }
        _ => Err(Error::InvalidParams(format!("closed forms exist for k <= 3, got {k}"))),
    }
}

/// Residuals of the second-order equations for `f` in `x` and in `w`,
/// with derivatives taken from the Lax pair.
pub fn ode_residuals(x: f64, w: f64, table: &PainleveTable) -> Result<(f64, f64)> {
    let p = table.point(x)?;
    let st = lax_propagate_w_at(x, Complex64::new(w, 0.0), &p)?;
    let ys = lax_w_series(x, p.u, p.u_prime, Complex64::new(w, 0.0), (st.f, st.g), 2);
    let (u, up) = (p.u, p.u_prime);
    let (f, g) = (st.f.re, st.g.re);
    let fx = u * g;
    let fxx = up * g + u * (u * f - w * g);
    let r1 = -fxx + (up / u - w) * fx + u * u * f;
    let den = w * u + up;
    if den.abs() <= 1e-6 {
        return Err(Error::SingularCoefficient(den.abs()));
    }
    let fw = ys[1].0.re;
    let fww = 2.0 * ys[2].0.re;
    let r2 = -fww + (u / den + w * w - x) * fw + (-u * u * u / den + u.powi(4) + x * u * u - up * up) * f;
    Ok((r1, r2))
}
