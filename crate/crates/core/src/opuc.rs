//! Orthogonal polynomials on the unit circle.
//!
//! Monic `π_n` and `π_n*` are computed two ways: as ratios of Toeplitz
//! determinants, and through the lattice operator `P_n A B P_n` built from a
//! Wiener–Hopf factor `ψ = φ₊/φ₋`. The Gross–Witten symbol `e^{t(z+1/z)}`
//! has Bessel coefficients and drives the scaling probe towards `f(x, w)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::painleve::{self, PainleveTable};
use crate::special_functions::{bessel_i_scaled_orders, bessel_j_orders};
use crate::{Error, Result};

/// Inner-sum headroom of `AB` beyond the operator dimension.
pub const INNER_MARGIN: usize = 40;
/// `|z|` cutoff for the geometric series of `R` and `U`.
pub const SERIES_CUTOFF: f64 = 0.999;
const TAIL_TOL: f64 = 1e-16;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Two-sided coefficient array `a_k`, `|k| ≤ K`, zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct Coeffs {
    half: usize,
    data: Vec<Complex64>,
}

impl Coeffs {
    pub fn zeros(half: usize) -> Self {
        Coeffs { half, data: vec![Complex64::default(); 2 * half + 1] }
    }

    pub fn from_fn(half: usize, f: impl Fn(i64) -> Complex64) -> Self {
        let data = (0..=2 * half).map(|i| f(i as i64 - half as i64)).collect();
        Coeffs { half, data }
    }

    pub fn bandwidth(&self) -> usize {
        self.half
    }

    pub fn get(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.half {
            Complex64::default()
        } else {
            self.data[(k + self.half as i64) as usize]
        }
    }

    fn scale(&self, s: Complex64) -> Self {
        Coeffs { half: self.half, data: self.data.iter().map(|v| v * s).collect() }
    }

    /// Evaluates `Σ a_k z^k`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::default();
        let zi = z.inv();
        let mut p = Complex64::new(1.0, 0.0);
        acc += self.get(0);
        let mut q = Complex64::new(1.0, 0.0);
        for k in 1..=self.half as i64 {
            p *= z;
            q *= zi;
            acc += self.get(k) * p + self.get(-k) * q;
        }
        acc
    }
}

/// Wiener–Hopf data of a symbol: `log φ`, `ψ` and `ψ^{-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerHopf {
    pub log_phi: Coeffs,
    pub psi: Coeffs,
    pub psi_inv: Coeffs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSymbol {
    pub phi: Coeffs,
    pub wh: Option<WienerHopf>,
}

impl LaurentSymbol {
    /// `φ(z) = e^{t(z + 1/z)}`: `φ_k = I_k(2t)`, `ψ_k = J_k(2t)`,
    /// `(ψ^{-1})_k = (−1)^k J_k(2t)`.
    pub fn gross_witten(t: f64) -> Result<Self> {
        if !(t > 0.0 && t <= 300.0) {
            return Err(Error::InvalidParams(format!("need 0 < t <= 300, got {t}")));
        }
        let x = 2.0 * t;
        let scaled = bessel_i_scaled_orders((4.0 * x + 60.0) as usize, x);
        let k_phi = scaled.iter().rposition(|v| *v > TAIL_TOL * 1e-2 * scaled[0]).unwrap_or(0) + 1;
        let ex = x.exp();
        let phi = Coeffs::from_fn(k_phi, |k| c(scaled[k.unsigned_abs() as usize] * ex));
        let k_psi = (x + 12.0 * x.cbrt() + 40.0).ceil() as usize;
        let js = bessel_j_orders(k_psi, x);
        let parity = |k: i64| if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let psi = Coeffs::from_fn(k_psi, |k| {
            let v = js[k.unsigned_abs() as usize];
            c(if k < 0 { parity(k) * v } else { v })
        });
        let psi_inv = Coeffs::from_fn(k_psi, |k| {
            let v = js[k.unsigned_abs() as usize];
            c(if k < 0 { v } else { parity(k) * v })
        });
        let log_phi = Coeffs::from_fn(1, |k| if k == 0 { c(0.0) } else { c(t) });
        Ok(LaurentSymbol { phi, wh: Some(WienerHopf { log_phi, psi, psi_inv }) })
    }

    /// A positive analytic symbol given by its Fourier coefficients. The
    /// Wiener–Hopf data are obtained by FFT on `n_fft` points.
    pub fn from_fourier(phi: Coeffs, n_fft: usize) -> Result<Self> {
        let n = n_fft.max(4 * phi.bandwidth() + 64).next_power_of_two();
        let mut planner = FftPlanner::<f64>::new();
        let forward = planner.plan_fft_forward(n);
        let samples: Vec<Complex64> = (0..n)
            .map(|j| phi.eval(Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)))
            .collect();
        let min_re = samples.iter().map(|s| s.re).fold(f64::INFINITY, f64::min);
        let max_im = samples.iter().map(|s| s.im.abs()).fold(0.0, f64::max);
        if !(min_re > 0.0) || max_im > 1e-12 * (1.0 + min_re.abs()) {
            return Err(Error::InvalidParams("symbol must be positive on the unit circle".into()));
        }
        // Coefficients of a sampled function: a_k = (1/n) Σ_j f_j e^{-2πijk/n}.
        let coefficients = |vals: &[Complex64]| -> Vec<Complex64> {
            let mut buf = vals.to_vec();
            forward.process(&mut buf);
            buf.iter().map(|v| v / n as f64).collect()
        };
        let at = |a: &[Complex64], k: i64| a[k.rem_euclid(n as i64) as usize];
        let logs: Vec<Complex64> = samples.iter().map(|s| c(s.re.ln())).collect();
        let lc = coefficients(&logs);
        let half = n / 2 - 1;
        let cert = |a: &[Complex64], name: &str| -> Result<()> {
            let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let edge = (half as i64 - 8..=half as i64).map(|k| at(a, k).norm().max(at(a, -k).norm())).fold(0.0, f64::max);
            if edge > 1e-14 * scale.max(1.0) {
                return Err(Error::InvalidParams(format!("{name} coefficients do not decay within the FFT window")));
            }
            Ok(())
        };
        cert(&lc, "log")?;
        let exponent = |j: usize, sign: f64| -> Complex64 {
            let z = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
            let mut acc = Complex64::default();
            let (mut p, mut q) = (c(1.0), c(1.0));
            for k in 1..=half as i64 {
                p *= z;
                q /= z;
                acc += at(&lc, k) * p - at(&lc, -k) * q;
            }
            (acc * sign).exp()
        };
        let psi_s: Vec<Complex64> = (0..n).map(|j| exponent(j, 1.0)).collect();
        let psi_inv_s: Vec<Complex64> = (0..n).map(|j| exponent(j, -1.0)).collect();
        let pc = coefficients(&psi_s);
        let pic = coefficients(&psi_inv_s);
        cert(&pc, "psi")?;
        cert(&pic, "psi inverse")?;
        let trim = |a: &[Complex64]| -> Coeffs {
            let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let k = (0..=half as i64)
                .rev()
                .find(|&k| at(a, k).norm().max(at(a, -k).norm()) > 1e-18 * scale)
                .unwrap_or(0) as usize;
            Coeffs::from_fn(k, |i| at(a, i))
        };
        let wh = WienerHopf { log_phi: trim(&lc), psi: trim(&pc), psi_inv: trim(&pic) };
        Ok(LaurentSymbol { phi, wh: Some(wh) })
    }

    pub fn wiener_hopf(&self) -> Result<&WienerHopf> {
        self.wh
            .as_ref()
            .ok_or_else(|| Error::InvalidParams("symbol has no Wiener-Hopf factorization attached".into()))
    }

    /// Same symbol with `ψ` multiplied by `s` (and `ψ^{-1}` divided by it),
    /// i.e. another choice of Wiener–Hopf factorization.
    pub fn with_psi_scaled(&self, s: Complex64) -> Result<Self> {
        let wh = self.wiener_hopf()?;
        Ok(LaurentSymbol {
            phi: self.phi.clone(),
            wh: Some(WienerHopf { log_phi: wh.log_phi.clone(), psi: wh.psi.scale(s), psi_inv: wh.psi_inv.scale(s.inv()) }),
        })
    }

    /// `G(φ) = e^{(log φ)_0}`.
    pub fn g_constant(&self) -> Result<Complex64> {
        Ok(self.wiener_hopf()?.log_phi.get(0).exp())
    }

    /// `E(φ) = exp(Σ_{k≥1} k (log φ)_k (log φ)_{-k})`.
    pub fn e_constant(&self) -> Result<Complex64> {
        let l = &self.wiener_hopf()?.log_phi;
        let s: Complex64 = (1..=l.bandwidth() as i64).map(|k| l.get(k) * l.get(-k) * k as f64).sum();
        Ok(s.exp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearFactor {
    /// `(1 − z/w) φ(w)`.
    OuterRoot,
    /// `(z − w) φ(w)`.
    InnerRoot,
}

/// Multiplies the symbol by a linear factor; the result carries no
/// Wiener–Hopf data.
pub fn symbol_times_linear(sym: &LaurentSymbol, z: Complex64, variant: LinearFactor) -> LaurentSymbol {
    let p = &sym.phi;
    let phi = match variant {
        LinearFactor::OuterRoot => Coeffs::from_fn(p.bandwidth() + 1, |k| p.get(k) - z * p.get(k + 1)),
        LinearFactor::InnerRoot => Coeffs::from_fn(p.bandwidth() + 1, |k| z * p.get(k) - p.get(k - 1)),
    };
    LaurentSymbol { phi, wh: None }
}

/// `D_n(φ) = det(φ_{i−j})_{0≤i,j<n}`.
pub fn toeplitz_det(sym: &LaurentSymbol, n: usize) -> Complex64 {
    if n == 0 {
        return c(1.0);
    }
    let m = DMatrix::from_fn(n, n, |i, j| sym.phi.get(i as i64 - j as i64));
    m.lu().determinant()
}

/// `π_n*(z) = D_n(φ_z)/D_n(φ)`.
pub fn pi_star_toeplitz(sym: &LaurentSymbol, n: usize, z: Complex64) -> Complex64 {
    toeplitz_det(&symbol_times_linear(sym, z, LinearFactor::OuterRoot), n) / toeplitz_det(sym, n)
}

/// `π_n(z) = D_n(φ^z)/D_n(φ)`.
pub fn pi_toeplitz(sym: &LaurentSymbol, n: usize, z: Complex64) -> Complex64 {
    toeplitz_det(&symbol_times_linear(sym, z, LinearFactor::InnerRoot), n) / toeplitz_det(sym, n)
}

fn parity(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `P_n A B P_n` restricted to the indices `n ≤ j, k < dim`.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    pub n: usize,
    pub dim: usize,
    pub dim_inner: usize,
    pub sign_flag: bool,
    pub ab: DMatrix<Complex64>,
    /// Largest `|A(j, m)|` and `|B(m, k)|` just outside the truncation.
    pub tail: f64,
}

impl TruncatedOperator {
    pub fn new(sym: &LaurentSymbol, n: usize, dim: usize, sign_flag: bool) -> Result<Self> {
        if dim <= n {
            return Err(Error::InvalidParams(format!("dim = {dim} must exceed n = {n}")));
        }
        let wh = sym.wiener_hopf()?;
        let size = dim - n;
        let dim_inner = dim + INNER_MARGIN;
        let sign = |k: usize| if sign_flag { parity(k) } else { 1.0 };
        let a = DMatrix::from_fn(size, dim_inner, |j, m| {
            wh.psi_inv.get((j + n + m + 1) as i64) * sign(j + n + m)
        });
        let b = DMatrix::from_fn(dim_inner, size, |m, k| wh.psi.get(-((m + k + n + 1) as i64)) * sign(m + k + n));
        let ab = &a * &b;
        let mut tail: f64 = 0.0;
        for j in n..dim {
            tail = tail.max(wh.psi_inv.get((j + dim_inner + 1) as i64).norm());
            tail = tail.max(wh.psi.get(-((j + dim_inner + 1) as i64)).norm());
        }
        tail = tail.max(wh.psi_inv.get((dim + n + 1) as i64).norm());
        tail = tail.max(wh.psi.get(-((dim + n + 1) as i64)).norm());
        Ok(TruncatedOperator { n, dim, dim_inner, sign_flag, ab, tail })
    }

    fn size(&self) -> usize {
        self.dim - self.n
    }

    /// `1 − ⟨(1 − P_n A B P_n)^{-1} P_n a, P_n b⟩` with the bilinear pairing;
    /// `a` and `b` are indexed from `n`.
    pub fn bracket(&self, a: &[Complex64], b: &[Complex64]) -> Result<Complex64> {
        let m = DMatrix::identity(self.size(), self.size()) - &self.ab;
        let rhs = DVector::from_column_slice(a);
        let y = m
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::SingularSystem("1 - P_n A B P_n is singular".into()))?;
        Ok(c(1.0) - y.iter().zip(b).map(|(y, b)| y * b).sum::<Complex64>())
    }

    /// `det(1 − P_n A B P_n)`.
    pub fn fredholm_det(&self) -> Complex64 {
        (DMatrix::identity(self.size(), self.size()) - &self.ab).lu().determinant()
    }
}

/// `Q(j) = (ψ^{-1})_{j+1}` and `R(k) = Σ_{m≥1} z^m ψ_{m−k−1}` for
/// `0 ≤ j, k < dim`.
pub fn qr_vectors(sym: &LaurentSymbol, z: Complex64, dim: usize) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let wh = sym.wiener_hopf()?;
    if z.norm() >= SERIES_CUTOFF {
        return Err(Error::SeriesNotConverged(format!("|z| = {} is too close to or beyond 1", z.norm())));
    }
    let q = (0..dim).map(|j| wh.psi_inv.get(j as i64 + 1)).collect();
    let scale = (0..=wh.psi.bandwidth() as i64).map(|k| wh.psi.get(k).norm().max(wh.psi.get(-k).norm())).fold(0.0, f64::max);
    let r = (0..dim)
        .map(|k| {
            let mut acc = Complex64::default();
            let mut p = z;
            let mut m = 1i64;
            while p.norm() * scale >= 1e-17 && m <= k as i64 + 1 + wh.psi.bandwidth() as i64 {
                acc += p * wh.psi.get(m - k as i64 - 1);
                p *= z;
                m += 1;
            }
            acc
        })
        .collect();
    Ok((q, r))
}

/// `R(k)` continued to all `z ≠ 0`:
/// `z^{k+1} ψ(z) − Σ_{m≥0} z^{−m} ψ_{−k−1−m}`, with `z^{k+1}ψ(z)` formed
/// as a single exponential for the Gross–Witten `ψ = e^{t(z−1/z)}`.
pub fn r_continued_gross_witten(sym: &LaurentSymbol, t: f64, z: Complex64, k: usize) -> Result<Complex64> {
    let wh = sym.wiener_hopf()?;
    let lead = ((k as f64 + 1.0) * z.ln() + t * (z - z.inv())).exp();
    let zi = z.inv();
    let mut p = c(1.0);
    let mut acc = Complex64::default();
    let limit = wh.psi.bandwidth() as i64;
    let mut m = 0i64;
    while k as i64 + 1 + m <= limit {
        acc += p * wh.psi.get(-(k as i64) - 1 - m);
        p *= zi;
        m += 1;
    }
    Ok(lead - acc)
}

/// `U(j) = Σ_{m≥1} z^{−m} (ψ^{-1})_{j+1−m}` and `V(k) = ψ_{−k−1}`.
pub fn uv_vectors(sym: &LaurentSymbol, z: Complex64, dim: usize) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let wh = sym.wiener_hopf()?;
    if z.norm() * SERIES_CUTOFF <= 1.0 {
        return Err(Error::SeriesNotConverged(format!("|z| = {} is too close to or inside 1", z.norm())));
    }
    let zi = z.inv();
    let scale = (0..=wh.psi_inv.bandwidth() as i64)
        .map(|k| wh.psi_inv.get(k).norm().max(wh.psi_inv.get(-k).norm()))
        .fold(0.0, f64::max);
    let u = (0..dim)
        .map(|j| {
            let mut acc = Complex64::default();
            let mut p = zi;
            let mut m = 1i64;
            while p.norm() * scale >= 1e-17 && m <= j as i64 + 1 + wh.psi_inv.bandwidth() as i64 {
                acc += p * wh.psi_inv.get(j as i64 + 1 - m);
                p *= zi;
                m += 1;
            }
            acc
        })
        .collect();
    let v = (0..dim).map(|k| wh.psi.get(-(k as i64) - 1)).collect();
    Ok((u, v))
}

fn signed(v: &[Complex64], n: usize, sign_flag: bool) -> Vec<Complex64> {
    v[n..].iter().enumerate().map(|(i, x)| if sign_flag { x * parity(i + n) } else { *x }).collect()
}

/// `π_n*(z)` by the operator formula, `|z| < 1`.
pub fn pi_star_operator(sym: &LaurentSymbol, n: usize, z: Complex64, dim: usize) -> Result<Complex64> {
    pi_star_operator_signed(sym, n, z, dim, false)
}

pub fn pi_star_operator_signed(sym: &LaurentSymbol, n: usize, z: Complex64, dim: usize, sign_flag: bool) -> Result<Complex64> {
    let op = TruncatedOperator::new(sym, n, dim, sign_flag)?;
    let (q, r) = qr_vectors(sym, z, dim)?;
    let bracket = op.bracket(&signed(&q, n, sign_flag), &signed(&r, n, sign_flag))?;
    let l = &sym.wiener_hopf()?.log_phi;
    let mut e = Complex64::default();
    let mut p = c(1.0);
    for k in 1..=l.bandwidth() as i64 {
        p *= z;
        e += l.get(k) * p;
    }
    Ok((-e).exp() * bracket)
}

/// `π_n(z)` by the operator formula, `|z| > 1`.
pub fn pi_operator(sym: &LaurentSymbol, n: usize, z: Complex64, dim: usize) -> Result<Complex64> {
    let op = TruncatedOperator::new(sym, n, dim, false)?;
    let (u, v) = uv_vectors(sym, z, dim)?;
    let bracket = op.bracket(&u[n..], &v[n..])?;
    let l = &sym.wiener_hopf()?.log_phi;
    let mut e = Complex64::default();
    let zi = z.inv();
    let mut p = c(1.0);
    for k in 1..=l.bandwidth() as i64 {
        p *= zi;
        e += l.get(-k) * p;
    }
    Ok(z.powu(n as u32) * (-e).exp() * bracket)
}

/// Both sides of `D_n(φ)/(G^n E) = det(1 − P_n A B P_n)`.
pub fn gcbo_check(sym: &LaurentSymbol, n: usize, dim: usize) -> Result<(Complex64, Complex64)> {
    let lhs = toeplitz_det(sym, n) / (sym.g_constant()?.powu(n as u32) * sym.e_constant()?);
    let rhs = TruncatedOperator::new(sym, n, dim, false)?.fredholm_det();
    Ok((lhs, rhs))
}

/// `n = ⌊2t + x t^{1/3}⌋` and `z = −1 + w t^{−1/3}`.
pub fn scaling_point(t: f64, x: f64, w: f64) -> (usize, Complex64) {
    let s = t.cbrt();
    ((2.0 * t + x * s).floor() as usize, c(-1.0 + w / s))
}

/// Operator dimension used by the scaling probe.
pub fn scaling_dim(t: f64, n: usize) -> usize {
    n + (16.0 * t.cbrt()).ceil() as usize + 20
}

/// `e^{tz} π_n*(z)` for the Gross–Witten symbol at the scaling point, by
/// the operator route with the continued `R`.
pub fn scaling_lhs(t: f64, x: f64, w: f64) -> Result<f64> {
    let sym = LaurentSymbol::gross_witten(t)?;
    let (n, z) = scaling_point(t, x, w);
    let dim = scaling_dim(t, n);
    let op = TruncatedOperator::new(&sym, n, dim, true)?;
    let wh = sym.wiener_hopf()?;
    let q: Vec<Complex64> = (n..dim).map(|j| wh.psi_inv.get(j as i64 + 1) * parity(j)).collect();
    let r: Vec<Complex64> = (n..dim)
        .map(|k| r_continued_gross_witten(&sym, t, z, k).map(|v| v * parity(k)))
        .collect::<Result<_>>()?;
    Ok(op.bracket(&q, &r)?.re)
}

/// Same quantity by Toeplitz determinants; only usable for small `t`.
pub fn scaling_lhs_toeplitz(t: f64, x: f64, w: f64) -> Result<f64> {
    let sym = LaurentSymbol::gross_witten(t)?;
    let (n, z) = scaling_point(t, x, w);
    Ok(((t * z).exp() * pi_star_toeplitz(&sym, n, z)).re)
}

/// `(e^{tz} π_n*(z), f(x, w))` under the scaling `n = ⌊2t + x t^{1/3}⌋`,
/// `z = −1 + w t^{−1/3}`.
pub fn scaling_probe(t: f64, x: f64, w: f64, table: &PainleveTable) -> Result<(f64, f64)> {
    if t < 10.0 {
        return Err(Error::InvalidParams(format!("scaling probe needs t >= 10, got {t}")));
    }
    let lhs = scaling_lhs(t, x, w)?;
    let f = painleve::lax_propagate_w(x, c(w), table)?.f.re;
    Ok((lhs, f))
}
