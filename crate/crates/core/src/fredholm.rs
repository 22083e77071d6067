//! Nyström discretization of the Airy operator on `(x, ∞)`.
//!
//! The half-line is truncated to `[x, x + L]` and discretized by an
//! `n`-point Gauss–Legendre rule. With `K_ij = √w_i A(s_i, s_j) √w_j` the
//! finite determinant `det(I − K)` converges to the Fredholm determinant
//! super-exponentially in `n` because the kernel is entire.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::painleve::{self, PainleveTable};
use crate::special_functions::{
    airy, airy_kernel_from_values, cauchy_airy, partial_fraction_weights, AiryPolynomial,
};
use crate::{Error, Result};

/// Spike parameters closer than this are treated as coincident.
pub const CONFLUENT_THRESHOLD: f64 = 1e-6;

/// Maximum change allowed when the node count is doubled.
pub const REFINEMENT_TOL: f64 = 1e-8;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        // Tricomi initial guess for the i-th largest root.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[n - 1 - i] = z;
        nodes[i] = -z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub x0: f64,
    pub length: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss–Legendre rule mapped to `[x0, x0 + length]`.
pub fn build_quadrature(x0: f64, length: f64, n: usize) -> Result<Quadrature> {
    if !(length > 0.0) || !x0.is_finite() || !length.is_finite() || n == 0 {
        return Err(Error::InvalidParams(format!(
            "quadrature needs L > 0 and n >= 1 (got L={length}, n={n})"
        )));
    }
    let (t, w) = gauss_legendre(n);
    let half = 0.5 * length;
    Ok(Quadrature {
        x0,
        length,
        nodes: t.iter().map(|t| x0 + half * (t + 1.0)).collect(),
        weights: w.iter().map(|w| half * w).collect(),
    })
}

/// Truncation window and node count of the Nyström rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discretization {
    pub length: f64,
    pub n: usize,
}

impl Default for Discretization {
    fn default() -> Self {
        Discretization { length: 16.0, n: 96 }
    }
}

impl Discretization {
    /// Window for an integrand involving `C_w` with `w ≥ w_min`.
    ///
    /// For negative `w` the product `C_w Ai` peaks near `u = w²` with width
    /// of order `√(2|w|)`, so the right end is pushed past that bump. The node
    /// density of the base rule is kept.
    pub fn window(&self, x: f64, w_min: f64) -> (f64, usize) {
        let mut right = (x + self.length).max(10.0);
        if w_min < 0.0 {
            let a = -w_min;
            right = right.max(a * a + 10.0 * (2.0 * a).sqrt() + 6.0);
        }
        let len = right - x;
        let n = ((self.n as f64) * len / self.length).ceil() as usize;
        (len, n.max(self.n))
    }
}

/// Symmetrized Nyström matrix of the Airy operator together with its
/// Cholesky factorization of `I − K`.
#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    pub quad: Quadrature,
    pub matrix: DMatrix<f64>,
    sqrt_w: Vec<f64>,
    airy_values: Vec<(f64, f64)>,
    factor: Cholesky<f64, Dyn>,
}

impl DiscretizedOperator {
    pub fn new(quad: Quadrature) -> Result<Self> {
        let n = quad.nodes.len();
        let airy_values: Vec<_> = quad.nodes.iter().map(|&s| airy(s)).collect();
        let sqrt_w: Vec<f64> = quad.weights.iter().map(|w| w.sqrt()).collect();
        let mut matrix = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let a = airy_kernel_from_values(
                    quad.nodes[i],
                    quad.nodes[j],
                    airy_values[i],
                    airy_values[j],
                );
                let v = sqrt_w[i] * a * sqrt_w[j];
                matrix[(i, j)] = v;
                matrix[(j, i)] = v;
            }
        }
        let i_minus_k = DMatrix::identity(n, n) - &matrix;
        // The Airy operator is positive, so a successful factorization of
        // I − K certifies that the spectral radius of K is below one.
        let factor = Cholesky::new(i_minus_k).ok_or_else(|| {
            Error::SingularSystem(format!("I - K is not positive definite at x = {}", quad.x0))
        })?;
        Ok(DiscretizedOperator { quad, matrix, sqrt_w, airy_values, factor })
    }

    pub fn at(x: f64, length: f64, n: usize) -> Result<Self> {
        Self::new(build_quadrature(x, length, n)?)
    }

    pub fn len(&self) -> usize {
        self.sqrt_w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sqrt_w.is_empty()
    }

    /// `det(I − K)`.
    pub fn determinant(&self) -> f64 {
        let l = self.factor.l_dirty();
        (0..self.len()).map(|i| l[(i, i)] * l[(i, i)]).product()
    }

    pub fn spectral_radius(&self) -> f64 {
        SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `(Ai, Ai')` at the nodes.
    pub fn airy_at_nodes(&self) -> &[(f64, f64)] {
        &self.airy_values
    }

    /// Solves `(1 − A) y = g` for `g` sampled at the nodes.
    pub fn resolvent_apply(&self, samples: &[f64]) -> Result<Vec<f64>> {
        if samples.len() != self.len() {
            return Err(Error::InvalidParams(format!(
                "expected {} samples, got {}",
                self.len(),
                samples.len()
            )));
        }
        let rhs = DVector::from_iterator(
            self.len(),
            samples.iter().zip(&self.sqrt_w).map(|(g, s)| g * s),
        );
        let z = self.factor.solve(&rhs);
        let y: Vec<f64> = z.iter().zip(&self.sqrt_w).map(|(z, s)| z / s).collect();
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularSystem("non-finite resolvent image".into()));
        }
        Ok(y)
    }

    /// `∫ a b` by the quadrature rule.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.quad.weights.iter().zip(a).zip(b).map(|((w, a), b)| w * a * b).sum()
    }

    /// Nyström extension of a resolvent image to an arbitrary point:
    /// `(1 − A)^{-1} g (p) = g(p) + Σ_j w_j A(p, s_j) y_j`.
    pub fn extend(&self, p: f64, g_at_p: f64, y: &[f64]) -> f64 {
        let ap = airy(p);
        let mut acc = g_at_p;
        for j in 0..self.len() {
            let s = self.quad.nodes[j];
            acc += self.quad.weights[j] * airy_kernel_from_values(p, s, ap, self.airy_values[j]) * y[j];
        }
        acc
    }
}

/// Solves `(1 − A)y = samples` on `op`.
pub fn resolvent_apply(op: &DiscretizedOperator, samples: &[f64]) -> Result<Vec<f64>> {
    op.resolvent_apply(samples)
}

fn refined<F>(x: f64, w_min: f64, disc: &Discretization, eval: F) -> Result<Vec<f64>>
where
    F: Fn(&DiscretizedOperator) -> Result<Vec<f64>>,
{
    let (len, n) = disc.window(x, w_min);
    let coarse = eval(&DiscretizedOperator::at(x, len, n)?)?;
    let fine = eval(&DiscretizedOperator::at(x, len, 2 * n)?)?;
    let change = coarse.iter().zip(&fine).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if change > REFINEMENT_TOL || !change.is_finite() {
        return Err(Error::NotConverged { change });
    }
    Ok(fine)
}

/// `F_0(x) = det(1 − A_x)` with the default discretization.
pub fn f0_fredholm(x: f64) -> Result<f64> {
    f0_fredholm_with(x, &Discretization::default())
}

pub fn f0_fredholm_with(x: f64, disc: &Discretization) -> Result<f64> {
    Ok(refined(x, 0.0, disc, |op| Ok(vec![op.determinant()]))?[0])
}

fn fg_on(op: &DiscretizedOperator, w: f64) -> Result<Vec<f64>> {
    let c: Vec<f64> = op.quad.nodes.iter().map(|&s| cauchy_airy(s, w)).collect::<Result<_>>()?;
    let y = op.resolvent_apply(&c)?;
    let ai: Vec<f64> = op.airy_at_nodes().iter().map(|a| a.0).collect();
    let f = 1.0 - op.inner(&y, &ai);
    let x = op.quad.x0;
    let g = -op.extend(x, cauchy_airy(x, w)?, &y);
    Ok(vec![f, g])
}

/// `(f(x, w), g(x, w))` by the operator route.
pub fn fg_fredholm(x: f64, w: f64) -> Result<(f64, f64)> {
    fg_fredholm_with(x, w, &Discretization::default())
}

pub fn fg_fredholm_with(x: f64, w: f64, disc: &Discretization) -> Result<(f64, f64)> {
    let v = refined(x, w.min(0.0), disc, |op| fg_on(op, w))?;
    Ok((v[0], v[1]))
}

/// `f(x, w) = 1 − ⟨(1 − A_x)^{-1} C_w, Ai⟩`.
pub fn f_fredholm(x: f64, w: f64) -> Result<f64> {
    Ok(fg_fredholm(x, w)?.0)
}

/// `g(x, w) = −((1 − A_x)^{-1} C_w)(x)`.
pub fn g_fredholm(x: f64, w: f64) -> Result<f64> {
    Ok(fg_fredholm(x, w)?.1)
}

/// Spike parameters `w_1..w_k` with coincident entries grouped.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeVector {
    ws: Vec<f64>,
    clusters: Vec<Vec<usize>>,
}

impl SpikeVector {
    pub fn new(ws: Vec<f64>) -> Result<Self> {
        if ws.is_empty() || ws.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParams("spike vector needs k >= 1 finite entries".into()));
        }
        let mut order: Vec<usize> = (0..ws.len()).collect();
        order.sort_by(|&a, &b| ws[a].total_cmp(&ws[b]));
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for &i in &order {
            match clusters.last_mut() {
                Some(c) if ws[i] - ws[*c.last().unwrap()] < CONFLUENT_THRESHOLD => c.push(i),
                _ => clusters.push(vec![i]),
            }
        }
        for c in clusters.iter_mut() {
            c.sort_unstable();
        }
        clusters.sort_by_key(|c| c[0]);
        Ok(SpikeVector { ws, clusters })
    }

    pub fn zeros(k: usize) -> Result<Self> {
        Self::new(vec![0.0; k])
    }

    pub fn ws(&self) -> &[f64] {
        &self.ws
    }

    pub fn len(&self) -> usize {
        self.ws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ws.is_empty()
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn is_distinct(&self) -> bool {
        self.clusters.len() == self.ws.len()
    }

    /// `(representative, multiplicity)` per cluster, in order of first index.
    pub fn cluster_values(&self) -> Vec<(f64, usize)> {
        self.clusters
            .iter()
            .map(|c| (c.iter().map(|&i| self.ws[i]).sum::<f64>() / c.len() as f64, c.len()))
            .collect()
    }
}

fn fk_matrix_on(op: &DiscretizedOperator, ws: &[f64]) -> Result<Vec<f64>> {
    let k = ws.len();
    // C_{w_j} at the nodes, shared by all s^(m).
    let cw: Vec<Vec<f64>> = ws
        .iter()
        .map(|&w| op.quad.nodes.iter().map(|&s| cauchy_airy(s, w)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let mut ts = Vec::with_capacity(k);
    for n in 0..k {
        let poly = AiryPolynomial::for_parameters(&ws[..n]);
        let t: Vec<f64> = op
            .quad
            .nodes
            .iter()
            .zip(op.airy_at_nodes())
            .map(|(&s, &a)| poly.eval_with(s, a))
            .collect();
        ts.push(t);
    }
    let mut out = Vec::with_capacity(k * k);
    for m in 0..k {
        let coeffs = partial_fraction_weights(&ws[..=m])?;
        let s: Vec<f64> = (0..op.len())
            .map(|i| coeffs.iter().enumerate().map(|(j, c)| c * cw[j][i]).sum())
            .collect();
        let y = op.resolvent_apply(&s)?;
        for t in &ts {
            out.push(op.inner(&y, t));
        }
    }
    let det = DMatrix::from_fn(k, k, |m, n| if m == n { 1.0 } else { 0.0 } - out[m * k + n]).determinant();
    Ok(vec![op.determinant(), det])
}

/// `F_k(x; w)` directly from the inner products of `s^(m)` and `t^(n)`.
pub fn fk_definition(x: f64, spikes: &SpikeVector) -> Result<f64> {
    fk_definition_with(x, spikes, &Discretization::default())
}

pub fn fk_definition_with(x: f64, spikes: &SpikeVector, disc: &Discretization) -> Result<f64> {
    if !spikes.is_distinct() {
        let sep = spikes
            .ws()
            .iter()
            .enumerate()
            .flat_map(|(i, a)| spikes.ws()[i + 1..].iter().map(move |b| (a - b).abs()))
            .fold(f64::INFINITY, f64::min);
        return Err(Error::ConfluentParameters { separation: sep });
    }
    if spikes.len() > 6 {
        return Err(Error::InvalidParams("at most 6 spikes are supported".into()));
    }
    let w_min = spikes.ws().iter().cloned().fold(0.0, f64::min);
    let v = refined(x, w_min, disc, |op| {
        let r = fk_matrix_on(op, spikes.ws())?;
        Ok(vec![r[0] * r[1]])
    })?;
    Ok(v[0])
}

/// `F_k(x; w)` from the determinant of `(w_m + D_x)^{n−1} f(x, w_m)`, with
/// clusters of coincident parameters replaced by their `w`-derivatives.
pub fn fk_determinant(x: f64, spikes: &SpikeVector, table: &PainleveTable) -> Result<f64> {
    let k = spikes.len();
    if k > 6 {
        return Err(Error::InvalidParams("at most 6 spikes are supported".into()));
    }
    let f0 = table.f0(x)?;
    let clusters = spikes.cluster_values();
    let mut mat = DMatrix::zeros(k, k);
    let mut row = 0;
    for &(omega, mult) in &clusters {
        let series = painleve::wdx_pow_series(k - 1, mult - 1, x, omega, table)?;
        for a in 0..mult {
            for n in 0..k {
                mat[(row, n)] = series[n][a];
            }
            row += 1;
        }
    }
    let mut denom = 1.0;
    for p in 0..clusters.len() {
        for q in p + 1..clusters.len() {
            let (wp, cp) = clusters[p];
            let (wq, cq) = clusters[q];
            denom *= (wq - wp).powi((cp * cq) as i32);
        }
    }
    Ok(f0 * mat.determinant() / denom)
}

/// Left and right ends of the moment integration window.
pub const MOMENT_WINDOW: (f64, f64) = (-12.0, 9.0);
const MOMENT_STEP: f64 = 0.05;
const MOMENT_TAIL_TOL: f64 = 1e-6;

/// Mean and standard deviation of `F_k`, `k ≤ 3`, from the CDF on
/// `[−12, 9]`.
pub fn moments(k: usize, table: &PainleveTable) -> Result<(f64, f64)> {
    if k > 3 {
        return Err(Error::InvalidParams(format!("moments are tabulated for k <= 3, got {k}")));
    }
    let (lo, hi) = MOMENT_WINDOW;
    let cdf = |x: f64| painleve::fk_closed_form(k, x, table);
    let left_tail = cdf(lo)?;
    let right_tail = 1.0 - cdf(hi)?;
    if left_tail > MOMENT_TAIL_TOL || right_tail > MOMENT_TAIL_TOL {
        return Err(Error::NotConverged { change: left_tail.max(right_tail) });
    }
    // Composite Simpson on each side of the origin, where the integrands
    // have a kink.
    let simpson = |a: f64, b: f64, g: &dyn Fn(f64) -> Result<f64>| -> Result<f64> {
        let m = ((b - a) / MOMENT_STEP).round() as usize;
        let m = m + m % 2;
        let h = (b - a) / m as f64;
        let mut acc = g(a)? + g(b)?;
        for i in 1..m {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(a + i as f64 * h)?;
        }
        Ok(acc * h / 3.0)
    };
    let neg_mass = simpson(lo, 0.0, &|x| cdf(x))?;
    let pos_mass = simpson(0.0, hi, &|x| Ok(1.0 - cdf(x)?))?;
    let neg_second = simpson(lo, 0.0, &|x| Ok(2.0 * x * cdf(x)?))?;
    let pos_second = simpson(0.0, hi, &|x| Ok(2.0 * x * (1.0 - cdf(x)?)))?;
    let mean = pos_mass - neg_mass;
    let second = pos_second - neg_second;
    Ok((mean, (second - mean * mean).sqrt()))
}
