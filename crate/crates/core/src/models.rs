//! Monte Carlo models: exponential last passage percolation with spiked
//! columns, small GUE maxima, and TASEP through its duality with LPP.
//!
//! Every sample `i` draws from its own ChaCha8 stream `i` under the master
//! seed, so results do not depend on how work is split across threads.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::fredholm::{fk_determinant, SpikeVector};
use crate::painleve::PainleveTable;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LppConfig {
    /// Columns.
    pub n: usize,
    /// Rows.
    pub m: usize,
    /// Means of the first `r` columns; the rest have mean 1.
    pub spike_means: Vec<f64>,
    pub seed: u64,
}

impl LppConfig {
    pub fn new(n: usize, m: usize, spike_means: Vec<f64>, seed: u64) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidParams(format!("need N, M >= 1, got N={n}, M={m}")));
        }
        if spike_means.len() > n {
            return Err(Error::InvalidParams(format!("{} spikes exceed N={n}", spike_means.len())));
        }
        if let Some(bad) = spike_means.iter().find(|l| !(**l > 0.0)) {
            return Err(Error::InvalidParams(format!("spike mean {bad} is not positive")));
        }
        Ok(LppConfig { n, m, spike_means, seed })
    }

    /// `γ = √(M/N)`.
    pub fn gamma(&self) -> f64 {
        (self.m as f64 / self.n as f64).sqrt()
    }

    pub fn column_mean(&self, i: usize) -> f64 {
        self.spike_means.get(i).copied().unwrap_or(1.0)
    }
}

/// Generator for sample `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Exponential draw with the given mean, by inverse transform.
pub fn exponential<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> f64 {
    let u: f64 = rng.gen();
    -mean * (1.0 - u).ln()
}

/// One draw of `L(N, M)`; `T(i,j) = max(T(i−1,j), T(i,j−1)) + X(i,j)` over
/// a single rolling row.
pub fn lpp_sample<R: Rng + ?Sized>(cfg: &LppConfig, rng: &mut R) -> f64 {
    let means: Vec<f64> = (0..cfg.n).map(|i| cfg.column_mean(i)).collect();
    let mut row = vec![0.0f64; cfg.n];
    for _ in 0..cfg.m {
        let mut left = 0.0f64;
        for (cell, mean) in row.iter_mut().zip(&means) {
            *cell = cell.max(left) + exponential(rng, *mean);
            left = *cell;
        }
    }
    row[cfg.n - 1]
}

/// Last passage time through a given weight grid `weights[row][col]`.
pub fn lpp_from_weights(weights: &[Vec<f64>]) -> f64 {
    let cols = weights.first().map_or(0, Vec::len);
    let mut row = vec![0.0f64; cols];
    for w in weights {
        let mut left = 0.0f64;
        for (cell, x) in row.iter_mut().zip(w) {
            *cell = cell.max(left) + x;
            left = *cell;
        }
    }
    row.last().copied().unwrap_or(0.0)
}

/// `(L/M − (1+γ^{−1})²) · γ/(1+γ)^{4/3} · M^{2/3}`.
pub fn scale_null(l: f64, m: usize, gamma: f64) -> f64 {
    let (center, scale) = null_scaling(m, gamma);
    (l / m as f64 - center) * scale
}

pub fn null_scaling(m: usize, gamma: f64) -> (f64, f64) {
    let center = (1.0 + 1.0 / gamma).powi(2);
    (center, gamma / (1.0 + gamma).powf(4.0 / 3.0) * (m as f64).powf(2.0 / 3.0))
}

/// `ℓ_j = 1 + γ^{−1} − (1+γ)^{3/2} w_j / (γ M^{1/3})`.
pub fn bbp2_spike_means(gamma: f64, m: usize, ws: &[f64]) -> Result<Vec<f64>> {
    let base = 1.0 + 1.0 / gamma;
    let step = (1.0 + gamma).powf(1.5) / (gamma * (m as f64).cbrt());
    let means: Vec<f64> = ws.iter().map(|w| base - step * w).collect();
    if let Some(bad) = means.iter().find(|l| !(**l > 0.0)) {
        return Err(Error::InvalidParams(format!("spike mean {bad} is not positive")));
    }
    Ok(means)
}

/// Center `ℓ₁ + ℓ₁γ^{−2}/(ℓ₁−1)` and factor `√M / σ` with
/// `σ² = ℓ₁² − ℓ₁²γ^{−2}/(ℓ₁−1)²`.
pub fn supercritical_scaling(m: usize, gamma: f64, l1: f64) -> Result<(f64, f64)> {
    if !(l1 > 1.0 + 1.0 / gamma) {
        return Err(Error::InvalidParams(format!("l1 = {l1} is not supercritical for gamma = {gamma}")));
    }
    let g2 = gamma.powi(-2);
    let var = l1 * l1 - l1 * l1 * g2 / (l1 - 1.0).powi(2);
    if !(var > 0.0) {
        return Err(Error::InvalidParams(format!("nonpositive variance {var}")));
    }
    Ok((l1 + l1 * g2 / (l1 - 1.0), (m as f64).sqrt() / var.sqrt()))
}

pub fn scale_supercritical(l: f64, m: usize, gamma: f64, l1: f64) -> Result<f64> {
    let (center, scale) = supercritical_scaling(m, gamma, l1)?;
    Ok((l / m as f64 - center) * scale)
}

/// Largest eigenvalue of a `k×k` GUE matrix: diagonal `N(0,1)`, off-diagonal
/// complex Gaussian with `E|h_ij|² = 1`.
pub fn gue_max_sample<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<f64> {
    if !(1..=8).contains(&k) {
        return Err(Error::InvalidParams(format!("GUE size must be in 1..=8, got {k}")));
    }
    let h = gue_matrix(k, rng);
    Ok(hermitian_max_eigenvalue(&h))
}

/// Draws the entries `(re, im)` of a GUE matrix, row-major upper triangle.
pub fn gue_matrix<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<Vec<(f64, f64)>> {
    let mut h = vec![vec![(0.0, 0.0); k]; k];
    let half = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..k {
        h[i][i] = (rng.sample(StandardNormal), 0.0);
        for j in i + 1..k {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            h[i][j] = (re * half, im * half);
            h[j][i] = (re * half, -im * half);
        }
    }
    h
}

/// Closed form for `k ≤ 2`; otherwise the symmetric eigensolver on the
/// real `2k×2k` embedding `[[Re, −Im], [Im, Re]]`.
pub fn hermitian_max_eigenvalue(h: &[Vec<(f64, f64)>]) -> f64 {
    let k = h.len();
    match k {
        1 => h[0][0].0,
        2 => {
            let (a, d) = (h[0][0].0, h[1][1].0);
            let b2 = h[0][1].0.powi(2) + h[0][1].1.powi(2);
            0.5 * (a + d) + (0.25 * (a - d).powi(2) + b2).sqrt()
        }
        _ => eigenvalues(h).into_iter().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// All eigenvalues of a Hermitian matrix, ascending; each appears once.
pub fn eigenvalues(h: &[Vec<(f64, f64)>]) -> Vec<f64> {
    let k = h.len();
    let m = DMatrix::from_fn(2 * k, 2 * k, |r, c| {
        let (i, j) = (r % k, c % k);
        let (re, im) = h[i][j];
        match (r < k, c < k) {
            (true, true) | (false, false) => re,
            (true, false) => -im,
            (false, true) => im,
        }
    });
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    // The embedding doubles every eigenvalue.
    ev.into_iter().step_by(2).collect()
}

/// `L(m + M, M) ≤ t`, which has the law of `#(m, t) ≥ M`.
pub fn tasep_count_via_duality<R: Rng + ?Sized>(m: usize, t_time: f64, cfg: &LppConfig, rng: &mut R, m_probe: usize) -> Result<bool> {
    if m + m_probe == 0 {
        return Err(Error::InvalidParams("need m + M >= 1".into()));
    }
    if m_probe == 0 {
        return Ok(true);
    }
    let grid = LppConfig { n: m + m_probe, m: m_probe, spike_means: cfg.spike_means.clone(), seed: cfg.seed };
    Ok(lpp_sample(&grid, rng) <= t_time)
}

/// `#(m, t)` capped at `cap`, read off one LPP grid:
/// the largest `M ≤ cap` with `T(m + M, M) ≤ t`.
pub fn tasep_count_dual<R: Rng + ?Sized>(m: usize, t_time: f64, rates_means: &[f64], cap: usize, rng: &mut R) -> usize {
    let cols = m + cap;
    let mut row = vec![0.0f64; cols];
    let mut count = 0;
    for j in 1..=cap {
        let mut left = 0.0f64;
        for (i, cell) in row.iter_mut().enumerate() {
            *cell = cell.max(left) + exponential(rng, rates_means.get(i).copied().unwrap_or(1.0));
            left = *cell;
        }
        if row[m + j - 1] <= t_time {
            count = j;
        } else {
            break;
        }
    }
    count
}

/// Continuous-time TASEP from the step `x_j(0) = 1 − j`, `j = 1..P`. The
/// `i`-th jump of every particle has rate `1/ℓ_i` for `i ≤ r`, rate 1 after.
/// Returns positions at `t_end`.
pub fn tasep_event_sim<R: Rng + ?Sized>(num_particles: usize, rates_first_r_jumps: &[f64], t_end: f64, rng: &mut R) -> Vec<i64> {
    let mut x: Vec<i64> = (1..=num_particles as i64).map(|j| 1 - j).collect();
    let mut jumps = vec![0usize; num_particles];
    let rate = |n: usize| rates_first_r_jumps.get(n).map(|l| 1.0 / l).unwrap_or(1.0);
    let mut t = 0.0;
    let mut rates = vec![0.0f64; num_particles];
    loop {
        let mut total = 0.0;
        for j in 0..num_particles {
            let free = j == 0 || x[j - 1] - x[j] > 1;
            rates[j] = if free { rate(jumps[j]) } else { 0.0 };
            total += rates[j];
        }
        if total <= 0.0 {
            return x;
        }
        t += exponential(rng, 1.0 / total);
        if t > t_end {
            return x;
        }
        let mut pick = rng.gen::<f64>() * total;
        let mut chosen = num_particles - 1;
        for (j, r) in rates.iter().enumerate() {
            if pick < *r {
                chosen = j;
                break;
            }
            pick -= r;
        }
        while rates[chosen] == 0.0 {
            chosen -= 1;
        }
        x[chosen] += 1;
        jumps[chosen] += 1;
    }
}

/// `#(m, t)`: particles at positions `≥ m + 1`.
pub fn tasep_count(positions: &[i64], m: i64) -> usize {
    positions.iter().filter(|p| **p > m).count()
}

/// Hole count `H(m, t) = #(m, t) + m`.
pub fn tasep_hole_count(count: usize, m: usize) -> usize {
    count + m
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(samples: &[f64]) -> Self {
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        EmpiricalCdf { sorted }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|v| *v <= x) as f64 / self.sorted.len() as f64
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }
}

pub fn empirical_cdf(samples: &[f64]) -> EmpiricalCdf {
    EmpiricalCdf::new(samples)
}

/// One-sample Kolmogorov–Smirnov statistic `sup |F̂ − F|`.
pub fn ks_statistic(samples: &[f64], reference_cdf: impl Fn(f64) -> f64) -> f64 {
    let e = EmpiricalCdf::new(samples);
    let s = e.sorted.len() as f64;
    e.sorted
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let f = reference_cdf(*x);
            (f - i as f64 / s).abs().max(((i + 1) as f64 / s - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample statistic `sup |F̂_a − F̂_b|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (ea, eb) = (EmpiricalCdf::new(a), EmpiricalCdf::new(b));
    ea.sorted
        .iter()
        .chain(&eb.sorted)
        .map(|x| (ea.eval(*x) - eb.eval(*x)).abs())
        .fold(0.0, f64::max)
}

/// `F_k(x; w)` (`F_0` for empty `w`) tabulated on a grid and linearly interpolated; 0 below the
/// table and 1 far to the right.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    x0: f64,
    step: f64,
    values: Vec<f64>,
}

impl TabulatedCdf {
    pub fn fk(ws: &[f64], table: &PainleveTable, step: f64) -> Result<Self> {
        let spikes = if ws.is_empty() { None } else { Some(SpikeVector::new(ws.to_vec())?) };
        let x0 = table.x_min;
        let x1 = 12.0;
        let n = ((x1 - x0) / step).ceil() as usize + 1;
        let values = (0..n)
            .into_par_iter()
            .map(|i| {
                let x = x0 + i as f64 * step;
                match &spikes {
                    Some(s) => fk_determinant(x, s, table),
                    None => table.f0(x),
                }
                .map(|v| v.clamp(0.0, 1.0))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TabulatedCdf { x0, step, values })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let s = (x - self.x0) / self.step;
        if s <= 0.0 {
            return 0.0;
        }
        let i = s.floor() as usize;
        if i + 1 >= self.values.len() {
            return 1.0;
        }
        let fr = s - i as f64;
        self.values[i] * (1.0 - fr) + self.values[i + 1] * fr
    }
}

/// Draws `S` samples in parallel, sample `i` from stream `i`.
pub fn sample_streams<F>(seed: u64, count: usize, draw: F) -> Vec<f64>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| draw(&mut stream_rng(seed, i as u64)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub raw: Vec<f64>,
    pub samples: Vec<f64>,
    /// `(center, scale)` with `scaled = (raw/M − center)·scale`.
    pub scaling: Option<(f64, f64)>,
    pub seed: u64,
    pub streams: usize,
}

impl SimResult {
    /// Samples `L(N, M)` and scales each by `(L/M − center)·scale`.
    pub fn lpp(cfg: &LppConfig, count: usize, center: f64, scale: f64) -> Self {
        let raw = sample_streams(cfg.seed, count, |rng| lpp_sample(cfg, rng));
        let m = cfg.m as f64;
        let samples = raw.iter().map(|l| (l / m - center) * scale).collect();
        SimResult { raw, samples, scaling: Some((center, scale)), seed: cfg.seed, streams: count }
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# seed={} streams={}\nindex,raw,scaled\n", self.seed, self.streams);
        for (i, (r, s)) in self.raw.iter().zip(&self.samples).enumerate() {
            let _ = writeln!(out, "{i},{r:?},{s:?}");
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let perr = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
        let mut lines = text.lines().enumerate();
        let (_, head) = lines.next().ok_or_else(|| perr(1, "empty input"))?;
        let manifest = head
            .strip_prefix("# ")
            .ok_or_else(|| perr(1, "missing seed manifest"))?;
        let mut seed = None;
        let mut streams = None;
        for field in manifest.split_whitespace() {
            match field.split_once('=') {
                Some(("seed", v)) => seed = Some(v.parse::<u64>().map_err(|_| perr(1, "bad seed"))?),
                Some(("streams", v)) => streams = Some(v.parse::<usize>().map_err(|_| perr(1, "bad streams"))?),
                _ => return Err(perr(1, "unknown manifest field")),
            }
        }
        let (seed, streams) = match (seed, streams) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(perr(1, "incomplete manifest")),
        };
        match lines.next() {
            Some((_, "index,raw,scaled")) => {}
            _ => return Err(perr(2, "expected header index,raw,scaled")),
        }
        let mut raw = Vec::new();
        let mut samples = Vec::new();
        for (i, line) in lines {
            let no = i + 1;
            let mut parts = line.split(',');
            let (Some(idx), Some(r), Some(s), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
                return Err(perr(no, "expected three fields"));
            };
            if idx.parse::<usize>().ok() != Some(raw.len()) {
                return Err(perr(no, "index out of sequence"));
            }
            let r: f64 = r.parse().map_err(|_| perr(no, "bad raw value"))?;
            let s: f64 = s.parse().map_err(|_| perr(no, "bad scaled value"))?;
            if !r.is_finite() || !s.is_finite() {
                return Err(perr(no, "non-finite value"));
            }
            raw.push(r);
            samples.push(s);
        }
        Ok(SimResult { raw, samples, scaling: None, seed, streams })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_arithmetic() {
        assert_eq!(scale_null(4.0 * 8.0, 8, 1.0), 0.0);
        assert!((null_scaling(8, 1.0).1 - 2f64.powf(2.0 / 3.0)).abs() < 1e-14);
        let ms = bbp2_spike_means(1.0, 1000, &[0.0, 1.0]).unwrap();
        assert_eq!(ms[0], 2.0);
        assert!((ms[1] - (2.0 - 2f64.powf(1.5) / 10.0)).abs() < 1e-14);
        assert!(bbp2_spike_means(1.0, 1, &[5.0]).is_err());
        let (c, _) = supercritical_scaling(100, 1.0, 3.0).unwrap();
        assert_eq!(c, 4.5);
        assert_eq!(scale_supercritical(450.0, 100, 1.0, 3.0).unwrap(), 0.0);
        assert!(supercritical_scaling(100, 1.0, 1.5).is_err());
    }

    #[test]
    fn small_grids() {
        let cfg = LppConfig::new(2, 2, vec![], 1).unwrap();
        let s = sample_streams(1, 100_000, |r| lpp_sample(&cfg, r));
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        assert!((mean / 3.5 - 1.0).abs() < 0.02, "{mean}");
        let one = LppConfig::new(1, 2, vec![1.0], 2).unwrap();
        let s = sample_streams(2, 100_000, |r| lpp_sample(&one, r));
        assert!((s.iter().sum::<f64>() / 1e5 / 2.0 - 1.0).abs() < 0.02);
    }

    #[test]
    fn gue_two_by_two_and_trace() {
        let mut rng = stream_rng(3, 0);
        for _ in 0..50 {
            let h = gue_matrix(2, &mut rng);
            let ev = eigenvalues(&h);
            assert!((hermitian_max_eigenvalue(&h) - ev[1]).abs() < 1e-12);
            let h3 = gue_matrix(3, &mut rng);
            let tr: f64 = (0..3).map(|i| h3[i][i].0).sum();
            assert!((eigenvalues(&h3).iter().sum::<f64>() - tr).abs() < 1e-10);
        }
    }

    #[test]
    fn ks_single_sample() {
        let ks = ks_statistic(&[0.3], |x| x.clamp(0.0, 1.0));
        assert!((ks - 0.7).abs() < 1e-15);
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
    }

    #[test]
    fn csv_roundtrip() {
        let cfg = LppConfig::new(3, 4, vec![2.0], 9).unwrap();
        let r = SimResult::lpp(&cfg, 5, 1.0, 0.5);
        let back = SimResult::parse_csv(&r.to_csv()).unwrap();
        assert_eq!(back.raw, r.raw);
        assert_eq!(back.samples, r.samples);
        assert_eq!((back.seed, back.streams), (9, 5));
        assert!(SimResult::parse_csv("# seed=1 streams=1\nindex,raw,scaled\n1,2,3\n").is_err());
    }
}
