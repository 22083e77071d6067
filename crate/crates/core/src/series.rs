//! Truncated power series helpers used by the Taylor-jet integrators.

use std::ops::{Add, Mul};

/// Coefficient `k` of the Cauchy product of `a` and `b`.
pub fn product_coeff<T>(a: &[T], b: &[T], k: usize) -> T
where
    T: Copy + Default + Add<Output = T> + Mul<Output = T>,
{
    let mut acc = T::default();
    for i in 0..=k {
        acc = acc + a[i] * b[k - i];
    }
    acc
}

/// Evaluates `Σ c_k h^k`.
pub fn eval<T>(c: &[T], h: f64) -> T
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
{
    c.iter().rev().fold(T::default(), |acc, &a| acc * h + a)
}

/// Evaluates the derivative `Σ k c_k h^{k-1}`.
pub fn eval_deriv<T>(c: &[T], h: f64) -> T
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
{
    let mut acc = T::default();
    for k in (1..c.len()).rev() {
        acc = acc * h + c[k] * k as f64;
    }
    acc
}

/// Antiderivative coefficients with constant term `c0`.
pub fn integrate(c: &[f64], c0: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(c.len() + 1);
    out.push(c0);
    for (k, &a) in c.iter().enumerate() {
        out.push(a / (k + 1) as f64);
    }
    out
}

pub fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_series_roundtrip() {
        let c: Vec<f64> = (0..25).map(|k| 1.0 / factorial(k)).collect();
        assert!((eval(&c, 0.5) - 0.5f64.exp()).abs() < 1e-15);
        assert!((eval_deriv(&c, 0.5) - 0.5f64.exp()).abs() < 1e-15);
        let sq: Vec<f64> = (0..25).map(|k| product_coeff(&c, &c, k)).collect();
        assert!((eval(&sq, 0.25) - 0.5f64.exp()).abs() < 1e-15);
        let int = integrate(&c, 1.0);
        assert!((eval(&int, 0.3) - 0.3f64.exp()).abs() < 1e-15);
        assert_eq!(binomial(5, 2), 10.0);
    }
}
