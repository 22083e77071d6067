//! Identity suites behind `prmt verify`.

use num_complex::Complex64;
use prmt_core::fredholm::{self, SpikeVector};
use prmt_core::models::stream_rng;
use prmt_core::opuc::{self, LaurentSymbol};
use prmt_core::painleve;
use rand::Rng;

use crate::{Context, Failure, Suite};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub pass: bool,
    pub max_err: f64,
}

fn within(name: &'static str, errs: &[(f64, f64)]) -> SuiteResult {
    let pass = errs.iter().all(|(e, tol)| e <= tol);
    let max_err = errs.iter().map(|(e, _)| *e).fold(0.0, f64::max);
    SuiteResult { name, pass, max_err }
}

pub fn run_suite(suite: Suite, trials: usize, seed: u64, ctx: &Context) -> Result<SuiteResult, Failure> {
    let table = ctx.table.as_ref();
    let real = |w: f64| Complex64::new(w, 0.0);
    match suite {
        Suite::Thm11 => {
            let mut rng = stream_rng(seed, 0);
            let mut worst: f64 = 0.0;
            for k in 1..=3usize {
                let mut drawn = 0;
                while drawn < trials {
                    let ws: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    if !ws.iter().enumerate().all(|(i, a)| ws[i + 1..].iter().all(|b| (a - b).abs() > 0.05)) {
                        continue;
                    }
                    drawn += 1;
                    let s = SpikeVector::new(ws)?;
                    for x in [-1.0, 0.0, 1.0] {
                        let lhs = fredholm::fk_definition_with(x, &s, &ctx.disc)?;
                        let rhs = fredholm::fk_determinant(x, &s, table)?;
                        worst = worst.max((lhs - rhs).abs());
                    }
                }
            }
            Ok(within("thm11", &[(worst, 1e-6)]))
        }
        Suite::Thm12 => {
            let mut worst: f64 = 0.0;
            for x in [-4.0, -2.0, 0.0, 2.0] {
                for w in [-1.5, -0.5, 0.0, 0.5, 1.5] {
                    let a = fredholm::fg_fredholm_with(x, w, &ctx.disc)?.0;
                    let b = painleve::lax_propagate_w(x, real(w), table)?.f.re;
                    worst = worst.max((a - b).abs());
                }
            }
            Ok(within("thm12", &[(worst, 1e-6)]))
        }
        Suite::Lemma => {
            let (mut reality, mut e_diff, mut refl, mut lax) = (0f64, 0f64, 0f64, 0f64);
            let h = 1e-4;
            for x in [-3.0, -1.0, 0.0, 1.5] {
                e_diff = e_diff.max((fredholm::fg_fredholm_with(x, 0.0, &ctx.disc)?.0 - table.e_at(x)?).abs());
                let u = table.point(x)?.u;
                for w in [-1.2, -0.4, 0.6, 1.3] {
                    let s = painleve::lax_propagate_w(x, real(w), table)?;
                    reality = reality.max(s.f.im.abs()).max(s.g.im.abs());
                    let g_neg = painleve::lax_propagate_w(x, real(-w), table)?.g.re;
                    refl = refl.max((s.f.re + (w.powi(3) / 3.0 - x * w).exp() * g_neg).abs());
                    let (f, g) = fredholm::fg_fredholm_with(x, w, &ctx.disc)?;
                    let (fp, gp) = fredholm::fg_fredholm_with(x + h, w, &ctx.disc)?;
                    let (fm, gm) = fredholm::fg_fredholm_with(x - h, w, &ctx.disc)?;
                    lax = lax.max(((fp - fm) / (2.0 * h) - u * g).abs());
                    lax = lax.max(((gp - gm) / (2.0 * h) - u * f + w * g).abs());
                }
            }
            let lo = fredholm::fg_fredholm_with(0.0, -5.0, &ctx.disc)?.0.abs();
            let hi = (1.0 - fredholm::fg_fredholm_with(0.0, 5.0, &ctx.disc)?.0).abs();
            let w: f64 = -4.0;
            let mut erf_err: f64 = 0.0;
            for y in [-1.0f64, 0.0, 1.0] {
                let f = fredholm::fg_fredholm_with(y * w.abs().sqrt() + w * w, w, &ctx.disc)?.0;
                erf_err = erf_err.max((f - 0.5 * (1.0 + libm::erf(y / std::f64::consts::SQRT_2))).abs());
            }
            Ok(within(
                "lemma",
                &[(reality, 1e-10), (e_diff, 1e-7), (refl, 1e-6), (lax, 1e-4), (lo.max(hi), 1e-2), (erf_err, 0.02)],
            ))
        }
        Suite::Opuc => {
            let s = LaurentSymbol::gross_witten(1.0)?;
            let mut worst: f64 = 0.0;
            for n in [2usize, 5, 10] {
                let z = Complex64::new(0.3, 0.2);
                worst = worst.max((opuc::pi_star_operator(&s, n, z, 60)? - opuc::pi_star_toeplitz(&s, n, z)).norm());
                let zo = Complex64::new(1.5, -0.4);
                worst = worst.max((opuc::pi_operator(&s, n, zo, 60)? - opuc::pi_toeplitz(&s, n, zo)).norm());
            }
            Ok(within("opuc", &[(worst, 1e-10)]))
        }
        Suite::Gcbo => {
            let s = LaurentSymbol::gross_witten(1.0)?;
            let mut worst: f64 = 0.0;
            for n in [1usize, 4, 8] {
                let (l, r) = opuc::gcbo_check(&s, n, 60)?;
                worst = worst.max((l - r).norm());
            }
            Ok(within("gcbo", &[(worst, 1e-11)]))
        }
        Suite::Scaling => {
            let mut pass = true;
            let mut last: f64 = 0.0;
            for w in [-0.5, 0.0, 0.5] {
                let mut errs = Vec::new();
                for t in [50.0, 100.0, 200.0] {
                    let (l, f) = opuc::scaling_probe(t, 0.0, w, table)?;
                    errs.push((l - f).abs());
                }
                pass &= errs[0] > errs[1] && errs[1] > errs[2] && errs[2] <= 0.05;
                last = last.max(errs[2]);
            }
            Ok(SuiteResult { name: "scaling", pass, max_err: last })
        }
        Suite::All => Err(Failure::usage("`all` is expanded by the caller")),
    }
}
