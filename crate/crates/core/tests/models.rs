use prmt_core::models::*;
use prmt_core::painleve::default_table;
use proptest::prelude::*;
use rand::Rng;

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

#[test]
fn single_cell_is_exponential() {
    let cfg = LppConfig::new(1, 1, vec![2.5], 4).unwrap();
    let s = sample_streams(4, 100_000, |r| lpp_sample(&cfg, r));
    assert!((mean(&s) / 2.5 - 1.0).abs() < 0.02);
}

#[test]
fn lpp_rejects_bad_configs() {
    assert!(LppConfig::new(0, 3, vec![], 1).is_err());
    assert!(LppConfig::new(2, 3, vec![1.0, 1.0, 1.0], 1).is_err());
    assert!(LppConfig::new(2, 3, vec![0.0], 1).is_err());
}

#[test]
fn duality_single_jump() {
    let cfg = LppConfig::new(1, 1, vec![], 0).unwrap();
    let hits = sample_streams(5, 100_000, |r| tasep_count_via_duality(0, 1.0, &cfg, r, 1).unwrap() as u8 as f64);
    assert!((mean(&hits) - (1.0 - (-1f64).exp())).abs() < 0.01);
}

#[test]
fn single_particle_is_poisson() {
    let pos = sample_streams(6, 100_000, |r| tasep_event_sim(1, &[], 5.0, r)[0] as f64);
    assert!((mean(&pos) / 5.0 - 1.0).abs() < 0.01);
}

#[test]
fn exclusion_preserved() {
    let mut rng = stream_rng(7, 0);
    for t in [0.5, 2.0, 8.0] {
        let x = tasep_event_sim(12, &[2.0, 1.5], t, &mut rng);
        assert!(x.windows(2).all(|p| p[0] > p[1]), "{x:?}");
    }
    assert_eq!(tasep_hole_count(3, 2), 5);
}

#[test]
fn tasep_event_sim_matches_duality() {
    let a = sample_streams(8, 10_000, |r| tasep_count(&tasep_event_sim(6, &[], 6.0, r), 2) as f64);
    let b = sample_streams(9, 10_000, |r| tasep_count_dual(2, 6.0, &[], 6, r) as f64);
    assert!(ks_two_sample(&a, &b) <= 0.02);
    // The indicator #(2, 6) ≥ 3 from the single-probe route.
    let cfg = LppConfig::new(1, 1, vec![], 0).unwrap();
    let c = sample_streams(10, 10_000, |r| tasep_count_via_duality(2, 6.0, &cfg, r, 3).unwrap() as u8 as f64);
    let ind: Vec<f64> = a.iter().map(|v| (*v >= 3.0) as u8 as f64).collect();
    assert!(ks_two_sample(&ind, &c) <= 0.02);
}

#[test]
fn slow_start_duality() {
    let rates = [2.0, 1.5];
    let a = sample_streams(11, 10_000, |r| tasep_count(&tasep_event_sim(5, &rates, 4.0, r), 1) as f64);
    let b = sample_streams(12, 10_000, |r| tasep_count_dual(1, 4.0, &rates, 5, r) as f64);
    assert!(ks_two_sample(&a, &b) <= 0.02);
}

#[test]
fn spike_permutation_exchangeable() {
    let a = LppConfig::new(6, 8, vec![2.0, 0.5, 1.3], 1).unwrap();
    let b = LppConfig::new(6, 8, vec![1.3, 2.0, 0.5], 1).unwrap();
    let sa = sample_streams(13, 10_000, |r| lpp_sample(&a, r));
    let sb = sample_streams(14, 10_000, |r| lpp_sample(&b, r));
    assert!(ks_two_sample(&sa, &sb) <= 0.02);
}

#[test]
fn reproducible_across_thread_counts() {
    let cfg = LppConfig::new(20, 30, vec![1.7], 99).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| SimResult::lpp(&cfg, 200, 1.0, 1.0))
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a, b);
    assert_eq!(a.to_csv(), b.to_csv());
}

#[test]
fn ks_against_own_reference() {
    // Inverse-transform draws from a tabulated F_0.
    let table = default_table().unwrap();
    let f0 = TabulatedCdf::fk(&[], table, 0.01).unwrap();
    let inv = |u: f64| {
        let (mut lo, mut hi) = (-12.0, 12.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if f0.eval(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let s = sample_streams(15, 10_000, |r| inv(r.gen::<f64>()));
    assert!(ks_statistic(&s, |x| f0.eval(x)) <= 1.63 / 100.0);
}

#[test]
fn gue_one_by_one_is_gaussian() {
    let s = sample_streams(16, 20_000, |r| gue_max_sample(1, r).unwrap());
    let normal = |x: f64| 0.5 * (1.0 + libm::erf(x / std::f64::consts::SQRT_2));
    assert!(ks_statistic(&s, normal) <= 0.015);
    assert!(gue_max_sample(9, &mut stream_rng(1, 1)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn increasing_a_cell_never_decreases_lpp(
        cells in prop::collection::vec(0.0f64..3.0, 9),
        which in 0usize..9,
        bump in 0.0f64..2.0,
    ) {
        let grid = |c: &[f64]| vec![c[0..3].to_vec(), c[3..6].to_vec(), c[6..9].to_vec()];
        let base = lpp_from_weights(&grid(&cells));
        let mut more = cells.clone();
        more[which] += bump;
        prop_assert!(lpp_from_weights(&grid(&more)) >= base);
    }

    #[test]
    fn empirical_cdf_is_monotone_step(samples in prop::collection::vec(-5.0f64..5.0, 1..50), x in -6.0f64..6.0) {
        let e = empirical_cdf(&samples);
        prop_assert!(e.eval(x) <= e.eval(x + 0.5));
        prop_assert_eq!(e.eval(6.0), 1.0);
    }
}
