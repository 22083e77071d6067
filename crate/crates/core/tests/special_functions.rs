use prmt_core::special_functions::*;
use proptest::prelude::*;

fn distinct(ws: &[f64], gap: f64) -> bool {
    ws.iter().enumerate().all(|(i, a)| ws[i + 1..].iter().all(|b| (a - b).abs() > gap))
}

#[test]
fn airy_reference_values() {
    // Reference digits from an arbitrary-precision evaluation.
    let cases = [
        (-10.0, 0.04024123848644319, 0.9962650441327901),
        (-3.5, -0.3755338231404319, -0.34344343345404815),
        (0.5, 0.23169360648083349, -0.2249105326646839),
        (4.0, 0.0009515638512048019, -0.0019586409502041789),
    ];
    for (u, ai, aip) in cases {
        let (a, ap) = airy(u);
        assert!((a - ai).abs() <= 1e-13 * ai.abs().max(1e-3), "Ai({u}) = {a}");
        assert!((ap - aip).abs() <= 1e-13 * aip.abs().max(1e-3), "Ai'({u}) = {ap}");
    }
}

#[test]
fn airy_wronskian_with_ode() {
    // Ai satisfies Ai'' = u Ai; integrate u Ai against Ai' by Simpson.
    let (a, b) = (-4.0, 3.0);
    let n = 2000;
    let h = (b - a) / n as f64;
    let mut s = 0.0;
    for i in 0..=n {
        let u = a + i as f64 * h;
        let wgt = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        s += wgt * u * airy_ai(u);
    }
    s *= h / 3.0;
    assert!((s - (airy_ai_prime(b) - airy_ai_prime(a))).abs() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_is_symmetric(u in -8.0f64..8.0, v in -8.0f64..8.0) {
        prop_assert_eq!(airy_kernel(u, v), airy_kernel(v, u));
    }

    #[test]
    fn kernel_continuous_at_diagonal_switch(u in -6.0f64..6.0) {
        let inside = airy_kernel(u, u + 0.999 * DIAG_SWITCH);
        let outside = airy_kernel(u, u + 1.001 * DIAG_SWITCH);
        prop_assert!((inside - outside).abs() <= 1e-9);
    }

    #[test]
    fn partial_fraction_delta_identity(ws in prop::collection::vec(-1.0f64..1.0, 4)) {
        prop_assume!(distinct(&ws, 0.05));
        for n in 1..=4usize {
            for m in n..=4usize {
                let s: f64 = partial_fraction_weights(&ws[n - 1..m]).unwrap().iter().sum();
                let expect = if m == n { 1.0 } else { 0.0 };
                prop_assert!((s - expect).abs() <= 1e-10, "n={} m={} s={}", n, m, s);
            }
        }
    }

    #[test]
    fn cauchy_airy_ode(u in -3.0f64..3.0, w in -2.5f64..2.5) {
        prop_assume!(w.abs() > 0.05);
        let h = 1e-4;
        let d = (cauchy_airy(u + h, w).unwrap() - cauchy_airy(u - h, w).unwrap()) / (2.0 * h);
        let c = cauchy_airy(u, w).unwrap();
        // d/du C_w(u) = Ai(u) − w C_w(u).
        prop_assert!((d - (airy_ai(u) - w * c)).abs() <= 1e-6 * (1.0 + c.abs()));
    }
}
