use num_complex::Complex64;
use prmt_core::painleve::*;
use prmt_core::Error;
use proptest::prelude::*;

fn table() -> &'static PainleveTable {
    default_table().unwrap()
}

#[test]
fn pii_residual_at_nodes() {
    let t = table();
    let h = 1e-3;
    for (i, &x) in t.grid.iter().enumerate().skip(1).step_by(7) {
        if x + h > t.x_max {
            break;
        }
        let jet = t.u_jet(x, 3).unwrap();
        let upp = 2.0 * jet[2];
        let r = upp - 2.0 * t.u[i].powi(3) - x * t.u[i];
        assert!(r.abs() <= 1e-8, "x={x} r={r}");
    }
}

#[test]
fn table_identities() {
    let t = table();
    let h = 1e-4;
    for x in [-10.0, -5.5, -1.0, 0.0, 3.0, 7.0] {
        let p = t.point(x).unwrap();
        let ep = (t.e_at(x + h).unwrap() - t.e_at(x - h).unwrap()) / (2.0 * h);
        assert!((ep + p.u * p.e).abs() <= 1e-8, "E' at {x}");
        let vp = (t.point(x + h).unwrap().v - t.point(x - h).unwrap().v) / (2.0 * h);
        assert!((vp - p.u * p.u).abs() <= 1e-8, "v' at {x}");
    }
}

#[test]
fn real_w_gives_real_solution() {
    let t = table();
    for x in [-4.0, 0.0, 2.0] {
        for w in [-2.0, -0.3, 0.7, 2.5] {
            let s = lax_propagate_w(x, Complex64::new(w, 0.0), t).unwrap();
            assert!(s.f.im.abs() <= 1e-10 && s.g.im.abs() <= 1e-10);
        }
    }
}

#[test]
fn x_path_and_w_path_agree() {
    let t = table();
    for x in [-4.0, -2.0, 0.0, 1.0, 3.0] {
        for w in [-1.5, -0.5, 0.0, 0.5, 1.5] {
            let wc = Complex64::new(w, 0.0);
            let start = lax_propagate_w(4.0, wc, t).unwrap();
            let via_x = lax_propagate_x(4.0, x, wc, start, t).unwrap();
            let via_w = lax_propagate_w(x, wc, t).unwrap();
            assert!((via_x.f - via_w.f).norm() <= 1e-8, "x={x} w={w}");
            assert!((via_x.g - via_w.g).norm() <= 1e-8, "x={x} w={w}");
        }
    }
}

#[test]
fn f_vanishes_for_very_negative_w() {
    let f = lax_propagate_w(0.0, Complex64::new(-5.0, 0.0), table()).unwrap().f.re;
    assert!(f.abs() <= 1e-2, "{f}");
}

#[test]
fn closed_forms_vs_small_spikes() {
    use prmt_core::fredholm::{fk_determinant, SpikeVector};
    let t = table();
    for x in [-2.0, 0.0, 1.5] {
        let f2 = fk_closed_form(2, x, t).unwrap();
        let near = fk_determinant(x, &SpikeVector::new(vec![1e-3, -1e-3]).unwrap(), t).unwrap();
        assert!((f2 - near).abs() <= 1e-5);
    }
}

#[test]
fn parse_rejects_malformed_dumps() {
    let t = table();
    let text = t.dump();
    assert!(PainleveTable::parse(&text).is_ok());
    assert!(matches!(PainleveTable::parse(""), Err(Error::Parse { .. })));
    let bad_header = text.replacen("# painleve-hm", "# something", 1);
    assert!(matches!(PainleveTable::parse(&bad_header), Err(Error::Parse { .. })));
    let truncated: String = text.lines().take(text.lines().count() - 3).collect::<Vec<_>>().join("\n");
    assert!(PainleveTable::parse(&truncated).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn reflection_identity(x in -5.0f64..4.0, w in -2.0f64..2.0) {
        let t = table();
        let f = lax_propagate_w(x, Complex64::new(w, 0.0), t).unwrap().f.re;
        let g = lax_propagate_w(x, Complex64::new(-w, 0.0), t).unwrap().g.re;
        let r = f + (w.powi(3) / 3.0 - x * w).exp() * g;
        prop_assert!(r.abs() <= 1e-6 * (1.0 + f.abs()), "x={} w={} r={}", x, w, r);
    }

    #[test]
    fn f0_between_zero_and_one(x in -12.0f64..10.0) {
        let v = table().f0(x).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
    }
}
