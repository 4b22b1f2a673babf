use proptest::prelude::*;

use superlog_ckn::corpus::{self, CorpusConfig};
use superlog_ckn::functionals::{norm_term, norm_term_potential, quotient, QuotientSpec};
use superlog_ckn::rearrangement::{rearrange, rearrange_with, AdmissibleDensity, RadialProfile, RearrangeTol};
use superlog_ckn::superlog::SuperLog;
use superlog_ckn::varopt::{minimize_quotient, near_extremal_line, Budget};
use superlog_ckn::weight::{WeightClass, WeightSpec};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

// One cell of the family matrix: (poly-log?, k, α).
fn weight_cell() -> impl Strategy<Value = WeightSpec> {
    (any::<bool>(), 0u32..3, prop::sample::select(vec![-1.0, 0.0, 0.5, 1.0, 2.0]), 0.5f64..3.0).prop_map(
        |(poly, k, alpha, eta)| {
            if poly {
                let k = k % 2 + 1;
                let r_big = if alpha == 1.0 && k == 2 { 1e300 } else { 100.0 };
                WeightSpec::poly_log(k, alpha, r_big, eta).unwrap()
            } else {
                WeightSpec::super_log_base(k, alpha, 3.0, eta).unwrap()
            }
        },
    )
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn tower_fixed_points(a in 2.0f64..20.0, k in 0usize..6) {
        let s = SuperLog::with_base(a).unwrap();
        prop_assert!(rel(s.f_map(a).unwrap(), a) < 1e-15);
        prop_assert!(rel(s.f_iter(k, a).unwrap(), a) < 1e-14);
        prop_assert!(rel(s.f_tilde(a).unwrap().value, a) < 1e-12);
        prop_assert!(rel(s.phi(a).unwrap(), a) < 1e-12);
        prop_assert_eq!(s.super_log(1.0).unwrap(), 0.0);
    }

    #[test]
    fn product_matches_v_form(a in 2.0f64..5.0, lu in 0.0f64..1.0) {
        let s = SuperLog::with_base(a).unwrap();
        let u = a * (1e6 / a).powf(lu);
        let p = s.params();
        let ft = s.f_tilde(u).unwrap().value;
        prop_assert!(rel(ft, s.v_form(u).unwrap().exp()) <= 2.0 * (p.product_tol + p.quad_tol));
    }

    #[test]
    fn super_log_is_concave(a in 2.0f64..6.0, x1 in 0.0f64..30.0, dx in 0.01f64..5.0, w in 0.05f64..0.95) {
        let s = SuperLog::with_base(a).unwrap();
        let (r1, r3) = (x1.exp(), (x1 + dx).exp());
        let r2 = r1 + w * (r3 - r1);
        let chord = (1.0 - w) * s.super_log(r1).unwrap() + w * s.super_log(r3).unwrap();
        prop_assert!(s.super_log(r2).unwrap() >= chord - 1e-12 * chord.abs().max(1.0));
        // φ on [a, ∞).
        let (u1, u3) = (a * r1, a * r3);
        let u2 = u1 + w * (u3 - u1);
        let chord = (1.0 - w) * s.phi(u1).unwrap() + w * s.phi(u3).unwrap();
        prop_assert!(s.phi(u2).unwrap() >= chord - 1e-12 * chord.abs());
    }

    #[test]
    fn super_log_is_concave_across_one(a in 2.0f64..6.0, x1 in -5.0f64..-1e-3, x3 in 1e-3f64..5.0, w in 0.05f64..0.95) {
        let s = SuperLog::with_base(a).unwrap();
        let (r1, r3) = (x1.exp(), x3.exp());
        let r2 = r1 + w * (r3 - r1);
        let chord = (1.0 - w) * s.super_log(r1).unwrap() + w * s.super_log(r3).unwrap();
        prop_assert!(s.super_log(r2).unwrap() >= chord - 1e-12);
    }

    #[test]
    fn sandwich_and_reflection(a in 2.0f64..6.0, lr in 0.0f64..40.0) {
        let s = SuperLog::with_base(a).unwrap();
        let r = a.exp() * lr.exp();
        let (l, le) = (s.super_log(r).unwrap(), s.super_log_ln(r).unwrap());
        prop_assert!(l <= le && le <= (1.0 + a) * l);
        prop_assert!(rel(s.super_log(1.0 / r).unwrap(), -l) < 1e-14);
    }

    #[test]
    fn derivative_identities(a in 2.0f64..6.0, k in 0usize..4, lr in 0.5f64..20.0) {
        let s = SuperLog::with_base(a).unwrap();
        let r = lr.exp();
        let h = 1e-4 * r;
        let fd = (s.a1(k, r + h).unwrap() - s.a1(k, r - h).unwrap()) / (2.0 * h);
        let d = s.da1(k, r).unwrap();
        prop_assert!(rel(fd, d) < 1e-6, "A¹_{} at {}: {} vs {}", k, r, fd, d);
        let fd = (s.b0(r + h).unwrap().value - s.b0(r - h).unwrap().value) / (2.0 * h);
        prop_assert!(rel(fd, s.db0(r).unwrap()) < 1e-6);
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn potentials_are_monotone(w in weight_cell(), s1 in 0.0f64..50.0, ds in 1e-3f64..50.0) {
        let (f1, f2) = (w.f_sigma(s1).unwrap(), w.f_sigma(s1 + ds).unwrap());
        match w.classify().unwrap() {
            WeightClass::P => prop_assert!(f2 > f1),
            WeightClass::Q => prop_assert!(f2 < f1),
        }
        let rho = w.rho_grid_from_depths(&[s1, s1 + ds]).unwrap();
        prop_assert!(w.rho_map_sigma(rho[0]).unwrap() <= w.rho_map_sigma(rho[1]).unwrap() + 1e-9
            || w.classify().unwrap() == WeightClass::Q);
    }

    #[test]
    fn h_product_and_ndc(w in weight_cell(), ls in -6.0f64..6.0) {
        let s = 10f64.powf(ls);
        let h = w.h_sigma(s).unwrap();
        prop_assert!(rel(w.h_product_sigma(s).unwrap(), h) < 1e-8);
        let bound = w.ndc_analytic_bound().unwrap().unwrap();
        prop_assert!(bound <= h * (1.0 + 1e-9));
    }

    #[test]
    fn mu_is_the_potential_at_eta(w in weight_cell()) {
        if w.classify().unwrap() == WeightClass::P {
            prop_assert_eq!(w.f_eta(w.eta()).unwrap(), w.mu().unwrap().unwrap());
        }
    }
}

fn hardy_weight() -> impl Strategy<Value = WeightSpec> {
    prop::sample::select(vec![
        WeightSpec::poly_log(1, 0.0, 10.0, 1.0).unwrap(),
        WeightSpec::poly_log(1, 1.0, 100.0, 1.0).unwrap(),
        WeightSpec::super_log_base(0, 1.0, 3.0, 1.0).unwrap(),
        WeightSpec::super_log_base(1, 0.5, 3.0, 1.0).unwrap(),
    ])
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn quotient_scale_invariance(w in hardy_weight(), i in 0usize..200, c in 1e-3f64..1e3, p in 1.5f64..3.5) {
        let spec = QuotientSpec::general(2, p, p, w.clone()).unwrap();
        let u = corpus::entry(&CorpusConfig::default(), 1.0, Some(&w), i).unwrap().profile;
        let (a, b) = (quotient(&spec, &u).unwrap().quotient, quotient(&spec, &u.scaled(c)).unwrap().quotient);
        prop_assert!(rel(a, b) < 1e-12);
        prop_assert!(a >= (1.0 - 1.0 / p).powf(p) - 1e-3);
    }

    #[test]
    fn norm_substitution_consistency(w in hardy_weight(), i in 0usize..200, dq in 0.0f64..2.0) {
        let spec = QuotientSpec::general(2, 2.0, 2.0 + dq, w.clone()).unwrap();
        let u = corpus::entry(&CorpusConfig::default(), 1.0, Some(&w), i).unwrap().profile;
        prop_assert!(rel(norm_term(&spec, &u).unwrap(), norm_term_potential(&spec, &u).unwrap()) < 1e-8);
    }

    #[test]
    fn rearrangement_is_monotone_and_equimeasurable(i in 0usize..200, e in -1.9f64..0.0, n in 2u32..4) {
        let g = AdmissibleDensity::power(n, 1.0, e).unwrap();
        let u = corpus::entry(&CorpusConfig::default(), 1.0, None, i).unwrap().profile;
        let ru = rearrange(&g, &u).unwrap();
        prop_assert!(ru.is_non_increasing());
        let top = u.max_abs();
        for k in 0..16 {
            let t = top * (k as f64 + 0.5) / 16.0;
            prop_assert!(rel(g.distribution(&u, t), g.distribution(&ru, t)) <= 1e-6);
        }
        // Idempotence, on a coarse first pass so the second one stays cheap.
        let coarse = rearrange_with(&g, &u, RearrangeTol { value: 1e-4, measure: 1e-3, ..RearrangeTol::default() }).unwrap();
        let again = rearrange(&g, &coarse).unwrap();
        for &x in coarse.log_radii() {
            prop_assert!((again.value_at_ln(x) - coarse.value_at_ln(x)).abs() <= 1e-7 * top);
        }
    }
}

proptest! {
    #![proptest_config(config(6))]

    #[test]
    fn search_is_deterministic_and_monotone(i in 0usize..50, seed in 0u64..1000) {
        let w = WeightSpec::poly_log(1, 0.0, 10.0, 1.0).unwrap();
        let spec = QuotientSpec::general(1, 2.0, 2.0, w.clone()).unwrap();
        let u = corpus::entry(&CorpusConfig { max_nodes: 20, ..CorpusConfig::default() }, 1.0, Some(&w), i).unwrap().profile;
        let init = RadialProfile::from_log_radii(u.log_radii().to_vec(), u.values().iter().map(|v| v.abs()).collect()).unwrap();
        let b = Budget { max_sweeps: 8, seed, jitter: 0.05, ..Budget::default() };
        let (e1, e2) = (minimize_quotient(&spec, &init, &b).unwrap(), minimize_quotient(&spec, &init, &b).unwrap());
        prop_assert_eq!(&e1.trace, &e2.trace);
        prop_assert!(e1.trace.windows(2).all(|t| t[1] <= t[0] * (1.0 + 1e-12)));
        prop_assert!(e1.value >= 0.25 - 1e-3);
    }
}

#[test]
fn near_extremal_ladder_descends_to_hardy() {
    let spec = QuotientSpec::general(1, 2.0, 2.0, WeightSpec::poly_log(1, 0.0, 10.0, 1.0).unwrap()).unwrap();
    let ladder: Vec<f64> = [10.0, 50.0, 250.0]
        .iter()
        .map(|&ramp| near_extremal_line(&spec, 0.49, 20.0 * ramp, ramp, 4001).unwrap())
        .collect();
    assert!(ladder.windows(2).all(|w| w[1] < w[0]), "{ladder:?}");
    assert!(ladder.iter().all(|&q| q >= 0.25 - 1e-9), "{ladder:?}");
}
