use std::f64::consts::PI;

use num_complex::Complex64 as C;
use proptest::prelude::*;

use pathnoise::lbl::{q_adjoint, q_apply};
use pathnoise::{
    gamma_decompose, inverse_ztransform, sigma_of, ztransform, Band, FirPredictor, LblProjector, Modulate,
    OneSidedSequence, TwoSidedSequence,
};

fn complex() -> impl Strategy<Value = C> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| C::new(a, b))
}

fn two_sided(max_len: usize) -> impl Strategy<Value = TwoSidedSequence> {
    (-10..10i64, prop::collection::vec(complex(), 1..=max_len))
        .prop_map(|(t, v)| TwoSidedSequence::new(t, v).unwrap())
}

/// Sequences with one dominant sample, so the spectrum stays away from zero.
fn nonvanishing() -> impl Strategy<Value = TwoSidedSequence> {
    (two_sided(17), 0usize..17, -PI..PI).prop_map(|(x, lead, phase)| {
        let lead = lead % x.len();
        let small = 0.9 / (x.l1() + 1.0);
        TwoSidedSequence::new(
            x.t_min(),
            x.values().iter().enumerate().map(|(i, &v)| if i == lead { C::from_polar(2.0, phase) } else { v * small }).collect(),
        )
        .unwrap()
    })
}

fn band() -> impl Strategy<Value = Band> {
    (-PI..PI, 0.1..3.0f64).prop_map(|(c, w)| Band::new(c, w).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval_on_the_grid(x in two_sided(40)) {
        let g = ztransform(&x, 64).unwrap();
        let lhs = g.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / 64.0;
        let rhs = x.l2().powi(2);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1e-300));
    }

    #[test]
    fn round_trip(x in two_sided(30)) {
        let back = inverse_ztransform(&ztransform(&x, 64).unwrap(), x.t_min(), x.t_max()).unwrap();
        prop_assert!(back.combine(C::new(1.0, 0.0), &x, C::new(-1.0, 0.0)).linf() <= 1e-10 * (1.0 + x.linf()));
    }

    #[test]
    fn ztransform_is_linear(x in two_sided(12), y in two_sided(12), a in complex(), b in complex()) {
        let lhs = ztransform(&x.combine(a, &y, b), 128).unwrap();
        let (gx, gy) = (ztransform(&x, 128).unwrap(), ztransform(&y, 128).unwrap());
        let scale = 1.0 + a.norm() * x.l1() + b.norm() * y.l1();
        for ((l, u), v) in lhs.values().iter().zip(gx.values()).zip(gy.values()) {
            prop_assert!((l - (a * u + b * v)).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn modulation_is_an_isometry(x in two_sided(30), w in -PI..PI) {
        prop_assert!((x.modulate(w).l2() - x.l2()).abs() <= 1e-12 * (1.0 + x.l2()));
        let back = x.modulate(w).modulate(-w);
        prop_assert!(back.combine(C::new(1.0, 0.0), &x, C::new(-1.0, 0.0)).linf() <= 1e-12 * (1.0 + x.linf()));
    }

    #[test]
    fn complement_is_an_involution(b in band()) {
        let cc = b.complement().complement();
        prop_assert!((cc.half_width() - b.half_width()).abs() <= 1e-12);
        prop_assert!((C::from_polar(1.0, cc.center()) - C::from_polar(1.0, b.center())).norm() <= 1e-12);
        prop_assert!((b.measure() + b.complement().measure() - 2.0 * PI).abs() <= 1e-12);
    }

    #[test]
    fn band_and_complement_partition_the_circle(b in band(), w in -PI..PI) {
        prop_assert!(b.contains(w) != b.complement().contains(w));
    }

    #[test]
    fn split_is_consistent(x in two_sided(17), eps in 0.0..0.5f64) {
        let d = gamma_decompose(&x, eps, 256).unwrap();
        for ((xn, yn), nn) in d.spectrum.values().iter().zip(d.predictable.values()).zip(d.noise.values()) {
            prop_assert!((yn + nn - xn).norm() <= 1e-15 * (1.0 + xn.norm()));
        }
    }

    #[test]
    fn noise_grows_with_epsilon(x in nonvanishing(), e1 in 0.0..0.5f64, e2 in 0.0..0.5f64) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let a = gamma_decompose(&x, lo, 512).unwrap().noise.l1();
        let b = gamma_decompose(&x, hi, 512).unwrap().noise.l1();
        prop_assert!(b >= a - 1e-12 * a);
    }

    #[test]
    fn sigma_scales(x in nonvanishing(), c in complex()) {
        prop_assume!(c.norm() > 1e-3);
        let r = sigma_of(&x, 512).unwrap();
        let s = sigma_of(&x.scale(c), 512).unwrap();
        prop_assert!((s.sigma - c.norm() * r.sigma).abs() <= 1e-12 * (1.0 + s.sigma));
        prop_assert!((s.normalized_ratio - r.normalized_ratio).abs() <= 1e-12);
        prop_assert!(r.normalized_ratio > 0.0 && r.normalized_ratio <= 1.0);
    }

    #[test]
    fn adjoint_identity(y in prop::collection::vec(complex(), 9), x in prop::collection::vec(complex(), 1..80), w in 0.1..3.0f64) {
        let x = OneSidedSequence::new(x).unwrap();
        let qy = q_apply(&y, w, x.t_first()..=0).unwrap();
        let lhs: C = qy.iter().map(|(t, v)| v * x.get(t).conj()).sum();
        let rhs: C = y.iter().zip(q_adjoint(&x, w, 4).unwrap()).map(|(a, b)| a * b.conj()).sum();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + lhs.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn projection_contracts(x in prop::collection::vec(complex(), 1..120), b in band()) {
        let x = OneSidedSequence::new(x).unwrap();
        let p = LblProjector::build(b, 6, 120, None).unwrap();
        let r = p.project(&x, 0).unwrap();
        prop_assert!(r.residual <= r.norm_x + 1e-9 * (1.0 + r.norm_x));
        prop_assert!(r.warning.is_none());
        // Pythagoras: the residual equals ‖x‖ exactly when the projection vanishes
        let n2 = r.norm_x * r.norm_x;
        prop_assert!((n2 - r.residual * r.residual - r.x_hat.l2().powi(2)).abs() <= 1e-9 * (1.0 + n2));
    }

    #[test]
    fn prediction_is_causal(h in prop::collection::vec(complex(), 40), extra in prop::collection::vec(complex(), 5), c in -PI..PI) {
        let p = FirPredictor::design(Band::new(c, 0.6).unwrap(), 16).unwrap();
        let a = p.predict_next(&OneSidedSequence::new(h.clone()).unwrap());
        let mut longer = h.clone();
        longer.extend(extra);
        let b = p.predict_next(&OneSidedSequence::new(longer[..h.len()].to_vec()).unwrap());
        prop_assert_eq!(a, b);
    }
}
