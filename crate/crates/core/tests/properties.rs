use bosonic_converse::channels::ChannelParams;
use bosonic_converse::converse::{
    chernoff_tail, concentration_tail, corollary_bound, theorem1_bound, BoundInputs, SlackParams,
};
use bosonic_converse::entropy::{
    check_renyi_smoothing, g, k_factor, renyi, smooth_min_entropy, Spectrum,
};
use bosonic_converse::fock::channel_kernel;
use proptest::prelude::*;

fn channel() -> impl Strategy<Value = ChannelParams> {
    (0.0f64..4.0, 0.0f64..4.0).prop_map(|(tau, extra)| {
        ChannelParams::new(tau, (tau - 1.0).abs() + extra).unwrap()
    })
}

fn spectrum() -> impl Strategy<Value = Spectrum> {
    prop::collection::vec(1e-6f64..1.0, 1..40).prop_map(|w| {
        let total: f64 = w.iter().sum();
        Spectrum::from_values(w.into_iter().map(|x| x / total).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn decomposition_round_trips(ch in channel()) {
        let d = ch.decompose();
        prop_assert!((0.0..=1.0).contains(&d.transmissivity));
        prop_assert!(d.gain >= 1.0);
        let (tau, nu) = d.recompose();
        prop_assert!((tau - ch.tau()).abs() <= 1e-12 * ch.tau().max(1.0));
        prop_assert!((nu - ch.nu()).abs() <= 1e-12 * ch.nu().max(1.0));
    }

    #[test]
    fn smoothing_inequality_holds(s in spectrum(), eps in 1e-6f64..0.99, a in 1.001f64..20.0) {
        prop_assert!(check_renyi_smoothing(&s, eps, a).unwrap().holds);
    }

    #[test]
    fn renyi_nonincreasing_in_order(s in spectrum(), a in 0.05f64..10.0, step in 0.01f64..5.0) {
        let lo = renyi(&s, a).unwrap();
        let hi = renyi(&s, a + step).unwrap();
        prop_assert!(hi <= lo + 1e-10);
    }

    #[test]
    fn smooth_min_entropy_monotone_and_bounded(s in spectrum(), e1 in 0.0f64..0.9, de in 0.0f64..0.09) {
        let a = smooth_min_entropy(&s, e1).unwrap();
        let b = smooth_min_entropy(&s, e1 + de).unwrap();
        prop_assert!(b >= a - 1e-12);
        let cap = s.max_value() - e1;
        if cap > 0.0 {
            prop_assert!(a <= -cap.log2() + 1e-12);
        }
    }

    #[test]
    fn kernel_rows_are_normalized(ch in channel(), k in 0usize..12) {
        let kern = channel_kernel(&ch, k, 4000, f64::INFINITY).unwrap();
        let row = kern.row(k).unwrap();
        prop_assert!((row.total_mass() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn corollary_exponent_matches_closed_form(
        ch in channel(),
        ns in 0.05f64..5.0,
        rate in 0.0f64..5.0,
        d2 in 1e-4f64..1.0,
        d4 in 1e-4f64..1.0,
        d5 in 1e-4f64..1.0,
        n in 1u64..500,
    ) {
        let slack = SlackParams { delta2: d2, delta4: d4, delta5: d5, ..SlackParams::default() };
        let r = corollary_bound(&BoundInputs { channel: ch, ns, n, rate, slack }).unwrap();
        let out = ch.output_photon_numbers(ns).unwrap();
        let want = -rate + g(out.signal).unwrap() - g(out.noise).unwrap()
            + d2 + d5 / d4 + d4 * k_factor(out.noise).unwrap();
        prop_assert!((r.exponent - want).abs() <= 1e-10 * want.abs().max(1.0));
    }

    #[test]
    fn reports_recompute_from_breakdown(
        ch in channel(),
        ns in 0.05f64..5.0,
        rate in 0.0f64..5.0,
        alpha in 1.01f64..5.0,
        eps in 1e-9f64..0.5,
        n in 1u64..500,
    ) {
        let slack = SlackParams { alpha, eps, ..SlackParams::default() };
        let inputs = BoundInputs { channel: ch, ns, n, rate, slack };
        for r in [theorem1_bound(&inputs).unwrap(), corollary_bound(&inputs).unwrap()] {
            let exp: f64 = r.components.values().sum();
            prop_assert_eq!(exp, r.exponent);
            prop_assert_eq!(r.recompute(), r.bound);
        }
    }

    #[test]
    fn chernoff_dominates_exact_tail(
        ch in channel(),
        profile in prop::collection::vec(0u64..4, 1..6),
        d2 in 0.05f64..2.0,
    ) {
        let t = concentration_tail(&ch, &profile, d2, 1e-12).unwrap();
        let c = chernoff_tail(&ch, &profile, t.threshold).unwrap();
        prop_assert!(c >= (t.probability + t.truncation_error).log2() - 1e-9);
    }
}
