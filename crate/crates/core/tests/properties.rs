use std::sync::Arc;

use proptest::prelude::*;

use wavepos::criteria::{quadratic_global_condition, radial_bounds, radial_positivity};
use wavepos::focusing_solver::{monotone_iterate, sine_kernel_radial, IterateOptions};
use wavepos::freewave::{propagate_radial, RadialCauchyData, RadialWave};
use wavepos::radial::{integrate_radial, Parity, RadialField, RadialGrid};
use wavepos::transforms::{NonlinearityProfile, ProfileSpec};

fn grid(r_max: f64, n: usize) -> Arc<RadialGrid<f64>> {
    Arc::new(RadialGrid::uniform(r_max, n).unwrap())
}

fn profile_spec() -> impl Strategy<Value = ProfileSpec> {
    prop_oneof![
        (-2.0..2.0f64).prop_map(|c| ProfileSpec::Const { c }),
        (-1.5..1.5f64).prop_map(|k| ProfileSpec::Linear { k }),
        Just(ProfileSpec::Sin),
        Just(ProfileSpec::NegArctan),
    ]
}

/// Gaussian-type data `u0 = a e^{-r²/s²}`, `u1 = m r e^{-r²/s²}`.
fn gaussian(g: Arc<RadialGrid<f64>>, a: f64, s: f64, m: f64) -> RadialCauchyData<f64> {
    RadialCauchyData::from_fns(
        g,
        move |r: f64| a * (-r * r / (s * s)).exp(),
        move |r: f64| m * r * (-r * r / (s * s)).exp(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn radial_integral_is_linear(alpha in -3.0..3.0f64, beta in -3.0..3.0f64, s in 0.5..2.0f64) {
        let g = grid(12.0, 801);
        let f = RadialField::from_fn(g.clone(), Parity::Even, |r: f64| (-r * r / (s * s)).exp()).unwrap();
        let h = RadialField::from_fn(g, Parity::Even, |r: f64| 1.0 / (1.0 + r.powi(4))).unwrap();
        let mix = f.axpby(alpha, &h, beta).unwrap();
        // the quadrature is linear; the fitted tail extrapolation is not
        let lhs = integrate_radial(&mix).raw;
        let (i_f, i_h) = (integrate_radial(&f).raw, integrate_radial(&h).raw);
        let rhs = alpha * i_f + beta * i_h;
        let scale = (alpha * i_f).abs() + (beta * i_h).abs();
        prop_assert!((lhs - rhs).abs() <= 1e-13 * scale, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn transform_is_increasing_and_normalized(spec in profile_spec(), s in -4.0..4.0f64, d in 1e-3..2.0f64) {
        let p = NonlinearityProfile::<f64>::from_spec(&spec).unwrap();
        prop_assert_eq!(p.F(0.0), 0.0);
        prop_assert!(p.fprime(s) > 0.0);
        prop_assert!(p.F(s) < p.F(s + d), "F({}) = {} >= F({}) = {}", s, p.F(s), s + d, p.F(s + d));
    }

    #[test]
    fn second_derivative_ratio_is_minus_f(spec in profile_spec(), u in -3.0..3.0f64) {
        let p = NonlinearityProfile::<f64>::from_spec(&spec).unwrap();
        let ratio = p.fsecond(u) / p.fprime(u);
        prop_assert!((ratio + p.f(u)).abs() <= 1e-8 * (1.0 + p.f(u).abs()), "{} vs {}", ratio, -p.f(u));
    }

    #[test]
    fn margins_never_decrease_as_velocity_shrinks(
        a in -1.5..1.5f64,
        s in 0.6..2.0f64,
        m in -1.5..1.5f64,
        lambda in 0.0..1.0f64,
    ) {
        let g = grid(16.0, 801);
        let full = gaussian(g.clone(), a, s, m);
        let scaled = gaussian(g, a, s, lambda * m);
        let unit = NonlinearityProfile::<f64>::from_spec(&ProfileSpec::Const { c: 1.0 }).unwrap();
        let tol = 1e-12;
        let pairs = [
            (radial_positivity(&full, true).unwrap(), radial_positivity(&scaled, true).unwrap()),
            (quadratic_global_condition(&full, &unit, true).unwrap(), quadratic_global_condition(&scaled, &unit, true).unwrap()),
            (radial_bounds(&full, -2.0, 2.0, true).unwrap(), radial_bounds(&scaled, -2.0, 2.0, true).unwrap()),
        ];
        for (before, after) in pairs {
            prop_assert!(after.margin >= before.margin - tol, "{}: {} -> {}", before.criterion, before.margin, after.margin);
        }
    }

    #[test]
    fn sine_kernel_preserves_sign(
        c1 in 0.0..2.0f64,
        c2 in 0.0..2.0f64,
        w in 0.5..6.0f64,
        t in 0.0..8.0f64,
    ) {
        let g = grid(10.0, 501);
        let f = RadialField::from_fn(g, Parity::Even, |r: f64| {
            (c1 * (-r * r).exp() + c2 * (w * r).sin().powi(2) / (1.0 + r * r)).max(0.0)
        })
        .unwrap();
        let k = sine_kernel_radial(&f, t).unwrap();
        prop_assert!(k.values().iter().all(|&v| v >= 0.0), "min {}", k.min());
    }

    #[test]
    fn free_wave_group_property(a in -1.0..1.0f64, s in 0.6..1.5f64, m in -1.0..1.0f64, t in 0.0..2.0f64, dt in 0.0..2.0f64) {
        let g = grid(16.0, 3201);
        let data = gaussian(g.clone(), a, s, m);
        let wave = RadialWave::new(&data).unwrap();
        let mid = wave.state(t).unwrap();
        let restarted = RadialCauchyData::new(mid.u, mid.u_t).unwrap();
        let two_step = propagate_radial(&restarted, dt).unwrap();
        let direct = propagate_radial(&data, t + dt).unwrap();
        let err = two_step
            .nodes()
            .iter()
            .zip(two_step.values().iter().zip(direct.values()))
            .filter(|(&r, _)| r <= 16.0 - 2.0 * (t + dt))
            .map(|(_, (x, y))| (x - y).abs())
            .fold(0.0, f64::max);
        prop_assert!(err <= 1e-4, "group property error {}", err);
    }

    #[test]
    fn outgoing_data_vanish_inside_the_cone(a in -1.0..1.0f64, s in 0.5..1.5f64, t in 0.5..4.0f64) {
        // r u1 = -(r u0)', so r u = G(r - t)
        let g = grid(16.0, 3201);
        let data = RadialCauchyData::from_weighted_fns(
            g,
            move |r: f64| a * (-r * r / (s * s)).exp(),
            move |r: f64| -a * (1.0 - 2.0 * r * r / (s * s)) * (-r * r / (s * s)).exp(),
            Parity::Even,
        )
        .unwrap();
        let u = propagate_radial(&data, t).unwrap();
        let inside = u
            .nodes()
            .iter()
            .zip(u.values())
            .filter(|(&r, _)| r <= t)
            .map(|(_, v)| v.abs())
            .fold(0.0, f64::max);
        prop_assert!(inside <= 1e-6 * a.abs().max(1e-300), "sup over r <= t: {}", inside);
    }

    #[test]
    fn positivity_persists_in_time(
        a in 0.1..1.5f64,
        b in 0.5..3.0f64,
        theta in -0.9..0.9f64,
        kappa in 0.5..3.0f64,
        t in 0.0..3.0f64,
    ) {
        // (r u0)' = a (1 + r²/b)^{-3/2} > |r u1|, with r u1 odd so u1 is regular
        let g = grid(20.0, 2001);
        let data = RadialCauchyData::from_weighted_fns(
            g,
            move |r: f64| a * (1.0 + r * r / b).powf(-0.5),
            move |r: f64| theta * a * (1.0 + r * r / b).powf(-1.5) * (kappa * r).sin(),
            Parity::Odd,
        )
        .unwrap();
        prop_assert!(radial_positivity(&data, true).unwrap().holds);
        let st = RadialWave::new(&data).unwrap().state(t).unwrap();
        let later = RadialCauchyData::new(st.u, st.u_t).unwrap();
        let v = radial_positivity(&later, false).unwrap();
        prop_assert!(v.margin >= -1e-6 * a, "margin {} at t = {}, witness {:?}", v.margin, t, v.witness);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn monotone_iterates_are_nondecreasing_and_ordered(
        a in 0.1..0.8f64,
        b in 0.5..3.0f64,
        theta in -1.0..1.0f64,
        kappa in 0.0..3.0f64,
        mu in 0.1..1.0f64,
    ) {
        let g = grid(6.0, 601);
        let family = |amp: f64| {
            RadialCauchyData::from_weighted_fns(
                g.clone(),
                move |r: f64| amp * (1.0 + r * r / b).powf(-0.5),
                move |r: f64| theta * amp * (1.0 + r * r / b).powf(-1.5) * (kappa * r).cos(),
                Parity::Even,
            )
            .unwrap()
        };
        let opts = IterateOptions { horizon: 1.5, n_max: 60, keep_history: true, ..IterateOptions::default() };
        let upper = monotone_iterate(&family(a), &opts).unwrap();
        let lower = monotone_iterate(&family(mu * a), &opts).unwrap();
        prop_assert_eq!(upper.total_violations(), 0);
        prop_assert_eq!(lower.total_violations(), 0);
        let last = |h: &Vec<_>, n: usize| -> usize { n.min(h.len() - 1) };
        for n in 0..upper.history.len().max(lower.history.len()) {
            let (x, y) = (&upper.history[last(&upper.history, n)], &lower.history[last(&lower.history, n)]);
            for (j, k) in x.resolved_nodes() {
                prop_assert!(x.get(j, k) >= y.get(j, k) && y.get(j, k) >= 0.0, "n = {}, node ({}, {})", n, j, k);
            }
        }
    }
}
