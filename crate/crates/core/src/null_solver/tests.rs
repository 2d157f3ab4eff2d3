use std::sync::Arc;

use super::*;
use crate::criteria::quadratic_global_condition;
use crate::error::Error;
use crate::freewave::{propagate_radial, RadialCauchyData};
use crate::radial::RadialGrid;
use crate::transforms::{NonlinearityProfile, ProfileSpec};

fn grid(r_max: f64, n: usize) -> Arc<RadialGrid<f64>> {
    Arc::new(RadialGrid::uniform(r_max, n).unwrap())
}

fn profile(spec: ProfileSpec) -> Arc<NonlinearityProfile<f64>> {
    Arc::new(NonlinearityProfile::from_spec(&spec).unwrap())
}

fn unit() -> Arc<NonlinearityProfile<f64>> {
    profile(ProfileSpec::Const { c: 1.0 })
}

/// `w = e^{-u}` for `f ≡ 1` and data `(u0, 0)`: `r w(r, t)` is the mean of
/// `s w0(s)` at `s = r ± t` with `w0` extended evenly.
fn nirenberg_static(u0: impl Fn(f64) -> f64, r: f64, t: f64) -> f64 {
    let g = |s: f64| s * (-u0(s.abs())).exp();
    if r == 0.0 {
        // limit: d/ds (s w0(s)) at s = t
        let h = 1e-5;
        return (g(t + h) - g(t - h)) / (2.0 * h);
    }
    0.5 * (g(r + t) + g(r - t)) / r
}

#[test]
fn constant_data_stay_constant() {
    let d = RadialCauchyData::from_fns(grid(10.0, 201), |_| 0.7, |_| 0.0).unwrap();
    let sol = NullSolution::new(&d, unit()).unwrap();
    assert!(sol.validity().is_global());
    for &t in &[-3.0, 0.0, 0.5, 4.0] {
        let u = sol.solve(t).unwrap();
        for &x in u.values() {
            assert!((x - 0.7).abs() < 1e-12, "{x} at t={t}");
        }
    }
}

#[test]
fn zero_nonlinearity_is_the_free_wave() {
    let g = grid(15.0, 1501);
    let d = RadialCauchyData::from_fns(g, |r: f64| 3.0 * (-r * r).exp(), |r: f64| -2.0 * r * (-r * r).exp())
        .unwrap();
    let p = profile(ProfileSpec::Const { c: 0.0 });
    for &t in &[-2.0, 0.7, 3.0] {
        let u = solve_null(&d, &p, t).unwrap();
        let w = propagate_radial(&d, t).unwrap();
        for (a, b) in u.values().iter().zip(w.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn unit_nonlinearity_matches_the_nirenberg_closed_form() {
    let u0 = |r: f64| 0.5 * (-r * r).exp();
    let d = RadialCauchyData::from_fns(grid(20.0, 4001), u0, |_| 0.0).unwrap();
    let sol = NullSolution::new(&d, unit()).unwrap();
    assert!(sol.validity().is_global());
    for &t in &[-1.5, 0.3, 1.0, 2.0] {
        for &r in &[0.0, 0.25, 0.9, 1.7, 3.2] {
            let want = -nirenberg_static(u0, r, t).ln();
            let got = sol.u(r, t).unwrap();
            assert!((got - want).abs() < 1e-8, "r={r} t={t}: {got} vs {want}");
        }
    }
}

#[test]
fn derivatives_follow_the_chain_rule() {
    let u0 = |r: f64| 0.4 * (-r * r).exp();
    let d = RadialCauchyData::from_fns(grid(20.0, 4001), u0, |r: f64| 0.2 * (-r * r).exp()).unwrap();
    let sol = NullSolution::new(&d, unit()).unwrap();
    let h = 1e-4;
    for &(r, t) in &[(0.5, 0.2), (1.3, -0.8), (2.0, 1.5)] {
        let ut = (sol.u(r, t + h).unwrap() - sol.u(r, t - h).unwrap()) / (2.0 * h);
        let ur = (sol.u(r + h, t).unwrap() - sol.u(r - h, t).unwrap()) / (2.0 * h);
        assert!((sol.u_t(r, t).unwrap() - ut).abs() < 1e-6);
        assert!((sol.u_r(r, t).unwrap() - ur).abs() < 1e-6);
    }
}

fn failing() -> RadialCauchyData<f64> {
    RadialCauchyData::from_fns(grid(20.0, 2001), |r: f64| -1.5 * (-r * r).exp(), |_| 0.0).unwrap()
}

/// Earliest `t >= 0` with `min_r w(r, t) <= 0` for the closed form, by
/// bisection on a dense radial sampling.
fn oracle_touch(u0: impl Fn(f64) -> f64 + Copy) -> f64 {
    let min_w = |t: f64| {
        let mut m = f64::INFINITY;
        for k in 0..=4000 {
            m = m.min(nirenberg_static(u0, k as f64 * 1e-3, t));
        }
        m
    };
    let mut t = 0.0;
    while min_w(t + 0.01) > 0.0 {
        t += 0.01;
    }
    let (mut a, mut b) = (t, t + 0.01);
    while b - a > 1e-11 {
        let m = 0.5 * (a + b);
        if min_w(m) > 0.0 {
            a = m
        } else {
            b = m
        }
    }
    b
}

#[test]
fn failing_gaussian_blows_up_inside_the_window() {
    let d = failing();
    let rep = detect_blowup(&d, &unit()).unwrap();
    assert!((rep.r0 - 1.0).abs() < 1e-3, "{}", rep.r0);
    assert!(rep.t0 > 0.0 && rep.t0 <= 1.0, "{}", rep.t0);
    assert!(rep.within_window);
    assert!((rep.level - 1.0).abs() < 1e-12);
    // u1 = 0: the backward touch mirrors the forward one
    assert!((rep.t_backward.unwrap() + rep.t_forward.unwrap()).abs() < 1e-8);
    let want = oracle_touch(|r: f64| -1.5 * (-r * r).exp());
    assert!((rep.t0 - want).abs() < 1e-6, "{} vs {want}", rep.t0);
}

#[test]
fn log_rate_slope_is_one() {
    let rep = detect_blowup(&failing(), &unit()).unwrap();
    let fit = rep.log_rate_fit.unwrap();
    assert!((fit.slope - 1.0).abs() < 0.1, "{fit:?}");
    // growth towards t0
    let s = &fit.samples;
    assert!(s.first().unwrap().1 > s.last().unwrap().1);
}

#[test]
fn equality_case_touches_at_the_witness_radius() {
    // 1 - r(u0)_r = 1 - 2a r² e^{-r²} vanishes exactly at r = 1 for a = e/2
    let a = std::f64::consts::E / 2.0;
    let d = RadialCauchyData::from_fns(grid(20.0, 4001), |r: f64| -a * (-r * r).exp(), |_| 0.0).unwrap();
    let v = quadratic_global_condition(&d, &unit(), true).unwrap();
    assert!(v.margin.abs() < 1e-8, "{}", v.margin);
    assert!((v.witness.unwrap().r.unwrap() - 1.0).abs() < 1e-3);
    let sol = NullSolution::new(&d, unit()).unwrap();
    // v(0, ±1) reaches the level b = 1
    assert!((1.0 - sol.v(0.0, 1.0)).abs() < 1e-8);
    assert!((1.0 - sol.v(0.0, -1.0)).abs() < 1e-8);
    // nudged past equality: the touch moves to r = 0 at t = ±1 from inside
    let d = RadialCauchyData::from_fns(grid(20.0, 4001), |r: f64| -a * (1.0 + 1e-6) * (-r * r).exp(), |_| 0.0)
        .unwrap();
    let rep = detect_blowup(&d, &unit()).unwrap();
    assert!((rep.t0.abs() - 1.0).abs() < 5e-3, "{}", rep.t0);
    assert!(rep.x0_radius < 5e-3);
    assert!(rep.within_window);
}

#[test]
fn passing_data_report_no_touch() {
    let d = RadialCauchyData::from_fns(grid(20.0, 2001), |r: f64| 0.5 * (-r * r).exp(), |_| 0.0).unwrap();
    match detect_blowup(&d, &unit()) {
        Err(Error::WitnessInconsistent(_)) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn solve_reports_where_the_solution_ceased() {
    let sol = NullSolution::new(&failing(), unit()).unwrap();
    let tf = match sol.validity() {
        Validity::ConeLimited { t_forward, .. } => t_forward.unwrap(),
        v => panic!("{v:?}"),
    };
    assert!(sol.validity().contains(tf - 1e-3));
    assert!(!sol.validity().contains(tf + 1e-3));
    assert!(sol.solve(tf - 1e-3).is_ok());
    match sol.solve(1.0) {
        Err(Error::SolutionCeased { hi, .. }) => assert!((hi - 1.0).abs() < 1e-12),
        other => panic!("{other:?}"),
    }
}

fn passing() -> RadialCauchyData<f64> {
    RadialCauchyData::from_fns(
        grid(20.0, 4001),
        |r: f64| 0.5 * (-r * r).exp(),
        |r: f64| 0.3 * r * (-r * r).exp(),
    )
    .unwrap()
}

#[test]
fn pointwise_bounds_hold_on_passing_data() {
    let d = passing();
    let sol = NullSolution::new(&d, unit()).unwrap();
    let probes = ProbeSet {
        times: crate::numerics::lin_space(-3.0, 3.0, 32),
        radii: Some(crate::numerics::lin_space(0.0, 6.0, 40)),
    };
    let rep = verify_pointwise_bounds(&sol, &probes).unwrap();
    assert!(rep.probes >= 1000);
    assert!(rep.passed(), "{:?}", &rep.violations[..rep.violations.len().min(5)]);
    // c0 from its definition, with sup/inf and weighted sups sampled finely
    let mut sup_ru0 = 0.0f64;
    let mut sup_ru1 = 0.0f64;
    let mut slack = f64::INFINITY;
    for k in 0..=200000 {
        let r = k as f64 * 1e-4;
        let e = (-r * r).exp();
        let ru0r = -r * r * e;
        let ru1 = 0.3 * r * r * e;
        sup_ru0 = sup_ru0.max(ru0r.abs());
        sup_ru1 = sup_ru1.max(ru1.abs());
        slack = slack.min(1.0 - ru0r - ru1);
    }
    let c0 = 0.5f64.exp() / slack * (1.0 + sup_ru0 + sup_ru1);
    assert!((rep.epsilon - slack).abs() < 1e-6);
    assert!((rep.c0 - c0).abs() < 1e-5 * c0, "{} vs {c0}", rep.c0);
}

#[test]
fn pointwise_bounds_need_unit_nonlinearity() {
    let d = passing();
    let sol = NullSolution::new(&d, profile(ProfileSpec::Sin)).unwrap();
    assert!(verify_pointwise_bounds(&sol, &ProbeSet::tensor(1.0, 4)).is_err());
}

#[test]
fn quadratic_energy_is_conserved() {
    let d = passing();
    let sol = NullSolution::new(&d, unit()).unwrap();
    let mut vals = Vec::new();
    for &t in &[0.0, 0.5, 1.0, 2.0] {
        let st = sol.state(t).unwrap();
        let e = conserved_energy_quadratic(&st.u, &st.u_t).unwrap();
        assert!(!e.tail_unresolved);
        vals.push(e.value);
        // same integrand as the free-wave energy of e^{-u}
        let generic = conserved_energy(&st.u, &st.u_t, sol.profile()).unwrap();
        assert!((generic.value - e.value).abs() < 1e-12 * e.value);
    }
    for v in &vals {
        assert!((v - vals[0]).abs() < 1e-6 * vals[0], "{vals:?}");
    }
}

#[test]
fn constant_state_has_zero_energy() {
    let d = RadialCauchyData::from_fns(grid(10.0, 201), |_| 0.3, |_| 0.0).unwrap();
    let st = NullSolution::new(&d, unit()).unwrap().state(0.0).unwrap();
    assert!(conserved_energy_quadratic(&st.u, &st.u_t).unwrap().value.abs() < 1e-20);
}

#[test]
fn dispersion_bound_on_passing_data() {
    let d = passing();
    let sol = NullSolution::new(&d, unit()).unwrap();
    let times = crate::numerics::lin_space(-4.0, 4.0, 17);
    let rep = dispersion_metrics(&sol, &times).unwrap();
    assert!(rep.energy_bound_holds, "{} > {}", rep.energy_sup, rep.energy_bound);
    assert!(rep.v_energy_drift < 1e-6, "{}", rep.v_energy_drift);
    assert!(rep.strichartz_ratio.is_finite() && rep.strichartz_ratio > 0.0);
}

#[test]
fn dispersion_of_zero_data_vanishes() {
    let d = RadialCauchyData::from_fns(grid(10.0, 201), |_| 0.0, |_| 0.0).unwrap();
    let sol = NullSolution::new(&d, unit()).unwrap();
    let rep = dispersion_metrics(&sol, &[0.0, 1.0, 2.0]).unwrap();
    // F⁻¹(0) is resolved by Newton to ~1e-12
    assert!(rep.energy_sup < 1e-10);
    assert!(rep.l2_linf < 1e-10);
    assert!(rep.energy_bound < 1e-10);
}

#[test]
fn asymptotics_of_small_data_decay_like_one_over_t() {
    let small = RadialCauchyData::from_fns(grid(20.0, 2001), |r: f64| 0.2 * (-r * r).exp(), |_| 0.0).unwrap();
    for spec in [ProfileSpec::Const { c: 0.0 }, ProfileSpec::Const { c: 1.0 }] {
        let rep = asymptotic_profile(&small, &profile(spec), &DecayOptions::default()).unwrap();
        assert_eq!(rep.classification, Asymptotics::Global);
        let fit = rep.decay.unwrap();
        assert!(fit.bounded, "{fit:?}");
        assert!((rep.scattering_coefficient - 1.0).abs() < 1e-12);
    }
}

#[test]
fn asymptotics_of_failing_data_take_the_blowup_branch() {
    let d = failing();
    let rep = asymptotic_profile(&d, &unit(), &DecayOptions::default()).unwrap();
    assert_eq!(rep.classification, Asymptotics::BlowUp);
    assert!(rep.decay.is_none());
    let b = detect_blowup(&d, &unit()).unwrap();
    match rep.validity {
        Validity::ConeLimited { t_forward, .. } => assert!((t_forward.unwrap() - b.t0).abs() < 1e-8),
        v => panic!("{v:?}"),
    }
}

#[test]
fn f32_solution_agrees_with_f64() {
    let g32 = Arc::new(RadialGrid::<f32>::uniform(10.0, 501).unwrap());
    let d32 = RadialCauchyData::from_fns(g32, |r: f32| 0.5 * (-r * r).exp(), |_| 0.0).unwrap();
    let p32 = Arc::new(NonlinearityProfile::<f32>::from_spec(&ProfileSpec::Const { c: 1.0 }).unwrap());
    let s32 = NullSolution::new(&d32, p32).unwrap();
    let d64 = RadialCauchyData::from_fns(grid(10.0, 501), |r: f64| 0.5 * (-r * r).exp(), |_| 0.0).unwrap();
    let s64 = NullSolution::new(&d64, unit()).unwrap();
    for &(r, t) in &[(0.0f32, 0.5f32), (1.0, 1.0), (2.5, -0.7)] {
        let a = s32.u(r, t).unwrap() as f64;
        let b = s64.u(r as f64, t as f64).unwrap();
        assert!((a - b).abs() < 1e-4, "{a} vs {b}");
    }
}
