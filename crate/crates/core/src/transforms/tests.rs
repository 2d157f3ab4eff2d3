use std::f64::consts::PI;
use std::sync::Arc;

use super::*;
use crate::error::Error;
use crate::freewave::{CauchyData, GeneralCauchyData, RadialCauchyData};
use crate::radial::{Parity, RadialField, RadialGrid};
use crate::space::{AnalyticField, Field3, FnField, Point3};

fn profile(spec: ProfileSpec) -> NonlinearityProfile<f64> {
    NonlinearityProfile::from_spec(&spec).unwrap()
}

fn simpson(a: f64, b: f64, n: usize, g: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = g(a) + g(b);
    for k in 1..n {
        s += g(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn endpoint_cases_of_the_builtins() {
    let one = profile(ProfileSpec::Const { c: 1.0 });
    let c = one.classification();
    assert_eq!(c.case(), EndpointCase::FiniteAbove);
    assert_eq!(c.confidence, Confidence::Resolved);
    assert!((one.b().unwrap() - 1.0).abs() < 1e-12);

    let minus = profile(ProfileSpec::Const { c: -1.0 });
    assert_eq!(minus.classification().case(), EndpointCase::FiniteBelow);
    assert!((minus.a().unwrap() + 1.0).abs() < 1e-12);

    let lin = profile(ProfileSpec::Linear { k: 1.0 });
    assert_eq!(lin.classification().case(), EndpointCase::BothFinite);
    let edge = (PI / 2.0).sqrt();
    assert!((lin.a().unwrap() + edge).abs() < 1e-8);
    assert!((lin.b().unwrap() - edge).abs() < 1e-8);

    for spec in [
        ProfileSpec::Linear { k: -1.0 },
        ProfileSpec::NegArctan,
        ProfileSpec::Sin,
        ProfileSpec::Const { c: 0.0 },
    ] {
        let p = profile(spec);
        assert_eq!(p.classification().case(), EndpointCase::BothInfinite, "{}", p.name());
    }
}

#[test]
fn heuristic_classification_agrees_with_analytic_cases() {
    let cases: [(Box<dyn Fn(f64) -> f64 + Send + Sync>, EndpointCase); 5] = [
        (Box::new(|_| 1.0), EndpointCase::FiniteAbove),
        (Box::new(|_| -1.0), EndpointCase::FiniteBelow),
        (Box::new(|u| u), EndpointCase::BothFinite),
        (Box::new(|u: f64| -u.atan()), EndpointCase::BothInfinite),
        (Box::new(|u: f64| u.sin()), EndpointCase::BothInfinite),
    ];
    for (f, case) in cases {
        let p = NonlinearityProfile::build("f", f, ProfileOptions::default()).unwrap();
        assert_eq!(p.classification().case(), case);
        assert_eq!(p.classification().confidence, Confidence::Heuristic);
    }
    // F' ~ |u|^{-2} gives a finite end with a power tail
    let p = NonlinearityProfile::build("f", |u: f64| 2.0 * u / (1.0 + u * u), ProfileOptions::default())
        .unwrap();
    assert_eq!(p.classification().case(), EndpointCase::BothFinite);
    assert!((p.b().unwrap() - PI / 2.0).abs() < 1e-4);
}

#[test]
fn f_matches_closed_forms() {
    let one = profile(ProfileSpec::Const { c: 1.0 });
    let lin = profile(ProfileSpec::Linear { k: 1.0 });
    let zero = profile(ProfileSpec::Const { c: 0.0 });
    for u in [-7.3f64, -1.0, -0.2, 0.0, 0.4, 2.5, 11.0] {
        let exact = 1.0 - (-u).exp();
        assert!(((one.F(u) - exact) / exact.abs().max(1.0)).abs() < 1e-12, "{u}");
        assert!((one.fprime(u) - (-u).exp()).abs() < 1e-12 * (-u).exp().max(1.0));
        assert!((one.fsecond(u) + (-u).exp()).abs() < 1e-12 * (-u).exp().max(1.0));
        assert!((zero.F(u) - u).abs() < 1e-12);
        let g = simpson(0.0, u, 20000, |s| (-s * s / 2.0).exp());
        assert!((lin.F(u) - g).abs() < 1e-11, "{u}");
    }
    // beyond the cached range
    assert!((zero.F(80.0) - 80.0).abs() < 1e-10);
    assert!((zero.f_inverse(-123.0).unwrap() + 123.0).abs() < 1e-9);
}

#[test]
fn inverse_round_trips() {
    for spec in [
        ProfileSpec::Const { c: 1.0 },
        ProfileSpec::Const { c: -1.0 },
        ProfileSpec::Linear { k: 1.0 },
        ProfileSpec::Linear { k: -0.5 },
        ProfileSpec::NegArctan,
        ProfileSpec::Sin,
    ] {
        let p = profile(spec);
        for u in [-6.0, -2.0, -0.3, 0.0, 0.7, 3.0, 6.0] {
            let v = p.F(u);
            let back = p.f_inverse(v).unwrap();
            let conditioned = (back - u).abs() * p.fprime(u) < 1e-14 * v.abs().max(1.0);
            assert!(conditioned || (back - u).abs() < 1e-10 * u.abs().max(1.0), "{} {u} {back}", p.name());
        }
    }
}

#[test]
fn inverse_rejects_levels_outside_the_range() {
    let one = profile(ProfileSpec::Const { c: 1.0 });
    assert!(matches!(one.f_inverse(1.0), Err(Error::OutsideInvertibility { .. })));
    assert!(matches!(one.f_inverse(1.5), Err(Error::OutsideInvertibility { .. })));
    assert!(one.f_inverse(-1e6).is_ok());
}

#[test]
fn nirenberg_orientation_is_exp_minus_u() {
    let p = profile(ProfileSpec::Const { c: 1.0 }).with_orientation(Orientation::nirenberg());
    for u in [-2.0f64, 0.0, 0.5, 3.0] {
        assert!((p.v_of(u) - (-u).exp()).abs() < 1e-12 * (-u).exp().max(1.0));
        assert!((p.dv_du(u) + (-u).exp()).abs() < 1e-12 * (-u).exp().max(1.0));
        assert!((p.u_of((-u).exp()).unwrap() - u).abs() < 1e-10);
    }
    let (lo, hi) = p.v_levels();
    assert!(lo.unwrap().abs() < 1e-12);
    assert!(hi.is_none());
    assert!(matches!(p.u_of(-0.1), Err(Error::OutsideInvertibility { lo, .. }) if lo.abs() < 1e-12));
}

#[test]
fn tabulated_profiles_are_heuristic() {
    let spec = ProfileSpec::Tabulated {
        u: vec![-10.0, 0.0, 10.0],
        f: vec![1.0, 1.0, 1.0],
    };
    let p = profile(spec);
    assert_eq!(p.classification().confidence, Confidence::Heuristic);
    assert_eq!(p.classification().case(), EndpointCase::FiniteAbove);
    assert!((p.b().unwrap() - 1.0).abs() < 1e-10);
    let bad = ProfileSpec::Tabulated {
        u: vec![0.0, 0.0],
        f: vec![1.0, 1.0],
    };
    assert!(NonlinearityProfile::<f64>::from_spec(&bad).is_err());
}

#[test]
fn non_finite_f_is_rejected() {
    let r = NonlinearityProfile::build("bad", |u: f64| 1.0 / u, ProfileOptions::default());
    assert!(matches!(r, Err(Error::Profile(_))));
}

#[test]
fn push_forward_radial_applies_the_chain_rule() {
    let grid = Arc::new(RadialGrid::uniform(4.0, 81).unwrap());
    let data = RadialCauchyData::from_fns(grid.clone(), |r: f64| (-r * r).exp(), |r: f64| r * r - 1.0)
        .unwrap();
    let p = profile(ProfileSpec::Const { c: 1.0 });
    let v = push_forward_radial(&data, &p).unwrap();
    for (i, &r) in grid.nodes().iter().enumerate() {
        let u0 = (-r * r).exp();
        assert!((v.u0().values()[i] - (1.0 - (-u0).exp())).abs() < 1e-11);
        assert!((v.ru1().values()[i] - (-u0).exp() * r * (r * r - 1.0)).abs() < 1e-11);
    }
    let back = pull_back(v.u0(), &p).unwrap();
    for (a, b) in back.values().iter().zip(data.u0().values()) {
        assert!((a - b).abs() < 1e-11);
    }
}

#[test]
fn pull_back_names_the_first_bad_node() {
    let grid = Arc::new(RadialGrid::uniform(2.0, 21).unwrap());
    let v = RadialField::from_fn(grid, Parity::Even, |r: f64| 0.5 + r).unwrap();
    let p = profile(ProfileSpec::Const { c: 1.0 });
    match pull_back(&v, &p) {
        Err(Error::OutsideInvertibility { index, r, value, hi, .. }) => {
            assert_eq!(index, 5);
            assert!((r - 0.5).abs() < 1e-12);
            assert!((value - 1.0).abs() < 1e-12);
            assert!((hi - 1.0).abs() < 1e-12);
        }
        other => panic!("{other:?}"),
    }
}

fn bump() -> Arc<dyn Field3<f64>> {
    Arc::new(AnalyticField {
        value: |x: Point3<f64>| (-(x[0] * x[0] + 2.0 * x[1] * x[1] + x[2] * x[2])).exp(),
        gradient: |x: Point3<f64>| {
            let e = (-(x[0] * x[0] + 2.0 * x[1] * x[1] + x[2] * x[2])).exp();
            [-2.0 * x[0] * e, -4.0 * x[1] * e, -2.0 * x[2] * e]
        },
        laplacian: |x: Point3<f64>| {
            let e = (-(x[0] * x[0] + 2.0 * x[1] * x[1] + x[2] * x[2])).exp();
            let q = 4.0 * x[0] * x[0] + 16.0 * x[1] * x[1] + 4.0 * x[2] * x[2];
            (q - 8.0) * e
        },
    })
}

#[test]
fn nonradial_push_matches_finite_differences() {
    let u1: Arc<dyn Field3<f64>> = Arc::new(FnField(|x: Point3<f64>| x[0] * (-(x[2] * x[2])).exp()));
    let data = GeneralCauchyData::new(bump(), u1);
    let p = Arc::new(profile(ProfileSpec::Linear { k: 1.0 }));
    let push = nonradial_laplacian_push(&data, &p);
    let v0 = push.data().u0.clone();
    let v1 = push.data().u1.clone();
    let fd0 = FnField(move |x| v0.value(x));
    let fd1 = FnField(move |x| v1.value(x));
    for x in [[0.3, -0.2, 0.5], [0.0, 0.0, 0.0], [-0.7, 0.4, 0.1]] {
        assert!((push.lap_v0(x) - fd0.laplacian(x)).abs() < 1e-4, "{x:?}");
        let g = push.grad_v1(x);
        let h = fd1.gradient(x);
        for k in 0..3 {
            assert!((g[k] - h[k]).abs() < 1e-7);
        }
    }
    let pushed = push_forward(&CauchyData::General(data), &p).unwrap();
    assert!(pushed.as_general().is_ok());
}

#[test]
fn f32_profile_is_usable() {
    let p = NonlinearityProfile::<f32>::from_spec(&ProfileSpec::Const { c: 1.0 }).unwrap();
    assert!((p.F(1.0) - (1.0 - (-1.0f32).exp())).abs() < 1e-6);
    assert!((p.f_inverse(0.5).unwrap() - 2f32.ln()).abs() < 1e-5);
}

#[test]
fn endpoint_gaps_survive_cancellation() {
    let one = profile(ProfileSpec::Const { c: 1.0 });
    for u in [-3.0, 0.0, 5.0, 20.0, 45.0] {
        assert!((one.gap_above(u).unwrap() - 1.0).abs() < 1e-10, "{u}");
    }
    assert!(one.gap_below(0.0).is_none());
    let minus = profile(ProfileSpec::Const { c: -1.0 });
    for u in [-40.0, -2.0, 3.0] {
        assert!((minus.gap_below(u).unwrap() - 1.0).abs() < 1e-10, "{u}");
    }
    let lin = profile(ProfileSpec::Linear { k: 1.0 });
    for u in [0.0, 1.0, 9.0] {
        let exact = simpson(u, u + 60.0, 200_000, |s| (u * u / 2.0 - s * s / 2.0).exp());
        assert!((lin.gap_above(u).unwrap() - exact).abs() < 1e-9 * exact, "{u}");
    }
}
