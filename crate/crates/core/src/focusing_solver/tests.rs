use std::sync::Arc;

use super::iterate::time_weights;
use super::*;
use crate::error::Error;
use crate::freewave::{propagate_radial, RadialCauchyData};
use crate::radial::{Parity, RadialField, RadialGrid, RadialProfile};

fn grid(r_max: f64, n: usize) -> Arc<RadialGrid<f64>> {
    Arc::new(RadialGrid::uniform(r_max, n).unwrap())
}

fn q(r: f64) -> f64 {
    (1.0 + r * r / 3.0).powf(-0.5)
}

#[test]
fn kernel_of_one_is_t() {
    let g = grid(10.0, 1001);
    let f = RadialField::constant(g, 1.0);
    for &t in &[0.0, 0.37, 2.0] {
        let out = sine_kernel_radial(&f, t).unwrap();
        for (&r, &v) in out.nodes().iter().zip(out.values()) {
            if r + t <= 10.0 {
                assert!((v - t).abs() < 1e-12, "r={r} t={t} g={v}");
            }
        }
    }
}

#[test]
fn kernel_is_the_free_wave_with_zero_position() {
    let g = grid(12.0, 2401);
    let f = RadialField::from_fn(g.clone(), Parity::Even, |r: f64| (-r * r).exp() * (1.0 + r)).unwrap();
    let data = RadialCauchyData::new(RadialField::zeros(g), f.clone()).unwrap();
    for &t in &[0.5, 1.0, 3.0] {
        let k = sine_kernel_radial(&f, t).unwrap();
        let w = propagate_radial(&data, t).unwrap();
        for i in 0..k.len() {
            if k.nodes()[i] + t <= 12.0 {
                let d = (k.values()[i] - w.values()[i]).abs();
                assert!(d < 1e-5, "t={t} r={} {d}", k.nodes()[i]);
            }
        }
    }
}

#[test]
fn kernel_preserves_positivity() {
    let g = grid(8.0, 401);
    let f = RadialField::from_fn(g, Parity::Even, |r: f64| (3.0 * r).sin().powi(2) * (-r).exp()).unwrap();
    for &t in &[0.1, 1.0, 4.0, 7.9] {
        let k = sine_kernel_radial(&f, t).unwrap();
        assert!(k.values().iter().all(|&v| v >= 0.0), "t={t}");
    }
}

#[test]
fn kernel_rejects_times_beyond_the_grid() {
    let f = RadialField::constant(grid(2.0, 101), 1.0);
    assert!(matches!(sine_kernel_radial(&f, 2.5), Err(Error::InsufficientExtent { .. })));
    assert!(sine_kernel_radial(&f, -0.1).is_err());
}

#[test]
fn ground_state_closed_forms() {
    let s = Soliton::<f64>::ground();
    assert_eq!(s.value(0.0), 1.0);
    assert!((s.value(3f64.sqrt()) - 0.5f64.sqrt()).abs() < 1e-15);
    let h = 1e-5;
    for &r in &[0.3, 1.0, 4.0] {
        let fd = (s.value(r + h) - s.value(r - h)) / (2.0 * h);
        assert!((fd - s.derivative(r)).abs() < 1e-9);
        let t = ((r + h) * s.value(r + h) - (r - h) * s.value(r - h)) / (2.0 * h);
        assert!((t - s.t_transform(r)).abs() < 1e-9);
    }
    assert!(s.residual(0.0).abs() < 1e-15);
}

#[test]
fn stationary_residuals_vanish() {
    let ground = Soliton::<f64>::ground();
    let singular: Vec<_> = [3.0, 4.0, 6.0]
        .iter()
        .map(|&n| soliton(SolitonKind::Singular, n).unwrap())
        .collect();
    for i in 0..=99 {
        let r = 0.1 + 9.9 * i as f64 / 99.0;
        assert!(ground.residual(r).abs() < 1e-8);
        for s in &singular {
            assert!(s.residual(r).abs() < 1e-8, "N={} r={r}: {}", s.n, s.residual(r));
        }
    }
}

#[test]
fn q4_has_the_expected_amplitude() {
    let s = soliton(SolitonKind::Singular, 4.0).unwrap();
    for &r in &[0.2f64, 1.0, 7.0] {
        assert!((s.value(r) - r.powf(-0.5) / 2f64.sqrt()).abs() < 1e-15);
    }
}

#[test]
fn soliton_preconditions() {
    assert!(matches!(
        soliton::<f64>(SolitonKind::Singular, 2.0),
        Err(Error::NoSingularSoliton(_))
    ));
    assert!(soliton::<f64>(SolitonKind::Ground, 6.0).is_err());
    assert!(soliton::<f64>(SolitonKind::Ground, 4.0).is_ok());
}

#[test]
fn crossing_radii_bound_the_comparison_interval() {
    let (lo, hi) = crossing_radii::<f64>().unwrap();
    assert!((lo - (3.0 - 6f64.sqrt())).abs() < 1e-10, "{lo}");
    assert!((hi - (3.0 + 6f64.sqrt())).abs() < 1e-10, "{hi}");
    let q4 = soliton(SolitonKind::Singular, 4.0).unwrap();
    for &r in &[0.1, 0.5, 5.5, 20.0] {
        assert!(q4.value(r) > q(r), "r={r}");
    }
    for &r in &[0.6, 3.0, 5.4] {
        assert!(q4.value(r) < q(r), "r={r}");
    }
}

struct Scaled<P>(P, f64);

impl<P: RadialProfile<f64>> RadialProfile<f64> for Scaled<P> {
    fn value(&self, r: f64) -> f64 {
        self.1 * self.0.value(r)
    }
    fn derivative(&self, r: f64) -> f64 {
        self.1 * self.0.derivative(r)
    }
    fn laplacian(&self, r: f64) -> f64 {
        self.1 * self.0.laplacian(r)
    }
}

#[test]
fn supersolutions() {
    let radii: Vec<f64> = (1..=200).map(|i| i as f64 * 0.05).collect();
    for &n in &[3.0, 4.0, 6.0] {
        let s = soliton(SolitonKind::Singular, n).unwrap();
        assert!(supersolution_check_profile(&s, n, &radii, 1e-12).holds);
        let v = supersolution_check_profile(&Scaled(s, 1.1), n, &radii, 1e-12);
        assert!(!v.holds && v.margin < -0.1, "{v:?}");
    }
    let g = grid(20.0, 2001);
    let zero = RadialField::zeros(g.clone());
    assert!(supersolution_check(&zero, 4.0, 0.0).unwrap().holds);
    let qf = RadialField::from_fn(g.clone(), Parity::Even, q).unwrap();
    let v = supersolution_check(&qf, 4.0, 1e-6).unwrap();
    assert!(v.holds, "{v:?}");
    let big = RadialField::from_fn(g, Parity::Even, |r| 1.1 * q(r)).unwrap();
    assert!(!supersolution_check(&big, 4.0, 1e-6).unwrap().holds);
}

#[test]
fn ground_state_energy() {
    let g = Arc::new(RadialGrid::sinh(4000.0, 20001, 0.01).unwrap());
    let u = RadialField::from_fn(g.clone(), Parity::Even, q).unwrap();
    let e = energy_focusing(&u, &RadialField::zeros(g.clone())).unwrap();
    let want = 3f64.sqrt() * std::f64::consts::PI.powi(2) / 4.0;
    assert!((e.value - want).abs() / want < 1e-4, "{e:?} vs {want}");
    assert_eq!(energy_focusing(&RadialField::zeros(g.clone()), &RadialField::zeros(g)).unwrap().value, 0.0);
}

#[test]
fn threshold_integrals() {
    let km = kenig_merle_quantities::<f64>();
    let pi2 = std::f64::consts::PI.powi(2);
    let k = 3.0 * 3f64.sqrt() * pi2 / 4.0;
    assert!((km.grad_sq - k).abs() / k < 1e-8, "{km:?}");
    assert!((km.half_grad_sq - 3.0 * 3f64.sqrt() * pi2 / 8.0).abs() < 1e-6);
    assert!((km.potential - k).abs() / k < 1e-8);
    assert!((km.energy_q - k / 3.0).abs() / k < 1e-8);
    assert!((km.energy_momentum - 1.5 * km.energy_q).abs() / k < 1e-8);
    assert!(km.virial.abs() < 1e-6 * k, "{}", km.virial);
    assert!(km.d_energy.abs() < 1e-6 * k);
    assert!((km.d2_energy + 4.0 * k).abs() / k < 1e-5, "{}", km.d2_energy);
}

#[test]
fn time_weights_integrate_cubics() {
    for j in 2..12 {
        let h = 0.1;
        let w = time_weights::<f64>(j, h);
        let s: f64 = w.iter().enumerate().map(|(i, &wi)| wi * (i as f64 * h).powi(3)).sum();
        let t = j as f64 * h;
        assert!((s - t.powi(4) / 4.0).abs() < 1e-14, "j={j}");
        assert!(w.iter().all(|&x| x > 0.0));
    }
}

fn opts(horizon: f64, h: f64) -> IterateOptions {
    IterateOptions {
        horizon,
        h,
        ..IterateOptions::default()
    }
}

#[test]
fn zero_data_give_zero() {
    let g = grid(5.0, 101);
    let d = RadialCauchyData::new(RadialField::zeros(g.clone()), RadialField::zeros(g)).unwrap();
    let it = monotone_iterate(&d, &opts(1.0, 0.05)).unwrap();
    assert!(it.converged);
    assert_eq!(it.n, 1);
    assert!((0..it.u.n_t()).all(|j| it.u.row(j).iter().all(|&v| v == 0.0)));
}

#[test]
fn ground_state_is_a_lattice_fixed_point() {
    let coarse = fixed_point_residual(q, 4.0, 20.0, 4.0, 0.05).unwrap();
    let fine = fixed_point_residual(q, 4.0, 20.0, 4.0, 0.025).unwrap();
    assert!(coarse <= 5e-3, "{coarse}");
    assert!(fine < coarse, "{fine} vs {coarse}");
}

#[test]
fn ground_state_data_converge_to_q_from_below() {
    let g = grid(16.0, 1601);
    let d = RadialCauchyData::new(RadialField::from_fn(g.clone(), Parity::Even, q).unwrap(), RadialField::zeros(g))
        .unwrap();
    let it = monotone_iterate(&d, &opts(3.0, 0.05)).unwrap();
    assert!(it.converged, "{:?}", it.trace.last());
    assert_eq!(it.admissibility.case, Some(crate::criteria::DominationCase::Ii));
    assert_eq!(it.total_violations(), 0);
    let mut worst = 0.0f64;
    for (j, k) in it.u.resolved_nodes() {
        worst = worst.max((it.u.get(j, k) - q(it.u.radius(k))).abs());
    }
    assert!(worst < 5e-3, "{worst}");
}

fn family(a: f64, b: f64, theta: f64, kappa: f64, g: Arc<RadialGrid<f64>>) -> RadialCauchyData<f64> {
    // r u0 increasing, |r u1| <= (r u0)'
    let u0 = move |r: f64| a * (1.0 + r * r / b).powf(-0.5);
    let tu0 = move |r: f64| a * (1.0 + r * r / b).powf(-1.5);
    RadialCauchyData::from_weighted_fns(g, u0, move |r| theta * tu0(r) * (kappa * r).cos(), Parity::Even).unwrap()
}

#[test]
fn ordered_data_give_ordered_monotone_iterates() {
    let g = grid(12.0, 1201);
    let u = family(0.6, 2.0, 0.7, 1.3, g.clone());
    let v = RadialCauchyData::from_weighted(
        u.u0().map(Parity::Even, |_, x| 0.5 * x).unwrap(),
        u.ru1().map(u.ru1().parity(), |_, x| 0.5 * x).unwrap(),
    )
    .unwrap();
    let o = IterateOptions {
        keep_history: true,
        n_max: 40,
        ..opts(2.0, 0.05)
    };
    let a = monotone_iterate(&u, &o).unwrap();
    let b = monotone_iterate(&v, &o).unwrap();
    assert_eq!(a.total_violations(), 0, "{:?}", a.trace);
    assert_eq!(b.total_violations(), 0);
    let steps = a.history.len().min(b.history.len());
    assert!(steps > 2);
    for n in 0..steps {
        for (j, k) in a.history[n].resolved_nodes() {
            let (x, y) = (a.history[n].get(j, k), b.history[n].get(j, k));
            assert!(x >= y && y >= 0.0, "n={n} j={j} k={k}: {x} {y}");
        }
    }
}

#[test]
fn inadmissible_data_are_rejected() {
    let g = grid(8.0, 401);
    let d = RadialCauchyData::from_fns(g, |r: f64| -(-r * r).exp(), |_| 0.0).unwrap();
    assert!(matches!(
        monotone_iterate(&d, &opts(1.0, 0.05)),
        Err(Error::MonotonicityNotGuaranteed)
    ));
}

#[test]
fn odd_powers_run_without_guarantee() {
    let g = grid(8.0, 401);
    let d = family(0.3, 1.0, 0.0, 0.0, g);
    let it = monotone_iterate(&d, &IterateOptions { n: 3.0, ..opts(1.0, 0.05) }).unwrap();
    assert!(!it.admissibility.guaranteed);
    assert!(it.converged);
}

#[test]
fn large_data_are_masked_as_infinite() {
    let g = grid(10.0, 501);
    let d = family(3.0, 1.0, 0.5, 0.0, g);
    let it = monotone_iterate(
        &d,
        &IterateOptions {
            cap: 1e3,
            n_max: 30,
            ..opts(3.0, 0.05)
        },
    )
    .unwrap();
    assert!(it.u.infinite_count() > 0);
    assert!((0..it.u.n_t()).all(|j| it.u.row(j).iter().all(|v| !v.is_nan())));
    assert_eq!(it.total_violations(), 0);
    let fr: Vec<f64> = it.trace.iter().map(|e| e.diverged_fraction).collect();
    assert!(fr.windows(2).all(|w| w[1] >= w[0]), "{fr:?}");
}

#[test]
fn workers_do_not_change_results() {
    let g = grid(8.0, 401);
    let d = family(0.5, 1.0, 0.3, 2.0, g);
    let a = monotone_iterate(&d, &IterateOptions { n_max: 5, ..opts(2.0, 0.05) }).unwrap();
    let b = monotone_iterate(
        &d,
        &IterateOptions {
            n_max: 5,
            workers: 4,
            ..opts(2.0, 0.05)
        },
    )
    .unwrap();
    assert_eq!(a.u, b.u);
}

#[test]
fn lattice_csv_and_trace() {
    let g = grid(4.0, 81);
    let d = family(0.4, 1.0, 0.0, 0.0, g);
    let it = monotone_iterate(&d, &opts(1.0, 0.05)).unwrap();
    let mut buf = Vec::new();
    it.u.write_csv(2, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("t,r,value,resolved"));
    assert_eq!(text.lines().count(), 1 + 11 * 41);
    let json: serde_json::Value = serde_json::from_str(&it.trace_json().unwrap()).unwrap();
    assert_eq!(json["iterations"], it.n);
    assert!(json["trace"].as_array().unwrap().len() == it.n);
}

#[test]
fn threshold_probe_minus_side_stays_below_q() {
    let o = WindowOptions {
        r_max: 12.0,
        ..WindowOptions::default()
    };
    let rep = blowup_window_probe(0.2, Direction::Minus, 3.0, &o).unwrap();
    assert!(rep.domination_margin.unwrap() >= 0.0);
    let l = rep.lattice.as_ref().unwrap();
    assert!(l.converged && l.below_q_margin > 0.0, "{rep:?}");
    assert_eq!(l.monotone_violations, 0);
    assert!(rep.expected, "{rep:?}");
    assert!(blowup_window_probe(0.7, Direction::Plus, 3.0, &o).is_err());
}

#[test]
fn single_precision_kernel() {
    let g = Arc::new(RadialGrid::<f32>::uniform(10.0, 501).unwrap());
    let f = RadialField::constant(g, 1.0f32);
    let k = sine_kernel_radial(&f, 1.5).unwrap();
    assert!((k.values()[100] - 1.5).abs() < 1e-5);
}
