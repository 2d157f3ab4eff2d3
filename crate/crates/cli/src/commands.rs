use std::fs::File;
use std::io::BufWriter;

use serde_json::json;

use wavepos::criteria::{quadratic_global_condition, radial_positivity, supercritical_envelope};
use wavepos::fd_oracle::{fd_solve, FdOptions, FdStatus};
use wavepos::focusing_solver::{
    admissibility, blowup_window_probe, monotone_iterate, supersolution_check, IterateOptions, WindowOptions,
};
use wavepos::null_solver::{conserved_energy, detect_blowup, verify_pointwise_bounds, NullSolution};
use wavepos::radial::io::{to_json, write_csv};
use wavepos::transforms::ProfileSpec;

use crate::config::{Built, Command, DataSpec, Equation, Scenario};
use crate::report::{write_json, write_series, CheckReport, OutDir, Series};

const ENERGY_FLOOR: f64 = 1e-12;

type Res<T> = Result<T, Box<dyn std::error::Error + Send + Sync>>;

#[derive(Debug, Clone, Copy)]
pub struct Ctx {
    pub tolerance_scale: f64,
    pub workers: usize,
}

pub fn run_check(s: &Scenario, built: &Built, cmd: Command, ctx: &Ctx, out: &OutDir) -> CheckReport {
    let mut rep = CheckReport::new(cmd);
    let run = match cmd {
        Command::Classify => classify(s, built, &mut rep, out),
        Command::Solve => solve(s, built, ctx, &mut rep, out),
        Command::Blowup => blowup(s, built, &mut rep, out),
        Command::Iterate => iterate(s, built, ctx, &mut rep, out),
        Command::Oracle => oracle(s, built, ctx, &mut rep, out),
        Command::Window => window(s, ctx, &mut rep, out),
    };
    match run {
        Ok(()) => rep,
        Err(e) => {
            let mut failed = CheckReport::failed_run(cmd, e);
            failed.files = rep.files;
            failed.series = rep.series;
            failed
        }
    }
}

fn power(s: &Scenario) -> f64 {
    match s.equation {
        Equation::Focusing { n, .. } => n,
        Equation::NullForm { .. } => 0.0,
    }
}

fn expect_holds(s: &Scenario, rep: &mut CheckReport, holds: bool, what: &str) {
    if let Some(want) = s.expect.holds {
        rep.assert("expect.holds", holds == want, format!("{what} holds = {holds}, expected {want}"));
    }
}

fn classify(s: &Scenario, b: &Built, rep: &mut CheckReport, out: &OutDir) -> Res<()> {
    let data = &b.data;
    let details = match &b.profile {
        Some(p) => {
            let cls = p.classification();
            let quad = quadratic_global_condition(data, p, true)?;
            let pos = radial_positivity(data, false)?;
            rep.metric("margin", quad.margin);
            rep.metric("positivity_margin", pos.margin);
            if let Some(a) = p.a() {
                rep.metric("a", a);
            }
            if let Some(b) = p.b() {
                rep.metric("b", b);
            }
            expect_holds(s, rep, quad.holds, &quad.criterion);
            json!({
                "profile": p.name(),
                "endpoint_case": format!("{:?}", cls.case()),
                "classification": cls,
                "a": p.a(),
                "b": p.b(),
                "verdicts": [quad, pos],
            })
        }
        None => {
            let n = power(s);
            let adm = admissibility(data, n)?;
            let sup = supersolution_check(data.u0(), n, 1e-6)?;
            let env = if n > 2.0 {
                Some(supercritical_envelope(&data.clone().into(), n, 1.0, false)?)
            } else {
                None
            };
            rep.metric("supersolution_margin", sup.margin);
            if let Some(e) = &env {
                rep.metric("envelope_margin", e.margin);
            }
            rep.metric("admissible", if adm.holds() { 1.0 } else { 0.0 });
            expect_holds(s, rep, adm.holds(), "admissibility");
            json!({
                "power": n,
                "admissibility": adm,
                "verdicts": [Some(sup), env],
            })
        }
    };
    let (path, rel) = out.file("classify.verdicts.json");
    write_json(&path, &details)?;
    rep.files.push(rel);
    rep.details = details;
    Ok(())
}

fn solve(s: &Scenario, b: &Built, ctx: &Ctx, rep: &mut CheckReport, out: &OutDir) -> Res<()> {
    let profile = b.profile.clone().expect("null-form scenario");
    let sol = NullSolution::new(&b.data, profile.clone())?;
    let validity = sol.validity();
    let probes = s.probes.set(s.horizon);
    let mut rows = Vec::new();
    for &t in &probes.times {
        if !validity.contains(t) {
            continue;
        }
        let st = sol.state(t)?;
        let reach = st.u.grid().r_max() - t.abs();
        let sup = st
            .u
            .nodes()
            .iter()
            .zip(st.u.values())
            .filter(|(&r, _)| r <= reach)
            .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
        let e = conserved_energy(&st.u, &st.u_t, &profile)?.value;
        rows.push(vec![t, sup, e]);
    }
    let header = ["t", "sup_u", "energy"];
    let (path, rel) = out.file("solve.series.csv");
    write_series(&path, &header, &rows)?;
    rep.files.push(rel.clone());
    rep.series.push(Series::all(rel, format!("{}: sup |u| and energy", s.name), &header, false));

    let global = validity.contains(s.horizon) && validity.contains(-s.horizon);
    rep.metric("global", if validity.is_global() { 1.0 } else { 0.0 });
    if let Some(want) = s.expect.global {
        rep.assert(
            "expect.global",
            global == want,
            format!("solution exists on [-{h}, {h}]: {global}, expected {want}", h = s.horizon),
        );
    }
    if let Some(e0) = rows.iter().find(|r| r[0] == 0.0).map(|r| r[2]).or(rows.first().map(|r| r[2])) {
        // energies below the floor count as zero
        let scale = e0.abs().max(ENERGY_FLOOR);
        let drift = rows.iter().map(|r| (r[2] - e0).abs() / scale).fold(0.0, f64::max);
        rep.metric("energy_drift", drift);
        let limit = s.expect.max_drift.unwrap_or(1e-6) * ctx.tolerance_scale;
        if global || s.expect.max_drift.is_some() {
            rep.assert("energy.drift", drift <= limit, format!("relative drift {drift:e} (limit {limit:e})"));
        }
    }
    if validity.contains(s.horizon) {
        let st = sol.state(s.horizon)?;
        let (p, rel) = out.file("solve.u.csv");
        write_csv(&st.u, BufWriter::new(File::create(&p)?))?;
        rep.files.push(rel);
        let (p, rel) = out.file("solve.u.json");
        std::fs::write(&p, to_json(&st.u)? + "\n")?;
        rep.files.push(rel);
    }
    let mut details = json!({ "validity": validity, "probe_times": probes.times });
    if matches!(profile_spec(s), Some(ProfileSpec::Const { c }) if *c == 1.0) {
        let verdict = quadratic_global_condition(&b.data, &profile, true)?;
        if verdict.holds {
            let pw = verify_pointwise_bounds(&sol, &probes)?;
            rep.assert(
                "pointwise.bounds",
                pw.passed(),
                format!("{} probes, {} violations", pw.probes, pw.violations.len()),
            );
            details["pointwise"] = serde_json::to_value(&pw)?;
        }
    }
    rep.details = details;
    Ok(())
}

fn profile_spec(s: &Scenario) -> Option<&ProfileSpec> {
    match &s.equation {
        Equation::NullForm { f } => Some(f),
        Equation::Focusing { .. } => None,
    }
}

fn blowup(s: &Scenario, b: &Built, rep: &mut CheckReport, out: &OutDir) -> Res<()> {
    let profile = b.profile.clone().expect("null-form scenario");
    let r = detect_blowup(&b.data, &profile)?;
    rep.metric("t0", r.t0);
    rep.metric("r0", r.r0);
    rep.metric("x0_radius", r.x0_radius);
    rep.assert(
        "window",
        r.within_window,
        format!("|t0| = {} against r0 = {}", r.t0.abs(), r.r0),
    );
    if let Some([lo, hi]) = s.expect.t0 {
        rep.assert(
            "expect.t0",
            r.t0 > lo && r.t0 <= hi,
            format!("t0 = {} expected in ({lo}, {hi}]", r.t0),
        );
    }
    if let Some(fit) = &r.log_rate_fit {
        rep.metric("log_rate_slope", fit.slope);
        let rows: Vec<Vec<f64>> = fit.samples.iter().map(|&(d, u)| vec![-d.ln(), u]).collect();
        let header = ["abs_log_dt", "sup_u"];
        let (path, rel) = out.file("blowup.log_rate.csv");
        write_series(&path, &header, &rows)?;
        rep.files.push(rel.clone());
        let title = format!("{}: sup |u| against |ln|t - t0||, slope {:.3}", s.name, fit.slope);
        rep.series.push(Series::all(rel, title, &header, false));
    }
    let (path, rel) = out.file("blowup.report.json");
    write_json(&path, &r)?;
    rep.files.push(rel);
    rep.details = serde_json::to_value(&r)?;
    Ok(())
}

fn iterate(s: &Scenario, b: &Built, ctx: &Ctx, rep: &mut CheckReport, out: &OutDir) -> Res<()> {
    let opts = IterateOptions {
        n: power(s),
        horizon: s.horizon,
        h: s.iterate.h,
        r_max: s.iterate.r_max,
        cap: s.iterate.cap,
        tol: s.iterate.tol,
        n_max: s.iterate.n_max,
        keep_history: false,
        workers: ctx.workers,
        ..IterateOptions::default()
    };
    let it = monotone_iterate(&b.data, &opts)?;
    let summary = it.u.summary();
    rep.metric("iterations", it.n as f64);
    rep.metric("converged", if it.converged { 1.0 } else { 0.0 });
    rep.metric("sup_resolved", summary.sup_resolved);
    rep.metric("infinite_nodes", summary.infinite_nodes as f64);
    rep.metric("violations", it.total_violations() as f64);
    if it.admissibility.guaranteed {
        rep.assert(
            "monotone",
            it.total_violations() == 0,
            format!("{} decreasing nodes over {} iterations", it.total_violations(), it.n),
        );
    }
    if let Some(want) = s.expect.converged {
        rep.assert("expect.converged", it.converged == want, format!("converged = {}", it.converged));
    }
    let (path, rel) = out.file("iterate.trace.json");
    std::fs::write(&path, it.trace_json()? + "\n")?;
    rep.files.push(rel);
    let (path, rel) = out.file("iterate.lattice.csv");
    it.u.write_csv(s.probes.lattice_stride, BufWriter::new(File::create(&path)?))?;
    rep.files.push(rel);
    let rows: Vec<Vec<f64>> = it
        .trace
        .iter()
        .map(|e| vec![e.n as f64, e.sup_change, e.diverged_fraction])
        .collect();
    let header = ["n", "sup_change", "diverged_fraction"];
    let (path, rel) = out.file("iterate.series.csv");
    write_series(&path, &header, &rows)?;
    rep.files.push(rel.clone());
    rep.series.push(Series::all(rel, format!("{}: monotone iteration", s.name), &header, true));
    rep.details = json!({ "lattice": summary, "admissibility": it.admissibility, "options": opts });
    Ok(())
}

fn oracle(s: &Scenario, b: &Built, ctx: &Ctx, rep: &mut CheckReport, out: &OutDir) -> Res<()> {
    let opts = FdOptions {
        h: s.oracle.h,
        cfl: s.oracle.cfl,
        r_max: s.oracle.r_max,
        blowup_threshold: s.oracle.threshold,
        snapshot_times: s.oracle.snapshots.clone(),
    };
    let rhs = s.equation.rhs();
    let run = fd_solve(&b.data, &rhs, s.horizon, &opts)?;
    let t_detect = match run.status {
        FdStatus::BlewUp { t_detect } => Some(t_detect),
        _ => None,
    };
    rep.metric("sup_max", run.sup_max());
    rep.metric("final_time", run.final_time());
    if let Some(t) = t_detect {
        rep.metric("t_detect", t);
    }
    if let Some(want) = s.expect.blowup {
        rep.assert(
            "expect.blowup",
            t_detect.is_some() == want,
            format!("status {:?}, expected blow-up {want}", run.status),
        );
    }
    if let FdStatus::Unstable { t, .. } = run.status {
        rep.assert("stable", false, format!("the scheme went unstable at t = {t}"));
    }
    for (i, (_, u)) in run.snapshots.iter().enumerate() {
        let (path, rel) = out.file(&format!("oracle.snapshot-{i:02}.csv"));
        write_csv(u, BufWriter::new(File::create(&path)?))?;
        rep.files.push(rel);
    }
    let rows: Vec<Vec<f64>> = run.sup_history.iter().map(|p| vec![p.t, p.sup]).collect();
    let header = ["t", "sup_u"];
    let (path, rel) = out.file("oracle.series.csv");
    write_series(&path, &header, &rows)?;
    rep.files.push(rel.clone());
    let title = format!("{}: finite-difference sup |u|", s.name);
    rep.series.push(Series::all(rel, title, &header, t_detect.is_some()));

    let mut error = None;
    if let (Some(profile), FdStatus::Completed) = (&b.profile, run.status) {
        let sol = NullSolution::new(&b.data, profile.clone())?;
        let t = run.final_time();
        if sol.validity().contains(t) {
            let reach = b.data.grid().r_max().min(run.grid.r_max()) - t;
            let u = run.last();
            let mut e = 0.0f64;
            for (&r, &v) in u.nodes().iter().zip(u.values()) {
                if r <= reach {
                    e = e.max((v - sol.u(r, t)?).abs());
                }
            }
            rep.metric("max_error", e);
            error = Some(e);
        }
    }
    if let Some(limit) = s.expect.max_error {
        let limit = limit * ctx.tolerance_scale;
        match error {
            Some(e) => rep.assert("expect.max_error", e <= limit, format!("error {e:e} (limit {limit:e})")),
            None => rep.assert("expect.max_error", false, "no exact comparison available"),
        }
    }
    let energy_drift = match (run.energy_history.first(), run.energy_history.last()) {
        (Some(&e0), Some(&e1)) if e0 != 0.0 => Some(((e1 - e0) / e0).abs()),
        _ => None,
    };
    let meta = json!({
        "rhs": rhs,
        "options": opts,
        "h": run.h,
        "k": run.k,
        "horizon": run.horizon,
        "final_time": run.final_time(),
        "status": run.status,
        "t_detect": t_detect,
        "sup_max": run.sup_max(),
        "linear_energy_drift": energy_drift,
        "max_error": error,
        "snapshot_times": run.snapshots.iter().map(|s| s.0).collect::<Vec<_>>(),
    });
    let (path, rel) = out.file("oracle.meta.json");
    write_json(&path, &meta)?;
    rep.files.push(rel);
    rep.details = meta;
    Ok(())
}

fn window(s: &Scenario, ctx: &Ctx, rep: &mut CheckReport, out: &OutDir) -> Res<()> {
    let DataSpec::Window {
        epsilon,
        direction,
        plus_data,
    } = s.data
    else {
        unreachable!("validated");
    };
    let grid = s.grid.as_ref().expect("validated").build()?;
    let opts = WindowOptions {
        r_max: grid.r_max(),
        lattice_h: s.iterate.h,
        fd_h: s.oracle.h,
        threshold: s.oracle.threshold,
        lattice: true,
        n_max: s.iterate.n_max,
        workers: ctx.workers,
        plus_data,
    };
    let r = blowup_window_probe(epsilon, direction, s.horizon, &opts)?;
    rep.metric("sup_max", r.oracle.sup_max);
    rep.metric("decay_ratio", r.oracle.decay_ratio);
    if let Some(t) = r.oracle.t_detect {
        rep.metric("t_detect", t);
    }
    if let Some(l) = &r.lattice {
        rep.metric("below_q_margin", l.below_q_margin);
        rep.metric("lattice_sup", l.sup);
    }
    rep.assert(
        "window.expected",
        r.expected,
        format!("{:?} side: status {:?}, sup {}", direction, r.oracle.status, r.oracle.sup_max),
    );
    if let Some(want) = s.expect.blowup {
        let got = r.oracle.t_detect.is_some();
        rep.assert("expect.blowup", got == want, format!("blow-up detected {got}, expected {want}"));
    }
    let (path, rel) = out.file("window.report.json");
    write_json(&path, &r)?;
    rep.files.push(rel);
    rep.details = serde_json::to_value(&r)?;
    Ok(())
}
