use std::collections::BTreeSet;
use std::path::Path;

use crate::commands::Ctx;
use crate::config::{Config, ConfigError, Scenario};
use crate::report::{write_series, RunReport, Series};
use crate::{execute, run_report, Failure};

/// Sets the dotted `path` of a scenario to `value`; the key must exist.
fn set_param(s: &Scenario, path: &str, value: f64) -> Result<Scenario, ConfigError> {
    let mut doc = toml::Value::try_from(s).map_err(|e| ConfigError(format!("sweep: {e}")))?;
    let keys: Vec<&str> = path.split('.').collect();
    let mut node = &mut doc;
    for (i, k) in keys.iter().enumerate() {
        let table = node
            .as_table_mut()
            .ok_or_else(|| ConfigError(format!("sweep: {} is not a table", keys[..i].join("."))))?;
        node = table
            .get_mut(*k)
            .ok_or_else(|| ConfigError(format!("sweep: parameter {path:?} is not addressable in scenario {:?}", s.name)))?;
    }
    *node = match node {
        toml::Value::Integer(_) if value.fract() == 0.0 => toml::Value::Integer(value as i64),
        toml::Value::Float(_) | toml::Value::Integer(_) => toml::Value::Float(value),
        other => {
            return Err(ConfigError(format!(
                "sweep: parameter {path:?} holds a {}, not a number",
                other.type_str()
            )))
        }
    };
    let out: Scenario = doc.try_into().map_err(|e| ConfigError(format!("sweep: {e}")))?;
    out.validate()?;
    Ok(out)
}

pub fn run(
    cfg: &Config,
    param: &str,
    values: &[f64],
    ctx: &Ctx,
    out_dir: &Path,
) -> Result<(RunReport, Vec<Series>), Failure> {
    if values.is_empty() {
        return Err(ConfigError("sweep: --values is empty".into()).into());
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(ConfigError(format!("sweep: non-finite value {v}")).into());
    }
    let [base] = cfg.scenarios.as_slice() else {
        return Err(ConfigError("sweep: select exactly one scenario (--scenario)".into()).into());
    };
    let mut plan = Vec::with_capacity(values.len());
    for (i, &v) in values.iter().enumerate() {
        let mut s = set_param(base, param, v)?;
        s.name = format!("{}-sweep-{i:03}", base.name);
        let checks = s.checks();
        plan.push((s, checks));
    }
    let (reports, mut series) = execute(&cfg.base, plan, ctx, out_dir)?;

    let columns: BTreeSet<String> = reports
        .iter()
        .flat_map(|r| {
            r.checks
                .iter()
                .flat_map(|c| c.metrics.keys().map(move |k| format!("{}.{k}", c.command.name())))
        })
        .collect();
    let mut header = vec![param.to_string(), "passed".to_string()];
    header.extend(columns.iter().cloned());
    let rows: Vec<Vec<f64>> = reports
        .iter()
        .zip(values)
        .map(|(r, &v)| {
            let mut row = vec![v, if r.passed { 1.0 } else { 0.0 }];
            for col in &columns {
                let (cmd, key) = col.split_once('.').expect("column is command.metric");
                let value = r
                    .checks
                    .iter()
                    .find(|c| c.command.name() == cmd)
                    .and_then(|c| c.metrics.get(key))
                    .copied()
                    .unwrap_or(f64::NAN);
                row.push(value);
            }
            row
        })
        .collect();
    let path = out_dir.join("sweep.csv");
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write_series(&path, &header_refs, &rows).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    for (i, col) in columns.iter().enumerate() {
        series.push(Series {
            file: "sweep.csv".into(),
            title: format!("{}: {col} against {param}", base.name),
            x_label: param.into(),
            y: vec![i + 3],
            log_y: false,
            tag: col.replace('.', "_"),
        });
    }
    Ok((run_report("sweep", ctx, reports), series))
}
