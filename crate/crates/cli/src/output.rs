//! manifest.json, results.csv and snapshots, each written atomically.

use std::collections::BTreeMap;
use std::path::Path;

use fracdisp_core::params::{Exact, SmoothingConstants};
use fracdisp_core::spectral::{save_field, write_atomic};
use serde::Serialize;

use crate::config::{ScenarioConfig, MANIFEST_FORMAT};
use crate::error::CliError;
use crate::run::Outcome;

#[derive(Serialize)]
struct Manifest<'a> {
    format: &'static str,
    version: &'static str,
    scenario: &'static str,
    config: &'a ScenarioConfig,
    /// Exact rationals where α, β (and p, s) are rational.
    derived: BTreeMap<&'static str, Option<String>>,
    derived_values: BTreeMap<&'static str, Option<f64>>,
    pass: bool,
    results: &'static str,
    snapshots: Vec<&'a str>,
    summary: &'a serde_json::Value,
}

fn derived(cfg: &ScenarioConfig) -> Result<Vec<(&'static str, Option<Exact>)>, CliError> {
    let fp = cfg.frac_params()?;
    let dc = fp.derived();
    let sc = SmoothingConstants::from_params(&fp, cfg.options.s.expect("resolved config"));
    Ok(vec![
        ("delta", Some(dc.delta)),
        ("p0", dc.p0),
        ("kappa", dc.kappa),
        ("nu", dc.nu),
        ("kappa_p", Some(dc.kappa_p)),
        ("nu_p", Some(dc.nu_p)),
        ("gamma", Some(sc.gamma)),
        ("nu_smooth", Some(sc.nu_smooth)),
        ("sigma", Some(sc.sigma)),
        ("varsigma", Some(sc.varsigma)),
    ])
}

pub fn write_outputs(cfg: &ScenarioConfig, outcome: &Outcome) -> Result<(), CliError> {
    let constants = derived(cfg)?;
    let dir = &cfg.output;
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Output { path, source }
    };
    std::fs::create_dir_all(dir).map_err(|e| io(dir)(e.into()))?;

    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| io(dir)(fracdisp_core::Error::Io(e.into()));
    w.write_record(&outcome.header).map_err(csv_err)?;
    for row in &outcome.rows {
        w.write_record(row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| csv_err(e.into_error().into()))?;
    let results = dir.join("results.csv");
    write_atomic(&results, &bytes).map_err(io(&results))?;

    for (name, field, t) in &outcome.snapshots {
        let path = dir.join(name);
        save_field(&path, field, *t).map_err(io(&path))?;
    }

    let manifest = Manifest {
        format: MANIFEST_FORMAT,
        version: env!("CARGO_PKG_VERSION"),
        scenario: cfg.kind.id(),
        config: cfg,
        derived: constants.iter().map(|(k, v)| (*k, v.as_ref().map(|e| e.to_string()))).collect(),
        derived_values: constants.iter().map(|(k, v)| (*k, v.as_ref().map(|e| e.value))).collect(),
        pass: outcome.pass,
        results: "results.csv",
        snapshots: outcome.snapshots.iter().map(|s| s.0.as_str()).collect(),
        summary: &outcome.summary,
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| io(&path)(e.into()))?;
    write_atomic(&path, text.as_bytes()).map_err(io(&path))
}
