//! Experiment dispatch: each run writes its tables and `report.json` into
//! the output directory, then the manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use wgnls::dynamics::evolve_with;
use wgnls::functionals::{diagnostics, DiagnosticsSpec};
use wgnls::probes::data::{scale_to_sobolev, SmoothData};
use wgnls::probes::report::ProbeReport;
use wgnls::probes::schedule::imethod_schedule;
use wgnls::probes::{
    almost_conservation_experiment, bilinear, dmod_drift_experiment, scaling_check, sobolev_growth_experiment,
    strichartz, strichartz_probe, DriftConfig,
};
use wgnls::{Grid, Spectrum};

use crate::config::{Experiment, RunConfig};
use crate::output::{self, CsvWriter};
use crate::error::{CliError, CliResult};

pub struct RunSummary {
    pub output: PathBuf,
    pub files: Vec<PathBuf>,
}

fn smooth_data(cfg: &RunConfig, grid: &Grid) -> CliResult<Spectrum> {
    let data = SmoothData { decay: cfg.decay, cutoff: cfg.cutoff, rms: cfg.rms, seed: cfg.seed };
    Ok(data.build(grid)?)
}

fn drift_config(cfg: &RunConfig) -> DriftConfig {
    DriftConfig {
        n_list: cfg.n_list.clone(),
        t_loc: cfg.t,
        dt: cfg.dt,
        record_stride: cfg.stride,
        dealias: cfg.dealias,
    }
}

/// Runs the configured experiment. A stale manifest is removed first, so a
/// directory holds a manifest only after a complete run.
pub fn run(cfg: &RunConfig) -> CliResult<RunSummary> {
    let dir = cfg.output_dir();
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let manifest = dir.join(output::MANIFEST);
    if manifest.exists() {
        fs::remove_file(&manifest).map_err(|e| CliError::io(&manifest, e))?;
    }
    let started = output::unix_seconds();
    let grid = cfg.grid.as_ref().map(|g| g.build()).transpose()?;
    let files = match (cfg.experiment, &grid) {
        (Experiment::Schedule, _) => run_schedule(cfg, dir)?,
        (_, None) => return Err(CliError::Validation(format!("experiment {} has no grid", cfg.experiment))),
        (Experiment::Conserve, Some(g)) => run_conserve(cfg, g, dir)?,
        (Experiment::Bilinear, Some(g)) => {
            let report = bilinear::bilinear_sweep(g, &cfg.n_list, cfg.n2, cfg.t, cfg.trials, cfg.seed)?;
            report_files(dir, "bilinear.csv", &bilinear::COLUMNS, &report)?
        }
        (Experiment::Strichartz, Some(g)) => {
            let report = strichartz_probe(g, &cfg.n_list, cfg.t, cfg.trials, cfg.seed)?;
            report_files(dir, "strichartz.csv", &strichartz::COLUMNS, &report)?
        }
        (Experiment::AlmostI, Some(g)) => {
            let u0 = smooth_data(cfg, g)?;
            let s = cfg.s_value().expect("defaulted");
            let report = almost_conservation_experiment(&u0, &[s], &drift_config(cfg))?;
            report_files(dir, "drift.csv", &output::DRIFT_COLUMNS, &report)?
        }
        (Experiment::AlmostD, Some(g)) => {
            let u0 = smooth_data(cfg, g)?;
            let report = dmod_drift_experiment(&u0, &drift_config(cfg))?;
            report_files(dir, "drift.csv", &output::DRIFT_COLUMNS, &report)?
        }
        (Experiment::Growth, Some(g)) => {
            let u0 = scale_to_sobolev(&smooth_data(cfg, g)?, 2.0, cfg.a)?;
            let report = sobolev_growth_experiment(&u0, &cfg.evolution(), cfg.delta)?;
            report_files(dir, "growth.csv", &output::GROWTH_COLUMNS, &report)?
        }
        (Experiment::Scaling, Some(g)) => run_scaling(cfg, g, dir)?,
    };
    output::commit_manifest(dir, cfg, grid.map(|g| g.to_string()), started, &files)?;
    Ok(RunSummary { output: dir.to_path_buf(), files })
}

fn report_files(dir: &Path, table: &str, columns: &[&str], report: &ProbeReport) -> CliResult<Vec<PathBuf>> {
    Ok(vec![
        output::write_table(&dir.join(table), columns, &report.columns, &report.rows)?,
        output::write_json(&dir.join("report.json"), report)?,
    ])
}

#[derive(Serialize)]
struct ConserveSummary {
    experiment: &'static str,
    grid: String,
    rows: usize,
    mass_relative_drift: f64,
    energy_relative_drift: f64,
    momentum_drift: f64,
}

/// Diagnostics rows are streamed while evolving. `e_d` is recorded when a
/// single `n` is configured, `e_i` when `s` is given as well.
fn run_conserve(cfg: &RunConfig, grid: &Grid, dir: &Path) -> CliResult<Vec<PathBuf>> {
    let u0 = smooth_data(cfg, grid)?;
    let n = match cfg.n_list.as_slice() {
        [n] => Some(*n),
        _ => None,
    };
    let spec = DiagnosticsSpec { i: n.zip(cfg.s_value()), d: n };
    let mut csv = CsvWriter::create(&dir.join("diagnostics.csv"), &output::DIAGNOSTICS_COLUMNS)?;
    let mut first: Option<(f64, f64, Vec<f64>)> = None;
    let (mut dm, mut de, mut dp, mut rows) = (0.0f64, 0.0f64, 0.0f64, 0usize);
    let mut io_error = None;
    let result = evolve_with(&u0, &cfg.evolution(), |t, f| {
        let r = diagnostics(t, f, &spec)?;
        let mut cells = vec![Some(r.t), Some(r.mass), Some(r.energy)];
        cells.extend(r.momentum.iter().map(|&p| Some(p)));
        cells.extend([Some(r.h1), Some(r.h2), r.e_i, r.e_d]);
        if let Err(e) = csv.row(&cells) {
            io_error.get_or_insert(e);
        }
        rows += 1;
        match &first {
            None => first = Some((r.mass, r.energy, r.momentum.clone())),
            Some((m0, e0, p0)) => {
                dm = dm.max(((r.mass - m0) / m0).abs());
                de = de.max(((r.energy - e0) / e0).abs());
                let dist = r.momentum.iter().zip(p0).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                dp = dp.max(dist);
            }
        }
        Ok(())
    });
    // flush what was computed before reporting a failure
    let path = csv.finish()?;
    if let Some(e) = io_error {
        return Err(e);
    }
    result?;
    let summary = ConserveSummary {
        experiment: "conserve",
        grid: grid.to_string(),
        rows,
        mass_relative_drift: dm,
        energy_relative_drift: de,
        momentum_drift: dp,
    };
    Ok(vec![path, output::write_json(&dir.join("report.json"), &summary)?])
}

#[derive(Serialize)]
struct ScheduleRow {
    s: String,
    n: f64,
    lambda_exponent: String,
    time_exponent: String,
    energy_exponent: Option<String>,
    lambda: f64,
    time: f64,
}

fn ratio_text((p, q): (i64, i64)) -> String {
    if q == 1 {
        p.to_string()
    } else {
        format!("{p}/{q}")
    }
}

fn run_schedule(cfg: &RunConfig, dir: &Path) -> CliResult<Vec<PathBuf>> {
    let s = cfg.s_exact().expect("required for schedule");
    let s_float = cfg.s_value().expect("required for schedule");
    let mut csv = CsvWriter::create(&dir.join("schedule.csv"), &output::SCHEDULE_COLUMNS)?;
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        let sched = imethod_schedule(s, n)?;
        sched.require_global()?;
        let as_f64 = |(p, q): (i64, i64)| p as f64 / q as f64;
        csv.row(&[
            Some(s_float),
            Some(n),
            Some(sched.lambda),
            Some(as_f64(sched.time_exponent)),
            sched.energy_exponent.map(as_f64),
        ])?;
        rows.push(ScheduleRow {
            s: ratio_text(sched.s),
            n,
            lambda_exponent: ratio_text(sched.lambda_exponent),
            time_exponent: ratio_text(sched.time_exponent),
            energy_exponent: sched.energy_exponent.map(ratio_text),
            lambda: sched.lambda,
            time: sched.time,
        });
    }
    Ok(vec![csv.finish()?, output::write_json(&dir.join("report.json"), &rows)?])
}

fn run_scaling(cfg: &RunConfig, grid: &Grid, dir: &Path) -> CliResult<Vec<PathBuf>> {
    let u0 = smooth_data(cfg, grid)?;
    let err = scaling_check(&u0, cfg.lambda, cfg.t, cfg.dt, cfg.dealias)?;
    let mut csv = CsvWriter::create(&dir.join("scaling.csv"), &output::SCALING_COLUMNS)?;
    csv.row(&[Some(cfg.lambda), Some(cfg.t), Some(cfg.dt), Some(err)])?;
    let mut report = ProbeReport::new("scaling", grid.to_string(), &output::SCALING_COLUMNS);
    report.push_row(vec![Some(cfg.lambda), Some(cfg.t), Some(cfg.dt), Some(err)]);
    report.seed = Some(cfg.seed);
    Ok(vec![csv.finish()?, output::write_json(&dir.join("report.json"), &report)?])
}
