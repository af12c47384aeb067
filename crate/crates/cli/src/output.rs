//! results.csv, results.json (full breakdown) and timing.json.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::run::ResultRecord;

pub const CSV_NAME: &str = "results.csv";
pub const JSON_NAME: &str = "results.json";
pub const TIMING_NAME: &str = "timing.json";

#[derive(Serialize)]
struct Sidecar<'a> {
    config: &'a RunConfig,
    records: &'a [ResultRecord],
}

#[derive(Serialize)]
struct Timing {
    wall_clock_s: Vec<f64>,
    total_s: f64,
}

fn out_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Output(format!("{}: {e}", path.display()))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_rows(cfg: &RunConfig, records: &[ResultRecord]) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let mut rows = Vec::new();
    let header = match cfg.command {
        Command::Lifshitz => {
            for r in records {
                rows.push(vec![
                    r.gap.to_string(),
                    r.temperature.to_string(),
                    opt(r.energy),
                    opt(r.pressure),
                    r.n_terms.to_string(),
                    r.status.as_str().into(),
                ]);
            }
            vec!["H", "T", "F_per_area", "pressure", "n_terms", "status"]
        }
        Command::BemEnergy => {
            for r in records {
                rows.push(vec![
                    r.gap.to_string(),
                    r.temperature.to_string(),
                    cfg.numerics.refinement.to_string(),
                    opt(r.unknowns),
                    opt(r.energy),
                    r.n_terms.to_string(),
                    r.status.as_str().into(),
                ]);
            }
            vec!["gap", "T", "refinement", "unknowns", "F", "n_terms", "status"]
        }
        Command::SphereSphere => {
            for r in records {
                rows.push(vec![
                    r.gap.to_string(),
                    r.temperature.to_string(),
                    cfg.numerics.refinement.to_string(),
                    opt(r.l_max),
                    opt(r.energy),
                    r.n_terms.to_string(),
                    r.status.as_str().into(),
                ]);
            }
            vec!["gap", "T", "refinement", "l_max", "F", "n_terms", "status"]
        }
        Command::Force => {
            for r in records {
                let f = r.force.unwrap_or([f64::NAN; 3]);
                rows.push(vec![
                    r.gap.to_string(),
                    r.temperature.to_string(),
                    cfg.numerics.refinement.to_string(),
                    opt(r.unknowns),
                    f[0].to_string(),
                    f[1].to_string(),
                    f[2].to_string(),
                    r.n_terms.to_string(),
                    r.status.as_str().into(),
                ]);
            }
            vec!["gap", "T", "refinement", "unknowns", "Fx", "Fy", "Fz", "n_terms", "status"]
        }
        Command::Tmatrix => {
            for r in records {
                for t in &r.tmatrix {
                    rows.push(vec![
                        opt(r.kappa),
                        t.p.into(),
                        t.l.to_string(),
                        t.m.to_string(),
                        t.p2.into(),
                        t.l2.to_string(),
                        t.m2.to_string(),
                        t.re.to_string(),
                        t.im.to_string(),
                    ]);
                }
            }
            vec!["kappa", "p", "l", "m", "p2", "l2", "m2", "re", "im"]
        }
    };
    (header, rows)
}

pub fn write_all(dir: &Path, cfg: &RunConfig, records: &[ResultRecord]) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| out_err(dir, e))?;

    let path = dir.join(CSV_NAME);
    let mut w = csv::Writer::from_path(&path).map_err(|e| out_err(&path, e))?;
    let (header, rows) = csv_rows(cfg, records);
    w.write_record(&header).map_err(|e| out_err(&path, e))?;
    for r in rows {
        w.write_record(&r).map_err(|e| out_err(&path, e))?;
    }
    w.flush().map_err(|e| out_err(&path, e))?;

    let path = dir.join(JSON_NAME);
    let text = serde_json::to_string_pretty(&Sidecar { config: cfg, records }).map_err(|e| out_err(&path, e))?;
    fs::write(&path, text + "\n").map_err(|e| out_err(&path, e))?;

    let path = dir.join(TIMING_NAME);
    let wall: Vec<f64> = records.iter().map(|r| r.wall_clock).collect();
    let timing = Timing { total_s: wall.iter().sum(), wall_clock_s: wall };
    let text = serde_json::to_string_pretty(&timing).map_err(|e| out_err(&path, e))?;
    fs::write(&path, text + "\n").map_err(|e| out_err(&path, e))
}
