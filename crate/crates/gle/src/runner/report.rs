//! Plot-ready CSV tables and the run-metadata sidecar. Every float is serialized with 17
//! significant digits, so a rerun with the same config and seed reproduces the tables
//! byte for byte; only the sidecar's wall time varies between runs.

use crate::analysis::MsdPoint;
use crate::runner::config::Config;
use crate::runner::{ConvergenceTable, FdtRow, MsdStudyResult, SingleResult};
use serde::Serialize;
use std::io;
use std::path::{Path, PathBuf};

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn push_row(out: &mut String, cells: &[String]) {
    out.push_str(&cells.join(","));
    out.push('\n');
}

/// Columns: the varying parameter (mass or epsilon), step size, ensemble sizes, sup-error
/// quartiles, mean with standard error, and the 95% interval on the mean.
pub fn convergence_csv(parameter: &str, table: &ConvergenceTable) -> String {
    let mut out = format!(
        "{parameter},dt,n,aborted,q25,median,q75,mean,std_error,ci_lower,ci_upper\n"
    );
    for row in &table.rows {
        let s = row.stats;
        push_row(
            &mut out,
            &[
                fmt_float(row.parameter),
                fmt_float(row.dt),
                s.n.to_string(),
                s.aborted.to_string(),
                fmt_float(s.q25),
                fmt_float(s.median),
                fmt_float(s.q75),
                fmt_float(s.mean),
                fmt_float(s.std_error),
                fmt_float(s.mean - 1.96 * s.std_error),
                fmt_float(s.mean + 1.96 * s.std_error),
            ],
        );
    }
    out
}

pub fn msd_csv(points: &[MsdPoint]) -> String {
    let mut out = String::from("t,mean_square,std_error\n");
    for p in points {
        push_row(&mut out, &[fmt_float(p.t), fmt_float(p.mean_square), fmt_float(p.std_error)]);
    }
    out
}

pub fn fdt_csv(rows: &[FdtRow]) -> String {
    let mut out = String::from("lag,covariance,std_error,kernel,z_score\n");
    for r in rows {
        push_row(
            &mut out,
            &[
                fmt_float(r.lag),
                fmt_float(r.covariance),
                fmt_float(r.std_error),
                fmt_float(r.kernel),
                fmt_float(r.z_score),
            ],
        );
    }
    out
}

pub fn trajectory_csv(result: &SingleResult) -> String {
    let mut out = result.header.join(",");
    out.push('\n');
    for row in &result.rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_float(x)).collect();
        push_row(&mut out, &cells);
    }
    out
}

/// Columns: time, the kernel, and the kernel compensated by its power-law decay.
pub fn kernel_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("t,kernel,t_pow_alpha_kernel\n");
    for &(t, k, tk) in rows {
        push_row(&mut out, &[fmt_float(t), fmt_float(k), fmt_float(tk)]);
    }
    out
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SlopeMeta {
    pub slope: f64,
    pub std_error: f64,
    pub intercept: f64,
    pub n_points: usize,
    pub window: [f64; 2],
}

impl From<&MsdStudyResult> for SlopeMeta {
    fn from(result: &MsdStudyResult) -> Self {
        Self {
            slope: result.fit.slope,
            std_error: result.fit.std_error,
            intercept: result.fit.intercept,
            n_points: result.fit.n_points,
            window: result.window,
        }
    }
}

/// Sidecar record written next to each table. `wall_time_seconds` is the one field that
/// legitimately differs between byte-identical reruns.
#[derive(Debug, Serialize)]
pub struct Metadata<'a> {
    pub experiment: &'a str,
    pub seed: u64,
    pub n_modes: usize,
    pub aborted_total: usize,
    pub wall_time_seconds: f64,
    pub notes: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<SlopeMeta>,
    pub config_echo: &'a Config,
}

pub fn metadata_toml(meta: &Metadata) -> String {
    toml::to_string_pretty(meta).expect("metadata has no unserializable values")
}

/// Writes `<stem>.csv` and `<stem>.meta.toml` under `dir`, creating it if needed.
pub fn write_outputs(
    dir: &Path,
    stem: &str,
    csv: &str,
    metadata: &str,
) -> io::Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let meta_path = dir.join(format!("{stem}.meta.toml"));
    std::fs::write(&csv_path, csv)?;
    std::fs::write(&meta_path, metadata)?;
    Ok((csv_path, meta_path))
}
