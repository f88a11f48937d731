//! CSV and JSON artifacts.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use sawfeti::feti::{StageTimings, SubregionField};
use sawfeti::qtsolver::MethodResult;

pub const FIELD_HEADER: [&str; 11] = [
    "x1_m", "x2_m", "x3_m", "u1_re", "u1_im", "u2_re", "u2_im", "u3_re", "u3_im", "phi_re",
    "phi_im",
];

pub const TIMING_HEADER: [&str; 8] = [
    "frequency_hz",
    "assemble_blocks_s",
    "solve_multipliers_s",
    "solve_matrix_equations_s",
    "compute_smw_s",
    "recover_fields_s",
    "total_s",
    "path",
];

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))
}

/// One row per node of every subregion instance.
pub fn write_fields(path: &Path, fields: &[SubregionField]) -> Result<usize> {
    let mut w = writer(path)?;
    w.write_record(FIELD_HEADER)?;
    let mut rows = 0;
    for f in fields {
        for n in &f.nodes {
            let v = [
                n.x[0], n.x[1], n.x[2], n.u[0].re, n.u[0].im, n.u[1].re, n.u[1].im, n.u[2].re,
                n.u[2].im, n.phi.re, n.phi.im,
            ];
            w.write_record(v.iter().map(|x| format!("{x:.17e}")))?;
            rows += 1;
        }
    }
    w.flush()?;
    Ok(rows)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

pub fn write_timings(path: &Path, rows: &[(f64, StageTimings, &str)]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(TIMING_HEADER)?;
    for (hz, t, p) in rows {
        w.write_record([
            format!("{hz:e}"),
            format!("{:.6}", t.assemble_blocks),
            format!("{:.6}", t.solve_multipliers),
            opt(t.solve_matrix_equations),
            opt(t.compute_smw),
            format!("{:.6}", t.recover_fields),
            format!("{:.6}", t.total),
            p.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_methods(path: &Path, rows: &[MethodResult]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "method",
        "time_s",
        "err",
        "iterations",
        "converged",
        "failure",
    ])?;
    for r in rows {
        w.write_record([
            r.method.name().to_string(),
            format!("{:.6}", r.seconds),
            r.err.map(|e| format!("{e:.3e}")).unwrap_or_default(),
            r.iterations.to_string(),
            r.converged.to_string(),
            r.failure.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
