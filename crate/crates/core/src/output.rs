//! CSV and JSON artifacts.
//!
//! Floats are written with Rust's shortest round-trip formatting, so identical
//! runs produce identical bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Side, TwoDomainMesh};
use crate::lab::{AprioriAuditReport, MoscoReport, RateStudyReport};
use crate::stepper::Trajectory;

fn num(x: f64) -> String {
    format!("{x}")
}

fn writer(path: &Path, header: &[&str]) -> Result<csv::Writer<File>> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(header).map_err(csv_error)?;
    Ok(w)
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

fn finish(mut w: csv::Writer<File>) -> Result<()> {
    w.flush()?;
    Ok(())
}

/// `t,x,subdomain,value` for every `stride`-th state and the final one.
pub fn write_fields(path: &Path, mesh: &TwoDomainMesh, traj: &Trajectory, stride: usize) -> Result<()> {
    let mut w = writer(path, &["t", "x", "subdomain", "value"])?;
    let last = traj.len().saturating_sub(1);
    for (n, (t, state)) in traj.times.iter().zip(&traj.states).enumerate() {
        if n % stride.max(1) != 0 && n != last {
            continue;
        }
        for side in [Side::One, Side::Two] {
            for (x, value) in mesh.coords(side).iter().zip(state.part(side)) {
                w.write_record([num(*t), num(*x), side.id().to_string(), num(*value)])
                    .map_err(csv_error)?;
            }
        }
    }
    finish(w)
}

/// `t,energy,moreau_energy,jump,mass,newton_iters`, one row per state.
pub fn write_diag(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut w = writer(path, &["t", "energy", "moreau_energy", "jump", "mass", "newton_iters"])?;
    for d in &traj.diagnostics {
        w.write_record([
            num(d.t),
            num(d.energy),
            num(d.moreau_energy),
            num(d.jump),
            num(d.mass),
            d.newton_iters.to_string(),
        ])
        .map_err(csv_error)?;
    }
    finish(w)
}

/// `alpha,e_c,e_e` in grid order.
pub fn write_rates(path: &Path, report: &RateStudyReport) -> Result<()> {
    let mut w = writer(path, &["alpha", "e_c", "e_e"])?;
    for p in &report.points {
        w.write_record([num(p.alpha), num(p.e_c), num(p.e_e)])
            .map_err(csv_error)?;
    }
    finish(w)
}

/// `n,alpha_n,probe_id,gap,margin,prox_err`, grouped by probe.
pub fn write_mosco(path: &Path, report: &MoscoReport) -> Result<()> {
    let mut w = writer(path, &["n", "alpha_n", "probe_id", "gap", "margin", "prox_err"])?;
    for r in &report.rows {
        w.write_record([
            r.n.to_string(),
            num(r.alpha),
            r.probe_id.clone(),
            num(r.gap),
            num(r.margin),
            num(r.prox_err),
        ])
        .map_err(csv_error)?;
    }
    finish(w)
}

/// `lambda,alpha,quantity_id,value`.
pub fn write_audit(path: &Path, report: &AprioriAuditReport) -> Result<()> {
    let mut w = writer(path, &["lambda", "alpha", "quantity_id", "value"])?;
    for e in &report.entries {
        w.write_record([num(e.lambda), num(e.alpha), e.quantity.id().to_string(), num(e.value)])
            .map_err(csv_error)?;
    }
    finish(w)
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}
