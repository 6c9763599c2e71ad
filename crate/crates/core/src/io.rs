//! CSV persistence of sweeps and transmission traces.
//!
//! Floats are written in shortest round-trip form, so a write followed by a
//! read reproduces every value bit for bit.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::ensemble::{SweepPoint, SweepTrace};
use crate::error::{Error, Result};
use crate::spectro::ComplexTrace;

pub const SWEEP_HEADER: [&str; 3] = ["B_par_T", "delta_f_Hz", "sigma_f_Hz"];
pub const TRACE_HEADER: [&str; 3] = ["freq_Hz", "re", "im"];

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

/// Parses a headed CSV into rows of the `header` columns in that order.
fn read_columns<R: Read>(reader: R, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let found = rdr.headers().map_err(io_err)?.clone();
    let idx = header
        .iter()
        .map(|name| {
            found.iter().position(|h| h == *name).ok_or_else(|| Error::Schema {
                row: None,
                message: format!("missing column {name}"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Schema {
            row: Some(r),
            message: e.to_string(),
        })?;
        let row = idx
            .iter()
            .zip(header)
            .map(|(&j, name)| {
                let cell = rec.get(j).unwrap_or("");
                cell.parse::<f64>().map_err(|_| Error::Schema {
                    row: Some(r),
                    message: format!("{name}: cannot parse {cell:?} as a number"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

fn write_rows<W: Write>(writer: W, header: &[&str], rows: impl Iterator<Item = [f64; 3]>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header).map_err(io_err)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string())).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Reads a sweep; `f_r0` is not stored in the table and must be supplied.
pub fn read_sweep<R: Read>(reader: R, f_r0: f64) -> Result<SweepTrace> {
    let points = read_columns(reader, &SWEEP_HEADER)?
        .into_iter()
        .map(|r| SweepPoint {
            b_par: r[0],
            delta_f: r[1],
            sigma_f: r[2],
        })
        .collect();
    SweepTrace::new(points, f_r0)
}

pub fn write_sweep<W: Write>(writer: W, trace: &SweepTrace) -> Result<()> {
    write_rows(
        writer,
        &SWEEP_HEADER,
        trace.points().iter().map(|p| [p.b_par, p.delta_f, p.sigma_f]),
    )
}

pub fn read_sweep_file(path: &Path, f_r0: f64) -> Result<SweepTrace> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_sweep(file, f_r0)
}

pub fn read_trace<R: Read>(reader: R) -> Result<ComplexTrace> {
    let rows = read_columns(reader, &TRACE_HEADER)?;
    let freqs = rows.iter().map(|r| r[0]).collect();
    let s21 = rows.iter().map(|r| Complex64::new(r[1], r[2])).collect();
    ComplexTrace::new(freqs, s21)
}

pub fn write_trace<W: Write>(writer: W, trace: &ComplexTrace) -> Result<()> {
    write_rows(
        writer,
        &TRACE_HEADER,
        trace.freqs().iter().zip(trace.s21()).map(|(&f, z)| [f, z.re, z.im]),
    )
}

pub fn read_trace_file(path: &Path) -> Result<ComplexTrace> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_trace(file)
}
