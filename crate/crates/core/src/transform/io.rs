//! CSV formats for signals and spectra.
//!
//! Coefficients: header `l1,...,lm,re,im,eigsum`, one row per multi-index in
//! row-major order. Signals: a 2-D signal is a plain numeric matrix (rows =
//! first-factor nodes); other ranks start with a `dims,N1,...,Nm` line
//! followed by the values in row-major order. A matrix whose header starts
//! with `station_id` is read as a labelled matrix and the label column is
//! dropped.

use std::io::{Read, Write};

use ndarray::{ArrayD, IxDyn};

use super::{ProductSignal, SpectralCoefficients, SpectrumRow, TransformKind};
use crate::graph::MultiIndex;
use crate::{Error, Result, C64};

/// Shortest text that parses back to the same `f64`, switching to exponent
/// notation outside `[1e-5, 1e16)` so tiny values stay compact.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-5..1e16).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse { line, message: format!("`{field}` is not a number") })
}

fn parse_usize(field: &str, line: usize) -> Result<usize> {
    field
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::Parse { line, message: format!("`{field}` is not a non-negative integer") })
}

/// Writes the coefficient table. `eigenvalues[i][ℓ]` is factor `i`'s contribution
/// to the `eigsum` column for index `ℓ`.
pub fn write_coefficients_csv<W: Write>(
    writer: W,
    coef: &SpectralCoefficients,
    eigenvalues: &[Vec<f64>],
) -> Result<()> {
    let m = coef.dims().len();
    if eigenvalues.len() != m || eigenvalues.iter().zip(coef.dims()).any(|(e, &n)| e.len() != n) {
        return Err(Error::shape("eigenvalue lists do not match the coefficient dims"));
    }
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (1..=m).map(|i| format!("l{i}")).collect();
    header.extend(["re", "im", "eigsum"].map(String::from));
    w.write_record(&header)?;
    for (index, z) in coef.iter_indexed() {
        let eigsum: f64 = index.as_slice().iter().zip(eigenvalues).map(|(&l, e)| e[l]).sum();
        let mut row: Vec<String> = index.as_slice().iter().map(usize::to_string).collect();
        row.push(format_f64(z.re));
        row.push(format_f64(z.im));
        row.push(format_f64(eigsum));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<coefficients output>", e))?;
    Ok(())
}

/// Reads a coefficient table. Every multi-index of the implied grid must appear exactly once.
pub fn read_coefficients_csv<R: Read>(reader: R, alpha: f64, kind: TransformKind) -> Result<SpectralCoefficients> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    let m = header.iter().take_while(|h| h.starts_with('l') && h[1..].parse::<usize>().is_ok()).count();
    if m == 0 || header.len() < m + 2 || &header[m] != "re" || &header[m + 1] != "im" {
        return Err(Error::Parse { line: 1, message: "expected header `l1,...,lm,re,im[,eigsum]`".into() });
    }
    let mut entries = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let line = k + 2;
        let rec = rec?;
        let idx = (0..m).map(|i| parse_usize(&rec[i], line)).collect::<Result<Vec<_>>>()?;
        let z = C64::new(parse_f64(&rec[m], line)?, parse_f64(&rec[m + 1], line)?);
        entries.push((MultiIndex(idx), z, line));
    }
    if entries.is_empty() {
        return Err(Error::Parse { line: 2, message: "no coefficient rows".into() });
    }
    let dims: Vec<usize> = (0..m).map(|i| entries.iter().map(|(ix, _, _)| ix.0[i]).max().unwrap_or(0) + 1).collect();
    let total: usize = dims.iter().product();
    if entries.len() != total {
        return Err(Error::shape(format!("{} rows do not cover the {dims:?} index grid", entries.len())));
    }
    let mut data = ArrayD::<C64>::zeros(IxDyn(&dims));
    let mut seen = vec![false; total];
    for (ix, z, line) in entries {
        let flat = ix.flat(&dims);
        if std::mem::replace(&mut seen[flat], true) {
            return Err(Error::Parse { line, message: format!("duplicate multi-index {ix}") });
        }
        data[IxDyn(ix.as_slice())] = z;
    }
    SpectralCoefficients::new(data, alpha, kind)
}

/// Plot-ready spectrum table: `l1,...,lm,eigsum,re,im,magnitude`.
pub fn write_spectrum_table_csv<W: Write>(writer: W, rows: &[SpectrumRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let m = rows.first().map_or(0, |r| r.index.len());
    let mut header: Vec<String> = (1..=m).map(|i| format!("l{i}")).collect();
    header.extend(["eigsum", "re", "im", "magnitude"].map(String::from));
    w.write_record(&header)?;
    for r in rows {
        let mut rec: Vec<String> = r.index.as_slice().iter().map(usize::to_string).collect();
        rec.extend([r.eigsum, r.coefficient.re, r.coefficient.im, r.coefficient.norm()].map(format_f64));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<spectrum output>", e))?;
    Ok(())
}

/// Writes a real signal (see module docs for the layout).
pub fn write_signal_csv<W: Write>(writer: W, data: &ArrayD<f64>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(writer);
    let shape = data.shape();
    if shape.len() != 2 {
        let mut dims = vec!["dims".to_string()];
        dims.extend(shape.iter().map(usize::to_string));
        w.write_record(&dims)?;
    }
    let row_len = *shape.last().unwrap_or(&1);
    let values: Vec<f64> = data.iter().copied().collect();
    for chunk in values.chunks(row_len.max(1)) {
        w.write_record(chunk.iter().map(|&x| format_f64(x)))?;
    }
    w.flush().map_err(|e| Error::io("<signal output>", e))?;
    Ok(())
}

/// Reads a real signal (see module docs for the accepted layouts).
pub fn read_signal_csv<R: Read>(reader: R) -> Result<ProductSignal> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(reader);
    let mut records = rdr.records().enumerate();
    let (_, first) = records.next().ok_or(Error::Parse { line: 1, message: "empty signal file".into() })?;
    let first = first?;
    match first.get(0).map(str::trim) {
        Some("dims") => {
            let dims = first.iter().skip(1).map(|d| parse_usize(d, 1)).collect::<Result<Vec<_>>>()?;
            let mut values = Vec::new();
            for (k, rec) in records {
                for field in rec?.iter().filter(|f| !f.trim().is_empty()) {
                    values.push(parse_f64(field, k + 1)?);
                }
            }
            ProductSignal::from_flat(&dims, values)
        }
        Some("station_id") => {
            let cols = first.len() - 1;
            read_matrix(records.map(|(k, r)| (k + 1, r)), cols, 1)
        }
        _ => {
            let cols = first.len();
            let rest = std::iter::once((1, Ok(first))).chain(records.map(|(k, r)| (k + 1, r)));
            read_matrix(rest, cols, 0)
        }
    }
}

fn read_matrix(
    rows: impl Iterator<Item = (usize, csv::Result<csv::StringRecord>)>,
    cols: usize,
    skip: usize,
) -> Result<ProductSignal> {
    let mut values = Vec::new();
    let mut nrows = 0;
    for (line, rec) in rows {
        let rec = rec?;
        if rec.len() - skip != cols {
            return Err(Error::Parse { line, message: format!("expected {cols} values, found {}", rec.len() - skip) });
        }
        for field in rec.iter().skip(skip) {
            values.push(parse_f64(field, line)?);
        }
        nrows += 1;
    }
    if nrows == 0 || cols == 0 {
        return Err(Error::Parse { line: 1, message: "signal matrix has no values".into() });
    }
    ProductSignal::from_flat(&[nrows, cols], values)
}
