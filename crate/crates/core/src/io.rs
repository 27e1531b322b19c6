//! Plain-text interchange formats.
//!
//! - kernels and cell sets: row-major CSV, comma-separated, optional header line
//! - weights: one decimal per line
//! - plans: sparse triplets `i,j,mass`, 0-based
//!
//! Floats are written with 17 significant digits so that every value
//! survives a write/read cycle bit-for-bit.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::kernel::{CellSet, Kernel};
use crate::plan::PlanMeasure;

/// 17 significant digits in scientific notation.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|e| Error::Parse {
        line,
        msg: format!("{e}: {s:?}"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            msg: format!("non-finite value {s:?}"),
        });
    }
    Ok(v)
}

fn data_lines<R: BufRead>(reader: R, header: bool) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse {
            line: k + 1,
            msg: e.to_string(),
        })?;
        if header && k == 0 {
            continue;
        }
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        out.push((k + 1, t.to_string()));
    }
    Ok(out)
}

fn read_matrix<R: BufRead>(reader: R, header: bool) -> Result<(usize, usize, Vec<f64>)> {
    let lines = data_lines(reader, header)?;
    let mut values = Vec::new();
    let mut cols = None;
    for (no, line) in &lines {
        let row: Vec<f64> = line
            .split(',')
            .map(|c| parse_f64(c, *no))
            .collect::<Result<_>>()?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(Error::Parse {
                    line: *no,
                    msg: format!("expected {c} columns, found {}", row.len()),
                })
            }
            _ => {}
        }
        values.extend(row);
    }
    let cols = cols.ok_or(Error::Empty)?;
    Ok((lines.len(), cols, values))
}

pub fn read_kernel<R: BufRead>(reader: R, header: bool) -> Result<Kernel<f64>> {
    let (r, c, v) = read_matrix(reader, header)?;
    Kernel::new(r, c, v)
}

pub fn write_kernel<W: Write>(mut w: W, k: &Kernel<f64>) -> std::io::Result<()> {
    for i in 0..k.rows() {
        let line: Vec<String> = k.row(i).iter().map(|&v| fmt_f64(v)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

/// Cells are `0` or `1`; any nonzero number counts as a member.
pub fn read_cellset<R: BufRead>(reader: R, header: bool) -> Result<CellSet> {
    let (r, c, v) = read_matrix(reader, header)?;
    CellSet::new(r, c, v.into_iter().map(|x| x != 0.0).collect())
}

pub fn write_cellset<W: Write>(mut w: W, z: &CellSet) -> std::io::Result<()> {
    for i in 0..z.rows() {
        let line: Vec<&str> = (0..z.cols())
            .map(|j| if z.contains(i, j) { "1" } else { "0" })
            .collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn read_weights<R: BufRead>(reader: R) -> Result<Vec<f64>> {
    data_lines(reader, false)?
        .iter()
        .map(|(no, l)| parse_f64(l, *no))
        .collect()
}

pub fn write_weights<W: Write>(mut w: W, weights: &[f64]) -> std::io::Result<()> {
    for &v in weights {
        writeln!(w, "{}", fmt_f64(v))?;
    }
    Ok(())
}

/// Reads `i,j,mass` triplets into a plan of the given shape. Negative
/// masses make the plan signed.
pub fn read_plan<R: BufRead>(reader: R, rows: usize, cols: usize) -> Result<PlanMeasure<f64>> {
    let mut entries = Vec::new();
    for (no, line) in data_lines(reader, false)? {
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse {
                line: no,
                msg: "expected i,j,mass".into(),
            });
        }
        let idx = |s: &str| {
            s.trim().parse::<usize>().map_err(|e| Error::Parse {
                line: no,
                msg: format!("{e}: {s:?}"),
            })
        };
        entries.push((idx(parts[0])?, idx(parts[1])?, parse_f64(parts[2], no)?));
    }
    let signed = entries.iter().any(|e| e.2 < 0.0);
    PlanMeasure::new(rows, cols, entries, signed)
}

pub fn write_plan<W: Write>(mut w: W, p: &PlanMeasure<f64>) -> std::io::Result<()> {
    for &(i, j, m) in p.entries() {
        writeln!(w, "{i},{j},{}", fmt_f64(m))?;
    }
    Ok(())
}

/// Shape implied by the largest indices of a triplet file.
pub fn plan_extent<R: BufRead>(reader: R) -> Result<(usize, usize)> {
    let mut r = 0;
    let mut c = 0;
    for (no, line) in data_lines(reader, false)? {
        let mut it = line.split(',');
        let mut next = || -> Result<usize> {
            it.next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Parse {
                    line: no,
                    msg: "bad index".into(),
                })
        };
        r = r.max(next()? + 1);
        c = c.max(next()? + 1);
    }
    Ok((r, c))
}
