//! Reading inputs and writing artifacts. Every file read is hashed into
//! the report.

use std::fs;
use std::path::Path;

use vck::io;
use vck::sampling::MDSample;
use vck::{CellSet, DiscreteSpace, Kernel, PlanMeasure, Space};

use crate::error::{CliError, CliResult, Kind};
use crate::report::{InputFile, Report};

fn parse_err(path: &Path, e: vck::Error) -> CliError {
    match e {
        vck::Error::Parse { .. } | vck::Error::Empty => {
            CliError::new(Kind::Io, format!("{}: {e}", path.display()))
        }
        other => CliError::from(other),
    }
}

pub fn read_bytes(report: &mut Report, role: &str, path: &Path) -> CliResult<Vec<u8>> {
    let data = fs::read(path)
        .map_err(|e| CliError::new(Kind::Io, format!("{}: {e}", path.display())))?;
    report
        .inputs
        .push(InputFile::new(role, &path.display().to_string(), &data));
    Ok(data)
}

pub fn kernel(report: &mut Report, role: &str, path: &Path, header: bool) -> CliResult<Kernel<f64>> {
    let data = read_bytes(report, role, path)?;
    io::read_kernel(data.as_slice(), header).map_err(|e| parse_err(path, e))
}

pub fn cellset(report: &mut Report, role: &str, path: &Path, header: bool) -> CliResult<CellSet> {
    let data = read_bytes(report, role, path)?;
    io::read_cellset(data.as_slice(), header).map_err(|e| parse_err(path, e))
}

pub fn plan(report: &mut Report, role: &str, path: &Path, shape: Option<(usize, usize)>) -> CliResult<PlanMeasure<f64>> {
    let data = read_bytes(report, role, path)?;
    let (r, c) = match shape {
        Some(s) => s,
        None => io::plan_extent(data.as_slice()).map_err(|e| parse_err(path, e))?,
    };
    io::read_plan(data.as_slice(), r, c).map_err(|e| parse_err(path, e))
}

fn weights_file(report: &mut Report, role: &str, path: &Path, n: usize) -> CliResult<Space> {
    let data = read_bytes(report, role, path)?;
    let w = io::read_weights(data.as_slice()).map_err(|e| parse_err(path, e))?;
    if w.len() != n {
        return Err(CliError::validation(format!(
            "{}: {} weights for {n} points",
            path.display(),
            w.len()
        )));
    }
    Ok(vck::make_space(&w)?)
}

/// The two spaces of an `r × c` grid: weight files when given, otherwise
/// uniform.
pub fn spaces(
    report: &mut Report,
    wx: Option<&Path>,
    wy: Option<&Path>,
    r: usize,
    c: usize,
) -> CliResult<(Space, Space)> {
    let x = match wx {
        Some(p) => weights_file(report, "weights-x", p, r)?,
        None => DiscreteSpace::uniform(r),
    };
    let y = match wy {
        Some(p) => weights_file(report, "weights-y", p, c)?,
        None => DiscreteSpace::uniform(c),
    };
    Ok((x, y))
}

/// Matrix samples as JSON (`.json`) or as the flat CSV with an optional
/// `# seed=<n>` line.
pub fn md_sample(report: &mut Report, role: &str, path: &Path) -> CliResult<MDSample> {
    let data = read_bytes(report, role, path)?;
    let io_err = |msg: String| CliError::new(Kind::Io, format!("{}: {msg}", path.display()));
    if path.extension().is_some_and(|e| e == "json") {
        return serde_json::from_slice(&data).map_err(|e| io_err(e.to_string()));
    }
    let text = String::from_utf8(data).map_err(|e| io_err(e.to_string()))?;
    let mut seed = 0;
    let mut cells: Vec<(usize, usize, usize, f64)> = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(s) = line.strip_prefix("# seed=") {
            seed = s.trim().parse().map_err(|_| io_err(format!("bad seed on line {}", no + 1)))?;
            continue;
        }
        if line.is_empty() || line.starts_with('#') || line.starts_with("trial") {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        let bad = || io_err(format!("malformed line {}", no + 1));
        if f.len() != 4 {
            return Err(bad());
        }
        let idx = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
        let v: f64 = f[3].trim().parse().map_err(|_| bad())?;
        cells.push((idx(f[0])?, idx(f[1])?, idx(f[2])?, v));
    }
    let trials = cells.iter().map(|c| c.0 + 1).max().ok_or_else(|| io_err("no samples".into()))?;
    let k = cells.iter().map(|c| c.1.max(c.2) + 1).max().unwrap_or(0);
    let mut matrices = vec![vec![f64::NAN; k * k]; trials];
    for (t, i, j, v) in cells {
        matrices[t][i * k + j] = v;
    }
    if matrices.iter().flatten().any(|v| v.is_nan()) {
        return Err(io_err("incomplete sample matrix".into()));
    }
    Ok(MDSample::new(k, matrices, seed)?)
}

pub fn write_md_csv(s: &MDSample) -> CliResult<Vec<u8>> {
    let mut buf = format!("# seed={}\n", s.seed).into_bytes();
    s.write_csv(&mut buf)?;
    Ok(buf)
}

pub fn write_artifact(path: &Path, data: &[u8]) -> CliResult<()> {
    fs::write(path, data).map_err(|e| CliError::new(Kind::Io, format!("{}: {e}", path.display())))
}

pub fn kernel_csv(k: &Kernel<f64>) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    io::write_kernel(&mut buf, k)?;
    Ok(buf)
}
