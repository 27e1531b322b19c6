use std::path::{Path, PathBuf};

use clap::Args;
use vck::generate::cell_center;
use vck::thickness::{thickness as thickness_cert, NullCover};
use vck::{
    extract_null_cover, gen_plan, level_set, pairing, plan_class, tau_bisection, tau_distance,
    validate_metric, vc_norm, Kernel, PlanKind,
};

use crate::error::{CliError, CliResult};
use crate::input;
use crate::report::Report;
use crate::{Global, Output};

#[derive(Debug, Args)]
pub struct ThicknessArgs {
    /// Cell-set CSV (0/1 entries).
    #[arg(long)]
    pub set: PathBuf,
}

#[derive(Debug, Args)]
pub struct TauArgs {
    pub f: PathBuf,
    pub g: PathBuf,
    /// Also run bisection to this tolerance and report the difference.
    #[arg(long)]
    pub bisection: Option<f64>,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    pub f: PathBuf,
}

#[derive(Debug, Args)]
pub struct MeNormArgs {
    /// Plan triplets `i,j,mass`.
    pub plan: PathBuf,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    pub f: PathBuf,
    /// diagonal, product, permutation, vertical-line, or a plan file.
    #[arg(long)]
    pub plan: String,
    /// Images of 0..n for `--plan permutation`, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sigma: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct RestrictMetricArgs {
    /// Side of the square grid; points are indexed `u·n + v`.
    #[arg(long)]
    pub n: usize,
    /// euclidean, l1 or linf on cell centers.
    #[arg(long, default_value = "euclidean")]
    pub metric: String,
    /// Metric matrix over the n² grid points instead of a named metric.
    #[arg(long)]
    pub metric_file: Option<PathBuf>,
}

fn spaces_for(g: &Global, r: &mut Report, rows: usize, cols: usize) -> CliResult<(vck::Space, vck::Space)> {
    input::spaces(r, g.weights_x.as_deref(), g.weights_y.as_deref(), rows, cols)
}

pub fn thickness(a: &ThicknessArgs, g: &Global, r: &mut Report) -> CliResult<Output> {
    let z = input::cellset(r, "set", &a.set, g.header)?;
    let (x, y) = spaces_for(g, r, z.rows(), z.cols())?;
    let cert = thickness_cert(&z, &x, &y)?;
    cert.verify(&z, &x, &y)?;
    let null = match extract_null_cover(&z, &x, &y)? {
        NullCover::Cover(_) => "empty",
        NullCover::Refused { .. } => "refused",
    };
    r.result("value", cert.value)
        .result("measure", z.measure(&x, &y))
        .result("gap", cert.gap)
        .result("fractionalCost", cert.fractional.cost(&x, &y))
        .result("integralCost", cert.integral.cost(&x, &y))
        .result("planMass", cert.dual_witness.total_mass())
        .result("cells", z.count())
        .result("nullCover", null)
        .witness("certificate", &cert);
    Ok(Output::default())
}

pub fn tau(a: &TauArgs, g: &Global, r: &mut Report) -> CliResult<Output> {
    let f = input::kernel(r, "f", &a.f, g.header)?;
    let h = input::kernel(r, "g", &a.g, g.header)?;
    let (x, y) = spaces_for(g, r, f.rows(), f.cols())?;
    let res = tau_distance(&f, &h, &x, &y)?;
    check_tau(&f, &h, &x, &y, res.value)?;
    r.result("value", res.value)
        .result("levels", res.levels)
        .result("selectedLevel", res.selected.level)
        .result("selectedThickness", res.selected.thickness)
        .result("thicknessCalls", res.evaluated.len());
    if let Some(tol) = a.bisection {
        r.param("bisection", tol);
        let b = tau_bisection(&f, &h, &x, &y, tol)?;
        r.result("bisection", b).result("bisectionDiff", (b - res.value).abs());
    }
    r.witness("breakpoints", &res.evaluated);
    Ok(Output::default())
}

/// `thi{|f − g| > τ} ≤ τ` with a checked thickness certificate.
pub fn check_tau(f: &Kernel<f64>, g: &Kernel<f64>, x: &vck::Space, y: &vck::Space, tau: f64) -> CliResult<()> {
    let z = level_set(f, g, tau)?;
    let cert = thickness_cert(&z, x, y)?;
    cert.verify(&z, x, y)?;
    if cert.value > tau + 1e-9 {
        return Err(CliError::certificate(format!(
            "level set above tau {tau} has thickness {}",
            cert.value
        )));
    }
    Ok(())
}

pub fn norm(a: &NormArgs, g: &Global, r: &mut Report) -> CliResult<Output> {
    let f = input::kernel(r, "f", &a.f, g.header)?;
    let (x, y) = spaces_for(g, r, f.rows(), f.cols())?;
    let cert = vc_norm(&f, &x, &y)?;
    cert.verify(&f, &x, &y)?;
    r.result("value", cert.value)
        .result("dualValue", cert.dual_value(&f))
        .result("gap", cert.gap)
        .result("integralAbs", f.abs().integrate(&x, &y))
        .result("supAbs", f.max_abs())
        .witness("certificate", &cert);
    Ok(Output::default())
}

pub fn me_norm(a: &MeNormArgs, g: &Global, r: &mut Report) -> CliResult<Output> {
    let shape = match (a.rows, a.cols) {
        (Some(p), Some(q)) => Some((p, q)),
        (None, None) => None,
        _ => return Err(CliError::usage("give both --rows and --cols or neither")),
    };
    let p = input::plan(r, "plan", &a.plan, shape)?;
    let (x, y) = spaces_for(g, r, p.rows(), p.cols())?;
    let rows = p.row_var();
    let cols = p.col_var();
    let dens = |m: &[f64], s: &vck::Space| m.iter().zip(s.weights()).fold(0.0f64, |acc, (v, w)| acc.max(v / w));
    r.param("rows", p.rows())
        .param("cols", p.cols())
        .result("value", vck::me_norm(&p, &x, &y)?)
        .result("rowDensityMax", dens(&rows, &x))
        .result("colDensityMax", dens(&cols, &y))
        .result("totalVariation", rows.iter().sum::<f64>())
        .result("signed", p.is_signed());
    Ok(Output::default())
}

pub fn trace(a: &TraceArgs, g: &Global, r: &mut Report) -> CliResult<Output> {
    let f = input::kernel(r, "f", &a.f, g.header)?;
    let (x, y) = spaces_for(g, r, f.rows(), f.cols())?;
    r.param("plan", &a.plan);
    let plan = if Path::new(&a.plan).is_file() {
        input::plan(r, "plan", Path::new(&a.plan), Some(f.shape()))?
    } else {
        let kind = match a.plan.as_str() {
            "diagonal" => PlanKind::Diagonal,
            "product" => PlanKind::Product,
            "permutation" => {
                r.param("sigma", &a.sigma);
                PlanKind::Permutation(a.sigma.clone())
            }
            "vertical-line" => PlanKind::VerticalLine(square_side(f.rows())?),
            other => return Err(CliError::usage(format!("no plan file or named plan {other}"))),
        };
        gen_plan(&kind, &x, &y)?
    };
    let class = if plan.is_nonnegative() {
        plan_class(&plan, &x, &y)?.class.to_string()
    } else {
        "signed".to_string()
    };
    r.result("value", pairing(&f, &plan)?)
        .result("planClass", class)
        .result("planMass", plan.total_mass())
        .result("productIntegral", f.integrate(&x, &y));
    Ok(Output::default())
}

fn square_side(len: usize) -> CliResult<usize> {
    let n = (len as f64).sqrt().round() as usize;
    if n * n != len {
        return Err(CliError::validation(format!("{len} points do not form a square grid")));
    }
    Ok(n)
}

pub fn restrict_metric(a: &RestrictMetricArgs, g: &Global, r: &mut Report) -> CliResult<Output> {
    let n = a.n;
    if n == 0 {
        return Err(CliError::usage("--n must be positive"));
    }
    let m = n * n;
    let rho = match &a.metric_file {
        Some(path) => {
            let k = input::kernel(r, "metric", path, g.header)?;
            if k.shape() != (m, m) {
                return Err(CliError::validation(format!("metric must be {m}x{m} for n = {n}")));
            }
            k
        }
        None => {
            r.param("metric", &a.metric);
            let pt = |p: usize| (cell_center(p / n, n), cell_center(p % n, n));
            let d: fn(f64, f64) -> f64 = match a.metric.as_str() {
                "euclidean" => |u, v| (u * u + v * v).sqrt(),
                "l1" => |u, v| u.abs() + v.abs(),
                "linf" => |u, v| u.abs().max(v.abs()),
                other => return Err(CliError::usage(format!("unknown metric {other}"))),
            };
            Kernel::from_fn(m, m, |i, j| {
                let (a, b) = (pt(i), pt(j));
                d(a.0 - b.0, a.1 - b.1)
            })
        }
    };
    let violations = validate_metric(&rho)?;
    if let Some(v) = violations.first() {
        return Err(CliError::validation(format!(
            "not a semimetric: {v} ({} violations)",
            violations.len()
        )));
    }
    let (x, y) = spaces_for(g, r, m, m)?;
    let plan = gen_plan(&PlanKind::VerticalLine(n), &x, &y)?;
    let class = plan_class(&plan, &x, &y)?.class;
    r.param("n", n)
        .result("value", pairing(&rho, &plan)?)
        .result("planClass", class.to_string())
        .result("productIntegral", rho.integrate(&x, &y));
    if a.metric_file.is_none() && g.weights_x.is_none() && g.weights_y.is_none() {
        // on one vertical line every named metric is |v − v'|
        let nf = n as f64;
        r.result("lineMean", (nf * nf - 1.0) / (3.0 * nf * nf));
    }
    Ok(Output::default())
}

