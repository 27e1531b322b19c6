use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use vck::approx::{
    compactness_certificate, defect_profile, finite_rank_fit, fit_step as fit, CompactnessOutcome,
    DefectProfile, FitOptions, WarmStart, DEFAULT_RESTARTS,
};
use vck::{tau_distance, DiscreteSpace, Kernel, Space};

use crate::analysis::check_tau;
use crate::error::{CliError, CliResult};
use crate::input;
use crate::report::Report;
use crate::{Global, Output};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Warm {
    /// Contiguous index intervals (grids sampled from the square).
    Intervals,
    Random,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long, value_enum, default_value = "random")]
    pub warm: Warm,
}

impl FitArgs {
    fn options(&self, g: &Global, r: &mut Report) -> FitOptions {
        let warm = match self.warm {
            Warm::Intervals => WarmStart::Intervals,
            Warm::Random => WarmStart::Random,
        };
        r.param("restarts", self.restarts).param("warm", warm);
        FitOptions {
            restarts: self.restarts,
            seed: g.seed,
            warm,
        }
    }
}

#[derive(Debug, Args)]
pub struct FitStepArgs {
    pub f: PathBuf,
    /// Classes per side.
    #[arg(long)]
    pub blocks: Option<usize>,
    #[arg(long)]
    pub row_blocks: Option<usize>,
    #[arg(long)]
    pub col_blocks: Option<usize>,
    #[command(flatten)]
    pub fit: FitArgs,
}

#[derive(Debug, Args)]
pub struct DefectArgs {
    pub f: PathBuf,
    /// Increasing classes-per-side list.
    #[arg(long, value_delimiter = ',', required = true)]
    pub blocks: Vec<usize>,
    #[command(flatten)]
    pub fit: FitArgs,
}

#[derive(Debug, Args)]
pub struct RankFitArgs {
    pub f: PathBuf,
    #[arg(long)]
    pub rank: usize,
}

#[derive(Debug, Args)]
pub struct CompactnessArgs {
    pub f: PathBuf,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 8)]
    pub net_budget: usize,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    pub f: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
    pub blocks: Vec<usize>,
    /// Number of resolutions, each halving the previous grid while its
    /// side stays at least four times the largest block count.
    #[arg(long, default_value_t = 2)]
    pub levels: usize,
    /// Largest last-to-first defect ratio read as decay.
    #[arg(long, default_value_t = 0.5)]
    pub ratio: f64,
    #[command(flatten)]
    pub fit: FitArgs,
}

fn load(path: &Path, g: &Global, r: &mut Report) -> CliResult<(Kernel<f64>, Space, Space)> {
    let f = input::kernel(r, "f", path, g.header)?;
    let (x, y) = input::spaces(r, g.weights_x.as_deref(), g.weights_y.as_deref(), f.rows(), f.cols())?;
    Ok((f, x, y))
}

/// The reported τ must be the exact distance to the reported approximant.
fn recheck(f: &Kernel<f64>, approx: &Kernel<f64>, x: &Space, y: &Space, tau: f64) -> CliResult<()> {
    let exact = tau_distance(f, approx, x, y)?.value;
    if exact != tau {
        return Err(CliError::certificate(format!("reported tau {tau} but the approximant is at {exact}")));
    }
    check_tau(f, approx, x, y, tau)
}

pub fn fit_step(a: &FitStepArgs, g: &Global, r: &mut Report) -> CliResult<Output> {
    let (f, x, y) = load(&a.f, g, r)?;
    let nx = a.row_blocks.or(a.blocks).ok_or_else(|| CliError::usage("give --blocks or --row-blocks"))?;
    let ny = a.col_blocks.or(a.blocks).ok_or_else(|| CliError::usage("give --blocks or --col-blocks"))?;
    r.param("rowBlocks", nx).param("colBlocks", ny);
    let opts = a.fit.options(g, r);
    let res = fit(&f, &x, &y, nx, ny, &opts)?;
    let approx = res.step.eval();
    recheck(&f, &approx, &x, &y, res.tau)?;
    r.result("tau", res.tau)
        .result("rowClasses", res.step.row_classes())
        .result("colClasses", res.step.col_classes())
        .result("restart", res.restart)
        .witness("step", &res.step);
    Ok(Output {
        artifact: Some(input::kernel_csv(&approx)?),
        print_artifact: false,
    })
}

fn checked_profile(f: &Kernel<f64>, x: &Space, y: &Space, blocks: &[usize], opts: &FitOptions) -> CliResult<DefectProfile<f64>> {
    let prof = defect_profile(f, x, y, blocks, opts)?;
    for e in &prof.entries {
        recheck(f, &e.fit.eval(), x, y, e.tau)?;
    }
    Ok(prof)
}

pub fn defect(a: &DefectArgs, g: &Global, r: &mut Report) -> CliResult<Output> {
    let (f, x, y) = load(&a.f, g, r)?;
    r.param("blocks", &a.blocks);
    let opts = a.fit.options(g, r);
    let prof = checked_profile(&f, &x, &y, &a.blocks, &opts)?;
    let taus = prof.taus();
    r.result("blocks", &a.blocks)
        .result("taus", &taus)
        .result("nonincreasing", taus.windows(2).all(|w| w[1] <= w[0]))
        .result("carried", prof.entries.iter().map(|e| e.carried).collect::<Vec<_>>())
        .witness("profile", &prof);
    let mut csv = Vec::new();
    prof.write_csv(&mut csv)?;
    Ok(Output {
        artifact: Some(csv),
        print_artifact: false,
    })
}

pub fn rank_fit(a: &RankFitArgs, g: &Global, r: &mut Report) -> CliResult<Output> {
    let (f, x, y) = load(&a.f, g, r)?;
    r.param("rank", a.rank);
    let res = finite_rank_fit(&f, &x, &y, a.rank)?;
    let approx = res.function.eval();
    recheck(&f, &approx, &x, &y, res.tau)?;
    r.result("tau", res.tau)
        .result("singularValues", &res.singular_values)
        .result("rank", res.function.rank())
        .witness("function", &res.function);
    Ok(Output {
        artifact: Some(input::kernel_csv(&approx)?),
        print_artifact: false,
    })
}

pub fn compactness(a: &CompactnessArgs, g: &Global, r: &mut Report) -> CliResult<Output> {
    let (f, x, y) = load(&a.f, g, r)?;
    r.param("eps", a.eps).param("netBudget", a.net_budget);
    let out = compactness_certificate(&f, &x, &y, a.eps, a.net_budget)?;
    let (name, cert, rounds) = match &out {
        CompactnessOutcome::Certified(c) => {
            c.verify(&f, &x, &y, a.eps)?;
            ("certified", c, None)
        }
        CompactnessOutcome::Refused { best, rounds } => ("refused", best, Some(*rounds)),
    };
    r.result("outcome", name)
        .result("netSize", cert.net_centers.len())
        .result("radius", cert.radius)
        .result("removedRowMass", cert.removed_mass.0)
        .result("removedColMass", cert.removed_mass.1)
        .result("keptRows", cert.kept_rows.len())
        .result("keptCols", cert.kept_cols.len());
    if let Some(k) = rounds {
        r.result("rounds", k);
    }
    r.witness("outcome", &out);
    Ok(Output::default())
}

/// Merges index pairs `(2a, 2a+1)`: weights add, values average with the
/// product weights.
pub fn coarsen(f: &Kernel<f64>, x: &Space, y: &Space) -> CliResult<(Kernel<f64>, Space, Space)> {
    let group = |s: &Space| -> Vec<f64> { s.weights().chunks(2).map(|c| c.iter().sum()).collect() };
    let (wx, wy) = (group(x), group(y));
    let k = Kernel::from_fn(wx.len(), wy.len(), |a, b| {
        let mut acc = 0.0;
        for i in 2 * a..(2 * a + 2).min(f.rows()) {
            for j in 2 * b..(2 * b + 2).min(f.cols()) {
                acc += x.weight(i) * y.weight(j) * f.get(i, j);
            }
        }
        acc / (wx[a] * wy[b])
    });
    Ok((k, DiscreteSpace::new(&wx)?, DiscreteSpace::new(&wy)?))
}

pub const VERDICT_CONTINUOUS: &str = "defect profile consistent with virtual continuity";
pub const VERDICT_FAILURE: &str = "defect profile consistent with failure of virtual continuity";

pub fn classify(a: &ClassifyArgs, g: &Global, r: &mut Report) -> CliResult<Output> {
    let (f, x, y) = load(&a.f, g, r)?;
    if a.levels == 0 {
        return Err(CliError::usage("--levels must be positive"));
    }
    r.param("blocks", &a.blocks).param("levels", a.levels).param("ratio", a.ratio);
    let opts = a.fit.options(g, r);
    let top = a.blocks.iter().copied().max().unwrap_or(1);
    let (mut cur, mut cx, mut cy) = (f, x, y);
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    for level in 0..a.levels {
        if level > 0 {
            if cur.rows().min(cur.cols()) / 2 < 4 * top {
                break;
            }
            (cur, cx, cy) = coarsen(&cur, &cx, &cy)?;
        }
        let taus = checked_profile(&cur, &cx, &cy, &a.blocks, &opts)?.taus();
        let ratio = match (taus.first(), taus.last()) {
            (Some(&first), Some(&last)) if first > 0.0 => last / first,
            _ => 0.0,
        };
        ratios.push(ratio);
        rows.push(serde_json::json!({
            "rows": cur.rows(),
            "cols": cur.cols(),
            "taus": taus,
            "decayRatio": ratio,
        }));
    }
    let verdict = if ratios[0] <= a.ratio {
        VERDICT_CONTINUOUS
    } else {
        VERDICT_FAILURE
    };
    r.result("resolutions", rows)
        .result("decayRatio", ratios[0])
        .result("verdict", verdict);
    Ok(Output::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarsening_preserves_the_integral() {
        let f = Kernel::from_fn(5, 4, |i, j| (i * 4 + j) as f64);
        let x = DiscreteSpace::new(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let y = DiscreteSpace::new(&[1.0, 1.0, 2.0, 2.0]).unwrap();
        let (k, cx, cy) = coarsen(&f, &x, &y).unwrap();
        assert_eq!(k.shape(), (3, 2));
        assert!((k.integrate(&cx, &cy) - f.integrate(&x, &y)).abs() < 1e-12);
        assert!((cx.weight(2) - 5.0 / 15.0).abs() < 1e-15);
    }
}
