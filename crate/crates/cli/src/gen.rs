use std::f64::consts::PI;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vck::generate::{gen_kernel, gen_set, sample_profile, KernelKind, SetKind, SmoothFn};
use vck::metric::circulant_metric;
use vck::{gen_plan, io, plan_class, DiscreteSpace, PlanKind};

use crate::error::{CliError, CliResult};
use crate::input;
use crate::report::{sha256_hex, Report};
use crate::{Global, Output};

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Kernels: triangle, smooth, circulant, lowrank, random, cycle-metric.
    /// Sets: diagonal, band, rectangle, random-set. Plans: diagonal-plan,
    /// permutation, product, vertical-line. Weights: uniform-weights,
    /// random-weights.
    #[arg(long)]
    pub kind: String,
    /// Grid size (side of the square for vertical-line).
    #[arg(long)]
    pub n: usize,
    /// Smooth function: sincos, xy, gaussian, mean.
    #[arg(long = "fn", default_value = "sincos")]
    pub func: String,
    /// Circulant generating vector of length n.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub v: Vec<f64>,
    /// Circulant profile on [0,1) when no vector is given: cos, jump, tent.
    #[arg(long, default_value = "cos")]
    pub profile: String,
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    /// Band half-width.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Band without its main diagonal.
    #[arg(long)]
    pub strict: bool,
    #[arg(long, value_delimiter = ',')]
    pub rows: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub cols: Vec<usize>,
    /// Cell probability of random-set.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Permutation image list.
    #[arg(long, value_delimiter = ',')]
    pub sigma: Vec<usize>,
}

fn profile(name: &str) -> CliResult<fn(f64) -> f64> {
    Ok(match name {
        "cos" => |t| (2.0 * PI * t).cos(),
        "jump" => |t| if t < 0.5 { 1.0 } else { 0.0 },
        "tent" => |t| 1.0 - 2.0 * (t - 0.5).abs(),
        other => return Err(CliError::usage(format!("unknown profile {other}"))),
    })
}

pub fn run(a: &GenArgs, g: &Global, r: &mut Report) -> CliResult<Output> {
    let n = a.n;
    r.param("kind", &a.kind).param("n", n);
    let kernel_kind = match a.kind.as_str() {
        "triangle" => Some(KernelKind::Triangle),
        "smooth" => {
            r.param("fn", &a.func);
            Some(KernelKind::Smooth(a.func.parse::<SmoothFn>()?))
        }
        "circulant" => {
            let v = if a.v.is_empty() {
                r.param("profile", &a.profile);
                sample_profile(n, profile(&a.profile)?)
            } else if a.v.len() == n {
                r.param("v", &a.v);
                a.v.clone()
            } else {
                return Err(CliError::validation(format!("circulant vector needs {n} entries")));
            };
            Some(KernelKind::Circulant(v))
        }
        "lowrank" => {
            r.param("rank", a.rank);
            Some(KernelKind::LowRank { rank: a.rank })
        }
        "random" => Some(KernelKind::Random),
        _ => None,
    };
    let (object, artifact) = if let Some(kind) = kernel_kind {
        let k = gen_kernel::<f64>(&kind, n, g.seed)?;
        r.result("rows", k.rows()).result("cols", k.cols());
        ("kernel", input::kernel_csv(&k)?)
    } else if a.kind == "cycle-metric" {
        let k = circulant_metric::<f64>(n);
        r.result("rows", n).result("cols", n);
        ("kernel", input::kernel_csv(&k)?)
    } else if let Some(set) = set_kind(a, g, r) {
        let z = gen_set(&set, n)?;
        r.result("rows", n).result("cols", n).result("cells", z.count());
        let mut buf = Vec::new();
        io::write_cellset(&mut buf, &z)?;
        ("set", buf)
    } else if let Some(kind) = plan_kind(a, r) {
        let side = if let PlanKind::VerticalLine(m) = kind { m * m } else { n };
        let (x, y) = input::spaces(r, g.weights_x.as_deref(), g.weights_y.as_deref(), side, side)?;
        let p = gen_plan(&kind, &x, &y)?;
        let class = plan_class(&p, &x, &y)?.class;
        r.result("rows", side)
            .result("cols", side)
            .result("entries", p.len())
            .result("class", class.to_string());
        let mut buf = Vec::new();
        io::write_plan(&mut buf, &p)?;
        ("plan", buf)
    } else if a.kind == "uniform-weights" || a.kind == "random-weights" {
        let w: Vec<f64> = if a.kind == "uniform-weights" {
            DiscreteSpace::<f64>::uniform(n).weights().to_vec()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            (0..n).map(|_| rng.gen_range(0.1..1.0)).collect()
        };
        r.result("points", n);
        let mut buf = Vec::new();
        io::write_weights(&mut buf, &w)?;
        ("weights", buf)
    } else {
        return Err(CliError::usage(format!("unknown kind {}", a.kind)));
    };
    r.result("object", object).result("sha256", sha256_hex(&artifact));
    Ok(Output {
        artifact: Some(artifact),
        print_artifact: true,
    })
}

fn set_kind(a: &GenArgs, g: &Global, r: &mut Report) -> Option<SetKind> {
    Some(match a.kind.as_str() {
        "diagonal" => SetKind::Diagonal,
        "band" => {
            r.param("k", a.k).param("strict", a.strict);
            SetKind::Band { k: a.k, strict: a.strict }
        }
        "rectangle" => {
            r.param("rows", &a.rows).param("cols", &a.cols);
            SetKind::Rectangle {
                rows: a.rows.clone(),
                cols: a.cols.clone(),
            }
        }
        "random-set" => {
            r.param("p", a.p);
            SetKind::Random { p: a.p, seed: g.seed }
        }
        _ => return None,
    })
}

fn plan_kind(a: &GenArgs, r: &mut Report) -> Option<PlanKind> {
    Some(match a.kind.as_str() {
        "diagonal-plan" => PlanKind::Diagonal,
        "permutation" => {
            r.param("sigma", &a.sigma);
            PlanKind::Permutation(a.sigma.clone())
        }
        "product" => PlanKind::Product,
        "vertical-line" => PlanKind::VerticalLine(a.n),
        _ => return None,
    })
}
