use std::path::PathBuf;

use clap::Args;
use vck::sampling::{self, RandomPointsParams, DEFAULT_PERMUTATIONS};

use crate::error::{CliError, CliResult};
use crate::input;
use crate::report::Report;
use crate::{Global, Output};

#[derive(Debug, Args)]
pub struct SampleMdArgs {
    pub f: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct CompareMdArgs {
    pub s1: PathBuf,
    pub s2: PathBuf,
    #[arg(long, default_value_t = DEFAULT_PERMUTATIONS)]
    pub permutations: usize,
}

#[derive(Debug, Args)]
pub struct RandomPointsArgs {
    pub f: PathBuf,
    /// One or more thresholds, run in increasing order with the last passing
    /// partition as a warm start.
    #[arg(long, value_delimiter = ',', required = true)]
    pub eps: Vec<f64>,
    /// Class budget N per side.
    #[arg(long)]
    pub classes: usize,
    /// Sampled points per side.
    #[arg(long, default_value_t = 500)]
    pub m: usize,
}

pub fn sample_md(a: &SampleMdArgs, g: &Global, r: &mut Report) -> CliResult<Output> {
    let f = input::kernel(r, "f", &a.f, g.header)?;
    let (x, y) = input::spaces(r, g.weights_x.as_deref(), g.weights_y.as_deref(), f.rows(), f.cols())?;
    r.param("k", a.k).param("trials", a.trials);
    let s = sampling::sample_md(&f, &x, &y, a.k, a.trials, g.seed)?;
    let n = (s.trials * s.k * s.k) as f64;
    let mean = s.matrices.iter().flatten().sum::<f64>() / n;
    r.result("trials", s.trials).result("k", s.k).result("mean", mean);
    let json_out = g.out.as_ref().is_some_and(|p| p.extension().is_some_and(|e| e == "json"));
    let artifact = if json_out {
        serde_json::to_vec(&s).map_err(|e| CliError::usage(e.to_string()))?
    } else {
        input::write_md_csv(&s)?
    };
    r.result("sha256", crate::report::sha256_hex(&artifact));
    Ok(Output {
        artifact: Some(artifact),
        print_artifact: false,
    })
}

pub fn compare_md(a: &CompareMdArgs, _g: &Global, r: &mut Report) -> CliResult<Output> {
    let s1 = input::md_sample(r, "s1", &a.s1)?;
    let s2 = input::md_sample(r, "s2", &a.s2)?;
    r.param("permutations", a.permutations);
    let c = sampling::compare_md(&s1, &s2, a.permutations)?;
    r.result("statistic", c.statistic)
        .result("pValue", c.p_value)
        .result("permutationSeed", c.seed);
    Ok(Output::default())
}

pub fn random_points(a: &RandomPointsArgs, g: &Global, r: &mut Report) -> CliResult<Output> {
    let f = input::kernel(r, "f", &a.f, g.header)?;
    let (x, y) = input::spaces(r, g.weights_x.as_deref(), g.weights_y.as_deref(), f.rows(), f.cols())?;
    let mut eps = a.eps.clone();
    eps.sort_by(f64::total_cmp);
    r.param("eps", &eps).param("classes", a.classes).param("m", a.m);
    let mut warm = None;
    let mut runs = Vec::new();
    for &e in &eps {
        let params = RandomPointsParams {
            eps: e,
            n: a.classes,
            m: a.m,
            seed: g.seed,
        };
        let out = sampling::random_points_test(&f, &x, &y, &params, warm.as_ref())?;
        runs.push(serde_json::json!({
            "eps": e,
            "pass": out.pass,
            "outlierFraction": out.partition.outlier_fraction,
            "maxOscillation": out.max_oscillation,
            "warmStarted": out.warm_started,
        }));
        if out.pass {
            warm = Some(out.partition);
        }
    }
    let all_pass = runs.iter().map(|v| v["pass"].as_bool() == Some(true)).collect::<Vec<_>>();
    r.result("runs", runs).result("pass", all_pass);
    if let Some(p) = warm {
        r.witness("partition", p);
    }
    Ok(Output::default())
}
