use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use deimkit::linalg::haar_orthonormal;
use deimkit::selection::{condition_of, deim_select, qdeim_bound, qdeim_report, sub_seed};
use rayon::prelude::*;
use serde::Serialize;

use super::{median, thread_cap};
use crate::failure::Failure;
use crate::report::ExperimentReport;

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchmarkPreset {
    /// 200 trials of 10000 × 100.
    Ex22,
    /// 50 trials of 2000 × 50 with the same checks.
    Ex22Desk,
}

#[derive(Args, Debug, Serialize)]
pub struct BenchmarkArgs {
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub m: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Overrides n, m and trials and adds the reference checks.
    #[arg(long, value_enum)]
    pub paper_preset: Option<BenchmarkPreset>,
    #[arg(long, default_value = "deimkit-out")]
    #[serde(skip)]
    pub out: PathBuf,
}

pub fn run(mut args: BenchmarkArgs) -> Result<ExperimentReport, Failure> {
    match args.paper_preset {
        Some(BenchmarkPreset::Ex22) => (args.n, args.m, args.trials) = (10_000, 100, 200),
        Some(BenchmarkPreset::Ex22Desk) => (args.n, args.m, args.trials) = (2_000, 50, 50),
        None => {}
    }
    let (n, m) = (args.n, args.m);
    if m == 0 || m > n {
        return Err(Failure::usage(format!(
            "need 1 <= m <= n, got n={n}, m={m}"
        )));
    }
    if args.trials == 0 {
        return Err(Failure::usage("need at least one trial"));
    }
    let mut report = ExperimentReport::new("benchmark-random", &args, &args.out)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_cap().unwrap_or(0))
        .build()
        .map_err(|e| Failure::usage(e.to_string()))?;
    let started = Instant::now();
    let rows: Vec<Result<(f64, f64), Failure>> = pool.install(|| {
        (0..args.trials)
            .into_par_iter()
            .map(|t| {
                let u = haar_orthonormal(n, m, sub_seed(args.seed, t))?;
                let c_deim = condition_of(&u, &deim_select(&u)?)?;
                let c_qdeim = qdeim_report(&u)?.c_exact;
                Ok((c_deim, c_qdeim))
            })
            .collect()
    });
    report.time("trials", started.elapsed());
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;

    let c_deim: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let c_qdeim: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let sqrt_n = (n as f64).sqrt();
    let below = c_qdeim.iter().filter(|&&c| c < sqrt_n).count();
    let max_q = c_qdeim.iter().copied().fold(0.0, f64::max);
    report.result("count_qdeim_below_sqrt_n", below);
    report.result("median_c_deim", median(&c_deim));
    report.result("median_c_qdeim", median(&c_qdeim));
    report.result("max_c_deim", c_deim.iter().copied().fold(0.0, f64::max));
    report.result("max_c_qdeim", max_q);

    let table: Vec<Vec<f64>> = rows
        .iter()
        .enumerate()
        .map(|(t, r)| vec![t as f64, r.0, r.1])
        .collect();
    let header = ["trial", "c_deim", "c_qdeim"].map(String::from);
    report.write_csv("trials.csv", &header, &table)?;

    report.check_le("max Q-DEIM c within bound", max_q, qdeim_bound(n, m));
    if args.paper_preset.is_some() {
        let under_100 = c_qdeim.iter().filter(|&&c| c < 100.0).count();
        report.check_true("every Q-DEIM c below 100", under_100 == c_qdeim.len());
        report.check_le(
            "median Q-DEIM c vs median DEIM c",
            median(&c_qdeim),
            median(&c_deim),
        );
    }
    Ok(report)
}
