use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use deimkit::io::read_matrix;
use deimkit::linalg::thin_svd;
use deimkit::selection::{
    brute_force_volume_select, condition_of, default_threshold, deim_select, lu_pp_select,
    qdeim_bound, qdeim_factor, qdeim_report, qdeimr_select, random_select, refine_volume,
    volume_optimal_bound, Method, QdeimrConfig, SelectionRecord, SelectionReport,
};
use deimkit::tol::BOUND_ROUNDOFF;
use deimkit::Matrix;
use serde::Serialize;

use super::{parse_method, thread_cap, RestartArg, SamplingArg};
use crate::failure::Failure;
use crate::report::ExperimentReport;

#[derive(Args, Debug, Serialize)]
pub struct SelectArgs {
    /// Basis file, MatrixMarket array (.mtx) or CSV.
    pub matrix: PathBuf,
    #[arg(long, value_parser = parse_method, default_value = "qdeim")]
    pub method: Method,
    /// Use only the leading m columns.
    #[arg(long)]
    pub m: Option<usize>,
    /// Replace the columns by the left singular vectors of the input.
    #[arg(long)]
    pub orthonormalize: bool,
    /// Q-DEIMr window size (default m).
    #[arg(long)]
    pub window: Option<usize>,
    /// Q-DEIMr bound on c (default √m·√(n−m+1)).
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, value_enum, default_value = "uniform")]
    pub sampling: SamplingArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Q-DEIMr row-visit budget (default n).
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long, value_enum, default_value = "continue")]
    pub restart: RestartArg,
    /// Q-DEIMr workers racing with derived seeds.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Subsets drawn by the random method.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Follow Q-DEIM with a 2 × 2 volume refinement.
    #[arg(long)]
    pub refine: bool,
    #[arg(long, default_value = "deimkit-out")]
    #[serde(skip)]
    pub out: PathBuf,
}

pub fn run(args: SelectArgs) -> Result<ExperimentReport, Failure> {
    let mut report = ExperimentReport::new("select", &args, &args.out)?;
    let started = Instant::now();
    let mut u = read_matrix(&args.matrix).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", args.matrix.display(), f.message);
        f
    })?;
    report.time("read", started.elapsed());

    if args.orthonormalize {
        let t = Instant::now();
        u = thin_svd(&u)?.z;
        report.time("orthonormalize", t.elapsed());
    }
    if let Some(m) = args.m {
        if m == 0 || m > u.cols() {
            return Err(Failure::usage(format!("--m {m} outside 1..={}", u.cols())));
        }
        u = u.leading_cols(m);
    }
    let (n, m) = u.shape();

    let t = Instant::now();
    let (sel, threshold) = select(&u, &args)?;
    report.time("selection", t.elapsed());

    let orthonormal = u.orthonormality_defect() <= 1e-10;
    let record = SelectionRecord::new(&sel, args.method.name(), seed_used(&args));
    report.result("n", n);
    report.result("m", m);
    report.result("orthonormal", orthonormal);
    report.result("indices", &record.indices);
    report.result("c", sel.c_exact);
    report.result("c_bound_used", sel.c_bound_used);
    report.result("rows_visited", sel.rows_visited);
    report.result("resample_rounds", sel.resample_rounds);
    report.write_json("selection.json", &record)?;

    match args.method {
        Method::Qdeim if orthonormal => report.check_le(
            "c within Q-DEIM bound",
            sel.c_exact,
            qdeim_bound(n, m) * (1.0 + BOUND_ROUNDOFF),
        ),
        Method::Volume if orthonormal => report.check_le(
            "c within volume-optimal bound",
            sel.c_exact,
            volume_optimal_bound(n, m) * (1.0 + BOUND_ROUNDOFF),
        ),
        Method::Qdeimr => report.check_le("c within threshold", sel.c_exact, threshold),
        _ => {}
    }
    Ok(report)
}

fn seed_used(args: &SelectArgs) -> Option<u64> {
    matches!(args.method, Method::Qdeimr | Method::Random).then_some(args.seed)
}

fn select(u: &Matrix, args: &SelectArgs) -> Result<(SelectionReport, f64), Failure> {
    let (n, m) = u.shape();
    let full = |sel| -> Result<SelectionReport, Failure> {
        let c_exact = condition_of(u, &sel)?;
        Ok(SelectionReport {
            selection: sel,
            c_exact,
            c_bound_used: f64::NAN,
            rows_visited: n,
            resample_rounds: 0,
            wall_time: Default::default(),
        })
    };
    let report = match args.method {
        Method::Deim => full(deim_select(u)?)?,
        Method::Lu => full(lu_pp_select(u)?)?,
        Method::Volume => {
            let mut r = full(brute_force_volume_select(u)?)?;
            r.c_bound_used = volume_optimal_bound(n, m);
            r
        }
        Method::Qdeim if args.refine => {
            let (sel, qr) = qdeim_factor(u)?;
            let mut r = full(refine_volume(u, &sel, &qr))?;
            r.c_bound_used = qdeim_bound(n, m);
            r
        }
        Method::Qdeim => qdeim_report(u)?,
        Method::Random => random_select(u, args.seed, args.trials)?,
        Method::Qdeimr => {
            let mut cfg = QdeimrConfig::new(n, m, args.seed);
            if let Some(k) = args.window {
                cfg.window_k = k;
            }
            cfg.c_threshold = args.threshold.unwrap_or_else(|| default_threshold(n, m));
            cfg.sampling = args.sampling.into();
            if let Some(b) = args.budget {
                cfg.max_row_visits = b;
            }
            cfg.restart_policy = args.restart.into();
            cfg.workers = thread_cap()
                .map_or(args.workers, |cap| args.workers.min(cap))
                .max(1);
            let r = qdeimr_select(u, &cfg)?;
            return Ok((r, cfg.c_threshold));
        }
    };
    Ok((report, f64::NAN))
}
