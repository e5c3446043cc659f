use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use deimkit::io::write_matrix;
use deimkit::mor::build_fn_model;
use deimkit::mor::pipeline::{reduce_and_compare, FullRun, ReductionOutcome, RunSetup};
use deimkit::selection::{condition_of, qdeim_select, Method};
use serde::Serialize;
use serde_json::json;

use super::parse_method;
use crate::failure::Failure;
use crate::reference;
use crate::report::ExperimentReport;

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
pub enum FnPreset {
    Fn4,
    Fn5,
    Fn6,
    Fn7,
}

#[derive(Args, Debug, Serialize)]
pub struct FnDemoArgs {
    /// State basis size.
    #[arg(long, default_value_t = 5)]
    pub r: usize,
    /// Nonlinear basis size (default r).
    #[arg(long)]
    pub m: Option<usize>,
    /// Selection methods to compare.
    #[arg(long, value_parser = parse_method, value_delimiter = ',', default_value = "deim,qdeim")]
    pub method: Vec<Method>,
    #[arg(long, default_value_t = 16_000)]
    pub steps: usize,
    /// Spatial nodes per field; the state has twice as many entries.
    #[arg(long, default_value_t = 1024)]
    pub n_half: usize,
    #[arg(long, default_value_t = 100)]
    pub snapshots: usize,
    /// Also write the nonlinear POD basis as `nonlinear_basis.mtx`.
    #[arg(long)]
    pub save_basis: bool,
    /// Pins r = m and adds the reference error checks.
    #[arg(long, value_enum)]
    pub paper_preset: Option<FnPreset>,
    #[arg(long, default_value = "deimkit-out")]
    #[serde(skip)]
    pub out: PathBuf,
}

pub fn run(mut args: FnDemoArgs) -> Result<ExperimentReport, Failure> {
    if let Some(p) = args.paper_preset {
        let r = match p {
            FnPreset::Fn4 => 4,
            FnPreset::Fn5 => 5,
            FnPreset::Fn6 => 6,
            FnPreset::Fn7 => 7,
        };
        args.r = r;
        args.m = Some(r);
        args.method = vec![Method::Deim, Method::Qdeim];
        (args.steps, args.n_half, args.snapshots) = (16_000, 1024, 100);
    }
    let m = args.m.unwrap_or(args.r);
    let mut report = ExperimentReport::new("fn-demo", &args, &args.out)?;

    let setup = RunSetup {
        t_span: (0.0, 8.0),
        n_steps: args.steps,
        snapshot_count: args.snapshots,
    };
    let t = Instant::now();
    let full =
        FullRun::new(build_fn_model(args.n_half)?, setup).map_err(|e| blowup_context(e, &args))?;
    report.time("full_model", t.elapsed());

    let x = &full.trajectory.states.matrix;
    let nh = args.n_half;
    let (mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..x.cols() {
        for &v in &x.col(j)[..nh] {
            vmin = vmin.min(v);
            vmax = vmax.max(v);
        }
    }
    report.result("v_min", vmin);
    report.result("v_max", vmax);
    report.check_ge("v stays above -0.5", vmin, -0.5);
    report.check_le("v stays below 1.5", vmax, 1.5);

    write_sigma(&mut report, &full)?;
    if args.save_basis {
        let path = report.file("nonlinear_basis.mtx");
        write_matrix(path, &full.nonlinear_svd.z)?;
        let z = &full.nonlinear_svd.z;
        let c = condition_of(z, &qdeim_select(z)?)?;
        report.result("full_basis_qdeim_c", c);
        if args.paper_preset.is_some() && z.cols() == 100 {
            report.check_factor(
                "Q-DEIM c of the full nonlinear basis vs reference",
                c,
                reference::FN_QDEIM_C,
                2.0,
            );
        }
    }

    let mut outcomes = Vec::new();
    for &method in &args.method {
        let t = Instant::now();
        let o =
            reduce_and_compare(&full, args.r, m, method).map_err(|e| blowup_context(e, &args))?;
        report.time(&format!("reduce_{method}"), t.elapsed());
        report.result(
            method.name(),
            json!({
                "epsilon": o.epsilon,
                "c": o.c,
                "indices": o.selection.one_based(),
                "max_row_error": o.row_errors.values.iter().copied().fold(0.0, f64::max),
            }),
        );
        outcomes.push(o);
    }
    write_row_errors(&mut report, &outcomes)?;

    if args.paper_preset.is_some() {
        let (eps_deim, eps_qdeim) =
            reference::fn_epsilon(args.r).expect("preset r has reference values");
        let find = |meth| {
            outcomes
                .iter()
                .find(|o| o.method == meth)
                .expect("preset runs both methods")
        };
        let (d, q) = (find(Method::Deim), find(Method::Qdeim));
        report.check_factor("DEIM epsilon vs reference", d.epsilon, eps_deim, 2.0);
        report.check_factor("Q-DEIM epsilon vs reference", q.epsilon, eps_qdeim, 2.0);
        report.check_le(
            "Q-DEIM epsilon over DEIM epsilon",
            q.epsilon / d.epsilon,
            1.5,
        );
    }
    Ok(report)
}

pub(crate) fn write_sigma(report: &mut ExperimentReport, full: &FullRun) -> Result<(), Failure> {
    let s = &full.state_svd.sigma;
    let f = &full.nonlinear_svd.sigma;
    let rows: Vec<Vec<f64>> = (0..s.len().max(f.len()))
        .map(|i| {
            vec![
                (i + 1) as f64,
                s.get(i).copied().unwrap_or(f64::NAN),
                f.get(i).copied().unwrap_or(f64::NAN),
            ]
        })
        .collect();
    let header = ["index", "sigma_state", "sigma_nonlinear"].map(String::from);
    report.write_csv("singular_values.csv", &header, &rows)
}

pub(crate) fn write_row_errors(
    report: &mut ExperimentReport,
    outcomes: &[ReductionOutcome],
) -> Result<(), Failure> {
    let Some(first) = outcomes.first() else {
        return Ok(());
    };
    let n = first.row_errors.values.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let mut row = vec![(k + 1) as f64];
            row.extend(outcomes.iter().map(|o| o.row_errors.values[k]));
            row
        })
        .collect();
    let mut header = vec!["row".to_string()];
    header.extend(outcomes.iter().map(|o| o.method.name().to_string()));
    report.write_csv("row_errors.csv", &header, &rows)
}

pub(crate) fn blowup_context(e: deimkit::DeimError, config: &impl Serialize) -> Failure {
    let failure = Failure::from(e);
    if failure.code == crate::failure::BLOWUP {
        let echo = serde_json::to_string(config).unwrap_or_default();
        Failure {
            code: failure.code,
            message: format!("{} (configuration: {echo})", failure.message),
        }
    } else {
        failure
    }
}
