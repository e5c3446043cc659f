use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use deimkit::mor::pipeline::{reduce_and_compare, FullRun, RunSetup};
use deimkit::mor::{build_rc_model_with_input, RcInput};
use deimkit::selection::Method;
use serde::Serialize;
use serde_json::json;

use super::fn_demo::{blowup_context, write_row_errors, write_sigma};
use super::parse_method;
use crate::failure::Failure;
use crate::reference;
use crate::report::ExperimentReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputArg {
    Exp,
    Sin50,
    Sin1000,
}

impl From<InputArg> for RcInput {
    fn from(i: InputArg) -> Self {
        match i {
            InputArg::Exp => RcInput::Exp,
            InputArg::Sin50 => RcInput::Sin50,
            InputArg::Sin1000 => RcInput::Sin1000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RcPreset {
    Rc10,
    Rc20,
    RcSin50,
    RcSin1000,
}

#[derive(Args, Debug, Serialize)]
pub struct RcDemoArgs {
    #[arg(long, default_value_t = 10)]
    pub r: usize,
    /// Nonlinear basis size (default r).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_parser = parse_method, value_delimiter = ',', default_value = "deim,qdeim")]
    pub method: Vec<Method>,
    #[arg(long, value_enum, default_value = "exp")]
    pub input: InputArg,
    /// Time steps over [0, 7] (default 14000; 140000 for sin1000).
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 1425)]
    pub snapshots: usize,
    /// Pins the configuration and adds the reference checks.
    #[arg(long, value_enum)]
    pub paper_preset: Option<RcPreset>,
    #[arg(long, default_value = "deimkit-out")]
    #[serde(skip)]
    pub out: PathBuf,
}

pub fn run(mut args: RcDemoArgs) -> Result<ExperimentReport, Failure> {
    if let Some(p) = args.paper_preset {
        let (r, input) = match p {
            RcPreset::Rc10 => (10, InputArg::Exp),
            RcPreset::Rc20 => (20, InputArg::Exp),
            RcPreset::RcSin50 => (5, InputArg::Sin50),
            RcPreset::RcSin1000 => (5, InputArg::Sin1000),
        };
        args.r = r;
        args.m = Some(r);
        args.input = input;
        args.method = vec![Method::Deim, Method::Qdeim];
        (args.steps, args.n, args.snapshots) = (None, 1000, 1425);
    }
    let m = args.m.unwrap_or(args.r);
    let input = RcInput::from(args.input);
    let mut setup = RunSetup::rc_for(input);
    if let Some(s) = args.steps {
        setup.n_steps = s;
    }
    setup.snapshot_count = args.snapshots;
    let mut report = ExperimentReport::new("rc-demo", &args, &args.out)?;
    report.result("steps", setup.n_steps);

    let t = Instant::now();
    let fom = build_rc_model_with_input(args.n, input)?;
    let full = FullRun::new(fom, setup).map_err(|e| blowup_context(e, &args))?;
    report.time("full_model", t.elapsed());
    write_sigma(&mut report, &full)?;

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
                "xi1_error": o.xi1_error,
                "c": o.c,
                "indices": o.selection.one_based(),
            }),
        );
        outcomes.push(o);
    }
    write_row_errors(&mut report, &outcomes)?;

    if let Some(first) = outcomes.first() {
        let coords = &full.trajectory.states.coords;
        let rows: Vec<Vec<f64>> = (0..coords.len())
            .map(|i| {
                let mut row = vec![coords[i], first.xi1_full[i]];
                row.extend(outcomes.iter().map(|o| o.xi1_reduced[i]));
                row
            })
            .collect();
        let mut header = vec!["t".to_string(), "full".to_string()];
        header.extend(outcomes.iter().map(|o| o.method.name().to_string()));
        report.write_csv("xi1.csv", &header, &rows)?;
    }

    let find = |meth| outcomes.iter().find(|o| o.method == meth);
    if let (Some(d), Some(q)) = (find(Method::Deim), find(Method::Qdeim)) {
        let mut a = d.selection.indices().to_vec();
        let mut b = q.selection.indices().to_vec();
        a.sort_unstable();
        b.sort_unstable();
        report.result("same_index_set", a == b);
        match args.paper_preset {
            Some(RcPreset::Rc10 | RcPreset::Rc20) => {
                let (ed, eq, xd, xq) =
                    reference::rc_errors(args.r).expect("preset r has reference values");
                report.check_factor("DEIM epsilon vs reference", d.epsilon, ed, 3.0);
                report.check_factor("Q-DEIM epsilon vs reference", q.epsilon, eq, 3.0);
                report.check_factor("DEIM xi1 error vs reference", d.xi1_error, xd, 3.0);
                report.check_factor("Q-DEIM xi1 error vs reference", q.xi1_error, xq, 3.0);
            }
            Some(RcPreset::RcSin50 | RcPreset::RcSin1000) => {
                report.check_true("DEIM and Q-DEIM select the same indices", a == b);
            }
            None => {}
        }
    }
    Ok(report)
}
