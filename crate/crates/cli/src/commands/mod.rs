pub mod benchmark;
pub mod fn_demo;
pub mod paramfun;
pub mod rc_demo;
pub mod select;

use clap::ValueEnum;
use deimkit::selection::{Method, RestartPolicy, Sampling};
use serde::Serialize;

pub fn parse_method(s: &str) -> Result<Method, String> {
    Method::parse(s)
        .ok_or_else(|| format!("unknown method '{s}' (deim, qdeim, qdeimr, lu, random, volume)"))
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingArg {
    #[value(alias = "uniform-permutation")]
    Uniform,
    #[value(alias = "norm-sorted-batches")]
    NormSorted,
    #[value(alias = "norm-weighted-draw")]
    NormWeighted,
}

impl From<SamplingArg> for Sampling {
    fn from(s: SamplingArg) -> Self {
        match s {
            SamplingArg::Uniform => Sampling::Uniform,
            SamplingArg::NormSorted => Sampling::NormSorted,
            SamplingArg::NormWeighted => Sampling::NormWeighted,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RestartArg {
    Continue,
    RestartPivoting,
}

impl From<RestartArg> for RestartPolicy {
    fn from(r: RestartArg) -> Self {
        match r {
            RestartArg::Continue => RestartPolicy::Continue,
            RestartArg::RestartPivoting => RestartPolicy::RestartPivoting,
        }
    }
}

/// Worker cap from `DEIMKIT_THREADS`; `None` when unset or invalid.
pub fn thread_cap() -> Option<usize> {
    std::env::var("DEIMKIT_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
