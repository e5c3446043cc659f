//! Q-DEIMr: pivoted QR on a small randomly sampled window of the rows of `U`.
//!
//! The work array `L` holds at most `k` columns of `W = Uᵀ`, each already
//! multiplied by the reflectors of the pivots accepted so far. A candidate
//! pivot is accepted when the incremental estimate of `‖T⁻¹‖₂` stays below the
//! threshold; otherwise every remaining column of `L` is discarded and fresh
//! columns are drawn from the rows not yet visited.
//!
//! The estimate is a lower bound, so a completed selection is checked with the
//! exact `‖T⁻¹‖₂`. When that check fails, or when `m` draws in a row are
//! rejected at the same step, pivoting restarts on the accepted columns plus
//! fresh ones in a window widened by `m`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{DeimError, Result};
use crate::linalg::qr::{apply_reflectors, Householder};
use crate::linalg::{inverse_norm, IceState};
use crate::matrix::{norm2, Matrix};
use crate::selection::{check_basis, condition_of, SelectionOperator, SelectionReport};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    /// Leading indices of a randomly permuted active set.
    Uniform,
    /// Largest current trailing norms first.
    NormSorted,
    /// Draw without replacement with probability proportional to `‖U(i,:)‖²`.
    NormWeighted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RestartPolicy {
    /// Keep accepted pivots after a rejection.
    Continue,
    /// Put accepted columns back into the window and pivot from scratch.
    RestartPivoting,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QdeimrConfig {
    pub window_k: usize,
    pub c_threshold: f64,
    pub sampling: Sampling,
    pub seed: u64,
    pub max_row_visits: usize,
    pub restart_policy: RestartPolicy,
    /// Independent workers racing with derived seeds; 1 is bit-deterministic
    /// single-threaded execution.
    pub workers: usize,
}

impl QdeimrConfig {
    /// Defaults for an `n × m` basis: `k = m`, threshold `√m·√(n−m+1)`,
    /// budget `n`, uniform sampling, continue on rejection, one worker.
    pub fn new(n: usize, m: usize, seed: u64) -> Self {
        QdeimrConfig {
            window_k: m,
            c_threshold: default_threshold(n, m),
            sampling: Sampling::Uniform,
            seed,
            max_row_visits: n,
            restart_policy: RestartPolicy::Continue,
            workers: 1,
        }
    }

    fn validate(&self, n: usize, m: usize) -> Result<()> {
        if self.window_k == 0 {
            return Err(DeimError::InvalidArgument(
                "window_k must be at least 1".into(),
            ));
        }
        if !(self.c_threshold > 0.0) {
            return Err(DeimError::InvalidArgument(
                "c_threshold must be positive".into(),
            ));
        }
        if self.max_row_visits < m || self.max_row_visits > n {
            return Err(DeimError::InvalidArgument(format!(
                "max_row_visits must lie in [{m}, {n}], got {}",
                self.max_row_visits
            )));
        }
        if self.workers == 0 {
            return Err(DeimError::InvalidArgument(
                "workers must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// `√m · √(n−m+1)`.
pub fn default_threshold(n: usize, m: usize) -> f64 {
    (m as f64).sqrt() * ((n - m + 1) as f64).sqrt()
}

pub fn qdeimr_select(u: &Matrix, cfg: &QdeimrConfig) -> Result<SelectionReport> {
    check_basis(u, "qdeimr_select")?;
    let (n, m) = u.shape();
    cfg.validate(n, m)?;
    let w = u.transpose();
    let started = Instant::now();

    if cfg.workers == 1 {
        let report = Worker::new(u, &w, cfg, cfg.seed)
            .run(None)?
            .expect("single worker is never cancelled");
        return finish(u, report, started);
    }

    let best = AtomicUsize::new(usize::MAX);
    let outcomes: Vec<Result<Option<SelectionReport>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..cfg.workers)
            .map(|id| {
                let w = &w;
                let best = &best;
                scope.spawn(move || {
                    let out = Worker::new(u, w, cfg, sub_seed(cfg.seed, id)).run(Some(best));
                    if let Ok(Some(r)) = &out {
                        best.fetch_min(r.rows_visited, AtomicOrdering::SeqCst);
                    }
                    out
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("selection worker panicked"))
            .collect()
    });

    // Fewest rows visited wins, then smallest c, then lowest worker id.
    let mut winner: Option<SelectionReport> = None;
    let mut first_error = None;
    for out in outcomes {
        match out {
            Ok(Some(r)) => {
                let better = match &winner {
                    None => true,
                    Some(b) => {
                        (r.rows_visited, r.c_exact).partial_cmp(&(b.rows_visited, b.c_exact))
                            == Some(Ordering::Less)
                    }
                };
                if better {
                    winner = Some(r);
                }
            }
            Ok(None) => {}
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    match winner {
        Some(r) => finish(u, r, started),
        None => Err(first_error.expect("no worker produced an outcome")),
    }
}

fn finish(u: &Matrix, mut report: SelectionReport, started: Instant) -> Result<SelectionReport> {
    report.c_exact = condition_of(u, &report.selection)?;
    report.wall_time = started.elapsed();
    Ok(report)
}

/// Seed for worker `id`, derived with a SplitMix64 step.
pub fn sub_seed(seed: u64, id: usize) -> u64 {
    let mut z = seed.wrapping_add((id as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Candidate {
    index: usize,
    col: Vec<f64>,
}

struct Worker<'a> {
    u: &'a Matrix,
    w: &'a Matrix,
    cfg: &'a QdeimrConfig,
    sampler: Sampler,
    accepted: Vec<usize>,
    reflectors: Vec<Householder>,
    t_cols: Vec<Vec<f64>>,
    ice: IceState,
    window: Vec<Candidate>,
    visited: usize,
    rounds: usize,
}

impl<'a> Worker<'a> {
    fn new(u: &'a Matrix, w: &'a Matrix, cfg: &'a QdeimrConfig, seed: u64) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(seed);
        Worker {
            u,
            w,
            cfg,
            sampler: Sampler::new(cfg.sampling, w, rng),
            accepted: Vec::new(),
            reflectors: Vec::new(),
            t_cols: Vec::new(),
            ice: IceState::new(),
            window: Vec::new(),
            visited: 0,
            rounds: 0,
        }
    }

    fn run(mut self, cancel: Option<&AtomicUsize>) -> Result<Option<SelectionReport>> {
        let m = self.w.rows();
        let n = self.w.cols();
        let mut k = self.cfg.window_k;
        // Consecutive rejections at the current step.
        let mut stall = 0;
        while self.accepted.len() < m {
            let acc = self.accepted.len();
            // With k ≤ acc the window would be empty; keep at least one slot.
            let slots = k.max(acc + 1) - acc;
            if self.window.len() < slots {
                let room = self.cfg.max_row_visits - self.visited;
                let want = (slots - self.window.len()).min(room);
                let drawn = self.sampler.draw(want, self.w, &self.reflectors, acc);
                self.visited += drawn.len();
                for index in drawn {
                    let mut col = self.w.col(index).to_vec();
                    apply_reflectors(&self.reflectors, &mut col);
                    self.window.push(Candidate { index, col });
                }
            }
            if let Some(best) = cancel {
                if self.visited > best.load(AtomicOrdering::SeqCst) {
                    return Ok(None);
                }
            }
            if self.window.is_empty() {
                return Err(self.budget_error());
            }

            let pick = self.choose_pivot(acc);
            let (h, beta) = Householder::annihilate(&self.window[pick].col[acc..], acc);
            let gate = if beta == 0.0 {
                None
            } else {
                self.ice
                    .append(&self.window[pick].col[..acc], beta)
                    .ok()
                    .filter(|s| s.gamma() <= self.cfg.c_threshold)
            };

            match gate {
                Some(state) => {
                    let cand = self.window.swap_remove(pick);
                    for c in &mut self.window {
                        h.apply(&mut c.col);
                    }
                    let mut t = cand.col[..acc].to_vec();
                    t.push(beta);
                    self.t_cols.push(t);
                    self.reflectors.push(h);
                    self.accepted.push(cand.index);
                    self.ice = state;
                    stall = 0;
                    // The estimate can sit below the true norm; the completed
                    // factor is checked exactly before it is returned.
                    if self.accepted.len() == m && self.exact_c() > self.cfg.c_threshold {
                        self.rounds += 1;
                        self.restart_pivoting();
                        k = (k + m).min(n);
                    }
                }
                None => {
                    self.rounds += 1;
                    self.window.clear();
                    stall += 1;
                    if acc > 0 && self.cfg.restart_policy == RestartPolicy::RestartPivoting {
                        self.restart_pivoting();
                    } else if acc > 0 && stall >= m {
                        // The accepted pivots admit no acceptable completion
                        // among the rows tried; re-pivot them in a wider window.
                        self.restart_pivoting();
                        k = (k + m).min(n);
                        stall = 0;
                    }
                }
            }
        }

        let c = self.exact_c();
        let selection = SelectionOperator::new(self.accepted, self.u.rows())?;
        Ok(Some(SelectionReport {
            selection,
            c_exact: c,
            c_bound_used: self.cfg.c_threshold,
            rows_visited: self.visited,
            resample_rounds: self.rounds,
            wall_time: Default::default(),
        }))
    }

    /// Puts the accepted columns back into the window untransformed and
    /// discards the accumulated factorization.
    fn restart_pivoting(&mut self) {
        for index in self.accepted.drain(..) {
            self.window.push(Candidate {
                index,
                col: self.w.col(index).to_vec(),
            });
        }
        let w = self.w;
        for c in &mut self.window[..] {
            c.col.copy_from_slice(w.col(c.index));
        }
        self.reflectors.clear();
        self.t_cols.clear();
        self.ice = IceState::new();
        self.sampler.restart(self.w);
    }

    /// `‖T⁻¹‖₂` of the accepted triangle.
    fn exact_c(&self) -> f64 {
        let acc = self.accepted.len();
        if acc == 0 {
            return f64::INFINITY;
        }
        let t = Matrix::from_fn(
            acc,
            acc,
            |i, j| if i <= j { self.t_cols[j][i] } else { 0.0 },
        );
        inverse_norm(&t).unwrap_or(f64::INFINITY)
    }

    /// Largest trailing norm in the window; smallest global index among ties.
    fn choose_pivot(&self, acc: usize) -> usize {
        let norms: Vec<f64> = self.window.iter().map(|c| norm2(&c.col[acc..])).collect();
        let top = norms.iter().fold(0.0_f64, |a, &b| a.max(b));
        let cut = top * (1.0 - tol::PIVOT_TIE);
        (0..self.window.len())
            .filter(|&i| norms[i] >= cut)
            .min_by_key(|&i| self.window[i].index)
            .expect("window is not empty")
    }

    fn budget_error(&self) -> DeimError {
        let c = self.exact_c();
        let selection = SelectionOperator::new(self.accepted.clone(), self.u.rows())
            .expect("accepted indices are distinct");
        DeimError::BudgetExceeded {
            partial: Box::new(SelectionReport {
                selection,
                c_exact: c,
                c_bound_used: self.cfg.c_threshold,
                rows_visited: self.visited,
                resample_rounds: self.rounds,
                wall_time: Default::default(),
            }),
            wanted: self.w.rows(),
        }
    }
}

/// Source of fresh column indices; every index is handed out at most once.
enum Sampler {
    Uniform { active: Vec<usize>, rng: ChaCha8Rng },
    NormSorted { heap: BinaryHeap<Entry> },
    Weighted { order: Vec<usize>, next: usize },
}

#[derive(PartialEq)]
struct Entry {
    norm: f64,
    index: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.norm
            .total_cmp(&other.norm)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Sampler {
    fn new(kind: Sampling, w: &Matrix, mut rng: ChaCha8Rng) -> Sampler {
        let n = w.cols();
        match kind {
            Sampling::Uniform => Sampler::Uniform {
                active: (0..n).collect(),
                rng,
            },
            Sampling::NormSorted => Sampler::NormSorted {
                heap: (0..n)
                    .map(|index| Entry {
                        norm: norm2(w.col(index)),
                        index,
                    })
                    .collect(),
            },
            Sampling::NormWeighted => {
                // Efraimidis–Spirakis: sorting by ln(r)/ω² realizes sequential
                // draws without replacement with probabilities ∝ ω².
                let mut keyed: Vec<(f64, usize)> = (0..n)
                    .map(|i| {
                        let weight = norm2(w.col(i)).powi(2);
                        let r: f64 = rng.random::<f64>();
                        let key = if weight > 0.0 {
                            r.max(f64::MIN_POSITIVE).ln() / weight
                        } else {
                            f64::NEG_INFINITY
                        };
                        (key, i)
                    })
                    .collect();
                keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
                Sampler::Weighted {
                    order: keyed.into_iter().map(|(_, i)| i).collect(),
                    next: 0,
                }
            }
        }
    }

    fn draw(
        &mut self,
        count: usize,
        w: &Matrix,
        reflectors: &[Householder],
        acc: usize,
    ) -> Vec<usize> {
        match self {
            Sampler::Uniform { active, rng } => {
                let count = count.min(active.len());
                for t in 0..count {
                    let j = rng.random_range(t..active.len());
                    active.swap(t, j);
                }
                active.drain(..count).collect()
            }
            Sampler::NormSorted { heap } => {
                // Stored norms only over-estimate the current trailing norms,
                // so the top entry is taken once its refreshed value still
                // leads the heap.
                let mut out = Vec::with_capacity(count);
                let mut col = vec![0.0; w.rows()];
                while out.len() < count {
                    let Some(top) = heap.pop() else { break };
                    col.copy_from_slice(w.col(top.index));
                    apply_reflectors(reflectors, &mut col);
                    let fresh = Entry {
                        norm: norm2(&col[acc..]),
                        index: top.index,
                    };
                    match heap.peek() {
                        Some(next) if *next > fresh => heap.push(fresh),
                        _ => out.push(fresh.index),
                    }
                }
                out
            }
            Sampler::Weighted { order, next } => {
                let end = (*next + count).min(order.len());
                let out = order[*next..end].to_vec();
                *next = end;
                out
            }
        }
    }

    /// Called when the accumulated transformation is reset.
    fn restart(&mut self, w: &Matrix) {
        if let Sampler::NormSorted { heap } = self {
            let rest: Vec<usize> = heap.drain().map(|e| e.index).collect();
            heap.extend(rest.into_iter().map(|index| Entry {
                norm: norm2(w.col(index)),
                index,
            }));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_orthonormal;
    use crate::selection::qdeim_select;

    #[test]
    fn full_window_matches_qdeim() {
        for seed in 0..5 {
            let u = haar_orthonormal(60, 6, seed).unwrap();
            let mut cfg = QdeimrConfig::new(60, 6, seed);
            cfg.window_k = 60;
            cfg.c_threshold = f64::INFINITY;
            let r = qdeimr_select(&u, &cfg).unwrap();
            assert_eq!(r.selection, qdeim_select(&u).unwrap());
            assert_eq!(r.rows_visited, 60);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let u = haar_orthonormal(400, 8, 3).unwrap();
        let cfg = QdeimrConfig::new(400, 8, 11);
        let a = qdeimr_select(&u, &cfg).unwrap();
        let b = qdeimr_select(&u, &cfg).unwrap();
        assert_eq!(a.selection, b.selection);
        assert_eq!(a.rows_visited, b.rows_visited);
        assert!(a.c_exact <= cfg.c_threshold);
    }

    #[test]
    fn every_sampling_and_policy_meets_threshold() {
        let u = haar_orthonormal(500, 10, 5).unwrap();
        for sampling in [
            Sampling::Uniform,
            Sampling::NormSorted,
            Sampling::NormWeighted,
        ] {
            for policy in [RestartPolicy::Continue, RestartPolicy::RestartPivoting] {
                let mut cfg = QdeimrConfig::new(500, 10, 2);
                cfg.sampling = sampling;
                cfg.restart_policy = policy;
                let r = qdeimr_select(&u, &cfg).unwrap();
                assert_eq!(r.selection.len(), 10);
                assert!(r.rows_visited >= 10);
                assert!(r.c_exact <= cfg.c_threshold, "{sampling:?} {policy:?}");
            }
        }
    }

    #[test]
    fn tight_budget_reports_partial_selection() {
        let u = haar_orthonormal(300, 10, 8).unwrap();
        let mut cfg = QdeimrConfig::new(300, 10, 1);
        cfg.c_threshold = 1.0;
        cfg.max_row_visits = 40;
        match qdeimr_select(&u, &cfg) {
            Err(DeimError::BudgetExceeded { partial, wanted }) => {
                assert_eq!(wanted, 10);
                assert_eq!(partial.rows_visited, 40);
                assert!(partial.selection.len() < 10);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn multi_worker_is_deterministic() {
        let u = haar_orthonormal(800, 12, 4).unwrap();
        let mut cfg = QdeimrConfig::new(800, 12, 9);
        cfg.workers = 4;
        let a = qdeimr_select(&u, &cfg).unwrap();
        let b = qdeimr_select(&u, &cfg).unwrap();
        assert_eq!(a.selection, b.selection);
        assert_eq!(a.rows_visited, b.rows_visited);
    }

    #[test]
    fn small_window_still_finishes() {
        let u = haar_orthonormal(200, 6, 6).unwrap();
        let mut cfg = QdeimrConfig::new(200, 6, 6);
        cfg.window_k = 2;
        let r = qdeimr_select(&u, &cfg).unwrap();
        assert_eq!(r.selection.len(), 6);
    }
}
