//! Reference selections: best of several random draws, and exhaustive volume search.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{DeimError, Result};
use crate::linalg::{determinant, inverse_norm};
use crate::matrix::Matrix;
use crate::selection::{check_basis, SelectionOperator, SelectionReport};
use crate::tol;

/// Draws `trials` uniform `m`-subsets of the rows of `u` and keeps the one with
/// the smallest `c`. Singular draws are skipped.
pub fn random_select(u: &Matrix, seed: u64, trials: usize) -> Result<SelectionReport> {
    check_basis(u, "random_select")?;
    if trials == 0 {
        return Err(DeimError::InvalidArgument(
            "trials must be at least 1".into(),
        ));
    }
    let started = Instant::now();
    let (n, m) = u.shape();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..trials {
        let picks = rand::seq::index::sample(&mut rng, n, m).into_vec();
        let c = inverse_norm(&u.select_rows(&picks))?;
        if !c.is_finite() {
            continue;
        }
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, picks));
        }
    }
    let (c, picks) = best.ok_or(DeimError::AllDrawsSingular { trials })?;
    Ok(SelectionReport {
        selection: SelectionOperator::new(picks, n)?,
        c_exact: c,
        c_bound_used: f64::INFINITY,
        rows_visited: n,
        resample_rounds: trials,
        wall_time: started.elapsed(),
    })
}

fn binomial(n: usize, m: usize) -> f64 {
    let m = m.min(n - m);
    (0..m).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exhaustive search for the `m × m` row block of largest `|det|`.
///
/// Combinations are visited in lexicographic order and a later one replaces
/// the incumbent only if it is larger by a relative margin, so near-ties
/// resolve to the lexicographically smallest index set.
pub fn brute_force_volume_select(u: &Matrix) -> Result<SelectionOperator> {
    check_basis(u, "brute_force_volume_select")?;
    let (n, m) = u.shape();
    let combinations = binomial(n, m);
    if combinations > tol::BRUTE_FORCE_LIMIT {
        return Err(DeimError::TooLarge {
            combinations,
            limit: tol::BRUTE_FORCE_LIMIT,
        });
    }
    let margin = 1.0 + 1e-12;
    let mut idx: Vec<usize> = (0..m).collect();
    let mut best = (0.0, idx.clone());
    loop {
        let vol = determinant(&u.select_rows(&idx))?.abs();
        if vol > best.0 * margin {
            best = (vol, idx.clone());
        }
        // Next combination in lexicographic order.
        let mut i = m;
        loop {
            if i == 0 {
                if best.0 == 0.0 {
                    return Err(DeimError::RankDeficient {
                        index: 0,
                        pivot: 0.0,
                        threshold: 0.0,
                    });
                }
                return SelectionOperator::new(best.1, n);
            }
            i -= 1;
            if idx[i] < n - m + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
