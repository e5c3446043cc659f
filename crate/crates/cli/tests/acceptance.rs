//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use deimkit::io::write_matrix;
use deimkit::linalg::{determinant, haar_orthonormal, haar_orthonormal_with};
use deimkit::matrix::norm2;
use deimkit::mor::pipeline::{fn_full_run, rc_full_run, reduce_and_compare};
use deimkit::mor::{approximation_sweep, linspace, param_fun_snapshots, ParamFunKind, RcInput};
use deimkit::pod::{pod_basis, Truncation};
use deimkit::projector::build_projector;
use deimkit::selection::{
    brute_force_volume_select, condition_of, default_threshold, deim_select, lu_pp_select,
    qdeim_bound, qdeim_factor, qdeim_select, qdeimr_select, random_select, sub_seed,
    volume_optimal_bound, Method, QdeimrConfig, SelectionOperator,
};
use deimkit::tol::BOUND_ROUNDOFF;
use deimkit::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Outcome = Result<String, String>;

fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Matrix {
    Matrix::from_fn(n, m, |_, _| rng.sample(StandardNormal))
}

fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn within_factor(value: f64, reference: f64, factor: f64) -> bool {
    let r = value / reference;
    r.is_finite() && r <= factor && r >= 1.0 / factor
}

fn interpolation_exactness() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let u = haar_orthonormal_with(500, 20, &mut rng).map_err(|e| e.to_string())?;
        let sel = if i % 2 == 0 {
            qdeim_select(&u)
        } else {
            deim_select(&u)
        }
        .map_err(|e| e.to_string())?;
        let proj = build_projector(&u, &sel).map_err(|e| e.to_string())?;
        let f = gaussian_vec(&mut rng, 500);
        let fhat = proj.apply(&f).map_err(|e| e.to_string())?;
        for &p in sel.indices() {
            worst = worst.max((fhat[p] - f[p]).abs());
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let msg = format!("max selected-row residual {worst:e}, {secs:.2} s");
    if worst == 0.0 && secs < 10.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn qdeim_bound_property() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut bound_fail, mut tmm_fail, mut worst_ratio) = (0, 0, 0.0f64);
    for _ in 0..1000 {
        let n = rng.random_range(50..=2000);
        let m = rng.random_range(2..=30);
        let u = haar_orthonormal_with(n, m, &mut rng).map_err(|e| e.to_string())?;
        let (sel, qr) = qdeim_factor(&u).map_err(|e| e.to_string())?;
        let c = condition_of(&u, &sel).map_err(|e| e.to_string())?;
        let b = qdeim_bound(n, m);
        worst_ratio = worst_ratio.max(c / b);
        if c > b {
            bound_fail += 1;
        }
        let tmm = qr.r_factor[(m - 1, m - 1)].abs();
        if tmm < 1.0 / ((n - m + 1) as f64).sqrt() - 1e-12 {
            tmm_fail += 1;
        }
    }
    let msg = format!("bound violations {bound_fail}, |T_mm| violations {tmm_fail}, worst c/bound {worst_ratio:e}");
    if bound_fail == 0 && tmm_fail == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn haar_batch(n: usize, m: usize, trials: usize) -> Result<(usize, f64, f64, f64), String> {
    let (mut cd, mut cq) = (Vec::new(), Vec::new());
    for t in 0..trials {
        let u = haar_orthonormal(n, m, sub_seed(0, t)).map_err(|e| e.to_string())?;
        let d = deim_select(&u).map_err(|e| e.to_string())?;
        let q = qdeim_select(&u).map_err(|e| e.to_string())?;
        cd.push(condition_of(&u, &d).map_err(|e| e.to_string())?);
        cq.push(condition_of(&u, &q).map_err(|e| e.to_string())?);
    }
    let below = cq.iter().filter(|&&c| c < 100.0).count();
    let max_q = cq.iter().copied().fold(0.0, f64::max);
    Ok((below, median(&mut cq), median(&mut cd), max_q))
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

fn haar_reproduction() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, m, trials) in [(2000, 50, 50), (10_000, 100, 200)] {
        let t = Instant::now();
        let (below, med_q, med_d, max_q) = haar_batch(n, m, trials)?;
        ok &= below == trials && med_q <= med_d;
        parts.push(format!(
            "{n}x{m}: {below}/{trials} below 100, max {max_q:.1}, median Q-DEIM {med_q:.1} vs DEIM {med_d:.1} ({:.0} s)",
            t.elapsed().as_secs_f64()
        ));
    }
    let msg = parts.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn fn_basis_condition() -> Outcome {
    let full = fn_full_run().map_err(|e| e.to_string())?;
    let z = full.nonlinear_basis(100).map_err(|e| e.to_string())?;
    let c = condition_of(&z, &qdeim_select(&z).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let mut drift = 0.0f64;
    for s in 0..100 {
        let q = haar_orthonormal(100, 100, 1000 + s).map_err(|e| e.to_string())?;
        let zq = z.matmul(&q).map_err(|e| e.to_string())?;
        let cq = condition_of(&zq, &qdeim_select(&zq).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        drift = drift.max((cq - c).abs() / c);
    }
    let msg = format!(
        "{}x{} basis, c = {c:.4}, max relative drift {drift:e}",
        z.rows(),
        z.cols()
    );
    if z.shape() == (2048, 100) && (20.0..=35.0).contains(&c) && drift <= 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

const FN_REF: [(usize, f64, f64); 4] = [
    (4, 4.291788e-2, 3.446203e-2),
    (5, 3.500673e-2, 3.467286e-2),
    (6, 3.300680e-2, 3.260097e-2),
    (7, 2.998979e-2, 3.010827e-2),
];

fn fn_reduction() -> Outcome {
    let t = Instant::now();
    let full = fn_full_run().map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (r, ref_d, ref_q) in FN_REF {
        let d = reduce_and_compare(&full, r, r, Method::Deim).map_err(|e| e.to_string())?;
        let q = reduce_and_compare(&full, r, r, Method::Qdeim).map_err(|e| e.to_string())?;
        ok &= within_factor(d.epsilon, ref_d, 2.0) && within_factor(q.epsilon, ref_q, 2.0);
        ok &= q.epsilon <= 1.5 * d.epsilon;
        parts.push(format!(
            "r={r}: DEIM {:.3e} Q-DEIM {:.3e}",
            d.epsilon, q.epsilon
        ));
    }
    let secs = t.elapsed().as_secs_f64();
    ok &= secs <= 300.0;
    let msg = format!("{} ({secs:.0} s)", parts.join(", "));
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

const RC_REF: [(usize, f64, f64, f64, f64); 2] = [
    (10, 8.603826e-3, 6.07172e-3, 1.28183e-4, 7.783045e-5),
    (20, 1.970500e-4, 1.931018e-4, 3.209967e-5, 3.238549e-5),
];

fn rc_reduction() -> Outcome {
    let full = rc_full_run(RcInput::Exp).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (r, eps_d, eps_q, xi_d, xi_q) in RC_REF {
        let d = reduce_and_compare(&full, r, r, Method::Deim).map_err(|e| e.to_string())?;
        let q = reduce_and_compare(&full, r, r, Method::Qdeim).map_err(|e| e.to_string())?;
        ok &= within_factor(d.epsilon, eps_d, 3.0) && within_factor(q.epsilon, eps_q, 3.0);
        ok &= within_factor(d.xi1_error, xi_d, 3.0) && within_factor(q.xi1_error, xi_q, 3.0);
        parts.push(format!(
            "r={r}: eps {:.3e}/{:.3e} xi1 {:.3e}/{:.3e}",
            d.epsilon, q.epsilon, d.xi1_error, q.xi1_error
        ));
    }
    for input in [RcInput::Sin50, RcInput::Sin1000] {
        let full = rc_full_run(input).map_err(|e| e.to_string())?;
        for r in [5, 10] {
            let d = reduce_and_compare(&full, r, r, Method::Deim).map_err(|e| e.to_string())?;
            let q = reduce_and_compare(&full, r, r, Method::Qdeim).map_err(|e| e.to_string())?;
            let same = sorted(&d.selection) == sorted(&q.selection);
            ok &= same;
            parts.push(format!("{input:?} r={r}: same index set {same}"));
        }
    }
    let msg = parts.join(", ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn sorted(sel: &SelectionOperator) -> Vec<usize> {
    let mut v = sel.indices().to_vec();
    v.sort_unstable();
    v
}

fn deim_matches_lu() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut mismatches = 0;
    for _ in 0..500 {
        let m = rng.random_range(1..=20);
        let n = rng.random_range(m.max(2)..=400);
        let u = gaussian_matrix(&mut rng, n, m);
        let d = deim_select(&u).map_err(|e| e.to_string())?;
        let l = lu_pp_select(&u).map_err(|e| e.to_string())?;
        if d.indices() != l.indices() {
            mismatches += 1;
        }
    }
    let msg = format!("{mismatches} mismatching index sequences out of 500");
    if mismatches == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn volume_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut det_fail, mut bound_fail, mut worst) = (0, 0, f64::INFINITY);
    let (mut count, mut worst_bound) = (0, 0.0f64);
    while count < 200 {
        let n = rng.random_range(3..=40);
        let m = rng.random_range(1..=6.min(n));
        if binomial(n, m) > 1e5 {
            continue;
        }
        count += 1;
        let u = haar_orthonormal_with(n, m, &mut rng).map_err(|e| e.to_string())?;
        let best = brute_force_volume_select(&u).map_err(|e| e.to_string())?;
        let q = qdeim_select(&u).map_err(|e| e.to_string())?;
        let vb = determinant(&u.select_rows(best.indices()))
            .map_err(|e| e.to_string())?
            .abs();
        let vq = determinant(&u.select_rows(q.indices()))
            .map_err(|e| e.to_string())?
            .abs();
        worst = worst.min(vq / vb);
        if vq < 0.1 * vb {
            det_fail += 1;
        }
        let c = condition_of(&u, &best).map_err(|e| e.to_string())?;
        worst_bound = worst_bound.max(c / volume_optimal_bound(n, m));
        if c > volume_optimal_bound(n, m) * (1.0 + BOUND_ROUNDOFF) {
            bound_fail += 1;
        }
    }
    let msg = format!("volume ratio below 0.1: {det_fail}, bound violations {bound_fail}, worst volume ratio {worst:.3}, worst c/bound {worst_bound:.17}");
    if det_fail == 0 && bound_fail == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn qdeimr_efficiency() -> Outcome {
    let (n, m) = (10_000, 34);
    let kind = ParamFunKind::DecayingOscillation;
    let (a, b) = kind.domain();
    let grid = linspace(a, b, n);
    let (snaps, _) =
        param_fun_snapshots(kind, &grid, &linspace(0.0, PI, 40)).map_err(|e| e.to_string())?;
    let u = pod_basis(&snaps, Truncation::Rank(m), false)
        .map_err(|e| e.to_string())?
        .vectors;
    let mu_eval = linspace(0.0, PI, 200);
    let sweep_max = |sel: &SelectionOperator| -> Result<f64, String> {
        let proj = build_projector(&u, sel).map_err(|e| e.to_string())?;
        Ok(approximation_sweep(&proj, kind, &grid, &mu_eval)
            .map_err(|e| e.to_string())?
            .max_error())
    };
    let q = qdeim_select(&u).map_err(|e| e.to_string())?;
    let c_q = condition_of(&u, &q).map_err(|e| e.to_string())?;
    let err_q = sweep_max(&q)?;

    let base = QdeimrConfig::new(n, m, 0);
    let r = qdeimr_select(&u, &base).map_err(|e| e.to_string())?;
    let err_r = sweep_max(&r.selection)?;
    let limit = (34.0f64).sqrt() * (9967.0f64).sqrt();
    let default_ok = r.rows_visited <= 600 && r.c_exact <= limit && err_r <= 10.0 * err_q;

    let mut tight = QdeimrConfig::new(n, m, 0);
    tight.c_threshold = default_threshold(n, m) / 5.0;
    let t = qdeimr_select(&u, &tight).map_err(|e| e.to_string())?;
    let err_t = sweep_max(&t.selection)?;
    let tight_ok = t.c_exact <= 1.5 * c_q && t.rows_visited <= n / 20 && err_t <= 10.0 * err_q;

    let msg = format!(
        "default: {} rows, c {:.1} (limit {limit:.1}), error ratio {:.2}; tight: {} rows, c {:.1} vs 1.5 x Q-DEIM c = {:.1}, error ratio {:.2}",
        r.rows_visited,
        r.c_exact,
        err_r / err_q,
        t.rows_visited,
        t.c_exact,
        1.5 * c_q,
        err_t / err_q
    );
    if default_ok && tight_ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn error_bound_property() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut violations = 0;
    for i in 0..10_000u64 {
        let n = rng.random_range(2..=120);
        let m = rng.random_range(1..=n.min(12));
        let u = haar_orthonormal_with(n, m, &mut rng).map_err(|e| e.to_string())?;
        let sel = match i % 3 {
            0 => deim_select(&u),
            1 => qdeim_select(&u),
            _ => random_select(&u, i, 4).map(|r| r.selection),
        }
        .map_err(|e| e.to_string())?;
        let proj = build_projector(&u, &sel).map_err(|e| e.to_string())?;
        let f = gaussian_vec(&mut rng, n);
        let fhat = proj.apply(&f).map_err(|e| e.to_string())?;
        let coef = u.tr_matvec(&f).map_err(|e| e.to_string())?;
        let uf = u.matvec(&coef).map_err(|e| e.to_string())?;
        let perp: Vec<f64> = f.iter().zip(&uf).map(|(a, b)| a - b).collect();
        let err: Vec<f64> = f.iter().zip(&fhat).map(|(a, b)| a - b).collect();
        if norm2(&err) > proj.c() * norm2(&perp) + 1e-10 * norm2(&f) {
            violations += 1;
        }
    }
    let msg = format!("{violations} violations in 10000 instances");
    if violations == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn run_cli(args: &[&str], out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_deimkit"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("DEIMKIT_THREADS", "2")
        .output()
        .map_err(|e| e.to_string())?;
    if status.status.success() || status.status.code() == Some(5) {
        Ok(())
    } else {
        Err(format!("{args:?} exited with {:?}", status.status.code()))
    }
}

fn json_without_timings(path: &Path) -> Result<serde_json::Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut v: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove("timings");
        obj.remove("wall_time");
    }
    Ok(v)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("u.mtx");
    write_matrix(
        &input,
        &haar_orthonormal(300, 12, 3).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let input = input.to_string_lossy().into_owned();
    let commands: Vec<Vec<&str>> = vec![
        vec![
            "select",
            &input,
            "--method",
            "qdeimr",
            "--seed",
            "11",
            "--workers",
            "2",
        ],
        vec!["select", &input, "--method", "random", "--seed", "5"],
        vec![
            "benchmark-random",
            "--n",
            "400",
            "--m",
            "10",
            "--trials",
            "8",
            "--seed",
            "4",
        ],
        vec!["paramfun-demo", "--paper-preset", "random-baseline"],
    ];
    let mut compared = 0;
    for (i, cmd) in commands.iter().enumerate() {
        let a = dir.path().join(format!("a{i}"));
        let b = dir.path().join(format!("b{i}"));
        run_cli(cmd, &a)?;
        run_cli(cmd, &b)?;
        for entry in std::fs::read_dir(&a).map_err(|e| e.to_string())? {
            let name = entry.map_err(|e| e.to_string())?.file_name();
            let (pa, pb) = (a.join(&name), b.join(&name));
            let same = if name.to_string_lossy().ends_with(".json") {
                json_without_timings(&pa)? == json_without_timings(&pb)?
            } else {
                std::fs::read(&pa).map_err(|e| e.to_string())?
                    == std::fs::read(&pb).map_err(|e| e.to_string())?
            };
            if !same {
                return Err(format!(
                    "{cmd:?}: {} differs between runs",
                    name.to_string_lossy()
                ));
            }
            compared += 1;
        }
    }
    Ok(format!(
        "{} commands, {compared} output files identical",
        commands.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("interpolation exactness", interpolation_exactness),
        ("Q-DEIM condition bound", qdeim_bound_property),
        ("Haar 10000x100 reproduction", haar_reproduction),
        ("FitzHugh-Nagumo basis condition number", fn_basis_condition),
        ("FitzHugh-Nagumo reduction errors", fn_reduction),
        ("RC ladder reduction errors", rc_reduction),
        ("DEIM equals LU with partial pivoting", deim_matches_lu),
        ("volume oracle near-optimality", volume_oracle),
        ("Q-DEIMr efficiency", qdeimr_efficiency),
        ("interpolation error bound", error_bound_property),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS {} {name}: {msg} [{secs:.1} s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name}: {msg} [{secs:.1} s]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
