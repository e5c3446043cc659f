//! Reference values the demos are checked against.

/// FitzHugh-Nagumo `(r = m, ε_DEIM, ε_Q-DEIM)`.
pub const FN_EPSILON: [(usize, f64, f64); 4] = [
    (4, 4.291788e-2, 3.446203e-2),
    (5, 3.500673e-2, 3.467286e-2),
    (6, 3.300680e-2, 3.260097e-2),
    (7, 2.998979e-2, 3.010827e-2),
];

/// RC ladder with `g(t) = e^{−t}`: `(r = m, ε_DEIM, ε_Q-DEIM, ξ₁ DEIM, ξ₁ Q-DEIM)`.
pub const RC_ERRORS: [(usize, f64, f64, f64, f64); 2] = [
    (10, 8.603826e-3, 6.07172e-3, 1.28183e-4, 7.783045e-5),
    (20, 1.970500e-4, 1.931018e-4, 3.209967e-5, 3.238549e-5),
];

/// Q-DEIM condition number of the 2048 × 100 FitzHugh-Nagumo nonlinear basis.
pub const FN_QDEIM_C: f64 = 2.6878e1;

pub fn fn_epsilon(r: usize) -> Option<(f64, f64)> {
    FN_EPSILON.iter().find(|e| e.0 == r).map(|e| (e.1, e.2))
}

pub fn rc_errors(r: usize) -> Option<(f64, f64, f64, f64)> {
    RC_ERRORS
        .iter()
        .find(|e| e.0 == r)
        .map(|e| (e.1, e.2, e.3, e.4))
}
