//! Analytic gradient of the squared per-term residual f_o²(X).
//!
//! The bilinear form r_{ij,l}(X) touches only columns i and j, so ∇f_o² has
//! at most two nonzero columns: column i receives the back-shifted copy of
//! x_j and column j the forward-shifted copy of x_i, both scaled by
//! 2(r − N·δ). Cost is O(N) per term. A central finite-difference verifier
//! anchors the implementation.

use crate::correlation::correlate;
use crate::types::{CorrelationMode, DesignTarget, PairLagIndex, SequenceSet};

/// Lipschitz data for the gradients of {f_o²} over the box [-c, c].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzParams {
    /// ĉ = max{c, 1}.
    pub c_hat: f64,
    /// The per-term constant L_o = 2(N+1)·ĉ².
    pub bound: f64,
}

impl LipschitzParams {
    pub fn new(n_len: usize, c: f64) -> Self {
        let c_hat = c.max(1.0);
        Self { c_hat, bound: lipschitz_constant(n_len, c) }
    }
}

/// L_o = 2(N+1)·max{c,1}², valid over iterates bounded entrywise by c.
pub fn lipschitz_constant(n_len: usize, c: f64) -> f64 {
    assert!(c > 0.0, "iterate bound c must be positive");
    let c_hat = c.max(1.0);
    2.0 * (n_len as f64 + 1.0) * c_hat * c_hat
}

/// Adds `scale` times ∂r_{ij,l}/∂(column i) into `gi`.
///
/// Aperiodic: gi[k] += scale·xj[k-l] for k >= l. Periodic wraps the index.
fn add_scaled_shift_back(xj: &[f64], lag: usize, mode: CorrelationMode, scale: f64, gi: &mut [f64]) {
    let n = xj.len();
    match mode {
        CorrelationMode::Aperiodic => {
            for k in lag..n {
                gi[k] += scale * xj[k - lag];
            }
        }
        CorrelationMode::Periodic => {
            for k in 0..n {
                gi[k] += scale * xj[(k + n - lag) % n];
            }
        }
    }
}

/// Adds `scale` times ∂r_{ij,l}/∂(column j) into `gj`.
///
/// Aperiodic: gj[k] += scale·xi[k+l] for k <= n-1-l. Periodic wraps.
fn add_scaled_shift_fwd(xi: &[f64], lag: usize, mode: CorrelationMode, scale: f64, gj: &mut [f64]) {
    let n = xi.len();
    match mode {
        CorrelationMode::Aperiodic => {
            for k in 0..n - lag {
                gj[k] += scale * xi[k + lag];
            }
        }
        CorrelationMode::Periodic => {
            for k in 0..n {
                gj[k] += scale * xi[(k + lag) % n];
            }
        }
    }
}

/// Adds `scale · ∇f_o²(x)` into the column-major buffer `out` (length N·M).
///
/// This is the fused kernel the solver uses; `scale` folds in the weight and
/// step size so no intermediate matrix is materialized.
pub fn add_scaled_grad_f_squared(
    x: &SequenceSet,
    o: &PairLagIndex,
    target: &DesignTarget,
    mode: CorrelationMode,
    scale: f64,
    out: &mut [f64],
) {
    let n = x.n_len();
    debug_assert_eq!(out.len(), n * x.m_count());
    let r = correlate(x, o.i, o.j, o.lag, mode);
    let s = scale * 2.0 * (r - target.value(o));
    if s == 0.0 {
        return;
    }
    if o.i == o.j {
        let col = o.i;
        let gi = &mut out[col * n..(col + 1) * n];
        add_scaled_shift_back(x.column(col), o.lag, mode, s, gi);
        add_scaled_shift_fwd(x.column(col), o.lag, mode, s, gi);
    } else {
        // Columns i and j are disjoint slices of `out`.
        let (lo, hi) = (o.i.min(o.j), o.i.max(o.j));
        let (left, right) = out.split_at_mut(hi * n);
        let col_lo = &mut left[lo * n..(lo + 1) * n];
        let col_hi = &mut right[..n];
        let (gi, gj) = if o.i < o.j { (col_lo, col_hi) } else { (col_hi, col_lo) };
        add_scaled_shift_back(x.column(o.j), o.lag, mode, s, gi);
        add_scaled_shift_fwd(x.column(o.i), o.lag, mode, s, gj);
    }
}

/// ∇f_o²(X) as an N×M column-major buffer. Nonzero only in columns i and j.
pub fn grad_f_squared(
    x: &SequenceSet,
    o: &PairLagIndex,
    target: &DesignTarget,
    mode: CorrelationMode,
) -> Vec<f64> {
    let mut out = vec![0.0; x.n_len() * x.m_count()];
    add_scaled_grad_f_squared(x, o, target, mode, 1.0, &mut out);
    out
}

/// f_o²(X) for the finite-difference verifier.
fn f_squared(x: &SequenceSet, o: &PairLagIndex, target: &DesignTarget, mode: CorrelationMode) -> f64 {
    let d = correlate(x, o.i, o.j, o.lag, mode) - target.value(o);
    d * d
}

/// Central-difference check of ∇f_o² against the analytic gradient.
///
/// Returns the max relative error over entries whose magnitude (analytic or
/// numeric) exceeds 1e-8; a zero-gradient point therefore reports 0.
pub fn finite_difference_check(
    x: &SequenceSet,
    o: &PairLagIndex,
    target: &DesignTarget,
    mode: CorrelationMode,
    step: f64,
) -> f64 {
    assert!(step > 0.0, "step must be positive");
    let analytic = grad_f_squared(x, o, target, mode);
    let mut probe = x.clone();
    let (n, m) = (x.n_len(), x.m_count());
    let mut worst: f64 = 0.0;
    for col in 0..m {
        for k in 0..n {
            let orig = probe.entry(k, col);
            probe.column_mut(col)[k] = orig + step;
            let up = f_squared(&probe, o, target, mode);
            probe.column_mut(col)[k] = orig - step;
            let down = f_squared(&probe, o, target, mode);
            probe.column_mut(col)[k] = orig;
            let numeric = (up - down) / (2.0 * step);
            let reference = analytic[col * n + k];
            let magnitude = reference.abs().max(numeric.abs());
            if magnitude > 1e-8 {
                worst = worst.max((numeric - reference).abs() / magnitude);
            }
        }
    }
    worst
}
