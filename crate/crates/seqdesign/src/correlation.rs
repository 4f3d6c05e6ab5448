//! Correlation evaluation and the sidelobe metric toolkit.
//!
//! Everything here is a direct shifted dot product — the shift matrices are
//! never materialized. The per-term residual `f_o` subtracts the design
//! target (N on the mainlobe, 0 elsewhere), the max-form objective is the
//! true nonsmooth design criterion, and ISL/PSL plus their normalized dB
//! forms (ISLR/PSLR) are the reporting metrics. Reporting metrics always
//! exclude the (i,i,0) mainlobe term even when lag 0 is in the shift set;
//! ISL is one-sided (lags from the shift set only).

use crate::types::{
    enumerate_index_set, CorrelationMode, DesignTarget, PairLagIndex, SequenceSet, ShiftSpec,
};

/// Correlation of two equal-length columns at a non-negative lag.
pub fn correlate_columns(xi: &[f64], xj: &[f64], lag: usize, mode: CorrelationMode) -> f64 {
    let n = xi.len();
    assert_eq!(n, xj.len(), "columns must share a common length");
    assert!(lag < n, "lag {lag} out of range for length {n}");
    match mode {
        CorrelationMode::Aperiodic => {
            xi[lag..].iter().zip(xj[..n - lag].iter()).map(|(a, b)| a * b).sum()
        }
        CorrelationMode::Periodic => {
            // Split the cyclic sum so both pieces are contiguous.
            let head: f64 =
                xi[lag..].iter().zip(xj[..n - lag].iter()).map(|(a, b)| a * b).sum();
            let tail: f64 =
                xi[..lag].iter().zip(xj[n - lag..].iter()).map(|(a, b)| a * b).sum();
            head + tail
        }
    }
}

/// r_{ij,l}: correlation of sequences `i` and `j` of `x` at lag `l`.
pub fn correlate(
    x: &SequenceSet,
    i: usize,
    j: usize,
    lag: usize,
    mode: CorrelationMode,
) -> f64 {
    correlate_columns(x.column(i), x.column(j), lag, mode)
}

/// f_o(X) = |r_{ij,l}(X) − N·δ|, the non-negative per-term residual.
pub fn residual_f(
    x: &SequenceSet,
    o: &PairLagIndex,
    target: &DesignTarget,
    mode: CorrelationMode,
) -> f64 {
    (correlate(x, o.i, o.j, o.lag, mode) - target.value(o)).abs()
}

/// The max-form design objective: Σ_{i,j} max_{l ∈ 𝕃} f_{ij,l}(X).
pub fn objective_psl_form(x: &SequenceSet, shift: &ShiftSpec) -> f64 {
    let target = DesignTarget::new(x.n_len());
    let mode = shift.mode();
    let mut total = 0.0;
    for i in 0..x.m_count() {
        for j in 0..x.m_count() {
            let mut worst = 0.0f64;
            for lag in shift.lags() {
                let o = PairLagIndex { i, j, lag };
                worst = worst.max(residual_f(x, &o, &target, mode));
            }
            total += worst;
        }
    }
    total
}

/// The smoothed weighted objective F(X) = Σ_o w_o f_o²(X), one weight per
/// element of the lexicographic index set.
pub fn objective_smooth_f(x: &SequenceSet, weights: &[f64], shift: &ShiftSpec) -> f64 {
    let index_set = enumerate_index_set(x.m_count(), shift);
    assert_eq!(
        weights.len(),
        index_set.len(),
        "weight vector length must match |O| = {}",
        index_set.len()
    );
    let target = DesignTarget::new(x.n_len());
    let mode = shift.mode();
    index_set
        .iter()
        .zip(weights)
        .map(|(o, &w)| {
            let f = residual_f(x, o, &target, mode);
            w * f * f
        })
        .sum()
}

/// Sidelobe metrics of one sequence set over a shift set, in one pass.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SidelobeMetrics {
    /// max |r_o| over the sidelobe set (excluding the (i,i,0) mainlobe).
    pub psl: f64,
    /// Σ r_o² over the same set.
    pub isl: f64,
    /// Σ_{i,j} max_l f_o — the design objective.
    pub objective: f64,
}

pub fn sidelobe_metrics(x: &SequenceSet, shift: &ShiftSpec) -> SidelobeMetrics {
    let target = DesignTarget::new(x.n_len());
    let mode = shift.mode();
    let mut psl = 0.0f64;
    let mut isl = 0.0f64;
    let mut objective = 0.0f64;
    for i in 0..x.m_count() {
        for j in 0..x.m_count() {
            let mut worst = 0.0f64;
            for lag in shift.lags() {
                let r = correlate(x, i, j, lag, mode);
                let o = PairLagIndex { i, j, lag };
                worst = worst.max((r - target.value(&o)).abs());
                if !(i == j && lag == 0) {
                    psl = psl.max(r.abs());
                    isl += r * r;
                }
            }
            objective += worst;
        }
    }
    SidelobeMetrics { psl, isl, objective }
}

/// Peak sidelobe level over the shift set, mainlobe excluded.
pub fn psl(x: &SequenceSet, shift: &ShiftSpec) -> f64 {
    sidelobe_metrics(x, shift).psl
}

/// Integrated sidelobe level over the shift set, mainlobe excluded.
pub fn isl(x: &SequenceSet, shift: &ShiftSpec) -> f64 {
    sidelobe_metrics(x, shift).isl
}

/// ISLR = 10·lg(ISL/(M·N²)) in dB; −∞ when ISL = 0.
pub fn islr_db_from(isl: f64, n_len: usize, m_count: usize) -> f64 {
    if isl <= 0.0 {
        f64::NEG_INFINITY
    } else {
        10.0 * (isl / (m_count as f64 * (n_len as f64).powi(2))).log10()
    }
}

/// PSLR = 10·lg(PSL²/(M·N²)) in dB; −∞ when PSL = 0.
pub fn pslr_db_from(psl: f64, n_len: usize, m_count: usize) -> f64 {
    if psl <= 0.0 {
        f64::NEG_INFINITY
    } else {
        10.0 * (psl * psl / (m_count as f64 * (n_len as f64).powi(2))).log10()
    }
}

pub fn islr_db(x: &SequenceSet, shift: &ShiftSpec) -> f64 {
    islr_db_from(isl(x, shift), x.n_len(), x.m_count())
}

pub fn pslr_db(x: &SequenceSet, shift: &ShiftSpec) -> f64 {
    pslr_db_from(psl(x, shift), x.n_len(), x.m_count())
}

/// Mean-square in-band correlation level in dB:
/// 10·lg(Σ_o r_o² / (count·N²)) over the sidelobe set. Robust to individual
/// zero correlations, unlike averaging per-lag dB values.
pub fn mean_level_db(x: &SequenceSet, shift: &ShiftSpec) -> f64 {
    let m = x.m_count();
    let zero_in_set = shift.contains_lag(0);
    let count = m * m * shift.lag_count() - if zero_in_set { m } else { 0 };
    let isl = isl(x, shift);
    if isl <= 0.0 || count == 0 {
        f64::NEG_INFINITY
    } else {
        10.0 * (isl / (count as f64 * (x.n_len() as f64).powi(2))).log10()
    }
}

/// All correlations values(i,j,l) of a set for l in 0..N-1, precomputed.
#[derive(Debug, Clone)]
pub struct CorrelationProfile {
    values: Vec<f64>,
    n_len: usize,
    m_count: usize,
    mode: CorrelationMode,
}

impl CorrelationProfile {
    pub fn compute(x: &SequenceSet, mode: CorrelationMode) -> Self {
        let (n, m) = (x.n_len(), x.m_count());
        let mut values = Vec::with_capacity(m * m * n);
        for i in 0..m {
            for j in 0..m {
                for lag in 0..n {
                    values.push(correlate(x, i, j, lag, mode));
                }
            }
        }
        Self { values, n_len: n, m_count: m, mode }
    }

    pub fn value(&self, i: usize, j: usize, lag: usize) -> f64 {
        self.values[(i * self.m_count + j) * self.n_len + lag]
    }

    pub fn n_len(&self) -> usize {
        self.n_len
    }

    pub fn m_count(&self) -> usize {
        self.m_count
    }

    pub fn mode(&self) -> CorrelationMode {
        self.mode
    }
}
