//! Brute-force ground truth for small instances.
//!
//! Enumerates all binary matrices over {±1}^{N·M} (capped at 26 variables),
//! in integer arithmetic throughout, exploiting the negation symmetry (x and
//! -x share every |r|) to halve the space. Enumeration walks a Gray code so
//! each candidate differs from the previous one by a single sign flip, and
//! correlations are updated incrementally in O(M·|L|) per flip. The reported
//! argmin is the lexicographically first one (entries ordered sequence-major,
//! +1 before -1), regardless of visit order.

use crate::error::Error;
use crate::types::{CorrelationMode, SequenceSet, ShiftSpec};
use rayon::prelude::*;

/// Hard cap on N·M; 2^26 single-flip evaluations stay in the minutes range.
pub const ORACLE_BIT_CAP: usize = 26;

/// Cap on how many tie patterns are retained (the count stays exact).
const TIE_PATTERN_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Psl,
    Isl,
}

/// Result of an exhaustive search.
#[derive(Debug, Clone)]
pub struct OracleResult {
    /// Exact global minimum of the metric.
    pub best: i64,
    /// Lexicographically first argmin (its first entry is +1; the negated
    /// partner is also optimal).
    pub argmin: SequenceSet,
    /// Number of optimal matrices over the full space (negation pairs count
    /// twice).
    pub tie_count: u64,
    /// Up to [`TIE_PATTERN_CAP`] argmin patterns from the searched half
    /// space, as lexicographic keys; decode with [`pattern_to_set`].
    pub tie_patterns: Vec<u64>,
}

/// Candidate-vs-optimum comparison; `gap == 0` certifies global optimality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CandidateCheck {
    pub candidate: i64,
    pub oracle_min: i64,
    pub gap: i64,
}

/// Decodes a lexicographic key (entry 0 fixed to +1, bit set = -1, most
/// significant bit = entry 1) into a sequence set.
pub fn pattern_to_set(n: usize, m: usize, key: u64) -> SequenceSet {
    let nm = n * m;
    let mut vals = vec![1.0; nm];
    for (e, v) in vals.iter_mut().enumerate().skip(1) {
        if key >> (nm - 1 - e) & 1 == 1 {
            *v = -1.0;
        }
    }
    SequenceSet::new(n, m, vals).expect("valid dimensions")
}

/// Integer correlation table over the shift set, updated one flip at a time.
struct SearchState {
    n: usize,
    m: usize,
    lags: Vec<usize>,
    mode: CorrelationMode,
    signs: Vec<i32>,
    /// r[(i*m + j)*|L| + lpos], the correlation of (i, j) at lags[lpos].
    r: Vec<i64>,
}

impl SearchState {
    fn new(n: usize, m: usize, shift: &ShiftSpec, signs: Vec<i32>) -> Self {
        let lags: Vec<usize> = shift.lags().collect();
        let mut state =
            Self { n, m, lags, mode: shift.mode(), signs, r: vec![0; m * m * shift.lag_count()] };
        state.recompute();
        state
    }

    fn recompute(&mut self) {
        let (n, m) = (self.n, self.m);
        for i in 0..m {
            for j in 0..m {
                for (lpos, &lag) in self.lags.iter().enumerate() {
                    let mut acc = 0i64;
                    match self.mode {
                        CorrelationMode::Aperiodic => {
                            for k in lag..n {
                                acc += (self.signs[i * n + k] * self.signs[j * n + k - lag])
                                    as i64;
                            }
                        }
                        CorrelationMode::Periodic => {
                            for k in 0..n {
                                acc += (self.signs[i * n + k]
                                    * self.signs[j * n + (k + n - lag) % n])
                                    as i64;
                            }
                        }
                    }
                    self.r[(i * m + j) * self.lags.len() + lpos] = acc;
                }
            }
        }
    }

    /// Flips entry `e` and patches every correlation it participates in.
    fn flip(&mut self, e: usize) {
        let (n, m, len) = (self.n, self.m, self.lags.len());
        let i0 = e / n;
        let k0 = e % n;
        let old = self.signs[e];
        let delta = (-2 * old) as i64;
        for j in 0..m {
            for (lpos, &lag) in self.lags.iter().enumerate() {
                if j == i0 {
                    if lag == 0 {
                        continue; // the squared self term is constant
                    }
                    let mut d = 0i64;
                    match self.mode {
                        CorrelationMode::Aperiodic => {
                            if k0 >= lag {
                                d += self.signs[i0 * n + k0 - lag] as i64;
                            }
                            if k0 + lag < n {
                                d += self.signs[i0 * n + k0 + lag] as i64;
                            }
                        }
                        CorrelationMode::Periodic => {
                            d += self.signs[i0 * n + (k0 + n - lag) % n] as i64;
                            d += self.signs[i0 * n + (k0 + lag) % n] as i64;
                        }
                    }
                    self.r[(i0 * m + i0) * len + lpos] += delta * d;
                } else {
                    match self.mode {
                        CorrelationMode::Aperiodic => {
                            if k0 >= lag {
                                self.r[(i0 * m + j) * len + lpos] +=
                                    delta * self.signs[j * n + k0 - lag] as i64;
                            }
                            if k0 + lag < n {
                                self.r[(j * m + i0) * len + lpos] +=
                                    delta * self.signs[j * n + k0 + lag] as i64;
                            }
                        }
                        CorrelationMode::Periodic => {
                            self.r[(i0 * m + j) * len + lpos] +=
                                delta * self.signs[j * n + (k0 + n - lag) % n] as i64;
                            self.r[(j * m + i0) * len + lpos] +=
                                delta * self.signs[j * n + (k0 + lag) % n] as i64;
                        }
                    }
                }
            }
        }
        self.signs[e] = -old;
    }

    /// Metric over the sidelobe set: every (i, j, lag) except (i, i, 0).
    fn metric(&self, metric: Metric) -> i64 {
        let len = self.lags.len();
        let mut psl = 0i64;
        let mut isl = 0i64;
        for i in 0..self.m {
            for j in 0..self.m {
                for (lpos, &lag) in self.lags.iter().enumerate() {
                    if i == j && lag == 0 {
                        continue;
                    }
                    let v = self.r[(i * self.m + j) * len + lpos];
                    psl = psl.max(v.abs());
                    isl += v * v;
                }
            }
        }
        match metric {
            Metric::Psl => psl,
            Metric::Isl => isl,
        }
    }

    fn lex_key(&self) -> u64 {
        let nm = self.n * self.m;
        let mut key = 0u64;
        for e in 1..nm {
            if self.signs[e] < 0 {
                key |= 1 << (nm - 1 - e);
            }
        }
        key
    }
}

struct PartitionResult {
    best: i64,
    best_key: u64,
    tie_count: u64,
    tie_patterns: Vec<u64>,
}

/// Searches one partition: entries 1..=prefix_bits fixed from `prefix`,
/// remaining entries enumerated by Gray code.
fn search_partition(
    n: usize,
    m: usize,
    shift: &ShiftSpec,
    metric: Metric,
    prefix_bits: usize,
    prefix: u64,
) -> PartitionResult {
    let nm = n * m;
    let mut signs = vec![1i32; nm];
    for b in 0..prefix_bits {
        if prefix >> (prefix_bits - 1 - b) & 1 == 1 {
            signs[1 + b] = -1;
        }
    }
    let mut state = SearchState::new(n, m, shift, signs);
    let free = nm - 1 - prefix_bits;
    let mut best = state.metric(metric);
    let mut best_key = state.lex_key();
    let mut tie_count = 1u64;
    let mut tie_patterns = vec![best_key];
    for t in 1..(1u64 << free) {
        let entry = 1 + prefix_bits + t.trailing_zeros() as usize;
        state.flip(entry);
        let value = state.metric(metric);
        if value < best {
            best = value;
            best_key = state.lex_key();
            tie_count = 1;
            tie_patterns.clear();
            tie_patterns.push(best_key);
        } else if value == best {
            let key = state.lex_key();
            best_key = best_key.min(key);
            tie_count += 1;
            if tie_patterns.len() < TIE_PATTERN_CAP {
                tie_patterns.push(key);
            }
        }
    }
    PartitionResult { best, best_key, tie_count, tie_patterns }
}

/// Exact global minimum of PSL or ISL over all binary N×M sets.
///
/// Refuses instances with more than [`ORACLE_BIT_CAP`] entries. The first
/// matrix entry is pinned to +1 (negation symmetry); the reported tie count
/// covers the full space, so it is twice the number of optima found.
pub fn exhaustive_min(
    n: usize,
    m: usize,
    shift: &ShiftSpec,
    metric: Metric,
) -> Result<OracleResult, Error> {
    let bits = n * m;
    if bits > ORACLE_BIT_CAP {
        return Err(Error::OracleCapExceeded { bits, cap: ORACLE_BIT_CAP });
    }
    if shift.ranges().last().map(|&(_, b)| b >= n) == Some(true) {
        return Err(Error::Config("shift set exceeds the lag bound N-1".into()));
    }
    let free_bits = bits - 1;
    // Partition the high-order entries across workers once the space is big
    // enough for the per-partition recompute to amortize.
    let prefix_bits = free_bits.saturating_sub(18).min(6);
    let partitions: Vec<PartitionResult> = (0..(1u64 << prefix_bits))
        .into_par_iter()
        .map(|prefix| search_partition(n, m, shift, metric, prefix_bits, prefix))
        .collect();

    let mut best = i64::MAX;
    let mut best_key = u64::MAX;
    let mut tie_count = 0u64;
    let mut tie_patterns: Vec<u64> = Vec::new();
    for part in partitions {
        if part.best < best {
            best = part.best;
            best_key = part.best_key;
            tie_count = part.tie_count;
            tie_patterns = part.tie_patterns;
        } else if part.best == best {
            best_key = best_key.min(part.best_key);
            tie_count += part.tie_count;
            for key in part.tie_patterns {
                if tie_patterns.len() < TIE_PATTERN_CAP {
                    tie_patterns.push(key);
                }
            }
        }
    }
    Ok(OracleResult {
        best,
        argmin: pattern_to_set(n, m, best_key),
        tie_count: tie_count * 2,
        tie_patterns,
    })
}

/// Integer metric of a binary candidate (panics if `x` is not binary).
pub fn binary_metric(x: &SequenceSet, shift: &ShiftSpec, metric: Metric) -> i64 {
    assert!(x.is_binary(), "candidate must be exactly ±1");
    let signs: Vec<i32> = x.data().iter().map(|&v| v as i32).collect();
    SearchState::new(x.n_len(), x.m_count(), shift, signs).metric(metric)
}

/// Compares a binary candidate against the exhaustive optimum.
pub fn verify_candidate(
    x: &SequenceSet,
    shift: &ShiftSpec,
    metric: Metric,
) -> Result<CandidateCheck, Error> {
    if !x.is_binary() {
        return Err(Error::Config("candidate sequence set must be exactly ±1".into()));
    }
    let candidate = binary_metric(x, shift, metric);
    let oracle = exhaustive_min(x.n_len(), x.m_count(), shift, metric)?;
    Ok(CandidateCheck { candidate, oracle_min: oracle.best, gap: candidate - oracle.best })
}
