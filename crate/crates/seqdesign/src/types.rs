//! Domain types shared by every other module: sequence sets, shift
//! specifications, and the pair-lag index set.

use crate::error::Error;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Correlation convention: zero-padded shifts or cyclic wrap-around.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationMode {
    Aperiodic,
    Periodic,
}

impl std::fmt::Display for CorrelationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CorrelationMode::Aperiodic => write!(f, "aperiodic"),
            CorrelationMode::Periodic => write!(f, "periodic"),
        }
    }
}

/// A set of M real-valued sequences of common length N, stored column-major:
/// column `i` is sequence `x_i`. The design variable of the whole crate.
///
/// Relaxed iterates hold arbitrary reals; a set whose entries are all exactly
/// ±1 is *binary* (see [`SequenceSet::is_binary`]).
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSet {
    data: Vec<f64>,
    n_len: usize,
    m_count: usize,
}

impl SequenceSet {
    /// Builds a sequence set from column-major data (`data.len() == n*m`).
    pub fn new(n_len: usize, m_count: usize, data: Vec<f64>) -> Result<Self, Error> {
        if n_len < 2 {
            return Err(Error::Config(format!("sequence length N={n_len} must be >= 2")));
        }
        if m_count < 1 {
            return Err(Error::Config("sequence count M must be >= 1".into()));
        }
        if data.len() != n_len * m_count {
            return Err(Error::Config(format!(
                "data length {} does not match N*M = {}",
                data.len(),
                n_len * m_count
            )));
        }
        Ok(Self { data, n_len, m_count })
    }

    /// Builds a set from per-sequence slices (all of equal length).
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self, Error> {
        if cols.is_empty() {
            return Err(Error::Config("sequence count M must be >= 1".into()));
        }
        let n = cols[0].len();
        let mut data = Vec::with_capacity(n * cols.len());
        for c in cols {
            if c.len() != n {
                return Err(Error::Config("sequences must share a common length".into()));
            }
            data.extend_from_slice(c);
        }
        Self::new(n, cols.len(), data)
    }

    /// Single sequence (M = 1).
    pub fn single(seq: &[f64]) -> Result<Self, Error> {
        Self::new(seq.len(), 1, seq.to_vec())
    }

    pub fn n_len(&self) -> usize {
        self.n_len
    }

    pub fn m_count(&self) -> usize {
        self.m_count
    }

    /// Sequence `i` as a contiguous slice.
    pub fn column(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_len..(i + 1) * self.n_len]
    }

    pub fn column_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n_len..(i + 1) * self.n_len]
    }

    /// Entry x_{i,k}: position `k` of sequence `i` (both 0-based).
    pub fn entry(&self, k: usize, i: usize) -> f64 {
        self.data[i * self.n_len + k]
    }

    /// Column-major backing storage.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// True iff every entry is exactly -1.0 or +1.0.
    pub fn is_binary(&self) -> bool {
        self.data.iter().all(|&v| v == 1.0 || v == -1.0)
    }

    /// Entrywise sign with the convention sign(0) = +1, yielding a binary set.
    pub fn sign_quantized(&self) -> SequenceSet {
        let data = self.data.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
        SequenceSet { data, n_len: self.n_len, m_count: self.m_count }
    }
}

impl Serialize for SequenceSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("SequenceSet", 3)?;
        s.serialize_field("n", &self.n_len)?;
        s.serialize_field("m", &self.m_count)?;
        let cols: Vec<&[f64]> = (0..self.m_count).map(|i| self.column(i)).collect();
        s.serialize_field("sequences", &cols)?;
        s.end()
    }
}

/// True iff every entry of `x` is exactly ±1.
pub fn validate_binary(x: &SequenceSet) -> bool {
    x.is_binary()
}

/// Correlation mode plus the union of inclusive lag ranges to optimize over.
///
/// Ranges are normalized on construction: sorted ascending and merged, so the
/// realized lag set is a disjoint sorted union with at least one lag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftSpec {
    mode: CorrelationMode,
    ranges: Vec<(usize, usize)>,
}

impl ShiftSpec {
    pub fn new(
        mode: CorrelationMode,
        ranges: &[(usize, usize)],
        n_len: usize,
    ) -> Result<Self, Error> {
        if ranges.is_empty() {
            return Err(Error::Config("shift interval set must be non-empty".into()));
        }
        for &(a, b) in ranges {
            if a > b {
                return Err(Error::Config(format!("shift interval [{a},{b}] is reversed")));
            }
            if b > n_len.saturating_sub(1) {
                return Err(Error::Config(format!(
                    "shift interval [{a},{b}] exceeds the lag bound N-1 = {}",
                    n_len.saturating_sub(1)
                )));
            }
        }
        let mut sorted: Vec<(usize, usize)> = ranges.to_vec();
        sorted.sort_unstable();
        let mut merged: Vec<(usize, usize)> = Vec::with_capacity(sorted.len());
        for (a, b) in sorted {
            match merged.last_mut() {
                Some((_, pb)) if a <= *pb + 1 => *pb = (*pb).max(b),
                _ => merged.push((a, b)),
            }
        }
        Ok(Self { mode, ranges: merged })
    }

    /// All sidelobe lags `[1, N-1]`.
    pub fn sidelobes(mode: CorrelationMode, n_len: usize) -> Self {
        Self::new(mode, &[(1, n_len - 1)], n_len).expect("n_len >= 2")
    }

    pub fn mode(&self) -> CorrelationMode {
        self.mode
    }

    /// The normalized (disjoint, ascending) interval union.
    pub fn ranges(&self) -> &[(usize, usize)] {
        &self.ranges
    }

    /// Number of lags in the realized set.
    pub fn lag_count(&self) -> usize {
        self.ranges.iter().map(|&(a, b)| b - a + 1).sum()
    }

    /// Lags in ascending order.
    pub fn lags(&self) -> impl Iterator<Item = usize> + '_ {
        self.ranges.iter().flat_map(|&(a, b)| a..=b)
    }

    pub fn contains_lag(&self, lag: usize) -> bool {
        self.ranges.iter().any(|&(a, b)| a <= lag && lag <= b)
    }
}

/// One element o = (i, j, l) of the pair-lag index set: correlate sequence `i`
/// against sequence `j` at lag `l`. Sequence indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct PairLagIndex {
    pub i: usize,
    pub j: usize,
    pub lag: usize,
}

/// Desired correlation values: N on the autocorrelation mainlobe, 0 elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DesignTarget {
    n_len: usize,
}

impl DesignTarget {
    pub fn new(n_len: usize) -> Self {
        Self { n_len }
    }

    /// N·δ_{|i−j|+|l|}: N when i = j and l = 0, else 0.
    pub fn value(&self, o: &PairLagIndex) -> f64 {
        if o.i == o.j && o.lag == 0 {
            self.n_len as f64
        } else {
            0.0
        }
    }
}

/// Enumerates the full index set in lexicographic (i, j, l) order.
///
/// The ordering is part of the contract: downstream floating-point reductions
/// run in this fixed order so results are reproducible.
pub fn enumerate_index_set(m_count: usize, shift: &ShiftSpec) -> Vec<PairLagIndex> {
    let mut out = Vec::with_capacity(m_count * m_count * shift.lag_count());
    for i in 0..m_count {
        for j in 0..m_count {
            for lag in shift.lags() {
                out.push(PairLagIndex { i, j, lag });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerate_single_sequence_two_lags() {
        let spec = ShiftSpec::new(CorrelationMode::Aperiodic, &[(1, 2)], 8).unwrap();
        let set = enumerate_index_set(1, &spec);
        assert_eq!(
            set,
            vec![PairLagIndex { i: 0, j: 0, lag: 1 }, PairLagIndex { i: 0, j: 0, lag: 2 }]
        );
    }

    #[test]
    fn enumerate_two_sequences_lag_zero() {
        let spec = ShiftSpec::new(CorrelationMode::Aperiodic, &[(0, 0)], 4).unwrap();
        let set = enumerate_index_set(2, &spec);
        let expected = vec![
            PairLagIndex { i: 0, j: 0, lag: 0 },
            PairLagIndex { i: 0, j: 1, lag: 0 },
            PairLagIndex { i: 1, j: 0, lag: 0 },
            PairLagIndex { i: 1, j: 1, lag: 0 },
        ];
        assert_eq!(set, expected);
    }

    #[test]
    fn enumerate_count_matches_m2_times_lags() {
        // N=512, M=2, L=[0,255] from the paper's cross-correlation experiment.
        let spec = ShiftSpec::new(CorrelationMode::Aperiodic, &[(0, 255)], 512).unwrap();
        let set = enumerate_index_set(2, &spec);
        assert_eq!(set.len(), 4 * 256);
    }

    #[test]
    fn enumerate_is_sorted_lexicographically() {
        let spec =
            ShiftSpec::new(CorrelationMode::Periodic, &[(3, 5), (0, 1)], 16).unwrap();
        let set = enumerate_index_set(3, &spec);
        let mut sorted = set.clone();
        sorted.sort();
        assert_eq!(set, sorted);
        assert_eq!(set.len(), 9 * spec.lag_count());
    }

    #[test]
    fn shift_spec_normalizes_overlapping_ranges() {
        let spec = ShiftSpec::new(
            CorrelationMode::Aperiodic,
            &[(4, 6), (1, 2), (3, 4), (10, 10)],
            16,
        )
        .unwrap();
        assert_eq!(spec.ranges(), &[(1, 6), (10, 10)]);
        assert_eq!(spec.lag_count(), 7);
        assert!(spec.contains_lag(5));
        assert!(!spec.contains_lag(8));
    }

    #[test]
    fn shift_spec_rejects_bad_ranges() {
        assert!(ShiftSpec::new(CorrelationMode::Aperiodic, &[], 8).is_err());
        assert!(ShiftSpec::new(CorrelationMode::Aperiodic, &[(3, 2)], 8).is_err());
        assert!(ShiftSpec::new(CorrelationMode::Aperiodic, &[(0, 8)], 8).is_err());
    }

    #[test]
    fn validate_binary_examples() {
        let yes = SequenceSet::single(&[1.0, -1.0, 1.0]).unwrap();
        assert!(validate_binary(&yes));
        let no = SequenceSet::single(&[0.5, 1.0, -1.0]).unwrap();
        assert!(!validate_binary(&no));
        // Sign-rounding any relaxed set restores the binary contract.
        assert!(no.sign_quantized().is_binary());
    }

    #[test]
    fn sign_quantized_sends_zero_to_plus_one() {
        let x = SequenceSet::single(&[0.0, -0.3, 2.0]).unwrap();
        assert_eq!(x.sign_quantized().column(0), &[1.0, -1.0, 1.0]);
    }

    #[test]
    fn design_target_is_n_only_on_the_mainlobe() {
        let t = DesignTarget::new(7);
        assert_eq!(t.value(&PairLagIndex { i: 2, j: 2, lag: 0 }), 7.0);
        assert_eq!(t.value(&PairLagIndex { i: 0, j: 1, lag: 0 }), 0.0);
        assert_eq!(t.value(&PairLagIndex { i: 1, j: 1, lag: 3 }), 0.0);
    }

    #[test]
    fn sequence_set_rejects_degenerate_shapes() {
        assert!(SequenceSet::new(1, 1, vec![1.0]).is_err());
        assert!(SequenceSet::new(4, 0, vec![]).is_err());
        assert!(SequenceSet::new(4, 1, vec![1.0; 3]).is_err());
    }
}
