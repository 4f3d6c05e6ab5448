//! Structured baselines: LFSR m-sequences, seeded random binary sets, and the
//! 2√N peak-sidelobe benchmark of the best known structured sequence sets.

use crate::error::Error;
use crate::types::SequenceSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Primitive-polynomial tap masks for degrees 3..=10.
///
/// Bit i of a mask is the coefficient of x^i; the leading x^degree term is
/// implicit. Higher degrees require caller-supplied taps, which are verified
/// at runtime by the period check either way.
const PRIMITIVE_TAPS: [(u32, u32); 8] = [
    (3, 0b011),        // x^3 + x + 1
    (4, 0b0011),       // x^4 + x + 1
    (5, 0b00101),      // x^5 + x^2 + 1
    (6, 0b000011),     // x^6 + x + 1
    (7, 0b0000011),    // x^7 + x + 1
    (8, 0b00011101),   // x^8 + x^4 + x^3 + x^2 + 1
    (9, 0b000010001),  // x^9 + x^4 + 1
    (10, 0b0000001001), // x^10 + x^3 + 1
];

pub fn default_taps(degree: u32) -> Option<u32> {
    PRIMITIVE_TAPS.iter().find(|&&(d, _)| d == degree).map(|&(_, t)| t)
}

/// Maximal-length LFSR sequence of length 2^degree − 1, mapped to ±1.
///
/// The recurrence is s_{t+d} = ⊕_{i: taps bit i} s_{t+i}. The generated state
/// orbit must have period exactly 2^degree − 1, which holds iff the tap
/// polynomial is primitive; anything shorter is rejected.
pub fn m_sequence(degree: u32, taps: u32) -> Result<SequenceSet, Error> {
    if !(2..=28).contains(&degree) {
        return Err(Error::Config(format!("m-sequence degree {degree} outside 2..=28")));
    }
    if taps >= (1u32 << degree) {
        return Err(Error::Config(format!(
            "taps {taps:#b} has bits at or above the implicit x^{degree} term"
        )));
    }
    let full_period = (1u64 << degree) - 1;
    let mask = (1u32 << degree) - 1;
    let start: u32 = 1;
    let mut state = start;
    let mut bits = Vec::with_capacity(full_period as usize);
    let mut period = 0u64;
    for t in 1..=(1u64 << degree) {
        bits.push(state & 1);
        let fb = (state & taps).count_ones() & 1;
        state = (state >> 1) | (fb << (degree - 1));
        state &= mask;
        if state == start {
            period = t;
            break;
        }
    }
    if period != full_period {
        return Err(Error::NonPrimitiveTaps { degree, taps, period });
    }
    let vals: Vec<f64> = bits.iter().map(|&b| if b == 1 { -1.0 } else { 1.0 }).collect();
    SequenceSet::new(full_period as usize, 1, vals)
}

/// 2√N, the periodic PSL of the best known structured sequence sets.
pub fn benchmark_psl_2sqrt_n(n: usize) -> f64 {
    assert!(n >= 1);
    2.0 * (n as f64).sqrt()
}

/// Seeded uniform ±1 sequence set; identical output for identical seeds.
pub fn random_binary(n_len: usize, m_count: usize, seed: u64) -> SequenceSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals: Vec<f64> =
        (0..n_len * m_count).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
    SequenceSet::new(n_len, m_count, vals).expect("valid dimensions")
}
