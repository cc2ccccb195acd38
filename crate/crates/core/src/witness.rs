//! Nonlinear coherence witnesses.
//!
//! `C_n` compares how much probability mass pairs up inside the even-parity
//! outcomes with how much pairs up inside the odd-parity ones:
//!
//! ```text
//! C_n = | sum_{A < A', both even} p(A) p(A') - sum_{B < B', both odd} p(B) p(B') |
//! ```
//!
//! Sums run over unordered pairs of distinct outcomes. A classical ring
//! network never exceeds `1/4` in any tested configuration, while the
//! post-selected quantum ring reaches the logical maximum `1/2 - 2^-n`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::outcome::{Bitstring, OutcomeDistribution};

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct WitnessValue {
    pub parties: usize,
    pub value: f64,
    pub even_pair_sum: f64,
    pub odd_pair_sum: f64,
}

/// Double-slit interference term `p00 - p01 - p10 + p11`.
pub fn interference_term(p00: f64, p01: f64, p10: f64, p11: f64) -> f64 {
    p00 - p01 - p10 + p11
}

/// Unordered distinct-pair sums `(even, odd)` of a raw probability vector
/// indexed like [`Bitstring::index`].
pub fn pair_sums(probs: &[f64]) -> (f64, f64) {
    let (mut s, mut q) = ([0.0f64; 2], [0.0f64; 2]);
    for (index, &p) in probs.iter().enumerate() {
        let k = (index.count_ones() & 1) as usize;
        s[k] += p;
        q[k] += p * p;
    }
    let pairs = |k: usize| ((s[k] * s[k] - q[k]) / 2.0).max(0.0);
    (pairs(0), pairs(1))
}

/// Evaluate `C_n` on a validated distribution.
pub fn evaluate_cn(dist: &OutcomeDistribution) -> WitnessValue {
    let (even_pair_sum, odd_pair_sum) = pair_sums(dist.probs());
    WitnessValue { parties: dist.parties(), value: (even_pair_sum - odd_pair_sum).abs(), even_pair_sum, odd_pair_sum }
}

/// Validate then evaluate a raw probability vector.
pub fn evaluate_cn_probs(parties: usize, probs: &[f64]) -> Result<WitnessValue> {
    Ok(evaluate_cn(&OutcomeDistribution::new(parties, probs.to_vec())?))
}

/// `C(2^(n-1), 2) (2^(1-n))^2 = 1/2 - 2^-n`, the value reached by the uniform
/// distribution over even-parity outcomes.
pub fn quantum_cn_value(parties: usize) -> Result<f64> {
    if parties < 2 {
        return Err(Error::TooFewParties(parties));
    }
    Ok(0.5 - 0.5f64.powi(parties as i32))
}

/// Upper bound of `C_n` over all distributions; equal to [`quantum_cn_value`].
pub fn logical_maximum(parties: usize) -> Result<f64> {
    quantum_cn_value(parties)
}

/// Even-parity outcomes in index order.
pub fn even_outcomes(parties: usize) -> Vec<Bitstring> {
    Bitstring::all(parties).filter(Bitstring::is_even).collect()
}
