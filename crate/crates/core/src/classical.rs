//! Classical single-particle ring networks.
//!
//! Each source routes its particle to one of its two neighbours; after
//! post-selecting one particle per station only the two cyclic routings
//! survive. "Clockwise" means every source `i` sends toward station `i`,
//! "counterclockwise" toward station `i + 1`. Conditioned on the routing,
//! every party answers with a fixed local response, so the observed
//! statistics are a mixture of two product distributions.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::outcome::{check_parties, Bitstring, OutcomeDistribution};

/// Default threshold for [`check_predicate`].
pub const PREDICATE_TOLERANCE: f64 = 1e-9;

/// Largest party count accepted by [`predicate_infeasibility_proof`]
/// (`3^(2n)` patterns).
pub const MAX_PROOF_PARTIES: usize = 7;

/// Mixing weight plus per-party probabilities of answering 0 under each
/// routing direction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalParams {
    gamma: f64,
    p_zero: Vec<f64>,
    q_zero: Vec<f64>,
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParams(format!("{name} = {x} is outside [0, 1]")));
    }
    Ok(())
}

impl ClassicalParams {
    pub fn new(gamma: f64, p_zero: Vec<f64>, q_zero: Vec<f64>) -> Result<Self> {
        if p_zero.len() != q_zero.len() {
            return Err(Error::InvalidParams(format!(
                "p_zero has {} entries but q_zero has {}",
                p_zero.len(),
                q_zero.len()
            )));
        }
        check_parties(p_zero.len())?;
        check_unit("gamma", gamma)?;
        for (j, (&p, &q)) in p_zero.iter().zip(&q_zero).enumerate() {
            check_unit(&format!("p_zero[{j}]"), p)?;
            check_unit(&format!("q_zero[{j}]"), q)?;
        }
        Ok(Self { gamma, p_zero, q_zero })
    }

    /// Unpack `[gamma, p_zero..., q_zero...]`.
    pub fn from_vector(parties: usize, x: &[f64]) -> Result<Self> {
        if x.len() != 2 * parties + 1 {
            return Err(Error::InvalidParams(format!("expected {} coordinates, got {}", 2 * parties + 1, x.len())));
        }
        Self::new(x[0], x[1..=parties].to_vec(), x[parties + 1..].to_vec())
    }

    pub fn to_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.parties() + 1);
        v.push(self.gamma);
        v.extend_from_slice(&self.p_zero);
        v.extend_from_slice(&self.q_zero);
        v
    }

    pub fn parties(&self) -> usize { self.p_zero.len() }

    pub fn gamma(&self) -> f64 { self.gamma }

    pub fn p_zero(&self) -> &[f64] { &self.p_zero }

    pub fn q_zero(&self) -> &[f64] { &self.q_zero }
}

/// Probability that party `j` answers `bit` given per-party P(0).
#[inline]
fn response(p0: f64, bit: u8) -> f64 {
    if bit == 0 { p0 } else { 1.0 - p0 }
}

/// Fill `out` with `gamma prod p_j(a_j) + (1 - gamma) prod q_j(a_j)` over all
/// bitstrings, party 0 most significant. Works on raw coordinates
/// `[gamma, p_zero..., q_zero...]` without validation.
pub fn classical_probs_into(parties: usize, x: &[f64], out: &mut Vec<f64>) {
    let gamma = x[0];
    let (p, q) = (&x[1..=parties], &x[parties + 1..]);
    out.clear();
    out.extend((0..1usize << parties).map(|index| {
        let (mut cw, mut ccw) = (1.0, 1.0);
        for j in 0..parties {
            let bit = (index >> (parties - 1 - j) & 1) as u8;
            cw *= response(p[j], bit);
            ccw *= response(q[j], bit);
        }
        gamma * cw + (1.0 - gamma) * ccw
    }));
}

/// The post-selected classical statistics for the given parameters.
pub fn classical_distribution(params: &ClassicalParams) -> OutcomeDistribution {
    let mut probs = Vec::new();
    classical_probs_into(params.parties(), &params.to_vector(), &mut probs);
    OutcomeDistribution::new(params.parties(), probs).expect("mixture of product distributions is normalized")
}

/// Per-source probability of sending toward its own-index station.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoutingParams {
    direction_probs: Vec<f64>,
}

impl RoutingParams {
    pub fn new(direction_probs: Vec<f64>) -> Result<Self> {
        check_parties(direction_probs.len())?;
        for (i, &d) in direction_probs.iter().enumerate() {
            check_unit(&format!("direction_probs[{i}]"), d)?;
        }
        Ok(Self { direction_probs })
    }

    pub fn direction_probs(&self) -> &[f64] { &self.direction_probs }
}

/// Condition on one particle per station.
///
/// Returns the probability `pi` of that event together with the induced
/// mixture weight `gamma = prod d_i / pi`; the responses pass through
/// unchanged.
pub fn postselected_from_routing(
    routing: &RoutingParams,
    p_zero: Vec<f64>,
    q_zero: Vec<f64>,
) -> Result<(f64, ClassicalParams)> {
    if p_zero.len() != routing.direction_probs.len() {
        return Err(Error::InvalidParams("response lists must match the number of sources".into()));
    }
    let clockwise: f64 = routing.direction_probs.iter().product();
    let counter: f64 = routing.direction_probs.iter().map(|d| 1.0 - d).product();
    let pi = clockwise + counter;
    if pi == 0.0 {
        return Err(Error::DegenerateRouting);
    }
    Ok((pi, ClassicalParams::new(clockwise / pi, p_zero, q_zero)?))
}

/// Outcome of testing a distribution against the parity predicate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredicateVerdict {
    pub satisfied: bool,
    /// Odd-parity outcomes whose probability exceeds the tolerance.
    pub odd_present: Vec<Bitstring>,
    /// Even-parity outcomes whose probability does not exceed it.
    pub even_missing: Vec<Bitstring>,
}

/// Every odd-parity outcome must have probability `<= tol` and every
/// even-parity outcome probability `> tol`.
pub fn check_predicate(dist: &OutcomeDistribution, tol: f64) -> PredicateVerdict {
    let mut odd_present = Vec::new();
    let mut even_missing = Vec::new();
    for (b, p) in dist.iter() {
        match (b.is_even(), p > tol) {
            (true, false) => even_missing.push(b),
            (false, true) => odd_present.push(b),
            _ => {}
        }
    }
    PredicateVerdict { satisfied: odd_present.is_empty() && even_missing.is_empty(), odd_present, even_missing }
}

/// Routing direction, used to index [`SupportPattern`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    Clockwise,
    Counterclockwise,
}

/// Which response probabilities are exactly zero, per party and direction.
///
/// `zero[j][d][v]` is true when party `j` never answers `v` under direction
/// `d`. At most one of the two outcomes can be excluded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportPattern {
    zero: Vec<[[bool; 2]; 2]>,
}

impl SupportPattern {
    pub fn new(zero: Vec<[[bool; 2]; 2]>) -> Result<Self> {
        if zero.iter().any(|d| d.iter().any(|v| v[0] && v[1])) {
            return Err(Error::InvalidParams("a response cannot exclude both outcomes".into()));
        }
        Ok(Self { zero })
    }

    /// Decode the `index`-th pattern: one base-3 digit per (party,
    /// direction), 0 = both outcomes possible, 1 = never 0, 2 = never 1.
    fn decode(parties: usize, mut index: u64) -> Self {
        let mut zero = vec![[[false; 2]; 2]; parties];
        for slot in zero.iter_mut() {
            for dir in slot.iter_mut() {
                match index % 3 {
                    1 => dir[0] = true,
                    2 => dir[1] = true,
                    _ => {}
                }
                index /= 3;
            }
        }
        Self { zero }
    }

    pub fn parties(&self) -> usize { self.zero.len() }

    pub fn is_zero(&self, party: usize, direction: Direction, value: u8) -> bool {
        self.zero[party][direction as usize][value as usize]
    }

    /// Bitstrings the given branch can produce, as a bit mask over indices.
    fn branch_support(&self, direction: Direction, masks: &[[u128; 2]]) -> u128 {
        let n = self.zero.len();
        let mut alive = full_mask(n);
        for (j, z) in self.zero.iter().enumerate() {
            let d = &z[direction as usize];
            let mut allowed = 0u128;
            if !d[0] {
                allowed |= masks[j][0];
            }
            if !d[1] {
                allowed |= masks[j][1];
            }
            alive &= allowed;
        }
        alive
    }
}

fn full_mask(parties: usize) -> u128 {
    if parties >= 7 { u128::MAX } else { (1u128 << (1 << parties)) - 1 }
}

/// `masks[j][v]` = set of bitstrings whose party `j` answers `v`.
fn party_masks(parties: usize) -> Vec<[u128; 2]> {
    (0..parties)
        .map(|j| {
            let mut m = [0u128; 2];
            for b in Bitstring::all(parties) {
                m[b.bit(j) as usize] |= 1u128 << b.index();
            }
            m
        })
        .collect()
}

fn parity_masks(parties: usize) -> (u128, u128) {
    let mut even = 0u128;
    for b in Bitstring::all(parties).filter(Bitstring::is_even) {
        even |= 1u128 << b.index();
    }
    (even, full_mask(parties) & !even)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Feasibility {
    Feasible,
    Infeasible,
}

/// Certificate produced by exhaustive zero-pattern enumeration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InfeasibilityReport {
    pub parties: usize,
    pub verdict: Feasibility,
    pub patterns_examined: u64,
    /// Patterns in which both routing branches exclude every odd outcome.
    pub patterns_excluding_odd: u64,
    /// Of those, patterns that still leave every even outcome reachable.
    pub feasible_patterns: u64,
    /// Fewest even outcomes lost by any pattern excluding all odd ones.
    pub min_even_lost: Option<u32>,
    /// First feasible pattern in enumeration order, if any.
    pub example: Option<SupportPattern>,
    pub max_parties: usize,
}

/// Decide by enumeration whether any assignment of exactly-zero responses
/// removes all odd-parity outcomes from both routing branches while keeping
/// every even-parity outcome reachable from at least one of them.
///
/// Zero responses are the only way a product of probabilities can vanish, so
/// an empty feasible set proves no choice of classical parameters satisfies
/// the parity predicate.
pub fn predicate_infeasibility_proof(parties: usize) -> Result<InfeasibilityReport> {
    if parties < 2 {
        return Err(Error::TooFewParties(parties));
    }
    if parties > MAX_PROOF_PARTIES {
        return Err(Error::BudgetExceeded(format!(
            "exhaustive enumeration covers at most {MAX_PROOF_PARTIES} parties (3^{} patterns), got {parties}",
            2 * MAX_PROOF_PARTIES
        )));
    }
    let masks = party_masks(parties);
    let (even, odd) = parity_masks(parties);
    let total = 3u64.pow(2 * parties as u32);

    #[derive(Clone, Copy)]
    struct Tally {
        excluding_odd: u64,
        feasible: u64,
        min_even_lost: Option<u32>,
        first_feasible: Option<u64>,
    }
    let empty = Tally { excluding_odd: 0, feasible: 0, min_even_lost: None, first_feasible: None };
    let merge = |a: Tally, b: Tally| Tally {
        excluding_odd: a.excluding_odd + b.excluding_odd,
        feasible: a.feasible + b.feasible,
        min_even_lost: match (a.min_even_lost, b.min_even_lost) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        },
        first_feasible: match (a.first_feasible, b.first_feasible) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        },
    };

    let tally = (0..total)
        .into_par_iter()
        .map(|index| {
            let pattern = SupportPattern::decode(parties, index);
            let cw = pattern.branch_support(Direction::Clockwise, &masks);
            let ccw = pattern.branch_support(Direction::Counterclockwise, &masks);
            if (cw | ccw) & odd != 0 {
                return empty;
            }
            let lost = (even & !(cw | ccw)).count_ones();
            Tally {
                excluding_odd: 1,
                feasible: (lost == 0) as u64,
                min_even_lost: Some(lost),
                first_feasible: (lost == 0).then_some(index),
            }
        })
        .reduce(|| empty, merge);

    Ok(InfeasibilityReport {
        parties,
        verdict: if tally.feasible == 0 { Feasibility::Infeasible } else { Feasibility::Feasible },
        patterns_examined: total,
        patterns_excluding_odd: tally.excluding_odd,
        feasible_patterns: tally.feasible,
        min_even_lost: tally.min_even_lost,
        example: tally.first_feasible.map(|i| SupportPattern::decode(parties, i)),
        max_parties: MAX_PROOF_PARTIES,
    })
}
