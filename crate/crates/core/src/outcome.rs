//! Detector bitstrings and probability vectors over them.
//!
//! A bitstring of `n` parties is stored as an index in `0..2^n`, with party 0
//! in the most significant position so that the textual form `"011"` reads
//! party by party and sorts in index order.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest party count for which a dense outcome vector is allocated.
pub const MAX_PARTIES: usize = 20;

/// Tolerance on `sum p = 1` when validating distributions.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// One joint outcome `(a_1, ..., a_n)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitstring {
    index: usize,
    parties: usize,
}

impl Bitstring {
    pub fn new(index: usize, parties: usize) -> Result<Self> {
        check_parties(parties)?;
        if index >= 1 << parties {
            return Err(Error::InvalidBitstring(format!("index {index} out of range for {parties} parties")));
        }
        Ok(Self { index, parties })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut index = 0;
        for &b in bits {
            if b > 1 {
                return Err(Error::InvalidBitstring(format!("{bits:?}")));
            }
            index = (index << 1) | b as usize;
        }
        Self::new(index, bits.len())
    }

    pub fn index(&self) -> usize { self.index }

    pub fn parties(&self) -> usize { self.parties }

    /// Outcome bit of `party` (0-based).
    pub fn bit(&self, party: usize) -> u8 {
        debug_assert!(party < self.parties);
        ((self.index >> (self.parties - 1 - party)) & 1) as u8
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.parties).map(|j| self.bit(j)).collect()
    }

    /// XOR of all outcome bits.
    pub fn parity(&self) -> u8 {
        (self.index.count_ones() & 1) as u8
    }

    pub fn is_even(&self) -> bool { self.parity() == 0 }

    /// All `2^n` bitstrings in index order.
    pub fn all(parties: usize) -> impl Iterator<Item = Bitstring> {
        (0..1usize << parties).map(move |index| Bitstring { index, parties })
    }

    /// Flip the bits of the given parties.
    pub fn flip(&self, parties: &[usize]) -> Bitstring {
        let mask = parties.iter().fold(0, |m, &j| m | 1 << (self.parties - 1 - j));
        Bitstring { index: self.index ^ mask, parties: self.parties }
    }

    /// Reorder parties: party `j` of the result carries the bit of party
    /// `perm[j]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Bitstring {
        let bits: Vec<u8> = perm.iter().map(|&j| self.bit(j)).collect();
        Bitstring::from_bits(&bits).expect("permutation preserves length")
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.parties {
            write!(f, "{}", self.bit(j))?;
        }
        Ok(())
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::InvalidBitstring(s.to_string())),
            })
            .collect::<Result<Vec<u8>>>()?;
        if bits.is_empty() {
            return Err(Error::InvalidBitstring(s.to_string()));
        }
        Bitstring::from_bits(&bits)
    }
}

impl Serialize for Bitstring {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// XOR of the components of a bitstring.
pub fn parity(bits: &Bitstring) -> u8 {
    bits.parity()
}

pub(crate) fn check_parties(parties: usize) -> Result<()> {
    if parties == 0 {
        return Err(Error::InvalidDistribution("zero parties".into()));
    }
    if parties > MAX_PARTIES {
        return Err(Error::TooManyParties { parties, max: MAX_PARTIES });
    }
    Ok(())
}

/// Probability vector over the `2^n` detector bitstrings.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    parties: usize,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    /// Validates length, non-negativity and normalization (within
    /// [`SUM_TOLERANCE`]).
    pub fn new(parties: usize, probs: Vec<f64>) -> Result<Self> {
        check_parties(parties)?;
        if probs.len() != 1 << parties {
            return Err(Error::InvalidDistribution(format!(
                "expected {} probabilities for {parties} parties, got {}",
                1usize << parties,
                probs.len()
            )));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "probability of {} is {p}",
                Bitstring { index: i, parties }
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(Self { parties, probs })
    }

    /// Build from a sparse map; missing bitstrings get probability zero.
    pub fn from_map<'a, I>(parties: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        check_parties(parties)?;
        let mut probs = vec![0.0; 1 << parties];
        for (key, p) in entries {
            let b: Bitstring = key.parse()?;
            if b.parties != parties {
                return Err(Error::InvalidBitstring(format!("{key:?} has length {} but parties = {parties}", b.parties)));
            }
            probs[b.index] += p;
        }
        Self::new(parties, probs)
    }

    pub fn point_mass(outcome: Bitstring) -> Self {
        let mut probs = vec![0.0; 1 << outcome.parties];
        probs[outcome.index] = 1.0;
        Self { parties: outcome.parties, probs }
    }

    pub fn uniform(parties: usize) -> Result<Self> {
        check_parties(parties)?;
        let n = 1usize << parties;
        Self::new(parties, vec![1.0 / n as f64; n])
    }

    /// Uniform over the given outcomes (duplicates are counted once).
    pub fn uniform_over(outcomes: &[Bitstring]) -> Result<Self> {
        let parties = outcomes
            .first()
            .ok_or_else(|| Error::InvalidDistribution("empty outcome set".into()))?
            .parties;
        let mut probs = vec![0.0; 1 << parties];
        let mut seen = 0usize;
        for b in outcomes {
            if b.parties != parties {
                return Err(Error::InvalidDistribution("mixed party counts".into()));
            }
            if probs[b.index] == 0.0 {
                probs[b.index] = 1.0;
                seen += 1;
            }
        }
        probs.iter_mut().for_each(|p| *p /= seen as f64);
        Self::new(parties, probs)
    }

    /// `lambda * a + (1 - lambda) * b`.
    pub fn mix(a: &Self, b: &Self, lambda: f64) -> Result<Self> {
        if a.parties != b.parties {
            return Err(Error::InvalidDistribution("mixing distributions of different sizes".into()));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParams(format!("mixing weight {lambda} outside [0, 1]")));
        }
        let probs = a.probs.iter().zip(&b.probs).map(|(x, y)| lambda * x + (1.0 - lambda) * y).collect();
        Self::new(a.parties, probs)
    }

    pub fn parties(&self) -> usize { self.parties }

    pub fn probs(&self) -> &[f64] { &self.probs }

    pub fn prob(&self, outcome: Bitstring) -> f64 {
        debug_assert_eq!(outcome.parties, self.parties);
        self.probs[outcome.index]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Bitstring, f64)> + '_ {
        let parties = self.parties;
        self.probs.iter().enumerate().map(move |(index, &p)| (Bitstring { index, parties }, p))
    }

    /// Bitstrings with strictly positive probability.
    pub fn support(&self) -> Vec<Bitstring> {
        self.iter().filter(|(_, p)| *p > 0.0).map(|(b, _)| b).collect()
    }

    /// Nonzero entries keyed by their textual bitstring.
    pub fn to_map(&self) -> BTreeMap<String, f64> {
        self.iter().filter(|(_, p)| *p != 0.0).map(|(b, p)| (b.to_string(), p)).collect()
    }

    /// Relabel parties: `result(b.permute(perm)) = self(b)`.
    pub fn permute_parties(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.parties);
        let mut probs = vec![0.0; self.probs.len()];
        for (b, p) in self.iter() {
            probs[b.permute(perm).index] = p;
        }
        Self { parties: self.parties, probs }
    }

    /// Relabel outcomes by flipping the bits of the given parties.
    pub fn flip_parties(&self, parties: &[usize]) -> Self {
        let mut probs = vec![0.0; self.probs.len()];
        for (b, p) in self.iter() {
            probs[b.flip(parties).index] = p;
        }
        Self { parties: self.parties, probs }
    }

    /// Euclidean distance between two probability vectors.
    pub fn l2_distance(&self, other: &Self) -> f64 {
        self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }
}

impl Serialize for OutcomeDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("OutcomeDistribution", 2)?;
        s.serialize_field("parties", &self.parties)?;
        s.serialize_field("probs", &self.to_map())?;
        s.end()
    }
}
