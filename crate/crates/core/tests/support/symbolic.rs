//! Exact integer expansion of the ring-network creation-operator polynomial.
//!
//! Independent of the library's complex-amplitude machinery: each source
//! contributes the factor `(l_i + r_i) + (l_{i+1} - r_{i+1})` written directly
//! in detector modes, with an overall `(1/2)^n` prefactor kept aside so every
//! coefficient stays an integer.

#![allow(dead_code)]

use std::collections::BTreeMap;

pub type Monomial = Vec<u8>;

pub struct Expansion {
    pub parties: usize,
    /// Integer coefficients of the collected polynomial (before the `(1/2)^n`).
    pub terms: BTreeMap<Monomial, i64>,
}

fn factorial(k: u8) -> u128 {
    (1..=k as u128).product::<u128>().max(1)
}

pub fn expand_ring(parties: usize) -> Expansion {
    let modes = 2 * parties;
    let mut poly: BTreeMap<Monomial, i64> = BTreeMap::new();
    poly.insert(vec![0; modes], 1);
    for source in 0..parties {
        let next = (source + 1) % parties;
        let factor = [
            (2 * source, 1i64),
            (2 * source + 1, 1),
            (2 * next, 1),
            (2 * next + 1, -1),
        ];
        let mut out: BTreeMap<Monomial, i64> = BTreeMap::new();
        for (mono, coeff) in &poly {
            for &(mode, sign) in &factor {
                let mut m = mono.clone();
                m[mode] += 1;
                *out.entry(m).or_insert(0) += coeff * sign;
            }
        }
        out.retain(|_, c| *c != 0);
        poly = out;
    }
    Expansion { parties, terms: poly }
}

impl Expansion {
    pub fn denominator(&self) -> u128 {
        4u128.pow(self.parties as u32)
    }

    /// Squared norm numerator over `denominator()`: `sum c^2 prod e!`.
    pub fn norm_numerator(&self) -> u128 {
        self.terms
            .iter()
            .map(|(m, c)| (c * c) as u128 * m.iter().map(|&e| factorial(e)).product::<u128>())
            .sum()
    }

    fn one_per_station(&self, m: &Monomial) -> bool {
        (0..self.parties).all(|j| m[2 * j] + m[2 * j + 1] == 1)
    }

    /// Post-selection success probability numerator over `denominator()`.
    pub fn postselected_numerator(&self) -> u128 {
        self.terms
            .iter()
            .filter(|(m, _)| self.one_per_station(m))
            .map(|(_, c)| (c * c) as u128)
            .sum()
    }

    /// Conditional outcome weights keyed by bitstring index (party 0 is the
    /// most significant bit, right detector = 1), as integer numerators over
    /// `postselected_numerator()`.
    pub fn outcome_numerators(&self) -> BTreeMap<usize, u128> {
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            if !self.one_per_station(m) {
                continue;
            }
            let mut idx = 0usize;
            for j in 0..self.parties {
                idx = (idx << 1) | m[2 * j + 1] as usize;
            }
            *out.entry(idx).or_insert(0) += (c * c) as u128;
        }
        out
    }
}
