//! Bosonic Fock states on the ring network and their linear-optical evolution.
//!
//! Mode layout for `n` parties (all indices 0-based, cyclic):
//!
//! * source `i` has two arms: mode `2i` leads to station `i`, mode `2i + 1`
//!   leads to station `i + 1`;
//! * station `j` has two detectors: mode `2j` (left, outcome bit 0) and mode
//!   `2j + 1` (right, outcome bit 1).
//!
//! A state is a sparse map from occupation vectors to amplitudes in the
//! normalized Fock basis `|k_1, ..., k_m>`.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::outcome::{check_parties, OutcomeDistribution};

/// Amplitudes with modulus below this are dropped after collection.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Tolerance used for the unitarity and normalization checks.
pub const UNITARY_TOLERANCE: f64 = 1e-12;

/// Which neighbouring station a source arm leads to.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Arm {
    /// Toward the station with the source's own index.
    Own,
    /// Toward the next station around the ring.
    Next,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Port {
    Left,
    Right,
}

/// Source and detector mode labels for an `n`-party ring.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModeLayout {
    parties: usize,
}

impl ModeLayout {
    pub fn ring(parties: usize) -> Result<Self> {
        if parties < 2 {
            return Err(Error::TooFewParties(parties));
        }
        check_parties(parties)?;
        Ok(Self { parties })
    }

    pub fn parties(&self) -> usize { self.parties }

    /// Number of modes on either side of the beam splitters (`2n`).
    pub fn mode_count(&self) -> usize { 2 * self.parties }

    pub fn source_arm(&self, source: usize, arm: Arm) -> usize {
        assert!(source < self.parties);
        match arm {
            Arm::Own => 2 * source,
            Arm::Next => 2 * source + 1,
        }
    }

    /// Station reached by a source-arm mode.
    pub fn arm_station(&self, mode: usize) -> usize {
        let source = mode / 2;
        if mode % 2 == 0 { source } else { (source + 1) % self.parties }
    }

    /// The two source arms arriving at `station`: `[from source station,
    /// from source station - 1]`.
    pub fn station_arms(&self, station: usize) -> [usize; 2] {
        let prev = (station + self.parties - 1) % self.parties;
        [self.source_arm(station, Arm::Own), self.source_arm(prev, Arm::Next)]
    }

    pub fn detector(&self, station: usize, port: Port) -> usize {
        assert!(station < self.parties);
        match port {
            Port::Left => 2 * station,
            Port::Right => 2 * station + 1,
        }
    }
}

/// Particle counts per mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occupation(Box<[u8]>);

impl Occupation {
    pub fn new(counts: Vec<u8>) -> Self { Self(counts.into_boxed_slice()) }

    pub fn zeros(modes: usize) -> Self { Self(vec![0; modes].into_boxed_slice()) }

    pub fn counts(&self) -> &[u8] { &self.0 }

    pub fn total(&self) -> u32 { self.0.iter().map(|&k| k as u32).sum() }

    /// `prod_m k_m!`, the squared norm of the unnormalized monomial.
    fn factorial_product(&self) -> f64 {
        self.0.iter().map(|&k| (1..=k as u32).product::<u32>() as f64).product()
    }
}

/// A pure state of indistinguishable bosons over the modes of a ring layout.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    layout: ModeLayout,
    amplitudes: BTreeMap<Occupation, C64>,
    normalized: bool,
}

impl FockState {
    pub fn vacuum(layout: ModeLayout) -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(Occupation::zeros(layout.mode_count()), C64::new(1.0, 0.0));
        Self { layout, amplitudes, normalized: true }
    }

    /// Collects the given terms (summing repeated occupations) and prunes
    /// negligible amplitudes. All occupations must share one particle number.
    pub fn from_terms<I>(layout: ModeLayout, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Occupation, C64)>,
    {
        let mut amplitudes: BTreeMap<Occupation, C64> = BTreeMap::new();
        let mut particles = None;
        for (occ, amp) in terms {
            if occ.0.len() != layout.mode_count() {
                return Err(Error::InvalidOccupation(format!(
                    "length {} does not match {} modes",
                    occ.0.len(),
                    layout.mode_count()
                )));
            }
            match particles {
                None => particles = Some(occ.total()),
                Some(p) if p != occ.total() => {
                    return Err(Error::InvalidOccupation("mixed particle numbers".into()))
                }
                _ => {}
            }
            *amplitudes.entry(occ).or_insert(C64::new(0.0, 0.0)) += amp;
        }
        Ok(Self::collected(layout, amplitudes))
    }

    fn collected(layout: ModeLayout, mut amplitudes: BTreeMap<Occupation, C64>) -> Self {
        amplitudes.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
        let norm_sqr: f64 = amplitudes.values().map(|a| a.norm_sqr()).sum();
        Self { layout, amplitudes, normalized: (norm_sqr - 1.0).abs() <= UNITARY_TOLERANCE }
    }

    pub fn layout(&self) -> &ModeLayout { &self.layout }

    pub fn len(&self) -> usize { self.amplitudes.len() }

    pub fn is_empty(&self) -> bool { self.amplitudes.is_empty() }

    pub fn is_normalized(&self) -> bool { self.normalized }

    pub fn norm_sqr(&self) -> f64 { self.amplitudes.values().map(|a| a.norm_sqr()).sum() }

    pub fn amplitude(&self, occ: &Occupation) -> C64 {
        self.amplitudes.get(occ).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Occupation, &C64)> {
        self.amplitudes.iter()
    }

    /// Shared particle number of all stored terms (`None` for the zero vector).
    pub fn particle_number(&self) -> Option<u32> {
        self.amplitudes.keys().next().map(Occupation::total)
    }

    /// True when every stored term has exactly one particle at each station.
    pub fn is_one_per_station(&self) -> bool {
        self.amplitudes.keys().all(|occ| one_per_station(&self.layout, occ))
    }
}

fn one_per_station(layout: &ModeLayout, occ: &Occupation) -> bool {
    (0..layout.parties).all(|j| occ.0[2 * j] + occ.0[2 * j + 1] == 1)
}

/// `(1/sqrt 2)^n prod_i (S_i,own + S_i,next) |0>`.
pub fn build_ring_input(parties: usize) -> Result<FockState> {
    let w = C64::new(FRAC_1_SQRT_2, 0.0);
    build_ring_input_weighted(&vec![(w, w); parties])
}

/// Product of single-particle source states `alpha_i S_i,own + beta_i
/// S_i,next`, one pair per source. Each pair is normalized before use.
pub fn build_ring_input_weighted(sources: &[(C64, C64)]) -> Result<FockState> {
    let layout = ModeLayout::ring(sources.len())?;
    let n = layout.parties;
    if n >= usize::BITS as usize {
        return Err(Error::TooManyParties { parties: n, max: usize::BITS as usize - 1 });
    }
    let mut normed = Vec::with_capacity(n);
    for (i, &(a, b)) in sources.iter().enumerate() {
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParams(format!("source {i} has zero or non-finite weight")));
        }
        normed.push((a / norm, b / norm));
    }
    let terms = (0..1usize << n).map(|choice| {
        let mut counts = vec![0u8; layout.mode_count()];
        let mut amp = C64::new(1.0, 0.0);
        for (i, &(a, b)) in normed.iter().enumerate() {
            if choice >> i & 1 == 0 {
                counts[layout.source_arm(i, Arm::Own)] = 1;
                amp *= a;
            } else {
                counts[layout.source_arm(i, Arm::Next)] = 1;
                amp *= b;
            }
        }
        (Occupation::new(counts), amp)
    });
    FockState::from_terms(layout, terms)
}

/// Unitary acting on creation operators: source mode `m` is sent to
/// `sum_d matrix[d][m] * detector_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModeTransform {
    dim: usize,
    /// Row-major, `dim x dim`.
    matrix: Vec<C64>,
}

impl LinearModeTransform {
    /// Rejects non-square input and matrices deviating from unitarity by
    /// more than [`UNITARY_TOLERANCE`].
    pub fn new(dim: usize, matrix: Vec<C64>) -> Result<Self> {
        if matrix.len() != dim * dim {
            return Err(Error::InvalidParams(format!("expected {} entries, got {}", dim * dim, matrix.len())));
        }
        let t = Self { dim, matrix };
        let dev = t.unitarity_deviation();
        if dev > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary(dev));
        }
        Ok(t)
    }

    pub fn identity(dim: usize) -> Self {
        let mut matrix = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            matrix[i * dim + i] = C64::new(1.0, 0.0);
        }
        Self { dim, matrix }
    }

    pub fn dim(&self) -> usize { self.dim }

    pub fn entry(&self, detector: usize, source: usize) -> C64 {
        self.matrix[detector * self.dim + source]
    }

    /// Largest entrywise deviation of `T^dagger T` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.dim {
            for b in 0..self.dim {
                let mut s = C64::new(0.0, 0.0);
                for d in 0..self.dim {
                    s += self.entry(d, a).conj() * self.entry(d, b);
                }
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    /// Nonzero image coefficients of one source mode.
    fn column(&self, source: usize) -> Vec<(usize, C64)> {
        (0..self.dim)
            .map(|d| (d, self.entry(d, source)))
            .filter(|(_, c)| *c != C64::new(0.0, 0.0))
            .collect()
    }
}

/// 50/50 beam splitter at every station of the ring.
///
/// At station `j` the arm from source `j` maps to `(l + r)/sqrt 2` and the arm
/// from the previous source `j - 1` maps to `(l - r)/sqrt 2`.
pub fn ring_beam_splitter_transform(parties: usize) -> Result<LinearModeTransform> {
    let layout = ModeLayout::ring(parties)?;
    let dim = layout.mode_count();
    let mut matrix = vec![C64::new(0.0, 0.0); dim * dim];
    let h = FRAC_1_SQRT_2;
    for j in 0..parties {
        let [own, prev] = layout.station_arms(j);
        let l = layout.detector(j, Port::Left);
        let r = layout.detector(j, Port::Right);
        matrix[l * dim + own] = C64::new(h, 0.0);
        matrix[r * dim + own] = C64::new(h, 0.0);
        matrix[l * dim + prev] = C64::new(h, 0.0);
        matrix[r * dim + prev] = C64::new(-h, 0.0);
    }
    LinearModeTransform::new(dim, matrix)
}

/// Substitute every creation operator by its image under `t` and collect.
pub fn apply_transform(state: &FockState, t: &LinearModeTransform) -> Result<FockState> {
    let modes = state.layout.mode_count();
    if modes != t.dim {
        return Err(Error::DimensionMismatch { state: modes, transform: t.dim });
    }
    let columns: Vec<Vec<(usize, C64)>> = (0..modes).map(|m| t.column(m)).collect();
    let mut out: BTreeMap<Occupation, C64> = BTreeMap::new();
    for (occ, &amp) in &state.amplitudes {
        // Monomial coefficients of prod_m (sum_d T[d][m] b_d^dagger)^{k_m}.
        let mut poly: HashMap<Vec<u8>, C64> = HashMap::new();
        poly.insert(vec![0; modes], amp / occ.factorial_product().sqrt());
        for (m, &k) in occ.0.iter().enumerate() {
            for _ in 0..k {
                let mut next: HashMap<Vec<u8>, C64> = HashMap::with_capacity(poly.len() * columns[m].len());
                for (mono, c) in &poly {
                    for &(d, coeff) in &columns[m] {
                        let mut e = mono.clone();
                        e[d] += 1;
                        *next.entry(e).or_default() += c * coeff;
                    }
                }
                poly = next;
            }
        }
        for (mono, c) in poly {
            let occ = Occupation::new(mono);
            let scaled = c * occ.factorial_product().sqrt();
            *out.entry(occ).or_default() += scaled;
        }
    }
    Ok(FockState::collected(state.layout, out))
}

/// Result of projecting onto one particle per station.
#[derive(Clone, Debug, PartialEq)]
pub struct PostSelection {
    pub success_probability: f64,
    pub state: FockState,
}

/// Project onto the subspace with exactly one particle at each station and
/// renormalize. The squared norm of the projection is the success
/// probability.
pub fn postselect_single_per_station(state: &FockState) -> Result<PostSelection> {
    if !state.normalized {
        return Err(Error::NotNormalized(state.norm_sqr()));
    }
    let kept: BTreeMap<Occupation, C64> = state
        .amplitudes
        .iter()
        .filter(|(occ, _)| one_per_station(&state.layout, occ))
        .map(|(o, a)| (o.clone(), *a))
        .collect();
    let success_probability: f64 = kept.values().map(|a| a.norm_sqr()).sum();
    if kept.is_empty() || success_probability == 0.0 {
        return Err(Error::PostSelectionImpossible);
    }
    let scale = success_probability.sqrt().recip();
    let renormed = kept.into_iter().map(|(o, a)| (o, a * scale)).collect();
    Ok(PostSelection { success_probability, state: FockState::collected(state.layout, renormed) })
}

/// Detector statistics of a post-selected state: bit `j` is 0 when station
/// `j` fires its left detector and 1 for the right one.
pub fn outcome_distribution(state: &FockState) -> Result<OutcomeDistribution> {
    if !state.normalized {
        return Err(Error::NotNormalized(state.norm_sqr()));
    }
    let n = state.layout.parties;
    let mut probs = vec![0.0; 1 << n];
    for (occ, amp) in &state.amplitudes {
        if !one_per_station(&state.layout, occ) {
            return Err(Error::NotPostSelected);
        }
        let index = (0..n).fold(0usize, |idx, j| (idx << 1) | occ.0[2 * j + 1] as usize);
        probs[index] += amp.norm_sqr();
    }
    OutcomeDistribution::new(n, probs)
}

/// Everything produced by one pass through the ring experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct RingOutcome {
    pub parties: usize,
    pub success_probability: f64,
    pub distribution: OutcomeDistribution,
}

/// Input state, beam splitters, post-selection and detection for `n` parties.
pub fn simulate_ring(parties: usize) -> Result<RingOutcome> {
    simulate_state(build_ring_input(parties)?)
}

/// As [`simulate_ring`] but with arbitrary single-particle source states.
pub fn simulate_ring_weighted(sources: &[(C64, C64)]) -> Result<RingOutcome> {
    simulate_state(build_ring_input_weighted(sources)?)
}

fn simulate_state(input: FockState) -> Result<RingOutcome> {
    let parties = input.layout.parties;
    let t = ring_beam_splitter_transform(parties)?;
    let evolved = apply_transform(&input, &t)?;
    let ps = postselect_single_per_station(&evolved)?;
    Ok(RingOutcome {
        parties,
        success_probability: ps.success_probability,
        distribution: outcome_distribution(&ps.state)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 { C64::new(re, 0.0) }

    #[test]
    fn ring_input_term_counts() {
        let s3 = build_ring_input(3).unwrap();
        assert_eq!(s3.len(), 8);
        for (_, a) in s3.iter() {
            assert!((a.re - 0.125f64.sqrt()).abs() < 1e-15);
        }
        let s2 = build_ring_input(2).unwrap();
        assert_eq!(s2.len(), 4);
        assert!(s2.iter().all(|(_, a)| (a.re - 0.5).abs() < 1e-15));
        assert!((s2.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(build_ring_input(1).is_err());
    }

    #[test]
    fn layout_adjacency_is_total() {
        for n in 2..8 {
            let layout = ModeLayout::ring(n).unwrap();
            let mut hits = vec![0; n];
            for m in 0..layout.mode_count() {
                hits[layout.arm_station(m)] += 1;
            }
            assert!(hits.iter().all(|&h| h == 2));
            for j in 0..n {
                for arm in layout.station_arms(j) {
                    assert_eq!(layout.arm_station(arm), j);
                }
            }
        }
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let s = build_ring_input(3).unwrap();
        let out = apply_transform(&s, &LinearModeTransform::identity(6)).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn vacuum_is_invariant() {
        let layout = ModeLayout::ring(3).unwrap();
        let vac = FockState::vacuum(layout);
        let out = apply_transform(&vac, &ring_beam_splitter_transform(3).unwrap()).unwrap();
        assert_eq!(out, vac);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let s = build_ring_input(3).unwrap();
        let err = apply_transform(&s, &LinearModeTransform::identity(4)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { state: 6, transform: 4 });
    }

    #[test]
    fn non_unitary_matrix_is_rejected() {
        let m = vec![c(1.0), c(1.0), c(0.0), c(1.0)];
        assert!(matches!(LinearModeTransform::new(2, m), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn two_particles_at_one_station_cannot_be_postselected() {
        let layout = ModeLayout::ring(2).unwrap();
        let s = FockState::from_terms(layout, [(Occupation::new(vec![1, 1, 0, 0]), c(1.0))]).unwrap();
        assert_eq!(postselect_single_per_station(&s), Err(Error::PostSelectionImpossible));
    }

    #[test]
    fn unnormalized_and_unselected_states_are_rejected() {
        let layout = ModeLayout::ring(2).unwrap();
        let half = FockState::from_terms(layout, [(Occupation::new(vec![1, 0, 1, 0]), c(0.5))]).unwrap();
        assert!(matches!(postselect_single_per_station(&half), Err(Error::NotNormalized(_))));
        let doubled = FockState::from_terms(layout, [(Occupation::new(vec![2, 0, 0, 0]), c(1.0))]).unwrap();
        assert_eq!(outcome_distribution(&doubled), Err(Error::NotPostSelected));
    }

    #[test]
    fn mixed_particle_numbers_are_rejected() {
        let layout = ModeLayout::ring(2).unwrap();
        let terms = [(Occupation::new(vec![1, 0, 0, 0]), c(0.6)), (Occupation::new(vec![1, 1, 0, 0]), c(0.8))];
        assert!(FockState::from_terms(layout, terms).is_err());
    }

    #[test]
    fn two_party_state_is_perfectly_correlated() {
        let bs = apply_transform(&build_ring_input(2).unwrap(), &ring_beam_splitter_transform(2).unwrap()).unwrap();
        let ps = postselect_single_per_station(&bs).unwrap();
        assert!((ps.success_probability - 0.5).abs() < 1e-12);
        // a_l b_l and a_r b_r with equal weight 1/sqrt 2, same sign
        let ll = ps.state.amplitude(&Occupation::new(vec![1, 0, 1, 0]));
        let rr = ps.state.amplitude(&Occupation::new(vec![0, 1, 0, 1]));
        assert_eq!(ps.state.len(), 2);
        assert!((ll.norm() - FRAC_1_SQRT_2).abs() < 1e-12 && (rr.norm() - FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn triangle_postselected_state_matches_closed_form() {
        // (1/2)(a_l(b_l c_l + b_r c_r) + a_r(b_r c_l + b_l c_r))
        let bs = apply_transform(&build_ring_input(3).unwrap(), &ring_beam_splitter_transform(3).unwrap()).unwrap();
        let ps = postselect_single_per_station(&bs).unwrap();
        assert!((ps.success_probability - 0.25).abs() < 1e-12);
        let expected = [[1, 0, 1, 0, 1, 0], [1, 0, 0, 1, 0, 1], [0, 1, 0, 1, 1, 0], [0, 1, 1, 0, 0, 1]];
        assert_eq!(ps.state.len(), 4);
        for occ in expected {
            let a = ps.state.amplitude(&Occupation::new(occ.to_vec()));
            assert!((a - c(0.5)).norm() < 1e-12, "{occ:?}: {a}");
        }
    }
}
