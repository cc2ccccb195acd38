//! Shape of the classical correlation set.
//!
//! Two facts together rule out any linear witness separating classical from
//! quantum ring statistics: every vertex of the probability simplex is
//! classical, and the classical set is not convex. A linear functional
//! bounded on the classical set is then bounded by the same value on every
//! vertex, hence on the whole simplex.

use serde::Serialize;

use crate::classical::{classical_distribution, ClassicalParams};
use crate::error::{Error, Result};
use crate::optimizer::{
    decompose_as_classical, support_certificate, DecompositionResult, SupportCertificate, SupportVerdict,
    DEFAULT_SEED, MAX_CERTIFICATE_PARTIES,
};
use crate::outcome::{check_parties, Bitstring, OutcomeDistribution};

/// Residual below which the endpoints of a convexity witness count as
/// classical.
pub const ENDPOINT_TOLERANCE: f64 = 1e-9;

/// Residual above which the optimizer corroborates a non-classical midpoint.
pub const MIDPOINT_SEPARATION: f64 = 1e-3;

/// Deterministic responses reproducing the point mass on `outcome`:
/// `gamma = 1`, party `j` answers `outcome_j` with certainty.
pub fn vertex_membership(outcome: Bitstring) -> ClassicalParams {
    let zeros: Vec<f64> = outcome.bits().iter().map(|&b| 1.0 - b as f64).collect();
    ClassicalParams::new(1.0, zeros.clone(), zeros).expect("deterministic responses are valid")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VertexCertificate {
    pub outcome: Bitstring,
    pub params: ClassicalParams,
    pub residual: f64,
}

pub fn vertex_certificates(parties: usize) -> Result<Vec<VertexCertificate>> {
    check_parties(parties)?;
    Ok(Bitstring::all(parties)
        .map(|outcome| {
            let params = vertex_membership(outcome);
            let residual = classical_distribution(&params).l2_distance(&OutcomeDistribution::point_mass(outcome));
            VertexCertificate { outcome, params, residual }
        })
        .collect())
}

/// Two classical distributions whose mixture is not classical.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvexityWitness {
    pub q1: OutcomeDistribution,
    pub q1_params: ClassicalParams,
    pub q2: OutcomeDistribution,
    pub q2_params: ClassicalParams,
    pub lambda: f64,
    pub midpoint: OutcomeDistribution,
    pub midpoint_result: DecompositionResult,
    /// Exact support test of the midpoint (absent beyond
    /// [`MAX_CERTIFICATE_PARTIES`]).
    pub midpoint_certificate: Option<SupportCertificate>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessOptions {
    pub lambda: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        Self { lambda: 0.5, restarts: 64, seed: DEFAULT_SEED }
    }
}

/// The four even outcomes used by the witness: `0...0`, `011 0...0`,
/// `101 0...0`, `110 0...0`.
fn witness_outcomes(parties: usize) -> Result<[Bitstring; 4]> {
    let pad = |head: [u8; 3]| {
        let mut bits = head.to_vec();
        bits.resize(parties, 0);
        Bitstring::from_bits(&bits)
    };
    Ok([pad([0, 0, 0])?, pad([0, 1, 1])?, pad([1, 0, 1])?, pad([1, 1, 0])?])
}

fn two_point(a: Bitstring, b: Bitstring) -> Result<(OutcomeDistribution, ClassicalParams)> {
    let dist = OutcomeDistribution::uniform_over(&[a, b])?;
    let zeros = |s: Bitstring| s.bits().iter().map(|&x| 1.0 - x as f64).collect::<Vec<_>>();
    let params = ClassicalParams::new(0.5, zeros(a), zeros(b))?;
    Ok((dist, params))
}

pub fn nonconvexity_witness(parties: usize) -> Result<ConvexityWitness> {
    nonconvexity_witness_with(parties, &WitnessOptions::default())
}

/// `q1 = (d_000 + d_011)/2`, `q2 = (d_101 + d_110)/2` (padded with zeros);
/// at `lambda = 1/2` the mixture is uniform on four even outcomes.
pub fn nonconvexity_witness_with(parties: usize, opts: &WitnessOptions) -> Result<ConvexityWitness> {
    if parties < 3 {
        return Err(Error::Unsupported(format!(
            "no non-convexity witness for {parties} parties: every two-party even-parity distribution is classical"
        )));
    }
    if !(opts.lambda > 0.0 && opts.lambda < 1.0) {
        return Err(Error::InvalidParams(format!("lambda = {} must lie strictly between 0 and 1", opts.lambda)));
    }
    let [e0, e1, e2, e3] = witness_outcomes(parties)?;
    let (q1, q1_params) = two_point(e0, e1)?;
    let (q2, q2_params) = two_point(e2, e3)?;
    let midpoint = OutcomeDistribution::mix(&q1, &q2, opts.lambda)?;
    let midpoint_result =
        decompose_as_classical(&midpoint, opts.restarts, opts.seed, crate::optimizer::DEFAULT_FEASIBILITY_TOLERANCE)?;
    let midpoint_certificate =
        if parties <= MAX_CERTIFICATE_PARTIES { Some(support_certificate(&midpoint)?) } else { None };
    Ok(ConvexityWitness { q1, q1_params, q2, q2_params, lambda: opts.lambda, midpoint, midpoint_result, midpoint_certificate })
}

impl ConvexityWitness {
    /// Re-derive every claim from scratch.
    pub fn verify(&self) -> bool {
        let endpoints = classical_distribution(&self.q1_params).l2_distance(&self.q1) < ENDPOINT_TOLERANCE
            && classical_distribution(&self.q2_params).l2_distance(&self.q2) < ENDPOINT_TOLERANCE;
        let mix = OutcomeDistribution::mix(&self.q1, &self.q2, self.lambda);
        let midpoint_exact = mix.as_ref().is_ok_and(|m| *m == self.midpoint);
        let certificate = match support_certificate(&self.midpoint) {
            Ok(c) => c.verdict == SupportVerdict::Excluded,
            // too large for the exact test: rely on the optimizer alone
            Err(_) => self.midpoint_certificate.is_none(),
        };
        endpoints
            && midpoint_exact
            && certificate
            && !self.midpoint_result.feasible
            && self.midpoint_result.residual > MIDPOINT_SEPARATION
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum NonconvexitySection {
    Verified { witness: Box<ConvexityWitness> },
    Inapplicable { reason: String },
}

/// Aggregated certificates for the absence of a linear separating witness.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperplaneReport {
    pub parties: usize,
    pub vertices_classical: bool,
    pub vertices: Vec<VertexCertificate>,
    pub nonconvexity: NonconvexitySection,
    pub conclusion: String,
}

pub fn no_separating_hyperplane_report(parties: usize) -> Result<HyperplaneReport> {
    if parties < 2 {
        return Err(Error::TooFewParties(parties));
    }
    let vertices = vertex_certificates(parties)?;
    let vertices_classical = vertices.iter().all(|v| v.residual == 0.0);
    let nonconvexity = if parties >= 3 {
        NonconvexitySection::Verified { witness: Box::new(nonconvexity_witness(parties)?) }
    } else {
        NonconvexitySection::Inapplicable {
            reason: "two-party classical networks reproduce the quantum statistics".into(),
        }
    };
    let witnessed = matches!(&nonconvexity, NonconvexitySection::Verified { witness } if witness.verify());
    let conclusion = match (vertices_classical, witnessed) {
        (true, true) => format!(
            "all {} vertices are classical and the classical set is non-convex: any linear functional bounded on \
             the classical set is bounded on the whole simplex, so no hyperplane separates it",
            vertices.len()
        ),
        (true, false) => format!(
            "all {} vertices are classical; no non-convexity witness at this party count",
            vertices.len()
        ),
        _ => "vertex certificates failed".into(),
    };
    Ok(HyperplaneReport { parties, vertices_classical, vertices, nonconvexity, conclusion })
}
