//! Multi-start projected gradient ascent over classical ring parameters.
//!
//! The search space is the box `[0, 1]^(2n + 1)` of coordinates
//! `[gamma, p_zero..., q_zero...]`. Each restart draws an interior start from
//! its own ChaCha stream `(seed, restart index)`, so results are
//! bit-reproducible regardless of how restarts are scheduled across threads.

use std::cell::RefCell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::classical::{classical_distribution, classical_probs_into, ClassicalParams, Feasibility};
use crate::error::{Error, Result};
use crate::outcome::{check_parties, Bitstring, OutcomeDistribution};
use crate::witness::pair_sums;

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Default feasibility threshold on the L2 residual.
pub const DEFAULT_FEASIBILITY_TOLERANCE: f64 = 1e-6;

/// Largest party count for the exact support certificate.
pub const MAX_CERTIFICATE_PARTIES: usize = 7;

/// Grid oracle evaluation budget.
pub const GRID_BUDGET: u64 = 1_000_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct AscentOptions {
    pub max_iterations: usize,
    /// Stop once the projected gradient is shorter than this.
    pub gradient_tolerance: f64,
    /// Central finite-difference step.
    pub fd_step: f64,
    /// Starts are drawn uniformly from `[lo, hi]` in every coordinate.
    pub start_range: (f64, f64),
    /// Sufficient-increase constant for backtracking.
    pub armijo: f64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self { max_iterations: 10_000, gradient_tolerance: 1e-8, fd_step: 1e-6, start_range: (0.01, 0.99), armijo: 1e-4 }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct LocalAscent {
    x: Vec<f64>,
    value: f64,
    iterations: usize,
    converged: bool,
}

fn project(x: &mut [f64]) {
    x.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
}

fn fd_gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], h: f64, grad: &mut [f64]) {
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let up = f(&probe);
        probe[i] = x[i] - h;
        let down = f(&probe);
        probe[i] = x[i];
        grad[i] = (up - down) / (2.0 * h);
    }
}

/// Projected gradient ascent with backtracking from `x0`.
fn ascend<F: Fn(&[f64]) -> f64>(f: &F, mut x: Vec<f64>, opts: &AscentOptions) -> LocalAscent {
    project(&mut x);
    let dim = x.len();
    let mut fx = f(&x);
    let mut grad = vec![0.0; dim];
    let mut cand = vec![0.0; dim];
    let mut step = 1.0;
    for iteration in 0..opts.max_iterations {
        fd_gradient(f, &x, opts.fd_step, &mut grad);
        let pg_norm = x
            .iter()
            .zip(&grad)
            .map(|(xi, gi)| {
                let d = (xi + gi).clamp(0.0, 1.0) - xi;
                d * d
            })
            .sum::<f64>()
            .sqrt();
        if pg_norm < opts.gradient_tolerance {
            return LocalAscent { x, value: fx, iterations: iteration, converged: true };
        }
        let mut t = step;
        loop {
            for i in 0..dim {
                cand[i] = (x[i] + t * grad[i]).clamp(0.0, 1.0);
            }
            let rise: f64 = (0..dim).map(|i| grad[i] * (cand[i] - x[i])).sum();
            let fc = f(&cand);
            if rise > 0.0 && fc >= fx + opts.armijo * rise {
                std::mem::swap(&mut x, &mut cand);
                fx = fc;
                step = (2.0 * t).min(1e6);
                break;
            }
            t *= 0.5;
            if t < 1e-14 {
                return LocalAscent { x, value: fx, iterations: iteration + 1, converged: false };
            }
        }
    }
    LocalAscent { x, value: fx, iterations: opts.max_iterations, converged: false }
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

fn random_start(rng: &mut ChaCha8Rng, dim: usize, (lo, hi): (f64, f64)) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(lo..=hi)).collect()
}

/// Signed witness `even - odd` of the two-product mixture at coordinates
/// `[gamma, p_zero..., q_zero...]`, in `O(n)`.
///
/// With `D = sum (-1)^|s| p(s)` and `W = sum (-1)^|s| p(s)^2`, the signed
/// pair difference is `(D - W) / 2` because `sum p = 1`. Both sums factor
/// over parties for product distributions.
pub fn signed_classical_cn(parties: usize, x: &[f64]) -> f64 {
    let gamma = x[0];
    let (p, q) = (&x[1..=parties], &x[parties + 1..]);
    let (mut bias_p, mut bias_q, mut overlap) = (1.0, 1.0, 1.0);
    for j in 0..parties {
        bias_p *= 2.0 * p[j] - 1.0;
        bias_q *= 2.0 * q[j] - 1.0;
        overlap *= p[j] * q[j] - (1.0 - p[j]) * (1.0 - q[j]);
    }
    let g = 1.0 - gamma;
    let d = gamma * bias_p + g * bias_q;
    let w = gamma * gamma * bias_p + 2.0 * gamma * g * overlap + g * g * bias_q;
    0.5 * (d - w)
}

/// Outcome of [`maximize_classical_cn`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundResult {
    pub parties: usize,
    pub best_value: f64,
    pub best_params: ClassicalParams,
    pub restarts: usize,
    pub iterations_total: u64,
    pub converged_fraction: f64,
    pub seed: u64,
}

/// Numerically maximize `C_n` over the classical model with default options.
pub fn maximize_classical_cn(parties: usize, restarts: usize, seed: u64) -> Result<BoundResult> {
    maximize_classical_cn_with(parties, restarts, seed, &AscentOptions::default())
}

pub fn maximize_classical_cn_with(
    parties: usize,
    restarts: usize,
    seed: u64,
    opts: &AscentOptions,
) -> Result<BoundResult> {
    if parties < 2 {
        return Err(Error::TooFewParties(parties));
    }
    check_parties(parties)?;
    if restarts == 0 {
        return Err(Error::InvalidParams("at least one restart is required".into()));
    }
    let dim = 2 * parties + 1;

    // The absolute value has a kink where even and odd pair sums cross, so
    // each start ascends the signed objective in both orientations.
    let runs: Vec<(LocalAscent, u64)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = restart_rng(seed, r);
            let x0 = random_start(&mut rng, dim, opts.start_range);
            let up = ascend(&|x: &[f64]| signed_classical_cn(parties, x), x0.clone(), opts);
            let down = ascend(&|x: &[f64]| -signed_classical_cn(parties, x), x0, opts);
            let iterations = (up.iterations + down.iterations) as u64;
            (if down.value > up.value { down } else { up }, iterations)
        })
        .collect();

    let mut best = 0;
    for (i, (run, _)) in runs.iter().enumerate() {
        if run.value > runs[best].0.value {
            best = i;
        }
    }
    let converged = runs.iter().filter(|(r, _)| r.converged).count();
    let best_run = &runs[best].0;
    Ok(BoundResult {
        parties,
        best_value: best_run.value,
        best_params: ClassicalParams::from_vector(parties, &best_run.x)?,
        restarts,
        iterations_total: runs.iter().map(|(_, it)| it).sum(),
        converged_fraction: converged as f64 / restarts as f64,
        seed,
    })
}

/// Exhaustive maximum of `C_n` over the uniform grid `{0, 1/(r-1), ..., 1}`
/// in every coordinate, evaluated through the full outcome distribution.
///
/// The grid maximum is a certified lower bound on the true maximum.
pub fn grid_oracle_cn(parties: usize, resolution: usize) -> Result<f64> {
    if !(2..=3).contains(&parties) {
        return Err(Error::BudgetExceeded(format!("grid oracle supports 2 or 3 parties, got {parties}")));
    }
    if resolution < 2 {
        return Err(Error::InvalidParams(format!("resolution must be at least 2, got {resolution}")));
    }
    let dim = 2 * parties + 1;
    let points = (resolution as u64).checked_pow(dim as u32).filter(|&p| p <= GRID_BUDGET).ok_or_else(|| {
        Error::BudgetExceeded(format!("{resolution}^{dim} grid points exceed the budget of {GRID_BUDGET}"))
    })?;
    let axis: Vec<f64> = (0..resolution).map(|k| k as f64 / (resolution - 1) as f64).collect();
    let inner = points / resolution as u64;

    let best = (0..resolution)
        .into_par_iter()
        .map(|g| {
            let mut x = vec![0.0; dim];
            let mut buf = Vec::with_capacity(1 << parties);
            let mut digits = vec![0usize; dim - 1];
            let mut best = f64::NEG_INFINITY;
            x[0] = axis[g];
            for _ in 0..inner {
                for (slot, &d) in x[1..].iter_mut().zip(&digits) {
                    *slot = axis[d];
                }
                classical_probs_into(parties, &x, &mut buf);
                let (even, odd) = pair_sums(&buf);
                best = best.max((even - odd).abs());
                for d in digits.iter_mut() {
                    *d += 1;
                    if *d < resolution {
                        break;
                    }
                    *d = 0;
                }
            }
            best
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(best)
}

/// Product set `S_1 x ... x S_n` written as a pattern over `{0, 1, *}`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct ProductSet {
    pattern: Vec<Option<u8>>,
    mask: u128,
}

impl ProductSet {
    fn to_pattern_string(&self) -> String {
        self.pattern.iter().map(|c| c.map_or('*', |b| (b'0' + b) as char)).collect()
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportVerdict {
    /// The support is not a union of two product sets: no classical
    /// distribution has it.
    Excluded,
    /// A two-product cover exists; the support alone rules nothing out.
    Consistent,
}

/// Exact test of the support structure of a target distribution.
///
/// Every classical distribution is supported on the union of at most two
/// product sets (one per routing branch). If no two product sets inside the
/// target's support cover it, the target cannot be classical.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupportCertificate {
    pub verdict: SupportVerdict,
    pub support_size: usize,
    /// Largest number of support points covered by two product sets
    /// contained in the support.
    pub max_two_product_cover: usize,
    /// A best cover, as patterns over `{0, 1, *}`.
    pub cover: Vec<String>,
}

pub fn support_certificate(target: &OutcomeDistribution) -> Result<SupportCertificate> {
    let n = target.parties();
    if n > MAX_CERTIFICATE_PARTIES {
        return Err(Error::BudgetExceeded(format!(
            "support certificate supports at most {MAX_CERTIFICATE_PARTIES} parties, got {n}"
        )));
    }
    let support: u128 = target.support().iter().fold(0, |m, b| m | 1u128 << b.index());
    let support_size = support.count_ones() as usize;

    let mut inside = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        let pattern: Vec<Option<u8>> = (0..n)
            .map(|_| {
                let digit = c % 3;
                c /= 3;
                match digit {
                    0 => Some(0),
                    1 => Some(1),
                    _ => None,
                }
            })
            .collect();
        let mask = Bitstring::all(n)
            .filter(|b| pattern.iter().enumerate().all(|(j, s)| s.is_none_or(|v| v == b.bit(j))))
            .fold(0u128, |m, b| m | 1u128 << b.index());
        if mask & !support == 0 {
            inside.push(ProductSet { pattern, mask });
        }
    }

    let mut best: (usize, Vec<String>) = (0, Vec::new());
    for (i, a) in inside.iter().enumerate() {
        for b in &inside[i..] {
            let covered = (a.mask | b.mask).count_ones() as usize;
            if covered > best.0 {
                let union = a.mask | b.mask;
                let cover = if union == a.mask {
                    vec![a.to_pattern_string()]
                } else if union == b.mask {
                    vec![b.to_pattern_string()]
                } else {
                    vec![a.to_pattern_string(), b.to_pattern_string()]
                };
                best = (covered, cover);
            }
        }
    }
    Ok(SupportCertificate {
        verdict: if best.0 == support_size { SupportVerdict::Consistent } else { SupportVerdict::Excluded },
        support_size,
        max_two_product_cover: best.0,
        cover: best.1,
    })
}

/// Outcome of [`decompose_as_classical`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionResult {
    pub feasible: bool,
    /// Certifying parameters, present exactly when `feasible`.
    pub params: Option<ClassicalParams>,
    /// L2 distance between the target and the closest classical fit found.
    pub residual: f64,
    pub closest: ClassicalParams,
    pub tolerance: f64,
    /// Exact support test, for party counts where it is tractable.
    pub support_certificate: Option<SupportCertificate>,
    pub restarts: usize,
    pub seed: u64,
}

/// Structured starting points: the product of the target's marginals and,
/// for supports of at most two outcomes, the exact two-point mixture.
fn seeded_candidates(target: &OutcomeDistribution) -> Vec<Vec<f64>> {
    let n = target.parties();
    let mut marginal = vec![0.0; n];
    for (b, p) in target.iter() {
        for (j, m) in marginal.iter_mut().enumerate() {
            if b.bit(j) == 0 {
                *m += p;
            }
        }
    }
    let marginal: Vec<f64> = marginal.into_iter().map(|m| m.clamp(0.0, 1.0)).collect();
    let mut out = vec![[vec![1.0], marginal.clone(), marginal].concat()];

    let support = target.support();
    if support.len() <= 2 {
        let first = support[0];
        let second = *support.last().unwrap();
        let zeros = |b: Bitstring| (0..n).map(|j| 1.0 - b.bit(j) as f64).collect::<Vec<_>>();
        out.push([vec![target.prob(first)], zeros(first), zeros(second)].concat());
    }
    out
}

/// Find classical parameters reproducing `target`, minimizing the squared L2
/// distance with the same projected ascent machinery.
pub fn decompose_as_classical(
    target: &OutcomeDistribution,
    restarts: usize,
    seed: u64,
    tol: f64,
) -> Result<DecompositionResult> {
    decompose_as_classical_with(target, restarts, seed, tol, &AscentOptions::default())
}

pub fn decompose_as_classical_with(
    target: &OutcomeDistribution,
    restarts: usize,
    seed: u64,
    tol: f64,
    opts: &AscentOptions,
) -> Result<DecompositionResult> {
    let n = target.parties();
    let dim = 2 * n + 1;
    let probs = target.probs();
    let objective = |buf: &RefCell<Vec<f64>>, x: &[f64]| -> f64 {
        let mut buf = buf.borrow_mut();
        classical_probs_into(n, x, &mut buf);
        -buf.iter().zip(probs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
    };

    let seeded = seeded_candidates(target);
    let runs: Vec<LocalAscent> = (0..seeded.len() + restarts)
        .into_par_iter()
        .map(|k| {
            let x0 = match seeded.get(k) {
                Some(x) => x.clone(),
                None => random_start(&mut restart_rng(seed, k - seeded.len()), dim, opts.start_range),
            };
            let buf = RefCell::new(Vec::with_capacity(1 << n));
            ascend(&|x: &[f64]| objective(&buf, x), x0, opts)
        })
        .collect();

    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.value > runs[best].value {
            best = i;
        }
    }
    let closest = ClassicalParams::from_vector(n, &runs[best].x)?;
    let residual = classical_distribution(&closest).l2_distance(target);
    let feasible = residual < tol;
    let support_certificate = if n <= MAX_CERTIFICATE_PARTIES { Some(support_certificate(target)?) } else { None };
    Ok(DecompositionResult {
        feasible,
        params: feasible.then(|| closest.clone()),
        residual,
        closest,
        tolerance: tol,
        support_certificate,
        restarts,
        seed,
    })
}

impl DecompositionResult {
    /// Combined verdict: feasible by fit, or excluded by the exact
    /// certificate, or neither.
    pub fn verdict(&self) -> Option<Feasibility> {
        if self.feasible {
            Some(Feasibility::Feasible)
        } else if self.support_certificate.as_ref().is_some_and(|c| c.verdict == SupportVerdict::Excluded) {
            Some(Feasibility::Infeasible)
        } else {
            None
        }
    }
}
