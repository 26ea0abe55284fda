//! EM parsimonization.
//!
//! An observed distribution is modelled as a two-component mixture
//! `λ·P_specific + (1-λ)·P_background`. EM recovers the specific component,
//! which concentrates on items that the background explains poorly. After
//! every M-step, items below the prune threshold are dropped.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::dist::SparseDistribution;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParsimonyConfig {
    /// Weight of the specific model, in `(0, 1]`. Lower is sparser; 1 disables
    /// parsimonization.
    pub lambda: f64,
    pub prune_threshold: f64,
    pub max_iterations: usize,
    /// Stop once no probability moves by more than this between iterations.
    pub convergence_tol: f64,
}

impl Default for ParsimonyConfig {
    fn default() -> Self {
        ParsimonyConfig {
            lambda: 1.0,
            prune_threshold: 1e-4,
            max_iterations: 50,
            convergence_tol: 1e-6,
        }
    }
}

impl ParsimonyConfig {
    pub fn with_lambda(self, lambda: f64) -> Self {
        ParsimonyConfig { lambda, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(Error::InvalidConfig(alloc::format!(
                "lambda must lie in (0, 1], got {}",
                self.lambda
            )));
        }
        if !(self.prune_threshold >= 0.0 && self.prune_threshold < 1.0) {
            return Err(Error::InvalidConfig(alloc::format!(
                "prune threshold must lie in [0, 1), got {}",
                self.prune_threshold
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "max_iterations must be positive".into(),
            ));
        }
        if !(self.convergence_tol >= 0.0) {
            return Err(Error::InvalidConfig(
                "convergence_tol must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Extracts the specific distribution hidden in `mass` given `background`.
///
/// `mass` holds nonnegative weights per item (term counts, or model
/// probabilities standing in for counts). The result starts from the
/// maximum-likelihood estimate `mass / Σ mass` and runs EM until
/// `max_iterations` or convergence. With `λ = 1` the maximum-likelihood
/// estimate is returned untouched, without pruning.
///
/// Every item of `mass` must have positive background probability when
/// `λ < 1`; smoothing the background is the caller's job.
pub fn parsimonize(
    mass: &[(usize, f64)],
    background: &SparseDistribution,
    config: &ParsimonyConfig,
) -> Result<SparseDistribution> {
    config.validate()?;
    if mass.iter().any(|&(_, m)| !(m >= 0.0) || !m.is_finite()) {
        return Err(Error::InvalidConfig(
            "mass entries must be finite and nonnegative".into(),
        ));
    }
    let initial = SparseDistribution::from_weights(mass.iter().copied()).ok_or(Error::EmptyMass)?;
    if config.lambda == 1.0 {
        return Ok(initial);
    }

    let lambda = config.lambda;
    let mut merged: Vec<(usize, f64)> = mass.iter().copied().filter(|&(_, m)| m > 0.0).collect();
    merged.sort_by_key(|&(id, _)| id);
    merged.dedup_by(|next, kept| {
        if next.0 == kept.0 {
            kept.1 += next.1;
            true
        } else {
            false
        }
    });

    let mut ids: Vec<usize> = Vec::with_capacity(initial.len());
    let mut weight: Vec<f64> = Vec::with_capacity(initial.len());
    let mut bg: Vec<f64> = Vec::with_capacity(initial.len());
    let mut p: Vec<f64> = Vec::with_capacity(initial.len());
    for ((id, prob), (_, m)) in initial.iter().zip(merged) {
        let b = background.get(id);
        if b <= 0.0 {
            return Err(Error::ZeroBackground(id));
        }
        ids.push(id);
        weight.push(m);
        bg.push((1.0 - lambda) * b);
        p.push(prob);
    }

    let mut e = alloc::vec![0.0; ids.len()];
    for _ in 0..config.max_iterations {
        // E-step
        let mut total = 0.0;
        for i in 0..ids.len() {
            let specific = lambda * p[i];
            e[i] = weight[i] * specific / (specific + bg[i]);
            total += e[i];
        }
        if !(total > 0.0) {
            return Err(Error::PrunedToEmpty);
        }
        // M-step, then prune and renormalize
        let mut kept = 0.0;
        for x in e.iter_mut() {
            *x /= total;
            if *x < config.prune_threshold {
                *x = 0.0;
            }
            kept += *x;
        }
        if !(kept > 0.0) {
            return Err(Error::PrunedToEmpty);
        }
        let mut delta: f64 = 0.0;
        for i in 0..ids.len() {
            let next = e[i] / kept;
            delta = delta.max(libm::fabs(next - p[i]));
            p[i] = next;
        }
        if delta < config.convergence_tol {
            break;
        }
    }

    SparseDistribution::from_weights(ids.into_iter().zip(p)).ok_or(Error::PrunedToEmpty)
}

/// Normalized sum of the given distributions.
pub fn average_background(distributions: &[SparseDistribution]) -> Result<SparseDistribution> {
    smoothed_background(distributions, 0.0)
}

/// Normalized sum of the given distributions with `epsilon` added to every
/// item that appears in any of their supports.
pub fn smoothed_background(
    distributions: &[SparseDistribution],
    epsilon: f64,
) -> Result<SparseDistribution> {
    let bound = distributions
        .iter()
        .map(SparseDistribution::domain_bound)
        .max()
        .ok_or(Error::EmptyMass)?;
    let mut sum = alloc::vec![0.0; bound];
    let mut present = alloc::vec![false; bound];
    for d in distributions {
        for (id, p) in d.iter() {
            sum[id] += p;
            present[id] = true;
        }
    }
    SparseDistribution::from_weights(
        sum.into_iter()
            .zip(present)
            .enumerate()
            .map(|(id, (s, seen))| (id, if seen { s + epsilon } else { s })),
    )
    .ok_or(Error::EmptyMass)
}
