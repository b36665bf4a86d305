//! Artificial-noise covariance shapes over the null space.
//!
//! An allocation is a spectrum `φ` over the eigenvectors `W` of
//! `Q = V_N† T V_N`, with `Ω = W diag(φ) W†` and `Σφ = N_t - 1`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::SecrecyScenario;
use crate::beamformer::BeamformingBasis;
use crate::error::{Error, Result};
use crate::linalg::{diag_real, CMatrix};
use crate::montecarlo::{EveComponents, MonteCarloConfig, OutageResult};

const SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AllocationKind {
    Cpa,
    Upa,
    Opa,
    Custom,
}

impl AllocationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AllocationKind::Cpa => "cpa",
            AllocationKind::Upa => "upa",
            AllocationKind::Opa => "opa",
            AllocationKind::Custom => "custom",
        }
    }
}

impl fmt::Display for AllocationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AllocationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cpa" => Ok(AllocationKind::Cpa),
            "upa" => Ok(AllocationKind::Upa),
            "opa" => Ok(AllocationKind::Opa),
            "custom" => Ok(AllocationKind::Custom),
            other => Err(Error::Validation(format!(
                "unknown allocation '{other}' (expected cpa, upa, opa or custom)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerAllocation {
    kind: AllocationKind,
    phi: Vec<f64>,
}

impl PowerAllocation {
    pub fn kind(&self) -> AllocationKind {
        self.kind
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    /// `Ω = W diag(φ) W†`.
    pub fn omega(&self, basis: &BeamformingBasis) -> CMatrix {
        let w = basis.w();
        w * diag_real(&self.phi) * w.adjoint()
    }

    fn validate(phi: &[f64], n_t: usize) -> Result<()> {
        if phi.len() + 1 != n_t {
            return Err(Error::DimensionMismatch {
                expected: n_t - 1,
                found: phi.len(),
            });
        }
        if phi.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::Validation("every phi entry must be finite and nonnegative".into()));
        }
        let sum: f64 = phi.iter().sum();
        if (sum - (n_t - 1) as f64).abs() > SUM_TOL {
            return Err(Error::Validation(format!(
                "phi sums to {sum}, expected N_t - 1 = {}",
                n_t - 1
            )));
        }
        Ok(())
    }
}

/// All artificial noise on the principal direction `w_I`.
pub fn cpa(basis: &BeamformingBasis) -> PowerAllocation {
    let n = basis.dim();
    let mut phi = vec![0.0; n - 1];
    phi[0] = (n - 1) as f64;
    PowerAllocation {
        kind: AllocationKind::Cpa,
        phi,
    }
}

/// Isotropic artificial noise, `Ω = I`.
pub fn upa(n_t: usize) -> Result<PowerAllocation> {
    if n_t < 2 {
        return Err(Error::NoNullSpace);
    }
    Ok(PowerAllocation {
        kind: AllocationKind::Upa,
        phi: vec![1.0; n_t - 1],
    })
}

pub fn custom(phi: Vec<f64>, n_t: usize) -> Result<PowerAllocation> {
    PowerAllocation::validate(&phi, n_t)?;
    Ok(PowerAllocation {
        kind: AllocationKind::Custom,
        phi,
    })
}

/// `Σ φ_m θ_m`, the mean artificial-noise power seen by Eve.
pub fn mean_interference(alloc: &PowerAllocation, basis: &BeamformingBasis) -> f64 {
    alloc
        .phi
        .iter()
        .zip(basis.theta().iter())
        .map(|(p, t)| p * t)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpaOptions {
    /// Largest `N_t` accepted.
    pub max_antennas: usize,
    pub min_trials: usize,
}

impl Default for OpaOptions {
    fn default() -> Self {
        Self {
            max_antennas: 6,
            min_trials: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpaResult {
    pub allocation: PowerAllocation,
    pub outage: OutageResult,
    /// Objective evaluations spent by the search.
    pub evaluations: usize,
}

/// Simplex search for the spectrum minimizing the Monte Carlo outage at a
/// fixed `α`, over one frozen set of Eve draws.
pub fn opa_search(
    basis: &BeamformingBasis,
    scenario: &SecrecyScenario,
    mc: &MonteCarloConfig,
    opts: OpaOptions,
) -> Result<OpaResult> {
    opa_preconditions(basis.dim(), mc.trials, &opts)?;
    let samples = EveComponents::draw(basis, mc.trials, mc.seed, mc.base_stream);
    opa_search_frozen(basis, scenario, &samples)
}

pub fn opa_preconditions(n_t: usize, trials: usize, opts: &OpaOptions) -> Result<()> {
    if n_t > opts.max_antennas {
        return Err(Error::UnsupportedDimension {
            n: n_t,
            cap: opts.max_antennas,
        });
    }
    if trials < opts.min_trials {
        return Err(Error::Budget {
            trials,
            min: opts.min_trials,
        });
    }
    Ok(())
}

/// [`opa_search`] over caller-supplied draws, so that several `α` values
/// can share them.
pub fn opa_search_frozen(
    basis: &BeamformingBasis,
    scenario: &SecrecyScenario,
    samples: &EveComponents,
) -> Result<OpaResult> {
    let n = basis.dim();
    let m = n - 1;
    let total = m as f64;
    let objective = |phi: &[f64]| samples.outage_count(scenario, basis, phi);
    let mut evaluations = 0usize;

    let mut best: Option<(Vec<f64>, usize)> = None;
    for start in [cpa(basis).phi, upa(n)?.phi] {
        let (phi, count, evals) = compass(start, total, &objective);
        evaluations += evals;
        // strict improvement needed to displace the earlier start
        if best.as_ref().map_or(true, |(_, c)| count < *c) {
            best = Some((phi, count));
        }
    }
    let (phi, count) = best.expect("two starts evaluated");
    let outage = samples.result_from_count(count, scenario, basis);
    Ok(OpaResult {
        allocation: PowerAllocation {
            kind: AllocationKind::Opa,
            phi,
        },
        outage,
        evaluations,
    })
}

fn project(mut phi: Vec<f64>, total: f64) -> Vec<f64> {
    for x in phi.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let s: f64 = phi.iter().sum();
    phi.iter_mut().for_each(|x| *x *= total / s);
    phi
}

fn compass<F>(start: Vec<f64>, total: f64, objective: &F) -> (Vec<f64>, usize, usize)
where
    F: Fn(&[f64]) -> usize + Sync,
{
    let m = start.len();
    let mut phi = start;
    let mut value = objective(&phi);
    let mut evals = 1;
    if m < 2 {
        return (phi, value, evals);
    }
    let mut step = 0.25 * total;
    let stop = 1e-3 * total;
    let moves: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    while step >= stop {
        let candidates: Vec<Vec<f64>> = moves
            .iter()
            .filter(|&&(_, j)| phi[j] > 0.0)
            .map(|&(i, j)| {
                let mut c = phi.clone();
                c[i] += step;
                c[j] -= step;
                project(c, total)
            })
            .collect();
        let values: Vec<usize> = candidates.par_iter().map(|c| objective(c)).collect();
        evals += values.len();
        let winner = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v < value)
            .min_by_key(|(i, &v)| (v, *i));
        match winner {
            Some((i, &v)) => {
                phi = candidates[i].clone();
                value = v;
            }
            None => step *= 0.5,
        }
    }
    (phi, value, evals)
}

/// Hermitian PSD matrix with trace `trace` from a Gram product.
pub fn random_psd(
    dim: usize,
    trace: f64,
    src: &mut crate::channel::RandomSource,
) -> CMatrix {
    let a = CMatrix::from_fn(dim, dim, |_, _| src.complex_normal());
    let g = &a * a.adjoint();
    let tr: f64 = (0..dim).map(|i| g[(i, i)].re).sum();
    (&g + g.adjoint()) * Complex64::new(0.5 * trace / tr, 0.0)
}
