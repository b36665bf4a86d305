//! Monte Carlo estimates of secrecy outage and artificial-noise statistics.
//!
//! Trial `k` draws Eve's whitened channel from stream `base_stream + k`, so
//! every allocation and every `α` evaluated against the same configuration
//! sees the same channels. Trials are processed in fixed-size chunks whose
//! results are combined in chunk order; the outcome does not depend on the
//! number of worker threads.
//!
//! Only sufficient statistics are kept per trial: `|g v_I|²` and either the
//! interference `g V_N Ω V_N† g†` of one allocation ([`EveDraws`]) or the
//! per-direction gains `|(g V_N W)_m|²` ([`EveComponents`]).

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analytics::{sinr_threshold, EveSnr, SecrecyScenario};
use crate::beamformer::{effective_gains, BeamformingBasis};
use crate::channel::{random_main_channel, sample_whitened, StreamFactory, EVE_BLOCK};
use crate::correlation::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::linalg::{norm_sqr, row_dot, CVector};
use crate::optimizer::{optimize_alpha, AlphaSearch, Evaluator, EvaluatorKind, Strategy};
use crate::power_allocation::{AllocationKind, OpaOptions, PowerAllocation};
use crate::special::SeriesControl;

const CHUNK: usize = 4096;
pub const MIN_REPORTED_TRIALS: usize = 1_000;
pub const MIN_H_REALIZATIONS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    /// Eve draws per estimate.
    pub trials: usize,
    /// Main-channel draws for averaged experiments.
    pub h_realizations: usize,
    pub seed: u64,
    /// Worker threads; zero uses the ambient rayon pool.
    pub workers: usize,
    /// Stream id of trial zero.
    pub base_stream: u64,
}

impl MonteCarloConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            h_realizations: 1,
            seed,
            workers: 0,
            base_stream: 0,
        }
    }

    pub fn with_h_realizations(mut self, n: usize) -> Self {
        self.h_realizations = n;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < MIN_REPORTED_TRIALS {
            return Err(Error::Budget {
                trials: self.trials,
                min: MIN_REPORTED_TRIALS,
            });
        }
        if self.h_realizations == 0 {
            return Err(Error::Validation("h_realizations must be positive".into()));
        }
        Ok(())
    }

    /// Runs `f` on a pool with `workers` threads.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        if self.workers == 0 {
            return f();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(self.workers).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageResult {
    pub estimate: f64,
    pub standard_error: f64,
    pub trials: usize,
    pub fingerprint: String,
    pub alpha_star: Option<f64>,
    pub min_outage: Option<f64>,
}

impl OutageResult {
    pub fn from_count(hits: usize, trials: usize, fingerprint: String) -> Self {
        let p = hits as f64 / trials as f64;
        Self {
            estimate: p,
            standard_error: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
            fingerprint,
            alpha_star: None,
            min_outage: None,
        }
    }

    /// Outage certain by construction (no sampling needed).
    pub fn certain(fingerprint: String) -> Self {
        Self {
            estimate: 1.0,
            standard_error: 0.0,
            trials: 0,
            fingerprint,
            alpha_star: None,
            min_outage: None,
        }
    }

    pub fn exact(value: f64, fingerprint: String) -> Self {
        Self {
            estimate: value,
            standard_error: 0.0,
            trials: 0,
            fingerprint,
            alpha_star: None,
            min_outage: None,
        }
    }
}

/// First 16 hex digits of the SHA-256 of the JSON encoding of `value`.
pub fn fingerprint<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).unwrap_or_default();
    let digest = Sha256::digest(&bytes);
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn vector_pairs(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn estimate_fingerprint(
    scenario: &SecrecyScenario,
    basis: &BeamformingBasis,
    phi: &[f64],
    trials: usize,
    seed: u64,
    base_stream: u64,
) -> String {
    fingerprint(&serde_json::json!({
        "scenario": scenario,
        "h": vector_pairs(basis.h()),
        "theta": basis.theta().as_slice(),
        "info_power": basis.info_power(),
        "phi": phi,
        "trials": trials,
        "seed": seed,
        "base_stream": base_stream,
    }))
}

/// Runs `f` over fixed chunks of `0..trials` and returns the per-chunk
/// results in chunk order.
fn chunked<T, F>(trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| f(c * CHUNK..((c + 1) * CHUNK).min(trials)))
        .collect()
}

/// Whether a trial is in outage: `α|a|² > z ((1-α)/(N_t-1) · I + 1/μ_E)`.
/// A vanishing denominator means unbounded SINR and counts as outage.
#[inline]
fn in_outage(a2: f64, interference: f64, alpha: f64, z: f64, n_null: f64, noise: f64) -> bool {
    let denom = (1.0 - alpha) / n_null * interference + noise;
    if denom <= 0.0 {
        return true;
    }
    alpha * a2 > z * denom
}

/// Eve's SINR through the full covariance: `α|g v_I|² / ((1-α)/(N_t-1) · g V_N Ω V_N† g† + 1/μ_E)`.
pub fn sinr_eve(
    g: &CVector,
    basis: &BeamformingBasis,
    alloc: &PowerAllocation,
    scenario: &SecrecyScenario,
) -> Result<f64> {
    let (a, b) = effective_gains(g, basis)?;
    let omega = alloc.omega(basis);
    let quad = (b.transpose() * omega * b.conjugate())[(0, 0)].re;
    Ok(sinr_from_parts(a.norm_sqr(), quad, basis.dim(), scenario))
}

/// Correlation-based allocation: `α|g v_I|² / ((1-α)|g V_N w_I|² + 1/μ_E)`.
pub fn sinr_eve_cpa(g: &CVector, basis: &BeamformingBasis, scenario: &SecrecyScenario) -> Result<f64> {
    let (a, b) = effective_gains(g, basis)?;
    let bw = row_dot(&b, &basis.w_i()).norm_sqr();
    let denom = (1.0 - scenario.alpha) * bw + scenario.mu_e.noise();
    Ok(ratio(scenario.alpha * a.norm_sqr(), denom))
}

/// Uniform allocation: `α|g v_I|² / ((1-α)/(N_t-1) ‖g V_N‖² + 1/μ_E)`.
pub fn sinr_eve_upa(g: &CVector, basis: &BeamformingBasis, scenario: &SecrecyScenario) -> Result<f64> {
    let (a, b) = effective_gains(g, basis)?;
    Ok(sinr_from_parts(a.norm_sqr(), norm_sqr(&b), basis.dim(), scenario))
}

fn sinr_from_parts(a2: f64, interference: f64, n_t: usize, scenario: &SecrecyScenario) -> f64 {
    let denom =
        (1.0 - scenario.alpha) / (n_t - 1) as f64 * interference + scenario.mu_e.noise();
    ratio(scenario.alpha * a2, denom)
}

fn ratio(num: f64, denom: f64) -> f64 {
    if denom <= 0.0 {
        f64::INFINITY
    } else {
        num / denom
    }
}

/// Frozen Eve draws reduced to `(|g v_I|², g V_N Ω V_N† g†)` for one allocation.
#[derive(Debug, Clone)]
pub struct EveDraws {
    a2: Vec<f64>,
    interference: Vec<f64>,
    phi: Vec<f64>,
    seed: u64,
    base_stream: u64,
}

impl EveDraws {
    pub fn draw(
        basis: &BeamformingBasis,
        alloc: &PowerAllocation,
        trials: usize,
        seed: u64,
        base_stream: u64,
    ) -> Self {
        let factory = StreamFactory::new(seed);
        let n = basis.dim();
        let tap = basis.info_tap();
        let taps = basis.noise_taps();
        let principal: CVector = taps.column(0).into_owned();
        let lambda = basis.spectrum();
        let kind = alloc.kind();
        let phi = alloc.phi().to_vec();
        let parts = chunked(trials, |range| {
            let mut a2 = Vec::with_capacity(range.len());
            let mut inter = Vec::with_capacity(range.len());
            for k in range {
                let g_s = sample_whitened(&mut factory.source(base_stream + k as u64), n);
                let a = row_dot(&g_s, tap).norm_sqr();
                let i = match kind {
                    AllocationKind::Cpa => (n - 1) as f64 * row_dot(&g_s, &principal).norm_sqr(),
                    AllocationKind::Upa => {
                        // ‖g V_N‖² = ‖g‖² - |g v_I|²
                        let g2: f64 = g_s
                            .iter()
                            .zip(lambda.iter())
                            .map(|(z, l)| l * z.norm_sqr())
                            .sum();
                        (g2 - a).max(0.0)
                    }
                    _ => (0..n - 1)
                        .filter(|&m| phi[m] != 0.0)
                        .map(|m| phi[m] * row_dot(&g_s, &taps.column(m).into_owned()).norm_sqr())
                        .sum(),
                };
                a2.push(a);
                inter.push(i);
            }
            (a2, inter)
        });
        let mut a2 = Vec::with_capacity(trials);
        let mut interference = Vec::with_capacity(trials);
        for (a, i) in parts {
            a2.extend(a);
            interference.extend(i);
        }
        Self {
            a2,
            interference,
            phi,
            seed,
            base_stream,
        }
    }

    pub fn trials(&self) -> usize {
        self.a2.len()
    }

    pub fn interference(&self) -> &[f64] {
        &self.interference
    }

    pub fn info_gain(&self) -> &[f64] {
        &self.a2
    }

    pub fn outage_count(&self, scenario: &SecrecyScenario, basis: &BeamformingBasis) -> usize {
        let z = sinr_threshold(scenario, basis);
        if z <= 0.0 {
            return self.trials();
        }
        let n_null = (basis.dim() - 1) as f64;
        let noise = scenario.mu_e.noise();
        let alpha = scenario.alpha;
        chunked(self.trials(), |r| {
            r.filter(|&k| in_outage(self.a2[k], self.interference[k], alpha, z, n_null, noise))
                .count()
        })
        .into_iter()
        .sum()
    }

    pub fn estimate(&self, scenario: &SecrecyScenario, basis: &BeamformingBasis) -> OutageResult {
        let fp = estimate_fingerprint(scenario, basis, &self.phi, self.trials(), self.seed, self.base_stream);
        if sinr_threshold(scenario, basis) <= 0.0 {
            return OutageResult::certain(fp);
        }
        OutageResult::from_count(self.outage_count(scenario, basis), self.trials(), fp)
    }
}

/// Frozen Eve draws kept as `|g v_I|²` and `|(g V_N W)_m|²` for every `m`.
#[derive(Debug, Clone)]
pub struct EveComponents {
    dirs: usize,
    a2: Vec<f64>,
    c: Vec<f64>,
    seed: u64,
    base_stream: u64,
}

impl EveComponents {
    pub fn draw(basis: &BeamformingBasis, trials: usize, seed: u64, base_stream: u64) -> Self {
        let factory = StreamFactory::new(seed);
        let n = basis.dim();
        let dirs = n - 1;
        let tap = basis.info_tap();
        let taps = basis.noise_taps();
        let parts = chunked(trials, |range| {
            let mut a2 = Vec::with_capacity(range.len());
            let mut c = Vec::with_capacity(range.len() * dirs);
            for k in range {
                let g_s = sample_whitened(&mut factory.source(base_stream + k as u64), n);
                a2.push(row_dot(&g_s, tap).norm_sqr());
                for m in 0..dirs {
                    let mut acc = num_complex::Complex64::new(0.0, 0.0);
                    for i in 0..n {
                        acc += g_s[i] * taps[(i, m)];
                    }
                    c.push(acc.norm_sqr());
                }
            }
            (a2, c)
        });
        let mut a2 = Vec::with_capacity(trials);
        let mut c = Vec::with_capacity(trials * dirs);
        for (a, cc) in parts {
            a2.extend(a);
            c.extend(cc);
        }
        Self {
            dirs,
            a2,
            c,
            seed,
            base_stream,
        }
    }

    pub fn trials(&self) -> usize {
        self.a2.len()
    }

    pub fn info_gain(&self) -> &[f64] {
        &self.a2
    }

    /// `|(g V_N W)_m|²` of trial `k`.
    pub fn component(&self, k: usize, m: usize) -> f64 {
        self.c[k * self.dirs + m]
    }

    /// `Σ_m φ_m |(g V_N W)_m|²` for every trial.
    pub fn interference(&self, phi: &[f64]) -> Vec<f64> {
        (0..self.trials())
            .map(|k| self.weighted(k, phi))
            .collect()
    }

    #[inline]
    fn weighted(&self, k: usize, phi: &[f64]) -> f64 {
        let row = &self.c[k * self.dirs..(k + 1) * self.dirs];
        row.iter().zip(phi).map(|(c, p)| c * p).sum()
    }

    pub fn outage_count(&self, scenario: &SecrecyScenario, basis: &BeamformingBasis, phi: &[f64]) -> usize {
        let z = sinr_threshold(scenario, basis);
        if z <= 0.0 {
            return self.trials();
        }
        let n_null = self.dirs as f64;
        let noise = scenario.mu_e.noise();
        let alpha = scenario.alpha;
        chunked(self.trials(), |r| {
            r.filter(|&k| in_outage(self.a2[k], self.weighted(k, phi), alpha, z, n_null, noise))
                .count()
        })
        .into_iter()
        .sum()
    }

    pub fn result_from_count(&self, count: usize, scenario: &SecrecyScenario, basis: &BeamformingBasis) -> OutageResult {
        let fp = estimate_fingerprint(scenario, basis, &[], self.trials(), self.seed, self.base_stream);
        if sinr_threshold(scenario, basis) <= 0.0 {
            return OutageResult::certain(fp);
        }
        OutageResult::from_count(count, self.trials(), fp)
    }
}

/// Outage `Pr(γ_E > (γ_B + 1)/2^{R_s} - 1)` for a fixed main channel.
pub fn estimate_outage(
    scenario: &SecrecyScenario,
    basis: &BeamformingBasis,
    alloc: &PowerAllocation,
    mc: &MonteCarloConfig,
) -> Result<OutageResult> {
    scenario.validate()?;
    mc.validate()?;
    if sinr_threshold(scenario, basis) <= 0.0 {
        let fp = estimate_fingerprint(scenario, basis, alloc.phi(), mc.trials, mc.seed, mc.base_stream);
        return Ok(OutageResult::certain(fp));
    }
    let draws = mc.install(|| EveDraws::draw(basis, alloc, mc.trials, mc.seed, mc.base_stream));
    Ok(mc.install(|| draws.estimate(scenario, basis)))
}

/// Sample mean and standard error of `g V_N Ω V_N† g†`.
pub fn estimate_mean_interference(
    basis: &BeamformingBasis,
    alloc: &PowerAllocation,
    mc: &MonteCarloConfig,
) -> Result<(f64, f64)> {
    mc.validate()?;
    let draws = mc.install(|| EveDraws::draw(basis, alloc, mc.trials, mc.seed, mc.base_stream));
    Ok(mean_and_se(draws.interference()))
}

pub fn mean_and_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let (s, s2) = chunked(x.len(), |r| {
        r.fold((0.0, 0.0), |(a, b), k| (a + x[k], b + x[k] * x[k]))
    })
    .into_iter()
    .fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let mean = s / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// Pearson correlation of `|g v_I|²` and `|g V_N w_I|²` over `mc.trials`
/// draws, with a batch-means standard error over `batches` batches.
pub fn empirical_correlation(basis: &BeamformingBasis, mc: &MonteCarloConfig, batches: usize) -> Result<(f64, f64)> {
    mc.validate()?;
    let comps = mc.install(|| EveComponents::draw(basis, mc.trials, mc.seed, mc.base_stream));
    let x = comps.info_gain();
    let y: Vec<f64> = (0..comps.trials()).map(|k| comps.component(k, 0)).collect();
    let r = pearson(x, &y);
    let size = comps.trials() / batches.max(2);
    let rs: Vec<f64> = (0..batches.max(2))
        .map(|b| pearson(&x[b * size..(b + 1) * size], &y[b * size..(b + 1) * size]))
        .collect();
    let (_, batch_se) = mean_and_se(&rs);
    Ok((r, batch_se))
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Template for averaging the minimum outage over main-channel draws.
#[derive(Debug, Clone)]
pub struct AverageSpec {
    pub corr: CorrelationMatrix,
    /// `α` is ignored; it is optimized per draw.
    pub template: SecrecyScenario,
    pub allocation: AllocationKind,
    /// Closed forms apply to the correlation-based allocation only.
    pub evaluator: EvaluatorKind,
    pub opa: OpaOptions,
    pub search: AlphaSearch,
    pub series: SeriesControl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawOutcome {
    pub alpha_star: Option<f64>,
    pub outage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageOutage {
    pub result: OutageResult,
    pub per_draw: Vec<DrawOutcome>,
}

/// Mean over main-channel draws of the minimum (over `α`) outage.
///
/// Monte Carlo evaluation of draw `j` uses Eve stream block `j`. Draw `j` of the main channel is the
/// same for every allocation sharing a seed.
pub fn estimate_average_outage(spec: &AverageSpec, mc: &MonteCarloConfig) -> Result<AverageOutage> {
    mc.validate()?;
    spec.template.validate()?;
    if mc.h_realizations < MIN_H_REALIZATIONS {
        return Err(Error::Budget {
            trials: mc.h_realizations,
            min: MIN_H_REALIZATIONS,
        });
    }
    let factory = StreamFactory::new(mc.seed);
    let per_draw: Vec<Result<DrawOutcome>> = mc.install(|| {
        (0..mc.h_realizations)
            .into_par_iter()
            .map(|j| {
                let ch = random_main_channel(&factory, j as u64, &spec.corr)?;
                let basis = BeamformingBasis::new(&ch.h, &spec.corr)?;
                let evaluator = match spec.evaluator {
                    EvaluatorKind::Analytic => Evaluator::Analytic(spec.series),
                    EvaluatorKind::MonteCarlo => Evaluator::MonteCarlo(MonteCarloConfig {
                        base_stream: j as u64 * EVE_BLOCK,
                        workers: 0,
                        ..mc.clone()
                    }),
                };
                let strategy = match spec.allocation {
                    AllocationKind::Cpa => Strategy::Fixed(crate::power_allocation::cpa(&basis)),
                    AllocationKind::Upa => Strategy::Fixed(crate::power_allocation::upa(basis.dim())?),
                    AllocationKind::Opa => Strategy::Searched(spec.opa),
                    AllocationKind::Custom => {
                        return Err(Error::Validation(
                            "averaged experiments take cpa, upa or opa".into(),
                        ))
                    }
                };
                let opt = optimize_alpha(&spec.template, &basis, &strategy, &evaluator, &spec.search)?;
                Ok(DrawOutcome {
                    alpha_star: opt.alpha_star,
                    outage: opt.outage.estimate,
                })
            })
            .collect()
    });
    let per_draw: Vec<DrawOutcome> = per_draw.into_iter().collect::<Result<_>>()?;
    let values: Vec<f64> = per_draw.iter().map(|d| d.outage).collect();
    let (mean, se) = mean_and_se(&values);
    let fp = fingerprint(&serde_json::json!({
        "corr": spec.corr.entries().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "template": spec.template,
        "allocation": spec.allocation,
        "evaluator": spec.evaluator,
        "opa": spec.opa,
        "search": spec.search,
        "series": spec.series.truncation,
        "adaptive_tol": spec.series.adaptive.then_some(spec.series.tol),
        "mc": mc,
    }));
    Ok(AverageOutage {
        result: OutageResult {
            estimate: mean,
            standard_error: se,
            trials: mc.trials,
            fingerprint: fp,
            alpha_star: None,
            min_outage: Some(mean),
        },
        per_draw,
    })
}

/// Eve's SNR regime of a scenario, as a label.
pub fn regime_label(mu_e: &EveSnr) -> &'static str {
    if mu_e.is_infinite() {
        "asymptotic"
    } else {
        "exact"
    }
}
