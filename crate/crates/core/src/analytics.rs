//! Closed-form secrecy outage of the correlation-based allocation.
//!
//! For a fixed main channel the outage event is `γ_E > z` with
//! `z = (γ_B + 1)/2^{R_s} - 1`. Eve's SINR is a ratio of two correlated
//! exponential variables, and both the noiseless-Eve (asymptotic) and the
//! noisy-Eve (exact) cdfs are power series in the correlation `ρ`.
//!
//! Two evaluation routes share the outer `k`-series and its truncation:
//! [`SeriesForm::Stable`] sums nonnegative terms (a binomial tail per `k` for
//! the asymptotic cdf, a negative-binomial/Poisson mixture for the exact one);
//! [`SeriesForm::Literal`] evaluates the alternating inner sums term by term
//! through [`f_difference`] and only holds up to `K ≈ 12` in double precision.

use serde::{Deserialize, Serialize};

use crate::beamformer::BeamformingBasis;
use crate::error::{Error, Result};
use crate::special::{
    bessel_i0, binomial_upper_tail, f_difference, ln_binomial, ln_factorial, SeriesControl,
};

/// Raw series values within this distance of `[0, 1]` are clamped.
const CLAMP_TOL: f64 = 1e-6;
const RHO_MAX: f64 = 1.0 - 1e-12;

/// Eve's transmit-power-to-noise ratio `μ_E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EveSnr {
    Finite(f64),
    /// Noiseless eavesdropper.
    Infinite,
}

impl EveSnr {
    pub fn from_db(db: f64) -> Self {
        if db.is_infinite() && db > 0.0 {
            EveSnr::Infinite
        } else {
            EveSnr::Finite(db_to_linear(db))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, EveSnr::Infinite)
    }

    /// `1/μ_E`, zero when Eve is noiseless.
    pub fn noise(&self) -> f64 {
        match self {
            EveSnr::Finite(mu) => 1.0 / mu,
            EveSnr::Infinite => 0.0,
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecrecyScenario {
    /// Fraction of power on the information signal.
    pub alpha: f64,
    /// Target secrecy rate in bits per channel use.
    pub rate: f64,
    pub mu_b: f64,
    pub mu_e: EveSnr,
}

impl SecrecyScenario {
    pub fn new(alpha: f64, rate: f64, mu_b: f64, mu_e: EveSnr) -> Result<Self> {
        let s = Self {
            alpha,
            rate,
            mu_b,
            mu_e,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Domain(format!("alpha = {} is outside (0, 1]", self.alpha)));
        }
        if !(self.rate > 0.0) || !self.rate.is_finite() {
            return Err(Error::Domain(format!("R_s = {} must be positive", self.rate)));
        }
        if !(self.mu_b > 0.0) || !self.mu_b.is_finite() {
            return Err(Error::Domain(format!("mu_B = {} must be positive", self.mu_b)));
        }
        if let EveSnr::Finite(mu) = self.mu_e {
            if !(mu > 0.0) || !mu.is_finite() {
                return Err(Error::Domain(format!("mu_E = {mu} must be positive")));
            }
        }
        Ok(())
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self { alpha, ..*self }
    }
}

/// `γ_B = α μ_B ‖h‖²`.
pub fn gamma_b(scenario: &SecrecyScenario, basis: &BeamformingBasis) -> f64 {
    scenario.alpha * scenario.mu_b * basis.main_gain()
}

/// Outage threshold on Eve's SINR, `(γ_B + 1)/2^{R_s} - 1`. Nonpositive
/// values mean the target rate exceeds Bob's capacity.
pub fn sinr_threshold(scenario: &SecrecyScenario, basis: &BeamformingBasis) -> f64 {
    (gamma_b(scenario, basis) + 1.0) / scenario.rate.exp2() - 1.0
}

/// Correlation coefficient of `|g v_I|²` and `|g V_N w_I|²`,
/// `|v_I† T V_N w_I|² / (v_I† T v_I · θ₁)`.
pub fn correlation_coefficient(basis: &BeamformingBasis) -> f64 {
    basis.cross_term().norm_sqr() / (basis.info_power() * basis.theta_max())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageParams {
    pub rho: f64,
    /// `σ_n² = α/2 · v_I†Tv_I`
    pub sigma_n2: f64,
    /// `σ_d² = (1-α)/2 · θ₁`
    pub sigma_d2: f64,
    /// `s_n² = μ_E σ_n²`, absent for a noiseless eavesdropper.
    pub s_n2: Option<f64>,
    pub s_d2: Option<f64>,
    pub gamma_b: f64,
    pub threshold: f64,
}

impl OutageParams {
    pub fn sigma_n(&self) -> f64 {
        self.sigma_n2.sqrt()
    }

    pub fn sigma_d(&self) -> f64 {
        self.sigma_d2.sqrt()
    }

    pub fn s_n(&self) -> Option<f64> {
        self.s_n2.map(f64::sqrt)
    }

    pub fn s_d(&self) -> Option<f64> {
        self.s_d2.map(f64::sqrt)
    }
}

/// Distribution parameters for `0 < α < 1`.
pub fn outage_params(scenario: &SecrecyScenario, basis: &BeamformingBasis) -> Result<OutageParams> {
    let a = scenario.alpha;
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Precondition(format!(
            "outage parameters need 0 < alpha < 1, got {a}"
        )));
    }
    let sigma_n2 = 0.5 * a * basis.info_power();
    let sigma_d2 = 0.5 * (1.0 - a) * basis.theta_max();
    let rho = a * (1.0 - a) * basis.cross_term().norm_sqr() / (4.0 * sigma_n2 * sigma_d2);
    let (s_n2, s_d2) = match scenario.mu_e {
        EveSnr::Finite(mu) => (Some(mu * sigma_n2), Some(mu * sigma_d2)),
        EveSnr::Infinite => (None, None),
    };
    Ok(OutageParams {
        rho,
        sigma_n2,
        sigma_d2,
        s_n2,
        s_d2,
        gamma_b: gamma_b(scenario, basis),
        threshold: sinr_threshold(scenario, basis),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SeriesForm {
    #[default]
    Stable,
    Literal,
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..=RHO_MAX).contains(&rho) {
        return Err(Error::Precondition(format!(
            "correlation coefficient {rho} must lie in [0, 1)"
        )));
    }
    Ok(())
}

fn clamp_probability(raw: f64) -> Result<f64> {
    if !raw.is_finite() || raw < -CLAMP_TOL || raw > 1.0 + CLAMP_TOL {
        return Err(Error::SeriesDivergence { raw });
    }
    Ok(raw.clamp(0.0, 1.0))
}

/// Number of outer terms and the per-`k` weight `(1-ρ)ρ^k`.
fn outer_terms(rho: f64, ctrl: &SeriesControl) -> Vec<f64> {
    let mut w = Vec::new();
    let mut pow = 1.0;
    for _ in 0..=ctrl.max_index() {
        w.push((1.0 - rho) * pow);
        pow *= rho;
        // every later term is at most its weight, and those sum to ρ^{k+1}
        if pow == 0.0 || ctrl.adaptive && pow < ctrl.tol {
            break;
        }
    }
    w
}

/// `F_{γ_E^∞}(z)`, the cdf of Eve's SINR with no receiver noise.
pub fn asymptotic_cdf(z: f64, params: &OutageParams, ctrl: SeriesControl, form: SeriesForm) -> Result<f64> {
    ctrl.validate()?;
    check_rho(params.rho)?;
    if z <= 0.0 {
        return Ok(0.0);
    }
    let c = params.sigma_n2 / params.sigma_d2;
    let raw = match form {
        SeriesForm::Stable => {
            let u = if z.is_infinite() { 1.0 } else { z / (z + c) };
            outer_terms(params.rho, &ctrl)
                .iter()
                .enumerate()
                .map(|(k, w)| w * binomial_upper_tail(2 * k as u64 + 1, k as u64 + 1, u))
                .sum()
        }
        SeriesForm::Literal => asymptotic_cdf_literal(z, params.rho, c, &ctrl),
    };
    clamp_probability(raw)
}

fn asymptotic_cdf_literal(z: f64, rho: f64, c: f64, ctrl: &SeriesControl) -> f64 {
    let mut total = 0.0;
    let kmax = outer_terms(rho, ctrl).len() - 1;
    for k in 0..=kmax {
        let ku = k as u64;
        let lead = (ln_factorial(2 * ku + 1) + k as f64 * c.ln() - 2.0 * ln_factorial(ku)).exp()
            * rho.powi(k as i32);
        let mut inner = 0.0;
        for i in 0..=k {
            let m = (2 * k + 1 - i) as i32;
            let coef = (ln_binomial(ku, i as u64) + (k - i) as f64 * c.ln()).exp();
            let sign = if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
            let bracket = (z + c).powi(-m) - c.powi(-m);
            inner += sign * coef / (-(m as f64)) * bracket;
        }
        total += lead * inner;
    }
    c * (1.0 - rho) * total
}

/// `F_{γ_E}(z)` for a noisy eavesdropper, `0 < α < 1`.
pub fn exact_cdf(z: f64, params: &OutageParams, ctrl: SeriesControl, form: SeriesForm) -> Result<f64> {
    ctrl.validate()?;
    check_rho(params.rho)?;
    let (s_n2, s_d2) = match (params.s_n2, params.s_d2) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::Precondition(
                "the exact cdf needs a finite mu_E".into(),
            ))
        }
    };
    if z <= 0.0 {
        return Ok(0.0);
    }
    let raw = match form {
        SeriesForm::Stable => exact_cdf_stable(z, params.rho, s_n2, s_d2, &ctrl),
        SeriesForm::Literal => exact_cdf_literal(z, params.rho, s_n2, s_d2, &ctrl)?,
    };
    clamp_probability(raw)
}

fn exact_cdf_stable(z: f64, rho: f64, s_n2: f64, s_d2: f64, ctrl: &SeriesControl) -> f64 {
    let weights = outer_terms(rho, ctrl);
    if z.is_infinite() {
        return weights.iter().sum();
    }
    let kmax = weights.len() - 1;
    let theta_x = 2.0 * s_n2 * (1.0 - rho);
    let theta_y = 2.0 * s_d2 * (1.0 - rho);
    let beta = z / theta_x;
    let x = beta * theta_y / (1.0 + beta * theta_y);
    let ln_beta = beta.ln();
    // Poisson(β) cdf at 0..=kmax, built in the log domain
    let mut pois_cdf = Vec::with_capacity(kmax + 1);
    let mut acc = 0.0;
    for j in 0..=kmax {
        acc += (j as f64 * ln_beta - beta - ln_factorial(j as u64)).exp();
        pois_cdf.push(acc.min(1.0));
    }
    let ln_1mx = (-x).ln_1p();
    let mut total = 0.0;
    for (k, w) in weights.iter().enumerate() {
        // NB(l; k+1, x) = C(k+l, l) x^l (1-x)^{k+1}
        let mut nb = ((k + 1) as f64 * ln_1mx).exp();
        let mut tail = 0.0;
        for l in 0..=k {
            tail += nb * pois_cdf[k - l];
            nb *= x * (k + l + 1) as f64 / (l + 1) as f64;
        }
        total += w * (1.0 - tail.min(1.0));
    }
    total
}

fn exact_cdf_literal(z: f64, rho: f64, s_n2: f64, s_d2: f64, ctrl: &SeriesControl) -> Result<f64> {
    let kmax = outer_terms(rho, ctrl).len() - 1;
    let one_m = 1.0 - rho;
    let c = s_n2 / s_d2;
    let p = 1.0 / (2.0 * one_m * s_n2);
    let two_sn = 2.0 * one_m * s_n2;
    let mut total = 0.0;
    for k in 0..=kmax {
        let ku = k as u64;
        let lead = rho.powi(k as i32) * one_m.powi(-(k as i32))
            / (2f64.powi(k as i32) * (2.0 * ln_factorial(ku)).exp() * s_d2.powi(k as i32));
        for i in 0..=k {
            let si = if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
            let ci = (ln_binomial(ku, i as u64)).exp() * si;
            for j in 0..=(k + i + 1) {
                let cj = (ln_factorial((k + i + 1) as u64) - ln_factorial(j as u64)).exp()
                    * two_sn.powi(-(j as i32 - i as i32 - 2));
                for m in 0..=k {
                    let cm = ln_binomial(ku, m as u64).exp() * (-c).powi((k - m) as i32);
                    let n = (k + i + 1) as i64 - j as i64 - m as i64;
                    let d = f_difference(n, p, c, z + c)?;
                    total += lead * ci * cj * cm * d;
                }
            }
        }
    }
    Ok((1.0 / (2.0 * one_m * s_d2)).exp() / (4.0 * s_n2 * s_d2 * one_m) * total)
}

/// Secrecy outage with a noiseless eavesdropper.
pub fn asymptotic_outage(scenario: &SecrecyScenario, basis: &BeamformingBasis, ctrl: SeriesControl) -> Result<f64> {
    asymptotic_outage_with(scenario, basis, ctrl, SeriesForm::Stable)
}

pub fn asymptotic_outage_with(
    scenario: &SecrecyScenario,
    basis: &BeamformingBasis,
    ctrl: SeriesControl,
    form: SeriesForm,
) -> Result<f64> {
    scenario.validate()?;
    let z = sinr_threshold(scenario, basis);
    if z <= 0.0 || scenario.alpha >= 1.0 {
        return Ok(1.0);
    }
    let params = outage_params(&SecrecyScenario { mu_e: EveSnr::Infinite, ..*scenario }, basis)?;
    Ok(1.0 - asymptotic_cdf(z, &params, ctrl, form)?)
}

/// Secrecy outage with finite `μ_E`, including the `α = 1` closed form.
pub fn exact_outage(scenario: &SecrecyScenario, basis: &BeamformingBasis, ctrl: SeriesControl) -> Result<f64> {
    exact_outage_with(scenario, basis, ctrl, SeriesForm::Stable)
}

pub fn exact_outage_with(
    scenario: &SecrecyScenario,
    basis: &BeamformingBasis,
    ctrl: SeriesControl,
    form: SeriesForm,
) -> Result<f64> {
    scenario.validate()?;
    let mu_e = match scenario.mu_e {
        EveSnr::Finite(mu) => mu,
        EveSnr::Infinite => {
            return Err(Error::Precondition(
                "exact outage needs a finite mu_E; use the asymptotic evaluator".into(),
            ))
        }
    };
    let z = sinr_threshold(scenario, basis);
    if z <= 0.0 {
        return Ok(1.0);
    }
    if scenario.alpha >= 1.0 {
        return Ok(no_noise_outage(z, mu_e, basis));
    }
    let params = outage_params(scenario, basis)?;
    Ok(1.0 - exact_cdf(z, &params, ctrl, form)?)
}

/// `α = 1`: `exp(-z / (μ_E v_I† T v_I))`.
pub fn no_noise_outage(z: f64, mu_e: f64, basis: &BeamformingBasis) -> f64 {
    if z <= 0.0 {
        1.0
    } else {
        (-z / (mu_e * basis.info_power())).exp()
    }
}

/// Outage for whichever regime the scenario describes.
pub fn outage(scenario: &SecrecyScenario, basis: &BeamformingBasis, ctrl: SeriesControl) -> Result<f64> {
    match scenario.mu_e {
        EveSnr::Infinite => asymptotic_outage(scenario, basis, ctrl),
        EveSnr::Finite(_) => exact_outage(scenario, basis, ctrl),
    }
}

/// Joint density of `(χ_n, χ_d)` at `(x, y)`. For the noisy variables pass
/// `s_n²`, `s_d²` in place of `σ_n²`, `σ_d²` and shift `y` by one.
pub fn joint_pdf(x: f64, y: f64, rho: f64, var_n: f64, var_d: f64, ctrl: SeriesControl) -> Result<f64> {
    check_rho(rho)?;
    if x < 0.0 || y < 0.0 {
        return Ok(0.0);
    }
    let one_m = 1.0 - rho;
    let expo = -(x / var_n + y / var_d) / (2.0 * one_m);
    let arg = rho.sqrt() / one_m * (x * y).sqrt() / (var_n * var_d).sqrt();
    let scale = 1.0 / (4.0 * var_n * var_d * one_m);
    if arg > 300.0 {
        // I0 alone would overflow; fold its growth into the exponent
        let ln_i0 = arg - 0.5 * (2.0 * std::f64::consts::PI * arg).ln()
            + (1.0 + 1.0 / (8.0 * arg) + 9.0 / (128.0 * arg * arg)).ln();
        return Ok(scale * (expo + ln_i0).exp());
    }
    Ok(scale * expo.exp() * bessel_i0(arg, ctrl)?)
}

/// Density of `γ_E^∞`: `σ_n²(1-ρ)/σ_d² Σ_k (2k+1)! c^k ρ^k/(k!)² · z^k/(z+c)^{2k+2}`.
pub fn asymptotic_pdf(z: f64, params: &OutageParams, ctrl: SeriesControl) -> Result<f64> {
    check_rho(params.rho)?;
    if z < 0.0 {
        return Ok(0.0);
    }
    let c = params.sigma_n2 / params.sigma_d2;
    let rho = params.rho;
    let mut sum = 0.0;
    for k in 0..=ctrl.max_index() {
        let ku = k as u64;
        let ln_term = ln_factorial(2 * ku + 1) - 2.0 * ln_factorial(ku)
            + k as f64 * (c * z).ln()
            - (2 * k + 2) as f64 * (z + c).ln();
        let term = if k == 0 {
            1.0 / (z + c).powi(2)
        } else {
            rho.powi(k as i32) * ln_term.exp()
        };
        sum += term;
        if ctrl.converged(term, sum) || rho == 0.0 {
            break;
        }
    }
    Ok(c * (1.0 - rho) * sum)
}
