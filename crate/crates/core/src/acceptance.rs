//! Acceptance suite.
//!
//! Each criterion runs at its stated budget and tolerance and reports an
//! [`Outcome`]. Set `ANLAB_QUICK=1` to run the averaged-over-`h` checks at
//! the reduced budget with widened tolerances.

use std::time::Instant;

use anlab_oracle::ks::{ks_critical_value, ks_two_sample};
use anlab_oracle::quad::integrate;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::Exp1;

use crate::analytics::{
    asymptotic_cdf, asymptotic_outage, correlation_coefficient, db_to_linear, exact_cdf, exact_outage, no_noise_outage,
    outage_params, sinr_threshold, EveSnr, SecrecyScenario, SeriesForm,
};
use crate::beamformer::{effective_gains, BeamformingBasis};
use crate::channel::{correlate, fixed_main_channel_with, sample_whitened, RandomSource, StreamFactory};
use crate::correlation::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::experiments::scenario::{build_correlation, channel_vector};
use crate::experiments::{bundled, run_scenario, RunOptions, Scenario, BUNDLED};
use crate::linalg::{diag_real, hermitian_eigen, CMatrix};
use crate::montecarlo::{
    empirical_correlation, estimate_average_outage, estimate_mean_interference, estimate_outage, mean_and_se,
    AverageSpec, EveComponents, MonteCarloConfig,
};
use crate::optimizer::{optimize_alpha, AlphaSearch, Evaluator, EvaluatorKind, Strategy};
use crate::power_allocation::{cpa, custom, mean_interference, opa_search, upa, AllocationKind, OpaOptions};
use crate::special::{f_difference, SeriesControl};

/// Criteria that fail at their stated tolerance; see the project notes.
pub const KNOWN_RED: &[&str] = &["7"];

const SEED: u64 = 20_160_601;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn known_red(&self) -> bool {
        KNOWN_RED.contains(&self.id)
    }

    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        format!(
            "criterion {:<3} {status}  {} ({:.1} s): {}",
            self.id, self.title, self.seconds, self.detail
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Mode {
    pub quick: bool,
}

impl Mode {
    pub fn from_env() -> Self {
        Self {
            quick: std::env::var("ANLAB_QUICK").is_ok_and(|v| v == "1"),
        }
    }

    fn pick<T>(&self, full: T, quick: T) -> T {
        if self.quick {
            quick
        } else {
            full
        }
    }
}

type Check = fn(Mode) -> Result<(bool, String)>;

const CRITERIA: &[(&str, &str, Check)] = &[
    ("1", "closed forms match Monte Carlo", analytic_vs_mc),
    ("2", "interference identities", interference_identities),
    ("3", "CPA maximizes mean interference", cpa_dominance),
    ("4", "covariance equivalent to its matched spectrum", spectrum_equivalence),
    ("5", "antiderivative difference equals the integral", antiderivative_contract),
    ("6", "alpha = 1 closed form", full_power_closed_form),
    ("7", "K = 15 truncation within 1e-6 of K = 30", truncation),
    ("8a", "exact outage approaches asymptotic", exact_to_asymptotic),
    ("8b", "CPA close to OPA at N_t = 4", cpa_close_to_opa),
    ("8c", "averaged CPA vs UPA ordering flips with correlation", averaged_ordering),
    ("8d", "UPA saturates in N_t while CPA keeps improving", antenna_scaling),
    ("9", "cdf validity and correlation coefficient", cdf_and_rho),
    ("10", "reproducible CSV independent of workers", reproducibility),
];

/// Ids of every criterion, in order.
pub fn ids() -> Vec<&'static str> {
    CRITERIA.iter().map(|c| c.0).collect()
}

/// Runs criterion `id`. An error inside a check counts as a failure.
pub fn run(id: &str, mode: Mode) -> Option<Outcome> {
    let &(id, title, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let started = Instant::now();
    let (passed, detail) = check(mode).unwrap_or_else(|e| (false, format!("error: {e}")));
    Some(Outcome {
        id,
        title,
        passed,
        detail,
        seconds: started.elapsed().as_secs_f64(),
    })
}

pub fn run_all(mode: Mode) -> Vec<Outcome> {
    ids().into_iter().filter_map(|id| run(id, mode)).collect()
}

fn figure(name: &str) -> Result<Scenario> {
    bundled(name).ok_or_else(|| Error::Scenario(format!("missing bundled scenario {name}")))
}

/// Correlation and basis of a fixed-channel scenario.
fn fixed_basis(s: &Scenario, rho_r: Option<f64>) -> Result<(CorrelationMatrix, BeamformingBasis)> {
    let f = &s.file;
    let corr = build_correlation(&f.correlation, f.system.n_t, rho_r)?;
    let spec = f.channel.as_ref().ok_or_else(|| Error::Scenario("scenario has no fixed channel".into()))?;
    let h = fixed_main_channel_with(channel_vector(spec), &corr, spec.root)?.h;
    Ok((corr.clone(), BeamformingBasis::new(&h, &corr)?))
}

fn draws(trials: usize, seed: u64, base_stream: u64) -> MonteCarloConfig {
    MonteCarloConfig {
        base_stream,
        ..MonteCarloConfig::new(trials, seed)
    }
}

/// Unit-diagonal Gram matrix of a complex Gaussian square matrix.
fn random_correlation(n: usize, src: &mut RandomSource) -> Result<CorrelationMatrix> {
    let a = CMatrix::from_fn(n, n, |_, _| src.complex_normal());
    let g = &a * a.adjoint() + CMatrix::identity(n, n) * Complex64::new(0.1, 0.0);
    let t = CMatrix::from_fn(n, n, |i, j| g[(i, j)] / (g[(i, i)].re * g[(j, j)].re).sqrt());
    CorrelationMatrix::from_explicit((&t + t.adjoint()) * Complex64::new(0.5, 0.0))
}

fn random_case(n: usize, src: &mut RandomSource) -> Result<(CorrelationMatrix, BeamformingBasis)> {
    let corr = random_correlation(n, src)?;
    let h = correlate(&sample_whitened(src, n), &corr)?;
    let basis = BeamformingBasis::new(&h, &corr)?;
    Ok((corr, basis))
}

fn fig2_scenario(alpha: f64, mu_e: EveSnr) -> Result<SecrecyScenario> {
    let s = figure("fig2")?;
    SecrecyScenario::new(alpha, s.file.system.rate, db_to_linear(s.file.system.mu_b_db), mu_e)
}

fn analytic_vs_mc(_: Mode) -> Result<(bool, String)> {
    let (_, basis) = fixed_basis(&figure("fig2")?, None)?;
    let alloc = cpa(&basis);
    let ctrl = SeriesControl::fixed(15);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for (r, mu_e) in [EveSnr::Infinite, EveSnr::from_db(5.0)].into_iter().enumerate() {
        for i in 0..10 {
            let alpha = 0.30 + 0.07 * i as f64;
            let sc = fig2_scenario(alpha, mu_e)?;
            let p = match mu_e {
                EveSnr::Infinite => asymptotic_outage(&sc, &basis, ctrl)?,
                EveSnr::Finite(_) => exact_outage(&sc, &basis, ctrl)?,
            };
            let mc = draws(1_000_000, SEED, (r * 10 + i) as u64 * 1_000_000);
            let est = estimate_outage(&sc, &basis, &alloc, &mc)?;
            worst = worst.max((p - est.estimate).abs() / est.standard_error);
            checked += 1;
        }
    }
    Ok((worst < 3.0, format!("{checked} points, worst |closed form - MC| = {worst:.2} SE")))
}

fn interference_identities(_: Mode) -> Result<(bool, String)> {
    let factory = StreamFactory::new(SEED);
    let mut worst: f64 = 0.0;
    for i in 0..10u64 {
        let n = 2 + (i % 7) as usize;
        let (_, basis) = random_case(n, &mut factory.source(i))?;
        let theta = basis.theta();
        let expected = [(n - 1) as f64 * theta[0], theta.iter().sum::<f64>()];
        let allocs = [cpa(&basis), upa(n)?];
        for (j, (alloc, want)) in allocs.iter().zip(expected).enumerate() {
            let mc = draws(1_000_000, SEED + 1, (2 * i + j as u64) * 1_000_000);
            let (mean, se) = estimate_mean_interference(&basis, alloc, &mc)?;
            worst = worst.max((mean - want).abs() / se);
        }
    }
    Ok((worst < 3.0, format!("10 channels, CPA and UPA, worst deviation {worst:.2} SE")))
}

fn cpa_dominance(_: Mode) -> Result<(bool, String)> {
    let factory = StreamFactory::new(SEED + 2);
    let mut src = factory.source(0);
    let mut worst = f64::NEG_INFINITY;
    for case in 0..10 {
        let n = 3 + case % 6;
        let (_, basis) = random_case(n, &mut src)?;
        let top = mean_interference(&cpa(&basis), &basis);
        for _ in 0..100 {
            let e: Vec<f64> = (0..n - 1).map(|_| src.rng().sample::<f64, _>(Exp1)).collect();
            let s: f64 = e.iter().sum();
            let phi: Vec<f64> = e.iter().map(|x| x * (n - 1) as f64 / s).collect();
            let other = mean_interference(&custom(phi, n)?, &basis);
            worst = worst.max((other - top) / top);
        }
    }
    Ok((
        worst <= 1e-12,
        format!("1000 spectra, largest relative excess over CPA {worst:.2e}"),
    ))
}

fn hermitian_sqrt(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let root: Vec<f64> = vals.iter().map(|v| v.max(0.0).sqrt()).collect();
    &vecs * diag_real(&root) * vecs.adjoint()
}

fn spectrum_equivalence(_: Mode) -> Result<(bool, String)> {
    const TRIALS: usize = 100_000;
    const CASES: usize = 20;
    let factory = StreamFactory::new(SEED + 3);
    // family-wise 1% over all cases
    let crit = ks_critical_value(0.01 / CASES as f64, TRIALS, TRIALS);
    let mut worst: f64 = 0.0;
    for i in 0..CASES {
        let n = 3 + i % 4;
        let mut src = factory.source(i as u64);
        let (corr, basis) = random_case(n, &mut src)?;
        let omega = crate::power_allocation::random_psd(n - 1, (n - 1) as f64, &mut src);
        let root = hermitian_sqrt(basis.q());
        let (mu, _) = hermitian_eigen(&(&root * &omega * &root));
        let phi: Vec<f64> = mu.iter().zip(basis.theta().iter()).map(|(m, t)| m / t).collect();

        let eve = StreamFactory::new(SEED + 4);
        let direct: Vec<f64> = (0..TRIALS)
            .map(|k| {
                let g = correlate(&sample_whitened(&mut eve.source((i * TRIALS + k) as u64), n), &corr)?;
                let (_, b) = effective_gains(&g, &basis)?;
                Ok((b.transpose() * &omega * b.conjugate())[(0, 0)].re)
            })
            .collect::<Result<_>>()?;
        let matched = EveComponents::draw(&basis, TRIALS, SEED + 5, (i * TRIALS) as u64).interference(&phi);
        worst = worst.max(ks_two_sample(&direct, &matched));
    }
    Ok((
        worst < crit,
        format!("{CASES} covariances, largest KS distance {worst:.4} vs critical {crit:.4}"),
    ))
}

fn antiderivative_contract(_: Mode) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for n in -6i64..=6 {
        for p in [0.1, 1.0, 10.0] {
            for (a, b) in [(0.1, 1.0), (1.0, 5.0)] {
                let q = integrate(|y: f64| y.powi(-(n as i32) - 1) * (-p * y).exp(), a, b, 1e-14);
                let d = f_difference(n, p, a, b)?;
                worst = worst.max((d - q).abs() / q.abs());
            }
        }
    }
    Ok((worst < 1e-8, format!("78 cases, worst relative error {worst:.2e}")))
}

fn full_power_closed_form(_: Mode) -> Result<(bool, String)> {
    let factory = StreamFactory::new(SEED + 6);
    let mut src = factory.source(0);
    let mut worst: f64 = 0.0;
    let mut found = 0;
    let mut attempts = 0;
    while found < 5 {
        attempts += 1;
        if attempts > 200 {
            return Err(Error::Precondition("no informative alpha = 1 scenario found".into()));
        }
        let n = 2 + src.rng().random_range(0..5usize);
        let (_, basis) = random_case(n, &mut src)?;
        let mu_b = db_to_linear(src.rng().random_range(5.0..15.0));
        let mu_e = db_to_linear(src.rng().random_range(0.0..10.0));
        let sc = SecrecyScenario::new(1.0, 1.0, mu_b, EveSnr::Finite(mu_e))?;
        let p = no_noise_outage(sinr_threshold(&sc, &basis), mu_e, &basis);
        if !(0.02..=0.98).contains(&p) {
            continue;
        }
        let mc = draws(1_000_000, SEED + 7, found as u64 * 1_000_000);
        let est = estimate_outage(&sc, &basis, &upa(n)?, &mc)?;
        worst = worst.max((p - est.estimate).abs() / est.standard_error);
        found += 1;
    }
    Ok((worst < 3.0, format!("5 scenarios, worst deviation {worst:.2} SE")))
}

/// Largest `|P(K=15) - P(K=30)|` over the closed-form CPA rows of a figure.
fn truncation_gap(name: &str) -> Result<f64> {
    let mut s = figure(name)?;
    let f = &mut s.file;
    f.compare.allocations = vec![AllocationKind::Cpa];
    f.compare.evaluators = vec![EvaluatorKind::Analytic];
    f.compare.phi = None;
    f.montecarlo.h_realizations = f.montecarlo.h_realizations.min(50);
    f.series.adaptive_tol = None;
    let table = |k: usize| {
        let mut t = s.clone();
        t.file.series.truncation = k;
        run_scenario(&t, &RunOptions::default())
    };
    let (a, b) = (table(15)?, table(30)?);
    Ok(a.rows
        .iter()
        .zip(&b.rows)
        .map(|(x, y)| (x.outage - y.outage).abs())
        .fold(0.0, f64::max))
}

fn truncation(_: Mode) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (name, _) in BUNDLED {
        let gap = truncation_gap(name)?;
        worst = worst.max(gap);
        parts.push(format!("{name} {gap:.1e}"));
    }
    Ok((worst < 1e-6, format!("largest gap per figure: {}", parts.join(", "))))
}

fn exact_to_asymptotic(_: Mode) -> Result<(bool, String)> {
    let s = figure("fig3")?;
    let ctrl = s.file.series.control();
    let search = AlphaSearch {
        grid: s.file.search.grid,
        refine: s.file.search.refine,
    };
    let mu_b = db_to_linear(s.file.system.mu_b_db);
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for rho_r in [0.3, 0.6, 0.9] {
        let (_, basis) = fixed_basis(&s, Some(rho_r))?;
        let best = |mu_e: EveSnr| -> Result<f64> {
            let t = SecrecyScenario::new(0.5, s.file.system.rate, mu_b, mu_e)?;
            let opt = optimize_alpha(&t, &basis, &Strategy::Fixed(cpa(&basis)), &Evaluator::Analytic(ctrl), &search)?;
            Ok(opt.outage.estimate)
        };
        let asym = best(EveSnr::Infinite)?;
        for db in [20.0, 30.0] {
            let gap = (best(EveSnr::from_db(db))? - asym).abs();
            worst = worst.max(gap);
            parts.push(format!("rho_r={rho_r} {db} dB {gap:.4}"));
        }
    }
    Ok((worst < 0.01, parts.join(", ")))
}

fn cpa_close_to_opa(_: Mode) -> Result<(bool, String)> {
    let (_, basis) = fixed_basis(&figure("fig2")?, None)?;
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (r, mu_e) in [EveSnr::Infinite, EveSnr::from_db(5.0)].into_iter().enumerate() {
        for (i, alpha) in [0.4, 0.5, 0.6, 0.7, 0.8].into_iter().enumerate() {
            let sc = fig2_scenario(alpha, mu_e)?;
            let stream = (r * 5 + i) as u64 * 1_000_000;
            let search_mc = draws(100_000, SEED + 8, stream);
            let opa = opa_search(&basis, &sc, &search_mc, OpaOptions::default())?;
            // score both spectra on fresh common draws
            let eval = EveComponents::draw(&basis, 1_000_000, SEED + 9, stream);
            let p_cpa = eval.result_from_count(eval.outage_count(&sc, &basis, cpa(&basis).phi()), &sc, &basis);
            let p_opa = eval.result_from_count(eval.outage_count(&sc, &basis, opa.allocation.phi()), &sc, &basis);
            let se = p_cpa.standard_error.hypot(p_opa.standard_error);
            let tol = 0.01f64.max(4.0 * se);
            let gap = (p_cpa.estimate - p_opa.estimate).abs();
            worst = worst.max(gap / tol);
            parts.push(format!("{gap:.4}"));
        }
    }
    Ok((
        worst < 1.0,
        format!("|CPA - OPA| at 10 points: {} (worst {worst:.2} of tolerance)", parts.join(" ")),
    ))
}

fn average_spec(corr: CorrelationMatrix, template: SecrecyScenario, kind: AllocationKind, evaluator: EvaluatorKind) -> AverageSpec {
    AverageSpec {
        corr,
        template,
        allocation: kind,
        evaluator,
        opa: OpaOptions::default(),
        search: AlphaSearch { grid: 100, refine: 1 },
        series: SeriesControl::adaptive(1e-10),
    }
}

fn averaged_ordering(mode: Mode) -> Result<(bool, String)> {
    let s = figure("fig5")?;
    let mc = MonteCarloConfig::new(mode.pick(100_000, 10_000), SEED + 10).with_h_realizations(mode.pick(200, 50));
    let k = mode.pick(2.0, 1.0);
    let template = SecrecyScenario::new(0.5, s.file.system.rate, db_to_linear(10.0), EveSnr::from_db(5.0))?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (rho_r, cpa_worse) in [(0.0, true), (0.9, false)] {
        let corr = CorrelationMatrix::exponential(s.file.system.n_t, 0.5, rho_r)?;
        let run = |kind| estimate_average_outage(&average_spec(corr.clone(), template, kind, EvaluatorKind::MonteCarlo), &mc);
        let (c, u) = (run(AllocationKind::Cpa)?, run(AllocationKind::Upa)?);
        let diff: Vec<f64> = c.per_draw.iter().zip(&u.per_draw).map(|(a, b)| a.outage - b.outage).collect();
        let (d, se) = mean_and_se(&diff);
        let holds = if cpa_worse { d > k * se } else { d < -k * se };
        ok &= holds;
        parts.push(format!(
            "rho_r={rho_r}: CPA {:.4} UPA {:.4} paired diff {d:.4} +- {se:.4}",
            c.result.estimate, u.result.estimate
        ));
    }
    Ok((ok, format!("{} (at {k} SE)", parts.join("; "))))
}

fn antenna_scaling(mode: Mode) -> Result<(bool, String)> {
    let mc = MonteCarloConfig::new(mode.pick(100_000, 10_000), SEED + 11).with_h_realizations(mode.pick(200, 50));
    let (k_flat, k_drop) = mode.pick((2.0, 2.0), (3.0, 1.0));
    let template = SecrecyScenario::new(0.5, 1.0, db_to_linear(10.0), EveSnr::Infinite)?;
    let avg = |n: usize, kind, evaluator| -> Result<(f64, f64)> {
        let corr = CorrelationMatrix::exponential(n, 0.5, 0.3)?;
        let r = estimate_average_outage(&average_spec(corr, template, kind, evaluator), &mc)?.result;
        Ok((r.estimate, r.standard_error))
    };
    let (u20, su20) = avg(20, AllocationKind::Upa, EvaluatorKind::MonteCarlo)?;
    let (u30, su30) = avg(30, AllocationKind::Upa, EvaluatorKind::MonteCarlo)?;
    let (c20, sc20) = avg(20, AllocationKind::Cpa, EvaluatorKind::Analytic)?;
    let (c30, sc30) = avg(30, AllocationKind::Cpa, EvaluatorKind::Analytic)?;
    let su = su20.hypot(su30);
    let sc = sc20.hypot(sc30);
    let flat = (u30 - u20).abs() <= k_flat * su;
    let drop = c20 - c30 > k_drop * sc;
    Ok((
        flat && drop,
        format!(
            "UPA {u20:.4} -> {u30:.4} (|d| {:.4} vs {k_flat}x{su:.4}); CPA {c20:.4} -> {c30:.4} (drop {:.4} vs {k_drop}x{sc:.4})",
            (u30 - u20).abs(),
            c20 - c30
        ),
    ))
}

fn cdf_and_rho(_: Mode) -> Result<(bool, String)> {
    let (_, basis) = fixed_basis(&figure("fig2")?, None)?;
    let ctrl = SeriesControl::default();
    let mut issues = Vec::new();

    let zs: Vec<f64> = (0..100).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 99.0)).collect();
    let mut tail: f64 = 0.0;
    for alpha in [0.3, 0.5, 0.8] {
        for mu_e in [EveSnr::Infinite, EveSnr::from_db(5.0)] {
            let params = outage_params(&fig2_scenario(alpha, mu_e)?, &basis)?;
            let cdf = |z: f64| match mu_e {
                EveSnr::Infinite => asymptotic_cdf(z, &params, ctrl, SeriesForm::Stable),
                EveSnr::Finite(_) => exact_cdf(z, &params, ctrl, SeriesForm::Stable),
            };
            let values: Vec<f64> = zs.iter().map(|&z| cdf(z)).collect::<Result<_>>()?;
            if values.windows(2).any(|w| w[1] < w[0] - 1e-12) {
                issues.push(format!("cdf decreases at alpha={alpha}"));
            }
            tail = tail.max(1.0 - cdf(1e6)?);
        }
    }
    if tail > 1e-4 {
        issues.push(format!("1 - F(1e6) = {tail:.2e}"));
    }

    let rho = correlation_coefficient(&basis);
    let drift = [0.1, 0.3, 0.5, 0.7, 0.9, 0.99]
        .into_iter()
        .map(|a| Ok((outage_params(&fig2_scenario(a, EveSnr::Infinite)?, &basis)?.rho - rho).abs()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    if drift > 1e-12 {
        issues.push(format!("rho drifts by {drift:.2e} across alpha"));
    }

    let identity = CorrelationMatrix::identity(4);
    let h = correlate(&sample_whitened(&mut StreamFactory::new(SEED).source(0), 4), &identity)?;
    let rho_iid = correlation_coefficient(&BeamformingBasis::new(&h, &identity)?);
    if rho_iid > 1e-12 {
        issues.push(format!("rho = {rho_iid:.2e} under T = I"));
    }

    let (emp, se) = empirical_correlation(&basis, &MonteCarloConfig::new(1_000_000, SEED + 12), 20)?;
    let dev = (emp - rho).abs() / se;
    if dev >= 3.0 {
        issues.push(format!("empirical rho off by {dev:.2} SE"));
    }
    let summary = format!(
        "1 - F(1e6) <= {tail:.1e}, rho drift {drift:.1e}, rho(T=I) {rho_iid:.1e}, rho {rho:.4} vs empirical {emp:.4} ({dev:.2} SE)"
    );
    let passed = issues.is_empty();
    Ok((passed, if passed { summary } else { issues.join("; ") }))
}

fn reproducibility(mode: Mode) -> Result<(bool, String)> {
    let s = figure("fig2")?;
    let csv = |workers: usize| -> Result<String> {
        let opts = RunOptions {
            seed: Some(7),
            workers: Some(workers),
            trials: mode.quick.then_some(100_000),
            ..RunOptions::default()
        };
        run_scenario(&s, &opts)?.to_csv_string()
    };
    let a = csv(1)?;
    let b = csv(1)?;
    let c = csv(2)?;
    let same = a == b && a == c;
    Ok((
        same,
        format!("{} bytes, repeat identical: {}, 1 vs 2 workers identical: {}", a.len(), a == b, a == c),
    ))
}
