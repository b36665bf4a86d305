//! Power-splitting ratio `α` that minimizes the secrecy outage.
//!
//! The feasible interval starts at `α_l = (2^{R_s} - 1)/(μ_B ‖h‖²)`, below
//! which Bob's capacity cannot carry the secrecy rate. A uniform grid over
//! the interval is followed by golden-section passes around the best grid
//! point. With a noiseless eavesdropper `α = 1` is excluded, since the
//! outage jumps to one there.

use serde::{Deserialize, Serialize};

use crate::analytics::{outage, SecrecyScenario};
use crate::beamformer::BeamformingBasis;
use crate::error::{Error, Result};
use crate::montecarlo::{fingerprint, EveComponents, EveDraws, MonteCarloConfig, OutageResult};
use crate::power_allocation::{opa_preconditions, opa_search_frozen, AllocationKind, OpaOptions, PowerAllocation};
use crate::special::SeriesControl;

const GOLDEN: f64 = 0.618_033_988_749_894_8;
const GOLDEN_ITERS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaSearch {
    pub grid: usize,
    /// Golden-section passes after the grid.
    pub refine: usize,
}

impl Default for AlphaSearch {
    fn default() -> Self {
        Self { grid: 400, refine: 2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Evaluator {
    /// Closed-form outage; correlation-based allocation only.
    Analytic(SeriesControl),
    /// Frozen Eve draws shared by every `α`.
    MonteCarlo(MonteCarloConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EvaluatorKind {
    #[serde(rename = "analytic")]
    Analytic,
    #[serde(rename = "mc")]
    MonteCarlo,
}

impl EvaluatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EvaluatorKind::Analytic => "analytic",
            EvaluatorKind::MonteCarlo => "mc",
        }
    }
}

impl std::str::FromStr for EvaluatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(EvaluatorKind::Analytic),
            "mc" => Ok(EvaluatorKind::MonteCarlo),
            other => Err(Error::Validation(format!(
                "unknown evaluator '{other}' (expected analytic or mc)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    Fixed(PowerAllocation),
    /// Spectrum re-optimized at every `α`.
    Searched(OpaOptions),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaPoint {
    pub alpha: f64,
    pub outage: f64,
    pub standard_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub best: AlphaPoint,
    /// Every evaluated point, sorted by `α`.
    pub curve: Vec<AlphaPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaOptimum {
    /// `None` when no `α` is feasible.
    pub alpha_star: Option<f64>,
    pub outage: OutageResult,
    pub curve: Vec<AlphaPoint>,
    /// Spectrum chosen at `α*` when the allocation is searched.
    pub allocation: Option<PowerAllocation>,
}

pub fn alpha_lower_bound(scenario: &SecrecyScenario, basis: &BeamformingBasis) -> f64 {
    (scenario.rate.exp2() - 1.0) / (scenario.mu_b * basis.main_gain())
}

/// Grid over `(lo, 1)`, or `(lo, 1]` when `include_one`.
pub fn alpha_grid(lo: f64, include_one: bool, points: usize) -> Vec<f64> {
    let width = 1.0 - lo;
    if include_one {
        (1..=points)
            .map(|i| (lo + width * i as f64 / points as f64).min(1.0))
            .collect()
    } else {
        (1..=points)
            .map(|i| (lo + width * i as f64 / (points + 1) as f64).min(1.0 - f64::EPSILON))
            .collect()
    }
}

/// Minimizes `f(α) = (outage, standard error)` over the feasible interval.
///
/// With `tie_to_larger`, every evaluated point within one standard error of
/// the smallest value is a tie and the largest such `α` wins.
pub fn minimize_over_alpha<F>(
    lo: f64,
    include_one: bool,
    search: &AlphaSearch,
    tie_to_larger: bool,
    mut f: F,
) -> Result<Minimum>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    if search.grid < 2 {
        return Err(Error::Validation("alpha grid needs at least two points".into()));
    }
    if !(lo < 1.0) {
        return Err(Error::Precondition(format!("no feasible alpha: lower bound {lo} >= 1")));
    }
    let lo = lo.max(0.0);
    let mut curve = Vec::new();
    let mut eval = |a: f64, curve: &mut Vec<AlphaPoint>| -> Result<f64> {
        let (p, se) = f(a)?;
        curve.push(AlphaPoint { alpha: a, outage: p, standard_error: se });
        Ok(p)
    };
    let grid = alpha_grid(lo, include_one, search.grid);
    let mut best_i = 0;
    let mut best_v = f64::INFINITY;
    for (i, &a) in grid.iter().enumerate() {
        let v = eval(a, &mut curve)?;
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let mut left = if best_i == 0 { lo } else { grid[best_i - 1] };
    let mut right = grid.get(best_i + 1).copied().unwrap_or(1.0);
    for _ in 0..search.refine {
        let (mut a, mut b) = (left, right);
        let mut x1 = b - GOLDEN * (b - a);
        let mut x2 = a + GOLDEN * (b - a);
        let mut f1 = eval(x1, &mut curve)?;
        let mut f2 = eval(x2, &mut curve)?;
        for _ in 0..GOLDEN_ITERS {
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - GOLDEN * (b - a);
                f1 = eval(x1, &mut curve)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + GOLDEN * (b - a);
                f2 = eval(x2, &mut curve)?;
            }
        }
        let centre = if f1 <= f2 { x1 } else { x2 };
        let half = (right - left) / 8.0;
        left = (centre - half).max(lo);
        right = (centre + half).min(1.0);
    }
    curve.sort_by(|p, q| p.alpha.total_cmp(&q.alpha));
    let min = curve
        .iter()
        .min_by(|p, q| p.outage.total_cmp(&q.outage))
        .copied()
        .expect("grid is nonempty");
    let best = if tie_to_larger {
        curve
            .iter()
            .rev()
            .find(|p| p.outage <= min.outage + min.standard_error)
            .copied()
            .unwrap_or(min)
    } else {
        min
    };
    Ok(Minimum { best, curve })
}

/// `α*` and the outage there for one main channel.
pub fn optimize_alpha(
    template: &SecrecyScenario,
    basis: &BeamformingBasis,
    strategy: &Strategy,
    evaluator: &Evaluator,
    search: &AlphaSearch,
) -> Result<AlphaOptimum> {
    template.validate()?;
    let lo = alpha_lower_bound(template, basis);
    let include_one = !template.mu_e.is_infinite();
    let fp = fingerprint(&serde_json::json!({
        "template": template,
        "h": basis.h().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "strategy": match strategy {
            Strategy::Fixed(a) => serde_json::to_value(a).unwrap_or_default(),
            Strategy::Searched(o) => serde_json::to_value(o).unwrap_or_default(),
        },
        "evaluator": match evaluator {
            Evaluator::Analytic(c) => serde_json::json!({"series": c.truncation, "adaptive_tol": c.adaptive.then_some(c.tol)}),
            Evaluator::MonteCarlo(mc) => serde_json::to_value(mc).unwrap_or_default(),
        },
        "search": search,
    }));
    if lo >= 1.0 {
        let mut outage = OutageResult::certain(fp);
        outage.min_outage = Some(1.0);
        return Ok(AlphaOptimum {
            alpha_star: None,
            outage,
            curve: Vec::new(),
            allocation: None,
        });
    }

    let (minimum, trials, allocation) = match (strategy, evaluator) {
        (Strategy::Fixed(alloc), Evaluator::Analytic(ctrl)) => {
            if alloc.kind() != AllocationKind::Cpa {
                return Err(Error::Precondition(format!(
                    "closed-form outage covers the cpa allocation only, got {}",
                    alloc.kind()
                )));
            }
            let m = minimize_over_alpha(lo, include_one, search, false, |a| {
                Ok((outage(&template.with_alpha(a), basis, *ctrl)?, 0.0))
            })?;
            (m, 0, None)
        }
        (Strategy::Fixed(alloc), Evaluator::MonteCarlo(mc)) => {
            mc.validate()?;
            let draws = mc.install(|| EveDraws::draw(basis, alloc, mc.trials, mc.seed, mc.base_stream));
            let n = draws.trials() as f64;
            let m = mc.install(|| {
                minimize_over_alpha(lo, include_one, search, true, |a| {
                    let p = draws.outage_count(&template.with_alpha(a), basis) as f64 / n;
                    Ok((p, (p * (1.0 - p) / n).sqrt()))
                })
            })?;
            (m, mc.trials, None)
        }
        (Strategy::Searched(opts), Evaluator::MonteCarlo(mc)) => {
            mc.validate()?;
            opa_preconditions(basis.dim(), mc.trials, opts)?;
            let comps = mc.install(|| EveComponents::draw(basis, mc.trials, mc.seed, mc.base_stream));
            let n = comps.trials() as f64;
            let m = mc.install(|| {
                minimize_over_alpha(lo, include_one, search, true, |a| {
                    let r = opa_search_frozen(basis, &template.with_alpha(a), &comps)?;
                    let p = r.outage.estimate;
                    Ok((p, (p * (1.0 - p) / n).sqrt()))
                })
            })?;
            let best = opa_search_frozen(basis, &template.with_alpha(m.best.alpha), &comps)?;
            (m, mc.trials, Some(best.allocation))
        }
        (Strategy::Searched(_), Evaluator::Analytic(_)) => {
            return Err(Error::Precondition(
                "the searched allocation has no closed form; use a Monte Carlo evaluator".into(),
            ))
        }
    };
    let best = minimum.best;
    Ok(AlphaOptimum {
        alpha_star: Some(best.alpha),
        outage: OutageResult {
            estimate: best.outage,
            standard_error: best.standard_error,
            trials,
            fingerprint: fp,
            alpha_star: Some(best.alpha),
            min_outage: Some(best.outage),
        },
        curve: minimum.curve,
        allocation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::{db_to_linear, EveSnr};
    use crate::beamformer::build_basis;
    use crate::channel::{correlate, from_pairs};
    use crate::correlation::CorrelationMatrix;
    use crate::power_allocation::{cpa, upa};

    fn fig2() -> BeamformingBasis {
        let t = CorrelationMatrix::from_spectrum(&[2.8, 0.7, 0.3, 0.2], None).unwrap();
        let h_s = from_pairs(&[[0.1104, -0.6619], [-0.6677, 1.2432], [0.7588, 0.9201], [1.0196, 0.4098]]);
        build_basis(&correlate(&h_s, &t).unwrap(), &t).unwrap()
    }

    fn template(mu_e: EveSnr) -> SecrecyScenario {
        SecrecyScenario::new(0.5, 2.0, db_to_linear(5.0), mu_e).unwrap()
    }

    #[test]
    fn grids_respect_the_domain() {
        let g = alpha_grid(0.2, false, 4);
        assert_eq!(g.len(), 4);
        assert!(g[0] > 0.2 && g[3] < 1.0);
        let g = alpha_grid(0.2, true, 4);
        assert_eq!(*g.last().unwrap(), 1.0);
    }

    #[test]
    fn finds_a_parabola_minimum() {
        let m = minimize_over_alpha(0.1, true, &AlphaSearch::default(), false, |a| Ok(((a - 0.4321).powi(2), 0.0))).unwrap();
        assert!((m.best.alpha - 0.4321).abs() < 1e-6);
    }

    #[test]
    fn monte_carlo_ties_go_to_the_larger_alpha() {
        let m = minimize_over_alpha(0.0, true, &AlphaSearch { grid: 10, refine: 0 }, true, |a| {
            Ok((if a < 0.5 { 0.10 } else { 0.105 }, 0.01))
        })
        .unwrap();
        assert_eq!(m.best.alpha, 1.0);
    }

    #[test]
    fn analytic_optimum_dominates_the_grid() {
        let b = fig2();
        for mu_e in [EveSnr::Infinite, EveSnr::Finite(db_to_linear(5.0))] {
            let t = template(mu_e);
            let opt = optimize_alpha(&t, &b, &Strategy::Fixed(cpa(&b)), &Evaluator::Analytic(SeriesControl::default()), &AlphaSearch::default()).unwrap();
            let star = opt.alpha_star.unwrap();
            let lo = alpha_lower_bound(&t, &b);
            assert!(star > lo && star <= 1.0);
            for a in alpha_grid(lo, !mu_e.is_infinite(), 97) {
                let p = outage(&t.with_alpha(a), &b, SeriesControl::default()).unwrap();
                assert!(opt.outage.estimate <= p + 1e-12, "alpha {a}");
            }
        }
    }

    #[test]
    fn grid_resolution_is_sufficient() {
        let b = fig2();
        for mu_e in [EveSnr::Infinite, EveSnr::Finite(db_to_linear(5.0))] {
            let t = template(mu_e);
            let run = |grid| {
                optimize_alpha(&t, &b, &Strategy::Fixed(cpa(&b)), &Evaluator::Analytic(SeriesControl::default()), &AlphaSearch { grid, refine: 2 })
                    .unwrap()
                    .outage
                    .estimate
            };
            assert!((run(400) - run(800)).abs() < 1e-3);
        }
    }

    #[test]
    fn infeasible_rate_reports_certain_outage() {
        let b = fig2();
        let t = SecrecyScenario::new(0.5, 12.0, 1.0, EveSnr::Infinite).unwrap();
        let opt = optimize_alpha(&t, &b, &Strategy::Fixed(cpa(&b)), &Evaluator::Analytic(SeriesControl::default()), &AlphaSearch::default()).unwrap();
        assert_eq!(opt.alpha_star, None);
        assert_eq!(opt.outage.estimate, 1.0);
    }

    #[test]
    fn analytic_evaluator_rejects_other_allocations() {
        let b = fig2();
        let r = optimize_alpha(&template(EveSnr::Infinite), &b, &Strategy::Fixed(upa(4).unwrap()), &Evaluator::Analytic(SeriesControl::default()), &AlphaSearch::default());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn monte_carlo_optimum_tracks_the_closed_form() {
        let b = fig2();
        let t = template(EveSnr::Infinite);
        let search = AlphaSearch { grid: 100, refine: 1 };
        let a = optimize_alpha(&t, &b, &Strategy::Fixed(cpa(&b)), &Evaluator::Analytic(SeriesControl::default()), &search).unwrap();
        let m = optimize_alpha(&t, &b, &Strategy::Fixed(cpa(&b)), &Evaluator::MonteCarlo(MonteCarloConfig::new(100_000, 2)), &search).unwrap();
        assert!((a.outage.estimate - m.outage.estimate).abs() < 4.0 * m.outage.standard_error.max(1e-3));
    }

    #[test]
    fn searched_allocation_never_loses_to_cpa() {
        let b = fig2();
        let t = template(EveSnr::Finite(db_to_linear(5.0)));
        let mc = MonteCarloConfig::new(10_000, 7);
        let search = AlphaSearch { grid: 12, refine: 0 };
        let fixed = optimize_alpha(&t, &b, &Strategy::Fixed(cpa(&b)), &Evaluator::MonteCarlo(mc.clone()), &search).unwrap();
        let opa = optimize_alpha(&t, &b, &Strategy::Searched(OpaOptions::default()), &Evaluator::MonteCarlo(mc), &search).unwrap();
        let min_fixed = fixed.curve.iter().map(|p| p.outage).fold(1.0, f64::min);
        let min_opa = opa.curve.iter().map(|p| p.outage).fold(1.0, f64::min);
        assert!(min_opa <= min_fixed);
        assert_eq!(opa.allocation.unwrap().kind(), AllocationKind::Opa);
    }
}
