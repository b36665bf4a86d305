//! Executes a scenario sweep.

use std::collections::HashMap;
use std::time::Instant;

use crate::analytics::{db_to_linear, outage, sinr_threshold, SecrecyScenario};
use crate::beamformer::BeamformingBasis;
use crate::channel::fixed_main_channel_with;
use crate::correlation::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::montecarlo::{
    estimate_average_outage, fingerprint, AverageSpec, EveComponents, EveDraws, MonteCarloConfig, OutageResult,
};
use crate::optimizer::{optimize_alpha, AlphaSearch, Evaluator, EvaluatorKind, Strategy};
use crate::power_allocation::{cpa, custom, opa_preconditions, opa_search_frozen, upa, AllocationKind, OpaOptions, PowerAllocation};
use crate::special::SeriesControl;

use super::scenario::{build_correlation, channel_vector, DbValue, InfToken, OneOrMany, Scenario, Variable};
use super::table::{Metadata, ResultTable, Row, RowKind};

/// Command-line overrides applied on top of a scenario file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub allocation: Option<AllocationKind>,
    pub phi: Option<Vec<f64>>,
    pub optimize_alpha: bool,
    pub grid: Option<usize>,
    pub refine: Option<usize>,
    pub mu_e: Option<Vec<DbValue>>,
    pub trials: Option<usize>,
    pub h_realizations: Option<usize>,
}

impl RunOptions {
    pub fn apply(&self, scenario: &Scenario) -> Result<Scenario> {
        let mut s = scenario.clone();
        let f = &mut s.file;
        if let Some(seed) = self.seed {
            f.montecarlo.seed = seed;
        }
        if let Some(w) = self.workers {
            f.montecarlo.workers = w;
        }
        if let Some(kind) = self.allocation {
            f.compare.allocations = vec![kind];
        }
        if let Some(phi) = &self.phi {
            f.compare.phi = Some(phi.clone());
        }
        if self.optimize_alpha {
            f.search.optimize_alpha = true;
        }
        if let Some(g) = self.grid {
            f.search.grid = g;
        }
        if let Some(r) = self.refine {
            f.search.refine = r;
        }
        if let Some(mu) = &self.mu_e {
            f.system.mu_e_db = OneOrMany::Many(mu.clone());
        }
        if let Some(t) = self.trials {
            f.montecarlo.trials = t;
            f.montecarlo.opa_trials = f.montecarlo.opa_trials.min(t);
        }
        if let Some(h) = self.h_realizations {
            f.montecarlo.h_realizations = h;
        }
        s.validate()?;
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy)]
struct Point {
    family: Option<DbValue>,
    sweep: DbValue,
    n_t: usize,
    rho_r: Option<f64>,
    mu_b_db: f64,
    mu_e: DbValue,
    alpha: Option<f64>,
}

fn assign(p: &mut Point, var: Variable, v: DbValue) {
    match (var, v) {
        (Variable::MuEDb, _) => p.mu_e = v,
        (Variable::Alpha, DbValue::Number(x)) => p.alpha = Some(x),
        (Variable::RhoR, DbValue::Number(x)) => p.rho_r = Some(x),
        (Variable::MuBDb, DbValue::Number(x)) => p.mu_b_db = x,
        (Variable::NT, DbValue::Number(x)) => p.n_t = x as usize,
        _ => {}
    }
}

fn points(s: &Scenario) -> Result<Vec<Point>> {
    let f = &s.file;
    let base_rho = match &f.correlation {
        super::scenario::CorrelationSpec::Exponential { rho_r, .. } => *rho_r,
        _ => None,
    };
    let sweeps_mu_e = f.sweep.variable == Variable::MuEDb
        || f.family.as_ref().is_some_and(|x| x.variable == Variable::MuEDb);
    let regimes = if sweeps_mu_e {
        vec![DbValue::Text(InfToken::Inf)]
    } else {
        f.system.mu_e_db.values()
    };
    let mut out = Vec::new();
    for fam in s.family_values() {
        for &mu_e in &regimes {
            for sv in s.sweep_values()? {
                let mut p = Point {
                    family: fam,
                    sweep: sv,
                    n_t: f.system.n_t,
                    rho_r: base_rho,
                    mu_b_db: f.system.mu_b_db,
                    mu_e,
                    alpha: None,
                };
                if let (Some(fam_v), Some(fam_def)) = (fam, &f.family) {
                    assign(&mut p, fam_def.variable, fam_v);
                }
                assign(&mut p, f.sweep.variable, sv);
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Frozen Eve draws for one main channel.
#[derive(Default)]
struct DrawCache {
    key: Option<(usize, Option<u64>)>,
    fixed: HashMap<AllocationKind, EveDraws>,
    components: Option<EveComponents>,
}

impl DrawCache {
    fn reset_for(&mut self, key: (usize, Option<u64>)) {
        if self.key != Some(key) {
            self.key = Some(key);
            self.fixed.clear();
            self.components = None;
        }
    }
}

struct Context<'a> {
    s: &'a Scenario,
    ctrl: SeriesControl,
    search: AlphaSearch,
    opa_search: AlphaSearch,
    opa: OpaOptions,
    mc: MonteCarloConfig,
    opa_mc: MonteCarloConfig,
}

pub fn run_scenario(scenario: &Scenario, opts: &RunOptions) -> Result<ResultTable> {
    let s = opts.apply(scenario)?;
    let f = &s.file;
    let started = Instant::now();
    let mc = MonteCarloConfig {
        trials: f.montecarlo.trials,
        h_realizations: f.montecarlo.h_realizations,
        seed: f.montecarlo.seed,
        workers: f.montecarlo.workers,
        base_stream: 0,
    };
    let ctx = Context {
        s: &s,
        ctrl: f.series.control(),
        search: AlphaSearch {
            grid: f.search.grid,
            refine: f.search.refine,
        },
        opa_search: AlphaSearch {
            grid: f.search.opa_grid.min(f.search.grid),
            refine: f.search.refine.min(1),
        },
        opa: OpaOptions::default(),
        opa_mc: MonteCarloConfig {
            trials: f.montecarlo.opa_trials.min(f.montecarlo.trials),
            ..mc.clone()
        },
        mc: mc.clone(),
    };
    let rows = mc.install(|| run_points(&ctx))?;
    let meta = Metadata {
        scenario: f.name.clone(),
        scenario_hash: s.hash(),
        seed: f.montecarlo.seed,
        workers: f.montecarlo.workers,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: started.elapsed().as_secs_f64(),
        rows: rows.len(),
    };
    Ok(ResultTable { rows, meta })
}

fn run_points(ctx: &Context) -> Result<Vec<Row>> {
    let f = &ctx.s.file;
    let mut rows = Vec::new();
    let mut cache = DrawCache::default();
    let pts = points(ctx.s)?;
    for (i, p) in pts.iter().enumerate() {
        let corr = build_correlation(&f.correlation, p.n_t, p.rho_r)?;
        match &f.channel {
            Some(ch) => {
                let h = fixed_main_channel_with(channel_vector(ch), &corr, ch.root)?.h;
                let basis = BeamformingBasis::new(&h, &corr)?;
                cache.reset_for((p.n_t, p.rho_r.map(f64::to_bits)));
                if f.sweep.variable == Variable::Alpha {
                    rows.extend(alpha_point(ctx, p, &basis, &mut cache)?);
                    let last_of_curve = pts.get(i + 1).is_none_or(|q| {
                        q.family != p.family || q.mu_e != p.mu_e
                    });
                    if f.search.optimize_alpha && last_of_curve {
                        rows.extend(optimum_rows(ctx, p, &basis)?);
                    }
                } else {
                    rows.extend(optimum_rows(ctx, p, &basis)?);
                }
            }
            None => rows.extend(averaged_rows(ctx, p, &corr)?),
        }
    }
    Ok(rows)
}

fn scenario_at(ctx: &Context, p: &Point, alpha: f64) -> Result<SecrecyScenario> {
    SecrecyScenario::new(alpha, ctx.s.file.system.rate, db_to_linear(p.mu_b_db), p.mu_e.to_snr())
}

fn allocation(ctx: &Context, kind: AllocationKind, basis: &BeamformingBasis) -> Result<PowerAllocation> {
    match kind {
        AllocationKind::Cpa => Ok(cpa(basis)),
        AllocationKind::Upa => upa(basis.dim()),
        AllocationKind::Custom => custom(ctx.s.file.compare.phi.clone().unwrap_or_default(), basis.dim()),
        AllocationKind::Opa => Err(Error::Precondition("the searched allocation has no fixed spectrum".into())),
    }
}

fn pairs(ctx: &Context) -> Vec<(AllocationKind, EvaluatorKind)> {
    let c = &ctx.s.file.compare;
    let mut out = Vec::new();
    for &a in &c.allocations {
        for &e in &c.evaluators {
            if e == EvaluatorKind::Analytic && a != AllocationKind::Cpa {
                continue;
            }
            out.push((a, e));
        }
    }
    out
}

fn base_row(ctx: &Context, p: &Point, a: AllocationKind, e: EvaluatorKind, kind: RowKind) -> Row {
    let f = &ctx.s.file;
    let (fam_var, fam_val) = match (&f.family, p.family) {
        (Some(fd), Some(v)) => (fd.variable.as_str().to_string(), v.to_string()),
        _ => (String::new(), String::new()),
    };
    Row {
        sweep_variable: f.sweep.variable.as_str().to_string(),
        sweep_value: p.sweep.to_string(),
        family_variable: fam_var,
        family_value: fam_val,
        mu_e_db: p.mu_e.to_string(),
        allocation: a.as_str().to_string(),
        evaluator: e.as_str().to_string(),
        kind,
        alpha: None,
        alpha_star: None,
        outage: 1.0,
        standard_error: 0.0,
        trials: 0,
        h_realizations: 1,
        infeasible: false,
        fingerprint: String::new(),
    }
}

fn fill(row: &mut Row, r: &OutageResult) {
    row.outage = r.estimate;
    row.standard_error = r.standard_error;
    row.trials = r.trials;
    row.fingerprint = r.fingerprint.clone();
}

fn analytic_fingerprint(sc: &SecrecyScenario, basis: &BeamformingBasis, ctrl: SeriesControl) -> String {
    fingerprint(&serde_json::json!({
        "scenario": sc,
        "h": basis.h().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "allocation": "cpa",
        "series": ctrl.truncation,
        "adaptive_tol": ctrl.adaptive.then_some(ctrl.tol),
    }))
}

fn alpha_point(ctx: &Context, p: &Point, basis: &BeamformingBasis, cache: &mut DrawCache) -> Result<Vec<Row>> {
    let alpha = p.alpha.expect("alpha sweep");
    let sc = scenario_at(ctx, p, alpha)?;
    let infeasible = sinr_threshold(&sc, basis) <= 0.0;
    let mut rows = Vec::new();
    for (a, e) in pairs(ctx) {
        let mut row = base_row(ctx, p, a, e, RowKind::Point);
        row.alpha = Some(alpha);
        row.infeasible = infeasible;
        match (a, e) {
            (AllocationKind::Cpa, EvaluatorKind::Analytic) => {
                let r = OutageResult::exact(outage(&sc, basis, ctx.ctrl)?, analytic_fingerprint(&sc, basis, ctx.ctrl));
                fill(&mut row, &r);
            }
            (AllocationKind::Opa, _) => {
                opa_preconditions(basis.dim(), ctx.opa_mc.trials, &ctx.opa)?;
                let mc = &ctx.opa_mc;
                let comps = cache
                    .components
                    .get_or_insert_with(|| EveComponents::draw(basis, mc.trials, mc.seed, mc.base_stream));
                let r = opa_search_frozen(basis, &sc, comps)?;
                fill(&mut row, &r.outage);
            }
            _ => {
                let alloc = allocation(ctx, a, basis)?;
                let mc = &ctx.mc;
                let draws = cache
                    .fixed
                    .entry(a)
                    .or_insert_with(|| EveDraws::draw(basis, &alloc, mc.trials, mc.seed, mc.base_stream));
                fill(&mut row, &draws.estimate(&sc, basis));
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

fn optimum_rows(ctx: &Context, p: &Point, basis: &BeamformingBasis) -> Result<Vec<Row>> {
    let template = scenario_at(ctx, p, 0.5)?;
    let mut rows = Vec::new();
    for (a, e) in pairs(ctx) {
        let mut row = base_row(ctx, p, a, e, RowKind::Optimum);
        let (strategy, search, mc) = match a {
            AllocationKind::Opa => (Strategy::Searched(ctx.opa), ctx.opa_search, &ctx.opa_mc),
            _ => (Strategy::Fixed(allocation(ctx, a, basis)?), ctx.search, &ctx.mc),
        };
        let evaluator = match e {
            EvaluatorKind::Analytic => Evaluator::Analytic(ctx.ctrl),
            EvaluatorKind::MonteCarlo => Evaluator::MonteCarlo(mc.clone()),
        };
        let opt = optimize_alpha(&template, basis, &strategy, &evaluator, &search)?;
        fill(&mut row, &opt.outage);
        row.alpha = opt.alpha_star;
        row.alpha_star = opt.alpha_star;
        row.infeasible = opt.alpha_star.is_none();
        if ctx.s.file.sweep.variable == Variable::Alpha {
            row.sweep_value = opt.alpha_star.map(|x| x.to_string()).unwrap_or_default();
        }
        rows.push(row);
    }
    Ok(rows)
}

fn averaged_rows(ctx: &Context, p: &Point, corr: &CorrelationMatrix) -> Result<Vec<Row>> {
    let template = scenario_at(ctx, p, 0.5)?;
    let mut rows = Vec::new();
    for (a, e) in pairs(ctx) {
        let mut row = base_row(ctx, p, a, e, RowKind::Optimum);
        let (search, mc) = match a {
            AllocationKind::Opa => (ctx.opa_search, &ctx.opa_mc),
            _ => (ctx.search, &ctx.mc),
        };
        let spec = AverageSpec {
            corr: corr.clone(),
            template,
            allocation: a,
            evaluator: e,
            opa: ctx.opa,
            search,
            series: ctx.ctrl,
        };
        let r = estimate_average_outage(&spec, mc)?;
        fill(&mut row, &r.result);
        row.h_realizations = mc.h_realizations;
        row.infeasible = r.per_draw.iter().all(|d| d.alpha_star.is_none());
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXED: &str = r#"
name = "unit"
[system]
n_t = 3
rate = 1
mu_b_db = 10
mu_e_db = [5, "inf"]
[correlation]
model = "exponential"
L = 0.5
rho_r = 0.6
[channel]
h_s = [[0.0234, 0.2351], [-0.0788, -0.4619], [-0.5344, 1.0582]]
[sweep]
variable = "alpha"
values = [0.02, 0.5, 0.9]
[compare]
allocations = ["cpa", "upa"]
evaluators = ["analytic", "mc"]
[montecarlo]
trials = 20000
seed = 3
[search]
grid = 50
refine = 1
"#;

    #[test]
    fn alpha_sweep_rows_and_flags() {
        let s = Scenario::parse(FIXED).unwrap();
        let t = run_scenario(&s, &RunOptions::default()).unwrap();
        // 2 regimes x 3 alphas x (cpa analytic, cpa mc, upa mc)
        assert_eq!(t.rows.len(), 18);
        let low: Vec<&Row> = t.rows.iter().filter(|r| r.alpha == Some(0.02)).collect();
        assert!(low.iter().all(|r| r.infeasible && r.outage == 1.0));
        for pair in t.rows.chunks(3) {
            if pair[0].infeasible {
                continue;
            }
            let (an, mc) = (&pair[0], &pair[1]);
            assert!((an.outage - mc.outage).abs() < 4.0 * mc.standard_error + 1e-3);
        }
    }

    #[test]
    fn optimize_flag_appends_one_optimum_per_curve() {
        let s = Scenario::parse(FIXED).unwrap();
        let t = run_scenario(&s, &RunOptions { optimize_alpha: true, ..Default::default() }).unwrap();
        let opt: Vec<&Row> = t.rows.iter().filter(|r| r.kind == RowKind::Optimum).collect();
        assert_eq!(opt.len(), 6);
        assert!(opt.iter().all(|r| r.alpha_star.is_some()));
    }

    #[test]
    fn overrides_select_allocation_and_seed() {
        let s = Scenario::parse(FIXED).unwrap();
        let o = RunOptions {
            allocation: Some(AllocationKind::Custom),
            phi: Some(vec![1.5, 0.5]),
            seed: Some(9),
            ..Default::default()
        };
        let t = run_scenario(&s, &o).unwrap();
        assert!(t.rows.iter().all(|r| r.allocation == "custom" && r.evaluator == "mc"));
        assert_eq!(t.meta.seed, 9);
        let bad = RunOptions { allocation: Some(AllocationKind::Custom), ..Default::default() };
        assert!(run_scenario(&s, &bad).is_err());
    }

    #[test]
    fn mu_sweep_with_family_optimizes() {
        let text = FIXED
            .replace("rho_r = 0.6\n", "")
            .replace("variable = \"alpha\"\nvalues = [0.02, 0.5, 0.9]", "variable = \"mu_E_dB\"\nvalues = [0, 10, \"inf\"]\n[family]\nvariable = \"rho_r\"\nvalues = [0.3, 0.9]")
            .replace("allocations = [\"cpa\", \"upa\"]", "allocations = [\"cpa\"]")
            .replace("evaluators = [\"analytic\", \"mc\"]", "evaluators = [\"analytic\"]");
        let s = Scenario::parse(&text).unwrap();
        let t = run_scenario(&s, &RunOptions::default()).unwrap();
        assert_eq!(t.rows.len(), 6);
        assert!(t.rows.iter().all(|r| r.kind == RowKind::Optimum && r.alpha_star.is_some()));
        assert_eq!(t.rows[2].mu_e_db, "inf");
        assert_eq!(t.rows[3].family_value, "0.9");
    }
}
