//! Declarative scenario files.
//!
//! ```toml
//! name = "fig2"
//! [system]
//! n_t = 4
//! rate = 2
//! mu_b_db = 5
//! mu_e_db = [5, "inf"]
//! [correlation]
//! model = "spectrum"
//! lambda = [2.8, 0.7, 0.3, 0.2]
//! [channel]
//! h_s = [[0.1104, -0.6619], [-0.6677, 1.2432], [0.7588, 0.9201], [1.0196, 0.4098]]
//! [sweep]
//! variable = "alpha"
//! start = 0.3
//! stop = 0.99
//! step = 0.03
//! [compare]
//! allocations = ["cpa", "upa"]
//! evaluators = ["analytic", "mc"]
//! ```
//!
//! Decibel values are converted to linear scale on load. Only Eve's SNR
//! accepts the `"inf"` sentinel, which selects the noiseless-eavesdropper
//! regime.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analytics::{db_to_linear, EveSnr};
use crate::channel::{from_pairs, ChannelRoot};
use crate::correlation::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::montecarlo::fingerprint;
use crate::optimizer::EvaluatorKind;
use crate::power_allocation::AllocationKind;

/// A decibel value, or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DbValue {
    Number(f64),
    Text(InfToken),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfToken {
    #[serde(rename = "inf")]
    Inf,
}

impl DbValue {
    pub fn finite(&self) -> Option<f64> {
        match self {
            DbValue::Number(x) => Some(*x),
            DbValue::Text(_) => None,
        }
    }

    pub fn to_snr(&self) -> EveSnr {
        match self {
            DbValue::Number(db) => EveSnr::Finite(db_to_linear(*db)),
            DbValue::Text(_) => EveSnr::Infinite,
        }
    }
}

impl std::str::FromStr for DbValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") {
            return Ok(DbValue::Text(InfToken::Inf));
        }
        t.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(DbValue::Number)
            .ok_or_else(|| Error::Validation(format!("expected a dB value or 'inf', got '{s}'")))
    }
}

impl fmt::Display for DbValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DbValue::Number(x) => write!(f, "{x}"),
            DbValue::Text(_) => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(DbValue),
    Many(Vec<DbValue>),
}

impl OneOrMany {
    pub fn values(&self) -> Vec<DbValue> {
        match self {
            OneOrMany::One(v) => vec![*v],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct System {
    pub n_t: usize,
    pub rate: f64,
    pub mu_b_db: f64,
    /// One regime or several.
    pub mu_e_db: OneOrMany,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum CorrelationSpec {
    Exponential {
        #[serde(rename = "L")]
        length_m: f64,
        #[serde(default)]
        rho_r: Option<f64>,
    },
    Spectrum {
        lambda: Vec<f64>,
    },
    Explicit {
        rows: Vec<Vec<Entry>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub h_s: Vec<[f64; 2]>,
    #[serde(default)]
    pub root: ChannelRoot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variable {
    #[serde(rename = "alpha")]
    Alpha,
    #[serde(rename = "mu_E_dB")]
    MuEDb,
    #[serde(rename = "rho_r")]
    RhoR,
    #[serde(rename = "mu_B_dB")]
    MuBDb,
    #[serde(rename = "N_t")]
    NT,
}

impl Variable {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variable::Alpha => "alpha",
            Variable::MuEDb => "mu_E_dB",
            Variable::RhoR => "rho_r",
            Variable::MuBDb => "mu_B_dB",
            Variable::NT => "N_t",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: Variable,
    #[serde(default)]
    pub start: Option<f64>,
    #[serde(default)]
    pub stop: Option<f64>,
    #[serde(default)]
    pub step: Option<f64>,
    #[serde(default)]
    pub values: Option<Vec<DbValue>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Family {
    pub variable: Variable,
    pub values: Vec<DbValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Compare {
    pub allocations: Vec<AllocationKind>,
    pub evaluators: Vec<EvaluatorKind>,
    /// Spectrum for the custom allocation.
    #[serde(default)]
    pub phi: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McSpec {
    pub trials: usize,
    pub h_realizations: usize,
    pub seed: u64,
    pub workers: usize,
    /// Trials for the searched allocation, at most `trials`.
    pub opa_trials: usize,
}

impl Default for McSpec {
    fn default() -> Self {
        Self {
            trials: 1_000_000,
            h_realizations: 200,
            seed: 1,
            workers: 0,
            opa_trials: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchSpec {
    pub grid: usize,
    pub refine: usize,
    /// Grid used when the allocation itself is searched at every `α`.
    pub opa_grid: usize,
    /// Adds optimum rows to `alpha` sweeps.
    pub optimize_alpha: bool,
}

impl Default for SearchSpec {
    fn default() -> Self {
        Self {
            grid: 400,
            refine: 2,
            opa_grid: 40,
            optimize_alpha: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PlotStyle {
    #[default]
    Semilogy,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct PlotSpec {
    pub style: PlotStyle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeriesSpec {
    pub truncation: usize,
    /// When set, sum until the neglected weight falls below this value.
    pub adaptive_tol: Option<f64>,
}

impl Default for SeriesSpec {
    fn default() -> Self {
        Self {
            truncation: 15,
            adaptive_tol: None,
        }
    }
}

impl SeriesSpec {
    pub fn control(&self) -> crate::special::SeriesControl {
        match self.adaptive_tol {
            Some(tol) => crate::special::SeriesControl::adaptive(tol),
            None => crate::special::SeriesControl::fixed(self.truncation),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default, skip_serializing)]
    pub description: String,
    pub system: System,
    pub correlation: CorrelationSpec,
    #[serde(default)]
    pub channel: Option<ChannelSpec>,
    pub sweep: Sweep,
    #[serde(default)]
    pub family: Option<Family>,
    pub compare: Compare,
    #[serde(default)]
    pub montecarlo: McSpec,
    #[serde(default)]
    pub search: SearchSpec,
    #[serde(default)]
    pub series: SeriesSpec,
    #[serde(default)]
    pub plot: PlotSpec,
}

/// A parsed scenario together with its source text, for error locations.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub file: ScenarioFile,
    source: String,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| {
            let at = e
                .span()
                .map(|s| format!("line {}: ", line_of_offset(text, s.start)))
                .unwrap_or_default();
            Error::Scenario(format!("{at}{}", e.message()))
        })?;
        let scenario = Self {
            file,
            source: text.to_string(),
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| match e {
            Error::Scenario(m) => Error::Scenario(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Hash of the semantic content; comments, layout and the description
    /// do not contribute.
    pub fn hash(&self) -> String {
        fingerprint(&self.file)
    }

    fn fail(&self, key: &str, msg: impl fmt::Display) -> Error {
        match locate(&self.source, key) {
            Some(line) => Error::Scenario(format!("line {line}: {key}: {msg}")),
            None => Error::Scenario(format!("{key}: {msg}")),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let f = &self.file;
        if f.name.trim().is_empty() {
            return Err(self.fail("name", "must not be empty"));
        }
        if f.system.n_t < 2 {
            return Err(self.fail("n_t", "at least 2 antennas are needed"));
        }
        if !(f.system.rate > 0.0 && f.system.rate.is_finite()) {
            return Err(self.fail("rate", "must be positive and finite"));
        }
        if !f.system.mu_b_db.is_finite() {
            return Err(self.fail("mu_b_db", "must be finite"));
        }
        if f.system.mu_e_db.values().is_empty() {
            return Err(self.fail("mu_e_db", "needs at least one value"));
        }
        if f.system.mu_e_db.values().iter().any(|v| v.finite().is_some_and(|x| !x.is_finite())) {
            return Err(self.fail("mu_e_db", "must be finite or \"inf\""));
        }

        let sweep = self.sweep_values()?;
        if sweep.is_empty() {
            return Err(self.fail("sweep", "empty sweep range"));
        }
        self.check_values("sweep", f.sweep.variable, &sweep)?;
        if let Some(fam) = &f.family {
            if fam.variable == Variable::Alpha {
                return Err(self.fail("family", "alpha cannot be a family variable"));
            }
            if fam.variable == f.sweep.variable {
                return Err(self.fail("family", "family and sweep vary the same quantity"));
            }
            if fam.values.is_empty() {
                return Err(self.fail("family", "needs at least one value"));
            }
            self.check_values("family", fam.variable, &fam.values)?;
        }

        let varies = |v: Variable| f.sweep.variable == v || f.family.as_ref().is_some_and(|x| x.variable == v);
        match &f.correlation {
            CorrelationSpec::Exponential { length_m, rho_r } => {
                if !(*length_m >= 0.0 && length_m.is_finite()) {
                    return Err(self.fail("L", "array length must be finite and nonnegative"));
                }
                if rho_r.is_none() && !varies(Variable::RhoR) {
                    return Err(self.fail("correlation", "rho_r is required unless it is swept"));
                }
                if let Some(r) = rho_r {
                    if !(0.0..1.0).contains(r) {
                        return Err(self.fail("rho_r", "must lie in [0, 1)"));
                    }
                }
            }
            CorrelationSpec::Spectrum { lambda } => {
                if lambda.len() != f.system.n_t {
                    return Err(self.fail("lambda", format!("has {} entries, N_t = {}", lambda.len(), f.system.n_t)));
                }
                if varies(Variable::RhoR) || varies(Variable::NT) {
                    return Err(self.fail("model", "rho_r and N_t sweeps need the exponential model"));
                }
            }
            CorrelationSpec::Explicit { rows } => {
                if rows.len() != f.system.n_t || rows.iter().any(|r| r.len() != f.system.n_t) {
                    return Err(self.fail("rows", format!("must be {0} x {0}", f.system.n_t)));
                }
                if varies(Variable::RhoR) || varies(Variable::NT) {
                    return Err(self.fail("model", "rho_r and N_t sweeps need the exponential model"));
                }
            }
        }

        match &f.channel {
            Some(ch) => {
                if ch.h_s.len() != f.system.n_t {
                    return Err(self.fail("h_s", format!("has {} entries, N_t = {}", ch.h_s.len(), f.system.n_t)));
                }
                if varies(Variable::NT) {
                    return Err(self.fail("h_s", "a fixed channel cannot be combined with an N_t sweep"));
                }
            }
            None => {
                if f.sweep.variable == Variable::Alpha {
                    return Err(self.fail("variable", "alpha sweeps need a fixed channel h_s"));
                }
            }
        }

        if f.compare.allocations.is_empty() {
            return Err(self.fail("allocations", "needs at least one allocation"));
        }
        if f.compare.evaluators.is_empty() {
            return Err(self.fail("evaluators", "needs at least one evaluator"));
        }
        if f.compare.allocations.contains(&AllocationKind::Custom) {
            match &f.compare.phi {
                None => return Err(self.fail("allocations", "custom allocation needs phi")),
                Some(phi) if phi.len() + 1 != f.system.n_t => {
                    return Err(self.fail("phi", format!("needs N_t - 1 = {} entries", f.system.n_t - 1)))
                }
                _ => {}
            }
            if varies(Variable::NT) {
                return Err(self.fail("phi", "a custom spectrum cannot follow an N_t sweep"));
            }
            if f.channel.is_none() {
                return Err(self.fail("allocations", "custom allocation needs a fixed channel"));
            }
        }
        let mc = &f.montecarlo;
        if mc.trials < crate::montecarlo::MIN_REPORTED_TRIALS {
            return Err(self.fail("trials", format!("at least {} trials", crate::montecarlo::MIN_REPORTED_TRIALS)));
        }
        let min_opa = crate::power_allocation::OpaOptions::default().min_trials;
        if f.compare.allocations.contains(&AllocationKind::Opa) && mc.opa_trials < min_opa {
            return Err(self.fail("opa_trials", format!("at least {min_opa} trials for the searched allocation")));
        }
        if f.channel.is_none() && mc.h_realizations < crate::montecarlo::MIN_H_REALIZATIONS {
            return Err(self.fail("h_realizations", format!("at least {}", crate::montecarlo::MIN_H_REALIZATIONS)));
        }
        if f.search.grid < 2 || f.search.opa_grid < 2 {
            return Err(self.fail("grid", "at least 2 points"));
        }
        if f.series.truncation == 0 {
            return Err(self.fail("truncation", "must be positive"));
        }
        if f.series.adaptive_tol.is_some_and(|t| !(t > 0.0 && t < 1.0)) {
            return Err(self.fail("adaptive_tol", "must lie in (0, 1)"));
        }
        Ok(())
    }

    fn check_values(&self, key: &str, var: Variable, values: &[DbValue]) -> Result<()> {
        for v in values {
            let x = match (var, v.finite()) {
                (Variable::MuEDb, None) => continue,
                (_, None) => return Err(self.fail(key, format!("\"inf\" is only accepted for mu_E_dB, not {}", var.as_str()))),
                (_, Some(x)) => x,
            };
            let ok = match var {
                Variable::Alpha => x > 0.0 && x <= 1.0,
                Variable::RhoR => (0.0..1.0).contains(&x),
                Variable::NT => x >= 2.0 && x.fract() == 0.0,
                Variable::MuEDb | Variable::MuBDb => x.is_finite(),
            };
            if !ok {
                return Err(self.fail(key, format!("value {x} is outside the domain of {}", var.as_str())));
            }
        }
        Ok(())
    }

    pub fn sweep_values(&self) -> Result<Vec<DbValue>> {
        let s = &self.file.sweep;
        match (&s.values, s.start, s.stop, s.step) {
            (Some(v), None, None, None) => Ok(v.clone()),
            (None, Some(a), Some(b), Some(h)) => {
                if !(h > 0.0) || !a.is_finite() || !b.is_finite() {
                    return Err(self.fail("step", "must be positive with finite bounds"));
                }
                Ok(expand_range(a, b, h).into_iter().map(DbValue::Number).collect())
            }
            _ => Err(self.fail("sweep", "give either values or start, stop and step")),
        }
    }

    pub fn family_values(&self) -> Vec<Option<DbValue>> {
        match &self.file.family {
            Some(f) => f.values.iter().map(|v| Some(*v)).collect(),
            None => vec![None],
        }
    }
}

/// `start, start + step, ...` up to `stop`, rounded to 12 decimals.
pub fn expand_range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor();
    if n < 0.0 {
        return Vec::new();
    }
    (0..=n as usize)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect()
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// First line declaring `key` as a key or a table header.
fn locate(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|line| {
        let t = line.trim_start();
        let header = t.strip_prefix('[').map(|r| r.trim_start_matches('[').trim_end_matches(']'));
        if header.is_some_and(|h| h.trim() == key) {
            return true;
        }
        t.strip_prefix(key)
            .is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

/// Correlation matrix for a scenario point.
pub fn build_correlation(spec: &CorrelationSpec, n_t: usize, rho_r: Option<f64>) -> Result<CorrelationMatrix> {
    match spec {
        CorrelationSpec::Exponential { length_m, rho_r: base } => {
            let r = rho_r.or(*base).ok_or_else(|| Error::Validation("rho_r missing".into()))?;
            CorrelationMatrix::exponential(n_t, *length_m, r)
        }
        CorrelationSpec::Spectrum { lambda } => CorrelationMatrix::from_spectrum(lambda, None),
        CorrelationSpec::Explicit { rows } => {
            let n = rows.len();
            let m = CMatrix::from_fn(n, n, |i, j| match rows[i][j] {
                Entry::Real(x) => num_complex::Complex64::new(x, 0.0),
                Entry::Complex([re, im]) => num_complex::Complex64::new(re, im),
            });
            CorrelationMatrix::from_explicit(m)
        }
    }
}

pub fn channel_vector(spec: &ChannelSpec) -> crate::linalg::CVector {
    from_pairs(&spec.h_s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
name = "demo"
[system]
n_t = 3
rate = 1
mu_b_db = 10
mu_e_db = "inf"
[correlation]
model = "exponential"
L = 0.5
rho_r = 0.3
[channel]
h_s = [[0.0234, 0.2351], [-0.0788, -0.4619], [-0.5344, 1.0582]]
[sweep]
variable = "alpha"
start = 0.2
stop = 0.9
step = 0.1
[compare]
allocations = ["cpa", "upa"]
evaluators = ["analytic", "mc"]
"#;

    #[test]
    fn parses_and_expands() {
        let s = Scenario::parse(BASE).unwrap();
        let v = s.sweep_values().unwrap();
        assert_eq!(v.len(), 8);
        assert_eq!(v[1], DbValue::Number(0.3));
        assert_eq!(s.file.system.mu_e_db.values(), vec![DbValue::Text(InfToken::Inf)]);
        assert_eq!(s.file.montecarlo.trials, 1_000_000);
    }

    #[test]
    fn channel_root_defaults_to_cholesky() {
        let s = Scenario::parse(BASE).unwrap();
        assert_eq!(s.file.channel.as_ref().unwrap().root, ChannelRoot::Cholesky);
        let text = BASE.replace("[channel]\n", "[channel]\nroot = \"eigen\"\n");
        let e = Scenario::parse(&text).unwrap();
        assert_eq!(e.file.channel.as_ref().unwrap().root, ChannelRoot::Eigen);
        assert_ne!(s.hash(), e.hash());
        assert!(Scenario::parse(&BASE.replace("[channel]\n", "[channel]\nroot = \"polar\"\n")).is_err());
    }

    #[test]
    fn empty_range_is_rejected() {
        let text = BASE.replace("start = 0.2", "start = 0.95");
        let err = Scenario::parse(&text).unwrap_err().to_string();
        assert!(err.contains("empty sweep range"), "{err}");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = BASE.replace("n_t = 3", "n_t = 3\nbogus = 1");
        let err = Scenario::parse(&text).unwrap_err().to_string();
        assert!(err.contains("line 5"), "{err}");
        let text = BASE.replace("rate = 1", "rate = -1");
        let err = Scenario::parse(&text).unwrap_err().to_string();
        assert!(err.contains("line 5") && err.contains("rate"), "{err}");
    }

    #[test]
    fn inf_only_for_eve() {
        let text = BASE.replace("mu_b_db = 10", "mu_b_db = \"inf\"");
        assert!(Scenario::parse(&text).is_err());
        let text = BASE.replace("start = 0.2\nstop = 0.9\nstep = 0.1", "values = [0.2, \"inf\"]");
        assert!(Scenario::parse(&text).unwrap_err().to_string().contains("only accepted"));
    }

    #[test]
    fn h_s_length_must_match() {
        let text = BASE.replace("n_t = 3", "n_t = 4");
        let err = Scenario::parse(&text).unwrap_err().to_string();
        assert!(err.contains("lambda") || err.contains("h_s"), "{err}");
    }

    #[test]
    fn hash_ignores_layout_but_not_content() {
        let a = Scenario::parse(BASE).unwrap().hash();
        let spaced = BASE.replace("rate = 1", "rate   =   1   # bits").replace("[sweep]", "# comment\n[sweep]");
        assert_eq!(Scenario::parse(&spaced).unwrap().hash(), a);
        let changed = BASE.replace("rate = 1", "rate = 1.5");
        assert_ne!(Scenario::parse(&changed).unwrap().hash(), a);
        let described = BASE.replace("name = \"demo\"", "name = \"demo\"\ndescription = \"x\"");
        assert_eq!(Scenario::parse(&described).unwrap().hash(), a);
    }

    #[test]
    fn range_rounding() {
        assert_eq!(expand_range(0.0, 0.3, 0.1), vec![0.0, 0.1, 0.2, 0.3]);
        assert_eq!(expand_range(2.0, 30.0, 2.0).len(), 15);
        assert!(expand_range(1.0, 0.0, 0.1).is_empty());
    }
}
