//! Scenario-driven figure reproduction: parse a scenario, run its sweep,
//! write CSV, metadata and an SVG plot.

pub mod plot;
pub mod runner;
pub mod scenario;
pub mod table;

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub use plot::render_svg;
pub use runner::{run_scenario, RunOptions};
pub use scenario::{DbValue, Scenario, ScenarioFile};
pub use table::{ResultTable, Row, RowKind};

/// Figure scenarios shipped with the library.
pub const BUNDLED: &[(&str, &str)] = &[
    ("fig2", include_str!("../../scenarios/fig2.toml")),
    ("fig3", include_str!("../../scenarios/fig3.toml")),
    ("fig4a", include_str!("../../scenarios/fig4a.toml")),
    ("fig4b", include_str!("../../scenarios/fig4b.toml")),
    ("fig5", include_str!("../../scenarios/fig5.toml")),
    ("fig6", include_str!("../../scenarios/fig6.toml")),
];

pub fn bundled(name: &str) -> Option<Scenario> {
    let key = name.trim_end_matches(".toml");
    BUNDLED
        .iter()
        .find(|(n, _)| *n == key)
        .map(|(_, text)| Scenario::parse(text).expect("bundled scenarios are valid"))
}

/// `(name, description)` of every bundled scenario.
pub fn list_figures() -> Vec<(String, String)> {
    BUNDLED
        .iter()
        .map(|(n, text)| {
            let s = Scenario::parse(text).expect("bundled scenarios are valid");
            (n.to_string(), s.file.description)
        })
        .collect()
}

/// Loads `spec` from disk, falling back to a bundled scenario of that name.
pub fn resolve(spec: &str) -> Result<Scenario> {
    let path = Path::new(spec);
    if path.exists() {
        return Scenario::load(path);
    }
    let file_name = path.file_name().and_then(|n| n.to_str()).unwrap_or(spec);
    bundled(file_name).ok_or_else(|| Error::Scenario(format!("no scenario file or bundled figure named '{spec}'")))
}

#[derive(Debug, Clone)]
pub struct Outputs {
    pub csv: PathBuf,
    pub plot: Option<PathBuf>,
    pub table: ResultTable,
}

/// Runs `scenario` and writes its artifacts under `out`.
pub fn run_and_save(scenario: &Scenario, opts: &RunOptions, out: &Path, plot: bool) -> Result<Outputs> {
    let table = run_scenario(scenario, opts)?;
    let csv = table.save(out)?;
    let plot = if plot && !table.rows.is_empty() {
        let svg = render_svg(&table, scenario.file.plot.style)?;
        let p = out.join(format!("{}.svg", table.meta.scenario));
        std::fs::write(&p, svg)?;
        Some(p)
    } else {
        None
    };
    Ok(Outputs { csv, plot, table })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenarios_parse() {
        let names: Vec<String> = list_figures().into_iter().map(|(n, _)| n).collect();
        assert_eq!(names, ["fig2", "fig3", "fig4a", "fig4b", "fig5", "fig6"]);
        assert!(bundled("fig2.toml").is_some());
        assert!(resolve("scenarios/fig3.toml").is_ok());
        assert!(resolve("nope").is_err());
    }
}
