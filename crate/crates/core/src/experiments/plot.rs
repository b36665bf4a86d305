//! SVG outage plots.
//!
//! One series per (family value, Eve regime, allocation): closed-form rows
//! are drawn as lines, Monte Carlo rows as markers with ±1 SE bars.
//! Semilog plots place `log10(outage)` on a linear axis.

use std::collections::BTreeMap;

use plotters::prelude::*;

use crate::error::{Error, Result};

use super::scenario::PlotStyle;
use super::table::{ResultTable, Row, RowKind};

const WIDTH: u32 = 800;
const HEIGHT: u32 = 560;
const FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub label: String,
    pub line: Vec<(f64, f64)>,
    /// `(x, y, se)`
    pub markers: Vec<(f64, f64, f64)>,
}

fn plot_err(e: impl std::fmt::Display) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

fn is_plotted(row: &Row) -> bool {
    // optimum rows of alpha sweeps sit at α* rather than on a sweep point
    !(row.sweep_variable == "alpha" && row.kind == RowKind::Optimum)
}

/// Groups plottable rows into series, in first-appearance order.
pub fn collect_series(table: &ResultTable) -> Vec<PlotSeries> {
    let mut order: Vec<String> = Vec::new();
    let mut map: BTreeMap<String, PlotSeries> = BTreeMap::new();
    let sweeps_mu_e = table.rows.first().is_some_and(|r| r.sweep_variable == "mu_E_dB");
    for row in table.rows.iter().filter(|r| is_plotted(r)) {
        let Ok(x) = row.sweep_value.parse::<f64>() else { continue };
        if !x.is_finite() {
            continue;
        }
        let mut label = row.allocation.to_uppercase();
        if !row.family_variable.is_empty() {
            label.push_str(&format!(" {}={}", row.family_variable, row.family_value));
        }
        if !sweeps_mu_e && row.family_variable != "mu_E_dB" {
            label.push_str(&format!(" mu_E={}", row.mu_e_db));
        }
        let entry = map.entry(label.clone()).or_insert_with(|| {
            order.push(label.clone());
            PlotSeries { label, line: Vec::new(), markers: Vec::new() }
        });
        if row.evaluator == "analytic" {
            entry.line.push((x, row.outage));
        } else {
            entry.markers.push((x, row.outage, row.standard_error));
        }
    }
    order.into_iter().filter_map(|k| map.remove(&k)).collect()
}

/// Renders `table` as an SVG document.
pub fn render_svg(table: &ResultTable, style: PlotStyle) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::Validation("cannot plot an empty table".into()));
    }
    let series = collect_series(table);
    let log = style == PlotStyle::Semilogy;
    let ty = |y: f64| if log { y.max(FLOOR).log10() } else { y };

    let xs: Vec<f64> = series
        .iter()
        .flat_map(|s| s.line.iter().map(|p| p.0).chain(s.markers.iter().map(|p| p.0)))
        .collect();
    let ys: Vec<f64> = series
        .iter()
        .flat_map(|s| s.line.iter().map(|p| p.1).chain(s.markers.iter().map(|p| p.1)))
        .collect();
    let (mut x0, mut x1) = bounds(&xs, (0.0, 1.0));
    if x0 == x1 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let (y0, y1) = if log {
        let lo = ys.iter().copied().filter(|&y| y > 0.0).fold(1.0, f64::min).max(FLOOR);
        (lo.log10().floor(), 0.0)
    } else {
        (0.0, 1.0)
    };
    let (y0, y1) = if y0 == y1 { (y0 - 1.0, y1) } else { (y0, y1) };

    let first = &table.rows[0];
    let x_desc = first.sweep_variable.clone();
    let title = format!("{} ({})", table.meta.scenario, table.meta.scenario_hash);

    let mut buf = String::new();
    {
        let root = SVGBackend::with_string(&mut buf, (WIDTH, HEIGHT)).into_drawing_area();
        root.fill(&WHITE).map_err(plot_err)?;
        let mut chart = ChartBuilder::on(&root)
            .caption(title, ("sans-serif", 18))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(60)
            .build_cartesian_2d(x0..x1, y0..y1)
            .map_err(plot_err)?;
        chart
            .configure_mesh()
            .x_desc(x_desc)
            .y_desc("secrecy outage probability")
            .y_label_formatter(&|v| if log { format!("1e{}", v.round()) } else { format!("{v:.2}") })
            .draw()
            .map_err(plot_err)?;

        for (i, s) in series.iter().enumerate() {
            let color = Palette99::pick(i).to_rgba();
            let legend_color = color;
            let mut line: Vec<(f64, f64)> = s.line.iter().map(|&(x, y)| (x, ty(y))).collect();
            line.sort_by(|a, b| a.0.total_cmp(&b.0));
            if !line.is_empty() {
                chart
                    .draw_series(LineSeries::new(line, color.stroke_width(2)))
                    .map_err(plot_err)?
                    .label(s.label.clone())
                    .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], legend_color.stroke_width(2)));
            }
            let pts: Vec<(f64, f64, f64)> = s.markers.iter().copied().filter(|m| !log || m.1 > 0.0).collect();
            let marked = chart
                .draw_series(pts.iter().map(|&(x, y, _)| Circle::new((x, ty(y)), 3, color.filled())))
                .map_err(plot_err)?;
            if s.line.is_empty() {
                marked
                    .label(s.label.clone())
                    .legend(move |(x, y)| Circle::new((x + 10, y), 3, legend_color.filled()));
            }
            let bars: Vec<_> = error_bars(&pts)
                .into_iter()
                .map(|(x, lo, y, hi)| ErrorBar::new_vertical(x, ty(lo), ty(y), ty(hi), color.stroke_width(1), 6))
                .collect();
            chart.draw_series(bars).map_err(plot_err)?;
        }
        chart
            .configure_series_labels()
            .border_style(BLACK)
            .background_style(WHITE.mix(0.85))
            .position(SeriesLabelPosition::LowerRight)
            .draw()
            .map_err(plot_err)?;
        root.present().map_err(plot_err)?;
    }
    Ok(buf)
}

/// `(x, y - se, y, y + se)` for markers with a positive standard error.
pub fn error_bars(markers: &[(f64, f64, f64)]) -> Vec<(f64, f64, f64, f64)> {
    markers
        .iter()
        .filter(|m| m.2 > 0.0)
        .map(|&(x, y, se)| (x, y - se, y, y + se))
        .collect()
}

fn bounds(v: &[f64], default: (f64, f64)) -> (f64, f64) {
    if v.is_empty() {
        return default;
    }
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::table::Metadata;

    fn table(rows: Vec<Row>) -> ResultTable {
        ResultTable {
            meta: Metadata {
                scenario: "t".into(),
                scenario_hash: "00".into(),
                seed: 1,
                workers: 0,
                tool_version: "0".into(),
                wall_time_s: 0.0,
                rows: rows.len(),
            },
            rows,
        }
    }

    fn row(x: f64, alloc: &str, eval: &str, y: f64, se: f64) -> Row {
        Row {
            sweep_variable: "alpha".into(),
            sweep_value: x.to_string(),
            family_variable: String::new(),
            family_value: String::new(),
            mu_e_db: "inf".into(),
            allocation: alloc.into(),
            evaluator: eval.into(),
            kind: RowKind::Point,
            alpha: Some(x),
            alpha_star: None,
            outage: y,
            standard_error: se,
            trials: 10,
            h_realizations: 1,
            infeasible: false,
            fingerprint: String::new(),
        }
    }

    #[test]
    fn single_row_plots() {
        let svg = render_svg(&table(vec![row(0.5, "cpa", "mc", 0.2, 0.01)]), PlotStyle::Semilogy).unwrap();
        assert!(svg.starts_with("<svg"));
    }

    #[test]
    fn analytic_only_draws_no_error_bars() {
        let t = table(vec![row(0.4, "cpa", "analytic", 0.3, 0.0), row(0.6, "cpa", "analytic", 0.1, 0.0)]);
        render_svg(&t, PlotStyle::Linear).unwrap();
        assert!(collect_series(&t).iter().all(|s| error_bars(&s.markers).is_empty()));
        let zero_se = [(0.4, 0.3, 0.0)];
        assert!(error_bars(&zero_se).is_empty());
        assert_eq!(error_bars(&[(0.4, 0.3, 0.01)]).len(), 1);
    }

    #[test]
    fn series_merge_lines_and_markers() {
        let t = table(vec![
            row(0.4, "cpa", "analytic", 0.3, 0.0),
            row(0.4, "cpa", "mc", 0.31, 0.01),
            row(0.4, "upa", "mc", 0.5, 0.01),
        ]);
        let s = collect_series(&t);
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].line.len(), s[0].markers.len()), (1, 1));
    }

    #[test]
    fn deterministic_output() {
        let t = table(vec![row(0.4, "cpa", "analytic", 0.3, 0.0), row(0.6, "upa", "mc", 0.1, 0.01)]);
        assert_eq!(render_svg(&t, PlotStyle::Semilogy).unwrap(), render_svg(&t, PlotStyle::Semilogy).unwrap());
    }

    #[test]
    fn empty_table_is_an_error() {
        assert!(render_svg(&table(vec![]), PlotStyle::Semilogy).is_err());
    }
}
