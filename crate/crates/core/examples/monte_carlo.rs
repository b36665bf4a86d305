//! Monte Carlo outage with standard errors, checked against the closed
//! form, and the outage averaged over main-channel draws.

use anlab::analytics::{exact_outage, EveSnr, SecrecyScenario};
use anlab::beamformer::BeamformingBasis;
use anlab::channel::{fixed_main_channel, from_pairs};
use anlab::correlation::CorrelationMatrix;
use anlab::montecarlo::{estimate_average_outage, estimate_outage, AverageSpec, MonteCarloConfig};
use anlab::optimizer::{AlphaSearch, EvaluatorKind};
use anlab::power_allocation::{cpa, AllocationKind, OpaOptions};
use anlab::special::SeriesControl;

fn main() -> anlab::Result<()> {
    let t = CorrelationMatrix::exponential(3, 0.5, 0.6)?;
    let h_s = from_pairs(&[[0.4, -0.9], [1.1, 0.3], [-0.2, 0.7]]);
    let basis = BeamformingBasis::new(&fixed_main_channel(h_s, &t)?.h, &t)?;
    let sc = SecrecyScenario::new(0.6, 1.0, 10.0, EveSnr::from_db(10.0))?;

    let closed = exact_outage(&sc, &basis, SeriesControl::default())?;
    for trials in [10_000, 100_000, 1_000_000] {
        let r = estimate_outage(&sc, &basis, &cpa(&basis), &MonteCarloConfig::new(trials, 3))?;
        println!(
            "{trials:>8} trials: {:.5} +- {:.5} (closed form {closed:.5}, {:.2} SE away)",
            r.estimate,
            r.standard_error,
            (r.estimate - closed).abs() / r.standard_error
        );
    }

    for kind in [AllocationKind::Cpa, AllocationKind::Upa] {
        let spec = AverageSpec {
            corr: t.clone(),
            template: sc,
            allocation: kind,
            evaluator: EvaluatorKind::MonteCarlo,
            opa: OpaOptions::default(),
            search: AlphaSearch { grid: 60, refine: 1 },
            series: SeriesControl::default(),
        };
        let avg = estimate_average_outage(&spec, &MonteCarloConfig::new(10_000, 4).with_h_realizations(50))?;
        println!(
            "{kind} minimum outage averaged over 50 channels: {:.4} +- {:.4}",
            avg.result.estimate, avg.result.standard_error
        );
    }
    Ok(())
}
