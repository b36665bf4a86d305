//! Minimizing outage over the information power fraction alpha with the
//! closed-form and Monte Carlo evaluators.

use anlab::analytics::{EveSnr, SecrecyScenario};
use anlab::beamformer::BeamformingBasis;
use anlab::channel::{fixed_main_channel, from_pairs};
use anlab::correlation::CorrelationMatrix;
use anlab::montecarlo::MonteCarloConfig;
use anlab::optimizer::{optimize_alpha, AlphaSearch, Evaluator, Strategy};
use anlab::power_allocation::{cpa, upa, OpaOptions};
use anlab::special::SeriesControl;

fn main() -> anlab::Result<()> {
    let t = CorrelationMatrix::exponential(3, 0.5, 0.6)?;
    let h_s = from_pairs(&[[0.4, -0.9], [1.1, 0.3], [-0.2, 0.7]]);
    let basis = BeamformingBasis::new(&fixed_main_channel(h_s, &t)?.h, &t)?;
    let template = SecrecyScenario::new(0.5, 1.0, 10.0, EveSnr::from_db(15.0))?;
    let search = AlphaSearch::default();
    let mc = Evaluator::MonteCarlo(MonteCarloConfig::new(100_000, 5));

    let runs = [
        ("CPA closed form", Strategy::Fixed(cpa(&basis)), Evaluator::Analytic(SeriesControl::default())),
        ("CPA Monte Carlo", Strategy::Fixed(cpa(&basis)), mc.clone()),
        ("UPA Monte Carlo", Strategy::Fixed(upa(3)?), mc.clone()),
        ("searched spectrum", Strategy::Searched(OpaOptions::default()), mc),
    ];
    for (label, strategy, evaluator) in runs {
        let opt = optimize_alpha(&template, &basis, &strategy, &evaluator, &AlphaSearch { grid: 80, ..search })?;
        println!(
            "{label:<18} alpha* = {:.4}  P* = {:.5} +- {:.5}  ({} curve points)",
            opt.alpha_star.unwrap_or(f64::NAN),
            opt.outage.estimate,
            opt.outage.standard_error,
            opt.curve.len()
        );
    }

    let hopeless = SecrecyScenario { rate: 8.0, ..template };
    let opt = optimize_alpha(&hopeless, &basis, &Strategy::Fixed(cpa(&basis)), &Evaluator::Analytic(SeriesControl::default()), &search)?;
    println!("rate 8: alpha* = {:?}, outage {}", opt.alpha_star, opt.outage.estimate);
    Ok(())
}
