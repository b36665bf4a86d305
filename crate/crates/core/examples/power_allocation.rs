//! CPA, UPA and custom spectra: mean interference at Eve and a searched
//! spectrum on frozen draws.

use anlab::analytics::{EveSnr, SecrecyScenario};
use anlab::beamformer::BeamformingBasis;
use anlab::channel::{fixed_main_channel, from_pairs};
use anlab::correlation::CorrelationMatrix;
use anlab::montecarlo::{estimate_outage, MonteCarloConfig};
use anlab::power_allocation::{cpa, custom, mean_interference, opa_search, upa, OpaOptions};

fn main() -> anlab::Result<()> {
    let t = CorrelationMatrix::from_spectrum(&[2.8, 0.7, 0.3, 0.2], None)?;
    let h_s = from_pairs(&[[0.1104, -0.6619], [-0.6677, 1.2432], [0.7588, 0.9201], [1.0196, 0.4098]]);
    let basis = BeamformingBasis::new(&fixed_main_channel(h_s, &t)?.h, &t)?;

    let sc = SecrecyScenario::new(0.6, 2.0, 10f64.powf(0.5), EveSnr::Infinite)?;
    let mc = MonteCarloConfig::new(200_000, 1);
    for alloc in [cpa(&basis), upa(4)?, custom(vec![1.5, 1.0, 0.5], 4)?] {
        let p = estimate_outage(&sc, &basis, &alloc, &mc)?;
        println!(
            "{:<6} phi {:?}: mean interference {:.4}, outage {:.4} +- {:.4}",
            alloc.kind().as_str(),
            alloc.phi(),
            mean_interference(&alloc, &basis),
            p.estimate,
            p.standard_error
        );
    }
    let opa = opa_search(&basis, &sc, &MonteCarloConfig::new(50_000, 2), OpaOptions::default())?;
    println!(
        "searched  phi {:?}: in-sample outage {:.4} after {} evaluations",
        opa.allocation.phi(),
        opa.outage.estimate,
        opa.evaluations
    );
    Ok(())
}
