//! Closed-form secrecy outage against alpha in both Eve regimes, with the
//! fixed and adaptive outer series.

use anlab::analytics::{asymptotic_outage, exact_outage, EveSnr, SecrecyScenario};
use anlab::beamformer::BeamformingBasis;
use anlab::channel::{fixed_main_channel, from_pairs};
use anlab::correlation::CorrelationMatrix;
use anlab::optimizer::alpha_lower_bound;
use anlab::special::SeriesControl;

fn main() -> anlab::Result<()> {
    let t = CorrelationMatrix::exponential(3, 0.5, 0.6)?;
    let h_s = from_pairs(&[[0.4, -0.9], [1.1, 0.3], [-0.2, 0.7]]);
    let basis = BeamformingBasis::new(&fixed_main_channel(h_s, &t)?.h, &t)?;
    let template = SecrecyScenario::new(0.5, 1.0, 10.0, EveSnr::from_db(10.0))?;
    println!("alpha_l = {:.4}", alpha_lower_bound(&template, &basis));

    let k15 = SeriesControl::fixed(15);
    let adaptive = SeriesControl::adaptive(1e-12);
    println!("alpha   exact(10 dB)  asymptotic(K=15)  asymptotic(adaptive)");
    for i in 1..10 {
        let alpha = i as f64 / 10.0;
        let exact = exact_outage(&template.with_alpha(alpha), &basis, k15)?;
        let asym = SecrecyScenario { mu_e: EveSnr::Infinite, ..template.with_alpha(alpha) };
        println!(
            "{alpha:.1}     {exact:.6}      {:.6}          {:.6}",
            asymptotic_outage(&asym, &basis, k15)?,
            asymptotic_outage(&asym, &basis, adaptive)?
        );
    }
    Ok(())
}
