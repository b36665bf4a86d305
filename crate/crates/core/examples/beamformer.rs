//! Information beamformer, null-space basis and the eigen-system of
//! `Q = V_N† T V_N` for a fixed main channel.

use anlab::beamformer::BeamformingBasis;
use anlab::channel::{fixed_main_channel, from_pairs};
use anlab::correlation::CorrelationMatrix;
use anlab::linalg::{frobenius, row_mul, CMatrix};
use anlab::analytics::correlation_coefficient;

fn main() -> anlab::Result<()> {
    let t = CorrelationMatrix::from_spectrum(&[2.8, 0.7, 0.3, 0.2], None)?;
    let h_s = from_pairs(&[[0.1104, -0.6619], [-0.6677, 1.2432], [0.7588, 0.9201], [1.0196, 0.4098]]);
    let h = fixed_main_channel(h_s, &t)?.h;
    let basis = BeamformingBasis::new(&h, &t)?;

    println!("|h|^2 = {:.4}", basis.main_gain());
    let leak = row_mul(&h, basis.v_n());
    println!("h V_N (AN leaking to Bob): max |entry| = {:.1e}", leak.camax());
    let vn = basis.v_n();
    println!("V_N† V_N - I: {:.1e}", frobenius(&(vn.adjoint() * vn - CMatrix::identity(3, 3))));
    println!("theta = {:?}", basis.theta().as_slice());
    println!("v_I† T v_I = {:.4}", basis.info_power());
    println!("correlation coefficient rho = {:.4}", correlation_coefficient(&basis));
    Ok(())
}
