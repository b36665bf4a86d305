//! Transmit correlation matrices: the exponential array model, a prescribed
//! spectrum and an explicit matrix.

use anlab::correlation::CorrelationMatrix;

fn main() -> anlab::Result<()> {
    for rho_r in [0.0, 0.3, 0.9] {
        let t = CorrelationMatrix::exponential(4, 0.5, rho_r)?;
        let eig: Vec<String> = t.eigenvalues().iter().map(|l| format!("{l:.4}")).collect();
        println!(
            "exponential N_t=4 L=0.5 rho_r={rho_r}: eigenvalues [{}], trace {:.3}, reconstruction error {:.1e}",
            eig.join(", "),
            t.trace(),
            t.reconstruction_error()
        );
    }
    let t = CorrelationMatrix::exponential(4, 0.5, 0.5)?;
    println!("t_12 = {:.4}, t_14 = {:.4}", t.entries()[(0, 1)].re, t.entries()[(0, 3)].re);

    let s = CorrelationMatrix::from_spectrum(&[2.8, 0.7, 0.3, 0.2], None)?;
    println!("from spectrum: eigenvalues {:?}", s.eigenvalues().as_slice());

    let bad = CorrelationMatrix::from_spectrum(&[2.0, 1.0, 0.0, 1.0], None);
    println!("singular spectrum rejected: {}", bad.is_err());
    Ok(())
}
