//! Bessel, incomplete gamma, exponential integral and the antiderivative
//! used by the noisy-eavesdropper outage.

use anlab::special::{bessel_i0, expint_ei, f_antiderivative, f_difference, lower_incomplete_gamma, SeriesControl};

fn main() -> anlab::Result<()> {
    let k15 = SeriesControl::fixed(15);
    for t in [0.0, 1.0, 2.0, 5.0] {
        println!("I0({t}) = {:.12}", bessel_i0(t, k15)?);
    }
    println!("gamma(3, 2) = {:.12} (closed form {:.12})", lower_incomplete_gamma(3, 2.0)?, 2.0 - 10.0 * (-2.0f64).exp());
    for x in [-0.5, -1.0, -2.0, -10.0, -50.0] {
        println!("Ei({x}) = {:.6e}", expint_ei(x)?);
    }
    for n in [-2, 0, 2] {
        println!(
            "F({n}, 1, 2) = {:.8}; F({n}, 1, 3) - F({n}, 1, 0.5) = {:.8}",
            f_antiderivative(n, 1.0, 2.0)?,
            f_difference(n, 1.0, 0.5, 3.0)?
        );
    }
    Ok(())
}
