//! Transmit-side correlation matrices `T` and their decompositions.
//!
//! A [`CorrelationMatrix`] is immutable once built. It carries the
//! eigendecomposition `T = U_T Λ U_T†` (eigenvalues nonincreasing) and a
//! Cholesky root `R` with `T = R†R`, so that a row vector `h_s R` has
//! covariance `T`. Channel sampling uses the eigen form `h_s √Λ U_T†`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{diag_real, frobenius, hermitian_eigen, is_hermitian, CMatrix};

const HERMITIAN_TOL: f64 = 1e-12;
const UNIT_DIAGONAL_TOL: f64 = 1e-9;
const TRACE_TOL: f64 = 1e-6;
/// Smallest eigenvalue must exceed this fraction of the largest.
const PD_RELATIVE_TOL: f64 = 1e-10;

/// Antenna layout behind a correlation matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ArrayGeometry {
    /// Uniform linear array of length `length_m` with `t_ij = rho_r^{δ_ij}`.
    ExponentialUla {
        length_m: f64,
        rho_r: f64,
        positions: Vec<f64>,
    },
    ExplicitMatrix,
    /// Built from a spectrum; unit diagonal is not enforced.
    Spectrum,
}

impl ArrayGeometry {
    /// `|position_i - position_j|` in meters, for ULA geometries.
    pub fn spacing(&self, i: usize, j: usize) -> Option<f64> {
        match self {
            ArrayGeometry::ExponentialUla { positions, .. } => {
                Some((positions[i] - positions[j]).abs())
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    entries: CMatrix,
    eigenvectors: CMatrix,
    eigenvalues: DVector<f64>,
    cholesky_root: CMatrix,
    geometry: ArrayGeometry,
}

impl CorrelationMatrix {
    /// Exponential model on a uniform linear array: `t_ij = rho_r^{δ_ij}`
    /// with spacing `length_m / (n - 1)`.
    pub fn exponential(n: usize, length_m: f64, rho_r: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("need at least 2 antennas, got {n}")));
        }
        if !(0.0..=1.0).contains(&rho_r) || rho_r.is_nan() {
            return Err(Error::Domain(format!("rho_r = {rho_r} is outside [0, 1]")));
        }
        if !(length_m > 0.0) || !length_m.is_finite() {
            return Err(Error::Domain(format!("array length {length_m} must be positive")));
        }
        if rho_r == 1.0 {
            return Err(Error::DegenerateCorrelation(
                "rho_r = 1 makes every antenna fully correlated (T has rank one)".into(),
            ));
        }
        let step = length_m / (n - 1) as f64;
        let positions: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
        let mut t = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let delta = (positions[i] - positions[j]).abs();
                // 0^0 = 1 on the diagonal
                let v = if i == j { 1.0 } else { rho_r.powf(delta) };
                t[(i, j)] = Complex64::new(v, 0.0);
            }
        }
        Self::finish(
            t,
            ArrayGeometry::ExponentialUla {
                length_m,
                rho_r,
                positions,
            },
        )
    }

    /// Validates an explicit Hermitian, positive definite, unit-diagonal matrix.
    pub fn from_explicit(matrix: CMatrix) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 || matrix.ncols() != n {
            return Err(Error::Validation(format!(
                "correlation matrix must be square and nonempty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !is_hermitian(&matrix, HERMITIAN_TOL) {
            return Err(Error::Validation("matrix is not Hermitian".into()));
        }
        for i in 0..n {
            let d = matrix[(i, i)];
            if (d.re - 1.0).abs() > UNIT_DIAGONAL_TOL || d.im.abs() > UNIT_DIAGONAL_TOL {
                return Err(Error::Validation(format!(
                    "diagonal entry {i} is {d}, not 1 (unit average fading power)"
                )));
            }
        }
        Self::finish(matrix, ArrayGeometry::ExplicitMatrix).map_err(|e| match e {
            Error::DegenerateCorrelation(msg) => {
                Error::Validation(format!("matrix is not positive definite: {msg}"))
            }
            other => other,
        })
    }

    /// `T = U_T diag(λ) U_T†` from a spectrum summing to `N_t`. `U_T`
    /// defaults to the identity. The result need not have unit diagonal.
    pub fn from_spectrum(lambda: &[f64], unitary: Option<&CMatrix>) -> Result<Self> {
        let n = lambda.len();
        if n == 0 {
            return Err(Error::Domain("empty spectrum".into()));
        }
        if lambda.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(Error::Domain("every eigenvalue must be positive".into()));
        }
        let trace: f64 = lambda.iter().sum();
        if (trace - n as f64).abs() > TRACE_TOL {
            return Err(Error::Domain(format!(
                "eigenvalues sum to {trace}, expected N_t = {n}"
            )));
        }
        let d = diag_real(lambda);
        let t = match unitary {
            None => d,
            Some(u) => {
                if u.nrows() != n || u.ncols() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: u.nrows(),
                    });
                }
                let uu = u.adjoint() * u;
                if frobenius(&(uu - CMatrix::identity(n, n))) > 1e-9 {
                    return Err(Error::Domain("U_T is not unitary".into()));
                }
                let t = u * d * u.adjoint();
                // symmetrize away rounding
                (&t + t.adjoint()) * Complex64::new(0.5, 0.0)
            }
        };
        Self::finish(t, ArrayGeometry::Spectrum)
    }

    fn finish(entries: CMatrix, geometry: ArrayGeometry) -> Result<Self> {
        let (eigenvalues, eigenvectors) = hermitian_eigen(&entries);
        let n = entries.nrows();
        let top = eigenvalues[0];
        let bottom = eigenvalues[n - 1];
        if !(top > 0.0) || bottom <= PD_RELATIVE_TOL * top {
            return Err(Error::DegenerateCorrelation(format!(
                "smallest eigenvalue {bottom:.3e} is not above {PD_RELATIVE_TOL:.0e} x largest {top:.3e}"
            )));
        }
        let chol = entries.clone().cholesky().ok_or_else(|| {
            Error::DegenerateCorrelation("Cholesky factorization failed".into())
        })?;
        // T = L L†, so R = L† satisfies T = R† R.
        let cholesky_root = chol.l().adjoint();
        Ok(Self {
            entries,
            eigenvectors,
            eigenvalues,
            cholesky_root,
            geometry,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::finish(CMatrix::identity(n, n), ArrayGeometry::ExplicitMatrix)
            .expect("identity is positive definite")
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn cholesky_root(&self) -> &CMatrix {
        &self.cholesky_root
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geometry
    }

    /// `√Λ U_T†`, the right factor used by [`crate::channel::correlate`].
    pub fn eigen_root(&self) -> CMatrix {
        let sqrt: Vec<f64> = self.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
        diag_real(&sqrt) * self.eigenvectors.adjoint()
    }

    /// Frobenius norm of `U_T Λ U_T† - T`.
    pub fn reconstruction_error(&self) -> f64 {
        let d = diag_real(self.eigenvalues.as_slice());
        let r = &self.eigenvectors * d * self.eigenvectors.adjoint();
        frobenius(&(r - &self.entries))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).sum()
    }

    /// Real part of the entries; the exponential model is real symmetric.
    pub fn real_entries(&self) -> DMatrix<f64> {
        self.entries.map(|z| z.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;
    use proptest::prelude::*;

    #[test]
    fn uncorrelated_is_identity() {
        let t = CorrelationMatrix::exponential(3, 0.5, 0.0).unwrap();
        assert_eq!(t.entries(), &CMatrix::identity(3, 3));
    }

    #[test]
    fn three_antenna_spacings() {
        let t = CorrelationMatrix::exponential(3, 0.5, 0.7).unwrap();
        let g = t.geometry();
        assert!((g.spacing(0, 1).unwrap() - 0.25).abs() < 1e-15);
        assert!((g.spacing(1, 2).unwrap() - 0.25).abs() < 1e-15);
        assert!((g.spacing(0, 2).unwrap() - 0.5).abs() < 1e-15);
        assert!((t.entries()[(0, 2)].re - 0.7f64.powf(0.5)).abs() < 1e-15);
    }

    #[test]
    fn two_by_two_eigenvalues() {
        let t = CorrelationMatrix::exponential(2, 1.0, 0.5).unwrap();
        assert!((t.entries()[(0, 1)].re - 0.5).abs() < 1e-15);
        let l = t.eigenvalues();
        assert!((l[0] - 1.5).abs() < 1e-14 && (l[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn full_correlation_is_rejected() {
        assert!(matches!(
            CorrelationMatrix::exponential(3, 0.5, 1.0),
            Err(Error::DegenerateCorrelation(_))
        ));
        assert!(matches!(
            CorrelationMatrix::exponential(3, 0.5, 1.2),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            CorrelationMatrix::exponential(3, 0.5, -0.1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn explicit_identity() {
        let t = CorrelationMatrix::from_explicit(CMatrix::identity(4, 4)).unwrap();
        assert!(t.eigenvalues().iter().all(|&l| (l - 1.0).abs() < 1e-15));
    }

    #[test]
    fn explicit_rank_one_is_not_pd() {
        let m = CMatrix::from_element(2, 2, ONE);
        match CorrelationMatrix::from_explicit(m) {
            Err(Error::Validation(msg)) => assert!(msg.contains("positive definite")),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn explicit_rejects_non_hermitian_and_non_unit_diagonal() {
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = Complex64::new(0.3, 0.0);
        assert!(matches!(
            CorrelationMatrix::from_explicit(m),
            Err(Error::Validation(msg)) if msg.contains("Hermitian")
        ));
        let m = diag_real(&[2.0, 1.0]);
        assert!(matches!(
            CorrelationMatrix::from_explicit(m),
            Err(Error::Validation(msg)) if msg.contains("diagonal")
        ));
    }

    #[test]
    fn explicit_with_rotated_spectrum() {
        // normalized 4x4 Hadamard matrix
        let h = 0.5;
        let u = CMatrix::from_row_slice(
            4,
            4,
            &[
                h, h, h, h, h, -h, h, -h, h, h, -h, -h, h, -h, -h, h,
            ]
            .map(|x| Complex64::new(x, 0.0)),
        );
        let t = CorrelationMatrix::from_spectrum(&[2.8, 0.7, 0.3, 0.2], Some(&u)).unwrap();
        let l = t.eigenvalues();
        for (a, b) in l.iter().zip([2.8, 0.7, 0.3, 0.2]) {
            assert!((a - b).abs() < 1e-12);
        }
        // Hadamard rotation spreads the trace evenly: unit diagonal, so it is
        // also accepted as an explicit correlation matrix.
        let explicit = CorrelationMatrix::from_explicit(t.entries().clone()).unwrap();
        assert!((explicit.eigenvalues()[0] - 2.8).abs() < 1e-12);
    }

    #[test]
    fn spectrum_constructor() {
        let t = CorrelationMatrix::from_spectrum(&[2.8, 0.7, 0.3, 0.2], None).unwrap();
        assert_eq!(t.entries(), &diag_real(&[2.8, 0.7, 0.3, 0.2]));
        let t = CorrelationMatrix::from_spectrum(&[1.0; 5], None).unwrap();
        assert_eq!(t.entries(), &CMatrix::identity(5, 5));
        assert!(matches!(
            CorrelationMatrix::from_spectrum(&[3.0, 1.0], None),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn cholesky_root_reconstructs() {
        let t = CorrelationMatrix::exponential(5, 0.5, 0.6).unwrap();
        let r = t.cholesky_root();
        assert!(frobenius(&(r.adjoint() * r - t.entries())) < 1e-12);
        let e = t.eigen_root();
        assert!(frobenius(&(e.adjoint() * &e - t.entries())) < 1e-12);
    }

    #[test]
    fn largest_eigenvalue_grows_with_rho() {
        let mut prev = 0.0;
        for i in 0..=49 {
            let rho = i as f64 / 50.0;
            let l1 = CorrelationMatrix::exponential(6, 0.5, rho).unwrap().eigenvalues()[0];
            assert!(l1 >= prev - 1e-12, "λ1 dropped at rho_r = {rho}");
            prev = l1;
        }
        let near = CorrelationMatrix::exponential(6, 0.5, 0.999_999).unwrap();
        assert!((near.eigenvalues()[0] - 6.0).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn exponential_invariants(n in 2usize..9, len in 0.05f64..3.0, rho in 0.0f64..0.98) {
            let t = CorrelationMatrix::exponential(n, len, rho).unwrap();
            prop_assert!(t.reconstruction_error() < 1e-10);
            let l = t.eigenvalues();
            prop_assert!(l.iter().zip(l.iter().skip(1)).all(|(a, b)| a >= b));
            prop_assert!((l.sum() - n as f64).abs() < 1e-10);
            prop_assert!((t.trace() - n as f64).abs() < 1e-12);
            // Toeplitz, real, symmetric
            let e = t.entries();
            for i in 0..n {
                for j in 0..n {
                    prop_assert!(e[(i, j)].im == 0.0);
                    prop_assert!((e[(i, j)] - e[(j, i)]).norm() == 0.0);
                    if i + 1 < n && j + 1 < n {
                        prop_assert!((e[(i, j)].re - e[(i + 1, j + 1)].re).abs() < 1e-12);
                    }
                }
            }
            // strictly decreasing away from the diagonal
            if rho > 0.0 {
                for j in 1..n {
                    prop_assert!(e[(0, j)].re < e[(0, j - 1)].re);
                }
            }
        }
    }
}
