//! Information beam `v_I`, artificial-noise basis `V_N` and the projected
//! correlation `Q = V_N† T V_N`.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::correlation::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::linalg::{
    fix_phase, frobenius, hermitian_eigen, householder_completion, norm_sqr, row_dot, row_mul,
    sesquilinear, CMatrix, CVector,
};

#[derive(Debug, Clone)]
pub struct BeamformingBasis {
    h: CVector,
    v_i: CVector,
    v_n: CMatrix,
    q: CMatrix,
    w: CMatrix,
    theta: DVector<f64>,
    /// `v_I† T v_I`
    tvv: f64,
    /// `v_I† T V_N w_I`
    cross: Complex64,
    /// `√Λ U_T† v_I`: Eve's information gain is `g_s · info_tap`.
    info_tap: CVector,
    /// `√Λ U_T† V_N W`: column `m` maps `g_s` to `(g V_N W)_m`.
    noise_taps: CMatrix,
    /// Eigenvalues of `T`, indexed like the entries of `g_s`.
    spectrum: Vec<f64>,
}

impl BeamformingBasis {
    /// Basis for main channel `h`, with `V_N` from a Householder completion
    /// of `v_I = h†/‖h‖`.
    pub fn new(h: &CVector, corr: &CorrelationMatrix) -> Result<Self> {
        let n = h.len();
        if n != corr.dim() {
            return Err(Error::DimensionMismatch {
                expected: corr.dim(),
                found: n,
            });
        }
        if n < 2 {
            return Err(Error::NoNullSpace);
        }
        let norm = norm_sqr(h).sqrt();
        if !(norm > 0.0) {
            return Err(Error::DegenerateChannel);
        }
        let v_i = h.map(|z| z.conj() / norm);
        let full = householder_completion(&v_i);
        let v_n = full.columns(1, n - 1).into_owned();
        Self::assemble(h, v_i, v_n, corr)
    }

    /// Same main channel with a caller-supplied null-space basis.
    pub fn with_null_basis(
        h: &CVector,
        v_n: CMatrix,
        corr: &CorrelationMatrix,
    ) -> Result<Self> {
        let n = h.len();
        if v_n.nrows() != n || v_n.ncols() + 1 != n {
            return Err(Error::DimensionMismatch {
                expected: n - 1,
                found: v_n.ncols(),
            });
        }
        let norm = norm_sqr(h).sqrt();
        if !(norm > 0.0) {
            return Err(Error::DegenerateChannel);
        }
        let v_i = h.map(|z| z.conj() / norm);
        let gram = v_n.adjoint() * &v_n;
        if frobenius(&(gram - CMatrix::identity(n - 1, n - 1))) > 1e-9 {
            return Err(Error::Validation("V_N columns are not orthonormal".into()));
        }
        if (v_n.adjoint() * &v_i).norm() > 1e-9 {
            return Err(Error::Validation("V_N is not orthogonal to v_I".into()));
        }
        Self::assemble(h, v_i, v_n, corr)
    }

    fn assemble(h: &CVector, v_i: CVector, v_n: CMatrix, corr: &CorrelationMatrix) -> Result<Self> {
        let t = corr.entries();
        let q_raw = v_n.adjoint() * t * &v_n;
        let q = (&q_raw + q_raw.adjoint()) * Complex64::new(0.5, 0.0);
        let (theta, mut w) = hermitian_eigen(&q);
        for j in 0..w.ncols() {
            let mut col: CVector = w.column(j).into_owned();
            fix_phase(&mut col);
            w.set_column(j, &col);
        }
        let tvv = sesquilinear(&v_i, t, &v_i).re;
        let vnw = &v_n * &w;
        let w_i_dir: CVector = vnw.column(0).into_owned();
        let cross = sesquilinear(&v_i, t, &w_i_dir);
        let root = corr.eigen_root();
        let info_tap = &root * &v_i;
        let noise_taps = &root * &vnw;
        Ok(Self {
            h: h.clone(),
            v_i,
            v_n,
            q,
            w,
            theta,
            tvv,
            cross,
            info_tap,
            noise_taps,
            spectrum: corr.eigenvalues().iter().copied().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &CVector {
        &self.h
    }

    pub fn main_gain(&self) -> f64 {
        norm_sqr(&self.h)
    }

    pub fn v_i(&self) -> &CVector {
        &self.v_i
    }

    pub fn v_n(&self) -> &CMatrix {
        &self.v_n
    }

    pub fn q(&self) -> &CMatrix {
        &self.q
    }

    pub fn w(&self) -> &CMatrix {
        &self.w
    }

    pub fn w_i(&self) -> CVector {
        self.w.column(0).into_owned()
    }

    pub fn theta(&self) -> &DVector<f64> {
        &self.theta
    }

    pub fn theta_max(&self) -> f64 {
        self.theta[0]
    }

    /// `v_I† T v_I`.
    pub fn info_power(&self) -> f64 {
        self.tvv
    }

    /// `v_I† T V_N w_I`.
    pub fn cross_term(&self) -> Complex64 {
        self.cross
    }

    pub fn info_tap(&self) -> &CVector {
        &self.info_tap
    }

    pub fn noise_taps(&self) -> &CMatrix {
        &self.noise_taps
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }
}

pub fn build_basis(h: &CVector, corr: &CorrelationMatrix) -> Result<BeamformingBasis> {
    BeamformingBasis::new(h, corr)
}

/// `(g·v_I, g·V_N)` for a row vector `g`.
pub fn effective_gains(g: &CVector, basis: &BeamformingBasis) -> Result<(Complex64, CVector)> {
    if g.len() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: g.len(),
        });
    }
    Ok((row_dot(g, &basis.v_i), row_mul(g, &basis.v_n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{correlate, from_pairs, sample_whitened, StreamFactory};
    use crate::linalg::{diag_real, ONE, ZERO};
    use anlab_oracle::hermitian_eigenvalues;
    use proptest::prelude::*;

    fn fig2() -> (CVector, CorrelationMatrix) {
        let t = CorrelationMatrix::from_spectrum(&[2.8, 0.7, 0.3, 0.2], None).unwrap();
        let h_s = from_pairs(&[
            [0.1104, -0.6619],
            [-0.6677, 1.2432],
            [0.7588, 0.9201],
            [1.0196, 0.4098],
        ]);
        (correlate(&h_s, &t).unwrap(), t)
    }

    fn check_invariants(b: &BeamformingBasis) {
        let n = b.dim();
        let hv = row_mul(b.h(), b.v_n());
        assert!(hv.iter().all(|z| z.norm() < 1e-10));
        let gram = b.v_n().adjoint() * b.v_n();
        assert!(frobenius(&(gram - CMatrix::identity(n - 1, n - 1))) < 1e-10);
        assert!((norm_sqr(b.v_i()) - 1.0).abs() < 1e-12);
        assert!((b.v_n().adjoint() * b.v_i()).norm() < 1e-10);
        let recon = b.w() * diag_real(b.theta().as_slice()) * b.w().adjoint();
        assert!(frobenius(&(recon - b.q())) < 1e-10);
        let w_i = b.w_i();
        assert!((b.q() * &w_i - &w_i * Complex64::new(b.theta_max(), 0.0)).norm() < 1e-9);
        let th = b.theta();
        assert!(th.iter().zip(th.iter().skip(1)).all(|(x, y)| x >= y));
    }

    #[test]
    fn identity_correlation_gives_identity_q() {
        let t = CorrelationMatrix::identity(4);
        let h = CVector::from_vec(vec![Complex64::new(2.0, 0.0), ZERO, ZERO, ZERO]);
        let b = build_basis(&h, &t).unwrap();
        check_invariants(&b);
        assert!(frobenius(&(b.q() - CMatrix::identity(3, 3))) < 1e-14);
        assert!(b.theta().iter().all(|&x| (x - 1.0).abs() < 1e-14));
    }

    #[test]
    fn two_antenna_closed_form() {
        let t = CorrelationMatrix::exponential(2, 1.0, 0.4).unwrap();
        let h = CVector::from_vec(vec![ONE, ONE]);
        let b = build_basis(&h, &t).unwrap();
        check_invariants(&b);
        assert!((b.theta()[0] - 0.6).abs() < 1e-14);
        let v = b.v_n();
        assert!((v[(0, 0)] + v[(1, 0)]).norm() < 1e-14);
        assert!((v[(0, 0)].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn fig2_theta_matches_independent_eigensolver() {
        let (h, t) = fig2();
        let b = build_basis(&h, &t).unwrap();
        check_invariants(&b);
        // Form V_N† T V_N by hand and hand it to the Jacobi oracle.
        let q = b.v_n().adjoint() * t.entries() * b.v_n();
        let n = q.nrows();
        let re: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| q[(i, j)].re).collect()).collect();
        let im: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| q[(i, j)].im).collect()).collect();
        let oracle = hermitian_eigenvalues(&re, &im);
        for (a, o) in b.theta().iter().zip(&oracle) {
            assert!((a - o).abs() < 1e-12, "{a} vs {o}");
        }
        assert!((b.theta_max() - 1.95986).abs() < 1e-5);
    }

    #[test]
    fn degenerate_inputs() {
        let t = CorrelationMatrix::identity(3);
        assert!(matches!(
            build_basis(&CVector::zeros(3), &t),
            Err(Error::DegenerateChannel)
        ));
        let t1 = CorrelationMatrix::identity(1);
        assert!(matches!(
            build_basis(&CVector::from_vec(vec![ONE]), &t1),
            Err(Error::NoNullSpace)
        ));
    }

    #[test]
    fn gains_along_and_against_h() {
        let (h, t) = fig2();
        let b = build_basis(&h, &t).unwrap();
        let g = &h / Complex64::new(norm_sqr(&h).sqrt(), 0.0);
        let (a, bv) = effective_gains(&g, &b).unwrap();
        assert!((a - ONE).norm() < 1e-14);
        assert!(bv.norm() < 1e-14);
        // conjugated null-space column: g·v_I = 0
        let g: CVector = b.v_n().column(0).map(|z| z.conj()).into_owned();
        let (a, _) = effective_gains(&g, &b).unwrap();
        assert!(a.norm() < 1e-14);
    }

    #[test]
    fn principal_direction_gain_mean_is_theta_max() {
        let (h, t) = fig2();
        let b = build_basis(&h, &t).unwrap();
        let f = StreamFactory::new(21);
        let w_i = b.w_i();
        let n = 1_000_000usize;
        let (mut s, mut s2) = (0.0, 0.0);
        for k in 0..n {
            let g = correlate(&sample_whitened(&mut f.source(k as u64), 4), &t).unwrap();
            let (_, bv) = effective_gains(&g, &b).unwrap();
            let x = row_dot(&bv, &w_i).norm_sqr();
            s += x;
            s2 += x * x;
        }
        let nf = n as f64;
        let mean = s / nf;
        let se = ((s2 / nf - mean * mean) / nf).sqrt();
        assert!((mean - b.theta_max()).abs() < 3.0 * se, "{mean} vs {}", b.theta_max());
    }

    #[test]
    fn taps_reproduce_effective_gains() {
        let (h, t) = fig2();
        let b = build_basis(&h, &t).unwrap();
        let g_s = sample_whitened(&mut StreamFactory::new(2).source(0), 4);
        let g = correlate(&g_s, &t).unwrap();
        let (a, bv) = effective_gains(&g, &b).unwrap();
        assert!((row_dot(&g_s, b.info_tap()) - a).norm() < 1e-13);
        let bw = row_mul(&bv, b.w());
        assert!((row_mul(&g_s, b.noise_taps()) - bw).norm() < 1e-13);
    }

    #[test]
    fn rotated_null_basis_keeps_theta() {
        let t = CorrelationMatrix::exponential(4, 0.5, 0.7).unwrap();
        let h = correlate(&sample_whitened(&mut StreamFactory::new(4).source(1), 4), &t).unwrap();
        let b = build_basis(&h, &t).unwrap();
        // unitary from the Householder completion of an arbitrary vector
        let x = CVector::from_vec(vec![
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.2, 0.9),
            Complex64::new(0.5, -0.4),
        ]);
        let u = householder_completion(&x);
        let b2 = BeamformingBasis::with_null_basis(&h, b.v_n() * u, &t).unwrap();
        check_invariants(&b2);
        for (x, y) in b.theta().iter().zip(b2.theta().iter()) {
            assert!((x - y).abs() < 1e-9);
        }
        assert!((b.cross_term().norm() - b2.cross_term().norm()).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn basis_invariants_hold(n in 2usize..8, rho in 0.0f64..0.95, seed in 0u64..1000) {
            let t = CorrelationMatrix::exponential(n, 0.5, rho).unwrap();
            let h = correlate(&sample_whitened(&mut StreamFactory::new(seed).source(0), n), &t).unwrap();
            let b = build_basis(&h, &t).unwrap();
            check_invariants(&b);
            let tr: f64 = b.theta().iter().sum();
            prop_assert!(tr <= n as f64 + 1e-12);
            prop_assert!(b.theta().iter().all(|&x| x > 0.0));
        }
    }
}
