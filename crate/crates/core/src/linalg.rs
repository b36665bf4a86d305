//! Small complex linear-algebra helpers on top of nalgebra.
//!
//! Channel vectors are row vectors in the model (`h = h_s T^{1/2}`); they are
//! stored as `CVector` (an nalgebra column) and multiplied from the left with
//! [`row_mul`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row vector times matrix: `x · M`.
pub fn row_mul(x: &CVector, m: &CMatrix) -> CVector {
    debug_assert_eq!(x.len(), m.nrows());
    let mut out = CVector::zeros(m.ncols());
    for j in 0..m.ncols() {
        let mut acc = ZERO;
        for i in 0..x.len() {
            acc += x[i] * m[(i, j)];
        }
        out[j] = acc;
    }
    out
}

/// Row vector times column vector: `x · y` (no conjugation).
pub fn row_dot(x: &CVector, y: &CVector) -> Complex64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b).sum()
}

/// `a† M b` for column vectors `a`, `b`.
pub fn sesquilinear(a: &CVector, m: &CMatrix, b: &CVector) -> Complex64 {
    (a.adjoint() * m * b)[(0, 0)]
}

pub fn norm_sqr(x: &CVector) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted
/// nonincreasing. Equal eigenvalues keep the solver's order.
pub fn hermitian_eigen(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    let n = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Rotates `v` by a global phase so that its largest-magnitude entry is real
/// and positive (first such entry on ties).
pub fn fix_phase(v: &mut CVector) {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if m > best_mag + 1e-14 {
            best = i;
            best_mag = m;
        }
    }
    if best_mag > 0.0 {
        let phase = v[best] / best_mag;
        let rot = phase.conj();
        for z in v.iter_mut() {
            *z *= rot;
        }
        v[best] = Complex64::new(v[best].re, 0.0);
    }
}

/// Unitary Householder reflector `H` with `H·x = β e₁`, `|β| = ‖x‖`.
///
/// Because `H` is Hermitian and unitary, its first column is `x/β` and the
/// remaining columns are an orthonormal basis of the complement of `x`.
pub fn householder_completion(x: &CVector) -> CMatrix {
    let n = x.len();
    let norm = norm_sqr(x).sqrt();
    let x0 = x[0];
    let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
    // β opposite in phase to x₀ so that u = x - βe₁ does not cancel.
    let beta = -phase * norm;
    let mut u = x.clone();
    u[0] -= beta;
    let uu = norm_sqr(&u);
    let mut h = CMatrix::identity(n, n);
    if uu > 0.0 {
        let scale = Complex64::new(2.0 / uu, 0.0);
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] -= scale * u[i] * u[j].conj();
            }
        }
    }
    h
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| (m[(i, j)] - m[(j, i)].conj()).norm() <= tol))
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn diag_real(d: &[f64]) -> CMatrix {
    let mut m = CMatrix::zeros(d.len(), d.len());
    for (i, &v) in d.iter().enumerate() {
        m[(i, i)] = Complex64::new(v, 0.0);
    }
    m
}
