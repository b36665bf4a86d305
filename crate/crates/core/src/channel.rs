//! Correlated Rayleigh channel draws for Bob (`h`) and Eve (`g`).
//!
//! Every draw comes from a [`RandomSource`], a ChaCha8 stream addressed by a
//! `(seed, stream)` pair. Monte Carlo trial `k` uses stream `base + k`, so the
//! same trial sees the same `g_s` whichever allocation or `α` is evaluated.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::correlation::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::linalg::{row_mul, CVector};

/// Stream-id namespaces. Eve's trials count up from zero; the outer main
/// channel draws of averaged experiments live far above them.
pub const MAIN_CHANNEL_STREAMS: u64 = 1 << 62;
/// Spacing between the Eve stream blocks of distinct main-channel draws.
pub const EVE_BLOCK: u64 = 1 << 36;

#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Circularly-symmetric complex Gaussian with unit variance.
    #[inline]
    pub fn complex_normal(&mut self) -> Complex64 {
        let re: f64 = StandardNormal.sample(&mut self.rng);
        let im: f64 = StandardNormal.sample(&mut self.rng);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// Cheap factory for per-trial sources sharing one seed.
#[derive(Debug, Clone)]
pub struct StreamFactory {
    seed: u64,
    proto: ChaCha8Rng,
}

impl StreamFactory {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            proto: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn source(&self, stream: u64) -> RandomSource {
        let mut rng = self.proto.clone();
        rng.set_stream(stream);
        RandomSource {
            seed: self.seed,
            stream,
            rng,
        }
    }
}

pub fn sample_whitened(rng: &mut RandomSource, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| rng.complex_normal())
}

/// `whitened · √Λ · U_T†`.
pub fn correlate(whitened: &CVector, corr: &CorrelationMatrix) -> Result<CVector> {
    if whitened.len() != corr.dim() {
        return Err(Error::DimensionMismatch {
            expected: corr.dim(),
            found: whitened.len(),
        });
    }
    let scaled = CVector::from_fn(whitened.len(), |i, _| {
        whitened[i] * corr.eigenvalues()[i].sqrt()
    });
    Ok(row_mul(&scaled, &corr.eigenvectors().adjoint()))
}

/// Square root of `T` mapping a whitened row vector to a correlated one.
///
/// Both give `E[h†h] = T`, so random draws are equivalent in distribution.
/// A fixed `h_s` maps to different `h` under each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelRoot {
    /// `h = h_s R` with upper-triangular `R`, `T = R†R`.
    #[default]
    Cholesky,
    /// `h = h_s √Λ U_T†`.
    Eigen,
}

/// `whitened · R` with `T = R†R`, `R` upper triangular.
pub fn correlate_cholesky(whitened: &CVector, corr: &CorrelationMatrix) -> Result<CVector> {
    if whitened.len() != corr.dim() {
        return Err(Error::DimensionMismatch {
            expected: corr.dim(),
            found: whitened.len(),
        });
    }
    Ok(row_mul(whitened, corr.cholesky_root()))
}

#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub h_s: CVector,
    pub h: CVector,
    pub g_s: Option<CVector>,
    pub g: Option<CVector>,
}

impl ChannelRealization {
    /// `‖h‖² = h_s Λ h_s†`, the quadratic form behind Bob's SNR.
    pub fn main_gain_spectral(&self, corr: &CorrelationMatrix) -> f64 {
        self.h_s
            .iter()
            .zip(corr.eigenvalues().iter())
            .map(|(z, l)| l * z.norm_sqr())
            .sum()
    }

    pub fn with_eve(mut self, g_s: CVector, corr: &CorrelationMatrix) -> Result<Self> {
        self.g = Some(correlate(&g_s, corr)?);
        self.g_s = Some(g_s);
        Ok(self)
    }
}

/// Main channel held fixed for a conditioned experiment, `h = h_s √Λ U_T†`.
pub fn fixed_main_channel(h_s: CVector, corr: &CorrelationMatrix) -> Result<ChannelRealization> {
    fixed_main_channel_with(h_s, corr, ChannelRoot::Eigen)
}

pub fn fixed_main_channel_with(h_s: CVector, corr: &CorrelationMatrix, root: ChannelRoot) -> Result<ChannelRealization> {
    if h_s.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Domain("h_s has non-finite entries".into()));
    }
    let h = match root {
        ChannelRoot::Eigen => correlate(&h_s, corr)?,
        ChannelRoot::Cholesky => correlate_cholesky(&h_s, corr)?,
    };
    Ok(ChannelRealization {
        h_s,
        h,
        g_s: None,
        g: None,
    })
}

/// Main channel draw `j` of an averaged experiment.
pub fn random_main_channel(
    factory: &StreamFactory,
    j: u64,
    corr: &CorrelationMatrix,
) -> Result<ChannelRealization> {
    let mut src = factory.source(MAIN_CHANNEL_STREAMS + j);
    let h_s = sample_whitened(&mut src, corr.dim());
    fixed_main_channel(h_s, corr)
}

/// Parses `[re, im]` pairs.
pub fn from_pairs(pairs: &[[f64; 2]]) -> CVector {
    CVector::from_iterator(pairs.len(), pairs.iter().map(|p| Complex64::new(p[0], p[1])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{norm_sqr, CMatrix, ONE, ZERO};

    fn fig2_hs() -> CVector {
        from_pairs(&[
            [0.1104, -0.6619],
            [-0.6677, 1.2432],
            [0.7588, 0.9201],
            [1.0196, 0.4098],
        ])
    }

    #[test]
    fn whitened_moments() {
        let mut src = RandomSource::new(11, 0);
        let n = 1_000_000;
        let (mut sre, mut sim, mut pow) = (0.0, 0.0, 0.0);
        let (mut vre, mut vim) = (0.0, 0.0);
        for _ in 0..n {
            let z = src.complex_normal();
            sre += z.re;
            sim += z.im;
            vre += z.re * z.re;
            vim += z.im * z.im;
            pow += z.norm_sqr();
        }
        let n = n as f64;
        // per-component std is 1/sqrt(2) so 3σ of the mean is below 3/sqrt(n)
        assert!((sre / n).abs() < 3.0 / n.sqrt());
        assert!((sim / n).abs() < 3.0 / n.sqrt());
        assert!((vre / n - 0.5).abs() < 0.005 && (vim / n - 0.5).abs() < 0.005);
        assert!((pow / n - 1.0).abs() < 0.01);
    }

    #[test]
    fn same_stream_reproduces() {
        let a = sample_whitened(&mut RandomSource::new(3, 9), 4);
        let b = sample_whitened(&mut RandomSource::new(3, 9), 4);
        let c = sample_whitened(&mut RandomSource::new(3, 10), 4);
        assert_eq!(a, b);
        assert_ne!(a, c);
        let f = StreamFactory::new(3);
        assert_eq!(sample_whitened(&mut f.source(9), 4), a);
    }

    #[test]
    fn identity_correlation_passes_through() {
        let t = CorrelationMatrix::identity(4);
        let v = fig2_hs();
        let h = correlate(&v, &t).unwrap();
        assert!((h - v).norm() < 1e-15);
        assert!(matches!(
            correlate(&CVector::zeros(3), &t),
            Err(Error::DimensionMismatch { expected: 4, found: 3 })
        ));
    }

    #[test]
    fn main_gain_with_fig2_spectrum() {
        let t = CorrelationMatrix::from_spectrum(&[2.8, 0.7, 0.3, 0.2], None).unwrap();
        let ones = CVector::from_element(4, ONE);
        let r = fixed_main_channel(ones, &t).unwrap();
        assert!((norm_sqr(&r.h) - 4.0).abs() < 1e-14);

        let r = fixed_main_channel(fig2_hs(), &t).unwrap();
        let by_hand = 2.8 * (0.1104f64.powi(2) + 0.6619f64.powi(2))
            + 0.7 * (0.6677f64.powi(2) + 1.2432f64.powi(2))
            + 0.3 * (0.7588f64.powi(2) + 0.9201f64.powi(2))
            + 0.2 * (1.0196f64.powi(2) + 0.4098f64.powi(2));
        assert!((by_hand - 3.32301).abs() < 1e-5);
        assert!((norm_sqr(&r.h) - by_hand).abs() < 1e-12);
        assert!((r.main_gain_spectral(&t) - by_hand).abs() < 1e-12);
    }

    #[test]
    fn roots_share_the_covariance() {
        let t = CorrelationMatrix::exponential(4, 0.5, 0.7).unwrap();
        let r = t.cholesky_root();
        assert!(crate::linalg::frobenius(&(r.adjoint() * r - t.entries())) < 1e-12);
        assert!((0..4).all(|i| (0..i).all(|j| r[(i, j)].norm() == 0.0)));
        let e = t.eigen_root();
        assert!(crate::linalg::frobenius(&(e.adjoint() * &e - t.entries())) < 1e-12);
        let h_s = from_pairs(&[[0.3, -1.0], [0.2, 0.5], [-0.7, 0.1], [1.1, 0.0]]);
        let a = fixed_main_channel_with(h_s.clone(), &t, ChannelRoot::Cholesky).unwrap().h;
        let b = fixed_main_channel_with(h_s, &t, ChannelRoot::Eigen).unwrap().h;
        assert!((a - b).norm() > 0.1);
    }

    #[test]
    fn roots_agree_for_a_diagonal_correlation() {
        let t = CorrelationMatrix::from_spectrum(&[2.8, 0.7, 0.3, 0.2], None).unwrap();
        let h_s = from_pairs(&[[0.1104, -0.6619], [-0.6677, 1.2432], [0.7588, 0.9201], [1.0196, 0.4098]]);
        let a = fixed_main_channel_with(h_s.clone(), &t, ChannelRoot::Cholesky).unwrap().h;
        let b = fixed_main_channel(h_s, &t).unwrap().h;
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn spectral_gain_holds_for_rotated_eigenvectors() {
        let t = CorrelationMatrix::exponential(4, 0.5, 0.8).unwrap();
        let r = fixed_main_channel(fig2_hs(), &t).unwrap();
        assert!((norm_sqr(&r.h) - r.main_gain_spectral(&t)).abs() < 1e-12);
    }

    #[test]
    fn fixed_channel_is_deterministic() {
        let t = CorrelationMatrix::identity(3);
        let e1 = CVector::from_vec(vec![ONE, ZERO, ZERO]);
        let a = fixed_main_channel(e1.clone(), &t).unwrap();
        let b = fixed_main_channel(e1.clone(), &t).unwrap();
        assert_eq!(a.h, e1);
        assert_eq!(a.h, b.h);
        let bad = CVector::from_vec(vec![Complex64::new(f64::NAN, 0.0), ZERO, ZERO]);
        assert!(fixed_main_channel(bad, &t).is_err());
    }

    #[test]
    fn empirical_covariance_matches_t() {
        let t = CorrelationMatrix::exponential(3, 0.5, 0.6).unwrap();
        let f = StreamFactory::new(5);
        let n = 200_000usize;
        let mut acc = CMatrix::zeros(3, 3);
        let mut sq = nalgebra::DMatrix::<f64>::zeros(3, 3);
        for k in 0..n {
            let h = correlate(&sample_whitened(&mut f.source(k as u64), 3), &t).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let p = h[i] * h[j].conj();
                    acc[(i, j)] += p;
                    sq[(i, j)] += p.re * p.re;
                }
            }
        }
        let nf = n as f64;
        for i in 0..3 {
            for j in 0..3 {
                let mean = acc[(i, j)] / nf;
                let var = sq[(i, j)] / nf - mean.re * mean.re;
                let se = (var / nf).sqrt();
                assert!(
                    (mean.re - t.entries()[(i, j)].re).abs() < 3.0 * se,
                    "entry ({i},{j}): {} vs {}",
                    mean.re,
                    t.entries()[(i, j)].re
                );
            }
        }
    }
}
