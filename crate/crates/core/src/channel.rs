//! Channel sampling, zero-forcing precoding and artificial-noise shaping.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::AnKind;
use crate::sampling::complex_normal;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative size below which an `R` diagonal entry counts as rank deficiency.
const RANK_TOLERANCE: f64 = 1e-10;

/// One draw of the channels together with the precoder and AN shaping matrix.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    /// User channel, `K x N`.
    pub h: CMatrix,
    /// Eavesdropper channel, `M x N`.
    pub h_e: CMatrix,
    /// ZF precoder, `N x K`, `tr(W Wᴴ) = K`.
    pub w: CMatrix,
    /// AN shaping matrix, `N x (N - K)`, unit-norm columns.
    pub v: CMatrix,
    /// Scalar `c` with `H W = c I`.
    pub zf_gain: f64,
    pub an_kind: AnKind,
}

impl ChannelRealization {
    pub fn sample<R: Rng + ?Sized>(
        n: usize,
        k: usize,
        m: usize,
        an_kind: AnKind,
        rng: &mut R,
    ) -> Result<Self> {
        if k >= n {
            return Err(Error::InvalidArgument(format!("K={k} must be below N={n}")));
        }
        let (h, h_e) = sample_channels(n, k, m, rng);
        let zf = zf_precoder(&h)?;
        let v = match an_kind {
            AnKind::NullSpace => null_space_an(&h)?,
            AnKind::Random => random_an(n, k, rng),
        };
        Ok(ChannelRealization {
            h,
            h_e,
            w: zf.w,
            v,
            zf_gain: zf.gain,
            an_kind,
        })
    }

    pub fn num_bs_antennas(&self) -> usize {
        self.h.ncols()
    }

    pub fn num_users(&self) -> usize {
        self.h.nrows()
    }

    /// Diagonal of `p diag(W Wᴴ) + q diag(V Vᴴ)`, the per-antenna transmit power.
    /// Multiplying by `rho` gives the diagonal of `C_DA`.
    pub fn transmit_power_diag(&self, p: f64, q: f64) -> Vec<f64> {
        let dw = row_power(&self.w);
        let dv = row_power(&self.v);
        dw.iter().zip(&dv).map(|(a, b)| p * a + q * b).collect()
    }
}

/// Unit-variance data symbols and AN samples for one channel use.
#[derive(Debug, Clone)]
pub struct TransmitSymbols {
    pub s: CVector,
    pub z: CVector,
}

impl TransmitSymbols {
    /// Circularly-symmetric Gaussian symbols, `s ~ CN(0, I_K)` and `z ~ CN(0, I_{N-K})`.
    pub fn sample<R: Rng + ?Sized>(k: usize, an_dim: usize, rng: &mut R) -> Self {
        TransmitSymbols {
            s: CVector::from_fn(k, |_, _| complex_normal(rng, 1.0)),
            z: CVector::from_fn(an_dim, |_, _| complex_normal(rng, 1.0)),
        }
    }
}

/// `diag(A Aᴴ)`: squared norm of every row.
pub fn row_power(a: &CMatrix) -> Vec<f64> {
    (0..a.nrows())
        .map(|i| a.row(i).iter().map(|z| z.norm_sqr()).sum())
        .collect()
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng, 1.0))
}

/// I.i.d. `CN(0, 1)` user (`K x N`) and eavesdropper (`M x N`) channels.
pub fn sample_channels<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    m: usize,
    rng: &mut R,
) -> (CMatrix, CMatrix) {
    let h = gaussian_matrix(k, n, rng);
    let h_e = gaussian_matrix(m, n, rng);
    (h, h_e)
}

#[derive(Debug, Clone)]
pub struct ZfPrecoder {
    pub w: CMatrix,
    /// `c = sqrt(K / tr((H Hᴴ)^-1))`, so that `H W = c I`.
    pub gain: f64,
}

/// `W = sqrt(K / tr((H Hᴴ)^-1)) Hᴴ (H Hᴴ)^-1`.
pub fn zf_precoder(h: &CMatrix) -> Result<ZfPrecoder> {
    let k = h.nrows();
    let gram = h * h.adjoint();
    let chol = gram.cholesky().ok_or(Error::SingularChannel)?;
    let gram_inv = chol.inverse();
    let trace = gram_inv.trace().re;
    if !(trace.is_finite() && trace > 0.0) {
        return Err(Error::SingularChannel);
    }
    let gain = (k as f64 / trace).sqrt();
    let w = (h.adjoint() * gram_inv) * Complex64::new(gain, 0.0);
    Ok(ZfPrecoder { w, gain })
}

/// Orthonormal basis (`N x (N - K)`) of the null space of `H`, from a
/// Householder QR of `Hᴴ`.
pub fn null_space_an(h: &CMatrix) -> Result<CMatrix> {
    let (k, n) = h.shape();
    if k >= n {
        return Err(Error::InvalidArgument(format!("K={k} must be below N={n}")));
    }
    let qr = h.adjoint().qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..k).map(|i| r[(i, i)].norm()).collect();
    let largest = diag.iter().cloned().fold(0.0, f64::max);
    if diag.iter().any(|&d| !(d > RANK_TOLERANCE * largest)) {
        return Err(Error::SingularChannel);
    }
    let mut q_adj = CMatrix::identity(n, n);
    qr.q_tr_mul(&mut q_adj);
    let q = q_adj.adjoint();
    Ok(q.columns(k, n - k).into_owned())
}

/// `N - K` independent Gaussian directions normalized to unit norm (not orthogonalized).
pub fn random_an<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> CMatrix {
    let mut v = gaussian_matrix(n, n - k, rng);
    for mut col in v.column_iter_mut() {
        let norm = col.norm();
        col /= Complex64::new(norm, 0.0);
    }
    v
}

/// `x = sqrt(p) W s + sqrt(q) V z`.
pub fn assemble_transmit(
    w: &CMatrix,
    v: &CMatrix,
    s: &CVector,
    z: &CVector,
    p: f64,
    q: f64,
) -> Result<CVector> {
    if w.ncols() != s.len() || v.ncols() != z.len() || w.nrows() != v.nrows() {
        return Err(Error::InvalidArgument(format!(
            "dimension mismatch: W {:?}, s {}, V {:?}, z {}",
            w.shape(),
            s.len(),
            v.shape(),
            z.len()
        )));
    }
    let signal = w * s * Complex64::new(p.sqrt(), 0.0);
    if q == 0.0 {
        return Ok(signal);
    }
    Ok(signal + v * z * Complex64::new(q.sqrt(), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::trial_rng;

    fn frob(a: &CMatrix) -> f64 {
        a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn same_seed_same_channels() {
        let (h1, e1) = sample_channels(16, 4, 3, &mut trial_rng(9, 1));
        let (h2, e2) = sample_channels(16, 4, 3, &mut trial_rng(9, 1));
        assert_eq!(h1, h2);
        assert_eq!(e1, e2);
    }

    #[test]
    fn zf_diagonalizes_and_normalizes() {
        let mut rng = trial_rng(2, 0);
        let h = gaussian_matrix(8, 64, &mut rng);
        let zf = zf_precoder(&h).unwrap();
        let hw = &h * &zf.w;
        let target = CMatrix::identity(8, 8) * Complex64::new(zf.gain, 0.0);
        assert!(frob(&(hw - target)) < 1e-8 * zf.gain);
        let tr = (&zf.w * zf.w.adjoint()).trace().re;
        assert!((tr - 8.0).abs() < 1e-9 * 8.0);
    }

    #[test]
    fn zf_single_user_is_matched_filter() {
        let mut rng = trial_rng(3, 0);
        let h = gaussian_matrix(1, 32, &mut rng);
        let zf = zf_precoder(&h).unwrap();
        let norm = h.row(0).norm();
        for j in 0..32 {
            let expected = h[(0, j)].conj() / norm;
            assert!((zf.w[(j, 0)] - expected).norm() < 1e-12);
        }
        assert!((zf.gain - norm).abs() < 1e-10);
    }

    #[test]
    fn zf_rejects_rank_deficient_channel() {
        let mut rng = trial_rng(4, 0);
        let mut h = gaussian_matrix(3, 16, &mut rng);
        let row = h.row(0).into_owned();
        h.set_row(1, &row);
        assert!(zf_precoder(&h).is_err());
        assert!(matches!(null_space_an(&h), Err(Error::SingularChannel)));
    }

    #[test]
    fn null_space_properties() {
        let mut rng = trial_rng(5, 0);
        let h = gaussian_matrix(8, 128, &mut rng);
        let v = null_space_an(&h).unwrap();
        assert_eq!(v.shape(), (128, 120));
        let hv = &h * &v;
        assert!(hv.iter().all(|z| z.norm() < 1e-10));
        let gram = v.adjoint() * &v;
        let eye = CMatrix::identity(120, 120);
        assert!(gram.iter().zip(eye.iter()).all(|(a, b)| (a - b).norm() < 1e-10));
        let tr = (&v * v.adjoint()).trace().re;
        assert!((tr - 120.0).abs() < 1e-9);
    }

    #[test]
    fn random_an_unit_columns() {
        let mut rng = trial_rng(6, 0);
        let v = random_an(64, 8, &mut rng);
        for col in v.column_iter() {
            assert!((col.norm() - 1.0).abs() < 1e-12);
        }
        let tr = (&v * v.adjoint()).trace().re;
        assert!((tr - 56.0).abs() < 1e-9);
    }

    #[test]
    fn random_an_asymptotically_orthogonal() {
        let mut rng = trial_rng(7, 0);
        let v = random_an(512, 448, &mut rng);
        let cols = 64;
        let mut total = 0.0;
        let mut pairs = 0;
        for i in 0..cols {
            for j in i + 1..cols {
                total += v.column(i).dotc(&v.column(j)).norm();
                pairs += 1;
            }
        }
        assert!(total / (pairs as f64) < 0.06);
    }

    #[test]
    fn transmit_without_an() {
        let mut rng = trial_rng(8, 0);
        let real = ChannelRealization::sample(32, 4, 2, AnKind::NullSpace, &mut rng).unwrap();
        let sym = TransmitSymbols::sample(4, 28, &mut rng);
        let x = assemble_transmit(&real.w, &real.v, &sym.s, &sym.z, 0.25, 0.0).unwrap();
        let expected = &real.w * &sym.s * Complex64::new(0.5, 0.0);
        assert!((x - expected).norm() < 1e-14);
    }

    #[test]
    fn transmit_zero_symbols() {
        let mut rng = trial_rng(8, 1);
        let real = ChannelRealization::sample(16, 2, 2, AnKind::Random, &mut rng).unwrap();
        let s = CVector::zeros(2);
        let z = CVector::zeros(14);
        let x = assemble_transmit(&real.w, &real.v, &s, &z, 0.3, 0.05).unwrap();
        assert!(x.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn transmit_dimension_mismatch() {
        let w = CMatrix::zeros(8, 2);
        let v = CMatrix::zeros(8, 6);
        let s = CVector::zeros(3);
        let z = CVector::zeros(6);
        assert!(assemble_transmit(&w, &v, &s, &z, 1.0, 1.0).is_err());
    }
}
