use num_complex::Complex64;

use super::{CMatrix, RMatrix};
use crate::error::{Error, Result};

/// Relative size below which a diagonal entry of `R` is treated as zero.
const RANK_TOL: f64 = 1e-13;

/// Householder QR of a square matrix, `M = Q R`.
///
/// With `phase_fix` the diagonal of `R` is made real and positive, which makes
/// `Q` a well-defined function of `M` (the property Haar sampling relies on).
pub fn qr_unitary(m: &CMatrix, phase_fix: bool) -> Result<(CMatrix, CMatrix)> {
    if !m.is_square() {
        return Err(Error::Domain("qr_unitary expects a square matrix".into()));
    }
    let n = m.nrows();
    let qr = m.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    let scale = m.iter().fold(0.0f64, |a, z| a.max(z.norm())).max(f64::MIN_POSITIVE);
    for i in 0..n {
        let d = r[(i, i)];
        if d.norm() <= RANK_TOL * scale {
            return Err(Error::Degenerate(format!("rank-deficient input (|R[{i},{i}]| = {:e})", d.norm())));
        }
        if phase_fix {
            let phase = d / d.norm();
            for row in 0..n {
                q[(row, i)] *= phase;
            }
            let conj = phase.conj();
            for col in 0..n {
                r[(i, col)] *= conj;
            }
            r[(i, i)] = Complex64::new(r[(i, i)].re, 0.0);
        }
    }
    Ok((q, r))
}

/// Real counterpart of [`qr_unitary`]: `Q` orthogonal, diagonal of `R` positive when fixed.
pub fn qr_unitary_real(m: &RMatrix, phase_fix: bool) -> Result<(RMatrix, RMatrix)> {
    if !m.is_square() {
        return Err(Error::Domain("qr_unitary expects a square matrix".into()));
    }
    let n = m.nrows();
    let qr = m.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    let scale = m.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
    for i in 0..n {
        let d = r[(i, i)];
        if d.abs() <= RANK_TOL * scale {
            return Err(Error::Degenerate(format!("rank-deficient input (|R[{i},{i}]| = {:e})", d.abs())));
        }
        if phase_fix && d < 0.0 {
            for row in 0..n {
                q[(row, i)] = -q[(row, i)];
            }
            for col in 0..n {
                r[(i, col)] = -r[(i, col)];
            }
        }
    }
    Ok((q, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, max_abs_real, unitarity_residual};
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn identity_is_fixed_point() {
        let (q, r) = qr_unitary_real(&RMatrix::identity(4, 4), true).unwrap();
        assert!(max_abs_real(&(q - RMatrix::identity(4, 4))) < 1e-15);
        assert!(max_abs_real(&(r - RMatrix::identity(4, 4))) < 1e-15);
    }

    #[test]
    fn swap_matrix() {
        let m = RMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let (q, r) = qr_unitary_real(&m, true).unwrap();
        assert!(max_abs_real(&(q - &m)) < 1e-15);
        assert!(max_abs_real(&(r - RMatrix::identity(2, 2))) < 1e-15);
    }

    #[test]
    fn random_gaussian_orthogonality() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let m = RMatrix::from_fn(6, 6, |_, _| StandardNormal.sample(&mut rng));
        let (q, r) = qr_unitary_real(&m, true).unwrap();
        assert!(max_abs_real(&(q.transpose() * &q - RMatrix::identity(6, 6))) < 1e-12);
        assert!(max_abs_real(&(&q * &r - &m)) < 1e-12);
        for i in 0..6 {
            assert!(r[(i, i)] > 0.0);
            for j in 0..i {
                assert_eq!(r[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn complex_phase_fix() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let m = CMatrix::from_fn(5, 5, |_, _| {
            Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
        });
        let (q, r) = qr_unitary(&m, true).unwrap();
        assert!(unitarity_residual(&q) < 1e-12);
        assert!(max_abs(&(&q * &r - &m)) < 1e-12);
        for i in 0..5 {
            assert!(r[(i, i)].re > 0.0 && r[(i, i)].im == 0.0);
        }
    }

    #[test]
    fn singular_is_reported() {
        let m = RMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(qr_unitary_real(&m, true), Err(Error::Degenerate(_))));
    }
}
