use super::{is_special_orthogonal, max_abs_real, RMatrix, ORTHOGONALITY_TOL};
use crate::error::{Error, Result};

/// Block-diagonal normal form of a rotation: `R = Q · ⊕_j B(θ_j) · Qᵀ` with
/// `B(θ) = [[cos θ, sin θ], [-sin θ, cos θ]]`, `Q ∈ SO(2n)` and `θ_j ∈ (-π, π)`.
#[derive(Clone, Debug)]
pub struct NormalForm {
    pub basis: RMatrix,
    pub angles: Vec<f64>,
}

impl NormalForm {
    /// `Q · ⊕ [[0, θ_j], [-θ_j, 0]] · Qᵀ`, the principal logarithm.
    pub fn generator(&self) -> RMatrix {
        let n = self.basis.nrows();
        let mut l = RMatrix::zeros(n, n);
        for (j, &t) in self.angles.iter().enumerate() {
            l[(2 * j, 2 * j + 1)] = t;
            l[(2 * j + 1, 2 * j)] = -t;
        }
        &self.basis * l * self.basis.transpose()
    }
}

/// Largest tolerated off-block residual after reduction.
const BLOCK_RESIDUAL_TOL: f64 = 1e-8;
/// Angles this close to π are treated as a -1 eigenvalue pair.
const BRANCH_TOL: f64 = 1e-12;

/// Real Schur reduction of a rotation into planar blocks.
pub fn so_normal_form(r: &RMatrix) -> Result<NormalForm> {
    let n = r.nrows();
    if !r.is_square() || n % 2 == 1 || n == 0 {
        return Err(Error::Domain(format!(
            "expected an even-dimensional square matrix, got {}x{}",
            r.nrows(),
            r.ncols()
        )));
    }
    if !is_special_orthogonal(r, ORTHOGONALITY_TOL) {
        return Err(Error::Contract("matrix is not in SO(2n)".into()));
    }
    let schur = nalgebra::linalg::Schur::try_new(r.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("real Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();

    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(n / 2);
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            pairs.push((i, i + 1));
            i += 2;
        } else {
            if t[(i, i)] > 0.0 {
                plus.push(i);
            } else {
                minus.push(i);
            }
            i += 1;
        }
    }
    if plus.len() % 2 == 1 || minus.len() % 2 == 1 {
        return Err(Error::Numerical("unpaired real eigenvalues in rotation".into()));
    }
    if !minus.is_empty() {
        return Err(Error::BranchAmbiguity("rotation has a -1 eigenvalue pair".into()));
    }
    pairs.extend(plus.chunks(2).map(|c| (c[0], c[1])));

    let mut basis = RMatrix::zeros(n, n);
    for (j, &(a, b)) in pairs.iter().enumerate() {
        basis.set_column(2 * j, &q.column(a));
        basis.set_column(2 * j + 1, &q.column(b));
    }
    if basis.determinant() < 0.0 {
        for row in 0..n {
            basis[(row, 0)] = -basis[(row, 0)];
        }
    }

    let blocks = basis.transpose() * r * &basis;
    let mut residual = blocks.clone();
    let mut angles = Vec::with_capacity(n / 2);
    for j in 0..n / 2 {
        let (p, s) = (2 * j, 2 * j + 1);
        let cos = 0.5 * (blocks[(p, p)] + blocks[(s, s)]);
        let sin = 0.5 * (blocks[(p, s)] - blocks[(s, p)]);
        let theta = sin.atan2(cos);
        if std::f64::consts::PI - theta.abs() < BRANCH_TOL {
            return Err(Error::BranchAmbiguity("rotation angle at the branch cut".into()));
        }
        angles.push(theta);
        for &(x, y) in &[(p, p), (p, s), (s, p), (s, s)] {
            residual[(x, y)] = 0.0;
        }
    }
    if max_abs_real(&residual) > BLOCK_RESIDUAL_TOL {
        return Err(Error::Numerical("rotation did not reduce to planar blocks".into()));
    }
    Ok(NormalForm { basis, angles })
}

/// Principal logarithm of a rotation: real antisymmetric `A` with `exp(A) = R`
/// and every rotation angle in `(-π, π)`.
pub fn logm_special_orthogonal(r: &RMatrix) -> Result<RMatrix> {
    let nf = so_normal_form(r)?;
    let a = nf.generator();
    Ok((&a - a.transpose()) * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matrix_exp, max_abs, to_complex};

    fn rot2(theta: f64) -> RMatrix {
        RMatrix::from_row_slice(2, 2, &[theta.cos(), theta.sin(), -theta.sin(), theta.cos()])
    }

    #[test]
    fn identity_has_zero_log() {
        let a = logm_special_orthogonal(&RMatrix::identity(6, 6)).unwrap();
        assert!(max_abs_real(&a) < 1e-15);
    }

    #[test]
    fn planar_rotation_log() {
        let a = logm_special_orthogonal(&rot2(0.3)).unwrap();
        assert!((a[(0, 1)] - 0.3).abs() < 1e-14);
        assert!((a[(1, 0)] + 0.3).abs() < 1e-14);
    }

    #[test]
    fn minus_identity_is_ambiguous() {
        let r = -RMatrix::identity(4, 4);
        assert!(matches!(logm_special_orthogonal(&r), Err(Error::BranchAmbiguity(_))));
    }

    #[test]
    fn reflection_is_rejected() {
        let r = RMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 1.0]));
        assert!(matches!(logm_special_orthogonal(&r), Err(Error::Contract(_))));
    }

    #[test]
    fn round_trip_on_block_rotation() {
        let mut r = RMatrix::identity(4, 4);
        r.view_mut((0, 0), (2, 2)).copy_from(&rot2(1.1));
        r.view_mut((2, 2), (2, 2)).copy_from(&rot2(-2.9));
        let a = logm_special_orthogonal(&r).unwrap();
        let back = matrix_exp(&to_complex(&a)).unwrap();
        assert!(max_abs(&(back - to_complex(&r))) < 1e-12);
    }
}
