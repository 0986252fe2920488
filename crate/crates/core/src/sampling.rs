//! Reproducible sampling of uniform-Dirichlet weights and Haar-random group elements.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{is_special_orthogonal, qr_unitary, qr_unitary_real, CMatrix, RMatrix, ORTHOGONALITY_TOL};

/// Deterministic random stream identified by `(master_seed, stream_index)`.
///
/// Every trial of an experiment owns its own stream, so results do not depend
/// on how trials are scheduled across workers.
#[derive(Clone, Debug)]
pub struct SeededRng {
    master_seed: u64,
    stream_index: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(stream_index);
        Self { master_seed, stream_index, inner }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// l1-normalised nonnegative LCU weights.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientVector(Vec<f64>);

impl CoefficientVector {
    pub const NORMALISATION_TOL: f64 = 1e-12;

    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("coefficient vector must be nonempty".into()));
        }
        if values.iter().any(|&v| v.is_nan() || v < 0.0) {
            return Err(Error::Contract("coefficients must be nonnegative".into()));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > Self::NORMALISATION_TOL {
            return Err(Error::Contract(format!("coefficients sum to {sum}, not 1")));
        }
        Ok(Self(values))
    }

    /// `(1/k, ..., 1/k)`.
    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("k must be at least 1".into()));
        }
        Ok(Self(vec![1.0 / k as f64; k]))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Element of SO(2n) acting on the 2n Majorana modes.
#[derive(Clone, Debug)]
pub struct MajoranaRotation(RMatrix);

impl MajoranaRotation {
    pub fn new(matrix: RMatrix) -> Result<Self> {
        if matrix.nrows() % 2 == 1 || matrix.nrows() == 0 {
            return Err(Error::Domain("rotation must act on an even, nonzero number of modes".into()));
        }
        if !is_special_orthogonal(&matrix, ORTHOGONALITY_TOL) {
            return Err(Error::Contract("matrix is not in SO(2n)".into()));
        }
        Ok(Self(matrix))
    }

    pub fn identity(modes: usize) -> Result<Self> {
        Self::new(RMatrix::identity(modes, modes))
    }

    /// Rotation by `theta` in the plane of modes `(p, q)`, `p != q` (0-based).
    pub fn givens(modes: usize, p: usize, q: usize, theta: f64) -> Result<Self> {
        if p == q || p >= modes || q >= modes {
            return Err(Error::Domain("invalid Givens plane".into()));
        }
        let mut m = RMatrix::identity(modes, modes);
        m[(p, p)] = theta.cos();
        m[(q, q)] = theta.cos();
        m[(p, q)] = theta.sin();
        m[(q, p)] = -theta.sin();
        Self::new(m)
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.nrows()
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }
}

/// Draw from the uniform Dirichlet distribution `Dir(1, ..., 1)` via normalised
/// standard exponentials.
pub fn sample_dirichlet_uniform<R: RngCore>(k: usize, rng: &mut R) -> Result<CoefficientVector> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    if k == 1 {
        return Ok(CoefficientVector(vec![1.0]));
    }
    let draws: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = draws.iter().sum();
    Ok(CoefficientVector(draws.into_iter().map(|x| x / total).collect()))
}

/// Haar-random element of SO(modes).
///
/// A real Gaussian matrix is QR-factorised with positive diagonal; when the
/// result lands in the det = -1 coset its first row is negated.
pub fn sample_haar_special_orthogonal<R: RngCore>(modes: usize, rng: &mut R) -> Result<MajoranaRotation> {
    if modes < 2 || modes % 2 == 1 {
        return Err(Error::Domain(format!("mode count must be even and >= 2, got {modes}")));
    }
    loop {
        let g = RMatrix::from_fn(modes, modes, |_, _| StandardNormal.sample(rng));
        let q = match qr_unitary_real(&g, true) {
            Ok((q, _)) => q,
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        };
        let mut q = q;
        if q.determinant() < 0.0 {
            for c in 0..modes {
                q[(0, c)] = -q[(0, c)];
            }
        }
        return Ok(MajoranaRotation(q));
    }
}

/// Haar-random element of U(dim) from a complex Ginibre matrix.
pub fn sample_haar_unitary<R: RngCore>(dim: usize, rng: &mut R) -> Result<CMatrix> {
    if dim < 2 {
        return Err(Error::Domain(format!("unitary dimension must be >= 2, got {dim}")));
    }
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    loop {
        let g: CMatrix = DMatrix::from_fn(dim, dim, |_, _| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re * scale, im * scale)
        });
        match qr_unitary(&g, true) {
            Ok((q, _)) => return Ok(q),
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Uniform random sign, used to lift a rotation to a Haar-random element of the spin group.
pub fn sample_sign<R: RngCore>(rng: &mut R) -> f64 {
    if rng.next_u32() & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}
