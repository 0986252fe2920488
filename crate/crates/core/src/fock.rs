//! Exact statevector backend on `2^N` amplitudes.
//!
//! Qubit 1 is the leftmost tensor factor, so it is the most significant bit of a
//! dense index. Basis states elsewhere in the crate are `u64` bit strings with bit
//! `j - 1` holding qubit `j`; [`dense_index`] converts between the two.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{is_hermitian, is_unitary, logm_special_orthogonal, matrix_exp, max_abs, so_normal_form, CMatrix};
pub use crate::majorana::{majorana_action, monomial_action};
use crate::majorana::{MajoranaPolynomial, Mask};
use crate::sampling::{CoefficientVector, MajoranaRotation};

pub const DEFAULT_DENSE_LIMIT: usize = 10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub const EXPECTATION_IMAG_TOL: f64 = 1e-10;

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("qubit count must be positive".into()));
    }
    if n > DEFAULT_DENSE_LIMIT {
        return Err(Error::Resource(format!("{n} qubits exceeds the dense limit of {DEFAULT_DENSE_LIMIT}")));
    }
    Ok(())
}

/// Dense index of the basis string `x` (bit `j - 1` = qubit `j`).
pub fn dense_index(x: u64, n: usize) -> usize {
    (x.reverse_bits() >> (64 - n)) as usize
}

/// Inverse of [`dense_index`].
pub fn basis_bits(index: usize, n: usize) -> u64 {
    (index as u64).reverse_bits() >> (64 - n)
}

/// Jordan-Wigner matrices `c_1, ..., c_2N`.
pub fn majorana_operators(n: usize) -> Result<Vec<CMatrix>> {
    check_qubits(n)?;
    Ok((0..2 * n).map(|a| monomial_matrix(1u64 << a, n)).collect())
}

fn monomial_matrix(mask: Mask, n: usize) -> CMatrix {
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let (phase, y) = monomial_action(mask, basis_bits(col, n));
        m[(dense_index(y, n), col)] += phase;
    }
    m
}

pub fn polynomial_to_operator(p: &MajoranaPolynomial) -> Result<CMatrix> {
    let n = p.qubits();
    check_qubits(n)?;
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for (mask, coef) in p.terms() {
        for col in 0..dim {
            let (phase, y) = monomial_action(mask, basis_bits(col, n));
            m[(dense_index(y, n), col)] += coef * phase;
        }
    }
    Ok(m)
}

pub fn parity_operator(n: usize) -> Result<CMatrix> {
    polynomial_to_operator(&MajoranaPolynomial::parity(2 * n)?)
}

/// Quadratic generator `¼ Σ_ab A_ab c_a c_b` of the lift of `exp(A)`.
pub fn rotation_generator(a: &crate::linalg::RMatrix) -> Result<MajoranaPolynomial> {
    let modes = a.nrows();
    let mut terms = Vec::new();
    for p in 0..modes {
        for q in p + 1..modes {
            let w = 0.25 * (a[(p, q)] - a[(q, p)]);
            terms.push((Complex64::new(w, 0.0), (1u64 << p) | (1u64 << q)));
        }
    }
    MajoranaPolynomial::from_terms(modes, terms)
}

/// Fermionic Gaussian unitary `U` with `U† c_a U = Σ_b R_ab c_b`, taken as the
/// exponential of the traceless quadratic generator of `logm(R)`.
pub fn gaussian_unitary_from_rotation(r: &MajoranaRotation) -> Result<CMatrix> {
    check_qubits(r.modes() / 2)?;
    let a = logm_special_orthogonal(r.matrix())?;
    matrix_exp(&polynomial_to_operator(&rotation_generator(&a)?)?)
}

/// `U(R)|ψ>` for the same lift as [`gaussian_unitary_from_rotation`], computed
/// with scaled Taylor steps on the sparse generator instead of a dense exponential.
pub fn apply_gaussian_unitary(r: &MajoranaRotation, state: &DenseState) -> Result<DenseState> {
    if r.modes() != 2 * state.qubits {
        return Err(Error::Domain("rotation and state act on different mode counts".into()));
    }
    let nf = so_normal_form(r.matrix())?;
    let norm: f64 = nf.angles.iter().map(|t| t.abs() / 2.0).sum();
    let steps = norm.ceil().max(1.0) as usize;
    let h = polynomial_to_operator(&rotation_generator(&nf.generator())?)? / Complex64::new(steps as f64, 0.0);
    let mut v = state.amplitudes.clone();
    for _ in 0..steps {
        let mut term = v.clone();
        let mut acc = v.clone();
        for m in 1..60 {
            term = &h * term / Complex64::new(m as f64, 0.0);
            acc += &term;
            if term.norm() <= 1e-17 * acc.norm() {
                break;
            }
        }
        v = acc;
    }
    Ok(DenseState { amplitudes: v, qubits: state.qubits })
}

/// Unnormalised statevector.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    amplitudes: DVector<Complex64>,
    qubits: usize,
}

impl DenseState {
    pub fn from_amplitudes(amplitudes: DVector<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::Domain(format!("state dimension {dim} is not a power of two")));
        }
        let qubits = dim.trailing_zeros() as usize;
        check_qubits(qubits)?;
        Ok(Self { amplitudes, qubits })
    }

    /// `|x>` for a bit string with bit `j - 1` = qubit `j`.
    pub fn basis(n: usize, x: u64) -> Result<Self> {
        check_qubits(n)?;
        let mut amplitudes = DVector::zeros(1 << n);
        amplitudes[dense_index(x, n)] = ONE;
        Ok(Self { amplitudes, qubits: n })
    }

    pub fn vacuum(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// `<x|ψ>` for a bit string `x`.
    pub fn amplitude(&self, x: u64) -> Complex64 {
        self.amplitudes[dense_index(x, self.qubits)]
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn apply(&self, u: &CMatrix) -> Result<Self> {
        if u.ncols() != self.amplitudes.len() || u.nrows() != self.amplitudes.len() {
            return Err(Error::Domain("operator and state dimensions differ".into()));
        }
        Ok(Self { amplitudes: u * &self.amplitudes, qubits: self.qubits })
    }

    /// `p |ψ>` without forming the dense operator.
    pub fn apply_polynomial(&self, p: &MajoranaPolynomial) -> Result<Self> {
        if p.qubits() != self.qubits {
            return Err(Error::Domain("polynomial and state act on different qubit counts".into()));
        }
        let n = self.qubits;
        let mut out = DVector::zeros(self.amplitudes.len());
        for (mask, coef) in p.terms() {
            for (col, &amp) in self.amplitudes.iter().enumerate() {
                if amp == ZERO {
                    continue;
                }
                let (phase, y) = monomial_action(mask, basis_bits(col, n));
                out[dense_index(y, n)] += coef * phase * amp;
            }
        }
        Ok(Self { amplitudes: out, qubits: n })
    }

    pub fn scaled(&self, w: f64) -> Self {
        Self { amplitudes: &self.amplitudes * Complex64::new(w, 0.0), qubits: self.qubits }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.qubits != other.qubits {
            return Err(Error::Domain("states act on different qubit counts".into()));
        }
        Ok(Self { amplitudes: &self.amplitudes + &other.amplitudes, qubits: self.qubits })
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// `Σ_j c_j U_j |initial>`, deliberately not renormalised.
pub fn lcu_state(c: &CoefficientVector, unitaries: &[CMatrix], initial: &DenseState) -> Result<DenseState> {
    if c.len() != unitaries.len() {
        return Err(Error::Domain(format!("{} coefficients for {} unitaries", c.len(), unitaries.len())));
    }
    let mut acc = DVector::zeros(initial.amplitudes.len());
    for (&w, u) in c.values().iter().zip(unitaries) {
        if !is_unitary(u, 1e-10) {
            return Err(Error::Contract("LCU branch is not unitary".into()));
        }
        acc += (u * &initial.amplitudes) * Complex64::new(w, 0.0);
    }
    DenseState::from_amplitudes(acc)
}

/// Rejects a complex value whose imaginary part exceeds the tolerance.
pub fn real_part_checked(z: Complex64, scale: f64) -> Result<f64> {
    if z.im.abs() > EXPECTATION_IMAG_TOL * scale.max(1.0) {
        return Err(Error::Numerical(format!("expectation has imaginary part {:e}", z.im)));
    }
    Ok(z.re)
}

/// `<ψ|O|ψ>` for the unnormalised `ψ`.
pub fn expectation(state: &DenseState, o: &CMatrix) -> Result<f64> {
    if o.nrows() != state.amplitudes.len() || !o.is_square() {
        return Err(Error::Domain("observable and state dimensions differ".into()));
    }
    let scale = max_abs(o);
    if !is_hermitian(o, 1e-10 * scale.max(1.0)) {
        return Err(Error::Contract("observable is not Hermitian".into()));
    }
    let z = state.amplitudes.dotc(&(o * &state.amplitudes));
    real_part_checked(z, scale)
}

/// `<ψ|p|ψ>` computed from the polynomial directly.
pub fn expectation_polynomial(state: &DenseState, p: &MajoranaPolynomial) -> Result<f64> {
    if !p.is_hermitian(1e-12) {
        return Err(Error::Contract("observable is not Hermitian".into()));
    }
    let z = state.inner(&state.apply_polynomial(p)?);
    real_part_checked(z, p.terms().map(|(_, c)| c.norm()).sum())
}

/// A density operator as a weighted mixture of pure states.
#[derive(Clone, Debug)]
pub struct Mixture {
    pub components: Vec<(f64, DenseState)>,
}

impl Mixture {
    pub fn pure(state: DenseState) -> Self {
        Self { components: vec![(1.0, state)] }
    }
}

/// `Σ_i c_i tr(U_i ρ_i U_i† O)`.
pub fn incoherent_expectation(
    c: &CoefficientVector,
    unitaries: &[CMatrix],
    initials: &[Mixture],
    o: &CMatrix,
) -> Result<f64> {
    if c.len() != unitaries.len() || c.len() != initials.len() {
        return Err(Error::Domain("coefficients, unitaries and initial states must have equal length".into()));
    }
    let mut total = 0.0;
    for ((&w, u), rho) in c.values().iter().zip(unitaries).zip(initials) {
        for (p, psi) in &rho.components {
            total += w * p * expectation(&psi.apply(u)?, o)?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    const I: Complex64 = Complex64::new(0.0, 1.0);
    use crate::sampling::{sample_haar_special_orthogonal, SeededRng};

    fn pauli(s: &str, n: usize) -> CMatrix {
        polynomial_to_operator(&MajoranaPolynomial::parse_pauli_sum(s, n).unwrap()).unwrap()
    }

    fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
        a.kronecker(b)
    }

    #[test]
    fn single_qubit_majoranas() {
        let c = majorana_operators(1).unwrap();
        let x = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let y = CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]);
        let z = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
        assert_eq!(c[0], x);
        assert_eq!(c[1], y);
        assert!(max_abs(&(&c[0] * &c[1] * (-I) - &z)) < 1e-15);
    }

    #[test]
    fn jordan_wigner_matches_kronecker_products() {
        let x = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let y = CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]);
        let z = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
        let id = CMatrix::identity(2, 2);
        let c = majorana_operators(3).unwrap();
        // c_3 = Z ⊗ X ⊗ I, c_6 = Z ⊗ Z ⊗ Y
        assert_eq!(c[2], kron(&kron(&z, &x), &id));
        assert_eq!(c[5], kron(&kron(&z, &z), &y));
    }

    #[test]
    fn anticommutation() {
        for n in 1..=5 {
            let c = majorana_operators(n).unwrap();
            let dim = 1 << n;
            for j in 0..2 * n {
                for k in 0..2 * n {
                    let ac = &c[j] * &c[k] + &c[k] * &c[j];
                    let expected = if j == k {
                        CMatrix::identity(dim, dim) * Complex64::new(2.0, 0.0)
                    } else {
                        CMatrix::zeros(dim, dim)
                    };
                    assert!(max_abs(&(ac - expected)) < 1e-14);
                }
            }
        }
        assert!(matches!(majorana_operators(11), Err(Error::Resource(_))));
    }

    #[test]
    fn polynomial_matches_operator_products() {
        let c = majorana_operators(2).unwrap();
        let p = MajoranaPolynomial::monomial(4, ONE, &[1, 3, 4]).unwrap();
        let dense = polynomial_to_operator(&p).unwrap();
        assert!(max_abs(&(dense - &c[0] * &c[2] * &c[3])) < 1e-15);
        let empty = MajoranaPolynomial::zero(4).unwrap();
        assert_eq!(polynomial_to_operator(&empty).unwrap(), CMatrix::zeros(4, 4));
        let z = polynomial_to_operator(&MajoranaPolynomial::from_terms(2, [(-I, 0b11)]).unwrap()).unwrap();
        assert_eq!(z, CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]));
    }

    #[test]
    fn parity_is_z_string() {
        for n in 1..=4 {
            let p = parity_operator(n).unwrap();
            let dim = 1 << n;
            assert!(max_abs(&(&p * &p - CMatrix::identity(dim, dim))) < 1e-14);
            let vac = DenseState::vacuum(n).unwrap();
            assert!((expectation(&vac, &p).unwrap() - 1.0).abs() < 1e-14);
        }
        assert_eq!(parity_operator(1).unwrap(), pauli("Z1", 1));
    }

    #[test]
    fn quadratic_hamiltonian_is_hermitian() {
        let mut rng = SeededRng::new(3, 0);
        let r = sample_haar_special_orthogonal(6, &mut rng).unwrap();
        let h = r.matrix() - r.matrix().transpose();
        let op = polynomial_to_operator(&MajoranaPolynomial::quadratic_hamiltonian(&h).unwrap()).unwrap();
        assert!(is_hermitian(&op, 1e-12));
    }

    fn conjugation_residual(u: &CMatrix, r: &crate::linalg::RMatrix, c: &[CMatrix]) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..c.len() {
            let lhs = u.adjoint() * &c[a] * u;
            let mut rhs = CMatrix::zeros(lhs.nrows(), lhs.ncols());
            for b in 0..c.len() {
                rhs += &c[b] * Complex64::new(r[(a, b)], 0.0);
            }
            worst = worst.max(max_abs(&(lhs - rhs)));
        }
        worst
    }

    #[test]
    fn lift_conjugates_majoranas() {
        let mut rng = SeededRng::new(11, 0);
        for n in 1..=4 {
            let c = majorana_operators(n).unwrap();
            for _ in 0..3 {
                let r = sample_haar_special_orthogonal(2 * n, &mut rng).unwrap();
                let u = gaussian_unitary_from_rotation(&r).unwrap();
                assert!(is_unitary(&u, 1e-10));
                assert!(conjugation_residual(&u, r.matrix(), &c) < 1e-8);
            }
        }
        let id = gaussian_unitary_from_rotation(&MajoranaRotation::identity(4).unwrap()).unwrap();
        assert!(max_abs(&(id - CMatrix::identity(4, 4))) < 1e-14);
    }

    #[test]
    fn lift_respects_composition_up_to_phase() {
        let mut rng = SeededRng::new(12, 0);
        let c = majorana_operators(3).unwrap();
        let r1 = sample_haar_special_orthogonal(6, &mut rng).unwrap();
        let r2 = sample_haar_special_orthogonal(6, &mut rng).unwrap();
        let u12 = gaussian_unitary_from_rotation(&r1.compose(&r2)).unwrap();
        let prod = gaussian_unitary_from_rotation(&r1).unwrap() * gaussian_unitary_from_rotation(&r2).unwrap();
        for a in &c {
            let lhs = u12.adjoint() * a * &u12;
            let rhs = prod.adjoint() * a * &prod;
            assert!(max_abs(&(lhs - rhs)) < 1e-8);
        }
    }

    #[test]
    fn state_evolution_matches_dense_exponential() {
        let mut rng = SeededRng::new(13, 0);
        for n in 1..=6 {
            let r = sample_haar_special_orthogonal(2 * n, &mut rng).unwrap();
            let psi = DenseState::basis(n, 0b1 % (1 << n)).unwrap();
            let a = psi.apply(&gaussian_unitary_from_rotation(&r).unwrap()).unwrap();
            let b = apply_gaussian_unitary(&r, &psi).unwrap();
            assert!((a.amplitudes() - b.amplitudes()).norm() < 1e-12);
        }
    }

    #[test]
    fn givens_lift_on_vacuum() {
        // exp(θ/2 c_1 c_2) |0> = e^{iθ/2} |0>
        let theta = 0.7;
        let r = MajoranaRotation::givens(2, 0, 1, theta).unwrap();
        let psi = DenseState::vacuum(1).unwrap().apply(&gaussian_unitary_from_rotation(&r).unwrap()).unwrap();
        assert!((psi.amplitude(0) - Complex64::from_polar(1.0, theta / 2.0)).norm() < 1e-12);
    }

    #[test]
    fn lcu_examples() {
        let vac = DenseState::vacuum(1).unwrap();
        let id = CMatrix::identity(2, 2);
        let one = CoefficientVector::new(vec![1.0]).unwrap();
        assert_eq!(lcu_state(&one, std::slice::from_ref(&id), &vac).unwrap(), vac);
        let half = CoefficientVector::uniform(2).unwrap();
        let same = lcu_state(&half, &[id.clone(), id.clone()], &vac).unwrap();
        assert!((same.norm_squared() - 1.0).abs() < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DenseState::from_amplitudes(DVector::from_vec(vec![ONE * s, ONE * s])).unwrap();
        let z = pauli("Z1", 1);
        let out = lcu_state(&half, &[id.clone(), z.clone()], &plus).unwrap();
        assert!((out.amplitude(0) - ONE * s).norm() < 1e-15);
        assert!(out.amplitude(1).norm() < 1e-15);
        assert!((out.norm_squared() - 0.5).abs() < 1e-15);
        assert!((expectation(&out, &z).unwrap() - 0.5).abs() < 1e-15);
        assert!(lcu_state(&half, &[id], &vac).is_err());
    }

    #[test]
    fn expectation_decomposes_into_pairs() {
        let mut rng = SeededRng::new(5, 0);
        let n = 3;
        let c = CoefficientVector::new(vec![0.2, 0.5, 0.3]).unwrap();
        let us: Vec<CMatrix> = (0..3)
            .map(|_| gaussian_unitary_from_rotation(&sample_haar_special_orthogonal(2 * n, &mut rng).unwrap()).unwrap())
            .collect();
        let vac = DenseState::vacuum(n).unwrap();
        let o = pauli("Z1 + 0.3*X1X2", n);
        let m = expectation(&lcu_state(&c, &us, &vac).unwrap(), &o).unwrap();
        let mut direct = ZERO;
        for i in 0..3 {
            for j in 0..3 {
                let a = vac.apply(&us[i]).unwrap();
                let b = vac.apply(&us[j]).unwrap();
                direct += a.inner(&b.apply(&o).unwrap()) * (c.values()[i] * c.values()[j]);
            }
        }
        assert!((m - direct.re).abs() < 1e-12 && direct.im.abs() < 1e-12);
        let poly = MajoranaPolynomial::parse_pauli_sum("Z1 + 0.3*X1X2", n).unwrap();
        let via_poly = expectation_polynomial(&lcu_state(&c, &us, &vac).unwrap(), &poly).unwrap();
        assert!((m - via_poly).abs() < 1e-12);
    }

    #[test]
    fn incoherent_mixture() {
        let mut rng = SeededRng::new(6, 0);
        let n = 2;
        let o = pauli("Z1Z2 + X2", n);
        let us: Vec<CMatrix> = (0..2)
            .map(|_| gaussian_unitary_from_rotation(&sample_haar_special_orthogonal(2 * n, &mut rng).unwrap()).unwrap())
            .collect();
        let vac = DenseState::vacuum(n).unwrap();
        let one = DenseState::basis(n, 0b01).unwrap();
        let rho = Mixture { components: vec![(0.25, vac.clone()), (0.75, one.clone())] };
        let c = CoefficientVector::new(vec![0.4, 0.6]).unwrap();
        let got = incoherent_expectation(&c, &us, &[rho.clone(), Mixture::pure(vac.clone())], &o).unwrap();
        let by_hand = 0.4
            * (0.25 * expectation(&vac.apply(&us[0]).unwrap(), &o).unwrap()
                + 0.75 * expectation(&one.apply(&us[0]).unwrap(), &o).unwrap())
            + 0.6 * expectation(&vac.apply(&us[1]).unwrap(), &o).unwrap();
        assert!((got - by_hand).abs() < 1e-12);
        let single = incoherent_expectation(
            &CoefficientVector::uniform(1).unwrap(),
            &us[..1],
            &[Mixture::pure(vac.clone())],
            &o,
        )
        .unwrap();
        assert!((single - expectation(&vac.apply(&us[0]).unwrap(), &o).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn basis_convention() {
        // qubit 1 flipped is the upper half of the dense vector
        let s = DenseState::basis(3, 0b001).unwrap();
        assert_eq!(s.amplitudes()[4], ONE);
        let z1 = pauli("Z1", 3);
        assert!((expectation(&s, &z1).unwrap() + 1.0).abs() < 1e-15);
    }
}
