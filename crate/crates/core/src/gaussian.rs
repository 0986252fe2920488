//! Pure fermionic Gaussian states tracked as `(Γ, x, r)`: the covariance matrix,
//! a reference basis string and the amplitude `r = <x|ψ>`, which pins down the
//! global phase.
//!
//! Amplitudes, overlaps and matrix elements all reduce to one primitive: the
//! expectation of an ordered product of linear forms and "pair" factors
//! `α + β (u·c)(v·c)` in a transition `<a| · |b> / <a|b>`, evaluated as a single
//! Pfaffian.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::monomial_action;
use crate::linalg::{pfaffian, so_normal_form, symplectic_form, CMatrix, RMatrix};
use crate::majorana::{adjoint_sign, mask_modes, MajoranaPolynomial, Mask};
use crate::sampling::{CoefficientVector, MajoranaRotation};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default cap on the number of distinct monomials in an observable.
pub const MAX_OBSERVABLE_TERMS: usize = 4;

/// One factor of an ordered operator product.
#[derive(Clone, Debug)]
pub enum WickItem {
    /// `u·c`
    Linear(DVector<f64>),
    /// `α + β (u·c)(v·c)`
    Pair { u: DVector<f64>, v: DVector<f64>, alpha: Complex64, beta: Complex64 },
}

fn unit(modes: usize, a: usize) -> DVector<f64> {
    let mut e = DVector::zeros(modes);
    e[a] = 1.0;
    e
}

/// Transition contraction `G_ij = <a|c_i c_j|b> / <a|b>` from the two covariance
/// matrices. Fails when `<a|b> = 0`.
pub fn transition_contraction(gamma_a: &RMatrix, gamma_b: &RMatrix) -> Result<CMatrix> {
    let n = gamma_a.nrows();
    let s = gamma_a + gamma_b;
    let lu = s.lu();
    let inv = lu
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("states are orthogonal; transition contraction undefined".into()))?;
    let inv = inv.map(|x| Complex64::new(x, 0.0));
    let id = CMatrix::identity(n, n) * I;
    let left = &inv * (gamma_a.map(|x| Complex64::new(x, 0.0)) + &id);
    let right = &inv * (gamma_b.map(|x| Complex64::new(x, 0.0)) - &id);
    Ok(left.transpose() * right * Complex64::new(2.0, 0.0))
}

/// `<a| items |b> / <a|b>` for the transition with contraction `g`.
pub fn wick_ratio(g: &CMatrix, items: &[WickItem]) -> Result<Complex64> {
    let modes = g.nrows();
    let mut rows: Vec<(&DVector<f64>, Complex64)> = Vec::new();
    let mut blocks: Vec<(usize, Complex64)> = Vec::new();
    for item in items {
        match item {
            WickItem::Linear(u) => rows.push((u, ONE)),
            WickItem::Pair { u, v, alpha, beta } => {
                blocks.push((rows.len(), *alpha));
                rows.push((u, *beta));
                rows.push((v, ONE));
            }
        }
    }
    let m = rows.len();
    if m == 0 {
        return Ok(ONE);
    }
    if m % 2 == 1 && blocks.is_empty() {
        return Ok(ZERO);
    }
    let mut vecs = CMatrix::zeros(modes, m);
    for (p, (u, w)) in rows.iter().enumerate() {
        if u.len() != modes {
            return Err(Error::Domain("Wick item has the wrong number of modes".into()));
        }
        for a in 0..modes {
            vecs[(a, p)] = Complex64::new(u[a], 0.0) * w;
        }
    }
    let full = vecs.transpose() * g * &vecs;
    let mut mat = CMatrix::zeros(m, m);
    for p in 0..m {
        for q in p + 1..m {
            mat[(p, q)] = full[(p, q)];
            mat[(q, p)] = -full[(p, q)];
        }
    }
    for (p, alpha) in blocks {
        mat[(p, p + 1)] += alpha;
        mat[(p + 1, p)] -= alpha;
    }
    if m % 2 == 1 {
        return Ok(ZERO);
    }
    pfaffian(&mat)
}

/// Covariance matrix of the basis state `x`.
pub fn basis_covariance(modes: usize, x: u64) -> RMatrix {
    let mut g = symplectic_form(modes);
    for j in 0..modes / 2 {
        if (x >> j) & 1 == 1 {
            g[(2 * j, 2 * j + 1)] = -1.0;
            g[(2 * j + 1, 2 * j)] = 1.0;
        }
    }
    g
}

/// Odd-Majorana mask `y` and sign `ε` with `|to> = ε c^y |from>`.
fn basis_link(from: u64, to: u64) -> (Mask, Complex64) {
    let diff = from ^ to;
    let mut y = 0;
    for j in 0..64 {
        if (diff >> j) & 1 == 1 {
            y |= 1u64 << (2 * j);
        }
    }
    let (phase, landed) = monomial_action(y, from);
    debug_assert_eq!(landed, to);
    (y, phase.conj())
}

/// Normal-mode basis `O` with `Oᵀ Γ O = ⊕ [[0,1],[-1,0]]` for a pure covariance matrix.
pub fn normal_modes(gamma: &RMatrix) -> RMatrix {
    let modes = gamma.nrows();
    let mut o = RMatrix::zeros(modes, modes);
    let mut filled = 0;
    while filled < modes {
        let mut best: Option<DVector<f64>> = None;
        let mut best_norm = -1.0;
        for a in 0..modes {
            let mut u = unit(modes, a);
            for k in 0..filled {
                let col = o.column(k).clone_owned();
                u -= &col * col.dot(&u);
            }
            let nrm = u.norm();
            if nrm > best_norm {
                best_norm = nrm;
                best = Some(u);
            }
        }
        let mut u = best.expect("nonempty candidate set");
        u /= best_norm;
        let mut v = -(gamma * &u);
        for k in 0..filled {
            let col = o.column(k).clone_owned();
            v -= &col * col.dot(&v);
        }
        v -= &u * u.dot(&v);
        let vn = v.norm();
        v /= vn;
        o.set_column(filled, &u);
        o.set_column(filled + 1, &v);
        filled += 2;
    }
    o
}

/// Pair factors whose ordered product is `|ψ><ψ|` for covariance `gamma`.
fn projector_items(gamma: &RMatrix) -> Vec<WickItem> {
    let o = normal_modes(gamma);
    (0..gamma.nrows() / 2)
        .map(|j| WickItem::Pair {
            u: o.column(2 * j).clone_owned(),
            v: o.column(2 * j + 1).clone_owned(),
            alpha: Complex64::new(0.5, 0.0),
            beta: Complex64::new(0.0, -0.5),
        })
        .collect()
}

fn odd_items(modes: usize, mask: Mask) -> Vec<WickItem> {
    mask_modes(mask).into_iter().map(|a| WickItem::Linear(unit(modes, a))).collect()
}

/// Pure Gaussian state with a tracked reference amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    covariance: RMatrix,
    reference_basis: u64,
    reference_amplitude: Complex64,
}

impl GaussianState {
    pub fn vacuum(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    /// Basis state `|x>` with bit `j - 1` holding qubit `j`.
    pub fn basis(n: usize, x: u64) -> Result<Self> {
        if n == 0 || n > 32 {
            return Err(Error::Domain(format!("qubit count must be in 1..=32, got {n}")));
        }
        if n < 64 && x >> n != 0 {
            return Err(Error::Domain(format!("basis string {x:#b} has more than {n} bits")));
        }
        Ok(Self { covariance: basis_covariance(2 * n, x), reference_basis: x, reference_amplitude: ONE })
    }

    pub fn covariance(&self) -> &RMatrix {
        &self.covariance
    }

    pub fn reference_basis(&self) -> u64 {
        self.reference_basis
    }

    pub fn reference_amplitude(&self) -> Complex64 {
        self.reference_amplitude
    }

    pub fn modes(&self) -> usize {
        self.covariance.nrows()
    }

    pub fn qubits(&self) -> usize {
        self.modes() / 2
    }

    /// Same state multiplied by a global phase.
    pub fn with_global_phase(&self, phase: Complex64) -> Self {
        let mut s = self.clone();
        s.reference_amplitude *= phase;
        s
    }

    /// Smallest reference amplitude tolerated before re-pivoting.
    pub fn pivot_threshold(&self) -> f64 {
        2f64.powf(-(self.qubits() as f64) / 2.0 - 2.0)
    }

    fn reference_contraction(&self) -> Result<CMatrix> {
        transition_contraction(&basis_covariance(self.modes(), self.reference_basis), &self.covariance)
    }

    /// `<x|ψ>` for an arbitrary basis string.
    pub fn amplitude(&self, x: u64) -> Result<Complex64> {
        let g = self.reference_contraction()?;
        self.amplitude_with(&g, x, &[])
    }

    /// `<x| Π items |ψ>` given the reference contraction `g`.
    fn amplitude_with(&self, g: &CMatrix, x: u64, items: &[WickItem]) -> Result<Complex64> {
        let (y, eps) = basis_link(self.reference_basis, x);
        let mut all = odd_items(self.modes(), y);
        all.extend_from_slice(items);
        Ok(eps * adjoint_sign(y) * self.reference_amplitude * wick_ratio(g, &all)?)
    }

    /// Basis string reached by measuring each qubit in turn and keeping the
    /// likelier outcome; its probability is at least `2^-N`.
    pub fn greedy_basis(&self) -> u64 {
        let mut g = self.covariance.clone();
        let modes = self.modes();
        let mut x = 0u64;
        for j in 0..modes / 2 {
            let (p, q) = (2 * j, 2 * j + 1);
            let s = if g[(p, q)] >= 0.0 { 1.0 } else { -1.0 };
            if s < 0.0 {
                x |= 1u64 << j;
            }
            let denom = 1.0 + s * g[(p, q)];
            let mut next = g.clone();
            for a in 0..modes {
                for b in 0..modes {
                    next[(a, b)] += s * (g[(a, q)] * g[(b, p)] - g[(a, p)] * g[(b, q)]) / denom;
                }
            }
            for a in 0..modes {
                for b in [p, q] {
                    next[(a, b)] = 0.0;
                    next[(b, a)] = 0.0;
                }
            }
            next[(p, q)] = s;
            next[(q, p)] = -s;
            g = next;
        }
        x
    }

    /// `U(R)|ψ>` with `U(R)` the lift fixed by the principal logarithm of `R`.
    pub fn apply_rotation(&self, r: &MajoranaRotation) -> Result<Self> {
        if r.modes() != self.modes() {
            return Err(Error::Domain(format!(
                "rotation on {} modes applied to a state on {}",
                r.modes(),
                self.modes()
            )));
        }
        let nf = so_normal_form(r.matrix())?;
        let factors: Vec<WickItem> = nf
            .angles
            .iter()
            .enumerate()
            .map(|(j, &theta)| WickItem::Pair {
                u: nf.basis.column(2 * j).clone_owned(),
                v: nf.basis.column(2 * j + 1).clone_owned(),
                alpha: Complex64::new((theta / 2.0).cos(), 0.0),
                beta: Complex64::new((theta / 2.0).sin(), 0.0),
            })
            .collect();
        let rm = r.matrix();
        let covariance = rm * &self.covariance * rm.transpose();
        let covariance = (&covariance - covariance.transpose()) * 0.5;
        let g = self.reference_contraction()?;
        let threshold = self.pivot_threshold();

        let amp = self.amplitude_with(&g, self.reference_basis, &factors)?;
        if amp.norm() >= threshold {
            return Ok(Self { covariance, reference_basis: self.reference_basis, reference_amplitude: amp });
        }
        let mut next = Self { covariance, reference_basis: self.reference_basis, reference_amplitude: ONE };
        let x = next.greedy_basis();
        let amp = self.amplitude_with(&g, x, &factors)?;
        if amp.norm() < threshold {
            return Err(Error::Numerical(format!(
                "re-pivot failed: best basis amplitude {:e} below {threshold:e}",
                amp.norm()
            )));
        }
        next.reference_basis = x;
        next.reference_amplitude = amp;
        Ok(next)
    }

    /// `max |ΓΓᵀ - I|`.
    pub fn purity_residual(&self) -> f64 {
        let n = self.modes();
        let d = &self.covariance * self.covariance.transpose() - RMatrix::identity(n, n);
        d.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }
}

fn check_pair(a: &GaussianState, b: &GaussianState) -> Result<()> {
    if a.modes() != b.modes() {
        return Err(Error::Domain(format!("mode mismatch: {} vs {}", a.modes(), b.modes())));
    }
    Ok(())
}

/// Data reused across every pair a branch takes part in.
struct Prepared {
    contraction: CMatrix,
    projector: Vec<WickItem>,
}

impl Prepared {
    fn new(s: &GaussianState) -> Result<Self> {
        Ok(Self { contraction: s.reference_contraction()?, projector: projector_items(&s.covariance) })
    }
}

/// `<a| c^mask |b>` using `<a|X|b> = <x_a| ρ_a X |b> / r_a`.
fn monomial_element(
    a: &GaussianState,
    pa: &Prepared,
    mask: Mask,
    b: &GaussianState,
    pb: &Prepared,
) -> Result<Complex64> {
    let mut items = pa.projector.clone();
    items.extend(odd_items(a.modes(), mask));
    Ok(b.amplitude_with(&pb.contraction, a.reference_basis, &items)? / a.reference_amplitude)
}

pub fn overlap(a: &GaussianState, b: &GaussianState) -> Result<Complex64> {
    check_pair(a, b)?;
    monomial_element(a, &Prepared::new(a)?, 0, b, &Prepared::new(b)?)
}

/// `<a| p |b>`.
pub fn matrix_element(a: &GaussianState, p: &MajoranaPolynomial, b: &GaussianState) -> Result<Complex64> {
    check_pair(a, b)?;
    if p.modes() != a.modes() {
        return Err(Error::Domain("observable and states act on different mode counts".into()));
    }
    let (pa, pb) = (Prepared::new(a)?, Prepared::new(b)?);
    let mut total = ZERO;
    for (mask, coef) in p.terms() {
        total += coef * monomial_element(a, &pa, mask, b, &pb)?;
    }
    Ok(total)
}

/// LCU expectation `m` with the matrix of pair terms.
#[derive(Clone, Debug)]
pub struct LcuExpectation {
    pub m: f64,
    /// `components[(i, j)] = <ψ_j|O|ψ_i>`.
    pub components: CMatrix,
}

pub fn lcu_expectation(
    c: &CoefficientVector,
    states: &[GaussianState],
    p: &MajoranaPolynomial,
) -> Result<LcuExpectation> {
    lcu_expectation_with_limit(c, states, p, MAX_OBSERVABLE_TERMS)
}

pub fn lcu_expectation_with_limit(
    c: &CoefficientVector,
    states: &[GaussianState],
    p: &MajoranaPolynomial,
    max_terms: usize,
) -> Result<LcuExpectation> {
    if c.len() != states.len() {
        return Err(Error::Domain(format!("{} coefficients for {} branches", c.len(), states.len())));
    }
    if !p.is_hermitian(1e-12) {
        return Err(Error::Domain("observable is not Hermitian".into()));
    }
    if p.len() > max_terms {
        return Err(Error::Domain(format!("observable has {} monomials; the limit is {max_terms}", p.len())));
    }
    for s in states {
        if s.modes() != p.modes() {
            return Err(Error::Domain("observable and states act on different mode counts".into()));
        }
    }
    let prepared = states.iter().map(Prepared::new).collect::<Result<Vec<_>>>()?;
    let k = states.len();
    let mut components = DMatrix::from_element(k, k, ZERO);
    for i in 0..k {
        for j in 0..k {
            let mut total = ZERO;
            for (mask, coef) in p.terms() {
                total += coef * monomial_element(&states[j], &prepared[j], mask, &states[i], &prepared[i])?;
            }
            components[(i, j)] = total;
        }
    }
    let w = c.values();
    let mut m = ZERO;
    for i in 0..k {
        for j in 0..k {
            m += components[(i, j)] * (w[i] * w[j]);
        }
    }
    let scale: f64 = p.terms().map(|(_, a)| a.norm()).sum::<f64>().max(1.0);
    if m.im.abs() > 1e-9 * scale {
        return Err(Error::Numerical(format!("LCU expectation has imaginary part {:e}", m.im)));
    }
    Ok(LcuExpectation { m: m.re, components })
}
