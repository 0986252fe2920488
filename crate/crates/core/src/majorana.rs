//! Observables as complex-weighted sums of Majorana monomials `c^b`, with the
//! Jordan-Wigner dictionary to Pauli strings.
//!
//! Mode `a` (0-based) is the Majorana `c_{a+1}`; a mask sets bit `a` when `c_{a+1}`
//! occurs in the monomial, and monomials are always ordered by ascending mode.
//! Qubit `j` (1-based) owns modes `2j-2` and `2j-1`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Mask = u64;

/// Largest number of Majorana modes a mask can address.
pub const MAX_MODES: usize = 64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Sign of `c^a c^b = sign · c^(a xor b)`.
pub fn monomial_product_sign(a: Mask, b: Mask) -> f64 {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        swaps += a.checked_shr(j + 1).unwrap_or(0).count_ones();
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `(c^b)† = adjoint_sign(b) · c^b`.
pub fn adjoint_sign(mask: Mask) -> f64 {
    let k = mask.count_ones();
    if (k * k.saturating_sub(1) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub fn full_mask(modes: usize) -> Mask {
    if modes == 64 {
        Mask::MAX
    } else {
        (1u64 << modes) - 1
    }
}

/// Mode indices of a mask in ascending order.
pub fn mask_modes(mask: Mask) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut rest = mask;
    while rest != 0 {
        out.push(rest.trailing_zeros() as usize);
        rest &= rest - 1;
    }
    out
}

/// `c_{a+1} |x> = phase |x'>` for a 0-based mode `a` and a basis string `x`
/// with bit `j - 1` holding qubit `j`.
pub fn majorana_action(mode: usize, x: u64) -> (Complex64, u64) {
    let q = mode / 2;
    let below = x & ((1u64 << q) - 1);
    let mut phase = if below.count_ones().is_multiple_of(2) { ONE } else { -ONE };
    if mode % 2 == 1 {
        phase *= if (x >> q) & 1 == 0 { I } else { -I };
    }
    (phase, x ^ (1u64 << q))
}

/// `c^b |x> = phase |x'>`, with `c^b` in ascending mode order.
pub fn monomial_action(mask: Mask, x: u64) -> (Complex64, u64) {
    let mut phase = ONE;
    let mut state = x;
    let mut rest = mask;
    while rest != 0 {
        let a = 63 - rest.leading_zeros() as usize;
        rest &= !(1u64 << a);
        let (p, s) = majorana_action(a, state);
        phase *= p;
        state = s;
    }
    (phase, state)
}

/// `Σ_b a_b c^b` on a fixed number of modes.
#[derive(Clone, Debug, PartialEq)]
pub struct MajoranaPolynomial {
    modes: usize,
    terms: BTreeMap<Mask, Complex64>,
}

impl MajoranaPolynomial {
    pub fn zero(modes: usize) -> Result<Self> {
        if modes == 0 || modes % 2 == 1 || modes > MAX_MODES {
            return Err(Error::Domain(format!("mode count must be even and in 2..={MAX_MODES}, got {modes}")));
        }
        Ok(Self { modes, terms: BTreeMap::new() })
    }

    pub fn identity(modes: usize) -> Result<Self> {
        Self::from_terms(modes, [(ONE, 0)])
    }

    /// Builds a polynomial, merging repeated masks and dropping exact zeros.
    pub fn from_terms<T>(modes: usize, terms: T) -> Result<Self>
    where
        T: IntoIterator<Item = (Complex64, Mask)>,
    {
        let mut p = Self::zero(modes)?;
        let limit = full_mask(modes);
        for (coef, mask) in terms {
            if mask & !limit != 0 {
                return Err(Error::Domain(format!("mask {mask:#x} exceeds {modes} modes")));
            }
            *p.terms.entry(mask).or_insert(ZERO) += coef;
        }
        p.terms.retain(|_, c| *c != ZERO);
        Ok(p)
    }

    /// Single monomial `coef · c_{i1} c_{i2} ...` from 1-based mode indices in
    /// any order; the coefficient absorbs the reordering sign.
    pub fn monomial(modes: usize, coef: Complex64, indices: &[usize]) -> Result<Self> {
        let mut mask = 0;
        let mut sign = 1.0;
        for &i in indices {
            if i == 0 || i > modes {
                return Err(Error::Domain(format!("Majorana index {i} out of range 1..={modes}")));
            }
            let bit = 1u64 << (i - 1);
            sign *= monomial_product_sign(mask, bit);
            mask ^= bit;
        }
        Self::from_terms(modes, [(coef * sign, mask)])
    }

    /// Quadratic Hamiltonian `i Σ_{jk} h_jk c_j c_k` for a real antisymmetric `h`.
    pub fn quadratic_hamiltonian(h: &nalgebra::DMatrix<f64>) -> Result<Self> {
        let modes = h.nrows();
        let mut terms = Vec::new();
        for j in 0..modes {
            for k in j + 1..modes {
                let w = h[(j, k)] - h[(k, j)];
                terms.push((I * w, (1u64 << j) | (1u64 << k)));
            }
        }
        let diag: f64 = (0..modes).map(|j| h[(j, j)]).sum();
        terms.push((I * diag, 0));
        Self::from_terms(modes, terms)
    }

    /// Parity `P = (-i)^n c_1 ... c_{2n} = Z_1 ... Z_n`.
    pub fn parity(modes: usize) -> Result<Self> {
        let n = (modes / 2) as u32;
        Self::from_terms(modes, [((-I).powu(n), full_mask(modes))])
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn qubits(&self) -> usize {
        self.modes / 2
    }

    pub fn terms(&self) -> impl Iterator<Item = (Mask, Complex64)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mask: Mask) -> Complex64 {
        self.terms.get(&mask).copied().unwrap_or(ZERO)
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.count_ones()).max().unwrap_or(0)
    }

    /// `tr(O) / 2^n`.
    pub fn normalized_trace(&self) -> Complex64 {
        self.coefficient(0)
    }

    pub fn adjoint(&self) -> Self {
        Self { modes: self.modes, terms: self.terms.iter().map(|(&m, &c)| (m, c.conj() * adjoint_sign(m))).collect() }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let adj = self.adjoint();
        self.terms.keys().chain(adj.terms.keys()).all(|&m| (self.coefficient(m) - adj.coefficient(m)).norm() <= tol)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|c| *c *= s);
        out.terms.retain(|_, c| *c != ZERO);
        out
    }

    fn check_modes(&self, other: &Self) -> Result<()> {
        if self.modes != other.modes {
            return Err(Error::Domain(format!("mode mismatch: {} vs {}", self.modes, other.modes)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_modes(other)?;
        Self::from_terms(self.modes, self.terms().chain(other.terms()).map(|(m, c)| (c, m)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_modes(other)?;
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                terms.push((ca * cb * monomial_product_sign(a, b), a ^ b));
            }
        }
        Self::from_terms(self.modes, terms)
    }

    /// `tr(A B) / 2^n`, computed without forming the product.
    pub fn normalized_trace_of_product(&self, other: &Self) -> Result<Complex64> {
        self.check_modes(other)?;
        Ok(self.terms().map(|(m, c)| c * other.coefficient(m) * monomial_product_sign(m, m)).sum())
    }

    /// Pauli string on `n` qubits, `ops` holding `(qubit (1-based), 'X' | 'Y' | 'Z')`.
    pub fn pauli(qubits: usize, ops: &[(usize, char)]) -> Result<Self> {
        let modes = 2 * qubits;
        let mut acc = Self::identity(modes)?;
        for &(q, op) in ops {
            if q == 0 || q > qubits {
                return Err(Error::Domain(format!("qubit {q} out of range 1..={qubits}")));
            }
            let (odd, even) = (2 * q - 1, 2 * q);
            let z_string = {
                let mut z = Self::identity(modes)?;
                for l in 1..q {
                    z = z.mul(&Self::monomial(modes, -I, &[2 * l - 1, 2 * l])?)?;
                }
                z
            };
            let factor = match op.to_ascii_uppercase() {
                'X' => z_string.mul(&Self::monomial(modes, ONE, &[odd])?)?,
                'Y' => z_string.mul(&Self::monomial(modes, ONE, &[even])?)?,
                'Z' => Self::monomial(modes, -I, &[odd, even])?,
                'I' => Self::identity(modes)?,
                other => return Err(Error::Domain(format!("unknown Pauli '{other}'"))),
            };
            acc = acc.mul(&factor)?;
        }
        Ok(acc)
    }

    /// Parses sums of Pauli strings such as `"Z1"`, `"X2Y3"`, `"0.5*Z1 + Z1Z2"` or `"-Z2"`.
    pub fn parse_pauli_sum(text: &str, qubits: usize) -> Result<Self> {
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::Config("empty observable".into()));
        }
        let mut total = Self::zero(2 * qubits)?;
        let mut pieces = Vec::new();
        let mut start = 0;
        for (i, ch) in cleaned.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 && !matches!(cleaned.as_bytes()[i - 1], b'e' | b'E' | b'*') {
                pieces.push(&cleaned[start..i]);
                start = i;
            }
        }
        pieces.push(&cleaned[start..]);
        for piece in pieces {
            let (sign, body) = match piece.strip_prefix('-') {
                Some(rest) => (-1.0, rest),
                None => (1.0, piece.strip_prefix('+').unwrap_or(piece)),
            };
            let (coef, word) = match body.split_once('*') {
                Some((c, w)) => {
                    (c.parse::<f64>().map_err(|_| Error::Config(format!("bad coefficient '{c}' in '{text}'")))?, w)
                }
                None => (1.0, body),
            };
            let ops = parse_pauli_word(word)
                .ok_or_else(|| Error::Config(format!("cannot parse Pauli string '{word}' in '{text}'")))?;
            let term = Self::pauli(qubits, &ops)?.scale(Complex64::new(sign * coef, 0.0));
            total = total.add(&term)?;
        }
        Ok(total)
    }
}

fn parse_pauli_word(word: &str) -> Option<Vec<(usize, char)>> {
    let bytes = word.as_bytes();
    let mut ops = Vec::new();
    let mut i = 0;
    if word.eq_ignore_ascii_case("I") {
        return Some(ops);
    }
    while i < bytes.len() {
        let op = bytes[i] as char;
        if !matches!(op.to_ascii_uppercase(), 'X' | 'Y' | 'Z') {
            return None;
        }
        i += 1;
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let q: usize = word[start..i].parse().ok()?;
        ops.push((q, op));
    }
    if ops.is_empty() {
        None
    } else {
        Some(ops)
    }
}

impl fmt::Display for MajoranaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (mask, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i)", c.re, c.im)?;
            for m in mask_modes(mask) {
                write!(f, " c{}", m + 1)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anticommuting_signs() {
        // c1 c2 = -c2 c1
        let a = MajoranaPolynomial::monomial(4, ONE, &[1, 2]).unwrap();
        let b = MajoranaPolynomial::monomial(4, ONE, &[2, 1]).unwrap();
        assert_eq!(a.coefficient(0b11), -b.coefficient(0b11));
        // c_j^2 = 1
        let c = MajoranaPolynomial::monomial(4, ONE, &[3]).unwrap();
        assert_eq!(c.mul(&c).unwrap(), MajoranaPolynomial::identity(4).unwrap());
    }

    #[test]
    fn z_is_minus_i_c1_c2() {
        let z = MajoranaPolynomial::pauli(1, &[(1, 'Z')]).unwrap();
        assert_eq!(z.coefficient(0b11), -I);
        assert!(z.is_hermitian(0.0));
    }

    #[test]
    fn parity_is_product_of_z() {
        let p = MajoranaPolynomial::parity(6).unwrap();
        let zs = MajoranaPolynomial::pauli(3, &[(1, 'Z'), (2, 'Z'), (3, 'Z')]).unwrap();
        assert_eq!(p, zs);
        assert_eq!(p.mul(&p).unwrap(), MajoranaPolynomial::identity(6).unwrap());
    }

    #[test]
    fn paulis_square_to_identity_and_anticommute() {
        let x = MajoranaPolynomial::pauli(3, &[(2, 'X')]).unwrap();
        let y = MajoranaPolynomial::pauli(3, &[(2, 'Y')]).unwrap();
        let z = MajoranaPolynomial::pauli(3, &[(2, 'Z')]).unwrap();
        let id = MajoranaPolynomial::identity(6).unwrap();
        for p in [&x, &y, &z] {
            assert_eq!(p.mul(p).unwrap(), id);
            assert!(p.is_hermitian(1e-15));
        }
        // X Y = i Z
        assert_eq!(x.mul(&y).unwrap(), z.scale(I));
    }

    #[test]
    fn parser() {
        let a = MajoranaPolynomial::parse_pauli_sum("X2Y3", 3).unwrap();
        let b = MajoranaPolynomial::pauli(3, &[(2, 'X'), (3, 'Y')]).unwrap();
        assert_eq!(a, b);
        let s = MajoranaPolynomial::parse_pauli_sum("0.5*Z1 - Z1Z2", 2).unwrap();
        assert!((s.coefficient(0b0011) - (-I * 0.5)).norm() < 1e-15);
        assert!(MajoranaPolynomial::parse_pauli_sum("Q1", 2).is_err());
        assert!(MajoranaPolynomial::parse_pauli_sum("Z3", 2).is_err());
    }

    #[test]
    fn quadratic_hamiltonian_is_hermitian() {
        let h = nalgebra::DMatrix::from_fn(4, 4, |i, j| (i as f64 - j as f64) * 0.3 + if i < j { 0.1 } else { -0.1 });
        let h = &h - h.transpose();
        assert!(MajoranaPolynomial::quadratic_hamiltonian(&h).unwrap().is_hermitian(1e-14));
    }

    #[test]
    fn trace_of_product() {
        let z = MajoranaPolynomial::parse_pauli_sum("Z1 + 2*X1X2", 2).unwrap();
        let direct = z.mul(&z).unwrap().normalized_trace();
        let fast = z.normalized_trace_of_product(&z).unwrap();
        assert!((direct - fast).norm() < 1e-14);
        assert!((direct - Complex64::new(5.0, 0.0)).norm() < 1e-14);
    }
}
