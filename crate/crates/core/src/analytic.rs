//! Closed-form moments, variances and lower bounds for Dirichlet-weighted LCUs of
//! Haar random unitaries.
//!
//! Dirichlet factors are exact rationals; floating point enters only through the
//! group moments and trace data.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::majorana::{full_mask, monomial_product_sign, MajoranaPolynomial};

pub type Rational = Ratio<i128>;

fn r(n: i128) -> Rational {
    Rational::from_integer(n)
}

fn to_f64(q: Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn binomial_exact(n: u64, s: u64) -> i128 {
    let s = s.min(n - s.min(n));
    (0..s).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

/// `n choose s` in floating point; exact for results below 2^53.
pub fn binomial(n: u64, s: u64) -> f64 {
    if s > n {
        return 0.0;
    }
    let s = s.min(n - s);
    (0..s).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `E[c_i^s] = 1 / C(k+s-1, s)` for uniform Dirichlet weights.
pub fn dirichlet_moment(k: u64, s: u64) -> Result<Rational> {
    if k == 0 {
        return Err(Error::Domain("Dirichlet rank must be at least 1".into()));
    }
    Ok(Rational::new(1, binomial_exact(k + s - 1, s)))
}

/// Mixed second and fourth order moments of two distinct weights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirichletCrossMoments {
    pub e_ci_cj: Rational,
    pub e_ci2_cj2: Rational,
    pub cov_ci_cj: Rational,
    pub cov_ci2_cj2: Rational,
}

pub fn dirichlet_cross_moments(k: u64) -> Result<DirichletCrossMoments> {
    if k < 2 {
        return Err(Error::Domain("cross moments need k >= 2".into()));
    }
    let k = k as i128;
    let e_ci_cj = Rational::new(1, k * (k + 1));
    let e_ci2_cj2 = Rational::new(4, k * (k + 1) * (k + 2) * (k + 3));
    let e_c = Rational::new(1, k);
    let e_c2 = Rational::new(2, k * (k + 1));
    Ok(DirichletCrossMoments {
        e_ci_cj,
        e_ci2_cj2,
        cov_ci_cj: e_ci_cj - e_c * e_c,
        cov_ci2_cj2: e_ci2_cj2 - e_c2 * e_c2,
    })
}

/// Which closed form produced a prediction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Formula {
    GeneralDirichletHaar,
    HomogeneousDirichletHaar,
    FreeFermionQuadratic,
    FreeFermionQuadraticAlternate,
    FreeFermionGeneralPrinted,
    FreeFermionGeneralDirect,
    ExpressivePrinted,
    ExpressiveConsistent,
    Incoherent,
}

impl Formula {
    pub fn label(self) -> &'static str {
        match self {
            Formula::GeneralDirichletHaar => "dirichlet-haar-general",
            Formula::HomogeneousDirichletHaar => "dirichlet-haar-homogeneous",
            Formula::FreeFermionQuadratic => "free-fermion-quadratic",
            Formula::FreeFermionQuadraticAlternate => "free-fermion-quadratic-2^(N-2)",
            Formula::FreeFermionGeneralPrinted => "free-fermion-general-printed",
            Formula::FreeFermionGeneralDirect => "free-fermion-general-direct",
            Formula::ExpressivePrinted => "expressive-printed",
            Formula::ExpressiveConsistent => "expressive-consistent",
            Formula::Incoherent => "incoherent-dirichlet-haar",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VariancePrediction {
    pub value: f64,
    pub formula: Formula,
}

/// Per-branch Haar moments of `m_i` and cross magnitudes `E|m_ij|²`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSet {
    em: Vec<f64>,
    em2: Vec<f64>,
    ecross: DMatrix<f64>,
}

impl MomentSet {
    pub const TOL: f64 = 1e-12;

    pub fn new(em: Vec<f64>, em2: Vec<f64>, ecross: DMatrix<f64>) -> Result<Self> {
        let k = em.len();
        if k == 0 || em2.len() != k || ecross.nrows() != k || ecross.ncols() != k {
            return Err(Error::Domain("moment lists must all have length k >= 1".into()));
        }
        for (i, (&m, &m2)) in em.iter().zip(&em2).enumerate() {
            if m2 < m * m - Self::TOL * (1.0 + m2.abs()) {
                return Err(Error::Contract(format!("E[m_{i}²] = {m2} is below E[m_{i}]² = {}", m * m)));
            }
        }
        for i in 0..k {
            for j in 0..k {
                if i != j && (ecross[(i, j)] < -Self::TOL || (ecross[(i, j)] - ecross[(j, i)]).abs() > Self::TOL) {
                    return Err(Error::Contract("cross magnitudes must be symmetric and nonnegative".into()));
                }
            }
        }
        Ok(Self { em, em2, ecross })
    }

    pub fn homogeneous(k: usize, em: f64, em2: f64, ecross: f64) -> Result<Self> {
        Self::new(vec![em; k], vec![em2; k], DMatrix::from_element(k, k, ecross))
    }

    pub fn k(&self) -> usize {
        self.em.len()
    }

    pub fn em(&self) -> &[f64] {
        &self.em
    }

    pub fn em2(&self) -> &[f64] {
        &self.em2
    }

    pub fn ecross(&self) -> &DMatrix<f64> {
        &self.ecross
    }
}

pub fn lcu_variance_general(ms: &MomentSet) -> VariancePrediction {
    let k = ms.k();
    let ki = k as i128;
    let quartic = to_f64(Rational::new(24, ki * (ki + 1) * (ki + 2) * (ki + 3)));
    let mixed = to_f64(Rational::new(4, ki * (ki + 1) * (ki + 2) * (ki + 3)));
    let mean = to_f64(Rational::new(4, ki * ki * (ki + 1) * (ki + 1)));
    let mut value = 0.0;
    for i in 0..k {
        value += quartic * ms.em2[i];
        for j in 0..k {
            if i != j {
                value += mixed * (ms.em[i] * ms.em[j] + ms.ecross[(i, j)]);
            }
            value -= mean * ms.em[i] * ms.em[j];
        }
    }
    VariancePrediction { value, formula: Formula::GeneralDirichletHaar }
}

fn homogeneous_factors(k: u64) -> (f64, f64, f64) {
    let k = k as i128;
    let cube = (k + 1) * (k + 2) * (k + 3);
    (
        to_f64(Rational::new(24, cube)),
        to_f64(Rational::new(4 * (k - 1), cube)),
        to_f64(Rational::new(4, (k + 1) * (k + 1))),
    )
}

pub fn lcu_variance_homogeneous(em: f64, em2: f64, ecross: f64, k: u64) -> Result<VariancePrediction> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    if em2 < em * em - MomentSet::TOL * (1.0 + em2.abs()) {
        return Err(Error::Contract(format!("E[m²] = {em2} is below E[m]² = {}", em * em)));
    }
    let (a, b, c) = homogeneous_factors(k);
    Ok(VariancePrediction {
        value: a * em2 + b * (em * em + ecross) - c * em * em,
        formula: Formula::HomogeneousDirichletHaar,
    })
}

/// Lower bound for zero-mean branches: the weighted sum and the `min/k^p` fallback.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowerBound {
    pub weighted: f64,
    pub fallback: f64,
}

impl LowerBound {
    pub fn certified(&self) -> f64 {
        self.weighted.max(self.fallback)
    }
}

fn check_variances(vars: &[f64], weights: &[f64]) -> Result<()> {
    if vars.is_empty() || vars.len() != weights.len() {
        return Err(Error::Domain("variance and weight lists must have equal nonzero length".into()));
    }
    if vars.iter().any(|&v| v < 0.0) {
        return Err(Error::Domain("branch variances must be nonnegative".into()));
    }
    Ok(())
}

/// Coherent LCU bound from `E[c_j²]` weights.
pub fn worst_case_lower_bound(vars: &[f64], ec2: &[f64]) -> Result<LowerBound> {
    check_variances(vars, ec2)?;
    let k = vars.len() as f64;
    let min = vars.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(LowerBound { weighted: ec2.iter().zip(vars).map(|(c, v)| c * c * v).sum(), fallback: min / (k * k * k) })
}

/// `(-1)^⌊κ/2⌋ Σ_{|b|=κ} a_b²`.
pub fn p_functional(p: &MajoranaPolynomial, kappa: u32) -> f64 {
    let sign = if (kappa / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let s: Complex64 = p.terms().filter(|(m, _)| m.count_ones() == kappa).map(|(_, a)| a * a).sum();
    sign * s.re
}

/// `Re Σ_{|b|=κ} conj(a_b) a_{b̄} η_{b̄}` with `c^{b̄} P = η_{b̄} c^b`: the
/// overlap between `O` and `OP` on complementary masks.
pub fn c_functional(p: &MajoranaPolynomial, kappa: u32) -> f64 {
    let modes = p.modes();
    let full = full_mask(modes);
    let parity_phase = Complex64::new(0.0, -1.0).powu((modes / 2) as u32);
    let s: Complex64 = p
        .terms()
        .filter(|(m, _)| m.count_ones() == kappa)
        .map(|(b, a)| {
            let comp = full ^ b;
            a.conj() * p.coefficient(comp) * parity_phase * monomial_product_sign(comp, full)
        })
        .sum();
    s.re
}

/// First and second SO(2N) Haar moments of `tr(U ρ0 U† O)` for the vacuum `ρ0`.
pub fn so_moments(p: &MajoranaPolynomial) -> Result<(f64, f64)> {
    let n = p.qubits() as u64;
    let parity = MajoranaPolynomial::parity(p.modes())?;
    let em = (p.normalized_trace() + p.mul(&parity)?.normalized_trace()).re;
    let mut em2 = 0.0;
    for kp in 0..=n {
        let kappa = 2 * kp as u32;
        let weight = binomial(n, kp) / binomial(2 * n, 2 * kp);
        em2 += weight * (p_functional(p, kappa) + c_functional(p, kappa));
    }
    Ok((em, em2))
}

/// Traces entering the SO(2N) moments, all unnormalised.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceData {
    pub qubits: usize,
    pub rho: f64,
    pub rho_p: f64,
    pub rho_sq: f64,
    pub rho_sq_p: f64,
    pub rho_p_rho_p: f64,
    pub o: f64,
    pub o_p: f64,
    pub o_sq: f64,
    pub o_sq_p: f64,
    pub o_p_o_p: f64,
}

impl TraceData {
    /// Trace data for the vacuum initial state, with observable traces computed
    /// in the Majorana algebra.
    pub fn vacuum(p: &MajoranaPolynomial) -> Result<Self> {
        let d = 2f64.powi(p.qubits() as i32);
        let parity = MajoranaPolynomial::parity(p.modes())?;
        let op = p.mul(&parity)?;
        let o_sq = p.mul(p)?;
        let tr = |x: &MajoranaPolynomial| x.normalized_trace().re * d;
        Ok(Self {
            qubits: p.qubits(),
            rho: 1.0,
            rho_p: 1.0,
            rho_sq: 1.0,
            rho_sq_p: 1.0,
            rho_p_rho_p: 1.0,
            o: tr(p),
            o_p: tr(&op),
            o_sq: tr(&o_sq),
            o_sq_p: tr(&o_sq.mul(&parity)?),
            o_p_o_p: tr(&op.mul(&op)?),
        })
    }
}

/// `E|m_ij|²` over independent SO(2N) Haar branches.
pub fn ff_cross_term(t: &TraceData) -> f64 {
    let d2 = 4f64.powi(t.qubits as i32);
    (t.rho_sq * t.o_sq + 2.0 * t.rho_sq_p * t.o_sq_p + t.rho_p_rho_p * t.o_p_o_p) / d2
}

fn ff_quadratic(n: u64, k: u64, tr_o2_over_d: f64, cross_power: i32, formula: Formula) -> Result<VariancePrediction> {
    if n == 0 || k == 0 {
        return Err(Error::Domain("N and k must be at least 1".into()));
    }
    let ki = k as i128;
    let cube = (ki + 1) * (ki + 2) * (ki + 3);
    let diag = to_f64(Rational::new(24, cube * (2 * n as i128 - 1)));
    let cross = to_f64(Rational::new(4 * (ki - 1), cube)) / 2f64.powi(cross_power);
    Ok(VariancePrediction { value: tr_o2_over_d * (diag + cross), formula })
}

/// Variance for a quadratic observable and the vacuum, with the `2^(N-1)`
/// cross-term denominator.
pub fn ff_lcu_variance(n: u64, k: u64, tr_o2_over_d: f64) -> Result<VariancePrediction> {
    ff_quadratic(n, k, tr_o2_over_d, n as i32 - 1, Formula::FreeFermionQuadratic)
}

/// Same expression with a `2^(N-2)` cross-term denominator.
pub fn ff_lcu_variance_alternate(n: u64, k: u64, tr_o2_over_d: f64) -> Result<VariancePrediction> {
    ff_quadratic(n, k, tr_o2_over_d, n as i32 - 2, Formula::FreeFermionQuadraticAlternate)
}

/// The printed three-term assembly and the direct homogeneous assembly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneralFfVariance {
    pub printed: VariancePrediction,
    pub direct: VariancePrediction,
    pub em: f64,
    pub em2: f64,
    pub ecross: f64,
}

pub fn general_ff_variance(p: &MajoranaPolynomial, t: &TraceData, k: u64) -> Result<GeneralFfVariance> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    if t.qubits != p.qubits() {
        return Err(Error::Domain("trace data and observable disagree on N".into()));
    }
    let (_, em2) = so_moments(p)?;
    let d = 2f64.powi(t.qubits as i32);
    let em = (t.rho * t.o + t.rho_p * t.o_p) / d;
    let ecross = ff_cross_term(t);
    let ki = k as i128;
    let (a, b, _) = homogeneous_factors(k);
    let third = to_f64(Rational::new(4 * (5 * ki - 7), (ki + 1) * (ki + 1) * (ki + 2) * (ki + 3)));
    let printed = VariancePrediction {
        value: a * em2 + b * ecross - third * em * em,
        formula: Formula::FreeFermionGeneralPrinted,
    };
    let mut direct = lcu_variance_homogeneous(em, em2, ecross, k)?;
    direct.formula = Formula::FreeFermionGeneralDirect;
    Ok(GeneralFfVariance { printed, direct, em, em2, ecross })
}

/// `E|m_ij|²` over independent Haar unitaries on dimension `d`.
pub fn su_cross_term(tr_o2: f64, tr_rho_sq: f64, d: f64) -> Result<f64> {
    if d < 2.0 {
        return Err(Error::Domain("dimension must be at least 2".into()));
    }
    Ok(tr_rho_sq * tr_o2 / (d * d))
}

/// Haar mean of `m_i` and its centred second moment (the variance of `m_i`).
pub fn su_moments(tr_o: f64, tr_o2: f64, tr_rho_sq: f64, n: u32) -> Result<(f64, f64)> {
    if !(tr_rho_sq > 0.0 && tr_rho_sq <= 1.0 + 1e-12) {
        return Err(Error::Domain(format!("tr(ρ²) = {tr_rho_sq} outside (0, 1]")));
    }
    let d = 2f64.powi(n as i32);
    let var = (tr_o2 - tr_o * tr_o / d) * (tr_rho_sq - 1.0 / d) / (d * d - 1.0);
    Ok((tr_o / d, var))
}

/// How to treat an observable with nonzero trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NonTracelessPolicy {
    Reject,
    Printed,
    Consistent,
}

pub fn expressive_variance(
    tr_o: f64,
    tr_o2: f64,
    tr_rho_sq: f64,
    n: u32,
    k: u64,
    policy: NonTracelessPolicy,
) -> Result<VariancePrediction> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let d = 2f64.powi(n as i32);
    let traceless = tr_o.abs() <= 1e-12 * tr_o2.abs().sqrt().max(1.0) * d;
    if !traceless && policy == NonTracelessPolicy::Reject {
        return Err(Error::Domain(format!("observable has trace {tr_o}; choose a non-traceless policy explicitly")));
    }
    let (em, centred) = su_moments(tr_o, tr_o2, tr_rho_sq, n)?;
    let ecross = su_cross_term(tr_o2, tr_rho_sq, d)?;
    if policy == NonTracelessPolicy::Consistent {
        let mut v = lcu_variance_homogeneous(em, centred + em * em, ecross, k)?;
        v.formula = Formula::ExpressiveConsistent;
        return Ok(v);
    }
    let (a, b, _) = homogeneous_factors(k);
    let value = a * centred + b * (tr_o2 / d * tr_rho_sq + tr_o * tr_o) / d - tr_o * tr_o / d;
    Ok(VariancePrediction { value, formula: Formula::ExpressivePrinted })
}

/// Variance of `Σ_i c_i m_i` with uniform Dirichlet weights.
pub fn incoherent_variance(em: &[f64], em2: &[f64]) -> Result<VariancePrediction> {
    let k = em.len();
    if k == 0 || em2.len() != k {
        return Err(Error::Domain("moment lists must have equal nonzero length".into()));
    }
    let ki = k as i128;
    let sq = to_f64(Rational::new(2, ki * (ki + 1)));
    let mean = to_f64(Rational::new(1, ki * ki));
    let cov = to_f64(Rational::new(1, ki * ki * (ki + 1)));
    let mut value = 0.0;
    for i in 0..k {
        value += sq * em2[i] - mean * em[i] * em[i];
        for j in 0..k {
            if i != j {
                value -= cov * em[i] * em[j];
            }
        }
    }
    Ok(VariancePrediction { value, formula: Formula::Incoherent })
}

/// Incoherent bound from `E[c_j]` weights with the `min/k` fallback.
pub fn incoherent_bound(vars: &[f64], ec: &[f64]) -> Result<LowerBound> {
    check_variances(vars, ec)?;
    let k = vars.len() as f64;
    let min = vars.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(LowerBound { weighted: ec.iter().zip(vars).map(|(c, v)| c * c * v).sum(), fallback: min / k })
}

/// `E[c_j²]` for uniform Dirichlet weights, as a float.
pub fn dirichlet_second_moment(k: u64) -> f64 {
    to_f64(dirichlet_moment(k, 2).unwrap_or_else(|_| r(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{expectation_polynomial, gaussian_unitary_from_rotation, DenseState};
    use crate::sampling::{sample_haar_special_orthogonal, SeededRng};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    // Beta(1, k-1) marginal integrated with composite Simpson's rule.
    fn marginal_moment(k: u64, s: i32) -> f64 {
        if k == 1 {
            return 1.0;
        }
        let n = 20000;
        let h = 1.0 / n as f64;
        let f = |x: f64| x.powi(s) * (k - 1) as f64 * (1.0 - x).powi(k as i32 - 2);
        let mut acc = f(0.0) + f(1.0);
        for i in 1..n {
            acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * h / 3.0
    }

    // Two-weight marginal density (k-1)(k-2)(1-x-y)^(k-3) on the triangle.
    fn pair_moment(k: u64, s: i32, t: i32) -> f64 {
        let n = 600;
        let h = 1.0 / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let x = (i as f64 + 0.5) * h;
            let inner = 1.0 - x;
            let m = 600;
            let hy = inner / m as f64;
            for j in 0..m {
                let y = (j as f64 + 0.5) * hy;
                acc += x.powi(s) * y.powi(t) * ((k - 1) * (k - 2)) as f64 * (1.0 - x - y).powi(k as i32 - 3) * hy * h;
            }
        }
        acc
    }

    #[test]
    fn dirichlet_moment_examples() {
        assert_eq!(dirichlet_moment(1, 4).unwrap(), r(1));
        assert_eq!(dirichlet_moment(2, 2).unwrap(), Rational::new(1, 3));
        assert_eq!(dirichlet_moment(4, 4).unwrap(), Rational::new(1, 35));
        assert_eq!(dirichlet_moment(7, 0).unwrap(), r(1));
    }

    #[test]
    fn dirichlet_moments_match_quadrature() {
        for k in 1..=6 {
            for s in 0..=4 {
                let exact = to_f64(dirichlet_moment(k, s as u64).unwrap());
                assert!(close(exact, marginal_moment(k, s), 1e-8), "k={k} s={s}");
            }
        }
    }

    #[test]
    fn cross_moments() {
        let c = dirichlet_cross_moments(2).unwrap();
        assert_eq!(c.e_ci_cj, Rational::new(1, 6));
        assert_eq!(c.cov_ci_cj, Rational::new(-1, 12));
        for k in 2..=40 {
            let c = dirichlet_cross_moments(k).unwrap();
            let ki = k as i128;
            assert_eq!(c.cov_ci_cj, Rational::new(-1, ki * ki * (ki + 1)));
            assert_eq!(
                c.cov_ci2_cj2,
                Rational::new(-8 * (2 * ki + 3), ki * ki * (ki + 1) * (ki + 1) * (ki + 2) * (ki + 3))
            );
            assert!(c.cov_ci_cj < r(0) && c.cov_ci2_cj2 < r(0));
        }
        assert!(dirichlet_cross_moments(1).is_err());
        for k in 3..=5 {
            let c = dirichlet_cross_moments(k).unwrap();
            assert!(close(to_f64(c.e_ci_cj), pair_moment(k, 1, 1), 1e-4));
            assert!(close(to_f64(c.e_ci2_cj2), pair_moment(k, 2, 2), 1e-4));
        }
    }

    // E[m²] - E[m]² assembled from the four-index expansion of m = Σ c_i c_j m_ij.
    fn four_index_oracle(ms: &MomentSet) -> f64 {
        let k = ms.k() as u64;
        let e4 = marginal_moment(k, 4);
        let e2 = marginal_moment(k, 2);
        let e22 = if k >= 2 { to_f64(dirichlet_cross_moments(k).unwrap().e_ci2_cj2) } else { 0.0 };
        let k = k as usize;
        let mut second = 0.0;
        let mut first = 0.0;
        for i in 0..k {
            second += e4 * ms.em2()[i];
            first += e2 * ms.em()[i];
            for j in 0..k {
                if i != j {
                    second += e22 * (ms.em()[i] * ms.em()[j] + ms.ecross()[(i, j)]);
                }
            }
        }
        second - first * first
    }

    #[test]
    fn general_variance_matches_four_index_expansion() {
        let ms = MomentSet::new(
            vec![0.3, -0.1, 0.5],
            vec![0.4, 0.2, 0.9],
            DMatrix::from_row_slice(3, 3, &[0.0, 0.1, 0.2, 0.1, 0.0, 0.05, 0.2, 0.05, 0.0]),
        )
        .unwrap();
        assert!(close(lcu_variance_general(&ms).value, four_index_oracle(&ms), 1e-7));
    }

    #[test]
    fn single_branch_reduces_to_branch_variance() {
        let v = lcu_variance_homogeneous(0.3, 0.5, 0.0, 1).unwrap().value;
        assert!(close(v, 0.5 - 0.09, 1e-14));
        let ms = MomentSet::homogeneous(1, 0.3, 0.5, 0.0).unwrap();
        assert!(close(lcu_variance_general(&ms).value, 0.41, 1e-14));
        assert!(close(incoherent_variance(&[0.3], &[0.5]).unwrap().value, 0.41, 1e-14));
    }

    #[test]
    fn homogeneous_agrees_with_general() {
        for k in 1..=8 {
            let h = lcu_variance_homogeneous(0.2, 0.7, 0.15, k).unwrap().value;
            let g = lcu_variance_general(&MomentSet::homogeneous(k as usize, 0.2, 0.7, 0.15).unwrap()).value;
            assert!(close(h, g, 1e-12));
        }
    }

    #[test]
    fn quadratic_free_fermion_examples() {
        assert!(close(ff_lcu_variance(4, 1, 1.0).unwrap().value, 1.0 / 7.0, 1e-15));
        assert!(close(ff_lcu_variance(2, 2, 1.0).unwrap().value, 1.0 / 6.0, 1e-15));
        let z1 = MajoranaPolynomial::parse_pauli_sum("Z1", 2).unwrap();
        let (em, em2) = so_moments(&z1).unwrap();
        let ec = ff_cross_term(&TraceData::vacuum(&z1).unwrap());
        assert_eq!(em, 0.0);
        assert!(close(ec, 0.5, 1e-15));
        assert!(close(lcu_variance_homogeneous(em, em2, ec, 2).unwrap().value, 1.0 / 6.0, 1e-14));
    }

    #[test]
    fn so_moments_for_quadratic_observables() {
        // for N = 1, Z_1 is the parity itself and is not traceless against P
        for n in 2..=8 {
            let z1 = MajoranaPolynomial::parse_pauli_sum("Z1", n).unwrap();
            let (em, em2) = so_moments(&z1).unwrap();
            assert_eq!(em, 0.0);
            assert!(close(em2, 1.0 / (2 * n - 1) as f64, 1e-14));
            assert_eq!(p_functional(&z1, 2), 1.0);
            assert_eq!(p_functional(&z1, 4), 0.0);
            assert_eq!(c_functional(&z1, 2), 0.0);
            let t = TraceData::vacuum(&z1).unwrap();
            assert!(close(ff_cross_term(&t), t.o_sq / 2f64.powi(2 * n as i32 - 1), 1e-14));
        }
    }

    #[test]
    fn so_moments_with_parity_components() {
        let one_plus_z = MajoranaPolynomial::parse_pauli_sum("1*I + Z1", 1).unwrap();
        assert_eq!(so_moments(&one_plus_z).unwrap(), (2.0, 4.0));
        let sum = MajoranaPolynomial::parse_pauli_sum("Z1 + Z2", 2).unwrap();
        assert!(close(so_moments(&sum).unwrap().1, 4.0 / 3.0, 1e-14));
        let diff = MajoranaPolynomial::parse_pauli_sum("Z1 - Z2", 2).unwrap();
        assert!(so_moments(&diff).unwrap().1.abs() < 1e-14);
        let o = MajoranaPolynomial::parse_pauli_sum("Z1 + Z1Z2Z3", 3).unwrap();
        let (em, em2) = so_moments(&o).unwrap();
        assert!(close(em, 1.0, 1e-14) && close(em2, 1.2, 1e-14));
        assert!(close(ff_cross_term(&TraceData::vacuum(&o).unwrap()), 0.5, 1e-14));
    }

    // E[m] and E[m²] over Haar SO(2N) (with the spin sign, irrelevant here) by
    // brute-force averaging on the dense oracle.
    fn monte_carlo_so(o: &MajoranaPolynomial, trials: u64, seed: u64) -> (f64, f64, f64) {
        let n = o.qubits();
        let (mut s1, mut s2, mut s4) = (0.0, 0.0, 0.0);
        for t in 0..trials {
            let mut rng = SeededRng::new(seed, t);
            let r = sample_haar_special_orthogonal(2 * n, &mut rng).unwrap();
            let psi = DenseState::vacuum(n).unwrap().apply(&gaussian_unitary_from_rotation(&r).unwrap()).unwrap();
            let m = expectation_polynomial(&psi, o).unwrap();
            s1 += m;
            s2 += m * m;
            s4 += m.powi(4);
        }
        let t = trials as f64;
        (s1 / t, s2 / t, ((s4 / t - (s2 / t).powi(2)) / t).sqrt())
    }

    #[test]
    fn so_second_moment_matches_monte_carlo() {
        for text in ["Z1 + 0.5*X1X2", "X1X2X3Y4 + Z2", "Z1 + Z1Z2Z3"] {
            let n = if text.contains('4') { 4 } else { 3 };
            let o = MajoranaPolynomial::parse_pauli_sum(text, n).unwrap();
            let (_, em2) = so_moments(&o).unwrap();
            let (_, mc2, se) = monte_carlo_so(&o, 2000, 17);
            assert!((mc2 - em2).abs() < 5.0 * se, "{text}: {mc2} vs {em2} (se {se})");
        }
    }

    #[test]
    fn general_ff_paths() {
        let z1 = MajoranaPolynomial::parse_pauli_sum("Z1", 3).unwrap();
        let t = TraceData::vacuum(&z1).unwrap();
        for k in 1..=6 {
            let g = general_ff_variance(&z1, &t, k).unwrap();
            assert!(close(g.printed.value, g.direct.value, 1e-14));
            assert!(close(g.direct.value, ff_lcu_variance(3, k, 1.0).unwrap().value, 1e-13));
        }
        let o = MajoranaPolynomial::parse_pauli_sum("Z1 + Z1Z2Z3", 3).unwrap();
        let t = TraceData::vacuum(&o).unwrap();
        let g1 = general_ff_variance(&o, &t, 1).unwrap();
        assert!(close(g1.direct.value, 0.2, 1e-13));
        let g2 = general_ff_variance(&o, &t, 2).unwrap();
        assert!(close(g2.direct.value, 0.1355555555555, 1e-10));
        assert!((g2.printed.value - g2.direct.value).abs() > 0.3);
    }

    #[test]
    fn su_examples() {
        assert!(close(su_cross_term(4.0, 1.0, 4.0).unwrap(), 0.25, 1e-15));
        assert!(close(su_cross_term(4.0, 0.25, 4.0).unwrap(), 4.0 / 64.0, 1e-15));
        let (em, var) = su_moments(0.0, 4.0, 1.0, 2).unwrap();
        assert_eq!(em, 0.0);
        assert!(close(var, 0.2, 1e-15));
        let (em, var) = su_moments(4.0, 4.0, 1.0, 2).unwrap();
        assert_eq!((em, var), (1.0, 0.0));
        let v1 = expressive_variance(0.0, 4.0, 1.0, 2, 1, NonTracelessPolicy::Reject).unwrap();
        assert!(close(v1.value, 0.2, 1e-15));
        let v2 = expressive_variance(0.0, 4.0, 1.0, 2, 2, NonTracelessPolicy::Reject).unwrap();
        assert!(close(v2.value, 0.08 + 1.0 / 60.0, 1e-14));
        assert!(expressive_variance(4.0, 4.0, 1.0, 2, 2, NonTracelessPolicy::Reject).is_err());
        // O = I measures the squared LCU norm, which still fluctuates
        let consistent = expressive_variance(4.0, 4.0, 1.0, 2, 3, NonTracelessPolicy::Consistent).unwrap();
        let direct = lcu_variance_homogeneous(1.0, 1.0, 0.25, 3).unwrap();
        assert!(close(consistent.value, direct.value, 1e-14));
    }

    #[test]
    fn incoherent_examples() {
        let v = incoherent_variance(&[0.5; 3], &[0.75; 3]).unwrap().value;
        assert!(close(v, 0.5 * 0.5, 1e-14));
        for k in 1..=10u64 {
            let vars = vec![0.3; k as usize];
            let b = incoherent_bound(&vars, &vec![1.0 / k as f64; k as usize]).unwrap();
            let v = incoherent_variance(&vec![0.0; k as usize], &vars).unwrap().value;
            assert!(v >= b.certified() - 1e-15);
        }
    }

    #[test]
    fn worst_case_bound_examples() {
        let b = worst_case_lower_bound(&[0.4], &[1.0]).unwrap();
        assert!(close(b.certified(), 0.4, 1e-15));
        for k in 1..=12u64 {
            let ec2 = dirichlet_second_moment(k);
            let b = worst_case_lower_bound(&vec![0.7; k as usize], &vec![ec2; k as usize]).unwrap();
            let kf = k as f64;
            assert!(close(b.weighted, 4.0 * 0.7 / (kf * (kf + 1.0).powi(2)), 1e-13));
            assert!(b.weighted >= b.fallback);
            let exact = lcu_variance_homogeneous(0.0, 0.7, 0.0, k).unwrap().value;
            assert!(exact >= b.certified() - 1e-15);
        }
    }
}
