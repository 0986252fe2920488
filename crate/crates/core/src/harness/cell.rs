//! One `(N, k)` grid point: trial generation and the matching closed form.

use num_complex::Complex64;

use crate::analytic::{
    dirichlet_second_moment, expressive_variance, ff_lcu_variance, general_ff_variance, incoherent_bound,
    incoherent_variance, so_moments, su_moments, worst_case_lower_bound, NonTracelessPolicy, TraceData,
};
use crate::error::{Error, Result};
use crate::fock::{
    apply_gaussian_unitary, expectation, gaussian_unitary_from_rotation, incoherent_expectation, lcu_state,
    polynomial_to_operator, DenseState, Mixture, DEFAULT_DENSE_LIMIT,
};
use crate::gaussian::{lcu_expectation, matrix_element, GaussianState, MAX_OBSERVABLE_TERMS};
use crate::linalg::CMatrix;
use crate::majorana::MajoranaPolynomial;
use crate::sampling::{
    sample_dirichlet_uniform, sample_haar_special_orthogonal, sample_haar_unitary, sample_sign, CoefficientVector,
    MajoranaRotation, SeededRng,
};

use super::config::{Backend, Group, Mode};

/// Agreement required between the two backends on every trial of a `both` run.
pub const BACKEND_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct Cell {
    pub group: Group,
    pub mode: Mode,
    pub backend: Backend,
    pub qubits: usize,
    pub rank: usize,
    pub samples: usize,
    pub master_seed: u64,
    pub observable_text: String,
    observable: MajoranaPolynomial,
    dense_observable: Option<CMatrix>,
}

/// Stream index of a trial; distinct for every `(N, k, trial)`.
pub fn stream_index(qubits: usize, rank: usize, trial: usize) -> u64 {
    ((qubits as u64) << 48) | ((rank as u64) << 32) | trial as u64
}

/// Haar draw for one SO(2N) branch: a rotation and the spin-lift sign.
#[derive(Clone, Debug)]
pub struct SpinBranch {
    pub rotation: MajoranaRotation,
    pub sign: f64,
}

/// Random inputs of one SO(2N) trial.
#[derive(Clone, Debug)]
pub struct SoDraw {
    pub weights: CoefficientVector,
    pub branches: Vec<SpinBranch>,
}

impl SoDraw {
    pub fn sample(qubits: usize, rank: usize, rng: &mut SeededRng) -> Result<Self> {
        let weights = sample_dirichlet_uniform(rank, rng)?;
        let branches = (0..rank)
            .map(|_| {
                let rotation = sample_haar_special_orthogonal(2 * qubits, rng)?;
                Ok(SpinBranch { rotation, sign: sample_sign(rng) })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { weights, branches })
    }

    pub fn gaussian_states(&self, qubits: usize) -> Result<Vec<GaussianState>> {
        let vac = GaussianState::vacuum(qubits)?;
        self.branches
            .iter()
            .map(|b| Ok(vac.apply_rotation(&b.rotation)?.with_global_phase(Complex64::new(b.sign, 0.0))))
            .collect()
    }

    pub fn dense_unitaries(&self) -> Result<Vec<CMatrix>> {
        self.branches
            .iter()
            .map(|b| Ok(gaussian_unitary_from_rotation(&b.rotation)? * Complex64::new(b.sign, 0.0)))
            .collect()
    }
}

impl Cell {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        group: Group,
        mode: Mode,
        backend: Backend,
        qubits: usize,
        rank: usize,
        samples: usize,
        master_seed: u64,
        observable: &str,
    ) -> Result<Self> {
        if qubits == 0 || rank == 0 {
            return Err(Error::Config("qubit counts and ranks must be positive".into()));
        }
        if samples < 2 {
            return Err(Error::Config("samples must be at least 2".into()));
        }
        if rank > u32::MAX as usize || qubits > 32 {
            return Err(Error::Config(format!("N = {qubits} or k = {rank} out of range")));
        }
        if group == Group::Unitary && backend != Backend::Dense {
            return Err(Error::Config("the unitary group requires the dense backend".into()));
        }
        let needs_dense = backend != Backend::Gaussian;
        if needs_dense && qubits > DEFAULT_DENSE_LIMIT {
            return Err(Error::Config(format!("N = {qubits} exceeds the dense limit of {DEFAULT_DENSE_LIMIT}")));
        }
        let poly = MajoranaPolynomial::parse_pauli_sum(observable, qubits)?;
        if !poly.is_hermitian(1e-12) {
            return Err(Error::Config(format!("observable '{observable}' is not Hermitian")));
        }
        if backend != Backend::Dense && poly.len() > MAX_OBSERVABLE_TERMS {
            return Err(Error::Config(format!(
                "observable '{observable}' has {} Majorana monomials; the gaussian backend accepts at most {MAX_OBSERVABLE_TERMS}",
                poly.len()
            )));
        }
        let dense_observable = if needs_dense { Some(polynomial_to_operator(&poly)?) } else { None };
        let cell = Self {
            group,
            mode,
            backend,
            qubits,
            rank,
            samples,
            master_seed,
            observable_text: observable.to_string(),
            observable: poly,
            dense_observable,
        };
        cell.analytic_variance().map_err(|e| match e {
            Error::Domain(msg) => Error::Config(msg),
            other => other,
        })?;
        Ok(cell)
    }

    pub fn observable(&self) -> &MajoranaPolynomial {
        &self.observable
    }

    fn dense_o(&self) -> Result<&CMatrix> {
        self.dense_observable
            .as_ref()
            .ok_or_else(|| Error::Contract("dense observable not prepared for this cell".into()))
    }

    pub fn rng(&self, trial: usize) -> SeededRng {
        SeededRng::new(self.master_seed, stream_index(self.qubits, self.rank, trial))
    }

    /// One Monte Carlo draw of `m` (or of `m̃` in incoherent mode).
    pub fn run_trial(&self, trial: usize) -> Result<f64> {
        let mut rng = self.rng(trial);
        match self.group {
            Group::SpecialOrthogonal => {
                let draw = SoDraw::sample(self.qubits, self.rank, &mut rng)?;
                match self.backend {
                    Backend::Gaussian => self.so_gaussian(&draw),
                    Backend::Dense => self.so_dense(&draw),
                    Backend::Both => {
                        let g = self.so_gaussian(&draw)?;
                        let d = self.so_dense(&draw)?;
                        if (g - d).abs() >= BACKEND_TOL {
                            return Err(Error::Numerical(format!(
                                "backends disagree by {:e} at N={}, k={}, seed={}, trial={trial}",
                                (g - d).abs(),
                                self.qubits,
                                self.rank,
                                self.master_seed
                            )));
                        }
                        Ok(g)
                    }
                }
            }
            Group::Unitary => {
                let weights = sample_dirichlet_uniform(self.rank, &mut rng)?;
                let dim = 1usize << self.qubits;
                let us = (0..self.rank).map(|_| sample_haar_unitary(dim, &mut rng)).collect::<Result<Vec<_>>>()?;
                self.dense_value(&weights, &us)
            }
        }
    }

    fn so_gaussian(&self, draw: &SoDraw) -> Result<f64> {
        let states = draw.gaussian_states(self.qubits)?;
        match self.mode {
            Mode::Coherent => Ok(lcu_expectation(&draw.weights, &states, &self.observable)?.m),
            Mode::Incoherent => {
                let mut total = 0.0;
                for (w, s) in draw.weights.values().iter().zip(&states) {
                    total += w * matrix_element(s, &self.observable, s)?.re;
                }
                Ok(total)
            }
        }
    }

    fn so_dense(&self, draw: &SoDraw) -> Result<f64> {
        let vac = DenseState::vacuum(self.qubits)?;
        let branches = draw
            .branches
            .iter()
            .map(|b| {
                let mut s = apply_gaussian_unitary(&b.rotation, &vac)?;
                if b.sign < 0.0 {
                    s = s.scaled(-1.0);
                }
                Ok(s)
            })
            .collect::<Result<Vec<_>>>()?;
        let o = self.dense_o()?;
        match self.mode {
            Mode::Coherent => {
                let mut acc = branches[0].scaled(0.0);
                for (w, s) in draw.weights.values().iter().zip(&branches) {
                    acc = acc.add(&s.scaled(*w))?;
                }
                expectation(&acc, o)
            }
            Mode::Incoherent => {
                let mut total = 0.0;
                for (w, s) in draw.weights.values().iter().zip(&branches) {
                    total += w * expectation(s, o)?;
                }
                Ok(total)
            }
        }
    }

    fn dense_value(&self, weights: &CoefficientVector, us: &[CMatrix]) -> Result<f64> {
        let vac = DenseState::vacuum(self.qubits)?;
        let o = self.dense_o()?;
        match self.mode {
            Mode::Coherent => expectation(&lcu_state(weights, us, &vac)?, o),
            Mode::Incoherent => {
                let initials = vec![Mixture::pure(vac); us.len()];
                incoherent_expectation(weights, us, &initials, o)
            }
        }
    }

    fn so_branch_moments(&self) -> Result<(f64, f64)> {
        so_moments(&self.observable)
    }

    fn su_traces(&self) -> (f64, f64) {
        let d = 2f64.powi(self.qubits as i32);
        let tr_o = self.observable.normalized_trace().re * d;
        let tr_o2 = self.observable.normalized_trace_of_product(&self.observable).map(|z| z.re * d).unwrap_or(0.0);
        (tr_o, tr_o2)
    }

    /// Closed-form variance matching this cell's group and mode.
    pub fn analytic_variance(&self) -> Result<f64> {
        let (n, k) = (self.qubits as u64, self.rank as u64);
        match (self.group, self.mode) {
            (Group::SpecialOrthogonal, Mode::Coherent) => {
                let quadratic = self.observable.terms().all(|(m, _)| m.count_ones() == 2);
                if quadratic && n >= 2 {
                    let tr_o2_over_d = self.observable.normalized_trace_of_product(&self.observable)?.re;
                    Ok(ff_lcu_variance(n, k, tr_o2_over_d)?.value)
                } else {
                    let t = TraceData::vacuum(&self.observable)?;
                    Ok(general_ff_variance(&self.observable, &t, k)?.direct.value)
                }
            }
            (Group::SpecialOrthogonal, Mode::Incoherent) => {
                let (em, em2) = self.so_branch_moments()?;
                Ok(incoherent_variance(&vec![em; self.rank], &vec![em2; self.rank])?.value)
            }
            (Group::Unitary, Mode::Coherent) => {
                let (tr_o, tr_o2) = self.su_traces();
                Ok(expressive_variance(tr_o, tr_o2, 1.0, n as u32, k, NonTracelessPolicy::Reject)?.value)
            }
            (Group::Unitary, Mode::Incoherent) => {
                let (tr_o, tr_o2) = self.su_traces();
                let (em, var) = su_moments(tr_o, tr_o2, 1.0, n as u32)?;
                Ok(incoherent_variance(&vec![em; self.rank], &vec![var + em * em; self.rank])?.value)
            }
        }
    }

    /// Per-branch variance `Var[m_i]`.
    pub fn branch_variance(&self) -> Result<f64> {
        match self.group {
            Group::SpecialOrthogonal => {
                let (em, em2) = self.so_branch_moments()?;
                Ok(em2 - em * em)
            }
            Group::Unitary => {
                let (tr_o, tr_o2) = self.su_traces();
                Ok(su_moments(tr_o, tr_o2, 1.0, self.qubits as u32)?.1)
            }
        }
    }

    /// Certified worst-case lower bound for this cell's variance.
    pub fn lower_bound(&self) -> Result<f64> {
        let vars = vec![self.branch_variance()?; self.rank];
        let k = self.rank as u64;
        let bound = match self.mode {
            Mode::Coherent => worst_case_lower_bound(&vars, &vec![dirichlet_second_moment(k); self.rank])?,
            Mode::Incoherent => incoherent_bound(&vars, &vec![1.0 / k as f64; self.rank])?,
        };
        Ok(bound.certified())
    }
}
