//! Preset free-fermion replication grid and the two Monte Carlo adjudications of
//! competing closed forms.

use crate::analytic::{ff_lcu_variance, ff_lcu_variance_alternate, general_ff_variance, TraceData};
use crate::error::Result;
use crate::majorana::MajoranaPolynomial;
use crate::stats::{summarize, z_score, VarianceSummary};

use super::cell::Cell;
use super::config::{Backend, Group, Mode};
use super::sweep::{cell_values, run_cells, tolerance, ToleranceSummary, VarianceReport};

#[derive(Clone, Debug, PartialEq)]
pub struct ReplicationConfig {
    pub qubits: Vec<usize>,
    pub ranks: Vec<usize>,
    pub samples: usize,
    pub master_seed: u64,
    pub observable: String,
    /// Cells with `N` up to this run on both backends; larger ones on the Gaussian backend only.
    pub cross_check_up_to: usize,
}

impl Default for ReplicationConfig {
    fn default() -> Self {
        Self {
            qubits: vec![2, 4, 6, 8, 10, 12],
            ranks: vec![1, 2, 4, 8],
            samples: 1000,
            master_seed: 0,
            observable: "Z1".into(),
            cross_check_up_to: 6,
        }
    }
}

impl ReplicationConfig {
    pub fn cells(&self) -> Result<Vec<Cell>> {
        let mut cells = Vec::new();
        for &n in &self.qubits {
            let backend = if n <= self.cross_check_up_to { Backend::Both } else { Backend::Gaussian };
            for &k in &self.ranks {
                cells.push(Cell::new(
                    Group::SpecialOrthogonal,
                    Mode::Coherent,
                    backend,
                    n,
                    k,
                    self.samples,
                    self.master_seed,
                    &self.observable,
                )?);
            }
        }
        Ok(cells)
    }
}

#[derive(Clone, Debug)]
pub struct ReplicationReport {
    pub reports: Vec<VarianceReport>,
    pub tolerance: ToleranceSummary,
}

impl ReplicationReport {
    pub fn passed(&self) -> bool {
        self.tolerance.passed()
    }
}

pub fn replicate_grid(cfg: &ReplicationConfig, threads: Option<usize>) -> Result<ReplicationReport> {
    let reports = run_cells(&cfg.cells()?, threads)?;
    let tolerance = tolerance(&reports);
    Ok(ReplicationReport { reports, tolerance })
}

/// Which of two candidate closed forms the sample supports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    First,
    Second,
    Neither,
    /// The candidates are closer than the separation threshold, or both fit.
    Undecided,
}

/// Monte Carlo comparison of two closed forms for one cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Adjudication {
    pub qubits: usize,
    pub rank: usize,
    pub observable: String,
    pub sample: VarianceSummary,
    pub first: f64,
    pub second: f64,
    pub first_label: &'static str,
    pub second_label: &'static str,
}

impl Adjudication {
    /// Agreement within 3 SE, separation beyond 5 SE.
    pub const AGREE_SE: f64 = 3.0;
    pub const SEPARATE_SE: f64 = 5.0;

    pub fn z_first(&self) -> f64 {
        z_score(self.sample.variance, self.first, self.sample.variance_se)
    }

    pub fn z_second(&self) -> f64 {
        z_score(self.sample.variance, self.second, self.sample.variance_se)
    }

    /// `|first - second|` in units of the sample's standard error.
    pub fn separation_se(&self) -> f64 {
        z_score(self.first, self.second, self.sample.variance_se)
    }

    pub fn verdict(&self) -> Verdict {
        if self.separation_se() <= Self::SEPARATE_SE {
            return Verdict::Undecided;
        }
        match (self.z_first() <= Self::AGREE_SE, self.z_second() <= Self::AGREE_SE) {
            (true, false) => Verdict::First,
            (false, true) => Verdict::Second,
            (true, true) => Verdict::Undecided,
            (false, false) => Verdict::Neither,
        }
    }

    pub fn supported_label(&self) -> &'static str {
        match self.verdict() {
            Verdict::First => self.first_label,
            Verdict::Second => self.second_label,
            Verdict::Neither => "neither",
            Verdict::Undecided => "undecided",
        }
    }
}

fn sample_cell(qubits: usize, rank: usize, samples: usize, seed: u64, observable: &str) -> Result<VarianceSummary> {
    let cell = Cell::new(
        Group::SpecialOrthogonal,
        Mode::Coherent,
        Backend::Gaussian,
        qubits,
        rank,
        samples,
        seed,
        observable,
    )?;
    summarize(&cell_values(&cell)?)
}

/// `2^(N-1)` against `2^(N-2)` in the quadratic-observable cross term.
pub fn adjudicate_denominator(qubits: usize, rank: usize, samples: usize, seed: u64) -> Result<Adjudication> {
    let (n, k) = (qubits as u64, rank as u64);
    Ok(Adjudication {
        qubits,
        rank,
        observable: "Z1".into(),
        sample: sample_cell(qubits, rank, samples, seed, "Z1")?,
        first: ff_lcu_variance(n, k, 1.0)?.value,
        second: ff_lcu_variance_alternate(n, k, 1.0)?.value,
        first_label: "2^(N-1)",
        second_label: "2^(N-2)",
    })
}

/// Default observable separating the `-4(5k-7)` and `-4(5k+7)` mean-squared terms:
/// `Z_1 + P` at three qubits has `E[m_i] = 1`.
pub const COEFFICIENT_OBSERVABLE: &str = "Z1 + Z1Z2Z3";

/// Printed three-term assembly against the direct homogeneous assembly.
pub fn adjudicate_coefficient(
    qubits: usize,
    rank: usize,
    samples: usize,
    seed: u64,
    observable: &str,
) -> Result<Adjudication> {
    let p = MajoranaPolynomial::parse_pauli_sum(observable, qubits)?;
    let g = general_ff_variance(&p, &TraceData::vacuum(&p)?, rank as u64)?;
    Ok(Adjudication {
        qubits,
        rank,
        observable: observable.into(),
        sample: sample_cell(qubits, rank, samples, seed, observable)?,
        first: g.printed.value,
        second: g.direct.value,
        first_label: "printed -4(5k-7)",
        second_label: "direct -4(5k+7)",
    })
}
