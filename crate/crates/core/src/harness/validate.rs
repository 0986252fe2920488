//! Trial-by-trial agreement between the Gaussian backend and the dense oracle.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::fock::{expectation, lcu_state, polynomial_to_operator, DenseState};
use crate::gaussian::lcu_expectation;
use crate::majorana::MajoranaPolynomial;

use super::cell::{stream_index, SoDraw, BACKEND_TOL};
use crate::sampling::SeededRng;

/// Largest deviations seen for one `(N, k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationRow {
    pub qubits: usize,
    pub rank: usize,
    pub trials: usize,
    pub max_dev_m: f64,
    pub max_dev_components: f64,
    /// Trial index with the largest deviation; replay with the same seed.
    pub worst_trial: usize,
}

impl ValidationRow {
    pub fn passed(&self) -> bool {
        self.max_dev_m < BACKEND_TOL && self.max_dev_components < BACKEND_TOL
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub seed: u64,
    pub rows: Vec<ValidationRow>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(ValidationRow::passed)
    }
}

/// Deviations `(|Δm|, max_ij |Δm_ij|)` for one SO(2N) trial.
pub fn compare_trial(
    qubits: usize,
    rank: usize,
    seed: u64,
    trial: usize,
    o: &MajoranaPolynomial,
) -> Result<(f64, f64)> {
    let mut rng = SeededRng::new(seed, stream_index(qubits, rank, trial));
    let draw = SoDraw::sample(qubits, rank, &mut rng)?;
    let gauss = lcu_expectation(&draw.weights, &draw.gaussian_states(qubits)?, o)?;

    let us = draw.dense_unitaries()?;
    let vac = DenseState::vacuum(qubits)?;
    let od = polynomial_to_operator(o)?;
    let m = expectation(&lcu_state(&draw.weights, &us, &vac)?, &od)?;
    let branches = us.iter().map(|u| vac.apply(u)).collect::<Result<Vec<_>>>()?;
    let applied = branches.iter().map(|b| b.apply(&od)).collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    for i in 0..rank {
        for j in 0..rank {
            let dense: Complex64 = branches[j].inner(&applied[i]);
            worst = worst.max((dense - gauss.components[(i, j)]).norm());
        }
    }
    Ok(((gauss.m - m).abs(), worst))
}

/// Compares the backends on `trials` random instances per `(N, k)`.
pub fn validate_backends(
    qubits: &[usize],
    ranks: &[usize],
    trials: usize,
    seed: u64,
    observable: &str,
) -> Result<ValidationReport> {
    let mut rows = Vec::new();
    for &n in qubits {
        let o = MajoranaPolynomial::parse_pauli_sum(observable, n)?;
        for &k in ranks {
            let devs =
                (0..trials).into_par_iter().map(|t| compare_trial(n, k, seed, t, &o)).collect::<Result<Vec<_>>>()?;
            let mut row =
                ValidationRow { qubits: n, rank: k, trials, max_dev_m: 0.0, max_dev_components: 0.0, worst_trial: 0 };
            let mut worst = -1.0;
            for (t, (dm, dc)) in devs.into_iter().enumerate() {
                if dm.max(dc) > worst {
                    worst = dm.max(dc);
                    row.worst_trial = t;
                }
                row.max_dev_m = row.max_dev_m.max(dm);
                row.max_dev_components = row.max_dev_components.max(dc);
            }
            rows.push(row);
        }
    }
    Ok(ValidationReport { seed, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_qubits_agree() {
        let r = validate_backends(&[2], &[1, 2], 20, 5, "Z1").unwrap();
        assert!(r.passed(), "{r:?}");
        let row = &r.rows[1];
        let o = MajoranaPolynomial::parse_pauli_sum("Z1", 2).unwrap();
        let (dm, dc) = compare_trial(2, 2, 5, row.worst_trial, &o).unwrap();
        assert_eq!(dm.max(dc), row.max_dev_m.max(row.max_dev_components));
    }
}
