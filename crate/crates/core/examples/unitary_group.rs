//! Haar-random unitaries on the full Hilbert space: closed form against a dense
//! Monte Carlo run.

use lcu_lab::analytic::{expressive_variance, NonTracelessPolicy};
use lcu_lab::harness::{run_cells, Backend, Cell, Group, Mode};

fn main() -> lcu_lab::Result<()> {
    let samples = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4000);
    let cells = (1..=4)
        .map(|k| Cell::new(Group::Unitary, Mode::Coherent, Backend::Dense, 2, k, samples, 5, "Z1"))
        .collect::<lcu_lab::Result<Vec<_>>>()?;
    for r in run_cells(&cells, None)? {
        let closed = expressive_variance(0.0, 4.0, 1.0, 2, r.rank_k as u64, NonTracelessPolicy::Reject)?.value;
        println!(
            "N=2 k={} sample {:.6} +- {:.6}  closed form {:.6}  z {:.2}",
            r.rank_k,
            r.sample_variance,
            r.variance_se,
            closed,
            r.z()
        );
    }
    Ok(())
}
