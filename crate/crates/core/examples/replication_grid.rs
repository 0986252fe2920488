//! A reduced version of the replication grid; the CLI `replicate-fig1` runs the
//! full one.

use lcu_lab::harness::{replicate_grid, ReplicationConfig};

fn main() -> lcu_lab::Result<()> {
    let cfg = ReplicationConfig { qubits: vec![2, 4, 6, 8], samples: 500, ..Default::default() };
    let report = replicate_grid(&cfg, None)?;
    for r in &report.reports {
        println!(
            "N={:>2} k={} {:>8} sample {:.6}  closed form {:.6}  z {:.2}",
            r.n_qubits,
            r.rank_k,
            r.backend.to_string(),
            r.sample_variance,
            r.analytic_variance,
            r.z()
        );
    }
    println!("passed: {}", report.passed());
    Ok(())
}
