//! Programmatic sweep with the CSV and sidecar the CLI would write.

use lcu_lab::harness::{emit_csv, run_sweep, tolerance, write_sidecar, Overrides, SweepConfig};

fn main() -> lcu_lab::Result<()> {
    let cfg = SweepConfig::default()
        .merge_text("qubits = 2..6\nranks = 1,2,4\nsamples = 500\nseed = 1\n")?
        .apply(&Overrides { observable: Some("Z2".into()), ..Default::default() });
    let reports = run_sweep(&cfg, None)?;

    let out = std::env::temp_dir().join("lcu-lab-sweep.csv");
    emit_csv(&reports, &out)?;
    let meta = write_sidecar(&cfg, &out)?;
    println!("wrote {} and {}", out.display(), meta.display());

    let t = tolerance(&reports);
    println!("{} cells, max z {:.2}, within tolerance: {}", t.cells, t.max_z, t.passed());
    Ok(())
}
