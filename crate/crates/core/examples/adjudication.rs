//! Monte Carlo tie-breakers between competing closed forms.
//!
//! `cargo run --release --example adjudication -- 10000`

use lcu_lab::harness::{
    adjudicate_coefficient, adjudicate_denominator, replication::COEFFICIENT_OBSERVABLE, Adjudication,
};

fn show(a: &Adjudication) {
    println!(
        "N={} k={} O={}: sample {:.6} +- {:.6}",
        a.qubits, a.rank, a.observable, a.sample.variance, a.sample.variance_se
    );
    println!("  {:<18} {:.6} (z {:.2})", a.first_label, a.first, a.z_first());
    println!("  {:<18} {:.6} (z {:.2})", a.second_label, a.second, a.z_second());
    println!("  separation {:.1} SE, supports {}", a.separation_se(), a.supported_label());
}

fn main() -> lcu_lab::Result<()> {
    let samples = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    show(&adjudicate_denominator(6, 4, samples, 0)?);
    show(&adjudicate_coefficient(3, 2, samples, 0, COEFFICIENT_OBSERVABLE)?);
    Ok(())
}
