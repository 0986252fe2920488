//! Closed-form variances for the free-fermion ensemble, with bounds.

use lcu_lab::analytic::{ff_lcu_variance, ff_lcu_variance_alternate, general_ff_variance, TraceData};
use lcu_lab::harness::{Backend, Cell, Group, Mode};
use lcu_lab::majorana::MajoranaPolynomial;

fn main() -> lcu_lab::Result<()> {
    println!("{:>3} {:>3} {:>14} {:>14} {:>14}", "N", "k", "Var[m]", "alt 2^(N-2)", "lower bound");
    for n in [2usize, 4, 8, 16] {
        for k in [1usize, 2, 4, 8] {
            let v = ff_lcu_variance(n as u64, k as u64, 1.0)?.value;
            let alt = ff_lcu_variance_alternate(n as u64, k as u64, 1.0)?.value;
            let lb = Cell::new(Group::SpecialOrthogonal, Mode::Coherent, Backend::Gaussian, n, k, 2, 0, "Z1")?
                .lower_bound()?;
            println!("{n:>3} {k:>3} {v:>14.8} {alt:>14.8} {lb:>14.8}");
        }
    }

    // a non-quadratic observable needs the general moments
    let p = MajoranaPolynomial::parse_pauli_sum("Z1 + Z1Z2Z3", 3)?;
    let t = TraceData::vacuum(&p)?;
    for k in 1..=4 {
        let g = general_ff_variance(&p, &t, k)?;
        println!(
            "Z1 + Z1Z2Z3, N=3, k={k}: E[m]={:.4} E[m^2]={:.4} E|m_ij|^2={:.4}  direct {:.6}  printed {:.6}",
            g.em, g.em2, g.ecross, g.direct.value, g.printed.value
        );
    }
    Ok(())
}
