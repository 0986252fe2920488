//! Incoherent mixtures: the Monte Carlo variance against Σ 2/(k(k+1)) E[m_i^2].

use lcu_lab::harness::{run_cells, Backend, Cell, Group, Mode};

fn main() -> lcu_lab::Result<()> {
    let cells = [1, 2, 4, 8]
        .iter()
        .map(|&k| Cell::new(Group::SpecialOrthogonal, Mode::Incoherent, Backend::Gaussian, 4, k, 4000, 9, "Z1"))
        .collect::<lcu_lab::Result<Vec<_>>>()?;
    for r in run_cells(&cells, None)? {
        println!(
            "N=4 k={} sample {:.6} +- {:.6}  closed form {:.6}  bound {:.6}",
            r.rank_k, r.sample_variance, r.variance_se, r.analytic_variance, r.lower_bound
        );
    }
    Ok(())
}
