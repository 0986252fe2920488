//! Covariance-matrix simulation of a Gaussian state, checked against the dense
//! statevector.

use lcu_lab::fock::{apply_gaussian_unitary, DenseState};
use lcu_lab::gaussian::GaussianState;
use lcu_lab::sampling::{sample_haar_special_orthogonal, SeededRng};

fn main() -> lcu_lab::Result<()> {
    let n = 4;
    let mut rng = SeededRng::new(7, 0);
    let r = sample_haar_special_orthogonal(2 * n, &mut rng)?;

    let g = GaussianState::vacuum(n)?.apply_rotation(&r)?;
    let d = apply_gaussian_unitary(&r, &DenseState::vacuum(n)?)?;

    println!("reference |x> = {:0width$b}, amplitude {:.6}", g.reference_basis(), g.reference_amplitude(), width = n);
    println!("purity residual |Γ Γ^T - I| = {:.2e}", g.purity_residual());
    let mut worst: f64 = 0.0;
    for x in 0..(1u64 << n) {
        worst = worst.max((g.amplitude(x)? - d.amplitude(x)).norm());
    }
    println!("max amplitude difference over {} basis states: {worst:.2e}", 1 << n);

    // Z_j = Γ_{2j-1, 2j}
    let cov = g.covariance();
    let z: Vec<String> = (0..n).map(|j| format!("{:+.4}", cov[(2 * j, 2 * j + 1)])).collect();
    println!("<Z_j> from covariance: {}", z.join(" "));
    Ok(())
}
