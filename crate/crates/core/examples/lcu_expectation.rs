//! One random LCU instance: m and its pair components on both backends.

use lcu_lab::fock::{expectation, lcu_state, polynomial_to_operator, DenseState};
use lcu_lab::gaussian::lcu_expectation;
use lcu_lab::harness::SoDraw;
use lcu_lab::majorana::MajoranaPolynomial;
use lcu_lab::sampling::SeededRng;

fn main() -> lcu_lab::Result<()> {
    let (n, k) = (5, 3);
    let o = MajoranaPolynomial::parse_pauli_sum("Z1 + 0.5*X2X3", n)?;
    let draw = SoDraw::sample(n, k, &mut SeededRng::new(42, 0))?;
    println!("weights {:?}", draw.weights.values());

    let g = lcu_expectation(&draw.weights, &draw.gaussian_states(n)?, &o)?;
    let psi = lcu_state(&draw.weights, &draw.dense_unitaries()?, &DenseState::vacuum(n)?)?;
    let m_dense = expectation(&psi, &polynomial_to_operator(&o)?)?;

    println!("m gaussian {:.12}", g.m);
    println!("m dense    {:.12}", m_dense);
    println!("postselection success |psi|^2 = {:.6}", psi.norm_squared());
    for i in 0..k {
        let row: Vec<String> =
            (0..k).map(|j| format!("{:+.4}{:+.4}i", g.components[(i, j)].re, g.components[(i, j)].im)).collect();
        println!("  m_{i}j  {}", row.join("  "));
    }
    Ok(())
}
