//! Pauli sums as Majorana polynomials under Jordan-Wigner.

use lcu_lab::fock::polynomial_to_operator;
use lcu_lab::majorana::MajoranaPolynomial;

fn main() -> lcu_lab::Result<()> {
    let n = 3;
    for text in ["Z1", "X1X2", "Z1Z2Z3", "0.5*Z1 - Z2 + 0.25*Y1Y2"] {
        let p = MajoranaPolynomial::parse_pauli_sum(text, n)?;
        println!(
            "{text:<24} -> {p}   (monomials {}, max degree {}, tr(O^2)/2^N = {:.3})",
            p.len(),
            p.max_degree(),
            p.normalized_trace_of_product(&p)?.re
        );
    }

    // parity P = Z1 Z2 Z3 is the top monomial up to a phase
    let parity = MajoranaPolynomial::parity(2 * n)?;
    let z123 = MajoranaPolynomial::parse_pauli_sum("Z1Z2Z3", n)?;
    println!("P == Z1Z2Z3: {}", parity.add(&z123.scale((-1.0).into()))?.is_empty());

    let z1 = MajoranaPolynomial::parse_pauli_sum("Z1", n)?;
    let dense = polynomial_to_operator(&z1)?;
    println!("dense Z1 diagonal: {:?}", dense.diagonal().iter().map(|z| z.re).collect::<Vec<_>>());
    Ok(())
}
