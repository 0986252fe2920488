//! The numerical building blocks on their own.

use lcu_lab::linalg::{logm_special_orthogonal, matrix_exp, pfaffian_real, so_normal_form, to_complex, RMatrix};
use lcu_lab::sampling::{sample_haar_special_orthogonal, SeededRng};

fn main() -> lcu_lab::Result<()> {
    let mut rng = SeededRng::new(3, 0);
    let r = sample_haar_special_orthogonal(8, &mut rng)?;
    println!("det R = {:.12}", r.matrix().determinant());

    let nf = so_normal_form(r.matrix())?;
    println!("rotation angles {:?}", nf.angles.iter().map(|t| format!("{t:.4}")).collect::<Vec<_>>());

    let a = logm_special_orthogonal(r.matrix())?;
    let back = matrix_exp(&to_complex(&a))?.map(|z| z.re);
    println!("|exp(log R) - R| = {:.2e}", (back - r.matrix()).abs().max());

    let pf = pfaffian_real(&a)?;
    println!("Pf(log R)^2 = {:.10}, det(log R) = {:.10}", pf * pf, a.determinant());

    let j = RMatrix::from_fn(4, 4, |i, k| match (i, k) {
        (0, 1) | (2, 3) => 1.0,
        (1, 0) | (3, 2) => -1.0,
        _ => 0.0,
    });
    println!("Pf(J) = {}", pfaffian_real(&j)?);
    Ok(())
}
