use num_complex::Complex64;

use super::CMatrix;
use crate::error::{Error, Result};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Backward-error bound for the [13/13] approximant at unit roundoff.
const THETA13: f64 = 5.371920351148152;

fn one_norm(m: &CMatrix) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn matrix_exp(m: &CMatrix) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::Domain("matrix_exp of a non-square matrix".into()));
    }
    let n = m.nrows();
    let ident = CMatrix::identity(n, n);
    if n == 0 {
        return Ok(ident);
    }
    let norm = one_norm(m);
    if !norm.is_finite() {
        return Err(Error::Numerical("matrix_exp input is not finite".into()));
    }
    let squarings = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = m * Complex64::new(0.5f64.powi(squarings), 0.0);

    let b = |i: usize| Complex64::new(PADE13[i], 0.0);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let inner_u = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9)) + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &ident * b(1);
    let u = &a * inner_u;
    let v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8)) + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &ident * b(0);

    let denom = &v - &u;
    let numer = &v + &u;
    let mut result = denom.lu().solve(&numer).ok_or_else(|| Error::Numerical("singular Padé denominator".into()))?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    if result.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("matrix_exp produced non-finite entries".into()));
    }
    Ok(result)
}
