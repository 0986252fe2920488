use num_complex::Complex64;

use super::{is_antisymmetric, to_complex, CMatrix, RMatrix, ANTISYMMETRY_TOL};
use crate::error::{Error, Result};

/// Pfaffian of a complex antisymmetric matrix.
///
/// Parlett-Reid style reduction to tridiagonal form with partial pivoting
/// (`A = L T Lᵀ`), O(n³). Odd dimension returns zero.
pub fn pfaffian(a: &CMatrix) -> Result<Complex64> {
    if !a.is_square() {
        return Err(Error::Domain("pfaffian of a non-square matrix".into()));
    }
    let scale = a.iter().fold(1.0f64, |m, x| m.max(x.norm()));
    if !is_antisymmetric(a, ANTISYMMETRY_TOL * scale) {
        return Err(Error::Contract("pfaffian input is not antisymmetric".into()));
    }
    Ok(pfaffian_unchecked(a.clone()))
}

/// Pfaffian of a real antisymmetric matrix.
pub fn pfaffian_real(a: &RMatrix) -> Result<f64> {
    Ok(pfaffian(&to_complex(a))?.re)
}

/// Same algorithm without the antisymmetry check; consumes its argument as scratch.
pub(crate) fn pfaffian_unchecked(mut a: CMatrix) -> Complex64 {
    let n = a.nrows();
    if n % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    let mut pf = Complex64::new(1.0, 0.0);
    let mut k = 0;
    while k + 1 < n {
        let mut kp = k + 1;
        let mut best = a[(k + 1, k)].norm();
        for i in k + 2..n {
            let v = a[(i, k)].norm();
            if v > best {
                best = v;
                kp = i;
            }
        }
        if kp != k + 1 {
            for c in k..n {
                let t = a[(k + 1, c)];
                a[(k + 1, c)] = a[(kp, c)];
                a[(kp, c)] = t;
            }
            for r in k..n {
                let t = a[(r, k + 1)];
                a[(r, k + 1)] = a[(r, kp)];
                a[(r, kp)] = t;
            }
            pf = -pf;
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let pivot = a[(k, k + 1)];
        pf *= pivot;
        if k + 2 < n {
            let tau: Vec<Complex64> = (k + 2..n).map(|c| a[(k, c)] / pivot).collect();
            let col: Vec<Complex64> = (k + 2..n).map(|r| a[(r, k + 1)]).collect();
            for (i, r) in (k + 2..n).enumerate() {
                for (j, c) in (k + 2..n).enumerate() {
                    a[(r, c)] += tau[i] * col[j] - col[i] * tau[j];
                }
            }
        }
        k += 2;
    }
    pf
}
