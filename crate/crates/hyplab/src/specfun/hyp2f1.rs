//! Gauss hypergeometric function 2F1(a, b; c; z) by power series, with the
//! Pfaff transformation extending the safe region to the negative real axis.

use crate::{invalid, numeric, Result};
use num_complex::Complex64;

const MAX_TERMS: usize = 20_000;

/// Largest tolerated ratio (max partial term) / (final sum); beyond it the
/// series has cancelled away too many digits to trust.
const CANCEL_GUARD: f64 = 1e13;

fn near_nonpositive_integer(x: Complex64) -> bool {
    x.im.abs() < 1e-13 && x.re < 0.5 && (x.re - x.re.round()).abs() < 1e-13
}

/// 2F1(a, b; c; z) for complex parameters.
///
/// Supported arguments: z.re < 0 (mapped by the Pfaff transformation
/// z -> z/(z-1) into the unit disc), or |z| <= 0.985 where the raw series
/// still converges geometrically. Errors when c is a non-positive integer,
/// when z lies outside the supported region, or when the series cancels
/// catastrophically.
pub fn gauss_2f1(a: Complex64, b: Complex64, c: Complex64, z: Complex64) -> Result<Complex64> {
    if near_nonpositive_integer(c) {
        return Err(invalid("gauss_2f1: c is a non-positive integer"));
    }
    if z.re < 0.0 && z.norm() > 0.6 {
        // Pfaff: 2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1));
        // for z.re < 0 the mapped argument lies in |w| < 1 with w.re > 0.
        let w = z / (z - 1.0);
        let factor = (Complex64::new(1.0, 0.0) - z).powc(-a);
        return Ok(factor * series(a, c - b, c, w)?);
    }
    if z.norm() <= 0.985 {
        return series(a, b, c, z);
    }
    Err(invalid(format!(
        "gauss_2f1: argument {z} outside the supported region"
    )))
}

fn series(a: Complex64, b: Complex64, c: Complex64, z: Complex64) -> Result<Complex64> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut max_term = 1.0f64;
    for j in 0..MAX_TERMS {
        let jf = j as f64;
        term *= (a + jf) * (b + jf) / ((c + jf) * (jf + 1.0)) * z;
        if term.norm() == 0.0 {
            // Terminating series (a or b a non-positive integer).
            return Ok(sum);
        }
        sum += term;
        max_term = max_term.max(term.norm());
        if term.norm() <= 1e-17 * sum.norm().max(1e-300) && j > 4 {
            if max_term > CANCEL_GUARD * sum.norm().max(1e-300) {
                return Err(numeric(
                    "gauss_2f1: catastrophic cancellation in the power series",
                ));
            }
            return Ok(sum);
        }
    }
    Err(numeric("gauss_2f1: series did not converge"))
}
