//! Hurwitz and Riemann zeta by Euler-Maclaurin summation, the completed
//! zeta xi(s), and Dirichlet L-functions for real quadratic characters.

use crate::qforms::{character_table, is_fundamental};
use crate::{invalid, numeric, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::cgamma;

/// B_{2j} / (2j)! for j = 1..12, the Euler-Maclaurin tail coefficients.
const EM_COEF: [f64; 12] = [
    8.3333333333333333e-2,
    -1.3888888888888889e-3,
    3.3068783068783069e-5,
    -8.2671957671957672e-7,
    2.0876756987868099e-8,
    -5.2841901386874932e-10,
    1.3382536530684679e-11,
    -3.3896802963225829e-13,
    8.5860620562778445e-15,
    -2.1748686985580618e-16,
    5.5090028283602385e-18,
    -1.3954464685812522e-19,
];

/// (exp(u) - 1) / u, stable near u = 0.
fn expm1_over(u: Complex64) -> Complex64 {
    if u.norm() < 1e-4 {
        1.0 + u * (0.5 + u * (1.0 / 6.0 + u * (1.0 / 24.0)))
    } else {
        (u.exp() - 1.0) / u
    }
}

/// Euler-Maclaurin evaluation of either the Hurwitz zeta (star = false) or
/// its pole-subtracted version zeta(s, a) - 1/(s-1) (star = true), which is
/// entire in s.
fn hurwitz_core(s: Complex64, a: f64, star: bool) -> Result<Complex64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(invalid(format!("hurwitz zeta: a = {a} must be positive")));
    }
    if !star && (s - Complex64::new(1.0, 0.0)).norm() < 1e-12 {
        return Err(invalid("hurwitz zeta: pole at s = 1"));
    }
    let mut n = 20usize
        .max((2.0 * s.im.abs()).ceil() as usize)
        .max((0.25 * (s.norm() + 24.0)).ceil() as usize);
    for _attempt in 0..4 {
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 0..n {
            sum += (-s * (a + k as f64).ln()).exp();
        }
        let zc = a + n as f64;
        let lzc = zc.ln();
        let p = (-s * lzc).exp(); // zc^(-s)
        let bracket = if star {
            // ((zc)^(1-s) - 1)/(s-1) = -ln(zc) (e^u - 1)/u at u = (1-s) ln(zc),
            // analytic through s = 1.
            -lzc * expm1_over((Complex64::new(1.0, 0.0) - s) * lzc)
        } else {
            zc * p / (s - 1.0)
        };
        sum += bracket + 0.5 * p;
        let mut poch = s;
        let mut pw = p / zc;
        let mut last = 0.0f64;
        for (j, coef) in EM_COEF.iter().enumerate() {
            let term = *coef * poch * pw;
            sum += term;
            last = term.norm();
            let jf = (2 * j + 1) as f64;
            poch *= (s + jf) * (s + jf + 1.0);
            pw /= zc * zc;
        }
        if last <= 1e-16 * (sum.norm() + 1.0) {
            return Ok(sum);
        }
        n *= 2;
    }
    Err(numeric("hurwitz zeta: Euler-Maclaurin tail did not converge"))
}

/// Hurwitz zeta zeta(s, a) = sum_{k
/// >= 0} (k + a)^(-s), analytically continued. Errors at the pole s = 1 and
/// for a <= 0.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<Complex64> {
    hurwitz_core(s, a, false)
}

/// The entire function zeta(s, a) - 1/(s - 1); agrees with `hurwitz_zeta`
/// plus the pole term away from s = 1 and is regular at s = 1 (where it
/// equals -psi(a)).
pub fn hurwitz_zeta_star(s: Complex64, a: f64) -> Result<Complex64> {
    hurwitz_core(s, a, true)
}

/// Riemann zeta. Errors at the pole s = 1.
///
/// Euler-Maclaurin cancels badly left of the critical strip, so for
/// Re s < -1/2 the value is reflected through the functional equation
/// zeta(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s).
pub fn zeta(s: Complex64) -> Result<Complex64> {
    if s.re < -0.5 {
        let one = Complex64::new(1.0, 0.0);
        let chi = (s * 2.0f64.ln()).exp()
            * ((s - 1.0) * PI.ln()).exp()
            * (0.5 * PI * s).sin()
            * cgamma(one - s)?;
        return Ok(chi * zeta(one - s)?);
    }
    hurwitz_core(s, 1.0, false)
}

/// Completed zeta xi(s) = 1/2 s(s-1) pi^(-s/2) Gamma(s/2) zeta(s), entire
/// and symmetric under s -> 1-s; xi(0) = xi(1) = 1/2.
pub fn xi(s: Complex64) -> Result<Complex64> {
    if s.norm() < 1e-8 || (s - Complex64::new(1.0, 0.0)).norm() < 1e-8 {
        return Ok(Complex64::new(0.5, 0.0));
    }
    if s.re < 0.5 {
        // Work on the right of the critical line; the symmetry is exact.
        return xi(Complex64::new(1.0, 0.0) - s);
    }
    let g = cgamma(0.5 * s)?;
    let z = zeta(s)?;
    let p = (-0.5 * s * PI.ln()).exp();
    Ok(0.5 * s * (s - 1.0) * p * g * z)
}

/// Dirichlet L-function L(s, chi_d) for the real character
/// chi_d = kronecker(d, .) attached to a fundamental discriminant d < 0.
///
/// Evaluated as |d|^(-s) sum_r chi_d(r) zeta*(s, r/|d|) over the nonzero
/// residues r mod |d|; the pole terms cancel because sum_r chi_d(r) = 0, so
/// the formula is valid at every s including s = 1. Errors if d is not
/// fundamental.
pub fn dirichlet_l(s: Complex64, d: i64) -> Result<Complex64> {
    if !is_fundamental(d) {
        return Err(invalid(format!(
            "dirichlet_l: {d} is not a negative fundamental discriminant"
        )));
    }
    let q = -d;
    let table = character_table(d)?;
    let mut sum = Complex64::new(0.0, 0.0);
    for (r, &chi) in table.iter().enumerate() {
        if chi == 0 {
            continue;
        }
        let z = hurwitz_zeta_star(s, r as f64 / q as f64)?;
        sum += chi as f64 * z;
    }
    Ok((-s * (q as f64).ln()).exp() * sum)
}
