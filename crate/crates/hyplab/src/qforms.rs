//! Binary quadratic forms of negative discriminant, class groups, and
//! Heegner points on the modular surface.
//!
//! A form (a, b, c) stands for a x^2 + b x y + c y^2 with discriminant
//! D = b^2 - 4ac < 0 and a > 0. The reduced representatives satisfy
//! |b| <= a <= c, with b >= 0 whenever |b| = a or a = c; for fundamental D
//! they are in bijection with the ideal class group of Q(sqrt D), and the
//! associated Heegner points z = (-b + i sqrt|D|) / (2a) all lie in the
//! standard fundamental domain.

use crate::halfplane::Point;
use crate::{invalid, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// An integral binary quadratic form a x^2 + b x y + c y^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// The root (-b + i sqrt|D|) / (2a) in the upper half-plane.
    pub fn heegner_point(&self) -> Result<Point> {
        let d = self.disc();
        if d >= 0 || self.a <= 0 {
            return Err(invalid(format!(
                "form {self} has no upper half-plane root"
            )));
        }
        let q = (-d) as f64;
        Point::new(
            -self.b as f64 / (2.0 * self.a as f64),
            q.sqrt() / (2.0 * self.a as f64),
        )
    }

    /// True if |b| <= a <= c with b >= 0 when |b| = a or a = c.
    pub fn is_reduced(&self) -> bool {
        let QuadForm { a, b, c } = *self;
        a > 0 && b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

fn squarefree(mut n: i64) -> bool {
    debug_assert!(n > 0);
    if n % 4 == 0 {
        return false;
    }
    let mut p = 2i64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// True if d is a fundamental discriminant of an imaginary quadratic field:
/// d < 0 and either d = 1 mod 4 squarefree, or d = 4m with m squarefree and
/// m = 2 or 3 mod 4.
pub fn is_fundamental(d: i64) -> bool {
    if d >= 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => squarefree(-d),
        0 => {
            let m = d / 4;
            let r = m.rem_euclid(4);
            (r == 2 || r == 3) && squarefree(-m)
        }
        _ => false,
    }
}

/// Gauss reduction of a positive-definite form; preserves the proper
/// equivalence class. Errors unless a > 0 and disc < 0.
pub fn reduce_form(f: QuadForm) -> Result<QuadForm> {
    let d = f.disc();
    if d >= 0 || f.a <= 0 {
        return Err(invalid(format!("form {f} is not positive definite")));
    }
    let (mut a, mut b, mut c) = (f.a, f.b, f.c);
    loop {
        // Normalize b into (-a, a].
        if b > a || b <= -a {
            // k = round(b / 2a) shifts b by -2ak into the window.
            let k = (b + a).div_euclid(2 * a);
            b -= 2 * k * a;
            c = (b * b - d) / (4 * a);
        }
        if a > c {
            (a, b, c) = (c, -b, a);
            continue;
        }
        if b < 0 && (a == c || b == -a) {
            b = -b;
        }
        debug_assert_eq!(b * b - 4 * a * c, d);
        return Ok(QuadForm { a, b, c });
    }
}

/// All reduced forms of discriminant d, sorted by (a, b).
///
/// Enumerates b with b = d mod 2, |b| <= sqrt(|d|/3), and factors
/// (b^2 - d)/4 = a c with b <= a <= c; this yields each reduced form exactly
/// once. Errors unless d is fundamental.
pub fn class_group(d: i64) -> Result<Vec<QuadForm>> {
    if !is_fundamental(d) {
        return Err(invalid(format!("{d} is not a fundamental discriminant")));
    }
    let mut forms = Vec::new();
    let bmax = ((-d) as f64 / 3.0).sqrt() as i64 + 1;
    for b in 0..=bmax {
        if (b * b).rem_euclid(4) != d.rem_euclid(4) {
            continue;
        }
        if 3 * b * b > -d {
            continue;
        }
        let m = (b * b - d) / 4;
        let mut a = b.max(1);
        while a * a <= m {
            if m % a == 0 {
                let c = m / a;
                forms.push(QuadForm { a, b, c });
                if b != 0 && b != a && a != c {
                    forms.push(QuadForm { a, b: -b, c });
                }
            }
            a += 1;
        }
    }
    forms.sort_by_key(|f| (f.a, f.b));
    Ok(forms)
}

/// Class number h(d) = number of reduced forms. Errors unless d is
/// fundamental.
pub fn class_number(d: i64) -> Result<u64> {
    Ok(class_group(d)?.len() as u64)
}

/// Number of units in the order of discriminant d: 6 for d = -3, 4 for
/// d = -4, 2 otherwise.
pub fn unit_count(d: i64) -> u32 {
    match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    }
}

/// Dirichlet class number formula, h(d) = w(d) sqrt|d| L(1, chi_d) / (2 pi),
/// evaluated from a supplied value of L(1, chi_d).
pub fn class_number_formula(d: i64, l_one: f64) -> Result<f64> {
    if !is_fundamental(d) {
        return Err(invalid(format!("{d} is not a fundamental discriminant")));
    }
    Ok(unit_count(d) as f64 * ((-d) as f64).sqrt() * l_one / (2.0 * std::f64::consts::PI))
}

/// A fundamental discriminant with its reduced forms and Heegner points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeegnerSet {
    pub d: i64,
    pub h: u64,
    pub forms: Vec<QuadForm>,
    pub points: Vec<Point>,
}

/// The Heegner points of discriminant d, in the (a, b) order of
/// `class_group`. All returned points lie in the standard fundamental
/// domain, on its boundary only with the convention x = -1/2 and x <= 0 on
/// the arc.
pub fn heegner_points(d: i64) -> Result<HeegnerSet> {
    let forms = class_group(d)?;
    let points = forms
        .iter()
        .map(|f| f.heegner_point())
        .collect::<Result<Vec<_>>>()?;
    Ok(HeegnerSet {
        d,
        h: forms.len() as u64,
        forms,
        points,
    })
}

/// Kronecker symbol (a | n), the completely multiplicative extension of the
/// Jacobi symbol to all integers. Returns -1, 0, or 1.
pub fn kronecker(a: i64, n: i64) -> i64 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    let mut a = a;
    let mut n = n;
    let mut result = 1i64;
    // Pull the 2-part out of n; (a | 2) depends on a mod 8.
    let mut twos = 0u32;
    while n % 2 == 0 {
        n /= 2;
        twos += 1;
    }
    if twos % 2 == 1 {
        match a.rem_euclid(8) {
            1 | 7 => {}
            3 | 5 => result = -result,
            _ => return 0,
        }
    }
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    // Jacobi symbol core: n odd and positive from here on.
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a = a.rem_euclid(n);
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// The values chi_d(r) = kronecker(d, r) for r = 0, 1, ..., |d| - 1.
pub fn character_table(d: i64) -> Result<Vec<i64>> {
    if !is_fundamental(d) {
        return Err(invalid(format!("{d} is not a fundamental discriminant")));
    }
    Ok((0..-d).map(|r| kronecker(d, r)).collect())
}
