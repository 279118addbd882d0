//! The hyperbolic upper half-plane H = { x + iy : y > 0 } and the integer
//! Moebius action of PSL(2,Z).
//!
//! Distances are encoded through the point-pair invariant
//! `u(z, w) = |z - w|^2 / (4 Im z Im w)`, related to hyperbolic distance by
//! `cosh d(z, w) = 1 + 2 u(z, w)`.

use crate::{invalid, numeric, Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// A point x + iy of the upper half-plane (y > 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    /// Errors unless both coordinates are finite and y > 0.
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() || y <= 0.0 {
            return Err(invalid(format!(
                "point ({x}, {y}) is not in the upper half-plane"
            )));
        }
        Ok(Point { x, y })
    }

    /// The point i (the corner of highest symmetry, stabilizer of order 2).
    pub fn unit_i() -> Self {
        Point { x: 0.0, y: 1.0 }
    }

    /// The corner rho = (-1 + i sqrt 3)/2 (stabilizer of order 3).
    pub fn rho() -> Self {
        Point {
            x: -0.5,
            y: 3.0f64.sqrt() / 2.0,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}i", self.x, self.y)
    }
}

/// Parses "x+yi" (also accepts "x-yi", bare "yi", and "i").
impl FromStr for Point {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().replace(' ', "");
        let body = t
            .strip_suffix('i')
            .ok_or_else(|| invalid(format!("point '{s}': expected x+yi form")))?;
        // Split at the last +/- that is not an exponent sign or leading sign.
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            let c = bytes[k] as char;
            if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
                split = Some(k);
                break;
            }
        }
        let (xs, ys) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let ys = match ys {
            "" | "+" => "1",
            "-" => "-1",
            other => other,
        };
        let x: f64 = xs
            .parse()
            .map_err(|_| invalid(format!("point '{s}': bad real part")))?;
        let y: f64 = ys
            .parse()
            .map_err(|_| invalid(format!("point '{s}': bad imaginary part")))?;
        Point::new(x, y)
    }
}

/// An element of PSL(2,Z), stored as the integer matrix [[a, b], [c, d]]
/// with det = 1, sign-normalized so that c > 0, or c = 0 and d > 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModularMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl ModularMatrix {
    /// Errors unless ad - bc = 1 (checked in 128-bit arithmetic).
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        if det != 1 {
            return Err(invalid(format!(
                "matrix [[{a}, {b}], [{c}, {d}]] has det {det}, want 1"
            )));
        }
        Ok(Self::normalized(a, b, c, d))
    }

    fn normalized(a: i64, b: i64, c: i64, d: i64) -> Self {
        if c < 0 || (c == 0 && d < 0) {
            ModularMatrix {
                a: -a,
                b: -b,
                c: -c,
                d: -d,
            }
        } else {
            ModularMatrix { a, b, c, d }
        }
    }

    pub fn identity() -> Self {
        ModularMatrix {
            a: 1,
            b: 0,
            c: 0,
            d: 1,
        }
    }

    /// The inversion S: z -> -1/z.
    pub fn s() -> Self {
        ModularMatrix {
            a: 0,
            b: -1,
            c: 1,
            d: 0,
        }
    }

    /// The translation T^n: z -> z + n.
    pub fn t_pow(n: i64) -> Self {
        ModularMatrix {
            a: 1,
            b: n,
            c: 0,
            d: 1,
        }
    }

    /// Matrix product self * rhs, with overflow detection.
    pub fn mul(&self, rhs: &ModularMatrix) -> Result<Self> {
        let m = |p: i64, q: i64, r: i64, s: i64| -> Result<i64> {
            let v = p as i128 * q as i128 + r as i128 * s as i128;
            i64::try_from(v).map_err(|_| numeric("modular matrix product overflows i64"))
        };
        Ok(Self::normalized(
            m(self.a, rhs.a, self.b, rhs.c)?,
            m(self.a, rhs.b, self.b, rhs.d)?,
            m(self.c, rhs.a, self.d, rhs.c)?,
            m(self.c, rhs.b, self.d, rhs.d)?,
        ))
    }

    pub fn inverse(&self) -> Self {
        Self::normalized(self.d, -self.b, -self.c, self.a)
    }

    /// Moebius action z -> (az + b)/(cz + d).
    ///
    /// The imaginary part is computed as y / |cz + d|^2, which keeps it
    /// exactly positive.
    pub fn apply(&self, z: Point) -> Point {
        let (a, b, c, d) = (self.a as f64, self.b as f64, self.c as f64, self.d as f64);
        let re = c * z.x + d;
        let im = c * z.y;
        let den = re * re + im * im;
        let nx = ((a * z.x + b) * re + a * z.y * im) / den;
        let ny = z.y / den;
        Point { x: nx, y: ny }
    }
}

impl fmt::Display for ModularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Point-pair invariant u(z, w) = |z - w|^2 / (4 Im z Im w).
pub fn ppinv(z: Point, w: Point) -> f64 {
    let dx = z.x - w.x;
    let dy = z.y - w.y;
    (dx * dx + dy * dy) / (4.0 * z.y * w.y)
}

/// Hyperbolic distance d(z, w) = acosh(1 + 2u).
pub fn distance(z: Point, w: Point) -> f64 {
    let u = ppinv(z, w);
    (1.0 + 2.0 * u).acosh()
}

/// Tolerance band for fundamental-domain boundary decisions.
const BOUNDARY_EPS: f64 = 1e-12;

/// Reduces z into the standard fundamental domain
/// { |x| <= 1/2, x^2 + y^2 >= 1 } and returns the reduced point together
/// with the matrix m such that m(z) is the returned point.
///
/// Boundary convention: x = -1/2 is preferred over x = +1/2, and on the
/// unit-circle arc the representative with x <= 0 is returned.
pub fn reduce_to_fundamental(z: Point) -> Result<(Point, ModularMatrix)> {
    let mut p = z;
    let mut m = ModularMatrix::identity();
    for _ in 0..10_000 {
        // Translate x into [-1/2, 1/2).
        let shift = (p.x + 0.5).floor();
        if shift != 0.0 {
            if shift.abs() > 4.0e18 {
                return Err(numeric("reduce_to_fundamental: translation overflows"));
            }
            let t = ModularMatrix::t_pow(-(shift as i64));
            p = t.apply(p);
            m = t.mul(&m)?;
        }
        let r2 = p.x * p.x + p.y * p.y;
        if r2 < 1.0 - BOUNDARY_EPS {
            let s = ModularMatrix::s();
            p = s.apply(p);
            m = s.mul(&m)?;
            continue;
        }
        // Inside or on the arc. Resolve boundary ties.
        if r2 <= 1.0 + BOUNDARY_EPS && p.x > BOUNDARY_EPS {
            // On the arc with x > 0: S maps to the mirror point with x < 0.
            let s = ModularMatrix::s();
            p = s.apply(p);
            m = s.mul(&m)?;
        }
        if p.x >= 0.5 - BOUNDARY_EPS {
            let t = ModularMatrix::t_pow(-1);
            m = t.mul(&m)?;
        }
        let q = m.apply(z);
        return Ok((q, m));
    }
    Err(numeric("reduce_to_fundamental: did not terminate"))
}
