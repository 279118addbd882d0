//! Hyperbolic lattice-point counting for the modular group:
//!
//! ```text
//! N(z, w, X) = #{ gamma in PSL(2,Z) : 4 u(gamma z, w) + 2 <= X }
//! ```
//!
//! with main term 3X, plus error-term averages over Heegner points.
//!
//! Two independent counters are provided. `count` enumerates bottom rows
//! (c, d) of the group (coprime pairs, sign-normalized) and counts the
//! translate family a = a0 + tc, b = b0 + td through a quadratic polynomial
//! in t; `brute_force_count` enumerates small matrices directly and tests
//! the defining inequality through the floating-point Moebius action. On
//! the boundary 4u + 2 = X both use a relative tolerance band of 1e-9, and
//! `count` resolves borderline cases in exact integer arithmetic whenever
//! both points are quadratic (Heegner-type) and X has a small dyadic
//! representation.

use crate::halfplane::{ppinv, Point};
use crate::qforms::{heegner_points, QuadForm};
use crate::{invalid, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest X accepted by the row-based counter.
pub const COUNT_X_MAX: f64 = 1.0e7;

/// Largest X accepted by the brute-force counter.
pub const BRUTE_X_MAX: f64 = 1.0e4;

/// Relative half-width of the boundary acceptance nudge: a matrix is kept
/// when 4u + 2 <= X (1 + 1e-9) + 1e-9. Rational boundary ties for quadratic
/// points sit well outside float noise, so both counters agree there.
const NUDGE_REL: f64 = 1e-9;

/// Relative band within which a decision is flagged as boundary-ambiguous.
const AMBIG_REL: f64 = 1e-7;

/// Relative band within which the exact integer comparator takes over.
const EXACT_BAND_REL: f64 = 1e-6;

/// A point given either numerically or as a quadratic irrationality
/// x = xn/xd, y = sqrt(yn)/yd (the shape of Heegner points and the corners
/// i, rho). The quadratic form enables exact boundary decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PointSpec {
    Numeric(Point),
    Quadratic { xn: i64, xd: i64, yn: i64, yd: i64 },
}

impl PointSpec {
    pub fn quadratic(xn: i64, xd: i64, yn: i64, yd: i64) -> Result<Self> {
        if xd == 0 || yd <= 0 || yn <= 0 {
            return Err(invalid(format!(
                "quadratic point ({xn}/{xd}, sqrt({yn})/{yd}) is not in the upper half-plane"
            )));
        }
        Ok(PointSpec::Quadratic { xn, xd, yn, yd })
    }

    /// The root of a positive-definite form: (-b + i sqrt|D|) / (2a).
    pub fn from_form(f: &QuadForm) -> Result<Self> {
        let d = f.disc();
        if d >= 0 || f.a <= 0 {
            return Err(invalid(format!("form {f} has no upper half-plane root")));
        }
        PointSpec::quadratic(-f.b, 2 * f.a, -d, 2 * f.a)
    }

    /// The corner i = (0 + sqrt 1 i) / 1.
    pub fn unit_i() -> Self {
        PointSpec::Quadratic {
            xn: 0,
            xd: 1,
            yn: 1,
            yd: 1,
        }
    }

    /// The corner rho = (-1 + sqrt 3 i) / 2.
    pub fn rho() -> Self {
        PointSpec::Quadratic {
            xn: -1,
            xd: 2,
            yn: 3,
            yd: 2,
        }
    }

    pub fn to_point(self) -> Result<Point> {
        match self {
            PointSpec::Numeric(p) => Ok(p),
            PointSpec::Quadratic { xn, xd, yn, yd } => {
                if xd == 0 || yd <= 0 || yn <= 0 {
                    return Err(invalid("quadratic point outside the upper half-plane"));
                }
                Point::new(
                    xn as f64 / xd as f64,
                    (yn as f64).sqrt() / yd as f64,
                )
            }
        }
    }
}

impl From<Point> for PointSpec {
    fn from(p: Point) -> Self {
        PointSpec::Numeric(p)
    }
}

/// Result of a single count.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CountResult {
    pub count: u64,
    /// Main term 3X of the hyperbolic circle problem.
    pub main_term: f64,
    /// count - 3X.
    pub error: f64,
    /// True when some accept/reject decision fell inside the ambiguity band
    /// and could not be settled exactly.
    pub boundary_ambiguous: bool,
}

fn isqrt_exact(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = (n as f64).sqrt() as i128;
    for c in [r - 1, r, r + 1] {
        if c >= 0 && c * c == n {
            return Some(c);
        }
    }
    None
}

/// Exact-decision context: all quantities scaled to integers so that the
/// inequality 4u + 2 <= X becomes L * xd <= xn * rhs_fac in i128.
struct ExactCtx {
    xnz: i128,
    dz: i128,
    xnw: i128,
    dw: i128,
    f1: i128,
    f2: i128,
    f3: i128,
    f4: i128,
    rhs: i128, // xn * s * ez * ew * dz^2 * dw^2
    xd: i128,
}

impl ExactCtx {
    fn build(z: PointSpec, w: PointSpec, x: f64) -> Option<ExactCtx> {
        let (xnz, dz, ynz, ez) = match z {
            PointSpec::Quadratic { xn, xd, yn, yd } => (xn as i128, xd as i128, yn as i128, yd as i128),
            _ => return None,
        };
        let (xnw, dw, ynw, ew) = match w {
            PointSpec::Quadratic { xn, xd, yn, yd } => (xn as i128, xd as i128, yn as i128, yd as i128),
            _ => return None,
        };
        let lim = 1_000_000i128;
        for v in [xnz.abs(), dz, ynz, ez, xnw.abs(), dw, ynw, ew] {
            if v > lim {
                return None;
            }
        }
        // y_z y_w must be rational: yn_z yn_w a perfect square.
        let s = isqrt_exact(ynz * ynw)?;
        // X must be exactly m / 2^20.
        let scaled = x * (1u64 << 20) as f64;
        if scaled.fract() != 0.0 || scaled.abs() >= 9.0e15 {
            return None;
        }
        let xn = scaled as i128;
        let xd = 1i128 << 20;
        Some(ExactCtx {
            xnz,
            dz,
            xnw,
            dw,
            f1: ynz * dz * dz * ew * ew,
            f2: ez * ez * ew * ew,
            f3: ynw * dw * dw * ez * ez,
            f4: ynw * ynz * dz * dz * dw * dw,
            rhs: xn * s * ez * ew * dz * dz * dw * dw,
            xd,
        })
    }

    /// Exact test of 4u(gamma z, w) + 2 <= X for gamma = [[a, b], [c, d]].
    /// Returns None when an intermediate product overflows i128.
    fn le(&self, a: i64, b: i64, c: i64, d: i64) -> Option<bool> {
        let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
        let p = self.dw * a - self.xnw * c;
        let q = a * self.xnz * self.dw + b * self.dz * self.dw
            - self.xnw * (c * self.xnz + d * self.dz);
        let r = c * self.xnz + d * self.dz;
        let mul = i128::checked_mul;
        let term = |f: i128, v: i128| -> Option<i128> { mul(f, mul(v, v)?) };
        let lhs = term(self.f1, p)?
            .checked_add(term(self.f2, q)?)?
            .checked_add(term(self.f3, r)?)?
            .checked_add(term(self.f4, c)?)?;
        Some(mul(lhs, self.xd)? <= self.rhs)
    }
}

/// Shared per-query state for the row-based counter.
struct Ctx {
    zx: f64,
    zy: f64,
    wx: f64,
    wy: f64,
    x: f64,
    nudge: f64,
    ambig: f64,
    exact_band: f64,
    exact: Option<ExactCtx>,
}

impl Ctx {
    fn new(z: PointSpec, w: PointSpec, x: f64) -> Result<Ctx> {
        let zp = z.to_point()?;
        let wp = w.to_point()?;
        let scale = x.max(1.0);
        Ok(Ctx {
            zx: zp.x,
            zy: zp.y,
            wx: wp.x,
            wy: wp.y,
            x,
            nudge: NUDGE_REL * scale,
            ambig: AMBIG_REL * scale,
            exact_band: EXACT_BAND_REL * scale,
            exact: ExactCtx::build(z, w, x),
        })
    }

    /// 4 u(gamma z, w) + 2 evaluated through the quadratic form in the
    /// matrix entries (no Moebius division).
    fn norm_value(&self, a: i64, b: i64, c: i64, d: i64) -> f64 {
        let (a, b, c, d) = (a as f64, b as f64, c as f64, d as f64);
        let p = a - self.wx * c;
        let q = a * self.zx + b - self.wx * (c * self.zx + d);
        let r = c * self.zx + d;
        (self.zy * self.zy * p * p
            + q * q
            + self.wy * self.wy * (r * r + c * c * self.zy * self.zy))
            / (self.zy * self.wy)
    }

    /// Accept decision plus an ambiguity flag.
    fn accept(&self, a: i64, b: i64, c: i64, d: i64) -> (bool, bool) {
        let v = self.norm_value(a, b, c, d);
        let dev = (v - self.x).abs();
        if dev <= self.exact_band {
            if let Some(e) = &self.exact {
                if let Some(ok) = e.le(a, b, c, d) {
                    return (ok, false);
                }
            }
        }
        (v <= self.x + self.nudge, dev <= self.ambig)
    }
}

/// Extended gcd: returns (g, u, v) with u*p + v*q = g = gcd(p, q) >= 0.
fn egcd(p: i64, q: i64) -> (i64, i64, i64) {
    if q == 0 {
        if p < 0 {
            (-p, -1, 0)
        } else {
            (p, 1, 0)
        }
    } else {
        let (g, u, v) = egcd(q, p.rem_euclid(q));
        (g, v, u - p.div_euclid(q) * v)
    }
}

/// Count of accepted t in the row (c, d), where the family is
/// a = a0 + t c, b = b0 + t d; also ORs ambiguity flags into `ambiguous`.
fn count_row(ctx: &Ctx, c: i64, d: i64, ambiguous: &mut bool) -> u64 {
    let (g, u, v) = egcd(d, c);
    if g != 1 {
        return 0;
    }
    // a0 d - b0 c = 1.
    let mut a0 = u;
    let mut b0 = -v;
    if c != 0 {
        // Shift to the representative with the smallest |a0|.
        let k = (a0 as f64 / c as f64).round() as i64;
        a0 -= k * c;
        b0 -= k * d;
    }
    let cf = c as f64;
    let df = d as f64;
    let rr = cf * ctx.zx + df; // c zx + d
    let p0 = a0 as f64 - ctx.wx * cf;
    let q0 = a0 as f64 * ctx.zx + b0 as f64 - ctx.wx * rr;
    let den = ctx.zy * ctx.wy;
    let alpha = (ctx.zy * ctx.zy * cf * cf + rr * rr) / den;
    let beta = 2.0 * (ctx.zy * ctx.zy * p0 * cf + q0 * rr) / den;
    let gamma0 = (ctx.zy * ctx.zy * p0 * p0
        + q0 * q0
        + ctx.wy * ctx.wy * (rr * rr + cf * cf * ctx.zy * ctx.zy))
        / den;
    let disc = beta * beta - 4.0 * alpha * (gamma0 - ctx.x - ctx.nudge);
    if disc < 0.0 {
        return 0;
    }
    let sqd = disc.sqrt();
    let t1 = (-beta - sqd) / (2.0 * alpha);
    let t2 = (-beta + sqd) / (2.0 * alpha);
    let mut lo = t1.floor() as i64 - 1;
    let hi_guess = t2.ceil() as i64 + 1;
    let acc = |t: i64, amb: &mut bool| -> bool {
        let (ok, a_flag) = ctx.accept(a0 + t * c, b0 + t * d, c, d);
        *amb |= a_flag;
        ok
    };
    while lo <= hi_guess && !acc(lo, ambiguous) {
        lo += 1;
    }
    if lo > hi_guess {
        return 0;
    }
    let mut hi = hi_guess;
    while hi >= lo && !acc(hi, ambiguous) {
        hi -= 1;
    }
    (hi - lo + 1) as u64
}

/// Row-based counter. Errors for X outside (0, 1e7] or points outside H.
pub fn count(z: PointSpec, w: PointSpec, x: f64) -> Result<CountResult> {
    if !(x > 0.0) || x > COUNT_X_MAX {
        return Err(invalid(format!(
            "count: X = {x} outside the supported range (0, {COUNT_X_MAX:e}]"
        )));
    }
    let ctx = Ctx::new(z, w, x)?;
    let xn = x + ctx.nudge;
    let cmax = ((xn / (ctx.zy * ctx.wy)).sqrt()).floor() as i64 + 1;
    let row_range = |c: i64| -> (i64, i64) {
        let cf = c as f64;
        let bound = xn * ctx.zy / ctx.wy - cf * cf * ctx.zy * ctx.zy;
        if bound < 0.0 {
            return (1, 0);
        }
        let hw = bound.sqrt();
        let center = -cf * ctx.zx;
        (
            (center - hw).floor() as i64 - 1,
            (center + hw).ceil() as i64 + 1,
        )
    };
    let process_c = |c: i64| -> (u64, bool) {
        let mut amb = false;
        let mut n = 0u64;
        if c == 0 {
            n += count_row(&ctx, 0, 1, &mut amb);
        } else {
            let (dlo, dhi) = row_range(c);
            for d in dlo..=dhi {
                n += count_row(&ctx, c, d, &mut amb);
            }
        }
        (n, amb)
    };
    let (total, ambiguous) = if cmax >= 192 {
        (0..=cmax)
            .into_par_iter()
            .map(process_c)
            .reduce(|| (0, false), |x, y| (x.0 + y.0, x.1 | y.1))
    } else {
        let mut t = (0u64, false);
        for c in 0..=cmax {
            let r = process_c(c);
            t.0 += r.0;
            t.1 |= r.1;
        }
        t
    };
    Ok(CountResult {
        count: total,
        main_term: 3.0 * x,
        error: total as f64 - 3.0 * x,
        boundary_ambiguous: ambiguous,
    })
}

/// Independent oracle: enumerates sign-normalized integer matrices with
/// entries bounded by B = ||g_w||_F sqrt(X) ||g_z^{-1}||_F, filters by
/// det = 1, and tests 4u(gamma z, w) + 2 <= X directly through the
/// floating-point Moebius action. Errors for X > 1e4.
pub fn brute_force_count(z: PointSpec, w: PointSpec, x: f64) -> Result<CountResult> {
    if !(x > 0.0) || x > BRUTE_X_MAX {
        return Err(invalid(format!(
            "brute_force_count: X = {x} outside the supported range (0, {BRUTE_X_MAX:e}]"
        )));
    }
    let zp = z.to_point()?;
    let wp = w.to_point()?;
    let frob = |p: Point| -> f64 { (p.y + (1.0 + p.x * p.x) / p.y).sqrt() };
    let b_bound = (frob(wp) * frob(zp) * (x * 1.000001).sqrt()).ceil() as i64 + 1;
    let scale = x.max(1.0);
    let nudge = NUDGE_REL * scale;
    let ambig = AMBIG_REL * scale;
    let mut total = 0u64;
    let mut ambiguous = false;
    let mut test = |a: i64, b: i64, c: i64, d: i64| {
        // Moebius action written out to avoid constructing ModularMatrix
        // (which would share code with the path under test).
        let (af, bf, cf, df) = (a as f64, b as f64, c as f64, d as f64);
        let re = cf * zp.x + df;
        let im = cf * zp.y;
        let den = re * re + im * im;
        let gz = Point {
            x: ((af * zp.x + bf) * re + af * zp.y * im) / den,
            y: zp.y / den,
        };
        let v = 4.0 * ppinv(gz, wp) + 2.0;
        if v <= x + nudge {
            total += 1;
        }
        if (v - x).abs() <= ambig {
            ambiguous = true;
        }
    };
    // a = 0 forces b c = -1; sign normalization picks c = 1, b = -1, d free.
    for d in -b_bound..=b_bound {
        test(0, -1, 1, d);
    }
    for a in -b_bound..=b_bound {
        if a == 0 {
            continue;
        }
        for b in -b_bound..=b_bound {
            for c in 0..=b_bound {
                let num = 1 + b * c;
                if num % a != 0 {
                    continue;
                }
                let d = num / a;
                if d.abs() > b_bound {
                    continue;
                }
                if c > 0 || (c == 0 && d > 0) {
                    test(a, b, c, d);
                }
            }
        }
    }
    Ok(CountResult {
        count: total,
        main_term: 3.0 * x,
        error: total as f64 - 3.0 * x,
        boundary_ambiguous: ambiguous,
    })
}

/// Per-point and averaged error terms over the Heegner points of a
/// fundamental discriminant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorAverage {
    pub d: i64,
    pub h: u64,
    pub x: f64,
    /// Main term 3X common to every point.
    pub main_term: f64,
    /// N(z_j, z_j, X) in the (a, b) order of the class group.
    pub counts: Vec<u64>,
    /// N(z_j, z_j, X) - 3X.
    pub errors: Vec<f64>,
    /// (1/h) sum_j weight_j (N(z_j, z_j, X) - 3X).
    pub average: f64,
    pub boundary_ambiguous: bool,
}

/// Averages the counting error over the Heegner points of discriminant d,
/// optionally weighting each point (weights default to 1; the length must
/// equal the class number).
pub fn heegner_error_average(d: i64, x: f64, weights: Option<&[f64]>) -> Result<ErrorAverage> {
    let set = heegner_points(d)?;
    if let Some(w) = weights {
        if w.len() != set.forms.len() {
            return Err(invalid(format!(
                "heegner_error_average: {} weights for class number {}",
                w.len(),
                set.forms.len()
            )));
        }
    }
    let specs = set
        .forms
        .iter()
        .map(PointSpec::from_form)
        .collect::<Result<Vec<_>>>()?;
    let results = specs
        .par_iter()
        .map(|&zs| count(zs, zs, x))
        .collect::<Result<Vec<_>>>()?;
    let counts: Vec<u64> = results.iter().map(|r| r.count).collect();
    let errors: Vec<f64> = results.iter().map(|r| r.error).collect();
    let ambiguous = results.iter().any(|r| r.boundary_ambiguous);
    let h = set.h as f64;
    let average = errors
        .iter()
        .enumerate()
        .map(|(j, e)| weights.map_or(1.0, |w| w[j]) * e)
        .sum::<f64>()
        / h;
    Ok(ErrorAverage {
        d,
        h: set.h,
        x,
        main_term: 3.0 * x,
        counts,
        errors,
        average,
        boundary_ambiguous: ambiguous,
    })
}
