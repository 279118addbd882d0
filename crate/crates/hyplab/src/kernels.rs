//! Counting kernels on the hyperbolic plane and their Selberg--Harish-Chandra
//! transforms.
//!
//! The counting function is a sum of values of a point-pair kernel k(u(gz, w))
//! over the group. Two kernel families appear here: the sharp ball indicator
//! k_R = 1_{[0, (cosh R - 1)/2]}, and its smoothings k^{+/-}, built by
//! convolving the indicator of a slightly larger or smaller ball with a small
//! bump of radius delta and normalizing so the values interpolate 1 -> 0
//! across a transition window of width 2*delta. The smoothings sandwich the
//! indicator pointwise, which is what makes them usable as upper and lower
//! bounds for the sharp count.
//!
//! Transforms come in two independent routes. `sht_ball` and `sht_smoothed`
//! evaluate closed forms (a hypergeometric expression for the ball, and the
//! convolution product rule for the smoothings). `sht_numeric` integrates the
//! kernel against the spherical function directly. The two routes agree to
//! quadrature accuracy and are kept separate deliberately.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::quad::{adaptive_simpson, gl_panels};
use crate::specfun::{cgamma, gauss_2f1};
use crate::{invalid, numeric, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Area of a hyperbolic disc of radius r.
pub fn disc_area(r: f64) -> f64 {
    TWO_PI * (r.cosh() - 1.0)
}

/// Mass of the normalized bump of radius delta; equals `disc_area(delta)`.
fn bump_mass(delta: f64) -> f64 {
    4.0 * PI * (0.5 * delta).sinh().powi(2)
}

/// Half-angle subtended, at a point distance d from a disc's centre, by the
/// arc of the circle of radius r about that point lying inside the disc of
/// radius r1.
fn half_angle(r: f64, r1: f64, d: f64) -> f64 {
    let r = r.max(1e-13);
    let c = (d.cosh() * r.cosh() - r1.cosh()) / (d.sinh() * r.sinh());
    c.clamp(-1.0, 1.0).acos()
}

/// Area of the intersection of two hyperbolic discs of radii r1 and r2 whose
/// centres are distance d apart.
pub fn lens_area(r1: f64, r2: f64, d: f64) -> Result<f64> {
    if !(r1 > 0.0 && r1.is_finite() && r2 > 0.0 && r2.is_finite() && d >= 0.0 && d.is_finite()) {
        return Err(invalid(
            "lens_area: radii must be positive and the centre distance non-negative",
        ));
    }
    let (big, small) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
    if d >= big + small {
        return Ok(0.0);
    }
    if d <= big - small {
        return Ok(disc_area(small));
    }
    // Polar integration about the centre of the smaller disc. Below the
    // split radius the circle about that centre lies entirely inside the
    // large disc (d < big) or entirely outside it (d > big), so only the
    // outer band needs quadrature.
    let split = (d - big).abs();
    let closed = if d < big { disc_area(split) } else { 0.0 };
    let tol = 1e-10_f64.max(1e-12 * disc_area(small));
    let band = adaptive_simpson(
        &mut |r| 2.0 * half_angle(r, big, d) * r.sinh(),
        split,
        small,
        tol,
    )?;
    Ok(closed + band)
}

/// A point-pair kernel, as a function of the invariant u = |z-w|^2/(4 Im z Im w).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelSpec {
    /// Sharp indicator of the ball of radius r, i.e. of 2 + 4u <= 2 cosh r.
    Ball { r: f64 },
    /// Smoothed indicator for the count 2 + 4u <= x: value 1 up to distance
    /// acosh(x/2) +/- delta - delta, value 0 beyond acosh(x/2) +/- delta + delta,
    /// interpolated by a normalized lens area in between. `plus: true` gives
    /// the majorant, `plus: false` the minorant.
    Smoothed { x: f64, delta: f64, plus: bool },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Ball { r } => {
                if !(r > 0.0) || !(r <= 60.0) {
                    return Err(invalid("kernel: ball radius must lie in (0, 60]"));
                }
            }
            KernelSpec::Smoothed { x, delta, plus } => {
                if !x.is_finite() || !(x > 2.0) {
                    return Err(invalid("kernel: the threshold x must exceed 2"));
                }
                if !(delta > 0.0) || !(delta <= 2.0) {
                    return Err(invalid("kernel: delta must lie in (0, 2]"));
                }
                let y = (0.5 * x).acosh();
                if !plus && y <= delta {
                    return Err(invalid(
                        "kernel: the minorant needs acosh(x/2) > delta",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Radius of the inner ball being smoothed (Y +/- delta), or the sharp
    /// radius for a ball kernel.
    pub fn core_radius(&self) -> f64 {
        match *self {
            KernelSpec::Ball { r } => r,
            KernelSpec::Smoothed { x, delta, plus } => {
                let y = (0.5 * x).acosh();
                if plus {
                    y + delta
                } else {
                    y - delta
                }
            }
        }
    }

    /// Distance beyond which the kernel vanishes identically.
    pub fn support_radius(&self) -> f64 {
        match *self {
            KernelSpec::Ball { r } => r,
            KernelSpec::Smoothed { delta, .. } => self.core_radius() + delta,
        }
    }
}

/// Evaluate the kernel at the point-pair invariant u >= 0.
pub fn kernel_eval(spec: &KernelSpec, u: f64) -> Result<f64> {
    spec.validate()?;
    if !u.is_finite() || !(u >= 0.0) {
        return Err(invalid("kernel_eval: u must be finite and non-negative"));
    }
    match *spec {
        KernelSpec::Ball { r } => Ok(if 2.0 + 4.0 * u <= 2.0 * r.cosh() {
            1.0
        } else {
            0.0
        }),
        KernelSpec::Smoothed { delta, .. } => {
            let r1 = spec.core_radius();
            let d = (1.0 + 2.0 * u).acosh();
            if d >= r1 + delta {
                Ok(0.0)
            } else if d <= r1 - delta {
                Ok(1.0)
            } else {
                Ok(lens_area(r1, delta, d)? / bump_mass(delta))
            }
        }
    }
}

/// Check the sandwich k^-(u) <= 1_{2+4u <= x} <= k^+(u) on the supplied grid
/// of invariants.
pub fn sandwich_check(x: f64, delta: f64, us: &[f64]) -> Result<bool> {
    let minus = KernelSpec::Smoothed {
        x,
        delta,
        plus: false,
    };
    let plus = KernelSpec::Smoothed {
        x,
        delta,
        plus: true,
    };
    minus.validate()?;
    for &u in us {
        let ind = if 2.0 + 4.0 * u <= x { 1.0 } else { 0.0 };
        if kernel_eval(&minus, u)? > ind + 1e-12 || ind > kernel_eval(&plus, u)? + 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// sinh(x)/x, stable through x = 0.
fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

/// Legendre function P_{-1/2 + it}(cosh r) for real t, through the cosine
/// integral over [0, r]. The substitution u = r - v^2 together with
/// cosh r - cosh(r - v^2) = 2 sinh(v^2/2) sinh(r - v^2/2) removes the
/// endpoint singularity entirely, so plain panel quadrature converges fast
/// for any r; this is the route that stays accurate where the power series
/// in tanh^2(r/2) has long since cancelled away.
fn mehler_p(t: f64, r: f64) -> f64 {
    let edge = r.sqrt();
    let panels = 8 + (t.abs() * r / 3.0) as usize;
    let integral = gl_panels(
        &mut |v: f64| {
            let w2 = v * v;
            let s = (r - 0.5 * w2).sinh();
            2.0 * (t * (r - w2)).cos() / (sinhc(0.5 * w2) * s).sqrt()
        },
        0.0,
        edge,
        panels,
        16,
    );
    integral * std::f64::consts::SQRT_2 / PI
}

/// Spherical function P^n_{s,k}(r) of weight 2k and Fourier index n.
///
/// Two routes: on the critical line with k = n = 0 the Legendre integral
/// (valid for every r >= 0), otherwise the hypergeometric series in
/// w = tanh^2(r/2), which needs w <= 0.98.
pub fn spherical_p(s: Complex64, k: i32, n: i32, r: f64) -> Result<Complex64> {
    if !s.re.is_finite() || !s.im.is_finite() || !r.is_finite() || r < 0.0 {
        return Err(invalid("spherical_p: needs finite s and r >= 0"));
    }
    if r == 0.0 {
        return Ok(Complex64::new(if n == 0 { 1.0 } else { 0.0 }, 0.0));
    }
    if n == 0 && k == 0 && (s.re - 0.5).abs() <= 1e-12 {
        return Ok(Complex64::new(mehler_p(s.im, r), 0.0));
    }
    let v = r.cosh();
    let w = (v - 1.0) / (v + 1.0);
    if w > 0.98 {
        return Err(numeric(format!(
            "spherical_p: r = {r} is out of series range; only k = n = 0 on the critical line reaches such radii"
        )));
    }
    let kn = if n >= 0 { k as f64 } else { -(k as f64) };
    let an = f64::from(n.unsigned_abs());
    let f = gauss_2f1(
        s - kn,
        s + kn + an,
        Complex64::new(1.0 + an, 0.0),
        Complex64::new(w, 0.0),
    )?;
    let pref = w.powf(0.5 * an) * Complex64::new(2.0 / (1.0 + v), 0.0).powc(s);
    Ok(pref * f)
}

/// The analytic kernel of the ball transform:
/// G(t) = e^{ itR } Gamma(it)/Gamma(3/2+it) F(-1/2, 3/2; 1-it; 1/(1-e^{2R})),
/// with the gamma ratio rewritten as Gamma(1+it)/(it Gamma(3/2+it)) so that
/// nothing blows up on the real axis.
fn ball_g(r: f64, t: Complex64) -> Result<Complex64> {
    let it = Complex64::new(0.0, 1.0) * t;
    let one = Complex64::new(1.0, 0.0);
    let ratio = cgamma(one + it)? / (it * cgamma(Complex64::new(1.5, 0.0) + it)?);
    let z = 1.0 / (1.0 - (2.0 * r).exp());
    let f = gauss_2f1(
        Complex64::new(-0.5, 0.0),
        Complex64::new(1.5, 0.0),
        one - it,
        Complex64::new(z, 0.0),
    )?;
    Ok((it * r).exp() * ratio * f)
}

/// Selberg--Harish-Chandra transform of the ball indicator of radius r,
/// in closed form.
///
/// Supported spectral parameters: real t (with |t| >= 1e-8; the closed form
/// is singular at t = 0 even though the transform itself is not), and the
/// point t = i/2 where the transform equals the ball area.
pub fn sht_ball(r: f64, t: Complex64) -> Result<f64> {
    if !r.is_finite() || !(r > 0.0) || r > 60.0 {
        return Err(invalid("sht_ball: radius must lie in (0, 60]"));
    }
    if (t - Complex64::new(0.0, 0.5)).norm() <= 1e-9 {
        return Ok(disc_area(r));
    }
    if t.im.abs() <= 1e-12 {
        if t.re.abs() < 1e-8 {
            return Err(numeric("sht_ball: closed form is singular at t = 0"));
        }
        let g = ball_g(r, Complex64::new(t.re, 0.0))?;
        return Ok(2.0 * (TWO_PI * r.sinh()).sqrt() * g.re);
    }
    Err(invalid("sht_ball: spectral parameter must be real or i/2"))
}

/// Transform of the smoothed kernel, by the convolution product rule:
/// h^{+/-}(t) = h_{Y +/- delta}(t) h_delta(t) / (4 pi sinh^2(delta/2)).
///
/// At t = i/2 this collapses to the area 2 pi (cosh(Y +/- delta) - 1)
/// exactly, since the bump factor is normalized to unit mass.
pub fn sht_smoothed(x: f64, delta: f64, plus: bool, t: Complex64) -> Result<f64> {
    let spec = KernelSpec::Smoothed { x, delta, plus };
    spec.validate()?;
    let r1 = spec.core_radius();
    if (t - Complex64::new(0.0, 0.5)).norm() <= 1e-9 {
        return Ok(disc_area(r1));
    }
    Ok(sht_ball(r1, t)? * sht_ball(delta, t)? / bump_mass(delta))
}

/// Transform by direct radial quadrature against the spherical function:
/// h(t) = 2 pi Int_0^inf k((cosh r - 1)/2) P_{1/2+it}(r) sinh r dr.
///
/// Independent of the closed forms above; real t only.
pub fn sht_numeric(spec: &KernelSpec, t: f64) -> Result<f64> {
    spec.validate()?;
    if !t.is_finite() || t.abs() > 500.0 {
        return Err(invalid("sht_numeric: t must be real with |t| <= 500"));
    }
    match *spec {
        KernelSpec::Ball { r } => {
            let panels = 8 + (t.abs() * r / 3.0) as usize + (r / 0.25) as usize;
            let v = gl_panels(
                &mut |rr: f64| mehler_p(t, rr) * rr.sinh(),
                0.0,
                r,
                panels,
                16,
            );
            Ok(TWO_PI * v)
        }
        KernelSpec::Smoothed { delta, .. } => {
            let r1 = spec.core_radius();
            let (lo, hi) = (r1 - delta, r1 + delta);
            let flat = if lo > 0.0 {
                let panels = 8 + (t.abs() * lo / 3.0) as usize + (lo / 0.25) as usize;
                gl_panels(&mut |rr: f64| mehler_p(t, rr) * rr.sinh(), 0.0, lo, panels, 16)
            } else {
                0.0
            };
            // The kernel profile is Hoelder 3/2 at the transition edges, so
            // the band goes through the adaptive routine instead of fixed
            // panels.
            let spec = *spec;
            let tol = 1e-9 * (1.0 + hi.sinh());
            let band = adaptive_simpson(
                &mut |d: f64| {
                    let u = 0.5 * (d.cosh() - 1.0);
                    let k = kernel_eval(&spec, u).unwrap_or(f64::NAN);
                    k * mehler_p(t, d) * d.sinh()
                },
                lo.max(0.0),
                hi,
                tol,
            )?;
            let total = TWO_PI * (flat + band);
            if !total.is_finite() {
                return Err(numeric("sht_numeric: quadrature failed"));
            }
            Ok(total)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_j1_ratio;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn lens_matches_independent_values() {
        assert!(rel(lens_area(1.0, 0.5, 1.2).unwrap(), 0.16375248843725831).abs() < 1e-9);
        assert!(rel(lens_area(2.0, 0.3, 1.9).unwrap(), 0.193628551158444795).abs() < 1e-9);
        // Contained disc: exact closed form, no quadrature.
        assert_eq!(lens_area(1.0, 0.5, 0.4).unwrap(), disc_area(0.5));
        assert_eq!(lens_area(3.0, 0.7, 0.0).unwrap(), disc_area(0.7));
        assert_eq!(lens_area(1.0, 0.5, 1.5).unwrap(), 0.0);
    }

    #[test]
    fn lens_is_symmetric_in_the_radii() {
        for &(r1, r2, d) in &[(1.0, 0.5, 1.2), (2.0, 0.3, 1.9), (0.8, 0.7, 1.1)] {
            let a = lens_area(r1, r2, d).unwrap();
            let b = lens_area(r2, r1, d).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn lens_rejects_bad_arguments() {
        assert!(lens_area(0.0, 1.0, 0.5).is_err());
        assert!(lens_area(1.0, -1.0, 0.5).is_err());
        assert!(lens_area(1.0, 1.0, -0.1).is_err());
        assert!(lens_area(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn smoothed_kernel_values() {
        let spec = KernelSpec::Smoothed {
            x: 2.0 * 3.0f64.cosh(),
            delta: 0.2,
            plus: true,
        };
        let at = |d: f64| kernel_eval(&spec, 0.5 * (d.cosh() - 1.0)).unwrap();
        assert!((at(3.05) - 0.9214516221852322).abs() < 1e-9);
        assert!((at(3.1) - 0.7903156219086989).abs() < 1e-9);
        assert!((at(3.19) - 0.5105591946389773).abs() < 1e-9);
        // Exact plateaus outside the transition band.
        assert_eq!(at(2.9), 1.0);
        assert_eq!(at(3.5), 0.0);
        // Values decrease across the band and stay in [0, 1].
        let mut prev = 1.0;
        let mut d = 3.0;
        while d <= 3.4 {
            let k = at(d);
            assert!((0.0..=1.0).contains(&k));
            assert!(k <= prev + 1e-12);
            prev = k;
            d += 0.02;
        }
    }

    #[test]
    fn ball_kernel_includes_its_boundary() {
        let spec = KernelSpec::Ball { r: 1.5 };
        let edge = 0.5 * (1.5f64.cosh() - 1.0);
        assert_eq!(kernel_eval(&spec, edge).unwrap(), 1.0);
        assert_eq!(kernel_eval(&spec, edge + 1e-12).unwrap(), 0.0);
        assert!(kernel_eval(&spec, -0.25).is_err());
    }

    #[test]
    fn kernels_sandwich_the_indicator() {
        let x = 2.0 * 3.0f64.cosh();
        let us: Vec<f64> = (0..400)
            .map(|i| 0.5 * ((3.0 + (i as f64 - 200.0) * 0.004).cosh() - 1.0))
            .collect();
        assert!(sandwich_check(x, 0.2, &us).unwrap());
        assert!(sandwich_check(x, 0.05, &us).unwrap());
        // Degenerate minorant: acosh(x/2) <= delta.
        assert!(sandwich_check(2.2, 1.0, &us).is_err());
    }

    #[test]
    fn spherical_series_values() {
        let p = |sre: f64, sim: f64, k: i32, n: i32, r: f64| {
            spherical_p(Complex64::new(sre, sim), k, n, r).unwrap()
        };
        assert!((p(0.5, 2.0, 0, 1, 1.0).re - 0.2565605423358985952).abs() < 1e-12);
        assert!((p(0.5, 1.0, 0, 2, 0.6).re - 0.08170231012981691051).abs() < 1e-12);
        assert!((p(0.5, 2.0, 0, 1, 5.0).re - 9.021191335686512292e-4).abs() < 1e-10);
        assert!(p(0.5, 2.0, 0, 1, 1.0).im.abs() < 1e-13);
        // Values at r = 0 are exact.
        assert_eq!(p(0.7, 3.0, 2, 0, 0.0), Complex64::new(1.0, 0.0));
        assert_eq!(p(0.7, 3.0, 2, 5, 0.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn spherical_critical_line_values() {
        let leg = |t: f64, r: f64| {
            spherical_p(Complex64::new(0.5, t), 0, 0, r).unwrap().re
        };
        assert!((leg(0.5, 0.7) - 0.9408681494592115618).abs() < 1e-12);
        assert!((leg(3.0, 1.3) - -0.3517568508252982178).abs() < 1e-12);
        assert!((leg(10.0, 2.0) - 0.1243545000496864269).abs() < 1e-12);
        assert!((leg(40.0, 2.0) - -0.05185952931143220488).abs() < 1e-12);
        assert!((leg(0.5, 0.2) - 0.9950145438650577572).abs() < 1e-12);
    }

    #[test]
    fn critical_line_routes_agree() {
        // The Legendre integral against the hypergeometric series, on a
        // point both can reach.
        let s = Complex64::new(0.5, 3.0);
        let r = 1.3f64;
        let integral = spherical_p(s, 0, 0, r).unwrap().re;
        let v = r.cosh();
        let w = (v - 1.0) / (v + 1.0);
        let series = (Complex64::new(2.0 / (1.0 + v), 0.0).powc(s)
            * gauss_2f1(s, s, Complex64::new(1.0, 0.0), Complex64::new(w, 0.0)).unwrap())
        .re;
        assert!((integral - series).abs() < 1e-11, "{integral} vs {series}");
    }

    #[test]
    fn spherical_small_radius_expansion() {
        // P^n ~ (r/2)^n (1 + ((s-k)(s+k+n)/(4(1+n)) - s/4 - n/12) r^2).
        let s = Complex64::new(0.5, 4.0);
        let (k, n, r) = (0, 1, 0.01f64);
        let got = spherical_p(s, k, n, r).unwrap();
        let kc = Complex64::new(k as f64, 0.0);
        let nf = n as f64;
        let coef = (s - kc) * (s + kc + nf) / (4.0 * (1.0 + nf)) - s / 4.0 - nf / 12.0;
        let approx = (0.5 * r).powi(n) * (Complex64::new(1.0, 0.0) + coef * r * r);
        assert!((got - approx).norm() < 1e-5 * got.norm());
    }

    #[test]
    fn spherical_oscillatory_asymptotics() {
        // P_{1/2+it}(r) = 2 cos(rt - pi/4) / (sqrt(|t|) sqrt(2 pi sinh r))
        // + O(1/|t|), tested with the explicit constant 5.
        let t = 40.0;
        for &r in &[1.0, 2.0, 3.0] {
            let p = spherical_p(Complex64::new(0.5, t), 0, 0, r).unwrap().re;
            let asym = 2.0 * (r * t - PI / 4.0).cos() / (t.sqrt() * (TWO_PI * r.sinh()).sqrt());
            assert!((p - asym).abs() <= 5.0 / t, "r = {r}: {p} vs {asym}");
        }
    }

    #[test]
    fn spherical_domain_errors() {
        let s = Complex64::new(0.5, 1.0);
        assert!(spherical_p(s, 0, 0, -1.0).is_err());
        assert!(spherical_p(Complex64::new(f64::NAN, 0.0), 0, 0, 1.0).is_err());
        // Off the critical line the series route refuses huge radii.
        assert!(spherical_p(Complex64::new(2.0, 0.0), 0, 0, 20.0).is_err());
        // On the critical line the integral route reaches them.
        assert!(spherical_p(s, 0, 0, 20.0).is_ok());
    }

    #[test]
    fn ball_transform_values() {
        let h = |t: f64, r: f64| sht_ball(r, Complex64::new(t, 0.0)).unwrap();
        assert!(rel(h(3.0, 2.0), -1.4668899738126024) < 1e-12);
        assert!(rel(h(0.5, 1.0), 3.2035399243683664) < 1e-12);
        assert!(rel(h(7.0, 0.3), 0.1536372604434935) < 1e-12);
        assert!(rel(h(1.0, 5.0), -38.16560358137383) < 1e-12);
        assert!(rel(h(20.0, 5.0), -0.4647720265621682) < 1e-12);
        assert!(rel(h(12.0, 0.5), -0.07361494348491388) < 1e-12);
    }

    #[test]
    fn ball_transform_at_the_trivial_eigenvalue() {
        // h_R(i/2) is the ball area, and the symmetrized analytic kernel
        // must agree with that closed form.
        let i2 = Complex64::new(0.0, 0.5);
        for &r in &[0.4, 1.0, 2.5, 6.0] {
            assert_eq!(sht_ball(r, i2).unwrap(), disc_area(r));
            let g = ball_g(r, i2).unwrap() + ball_g(r, -i2).unwrap();
            let sym = ((TWO_PI * r.sinh()).sqrt() * g).re;
            assert!(rel(sym, disc_area(r)) < 1e-11, "r = {r}");
        }
    }

    #[test]
    fn ball_transform_small_radius_bessel_form() {
        // h_R(t) = pi R^2 (2 J_1(Rt)/(Rt)) sqrt(sinh R / R) + O(R^2 min(R^2, t^{-2})).
        for &r in &[0.05f64, 0.1, 0.2] {
            for &t in &[0.5f64, 3.0, 12.0, 40.0] {
                let h = sht_ball(r, Complex64::new(t, 0.0)).unwrap();
                let j = PI * r * r * bessel_j1_ratio(r * t) * (r.sinh() / r).sqrt();
                let bound = 3.0 * r * r * (r * r).min(1.0 / (t * t));
                assert!((h - j).abs() <= bound, "R={r} t={t}: {h} vs {j}");
            }
        }
    }

    #[test]
    fn ball_transform_domain_errors() {
        assert!(sht_ball(0.0, Complex64::new(1.0, 0.0)).is_err());
        assert!(sht_ball(-2.0, Complex64::new(1.0, 0.0)).is_err());
        assert!(sht_ball(2.0, Complex64::new(0.0, 0.0)).is_err());
        assert!(sht_ball(2.0, Complex64::new(1.0, 0.3)).is_err());
    }

    #[test]
    fn smoothed_transform_values() {
        let x = 20.13532399155553168; // 2 cosh 3
        let t = Complex64::new(2.0, 0.0);
        assert!(rel(sht_smoothed(x, 0.2, true, t).unwrap(), -2.753725190085075215) < 1e-12);
        assert!(rel(sht_smoothed(x, 0.2, false, t).unwrap(), -4.625856169550372263) < 1e-12);
        // Exact area at t = i/2.
        let i2 = Complex64::new(0.0, 0.5);
        assert_eq!(sht_smoothed(x, 0.2, true, i2).unwrap(), disc_area(3.2));
        assert_eq!(sht_smoothed(x, 0.2, false, i2).unwrap(), disc_area(2.8));
        assert!(sht_smoothed(1.5, 0.2, true, t).is_err());
        assert!(sht_smoothed(x, 0.0, true, t).is_err());
    }

    #[test]
    fn quadrature_route_matches_ball_closed_form() {
        let spec = KernelSpec::Ball { r: 2.0 };
        let got = sht_numeric(&spec, 3.0).unwrap();
        assert!(rel(got, -1.4668899738126024) < 1e-8, "{got}");
        let spec = KernelSpec::Ball { r: 0.7 };
        let got = sht_numeric(&spec, 11.0).unwrap();
        let closed = sht_ball(0.7, Complex64::new(11.0, 0.0)).unwrap();
        assert!(rel(got, closed) < 1e-8, "{got} vs {closed}");
    }

    #[test]
    fn quadrature_route_matches_smoothing_product_rule() {
        let x = 2.0 * 2.0f64.cosh();
        for &(delta, plus, t) in &[(0.15, true, 0.5), (0.15, false, 3.0), (0.2, true, 11.0)] {
            let spec = KernelSpec::Smoothed { x, delta, plus };
            let got = sht_numeric(&spec, t).unwrap();
            let closed = sht_smoothed(x, delta, plus, Complex64::new(t, 0.0)).unwrap();
            assert!(
                rel(got, closed) < 1e-5,
                "delta={delta} plus={plus} t={t}: {got} vs {closed}"
            );
        }
    }
}
