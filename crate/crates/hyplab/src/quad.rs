//! Shared quadrature kernels: Gauss-Legendre rules on [-1, 1] (cached per
//! node count) and an adaptive Simpson integrator for kinked integrands.

use crate::{numeric, Result};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Computed by Newton iteration on the Legendre recurrence and cached; the
/// rule is exact for polynomials of degree 2n - 1.
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&n) {
        return rule.clone();
    }
    let rule = Arc::new(compute_gl(n));
    cache.lock().unwrap().insert(n, rule.clone());
    rule
}

fn compute_gl(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        // Tricomi initial guess for the i-th root, then Newton.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_pair(n, x);
            let step = p / d;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        ws[i] = w;
        xs[n - 1 - i] = x;
        ws[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        xs[n / 2] = 0.0;
    }
    (xs, ws)
}

/// Value and derivative of the Legendre polynomial P_n at x.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrate f over [a, b] with an n-point Gauss-Legendre rule.
pub fn gl_integrate(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let rule = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (x, w) in rule.0.iter().zip(rule.1.iter()) {
        sum += w * f(mid + half * x);
    }
    sum * half
}

/// Integrate f over [a, b] by splitting into `panels` equal panels with an
/// n-point Gauss-Legendre rule on each.
pub fn gl_panels(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, panels: usize, n: usize) -> f64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + h * p as f64;
        total += gl_integrate(f, lo, lo + h, n);
    }
    total
}

/// Adaptive Simpson integration of f over [a, b] to absolute tolerance `tol`.
///
/// Fails if the recursion exceeds depth 50 without meeting the local target,
/// which in practice means the integrand is not piecewise smooth on [a, b].
pub fn adaptive_simpson(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(b >= a) {
        return Err(numeric("adaptive_simpson: empty or invalid interval"));
    }
    if b == a {
        return Ok(0.0);
    }
    let fa = f(a);
    let fm = f(0.5 * (a + b));
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 0)
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = f(0.5 * (a + m));
    let rm = f(0.5 * (m + b));
    let left = simpson(fa, lm, fm, m - a);
    let right = simpson(fm, rm, fb, b - m);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol {
        return Ok(left + right + err / 15.0);
    }
    if depth >= 50 {
        return Err(numeric(format!(
            "adaptive_simpson: no convergence on [{a:.6e}, {b:.6e}]"
        )));
    }
    let lv = simpson_rec(f, a, m, fa, lm, fm, left, 0.5 * tol, depth + 1)?;
    let rv = simpson_rec(f, m, b, fm, rm, fb, right, 0.5 * tol, depth + 1)?;
    Ok(lv + rv)
}
