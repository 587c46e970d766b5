//! Adaptive panel quadrature.
//!
//! Panels are integrated with Gauss-Legendre rules (8 and 16 points); the
//! difference of the two estimates drives bisection. Gauss nodes are interior,
//! so integrands may blow up at panel endpoints as long as they stay
//! integrable - callers place known singular points on panel boundaries.
//!
//! Two change-of-variable helpers cover the recurring endpoint cases:
//! `integrate_sqrt_endpoints` substitutes y = a + t^2 (and mirrored at b) to
//! absorb inverse-square-root endpoint singularities, and `integrate_tail`
//! substitutes x = m / w^2 for integrands decaying at least like x^(-3/2).

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-based initial guess, then Newton on P_n(x) = 0.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn rules() -> &'static ((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>)) {
    static RULES: OnceLock<((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>))> = OnceLock::new();
    RULES.get_or_init(|| (gauss_legendre(8), gauss_legendre(16)))
}

fn panel(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let ((n8, w8), (n16, w16)) = rules();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut g8 = 0.0;
    for (x, w) in n8.iter().zip(w8) {
        g8 += w * f(mid + half * x);
    }
    let mut g16 = 0.0;
    for (x, w) in n16.iter().zip(w16) {
        g16 += w * f(mid + half * x);
    }
    (half * g16, (half * (g16 - g8)).abs())
}

/// Integrate `f` over [a, b] to absolute tolerance `tol`.
///
/// Fails with `NonIntegrable` when bisection exhausts its depth budget
/// before the error estimate stabilizes.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    const MAX_DEPTH: u32 = 48;
    let span = (b - a).abs();
    let mut total = 0.0;
    let mut stack = vec![(a, b, 0u32)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let (est, err) = panel(&f, lo, hi);
        let local_tol = tol * ((hi - lo).abs() / span).max(1e-3);
        if est.is_finite() && err <= local_tol {
            total += est;
        } else if depth >= MAX_DEPTH || (hi - lo).abs() < 1e-300 {
            return Err(Error::NonIntegrable {
                drift: if err.is_finite() { err } else { f64::INFINITY },
            });
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
    }
    Ok(total)
}

/// Integrate over [a, b] with y = a + t^2 / y = b - t^2 substitutions at the
/// ends, absorbing inverse-square-root endpoint singularities. The interval
/// is split at its midpoint; each half is transformed so the singular end
/// maps to t = 0.
pub fn integrate_sqrt_endpoints(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let mid = 0.5 * (a + b);
    let lower = integrate(
        |t| 2.0 * t * f(a + t * t),
        0.0,
        (mid - a).sqrt(),
        0.5 * tol,
    )?;
    let upper = integrate(
        |t| 2.0 * t * f(b - t * t),
        0.0,
        (b - mid).sqrt(),
        0.5 * tol,
    )?;
    Ok(lower + upper)
}

/// Integrate `f` over [m, +inf) for integrands decaying at least like
/// x^(-3/2), via x = m / w^2 with w in (0, 1]. Requires m > 0.
pub fn integrate_tail(f: impl Fn(f64) -> f64, m: f64, tol: f64) -> Result<f64> {
    assert!(m > 0.0, "tail substitution needs a positive split point");
    integrate(
        |w| {
            let x = m / (w * w);
            f(x) * 2.0 * m / (w * w * w)
        },
        0.0,
        1.0,
        tol,
    )
}
