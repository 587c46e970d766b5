//! Elliptic special-function kernel.
//!
//! Everything downstream of the rational Lattes-style maps runs through this
//! module: the Carlson symmetric integral R_F, the complete elliptic integral
//! K(m), the Jacobi elliptic functions sn/cn/dn, and the Weierstrass p
//! function with its derivative and inverse on the real period.
//!
//! Conventions:
//! - the Jacobi parameter is `m = k^2` (scipy convention), `0 <= m < 1`;
//! - Weierstrass invariants `(g2, g3)` are restricted to positive
//!   discriminant `g2^3 - 27 g3^2 > 0`, so the cubic `4 s^3 - g2 s - g3`
//!   has three distinct real roots `e1 > e2 > e3` and the real half-period
//!   `omega1` is finite;
//! - p(x) is evaluated through the Jacobi reduction
//!   `p(x) = e3 + (e1 - e3) / sn^2(x sqrt(e1 - e3) | m)` with
//!   `m = (e2 - e3)/(e1 - e3)`, rather than the slowly convergent lattice
//!   sum that defines it;
//! - `p_inv(u) = R_F(u - e1, u - e2, u - e3)`, the Carlson form of
//!   `int_u^inf ds / sqrt(4 s^3 - g2 s - g3)`.
//!
//! R_F follows the duplication algorithm of Carlson (1977) as popularized by
//! Numerical Recipes; sn/cn/dn follow the descending Gauss/Landen recursion
//! (Abramowitz & Stegun 16.4). Absolute accuracy is a few ulps away from
//! poles; all functions are pure and safe to call concurrently.

use crate::error::{Error, Result};

/// Relative error of the truncated R_F series is ~ ERRTOL^6.
const RF_ERRTOL: f64 = 0.0025;

/// Carlson symmetric integral R_F(x, y, z) =
/// (1/2) int_0^inf dt / sqrt((t+x)(t+y)(t+z)).
///
/// Arguments must be nonnegative and finite, with at most one of them zero.
/// Symmetric in its arguments; relative error well below 1e-12.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> Result<f64> {
    if !(x.is_finite() && y.is_finite() && z.is_finite()) {
        return Err(Error::Domain("carlson_rf: arguments must be finite".into()));
    }
    if x < 0.0 || y < 0.0 || z < 0.0 {
        return Err(Error::Domain("carlson_rf: arguments must be nonnegative".into()));
    }
    if [x, y, z].iter().filter(|v| **v == 0.0).count() > 1 {
        return Err(Error::Domain("carlson_rf: at most one argument may be zero".into()));
    }
    let (mut xt, mut yt, mut zt) = (x, y, z);
    let mut ave;
    let (mut dx, mut dy, mut dz);
    let mut iter = 0;
    loop {
        let sx = xt.sqrt();
        let sy = yt.sqrt();
        let sz = zt.sqrt();
        let lam = sx * (sy + sz) + sy * sz;
        xt = 0.25 * (xt + lam);
        yt = 0.25 * (yt + lam);
        zt = 0.25 * (zt + lam);
        ave = (xt + yt + zt) / 3.0;
        dx = (ave - xt) / ave;
        dy = (ave - yt) / ave;
        dz = (ave - zt) / ave;
        if dx.abs().max(dy.abs()).max(dz.abs()) < RF_ERRTOL {
            break;
        }
        iter += 1;
        if iter > 100 {
            return Err(Error::RootFind("carlson_rf did not converge".into()));
        }
    }
    let e2 = dx * dy - dz * dz;
    let e3 = dx * dy * dz;
    Ok((1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / ave.sqrt())
}

/// Modular discriminant g2^3 - 27 g3^2 (standard normalization).
///
/// Positive exactly when 4 s^3 - g2 s - g3 has three distinct real roots,
/// which is the only regime this crate supports.
pub fn discriminant(g2: f64, g3: f64) -> f64 {
    g2 * g2 * g2 - 27.0 * g3 * g3
}

/// The three real roots of 4 s^3 - g2 s - g3 = 0, sorted descending.
///
/// Requires `discriminant(g2, g3) > 0`. Uses the trigonometric solution of
/// the depressed cubic followed by one Newton polish step per root.
pub fn cubic_roots(g2: f64, g3: f64) -> Result<(f64, f64, f64)> {
    if discriminant(g2, g3) <= 0.0 {
        return Err(Error::Domain(format!(
            "cubic_roots: discriminant {} is not positive",
            discriminant(g2, g3)
        )));
    }
    // 4s^3 - g2 s - g3 = 0  <=>  s^3 + p s + q = 0 with p = -g2/4, q = -g3/4.
    // disc > 0 forces g2 > 0, hence p < 0 and the three-real-root formula.
    let p = -g2 / 4.0;
    let q = -g3 / 4.0;
    let amp = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (2.0 * p)) * (-3.0 / p).sqrt();
    let phi = arg.clamp(-1.0, 1.0).acos();
    let mut roots = [0.0f64; 3];
    for (k, r) in roots.iter_mut().enumerate() {
        let mut s = amp * ((phi - 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos();
        let f = 4.0 * s * s * s - g2 * s - g3;
        let fp = 12.0 * s * s - g2;
        if fp != 0.0 {
            s -= f / fp;
        }
        *r = s;
    }
    roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((roots[0], roots[1], roots[2]))
}

/// Complete elliptic integral of the first kind,
/// K(m) = int_0^(pi/2) d(theta) / sqrt(1 - m sin^2 theta), via the AGM.
///
/// Parameter `m = k^2`, `0 <= m < 1`. Relative error ~ machine epsilon.
pub fn complete_k(m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::Domain(format!("complete_k: m = {m} outside [0, 1)")));
    }
    let mut a = 1.0f64;
    let mut b = (1.0 - m).sqrt();
    for _ in 0..64 {
        if (a - b).abs() <= 2.0 * f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    Ok(std::f64::consts::FRAC_PI_2 / a)
}

/// Jacobi elliptic trio (sn, cn, dn)(u | m) in one descending-Landen pass.
///
/// `m` in [0, 1). Absolute error ~ 1e-16 (the descent is cut at 1e-8 and the
/// error is quadratic in the cut).
pub fn jacobi_elliptic(u: f64, m: f64) -> Result<(f64, f64, f64)> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::Domain(format!("jacobi_elliptic: m = {m} outside [0, 1)")));
    }
    if m == 0.0 {
        return Ok((u.sin(), u.cos(), 1.0));
    }
    const CA: f64 = 1.0e-8;
    let mut emc = 1.0 - m;
    let mut a = 1.0f64;
    let mut dn = 1.0f64;
    let mut em = [0.0f64; 16];
    let mut en = [0.0f64; 16];
    let mut c = 0.0f64;
    let mut l = 0;
    for i in 0..16 {
        l = i;
        em[i] = a;
        emc = emc.sqrt();
        en[i] = emc;
        c = 0.5 * (a + emc);
        if (a - emc).abs() <= CA * a {
            break;
        }
        emc *= a;
        a = c;
    }
    let mut sn = (c * u).sin();
    let mut cn = (c * u).cos();
    if sn != 0.0 {
        let mut aa = cn / sn;
        c *= aa;
        for i in (0..=l).rev() {
            let b = em[i];
            aa *= c;
            c *= dn;
            dn = (en[i] + aa) / (b + aa);
            aa = c / b;
        }
        let amp = 1.0 / (c * c + 1.0).sqrt();
        sn = if sn >= 0.0 { amp } else { -amp };
        cn = c * sn;
    }
    Ok((sn, cn, dn))
}

/// Jacobi elliptic sine sn(u | m); odd in `u`, period 4 K(m).
pub fn jacobi_sn(u: f64, m: f64) -> Result<f64> {
    jacobi_elliptic(u, m).map(|(sn, _, _)| sn)
}

/// Real-lattice Weierstrass data for invariants (g2, g3) with positive
/// discriminant.
///
/// Carries the sorted roots `e1 > e2 > e3` of `4 s^3 - g2 s - g3`, the Jacobi
/// parameter `m = (e2 - e3)/(e1 - e3)` of the reduction, and the real
/// half-period `omega1 = p_inv(e1)`. Immutable after construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticContext {
    pub g2: f64,
    pub g3: f64,
    pub disc: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub omega1: f64,
    pub m: f64,
}

impl EllipticContext {
    pub fn new(g2: f64, g3: f64) -> Result<Self> {
        let disc = discriminant(g2, g3);
        if disc <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "elliptic invariants need a positive discriminant; g2^3 - 27 g3^2 = {disc}"
            )));
        }
        let (e1, e2, e3) = cubic_roots(g2, g3)?;
        let m = (e2 - e3) / (e1 - e3);
        let omega1 = carlson_rf(0.0, e1 - e2, e1 - e3)?;
        Ok(Self { g2, g3, disc, e1, e2, e3, omega1, m })
    }

    /// Distance from `x` to the nearest lattice point 2 k omega1.
    fn lattice_distance(&self, x: f64) -> f64 {
        let period = 2.0 * self.omega1;
        let r = x.rem_euclid(period);
        r.min(period - r)
    }

    /// Cubic 4(x-e1)(x-e2)(x-e3) in factored form; equals 4x^3 - g2 x - g3
    /// without the cancellation the expanded form suffers near e1.
    pub fn cubic(&self, x: f64) -> f64 {
        4.0 * (x - self.e1) * (x - self.e2) * (x - self.e3)
    }
}

/// Guard radius around lattice points, relative to the half-period.
const POLE_GUARD: f64 = 1e-9;

/// Weierstrass p(x) on the real line, reduced modulo the period 2 omega1.
///
/// Even about omega1, decreasing from +inf to e1 on (0, omega1]. Errors with
/// `Pole` inside the guard radius 1e-9 * omega1 of a lattice point.
pub fn weierstrass_p(x: f64, ctx: &EllipticContext) -> Result<f64> {
    if ctx.lattice_distance(x) < POLE_GUARD * ctx.omega1 {
        return Err(Error::Pole { x });
    }
    let xr = x.rem_euclid(2.0 * ctx.omega1);
    let scale = (ctx.e1 - ctx.e3).sqrt();
    let (sn, _, _) = jacobi_elliptic(xr * scale, ctx.m)?;
    Ok(ctx.e3 + (ctx.e1 - ctx.e3) / (sn * sn))
}

/// Derivative p'(x), fixed to the branch -sqrt(4p^3 - g2 p - g3) on
/// (0, omega1) where p decreases, +sqrt on (omega1, 2 omega1).
pub fn weierstrass_p_prime(x: f64, ctx: &EllipticContext) -> Result<f64> {
    if ctx.lattice_distance(x) < POLE_GUARD * ctx.omega1 {
        return Err(Error::Pole { x });
    }
    let p = weierstrass_p(x, ctx)?;
    // Rounding can push 4(p-e1)(p-e2)(p-e3) barely negative at the
    // half-period where it vanishes.
    let mag = ctx.cubic(p).max(0.0).sqrt();
    let xr = x.rem_euclid(2.0 * ctx.omega1);
    Ok(if xr <= ctx.omega1 { -mag } else { mag })
}

/// Inverse of p on the real period: p_inv(u) = R_F(u-e1, u-e2, u-e3),
/// mapping [e1, inf) onto (0, omega1], decreasing.
pub fn weierstrass_p_inv(u: f64, ctx: &EllipticContext) -> Result<f64> {
    if u < ctx.e1 {
        return Err(Error::Domain(format!(
            "weierstrass_p_inv: u = {u} below e1 = {}",
            ctx.e1
        )));
    }
    carlson_rf(u - ctx.e1, u - ctx.e2, u - ctx.e3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn rf_trivial_and_symmetric() {
        assert!((carlson_rf(1.0, 1.0, 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((carlson_rf(0.0, 1.0, 1.0).unwrap() - FRAC_PI_2).abs() < 1e-13);
        let reference = carlson_rf(0.3, 1.7, 2.4).unwrap();
        for (x, y, z) in [
            (0.3, 2.4, 1.7),
            (1.7, 0.3, 2.4),
            (1.7, 2.4, 0.3),
            (2.4, 0.3, 1.7),
            (2.4, 1.7, 0.3),
        ] {
            assert!((carlson_rf(x, y, z).unwrap() - reference).abs() <= 1e-13 * reference);
        }
    }

    #[test]
    fn rf_rejects_bad_arguments() {
        assert!(carlson_rf(-1.0, 1.0, 1.0).is_err());
        assert!(carlson_rf(0.0, 0.0, 1.0).is_err());
        assert!(carlson_rf(f64::INFINITY, 1.0, 1.0).is_err());
    }

    #[test]
    fn discriminant_reference_values() {
        assert_eq!(discriminant(4.0, 0.0), 64.0);
        assert_eq!(discriminant(0.0, 1.0), -27.0);
        assert_eq!(discriminant(3.0, 1.0), 0.0);
    }

    #[test]
    fn cubic_roots_lemniscatic() {
        let (e1, e2, e3) = cubic_roots(4.0, 0.0).unwrap();
        assert!((e1 - 1.0).abs() < 1e-14);
        assert!(e2.abs() < 1e-14);
        assert!((e3 + 1.0).abs() < 1e-14);
    }

    #[test]
    fn cubic_roots_closed_form_factoring() {
        // 4s^3 - 3s = s(4s^2 - 3): roots 0, +-sqrt(3)/2.
        let (e1, e2, e3) = cubic_roots(3.0, 0.0).unwrap();
        let r = 3.0f64.sqrt() / 2.0;
        assert!((e1 - r).abs() < 1e-14);
        assert!(e2.abs() < 1e-14);
        assert!((e3 + r).abs() < 1e-14);
    }

    #[test]
    fn cubic_roots_sum_and_residual() {
        let (e1, e2, e3) = cubic_roots(5.0, 1.0).unwrap();
        assert!((e1 + e2 + e3).abs() < 1e-12);
        for e in [e1, e2, e3] {
            assert!((4.0 * e * e * e - 5.0 * e - 1.0).abs() < 1e-12);
        }
        assert!(cubic_roots(0.0, 1.0).is_err());
    }

    #[test]
    fn complete_k_trivial_and_monotone() {
        assert!((complete_k(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let k05 = complete_k(0.5).unwrap();
        let k09 = complete_k(0.9).unwrap();
        assert!(k09 > k05 && k05 > complete_k(0.0).unwrap());
        assert!(complete_k(1.0).is_err());
        assert!(complete_k(-0.1).is_err());
    }

    #[test]
    fn sn_degenerations() {
        assert_eq!(jacobi_sn(0.0, 0.5).unwrap(), 0.0);
        // m = 0 reduces to the circular sine.
        assert!((jacobi_sn(0.7, 0.0).unwrap() - 0.644217687237691).abs() < 1e-15);
        // Quarter-period identity sn(K) = 1.
        let k = complete_k(0.5).unwrap();
        assert!((jacobi_sn(k, 0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!(jacobi_sn(0.3, 1.0).is_err());
    }

    #[test]
    fn sn_is_odd_and_periodic() {
        let k = complete_k(0.3).unwrap();
        for &u in &[0.2, 0.9, 1.7, 2.6] {
            let s = jacobi_sn(u, 0.3).unwrap();
            assert!((s + jacobi_sn(-u, 0.3).unwrap()).abs() < 1e-13);
            assert!((s - jacobi_sn(u + 4.0 * k, 0.3).unwrap()).abs() < 1e-11);
        }
    }

    #[test]
    fn context_invariants() {
        for (g2, g3) in [(4.0, 0.0), (5.0, 1.0), (8.0, 2.0)] {
            let ctx = EllipticContext::new(g2, g3).unwrap();
            assert!(ctx.disc > 0.0);
            assert!(ctx.e1 > ctx.e2 && ctx.e2 > ctx.e3);
            assert!((ctx.e1 + ctx.e2 + ctx.e3).abs() < 1e-12);
            for e in [ctx.e1, ctx.e2, ctx.e3] {
                assert!((4.0 * e * e * e - g2 * e - g3).abs() < 1e-12);
            }
            assert!((0.0..1.0).contains(&ctx.m));
            // omega1 agrees with K(m)/sqrt(e1 - e3), the Jacobi-reduction form.
            let alt = complete_k(ctx.m).unwrap() / (ctx.e1 - ctx.e3).sqrt();
            assert!((ctx.omega1 - alt).abs() < 1e-12 * ctx.omega1);
        }
        assert!(EllipticContext::new(0.0, 1.0).is_err());
    }

    #[test]
    fn p_at_half_period_is_e1() {
        let ctx = EllipticContext::new(4.0, 0.0).unwrap();
        let p = weierstrass_p(ctx.omega1, &ctx).unwrap();
        assert!((p - ctx.e1).abs() < 1e-12);
        assert!((weierstrass_p_prime(ctx.omega1, &ctx).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn p_even_about_half_period() {
        let ctx = EllipticContext::new(4.0, 0.0).unwrap();
        let a = weierstrass_p(0.5, &ctx).unwrap();
        let b = weierstrass_p(2.0 * ctx.omega1 - 0.5, &ctx).unwrap();
        assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn p_pole_guard() {
        let ctx = EllipticContext::new(4.0, 0.0).unwrap();
        assert!(matches!(weierstrass_p(1e-12, &ctx), Err(Error::Pole { .. })));
        assert!(matches!(
            weierstrass_p(2.0 * ctx.omega1 + 1e-12, &ctx),
            Err(Error::Pole { .. })
        ));
        // Just outside the guard it returns a large finite value.
        assert!(weierstrass_p(1e-6, &ctx).unwrap() > 1e10);
    }

    #[test]
    fn p_prime_identity_and_sign() {
        let ctx = EllipticContext::new(4.0, 0.0).unwrap();
        let p = weierstrass_p(0.5, &ctx).unwrap();
        let pp = weierstrass_p_prime(0.5, &ctx).unwrap();
        assert!(pp < 0.0);
        let residual = pp * pp - (4.0 * p * p * p - 4.0 * p);
        assert!(residual.abs() < 1e-8 * (p * p * p).abs().max(1.0));
        assert!(weierstrass_p_prime(2.0 * ctx.omega1 - 0.5, &ctx).unwrap() > 0.0);
    }

    #[test]
    fn p_prime_matches_finite_differences() {
        let ctx = EllipticContext::new(4.0, 0.0).unwrap();
        let x = 0.6;
        let delta = 1e-5;
        let fd = (weierstrass_p(x + delta, &ctx).unwrap()
            - weierstrass_p(x - delta, &ctx).unwrap())
            / (2.0 * delta);
        let pp = weierstrass_p_prime(x, &ctx).unwrap();
        assert!((fd - pp).abs() < 1e-5 * pp.abs().max(1.0), "fd {fd} vs {pp}");
    }

    #[test]
    fn p_inv_decreasing_tail() {
        let ctx = EllipticContext::new(4.0, 0.0).unwrap();
        assert!((weierstrass_p_inv(ctx.e1, &ctx).unwrap() - ctx.omega1).abs() < 1e-13);
        let far = weierstrass_p_inv(1e6, &ctx).unwrap();
        assert!(far < 2e-3);
        assert!(far > weierstrass_p_inv(1e7, &ctx).unwrap());
        assert!(weierstrass_p_inv(0.5, &ctx).is_err());
    }

    #[test]
    fn p_round_trips_with_its_inverse() {
        let ctx = EllipticContext::new(5.0, 1.0).unwrap();
        for i in 1..20 {
            let x = ctx.omega1 * (0.2 + 0.6 * i as f64 / 20.0);
            let u = weierstrass_p(x, &ctx).unwrap();
            let back = weierstrass_p_inv(u, &ctx).unwrap();
            assert!((back - x).abs() < 1e-10, "x {x} back {back}");
        }
        // And the other way around, u in [e1 + eps, e1 + 1e3].
        for &u in &[ctx.e1 + 1e-6, ctx.e1 + 0.5, ctx.e1 + 10.0, ctx.e1 + 1e3] {
            let x = weierstrass_p_inv(u, &ctx).unwrap();
            let fwd = weierstrass_p(x, &ctx).unwrap();
            assert!((fwd - u).abs() < 1e-10 * u.abs().max(1.0), "u {u} fwd {fwd}");
        }
    }

    #[test]
    fn sn_cn_dn_identities_random() {
        // 1000 quasi-random (u, m) pairs; same AGM pass supplies all three.
        let mut state = 0x243F6A8885A308D3u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let u = 8.0 * next() - 4.0;
            let m = 0.999 * next();
            let (sn, cn, dn) = jacobi_elliptic(u, m).unwrap();
            assert!((sn * sn + cn * cn - 1.0).abs() < 1e-12, "u {u} m {m}");
            assert!((dn * dn + m * sn * sn - 1.0).abs() < 1e-12, "u {u} m {m}");
        }
    }

    #[test]
    fn duplication_formula_across_parameter_sets() {
        // p(2x) = -2 p(x) + (p''(x) / (2 p'(x)))^2 with p'' = 6p^2 - g2/2.
        for (g2, g3) in [(4.0, 0.0), (5.0, 1.0), (8.0, 2.0)] {
            let ctx = EllipticContext::new(g2, g3).unwrap();
            for i in 0..100 {
                let x = ctx.omega1 * (0.05 + 0.40 * (i as f64 + 0.5) / 100.0);
                let p = weierstrass_p(x, &ctx).unwrap();
                let pp = weierstrass_p_prime(x, &ctx).unwrap();
                let p2 = weierstrass_p(2.0 * x, &ctx).unwrap();
                let ppp = 6.0 * p * p - g2 / 2.0;
                let rhs = -2.0 * p + (ppp / (2.0 * pp)).powi(2);
                assert!(
                    (p2 - rhs).abs() < 1e-8 * p2.abs().max(1.0),
                    "g2 {g2} g3 {g3} x {x}: {p2} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn quarter_period_values() {
        // p(omega1/2) = e1 + sqrt((e1-e2)(e1-e3)).
        let ctx = EllipticContext::new(4.0, 0.0).unwrap();
        let p = weierstrass_p(ctx.omega1 / 2.0, &ctx).unwrap();
        let expect = ctx.e1 + ((ctx.e1 - ctx.e2) * (ctx.e1 - ctx.e3)).sqrt();
        assert!((p - expect).abs() < 1e-11, "{p} vs {expect}");
        assert!((expect - (1.0 + std::f64::consts::SQRT_2)).abs() < 1e-12);
        let _ = PI;
    }
}
