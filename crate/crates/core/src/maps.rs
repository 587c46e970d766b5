//! Catalog of piecewise-monotone interval and real-line maps.
//!
//! Every map exposes the same surface: forward evaluation, the analytic
//! derivative, inverse branches indexed left to right (0-based), and its
//! branch structure. Families:
//!
//! - `renyi(r)`: x -> frac(r x) on [0, 1], r full increasing branches;
//! - `nr(r)`: the alternating fold of r x mod 1 (tent map for r = 2);
//! - `logistic`: 4 x (1 - x) on [0, 1];
//! - `chebyshev(r)`: cos(r arccos x) on [-1, 1];
//! - `lattes(g2, g3)`: the degree-2 rational map fixed by the Weierstrass
//!   duplication formula, on [e1, inf);
//! - `sn2(kappa)`: the rational map carried by the square of the Jacobi
//!   elliptic sine, on [0, 1];
//! - `cauchy_doubling`: (x^2 - 1)/(2 x) on the real line, the tangent-line
//!   form of angle doubling;
//! - `boole_lft(a, b, c, d)`: the linear fractional transformation with
//!   ad - bc = 1, c != 0, on the extended real line.
//!
//! Unbounded domains can be folded onto [0, 1] with [`compactify`]; the view
//! exposes the same trait with chain-rule derivatives.

use crate::elliptic::{discriminant, EllipticContext};
use crate::error::{Error, Result};

/// An interval with optionally infinite, optionally open ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub open_lo: bool,
    pub open_hi: bool,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, open_lo: false, open_hi: false }
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.open_lo { x > self.lo } else { x >= self.lo };
        let below = if self.open_hi { x < self.hi } else { x <= self.hi };
        above && below
    }
}

/// Catalog family tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Renyi,
    Nr,
    Logistic,
    Chebyshev,
    Lattes,
    Sn2,
    CauchyDoubling,
    BooleLft,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Renyi => "renyi",
            Family::Nr => "nr",
            Family::Logistic => "logistic",
            Family::Chebyshev => "chebyshev",
            Family::Lattes => "lattes",
            Family::Sn2 => "sn2",
            Family::CauchyDoubling => "cauchy_doubling",
            Family::BooleLft => "boole_lft",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Common surface of a piecewise-monotone map.
///
/// Branches are indexed left to right starting at 0; every operation is pure
/// and safe to call concurrently.
pub trait IntervalMap: Sync {
    fn domain(&self) -> Interval;
    fn branch_count(&self) -> usize;
    fn eval(&self, x: f64) -> Result<f64>;
    fn deriv(&self, x: f64) -> Result<f64>;
    fn inverse_branch(&self, branch: usize, y: f64) -> Result<f64>;
    /// Interior branch boundaries, ascending (fold or discontinuity points).
    fn interior_breakpoints(&self) -> Vec<f64>;
}

/// A validated catalog map.
#[derive(Debug, Clone)]
pub enum MapInstance {
    Renyi { r: u32 },
    Nr { r: u32 },
    Logistic,
    Chebyshev { r: u32 },
    Lattes { ctx: EllipticContext, crit: f64 },
    Sn2 { m: f64, crit: f64 },
    CauchyDoubling,
    BooleLft { a: f64, b: f64, c: f64, d: f64 },
}

impl MapInstance {
    pub fn renyi(r: u32) -> Result<Self> {
        validate_branches(r)?;
        Ok(MapInstance::Renyi { r })
    }

    pub fn nr(r: u32) -> Result<Self> {
        validate_branches(r)?;
        Ok(MapInstance::Nr { r })
    }

    pub fn logistic() -> Self {
        MapInstance::Logistic
    }

    pub fn chebyshev(r: u32) -> Result<Self> {
        validate_branches(r)?;
        Ok(MapInstance::Chebyshev { r })
    }

    /// Lattes-style rational map for invariants (g2, g3), discriminant > 0.
    /// The branch boundary (the single critical point of the right-decreasing
    /// / left-increasing pair) is located numerically at construction time.
    pub fn lattes(g2: f64, g3: f64) -> Result<Self> {
        if discriminant(g2, g3) <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lattes requires discriminant g2^3 - 27 g3^2 > 0, got {}",
                discriminant(g2, g3)
            )));
        }
        let ctx = EllipticContext::new(g2, g3)?;
        let crit = lattes_critical_point(&ctx)?;
        Ok(MapInstance::Lattes { ctx, crit })
    }

    /// Jacobi sn^2 map with modulus kappa in (0, 1); internally keyed by the
    /// parameter m = kappa^2.
    pub fn sn2(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "sn2 modulus kappa must lie in (0, 1), got {kappa}"
            )));
        }
        let m = kappa * kappa;
        // Fold at sn^2(K/2) = 1/(1 + k'), the unique interior critical point.
        let crit = 1.0 / (1.0 + (1.0 - m).sqrt());
        Ok(MapInstance::Sn2 { m, crit })
    }

    pub fn cauchy_doubling() -> Self {
        MapInstance::CauchyDoubling
    }

    pub fn boole_lft(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if c == 0.0 {
            return Err(Error::InvalidParameter("boole_lft requires c != 0".into()));
        }
        if (a * d - b * c - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "boole_lft requires ad - bc = 1, got {}",
                a * d - b * c
            )));
        }
        Ok(MapInstance::BooleLft { a, b, c, d })
    }

    pub fn family(&self) -> Family {
        match self {
            MapInstance::Renyi { .. } => Family::Renyi,
            MapInstance::Nr { .. } => Family::Nr,
            MapInstance::Logistic => Family::Logistic,
            MapInstance::Chebyshev { .. } => Family::Chebyshev,
            MapInstance::Lattes { .. } => Family::Lattes,
            MapInstance::Sn2 { .. } => Family::Sn2,
            MapInstance::CauchyDoubling => Family::CauchyDoubling,
            MapInstance::BooleLft { .. } => Family::BooleLft,
        }
    }

    pub fn elliptic_context(&self) -> Option<&EllipticContext> {
        match self {
            MapInstance::Lattes { ctx, .. } => Some(ctx),
            _ => None,
        }
    }

    /// True for the piecewise-linear integer-slope families whose binary
    /// orbits shed one bit per step and collapse onto dyadic fixed points.
    pub fn integer_slope(&self) -> bool {
        matches!(self, MapInstance::Renyi { .. } | MapInstance::Nr { .. })
    }

    /// Subinterval carried by branch `j`.
    pub fn branch_bounds(&self, j: usize) -> Result<(f64, f64)> {
        let r = self.branch_count();
        if j >= r {
            return Err(Error::Domain(format!("branch {j} out of range (r = {r})")));
        }
        Ok(match self {
            MapInstance::Renyi { r } | MapInstance::Nr { r } => {
                (j as f64 / *r as f64, (j as f64 + 1.0) / *r as f64)
            }
            MapInstance::Logistic => {
                if j == 0 { (0.0, 0.5) } else { (0.5, 1.0) }
            }
            MapInstance::Chebyshev { r } => {
                let rf = *r as f64;
                let theta_hi = (rf - j as f64) / rf * std::f64::consts::PI;
                let theta_lo = (rf - j as f64 - 1.0) / rf * std::f64::consts::PI;
                (theta_hi.cos(), theta_lo.cos())
            }
            MapInstance::Lattes { ctx, crit } => {
                if j == 0 { (ctx.e1, *crit) } else { (*crit, f64::INFINITY) }
            }
            MapInstance::Sn2 { crit, .. } => {
                if j == 0 { (0.0, *crit) } else { (*crit, 1.0) }
            }
            MapInstance::CauchyDoubling => {
                if j == 0 { (f64::NEG_INFINITY, 0.0) } else { (0.0, f64::INFINITY) }
            }
            MapInstance::BooleLft { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        })
    }
}

fn validate_branches(r: u32) -> Result<()> {
    if r < 1 {
        return Err(Error::InvalidParameter("branch count r must be >= 1".into()));
    }
    Ok(())
}

/// Locate the interior critical point of a Lattes map by bisection on the
/// sign change of its derivative over (e1, inf).
fn lattes_critical_point(ctx: &EllipticContext) -> Result<f64> {
    // The half-half-period value e1 + sqrt((e1-e2)(e1-e3)) seeds the bracket.
    let guess = ctx.e1 + ((ctx.e1 - ctx.e2) * (ctx.e1 - ctx.e3)).sqrt();
    let slope = |x: f64| lattes_deriv_raw(x, ctx);
    let mut lo = ctx.e1 + 0.05 * (guess - ctx.e1);
    let mut hi = guess + 4.0 * (guess - ctx.e1);
    for _ in 0..64 {
        if slope(lo) < 0.0 {
            break;
        }
        lo = ctx.e1 + 0.5 * (lo - ctx.e1);
    }
    for _ in 0..64 {
        if slope(hi) > 0.0 {
            break;
        }
        hi = ctx.e1 + 2.0 * (hi - ctx.e1);
    }
    if !(slope(lo) < 0.0 && slope(hi) > 0.0) {
        return Err(Error::RootFind("could not bracket the critical point".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Numerator of the Lattes rational function.
fn lattes_numer(x: f64, ctx: &EllipticContext) -> f64 {
    let g2 = ctx.g2;
    let g3 = ctx.g3;
    x * x * (x * x + 0.5 * g2) + 2.0 * g3 * x + (g2 / 4.0) * (g2 / 4.0)
}

fn lattes_eval_raw(x: f64, ctx: &EllipticContext) -> f64 {
    if x.abs() > 1e8 {
        // Divide through by x^3 to dodge overflow; same rational function.
        let inv = 1.0 / x;
        let n = x + 0.5 * ctx.g2 * inv + 2.0 * ctx.g3 * inv * inv
            + ctx.g2 * ctx.g2 / 16.0 * inv * inv * inv;
        let d = 4.0 - ctx.g2 * inv * inv - ctx.g3 * inv * inv * inv;
        return n / d;
    }
    lattes_numer(x, ctx) / ctx.cubic(x)
}

fn lattes_deriv_raw(x: f64, ctx: &EllipticContext) -> f64 {
    if x.abs() > 1e8 {
        // T ~ x/4 + 3 g2/(16 x); the x^-3 remainder is below rounding here.
        return 0.25 - 3.0 * ctx.g2 / (16.0 * x * x);
    }
    let n = lattes_numer(x, ctx);
    let np = 4.0 * x * x * x + ctx.g2 * x + 2.0 * ctx.g3;
    let d = ctx.cubic(x);
    let dp = 12.0 * x * x - ctx.g2;
    (np * d - n * dp) / (d * d)
}

fn sn2_numer(x: f64, m: f64) -> f64 {
    4.0 * x * (1.0 - x) * (1.0 - m * x)
}

fn sn2_eval_raw(x: f64, m: f64) -> f64 {
    let d = 1.0 - m * x * x;
    sn2_numer(x, m) / (d * d)
}

fn sn2_deriv_raw(x: f64, m: f64) -> f64 {
    let d = 1.0 - m * x * x;
    let np = 4.0 * (1.0 - 2.0 * (1.0 + m) * x + 3.0 * m * x * x);
    (np * d + 4.0 * m * x * sn2_numer(x, m)) / (d * d * d)
}

/// Bracketed Newton iteration with bisection fallback; assumes `f` is
/// strictly monotone on [lo, hi] and f(lo), f(hi) straddle `y`.
fn invert_monotone(
    f: &dyn Fn(f64) -> f64,
    fp: &dyn Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    y: f64,
) -> Result<f64> {
    let increasing = f(lo) < f(hi);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x) - y;
        if fx == 0.0 {
            return Ok(x);
        }
        let shrink_up = (fx > 0.0) == increasing;
        if shrink_up {
            hi = x;
        } else {
            lo = x;
        }
        let d = fp(x);
        let mut next = if d != 0.0 { x - fx / d } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if next == x || lo >= hi {
            break;
        }
        x = next;
    }
    // Final Newton polish.
    for _ in 0..3 {
        let d = fp(x);
        if d != 0.0 {
            let step = (f(x) - y) / d;
            let next = x - step;
            if next.is_finite() && next >= lo && next <= hi {
                x = next;
            }
        }
    }
    Ok(x)
}

impl IntervalMap for MapInstance {
    fn domain(&self) -> Interval {
        match self {
            MapInstance::Renyi { .. } | MapInstance::Nr { .. } | MapInstance::Logistic => {
                Interval::closed(0.0, 1.0)
            }
            MapInstance::Chebyshev { .. } => Interval::closed(-1.0, 1.0),
            MapInstance::Sn2 { .. } => Interval::closed(0.0, 1.0),
            MapInstance::Lattes { ctx, .. } => Interval {
                lo: ctx.e1,
                hi: f64::INFINITY,
                open_lo: false,
                open_hi: true,
            },
            MapInstance::CauchyDoubling | MapInstance::BooleLft { .. } => Interval {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
                open_lo: true,
                open_hi: true,
            },
        }
    }

    fn branch_count(&self) -> usize {
        match self {
            MapInstance::Renyi { r } | MapInstance::Nr { r } | MapInstance::Chebyshev { r } => {
                *r as usize
            }
            MapInstance::Logistic
            | MapInstance::Lattes { .. }
            | MapInstance::Sn2 { .. }
            | MapInstance::CauchyDoubling => 2,
            MapInstance::BooleLft { .. } => 1,
        }
    }

    fn eval(&self, x: f64) -> Result<f64> {
        if !self.domain().contains(x) && !x.is_nan() {
            // Extended-line conventions below still want +-inf through.
            if x.is_finite() {
                return Err(Error::Domain(format!(
                    "x = {x} outside the domain of {}",
                    self.family()
                )));
            }
        }
        match self {
            MapInstance::Renyi { r } => Ok((*r as f64 * x).fract()),
            MapInstance::Nr { r } => {
                let t = *r as f64 * x;
                let n = t.floor();
                let f = t - n;
                Ok(if (n as i64) % 2 == 0 { f } else { 1.0 - f })
            }
            MapInstance::Logistic => Ok(4.0 * x * (1.0 - x)),
            MapInstance::Chebyshev { r } => Ok((*r as f64 * x.acos()).cos()),
            MapInstance::Lattes { ctx, .. } => {
                if x.is_finite() && ctx.cubic(x) == 0.0 {
                    return Err(Error::Singularity { x });
                }
                Ok(lattes_eval_raw(x, ctx).max(ctx.e1))
            }
            MapInstance::Sn2 { m, .. } => Ok(sn2_eval_raw(x, *m).clamp(0.0, 1.0)),
            MapInstance::CauchyDoubling => {
                if x == 0.0 {
                    return Err(Error::Singularity { x });
                }
                Ok(0.5 * x - 0.5 / x)
            }
            MapInstance::BooleLft { a, b, c, d } => {
                if !x.is_finite() {
                    return Ok(a / c);
                }
                let den = c * x + d;
                if den == 0.0 {
                    // Declared sentinel for T(-d/c).
                    return Ok(f64::INFINITY);
                }
                if x.abs() > 1e8 {
                    let inv = 1.0 / x;
                    return Ok((a + b * inv) / (c + d * inv));
                }
                Ok((a * x + b) / den)
            }
        }
    }

    fn deriv(&self, x: f64) -> Result<f64> {
        match self {
            MapInstance::Renyi { r } | MapInstance::Nr { r } => {
                let t = *r as f64 * x;
                if t == t.floor() {
                    return Err(Error::Breakpoint { x });
                }
                if !(0.0..=1.0).contains(&x) {
                    return Err(Error::Domain(format!("x = {x} outside [0, 1]")));
                }
                let rf = *r as f64;
                match self {
                    MapInstance::Renyi { .. } => Ok(rf),
                    _ => Ok(if (t.floor() as i64) % 2 == 0 { rf } else { -rf }),
                }
            }
            MapInstance::Logistic => {
                if x == 0.5 {
                    return Err(Error::Breakpoint { x });
                }
                Ok(4.0 - 8.0 * x)
            }
            MapInstance::Chebyshev { r } => {
                if x.abs() >= 1.0 {
                    return Err(Error::Breakpoint { x });
                }
                let rf = *r as f64;
                let theta = x.acos();
                let s = theta.sin();
                if (rf * theta).sin() == 0.0 {
                    return Err(Error::Breakpoint { x });
                }
                Ok(rf * (rf * theta).sin() / s)
            }
            MapInstance::Lattes { ctx, crit } => {
                if x.is_finite() && ctx.cubic(x) == 0.0 {
                    return Err(Error::Singularity { x });
                }
                if x == *crit {
                    return Err(Error::Breakpoint { x });
                }
                Ok(lattes_deriv_raw(x, ctx))
            }
            MapInstance::Sn2 { m, crit } => {
                if x == *crit {
                    return Err(Error::Breakpoint { x });
                }
                Ok(sn2_deriv_raw(x, *m))
            }
            MapInstance::CauchyDoubling => {
                if x == 0.0 {
                    return Err(Error::Singularity { x });
                }
                Ok(0.5 + 0.5 / (x * x))
            }
            MapInstance::BooleLft { c, d, .. } => {
                let den = c * x + d;
                if den == 0.0 {
                    return Err(Error::Singularity { x });
                }
                if !x.is_finite() {
                    return Ok(0.0);
                }
                Ok(1.0 / (den * den))
            }
        }
    }

    fn inverse_branch(&self, branch: usize, y: f64) -> Result<f64> {
        let r = self.branch_count();
        if branch >= r {
            return Err(Error::OutOfImage { branch, y });
        }
        match self {
            MapInstance::Renyi { r } => {
                if !(0.0..1.0).contains(&y) {
                    return Err(Error::OutOfImage { branch, y });
                }
                Ok((y + branch as f64) / *r as f64)
            }
            MapInstance::Nr { r } => {
                if !(0.0..=1.0).contains(&y) {
                    return Err(Error::OutOfImage { branch, y });
                }
                if y == 0.0 || y == 1.0 {
                    return Err(Error::Breakpoint { x: y });
                }
                let j = branch as f64;
                Ok(if branch % 2 == 0 {
                    (y + j) / *r as f64
                } else {
                    (j + 1.0 - y) / *r as f64
                })
            }
            MapInstance::Logistic => {
                if !(0.0..=1.0).contains(&y) {
                    return Err(Error::OutOfImage { branch, y });
                }
                if y == 1.0 {
                    return Err(Error::Breakpoint { x: 0.5 });
                }
                let root = (1.0 - y).sqrt();
                Ok(if branch == 0 {
                    // (1 - sqrt(1-y))/2, rationalized to avoid cancellation.
                    y / (2.0 * (1.0 + root))
                } else {
                    0.5 * (1.0 + root)
                })
            }
            MapInstance::Chebyshev { r } => {
                if !(-1.0..=1.0).contains(&y) {
                    return Err(Error::OutOfImage { branch, y });
                }
                if y.abs() == 1.0 && *r > 1 {
                    return Err(Error::Breakpoint { x: y });
                }
                let rf = *r as f64;
                let i = (*r as usize - 1 - branch) as f64;
                let theta_y = y.acos();
                let theta = if (*r as usize - 1 - branch) % 2 == 0 {
                    (i * std::f64::consts::PI + theta_y) / rf
                } else {
                    ((i + 1.0) * std::f64::consts::PI - theta_y) / rf
                };
                Ok(theta.cos())
            }
            MapInstance::Lattes { ctx, crit } => {
                if y < ctx.e1 {
                    return Err(Error::OutOfImage { branch, y });
                }
                if y == ctx.e1 {
                    return Err(Error::Breakpoint { x: *crit });
                }
                let f = |x: f64| lattes_eval_raw(x, ctx);
                let fp = |x: f64| lattes_deriv_raw(x, ctx);
                if branch == 1 {
                    // Increasing from e1 at crit; T(x) ~ x/4 far out.
                    let mut hi = (4.0 * y).max(*crit + 1.0);
                    for _ in 0..200 {
                        if f(hi) >= y {
                            break;
                        }
                        hi *= 2.0;
                    }
                    invert_monotone(&f, &fp, *crit, hi, y)
                } else {
                    // Decreasing from +inf just right of e1 down to e1 at crit.
                    let dprime = 12.0 * ctx.e1 * ctx.e1 - ctx.g2;
                    let est = lattes_numer(ctx.e1, ctx) / (y * dprime);
                    let mut lo = ctx.e1 + 0.5 * est.max(f64::MIN_POSITIVE);
                    for _ in 0..2000 {
                        if f(lo) >= y {
                            break;
                        }
                        lo = ctx.e1 + 0.5 * (lo - ctx.e1);
                    }
                    invert_monotone(&f, &fp, lo, *crit, y)
                }
            }
            MapInstance::Sn2 { m, crit } => {
                if !(0.0..=1.0).contains(&y) {
                    return Err(Error::OutOfImage { branch, y });
                }
                if y == 1.0 {
                    return Err(Error::Breakpoint { x: *crit });
                }
                let f = |x: f64| sn2_eval_raw(x, *m);
                let fp = |x: f64| sn2_deriv_raw(x, *m);
                if branch == 0 {
                    invert_monotone(&f, &fp, 0.0, *crit, y)
                } else {
                    invert_monotone(&f, &fp, *crit, 1.0, y)
                }
            }
            MapInstance::CauchyDoubling => {
                // Roots of x^2 - 2yx - 1: product is -1, so pair the stable
                // large root with its reciprocal.
                let s = y.hypot(1.0);
                let (neg, pos) = if y >= 0.0 {
                    let xp = y + s;
                    (-1.0 / xp, xp)
                } else {
                    let xm = y - s;
                    (xm, -1.0 / xm)
                };
                Ok(if branch == 0 { neg } else { pos })
            }
            MapInstance::BooleLft { a, b, c, d } => {
                if !y.is_finite() {
                    return Ok(-d / c);
                }
                let den = a - c * y;
                if den == 0.0 {
                    return Ok(f64::INFINITY);
                }
                Ok((d * y - b) / den)
            }
        }
    }

    fn interior_breakpoints(&self) -> Vec<f64> {
        match self {
            MapInstance::Renyi { r } | MapInstance::Nr { r } => {
                (1..*r).map(|j| j as f64 / *r as f64).collect()
            }
            MapInstance::Logistic => vec![0.5],
            MapInstance::Chebyshev { r } => (1..*r)
                .rev()
                .map(|k| (k as f64 * std::f64::consts::PI / *r as f64).cos())
                .collect(),
            MapInstance::Lattes { crit, .. } => vec![*crit],
            MapInstance::Sn2 { crit, .. } => vec![*crit],
            MapInstance::CauchyDoubling => vec![0.0],
            MapInstance::BooleLft { .. } => vec![],
        }
    }
}

/// How an unbounded domain is folded onto the unit interval.
#[derive(Debug, Clone, Copy)]
enum Fold {
    /// [a, inf) via u = (x - a)/(x - a + 1).
    HalfLine { a: f64 },
    /// (-inf, inf) via u = 1/2 + x/(2 (1 + |x|)).
    RealLine,
}

/// A compactified view of an unbounded map, living on [0, 1].
///
/// The fold is a plain rational change of variables, deliberately unrelated
/// to any catalog conjugator, so densities measured in `u` coordinates stay
/// an independent check on the closed forms.
#[derive(Debug, Clone)]
pub struct CompactMap {
    inner: MapInstance,
    fold: Fold,
}

/// Fold an unbounded map onto [0, 1]; errors with `AlreadyBounded` for maps
/// whose domain needs no folding.
pub fn compactify(map: &MapInstance) -> Result<CompactMap> {
    let dom = map.domain();
    if dom.is_bounded() {
        return Err(Error::AlreadyBounded);
    }
    let fold = if dom.lo.is_finite() {
        Fold::HalfLine { a: dom.lo }
    } else {
        Fold::RealLine
    };
    Ok(CompactMap { inner: map.clone(), fold })
}

impl CompactMap {
    pub fn inner(&self) -> &MapInstance {
        &self.inner
    }

    /// Forward coordinate change x -> u in [0, 1].
    pub fn to_unit(&self, x: f64) -> f64 {
        match self.fold {
            Fold::HalfLine { a } => {
                if x.is_infinite() {
                    1.0
                } else {
                    let t = x - a;
                    t / (t + 1.0)
                }
            }
            Fold::RealLine => {
                if x == f64::INFINITY {
                    1.0
                } else if x == f64::NEG_INFINITY {
                    0.0
                } else {
                    0.5 + x / (2.0 * (1.0 + x.abs()))
                }
            }
        }
    }

    /// Inverse coordinate change u -> x.
    pub fn from_unit(&self, u: f64) -> f64 {
        match self.fold {
            Fold::HalfLine { a } => {
                if u >= 1.0 {
                    f64::INFINITY
                } else {
                    a + u / (1.0 - u)
                }
            }
            Fold::RealLine => {
                let v: f64 = 2.0 * u - 1.0;
                if v.abs() >= 1.0 {
                    if v > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY }
                } else {
                    v / (1.0 - v.abs())
                }
            }
        }
    }

    /// |du/dx| ratio u'(T(x)) / u'(x), written to avoid underflow at the ends.
    fn chain_ratio(&self, x: f64, tx: f64) -> f64 {
        match self.fold {
            Fold::HalfLine { a } => {
                let p = (x - a + 1.0) / (tx - a + 1.0);
                p * p
            }
            Fold::RealLine => {
                let p = (1.0 + x.abs()) / (1.0 + tx.abs());
                p * p
            }
        }
    }
}

impl IntervalMap for CompactMap {
    fn domain(&self) -> Interval {
        Interval::closed(0.0, 1.0)
    }

    fn branch_count(&self) -> usize {
        self.inner.branch_count()
    }

    fn eval(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Domain(format!("u = {u} outside [0, 1]")));
        }
        let x = self.from_unit(u);
        let tx = self.inner.eval(x)?;
        Ok(self.to_unit(tx).clamp(0.0, 1.0))
    }

    fn deriv(&self, u: f64) -> Result<f64> {
        let x = self.from_unit(u);
        let tx = self.inner.eval(x)?;
        let d = self.inner.deriv(x)?;
        Ok(d * self.chain_ratio(x, tx))
    }

    fn inverse_branch(&self, branch: usize, v: f64) -> Result<f64> {
        let y = self.from_unit(v);
        let x = self.inner.inverse_branch(branch, y)?;
        Ok(self.to_unit(x))
    }

    fn interior_breakpoints(&self) -> Vec<f64> {
        self.inner
            .interior_breakpoints()
            .iter()
            .map(|&x| self.to_unit(x))
            .collect()
    }
}
