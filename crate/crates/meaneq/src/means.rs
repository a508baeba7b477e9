//! Two-variable quasi-arithmetic and Cauchy means.
//!
//! A quasi-arithmetic mean is `Φ⁻¹((Φ(x)+Φ(y))/2)` for a continuous strictly
//! monotone generator Φ. A Cauchy mean is `(G′/H′)⁻¹((G(x)−G(y))/(H(x)−H(y)))`
//! off the diagonal and `x` on it; it requires `H′` nonvanishing and the
//! ratio `G′/H′` invertible. The ratio inversion is a bracketed
//! bisection/secant hybrid: the solution is interior to the interval spanned
//! by the arguments, so bracketing is total.

use std::sync::Arc;

use thiserror::Error;

use crate::checker::interior_grid;
use crate::family::RealFn;
use crate::interval::Interval;

/// Hard cap on root-finder iterations before reporting failure.
const MAX_SOLVE_ITERS: usize = 200;

/// Points sampled when validating monotonicity at construction.
const MONOTONE_SCAN_POINTS: usize = 256;

/// Relative half-width of the near-diagonal guard: below it the divided
/// difference has no precision left and the midpoint is returned.
const NEAR_DIAGONAL_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

#[derive(Debug, Error)]
pub enum MeanError {
    #[error("point {0} lies outside the generator domain")]
    OutOfDomain(f64),
    #[error("generator domain must be a nonempty bounded open interval")]
    InvalidDomain,
    #[error("generator is not strictly monotone on the sampled domain")]
    NotMonotone,
    #[error("supplied inverse disagrees with the generator ({defect:.3e} at {at})")]
    InconsistentInverse { at: f64, defect: f64 },
    #[error("H' vanishes near {at} on the sampled domain")]
    VanishingDerivative { at: f64 },
    #[error("derivative ratio is not strictly monotone on the sampled domain")]
    NonInvertibleRatio,
    #[error("ratio values at the bracket ends do not enclose the target")]
    BracketFailure,
    #[error("|H(x) − H(y)| underflows for distinct arguments")]
    DegenerateH,
}

/// Generator Φ of a quasi-arithmetic mean: continuous, strictly monotone,
/// with an optional analytic inverse and optional analytic derivative.
#[derive(Clone)]
pub struct QAGenerator {
    domain: Interval<f64>,
    phi: RealFn,
    phi_inv: Option<RealFn>,
    phi_deriv: Option<RealFn>,
    direction: Monotonicity,
}

impl QAGenerator {
    /// Validates strict monotonicity on a sampled grid and, when an analytic
    /// inverse is supplied, the round trip `Φ⁻¹(Φ(x)) = x` to 1e−12 relative.
    pub fn new(
        domain: Interval<f64>,
        phi: RealFn,
        phi_inv: Option<RealFn>,
        phi_deriv: Option<RealFn>,
    ) -> Result<Self, MeanError> {
        let samples = sample_domain(&domain)?;
        let direction = monotone_direction(&phi, &samples)?;
        if let Some(inv) = &phi_inv {
            for &x in &samples {
                let back = inv(phi(x));
                let defect = (back - x).abs();
                if defect > 1e-12 * x.abs().max(1.0) {
                    return Err(MeanError::InconsistentInverse { at: x, defect });
                }
            }
        }
        Ok(QAGenerator { domain, phi, phi_inv, phi_deriv, direction })
    }

    pub fn domain(&self) -> &Interval<f64> {
        &self.domain
    }

    pub fn direction(&self) -> Monotonicity {
        self.direction
    }

    pub fn phi(&self, x: f64) -> f64 {
        (self.phi)(x)
    }

    pub fn phi_deriv(&self) -> Option<&RealFn> {
        self.phi_deriv.as_ref()
    }
}

/// Generator pair (G, H) of a Cauchy mean with analytic derivatives.
#[derive(Clone)]
pub struct GeneratorPair {
    domain: Interval<f64>,
    g: RealFn,
    h: RealFn,
    g1: RealFn,
    h1: RealFn,
    ratio_direction: Monotonicity,
}

impl GeneratorPair {
    /// Validates `H′ ≠ 0` and strict monotonicity of `G′/H′` on a sampled
    /// grid; violations fail here rather than at evaluation time.
    pub fn new(
        domain: Interval<f64>,
        g: RealFn,
        h: RealFn,
        g1: RealFn,
        h1: RealFn,
    ) -> Result<Self, MeanError> {
        let samples = sample_domain(&domain)?;
        // H' is a derivative, hence has the Darboux property: a sign change
        // between samples implies a zero in between.
        let mut prev: Option<(f64, f64)> = None;
        for &x in &samples {
            let v = h1(x);
            if v == 0.0 || !v.is_finite() {
                return Err(MeanError::VanishingDerivative { at: x });
            }
            if let Some((px, pv)) = prev {
                if pv.signum() != v.signum() {
                    return Err(MeanError::VanishingDerivative { at: 0.5 * (px + x) });
                }
            }
            prev = Some((x, v));
        }
        let ratio: RealFn = {
            let g1 = g1.clone();
            let h1 = h1.clone();
            Arc::new(move |x| g1(x) / h1(x))
        };
        let ratio_direction =
            monotone_direction(&ratio, &samples).map_err(|_| MeanError::NonInvertibleRatio)?;
        Ok(GeneratorPair { domain, g, h, g1, h1, ratio_direction })
    }

    pub fn domain(&self) -> &Interval<f64> {
        &self.domain
    }

    pub fn g(&self, x: f64) -> f64 {
        (self.g)(x)
    }

    pub fn h(&self, x: f64) -> f64 {
        (self.h)(x)
    }

    pub fn g1(&self, x: f64) -> f64 {
        (self.g1)(x)
    }

    pub fn h1(&self, x: f64) -> f64 {
        (self.h1)(x)
    }

    /// The derivative ratio `G′/H′`.
    pub fn ratio(&self, x: f64) -> f64 {
        (self.g1)(x) / (self.h1)(x)
    }

    pub fn ratio_direction(&self) -> Monotonicity {
        self.ratio_direction
    }
}

fn sample_domain(domain: &Interval<f64>) -> Result<Vec<f64>, MeanError> {
    if domain.is_empty() || domain.is_singleton() || !domain.is_bounded() {
        return Err(MeanError::InvalidDomain);
    }
    Ok(interior_grid(domain, MONOTONE_SCAN_POINTS))
}

fn monotone_direction(f: &RealFn, samples: &[f64]) -> Result<Monotonicity, MeanError> {
    let mut increasing = true;
    let mut decreasing = true;
    for w in samples.windows(2) {
        let (a, b) = (f(w[0]), f(w[1]));
        if !(a < b) {
            increasing = false;
        }
        if !(a > b) {
            decreasing = false;
        }
    }
    match (increasing, decreasing) {
        (true, false) => Ok(Monotonicity::Increasing),
        (false, true) => Ok(Monotonicity::Decreasing),
        _ => Err(MeanError::NotMonotone),
    }
}

/// `Φ⁻¹((Φ(x)+Φ(y))/2)`, clamped into `[min(x,y), max(x,y)]`.
pub fn quasi_arithmetic_mean(gen: &QAGenerator, x: f64, y: f64) -> Result<f64, MeanError> {
    for p in [x, y] {
        if !gen.domain.contains(&p) {
            return Err(MeanError::OutOfDomain(p));
        }
    }
    if x == y {
        return Ok(x);
    }
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    let target = 0.5 * (gen.phi(x) + gen.phi(y));
    let u = match &gen.phi_inv {
        Some(inv) => inv(target),
        None => {
            // Monotone bisection of Φ on the bracket; the mean value lies
            // strictly between Φ(lo) and Φ(hi).
            let phi = &gen.phi;
            solve_monotone(|u| phi(u), lo, hi, target, 1e-14 * hi.abs().max(1.0))?
        }
    };
    Ok(u.clamp(lo, hi))
}

/// The Cauchy mean: `x` on the diagonal, otherwise the unique interior
/// solution of `(G′/H′)(u) = (G(x)−G(y))/(H(x)−H(y))`.
pub fn cauchy_mean(pair: &GeneratorPair, x: f64, y: f64, tol: f64) -> Result<f64, MeanError> {
    assert!(tol > 0.0, "tolerance must be positive");
    for p in [x, y] {
        if !pair.domain.contains(&p) {
            return Err(MeanError::OutOfDomain(p));
        }
    }
    if x == y {
        return Ok(x);
    }
    // The divided difference loses all precision near the diagonal; the mean
    // value property pins the result inside the bracket anyway.
    if (x - y).abs() < NEAR_DIAGONAL_EPS * x.abs().max(1.0) {
        return Ok(0.5 * (x + y));
    }
    let dh = pair.h(x) - pair.h(y);
    if dh == 0.0 || dh.abs() < f64::MIN_POSITIVE {
        return Err(MeanError::DegenerateH);
    }
    let r = (pair.g(x) - pair.g(y)) / dh;
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    let u = solve_monotone(|u| pair.ratio(u), lo, hi, r, tol)?;
    Ok(u.clamp(lo, hi))
}

/// Bracketed bisection with secant acceleration for a monotone continuous
/// function: solves `f(u) = target` on `[lo, hi]`, keeping a sign-changing
/// bracket at every step. Stops when the bracket width reaches `tol`.
fn solve_monotone(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    target: f64,
    tol: f64,
) -> Result<f64, MeanError> {
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a) - target;
    let mut fb = f(b) - target;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        // Bracketing should be guaranteed; tolerate endpoint rounding where
        // one residual is negligibly small, otherwise the invertibility
        // assumptions are violated.
        let scale = 1e-9 * (1.0 + target.abs());
        return if fa.abs() <= scale || fb.abs() <= scale {
            Ok(if fa.abs() <= fb.abs() { a } else { b })
        } else {
            Err(MeanError::BracketFailure)
        };
    }
    let mut best = if fa.abs() < fb.abs() { a } else { b };
    let mut best_res = fa.abs().min(fb.abs());
    let mut use_secant = true;
    for _ in 0..MAX_SOLVE_ITERS {
        if (b - a).abs() <= tol {
            return Ok(best);
        }
        let mut m = if use_secant && fb != fa {
            a - fa * (b - a) / (fb - fa)
        } else {
            0.5 * (a + b)
        };
        // Reject secant points that leave the bracket.
        if !m.is_finite() || m <= a || m >= b {
            m = 0.5 * (a + b);
        }
        use_secant = !use_secant;
        let fm = f(m) - target;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.abs() < best_res {
            best_res = fm.abs();
            best = m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    Err(MeanError::BracketFailure)
}

/// Result of a mean-value-property scan.
#[derive(Clone, Copy, Debug)]
pub struct MeanValueReport {
    pub passed: bool,
    /// Largest signed violation `max(min(x,y) − M, M − max(x,y))`;
    /// negative values mean the mean stayed strictly inside.
    pub worst_violation: f64,
    pub worst_at: (f64, f64),
}

/// Checks `min(x,y) ≤ M(x,y) ≤ max(x,y)` on a `resolution × resolution`
/// grid, requiring strict inequalities whenever `|x−y| > 10·tol`.
pub fn mean_value_property_check(
    mean: impl Fn(f64, f64) -> f64,
    domain: &Interval<f64>,
    resolution: usize,
    tol: f64,
) -> MeanValueReport {
    let xs = interior_grid(domain, resolution);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_at = (f64::NAN, f64::NAN);
    let mut passed = true;
    for &x in &xs {
        for &y in &xs {
            let m = mean(x, y);
            let (lo, hi) = if x < y { (x, y) } else { (y, x) };
            let violation = (lo - m).max(m - hi);
            if violation > worst {
                worst = violation;
                worst_at = (x, y);
            }
            if violation > 0.0 {
                passed = false;
            }
            if (x - y).abs() > 10.0 * tol && x != y && violation >= 0.0 {
                // Strict mean: interior attainment required off the diagonal.
                passed = false;
            }
        }
    }
    MeanValueReport { passed, worst_violation: worst, worst_at }
}
