//! Residuals of the mean-type functional equations over points and grids.
//!
//! Three pointwise residuals (minus-sign, plus-sign, homogeneous), the
//! central-difference reduction `δ_h f(x) = f(x+h) − f(x−h)` on the shrunken
//! domain, the derivative reduction using analytic `f′`, and a deterministic
//! grid scanner with pole-margin guarding.

use serde::Serialize;
use thiserror::Error;

use crate::family::{FunctionTriple, RealFn};
use crate::interval::{shrink, Interval};

/// Which residual a report refers to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    /// `φ((x+y)/2)(f(x)−f(y)) − (F(x)−F(y))`
    Minus,
    /// `φ((x+y)/2)(f(x)+f(y)) − (F(x)+F(y))`
    Plus,
    /// `φ((x+y)/2)(f(x)−f(y))`
    Zero,
    /// Plus-sign residual of `(φ, δ_h f, φ·δ_h f)` on the shrunken domain.
    DeltaH { h: f64 },
    /// Plus-sign residual of `(φ, f′, φ·f′)`.
    Derivative,
    /// `|C_{G,H}(x,y) − A_Φ(x,y)|` (mean-equality scans).
    MeanEquality,
}

/// Maximum absolute residual over a grid, with provenance.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ResidualReport {
    pub equation: Equation,
    pub max_abs: f64,
    /// Point pair attaining the maximum (lexicographically smallest on ties).
    pub argmax: (f64, f64),
    /// Grid resolution per axis.
    pub grid_points: usize,
    /// Point pairs excluded by the pole margin.
    pub skipped: usize,
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("point {0} lies outside the domain")]
    OutOfDomain(f64),
    #[error("shrunken domain is empty for h = {h}")]
    EmptyShrunkDomain { h: f64 },
    #[error("h must be positive, got {h}")]
    NonPositiveH { h: f64 },
    #[error("triple carries no analytic f'")]
    MissingDerivatives,
    #[error("grid resolution must be at least 2, got {0}")]
    InvalidResolution(usize),
    #[error("equation {0:?} cannot be scanned on a grid of this triple")]
    UnsupportedEquation(Equation),
}

fn require_in_domain(domain: &Interval<f64>, x: f64) -> Result<(), CheckError> {
    if domain.contains(&x) {
        Ok(())
    } else {
        Err(CheckError::OutOfDomain(x))
    }
}

/// Minus-sign residual at a point pair.
pub fn residual_minus(t: &FunctionTriple, x: f64, y: f64) -> Result<f64, CheckError> {
    require_in_domain(t.domain(), x)?;
    require_in_domain(t.domain(), y)?;
    let m = 0.5 * (x + y);
    Ok(t.phi(m) * (t.f(x) - t.f(y)) - (t.big_f(x) - t.big_f(y)))
}

/// Plus-sign residual at a point pair.
pub fn residual_plus(t: &FunctionTriple, x: f64, y: f64) -> Result<f64, CheckError> {
    require_in_domain(t.domain(), x)?;
    require_in_domain(t.domain(), y)?;
    let m = 0.5 * (x + y);
    Ok(t.phi(m) * (t.f(x) + t.f(y)) - (t.big_f(x) + t.big_f(y)))
}

/// Homogeneous residual `φ((x+y)/2)(f(x)−f(y))` at a point pair.
pub fn residual_zero(
    phi: &RealFn,
    f: &RealFn,
    domain: &Interval<f64>,
    x: f64,
    y: f64,
) -> Result<f64, CheckError> {
    require_in_domain(domain, x)?;
    require_in_domain(domain, y)?;
    Ok(phi(0.5 * (x + y)) * (f(x) - f(y)))
}

/// Pointwise residual of the central-difference reduction: with
/// `δf(x) = f(x+h) − f(x−h)`,
/// `φ((x+y)/2)(δf(x)+δf(y)) − (φ(x)δf(x) + φ(y)δf(y))` for `x, y ∈ I_h`.
pub fn delta_residual(t: &FunctionTriple, h: f64, x: f64, y: f64) -> Result<f64, CheckError> {
    if h <= 0.0 {
        return Err(CheckError::NonPositiveH { h });
    }
    let inner = shrink(t.domain(), &h).expect("h checked positive");
    if inner.is_empty() {
        return Err(CheckError::EmptyShrunkDomain { h });
    }
    require_in_domain(&inner, x)?;
    require_in_domain(&inner, y)?;
    let df = |u: f64| t.f(u + h) - t.f(u - h);
    let m = 0.5 * (x + y);
    Ok(t.phi(m) * (df(x) + df(y)) - (t.phi(x) * df(x) + t.phi(y) * df(y)))
}

/// Pointwise residual of the derivative reduction:
/// `φ((x+y)/2)(f′(x)+f′(y)) − (φ(x)f′(x) + φ(y)f′(y))`.
pub fn derivative_residual(t: &FunctionTriple, x: f64, y: f64) -> Result<f64, CheckError> {
    let f1 = t.f1().ok_or(CheckError::MissingDerivatives)?;
    require_in_domain(t.domain(), x)?;
    require_in_domain(t.domain(), y)?;
    let m = 0.5 * (x + y);
    Ok(t.phi(m) * (f1(x) + f1(y)) - (t.phi(x) * f1(x) + t.phi(y) * f1(y)))
}

/// Interior-offset sample grid: `n` points `lo + (i+½)·(hi−lo)/n`, never
/// touching the (open) endpoints.
pub fn interior_grid(domain: &Interval<f64>, n: usize) -> Vec<f64> {
    let (Some(lo), Some(hi)) = (domain.inf(), domain.sup()) else {
        return Vec::new();
    };
    let (Some(&lo), Some(&hi)) = (lo.as_finite(), hi.as_finite()) else {
        return Vec::new();
    };
    let step = (hi - lo) / n as f64;
    (0..n).map(|i| lo + (i as f64 + 0.5) * step).collect()
}

/// Scans the selected residual over a uniform `resolution × resolution`
/// grid of point pairs, skipping pairs where `|denominator of φ|` falls
/// below `pole_margin` at any φ-evaluation point. Ties in the maximum keep
/// the lexicographically smallest `(x, y)`.
pub fn scan_grid(
    t: &FunctionTriple,
    equation: Equation,
    resolution: usize,
    pole_margin: f64,
) -> Result<ResidualReport, CheckError> {
    scan_grid_stream(t, equation, resolution, pole_margin, |_, _, _| {})
}

/// [`scan_grid`] that also hands every evaluated `(x, y, residual)` to a
/// sink, e.g. for CSV streaming.
pub fn scan_grid_stream(
    t: &FunctionTriple,
    equation: Equation,
    resolution: usize,
    pole_margin: f64,
    mut sink: impl FnMut(f64, f64, f64),
) -> Result<ResidualReport, CheckError> {
    if resolution < 2 {
        return Err(CheckError::InvalidResolution(resolution));
    }
    let scan_domain = match equation {
        Equation::DeltaH { h } => {
            if h <= 0.0 {
                return Err(CheckError::NonPositiveH { h });
            }
            let inner = shrink(t.domain(), &h).expect("h checked positive");
            if inner.is_empty() || inner.is_singleton() {
                return Err(CheckError::EmptyShrunkDomain { h });
            }
            inner
        }
        Equation::Derivative => {
            if t.f1().is_none() {
                return Err(CheckError::MissingDerivatives);
            }
            t.domain().clone()
        }
        Equation::Minus | Equation::Plus | Equation::Zero => t.domain().clone(),
        Equation::MeanEquality => return Err(CheckError::UnsupportedEquation(equation)),
    };
    let xs = interior_grid(&scan_domain, resolution);
    if xs.is_empty() {
        return Err(CheckError::InvalidResolution(resolution));
    }

    // Pole guard: φ is evaluated at the midpoint always, and additionally at
    // x and y for the two reduction equations.
    let guard_ends = matches!(equation, Equation::DeltaH { .. } | Equation::Derivative);
    let den_ok = |u: f64| -> bool {
        match t.phi_den() {
            Some(den) => den(u).abs() >= pole_margin,
            None => true,
        }
    };

    let mut max_abs = -1.0f64;
    let mut argmax = (f64::NAN, f64::NAN);
    let mut skipped = 0usize;
    for &x in &xs {
        for &y in &xs {
            let m = 0.5 * (x + y);
            if !den_ok(m) || (guard_ends && (!den_ok(x) || !den_ok(y))) {
                skipped += 1;
                continue;
            }
            let r = match equation {
                Equation::Minus => t.phi(m) * (t.f(x) - t.f(y)) - (t.big_f(x) - t.big_f(y)),
                Equation::Plus => t.phi(m) * (t.f(x) + t.f(y)) - (t.big_f(x) + t.big_f(y)),
                Equation::Zero => t.phi(m) * (t.f(x) - t.f(y)),
                Equation::DeltaH { h } => {
                    let df = |u: f64| t.f(u + h) - t.f(u - h);
                    t.phi(m) * (df(x) + df(y)) - (t.phi(x) * df(x) + t.phi(y) * df(y))
                }
                Equation::Derivative => {
                    let f1 = t.f1().expect("checked above");
                    t.phi(m) * (f1(x) + f1(y)) - (t.phi(x) * f1(x) + t.phi(y) * f1(y))
                }
                Equation::MeanEquality => unreachable!(),
            };
            sink(x, y, r);
            if r.abs() > max_abs {
                max_abs = r.abs();
                argmax = (x, y);
            }
        }
    }
    if max_abs < 0.0 {
        // Every pair fell inside the pole margin.
        max_abs = 0.0;
    }
    Ok(ResidualReport {
        equation,
        max_abs,
        argmax,
        grid_points: resolution,
        skipped,
    })
}

/// Scans the central-difference reduction over `I_h`.
pub fn delta_reduction_check(
    t: &FunctionTriple,
    h: f64,
    resolution: usize,
) -> Result<ResidualReport, CheckError> {
    scan_grid(t, Equation::DeltaH { h }, resolution, 0.0)
}

/// Scans the derivative reduction over the full domain.
pub fn derivative_reduction_check(
    t: &FunctionTriple,
    resolution: usize,
) -> Result<ResidualReport, CheckError> {
    scan_grid(t, Equation::Derivative, resolution, 0.0)
}
