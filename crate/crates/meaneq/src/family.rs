//! Construction of solution triples `(φ, f, F)` of the two mean-type
//! functional equations.
//!
//! The minus-sign equation `φ((x+y)/2)(f(x)−f(y)) = F(x)−F(y)` is solved by
//! three smooth one-parameter families (trigonometric, polynomial,
//! hyperbolic, selected by the sign of γ), by a piecewise family built from
//! a closed core interval, and by constant `f`/`F`. The plus-sign equation
//! `φ((x+y)/2)(f(x)+f(y)) = F(x)+F(y)` is solved by two-function families
//! with `F = φ·f`.

use std::sync::Arc;

use thiserror::Error;

use crate::interval::{lower_complement, midset, upper_complement, Interval};

/// A real-valued function of one variable, shareable across threads.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Treat |γ| below this as γ = 0: the trig/hyperbolic families degenerate to
/// the polynomial family there, and a hard threshold avoids cancellation.
pub const GAMMA_ZERO_EPS: f64 = 1e-12;

/// Default number of scan points used to locate poles of φ (or zeros of f).
pub const DEFAULT_SCAN_POINTS: usize = 1024;

/// Parameters `(γ, A, B, C, D, λ, μ)` of the smooth minus-equation families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyParams {
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub lambda: f64,
    pub mu: f64,
}

/// Parameters `(γ, a, b, c, d)` of the plus-equation families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct M1Params {
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Parameters of the piecewise minus-equation family: `f` takes the constant
/// values `λ_*` / `λ^*` on the tails of a closed core interval `K`, an
/// arbitrary core function on `K`, `φ` equals `A` on `½(I+K)`, and
/// `F = A·f + μ` throughout.
#[derive(Clone)]
pub struct PiecewiseParams {
    pub ambient: Interval<f64>,
    pub core: Interval<f64>,
    pub lambda_star: f64,
    pub lambda_sup: f64,
    pub a: f64,
    pub mu: f64,
    pub f_core: RealFn,
    /// Value of φ off `½(I+K)`; defaults to the constant `A` when omitted.
    pub phi_out: Option<RealFn>,
}

/// Which closed-form family a triple belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Trig,
    Poly,
    Hyper,
    Piecewise,
    Constant,
    External,
}

/// An evaluable solution triple `(φ, f, F)` on an open interval, with
/// analytic derivatives attached when the family has them.
#[derive(Clone)]
pub struct FunctionTriple {
    domain: Interval<f64>,
    phi: RealFn,
    f: RealFn,
    big_f: RealFn,
    f1: Option<RealFn>,
    f2: Option<RealFn>,
    big_f1: Option<RealFn>,
    /// Denominator of φ when φ is a ratio; used by pole-margin guards.
    phi_den: Option<RealFn>,
    kind: FamilyKind,
    plus_family: bool,
}

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("parameter matrix is singular (AD = BC)")]
    InvalidParams,
    #[error("domain must be a nonempty bounded open interval")]
    InvalidDomain,
    #[error("denominator of phi vanishes at {at} inside the domain closure")]
    PoleInDomain { at: f64 },
    #[error("f vanishes at {at} inside the domain closure")]
    ZeroInDomain { at: f64 },
    #[error("core interval must be nonempty, closed in the ambient interval, and contained in it")]
    InvalidCore,
    #[error("triple carries no analytic derivatives")]
    MissingDerivatives,
    #[error("classification grid needs at least 3 in-domain points")]
    InvalidGrid,
}

impl FunctionTriple {
    /// Assembles a triple from raw closures; derivative slots are optional.
    #[allow(clippy::too_many_arguments)]
    pub fn external(
        domain: Interval<f64>,
        phi: RealFn,
        f: RealFn,
        big_f: RealFn,
        f1: Option<RealFn>,
        f2: Option<RealFn>,
        big_f1: Option<RealFn>,
        plus_family: bool,
    ) -> Self {
        FunctionTriple {
            domain,
            phi,
            f,
            big_f,
            f1,
            f2,
            big_f1,
            phi_den: None,
            kind: FamilyKind::External,
            plus_family,
        }
    }

    pub fn domain(&self) -> &Interval<f64> {
        &self.domain
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    /// Whether the triple targets the plus-sign equation.
    pub fn is_plus_family(&self) -> bool {
        self.plus_family
    }

    pub fn phi(&self, x: f64) -> f64 {
        (self.phi)(x)
    }

    pub fn f(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn big_f(&self, x: f64) -> f64 {
        (self.big_f)(x)
    }

    pub fn f1(&self) -> Option<&RealFn> {
        self.f1.as_ref()
    }

    pub fn f2(&self) -> Option<&RealFn> {
        self.f2.as_ref()
    }

    pub fn big_f1(&self) -> Option<&RealFn> {
        self.big_f1.as_ref()
    }

    pub fn phi_den(&self) -> Option<&RealFn> {
        self.phi_den.as_ref()
    }

    pub fn has_derivatives(&self) -> bool {
        self.f1.is_some() && self.f2.is_some() && self.big_f1.is_some()
    }
}

fn domain_span(domain: &Interval<f64>) -> Result<(f64, f64), FamilyError> {
    if domain.is_empty() || domain.is_singleton() || !domain.is_bounded() {
        return Err(FamilyError::InvalidDomain);
    }
    if !(domain.lo_open() && domain.hi_open()) {
        return Err(FamilyError::InvalidDomain);
    }
    let lo = *domain.inf().unwrap().as_finite().unwrap();
    let hi = *domain.sup().unwrap().as_finite().unwrap();
    Ok((lo, hi))
}

/// Scans `g` over the closed span for sign changes or exact zeros and
/// refines any bracket by bisection. Returns a root if one lies in the
/// closure of the domain.
fn find_root_in_closure(g: &RealFn, lo: f64, hi: f64, scan_points: usize) -> Option<f64> {
    let n = scan_points.max(2);
    let step = (hi - lo) / n as f64;
    let mut prev_x = lo;
    let mut prev_v = g(lo);
    if prev_v == 0.0 {
        return Some(lo);
    }
    for i in 1..=n {
        let x = if i == n { hi } else { lo + i as f64 * step };
        let v = g(x);
        if v == 0.0 {
            return Some(x);
        }
        if prev_v.signum() != v.signum() {
            // Bisect to 1e-14 absolute bracket width.
            let (mut a, mut b) = (prev_x, x);
            let mut fa = prev_v;
            for _ in 0..200 {
                if (b - a).abs() <= 1e-14 {
                    break;
                }
                let m = 0.5 * (a + b);
                let fm = g(m);
                if fm == 0.0 {
                    return Some(m);
                }
                if fa.signum() != fm.signum() {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            return Some(0.5 * (a + b));
        }
        prev_x = x;
        prev_v = v;
    }
    None
}

fn gamma_case(gamma: f64) -> FamilyKind {
    if gamma.abs() < GAMMA_ZERO_EPS {
        FamilyKind::Poly
    } else if gamma < 0.0 {
        FamilyKind::Trig
    } else {
        FamilyKind::Hyper
    }
}

/// Builds the smooth minus-equation triple for the sign case of `γ`.
///
/// γ < 0: `f = −A cos(sx) + B sin(sx) + λ`, `F = −C cos(sx) + D sin(sx) + μ`,
/// `φ = (C sin + D cos)/(A sin + B cos)` at `s = √−γ`; γ = 0 the quadratic
/// forms `f = ½Ax² + Bx + λ`, `φ = (Cx+D)/(Ax+B)`; γ > 0 the hyperbolic
/// analogues. Analytic `f′`, `f″`, `F′` are attached.
pub fn build_family(
    params: &FamilyParams,
    domain: &Interval<f64>,
) -> Result<FunctionTriple, FamilyError> {
    build_family_with_scan(params, domain, DEFAULT_SCAN_POINTS)
}

/// [`build_family`] with an explicit pole-scan resolution.
pub fn build_family_with_scan(
    params: &FamilyParams,
    domain: &Interval<f64>,
    scan_points: usize,
) -> Result<FunctionTriple, FamilyError> {
    let (lo, hi) = domain_span(domain)?;
    let FamilyParams { gamma, a, b, c, d, lambda, mu } = *params;
    if a * d - b * c == 0.0 {
        return Err(FamilyError::InvalidParams);
    }
    let kind = gamma_case(gamma);

    let (phi, f, big_f, f1, f2, big_f1, den): (RealFn, RealFn, RealFn, RealFn, RealFn, RealFn, RealFn) =
        match kind {
            FamilyKind::Poly => (
                Arc::new(move |x| (c * x + d) / (a * x + b)),
                Arc::new(move |x| 0.5 * a * x * x + b * x + lambda),
                Arc::new(move |x| 0.5 * c * x * x + d * x + mu),
                Arc::new(move |x| a * x + b),
                Arc::new(move |_| a),
                Arc::new(move |x| c * x + d),
                Arc::new(move |x| a * x + b),
            ),
            FamilyKind::Trig => {
                let s = (-gamma).sqrt();
                (
                    Arc::new(move |x| {
                        (c * (s * x).sin() + d * (s * x).cos()) / (a * (s * x).sin() + b * (s * x).cos())
                    }),
                    Arc::new(move |x| -a * (s * x).cos() + b * (s * x).sin() + lambda),
                    Arc::new(move |x| -c * (s * x).cos() + d * (s * x).sin() + mu),
                    Arc::new(move |x| s * (a * (s * x).sin() + b * (s * x).cos())),
                    Arc::new(move |x| s * s * (a * (s * x).cos() - b * (s * x).sin())),
                    Arc::new(move |x| s * (c * (s * x).sin() + d * (s * x).cos())),
                    Arc::new(move |x| a * (s * x).sin() + b * (s * x).cos()),
                )
            }
            FamilyKind::Hyper => {
                let s = gamma.sqrt();
                (
                    Arc::new(move |x| {
                        (c * (s * x).sinh() + d * (s * x).cosh())
                            / (a * (s * x).sinh() + b * (s * x).cosh())
                    }),
                    Arc::new(move |x| a * (s * x).cosh() + b * (s * x).sinh() + lambda),
                    Arc::new(move |x| c * (s * x).cosh() + d * (s * x).sinh() + mu),
                    Arc::new(move |x| s * (a * (s * x).sinh() + b * (s * x).cosh())),
                    Arc::new(move |x| s * s * (a * (s * x).cosh() + b * (s * x).sinh())),
                    Arc::new(move |x| s * (c * (s * x).sinh() + d * (s * x).cosh())),
                    Arc::new(move |x| a * (s * x).sinh() + b * (s * x).cosh()),
                )
            }
            _ => unreachable!(),
        };

    if let Some(at) = find_root_in_closure(&den, lo, hi, scan_points) {
        return Err(FamilyError::PoleInDomain { at });
    }

    Ok(FunctionTriple {
        domain: domain.clone(),
        phi,
        f,
        big_f,
        f1: Some(f1),
        f2: Some(f2),
        big_f1: Some(big_f1),
        phi_den: Some(den),
        kind,
        plus_family: false,
    })
}

/// Builds the plus-equation triple: `f` and `F` span the sign case's basis,
/// `φ = F/f`, and `F = φ·f` holds pointwise. `f` must be nowhere zero.
pub fn build_m1(params: &M1Params, domain: &Interval<f64>) -> Result<FunctionTriple, FamilyError> {
    build_m1_with_scan(params, domain, DEFAULT_SCAN_POINTS)
}

/// [`build_m1`] with an explicit zero-scan resolution.
pub fn build_m1_with_scan(
    params: &M1Params,
    domain: &Interval<f64>,
    scan_points: usize,
) -> Result<FunctionTriple, FamilyError> {
    let (lo, hi) = domain_span(domain)?;
    let M1Params { gamma, a, b, c, d } = *params;
    if a * d - b * c == 0.0 {
        return Err(FamilyError::InvalidParams);
    }
    let kind = gamma_case(gamma);

    let (f, big_f, f1, f2, big_f1): (RealFn, RealFn, RealFn, RealFn, RealFn) = match kind {
        FamilyKind::Poly => (
            Arc::new(move |x| a * x + b),
            Arc::new(move |x| c * x + d),
            Arc::new(move |_| a),
            Arc::new(move |_| 0.0),
            Arc::new(move |_| c),
        ),
        FamilyKind::Trig => {
            let s = (-gamma).sqrt();
            (
                Arc::new(move |x| a * (s * x).sin() + b * (s * x).cos()),
                Arc::new(move |x| c * (s * x).sin() + d * (s * x).cos()),
                Arc::new(move |x| s * (a * (s * x).cos() - b * (s * x).sin())),
                Arc::new(move |x| -s * s * (a * (s * x).sin() + b * (s * x).cos())),
                Arc::new(move |x| s * (c * (s * x).cos() - d * (s * x).sin())),
            )
        }
        FamilyKind::Hyper => {
            let s = gamma.sqrt();
            (
                Arc::new(move |x| a * (s * x).sinh() + b * (s * x).cosh()),
                Arc::new(move |x| c * (s * x).sinh() + d * (s * x).cosh()),
                Arc::new(move |x| s * (a * (s * x).cosh() + b * (s * x).sinh())),
                Arc::new(move |x| s * s * (a * (s * x).sinh() + b * (s * x).cosh())),
                Arc::new(move |x| s * (c * (s * x).cosh() + d * (s * x).sinh())),
            )
        }
        _ => unreachable!(),
    };

    if let Some(at) = find_root_in_closure(&f, lo, hi, scan_points) {
        return Err(FamilyError::ZeroInDomain { at });
    }

    let phi: RealFn = {
        let f = f.clone();
        let big_f = big_f.clone();
        Arc::new(move |x| big_f(x) / f(x))
    };

    Ok(FunctionTriple {
        domain: domain.clone(),
        phi,
        f: f.clone(),
        big_f,
        f1: Some(f1),
        f2: Some(f2),
        big_f1: Some(big_f1),
        phi_den: Some(f),
        kind,
        plus_family: true,
    })
}

/// Builds the piecewise minus-equation triple.
///
/// `f = λ_*` below the core, `f_core` on it, `λ^*` above; `φ = A` on
/// `½(I+K)` and `phi_out` elsewhere; `F = A·f + μ`. The equation holds with
/// no continuity or boundary-matching requirement on `f_core`.
pub fn build_piecewise(pw: &PiecewiseParams) -> Result<FunctionTriple, FamilyError> {
    if pw.ambient.is_empty() {
        return Err(FamilyError::InvalidDomain);
    }
    if pw.core.is_empty()
        || !pw.core.is_subset_of(&pw.ambient)
        || !pw.core.is_closed_in(&pw.ambient)
    {
        return Err(FamilyError::InvalidCore);
    }

    let below = lower_complement(&pw.core, &pw.ambient);
    let above = upper_complement(&pw.core, &pw.ambient);
    let plateau = midset(&pw.ambient, &pw.core);

    let (lambda_star, lambda_sup, a, mu) = (pw.lambda_star, pw.lambda_sup, pw.a, pw.mu);
    let f_core = pw.f_core.clone();
    let f: RealFn = Arc::new(move |x| {
        if below.contains(&x) {
            lambda_star
        } else if above.contains(&x) {
            lambda_sup
        } else {
            f_core(x)
        }
    });
    let phi_out = pw.phi_out.clone().unwrap_or_else(|| {
        let level = a;
        Arc::new(move |_| level) as RealFn
    });
    let phi: RealFn = Arc::new(move |x| if plateau.contains(&x) { a } else { phi_out(x) });
    let big_f: RealFn = {
        let f = f.clone();
        Arc::new(move |x| a * f(x) + mu)
    };

    Ok(FunctionTriple {
        domain: pw.ambient.clone(),
        phi,
        f,
        big_f,
        f1: None,
        f2: None,
        big_f1: None,
        phi_den: None,
        kind: FamilyKind::Piecewise,
        plus_family: false,
    })
}

/// Builds the constant solution: `f ≡ c_f`, `F ≡ c_F`, `φ` arbitrary.
pub fn build_constant(c_f: f64, c_big_f: f64, phi: RealFn, domain: Interval<f64>) -> FunctionTriple {
    FunctionTriple {
        domain,
        phi,
        f: Arc::new(move |_| c_f),
        big_f: Arc::new(move |_| c_big_f),
        f1: Some(Arc::new(|_| 0.0)),
        f2: Some(Arc::new(|_| 0.0)),
        big_f1: Some(Arc::new(|_| 0.0)),
        phi_den: None,
        kind: FamilyKind::Constant,
        plus_family: false,
    }
}

/// Result of fitting `f″ = γ·f + c` on a grid.
#[derive(Clone, Copy, Debug)]
pub struct OdeClassification {
    pub gamma_est: f64,
    pub max_defect: f64,
}

/// Estimates the second-order coefficient γ from the analytic derivatives:
/// regresses `f″` against `(f, 1)` and reports the worst fit defect.
pub fn ode_classify(triple: &FunctionTriple, grid: &[f64]) -> Result<OdeClassification, FamilyError> {
    let f2 = triple.f2().ok_or(FamilyError::MissingDerivatives)?;
    if grid.len() < 3 || grid.iter().any(|x| !triple.domain.contains(x)) {
        return Err(FamilyError::InvalidGrid);
    }
    let n = grid.len() as f64;
    let fs: Vec<f64> = grid.iter().map(|&x| triple.f(x)).collect();
    let d2s: Vec<f64> = grid.iter().map(|&x| f2(x)).collect();
    let mean_f = fs.iter().sum::<f64>() / n;
    let mean_d2 = d2s.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (f, d2) in fs.iter().zip(&d2s) {
        cov += (f - mean_f) * (d2 - mean_d2);
        var += (f - mean_f) * (f - mean_f);
    }
    let gamma_est = if var > 0.0 { cov / var } else { 0.0 };
    let intercept = mean_d2 - gamma_est * mean_f;
    let max_defect = fs
        .iter()
        .zip(&d2s)
        .map(|(f, d2)| (d2 - (gamma_est * f + intercept)).abs())
        .fold(0.0, f64::max);
    Ok(OdeClassification { gamma_est, max_defect })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let step = (hi - lo) / n as f64;
        (0..n).map(|i| lo + (i as f64 + 0.5) * step).collect()
    }

    #[test]
    fn poly_family_is_aczel_case() {
        // γ=0, (A,B,C,D)=(0,1,1,0): f(x)=x, φ(x)=x, F(x)=x²/2.
        let p = FamilyParams { gamma: 0.0, a: 0.0, b: 1.0, c: 1.0, d: 0.0, lambda: 0.0, mu: 0.0 };
        let t = build_family(&p, &Interval::open(-5.0, 5.0)).unwrap();
        assert_eq!(t.kind(), FamilyKind::Poly);
        for x in grid(-5.0, 5.0, 17) {
            assert_eq!(t.f(x), x);
            assert_eq!(t.phi(x), x);
            assert!((t.big_f(x) - 0.5 * x * x).abs() < 1e-15);
        }
    }

    #[test]
    fn hyper_family_cosh_sinh_coth() {
        let p = FamilyParams { gamma: 1.0, a: 1.0, b: 0.0, c: 0.0, d: 1.0, lambda: 0.0, mu: 0.0 };
        let t = build_family(&p, &Interval::open(0.5, 3.0)).unwrap();
        assert_eq!(t.kind(), FamilyKind::Hyper);
        for x in grid(0.5, 3.0, 17) {
            assert!((t.f(x) - x.cosh()).abs() < 1e-12);
            assert!((t.big_f(x) - x.sinh()).abs() < 1e-12);
            assert!((t.phi(x) - 1.0 / x.tanh()).abs() < 1e-12);
        }
    }

    #[test]
    fn trig_family_sin_neg_cos_tan() {
        let p = FamilyParams { gamma: -1.0, a: 0.0, b: 1.0, c: 1.0, d: 0.0, lambda: 0.0, mu: 0.0 };
        let t = build_family(&p, &Interval::open(0.2, 1.4)).unwrap();
        assert_eq!(t.kind(), FamilyKind::Trig);
        for x in grid(0.2, 1.4, 17) {
            assert!((t.f(x) - x.sin()).abs() < 1e-12);
            assert!((t.big_f(x) + x.cos()).abs() < 1e-12);
            assert!((t.phi(x) - x.tan()).abs() < 1e-12);
        }
    }

    #[test]
    fn pole_inside_domain_is_rejected() {
        // tan has a pole at π/2 ≈ 1.5708; (0.2, 1.6) covers it.
        let p = FamilyParams { gamma: -1.0, a: 0.0, b: 1.0, c: 1.0, d: 0.0, lambda: 0.0, mu: 0.0 };
        match build_family(&p, &Interval::open(0.2, 1.6)) {
            Err(FamilyError::PoleInDomain { at }) => {
                assert!((at - std::f64::consts::FRAC_PI_2).abs() < 1e-9)
            }
            other => panic!("expected pole rejection, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let p = FamilyParams { gamma: 0.0, a: 1.0, b: 2.0, c: 2.0, d: 4.0, lambda: 0.0, mu: 0.0 };
        assert!(matches!(
            build_family(&p, &Interval::open(0.0, 1.0)),
            Err(FamilyError::InvalidParams)
        ));
    }

    #[test]
    fn unbounded_or_closed_domains_are_rejected() {
        let p = FamilyParams { gamma: 0.0, a: 0.0, b: 1.0, c: 1.0, d: 0.0, lambda: 0.0, mu: 0.0 };
        assert!(matches!(
            build_family(&p, &Interval::all()),
            Err(FamilyError::InvalidDomain)
        ));
        assert!(matches!(
            build_family(&p, &Interval::closed(0.0, 1.0)),
            Err(FamilyError::InvalidDomain)
        ));
    }

    #[test]
    fn m1_linear_case() {
        // γ=0, (a,b,c,d)=(1,1,0,1): f = x+1, F = 1, φ = 1/(x+1).
        let p = M1Params { gamma: 0.0, a: 1.0, b: 1.0, c: 0.0, d: 1.0 };
        let t = build_m1(&p, &Interval::open(0.0, 5.0)).unwrap();
        assert!(t.is_plus_family());
        for x in grid(0.0, 5.0, 9) {
            assert_eq!(t.f(x), x + 1.0);
            assert_eq!(t.big_f(x), 1.0);
            assert!((t.phi(x) - 1.0 / (x + 1.0)).abs() < 1e-15);
            // F = φ·f pointwise.
            assert!((t.big_f(x) - t.phi(x) * t.f(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn m1_hyperbolic_and_trig_cases() {
        let hyper = build_m1(
            &M1Params { gamma: 1.0, a: 0.0, b: 1.0, c: 1.0, d: 0.0 },
            &Interval::open(-1.0, 1.0),
        )
        .unwrap();
        let trig = build_m1(
            &M1Params { gamma: -1.0, a: 0.0, b: 1.0, c: 1.0, d: 0.0 },
            &Interval::open(-1.0, 1.0),
        )
        .unwrap();
        for x in grid(-1.0, 1.0, 17) {
            assert!((hyper.f(x) - x.cosh()).abs() < 1e-12);
            assert!((hyper.big_f(x) - x.sinh()).abs() < 1e-12);
            assert!((hyper.phi(x) - x.tanh()).abs() < 1e-12);
            assert!((trig.f(x) - x.cos()).abs() < 1e-12);
            assert!((trig.big_f(x) - x.sin()).abs() < 1e-12);
            assert!((trig.phi(x) - x.tan()).abs() < 1e-12);
        }
    }

    #[test]
    fn m1_rejects_zero_of_f_in_domain() {
        // f = x−1 vanishes at 1.
        let p = M1Params { gamma: 0.0, a: 1.0, b: -1.0, c: 0.0, d: 1.0 };
        match build_m1(&p, &Interval::open(0.0, 2.0)) {
            Err(FamilyError::ZeroInDomain { at }) => assert!((at - 1.0).abs() < 1e-9),
            other => panic!("expected zero rejection, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn piecewise_hand_example() {
        let pw = PiecewiseParams {
            ambient: Interval::open(0.0, 10.0),
            core: Interval::closed(4.0, 6.0),
            lambda_star: 1.0,
            lambda_sup: 2.0,
            a: 3.0,
            mu: 0.0,
            f_core: Arc::new(|x| x * x),
            phi_out: Some(Arc::new(|x: f64| x.sin())),
        };
        let t = build_piecewise(&pw).unwrap();
        assert_eq!(t.kind(), FamilyKind::Piecewise);
        // φ(5) = 3 because 5 ∈ ½(I+K) = (2,8); f(1)=1, f(9)=2, F(1)=3, F(9)=6.
        assert_eq!(t.phi(5.0), 3.0);
        assert_eq!(t.f(1.0), 1.0);
        assert_eq!(t.f(9.0), 2.0);
        assert_eq!(t.big_f(1.0), 3.0);
        assert_eq!(t.big_f(9.0), 6.0);
        assert_eq!(t.phi(5.0) * (t.f(1.0) - t.f(9.0)) - (t.big_f(1.0) - t.big_f(9.0)), 0.0);
        // On the core f is the core function; off the plateau φ = sin.
        assert_eq!(t.f(5.0), 25.0);
        assert_eq!(t.phi(1.0), 1.0f64.sin());
    }

    #[test]
    fn piecewise_core_equal_to_ambient() {
        let i = Interval::open(0.0, 10.0);
        let pw = PiecewiseParams {
            ambient: i.clone(),
            core: i.clone(),
            lambda_star: 0.0,
            lambda_sup: 0.0,
            a: 2.0,
            mu: 1.0,
            f_core: Arc::new(|x| x.exp()),
            phi_out: None,
        };
        let t = build_piecewise(&pw).unwrap();
        for x in grid(0.0, 10.0, 9) {
            assert_eq!(t.f(x), x.exp());
            assert_eq!(t.phi(x), 2.0);
            assert_eq!(t.big_f(x), 2.0 * x.exp() + 1.0);
        }
    }

    #[test]
    fn piecewise_rejects_bad_core() {
        let i = Interval::open(0.0, 10.0);
        let open_core = PiecewiseParams {
            ambient: i.clone(),
            core: Interval::open(4.0, 6.0),
            lambda_star: 0.0,
            lambda_sup: 0.0,
            a: 1.0,
            mu: 0.0,
            f_core: Arc::new(|x| x),
            phi_out: None,
        };
        assert!(matches!(build_piecewise(&open_core), Err(FamilyError::InvalidCore)));
        let outside = PiecewiseParams {
            core: Interval::closed(9.0, 11.0),
            ..open_core
        };
        assert!(matches!(build_piecewise(&outside), Err(FamilyError::InvalidCore)));
    }

    #[test]
    fn constant_triple_evaluates() {
        let t = build_constant(0.0, 7.0, Arc::new(|x: f64| x.exp()), Interval::open(0.0, 1.0));
        assert_eq!(t.f(0.5), 0.0);
        assert_eq!(t.big_f(0.5), 7.0);
        assert_eq!(t.phi(0.5), 0.5f64.exp());
        assert!(t.has_derivatives());
    }

    #[test]
    fn ode_classification_recovers_gamma() {
        let dom = Interval::open(0.2, 1.4);
        let g = grid(0.2, 1.4, 41);

        let poly = build_family(
            &FamilyParams { gamma: 0.0, a: 1.0, b: 0.5, c: 0.0, d: 1.0, lambda: 0.3, mu: 0.0 },
            &dom,
        )
        .unwrap();
        let r = ode_classify(&poly, &g).unwrap();
        assert!(r.gamma_est.abs() < 1e-12, "gamma_est = {}", r.gamma_est);
        assert!(r.max_defect <= 1e-12);

        let hyper = build_family(
            &FamilyParams { gamma: 1.0, a: 1.0, b: 0.2, c: 0.1, d: 1.0, lambda: -0.4, mu: 0.2 },
            &dom,
        )
        .unwrap();
        let r = ode_classify(&hyper, &g).unwrap();
        assert!((r.gamma_est - 1.0).abs() < 1e-10, "gamma_est = {}", r.gamma_est);

        // γ=−4 doubles the frequency; keep the domain clear of the φ-pole
        // near x ≈ 0.93.
        let trig = build_family(
            &FamilyParams { gamma: -4.0, a: 0.3, b: 1.0, c: 1.0, d: 0.1, lambda: 0.5, mu: -0.1 },
            &Interval::open(0.2, 0.85),
        )
        .unwrap();
        let r = ode_classify(&trig, &grid(0.2, 0.85, 41)).unwrap();
        assert!((r.gamma_est + 4.0).abs() < 1e-10, "gamma_est = {}", r.gamma_est);
    }

    #[test]
    fn ode_classification_requires_derivatives_and_grid() {
        let pw = PiecewiseParams {
            ambient: Interval::open(0.0, 10.0),
            core: Interval::closed(4.0, 6.0),
            lambda_star: 0.0,
            lambda_sup: 1.0,
            a: 1.0,
            mu: 0.0,
            f_core: Arc::new(|x| x),
            phi_out: None,
        };
        let t = build_piecewise(&pw).unwrap();
        assert!(matches!(
            ode_classify(&t, &[5.0, 5.5, 6.0]),
            Err(FamilyError::MissingDerivatives)
        ));

        let poly = build_family(
            &FamilyParams { gamma: 0.0, a: 1.0, b: 0.0, c: 0.0, d: 1.0, lambda: 0.0, mu: 0.0 },
            &Interval::open(1.0, 2.0),
        )
        .unwrap();
        assert!(matches!(ode_classify(&poly, &[1.5, 1.6]), Err(FamilyError::InvalidGrid)));
        assert!(matches!(
            ode_classify(&poly, &[1.5, 1.6, 9.0]),
            Err(FamilyError::InvalidGrid)
        ));
    }

    #[test]
    fn m1_matches_family_derivative_under_scaling() {
        // Replacing (a,b,c,d) by √|γ|·(A,B,C,D) makes the plus-family f equal
        // the minus-family f′ for γ = ±1; for γ = 0 the map is (A,B,C,D) itself.
        let dom = Interval::open(0.3, 1.2);
        for &gamma in &[-1.0, 1.0] {
            let fam = FamilyParams { gamma, a: 0.7, b: 1.1, c: 0.4, d: 0.9, lambda: 0.2, mu: -0.3 };
            let s = gamma.abs().sqrt();
            let m1 = M1Params { gamma, a: fam.a * s, b: fam.b * s, c: fam.c * s, d: fam.d * s };
            let t_fam = build_family(&fam, &dom).unwrap();
            let t_m1 = build_m1(&m1, &dom).unwrap();
            let f1 = t_fam.f1().unwrap();
            for x in grid(0.3, 1.2, 33) {
                assert!((f1(x) - t_m1.f(x)).abs() < 1e-12);
            }
        }
        let fam = FamilyParams { gamma: 0.0, a: 0.7, b: 1.1, c: 0.4, d: 0.9, lambda: 0.2, mu: -0.3 };
        let m1 = M1Params { gamma: 0.0, a: fam.a, b: fam.b, c: fam.c, d: fam.d };
        let t_fam = build_family(&fam, &dom).unwrap();
        let t_m1 = build_m1(&m1, &dom).unwrap();
        let f1 = t_fam.f1().unwrap();
        for x in grid(0.3, 1.2, 33) {
            assert!((f1(x) - t_m1.f(x)).abs() < 1e-12);
        }
    }
}
