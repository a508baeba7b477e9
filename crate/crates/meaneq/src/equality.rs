//! Deciding equality of Cauchy and quasi-arithmetic means.
//!
//! The two means coincide exactly when the Cauchy generators `(G, H)` are a
//! nonsingular affine image of a case basis `(ψ1, ψ2)` built from the
//! quasi-arithmetic generator Φ: `(cos, sin)∘(√−γ·Φ)` for γ < 0, `(Φ², Φ)`
//! for γ = 0, `(cosh, sinh)∘(√γ·Φ)` for γ > 0. This module constructs
//! generator pairs from such data, verifies or refutes mean equality on a
//! grid, certifies the affine relation by least squares, and recovers
//! family parameters from sampled solution triples.

use std::io::BufRead;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::checker::{interior_grid, Equation, ResidualReport};
use crate::family::{FamilyKind, FamilyParams, RealFn, GAMMA_ZERO_EPS};
use crate::fit::{least_squares, linear_regression, FitError};
use crate::interval::Interval;
use crate::means::{cauchy_mean, quasi_arithmetic_mean, GeneratorPair, MeanError, QAGenerator};

/// Case basis `(ψ1, ψ2)` with analytic derivatives, built from γ and Φ.
#[derive(Clone)]
pub struct BasisPair {
    gamma: f64,
    psi1: RealFn,
    psi2: RealFn,
    psi1_deriv: RealFn,
    psi2_deriv: RealFn,
}

/// The affine data of the generator relation: matrix rows `(A, B)` for `G`
/// and `(C, D)` for `H`, plus the additive constants `μ` (on G) and `λ`
/// (on H).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AffineSpec {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub mu: f64,
    pub lambda: f64,
}

impl AffineSpec {
    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }
}

#[derive(Debug, Error)]
pub enum EqualityError {
    #[error("matrix is singular (AD = BC)")]
    InvalidParams,
    #[error("quasi-arithmetic generator must carry an analytic derivative")]
    MissingPhiDerivative,
    #[error("basis identity violated by {defect:.3e} at {at}")]
    BasisIdentity { at: f64, defect: f64 },
    #[error("generator pair and quasi-arithmetic generator live on different domains")]
    DomainMismatch,
    #[error("grid resolution too small: {0}")]
    InvalidResolution(usize),
    #[error(transparent)]
    Mean(#[from] MeanError),
    #[error("least-squares basis is numerically singular")]
    SingularFit,
    #[error("need at least 7 equispaced finite samples: {0}")]
    InsufficientSamples(String),
    #[error("recovered coefficient matrix is degenerate (|AD−BC| = {det:.3e})")]
    DegenerateFit { det: f64 },
    #[error("malformed sample CSV: {0}")]
    BadCsv(String),
}

impl From<FitError> for EqualityError {
    fn from(e: FitError) -> Self {
        match e {
            FitError::Singular => EqualityError::SingularFit,
            FitError::ShapeMismatch => {
                EqualityError::InsufficientSamples("fit shape mismatch".into())
            }
        }
    }
}

impl BasisPair {
    /// Builds the sign-case basis from γ and Φ. Requires an analytic Φ′ and
    /// verifies the case's algebraic identity (`ψ1²+ψ2² = 1` for γ < 0,
    /// `ψ1²−ψ2² = 1` for γ > 0) on a sampled grid.
    pub fn new(gamma: f64, gen: &QAGenerator) -> Result<Self, EqualityError> {
        let phi_deriv = gen
            .phi_deriv()
            .cloned()
            .ok_or(EqualityError::MissingPhiDerivative)?;
        let phi: RealFn = {
            let gen = gen.clone();
            Arc::new(move |x| gen.phi(x))
        };
        let (psi1, psi2, psi1_deriv, psi2_deriv): (RealFn, RealFn, RealFn, RealFn) =
            if gamma.abs() < GAMMA_ZERO_EPS {
                (
                    {
                        let phi = phi.clone();
                        Arc::new(move |x| phi(x) * phi(x))
                    },
                    phi.clone(),
                    {
                        let phi = phi.clone();
                        let d = phi_deriv.clone();
                        Arc::new(move |x| 2.0 * phi(x) * d(x))
                    },
                    phi_deriv.clone(),
                )
            } else if gamma < 0.0 {
                let s = (-gamma).sqrt();
                (
                    {
                        let phi = phi.clone();
                        Arc::new(move |x| (s * phi(x)).cos())
                    },
                    {
                        let phi = phi.clone();
                        Arc::new(move |x| (s * phi(x)).sin())
                    },
                    {
                        let phi = phi.clone();
                        let d = phi_deriv.clone();
                        Arc::new(move |x| -s * (s * phi(x)).sin() * d(x))
                    },
                    {
                        let phi = phi.clone();
                        let d = phi_deriv.clone();
                        Arc::new(move |x| s * (s * phi(x)).cos() * d(x))
                    },
                )
            } else {
                let s = gamma.sqrt();
                (
                    {
                        let phi = phi.clone();
                        Arc::new(move |x| (s * phi(x)).cosh())
                    },
                    {
                        let phi = phi.clone();
                        Arc::new(move |x| (s * phi(x)).sinh())
                    },
                    {
                        let phi = phi.clone();
                        let d = phi_deriv.clone();
                        Arc::new(move |x| s * (s * phi(x)).sinh() * d(x))
                    },
                    {
                        let phi = phi.clone();
                        let d = phi_deriv.clone();
                        Arc::new(move |x| s * (s * phi(x)).cosh() * d(x))
                    },
                )
            };

        // Pointwise case identity, a cheap guard against a wrong Φ hookup.
        // The tolerance scales with ψ1²+ψ2²: the hyperbolic difference
        // cancels catastrophically once cosh grows.
        if gamma.abs() >= GAMMA_ZERO_EPS {
            for x in interior_grid(gen.domain(), 33) {
                let (p1, p2) = (psi1(x), psi2(x));
                let val = if gamma < 0.0 { p1 * p1 + p2 * p2 } else { p1 * p1 - p2 * p2 };
                let defect = (val - 1.0).abs();
                if defect > 1e-12 * (p1 * p1 + p2 * p2).max(1.0) {
                    return Err(EqualityError::BasisIdentity { at: x, defect });
                }
            }
        }

        Ok(BasisPair { gamma, psi1, psi2, psi1_deriv, psi2_deriv })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn psi1(&self, x: f64) -> f64 {
        (self.psi1)(x)
    }

    pub fn psi2(&self, x: f64) -> f64 {
        (self.psi2)(x)
    }
}

/// `G = A·ψ1 + B·ψ2 + μ`, `H = C·ψ1 + D·ψ2 + λ`, with chain-rule
/// derivatives; the pair constructor validates `H′ ≠ 0` and monotonicity of
/// `G′/H′`.
pub fn build_generators(
    spec: &AffineSpec,
    basis: &BasisPair,
    domain: &Interval<f64>,
) -> Result<GeneratorPair, EqualityError> {
    if spec.det() == 0.0 {
        return Err(EqualityError::InvalidParams);
    }
    let AffineSpec { a, b, c, d, mu, lambda } = *spec;
    let (p1, p2) = (basis.psi1.clone(), basis.psi2.clone());
    let (dp1, dp2) = (basis.psi1_deriv.clone(), basis.psi2_deriv.clone());
    let g: RealFn = {
        let (p1, p2) = (p1.clone(), p2.clone());
        Arc::new(move |x| a * p1(x) + b * p2(x) + mu)
    };
    let h: RealFn = Arc::new(move |x| c * p1(x) + d * p2(x) + lambda);
    let g1: RealFn = {
        let (dp1, dp2) = (dp1.clone(), dp2.clone());
        Arc::new(move |x| a * dp1(x) + b * dp2(x))
    };
    let h1: RealFn = Arc::new(move |x| c * dp1(x) + d * dp2(x));
    Ok(GeneratorPair::new(domain.clone(), g, h, g1, h1)?)
}

/// Scans `|C_{G,H}(x,y) − A_Φ(x,y)|` over the off-diagonal grid; the Cauchy
/// inversion runs at `tol/10`.
pub fn verify_equality(
    pair: &GeneratorPair,
    gen: &QAGenerator,
    resolution: usize,
    tol: f64,
) -> Result<ResidualReport, EqualityError> {
    if resolution < 2 {
        return Err(EqualityError::InvalidResolution(resolution));
    }
    if pair.domain() != gen.domain() {
        return Err(EqualityError::DomainMismatch);
    }
    let xs = interior_grid(pair.domain(), resolution);
    let mut max_abs = 0.0f64;
    let mut argmax = (f64::NAN, f64::NAN);
    for &x in &xs {
        for &y in &xs {
            if x == y {
                continue;
            }
            let cm = cauchy_mean(pair, x, y, tol / 10.0)?;
            let qm = quasi_arithmetic_mean(gen, x, y)?;
            let diff = (cm - qm).abs();
            if diff > max_abs {
                max_abs = diff;
                argmax = (x, y);
            }
        }
    }
    Ok(ResidualReport {
        equation: Equation::MeanEquality,
        max_abs,
        argmax,
        grid_points: resolution,
        skipped: 0,
    })
}

/// Result of fitting the affine relation for a given γ.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AffineFit {
    pub spec_est: AffineSpec,
    /// Largest pointwise deviation of G and H from their fitted forms.
    pub fit_residual: f64,
    pub condition: f64,
    /// Whether conditioning forced the orthogonalization fallback.
    pub used_qr: bool,
}

/// Least-squares fit of `(A, B, μ)` for `G` and `(C, D, λ)` for `H` against
/// the basis `{ψ1, ψ2, 1}` on a sample grid. A small residual together with
/// a nonzero determinant certifies the affine relation at this γ.
pub fn check_affine_relation(
    pair: &GeneratorPair,
    gen: &QAGenerator,
    gamma: f64,
    resolution: usize,
) -> Result<AffineFit, EqualityError> {
    if resolution < 6 {
        return Err(EqualityError::InvalidResolution(resolution));
    }
    let basis = BasisPair::new(gamma, gen)?;
    let xs = interior_grid(pair.domain(), resolution);
    let col1: Vec<f64> = xs.iter().map(|&x| basis.psi1(x)).collect();
    let col2: Vec<f64> = xs.iter().map(|&x| basis.psi2(x)).collect();
    let ones = vec![1.0; xs.len()];
    let g_samples: Vec<f64> = xs.iter().map(|&x| pair.g(x)).collect();
    let h_samples: Vec<f64> = xs.iter().map(|&x| pair.h(x)).collect();
    let g_fit = least_squares(&[&col1, &col2, &ones], &g_samples)?;
    let h_fit = least_squares(&[&col1, &col2, &ones], &h_samples)?;
    Ok(AffineFit {
        spec_est: AffineSpec {
            a: g_fit.coeffs[0],
            b: g_fit.coeffs[1],
            c: h_fit.coeffs[0],
            d: h_fit.coeffs[1],
            mu: g_fit.coeffs[2],
            lambda: h_fit.coeffs[2],
        },
        fit_residual: g_fit.max_residual.max(h_fit.max_residual),
        condition: g_fit.condition.max(h_fit.condition),
        used_qr: g_fit.used_qr || h_fit.used_qr,
    })
}

/// Diagnostics of a parameter recovery, serialized with the conventional
/// capital coefficient names.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RecoveryDiagnostics {
    pub gamma: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub lambda: f64,
    pub mu: f64,
    pub max_function_discrepancy: f64,
    pub classified_case: FamilyKind,
    /// Raw slope of the second-difference regression before refinement.
    pub stage1_gamma: f64,
    /// Classification band applied to the raw slope.
    pub eps_gamma: f64,
    /// Largest pointwise deviation of the fitted f and F from the samples.
    pub fit_residual: f64,
}

/// A recovered family with its diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct RecoveredFamily {
    pub params: FamilyParams,
    pub diagnostics: RecoveryDiagnostics,
}

/// Recovers smooth-family parameters from exact samples of `(f, F, φ)` on an
/// equispaced grid.
///
/// Stage 1 regresses second difference quotients of `f` against `f` to
/// classify the sign of γ. Stage 2 fits the case basis at frequency
/// `√|γ|`, refining γ by minimizing the fit error (the second-difference
/// estimate carries an O(h²) truncation bias). Stage 3 cross-checks the φ
/// samples against the ratio of the fitted derivatives.
pub fn recover_parameters(
    xs: &[f64],
    f_samples: &[f64],
    big_f_samples: &[f64],
    phi_samples: &[f64],
) -> Result<RecoveredFamily, EqualityError> {
    let n = xs.len();
    if n < 7 {
        return Err(EqualityError::InsufficientSamples(format!("{n} points")));
    }
    if f_samples.len() != n || big_f_samples.len() != n || phi_samples.len() != n {
        return Err(EqualityError::InsufficientSamples("length mismatch".into()));
    }
    for vals in [xs, f_samples, big_f_samples, phi_samples] {
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(EqualityError::InsufficientSamples("non-finite sample".into()));
        }
    }
    let h = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    if h <= 0.0 {
        return Err(EqualityError::InsufficientSamples("grid not increasing".into()));
    }
    for i in 1..n {
        if ((xs[i] - xs[i - 1]) - h).abs() > 1e-6 * h {
            return Err(EqualityError::InsufficientSamples("grid not equispaced".into()));
        }
    }

    // Stage 1: second difference quotients and the γ regression.
    let interior = &xs[1..n - 1];
    let f_interior: Vec<f64> = f_samples[1..n - 1].to_vec();
    let d2f: Vec<f64> = (1..n - 1)
        .map(|i| (f_samples[i + 1] - 2.0 * f_samples[i] + f_samples[i - 1]) / (h * h))
        .collect();
    let max_f = f_samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let max_d2 = d2f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mean_f = f_interior.iter().sum::<f64>() / f_interior.len() as f64;
    let spread_f = f_interior
        .iter()
        .fold(0.0f64, |m, v| m.max((v - mean_f).abs()));
    let (stage1_gamma, _stage1_intercept) =
        linear_regression(&f_interior, &d2f).unwrap_or((0.0, 0.0));
    // γ has the dimension of (second difference)/f, so the band is scaled by
    // that ratio. The second term is the rounding-noise floor of the
    // difference quotients: curvature-free samples produce pure noise there,
    // and a slope fitted to noise must still classify as γ = 0.
    let noise_floor = 64.0 * f64::EPSILON * max_f.max(1.0) / (h * h);
    let eps_gamma = if spread_f > 0.0 {
        (1e-6 * max_d2 + noise_floor) / spread_f
    } else {
        f64::INFINITY
    };
    let case = if stage1_gamma.abs() <= eps_gamma {
        FamilyKind::Poly
    } else if stage1_gamma < 0.0 {
        FamilyKind::Trig
    } else {
        FamilyKind::Hyper
    };
    let _ = interior;

    // Stage 2: basis fit at frequency √|γ|, with γ refined by minimizing the
    // fit error (exact samples make the optimum sharp).
    let fit_at = |gamma_mag: f64| -> Result<(f64, Vec<f64>, Vec<f64>), EqualityError> {
        let s = gamma_mag.sqrt();
        let (c1, c2): (Vec<f64>, Vec<f64>) = match case {
            FamilyKind::Poly => (
                xs.iter().map(|&x| 0.5 * x * x).collect(),
                xs.iter().map(|&x| x).collect(),
            ),
            FamilyKind::Trig => (
                xs.iter().map(|&x| (s * x).cos()).collect(),
                xs.iter().map(|&x| (s * x).sin()).collect(),
            ),
            FamilyKind::Hyper => (
                xs.iter().map(|&x| (s * x).cosh()).collect(),
                xs.iter().map(|&x| (s * x).sinh()).collect(),
            ),
            _ => unreachable!(),
        };
        let ones = vec![1.0; n];
        let f_fit = least_squares(&[&c1, &c2, &ones], f_samples)?;
        let big_fit = least_squares(&[&c1, &c2, &ones], big_f_samples)?;
        let sse = f_fit.max_residual.max(big_fit.max_residual);
        Ok((sse, f_fit.coeffs, big_fit.coeffs))
    };

    let gamma_mag0 = stage1_gamma.abs();
    let gamma_mag = if case == FamilyKind::Poly {
        0.0
    } else {
        // Golden-section refinement in a narrow window around the stage-1
        // estimate; the truncation bias is O(h²) relative.
        let mut lo = gamma_mag0 * (1.0 - 1e-3);
        let mut hi = gamma_mag0 * (1.0 + 1e-3);
        let phi_ratio = 0.618_033_988_749_894_9_f64;
        let mut m1 = hi - phi_ratio * (hi - lo);
        let mut m2 = lo + phi_ratio * (hi - lo);
        let mut f1 = fit_at(m1)?.0;
        let mut f2 = fit_at(m2)?.0;
        for _ in 0..80 {
            if f1 <= f2 {
                hi = m2;
                m2 = m1;
                f2 = f1;
                m1 = hi - phi_ratio * (hi - lo);
                f1 = fit_at(m1)?.0;
            } else {
                lo = m1;
                m1 = m2;
                f1 = f2;
                m2 = lo + phi_ratio * (hi - lo);
                f2 = fit_at(m2)?.0;
            }
        }
        0.5 * (lo + hi)
    };

    let (fit_residual, f_coeffs, big_coeffs) = fit_at(gamma_mag)?;
    let gamma = match case {
        FamilyKind::Poly => 0.0,
        FamilyKind::Trig => -gamma_mag,
        FamilyKind::Hyper => gamma_mag,
        _ => unreachable!(),
    };
    // Coefficient conventions per case: the trig family carries −A, −C on
    // the cosine column.
    let (a, b, lambda) = match case {
        FamilyKind::Trig => (-f_coeffs[0], f_coeffs[1], f_coeffs[2]),
        _ => (f_coeffs[0], f_coeffs[1], f_coeffs[2]),
    };
    let (c, d, mu) = match case {
        FamilyKind::Trig => (-big_coeffs[0], big_coeffs[1], big_coeffs[2]),
        _ => (big_coeffs[0], big_coeffs[1], big_coeffs[2]),
    };
    let det = a * d - b * c;
    if det.abs() < 1e-10 {
        return Err(EqualityError::DegenerateFit { det });
    }

    // Stage 3: φ cross-check against the ratio of fitted derivatives.
    let s = gamma_mag.sqrt();
    let phi_fit = |x: f64| -> f64 {
        match case {
            FamilyKind::Poly => (c * x + d) / (a * x + b),
            FamilyKind::Trig => {
                (c * (s * x).sin() + d * (s * x).cos()) / (a * (s * x).sin() + b * (s * x).cos())
            }
            FamilyKind::Hyper => {
                (c * (s * x).sinh() + d * (s * x).cosh())
                    / (a * (s * x).sinh() + b * (s * x).cosh())
            }
            _ => unreachable!(),
        }
    };
    let max_function_discrepancy = xs
        .iter()
        .zip(phi_samples)
        .map(|(&x, &p)| (phi_fit(x) - p).abs())
        .fold(0.0, f64::max);

    let params = FamilyParams { gamma, a, b, c, d, lambda, mu };
    Ok(RecoveredFamily {
        params,
        diagnostics: RecoveryDiagnostics {
            gamma,
            a,
            b,
            c,
            d,
            lambda,
            mu,
            max_function_discrepancy,
            classified_case: case,
            stage1_gamma,
            eps_gamma,
            fit_residual,
        },
    })
}

/// Reads samples from CSV with header `x,f,F,phi`.
pub fn read_samples_csv(
    reader: impl BufRead,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>), EqualityError> {
    let mut xs = Vec::new();
    let mut fs = Vec::new();
    let mut bigs = Vec::new();
    let mut phis = Vec::new();
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| EqualityError::BadCsv("empty file".into()))?
        .map_err(|e| EqualityError::BadCsv(e.to_string()))?;
    if header.trim() != "x,f,F,phi" {
        return Err(EqualityError::BadCsv(format!(
            "expected header `x,f,F,phi`, got `{}`",
            header.trim()
        )));
    }
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| EqualityError::BadCsv(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 4 {
            return Err(EqualityError::BadCsv(format!(
                "line {}: expected 4 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let mut parsed = [0.0f64; 4];
        for (slot, field) in parsed.iter_mut().zip(&fields) {
            *slot = field.trim().parse().map_err(|_| {
                EqualityError::BadCsv(format!("line {}: bad number `{field}`", lineno + 2))
            })?;
        }
        xs.push(parsed[0]);
        fs.push(parsed[1]);
        bigs.push(parsed[2]);
        phis.push(parsed[3]);
    }
    Ok((xs, fs, bigs, phis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::build_family;

    fn qa_identity(domain: Interval<f64>) -> QAGenerator {
        QAGenerator::new(
            domain,
            Arc::new(|x| x),
            Some(Arc::new(|y| y)),
            Some(Arc::new(|_| 1.0)),
        )
        .unwrap()
    }

    fn qa_log(domain: Interval<f64>) -> QAGenerator {
        QAGenerator::new(
            domain,
            Arc::new(|x: f64| x.ln()),
            Some(Arc::new(|y: f64| y.exp())),
            Some(Arc::new(|x: f64| 1.0 / x)),
        )
        .unwrap()
    }

    #[test]
    fn identity_basis_builds_arithmetic_pair() {
        let dom = Interval::open(0.1, 10.0);
        let gen = qa_identity(dom.clone());
        let basis = BasisPair::new(0.0, &gen).unwrap();
        let spec = AffineSpec { a: 1.0, b: 0.0, c: 0.0, d: 1.0, mu: 0.0, lambda: 0.0 };
        let pair = build_generators(&spec, &basis, &dom).unwrap();
        for x in interior_grid(&dom, 9) {
            assert!((pair.g(x) - x * x).abs() < 1e-12);
            assert!((pair.h(x) - x).abs() < 1e-12);
        }
    }

    #[test]
    fn log_basis_builds_geometric_pair() {
        // cosh(ln x) ± sinh(ln x) = x and 1/x; det = −2.
        let dom = Interval::open(0.1, 10.0);
        let gen = qa_log(dom.clone());
        let basis = BasisPair::new(1.0, &gen).unwrap();
        let spec = AffineSpec { a: 1.0, b: 1.0, c: 1.0, d: -1.0, mu: 0.0, lambda: 0.0 };
        assert_eq!(spec.det(), -2.0);
        let pair = build_generators(&spec, &basis, &dom).unwrap();
        for x in interior_grid(&dom, 9) {
            assert!((pair.g(x) - x).abs() < 1e-10, "G({x}) = {}", pair.g(x));
            assert!((pair.h(x) - 1.0 / x).abs() < 1e-10, "H({x}) = {}", pair.h(x));
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let dom = Interval::open(0.1, 10.0);
        let gen = qa_identity(dom.clone());
        let basis = BasisPair::new(1.0, &gen).unwrap();
        let spec = AffineSpec { a: 1.0, b: 0.0, c: 1.0, d: 0.0, mu: 0.0, lambda: 0.0 };
        assert!(matches!(
            build_generators(&spec, &basis, &dom),
            Err(EqualityError::InvalidParams)
        ));
    }

    #[test]
    fn basis_requires_analytic_phi_derivative() {
        let dom = Interval::open(0.1, 10.0);
        let gen = QAGenerator::new(dom, Arc::new(|x| x), None, None).unwrap();
        assert!(matches!(
            BasisPair::new(0.0, &gen),
            Err(EqualityError::MissingPhiDerivative)
        ));
    }

    #[test]
    fn verify_equality_arithmetic_and_geometric() {
        let dom = Interval::open(0.1, 10.0);

        let gen = qa_identity(dom.clone());
        let basis = BasisPair::new(0.0, &gen).unwrap();
        let spec = AffineSpec { a: 1.0, b: 0.0, c: 0.0, d: 1.0, mu: 0.0, lambda: 0.0 };
        let pair = build_generators(&spec, &basis, &dom).unwrap();
        let rep = verify_equality(&pair, &gen, 41, 1e-9).unwrap();
        assert!(rep.max_abs <= 1e-10, "max = {}", rep.max_abs);

        let gen = qa_log(dom.clone());
        let basis = BasisPair::new(1.0, &gen).unwrap();
        let spec = AffineSpec { a: 1.0, b: 1.0, c: 1.0, d: -1.0, mu: 0.0, lambda: 0.0 };
        let pair = build_generators(&spec, &basis, &dom).unwrap();
        let rep = verify_equality(&pair, &gen, 41, 1e-8).unwrap();
        assert!(rep.max_abs <= 1e-8, "max = {}", rep.max_abs);
    }

    #[test]
    fn affine_relation_fits_known_pairs() {
        let dom = Interval::open(0.1, 10.0);

        let gen = qa_identity(dom.clone());
        let pair = GeneratorPair::new(
            dom.clone(),
            Arc::new(|x| x * x),
            Arc::new(|x| x),
            Arc::new(|x| 2.0 * x),
            Arc::new(|_| 1.0),
        )
        .unwrap();
        let fit = check_affine_relation(&pair, &gen, 0.0, 101).unwrap();
        assert!(fit.fit_residual <= 1e-10, "residual = {}", fit.fit_residual);
        assert!((fit.spec_est.a - 1.0).abs() < 1e-8);
        assert!((fit.spec_est.d - 1.0).abs() < 1e-8);
        assert!(fit.spec_est.b.abs() < 1e-8);
        assert!(fit.spec_est.c.abs() < 1e-8);

        let gen = qa_log(dom.clone());
        let pair = GeneratorPair::new(
            dom.clone(),
            Arc::new(|x| x),
            Arc::new(|x| 1.0 / x),
            Arc::new(|_| 1.0),
            Arc::new(|x| -1.0 / (x * x)),
        )
        .unwrap();
        let fit = check_affine_relation(&pair, &gen, 1.0, 101).unwrap();
        assert!(fit.fit_residual <= 1e-9, "residual = {}", fit.fit_residual);
        assert!((fit.spec_est.a - 1.0).abs() < 1e-7);
        assert!((fit.spec_est.b - 1.0).abs() < 1e-7);
        assert!((fit.spec_est.c - 1.0).abs() < 1e-7);
        assert!((fit.spec_est.d + 1.0).abs() < 1e-7);
    }

    #[test]
    fn affine_relation_rejects_unrelated_pair() {
        // G = exp is not an affine image of {x², x, 1}.
        let dom = Interval::open(0.1, 10.0);
        let gen = qa_identity(dom.clone());
        let pair = GeneratorPair::new(
            dom.clone(),
            Arc::new(|x: f64| x.exp()),
            Arc::new(|x| x),
            Arc::new(|x: f64| x.exp()),
            Arc::new(|_| 1.0),
        )
        .unwrap();
        let fit = check_affine_relation(&pair, &gen, 0.0, 101).unwrap();
        // Measured floor ~1.9e3 on this grid; anything clearly nonzero
        // refutes the relation.
        assert!(fit.fit_residual > 1.0, "residual = {}", fit.fit_residual);
    }

    fn sample_triple(params: &FamilyParams, lo: f64, n: usize, h: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let dom = Interval::open(lo - h, lo + (n as f64) * h);
        let t = build_family(params, &dom).unwrap();
        let xs: Vec<f64> = (0..n).map(|i| lo + i as f64 * h).collect();
        let f: Vec<f64> = xs.iter().map(|&x| t.f(x)).collect();
        let big: Vec<f64> = xs.iter().map(|&x| t.big_f(x)).collect();
        let phi: Vec<f64> = xs.iter().map(|&x| t.phi(x)).collect();
        (xs, f, big, phi)
    }

    #[test]
    fn recovery_round_trip_poly() {
        let p = FamilyParams { gamma: 0.0, a: 0.0, b: 1.0, c: 1.0, d: 0.0, lambda: 0.0, mu: 0.0 };
        let (xs, f, big, phi) = sample_triple(&p, 0.001, 1001, 1e-3);
        let rec = recover_parameters(&xs, &f, &big, &phi).unwrap();
        assert_eq!(rec.diagnostics.classified_case, FamilyKind::Poly);
        assert_eq!(rec.params.gamma, 0.0);
        assert!((rec.params.a - 0.0).abs() < 1e-6);
        assert!((rec.params.b - 1.0).abs() < 1e-6);
        assert!((rec.params.c - 1.0).abs() < 1e-6);
        assert!((rec.params.d - 0.0).abs() < 1e-6);
        assert!(rec.diagnostics.max_function_discrepancy < 1e-8);
    }

    #[test]
    fn recovery_round_trip_hyper() {
        let p = FamilyParams { gamma: 2.0, a: 1.0, b: 0.3, c: 0.2, d: 1.1, lambda: 0.4, mu: -0.2 };
        let (xs, f, big, phi) = sample_triple(&p, 0.001, 1001, 1e-3);
        let rec = recover_parameters(&xs, &f, &big, &phi).unwrap();
        assert_eq!(rec.diagnostics.classified_case, FamilyKind::Hyper);
        assert!(
            (rec.params.gamma - 2.0).abs() / 2.0 < 1e-4,
            "gamma = {}",
            rec.params.gamma
        );
        assert!(rec.diagnostics.fit_residual < 1e-8);
        assert!(rec.diagnostics.max_function_discrepancy < 1e-8);
    }

    #[test]
    fn recovery_rejects_constant_samples() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64 * 1e-3).collect();
        let f = vec![2.0; 100];
        let big = vec![5.0; 100];
        let phi = vec![1.0; 100];
        assert!(matches!(
            recover_parameters(&xs, &f, &big, &phi),
            Err(EqualityError::DegenerateFit { .. }) | Err(EqualityError::SingularFit)
        ));
    }

    #[test]
    fn recovery_validates_input_shape() {
        let xs = vec![0.0, 0.1, 0.2];
        let v = vec![0.0; 3];
        assert!(matches!(
            recover_parameters(&xs, &v, &v, &v),
            Err(EqualityError::InsufficientSamples(_))
        ));
        let xs: Vec<f64> = vec![0.0, 0.1, 0.2, 0.35, 0.4, 0.5, 0.6, 0.7];
        let v = vec![0.0; 8];
        assert!(matches!(
            recover_parameters(&xs, &v, &v, &v),
            Err(EqualityError::InsufficientSamples(_))
        ));
    }

    #[test]
    fn csv_reader_round_trip() {
        let text = "x,f,F,phi\n0,1,2,3\n0.5,1.5,2.5,3.5\n";
        let (xs, f, big, phi) = read_samples_csv(text.as_bytes()).unwrap();
        assert_eq!(xs, vec![0.0, 0.5]);
        assert_eq!(f, vec![1.0, 1.5]);
        assert_eq!(big, vec![2.0, 2.5]);
        assert_eq!(phi, vec![3.0, 3.5]);
        assert!(read_samples_csv("a,b\n".as_bytes()).is_err());
        assert!(read_samples_csv("x,f,F,phi\n1,2\n".as_bytes()).is_err());
    }
}
