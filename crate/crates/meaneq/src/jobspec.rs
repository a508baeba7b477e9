//! JSON job specifications: the input contract of the CLI.
//!
//! A spec file holds exactly one job. Triple kinds (`family`, `m1`,
//! `piecewise`, `constant`) build a [`FunctionTriple`] and are accepted by
//! the `check` and `family` subcommands; `quasi`/`cauchy` describe a mean
//! evaluation, `equality` a mean-equality analysis, `reflect` an interval
//! reflection job. Unknown keys are rejected.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{self, CatalogGenError};
use crate::checker::Equation;
use crate::equality::AffineSpec;
use crate::family::{
    build_constant, build_family, build_m1, build_piecewise, FamilyError, FamilyParams,
    FunctionTriple, M1Params, PiecewiseParams,
};
use crate::interval::Interval;
use crate::means::{GeneratorPair, QAGenerator};

/// Equation selector as written in spec files.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationSpec {
    Minus,
    Plus,
    Zero,
    Derivative,
    DeltaH { h: f64 },
}

impl From<EquationSpec> for Equation {
    fn from(e: EquationSpec) -> Equation {
        match e {
            EquationSpec::Minus => Equation::Minus,
            EquationSpec::Plus => Equation::Plus,
            EquationSpec::Zero => Equation::Zero,
            EquationSpec::Derivative => Equation::Derivative,
            EquationSpec::DeltaH { h } => Equation::DeltaH { h },
        }
    }
}

/// One job, tagged by `kind`.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum JobSpec {
    Family {
        gamma: f64,
        #[serde(rename = "A")]
        a: f64,
        #[serde(rename = "B")]
        b: f64,
        #[serde(rename = "C")]
        c: f64,
        #[serde(rename = "D")]
        d: f64,
        lambda: f64,
        mu: f64,
        domain: Interval<f64>,
        #[serde(default)]
        equation: Option<EquationSpec>,
    },
    M1 {
        gamma: f64,
        a: f64,
        b: f64,
        c: f64,
        d: f64,
        domain: Interval<f64>,
        #[serde(default)]
        equation: Option<EquationSpec>,
    },
    Piecewise {
        domain: Interval<f64>,
        k: Interval<f64>,
        lambda_star: f64,
        lambda_sup: f64,
        #[serde(rename = "A")]
        a: f64,
        mu: f64,
        /// Catalog name of the core function on `k`.
        f_core: String,
        /// Catalog name of φ off the plateau; constant `A` when omitted.
        #[serde(default)]
        phi_out: Option<String>,
        #[serde(default)]
        equation: Option<EquationSpec>,
    },
    Constant {
        f: f64,
        #[serde(rename = "F")]
        big_f: f64,
        /// Catalog name of the (arbitrary) φ; defaults to `identity`.
        #[serde(default)]
        phi: Option<String>,
        domain: Interval<f64>,
        #[serde(default)]
        equation: Option<EquationSpec>,
    },
    Quasi {
        phi: String,
        domain: Interval<f64>,
        x: f64,
        y: f64,
    },
    Cauchy {
        g: String,
        h: String,
        domain: Interval<f64>,
        x: f64,
        y: f64,
    },
    Equality {
        gamma: f64,
        #[serde(rename = "A")]
        a: f64,
        #[serde(rename = "B")]
        b: f64,
        #[serde(rename = "C")]
        c: f64,
        #[serde(rename = "D")]
        d: f64,
        mu: f64,
        lambda: f64,
        phi: String,
        domain: Interval<f64>,
    },
    Reflect {
        j: Interval<f64>,
        ambient: Interval<f64>,
        n: usize,
    },
}

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("spec does not parse: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Catalog(#[from] CatalogGenError),
    #[error("{0}")]
    Unsupported(String),
}

/// Parses a single job from JSON text.
pub fn parse_job(text: &str) -> Result<JobSpec, SpecError> {
    Ok(serde_json::from_str(text)?)
}

impl JobSpec {
    /// Builds the function triple for the triple kinds.
    pub fn build_triple(&self) -> Result<FunctionTriple, SpecError> {
        match self {
            JobSpec::Family { gamma, a, b, c, d, lambda, mu, domain, .. } => {
                let params = FamilyParams {
                    gamma: *gamma,
                    a: *a,
                    b: *b,
                    c: *c,
                    d: *d,
                    lambda: *lambda,
                    mu: *mu,
                };
                Ok(build_family(&params, domain)?)
            }
            JobSpec::M1 { gamma, a, b, c, d, domain, .. } => {
                let params = M1Params { gamma: *gamma, a: *a, b: *b, c: *c, d: *d };
                Ok(build_m1(&params, domain)?)
            }
            JobSpec::Piecewise {
                domain,
                k,
                lambda_star,
                lambda_sup,
                a,
                mu,
                f_core,
                phi_out,
                ..
            } => {
                let core_fn = catalog::lookup(f_core).map_err(CatalogGenError::from)?;
                let phi_out_fn = match phi_out {
                    Some(name) => Some(catalog::lookup(name).map_err(CatalogGenError::from)?.f),
                    None => None,
                };
                Ok(build_piecewise(&PiecewiseParams {
                    ambient: domain.clone(),
                    core: k.clone(),
                    lambda_star: *lambda_star,
                    lambda_sup: *lambda_sup,
                    a: *a,
                    mu: *mu,
                    f_core: core_fn.f,
                    phi_out: phi_out_fn,
                })?)
            }
            JobSpec::Constant { f, big_f, phi, domain, .. } => {
                let phi_fn = catalog::lookup(phi.as_deref().unwrap_or("identity"))
                    .map_err(CatalogGenError::from)?;
                Ok(build_constant(*f, *big_f, phi_fn.f, domain.clone()))
            }
            other => Err(SpecError::Unsupported(format!(
                "job kind {} does not define a function triple",
                other.kind_name()
            ))),
        }
    }

    /// The equation a `check` run should scan for this spec: an explicit
    /// `equation` field wins, otherwise plus for `m1` and minus for the rest.
    pub fn equation(&self) -> Option<Equation> {
        match self {
            JobSpec::Family { equation, .. }
            | JobSpec::Piecewise { equation, .. }
            | JobSpec::Constant { equation, .. } => {
                Some(equation.map(Equation::from).unwrap_or(Equation::Minus))
            }
            JobSpec::M1 { equation, .. } => {
                Some(equation.map(Equation::from).unwrap_or(Equation::Plus))
            }
            _ => None,
        }
    }

    /// Builds the quasi-arithmetic generator for `quasi` and `equality` jobs.
    pub fn build_qa_generator(&self) -> Result<QAGenerator, SpecError> {
        match self {
            JobSpec::Quasi { phi, domain, .. } | JobSpec::Equality { phi, domain, .. } => {
                Ok(catalog::qa_generator(phi, domain)?)
            }
            other => Err(SpecError::Unsupported(format!(
                "job kind {} has no quasi-arithmetic generator",
                other.kind_name()
            ))),
        }
    }

    /// Builds the Cauchy generator pair for `cauchy` jobs.
    pub fn build_generator_pair(&self) -> Result<GeneratorPair, SpecError> {
        match self {
            JobSpec::Cauchy { g, h, domain, .. } => {
                let gf = catalog::lookup(g).map_err(CatalogGenError::from)?;
                let hf = catalog::lookup(h).map_err(CatalogGenError::from)?;
                GeneratorPair::new(domain.clone(), gf.f, hf.f, gf.deriv, hf.deriv)
                    .map_err(|e| SpecError::Catalog(CatalogGenError::Mean(e)))
            }
            other => Err(SpecError::Unsupported(format!(
                "job kind {} has no generator pair",
                other.kind_name()
            ))),
        }
    }

    /// The affine data of an `equality` job.
    pub fn affine_spec(&self) -> Option<AffineSpec> {
        match self {
            JobSpec::Equality { a, b, c, d, mu, lambda, .. } => Some(AffineSpec {
                a: *a,
                b: *b,
                c: *c,
                d: *d,
                mu: *mu,
                lambda: *lambda,
            }),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            JobSpec::Family { .. } => "family",
            JobSpec::M1 { .. } => "m1",
            JobSpec::Piecewise { .. } => "piecewise",
            JobSpec::Constant { .. } => "constant",
            JobSpec::Quasi { .. } => "quasi",
            JobSpec::Cauchy { .. } => "cauchy",
            JobSpec::Equality { .. } => "equality",
            JobSpec::Reflect { .. } => "reflect",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::{scan_grid, Equation};

    const FAMILY_SPEC: &str = r#"{
        "kind": "family", "gamma": 0.0,
        "A": 0.0, "B": 1.0, "C": 1.0, "D": 0.0,
        "lambda": 0.0, "mu": 0.0,
        "domain": {"lo": -5.0, "hi": 5.0, "lo_open": true, "hi_open": true}
    }"#;

    #[test]
    fn family_spec_builds_and_scans() {
        let job = parse_job(FAMILY_SPEC).unwrap();
        assert_eq!(job.kind_name(), "family");
        assert_eq!(job.equation(), Some(Equation::Minus));
        let t = job.build_triple().unwrap();
        let rep = scan_grid(&t, job.equation().unwrap(), 51, 1e-8).unwrap();
        assert!(rep.max_abs <= 1e-9);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = FAMILY_SPEC.replace("\"mu\": 0.0", "\"mu\": 0.0, \"extra\": 1");
        assert!(matches!(parse_job(&bad), Err(SpecError::Parse(_))));
    }

    #[test]
    fn m1_spec_defaults_to_plus_equation() {
        let spec = r#"{
            "kind": "m1", "gamma": 0.0,
            "a": 1.0, "b": 1.0, "c": 0.0, "d": 1.0,
            "domain": {"lo": 0.0, "hi": 5.0, "lo_open": true, "hi_open": true}
        }"#;
        let job = parse_job(spec).unwrap();
        assert_eq!(job.equation(), Some(Equation::Plus));
        job.build_triple().unwrap();
    }

    #[test]
    fn piecewise_spec_with_catalog_core() {
        let spec = r#"{
            "kind": "piecewise",
            "domain": {"lo": 0.0, "hi": 10.0, "lo_open": true, "hi_open": true},
            "k": {"lo": 4.0, "hi": 6.0, "lo_open": false, "hi_open": false},
            "lambda_star": 1.0, "lambda_sup": 2.0, "A": 3.0, "mu": 0.0,
            "f_core": "square"
        }"#;
        let t = parse_job(spec).unwrap().build_triple().unwrap();
        assert_eq!(t.f(5.0), 25.0);
        assert_eq!(t.phi(5.0), 3.0);
        assert_eq!(t.phi(1.0), 3.0); // phi_out defaults to the level A
    }

    #[test]
    fn mean_specs_build_generators() {
        let quasi = parse_job(
            r#"{"kind":"quasi","phi":"log",
                "domain":{"lo":0.1,"hi":10.0,"lo_open":true,"hi_open":true},
                "x":1.0,"y":4.0}"#,
        )
        .unwrap();
        quasi.build_qa_generator().unwrap();

        let cauchy = parse_job(
            r#"{"kind":"cauchy","g":"square","h":"identity",
                "domain":{"lo":0.1,"hi":10.0,"lo_open":true,"hi_open":true},
                "x":2.0,"y":4.0}"#,
        )
        .unwrap();
        cauchy.build_generator_pair().unwrap();
        assert!(cauchy.build_qa_generator().is_err());
    }

    #[test]
    fn delta_equation_override_parses() {
        let spec = FAMILY_SPEC.replace(
            "\"mu\": 0.0,",
            "\"mu\": 0.0, \"equation\": {\"delta_h\": {\"h\": 0.25}},",
        );
        let job = parse_job(&spec).unwrap();
        assert_eq!(job.equation(), Some(Equation::DeltaH { h: 0.25 }));
    }
}
