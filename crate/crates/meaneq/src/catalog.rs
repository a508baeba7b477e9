//! Built-in generator catalog, addressable by name from the CLI and JSON
//! specs: `identity`, `square`, `log`, `reciprocal`, `power:p`, `exp:c`,
//! plus `const:c` for piecewise building blocks.

use std::sync::Arc;

use thiserror::Error;

use crate::family::RealFn;
use crate::interval::Interval;
use crate::means::{MeanError, QAGenerator};

/// A named function with analytic derivative and, where applicable, an
/// analytic inverse.
#[derive(Clone)]
pub struct NamedFunction {
    pub name: String,
    pub f: RealFn,
    pub deriv: RealFn,
    pub inverse: Option<RealFn>,
}

#[derive(Debug, Error, PartialEq)]
pub enum CatalogError {
    #[error("unknown function name `{0}`")]
    Unknown(String),
    #[error("bad parameter in `{0}`")]
    BadParameter(String),
}

/// Looks a function up by catalog name.
pub fn lookup(name: &str) -> Result<NamedFunction, CatalogError> {
    let entry = |f: RealFn, deriv: RealFn, inverse: Option<RealFn>| NamedFunction {
        name: name.to_string(),
        f,
        deriv,
        inverse,
    };
    if let Some(param) = name.strip_prefix("power:") {
        let p: f64 = param
            .parse()
            .map_err(|_| CatalogError::BadParameter(name.into()))?;
        if p == 0.0 || !p.is_finite() {
            return Err(CatalogError::BadParameter(name.into()));
        }
        return Ok(entry(
            Arc::new(move |x: f64| x.powf(p)),
            Arc::new(move |x: f64| p * x.powf(p - 1.0)),
            Some(Arc::new(move |y: f64| y.powf(1.0 / p))),
        ));
    }
    if let Some(param) = name.strip_prefix("exp:") {
        let c: f64 = param
            .parse()
            .map_err(|_| CatalogError::BadParameter(name.into()))?;
        if c == 0.0 || !c.is_finite() {
            return Err(CatalogError::BadParameter(name.into()));
        }
        return Ok(entry(
            Arc::new(move |x: f64| (c * x).exp()),
            Arc::new(move |x: f64| c * (c * x).exp()),
            Some(Arc::new(move |y: f64| y.ln() / c)),
        ));
    }
    if let Some(param) = name.strip_prefix("const:") {
        let c: f64 = param
            .parse()
            .map_err(|_| CatalogError::BadParameter(name.into()))?;
        if !c.is_finite() {
            return Err(CatalogError::BadParameter(name.into()));
        }
        return Ok(entry(Arc::new(move |_| c), Arc::new(|_| 0.0), None));
    }
    match name {
        "identity" => Ok(entry(
            Arc::new(|x| x),
            Arc::new(|_| 1.0),
            Some(Arc::new(|y| y)),
        )),
        "square" => Ok(entry(
            Arc::new(|x| x * x),
            Arc::new(|x| 2.0 * x),
            Some(Arc::new(|y: f64| y.sqrt())),
        )),
        "log" => Ok(entry(
            Arc::new(|x: f64| x.ln()),
            Arc::new(|x| 1.0 / x),
            Some(Arc::new(|y: f64| y.exp())),
        )),
        "reciprocal" => Ok(entry(
            Arc::new(|x| 1.0 / x),
            Arc::new(|x| -1.0 / (x * x)),
            Some(Arc::new(|y| 1.0 / y)),
        )),
        other => Err(CatalogError::Unknown(other.to_string())),
    }
}

/// Builds a quasi-arithmetic generator from a catalog name on a domain; the
/// generator constructor enforces strict monotonicity there.
pub fn qa_generator(name: &str, domain: &Interval<f64>) -> Result<QAGenerator, CatalogGenError> {
    let named = lookup(name)?;
    Ok(QAGenerator::new(
        domain.clone(),
        named.f,
        named.inverse,
        Some(named.deriv),
    )?)
}

#[derive(Debug, Error)]
pub enum CatalogGenError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Mean(#[from] MeanError),
}
