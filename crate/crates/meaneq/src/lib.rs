//! Construction, evaluation and verification of solution families of the
//! mean-type functional equation `φ((x+y)/2)(f(x)−f(y)) = F(x)−F(y)`,
//! two-variable Cauchy and quasi-arithmetic means, and the affine-basis
//! test deciding when those two means coincide.

pub mod catalog;
pub mod checker;
pub mod equality;
pub mod family;
pub(crate) mod fit;
pub mod interval;
pub mod jobspec;
pub mod means;

pub use family::{FamilyKind, FamilyParams, FunctionTriple, M1Params, PiecewiseParams, RealFn};
pub use interval::{Endpoint, Ext, Interval, IntervalError};
