//! Interval algebra over the extended reals.
//!
//! Provides intervals with exact open/closed endpoint tracking, reflection
//! `Ref(S|P) = (2P − S) ∩ I`, the iterated reflection sequence `J₀, J₁, …`
//! and its closure, the shrunken interval `I_h = (I−h) ∩ (I+h)`, tail
//! complements `S_*` / `S^*`, and midpoint sets `½(P+Q)`.
//!
//! Endpoint arithmetic is generic over [`Endpoint`] so the same operations
//! run on `f64` (runtime path) and on exact rationals (test path, where the
//! diameter growth law must hold with zero error).

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Scalar endpoint arithmetic needed by the interval operations.
///
/// Only addition, subtraction, doubling and halving of endpoints ever occur,
/// so exact types (rationals) qualify alongside `f64`.
pub trait Endpoint: Clone + PartialOrd {
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn double(&self) -> Self;
    fn half(&self) -> Self;
    fn zero() -> Self;
    /// Rejects values that cannot serve as endpoints (NaN for floats).
    fn is_valid(&self) -> bool {
        true
    }
}

impl Endpoint for f64 {
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn double(&self) -> Self {
        2.0 * self
    }
    fn half(&self) -> Self {
        self / 2.0
    }
    fn zero() -> Self {
        0.0
    }
    fn is_valid(&self) -> bool {
        !self.is_nan() && self.is_finite()
    }
}

impl Endpoint for BigRational {
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn double(&self) -> Self {
        self + self
    }
    fn half(&self) -> Self {
        self / BigRational::from_integer(BigInt::from(2))
    }
    fn zero() -> Self {
        Zero::zero()
    }
}

/// An extended real: a finite scalar or one of the two infinities.
///
/// Variant order gives the natural total order via `derive(PartialOrd)`.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub enum Ext<T> {
    NegInf,
    Finite(T),
    PosInf,
}

impl<T: Endpoint> Ext<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, Ext::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&T> {
        match self {
            Ext::Finite(v) => Some(v),
            _ => None,
        }
    }

    fn double(&self) -> Self {
        match self {
            Ext::NegInf => Ext::NegInf,
            Ext::PosInf => Ext::PosInf,
            Ext::Finite(v) => Ext::Finite(v.double()),
        }
    }

    fn half(&self) -> Self {
        match self {
            Ext::NegInf => Ext::NegInf,
            Ext::PosInf => Ext::PosInf,
            Ext::Finite(v) => Ext::Finite(v.half()),
        }
    }

    /// Extended subtraction. Same-signed infinities never meet here: the
    /// reflection formula only ever combines one endpoint of each operand.
    fn sub(&self, rhs: &Self) -> Self {
        match (self, rhs) {
            (Ext::Finite(a), Ext::Finite(b)) => Ext::Finite(a.sub(b)),
            (Ext::NegInf, Ext::Finite(_)) | (Ext::NegInf, Ext::PosInf) | (Ext::Finite(_), Ext::PosInf) => {
                Ext::NegInf
            }
            (Ext::PosInf, Ext::Finite(_)) | (Ext::PosInf, Ext::NegInf) | (Ext::Finite(_), Ext::NegInf) => {
                Ext::PosInf
            }
            _ => unreachable!("indeterminate extended subtraction"),
        }
    }

    /// Extended addition; opposite-signed infinities never meet here.
    fn add(&self, rhs: &Self) -> Self {
        match (self, rhs) {
            (Ext::Finite(a), Ext::Finite(b)) => Ext::Finite(a.add(b)),
            (Ext::NegInf, Ext::NegInf) | (Ext::NegInf, Ext::Finite(_)) | (Ext::Finite(_), Ext::NegInf) => {
                Ext::NegInf
            }
            (Ext::PosInf, Ext::PosInf) | (Ext::PosInf, Ext::Finite(_)) | (Ext::Finite(_), Ext::PosInf) => {
                Ext::PosInf
            }
            _ => unreachable!("indeterminate extended addition"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Bounds<T> {
    lo: Ext<T>,
    hi: Ext<T>,
    lo_open: bool,
    hi_open: bool,
}

/// An interval over the extended reals with exact endpoint-openness tracking.
///
/// The empty interval has a single canonical representation, so derived
/// structural equality is set equality.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval<T> {
    bounds: Option<Bounds<T>>,
}

/// Errors raised by the interval operations.
#[derive(Debug, Error, PartialEq)]
pub enum IntervalError {
    #[error("base interval is not a subset of the ambient interval")]
    NotSubinterval,
    #[error("operation requires a nonempty interval")]
    EmptyInput,
    #[error("shrink offset must be positive")]
    NonPositiveShrink,
}

impl<T: Endpoint> Interval<T> {
    /// Canonicalizing constructor. Infinite endpoints are forced open;
    /// degenerate bounds collapse to the canonical empty interval.
    pub fn new(lo: Ext<T>, hi: Ext<T>, lo_open: bool, hi_open: bool) -> Self {
        if let Ext::Finite(v) = &lo {
            assert!(v.is_valid(), "invalid lower endpoint");
        }
        if let Ext::Finite(v) = &hi {
            assert!(v.is_valid(), "invalid upper endpoint");
        }
        let lo_open = lo_open || !lo.is_finite();
        let hi_open = hi_open || !hi.is_finite();
        match lo.partial_cmp(&hi) {
            Some(std::cmp::Ordering::Less) => Interval {
                bounds: Some(Bounds { lo, hi, lo_open, hi_open }),
            },
            Some(std::cmp::Ordering::Equal) if !lo_open && !hi_open => Interval {
                bounds: Some(Bounds { lo, hi, lo_open, hi_open }),
            },
            _ => Interval { bounds: None },
        }
    }

    pub fn empty() -> Self {
        Interval { bounds: None }
    }

    /// The whole extended-real line `(−∞, +∞)`.
    pub fn all() -> Self {
        Interval::new(Ext::NegInf, Ext::PosInf, true, true)
    }

    pub fn open(lo: T, hi: T) -> Self {
        Interval::new(Ext::Finite(lo), Ext::Finite(hi), true, true)
    }

    pub fn closed(lo: T, hi: T) -> Self {
        Interval::new(Ext::Finite(lo), Ext::Finite(hi), false, false)
    }

    pub fn singleton(p: T) -> Self {
        Interval::new(Ext::Finite(p.clone()), Ext::Finite(p), false, false)
    }

    /// `(−∞, hi)` — everything strictly below `hi`.
    pub fn below(hi: Ext<T>) -> Self {
        Interval::new(Ext::NegInf, hi, true, true)
    }

    /// `(lo, +∞)` — everything strictly above `lo`.
    pub fn above(lo: Ext<T>) -> Self {
        Interval::new(lo, Ext::PosInf, true, true)
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_none()
    }

    pub fn is_singleton(&self) -> bool {
        match &self.bounds {
            Some(b) => b.lo == b.hi,
            None => false,
        }
    }

    /// Both endpoints finite (the empty interval counts as bounded).
    pub fn is_bounded(&self) -> bool {
        match &self.bounds {
            Some(b) => b.lo.is_finite() && b.hi.is_finite(),
            None => true,
        }
    }

    pub fn inf(&self) -> Option<&Ext<T>> {
        self.bounds.as_ref().map(|b| &b.lo)
    }

    pub fn sup(&self) -> Option<&Ext<T>> {
        self.bounds.as_ref().map(|b| &b.hi)
    }

    pub fn lo_open(&self) -> bool {
        self.bounds.as_ref().map_or(false, |b| b.lo_open)
    }

    pub fn hi_open(&self) -> bool {
        self.bounds.as_ref().map_or(false, |b| b.hi_open)
    }

    pub fn contains(&self, x: &T) -> bool {
        let Some(b) = &self.bounds else { return false };
        let x = Ext::Finite(x.clone());
        let above_lo = match b.lo.partial_cmp(&x) {
            Some(std::cmp::Ordering::Less) => true,
            Some(std::cmp::Ordering::Equal) => !b.lo_open,
            _ => false,
        };
        let below_hi = match x.partial_cmp(&b.hi) {
            Some(std::cmp::Ordering::Less) => true,
            Some(std::cmp::Ordering::Equal) => !b.hi_open,
            _ => false,
        };
        above_lo && below_hi
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        let Some(a) = &self.bounds else { return true };
        let Some(b) = &other.bounds else { return false };
        let lo_ok = match b.lo.partial_cmp(&a.lo) {
            Some(std::cmp::Ordering::Less) => true,
            Some(std::cmp::Ordering::Equal) => !b.lo_open || a.lo_open,
            _ => false,
        };
        let hi_ok = match a.hi.partial_cmp(&b.hi) {
            Some(std::cmp::Ordering::Less) => true,
            Some(std::cmp::Ordering::Equal) => !b.hi_open || a.hi_open,
            _ => false,
        };
        lo_ok && hi_ok
    }

    /// Closed as a subset of `ambient` in the relative topology: each end is
    /// either an attained endpoint or runs all the way to the ambient's end.
    pub fn is_closed_in(&self, ambient: &Self) -> bool {
        let Some(a) = &self.bounds else { return true };
        let Some(b) = &ambient.bounds else { return false };
        let lo_ok = !a.lo_open || (a.lo == b.lo && a.lo_open == b.lo_open);
        let hi_ok = !a.hi_open || (a.hi == b.hi && a.hi_open == b.hi_open);
        lo_ok && hi_ok
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let (Some(a), Some(b)) = (&self.bounds, &other.bounds) else {
            return Interval::empty();
        };
        let (lo, lo_open) = match a.lo.partial_cmp(&b.lo) {
            Some(std::cmp::Ordering::Greater) => (a.lo.clone(), a.lo_open),
            Some(std::cmp::Ordering::Less) => (b.lo.clone(), b.lo_open),
            _ => (a.lo.clone(), a.lo_open || b.lo_open),
        };
        let (hi, hi_open) = match a.hi.partial_cmp(&b.hi) {
            Some(std::cmp::Ordering::Less) => (a.hi.clone(), a.hi_open),
            Some(std::cmp::Ordering::Greater) => (b.hi.clone(), b.hi_open),
            _ => (a.hi.clone(), a.hi_open || b.hi_open),
        };
        Interval::new(lo, hi, lo_open, hi_open)
    }

    /// `hi − lo` as an extended real; `None` for the empty interval.
    pub fn diameter(&self) -> Option<Ext<T>> {
        self.bounds.as_ref().map(|b| b.hi.sub(&b.lo))
    }

    /// Translate by a finite offset.
    pub fn translate(&self, t: &T) -> Self {
        match &self.bounds {
            None => Interval::empty(),
            Some(b) => Interval::new(
                b.lo.add(&Ext::Finite(t.clone())),
                b.hi.add(&Ext::Finite(t.clone())),
                b.lo_open,
                b.hi_open,
            ),
        }
    }
}

/// `Ref(S|P) = (2P − S) ∩ ambient`: the reflections of points of `S`
/// through points of `P`, clipped to the ambient interval.
///
/// Endpoints follow `inf = max(α, 2·inf P − sup S)` and
/// `sup = min(2·sup P − inf S, β)`; an end is open whenever the endpoint of
/// `S` or `P` producing it is open.
pub fn reflect<T: Endpoint>(s: &Interval<T>, p: &Interval<T>, ambient: &Interval<T>) -> Interval<T> {
    let (Some(sb), Some(pb)) = (&s.bounds, &p.bounds) else {
        return Interval::empty();
    };
    let mirrored = Interval::new(
        pb.lo.double().sub(&sb.hi),
        pb.hi.double().sub(&sb.lo),
        pb.lo_open || sb.hi_open,
        pb.hi_open || sb.lo_open,
    );
    mirrored.intersect(ambient)
}

/// The iterated reflection sequence `J₀ = J`, `Jₙ = Ref(Jₙ₋₁|J)` inside a
/// fixed ambient interval. Terms are nondecreasing under inclusion.
#[derive(Clone, Debug, PartialEq)]
pub struct ReflectionSequence<T> {
    base: Interval<T>,
    ambient: Interval<T>,
    terms: Vec<Interval<T>>,
}

impl<T: Endpoint> ReflectionSequence<T> {
    pub fn base(&self) -> &Interval<T> {
        &self.base
    }

    pub fn ambient(&self) -> &Interval<T> {
        &self.ambient
    }

    /// `J₀ … Jₙ` in order.
    pub fn terms(&self) -> &[Interval<T>] {
        &self.terms
    }

    /// Endpoints `(aₙ, bₙ)` of the n-th term, when that term is nonempty.
    pub fn endpoints(&self, n: usize) -> Option<(Ext<T>, Ext<T>)> {
        let t = self.terms.get(n)?;
        Some((t.inf()?.clone(), t.sup()?.clone()))
    }
}

/// Computes `J₀ … Jₙ` by the reflection recursion.
pub fn reflection_sequence<T: Endpoint>(
    j: &Interval<T>,
    ambient: &Interval<T>,
    n: usize,
) -> Result<ReflectionSequence<T>, IntervalError> {
    if !j.is_subset_of(ambient) {
        return Err(IntervalError::NotSubinterval);
    }
    let mut terms = Vec::with_capacity(n + 1);
    terms.push(j.clone());
    for k in 1..=n {
        let next = reflect(&terms[k - 1], j, ambient);
        terms.push(next);
    }
    Ok(ReflectionSequence {
        base: j.clone(),
        ambient: ambient.clone(),
        terms,
    })
}

/// The closure of the reflection sequence: `J` itself when `J` is empty, a
/// singleton, or the whole ambient interval; otherwise `Ref(ambient|J)`.
/// Equals the union of all sequence terms.
pub fn reflection_closure<T: Endpoint>(
    j: &Interval<T>,
    ambient: &Interval<T>,
) -> Result<Interval<T>, IntervalError> {
    if !j.is_subset_of(ambient) {
        return Err(IntervalError::NotSubinterval);
    }
    if j.is_empty() || j.is_singleton() || j == ambient {
        return Ok(j.clone());
    }
    Ok(reflect(ambient, j, ambient))
}

/// `I_h = (I−h) ∩ (I+h)`; empty once `2h` reaches the diameter of `I`.
pub fn shrink<T: Endpoint>(i: &Interval<T>, h: &T) -> Result<Interval<T>, IntervalError> {
    if !(*h > T::zero()) {
        return Err(IntervalError::NonPositiveShrink);
    }
    let minus = i.translate(&T::zero().sub(h));
    let plus = i.translate(h);
    Ok(minus.intersect(&plus))
}

/// `S_* = {x ∈ ambient : x < inf S}`; the whole ambient when `S` is empty.
pub fn lower_complement<T: Endpoint>(s: &Interval<T>, ambient: &Interval<T>) -> Interval<T> {
    match s.inf() {
        None => ambient.clone(),
        Some(lo) => ambient.intersect(&Interval::below(lo.clone())),
    }
}

/// `S^* = {x ∈ ambient : sup S < x}`; the whole ambient when `S` is empty.
pub fn upper_complement<T: Endpoint>(s: &Interval<T>, ambient: &Interval<T>) -> Interval<T> {
    match s.sup() {
        None => ambient.clone(),
        Some(hi) => ambient.intersect(&Interval::above(hi.clone())),
    }
}

/// The midpoint set `½(P+Q) = {(p+q)/2 : p ∈ P, q ∈ Q}`.
pub fn midset<T: Endpoint>(p: &Interval<T>, q: &Interval<T>) -> Interval<T> {
    let (Some(pb), Some(qb)) = (&p.bounds, &q.bounds) else {
        return Interval::empty();
    };
    Interval::new(
        pb.lo.add(&qb.lo).half(),
        pb.hi.add(&qb.hi).half(),
        pb.lo_open || qb.lo_open,
        pb.hi_open || qb.hi_open,
    )
}

/// Self-test of the algebra: the tails `S_*` and `S^*` must coincide with
/// the reflections of the ambient interval about the extreme midpoints
/// `inf ½(S+I)` and `sup ½(S+I)`, whenever those are finite.
pub fn tail_reflection_check<T: Endpoint>(
    s: &Interval<T>,
    ambient: &Interval<T>,
) -> Result<bool, IntervalError> {
    if s.is_empty() {
        return Err(IntervalError::EmptyInput);
    }
    if !s.is_subset_of(ambient) {
        return Err(IntervalError::NotSubinterval);
    }
    let mid = midset(s, ambient);
    let mut ok = true;
    if let Some(Ext::Finite(lo)) = mid.inf() {
        let pivot = Interval::singleton(lo.clone());
        ok &= lower_complement(s, ambient) == reflect(ambient, &pivot, ambient);
    }
    if let Some(Ext::Finite(hi)) = mid.sup() {
        let pivot = Interval::singleton(hi.clone());
        ok &= upper_complement(s, ambient) == reflect(ambient, &pivot, ambient);
    }
    Ok(ok)
}

impl fmt::Display for Interval<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.bounds {
            None => write!(f, "∅"),
            Some(b) => {
                write!(f, "{}", if b.lo_open { "(" } else { "[" })?;
                match &b.lo {
                    Ext::NegInf => write!(f, "-inf")?,
                    Ext::Finite(v) => write!(f, "{v}")?,
                    Ext::PosInf => write!(f, "+inf")?,
                }
                write!(f, ", ")?;
                match &b.hi {
                    Ext::NegInf => write!(f, "-inf")?,
                    Ext::Finite(v) => write!(f, "{v}")?,
                    Ext::PosInf => write!(f, "+inf")?,
                }
                write!(f, "{}", if b.hi_open { ")" } else { "]" })
            }
        }
    }
}

// JSON form: {"lo": number|"-inf", "hi": number|"+inf", "lo_open": bool,
// "hi_open": bool}; the empty interval is {"empty": true}.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EndpointJson {
    Num(f64),
    Inf(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntervalJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    empty: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lo: Option<EndpointJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hi: Option<EndpointJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lo_open: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hi_open: Option<bool>,
}

impl Serialize for Interval<f64> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let json = match &self.bounds {
            None => IntervalJson {
                empty: Some(true),
                lo: None,
                hi: None,
                lo_open: None,
                hi_open: None,
            },
            Some(b) => IntervalJson {
                empty: None,
                lo: Some(match &b.lo {
                    Ext::NegInf => EndpointJson::Inf("-inf".into()),
                    Ext::Finite(v) => EndpointJson::Num(*v),
                    Ext::PosInf => EndpointJson::Inf("+inf".into()),
                }),
                hi: Some(match &b.hi {
                    Ext::NegInf => EndpointJson::Inf("-inf".into()),
                    Ext::Finite(v) => EndpointJson::Num(*v),
                    Ext::PosInf => EndpointJson::Inf("+inf".into()),
                }),
                lo_open: Some(b.lo_open),
                hi_open: Some(b.hi_open),
            },
        };
        json.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Interval<f64> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let json = IntervalJson::deserialize(deserializer)?;
        if json.empty == Some(true) {
            if json.lo.is_some() || json.hi.is_some() {
                return Err(D::Error::custom("empty interval must not carry endpoints"));
            }
            return Ok(Interval::empty());
        }
        let parse = |e: Option<EndpointJson>, which: &str| -> Result<Ext<f64>, D::Error> {
            match e {
                Some(EndpointJson::Num(v)) if v.is_finite() => Ok(Ext::Finite(v)),
                Some(EndpointJson::Num(_)) => Err(D::Error::custom(format!("non-finite {which}"))),
                Some(EndpointJson::Inf(s)) if s == "-inf" => Ok(Ext::NegInf),
                Some(EndpointJson::Inf(s)) if s == "+inf" => Ok(Ext::PosInf),
                Some(EndpointJson::Inf(s)) => {
                    Err(D::Error::custom(format!("bad endpoint string {s:?}")))
                }
                None => Err(D::Error::custom(format!("missing field `{which}`"))),
            }
        };
        let lo = parse(json.lo, "lo")?;
        let hi = parse(json.hi, "hi")?;
        Ok(Interval::new(
            lo,
            hi,
            json.lo_open.unwrap_or(true),
            json.hi_open.unwrap_or(true),
        ))
    }
}
