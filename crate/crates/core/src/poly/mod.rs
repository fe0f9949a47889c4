//! Exact polynomial and rational-function arithmetic over ℚ.

mod compiled;
mod linalg;
mod multi_index;
mod parse;
mod polynomial;
mod rational;

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub use compiled::CompiledRational;
pub use linalg::{det, jacobian, jacobian_det, solve_linear, Matrix};
pub use multi_index::{binomial, factorial, falling, MultiIndex};
pub use parse::parse_expr;
pub use polynomial::{format_rational, Polynomial};
pub use rational::RationalFunction;

use crate::error::{Error, Result};

pub type Q = BigRational;

/// Ordered variable names shared by the values of one computation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Vars(Arc<[String]>);

impl Vars {
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(names: I) -> Self {
        Vars(names.into_iter().map(Into::into).collect::<Vec<_>>().into())
    }

    /// `x1, …, xn`
    pub fn numbered(prefix: &str, n: usize) -> Self {
        Vars::new((1..=n).map(|i| format!("{prefix}{i}")))
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|v| v == name)
    }

    pub fn with_extra(&self, extra: &str) -> Vars {
        let mut v = self.0.to_vec();
        v.push(extra.to_string());
        Vars(v.into())
    }

    pub fn parse(&self, text: &str) -> Result<RationalFunction> {
        parse_expr(text, &self.0)
    }

    pub fn format(&self, f: &RationalFunction) -> String {
        f.format(&self.0)
    }
}

/// Evaluation point. Exact points are never converted to floats implicitly.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    Exact(Vec<Q>),
    Float(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Q),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Value::Float(v) => *v,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(q) => write!(f, "{q}"),
            Value::Float(v) => write!(f, "{v:.16e}"),
        }
    }
}

impl Point {
    pub fn len(&self) -> usize {
        match self {
            Point::Exact(v) => v.len(),
            Point::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Exact in exact mode; in float mode the coordinates are read as exact
/// binary rationals, evaluated exactly, and rounded once.
pub fn eval_at(f: &RationalFunction, p: &Point) -> Result<Value> {
    if p.len() != f.nvars() {
        return Err(Error::dim(format!(
            "point has {} coordinates, function has {} variables",
            p.len(),
            f.nvars()
        )));
    }
    match p {
        Point::Exact(v) => f.eval(v).map(Value::Exact),
        Point::Float(v) => f.eval_f64(v).map(Value::Float),
    }
}

pub fn derive(f: &RationalFunction, i: usize) -> RationalFunction {
    f.derive(i)
}

/// Composition with a variable map given as one image per variable of `f`.
pub fn substitute(f: &RationalFunction, map: &[RationalFunction]) -> Result<RationalFunction> {
    if map.len() != f.nvars() {
        return Err(Error::dim("substitution map must cover every variable"));
    }
    f.substitute(map)
}

/// Exact field arithmetic needed by forms and invariant formulas, implemented
/// by plain rationals and by rational functions.
pub trait Coefficient: Clone + PartialEq + fmt::Debug + Send + Sync {
    /// Information needed to build constants (the variable count for
    /// rational functions).
    type Ctx: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn ctx(&self) -> Self::Ctx;
    fn from_q(ctx: &Self::Ctx, q: Q) -> Self;
    fn vanishes(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn scaled(&self, q: &Q) -> Self;
    /// `None` when dividing by zero.
    fn divide(&self, other: &Self) -> Option<Self>;

    fn zero_in(ctx: &Self::Ctx) -> Self {
        Self::from_q(ctx, Q::zero())
    }
}

impl Coefficient for Q {
    type Ctx = ();

    fn ctx(&self) {}
    fn from_q(_: &(), q: Q) -> Self {
        q
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn scaled(&self, q: &Q) -> Self {
        self * q
    }
    fn divide(&self, other: &Self) -> Option<Self> {
        (!Zero::is_zero(other)).then(|| self / other)
    }
}

impl Coefficient for RationalFunction {
    type Ctx = usize;

    fn ctx(&self) -> usize {
        self.nvars()
    }
    fn from_q(ctx: &usize, q: Q) -> Self {
        RationalFunction::constant(*ctx, q)
    }
    fn vanishes(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn scaled(&self, q: &Q) -> Self {
        RationalFunction::scale(self, q)
    }
    fn divide(&self, other: &Self) -> Option<Self> {
        self.checked_div(other).ok()
    }
}
