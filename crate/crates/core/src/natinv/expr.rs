//! Natural-invariant expressions and the frame DSL.
//!
//! ```text
//! frame := expr (',' expr)*
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' ['-'] int)?
//! atom  := int | catalog ['(' 'sym' ')'] | 'free' | 'box' '(' expr ')'
//!        | 'tresse' '(' expr ',' int ')' | variable | '(' expr ')'
//! ```
//!
//! Catalog tokens evaluate a catalog invariant of the operator's symbol with
//! point-dependent coefficients. `free` is `□(1)`, `box(e)` is `□(e)`, and
//! `tresse(e, i)` is the Tresse derivative of `e` along the i-th (1-based)
//! frame invariant. Variable names refer to the operator's variables:
//! coordinates (not natural; useful as a reference frame) and parameters
//! such as `u`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::catalog::{quartic_j, quartic_j2, quartic_j3, quintic_covariants, ternary_cubic_covariants};
use crate::diffop::{apply_op, symbol, LinearDiffOp};
use crate::error::{Error, Result};
use crate::poly::{format_rational, jacobian, solve_linear, Matrix, RationalFunction, Vars, Q};
use crate::transvect::Form;

/// Catalog invariants available as frame ingredients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CatalogInvariant {
    J2q,
    J3q,
    Jq,
    I1Quintic,
    I2Quintic,
    J1c,
    J2c,
    Jc,
}

impl CatalogInvariant {
    pub const ALL: [CatalogInvariant; 8] = [
        CatalogInvariant::J2q,
        CatalogInvariant::J3q,
        CatalogInvariant::Jq,
        CatalogInvariant::I1Quintic,
        CatalogInvariant::I2Quintic,
        CatalogInvariant::J1c,
        CatalogInvariant::J2c,
        CatalogInvariant::Jc,
    ];

    pub fn token(self) -> &'static str {
        match self {
            CatalogInvariant::J2q => "J2q",
            CatalogInvariant::J3q => "J3q",
            CatalogInvariant::Jq => "Jq",
            CatalogInvariant::I1Quintic => "I1quintic",
            CatalogInvariant::I2Quintic => "I2quintic",
            CatalogInvariant::J1c => "J1c",
            CatalogInvariant::J2c => "J2c",
            CatalogInvariant::Jc => "Jc",
        }
    }

    fn from_token(s: &str) -> Option<Self> {
        CatalogInvariant::ALL.into_iter().find(|c| c.token() == s)
    }

    /// `(n, k)` of the symbols it applies to.
    pub fn shape(self) -> (usize, u32) {
        match self {
            CatalogInvariant::J2q | CatalogInvariant::J3q | CatalogInvariant::Jq => (2, 4),
            CatalogInvariant::I1Quintic | CatalogInvariant::I2Quintic => (2, 5),
            CatalogInvariant::J1c | CatalogInvariant::J2c | CatalogInvariant::Jc => (3, 3),
        }
    }

    /// Evaluates on a symbol with rational-function coefficients.
    pub fn evaluate(self, p: &Form<RationalFunction>) -> Result<RationalFunction> {
        let (n, k) = self.shape();
        if p.n() != n || p.degree() != k {
            return Err(Error::Invalid(format!(
                "{} needs a symbol with n = {n}, k = {k}; got n = {}, k = {}",
                self.token(),
                p.n(),
                p.degree()
            )));
        }
        match self {
            CatalogInvariant::J2q => quartic_j2(p),
            CatalogInvariant::J3q => quartic_j3(p),
            CatalogInvariant::Jq => quartic_j(p),
            CatalogInvariant::I1Quintic => quintic_covariants(p)?.i1(),
            CatalogInvariant::I2Quintic => quintic_covariants(p)?.i2(),
            CatalogInvariant::J1c => Ok(ternary_cubic_covariants(p)?.j1),
            CatalogInvariant::J2c => Ok(ternary_cubic_covariants(p)?.j2),
            CatalogInvariant::Jc => ternary_cubic_covariants(p)?.j(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InvariantExpr {
    Catalog(CatalogInvariant),
    /// `□(1)`, the free term.
    Free,
    /// `□(e)`
    Box(Box<InvariantExpr>),
    /// Tresse derivative along frame slot `i` (0-based).
    Tresse(Box<InvariantExpr>, usize),
    /// One of the operator's variables, by index.
    Var(usize),
    Const(Q),
    Add(Box<InvariantExpr>, Box<InvariantExpr>),
    Sub(Box<InvariantExpr>, Box<InvariantExpr>),
    Mul(Box<InvariantExpr>, Box<InvariantExpr>),
    Div(Box<InvariantExpr>, Box<InvariantExpr>),
    Neg(Box<InvariantExpr>),
    Pow(Box<InvariantExpr>, i32),
}

impl InvariantExpr {
    pub fn boxed(e: InvariantExpr) -> Self {
        InvariantExpr::Box(Box::new(e))
    }

    pub fn tresse(e: InvariantExpr, slot: usize) -> Self {
        InvariantExpr::Tresse(Box::new(e), slot)
    }

    pub fn pow(e: InvariantExpr, k: i32) -> Self {
        InvariantExpr::Pow(Box::new(e), k)
    }

    pub fn mul(a: InvariantExpr, b: InvariantExpr) -> Self {
        InvariantExpr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: InvariantExpr, b: InvariantExpr) -> Self {
        InvariantExpr::Div(Box::new(a), Box::new(b))
    }

    pub fn add(a: InvariantExpr, b: InvariantExpr) -> Self {
        InvariantExpr::Add(Box::new(a), Box::new(b))
    }

    /// Whether the expression mentions Tresse derivatives (and so needs a
    /// frame to be evaluated).
    pub fn needs_frame(&self) -> bool {
        use InvariantExpr::*;
        match self {
            Tresse(..) => true,
            Catalog(_) | Free | Var(_) | Const(_) => false,
            Box(e) | Neg(e) | Pow(e, _) => e.needs_frame(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.needs_frame() || b.needs_frame(),
        }
    }

    /// Whether the expression refers to a coordinate (the first `n`
    /// variables). Such expressions are not natural.
    pub fn uses_coordinates(&self, n: usize) -> bool {
        use InvariantExpr::*;
        match self {
            Var(i) => *i < n,
            Catalog(_) | Free | Const(_) => false,
            Box(e) | Neg(e) | Pow(e, _) | Tresse(e, _) => e.uses_coordinates(n),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.uses_coordinates(n) || b.uses_coordinates(n),
        }
    }

    /// Renders in DSL syntax; variables are named from `vars`.
    pub fn display<'a>(&'a self, vars: &'a Vars) -> impl fmt::Display + 'a {
        Shown(self, vars)
    }
}

struct Shown<'a>(&'a InvariantExpr, &'a Vars);

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use InvariantExpr::*;
        let v = self.1;
        let s = |e: &InvariantExpr| Shown(e, v).to_string();
        match self.0 {
            Catalog(c) => f.write_str(c.token()),
            Free => f.write_str("free"),
            Box(e) => write!(f, "box({})", s(e)),
            Tresse(e, i) => write!(f, "tresse({}, {})", s(e), i + 1),
            Var(i) => f.write_str(&v.names()[*i]),
            Const(q) if q.is_negative() => write!(f, "(-{})", format_rational(&-q)),
            Const(q) => f.write_str(&format_rational(q)),
            Add(a, b) => write!(f, "({} + {})", s(a), s(b)),
            Sub(a, b) => write!(f, "({} - {})", s(a), s(b)),
            Mul(a, b) => write!(f, "({}*{})", s(a), s(b)),
            Div(a, b) => write!(f, "({}/{})", s(a), s(b)),
            Neg(e) => write!(f, "(-{})", s(e)),
            Pow(e, k) if *k < 0 => write!(f, "{}^({k})", s(e)),
            Pow(e, k) => write!(f, "{}^{k}", s(e)),
        }
    }
}

/// An ordered list of n invariants meant as local coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantFrame {
    exprs: Vec<InvariantExpr>,
}

impl InvariantFrame {
    pub fn new(exprs: Vec<InvariantExpr>) -> Result<Self> {
        if exprs.is_empty() {
            return Err(Error::Invalid("empty frame".into()));
        }
        if exprs.iter().any(InvariantExpr::needs_frame) {
            return Err(Error::Invalid("frame invariants cannot use Tresse derivatives".into()));
        }
        Ok(InvariantFrame { exprs })
    }

    /// Coordinate functions `x_1, …, x_n` of the operator, as a reference
    /// frame.
    pub fn coordinates(n: usize) -> Self {
        InvariantFrame {
            exprs: (0..n).map(InvariantExpr::Var).collect(),
        }
    }

    pub fn parse(text: &str, vars: &Vars) -> Result<Self> {
        InvariantFrame::new(parse_frame(text, vars)?)
    }

    pub fn exprs(&self) -> &[InvariantExpr] {
        &self.exprs
    }

    pub fn len(&self) -> usize {
        self.exprs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exprs.is_empty()
    }

    pub fn format(&self, vars: &Vars) -> String {
        self.exprs
            .iter()
            .map(|e| e.display(vars).to_string())
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// `(I₁(A), …, I_n(A))`; the frame length must equal the operator's `n`.
    pub fn evaluate(&self, a: &LinearDiffOp) -> Result<Vec<RationalFunction>> {
        if self.exprs.len() != a.n() {
            return Err(Error::dim(format!(
                "frame has {} invariants, operator has {} coordinates",
                self.exprs.len(),
                a.n()
            )));
        }
        let mut ev = Evaluator::new(a);
        self.exprs.iter().map(|e| ev.eval(e)).collect()
    }
}

/// Frame values together with their Jacobian in the coordinates.
#[derive(Clone, Debug)]
pub struct FrameValues {
    pub values: Vec<RationalFunction>,
    pub jacobian: Matrix,
}

impl FrameValues {
    pub fn new(values: Vec<RationalFunction>) -> Self {
        let n = values.len();
        let coords: Vec<usize> = (0..n).collect();
        // M[j][i] = ∂I_i/∂x_j
        let jt = jacobian(&values, &coords);
        let jacobian = (0..n).map(|j| (0..n).map(|i| jt[i][j].clone()).collect()).collect();
        FrameValues { values, jacobian }
    }

    /// `(df/dI_1, …, df/dI_n)`, solving `∂f/∂x_j = Σ_i (df/dI_i)·∂I_i/∂x_j`.
    pub fn tresse(&self, f: &RationalFunction) -> Result<Vec<RationalFunction>> {
        let n = self.values.len();
        let grad: Vec<RationalFunction> = (0..n).map(|j| f.derive(j)).collect();
        solve_linear(&self.jacobian, &grad)
    }
}

/// Evaluates expressions on one operator, caching the symbolic symbol.
pub struct Evaluator<'a> {
    op: &'a LinearDiffOp,
    frame: Option<FrameValues>,
    symbol: Option<Form<RationalFunction>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(op: &'a LinearDiffOp) -> Self {
        Evaluator {
            op,
            frame: None,
            symbol: None,
        }
    }

    pub fn with_frame(op: &'a LinearDiffOp, frame: FrameValues) -> Self {
        Evaluator {
            op,
            frame: Some(frame),
            symbol: None,
        }
    }

    pub fn eval(&mut self, e: &InvariantExpr) -> Result<RationalFunction> {
        use InvariantExpr::*;
        let m = self.op.nvars();
        Ok(match e {
            Catalog(c) => {
                if self.symbol.is_none() {
                    self.symbol = Some(symbol(self.op).symbolic_form());
                }
                c.evaluate(self.symbol.as_ref().expect("symbol cached"))?
            }
            Free => apply_op(self.op, &RationalFunction::one(m))?,
            Box(inner) => {
                let g = self.eval(inner)?;
                apply_op(self.op, &g)?
            }
            Tresse(inner, i) => {
                let f = self.eval(inner)?;
                let frame = self
                    .frame
                    .as_ref()
                    .ok_or_else(|| Error::Invalid("Tresse derivative needs a frame".into()))?;
                if *i >= frame.values.len() {
                    return Err(Error::Invalid(format!("frame has no slot {}", i + 1)));
                }
                frame.tresse(&f)?.swap_remove(*i)
            }
            Var(i) => {
                if *i >= m {
                    return Err(Error::dim(format!("operator has no variable {i}")));
                }
                RationalFunction::var(m, *i)
            }
            Const(q) => RationalFunction::constant(m, q.clone()),
            Add(a, b) => &self.eval(a)? + &self.eval(b)?,
            Sub(a, b) => &self.eval(a)? - &self.eval(b)?,
            Mul(a, b) => &self.eval(a)? * &self.eval(b)?,
            Div(a, b) => self.eval(a)?.checked_div(&self.eval(b)?)?,
            Neg(a) => -self.eval(a)?,
            Pow(a, k) => self.eval(a)?.pow(*k)?,
        })
    }
}

/// `e` on `A`, as an exact rational function of the operator's variables.
/// Tresse derivatives need [`eval_invariant_in_frame`].
pub fn eval_invariant(e: &InvariantExpr, a: &LinearDiffOp) -> Result<RationalFunction> {
    Evaluator::new(a).eval(e)
}

pub fn eval_invariant_in_frame(
    e: &InvariantExpr,
    a: &LinearDiffOp,
    frame: &InvariantFrame,
) -> Result<RationalFunction> {
    let values = frame.evaluate(a)?;
    Evaluator::with_frame(a, FrameValues::new(values)).eval(e)
}

/// `□(g)`, identical to applying the operator.
pub fn box_apply(a: &LinearDiffOp, g: &RationalFunction) -> Result<RationalFunction> {
    apply_op(a, g)
}

// ---------------------------------------------------------------------------
// parser

pub fn parse_invariant(text: &str, vars: &Vars) -> Result<InvariantExpr> {
    let mut p = Parser::new(text, vars);
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected input"));
    }
    Ok(e)
}

pub fn parse_frame(text: &str, vars: &Vars) -> Result<Vec<InvariantExpr>> {
    let mut p = Parser::new(text, vars);
    let mut out = vec![p.expr()?];
    loop {
        p.skip_ws();
        if p.eat(b',') {
            out.push(p.expr()?);
        } else if p.pos < p.src.len() {
            return Err(p.error("expected `,` or end of frame"));
        } else {
            return Ok(out);
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a Vars,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, vars: &'a Vars) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
            vars,
        }
    }

    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<InvariantExpr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = InvariantExpr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = InvariantExpr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<InvariantExpr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = InvariantExpr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                let rhs = self.unary()?;
                lhs = match (lhs, rhs) {
                    (InvariantExpr::Const(a), InvariantExpr::Const(b)) if !b.is_zero() => {
                        InvariantExpr::Const(a / b)
                    }
                    (a, b) => InvariantExpr::Div(Box::new(a), Box::new(b)),
                };
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<InvariantExpr> {
        if self.eat(b'-') {
            return Ok(match self.unary()? {
                InvariantExpr::Const(q) => InvariantExpr::Const(-q),
                e => InvariantExpr::Neg(Box::new(e)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<InvariantExpr> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let paren = self.eat(b'(');
        let negative = self.eat(b'-');
        self.skip_ws();
        let k = self.integer()?;
        if paren {
            self.expect(b')')?;
        }
        let k = i32::try_from(k).map_err(|_| self.error("exponent too large"))?;
        Ok(InvariantExpr::Pow(Box::new(base), if negative { -k } else { k }))
    }

    fn integer(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| Error::Syntax {
                offset: start,
                message: "integer too large".into(),
            })
    }

    fn ident(&mut self) -> &'a str {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier")
    }

    fn atom(&mut self) -> Result<InvariantExpr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(InvariantExpr::Const(Q::from_integer(BigInt::from(v))))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let name = self.ident();
                if let Some(c) = CatalogInvariant::from_token(name) {
                    if self.eat(b'(') {
                        self.skip_ws();
                        if self.ident() != "sym" {
                            return Err(self.error("catalog invariants take only `(sym)`"));
                        }
                        self.expect(b')')?;
                    }
                    return Ok(InvariantExpr::Catalog(c));
                }
                match name {
                    "free" => Ok(InvariantExpr::Free),
                    "box" => {
                        self.expect(b'(')?;
                        let e = self.expr()?;
                        self.expect(b')')?;
                        Ok(InvariantExpr::boxed(e))
                    }
                    "tresse" => {
                        self.expect(b'(')?;
                        let e = self.expr()?;
                        self.expect(b',')?;
                        self.skip_ws();
                        let slot = self.integer()?;
                        self.expect(b')')?;
                        if slot == 0 {
                            return Err(self.error("frame slots are numbered from 1"));
                        }
                        Ok(InvariantExpr::tresse(e, slot as usize - 1))
                    }
                    _ => match self.vars.index_of(name) {
                        Some(i) => Ok(InvariantExpr::Var(i)),
                        None => Err(Error::Syntax {
                            offset: start,
                            message: format!("unknown name `{name}`"),
                        }),
                    },
                }
            }
            Some(_) => Err(self.error("unexpected character")),
        }
    }
}
