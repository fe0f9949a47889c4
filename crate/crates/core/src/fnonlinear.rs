//! Operators whose coefficients depend rationally on the unknown `u`.
//!
//! An [`FOperator`] is a linear differential operator in `x₁..x_n` whose
//! coefficients are rational in `(x, u)`; it never differentiates in `u`, so
//! it commutes with multiplication by `u`. Restricting it to the graph of a
//! function `f` gives a linear operator `A_f`, and `A_w(f) = A_f(f)` is the
//! nonlinear action.

use serde::Serialize;

use crate::diffop::{apply_op, pushforward, DiffMap, LinearDiffOp};
use crate::domain::DomainBox;
use crate::error::{Error, Result};
use crate::natinv::{
    compare_models, eval_invariant, jacobian_certificate, parse_frame, sample_model, EquivOptions,
    EquivalenceReport, GeneralPosition, InvariantExpr, InvariantFrame, ModelFingerprint, ModelFunctions,
    ModelOptions,
};
use crate::poly::{MultiIndex, RationalFunction, Vars};

/// Name of the distinguished variable.
pub const U: &str = "u";

#[derive(Clone, Debug, PartialEq)]
pub struct FOperator {
    op: LinearDiffOp,
}

impl FOperator {
    /// Wraps an operator over `(x₁..x_n, u)` with `n` coordinates.
    pub fn new(op: LinearDiffOp) -> Result<Self> {
        if op.nvars() != op.n() + 1 || op.vars().names()[op.n()] != U {
            return Err(Error::dim("an F-operator has variables x₁..x_n followed by u"));
        }
        Ok(FOperator { op })
    }

    pub fn parse<'a>(
        coordinates: &[&str],
        level: u32,
        coeffs: impl IntoIterator<Item = (MultiIndex, &'a str)>,
    ) -> Result<Self> {
        if coordinates.contains(&U) {
            return Err(Error::Invalid("`u` is reserved and cannot be a coordinate".into()));
        }
        let vars = Vars::new(coordinates.iter().copied().chain([U]));
        FOperator::new(LinearDiffOp::parse(vars, coordinates.len(), level, coeffs)?)
    }

    /// A linear operator read as an F-operator with `u`-free coefficients.
    pub fn from_linear(a: &LinearDiffOp) -> Result<Self> {
        if a.nvars() != a.n() {
            return Err(Error::dim("the operator already has parameters"));
        }
        let names: Vec<&str> = a.vars().names().iter().map(String::as_str).chain([U]).collect();
        if a.vars().index_of(U).is_some() {
            return Err(Error::Invalid("`u` is reserved and cannot be a coordinate".into()));
        }
        FOperator::new(a.map_coeffs(Vars::new(names), |c| Ok(c.extend(1)))?)
    }

    pub fn op(&self) -> &LinearDiffOp {
        &self.op
    }

    pub fn n(&self) -> usize {
        self.op.n()
    }

    pub fn level(&self) -> u32 {
        self.op.level()
    }

    pub fn vars(&self) -> &Vars {
        self.op.vars()
    }

    pub fn u_index(&self) -> usize {
        self.op.n()
    }

    pub fn coordinate_vars(&self) -> Vars {
        Vars::new(self.vars().names()[..self.n()].iter().map(String::as_str))
    }

    pub fn is_u_independent(&self) -> bool {
        let u = self.u_index();
        self.op.coeffs().values().all(|c| !c.depends_on(u))
    }

    /// `φ⁽⁰⁾_* A` for `φ⁽⁰⁾(x, u) = (φ(x), u)`.
    pub fn pushforward(&self, phi: &DiffMap) -> Result<Self> {
        FOperator::new(pushforward(&self.op, phi)?)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        FOperator::new(self.op.add(&other.op)?)
    }

    pub fn format(&self) -> String {
        self.op.format()
    }
}

/// Coefficients `a_σ(x, f)` for `f` over `vars`, whose first `n` variables
/// are the coordinates.
fn restrict_in(a: &FOperator, f: &RationalFunction, vars: Vars) -> Result<LinearDiffOp> {
    let n = a.n();
    let m = vars.len();
    if f.nvars() != m || m < n {
        return Err(Error::dim("the function must be defined over the coordinates"));
    }
    let mut images: Vec<RationalFunction> = (0..n).map(|i| RationalFunction::var(m, i)).collect();
    images.push(f.clone());
    a.op.map_coeffs(vars, |c| {
        c.substitute(&images).map_err(|e| match e {
            Error::ZeroDenominator | Error::Pole(_) => {
                Error::Pole(format!("coefficient {} has a pole along the graph of u = f", c.format(a.vars().names())))
            }
            e => e,
        })
    })
}

/// `A_f`: the coefficients evaluated on the graph `u = f(x)`.
pub fn restrict_at_function(a: &FOperator, f: &RationalFunction) -> Result<LinearDiffOp> {
    restrict_in(a, f, a.coordinate_vars())
}

/// `A_w(f) = A_f(f)`
pub fn nonlinear_apply(a: &FOperator, f: &RationalFunction) -> Result<RationalFunction> {
    apply_op(&restrict_at_function(a, f)?, f)
}

/// `d/dε e(A_{f+ε})` at `ε = 0`, with `ε` adjoined as a symbol.
pub fn vertical_derivative(e: &InvariantExpr, a: &FOperator, f: &RationalFunction) -> Result<RationalFunction> {
    let n = a.n();
    if f.nvars() != n {
        return Err(Error::dim("the function must be defined over the coordinates"));
    }
    let mut names: Vec<String> = a.coordinate_vars().names().to_vec();
    let mut eps = "eps".to_string();
    while names.contains(&eps) {
        eps.push('_');
    }
    names.push(eps);
    let shifted = &f.extend(1) + &RationalFunction::var(n + 1, n);
    let b = restrict_in(a, &shifted, Vars::new(names.iter().map(String::as_str)))?;
    let value = eval_invariant(e, &b)?;
    let mut at_zero: Vec<RationalFunction> = (0..n).map(|i| RationalFunction::var(n, i)).collect();
    at_zero.push(RationalFunction::zero(n));
    value
        .derive(n)
        .substitute(&at_zero)
        .map_err(|_| Error::Pole("the derivative has a pole at ε = 0".into()))
}

/// An F-operator with a frame `(u, I₁..I_n)` and a box over `(x, u)`.
#[derive(Clone, Debug)]
pub struct AdjustedTriple {
    op: FOperator,
    domain: DomainBox,
    frame: InvariantFrame,
}

impl AdjustedTriple {
    pub fn new(op: FOperator, domain: DomainBox, frame: InvariantFrame) -> Result<Self> {
        if domain.dim() != op.n() + 1 || domain.names() != op.vars().names() {
            return Err(Error::dim("the box must cover x₁..x_n and u in order"));
        }
        if frame.len() != op.n() {
            return Err(Error::dim(format!("a frame needs u and {} invariants", op.n())));
        }
        Ok(AdjustedTriple { op, domain, frame })
    }

    /// Reads a frame `u, I₁, …, I_n` and a box such as `x1:1:2,x2:0:1,u:1:2`.
    pub fn parse(op: FOperator, frame: &str, domain: &str) -> Result<Self> {
        let mut exprs = parse_frame(frame, op.vars())?;
        if exprs.first() != Some(&InvariantExpr::Var(op.u_index())) {
            return Err(Error::Invalid("the first frame slot must be `u`".into()));
        }
        exprs.remove(0);
        let domain = DomainBox::parse(domain, op.vars())?;
        AdjustedTriple::new(op, domain, InvariantFrame::new(exprs)?)
    }

    pub fn op(&self) -> &FOperator {
        &self.op
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn frame(&self) -> &InvariantFrame {
        &self.frame
    }

    pub fn frame_text(&self) -> String {
        format!("{U}, {}", self.frame.format(self.op.vars()))
    }

    /// The same frame over `φ⁽⁰⁾_* A` on a new box.
    pub fn pushforward(&self, phi: &DiffMap, domain: DomainBox) -> Result<Self> {
        AdjustedTriple::new(self.op.pushforward(phi)?, domain, self.frame.clone())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AdjustedCertificate {
    pub ok: bool,
    /// 1-based slots `I_i` whose value on `A` still depends on `u`.
    pub u_dependent_slots: Vec<usize>,
    pub jacobian: GeneralPosition,
}

impl AdjustedCertificate {
    pub fn reason(&self) -> String {
        if !self.u_dependent_slots.is_empty() {
            let slots: Vec<String> = self.u_dependent_slots.iter().map(|s| format!("I{s}")).collect();
            return format!("{} depend on u", slots.join(", "));
        }
        self.jacobian.reason()
    }

    pub fn require(&self) -> Result<()> {
        if self.ok {
            Ok(())
        } else {
            Err(Error::degenerate("adjusted triple", self.reason()))
        }
    }
}

/// Checks `dI_i(A)/du ≡ 0` for every frame slot and that `(u, I₁..I_n)` has
/// a nonvanishing Jacobian in `(x, u)` on the box grid.
pub fn verify_adjusted(triple: &AdjustedTriple, points: usize) -> Result<AdjustedCertificate> {
    let op = triple.op.op();
    let u = triple.op.u_index();
    let values = triple.frame.evaluate(op)?;
    let u_dependent_slots: Vec<usize> = values
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.derive(u).is_zero())
        .map(|(i, _)| i + 1)
        .collect();
    let mut fs = vec![RationalFunction::var(op.nvars(), u)];
    fs.extend(values);
    let all: Vec<usize> = (0..op.nvars()).collect();
    let jacobian = jacobian_certificate(&fs, &all, &triple.domain, points, op.vars().names())?;
    Ok(AdjustedCertificate {
        ok: u_dependent_slots.is_empty() && jacobian.ok,
        u_dependent_slots,
        jacobian,
    })
}

fn extended_functions(triple: &AdjustedTriple, points: usize) -> Result<ModelFunctions> {
    verify_adjusted(triple, points)?.require()?;
    ModelFunctions::new(triple.op.op(), &triple.frame, &[triple.op.u_index()])
}

/// Samples `(x, u) ↦ (u, I(A), J̃_α(A))`, where `J̃_α` is taken fibrewise
/// with `u` held fixed.
pub fn extended_model_map(triple: &AdjustedTriple, opts: &ModelOptions) -> Result<ModelFingerprint> {
    let functions = extended_functions(triple, opts.grid_points)?;
    sample_model(
        &functions,
        triple.frame_text(),
        triple.op.vars().names(),
        &triple.domain,
        opts,
    )
}

/// Equivalence of two triples under maps `(x, u) ↦ (φ(x), u)`. Both must use
/// the same frame; `u` is matched exactly.
pub fn extended_equivalence_check(
    t1: &AdjustedTriple,
    t2: &AdjustedTriple,
    opts: &EquivOptions,
) -> Result<EquivalenceReport> {
    if t1.op.n() != t2.op.n() || t1.op.level() != t2.op.level() {
        return Err(Error::dim("operators differ in dimension or order"));
    }
    if t1.frame.exprs() != t2.frame.exprs() {
        return Err(Error::Invalid("both triples must use the same frame".into()));
    }
    let f1 = extended_functions(t1, opts.grid_points)?;
    let f2 = extended_functions(t2, opts.grid_points)?;
    compare_models(
        &f1,
        t1.op.op(),
        &t1.domain,
        &f2,
        t2.op.op(),
        &t2.domain,
        t1.frame_text(),
        opts,
    )
}
