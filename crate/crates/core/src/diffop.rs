//! Scalar linear differential operators with rational-function coefficients,
//! and their pushforward under polynomial diffeomorphisms with polynomial
//! inverses.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{binomial, MultiIndex, Polynomial, RationalFunction, Vars, Q};
use crate::transvect::{default_form_vars, Form, NAryForm};

/// `A = Σ_{|α|≤k} a_α ∂^α`.
///
/// The first `n` variables are coordinates and are differentiated; any
/// further variables are parameters the coefficients may depend on (the
/// value `u` of the unknown function, a perturbation variable). `level` is
/// the order `k` the operator is viewed at; its actual order may be lower,
/// in which case the symbol vanishes.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearDiffOp {
    vars: Vars,
    n: usize,
    level: u32,
    coeffs: BTreeMap<MultiIndex, RationalFunction>,
}

impl LinearDiffOp {
    pub fn new(
        vars: Vars,
        n: usize,
        level: u32,
        coeffs: impl IntoIterator<Item = (MultiIndex, RationalFunction)>,
    ) -> Result<Self> {
        if n == 0 || n > vars.len() {
            return Err(Error::dim(format!("{n} coordinates among {} variables", vars.len())));
        }
        let mut map = BTreeMap::new();
        for (alpha, c) in coeffs {
            if alpha.len() != n {
                return Err(Error::dim(format!("multi-index {alpha} does not have {n} entries")));
            }
            if alpha.order() > level {
                return Err(Error::Invalid(format!("term {alpha} exceeds order {level}")));
            }
            if c.nvars() != vars.len() {
                return Err(Error::dim("coefficient variable count differs from the operator's"));
            }
            if !c.is_zero() {
                map.insert(alpha, c);
            }
        }
        Ok(LinearDiffOp {
            vars,
            n,
            level,
            coeffs: map,
        })
    }

    /// Parses coefficients given as `(multi-index, expression)` pairs.
    pub fn parse<'a>(
        vars: Vars,
        n: usize,
        level: u32,
        coeffs: impl IntoIterator<Item = (MultiIndex, &'a str)>,
    ) -> Result<Self> {
        let parsed = coeffs
            .into_iter()
            .map(|(a, s)| Ok((a, vars.parse(s)?)))
            .collect::<Result<Vec<_>>>()?;
        LinearDiffOp::new(vars, n, level, parsed)
    }

    pub fn zero(vars: Vars, n: usize, level: u32) -> Self {
        LinearDiffOp {
            vars,
            n,
            level,
            coeffs: BTreeMap::new(),
        }
    }

    /// Multiplication by `f`, as an order-0 operator.
    pub fn multiplication(vars: Vars, n: usize, f: RationalFunction) -> Result<Self> {
        LinearDiffOp::new(vars, n, 0, [(MultiIndex::zero(n), f)])
    }

    pub fn identity(vars: Vars, n: usize) -> Self {
        let one = RationalFunction::one(vars.len());
        LinearDiffOp::multiplication(vars, n, one).expect("identity operator")
    }

    /// `∂/∂x_i`
    pub fn partial(vars: Vars, n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::dim(format!("no coordinate {i}")));
        }
        let one = RationalFunction::one(vars.len());
        LinearDiffOp::new(vars, n, 1, [(MultiIndex::unit(n, i), one)])
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    /// Number of coordinates.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Highest order with a nonzero coefficient; `None` for the zero operator.
    pub fn order(&self) -> Option<u32> {
        self.coeffs.keys().map(|a| a.order()).max()
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, RationalFunction> {
        &self.coeffs
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> RationalFunction {
        self.coeffs
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| RationalFunction::zero(self.nvars()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Same coefficients viewed at a (not lower) level.
    pub fn with_level(&self, level: u32) -> Result<Self> {
        if self.order().is_some_and(|o| o > level) {
            return Err(Error::Invalid(format!("operator has order above {level}")));
        }
        Ok(LinearDiffOp {
            level,
            ..self.clone()
        })
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.vars != other.vars || self.n != other.n {
            return Err(Error::dim("operators act on different variables"));
        }
        Ok(())
    }

    fn combine(&self, other: &Self, sign: i64) -> Result<Self> {
        self.check_compatible(other)?;
        let mut coeffs = self.coeffs.clone();
        for (a, c) in &other.coeffs {
            let c = if sign < 0 { -c } else { c.clone() };
            accumulate(&mut coeffs, a.clone(), c);
        }
        Ok(LinearDiffOp {
            level: self.level.max(other.level),
            coeffs,
            ..self.clone()
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1)
    }

    /// `f·A`
    pub fn left_multiply(&self, f: &RationalFunction) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(a, c)| (a.clone(), c * f))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        LinearDiffOp {
            coeffs,
            ..self.clone()
        }
    }

    /// Applies `g` to every coefficient, producing an operator over `vars`
    /// (which must keep the same `n` coordinates first).
    pub fn map_coeffs(
        &self,
        vars: Vars,
        mut g: impl FnMut(&RationalFunction) -> Result<RationalFunction>,
    ) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (a, c) in &self.coeffs {
            coeffs.push((a.clone(), g(c)?));
        }
        LinearDiffOp::new(vars, self.n, self.level, coeffs)
    }

    /// Coordinate form `Σ a_α ∂^α` rendered with the operator's variable names.
    pub fn format(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let names = self.vars.names();
        let mut parts = Vec::new();
        for (a, c) in self.coeffs.iter().rev() {
            let mut d = String::new();
            for (i, &e) in a.entries().iter().enumerate() {
                match e {
                    0 => {}
                    1 => d.push_str(&format!("d{}", names[i])),
                    _ => d.push_str(&format!("d{}^{e}", names[i])),
                }
            }
            let c = self.vars.format(c);
            parts.push(if d.is_empty() { format!("({c})") } else { format!("({c})*{d}") });
        }
        parts.join(" + ")
    }
}

fn accumulate(map: &mut BTreeMap<MultiIndex, RationalFunction>, key: MultiIndex, c: RationalFunction) {
    if c.is_zero() {
        return;
    }
    match map.get_mut(&key) {
        Some(v) => {
            let s = &*v + &c;
            if s.is_zero() {
                map.remove(&key);
            } else {
                *v = s;
            }
        }
        None => {
            map.insert(key, c);
        }
    }
}

/// `∂^α` over the first `α.len()` variables of `f`.
fn partial_multi(f: &RationalFunction, alpha: &MultiIndex) -> RationalFunction {
    let mut full = alpha.entries().to_vec();
    full.resize(f.nvars(), 0);
    f.derive_multi(&MultiIndex::new(full))
}

/// `∂^α f`, reusing `∂^β f` for the lower `β` already computed.
fn derived_memo(f: &RationalFunction, alpha: &MultiIndex, memo: &mut HashMap<MultiIndex, RationalFunction>) -> RationalFunction {
    if let Some(d) = memo.get(alpha) {
        return d.clone();
    }
    let d = match alpha.entries().iter().rposition(|&e| e > 0) {
        None => f.clone(),
        Some(i) => {
            let mut lower = alpha.entries().to_vec();
            lower[i] -= 1;
            derived_memo(f, &MultiIndex::new(lower), memo).derive(i)
        }
    };
    memo.insert(alpha.clone(), d.clone());
    d
}

/// `Σ_α a_α ∂^α f`
pub fn apply_op(a: &LinearDiffOp, f: &RationalFunction) -> Result<RationalFunction> {
    if f.nvars() != a.nvars() {
        return Err(Error::dim("function and operator have different variables"));
    }
    let mut out = RationalFunction::zero(a.nvars());
    let mut derived: HashMap<MultiIndex, RationalFunction> = HashMap::new();
    for (alpha, c) in &a.coeffs {
        let d = derived_memo(f, alpha, &mut derived);
        if !d.is_zero() {
            out = &out + &(c * &d);
        }
    }
    Ok(out)
}

fn multinomial_choose(alpha: &MultiIndex, gamma: &MultiIndex) -> BigInt {
    alpha
        .entries()
        .iter()
        .zip(gamma.entries())
        .map(|(&a, &g)| binomial(a, g))
        .product()
}

/// `A∘B`, by the Leibniz rule
/// `a_α∂^α ∘ b_β∂^β = Σ_{γ≤α} C(α,γ) a_α (∂^γ b_β) ∂^{α−γ+β}`.
pub fn compose(a: &LinearDiffOp, b: &LinearDiffOp) -> Result<LinearDiffOp> {
    a.check_compatible(b)?;
    let mut coeffs = BTreeMap::new();
    let mut derived: HashMap<(MultiIndex, MultiIndex), RationalFunction> = HashMap::new();
    for (alpha, ca) in &a.coeffs {
        for (beta, cb) in &b.coeffs {
            for gamma in sub_indices(alpha) {
                let db = derived
                    .entry((beta.clone(), gamma.clone()))
                    .or_insert_with(|| partial_multi(cb, &gamma))
                    .clone();
                if db.is_zero() {
                    continue;
                }
                let k = Q::from_integer(multinomial_choose(alpha, &gamma));
                let key = alpha.checked_sub(&gamma).expect("gamma ≤ alpha").add(beta);
                accumulate(&mut coeffs, key, (ca * &db).scale(&k));
            }
        }
    }
    Ok(LinearDiffOp {
        vars: a.vars.clone(),
        n: a.n,
        level: a.level + b.level,
        coeffs,
    })
}

fn sub_indices(alpha: &MultiIndex) -> Vec<MultiIndex> {
    let mut out = vec![MultiIndex::zero(alpha.len())];
    for (i, &a) in alpha.entries().iter().enumerate() {
        let mut next = Vec::with_capacity(out.len() * (a as usize + 1));
        for g in &out {
            for v in 0..=a {
                next.push(g.with(i, v));
            }
        }
        out = next;
    }
    out
}

/// Top-order coefficients of an operator at its level.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolField {
    vars: Vars,
    n: usize,
    k: u32,
    coeffs: BTreeMap<MultiIndex, RationalFunction>,
}

impl SymbolField {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, RationalFunction> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The symbol as a form in `ξ`-variables (`x, y[, z]`) whose coefficients
    /// are rational functions of the base point. Monomial `ξ^α` carries
    /// `a_α` directly.
    pub fn symbolic_form(&self) -> Form<RationalFunction> {
        Form::new(
            default_form_vars(self.n),
            self.k,
            self.vars.len(),
            self.coeffs.iter().map(|(a, c)| (a.clone(), c.clone())),
        )
        .expect("symbol keys are homogeneous")
    }
}

pub fn symbol(a: &LinearDiffOp) -> SymbolField {
    let coeffs = a
        .coeffs
        .iter()
        .filter(|(alpha, _)| alpha.order() == a.level)
        .map(|(alpha, c)| (alpha.clone(), c.clone()))
        .collect();
    SymbolField {
        vars: a.vars.clone(),
        n: a.n,
        k: a.level,
        coeffs,
    }
}

/// The symbol's value at a point (all variables, parameters included) as a
/// numeric form.
pub fn symbol_form_at(sigma: &SymbolField, point: &[Q]) -> Result<NAryForm> {
    if point.len() != sigma.vars.len() {
        return Err(Error::dim("point does not match the symbol's variables"));
    }
    let mut coeffs = Vec::with_capacity(sigma.coeffs.len());
    for (a, c) in &sigma.coeffs {
        coeffs.push((a.clone(), c.eval(point)?));
    }
    Form::new(default_form_vars(sigma.n), sigma.k, (), coeffs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapKind {
    Affine,
    Triangular,
    /// Composition of maps of the other kinds.
    Composite,
}

/// Polynomial diffeomorphism of the coordinates with a stored polynomial
/// inverse. The round trip is verified exactly at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffMap {
    kind: MapKind,
    forward: Vec<Polynomial>,
    inverse: Vec<Polynomial>,
}

fn identity_images(n: usize) -> Vec<Polynomial> {
    (0..n).map(|i| Polynomial::var(n, i)).collect()
}

fn compose_images(outer: &[Polynomial], inner: &[Polynomial]) -> Vec<Polynomial> {
    outer.iter().map(|p| p.substitute(inner)).collect()
}

impl DiffMap {
    /// Checks both round trips.
    pub fn from_parts(kind: MapKind, forward: Vec<Polynomial>, inverse: Vec<Polynomial>) -> Result<Self> {
        let n = forward.len();
        if n == 0 || inverse.len() != n || forward.iter().chain(&inverse).any(|p| p.nvars() != n) {
            return Err(Error::dim("map components must be n polynomials in n variables"));
        }
        let id = identity_images(n);
        if compose_images(&forward, &inverse) != id || compose_images(&inverse, &forward) != id {
            return Err(Error::NotInvertible("stored inverse fails the round trip".into()));
        }
        Ok(DiffMap {
            kind,
            forward,
            inverse,
        })
    }

    /// `y = Mx + b`
    pub fn affine(m: &[Vec<Q>], b: &[Q]) -> Result<Self> {
        let n = m.len();
        if b.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(Error::dim("affine map needs an n×n matrix and an n-vector"));
        }
        let minv = invert_matrix(m).ok_or_else(|| Error::NotInvertible("singular linear part".into()))?;
        let affine = |m: &[Vec<Q>], shift: &[Q]| -> Vec<Polynomial> {
            (0..n)
                .map(|i| {
                    let mut p = Polynomial::constant(n, shift[i].clone());
                    for j in 0..n {
                        p.add_term(MultiIndex::unit(n, j), m[i][j].clone());
                    }
                    p
                })
                .collect()
        };
        // x = M⁻¹y − M⁻¹b
        let shift: Vec<Q> = (0..n)
            .map(|i| -(0..n).fold(Q::zero(), |acc, j| acc + &minv[i][j] * &b[j]))
            .collect();
        DiffMap::from_parts(MapKind::Affine, affine(m, b), affine(&minv, &shift))
    }

    /// `y_i = c_i·x_i + p_i(x_1, …, x_{i−1})` with nonzero constants `c_i`;
    /// inverted by back-substitution.
    pub fn triangular(forward: Vec<Polynomial>) -> Result<Self> {
        let n = forward.len();
        let mut inverse: Vec<Polynomial> = Vec::with_capacity(n);
        for (i, f) in forward.iter().enumerate() {
            if f.nvars() != n {
                return Err(Error::dim("triangular map components must use n variables"));
            }
            let unit = MultiIndex::unit(n, i);
            let c = f.coeff(&unit);
            let rest = f - &Polynomial::monomial(n, unit, c.clone());
            let later_free = (i..n).all(|j| rest.degree_in(j) == 0);
            if c.is_zero() || !later_free {
                return Err(Error::NotInvertible(format!(
                    "component {} is not c·x{} plus a polynomial in earlier coordinates",
                    i + 1,
                    i + 1
                )));
            }
            // x_i = (y_i − p_i(x_1(y), …)) / c_i
            let mut images = inverse.clone();
            images.extend((i..n).map(|_| Polynomial::zero(n)));
            let p = rest.substitute(&images);
            let xi = (&Polynomial::var(n, i) - &p).scale(&(Q::one() / c));
            inverse.push(xi);
        }
        DiffMap::from_parts(MapKind::Triangular, forward, inverse)
    }

    pub fn identity(n: usize) -> Self {
        DiffMap {
            kind: MapKind::Affine,
            forward: identity_images(n),
            inverse: identity_images(n),
        }
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.forward.len()
    }

    pub fn forward(&self) -> &[Polynomial] {
        &self.forward
    }

    pub fn inverse_images(&self) -> &[Polynomial] {
        &self.inverse
    }

    pub fn inverse(&self) -> DiffMap {
        DiffMap {
            kind: self.kind,
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    /// `self ∘ inner`
    pub fn after(&self, inner: &DiffMap) -> Result<DiffMap> {
        if self.n() != inner.n() {
            return Err(Error::dim("maps have different dimensions"));
        }
        DiffMap::from_parts(
            MapKind::Composite,
            compose_images(&self.forward, &inner.forward),
            compose_images(&inner.inverse, &self.inverse),
        )
    }

    /// `φ(p)` on coordinates.
    pub fn apply(&self, p: &[Q]) -> Vec<Q> {
        self.forward.iter().map(|f| f.eval(p)).collect()
    }

    /// Images of all `nvars` variables of a function space whose first `n`
    /// are the coordinates; parameters map to themselves.
    fn images(polys: &[Polynomial], nvars: usize) -> Vec<RationalFunction> {
        let n = polys.len();
        let positions: Vec<usize> = (0..n).collect();
        let mut out: Vec<RationalFunction> = polys
            .iter()
            .map(|p| RationalFunction::from_poly(p.embed(nvars, &positions)))
            .collect();
        out.extend((n..nvars).map(|i| RationalFunction::var(nvars, i)));
        out
    }

    /// `g ↦ g∘φ` on functions of `nvars` variables.
    pub fn pull_back(&self, g: &RationalFunction) -> Result<RationalFunction> {
        g.substitute(&DiffMap::images(&self.forward, g.nvars()))
    }

    /// `g ↦ g∘φ⁻¹`
    pub fn push_function(&self, g: &RationalFunction) -> Result<RationalFunction> {
        g.substitute(&DiffMap::images(&self.inverse, g.nvars()))
    }
}

/// The inverse map, which is stored exactly.
pub fn invert_map(phi: &DiffMap) -> DiffMap {
    phi.inverse()
}

fn invert_matrix(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = Q::one() / &a[col][col];
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (v, p) in a[r].iter_mut().zip(&pivot_row) {
                    *v -= &f * p;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// `φ_*A`, characterized by `(φ_*A)(g) = A(g∘φ)∘φ⁻¹`.
///
/// Each `∂/∂x_i` becomes `Σ_j (∂φ_j/∂x_i ∘ φ⁻¹) ∂/∂y_j`; `∂^α` is the
/// composition of those first-order operators, and coefficients are composed
/// with `φ⁻¹`. Parameters are carried along unchanged.
pub fn pushforward(a: &LinearDiffOp, phi: &DiffMap) -> Result<LinearDiffOp> {
    let n = a.n;
    if phi.n() != n {
        return Err(Error::dim("map and operator have different dimensions"));
    }
    let m = a.nvars();
    let positions: Vec<usize> = (0..n).collect();
    let fields: Vec<LinearDiffOp> = (0..n)
        .map(|i| {
            let coeffs = (0..n)
                .map(|j| {
                    let d = phi.forward[j].derive(i).embed(m, &positions);
                    let c = phi.push_function(&RationalFunction::from_poly(d))?;
                    Ok((MultiIndex::unit(n, j), c))
                })
                .collect::<Result<Vec<_>>>()?;
            LinearDiffOp::new(a.vars.clone(), n, 1, coeffs)
        })
        .collect::<Result<_>>()?;

    let mut powers: HashMap<MultiIndex, LinearDiffOp> = HashMap::new();
    powers.insert(MultiIndex::zero(n), LinearDiffOp::identity(a.vars.clone(), n));
    let mut keys: Vec<&MultiIndex> = a.coeffs.keys().collect();
    keys.sort_by_key(|k| k.order());
    let mut out = LinearDiffOp::zero(a.vars.clone(), n, a.level);
    for alpha in keys {
        let d = pushed_partial(alpha, &fields, &mut powers)?;
        let c = phi.push_function(&a.coeffs[alpha])?;
        out = out.add(&d.left_multiply(&c))?;
    }
    out.level = a.level;
    Ok(out)
}

fn pushed_partial(
    alpha: &MultiIndex,
    fields: &[LinearDiffOp],
    cache: &mut HashMap<MultiIndex, LinearDiffOp>,
) -> Result<LinearDiffOp> {
    if let Some(d) = cache.get(alpha) {
        return Ok(d.clone());
    }
    let i = alpha.entries().iter().position(|&e| e > 0).expect("nonzero index");
    let rest = alpha.checked_sub(&MultiIndex::unit(alpha.len(), i)).expect("positive entry");
    let inner = pushed_partial(&rest, fields, cache)?;
    let d = compose(&fields[i], &inner)?;
    cache.insert(alpha.clone(), d.clone());
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars2() -> Vars {
        Vars::new(["x1", "x2"])
    }

    fn rf(v: &Vars, s: &str) -> RationalFunction {
        v.parse(s).unwrap()
    }

    fn op(v: &Vars, n: usize, level: u32, terms: &[([u32; 2], &str)]) -> LinearDiffOp {
        LinearDiffOp::parse(
            v.clone(),
            n,
            level,
            terms.iter().map(|(a, s)| (MultiIndex::from(*a), *s)),
        )
        .unwrap()
    }

    fn poly(v: &Vars, s: &str) -> Polynomial {
        rf(v, s).as_polynomial().unwrap().clone()
    }

    #[test]
    fn apply_examples() {
        let v = vars2();
        let a = op(&v, 2, 2, &[([2, 0], "1"), ([0, 1], "x1"), ([0, 0], "x1+x2")]);
        assert_eq!(apply_op(&a, &rf(&v, "1")).unwrap(), rf(&v, "x1+x2"));
        let d2 = op(&v, 2, 2, &[([2, 0], "1")]);
        assert_eq!(apply_op(&d2, &rf(&v, "x1^2")).unwrap(), rf(&v, "2"));
        let d = op(&v, 2, 1, &[([1, 0], "1")]);
        assert_eq!(apply_op(&d, &rf(&v, "1/(1-x1)")).unwrap(), rf(&v, "1/(1-x1)^2"));
    }

    #[test]
    fn compose_examples() {
        let v = vars2();
        let d1 = LinearDiffOp::partial(v.clone(), 2, 0).unwrap();
        let d2 = LinearDiffOp::partial(v.clone(), 2, 1).unwrap();
        let x1 = LinearDiffOp::multiplication(v.clone(), 2, rf(&v, "x1")).unwrap();
        let c = compose(&d1, &x1).unwrap();
        assert_eq!(c.coeffs(), op(&v, 2, 1, &[([1, 0], "x1"), ([0, 0], "1")]).coeffs());
        let a = op(&v, 2, 3, &[([3, 0], "x2"), ([1, 1], "1/x1")]);
        assert_eq!(compose(&a, &LinearDiffOp::identity(v.clone(), 2)).unwrap().coeffs(), a.coeffs());
        assert_eq!(compose(&d1, &d2).unwrap().coeffs(), op(&v, 2, 2, &[([1, 1], "1")]).coeffs());
    }

    #[test]
    fn compose_agrees_with_successive_application() {
        let v = vars2();
        let a = op(&v, 2, 2, &[([2, 0], "x2"), ([0, 1], "x1^2"), ([0, 0], "1/(1+x1)")]);
        let b = op(&v, 2, 2, &[([1, 1], "x1*x2"), ([1, 0], "3")]);
        let ab = compose(&a, &b).unwrap();
        for f in ["x1^3*x2^2", "x1*x2^4", "x2^5", "x1^4*x2"] {
            let f = rf(&v, f);
            let lhs = apply_op(&ab, &f).unwrap();
            let rhs = apply_op(&a, &apply_op(&b, &f).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn symbol_examples() {
        let v = vars2();
        let a = op(&v, 2, 2, &[([2, 0], "1"), ([0, 1], "x1")]);
        let s = symbol(&a);
        assert_eq!(s.coeffs().len(), 1);
        assert_eq!(s.coeffs()[&MultiIndex::from([2, 0])], rf(&v, "1"));
        let low = op(&v, 2, 2, &[([0, 1], "x1")]);
        assert!(symbol(&low).is_zero());

        let sigma = symbol(&op(&v, 2, 4, &[([4, 0], "1+x1"), ([2, 2], "6"), ([0, 4], "1")]));
        let z = |a: i64, b: i64| vec![Q::from_integer(a.into()), Q::from_integer(b.into())];
        let f0 = symbol_form_at(&sigma, &z(0, 0)).unwrap();
        assert_eq!(f0, NAryForm::parse(default_form_vars(2), 4, "x^4+6*x^2*y^2+y^4").unwrap());
        let f1 = symbol_form_at(&sigma, &z(1, 0)).unwrap();
        assert_eq!(f1, NAryForm::parse(default_form_vars(2), 4, "2*x^4+6*x^2*y^2+y^4").unwrap());
        let pole = symbol(&op(&v, 2, 1, &[([1, 0], "1/x1")]));
        assert!(matches!(symbol_form_at(&pole, &z(0, 0)), Err(Error::Pole(_))));
    }

    #[test]
    fn maps_and_inverses() {
        let v = vars2();
        let phi = DiffMap::triangular(vec![poly(&v, "x1"), poly(&v, "x2 + x1^2/4")]).unwrap();
        assert_eq!(phi.inverse_images()[1], poly(&v, "x2 - x1^2/4"));
        let q = |a: i64| Q::from_integer(a.into());
        let m = vec![vec![q(2), q(1)], vec![q(1), q(1)]];
        let aff = DiffMap::affine(&m, &[q(1), q(-3)]).unwrap();
        assert_eq!(aff.inverse_images()[0], poly(&v, "x1 - x2 - 4"));
        let singular = vec![vec![q(2), q(4)], vec![q(1), q(2)]];
        assert!(matches!(DiffMap::affine(&singular, &[q(0), q(0)]), Err(Error::NotInvertible(_))));
        assert!(DiffMap::triangular(vec![poly(&v, "x1 + x2"), poly(&v, "x2")]).is_err());
        let back = invert_map(&invert_map(&phi));
        assert_eq!(back, phi);
    }

    #[test]
    fn pushforward_examples() {
        let v1 = Vars::new(["x"]);
        let d = LinearDiffOp::partial(v1.clone(), 1, 0).unwrap();
        let two = DiffMap::affine(&[vec![Q::from_integer(2.into())]], &[Q::zero()]).unwrap();
        let pushed = pushforward(&d, &two).unwrap();
        assert_eq!(pushed.coeffs()[&MultiIndex::from([1])], rf(&v1, "2"));

        let v = vars2();
        let phi = DiffMap::triangular(vec![poly(&v, "x1"), poly(&v, "x2 + x1^2")]).unwrap();
        let d1 = LinearDiffOp::partial(v.clone(), 2, 0).unwrap();
        let p = pushforward(&d1, &phi).unwrap();
        assert_eq!(p.coeffs(), op(&v, 2, 1, &[([1, 0], "1"), ([0, 1], "2*x1")]).coeffs());

        let a = op(&v, 2, 4, &[([4, 0], "1+x1"), ([2, 2], "6"), ([0, 4], "1"), ([0, 0], "x2")]);
        assert_eq!(pushforward(&a, &DiffMap::identity(2)).unwrap(), a);
    }

    #[test]
    fn pushforward_matches_conjugation() {
        let v = vars2();
        let phi = DiffMap::triangular(vec![poly(&v, "2*x1 + 1"), poly(&v, "x2 + x1^2/4 - x1")]).unwrap();
        let a = op(&v, 2, 3, &[([3, 0], "1+x1"), ([1, 2], "x2"), ([0, 1], "1/(2+x1)"), ([0, 0], "x1*x2")]);
        let pa = pushforward(&a, &phi).unwrap();
        for g in ["x1^2*x2", "x2^3", "x1^4", "x1*x2^2+x2"] {
            let g = rf(&v, g);
            let lhs = apply_op(&pa, &g).unwrap();
            let rhs = phi.push_function(&apply_op(&a, &phi.pull_back(&g).unwrap()).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn parameters_pass_through_pushforward() {
        let v = Vars::new(["x1", "x2", "u"]);
        let a = LinearDiffOp::parse(
            v.clone(),
            2,
            2,
            [(MultiIndex::from([2, 0]), "u*x1"), (MultiIndex::from([0, 0]), "u^2")],
        )
        .unwrap();
        let v2 = vars2();
        let phi = DiffMap::triangular(vec![poly(&v2, "x1"), poly(&v2, "x2 + x1")]).unwrap();
        let p = pushforward(&a, &phi).unwrap();
        assert_eq!(p.coeff(&MultiIndex::from([0, 0])), rf(&v, "u^2"));
        assert_eq!(p.coeff(&MultiIndex::from([0, 2])), rf(&v, "u*x1"));
    }
}
