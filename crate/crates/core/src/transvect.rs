//! Transvectants `{f₁,…,fₙ}_l = μ∘∇^l` of n-ary forms.
//!
//! `∇ = Σ_σ sgn(σ) ∂_{σ(1)} ⊗ ⋯ ⊗ ∂_{σ(n)}` acts on the n-fold tensor product
//! of polynomial algebras. [`TensorProduct`] realizes that product as one
//! polynomial in n disjoint groups of n variables and applies `∇` literally.
//! [`transvectant`] uses the same operator, expanded once: the partial
//! derivatives of distinct groups commute, so `∇^l` is the polynomial
//! `det(ξ)^l` in the n² symbols `ξ_{ij} = ∂/∂x_j` of group i. Each term of that
//! expansion is applied slot by slot, which lets the forms carry coefficients
//! in any [`Coefficient`] ring (numbers, or rational functions of a base
//! point).

use std::collections::{BTreeMap, HashMap};

use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::{binomial, falling, Coefficient, MultiIndex, Polynomial, Vars, Q};

/// Homogeneous form of degree `degree` in `vars.len()` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Form<C: Coefficient> {
    vars: Vars,
    degree: u32,
    ctx: C::Ctx,
    coeffs: BTreeMap<MultiIndex, C>,
}

/// Form with rational coefficients, the element of S^k V*.
pub type NAryForm = Form<Q>;

/// Conventional names: `x, y` for binary, `x, y, z` for ternary forms.
pub fn default_form_vars(n: usize) -> Vars {
    match n {
        1 => Vars::new(["x"]),
        2 => Vars::new(["x", "y"]),
        3 => Vars::new(["x", "y", "z"]),
        _ => Vars::numbered("x", n),
    }
}

impl<C: Coefficient> Form<C> {
    /// Builds a form from monomial coefficients; zero coefficients are dropped.
    pub fn new(
        vars: Vars,
        degree: u32,
        ctx: C::Ctx,
        coeffs: impl IntoIterator<Item = (MultiIndex, C)>,
    ) -> Result<Self> {
        let n = vars.len();
        if n == 0 {
            return Err(Error::dim("a form needs at least one variable"));
        }
        let mut map = BTreeMap::new();
        for (m, c) in coeffs {
            if m.len() != n {
                return Err(Error::dim(format!("monomial {m} has length {}, expected {n}", m.len())));
            }
            if c.vanishes() {
                continue;
            }
            if m.order() != degree {
                return Err(Error::NotHomogeneous(degree));
            }
            map.insert(m, c);
        }
        Ok(Form {
            vars,
            degree,
            ctx,
            coeffs: map,
        })
    }

    pub fn zero(vars: Vars, degree: u32, ctx: C::Ctx) -> Self {
        Form {
            vars,
            degree,
            ctx,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn ctx(&self) -> &C::Ctx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, C> {
        &self.coeffs
    }

    pub fn coeff(&self, m: &MultiIndex) -> C {
        self.coeffs
            .get(m)
            .cloned()
            .unwrap_or_else(|| C::zero_in(&self.ctx))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of the constant monomial; meaningful for degree-0 forms.
    pub fn scalar(&self) -> C {
        self.coeff(&MultiIndex::zero(self.n()))
    }

    pub fn scale(&self, q: &Q) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(m, c)| (m.clone(), c.scaled(q)))
            .filter(|(_, c)| !c.vanishes())
            .collect();
        Form {
            coeffs,
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.degree != other.degree && !other.is_zero() {
            return Err(Error::dim("adding forms of different degrees"));
        }
        let mut out = self.clone();
        for (m, c) in &other.coeffs {
            accumulate(&mut out.coeffs, m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut coeffs = BTreeMap::new();
        for (ma, ca) in &self.coeffs {
            for (mb, cb) in &other.coeffs {
                accumulate(&mut coeffs, ma.add(mb), ca.times(cb));
            }
        }
        Ok(Form {
            vars: self.vars.clone(),
            degree: self.degree + other.degree,
            ctx: self.ctx.clone(),
            coeffs,
        })
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Form::new(
            self.vars.clone(),
            0,
            self.ctx.clone(),
            [(MultiIndex::zero(self.n()), C::from_q(&self.ctx, Q::one()))],
        )?;
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// ∂^β f, a form of degree `deg − |β|` (zero when |β| exceeds the degree).
    pub fn derive_multi(&self, beta: &MultiIndex) -> Self {
        let order = beta.order();
        let degree = self.degree.saturating_sub(order);
        let mut coeffs = BTreeMap::new();
        if order <= self.degree {
            'terms: for (m, c) in &self.coeffs {
                let mut factor = num_bigint::BigInt::one();
                for (i, &b) in beta.entries().iter().enumerate() {
                    let a = m.get(i);
                    if a < b {
                        continue 'terms;
                    }
                    factor *= falling(a, b);
                }
                let rest = m.checked_sub(beta).unwrap();
                coeffs.insert(rest, c.scaled(&Q::from_integer(factor)));
            }
        }
        Form {
            vars: self.vars.clone(),
            degree,
            ctx: self.ctx.clone(),
            coeffs,
        }
    }

    pub fn map_coeffs<D: Coefficient>(
        &self,
        ctx: D::Ctx,
        mut f: impl FnMut(&C) -> D,
    ) -> Form<D> {
        Form {
            vars: self.vars.clone(),
            degree: self.degree,
            ctx,
            coeffs: self
                .coeffs
                .iter()
                .map(|(m, c)| (m.clone(), f(c)))
                .filter(|(_, c)| !c.vanishes())
                .collect(),
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::dim(format!(
                "forms over different variables: {:?} vs {:?}",
                self.vars.names(),
                other.vars.names()
            )));
        }
        Ok(())
    }
}

fn accumulate<C: Coefficient>(map: &mut BTreeMap<MultiIndex, C>, m: MultiIndex, c: C) {
    use std::collections::btree_map::Entry;
    if c.vanishes() {
        return;
    }
    match map.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            let s = o.get().plus(&c);
            if s.vanishes() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

impl NAryForm {
    /// Validates homogeneity of `poly` (variables = `vars`).
    pub fn from_polynomial(vars: Vars, degree: u32, poly: &Polynomial) -> Result<Self> {
        if poly.nvars() != vars.len() {
            return Err(Error::dim("polynomial and variable list disagree"));
        }
        if !poly.is_homogeneous(degree) {
            return Err(Error::NotHomogeneous(degree));
        }
        Form::new(vars, degree, (), poly.terms().clone())
    }

    /// Parses a polynomial expression; fails unless it is a homogeneous
    /// polynomial of the stated degree.
    pub fn parse(vars: Vars, degree: u32, text: &str) -> Result<Self> {
        let f = vars.parse(text)?;
        let poly = f
            .as_polynomial()
            .ok_or_else(|| Error::Invalid("a form must be a polynomial".into()))?
            .clone();
        Self::from_polynomial(vars, degree, &poly)
    }

    pub fn to_polynomial(&self) -> Polynomial {
        Polynomial::from_terms(self.n(), self.coeffs.clone())
    }

    pub fn format(&self) -> String {
        self.to_polynomial().format(self.vars.names())
    }

    /// `(f∘g)(v) = f(g v)`: variable i is replaced by `Σ_j g[i][j] x_j`.
    pub fn compose_linear(&self, g: &[Vec<Q>]) -> Result<Self> {
        let n = self.n();
        if g.len() != n || g.iter().any(|r| r.len() != n) {
            return Err(Error::dim("linear map must be n×n"));
        }
        let images: Vec<Polynomial> = g
            .iter()
            .map(|row| {
                Polynomial::from_terms(
                    n,
                    row.iter()
                        .enumerate()
                        .map(|(j, c)| (MultiIndex::unit(n, j), c.clone())),
                )
            })
            .collect();
        let poly = self.to_polynomial().substitute(&images);
        Form::new(self.vars.clone(), self.degree, (), poly.into_terms())
    }
}

/// n-fold tensor product of forms in n variables, stored as one polynomial in
/// n² variables: variable j of factor i sits at index `i·n + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorProduct {
    n: usize,
    degrees: Vec<u32>,
    poly: Polynomial,
}

impl TensorProduct {
    pub fn new(forms: &[NAryForm]) -> Result<Self> {
        let n = check_slots(forms)?;
        let mut poly = Polynomial::one(n * n);
        for (i, f) in forms.iter().enumerate() {
            let positions: Vec<usize> = (0..n).map(|j| i * n + j).collect();
            poly = &poly * &f.to_polynomial().embed(n * n, &positions);
        }
        Ok(TensorProduct {
            n,
            degrees: forms.iter().map(|f| f.degree()).collect(),
            poly,
        })
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// One application of `∇`, an n!-term signed sum.
    pub fn nabla_apply(&self) -> TensorProduct {
        let n = self.n;
        let mut out = Polynomial::zero(n * n);
        for (perm, sign) in permutations(n) {
            let mut term = self.poly.clone();
            for (i, &j) in perm.iter().enumerate() {
                term = term.derive(i * n + j);
                if term.is_zero() {
                    break;
                }
            }
            if sign < 0 {
                out = &out - &term;
            } else {
                out = &out + &term;
            }
        }
        TensorProduct {
            n,
            degrees: self.degrees.iter().map(|d| d.saturating_sub(1)).collect(),
            poly: out,
        }
    }

    /// μ: identify all groups and multiply.
    pub fn multiply(&self, vars: Vars) -> NAryForm {
        let n = self.n;
        let positions: Vec<usize> = (0..n * n).map(|k| k % n).collect();
        let poly = self.poly.embed(n, &positions);
        let degree = self.degrees.iter().sum();
        Form::new(vars, degree, (), poly.into_terms()).expect("μ of a multi-homogeneous tensor is homogeneous")
    }
}

fn check_slots<C: Coefficient>(forms: &[Form<C>]) -> Result<usize> {
    let n = forms.len();
    if n == 0 {
        return Err(Error::dim("transvectant of no forms"));
    }
    for f in forms {
        if f.n() != n {
            return Err(Error::dim(format!(
                "{n} forms given but a form has {} variables",
                f.n()
            )));
        }
        if f.vars() != forms[0].vars() {
            return Err(Error::dim("forms use different variable names"));
        }
    }
    Ok(n)
}

/// All permutations of `0..n` with their signs.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, i32)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut perms = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut perms);
    perms
        .into_iter()
        .map(|p| {
            let mut inversions = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if p[a] > p[b] {
                        inversions += 1;
                    }
                }
            }
            let sign = if inversions % 2 == 0 { 1 } else { -1 };
            (p, sign)
        })
        .collect()
}

/// `det(ξ)^l` as a polynomial in the n² symbols `ξ_{ij}` (index `i·n + j`).
pub fn nabla_power_symbol(n: usize, l: u32) -> Polynomial {
    let mut det = Polynomial::zero(n * n);
    for (perm, sign) in permutations(n) {
        let exps: Vec<u32> = (0..n * n)
            .map(|k| u32::from(perm[k / n] == k % n))
            .collect();
        det.add_term(MultiIndex::new(exps), Q::from_integer(sign.into()));
    }
    det.pow(l)
}

fn result_degree(degrees: &[u32], n: usize, l: u32) -> u32 {
    let total: u32 = degrees.iter().sum();
    total.saturating_sub(n as u32 * l)
}

/// `T_l = μ∘∇^l` via the literal l-fold application on the tensor product.
pub fn transvectant_by_nabla(forms: &[NAryForm], l: u32) -> Result<NAryForm> {
    let n = check_slots(forms)?;
    let vars = forms[0].vars().clone();
    let degrees: Vec<u32> = forms.iter().map(|f| f.degree()).collect();
    let degree = result_degree(&degrees, n, l);
    if degrees.iter().any(|&d| d < l) {
        return Ok(Form::zero(vars, degree, ()));
    }
    let mut t = TensorProduct::new(forms)?;
    for _ in 0..l {
        if t.is_zero() {
            break;
        }
        t = t.nabla_apply();
    }
    let out = t.multiply(vars.clone());
    if out.is_zero() {
        return Ok(Form::zero(vars, degree, ()));
    }
    Ok(out)
}

/// `{f₁,…,fₙ}_l`. The result is homogeneous of degree `Σ r_i − n·l`, and the
/// zero form when some `r_i < l`.
pub fn transvectant<C: Coefficient>(forms: &[Form<C>], l: u32) -> Result<Form<C>> {
    let n = check_slots(forms)?;
    let vars = forms[0].vars().clone();
    let ctx = forms[0].ctx().clone();
    let degrees: Vec<u32> = forms.iter().map(|f| f.degree()).collect();
    let degree = result_degree(&degrees, n, l);
    let mut out: Form<C> = Form::zero(vars.clone(), degree, ctx.clone());
    if degrees.iter().any(|&d| d < l) || forms.iter().any(|f| f.is_zero()) {
        return Ok(out);
    }
    let symbol = nabla_power_symbol(n, l);
    let mut derived: HashMap<(usize, MultiIndex), Form<C>> = HashMap::new();
    for (exps, c) in symbol.terms() {
        let mut prod: Option<Form<C>> = None;
        for (i, f) in forms.iter().enumerate() {
            let beta = exps.slice(i * n, (i + 1) * n);
            let d = derived
                .entry((i, beta.clone()))
                .or_insert_with(|| f.derive_multi(&beta));
            if d.is_zero() {
                prod = None;
                break;
            }
            prod = Some(match prod {
                None => d.clone(),
                Some(p) => p.mul(d)?,
            });
        }
        if let Some(p) = prod {
            for (m, v) in p.coeffs {
                accumulate(&mut out.coeffs, m, v.scaled(c));
            }
        }
    }
    Ok(out)
}

/// Binary transvectant by the closed formula
/// `Σ_k (−1)^k C(l,k) ∂^l f/∂x^{l−k}∂y^k · ∂^l g/∂x^k∂y^{l−k}`.
pub fn binary_transvectant<C: Coefficient>(f: &Form<C>, g: &Form<C>, l: u32) -> Result<Form<C>> {
    if f.n() != 2 || g.n() != 2 {
        return Err(Error::dim("binary transvectant needs binary forms"));
    }
    check_slots(&[f.clone(), g.clone()])?;
    let degree = result_degree(&[f.degree(), g.degree()], 2, l);
    let mut out: Form<C> = Form::zero(f.vars().clone(), degree, f.ctx().clone());
    if f.degree() < l || g.degree() < l {
        return Ok(out);
    }
    for k in 0..=l {
        let df = f.derive_multi(&MultiIndex::from([l - k, k]));
        let dg = g.derive_multi(&MultiIndex::from([k, l - k]));
        let mut c = Q::from_integer(binomial(l, k));
        if k % 2 == 1 {
            c = -c;
        }
        let prod = df.mul(&dg)?;
        for (m, v) in prod.coeffs {
            accumulate(&mut out.coeffs, m, v.scaled(&c));
        }
    }
    Ok(out)
}

/// `J(f) = {f,…,f}_{deg f}` as a scalar. Zero for odd degree.
pub fn self_transvectant_j<C: Coefficient>(f: &Form<C>) -> Result<C> {
    let forms = vec![f.clone(); f.n()];
    Ok(transvectant(&forms, f.degree())?.scalar())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary(text: &str, degree: u32) -> NAryForm {
        NAryForm::parse(default_form_vars(2), degree, text).unwrap()
    }

    fn ternary(text: &str, degree: u32) -> NAryForm {
        NAryForm::parse(default_form_vars(3), degree, text).unwrap()
    }

    fn q(v: i64) -> Q {
        Q::from_integer(v.into())
    }

    #[test]
    fn nabla_on_linear_binary() {
        let t = TensorProduct::new(&[binary("x", 1), binary("y", 1)]).unwrap();
        let once = t.nabla_apply();
        assert_eq!(once.polynomial(), &Polynomial::one(4));
        assert_eq!(once.degrees(), &[0, 0]);
    }

    #[test]
    fn nabla_on_linear_ternary() {
        let t = TensorProduct::new(&[ternary("x", 1), ternary("y", 1), ternary("z", 1)]).unwrap();
        assert_eq!(t.nabla_apply().polynomial(), &Polynomial::one(9));
    }

    #[test]
    fn nabla_kills_constant_factor() {
        let t = TensorProduct::new(&[binary("x^2", 2), binary("3", 0)]).unwrap();
        assert!(t.nabla_apply().is_zero());
    }

    #[test]
    fn zeroth_transvectant_is_product() {
        let f = binary("x^2 + y^2", 2);
        let g = binary("x - y", 1);
        let t = transvectant(&[f.clone(), g.clone()], 0).unwrap();
        assert_eq!(t, f.mul(&g).unwrap());
    }

    #[test]
    fn quartic_self_transvectant() {
        let p = binary("x^4 + y^4", 4);
        let t = transvectant(&[p.clone(), p.clone()], 4).unwrap();
        assert_eq!(t.scalar(), q(1152));
        assert_eq!(transvectant_by_nabla(&[p.clone(), p.clone()], 4).unwrap().scalar(), q(1152));
        assert_eq!(binary_transvectant(&p, &p, 4).unwrap().scalar(), q(1152));
        assert_eq!(self_transvectant_j(&p).unwrap(), q(1152));
    }

    #[test]
    fn linear_ternary_transvectant() {
        let t = transvectant(&[ternary("x", 1), ternary("y", 1), ternary("z", 1)], 1).unwrap();
        assert_eq!(t.scalar(), q(1));
        let b = binary_transvectant(&binary("x", 1), &binary("y", 1), 1).unwrap();
        assert_eq!(b.scalar(), q(1));
    }

    #[test]
    fn odd_degree_self_transvectant_vanishes() {
        let f = binary("x^3 + 2*x*y^2 - y^3", 3);
        assert_eq!(self_transvectant_j(&f).unwrap(), q(0));
        let c = ternary("x^3", 3);
        assert_eq!(self_transvectant_j(&c).unwrap(), q(0));
        let g = binary("x^2 - 3*x*y", 2);
        assert!(binary_transvectant(&g, &g, 1).unwrap().is_zero());
    }

    #[test]
    fn low_degree_slot_gives_zero_form() {
        let t = transvectant(&[binary("x", 1), binary("x^3", 3)], 2).unwrap();
        assert!(t.is_zero());
        assert_eq!(t.degree(), 0);
    }

    #[test]
    fn rejects_dimension_mismatch() {
        assert!(transvectant(&[binary("x", 1), binary("y", 1), binary("x", 1)], 1).is_err());
        assert!(binary_transvectant(&ternary("x", 1), &ternary("y", 1), 1).is_err());
    }

    #[test]
    fn nabla_symbol_term_counts() {
        assert_eq!(nabla_power_symbol(2, 4).len(), 5);
        assert_eq!(nabla_power_symbol(3, 1).len(), 6);
    }

    #[test]
    fn non_homogeneous_rejected() {
        assert_eq!(
            NAryForm::parse(default_form_vars(2), 2, "x^2 + y").unwrap_err(),
            Error::NotHomogeneous(2)
        );
    }
}
