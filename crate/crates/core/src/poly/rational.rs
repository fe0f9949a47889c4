use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::multi_index::MultiIndex;
use super::polynomial::{forward_owned, Polynomial};
use super::Q;
use crate::error::{Error, Result};

/// Quotient of polynomials over ℚ.
///
/// The denominator is kept as a product of factors `q^e`, each factor a
/// non-constant primitive integer polynomial with positive leading
/// coefficient; monomial factors are split into single variables. There is no
/// gcd reduction. After each operation the numerator is trial-divided by the
/// known factors, which cancels the common cases (powers of the same factor)
/// cheaply. Equality is decided by cross-multiplication over the common
/// factor set.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: Polynomial,
    den: Vec<(Polynomial, u32)>,
}

impl RationalFunction {
    pub fn zero(nvars: usize) -> Self {
        Self::from_poly(Polynomial::zero(nvars))
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_poly(Polynomial::one(nvars))
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Self::from_poly(Polynomial::constant(nvars, c))
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::from_poly(Polynomial::from_int(nvars, c))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::from_poly(Polynomial::var(nvars, i))
    }

    pub fn from_poly(num: Polynomial) -> Self {
        RationalFunction {
            num,
            den: Vec::new(),
        }
    }

    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        assert_eq!(num.nvars(), den.nvars());
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let (c, factors) = split_factor(&den);
        let mut out = RationalFunction {
            num: num.scale(&c.recip()),
            den: Vec::new(),
        };
        for (f, e) in factors {
            insert_factor(&mut out.den, f, e);
        }
        out.reduce();
        Ok(out)
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator_factors(&self) -> &[(Polynomial, u32)] {
        &self.den
    }

    pub fn denominator(&self) -> Polynomial {
        expand(&self.den, self.nvars())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.is_polynomial() {
            self.num.constant_value()
        } else {
            None
        }
    }

    /// Whether variable `i` actually occurs.
    pub fn depends_on(&self, i: usize) -> bool {
        self.num.degree_in(i) > 0 || self.den.iter().any(|(f, _)| f.degree_in(i) > 0)
    }

    pub fn scale(&self, c: &Q) -> Self {
        RationalFunction {
            num: self.num.scale(c),
            den: if c.is_zero() { Vec::new() } else { self.den.clone() },
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.num.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let (c, factors) = split_factor(&self.num);
        let mut out = RationalFunction {
            num: self.denominator().scale(&c.recip()),
            den: Vec::new(),
        };
        for (f, e) in factors {
            insert_factor(&mut out.den, f, e);
        }
        out.reduce();
        Ok(out)
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let e = e as u32;
        if e == 0 {
            return Ok(Self::one(self.nvars()));
        }
        Ok(RationalFunction {
            num: self.num.pow(e),
            den: self.den.iter().map(|(f, k)| (f.clone(), k * e)).collect(),
        })
    }

    pub fn derive(&self, i: usize) -> Self {
        let n = self.nvars();
        let active: Vec<(usize, Polynomial)> = self
            .den
            .iter()
            .enumerate()
            .filter_map(|(idx, (f, _))| {
                let d = f.derive(i);
                (!d.is_zero()).then_some((idx, d))
            })
            .collect();
        if active.is_empty() {
            return RationalFunction {
                num: self.num.derive(i),
                den: self.den.clone(),
            };
        }
        // (num/Πq^e)' = [num'·Πq − num·Σ e q' Π_{others} q] / Πq^{e+1}, over
        // the factors that depend on x_i.
        let prod_all = active
            .iter()
            .fold(Polynomial::one(n), |acc, (idx, _)| &acc * &self.den[*idx].0);
        let mut numer = &self.num.derive(i) * &prod_all;
        for (pos, (idx, dq)) in active.iter().enumerate() {
            let e = Q::from_integer(self.den[*idx].1.into());
            let others = active
                .iter()
                .enumerate()
                .filter(|(p, _)| *p != pos)
                .fold(Polynomial::one(n), |acc, (_, (j, _))| &acc * &self.den[*j].0);
            numer = &numer - &(&(&self.num * dq) * &others).scale(&e);
        }
        let mut den = self.den.clone();
        for (idx, _) in &active {
            den[*idx].1 += 1;
        }
        let mut out = RationalFunction { num: numer, den };
        out.reduce();
        out
    }

    pub fn derive_multi(&self, alpha: &MultiIndex) -> Self {
        let mut out = self.clone();
        for (i, &a) in alpha.entries().iter().enumerate() {
            for _ in 0..a {
                out = out.derive(i);
            }
        }
        out
    }

    pub fn eval(&self, point: &[Q]) -> Result<Q> {
        let mut den = Q::one();
        for (f, e) in &self.den {
            let v = f.eval(point);
            if v.is_zero() {
                return Err(Error::Pole(format_point(point)));
            }
            den *= num_traits::pow::pow(v, *e as usize);
        }
        Ok(self.num.eval(point) / den)
    }

    /// Exact evaluation followed by a single rounding to `f64`.
    pub fn eval_f64(&self, point: &[f64]) -> Result<f64> {
        use num_traits::ToPrimitive;
        let exact = point
            .iter()
            .map(|&v| {
                Q::from_float(v).ok_or_else(|| Error::Invalid(format!("non-finite coordinate {v}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let v = self.eval(&exact)?;
        Ok(v.to_f64().unwrap_or(f64::NAN))
    }

    /// Composition with `images[i]` in place of variable i.
    pub fn substitute(&self, images: &[RationalFunction]) -> Result<Self> {
        assert_eq!(images.len(), self.nvars());
        let target = images.first().map(|r| r.nvars()).unwrap_or(0);
        if images.iter().all(|r| r.is_polynomial()) {
            let polys: Vec<Polynomial> = images.iter().map(|r| r.num.clone()).collect();
            let num = self.num.substitute(&polys);
            let mut den = Polynomial::one(target);
            for (f, e) in &self.den {
                den = &den * &f.substitute(&polys).pow(*e);
            }
            return RationalFunction::new(num, den);
        }
        let num = eval_poly_rf(&self.num, images, target);
        let mut den = RationalFunction::one(target);
        for (f, e) in &self.den {
            den = &den * &eval_poly_rf(f, images, target).pow(*e as i32)?;
        }
        num.checked_div(&den)
    }

    /// Re-embed into `nvars` variables; variable i goes to slot `positions[i]`.
    pub fn embed(&self, nvars: usize, positions: &[usize]) -> Self {
        RationalFunction {
            num: self.num.embed(nvars, positions),
            den: self
                .den
                .iter()
                .map(|(f, e)| (f.embed(nvars, positions), *e))
                .collect(),
        }
    }

    pub fn extend(&self, extra: usize) -> Self {
        let positions: Vec<usize> = (0..self.nvars()).collect();
        self.embed(self.nvars() + extra, &positions)
    }

    /// Trial-divide the numerator by each denominator factor.
    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let mut i = 0;
        while i < self.den.len() {
            while self.den[i].1 > 0 {
                match try_divide(&self.num, &self.den[i].0) {
                    Some(q) => {
                        self.num = q;
                        self.den[i].1 -= 1;
                    }
                    None => break,
                }
            }
            if self.den[i].1 == 0 {
                self.den.remove(i);
            } else {
                i += 1;
            }
        }
    }

    /// Numerators of `self` and `other` over the merged factor set.
    fn align(&self, other: &Self) -> (Polynomial, Polynomial, Vec<(Polynomial, u32)>) {
        let n = self.nvars();
        let mut merged: Vec<(Polynomial, u32)> = self.den.clone();
        for (f, e) in &other.den {
            match merged.binary_search_by(|(g, _)| g.cmp(f)) {
                Ok(pos) => merged[pos].1 = merged[pos].1.max(*e),
                Err(pos) => merged.insert(pos, (f.clone(), *e)),
            }
        }
        let lift = |r: &Self| -> Polynomial {
            let mut extra = Polynomial::one(n);
            for (f, e) in &merged {
                let have = r
                    .den
                    .binary_search_by(|(g, _)| g.cmp(f))
                    .map(|p| r.den[p].1)
                    .unwrap_or(0);
                if *e > have {
                    extra = &extra * &f.pow(e - have);
                }
            }
            &r.num * &extra
        };
        (lift(self), lift(other), merged)
    }

    pub fn format(&self, names: &[String]) -> String {
        if self.den.is_empty() {
            return self.num.format(names);
        }
        let den: Vec<String> = self
            .den
            .iter()
            .map(|(f, e)| {
                let body = if f.len() == 1 && f.is_monomial() && f.total_degree() == Some(1) {
                    f.format(names)
                } else {
                    format!("({})", f.format(names))
                };
                if *e == 1 {
                    body
                } else {
                    format!("{body}^{e}")
                }
            })
            .collect();
        let num = self.num.format(names);
        let num = if self.num.len() == 1 && !num.starts_with('-') {
            num
        } else {
            format!("({num})")
        };
        if den.len() == 1 {
            format!("{num}/{}", den[0])
        } else {
            format!("{num}/({})", den.join("*"))
        }
    }
}

fn eval_poly_rf(p: &Polynomial, images: &[RationalFunction], target: usize) -> RationalFunction {
    let mut powers: Vec<Vec<RationalFunction>> = images
        .iter()
        .map(|r| vec![RationalFunction::one(target), r.clone()])
        .collect();
    let mut acc = RationalFunction::zero(target);
    for (k, c) in p.terms() {
        let mut t = RationalFunction::constant(target, c.clone());
        for (i, &e) in k.entries().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let cache = &mut powers[i];
            while cache.len() <= e as usize {
                let next = cache.last().unwrap() * &images[i];
                cache.push(next);
            }
            t = &t * &cache[e as usize];
        }
        acc = &acc + &t;
    }
    acc
}

fn expand(den: &[(Polynomial, u32)], nvars: usize) -> Polynomial {
    den.iter()
        .fold(Polynomial::one(nvars), |acc, (f, e)| &acc * &f.pow(*e))
}

/// `p = c · Π f^e` with each f a normalized factor.
fn split_factor(p: &Polynomial) -> (Q, Vec<(Polynomial, u32)>) {
    let n = p.nvars();
    let m = p.monomial_content();
    let mut factors = Vec::new();
    for (i, &e) in m.entries().iter().enumerate() {
        if e > 0 {
            factors.push((Polynomial::var(n, i), e));
        }
    }
    let rest = if m.order() > 0 {
        p.div_monomial(&m)
    } else {
        p.clone()
    };
    if let Some(c) = rest.constant_value() {
        return (c, factors);
    }
    let (c, prim) = rest.primitive();
    factors.push((prim, 1));
    (c, factors)
}

fn insert_factor(den: &mut Vec<(Polynomial, u32)>, f: Polynomial, e: u32) {
    match den.binary_search_by(|(g, _)| g.cmp(&f)) {
        Ok(pos) => den[pos].1 += e,
        Err(pos) => den.insert(pos, (f, e)),
    }
}

fn try_divide(num: &Polynomial, f: &Polynomial) -> Option<Polynomial> {
    if f.is_monomial() {
        let (m, c) = f.leading().unwrap();
        if !m.divides(&num.monomial_content()) {
            return None;
        }
        return Some(num.div_monomial(m).scale(&c.recip()));
    }
    // Cheap necessary conditions before running the division loop.
    for i in 0..f.nvars() {
        if f.degree_in(i) > num.degree_in(i) {
            return None;
        }
    }
    let (fl, _) = f.leading().unwrap();
    let (nl, _) = num.leading().unwrap();
    if !fl.divides(nl) {
        return None;
    }
    let (ft, _) = f.terms().iter().next().unwrap();
    let (nt, _) = num.terms().iter().next().unwrap();
    if !ft.divides(nt) {
        return None;
    }
    num.exact_div(f)
}

fn format_point(point: &[Q]) -> String {
    let parts: Vec<String> = point.iter().map(|q| q.to_string()).collect();
    format!("({})", parts.join(", "))
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        if self.nvars() != other.nvars() {
            return false;
        }
        if self.den == other.den {
            return self.num == other.num;
        }
        let (a, b, _) = self.align(other);
        a == b
    }
}

impl Add<&RationalFunction> for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            let mut out = RationalFunction {
                num: &self.num + &rhs.num,
                den: self.den.clone(),
            };
            out.reduce();
            return out;
        }
        let (a, b, den) = self.align(rhs);
        let mut out = RationalFunction { num: &a + &b, den };
        out.reduce();
        out
    }
}

impl Sub<&RationalFunction> for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Mul<&RationalFunction> for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero(self.nvars());
        }
        let mut den = self.den.clone();
        for (f, e) in &rhs.den {
            insert_factor(&mut den, f.clone(), *e);
        }
        let mut out = RationalFunction {
            num: &self.num * &rhs.num,
            den,
        };
        if !self.den.is_empty() || !rhs.den.is_empty() {
            out.reduce();
        }
        out
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -self.num,
            den: self.den,
        }
    }
}

forward_owned!(RationalFunction, Add add, Sub sub, Mul mul);

impl From<Polynomial> for RationalFunction {
    fn from(p: Polynomial) -> Self {
        RationalFunction::from_poly(p)
    }
}

/// Sign convention check used in tests: every stored factor has a positive
/// leading coefficient.
#[cfg(test)]
fn factors_normalized(r: &RationalFunction) -> bool {
    use num_traits::Signed;
    r.den.iter().all(|(f, e)| {
        *e > 0 && !f.is_constant() && f.leading().map(|(_, c)| c.is_positive()).unwrap_or(false)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> RationalFunction {
        RationalFunction::var(2, 0)
    }
    fn y() -> RationalFunction {
        RationalFunction::var(2, 1)
    }
    fn c(v: i64) -> RationalFunction {
        RationalFunction::from_int(2, v)
    }

    #[test]
    fn quotient_rule() {
        // d/dx 1/(1-x) = 1/(1-x)^2
        let f = c(1).checked_div(&(c(1) - x())).unwrap();
        let df = f.derive(0);
        let expected = c(1).checked_div(&(c(1) - x()).pow(2).unwrap()).unwrap();
        assert_eq!(df, expected);
        assert!(factors_normalized(&df));
        assert!(c(5).derive(0).is_zero());
    }

    #[test]
    fn repeated_derivatives_stay_small() {
        // (4+x)^3/x^2 differentiated four times keeps a pure power of x below.
        let f = (c(4) + x()).pow(3).unwrap().checked_div(&x().pow(2).unwrap()).unwrap();
        let d4 = f.derive_multi(&[4, 0].into());
        assert_eq!(d4.denominator_factors().len(), 1);
        assert_eq!(d4.denominator_factors()[0].1, 6);
        // 64 x^-2 contributes 64·(-2)(-3)(-4)(-5) x^-6 = 7680/x^6; the cubic
        // and linear parts contribute nothing after four derivatives except
        // 48·x^-1: 48·(-1)(-2)(-3)(-4)/x^5 = 1152/x^5.
        let expected = c(7680).checked_div(&x().pow(6).unwrap()).unwrap()
            + c(1152).checked_div(&x().pow(5).unwrap()).unwrap();
        assert_eq!(d4, expected);
    }

    #[test]
    fn cancellation_on_add() {
        let a = x().checked_div(&(x() + y())).unwrap();
        let b = y().checked_div(&(x() + y())).unwrap();
        let s = &a + &b;
        assert_eq!(s.constant_value(), Some(Q::one()));
    }

    #[test]
    fn equality_by_cross_multiplication() {
        let a = (x() * y()).checked_div(&(x() * x())).unwrap();
        let b = y().checked_div(&x()).unwrap();
        assert_eq!(a, b);
        let c2 = (y() * c(2)).checked_div(&(x() * c(2))).unwrap();
        assert_eq!(b, c2);
        assert_ne!(b, x());
    }

    #[test]
    fn substitution_errors_on_zero_denominator() {
        let f = x().checked_div(&y()).unwrap();
        let err = f.substitute(&[c(1), c(0)]).unwrap_err();
        assert_eq!(err, Error::ZeroDenominator);
        let id = f.substitute(&[x(), y()]).unwrap();
        assert_eq!(id, f);
    }

    #[test]
    fn evaluation_and_poles() {
        let f = c(1).checked_div(&(x() - c(1))).unwrap();
        let q = |v: i64| Q::from_integer(v.into());
        assert!(matches!(f.eval(&[q(1), q(0)]), Err(Error::Pole(_))));
        assert_eq!(f.eval(&[q(3), q(0)]).unwrap(), Q::new(1.into(), 2.into()));
        let g = x().pow(2).unwrap() + c(1);
        assert_eq!(g.eval(&[q(2), q(0)]).unwrap(), q(5));
    }

    #[test]
    fn float_evaluation_is_correctly_rounded() {
        let f = c(1).checked_div(&(x() + c(3))).unwrap();
        let v = f.eval_f64(&[0.0, 0.0]).unwrap();
        assert_eq!(v, 1.0 / 3.0);
    }
}
