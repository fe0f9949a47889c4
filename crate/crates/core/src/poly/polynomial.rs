use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::multi_index::{falling, MultiIndex};
use super::Q;

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are keyed by exponent vectors in lexicographic order; zero
/// coefficients are never stored. Variable names live outside the value
/// (see [`Vars`](super::Vars)); a polynomial only knows how many variables it
/// ranges over.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<MultiIndex, Q>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Self::monomial(nvars, MultiIndex::zero(nvars), c)
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, Q::from_integer(c.into()))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        Self::monomial(nvars, MultiIndex::unit(nvars, i), Q::one())
    }

    pub fn monomial(nvars: usize, exps: MultiIndex, c: Q) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Polynomial { nvars, terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (MultiIndex, Q)>>(nvars: usize, terms: I) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (k, c) in terms {
            assert_eq!(k.len(), nvars);
            p.add_term(k, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Q> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<MultiIndex, Q> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &MultiIndex) -> Q {
        self.terms.get(exps).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|k| k.order() == 0)
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.is_constant() {
            Some(self.coeff(&MultiIndex::zero(self.nvars)))
        } else {
            None
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.order()).max()
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|k| k.get(i)).max().unwrap_or(0)
    }

    /// Every stored term has total degree `k`. The zero polynomial qualifies.
    pub fn is_homogeneous(&self, k: u32) -> bool {
        self.terms.keys().all(|m| m.order() == k)
    }

    /// Greatest term in lexicographic order.
    pub fn leading(&self) -> Option<(&MultiIndex, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, exps: MultiIndex, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, c: &Q) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, exps: &MultiIndex, c: &Q) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.add(exps), v * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut result = Polynomial::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn derive(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (k, c) in &self.terms {
            let a = k.get(i);
            if a > 0 {
                out.terms.insert(k.with(i, a - 1), c * Q::from_integer(a.into()));
            }
        }
        out
    }

    /// ∂^α over the first `alpha.len()` variables.
    pub fn derive_multi(&self, alpha: &MultiIndex) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        'terms: for (k, c) in &self.terms {
            let mut e = k.entries().to_vec();
            let mut factor = BigInt::one();
            for (i, &a) in alpha.entries().iter().enumerate() {
                if e[i] < a {
                    continue 'terms;
                }
                factor *= falling(e[i], a);
                e[i] -= a;
            }
            out.terms
                .insert(MultiIndex::new(e), c * Q::from_integer(factor));
        }
        out
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        assert_eq!(point.len(), self.nvars);
        let mut pow_cache: Vec<Vec<Q>> = point.iter().map(|p| vec![Q::one(), p.clone()]).collect();
        let mut acc = Q::zero();
        for (k, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in k.entries().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut pow_cache[i];
                while cache.len() <= e as usize {
                    let next = cache.last().unwrap() * &point[i];
                    cache.push(next);
                }
                t *= &cache[e as usize];
            }
            acc += t;
        }
        acc
    }

    /// Composition: variable i is replaced by `images[i]`. All images must
    /// share one variable count, which becomes the result's.
    pub fn substitute(&self, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.nvars);
        let target = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|p| vec![Polynomial::one(target), p.clone()])
            .collect();
        let mut acc = Polynomial::zero(target);
        for (k, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
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
            acc = acc + t;
        }
        acc
    }

    /// Re-embed into `nvars` variables; variable i goes to slot `positions[i]`.
    pub fn embed(&self, nvars: usize, positions: &[usize]) -> Polynomial {
        assert_eq!(positions.len(), self.nvars);
        let mut out = Polynomial::zero(nvars);
        for (k, c) in &self.terms {
            let mut e = vec![0u32; nvars];
            for (i, &a) in k.entries().iter().enumerate() {
                e[positions[i]] += a;
            }
            out.add_term(MultiIndex::new(e), c.clone());
        }
        out
    }

    /// Append `extra` unused variables.
    pub fn extend(&self, extra: usize) -> Polynomial {
        let positions: Vec<usize> = (0..self.nvars).collect();
        self.embed(self.nvars + extra, &positions)
    }

    /// Splits `self = c · p` where p has coprime integer coefficients and a
    /// positive leading coefficient. The zero polynomial yields `(0, 0)`.
    pub fn primitive(&self) -> (Q, Polynomial) {
        if self.is_zero() {
            return (Q::zero(), self.clone());
        }
        let mut lcm_den = BigInt::one();
        for c in self.terms.values() {
            lcm_den = lcm_den.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            let v = c.numer() * (&lcm_den / c.denom());
            g = g.gcd(&v);
        }
        let (_, lead) = self.leading().unwrap();
        if lead.is_negative() {
            g = -g;
        }
        let scale = Q::new(g.clone(), lcm_den.clone());
        let inv = Q::new(lcm_den, g);
        (scale, self.scale(&inv))
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> MultiIndex {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return MultiIndex::zero(self.nvars);
        };
        let mut m = first.entries().to_vec();
        for k in it {
            for (a, &b) in m.iter_mut().zip(k.entries()) {
                *a = (*a).min(b);
            }
        }
        MultiIndex::new(m)
    }

    /// Divides every term by the monomial `m`, which must divide them all.
    pub fn div_monomial(&self, m: &MultiIndex) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.checked_sub(m).expect("monomial does not divide"), c.clone()))
                .collect(),
        }
    }

    /// Exact division: `Some(q)` with `self = q · divisor`, or `None` when the
    /// divisor does not divide.
    pub fn exact_div(&self, divisor: &Polynomial) -> Option<Polynomial> {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let (dlead_m, dlead_c) = divisor.leading().unwrap();
        let dlead_m = dlead_m.clone();
        let dinv = dlead_c.recip();
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(self.nvars);
        while let Some((m, c)) = rem.leading() {
            let shift = m.checked_sub(&dlead_m)?;
            let qc = c * &dinv;
            rem = &rem - &divisor.mul_monomial(&shift, &qc);
            quot.add_term(shift, qc);
        }
        Some(quot)
    }

    pub fn to_f64_terms(&self) -> Vec<(f64, Vec<i32>)> {
        use num_traits::ToPrimitive;
        self.terms
            .iter()
            .map(|(k, c)| {
                (
                    c.to_f64().unwrap_or(f64::NAN),
                    k.entries().iter().map(|&e| e as i32).collect(),
                )
            })
            .collect()
    }

    /// Render with the given variable names using the expression grammar.
    pub fn format(&self, names: &[String]) -> String {
        assert_eq!(names.len(), self.nvars);
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        // Descending order reads naturally (x^4 before y^4).
        for (idx, (k, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            let is_unit = abs.is_one();
            if !is_unit || k.order() == 0 {
                factors.push(format_rational(&abs));
            }
            for (i, &e) in k.entries().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[i].clone()),
                    _ => factors.push(format!("{}^{}", names[i], e)),
                }
            }
            s.push_str(&factors.join("*"));
        }
        s
    }
}

/// Non-negative rationals print as `p` or `(p/q)` so that a following `^`
/// cannot bind to the denominator alone.
pub fn format_rational(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        let mut s = String::new();
        let _ = write!(s, "({}/{})", q.numer(), q.denom());
        s
    }
}

impl Add<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let (big, small) = if self.len() >= rhs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = big.clone();
        for (k, c) in &small.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

impl Sub<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), -c);
        }
        out
    }
}

impl Mul<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = Polynomial::zero(self.nvars);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                out.add_term(ka.add(kb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(mut self) -> Polynomial {
        for c in self.terms.values_mut() {
            *c = -&*c;
        }
        self
    }
}

macro_rules! forward_owned {
    ($ty:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty { (&self).$m(&rhs) }
        }
        impl $tr<&$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: &$ty) -> $ty { (&self).$m(rhs) }
        }
        impl $tr<$ty> for &$ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty { self.$m(&rhs) }
        }
    )*};
}
pub(crate) use forward_owned;

forward_owned!(Polynomial, Add add, Sub sub, Mul mul);
