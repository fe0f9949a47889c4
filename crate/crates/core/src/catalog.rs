//! Named invariants of binary quartics, binary quintics and ternary cubics.
//!
//! Everything here is generic over [`Coefficient`], so the same formulas
//! evaluate numeric forms and symbols whose coefficients are rational
//! functions of a base point.

use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{Coefficient, MultiIndex, Q};
use crate::transvect::{binary_transvectant, transvectant, Form};

/// `{P,P}₄ = 2⁷·3²·J₂`
pub const J2_TRANSVECTANT_SCALE: i64 = 1152;
/// `{{P,P}₂,P}₄ = 2¹¹·3⁵·J₃`
pub const J3_TRANSVECTANT_SCALE: i64 = 497_664;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Path {
    Explicit,
    Transvectant,
    Both,
}

/// One computed invariant. `value` is `None` when the invariant is undefined
/// for this input, with the reason in `undefined`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantReport<C> {
    pub name: String,
    pub value: Option<C>,
    pub path: Path,
    pub regular: Option<bool>,
    pub undefined: Option<String>,
}

impl<C> InvariantReport<C> {
    fn defined(name: &str, value: C, path: Path) -> Self {
        InvariantReport {
            name: name.to_string(),
            value: Some(value),
            path,
            regular: None,
            undefined: None,
        }
    }

    fn from_result(name: &str, value: Result<C>, path: Path) -> Result<Self> {
        match value {
            Ok(v) => Ok(Self::defined(name, v, path)),
            Err(Error::Degenerate { reason, .. }) => Ok(InvariantReport {
                name: name.to_string(),
                value: None,
                path,
                regular: None,
                undefined: Some(reason),
            }),
            Err(e) => Err(e),
        }
    }
}

impl<C> InvariantReport<C> {
    pub fn value(&self) -> Result<&C> {
        self.value
            .as_ref()
            .ok_or_else(|| Error::degenerate(&self.name, self.undefined.clone().unwrap_or_default()))
    }
}

fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

fn constant<C: Coefficient>(ctx: &C::Ctx, v: i64) -> C {
    C::from_q(ctx, q(v))
}

fn check_shape<C: Coefficient>(p: &Form<C>, n: usize, degree: u32, what: &str) -> Result<()> {
    if p.n() != n || p.degree() != degree {
        return Err(Error::dim(format!(
            "{what} needs n = {n}, degree {degree}; got n = {}, degree {}",
            p.n(),
            p.degree()
        )));
    }
    Ok(())
}

fn divide<C: Coefficient>(a: &C, b: &C, what: &str, reason: &str) -> Result<C> {
    a.divide(b).ok_or_else(|| Error::degenerate(what, reason))
}

// ---------------------------------------------------------------------------
// binary quartics

/// `P = p₄x⁴ + 4p₃x³y + 6p₂x²y² + 4p₁xy³ + p₀y⁴`
#[derive(Clone, Debug, PartialEq)]
pub struct QuarticClassicalCoeffs<C> {
    pub p0: C,
    pub p1: C,
    pub p2: C,
    pub p3: C,
    pub p4: C,
}

pub fn quartic_classical_coeffs<C: Coefficient>(p: &Form<C>) -> Result<QuarticClassicalCoeffs<C>> {
    check_shape(p, 2, 4, "binary quartic")?;
    let c = |a: u32, d: i64| p.coeff(&MultiIndex::from([a, 4 - a])).scaled(&Q::new(1.into(), d.into()));
    Ok(QuarticClassicalCoeffs {
        p4: c(4, 1),
        p3: c(3, 4),
        p2: c(2, 6),
        p1: c(1, 4),
        p0: c(0, 1),
    })
}

impl<C: Coefficient> QuarticClassicalCoeffs<C> {
    /// Rebuilds the quartic in the given binary variables.
    pub fn reconstruct(&self, vars: crate::poly::Vars) -> Result<Form<C>> {
        let ctx = self.p0.ctx();
        let terms = [
            (4, self.p4.clone(), 1),
            (3, self.p3.clone(), 4),
            (2, self.p2.clone(), 6),
            (1, self.p1.clone(), 4),
            (0, self.p0.clone(), 1),
        ];
        Form::new(
            vars,
            4,
            ctx,
            terms
                .into_iter()
                .map(|(a, c, m)| (MultiIndex::from([a, 4 - a]), c.scaled(&q(m)))),
        )
    }

    /// `p₀p₄ − 4p₁p₃ + 3p₂²`
    pub fn j2(&self) -> C {
        let a = self.p0.times(&self.p4);
        let b = self.p1.times(&self.p3).scaled(&q(4));
        let c = self.p2.times(&self.p2).scaled(&q(3));
        a.minus(&b).plus(&c)
    }

    /// `p₀p₂p₄ − p₀p₃² − p₁²p₄ + 2p₁p₂p₃ − p₂³`
    pub fn j3(&self) -> C {
        let (p0, p1, p2, p3, p4) = (&self.p0, &self.p1, &self.p2, &self.p3, &self.p4);
        let t1 = p0.times(p2).times(p4);
        let t2 = p0.times(p3).times(p3);
        let t3 = p1.times(p1).times(p4);
        let t4 = p1.times(p2).times(p3).scaled(&q(2));
        let t5 = p2.times(p2).times(p2);
        t1.minus(&t2).minus(&t3).plus(&t4).minus(&t5)
    }
}

pub fn quartic_j2_by_transvectant<C: Coefficient>(p: &Form<C>) -> Result<C> {
    check_shape(p, 2, 4, "binary quartic")?;
    let t = transvectant(&[p.clone(), p.clone()], 4)?.scalar();
    Ok(t.scaled(&Q::new(1.into(), J2_TRANSVECTANT_SCALE.into())))
}

pub fn quartic_j3_by_transvectant<C: Coefficient>(p: &Form<C>) -> Result<C> {
    check_shape(p, 2, 4, "binary quartic")?;
    let h = transvectant(&[p.clone(), p.clone()], 2)?;
    let t = transvectant(&[h, p.clone()], 4)?.scalar();
    Ok(t.scaled(&Q::new(1.into(), J3_TRANSVECTANT_SCALE.into())))
}

fn agree<C: Coefficient>(name: &str, explicit: C, transvected: C) -> Result<C> {
    if explicit == transvected {
        Ok(explicit)
    } else {
        Err(Error::PathDisagreement(format!(
            "{name}: explicit {explicit:?} vs transvectant {transvected:?}"
        )))
    }
}

/// Degree-2 quartic invariant; both routes are computed and must agree.
pub fn quartic_j2<C: Coefficient>(p: &Form<C>) -> Result<C> {
    let explicit = quartic_classical_coeffs(p)?.j2();
    agree("J2", explicit, quartic_j2_by_transvectant(p)?)
}

/// Degree-3 quartic invariant; both routes are computed and must agree.
pub fn quartic_j3<C: Coefficient>(p: &Form<C>) -> Result<C> {
    let explicit = quartic_classical_coeffs(p)?.j3();
    agree("J3", explicit, quartic_j3_by_transvectant(p)?)
}

fn discriminant_from<C: Coefficient>(j2: &C, j3: &C) -> C {
    let cube = j2.times(j2).times(j2).scaled(&q(256));
    let square = j3.times(j3).scaled(&q(6912));
    cube.minus(&square)
}

fn j_from<C: Coefficient>(j2: &C, j3: &C) -> Result<C> {
    let cube = j2.times(j2).times(j2);
    divide(&cube, &j3.times(j3), "J", "J3 vanishes")
}

/// `256·J₂³ − 6912·J₃²`
pub fn quartic_discriminant<C: Coefficient>(p: &Form<C>) -> Result<C> {
    Ok(discriminant_from(&quartic_j2(p)?, &quartic_j3(p)?))
}

/// `J₂³/J₃²`, the absolute invariant. Degenerate when `J₃ = 0`.
pub fn quartic_j<C: Coefficient>(p: &Form<C>) -> Result<C> {
    j_from(&quartic_j2(p)?, &quartic_j3(p)?)
}

/// `J₃ ≠ 0` and `J ≠ 27`.
pub fn quartic_is_regular<C: Coefficient>(p: &Form<C>) -> Result<bool> {
    match quartic_j(p) {
        Ok(j) => Ok(j != constant(p.ctx(), 27)),
        Err(Error::Degenerate { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Reports for `J2, J3, discriminant, J`.
pub fn quartic_invariants<C: Coefficient>(p: &Form<C>) -> Result<Vec<InvariantReport<C>>> {
    let j2 = quartic_j2(p)?;
    let j3 = quartic_j3(p)?;
    let disc = discriminant_from(&j2, &j3);
    let mut j = InvariantReport::from_result("J", j_from(&j2, &j3), Path::Both)?;
    j.regular = Some(match &j.value {
        Some(v) => *v != constant(p.ctx(), 27),
        None => false,
    });
    Ok(vec![
        InvariantReport::defined("J2", j2, Path::Both),
        InvariantReport::defined("J3", j3, Path::Both),
        InvariantReport::defined("discriminant", disc, Path::Both),
        j,
    ])
}

// ---------------------------------------------------------------------------
// binary quintics

/// The covariants and invariants of a binary quintic.
#[derive(Clone, Debug, PartialEq)]
pub struct QuinticCovariants<C: Coefficient> {
    /// `{P,P}₄`, a quadratic
    pub c21: Form<C>,
    /// `{P,c₂₁}₂`, a cubic
    pub c3: Form<C>,
    /// `{c₃,c₃}₂`, a quadratic
    pub c22: Form<C>,
    pub j4: C,
    pub j8: C,
    pub j12: C,
}

type Pairing<C> = fn(&Form<C>, &Form<C>, u32) -> Result<Form<C>>;

fn pair_general<C: Coefficient>(f: &Form<C>, g: &Form<C>, l: u32) -> Result<Form<C>> {
    transvectant(&[f.clone(), g.clone()], l)
}

fn quintic_with<C: Coefficient>(p: &Form<C>, pair: Pairing<C>) -> Result<QuinticCovariants<C>> {
    check_shape(p, 2, 5, "binary quintic")?;
    let c21 = pair(p, p, 4)?;
    let c3 = pair(p, &c21, 2)?;
    let c22 = pair(&c3, &c3, 2)?;
    for (f, d, name) in [(&c21, 2, "c21"), (&c3, 3, "c3"), (&c22, 2, "c22")] {
        if f.degree() != d {
            return Err(Error::Invalid(format!("{name} has degree {}, expected {d}", f.degree())));
        }
    }
    let j4 = pair(&c21, &c21, 2)?.scalar();
    let j8 = pair(&c21, &c22, 2)?.scalar();
    let j12 = pair(&c22, &c22, 2)?.scalar();
    Ok(QuinticCovariants {
        c21,
        c3,
        c22,
        j4,
        j8,
        j12,
    })
}

/// Through the general n-ary transvectant.
pub fn quintic_covariants<C: Coefficient>(p: &Form<C>) -> Result<QuinticCovariants<C>> {
    quintic_with(p, pair_general::<C>)
}

/// Through the closed binary formula; an independent evaluation order.
pub fn quintic_covariants_binary<C: Coefficient>(p: &Form<C>) -> Result<QuinticCovariants<C>> {
    quintic_with(p, binary_transvectant::<C>)
}

impl<C: Coefficient> QuinticCovariants<C> {
    /// `J₈/J₄²`
    pub fn i1(&self) -> Result<C> {
        divide(&self.j8, &self.j4.times(&self.j4), "I1", "J4 vanishes")
    }

    /// `J₁₂/(J₄·J₈)`
    pub fn i2(&self) -> Result<C> {
        if self.j4.vanishes() {
            return Err(Error::degenerate("I2", "J4 vanishes"));
        }
        divide(&self.j12, &self.j4.times(&self.j8), "I2", "J8 vanishes")
    }
}

/// Reports for `J4, J8, J12, I1, I2`.
pub fn quintic_invariants<C: Coefficient>(p: &Form<C>) -> Result<Vec<InvariantReport<C>>> {
    let c = quintic_covariants(p)?;
    Ok(vec![
        InvariantReport::defined("J4", c.j4.clone(), Path::Transvectant),
        InvariantReport::defined("J8", c.j8.clone(), Path::Transvectant),
        InvariantReport::defined("J12", c.j12.clone(), Path::Transvectant),
        InvariantReport::from_result("I1", c.i1(), Path::Transvectant)?,
        InvariantReport::from_result("I2", c.i2(), Path::Transvectant)?,
    ])
}

// ---------------------------------------------------------------------------
// ternary cubics

#[derive(Clone, Debug, PartialEq)]
pub struct CubicCovariants<C: Coefficient> {
    /// `{P,P,P}₂`, a cubic
    pub c1: Form<C>,
    /// `{P,P,c₁}₂`, a cubic
    pub c2: Form<C>,
    /// `{P²,P²,P²}₆`
    pub j1: C,
    /// `{P,c₁,c₂}₃`
    pub j2: C,
}

pub fn ternary_cubic_covariants<C: Coefficient>(p: &Form<C>) -> Result<CubicCovariants<C>> {
    check_shape(p, 3, 3, "ternary cubic")?;
    let p2 = p.mul(p)?;
    let j1 = transvectant(&[p2.clone(), p2.clone(), p2], 6)?.scalar();
    let c1 = transvectant(&[p.clone(), p.clone(), p.clone()], 2)?;
    let c2 = transvectant(&[p.clone(), p.clone(), c1.clone()], 2)?;
    for (f, name) in [(&c1, "c1"), (&c2, "c2")] {
        if f.degree() != 3 {
            return Err(Error::Invalid(format!("{name} has degree {}, expected 3", f.degree())));
        }
    }
    let j2 = transvectant(&[p.clone(), c1.clone(), c2.clone()], 3)?.scalar();
    Ok(CubicCovariants { c1, c2, j1, j2 })
}

impl<C: Coefficient> CubicCovariants<C> {
    /// `J₂²/J₁³`
    pub fn j(&self) -> Result<C> {
        let num = self.j2.times(&self.j2);
        let den = self.j1.times(&self.j1).times(&self.j1);
        divide(&num, &den, "J", "J1 vanishes")
    }
}

/// Reports for `J1, J2, J`.
pub fn ternary_cubic_invariants<C: Coefficient>(p: &Form<C>) -> Result<Vec<InvariantReport<C>>> {
    let c = ternary_cubic_covariants(p)?;
    Ok(vec![
        InvariantReport::defined("J1", c.j1.clone(), Path::Transvectant),
        InvariantReport::defined("J2", c.j2.clone(), Path::Transvectant),
        InvariantReport::from_result("J", c.j(), Path::Transvectant)?,
    ])
}

/// Form classes known to the catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Catalog {
    Quartic,
    Quintic,
    TernaryCubic,
}

impl Catalog {
    pub fn shape(self) -> (usize, u32) {
        match self {
            Catalog::Quartic => (2, 4),
            Catalog::Quintic => (2, 5),
            Catalog::TernaryCubic => (3, 3),
        }
    }

    pub fn invariants<C: Coefficient>(self, p: &Form<C>) -> Result<Vec<InvariantReport<C>>> {
        match self {
            Catalog::Quartic => quartic_invariants(p),
            Catalog::Quintic => quintic_invariants(p),
            Catalog::TernaryCubic => ternary_cubic_invariants(p),
        }
    }
}

impl fmt::Display for Catalog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Catalog::Quartic => "quartic",
            Catalog::Quintic => "quintic",
            Catalog::TernaryCubic => "ternary-cubic",
        })
    }
}

impl std::str::FromStr for Catalog {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quartic" => Ok(Catalog::Quartic),
            "quintic" => Ok(Catalog::Quintic),
            "ternary-cubic" => Ok(Catalog::TernaryCubic),
            _ => Err(Error::Invalid(format!("unknown catalog `{s}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_expr, RationalFunction};
    use crate::transvect::{default_form_vars, NAryForm};

    fn quartic(text: &str) -> NAryForm {
        NAryForm::parse(default_form_vars(2), 4, text).unwrap()
    }

    fn frac(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn classical_coefficients() {
        let c = quartic_classical_coeffs(&quartic("x^4 - 2*x^2*y^2 + y^4")).unwrap();
        assert_eq!(c.p2, frac(-1, 3));
        let c = quartic_classical_coeffs(&quartic("x^3*y")).unwrap();
        assert_eq!((c.p3.clone(), c.p4.clone(), c.p0.clone()), (frac(1, 4), q(0), q(0)));
        let p = quartic("3*x^4 - x^3*y + 5*x*y^3 + 7*y^4");
        let back = quartic_classical_coeffs(&p).unwrap().reconstruct(default_form_vars(2)).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn quartic_examples() {
        let p = quartic("x^4 + y^4");
        assert_eq!((quartic_j2(&p).unwrap(), quartic_j3(&p).unwrap()), (q(1), q(0)));

        let p = quartic("(x^2 - y^2)^2");
        assert_eq!(quartic_j2(&p).unwrap(), frac(4, 3));
        assert_eq!(quartic_j3(&p).unwrap(), frac(-8, 27));
        assert_eq!(quartic_discriminant(&p).unwrap(), q(0));
        assert_eq!(quartic_j(&p).unwrap(), q(27));
        assert!(!quartic_is_regular(&p).unwrap());

        let p = quartic("x^4 + x^3*y + y^4");
        assert_eq!(quartic_j3(&p).unwrap(), frac(-1, 16));
        assert_eq!(quartic_j(&p).unwrap(), q(256));
        assert!(quartic_is_regular(&p).unwrap());

        let p = quartic("x^3*y");
        assert!(matches!(quartic_j(&p), Err(Error::Degenerate { .. })));
        let reports = quartic_invariants(&p).unwrap();
        assert_eq!(reports[3].value, None);
        assert_eq!(reports[3].regular, Some(false));
    }

    #[test]
    fn wrong_shape_is_rejected() {
        let cubic = NAryForm::parse(default_form_vars(2), 3, "x^3").unwrap();
        assert!(matches!(quartic_j2(&cubic), Err(Error::Dimension(_))));
        assert!(quintic_invariants(&cubic).is_err());
    }

    #[test]
    fn quintic_x5_is_all_zero() {
        let p = NAryForm::parse(default_form_vars(2), 5, "x^5").unwrap();
        let c = quintic_covariants(&p).unwrap();
        assert!(c.c21.is_zero() && c.c3.is_zero() && c.c22.is_zero());
        assert_eq!((c.j4.clone(), c.j8.clone(), c.j12.clone()), (q(0), q(0), q(0)));
        assert!(matches!(c.i1(), Err(Error::Degenerate { .. })));
        assert_eq!(c.c21.degree(), 2);
    }

    #[test]
    fn cubic_x3_is_zero() {
        let p = NAryForm::parse(default_form_vars(3), 3, "x^3").unwrap();
        let c = ternary_cubic_covariants(&p).unwrap();
        assert!(c.c1.is_zero());
        assert_eq!((c.j1.clone(), c.j2.clone()), (q(0), q(0)));
        assert!(c.j().is_err());
    }

    #[test]
    fn symbolic_coefficients() {
        // (1+t)x⁴ + 6x²y² + y⁴ with t a base-point coordinate
        let vars = vec!["t".to_string()];
        let rf = |s: &str| parse_expr(s, &vars).unwrap();
        let p: Form<RationalFunction> = Form::new(
            default_form_vars(2),
            4,
            1,
            [
                (MultiIndex::from([4, 0]), rf("1+t")),
                (MultiIndex::from([2, 2]), rf("6")),
                (MultiIndex::from([0, 4]), rf("1")),
            ],
        )
        .unwrap();
        let j = quartic_j(&p).unwrap();
        assert_eq!(j, rf("(4+t)^3/t^2"));
    }
}
