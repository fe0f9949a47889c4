//! Catalog values checked against the brute-force oracle and frozen.

mod common;

use common::{gen, oracle};
use diffinv_core::catalog::{
    quartic_j2, quartic_j3, quintic_covariants, quintic_covariants_binary, ternary_cubic_covariants,
    J2_TRANSVECTANT_SCALE, J3_TRANSVECTANT_SCALE,
};
use diffinv_core::poly::Q;
use diffinv_core::transvect::{transvectant, transvectant_by_nabla};
use num_bigint::BigInt;
use rand::Rng;
use std::str::FromStr;

fn big(s: &str) -> Q {
    Q::from_integer(BigInt::from_str(s).unwrap())
}

const FERMAT_QUINTIC: &[(&[u32], i64)] = &[(&[5, 0], 1), (&[0, 5], 1)];
const GENERIC_QUINTIC: &[(&[u32], i64)] = &[(&[5, 0], 1), (&[4, 1], 2), (&[3, 2], -3), (&[1, 4], 5), (&[0, 5], 1)];
const FERMAT_CUBIC: &[(&[u32], i64)] = &[(&[3, 0, 0], 1), (&[0, 3, 0], 1), (&[0, 0, 3], 1)];
const HESSE_CUBIC: &[(&[u32], i64)] = &[(&[3, 0, 0], 1), (&[0, 3, 0], 1), (&[0, 0, 3], 1), (&[1, 1, 1], 1)];
const GENERIC_CUBIC: &[(&[u32], i64)] = &[
    (&[3, 0, 0], 2),
    (&[0, 3, 0], -1),
    (&[0, 0, 3], 3),
    (&[1, 1, 1], 5),
    (&[2, 1, 0], 7),
    (&[0, 1, 2], -4),
    (&[1, 0, 2], 1),
];

fn check_quintic(terms: &[(&[u32], i64)], pins: [&str; 3]) {
    let p = oracle::form(terms);
    let (j4, j8, j12) = oracle::quintic(&p);
    let f = oracle::to_form(&p, 2, 5);
    let general = quintic_covariants(&f).unwrap();
    let binary = quintic_covariants_binary(&f).unwrap();
    for c in [&general, &binary] {
        assert_eq!([&c.j4, &c.j8, &c.j12], [&j4, &j8, &j12]);
    }
    assert_eq!([j4, j8, j12], pins.map(big));
}

fn check_cubic(terms: &[(&[u32], i64)], pins: [&str; 2]) {
    let p = oracle::form(terms);
    let (j1, j2) = oracle::ternary_cubic(&p);
    let c = ternary_cubic_covariants(&oracle::to_form(&p, 3, 3)).unwrap();
    assert_eq!((&c.j1, &c.j2), (&j1, &j2));
    assert_eq!([j1, j2], pins.map(big));
}

#[test]
fn fermat_quintic() {
    check_quintic(FERMAT_QUINTIC, ["-1658880000", "0", "0"]);
}

#[test]
fn generic_quintic() {
    check_quintic(
        GENERIC_QUINTIC,
        ["13417021440", "16940855032440422400", "-26949686937362353129468723200"],
    );
}

#[test]
fn fermat_cubic() {
    check_cubic(FERMAT_CUBIC, ["1612431360", "0"]);
}

#[test]
fn hesse_pencil_cubic() {
    check_cubic(HESSE_CUBIC, ["1462855680", "0"]);
}

#[test]
fn generic_cubic() {
    check_cubic(GENERIC_CUBIC, ["-623060121600", "0"]);
}

#[test]
fn quartic_scales_match_oracle() {
    let mut rng = gen::rng(5);
    for _ in 0..10 {
        let f = gen::int_form(&mut rng, 2, 4, 9);
        let p = oracle::from_form(&f);
        let pp4 = oracle::scalar(&oracle::transvectant(&[p.clone(), p.clone()], 2, 4));
        let pp2 = oracle::transvectant(&[p.clone(), p.clone()], 2, 2);
        let ppp = oracle::scalar(&oracle::transvectant(&[pp2, p], 2, 4));
        assert_eq!(pp4, quartic_j2(&f).unwrap() * Q::from_integer(J2_TRANSVECTANT_SCALE.into()));
        assert_eq!(ppp, quartic_j3(&f).unwrap() * Q::from_integer(J3_TRANSVECTANT_SCALE.into()));
    }
}

#[test]
fn transvectant_routes_match_oracle() {
    let mut rng = gen::rng(23);
    for _ in 0..20 {
        let n = rng.gen_range(2..=3usize);
        let forms: Vec<_> = (0..n)
            .map(|_| {
                let d = rng.gen_range(1..=3);
                gen::int_form(&mut rng, n, d, 3)
            })
            .collect();
        let min_deg = forms.iter().map(|f| f.degree()).min().unwrap();
        let l = rng.gen_range(0..=min_deg);
        let expected = oracle::transvectant(&forms.iter().map(oracle::from_form).collect::<Vec<_>>(), n, l);
        let fast = transvectant(&forms, l).unwrap();
        let literal = transvectant_by_nabla(&forms, l).unwrap();
        assert_eq!(oracle::from_form(&fast), expected);
        assert_eq!(oracle::from_form(&literal), expected);
    }
}
