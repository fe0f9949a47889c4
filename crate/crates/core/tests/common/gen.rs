//! Seeded random instances shared by the property tests and the acceptance
//! suite.

#![allow(dead_code)]

use diffinv_core::diffop::{DiffMap, LinearDiffOp};
use diffinv_core::poly::{MultiIndex, Polynomial, RationalFunction, Vars, Q};
use diffinv_core::transvect::{default_form_vars, NAryForm};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn int(k: i64) -> Q {
    Q::from_integer(BigInt::from(k))
}

/// `p/q` with `|p| ≤ 5`, `1 ≤ q ≤ 3`.
pub fn small_q(rng: &mut impl Rng) -> Q {
    Q::new(BigInt::from(rng.gen_range(-5i64..=5)), BigInt::from(rng.gen_range(1i64..=3)))
}

pub fn nonzero_q(rng: &mut impl Rng) -> Q {
    loop {
        let q = small_q(rng);
        if !q.is_zero() {
            return q;
        }
    }
}

/// Up to `terms` monomials of total degree ≤ `max_deg` in the given
/// variables (indices into an `nvars`-variable ring).
pub fn poly_in(rng: &mut impl Rng, nvars: usize, vars: &[usize], max_deg: u32, terms: usize) -> Polynomial {
    let mut p = Polynomial::zero(nvars);
    for _ in 0..rng.gen_range(1..=terms) {
        let mut e = vec![0u32; nvars];
        let mut budget = rng.gen_range(0..=max_deg);
        for &v in vars {
            if budget == 0 {
                break;
            }
            let k = rng.gen_range(0..=budget);
            e[v] = k;
            budget -= k;
        }
        p.add_term(MultiIndex::from(e), small_q(rng));
    }
    p
}

/// A polynomial, or occasionally a polynomial over `1 + x_1²`.
pub fn coefficient(rng: &mut impl Rng, nvars: usize, max_deg: u32) -> RationalFunction {
    let all: Vec<usize> = (0..nvars).collect();
    let num = RationalFunction::from_poly(poly_in(rng, nvars, &all, max_deg, 3));
    if rng.gen_bool(0.2) {
        let mut den = Polynomial::constant(nvars, Q::one());
        den.add_term(MultiIndex::unit(nvars, 0).add(&MultiIndex::unit(nvars, 0)), Q::one());
        num.checked_div(&RationalFunction::from_poly(den)).unwrap()
    } else {
        num
    }
}

/// A random operator of order ≤ `level` over `vars`, whose first `n`
/// variables are coordinates.
pub fn operator(rng: &mut impl Rng, vars: &Vars, n: usize, level: u32, max_deg: u32) -> LinearDiffOp {
    let alphas = MultiIndex::all_up_to(n, level);
    let mut coeffs = Vec::new();
    for a in alphas {
        if rng.gen_bool(0.5) {
            coeffs.push((a, coefficient(rng, vars.len(), max_deg)));
        }
    }
    LinearDiffOp::new(vars.clone(), n, level, coeffs).unwrap()
}

pub fn vars_x(n: usize) -> Vars {
    Vars::new((1..=n).map(|i| format!("x{i}")))
}

/// Determinant by fraction-exact elimination.
pub fn q_det(m: &[Vec<Q>]) -> Q {
    let mut a = m.to_vec();
    let n = a.len();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        for r in c + 1..n {
            let f = &a[r][c] / &a[c][c];
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
            }
        }
    }
    d
}

pub fn invertible_matrix(rng: &mut impl Rng, n: usize) -> Vec<Vec<Q>> {
    loop {
        let m: Vec<Vec<Q>> = (0..n).map(|_| (0..n).map(|_| small_q(rng)).collect()).collect();
        if !q_det(&m).is_zero() {
            return m;
        }
    }
}

/// A product of integer elementary matrices, so of determinant 1.
pub fn sl_matrix(rng: &mut impl Rng, n: usize) -> Vec<Vec<Q>> {
    let mut m: Vec<Vec<Q>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect();
    for _ in 0..rng.gen_range(1..=2 * n) {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        if j == i {
            j = (i + 1) % n;
        }
        let c = int(rng.gen_range(-2i64..=2));
        for k in 0..n {
            let add = &m[j][k] * &c;
            m[i][k] += add;
        }
    }
    m
}

pub fn affine_map(rng: &mut impl Rng, n: usize) -> DiffMap {
    let m = invertible_matrix(rng, n);
    let b: Vec<Q> = (0..n).map(|_| small_q(rng)).collect();
    DiffMap::affine(&m, &b).unwrap()
}

/// `y_i = c_i x_i + p_i(x_1..x_{i-1})` with `deg p_i ≤ 2`.
pub fn triangular_map(rng: &mut impl Rng, n: usize) -> DiffMap {
    let forward = (0..n)
        .map(|i| {
            let earlier: Vec<usize> = (0..i).collect();
            let mut p = if i == 0 {
                Polynomial::constant(n, small_q(rng))
            } else {
                poly_in(rng, n, &earlier, 2, 2)
            };
            p.add_term(MultiIndex::unit(n, i), nonzero_q(rng));
            p
        })
        .collect();
    DiffMap::triangular(forward).unwrap()
}

pub fn diffeo(rng: &mut impl Rng, n: usize) -> DiffMap {
    if rng.gen_bool(0.5) {
        affine_map(rng, n)
    } else {
        triangular_map(rng, n)
    }
}

/// Integer coefficients in `[-r, r]`.
pub fn int_form(rng: &mut impl Rng, n: usize, degree: u32, r: i64) -> NAryForm {
    let coeffs: Vec<(MultiIndex, Q)> = MultiIndex::all_of_order(n, degree)
        .into_iter()
        .map(|m| (m, int(rng.gen_range(-r..=r))))
        .collect();
    NAryForm::new(default_form_vars(n), degree, (), coeffs).unwrap()
}

/// Like [`operator`], with every top-order coefficient a nonzero constant
/// plus a random polynomial, so the symbol is generic.
pub fn full_operator(rng: &mut impl Rng, vars: &Vars, n: usize, level: u32, max_deg: u32) -> LinearDiffOp {
    let mut coeffs = Vec::new();
    for a in MultiIndex::all_up_to(n, level) {
        let all: Vec<usize> = (0..vars.len()).collect();
        if a.order() == level {
            let mut p = poly_in(rng, vars.len(), &all, max_deg, 2);
            p.add_term(MultiIndex::zero(vars.len()), nonzero_q(rng));
            coeffs.push((a, RationalFunction::from_poly(p)));
        } else if rng.gen_bool(0.5) {
            coeffs.push((a, coefficient(rng, vars.len(), max_deg)));
        }
    }
    LinearDiffOp::new(vars.clone(), n, level, coeffs).unwrap()
}
