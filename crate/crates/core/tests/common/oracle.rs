//! Brute-force transvectant oracle.
//!
//! Independent of the library: its own sparse polynomial map, literal l-fold
//! application of the n!-term alternating operator to the tensor product held
//! in n disjoint variable groups, then multiplication of the groups. No
//! operator expansion, no caching.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Poly = BTreeMap<Vec<u32>, BigRational>;

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn add_into(p: &mut Poly, k: Vec<u32>, c: BigRational) {
    if c.is_zero() {
        return;
    }
    let e = p.entry(k.clone()).or_insert_with(BigRational::zero);
    *e += c;
    if e.is_zero() {
        p.remove(&k);
    }
}

pub fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ka, ca) in a {
        for (kb, cb) in b {
            let k: Vec<u32> = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
            add_into(&mut out, k, ca * cb);
        }
    }
    out
}

fn derive(p: &Poly, var: usize) -> Poly {
    let mut out = Poly::new();
    for (k, c) in p {
        if k[var] > 0 {
            let mut k2 = k.clone();
            k2[var] -= 1;
            add_into(&mut out, k2, c * int(k[var] as i64));
        }
    }
    out
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    heap(n, &mut idx, &mut out);
    out.into_iter()
        .map(|p| {
            let mut inv = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if p[i] > p[j] {
                        inv += 1;
                    }
                }
            }
            (p, if inv % 2 == 0 { 1 } else { -1 })
        })
        .collect()
}

fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(a.clone());
        return;
    }
    for i in 0..k {
        heap(k - 1, a, out);
        if k % 2 == 0 {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
    }
}

/// Form given as `(exponents, coefficient)` pairs in n variables.
pub fn form(terms: &[(&[u32], i64)]) -> Poly {
    let mut p = Poly::new();
    for (k, c) in terms {
        add_into(&mut p, k.to_vec(), int(*c));
    }
    p
}

/// `{f₁,…,fₙ}_l` computed literally.
pub fn transvectant(forms: &[Poly], n: usize, l: u32) -> Poly {
    assert_eq!(forms.len(), n);
    // tensor product over n*n variables
    let mut t: Poly = BTreeMap::from([(vec![0u32; n * n], BigRational::one())]);
    for (i, f) in forms.iter().enumerate() {
        let mut lifted = Poly::new();
        for (k, c) in f {
            let mut e = vec![0u32; n * n];
            for j in 0..n {
                e[i * n + j] = k[j];
            }
            add_into(&mut lifted, e, c.clone());
        }
        t = mul(&t, &lifted);
    }
    let perms = permutations(n);
    for _ in 0..l {
        let mut next = Poly::new();
        for (p, sign) in &perms {
            let mut term = t.clone();
            for i in 0..n {
                term = derive(&term, i * n + p[i]);
            }
            for (k, c) in term {
                add_into(&mut next, k, c * int(*sign));
            }
        }
        t = next;
    }
    let mut out = Poly::new();
    for (k, c) in t {
        let mut e = vec![0u32; n];
        for (idx, a) in k.iter().enumerate() {
            e[idx % n] += a;
        }
        add_into(&mut out, e, c);
    }
    out
}

pub fn scalar(p: &Poly) -> BigRational {
    p.iter()
        .find(|(k, _)| k.iter().all(|&a| a == 0))
        .map(|(_, c)| c.clone())
        .unwrap_or_else(BigRational::zero)
}

/// Quintic invariants (J4, J8, J12) of a binary quintic.
pub fn quintic(p: &Poly) -> (BigRational, BigRational, BigRational) {
    let c21 = transvectant(&[p.clone(), p.clone()], 2, 4);
    let c3 = transvectant(&[p.clone(), c21.clone()], 2, 2);
    let c22 = transvectant(&[c3.clone(), c3.clone()], 2, 2);
    let j4 = scalar(&transvectant(&[c21.clone(), c21.clone()], 2, 2));
    let j8 = scalar(&transvectant(&[c21.clone(), c22.clone()], 2, 2));
    let j12 = scalar(&transvectant(&[c22.clone(), c22.clone()], 2, 2));
    (j4, j8, j12)
}

/// Ternary cubic invariants (J1, J2).
pub fn ternary_cubic(p: &Poly) -> (BigRational, BigRational) {
    let p2 = mul(p, p);
    let j1 = scalar(&transvectant(&[p2.clone(), p2.clone(), p2.clone()], 3, 6));
    let c1 = transvectant(&[p.clone(), p.clone(), p.clone()], 3, 2);
    let c2 = transvectant(&[p.clone(), p.clone(), c1.clone()], 3, 2);
    let j2 = scalar(&transvectant(&[p.clone(), c1, c2], 3, 3));
    (j1, j2)
}

/// Converts to the library's form type, for comparisons.
pub fn to_form(p: &Poly, n: usize, degree: u32) -> diffinv_core::transvect::NAryForm {
    use diffinv_core::poly::MultiIndex;
    diffinv_core::transvect::NAryForm::new(
        diffinv_core::transvect::default_form_vars(n),
        degree,
        (),
        p.iter().map(|(k, c)| (MultiIndex::from(k.clone()), c.clone())),
    )
    .unwrap()
}

/// The reverse of [`to_form`].
pub fn from_form(f: &diffinv_core::transvect::NAryForm) -> Poly {
    f.coeffs().iter().map(|(m, c)| (m.entries().to_vec(), c.clone())).collect()
}
