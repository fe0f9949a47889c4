//! Naturality checks `e(φ_*A)∘φ = det(Dφ)^w · e(A)`, where `w` is the weight
//! of a relative invariant and 0 for absolute ones.

#![allow(dead_code)]

use diffinv_core::diffop::{pushforward, DiffMap, LinearDiffOp};
use diffinv_core::natinv::{eval_invariant_in_frame, parse_invariant, InvariantFrame};
use diffinv_core::poly::{jacobian_det, RationalFunction};
use diffinv_core::Result;

/// Expressions for binary operators of order 4, with their weights.
pub const ORDER4_BINARY: &[(&str, i32)] = &[
    ("free", 0),
    ("box(free)", 0),
    ("box(free^2) - 2*free*box(free)", 0),
    ("Jq(sym)", 0),
    ("box(Jq(sym))", 0),
    ("J2q(sym)", 4),
    ("J3q(sym)", 6),
    ("(free + 1)^(-2)", 0),
    ("tresse(box(free), 1)", 0),
    ("tresse(box(free^2), 2)", 0),
];

pub const ORDER4_BINARY_FRAME: &str = "Jq(sym), free";

/// Expressions for ternary operators of order 3, with their weights.
pub const ORDER3_TERNARY: &[(&str, i32)] = &[
    ("free", 0),
    ("box(free)", 0),
    ("J1c(sym)", 6),
    ("J2c(sym)", 9),
    ("box(free^2)/free", 0),
    ("tresse(box(free^2), 1)", 0),
];

pub const ORDER3_TERNARY_FRAME: &str = "free, box(free), box(free^2)";

fn power(f: &RationalFunction, w: i32) -> RationalFunction {
    if w == 0 {
        RationalFunction::one(f.nvars())
    } else {
        f.pow(w).expect("nonzero Jacobian")
    }
}

/// Both sides of the naturality law; errors on either side are returned
/// so callers can require that the two sides fail together.
pub fn naturality_sides(
    a: &LinearDiffOp,
    phi: &DiffMap,
    text: &str,
    weight: i32,
    frame_text: &str,
) -> (Result<RationalFunction>, Result<RationalFunction>) {
    let vars = a.vars();
    let e = parse_invariant(text, vars).unwrap();
    let frame = InvariantFrame::parse(frame_text, vars).unwrap();
    let pushed = pushforward(a, phi).unwrap();
    let left = eval_invariant_in_frame(&e, &pushed, &frame).and_then(|v| phi.pull_back(&v));
    let fwd: Vec<RationalFunction> = phi.forward().iter().cloned().map(RationalFunction::from_poly).collect();
    let coords: Vec<usize> = (0..a.n()).collect();
    let det = jacobian_det(&fwd, &coords).unwrap();
    let right = eval_invariant_in_frame(&e, a, &frame).map(|v| &v * &power(&det, weight));
    (left, right)
}

pub fn natural(a: &LinearDiffOp, phi: &DiffMap, text: &str, weight: i32, frame_text: &str) -> bool {
    match naturality_sides(a, phi, text, weight, frame_text) {
        (Ok(l), Ok(r)) => l == r,
        (Err(l), Err(r)) => std::mem::discriminant(&l) == std::mem::discriminant(&r),
        _ => false,
    }
}
