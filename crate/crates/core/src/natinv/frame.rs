//! Frames of invariants: general position, `J_α`, and the symbol pairing.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::diffop::{apply_op, LinearDiffOp, SymbolField};
use crate::domain::DomainBox;
use crate::error::{Error, Result};
use crate::poly::{jacobian_det, MultiIndex, RationalFunction, Q};
use crate::transvect::{default_form_vars, Form};

use super::expr::{FrameValues, InvariantFrame};

/// Result of checking that frame invariants are coordinates on a box.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneralPosition {
    pub ok: bool,
    /// Jacobian determinant, printed.
    pub det: String,
    pub identically_zero: bool,
    pub grid_points: usize,
    /// A grid point where the determinant is nonzero, as exact strings.
    pub witness: Option<Vec<String>>,
    /// Grid points where the determinant vanishes or has a pole.
    pub failures: Vec<Vec<String>>,
}

impl GeneralPosition {
    pub fn reason(&self) -> String {
        if self.identically_zero {
            "Jacobian determinant vanishes identically".to_string()
        } else {
            format!(
                "Jacobian determinant vanishes or is undefined at {} of {} grid points",
                self.failures.len(),
                self.grid_points
            )
        }
    }

    pub fn require(&self) -> Result<()> {
        if self.ok {
            Ok(())
        } else {
            Err(Error::degenerate("frame", self.reason()))
        }
    }
}

const MAX_REPORTED_FAILURES: usize = 16;

/// Checks `det(∂f_i/∂v_j) ≢ 0` and its nonvanishing on a grid with
/// `points` points per axis of `bx` (which covers every variable).
pub fn jacobian_certificate(
    fs: &[RationalFunction],
    vars: &[usize],
    bx: &DomainBox,
    points: usize,
    names: &[String],
) -> Result<GeneralPosition> {
    let det = jacobian_det(fs, vars)?;
    let det_text = det.format(names);
    let grid = bx.grid(points);
    let grid_points = grid.len();
    if det.is_zero() {
        return Ok(GeneralPosition {
            ok: false,
            det: det_text,
            identically_zero: true,
            grid_points,
            witness: None,
            failures: Vec::new(),
        });
    }
    let values: Vec<(Vec<Q>, bool)> = grid
        .into_par_iter()
        .map(|p| {
            let ok = matches!(det.eval(&p), Ok(v) if !v.is_zero());
            (p, ok)
        })
        .collect();
    let show = |p: &[Q]| p.iter().map(|q| q.to_string()).collect::<Vec<_>>();
    let witness = values.iter().find(|(_, ok)| *ok).map(|(p, _)| show(p));
    let failures: Vec<Vec<String>> = values
        .iter()
        .filter(|(_, ok)| !ok)
        .take(MAX_REPORTED_FAILURES)
        .map(|(p, _)| show(p))
        .collect();
    let any_failure = values.iter().any(|(_, ok)| !ok);
    Ok(GeneralPosition {
        ok: !any_failure,
        det: det_text,
        identically_zero: false,
        grid_points,
        witness,
        failures,
    })
}

/// `d̂I₁ ∧ ⋯ ∧ d̂I_n ≠ 0` for the frame evaluated on `A`, on the box.
pub fn general_position_check(
    frame: &InvariantFrame,
    a: &LinearDiffOp,
    bx: &DomainBox,
    points: usize,
) -> Result<GeneralPosition> {
    let values = frame.evaluate(a)?;
    general_position_of(&values, a, bx, points)
}

pub fn general_position_of(
    values: &[RationalFunction],
    a: &LinearDiffOp,
    bx: &DomainBox,
    points: usize,
) -> Result<GeneralPosition> {
    if bx.dim() != a.nvars() {
        return Err(Error::dim("box must cover every variable of the operator"));
    }
    let coords: Vec<usize> = (0..a.n()).collect();
    jacobian_certificate(values, &coords, bx, points, a.vars().names())
}

/// Tresse derivatives `df/dI_i` of a function in a frame.
pub fn tresse_derivative(
    f: &RationalFunction,
    frame: &InvariantFrame,
    a: &LinearDiffOp,
) -> Result<Vec<RationalFunction>> {
    FrameValues::new(frame.evaluate(a)?).tresse(f)
}

/// `J_α = (1/α!)·A(Π I_i^{α_i})` from evaluated frame values.
pub fn j_alpha_of(a: &LinearDiffOp, values: &[RationalFunction], alpha: &MultiIndex) -> Result<RationalFunction> {
    if alpha.len() != values.len() {
        return Err(Error::dim("multi-index length differs from the frame length"));
    }
    if alpha.order() > a.level() {
        return Err(Error::Invalid(format!("|α| exceeds the operator order {}", a.level())));
    }
    let mut prod = RationalFunction::one(a.nvars());
    for (v, &e) in values.iter().zip(alpha.entries()) {
        if e > 0 {
            prod = &prod * &v.pow(e as i32)?;
        }
    }
    let inv = Q::new(BigInt::from(1), alpha.factorial());
    Ok(apply_op(a, &prod)?.scale(&inv))
}

pub fn j_alpha(a: &LinearDiffOp, frame: &InvariantFrame, alpha: &MultiIndex) -> Result<RationalFunction> {
    j_alpha_of(a, &frame.evaluate(a)?, alpha)
}

/// `J_α` in the coordinate frame centred at a point `p`, `I = x − p`,
/// evaluated at `x = p`. The centre is kept symbolic and then identified
/// with `x`, so the result is a rational function; it equals the
/// coefficient `A_α`.
pub fn centred_coordinate_j_alpha(a: &LinearDiffOp, alpha: &MultiIndex) -> Result<RationalFunction> {
    let n = a.n();
    let m = a.nvars();
    let mut names = a.vars().names().to_vec();
    names.extend((0..n).map(|i| format!("centre{}", i + 1)));
    let lifted = a.map_coeffs(crate::poly::Vars::new(names), |c| Ok(c.extend(n)))?;
    let frame: Vec<RationalFunction> = (0..n)
        .map(|i| &RationalFunction::var(m + n, i) - &RationalFunction::var(m + n, m + i))
        .collect();
    let j = j_alpha_of(&lifted, &frame, alpha)?;
    let back: Vec<RationalFunction> = (0..m)
        .map(|i| RationalFunction::var(m, i))
        .chain((0..n).map(|i| RationalFunction::var(m, i)))
        .collect();
    j.substitute(&back)
}

/// All `J_α` with `|α| ≤ k`, in graded order (descending lex within each
/// order). Powers of the frame values are shared across indices.
pub fn all_j_alpha(a: &LinearDiffOp, values: &[RationalFunction]) -> Result<Vec<(MultiIndex, RationalFunction)>> {
    let n = values.len();
    let alphas = MultiIndex::all_up_to(n, a.level());
    let k = a.level() as usize;
    let mut powers: Vec<Vec<RationalFunction>> = Vec::with_capacity(n);
    for v in values {
        let mut p = vec![RationalFunction::one(a.nvars())];
        for e in 1..=k {
            let next = &p[e - 1] * v;
            p.push(next);
        }
        powers.push(p);
    }
    alphas
        .into_par_iter()
        .map(|alpha| {
            let mut prod = RationalFunction::one(a.nvars());
            for (i, &e) in alpha.entries().iter().enumerate() {
                if e > 0 {
                    prod = &prod * &powers[i][e as usize];
                }
            }
            let inv = Q::new(BigInt::from(1), alpha.factorial());
            let j = apply_op(a, &prod)?.scale(&inv);
            Ok((alpha, j))
        })
        .collect()
}

/// Column label `Y_a1_a2_…` of `J_α`.
pub fn y_column(alpha: &MultiIndex) -> String {
    let parts: Vec<String> = alpha.entries().iter().map(|e| e.to_string()).collect();
    format!("Y_{}", parts.join("_"))
}

/// Full symmetric contraction `⟨σ, d̂h₁^{α₁}⋯d̂h_n^{α_n}⟩` with the
/// permanent-sum convention (no `1/k!`): with `L_j = Σ_i (∂h_j/∂x_i)ξ_i`,
/// the value is `Σ_β σ_β·β!·[ξ^β] Π_j L_j^{α_j}`.
pub fn symbol_j_alpha(sigma: &SymbolField, h: &[RationalFunction], alpha: &MultiIndex) -> Result<RationalFunction> {
    let n = sigma.n();
    if h.len() != n || alpha.len() != n {
        return Err(Error::dim("need n functions and an n-entry multi-index"));
    }
    if alpha.order() != sigma.k() {
        return Err(Error::Invalid(format!("|α| must equal the symbol order {}", sigma.k())));
    }
    let m = sigma.vars().len();
    let xi = default_form_vars(n);
    let mut prod: Form<RationalFunction> = Form::new(xi.clone(), 0, m, [(MultiIndex::zero(n), RationalFunction::one(m))])?;
    for (j, hj) in h.iter().enumerate() {
        if hj.nvars() != m {
            return Err(Error::dim("function variables differ from the symbol's"));
        }
        let lj = Form::new(xi.clone(), 1, m, (0..n).map(|i| (MultiIndex::unit(n, i), hj.derive(i))))?;
        prod = prod.mul(&lj.pow(alpha.get(j))?)?;
    }
    let mut out = RationalFunction::zero(m);
    for (beta, s) in sigma.coeffs() {
        let c = prod.coeff(beta);
        if !c.is_zero() {
            out = &out + &(s * &c).scale(&Q::from_integer(beta.factorial()));
        }
    }
    Ok(out)
}
