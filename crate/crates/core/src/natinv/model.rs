//! Sampled models `x ↦ (I(A)(x), J_α(A)(x))`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::diffop::LinearDiffOp;
use crate::domain::{close, q_to_f64, row_rng, BoxSpec, DomainBox};
use crate::error::{Error, Result};
use crate::poly::{jacobian, CompiledRational, MultiIndex, RationalFunction, Q};

use super::expr::InvariantFrame;
use super::frame::{all_j_alpha, jacobian_certificate, y_column, GeneralPosition};

/// The exact functions a model samples.
///
/// Base coordinates are the values of the parameters listed in `params`
/// (the `u` slot of an F-operator) followed by the frame invariants. `J_α`
/// is taken over the frame invariants only.
#[derive(Clone, Debug)]
pub struct ModelFunctions {
    n: usize,
    nvars: usize,
    params: Vec<usize>,
    frame: Vec<RationalFunction>,
    alphas: Vec<MultiIndex>,
    jalphas: Vec<RationalFunction>,
    base_names: Vec<String>,
}

impl ModelFunctions {
    pub fn new(a: &LinearDiffOp, frame: &InvariantFrame, params: &[usize]) -> Result<Self> {
        let values = frame.evaluate(a)?;
        ModelFunctions::from_values(a, values, params)
    }

    pub fn from_values(a: &LinearDiffOp, values: Vec<RationalFunction>, params: &[usize]) -> Result<Self> {
        if params.iter().any(|&p| p < a.n() || p >= a.nvars()) {
            return Err(Error::dim("base parameters must be non-coordinate variables"));
        }
        if a.nvars() != a.n() + params.len() {
            return Err(Error::dim("every parameter of the operator must be a base coordinate"));
        }
        let (alphas, jalphas) = all_j_alpha(a, &values)?.into_iter().unzip();
        let mut base_names: Vec<String> = params.iter().map(|_| "y0".to_string()).collect();
        if params.len() > 1 {
            base_names = (0..params.len()).map(|i| format!("y0_{}", i + 1)).collect();
        }
        base_names.extend((1..=values.len()).map(|i| format!("I{i}")));
        Ok(ModelFunctions {
            n: a.n(),
            nvars: a.nvars(),
            params: params.to_vec(),
            frame: values,
            alphas,
            jalphas,
            base_names,
        })
    }

    pub fn frame_values(&self) -> &[RationalFunction] {
        &self.frame
    }

    pub fn alphas(&self) -> &[MultiIndex] {
        &self.alphas
    }

    pub fn jalphas(&self) -> &[RationalFunction] {
        &self.jalphas
    }

    pub fn params(&self) -> &[usize] {
        &self.params
    }

    pub fn base_names(&self) -> &[String] {
        &self.base_names
    }

    pub fn y_names(&self) -> Vec<String> {
        self.alphas.iter().map(y_column).collect()
    }

    /// Base functions `(params…, I…)` as rational functions.
    pub fn base_functions(&self) -> Vec<RationalFunction> {
        self.params
            .iter()
            .map(|&p| RationalFunction::var(self.nvars, p))
            .chain(self.frame.iter().cloned())
            .collect()
    }

    /// General-position certificate for the base functions in all variables.
    pub fn certify(&self, bx: &DomainBox, points: usize, names: &[String]) -> Result<GeneralPosition> {
        if bx.dim() != self.nvars {
            return Err(Error::dim("box must cover every variable of the operator"));
        }
        let vars: Vec<usize> = (0..self.n).chain(self.params.iter().copied()).collect();
        jacobian_certificate(&self.base_functions(), &vars, bx, points, names)
    }

    /// Values at an exact point, each computed exactly and rounded once.
    pub fn eval_exact(&self, p: &[Q]) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut base: Vec<f64> = self.params.iter().map(|&i| q_to_f64(&p[i])).collect();
        for f in &self.frame {
            base.push(q_to_f64(&f.eval(p)?));
        }
        let y = self
            .jalphas
            .iter()
            .map(|f| f.eval(p).map(|v| q_to_f64(&v)))
            .collect::<Result<Vec<_>>>()?;
        if base.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::Pole("value is not representable as a finite double".into()));
        }
        Ok((base, y))
    }

    /// `J_α` values at a floating point, reading the coordinates exactly.
    pub fn eval_y_f64(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.jalphas.iter().map(|f| f.eval_f64(p)).collect()
    }

    /// Frame values at a floating point, reading the coordinates exactly.
    pub fn eval_frame_f64(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.frame.iter().map(|f| f.eval_f64(p)).collect()
    }

    /// Float evaluators of the frame and its Jacobian in the coordinates,
    /// for Newton iterations.
    pub fn compile_frame(&self) -> CompiledFrame {
        let coords: Vec<usize> = (0..self.n).collect();
        let jac = jacobian(&self.frame, &coords);
        CompiledFrame {
            values: self.frame.iter().map(CompiledRational::new).collect(),
            jacobian: jac
                .iter()
                .map(|row| row.iter().map(CompiledRational::new).collect())
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

#[derive(Clone, Debug)]
pub struct CompiledFrame {
    pub values: Vec<CompiledRational>,
    /// `jacobian[i][j] = ∂I_i/∂x_j`
    pub jacobian: Vec<Vec<CompiledRational>>,
}

#[derive(Clone, Debug)]
pub struct ModelOptions {
    pub samples: usize,
    pub seed: u64,
    /// Grid points per axis for the general-position certificate.
    pub grid_points: usize,
    /// Draw attempts per row before giving up.
    pub max_attempts: usize,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            samples: 64,
            seed: 0,
            grid_points: 9,
            max_attempts: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRow {
    pub index: usize,
    /// Exact sample point.
    #[serde(skip)]
    pub point: Vec<Q>,
    pub x: Vec<f64>,
    pub base: Vec<f64>,
    pub y: Vec<f64>,
}

/// A sampled model over a box, with the frame certificate.
#[derive(Clone, Debug, Serialize)]
pub struct ModelFingerprint {
    pub frame: String,
    pub variables: Vec<String>,
    #[serde(rename = "box")]
    pub domain: BoxSpec,
    pub seed: u64,
    pub samples: usize,
    pub rejections: usize,
    pub base_columns: Vec<String>,
    pub y_columns: Vec<String>,
    pub certificate: GeneralPosition,
    #[serde(skip)]
    pub rows: Vec<SampleRow>,
}

/// Relative distance below which two base points count as the same.
const BASE_DISTINCT_TOL: f64 = 1e-12;

/// Samples `functions` over `bx`. Row `i` draws from its own generator
/// stream, so the table does not depend on thread scheduling; points where
/// a value has a pole are redrawn.
pub fn sample_model(
    functions: &ModelFunctions,
    frame_text: String,
    variables: &[String],
    bx: &DomainBox,
    opts: &ModelOptions,
) -> Result<ModelFingerprint> {
    let certificate = functions.certify(bx, opts.grid_points, variables)?;
    certificate.require()?;
    let rows: Vec<(SampleRow, usize)> = (0..opts.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = row_rng(opts.seed, i as u64);
            for attempt in 0..opts.max_attempts {
                let p = bx.sample(&mut rng);
                if let Ok((base, y)) = functions.eval_exact(&p) {
                    let x = p.iter().map(q_to_f64).collect();
                    let row = SampleRow {
                        index: i,
                        point: p,
                        x,
                        base,
                        y,
                    };
                    return Ok((row, attempt));
                }
            }
            Err(Error::degenerate(
                "model",
                format!("row {i}: no pole-free sample in {} attempts", opts.max_attempts),
            ))
        })
        .collect::<Result<_>>()?;
    let rejections = rows.iter().map(|(_, r)| r).sum();
    let rows: Vec<SampleRow> = rows.into_iter().map(|(r, _)| r).collect();
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            if a.base.iter().zip(&b.base).all(|(u, v)| close(*u, *v, BASE_DISTINCT_TOL, 0.0)) {
                return Err(Error::degenerate(
                    "model",
                    format!("rows {} and {} share base coordinates", a.index, b.index),
                ));
            }
        }
    }
    Ok(ModelFingerprint {
        frame: frame_text,
        variables: variables.to_vec(),
        domain: bx.to_spec(),
        seed: opts.seed,
        samples: opts.samples,
        rejections,
        base_columns: functions.base_names().to_vec(),
        y_columns: functions.y_names(),
        certificate,
        rows,
    })
}

/// The model of `A` in `frame` over `bx`.
pub fn model_map(
    a: &LinearDiffOp,
    frame: &InvariantFrame,
    bx: &DomainBox,
    opts: &ModelOptions,
) -> Result<ModelFingerprint> {
    let functions = ModelFunctions::new(a, frame, &[])?;
    sample_model(&functions, frame.format(a.vars()), a.vars().names(), bx, opts)
}

impl ModelFingerprint {
    pub fn header(&self) -> Vec<String> {
        self.variables
            .iter()
            .chain(&self.base_columns)
            .chain(&self.y_columns)
            .cloned()
            .collect()
    }

    /// CSV with 17 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = self.header().join(",");
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r
                .x
                .iter()
                .chain(&r.base)
                .chain(&r.y)
                .map(|v| format!("{v:.16e}"))
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}
