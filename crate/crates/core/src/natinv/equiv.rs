//! Deciding equivalence by matching sampled models.
//!
//! Each sample of the first model is located on the second by solving
//! `I(A₂)(y) = I(A₁)(x)` with Newton's method from a grid of seeds in the
//! second box; parameters (such as `u`) are held at the sample's values.
//! A preimage whose `J_α` values disagree refutes equivalence; agreement on
//! enough samples is numerical evidence for it.

use rayon::prelude::*;
use serde::Serialize;

use crate::diffop::LinearDiffOp;
use crate::domain::{close, DomainBox};
use crate::error::{Error, Result};

use super::expr::InvariantFrame;
use super::model::{sample_model, CompiledFrame, ModelFingerprint, ModelFunctions, ModelOptions, SampleRow};

#[derive(Clone, Debug, Serialize)]
pub struct EquivOptions {
    pub samples: usize,
    pub seed: u64,
    /// Relative residual (floor 1) a Newton root must reach.
    pub tol_root: f64,
    /// Relative agreement required of model values.
    pub tol_match: f64,
    /// Absolute agreement accepted for values near zero.
    pub abs_floor: f64,
    pub max_iter: usize,
    /// Newton seeds per axis of the second box.
    pub seeds_per_axis: usize,
    /// Fraction of samples that must match for an Equivalent verdict.
    pub min_match_fraction: f64,
    /// Grid points per axis for general-position certificates.
    pub grid_points: usize,
}

impl Default for EquivOptions {
    fn default() -> Self {
        EquivOptions {
            samples: 64,
            seed: 0,
            tol_root: 1e-12,
            tol_match: 1e-9,
            abs_floor: 1e-12,
            max_iter: 50,
            seeds_per_axis: 5,
            min_match_fraction: 0.95,
            grid_points: 9,
        }
    }
}

impl EquivOptions {
    pub fn model_options(&self) -> ModelOptions {
        ModelOptions {
            samples: self.samples,
            seed: self.seed,
            grid_points: self.grid_points,
            ..ModelOptions::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    Equivalent,
    Distinct {
        sample: usize,
        column: String,
        left: f64,
        right: f64,
    },
    Inconclusive {
        reason: String,
    },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Equivalent => "Equivalent",
            Verdict::Distinct { .. } => "Distinct",
            Verdict::Inconclusive { .. } => "Inconclusive",
        }
    }

    /// 0 Equivalent, 1 Distinct, 2 Inconclusive.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Equivalent => 0,
            Verdict::Distinct { .. } => 1,
            Verdict::Inconclusive { .. } => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SampleStatus {
    Matched,
    Mismatch { column: String, left: f64, right: f64 },
    NoPreimage,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleOutcome {
    pub index: usize,
    pub x: Vec<f64>,
    pub y: Option<Vec<f64>>,
    pub residual: Option<f64>,
    #[serde(flatten)]
    pub status: SampleStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub matched: usize,
    pub mismatched: usize,
    pub without_preimage: usize,
    pub total: usize,
    /// Largest root residual among matched samples.
    pub max_residual: f64,
    pub columns: Vec<String>,
    pub options: EquivOptions,
    pub samples: Vec<SampleOutcome>,
}

/// Solves `n × n` `m·d = r` by partial pivoting.
fn solve_dense(mut m: Vec<Vec<f64>>, mut r: Vec<f64>) -> Option<Vec<f64>> {
    let n = r.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col] == 0.0 || !m[pivot][col].is_finite() {
            return None;
        }
        m.swap(col, pivot);
        r.swap(col, pivot);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
            r[row] -= f * r[col];
        }
    }
    let mut d = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| m[row][k] * d[k]).sum();
        d[row] = (r[row] - s) / m[row][row];
    }
    Some(d)
}

fn residual(values: &[f64], target: &[f64]) -> f64 {
    values
        .iter()
        .zip(target)
        .map(|(v, t)| (v - t).abs() / t.abs().max(1.0))
        .fold(0.0, f64::max)
}

struct Solver<'a> {
    functions: &'a ModelFunctions,
    compiled: CompiledFrame,
    bx: &'a DomainBox,
    seeds: Vec<Vec<f64>>,
    opts: &'a EquivOptions,
}

impl<'a> Solver<'a> {
    fn new(functions: &'a ModelFunctions, bx: &'a DomainBox, opts: &'a EquivOptions) -> Self {
        let n = functions.n();
        let seeds = bx
            .leading(n)
            .centres(opts.seeds_per_axis)
            .iter()
            .map(|p| p.iter().map(crate::domain::q_to_f64).collect())
            .collect();
        Solver {
            functions,
            compiled: functions.compile_frame(),
            bx,
            seeds,
            opts,
        }
    }

    /// Newton from one seed; returns the root and its exactly evaluated
    /// residual.
    fn newton(&self, seed: &[f64], params: &[f64], target: &[f64]) -> Option<(Vec<f64>, f64)> {
        let n = seed.len();
        let mut point: Vec<f64> = seed.iter().chain(params).copied().collect();
        for _ in 0..self.opts.max_iter {
            let f: Vec<f64> = self.compiled.values.iter().map(|c| c.eval(&point)).collect();
            if f.iter().any(|v| !v.is_finite()) {
                return None;
            }
            let r: Vec<f64> = f.iter().zip(target).map(|(v, t)| t - v).collect();
            let jac: Vec<Vec<f64>> = self
                .compiled
                .jacobian
                .iter()
                .map(|row| row.iter().map(|c| c.eval(&point)).collect())
                .collect();
            let d = solve_dense(jac, r)?;
            let mut step = 0.0f64;
            for i in 0..n {
                point[i] += d[i];
                step = step.max(d[i].abs() / point[i].abs().max(1.0));
            }
            if !point.iter().all(|v| v.is_finite()) {
                return None;
            }
            if step < 1e-15 {
                break;
            }
        }
        let exact = self.functions.eval_frame_f64(&point).ok()?;
        let res = residual(&exact, target);
        (res < self.opts.tol_root).then(|| (point[..n].to_vec(), res))
    }

    /// Parameters are preserved by the maps, so a sample whose parameters
    /// leave the second box has no preimage there.
    fn params_inside(&self, params: &[f64]) -> bool {
        self.functions.params().iter().zip(params).all(|(&axis, &v)| {
            let a = crate::domain::q_to_f64(&self.bx.lo()[axis]);
            let b = crate::domain::q_to_f64(&self.bx.hi()[axis]);
            let slack = 1e-9 * (b - a).abs().max(1.0);
            v >= a - slack && v <= b + slack
        })
    }

    /// Distinct roots inside the box.
    fn preimages(&self, params: &[f64], target: &[f64]) -> Vec<(Vec<f64>, f64)> {
        let mut roots: Vec<(Vec<f64>, f64)> = Vec::new();
        for seed in &self.seeds {
            if let Some((y, res)) = self.newton(seed, params, target) {
                if !self.bx.leading(y.len()).contains_f64(&y, 1e-9) {
                    continue;
                }
                let known = roots
                    .iter()
                    .any(|(r, _)| r.iter().zip(&y).all(|(a, b)| close(*a, *b, 1e-8, 1e-10)));
                if !known {
                    roots.push((y, res));
                }
            }
        }
        roots
    }

    fn locate(&self, row: &SampleRow, columns: &[String]) -> SampleOutcome {
        let np = self.functions.params().len();
        let params = &row.base[..np];
        let target = &row.base[np..];
        let roots = if self.params_inside(params) {
            self.preimages(params, target)
        } else {
            Vec::new()
        };
        let mut first_mismatch: Option<(Vec<f64>, f64, SampleStatus)> = None;
        for (y, res) in roots {
            let full: Vec<f64> = y.iter().chain(params).copied().collect();
            let Ok(values) = self.functions.eval_y_f64(&full) else {
                continue;
            };
            let bad = row
                .y
                .iter()
                .zip(&values)
                .position(|(a, b)| !close(*a, *b, self.opts.tol_match, self.opts.abs_floor));
            match bad {
                None => {
                    return SampleOutcome {
                        index: row.index,
                        x: row.x.clone(),
                        y: Some(y),
                        residual: Some(res),
                        status: SampleStatus::Matched,
                    }
                }
                Some(c) if first_mismatch.is_none() => {
                    let status = SampleStatus::Mismatch {
                        column: columns[c].clone(),
                        left: row.y[c],
                        right: values[c],
                    };
                    first_mismatch = Some((y, res, status));
                }
                Some(_) => {}
            }
        }
        match first_mismatch {
            Some((y, res, status)) => SampleOutcome {
                index: row.index,
                x: row.x.clone(),
                y: Some(y),
                residual: Some(res),
                status,
            },
            None => SampleOutcome {
                index: row.index,
                x: row.x.clone(),
                y: None,
                residual: None,
                status: SampleStatus::NoPreimage,
            },
        }
    }
}

/// Matches a sampled model against the model functions of a second
/// operator over its box.
pub fn match_models(
    model: &ModelFingerprint,
    target: &ModelFunctions,
    bx2: &DomainBox,
    opts: &EquivOptions,
) -> Result<EquivalenceReport> {
    if model.y_columns != target.y_names() || model.base_columns != target.base_names() {
        return Err(Error::dim("models have different shapes"));
    }
    let solver = Solver::new(target, bx2, opts);
    let outcomes: Vec<SampleOutcome> = model
        .rows
        .par_iter()
        .map(|row| solver.locate(row, &model.y_columns))
        .collect();
    Ok(summarize(outcomes, model.y_columns.clone(), opts))
}

fn summarize(samples: Vec<SampleOutcome>, columns: Vec<String>, opts: &EquivOptions) -> EquivalenceReport {
    let total = samples.len();
    let matched = samples.iter().filter(|s| s.status == SampleStatus::Matched).count();
    let without_preimage = samples.iter().filter(|s| s.status == SampleStatus::NoPreimage).count();
    let mismatched = total - matched - without_preimage;
    let max_residual = samples
        .iter()
        .filter(|s| s.status == SampleStatus::Matched)
        .filter_map(|s| s.residual)
        .fold(0.0, f64::max);
    let first_mismatch = samples.iter().find_map(|s| match &s.status {
        SampleStatus::Mismatch { column, left, right } => Some(Verdict::Distinct {
            sample: s.index,
            column: column.clone(),
            left: *left,
            right: *right,
        }),
        _ => None,
    });
    let verdict = if let Some(v) = first_mismatch {
        v
    } else if total > 0 && matched as f64 >= opts.min_match_fraction * total as f64 {
        Verdict::Equivalent
    } else {
        Verdict::Inconclusive {
            reason: format!(
                "range mismatch: {without_preimage} of {total} samples have no base-coordinate preimage in the second box"
            ),
        }
    };
    EquivalenceReport {
        verdict,
        matched,
        mismatched,
        without_preimage,
        total,
        max_residual,
        columns,
        options: opts.clone(),
        samples,
    }
}

/// Compares `(A₁, box₁)` and `(A₂, box₂)` in one frame.
pub fn equivalence_check(
    a1: &LinearDiffOp,
    box1: &DomainBox,
    a2: &LinearDiffOp,
    box2: &DomainBox,
    frame: &InvariantFrame,
    opts: &EquivOptions,
) -> Result<EquivalenceReport> {
    if a1.n() != a2.n() || a1.level() != a2.level() {
        return Err(Error::dim("operators differ in dimension or order"));
    }
    let f1 = ModelFunctions::new(a1, frame, &[])?;
    let f2 = ModelFunctions::new(a2, frame, &[])?;
    compare_models(&f1, a1, box1, &f2, a2, box2, frame.format(a1.vars()), opts)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn compare_models(
    f1: &ModelFunctions,
    a1: &LinearDiffOp,
    box1: &DomainBox,
    f2: &ModelFunctions,
    a2: &LinearDiffOp,
    box2: &DomainBox,
    frame_text: String,
    opts: &EquivOptions,
) -> Result<EquivalenceReport> {
    f2.certify(box2, opts.grid_points, a2.vars().names())?.require()?;
    let model = sample_model(
        f1,
        frame_text,
        a1.vars().names(),
        box1,
        &opts.model_options(),
    )?;
    match_models(&model, f2, box2, opts)
}
