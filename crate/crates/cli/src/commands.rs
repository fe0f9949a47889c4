use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use diffinv_core::catalog::{Catalog, Path as InvariantPath};
use diffinv_core::domain::DomainBox;
use diffinv_core::fnonlinear::{extended_equivalence_check, AdjustedTriple};
use diffinv_core::natinv::{equivalence_check, model_map, EquivOptions, EquivalenceReport, InvariantFrame, ModelOptions};
use diffinv_core::transvect::transvectant;
use diffinv_core::Error;
use serde::Serialize;
use serde_json::json;

use crate::input::{read_json, FormFile, OperatorFile};
use crate::{
    EquivArgs, Failure, FequivArgs, Format, InvariantsArgs, ModelArgs, OutputArgs, SamplingArgs, ToleranceArgs,
    TransvectArgs, EXIT_INCONCLUSIVE,
};

/// The resolved configuration, embedded in every report.
#[derive(Serialize, Default)]
struct RunConfig {
    command: &'static str,
    inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    catalog: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    order: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    frame: Option<String>,
    #[serde(rename = "box", skip_serializing_if = "Option::is_none")]
    domain: Option<String>,
    #[serde(rename = "box2", skip_serializing_if = "Option::is_none")]
    domain2: Option<String>,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    sampling: Option<SamplingArgs>,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    tolerances: Option<ToleranceArgs>,
    format: Option<Format>,
}

fn paths(ps: &[&PathBuf]) -> Vec<String> {
    ps.iter().map(|p| p.display().to_string()).collect()
}

fn only_json(out: &OutputArgs) -> Result<Format, Failure> {
    match out.format.unwrap_or(Format::Json) {
        Format::Json => Ok(Format::Json),
        Format::Csv => Err(Failure::Usage("this command only writes json".into())),
    }
}

fn write_to(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::data(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::data(format!("stdout: {e}"))),
    }
}

fn emit_json(out: &OutputArgs, value: &impl Serialize) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::data(e.to_string()))?;
    text.push('\n');
    write_to(out.output.as_deref(), &text)
}

/// A flag value, else the field from the input file.
fn resolve(flag: &Option<String>, file: &Option<String>, what: &str) -> Result<String, Failure> {
    flag.clone()
        .or_else(|| file.clone())
        .ok_or_else(|| Failure::Usage(format!("no {what}: pass --{what} or set it in the input file")))
}

#[derive(Serialize)]
struct InvariantEntry {
    name: String,
    value: Option<String>,
    path: InvariantPath,
    #[serde(skip_serializing_if = "Option::is_none")]
    undefined: Option<String>,
}

pub fn form_invariants(args: &InvariantsArgs) -> Result<u8, Failure> {
    let format = only_json(&args.out)?;
    let catalog: Catalog = args
        .catalog
        .parse()
        .map_err(|_| Failure::Usage(format!("unknown catalog `{}`", args.catalog)))?;
    let file: FormFile = read_json(&args.input)?;
    let form = file.form()?;
    let reports = catalog.invariants(&form).map_err(|e| Failure::data(e.to_string()))?;
    let regular = reports.iter().find_map(|r| r.regular);
    let values: BTreeMap<String, Option<String>> = reports
        .iter()
        .map(|r| (r.name.clone(), r.value.as_ref().map(|v| v.to_string())))
        .collect();
    let invariants: Vec<InvariantEntry> = reports
        .into_iter()
        .map(|r| InvariantEntry {
            value: r.value.map(|v| v.to_string()),
            name: r.name,
            path: r.path,
            undefined: r.undefined,
        })
        .collect();
    let config = RunConfig {
        command: "form invariants",
        inputs: paths(&[&args.input]),
        catalog: Some(catalog.to_string()),
        format: Some(format),
        ..Default::default()
    };
    let mut report = json!({
        "config": config,
        "catalog": catalog.to_string(),
        "form": FormFile::from_form(&form),
        "values": values,
        "invariants": invariants,
    });
    if let Some(r) = regular {
        report["regular"] = json!(r);
    }
    emit_json(&args.out, &report)?;
    Ok(0)
}

pub fn transvect(args: &TransvectArgs) -> Result<u8, Failure> {
    let format = only_json(&args.out)?;
    let mut inputs: Vec<&PathBuf> = args.input.iter().collect();
    inputs.extend(&args.input2);
    let forms = inputs
        .iter()
        .map(|p| read_json::<FormFile>(p)?.form())
        .collect::<Result<Vec<_>, _>>()?;
    let t = transvectant(&forms, args.order).map_err(|e| Failure::data(e.to_string()))?;
    let config = RunConfig {
        command: "transvect",
        inputs: paths(&inputs),
        order: Some(args.order),
        format: Some(format),
        ..Default::default()
    };
    #[derive(Serialize)]
    struct Out {
        #[serde(flatten)]
        form: FormFile,
        config: RunConfig,
    }
    emit_json(&args.out, &Out { form: FormFile::from_form(&t), config })?;
    Ok(0)
}

pub fn model(args: &ModelArgs) -> Result<u8, Failure> {
    let format = args.out.format.unwrap_or(Format::Csv);
    let file: OperatorFile = read_json(&args.input)?;
    let frame_text = resolve(&args.frame, &file.frame, "frame")?;
    let box_text = resolve(&args.domain, &file.domain, "box")?;
    let a = file.linear()?;
    let frame = InvariantFrame::parse(&frame_text, a.vars()).map_err(|e| Failure::data(format!("frame: {e}")))?;
    let bx = DomainBox::parse(&box_text, a.vars()).map_err(|e| Failure::data(format!("box: {e}")))?;
    let opts = ModelOptions {
        samples: args.sampling.samples,
        seed: args.sampling.seed,
        ..ModelOptions::default()
    };
    let fingerprint = model_map(&a, &frame, &bx, &opts)?;
    let config = RunConfig {
        command: "model",
        inputs: paths(&[&args.input]),
        frame: Some(frame_text),
        domain: Some(box_text),
        sampling: Some(args.sampling.clone()),
        format: Some(format),
        ..Default::default()
    };
    match format {
        Format::Json => emit_json(
            &args.out,
            &json!({ "config": config, "model": fingerprint, "rows": fingerprint.rows }),
        )?,
        Format::Csv => {
            write_to(args.out.output.as_deref(), &fingerprint.to_csv())?;
            if let Some(out) = &args.out.output {
                let sidecar = PathBuf::from(format!("{}.json", out.display()));
                let mut text = serde_json::to_string_pretty(&json!({ "config": config, "model": fingerprint }))
                    .map_err(|e| Failure::data(e.to_string()))?;
                text.push('\n');
                write_to(Some(&sidecar), &text)?;
            }
        }
    }
    Ok(0)
}

fn equiv_options(sampling: &SamplingArgs, tol: &ToleranceArgs) -> EquivOptions {
    EquivOptions {
        samples: sampling.samples,
        seed: sampling.seed,
        tol_root: tol.tol_root,
        tol_match: tol.tol_match,
        ..EquivOptions::default()
    }
}

/// Writes the verdict report. A degenerate frame is reported as an
/// inconclusive verdict rather than an error, so the exit code and the
/// printed verdict always agree.
fn emit_verdict(out: &OutputArgs, config: RunConfig, result: Result<EquivalenceReport, Error>) -> Result<u8, Failure> {
    match result {
        Ok(report) => {
            let code = report.verdict.exit_code() as u8;
            #[derive(Serialize)]
            struct Out {
                #[serde(flatten)]
                report: EquivalenceReport,
                config: RunConfig,
            }
            emit_json(out, &Out { report, config })?;
            Ok(code)
        }
        Err(e @ Error::Degenerate { .. }) => {
            emit_json(
                out,
                &json!({ "verdict": "Inconclusive", "reason": e.to_string(), "config": config }),
            )?;
            Ok(EXIT_INCONCLUSIVE)
        }
        Err(e) => Err(Failure::data(e.to_string())),
    }
}

pub fn equiv(args: &EquivArgs) -> Result<u8, Failure> {
    let format = only_json(&args.out)?;
    let f1: OperatorFile = read_json(&args.input)?;
    let f2: OperatorFile = read_json(&args.input2)?;
    if args.frame.is_none() && f1.frame.is_some() && f2.frame.is_some() && f1.frame != f2.frame {
        return Err(Failure::data("the input files name different frames"));
    }
    let frame_text = resolve(&args.frame, &f1.frame.clone().or(f2.frame.clone()), "frame")?;
    let box1 = resolve(&args.domain, &f1.domain, "box")?;
    let box2 = resolve(&args.domain2, &f2.domain, "box2")?;
    let (a1, a2) = (f1.linear()?, f2.linear()?);
    let frame = InvariantFrame::parse(&frame_text, a1.vars()).map_err(|e| Failure::data(format!("frame: {e}")))?;
    let bx1 = DomainBox::parse(&box1, a1.vars()).map_err(|e| Failure::data(format!("box: {e}")))?;
    let bx2 = DomainBox::parse(&box2, a2.vars()).map_err(|e| Failure::data(format!("box2: {e}")))?;
    let opts = equiv_options(&args.sampling, &args.tolerances);
    let config = RunConfig {
        command: "equiv",
        inputs: paths(&[&args.input, &args.input2]),
        frame: Some(frame_text),
        domain: Some(box1),
        domain2: Some(box2),
        sampling: Some(args.sampling.clone()),
        tolerances: Some(args.tolerances.clone()),
        format: Some(format),
        ..Default::default()
    };
    emit_verdict(&args.out, config, equivalence_check(&a1, &bx1, &a2, &bx2, &frame, &opts))
}

pub fn fequiv(args: &FequivArgs) -> Result<u8, Failure> {
    let format = only_json(&args.out)?;
    let f1: OperatorFile = read_json(&args.input)?;
    let f2: OperatorFile = read_json(&args.input2)?;
    let frame1 = resolve(&args.frame, &f1.frame, "frame")?;
    let frame2 = resolve(&args.frame, &f2.frame, "frame")?;
    let box1 = resolve(&args.domain, &f1.domain, "box")?;
    let box2 = resolve(&args.domain2, &f2.domain, "box2")?;
    let t1 = AdjustedTriple::parse(f1.nonlinear()?, &frame1, &box1).map_err(|e| Failure::data(format!("first triple: {e}")))?;
    let t2 = AdjustedTriple::parse(f2.nonlinear()?, &frame2, &box2).map_err(|e| Failure::data(format!("second triple: {e}")))?;
    let opts = equiv_options(&args.sampling, &args.tolerances);
    let config = RunConfig {
        command: "fequiv",
        inputs: paths(&[&args.input, &args.input2]),
        frame: Some(t1.frame_text()),
        domain: Some(box1),
        domain2: Some(box2),
        sampling: Some(args.sampling.clone()),
        tolerances: Some(args.tolerances.clone()),
        format: Some(format),
        ..Default::default()
    };
    emit_verdict(&args.out, config, extended_equivalence_check(&t1, &t2, &opts))
}
