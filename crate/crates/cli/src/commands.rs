use std::path::Path;

use serde::Serialize;
use serde_json::json;
use spraylab::classify::{self, ClassifyError, WsOptions};
use spraylab::flow;
use spraylab::{registry, Config, IntegrationError, MVector, Model};

use crate::{Failure, Format, Outcome, RunArgs};

/// Deviation allowed between the two geodesic routes.
const ROUTE_TOLERANCE: f64 = 1e-6;
/// Deviation allowed between the model geodesic mapped into the chart and
/// the chart spray's own geodesic.
const CHART_TOLERANCE: f64 = 1e-5;

fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn integration_failure(e: IntegrationError) -> Failure {
    match e {
        IntegrationError::InvalidInput(m) => Failure::Invalid(m),
        other => Failure::Numerical(other.to_string()),
    }
}

fn classify_failure(e: ClassifyError) -> Failure {
    match e {
        ClassifyError::Flow(f) => integration_failure(f),
        ClassifyError::Field(f) => Failure::Numerical(f.to_string()),
        other => Failure::Invalid(other.to_string()),
    }
}

fn load_config(path: &Path) -> Result<Config, Failure> {
    if !path.exists() {
        if let Some(c) = path.file_stem().and_then(|s| s.to_str()).and_then(registry::get) {
            return Ok(c);
        }
    }
    Config::load(path).map_err(|e| Failure::Invalid(e.to_string()))
}

fn load(args: &RunArgs) -> Result<Model<f64>, Failure> {
    load_config(&args.config)?
        .build()
        .map_err(|e| Failure::Invalid(e.to_string()))
}

fn json_only(args: &RunArgs) -> Result<(), Failure> {
    if args.format == Some(Format::Csv) {
        return Err(Failure::Invalid(
            "csv output is only available for the geodesic command".into(),
        ));
    }
    Ok(())
}

fn seed(args: &RunArgs, model: &Model<f64>) -> u64 {
    args.seed.unwrap_or(model.numerics.seed)
}

fn samples(args: &RunArgs, model: &Model<f64>) -> Result<usize, Failure> {
    match args.samples.unwrap_or(model.numerics.samples) {
        0 => Err(Failure::Invalid("--samples must be at least 1".into())),
        n => Ok(n),
    }
}

fn y0(args: &RunArgs, model: &Model<f64>) -> Result<MVector<f64>, Failure> {
    let q = model.space.dim_m();
    let coords = match &args.y0 {
        Some(text) => text
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Failure::Invalid(format!("--y0 {text:?}: {e}")))?,
        None => model.numerics.y0.clone().unwrap_or_else(|| {
            let mut v = vec![0.0; q];
            v[0] = 1.0;
            v
        }),
    };
    if coords.len() != q {
        return Err(Failure::Invalid(format!(
            "y0 has {} entries but m has dimension {q}",
            coords.len()
        )));
    }
    if coords.iter().any(|c| !c.is_finite()) || coords.iter().all(|&c| c == 0.0) {
        return Err(Failure::Invalid("y0 must be finite and nonzero".into()));
    }
    Ok(MVector::new(coords))
}

fn span(args: &RunArgs, model: &Model<f64>) -> (f64, f64, f64) {
    let [t0, t1] = model.numerics.t_span;
    (
        args.t0.unwrap_or(t0),
        args.t1.unwrap_or(t1),
        args.step.unwrap_or(model.numerics.step),
    )
}

pub fn examples(dump: Option<&str>) -> Result<Outcome, Failure> {
    let text = match dump {
        Some(name) => {
            let c = registry::get(name).ok_or_else(|| {
                Failure::Invalid(format!(
                    "unknown example {name:?}; available: {}",
                    registry::NAMES.join(", ")
                ))
            })?;
            let mut s = c.to_json_pretty();
            s.push('\n');
            s
        }
        None => registry::all()
            .iter()
            .map(|c| {
                format!(
                    "{:<28}{}\n",
                    c.name.as_deref().unwrap_or(""),
                    c.description.as_deref().unwrap_or("")
                )
            })
            .collect(),
    };
    Ok(Outcome { text, pass: true })
}

pub fn validate(args: &RunArgs) -> Result<Outcome, Failure> {
    json_only(args)?;
    let model = load(args)?;
    let s = &model.space;
    let cert = s.validate_decomposition();
    let (rep, stab) = s.rep_residuals().map_err(|e| Failure::Invalid(e.to_string()))?;
    let report = json!({
        "name": model.name,
        "dim": s.dim(),
        "dim_h": s.dim_h(),
        "dim_m": s.dim_m(),
        "antisymmetry_residual": s.algebra().antisymmetry_residual(),
        "jacobi_residual": s.algebra().jacobi_residual(),
        "representation_residual": rep,
        "stabilizer_residual": stab,
        "decomposition": cert,
        "m_inner_product_invariant": s.m_inner_product_is_invariant(),
        "chart": model.chart.as_ref().map(|c| c.map.name()),
        "pass": cert.pass,
    });
    Ok(Outcome {
        text: to_json(&report),
        pass: cert.pass,
    })
}

pub fn check_go(args: &RunArgs) -> Result<Outcome, Failure> {
    json_only(args)?;
    let model = load(args)?;
    let cert =
        classify::check_go(&model.field, samples(args, &model)?, seed(args, &model)).map_err(classify_failure)?;
    Ok(Outcome {
        text: to_json(&cert),
        pass: cert.verdict == classify::GoVerdict::GoEvidence,
    })
}

pub fn check_ws(args: &RunArgs) -> Result<Outcome, Failure> {
    json_only(args)?;
    let model = load(args)?;
    let cert = classify::check_ws(
        &model.field,
        samples(args, &model)?,
        model.numerics.restarts,
        seed(args, &model),
    )
    .map_err(classify_failure)?;
    Ok(Outcome {
        text: to_json(&cert),
        pass: cert.verdict == classify::WsVerdict::WsAlgebraicEvidence,
    })
}

pub fn verify_thm3(args: &RunArgs) -> Result<Outcome, Failure> {
    json_only(args)?;
    let model = load(args)?;
    let y0 = y0(args, &model)?;
    let (t0, t1, step) = span(args, &model);
    let options = WsOptions {
        samples: samples(args, &model)?,
        restarts: model.numerics.restarts,
        seed: seed(args, &model),
    };
    match classify::verify_theorem3(&model.field, &y0, t0, t1, step, options) {
        Ok(cert) => Ok(Outcome {
            text: to_json(&cert),
            pass: cert.verdict.is_pass(),
        }),
        Err(ClassifyError::Precondition { verdict, reason }) => {
            eprintln!("refused: {reason}");
            Ok(Outcome {
                text: to_json(&json!({ "refused": true, "ws_verdict": verdict, "reason": reason })),
                pass: false,
            })
        }
        Err(e) => Err(classify_failure(e)),
    }
}

pub fn geodesic(args: &RunArgs) -> Result<Outcome, Failure> {
    let model = load(args)?;
    let y0 = y0(args, &model)?;
    let (t0, t1, step) = span(args, &model);
    let tr = flow::geodesic(&model.field, &y0, t0, t1, step).map_err(integration_failure)?;
    let text = match args.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            tr.write_csv(&mut buf).expect("writing to memory");
            String::from_utf8(buf).expect("ascii output")
        }
        Format::Json => {
            let lifting = tr.lifting_residual(&model.space).map_err(integration_failure)?;
            to_json(&json!({ "lifting_residual": lifting, "trajectory": tr }))
        }
    };
    Ok(Outcome { text, pass: true })
}

pub fn compare(args: &RunArgs) -> Result<Outcome, Failure> {
    json_only(args)?;
    let model = load(args)?;
    let space = &model.space;
    let y0 = y0(args, &model)?;
    let (t0, t1, step) = span(args, &model);
    let (v_h, witness_residual) = classify::go_witness(&model.field, &y0).map_err(classify_failure)?;
    let v = space.embed_h(&v_h);
    let tr = flow::geodesic(&model.field, &y0, t0, t1, step).map_err(integration_failure)?;
    let closed = flow::homogeneous_geodesic(space, &y0, &v, &tr.times).map_err(integration_failure)?;
    let route_deviation = tr.max_point_deviation(&closed);
    let claim_a = flow::verify_claim_a(&model.field, &y0, &v, t0, t1, step).map_err(integration_failure)?;
    let lifting = tr.lifting_residual(space).map_err(integration_failure)?;
    let homogeneous = witness_residual <= classify::PASS_THRESHOLD;

    let chart = match &model.chart {
        Some(chart) => {
            let o = space.rep().act(&spraylab::Matrix::identity(space.rep().size()));
            let velocity = space
                .rep()
                .tangent_at_base(&space.embed_m(&y0))
                .map_err(|e| Failure::Invalid(e.to_string()))?;
            let x0 = chart.map.to_chart(&o);
            let v0 = chart.map.pushforward(&o, &velocity);
            let local = chart
                .spray
                .integrate_local(&x0, &v0, t0, t1, step)
                .map_err(integration_failure)?;
            let mapped = chart.map.map_curve(&tr.point_samples);
            let deviation = mapped
                .iter()
                .zip(&local.x)
                .map(|(a, b)| spraylab::scalar::dist2(a, b))
                .fold(0.0, f64::max);
            Some(json!({
                "point_map": chart.map.name(),
                "max_deviation": deviation,
                "tolerance": CHART_TOLERANCE,
                "pass": deviation <= CHART_TOLERANCE,
            }))
        }
        None => None,
    };
    let chart_pass = chart.as_ref().is_none_or(|c| c["pass"] == json!(true));
    let pass = homogeneous && route_deviation <= ROUTE_TOLERANCE && claim_a.verdict.is_pass() && chart_pass;
    let mut notes = Vec::new();
    if !homogeneous {
        notes.push(format!(
            "eta(y0) is not in [h, y0] (residual {witness_residual:e}); the geodesic through y0 is not homogeneous and the closed form does not apply"
        ));
    }
    let report = json!({
        "y0": y0.coords,
        "witness": v_h,
        "witness_residual": witness_residual,
        "max_point_deviation": route_deviation,
        "tolerance": ROUTE_TOLERANCE,
        "lifting_residual": lifting,
        "claim_a": claim_a,
        "chart": chart,
        "pass": pass,
        "notes": notes,
    });
    Ok(Outcome {
        text: to_json(&report),
        pass,
    })
}
