use std::fs;
use std::io::Write;

use anyhow::{bail, Context};
use nlsd_core::basis::{many_transform_test, GeneratorGrid, ManyTransformConfig, SignMode};
use nlsd_core::bootstrap::{bootstrap_test, estimate, BootstrapConfig, Estimator, RebuildMode};
use nlsd_core::mc::{run_experiment, ExperimentConfig, ReportBundle};
use nlsd_core::models::{mar_components, AmlConfig};
use nlsd_core::{
    detrend_polynomial, gcov_fit, gcov_spec_test, ks_normality_statistic, nlsd_test, ErrorDistribution, GcovConfig, ModelSpec, TestReport,
    TimeSeries, TransformSet,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::model::{from_coefficients, parse_template};
use crate::{EstimatorArg, FitArgs, Input, McArgs, Mode, RebuildArg, SimulateArgs, TestArgs};

fn load(input: &Input) -> anyhow::Result<TimeSeries> {
    let file = fs::File::open(&input.data).with_context(|| format!("cannot open {}", input.data.display()))?;
    let y = TimeSeries::read_csv(file).with_context(|| format!("cannot read {}", input.data.display()))?;
    Ok(if input.detrend { detrend_polynomial(&y, input.degree)? } else { y })
}

fn check_alpha(alpha: f64) -> anyhow::Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        bail!("--alpha {alpha} must lie in (0, 1)");
    }
    Ok(())
}

fn estimator(arg: EstimatorArg) -> Estimator {
    match arg {
        EstimatorArg::Gcov => Estimator::Gcov(GcovConfig::default()),
        EstimatorArg::Aml => Estimator::Aml(AmlConfig::default()),
        EstimatorArg::Ols => Estimator::Ols,
    }
}

/// Prints the JSON document and writes the bundle when requested.
fn emit(
    command: &str,
    args: &impl Serialize,
    seeds: Vec<u64>,
    doc: &Value,
    csv: Option<String>,
    out: Option<&std::path::Path>,
) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(doc)?;
    println!("{text}");
    if let Some(dir) = out {
        let bundle = ReportBundle::new(command, serde_json::to_value(args)?, seeds, text, csv);
        bundle.write_to(dir).with_context(|| format!("cannot write to {}", dir.display()))?;
    }
    Ok(())
}

pub fn test(a: &TestArgs) -> anyhow::Result<bool> {
    check_alpha(a.alpha)?;
    let y = load(&a.input)?;
    let ts = TransformSet::parse_list(&a.transforms)?;
    let mut extra = serde_json::Map::new();
    let report: TestReport = match a.mode {
        Mode::Nlsd => nlsd_test(&y, &ts, a.h, a.alpha)?,
        Mode::GcovSpec => {
            let fit = gcov_fit(&parse_template(&a.model)?, &y, &ts, a.h, &GcovConfig::default(), None)?;
            extra.insert("estimate".into(), params(&fit.model));
            gcov_spec_test(&fit, a.alpha)?
        }
        Mode::Bootstrap => {
            let cfg = BootstrapConfig {
                replicates: a.replicates,
                with_replacement: !a.without_replacement,
                seed: a.seed,
                estimator: estimator(a.estimator),
                rebuild: match a.rebuild {
                    RebuildArg::BurnIn => RebuildMode::BurnIn,
                    RebuildArg::OriginalBoundary => RebuildMode::OriginalBoundary,
                },
                ..BootstrapConfig::default()
            };
            let (report, boot) = bootstrap_test(&parse_template(&a.model)?, &y, &ts, a.h, &cfg, a.alpha)?;
            extra.insert(
                "bootstrap".into(),
                json!({"replicates": boot.replicates, "dropped": boot.dropped, "q95": boot.q95(), "with_replacement": boot.with_replacement}),
            );
            report
        }
        Mode::ManyTransform => {
            let grid = match a.k {
                Some(k) => GeneratorGrid::abs_powers(k, a.weight)?,
                None => {
                    let d = GeneratorGrid::default_for(y.len());
                    GeneratorGrid::new(1, d.max_power, vec![a.weight], SignMode::AbsoluteValue)?
                }
            };
            let mut cfg = ManyTransformConfig::new(grid);
            cfg.epsilon = a.epsilon;
            let (report, outcome) = many_transform_test(&parse_template(&a.model)?, &y, a.h, &cfg, a.alpha)?;
            extra.insert(
                "many_transform".into(),
                json!({
                    "k_star": outcome.value.k_star,
                    "z": outcome.z,
                    "start": outcome.start_theta,
                    "growth_ratios": outcome.growth_ratios,
                    "warnings": outcome.warnings,
                }),
            );
            report
        }
    };
    if a.ks {
        extra.insert("ks_normality".into(), serde_json::to_value(ks_normality_statistic(&y)?)?);
    }
    let mut doc = json!({
        "command": "test",
        "data": a.input.data.display().to_string(),
        "observations": y.len(),
        "report": report,
    });
    doc.as_object_mut().expect("object").extend(extra);
    emit("test", a, vec![a.seed], &doc, None, a.out.as_deref())?;
    Ok(report.reject)
}

fn params(spec: &ModelSpec) -> Value {
    let map: serde_json::Map<String, Value> = spec.param_names().into_iter().zip(spec.theta()).map(|(n, v)| (n, json!(v))).collect();
    Value::Object(map)
}

fn roots(spec: &ModelSpec) -> Value {
    let Some((phi, psi)) = spec.mar_roots() else {
        return Value::Null;
    };
    let fmt = |r: Vec<nlsd_core::models::Complex<f64>>| -> Vec<Value> {
        r.into_iter().map(|z| json!({"re": z.re, "im": z.im, "modulus": z.norm()})).collect()
    };
    json!({"causal": fmt(phi), "noncausal": fmt(psi)})
}

pub fn fit(a: &FitArgs) -> anyhow::Result<bool> {
    check_alpha(a.alpha)?;
    let y = load(&a.input)?;
    let ts = TransformSet::parse_list(&a.transforms)?;
    let template = parse_template(&a.model)?;
    if a.spec_test && a.estimator != EstimatorArg::Gcov {
        bail!("--spec-test needs --estimator gcov");
    }
    let (spec, spec_test) = if a.estimator == EstimatorArg::Gcov {
        let fit = gcov_fit(&template, &y, &ts, a.h, &GcovConfig::default(), None)?;
        let report = if a.spec_test { Some(gcov_spec_test(&fit, a.alpha)?) } else { None };
        (fit.model, report)
    } else {
        (estimate(&template, &y, &ts, a.h, &estimator(a.estimator))?, None)
    };
    let u = spec.residual_columns(&y)?;
    let (phi, psi) = match &spec {
        ModelSpec::Mar { phi, psi } => (phi.clone(), psi.clone()),
        ModelSpec::NoncausalAr1 { psi } => (vec![], vec![*psi]),
        _ => unreachable!("templates are MAR models"),
    };
    let comp = mar_components(&y, &phi, &psi)?;
    let r = phi.len();
    let s = psi.len();
    let n = y.len();
    let mut csv = String::from("t,y,residual,v1,v2\n");
    for t in 0..n {
        let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let res = (t >= r && t + s < n).then(|| u[0][t - r]);
        csv.push_str(&format!("{t},{},{},{},{}\n", y.column(0)[t], cell(res), cell(comp.v1_at(t)), cell(comp.v2_at(t))));
    }
    let doc = json!({
        "command": "fit",
        "data": a.input.data.display().to_string(),
        "observations": n,
        "model": spec.to_string(),
        "estimator": a.estimator,
        "estimate": params(&spec),
        "roots": roots(&spec),
        "components": {"v1": comp.v1, "v2": comp.v2},
        "residuals": u[0],
        "spec_test": spec_test,
    });
    emit("fit", a, vec![], &doc, Some(csv), a.out.as_deref())?;
    Ok(spec_test.is_some_and(|r| r.reject))
}

pub fn mc(a: &McArgs) -> anyhow::Result<bool> {
    let mut cfg = match (&a.config, &a.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            ExperimentConfig::from_toml(&text)?
        }
        (None, Some(name)) => ExperimentConfig::preset(name)?,
        (None, None) => bail!("either --config or --preset is required"),
    };
    if let Some(r) = a.reps {
        cfg.reps = r;
    }
    if let Some(t) = &a.t {
        cfg.t = t.clone();
    }
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if let Some(s) = a.s {
        cfg.s = s;
    }
    if a.workers.is_some() {
        cfg.workers = a.workers;
    }
    cfg.validate()?;
    let res = run_experiment(&cfg, a.checkpoint.as_deref())?;
    let bundle = ReportBundle::from_experiment(&res);
    print!("{}", res.to_csv());
    if let Some(dir) = &a.out {
        bundle.write_to(dir).with_context(|| format!("cannot write to {}", dir.display()))?;
    }
    Ok(false)
}

pub fn simulate(a: &SimulateArgs) -> anyhow::Result<bool> {
    let spec = from_coefficients(&a.phi, &a.psi)?;
    let dist: ErrorDistribution = a.dist.parse()?;
    let sim = spec.simulate(dist, a.t, a.burn, a.seed)?;
    let y = sim.series.with_labels(vec!["y".into()])?;
    match &a.out {
        Some(path) => {
            let f = fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            y.write_csv(f)?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            y.write_csv(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(false)
}
