//! GCov objective, estimator and specification test, the local-power
//! objects and the extended CUGMM cross-check.

mod cugmm;
mod local;

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

pub use cugmm::{cugmm_extended_fit, CugmmFit};
pub use local::{jacobian_dgamma, local_power, noncentrality, pi_projector, AlternativeDirection, JacobianConfig, LocalAlternative};

use crate::autocov::autocov_columns;
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::optim::{nelder_mead, NelderMeadConfig};
use crate::report::{check_alpha, ConfigEcho, TestMethod, TestReport};
use crate::series::{TimeSeries, TransformSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GcovConfig {
    /// Replace `Gamma(0)` by its diagonal.
    pub diagonal: bool,
    /// Regularize `Gamma(0)` with a `1e-10 * trace / K` ridge.
    pub ridge: bool,
    /// Values tried for the leading coefficient of each MAR polynomial in
    /// addition to the template's own parameters.
    pub start_grid: Vec<f64>,
    pub optimizer: NelderMeadConfig,
}

impl Default for GcovConfig {
    fn default() -> Self {
        Self {
            diagonal: false,
            ridge: false,
            start_grid: vec![0.1, 0.5, 0.9],
            optimizer: NelderMeadConfig { max_iter: 1000, ftol_abs: 1e-12, ftol_rel: 1e-9, xtol: 1e-7, initial_step: 0.1 },
        }
    }
}

/// Optimizer bookkeeping for one fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub starts: Vec<Vec<f64>>,
    /// `(theta, objective)` reached from each start.
    pub finals: Vec<(Vec<f64>, f64)>,
    pub best_start: usize,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GcovFit {
    pub model: ModelSpec,
    pub theta_hat: Vec<f64>,
    pub objective_min: f64,
    pub h: usize,
    pub k: usize,
    /// Number of residuals entering the autocovariances.
    pub t: usize,
    pub transforms: TransformSet,
    pub diagonal: bool,
    pub trace: OptimizerTrace,
}

impl GcovFit {
    /// `T * L_T(theta_hat)`.
    pub fn statistic(&self) -> f64 {
        self.t as f64 * self.objective_min
    }

    /// `K^2 H - dim(theta)`.
    pub fn df(&self) -> i64 {
        (self.k * self.k * self.h) as i64 - self.theta_hat.len() as i64
    }
}

/// Objective of a fully specified model, with the residual count.
pub(crate) fn objective_for(
    spec: &ModelSpec,
    cols: &[Vec<f64>],
    ts: &TransformSet,
    h: usize,
    diagonal: bool,
    ridge: bool,
) -> Result<(f64, usize)> {
    let res = spec.raw_residuals(cols);
    let refs: Vec<&[f64]> = res.iter().map(Vec::as_slice).collect();
    let a = ts.apply_columns(&refs, spec.lags())?;
    let stack = autocov_columns(&a, h)?;
    let traces = if diagonal { stack.r_squared_traces_diagonal() } else { stack.r_squared_traces(ridge)? };
    Ok((traces.iter().sum(), stack.t))
}

pub(crate) fn check_inputs(spec: &ModelSpec, y: &TimeSeries, h: usize) -> Result<()> {
    if h == 0 {
        return Err(Error::InvalidInput("H must be at least 1".into()));
    }
    if y.dim() != spec.series_dim() {
        return Err(Error::ShapeMismatch(format!("{spec} needs {} columns, got {}", spec.series_dim(), y.dim())));
    }
    let need = spec.lags() + spec.leads() + h + 2;
    if y.len() < need {
        return Err(Error::InsufficientSample { needed: need, got: y.len() });
    }
    Ok(())
}

/// `L_T(theta) = sum_{h=1}^H Tr R^2(h, theta)` of the transformed residuals.
pub fn gcov_objective(theta: &[f64], spec: &ModelSpec, y: &TimeSeries, ts: &TransformSet, h: usize) -> Result<f64> {
    let inst = spec.with_theta(theta)?;
    check_inputs(&inst, y, h)?;
    objective_for(&inst, y.columns(), ts, h, false, false).map(|v| v.0)
}

/// Objective with `Gamma(0)` replaced by its diagonal.
pub fn gcov_objective_diagonal(theta: &[f64], spec: &ModelSpec, y: &TimeSeries, ts: &TransformSet, h: usize) -> Result<f64> {
    let inst = spec.with_theta(theta)?;
    check_inputs(&inst, y, h)?;
    objective_for(&inst, y.columns(), ts, h, true, false).map(|v| v.0)
}

/// Starting points in unconstrained coordinates: the template itself, then
/// grid values for the leading MAR coefficients.
pub(crate) fn default_starts(template: &ModelSpec, grid: &[f64]) -> Vec<Vec<f64>> {
    let mut out: Vec<ModelSpec> = vec![template.clone()];
    if let ModelSpec::Mar { phi, psi } = template {
        let axis = |len: usize, base: &[f64]| -> Vec<Vec<f64>> {
            if len == 0 {
                return vec![vec![]];
            }
            grid.iter()
                .filter(|g| g.abs() < 1.0)
                .map(|g| {
                    let mut v = vec![0.0; len];
                    v[0] = *g;
                    v
                })
                .chain(std::iter::once(base.to_vec()))
                .collect()
        };
        for p in axis(phi.len(), phi) {
            for q in axis(psi.len(), psi) {
                if let Ok(s) = ModelSpec::mar(p.clone(), q) {
                    if !out.contains(&s) {
                        out.push(s);
                    }
                }
            }
        }
    } else if let ModelSpec::NoncausalAr1 { psi } = template {
        for g in grid.iter().filter(|g| g.abs() < 1.0 && *g != psi) {
            out.push(ModelSpec::NoncausalAr1 { psi: *g });
        }
    }
    out.iter().filter_map(|s| s.unconstrained().ok()).collect()
}

/// GCov estimator: minimizes `L_T` over the admissible region from several
/// starts and keeps the lowest value ever evaluated (ties to the earliest).
///
/// `starts` (in parameter space) replaces the default start set when given.
pub fn gcov_fit(
    template: &ModelSpec,
    y: &TimeSeries,
    ts: &TransformSet,
    h: usize,
    cfg: &GcovConfig,
    starts: Option<&[Vec<f64>]>,
) -> Result<GcovFit> {
    template.validate()?;
    check_inputs(template, y, h)?;
    let k = ts.len();
    let p = template.dim_theta();
    if p > k * k * h {
        return Err(Error::InvalidInput(format!("dim(theta) = {p} exceeds K^2 H = {}", k * k * h)));
    }
    let z_starts: Vec<Vec<f64>> = match starts {
        Some(s) => s.iter().map(|th| template.with_theta(th).and_then(|m| m.unconstrained())).collect::<Result<_>>()?,
        None => default_starts(template, &cfg.start_grid),
    };
    if z_starts.is_empty() {
        return Err(Error::InvalidInput("no starting values".into()));
    }
    let cols = y.columns();
    let (model, fb, trace) =
        minimize_model(template, &z_starts, &cfg.optimizer, |m| objective_for(m, cols, ts, h, cfg.diagonal, cfg.ridge).map(|v| v.0))?;
    let (_, t) = objective_for(&model, cols, ts, h, cfg.diagonal, cfg.ridge)?;
    Ok(GcovFit { theta_hat: model.theta(), model, objective_min: fb, h, k, t, transforms: ts.clone(), diagonal: cfg.diagonal, trace })
}

/// Nelder-Mead from each unconstrained start over admissible models, keeping
/// the lowest value ever evaluated (ties to the earliest start).
pub(crate) fn minimize_model(
    template: &ModelSpec,
    z_starts: &[Vec<f64>],
    optimizer: &NelderMeadConfig,
    objective: impl Fn(&ModelSpec) -> Result<f64>,
) -> Result<(ModelSpec, f64, OptimizerTrace)> {
    let best: RefCell<Option<(Vec<f64>, f64, usize)>> = RefCell::new(None);
    let mut finals = Vec::with_capacity(z_starts.len());
    let mut evaluations = 0;
    let mut converged = false;
    for (si, z0) in z_starts.iter().enumerate() {
        let f = |z: &[f64]| {
            let inst = template.from_unconstrained(z);
            if inst.validate().is_err() {
                return f64::INFINITY;
            }
            match objective(&inst) {
                Ok(v) if v.is_finite() => {
                    let mut b = best.borrow_mut();
                    if b.as_ref().is_none_or(|(_, bv, _)| v < *bv) {
                        *b = Some((z.to_vec(), v, si));
                    }
                    v
                }
                _ => f64::INFINITY,
            }
        };
        let r = nelder_mead(f, z0, optimizer);
        evaluations += r.evaluations;
        finals.push((template.from_unconstrained(&r.x).theta(), r.f));
        if best.borrow().as_ref().is_some_and(|b| b.2 == si) {
            converged = r.converged;
        }
    }
    let (zb, fb, sb) = best.into_inner().ok_or(Error::AllStartsFailed)?;
    let trace = OptimizerTrace {
        starts: z_starts.iter().map(|z| template.from_unconstrained(z).theta()).collect(),
        finals,
        best_start: sb,
        evaluations,
        converged,
    };
    Ok((template.from_unconstrained(&zb), fb, trace))
}

/// `T L_T(theta_hat)` against `chi2(K^2 H - dim theta)`.
pub fn gcov_spec_test(fit: &GcovFit, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let df = fit.df();
    if df <= 0 {
        return Err(Error::DfNonPositive(df));
    }
    let config = ConfigEcho {
        transforms: fit.transforms.descriptors(),
        h: fit.h,
        t: fit.t,
        k: fit.k,
        model: Some(fit.model.to_string()),
        dim_theta: Some(fit.theta_hat.len()),
        ..Default::default()
    };
    TestReport::chi_square(TestMethod::GcovSpec, fit.statistic(), df as f64, alpha, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::ErrorDistribution;
    use crate::series::Transform;

    fn data(psi: f64, t: usize, seed: u64) -> TimeSeries {
        ModelSpec::noncausal_ar1(psi).unwrap().simulate(ErrorDistribution::StudentT { nu: 5.0 }, t, None, seed).unwrap().series
    }

    #[test]
    fn objective_additive_in_h() {
        let y = data(0.7, 300, 1);
        let spec = ModelSpec::mar(vec![], vec![0.5]).unwrap();
        let ts = TransformSet::linear_and_square();
        let o1 = gcov_objective(&[0.6], &spec, &y, &ts, 1).unwrap();
        let o2 = gcov_objective(&[0.6], &spec, &y, &ts, 2).unwrap();
        let u = crate::models::residuals(&spec.with_theta(&[0.6]).unwrap(), &y).unwrap();
        let a = crate::series::apply_transforms(&u, &ts).unwrap();
        let s = crate::autocov::sample_autocov(&a, 2).unwrap();
        let lag2 = crate::autocov::r_squared_trace(&s, 2).unwrap();
        assert!((o2 - o1 - lag2).abs() < 1e-12);
    }

    #[test]
    fn objective_scale_invariant() {
        let y = data(0.7, 300, 2);
        let spec = ModelSpec::mar(vec![], vec![0.5]).unwrap();
        let ts = TransformSet::linear_and_square();
        let scaled = TransformSet::new(vec![Transform::custom("3u", |u| 3.0 * u), Transform::custom("-u2/2", |u| -0.5 * u * u)]).unwrap();
        let a = gcov_objective(&[0.65], &spec, &y, &ts, 3).unwrap();
        let b = gcov_objective(&[0.65], &spec, &y, &scaled, 3).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn truth_is_near_zero_and_fit_recovers() {
        let y = data(0.7, 5000, 3);
        let spec = ModelSpec::mar(vec![], vec![0.3]).unwrap();
        let ts = TransformSet::linear_and_square();
        let at_truth = gcov_objective(&[0.7], &spec, &y, &ts, 3).unwrap();
        assert!(at_truth < 50.0 * 12.0 / 5000.0);
        let fit = gcov_fit(&spec, &y, &ts, 3, &GcovConfig::default(), None).unwrap();
        assert!((fit.theta_hat[0] - 0.7).abs() < 0.03, "{:?}", fit.theta_hat);
        assert!(fit.objective_min <= at_truth);
        for (_, f) in &fit.trace.finals {
            assert!(fit.objective_min <= *f);
        }
        let rep = gcov_spec_test(&fit, 0.05).unwrap();
        assert_eq!(rep.df, Some(11.0));
    }

    #[test]
    fn dimension_guards() {
        let y = data(0.5, 200, 4);
        let ts = TransformSet::parse_list("identity").unwrap();
        let spec = ModelSpec::mar(vec![0.1], vec![0.5]).unwrap();
        assert!(gcov_fit(&spec, &y, &ts, 1, &GcovConfig::default(), None).is_err());
        let spec = ModelSpec::mar(vec![], vec![0.5]).unwrap();
        let fit = gcov_fit(&spec, &y, &ts, 1, &GcovConfig::default(), None).unwrap();
        assert_eq!(gcov_spec_test(&fit, 0.05).unwrap_err(), Error::DfNonPositive(0));
    }
}
