//! Residual bootstrap for GCov critical values, the bootstrap local-power
//! approximation and Monte Carlo size/power of the bootstrap test.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::ErrorDistribution;
use crate::error::{Error, Result};
use crate::gcov::{gcov_fit, objective_for, AlternativeDirection, GcovConfig};
use crate::models::{aml_fit, default_burn, mar_filter, ols_noncausal_ar1, AmlConfig, ModelSpec};
use crate::report::{check_alpha, ConfigEcho, TestMethod, TestReport};
use crate::rng::{derive_seed, rng_from_seed, Rng};
use crate::series::{TimeSeries, TransformSet};

/// How parameters are (re-)estimated on each series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "estimator", rename_all = "kebab-case")]
pub enum Estimator {
    Gcov(GcovConfig),
    /// Student-t AML for MAR models.
    Aml(AmlConfig),
    /// OLS of `y_t` on `y_{t+1}` for the noncausal AR(1).
    Ols,
}

/// Starting values of rebuilt series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RebuildMode {
    /// Pad the resampled residuals with extra draws and discard a burn-in at
    /// both ends, as in simulation.
    BurnIn,
    /// Invert the model exactly using the original boundary values.
    OriginalBoundary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub with_replacement: bool,
    pub seed: u64,
    pub estimator: Estimator,
    pub rebuild: RebuildMode,
    /// Burn-in override for [`RebuildMode::BurnIn`].
    pub burn: Option<usize>,
    /// Largest tolerated share of failed refits.
    pub max_drop_fraction: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            replicates: 100,
            with_replacement: true,
            seed: 1,
            estimator: Estimator::Gcov(GcovConfig::default()),
            rebuild: RebuildMode::BurnIn,
            burn: None,
            max_drop_fraction: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    /// `xi^s` in replicate order (failed replicates removed).
    pub statistics: Vec<f64>,
    pub refit_estimates: Vec<Vec<f64>>,
    /// Replicate indices that failed to refit.
    pub dropped: Vec<usize>,
    pub replicates: usize,
    pub with_replacement: bool,
    pub seed: u64,
    pub rebuild: RebuildMode,
}

impl BootstrapResult {
    /// Nearest-rank quantile: the `ceil(level * S)`-th order statistic.
    pub fn quantile(&self, level: f64) -> f64 {
        nearest_rank(&self.statistics, level)
    }

    pub fn q95(&self) -> f64 {
        self.quantile(0.95)
    }
}

pub fn nearest_rank(values: &[f64], level: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of an empty sample");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = (level * v.len() as f64).ceil() as usize;
    v[rank.clamp(1, v.len()) - 1]
}

/// Fits `template` on `y` and returns the fitted model.
pub fn estimate(template: &ModelSpec, y: &TimeSeries, ts: &TransformSet, h: usize, est: &Estimator) -> Result<ModelSpec> {
    match est {
        Estimator::Gcov(cfg) => Ok(gcov_fit(template, y, ts, h, cfg, None)?.model),
        Estimator::Aml(cfg) => {
            let (r, s) = match template {
                ModelSpec::Mar { phi, psi } => (phi.len(), psi.len()),
                ModelSpec::NoncausalAr1 { .. } => (0, 1),
                other => return Err(Error::InvalidInput(format!("AML is defined for MAR models, not {other}"))),
            };
            let fit = aml_fit(y, r, s, cfg)?;
            let spec = fit.spec();
            match template {
                ModelSpec::NoncausalAr1 { .. } => ModelSpec::noncausal_ar1(spec.theta()[0]),
                _ => Ok(spec),
            }
        }
        Estimator::Ols => {
            let psi = ols_noncausal_ar1(y)?;
            match template {
                ModelSpec::Mar { phi, psi: p } if phi.is_empty() && p.len() == 1 => ModelSpec::mar(vec![], vec![psi]),
                ModelSpec::NoncausalAr1 { .. } => ModelSpec::noncausal_ar1(psi),
                other => Err(Error::InvalidInput(format!("OLS is defined for the noncausal AR(1), not {other}"))),
            }
        }
    }
}

/// `T * L_T(theta)` for a fully specified model (the plug-in statistic).
pub fn plug_in_statistic(spec: &ModelSpec, y: &TimeSeries, ts: &TransformSet, h: usize) -> Result<f64> {
    spec.validate()?;
    let (l, t) = objective_for(spec, y.columns(), ts, h, false, false)?;
    Ok(t as f64 * l)
}

/// Exact inverse of the residual map: rebuilds a series from `residuals`
/// (rows `lags..T-leads`) and the boundary values of `original`.
pub fn rebuild_exact(spec: &ModelSpec, original: &TimeSeries, residuals: &[Vec<f64>]) -> Result<TimeSeries> {
    spec.validate()?;
    let (r, s, t) = (spec.lags(), spec.leads(), original.len());
    let n = t.checked_sub(r + s).ok_or(Error::InsufficientSample { needed: r + s + 1, got: t })?;
    if residuals.len() != spec.series_dim() || residuals.iter().any(|c| c.len() != n) {
        return Err(Error::ShapeMismatch(format!("expected {} residual rows", n)));
    }
    match spec {
        ModelSpec::Mar { .. } | ModelSpec::NoncausalAr1 { .. } => {
            let (phi, psi) = mar_parts(spec);
            let y0 = original.column(0);
            // w = Psi(L^-1) y on rows 0..T-s; its first r values come from the data.
            let mut w = vec![0.0; t - s];
            for i in 0..r {
                w[i] = y0[i] - psi.iter().enumerate().map(|(j, c)| c * y0[i + j + 1]).sum::<f64>();
            }
            for i in r..t - s {
                w[i] = residuals[0][i - r] + phi.iter().enumerate().map(|(l, c)| c * w[i - l - 1]).sum::<f64>();
            }
            let mut y = y0.to_vec();
            for i in (0..t - s).rev() {
                y[i] = w[i] + psi.iter().enumerate().map(|(j, c)| c * y[i + j + 1]).sum::<f64>();
            }
            TimeSeries::from_column(y)
        }
        ModelSpec::Dar1 { w, phi, alpha } => {
            let mut y = original.column(0).to_vec();
            for i in 1..t {
                y[i] = phi * y[i - 1] + residuals[0][i - 1] * (w + alpha * y[i - 1] * y[i - 1]).sqrt();
            }
            TimeSeries::from_column(y)
        }
        ModelSpec::Var { m, coefficients } => {
            let mut y: Vec<Vec<f64>> = original.columns().to_vec();
            var_forward(*m, coefficients, &mut y, |k, i| residuals[k][i - r], r);
            TimeSeries::from_columns(y)
        }
    }
}

fn mar_parts(spec: &ModelSpec) -> (Vec<f64>, Vec<f64>) {
    match spec {
        ModelSpec::Mar { phi, psi } => (phi.clone(), psi.clone()),
        ModelSpec::NoncausalAr1 { psi } => (vec![], vec![*psi]),
        _ => unreachable!(),
    }
}

fn var_forward(m: usize, coefficients: &[Vec<f64>], y: &mut [Vec<f64>], u: impl Fn(usize, usize) -> f64, start: usize) {
    let n = y[0].len();
    for t in start..n {
        for i in 0..m {
            let mut acc = u(i, t);
            for (l, phi) in coefficients.iter().enumerate() {
                if t > l {
                    for j in 0..m {
                        acc += phi[j * m + i] * y[j][t - l - 1];
                    }
                }
            }
            y[i][t] = acc;
        }
    }
}

fn default_rebuild_burn(spec: &ModelSpec) -> usize {
    match spec {
        ModelSpec::Mar { .. } | ModelSpec::NoncausalAr1 { .. } => {
            let (phi, psi) = mar_parts(spec);
            default_burn(&phi, &psi)
        }
        _ => 500,
    }
}

/// Draws row indices into the residual pool for one replicate.
fn draw_indices(rng: &mut Rng, n: usize, with_replacement: bool) -> Vec<usize> {
    if with_replacement {
        (0..n).map(|_| rng.random_range(0..n)).collect()
    } else {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(rng);
        idx
    }
}

/// Rebuilds one pseudo-series from the residual pool of `spec` fitted to `y`.
fn rebuild_replicate(spec: &ModelSpec, y: &TimeSeries, pool: &[Vec<f64>], cfg: &BootstrapConfig, rng: &mut Rng) -> Result<TimeSeries> {
    let n = pool[0].len();
    let idx = draw_indices(rng, n, cfg.with_replacement);
    let pick = |ix: &[usize]| -> Vec<Vec<f64>> { pool.iter().map(|c| ix.iter().map(|&i| c[i]).collect()).collect() };
    match cfg.rebuild {
        RebuildMode::OriginalBoundary => rebuild_exact(spec, y, &pick(&idx)),
        RebuildMode::BurnIn => {
            let t = y.len();
            let burn = cfg.burn.unwrap_or_else(|| default_rebuild_burn(spec));
            let (r, s) = (spec.lags(), spec.leads());
            let causal = matches!(spec, ModelSpec::Dar1 { .. } | ModelSpec::Var { .. });
            let (front, back) = if causal { (burn + r, 0) } else { (burn + r, burn + s) };
            let mut order = Vec::with_capacity(front + n + back);
            order.extend((0..front).map(|_| rng.random_range(0..n)));
            order.extend_from_slice(&idx);
            order.extend((0..back).map(|_| rng.random_range(0..n)));
            let path = pick(&order);
            match spec {
                ModelSpec::Mar { .. } | ModelSpec::NoncausalAr1 { .. } => {
                    let (phi, psi) = mar_parts(spec);
                    let full = mar_filter(&phi, &psi, &path[0]);
                    TimeSeries::from_column(full[burn..burn + t].to_vec())
                }
                ModelSpec::Dar1 { w, phi, alpha } => {
                    let mut v = vec![0.0; path[0].len()];
                    for i in 1..v.len() {
                        v[i] = phi * v[i - 1] + path[0][i] * (w + alpha * v[i - 1] * v[i - 1]).sqrt();
                    }
                    TimeSeries::from_column(v[burn..].to_vec())
                }
                ModelSpec::Var { m, coefficients } => {
                    let mut v = vec![vec![0.0; path[0].len()]; *m];
                    var_forward(*m, coefficients, &mut v, |k, i| path[k][i], 0);
                    TimeSeries::from_columns(v.into_iter().map(|c| c[burn..].to_vec()).collect())
                }
            }
        }
    }
}

/// Generates `S` pseudo-series from `generator` (fitted to `y`), refits
/// `null_template` on each and records `T * L_T` at the refitted value.
fn bootstrap_layer(
    generator: &ModelSpec,
    null_template: &ModelSpec,
    y: &TimeSeries,
    ts: &TransformSet,
    h: usize,
    cfg: &BootstrapConfig,
    seed: u64,
) -> Result<BootstrapResult> {
    if cfg.replicates == 0 {
        return Err(Error::InvalidInput("the number of bootstrap replicates must be at least 1".into()));
    }
    if let (ModelSpec::Var { coefficients, m }, RebuildMode::BurnIn) = (generator, cfg.rebuild) {
        let causal =
            ModelSpec::Var { m: *m, coefficients: coefficients.clone() }.simulate(ErrorDistribution::Gaussian, 2, Some(0), 0).is_ok();
        if !causal {
            return Err(Error::InvalidInput("burn-in rebuild needs a causal VAR".into()));
        }
    }
    let pool = generator.residual_columns(y)?;
    let outcomes: Vec<Result<(f64, Vec<f64>)>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|s| {
            let mut rng = rng_from_seed(derive_seed(seed, s as u64));
            let ys = rebuild_replicate(generator, y, &pool, cfg, &mut rng)?;
            let fitted = estimate(null_template, &ys, ts, h, &cfg.estimator)?;
            let xi = plug_in_statistic(&fitted, &ys, ts, h)?;
            Ok((xi, fitted.theta()))
        })
        .collect();
    let mut statistics = Vec::with_capacity(cfg.replicates);
    let mut refit_estimates = Vec::with_capacity(cfg.replicates);
    let mut dropped = Vec::new();
    for (s, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok((xi, th)) if xi.is_finite() => {
                statistics.push(xi);
                refit_estimates.push(th);
            }
            _ => dropped.push(s),
        }
    }
    if dropped.len() as f64 > cfg.max_drop_fraction * cfg.replicates as f64 || statistics.is_empty() {
        return Err(Error::RefitFailure { dropped: dropped.len(), total: cfg.replicates });
    }
    Ok(BootstrapResult {
        statistics,
        refit_estimates,
        dropped,
        replicates: cfg.replicates,
        with_replacement: cfg.with_replacement,
        seed,
        rebuild: cfg.rebuild,
    })
}

/// Bootstrap distribution of the statistic under the fitted null model.
pub fn bootstrap_null(fitted: &ModelSpec, y: &TimeSeries, ts: &TransformSet, h: usize, cfg: &BootstrapConfig) -> Result<BootstrapResult> {
    bootstrap_layer(fitted, fitted, y, ts, h, cfg, cfg.seed)
}

/// Fits the null with the configured estimator, bootstraps, and rejects when
/// `xi > q_{1-alpha}`.
pub fn bootstrap_test(
    template: &ModelSpec,
    y: &TimeSeries,
    ts: &TransformSet,
    h: usize,
    cfg: &BootstrapConfig,
    alpha: f64,
) -> Result<(TestReport, BootstrapResult)> {
    check_alpha(alpha)?;
    let fitted = estimate(template, y, ts, h, &cfg.estimator)?;
    let xi = plug_in_statistic(&fitted, y, ts, h)?;
    let boot = bootstrap_null(&fitted, y, ts, h, cfg)?;
    let q = boot.quantile(1.0 - alpha);
    let exceed = boot.statistics.iter().filter(|v| **v >= xi).count();
    let report = TestReport {
        method: TestMethod::Bootstrap,
        statistic: xi,
        df: None,
        standardization: None,
        critical_value: q,
        p_value: exceed as f64 / boot.statistics.len() as f64,
        alpha,
        reject: xi > q,
        config: ConfigEcho {
            transforms: ts.descriptors(),
            h,
            t: y.len() - fitted.lags() - fitted.leads(),
            k: ts.len(),
            model: Some(fitted.to_string()),
            dim_theta: Some(fitted.dim_theta()),
            seed: Some(cfg.seed),
            bootstrap_replicates: Some(cfg.replicates),
        },
    };
    Ok((report, boot))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalPowerBootstrap {
    /// `1 - F_b(q)`: share of alternative-layer statistics above `q`.
    pub power: f64,
    pub critical_value: f64,
    pub null_fit: Vec<f64>,
    pub alternative_fit: Vec<f64>,
    pub null_layer: BootstrapResult,
    pub alternative_layer: BootstrapResult,
}

/// Bootstrap approximation of the power of the size-adjusted bootstrap test
/// against the directional alternative (`None` keeps the null model, which
/// makes the power estimate a size estimate). The null and alternative
/// layers use seeds `derive_seed(seed, 0)` and `derive_seed(seed, 1)`.
pub fn bootstrap_local_power(
    null_template: &ModelSpec,
    direction: Option<AlternativeDirection>,
    y: &TimeSeries,
    ts: &TransformSet,
    h: usize,
    cfg: &BootstrapConfig,
    alpha: f64,
) -> Result<LocalPowerBootstrap> {
    check_alpha(alpha)?;
    if cfg.replicates == 0 {
        return Err(Error::InvalidInput("the number of bootstrap replicates must be at least 1".into()));
    }
    let null_fit = estimate(null_template, y, ts, h, &cfg.estimator)?;
    let alt_fit = match direction {
        Some(dir) => {
            let alt_template = dir.extend(&null_fit, 0.0)?;
            let gcfg = match &cfg.estimator {
                Estimator::Gcov(g) => g.clone(),
                _ => GcovConfig::default(),
            };
            gcov_fit(&alt_template, y, ts, h, &gcfg, None)?.model
        }
        None => null_fit.clone(),
    };
    let null_layer = bootstrap_layer(&null_fit, &null_fit, y, ts, h, cfg, derive_seed(cfg.seed, 0))?;
    let q = null_layer.quantile(1.0 - alpha);
    let alternative_layer = bootstrap_layer(&alt_fit, &null_fit, y, ts, h, cfg, derive_seed(cfg.seed, 1))?;
    let above = alternative_layer.statistics.iter().filter(|v| **v > q).count();
    Ok(LocalPowerBootstrap {
        power: above as f64 / alternative_layer.statistics.len() as f64,
        critical_value: q,
        null_fit: null_fit.theta(),
        alternative_fit: alt_fit.theta(),
        null_layer,
        alternative_layer,
    })
}

/// Design of a Monte Carlo study of the bootstrap test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyDesign {
    /// Data-generating process under the null.
    pub null_dgp: ModelSpec,
    /// Data-generating process under the alternative.
    pub alternative_dgp: Option<ModelSpec>,
    /// Model fitted under the null (order and starting values).
    pub null_template: ModelSpec,
    pub dist: ErrorDistribution,
    pub t: usize,
    pub reps: usize,
    pub alpha: f64,
    pub h: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyOutcome {
    pub size: f64,
    pub size_se: f64,
    pub power: Option<f64>,
    pub power_se: Option<f64>,
    /// Outer replications abandoned because the bootstrap aborted.
    pub failed_null: usize,
    pub failed_alternative: usize,
    pub reps: usize,
}

fn rejection_rate(
    dgp: &ModelSpec,
    design: &StudyDesign,
    ts: &TransformSet,
    cfg: &BootstrapConfig,
    stream: u64,
) -> Result<(f64, usize, usize)> {
    let outcomes: Vec<Option<bool>> = (0..design.reps)
        .into_par_iter()
        .map(|i| {
            let base = derive_seed(derive_seed(design.seed, stream), i as u64);
            let run = || -> Result<bool> {
                let y = dgp.simulate(design.dist, design.t, None, derive_seed(base, 0))?.series;
                if design.alpha >= 1.0 {
                    return Ok(true);
                }
                let inner = BootstrapConfig { seed: derive_seed(base, 1), ..cfg.clone() };
                Ok(bootstrap_test(&design.null_template, &y, ts, design.h, &inner, design.alpha)?.0.reject)
            };
            run().ok()
        })
        .collect();
    let done: Vec<bool> = outcomes.iter().flatten().copied().collect();
    if done.is_empty() {
        return Err(Error::RefitFailure { dropped: design.reps, total: design.reps });
    }
    let rate = done.iter().filter(|r| **r).count() as f64 / done.len() as f64;
    Ok((rate, done.len(), design.reps - done.len()))
}

/// Empirical size (and power) of the bootstrap test with critical values
/// from `cfg`. `alpha = 1` rejects every sample.
pub fn bootstrap_size_power_study(design: &StudyDesign, ts: &TransformSet, cfg: &BootstrapConfig) -> Result<StudyOutcome> {
    if !(design.alpha > 0.0 && design.alpha <= 1.0) {
        return Err(Error::InvalidInput(format!("alpha {} must lie in (0, 1]", design.alpha)));
    }
    if design.reps == 0 {
        return Err(Error::InvalidInput("reps must be at least 1".into()));
    }
    let se = |p: f64, n: usize| (p * (1.0 - p) / n as f64).sqrt();
    let (size, n0, f0) = rejection_rate(&design.null_dgp, design, ts, cfg, 0)?;
    let (power, power_se, f1) = match &design.alternative_dgp {
        Some(alt) => {
            let (p, n1, f1) = rejection_rate(alt, design, ts, cfg, 1)?;
            (Some(p), Some(se(p, n1)), f1)
        }
        None => (None, None, 0),
    };
    Ok(StudyOutcome { size, size_se: se(size, n0), power, power_se, failed_null: f0, failed_alternative: f1, reps: design.reps })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mar01(psi: f64, t: usize, seed: u64) -> TimeSeries {
        ModelSpec::noncausal_ar1(psi).unwrap().simulate(ErrorDistribution::StudentT { nu: 5.0 }, t, None, seed).unwrap().series
    }

    #[test]
    fn nearest_rank_rule() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(nearest_rank(&v, 0.95), 95.0);
        assert_eq!(nearest_rank(&v, 0.951), 96.0);
        assert_eq!(nearest_rank(&v, 1.0), 100.0);
        assert_eq!(nearest_rank(&[3.0, 1.0, 2.0], 0.5), 2.0);
    }

    #[test]
    fn exact_rebuild_inverts_residuals() {
        let spec = ModelSpec::mar(vec![0.4, -0.1], vec![0.7]).unwrap();
        let y = spec.simulate(ErrorDistribution::Laplace, 300, None, 5).unwrap().series;
        let u = spec.residual_columns(&y).unwrap();
        let back = rebuild_exact(&spec, &y, &u).unwrap();
        for (a, b) in back.column(0).iter().zip(y.column(0)) {
            assert!((a - b).abs() < 1e-8);
        }
        let dar = ModelSpec::dar1(0.5, 0.3, 0.2).unwrap();
        let y = dar.simulate(ErrorDistribution::Gaussian, 200, None, 2).unwrap().series;
        let back = rebuild_exact(&dar, &y, &dar.residual_columns(&y).unwrap()).unwrap();
        for (a, b) in back.column(0).iter().zip(y.column(0)) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn deterministic_and_quantile_monotone() {
        let y = mar01(0.7, 200, 1);
        let spec = ModelSpec::noncausal_ar1(0.7).unwrap();
        let ts = TransformSet::linear_and_square();
        let cfg = BootstrapConfig { replicates: 20, seed: 9, ..Default::default() };
        let a = bootstrap_null(&spec, &y, &ts, 2, &cfg).unwrap();
        let b = bootstrap_null(&spec, &y, &ts, 2, &cfg).unwrap();
        assert_eq!(a.statistics, b.statistics);
        assert!(a.quantile(0.5) <= a.quantile(0.9) && a.quantile(0.9) <= a.q95());
        let perm = bootstrap_null(&spec, &y, &ts, 2, &BootstrapConfig { with_replacement: false, ..cfg.clone() }).unwrap();
        assert_eq!(perm.statistics.len(), 20);
        assert!(bootstrap_null(&spec, &y, &ts, 2, &BootstrapConfig { replicates: 0, ..cfg }).is_err());
    }

    #[test]
    fn draws_with_replacement_follow_the_empirical_law() {
        let n = 1000;
        let mut rng = rng_from_seed(8);
        let mut counts = vec![0usize; n];
        let draws = 50;
        for _ in 0..draws {
            draw_indices(&mut rng, n, true).into_iter().for_each(|i| counts[i] += 1);
        }
        let total = (n * draws) as f64;
        let mut acc = 0.0;
        let mut ks: f64 = 0.0;
        for (i, c) in counts.iter().enumerate() {
            acc += *c as f64 / total;
            ks = ks.max((acc - (i + 1) as f64 / n as f64).abs());
        }
        assert!(ks < 0.02, "KS {ks}");
    }

    #[test]
    fn permutation_keeps_residual_multiset() {
        let mut rng = rng_from_seed(3);
        let mut idx = draw_indices(&mut rng, 50, false);
        idx.sort_unstable();
        assert_eq!(idx, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn degenerate_alpha_rejects_everything() {
        let design = StudyDesign {
            null_dgp: ModelSpec::noncausal_ar1(0.5).unwrap(),
            alternative_dgp: None,
            null_template: ModelSpec::noncausal_ar1(0.5).unwrap(),
            dist: ErrorDistribution::Uniform,
            t: 50,
            reps: 5,
            alpha: 1.0,
            h: 1,
            seed: 1,
        };
        let out = bootstrap_size_power_study(&design, &TransformSet::linear_and_square(), &BootstrapConfig::default()).unwrap();
        assert_eq!(out.size, 1.0);
    }

    #[test]
    fn ols_and_aml_refits() {
        let y = mar01(0.5, 150, 4);
        let spec = ModelSpec::noncausal_ar1(0.5).unwrap();
        let ts = TransformSet::linear_and_square();
        for est in [Estimator::Ols, Estimator::Aml(AmlConfig::default())] {
            let cfg = BootstrapConfig { replicates: 5, estimator: est, ..Default::default() };
            let (rep, boot) = bootstrap_test(&spec, &y, &ts, 2, &cfg, 0.05).unwrap();
            assert_eq!(boot.statistics.len(), 5);
            assert_eq!(rep.reject, rep.statistic > rep.critical_value);
        }
    }
}
