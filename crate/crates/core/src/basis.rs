//! Exponentially weighted power generators, regularized Gram-Schmidt
//! orthonormalization and the many-transformation portmanteau.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::autocov::autocov_columns;
use crate::error::{Error, Result};
use crate::gcov::{check_inputs, gcov_fit, minimize_model, GcovConfig, GcovFit};
use crate::models::ModelSpec;
use crate::optim::NelderMeadConfig;
use crate::report::{ConfigEcho, TestMethod, TestReport};
use crate::series::{TimeSeries, Transform, TransformKind, TransformSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignMode {
    /// `u^p exp(-t u)`.
    PositiveSupport,
    /// `|u|^p exp(-t |u|)`.
    AbsoluteValue,
}

/// One generator `a_{t,p}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub t: f64,
    pub p: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorGrid {
    pub min_power: u32,
    pub max_power: u32,
    pub t_grid: Vec<f64>,
    pub sign_mode: SignMode,
    /// Enumerated in increasing `(t, p)` order.
    pub generators: Vec<Generator>,
}

/// Generators `a_{t,p}` for `p = 0..=max_power` and `n` weights `t`
/// equally spaced on `[0, t_max]` (just `t = 0` when `n = 1`).
pub fn build_generators(max_power: u32, n: usize, t_max: f64, sign_mode: SignMode) -> Result<GeneratorGrid> {
    if n == 0 || !(0.0..=1.0).contains(&t_max) {
        return Err(Error::InvalidInput("need n >= 1 and t_max in [0, 1]".into()));
    }
    let t_grid = if n == 1 { vec![0.0] } else { (0..n).map(|j| t_max * j as f64 / (n - 1) as f64).collect() };
    GeneratorGrid::new(0, max_power, t_grid, sign_mode)
}

impl GeneratorGrid {
    pub fn new(min_power: u32, max_power: u32, mut t_grid: Vec<f64>, sign_mode: SignMode) -> Result<Self> {
        if max_power < 1 || min_power > max_power {
            return Err(Error::InvalidInput(format!("powers {min_power}..={max_power} need 1 <= max and min <= max")));
        }
        if t_grid.is_empty() || t_grid.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::InvalidInput("exponential weights must lie in [0, 1]".into()));
        }
        t_grid.sort_by(f64::total_cmp);
        t_grid.dedup();
        let generators = t_grid.iter().flat_map(|&t| (min_power..=max_power).map(move |p| Generator { t, p })).collect();
        Ok(Self { min_power, max_power, t_grid, sign_mode, generators })
    }

    /// `|u|^p exp(-0.01 |u|)` for `p = 1..=k`.
    pub fn abs_powers(k: u32, t: f64) -> Result<Self> {
        Self::new(1, k, vec![t], SignMode::AbsoluteValue)
    }

    /// Equally spaced weights on `[0, 0.1]` with `K_n^2 <= T / 10`.
    pub fn default_for(t: usize) -> Self {
        let cap = ((t as f64 / 10.0).sqrt().floor() as usize).max(2);
        let n = if cap >= 4 { 2 } else { 1 };
        let p = (cap / n).saturating_sub(1).max(1) as u32;
        build_generators(p, n, 0.1, SignMode::AbsoluteValue).expect("valid default grid")
    }

    /// `K_n`.
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn eval(&self, k: usize, u: f64) -> f64 {
        let g = self.generators[k];
        let x = match self.sign_mode {
            SignMode::PositiveSupport => u,
            SignMode::AbsoluteValue => u.abs(),
        };
        x.powi(g.p as i32) * (-g.t * x).exp()
    }

    /// Non-constant generators as a transform set.
    pub fn transform_set(&self) -> Result<TransformSet> {
        let list = self
            .generators
            .iter()
            .filter(|g| g.p > 0 || g.t > 0.0)
            .map(|g| {
                Transform::new(match self.sign_mode {
                    SignMode::PositiveSupport => TransformKind::ExpWeightedPower { p: g.p, t: g.t },
                    SignMode::AbsoluteValue => TransformKind::AbsExpWeightedPower { p: g.p, t: g.t },
                })
            })
            .collect();
        TransformSet::new(list)
    }
}

/// Accepted element `a*_k = (a_g - intercept - sum_j loadings_j a*_j) / norm`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisElement {
    pub generator: usize,
    pub intercept: f64,
    /// Loadings on the previously accepted elements.
    pub loadings: Vec<f64>,
    pub norm: f64,
    /// `1 - R^2` at acceptance.
    pub unexplained: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthonormalBasis {
    pub grid: GeneratorGrid,
    pub selected: Vec<BasisElement>,
    /// `(generator, 1 - R^2)` of each rejected generator.
    pub rejected: Vec<(usize, f64)>,
    pub epsilon: f64,
    /// SHA-256 of the reference residuals.
    pub fingerprint: String,
    pub reference_len: usize,
}

/// `max(1e-8, K_n / T)`.
pub fn default_epsilon(k_n: usize, t: usize) -> f64 {
    (k_n as f64 / t as f64).max(1e-8)
}

fn fingerprint(u: &[f64]) -> String {
    let mut h = Sha256::new();
    for v in u {
        h.update(v.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn dot_mean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / a.len() as f64
}

/// Forward Gram-Schmidt regression of each generator on the constant and
/// the accepted elements; accepts when `1 - R^2 > epsilon`.
pub fn orthonormalize(residuals: &[f64], grid: &GeneratorGrid, epsilon: f64) -> Result<OrthonormalBasis> {
    let t = residuals.len();
    if t <= grid.len() {
        return Err(Error::InsufficientSample { needed: grid.len() + 1, got: t });
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidInput(format!("epsilon {epsilon} must lie in [0, 1)")));
    }
    let mut accepted: Vec<Vec<f64>> = Vec::new();
    let mut selected = Vec::new();
    let mut rejected = Vec::new();
    for k in 0..grid.len() {
        let mut r: Vec<f64> = residuals.iter().map(|&u| grid.eval(k, u)).collect();
        if let Some(row) = r.iter().position(|v| !v.is_finite()) {
            return Err(Error::DomainViolation { row, transform: format!("{:?}", grid.generators[k]), value: residuals[row] });
        }
        let mut intercept = mean(&r);
        r.iter_mut().for_each(|v| *v -= intercept);
        let total = dot_mean(&r, &r);
        let mut loadings = vec![0.0; accepted.len()];
        // Two passes: classical Gram-Schmidt with reorthogonalization.
        for _ in 0..2 {
            for (j, a) in accepted.iter().enumerate() {
                let b = dot_mean(&r, a);
                loadings[j] += b;
                r.iter_mut().zip(a).for_each(|(v, x)| *v -= b * x);
            }
            let m = mean(&r);
            intercept += m;
            r.iter_mut().for_each(|v| *v -= m);
        }
        let rest = dot_mean(&r, &r);
        let unexplained = if total > 0.0 { (rest / total).clamp(0.0, 1.0) } else { 0.0 };
        if unexplained > epsilon && rest > 0.0 {
            let norm = rest.sqrt();
            r.iter_mut().for_each(|v| *v /= norm);
            accepted.push(r);
            selected.push(BasisElement { generator: k, intercept, loadings, norm, unexplained });
        } else {
            rejected.push((k, unexplained));
        }
    }
    if selected.is_empty() {
        return Err(Error::AllRejected);
    }
    Ok(OrthonormalBasis { grid: grid.clone(), selected, rejected, epsilon, fingerprint: fingerprint(residuals), reference_len: t })
}

impl OrthonormalBasis {
    /// `K*_n`.
    pub fn k_star(&self) -> usize {
        self.selected.len()
    }

    /// Columns `a*_k(u_t)` for arbitrary residuals.
    pub fn evaluate(&self, u: &[f64]) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(self.selected.len());
        for e in &self.selected {
            let mut col: Vec<f64> = u.iter().map(|&x| self.grid.eval(e.generator, x) - e.intercept).collect();
            for (j, b) in e.loadings.iter().enumerate() {
                col.iter_mut().zip(&out[j]).for_each(|(v, a)| *v -= b * a);
            }
            col.iter_mut().for_each(|v| *v /= e.norm);
            out.push(col);
        }
        out
    }

    /// All basis values at one point.
    pub fn eval_point(&self, u: f64) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::with_capacity(self.selected.len());
        for e in &self.selected {
            let mut v = self.grid.eval(e.generator, u) - e.intercept;
            for (j, b) in e.loadings.iter().enumerate() {
                v -= b * out[j];
            }
            out.push(v / e.norm);
        }
        out
    }

    /// The basis as transforms `a*_1, ..., a*_K*`.
    pub fn transform_set(&self) -> Result<TransformSet> {
        let shared = std::sync::Arc::new(self.clone());
        let list = (0..self.k_star())
            .map(|k| {
                let b = shared.clone();
                Transform::custom(format!("basis:{k}"), move |u| b.eval_point(u)[k])
            })
            .collect();
        TransformSet::new(list)
    }

    /// Sample Gram matrix `(1/T) sum_t a*(u_t) a*(u_t)'`.
    pub fn gram(&self, u: &[f64]) -> Vec<Vec<f64>> {
        let cols = self.evaluate(u);
        cols.iter().map(|a| cols.iter().map(|b| dot_mean(a, b)).collect()).collect()
    }
}

/// `L(theta) = sum_h ||Gamma_a*(h)||_F^2`, identity weighting.
fn many_transform_objective(spec: &ModelSpec, cols: &[Vec<f64>], basis: &OrthonormalBasis, h: usize) -> Result<(f64, usize)> {
    let res = spec.raw_residuals(cols);
    let a = basis.evaluate(&res[0]);
    let stack = autocov_columns(&a, h)?;
    let l = stack.gamma[1..].iter().map(|g| g.norm_squared()).sum();
    Ok((l, stack.t))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManyTransformValue {
    /// `xi = T L(theta)`.
    pub xi: f64,
    pub theta: Vec<f64>,
    pub k_star: usize,
    pub h: usize,
    pub t: usize,
    pub refit: bool,
}

/// `xi` at the model's own parameters, or minimized over theta from there
/// when `refit` is set.
pub fn many_transform_statistic(
    start: &ModelSpec,
    y: &TimeSeries,
    basis: &OrthonormalBasis,
    h: usize,
    refit: bool,
    optimizer: &NelderMeadConfig,
) -> Result<ManyTransformValue> {
    start.validate()?;
    check_inputs(start, y, h)?;
    if start.series_dim() != 1 {
        return Err(Error::InvalidInput("the generator basis is univariate".into()));
    }
    let cols = y.columns();
    let model = if refit {
        let z0 = start.unconstrained()?;
        minimize_model(start, &[z0], optimizer, |m| many_transform_objective(m, cols, basis, h).map(|v| v.0))?.0
    } else {
        start.clone()
    };
    let (l, t) = many_transform_objective(&model, cols, basis, h)?;
    Ok(ManyTransformValue { xi: t as f64 * l, theta: model.theta(), k_star: basis.k_star(), h, t, refit })
}

/// `(xi - H K*^2) / sqrt(2 H K*^2)`.
pub fn standardized_statistic(xi: f64, h: usize, k_star: usize) -> f64 {
    assert!(k_star >= 1 && h >= 1, "K* and H must be positive");
    let c = (h * k_star * k_star) as f64;
    (xi - c) / (2.0 * c).sqrt()
}

/// GCov fit with `Gamma(0)` replaced by its diagonal.
pub fn diagonal_gcov_start(template: &ModelSpec, y: &TimeSeries, ts: &TransformSet, h: usize, cfg: &GcovConfig) -> Result<GcovFit> {
    gcov_fit(template, y, ts, h, &GcovConfig { diagonal: true, ..cfg.clone() }, None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManyTransformConfig {
    pub grid: GeneratorGrid,
    /// Defaults to `max(1e-8, K_n / T)`.
    pub epsilon: Option<f64>,
    /// Re-minimize over theta with the basis held fixed.
    pub refit: bool,
    pub gcov: GcovConfig,
}

impl ManyTransformConfig {
    pub fn new(grid: GeneratorGrid) -> Self {
        Self { grid, epsilon: None, refit: true, gcov: GcovConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManyTransformOutcome {
    pub start_theta: Vec<f64>,
    pub value: ManyTransformValue,
    pub basis: OrthonormalBasis,
    pub z: f64,
    /// `K_n^6 / T` and `H K_n^2 / T`; both should be small.
    pub growth_ratios: (f64, f64),
    pub warnings: Vec<String>,
}

/// Diagonal GCov start, basis from its residuals, statistic and one-sided
/// normal test.
pub fn many_transform_test(
    template: &ModelSpec,
    y: &TimeSeries,
    h: usize,
    cfg: &ManyTransformConfig,
    alpha: f64,
) -> Result<(TestReport, ManyTransformOutcome)> {
    let ts = cfg.grid.transform_set()?;
    let start = diagonal_gcov_start(template, y, &ts, h, &cfg.gcov)?;
    let res = start.model.residual_columns(y)?;
    let eps = cfg.epsilon.unwrap_or_else(|| default_epsilon(cfg.grid.len(), res[0].len()));
    let basis = orthonormalize(&res[0], &cfg.grid, eps)?;
    let value = many_transform_statistic(&start.model, y, &basis, h, cfg.refit, &cfg.gcov.optimizer)?;
    let z = standardized_statistic(value.xi, h, value.k_star);
    let kn = cfg.grid.len() as f64;
    let tt = value.t as f64;
    let growth_ratios = (kn.powi(6) / tt, h as f64 * kn * kn / tt);
    let mut warnings = Vec::new();
    if growth_ratios.0 >= 1.0 {
        warnings.push(format!("K_n^6 / T = {:.3} is not small", growth_ratios.0));
    }
    if growth_ratios.1 >= 1.0 {
        warnings.push(format!("H K_n^2 / T = {:.3} is not small", growth_ratios.1));
    }
    let c = (h * value.k_star * value.k_star) as f64;
    let config = ConfigEcho {
        transforms: basis.selected.iter().map(|e| ts_label(&cfg.grid, e.generator)).collect(),
        h,
        t: value.t,
        k: value.k_star,
        model: Some(template.with_theta(&value.theta)?.to_string()),
        dim_theta: Some(value.theta.len()),
        ..Default::default()
    };
    let report = TestReport::normal(TestMethod::ManyTransform, value.xi, c, (2.0 * c).sqrt(), alpha, config)?;
    Ok((report, ManyTransformOutcome { start_theta: start.theta_hat, value, basis, z, growth_ratios, warnings }))
}

fn ts_label(grid: &GeneratorGrid, k: usize) -> String {
    let g = grid.generators[k];
    match grid.sign_mode {
        SignMode::PositiveSupport => format!("exp-power:{}:{}", g.p, g.t),
        SignMode::AbsoluteValue => format!("abs-exp-power:{}:{}", g.p, g.t),
    }
}
