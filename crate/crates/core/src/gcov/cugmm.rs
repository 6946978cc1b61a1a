use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{default_starts, GcovConfig};
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::optim::nelder_mead;
use crate::series::{TimeSeries, TransformSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CugmmFit {
    pub model: ModelSpec,
    pub theta_hat: Vec<f64>,
    /// Concentrated intercepts: means of the transformed residuals.
    pub beta_hat: Vec<f64>,
    pub objective: f64,
}

/// Continuously updated quadratic form in the centred moments
/// `[a_t - beta ; vec((a_t - beta)(a_{t-1} - beta)')]` with `beta` concentrated
/// out as the sample mean. Returns `(objective, beta)`.
fn cugmm_objective(spec: &ModelSpec, cols: &[Vec<f64>], ts: &TransformSet) -> Result<(f64, Vec<f64>)> {
    let res = spec.raw_residuals(cols);
    let refs: Vec<&[f64]> = res.iter().map(Vec::as_slice).collect();
    let a = ts.apply_columns(&refs, spec.lags())?;
    let k = a.len();
    let n = a[0].len();
    if n < 3 {
        return Err(Error::InsufficientSample { needed: 3, got: n });
    }
    let beta: Vec<f64> = a.iter().map(|c| c.iter().sum::<f64>() / n as f64).collect();
    let c: Vec<Vec<f64>> = a.iter().zip(&beta).map(|(col, b)| col.iter().map(|v| v - b).collect()).collect();
    let dim = k + k * k;
    let mut gbar = DVector::zeros(dim);
    let mut s = DMatrix::zeros(dim, dim);
    let mut m = DVector::zeros(dim);
    for t in 1..n {
        for i in 0..k {
            m[i] = c[i][t];
        }
        // Column-major vec of (a_t - b)(a_{t-1} - b)'.
        for j in 0..k {
            for i in 0..k {
                m[k + j * k + i] = c[i][t] * c[j][t - 1];
            }
        }
        gbar += &m;
        s.syger(1.0, &m, &m, 1.0);
    }
    for i in 0..k {
        // The level moments sum to zero over the full sample.
        gbar[i] += c[i][0];
    }
    gbar /= n as f64;
    s /= n as f64;
    s.fill_upper_triangle_with_lower_triangle();
    let s = nalgebra::Cholesky::new(s).ok_or(Error::SingularWeighting)?;
    let q = gbar.dot(&s.solve(&gbar));
    if !q.is_finite() {
        return Err(Error::SingularWeighting);
    }
    Ok((q, beta))
}

/// Extended concentrated CUGMM at `H = 1`.
pub fn cugmm_extended_fit(template: &ModelSpec, y: &TimeSeries, ts: &TransformSet, h: usize, cfg: &GcovConfig) -> Result<CugmmFit> {
    if h != 1 {
        return Err(Error::InvalidInput("the extended CUGMM is defined for H = 1".into()));
    }
    template.validate()?;
    let k = ts.len();
    if k * k < template.dim_theta() {
        return Err(Error::InvalidInput(format!("{} moments cannot identify {} parameters", k + k * k, template.dim_theta() + k)));
    }
    let cols = y.columns();
    // Surface a singular weighting matrix at the starting point as an error.
    cugmm_objective(template, cols, ts)?;
    let starts = default_starts(template, &cfg.start_grid);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for z0 in &starts {
        let f = |z: &[f64]| cugmm_objective(&template.from_unconstrained(z), cols, ts).map_or(f64::INFINITY, |v| v.0);
        let r = nelder_mead(f, z0, &cfg.optimizer);
        if r.f.is_finite() && best.as_ref().is_none_or(|b| r.f < b.1) {
            best = Some((r.x, r.f));
        }
    }
    let (z, _) = best.ok_or(Error::AllStartsFailed)?;
    let model = template.from_unconstrained(&z);
    let (objective, beta_hat) = cugmm_objective(&model, cols, ts)?;
    Ok(CugmmFit { theta_hat: model.theta(), model, beta_hat, objective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::ErrorDistribution;
    use crate::gcov::gcov_fit;

    #[test]
    fn just_identified_matches_gcov() {
        let spec = ModelSpec::noncausal_ar1(0.6).unwrap();
        let y = spec.simulate(ErrorDistribution::Laplace, 800, None, 12).unwrap().series;
        let ts = TransformSet::parse_list("identity").unwrap();
        let template = ModelSpec::mar(vec![], vec![0.3]).unwrap();
        let cfg = GcovConfig::default();
        let c = cugmm_extended_fit(&template, &y, &ts, 1, &cfg).unwrap();
        let g = gcov_fit(&template, &y, &ts, 1, &cfg, None).unwrap();
        assert!(c.objective < 1e-6, "{}", c.objective);
        assert!((c.theta_hat[0] - g.theta_hat[0]).abs() < 1e-3);
        let u = crate::models::residuals(&c.model, &y).unwrap();
        let mean = u.column(0).iter().sum::<f64>() / u.len() as f64;
        assert!((c.beta_hat[0] - mean).abs() < 1e-12);
    }

    #[test]
    fn lag_restriction() {
        let y = TimeSeries::from_column((0..50).map(|i| (i as f64).sin()).collect()).unwrap();
        let t = ModelSpec::mar(vec![], vec![0.3]).unwrap();
        let ts = TransformSet::linear_and_square();
        assert!(cugmm_extended_fit(&t, &y, &ts, 2, &GcovConfig::default()).is_err());
    }
}
