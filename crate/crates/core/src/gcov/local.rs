use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::autocov::autocov_columns;
use crate::dist::{chi2_quantile, marcum_q, ErrorDistribution};
use crate::error::{Error, Result};
use crate::linalg::{sym_inverse, vec_of};
use crate::models::{default_burn, ModelSpec};
use crate::series::TransformSet;

/// Drifts `mu` (in theta) and `nu` (in the extra parameter gamma), both per
/// `sqrt(T)`, with the autocovariance Jacobians at the null.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalAlternative {
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    /// `d vec Gamma(h) / d theta'` for `h = 1..=H`, each `K^2 x dim(theta)`.
    pub d_gamma_d_theta: Vec<DMatrix<f64>>,
    /// `d vec Gamma(h) / d gamma'` for `h = 1..=H`, each `K^2 x dim(gamma)`.
    pub d_gamma_d_gamma: Vec<DMatrix<f64>>,
    pub gamma0: DMatrix<f64>,
}

impl LocalAlternative {
    /// Same Jacobians with new drifts.
    pub fn with_drift(&self, mu: Vec<f64>, nu: Vec<f64>) -> Self {
        Self { mu, nu, ..self.clone() }
    }

    fn check(&self) -> Result<(usize, usize, usize)> {
        let k = self.gamma0.nrows();
        let h = self.d_gamma_d_theta.len();
        if self.gamma0.ncols() != k || self.d_gamma_d_gamma.len() != h || h == 0 {
            return Err(Error::ShapeMismatch("Jacobian lists and Gamma(0) disagree".into()));
        }
        let (p, q) = (self.mu.len(), self.nu.len());
        for (jt, jg) in self.d_gamma_d_theta.iter().zip(&self.d_gamma_d_gamma) {
            if jt.shape() != (k * k, p) || jg.shape() != (k * k, q) {
                return Err(Error::ShapeMismatch(format!(
                    "expected Jacobians {}x{p} and {}x{q}, got {:?} and {:?}",
                    k * k,
                    k * k,
                    jt.shape(),
                    jg.shape()
                )));
            }
        }
        Ok((k, p, q))
    }
}

/// `Pi = W - W J (J'WJ)^-1 J'W` with `W = Gamma(0)^-1 (x) Gamma(0)^-1`.
pub fn pi_projector(gamma0: &DMatrix<f64>, jacobian: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let k = gamma0.nrows();
    if jacobian.nrows() != k * k {
        return Err(Error::ShapeMismatch(format!("Jacobian needs {} rows", k * k)));
    }
    let inv = sym_inverse(gamma0, false)?;
    let w = inv.kronecker(&inv);
    if jacobian.ncols() == 0 {
        return Ok(w);
    }
    let wj = &w * jacobian;
    let m = jacobian.transpose() * &wj;
    let m = (&m + m.transpose()) * 0.5;
    let minv = sym_inverse(&m, false).map_err(|_| Error::RankDeficientJacobian)?;
    let pi = &w - &wj * minv * wj.transpose();
    Ok((&pi + pi.transpose()) * 0.5)
}

/// `lambda = sum_h delta(h)' Pi(h) delta(h)`.
pub fn noncentrality(la: &LocalAlternative) -> Result<f64> {
    la.check()?;
    let mu = nalgebra::DVector::from_column_slice(&la.mu);
    let nu = nalgebra::DVector::from_column_slice(&la.nu);
    let mut lambda = 0.0;
    for (jt, jg) in la.d_gamma_d_theta.iter().zip(&la.d_gamma_d_gamma) {
        let delta = jt * &mu + jg * &nu;
        let pi = pi_projector(&la.gamma0, jt)?;
        lambda += (delta.transpose() * pi * &delta)[(0, 0)];
    }
    Ok(lambda.max(0.0))
}

/// Asymptotic local power `Q_{df/2}(sqrt(lambda), sqrt(chi2_{1-alpha}(df)))`.
pub fn local_power(lambda: f64, df: f64, alpha: f64) -> Result<f64> {
    crate::report::check_alpha(alpha)?;
    if !(lambda >= 0.0) || !(df > 0.0) {
        return Err(Error::InvalidInput("need lambda >= 0 and df > 0".into()));
    }
    let crit = chi2_quantile(df, 1.0 - alpha);
    marcum_q(df / 2.0, lambda.sqrt(), crit.sqrt())
}

/// Direction in which a MAR null is extended by the extra parameter gamma.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlternativeDirection {
    /// Adds `phi_{r+1} = gamma`.
    CausalLag,
    /// Adds `psi_{s+1} = gamma`.
    NoncausalLead,
}

impl AlternativeDirection {
    /// MAR model of the alternative at `theta`, `gamma`.
    pub fn extend(&self, null: &ModelSpec, gamma: f64) -> Result<ModelSpec> {
        let (mut phi, mut psi) = match null {
            ModelSpec::Mar { phi, psi } => (phi.clone(), psi.clone()),
            ModelSpec::NoncausalAr1 { psi } => (vec![], vec![*psi]),
            other => return Err(Error::InvalidInput(format!("no directional alternative for {other}"))),
        };
        match self {
            Self::CausalLag => phi.push(gamma),
            Self::NoncausalLead => psi.push(gamma),
        }
        ModelSpec::mar(phi, psi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobianConfig {
    /// Length of the simulated path behind each autocovariance.
    pub t_large: usize,
    pub seed: u64,
    /// Central-difference step, scaled by `max(1, |theta_i|)`.
    pub step: f64,
}

impl Default for JacobianConfig {
    fn default() -> Self {
        Self { t_large: 200_000, seed: 1, step: 1e-3 }
    }
}

/// Finite-difference autocovariance Jacobians at `null`.
///
/// Data are simulated at perturbed parameters with one common error path;
/// the null residual function at the unperturbed parameters is applied and
/// `vec Gamma(h)` differenced. With a direction the extra parameter is
/// perturbed around zero as well. Drifts of the result are zero.
pub fn jacobian_dgamma(
    null: &ModelSpec,
    direction: Option<AlternativeDirection>,
    ts: &TransformSet,
    h: usize,
    dist: ErrorDistribution,
    cfg: &JacobianConfig,
) -> Result<LocalAlternative> {
    null.validate()?;
    if !(cfg.step > 0.0 && cfg.step.is_finite()) {
        return Err(Error::InvalidInput("finite-difference step must be positive".into()));
    }
    if h == 0 {
        return Err(Error::InvalidInput("H must be at least 1".into()));
    }
    let theta0 = null.theta();
    let p = theta0.len();
    let k = ts.len();

    let mut perturbed: Vec<(ModelSpec, ModelSpec)> = Vec::new();
    for i in 0..p {
        let d = cfg.step * theta0[i].abs().max(1.0);
        let mut up = theta0.clone();
        let mut dn = theta0.clone();
        up[i] += d;
        dn[i] -= d;
        perturbed.push((null.with_theta(&up)?, null.with_theta(&dn)?));
    }
    if let Some(dir) = direction {
        perturbed.push((dir.extend(null, cfg.step)?, dir.extend(null, -cfg.step)?));
    }
    let burn_of = |s: &ModelSpec| match s {
        ModelSpec::Mar { phi, psi } => default_burn(phi, psi),
        ModelSpec::NoncausalAr1 { psi } => default_burn(&[], &[*psi]),
        _ => 500,
    };
    let burn = perturbed.iter().flat_map(|(a, b)| [burn_of(a), burn_of(b)]).chain(std::iter::once(burn_of(null))).max().unwrap_or(0);

    let gammas = |dgp: &ModelSpec| -> Result<Vec<DMatrix<f64>>> {
        let dgp = match dgp {
            ModelSpec::NoncausalAr1 { psi } => ModelSpec::Mar { phi: vec![], psi: vec![*psi] },
            other => other.clone(),
        };
        let sim = dgp.simulate(dist, cfg.t_large, Some(burn), cfg.seed)?;
        let res = null.residual_columns(&sim.series)?;
        let refs: Vec<&[f64]> = res.iter().map(Vec::as_slice).collect();
        let a = ts.apply_columns(&refs, null.lags())?;
        Ok(autocov_columns(&a, h)?.gamma)
    };
    let base = gammas(null)?;
    let mut cols: Vec<Vec<nalgebra::DVector<f64>>> = Vec::new();
    for (i, (up, dn)) in perturbed.iter().enumerate() {
        let d = if i < p { cfg.step * theta0[i].abs().max(1.0) } else { cfg.step };
        let (gu, gd) = (gammas(up)?, gammas(dn)?);
        cols.push((1..=h).map(|l| (vec_of(&gu[l]) - vec_of(&gd[l])) / (2.0 * d)).collect());
    }
    let q = usize::from(direction.is_some());
    let build = |range: std::ops::Range<usize>| -> Vec<DMatrix<f64>> {
        (0..h)
            .map(|l| {
                let mut m = DMatrix::zeros(k * k, range.len());
                for (c, i) in range.clone().enumerate() {
                    m.set_column(c, &cols[i][l]);
                }
                m
            })
            .collect()
    };
    Ok(LocalAlternative {
        mu: vec![0.0; p],
        nu: vec![0.0; q],
        d_gamma_d_theta: build(0..p),
        d_gamma_d_gamma: build(p..p + q),
        gamma0: base[0].clone(),
    })
}
