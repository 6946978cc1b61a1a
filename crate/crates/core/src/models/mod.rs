//! Residual functions, simulators and parametric estimators for the model
//! zoo: mixed causal-noncausal MAR(r, s), DAR(1), VAR(p) and the purely
//! noncausal AR(1).

mod aml;
mod mar;
mod other;

use std::fmt;

pub use nalgebra::Complex;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use aml::{aml_fit, aml_loglik, AmlConfig, AmlFit};
pub use mar::{default_burn, mar_components, mar_filter, mar_residuals, simulate_mar, MarComponents};
pub use other::ols_noncausal_ar1;

use crate::dist::ErrorDistribution;
use crate::error::{Error, Result};
use crate::optim::{stationary_from_unconstrained, stationary_to_unconstrained};
use crate::series::TimeSeries;

/// Polynomial roots in the complex plane.
pub type Roots = Vec<Complex<f64>>;

/// Root-modulus margin required for stationarity.
pub const ROOT_MARGIN: f64 = 1e-8;

/// A model together with its parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelSpec {
    /// `Phi(L) Psi(L^-1) y_t = u_t` with `Phi(L) = 1 - sum phi_i L^i` and
    /// `Psi(L^-1) = 1 - sum psi_j L^-j`.
    Mar { phi: Vec<f64>, psi: Vec<f64> },
    /// `y_t = phi y_{t-1} + u_t sqrt(w + alpha y_{t-1}^2)`.
    Dar1 { w: f64, phi: f64, alpha: f64 },
    /// `Y_t = sum Phi_i Y_{t-i} + u_t`; each `Phi_i` stored column-major.
    Var { m: usize, coefficients: Vec<Vec<f64>> },
    /// `y_t = psi y_{t+1} + u_t`.
    NoncausalAr1 { psi: f64 },
}

/// Draws from a model together with the matched errors.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub series: TimeSeries,
    /// Errors aligned row by row with `series`.
    pub errors: TimeSeries,
    pub burn: usize,
}

/// Companion matrix of `1 - a_1 z - ... - a_p z^p`.
fn companion(a: &[f64]) -> DMatrix<f64> {
    let p = a.len();
    let mut c = DMatrix::zeros(p, p);
    for (j, v) in a.iter().enumerate() {
        c[(0, j)] = *v;
    }
    for i in 1..p {
        c[(i, i - 1)] = 1.0;
    }
    c
}

/// Largest reciprocal-root modulus of `1 - a_1 z - ... - a_p z^p`.
pub fn spectral_radius(a: &[f64]) -> f64 {
    if a.iter().all(|v| *v == 0.0) {
        return 0.0;
    }
    companion(a).complex_eigenvalues().iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Roots of `1 - a_1 z - ... - a_p z^p` (zero reciprocal roots dropped).
pub fn polynomial_roots(a: &[f64]) -> Vec<Complex<f64>> {
    if a.is_empty() {
        return vec![];
    }
    let mut roots: Vec<Complex<f64>> =
        companion(a).complex_eigenvalues().iter().filter(|c| c.norm() > 1e-300).map(|c| Complex::new(1.0, 0.0) / c).collect();
    roots.sort_by(|x, y| x.norm().total_cmp(&y.norm()).then(x.re.total_cmp(&y.re)));
    roots
}

fn var_companion(m: usize, coefficients: &[Vec<f64>]) -> DMatrix<f64> {
    let p = coefficients.len();
    let mut c = DMatrix::zeros(m * p, m * p);
    for (i, phi) in coefficients.iter().enumerate() {
        let blk = DMatrix::from_column_slice(m, m, phi);
        c.view_mut((0, i * m), (m, m)).copy_from(&blk);
    }
    for i in 1..p {
        c.view_mut((i * m, (i - 1) * m), (m, m)).copy_from(&DMatrix::identity(m, m));
    }
    c
}

impl ModelSpec {
    pub fn mar(phi: Vec<f64>, psi: Vec<f64>) -> Result<Self> {
        let s = Self::Mar { phi, psi };
        s.validate()?;
        Ok(s)
    }

    pub fn dar1(w: f64, phi: f64, alpha: f64) -> Result<Self> {
        let s = Self::Dar1 { w, phi, alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn var(m: usize, coefficients: Vec<Vec<f64>>) -> Result<Self> {
        let s = Self::Var { m, coefficients };
        s.validate()?;
        Ok(s)
    }

    pub fn noncausal_ar1(psi: f64) -> Result<Self> {
        let s = Self::NoncausalAr1 { psi };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.theta().iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidTheta("non-finite parameter".into()));
        }
        let limit = 1.0 / (1.0 + ROOT_MARGIN);
        match self {
            Self::Mar { phi, psi } => {
                if spectral_radius(phi) >= limit {
                    return Err(Error::InvalidTheta(format!("causal polynomial {phi:?} has a root inside or on the unit circle")));
                }
                if spectral_radius(psi) >= limit {
                    return Err(Error::InvalidTheta(format!("noncausal polynomial {psi:?} has a root inside or on the unit circle")));
                }
            }
            Self::Dar1 { w, phi, alpha } => {
                if !(*w > 0.0 && *phi >= 0.0 && *alpha >= 0.0) {
                    return Err(Error::InvalidTheta("DAR(1) needs w > 0, phi >= 0, alpha >= 0".into()));
                }
            }
            Self::Var { m, coefficients } => {
                if *m == 0 || coefficients.is_empty() {
                    return Err(Error::InvalidTheta("VAR needs m >= 1 and p >= 1".into()));
                }
                if coefficients.iter().any(|c| c.len() != m * m) {
                    return Err(Error::InvalidTheta(format!("each VAR coefficient needs {} entries", m * m)));
                }
                let eig = var_companion(*m, coefficients).complex_eigenvalues();
                if eig.iter().any(|c| (c.norm() - 1.0).abs() <= ROOT_MARGIN) {
                    return Err(Error::InvalidTheta("VAR has a unit root".into()));
                }
            }
            Self::NoncausalAr1 { psi } => {
                if !(psi.abs() < limit) {
                    return Err(Error::InvalidTheta(format!("|psi| = {} must be < 1", psi.abs())));
                }
            }
        }
        Ok(())
    }

    /// Number of observations lost at the start.
    pub fn lags(&self) -> usize {
        match self {
            Self::Mar { phi, .. } => phi.len(),
            Self::Dar1 { .. } => 1,
            Self::Var { coefficients, .. } => coefficients.len(),
            Self::NoncausalAr1 { .. } => 0,
        }
    }

    /// Number of observations lost at the end.
    pub fn leads(&self) -> usize {
        match self {
            Self::Mar { psi, .. } => psi.len(),
            Self::NoncausalAr1 { .. } => 1,
            _ => 0,
        }
    }

    /// Dimension of the observed series.
    pub fn series_dim(&self) -> usize {
        match self {
            Self::Var { m, .. } => *m,
            _ => 1,
        }
    }

    pub fn theta(&self) -> Vec<f64> {
        match self {
            Self::Mar { phi, psi } => phi.iter().chain(psi).copied().collect(),
            Self::Dar1 { w, phi, alpha } => vec![*w, *phi, *alpha],
            Self::Var { coefficients, .. } => coefficients.concat(),
            Self::NoncausalAr1 { psi } => vec![*psi],
        }
    }

    pub fn dim_theta(&self) -> usize {
        match self {
            Self::Mar { phi, psi } => phi.len() + psi.len(),
            Self::Dar1 { .. } => 3,
            Self::Var { m, coefficients } => m * m * coefficients.len(),
            Self::NoncausalAr1 { .. } => 1,
        }
    }

    pub fn param_names(&self) -> Vec<String> {
        match self {
            Self::Mar { phi, psi } => {
                (1..=phi.len()).map(|i| format!("phi{i}")).chain((1..=psi.len()).map(|j| format!("psi{j}"))).collect()
            }
            Self::Dar1 { .. } => vec!["w".into(), "phi".into(), "alpha".into()],
            Self::Var { m, coefficients } => {
                (1..=coefficients.len()).flat_map(|i| (0..m * m).map(move |e| format!("Phi{i}[{},{}]", e % m + 1, e / m + 1))).collect()
            }
            Self::NoncausalAr1 { .. } => vec!["psi".into()],
        }
    }

    /// Same model with a new parameter vector (validated).
    pub fn with_theta(&self, theta: &[f64]) -> Result<Self> {
        if theta.len() != self.dim_theta() {
            return Err(Error::ShapeMismatch(format!("expected {} parameters, got {}", self.dim_theta(), theta.len())));
        }
        let s = self.with_theta_unchecked(theta);
        s.validate()?;
        Ok(s)
    }

    fn with_theta_unchecked(&self, theta: &[f64]) -> Self {
        match self {
            Self::Mar { phi, .. } => Self::Mar { phi: theta[..phi.len()].to_vec(), psi: theta[phi.len()..].to_vec() },
            Self::Dar1 { .. } => Self::Dar1 { w: theta[0], phi: theta[1], alpha: theta[2] },
            Self::Var { m, coefficients } => {
                Self::Var { m: *m, coefficients: theta.chunks(m * m).take(coefficients.len()).map(<[f64]>::to_vec).collect() }
            }
            Self::NoncausalAr1 { .. } => Self::NoncausalAr1 { psi: theta[0] },
        }
    }

    /// Coordinates in which every real vector is an admissible parameter.
    pub fn unconstrained(&self) -> Result<Vec<f64>> {
        let bad = || Error::InvalidTheta("parameter outside the admissible region".into());
        Ok(match self {
            Self::Mar { phi, psi } => {
                let mut z = stationary_to_unconstrained(phi).ok_or_else(bad)?;
                z.extend(stationary_to_unconstrained(psi).ok_or_else(bad)?);
                z
            }
            Self::Dar1 { w, phi, alpha } => {
                if !(*w > 0.0 && *phi >= 0.0 && *alpha >= 0.0) {
                    return Err(bad());
                }
                vec![w.ln(), phi.max(1e-12).ln(), alpha.max(1e-12).ln()]
            }
            Self::Var { .. } => self.theta(),
            Self::NoncausalAr1 { psi } => {
                if !(psi.abs() < 1.0) {
                    return Err(bad());
                }
                vec![psi.atanh()]
            }
        })
    }

    /// Inverse of [`ModelSpec::unconstrained`].
    pub fn from_unconstrained(&self, z: &[f64]) -> Self {
        match self {
            Self::Mar { phi, .. } => {
                let r = phi.len();
                Self::Mar { phi: stationary_from_unconstrained(&z[..r]), psi: stationary_from_unconstrained(&z[r..]) }
            }
            Self::Dar1 { .. } => Self::Dar1 { w: z[0].exp(), phi: z[1].exp(), alpha: z[2].exp() },
            Self::Var { .. } => self.with_theta_unchecked(z),
            Self::NoncausalAr1 { .. } => Self::NoncausalAr1 { psi: z[0].tanh() },
        }
    }

    /// Residual columns `g(y; theta)`; rows `lags()..T-leads()` of the input.
    pub fn residual_columns(&self, y: &TimeSeries) -> Result<Vec<Vec<f64>>> {
        self.validate()?;
        if y.dim() != self.series_dim() {
            return Err(Error::ShapeMismatch(format!("{self} needs {} columns, got {}", self.series_dim(), y.dim())));
        }
        let need = self.lags() + self.leads() + 2;
        if y.len() < need {
            return Err(Error::InsufficientSample { needed: need, got: y.len() });
        }
        Ok(self.raw_residuals(y.columns()))
    }

    /// Residuals without validation; callers guarantee shapes and parameters.
    pub(crate) fn raw_residuals(&self, cols: &[Vec<f64>]) -> Vec<Vec<f64>> {
        match self {
            Self::Mar { phi, psi } => vec![mar_residuals(phi, psi, &cols[0])],
            Self::NoncausalAr1 { psi } => vec![mar_residuals(&[], &[*psi], &cols[0])],
            Self::Dar1 { w, phi, alpha } => vec![other::dar1_residuals(*w, *phi, *alpha, &cols[0])],
            Self::Var { m, coefficients } => other::var_residuals(*m, coefficients, cols),
        }
    }

    /// Simulates `t` observations; `burn = None` picks the default burn-in.
    pub fn simulate(&self, dist: ErrorDistribution, t: usize, burn: Option<usize>, seed: u64) -> Result<Simulation> {
        match self {
            Self::Mar { .. } => simulate_mar(self, dist, t, burn, seed),
            Self::NoncausalAr1 { psi } => simulate_mar(&Self::Mar { phi: vec![], psi: vec![*psi] }, dist, t, burn, seed),
            Self::Dar1 { .. } => other::simulate_dar1(self, dist, t, burn, seed),
            Self::Var { .. } => other::simulate_var(self, dist, t, burn, seed),
        }
    }

    /// Roots of `Phi(z)` and `Psi(z)` for MAR models.
    pub fn mar_roots(&self) -> Option<(Roots, Roots)> {
        match self {
            Self::Mar { phi, psi } => Some((polynomial_roots(phi), polynomial_roots(psi))),
            Self::NoncausalAr1 { psi } => Some((vec![], polynomial_roots(&[*psi]))),
            _ => None,
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Mar { phi, psi } => write!(f, "MAR({},{})", phi.len(), psi.len()),
            Self::Dar1 { .. } => f.write_str("DAR(1)"),
            Self::Var { m, coefficients } => write!(f, "VAR({}) in dimension {m}", coefficients.len()),
            Self::NoncausalAr1 { .. } => f.write_str("noncausal AR(1)"),
        }
    }
}

/// `g(y; theta)` as a series.
pub fn residuals(spec: &ModelSpec, y: &TimeSeries) -> Result<TimeSeries> {
    TimeSeries::from_columns(spec.residual_columns(y)?).map(|s| s.with_origin(format!("{spec} residuals")))
}
