use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::{mar_residuals, ModelSpec};
use crate::error::{Error, Result};
use crate::optim::{multistart, NelderMeadConfig};
use crate::series::TimeSeries;

/// Settings for the Student-t approximate maximum likelihood estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmlConfig {
    /// Spacing of the starting grid for the leading coefficient of each
    /// polynomial.
    pub grid_step: f64,
    /// Open interval covered by the starting grid.
    pub grid_range: (f64, f64),
    /// Number of best grid points refined by Nelder-Mead.
    pub refine_starts: usize,
    /// Fixed degrees of freedom (`None` estimates `nu > 2`).
    pub nu: Option<f64>,
    /// Fixed scale (`None` estimates it).
    pub scale: Option<f64>,
    /// Degrees of freedom used on the grid when `nu` is free.
    pub nu_start: f64,
    pub optimizer: NelderMeadConfig,
}

impl Default for AmlConfig {
    fn default() -> Self {
        Self {
            grid_step: 0.01,
            grid_range: (0.0, 1.0),
            refine_starts: 2,
            nu: None,
            scale: None,
            nu_start: 5.0,
            optimizer: NelderMeadConfig { max_iter: 600, ftol_abs: 1e-10, ftol_rel: 1e-12, xtol: 1e-7, initial_step: 0.1 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmlFit {
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub nu: f64,
    pub scale: f64,
    pub loglik: f64,
    /// Grid point the winning local search started from.
    pub grid_start: Vec<f64>,
    pub converged: bool,
    pub evaluations: usize,
}

impl AmlFit {
    pub fn spec(&self) -> ModelSpec {
        ModelSpec::Mar { phi: self.phi.clone(), psi: self.psi.clone() }
    }
}

fn t_const(nu: f64) -> f64 {
    ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0) - 0.5 * (nu * std::f64::consts::PI).ln()
}

fn t_loglik(u: &[f64], nu: f64, scale: f64) -> f64 {
    let c = t_const(nu) - scale.ln();
    let k = 0.5 * (nu + 1.0);
    u.iter().map(|v| c - k * (v * v / (scale * scale * nu)).ln_1p()).sum()
}

/// Student-t pseudo log-likelihood `sum ln f(Phi(L) Psi(L^-1) y_t; nu, scale)`.
pub fn aml_loglik(y: &[f64], phi: &[f64], psi: &[f64], nu: f64, scale: f64) -> f64 {
    t_loglik(&mar_residuals(phi, psi, y), nu, scale)
}

/// Scale maximizing the t likelihood for fixed `nu` (EM fixed point).
fn profile_scale(u: &[f64], nu: f64, iters: usize) -> f64 {
    let mut sq: Vec<f64> = u.iter().map(|v| v * v).collect();
    let n = sq.len();
    let mid = n / 2;
    sq.select_nth_unstable_by(mid, f64::total_cmp);
    let mut s2 = (sq[mid] / 0.455).max(1e-300);
    for _ in 0..iters {
        let acc: f64 = u.iter().map(|v| (nu + 1.0) * v * v / (nu + v * v / s2)).sum();
        s2 = (acc / n as f64).max(1e-300);
    }
    s2.sqrt()
}

fn grid_axis(cfg: &AmlConfig) -> Vec<f64> {
    let (lo, hi) = cfg.grid_range;
    let mut v = Vec::new();
    let mut i = 1;
    loop {
        let g = lo + cfg.grid_step * i as f64;
        if g >= hi - 1e-12 {
            break;
        }
        v.push(g);
        i += 1;
    }
    v
}

/// AML for MAR(r, s) with Student-t errors.
///
/// The leading coefficients of `Phi` and `Psi` are scanned over the grid with
/// profiled scale; the best `refine_starts` points then seed Nelder-Mead over
/// all coefficients (stationarity-preserving coordinates), `ln(nu - 2)` and
/// `ln(scale)`. Ties go to the lowest grid index.
pub fn aml_fit(y: &TimeSeries, r: usize, s: usize, cfg: &AmlConfig) -> Result<AmlFit> {
    if y.dim() != 1 {
        return Err(Error::ShapeMismatch("AML needs a single column".into()));
    }
    let x = y.column(0);
    if x.len() <= r + s + 10 {
        return Err(Error::InsufficientSample { needed: r + s + 11, got: x.len() });
    }
    if x.iter().all(|v| *v == x[0]) {
        return Err(Error::DegenerateSeries("constant series".into()));
    }
    if let Some(nu) = cfg.nu {
        if !(nu > 0.0) {
            return Err(Error::InvalidInput("fixed nu must be positive".into()));
        }
    }
    if !(cfg.grid_step > 0.0) || cfg.refine_starts == 0 {
        return Err(Error::InvalidInput("grid step and refine_starts must be positive".into()));
    }
    let nu_grid = cfg.nu.unwrap_or(cfg.nu_start);
    let axis = grid_axis(cfg);
    let (ar, as_) = (if r > 0 { axis.clone() } else { vec![0.0] }, if s > 0 { axis } else { vec![0.0] });
    let mut scored: Vec<(f64, usize, Vec<f64>, Vec<f64>)> = Vec::new();
    for a in &ar {
        for b in &as_ {
            let mut phi = vec![0.0; r];
            let mut psi = vec![0.0; s];
            if r > 0 {
                phi[0] = *a;
            }
            if s > 0 {
                psi[0] = *b;
            }
            let u = mar_residuals(&phi, &psi, x);
            let scale = cfg.scale.unwrap_or_else(|| profile_scale(&u, nu_grid, 4));
            let ll = t_loglik(&u, nu_grid, scale);
            if ll.is_finite() {
                scored.push((ll, scored.len(), phi, psi));
            }
        }
    }
    if scored.is_empty() {
        return Err(Error::AllStartsFailed);
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let template = ModelSpec::Mar { phi: vec![0.0; r], psi: vec![0.0; s] };
    let free_nu = cfg.nu.is_none();
    let free_scale = cfg.scale.is_none();
    let unpack = |z: &[f64]| {
        let p = r + s;
        let spec = template.from_unconstrained(&z[..p]);
        let mut k = p;
        let nu = if free_nu {
            k += 1;
            2.0 + z[k - 1].exp()
        } else {
            nu_grid
        };
        let scale = if free_scale { z[k].exp() } else { cfg.scale.unwrap_or(1.0) };
        (spec, nu, scale)
    };
    let starts: Vec<Vec<f64>> = scored
        .iter()
        .take(cfg.refine_starts)
        .map(|(_, _, phi, psi)| {
            let spec = ModelSpec::Mar { phi: phi.clone(), psi: psi.clone() };
            let mut z = spec.unconstrained().expect("grid points are stationary");
            if free_nu {
                z.push((nu_grid - 2.0).max(0.1).ln());
            }
            if free_scale {
                let u = mar_residuals(phi, psi, x);
                z.push(profile_scale(&u, nu_grid, 4).ln());
            }
            z
        })
        .collect();
    let objective = |z: &[f64]| {
        let (spec, nu, scale) = unpack(z);
        let ModelSpec::Mar { phi, psi } = spec else { unreachable!() };
        -aml_loglik(x, &phi, &psi, nu, scale)
    };
    let (best_idx, best, runs) = multistart(objective, &starts, &cfg.optimizer)?;
    let (spec, nu, scale) = unpack(&best.x);
    let ModelSpec::Mar { phi, psi } = spec else { unreachable!() };
    let (_, _, gphi, gpsi) = &scored[best_idx];
    Ok(AmlFit {
        phi,
        psi,
        nu,
        scale,
        loglik: -best.f,
        grid_start: gphi.iter().chain(gpsi).copied().collect(),
        converged: best.converged,
        evaluations: runs.iter().map(|r| r.evaluations).sum::<usize>() + scored.len(),
    })
}
