use super::{ModelSpec, Simulation};
use crate::dist::ErrorDistribution;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::series::TimeSeries;

pub(crate) fn dar1_residuals(w: f64, phi: f64, alpha: f64, y: &[f64]) -> Vec<f64> {
    y.windows(2).map(|p| (p[1] - phi * p[0]) / (w + alpha * p[0] * p[0]).sqrt()).collect()
}

pub(crate) fn var_residuals(m: usize, coefficients: &[Vec<f64>], cols: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p = coefficients.len();
    let n = cols[0].len();
    let mut out = vec![Vec::with_capacity(n.saturating_sub(p)); m];
    for t in p..n {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = cols[i][t];
            for (l, phi) in coefficients.iter().enumerate() {
                for j in 0..m {
                    acc -= phi[j * m + i] * cols[j][t - l - 1];
                }
            }
            o.push(acc);
        }
    }
    out
}

pub(crate) fn simulate_dar1(spec: &ModelSpec, dist: ErrorDistribution, t: usize, burn: Option<usize>, seed: u64) -> Result<Simulation> {
    spec.validate()?;
    dist.validate()?;
    let ModelSpec::Dar1 { w, phi, alpha } = *spec else { unreachable!() };
    let burn = burn.unwrap_or(500);
    let mut rng = rng_from_seed(seed);
    let mut u = vec![0.0; t + burn];
    dist.fill(&mut rng, &mut u);
    let mut y = vec![0.0_f64; t + burn];
    for i in 1..t + burn {
        y[i] = phi * y[i - 1] + u[i] * (w + alpha * y[i - 1] * y[i - 1]).sqrt();
        if !y[i].is_finite() {
            return Err(Error::InvalidTheta("DAR(1) path diverged".into()));
        }
    }
    Ok(Simulation {
        series: TimeSeries::from_column(y[burn..].to_vec())?.with_origin("simulated DAR(1)"),
        errors: TimeSeries::from_column(u[burn..].to_vec())?,
        burn,
    })
}

pub(crate) fn simulate_var(spec: &ModelSpec, dist: ErrorDistribution, t: usize, burn: Option<usize>, seed: u64) -> Result<Simulation> {
    spec.validate()?;
    dist.validate()?;
    let ModelSpec::Var { m, coefficients } = spec else { unreachable!() };
    let m = *m;
    let rho = super::var_companion(m, coefficients).complex_eigenvalues().iter().map(|c| c.norm()).fold(0.0, f64::max);
    if rho >= 1.0 {
        return Err(Error::InvalidTheta("simulation supports causal VAR models only".into()));
    }
    let burn = burn.unwrap_or_else(|| if rho > 0.0 { (1e-10f64.ln() / rho.ln()).ceil() as usize } else { 0 });
    let n = t + burn;
    let mut rng = rng_from_seed(seed);
    let mut u = vec![vec![0.0; n]; m];
    for t in 0..n {
        for col in u.iter_mut() {
            col[t] = dist.draw(&mut rng);
        }
    }
    let mut y = u.clone();
    for t in 0..n {
        for (l, phi) in coefficients.iter().enumerate() {
            if t > l {
                for i in 0..m {
                    let mut acc = 0.0;
                    for j in 0..m {
                        acc += phi[j * m + i] * y[j][t - l - 1];
                    }
                    y[i][t] += acc;
                }
            }
        }
    }
    let cut = |v: Vec<Vec<f64>>| v.into_iter().map(|c| c[burn..].to_vec()).collect::<Vec<_>>();
    Ok(Simulation {
        series: TimeSeries::from_columns(cut(y))?.with_origin(format!("simulated {spec}")),
        errors: TimeSeries::from_columns(cut(u))?,
        burn,
    })
}

/// Least-squares coefficient of `y_t` on `y_{t+1}` (no intercept).
pub fn ols_noncausal_ar1(y: &TimeSeries) -> Result<f64> {
    if y.dim() != 1 {
        return Err(Error::ShapeMismatch("OLS needs a single column".into()));
    }
    let x = y.column(0);
    if x.len() < 3 {
        return Err(Error::InsufficientSample { needed: 3, got: x.len() });
    }
    let num: f64 = x.windows(2).map(|p| p[0] * p[1]).sum();
    let den: f64 = x[1..].iter().map(|v| v * v).sum();
    if !(den > 0.0) {
        return Err(Error::DegenerateSeries("zero regressor".into()));
    }
    Ok(num / den)
}
