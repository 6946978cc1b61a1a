use super::{spectral_radius, ModelSpec, Simulation};
use crate::dist::ErrorDistribution;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::series::TimeSeries;

/// `u_t = Phi(L) Psi(L^-1) y_t` for `t = r..T-s`.
pub fn mar_residuals(phi: &[f64], psi: &[f64], y: &[f64]) -> Vec<f64> {
    let (r, s) = (phi.len(), psi.len());
    let n = y.len();
    if n < r + s + 1 {
        return vec![];
    }
    let w: Vec<f64> = (0..n - s).map(|t| y[t] - psi.iter().enumerate().map(|(j, c)| c * y[t + j + 1]).sum::<f64>()).collect();
    (r..n - s).map(|t| w[t] - phi.iter().enumerate().map(|(i, c)| c * w[t - i - 1]).sum::<f64>()).collect()
}

/// Inverts the MAR filter on a full error path: the noncausal recursion runs
/// backward with zero terminal values, the causal one forward with zero
/// initial values.
pub fn mar_filter(phi: &[f64], psi: &[f64], u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let mut v = vec![0.0; n];
    for t in (0..n).rev() {
        let mut acc = u[t];
        for (j, c) in psi.iter().enumerate() {
            if t + j + 1 < n {
                acc += c * v[t + j + 1];
            }
        }
        v[t] = acc;
    }
    let mut y = vec![0.0; n];
    for t in 0..n {
        let mut acc = v[t];
        for (i, c) in phi.iter().enumerate() {
            if t > i {
                acc += c * y[t - i - 1];
            }
        }
        y[t] = acc;
    }
    y
}

fn max_reciprocal_root(phi: &[f64], psi: &[f64]) -> f64 {
    spectral_radius(phi).max(spectral_radius(psi))
}

/// Upper bound on the automatic burn-in, reached only for roots very close
/// to the unit circle.
pub const MAX_BURN: usize = 100_000;

/// Burn-in so the truncated two-sided tail weight is below `1e-10`.
pub fn default_burn(phi: &[f64], psi: &[f64]) -> usize {
    let rho = max_reciprocal_root(phi, psi);
    if rho <= 0.0 {
        return 0;
    }
    let n = (1e-10f64.ln() / rho.ln()).ceil();
    if n.is_finite() {
        (n as usize).min(MAX_BURN)
    } else {
        MAX_BURN
    }
}

/// Simulates `t` observations of a MAR model on an error path of length
/// `t + 2 burn`, keeping the central block.
pub fn simulate_mar(spec: &ModelSpec, dist: ErrorDistribution, t: usize, burn: Option<usize>, seed: u64) -> Result<Simulation> {
    spec.validate()?;
    dist.validate()?;
    let ModelSpec::Mar { phi, psi } = spec else {
        return Err(Error::InvalidInput(format!("{spec} is not a MAR model")));
    };
    if t < 2 {
        return Err(Error::InsufficientSample { needed: 2, got: t });
    }
    let rho = max_reciprocal_root(phi, psi);
    let burn = burn.unwrap_or_else(|| default_burn(phi, psi));
    let weight = rho.powi(burn as i32);
    if rho > 0.0 && weight > 1e-8 {
        return Err(Error::BurnTooSmall { burn, weight });
    }
    let mut rng = rng_from_seed(seed);
    let mut u = vec![0.0; t + 2 * burn];
    dist.fill(&mut rng, &mut u);
    let y = mar_filter(phi, psi, &u);
    Ok(Simulation {
        series: TimeSeries::from_column(y[burn..burn + t].to_vec())?.with_origin(format!("simulated {spec}")),
        errors: TimeSeries::from_column(u[burn..burn + t].to_vec())?,
        burn,
    })
}

/// Causal and noncausal components `v1 = Phi(L) y` and `v2 = Psi(L^-1) y`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarComponents {
    /// `v1_t` for `t = r..T`.
    pub v1: Vec<f64>,
    /// `v2_t` for `t = 0..T-s`.
    pub v2: Vec<f64>,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub len: usize,
}

impl MarComponents {
    pub fn v1_at(&self, t: usize) -> Option<f64> {
        t.checked_sub(self.phi.len()).and_then(|i| self.v1.get(i).copied())
    }

    pub fn v2_at(&self, t: usize) -> Option<f64> {
        self.v2.get(t).copied()
    }

    /// MAR(1,1) reconstruction `(phi v2_{t-1} + v1_t) / (1 - phi psi)`.
    pub fn reconstruct_from_lag(&self, t: usize) -> Option<f64> {
        let (phi, psi) = self.first_order()?;
        Some((phi * self.v2_at(t.checked_sub(1)?)? + self.v1_at(t)?) / (1.0 - phi * psi))
    }

    /// MAR(1,1) reconstruction `(v2_t + psi v1_{t+1}) / (1 - phi psi)`.
    pub fn reconstruct_from_lead(&self, t: usize) -> Option<f64> {
        let (phi, psi) = self.first_order()?;
        Some((self.v2_at(t)? + psi * self.v1_at(t + 1)?) / (1.0 - phi * psi))
    }

    fn first_order(&self) -> Option<(f64, f64)> {
        let phi = match self.phi.as_slice() {
            [] => 0.0,
            [p] => *p,
            _ => return None,
        };
        let psi = match self.psi.as_slice() {
            [] => 0.0,
            [p] => *p,
            _ => return None,
        };
        Some((phi, psi))
    }
}

pub fn mar_components(y: &TimeSeries, phi: &[f64], psi: &[f64]) -> Result<MarComponents> {
    ModelSpec::mar(phi.to_vec(), psi.to_vec())?;
    if y.dim() != 1 {
        return Err(Error::ShapeMismatch("components need a single column".into()));
    }
    let x = y.column(0);
    let (r, s, n) = (phi.len(), psi.len(), x.len());
    if n <= r + s {
        return Err(Error::InsufficientSample { needed: r + s + 1, got: n });
    }
    let v1 = mar_residuals(phi, &[], x);
    let v2 = mar_residuals(&[], psi, x);
    Ok(MarComponents { v1, v2, phi: phi.to_vec(), psi: psi.to_vec(), len: n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::residuals;

    #[test]
    fn hand_examples() {
        assert_eq!(mar_residuals(&[], &[0.5], &[1.0, 2.0, 4.0]), vec![0.0, 0.0]);
        let y = [1.0, -3.0, 2.0, 7.0];
        assert_eq!(mar_residuals(&[0.0], &[0.0], &y), vec![-3.0, 2.0]);
    }

    #[test]
    fn round_trip_mar11() {
        let spec = ModelSpec::mar(vec![0.2], vec![0.8]).unwrap();
        let sim = simulate_mar(&spec, ErrorDistribution::Laplace, 400, None, 7).unwrap();
        let u = residuals(&spec, &sim.series).unwrap();
        let e = &sim.errors.column(0)[1..399];
        for (a, b) in u.column(0).iter().zip(e) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn causal_case_matches_forward_recursion() {
        let spec = ModelSpec::mar(vec![0.5, 0.2], vec![]).unwrap();
        let sim = simulate_mar(&spec, ErrorDistribution::Uniform, 100, None, 3).unwrap();
        let (y, u) = (sim.series.column(0), sim.errors.column(0));
        for t in 2..100 {
            assert!((y[t] - 0.5 * y[t - 1] - 0.2 * y[t - 2] - u[t]).abs() < 1e-10);
        }
    }

    #[test]
    fn burn_checks() {
        let spec = ModelSpec::mar(vec![], vec![0.9]).unwrap();
        assert_eq!(default_burn(&[], &[0.9]), 219);
        assert!(matches!(simulate_mar(&spec, ErrorDistribution::Uniform, 50, Some(10), 1), Err(Error::BurnTooSmall { .. })));
        assert_eq!(default_burn(&[], &[]), 0);
    }

    #[test]
    fn impulse_response_shape() {
        let (phi, psi) = (0.3, 0.8);
        let mut u = vec![0.0; 81];
        u[40] = 1.0;
        let y = mar_filter(&[phi], &[psi], &u);
        for t in 30..40 {
            assert!((y[t + 1] / y[t] - 1.0 / psi).abs() < 1e-12);
        }
        for t in 40..50 {
            assert!((y[t + 1] / y[t] - phi).abs() < 1e-12);
        }
    }

    #[test]
    fn components_reconstruct() {
        let spec = ModelSpec::mar(vec![0.41], vec![0.87]).unwrap();
        let sim = simulate_mar(&spec, ErrorDistribution::StudentT { nu: 4.0 }, 300, None, 9).unwrap();
        let c = mar_components(&sim.series, &[0.41], &[0.87]).unwrap();
        let y = sim.series.column(0);
        for (t, &yt) in y.iter().enumerate().take(299).skip(1) {
            assert!((c.reconstruct_from_lag(t).unwrap() - yt).abs() < 1e-8 * yt.abs().max(1.0));
            assert!((c.reconstruct_from_lead(t).unwrap() - yt).abs() < 1e-8 * yt.abs().max(1.0));
        }
        let c0 = mar_components(&sim.series, &[0.0], &[0.87]).unwrap();
        assert_eq!(&c0.v1[..], &y[1..]);
    }
}
