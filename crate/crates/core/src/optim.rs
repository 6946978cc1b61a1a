//! Derivative-free minimization: Nelder-Mead, deterministic multi-start and
//! the reparameterizations that keep autoregressive polynomials stationary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadConfig {
    pub max_iter: usize,
    /// Stop when the spread of simplex values is below
    /// `ftol_abs + ftol_rel * |f_best|` and the simplex diameter below `xtol`.
    pub ftol_abs: f64,
    pub ftol_rel: f64,
    pub xtol: f64,
    pub initial_step: f64,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self { max_iter: 2000, ftol_abs: 1e-12, ftol_rel: 1e-10, xtol: 1e-8, initial_step: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

fn clean(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Minimizes `f` from `x0`. Non-finite values act as `+inf`, so infeasible
/// points are simply never accepted.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], cfg: &NelderMeadConfig) -> OptimResult {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        clean(f(x))
    };
    if n == 0 {
        let v = eval(x0, &mut evals);
        return OptimResult { x: vec![], f: v, iterations: 0, evaluations: evals, converged: true };
    }
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += if p[i].abs() > 1e-3 { cfg.initial_step * p[i].abs().max(1.0) } else { cfg.initial_step };
        simplex.push(p);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|p| eval(p, &mut evals)).collect();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut converged = false;
    let mut iter = 0;
    while iter < cfg.max_iter {
        iter += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let best = vals[0];
        let worst = vals[n];
        let diam =
            simplex[1..].iter().map(|p| p.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)).fold(0.0, f64::max);
        if best.is_finite() && (worst - best).abs() <= cfg.ftol_abs + cfg.ftol_rel * best.abs() && diam <= cfg.xtol {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for p in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / n as f64;
            }
        }
        let towards = |coef: f64| -> Vec<f64> { centroid.iter().zip(&simplex[n]).map(|(c, w)| c + coef * (c - w)).collect() };
        let xr = towards(alpha);
        let fr = eval(&xr, &mut evals);
        if fr < vals[0] {
            let xe = towards(gamma);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                simplex[n] = xe;
                vals[n] = fe;
            } else {
                simplex[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            simplex[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[n] {
            let xc = towards(rho);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = towards(-rho);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < vals[n].min(fr) {
            simplex[n] = xc;
            vals[n] = fc;
            continue;
        }
        for i in 1..=n {
            let p: Vec<f64> = simplex[0].iter().zip(&simplex[i]).map(|(b, x)| b + sigma * (x - b)).collect();
            vals[i] = eval(&p, &mut evals);
            simplex[i] = p;
        }
    }
    let (ib, fb) =
        vals.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0))).map(|(i, v)| (i, *v)).expect("non-empty simplex");
    OptimResult { x: simplex[ib].clone(), f: fb, iterations: iter, evaluations: evals, converged }
}

/// Runs Nelder-Mead from every start and keeps the lowest value; ties go to
/// the lowest start index.
pub fn multistart<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    starts: &[Vec<f64>],
    cfg: &NelderMeadConfig,
) -> Result<(usize, OptimResult, Vec<OptimResult>)> {
    if starts.is_empty() {
        return Err(Error::InvalidInput("no starting values".into()));
    }
    let runs: Vec<OptimResult> = starts.iter().map(|s| nelder_mead(&mut f, s, cfg)).collect();
    let (best, _) = runs
        .iter()
        .enumerate()
        .filter(|(_, r)| r.f.is_finite())
        .min_by(|a, b| a.1.f.total_cmp(&b.1.f).then(a.0.cmp(&b.0)))
        .ok_or(Error::AllStartsFailed)?;
    Ok((best, runs[best].clone(), runs))
}

/// Maps unconstrained reals to the coefficients `a_1..a_p` of a polynomial
/// `1 - a_1 z - ... - a_p z^p` with all roots outside the unit circle
/// (partial autocorrelations `tanh(z_k)` through the Durbin-Levinson
/// recursion).
pub fn stationary_from_unconstrained(z: &[f64]) -> Vec<f64> {
    let mut a: Vec<f64> = Vec::with_capacity(z.len());
    for (k, zk) in z.iter().enumerate() {
        let r = zk.tanh().clamp(-1.0 + 1e-15, 1.0 - 1e-15);
        let prev = a.clone();
        for j in 0..k {
            a[j] = prev[j] - r * prev[k - 1 - j];
        }
        a.push(r);
    }
    a
}

/// Inverse of [`stationary_from_unconstrained`]; `None` if the polynomial is
/// not stationary.
pub fn stationary_to_unconstrained(a: &[f64]) -> Option<Vec<f64>> {
    let p = a.len();
    let mut cur = a.to_vec();
    let mut z = vec![0.0; p];
    for k in (0..p).rev() {
        let r = cur[k];
        if !(r.abs() < 1.0) {
            return None;
        }
        z[k] = r.atanh();
        let denom = 1.0 - r * r;
        let prev: Vec<f64> = (0..k).map(|j| (cur[j] + r * cur[k - 1 - j]) / denom).collect();
        cur = prev;
    }
    Some(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let cfg = NelderMeadConfig { max_iter: 10_000, ..Default::default() };
        let r = nelder_mead(f, &[-1.2, 1.0], &cfg);
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5, "{:?}", r.x);
    }

    #[test]
    fn infeasible_region_is_avoided() {
        let f = |x: &[f64]| if x[0] < 0.5 { f64::NAN } else { (x[0] - 0.7).powi(2) };
        let r = nelder_mead(f, &[0.9], &NelderMeadConfig::default());
        assert!((r.x[0] - 0.7).abs() < 1e-6);
    }

    #[test]
    fn multistart_tie_break_and_failure() {
        let f = |x: &[f64]| (x[0] * x[0] - 1.0).powi(2);
        let (i, best, _) = multistart(f, &[vec![-2.0], vec![2.0]], &NelderMeadConfig::default()).unwrap();
        assert!(best.f < 1e-12);
        assert_eq!(i, 0);
        let g = |_: &[f64]| f64::INFINITY;
        assert_eq!(multistart(g, &[vec![0.0]], &NelderMeadConfig::default()).unwrap_err(), Error::AllStartsFailed);
    }

    #[test]
    fn ar2_map_known_values() {
        // PACF (0.5, 0.2): a2 = 0.2, a1 = 0.5 - 0.2 * 0.5 = 0.4.
        let a = stationary_from_unconstrained(&[0.5f64.atanh(), 0.2f64.atanh()]);
        assert!((a[0] - 0.4).abs() < 1e-14 && (a[1] - 0.2).abs() < 1e-14);
        assert!(stationary_to_unconstrained(&[0.5, 0.6]).is_none());
    }

    proptest! {
        #[test]
        fn reparameterization_round_trip(z in proptest::collection::vec(-3.0f64..3.0, 1..5)) {
            let a = stationary_from_unconstrained(&z);
            let back = stationary_to_unconstrained(&a).unwrap();
            for (x, y) in z.iter().zip(&back) {
                prop_assert!((x - y).abs() < 1e-7);
            }
            // Reciprocal roots lie inside the unit disc.
            let rho = crate::models::spectral_radius(&a);
            prop_assert!(rho < 1.0);
        }
    }
}
