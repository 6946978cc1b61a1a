//! Sample autocovariances, multivariate R-square traces and the raw
//! portmanteau statistic.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::sym_inv_sqrt;
use crate::series::TimeSeries;

/// `Gamma(0..=H)` of a K-variate series, each centred with full-sample means
/// and divided by `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct AutocovStack {
    pub gamma: Vec<DMatrix<f64>>,
    pub t: usize,
    pub k: usize,
    pub h: usize,
}

/// Portmanteau statistic `T * sum_h Tr R^2(h)` with its per-lag terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortmanteauValue {
    pub statistic: f64,
    pub per_lag: Vec<f64>,
    pub h: usize,
    pub k: usize,
    pub t: usize,
}

fn is_degenerate(var: f64, mean: f64) -> bool {
    !(var > 1e-24 * mean * mean) || var == 0.0
}

/// Builds the stack from column slices (time-major entries of each column).
pub fn autocov_columns<C: AsRef<[f64]>>(columns: &[C], h: usize) -> Result<AutocovStack> {
    let k = columns.len();
    if k == 0 {
        return Err(Error::InvalidInput("no columns".into()));
    }
    if h == 0 {
        return Err(Error::InvalidInput("maximum lag H must be at least 1".into()));
    }
    let t = columns[0].as_ref().len();
    if columns.iter().any(|c| c.as_ref().len() != t) {
        return Err(Error::ShapeMismatch("columns of unequal length".into()));
    }
    if t <= h + 1 {
        return Err(Error::InsufficientSample { needed: h + 2, got: t });
    }
    let tf = t as f64;
    let mut centred = Vec::with_capacity(k);
    for (j, c) in columns.iter().enumerate() {
        let c = c.as_ref();
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("column {j} has non-finite values")));
        }
        let mean = c.iter().sum::<f64>() / tf;
        let x: Vec<f64> = c.iter().map(|v| v - mean).collect();
        let var = x.iter().map(|v| v * v).sum::<f64>() / tf;
        if is_degenerate(var, mean) {
            return Err(Error::DegenerateColumn(j));
        }
        centred.push(x);
    }
    let mut gamma = Vec::with_capacity(h + 1);
    for lag in 0..=h {
        let mut g = DMatrix::zeros(k, k);
        for i in 0..k {
            let lead = &centred[i][lag..];
            for j in 0..k {
                if lag == 0 && j < i {
                    g[(i, j)] = g[(j, i)];
                    continue;
                }
                let lagged = &centred[j][..t - lag];
                g[(i, j)] = lead.iter().zip(lagged).map(|(a, b)| a * b).sum::<f64>() / tf;
            }
        }
        gamma.push(g);
    }
    Ok(AutocovStack { gamma, t, k, h })
}

/// `Gamma(h) = (1/T) sum_t x_t x_{t-h}'` of the centred series, `h = 0..=H`.
pub fn sample_autocov(x: &TimeSeries, h: usize) -> Result<AutocovStack> {
    autocov_columns(x.columns(), h)
}

impl AutocovStack {
    /// `Tr R^2(h)` for `h = 1..=H`, using one inverse square root of
    /// `Gamma(0)`. `ridge` enables the `1e-10 * trace / K` regularization.
    pub fn r_squared_traces(&self, ridge: bool) -> Result<Vec<f64>> {
        let s = sym_inv_sqrt(&self.gamma[0], ridge)?;
        Ok(self.gamma[1..]
            .iter()
            .map(|g| {
                let m = &s * g * &s;
                m.norm_squared()
            })
            .collect())
    }

    /// Same traces with `Gamma(0)` replaced by its diagonal.
    pub fn r_squared_traces_diagonal(&self) -> Vec<f64> {
        let d: Vec<f64> = (0..self.k).map(|i| self.gamma[0][(i, i)]).collect();
        self.gamma[1..]
            .iter()
            .map(|g| {
                let mut acc = 0.0;
                for i in 0..self.k {
                    for j in 0..self.k {
                        acc += g[(i, j)] * g[(i, j)] / (d[i] * d[j]);
                    }
                }
                acc
            })
            .collect()
    }
}

/// `Tr[Gamma(h) Gamma(0)^-1 Gamma(h)' Gamma(0)^-1]` for one lag `1 <= h <= H`.
pub fn r_squared_trace(stack: &AutocovStack, h: usize) -> Result<f64> {
    if h == 0 || h > stack.h {
        return Err(Error::InvalidInput(format!("lag {h} outside 1..={}", stack.h)));
    }
    let s = sym_inv_sqrt(&stack.gamma[0], false)?;
    Ok((&s * &stack.gamma[h] * &s).norm_squared())
}

pub fn portmanteau_columns<C: AsRef<[f64]>>(columns: &[C], h: usize) -> Result<PortmanteauValue> {
    let stack = autocov_columns(columns, h)?;
    let per_lag = stack.r_squared_traces(false)?;
    let statistic = stack.t as f64 * per_lag.iter().sum::<f64>();
    Ok(PortmanteauValue { statistic, per_lag, h, k: stack.k, t: stack.t })
}

/// `T * sum_{h=1}^{H} Tr R^2(h)`.
pub fn portmanteau(x: &TimeSeries, h: usize) -> Result<PortmanteauValue> {
    portmanteau_columns(x.columns(), h)
}
