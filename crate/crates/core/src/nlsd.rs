//! The NLSD test: portmanteau statistic on a transformed series against
//! `chi2(K^2 H)`.

use crate::autocov::{portmanteau_columns, PortmanteauValue};
use crate::error::Result;
use crate::report::{check_alpha, ConfigEcho, TestMethod, TestReport};
use crate::series::{TimeSeries, TransformSet};

/// Transformed-series portmanteau value; the building block of [`nlsd_test`].
pub fn nlsd_statistic(series: &TimeSeries, ts: &TransformSet, h: usize) -> Result<PortmanteauValue> {
    let cols: Vec<&[f64]> = series.columns().iter().map(Vec::as_slice).collect();
    let transformed = ts.apply_columns(&cols, 0)?;
    portmanteau_columns(&transformed, h)
}

pub fn nlsd_test(series: &TimeSeries, ts: &TransformSet, h: usize, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    let p = nlsd_statistic(series, ts, h)?;
    let df = (p.k * p.k * h) as f64;
    let config = ConfigEcho { transforms: ts.descriptors(), h, t: p.t, k: p.k, ..Default::default() };
    TestReport::chi_square(TestMethod::Nlsd, p.statistic, df, alpha, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{sample, ErrorDistribution};
    use crate::error::Error;

    #[test]
    fn df_and_critical_value() {
        let x = TimeSeries::from_column(sample(ErrorDistribution::Laplace, 228, 1).unwrap()).unwrap();
        let r = nlsd_test(&x, &TransformSet::linear_and_square(), 9, 0.05).unwrap();
        assert_eq!(r.df, Some(36.0));
        assert!((r.critical_value - 50.99).abs() < 0.01);
        assert_eq!(r.config.k, 2);
    }

    #[test]
    fn degenerate_transform_is_an_error() {
        let x = TimeSeries::from_column(vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0]).unwrap();
        let e = nlsd_test(&x, &TransformSet::linear_and_square(), 1, 0.05).unwrap_err();
        assert_eq!(e, Error::DegenerateColumn(1));
    }

    #[test]
    fn squared_dependence_is_detected() {
        // ARCH-type data: linear autocorrelation absent, squares dependent.
        let e = sample(ErrorDistribution::Gaussian, 2000, 5).unwrap();
        let mut y = vec![0.0_f64; e.len()];
        for t in 1..e.len() {
            y[t] = e[t] * (0.2 + 0.7 * y[t - 1] * y[t - 1]).sqrt();
        }
        let x = TimeSeries::from_column(y).unwrap();
        let lin = nlsd_test(&x, &TransformSet::parse_list("identity").unwrap(), 1, 0.05).unwrap();
        let both = nlsd_test(&x, &TransformSet::linear_and_square(), 1, 0.05).unwrap();
        assert!(both.reject);
        assert!(both.statistic > 10.0 * lin.statistic);
    }
}
