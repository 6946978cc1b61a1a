//! Test reports shared by the NLSD, GCov, bootstrap and many-transformation
//! tests.

use serde::{Deserialize, Serialize};

use crate::dist::{chi2_quantile, chi2_sf, normal_cdf, normal_quantile};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestMethod {
    Nlsd,
    GcovSpec,
    Bootstrap,
    ManyTransform,
}

/// Normal standardization `z = (xi - center) / scale` used instead of a
/// chi-square law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalStandardization {
    pub xi: f64,
    pub center: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub transforms: Vec<String>,
    pub h: usize,
    pub t: usize,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim_theta: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap_replicates: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub method: TestMethod,
    pub statistic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub df: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standardization: Option<NormalStandardization>,
    pub critical_value: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub reject: bool,
    pub config: ConfigEcho,
}

pub fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("alpha {alpha} must lie in (0, 1)")))
    }
}

impl TestReport {
    /// Report against a central chi-square law with `df` degrees of freedom.
    pub fn chi_square(method: TestMethod, statistic: f64, df: f64, alpha: f64, config: ConfigEcho) -> Result<Self> {
        check_alpha(alpha)?;
        if !(df > 0.0) {
            return Err(Error::DfNonPositive(df as i64));
        }
        let critical_value = chi2_quantile(df, 1.0 - alpha);
        Ok(Self {
            method,
            statistic,
            df: Some(df),
            standardization: None,
            critical_value,
            p_value: chi2_sf(statistic, df),
            alpha,
            reject: statistic > critical_value,
            config,
        })
    }

    /// One-sided normal test on `z = (xi - center) / scale`.
    pub fn normal(method: TestMethod, xi: f64, center: f64, scale: f64, alpha: f64, config: ConfigEcho) -> Result<Self> {
        check_alpha(alpha)?;
        let z = (xi - center) / scale;
        let critical_value = normal_quantile(1.0 - alpha);
        Ok(Self {
            method,
            statistic: z,
            df: None,
            standardization: Some(NormalStandardization { xi, center, scale }),
            critical_value,
            p_value: 1.0 - normal_cdf(z),
            alpha,
            reject: z > critical_value,
            config,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_square_report_is_consistent() {
        let r = TestReport::chi_square(TestMethod::Nlsd, 1675.4, 36.0, 0.05, ConfigEcho::default()).unwrap();
        assert!((r.critical_value - 50.998).abs() < 0.01);
        assert!(r.reject && r.p_value < 1e-12);
        let r = TestReport::chi_square(TestMethod::GcovSpec, 22.32, 34.0, 0.05, ConfigEcho::default()).unwrap();
        assert!(!r.reject);
        assert!((r.p_value - (1.0 - crate::dist::chi2_cdf(22.32, 34.0))).abs() < 1e-12);
        assert_eq!(r.reject, r.p_value < r.alpha);
    }

    #[test]
    fn bad_alpha_and_df() {
        assert!(TestReport::chi_square(TestMethod::Nlsd, 1.0, 4.0, 1.0, ConfigEcho::default()).is_err());
        assert!(TestReport::chi_square(TestMethod::Nlsd, 1.0, 0.0, 0.05, ConfigEcho::default()).is_err());
    }

    #[test]
    fn normal_report() {
        let r = TestReport::normal(TestMethod::ManyTransform, 243.0, 243.0, 22.0, 0.05, ConfigEcho::default()).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 0.5).abs() < 1e-12);
        assert!(!r.reject);
    }

    #[test]
    fn json_round_trip() {
        let r = TestReport::chi_square(TestMethod::Nlsd, 3.0, 4.0, 0.05, ConfigEcho::default()).unwrap();
        let back: TestReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
