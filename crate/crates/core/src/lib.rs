//! Portmanteau tests for nonlinear serial dependence, GCov estimation and
//! specification testing, bootstrap inference and causal-noncausal models.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod autocov;
pub mod basis;
pub mod bootstrap;
pub mod dist;
pub mod error;
pub mod gcov;
pub mod linalg;
pub mod mc;
pub mod models;
pub mod nlsd;
pub mod optim;
pub mod report;
pub mod rng;
pub mod series;

pub use autocov::{portmanteau, r_squared_trace, sample_autocov, AutocovStack, PortmanteauValue};
pub use dist::{
    chi2_cdf, chi2_quantile, ks_normality_statistic, marcum_q, noncentral_chi2_cdf, sample, ErrorDistribution, KsNormality,
    NoncentralChiSquare,
};
pub use error::{Error, Result};
pub use gcov::{gcov_fit, gcov_objective, gcov_spec_test, GcovConfig, GcovFit};
pub use models::{residuals, ModelSpec};
pub use nlsd::{nlsd_statistic, nlsd_test};
pub use report::{ConfigEcho, TestMethod, TestReport};
pub use rng::derive_seed;
pub use series::{apply_transforms, detrend_polynomial, TimeSeries, Transform, TransformKind, TransformSet};
