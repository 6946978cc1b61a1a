//! Seeded Monte Carlo harness: scenarios, table presets, rejection rates
//! with standard errors and size-adjusted power.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::basis::{many_transform_test, GeneratorGrid, ManyTransformConfig};
use crate::bootstrap::{bootstrap_test, nearest_rank, BootstrapConfig, Estimator, RebuildMode};
use crate::dist::{chi2_quantile, normal_quantile, ErrorDistribution};
use crate::error::{Error, Result};
use crate::gcov::{gcov_fit, GcovConfig};
use crate::models::{AmlConfig, ModelSpec};
use crate::nlsd::nlsd_statistic;
use crate::rng::derive_seed;
use crate::series::TransformSet;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "NLSD_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    NlsdSize,
    NlsdPowerFixed,
    NlsdPowerLocal,
    GcovSize,
    GcovPowerFixed,
    GcovPowerLocal,
    BootstrapSizePower,
    ManyTransformSizePower,
    CauchySuite,
}

impl Scenario {
    fn family(self) -> Family {
        match self {
            Self::NlsdSize | Self::NlsdPowerFixed | Self::NlsdPowerLocal => Family::Nlsd,
            Self::GcovSize | Self::GcovPowerFixed | Self::GcovPowerLocal | Self::CauchySuite => Family::Gcov,
            Self::BootstrapSizePower => Family::Bootstrap,
            Self::ManyTransformSizePower => Family::ManyTransform,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Nlsd,
    Gcov,
    Bootstrap,
    ManyTransform,
}

/// A coefficient fixed in advance or drifting as `delta / sqrt(T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coef {
    Fixed(f64),
    Local { delta: f64 },
}

impl Coef {
    pub fn at(self, t: usize) -> f64 {
        match self {
            Coef::Fixed(v) => v,
            Coef::Local { delta } => delta / (t as f64).sqrt(),
        }
    }
}

impl Default for Coef {
    fn default() -> Self {
        Coef::Fixed(0.0)
    }
}

/// One table row: the data-generating MAR(1,1) coefficients (a zero causal
/// coefficient gives MAR(0,1), both zero give i.i.d. noise).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowSpec {
    pub label: String,
    #[serde(default)]
    pub phi: Coef,
    #[serde(default)]
    pub psi: Coef,
    /// Null coefficients `(phi, psi)` for size adjustment; absent for size
    /// rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<(f64, f64)>,
    /// Generator count for the many-transformation test.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<usize>,
}

impl RowSpec {
    pub fn size(label: impl Into<String>, phi: f64, psi: f64) -> Self {
        Self { label: label.into(), phi: Coef::Fixed(phi), psi: Coef::Fixed(psi), reference: None, k: None, h: None }
    }

    pub fn power(label: impl Into<String>, phi: Coef, psi: Coef, reference: (f64, f64)) -> Self {
        Self { label: label.into(), phi, psi, reference: Some(reference), k: None, h: None }
    }
}

fn dgp(phi: f64, psi: f64) -> Result<ModelSpec> {
    if phi == 0.0 {
        ModelSpec::mar(vec![], vec![psi])
    } else {
        ModelSpec::mar(vec![phi], vec![psi])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorChoice {
    Gcov,
    Aml,
    Ols,
}

/// Complete description of a Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub rows: Vec<RowSpec>,
    /// Error laws, e.g. `uniform`, `laplace`, `t:5`, `cauchy`.
    pub dists: Vec<String>,
    pub t: Vec<usize>,
    pub reps: usize,
    pub alpha: f64,
    pub seed: u64,
    pub h: usize,
    /// Transform descriptors; unused by the many-transformation scenario.
    #[serde(default)]
    pub transforms: Vec<String>,
    /// Bootstrap replicates per sample.
    #[serde(default = "default_s")]
    pub s: usize,
    #[serde(default = "default_true")]
    pub with_replacement: bool,
    #[serde(default = "default_estimator")]
    pub estimator: EstimatorChoice,
    /// Exponential weight of the many-transformation generators.
    #[serde(default = "default_weight")]
    pub weight: f64,
    /// Re-minimize the many-transformation statistic over theta.
    #[serde(default = "default_true")]
    pub refit: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

fn default_s() -> usize {
    100
}
fn default_true() -> bool {
    true
}
fn default_estimator() -> EstimatorChoice {
    EstimatorChoice::Gcov
}
fn default_weight() -> f64 {
    0.01
}

const DISTS3: [&str; 3] = ["uniform", "laplace", "t:5"];

impl ExperimentConfig {
    fn base(scenario: Scenario, rows: Vec<RowSpec>, dists: &[&str], t: &[usize], reps: usize, h: usize, transforms: &[&str]) -> Self {
        Self {
            scenario,
            rows,
            dists: dists.iter().map(|s| s.to_string()).collect(),
            t: t.to_vec(),
            reps,
            alpha: 0.05,
            seed: 20_240_601,
            h,
            transforms: transforms.iter().map(|s| s.to_string()).collect(),
            s: default_s(),
            with_replacement: true,
            estimator: EstimatorChoice::Gcov,
            weight: default_weight(),
            refit: true,
            workers: None,
        }
    }

    /// Names accepted by [`ExperimentConfig::preset`].
    pub const PRESETS: [&'static str; 8] = ["table1", "table2", "table3b", "table5", "table9", "table11", "figure2", "figure3"];

    /// Parameter grids of the published tables and figures at full scale.
    pub fn preset(name: &str) -> Result<Self> {
        let lin_sq = ["identity", "power:2"];
        let t3 = [100, 200, 500];
        let cfg = match name {
            "table1" => {
                let rows = vec![
                    RowSpec::size("gamma=0", 0.0, 0.0),
                    RowSpec::power("gamma=0.3", Coef::Fixed(0.0), Coef::Fixed(0.3), (0.0, 0.0)),
                    RowSpec::power("gamma=0.7", Coef::Fixed(0.0), Coef::Fixed(0.7), (0.0, 0.0)),
                ];
                Self::base(Scenario::NlsdPowerFixed, rows, &DISTS3, &t3, 5000, 1, &lin_sq)
            }
            "figure2" => {
                let rows = (0..10)
                    .map(|i| {
                        let d = i as f64 / 10.0;
                        RowSpec::power(format!("delta={d}"), Coef::Fixed(0.0), Coef::Local { delta: d }, (0.0, 0.0))
                    })
                    .collect();
                Self::base(Scenario::NlsdPowerLocal, rows, &DISTS3, &t3, 5000, 1, &lin_sq)
            }
            "table2" => {
                let rows = vec![
                    RowSpec::size("S phi=0 psi=0.3", 0.0, 0.3),
                    RowSpec::size("S phi=0 psi=0.7", 0.0, 0.7),
                    RowSpec::power("P phi=0.8 psi=0.3", Coef::Fixed(0.8), Coef::Fixed(0.3), (0.0, 0.3)),
                    RowSpec::power("P phi=0.8 psi=0.7", Coef::Fixed(0.8), Coef::Fixed(0.7), (0.0, 0.7)),
                ];
                Self::base(Scenario::GcovPowerFixed, rows, &DISTS3, &t3, 5000, 3, &lin_sq)
            }
            "figure3" => {
                let mut rows = Vec::new();
                for psi in [0.3, 0.7] {
                    for i in 0..10 {
                        let d = i as f64 / 10.0;
                        rows.push(RowSpec::power(format!("psi={psi} delta={d}"), Coef::Local { delta: d }, Coef::Fixed(psi), (0.0, psi)));
                    }
                }
                Self::base(Scenario::GcovPowerLocal, rows, &DISTS3, &[500], 5000, 3, &lin_sq)
            }
            "table3b" => {
                let rows = vec![
                    RowSpec::size("S phi=0 psi=0.3", 0.0, 0.3),
                    RowSpec::size("S phi=0 psi=0.7", 0.0, 0.7),
                    RowSpec::size("P phi=0.8 psi=0.3", 0.8, 0.3),
                    RowSpec::size("P phi=0.8 psi=0.7", 0.8, 0.7),
                ];
                let mut c = Self::base(Scenario::BootstrapSizePower, rows, &["t:4", "t:5", "t:6"], &t3, 1000, 3, &lin_sq);
                c.estimator = EstimatorChoice::Aml;
                c
            }
            "table11" => {
                let rows = vec![
                    RowSpec::size("S phi=0 psi=0.3", 0.0, 0.3),
                    RowSpec::size("S phi=0 psi=0.7", 0.0, 0.7),
                    RowSpec::size("P phi=0.8 psi=0.3", 0.8, 0.3),
                    RowSpec::size("P phi=0.8 psi=0.7", 0.8, 0.7),
                ];
                Self::base(Scenario::BootstrapSizePower, rows, &DISTS3, &t3, 1000, 3, &lin_sq)
            }
            "table5" => {
                let mut rows = Vec::new();
                for h in [3, 4, 5] {
                    for k in [7, 8, 9] {
                        for psi in [0.3, 0.7] {
                            let mut r = RowSpec::size(format!("H={h} K={k} psi={psi}"), 0.0, psi);
                            r.k = Some(k);
                            r.h = Some(h);
                            rows.push(r);
                        }
                    }
                }
                Self::base(Scenario::ManyTransformSizePower, rows, &["t:5"], &[500], 1000, 3, &[])
            }
            "table9" => {
                let rows = vec![
                    RowSpec::size("S psi=0.3", 0.0, 0.3),
                    RowSpec::size("S psi=0.7", 0.0, 0.7),
                    RowSpec::power("P phi=0.8 psi=0.3", Coef::Fixed(0.8), Coef::Fixed(0.3), (0.0, 0.3)),
                    RowSpec::power("P phi=0.8 psi=0.7", Coef::Fixed(0.8), Coef::Fixed(0.7), (0.0, 0.7)),
                ];
                Self::base(Scenario::CauchySuite, rows, &["cauchy"], &[100, 200, 300, 400, 500], 5000, 3, &CAUCHY_TRANSFORMS)
            }
            other => return Err(Error::InvalidInput(format!("unknown preset `{other}`; expected one of {:?}", Self::PRESETS))),
        };
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct WithPreset {
            preset: Option<String>,
            #[serde(flatten)]
            rest: toml::Table,
        }
        let raw: WithPreset = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let merged = match raw.preset {
            Some(p) => {
                let base = toml::Table::try_from(Self::preset(&p)?).map_err(|e| Error::Parse(e.to_string()))?;
                let mut merged = base;
                merged.extend(raw.rest);
                merged
            }
            None => raw.rest,
        };
        let cfg: Self = merged.try_into().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidInput(format!("alpha {} must lie in (0, 1)", self.alpha)));
        }
        if self.reps == 0 || self.t.is_empty() || self.dists.is_empty() || self.rows.is_empty() {
            return Err(Error::InvalidInput("reps, t, dists and rows must be non-empty".into()));
        }
        if self.h == 0 {
            return Err(Error::InvalidInput("H must be at least 1".into()));
        }
        for d in &self.dists {
            d.parse::<ErrorDistribution>()?;
        }
        if self.scenario.family() != Family::ManyTransform {
            TransformSet::parse_list(&self.transforms.join(","))?;
        }
        if self.scenario.family() == Family::Bootstrap && self.s == 0 {
            return Err(Error::InvalidInput("bootstrap replicates s must be at least 1".into()));
        }
        for r in &self.rows {
            dgp(r.phi.at(self.t[0]), r.psi.at(self.t[0]))?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn fingerprint(&self) -> String {
        hex(&Sha256::digest(serde_json::to_vec(self).expect("config serializes")))
    }
}

/// Residuals, square roots and logs of absolute residuals.
pub const CAUCHY_TRANSFORMS: [&str; 3] = ["identity", "abs-power:0.5", "log-abs"];

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// One table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub row: String,
    pub dist: String,
    pub t: usize,
    /// `size`, `power` or `size-adjusted power`.
    pub measure: String,
    pub rate: f64,
    /// `sqrt(p (1 - p) / n)`.
    pub se: f64,
    /// Replications that produced a statistic.
    pub n: usize,
    pub failed: usize,
    /// Critical value used (size-adjusted cells: the null 95th percentile).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical_value: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub cells: Vec<CellResult>,
}

/// Per-replication outcome: a statistic and its nominal decision.
#[derive(Debug, Clone, Copy)]
struct Draw {
    stat: f64,
    reject: bool,
}

struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    ts: Option<TransformSet>,
    null_template: ModelSpec,
}

fn stream_seed(base: u64, tag: &str) -> u64 {
    let d = Sha256::digest(tag.as_bytes());
    derive_seed(base, u64::from_le_bytes(d[..8].try_into().expect("8 bytes")))
}

impl<'a> Runner<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        let ts = match cfg.scenario.family() {
            Family::ManyTransform => None,
            _ => Some(TransformSet::parse_list(&cfg.transforms.join(","))?),
        };
        Ok(Self { cfg, ts, null_template: ModelSpec::mar(vec![], vec![0.5])? })
    }

    /// Draws for `reps` samples from `MAR(phi, psi)`; sample `i` of a cell
    /// uses `derive_seed(cell_seed, i)`.
    fn draws(&self, phi: f64, psi: f64, dist: ErrorDistribution, t: usize, row: &RowSpec, cell_seed: u64) -> Result<Vec<Option<Draw>>> {
        let spec = dgp(phi, psi)?;
        let h = row.h.unwrap_or(self.cfg.h);
        let alpha = self.cfg.alpha;
        Ok((0..self.cfg.reps)
            .into_par_iter()
            .map(|i| {
                let seed = derive_seed(cell_seed, i as u64);
                let y = spec.simulate(dist, t, None, derive_seed(seed, 0)).ok()?.series;
                self.one(&y, h, row, alpha, derive_seed(seed, 1)).ok()
            })
            .collect())
    }

    fn one(&self, y: &crate::series::TimeSeries, h: usize, row: &RowSpec, alpha: f64, seed: u64) -> Result<Draw> {
        match self.cfg.scenario.family() {
            Family::Nlsd => {
                let ts = self.ts.as_ref().expect("transforms");
                let p = nlsd_statistic(y, ts, h)?;
                let crit = chi2_quantile((p.k * p.k * h) as f64, 1.0 - alpha);
                Ok(Draw { stat: p.statistic, reject: p.statistic > crit })
            }
            Family::Gcov => {
                let ts = self.ts.as_ref().expect("transforms");
                let fit = gcov_fit(&self.null_template, y, ts, h, &GcovConfig::default(), None)?;
                let df = fit.df();
                if df <= 0 {
                    return Err(Error::DfNonPositive(df));
                }
                let stat = fit.statistic();
                Ok(Draw { stat, reject: stat > chi2_quantile(df as f64, 1.0 - alpha) })
            }
            Family::Bootstrap => {
                let ts = self.ts.as_ref().expect("transforms");
                let estimator = match self.cfg.estimator {
                    EstimatorChoice::Gcov => Estimator::Gcov(GcovConfig::default()),
                    EstimatorChoice::Aml => Estimator::Aml(AmlConfig::default()),
                    EstimatorChoice::Ols => Estimator::Ols,
                };
                let bcfg = BootstrapConfig {
                    replicates: self.cfg.s,
                    with_replacement: self.cfg.with_replacement,
                    seed,
                    estimator,
                    rebuild: RebuildMode::BurnIn,
                    burn: None,
                    max_drop_fraction: 0.05,
                };
                let (rep, _) = bootstrap_test(&self.null_template, y, ts, h, &bcfg, alpha)?;
                Ok(Draw { stat: rep.statistic - rep.critical_value, reject: rep.reject })
            }
            Family::ManyTransform => {
                let k = row.k.ok_or_else(|| Error::InvalidInput(format!("row `{}` needs k", row.label)))?;
                let mut mcfg = ManyTransformConfig::new(GeneratorGrid::abs_powers(k, self.cfg.weight)?);
                mcfg.refit = self.cfg.refit;
                let (rep, _) = many_transform_test(&self.null_template, y, h, &mcfg, alpha)?;
                let crit = normal_quantile(1.0 - alpha);
                Ok(Draw { stat: rep.statistic, reject: rep.statistic > crit })
            }
        }
    }
}

fn rate_of(hits: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let p = hits as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

/// Key of a cell in the checkpoint file.
fn cell_key(row: &str, dist: &str, t: usize) -> String {
    format!("{row}|{dist}|{t}")
}

/// Runs every cell in row, distribution, sample-size order. When
/// `checkpoint` is given, finished cells are appended to it as JSON lines
/// and cells already present (for the same config fingerprint) are reused.
pub fn run_experiment(cfg: &ExperimentConfig, checkpoint: Option<&Path>) -> Result<ExperimentResult> {
    cfg.validate()?;
    let workers = cfg.workers.or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse().ok()));
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder.build().map_err(|e| Error::InvalidInput(e.to_string()))?;
    pool.install(|| run_inner(cfg, checkpoint))
}

fn run_inner(cfg: &ExperimentConfig, checkpoint: Option<&Path>) -> Result<ExperimentResult> {
    let runner = Runner::new(cfg)?;
    let fp = cfg.fingerprint();
    let mut done: BTreeMap<String, CellResult> = BTreeMap::new();
    if let Some(path) = checkpoint {
        if let Ok(text) = fs::read_to_string(path) {
            for line in text.lines() {
                if let Ok((f, cell)) = serde_json::from_str::<(String, CellResult)>(line) {
                    if f == fp {
                        done.insert(cell_key(&cell.row, &cell.dist, cell.t), cell);
                    }
                }
            }
        }
    }
    let mut null_cache: BTreeMap<String, Vec<Option<Draw>>> = BTreeMap::new();
    let mut cells = Vec::new();
    for row in &cfg.rows {
        for dname in &cfg.dists {
            let dist: ErrorDistribution = dname.parse()?;
            for &t in &cfg.t {
                let key = cell_key(&row.label, dname, t);
                if let Some(c) = done.get(&key) {
                    cells.push(c.clone());
                    continue;
                }
                let (phi, psi) = (row.phi.at(t), row.psi.at(t));
                let h = row.h.unwrap_or(cfg.h);
                let cell_seed = stream_seed(cfg.seed, &format!("{dname}|{t}|{phi}|{psi}|{:?}|{h}", row.k));
                let draws = runner.draws(phi, psi, dist, t, row, cell_seed)?;
                let ok: Vec<Draw> = draws.iter().flatten().copied().collect();
                let failed = draws.len() - ok.len();
                let cell = match row.reference {
                    Some((p0, s0)) if cfg.scenario.family() != Family::Bootstrap => {
                        let ref_seed = stream_seed(cfg.seed, &format!("{dname}|{t}|{p0}|{s0}|{:?}|{h}", row.k));
                        let nk = format!("{ref_seed}");
                        if !null_cache.contains_key(&nk) {
                            let nd = runner.draws(p0, s0, dist, t, row, ref_seed)?;
                            null_cache.insert(nk.clone(), nd);
                        }
                        let nulls: Vec<f64> = null_cache[&nk].iter().flatten().map(|d| d.stat).collect();
                        if nulls.is_empty() || ok.is_empty() {
                            return Err(Error::InvalidInput(format!("cell {key} produced no statistics")));
                        }
                        let q = nearest_rank(&nulls, 1.0 - cfg.alpha);
                        let (rate, se) = rate_of(ok.iter().filter(|d| d.stat > q).count(), ok.len());
                        CellResult {
                            row: row.label.clone(),
                            dist: dname.clone(),
                            t,
                            measure: "size-adjusted power".into(),
                            rate,
                            se,
                            n: ok.len(),
                            failed,
                            critical_value: Some(q),
                            seed: cell_seed,
                        }
                    }
                    _ => {
                        let (rate, se) = rate_of(ok.iter().filter(|d| d.reject).count(), ok.len());
                        let measure = if row.reference.is_some() || phi != 0.0 && cfg.scenario.family() == Family::Bootstrap {
                            "power"
                        } else {
                            "size"
                        };
                        CellResult {
                            row: row.label.clone(),
                            dist: dname.clone(),
                            t,
                            measure: measure.into(),
                            rate,
                            se,
                            n: ok.len(),
                            failed,
                            critical_value: None,
                            seed: cell_seed,
                        }
                    }
                };
                if let Some(path) = checkpoint {
                    let mut f = fs::OpenOptions::new().create(true).append(true).open(path)?;
                    writeln!(f, "{}", serde_json::to_string(&(&fp, &cell)).expect("cell serializes"))?;
                }
                cells.push(cell);
            }
        }
    }
    Ok(ExperimentResult { config: cfg.clone(), cells })
}

impl ExperimentResult {
    /// Paper layout: one line per row, columns `T x distribution`, each cell
    /// followed by its standard error.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row");
        for t in &self.config.t {
            for d in &self.config.dists {
                out.push_str(&format!(",T={t} {d},se"));
            }
        }
        out.push('\n');
        for row in &self.config.rows {
            out.push_str(&csv_field(&row.label));
            for t in &self.config.t {
                for d in &self.config.dists {
                    match self.cells.iter().find(|c| c.row == row.label && &c.dist == d && c.t == *t) {
                        Some(c) => out.push_str(&format!(",{:.4},{:.4}", c.rate, c.se)),
                        None => out.push_str(",,"),
                    }
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn cell(&self, row: &str, dist: &str, t: usize) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.row == row && c.dist == dist && c.t == t)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Files written for one command: JSON results, optional CSV table and a
/// manifest with the config echo, seeds and file digests.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub json: String,
    pub csv: Option<String>,
    pub manifest: Manifest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    /// File name to SHA-256.
    pub files: BTreeMap<String, String>,
}

impl ReportBundle {
    pub fn new(command: &str, config: serde_json::Value, seeds: Vec<u64>, json: String, csv: Option<String>) -> Self {
        let mut files = BTreeMap::new();
        files.insert("results.json".to_string(), hex(&Sha256::digest(json.as_bytes())));
        if let Some(c) = &csv {
            files.insert("table.csv".to_string(), hex(&Sha256::digest(c.as_bytes())));
        }
        let manifest =
            Manifest { tool: "nlsd".into(), version: env!("CARGO_PKG_VERSION").into(), command: command.into(), config, seeds, files };
        Self { json, csv, manifest }
    }

    pub fn from_experiment(res: &ExperimentResult) -> Self {
        let json = serde_json::to_string_pretty(res).expect("results serialize");
        let config = serde_json::to_value(&res.config).expect("config serializes");
        let seeds = std::iter::once(res.config.seed).chain(res.cells.iter().map(|c| c.seed)).collect();
        Self::new("mc", config, seeds, json, Some(res.to_csv()))
    }

    pub fn manifest_json(&self) -> String {
        serde_json::to_string_pretty(&self.manifest).expect("manifest serializes")
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("results.json"), &self.json)?;
        if let Some(c) = &self.csv {
            fs::write(dir.join("table.csv"), c)?;
        }
        fs::write(dir.join("manifest.json"), self.manifest_json())?;
        Ok(())
    }
}
