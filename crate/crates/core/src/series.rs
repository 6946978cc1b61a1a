//! Time-series containers, the nonlinear transform registry and detrending.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A `T x m` panel of finite observations stored column by column.
///
/// Row 0 is the earliest observation.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    columns: Vec<Vec<f64>>,
    labels: Option<Vec<String>>,
    origin: String,
}

impl TimeSeries {
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidInput("series needs at least one column".into()));
        }
        let len = columns[0].len();
        if len < 2 {
            return Err(Error::InsufficientSample { needed: 1, got: len });
        }
        for (k, col) in columns.iter().enumerate() {
            if col.len() != len {
                return Err(Error::ShapeMismatch(format!("column {k} has {} rows, expected {len}", col.len())));
            }
            if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("non-finite value at row {row}, column {k}")));
            }
        }
        Ok(Self { columns, labels: None, origin: String::new() })
    }

    pub fn from_column(values: Vec<f64>) -> Result<Self> {
        Self::from_columns(vec![values])
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut columns = vec![Vec::with_capacity(rows.len()); m];
        for (t, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::ShapeMismatch(format!("row {t} has {} fields, expected {m}", row.len())));
            }
            for (k, v) in row.iter().enumerate() {
                columns[k].push(*v);
            }
        }
        Self::from_columns(columns)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim() {
            return Err(Error::ShapeMismatch(format!("{} labels for {} columns", labels.len(), self.dim())));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_origin(mut self, origin: impl Into<String>) -> Self {
        self.origin = origin.into();
        self
    }

    /// Number of observations `T`.
    pub fn len(&self) -> usize {
        self.columns[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of components `m`.
    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, k: usize) -> &[f64] {
        &self.columns[k]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn into_columns(self) -> Vec<Vec<f64>> {
        self.columns
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }

    pub fn row(&self, t: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[t]).collect()
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.len(), self.dim(), |t, k| self.columns[k][t])
    }

    /// Reads a CSV with one column per component. A header row is detected
    /// when any field of the first record fails to parse as a number.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
        let mut rows = Vec::new();
        let mut labels = None;
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.iter().all(|f| f.is_empty()) {
                continue;
            }
            let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(|f| f.parse::<f64>()).collect();
            match parsed {
                Ok(row) => rows.push(row),
                Err(_) if i == 0 => labels = Some(rec.iter().map(str::to_owned).collect()),
                Err(e) => return Err(Error::Parse(format!("record {}: {e}", i + 1))),
            }
        }
        let series = Self::from_rows(&rows)?;
        match labels {
            Some(l) => series.with_labels(l),
            None => Ok(series),
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        if let Some(labels) = &self.labels {
            w.write_record(labels)?;
        }
        for t in 0..self.len() {
            w.write_record(self.columns.iter().map(|c| format!("{}", c[t])))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Scalar nonlinear maps applied to one column of a series.
#[derive(Clone)]
pub enum TransformKind {
    Identity,
    /// `u^p`; non-integer `p` needs `u >= 0`.
    Power(f64),
    /// `sign(u) |u|^p`.
    SignedPower(f64),
    /// `|u|^p`.
    AbsPower(f64),
    /// `ln |u|`, undefined at zero.
    LogAbs,
    /// `ln(u^2)`, undefined at zero.
    LogSquare,
    /// `u^p exp(-t u)`.
    ExpWeightedPower {
        p: u32,
        t: f64,
    },
    /// `|u|^p exp(-t |u|)`, the symmetric-error variant.
    AbsExpWeightedPower {
        p: u32,
        t: f64,
    },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl TransformKind {
    fn descriptor(&self) -> String {
        match self {
            TransformKind::Identity => "identity".into(),
            TransformKind::Power(p) => format!("power:{p}"),
            TransformKind::SignedPower(p) => format!("signed-power:{p}"),
            TransformKind::AbsPower(p) => format!("abs-power:{p}"),
            TransformKind::LogAbs => "log-abs".into(),
            TransformKind::LogSquare => "log-square".into(),
            TransformKind::ExpWeightedPower { p, t } => format!("exp-power:{p}:{t}"),
            TransformKind::AbsExpWeightedPower { p, t } => format!("abs-exp-power:{p}:{t}"),
            TransformKind::Custom(_) => "custom".into(),
        }
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            TransformKind::Identity => u,
            TransformKind::Power(p) => int_or_real_pow(u, *p),
            TransformKind::SignedPower(p) => u.signum() * int_or_real_pow(u.abs(), *p),
            TransformKind::AbsPower(p) => int_or_real_pow(u.abs(), *p),
            TransformKind::LogAbs => {
                if u == 0.0 {
                    f64::NAN
                } else {
                    u.abs().ln()
                }
            }
            TransformKind::LogSquare => {
                if u == 0.0 {
                    f64::NAN
                } else {
                    (u * u).ln()
                }
            }
            TransformKind::ExpWeightedPower { p, t } => u.powi(*p as i32) * (-t * u).exp(),
            TransformKind::AbsExpWeightedPower { p, t } => {
                let a = u.abs();
                a.powi(*p as i32) * (-t * a).exp()
            }
            TransformKind::Custom(f) => f(u),
        }
    }
}

#[inline]
fn int_or_real_pow(u: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
        u.powi(p as i32)
    } else {
        u.powf(p)
    }
}

/// One entry of a [`TransformSet`]: a scalar map, its label and the input
/// column it reads.
#[derive(Debug, Clone)]
pub struct Transform {
    pub kind: TransformKind,
    pub label: String,
    pub column: usize,
}

impl Transform {
    pub fn new(kind: TransformKind) -> Self {
        let label = kind.descriptor();
        Self { kind, label, column: 0 }
    }

    pub fn on_column(mut self, column: usize) -> Self {
        self.column = column;
        if column != 0 {
            self.label = format!("{}@{column}", self.kind.descriptor());
        }
        self
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn custom(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { kind: TransformKind::Custom(Arc::new(f)), label: label.into(), column: 0 }
    }

    pub fn identity() -> Self {
        Self::new(TransformKind::Identity)
    }

    pub fn power(p: f64) -> Self {
        Self::new(TransformKind::Power(p))
    }

    pub fn abs_power(p: f64) -> Self {
        Self::new(TransformKind::AbsPower(p))
    }

    pub fn log_abs() -> Self {
        Self::new(TransformKind::LogAbs)
    }

    pub fn log_square() -> Self {
        Self::new(TransformKind::LogSquare)
    }

    pub fn descriptor(&self) -> String {
        if self.column == 0 {
            self.kind.descriptor()
        } else {
            format!("{}@{}", self.kind.descriptor(), self.column)
        }
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        self.kind.eval(u)
    }
}

impl FromStr for Transform {
    type Err = Error;

    /// Parses descriptors such as `identity`, `power:2`, `abs-power:0.5`,
    /// `log-abs`, `exp-power:1:0.5` with an optional `@column` suffix.
    fn from_str(s: &str) -> Result<Self> {
        let (body, column) = match s.rsplit_once('@') {
            Some((b, c)) => (b, c.parse::<usize>().map_err(|_| Error::Parse(format!("bad column index in `{s}`")))?),
            None => (s, 0),
        };
        let parts: Vec<&str> = body.trim().split(':').collect();
        let num = |i: usize| -> Result<f64> {
            parts
                .get(i)
                .ok_or_else(|| Error::Parse(format!("`{s}` is missing a parameter")))?
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number in `{s}`")))
        };
        let int = |i: usize| -> Result<u32> {
            parts
                .get(i)
                .ok_or_else(|| Error::Parse(format!("`{s}` is missing a parameter")))?
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad power in `{s}`")))
        };
        let kind = match parts[0] {
            "identity" | "id" => TransformKind::Identity,
            "power" => {
                let p = num(1)?;
                if p <= 0.0 {
                    return Err(Error::Parse("power must be positive".into()));
                }
                TransformKind::Power(p)
            }
            "signed-power" => TransformKind::SignedPower(num(1)?),
            "abs-power" => TransformKind::AbsPower(num(1)?),
            "log-abs" => TransformKind::LogAbs,
            "log-square" => TransformKind::LogSquare,
            "exp-power" | "abs-exp-power" => {
                let p = int(1)?;
                let t = num(2)?;
                if !(0.0..=1.0).contains(&t) {
                    return Err(Error::Parse(format!("weight t={t} outside [0,1]")));
                }
                if parts[0] == "exp-power" {
                    TransformKind::ExpWeightedPower { p, t }
                } else {
                    TransformKind::AbsExpWeightedPower { p, t }
                }
            }
            other => return Err(Error::Parse(format!("unknown transform `{other}`"))),
        };
        Ok(Transform::new(kind).on_column(column))
    }
}

/// An ordered, non-empty list of transforms with unique labels.
#[derive(Debug, Clone)]
pub struct TransformSet {
    transforms: Vec<Transform>,
}

impl TransformSet {
    pub fn new(transforms: Vec<Transform>) -> Result<Self> {
        if transforms.is_empty() {
            return Err(Error::InvalidInput("transform set is empty".into()));
        }
        for (i, a) in transforms.iter().enumerate() {
            if transforms[..i].iter().any(|b| b.label == a.label) {
                return Err(Error::InvalidInput(format!("duplicate transform label `{}`", a.label)));
            }
        }
        Ok(Self { transforms })
    }

    /// `{identity, power(2)}`: the series and its square.
    pub fn linear_and_square() -> Self {
        Self::new(vec![Transform::identity(), Transform::power(2.0)]).expect("valid set")
    }

    /// Parses a comma-separated list of descriptors.
    pub fn parse_list(s: &str) -> Result<Self> {
        let transforms = s.split(',').filter(|p| !p.trim().is_empty()).map(|p| p.trim().parse()).collect::<Result<Vec<Transform>>>()?;
        Self::new(transforms)
    }

    /// Number of transforms `K`.
    pub fn len(&self) -> usize {
        self.transforms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transforms.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Transform> {
        self.transforms.iter()
    }

    pub fn get(&self, k: usize) -> &Transform {
        &self.transforms[k]
    }

    pub fn descriptors(&self) -> Vec<String> {
        self.transforms.iter().map(Transform::descriptor).collect()
    }

    /// Applies every transform to the column it addresses. `row_offset` only
    /// shifts the row index reported in a [`Error::DomainViolation`].
    pub fn apply_columns(&self, columns: &[&[f64]], row_offset: usize) -> Result<Vec<Vec<f64>>> {
        let mut out = Vec::with_capacity(self.len());
        for tr in &self.transforms {
            let input = columns.get(tr.column).ok_or_else(|| {
                Error::ShapeMismatch(format!("transform `{}` reads column {} of a {}-column series", tr.label, tr.column, columns.len()))
            })?;
            let mut col = Vec::with_capacity(input.len());
            for (row, &u) in input.iter().enumerate() {
                let v = tr.eval(u);
                if !v.is_finite() {
                    return Err(Error::DomainViolation { row: row + row_offset, transform: tr.label.clone(), value: u });
                }
                col.push(v);
            }
            out.push(col);
        }
        Ok(out)
    }
}

impl Serialize for TransformSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.descriptors().serialize(s)
    }
}

impl<'de> Deserialize<'de> for TransformSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let items = Vec::<String>::deserialize(d)?;
        let transforms = items.iter().map(|s| s.parse::<Transform>()).collect::<Result<Vec<_>>>().map_err(serde::de::Error::custom)?;
        TransformSet::new(transforms).map_err(serde::de::Error::custom)
    }
}

/// Maps a `J`-column series to the `K`-column series of transformed values.
pub fn apply_transforms(series: &TimeSeries, ts: &TransformSet) -> Result<TimeSeries> {
    let cols: Vec<&[f64]> = series.columns().iter().map(Vec::as_slice).collect();
    let out = ts.apply_columns(&cols, 0)?;
    let labels = ts.iter().map(|t| t.label.clone()).collect();
    Ok(TimeSeries::from_columns(out)?.with_labels(labels)?.with_origin(format!("transformed {}", series.origin())))
}

/// Residuals of the least-squares regression of a single-column series on
/// `1, t, ..., t^degree`.
pub fn detrend_polynomial(series: &TimeSeries, degree: usize) -> Result<TimeSeries> {
    if series.dim() != 1 {
        return Err(Error::InvalidInput("detrending needs a single column".into()));
    }
    let y = series.column(0);
    let n = y.len();
    if n <= degree + 1 {
        return Err(Error::RankDeficient(format!("{n} observations cannot identify a degree-{degree} trend with a nonzero residual")));
    }
    // Time is rescaled to [-1, 1] to keep the Vandermonde design well conditioned.
    let mid = (n as f64 - 1.0) / 2.0;
    let half = mid.max(1.0);
    let x = DMatrix::from_fn(n, degree + 1, |t, j| ((t as f64 - mid) / half).powi(j as i32));
    let yv = DVector::from_column_slice(y);
    let qr = x.clone().qr();
    let r = qr.r();
    let scale = r.diagonal().amax();
    if r.diagonal().iter().any(|d| d.abs() <= 1e-12 * scale) {
        return Err(Error::RankDeficient("trend design".into()));
    }
    let beta = r.solve_upper_triangular(&(qr.q().transpose() * &yv)).ok_or_else(|| Error::RankDeficient("trend design".into()))?;
    let resid = &yv - &x * beta;
    let mut out =
        TimeSeries::from_column(resid.iter().copied().collect())?.with_origin(format!("{} detrended (degree {degree})", series.origin()));
    if let Some(l) = series.labels() {
        out = out.with_labels(l.to_vec())?;
    }
    Ok(out)
}
