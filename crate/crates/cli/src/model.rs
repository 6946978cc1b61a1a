use anyhow::{bail, Context};
use nlsd_core::ModelSpec;

/// Parses `MAR(r,s)`, `mar:r,s` or `noncausal-ar1` into a template whose
/// coefficients are starting values only.
pub fn parse_template(text: &str) -> anyhow::Result<ModelSpec> {
    let t = text.trim().to_ascii_lowercase();
    if t == "noncausal-ar1" || t == "nar1" {
        return Ok(ModelSpec::noncausal_ar1(0.5)?);
    }
    let inner = t
        .strip_prefix("mar(")
        .and_then(|s| s.strip_suffix(')'))
        .or_else(|| t.strip_prefix("mar:"))
        .with_context(|| format!("model `{text}` is not of the form MAR(r,s)"))?;
    let (r, s) = inner.split_once(',').with_context(|| format!("model `{text}` needs two orders"))?;
    let r: usize = r.trim().parse().with_context(|| format!("bad causal order in `{text}`"))?;
    let s: usize = s.trim().parse().with_context(|| format!("bad noncausal order in `{text}`"))?;
    if r + s == 0 {
        bail!("MAR(0,0) has no parameters to estimate");
    }
    Ok(ModelSpec::mar(vec![0.0; r], vec![0.0; s])?)
}

/// Builds a MAR model from explicit coefficient lists.
pub fn from_coefficients(phi: &[f64], psi: &[f64]) -> anyhow::Result<ModelSpec> {
    Ok(ModelSpec::mar(phi.to_vec(), psi.to_vec())?)
}
