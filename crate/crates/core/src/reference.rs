//! Closed-form topological, topological Hausdorff and Hausdorff dimensions
//! of the gallery sets and of fractal percolation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A dimension value: an exact expression together with its float value,
/// or an unknown value with optional bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimValue {
    pub expr: String,
    pub value: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl DimValue {
    pub fn exact(expr: impl Into<String>, value: f64) -> Self {
        DimValue { expr: expr.into(), value: Some(value), lower: Some(value), upper: Some(value) }
    }

    pub fn bounded(expr: impl Into<String>, lower: f64, upper: f64) -> Self {
        DimValue { expr: expr.into(), value: None, lower: Some(lower), upper: Some(upper) }
    }

    /// Best point value: the exact value, else the upper bound.
    pub fn point(&self) -> f64 {
        self.value.or(self.upper).or(self.lower).expect("some value or bound")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceDims {
    pub name: String,
    pub dim_t: DimValue,
    pub dim_th: DimValue,
    pub dim_h: DimValue,
}

impl ReferenceDims {
    /// `dim_t ≤ dim_tH ≤ dim_H`, compared through exact values where known
    /// and through bounds otherwise.
    pub fn is_ordered(&self) -> bool {
        let lo = |d: &DimValue| d.value.or(d.lower).unwrap_or(f64::NEG_INFINITY);
        let hi = |d: &DimValue| d.value.or(d.upper).unwrap_or(f64::INFINITY);
        lo(&self.dim_t) <= hi(&self.dim_th) + 1e-12 && lo(&self.dim_th) <= hi(&self.dim_h) + 1e-12
    }
}

/// Entries addressable by name.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum ReferenceSet {
    Triangle,
    Carpet,
    Koch,
    /// `C × [0,1]` for an (L,N)-regular `C`.
    Product { l: u32, n: u32 },
    /// An (L,N)-regular set itself.
    Regular { l: u32, n: u32 },
    /// Two-dimensional fractal percolation, conditioned on non-extinction.
    Percolation { n: u32, p: f64 },
}

impl ReferenceSet {
    pub fn parse(name: &str) -> Result<ReferenceSet> {
        match name {
            "triangle" => Ok(ReferenceSet::Triangle),
            "carpet" => Ok(ReferenceSet::Carpet),
            "koch" => Ok(ReferenceSet::Koch),
            "cantor" => Ok(ReferenceSet::Regular { l: 2, n: 3 }),
            "cantor-product" => Ok(ReferenceSet::Product { l: 2, n: 3 }),
            other => Err(Error::usage(format!("unknown reference set `{other}`"))),
        }
    }
}

pub fn reference_dimension(set: ReferenceSet) -> Result<ReferenceDims> {
    let ln = f64::ln;
    let row = |name: &str, t: DimValue, th: DimValue, h: DimValue| ReferenceDims { name: name.into(), dim_t: t, dim_th: th, dim_h: h };
    Ok(match set {
        ReferenceSet::Triangle => row(
            "triangle",
            DimValue::exact("1", 1.0),
            DimValue::exact("1", 1.0),
            DimValue::exact("log 3/log 2", ln(3.0) / ln(2.0)),
        ),
        ReferenceSet::Carpet => row(
            "carpet",
            DimValue::exact("1", 1.0),
            DimValue::exact("log 6/log 3", ln(6.0) / ln(3.0)),
            DimValue::exact("log 8/log 3", ln(8.0) / ln(3.0)),
        ),
        ReferenceSet::Koch => row(
            "koch",
            DimValue::exact("1", 1.0),
            DimValue::exact("1", 1.0),
            DimValue::exact("log 4/log 3", ln(4.0) / ln(3.0)),
        ),
        ReferenceSet::Regular { l, n } => {
            check_ln(l, n)?;
            let d = regular_dim(l, n);
            row(
                &format!("regular({l},{n})"),
                DimValue::exact("0", 0.0),
                DimValue::exact("0", 0.0),
                DimValue::exact(format!("log {l}/log {n}"), d),
            )
        }
        ReferenceSet::Product { l, n } => {
            check_ln(l, n)?;
            let d = 1.0 + regular_dim(l, n);
            let expr = format!("1 + log {l}/log {n}");
            row(&format!("product({l},{n})"), DimValue::exact("1", 1.0), DimValue::exact(&expr, d), DimValue::exact(expr, d))
        }
        ReferenceSet::Percolation { n, p } => {
            let nf = f64::from(n);
            if n < 2 || !(p > 1.0 / (nf * nf) && p <= 1.0) {
                return Err(Error::usage(format!(
                    "percolation needs n >= 2 and 1/n^2 < p <= 1 (otherwise the set is empty almost surely), got n={n} p={p}"
                )));
            }
            let ratio = p.ln() / nf.ln();
            let h = 2.0 + ratio;
            let th = if p > nf.sqrt().recip() {
                DimValue::bounded("unknown, at most 2 + 2 log p/log n", 0.0, 2.0 + 2.0 * ratio)
            } else {
                DimValue::bounded("unknown, at most dim_H", 0.0, h)
            };
            row(&format!("percolation({n},{p})"), DimValue::bounded("unknown", 0.0, 1.0), th, DimValue::exact("2 + log p/log n", h))
        }
    })
}

fn check_ln(l: u32, n: u32) -> Result<()> {
    if n < 2 || l < 1 || l > n {
        return Err(Error::usage(format!("need 1 <= L <= N and N >= 2, got L={l} N={n}")));
    }
    Ok(())
}

fn regular_dim(l: u32, n: u32) -> f64 {
    f64::from(l).ln() / f64::from(n).ln()
}

/// The named rows of the table.
pub fn reference_table() -> Vec<ReferenceDims> {
    ["triangle", "carpet", "koch", "cantor", "cantor-product"]
        .iter()
        .map(|n| reference_dimension(ReferenceSet::parse(n).expect("known name")).expect("valid row"))
        .collect()
}
