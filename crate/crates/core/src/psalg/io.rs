//! JSON serialization of truncated series and vector fields.

use serde::{Deserialize, Serialize};

use super::field::VectorField;
use super::key::MultiIndex;
use super::series::{Ring, TruncatedSeries, C64};
use crate::error::{Error, Result};

/// One stored coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    /// x-exponents.
    pub x: Vec<u32>,
    /// u-exponents of the expansion in `u - b`.
    pub u: Vec<u32>,
    /// Real part of the coefficient.
    pub re: f64,
    /// Imaginary part of the coefficient.
    pub im: f64,
}

/// Ambient data of a serialized series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesHeader {
    /// Number of x-variables.
    pub n: usize,
    /// Number of u-variables.
    pub p: usize,
    /// x-truncation degree.
    pub xmax: u32,
    /// u-truncation degree.
    pub umax: u32,
    /// Base point as `[re, im]` pairs.
    pub base: Vec<[f64; 2]>,
}

/// A series as header plus graded-lex ordered term list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesRecord {
    /// Ambient data.
    #[serde(flatten)]
    pub header: SeriesHeader,
    /// Terms in increasing graded-lex order of `(x, u)`.
    pub terms: Vec<TermRecord>,
}

/// A vector field as a header plus one term list per component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldRecord {
    /// Ambient data.
    #[serde(flatten)]
    pub header: SeriesHeader,
    /// Term list of each component `∂/∂x_i`.
    pub comps: Vec<Vec<TermRecord>>,
}

fn header_of(ring: &Ring) -> SeriesHeader {
    SeriesHeader {
        n: ring.n(),
        p: ring.p(),
        xmax: ring.xmax(),
        umax: ring.umax(),
        base: ring.base().iter().map(|c| [c.re, c.im]).collect(),
    }
}

fn ring_of(h: &SeriesHeader) -> Result<std::sync::Arc<Ring>> {
    Ring::new(
        h.n,
        h.p,
        h.xmax,
        h.umax,
        h.base.iter().map(|b| C64::new(b[0], b[1])).collect(),
    )
}

fn terms_of(f: &TruncatedSeries) -> Vec<TermRecord> {
    f.iter()
        .map(|(m, c)| TermRecord { x: m.xexp, u: m.uexp, re: c.re, im: c.im })
        .collect()
}

fn series_from_terms(
    ring: &std::sync::Arc<Ring>,
    terms: &[TermRecord],
) -> Result<TruncatedSeries> {
    let mut f = TruncatedSeries::zero(ring);
    for t in terms {
        let m = MultiIndex::new(t.x.clone(), t.u.clone());
        if m.xexp.len() != ring.n() || m.uexp.len() != ring.p() {
            return Err(Error::DimensionMismatch(format!(
                "term with {} x-exponents and {} u-exponents",
                m.xexp.len(),
                m.uexp.len()
            )));
        }
        if m.xdeg() > ring.xmax() || m.udeg() > ring.umax() {
            return Err(Error::TruncationExceeded(format!(
                "term of degree ({}, {}) beyond ({}, {})",
                m.xdeg(),
                m.udeg(),
                ring.xmax(),
                ring.umax()
            )));
        }
        let c = C64::new(t.re, t.im) + f.coeff(&m);
        f.insert(&m, c)?;
    }
    Ok(f)
}

impl SeriesRecord {
    /// Serializable form of `f`.
    pub fn from_series(f: &TruncatedSeries) -> Self {
        Self { header: header_of(f.ring()), terms: terms_of(f) }
    }

    /// Rebuilds the series, validating dimensions and truncation.
    pub fn to_series(&self) -> Result<TruncatedSeries> {
        series_from_terms(&ring_of(&self.header)?, &self.terms)
    }
}

impl FieldRecord {
    /// Serializable form of `v`.
    pub fn from_field(v: &VectorField) -> Self {
        Self { header: header_of(v.ring()), comps: v.comps().iter().map(terms_of).collect() }
    }

    /// Rebuilds the field, validating dimensions and truncation.
    pub fn to_field(&self) -> Result<VectorField> {
        let ring = ring_of(&self.header)?;
        if self.comps.len() != ring.n() {
            return Err(Error::DimensionMismatch(format!(
                "{} components for n = {}",
                self.comps.len(),
                ring.n()
            )));
        }
        let comps = self
            .comps
            .iter()
            .map(|t| series_from_terms(&ring, t))
            .collect::<Result<Vec<_>>>()?;
        VectorField::new(comps)
    }
}

/// JSON text of a series.
pub fn series_to_json(f: &TruncatedSeries) -> String {
    serde_json::to_string_pretty(&SeriesRecord::from_series(f)).expect("series serializes")
}

/// Parses a series from JSON text.
pub fn series_from_json(s: &str) -> Result<TruncatedSeries> {
    let rec: SeriesRecord =
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
    rec.to_series()
}
