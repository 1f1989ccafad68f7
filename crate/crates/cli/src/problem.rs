//! Problem files: a versioned JSON document describing `S`, `R`, `a`, the
//! perturbation and the numerical parameters of every subcommand.

use serde::{Deserialize, Serialize};

use lpnf::kam::{c1_constant, m_r, DiophantineSchedule, OmegaPreset};
use lpnf::psalg::C64;
use lpnf::resonance::{first_integral_basis, GaussRational, LinearMorphism, OmegaWindow, ResonantStructure};
use lpnf::verify::{Scenario, UPoly, XFieldTerms};
use num_rational::Rational64;

use crate::error::CliError;

/// Schema version understood by this build.
pub const SCHEMA_VERSION: u32 = 1;

/// Complex number written as `[re, im]`.
pub type Complex = [f64; 2];

fn c64(v: Complex) -> C64 {
    C64::new(v[0], v[1])
}

/// Dimensions `(n, p, l)`; `p` is checked against the resonant rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dims {
    /// Number of x-variables.
    pub n: usize,
    /// Number of resonant monomials.
    pub p: usize,
    /// Number of generators `S_j`.
    pub l: usize,
}

/// Eigenvalue matrix `λ_i(g_j)`, one row per `S_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MorphismSpec {
    /// Integer entries.
    Integer(Vec<Vec<i64>>),
    /// Gaussian-rational entries `[re, im]`, each written `"p/q"` or `"p"`.
    Rational(Vec<Vec<[String; 2]>>),
    /// Floating-point entries `[re, im]`.
    Float(Vec<Vec<Complex>>),
}

/// Monomial `c u^e` of a coefficient `a_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UTerm {
    /// Exponent in `u`.
    pub u: Vec<u32>,
    /// Coefficient.
    pub c: Complex,
}

/// Term `c x^Q ∂_i` of the perturbation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XTerm {
    /// Component (0-based).
    pub i: usize,
    /// Exponent in `x`.
    pub x: Vec<u32>,
    /// Coefficient.
    pub c: Complex,
}

fn default_gamma_cap() -> f64 {
    1.0
}
fn default_radius() -> f64 {
    0.75
}
fn default_window() -> OmegaWindow {
    OmegaWindow::Dyadic
}

/// Diophantine schedule parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    /// Sequence `ω_k`.
    pub omega: OmegaPreset,
    /// Constant `γ`.
    pub gamma: f64,
    /// Cap `γ′`.
    #[serde(default = "default_gamma_cap")]
    pub gamma_cap: f64,
    /// x-radius `r ∈ (1/2, 1]` used for norms and `m_r`.
    #[serde(default = "default_radius")]
    pub r: f64,
    /// Degree window of the weights.
    #[serde(default = "default_window")]
    pub window: OmegaWindow,
}

/// Truncation degrees; derived from the order when absent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    /// x-degree truncation.
    pub xmax: u32,
    /// u-degree truncation.
    pub umax: u32,
}

fn default_order() -> u32 {
    16
}
fn default_floor() -> f64 {
    1e-12
}

/// Normalization parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizeSpec {
    /// Target order.
    #[serde(default = "default_order")]
    pub order: u32,
    /// Base point `b`.
    pub base: Vec<Complex>,
    /// Smallest admissible divisor.
    #[serde(default = "default_floor")]
    pub divisor_floor: f64,
}

fn default_kmax() -> u32 {
    3
}

/// Compact set `K` as a product of rectangles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// `[[re_lo, re_hi], [im_lo, im_hi]]` per u-coordinate.
    pub rect: Vec<[[f64; 2]; 2]>,
    /// Spacing per real coordinate.
    pub h: f64,
    /// Last filtering stage.
    #[serde(default = "default_kmax")]
    pub k_max: u32,
}

fn default_rho() -> f64 {
    0.1
}
fn default_t_end() -> f64 {
    1.0
}
fn default_tol() -> f64 {
    1e-10
}
fn default_samples() -> usize {
    8
}
fn default_true() -> bool {
    true
}

/// Verification parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    /// Polydisc radius `ρ`.
    #[serde(default = "default_rho")]
    pub rho: f64,
    /// Flow time `T`.
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    /// Integrator tolerance.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Samples per fiber angle.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Whether to run the Poincaré–Dulac comparison at `b = 0`.
    #[serde(default = "default_true")]
    pub oracle: bool,
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self { rho: default_rho(), t_end: default_t_end(), tol: default_tol(), samples: default_samples(), oracle: true }
    }
}

fn default_mu_max() -> u32 {
    4
}
fn default_theta() -> f64 {
    0.1
}
fn default_strict_kmax() -> u32 {
    8
}

/// Measure-estimate parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    /// Admissible measure loss `ε*`.
    pub eps_star: f64,
    /// Largest derivative order tried for the nondegeneracy index.
    #[serde(default = "default_mu_max")]
    pub mu_max: u32,
    /// Neighbourhood width `ϑ`.
    #[serde(default = "default_theta")]
    pub theta: f64,
    /// Range of the strict diophantine check.
    #[serde(default = "default_strict_kmax")]
    pub strict_k_max: u32,
}

fn default_degree_bound() -> u32 {
    8
}

/// A complete problem file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    /// Schema version; must equal [`SCHEMA_VERSION`].
    pub version: u32,
    /// Name used in reports.
    pub name: String,
    /// Dimensions.
    pub dims: Dims,
    /// Eigenvalue matrix.
    pub morphism: MorphismSpec,
    /// Resonant rows `R_k`; computed from the Hilbert basis when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resonant_rows: Option<Vec<Vec<u32>>>,
    /// Degree bound of the Hilbert-basis enumeration.
    #[serde(default = "default_degree_bound")]
    pub degree_bound: u32,
    /// Coefficients `a_j(u)`.
    pub a: Vec<Vec<UTerm>>,
    /// Perturbation terms.
    pub perturbation: Vec<XTerm>,
    /// Diophantine schedule.
    pub schedule: ScheduleSpec,
    /// Truncations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Truncation>,
    /// Normalization parameters.
    pub normalize: NormalizeSpec,
    /// Compact set of base points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    /// Verification parameters.
    #[serde(default)]
    pub verify: VerifySpec,
    /// Measure-estimate parameters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSpec>,
}

fn schema<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Schema(e.to_string())
}

fn parse_rational(s: &str) -> Result<Rational64, CliError> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: i64 = num.parse().map_err(|_| schema(format!("bad rational entry '{s}'")))?;
    let den: i64 = den.parse().map_err(|_| schema(format!("bad rational entry '{s}'")))?;
    if den == 0 {
        return Err(schema(format!("zero denominator in '{s}'")));
    }
    Ok(Rational64::new(num, den))
}

fn rational_string(r: Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl ProblemFile {
    /// Parses and checks the version and dimensions.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let pf: ProblemFile = serde_json::from_str(text).map_err(schema)?;
        if pf.version != SCHEMA_VERSION {
            return Err(schema(format!("unsupported schema version {} (expected {SCHEMA_VERSION})", pf.version)));
        }
        let Dims { n, p, l } = pf.dims;
        let rows = match &pf.morphism {
            MorphismSpec::Integer(m) => m.iter().map(Vec::len).collect::<Vec<_>>(),
            MorphismSpec::Rational(m) => m.iter().map(Vec::len).collect(),
            MorphismSpec::Float(m) => m.iter().map(Vec::len).collect(),
        };
        if rows.len() != l || rows.iter().any(|&r| r != n) {
            return Err(schema(format!("morphism must have {l} rows of length {n}")));
        }
        if let Some(rr) = &pf.resonant_rows {
            if rr.len() != p || rr.iter().any(|r| r.len() != n) {
                return Err(schema(format!("resonant_rows must have {p} rows of length {n}")));
            }
        }
        if pf.a.len() != l || pf.a.iter().flatten().any(|t| t.u.len() != p) {
            return Err(schema(format!("a must have {l} polynomials in {p} variables")));
        }
        if pf.perturbation.iter().any(|t| t.i >= n || t.x.len() != n) {
            return Err(schema("perturbation term outside C^n"));
        }
        if pf.normalize.base.len() != p {
            return Err(schema(format!("base must have {p} coordinates")));
        }
        if let Some(g) = &pf.grid {
            if g.rect.len() != p || g.h.is_nan() || g.h <= 0.0 {
                return Err(schema(format!("grid needs {p} rectangles and h > 0")));
            }
        }
        Ok(pf)
    }

    /// The morphism `S`; `exact` rejects floating-point input.
    pub fn morphism(&self, exact: bool) -> Result<LinearMorphism, CliError> {
        match &self.morphism {
            MorphismSpec::Integer(m) => LinearMorphism::from_integers(m).map_err(schema),
            MorphismSpec::Rational(m) => {
                let rows = m
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|[re, im]| Ok(GaussRational::new(parse_rational(re)?, parse_rational(im)?)))
                            .collect::<Result<Vec<_>, CliError>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                LinearMorphism::from_rational(rows).map_err(schema)
            }
            MorphismSpec::Float(m) => {
                if exact {
                    return Err(schema("exact resonance tests need an integer or rational morphism"));
                }
                LinearMorphism::new(m.iter().map(|r| r.iter().map(|v| c64(*v)).collect()).collect()).map_err(schema)
            }
        }
    }

    /// Resonant structure from the declared rows, or from the Hilbert basis.
    pub fn resonant_structure(&self, s: &LinearMorphism) -> Result<ResonantStructure, CliError> {
        match &self.resonant_rows {
            Some(rows) => ResonantStructure::new(s, rows.clone()).map_err(schema),
            None => {
                let r = first_integral_basis(s, self.degree_bound).map_err(CliError::Core)?;
                if r.p() != self.dims.p {
                    return Err(schema(format!("declared p = {} but the invariant ring has {} generators", self.dims.p, r.p())));
                }
                Ok(r)
            }
        }
    }

    /// Scenario built from the problem.
    pub fn scenario(&self, exact: bool) -> Result<Scenario, CliError> {
        let s = self.morphism(exact)?;
        let r = self.resonant_structure(&s)?;
        let a: Vec<UPoly> = self.a.iter().map(|p| p.iter().map(|t| (t.u.clone(), c64(t.c))).collect()).collect();
        let pert: XFieldTerms = self.perturbation.iter().map(|t| (t.i, t.x.clone(), c64(t.c))).collect();
        Scenario::new(&self.name, s, r, a, pert).map_err(schema)
    }

    /// Base point.
    pub fn base(&self) -> Vec<C64> {
        self.normalize.base.iter().map(|v| c64(*v)).collect()
    }

    /// Diophantine schedule with `c_1` from `m_r` at the schedule radius.
    pub fn schedule(&self, scn: &Scenario) -> Result<(DiophantineSchedule, f64), CliError> {
        let sp = &self.schedule;
        let mr = m_r(&scn.s, &scn.r, sp.r).map_err(schema)?;
        let c1 = c1_constant(scn.n(), scn.r.p(), scn.s.l(), mr, sp.gamma_cap);
        let sched = DiophantineSchedule::new(
            sp.omega.clone(),
            sp.gamma,
            sp.gamma_cap,
            c1,
            scn.s.l(),
            scn.s.lam_max(),
            scn.r.p(),
            scn.n(),
        )
        .map_err(schema)?;
        Ok((sched, mr))
    }

    /// Problem file describing an existing scenario.
    pub fn from_scenario(scn: &Scenario, schedule: ScheduleSpec, normalize: NormalizeSpec, grid: Option<GridSpec>) -> Self {
        let s = &scn.s;
        let morphism = match s.exact() {
            Some(ex) => MorphismSpec::Rational(
                ex.iter()
                    .map(|row| row.iter().map(|g| [rational_string(g.re), rational_string(g.im)]).collect())
                    .collect(),
            ),
            None => MorphismSpec::Float(s.lam().iter().map(|r| r.iter().map(|v| [v.re, v.im]).collect()).collect()),
        };
        Self {
            version: SCHEMA_VERSION,
            name: scn.name.clone(),
            dims: Dims { n: scn.n(), p: scn.r.p(), l: s.l() },
            morphism,
            resonant_rows: Some(scn.r.rows().to_vec()),
            degree_bound: default_degree_bound(),
            a: scn.a.iter().map(|p| p.iter().map(|(u, c)| UTerm { u: u.clone(), c: [c.re, c.im] }).collect()).collect(),
            perturbation: scn.perturbation.iter().map(|(i, x, c)| XTerm { i: *i, x: x.clone(), c: [c.re, c.im] }).collect(),
            schedule,
            truncation: None,
            normalize,
            grid,
            verify: VerifySpec::default(),
            measure: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_parse() {
        assert_eq!(parse_rational("3/4").unwrap(), Rational64::new(3, 4));
        assert_eq!(parse_rational(" -2 ").unwrap(), Rational64::from_integer(-2));
        assert!(parse_rational("1/0").is_err());
        assert_eq!(rational_string(Rational64::new(-6, 4)), "-3/2");
    }
}
