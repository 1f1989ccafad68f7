//! Uniform grids on compact subsets of `C^p` and the filter removing base points
//! with small divisors.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::normalform::NormalizationState;
use crate::psalg::{TruncatedSeries, C64};
use crate::resonance::{nonzero_weights_in, LinearMorphism, OmegaWindow};

use super::schedule::{t_m, DiophantineSchedule};

/// Real and imaginary ranges `((re_lo, re_hi), (im_lo, im_hi))` of one complex coordinate.
pub type Rectangle = ((f64, f64), (f64, f64));

/// Outcome of one filtering stage at one grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointRecord {
    /// Membership after the stage.
    pub alive: bool,
    /// Whether the point lies within the trust radius of the expansion.
    pub trusted: bool,
    /// Smallest divisor `|α(Σ a_j(b) g_j)|` over the window.
    pub worst_divisor: f64,
    /// Source `(Q, i)` of the weight attaining it.
    pub offending: Option<(Vec<u32>, usize)>,
}

/// One filtering stage.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FilterStage {
    /// Index `k` of the stage.
    pub k: u32,
    /// Threshold `γ ω_{k+1}`.
    pub threshold: f64,
    /// Trust radius around the expansion base.
    pub trust_radius: f64,
    /// Number of weights in the window.
    pub weights: usize,
    /// Per-point outcome, in grid order.
    pub points: Vec<PointRecord>,
}

/// Finite set of points of `C^p` with a common cell volume and a membership mask.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompactGrid {
    /// Grid points.
    pub points: Vec<Vec<C64>>,
    /// Current membership mask.
    pub alive: Vec<bool>,
    /// Points marked untrusted by some stage (never removed on that ground).
    pub untrusted: Vec<bool>,
    /// Real volume of one cell.
    pub cell_volume: f64,
    /// Spacing per real coordinate.
    pub h: f64,
    /// Filtering stages applied so far.
    pub stages: Vec<FilterStage>,
}

impl CompactGrid {
    /// Cell-centred grid of spacing `h` on the product of rectangles
    /// `[re_lo, re_hi] × [im_lo, im_hi]`, one per complex coordinate.
    pub fn rectangle(rects: &[Rectangle], h: f64) -> Result<Self> {
        if h.is_nan() || h <= 0.0 || rects.is_empty() {
            return Err(Error::InvalidInput("grid needs h > 0 and at least one coordinate".into()));
        }
        let axis = |(lo, hi): (f64, f64)| -> Result<Vec<f64>> {
            if hi <= lo {
                return Err(Error::InvalidInput(format!("empty interval [{lo}, {hi}]")));
            }
            let count = ((hi - lo) / h).round().max(1.0) as usize;
            Ok((0..count).map(|i| lo + (i as f64 + 0.5) * h).collect())
        };
        let mut points: Vec<Vec<C64>> = vec![Vec::new()];
        for &(re, im) in rects {
            let (xs, ys) = (axis(re)?, axis(im)?);
            let mut next = Vec::with_capacity(points.len() * xs.len() * ys.len());
            for p in &points {
                for &y in &ys {
                    for &x in &xs {
                        let mut q = p.clone();
                        q.push(C64::new(x, y));
                        next.push(q);
                    }
                }
            }
            points = next;
        }
        let n = points.len();
        let cell_volume = h.powi(2 * rects.len() as i32);
        Ok(Self { points, alive: vec![true; n], untrusted: vec![false; n], cell_volume, h, stages: Vec::new() })
    }

    /// Grid made of explicit points with a given cell volume.
    pub fn from_points(points: Vec<Vec<C64>>, cell_volume: f64) -> Self {
        let n = points.len();
        let h = cell_volume.powf(1.0 / (2 * points.first().map_or(1, |p| p.len().max(1))) as f64);
        Self { points, alive: vec![true; n], untrusted: vec![false; n], cell_volume, h, stages: Vec::new() }
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Whether the grid has no points.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Complex dimension `p`.
    pub fn p(&self) -> usize {
        self.points.first().map_or(0, |v| v.len())
    }

    /// Number of alive points.
    pub fn alive_count(&self) -> usize {
        self.alive.iter().filter(|a| **a).count()
    }

    /// Gridded measure of the whole set.
    pub fn measure(&self) -> f64 {
        self.len() as f64 * self.cell_volume
    }

    /// Gridded measure of the alive set.
    pub fn alive_measure(&self) -> f64 {
        self.alive_count() as f64 * self.cell_volume
    }

    /// Fraction of points removed so far.
    pub fn excluded_fraction(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        1.0 - self.alive_count() as f64 / self.len() as f64
    }

    /// CSV dump of a stage: `re(b_1), im(b_1), …, alive_after_k, worst_divisor, offending_Q, offending_i, trusted`.
    pub fn stage_csv(&self, stage: usize) -> Result<String> {
        let st = self
            .stages
            .get(stage)
            .ok_or_else(|| Error::InvalidInput(format!("no stage {stage}")))?;
        let mut out = String::new();
        for j in 0..self.p() {
            let _ = write!(out, "re_b{},im_b{},", j + 1, j + 1);
        }
        out.push_str("alive_after_k,worst_divisor,offending_Q,offending_i,trusted\n");
        for (pt, rec) in self.points.iter().zip(&st.points) {
            for v in pt {
                let _ = write!(out, "{:.17e},{:.17e},", v.re, v.im);
            }
            let (q, i) = match &rec.offending {
                Some((q, i)) => (q.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(";"), i.to_string()),
                None => (String::new(), String::new()),
            };
            let _ = writeln!(
                out,
                "{},{:.17e},{},{},{}",
                u8::from(rec.alive),
                rec.worst_divisor,
                q,
                i,
                u8::from(rec.trusted)
            );
        }
        Ok(out)
    }
}

/// Removes every alive point `b` with `|α(Σ_j a_j(b) g_j)| < γ ω_{k+1}` for some nonzero
/// weight `α` of the window at index `k`.
///
/// `a` holds u-series expanded around their ring base `b_0`. Points with
/// `|b - b_0| > trust_radius` are marked untrusted; they are filtered like the
/// others but never reported as trusted. Pass `f64::INFINITY` when `a` is an
/// exact polynomial.
pub fn filter_k_with(
    grid: &CompactGrid,
    a: &[TruncatedSeries],
    s: &LinearMorphism,
    k: u32,
    sched: &DiophantineSchedule,
    window: OmegaWindow,
    trust_radius: f64,
) -> Result<CompactGrid> {
    if a.len() != s.l() {
        return Err(Error::DimensionMismatch(format!("{} coefficients for l = {}", a.len(), s.l())));
    }
    let p = grid.p();
    if let Some(f) = a.first() {
        if f.ring().p() != p {
            return Err(Error::DimensionMismatch(format!("grid in C^{p}, series in {} u-variables", f.ring().p())));
        }
    }
    let (lo, hi) = window.bounds(k);
    let weights = nonzero_weights_in(s, lo, hi);
    let threshold = sched.gamma * sched.omega(k + 1);
    let x0 = vec![C64::new(0.0, 0.0); s.n()];
    let base: Vec<C64> = a.first().map_or_else(|| vec![C64::new(0.0, 0.0); p], |f| f.ring().base().to_vec());
    let mut out = grid.clone();
    let mut records = Vec::with_capacity(grid.len());
    for (idx, b) in grid.points.iter().enumerate() {
        let vals: Vec<C64> = a.iter().map(|f| f.eval(&x0, b)).collect();
        let mut worst = f64::INFINITY;
        let mut offending = None;
        for w in &weights {
            let d: C64 = w.vals.iter().zip(&vals).map(|(al, aj)| al * aj).sum();
            if d.norm() < worst {
                worst = d.norm();
                let (q, i) = w.source();
                offending = Some((q.to_vec(), i));
            }
        }
        let dist = b.iter().zip(&base).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        let trusted = dist <= trust_radius;
        let alive = grid.alive[idx] && worst.partial_cmp(&threshold) != Some(std::cmp::Ordering::Less);
        out.alive[idx] = alive;
        out.untrusted[idx] = grid.untrusted[idx] || !trusted;
        records.push(PointRecord { alive, trusted, worst_divisor: worst, offending });
    }
    out.stages.push(FilterStage { k, threshold, trust_radius, weights: weights.len(), points: records });
    Ok(out)
}

/// [`filter_k_with`] applied to the coefficients `a_j^{2^k}` of a normalization state,
/// with trust radius `t_{m/2}` for `m = 2^k` (`t_1` at `k = 0`).
pub fn filter_k(
    grid: &CompactGrid,
    state: &NormalizationState,
    k: u32,
    sched: &DiophantineSchedule,
    window: OmegaWindow,
) -> Result<CompactGrid> {
    let trust = t_m(k.saturating_sub(1), sched);
    filter_k_with(grid, &state.a, &state.s, k, sched, window, trust)
}

/// Applies the stages `k = 0..=k_max` in turn with fixed coefficients `a`.
pub fn filter_stages(
    grid: &CompactGrid,
    a: &[TruncatedSeries],
    s: &LinearMorphism,
    k_max: u32,
    sched: &DiophantineSchedule,
    window: OmegaWindow,
    trust_radius: f64,
) -> Result<CompactGrid> {
    let mut g = grid.clone();
    for k in 0..=k_max {
        g = filter_k_with(&g, a, s, k, sched, window, trust_radius)?;
    }
    Ok(g)
}
