//! Piecewise-linear simplification of time series.
//!
//! Every algorithm keeps a subset `S` of the original points and
//! reconstructs the rest on the straight lines through consecutive kept
//! points. The result has `|S| - 1` segments.
//!
//! All four algorithms are driven by a normalized complexity parameter
//! `alpha_c` in `[0, 1]`: 0 forces a single segment, 1 keeps as many
//! segments as the algorithm allows. The per-algorithm raw threshold is
//! `M * (1 - alpha_c)^3`, where `M` is the smallest threshold that already
//! collapses the given series to one segment.

mod bottom_up;
mod optimal;
mod rdp;
mod vw;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::TimeSeries;

pub use bottom_up::{bottom_up, bottom_up_saturation, BottomUpPath};
pub use optimal::{optimal_simplify, os_objective, OptimalSimplifier};
pub use rdp::{rdp, rdp_saturation};
pub use vw::{effective_areas, vw, vw_saturation};

/// Exponent of the easing curve between `alpha_c` and the raw threshold.
pub const EASING_EXPONENT: i32 = 3;

/// Number of steps in the `alpha_c` sweep grid (0.00, 0.01, ..., 1.00).
pub const GRID_STEPS: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmId {
    Rdp,
    Vw,
    Bu,
    Os,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 4] = [
        AlgorithmId::Os,
        AlgorithmId::Rdp,
        AlgorithmId::Bu,
        AlgorithmId::Vw,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmId::Rdp => "rdp",
            AlgorithmId::Vw => "vw",
            AlgorithmId::Bu => "bu",
            AlgorithmId::Os => "os",
        }
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rdp" => Ok(AlgorithmId::Rdp),
            "vw" => Ok(AlgorithmId::Vw),
            "bu" | "bottom-up" | "bottomup" => Ok(AlgorithmId::Bu),
            "os" | "optimal" => Ok(AlgorithmId::Os),
            other => Err(Error::Config(format!(
                "unknown algorithm `{other}` (expected rdp, vw, bu or os)"
            ))),
        }
    }
}

/// Normalized complexity parameter in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct ComplexityParam(f64);

impl ComplexityParam {
    pub const MIN: ComplexityParam = ComplexityParam(0.0);
    pub const MAX: ComplexityParam = ComplexityParam(1.0);

    pub fn new(alpha_c: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&alpha_c) {
            Ok(Self(alpha_c))
        } else {
            Err(Error::Config(format!(
                "alpha_c {alpha_c} is outside [0, 1]"
            )))
        }
    }

    /// The `k`-th point of the sweep grid, `k / 100`.
    pub fn grid_point(k: usize) -> Self {
        assert!(k < GRID_STEPS, "grid index {k} out of range");
        Self(k as f64 / 100.0)
    }

    pub fn grid() -> impl Iterator<Item = ComplexityParam> {
        (0..GRID_STEPS).map(Self::grid_point)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `alpha_c` rounded to hundredths, the resolution of the sweep grid.
    pub fn hundredths(self) -> u32 {
        (self.0 * 100.0).round() as u32
    }
}

impl<'de> Deserialize<'de> for ComplexityParam {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(deserializer)?;
        ComplexityParam::new(v).map_err(serde::de::Error::custom)
    }
}

/// A kept-index subset of a series, reconstructed by straight-line segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplification {
    original_length: usize,
    kept_indices: Vec<usize>,
    kept_values: Vec<f64>,
}

impl Simplification {
    /// Builds a simplification from strictly increasing kept indices.
    pub fn from_indices(ts: &TimeSeries, kept_indices: Vec<usize>) -> Result<Self> {
        if kept_indices.len() < 2 {
            return Err(Error::Config(
                "a simplification keeps at least two points".into(),
            ));
        }
        if kept_indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "kept indices must be strictly increasing".into(),
            ));
        }
        if *kept_indices.last().expect("nonempty") >= ts.len() {
            return Err(Error::Config(
                "kept index beyond the end of the series".into(),
            ));
        }
        Ok(Self::from_sorted(ts.values(), kept_indices))
    }

    pub(crate) fn from_sorted(values: &[f64], kept_indices: Vec<usize>) -> Self {
        debug_assert!(kept_indices.len() >= 2);
        let kept_values = kept_indices.iter().map(|&i| values[i]).collect();
        Self {
            original_length: values.len(),
            kept_indices,
            kept_values,
        }
    }

    /// The identity simplification that keeps every point.
    pub fn identity(ts: &TimeSeries) -> Self {
        Self::from_sorted(ts.values(), (0..ts.len()).collect())
    }

    pub fn original_length(&self) -> usize {
        self.original_length
    }

    pub fn kept_indices(&self) -> &[usize] {
        &self.kept_indices
    }

    pub fn kept_values(&self) -> &[f64] {
        &self.kept_values
    }

    pub fn segment_count(&self) -> usize {
        self.kept_indices.len() - 1
    }

    /// Fraction of the original time points kept, `|S| / n`.
    pub fn complexity(&self) -> f64 {
        self.kept_indices.len() as f64 / self.original_length as f64
    }

    /// Expands the simplification back to a full-length series.
    pub fn reconstruct(&self) -> TimeSeries {
        TimeSeries::new(self.reconstruct_values())
            .expect("reconstruction of a valid simplification is valid")
    }

    pub fn reconstruct_values(&self) -> Vec<f64> {
        let n = self.original_length;
        let idx = &self.kept_indices;
        let val = &self.kept_values;
        let last = idx.len() - 1;
        let mut out = Vec::with_capacity(n);
        let mut seg = 0;
        for i in 0..n {
            while seg + 1 < last && i > idx[seg + 1] {
                seg += 1;
            }
            out.push(line_at(idx[seg], val[seg], idx[seg + 1], val[seg + 1], i));
        }
        for (&i, &v) in idx.iter().zip(val) {
            out[i] = v;
        }
        out
    }

    pub fn to_record(
        &self,
        algorithm: AlgorithmId,
        alpha_c: ComplexityParam,
    ) -> SimplificationRecord {
        SimplificationRecord {
            n: self.original_length,
            kept_indices: self.kept_indices.clone(),
            kept_values: self.kept_values.clone(),
            algorithm,
            alpha_c: alpha_c.value(),
        }
    }
}

/// Wire form of a simplification (indices are 0-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplificationRecord {
    pub n: usize,
    pub kept_indices: Vec<usize>,
    pub kept_values: Vec<f64>,
    pub algorithm: AlgorithmId,
    pub alpha_c: f64,
}

/// Value at time `i` of the line through `(a, ya)` and `(b, yb)`; `i` may lie
/// outside `[a, b]`.
#[inline]
pub(crate) fn line_at(a: usize, ya: f64, b: usize, yb: f64, i: usize) -> f64 {
    ya + (yb - ya) * ((i as f64 - a as f64) / (b as f64 - a as f64))
}

/// Free-function form of [`Simplification::reconstruct`].
pub fn reconstruct(s: &Simplification) -> TimeSeries {
    s.reconstruct()
}

/// Maps `alpha_c` onto a raw threshold given the series' saturation value.
pub fn eased_threshold(saturation: f64, alpha_c: ComplexityParam) -> f64 {
    saturation * (1.0 - alpha_c.value()).powi(EASING_EXPONENT)
}

/// Raw threshold (`epsilon`, area, merge error or segment penalty) that
/// `alg` uses on `ts` for the given `alpha_c`.
pub fn normalize_param(alg: AlgorithmId, ts: &TimeSeries, alpha_c: ComplexityParam) -> f64 {
    eased_threshold(saturation(alg, ts), alpha_c)
}

/// The smallest raw threshold at which `alg` returns a single segment on `ts`.
pub fn saturation(alg: AlgorithmId, ts: &TimeSeries) -> f64 {
    match alg {
        AlgorithmId::Rdp => rdp_saturation(ts),
        AlgorithmId::Vw => vw_saturation(ts),
        AlgorithmId::Bu => bottom_up_saturation(ts),
        AlgorithmId::Os => OptimalSimplifier::new(ts).saturation(),
    }
}

pub fn simplify(alg: AlgorithmId, ts: &TimeSeries, alpha_c: ComplexityParam) -> Simplification {
    PreparedSeries::new(alg, ts).simplify(alpha_c)
}

/// Per-series precomputation shared by every `alpha_c` of a sweep.
///
/// Outputs are identical to calling [`simplify`] for each parameter value.
pub struct PreparedSeries<'a> {
    ts: &'a TimeSeries,
    saturation: f64,
    state: Prepared,
}

enum Prepared {
    Rdp,
    Vw(Vec<f64>),
    Bu(BottomUpPath),
    Os(Box<OptimalSimplifier>),
}

impl<'a> PreparedSeries<'a> {
    pub fn new(alg: AlgorithmId, ts: &'a TimeSeries) -> Self {
        let (saturation, state) = match alg {
            AlgorithmId::Rdp => (rdp_saturation(ts), Prepared::Rdp),
            AlgorithmId::Vw => {
                let areas = effective_areas(ts.values());
                let sat = areas.iter().copied().fold(0.0, f64::max);
                (sat, Prepared::Vw(areas))
            }
            AlgorithmId::Bu => {
                let path = BottomUpPath::full(ts.values());
                (path.saturation(), Prepared::Bu(path))
            }
            AlgorithmId::Os => {
                let os = OptimalSimplifier::new(ts);
                (os.saturation(), Prepared::Os(Box::new(os)))
            }
        };
        Self {
            ts,
            saturation,
            state,
        }
    }

    pub fn saturation(&self) -> f64 {
        self.saturation
    }

    pub fn threshold(&self, alpha_c: ComplexityParam) -> f64 {
        eased_threshold(self.saturation, alpha_c)
    }

    /// `alpha_c = 1` always returns the identity. The raw algorithms at a zero
    /// threshold would still drop points lying exactly on a chord.
    pub fn simplify(&self, alpha_c: ComplexityParam) -> Simplification {
        if alpha_c.value() == 1.0 {
            return Simplification::identity(self.ts);
        }
        let raw = self.threshold(alpha_c);
        let values = self.ts.values();
        match &self.state {
            Prepared::Rdp => rdp(self.ts, raw),
            Prepared::Vw(areas) => {
                let n = values.len();
                let kept = (0..n)
                    .filter(|&i| i == 0 || i == n - 1 || areas[i] > raw)
                    .collect();
                Simplification::from_sorted(values, kept)
            }
            Prepared::Bu(path) => path.replay(values, raw),
            Prepared::Os(os) => os.solve(raw),
        }
    }
}
