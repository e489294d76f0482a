//! Parameter sweeps: fidelity tradeoff curves, violation intervals at fixed
//! noise and the critical noise level per overlap.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::{
    depolarized_overlaps, err_terms, nc_bound_ideal, quantum_noisy_fidelity,
    quantum_optimal_fidelity,
};
use crate::error::{check_unit, Error, Result};

/// Reference violation interval at `v = 0.015`.
pub const REFERENCE_NOISE: f64 = 0.015;
#[allow(clippy::approx_constant)]
pub const REFERENCE_INTERVAL: (f64, f64) = (0.318, 0.718);

/// Points of the pre-scan that brackets roots.
pub const PRESCAN_POINTS: usize = 1000;
/// Abscissa tolerance of every bisection.
pub const ROOT_TOL: f64 = 1e-6;

/// Which additive error term enters the noisy noncontextual bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ErrMode {
    /// `(eps_b + 2 eps_bb + eps_aa)/2` from the depolarizing epsilons.
    #[default]
    Thm2Direct,
    /// `v (31 - 29v + 9v²)/2`.
    AppendixErr,
    /// `v (31 - 21v + 9v²)/8`.
    ErrPrime,
}

/// Which confusabilities feed the bound. The abscissa is always the ideal
/// overlap `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CMode {
    /// `c_ab = c`, `c_aabb = c²`.
    IdealOverlap,
    /// The confusabilities the noisy experiment actually produces.
    #[default]
    ObservedConfusability,
}

impl ErrMode {
    pub const ALL: [ErrMode; 3] = [ErrMode::Thm2Direct, ErrMode::AppendixErr, ErrMode::ErrPrime];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrMode::Thm2Direct => "thm2-direct",
            ErrMode::AppendixErr => "appendix-err",
            ErrMode::ErrPrime => "err-prime",
        }
    }
}

impl CMode {
    pub const ALL: [CMode; 2] = [CMode::IdealOverlap, CMode::ObservedConfusability];

    pub fn as_str(self) -> &'static str {
        match self {
            CMode::IdealOverlap => "ideal-overlap",
            CMode::ObservedConfusability => "observed-confusability",
        }
    }
}

impl fmt::Display for ErrMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for CMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ErrMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ErrMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown err-mode {s:?}"))
    }
}

impl FromStr for CMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        CMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown c-mode {s:?}"))
    }
}

/// An `(err-mode, c-mode)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct Mode {
    pub err_mode: ErrMode,
    pub c_mode: CMode,
}

impl Mode {
    pub fn new(err_mode: ErrMode, c_mode: CMode) -> Self {
        Self { err_mode, c_mode }
    }

    pub fn all() -> impl Iterator<Item = Mode> {
        ErrMode::ALL
            .into_iter()
            .flat_map(|e| CMode::ALL.into_iter().map(move |c| Mode::new(e, c)))
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.err_mode, self.c_mode)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub c_grid: Vec<f64>,
    pub v_grid: Vec<f64>,
    pub mode: Mode,
}

impl SweepSpec {
    pub fn new(c_grid: Vec<f64>, v_grid: Vec<f64>, mode: Mode) -> Result<Self> {
        for (name, grid) in [("c", &c_grid), ("v", &v_grid)] {
            for &x in grid.iter() {
                check_unit(if name == "c" { "c_ab" } else { "v" }, x)?;
            }
            if grid.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::GridMismatch(format!("{name}-grid is not sorted")));
            }
        }
        Ok(Self {
            c_grid,
            v_grid,
            mode,
        })
    }
}

/// `n` equally spaced points covering `[0, 1]`.
pub fn unit_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

/// Noisy noncontextual bound at ideal overlap `c` and noise `v`.
pub fn nc_bound_for_mode(v: f64, c: f64, mode: Mode) -> Result<f64> {
    let (c_ab, c_aabb) = match mode.c_mode {
        CMode::IdealOverlap => (c, c * c),
        CMode::ObservedConfusability => {
            let ov = depolarized_overlaps(v, c)?;
            (ov.c_ab, ov.c_aabb)
        }
    };
    let terms = err_terms(v)?;
    let err = match mode.err_mode {
        ErrMode::Thm2Direct => terms.err_thm2,
        ErrMode::AppendixErr => terms.err_appendix,
        ErrMode::ErrPrime => terms.err_prime,
    };
    Ok(nc_bound_ideal(c_ab, c_aabb)? + err)
}

/// `g(c; v) = F_q(v, c) - NC(v, c)`; positive means a quantum advantage.
pub fn advantage(v: f64, c: f64, mode: Mode) -> Result<f64> {
    Ok(quantum_noisy_fidelity(v, c)? - nc_bound_for_mode(v, c, mode)?)
}

/// Root of `f` in `[lo, hi]` given `f(lo) > 0 >= f(hi)` or the reverse.
fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let lo_positive = f(lo)? > 0.0;
    while hi - lo > ROOT_TOL / 4.0 {
        let mid = 0.5 * (lo + hi);
        if (f(mid)? > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Range of ideal overlaps where the quantum fidelity beats the bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationRegion {
    pub v: f64,
    pub mode: Mode,
    /// `None` when there is no violation.
    pub c_lo: Option<f64>,
    pub c_hi: Option<f64>,
    /// Observed confusability `c_ab^obs` at the endpoints.
    pub observed_lo: Option<f64>,
    pub observed_hi: Option<f64>,
    /// Every sign change found, in increasing `c`.
    pub roots: Vec<f64>,
    /// More than one violating interval; `c_lo..c_hi` is then their hull.
    pub anomaly: bool,
}

impl ViolationRegion {
    pub fn is_empty(&self) -> bool {
        self.c_lo.is_none()
    }

    pub fn contains(&self, c: f64) -> bool {
        matches!((self.c_lo, self.c_hi), (Some(lo), Some(hi)) if lo <= c && c <= hi)
    }

    /// `max(|c_lo - 0.318|, |c_hi - 0.718|)`.
    pub fn reference_error(&self) -> Option<f64> {
        let (lo, hi) = (self.c_lo?, self.c_hi?);
        Some(
            (lo - REFERENCE_INTERVAL.0)
                .abs()
                .max((hi - REFERENCE_INTERVAL.1).abs()),
        )
    }
}

/// Pre-scans `c_i = i/999` and bisects every sign change of `g` to 1e-6.
pub fn violation_interval(v: f64, mode: Mode) -> Result<ViolationRegion> {
    let v = check_unit("v", v)?;
    let g = |c: f64| advantage(v, c, mode);
    let grid = unit_grid(PRESCAN_POINTS);
    let positive = grid
        .iter()
        .map(|&c| Ok(g(c)? > 0.0))
        .collect::<Result<Vec<bool>>>()?;

    let mut roots = Vec::new();
    for i in 0..grid.len() - 1 {
        if positive[i] != positive[i + 1] {
            roots.push(bisect(grid[i], grid[i + 1], g)?);
        }
    }
    let first = positive.iter().position(|&p| p);
    let last = positive.iter().rposition(|&p| p);
    let (c_lo, c_hi) = match (first, last) {
        (Some(i), Some(j)) => (
            Some(if i == 0 { 0.0 } else { roots[0] }),
            Some(if j == grid.len() - 1 {
                1.0
            } else {
                *roots
                    .last()
                    .expect("a crossing precedes a non-violating tail")
            }),
        ),
        _ => (None, None),
    };
    let runs = positive.windows(2).filter(|w| !w[0] && w[1]).count() + usize::from(positive[0]);
    let observed = |c: Option<f64>| -> Result<Option<f64>> {
        c.map(|c| depolarized_overlaps(v, c).map(|o| o.c_ab))
            .transpose()
    };
    Ok(ViolationRegion {
        v,
        mode,
        observed_lo: observed(c_lo)?,
        observed_hi: observed(c_hi)?,
        c_lo,
        c_hi,
        roots,
        anomaly: runs > 1,
    })
}

/// Violation regions for every `v` of the spec's grid.
pub fn sweep_regions(spec: &SweepSpec) -> Result<Vec<ViolationRegion>> {
    spec.v_grid
        .iter()
        .map(|&v| violation_interval(v, spec.mode))
        .collect()
}

/// Consecutive grid pairs `(v1, v2)` whose regions are not nested.
pub fn antitonicity_failures(regions: &[ViolationRegion]) -> Vec<(f64, f64)> {
    regions
        .windows(2)
        .filter(|w| {
            let (outer, inner) = (&w[0], &w[1]);
            match (inner.c_lo, inner.c_hi, outer.c_lo, outer.c_hi) {
                (None, ..) => false,
                (Some(_), Some(_), None, _) => true,
                (Some(lo), Some(hi), Some(olo), Some(ohi)) => {
                    lo < olo - ROOT_TOL || hi > ohi + ROOT_TOL
                }
                _ => true,
            }
        })
        .map(|w| (w[0].v, w[1].v))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalNoise {
    pub c_ab: f64,
    pub v_star: f64,
    /// Whether the pre-scan confirmed `g` to be nonincreasing in `v`.
    pub monotone: bool,
}

/// Largest `v` with `g(c; v) >= 0`, by bisection after a pre-scan of `v`.
///
/// When the pre-scan shows `g` increasing somewhere, the last grid point
/// with `g >= 0` is refined against its successor instead of the first
/// sign change.
pub fn critical_noise(c_ab: f64, mode: Mode) -> Result<CriticalNoise> {
    let c = check_unit("c_ab", c_ab)?;
    if c == 0.0 || c == 1.0 {
        return Err(Error::Domain {
            name: "c_ab",
            value: c,
            domain: "(0, 1)",
        });
    }
    let g = |v: f64| advantage(v, c, mode);
    let grid = unit_grid(PRESCAN_POINTS + 1);
    let values = grid.iter().map(|&v| g(v)).collect::<Result<Vec<f64>>>()?;
    let monotone = values.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let last_ok = if monotone {
        values
            .iter()
            .position(|&x| x < 0.0)
            .map(|i| i.saturating_sub(1))
    } else {
        values
            .iter()
            .rposition(|&x| x >= 0.0)
            .filter(|&i| i + 1 < grid.len())
    };
    let v_star = match last_ok {
        None if values[0] < 0.0 => 0.0,
        None => 1.0,
        Some(i) if values[i] < 0.0 => 0.0,
        Some(i) => {
            let (lo, hi) = (grid[i], grid[i + 1]);
            // g(lo) >= 0 > g(hi); shift so the bisection sign test is strict
            let shifted = |v: f64| Ok(if g(v)? >= 0.0 { 1.0 } else { -1.0 });
            bisect(lo, hi, shifted)?
        }
    };
    Ok(CriticalNoise {
        c_ab: c,
        v_star,
        monotone,
    })
}

/// A labelled series of `(x, y)` points with strictly increasing `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSeries {
    pub label: String,
    pub mode: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<[f64; 2]>,
}

impl CurveSeries {
    pub fn new(
        label: impl Into<String>,
        mode: impl Into<String>,
        x_label: impl Into<String>,
        y_label: impl Into<String>,
        points: Vec<[f64; 2]>,
    ) -> Result<Self> {
        if let Some(p) = points
            .iter()
            .find(|p| !p[0].is_finite() || !p[1].is_finite())
        {
            return Err(Error::Invariant(format!("non-finite point {p:?}")));
        }
        if points.windows(2).any(|w| w[1][0] <= w[0][0]) {
            return Err(Error::Invariant(
                "abscissae are not strictly increasing".into(),
            ));
        }
        Ok(Self {
            label: label.into(),
            mode: mode.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            points,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for [x, y] in &self.points {
            out.push_str(&format!("{x},{y}\n"));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("curve series always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: CurveSeries = serde_json::from_str(text)
            .map_err(|e| Error::Precondition(format!("bad curve document: {e}")))?;
        Self::new(raw.label, raw.mode, raw.x_label, raw.y_label, raw.points)
    }
}

/// Regions as CSV with header `v,c_lo,c_hi`; empty regions leave both
/// endpoint fields blank.
pub fn regions_to_csv(regions: &[ViolationRegion]) -> String {
    let mut out = String::from("v,c_lo,c_hi\n");
    for r in regions {
        match (r.c_lo, r.c_hi) {
            (Some(lo), Some(hi)) => out.push_str(&format!("{},{lo},{hi}\n", r.v)),
            _ => out.push_str(&format!("{},,\n", r.v)),
        }
    }
    out
}

/// Optimal quantum fidelity and the ideal noncontextual bound with
/// `c_aabb = c²` over `c_grid`.
pub fn fidelity_curves(c_grid: &[f64]) -> Result<(CurveSeries, CurveSeries)> {
    let quantum = c_grid
        .iter()
        .map(|&c| Ok([c, quantum_optimal_fidelity(c)?]))
        .collect::<Result<Vec<_>>>()?;
    let nc = c_grid
        .iter()
        .map(|&c| Ok([c, nc_bound_ideal(c, c * c)?]))
        .collect::<Result<Vec<_>>>()?;
    Ok((
        CurveSeries::new("quantum", "optimal", "c_ab", "F_g", quantum)?,
        CurveSeries::new("noncontextual", "ideal", "c_ab", "F_g", nc)?,
    ))
}

/// Critical noise `v*(c)` over the interior points of `c_grid`.
pub fn noise_resistance_curve(c_grid: &[f64], mode: Mode) -> Result<CurveSeries> {
    let points = c_grid
        .iter()
        .filter(|&&c| c > 0.0 && c < 1.0)
        .map(|&c| Ok([c, critical_noise(c, mode)?.v_star]))
        .collect::<Result<Vec<_>>>()?;
    CurveSeries::new(
        format!("critical-noise {mode}"),
        mode.to_string(),
        "c_ab",
        "v",
        points,
    )
}

/// One row of the mode comparison at fixed noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeComparison {
    pub region: ViolationRegion,
    /// Endpoint distance to the reference interval; `None` when empty.
    pub error: Option<f64>,
}

/// Violation region in every mode, best match against the reference
/// interval first. Ties keep the enumeration order.
pub fn compare_modes(v: f64) -> Result<Vec<ModeComparison>> {
    let mut rows = Mode::all()
        .map(|mode| {
            let region = violation_interval(v, mode)?;
            let error = region.reference_error();
            Ok(ModeComparison { region, error })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        let key = |r: &ModeComparison| r.error.unwrap_or(f64::INFINITY);
        key(a).total_cmp(&key(b))
    });
    Ok(rows)
}
