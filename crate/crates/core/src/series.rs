//! Truncation traces of `S_α` and its diagonal lower bound, and linear-growth fitting.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::domain::{DomainSpec, MultiIndex};
use crate::error::{Error, Result};
use crate::hankel::{diagonal_sum, s_alpha_partial};
use crate::output::{json_f64, sig17};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SeriesKind {
    PartialSum,
    DiagonalSum,
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeriesKind::PartialSum => "PartialSum",
            SeriesKind::DiagonalSum => "DiagonalSum",
        })
    }
}

/// `(N, value)` pairs for one `α` on one domain, `N` strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTrace {
    points: Vec<(u64, f64)>,
    pub alpha: MultiIndex,
    pub domain_key: String,
    pub kind: SeriesKind,
}

impl SeriesTrace {
    pub fn new(points: Vec<(u64, f64)>, alpha: MultiIndex, domain_key: String, kind: SeriesKind) -> Result<Self> {
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Usage(
                "trace truncation orders must be strictly increasing".into(),
            ));
        }
        if let Some(&(n, v)) = points.iter().find(|p| p.1.is_nan() || p.1 < 0.0) {
            return Err(Error::Usage(format!("trace value at N = {n} is negative or NaN: {v}")));
        }
        Ok(SeriesTrace {
            points,
            alpha,
            domain_key,
            kind,
        })
    }

    pub fn points(&self) -> &[(u64, f64)] {
        &self.points
    }

    pub fn value_at(&self, order: u64) -> Option<f64> {
        self.points.iter().find(|p| p.0 == order).map(|p| p.1)
    }

    /// CSV with header `N,value,alpha,domain,kind`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["N", "value", "alpha", "domain", "kind"])
            .expect("in-memory write");
        let alpha = self.alpha.to_string();
        let kind = self.kind.to_string();
        for &(n, v) in &self.points {
            w.write_record([
                n.to_string(),
                sig17(v),
                alpha.clone(),
                self.domain_key.clone(),
                kind.clone(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "alpha": self.alpha.to_string(),
            "domain": self.domain_key,
            "kind": self.kind.to_string(),
            "points": self.points.iter().map(|&(n, v)| json!({"N": n, "value": json_f64(v)})).collect::<Vec<_>>(),
        })
    }
}

/// Evaluates `kind` for every `N` in `grid`.
pub fn series_trace(domain: &DomainSpec, alpha: &MultiIndex, grid: &[u64], kind: SeriesKind) -> Result<SeriesTrace> {
    let points = grid
        .iter()
        .map(|&n| {
            let v = match kind {
                SeriesKind::PartialSum => s_alpha_partial(domain, alpha, n)?,
                SeriesKind::DiagonalSum => diagonal_sum(domain, alpha, n)?,
            };
            Ok((n, v))
        })
        .collect::<Result<Vec<_>>>()?;
    SeriesTrace::new(points, alpha.clone(), domain.key(), kind)
}

/// A set of truncation orders.
///
/// Text forms: `start:stop:xR` (geometric, ratio `R > 1`), `start:stop:+step`
/// (arithmetic) or an explicit list `a,b,c`. Geometric points are `round(start·R^i)`
/// up to `stop`; repeated values after rounding are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct NGrid(Vec<u64>);

impl NGrid {
    pub fn geometric(start: u64, stop: u64, ratio: f64) -> Result<Self> {
        if !(ratio.is_finite() && ratio > 1.0) {
            return Err(Error::Usage(format!("geometric grid ratio must exceed 1, got {ratio}")));
        }
        if start == 0 || start > stop {
            return Err(Error::Usage(format!(
                "geometric grid needs 0 < start <= stop, got {start}:{stop}"
            )));
        }
        let limit = stop as f64 * (1.0 + 1e-9);
        let mut out: Vec<u64> = Vec::new();
        for i in 0.. {
            let x = start as f64 * ratio.powi(i);
            if x > limit {
                break;
            }
            let n = (x.round() as u64).min(stop);
            if out.last() != Some(&n) {
                out.push(n);
            }
        }
        Ok(NGrid(out))
    }

    pub fn arithmetic(start: u64, stop: u64, step: u64) -> Result<Self> {
        if step == 0 || start > stop {
            return Err(Error::Usage(format!(
                "arithmetic grid needs step > 0 and start <= stop, got {start}:{stop}:+{step}"
            )));
        }
        Ok(NGrid((start..=stop).step_by(step as usize).collect()))
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }
}

impl FromStr for NGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_u = |p: &str| {
            p.trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad N-grid value '{p}' in '{s}'")))
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [start, stop, step] => {
                let (start, stop) = (parse_u(start)?, parse_u(stop)?);
                let step = step.trim();
                if let Some(r) = step.strip_prefix('x') {
                    let ratio = r
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad geometric ratio '{r}' in '{s}'")))?;
                    NGrid::geometric(start, stop, ratio)
                } else if let Some(d) = step.strip_prefix('+') {
                    NGrid::arithmetic(start, stop, parse_u(d)?)
                } else {
                    Err(Error::Parse(format!("N-grid step must be 'xR' or '+d', got '{step}'")))
                }
            }
            [list] => {
                let v = list.split(',').map(parse_u).collect::<Result<Vec<_>>>()?;
                if v.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Parse(format!("N-grid list must be strictly increasing: '{s}'")));
                }
                Ok(NGrid(v))
            }
            _ => Err(Error::Parse(format!("cannot parse N-grid '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    DivergesLinearly,
    Converges,
    Inconclusive,
}

/// Thresholds for [`divergence_fit_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitConfig {
    /// Minimum R² of the linear fit for a divergence verdict.
    pub min_r_squared: f64,
    /// Minimum `slope·N_max / value(N_max)`: the share of the top value explained by
    /// linear growth. Keeps slowly saturating sequences from passing as linear.
    pub min_linear_share: f64,
    /// Largest per-unit-`N` increment allowed over the last quarter of the window
    /// for a convergence verdict.
    pub max_tail_increment: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            min_r_squared: 0.99,
            min_linear_share: 0.5,
            max_tail_increment: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub fit_window: (u64, u64),
    /// Largest `|Δvalue| / ΔN` between consecutive points in the last quarter of the window.
    pub tail_increment: f64,
    pub verdict: Verdict,
}

impl DivergenceReport {
    pub fn to_json(&self) -> Value {
        json!({
            "slope": json_f64(self.slope),
            "intercept": json_f64(self.intercept),
            "r_squared": json_f64(self.r_squared),
            "fit_window": [self.fit_window.0, self.fit_window.1],
            "tail_increment": json_f64(self.tail_increment),
            "verdict": format!("{:?}", self.verdict),
        })
    }
}

/// Least-squares `(slope, intercept, r²)`; `r² = 0` for a constant series.
fn least_squares(points: &[(u64, f64)]) -> (f64, f64, f64) {
    let k = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0 as f64).sum::<f64>() / k;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / k;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (dx, dy) = (x as f64 - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy > 0.0 {
        ((sxy * sxy) / (sxx * syy)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (slope, intercept, r_squared)
}

/// [`divergence_fit_with`] at the default thresholds.
pub fn divergence_fit(trace: &SeriesTrace) -> Result<DivergenceReport> {
    divergence_fit_with(trace, &FitConfig::default())
}

/// Fits `value ≈ slope·N + intercept` over the upper half of the trace.
///
/// `DivergesLinearly` needs `slope > 0`, `r² ≥ min_r_squared` and a linear share of at
/// least `min_linear_share`; `Converges` needs the tail increment at or below
/// `max_tail_increment`. Neither or both gives `Inconclusive`.
pub fn divergence_fit_with(trace: &SeriesTrace, cfg: &FitConfig) -> Result<DivergenceReport> {
    let pts = trace.points();
    if pts.len() < 8 {
        return Err(Error::Usage(format!(
            "divergence fit needs at least 8 trace points, got {}",
            pts.len()
        )));
    }
    let (n_min, n_max) = (pts[0].0, pts[pts.len() - 1].0);
    if n_max < 4 * n_min.max(1) {
        return Err(Error::Usage(format!(
            "divergence fit needs N to span a factor of 4, got {n_min}..{n_max}"
        )));
    }
    let window = &pts[pts.len() / 2..];
    let (slope, intercept, r_squared) = least_squares(window);

    let tail_len = window.len().div_ceil(4).max(2);
    let tail = &window[window.len() - tail_len..];
    let tail_increment = tail
        .windows(2)
        .map(|w| (w[1].1 - w[0].1).abs() / (w[1].0 - w[0].0) as f64)
        .fold(0.0, f64::max);

    let (top_n, top_value) = window[window.len() - 1];
    let linear_share = if top_value > 0.0 {
        slope * top_n as f64 / top_value
    } else {
        0.0
    };
    let diverges = slope > 0.0 && r_squared >= cfg.min_r_squared && linear_share >= cfg.min_linear_share;
    let converges = tail_increment <= cfg.max_tail_increment;
    let verdict = match (diverges, converges) {
        (true, false) => Verdict::DivergesLinearly,
        (false, true) => Verdict::Converges,
        _ => Verdict::Inconclusive,
    };
    Ok(DivergenceReport {
        slope,
        intercept,
        r_squared,
        fit_window: (window[0].0, top_n),
        tail_increment,
        verdict,
    })
}
