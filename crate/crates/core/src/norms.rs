//! Closed-form squared monomial norms `c_γ² = ∫_Ω |z^γ|² dV`, kept in log domain.
//!
//! * disc: `π / (γ + 1)`
//! * polydisc: `∏_j π / (γ_j + 1)`
//! * ellipsoid: `π^n / ∏ m_j · ∏ Γ((γ_j+1)/m_j) / Γ(1 + Σ (γ_j+1)/m_j)`
//!
//! Ratios `c_{γ+α}² / c_γ²` are formed directly from log-Gamma differences, so
//! nothing overflows even where `Γ(1 + Σ (γ_j+1)/m_j)` exceeds `f64::MAX`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fs;
use std::io::{self, Write as _};
use std::path::Path;
use std::sync::RwLock;

use crate::domain::{DomainSpec, MultiIndex};
use crate::error::Result;
use crate::gamma::{difference_unchecked, log_beta};

/// `ln c_γ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNormValue {
    pub log_c_squared: f64,
}

impl LogNormValue {
    pub fn c_squared(&self) -> f64 {
        self.log_c_squared.exp()
    }
}

/// `ln c_γ²` on `domain`.
pub fn log_c_squared(domain: &DomainSpec, gamma: &MultiIndex) -> Result<LogNormValue> {
    domain.check_index(gamma)?;
    let g = gamma.entries();
    let log_c_squared = match domain {
        DomainSpec::Disc => PI.ln() - (g[0] as f64 + 1.0).ln(),
        DomainSpec::Polydisc(n) => *n as f64 * PI.ln() - g.iter().map(|&x| (x as f64 + 1.0).ln()).sum::<f64>(),
        DomainSpec::Ellipsoid(m) => {
            // Γ(s₁)⋯Γ(sₙ)/Γ(1+T) = (1/T) ∏_{k≥2} B(s₁+⋯+s_{k−1}, s_k) with T = Σ s_k;
            // the Beta chain avoids cancelling large log-gammas against each other.
            let mut acc = m.len() as f64 * PI.ln();
            let mut total = 0.0;
            for (k, (&gj, &mj)) in g.iter().zip(m).enumerate() {
                let s = (gj as f64 + 1.0) / mj;
                acc -= mj.ln();
                if k > 0 {
                    acc += log_beta(total, s)?;
                }
                total += s;
            }
            acc - total.ln()
        }
    };
    Ok(LogNormValue { log_c_squared })
}

/// `ln(c_{γ+α}² / c_γ²)`.
pub fn log_ratio(domain: &DomainSpec, gamma: &MultiIndex, alpha: &MultiIndex) -> Result<f64> {
    domain.check_index(gamma)?;
    domain.check_index(alpha)?;
    Ok(log_ratio_unchecked(domain, gamma.entries(), alpha.entries()))
}

/// [`log_ratio`] without the dimension checks; slices must have the domain's length.
pub(crate) fn log_ratio_unchecked(domain: &DomainSpec, gamma: &[u32], alpha: &[u32]) -> f64 {
    match domain {
        DomainSpec::Disc | DomainSpec::Polydisc(_) => gamma
            .iter()
            .zip(alpha)
            .map(|(&g, &a)| -(a as f64 / (g as f64 + 1.0)).ln_1p())
            .sum(),
        DomainSpec::Ellipsoid(m) => {
            let mut base = 1.0;
            let mut shift = 0.0;
            let mut acc = 0.0;
            for ((&g, &a), &mj) in gamma.iter().zip(alpha).zip(m) {
                let x = (g as f64 + 1.0) / mj;
                let da = a as f64 / mj;
                base += x;
                shift += da;
                acc += difference_unchecked(x, da);
            }
            acc - difference_unchecked(base, shift)
        }
    }
}

/// Thread-safe memo of `ln c_γ²` keyed by canonical domain string and `γ`.
///
/// Concurrent writers race benignly: values are deterministic, last write wins.
#[derive(Debug, Default)]
pub struct NormCache {
    entries: RwLock<HashMap<(String, MultiIndex), f64>>,
}

impl NormCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn log_c_squared(&self, domain: &DomainSpec, gamma: &MultiIndex) -> Result<LogNormValue> {
        let key = (domain.key(), gamma.clone());
        if let Some(&v) = self.entries.read().expect("cache lock poisoned").get(&key) {
            return Ok(LogNormValue { log_c_squared: v });
        }
        let value = log_c_squared(domain, gamma)?;
        self.entries
            .write()
            .expect("cache lock poisoned")
            .insert(key, value.log_c_squared);
        Ok(value)
    }

    /// Loads a cache file. A missing file yields an empty cache; malformed lines
    /// and entries whose index does not fit the domain are skipped.
    pub fn load(path: &Path) -> io::Result<Self> {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Self::new()),
            Err(e) => return Err(e),
        };
        let mut map = HashMap::new();
        for line in text.lines() {
            if let Some((key, value)) = parse_cache_line(line) {
                map.insert(key, value);
            }
        }
        Ok(NormCache {
            entries: RwLock::new(map),
        })
    }

    /// Writes every entry, sorted by key so the file is reproducible.
    pub fn save(&self, path: &Path) -> io::Result<()> {
        let map = self.entries.read().expect("cache lock poisoned");
        let mut rows: Vec<_> = map.iter().collect();
        rows.sort_by(|a, b| a.0.cmp(b.0));
        let mut out = Vec::new();
        for ((domain, gamma), value) in rows {
            writeln!(out, "{domain}\t{gamma}\t{value:.16e}")?;
        }
        fs::write(path, out)
    }
}

fn parse_cache_line(line: &str) -> Option<((String, MultiIndex), f64)> {
    let mut fields = line.split('\t');
    let domain: DomainSpec = fields.next()?.parse().ok()?;
    let gamma: MultiIndex = fields.next()?.parse().ok()?;
    let value: f64 = fields.next()?.trim().parse().ok()?;
    if fields.next().is_some() || !value.is_finite() || gamma.dim() != domain.dimension() {
        return None;
    }
    Some(((domain.key(), gamma), value))
}
