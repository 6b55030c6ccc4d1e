//! Hilbert–Schmidt diagnostics of Hankel operators `H_f̄` with anti-holomorphic symbols.
//!
//! For the orthonormal basis `z^γ / c_γ`, the squared norm of `H_{z̄^α}` applied to
//! a basis element is
//!
//! ```text
//! c_{γ+α}² / c_γ²  −  c_γ² / c_{γ−α}²
//! ```
//!
//! where the second term is zero unless `γ ⪰ α`. Summing over `γ` gives `S_α`,
//! and `‖H_f̄‖²_HS = Σ_α |f_α|² S_α`. Everything here works with truncations
//! `|γ| ≤ N`, so each inequality becomes a finite statement.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Read;

use num_complex::Complex64;
use serde::Serialize;

use crate::domain::{enumerate_order, enumerate_up_to_order, DomainSpec, MultiIndex};
use crate::error::{Error, Result};
use crate::norms::{log_c_squared, log_ratio_unchecked};
use crate::oracles::{monte_carlo_c_squared, radial_quadrature_c_squared, OracleEstimate};
use crate::summation::{blocked_sum, compensated_sum};

/// Rounding slack below zero that a row norm may show before it is treated as a bug.
pub const ROW_NORM_CLAMP: f64 = 1e-12;

/// Finitely many Taylor coefficients `f_α` of a holomorphic symbol `f`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SymbolCoefficients {
    dimension: usize,
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl SymbolCoefficients {
    pub fn new(dimension: usize) -> Self {
        assert!(dimension >= 1, "symbol dimension must be positive");
        SymbolCoefficients {
            dimension,
            terms: BTreeMap::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Sets `f_α`; zero coefficients remove the term.
    pub fn insert(&mut self, alpha: MultiIndex, coefficient: Complex64) -> Result<()> {
        if alpha.dim() != self.dimension {
            return Err(Error::Usage(format!(
                "coefficient index ({alpha}) has length {} but the symbol has dimension {}",
                alpha.dim(),
                self.dimension
            )));
        }
        if coefficient == Complex64::new(0.0, 0.0) {
            self.terms.remove(&alpha);
        } else {
            self.terms.insert(alpha, coefficient);
        }
        Ok(())
    }

    pub fn with_term(mut self, alpha: impl Into<MultiIndex>, coefficient: Complex64) -> Result<Self> {
        self.insert(alpha.into(), coefficient)?;
        Ok(self)
    }

    pub fn get(&self, alpha: &MultiIndex) -> Option<Complex64> {
        self.terms.get(alpha).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Parses lines `γ₁,…,γₙ<TAB>re[<TAB>im]`. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(b'\t')
            .has_headers(false)
            .comment(Some(b'#'))
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut symbol: Option<SymbolCoefficients> = None;
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Parse(format!("symbol record {}: {e}", line + 1)))?;
            if record.iter().all(|f| f.is_empty()) {
                continue;
            }
            if record.len() < 2 || record.len() > 3 {
                return Err(Error::Parse(format!(
                    "symbol record {}: expected 'indices<TAB>re<TAB>im', got {} fields",
                    line + 1,
                    record.len()
                )));
            }
            let alpha: MultiIndex = record[0].parse()?;
            let number = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse(format!("symbol record {}: bad number '{s}'", line + 1)))
            };
            let re = number(&record[1])?;
            let im = if record.len() == 3 { number(&record[2])? } else { 0.0 };
            let sym = symbol.get_or_insert_with(|| SymbolCoefficients::new(alpha.dim()));
            let prev = sym.get(&alpha).unwrap_or_default();
            sym.insert(alpha, prev + Complex64::new(re, im))?;
        }
        symbol.ok_or_else(|| Error::Parse("symbol file has no coefficients".into()))
    }

    pub fn read_from(mut reader: impl Read) -> Result<Self> {
        let mut text = String::new();
        reader
            .read_to_string(&mut text)
            .map_err(|e| Error::Parse(format!("reading symbol: {e}")))?;
        Self::parse(&text)
    }
}

fn check_pair(domain: &DomainSpec, gamma: &MultiIndex, alpha: &MultiIndex) -> Result<()> {
    domain.check_index(gamma)?;
    domain.check_index(alpha)
}

fn ratio(domain: &DomainSpec, gamma: &[u32], alpha: &[u32]) -> f64 {
    log_ratio_unchecked(domain, gamma, alpha).exp()
}

/// `c_γ² / c_{γ−α}²`, zero when `γ ⪰̸ α`.
fn lower_ratio(domain: &DomainSpec, gamma: &[u32], alpha: &[u32]) -> f64 {
    match difference(gamma, alpha) {
        Some(lower) => ratio(domain, &lower, alpha),
        None => 0.0,
    }
}

fn difference(gamma: &[u32], alpha: &[u32]) -> Option<Vec<u32>> {
    gamma.iter().zip(alpha).map(|(&g, &a)| g.checked_sub(a)).collect()
}

fn row_raw(domain: &DomainSpec, gamma: &[u32], alpha: &[u32]) -> f64 {
    let upper = log_ratio_unchecked(domain, gamma, alpha);
    match difference(gamma, alpha) {
        Some(lower) => {
            let lower = log_ratio_unchecked(domain, &lower, alpha);
            lower.exp() * (upper - lower).exp_m1()
        }
        None => upper.exp(),
    }
}

fn clamp_row(raw: f64) -> f64 {
    if (-ROW_NORM_CLAMP..0.0).contains(&raw) {
        0.0
    } else {
        raw
    }
}

/// Row norm before the rounding clamp. Negative values below `−1e-12` signal a bug.
pub fn hankel_row_norm_squared_raw(domain: &DomainSpec, gamma: &MultiIndex, alpha: &MultiIndex) -> Result<f64> {
    check_pair(domain, gamma, alpha)?;
    Ok(row_raw(domain, gamma.entries(), alpha.entries()))
}

/// `‖H_{z̄^α}(z^γ/c_γ)‖² = c_{γ+α}²/c_γ² − c_γ²/c_{γ−α}²`.
///
/// Values in `[−1e-12, 0)` are clamped to zero; anything more negative is returned as is.
pub fn hankel_row_norm_squared(domain: &DomainSpec, gamma: &MultiIndex, alpha: &MultiIndex) -> Result<f64> {
    hankel_row_norm_squared_raw(domain, gamma, alpha).map(clamp_row)
}

/// Coefficient and index of `P(z̄^β z^γ)`: `(c_γ²/c_{γ−β}², γ−β)` if `γ ⪰ β`, else `(0, None)`.
pub fn bergman_project_monomial(
    domain: &DomainSpec,
    beta: &MultiIndex,
    gamma: &MultiIndex,
) -> Result<(f64, Option<MultiIndex>)> {
    check_pair(domain, gamma, beta)?;
    match gamma.checked_sub(beta) {
        Some(lower) => Ok((ratio(domain, lower.entries(), beta.entries()), Some(lower))),
        None => Ok((0.0, None)),
    }
}

/// Settings for [`gram_oracle_row_norm_squared`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GramOracleConfig {
    /// Relative tolerance for radial quadrature.
    pub tol: f64,
    /// Monte Carlo sample count, used where quadrature is unavailable.
    pub samples: u64,
    pub seed: u64,
}

impl Default for GramOracleConfig {
    fn default() -> Self {
        GramOracleConfig {
            tol: 1e-11,
            samples: 2_000_000,
            seed: 0,
        }
    }
}

/// Gram-expansion row norm with a propagated error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GramEstimate {
    pub value: f64,
    pub abs_error: f64,
}

fn oracle_c_squared(domain: &DomainSpec, gamma: &MultiIndex, cfg: &GramOracleConfig) -> Result<OracleEstimate> {
    match radial_quadrature_c_squared(domain, gamma, cfg.tol) {
        Err(Error::Capability { .. }) => monte_carlo_c_squared(domain, gamma, cfg.samples, cfg.seed),
        other => other,
    }
}

/// Row norm recomputed from oracle-integrated Gram entries.
///
/// Expands `‖z̄^α z^γ − λ z^{γ−α}‖² / c_γ²` with `λ = c_γ²/c_{γ−α}²` (zero if
/// `γ ⪰̸ α`) into `‖z̄^α z^γ‖² = c_{γ+α}²`, `⟨z̄^α z^γ, z^{γ−α}⟩ = c_γ²` and
/// `‖z^{γ−α}‖² = c_{γ−α}²`, each integrated numerically. Quadrature is used where
/// available, Monte Carlo otherwise.
pub fn gram_oracle_row_norm_squared(
    domain: &DomainSpec,
    gamma: &MultiIndex,
    alpha: &MultiIndex,
    cfg: &GramOracleConfig,
) -> Result<GramEstimate> {
    check_pair(domain, gamma, alpha)?;
    let upper = oracle_c_squared(domain, &gamma.add(alpha), cfg)?;
    let middle = oracle_c_squared(domain, gamma, cfg)?;
    let (a, b) = (upper.value, middle.value);
    let (ra, rb) = (upper.relative_error(), middle.relative_error());

    let (value, abs_error) = match gamma.checked_sub(alpha) {
        Some(lower) => {
            let lower = oracle_c_squared(domain, &lower, cfg)?;
            let c = lower.value;
            let lambda = b / c;
            let value = (a - 2.0 * lambda * b + lambda * lambda * c) / b;
            let rc = lower.relative_error();
            let err = (a / b) * (ra + rb) + (b / c) * (rb + rc);
            (value, err)
        }
        None => (a / b, (a / b) * (ra + rb)),
    };
    // first-order propagation plus a rounding allowance
    let abs_error = abs_error * (1.0 + ra + rb) + 64.0 * f64::EPSILON * (a / b).abs() + 1e-15;
    Ok(GramEstimate { value, abs_error })
}

fn check_alpha(domain: &DomainSpec, alpha: &MultiIndex) -> Result<()> {
    domain.check_index(alpha)
}

fn order_arg(n: u64) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::Usage(format!("truncation order {n} is too large")))
}

/// `Σ_{|γ| ≤ N}` of row norms: the truncation of `S_α` at order `N`.
pub fn s_alpha_partial(domain: &DomainSpec, alpha: &MultiIndex, order: u64) -> Result<f64> {
    check_alpha(domain, alpha)?;
    if alpha.is_zero() {
        return Ok(0.0);
    }
    let indices = enumerate_up_to_order(domain.dimension(), order_arg(order)?);
    let a = alpha.entries();
    Ok(blocked_sum(&indices, |g| clamp_row(row_raw(domain, g.entries(), a))))
}

/// `Σ_{|γ| = N} c_{γ+α}²/c_γ²`, the lower bound for `S_α`.
pub fn diagonal_sum(domain: &DomainSpec, alpha: &MultiIndex, order: u64) -> Result<f64> {
    check_alpha(domain, alpha)?;
    let indices = enumerate_order(domain.dimension(), order_arg(order)?);
    let a = alpha.entries();
    Ok(blocked_sum(&indices, |g| ratio(domain, g.entries(), a)))
}

/// `Σ_{|γ|<N} c_{γ+α}²/c_γ² − Σ_{|γ|≤N, γ⪰α} c_γ²/c_{γ−α}²`.
///
/// This is what remains after the diagonal is split off the truncated `S_α`; it
/// is a sum of surviving positive terms and therefore nonnegative.
pub fn telescoping_check(domain: &DomainSpec, alpha: &MultiIndex, order: u64) -> Result<f64> {
    check_alpha(domain, alpha)?;
    if alpha.is_zero() {
        return Err(Error::Usage("telescoping check needs a nonzero alpha".into()));
    }
    if order == 0 {
        return Err(Error::Usage("telescoping check needs N >= 1".into()));
    }
    let order = order_arg(order)?;
    let a = alpha.entries();
    let below = enumerate_up_to_order(domain.dimension(), order - 1);
    let positive = blocked_sum(&below, |g| ratio(domain, g.entries(), a));
    let all = enumerate_up_to_order(domain.dimension(), order);
    let negative = blocked_sum(&all, |g| lower_ratio(domain, g.entries(), a));
    Ok(positive - negative)
}

fn check_symbol(domain: &DomainSpec, f: &SymbolCoefficients) -> Result<()> {
    if f.dimension() != domain.dimension() {
        return Err(Error::Usage(format!(
            "symbol has dimension {} but domain {domain} has dimension {}",
            f.dimension(),
            domain.dimension()
        )));
    }
    Ok(())
}

/// `Σ_{α≠0} |f_α|² · S_α(N)`, the truncated squared Hilbert–Schmidt norm of `H_f̄`.
pub fn hs_norm_squared_partial(domain: &DomainSpec, f: &SymbolCoefficients, order: u64) -> Result<f64> {
    check_symbol(domain, f)?;
    let terms = f
        .iter()
        .filter(|(alpha, _)| !alpha.is_zero())
        .map(|(alpha, c)| Ok(c.norm_sqr() * s_alpha_partial(domain, alpha, order)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(compensated_sum(terms))
}

/// `lim_N S_α(N)` on the disc, from the telescoped remainder `Σ_{j=1}^{α} (N−α+j+1)/(N+j+1) → α`.
pub fn disc_s_alpha_limit(alpha: u32) -> f64 {
    alpha as f64
}

/// `(Σ α|f_α|², (1/π)∫_𝔻 |f′|² dA)` for a polynomial symbol on the disc.
///
/// The left value uses the limits `S_α = α`; the right integrates `|f′|²` term by
/// term against the disc norms, `∫ |z^{α−1}|² = c_{α−1}²`. For polynomials the two
/// agree up to rounding.
pub fn disc_dirichlet_check(f: &SymbolCoefficients) -> Result<(f64, f64)> {
    if f.dimension() != 1 {
        return Err(Error::Usage(format!(
            "Dirichlet check is defined on the disc only; symbol has dimension {}",
            f.dimension()
        )));
    }
    let hs = compensated_sum(
        f.iter()
            .map(|(alpha, c)| c.norm_sqr() * disc_s_alpha_limit(alpha.entries()[0])),
    );
    let mut dirichlet = Vec::with_capacity(f.len());
    for (alpha, c) in f.iter() {
        let k = alpha.entries()[0];
        if k == 0 {
            continue;
        }
        let c_sq = log_c_squared(&DomainSpec::Disc, &MultiIndex::new(vec![k - 1]))?.c_squared();
        let kf = k as f64;
        dirichlet.push(kf * kf * c.norm_sqr() * c_sq);
    }
    Ok((hs, compensated_sum(dirichlet) / PI))
}

/// Central-band asymptotic form of `c_{γ+α}²/c_γ²` on a two-dimensional ellipsoid:
///
/// ```text
/// (k/m₁)^{α₁/m₁} ((N−k)/m₂)^{α₂/m₂} / (k/m₁ + (N−k)/m₂)^{α₁/m₁ + α₂/m₂}
/// ```
///
/// for `γ = (k, N−k)` with `N/3 ≤ k ≤ 2N/3` and every Gamma argument above 10.
pub fn stirling_ratio_approx(domain: &DomainSpec, gamma: &MultiIndex, alpha: &MultiIndex) -> Result<f64> {
    let m = match domain {
        DomainSpec::Ellipsoid(m) if m.len() == 2 => m,
        _ => {
            return Err(Error::Usage(format!(
                "Stirling ratio needs a two-dimensional ellipsoid, got {domain}"
            )))
        }
    };
    check_pair(domain, gamma, alpha)?;
    let (k, rest) = (gamma.entries()[0] as u64, gamma.entries()[1] as u64);
    let total = k + rest;
    if 3 * k < total || 3 * k > 2 * total {
        return Err(Error::Usage(format!(
            "k = {k} lies outside the central band [N/3, 2N/3] for N = {total}"
        )));
    }
    let (m1, m2) = (m[0], m[1]);
    let smallest_arg = ((k + 1) as f64 / m1).min((rest + 1) as f64 / m2);
    if smallest_arg <= 10.0 {
        return Err(Error::Usage(format!(
            "Gamma arguments must exceed 10 for the asymptotic form; smallest is {smallest_arg}"
        )));
    }
    let (e1, e2) = (alpha.entries()[0] as f64 / m1, alpha.entries()[1] as f64 / m2);
    let (x, y) = (k as f64 / m1, rest as f64 / m2);
    Ok((e1 * x.ln() + e2 * y.ln() - (e1 + e2) * (x + y).ln()).exp())
}

/// `(j, S_{e_j}(N))` for every coordinate direction, `j` counted from 1.
///
/// The canonical `∂̄`-solution operator on `(0,1)`-forms with holomorphic
/// coefficients is `Σ_j H_{z̄_j}`, so divergence of any entry means it is not
/// Hilbert–Schmidt.
pub fn dbar_solution_hs_diagnostic(domain: &DomainSpec, order: u64) -> Result<Vec<(usize, f64)>> {
    let n = domain.dimension();
    (0..n)
        .map(|j| Ok((j + 1, s_alpha_partial(domain, &MultiIndex::unit(n, j), order)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn row_norm_examples() {
        let v = hankel_row_norm_squared(&DomainSpec::Disc, &idx(&[0]), &idx(&[1])).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        let v = hankel_row_norm_squared(&DomainSpec::Polydisc(2), &idx(&[1, 1]), &idx(&[1, 0])).unwrap();
        assert!((v - 1.0 / 6.0).abs() < 1e-15);
        for dom in [DomainSpec::Disc, DomainSpec::Ellipsoid(vec![0.5, 2.0])] {
            let n = dom.dimension();
            let g = MultiIndex::new(vec![7; n]);
            assert_eq!(hankel_row_norm_squared(&dom, &g, &MultiIndex::zeros(n)).unwrap(), 0.0);
        }
    }

    #[test]
    fn row_norm_dimension_mismatch() {
        let r = hankel_row_norm_squared(&DomainSpec::Polydisc(2), &idx(&[1]), &idx(&[1, 0]));
        assert!(matches!(r, Err(Error::Usage(_))));
    }

    #[test]
    fn projection_examples() {
        let (coef, index) = bergman_project_monomial(&DomainSpec::Disc, &idx(&[1]), &idx(&[3])).unwrap();
        assert!((coef - 0.75).abs() < 1e-15);
        assert_eq!(index, Some(idx(&[2])));
        let dom = DomainSpec::Ellipsoid(vec![2.0, 3.0]);
        let (coef, index) = bergman_project_monomial(&dom, &idx(&[0, 0]), &idx(&[4, 1])).unwrap();
        assert!((coef - 1.0).abs() < 1e-15);
        assert_eq!(index, Some(idx(&[4, 1])));
        let (coef, index) = bergman_project_monomial(&DomainSpec::Polydisc(2), &idx(&[2, 0]), &idx(&[1, 5])).unwrap();
        assert_eq!((coef, index), (0.0, None));
    }

    #[test]
    fn disc_partial_sums() {
        let v = s_alpha_partial(&DomainSpec::Disc, &idx(&[1]), 10).unwrap();
        assert!((v - 11.0 / 12.0).abs() < 1e-14);
        for dom in [DomainSpec::Disc, DomainSpec::Polydisc(3)] {
            let zero = MultiIndex::zeros(dom.dimension());
            assert_eq!(s_alpha_partial(&dom, &zero, 25).unwrap(), 0.0);
        }
    }

    #[test]
    fn disc_partial_sum_brute_force_band() {
        // exact rational telescoping: Σ_{j=1}^{α} (N−α+j+1)/(N+j+1)
        for alpha in 1..=5u32 {
            for order in [10 * alpha as u64, 100, 1000, 10_000] {
                let got = s_alpha_partial(&DomainSpec::Disc, &idx(&[alpha]), order).unwrap();
                let want: f64 = (1..=alpha as u64)
                    .map(|j| (order - alpha as u64 + j + 1) as f64 / (order + j + 1) as f64)
                    .sum();
                assert!((got - want).abs() < 1e-12, "α={alpha} N={order}");
                let a = alpha as f64;
                assert!(got <= a && got >= a - 2.0 * a * a / order as f64);
            }
        }
    }

    #[test]
    fn diagonal_examples() {
        for dom in [DomainSpec::Polydisc(3), DomainSpec::Ellipsoid(vec![0.5, 2.0])] {
            let n = dom.dimension();
            let v = diagonal_sum(&dom, &MultiIndex::zeros(n), 17).unwrap();
            assert_eq!(v, crate::domain::count_of_order(n, 17) as f64);
        }
        let v = diagonal_sum(&DomainSpec::Polydisc(2), &idx(&[1, 1]), 600).unwrap();
        assert!(v >= 600.0 / 15.0);
        let dom = DomainSpec::Ellipsoid(vec![2.0, 3.0]);
        let one = diagonal_sum(&dom, &idx(&[1, 0]), 200).unwrap();
        let two = diagonal_sum(&dom, &idx(&[1, 0]), 400).unwrap();
        assert!((1.9..=2.1).contains(&(two / one)), "{}", two / one);
    }

    #[test]
    fn diagonal_symmetric_under_coordinate_swap() {
        for dom in [DomainSpec::Polydisc(2), DomainSpec::Ellipsoid(vec![1.5, 1.5])] {
            for (a, b) in [(1u32, 0u32), (2, 1), (3, 5)] {
                for order in [5u64, 40, 123] {
                    let x = diagonal_sum(&dom, &idx(&[a, b]), order).unwrap();
                    let y = diagonal_sum(&dom, &idx(&[b, a]), order).unwrap();
                    assert!((x - y).abs() <= 1e-12 * x, "{dom} ({a},{b}) N={order}");
                }
            }
        }
    }

    #[test]
    fn telescoping_examples() {
        let v = telescoping_check(&DomainSpec::Disc, &idx(&[1]), 5).unwrap();
        let want: f64 = (0..5).map(|g| (g as f64 + 1.0) / (g as f64 + 2.0)).sum::<f64>()
            - (1..=5).map(|g| g as f64 / (g as f64 + 1.0)).sum::<f64>();
        assert!((v - want).abs() < 1e-14 && v >= 0.0);
        assert!(telescoping_check(&DomainSpec::Polydisc(2), &idx(&[1, 1]), 10).unwrap() >= 0.0);
        assert!(telescoping_check(&DomainSpec::Ellipsoid(vec![1.0, 1.0]), &idx(&[2, 0]), 12).unwrap() >= 0.0);
        assert!(telescoping_check(&DomainSpec::Disc, &idx(&[0]), 5).is_err());
        assert!(telescoping_check(&DomainSpec::Disc, &idx(&[1]), 0).is_err());
    }

    #[test]
    fn hs_norm_examples() {
        let f = SymbolCoefficients::new(1).with_term(vec![1], c(1.0)).unwrap();
        let v = hs_norm_squared_partial(&DomainSpec::Disc, &f, 10_000).unwrap();
        assert!((v - 1.0).abs() < 1e-3);
        let constant = SymbolCoefficients::new(2).with_term(vec![0, 0], c(5.0)).unwrap();
        assert_eq!(
            hs_norm_squared_partial(&DomainSpec::Polydisc(2), &constant, 30).unwrap(),
            0.0
        );
        let f = SymbolCoefficients::new(1)
            .with_term(vec![1], c(3.0))
            .unwrap()
            .with_term(vec![2], c(2.0))
            .unwrap();
        let v = hs_norm_squared_partial(&DomainSpec::Disc, &f, 1000).unwrap();
        assert!((v - 17.0).abs() <= 0.01 * 17.0);
        // only |f_α|² enters
        let g = SymbolCoefficients::new(1)
            .with_term(vec![1], Complex64::new(0.0, 3.0))
            .unwrap()
            .with_term(vec![2], Complex64::new(-1.2, 1.6))
            .unwrap();
        assert!((hs_norm_squared_partial(&DomainSpec::Disc, &g, 1000).unwrap() - v).abs() < 1e-12);
        assert!(hs_norm_squared_partial(&DomainSpec::Polydisc(2), &f, 10).is_err());
    }

    #[test]
    fn dirichlet_examples() {
        let f = SymbolCoefficients::new(1).with_term(vec![1], c(1.0)).unwrap();
        let (l, r) = disc_dirichlet_check(&f).unwrap();
        assert!((l - 1.0).abs() < 1e-15 && (r - 1.0).abs() < 1e-14);
        let k = SymbolCoefficients::new(1).with_term(vec![0], c(2.5)).unwrap();
        assert_eq!(disc_dirichlet_check(&k).unwrap(), (0.0, 0.0));
        let f = SymbolCoefficients::new(1)
            .with_term(vec![1], c(1.0))
            .unwrap()
            .with_term(vec![3], c(1.0))
            .unwrap();
        let (l, r) = disc_dirichlet_check(&f).unwrap();
        assert!((l - 4.0).abs() < 1e-14 && (r - 4.0).abs() < 1e-13);
        assert!(disc_dirichlet_check(&SymbolCoefficients::new(2)).is_err());
    }

    #[test]
    fn stirling_examples() {
        let ball = DomainSpec::Ellipsoid(vec![1.0, 1.0]);
        let g = idx(&[1500, 1500]);
        assert_eq!(stirling_ratio_approx(&ball, &g, &idx(&[0, 0])).unwrap(), 1.0);
        let approx = stirling_ratio_approx(&ball, &g, &idx(&[1, 0])).unwrap();
        assert!((approx - 0.5).abs() < 1e-12);
        let exact = log_ratio_unchecked(&ball, g.entries(), &[1, 0]).exp();
        assert!((0.45..=0.55).contains(&exact));

        let dom = DomainSpec::Ellipsoid(vec![2.0, 3.0]);
        let g = idx(&[2000, 4000]);
        let approx = stirling_ratio_approx(&dom, &g, &idx(&[0, 1])).unwrap();
        let exact = log_ratio_unchecked(&dom, g.entries(), &[0, 1]).exp();
        assert!((approx / exact - 1.0).abs() <= 0.1, "{approx} vs {exact}");
    }

    #[test]
    fn stirling_preconditions() {
        let ball = DomainSpec::Ellipsoid(vec![1.0, 1.0]);
        assert!(stirling_ratio_approx(&ball, &idx(&[100, 1000]), &idx(&[1, 0])).is_err());
        assert!(stirling_ratio_approx(&ball, &idx(&[5, 5]), &idx(&[1, 0])).is_err());
        assert!(stirling_ratio_approx(&DomainSpec::Polydisc(2), &idx(&[500, 500]), &idx(&[1, 0])).is_err());
    }

    #[test]
    fn dbar_diagnostic_shape() {
        let disc = dbar_solution_hs_diagnostic(&DomainSpec::Disc, 1000).unwrap();
        assert_eq!(disc.len(), 1);
        assert_eq!(disc[0].0, 1);
        assert!((disc[0].1 - 1.0).abs() < 1e-2);
        let pd = dbar_solution_hs_diagnostic(&DomainSpec::Polydisc(2), 100).unwrap();
        assert_eq!(pd.iter().map(|p| p.0).collect::<Vec<_>>(), vec![1, 2]);
        assert!((pd[0].1 - pd[1].1).abs() < 1e-9);
    }

    #[test]
    fn symbol_parsing() {
        let text = "# f = 3z + (1-2i) z^2\n1\t3\t0\n2\t1\t-2\n\n0\t4\n";
        let f = SymbolCoefficients::parse(text).unwrap();
        assert_eq!(f.dimension(), 1);
        assert_eq!(f.len(), 3);
        assert_eq!(f.get(&idx(&[2])), Some(Complex64::new(1.0, -2.0)));
        let g = SymbolCoefficients::parse("1,0\t1\t0\n0,0\t0\t0\n").unwrap();
        assert_eq!(g.len(), 1);
        assert!(SymbolCoefficients::parse("1\tx\t0\n").is_err());
        assert!(SymbolCoefficients::parse("1\t1\t0\n1,1\t1\t0\n").is_err());
        assert!(SymbolCoefficients::parse("# nothing\n").is_err());
    }
}
