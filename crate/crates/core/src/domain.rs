//! Reinhardt domains and multi-index arithmetic.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A supported bounded Reinhardt domain.
///
/// `Ellipsoid(m)` is `|z_1|^{2 m_1} + ... + |z_n|^{2 m_n} < 1` with real `m_j > 0`.
/// `Disc`, `Polydisc(1)` and `Ellipsoid([m])` all describe the unit disc.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    Disc,
    Polydisc(usize),
    Ellipsoid(Vec<f64>),
}

impl DomainSpec {
    pub fn polydisc(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Usage("polydisc dimension must be positive".into()));
        }
        Ok(DomainSpec::Polydisc(n))
    }

    pub fn ellipsoid(exponents: Vec<f64>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::Usage("ellipsoid needs at least one exponent".into()));
        }
        if let Some(m) = exponents.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::Usage(format!(
                "ellipsoid exponents must be positive and finite, got {m}"
            )));
        }
        Ok(DomainSpec::Ellipsoid(exponents))
    }

    /// Complex dimension `n`.
    pub fn dimension(&self) -> usize {
        match self {
            DomainSpec::Disc => 1,
            DomainSpec::Polydisc(n) => *n,
            DomainSpec::Ellipsoid(m) => m.len(),
        }
    }

    /// Canonical text form, used for CLI flags and cache keys.
    pub fn key(&self) -> String {
        self.to_string()
    }

    /// Membership test for a point given by its squared moduli `|z_j|^2`.
    pub fn contains_squared_moduli(&self, sq: &[f64]) -> bool {
        match self {
            DomainSpec::Disc | DomainSpec::Polydisc(_) => sq.iter().all(|&s| s < 1.0),
            DomainSpec::Ellipsoid(m) => {
                let total: f64 = sq.iter().zip(m).map(|(&s, &mj)| s.powf(mj)).sum();
                total < 1.0
            }
        }
    }

    pub(crate) fn check_index(&self, gamma: &MultiIndex) -> Result<()> {
        if gamma.dim() != self.dimension() {
            return Err(Error::Usage(format!(
                "multi-index ({gamma}) has length {} but domain {self} has dimension {}",
                gamma.dim(),
                self.dimension()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::Disc => write!(f, "disc"),
            DomainSpec::Polydisc(n) => write!(f, "polydisc:{n}"),
            DomainSpec::Ellipsoid(m) => {
                // `Display` for f64 is the shortest round-trip decimal.
                let parts: Vec<String> = m.iter().map(|x| x.to_string()).collect();
                write!(f, "ellipsoid:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for DomainSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, tail) = match s.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        match (head, tail) {
            ("disc", None) => Ok(DomainSpec::Disc),
            ("polydisc", Some(n)) => {
                let n: usize = n
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad polydisc dimension '{n}'")))?;
                DomainSpec::polydisc(n)
            }
            ("ellipsoid", Some(list)) => {
                let m = list
                    .split(',')
                    .map(|p| {
                        p.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Parse(format!("bad ellipsoid exponent '{p}'")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                DomainSpec::ellipsoid(m)
            }
            _ => Err(Error::Parse(format!(
                "unknown domain '{s}' (expected disc, polydisc:n or ellipsoid:m1,...,mn)"
            ))),
        }
    }
}

/// A multi-index `γ ∈ ℕ^n`, indexing the monomial `z^γ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The coordinate direction `e_j` (zero-based `j`).
    pub fn unit(n: usize, j: usize) -> Self {
        let mut e = vec![0; n];
        e[j] = 1;
        MultiIndex(e)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|γ|`, the total degree.
    pub fn order(&self) -> u64 {
        self.0.iter().map(|&g| g as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&g| g == 0)
    }

    /// Componentwise order: `self ⪰ other` iff every entry is at least the other's.
    pub fn dominates(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    /// Partial-order comparison; `None` when the indices are incomparable.
    pub fn partial_cmp_componentwise(&self, other: &MultiIndex) -> Option<Ordering> {
        match (self.dominates(other), other.dominates(self)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Greater),
            (false, true) => Some(Ordering::Less),
            (false, false) => None,
        }
    }

    /// `self − other`, defined only when `self ⪰ other`.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if !self.dominates(other) {
            return None;
        }
        Some(MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), other.dim(), "multi-index length mismatch");
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad multi-index entry '{p}' in '{s}'")))
            })
            .collect::<Result<Vec<_>>>()
            .map(MultiIndex)
    }
}

/// Lexicographic iterator over all `γ ∈ ℕ^n` with `|γ| = order`.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Option<Vec<u32>>,
}

impl Compositions {
    pub fn new(n: usize, order: u32) -> Self {
        assert!(n >= 1, "dimension must be positive");
        let mut first = vec![0; n];
        first[n - 1] = order;
        Compositions { current: Some(first) }
    }
}

impl Iterator for Compositions {
    type Item = MultiIndex;

    fn next(&mut self) -> Option<MultiIndex> {
        let out = self.current.take()?;
        let n = out.len();
        // Successor: bump the slot just left of the rightmost nonzero tail entry
        // and move the remaining tail mass to the last slot.
        if let Some(p) = (1..n).rev().find(|&j| out[j] > 0) {
            let mut next = out.clone();
            let tail: u32 = next[p..].iter().sum();
            next[p - 1] += 1;
            for slot in next[p..].iter_mut() {
                *slot = 0;
            }
            next[n - 1] = tail - 1;
            self.current = Some(next);
        }
        Some(MultiIndex(out))
    }
}

/// Every `γ ∈ ℕ^n` with `|γ| = order`, in lexicographic order.
pub fn enumerate_order(n: usize, order: u32) -> Vec<MultiIndex> {
    Compositions::new(n, order).collect()
}

/// Every `γ ∈ ℕ^n` with `|γ| ≤ order`, grouped by increasing order.
pub fn enumerate_up_to_order(n: usize, order: u32) -> Vec<MultiIndex> {
    (0..=order).flat_map(|k| Compositions::new(n, k)).collect()
}

/// `binomial(N + n − 1, n − 1)`, the number of multi-indices of order `N` in `n` variables.
pub fn count_of_order(n: usize, order: u32) -> u128 {
    binomial(order as u128 + n as u128 - 1, n as u128 - 1)
}

pub(crate) fn binomial(top: u128, k: u128) -> u128 {
    let k = k.min(top - k);
    (0..k).fold(1u128, |acc, i| acc * (top - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn order_examples() {
        assert_eq!(enumerate_order(1, 5), vec![idx(&[5])]);
        assert_eq!(enumerate_order(2, 2), vec![idx(&[0, 2]), idx(&[1, 1]), idx(&[2, 0])]);
        assert_eq!(enumerate_order(3, 4).len(), 15);
        assert_eq!(enumerate_order(4, 0), vec![MultiIndex::zeros(4)]);
    }

    #[test]
    fn up_to_order_examples() {
        assert_eq!(
            enumerate_up_to_order(2, 1),
            vec![idx(&[0, 0]), idx(&[0, 1]), idx(&[1, 0])]
        );
        assert_eq!(
            enumerate_up_to_order(1, 3),
            vec![idx(&[0]), idx(&[1]), idx(&[2]), idx(&[3])]
        );
        assert_eq!(enumerate_up_to_order(2, 10).len(), 66);
    }

    #[test]
    fn counts_match_brute_force() {
        // brute force: all tuples in [0, N]^n filtered by order
        for n in 1..=4usize {
            for order in 0..=50u32 {
                let got = enumerate_order(n, order);
                assert_eq!(got.len() as u128, count_of_order(n, order));
                if order <= 8 {
                    let base = order as usize + 1;
                    let mut brute: Vec<MultiIndex> = (0..base.pow(n as u32))
                        .map(|mut code| {
                            let mut t = vec![0u32; n];
                            for slot in t.iter_mut().rev() {
                                *slot = (code % base) as u32;
                                code /= base;
                            }
                            MultiIndex::new(t)
                        })
                        .filter(|g| g.order() == order as u64)
                        .collect();
                    brute.sort();
                    assert_eq!(got, brute, "n={n} N={order}");
                }
            }
        }
    }

    #[test]
    fn lexicographic_strictly_increasing() {
        for n in 1..=4 {
            for order in 0..=12 {
                let all = enumerate_up_to_order(n, order);
                for w in enumerate_order(n, order).windows(2) {
                    assert!(w[0] < w[1]);
                }
                assert_eq!(all.len() as u128, binomial(order as u128 + n as u128, n as u128));
            }
        }
    }

    #[test]
    fn partial_order() {
        let a = idx(&[2, 1]);
        let b = idx(&[1, 1]);
        let c = idx(&[0, 3]);
        assert!(a.dominates(&b));
        assert!(!b.dominates(&a));
        assert_eq!(a.partial_cmp_componentwise(&c), None);
        assert_eq!(a.checked_sub(&b), Some(idx(&[1, 0])));
        assert_eq!(b.checked_sub(&a), None);
        assert_eq!(a.partial_cmp_componentwise(&a), Some(Ordering::Equal));
    }

    #[test]
    fn domain_text_form() {
        for s in ["disc", "polydisc:3", "ellipsoid:1,1", "ellipsoid:0.5,2,3.25"] {
            let d: DomainSpec = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        let d: DomainSpec = "ellipsoid:1.0, 2.50".parse().unwrap();
        assert_eq!(d.key(), "ellipsoid:1,2.5");
        assert_eq!(d.dimension(), 2);
        assert!("ellipsoid:0,1".parse::<DomainSpec>().is_err());
        assert!("ellipsoid:-1".parse::<DomainSpec>().is_err());
        assert!("polydisc:0".parse::<DomainSpec>().is_err());
        assert!("sphere".parse::<DomainSpec>().is_err());
        assert_eq!(DomainSpec::Disc.dimension(), 1);
        assert_eq!(DomainSpec::Polydisc(4).dimension(), 4);
    }

    #[test]
    fn multi_index_text_form() {
        let g: MultiIndex = "3, 0,12".parse().unwrap();
        assert_eq!(g, idx(&[3, 0, 12]));
        assert_eq!(g.to_string(), "3,0,12");
        assert_eq!(g.order(), 15);
        assert!("1,-2".parse::<MultiIndex>().is_err());
    }

    #[test]
    fn membership() {
        let ball = DomainSpec::Ellipsoid(vec![1.0, 1.0]);
        assert!(ball.contains_squared_moduli(&[0.4, 0.5]));
        assert!(!ball.contains_squared_moduli(&[0.6, 0.5]));
        let bidisc = DomainSpec::Polydisc(2);
        assert!(bidisc.contains_squared_moduli(&[0.9, 0.9]));
    }
}
