//! Independent numerical estimates of `c_γ²`, used to certify the closed forms.
//!
//! Radial quadrature integrates the one-dimensional reduction
//!
//! ```text
//! c_γ² = 2π²/(γ₂+1) ∫₀¹ r^{2γ₁+1} (1 − r^{2m₁})^{(γ₂+1)/m₂} dr
//! ```
//!
//! for two-dimensional ellipsoids (and `2π ∫₀¹ r^{2γ+1} dr` on the disc) with
//! globally adaptive Gauss–Kronrod 7/15. When `(γ₂+1)/m₂ < 1` the integrand has an
//! infinite derivative at `r = 1`; the adaptive bisection concentrates panels there.
//!
//! Monte Carlo draws points uniformly from the unit polydisc. Both the integrand
//! `|z^γ|²` and the membership test depend only on the squared moduli `|z_j|²`,
//! which are independent `U[0, 1)` for a uniform point of the polydisc, so those
//! are sampled directly. The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`)
//! seeded with `seed_from_u64(seed)`; block `b` of [`MC_BLOCK`] samples uses
//! stream `b`, which makes parallel and serial runs bit-identical.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{DomainSpec, MultiIndex};
use crate::error::{Error, Result};
use crate::summation::NeumaierSum;

/// Samples per Monte Carlo block (one ChaCha stream each).
pub const MC_BLOCK: u64 = 1 << 16;
/// Minimum Monte Carlo sample count.
pub const MC_MIN_SAMPLES: u64 = 10_000;
/// Smallest accepted relative quadrature tolerance.
pub const QUAD_MIN_TOL: f64 = 1e-12;
/// Panel budget for adaptive quadrature.
pub const QUAD_MAX_PANELS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OracleMethod {
    RadialQuadrature,
    MonteCarlo,
}

/// An oracle estimate of `c_γ²`.
///
/// `abs_error` is the summed Gauss–Kronrod error estimate for quadrature and
/// three standard errors for Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub method: OracleMethod,
    pub sample_count: u64,
    pub seed: u64,
}

impl OracleEstimate {
    pub fn relative_error(&self) -> f64 {
        self.abs_error / self.value.abs()
    }

    /// Whether `x` lies within `value ± abs_error`.
    pub fn covers(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.abs_error
    }
}

// Gauss–Kronrod 7/15 abscissae and weights (QUADPACK qk15), kept at published precision.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    integral: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let integral = kronrod * half;
    let raw = ((kronrod - gauss) * half).abs();
    // rounding floor so that smooth panels cannot report an error below what f64 resolves
    let floor = 50.0 * f64::EPSILON * integral.abs();
    Panel {
        a,
        b,
        integral,
        error: raw.max(floor),
    }
}

/// Globally adaptive Gauss–Kronrod on `[a, b]` to relative tolerance `tol`.
///
/// Returns `(integral, error_estimate, panels)`; on budget exhaustion the best
/// estimate is carried by [`Error::Accuracy`].
pub fn adaptive_integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_panels: usize,
) -> Result<(f64, f64, usize)> {
    let mut heap = BinaryHeap::new();
    heap.push(gauss_kronrod(&f, a, b));
    loop {
        let total: f64 = heap.iter().map(|p| p.integral).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if error <= tol * total.abs() {
            return Ok((total, error, heap.len()));
        }
        if heap.len() >= max_panels {
            return Err(Error::Accuracy {
                estimate: total,
                abs_error: error,
                panels: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval no longer divisible in f64
            return Err(Error::Accuracy {
                estimate: total,
                abs_error: error,
                panels: heap.len() + 1,
            });
        }
        heap.push(gauss_kronrod(&f, worst.a, mid));
        heap.push(gauss_kronrod(&f, mid, worst.b));
    }
}

fn disc_like(domain: &DomainSpec) -> bool {
    domain.dimension() == 1
}

/// `1 − r^p` without cancellation near `r = 1`.
fn one_minus_pow(r: f64, p: f64) -> f64 {
    -(p * (r - 1.0).ln_1p()).exp_m1()
}

/// Radial-quadrature estimate of `c_γ²` on the disc or a two-dimensional ellipsoid.
pub fn radial_quadrature_c_squared(domain: &DomainSpec, gamma: &MultiIndex, tol: f64) -> Result<OracleEstimate> {
    domain.check_index(gamma)?;
    if !(tol.is_finite() && tol >= QUAD_MIN_TOL) {
        return Err(Error::Usage(format!(
            "quadrature tolerance must be at least {QUAD_MIN_TOL:e}, got {tol}"
        )));
    }
    let g = gamma.entries();
    let (prefactor, result) = if disc_like(domain) {
        let power = 2 * g[0] as i32 + 1;
        (
            2.0 * PI,
            adaptive_integrate(|r: f64| r.powi(power), 0.0, 1.0, tol, QUAD_MAX_PANELS),
        )
    } else if let DomainSpec::Ellipsoid(m) = domain {
        if m.len() != 2 {
            return Err(capability("radial quadrature", domain));
        }
        let (m1, m2) = (m[0], m[1]);
        let power = 2 * g[0] as i32 + 1;
        let q = (g[1] as f64 + 1.0) / m2;
        let p = 2.0 * m1;
        let integrand = move |r: f64| {
            if r <= 0.0 {
                return 0.0;
            }
            r.powi(power) * one_minus_pow(r, p).max(0.0).powf(q)
        };
        (
            2.0 * PI * PI / (g[1] as f64 + 1.0),
            adaptive_integrate(integrand, 0.0, 1.0, tol, QUAD_MAX_PANELS),
        )
    } else {
        return Err(capability("radial quadrature", domain));
    };
    match result {
        Ok((integral, error, _)) => Ok(OracleEstimate {
            value: prefactor * integral,
            abs_error: prefactor * error,
            method: OracleMethod::RadialQuadrature,
            sample_count: 0,
            seed: 0,
        }),
        Err(Error::Accuracy {
            estimate,
            abs_error,
            panels,
        }) => Err(Error::Accuracy {
            estimate: prefactor * estimate,
            abs_error: prefactor * abs_error,
            panels,
        }),
        Err(e) => Err(e),
    }
}

fn capability(method: &'static str, domain: &DomainSpec) -> Error {
    Error::Capability {
        method,
        domain: domain.key(),
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct BlockMoments {
    sum: f64,
    sum_sq: f64,
    accepted: u64,
}

fn sample_block(domain: &DomainSpec, gamma: &[u32], seed: u64, block: u64, count: u64) -> BlockMoments {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    let n = gamma.len();
    let mut sq = vec![0.0f64; n];
    let mut sum = NeumaierSum::new();
    let mut sum_sq = NeumaierSum::new();
    let mut accepted = 0;
    for _ in 0..count {
        for s in sq.iter_mut() {
            *s = rng.gen::<f64>();
        }
        if domain.contains_squared_moduli(&sq) {
            accepted += 1;
            let f: f64 = sq.iter().zip(gamma).map(|(&s, &g)| s.powi(g as i32)).product();
            sum.add(f);
            sum_sq.add(f * f);
        }
    }
    BlockMoments {
        sum: sum.value(),
        sum_sq: sum_sq.value(),
        accepted,
    }
}

/// Rejection-sampling Monte Carlo estimate of `c_γ²` from the unit polydisc.
///
/// Rejected proposals count as zero integrand; the estimate is
/// `π^n · mean(|z^γ|² · 1_Ω)` with a 3σ error.
pub fn monte_carlo_c_squared(
    domain: &DomainSpec,
    gamma: &MultiIndex,
    samples: u64,
    seed: u64,
) -> Result<OracleEstimate> {
    domain.check_index(gamma)?;
    if samples < MC_MIN_SAMPLES {
        return Err(Error::Usage(format!(
            "Monte Carlo needs at least {MC_MIN_SAMPLES} samples, got {samples}"
        )));
    }
    let blocks = samples.div_ceil(MC_BLOCK);
    let moments: Vec<BlockMoments> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = MC_BLOCK.min(samples - b * MC_BLOCK);
            sample_block(domain, gamma.entries(), seed, b, count)
        })
        .collect();

    let mut sum = NeumaierSum::new();
    let mut sum_sq = NeumaierSum::new();
    let mut accepted = 0u64;
    for m in &moments {
        sum.add(m.sum);
        sum_sq.add(m.sum_sq);
        accepted += m.accepted;
    }
    if accepted == 0 {
        return Err(Error::DegenerateSampling { samples });
    }
    let count = samples as f64;
    let mean = sum.value() / count;
    let variance = ((sum_sq.value() / count - mean * mean) * count / (count - 1.0)).max(0.0);
    let std_error = (variance / count).sqrt();
    let volume = PI.powi(domain.dimension() as i32);
    Ok(OracleEstimate {
        value: volume * mean,
        abs_error: 3.0 * volume * std_error,
        method: OracleMethod::MonteCarlo,
        sample_count: samples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::log_c_squared;

    fn idx(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn closed(domain: &DomainSpec, g: &[u32]) -> f64 {
        log_c_squared(domain, &idx(g)).unwrap().c_squared()
    }

    #[test]
    fn disc_quadrature() {
        let est = radial_quadrature_c_squared(&DomainSpec::Disc, &idx(&[3]), 1e-10).unwrap();
        assert!((est.value - PI / 4.0).abs() <= 1e-10);
        assert_eq!(est.method, OracleMethod::RadialQuadrature);
        assert_eq!((est.sample_count, est.seed), (0, 0));
    }

    #[test]
    fn ball_quadrature() {
        let dom = DomainSpec::Ellipsoid(vec![1.0, 1.0]);
        let est = radial_quadrature_c_squared(&dom, &idx(&[0, 0]), 1e-10).unwrap();
        assert!(((est.value - PI * PI / 2.0) / (PI * PI / 2.0)).abs() <= 1e-10);
    }

    #[test]
    fn singular_endpoint_quadrature() {
        // (γ₂+1)/m₂ = 1/2 and 1/3: infinite slope at r = 1
        for (m, g) in [
            (vec![0.5, 2.0], [2u32, 0u32]),
            (vec![1.7, 3.0], [4, 0]),
            (vec![0.5, 2.0], [2, 1]),
        ] {
            let dom = DomainSpec::Ellipsoid(m);
            let est = radial_quadrature_c_squared(&dom, &idx(&g), 1e-9).unwrap();
            let want = closed(&dom, &g);
            assert!(((est.value - want) / want).abs() <= 1e-9, "{dom} {g:?}");
            assert!(est.abs_error >= 0.0);
        }
    }

    #[test]
    fn quadrature_capability_and_tolerance_errors() {
        let r = radial_quadrature_c_squared(&DomainSpec::Polydisc(2), &idx(&[0, 0]), 1e-10);
        assert!(matches!(r, Err(Error::Capability { .. })));
        let r = radial_quadrature_c_squared(&DomainSpec::Ellipsoid(vec![1.0; 3]), &idx(&[0, 0, 0]), 1e-10);
        match r {
            Err(Error::Capability { domain, .. }) => assert_eq!(domain, "ellipsoid:1,1,1"),
            other => panic!("expected capability error, got {other:?}"),
        }
        let r = radial_quadrature_c_squared(&DomainSpec::Disc, &idx(&[0]), 1e-14);
        assert!(matches!(r, Err(Error::Usage(_))));
    }

    #[test]
    fn accuracy_error_carries_estimate() {
        let r = adaptive_integrate(|x: f64| x.sqrt().recip(), 0.0, 1.0, 1e-12, 8);
        match r {
            Err(Error::Accuracy { estimate, panels, .. }) => {
                assert!(estimate > 1.0 && estimate < 2.0);
                assert_eq!(panels, 8);
            }
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }

    #[test]
    fn monte_carlo_disc_area() {
        let est = monte_carlo_c_squared(&DomainSpec::Disc, &idx(&[0]), 1_000_000, 1).unwrap();
        assert!(est.covers(PI), "{est:?}");
        // every proposal accepted, integrand ≡ 1
        assert_eq!(est.abs_error, 0.0);
    }

    #[test]
    fn monte_carlo_is_deterministic_and_thread_independent() {
        let dom = DomainSpec::Ellipsoid(vec![2.0, 3.0]);
        let g = idx(&[1, 2]);
        let a = monte_carlo_c_squared(&dom, &g, 300_000, 99).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| monte_carlo_c_squared(&dom, &g, 300_000, 99).unwrap());
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.abs_error.to_bits(), b.abs_error.to_bits());
        let c = monte_carlo_c_squared(&dom, &g, 300_000, 100).unwrap();
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn monte_carlo_preconditions() {
        let r = monte_carlo_c_squared(&DomainSpec::Disc, &idx(&[0]), 9_999, 0);
        assert!(matches!(r, Err(Error::Usage(_))));
    }
}
