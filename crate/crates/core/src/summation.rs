//! Compensated summation and the deterministic blocked reduction used by every series sum.

use rayon::prelude::*;

/// Number of terms per block in [`blocked_sum`]. Part of the reproducibility contract:
/// changing it changes the last bits of every series value.
pub const BLOCK_SIZE: usize = 4096;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of an iterator, in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().value()
}

/// Sums `term(item)` over `items` in fixed-size blocks.
///
/// Each block is summed serially; block totals are combined in block order. The
/// result is bit-identical for any rayon pool size, including one thread.
pub fn blocked_sum<T, F>(items: &[T], term: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync,
{
    let partials: Vec<f64> = items
        .par_chunks(BLOCK_SIZE)
        .map(|block| compensated_sum(block.iter().map(&term)))
        .collect();
    compensated_sum(partials)
}
