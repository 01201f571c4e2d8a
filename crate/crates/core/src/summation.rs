//! Summation kernels.
//!
//! Two accumulators are used throughout the crate:
//!
//! * [`CompensatedSum`] (Neumaier's variant of Kahan summation) backs every
//!   prefix sum. It is deterministic, so two sweeps over the same values
//!   produce bit-identical partial sums, which is what makes identities
//!   such as `T(witness) == 1` hold exactly.
//! * [`MonotoneSum`] is blocked recursive summation. Each step is a single
//!   rounded addition of nonnegative-order-preserving quantities, so the
//!   result is monotone in every summand. Limit procedures rely on this to
//!   make positivity and monotonicity exact rather than approximate.

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    acc.extend(values);
    acc.value()
}

const BLOCK: usize = 1 << 10;

/// Blocked recursive summation; monotone in every summand.
#[derive(Debug, Clone, Copy, Default)]
pub struct MonotoneSum {
    outer: f64,
    inner: f64,
    filled: usize,
}

impl MonotoneSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        self.inner += x;
        self.filled += 1;
        if self.filled == BLOCK {
            self.outer += self.inner;
            self.inner = 0.0;
            self.filled = 0;
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.outer + self.inner
    }
}
