//! Integer functions on the discrete circle and the pseudo-distance they code.
//!
//! A coding function is a sequence `g[0..=N]` with `g[N] == g[0]`; time `N`
//! is the same circle point as time `0`. The closed counterclockwise arc
//! `[a, b]` is the linear range `a..=b` when `a <= b` and wraps through `N`
//! otherwise, with `[a, a] = {a}`.
//!
//! ```text
//! m_g(a, b) = max(min over [a, b], min over [b, a])
//! d_g(a, b) = g(a) + g(b) - 2 m_g(a, b)
//! ```

use crate::error::{Error, Result};
use crate::rmq::RmqIndex;

pub trait Coding {
    /// Number of distinct circle points `N`; valid times are `0..=N`.
    fn period(&self) -> usize;

    fn value(&self, t: usize) -> i64;

    /// Minimum over the closed counterclockwise arc `[a, b]`.
    fn arc_min(&self, a: usize, b: usize) -> i64;

    fn m(&self, a: usize, b: usize) -> i64 {
        self.arc_min(a, b).max(self.arc_min(b, a))
    }

    fn d(&self, a: usize, b: usize) -> i64 {
        self.value(a) + self.value(b) - 2 * self.m(a, b)
    }

    fn check_time(&self, t: usize) -> Result<()> {
        if t > self.period() {
            Err(Error::OutOfRange {
                index: t,
                max: self.period(),
            })
        } else {
            Ok(())
        }
    }

    fn checked_arc_min(&self, a: usize, b: usize) -> Result<i64> {
        self.check_time(a)?;
        self.check_time(b)?;
        Ok(self.arc_min(a, b))
    }

    fn checked_m(&self, a: usize, b: usize) -> Result<i64> {
        self.check_time(a)?;
        self.check_time(b)?;
        Ok(self.m(a, b))
    }

    fn checked_d(&self, a: usize, b: usize) -> Result<i64> {
        self.check_time(a)?;
        self.check_time(b)?;
        Ok(self.d(a, b))
    }
}

/// A coding function backed by a sparse-table index over its values.
#[derive(Clone, Copy, Debug)]
pub struct IndexedCoding<'a> {
    values: &'a [i64],
    index: &'a RmqIndex,
}

impl<'a> IndexedCoding<'a> {
    /// `values` must have length `N + 1` and `index` must be built over it.
    pub fn new(values: &'a [i64], index: &'a RmqIndex) -> Self {
        assert!(
            values.len() >= 2,
            "coding function needs at least two samples"
        );
        assert_eq!(
            values.len(),
            index.len(),
            "index built over a different sequence"
        );
        IndexedCoding { values, index }
    }

    pub fn values(&self) -> &'a [i64] {
        self.values
    }
}

impl Coding for IndexedCoding<'_> {
    fn period(&self) -> usize {
        self.values.len() - 1
    }

    #[inline]
    fn value(&self, t: usize) -> i64 {
        self.values[t]
    }

    #[inline]
    fn arc_min(&self, a: usize, b: usize) -> i64 {
        if a <= b {
            self.index.range_min(a, b)
        } else {
            let n = self.period();
            self.index.range_min(a, n).min(self.index.range_min(0, b))
        }
    }
}

/// Linear-scan coding: the reference the indexed version is checked against.
#[derive(Clone, Copy, Debug)]
pub struct NaiveCoding<'a>(pub &'a [i64]);

impl Coding for NaiveCoding<'_> {
    fn period(&self) -> usize {
        self.0.len() - 1
    }

    fn value(&self, t: usize) -> i64 {
        self.0[t]
    }

    fn arc_min(&self, a: usize, b: usize) -> i64 {
        let scan = |r: std::ops::RangeInclusive<usize>| self.0[r].iter().copied().min().unwrap();
        if a <= b {
            scan(a..=b)
        } else {
            scan(a..=self.period()).min(scan(0..=b))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: [i64; 7] = [0, 1, 2, 1, 2, 1, 0];

    #[test]
    fn arc_examples() {
        let idx = RmqIndex::new(&H);
        let g = IndexedCoding::new(&H, &idx);
        assert_eq!(g.arc_min(2, 4), 1);
        assert_eq!(g.arc_min(4, 2), 0);
        assert_eq!(g.m(2, 4), 1);
        assert_eq!(g.d(2, 4), 2);
        assert_eq!(g.d(1, 3), 0);
        assert_eq!(g.d(3, 5), 0);
        for a in 0..=6 {
            assert_eq!(g.m(a, a), H[a]);
            assert_eq!(g.d(a, a), 0);
        }
    }

    #[test]
    fn naive_agrees_on_all_pairs() {
        let f = [0i64, 3, -1, 2, 5, -2, 4, 0];
        let idx = RmqIndex::new(&f);
        let g = IndexedCoding::new(&f, &idx);
        let naive = NaiveCoding(&f);
        for a in 0..f.len() {
            for b in 0..f.len() {
                assert_eq!(g.arc_min(a, b), naive.arc_min(a, b), "arc [{a},{b}]");
            }
        }
    }

    #[test]
    fn out_of_range_rejected() {
        let idx = RmqIndex::new(&H);
        let g = IndexedCoding::new(&H, &idx);
        assert!(matches!(
            g.checked_d(0, 7),
            Err(Error::OutOfRange { index: 7, max: 6 })
        ));
        assert!(g.checked_m(6, 0).is_ok());
    }
}
