//! Doubling sparse tables for idempotent range queries.

/// Sparse table over a fixed slice: `O(N log N)` preprocessing and memory,
/// `O(1)` queries for any idempotent associative operation (min, max).
#[derive(Clone, Debug)]
pub struct SparseTable<T> {
    // levels[k][i] = op over [i, i + 2^k)
    levels: Vec<Vec<T>>,
    op: fn(T, T) -> T,
}

impl<T: Copy> SparseTable<T> {
    pub fn new(values: &[T], op: fn(T, T) -> T) -> Self {
        let mut levels = vec![values.to_vec()];
        let mut width = 1;
        while 2 * width <= values.len() {
            let prev = levels.last().unwrap();
            let next: Vec<T> = (0..=values.len() - 2 * width)
                .map(|i| op(prev[i], prev[i + width]))
                .collect();
            levels.push(next);
            width *= 2;
        }
        SparseTable { levels, op }
    }

    pub fn len(&self) -> usize {
        self.levels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels[0].is_empty()
    }

    /// Total number of stored entries across levels.
    pub fn size(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Query over the inclusive range `[a, b]`. Panics if `a > b` or `b` is
    /// past the end.
    #[inline]
    pub fn query(&self, a: usize, b: usize) -> T {
        debug_assert!(a <= b && b < self.len());
        let span = b - a + 1;
        let k = (usize::BITS - 1 - span.leading_zeros()) as usize;
        let level = &self.levels[k];
        (self.op)(level[a], level[b + 1 - (1 << k)])
    }
}

/// Range-minimum index over an integer sequence.
#[derive(Clone, Debug)]
pub struct RmqIndex {
    table: SparseTable<i64>,
}

impl RmqIndex {
    pub fn new(values: &[i64]) -> Self {
        RmqIndex {
            table: SparseTable::new(values, std::cmp::min),
        }
    }

    /// Minimum over the inclusive linear range `[a, b]`.
    #[inline]
    pub fn range_min(&self, a: usize, b: usize) -> i64 {
        self.table.query(a, b)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn size(&self) -> usize {
        self.table.size()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_element() {
        let idx = RmqIndex::new(&[5]);
        assert_eq!(idx.range_min(0, 0), 5);
        assert_eq!(idx.size(), 1);
    }

    #[test]
    fn max_table() {
        let t = SparseTable::new(&[3, 1, 4, 1, 5, 9, 2, 6], std::cmp::max);
        assert_eq!(t.query(0, 3), 4);
        assert_eq!(t.query(2, 7), 9);
        assert_eq!(t.query(6, 6), 2);
    }

    proptest! {
        #[test]
        fn matches_linear_scan(values in prop::collection::vec(-50i64..50, 1..200), picks in prop::collection::vec((0usize..1000, 0usize..1000), 1..50)) {
            let idx = RmqIndex::new(&values);
            for (x, y) in picks {
                let (a, b) = (x % values.len(), y % values.len());
                let (a, b) = (a.min(b), a.max(b));
                let naive = *values[a..=b].iter().min().unwrap();
                prop_assert_eq!(idx.range_min(a, b), naive);
            }
        }
    }
}
