//! Order-0 symbol frequencies kept in a Fenwick tree, so cumulative lookups
//! and updates are logarithmic in the alphabet size.

/// Symbol id that closes a message; bytes use `0..256`.
pub const EOS_SYMBOL: usize = 256;
/// Ceiling on any model's total. Both coders stay exact up to here: the
/// arithmetic coder keeps at least 64 code points per count unit and the range
/// coder at least one.
pub const MAX_TOTAL: u64 = 1 << 24;
/// Adaptive counts are halved once the total would pass this, which keeps the
/// range coder's truncation loss below 2^-8 of its range.
pub const ADAPTIVE_MAX_TOTAL: u64 = 1 << 16;
/// Count added to a symbol after it is coded by an adaptive model.
pub const ADAPTIVE_INCREMENT: u64 = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyModel {
    counts: Vec<u64>,
    tree: Vec<u64>,
    total: u64,
    increment: u64,
}

impl FrequencyModel {
    /// Laplace-smoothed adaptive model over bytes plus EOS: every count starts at 1.
    pub fn adaptive() -> Self {
        Self::with_counts(vec![1; EOS_SYMBOL + 1], ADAPTIVE_INCREMENT)
    }

    /// A model that never changes. Counts of zero are raised to one so every
    /// symbol stays codable; the total must not exceed [`MAX_TOTAL`].
    pub fn fixed(counts: &[u64]) -> Self {
        let counts: Vec<u64> = counts.iter().map(|&c| c.max(1)).collect();
        assert!(
            counts.iter().sum::<u64>() <= MAX_TOTAL,
            "static model total exceeds MAX_TOTAL"
        );
        Self::with_counts(counts, 0)
    }

    fn with_counts(counts: Vec<u64>, increment: u64) -> Self {
        let mut m = Self {
            tree: vec![0; counts.len() + 1],
            total: 0,
            counts,
            increment,
        };
        m.rebuild();
        m
    }

    fn rebuild(&mut self) {
        self.tree.iter_mut().for_each(|t| *t = 0);
        for i in 0..self.counts.len() {
            let c = self.counts[i];
            self.add(i, c);
        }
        self.total = self.counts.iter().sum();
    }

    fn add(&mut self, sym: usize, delta: u64) {
        let mut i = sym + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum of counts of symbols below `sym`.
    fn prefix(&self, sym: usize) -> u64 {
        let mut i = sym;
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }

    pub fn num_symbols(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, sym: usize) -> u64 {
        self.counts[sym]
    }

    pub fn is_adaptive(&self) -> bool {
        self.increment > 0
    }

    /// `[low, high)` of `sym` on the cumulative scale.
    pub fn interval(&self, sym: usize) -> (u64, u64) {
        let low = self.prefix(sym);
        (low, low + self.counts[sym])
    }

    /// The symbol whose interval contains `target < total`.
    pub fn find(&self, target: u64) -> usize {
        debug_assert!(target < self.total);
        let mut pos = 0;
        let mut rem = target;
        let mut step = (self.tree.len() - 1).next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= rem {
                pos = next;
                rem -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }

    /// Records one occurrence of `sym` (no-op for a fixed model).
    pub fn update(&mut self, sym: usize) {
        if self.increment == 0 {
            return;
        }
        if self.total + self.increment > ADAPTIVE_MAX_TOTAL {
            for c in &mut self.counts {
                *c = (*c / 2).max(1);
            }
            self.rebuild();
        }
        self.counts[sym] += self.increment;
        self.add(sym, self.increment);
        self.total += self.increment;
    }
}
