use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest worker count representable in a [`WorkerSet`].
pub const MAX_WORKERS: usize = 32;

/// A set of worker ids (0-based) stored as a bitmask. Iteration is ascending.
#[derive(Copy, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WorkerSet(pub u32);

impl WorkerSet {
    pub const EMPTY: WorkerSet = WorkerSet(0);

    pub fn singleton(k: usize) -> Self {
        WorkerSet(1 << k)
    }

    /// `{0, 1, .., count-1}`.
    pub fn first(count: usize) -> Self {
        if count >= 32 {
            WorkerSet(u32::MAX)
        } else {
            WorkerSet((1u32 << count) - 1)
        }
    }

    pub fn contains(self, k: usize) -> bool {
        k < MAX_WORKERS && self.0 & (1 << k) != 0
    }

    pub fn with(self, k: usize) -> Self {
        WorkerSet(self.0 | (1 << k))
    }

    pub fn without(self, k: usize) -> Self {
        WorkerSet(self.0 & !(1 << k))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: WorkerSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let k = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(k)
        })
    }

    /// Position of `k` among the members in ascending order.
    pub fn rank_of(self, k: usize) -> Option<usize> {
        self.contains(k).then(|| (self.0 & ((1u32 << k) - 1)).count_ones() as usize)
    }

    /// Smallest member.
    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }
}

impl FromIterator<usize> for WorkerSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(WorkerSet::EMPTY, WorkerSet::with)
    }
}

/// Displays with 1-based ids, e.g. `{1,2,3}`.
impl fmt::Display for WorkerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, k) in self.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", k + 1)?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for WorkerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All `size`-subsets of `{0..workers}`, in lexicographic order of their sorted members.
pub fn subsets(workers: usize, size: usize) -> Vec<WorkerSet> {
    fn rec(start: usize, workers: usize, left: usize, acc: WorkerSet, out: &mut Vec<WorkerSet>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for k in start..=workers.saturating_sub(left) {
            rec(k + 1, workers, left - 1, acc.with(k), out);
        }
    }
    let mut out = Vec::new();
    if size <= workers {
        rec(0, workers, size, WorkerSet::EMPTY, &mut out);
    }
    out
}
