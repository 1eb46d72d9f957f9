//! Node pairs on which the pointwise inequality is checked.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::geometry::Grid;
use crate::rng::{stream, stream_rng};

/// Grids up to this many nodes are certified on all pairs by default.
pub const ALL_PAIRS_LIMIT: usize = 2000;
/// Random pairs drawn by default on larger grids.
pub const DEFAULT_RANDOM_PAIRS: usize = 1_000_000;
/// Near-tip neighbours paired along each column.
const COLUMN_REACH: usize = 8;
/// Smallest slices whose axis node is paired with the largest slice.
const TIP_SLICES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairStrategy {
    All,
    Random { count: usize },
    Adversarial,
    /// `All` on small grids, `Random` plus `Adversarial` otherwise.
    Default,
    /// Explicit list, e.g. the pairs of an oracle cloud.
    Explicit,
}

impl fmt::Display for PairStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairStrategy::All => f.write_str("all"),
            PairStrategy::Random { count } => write!(f, "random:{count}"),
            PairStrategy::Adversarial => f.write_str("adversarial"),
            PairStrategy::Default => f.write_str("default"),
            PairStrategy::Explicit => f.write_str("explicit"),
        }
    }
}

/// Distinct, sorted node pairs `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSet {
    pairs: Vec<(u32, u32)>,
    strategy: PairStrategy,
    seed: u64,
}

/// What a [`PairSet`] was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairDescriptor {
    pub strategy: String,
    pub seed: u64,
    pub count: usize,
}

fn normalise(mut pairs: Vec<(u32, u32)>) -> Vec<(u32, u32)> {
    for p in pairs.iter_mut() {
        if p.0 > p.1 {
            *p = (p.1, p.0);
        }
    }
    pairs.retain(|p| p.0 != p.1);
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

impl PairSet {
    pub fn from_pairs(pairs: Vec<(u32, u32)>) -> Self {
        Self { pairs: normalise(pairs), strategy: PairStrategy::Explicit, seed: 0 }
    }

    pub fn all(grid: &Grid) -> Self {
        let n = grid.len() as u32;
        let mut pairs = Vec::with_capacity(grid.len() * grid.len().saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                pairs.push((i, j));
            }
        }
        Self { pairs, strategy: PairStrategy::All, seed: 0 }
    }

    /// `count` uniformly drawn pairs of distinct nodes (duplicates removed).
    pub fn random(grid: &Grid, count: usize, seed: u64) -> Self {
        let n = grid.len() as u32;
        let mut pairs = Vec::with_capacity(count);
        if n >= 2 {
            let mut rng = stream_rng(seed, stream::PAIRS);
            while pairs.len() < count {
                let i = rng.random_range(0..n);
                let j = rng.random_range(0..n);
                if i != j {
                    pairs.push((i, j));
                }
            }
        }
        Self { pairs: normalise(pairs), strategy: PairStrategy::Random { count }, seed }
    }

    /// Same-column pairs near the tip, same-slice antipodal pairs, and the
    /// axis nodes of the smallest slices against every node of the largest
    /// slice.
    pub fn adversarial(grid: &Grid) -> Self {
        let m = grid.dim() - 1;
        let mut pairs = Vec::new();
        for column in grid.columns() {
            for k in 1..column.len().min(COLUMN_REACH + 1) {
                pairs.push((column[0], column[k]));
            }
        }
        let mut js = vec![0i32; m];
        let mut neg = vec![0i32; m];
        for node in 0..grid.len() {
            let s = grid.multi_index(node, &mut js);
            if js.iter().find(|j| **j != 0).is_some_and(|j| *j > 0) {
                for (n, j) in neg.iter_mut().zip(&js) {
                    *n = -j;
                }
                if let Some(other) = grid.node(s, &neg) {
                    pairs.push((node as u32, other as u32));
                }
            }
        }
        let nonempty: Vec<usize> = (0..grid.slices()).filter(|&s| !grid.slice_nodes(s).is_empty()).collect();
        if let Some(&largest) = nonempty.iter().max_by_key(|&&s| (grid.slice_nodes(s).len(), s)) {
            let zero = vec![0i32; m];
            for &s in nonempty.iter().take(TIP_SLICES) {
                if let Some(axis) = grid.node(s, &zero) {
                    for other in grid.slice_nodes(largest) {
                        pairs.push((axis as u32, other as u32));
                    }
                }
            }
        }
        Self { pairs: normalise(pairs), strategy: PairStrategy::Adversarial, seed: 0 }
    }

    /// All pairs up to [`ALL_PAIRS_LIMIT`] nodes, otherwise
    /// [`DEFAULT_RANDOM_PAIRS`] random pairs plus the adversarial set.
    pub fn default_for(grid: &Grid, seed: u64) -> Self {
        if grid.len() <= ALL_PAIRS_LIMIT {
            let mut all = Self::all(grid);
            all.strategy = PairStrategy::Default;
            all
        } else {
            let mut set = Self::random(grid, DEFAULT_RANDOM_PAIRS, seed);
            set.extend(&Self::adversarial(grid));
            set.strategy = PairStrategy::Default;
            set.seed = seed;
            set
        }
    }

    /// Adds the pairs of `other`; the strategy and seed are kept.
    pub fn extend(&mut self, other: &PairSet) {
        let mut pairs = core::mem::take(&mut self.pairs);
        pairs.extend_from_slice(&other.pairs);
        self.pairs = normalise(pairs);
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn strategy(&self) -> PairStrategy {
        self.strategy
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn descriptor(&self) -> PairDescriptor {
        PairDescriptor { strategy: format!("{}", self.strategy), seed: self.seed, count: self.pairs.len() }
    }
}
