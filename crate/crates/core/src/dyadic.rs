//! The finite dyadic tree on `[0, 1)` and its Haar system.
//!
//! Orientation convention: `I⁻` is the left half and `I⁺` the right half, so
//! `h_I` is negative on the left. Nodes are enumerated level-major with
//! ascending position; that order is the row/column order of every matrix in
//! the crate.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A dyadic interval `[position * 2^-level, (position + 1) * 2^-level)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicIndex {
    pub level: u32,
    pub position: u64,
}

/// Which child of an interval another interval falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Half {
    Left,
    Right,
}

impl Half {
    /// `+1` for the right half, `-1` for the left.
    pub fn sign(self) -> f64 {
        match self {
            Half::Left => -1.0,
            Half::Right => 1.0,
        }
    }
}

impl DyadicIndex {
    pub const ROOT: DyadicIndex = DyadicIndex {
        level: 0,
        position: 0,
    };

    pub fn new(level: u32, position: u64) -> Self {
        debug_assert!(level < 64 && position < (1u64 << level));
        Self { level, position }
    }

    /// `|I| = 2^-level`.
    pub fn len(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn left_endpoint(&self) -> f64 {
        self.position as f64 * self.len()
    }

    /// `(I⁻, I⁺)`.
    pub fn children(&self) -> (DyadicIndex, DyadicIndex) {
        let level = self.level + 1;
        (
            DyadicIndex::new(level, 2 * self.position),
            DyadicIndex::new(level, 2 * self.position + 1),
        )
    }

    pub fn left_child(&self) -> DyadicIndex {
        self.children().0
    }

    pub fn right_child(&self) -> DyadicIndex {
        self.children().1
    }

    pub fn parent(&self) -> Option<DyadicIndex> {
        (self.level > 0).then(|| DyadicIndex::new(self.level - 1, self.position >> 1))
    }

    /// The ancestor (or self) at `level`; `None` if `level` is finer than `self`.
    pub fn ancestor_at(&self, level: u32) -> Option<DyadicIndex> {
        (level <= self.level)
            .then(|| DyadicIndex::new(level, self.position >> (self.level - level)))
    }

    /// Strict ancestors, nearest first.
    pub fn ancestors(&self) -> impl Iterator<Item = DyadicIndex> {
        let me = *self;
        (0..self.level)
            .rev()
            .map(move |l| me.ancestor_at(l).expect("coarser level"))
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &DyadicIndex) -> bool {
        other.ancestor_at(self.level) == Some(*self)
    }

    /// `other ⊊ self`.
    pub fn strictly_contains(&self, other: &DyadicIndex) -> bool {
        other.level > self.level && self.contains(other)
    }

    pub fn is_disjoint(&self, other: &DyadicIndex) -> bool {
        !self.contains(other) && !other.contains(self)
    }

    /// The half of `self` that contains `inner`, for `inner ⊊ self`.
    pub fn half_containing(&self, inner: &DyadicIndex) -> Option<Half> {
        if !self.strictly_contains(inner) {
            return None;
        }
        let child = inner.ancestor_at(self.level + 1)?;
        Some(if child.position & 1 == 0 {
            Half::Left
        } else {
            Half::Right
        })
    }

    /// The child of `self` on the given side.
    pub fn child(&self, half: Half) -> DyadicIndex {
        match half {
            Half::Left => self.left_child(),
            Half::Right => self.right_child(),
        }
    }
}

impl fmt::Display for DyadicIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.level, self.position)
    }
}

impl FromStr for DyadicIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Malformed(format!("bad node label {s:?}, expected \"level:position\""));
        let (l, p) = s.trim().split_once(':').ok_or_else(bad)?;
        let level: u32 = l.parse().map_err(|_| bad())?;
        let position: u64 = p.parse().map_err(|_| bad())?;
        if level >= 63 || position >= (1u64 << level) {
            return Err(Error::Malformed(format!(
                "node {s:?}: position out of range for its level"
            )));
        }
        Ok(DyadicIndex { level, position })
    }
}

impl Serialize for DyadicIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DyadicIndex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `+1` if `inner ⊆ outer⁺`, `-1` if `inner ⊆ outer⁻`, `0` if disjoint.
///
/// Errors when `inner ⊇ outer`, where the sign is undefined.
pub fn delta(outer: &DyadicIndex, inner: &DyadicIndex) -> Result<i8> {
    if outer.is_disjoint(inner) {
        return Ok(0);
    }
    match outer.half_containing(inner) {
        Some(Half::Right) => Ok(1),
        Some(Half::Left) => Ok(-1),
        None => Err(Error::UndefinedDelta {
            outer: *outer,
            inner: *inner,
        }),
    }
}

/// The constant value of `h_haar` on `interval`.
pub fn haar_value(haar: &DyadicIndex, interval: &DyadicIndex) -> Result<f64> {
    match delta(haar, interval) {
        Ok(s) => Ok(s as f64 / haar.len().sqrt()),
        Err(_) => Err(Error::NotConstant {
            haar: *haar,
            interval: *interval,
        }),
    }
}

/// Levels `0..=depth` of the dyadic tree on `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tree {
    pub depth: u32,
}

impl Tree {
    pub const MAX_DEPTH: u32 = 24;

    pub fn new(depth: u32) -> Self {
        assert!(depth <= Self::MAX_DEPTH, "depth {depth} exceeds {}", Self::MAX_DEPTH);
        Self { depth }
    }

    /// `2^(depth+1) - 1`.
    pub fn node_count(&self) -> usize {
        (1usize << (self.depth + 1)) - 1
    }

    /// Cells of the sampling grid, `2^(depth+1)`.
    pub fn resolution(&self) -> usize {
        1usize << (self.depth + 1)
    }

    pub fn contains(&self, node: &DyadicIndex) -> bool {
        node.level <= self.depth
    }

    /// Canonical matrix index of `node`.
    pub fn index_of(&self, node: &DyadicIndex) -> usize {
        debug_assert!(self.contains(node));
        (1usize << node.level) - 1 + node.position as usize
    }

    pub fn node_at(&self, index: usize) -> DyadicIndex {
        debug_assert!(index < self.node_count());
        let level = usize::BITS - 1 - (index + 1).leading_zeros();
        DyadicIndex::new(level, (index + 1 - (1usize << level)) as u64)
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = DyadicIndex> + Clone {
        let tree = *self;
        (0..self.node_count()).map(move |i| tree.node_at(i))
    }

    /// Nodes `J ⊆ node` inside the tree, in canonical order.
    pub fn subtree(&self, node: DyadicIndex) -> impl Iterator<Item = DyadicIndex> {
        (node.level..=self.depth).flat_map(move |level| {
            let shift = level - node.level;
            let first = node.position << shift;
            (first..first + (1u64 << shift)).map(move |p| DyadicIndex::new(level, p))
        })
    }

    /// Nodes `J ⊊ node` inside the tree.
    pub fn strict_descendants(&self, node: DyadicIndex) -> impl Iterator<Item = DyadicIndex> {
        self.subtree(node).skip(1)
    }

    pub fn is_leaf(&self, node: &DyadicIndex) -> bool {
        node.level == self.depth
    }

    /// Grid cells covered by `node`.
    pub fn cells(&self, node: &DyadicIndex) -> Range<usize> {
        let width = 1usize << (self.depth + 1 - node.level);
        let start = node.position as usize * width;
        start..start + width
    }
}

/// A step function sampled on the `2^(depth+1)`-cell grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub depth: u32,
    pub samples: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(depth: u32) -> Self {
        Self {
            depth,
            samples: vec![Complex64::new(0.0, 0.0); Tree::new(depth).resolution()],
        }
    }

    pub fn constant(depth: u32, value: Complex64) -> Self {
        Self {
            depth,
            samples: vec![value; Tree::new(depth).resolution()],
        }
    }

    pub fn from_samples(depth: u32, samples: Vec<Complex64>) -> Result<Self> {
        let expected = Tree::new(depth).resolution();
        if samples.len() != expected {
            return Err(Error::ResolutionMismatch {
                expected,
                found: samples.len(),
            });
        }
        Ok(Self { depth, samples })
    }

    pub fn tree(&self) -> Tree {
        Tree::new(self.depth)
    }

    pub fn cell_len(&self) -> f64 {
        1.0 / self.samples.len() as f64
    }

    /// `⟨f, g⟩ = Σ f_i conj(g_i) / N`.
    pub fn inner(&self, other: &GridFunction) -> Complex64 {
        debug_assert_eq!(self.samples.len(), other.samples.len());
        let sum: Complex64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(f, g)| f * g.conj())
            .sum();
        sum * self.cell_len()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    /// Mean of `f` over `node`.
    pub fn average(&self, node: &DyadicIndex) -> Complex64 {
        let cells = self.tree().cells(node);
        let n = cells.len() as f64;
        self.samples[cells].iter().sum::<Complex64>() / n
    }

    /// `⟨f, h_node⟩`, computed from the two half-sums.
    pub fn haar_coefficient(&self, node: &DyadicIndex) -> Complex64 {
        let (left, right) = node.children();
        (self.average(&right) - self.average(&left)) * (0.5 * node.len().sqrt())
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// The two Haar-type families: `h_I^0 = h_I` and `h_I^1 = 1_I / |I|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HaarKind {
    /// `h_I^0`, mean zero and unit norm.
    Wavelet,
    /// `h_I^1`, the averaging functional.
    Average,
}

impl HaarKind {
    pub fn from_index(bit: u8) -> Self {
        if bit == 0 {
            HaarKind::Wavelet
        } else {
            HaarKind::Average
        }
    }
}

/// Exact samples of `h_node^0` or `h_node^1` on the depth-`depth` grid.
pub fn haar_grid(node: &DyadicIndex, depth: u32, kind: HaarKind) -> GridFunction {
    let tree = Tree::new(depth);
    assert!(tree.contains(node), "{node} outside depth {depth}");
    let mut f = GridFunction::zeros(depth);
    let cells = tree.cells(node);
    let half = cells.len() / 2;
    match kind {
        HaarKind::Wavelet => {
            let amp = 1.0 / node.len().sqrt();
            for (k, i) in cells.enumerate() {
                f.samples[i] = Complex64::new(if k < half { -amp } else { amp }, 0.0);
            }
        }
        HaarKind::Average => {
            let amp = 1.0 / node.len();
            for i in cells {
                f.samples[i] = Complex64::new(amp, 0.0);
            }
        }
    }
    f
}

/// Haar expansion of a grid function: its mean plus one coefficient per tree node.
#[derive(Clone, Debug, PartialEq)]
pub struct HaarCoefficients {
    pub depth: u32,
    pub mean: Complex64,
    pub values: Vec<Complex64>,
}

impl HaarCoefficients {
    pub fn zeros(depth: u32) -> Self {
        Self {
            depth,
            mean: Complex64::new(0.0, 0.0),
            values: vec![Complex64::new(0.0, 0.0); Tree::new(depth).node_count()],
        }
    }

    pub fn tree(&self) -> Tree {
        Tree::new(self.depth)
    }

    pub fn get(&self, node: &DyadicIndex) -> Complex64 {
        self.values[self.tree().index_of(node)]
    }

    pub fn analyze(f: &GridFunction) -> Self {
        let tree = f.tree();
        Self {
            depth: f.depth,
            mean: f.average(&DyadicIndex::ROOT),
            values: tree.nodes().map(|n| f.haar_coefficient(&n)).collect(),
        }
    }

    pub fn synthesize(&self) -> GridFunction {
        let tree = self.tree();
        let mut f = GridFunction::constant(self.depth, self.mean);
        for (node, c) in tree.nodes().zip(&self.values) {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let cells = tree.cells(&node);
            let half = cells.len() / 2;
            let amp = c / node.len().sqrt();
            for (k, i) in cells.enumerate() {
                if k < half {
                    f.samples[i] -= amp;
                } else {
                    f.samples[i] += amp;
                }
            }
        }
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn n(level: u32, position: u64) -> DyadicIndex {
        DyadicIndex::new(level, position)
    }

    #[test]
    fn children_examples() {
        assert_eq!(n(0, 0).children(), (n(1, 0), n(1, 1)));
        assert_eq!(n(1, 1).children(), (n(2, 2), n(2, 3)));
        assert_eq!(n(3, 5).children(), (n(4, 10), n(4, 11)));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(&n(0, 0), &n(2, 3)).unwrap(), 1);
        assert_eq!(delta(&n(0, 0), &n(1, 0)).unwrap(), -1);
        assert_eq!(delta(&n(1, 0), &n(1, 1)).unwrap(), 0);
    }

    #[test]
    fn delta_rejects_equal_and_enclosing() {
        assert!(matches!(
            delta(&n(2, 1), &n(2, 1)),
            Err(Error::UndefinedDelta { .. })
        ));
        assert!(matches!(
            delta(&n(2, 1), &n(1, 0)),
            Err(Error::UndefinedDelta { .. })
        ));
    }

    #[test]
    fn delta_sign_on_every_descendant() {
        let tree = Tree::new(5);
        for outer in tree.nodes().filter(|n| n.level < 5) {
            let (l, r) = outer.children();
            for d in tree.subtree(l) {
                assert_eq!(delta(&outer, &d).unwrap(), -1);
            }
            for d in tree.subtree(r) {
                assert_eq!(delta(&outer, &d).unwrap(), 1);
            }
        }
    }

    #[test]
    fn haar_value_examples() {
        assert_eq!(haar_value(&n(0, 0), &n(1, 1)).unwrap(), 1.0);
        // resolution-8 grid sample of h_{[0,1/2)} on [0,1/4)
        let g = haar_grid(&n(1, 0), 2, HaarKind::Wavelet);
        let sampled = g.samples[Tree::new(2).cells(&n(2, 0)).start].re;
        assert!((sampled + 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(haar_value(&n(1, 0), &n(2, 0)).unwrap(), sampled);
        assert_eq!(haar_value(&n(1, 0), &n(2, 2)).unwrap(), 0.0);
        assert!(matches!(
            haar_value(&n(1, 0), &n(0, 0)),
            Err(Error::NotConstant { .. })
        ));
    }

    #[test]
    fn haar_value_matches_grid_samples() {
        let tree = Tree::new(4);
        for i in tree.nodes() {
            let g = haar_grid(&i, 4, HaarKind::Wavelet);
            for j in tree.nodes() {
                if let Ok(v) = haar_value(&i, &j) {
                    for c in tree.cells(&j) {
                        assert_eq!(g.samples[c].re, v, "h_{i} on {j}");
                    }
                }
            }
        }
    }

    #[test]
    fn haar_grid_examples() {
        let h0 = haar_grid(&DyadicIndex::ROOT, 1, HaarKind::Wavelet);
        let re: Vec<f64> = h0.samples.iter().map(|c| c.re).collect();
        assert_eq!(re, vec![-1.0, -1.0, 1.0, 1.0]);
        let h1 = haar_grid(&DyadicIndex::ROOT, 1, HaarKind::Average);
        assert!(h1.samples.iter().all(|c| *c == Complex64::new(1.0, 0.0)));
        let h = haar_grid(&n(1, 0), 3, HaarKind::Wavelet);
        assert!((h.inner(&h).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn orthonormality() {
        for depth in 0..=6 {
            let tree = Tree::new(depth);
            let basis: Vec<_> = tree
                .nodes()
                .map(|n| haar_grid(&n, depth, HaarKind::Wavelet))
                .collect();
            for (a, fa) in basis.iter().enumerate() {
                for (b, fb) in basis.iter().enumerate() {
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((fa.inner(fb) - want).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn completeness_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for depth in 0..=8 {
            let samples = (0..Tree::new(depth).resolution())
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let f = GridFunction::from_samples(depth, samples).unwrap();
            let g = HaarCoefficients::analyze(&f).synthesize();
            assert!(f.max_abs_diff(&g) / f.norm() <= 1e-10);
        }
    }

    #[test]
    fn canonical_order_round_trips() {
        let tree = Tree::new(6);
        assert_eq!(tree.node_count(), 127);
        let mut prev = None;
        for (i, node) in tree.nodes().enumerate() {
            assert_eq!(tree.index_of(&node), i);
            if let Some(p) = prev {
                assert!(p < node, "level-major, position-ascending");
            }
            prev = Some(node);
        }
    }

    #[test]
    fn label_parsing() {
        assert_eq!("2:3".parse::<DyadicIndex>().unwrap(), n(2, 3));
        assert_eq!(n(4, 9).to_string(), "4:9");
        assert!("2:4".parse::<DyadicIndex>().is_err());
        assert!("x:1".parse::<DyadicIndex>().is_err());
        assert!("3".parse::<DyadicIndex>().is_err());
    }

    #[test]
    fn subtree_enumeration() {
        let tree = Tree::new(3);
        let sub: Vec<_> = tree.subtree(n(1, 1)).collect();
        assert_eq!(
            sub,
            vec![n(1, 1), n(2, 2), n(2, 3), n(3, 4), n(3, 5), n(3, 6), n(3, 7)]
        );
        assert_eq!(n(3, 5).ancestors().collect::<Vec<_>>(), vec![n(2, 2), n(1, 1), n(0, 0)]);
    }
}
