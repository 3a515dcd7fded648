//! Symbol sequences `b = {b_I}` on the finite tree and the quantities derived
//! from them. `ν` and `ν̃` are cumulative subtree masses; `bmo_norm` is the dyadic BMO norm.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dyadic::{DyadicIndex, Half, Tree};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// One complex value per node of a depth-`D` tree; nodes outside are 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Symbol {
    depth: u32,
    values: Vec<Complex64>,
}

impl Symbol {
    pub fn zeros(depth: u32) -> Self {
        Self::constant(depth, ZERO)
    }

    pub fn constant(depth: u32, value: Complex64) -> Self {
        Self {
            depth,
            values: vec![value; Tree::new(depth).node_count()],
        }
    }

    pub fn from_values(depth: u32, values: Vec<Complex64>) -> Result<Self> {
        if depth > Tree::MAX_DEPTH {
            return Err(Error::InvalidParameter(format!(
                "depth {depth} exceeds {}",
                Tree::MAX_DEPTH
            )));
        }
        let expected = Tree::new(depth).node_count();
        if values.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "depth {depth} needs {expected} values, got {}",
                values.len()
            )));
        }
        Ok(Self { depth, values })
    }

    pub fn from_fn(depth: u32, mut f: impl FnMut(DyadicIndex) -> Complex64) -> Self {
        let values = Tree::new(depth).nodes().map(&mut f).collect();
        Self { depth, values }
    }

    /// Unit mass at `node`, zero elsewhere.
    pub fn atom(depth: u32, node: DyadicIndex) -> Self {
        Self::from_fn(depth, |n| if n == node { Complex64::new(1.0, 0.0) } else { ZERO })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn tree(&self) -> Tree {
        Tree::new(self.depth)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `b_I`, or 0 outside the tree.
    pub fn get(&self, node: &DyadicIndex) -> Complex64 {
        let tree = self.tree();
        if tree.contains(node) {
            self.values[tree.index_of(node)]
        } else {
            ZERO
        }
    }

    pub fn set(&mut self, node: &DyadicIndex, value: Complex64) {
        let i = self.tree().index_of(node);
        self.values[i] = value;
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            depth: self.depth,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    /// SHA-256 over the depth and the little-endian bit patterns, hex, 16 chars.
    /// `-0.0` hashes as `0.0`.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.depth.to_le_bytes());
        for v in &self.values {
            h.update((v.re + 0.0).to_le_bytes());
            h.update((v.im + 0.0).to_le_bytes());
        }
        hex::encode(&h.finalize()[..8])
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = SymbolFile {
            depth: self.depth,
            entries: self
                .tree()
                .nodes()
                .zip(&self.values)
                .filter(|(_, v)| **v != ZERO)
                .map(|(node, v)| SymbolEntry {
                    node: node.to_string(),
                    re: v.re,
                    im: v.im,
                })
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&file)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SymbolFile = serde_json::from_str(text)
            .map_err(|e| Error::Malformed(format!("symbol file: {e}")))?;
        if file.depth > Tree::MAX_DEPTH {
            return Err(Error::Malformed(format!(
                "symbol file: depth {} exceeds {}",
                file.depth,
                Tree::MAX_DEPTH
            )));
        }
        let mut b = Symbol::zeros(file.depth);
        let mut seen = HashSet::new();
        for e in file.entries {
            let (level, position) = split_label(&e.node)?;
            if level > file.depth {
                return Err(Error::NodeOutsideTree {
                    node: DyadicIndex { level, position },
                    depth: file.depth,
                });
            }
            let node: DyadicIndex = e.node.parse()?;
            if !seen.insert(node) {
                return Err(Error::DuplicateNode(node));
            }
            if !e.re.is_finite() || !e.im.is_finite() {
                return Err(Error::Malformed(format!("non-finite value at {node}")));
            }
            b.set(&node, Complex64::new(e.re, e.im));
        }
        Ok(b)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymbolFile {
    depth: u32,
    entries: Vec<SymbolEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymbolEntry {
    node: String,
    re: f64,
    im: f64,
}

/// `level:position` without the range check, so depth errors can be told apart
/// from malformed labels.
fn split_label(label: &str) -> Result<(u32, u64)> {
    let bad = || Error::Malformed(format!("bad node label {label:?}"));
    let (l, p) = label.trim().split_once(':').ok_or_else(bad)?;
    Ok((l.parse().map_err(|_| bad())?, p.parse().map_err(|_| bad())?))
}

/// `ν(I) = Σ_{J ⊆ I} |b_J|²` (inclusive) and `ν̃(I)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NuTable {
    depth: u32,
    nu: Vec<f64>,
    nu_tilde: Vec<f64>,
}

impl NuTable {
    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// `ν(I)`; 0 below the leaves.
    pub fn nu(&self, node: &DyadicIndex) -> f64 {
        let tree = Tree::new(self.depth);
        if tree.contains(node) {
            self.nu[tree.index_of(node)]
        } else {
            0.0
        }
    }

    pub fn nu_tilde(&self, node: &DyadicIndex) -> f64 {
        let tree = Tree::new(self.depth);
        if tree.contains(node) {
            self.nu_tilde[tree.index_of(node)]
        } else {
            0.0
        }
    }

    /// `ν(I^±)` for the given half.
    pub fn nu_half(&self, node: &DyadicIndex, half: Half) -> f64 {
        self.nu(&node.child(half))
    }

    /// `ν(I⁻) - ν(I⁺)`, the signed child imbalance `-ν(I⁺) + ν(I⁻)`.
    pub fn imbalance(&self, node: &DyadicIndex) -> f64 {
        let (l, r) = node.children();
        self.nu(&l) - self.nu(&r)
    }

    pub fn nu_values(&self) -> &[f64] {
        &self.nu
    }

    pub fn nu_tilde_values(&self) -> &[f64] {
        &self.nu_tilde
    }
}

/// One bottom-up pass over the tree.
pub fn nu_table(b: &Symbol) -> NuTable {
    let tree = b.tree();
    let n = tree.node_count();
    let mut nu = vec![0.0; n];
    let mut nu_tilde = vec![0.0; n];
    for i in (0..n).rev() {
        let node = tree.node_at(i);
        let (mut left, mut right) = (0.0, 0.0);
        if !tree.is_leaf(&node) {
            let (l, r) = node.children();
            left = nu[tree.index_of(&l)];
            right = nu[tree.index_of(&r)];
        }
        nu[i] = b.values[i].norm_sqr() + left + right;
        let total = left + right;
        nu_tilde[i] = if total > 0.0 {
            (left * right / total).sqrt()
        } else {
            0.0
        };
    }
    NuTable {
        depth: b.depth,
        nu,
        nu_tilde,
    }
}

/// `sup_I (ν(I) / |I|)^{1/2}` over the tree.
pub fn bmo_norm(b: &Symbol) -> f64 {
    bmo_norm_with(b, &nu_table(b))
}

pub(crate) fn bmo_norm_with(b: &Symbol, nu: &NuTable) -> f64 {
    b.tree()
        .nodes()
        .map(|node| (nu.nu(&node) / node.len()).sqrt())
        .fold(0.0, f64::max)
}

/// Entrywise `λ b`.
pub fn scale(b: &Symbol, lambda: Complex64) -> Symbol {
    b.map(|v| v * lambda)
}

/// Law of the random factors `g_I` in the random ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    /// Standard complex normal, `E|g|² = 1`.
    #[default]
    ComplexNormal,
    /// Standard real normal.
    RealNormal,
    /// Real and imaginary parts independent uniform on `[-1, 1)`.
    Uniform,
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Distribution::ComplexNormal => "complex_normal",
            Distribution::RealNormal => "real_normal",
            Distribution::Uniform => "uniform",
        })
    }
}

pub const DEFAULT_GAMMA: f64 = 0.75;
pub const BORDERLINE_GAMMA: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymbolKind {
    Zero,
    Constant {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    /// `b_I = √|I|`.
    LogType,
    /// `b_I = |I|^γ g_I`, draws taken in canonical node order.
    Random {
        seed: u64,
        #[serde(default = "default_gamma")]
        gamma: f64,
        #[serde(default)]
        distribution: Distribution,
    },
}

fn default_gamma() -> f64 {
    DEFAULT_GAMMA
}

impl SymbolKind {
    pub fn random(seed: u64) -> Self {
        SymbolKind::Random {
            seed,
            gamma: DEFAULT_GAMMA,
            distribution: Distribution::default(),
        }
    }

    pub fn constant(value: f64) -> Self {
        SymbolKind::Constant { re: value, im: 0.0 }
    }
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolKind::Zero => write!(f, "zero"),
            SymbolKind::Constant { re, im } if *im == 0.0 => write!(f, "const:{re}"),
            SymbolKind::Constant { re, im } => write!(f, "const:{}", Complex64::new(*re, *im)),
            SymbolKind::LogType => write!(f, "log"),
            SymbolKind::Random {
                seed,
                gamma,
                distribution,
            } => write!(f, "random:seed={seed},gamma={gamma},dist={distribution}"),
        }
    }
}

pub fn generate(kind: SymbolKind, depth: u32) -> Symbol {
    match kind {
        SymbolKind::Zero => Symbol::zeros(depth),
        SymbolKind::Constant { re, im } => Symbol::constant(depth, Complex64::new(re, im)),
        SymbolKind::LogType => {
            Symbol::from_fn(depth, |n| Complex64::new(n.len().sqrt(), 0.0))
        }
        SymbolKind::Random {
            seed,
            gamma,
            distribution,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Symbol::from_fn(depth, |n| {
                let g = match distribution {
                    Distribution::ComplexNormal => {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
                    }
                    Distribution::RealNormal => Complex64::new(rng.sample(StandardNormal), 0.0),
                    Distribution::Uniform => Complex64::new(
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                    ),
                };
                g * n.len().powf(gamma)
            })
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complex_normal" | "complex" => Ok(Distribution::ComplexNormal),
            "real_normal" | "real" => Ok(Distribution::RealNormal),
            "uniform" => Ok(Distribution::Uniform),
            _ => Err(Error::Malformed(format!("unknown distribution {s:?}"))),
        }
    }
}

/// Where a symbol comes from: a generator or a JSON file.
///
/// Text form: `zero`, `const:<c>`, `log`, `random[:seed=<n>][,gamma=<g>][,dist=<name>]`,
/// `file:<path>`. A complex constant is written `1+2i`.
#[derive(Clone, Debug, PartialEq)]
pub enum SymbolSpec {
    Generated(SymbolKind),
    File(PathBuf),
}

impl SymbolSpec {
    /// Parses `text`; a `random` descriptor without `seed=` takes `default_seed`.
    pub fn parse(text: &str, default_seed: u64) -> Result<Self> {
        let bad = |why: &str| Error::Malformed(format!("symbol descriptor {text:?}: {why}"));
        let (head, rest) = match text.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (text, None),
        };
        match (head, rest) {
            ("zero", None) => Ok(SymbolSpec::Generated(SymbolKind::Zero)),
            ("log", None) => Ok(SymbolSpec::Generated(SymbolKind::LogType)),
            ("const", Some(c)) => {
                let v = Complex64::from_str(c.trim()).map_err(|_| bad("bad constant"))?;
                Ok(SymbolSpec::Generated(SymbolKind::Constant { re: v.re, im: v.im }))
            }
            ("file", Some(p)) if !p.is_empty() => Ok(SymbolSpec::File(PathBuf::from(p))),
            ("random", params) => {
                let (mut seed, mut gamma, mut distribution) =
                    (default_seed, DEFAULT_GAMMA, Distribution::default());
                for kv in params.into_iter().flat_map(|p| p.split(',')).filter(|s| !s.is_empty()) {
                    let (k, v) = kv.split_once('=').ok_or_else(|| bad("expected key=value"))?;
                    match k.trim() {
                        "seed" => seed = v.trim().parse().map_err(|_| bad("bad seed"))?,
                        "gamma" => {
                            gamma = v.trim().parse().map_err(|_| bad("bad gamma"))?;
                            if !f64::is_finite(gamma) {
                                return Err(bad("gamma must be finite"));
                            }
                        }
                        "dist" => distribution = v.trim().parse()?,
                        other => return Err(bad(&format!("unknown key {other:?}"))),
                    }
                }
                Ok(SymbolSpec::Generated(SymbolKind::Random {
                    seed,
                    gamma,
                    distribution,
                }))
            }
            _ => Err(bad("expected zero, const:<c>, log, random[:...] or file:<path>")),
        }
    }

    /// Depth carried by the descriptor itself (files only).
    pub fn file_depth(&self) -> Result<Option<u32>> {
        match self {
            SymbolSpec::File(p) => Ok(Some(Symbol::load(p)?.depth())),
            SymbolSpec::Generated(_) => Ok(None),
        }
    }

    /// Builds the symbol; a file must match `depth`.
    pub fn resolve(&self, depth: u32) -> Result<Symbol> {
        match self {
            SymbolSpec::Generated(kind) => Ok(generate(*kind, depth)),
            SymbolSpec::File(p) => {
                let s = Symbol::load(p)?;
                if s.depth() != depth {
                    return Err(Error::DepthMismatch {
                        left: s.depth(),
                        right: depth,
                    });
                }
                Ok(s)
            }
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            SymbolSpec::Generated(SymbolKind::Random { seed, .. }) => Some(*seed),
            _ => None,
        }
    }
}

impl fmt::Display for SymbolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolSpec::Generated(k) => k.fmt(f),
            SymbolSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(level: u32, position: u64) -> DyadicIndex {
        DyadicIndex::new(level, position)
    }

    /// Direct `Σ_{J ⊆ I} |b_J|²` by scanning every node.
    fn nu_brute(b: &Symbol, node: &DyadicIndex) -> f64 {
        b.tree()
            .nodes()
            .filter(|j| node.contains(j))
            .map(|j| b.get(&j).norm_sqr())
            .sum()
    }

    #[test]
    fn nu_of_zero_symbol() {
        let t = nu_table(&Symbol::zeros(3));
        assert!(t.nu_values().iter().all(|&v| v == 0.0));
        assert!(t.nu_tilde_values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn nu_of_constant_one() {
        let t = nu_table(&Symbol::constant(2, Complex64::new(1.0, 0.0)));
        assert_eq!(t.nu(&n(0, 0)), 7.0);
        assert_eq!(t.nu(&n(1, 1)), 3.0);
        assert_eq!(t.nu(&n(2, 2)), 1.0);
        assert!((t.nu_tilde(&n(0, 0)) - 1.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(t.nu_tilde(&n(2, 0)), 0.0);
    }

    #[test]
    fn nu_matches_brute_force_and_invariants() {
        for seed in 0..10 {
            let b = generate(SymbolKind::random(seed), 5);
            let t = nu_table(&b);
            for node in b.tree().nodes() {
                assert!((t.nu(&node) - nu_brute(&b, &node)).abs() < 1e-12);
                if let Some(p) = node.parent() {
                    assert!(t.nu(&node) <= t.nu(&p));
                }
                let (l, r) = node.children();
                let lo = t.nu(&l).min(t.nu(&r));
                assert!(t.nu_tilde(&node).powi(2) <= lo * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn bmo_examples() {
        assert_eq!(bmo_norm(&Symbol::zeros(4)), 0.0);
        let one = Symbol::constant(2, Complex64::new(1.0, 0.0));
        assert!((bmo_norm(&one) - 7f64.sqrt()).abs() < 1e-15);
        for depth in 0..=10 {
            let b = generate(SymbolKind::LogType, depth);
            let expect = ((depth + 1) as f64).sqrt();
            assert!((bmo_norm(&b) - expect).abs() < 1e-12, "depth {depth}");
        }
    }

    #[test]
    fn generator_examples() {
        let z = generate(SymbolKind::Zero, 3);
        assert_eq!(z.values().len(), 15);
        assert!(z.values().iter().all(|v| *v == ZERO));

        let log = generate(SymbolKind::LogType, 1);
        let h = 0.5f64.sqrt();
        assert_eq!(
            log.values(),
            &[Complex64::new(1.0, 0.0), Complex64::new(h, 0.0), Complex64::new(h, 0.0)]
        );

        let kind = SymbolKind::Random {
            seed: 7,
            gamma: 0.5,
            distribution: Distribution::ComplexNormal,
        };
        assert_eq!(generate(kind, 6), generate(kind, 6));
        assert_ne!(generate(kind, 6), generate(SymbolKind::random(8), 6));
    }

    #[test]
    fn random_ensembles_respect_gamma() {
        for dist in [Distribution::RealNormal, Distribution::Uniform] {
            let b = generate(
                SymbolKind::Random {
                    seed: 1,
                    gamma: 1.0,
                    distribution: dist,
                },
                4,
            );
            for node in b.tree().nodes() {
                let bound = if dist == Distribution::Uniform { 2f64.sqrt() } else { 10.0 };
                assert!(b.get(&node).norm() <= bound * node.len());
                if dist == Distribution::RealNormal {
                    assert_eq!(b.get(&node).im, 0.0);
                }
            }
        }
    }

    #[test]
    fn scale_examples() {
        let one = Symbol::constant(2, Complex64::new(1.0, 0.0));
        assert!(scale(&one, ZERO).values().iter().all(|v| *v == ZERO));
        assert_eq!(nu_table(&scale(&one, Complex64::new(2.0, 0.0))).nu(&DyadicIndex::ROOT), 28.0);
        assert_eq!(nu_table(&scale(&one, Complex64::i())), nu_table(&one));
    }

    #[test]
    fn bmo_is_homogeneous() {
        let b = generate(SymbolKind::random(3), 6);
        for lambda in [Complex64::new(2.0, 0.0), Complex64::i(), Complex64::new(0.3, -1.1)] {
            let lhs = bmo_norm(&scale(&b, lambda));
            assert!((lhs - lambda.norm() * bmo_norm(&b)).abs() <= 1e-12 * lhs.max(1.0));
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.json");
        let b = generate(SymbolKind::random(5), 4);
        b.save(&path).unwrap();
        assert_eq!(Symbol::load(&path).unwrap(), b);
    }

    #[test]
    fn file_errors_are_distinct() {
        let outside = r#"{"depth": 2, "entries": [{"node": "4:5", "re": 1, "im": 0}]}"#;
        assert!(matches!(
            Symbol::from_json(outside),
            Err(Error::NodeOutsideTree { depth: 2, .. })
        ));
        let dup = r#"{"depth": 2, "entries": [
            {"node": "1:0", "re": 1, "im": 0}, {"node": "1:0", "re": 2, "im": 0}]}"#;
        assert!(matches!(Symbol::from_json(dup), Err(Error::DuplicateNode(_))));
        assert!(matches!(Symbol::from_json("{not json"), Err(Error::Malformed(_))));
        let deep = r#"{"depth": 2, "entries": [{"node": "3:9", "re": 1, "im": 0}]}"#;
        assert!(matches!(
            Symbol::from_json(deep),
            Err(Error::NodeOutsideTree { depth: 2, .. })
        ));
        let bad_position = r#"{"depth": 2, "entries": [{"node": "1:5", "re": 1, "im": 0}]}"#;
        assert!(matches!(Symbol::from_json(bad_position), Err(Error::Malformed(_))));
    }

    #[test]
    fn missing_nodes_are_zero() {
        let sparse = r#"{"depth": 2, "entries": [{"node": "2:1", "re": 0.5, "im": -1}]}"#;
        let b = Symbol::from_json(sparse).unwrap();
        assert_eq!(b.get(&n(2, 1)), Complex64::new(0.5, -1.0));
        assert_eq!(b.get(&n(0, 0)), ZERO);
        assert_eq!(b.values().iter().filter(|v| **v != ZERO).count(), 1);
    }

    #[test]
    fn hash_tracks_content() {
        let a = generate(SymbolKind::random(1), 3);
        let mut b = a.clone();
        assert_eq!(a.content_hash(), b.content_hash());
        b.set(&n(3, 7), Complex64::new(9.0, 0.0));
        assert_ne!(a.content_hash(), b.content_hash());
        assert_eq!(a.content_hash().len(), 16);
    }

    #[test]
    fn hash_ignores_sign_of_zero() {
        let a = Symbol::from_values(1, vec![ZERO, Complex64::new(-0.0, 0.0), ZERO]).unwrap();
        let b = Symbol::from_values(1, vec![ZERO; 3]).unwrap();
        assert_eq!(a.content_hash(), b.content_hash());
    }

    #[test]
    fn spec_parsing() {
        let p = |t| SymbolSpec::parse(t, 9).unwrap();
        assert_eq!(p("zero"), SymbolSpec::Generated(SymbolKind::Zero));
        assert_eq!(p("log"), SymbolSpec::Generated(SymbolKind::LogType));
        assert_eq!(p("const:1"), SymbolSpec::Generated(SymbolKind::constant(1.0)));
        assert_eq!(
            p("const:1+2i"),
            SymbolSpec::Generated(SymbolKind::Constant { re: 1.0, im: 2.0 })
        );
        assert_eq!(p("random"), SymbolSpec::Generated(SymbolKind::random(9)));
        assert_eq!(p("random:seed=7"), SymbolSpec::Generated(SymbolKind::random(7)));
        assert_eq!(
            p("random:seed=7,gamma=0.5,dist=real"),
            SymbolSpec::Generated(SymbolKind::Random {
                seed: 7,
                gamma: 0.5,
                distribution: Distribution::RealNormal
            })
        );
        assert_eq!(p("file:a/b.json"), SymbolSpec::File("a/b.json".into()));
        for bad in ["", "const:", "const:x", "random:seed=-1", "random:foo=1", "file:", "logs", "zero:1"] {
            assert!(SymbolSpec::parse(bad, 0).is_err(), "{bad}");
        }
        assert_eq!(p("random:seed=7").seed(), Some(7));
        assert_eq!(p("random:seed=7").to_string(), "random:seed=7,gamma=0.75,dist=complex_normal");
    }

    #[test]
    fn spec_file_depth_check() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.json");
        generate(SymbolKind::random(1), 3).save(&path).unwrap();
        let spec = SymbolSpec::File(path);
        assert_eq!(spec.file_depth().unwrap(), Some(3));
        assert!(spec.resolve(3).is_ok());
        assert!(matches!(spec.resolve(4), Err(Error::DepthMismatch { .. })));
    }
}
