//! Dyadic paraproducts `P_b^(α,β) f = Σ_I b_I ⟨f, h_I^β⟩ h_I^α` on the real-line
//! side, and the Gram matrix of the composition `Π_b Π_d` in the Haar basis.
//!
//! Two independent routes build the Gram matrix: [`composition_gram_direct`]
//! applies the operators to sampled Haar functions, [`composition_gram_closed`]
//! sums over chains `I ⊊ K ⊊ J` without touching the grid.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{haar_grid, DyadicIndex, GridFunction, HaarKind, Tree};
use crate::error::{Error, Result};
use crate::symbols::Symbol;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// The paraproduct index `(α, β)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParaproductIndex {
    pub alpha: u8,
    pub beta: u8,
}

impl ParaproductIndex {
    /// `Π_b = P_b^(0,1)`.
    pub const PI: Self = Self { alpha: 0, beta: 1 };
    /// `Π_b^* = P_b^(1,0)` (for real `b`; in general the adjoint carries `conj(b)`).
    pub const PI_ADJOINT: Self = Self { alpha: 1, beta: 0 };
    /// The martingale transform `P_b^(0,0)`.
    pub const MARTINGALE: Self = Self { alpha: 0, beta: 0 };
    pub const AVERAGING: Self = Self { alpha: 1, beta: 1 };
}

/// `Σ_I b_I ⟨f, h_I^β⟩ h_I^α`, exact on the grid.
pub fn apply_paraproduct(
    b: &Symbol,
    index: ParaproductIndex,
    f: &GridFunction,
) -> Result<GridFunction> {
    let tree = b.tree();
    if f.samples.len() != tree.resolution() {
        return Err(Error::ResolutionMismatch {
            expected: tree.resolution(),
            found: f.samples.len(),
        });
    }
    let mut out = GridFunction::zeros(b.depth());
    for (node, &bi) in tree.nodes().zip(b.values()) {
        if bi == ZERO {
            continue;
        }
        let coef = match HaarKind::from_index(index.beta) {
            HaarKind::Wavelet => f.haar_coefficient(&node),
            HaarKind::Average => f.average(&node),
        } * bi;
        let cells = tree.cells(&node);
        match HaarKind::from_index(index.alpha) {
            HaarKind::Wavelet => {
                let amp = coef / node.len().sqrt();
                let half = cells.len() / 2;
                for (k, i) in cells.enumerate() {
                    if k < half {
                        out.samples[i] -= amp;
                    } else {
                        out.samples[i] += amp;
                    }
                }
            }
            HaarKind::Average => {
                let amp = coef / node.len();
                for i in cells {
                    out.samples[i] += amp;
                }
            }
        }
    }
    Ok(out)
}

/// Dense square matrix in canonical node order; entry `(i, j)` is `⟨T e_j, e_i⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    depth: u32,
    dim: usize,
    data: Vec<Complex64>,
}

impl OperatorMatrix {
    pub fn zeros(depth: u32) -> Self {
        let dim = Tree::new(depth).node_count();
        Self {
            depth,
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    /// Builds the matrix column by column (in parallel).
    pub fn from_columns(depth: u32, column: impl Fn(usize) -> Vec<Complex64> + Sync + Send) -> Self {
        let dim = Tree::new(depth).node_count();
        let cols: Vec<Vec<Complex64>> = (0..dim).into_par_iter().map(column).collect();
        let mut m = Self::zeros(depth);
        for (j, col) in cols.into_iter().enumerate() {
            debug_assert_eq!(col.len(), dim);
            for (i, v) in col.into_iter().enumerate() {
                m.data[i * dim + j] = v;
            }
        }
        m
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tree(&self) -> Tree {
        Tree::new(self.depth)
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    /// Entry `(I, J)` by node.
    pub fn entry(&self, row: &DyadicIndex, col: &DyadicIndex) -> Complex64 {
        let t = self.tree();
        self.get(t.index_of(row), t.index_of(col))
    }

    pub fn add_to(&mut self, row: usize, col: usize, v: Complex64) {
        self.data[row * self.dim + col] += v;
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, col)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == ZERO)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|v| **v != ZERO).count()
    }

    pub fn scaled(&self, lambda: Complex64) -> Self {
        self.map(|v| v * lambda)
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            depth: self.depth,
            dim: self.dim,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |A - B| / max(|A|_max, |B|_max)`; 0 when both vanish.
    pub fn normalized_diff(&self, other: &OperatorMatrix) -> f64 {
        let scale = self.max_abs().max(other.max_abs());
        if scale == 0.0 {
            0.0
        } else {
            self.max_abs_diff(other) / scale
        }
    }

    /// `y = M x`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.data
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// CSV with `level:pos` labels on the first row and column, entries as `re+imi`.
    pub fn to_csv(&self) -> String {
        let tree = self.tree();
        let mut out = String::from("node");
        for node in tree.nodes() {
            write!(out, ",{node}").unwrap();
        }
        out.push('\n');
        for (i, node) in tree.nodes().enumerate() {
            out.push_str(&node.to_string());
            for j in 0..self.dim {
                out.push(',');
                out.push_str(&format_complex(self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// `re+imi` with 17 significant digits per part.
pub fn format_complex(v: Complex64) -> String {
    // + 0.0 folds -0.0 into 0.0
    let (re, im) = (v.re + 0.0, v.im + 0.0);
    let sign = if im.is_sign_negative() { '-' } else { '+' };
    format!("{re:.16e}{sign}{:.16e}i", im.abs())
}

/// Ground truth: `⟨Π_b Π_d h_J, h_I⟩` with both paraproducts applied on the grid.
pub fn composition_gram_direct(b: &Symbol, d: &Symbol) -> Result<OperatorMatrix> {
    check_depths(b, d)?;
    let depth = b.depth();
    let tree = b.tree();
    let cols: Vec<Result<Vec<Complex64>>> = (0..tree.node_count())
        .into_par_iter()
        .map(|j| {
            let hj = haar_grid(&tree.node_at(j), depth, HaarKind::Wavelet);
            let inner = apply_paraproduct(d, ParaproductIndex::PI, &hj)?;
            let outer = apply_paraproduct(b, ParaproductIndex::PI, &inner)?;
            Ok(tree.nodes().map(|i| outer.haar_coefficient(&i)).collect())
        })
        .collect();
    let mut m = OperatorMatrix::zeros(depth);
    for (j, col) in cols.into_iter().enumerate() {
        for (i, v) in col?.into_iter().enumerate() {
            m.data[i * m.dim + j] = v;
        }
    }
    Ok(m)
}

/// `G_{I,J} = Σ_{I ⊊ K ⊊ J} d_K b_I h_J(K) h_K(I)`, by walking each row's
/// ancestor chain: `O(n D²)`.
pub fn composition_gram_closed(b: &Symbol, d: &Symbol) -> Result<OperatorMatrix> {
    check_depths(b, d)?;
    let tree = b.tree();
    let mut m = OperatorMatrix::zeros(b.depth());
    for (row, node_i) in tree.nodes().enumerate() {
        let bi = b.values()[row];
        if bi == ZERO {
            continue;
        }
        for node_k in node_i.ancestors() {
            let dk = d.get(&node_k);
            if dk == ZERO {
                continue;
            }
            let hk_i = signed_amplitude(&node_k, &node_i);
            for node_j in node_k.ancestors() {
                let hj_k = signed_amplitude(&node_j, &node_k);
                m.add_to(row, tree.index_of(&node_j), bi * dk * (hj_k * hk_i));
            }
        }
    }
    Ok(m)
}

/// `h_outer(inner)` for `inner ⊊ outer`.
#[inline]
pub(crate) fn signed_amplitude(outer: &DyadicIndex, inner: &DyadicIndex) -> f64 {
    let half = outer
        .half_containing(inner)
        .expect("inner must lie strictly inside outer");
    half.sign() / outer.len().sqrt()
}

pub(crate) fn check_depths(b: &Symbol, d: &Symbol) -> Result<()> {
    if b.depth() != d.depth() {
        return Err(Error::DepthMismatch {
            left: b.depth(),
            right: d.depth(),
        });
    }
    Ok(())
}

/// Above this dimension dense SVD is not attempted.
pub const DENSE_SVD_MAX_DIM: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum NormMethod {
    DenseSvd,
    /// Power iteration on `M* M` from a seeded random start.
    PowerIteration { tol: f64, max_iter: usize, seed: u64 },
}

impl NormMethod {
    pub const DEFAULT_POWER: NormMethod = NormMethod::PowerIteration {
        tol: 1e-12,
        max_iter: 200_000,
        seed: 0,
    };

    /// Dense SVD up to [`DENSE_SVD_MAX_DIM`], power iteration above.
    pub fn auto(dim: usize) -> Self {
        if dim <= DENSE_SVD_MAX_DIM {
            NormMethod::DenseSvd
        } else {
            Self::DEFAULT_POWER
        }
    }
}

/// Largest singular value of `m`.
pub fn operator_norm(m: &OperatorMatrix, method: NormMethod) -> Result<f64> {
    if m.is_zero() {
        return Ok(0.0);
    }
    match method {
        NormMethod::DenseSvd => {
            if m.dim > DENSE_SVD_MAX_DIM {
                return Err(Error::InvalidParameter(format!(
                    "dense SVD limited to dimension {DENSE_SVD_MAX_DIM}, got {}",
                    m.dim
                )));
            }
            let a = nalgebra::DMatrix::from_row_slice(m.dim, m.dim, &m.data);
            Ok(a.singular_values().iter().copied().fold(0.0, f64::max))
        }
        NormMethod::PowerIteration {
            tol,
            max_iter,
            seed,
        } => {
            if tol.is_nan() || tol <= 0.0 {
                return Err(Error::InvalidParameter(format!("tol must be > 0, got {tol}")));
            }
            power_iteration(&SparseRows::from_dense(m), tol, max_iter, seed)
        }
    }
}

/// Compressed rows of the nonzero entries; Gram matrices here have `O(n D)` of them.
struct SparseRows {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseRows {
    fn from_dense(m: &OperatorMatrix) -> Self {
        let mut row_start = Vec::with_capacity(m.dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_start.push(0);
        for row in m.data.chunks_exact(m.dim) {
            for (j, v) in row.iter().enumerate() {
                if *v != ZERO {
                    cols.push(j);
                    vals.push(*v);
                }
            }
            row_start.push(cols.len());
        }
        Self {
            dim: m.dim,
            row_start,
            cols,
            vals,
        }
    }

    fn mul(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let r = self.row_start[i]..self.row_start[i + 1];
            *yi = self.cols[r.clone()]
                .iter()
                .zip(&self.vals[r])
                .map(|(&j, a)| a * x[j])
                .sum();
        }
    }

    /// `y = M* x`.
    fn mul_adjoint(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.fill(ZERO);
        for (i, xi) in x.iter().enumerate() {
            let r = self.row_start[i]..self.row_start[i + 1];
            for (&j, a) in self.cols[r.clone()].iter().zip(&self.vals[r]) {
                y[j] += a.conj() * xi;
            }
        }
    }
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn power_iteration(m: &SparseRows, tol: f64, max_iter: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> = (0..m.dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let n0 = vec_norm(&v);
    v.iter_mut().for_each(|c| *c /= n0);

    let mut w = vec![ZERO; m.dim];
    let mut prev = f64::NAN;
    let mut last_change = f64::INFINITY;
    for _ in 0..max_iter {
        m.mul(&v, &mut w);
        // v is a unit vector, so ‖M v‖² is the Rayleigh quotient of M*M
        let sigma = vec_norm(&w);
        m.mul_adjoint(&w, &mut v);
        let nv = vec_norm(&v);
        if nv == 0.0 {
            return Ok(sigma);
        }
        v.iter_mut().for_each(|c| *c /= nv);
        if prev.is_finite() {
            last_change = (sigma - prev).abs() / sigma.max(f64::MIN_POSITIVE);
            if last_change < tol {
                return Ok(sigma);
            }
        }
        prev = sigma;
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        last_change,
    })
}
