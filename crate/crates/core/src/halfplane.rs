//! Tile-constant functions on the upper half-plane and the operators used to
//! transplant `Π_b Π_d` there.
//!
//! A [`TileCoefficients`] value `f` stands for `Σ_I f_I 1_{T(I)}` where
//! `T(I) = I × [|I|/2, |I|]` is the Carleson tile of `I`. Inner products carry
//! the tile area: `⟨f, g⟩_σ = ½ Σ_I f_I conj(g_I) σ_I |I|²`.
//!
//! Normalization of the signed cube `1_{Q±(J)}` inside `U` uses the nominal
//! constant `|J|/2` ([`signed_cube_nominal_norm`]); the factor-2 agreement of
//! the transplanted Gram matrix depends on exactly this constant.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dyadic::{delta, DyadicIndex, Half, Tree};
use crate::error::{Error, Result};
use crate::paraproducts::{check_depths, OperatorMatrix};
use crate::symbols::{nu_table, Symbol};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct TileCoefficients {
    depth: u32,
    values: Vec<Complex64>,
}

impl TileCoefficients {
    pub fn zeros(depth: u32) -> Self {
        Self {
            depth,
            values: vec![ZERO; Tree::new(depth).node_count()],
        }
    }

    pub fn from_fn(depth: u32, f: impl Fn(DyadicIndex) -> Complex64) -> Self {
        Self {
            depth,
            values: Tree::new(depth).nodes().map(f).collect(),
        }
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

    pub fn get(&self, node: &DyadicIndex) -> Complex64 {
        self.values[self.tree().index_of(node)]
    }

    pub fn set(&mut self, node: &DyadicIndex, v: Complex64) {
        let i = self.tree().index_of(node);
        self.values[i] = v;
    }

    pub fn add_assign_scaled(&mut self, coef: Complex64, other: &TileCoefficients) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += coef * b;
        }
    }

    pub fn scaled(&self, coef: Complex64) -> Self {
        Self {
            depth: self.depth,
            values: self.values.iter().map(|v| v * coef).collect(),
        }
    }

    pub fn add(&self, other: &TileCoefficients) -> Self {
        let mut out = self.clone();
        out.add_assign_scaled(Complex64::new(1.0, 0.0), other);
        out
    }

    /// Unweighted `⟨f, g⟩ = ½ Σ f_I conj(g_I) |I|²`.
    pub fn inner(&self, other: &TileCoefficients) -> Complex64 {
        self.tree()
            .nodes()
            .zip(self.values.iter().zip(&other.values))
            .map(|(node, (f, g))| f * g.conj() * (0.5 * node.len() * node.len()))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    /// `⟨f, g⟩_σ = ½ Σ f_I conj(g_I) σ_I |I|²`.
    pub fn inner_weighted(&self, other: &TileCoefficients, weight: &Weight) -> Complex64 {
        self.tree()
            .nodes()
            .zip(self.values.iter().zip(&other.values))
            .zip(&weight.values)
            .map(|((node, (f, g)), s)| f * g.conj() * (0.5 * s * node.len() * node.len()))
            .sum()
    }

    pub fn norm_weighted(&self, weight: &Weight) -> f64 {
        self.inner_weighted(self, weight).re.max(0.0).sqrt()
    }

    /// Pointwise product with a weight function.
    pub fn times_weight(&self, weight: &Weight) -> Self {
        Self {
            depth: self.depth,
            values: self
                .values
                .iter()
                .zip(&weight.values)
                .map(|(f, s)| f * s)
                .collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &TileCoefficients) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// A non-negative tile-constant weight `σ = Σ σ_I 1_{T(I)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    depth: u32,
    values: Vec<f64>,
}

impl Weight {
    fn from_fn(depth: u32, f: impl Fn(DyadicIndex) -> f64) -> Self {
        Self {
            depth,
            values: Tree::new(depth).nodes().map(f).collect(),
        }
    }

    /// `μ = Σ |I| 1_{T(I)}`.
    pub fn mu(depth: u32) -> Self {
        Self::from_fn(depth, |n| n.len())
    }

    /// `ν = Σ |b_I|² |I|⁻² 1_{T(I)}`.
    pub fn nu(b: &Symbol) -> Self {
        Self::from_fn(b.depth(), |n| b.get(&n).norm_sqr() / (n.len() * n.len()))
    }

    /// `w = Σ |I|⁻¹ 1_{T(I)}`.
    pub fn w(depth: u32) -> Self {
        Self::from_fn(depth, |n| 1.0 / n.len())
    }

    pub fn get(&self, node: &DyadicIndex) -> f64 {
        self.values[Tree::new(self.depth).index_of(node)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Indicator {
    /// `1_{T(I)}`.
    Tile(DyadicIndex),
    /// `1_{Q(I)}`, every tile `T(J)` with `J ⊆ I`.
    Cube(DyadicIndex),
    /// `1_{Q±(I)}`: `+1` on tiles under `I⁺`, `-1` under `I⁻`, 0 on `T(I)`.
    SignedCube(DyadicIndex),
}

pub fn indicator(kind: Indicator, depth: u32) -> TileCoefficients {
    let one = Complex64::new(1.0, 0.0);
    match kind {
        Indicator::Tile(i) => TileCoefficients::from_fn(depth, |n| if n == i { one } else { ZERO }),
        Indicator::Cube(i) => {
            TileCoefficients::from_fn(depth, |n| if i.contains(&n) { one } else { ZERO })
        }
        Indicator::SignedCube(i) => TileCoefficients::from_fn(depth, |n| match i.half_containing(&n) {
            Some(h) => Complex64::new(h.sign(), 0.0),
            None => ZERO,
        }),
    }
}

/// `‖1_{T(J)}‖ = |J| / √2`.
pub fn tile_norm(node: &DyadicIndex) -> f64 {
    node.len() * std::f64::consts::FRAC_1_SQRT_2
}

/// The constant `|J| / 2` used to normalize `1_{Q±(J)}`.
///
/// This is not the computed norm, which is `|J|/√2 · (1 - 2^-(D - level))^{1/2}`
/// on the finite tree.
pub fn signed_cube_nominal_norm(node: &DyadicIndex) -> f64 {
    node.len() * 0.5
}

/// `1_{T(J)} / ‖1_{T(J)}‖`.
pub fn normalized_tile(node: DyadicIndex, depth: u32) -> TileCoefficients {
    indicator(Indicator::Tile(node), depth).scaled(Complex64::new(1.0 / tile_norm(&node), 0.0))
}

/// `1_{Q±(J)}` divided by its nominal norm.
pub fn normalized_signed_cube(node: DyadicIndex, depth: u32) -> TileCoefficients {
    indicator(Indicator::SignedCube(node), depth)
        .scaled(Complex64::new(1.0 / signed_cube_nominal_norm(&node), 0.0))
}

/// `(M_a^α f)_I = a_I |I|^α f_I`.
pub fn apply_m(a: &Symbol, alpha: f64, f: &TileCoefficients) -> TileCoefficients {
    TileCoefficients::from_fn(f.depth, |n| a.get(&n) * n.len().powf(alpha) * f.get(&n))
}

/// `Σ_k out_k ⊗ in_k`, acting as `f ↦ Σ_k ⟨f, in_k⟩ out_k`.
#[derive(Clone, Debug)]
pub struct TensorSum {
    terms: Vec<(TileCoefficients, TileCoefficients)>,
}

impl TensorSum {
    pub fn apply(&self, f: &TileCoefficients) -> TileCoefficients {
        let mut out = TileCoefficients::zeros(f.depth);
        for (o, i) in &self.terms {
            let c = f.inner(i);
            if c != ZERO {
                out.add_assign_scaled(c, o);
            }
        }
        out
    }

    /// The transposed sum `Σ_k in_k ⊗ out_k`.
    pub fn apply_adjoint(&self, g: &TileCoefficients) -> TileCoefficients {
        let mut out = TileCoefficients::zeros(g.depth);
        for (o, i) in &self.terms {
            let c = g.inner(o);
            if c != ZERO {
                out.add_assign_scaled(c, i);
            }
        }
        out
    }
}

/// `U = Σ_J 1̃_{Q±(J)} ⊗ 1̃_{T(J)}` on the depth-`depth` tree. Leaf tiles are
/// annihilated: their signed cubes are empty.
pub fn u_operator(depth: u32) -> TensorSum {
    TensorSum {
        terms: Tree::new(depth)
            .nodes()
            .map(|j| (normalized_signed_cube(j, depth), normalized_tile(j, depth)))
            .collect(),
    }
}

pub fn apply_u(f: &TileCoefficients) -> TileCoefficients {
    u_operator(f.depth).apply(f)
}

pub fn apply_u_adjoint(g: &TileCoefficients) -> TileCoefficients {
    u_operator(g.depth).apply_adjoint(g)
}

/// `2 Σ_{I ⊊ K ⊊ J} d_K b_I δ^(J,K) δ^(K,I) / (|J|^½ |K|^½)`, assembled top-down
/// from each column.
pub fn t_gram_closed(b: &Symbol, d: &Symbol) -> Result<OperatorMatrix> {
    check_depths(b, d)?;
    let depth = b.depth();
    let tree = b.tree();
    Ok(OperatorMatrix::from_columns(depth, |col| {
        let j = tree.node_at(col);
        let mut out = vec![ZERO; tree.node_count()];
        for k in tree.strict_descendants(j) {
            let dk = d.get(&k);
            if dk == ZERO {
                continue;
            }
            let djk = delta(&j, &k).expect("k inside j") as f64;
            let outer = dk * (2.0 * djk / (j.len().sqrt() * k.len().sqrt()));
            for i in tree.strict_descendants(k) {
                let dki = delta(&k, &i).expect("i inside k") as f64;
                out[tree.index_of(&i)] += outer * b.get(&i) * dki;
            }
        }
        out
    }))
}

/// Gram matrix of `M_b^{-1} U M_d^{-1/2} U M_1^{1/2}` against normalized tiles,
/// by applying the five factors to each basis vector.
pub fn t_gram_direct(b: &Symbol, d: &Symbol) -> Result<OperatorMatrix> {
    check_depths(b, d)?;
    let depth = b.depth();
    let tree = b.tree();
    let u = u_operator(depth);
    let unit = Symbol::constant(depth, Complex64::new(1.0, 0.0));
    let tiles: Vec<TileCoefficients> = tree.nodes().map(|n| normalized_tile(n, depth)).collect();
    Ok(OperatorMatrix::from_columns(depth, |col| {
        let mut x = apply_m(&unit, 0.5, &tiles[col]);
        x = u.apply(&x);
        x = apply_m(d, -0.5, &x);
        x = u.apply(&x);
        x = apply_m(b, -1.0, &x);
        tiles.iter().map(|t| x.inner(t)).collect()
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightedBasis {
    /// `h_I^μ = 1̃_{T(I)} / √μ_I` with `μ_I = |I|`.
    HMu(DyadicIndex),
    /// `H_J^ν = ν̃(J) (-1_{Q(J⁺)}/ν(J⁺) + 1_{Q(J⁻)}/ν(J⁻))` with cube masses `ν(Q(·))`.
    HNu(DyadicIndex),
}

/// The `ν`-mass `‖1_{Q(J)}‖²_ν` of a cube; half the sequence sum `Σ_{K ⊆ J} |b_K|²`
/// because each tile has area `|K|²/2`.
pub fn cube_nu_mass(weight: &Weight, node: DyadicIndex, depth: u32) -> f64 {
    if !Tree::new(depth).contains(&node) {
        return 0.0;
    }
    let q = indicator(Indicator::Cube(node), depth);
    q.inner_weighted(&q, weight).re
}

pub fn weighted_basis(b: &Symbol, kind: WeightedBasis) -> Result<TileCoefficients> {
    let depth = b.depth();
    match kind {
        WeightedBasis::HMu(i) => Ok(normalized_tile(i, depth)
            .scaled(Complex64::new(1.0 / Weight::mu(depth).get(&i).sqrt(), 0.0))),
        WeightedBasis::HNu(j) => {
            let weight = Weight::nu(b);
            let (jl, jr) = j.children();
            let ml = cube_nu_mass(&weight, jl, depth);
            let mr = cube_nu_mass(&weight, jr, depth);
            if ml <= 0.0 || mr <= 0.0 {
                return Err(Error::DegenerateNu(j));
            }
            let tilde = (ml * mr / (ml + mr)).sqrt();
            let right = indicator(Indicator::Cube(jr), depth)
                .scaled(Complex64::new(-tilde / mr, 0.0));
            let left = indicator(Indicator::Cube(jl), depth)
                .scaled(Complex64::new(tilde / ml, 0.0));
            Ok(right.add(&left))
        }
    }
}

/// `⟨1̃_{Q±(K)}, H_J^ν⟩_ν`, evaluated from the tile coefficients.
pub fn inner_qpm_hnu(b: &Symbol, k: DyadicIndex, j: DyadicIndex) -> Result<Complex64> {
    let h = weighted_basis(b, WeightedBasis::HNu(j))?;
    let q = normalized_signed_cube(k, b.depth());
    Ok(q.inner_weighted(&h, &Weight::nu(b)))
}

/// `U M_d^{-1/2} U (μ 1_{T(I)})` by operator application, with its `ν`-weighted norm.
pub fn forward_testing(b: &Symbol, d: &Symbol, i: DyadicIndex) -> Result<(TileCoefficients, f64)> {
    check_depths(b, d)?;
    let depth = b.depth();
    let u = u_operator(depth);
    let x = indicator(Indicator::Tile(i), depth).times_weight(&Weight::mu(depth));
    let v = u.apply(&apply_m(d, -0.5, &u.apply(&x)));
    let norm = v.norm_weighted(&Weight::nu(b));
    Ok((v, norm))
}

/// The expansion `(√2/2) μ_I Σ_{K ⊊ I} δ^(I,K) |K|^½ d_K 1̃_{Q±(K)}`.
pub fn forward_testing_closed(d: &Symbol, i: DyadicIndex) -> TileCoefficients {
    let depth = d.depth();
    let tree = d.tree();
    let mu_i = i.len();
    let mut out = TileCoefficients::zeros(depth);
    for k in tree.strict_descendants(i) {
        let dk = d.get(&k);
        if dk == ZERO {
            continue;
        }
        let s = delta(&i, &k).expect("k inside i") as f64;
        let coef = dk * (std::f64::consts::FRAC_1_SQRT_2 * mu_i * s * k.len().sqrt());
        out.add_assign_scaled(coef, &normalized_signed_cube(k, depth));
    }
    out
}

/// `Σ_{J ⊆ I} |J|⁻¹ |Σ_{K ⊊ J} δ^(J,K) |K|^{-½} conj(d_K) (ν(K⁺) - ν(K⁻))|²`.
pub fn backward_testing(b: &Symbol, d: &Symbol, i: DyadicIndex) -> Result<f64> {
    check_depths(b, d)?;
    let nu = nu_table(b);
    if nu.nu(&i) <= 0.0 {
        return Err(Error::ZeroNu(i));
    }
    let tree = b.tree();
    let mut total = 0.0;
    for j in tree.subtree(i) {
        let mut inner = ZERO;
        for k in tree.strict_descendants(j) {
            let s = match j.half_containing(&k) {
                Some(Half::Right) => 1.0,
                Some(Half::Left) => -1.0,
                None => unreachable!(),
            };
            let diff = nu.nu(&k.right_child()) - nu.nu(&k.left_child());
            inner += d.get(&k).conj() * (s * diff / k.len().sqrt());
        }
        total += inner.norm_sqr() / j.len();
    }
    Ok(total)
}

/// Gram matrix `⟨e_i, e_j⟩_σ` of a family, for orthonormality checks.
pub fn weighted_gram(family: &[TileCoefficients], weight: &Weight) -> Vec<Vec<Complex64>> {
    family
        .par_iter()
        .map(|a| family.iter().map(|c| a.inner_weighted(c, weight)).collect())
        .collect()
}

/// `max |G - Id|` over a Gram table.
pub fn identity_deviation(gram: &[Vec<Complex64>]) -> f64 {
    gram.iter()
        .enumerate()
        .flat_map(|(i, row)| {
            row.iter().enumerate().map(move |(j, v)| {
                let want = if i == j { 1.0 } else { 0.0 };
                (v - want).norm()
            })
        })
        .fold(0.0, f64::max)
}
