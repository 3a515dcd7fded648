//! The three testing constants `A`, `B`, `C` and the BMO-control checks.
//!
//! Suprema run over the finite tree and record the node that attains them.
//! Every `x/0` with `x = 0` is read as 0. Squares of complex quantities are moduli squared.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dyadic::{DyadicIndex, GridFunction, HaarCoefficients, Tree};
use crate::error::Result;
use crate::paraproducts::{check_depths, composition_gram_closed, operator_norm, NormMethod};
use crate::symbols::{bmo_norm_with, nu_table, NuTable, Symbol};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A supremum over tree nodes with the first node attaining it in canonical order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sup {
    pub value: f64,
    pub witness: DyadicIndex,
}

impl Sup {
    fn of(items: impl Iterator<Item = (DyadicIndex, f64)>) -> Self {
        let mut best = Sup {
            value: 0.0,
            witness: DyadicIndex::ROOT,
        };
        for (node, v) in items {
            if v > best.value {
                best = Sup {
                    value: v,
                    witness: node,
                };
            }
        }
        best
    }
}

fn ratio_or_zero(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn p_term_with(nu: &NuTable, d: &Symbol, tree: &Tree, j: DyadicIndex) -> Complex64 {
    let mut sum = ZERO;
    for k in tree.strict_descendants(j) {
        let half = j.half_containing(&k).expect("strict descendant");
        let weight = ratio_or_zero(half.sign(), nu.nu_half(&j, half));
        sum += d.get(&k) * (weight * nu.imbalance(&k) / k.len().sqrt());
    }
    sum
}

fn q_term_with(nu: &NuTable, d: &Symbol, tree: &Tree, i: DyadicIndex) -> Complex64 {
    let mut sum = ZERO;
    for k in tree.strict_descendants(i) {
        let s = i.half_containing(&k).expect("strict descendant").sign();
        sum += d.get(&k) * (s * nu.imbalance(&k) / k.len().sqrt());
    }
    sum
}

/// `p(J) = Σ_{K ⊊ J} d_K |K|^{-½} δ^(J,K) / ν(J^±) · (ν(K⁻) - ν(K⁺))`.
pub fn p_term(b: &Symbol, d: &Symbol, j: DyadicIndex) -> Result<Complex64> {
    check_depths(b, d)?;
    Ok(p_term_with(&nu_table(b), d, &b.tree(), j))
}

/// `q(I) = Σ_{K ⊊ I} δ^(I,K) d_K |K|^{-½} (ν(K⁻) - ν(K⁺))`.
pub fn q_term(b: &Symbol, d: &Symbol, i: DyadicIndex) -> Result<Complex64> {
    check_depths(b, d)?;
    Ok(q_term_with(&nu_table(b), d, &b.tree(), i))
}

fn condition_a_with(nu: &NuTable, d: &Symbol, tree: &Tree) -> Sup {
    Sup::of(tree.nodes().map(|i| {
        let mut sum = ZERO;
        for j in tree.strict_descendants(i) {
            let half = i.half_containing(&j).expect("strict descendant");
            let weight = ratio_or_zero(nu.nu_tilde(&i), nu.nu_half(&i, half));
            sum += d.get(&j) * (weight * nu.imbalance(&j) / j.len().sqrt());
        }
        (i, sum.norm() / i.len().sqrt())
    }))
}

fn condition_b_with(nu: &NuTable, d: &Symbol, tree: &Tree) -> Sup {
    let terms: Vec<f64> = tree
        .nodes()
        .map(|j| {
            let t = nu.nu_tilde(&j);
            if t == 0.0 {
                return 0.0;
            }
            let inner = p_term_with(nu, d, tree, j) + d.get(&j) / j.len().sqrt();
            t * t * inner.norm_sqr()
        })
        .collect();
    Sup::of(tree.nodes().map(|i| {
        let s: f64 = tree
            .strict_descendants(i)
            .map(|j| terms[tree.index_of(&j)])
            .sum();
        (i, (s / i.len()).sqrt())
    }))
}

fn condition_c_with(nu: &NuTable, d: &Symbol, tree: &Tree) -> Sup {
    let terms: Vec<f64> = tree
        .nodes()
        .map(|j| q_term_with(nu, d, tree, j).norm_sqr() / j.len())
        .collect();
    Sup::of(tree.nodes().filter(|i| nu.nu(i) > 0.0).map(|i| {
        let s: f64 = tree.subtree(i).map(|j| terms[tree.index_of(&j)]).sum();
        (i, (s / nu.nu(&i)).sqrt())
    }))
}

/// `sup_I |I|^{-½} |Σ_{J ⊊ I} d_J |J|^{-½} ν̃(I)/ν(I^±) (ν(J⁻) - ν(J⁺))|`.
pub fn condition_a(b: &Symbol, d: &Symbol) -> Result<Sup> {
    check_depths(b, d)?;
    Ok(condition_a_with(&nu_table(b), d, &b.tree()))
}

/// `sup_I (|I|⁻¹ Σ_{J ⊊ I} ν̃(J)² |p(J) + d_J |J|^{-½}|²)^½`.
pub fn condition_b(b: &Symbol, d: &Symbol) -> Result<Sup> {
    check_depths(b, d)?;
    Ok(condition_b_with(&nu_table(b), d, &b.tree()))
}

/// `sup_{ν(I) > 0} (ν(I)⁻¹ Σ_{J ⊆ I} |q(J)|² / |J|)^½`.
pub fn condition_c(b: &Symbol, d: &Symbol) -> Result<Sup> {
    check_depths(b, d)?;
    Ok(condition_c_with(&nu_table(b), d, &b.tree()))
}

/// `lhs = (Σ_{J ⊆ I} (ν(J⁺) - ν(J⁻))² / |J|)^½` and `rhs = ‖b‖_BMO ν(I)^½`.
pub fn carleson_difference_bound(b: &Symbol, i: DyadicIndex) -> (f64, f64) {
    let nu = nu_table(b);
    let tree = b.tree();
    let lhs = tree
        .subtree(i)
        .map(|j| nu.imbalance(&j).powi(2) / j.len())
        .sum::<f64>()
        .sqrt();
    (lhs, bmo_norm_with(b, &nu) * nu.nu(&i).sqrt())
}

/// `Mf(x) = max |⟨f⟩_I|` over tree intervals `I ∋ x`, levels `0..=depth`.
pub fn dyadic_maximal(f: &GridFunction) -> GridFunction {
    let tree = f.tree();
    let mut out = vec![0.0f64; f.samples.len()];
    for node in tree.nodes() {
        let avg = f.average(&node).norm();
        for c in tree.cells(&node) {
            out[c] = out[c].max(avg);
        }
    }
    real_grid(f.depth, out)
}

/// `SΦ(x) = (Σ_I |Φ_I|² 1_I(x) / |I|)^½` over tree nodes.
pub fn dyadic_square_function(coeffs: &HaarCoefficients) -> GridFunction {
    let tree = coeffs.tree();
    let mut out = vec![0.0f64; tree.resolution()];
    for (node, c) in tree.nodes().zip(&coeffs.values) {
        let w = c.norm_sqr() / node.len();
        for cell in tree.cells(&node) {
            out[cell] += w;
        }
    }
    real_grid(coeffs.depth, out.into_iter().map(f64::sqrt).collect())
}

fn real_grid(depth: u32, values: Vec<f64>) -> GridFunction {
    GridFunction {
        depth,
        samples: values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
    }
}

/// `((SΦ)², (Mc)² (Sb)²)` at every cell, with `Φ_K = b_K ⟨c⟩_K`.
pub fn square_function_domination(b: &Symbol, c: &GridFunction) -> (Vec<f64>, Vec<f64>) {
    let tree = b.tree();
    let phi = HaarCoefficients {
        depth: b.depth(),
        mean: ZERO,
        values: tree.nodes().map(|k| b.get(&k) * c.average(&k)).collect(),
    };
    let sb = HaarCoefficients {
        depth: b.depth(),
        mean: ZERO,
        values: b.values().to_vec(),
    };
    let s_phi = dyadic_square_function(&phi);
    let s_b = dyadic_square_function(&sb);
    let m_c = dyadic_maximal(c);
    let lhs = s_phi.samples.iter().map(|v| v.re * v.re).collect();
    let rhs = m_c
        .samples
        .iter()
        .zip(&s_b.samples)
        .map(|(m, s)| (m.re * s.re).powi(2))
        .collect();
    (lhs, rhs)
}

/// `op_norm / (A + B + C)`, with markers for a vanishing denominator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Ratio {
    Finite(f64),
    /// `A + B + C = 0 < op_norm`.
    Infinite,
    /// `0 / 0`.
    Undefined,
}

impl Ratio {
    pub fn new(op_norm: f64, sum: f64) -> Self {
        if sum > 0.0 {
            Ratio::Finite(op_norm / sum)
        } else if op_norm > 0.0 {
            Ratio::Infinite
        } else {
            Ratio::Undefined
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Ratio::Finite(v) => Some(v),
            _ => None,
        }
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Ratio::Finite(v) => s.serialize_f64(*v),
            Ratio::Infinite => s.serialize_str("inf"),
            Ratio::Undefined => s.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Option::<Raw>::deserialize(d)? {
            None => Ok(Ratio::Undefined),
            Some(Raw::Num(v)) => Ok(Ratio::Finite(v)),
            Some(Raw::Text(t)) if t == "inf" => Ok(Ratio::Infinite),
            Some(Raw::Text(t)) => Err(serde::de::Error::custom(format!("bad ratio {t:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionsReport {
    pub depth: u32,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub bmo_b: f64,
    pub bmo_d: f64,
    pub op_norm: f64,
    pub ratio: Ratio,
    #[serde(rename = "witness_A")]
    pub witness_a: DyadicIndex,
    #[serde(rename = "witness_B")]
    pub witness_b: DyadicIndex,
    #[serde(rename = "witness_C")]
    pub witness_c: DyadicIndex,
    pub seed: Option<u64>,
    pub b_hash: String,
    pub d_hash: String,
    /// Generator description of `b`, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_source: Option<String>,
}

impl ConditionsReport {
    pub fn abc(&self) -> f64 {
        self.a + self.b + self.c
    }
}

pub fn full_report(b: &Symbol, d: &Symbol) -> Result<ConditionsReport> {
    full_report_with(b, d, NormMethod::auto(b.tree().node_count()))
}

pub fn full_report_with(b: &Symbol, d: &Symbol, method: NormMethod) -> Result<ConditionsReport> {
    check_depths(b, d)?;
    let tree = b.tree();
    let nu = nu_table(b);
    let a = condition_a_with(&nu, d, &tree);
    let bb = condition_b_with(&nu, d, &tree);
    let c = condition_c_with(&nu, d, &tree);
    let op_norm = operator_norm(&composition_gram_closed(b, d)?, method)?;
    Ok(ConditionsReport {
        depth: b.depth(),
        a: a.value,
        b: bb.value,
        c: c.value,
        bmo_b: bmo_norm_with(b, &nu),
        bmo_d: bmo_norm_with(d, &nu_table(d)),
        op_norm,
        ratio: Ratio::new(op_norm, a.value + bb.value + c.value),
        witness_a: a.witness,
        witness_b: bb.witness,
        witness_c: c.witness,
        seed: None,
        b_hash: b.content_hash(),
        d_hash: d.content_hash(),
        b_source: None,
        d_source: None,
    })
}
