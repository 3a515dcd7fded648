use num_complex::Complex64;
use proptest::prelude::*;

use paraprod::conditions::full_report;
use paraprod::dyadic::{delta, DyadicIndex, GridFunction, HaarCoefficients};
use paraprod::halfplane::{apply_u, apply_u_adjoint, t_gram_closed, TileCoefficients};
use paraprod::paraproducts::{composition_gram_closed, composition_gram_direct, operator_norm, NormMethod};
use paraprod::symbols::{nu_table, scale, Distribution, Symbol, SymbolKind, SymbolSpec};
use paraprod::Tree;

fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

fn symbol(max_depth: u32) -> impl Strategy<Value = Symbol> {
    (0..=max_depth).prop_flat_map(|depth| {
        let n = Tree::new(depth).node_count();
        prop::collection::vec(complex(), n)
            .prop_map(move |v| Symbol::from_values(depth, v).unwrap())
    })
}

fn pair(max_depth: u32) -> impl Strategy<Value = (Symbol, Symbol)> {
    (0..=max_depth).prop_flat_map(|depth| {
        let n = Tree::new(depth).node_count();
        (prop::collection::vec(complex(), n), prop::collection::vec(complex(), n)).prop_map(
            move |(a, b)| {
                (
                    Symbol::from_values(depth, a).unwrap(),
                    Symbol::from_values(depth, b).unwrap(),
                )
            },
        )
    })
}

fn node(max_level: u32) -> impl Strategy<Value = DyadicIndex> {
    (0..=max_level).prop_flat_map(|l| (0..(1u64 << l)).prop_map(move |p| DyadicIndex::new(l, p)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nu_is_inclusive_subtree_mass(b in symbol(5)) {
        let nu = nu_table(&b);
        let tree = b.tree();
        for i in tree.nodes() {
            let want: f64 = tree.subtree(i).map(|j| b.get(&j).norm_sqr()).sum();
            prop_assert!((nu.nu(&i) - want).abs() <= 1e-12 * want.max(1.0));
            let t = nu.nu_tilde(&i);
            prop_assert!(t >= 0.0 && t * t <= nu.nu(&i) / 2.0 + 1e-12);
        }
    }

    #[test]
    fn haar_round_trip(b in symbol(5)) {
        let f = GridFunction::from_samples(
            b.depth().saturating_sub(1),
            b.values()[..Tree::new(b.depth().saturating_sub(1)).resolution().min(b.values().len())].to_vec(),
        );
        if let Ok(f) = f {
            let back = HaarCoefficients::analyze(&f).synthesize();
            prop_assert!(back.max_abs_diff(&f) <= 1e-12);
        }
    }

    #[test]
    fn delta_sign_matches_half(outer in node(5), inner in node(7)) {
        match delta(&outer, &inner) {
            Ok(s) => {
                prop_assert!(outer.is_disjoint(&inner) && s == 0 || outer.strictly_contains(&inner));
                if let Some(h) = outer.half_containing(&inner) {
                    prop_assert_eq!(s as f64, h.sign());
                }
            }
            Err(_) => prop_assert!(inner.contains(&outer)),
        }
    }

    #[test]
    fn closed_gram_matches_grid_oracle((b, d) in pair(4)) {
        let c = composition_gram_closed(&b, &d).unwrap();
        let g = composition_gram_direct(&b, &d).unwrap();
        prop_assert!(g.normalized_diff(&c) <= 1e-10);
        let t = t_gram_closed(&b, &d).unwrap();
        prop_assert!(t.max_abs_diff(&c.scaled(Complex64::new(2.0, 0.0))) <= 1e-12 * t.max_abs().max(1.0));
    }

    #[test]
    fn norm_between_column_and_frobenius_bounds((b, d) in pair(4)) {
        let m = composition_gram_closed(&b, &d).unwrap();
        let norm = operator_norm(&m, NormMethod::DenseSvd).unwrap();
        let frob = m.as_slice().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let col = (0..m.dim())
            .map(|c| m.column(c).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        prop_assert!(norm <= frob * (1.0 + 1e-12) + 1e-300);
        prop_assert!(norm >= col * (1.0 - 1e-12));
    }

    #[test]
    fn conditions_are_homogeneous((b, d) in pair(4), lam in complex()) {
        prop_assume!(lam.norm() > 0.1);
        let base = full_report(&b, &d).unwrap();
        let r = full_report(&scale(&b, lam), &scale(&d, lam)).unwrap();
        let m = lam.norm_sqr();
        for (x, y) in [(r.a, base.a), (r.b, base.b), (r.c, base.c), (r.op_norm, base.op_norm)] {
            prop_assert!(x >= 0.0);
            prop_assert!((x - m * y).abs() <= 1e-9 * x.max(m * y).max(1e-12));
        }
    }

    #[test]
    fn u_adjoint_identity((b, d) in pair(5)) {
        let f = TileCoefficients::from_fn(b.depth(), |n| b.get(&n));
        let g = TileCoefficients::from_fn(d.depth(), |n| d.get(&n));
        let lhs = apply_u(&f).inner(&g);
        let rhs = f.inner(&apply_u_adjoint(&g));
        prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn symbol_file_round_trip(b in symbol(5)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        b.save(&path).unwrap();
        let back = Symbol::load(&path).unwrap();
        prop_assert_eq!(back.content_hash(), b.content_hash());
        prop_assert_eq!(back, b);
    }

    #[test]
    fn spec_display_round_trip(seed in any::<u64>(), gamma in 0.0..2.0f64, dist in 0..3usize) {
        let distribution = [Distribution::ComplexNormal, Distribution::RealNormal, Distribution::Uniform][dist];
        let spec = SymbolSpec::Generated(SymbolKind::Random { seed, gamma, distribution });
        prop_assert_eq!(SymbolSpec::parse(&spec.to_string(), 0).unwrap(), spec);
    }
}
