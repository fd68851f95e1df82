use std::sync::Arc;

use etale_kit::algebra::{left_regular, reduced_norm, AlgebraElement};
use etale_kit::cocycle::{enumerate_cocycles, Cocycle};
use etale_kit::groupoid::{validate, FiniteGroupoid, UnitSet};
use etale_kit::hom::enumerate_automorphisms;
use etale_kit::io::GroupoidDocument;
use etale_kit::phase::Phase;
use etale_kit::selftest::corpus;
use etale_kit::semigroup::enumerate_bisections;
use num_complex::Complex64;
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn groupoids() -> Vec<Arc<FiniteGroupoid>> {
    corpus(16).into_iter().map(|e| e.groupoid).collect()
}

fn any_groupoid() -> impl Strategy<Value = Arc<FiniteGroupoid>> {
    let all = groupoids();
    (0..all.len()).prop_map(move |i| all[i].clone())
}

/// A groupoid with two elements on it.
fn groupoid_and_elements(
) -> impl Strategy<Value = (Arc<FiniteGroupoid>, AlgebraElement, AlgebraElement, AlgebraElement)> {
    any_groupoid()
        .prop_flat_map(|g| {
            let n = g.arrow_count();
            let coeffs = prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n);
            (Just(g), coeffs.clone(), coeffs.clone(), coeffs)
        })
        .prop_map(|(g, a, b, c)| {
            let el = |v: Vec<(f64, f64)>| {
                AlgebraElement::new(g.clone(), v.into_iter().map(|(x, y)| Complex64::new(x, y)).collect()).unwrap()
            };
            (g.clone(), el(a), el(b), el(c))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialization_round_trips(g in any_groupoid()) {
        let text = GroupoidDocument::from_groupoid(&g, None).to_json();
        let back = GroupoidDocument::parse(&text).unwrap();
        prop_assert_eq!(back.groupoid().unwrap(), (*g).clone());
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn corpus_tables_validate(g in any_groupoid()) {
        prop_assert!(validate(&g.to_tables()).unwrap().passed());
    }

    #[test]
    fn invariant_sets_form_a_lattice(g in any_groupoid()) {
        let sets = g.invariant_subsets(16).unwrap();
        prop_assert!(sets.iter().any(|s| s.is_empty()));
        prop_assert!(sets.contains(&UnitSet::all(&g)));
        for a in &sets {
            prop_assert!(g.is_invariant(a));
            for b in &sets {
                prop_assert!(sets.contains(&a.union(b)));
                prop_assert!(sets.contains(&a.intersection(b)));
            }
        }
    }

    #[test]
    fn restriction_is_a_full_subgroupoid(g in any_groupoid(), pick in any::<prop::sample::Index>()) {
        let sets = g.invariant_subsets(16).unwrap();
        let f = pick.get(&sets);
        let r = g.restrict(f).unwrap();
        prop_assert!(validate(&r.groupoid.to_tables()).unwrap().passed());
        for (i, &a) in r.embedding.iter().enumerate() {
            prop_assert!(f.contains(g.src(a)));
            prop_assert_eq!(r.index_of(a), Some(i));
            for (j, &b) in r.embedding.iter().enumerate() {
                prop_assert_eq!(r.groupoid.compose(i, j).map(|k| r.embedding[k]), g.compose(a, b));
            }
        }
        let inside = g.arrows().filter(|&a| f.contains(g.src(a))).count();
        prop_assert_eq!(inside, r.embedding.len());
    }

    #[test]
    fn quotient_is_effective(g in any_groupoid()) {
        let q = g.quotient_by_iso_interior();
        prop_assert!(q.groupoid.is_effective());
        for a in g.arrows() {
            let b = q.map.apply(a);
            prop_assert_eq!(q.groupoid.src(b), q.map.apply(g.src(a)));
            prop_assert_eq!(q.groupoid.rng(b), q.map.apply(g.rng(a)));
        }
    }

    #[test]
    fn convolution_laws((_g, a, b, c) in groupoid_and_elements()) {
        let ab_c = a.convolve(&b).unwrap().convolve(&c).unwrap();
        let a_bc = a.convolve(&b.convolve(&c).unwrap()).unwrap();
        prop_assert!(ab_c.max_abs_diff(&a_bc) < TOL);
        let star_ab = a.convolve(&b).unwrap().star();
        let bs_as = b.star().convolve(&a.star()).unwrap();
        prop_assert!(star_ab.max_abs_diff(&bs_as) < TOL);
        prop_assert!(a.star().star().max_abs_diff(&a) == 0.0);
    }

    #[test]
    fn norm_is_submultiplicative_and_a_cstar_norm((g, a, b, _c) in groupoid_and_elements()) {
        let (na, nb) = (reduced_norm(&a), reduced_norm(&b));
        prop_assert!(reduced_norm(&a.convolve(&b).unwrap()) <= na * nb + TOL);
        prop_assert!(reduced_norm(&a.add(&b).unwrap()) <= na + nb + TOL);
        prop_assert!((reduced_norm(&a.star()) - na).abs() < TOL);
        prop_assert!(a.sup_norm() <= na + TOL && na <= a.l2_norm() * g.arrow_count() as f64 + TOL);
        let aa = a.star().convolve(&a).unwrap();
        prop_assert!((reduced_norm(&aa) - na * na).abs() < TOL);
    }

    #[test]
    fn regular_representation_is_a_star_hom((g, a, b, _c) in groupoid_and_elements()) {
        for &x in g.units() {
            let lam = left_regular(&g, x).unwrap();
            let prod = lam.rep(&a.convolve(&b).unwrap()) - lam.rep(&a) * lam.rep(&b);
            prop_assert!(prod.iter().all(|z| z.norm() < 1e-12));
            let adj = lam.rep(&a.star()) - lam.rep(&a).adjoint();
            prop_assert!(adj.iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn bisections_form_an_inverse_semigroup(g in any_groupoid()) {
        let bis = enumerate_bisections(&g, 16).unwrap();
        prop_assert!(bis.semigroup().check().is_ok());
        for u in bis.bisections() {
            let back = u.product(&u.inverse()).unwrap().product(u).unwrap();
            prop_assert_eq!(back.arrows(), u.arrows());
        }
    }

    #[test]
    fn cocycles_are_closed_under_products_and_automorphisms(g in any_groupoid()) {
        let cocycles = enumerate_cocycles(&g, 2, 16).unwrap();
        let auts = enumerate_automorphisms(&g, 16).unwrap();
        for c in cocycles.iter().take(8) {
            for d in cocycles.iter().take(8) {
                let cd = c.mul(d);
                prop_assert!(cocycles.iter().any(|e| e.approx_eq(&cd, TOL)));
            }
            prop_assert!(c.mul(&c.inverse()).is_trivial());
            for phi in auts.iter().take(8) {
                let pulled = c.pullback(phi);
                prop_assert!(Cocycle::new(g.clone(), pulled.values().to_vec()).is_ok());
                prop_assert!(pulled.pushforward(phi).approx_eq(c, TOL));
            }
        }
    }

    #[test]
    fn phases_multiply_like_complex_numbers(k1 in 0u64..48, n1 in 1u32..25, k2 in 0u64..48, n2 in 1u32..25) {
        let (p, q) = (Phase::root_of_unity(k1, n1).unwrap(), Phase::root_of_unity(k2, n2).unwrap());
        let z = p.to_complex() * q.to_complex();
        prop_assert!(((p * q).to_complex() - z).norm() < TOL);
        prop_assert!((p * p.conj()).is_one());
        prop_assert_eq!(Phase::snap(p.to_complex()).unwrap(), p);
    }
}
