//! Groups, orbifold groups and generating vectors.

use std::collections::BTreeMap;
use std::sync::Arc;

use pqw_fpgroup::{abelianization, Word};
use proptest::prelude::*;

use pqw_core::fermat::{act, marked_set};
use pqw_core::finite_group::{
    automorphism_from_matrix, make_abelian_group, orbits_and_stabilizers, subgroup_generated, FiniteGroup,
    GroupElement, Homomorphism,
};
use pqw_core::orbifold::{
    invariant_deformation_dim, make_orbifold_group, riemann_hurwitz_genus, validate_generating_vector, BranchData,
    GeneratingVector,
};
use pqw_core::product_quotient::{
    etale_intermediate_cover, kodaira_report, singular_census, subgroup_h, x_family, x_family_with_vector, y_family,
    z4_squared, X_VECTOR,
};
use pqw_core::Error;

/// Every generating vector of type `[0; 4,4,4]` for `Z4^2`, by brute force.
fn all_triangle_vectors(g: &FiniteGroup) -> Vec<[GroupElement; 3]> {
    let og = make_orbifold_group(&BranchData::new(0, vec![4, 4, 4]).unwrap());
    let gref = Arc::new(g.clone());
    let mut out = Vec::new();
    for x in g.elements() {
        for y in g.elements() {
            let z = g.inverse(g.mul(x, y));
            let v = GeneratingVector::new(gref.clone(), vec![x, y, z]);
            if validate_generating_vector(&og, &v).is_ok() {
                out.push([x, y, z]);
            }
        }
    }
    out
}

fn automorphisms(g: &Arc<FiniteGroup>) -> Vec<Homomorphism> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    if let Ok(h) = automorphism_from_matrix(g, &[vec![a, b], vec![c, d]]) {
                        out.push(h);
                    }
                }
            }
        }
    }
    out
}

#[test]
fn triangle_vectors_form_one_automorphism_orbit() {
    let g = z4_squared();
    let vectors = all_triangle_vectors(&g);
    let auts = automorphisms(&g);
    assert_eq!(auts.len(), 96);
    assert_eq!(vectors.len(), 96);
    let canonical: Vec<GroupElement> = X_VECTOR.iter().map(|l| g.element_by_label(l).unwrap()).collect();
    assert!(vectors.iter().any(|v| v[..] == canonical[..]));
    for v in &vectors {
        assert!(auts.iter().any(|a| canonical.iter().map(|&x| a.apply(x)).eq(v.iter().copied())));
        let labels: Vec<&str> = v.iter().map(|&x| g.label(x)).collect();
        assert_eq!(x_family_with_vector(1, &labels).unwrap().factors[0].genus, 3);
    }
}

#[test]
fn y_branch_data_from_the_curve() {
    // H acts on the twelve points of the Fermat quartic with nontrivial
    // Z4^2-stabilizer. Orbits of H give the branch data of C -> C/H.
    let g = z4_squared();
    let h = subgroup_h(&g).unwrap();
    let pts = marked_set(&g).unwrap();
    let orbits = orbits_and_stabilizers(&h.group, pts.len(), |x, p| {
        let q = act(&g, h.embedding[x.0], &pts[p]).unwrap();
        pts.iter().position(|r| *r == q).unwrap()
    })
    .unwrap();
    assert_eq!(orbits.len(), 6);
    let mut stabs: BTreeMap<String, usize> = BTreeMap::new();
    for o in &orbits {
        assert_eq!(o.points.len(), 2);
        let s: Vec<GroupElement> = o.stabilizers[0].iter().copied().filter(|&x| x != h.group.identity()).collect();
        assert_eq!(s.len(), 1);
        *stabs.entry(g.label(h.embedding[s[0].0]).to_string()).or_default() += 1;
    }
    // Points with no Z4^2-stabilizer are permuted freely by H.
    let branch = BranchData::new(0, vec![2; 6]).unwrap();
    assert_eq!(riemann_hurwitz_genus(4, &branch).unwrap(), 3);
    let y = y_family(1).unwrap();
    assert_eq!(y.factors[0].branch, branch);
    let mut from_vector: BTreeMap<String, usize> = BTreeMap::new();
    for l in y.factors[0].vector().labels() {
        *from_vector.entry(l).or_default() += 1;
    }
    let from_vector: BTreeMap<String, usize> =
        from_vector.into_iter().map(|(l, c)| (g.label(h.embedding[h.group.element_by_label(&l).unwrap().0]).to_string(), c)).collect();
    assert_eq!(stabs, from_vector);
    assert_eq!(stabs.values().copied().collect::<Vec<_>>(), vec![2, 2, 2]);
}

#[test]
fn etale_covers() {
    let x = x_family(3).unwrap();
    let g = x.group.clone();
    let h = subgroup_h(&g).unwrap();
    let c = etale_intermediate_cover(&x, &h).unwrap();
    assert_eq!((c.degree, c.unramified), (4, true));
    let y = c.restricted.unwrap();
    assert_eq!(y.group.order(), 4);
    assert_eq!(singular_census(&y).unwrap().singular_points, 4 * singular_census(&x).unwrap().singular_points);

    let diag = subgroup_generated(&g, &[g.element_by_label("(2,2)").unwrap()]).unwrap();
    let c = etale_intermediate_cover(&x, &diag).unwrap();
    assert_eq!(c.degree, 8);
    assert!(!c.unramified);
    assert!(!c.outside.is_empty());
    assert!(c.restricted.is_none());
    assert!(c.note.is_some());
}

#[test]
fn kodaira_summary() {
    for n in 1..=4 {
        for spec in [x_family(n).unwrap(), y_family(n).unwrap()] {
            let census = singular_census(&spec).unwrap();
            let k = kodaira_report(&spec, &census);
            assert!(k.all_genera_at_least_two);
            assert_eq!(k.quasi_etale, n >= 2);
            assert_eq!(k.terminal, n >= 3);
            assert_eq!(k.kappa, (n >= 3).then_some(n));
        }
    }
}

#[test]
fn rejects_bad_vectors() {
    let g = z4_squared();
    let og = make_orbifold_group(&BranchData::new(0, vec![4, 4, 4]).unwrap());
    let v = |ls: &[&str]| GeneratingVector::from_labels(g.clone(), ls).unwrap();
    assert!(matches!(validate_generating_vector(&og, &v(&["(1,0)", "(0,1)"])), Err(Error::VectorLength { .. })));
    assert!(matches!(
        validate_generating_vector(&og, &v(&["(1,0)", "(0,1)", "(1,1)"])),
        Err(Error::LongRelatorFails { .. })
    ));
    assert!(matches!(
        validate_generating_vector(&og, &v(&["(1,0)", "(1,2)", "(2,2)"])),
        Err(Error::BranchOrderFails { k: 3, .. })
    ));
    assert!(matches!(
        validate_generating_vector(&og, &v(&["(1,0)", "(1,0)", "(2,0)"])),
        Err(Error::BranchOrderFails { .. })
    ));
    let og2 = make_orbifold_group(&BranchData::new(0, vec![4, 4, 4, 4]).unwrap());
    assert!(matches!(
        validate_generating_vector(&og2, &v(&["(1,0)", "(3,0)", "(1,0)", "(3,0)"])),
        Err(Error::NotSurjective { generated: 4, order: 16 })
    ));
}

fn arbitrary_abelian() -> impl Strategy<Value = Vec<u64>> {
    proptest::collection::vec(1u64..7, 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn abelian_groups_satisfy_axioms(factors in arbitrary_abelian(), picks in proptest::collection::vec(0usize..1000, 3)) {
        let g = make_abelian_group(&factors).unwrap();
        let [a, b, c] = [0, 1, 2].map(|i| GroupElement(picks[i] % g.order()));
        prop_assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
        prop_assert_eq!(g.mul(a, g.inverse(a)), g.identity());
        prop_assert_eq!(g.mul(a, b), g.mul(b, a));
        prop_assert_eq!(g.pow(a, g.element_order(a) as i64), g.identity());
        prop_assert_eq!(g.element_by_label(g.label(a)).unwrap(), a);
    }

    #[test]
    fn automorphisms_compose_and_invert(i in 0usize..96, j in 0usize..96) {
        let g = z4_squared();
        let auts = automorphisms(&g);
        let (a, b) = (&auts[i], &auts[j]);
        let id = Homomorphism::identity(g.clone());
        prop_assert!(a.is_bijective());
        prop_assert_eq!(a.compose(&a.inverse().unwrap()).unwrap(), id.clone());
        prop_assert_eq!(a.inverse().unwrap().compose(a).unwrap(), id.clone());
        prop_assert_eq!(a.compose(&id).unwrap(), a.clone());
        let ab = a.compose(b).unwrap();
        for x in g.elements() {
            prop_assert_eq!(ab.apply(x), a.apply(b.apply(x)));
        }
    }

    #[test]
    fn orbit_stabilizer(factors in arbitrary_abelian(), gen in 0usize..1000) {
        // Translation action on the quotient by a cyclic subgroup.
        let g = make_abelian_group(&factors).unwrap();
        let s = subgroup_generated(&g, &[GroupElement(gen % g.order())]).unwrap();
        let reps: Vec<GroupElement> = {
            let mut seen = vec![usize::MAX; g.order()];
            let mut reps = Vec::new();
            for x in g.elements() {
                if seen[x.0] == usize::MAX {
                    for &h in &s.elements {
                        seen[g.mul(x, h).0] = reps.len();
                    }
                    reps.push(x);
                }
            }
            reps
        };
        let class = |x: GroupElement| reps.iter().position(|&r| s.contains(g.mul(g.inverse(r), x))).unwrap();
        let orbits = orbits_and_stabilizers(&g, reps.len(), |x, p| class(g.mul(x, reps[p]))).unwrap();
        prop_assert_eq!(orbits.len(), 1);
        for st in &orbits[0].stabilizers {
            prop_assert_eq!(st.len() * orbits[0].points.len(), g.order());
            prop_assert_eq!(st, &s.elements);
        }
    }

    #[test]
    fn rigid_triangles(m in 2u32..17) {
        prop_assert_eq!(invariant_deformation_dim(&BranchData::new(0, vec![m, m, m]).unwrap()).unwrap(), 0);
        prop_assert_eq!(invariant_deformation_dim(&BranchData::new(0, vec![m; 4]).unwrap()).unwrap(), 1);
    }

    #[test]
    fn genus_grows_with_branching(mut idx in proptest::collection::vec(prop_oneof![Just(2u32), Just(3), Just(4), Just(6)], 3..7), extra in prop_oneof![Just(2u32), Just(3), Just(4), Just(6)]) {
        let n = 12;
        let before = BranchData::new(0, idx.clone()).unwrap();
        idx.push(extra);
        let after = BranchData::new(0, idx).unwrap();
        if let (Ok(a), Ok(b)) = (riemann_hurwitz_genus(n, &before), riemann_hurwitz_genus(n, &after)) {
            prop_assert!(b > a);
        }
    }

    #[test]
    fn orbifold_abelianization_divides(idx in proptest::collection::vec(2u32..9, 3..6)) {
        let og = make_orbifold_group(&BranchData::new(0, idx.clone()).unwrap());
        let ab = abelianization(&og.presentation);
        prop_assert_eq!(ab.free_rank, 0);
        let order: u64 = ab.torsion_u64().iter().product();
        let product: u64 = idx.iter().map(|&m| m as u64).product();
        prop_assert_eq!(product % order, 0);
    }

    #[test]
    fn evaluator_kills_relators(i in 0usize..96, w in proptest::collection::vec(prop_oneof![-3i32..0, 1i32..4], 0..12)) {
        let g = z4_squared();
        let v = all_triangle_vectors(&g)[i];
        let og = make_orbifold_group(&BranchData::new(0, vec![4, 4, 4]).unwrap());
        let epi = validate_generating_vector(&og, &GeneratingVector::new(g.clone(), v.to_vec())).unwrap();
        for r in og.presentation.relators() {
            prop_assert_eq!(epi.evaluate(r), g.identity());
        }
        let w = Word::new(w);
        prop_assert_eq!(epi.evaluate(&w.mul(&w.inverse())), g.identity());
        prop_assert_eq!(epi.evaluate(&w.inverse()), g.inverse(epi.evaluate(&w)));
    }
}
