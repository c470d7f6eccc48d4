use std::collections::BTreeSet;

use jacobi_core::enumerate::cached;
use jacobi_core::forest::{vector_between_coords, LabelledForest, LabelledGraph};
use jacobi_core::hopf::{comult, comult_factor, flip};
use jacobi_core::linalg::q;
use jacobi_core::relations::{antisymmetry, ihx, stu2};
use jacobi_core::{forest_module, Diagram, EnumSpec, LinComb, Mode, Shape, SizeFilter};
use proptest::prelude::*;
use proptest::sample::Index;

fn pool(m: usize, n: usize, shape: Shape) -> Vec<Diagram> {
    cached(m, n, shape, SizeFilter::Any).unwrap().to_vec()
}

fn any_diagram() -> impl Strategy<Value = Diagram> {
    (1usize..=2, 1usize..=3, any::<Index>()).prop_map(|(m, n, i)| {
        let p = pool(m, n, Shape::All);
        p[i.index(p.len())].clone()
    })
}

/// Renumber and rotate nodes, then rebuild.
fn scramble(d: &Diagram, perm: &[usize], rot: &[usize]) -> Diagram {
    let l = d.leaf_count();
    let map = |h: usize| -> usize {
        if h < l {
            h
        } else {
            let k = (h - l) / 3;
            l + 3 * perm[k] + ((h - l) % 3 + rot[k]) % 3
        }
    };
    let mut pairing = vec![0u16; d.half_edge_count()];
    for h in 0..d.half_edge_count() {
        pairing[map(h)] = map(d.partner(h)) as u16;
    }
    Diagram::from_parts(d.legs_per_strand().to_vec(), d.node_count() as u16, pairing).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn canonical_form_ignores_node_labels(d in any_diagram(), seed in any::<u64>()) {
        let n = d.node_count();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let rot: Vec<usize> = (0..n).map(|k| (seed >> (2 * (k % 30))) as usize % 3).collect();
        prop_assert_eq!(scramble(&d, &perm, &rot), d);
    }

    #[test]
    fn text_and_json_round_trip(d in any_diagram()) {
        prop_assert_eq!(Diagram::parse(&d.to_string()).unwrap(), d.clone());
        prop_assert_eq!(Diagram::from_json(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn stacking_is_associative_with_unit(a in any_diagram(), b in any_diagram(), c in any_diagram()) {
        prop_assume!(a.strand_count() == b.strand_count() && b.strand_count() == c.strand_count());
        let ab_c = Diagram::stack(&Diagram::stack(&a, &b).unwrap(), &c).unwrap();
        let a_bc = Diagram::stack(&a, &Diagram::stack(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        let e = Diagram::empty(a.strand_count());
        prop_assert_eq!(Diagram::stack(&e, &a).unwrap(), a.clone());
        prop_assert_eq!(Diagram::stack(&a, &e).unwrap(), a);
    }

    #[test]
    fn coproduct_is_counital_coassociative_cocommutative(d in any_diagram()) {
        let t = comult(&d);
        let e = Diagram::empty(d.strand_count());
        prop_assert!(t.get(&vec![e.clone(), d.clone()]) == q(1));
        prop_assert!(t.get(&vec![d.clone(), e]) == q(1));
        prop_assert_eq!(t.coefficient_sum(), q(1 << d.size()));
        prop_assert_eq!(comult_factor(&t, 0), comult_factor(&t, 1));
        prop_assert_eq!(flip(&t), t);
    }

    #[test]
    fn swapping_legs_is_an_involution(d in any_diagram(), i in any::<Index>()) {
        let legs = d.legs_per_strand().to_vec();
        let sites: Vec<(usize, usize)> = legs.iter().enumerate()
            .flat_map(|(j, &c)| (0..(c as usize).saturating_sub(1)).map(move |p| (j, p)))
            .collect();
        prop_assume!(!sites.is_empty());
        let (j, p) = sites[i.index(sites.len())];
        prop_assert_eq!(d.swap_legs(j, p).swap_legs(j, p), d);
    }

    #[test]
    fn breaking_then_joining_restores(m in 1usize..=2, n in 2usize..=3, i in any::<Index>(), k in any::<Index>()) {
        let forests: Vec<Diagram> = pool(m, n, Shape::Forest).into_iter().filter(|f| f.node_count() > 0).collect();
        let f = &forests[i.index(forests.len())];
        let legs = f.breakable_legs();
        let leaf = legs[k.index(legs.len())];
        let (eq, cross) = f.break_leg(leaf).unwrap();
        prop_assert_eq!(eq.size(), f.size() + 1);
        prop_assert_eq!(cross.size(), f.size() + 1);
        let (j, p) = f.leaf_position(leaf);
        prop_assert_eq!(eq.join_legs(j, p).unwrap(), f.clone());
        prop_assert_eq!(cross.swap_legs(j, p), eq);
    }

    #[test]
    fn path_vectors_are_additive(i in any::<Index>(), a in any::<Index>(), b in any::<Index>()) {
        let forests = cached(2, 3, Shape::Forest, SizeFilter::Exact(3)).unwrap();
        let f = &forests[i.index(forests.len())];
        let lf = LabelledForest::from_forest(f).unwrap();
        let g = LabelledGraph::new(lf.trees().to_vec(), 10_000).unwrap();
        let f1 = g.vertex(a.index(g.vertex_count())).diagram();
        let f2 = g.vertex(b.index(g.vertex_count())).diagram();
        let v = |x: &Diagram, y: &Diagram| -> LinComb<usize> {
            vector_between_coords(x, y, Mode::Framed).unwrap().into_iter().collect()
        };
        prop_assert_eq!(v(f, &f1) + v(&f1, &f2), v(f, &f2));
        prop_assert!((v(f, &f1) + v(&f1, f)).is_zero());
    }
}

#[test]
fn enumeration_is_deterministic_and_filters_nest() {
    for (m, n) in [(1, 3), (2, 2), (2, 3)] {
        let spec = |shape| EnumSpec::new(m, n, shape);
        let once = jacobi_core::enumerate_diagrams(&spec(Shape::All)).unwrap();
        assert_eq!(once, jacobi_core::enumerate_diagrams(&spec(Shape::All)).unwrap());
        let set = |shape| -> BTreeSet<Diagram> {
            jacobi_core::enumerate_diagrams(&spec(shape)).unwrap().into_iter().collect()
        };
        let (trees, forests, all) = (set(Shape::Tree), set(Shape::Forest), set(Shape::All));
        assert!(trees.is_subset(&forests) && forests.is_subset(&all));
        assert!(set(Shape::Chord).is_subset(&forests));
    }
}

#[test]
fn relations_vanish_in_forest_modules() {
    for (m, n, s) in [(1, 3, 1), (1, 3, 2), (2, 3, 1), (2, 3, 2), (2, 4, 2)] {
        let space = forest_module(m, n, s, Mode::FI).unwrap();
        let forests = cached(m, n, Shape::Forest, SizeFilter::Exact(s)).unwrap();
        for v in antisymmetry(&forests).iter().chain(ihx(&forests).iter()).chain(stu2(m, n, s).unwrap().iter()) {
            assert!(space.is_zero(v).unwrap());
        }
        for i in 0..space.dim() {
            let c = space.coords_sparse(&LinComb::unit(space.representative(i).clone())).unwrap();
            assert_eq!(c.len(), 1);
            assert_eq!(c[&i], q(1));
        }
    }
}
