use std::collections::BTreeSet;

use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::diagram::{tripod, Diagram};
use crate::enumerate::{cached, Shape, SizeFilter};
use crate::linalg::{frac, LinComb, Q};
use crate::spaces::{forest_module, Mode};

fn chord(legs: &[u16], a: (usize, usize), b: (usize, usize)) -> Diagram {
    Diagram::chords(legs, &[(a, b)]).unwrap()
}

#[test]
fn single_tree_graph_has_no_edges() {
    let t = tripod(&[2, 1], [(0, 0), (0, 1), (1, 0)]).unwrap();
    let g = LabelledGraph::new(vec![t], 100).unwrap();
    assert_eq!(g.vertex_count(), 1);
    assert_eq!(g.permutograph().edge_count(), 0);
}

#[test]
fn two_knot_chords_give_six_vertices() {
    let c = chord(&[2], (0, 0), (0, 1));
    let g = LabelledGraph::new(vec![c.clone(), c], 100).unwrap();
    assert_eq!(g.vertex_count(), 6);
    g.verify_isomorphism().unwrap();
    assert_eq!(g.unlabelled_vertices().len(), 3);
}

#[test]
fn labelled_graphs_match_box_products() {
    for f in cached(2, 3, Shape::Forest, SizeFilter::AtMost(3)).unwrap().iter() {
        let lf = LabelledForest::from_forest(f).unwrap();
        let g = LabelledGraph::new(lf.trees().to_vec(), 10_000).unwrap();
        g.verify_isomorphism().unwrap();
        assert!(g.w(&lf).is_some());
    }
}

#[test]
fn edge_vector_of_two_knot_chords_is_a_tripod() {
    let c = chord(&[2], (0, 0), (0, 1));
    let f = LabelledForest::stacked(&[c.clone(), c], &[0, 1]).unwrap();
    let v = edge_vector(&f, Move::new(0, 1)).unwrap();
    assert_eq!(v.len(), 1);
    let (y, x) = v.iter().next().unwrap();
    assert!(x.is_one());
    assert!(y.is_tree() && y.degree() == 2 && y.leaf_count() == 3);
}

#[test]
fn reversed_edges_cancel() {
    let space = forest_module(2, 2, 1, Mode::Framed).unwrap();
    for f in cached(2, 2, Shape::Forest, SizeFilter::Exact(2)).unwrap().iter() {
        for mv in LabelledForest::from_forest(f).unwrap().sites() {
            let g = slide_unlabelled(f, mv).unwrap();
            let there = slide_edge_vector(f, mv).unwrap();
            let back = slide_edge_vector(&g, mv).unwrap();
            assert!(space.is_zero(&(there + back)).unwrap());
        }
    }
    let c = chord(&[2], (0, 0), (0, 1));
    assert!(slide_unlabelled(&Diagram::stack(&c, &c).unwrap(), Move::new(0, 0)).is_err());
}

#[test]
fn vector_between_is_additive() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for f in cached(2, 3, Shape::Forest, SizeFilter::Exact(2)).unwrap().iter().take(30) {
        let lf = LabelledForest::from_forest(f).unwrap();
        let g = LabelledGraph::new(lf.trees().to_vec(), 10_000).unwrap();
        let pick = |rng: &mut ChaCha8Rng| g.vertex(rng.gen_range(0..g.vertex_count())).diagram();
        let (f1, f2) = (pick(&mut rng), pick(&mut rng));
        assert!(vector_between_coords(f, f, Mode::FI).unwrap().is_empty());
        let a: LinComb<usize> = vector_between_coords(f, &f1, Mode::FI).unwrap().into_iter().collect();
        let b: LinComb<usize> = vector_between_coords(&f1, &f2, Mode::FI).unwrap().into_iter().collect();
        let c: LinComb<usize> = vector_between_coords(f, &f2, Mode::FI).unwrap().into_iter().collect();
        assert_eq!(a + b, c);
    }
}

#[test]
fn lifting_projects_back() {
    let f = cached(2, 3, Shape::Forest, SizeFilter::Exact(3)).unwrap()[5].clone();
    let lf = LabelledForest::from_forest(&f).unwrap();
    let first = lf.sites()[0];
    let second = lf.slide(first).unwrap().sites()[0];
    let p = UnlabelledPath {
        start: f.clone(),
        moves: vec![first, second],
    };
    let lifted = lift_path(&p, &lf).unwrap();
    assert_eq!(lifted.project().unwrap(), p);
    assert_eq!(lifted.edge_vectors().unwrap(), p.edge_vectors().unwrap());
    let other = LabelledForest::from_forest(&Diagram::empty(2)).unwrap();
    assert!(lift_path(&p, &other).is_err());
}

#[test]
fn lifted_cycles_close_after_the_label_order() {
    let c = chord(&[2], (0, 0), (0, 1));
    let low = LabelledForest::new(vec![c.clone(), c.clone()], vec![vec![0, 0, 1, 1]]).unwrap();
    let high = LabelledForest::new(vec![c.clone(), c], vec![vec![1, 1, 0, 0]]).unwrap();
    let p = bubble_path(&low, &high).unwrap().project().unwrap();
    let vs = p.vertices().unwrap();
    assert_eq!(vs.first(), vs.last());
    let end = lift_path(&p, &low).unwrap().end().unwrap();
    assert_ne!(end, low);
    let perm = low.relabelling_to(&end).unwrap();
    let (n, closed) = lift_closure(&p, &low).unwrap();
    assert_eq!(n, permutation_order(&perm));
    assert_eq!(n, 2);
    assert_eq!(closed.end().unwrap(), low);
}

#[test]
fn barycenters() {
    let t = chord(&[1, 1], (0, 0), (1, 0));
    let u = chord(&[2, 0], (0, 0), (0, 1));
    let single = avg_barycenter(&t).unwrap();
    assert_eq!(single.combination(), LinComb::unit(t.clone()));
    let tu = Diagram::stack(&t, &u).unwrap();
    let ut = Diagram::stack(&u, &t).unwrap();
    let pair = avg_barycenter(&tu).unwrap();
    let expected = LinComb::from_terms([(tu.clone(), frac(1, 2)), (ut.clone(), frac(1, 2))]);
    assert_eq!(pair.combination(), expected);
    assert_eq!(stacked(&tu, &[0, 1]).unwrap(), ut);
    for f in cached(2, 3, Shape::Forest, SizeFilter::Exact(2)).unwrap().iter().take(20) {
        let lf = LabelledForest::from_forest(f).unwrap();
        let g = LabelledGraph::new(lf.trees().to_vec(), 10_000).unwrap();
        let other = g.vertex(g.vertex_count() - 1).diagram();
        assert_eq!(avg_barycenter(f).unwrap().combination(), avg_barycenter(&other).unwrap().combination());
    }
    assert!(Barycenter::new(vec![(frac(1, 2), LabelledForest::from_forest(&t).unwrap())]).is_err());
}

#[test]
fn iota_of_a_knot_tripod() {
    let t = tripod(&[3], [(0, 0), (0, 1), (0, 2)]).unwrap();
    let v = iota(&t).unwrap();
    assert_eq!(v.len(), 2);
    assert!(v.keys().all(|d| d.is_chord_diagram() && d.size() == 2));
    assert_eq!(v.coefficient_sum(), Q::from_integer(0.into()));
    let c = chord(&[2], (0, 0), (0, 1));
    assert!(iota(&c).is_err());
}

#[test]
fn iota_is_independent_of_the_node() {
    for (m, n) in [(1, 3), (2, 3)] {
        for s in 1..n {
            let space = forest_module(m, n, s + 1, Mode::Framed).unwrap();
            for f in cached(m, n, Shape::Forest, SizeFilter::Exact(s)).unwrap().iter() {
                let legs = f.breakable_legs();
                let first = iota_at(f, legs[0]).unwrap();
                for &leaf in &legs[1..] {
                    let other = iota_at(f, leaf).unwrap();
                    assert!(space.is_zero(&(first.clone() - other)).unwrap());
                }
            }
        }
    }
}

#[test]
fn pi_tilde_needs_two_trees() {
    let t = tripod(&[3], [(0, 0), (0, 1), (0, 2)]).unwrap();
    assert!(pi_tilde(&t).is_err());
}

#[test]
fn pi_tilde_on_a_three_chord_forest() {
    let f = Diagram::parse("3; strand 0: [0]; strand 1: [1,2,3]; strand 2: [4,5]; chord (0,4); chord (1,3); chord (2,5)")
        .unwrap();
    let v = pi_tilde(&f).unwrap();
    assert_eq!(v.len(), 3);
    assert!(v.iter().all(|(d, x)| x.abs() == frac(1, 2) && d.size() == 2));
    let classes: BTreeSet<Diagram> = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
        .iter()
        .map(|s| stacked(&f, s).unwrap())
        .collect();
    assert_eq!(classes.len(), 4);
    assert!(!classes.contains(&f));
}

#[test]
fn diagrammatic_stu_small() {
    for (m, n) in [(1, 3), (2, 2)] {
        for s in 2..=n {
            let space = forest_module(m, n, s - 1, Mode::FI).unwrap();
            for f in cached(m, n, Shape::Forest, SizeFilter::Exact(s)).unwrap().iter() {
                let lf = LabelledForest::from_forest(f).unwrap();
                for mv in lf.sites() {
                    let g = slide_unlabelled(f, mv).unwrap();
                    let lhs = pi_tilde(&g).unwrap() - pi_tilde(f).unwrap();
                    let rhs = slide_edge_vector(f, mv).unwrap();
                    assert!(space.is_zero(&(lhs - rhs)).unwrap(), "{f} at {mv:?}");
                }
            }
        }
    }
}

#[test]
fn random_paths_agree_in_the_quotient() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let forests = cached(2, 3, Shape::Forest, SizeFilter::Exact(2)).unwrap();
    let space = forest_module(2, 3, 1, Mode::Framed).unwrap();
    for _ in 0..20 {
        let f = &forests[rng.gen_range(0..forests.len())];
        let lf = LabelledForest::from_forest(f).unwrap();
        let g = LabelledGraph::new(lf.trees().to_vec(), 10_000).unwrap();
        let target = g.vertex(rng.gen_range(0..g.vertex_count()));
        let walk = |rng: &mut ChaCha8Rng| {
            let mut cur = lf.clone();
            let mut mvs = Vec::new();
            for _ in 0..rng.gen_range(0..8) {
                let sites = cur.sites();
                if sites.is_empty() {
                    break;
                }
                let mv = sites[rng.gen_range(0..sites.len())];
                cur = cur.slide(mv).unwrap();
                mvs.push(mv);
            }
            let tail = bubble_path(&cur, &target).unwrap();
            Path {
                start: lf.clone(),
                moves: mvs,
            }
            .then(&tail)
            .unwrap()
        };
        let (a, b) = (walk(&mut rng), walk(&mut rng));
        assert_eq!(a.end().unwrap(), b.end().unwrap());
        assert!(space.is_zero(&(a.vector().unwrap() - b.vector().unwrap())).unwrap());
    }
}
