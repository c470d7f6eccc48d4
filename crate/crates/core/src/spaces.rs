//! Memoised quotient spaces: the chord algebra, the forest modules and the
//! size filtration inside the chord algebra.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::diagram::Diagram;
use crate::enumerate::{cached, Shape, SizeFilter};
use crate::error::{Error, Result};
use crate::linalg::{Basis, LinComb, QuotientSpace, RationalVector, Span, Q};
use crate::relations::{antisymmetry, four_t, hexagons, ihx, one_t, stu2};

/// Whether isolated chords are killed (1T).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    Framed,
    FI,
}

impl Mode {
    pub fn one_t(self) -> bool {
        self == Mode::FI
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Framed => "framed",
            Mode::FI => "fi",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s.to_ascii_lowercase().as_str() {
            "fi" => Ok(Mode::FI),
            "framed" => Ok(Mode::Framed),
            _ => Err(Error::InvalidSpec(format!("unknown mode {s}"))),
        }
    }
}

pub type Space = Arc<QuotientSpace<Diagram>>;

type Memo<K, V> = OnceLock<Mutex<HashMap<K, V>>>;

fn memo<K, V, F>(cell: &'static Memo<K, V>, key: K, build: F) -> Result<V>
where
    K: std::hash::Hash + Eq + Clone,
    V: Clone,
    F: FnOnce() -> Result<V>,
{
    let map = cell.get_or_init(Default::default);
    if let Some(v) = map.lock().expect("memo lock").get(&key) {
        return Ok(v.clone());
    }
    let v = build()?;
    map.lock().expect("memo lock").entry(key).or_insert(v.clone());
    Ok(v)
}

/// The degree-`n` chord algebra: chord diagrams modulo 4T, and 1T in FI mode.
/// Degree 0 is spanned by the empty diagram.
pub fn algebra(m: usize, n: usize, mode: Mode) -> Result<Space> {
    static CELL: Memo<(usize, usize, Mode), Space> = OnceLock::new();
    memo(&CELL, (m, n, mode), || {
        if m == 0 {
            return Err(Error::InvalidSpec("strand count must be positive".into()));
        }
        if n == 0 {
            let basis = Arc::new(Basis::new(vec![Diagram::empty(m)]));
            return Ok(Arc::new(QuotientSpace::new(basis, [])?));
        }
        let chords = cached(m, n, Shape::Chord, SizeFilter::Any)?;
        let basis = Arc::new(Basis::new(chords.to_vec()));
        let mut rels = four_t(m, n)?.vectors;
        if mode.one_t() {
            rels.extend(one_t(&chords).vectors);
        }
        Ok(Arc::new(QuotientSpace::new(basis, &rels)?))
    })
}

/// Rewrite a diagram as a combination of chord diagrams by breaking nodes
/// with STU until none remain.
pub fn stu_expand(d: &Diagram) -> RationalVector {
    static CELL: Memo<Diagram, RationalVector> = OnceLock::new();
    if d.node_count() == 0 {
        return LinComb::unit(d.clone());
    }
    let map = CELL.get_or_init(Default::default);
    if let Some(v) = map.lock().expect("memo lock").get(d) {
        return v.clone();
    }
    let leaf = *d
        .breakable_legs()
        .first()
        .expect("every component has a leg, so some node touches one");
    let (eq, cross) = d.break_leg(leaf).expect("breakable");
    let v = stu_expand(&eq) - stu_expand(&cross);
    map.lock().expect("memo lock").insert(d.clone(), v.clone());
    v
}

pub fn expand(v: &RationalVector) -> RationalVector {
    v.map_linear(stu_expand)
}

/// Coordinates in [`algebra`] of a homogeneous combination of diagrams.
pub fn algebra_coords(v: &RationalVector, m: usize, n: usize, mode: Mode) -> Result<BTreeMap<usize, Q>> {
    algebra(m, n, mode)?.coords_sparse(&expand(v))
}

/// The module of size-`k` forests of degree `n` modulo 1T (FI mode), AS,
/// IHX, STU² and the hexagon relations.
pub fn forest_module(m: usize, n: usize, k: usize, mode: Mode) -> Result<Space> {
    static CELL: Memo<(usize, usize, usize, Mode), Space> = OnceLock::new();
    memo(&CELL, (m, n, k, mode), || {
        if k == 0 || k > n {
            return Err(Error::InvalidSpec(format!("forest size {k} outside 1..={n}")));
        }
        let forests = cached(m, n, Shape::Forest, SizeFilter::Exact(k))?;
        let basis = Arc::new(Basis::new(forests.to_vec()));
        let mut rels = Vec::new();
        if mode.one_t() {
            rels.extend(one_t(&forests).vectors);
        }
        rels.extend(antisymmetry(&forests).vectors);
        rels.extend(ihx(&forests).vectors);
        rels.extend(stu2(m, n, k)?.vectors);
        rels.extend(hexagons(m, n, k)?.vectors);
        Ok(Arc::new(QuotientSpace::new(basis, &rels)?))
    })
}

/// Degree-`n` part of the Lie algebra of trees.
pub fn lie_module(m: usize, n: usize, mode: Mode) -> Result<Space> {
    forest_module(m, n, 1, mode)
}

/// Basis `0..dim` for coordinate vectors.
pub fn coordinate_basis(dim: usize) -> Arc<Basis<usize>> {
    static CELL: Memo<usize, Arc<Basis<usize>>> = OnceLock::new();
    memo(&CELL, dim, || Ok(Arc::new(Basis::new((0..dim).collect())))).expect("infallible")
}

pub fn coord_vector(coords: &BTreeMap<usize, Q>) -> LinComb<usize> {
    coords.iter().map(|(&i, x)| (i, x.clone())).collect()
}

/// The size filtration stage `F^k` inside the degree-`n` algebra: the span of
/// the images of forests with at most `k` trees.
pub fn size_filtration(m: usize, n: usize, k: usize, mode: Mode) -> Result<Arc<Span<usize>>> {
    static CELL: Memo<(usize, usize, usize, Mode), Arc<Span<usize>>> = OnceLock::new();
    memo(&CELL, (m, n, k, mode), || {
        let space = algebra(m, n, mode)?;
        let forests = cached(m, n, Shape::Forest, SizeFilter::AtMost(k))?;
        let images: Vec<RationalVector> = forests.iter().map(|f| expand(&LinComb::unit(f.clone()))).collect();
        let coords = space.coords_batch(&images)?;
        let vs: Vec<LinComb<usize>> = coords.iter().map(coord_vector).collect();
        Ok(Arc::new(Span::from_vectors(coordinate_basis(space.dim()), &vs)?))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{enumerate_diagrams, EnumSpec};
    use crate::relations::stu;

    #[test]
    fn knot_algebra_dims() {
        let framed: Vec<usize> = (1..=4).map(|n| algebra(1, n, Mode::Framed).unwrap().dim()).collect();
        let fi: Vec<usize> = (1..=4).map(|n| algebra(1, n, Mode::FI).unwrap().dim()).collect();
        assert_eq!(framed, vec![1, 2, 3, 6]);
        assert_eq!(fi, vec![0, 1, 1, 3]);
        assert_eq!(algebra(2, 0, Mode::FI).unwrap().dim(), 1);
    }

    #[test]
    fn expansion_is_chordal_and_respects_stu() {
        let trees = cached(2, 3, Shape::Tree, SizeFilter::Any).unwrap();
        for t in trees.iter() {
            let v = stu_expand(t);
            assert!(v.keys().all(|d| d.is_chord_diagram()));
            for leaf in t.breakable_legs() {
                let (eq, cross) = t.break_leg(leaf).unwrap();
                let w = stu_expand(&eq) - stu_expand(&cross);
                let space = algebra(2, 3, Mode::Framed).unwrap();
                assert_eq!(space.coords_sparse(&v).unwrap(), space.coords_sparse(&w).unwrap());
            }
        }
    }

    fn forests_mod_stu(m: usize, n: usize, mode: Mode) -> usize {
        let forests = cached(m, n, Shape::Forest, SizeFilter::Any).unwrap();
        let basis = Arc::new(Basis::new(forests.to_vec()));
        let mut rels = stu(&forests).vectors;
        if mode.one_t() {
            rels.extend(one_t(&forests).vectors);
        }
        QuotientSpace::new(basis, &rels).unwrap().dim()
    }

    fn all_mod_stu(m: usize, n: usize, mode: Mode) -> usize {
        let all = enumerate_diagrams(&EnumSpec::new(m, n, Shape::All)).unwrap();
        let basis = Arc::new(Basis::new(all.clone()));
        let mut rels = stu(&all).vectors;
        if mode.one_t() {
            rels.extend(one_t(&all).vectors);
        }
        QuotientSpace::new(basis, &rels).unwrap().dim()
    }

    #[test]
    fn algebra_agrees_with_forests_mod_stu() {
        for (m, top) in [(1, 4), (2, 3)] {
            for n in 1..=top {
                for mode in [Mode::Framed, Mode::FI] {
                    assert_eq!(algebra(m, n, mode).unwrap().dim(), forests_mod_stu(m, n, mode), "m={m} n={n} {mode}");
                }
            }
        }
    }

    #[test]
    fn algebra_agrees_with_all_diagrams_mod_stu() {
        for (m, top) in [(1, 3), (2, 2)] {
            for n in 1..=top {
                for mode in [Mode::Framed, Mode::FI] {
                    assert_eq!(algebra(m, n, mode).unwrap().dim(), all_mod_stu(m, n, mode), "m={m} n={n} {mode}");
                }
            }
        }
    }

    #[test]
    fn lie_module_small_dims() {
        assert_eq!(lie_module(1, 1, Mode::FI).unwrap().dim(), 0);
        assert_eq!(lie_module(2, 1, Mode::FI).unwrap().dim(), 1);
        assert_eq!(lie_module(2, 1, Mode::Framed).unwrap().dim(), 3);
    }

    #[test]
    fn top_filtration_stage_is_everything() {
        for n in 1..=3 {
            for mode in [Mode::Framed, Mode::FI] {
                let dim = algebra(2, n, mode).unwrap().dim();
                assert_eq!(size_filtration(2, n, n, mode).unwrap().rank(), dim);
                assert_eq!(forest_module(2, n, n, mode).unwrap().dim(), dim);
            }
        }
    }

    #[test]
    fn filtration_is_monotone() {
        for n in 1..=4 {
            let ranks: Vec<usize> = (1..=n).map(|k| size_filtration(1, n, k, Mode::FI).unwrap().rank()).collect();
            assert!(ranks.windows(2).all(|w| w[0] <= w[1]), "{ranks:?}");
        }
    }

    #[test]
    fn mode_round_trip() {
        for mode in [Mode::Framed, Mode::FI] {
            assert_eq!(mode.to_string().parse::<Mode>().unwrap(), mode);
        }
        assert!("bogus".parse::<Mode>().is_err());
    }
}
