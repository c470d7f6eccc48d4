//! The Lie algebra of trees: trees modulo 1T, AS, IHX and STU², with the
//! bracket given by the slide vector between the two stackings.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::forest::vector_between;
use crate::linalg::{LinComb, RationalVector, Q};
use crate::spaces::{lie_module, Mode};

/// A homogeneous element, in coordinates of the degree-`degree` module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieElement {
    pub strands: usize,
    pub degree: usize,
    pub coords: BTreeMap<usize, Q>,
}

impl LieElement {
    pub fn zero(strands: usize, degree: usize) -> LieElement {
        LieElement {
            strands,
            degree,
            coords: BTreeMap::new(),
        }
    }

    pub fn from_vector(v: &RationalVector, m: usize, n: usize, mode: Mode) -> Result<LieElement> {
        Ok(LieElement {
            strands: m,
            degree: n,
            coords: lie_module(m, n, mode)?.coords_sparse(v)?,
        })
    }

    pub fn from_tree(t: &Diagram, mode: Mode) -> Result<LieElement> {
        if !t.is_tree() {
            return Err(Error::Domain(format!("{t} is not a tree")));
        }
        LieElement::from_vector(&LinComb::unit(t.clone()), t.strand_count(), t.degree(), mode)
    }

    /// Unit vectors of the degree-`n` module.
    pub fn basis(m: usize, n: usize, mode: Mode) -> Result<Vec<LieElement>> {
        let dim = lie_module(m, n, mode)?.dim();
        Ok((0..dim)
            .map(|i| LieElement {
                strands: m,
                degree: n,
                coords: BTreeMap::from([(i, Q::from_integer(1.into()))]),
            })
            .collect())
    }

    /// A combination of trees representing this element.
    pub fn lift(&self, mode: Mode) -> Result<RationalVector> {
        Ok(lie_module(self.strands, self.degree, mode)?.lift(&self.coords))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn add(&self, other: &LieElement) -> Result<LieElement> {
        if self.strands != other.strands {
            return Err(Error::StrandMismatch {
                left: self.strands,
                right: other.strands,
            });
        }
        if self.degree != other.degree {
            return Err(Error::Domain("adding elements of different degrees".into()));
        }
        let mut coords = self.coords.clone();
        for (&i, x) in &other.coords {
            let e = coords.entry(i).or_insert_with(Q::zero);
            *e += x;
            if e.is_zero() {
                coords.remove(&i);
            }
        }
        Ok(LieElement { coords, ..self.clone() })
    }

    pub fn neg(&self) -> LieElement {
        LieElement {
            coords: self.coords.iter().map(|(&i, x)| (i, -x)).collect(),
            ..self.clone()
        }
    }
}

/// The slide vector from `u . t` to `t . u`, before reduction.
pub fn tree_bracket(t: &Diagram, u: &Diagram) -> Result<RationalVector> {
    let below = Diagram::stack(u, t)?;
    let above = Diagram::stack(t, u)?;
    vector_between(&below, &above)
}

/// Bilinear extension of [`tree_bracket`] through representatives.
pub fn bracket(x: &LieElement, y: &LieElement, mode: Mode) -> Result<LieElement> {
    if x.strands != y.strands {
        return Err(Error::StrandMismatch {
            left: x.strands,
            right: y.strands,
        });
    }
    let (m, n) = (x.strands, x.degree + y.degree);
    if x.is_zero() || y.is_zero() {
        return Ok(LieElement::zero(m, n));
    }
    let (a, b) = (x.lift(mode)?, y.lift(mode)?);
    let mut acc = RationalVector::zero();
    for (t, p) in a.iter() {
        for (u, q) in b.iter() {
            acc.add_scaled(&tree_bracket(t, u)?, &(p * q));
        }
    }
    LieElement::from_vector(&acc, m, n, mode)
}

pub fn graded_dims(m: usize, max_degree: usize, mode: Mode) -> Result<Vec<usize>> {
    (1..=max_degree).map(|n| Ok(lie_module(m, n, mode)?.dim())).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JacobiReport {
    pub strands: usize,
    pub max_degree: usize,
    pub pairs_checked: usize,
    pub triples_checked: usize,
    pub violations: Vec<String>,
}

impl JacobiReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

type Labelled = (usize, usize, LieElement);

fn all_basis(m: usize, max_degree: usize, mode: Mode) -> Result<Vec<Labelled>> {
    let mut out = Vec::new();
    for n in 1..max_degree {
        for (i, e) in LieElement::basis(m, n, mode)?.into_iter().enumerate() {
            out.push((n, i, e));
        }
    }
    Ok(out)
}

/// Antisymmetry on all basis pairs and the Jacobi identity on all basis
/// triples with total degree at most `max_degree`.
pub fn jacobi_check(m: usize, max_degree: usize, mode: Mode) -> Result<JacobiReport> {
    let basis = all_basis(m, max_degree, mode)?;
    let mut pairs = Vec::new();
    for a in 0..basis.len() {
        for b in a..basis.len() {
            if basis[a].0 + basis[b].0 <= max_degree {
                pairs.push((a, b));
            }
        }
    }
    let mut triples = Vec::new();
    for a in 0..basis.len() {
        for b in a..basis.len() {
            for c in b..basis.len() {
                if basis[a].0 + basis[b].0 + basis[c].0 <= max_degree {
                    triples.push((a, b, c));
                }
            }
        }
    }
    let name = |k: usize| format!("e[{}]{}", basis[k].0, basis[k].1);
    let mut violations: Vec<String> = pairs
        .par_iter()
        .map(|&(a, b)| -> Result<Option<String>> {
            let (x, y) = (&basis[a].2, &basis[b].2);
            let s = bracket(x, y, mode)?.add(&bracket(y, x, mode)?)?;
            Ok((!s.is_zero()).then(|| format!("antisymmetry fails for {} {}", name(a), name(b))))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let jac: Vec<String> = triples
        .par_iter()
        .map(|&(a, b, c)| -> Result<Option<String>> {
            let (x, y, z) = (&basis[a].2, &basis[b].2, &basis[c].2);
            let s = bracket(x, &bracket(y, z, mode)?, mode)?
                .add(&bracket(y, &bracket(z, x, mode)?, mode)?)?
                .add(&bracket(z, &bracket(x, y, mode)?, mode)?)?;
            Ok((!s.is_zero()).then(|| format!("Jacobi fails for {} {} {}", name(a), name(b), name(c))))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    violations.extend(jac);
    Ok(JacobiReport {
        strands: m,
        max_degree,
        pairs_checked: pairs.len(),
        triples_checked: triples.len(),
        violations,
    })
}

fn hex(d: &Diagram) -> String {
    hex::encode(d.encoding())
}

/// Brackets of all basis pairs with total degree at most `max_degree`, keyed
/// by the hex encodings of the representative trees.
pub fn structure_constants(m: usize, max_degree: usize, mode: Mode) -> Result<serde_json::Value> {
    let mut basis = serde_json::Map::new();
    let mut reps: Vec<(usize, Diagram)> = Vec::new();
    for n in 1..=max_degree {
        let space = lie_module(m, n, mode)?;
        let keys: Vec<String> = (0..space.dim()).map(|i| hex(space.representative(i))).collect();
        basis.insert(n.to_string(), json!(keys));
        reps.extend((0..space.dim()).map(|i| (n, space.representative(i).clone())));
    }
    let mut brackets = Vec::new();
    for (p, t) in &reps {
        for (q, u) in &reps {
            if p + q > max_degree {
                continue;
            }
            let e = LieElement::from_vector(&tree_bracket(t, u)?, m, p + q, mode)?;
            let space = lie_module(m, p + q, mode)?;
            let result: serde_json::Map<String, serde_json::Value> = e
                .coords
                .iter()
                .map(|(&i, x)| (hex(space.representative(i)), json!(x.to_string())))
                .collect();
            brackets.push(json!({ "x": hex(t), "y": hex(u), "result": result }));
        }
    }
    Ok(json!({
        "strands": m,
        "max_degree": max_degree,
        "mode": mode.to_string(),
        "basis": basis,
        "brackets": brackets,
    }))
}
