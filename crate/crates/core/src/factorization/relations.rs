//! Atoms of the monoid of relations and their shapes for class group `C2`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{AtomTable, Factorization, FactorizationTable, Monoid};
use crate::error::{Error, Result};
use crate::tblock::{Coords, InstanceSpec};

/// Two factorizations of one element, `|left| ≤ |right|`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelationPair {
    pub left: Factorization,
    pub right: Factorization,
}

impl RelationPair {
    /// `(|left|, |right|)`
    pub fn kind(&self) -> (u32, u32) {
        (self.left.len(), self.right.len())
    }
}

/// Products of all sub-multisets of `z` other than `1` and `z` itself.
fn proper_products<M: Monoid>(
    m: &M,
    atoms: &AtomTable<M::Elem>,
    z: &Factorization,
) -> Vec<M::Elem> {
    let counts: Vec<(u32, u32)> = z.counts().into_iter().collect();
    let mut out = Vec::new();
    let mut pick = vec![0u32; counts.len()];
    loop {
        let mut i = 0;
        while i < pick.len() && pick[i] == counts[i].1 {
            pick[i] = 0;
            i += 1;
        }
        if i == pick.len() {
            break;
        }
        pick[i] += 1;
        let taken: u32 = pick.iter().sum();
        if taken == z.len() {
            continue;
        }
        let mut prod = m.identity();
        for (&(id, _), &n) in counts.iter().zip(&pick) {
            for _ in 0..n {
                prod = m.mul(&prod, atoms.get(id));
            }
        }
        out.push(prod);
    }
    out
}

/// Whether `(x, y)` admits no relation `(x', y')` with `x' | x`, `y' | y`
/// other than the trivial one and itself.
fn is_minimal<M: Monoid>(
    m: &M,
    atoms: &AtomTable<M::Elem>,
    x: &Factorization,
    y: &Factorization,
) -> bool {
    let left: HashSet<M::Elem> = proper_products(m, atoms, x).into_iter().collect();
    !proper_products(m, atoms, y)
        .iter()
        .any(|p| left.contains(p))
}

/// Atoms `(x, y)` of the monoid of relations with `|x| ≤ |y| ≤ max_right_len`
/// among the elements of `table`. Pairs with `|x| = |y|` are listed once,
/// with `x < y`.
pub fn relation_atoms<M: Monoid>(
    m: &M,
    atoms: &AtomTable<M::Elem>,
    table: &FactorizationTable<M::Elem>,
    max_right_len: u32,
) -> Vec<RelationPair> {
    let mut out = Vec::new();
    for (_, z) in table.iter() {
        if z.len() < 2 {
            continue;
        }
        let short: Vec<&Factorization> = z.iter().filter(|f| f.len() <= max_right_len).collect();
        for (a, x) in short.iter().enumerate() {
            for (b, y) in short.iter().enumerate() {
                let ordered = x.len() < y.len() || (x.len() == y.len() && a < b);
                if !ordered || x.shares_atom_with(y) {
                    continue;
                }
                if is_minimal(m, atoms, x, y) {
                    out.push(RelationPair {
                        left: (*x).clone(),
                        right: (*y).clone(),
                    });
                }
            }
        }
    }
    out.sort();
    out
}

/// Atom families of a T-block monoid over `C2 = {0, g}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AtomFamily {
    /// the prime `0`
    Zero,
    /// `g²`
    G2,
    /// `p_i ε` of class `0`
    P0(usize),
    /// `p_i ε · g`
    PG(usize),
    /// `p_i² ε`
    Sq(usize),
    /// `p_i p_j ε_i ε_j`, `i < j`
    Mix(usize, usize),
}

impl AtomFamily {
    pub fn of(inst: &InstanceSpec, a: &Coords) -> Option<AtomFamily> {
        if inst.group().order() != 2 {
            return None;
        }
        let (zero, g) = (a[0], a[1]);
        let vals: Vec<(usize, u16)> = (0..inst.components().len())
            .map(|i| (i, a[inst.part_offset(i)]))
            .filter(|&(_, v)| v > 0)
            .collect();
        match (zero, g, vals.as_slice()) {
            (1, 0, []) => Some(AtomFamily::Zero),
            (0, 2, []) => Some(AtomFamily::G2),
            (0, 0, [(i, 1)]) => Some(AtomFamily::P0(*i)),
            (0, 1, [(i, 1)]) => Some(AtomFamily::PG(*i)),
            (0, 0, [(i, 2)]) => Some(AtomFamily::Sq(*i)),
            (0, 0, [(i, 1), (j, 1)]) => Some(AtomFamily::Mix(*i, *j)),
            _ => None,
        }
    }
}

type Shape = (Vec<AtomFamily>, Vec<AtomFamily>);

fn shape(character: u8, i: usize, j: usize) -> Option<Shape> {
    use AtomFamily::*;
    let mix = Mix(i.min(j), i.max(j));
    let distinct = i != j;
    let s = match character {
        1 if distinct => (vec![G2, mix], vec![PG(i), PG(j)]),
        2 if distinct => (vec![mix, mix], vec![Sq(i), Sq(j)]),
        3 => (vec![G2, Sq(i)], vec![PG(i), PG(i)]),
        4 => (vec![P0(i), P0(i)], vec![P0(i), P0(i)]),
        5 => (vec![PG(i), PG(i)], vec![PG(i), PG(i)]),
        6 => (vec![P0(i), PG(i)], vec![P0(i), PG(i)]),
        7 => (vec![PG(i), PG(i)], vec![P0(i), P0(i), G2]),
        8 if distinct => (vec![mix, mix], vec![P0(i), P0(i), Sq(j)]),
        9 if distinct => (vec![mix, mix], vec![P0(i), P0(i), P0(j), P0(j)]),
        10 => (vec![P0(i); 3], vec![P0(i); 3]),
        11 => (vec![P0(i), P0(i), PG(i)], vec![P0(i), P0(i), PG(i)]),
        12 => (vec![Sq(i), P0(i)], vec![P0(i); 3]),
        13 => (vec![Sq(i), PG(i)], vec![P0(i), P0(i), PG(i)]),
        14 => (vec![Sq(i), P0(i)], vec![Sq(i), P0(i)]),
        15 => (vec![Sq(i), PG(i)], vec![Sq(i), PG(i)]),
        _ => return None,
    };
    Some(s)
}

fn sorted(mut v: Vec<AtomFamily>) -> Vec<AtomFamily> {
    v.sort();
    v
}

/// Which of the fifteen defining-relation shapes an atom of the monoid of
/// relations has, for class group `C2`. `None` when no shape fits.
pub fn classify_character(
    inst: &InstanceSpec,
    atoms: &AtomTable<Coords>,
    rel: &RelationPair,
) -> Result<Option<u8>> {
    if inst.group().order() != 2 {
        return Err(Error::Unsupported(format!(
            "relation characters need a class group of order 2, found {}",
            inst.group()
        )));
    }
    if rel.left == rel.right {
        return Ok(None);
    }
    let families = |z: &Factorization| -> Option<Vec<AtomFamily>> {
        z.ids()
            .iter()
            .map(|&id| AtomFamily::of(inst, atoms.get(id)))
            .collect::<Option<Vec<_>>>()
            .map(sorted)
    };
    let (Some(left), Some(right)) = (families(&rel.left), families(&rel.right)) else {
        return Ok(None);
    };
    let r = inst.components().len();
    for character in 1..=15u8 {
        for i in 0..r {
            for j in 0..r {
                let Some((a, b)) = shape(character, i, j) else {
                    continue;
                };
                let (a, b) = (sorted(a), sorted(b));
                if (a == left && b == right) || (a == right && b == left) {
                    return Ok(Some(character));
                }
            }
        }
    }
    Ok(None)
}
