//! The factorization engine.
//!
//! Everything here is generic over [`Monoid`], a reduced atomic monoid given
//! by multiplication, divisibility and a degree function that strictly
//! decreases under division by a non-identity element. Atoms are fixed in an
//! [`AtomTable`]; a [`Factorization`] is a multiset of atom ids.

mod invariants;
mod relations;
mod survey;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::hash::Hash;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub use invariants::{
    catenary_of_element, delta_of_element, elasticity_of_element, length_set,
    monotone_catenary_of_element, monotone_r_chain_exists, monotone_r_reachable, r_chain_classes, tame_of_element,
    tame_of_pair, ElementInvariants,
};
pub use relations::{classify_character, relation_atoms, AtomFamily, RelationPair};
pub use survey::{element_invariants, survey, MonoidInvariants, Witness};

/// A reduced, atomic, cancellative commutative monoid.
pub trait Monoid: Sync {
    type Elem: Clone + Eq + Hash + Ord + Debug + Send + Sync;

    fn identity(&self) -> Self::Elem;

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// `Some(a / b)` when `b` divides `a` inside the monoid.
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem>;

    /// Size measure; zero exactly on the identity.
    fn degree(&self, a: &Self::Elem) -> u32;
}

/// The atoms of a monoid in a fixed order; atom ids are positions.
#[derive(Clone, Debug)]
pub struct AtomTable<E> {
    atoms: Vec<E>,
    index: HashMap<E, u32>,
}

impl<E: Clone + Eq + Hash> AtomTable<E> {
    pub fn new(atoms: Vec<E>) -> Self {
        let index = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i as u32))
            .collect();
        AtomTable { atoms, index }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn get(&self, id: u32) -> &E {
        &self.atoms[id as usize]
    }

    pub fn id_of(&self, atom: &E) -> Option<u32> {
        self.index.get(atom).copied()
    }

    pub fn atoms(&self) -> &[E] {
        &self.atoms
    }
}

/// A multiset of atom ids, stored sorted. Serialized as the id list with
/// repetition.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<u32>", into = "Vec<u32>")]
pub struct Factorization {
    ids: SmallVec<[u32; 8]>,
}

impl From<Vec<u32>> for Factorization {
    fn from(ids: Vec<u32>) -> Self {
        Factorization::from_ids(ids)
    }
}

impl From<Factorization> for Vec<u32> {
    fn from(z: Factorization) -> Self {
        z.ids.into_vec()
    }
}

impl Factorization {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_ids<I: IntoIterator<Item = u32>>(ids: I) -> Self {
        let mut ids: SmallVec<[u32; 8]> = ids.into_iter().collect();
        ids.sort_unstable();
        Factorization { ids }
    }

    /// Atom ids with repetition, ascending.
    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    /// `|z|`
    pub fn len(&self) -> u32 {
        self.ids.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn multiplicity(&self, id: u32) -> u32 {
        self.ids.iter().filter(|&&x| x == id).count() as u32
    }

    pub fn contains(&self, id: u32) -> bool {
        self.ids.binary_search(&id).is_ok()
    }

    pub fn counts(&self) -> BTreeMap<u32, u32> {
        let mut out = BTreeMap::new();
        for &id in &self.ids {
            *out.entry(id).or_insert(0) += 1;
        }
        out
    }

    /// Multiset gcd.
    pub fn gcd(&self, other: &Factorization) -> Factorization {
        let (mut i, mut j) = (0, 0);
        let mut ids = SmallVec::new();
        while i < self.ids.len() && j < other.ids.len() {
            match self.ids[i].cmp(&other.ids[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    ids.push(self.ids[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        Factorization { ids }
    }

    pub fn shares_atom_with(&self, other: &Factorization) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.ids.len() && j < other.ids.len() {
            match self.ids[i].cmp(&other.ids[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    /// `z·u` for an atom `u`.
    pub fn with(&self, id: u32) -> Factorization {
        let mut ids = self.ids.clone();
        let pos = ids.partition_point(|&x| x <= id);
        ids.insert(pos, id);
        Factorization { ids }
    }

    /// `π(z)`
    pub fn product<M: Monoid>(&self, m: &M, atoms: &AtomTable<M::Elem>) -> M::Elem {
        self.ids
            .iter()
            .fold(m.identity(), |acc, &id| m.mul(&acc, atoms.get(id)))
    }
}

/// `d(z, z')`: the larger of `|z/gcd|` and `|z'/gcd|`.
pub fn distance(z: &Factorization, w: &Factorization) -> u32 {
    let (mut i, mut j, mut common) = (0, 0, 0u32);
    let (a, b) = (&z.ids, &w.ids);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    (a.len() as u32 - common).max(b.len() as u32 - common)
}

/// `Z(a)`, sorted. Depth-first over atoms in non-decreasing id order,
/// memoized on `(element, smallest admissible atom id)`.
pub fn factorizations<M: Monoid>(
    m: &M,
    atoms: &AtomTable<M::Elem>,
    a: &M::Elem,
) -> Vec<Factorization> {
    let mut memo = HashMap::new();
    let mut out = factorize_from(m, atoms, a, 0, &mut memo);
    out.sort();
    out
}

type Memo<E> = HashMap<(E, u32), Vec<Factorization>>;

fn factorize_from<M: Monoid>(
    m: &M,
    atoms: &AtomTable<M::Elem>,
    a: &M::Elem,
    min_id: u32,
    memo: &mut Memo<M::Elem>,
) -> Vec<Factorization> {
    if m.degree(a) == 0 {
        return vec![Factorization::empty()];
    }
    if let Some(hit) = memo.get(&(a.clone(), min_id)) {
        return hit.clone();
    }
    let mut out = Vec::new();
    for id in min_id..atoms.len() as u32 {
        if let Some(rest) = m.div(a, atoms.get(id)) {
            for z in factorize_from(m, atoms, &rest, id, memo) {
                let mut ids = SmallVec::with_capacity(z.ids.len() + 1);
                ids.push(id);
                ids.extend_from_slice(&z.ids);
                out.push(Factorization { ids });
            }
        }
    }
    memo.insert((a.clone(), min_id), out.clone());
    out
}

/// Factorization sets for a divisor-closed family of elements, built
/// bottom-up by degree: `Z(a)` is the union over atoms `u | a` of
/// `z·u` with `z ∈ Z(a/u)` and every atom of `z` at most `u`.
#[derive(Clone, Debug)]
pub struct FactorizationTable<E> {
    elements: Vec<E>,
    index: HashMap<E, usize>,
    pub(crate) sets: Vec<Vec<Factorization>>,
}

impl<E: Clone + Eq + Hash + Ord + Debug + Send + Sync> FactorizationTable<E> {
    /// `elements` must be sorted by degree and closed under taking divisors.
    pub fn build<M: Monoid<Elem = E>>(
        m: &M,
        atoms: &AtomTable<E>,
        elements: Vec<E>,
    ) -> Result<Self> {
        let mut index: HashMap<E, usize> = HashMap::with_capacity(elements.len());
        let mut sets: Vec<Vec<Factorization>> = Vec::with_capacity(elements.len());
        let mut start = 0;
        while start < elements.len() {
            let deg = m.degree(&elements[start]);
            let end = start
                + elements[start..]
                    .iter()
                    .take_while(|e| m.degree(e) == deg)
                    .count();
            let level: Vec<Result<Vec<Factorization>>> = elements[start..end]
                .par_iter()
                .map(|a| Self::combine(m, atoms, a, &index, &sets))
                .collect();
            for (offset, z) in level.into_iter().enumerate() {
                index.insert(elements[start + offset].clone(), start + offset);
                sets.push(z?);
            }
            start = end;
        }
        Ok(FactorizationTable {
            elements,
            index,
            sets,
        })
    }

    fn combine<M: Monoid<Elem = E>>(
        m: &M,
        atoms: &AtomTable<E>,
        a: &E,
        index: &HashMap<E, usize>,
        sets: &[Vec<Factorization>],
    ) -> Result<Vec<Factorization>> {
        if m.degree(a) == 0 {
            return Ok(vec![Factorization::empty()]);
        }
        let mut out = Vec::new();
        for id in 0..atoms.len() as u32 {
            if let Some(rest) = m.div(a, atoms.get(id)) {
                let pos = *index.get(&rest).ok_or_else(|| {
                    Error::Structural(format!(
                        "element family is not divisor-closed: {rest:?} missing"
                    ))
                })?;
                for z in &sets[pos] {
                    if z.ids.last().is_none_or(|&last| last <= id) {
                        let mut ids = z.ids.clone();
                        ids.push(id);
                        out.push(Factorization { ids });
                    }
                }
            }
        }
        out.sort();
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn get(&self, a: &E) -> Option<&[Factorization]> {
        self.index.get(a).map(|&i| self.sets[i].as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&E, &[Factorization])> {
        self.elements
            .iter()
            .zip(self.sets.iter().map(|s| s.as_slice()))
    }
}
