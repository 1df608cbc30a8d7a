//! Finite abelian groups written as direct sums of cyclic groups, sequences
//! over them, minimal zero-sum sequences and the Davenport constant.
//!
//! Elements are residue vectors. The group `[3, 3]` is `C3 ⊕ C3` and its
//! element `[1, 2]` is `e1 + 2·e2`. Groups are compared structurally; no
//! normal form is computed, so `[2, 3]` and `[6]` are different values.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest group order accepted by [`FiniteAbelianGroup::new`].
pub const MAX_GROUP_ORDER: u64 = 1_000_000;

/// Default bound on `|G|` for searches whose cost grows with the group
/// (Davenport constant, element enumeration).
pub const DEFAULT_SEARCH_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct FiniteAbelianGroup {
    moduli: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    residues: Vec<u32>,
}

impl GroupElement {
    pub fn residues(&self) -> &[u32] {
        &self.residues
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.residues.iter().map(|r| r.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl TryFrom<Vec<u32>> for FiniteAbelianGroup {
    type Error = Error;

    fn try_from(moduli: Vec<u32>) -> Result<Self> {
        FiniteAbelianGroup::new(moduli)
    }
}

impl From<FiniteAbelianGroup> for Vec<u32> {
    fn from(g: FiniteAbelianGroup) -> Self {
        g.moduli
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moduli.iter().all(|&n| n == 1) {
            return write!(f, "C1");
        }
        let parts: Vec<String> = self
            .moduli
            .iter()
            .filter(|&&n| n > 1)
            .map(|n| format!("C{n}"))
            .collect();
        write!(f, "{}", parts.join("⊕"))
    }
}

impl FiniteAbelianGroup {
    pub fn new(moduli: Vec<u32>) -> Result<Self> {
        let mut order: u64 = 1;
        for (j, &n) in moduli.iter().enumerate() {
            if n == 0 {
                return Err(Error::invalid(format!("group[{j}]"), "cyclic order must be at least 1"));
            }
            order = order.saturating_mul(n as u64);
        }
        if order > MAX_GROUP_ORDER {
            return Err(Error::ResourceCap {
                what: "group order",
                requested: order,
                limit: MAX_GROUP_ORDER,
            });
        }
        Ok(FiniteAbelianGroup { moduli })
    }

    pub fn cyclic(n: u32) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup { moduli: Vec::new() }
    }

    pub fn moduli(&self) -> &[u32] {
        &self.moduli
    }

    pub fn order(&self) -> usize {
        self.moduli.iter().map(|&n| n as usize).product()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            residues: vec![0; self.moduli.len()],
        }
    }

    /// Builds an element from arbitrary integers, reducing each coordinate.
    pub fn element(&self, residues: &[i64]) -> Result<GroupElement> {
        if residues.len() != self.moduli.len() {
            return Err(Error::Structural(format!(
                "element has {} coordinates, group {} has {}",
                residues.len(),
                self,
                self.moduli.len()
            )));
        }
        Ok(GroupElement {
            residues: residues
                .iter()
                .zip(&self.moduli)
                .map(|(&r, &n)| r.rem_euclid(n as i64) as u32)
                .collect(),
        })
    }

    pub fn contains(&self, a: &GroupElement) -> bool {
        a.residues.len() == self.moduli.len()
            && a.residues.iter().zip(&self.moduli).all(|(&r, &n)| r < n)
    }

    fn check(&self, a: &GroupElement) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::Structural(format!("{a} is not an element of {self}")))
        }
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(GroupElement {
            residues: a
                .residues
                .iter()
                .zip(&b.residues)
                .zip(&self.moduli)
                .map(|((&x, &y), &n)| ((x as u64 + y as u64) % n as u64) as u32)
                .collect(),
        })
    }

    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        Ok(GroupElement {
            residues: a
                .residues
                .iter()
                .zip(&self.moduli)
                .map(|(&x, &n)| (n - x) % n)
                .collect(),
        })
    }

    /// `n·a` for any integer `n`.
    pub fn scale(&self, n: i64, a: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        Ok(GroupElement {
            residues: a
                .residues
                .iter()
                .zip(&self.moduli)
                .map(|(&x, &m)| ((n.rem_euclid(m as i64) as u64 * x as u64) % m as u64) as u32)
                .collect(),
        })
    }

    /// Order of `a` as a group element.
    pub fn order_of(&self, a: &GroupElement) -> Result<u32> {
        self.check(a)?;
        let mut ord: u64 = 1;
        for (&x, &n) in a.residues.iter().zip(&self.moduli) {
            let o = (n / gcd(x, n)) as u64;
            ord = ord / gcd_u64(ord, o) * o;
        }
        Ok(ord as u32)
    }

    /// Position of `a` in the lexicographic order of residue vectors.
    pub fn index_of(&self, a: &GroupElement) -> Result<usize> {
        self.check(a)?;
        Ok(a.residues
            .iter()
            .zip(&self.moduli)
            .fold(0usize, |acc, (&r, &n)| acc * n as usize + r as usize))
    }

    /// Inverse of [`index_of`](Self::index_of).
    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut residues = vec![0; self.moduli.len()];
        for j in (0..self.moduli.len()).rev() {
            let n = self.moduli[j] as usize;
            residues[j] = (index % n) as u32;
            index /= n;
        }
        GroupElement { residues }
    }

    /// All elements in lexicographic order of their residue vectors.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order()).map(move |i| self.element_at(i))
    }
}

/// All elements of `g`, refusing groups larger than `cap`.
pub fn enumerate_elements(g: &FiniteAbelianGroup, cap: usize) -> Result<Vec<GroupElement>> {
    if g.order() > cap {
        return Err(Error::ResourceCap {
            what: "group enumeration",
            requested: g.order() as u64,
            limit: cap as u64,
        });
    }
    Ok(g.elements().collect())
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// Element-index arithmetic for a fixed group. Everything hot in the crate
/// works on indices and goes through this table.
#[derive(Clone, Debug)]
pub(crate) struct CayleyTable {
    order: usize,
    add: Vec<u32>,
    neg: Vec<u32>,
}

impl CayleyTable {
    pub(crate) fn new(g: &FiniteAbelianGroup) -> Self {
        let order = g.order();
        let elems: Vec<GroupElement> = g.elements().collect();
        let mut add = Vec::with_capacity(order * order);
        for a in &elems {
            for b in &elems {
                let s = g.add(a, b).expect("elements of g");
                add.push(g.index_of(&s).expect("element of g") as u32);
            }
        }
        let neg = elems
            .iter()
            .map(|a| g.index_of(&g.neg(a).expect("element of g")).expect("element of g") as u32)
            .collect();
        CayleyTable { order, add, neg }
    }

    #[inline]
    pub(crate) fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub(crate) fn add(&self, a: u32, b: u32) -> u32 {
        self.add[a as usize * self.order + b as usize]
    }

    #[inline]
    pub(crate) fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    #[inline]
    pub(crate) fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub(crate) fn scale(&self, n: u32, a: u32) -> u32 {
        (0..n).fold(0, |acc, _| self.add(acc, a))
    }
}

/// A finite sequence over a group, i.e. an element of the free abelian
/// monoid on the group's elements.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GSequence {
    counts: BTreeMap<GroupElement, u32>,
}

impl GSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_elements<I: IntoIterator<Item = GroupElement>>(items: I) -> Self {
        let mut s = Self::new();
        for g in items {
            s.push(g, 1);
        }
        s
    }

    pub fn push(&mut self, g: GroupElement, multiplicity: u32) {
        if multiplicity > 0 {
            *self.counts.entry(g).or_insert(0) += multiplicity;
        }
    }

    pub fn count(&self, g: &GroupElement) -> u32 {
        self.counts.get(g).copied().unwrap_or(0)
    }

    /// `|S|`, the number of letters counted with multiplicity.
    pub fn len(&self) -> u32 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, u32)> {
        self.counts.iter().map(|(g, &c)| (g, c))
    }

    /// Letters with multiplicity, in ascending order.
    pub fn letters(&self) -> impl Iterator<Item = &GroupElement> {
        self.counts
            .iter()
            .flat_map(|(g, &c)| std::iter::repeat_n(g, c as usize))
    }

    /// The product `S·T` in the free monoid.
    pub fn concat(&self, other: &GSequence) -> GSequence {
        let mut out = self.clone();
        for (g, c) in other.iter() {
            out.push(g.clone(), c);
        }
        out
    }

    pub fn divides(&self, other: &GSequence) -> bool {
        self.iter().all(|(g, c)| other.count(g) >= c)
    }
}

/// `σ(S)`, the sum of all letters of `S` with multiplicity.
pub fn sigma(g: &FiniteAbelianGroup, s: &GSequence) -> Result<GroupElement> {
    s.iter().try_fold(g.zero(), |acc, (x, c)| {
        let term = g.scale(c as i64, x)?;
        g.add(&acc, &term)
    })
}

/// Set of nonempty subsequence sums of a sequence, as a bitset over element
/// indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct SumSet {
    words: Vec<u64>,
}

impl SumSet {
    fn empty(order: usize) -> Self {
        SumSet {
            words: vec![0; order.div_ceil(64).max(1)],
        }
    }

    #[inline]
    fn contains(&self, i: u32) -> bool {
        self.words[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    #[inline]
    fn insert(&mut self, i: u32) {
        self.words[(i / 64) as usize] |= 1 << (i % 64);
    }

    /// Sum set of `T·h` given the sum set of `T`.
    fn extend(&self, table: &CayleyTable, h: u32) -> SumSet {
        let mut out = self.clone();
        out.insert(h);
        for i in 0..table.order() as u32 {
            if self.contains(i) {
                out.insert(table.add(i, h));
            }
        }
        out
    }
}

/// Minimal zero-sum sequences over `g0` of length at most `max_len`.
///
/// A sorted sequence `T·h` with `h` its largest letter is a minimal zero-sum
/// sequence exactly when `T` is zero-sum free and `σ(T) + h = 0`, so the
/// search walks sorted zero-sum-free sequences and closes each one with the
/// unique letter that completes it.
pub fn minimal_zero_sum_sequences(
    g: &FiniteAbelianGroup,
    g0: &BTreeSet<GroupElement>,
    max_len: usize,
) -> Result<BTreeSet<GSequence>> {
    for x in g0 {
        g.check(x)?;
    }
    if g.order() > MAX_TABLE_ORDER {
        return Err(Error::ResourceCap {
            what: "zero-sum search",
            requested: g.order() as u64,
            limit: MAX_TABLE_ORDER as u64,
        });
    }
    let table = CayleyTable::new(g);
    let letters: Vec<u32> = g0.iter().map(|x| g.index_of(x).unwrap() as u32).collect();
    let mut found = BTreeSet::new();
    if max_len == 0 {
        return Ok(found);
    }
    let mut stack: Vec<u32> = Vec::new();
    let mut walker = ZsWalker {
        table: &table,
        letters: &letters,
        max_len,
        found: Vec::new(),
    };
    walker.walk(&mut stack, 0, 0, &SumSet::empty(g.order()));
    for seq in walker.found {
        found.insert(GSequence::from_elements(
            seq.into_iter().map(|i| g.element_at(i as usize)),
        ));
    }
    Ok(found)
}

const MAX_TABLE_ORDER: usize = 4096;

struct ZsWalker<'a> {
    table: &'a CayleyTable,
    letters: &'a [u32],
    max_len: usize,
    found: Vec<Vec<u32>>,
}

impl ZsWalker<'_> {
    /// `stack` is zero-sum free with sum `total`; letters are drawn from
    /// `letters[start..]` to keep sequences sorted.
    fn walk(&mut self, stack: &mut Vec<u32>, start: usize, total: u32, sums: &SumSet) {
        let closing = self.table.neg(total);
        if self.letters[start..].contains(&closing) {
            let mut seq = stack.clone();
            seq.push(closing);
            self.found.push(seq);
        }
        if stack.len() + 1 >= self.max_len {
            return;
        }
        for (k, &h) in self.letters.iter().enumerate().skip(start) {
            if h == 0 {
                continue;
            }
            let next = sums.extend(self.table, h);
            if next.contains(0) {
                continue;
            }
            stack.push(h);
            self.walk(stack, k, self.table.add(total, h), &next);
            stack.pop();
        }
    }
}

/// `D(G)` with the default group-size cap.
pub fn davenport_constant(g: &FiniteAbelianGroup) -> Result<usize> {
    davenport_constant_with_cap(g, DEFAULT_SEARCH_CAP)
}

/// `D(G) = 1 + max |T|` over zero-sum-free sequences `T`.
///
/// Breadth-first over sequence length. Two sorted sequences with the same
/// subsequence-sum set admit exactly the same extensions, so each level keeps
/// one state per sum set, remembering the smallest admissible next letter.
pub fn davenport_constant_with_cap(g: &FiniteAbelianGroup, cap: usize) -> Result<usize> {
    if g.order() > cap {
        return Err(Error::ResourceCap {
            what: "Davenport constant search",
            requested: g.order() as u64,
            limit: cap as u64,
        });
    }
    let table = CayleyTable::new(g);
    let order = g.order() as u32;
    let mut frontier: HashMap<SumSet, u32> = HashMap::new();
    frontier.insert(SumSet::empty(g.order()), 1);
    let mut longest = 0usize;
    loop {
        let mut next: HashMap<SumSet, u32> = HashMap::new();
        for (sums, &first) in &frontier {
            for h in first..order {
                let ext = sums.extend(&table, h);
                if ext.contains(0) {
                    continue;
                }
                next.entry(ext)
                    .and_modify(|m| *m = (*m).min(h))
                    .or_insert(h);
            }
        }
        if next.is_empty() {
            return Ok(longest + 1);
        }
        longest += 1;
        frontier = next;
    }
}
