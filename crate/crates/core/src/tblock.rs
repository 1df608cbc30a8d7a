//! The ambient monoid `F(G) × D_1 × … × D_r` and its T-block submonoid.
//!
//! An instance fixes a class group `G`, one free prime per class and a list
//! of finitely primary components with a class map `ι`. An ambient element
//! is a block when the class of its free part plus the classes of its
//! component parts vanish.
//!
//! Internally elements are flat coordinate vectors ([`Coords`]): the
//! multiplicity of every group element in the free part (indexed as in
//! [`FiniteAbelianGroup::elements`]), then `(valuation, unit index)` for each
//! component. Canonical order is by degree, then by coordinates.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use serde_json::Value;
use sha2::{Digest, Sha256};
use smallvec::SmallVec;

use crate::abelian::{
    davenport_constant, CayleyTable, FiniteAbelianGroup, GSequence, GroupElement,
};
use crate::config;
use crate::error::{Error, Result};
use crate::factorization::{AtomTable, FactorizationTable, Monoid};
use crate::primary::{PrimaryElement, PrimaryMonoidSpec};

pub type Coords = SmallVec<[u16; 16]>;

/// Upper bound on the number of elements a single enumeration may produce.
pub const MAX_ENUMERATED: usize = 4_000_000;

/// Default degree bound for monoid-level computations.
pub const DEFAULT_CAP: u32 = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AmbientElement {
    pub free: GSequence,
    pub parts: Vec<PrimaryElement>,
}

/// An ambient element satisfying the block condition.
pub type BElement = AmbientElement;

impl AmbientElement {
    pub fn degree(&self) -> u32 {
        self.free.len() + self.parts.iter().map(|p| p.valuation).sum::<u32>()
    }
}

/// One finitely primary component together with its class map.
#[derive(Clone, Debug)]
pub struct Component {
    primary: PrimaryMonoidSpec,
    iota_p: GroupElement,
    iota_units: Vec<GroupElement>,
    iota_p_index: u32,
    unit_class: Vec<u32>,
}

impl PartialEq for Component {
    fn eq(&self, other: &Self) -> bool {
        self.primary == other.primary
            && self.iota_p == other.iota_p
            && self.iota_units == other.iota_units
    }
}

impl Eq for Component {}

impl Component {
    /// `iota_units[j]` is the class of the `j`-th cyclic generator of the
    /// unit group; its order must divide that generator's order.
    pub fn new(
        group: &FiniteAbelianGroup,
        primary: PrimaryMonoidSpec,
        iota_p: GroupElement,
        iota_units: Vec<GroupElement>,
    ) -> Result<Self> {
        if !group.contains(&iota_p) {
            return Err(Error::invalid("iota_p", format!("{iota_p} is not in {group}")));
        }
        let moduli = primary.units().moduli().to_vec();
        if iota_units.len() != moduli.len() {
            return Err(Error::invalid(
                "iota_units",
                format!(
                    "expected one image per cyclic factor ({}), found {}",
                    moduli.len(),
                    iota_units.len()
                ),
            ));
        }
        for (j, (img, &n)) in iota_units.iter().zip(&moduli).enumerate() {
            let path = format!("iota_units[{j}]");
            if !group.contains(img) {
                return Err(Error::invalid(path, format!("{img} is not in {group}")));
            }
            if group.scale(n as i64, img)? != group.zero() {
                return Err(Error::invalid(
                    path,
                    format!("order of {img} does not divide {n}"),
                ));
            }
        }
        let unit_class = primary
            .units()
            .elements()
            .map(|u| {
                let mut acc = group.zero();
                for (&c, img) in u.residues().iter().zip(&iota_units) {
                    acc = group.add(&acc, &group.scale(c as i64, img)?)?;
                }
                Ok(group.index_of(&acc)? as u32)
            })
            .collect::<Result<Vec<u32>>>()?;
        Ok(Component {
            iota_p_index: group.index_of(&iota_p)? as u32,
            primary,
            iota_p,
            iota_units,
            unit_class,
        })
    }

    pub fn primary(&self) -> &PrimaryMonoidSpec {
        &self.primary
    }

    pub fn iota_p(&self) -> &GroupElement {
        &self.iota_p
    }

    pub fn iota_units(&self) -> &[GroupElement] {
        &self.iota_units
    }

    /// Class index of `p^v · u` for a unit index `u`.
    #[inline]
    pub(crate) fn class(&self, table: &CayleyTable, v: u32, u: u32) -> u32 {
        table.add(table.scale(v, self.iota_p_index), self.unit_class[u as usize])
    }
}

#[derive(Clone, Debug)]
pub struct InstanceSpec {
    group: FiniteAbelianGroup,
    components: Vec<Component>,
    table: CayleyTable,
    davenport: OnceLock<std::result::Result<usize, Error>>,
}

impl PartialEq for InstanceSpec {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.components == other.components
    }
}

impl Eq for InstanceSpec {}

impl InstanceSpec {
    /// Components of exponent one must precede all others.
    pub fn new(group: FiniteAbelianGroup, components: Vec<Component>) -> Result<Self> {
        if let Some(i) = components
            .windows(2)
            .position(|w| w[0].primary.exponent() > 1 && w[1].primary.exponent() == 1)
        {
            return Err(Error::invalid(
                format!("components[{}].k", i + 1),
                "components of exponent 1 must be listed first",
            ));
        }
        if group.order() > u16::MAX as usize {
            return Err(Error::ResourceCap {
                what: "group order",
                requested: group.order() as u64,
                limit: u16::MAX as u64,
            });
        }
        let table = CayleyTable::new(&group);
        Ok(InstanceSpec {
            group,
            components,
            table,
            davenport: OnceLock::new(),
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value =
            serde_json::from_str(text).map_err(|e| Error::invalid("$", e.to_string()))?;
        config::parse_instance(&v)
    }

    pub fn to_json(&self) -> Value {
        config::instance_to_json(self)
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(&self.to_json()).expect("serializable");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub(crate) fn group_table(&self) -> &CayleyTable {
        &self.table
    }

    /// `D(G)`, computed once.
    pub fn davenport(&self) -> Result<usize> {
        self.davenport
            .get_or_init(|| davenport_constant(&self.group))
            .clone()
    }

    fn width(&self) -> usize {
        self.group.order() + 2 * self.components.len()
    }

    #[inline]
    pub(crate) fn part_offset(&self, i: usize) -> usize {
        self.group.order() + 2 * i
    }

    pub fn identity_element(&self) -> AmbientElement {
        AmbientElement {
            free: GSequence::new(),
            parts: self
                .components
                .iter()
                .map(|c| PrimaryElement {
                    valuation: 0,
                    unit: c.primary.units().zero(),
                })
                .collect(),
        }
    }

    /// `ι_i(p^n u) = n·ι(p_i) + ι_i(u)`
    pub fn iota_value(&self, i: usize, e: &PrimaryElement) -> Result<GroupElement> {
        let c = self
            .components
            .get(i)
            .ok_or_else(|| Error::Structural(format!("no component {i}")))?;
        let u = c.primary.units().index_of(&e.unit)? as u32;
        Ok(self
            .group
            .element_at(c.class(&self.table, e.valuation, u) as usize))
    }

    pub fn encode(&self, a: &AmbientElement) -> Result<Coords> {
        if a.parts.len() != self.components.len() {
            return Err(Error::Structural(format!(
                "element has {} parts, instance has {} components",
                a.parts.len(),
                self.components.len()
            )));
        }
        let mut out: Coords = SmallVec::from_elem(0, self.width());
        for (g, n) in a.free.iter() {
            let idx = self.group.index_of(g)?;
            out[idx] = u16::try_from(n)
                .map_err(|_| Error::Structural(format!("multiplicity {n} too large")))?;
        }
        for (i, (p, c)) in a.parts.iter().zip(&self.components).enumerate() {
            if !c.primary.contains(p) {
                return Err(Error::Structural(format!(
                    "part {i}: p^{}·{} is not in the component monoid",
                    p.valuation, p.unit
                )));
            }
            let off = self.part_offset(i);
            out[off] = u16::try_from(p.valuation)
                .map_err(|_| Error::Structural(format!("valuation {} too large", p.valuation)))?;
            out[off + 1] = c.primary.units().index_of(&p.unit)? as u16;
        }
        Ok(out)
    }

    pub fn decode(&self, a: &Coords) -> AmbientElement {
        let mut free = GSequence::new();
        for (idx, &n) in a[..self.group.order()].iter().enumerate() {
            if n > 0 {
                free.push(self.group.element_at(idx), n as u32);
            }
        }
        let parts = self
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let off = self.part_offset(i);
                PrimaryElement {
                    valuation: a[off] as u32,
                    unit: c.primary.units().element_at(a[off + 1] as usize),
                }
            })
            .collect();
        AmbientElement { free, parts }
    }

    /// Class index of `σ(S) + ι(t)`.
    pub(crate) fn class_of(&self, a: &Coords) -> u32 {
        let mut acc = 0;
        for (idx, &n) in a[..self.group.order()].iter().enumerate() {
            acc = self.table.add(acc, self.table.scale(n as u32, idx as u32));
        }
        for (i, c) in self.components.iter().enumerate() {
            let off = self.part_offset(i);
            acc = self
                .table
                .add(acc, c.class(&self.table, a[off] as u32, a[off + 1] as u32));
        }
        acc
    }

    pub fn is_block(&self, a: &AmbientElement) -> Result<bool> {
        Ok(self.class_of(&self.encode(a)?) == 0)
    }

    fn encode_block(&self, a: &AmbientElement) -> Result<Coords> {
        let c = self.encode(a)?;
        if self.class_of(&c) != 0 {
            return Err(Error::Structural(format!(
                "{} is not a block",
                config::ambient_to_json(a)
            )));
        }
        Ok(c)
    }

    /// Whether `a` divides `b` inside the block monoid.
    pub fn divides(&self, a: &AmbientElement, b: &AmbientElement) -> Result<bool> {
        let (a, b) = (self.encode_block(a)?, self.encode_block(b)?);
        Ok(self.div(&b, &a).is_some())
    }

    /// Number of free letters plus the sum of valuations.
    pub fn coords_degree(&self, a: &Coords) -> u32 {
        let n = self.group.order();
        let free: u32 = a[..n].iter().map(|&x| x as u32).sum();
        let vals: u32 = (0..self.components.len())
            .map(|i| a[self.part_offset(i)] as u32)
            .sum();
        free + vals
    }

    /// Whether the free letter `0` occurs.
    pub fn has_zero_letter(&self, a: &Coords) -> bool {
        a[0] > 0
    }

    /// All blocks of degree at most `max_degree` in canonical order. Blocks
    /// containing the prime letter `0` are skipped unless `include_zero`.
    pub fn enumerate_b(&self, max_degree: u32, include_zero: bool) -> Result<Vec<Coords>> {
        let mut walker = Enumerator {
            inst: self,
            out: Vec::new(),
            current: SmallVec::from_elem(0, self.width()),
            first_letter: if include_zero { 0 } else { 1 },
        };
        walker.free(walker.first_letter, max_degree, 0)?;
        let mut out = walker.out;
        out.sort_by_cached_key(|a| (self.coords_degree(a), a.clone()));
        Ok(out)
    }

    /// Decoded form of [`InstanceSpec::enumerate_b`].
    pub fn enumerate_elements(
        &self,
        max_degree: u32,
        include_zero: bool,
    ) -> Result<Vec<AmbientElement>> {
        Ok(self
            .enumerate_b(max_degree, include_zero)?
            .iter()
            .map(|a| self.decode(a))
            .collect())
    }

    /// Degree below which every atom lies: a block atom is a product of at
    /// most `D(G)` ambient atoms.
    pub fn atom_degree_bound(&self) -> Result<u32> {
        let local = self
            .components
            .iter()
            .flat_map(|c| c.primary.atom_indices())
            .map(|(v, _)| v)
            .max()
            .unwrap_or(1);
        Ok(self.davenport()? as u32 * local.max(1))
    }

    /// Atoms by exhaustive search, canonical order; the prime `0` included.
    pub fn atoms_generic_coords(&self) -> Result<Vec<Coords>> {
        let elements = self.enumerate_b(self.atom_degree_bound()?, true)?;
        let mut atoms: Vec<Coords> = Vec::new();
        for a in elements {
            if self.coords_degree(&a) == 0 {
                continue;
            }
            if !atoms.iter().any(|u| self.div(&a, u).is_some()) {
                atoms.push(a);
            }
        }
        Ok(atoms)
    }

    pub fn atoms_generic(&self) -> Result<BTreeSet<AmbientElement>> {
        Ok(self
            .atoms_generic_coords()?
            .iter()
            .map(|a| self.decode(a))
            .collect())
    }

    fn require_closed_form(&self) -> Result<()> {
        if self.group.order() != 2 {
            return Err(Error::Unsupported(format!(
                "closed-form atoms need a class group of order 2, found {}",
                self.group
            )));
        }
        if let Some(i) = self
            .components
            .iter()
            .position(|c| !c.primary.is_half_factorial())
        {
            return Err(Error::Unsupported(format!(
                "component {i} is not half-factorial"
            )));
        }
        Ok(())
    }

    /// For a class group of order two and half-factorial components the
    /// atoms are exactly: the prime `0`; `g²`; `p_i ε` of class `0`;
    /// `p_i ε · g` with `p_i ε` of class `g`; `p_i² ε` of class `0` that is
    /// not a product of two class-`0` elements `p_i ε'`; and `p_i ε_i · p_j ε_j`
    /// with `i < j` and both factors of class `g`.
    pub fn atoms_closed_form_coords(&self) -> Result<Vec<Coords>> {
        self.require_closed_form()?;
        let t = &self.table;
        let base: Coords = SmallVec::from_elem(0, self.width());
        let mut out = Vec::new();
        let mut zero = base.clone();
        zero[0] = 1;
        out.push(zero);
        let mut gg = base.clone();
        gg[1] = 2;
        out.push(gg);
        let fibres: Vec<(Vec<u32>, Vec<u32>)> = self
            .components
            .iter()
            .map(|c| {
                c.primary
                    .level_indices(1)
                    .partition(|&u| c.class(t, 1, u) == 0)
            })
            .collect();
        for (i, c) in self.components.iter().enumerate() {
            let off = self.part_offset(i);
            let (even, odd) = &fibres[i];
            for &u in even {
                let mut a = base.clone();
                a[off] = 1;
                a[off + 1] = u as u16;
                out.push(a);
            }
            for &u in odd {
                let mut a = base.clone();
                a[1] = 1;
                a[off] = 1;
                a[off + 1] = u as u16;
                out.push(a);
            }
            let units = c.primary.table();
            let products: BTreeSet<u32> = even
                .iter()
                .flat_map(|&x| even.iter().map(move |&y| units.add(x, y)))
                .collect();
            for e in c.primary.level_indices(2) {
                if c.class(t, 2, e) == 0 && !products.contains(&e) {
                    let mut a = base.clone();
                    a[off] = 2;
                    a[off + 1] = e as u16;
                    out.push(a);
                }
            }
        }
        for i in 0..self.components.len() {
            for j in i + 1..self.components.len() {
                let (oi, oj) = (self.part_offset(i), self.part_offset(j));
                for &x in &fibres[i].1 {
                    for &y in &fibres[j].1 {
                        let mut a = base.clone();
                        a[oi] = 1;
                        a[oi + 1] = x as u16;
                        a[oj] = 1;
                        a[oj + 1] = y as u16;
                        out.push(a);
                    }
                }
            }
        }
        out.sort_by_cached_key(|a| (self.coords_degree(a), a.clone()));
        Ok(out)
    }

    pub fn atoms_closed_form(&self) -> Result<BTreeSet<AmbientElement>> {
        Ok(self
            .atoms_closed_form_coords()?
            .iter()
            .map(|a| self.decode(a))
            .collect())
    }

    /// Atoms and factorization sets for every block of degree at most
    /// `cap`. Without `include_zero` the prime `0` and all blocks it divides
    /// are left out.
    pub fn block_table(&self, cap: u32, include_zero: bool) -> Result<BlockTable> {
        let atoms: Vec<Coords> = self
            .atoms_generic_coords()?
            .into_iter()
            .filter(|a| include_zero || !self.has_zero_letter(a))
            .collect();
        let atoms = AtomTable::new(atoms);
        let elements = self.enumerate_b(cap, include_zero)?;
        let factorizations = FactorizationTable::build(self, &atoms, elements)?;
        Ok(BlockTable {
            cap,
            include_zero,
            atoms,
            factorizations,
        })
    }
}

/// Atoms and factorization sets of the blocks up to a degree cap.
#[derive(Clone, Debug)]
pub struct BlockTable {
    pub cap: u32,
    pub include_zero: bool,
    pub atoms: AtomTable<Coords>,
    pub factorizations: FactorizationTable<Coords>,
}

struct Enumerator<'a> {
    inst: &'a InstanceSpec,
    out: Vec<Coords>,
    current: Coords,
    first_letter: usize,
}

impl Enumerator<'_> {
    fn push(&mut self) -> Result<()> {
        if self.out.len() >= MAX_ENUMERATED {
            return Err(Error::ResourceCap {
                what: "enumerated blocks",
                requested: self.out.len() as u64 + 1,
                limit: MAX_ENUMERATED as u64,
            });
        }
        self.out.push(self.current.clone());
        Ok(())
    }

    fn free(&mut self, letter: usize, budget: u32, class: u32) -> Result<()> {
        let n = self.inst.group.order();
        if letter == n {
            return self.part(0, budget, class);
        }
        let t = &self.inst.table;
        let mut class = class;
        for count in 0..=budget {
            self.current[letter] = count as u16;
            self.free(letter + 1, budget - count, class)?;
            class = t.add(class, letter as u32);
        }
        self.current[letter] = 0;
        Ok(())
    }

    fn part(&mut self, i: usize, budget: u32, class: u32) -> Result<()> {
        let inst = self.inst;
        if i == inst.components.len() {
            return if class == 0 { self.push() } else { Ok(()) };
        }
        let c = &inst.components[i];
        let off = inst.part_offset(i);
        for v in 0..=budget {
            for u in c.primary.level_indices(v) {
                self.current[off] = v as u16;
                self.current[off + 1] = u as u16;
                let cls = inst.table.add(class, c.class(&inst.table, v, u));
                self.part(i + 1, budget - v, cls)?;
            }
        }
        self.current[off] = 0;
        self.current[off + 1] = 0;
        Ok(())
    }
}

impl Monoid for InstanceSpec {
    type Elem = Coords;

    fn identity(&self) -> Coords {
        SmallVec::from_elem(0, self.width())
    }

    fn mul(&self, a: &Coords, b: &Coords) -> Coords {
        let mut out = a.clone();
        let n = self.group.order();
        for idx in 0..n {
            out[idx] += b[idx];
        }
        for (i, c) in self.components.iter().enumerate() {
            let off = self.part_offset(i);
            out[off] += b[off];
            out[off + 1] = c
                .primary
                .table()
                .add(a[off + 1] as u32, b[off + 1] as u32) as u16;
        }
        out
    }

    fn div(&self, a: &Coords, b: &Coords) -> Option<Coords> {
        let mut out = a.clone();
        let n = self.group.order();
        for idx in 0..n {
            out[idx] = a[idx].checked_sub(b[idx])?;
        }
        for (i, c) in self.components.iter().enumerate() {
            let off = self.part_offset(i);
            let v = a[off].checked_sub(b[off])?;
            let u = c.primary.table().sub(a[off + 1] as u32, b[off + 1] as u32);
            if !c.primary.is_member_index(v as u32, u) {
                return None;
            }
            out[off] = v;
            out[off + 1] = u as u16;
        }
        Some(out)
    }

    fn degree(&self, a: &Coords) -> u32 {
        self.coords_degree(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::minimal_zero_sum_sequences;
    use serde_json::json;

    fn inst(v: Value) -> InstanceSpec {
        config::parse_instance(&v).unwrap()
    }

    fn k1() -> InstanceSpec {
        inst(json!({"group": [2], "components": [
            {"units": [2], "k": 1, "levels": [["0"]], "iota_p": [1], "iota_units": [[1]]}
        ]}))
    }

    #[test]
    fn iota_examples() {
        let i = k1();
        let c2 = i.group().clone();
        let u0 = PrimaryElement { valuation: 0, unit: c2.zero() };
        assert_eq!(i.iota_value(0, &u0).unwrap(), c2.zero());
        let p2 = PrimaryElement { valuation: 2, unit: c2.zero() };
        assert_eq!(i.iota_value(0, &p2).unwrap(), c2.zero());
        let pu = PrimaryElement { valuation: 1, unit: c2.element(&[1]).unwrap() };
        assert_eq!(i.iota_value(0, &pu).unwrap(), c2.zero());
        let units_only = inst(json!({"group": [2], "components": [
            {"units": [2], "k": 1, "levels": [["0"]], "iota_p": [0], "iota_units": [[1]]}
        ]}));
        assert_eq!(units_only.iota_value(0, &pu).unwrap(), c2.element(&[1]).unwrap());
    }

    #[test]
    fn block_condition() {
        let i = inst(json!({"group": [2]}));
        let g = i.group().element(&[1]).unwrap();
        assert!(i.is_block(&i.identity_element()).unwrap());
        let gg = AmbientElement { free: GSequence::from_elements([g.clone(), g.clone()]), parts: vec![] };
        assert!(i.is_block(&gg).unwrap());
        let single = AmbientElement { free: GSequence::from_elements([g]), parts: vec![] };
        assert!(!i.is_block(&single).unwrap());
    }

    #[test]
    fn enumerate_small_block_monoid() {
        let i = inst(json!({"group": [2]}));
        assert_eq!(i.enumerate_b(0, true).unwrap().len(), 1);
        let all = i.enumerate_b(2, true).unwrap();
        // 1, 0, g², 0²
        assert_eq!(all.len(), 4);
        assert_eq!(i.enumerate_b(2, false).unwrap().len(), 2);
        for w in all.windows(2) {
            assert!((i.coords_degree(&w[0]), &w[0]) < (i.coords_degree(&w[1]), &w[1]));
        }
    }

    /// Zero-sum sequences over C_n of length ≤ d, by counting multisets of
    /// residues with a given sum directly.
    fn zero_sum_count(n: u32, d: u32) -> usize {
        fn go(n: u32, letter: u32, budget: u32, sum: u32) -> usize {
            if letter == n {
                return usize::from(sum.is_multiple_of(n));
            }
            (0..=budget)
                .map(|c| go(n, letter + 1, budget - c, (sum + c * letter) % n))
                .sum()
        }
        go(n, 0, d, 0)
    }

    #[test]
    fn enumeration_counts_match_direct_count() {
        for (n, d) in [(2, 6), (3, 5), (4, 5), (5, 4)] {
            let i = inst(json!({"group": [n]}));
            assert_eq!(i.enumerate_b(d, true).unwrap().len(), zero_sum_count(n, d), "C{n}, d={d}");
        }
    }

    #[test]
    fn generic_atoms_of_block_monoid_are_minimal_zero_sum_sequences() {
        let i = inst(json!({"group": [3]}));
        let g = i.group().clone();
        let all: BTreeSet<GroupElement> = g.elements().collect();
        let expected = minimal_zero_sum_sequences(&g, &all, 3).unwrap();
        let atoms: BTreeSet<GSequence> = i.atoms_generic().unwrap().into_iter().map(|a| a.free).collect();
        assert_eq!(atoms, expected);
        assert_eq!(atoms.len(), 4);
    }

    #[test]
    fn trivial_group_atoms() {
        let i = inst(json!({"group": [1], "components": [
            {"units": [1], "k": 1, "levels": [["0"]], "iota_p": [0]}
        ]}));
        let atoms = i.atoms_generic().unwrap();
        // the prime 0 and p·1
        assert_eq!(atoms.len(), 2);
        assert!(atoms.iter().any(|a| a.free.is_empty() && a.parts[0].valuation == 1));
    }

    #[test]
    fn closed_form_matches_generic() {
        let i = k1();
        assert_eq!(i.atoms_closed_form().unwrap(), i.atoms_generic().unwrap());
        let bare = inst(json!({"group": [2]}));
        assert_eq!(bare.atoms_closed_form().unwrap().len(), 2);
        assert_eq!(bare.atoms_closed_form().unwrap(), bare.atoms_generic().unwrap());
        // unit group larger than the class group: products of units must be
        // taken in the unit group
        let c4 = inst(json!({"group": [2], "components": [
            {"units": [4], "k": 2, "levels": [["0"], ["1", "2", "3"]], "iota_p": [0], "iota_units": [[1]]}
        ]}));
        assert_eq!(c4.atoms_closed_form().unwrap(), c4.atoms_generic().unwrap());
    }

    #[test]
    fn closed_form_example_atoms() {
        // units C2 = {1, u}, ι(p) = ι(u) = g: p·u has class 0, p·1 has class g
        let i = k1();
        let atoms = i.atoms_closed_form().unwrap();
        let c2 = i.group().clone();
        let g = c2.element(&[1]).unwrap();
        let pu = AmbientElement {
            free: GSequence::new(),
            parts: vec![PrimaryElement { valuation: 1, unit: g.clone() }],
        };
        let p1g = AmbientElement {
            free: GSequence::from_elements([g.clone()]),
            parts: vec![PrimaryElement { valuation: 1, unit: c2.zero() }],
        };
        assert!(atoms.contains(&pu));
        assert!(atoms.contains(&p1g));
        // p²·u has class g, so it is not a block at all
        assert!(!atoms.iter().any(|a| a.parts[0].valuation == 2));
    }

    #[test]
    fn closed_form_rejects_other_groups() {
        let i = inst(json!({"group": [3]}));
        assert!(matches!(i.atoms_closed_form(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn zero_is_prime_and_divisibility_is_saturated() {
        let i = inst(json!({"group": [2], "components": [
            {"units": [2], "k": 1, "levels": [["0"]], "iota_p": [0], "iota_units": [[1]]},
            {"units": [2], "k": 1, "levels": [["0"]], "iota_p": [1], "iota_units": [[0]]}
        ]}));
        let elems = i.enumerate_b(4, true).unwrap();
        let zero_letter = |a: &Coords| i.has_zero_letter(a);
        for a in &elems {
            for b in &elems {
                if i.coords_degree(a) + i.coords_degree(b) > 4 {
                    continue;
                }
                let ab = i.mul(a, b);
                if zero_letter(&ab) {
                    assert!(zero_letter(a) || zero_letter(b));
                }
                // ambient divisibility of a into ab gives block divisibility
                assert_eq!(i.div(&ab, a).as_ref(), Some(b));
            }
        }
    }

    #[test]
    fn divides_examples() {
        let i = k1();
        let all = i.enumerate_elements(3, true).unwrap();
        let id = i.identity_element();
        for b in &all {
            assert!(i.divides(&id, b).unwrap());
            assert!(i.divides(b, b).unwrap());
        }
        let not_block = AmbientElement {
            free: GSequence::from_elements([i.group().element(&[1]).unwrap()]),
            parts: vec![PrimaryElement { valuation: 0, unit: i.group().zero() }],
        };
        assert!(i.divides(&not_block, &id).is_err());
    }

    #[test]
    fn exponent_order_is_enforced() {
        let err = config::parse_instance(&json!({"group": [2], "components": [
            {"units": [2], "k": 2, "levels": [["0"], ["0"]], "iota_p": [0], "iota_units": [[0]]},
            {"units": [2], "k": 1, "levels": [["0"]], "iota_p": [0], "iota_units": [[0]]}
        ]}))
        .unwrap_err();
        assert!(matches!(err, Error::Invalid { path, .. } if path == "components[1].k"));
    }

    #[test]
    fn digest_is_stable() {
        let a = k1();
        let b = InstanceSpec::from_json_str(&serde_json::to_string(&a.to_json()).unwrap()).unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
        assert_ne!(a.digest(), inst(json!({"group": [2]})).digest());
    }
}
