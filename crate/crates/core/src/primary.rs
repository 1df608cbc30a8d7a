//! Reduced finitely primary monoids of rank one.
//!
//! Such a monoid sits inside `[p] × V` for a finite unit group `V` and is
//! described by its level sets `U_n = { u ∈ V : p^n u ∈ H }`. Only the
//! levels below the exponent `k` are stored; every `U_n` with `n ≥ k` is
//! all of `V`, and `U_0` is the trivial subgroup because `H` is reduced.

use std::collections::BTreeSet;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::abelian::{CayleyTable, FiniteAbelianGroup, GroupElement};
use crate::error::{Error, Result};
use crate::factorization::{survey, AtomTable, FactorizationTable, Monoid};

/// `p^valuation · unit`
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimaryElement {
    pub valuation: u32,
    pub unit: GroupElement,
}

#[derive(Clone, Debug)]
pub struct PrimaryMonoidSpec {
    units: FiniteAbelianGroup,
    exponent: u32,
    levels: Vec<BTreeSet<GroupElement>>,
    table: CayleyTable,
    member: Vec<Vec<bool>>,
}

impl PartialEq for PrimaryMonoidSpec {
    fn eq(&self, other: &Self) -> bool {
        self.units == other.units && self.exponent == other.exponent && self.levels == other.levels
    }
}

impl Eq for PrimaryMonoidSpec {}

/// Local invariants over the members of bounded valuation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalInvariants {
    pub max_valuation: u32,
    pub catenary: u32,
    pub monotone_catenary: u32,
    pub tame: u32,
    #[serde(with = "crate::ratio")]
    pub rho: Ratio<u32>,
    pub half_factorial: bool,
}

impl PrimaryMonoidSpec {
    /// Validates the level tables. `levels` lists `U_0, …, U_{k−1}`; a
    /// trailing `U_k` is accepted when it is the whole unit group.
    pub fn new(
        units: FiniteAbelianGroup,
        exponent: u32,
        mut levels: Vec<BTreeSet<GroupElement>>,
    ) -> Result<Self> {
        if exponent == 0 {
            return Err(Error::invalid("k", "exponent must be at least 1"));
        }
        let n = units.order();
        if levels.len() == exponent as usize + 1
            && levels.last().is_some_and(|last| last.len() == n)
        {
            levels.pop();
        }
        if levels.len() != exponent as usize {
            return Err(Error::invalid(
                "levels",
                format!("expected {exponent} level sets, found {}", levels.len()),
            ));
        }
        for (i, level) in levels.iter().enumerate() {
            if let Some(u) = level.iter().find(|u| !units.contains(u)) {
                return Err(Error::invalid(
                    format!("levels[{i}]"),
                    format!("{u} is not an element of {units}"),
                ));
            }
        }
        if levels[0].len() != 1 || !levels[0].contains(&units.zero()) {
            return Err(Error::invalid(
                "levels[0]",
                "the zeroth level must be exactly the identity",
            ));
        }
        let table = CayleyTable::new(&units);
        let member: Vec<Vec<bool>> = levels
            .iter()
            .map(|level| {
                let mut row = vec![false; n];
                for u in level {
                    row[units.index_of(u).expect("checked above")] = true;
                }
                row
            })
            .collect();
        let spec = PrimaryMonoidSpec {
            units,
            exponent,
            levels,
            table,
            member,
        };
        spec.check_closed()?;
        Ok(spec)
    }

    fn check_closed(&self) -> Result<()> {
        let k = self.exponent as usize;
        for i in 1..k {
            for j in i..k - i {
                for a in self.level_indices(i as u32) {
                    for b in self.level_indices(j as u32) {
                        let c = self.table.add(a, b);
                        if !self.member[i + j][c as usize] {
                            return Err(Error::invalid(
                                "levels",
                                format!(
                                    "U_{i}·U_{j} is not contained in U_{}: {} · {} = {}",
                                    i + j,
                                    self.units.element_at(a as usize),
                                    self.units.element_at(b as usize),
                                    self.units.element_at(c as usize),
                                ),
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Type `(1,1)`: every `p·u` is a member.
    pub fn exponent_one(units: FiniteAbelianGroup) -> Self {
        let zero = BTreeSet::from([units.zero()]);
        PrimaryMonoidSpec::new(units, 1, vec![zero]).expect("exponent one is always valid")
    }

    /// The half-factorial monoid whose levels are the powers `U_1^n`, with
    /// the smallest exponent for which `U_1^k` is the whole unit group.
    pub fn generated_by(units: FiniteAbelianGroup, first: BTreeSet<GroupElement>) -> Result<Self> {
        if let Some(u) = first.iter().find(|u| !units.contains(u)) {
            return Err(Error::invalid("levels[1]", format!("{u} is not a unit")));
        }
        let table = CayleyTable::new(&units);
        let n = units.order();
        let gens: Vec<u32> = first
            .iter()
            .map(|u| units.index_of(u).expect("checked") as u32)
            .collect();
        let mut levels = vec![BTreeSet::from([units.zero()])];
        let mut current: BTreeSet<u32> = gens.iter().copied().collect();
        let mut seen = Vec::new();
        while current.len() < n {
            if current.is_empty() || seen.contains(&current) {
                return Err(Error::Unsupported(
                    "the powers of U_1 never exhaust the unit group".into(),
                ));
            }
            seen.push(current.clone());
            levels.push(
                current
                    .iter()
                    .map(|&i| units.element_at(i as usize))
                    .collect(),
            );
            current = current
                .iter()
                .flat_map(|&a| gens.iter().map(move |&b| (a, b)))
                .map(|(a, b)| table.add(a, b))
                .collect();
        }
        let exponent = levels.len() as u32;
        PrimaryMonoidSpec::new(units, exponent, levels)
    }

    /// `units = C_k ⊕ C_k`, `U_1 = {1, e1, e2}`, levels generated by `U_1`:
    /// a half-factorial monoid with catenary degree `k`.
    pub fn sharp_example(k: u32) -> Result<Self> {
        let units = FiniteAbelianGroup::new(vec![k, k])?;
        let first = BTreeSet::from([
            units.element(&[0, 0])?,
            units.element(&[1, 0])?,
            units.element(&[0, 1])?,
        ]);
        Self::generated_by(units, first)
    }

    pub fn units(&self) -> &FiniteAbelianGroup {
        &self.units
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// `U_0, …, U_{k−1}`
    pub fn levels(&self) -> &[BTreeSet<GroupElement>] {
        &self.levels
    }

    /// `U_n` for any `n`.
    pub fn level(&self, n: u32) -> BTreeSet<GroupElement> {
        match self.levels.get(n as usize) {
            Some(level) => level.clone(),
            None => self.units.elements().collect(),
        }
    }

    pub(crate) fn table(&self) -> &CayleyTable {
        &self.table
    }

    pub(crate) fn level_indices(&self, n: u32) -> impl Iterator<Item = u32> + '_ {
        let row = self.member.get(n as usize);
        (0..self.units.order() as u32).filter(move |&u| row.is_none_or(|r| r[u as usize]))
    }

    #[inline]
    pub(crate) fn is_member_index(&self, n: u32, u: u32) -> bool {
        match self.member.get(n as usize) {
            Some(row) => row[u as usize],
            None => true,
        }
    }

    pub fn is_member(&self, n: u32, u: &GroupElement) -> bool {
        match self.units.index_of(u) {
            Ok(i) => self.is_member_index(n, i as u32),
            Err(_) => false,
        }
    }

    pub fn contains(&self, e: &PrimaryElement) -> bool {
        self.is_member(e.valuation, &e.unit)
    }

    /// Index pairs `(valuation, unit index)` of the atoms, ascending. Every
    /// member of valuation at least `2k` splits off `p^k`, so the search
    /// stops at `2k − 1`.
    pub(crate) fn atom_indices(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for n in 1..2 * self.exponent {
            for u in self.level_indices(n) {
                let splits = (1..n).any(|a| {
                    self.level_indices(a)
                        .any(|v| self.is_member_index(n - a, self.table.sub(u, v)))
                });
                if !splits {
                    out.push((n, u));
                }
            }
        }
        out
    }

    pub fn atoms(&self) -> BTreeSet<PrimaryElement> {
        self.atom_indices()
            .into_iter()
            .map(|(valuation, u)| PrimaryElement {
                valuation,
                unit: self.units.element_at(u as usize),
            })
            .collect()
    }

    /// Every atom has valuation one.
    pub fn is_half_factorial(&self) -> bool {
        self.atom_indices().iter().all(|&(n, _)| n == 1)
    }

    /// `U_1^l = U_l` for every `l ∈ [1, k]`; equivalent to half-factoriality.
    pub fn levels_are_powers_of_first(&self) -> bool {
        let first: Vec<u32> = self.level_indices(1).collect();
        let mut power: BTreeSet<u32> = first.iter().copied().collect();
        for l in 1..=self.exponent {
            let expected: BTreeSet<u32> = self.level_indices(l).collect();
            if power != expected {
                return false;
            }
            power = power
                .iter()
                .flat_map(|&a| first.iter().map(move |&b| (a, b)))
                .map(|(a, b)| self.table.add(a, b))
                .collect();
        }
        true
    }

    /// All members with valuation at most `max_valuation`, ordered by
    /// valuation and unit index.
    pub(crate) fn members_up_to(&self, max_valuation: u32) -> Vec<(u32, u32)> {
        (0..=max_valuation)
            .flat_map(|n| self.level_indices(n).map(move |u| (n, u)))
            .collect()
    }

    /// Catenary, monotone catenary and tame degree over the members of
    /// valuation at most `max_valuation`, which must be at least `2k`.
    pub fn local_invariants(&self, max_valuation: u32) -> Result<LocalInvariants> {
        if max_valuation < 2 * self.exponent {
            return Err(Error::invalid(
                "max_valuation",
                format!("must be at least 2k = {}", 2 * self.exponent),
            ));
        }
        let atoms = AtomTable::new(self.atom_indices());
        let table = FactorizationTable::build(self, &atoms, self.members_up_to(max_valuation))?;
        let s = survey(&table);
        Ok(LocalInvariants {
            max_valuation,
            catenary: s.catenary,
            monotone_catenary: s.monotone_catenary,
            tame: s.tame,
            rho: s.rho,
            half_factorial: s.half_factorial,
        })
    }

    /// Valuation bound used when no explicit bound is given: enough for the
    /// local invariants of the monoids handled here to stabilise.
    pub fn default_max_valuation(&self) -> u32 {
        (3 * self.exponent).max(4)
    }
}

impl Monoid for PrimaryMonoidSpec {
    type Elem = (u32, u32);

    fn identity(&self) -> (u32, u32) {
        (0, 0)
    }

    fn mul(&self, a: &(u32, u32), b: &(u32, u32)) -> (u32, u32) {
        (a.0 + b.0, self.table.add(a.1, b.1))
    }

    fn div(&self, a: &(u32, u32), b: &(u32, u32)) -> Option<(u32, u32)> {
        let n = a.0.checked_sub(b.0)?;
        let u = self.table.sub(a.1, b.1);
        self.is_member_index(n, u).then_some((n, u))
    }

    fn degree(&self, a: &(u32, u32)) -> u32 {
        a.0
    }
}
