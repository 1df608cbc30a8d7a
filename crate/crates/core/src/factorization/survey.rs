use std::collections::BTreeSet;
use std::fmt::Debug;
use std::hash::Hash;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ElementInvariants, FactorizationTable};

/// An element attaining a reported maximum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness<E> {
    pub element: E,
    pub value: u32,
}

/// Global invariants of a monoid restricted to the elements of a
/// [`FactorizationTable`]. Each maximum is a lower bound for the true
/// supremum and equals it once the table is large enough.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidInvariants<E> {
    pub elements: usize,
    pub half_factorial: bool,
    pub catenary: u32,
    pub monotone_catenary: u32,
    pub tame: u32,
    #[serde(with = "crate::ratio")]
    pub rho: Ratio<u32>,
    pub delta: BTreeSet<u32>,
    pub catenary_witness: Option<Witness<E>>,
    pub monotone_catenary_witness: Option<Witness<E>>,
    pub tame_witness: Option<Witness<E>>,
    pub rho_witness: Option<E>,
}

impl<E> MonoidInvariants<E> {
    pub fn min_delta(&self) -> Option<u32> {
        self.delta.first().copied()
    }
}

fn raise<E: Clone>(slot: &mut Option<Witness<E>>, best: &mut u32, value: u32, a: &E) {
    if value > *best {
        *best = value;
        *slot = Some(Witness {
            element: a.clone(),
            value,
        });
    }
}

/// Per-element invariants for every element of the table, in table order.
pub fn element_invariants<E>(table: &FactorizationTable<E>) -> Vec<ElementInvariants>
where
    E: Clone + Eq + Hash + Ord + Debug + Send + Sync,
{
    table
        .sets
        .par_iter()
        .map(|z| ElementInvariants::compute(z))
        .collect()
}

pub fn survey<E>(table: &FactorizationTable<E>) -> MonoidInvariants<E>
where
    E: Clone + Eq + Hash + Ord + Debug + Send + Sync,
{
    let per = element_invariants(table);
    let mut out = MonoidInvariants {
        elements: table.len(),
        half_factorial: true,
        catenary: 0,
        monotone_catenary: 0,
        tame: 0,
        rho: Ratio::from_integer(1),
        delta: BTreeSet::new(),
        catenary_witness: None,
        monotone_catenary_witness: None,
        tame_witness: None,
        rho_witness: None,
    };
    for (a, inv) in table.elements().iter().zip(&per) {
        out.half_factorial &= inv.lengths.len() <= 1;
        raise(&mut out.catenary_witness, &mut out.catenary, inv.catenary, a);
        raise(
            &mut out.monotone_catenary_witness,
            &mut out.monotone_catenary,
            inv.monotone_catenary,
            a,
        );
        raise(&mut out.tame_witness, &mut out.tame, inv.tame, a);
        if inv.rho > out.rho {
            out.rho = inv.rho;
            out.rho_witness = Some(a.clone());
        }
        out.delta.extend(inv.delta.iter().copied());
    }
    out
}
