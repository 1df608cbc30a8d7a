//! Closed-form predictions for T-block monoids built from half-factorial
//! finitely primary components of type `(1, k)`.
//!
//! Fibre convention: for a component `i` the set `U_1` is split by the class
//! of the whole atom `p_i ε`, not of the unit `ε` alone. So
//! `(U_1)_h = {ε ∈ U_1 : ι(p_i ε) = h}`.
//!
//! A component with trivial unit group is factorial and acts as one more
//! prime of its class. Such components are set aside before the case table
//! is consulted; when nothing else is left the monoid is either factorial or
//! a block monoid over `C2` with several primes in the non-zero class.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primary::LocalInvariants;
use crate::tblock::{Component, InstanceSpec};

/// Prediction for an integer-valued invariant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Bound {
    Exact { value: u32 },
    Interval { lo: u32, hi: u32 },
    AtLeast { lo: u32 },
    Unknown,
}

impl Bound {
    pub fn exact(&self) -> Option<u32> {
        match self {
            Bound::Exact { value } => Some(*value),
            _ => None,
        }
    }

    pub fn admits(&self, v: u32) -> Option<bool> {
        match *self {
            Bound::Exact { value } => Some(v == value),
            Bound::Interval { lo, hi } => Some(lo <= v && v <= hi),
            Bound::AtLeast { lo } => Some(lo <= v),
            Bound::Unknown => None,
        }
    }

    fn is_populated(&self) -> bool {
        *self != Bound::Unknown
    }
}

/// Prediction for the elasticity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RhoBound {
    Exact {
        #[serde(with = "crate::ratio")]
        value: Ratio<u32>,
    },
    /// `lo ≤ ρ` (or `lo < ρ` when `lo_strict`) and `ρ ≤ hi` when `hi` is set.
    Interval {
        #[serde(with = "crate::ratio")]
        lo: Ratio<u32>,
        lo_strict: bool,
        #[serde(with = "crate::ratio::option")]
        hi: Option<Ratio<u32>>,
    },
    Unknown,
}

impl RhoBound {
    pub fn admits(&self, v: Ratio<u32>) -> Option<bool> {
        match self {
            RhoBound::Exact { value } => Some(v == *value),
            RhoBound::Interval { lo, lo_strict, hi } => {
                let above = if *lo_strict { v > *lo } else { v >= *lo };
                Some(above && hi.is_none_or(|h| v <= h))
            }
            RhoBound::Unknown => None,
        }
    }
}

/// Prediction for the set of distances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeltaBound {
    Exact { set: BTreeSet<u32> },
    Subset { of: BTreeSet<u32> },
    /// non-empty with the given minimum
    MinIs { value: u32 },
    Unknown,
}

impl DeltaBound {
    pub fn admits(&self, v: &BTreeSet<u32>) -> Option<bool> {
        match self {
            DeltaBound::Exact { set } => Some(v == set),
            DeltaBound::Subset { of } => Some(v.is_subset(of)),
            DeltaBound::MinIs { value } => Some(v.first() == Some(value)),
            DeltaBound::Unknown => None,
        }
    }

    /// The smallest element the prediction commits to, if any.
    fn minimum(&self) -> Option<u32> {
        match self {
            DeltaBound::Exact { set } => set.first().copied(),
            DeltaBound::MinIs { value } => Some(*value),
            _ => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Exact { value } => write!(f, "{value}"),
            Bound::Interval { lo, hi } => write!(f, "[{lo}, {hi}]"),
            Bound::AtLeast { lo } => write!(f, ">= {lo}"),
            Bound::Unknown => f.write_str("unknown"),
        }
    }
}

impl fmt::Display for RhoBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhoBound::Exact { value } => write!(f, "{value}"),
            RhoBound::Interval { lo, lo_strict, hi: None } => {
                write!(f, "{} {lo}", if *lo_strict { ">" } else { ">=" })
            }
            RhoBound::Interval { lo, lo_strict, hi: Some(hi) } => {
                write!(f, "{}{lo}, {hi}]", if *lo_strict { "(" } else { "[" })
            }
            RhoBound::Unknown => f.write_str("unknown"),
        }
    }
}

fn write_set(f: &mut fmt::Formatter<'_>, set: &BTreeSet<u32>) -> fmt::Result {
    let items: Vec<String> = set.iter().map(u32::to_string).collect();
    write!(f, "[{}]", items.join(", "))
}

impl fmt::Display for DeltaBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaBound::Exact { set } => write_set(f, set),
            DeltaBound::Subset { of } => {
                f.write_str("subset of ")?;
                write_set(f, of)
            }
            DeltaBound::MinIs { value } => write!(f, "min {value}"),
            DeltaBound::Unknown => f.write_str("unknown"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub half_factorial: Option<bool>,
    pub c: Bound,
    pub cmon: Bound,
    pub t: Bound,
    pub rho: RhoBound,
    pub delta: DeltaBound,
    /// whether `t = 2` is known to be equivalent to half-factoriality
    pub t_is_2_iff_hf: bool,
    #[serde(rename = "I")]
    pub i_set: Option<BTreeSet<usize>>,
    #[serde(rename = "J")]
    pub j_set: Option<BTreeSet<usize>>,
    pub k: Option<u32>,
    /// field name to the statement that produced it
    pub provenance: BTreeMap<String, String>,
}

impl Prediction {
    fn unknown() -> Self {
        Prediction {
            half_factorial: None,
            c: Bound::Unknown,
            cmon: Bound::Unknown,
            t: Bound::Unknown,
            rho: RhoBound::Unknown,
            delta: DeltaBound::Unknown,
            t_is_2_iff_hf: false,
            i_set: None,
            j_set: None,
            k: None,
            provenance: BTreeMap::new(),
        }
    }

    fn note(&mut self, fields: &[&str], why: &str) {
        for f in fields {
            self.provenance.insert((*f).to_string(), why.to_string());
        }
    }

    /// Internal consistency checks. An empty list means every check passed.
    pub fn tripwires(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(m) = self.delta.minimum() {
            if m != 1 {
                out.push(format!("predicted min delta is {m}, expected 1"));
            }
        }
        if let (Some(i), Some(k)) = (&self.i_set, self.k) {
            if i.len() as u32 != k {
                out.push(format!("#I = {} differs from k = {k}", i.len()));
            }
        }
        if let (Some(k), Some(c)) = (self.k, self.c.exact()) {
            if k > 0 || c >= 2 {
                if c != 2 + k.min(2) {
                    out.push(format!("c = {c} differs from 2 + min(2, {k})"));
                }
                if self.rho.admits(Ratio::new(c, 2)) != Some(true) {
                    out.push(format!("rho prediction {:?} is not c/2", self.rho));
                }
                let interval: BTreeSet<u32> = (1..=c - 2).collect();
                if self.delta.admits(&interval) != Some(true) {
                    out.push(format!("delta prediction {:?} is not [1, c-2]", self.delta));
                }
            }
        }
        let populated = [
            ("half_factorial", self.half_factorial.is_some()),
            ("c", self.c.is_populated()),
            ("cmon", self.cmon.is_populated()),
            ("t", self.t.is_populated()),
            ("rho", self.rho != RhoBound::Unknown),
            ("delta", self.delta != DeltaBound::Unknown),
            ("I", self.i_set.is_some()),
            ("J", self.j_set.is_some()),
            ("k", self.k.is_some()),
        ];
        for (name, set) in populated {
            if set && self.provenance.get(name).is_none_or(|p| p.is_empty()) {
                out.push(format!("{name} has no provenance"));
            }
        }
        out
    }
}

fn require_order_two(inst: &InstanceSpec) -> Result<()> {
    if inst.group().order() != 2 {
        return Err(Error::Unsupported(format!(
            "needs a class group of order 2, found {}",
            inst.group()
        )));
    }
    Ok(())
}

fn require_half_factorial(inst: &InstanceSpec) -> Result<()> {
    match inst
        .components()
        .iter()
        .position(|c| !c.primary().is_half_factorial())
    {
        Some(i) => Err(Error::Unsupported(format!(
            "component {i} is not half-factorial"
        ))),
        None => Ok(()),
    }
}

fn require_exponent_one(inst: &InstanceSpec) -> Result<()> {
    match inst
        .components()
        .iter()
        .position(|c| c.primary().exponent() != 1)
    {
        Some(i) => Err(Error::Unsupported(format!(
            "component {i} has exponent {}, expected 1",
            inst.components()[i].primary().exponent()
        ))),
        None => Ok(()),
    }
}

fn local(c: &Component) -> Result<LocalInvariants> {
    let p = c.primary();
    p.local_invariants(p.default_max_valuation())
}

/// Trivial unit group with `p` an atom: the component is free on `p`.
fn is_factorial(c: &Component) -> bool {
    let p = c.primary();
    p.units().is_trivial() && !p.level(1).is_empty()
}

fn unit_image_is_full(inst: &InstanceSpec, c: &Component) -> bool {
    let zero = inst.group().zero();
    c.iota_units().iter().any(|u| *u != zero)
}

/// Components whose class-`0` and class-`g` fibres of `U_1` have
/// intersecting squares.
pub fn compute_i(inst: &InstanceSpec) -> Result<BTreeSet<usize>> {
    require_order_two(inst)?;
    require_half_factorial(inst)?;
    let t = inst.group_table();
    let mut out = BTreeSet::new();
    for (i, c) in inst.components().iter().enumerate() {
        let units = c.primary().table();
        let (even, odd): (Vec<u32>, Vec<u32>) = c
            .primary()
            .level_indices(1)
            .partition(|&u| c.class(t, 1, u) == 0);
        let squares = |f: &[u32]| -> BTreeSet<u32> {
            f.iter()
                .flat_map(|&x| f.iter().map(move |&y| units.add(x, y)))
                .collect()
        };
        if !squares(&even).is_disjoint(&squares(&odd)) {
            out.insert(i);
        }
    }
    Ok(out)
}

/// Exponent-two components whose local catenary degree is `3`.
pub fn compute_j(inst: &InstanceSpec) -> Result<BTreeSet<usize>> {
    require_order_two(inst)?;
    let mut out = BTreeSet::new();
    for (i, c) in inst.components().iter().enumerate() {
        if c.primary().exponent() == 2 && local(c)?.catenary == 3 {
            out.insert(i);
        }
    }
    Ok(out)
}

/// Number of components whose unit group maps onto the class group.
pub fn compute_k(inst: &InstanceSpec) -> Result<u32> {
    require_order_two(inst)?;
    require_exponent_one(inst)?;
    Ok(inst
        .components()
        .iter()
        .filter(|c| unit_image_is_full(inst, c))
        .count() as u32)
}

/// Half-factoriality test for instances modelling quadratic orders: class
/// group of order at most two, half-factorial components, and units mapping
/// to the zero class.
pub fn check_hf_criterion_quadratic(inst: &InstanceSpec) -> Result<bool> {
    require_exponent_one(inst)?;
    let zero = inst.group().zero();
    Ok(inst.group().order() <= 2
        && inst.components().iter().all(|c| {
            c.primary().is_half_factorial() && c.iota_units().iter().all(|u| *u == zero)
        }))
}

const TRIVIAL_GROUP: &str =
    "trivial class group: the monoid is the product of its local components, so it inherits \
     their catenary degree, tame degree, elasticity and half-factoriality";
const ELASTICITY_BOUND: &str =
    "elasticity is at most the Davenport constant times the elasticity of the local part";
const LARGE_GROUP: &str =
    "class group of order at least 3: min delta = 1, elasticity above 1, catenary degree at least 3";
const LARGE_GROUP_UPPER: &str =
    "class group of order at least 3 with half-factorial components of exponent at most 2: \
     catenary degree at most the squared Davenport constant";
const FACTORIAL: &str =
    "every component is factorial and every prime lies in class 0: the monoid is free";
const SEVERAL_PRIMES: &str =
    "every component is factorial and some prime lies in class g: a block monoid over C2 with \
     several primes in class g, half-factorial with catenary and tame degree 2";
const ORDER_TWO_BOUNDS: &str =
    "class group of order 2 with half-factorial components of exponent at most 2: \
     catenary degree at most 4 and elasticity at most 2";
const I_DEF: &str = "components whose class-0 and class-g fibres of U_1 have intersecting squares";
const J_DEF: &str = "exponent-2 components with local catenary degree 3";
const K_DEF: &str = "components whose unit group maps onto the class group";
const CASE_EMPTY: &str = "I and J empty: half-factorial with catenary degree 2";
const CASE_J: &str =
    "I empty and J non-empty: catenary degree 2 or 3 and every distance equals 1";
const CASE_ONE: &str = "#I = 1: catenary degree 3, delta = {1}, elasticity at least 3/2";
const CASE_ONE_EXP_ONE: &str =
    "#I = 1 and all exponents 1: monotone catenary degree equals catenary degree and elasticity is 3/2";
const CASE_TWO: &str = "#I >= 2: catenary degree 4, delta = {1, 2}, elasticity 2";
const CASE_TWO_EXP_ONE: &str =
    "#I >= 2 and all exponents 1: monotone catenary degree equals catenary degree";
const CMON_GE_C: &str = "the monotone catenary degree is at least the catenary degree";
const HF_CMON: &str = "half-factorial: every chain keeps its length, so cmon = c";
const TAME_HF: &str =
    "all exponents 1, every p_i in class 0, half-factorial and not factorial: tame degree 2";
const TAME_GE_C: &str = "the tame degree is at least the catenary degree";
const T_IFF: &str =
    "all exponents 1 and every p_i in class 0: half-factorial exactly when the tame degree is 2";
const EXP_ONE_FORMULA: &str = "all exponents 1: c = cmon = 2 + min{2, k}, elasticity c/2, delta = [1, c - 2]";

/// Closed-form prediction from the tightest statement that applies. Fields
/// left open by every statement stay `Unknown` or an interval.
pub fn predict(inst: &InstanceSpec) -> Prediction {
    let mut p = Prediction::unknown();
    let order = inst.group().order();
    let comps = inst.components();
    let locals: Option<Vec<LocalInvariants>> = comps.iter().map(|c| local(c).ok()).collect();
    let all_hf = comps.iter().all(|c| c.primary().is_half_factorial());

    if order == 1 {
        if let Some(locals) = &locals {
            p.c = Bound::Exact { value: locals.iter().map(|l| l.catenary).max().unwrap_or(0) };
            p.t = Bound::Exact { value: locals.iter().map(|l| l.tame).max().unwrap_or(0) };
            p.rho = RhoBound::Exact {
                value: locals.iter().map(|l| l.rho).max().unwrap_or(Ratio::from_integer(1)),
            };
            p.note(&["c", "t", "rho"], TRIVIAL_GROUP);
        }
        p.half_factorial = Some(all_hf);
        p.note(&["half_factorial"], TRIVIAL_GROUP);
        if all_hf {
            p.delta = DeltaBound::Exact { set: BTreeSet::new() };
            p.note(&["delta"], TRIVIAL_GROUP);
            if let Bound::Exact { value } = p.c {
                p.cmon = Bound::Exact { value };
                p.note(&["cmon"], HF_CMON);
            }
        }
        return p;
    }

    let davenport = inst.davenport().ok().map(|d| d as u32);
    if let (Some(d), Some(locals)) = (davenport, &locals) {
        let rho_t = locals.iter().map(|l| l.rho).max().unwrap_or(Ratio::from_integer(1));
        p.rho = RhoBound::Interval {
            lo: Ratio::from_integer(1),
            lo_strict: false,
            hi: Some(rho_t * d),
        };
        p.note(&["rho"], ELASTICITY_BOUND);
    }
    let small_exponents = comps.iter().all(|c| c.primary().exponent() <= 2);

    if order >= 3 {
        p.half_factorial = Some(false);
        p.delta = DeltaBound::MinIs { value: 1 };
        p.c = Bound::AtLeast { lo: 3 };
        p.cmon = Bound::AtLeast { lo: 3 };
        p.t = Bound::AtLeast { lo: 3 };
        p.note(&["half_factorial", "delta", "c", "cmon", "t"], LARGE_GROUP);
        if let RhoBound::Interval { lo_strict, .. } = &mut p.rho {
            *lo_strict = true;
        } else {
            p.rho = RhoBound::Interval { lo: Ratio::from_integer(1), lo_strict: true, hi: None };
        }
        p.note(&["rho"], &format!("{LARGE_GROUP}; {ELASTICITY_BOUND}"));
        if let (true, true, Some(d)) = (all_hf, small_exponents, davenport) {
            p.c = Bound::Interval { lo: 3, hi: d * d };
            p.note(&["c"], &format!("{LARGE_GROUP}; {LARGE_GROUP_UPPER}"));
        }
        return p;
    }

    // order two
    if !all_hf || !small_exponents {
        return p;
    }
    if locals.is_none() {
        return p;
    }
    p.c = Bound::Interval { lo: 2, hi: 4 };
    p.rho = RhoBound::Interval { lo: Ratio::from_integer(1), lo_strict: false, hi: Some(Ratio::from_integer(2)) };
    p.note(&["c", "rho"], ORDER_TWO_BOUNDS);

    let zero = inst.group().zero();
    let effective: Vec<usize> = (0..comps.len()).filter(|&i| !is_factorial(&comps[i])).collect();
    if effective.is_empty() {
        let several = comps.iter().any(|c| *c.iota_p() != zero);
        let v = if several { 2 } else { 0 };
        p.half_factorial = Some(true);
        p.c = Bound::Exact { value: v };
        p.cmon = Bound::Exact { value: v };
        p.t = Bound::Exact { value: v };
        p.rho = RhoBound::Exact { value: Ratio::from_integer(1) };
        p.delta = DeltaBound::Exact { set: BTreeSet::new() };
        let why = if several { SEVERAL_PRIMES } else { FACTORIAL };
        p.note(&["half_factorial", "c", "cmon", "t", "rho", "delta"], why);
        return p;
    }

    let (Ok(i_set), Ok(j_set)) = (compute_i(inst), compute_j(inst)) else {
        return p;
    };
    let s = effective.iter().filter(|&&i| comps[i].primary().exponent() == 2).count();
    p.note(&["I"], I_DEF);
    p.note(&["J"], J_DEF);
    let exp_one = s == 0;
    let ni = i_set.len();
    let one = Ratio::from_integer(1);
    let two = Ratio::from_integer(2);

    match (ni, j_set.is_empty()) {
        (0, true) => {
            p.half_factorial = Some(true);
            p.c = Bound::Exact { value: 2 };
            p.cmon = Bound::Exact { value: 2 };
            p.rho = RhoBound::Exact { value: one };
            p.delta = DeltaBound::Exact { set: BTreeSet::new() };
            p.note(&["half_factorial", "c", "rho", "delta"], CASE_EMPTY);
            p.note(&["cmon"], &format!("{CASE_EMPTY}; {HF_CMON}"));
        }
        (0, false) => {
            p.c = Bound::Interval { lo: 2, hi: 3 };
            p.cmon = Bound::AtLeast { lo: 2 };
            p.delta = DeltaBound::Subset { of: BTreeSet::from([1]) };
            p.note(&["c", "delta"], CASE_J);
            p.note(&["cmon"], CMON_GE_C);
        }
        (1, _) => {
            p.half_factorial = Some(false);
            p.c = Bound::Exact { value: 3 };
            p.delta = DeltaBound::Exact { set: BTreeSet::from([1]) };
            p.rho = RhoBound::Interval { lo: Ratio::new(3, 2), lo_strict: false, hi: Some(two) };
            p.note(&["half_factorial", "c", "delta"], CASE_ONE);
            p.note(&["rho"], &format!("{CASE_ONE}; {ORDER_TWO_BOUNDS}"));
            if exp_one {
                p.cmon = Bound::Exact { value: 3 };
                p.rho = RhoBound::Exact { value: Ratio::new(3, 2) };
                p.note(&["cmon", "rho"], CASE_ONE_EXP_ONE);
            } else {
                p.cmon = Bound::AtLeast { lo: 3 };
                p.note(&["cmon"], &format!("{CASE_ONE}; {CMON_GE_C}"));
            }
        }
        _ => {
            p.half_factorial = Some(false);
            p.c = Bound::Exact { value: 4 };
            p.rho = RhoBound::Exact { value: two };
            p.delta = DeltaBound::Exact { set: BTreeSet::from([1, 2]) };
            p.note(&["half_factorial", "c", "rho", "delta"], CASE_TWO);
            if exp_one {
                p.cmon = Bound::Exact { value: 4 };
                p.note(&["cmon"], CASE_TWO_EXP_ONE);
            } else {
                p.cmon = Bound::AtLeast { lo: 4 };
                p.note(&["cmon"], &format!("{CASE_TWO}; {CMON_GE_C}"));
            }
        }
    }

    let primes_in_zero = effective.iter().all(|&i| *comps[i].iota_p() == zero);
    match (p.half_factorial, p.c) {
        (Some(true), _) if exp_one && primes_in_zero => {
            p.t = Bound::Exact { value: 2 };
            p.note(&["t"], TAME_HF);
        }
        (_, Bound::Exact { value }) => {
            p.t = Bound::AtLeast { lo: value };
            p.note(&["t"], TAME_GE_C);
        }
        (_, Bound::Interval { lo, .. }) => {
            p.t = Bound::AtLeast { lo };
            p.note(&["t"], TAME_GE_C);
        }
        _ => {}
    }
    if exp_one && primes_in_zero {
        p.t_is_2_iff_hf = true;
        p.note(&["t_is_2_iff_hf"], T_IFF);
    }
    if exp_one {
        if let Ok(k) = compute_k(inst) {
            p.k = Some(k);
            p.note(&["k"], K_DEF);
            let why = format!("{}; {EXP_ONE_FORMULA}", p.provenance["c"]);
            p.note(&["c"], &why);
        }
    }
    p.i_set = Some(i_set);
    p.j_set = Some(j_set);
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::{json, Value};

    fn inst(v: Value) -> InstanceSpec {
        crate::config::parse_instance(&v).unwrap()
    }

    fn c2_comp(iota_p: u32, iota_u: u32) -> Value {
        json!({"units": [2], "k": 1, "levels": [["0"]], "iota_p": [iota_p], "iota_units": [[iota_u]]})
    }

    #[test]
    fn display_forms() {
        assert_eq!(Bound::Exact { value: 3 }.to_string(), "3");
        assert_eq!(Bound::Interval { lo: 2, hi: 3 }.to_string(), "[2, 3]");
        assert_eq!(Bound::AtLeast { lo: 3 }.to_string(), ">= 3");
        let one = Ratio::from_integer(1);
        assert_eq!(RhoBound::Exact { value: Ratio::new(3, 2) }.to_string(), "3/2");
        assert_eq!(RhoBound::Interval { lo: one, lo_strict: true, hi: None }.to_string(), "> 1");
        let hi = Some(Ratio::from_integer(2));
        assert_eq!(RhoBound::Interval { lo: Ratio::new(3, 2), lo_strict: false, hi }.to_string(), "[3/2, 2]");
        assert_eq!(DeltaBound::Exact { set: BTreeSet::from([1, 2]) }.to_string(), "[1, 2]");
        assert_eq!(DeltaBound::Subset { of: BTreeSet::from([1]) }.to_string(), "subset of [1]");
        assert_eq!(DeltaBound::Exact { set: BTreeSet::new() }.to_string(), "[]");
    }

    #[test]
    fn fibres_follow_the_class_of_the_atom() {
        // ι(p) = 0, ι(u) = g: fibres {1} and {u}, squares both {1}
        let a = inst(json!({"group": [2], "components": [c2_comp(0, 1)]}));
        assert_eq!(compute_i(&a).unwrap(), BTreeSet::from([0]));
        // units in class 0
        let b = inst(json!({"group": [2], "components": [c2_comp(1, 0)]}));
        assert!(compute_i(&b).unwrap().is_empty());
        // trivial units, p in class g
        let c = inst(json!({"group": [2], "components": [{"units": [], "k": 1, "levels": [[[]]], "iota_p": [1]}]}));
        assert!(compute_i(&c).unwrap().is_empty());
        assert_eq!(compute_k(&c).unwrap(), 0);
    }

    #[test]
    fn preconditions_are_checked() {
        let g3 = inst(json!({"group": [3]}));
        assert!(compute_i(&g3).is_err());
        assert!(compute_j(&g3).is_err());
        assert!(compute_k(&g3).is_err());
    }

    #[test]
    fn j_uses_the_local_catenary_degree() {
        let a = inst(json!({"group": [2], "components": [c2_comp(1, 1), c2_comp(0, 0)]}));
        assert!(compute_j(&a).unwrap().is_empty());
        // units C3, U_1 = {1, 2}: U_1² = C3, so half-factorial of exponent 2
        let half = json!({"units": [3], "k": 2, "levels": [["0"], ["1", "2"]], "iota_p": [0], "iota_units": [[0]]});
        let b = inst(json!({"group": [2], "components": [half]}));
        let local = local(&b.components()[0]).unwrap();
        assert!(local.half_factorial);
        let expected: BTreeSet<usize> = if local.catenary == 3 { BTreeSet::from([0]) } else { BTreeSet::new() };
        assert_eq!(compute_j(&b).unwrap(), expected);
    }

    #[test]
    fn trivial_class_group() {
        let a = inst(json!({"group": [], "components": [{"units": [2], "k": 1, "levels": [["0"]], "iota_p": [], "iota_units": [[]]}]}));
        let p = predict(&a);
        assert_eq!(p.half_factorial, Some(true));
        assert_eq!(p.c, Bound::Exact { value: 2 });
        assert_eq!(p.t, Bound::Exact { value: 2 });
        assert!(p.tripwires().is_empty(), "{:?}", p.tripwires());
    }

    #[test]
    fn one_full_image_component() {
        let a = inst(json!({"group": [2], "components": [c2_comp(1, 1)]}));
        let p = predict(&a);
        assert_eq!(p.c, Bound::Exact { value: 3 });
        assert_eq!(p.cmon, Bound::Exact { value: 3 });
        assert_eq!(p.rho, RhoBound::Exact { value: Ratio::new(3, 2) });
        assert_eq!(p.delta, DeltaBound::Exact { set: BTreeSet::from([1]) });
        assert_eq!(p.k, Some(1));
        assert!(p.tripwires().is_empty(), "{:?}", p.tripwires());
    }

    #[test]
    fn two_full_image_components() {
        let a = inst(json!({"group": [2], "components": [c2_comp(1, 1), c2_comp(0, 1), c2_comp(1, 0)]}));
        let p = predict(&a);
        assert_eq!(p.c, Bound::Exact { value: 4 });
        assert_eq!(p.rho, RhoBound::Exact { value: Ratio::from_integer(2) });
        assert_eq!(p.delta, DeltaBound::Exact { set: BTreeSet::from([1, 2]) });
        assert_eq!(p.k, Some(2));
        assert!(p.tripwires().is_empty(), "{:?}", p.tripwires());
    }

    #[test]
    fn half_factorial_case_and_quadratic_criterion() {
        let a = inst(json!({"group": [2], "components": [c2_comp(0, 0), c2_comp(1, 0)]}));
        let p = predict(&a);
        assert_eq!(p.half_factorial, Some(true));
        assert_eq!(p.c, Bound::Exact { value: 2 });
        // a prime in class g allows tame degree 3
        assert_eq!(p.t, Bound::AtLeast { lo: 2 });
        assert!(!p.t_is_2_iff_hf);
        assert!(check_hf_criterion_quadratic(&a).unwrap());
        let b = inst(json!({"group": [2], "components": [c2_comp(1, 1)]}));
        assert!(!check_hf_criterion_quadratic(&b).unwrap());
        let c = inst(json!({"group": [4], "components": [{"units": [2], "k": 1, "levels": [["0"]], "iota_p": [1], "iota_units": [[0]]}]}));
        assert!(!check_hf_criterion_quadratic(&c).unwrap());
        assert_eq!(predict(&c).half_factorial, Some(false));
        let d = inst(json!({"group": [2], "components": [c2_comp(0, 0)]}));
        assert!(predict(&d).t_is_2_iff_hf);
    }

    #[test]
    fn factorial_components_are_set_aside() {
        let free = json!({"units": [], "k": 1, "levels": [[[]]], "iota_p": [0]});
        let a = inst(json!({"group": [2], "components": [free]}));
        assert_eq!(predict(&a).c, Bound::Exact { value: 0 });
        let g = json!({"units": [], "k": 1, "levels": [[[]]], "iota_p": [1]});
        let b = inst(json!({"group": [2], "components": [g.clone()]}));
        assert_eq!(predict(&b).c, Bound::Exact { value: 2 });
        let c = inst(json!({"group": [2], "components": [c2_comp(1, 1), g]}));
        assert_eq!(predict(&c).c, Bound::Exact { value: 3 });
    }

    #[test]
    fn larger_class_groups() {
        let a = inst(json!({"group": [3]}));
        let p = predict(&a);
        assert_eq!(p.c, Bound::Interval { lo: 3, hi: 9 });
        assert_eq!(p.delta, DeltaBound::MinIs { value: 1 });
        assert_eq!(p.rho.admits(Ratio::from_integer(1)), Some(false));
        assert!(p.tripwires().is_empty(), "{:?}", p.tripwires());
    }

    #[test]
    fn predict_is_deterministic() {
        let a = inst(json!({"group": [2], "components": [c2_comp(1, 1), c2_comp(0, 1)]}));
        assert_eq!(predict(&a), predict(&a));
        let text = serde_json::to_string(&predict(&a)).unwrap();
        assert!(text.contains("\"rho\":{\"kind\":\"exact\",\"value\":\"2\"}"), "{text}");
    }
}
