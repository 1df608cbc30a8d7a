//! Verification harness: brute-force invariants, bound checks, the chain
//! lemma, and the canned scenario suite comparing predictions with brute
//! force.
//!
//! Brute-force values are maxima over the blocks up to a degree cap, so they
//! only under-approximate the true suprema. Equality claims are checked at
//! pinned caps, chosen as the smallest caps where the predicted values are
//! already attained.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;
use std::time::Instant;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::abelian::{FiniteAbelianGroup, GroupElement};
use crate::config::ambient_to_json;
use crate::error::{Error, Result};
use crate::factorization::{
    element_invariants, length_set, monotone_r_reachable, survey, AtomTable, Factorization,
    FactorizationTable,
};
use crate::predict::{predict, Bound, DeltaBound, Prediction, RhoBound};
use crate::primary::{LocalInvariants, PrimaryMonoidSpec};
use crate::tblock::{BlockTable, Component, Coords, InstanceSpec};

/// Smallest cap at which every relation family over `C2` can appear.
pub const MIN_CAP: u32 = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteInvariants {
    pub cap: u32,
    pub elements: usize,
    pub half_factorial: bool,
    pub c: u32,
    pub cmon: u32,
    pub t: u32,
    #[serde(with = "crate::ratio")]
    pub rho: Ratio<u32>,
    pub delta: BTreeSet<u32>,
    pub min_delta: Option<u32>,
    /// largest `min L_H(a) / min L_D(a)` over the blocks, `D` the ambient
    /// product of free letters and local components
    #[serde(with = "crate::ratio")]
    pub rho_relative: Ratio<u32>,
    /// elements attaining `c`, `cmon`, `t`, `rho`, and the element with the
    /// most factorizations
    pub witnesses: BTreeMap<String, Value>,
}

/// Brute-force values together with the table they came from.
pub struct Brute {
    pub invariants: BruteInvariants,
    pub table: BlockTable,
    witness_coords: BTreeMap<String, Coords>,
}

impl Brute {
    pub fn compute(inst: &InstanceSpec, cap: u32) -> Result<Brute> {
        Brute::compute_with(inst, cap, false)
    }

    /// As [`Brute::compute`]; with `include_zero` the prime letter `0` is
    /// kept, so the values are those of the full T-block monoid.
    pub fn compute_with(inst: &InstanceSpec, cap: u32, include_zero: bool) -> Result<Brute> {
        if cap < MIN_CAP {
            return Err(Error::invalid("cap", format!("must be at least {MIN_CAP}")));
        }
        let table = inst.block_table(cap, include_zero)?;
        let s = survey(&table.factorizations);
        let mut witness_coords = BTreeMap::new();
        let named = [
            ("c", s.catenary_witness.as_ref().map(|w| &w.element)),
            ("cmon", s.monotone_catenary_witness.as_ref().map(|w| &w.element)),
            ("t", s.tame_witness.as_ref().map(|w| &w.element)),
            ("rho", s.rho_witness.as_ref()),
        ];
        for (name, e) in named {
            if let Some(e) = e {
                witness_coords.insert(name.to_string(), e.clone());
            }
        }
        if let Some((e, _)) = table
            .factorizations
            .iter()
            .max_by_key(|(e, z)| (z.len(), std::cmp::Reverse((*e).clone())))
        {
            witness_coords.insert("max_factorizations".to_string(), e.clone());
        }
        let witnesses = witness_coords
            .iter()
            .map(|(k, e)| (k.clone(), ambient_to_json(&inst.decode(e))))
            .collect();
        let invariants = BruteInvariants {
            cap,
            elements: table.factorizations.len(),
            half_factorial: s.half_factorial,
            c: s.catenary,
            cmon: s.monotone_catenary,
            t: s.tame,
            rho: s.rho,
            min_delta: s.min_delta(),
            delta: s.delta,
            rho_relative: relative_elasticity(inst, &table)?,
            witnesses,
        };
        Ok(Brute { invariants, table, witness_coords })
    }

    /// A witness element and its factorization set, atoms written out.
    pub fn witness(&self, inst: &InstanceSpec, name: &str) -> Option<Witness> {
        let key = if self.witness_coords.contains_key(name) { name } else { "max_factorizations" };
        let e = self.witness_coords.get(key)?;
        let z = self.table.factorizations.get(e)?;
        let atoms = &self.table.atoms;
        Some(Witness {
            invariant: name.to_string(),
            element: ambient_to_json(&inst.decode(e)),
            factorizations: z
                .iter()
                .map(|f| f.ids().iter().map(|&id| ambient_to_json(&inst.decode(atoms.get(id)))).collect())
                .collect(),
        })
    }
}

pub fn brute_invariants(inst: &InstanceSpec, cap: u32) -> Result<BruteInvariants> {
    Ok(Brute::compute(inst, cap)?.invariants)
}

/// Minimum lengths in each component, indexed by `(valuation, unit)`.
fn local_min_lengths(p: &PrimaryMonoidSpec, max_valuation: u32) -> Result<BTreeMap<(u32, u32), u32>> {
    let atoms = AtomTable::new(p.atom_indices());
    let table = FactorizationTable::build(p, &atoms, p.members_up_to(max_valuation))?;
    Ok(table
        .iter()
        .map(|(e, z)| (*e, z.iter().map(Factorization::len).min().unwrap_or(0)))
        .collect())
}

fn relative_elasticity(inst: &InstanceSpec, table: &BlockTable) -> Result<Ratio<u32>> {
    let n = inst.group().order();
    let local: Vec<BTreeMap<(u32, u32), u32>> = inst
        .components()
        .iter()
        .map(|c| local_min_lengths(c.primary(), table.cap))
        .collect::<Result<_>>()?;
    let mut best = Ratio::from_integer(0);
    for (a, z) in table.factorizations.iter() {
        let free: u32 = a[..n].iter().map(|&k| k as u32).sum();
        let parts: u32 = local
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let off = inst.part_offset(i);
                m[&(a[off] as u32, a[off + 1] as u32)]
            })
            .sum();
        let ambient = free + parts;
        if ambient == 0 {
            continue;
        }
        let min_h = z.iter().map(Factorization::len).min().unwrap_or(0);
        best = best.max(Ratio::new(min_h, ambient));
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

fn bound(name: &str, lhs: impl ToString, rhs: impl ToString, holds: bool) -> BoundCheck {
    BoundCheck {
        name: name.to_string(),
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
        holds,
    }
}

fn locals(inst: &InstanceSpec) -> Result<Vec<LocalInvariants>> {
    inst.components()
        .iter()
        .map(|c| c.primary().local_invariants(c.primary().default_max_valuation()))
        .collect()
}

/// Instantiates the general upper and lower bounds with the computed
/// quantities. Bounds whose hypotheses fail for `inst` are omitted.
pub fn check_bounds(inst: &InstanceSpec, brute: &BruteInvariants) -> Result<Vec<BoundCheck>> {
    let d = inst.davenport()? as u32;
    let locals = locals(inst)?;
    let rho_t = locals.iter().map(|l| l.rho).max().unwrap_or(Ratio::from_integer(1));
    let c_d = locals.iter().map(|l| l.catenary).max().unwrap_or(0);
    let all_hf = locals.iter().all(|l| l.half_factorial);
    let mut out = vec![bound("rho <= D(G) * rho(T)", brute.rho, rho_t * d, brute.rho <= rho_t * d)];
    if all_hf {
        let one = Ratio::from_integer(1);
        out.push(bound("rho(H, D) <= 1", brute.rho_relative, 1, brute.rho_relative <= one));
        let rhs = ((d + 1) * c_d / 2).max(d * d);
        out.push(bound("c <= max(floor((D + 1) / 2 * c(D)), D^2)", brute.c, rhs, brute.c <= rhs));
        for (i, (l, c)) in locals.iter().zip(inst.components()).enumerate() {
            let k = c.primary().exponent();
            out.push(bound(
                &format!("component {i}: c <= t <= k + 1"),
                format!("c = {}, t = {}", l.catenary, l.tame),
                k + 1,
                l.catenary <= l.tame && l.tame <= k + 1,
            ));
        }
        let small = inst.components().iter().all(|c| c.primary().exponent() <= 2);
        if inst.group().order() == 2 && small {
            out.push(bound("c <= 4", brute.c, 4, brute.c <= 4));
            out.push(bound("rho <= 2", brute.rho, 2, brute.rho <= Ratio::from_integer(2)));
        }
    }
    if inst.group().order() >= 3 {
        out.push(bound("c >= 3", brute.c, 3, brute.c >= 3));
        let md = brute.min_delta.map_or("none".to_string(), |m| m.to_string());
        out.push(bound("min delta = 1", md, 1, brute.min_delta == Some(1)));
        out.push(bound("rho > 1", brute.rho, 1, brute.rho > Ratio::from_integer(1)));
    }
    Ok(out)
}

/// An element and its factorization set, atoms spelled out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub invariant: String,
    pub element: Value,
    pub factorizations: Vec<Vec<Value>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLemmaResult {
    pub pairs_checked: u64,
    pub counterexamples: Vec<Witness>,
}

/// For every pair `(x, y)` of factorizations of one block with
/// `|x| ≤ |y|` and `|y|` in `y_lengths`, checks that a monotone chain of
/// factorizations, consecutive members sharing an atom, joins `x` to `y`.
pub fn check_chain_lemma(
    inst: &InstanceSpec,
    cap: u32,
    y_lengths: RangeInclusive<u32>,
) -> Result<ChainLemmaResult> {
    if inst.group().order() != 2 || inst.components().iter().any(|c| c.primary().exponent() != 1) {
        return Err(Error::Unsupported(
            "the chain check needs a class group of order 2 and exponent-one components".into(),
        ));
    }
    let table = inst.block_table(cap, false)?;
    let per: Vec<(u64, Vec<(usize, usize)>)> = table
        .factorizations
        .sets
        .par_iter()
        .map(|z| {
            let mut checked = 0;
            let mut bad = Vec::new();
            for ceiling in y_lengths.clone() {
                if !z.iter().any(|f| f.len() == ceiling) {
                    continue;
                }
                for x in 0..z.len() {
                    if z[x].len() > ceiling {
                        continue;
                    }
                    let reach = monotone_r_reachable(z, x, ceiling);
                    for y in 0..z.len() {
                        if y != x && z[y].len() == ceiling {
                            checked += 1;
                            if !reach[y] {
                                bad.push((x, y));
                            }
                        }
                    }
                }
            }
            (checked, bad)
        })
        .collect();
    let mut result = ChainLemmaResult { pairs_checked: 0, counterexamples: Vec::new() };
    let atoms = &table.atoms;
    let spell = |f: &Factorization| -> Vec<Value> {
        f.ids().iter().map(|&id| ambient_to_json(&inst.decode(atoms.get(id)))).collect()
    };
    for ((e, z), (checked, bad)) in table.factorizations.iter().zip(per) {
        result.pairs_checked += checked;
        for (x, y) in bad {
            result.counterexamples.push(Witness {
                invariant: "monotone R-chain".into(),
                element: ambient_to_json(&inst.decode(e)),
                factorizations: vec![spell(&z[x]), spell(&z[y])],
            });
        }
    }
    Ok(result)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Match,
    WithinInterval,
    Violation,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub name: String,
    pub predicted: Value,
    pub brute: Value,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// local catenary degree of the sharp example equals `k`
    SharpLocal,
    /// class group `C2`, exponent-one components, all class maps
    ExponentOneFamily,
    /// class groups of order 1, 3 and 4
    SmallGroups,
    /// closed-form atoms agree with exhaustive search
    ClosedFormAtoms,
    /// units and primes in class `0`: tame degree 2
    TameDegree,
    /// `cmon ≤ 2 ⟺ c ≤ 2 ⟺ half-factorial`, and `⟺ t ≤ 2` when every prime
    /// lies in class `0`
    Equivalence,
    /// monotone chains for relation pairs with `5 ≤ |y| ≤ 6`
    ChainLemma,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::SharpLocal,
        Scenario::ExponentOneFamily,
        Scenario::SmallGroups,
        Scenario::ClosedFormAtoms,
        Scenario::TameDegree,
        Scenario::Equivalence,
        Scenario::ChainLemma,
    ];

    /// Smallest cap at which the brute-force values reach the predicted
    /// ones on every instance of the scenario.
    pub fn pinned_cap(self) -> u32 {
        match self {
            Scenario::SharpLocal | Scenario::ClosedFormAtoms => 0,
            Scenario::ExponentOneFamily => 4,
            Scenario::SmallGroups => 6,
            Scenario::TameDegree => 4,
            Scenario::Equivalence => 4,
            Scenario::ChainLemma => 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub scenarios: Vec<Scenario>,
    /// overrides every pinned cap when set
    pub cap: Option<u32>,
    pub record_timing: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { scenarios: Scenario::ALL.to_vec(), cap: None, record_timing: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scenario: Scenario,
    pub label: String,
    pub digest: String,
    pub cap: u32,
    pub checks: Vec<InvariantCheck>,
    pub bounds: Vec<BoundCheck>,
    pub witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl VerificationReport {
    fn new(scenario: Scenario, label: String, inst: &InstanceSpec, cap: u32) -> Self {
        VerificationReport {
            scenario,
            label,
            digest: inst.digest(),
            cap,
            checks: Vec::new(),
            bounds: Vec::new(),
            witnesses: Vec::new(),
            error: None,
            elapsed_ms: None,
        }
    }

    pub fn has_violation(&self) -> bool {
        self.checks.iter().any(|c| c.verdict == Verdict::Violation)
            || self.bounds.iter().any(|b| !b.holds)
    }

    fn check(&mut self, name: &str, predicted: Value, brute: Value, verdict: Verdict) {
        self.checks.push(InvariantCheck { name: name.to_string(), predicted, brute, verdict });
    }
}

fn bound_verdict(b: &Bound, v: u32) -> Verdict {
    match (b, b.admits(v)) {
        (_, None) => Verdict::NotApplicable,
        (_, Some(false)) => Verdict::Violation,
        (Bound::Exact { .. }, Some(true)) => Verdict::Match,
        (_, Some(true)) => Verdict::WithinInterval,
    }
}

fn rho_verdict(b: &RhoBound, v: Ratio<u32>) -> Verdict {
    match (b, b.admits(v)) {
        (_, None) => Verdict::NotApplicable,
        (_, Some(false)) => Verdict::Violation,
        (RhoBound::Exact { .. }, Some(true)) => Verdict::Match,
        (_, Some(true)) => Verdict::WithinInterval,
    }
}

fn delta_verdict(b: &DeltaBound, v: &BTreeSet<u32>) -> Verdict {
    match (b, b.admits(v)) {
        (_, None) => Verdict::NotApplicable,
        (_, Some(false)) => Verdict::Violation,
        (DeltaBound::Exact { .. }, Some(true)) => Verdict::Match,
        (_, Some(true)) => Verdict::WithinInterval,
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

/// Prediction against brute force, field by field.
pub fn compare(p: &Prediction, b: &BruteInvariants) -> Vec<InvariantCheck> {
    let hf = match p.half_factorial {
        None => Verdict::NotApplicable,
        Some(h) if h == b.half_factorial => Verdict::Match,
        Some(_) => Verdict::Violation,
    };
    let mut out = vec![InvariantCheck {
        name: "half_factorial".into(),
        predicted: to_value(&p.half_factorial),
        brute: json!(b.half_factorial),
        verdict: hf,
    }];
    for (name, pred, v) in [("c", &p.c, b.c), ("cmon", &p.cmon, b.cmon), ("t", &p.t, b.t)] {
        out.push(InvariantCheck {
            name: name.into(),
            predicted: to_value(pred),
            brute: json!(v),
            verdict: bound_verdict(pred, v),
        });
    }
    out.push(InvariantCheck {
        name: "rho".into(),
        predicted: to_value(&p.rho),
        brute: json!(b.rho.to_string()),
        verdict: rho_verdict(&p.rho, b.rho),
    });
    out.push(InvariantCheck {
        name: "delta".into(),
        predicted: to_value(&p.delta),
        brute: to_value(&b.delta),
        verdict: delta_verdict(&p.delta, &b.delta),
    });
    if p.t_is_2_iff_hf {
        let holds = (b.t == 2) == b.half_factorial;
        out.push(InvariantCheck {
            name: "t = 2 iff half-factorial".into(),
            predicted: json!(true),
            brute: json!(holds),
            verdict: if holds { Verdict::Match } else { Verdict::Violation },
        });
    }
    out
}

/// `C2` with the non-zero element written `g`.
fn c2() -> FiniteAbelianGroup {
    FiniteAbelianGroup::cyclic(2).expect("C2")
}

/// Every homomorphism from `units` to `C2`, as images of the cyclic
/// generators.
fn homs_to_c2(units: &FiniteAbelianGroup) -> Vec<Vec<GroupElement>> {
    let g = c2();
    let mut out = vec![Vec::new()];
    for &m in units.moduli() {
        let choices: Vec<GroupElement> = if m % 2 == 0 {
            g.elements().collect()
        } else {
            vec![g.zero()]
        };
        out = out
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |c| {
                    let mut v = prefix.clone();
                    v.push(c.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// Component types over `C2` for one primary monoid: every prime class and
/// every unit map.
fn component_types(primary: &PrimaryMonoidSpec) -> Result<Vec<Component>> {
    let g = c2();
    let mut out = Vec::new();
    for p in g.elements() {
        for h in homs_to_c2(primary.units()) {
            out.push(Component::new(&g, primary.clone(), p.clone(), h)?);
        }
    }
    Ok(out)
}

/// Non-decreasing index sequences of length `r` below `n`.
fn multisets(n: usize, r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in multisets(n, r - 1) {
        let start = rest.last().copied().unwrap_or(0);
        for i in start..n {
            let mut v = rest.clone();
            v.push(i);
            out.push(v);
        }
    }
    out
}

fn is_free(c: &Component) -> bool {
    c.primary().units().is_trivial() && c.iota_p().residues().iter().all(|&x| x == 0)
}

/// Unit groups of the exponent-one family.
pub fn family_unit_groups() -> Vec<FiniteAbelianGroup> {
    [vec![], vec![2], vec![4], vec![2, 2]]
        .into_iter()
        .map(|m| FiniteAbelianGroup::new(m).expect("valid moduli"))
        .collect()
}

/// Class group `C2`, `1..=max_components` exponent-one components sharing
/// the unit group `units`, every assignment of prime classes and unit maps
/// up to reordering. Instances whose monoid is free are left out.
pub fn exponent_one_family(units: &FiniteAbelianGroup, max_components: usize) -> Result<Vec<InstanceSpec>> {
    let types = component_types(&PrimaryMonoidSpec::exponent_one(units.clone()))?;
    let mut out = Vec::new();
    for r in 1..=max_components {
        for pick in multisets(types.len(), r) {
            let comps: Vec<Component> = pick.iter().map(|&i| types[i].clone()).collect();
            if comps.iter().all(is_free) {
                continue;
            }
            out.push(InstanceSpec::new(c2(), comps)?);
        }
    }
    Ok(out)
}

/// Half-factorial exponent-two monoids: `U_1` generates the units in two
/// steps without being all of them.
pub fn exponent_two_primaries() -> Result<Vec<PrimaryMonoidSpec>> {
    let specs: [(Vec<u32>, Vec<Vec<i64>>); 3] = [
        (vec![3], vec![vec![1], vec![2]]),
        (vec![4], vec![vec![1], vec![2], vec![3]]),
        (vec![2, 2], vec![vec![1, 0], vec![0, 1], vec![1, 1]]),
    ];
    specs
        .into_iter()
        .map(|(m, first)| {
            let units = FiniteAbelianGroup::new(m)?;
            let first = first.iter().map(|r| units.element(r)).collect::<Result<BTreeSet<_>>>()?;
            PrimaryMonoidSpec::generated_by(units, first)
        })
        .collect()
}

/// Class group `C2` with one exponent-two component, optionally preceded
/// by one exponent-one component with units `C2` mapping onto the class
/// group.
pub fn exponent_two_family() -> Result<Vec<InstanceSpec>> {
    let g = c2();
    let one = Component::new(
        &g,
        PrimaryMonoidSpec::exponent_one(g.clone()),
        g.element(&[1])?,
        vec![g.element(&[1])?],
    )?;
    let mut out = Vec::new();
    for p in exponent_two_primaries()? {
        for c in component_types(&p)? {
            out.push(InstanceSpec::new(g.clone(), vec![c.clone()])?);
            out.push(InstanceSpec::new(g.clone(), vec![one.clone(), c])?);
        }
    }
    Ok(out)
}

/// Block-only instances and small components over class groups of order
/// 1, 3 and 4.
pub fn small_group_instances() -> Result<Vec<InstanceSpec>> {
    let mut out = Vec::new();
    let trivial = FiniteAbelianGroup::trivial();
    let c2u = FiniteAbelianGroup::cyclic(2)?;
    for units in [c2u.clone(), FiniteAbelianGroup::cyclic(3)?] {
        let comp = Component::new(
            &trivial,
            PrimaryMonoidSpec::exponent_one(units),
            trivial.zero(),
            vec![trivial.zero()],
        )?;
        out.push(InstanceSpec::new(trivial.clone(), vec![comp])?);
    }
    for p in exponent_two_primaries()? {
        let n = p.units().moduli().len();
        let comp = Component::new(&trivial, p, trivial.zero(), vec![trivial.zero(); n])?;
        out.push(InstanceSpec::new(trivial.clone(), vec![comp])?);
    }
    for m in [vec![3], vec![4], vec![2, 2]] {
        let g = FiniteAbelianGroup::new(m)?;
        out.push(InstanceSpec::new(g.clone(), Vec::new())?);
        let gen = g.element_at(1);
        let comp = Component::new(&g, PrimaryMonoidSpec::exponent_one(c2u.clone()), gen, vec![g.zero()])?;
        out.push(InstanceSpec::new(g, vec![comp])?);
    }
    Ok(out)
}

/// Instances whose units and primes all lie in class `0`.
pub fn tame_degree_instances() -> Result<Vec<InstanceSpec>> {
    let g = c2();
    let mut out = Vec::new();
    for units in family_unit_groups().into_iter().filter(|u| !u.is_trivial()) {
        let comp = Component::new(
            &g,
            PrimaryMonoidSpec::exponent_one(units.clone()),
            g.zero(),
            vec![g.zero(); units.moduli().len()],
        )?;
        for r in 1..=2 {
            out.push(InstanceSpec::new(g.clone(), vec![comp.clone(); r])?);
        }
    }
    Ok(out)
}

fn label(inst: &InstanceSpec) -> String {
    inst.to_json().to_string()
}

fn cap_for(config: &SuiteConfig, s: Scenario) -> u32 {
    config.cap.unwrap_or(s.pinned_cap())
}

fn with_error(mut r: VerificationReport, e: Error) -> VerificationReport {
    r.error = Some(e.to_string());
    r
}

/// Prediction, brute force and bounds for one instance.
pub fn verify_instance(scenario: Scenario, inst: &InstanceSpec, cap: u32) -> VerificationReport {
    let r = VerificationReport::new(scenario, label(inst), inst, cap);
    match verify_instance_inner(r.clone(), inst, cap) {
        Ok(r) => r,
        Err(e) => with_error(r, e),
    }
}

fn verify_instance_inner(mut r: VerificationReport, inst: &InstanceSpec, cap: u32) -> Result<VerificationReport> {
    let brute = Brute::compute(inst, cap)?;
    let p = predict(inst);
    r.checks = compare(&p, &brute.invariants);
    for trip in p.tripwires() {
        r.check("prediction tripwire", json!(trip), Value::Null, Verdict::Violation);
    }
    r.bounds = check_bounds(inst, &brute.invariants)?;
    let bad: BTreeSet<String> = r
        .checks
        .iter()
        .filter(|c| c.verdict == Verdict::Violation)
        .map(|c| c.name.clone())
        .collect();
    r.witnesses = bad.iter().filter_map(|n| brute.witness(inst, n)).collect();
    if r.bounds.iter().any(|b| !b.holds) && r.witnesses.is_empty() {
        r.witnesses.extend(brute.witness(inst, "c"));
    }
    Ok(r)
}

/// Whether `cmon ≤ 2`, `c ≤ 2`, half-factoriality (and `t ≤ 2` when every
/// prime lies in class `0`) all agree.
pub fn equivalence_holds(inst: &InstanceSpec, b: &BruteInvariants) -> bool {
    let mut facts = vec![b.cmon <= 2, b.c <= 2, b.half_factorial];
    let zero = inst.group().zero();
    if inst.components().iter().all(|c| *c.iota_p() == zero) {
        facts.push(b.t <= 2);
    }
    facts.iter().all(|&f| f == facts[0])
}

fn equivalence_report(inst: &InstanceSpec, cap: u32) -> VerificationReport {
    let r = VerificationReport::new(Scenario::Equivalence, label(inst), inst, cap);
    let run = |mut r: VerificationReport| -> Result<VerificationReport> {
        let brute = Brute::compute(inst, cap)?;
        let b = &brute.invariants;
        let holds = equivalence_holds(inst, b);
        let facts = json!({"cmon": b.cmon, "c": b.c, "half_factorial": b.half_factorial, "t": b.t});
        r.check("equivalence", json!(true), facts, if holds { Verdict::Match } else { Verdict::Violation });
        if !holds {
            r.witnesses.extend(brute.witness(inst, "c"));
        }
        Ok(r)
    };
    run(r.clone()).unwrap_or_else(|e| with_error(r, e))
}

fn atoms_report(inst: &InstanceSpec) -> VerificationReport {
    let r = VerificationReport::new(Scenario::ClosedFormAtoms, label(inst), inst, 0);
    let run = |mut r: VerificationReport| -> Result<VerificationReport> {
        r.cap = inst.atom_degree_bound()?;
        let closed = inst.atoms_closed_form()?;
        let generic = inst.atoms_generic()?;
        let verdict = if closed == generic { Verdict::Match } else { Verdict::Violation };
        r.check("atoms", json!(closed.len()), json!(generic.len()), verdict);
        if closed != generic {
            for a in closed.symmetric_difference(&generic) {
                r.witnesses.push(Witness {
                    invariant: "atoms".into(),
                    element: ambient_to_json(a),
                    factorizations: Vec::new(),
                });
            }
        }
        Ok(r)
    };
    run(r.clone()).unwrap_or_else(|e| with_error(r, e))
}

fn chain_report(inst: &InstanceSpec, cap: u32) -> VerificationReport {
    let r = VerificationReport::new(Scenario::ChainLemma, label(inst), inst, cap);
    match check_chain_lemma(inst, cap, 5..=6) {
        Ok(res) => {
            let mut r = r;
            let n = res.counterexamples.len();
            let verdict = if n == 0 { Verdict::Match } else { Verdict::Violation };
            r.check("counterexamples", json!(0), json!({"count": n, "pairs_checked": res.pairs_checked}), verdict);
            r.witnesses = res.counterexamples;
            r
        }
        Err(e) => with_error(r, e),
    }
}

/// The instance modelling one sharp local example, in a trivial class group.
pub fn sharp_instance(k: u32) -> Result<InstanceSpec> {
    let p = PrimaryMonoidSpec::sharp_example(k)?;
    let trivial = FiniteAbelianGroup::trivial();
    let n = p.units().moduli().len();
    InstanceSpec::new(trivial.clone(), vec![Component::new(&trivial, p, trivial.zero(), vec![trivial.zero(); n])?])
}

fn sharp_report(k: u32) -> VerificationReport {
    let run = || -> Result<VerificationReport> {
        let inst = sharp_instance(k)?;
        let p = inst.components()[0].primary();
        let bound_v = p.default_max_valuation();
        let mut r = VerificationReport::new(Scenario::SharpLocal, format!("sharp example, k = {k}"), &inst, bound_v);
        let local = p.local_invariants(bound_v)?;
        let verdict = if local.catenary == k { Verdict::Match } else { Verdict::Violation };
        r.check("c", json!(Bound::Exact { value: k }), json!(local.catenary), verdict);
        Ok(r)
    };
    run().unwrap_or_else(|e| VerificationReport {
        scenario: Scenario::SharpLocal,
        label: format!("sharp example, k = {k}"),
        digest: String::new(),
        cap: 0,
        checks: Vec::new(),
        bounds: Vec::new(),
        witnesses: Vec::new(),
        error: Some(e.to_string()),
        elapsed_ms: None,
    })
}

/// Instances with at most two components from the exponent-one family
/// together with the exponent-two family.
fn closed_form_instances() -> Result<Vec<InstanceSpec>> {
    let mut out = Vec::new();
    for u in family_unit_groups() {
        out.extend(exponent_one_family(&u, 2)?);
    }
    out.extend(exponent_two_family()?);
    Ok(out)
}

enum Job {
    Sharp(u32),
    Instance(Scenario, InstanceSpec, u32),
    Atoms(InstanceSpec),
    Equivalence(InstanceSpec, u32),
    Chain(InstanceSpec, u32),
}

fn jobs(config: &SuiteConfig) -> Result<Vec<Job>> {
    let mut out = Vec::new();
    for &s in &config.scenarios {
        let cap = cap_for(config, s);
        match s {
            Scenario::SharpLocal => out.extend([2, 3].map(Job::Sharp)),
            Scenario::ExponentOneFamily => {
                for u in family_unit_groups() {
                    for inst in exponent_one_family(&u, 3)? {
                        out.push(Job::Instance(s, inst, cap));
                    }
                }
            }
            Scenario::SmallGroups => {
                for inst in small_group_instances()? {
                    out.push(Job::Instance(s, inst, cap));
                }
            }
            Scenario::ClosedFormAtoms => {
                out.extend(closed_form_instances()?.into_iter().map(Job::Atoms));
            }
            Scenario::TameDegree => {
                for inst in tame_degree_instances()? {
                    out.push(Job::Instance(s, inst, cap));
                }
            }
            Scenario::Equivalence => {
                for u in family_unit_groups() {
                    for inst in exponent_one_family(&u, 3)? {
                        out.push(Job::Equivalence(inst, cap));
                    }
                }
            }
            Scenario::ChainLemma => {
                for inst in chain_instances()? {
                    out.push(Job::Chain(inst, cap));
                }
            }
        }
    }
    Ok(out)
}

/// `k = 1` and `k = 2` instances with units `C2`.
pub fn chain_instances() -> Result<Vec<InstanceSpec>> {
    let g = c2();
    let full = Component::new(
        &g,
        PrimaryMonoidSpec::exponent_one(g.clone()),
        g.element(&[1])?,
        vec![g.element(&[1])?],
    )?;
    let kernel = Component::new(&g, PrimaryMonoidSpec::exponent_one(g.clone()), g.element(&[1])?, vec![g.zero()])?;
    Ok(vec![
        InstanceSpec::new(g.clone(), vec![full.clone()])?,
        InstanceSpec::new(g.clone(), vec![full.clone(), kernel])?,
        InstanceSpec::new(g, vec![full.clone(), full])?,
    ])
}

/// Runs the configured scenarios in parallel. Reports come back in job
/// order, so the output is deterministic apart from optional timings.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let jobs = jobs(config)?;
    Ok(jobs
        .par_iter()
        .map(|job| {
            let start = Instant::now();
            let mut r = match job {
                Job::Sharp(k) => sharp_report(*k),
                Job::Instance(s, inst, cap) => verify_instance(*s, inst, *cap),
                Job::Atoms(inst) => atoms_report(inst),
                Job::Equivalence(inst, cap) => equivalence_report(inst, *cap),
                Job::Chain(inst, cap) => chain_report(inst, *cap),
            };
            if config.record_timing {
                r.elapsed_ms = Some(start.elapsed().as_millis() as u64);
            }
            r
        })
        .collect())
}

/// Per-element rows for a block table: lengths, distances, elasticity,
/// catenary and monotone catenary degree.
pub fn element_rows(inst: &InstanceSpec, table: &BlockTable) -> Vec<Value> {
    let per = element_invariants(&table.factorizations);
    table
        .factorizations
        .iter()
        .zip(per)
        .map(|((e, z), inv)| {
            json!({
                "element": ambient_to_json(&inst.decode(e)),
                "L": length_set(z),
                "delta": inv.delta,
                "rho": inv.rho.to_string(),
                "c": inv.catenary,
                "cmon": inv.monotone_catenary,
            })
        })
        .collect()
}
