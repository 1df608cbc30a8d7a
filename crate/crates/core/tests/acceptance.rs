//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach standard output.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use blockfact::abelian::davenport_constant;
use blockfact::verify::{
    brute_invariants, chain_instances, check_bounds, check_chain_lemma, exponent_one_family, exponent_two_family,
    family_unit_groups, small_group_instances, tame_degree_instances, BruteInvariants,
};
use blockfact::{AmbientElement, FiniteAbelianGroup, GSequence, InstanceSpec, PrimaryElement, PrimaryMonoidSpec};

const CAP: u32 = 8;

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    failures: Vec<String>,
    summary: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new(), summary: String::new() }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

fn instance_file(name: &str) -> InstanceSpec {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    InstanceSpec::from_json_str(&text).unwrap()
}

fn label(inst: &InstanceSpec) -> String {
    inst.to_json().to_string()
}

/// Number of components whose unit generators reach the nonzero class of
/// `C2`; for `C2` the image is everything iff some generator is nonzero.
fn full_image_count(inst: &InstanceSpec) -> u32 {
    let zero = inst.group().zero();
    inst.components().iter().filter(|c| c.iota_units().iter().any(|g| *g != zero)).count() as u32
}

fn rho_equals(b: &BruteInvariants, num: u32, den: u32) -> bool {
    *b.rho.numer() * den == num * *b.rho.denom()
}

fn rho_above_one(b: &BruteInvariants) -> bool {
    b.rho.numer() > b.rho.denom()
}

/// Family (b): every exponent-one instance over `C2`, with its brute force
/// values at the cap.
fn family_b() -> Vec<(InstanceSpec, BruteInvariants)> {
    let mut out = Vec::new();
    for u in family_unit_groups() {
        for inst in exponent_one_family(&u, 3).unwrap() {
            let b = brute_invariants(&inst, CAP).unwrap();
            out.push((inst, b));
        }
    }
    out
}

fn criterion_1(family: &[(InstanceSpec, BruteInvariants)]) -> Outcome {
    let mut o = Outcome::new();
    let mut ks = BTreeSet::new();
    let mut units = BTreeSet::new();
    for (inst, b) in family {
        let k = full_image_count(inst);
        ks.insert(k);
        units.insert(inst.components()[0].primary().units().moduli().to_vec());
        let c = 2 + k.min(2);
        let delta: BTreeSet<u32> = (1..=c - 2).collect();
        o.require(b.c == c && b.cmon == c, || format!("{}: k = {k}, c = {}, cmon = {}", label(inst), b.c, b.cmon));
        o.require(rho_equals(b, c, 2), || format!("{}: k = {k}, rho = {}", label(inst), b.rho));
        o.require(b.delta == delta, || format!("{}: k = {k}, delta = {:?}", label(inst), b.delta));
    }
    o.require(ks == BTreeSet::from([0, 1, 2, 3]), || format!("k values covered: {ks:?}"));
    o.require(units.len() == 4, || format!("unit groups covered: {units:?}"));
    o.summary = format!("{} instances, k in {ks:?}, cap {CAP}", family.len());
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    for k in [2u32, 3] {
        let p = PrimaryMonoidSpec::sharp_example(k).unwrap();
        o.require(p.units().moduli() == [k, k], || format!("k = {k}: units {}", p.units()));
        let local = p.local_invariants(p.default_max_valuation()).unwrap();
        o.require(local.catenary == k, || format!("k = {k}: local c = {}", local.catenary));
    }
    o.summary = "local catenary degree k for k = 2, 3".into();
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    let mut instances = Vec::new();
    for u in family_unit_groups() {
        instances.extend(exponent_one_family(&u, 2).unwrap());
    }
    instances.extend(exponent_two_family().unwrap());
    for inst in &instances {
        o.require(inst.group().order() == 2, || format!("{}: class group is not C2", label(inst)));
        let closed = inst.atoms_closed_form().unwrap();
        let generic = inst.atoms_generic().unwrap();
        o.require(closed == generic, || {
            format!("{}: {} closed-form atoms, {} generic", label(inst), closed.len(), generic.len())
        });
    }
    o.require(instances.len() >= 20, || format!("only {} instances", instances.len()));
    o.summary = format!("{} instances with equal atom sets", instances.len());
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    let mut n = 0;
    for inst in small_group_instances().unwrap() {
        if inst.group().order() < 3 {
            continue;
        }
        n += 1;
        let b = brute_invariants(&inst, CAP).unwrap();
        o.require(b.min_delta == Some(1), || format!("{}: min delta {:?}", label(&inst), b.min_delta));
        o.require(rho_above_one(&b), || format!("{}: rho = {}", label(&inst), b.rho));
        o.require(b.c >= 3, || format!("{}: c = {}", label(&inst), b.c));
    }
    let orders: BTreeSet<usize> =
        small_group_instances().unwrap().iter().map(|i| i.group().order()).filter(|&n| n >= 3).collect();
    o.require(orders == BTreeSet::from([3, 4]), || format!("orders covered: {orders:?}"));
    o.summary = format!("{n} instances over C3, C4, C2+C2 at cap {CAP}");
    o
}

fn criterion_5(family: &[(InstanceSpec, BruteInvariants)]) -> Outcome {
    let mut o = Outcome::new();
    let zero_inst = instance_file("tame_zero.json");
    let mut tame_cases = vec![zero_inst];
    tame_cases.extend(tame_degree_instances().unwrap());
    for inst in &tame_cases {
        let zero = inst.group().zero();
        let all_zero = inst.components().iter().all(|c| *c.iota_p() == zero && c.iota_units().iter().all(|u| *u == zero));
        o.require(all_zero, || format!("{}: not all classes zero", label(inst)));
        let b = brute_invariants(inst, CAP).unwrap();
        o.require(b.half_factorial && b.t == 2, || format!("{}: hf = {}, t = {}", label(inst), b.half_factorial, b.t));
    }
    // type-(1,1) instances only: the exponent-one family and the sanity
    // instances whose components all have exponent one
    let mut sweep: Vec<(InstanceSpec, BruteInvariants)> = family.to_vec();
    for inst in small_group_instances().unwrap() {
        if inst.components().iter().all(|c| c.primary().exponent() == 1) {
            let b = brute_invariants(&inst, CAP).unwrap();
            sweep.push((inst, b));
        }
    }
    for (inst, b) in &sweep {
        let zero = inst.group().zero();
        let mut facts = vec![b.cmon <= 2, b.c <= 2, b.half_factorial];
        if inst.components().iter().all(|c| *c.iota_p() == zero) {
            facts.push(b.t <= 2);
        }
        o.require(facts.iter().all(|&f| f == facts[0]), || {
            format!("{}: cmon = {}, c = {}, hf = {}, t = {}", label(inst), b.cmon, b.c, b.half_factorial, b.t)
        });
    }
    o.summary = format!("t = 2 on {} instances; equivalence on {} instances", tame_cases.len(), sweep.len());
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let mut pairs = 0;
    let mut ks = BTreeSet::new();
    for inst in chain_instances().unwrap() {
        let k = full_image_count(&inst);
        ks.insert(k);
        let r = check_chain_lemma(&inst, CAP, 5..=6).unwrap();
        pairs += r.pairs_checked;
        o.require(r.pairs_checked > 0, || format!("{}: no pairs with |y| in 5..=6", label(&inst)));
        o.require(r.counterexamples.is_empty(), || {
            format!("{}: {} counterexamples", label(&inst), r.counterexamples.len())
        });
    }
    o.require(ks == BTreeSet::from([1, 2]), || format!("k values covered: {ks:?}"));
    o.summary = format!("{pairs} pairs with 5 <= |y| <= 6 at cap {CAP}, no counterexamples");
    o
}

fn criterion_7(family: &[(InstanceSpec, BruteInvariants)]) -> Outcome {
    let mut o = Outcome::new();
    let mut all: Vec<(InstanceSpec, BruteInvariants)> = family.to_vec();
    for inst in exponent_two_family().unwrap().into_iter().chain(small_group_instances().unwrap()) {
        let b = brute_invariants(&inst, CAP).unwrap();
        all.push((inst, b));
    }
    let mut checked = 0;
    for (inst, b) in &all {
        let bounds = check_bounds(inst, b).unwrap();
        let names: Vec<&str> = bounds.iter().map(|x| x.name.as_str()).collect();
        // every generated component is half-factorial, so all four families apply
        for needed in ["rho <= D(G) * rho(T)", "rho(H, D) <= 1", "c <= max(floor((D + 1) / 2 * c(D)), D^2)"] {
            o.require(names.contains(&needed), || format!("{}: bound {needed} missing", label(inst)));
        }
        let per_component = names.iter().filter(|n| n.starts_with("component ")).count();
        o.require(per_component == inst.components().len(), || format!("{}: per-component bounds missing", label(inst)));
        for x in &bounds {
            checked += 1;
            o.require(x.holds, || format!("{}: {} fails, {} vs {}", label(inst), x.name, x.lhs, x.rhs));
        }
    }
    o.summary = format!("{checked} bound instances over {} generated instances", all.len());
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let mut groups: Vec<(Vec<u32>, usize)> = (1..=8).map(|n| (vec![n], n as usize)).collect();
    for m in 2..=6u32 {
        for n in (m..=36 / m).filter(|n| n % m == 0) {
            groups.push((vec![m, n], (m + n - 1) as usize));
        }
    }
    for (moduli, expected) in &groups {
        let g = FiniteAbelianGroup::new(moduli.clone()).unwrap();
        let d = davenport_constant(&g).unwrap();
        o.require(d == *expected, || format!("{g}: D = {d}, closed form {expected}"));
    }
    let elapsed = start.elapsed();
    o.require(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"));
    o.summary = format!("{} groups in {:.2}s", groups.len(), elapsed.as_secs_f64());
    o
}

/// `a / b` computed on the ambient representation, `None` unless the
/// quotient is a block.
fn quotient(inst: &InstanceSpec, a: &AmbientElement, b: &AmbientElement) -> Option<AmbientElement> {
    let mut free = GSequence::new();
    for (g, n) in a.free.iter() {
        let m = n.checked_sub(b.free.count(g))?;
        if m > 0 {
            free.push(g.clone(), m);
        }
    }
    if b.free.iter().any(|(g, n)| a.free.count(g) < n) {
        return None;
    }
    let mut parts = Vec::new();
    for ((x, y), c) in a.parts.iter().zip(&b.parts).zip(inst.components()) {
        let units = c.primary().units();
        let q = PrimaryElement {
            valuation: x.valuation.checked_sub(y.valuation)?,
            unit: units.add(&x.unit, &units.neg(&y.unit).unwrap()).unwrap(),
        };
        if !c.primary().contains(&q) {
            return None;
        }
        parts.push(q);
    }
    let q = AmbientElement { free, parts };
    inst.is_block(&q).unwrap().then_some(q)
}

/// Every ordered way of peeling atoms off `rest`; sorted and deduplicated
/// by the caller.
fn naive_dfs(
    inst: &InstanceSpec,
    atoms: &[AmbientElement],
    rest: &AmbientElement,
    path: &mut Vec<AmbientElement>,
    out: &mut Vec<Vec<AmbientElement>>,
) {
    if rest.degree() == 0 {
        out.push(path.clone());
        return;
    }
    for a in atoms {
        if let Some(q) = quotient(inst, rest, a) {
            path.push(a.clone());
            naive_dfs(inst, atoms, &q, path, out);
            path.pop();
        }
    }
}

fn criterion_9() -> Outcome {
    const DEGREE: u32 = 6;
    let mut o = Outcome::new();
    let mut compared = 0;
    for name in ["k2.json", "c2xc2.json"] {
        let inst = instance_file(name);
        let elements: Vec<AmbientElement> =
            inst.enumerate_b(DEGREE, false).unwrap().iter().map(|c| inst.decode(c)).collect();
        let identity = inst.identity_element();
        let atoms: Vec<AmbientElement> = elements
            .iter()
            .filter(|a| a.degree() > 0)
            .filter(|a| {
                !elements
                    .iter()
                    .filter(|b| b.degree() > 0 && b.degree() < a.degree())
                    .any(|b| quotient(&inst, a, b).is_some_and(|q| q != identity))
            })
            .cloned()
            .collect();
        let table = inst.block_table(DEGREE, false).unwrap();
        let engine_atoms: BTreeSet<AmbientElement> =
            (0..table.atoms.len() as u32).map(|id| inst.decode(table.atoms.get(id))).collect();
        let naive_atoms: BTreeSet<AmbientElement> = atoms.iter().cloned().collect();
        o.require(engine_atoms == naive_atoms, || {
            format!("{name}: {} engine atoms, {} naive", engine_atoms.len(), naive_atoms.len())
        });
        for a in &elements {
            let mut raw = Vec::new();
            naive_dfs(&inst, &atoms, a, &mut Vec::new(), &mut raw);
            let naive: BTreeSet<Vec<AmbientElement>> = raw
                .into_iter()
                .map(|mut f| {
                    f.sort();
                    f
                })
                .collect();
            let coords = inst.encode(a).unwrap();
            let engine: BTreeSet<Vec<AmbientElement>> = table
                .factorizations
                .get(&coords)
                .map(|z| {
                    z.iter()
                        .map(|f| {
                            let mut v: Vec<AmbientElement> =
                                f.ids().iter().map(|&id| inst.decode(table.atoms.get(id))).collect();
                            v.sort();
                            v
                        })
                        .collect()
                })
                .unwrap_or_default();
            compared += 1;
            o.require(naive == engine, || {
                format!("{name}: element {:?}: naive {} factorizations, engine {}", a, naive.len(), engine.len())
            });
        }
    }
    o.summary = format!("{compared} elements of degree <= {DEGREE} on 2 instances");
    o
}

fn criterion_10() -> Outcome {
    let mut o = Outcome::new();
    let inst = instance_file("k1.json");
    o.require(full_image_count(&inst) == 1, || "k1.json does not have k = 1".into());
    let b = brute_invariants(&inst, CAP).unwrap();
    o.require(rho_equals(&b, 3, 2), || format!("rho = {}", b.rho));
    o.summary = format!("rho = {} at cap {CAP}", b.rho);
    o
}

fn main() -> ExitCode {
    let start = Instant::now();
    let family = family_b();
    let family_time = start.elapsed();
    let criteria: Vec<Criterion> = vec![
        ("exponent-one family: c = cmon = 2 + min(2, k), rho = c/2, delta = [1, c-2]", Box::new(|| criterion_1(&family))),
        ("sharp local example: c = k", Box::new(criterion_2)),
        ("closed-form atoms equal generic atoms", Box::new(criterion_3)),
        ("class groups of order 3 and 4: min delta = 1, rho > 1, c >= 3", Box::new(criterion_4)),
        ("tame degree 2 and the four-way equivalence", Box::new(|| criterion_5(&family))),
        ("monotone R-chains for 5 <= |y| <= 6", Box::new(criterion_6)),
        ("bound suite", Box::new(|| criterion_7(&family))),
        ("Davenport constants", Box::new(criterion_8)),
        ("naive factorization oracle", Box::new(criterion_9)),
        ("k = 1 instance: rho = 3/2", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let status = if o.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("{status} criterion {}: {name} ({})", i + 1, o.summary);
        for f in o.failures.iter().take(20) {
            println!("    {f}");
        }
        if !o.failures.is_empty() {
            failed += 1;
        }
    }
    println!("family brute force at cap {CAP}: {:.1}s; total {:.1}s", family_time.as_secs_f64(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
