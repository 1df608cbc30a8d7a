//! `blockfact`: atoms, factorizations, invariants, predictions and the
//! verification suite for T-block monoids given as JSON instance files.

mod output;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use blockfact::abelian::davenport_constant;
use blockfact::config::{ambient_to_json, parse_ambient, parse_group_literal};
use blockfact::factorization::ElementInvariants;
use blockfact::predict::predict;
use blockfact::tblock::DEFAULT_CAP;
use blockfact::verify::{element_rows, run_suite, Brute, Scenario, SuiteConfig};
use blockfact::{Error, InstanceSpec};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use output::{emit, lines, Format, Report};

#[derive(Parser, Debug)]
#[command(name = "blockfact", version, about = "Factorization invariants of T-block monoids")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Degree cap for enumerations; `verify` uses per-scenario caps unless set.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    cap: Option<u32>,

    /// Keep the prime letter 0 in enumerations.
    #[arg(long, global = true)]
    include_zero: bool,

    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    format: Format,

    /// Output file; `-` is standard output.
    #[arg(long, global = true, default_value = "-")]
    out: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the atoms, marking agreement with the closed form.
    Atoms { instance: PathBuf },
    /// Factorizations and per-element invariants of one block.
    Factorize {
        instance: PathBuf,
        /// JSON element literal, e.g. '{"free": {"1": 2}, "parts": [...]}'
        element: String,
    },
    /// Monoid-level invariants up to the cap.
    Invariants {
        instance: PathBuf,
        /// Also list every element with its own invariants.
        #[arg(long)]
        elements: bool,
    },
    /// Closed-form predictions with the statement behind each field.
    Predict { instance: PathBuf },
    /// Run the verification scenarios.
    Verify {
        #[arg(long, default_value = "default")]
        suite: String,
        /// Restrict to one scenario, e.g. `exponent_one_family`; repeatable.
        #[arg(long, value_parser = parse_scenario)]
        scenario: Vec<Scenario>,
        /// Record wall-clock time per report.
        #[arg(long)]
        timing: bool,
    },
    /// Davenport constant of a group literal such as "[3,3]".
    Davenport { group: String },
}

fn parse_scenario(s: &str) -> std::result::Result<Scenario, String> {
    serde_json::from_value(Value::String(s.to_string())).map_err(|_| {
        let names: Vec<String> = Scenario::ALL.iter().map(|s| json!(s).as_str().unwrap_or_default().to_string()).collect();
        format!("unknown scenario `{s}`; expected one of {}", names.join(", "))
    })
}

/// Input the user supplied could not be read or parsed.
#[derive(Debug)]
struct InputError(String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

enum Status {
    Clean,
    Violation,
}

fn load_instance(path: &Path) -> Result<InstanceSpec> {
    let text = std::fs::read_to_string(path).with_context(|| InputError(format!("cannot read {}", path.display())))?;
    InstanceSpec::from_json_str(&text).with_context(|| InputError(format!("malformed instance {}", path.display())))
}

fn atoms(inst: &InstanceSpec, include_zero: bool) -> Result<(Report, Status)> {
    let generic = inst.atoms_generic_coords()?;
    let closed = match inst.atoms_closed_form_coords() {
        Ok(c) => Some(c),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let keep = |a: &&blockfact::Coords| include_zero || !inst.has_zero_letter(a);
    let generic: Vec<_> = generic.iter().filter(keep).cloned().collect();
    let closed: Option<Vec<_>> = closed.map(|c| c.iter().filter(keep).cloned().collect());
    let mut rows = Vec::new();
    for a in &generic {
        rows.push(json!({
            "atom": ambient_to_json(&inst.decode(a)),
            "degree": inst.coords_degree(a),
            "closed_form": closed.as_ref().map(|c| c.contains(a)),
        }));
    }
    let mut only_closed = Vec::new();
    if let Some(c) = &closed {
        only_closed = c.iter().filter(|a| !generic.contains(a)).map(|a| ambient_to_json(&inst.decode(a))).collect();
    }
    let agree = closed.as_ref().map(|c| c.len() == generic.len() && only_closed.is_empty() && rows.iter().all(|r| r["closed_form"] == json!(true)));
    let doc = json!({
        "digest": inst.digest(),
        "cap": inst.atom_degree_bound()?,
        "count": generic.len(),
        "closed_form_agrees": agree,
        "closed_form_only": only_closed,
        "atoms": rows,
    });
    let mut pretty = lines(&[
        ("digest", inst.digest()),
        ("degree bound", doc["cap"].to_string()),
        ("atoms", generic.len().to_string()),
        ("closed form", agree.map_or("not available".into(), |a| if a { "agrees" } else { "DISAGREES" }.to_string())),
    ]);
    for r in &rows {
        let flag = match r["closed_form"].as_bool() {
            Some(true) | None => "",
            Some(false) => "  (not in closed form)",
        };
        pretty.push_str(&format!("  {}{flag}\n", r["atom"]));
    }
    for a in &only_closed {
        pretty.push_str(&format!("  {a}  (closed form only)\n"));
    }
    let status = if agree == Some(false) { Status::Violation } else { Status::Clean };
    let mut report = Report { doc, rows, pretty };
    report.stamp_rows(&["digest", "cap"]);
    Ok((report, status))
}

fn factorize(inst: &InstanceSpec, literal: &str, cap: u32, include_zero: bool) -> Result<Report> {
    let v: Value = serde_json::from_str(literal).with_context(|| InputError("malformed element literal".into()))?;
    let a = parse_ambient(inst, &v)?;
    if !inst.is_block(&a)? {
        return Err(Error::Invalid { path: "element".into(), message: "not a block: its class is not zero".into() }.into());
    }
    let degree = a.degree();
    if degree > cap {
        return Err(Error::ResourceCap { what: "element degree", requested: degree as u64, limit: cap as u64 }.into());
    }
    let coords = inst.encode(&a)?;
    let table = inst.block_table(degree, include_zero || inst.has_zero_letter(&coords))?;
    let z = table.factorizations.get(&coords).context("element missing from its own table")?;
    let inv = ElementInvariants::compute(z);
    let spelled: Vec<Vec<Value>> = z
        .iter()
        .map(|f| f.ids().iter().map(|&id| ambient_to_json(&inst.decode(table.atoms.get(id)))).collect())
        .collect();
    let doc = json!({
        "digest": inst.digest(),
        "cap": cap,
        "element": ambient_to_json(&a),
        "Z": spelled,
        "L": inv.lengths,
        "delta": inv.delta,
        "rho": inv.rho.to_string(),
        "c": inv.catenary,
        "cmon": inv.monotone_catenary,
        "t": inv.tame,
    });
    let rows = spelled.iter().map(|f| json!({"length": f.len(), "factorization": f})).collect();
    let mut pretty = lines(&[
        ("digest", inst.digest()),
        ("element", doc["element"].to_string()),
        ("factorizations", z.len().to_string()),
        ("L", doc["L"].to_string()),
        ("delta", doc["delta"].to_string()),
        ("rho", inv.rho.to_string()),
        ("c", inv.catenary.to_string()),
        ("cmon", inv.monotone_catenary.to_string()),
        ("t", inv.tame.to_string()),
    ]);
    for f in &spelled {
        let atoms: Vec<String> = f.iter().map(Value::to_string).collect();
        pretty.push_str(&format!("  [{}]\n", atoms.join(" ")));
    }
    let mut report = Report { doc, rows, pretty };
    report.stamp_rows(&["digest", "cap"]);
    Ok(report)
}

fn invariants(inst: &InstanceSpec, cap: u32, include_zero: bool, per_element: bool) -> Result<Report> {
    let brute = Brute::compute_with(inst, cap, include_zero)?;
    let b = &brute.invariants;
    let mut doc = json!({"digest": inst.digest(), "cap": cap, "include_zero": include_zero});
    let Value::Object(fields) = serde_json::to_value(b)? else { unreachable!("a struct serializes to an object") };
    doc.as_object_mut().expect("object literal").extend(fields);
    let rows = if per_element { element_rows(inst, &brute.table) } else { Vec::new() };
    let pretty = lines(&[
        ("digest", inst.digest()),
        ("cap", cap.to_string()),
        ("elements", b.elements.to_string()),
        ("half-factorial", b.half_factorial.to_string()),
        ("c", b.c.to_string()),
        ("cmon", b.cmon.to_string()),
        ("t", b.t.to_string()),
        ("rho", b.rho.to_string()),
        ("delta", json!(b.delta).to_string()),
        ("rho(H, D)", b.rho_relative.to_string()),
    ]);
    let mut report = Report { doc, rows, pretty };
    report.stamp_rows(&["digest", "cap"]);
    Ok(report)
}

fn prediction(inst: &InstanceSpec) -> Result<Report> {
    let p = predict(inst);
    let mut doc = json!({"digest": inst.digest(), "cap": Value::Null});
    let Value::Object(fields) = serde_json::to_value(&p)? else { unreachable!("a struct serializes to an object") };
    doc.as_object_mut().expect("object literal").extend(fields);
    let set = |s: &Option<std::collections::BTreeSet<usize>>| s.as_ref().map_or("n/a".into(), |s| json!(s).to_string());
    let mut pretty = lines(&[
        ("digest", inst.digest()),
        ("half-factorial", p.half_factorial.map_or("unknown".into(), |h| h.to_string())),
        ("c", p.c.to_string()),
        ("cmon", p.cmon.to_string()),
        ("t", p.t.to_string()),
        ("rho", p.rho.to_string()),
        ("delta", p.delta.to_string()),
        ("k", p.k.map_or("n/a".into(), |k| k.to_string())),
        ("I", set(&p.i_set)),
        ("J", set(&p.j_set)),
    ]);
    pretty.push_str("provenance:\n");
    for (field, why) in &p.provenance {
        pretty.push_str(&format!("  {field}: {why}\n"));
    }
    for trip in p.tripwires() {
        pretty.push_str(&format!("tripwire: {trip}\n"));
    }
    Ok(Report { doc, rows: Vec::new(), pretty })
}

fn verify(suite: &str, scenarios: &[Scenario], cap: Option<u32>, timing: bool) -> Result<(Report, Status)> {
    if suite != "default" {
        return Err(Error::Invalid { path: "suite".into(), message: format!("unknown suite `{suite}`, expected `default`") }.into());
    }
    let config = SuiteConfig {
        scenarios: if scenarios.is_empty() { Scenario::ALL.to_vec() } else { scenarios.to_vec() },
        cap,
        record_timing: timing,
    };
    let reports = run_suite(&config)?;
    let bad: Vec<_> = reports.iter().filter(|r| r.has_violation() || r.error.is_some()).collect();
    let mut pretty = String::new();
    for s in &config.scenarios {
        let mine: Vec<_> = reports.iter().filter(|r| r.scenario == *s).collect();
        let failed = mine.iter().filter(|r| r.has_violation() || r.error.is_some()).count();
        pretty.push_str(&format!("{}: {} reports, {failed} failing\n", json!(s).as_str().unwrap_or_default(), mine.len()));
    }
    for r in &bad {
        pretty.push_str(&format!("FAIL {} (cap {}): {}\n", r.label, r.cap, r.error.as_deref().unwrap_or("violation")));
        for c in r.checks.iter().filter(|c| c.verdict == blockfact::verify::Verdict::Violation) {
            pretty.push_str(&format!("  {}: predicted {}, brute {}\n", c.name, c.predicted, c.brute));
        }
        for b in r.bounds.iter().filter(|b| !b.holds) {
            pretty.push_str(&format!("  bound {}: {} vs {}\n", b.name, b.lhs, b.rhs));
        }
    }
    let status = if bad.is_empty() { Status::Clean } else { Status::Violation };
    let rows: Vec<Value> = reports.iter().map(serde_json::to_value).collect::<std::result::Result<_, _>>()?;
    let doc = json!({"suite": suite, "cap": cap, "failing": bad.len(), "reports": rows});
    Ok((Report { doc, rows, pretty }, status))
}

fn davenport(literal: &str) -> Result<Report> {
    let g = parse_group_literal(literal)?;
    let d = davenport_constant(&g)?;
    let doc = json!({"group": g.moduli(), "order": g.order(), "davenport": d});
    let pretty = format!("{d}\n");
    Ok(Report { doc, rows: Vec::new(), pretty })
}

fn run(cli: &Cli) -> Result<Status> {
    let cap = cli.cap.unwrap_or(DEFAULT_CAP);
    let (report, status) = match &cli.command {
        Command::Atoms { instance } => atoms(&load_instance(instance)?, cli.include_zero)?,
        Command::Factorize { instance, element } => {
            (factorize(&load_instance(instance)?, element, cap, cli.include_zero)?, Status::Clean)
        }
        Command::Invariants { instance, elements } => {
            (invariants(&load_instance(instance)?, cap, cli.include_zero, *elements)?, Status::Clean)
        }
        Command::Predict { instance } => (prediction(&load_instance(instance)?)?, Status::Clean),
        Command::Verify { suite, scenario, timing } => verify(suite, scenario, cli.cap, *timing)?,
        Command::Davenport { group } => (davenport(group)?, Status::Clean),
    };
    emit(&report.render(cli.format)?, &cli.out)?;
    Ok(status)
}

/// 2 for malformed input, 3 for a resource cap, 1 otherwise.
fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::ResourceCap { .. } => 3,
                _ => 2,
            };
        }
    }
    if e.downcast_ref::<InputError>().is_some() {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Clean) => ExitCode::SUCCESS,
        Ok(Status::Violation) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
