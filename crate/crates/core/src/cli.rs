//! Command-line surface.
//!
//! Inputs are JSON files or `catalog:NAME` (see [`crate::catalog`]); matroids
//! also accept `random:MAX_N`, drawn from `--seed`. Exit codes: 0 success,
//! 1 verification mismatch, 2 usage or input error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::adjoint::{
    enumerate_adjoints, lower_matroid, upper_matroid, AdjointContext, AdjointReport, CircuitUniverse,
    EnumerationOptions,
};
use crate::bitset;
use crate::catalog;
use crate::derived::{
    conjecture_report, delta_prime_dependents, derived_dependents, valx_check, DependentClosure,
    Properness, ValX, XFamily, VALX_LIMIT,
};
use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::gf::GFMatrix;
use crate::iso::is_isomorphic;
use crate::lattice::{lattice_of_flats, FiniteLattice};
use crate::matroid::{linear_derived_matroid, Matroid};
use crate::nbb::{self, LatticeOp};
use crate::random;
use crate::repro::{self, ReproResult};

/// Node budget of `adjoint enumerate` and `derived conjecture` without `--long`.
pub const DEFAULT_BUDGET: u64 = 5_000_000;

/// Rank tables are printed in JSON up to this many circuits.
const RANK_TABLE_LIMIT: usize = 16;

#[derive(Parser, Debug)]
#[command(name = "adjointforge", version, about = "Lattice independence, adjoint matroids and derived matroids")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Emit JSON instead of text.
    #[arg(long, global = true, conflicts_with = "table")]
    pub json: bool,
    /// Emit text tables (the default).
    #[arg(long, global = true)]
    pub table: bool,
    /// Lift the node budget of heavy enumerations.
    #[arg(long, global = true)]
    pub long: bool,
    /// Worker threads (overridden by ADJOINTFORGE_WORKERS).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Seed for `random:` inputs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Finite lattices.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Independent sets of atoms.
    #[command(subcommand)]
    Nbb(NbbCmd),
    /// Matroid utilities.
    #[command(subcommand)]
    Matroid(MatroidCmd),
    /// Adjoints of a matroid.
    #[command(subcommand)]
    Adjoint(AdjointCmd),
    /// Combinatorial derived matroids.
    #[command(subcommand)]
    Derived(DerivedCmd),
    /// Recompute reference results (`all` for every instance).
    Repro { name: String },
}

#[derive(Subcommand, Debug)]
pub enum LatticeCmd {
    /// Structural properties.
    Check { lattice: String },
    /// Check independence under restriction, contraction, truncation and duality.
    Ops { lattice: String },
}

#[derive(Subcommand, Debug)]
pub enum NbbCmd {
    /// Independent atom sets.
    Independents { lattice: String },
    /// Maximal independent atom sets.
    Bases { lattice: String },
    /// Extend an atom bijection into a geometric lattice.
    Embed {
        lattice: String,
        target: String,
        /// Target atom position of each source atom, comma separated.
        #[arg(long)]
        map: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum MatroidCmd {
    Info { matroid: String },
    Dual { matroid: String },
    /// Linear derived matroid of a matrix (`catalog:MatrixA` or {field, matrix}).
    DerivedLinear { matrix: String },
    Iso { first: String, second: String },
}

#[derive(Subcommand, Debug)]
pub enum AdjointCmd {
    /// Is N an adjoint of M?
    Check {
        matroid: String,
        candidate: String,
        /// Also report the literal containment check (dependence only).
        #[arg(long)]
        literal: bool,
    },
    Enumerate {
        matroid: String,
        /// Search nodes before giving up (0 = unbounded).
        #[arg(long)]
        budget: Option<u64>,
    },
    /// The lower and upper bound families.
    Bounds { matroid: String },
}

#[derive(Subcommand, Debug)]
pub enum DerivedCmd {
    Delta { matroid: String },
    DeltaPrime { matroid: String },
    /// val_X of a circuit subset: comma separated circuit indices or `all`.
    Valx {
        matroid: String,
        subset: String,
        /// Require each member to be strictly inside the earlier union.
        #[arg(long)]
        strict_proper: bool,
    },
    Conjecture { matroid: String },
}

/// Output of one command.
struct Outcome {
    json: Value,
    text: String,
    ok: bool,
}

impl Outcome {
    fn ok(json: Value, text: String) -> Outcome {
        Outcome { json, text, ok: true }
    }
}

/// Parse `argv` (including the program name), run, and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_workers(cli.global.workers) {
        eprintln!("error: {e}");
        return 2;
    }
    match execute(&cli) {
        Ok(out) => {
            if cli.global.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("json prints"));
            } else {
                print!("{}", out.text);
            }
            if out.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn configure_workers(flag: Option<usize>) -> Result<()> {
    let env = match std::env::var("ADJOINTFORGE_WORKERS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| Error::Format(format!("ADJOINTFORGE_WORKERS={v}")))?,
        ),
        Err(_) => None,
    };
    if let Some(n) = env.or(flag) {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Lattice(LatticeCmd::Check { lattice }) => lattice_check(&load_lattice(lattice)?),
        Command::Lattice(LatticeCmd::Ops { lattice }) => lattice_ops(&load_lattice(lattice)?),
        Command::Nbb(NbbCmd::Independents { lattice }) => {
            let l = load_lattice(lattice)?;
            Ok(family_outcome("independent", &nbb::independence_family(&l)))
        }
        Command::Nbb(NbbCmd::Bases { lattice }) => {
            let l = load_lattice(lattice)?;
            Ok(family_outcome("bases", &nbb::lattice_bases(&l)))
        }
        Command::Nbb(NbbCmd::Embed { lattice, target, map }) => {
            nbb_embed(&load_lattice(lattice)?, &load_lattice(target)?, &parse_indices(map)?)
        }
        Command::Matroid(MatroidCmd::Info { matroid }) => Ok(matroid_info(&load_matroid(matroid, g)?)),
        Command::Matroid(MatroidCmd::Dual { matroid }) => {
            let d = load_matroid(matroid, g)?.dual();
            Ok(Outcome::ok(d.to_json(), format!("{}\n", d.to_json())))
        }
        Command::Matroid(MatroidCmd::DerivedLinear { matrix }) => {
            let a = load_matrix(matrix)?;
            let d = linear_derived_matroid(&a)?;
            let text = format!("elements {}  rank {}  bases {}\n", d.n(), d.rank(), d.bases().len());
            Ok(Outcome::ok(d.to_json(), text))
        }
        Command::Matroid(MatroidCmd::Iso { first, second }) => {
            let perm = is_isomorphic(&load_matroid(first, g)?, &load_matroid(second, g)?);
            let text = match &perm {
                Some(p) => format!("isomorphic: {p:?}\n"),
                None => "not isomorphic\n".to_string(),
            };
            Ok(Outcome { ok: perm.is_some(), json: json!({ "isomorphic": perm.is_some(), "map": perm }), text })
        }
        Command::Adjoint(AdjointCmd::Check { matroid, candidate, literal }) => {
            adjoint_check(&load_matroid(matroid, g)?, &load_matroid(candidate, g)?, *literal)
        }
        Command::Adjoint(AdjointCmd::Enumerate { matroid, budget }) => {
            let m = load_matroid(matroid, g)?;
            let report = enumerate_adjoints(&m, enumeration_options(g, *budget))?;
            Ok(Outcome { ok: report.complete, json: report.to_json(), text: report_text(&report) })
        }
        Command::Adjoint(AdjointCmd::Bounds { matroid }) => adjoint_bounds(&load_matroid(matroid, g)?),
        Command::Derived(DerivedCmd::Delta { matroid }) => {
            let m = load_matroid(matroid, g)?;
            closure_outcome(&m, &derived_dependents(&m)?)
        }
        Command::Derived(DerivedCmd::DeltaPrime { matroid }) => {
            let m = load_matroid(matroid, g)?;
            closure_outcome(&m, &delta_prime_dependents(&m)?)
        }
        Command::Derived(DerivedCmd::Valx { matroid, subset, strict_proper }) => {
            valx(&load_matroid(matroid, g)?, subset, *strict_proper)
        }
        Command::Derived(DerivedCmd::Conjecture { matroid }) => {
            let m = load_matroid(matroid, g)?;
            let r = conjecture_report(&m, enumeration_options(g, None))?;
            let json = serde_json::to_value(&r).expect("report serializes");
            Ok(Outcome::ok(json.clone(), key_value_text(&json)))
        }
        Command::Repro { name } => repro_cmd(name, g),
    }
}

fn enumeration_options(g: &Global, budget: Option<u64>) -> EnumerationOptions {
    let node_budget = match (budget, g.long) {
        (Some(b), _) => b,
        (None, true) => 0,
        (None, false) => DEFAULT_BUDGET,
    };
    EnumerationOptions { node_budget, ..Default::default() }
}

fn read_json(path: &str) -> Result<Value> {
    let text = std::fs::read_to_string(Path::new(path)).map_err(|e| Error::Format(format!("{path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{path}: {e}")))
}

pub fn load_matroid(spec: &str, g: &Global) -> Result<Matroid> {
    if let Some(name) = spec.strip_prefix("catalog:") {
        return catalog::by_name(name);
    }
    if let Some(max_n) = spec.strip_prefix("random:") {
        let max_n: usize = max_n.parse().map_err(|_| Error::Format(format!("bad size in `{spec}`")))?;
        if !(3..=12).contains(&max_n) {
            return Err(Error::Format("random size must be in 3..=12".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
        return Ok(random::small(&mut rng, max_n));
    }
    Matroid::from_json(&read_json(spec)?)
}

pub fn load_lattice(spec: &str) -> Result<FiniteLattice> {
    match spec.strip_prefix("catalog:") {
        Some(name) => catalog::lattice_by_name(name),
        None => FiniteLattice::from_json(&read_json(spec)?),
    }
}

fn load_matrix(spec: &str) -> Result<GFMatrix> {
    if let Some(name) = spec.strip_prefix("catalog:") {
        return if name.eq_ignore_ascii_case("MatrixA") {
            Ok(catalog::matrix_a())
        } else {
            Err(Error::UnknownName(format!("{name} (only MatrixA is a catalog matrix)")))
        };
    }
    #[derive(serde::Deserialize)]
    struct Raw {
        field: u32,
        matrix: Vec<Vec<u32>>,
    }
    let raw: Raw = serde_json::from_value(read_json(spec)?).map_err(|e| Error::Format(e.to_string()))?;
    GFMatrix::from_rows(raw.field, raw.matrix)
}

fn parse_indices(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().map_err(|_| Error::Format(format!("not an index: `{t}`"))))
        .collect()
}

fn lattice_check(l: &FiniteLattice) -> Result<Outcome> {
    let json = json!({
        "elements": l.len(),
        "height": l.height(),
        "atoms": l.num_atoms(),
        "atomic": l.is_atomic(),
        "coatomic": l.is_coatomic(),
        "geometric": l.is_geometric(),
        "modular": l.is_modular(),
        "independent_sets": nbb::independence_family(l).len(),
    });
    Ok(Outcome::ok(json.clone(), key_value_text(&json)))
}

fn lattice_ops(l: &FiniteLattice) -> Result<Outcome> {
    let mut ops = Vec::new();
    for x in 0..l.len() {
        let r = l.rank(x);
        if r >= 1 {
            ops.push(("restrict", x, LatticeOp::Restrict(x)));
        }
        if r >= 1 && r < l.height() {
            ops.push(("contract", x, LatticeOp::Contract(x)));
        }
    }
    for k in 2..=l.height() {
        ops.push(("truncate", k, LatticeOp::Truncate(k)));
    }
    ops.push(("dual", 0, LatticeOp::Dual));
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut ok = true;
    for (name, arg, op) in ops {
        // None: not applicable to this element
        let verdict = nbb::verify_lattice_op_families(l, op).ok();
        if verdict == Some(false) {
            ok = false;
        }
        let shown = match verdict {
            Some(true) => "ok",
            Some(false) => "MISMATCH",
            None => "n/a",
        };
        let _ = writeln!(text, "{name:<9} {arg:>3}  {shown}");
        rows.push(json!({ "op": name, "arg": arg, "matches": verdict }));
    }
    Ok(Outcome { json: json!({ "ops": rows, "all_match": ok }), text, ok })
}

fn family_outcome(key: &str, f: &SetFamily) -> Outcome {
    let sets: Vec<Vec<usize>> = f.iter().map(bitset::to_indices).collect();
    let mut text = String::new();
    for s in &sets {
        let _ = writeln!(text, "{s:?}");
    }
    let _ = writeln!(text, "{} {key}", sets.len());
    Outcome::ok(json!({ "atoms": f.universe(), key: sets }), text)
}

fn nbb_embed(l: &FiniteLattice, p: &FiniteLattice, map: &[usize]) -> Result<Outcome> {
    let e = nbb::embed(l, p, map)?;
    let json = json!({
        "embedding": e.map.as_ref().map(|m| m.image.clone()),
        "images_independent": e.images_independent,
        "small_sets_dependent": e.small_sets_dependent,
    });
    let ok = e.map.is_some() && e.images_independent && e.small_sets_dependent;
    Ok(Outcome { text: key_value_text(&json), json, ok })
}

fn matroid_info(m: &Matroid) -> Outcome {
    let loops: Vec<usize> = (0..m.n()).filter(|&e| m.is_loop(e)).collect();
    let coloops: Vec<usize> = (0..m.n()).filter(|&e| m.is_coloop(e)).collect();
    let json = json!({
        "elements": m.n(),
        "rank": m.rank(),
        "corank": m.corank(),
        "bases": m.bases().len(),
        "circuits": m.circuits().len(),
        "flats": m.flats().len(),
        "loops": loops,
        "coloops": coloops,
        "modular": lattice_of_flats(m).lattice.is_modular(),
    });
    Outcome::ok(json.clone(), key_value_text(&json))
}

fn adjoint_check(m: &Matroid, n: &Matroid, literal: bool) -> Result<Outcome> {
    let ctx = AdjointContext::new(m);
    let routes = ctx.routes(n)?;
    let mut json = json!({
        "adjoint": routes.sandwich,
        "routes": routes,
        "routes_agree": routes.agree(),
    });
    if literal {
        json["literal_containment_check"] = json!(ctx.literal_containment_check(n));
    }
    Ok(Outcome { text: key_value_text(&json), ok: routes.agree() && routes.sandwich, json })
}

fn adjoint_bounds(m: &Matroid) -> Result<Outcome> {
    let ctx = AdjointContext::new(m);
    let describe = |b: Option<Matroid>| -> Result<Value> {
        Ok(match b {
            Some(b) => json!({
                "matroid": true,
                "bases": b.bases().len(),
                "adjoint": ctx.is_adjoint(&b)?,
            }),
            None => json!({ "matroid": false }),
        })
    };
    let json = json!({
        "circuits": ctx.universe.len(),
        "rank": ctx.universe.corank(),
        "mandatory": ctx.mandatory.len(),
        "allowed": ctx.allowed.len(),
        "lower": describe(lower_matroid(m))?,
        "upper": describe(upper_matroid(m))?,
    });
    Ok(Outcome::ok(json.clone(), key_value_text(&json)))
}

fn report_text(r: &AdjointReport) -> String {
    let mut text = String::new();
    let status = if r.complete { "complete" } else { "INCOMPLETE (node budget exhausted)" };
    let _ = writeln!(text, "{} adjoints, search {status}, {} nodes", r.count, r.stats.nodes);
    for (bases, count) in &r.histogram {
        let sizes: Vec<usize> =
            r.classes.iter().filter(|c| c.bases == *bases).map(|c| c.members).collect();
        let _ = writeln!(text, "  {bases:>5} bases: {count:>4}  classes {sizes:?}");
    }
    let bases = |ix: &[usize]| ix.iter().map(|&i| r.candidates[i].bases).collect::<Vec<_>>();
    let _ = writeln!(text, "minimal: {:?}", bases(&r.minimal));
    let _ = writeln!(text, "maximal: {:?}", bases(&r.maximal));
    text
}

fn closure_outcome(m: &Matroid, d: &DependentClosure) -> Result<Outcome> {
    let u = CircuitUniverse::new(m);
    let dm = d.to_matroid()?;
    let adjoint = AdjointContext::new(m).is_adjoint(&dm)?;
    let minimal: Vec<Vec<usize>> = d.minimal().iter().map(|&s| bitset::to_indices(s)).collect();
    let mut json = json!({
        "circuits": u.circuits().iter().map(|&c| bitset::to_indices(c)).collect::<Vec<_>>(),
        "iterations": d.iterations(),
        "minimal_dependents": minimal,
        "rank": dm.rank(),
        "bases": dm.bases().len(),
        "adjoint": adjoint,
    });
    if u.len() <= RANK_TABLE_LIMIT {
        json["rank_table"] = json!(d.rank_table()?);
    }
    let text = format!(
        "circuits {}  iterations {}  minimal dependents {}  rank {}  bases {}  adjoint {}\n",
        u.len(),
        d.iterations(),
        d.minimal().len(),
        dm.rank(),
        dm.bases().len(),
        adjoint
    );
    Ok(Outcome::ok(json, text))
}

fn valx(m: &Matroid, subset: &str, strict: bool) -> Result<Outcome> {
    let u = CircuitUniverse::new(m);
    if u.len() > VALX_LIMIT {
        return Err(Error::TooLarge(format!("{} circuits (limit {VALX_LIMIT})", u.len())));
    }
    let f = if subset.trim() == "all" {
        bitset::full(u.len())
    } else {
        let ix = parse_indices(subset)?;
        if let Some(&bad) = ix.iter().find(|&&i| i >= u.len()) {
            return Err(Error::Format(format!("circuit index {bad} out of range 0..{}", u.len())));
        }
        bitset::from_indices(ix)
    };
    let mode = if strict { Properness::StrictSubset } else { Properness::NotContained };
    let table = ValX::new(&XFamily::new(&u), mode)?;
    let mut json = json!({
        "subset": bitset::to_indices(f),
        "properness": mode,
        "val": table.get(f),
    });
    if !strict {
        let check = valx_check(m)?;
        json["rank_in_delta"] = json!(derived_dependents(m)?.rank_table()?[f as usize]);
        json["valx_is_rank_of_delta"] = json!(check.valx_is_rank());
    }
    Ok(Outcome::ok(json.clone(), key_value_text(&json)))
}

fn repro_cmd(name: &str, g: &Global) -> Result<Outcome> {
    let names: Vec<String> = if name.eq_ignore_ascii_case("all") {
        repro::instances().into_iter().map(String::from).collect()
    } else {
        vec![name.to_string()]
    };
    let mut results: Vec<ReproResult> = Vec::new();
    let mut text = String::new();
    for n in &names {
        let r = repro::reproduce(n, g.long, EnumerationOptions::default())?;
        let verdict = if r.matches { "match" } else { "MISMATCH" };
        let _ = writeln!(text, "{:<12} {verdict:<8} {:>8} ms", r.instance, r.elapsed_ms);
        if !r.matches {
            for field in &r.diff {
                let _ = writeln!(text, "    {field}: expected {} computed {}", field_of(&r, field, true), field_of(&r, field, false));
            }
        }
        results.push(r);
    }
    let ok = results.iter().all(|r| r.matches);
    Ok(Outcome { json: json!(results), text, ok })
}

fn field_of(r: &ReproResult, field: &str, expected: bool) -> String {
    let s = if expected { &r.expected } else { &r.computed };
    let v = serde_json::to_value(s).expect("summary serializes");
    v.get(field).map_or_else(String::new, |x| x.to_string())
}

fn key_value_text(v: &Value) -> String {
    let mut text = String::new();
    if let Value::Object(map) = v {
        let sorted: BTreeMap<&String, &Value> = map.iter().collect();
        for (k, x) in sorted {
            let _ = writeln!(text, "{k}: {x}");
        }
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(run(["adjointforge", "adjoint", "enumerate", "catalog:Q6"]), 0);
        assert_eq!(run(["adjointforge", "matroid", "iso", "catalog:Fano", "catalog:NonFano"]), 1);
        assert_eq!(run(["adjointforge", "lattice", "check", "catalog:NoSuchThing"]), 2);
        assert_eq!(run(["adjointforge", "frobnicate"]), 2);
        assert_eq!(run(["adjointforge", "repro", "K4", "--json"]), 0);
    }

    #[test]
    fn bad_lattice_file_is_an_input_error() {
        let path = std::env::temp_dir().join("adjointforge_bad_lattice.json");
        // two incomparable tops
        std::fs::write(&path, r#"{"elements":3,"leq_pairs":[[0,1],[0,2]]}"#).unwrap();
        assert_eq!(run(["adjointforge", "lattice", "check", path.to_str().unwrap()]), 2);
        assert!(matches!(load_lattice(path.to_str().unwrap()), Err(Error::NoBounds | Error::NotALattice(_))));
    }

    #[test]
    fn random_inputs_follow_the_seed() {
        let g = |seed| Global { json: false, table: false, long: false, workers: None, seed };
        assert_eq!(load_matroid("random:7", &g(3)).unwrap(), load_matroid("random:7", &g(3)).unwrap());
        assert!(load_matroid("random:40", &g(3)).is_err());
    }
}
