//! Command-line front end: argument parsing, algebra loading, verdict
//! rendering and run manifests.

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::algebra::{builtin, from_json, to_json, FiniteStructure};
use crate::clone::{find_discriminator_term, find_majority_term, find_representing_term, CloneBounds, FunctionTable, Representation};
use crate::congruences::{
    check_cep, check_fraser_horn, congruence_lattice, principal_congruence, synthesize_dpc_formula, Congruence, LatticeBounds,
    RelContext,
};
use crate::definability::{check, Bounds, Counterexample, Query, Verdict};
use crate::error::{Error, Result};
use crate::formula::SyntacticClass;
use crate::subpowers::{all_subuniverses, find_maps, generated_subuniverse, MapKind, Subuniverse};
use crate::target::Target;
use crate::terminterp::{
    baker_pixley_term, find_term_by_cases, merge_cases_discriminator, pixley_check, BakerPixley, CasesOutcome,
    InterpolationProblem,
};

/// Version of the JSON output and manifest layout.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "findef", version, about = "Definability and term interpolation over finite algebras")]
struct Cli {
    /// Worker threads for parallel checks (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Write a run manifest to this path.
    #[arg(long, global = true)]
    manifest: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// Decide definability of a target in a syntactic class.
    Check(CheckArgs),
    /// Majority, discriminator and representing terms.
    Term(TermArgs),
    /// Definition of a function by cases.
    Cases(CasesArgs),
    /// Congruences and their applications.
    Cong(CongArgs),
    /// Subuniverses.
    Subalg(SubalgArgs),
    /// Homomorphisms, embeddings and isomorphisms.
    Hom(HomArgs),
}

#[derive(Args, Debug, Serialize)]
struct CheckArgs {
    /// Algebra files or built-in names forming the class.
    #[arg(required = true)]
    algebras: Vec<String>,
    #[arg(long)]
    class: SyntacticClass,
    /// A relation symbol, or comma-separated operation symbols.
    #[arg(long)]
    target: String,
    /// Comma-separated operation symbols (default: all but the target).
    #[arg(long)]
    sublanguage: Option<String>,
    #[arg(long)]
    max_product_coords: Option<usize>,
    #[arg(long)]
    max_poly_arity: Option<usize>,
    /// Print only the witness formula.
    #[arg(long)]
    emit_witness: bool,
}

#[derive(Args, Debug, Serialize)]
#[group(skip)]
#[command(group = ArgGroup::new("term_mode").required(true).multiple(false))]
struct TermArgs {
    #[arg(required = true)]
    algebras: Vec<String>,
    #[arg(long, group = "term_mode")]
    majority: bool,
    #[arg(long, group = "term_mode")]
    discriminator: bool,
    /// Operation symbol to represent by a term of the other symbols.
    #[arg(long, group = "term_mode")]
    represent: Option<String>,
    /// Discriminator term and the discriminator by positive cases.
    #[arg(long, group = "term_mode")]
    pixley: bool,
    /// With --represent: require a majority term and use Baker–Pixley.
    #[arg(long, requires = "represent")]
    baker_pixley: bool,
    #[arg(long)]
    sublanguage: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum CaseClass {
    Open,
    Pos,
}

#[derive(Args, Debug, Serialize)]
struct CasesArgs {
    #[arg(required = true)]
    algebras: Vec<String>,
    #[arg(long)]
    target: String,
    #[arg(long, value_enum, default_value = "open")]
    class: CaseClass,
    #[arg(long)]
    sublanguage: Option<String>,
    /// Merge the cases with a discriminator term of the language.
    #[arg(long)]
    merge: bool,
}

#[derive(Args, Debug, Serialize)]
#[group(skip)]
#[command(group = ArgGroup::new("cong_mode").required(true).multiple(false))]
struct CongArgs {
    #[arg(required = true)]
    algebras: Vec<String>,
    /// Two elements, by index or display name.
    #[arg(long, num_args = 2, value_names = ["A", "B"], group = "cong_mode")]
    principal: Option<Vec<String>>,
    #[arg(long, group = "cong_mode")]
    lattice: bool,
    #[arg(long, group = "cong_mode")]
    cep: bool,
    #[arg(long, group = "cong_mode")]
    fraser_horn: bool,
    #[arg(long, group = "cong_mode")]
    dpc_formula: bool,
    /// Class of the principal congruence formula.
    #[arg(long, default_value = "pos-open")]
    class: SyntacticClass,
}

#[derive(Args, Debug, Serialize)]
#[group(skip)]
#[command(group = ArgGroup::new("subalg_mode").required(true).multiple(false))]
struct SubalgArgs {
    algebra: String,
    #[arg(long, group = "subalg_mode")]
    all: bool,
    /// Comma-separated generators, by index or display name.
    #[arg(long, group = "subalg_mode")]
    generate: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct HomArgs {
    #[arg(long, default_value = "hom", value_parser = parse_kind)]
    kind: MapKindArg,
    source: String,
    target: Option<String>,
}

#[derive(Clone, Copy, Debug, Serialize)]
struct MapKindArg(MapKind);

fn parse_kind(s: &str) -> std::result::Result<MapKindArg, String> {
    s.parse().map(MapKindArg).map_err(|e: Error| e.to_string())
}

/// One input algebra as recorded in a manifest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputRecord {
    pub argument: String,
    pub name: String,
    pub builtin: bool,
    /// SHA-256 of the file bytes, or of the canonical JSON of a built-in.
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub format_version: u32,
    pub inputs: Vec<InputRecord>,
    pub command: Value,
    pub exit_code: i32,
    pub resource_bound_hit: bool,
    pub result: Value,
    pub wall_time_ms: u64,
}

struct Outcome {
    text: String,
    json: Value,
    code: i32,
}

impl Outcome {
    fn new(code: i32, text: String, json: Value) -> Outcome {
        Outcome { text, json, code }
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// A built-in name or a path to an algebra file.
pub fn load_algebra(arg: &str) -> Result<(FiniteStructure, InputRecord)> {
    if let Some(a) = builtin(arg) {
        let rec = InputRecord {
            argument: arg.to_string(),
            name: a.name().to_string(),
            builtin: true,
            sha256: sha256_hex(to_json(&a).as_bytes()),
        };
        return Ok((a, rec));
    }
    let bytes = std::fs::read(arg).map_err(|e| Error::Query(format!("{arg}: {e}")))?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| Error::Query(format!("{arg}: {e}")))?;
    let a = from_json(&text).map_err(|e| match e {
        Error::Parse { line, col, msg } => Error::Parse {
            line,
            col,
            msg: format!("{arg}: {msg}"),
        },
        e => Error::Query(format!("{arg}: {e}")),
    })?;
    let rec = InputRecord {
        argument: arg.to_string(),
        name: a.name().to_string(),
        builtin: false,
        sha256: sha256_hex(&bytes),
    };
    Ok((a, rec))
}

fn split(list: &str) -> Vec<String> {
    list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

/// Element by decimal index, then by display name.
fn element(a: &FiniteStructure, s: &str) -> Result<usize> {
    s.parse::<usize>()
        .ok()
        .filter(|&i| i < a.size())
        .or_else(|| a.element_names().and_then(|ns| ns.iter().position(|n| n == s)))
        .ok_or_else(|| Error::Query(format!("no element `{s}` in {}", a.name())))
}

fn target_of(a: &FiniteStructure, spec: &str) -> Target {
    if a.signature().rel_index(spec).is_some() {
        Target::relation(spec)
    } else {
        Target::Functions(split(spec))
    }
}

fn language(class: &[FiniteStructure], target: &Target, sub: &Option<String>) -> Result<crate::algebra::Signature> {
    match sub {
        Some(list) => class[0].signature().restrict(&split(list)),
        None => Query::complement_language(class, target),
    }
}

fn fmt_set(xs: &[usize]) -> String {
    format!("{{{}}}", xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

fn fmt_blocks(c: &Congruence) -> String {
    format!("{{{}}}", c.blocks().iter().map(|b| fmt_set(b)).collect::<Vec<_>>().join(", "))
}

fn fmt_tuple(xs: &[usize]) -> String {
    format!("({})", xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

fn render_counterexample(class: &[FiniteStructure], c: &Counterexample) -> String {
    let factors = if c.source_factors.is_empty() {
        "the one-element product".to_string()
    } else {
        c.source_factors.iter().map(|&i| class[i].name()).collect::<Vec<_>>().join(" x ")
    };
    let source: Vec<String> = c.source.iter().map(|e| fmt_tuple(e)).collect();
    let map: Vec<String> = c
        .source
        .iter()
        .zip(&c.map)
        .map(|(s, t)| format!("{} -> {t}", fmt_tuple(s)))
        .collect();
    let tuple: Vec<String> = c.tuple.iter().map(|e| fmt_tuple(e)).collect();
    format!(
        "counterexample: {:?} from a substructure of {factors} into {}\nsource: {{{}}}\ntarget: {}\nmap: {}\ntuple: [{}] maps to {} outside the relation",
        c.kind,
        class[c.target_member].name(),
        source.join(", "),
        fmt_set(&c.target),
        map.join(", "),
        tuple.join(", "),
        fmt_tuple(&c.image),
    )
}

fn cmd_check(args: &CheckArgs, class: &[FiniteStructure]) -> Result<Outcome> {
    let target = target_of(&class[0], &args.target);
    let lang = language(class, &target, &args.sublanguage)?;
    let mut q = Query::new(class.to_vec(), lang, target, args.class);
    let mut bounds = Bounds::default();
    if let Some(n) = args.max_product_coords {
        bounds.max_product_coords = n;
    }
    if let Some(n) = args.max_poly_arity {
        bounds.max_poly_arity = n;
    }
    q.bounds = bounds;
    let v = check(&q)?;
    let text = match (&v, args.emit_witness) {
        (Verdict::Definable { witness, .. }, true) => witness.to_string(),
        (Verdict::Definable { witness, .. }, false) => format!("definable in {}\nwitness: {witness}", args.class),
        (Verdict::NotDefinable { counterexample }, _) => {
            format!("not definable in {}\n{}", args.class, render_counterexample(class, counterexample))
        }
        (Verdict::ResourceExceeded { report }, _) => format!("resource bound exceeded: {report}"),
    };
    Ok(Outcome::new(v.exit_code(), text, serde_json::to_value(&v)?))
}

fn cmd_term(args: &TermArgs, class: &[FiniteStructure]) -> Result<Outcome> {
    let bounds = CloneBounds::default();
    let full = class[0].signature().clone();
    let found = |name: &str, t: Option<crate::term::Term>| match t {
        Some(t) => Outcome::new(0, format!("{name} term: {t}"), json!({ "term": t })),
        None => Outcome::new(1, format!("no {name} term"), json!({ "term": null })),
    };
    if args.majority || args.discriminator || args.pixley {
        let lang = match &args.sublanguage {
            Some(s) => full.restrict(&split(s))?,
            None => full,
        };
        if args.majority {
            return Ok(found("majority", find_majority_term(class, &lang, bounds)?));
        }
        if args.discriminator {
            return Ok(found("discriminator", find_discriminator_term(class, &lang, bounds)?));
        }
        let r = pixley_check(class, &lang, bounds)?;
        let mut text = match &r.discriminator {
            Some(t) => format!("quasiprimal: discriminator term {t}"),
            None => "not quasiprimal: no discriminator term".to_string(),
        };
        text.push('\n');
        text.push_str(&render_cases(class, &r.cases));
        return Ok(Outcome::new(if r.quasiprimal() { 0 } else { 1 }, text, serde_json::to_value(&r)?));
    }
    let f = args.represent.as_deref().expect("group requires a mode");
    let target = Target::function(f);
    let lang = language(class, &target, &args.sublanguage)?;
    if args.baker_pixley {
        let p = InterpolationProblem::new(class.to_vec(), lang, f);
        let r = baker_pixley_term(&p)?;
        let (code, text) = match &r {
            BakerPixley::Term { term, interpolated } => {
                let mut t = format!("term: {term}");
                if let Some(i) = interpolated {
                    t.push_str(&format!("\nmajority induction: {i}"));
                }
                (0, t)
            }
            BakerPixley::NotClosed { certificate } => (1, render_not_closed(certificate)),
        };
        return Ok(Outcome::new(code, text, serde_json::to_value(&r)?));
    }
    let table = FunctionTable::from_symbol(class, f)?;
    let r = find_representing_term(class, &lang, &table, CloneBounds::default())?;
    let (code, text) = match &r {
        Representation::Term(t) => (0, format!("term: {t}")),
        Representation::NotRepresentable(c) => (1, render_not_closed(c)),
    };
    Ok(Outcome::new(code, text, serde_json::to_value(&r)?))
}

fn render_not_closed(c: &crate::clone::NotClosed) -> String {
    let gens: Vec<String> = c.generators.iter().map(|g| fmt_tuple(g)).collect();
    let elems: Vec<String> = c.subuniverse.iter().map(|g| fmt_tuple(g)).collect();
    format!(
        "not representable: Sg{{{}}} = {{{}}} does not contain {}",
        gens.join(", "),
        elems.join(", "),
        fmt_tuple(&c.image)
    )
}

fn render_cases(class: &[FiniteStructure], c: &CasesOutcome) -> String {
    match c {
        CasesOutcome::Cases { definition } => {
            let lines: Vec<String> = definition.cases.iter().map(|(t, phi)| format!("  {t} if {phi}")).collect();
            format!("{} by cases:\n{}", definition.target, lines.join("\n"))
        }
        CasesOutcome::NotClosed { certificate } => render_not_closed(certificate),
        CasesOutcome::NotPreserved { counterexample } => render_counterexample(class, counterexample),
        CasesOutcome::ResourceExceeded { report } => format!("resource bound exceeded: {report}"),
    }
}

fn cases_code(c: &CasesOutcome) -> i32 {
    match c {
        CasesOutcome::Cases { .. } => 0,
        CasesOutcome::ResourceExceeded { .. } => 3,
        _ => 1,
    }
}

fn cmd_cases(args: &CasesArgs, class: &[FiniteStructure]) -> Result<Outcome> {
    let target = Target::function(&args.target);
    let lang = language(class, &target, &args.sublanguage)?;
    let p = InterpolationProblem::new(class.to_vec(), lang.clone(), &args.target);
    let r = find_term_by_cases(&p, args.class == CaseClass::Pos)?;
    let mut text = render_cases(class, &r);
    let mut value = serde_json::to_value(&r)?;
    if let (true, CasesOutcome::Cases { definition }) = (args.merge, &r) {
        let t = find_discriminator_term(class, &lang, CloneBounds::default())?
            .ok_or_else(|| Error::Query("no discriminator term to merge with".into()))?;
        let merged = merge_cases_discriminator(class, definition, &t)?;
        text.push_str(&format!("\nmerged: {merged}"));
        value["merged"] = json!(merged);
    }
    Ok(Outcome::new(cases_code(&r), text, value))
}

fn cmd_cong(args: &CongArgs, class: &[FiniteStructure]) -> Result<Outcome> {
    let a = &class[0];
    if let Some(pair) = &args.principal {
        let (x, y) = (element(a, &pair[0])?, element(a, &pair[1])?);
        let c = principal_congruence(a, x, y);
        return Ok(Outcome::new(0, fmt_blocks(&c), json!({ "blocks": c.blocks() })));
    }
    if args.lattice {
        let con = congruence_lattice(a, LatticeBounds::default())?;
        let text = con.iter().map(fmt_blocks).collect::<Vec<_>>().join("\n");
        let blocks: Vec<Vec<Vec<usize>>> = con.iter().map(Congruence::blocks).collect();
        return Ok(Outcome::new(0, text, json!({ "congruences": blocks })));
    }
    if args.fraser_horn {
        return Ok(match check_fraser_horn(class)? {
            None => Outcome::new(0, "Fraser-Horn: holds on binary products".into(), json!({ "holds": true })),
            Some(s) => {
                let blocks: Vec<String> = s
                    .blocks
                    .iter()
                    .map(|b| format!("{{{}}}", b.iter().map(|e| fmt_tuple(e)).collect::<Vec<_>>().join(", ")))
                    .collect();
                let text = format!(
                    "Fraser-Horn: fails on {} x {}\nskew congruence θ({}, {}) = {{{}}}",
                    class[s.factors.0].name(),
                    class[s.factors.1].name(),
                    fmt_tuple(&s.pair.0),
                    fmt_tuple(&s.pair.1),
                    blocks.join(", ")
                );
                Outcome::new(1, text, json!({ "holds": false, "skew": s }))
            }
        });
    }
    let ctx = RelContext::new(class.to_vec())?;
    if args.cep {
        return Ok(match check_cep(&ctx, 4096)? {
            None => Outcome::new(0, "congruence extension: holds".into(), json!({ "holds": true })),
            Some(f) => Outcome::new(
                1,
                format!(
                    "congruence extension: fails in {} on {} at {:?}",
                    class[f.member].name(),
                    fmt_set(&f.subuniverse),
                    f.pair
                ),
                json!({ "holds": false, "failure": f }),
            ),
        });
    }
    let r = synthesize_dpc_formula(&ctx, args.class, Bounds::default())?;
    let code = match (&r.verdict, &r.failed_on) {
        (Verdict::Definable { .. }, None) => 0,
        (v, _) if v.exit_code() == 3 => 3,
        _ => 1,
    };
    let mut text = match &r.verdict {
        Verdict::Definable { witness, .. } => format!("formula: {witness}\nverified on: {}", r.verified_on.join(", ")),
        Verdict::NotDefinable { counterexample } => render_counterexample(class, counterexample),
        Verdict::ResourceExceeded { report } => format!("resource bound exceeded: {report}"),
    };
    if let Some(p) = &r.failed_on {
        text.push_str(&format!("\nfails on: {p}"));
    }
    Ok(Outcome::new(code, text, serde_json::to_value(&r)?))
}

fn cmd_subalg(args: &SubalgArgs, a: &FiniteStructure) -> Result<Outcome> {
    let subs: Vec<Subuniverse> = match &args.generate {
        Some(g) => {
            let gens = split(g).iter().map(|s| element(a, s)).collect::<Result<Vec<_>>>()?;
            vec![generated_subuniverse(a, &gens)?]
        }
        None => all_subuniverses(a, 100_000)?,
    };
    let text = subs.iter().map(|s| fmt_set(&s.elements)).collect::<Vec<_>>().join("\n");
    let elems: Vec<&Vec<usize>> = subs.iter().map(|s| &s.elements).collect();
    Ok(Outcome::new(0, text, json!({ "subuniverses": elems })))
}

fn cmd_hom(args: &HomArgs, a: &FiniteStructure, b: &FiniteStructure) -> Result<Outcome> {
    let maps = find_maps(a, &Subuniverse::full(a), b, &Subuniverse::full(b), args.kind.0)?;
    let text = if maps.is_empty() {
        format!("no {:?} from {} to {}", args.kind.0, a.name(), b.name())
    } else {
        maps.iter().map(|m| fmt_tuple(&m.images)).collect::<Vec<_>>().join("\n")
    };
    let images: Vec<&Vec<usize>> = maps.iter().map(|m| &m.images).collect();
    Ok(Outcome::new(if maps.is_empty() { 1 } else { 0 }, text, json!({ "maps": images })))
}

fn dispatch(cmd: &Command) -> Result<(Outcome, Vec<InputRecord>)> {
    let load_all = |names: &[String]| -> Result<(Vec<FiniteStructure>, Vec<InputRecord>)> {
        let loaded = names.iter().map(|n| load_algebra(n)).collect::<Result<Vec<_>>>()?;
        Ok(loaded.into_iter().unzip())
    };
    match cmd {
        Command::Check(a) => {
            let (class, recs) = load_all(&a.algebras)?;
            Ok((cmd_check(a, &class)?, recs))
        }
        Command::Term(a) => {
            let (class, recs) = load_all(&a.algebras)?;
            Ok((cmd_term(a, &class)?, recs))
        }
        Command::Cases(a) => {
            let (class, recs) = load_all(&a.algebras)?;
            Ok((cmd_cases(a, &class)?, recs))
        }
        Command::Cong(a) => {
            let (class, recs) = load_all(&a.algebras)?;
            Ok((cmd_cong(a, &class)?, recs))
        }
        Command::Subalg(a) => {
            let (class, recs) = load_all(std::slice::from_ref(&a.algebra))?;
            Ok((cmd_subalg(a, &class[0])?, recs))
        }
        Command::Hom(a) => {
            let mut names = vec![a.source.clone()];
            names.extend(a.target.clone());
            let (class, recs) = load_all(&names)?;
            let b = class.last().unwrap();
            Ok((cmd_hom(a, &class[0], b)?, recs))
        }
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Resource(_) => 3,
        _ => 2,
    }
}

/// Runs the command line `args` (program name first), writing the report
/// to `out`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            return e.exit_code();
        }
    };
    let start = Instant::now();
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => Err(Error::Query(e.to_string())),
        },
        None => dispatch(&cli.command),
    };
    let (outcome, inputs) = match result {
        Ok(r) => r,
        Err(e) => {
            let code = error_code(&e);
            let msg = e.to_string();
            (
                Outcome::new(code, format!("error: {msg}"), json!({ "error": msg })),
                Vec::new(),
            )
        }
    };
    let _ = match cli.format {
        Format::Text => writeln!(out, "{}", outcome.text),
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&outcome.json).expect("serializable")),
    };
    if let Some(path) = &cli.manifest {
        let manifest = RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            format_version: FORMAT_VERSION,
            inputs,
            command: serde_json::to_value(&cli.command).expect("serializable"),
            exit_code: outcome.code,
            resource_bound_hit: outcome.code == 3,
            result: outcome.json,
            wall_time_ms: start.elapsed().as_millis() as u64,
        };
        let text = serde_json::to_string_pretty(&manifest).expect("serializable");
        if let Err(e) = std::fs::write(path, text + "\n") {
            let _ = writeln!(out, "error: {}: {e}", path.display());
            return 2;
        }
    }
    outcome.code
}
