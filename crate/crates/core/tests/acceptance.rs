//! Acceptance criteria 1 to 8, one pass/fail line each.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use findef::algebra::{
    bool2, demorgan_circ, demorgan_m, heyting3, power, stone3, tuples, FiniteStructure, Signature, Symbol, DEMORGAN_CIRC,
};
use findef::cli;
use findef::clone::{discriminator, find_discriminator_term, quaternary_discriminator, CaseDefinition, CloneBounds};
use findef::congruences::{
    check_cep, check_fraser_horn, congruence_lattice, skew_congruences, synthesize_dpc_formula, with_principal_relation,
    LatticeBounds, RelContext, PRINCIPAL_RELATION,
};
use findef::definability::{check, verify_counterexample, Bounds, Query, Verdict};
use findef::formula::{contains, defines, is_member, Formula, SyntacticClass, ALL_CLASSES};
use findef::subpowers::{all_subuniverses, generated_subuniverse};
use findef::target::Target;
use findef::term::{evaluate_term, Term};
use findef::terminterp::{baker_pixley_term, merge_cases_discriminator, validate_cases, BakerPixley, InterpolationProblem};

type Res<T> = Result<T, String>;

/// Outcome of one criterion: failures found and a transcript of every
/// verdict, witness and certificate for the determinism check.
#[derive(Default)]
struct Report {
    failures: Vec<String>,
    notes: Vec<String>,
    transcript: Vec<String>,
}

impl Report {
    fn fail(&mut self, msg: impl Into<String>) {
        self.failures.push(msg.into());
    }

    fn expect(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.fail(msg());
        }
    }

    fn record(&mut self, value: &impl serde::Serialize) {
        self.transcript.push(serde_json::to_string(value).expect("serializable"));
    }

    fn within(&mut self, what: &str, took: Duration, limit: Duration) {
        self.notes.push(format!("{what} {:.1}s", took.as_secs_f64()));
        self.expect(took <= limit, || format!("{what} took {took:?}, limit {limit:?}"));
    }
}

fn err(e: findef::Error) -> String {
    e.to_string()
}

fn x(i: usize) -> Term {
    Term::var(format!("x{i}"))
}

/// Checks `f` on `class` and validates the verdict: witnesses with
/// `defines`, counterexamples by replaying them.
fn decide(class: Vec<FiniteStructure>, lang: &Signature, target: Target, sc: SyntacticClass, r: &mut Report) -> Res<Verdict> {
    let q = Query::new(class, lang.clone(), target, sc);
    let v = check(&q).map_err(err)?;
    match &v {
        Verdict::Definable { witness, .. } => {
            if !defines(&q.class, witness, &q.target).map_err(err)? {
                r.fail(format!("{sc} witness {witness} does not define the target"));
            }
            if !is_member(witness, sc) {
                r.fail(format!("witness {witness} is not in {sc}"));
            }
        }
        Verdict::NotDefinable { counterexample } => {
            if let Err(e) = verify_counterexample(&q, counterexample) {
                r.fail(format!("{sc} counterexample rejected: {e}"));
            }
        }
        Verdict::ResourceExceeded { .. } => {}
    }
    r.record(&v);
    Ok(v)
}

const STAR_STAR: [usize; 3] = [0, 2, 2];

fn stone_pp(table: Vec<usize>, arity: usize, r: &mut Report) -> Res<()> {
    let base = stone3();
    let a = base.with_operation_table("f", arity, table.clone()).map_err(err)?;
    let commutes = tuples(3, arity).all(|args| {
        let moved: Vec<usize> = args.iter().map(|&v| STAR_STAR[v]).collect();
        STAR_STAR[table[index(3, &args)]] == table[index(3, &moved)]
    });
    let v = decide(vec![a], base.signature(), Target::function("f"), SyntacticClass::PP, r)?;
    match v {
        Verdict::ResourceExceeded { report } => r.fail(format!("{table:?}: {report}")),
        v => r.expect(v.is_definable() == commutes, || {
            format!("{table:?}: pp verdict {} but f(x)** = f(x**) is {commutes}", v.is_definable())
        }),
    }
    Ok(())
}

fn index(n: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * n + a)
}

fn criterion1(r: &mut Report) -> Res<()> {
    let start = Instant::now();
    for code in 0..27 {
        stone_pp(vec![code / 9, code / 3 % 3, code % 3], 1, r)?;
    }
    r.within("unary pass", start.elapsed(), Duration::from_secs(5));

    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..250 {
        stone_pp((0..9).map(|_| rng.gen_range(0..3)).collect(), 2, r)?;
    }
    // Functions commuting with ** are rare among uniform samples: choose
    // the values on {0, 1}^2 first, then a preimage under ** elsewhere.
    for _ in 0..250 {
        let mut table = vec![0; 9];
        for args in tuples(3, 2) {
            if args.iter().all(|&v| v != 1) {
                table[index(3, &args)] = [0, 2][rng.gen_range(0..2)];
            }
        }
        for args in tuples(3, 2) {
            if args.contains(&1) {
                let moved: Vec<usize> = args.iter().map(|&v| STAR_STAR[v]).collect();
                table[index(3, &args)] = match table[index(3, &moved)] {
                    0 => 0,
                    _ => rng.gen_range(1..3),
                };
            }
        }
        stone_pp(table, 2, r)?;
    }
    r.within("binary sample", start.elapsed(), Duration::from_secs(120));
    Ok(())
}

fn criterion2(r: &mut Report) -> Res<()> {
    let start = Instant::now();
    let m = demorgan_m();
    let mut positive = 0;
    for code in 0..256usize {
        let table: Vec<usize> = (0..4).map(|i| code >> (2 * (3 - i)) & 3).collect();
        let commutes = (0..4).all(|v| DEMORGAN_CIRC[table[v]] == table[DEMORGAN_CIRC[v]]);
        let a = m.with_operation_table("f", 1, table.clone()).map_err(err)?;
        let target = Target::function("f");
        let v = decide(vec![a.clone()], m.signature(), target.clone(), SyntacticClass::PP, r)?;
        match &v {
            Verdict::ResourceExceeded { report } => r.fail(format!("{table:?}: {report}")),
            v => r.expect(v.is_definable() == commutes, || {
                format!("{table:?}: pp verdict {} but commutes with ° is {commutes}", v.is_definable())
            }),
        }
        if let Verdict::Definable { witness, .. } = &v {
            positive += 1;
            let square = power(&a, 2).map_err(err)?;
            r.expect(defines(&[square], witness, &target).map_err(err)?, || {
                format!("{table:?}: witness fails on M x M")
            });
        }
    }
    r.notes.push(format!("{positive} definable"));
    r.within("all 256", start.elapsed(), Duration::from_secs(60));
    Ok(())
}

fn pairs(n: usize, s: &[(usize, usize)]) -> Vec<usize> {
    let mut v: Vec<usize> = s.iter().map(|&(a, b)| a * n + b).collect();
    v.sort();
    v
}

fn criterion3(r: &mut Report) -> Res<()> {
    let start = Instant::now();
    let h2 = power(&heyting3(), 2).map_err(err)?;
    let found: BTreeSet<Vec<usize>> = all_subuniverses(&h2, 100_000)
        .map_err(err)?
        .into_iter()
        .map(|s| s.elements)
        .collect();
    let (z, h, o) = (0, 1, 2);
    let listed = [
        ("S1", pairs(3, &[(z, z), (h, h), (o, h), (h, o), (o, o)])),
        ("S2", pairs(3, &[(z, z), (h, o), (o, o)])),
        ("S3", pairs(3, &[(z, z), (o, h), (o, o)])),
        ("S4", pairs(3, &[(z, z), (h, h), (h, o), (o, o)])),
        ("S5", pairs(3, &[(z, z), (h, h), (o, h), (o, o)])),
    ];
    for (name, s) in &listed {
        r.expect(found.contains(s), || format!("{name} is not a subuniverse of (3,->)^2"));
    }
    let s1 = generated_subuniverse(&h2, &[o * 3 + h, h * 3 + o]).map_err(err)?;
    r.expect(s1.elements == listed[0].1, || "Sg{(1,1/2),(1/2,1)} differs from S1".into());
    r.record(&found);

    let m = demorgan_circ();
    let m2 = power(&m, 2).map_err(err)?;
    let found: BTreeSet<Vec<usize>> = all_subuniverses(&m2, 100_000)
        .map_err(err)?
        .into_iter()
        .map(|s| s.elements)
        .collect();
    let (zero, one) = (0, 3);
    let listed: BTreeSet<Vec<usize>> = [
        pairs(4, &[(zero, zero), (zero, one), (one, zero), (one, one)]),
        (0..16).collect(),
        pairs(4, &(0..4).map(|v| (v, DEMORGAN_CIRC[v])).collect::<Vec<_>>()),
        pairs(4, &(0..4).map(|v| (v, v)).collect::<Vec<_>>()),
        pairs(4, &[(zero, zero), (one, one)]),
    ]
    .into_iter()
    .collect();
    let name = |s: &Vec<usize>| {
        let shown: Vec<String> = s.iter().map(|&e| m2.element_name(e)).collect();
        format!("{{{}}}", shown.join(","))
    };
    for s in found.difference(&listed) {
        r.fail(format!("(M,°)^2 has the unlisted subuniverse {}", name(s)));
    }
    for s in listed.difference(&found) {
        r.fail(format!("listed set {} is not a subuniverse of (M,°)^2", name(s)));
    }
    r.record(&found);
    r.within("both squares", start.elapsed(), Duration::from_secs(10));
    Ok(())
}

fn criterion4(r: &mut Report) -> Res<()> {
    let start = Instant::now();
    let b = bool2();
    for code in 0..16usize {
        let table: Vec<usize> = (0..4).map(|i| code >> i & 1).collect();
        let k = vec![b.with_operation_table("f", 2, table.clone()).map_err(err)?];
        let p = InterpolationProblem::new(k.clone(), b.signature().clone(), "f");
        let res = baker_pixley_term(&p).map_err(err)?;
        r.record(&res);
        match res {
            BakerPixley::Term { term, interpolated } => {
                for t in std::iter::once(&term).chain(interpolated.as_ref()) {
                    for args in tuples(2, 2) {
                        let got = evaluate_term(&k[0], t, &args).map_err(err)?;
                        r.expect(got == table[index(2, &args)], || format!("{t} differs from f{code} at {args:?}"));
                    }
                }
            }
            BakerPixley::NotClosed { .. } => r.fail(format!("no term for f{code}")),
        }
    }
    let lattice = b.signature().restrict(&["join", "meet", "zero", "one"]).map_err(err)?;
    let p = InterpolationProblem::new(vec![b], lattice, "neg");
    let res = baker_pixley_term(&p).map_err(err)?;
    r.record(&res);
    match res {
        BakerPixley::NotClosed { certificate: c } => {
            r.expect(c.generators == vec![vec![0, 1]], || format!("generators {:?}", c.generators));
            r.expect(c.image == vec![1, 0], || format!("image {:?}", c.image));
            r.expect(!c.subuniverse.contains(&c.image), || "image inside the subuniverse".into());
        }
        BakerPixley::Term { term, .. } => r.fail(format!("neg represented by {term} without neg")),
    }
    r.within("run", start.elapsed(), Duration::from_secs(10));
    Ok(())
}

fn criterion5(r: &mut Report) -> Res<()> {
    let start = Instant::now();
    let b = bool2();
    let table = (0..8).map(|i| discriminator(i / 4, i / 2 % 2, i % 2)).collect();
    let k = vec![b.with_operation_table("d", 3, table).map_err(err)?];
    let same = Formula::eq(x(1), x(2));
    let cases = CaseDefinition {
        target: "d".into(),
        cases: vec![(x(1), Formula::not(same.clone())), (x(3), same)],
    };
    validate_cases(&k, &cases).map_err(err)?;
    let t = find_discriminator_term(&k, b.signature(), CloneBounds::default())
        .map_err(err)?
        .ok_or("bool2 has no discriminator term")?;
    let d4 = quaternary_discriminator(&t).map_err(err)?;
    for args in tuples(2, 4) {
        let want = if args[0] == args[1] { args[2] } else { args[3] };
        r.expect(evaluate_term(&k[0], &d4, &args).map_err(err)? == want, || format!("D wrong at {args:?}"));
    }
    let merged = merge_cases_discriminator(&k, &cases, &t).map_err(err)?;
    for args in tuples(2, 3) {
        let got = evaluate_term(&k[0], &merged, &args).map_err(err)?;
        r.expect(got == discriminator(args[0], args[1], args[2]), || format!("merged term wrong at {args:?}"));
    }
    r.record(&merged);
    r.within("run", start.elapsed(), Duration::from_secs(5));
    Ok(())
}

fn criterion6(r: &mut Report) -> Res<()> {
    let start = Instant::now();
    let s = stone3();
    let con: Vec<Vec<Vec<usize>>> = congruence_lattice(&s, LatticeBounds::default())
        .map_err(err)?
        .iter()
        .map(|c| c.blocks())
        .collect();
    r.expect(con == vec![vec![vec![0], vec![1], vec![2]], vec![vec![0], vec![1, 2]], vec![vec![0, 1, 2]]], || {
        format!("Con(3) = {con:?}")
    });
    r.record(&con);
    let con_m = congruence_lattice(&demorgan_m(), LatticeBounds::default()).map_err(err)?;
    r.expect(con_m.len() == 2 && con_m[0].is_identity() && con_m[1].is_full(), || {
        format!("Con(M) has {} congruences", con_m.len())
    });

    let ctx = RelContext::new(vec![s.clone()]).map_err(err)?;
    let cep = check_cep(&ctx, 4096).map_err(err)?;
    r.expect(cep.is_none(), || format!("congruence extension fails: {cep:?}"));

    let dpc = synthesize_dpc_formula(&ctx, SyntacticClass::PositiveOpen, Bounds::default()).map_err(err)?;
    r.record(&dpc);
    match dpc.verdict.witness() {
        Some(w) => {
            r.expect(is_member(w, SyntacticClass::PositiveOpen), || format!("{w} is not positive open"));
            let target = Target::relation(PRINCIPAL_RELATION);
            for a in [s.clone(), power(&s, 2).map_err(err)?] {
                let oracle = with_principal_relation(&ctx, &a).map_err(err)?;
                r.expect(defines(&[oracle], w, &target).map_err(err)?, || format!("formula fails on {}", a.name()));
            }
        }
        None => r.fail(format!("no formula: {:?}", dpc.verdict)),
    }

    let set2 = FiniteStructure::new("set2", Signature::default(), 2, vec![], vec![]).map_err(err)?;
    match check_fraser_horn(std::slice::from_ref(&set2)).map_err(err)? {
        Some(skew) => {
            let brute = skew_congruences(&set2, &set2, LatticeBounds::default()).map_err(err)?;
            let encoded: Vec<Vec<usize>> = skew.blocks.iter().map(|b| b.iter().map(|p| p[0] * 2 + p[1]).collect()).collect();
            r.expect(brute.iter().any(|c| c.blocks() == encoded), || "skew congruence not confirmed by brute force".into());
            r.expect(skew.blocks != skew.product_blocks, || "skew congruence equals a product congruence".into());
            r.record(&skew);
        }
        None => r.fail("no skew congruence on set2 x set2"),
    }
    r.within("run", start.elapsed(), Duration::from_secs(60));
    Ok(())
}

/// One random query of criterion 7: a relation `r` on a class of one or two
/// algebras with a shared signature.
fn random_class(rng: &mut ChaCha8Rng) -> Res<Vec<FiniteStructure>> {
    let n_ops = rng.gen_range(0..=2);
    let arities: Vec<usize> = (0..n_ops).map(|_| rng.gen_range(0..=2)).collect();
    let rel_arity = rng.gen_range(1..=2);
    let ops: Vec<Symbol> = arities.iter().enumerate().map(|(i, &k)| Symbol::new(["f", "g"][i], k)).collect();
    let sig = Signature::new(ops, vec![Symbol::new("r", rel_arity)]).map_err(err)?;
    let members = rng.gen_range(1..=2);
    (0..members)
        .map(|m| {
            let n: usize = rng.gen_range(1..=3);
            let tables = arities.iter().map(|&k| (0..n.pow(k as u32)).map(|_| rng.gen_range(0..n)).collect()).collect();
            let rel = tuples(n, rel_arity).filter(|_| rng.gen_bool(0.5)).collect();
            FiniteStructure::new(format!("a{m}"), sig.clone(), n, tables, vec![rel]).map_err(err)
        })
        .collect()
}

/// Terms of depth at most one in `vars`.
fn shallow_terms(sig: &Signature, vars: &[Term]) -> Vec<Term> {
    let mut leaves = vars.to_vec();
    leaves.extend(sig.ops().iter().filter(|o| o.arity == 0).map(|o| Term::app(o.name.clone(), vec![])));
    let mut out = leaves.clone();
    for o in sig.ops().iter().filter(|o| o.arity > 0) {
        for args in tuples(leaves.len(), o.arity) {
            out.push(Term::app(o.name.clone(), args.iter().map(|&i| leaves[i].clone()).collect()));
        }
    }
    out
}

fn close(seed: impl IntoIterator<Item = u32>, ops: &[fn(u32, u32) -> u32], full: u32, negate: bool) -> BTreeSet<u32> {
    let mut set: BTreeSet<u32> = seed.into_iter().collect();
    loop {
        let items: Vec<u32> = set.iter().copied().collect();
        let mut next = set.clone();
        for &a in &items {
            if negate {
                next.insert(!a & full);
            }
            for &b in &items {
                for op in ops {
                    next.insert(op(a, b));
                }
            }
        }
        if next.len() == set.len() {
            return set;
        }
        set = next;
    }
}

/// Truth sets, over the columns of the class, of the relations defined by
/// open formulas built from equations between terms of depth at most one,
/// for the quantifier-free classes.
struct BruteForce {
    conj: BTreeSet<u32>,
    positive: BTreeSet<u32>,
    strict_horn: BTreeSet<u32>,
    horn: BTreeSet<u32>,
    open: BTreeSet<u32>,
}

impl BruteForce {
    fn new(class: &[FiniteStructure]) -> Res<(BruteForce, u32)> {
        let sig = class[0].signature();
        let k = sig.rels()[0].arity;
        let vars: Vec<Term> = (1..=k).map(x).collect();
        let terms = shallow_terms(sig, &vars);
        let mut cols = Vec::new();
        for (m, a) in class.iter().enumerate() {
            cols.extend(tuples(a.size(), k).map(|t| (m, t)));
        }
        let full = (1u32 << cols.len()) - 1;
        let values: Vec<Vec<usize>> = terms
            .iter()
            .map(|t| cols.iter().map(|(m, args)| evaluate_term(&class[*m], t, args).map_err(err)).collect())
            .collect::<Res<_>>()?;
        let mut atoms = BTreeSet::new();
        for s in &values {
            for t in &values {
                atoms.insert((0..cols.len()).filter(|&c| s[c] == t[c]).fold(0u32, |acc, c| acc | 1 << c));
            }
        }
        let relation = cols
            .iter()
            .enumerate()
            .filter(|(_, (m, args))| class[*m].holds(0, args))
            .fold(0u32, |acc, (c, _)| acc | 1 << c);
        let and: fn(u32, u32) -> u32 = |a, b| a & b;
        let or: fn(u32, u32) -> u32 = |a, b| a | b;
        let conj = close(atoms.iter().copied(), &[and], full, false);
        let positive = close(atoms.iter().copied(), &[and, or], full, false);
        let open = close(atoms.iter().copied(), &[and, or], full, true);
        let strict: Vec<u32> = conj.iter().flat_map(|&p| atoms.iter().map(move |&b| (!p & full) | b)).collect();
        let negative: Vec<u32> = conj.iter().map(|&p| !p & full).collect();
        let strict_horn = close(strict.iter().copied(), &[and], full, false);
        let horn = close(strict.into_iter().chain(negative), &[and], full, false);
        Ok((
            BruteForce {
                conj,
                positive,
                strict_horn,
                horn,
                open,
            },
            relation,
        ))
    }

    fn finds(&self, class: SyntacticClass, relation: u32) -> bool {
        use SyntacticClass::*;
        let sets = match class {
            AtomicConj | PP => &self.conj,
            PositiveOpen | ExistPositive => &self.positive,
            OpenStrictHorn => &self.strict_horn,
            OpenHorn | ExistHorn => &self.horn,
            Open | Existential => &self.open,
        };
        sets.contains(&relation)
    }
}

fn criterion7(r: &mut Report) -> Res<()> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut found, mut definable, mut resource) = (0, 0, 0);
    for q in 0..200 {
        let class = random_class(&mut rng)?;
        let (brute, relation) = BruteForce::new(&class)?;
        let lang = Query::complement_language(&class, &Target::relation("r")).map_err(err)?;
        let mut verdicts = Vec::new();
        for &sc in ALL_CLASSES.iter() {
            let v = decide(class.clone(), &lang, Target::relation("r"), sc, r)?;
            let brute_found = brute.finds(sc, relation);
            found += brute_found as usize;
            definable += v.is_definable() as usize;
            if let Verdict::ResourceExceeded { .. } = v {
                resource += 1;
            }
            r.expect(!brute_found || v.is_definable(), || format!("query {q}: brute force defines r in {sc}, check does not"));
            verdicts.push((sc, v.is_definable()));
        }
        for &(big, big_def) in &verdicts {
            for &(small, small_def) in &verdicts {
                r.expect(!(contains(big, small) && small_def && !big_def), || {
                    format!("query {q}: definable in {small} but not in {big}")
                });
            }
        }
    }
    r.notes.push(format!("{found} brute-force witnesses, {definable} definable, {resource} resource hits"));
    r.within("200 queries", start.elapsed(), Duration::from_secs(300));
    Ok(())
}

type Criterion = fn(&mut Report) -> Res<()>;

const CRITERIA: [(&str, Criterion); 7] = [
    ("Stone pp characterization", criterion1),
    ("De Morgan unary pp equivalence", criterion2),
    ("subuniverse lists", criterion3),
    ("Baker-Pixley on bool2", criterion4),
    ("Pixley merge on bool2", criterion5),
    ("congruence applications", criterion6),
    ("cross-class oracle equivalence", criterion7),
];

fn run_all() -> Vec<Report> {
    CRITERIA
        .iter()
        .map(|(_, f)| {
            let mut r = Report::default();
            if let Err(e) = f(&mut r) {
                r.fail(format!("error: {e}"));
            }
            r
        })
        .collect()
}

fn manifest_bodies(threads: usize) -> Res<Vec<String>> {
    let dir = std::env::temp_dir().join(format!("findef-acceptance-{}-{threads}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let path = dir.join("m.json");
    let p = path.to_string_lossy().into_owned();
    let t = threads.to_string();
    let runs: [&[&str]; 4] = [
        &["cong", "stone3", "--dpc-formula"],
        &["term", "bool2", "--pixley"],
        &["cong", "stone3", "--lattice"],
        &["subalg", "demorganMcirc", "--all"],
    ];
    let mut bodies = Vec::new();
    for args in runs {
        let mut argv = vec!["findef", "--threads", &t, "--format", "json", "--manifest", &p];
        argv.extend_from_slice(args);
        let mut out = Vec::new();
        cli::run(argv, &mut out);
        let mut m: cli::RunManifest =
            serde_json::from_str(&std::fs::read_to_string(&path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        m.wall_time_ms = 0;
        bodies.push(String::from_utf8_lossy(&out).into_owned());
        bodies.push(serde_json::to_string(&m).map_err(|e| e.to_string())?);
    }
    std::fs::remove_dir_all(&dir).map_err(|e| e.to_string())?;
    Ok(bodies)
}

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool")
}

fn print(n: usize, name: &str, failures: &[String], notes: &[String]) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    let extra = if notes.is_empty() { String::new() } else { format!(" ({})", notes.join(", ")) };
    println!("criterion {n}: {status} {name}{extra}");
    for f in failures.iter().take(5) {
        println!("    {f}");
    }
    if failures.len() > 5 {
        println!("    ... {} more", failures.len() - 5);
    }
}

fn main() {
    let many = std::thread::available_parallelism().map_or(4, |n| n.get().max(2));
    let first = pool(many).install(run_all);
    for (i, (r, (name, _))) in first.iter().zip(CRITERIA.iter()).enumerate() {
        print(i + 1, name, &r.failures, &r.notes);
    }

    let start = Instant::now();
    let mut failures = Vec::new();
    let transcripts = |rs: &[Report]| rs.iter().map(|r| r.transcript.clone()).collect::<Vec<_>>();
    let base = transcripts(&first);
    for (label, threads) in [("second run", many), ("one thread", 1)] {
        let again = pool(threads).install(run_all);
        for (i, (a, b)) in base.iter().zip(transcripts(&again)).enumerate() {
            if *a != b {
                failures.push(format!("{label}: criterion {} transcript differs", i + 1));
            }
        }
    }
    match (manifest_bodies(many), manifest_bodies(many), manifest_bodies(1)) {
        (Ok(a), Ok(b), Ok(c)) => {
            if a != b || a != c {
                failures.push("manifests differ between runs".into());
            }
        }
        (a, b, c) => failures.extend([a, b, c].into_iter().filter_map(|r| r.err())),
    }
    let notes = vec![format!("{many} vs 1 threads, {:.1}s", start.elapsed().as_secs_f64())];
    print(8, "determinism", &failures, &notes);

    let mut red: Vec<usize> = (1..=7).filter(|&i| !first[i - 1].failures.is_empty()).collect();
    if !failures.is_empty() {
        red.push(8);
    }
    let shown: Vec<String> = red.iter().map(usize::to_string).collect();
    println!("acceptance: {} of 8 criteria pass; failing: [{}]", 8 - red.len(), shown.join(", "));
}
