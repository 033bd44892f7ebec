//! Definability of a target relation or function tuple over a finite class,
//! per syntactic class, with verified witnesses or preservation
//! counterexamples.
//!
//! Every check works on columns: pairs `(member, tuple)` ranging over all
//! tuples of the target's arity. The pointed substructure generated by a
//! column, and subpowers generated by sets of columns, carry all the
//! information the preservation criteria need.

mod columns;
mod conj;
mod exist;
mod horn;
mod open;

use serde::{Deserialize, Serialize};

use crate::algebra::{FiniteStructure, MixedRadix, Signature};
use crate::error::{Error, Result};
use crate::formula::{classify, defines, Formula, SyntacticClass};
use crate::subpowers::MapKind;
use crate::target::Target;

pub(crate) use columns::greedy_cover;
use columns::Problem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    /// Largest number of product coordinates a subpower closure may use.
    pub max_product_coords: usize,
    /// Largest number of factors in the product searches of the
    /// existential Horn and primitive positive classes.
    pub max_poly_arity: usize,
    /// Largest product universe those searches may enumerate.
    pub max_poly_elements: usize,
    pub max_rows: usize,
    /// Operation applications per closure.
    pub max_work: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_product_coords: 4096,
            max_poly_arity: 3,
            max_poly_elements: 1024,
            max_rows: 500_000,
            max_work: 300_000_000,
        }
    }
}

/// Is `target` definable in `class` by a formula of `syntactic_class` over
/// the operation symbols of `language`?
#[derive(Clone, Debug)]
pub struct Query {
    pub class: Vec<FiniteStructure>,
    pub language: Signature,
    pub target: Target,
    pub syntactic_class: SyntacticClass,
    pub bounds: Bounds,
}

impl Query {
    pub fn new(class: Vec<FiniteStructure>, language: Signature, target: Target, syntactic_class: SyntacticClass) -> Query {
        Query {
            class,
            language,
            target,
            syntactic_class,
            bounds: Bounds::default(),
        }
    }

    /// The language of the first member without the target symbols.
    pub fn complement_language(class: &[FiniteStructure], target: &Target) -> Result<Signature> {
        let first = class.first().ok_or_else(|| Error::Query("empty class".into()))?;
        let sig = first.signature();
        let names: Vec<&str> = sig
            .ops()
            .iter()
            .map(|s| s.name.as_str())
            .filter(|n| !target.symbols().contains(n))
            .collect();
        sig.restrict(&names)
    }

    fn validate(&self) -> Result<()> {
        if self.class.is_empty() {
            return Err(Error::Query("empty class".into()));
        }
        if let Some(r) = self.language.rels().first() {
            return Err(Error::Query(format!(
                "relation symbol `{}` in the language: only operation symbols are supported",
                r.name
            )));
        }
        for s in self.target.symbols() {
            if self.language.contains(s) {
                return Err(Error::Query(format!("target symbol `{s}` belongs to the language")));
            }
        }
        let shape = self.target.shape(self.class[0].signature())?;
        for a in &self.class {
            if !self.language.is_sublanguage_of(a.signature()) {
                return Err(Error::NotSublanguage(a.name().to_string()));
            }
            if self.target.shape(a.signature())? != shape {
                return Err(Error::Query(format!("member `{}` interprets the target differently", a.name())));
            }
        }
        if shape.0 + shape.1 == 0 {
            return Err(Error::Query("nullary targets are not supported".into()));
        }
        Ok(())
    }
}

/// A map from a substructure of a product of members to a substructure of a
/// member that takes a tuple of the target relation outside it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub kind: MapKind,
    /// Members whose product hosts the source; empty for the one-element
    /// product, where every relation holds.
    pub source_factors: Vec<usize>,
    /// Source universe as coordinate tuples, sorted.
    pub source: Vec<Vec<usize>>,
    pub target_member: usize,
    /// Target universe, sorted.
    pub target: Vec<usize>,
    /// `map[i]` is the image of `source[i]`.
    pub map: Vec<usize>,
    /// A tuple of the target relation in the source, one coordinate tuple
    /// per position.
    pub tuple: Vec<Vec<usize>>,
    /// Its image, outside the target relation of `target_member`.
    pub image: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Definable { witness: Formula, verified: bool },
    NotDefinable { counterexample: Box<Counterexample> },
    ResourceExceeded { report: String },
}

impl Verdict {
    pub fn is_definable(&self) -> bool {
        matches!(self, Verdict::Definable { .. })
    }

    pub fn witness(&self) -> Option<&Formula> {
        match self {
            Verdict::Definable { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Definable { .. } => 0,
            Verdict::NotDefinable { .. } => 1,
            Verdict::ResourceExceeded { .. } => 3,
        }
    }
}

pub(crate) enum Outcome {
    Formula(Formula),
    Counter(Counterexample),
    Bounded(String),
}

/// Decides the query.
pub fn check(q: &Query) -> Result<Verdict> {
    q.validate()?;
    let reducts: Vec<FiniteStructure> = q.class.iter().map(|a| a.reduct(&q.language)).collect::<Result<_>>()?;
    let ext: Vec<Vec<bool>> = q.class.iter().map(|a| q.target.extension(a)).collect::<Result<_>>()?;
    let vars = q.target.var_names(q.class[0].signature())?;
    let p = Problem::new(&reducts, &q.language, vars, &ext, q.bounds);
    let outcome = match run_class(&p, q.syntactic_class) {
        Ok(o) => o,
        Err(Error::Resource(msg)) => return Ok(Verdict::ResourceExceeded { report: msg }),
        Err(e) => return Err(e),
    };
    match outcome {
        Outcome::Formula(f) => {
            if !classify(&f).contains(&q.syntactic_class) {
                return Err(Error::Internal(format!("witness {f} is not in class {}", q.syntactic_class)));
            }
            if !defines(&q.class, &f, &q.target)? {
                return Err(Error::Internal(format!("witness {f} does not define {}", q.target)));
            }
            Ok(Verdict::Definable {
                witness: f,
                verified: true,
            })
        }
        Outcome::Counter(c) => Ok(Verdict::NotDefinable {
            counterexample: Box::new(c),
        }),
        Outcome::Bounded(report) => Ok(Verdict::ResourceExceeded { report }),
    }
}

fn run_class(p: &Problem, class: SyntacticClass) -> Result<Outcome> {
    use SyntacticClass::*;
    match class {
        AtomicConj => conj::atomic_conj(p),
        PositiveOpen => open::open_class(p, true),
        Open => open::open_class(p, false),
        OpenHorn => horn::open_horn(p, false),
        OpenStrictHorn => horn::open_horn(p, true),
        Existential => exist::existential(p, false),
        ExistPositive => exist::existential(p, true),
        PP => exist::primitive_positive(p),
        ExistHorn => exist::exist_horn(p),
    }
}

/// Re-checks a counterexample against the query from scratch: the source
/// and target are closed, the map is a map of the stated kind, the tuple
/// lies in the target relation of every factor and its image does not.
pub fn verify_counterexample(q: &Query, c: &Counterexample) -> Result<()> {
    let fail = |msg: &str| Err(Error::Internal(format!("counterexample check failed: {msg}")));
    let lang = &q.language;
    let member = |i: usize| q.class.get(i).ok_or_else(|| Error::Query(format!("no member {i}")));
    let factors: Vec<&FiniteStructure> = c.source_factors.iter().map(|&i| member(i)).collect::<Result<_>>()?;
    let b = member(c.target_member)?;
    if c.map.len() != c.source.len() {
        return fail("map and source differ in length");
    }
    let src_index = |x: &[usize]| c.source.binary_search_by(|s| s.as_slice().cmp(x)).ok();
    if c.source.iter().any(|s| s.len() != factors.len() || s.iter().zip(&factors).any(|(&v, f)| v >= f.size())) {
        return fail("source element out of range");
    }
    if !c.source.windows(2).all(|w| w[0] < w[1]) || !c.target.windows(2).all(|w| w[0] < w[1]) {
        return fail("universes must be sorted without repetitions");
    }
    if c.target.iter().any(|&t| t >= b.size()) {
        return fail("target element out of range");
    }
    let in_target = |t: usize| c.target.binary_search(&t).is_ok();
    for sym in lang.ops() {
        let ops: Vec<usize> = factors.iter().map(|f| f.signature().op_index(&sym.name).unwrap()).collect();
        let bop = b.signature().op_index(&sym.name).unwrap();
        let ids: Vec<usize> = (0..c.source.len()).collect();
        for args in crate::algebra::tuples_from(&ids, sym.arity) {
            let value: Vec<usize> = (0..factors.len())
                .map(|j| {
                    let a: Vec<usize> = args.iter().map(|&i| c.source[i][j]).collect();
                    factors[j].apply(ops[j], &a)
                })
                .collect();
            let Some(vi) = src_index(&value) else {
                return fail(&format!("source not closed under `{}`", sym.name));
            };
            let imgs: Vec<usize> = args.iter().map(|&i| c.map[i]).collect();
            if b.apply(bop, &imgs) != c.map[vi] {
                return fail(&format!("map does not commute with `{}`", sym.name));
            }
        }
        let targets = c.target.clone();
        for args in crate::algebra::tuples_from(&targets, sym.arity) {
            if !in_target(b.apply(bop, &args)) {
                return fail(&format!("target not closed under `{}`", sym.name));
            }
        }
    }
    if c.map.iter().any(|&t| !in_target(t)) {
        return fail("image leaves the target");
    }
    if c.kind != MapKind::Hom {
        let mut seen = c.map.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != c.map.len() {
            return fail("map is not injective");
        }
        if c.kind == MapKind::Isomorphism && seen != c.target {
            return fail("map is not onto the target");
        }
    }
    let arity = q.target.arity(b.signature())?;
    if c.tuple.len() != arity || c.image.len() != arity {
        return fail("tuple arity");
    }
    let mut image = Vec::with_capacity(arity);
    for t in &c.tuple {
        let Some(i) = src_index(t) else {
            return fail("tuple entry outside the source");
        };
        image.push(c.map[i]);
    }
    if image != c.image {
        return fail("image is not the map applied to the tuple");
    }
    for (j, f) in factors.iter().enumerate() {
        let coords: Vec<usize> = c.tuple.iter().map(|t| t[j]).collect();
        if !in_relation(q, f, &coords)? {
            return fail(&format!("tuple not in the target relation of factor {j}"));
        }
    }
    if in_relation(q, b, &c.image)? {
        return fail("image lies in the target relation");
    }
    Ok(())
}

fn in_relation(q: &Query, a: &FiniteStructure, t: &[usize]) -> Result<bool> {
    let ext = q.target.extension(a)?;
    let idx = MixedRadix::new(vec![a.size(); t.len()]).encode(t);
    Ok(ext[idx])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{bool2, demorgan_circ, stone3};
    use crate::formula::SyntacticClass::*;

    fn query(a: FiniteStructure, target: &str, class: SyntacticClass) -> Query {
        let t = Target::function(target);
        let lang = Query::complement_language(std::slice::from_ref(&a), &t).unwrap();
        Query::new(vec![a], lang, t, class)
    }

    fn run(q: &Query) -> Verdict {
        let v = check(q).unwrap();
        if let Verdict::NotDefinable { counterexample } = &v {
            verify_counterexample(q, counterexample).unwrap();
        }
        v
    }

    #[test]
    fn stone_swap_is_not_positive_open() {
        let s = stone3().with_operation("f", 1, |x| [2, 1, 0][x[0]]).unwrap();
        let v = run(&query(s, "f", PositiveOpen));
        let Verdict::NotDefinable { counterexample } = v else { panic!("{v:?}") };
        assert_eq!(counterexample.kind, MapKind::Hom);
    }

    #[test]
    fn stone_constant_half_is_not_pp() {
        let s = stone3().with_operation("f", 1, |_| 1).unwrap();
        let v = run(&query(s, "f", PP));
        let Verdict::NotDefinable { counterexample } = v else { panic!("{v:?}") };
        assert_eq!(counterexample.map, vec![0, 2, 2]);
    }

    #[test]
    fn double_star_in_every_class() {
        for class in crate::formula::ALL_CLASSES {
            let s = stone3().with_operation("f", 1, |x| [0, 2, 2][x[0]]).unwrap();
            let v = run(&query(s, "f", class));
            assert!(v.is_definable(), "{class}: {v:?}");
        }
    }

    #[test]
    fn demorgan_circ_is_positive_open() {
        let m = demorgan_circ();
        let v = run(&query(m, "circ", PositiveOpen));
        assert!(v.is_definable(), "{v:?}");
    }

    #[test]
    fn boolean_negation_over_lattice_reduct() {
        let b = bool2();
        let lang = b.signature().restrict(&["meet", "join", "zero", "one"]).unwrap();
        for class in [OpenHorn, Open, PositiveOpen, AtomicConj, PP] {
            let q = Query::new(vec![b.clone()], lang.clone(), Target::function("neg"), class);
            let v = run(&q);
            assert!(v.is_definable(), "{class}: {v:?}");
        }
    }

    #[test]
    fn empty_relation() {
        let b = bool2().with_relation("e", 1, vec![]).unwrap();
        let lang = b.signature().restrict(&["meet", "join", "neg", "zero", "one"]).unwrap();
        for class in crate::formula::ALL_CLASSES {
            let q = Query::new(vec![b.clone()], lang.clone(), Target::relation("e"), class);
            assert!(run(&q).is_definable(), "{class}");
        }
        let s = stone3().reduct_to(&["meet", "join"]).unwrap().with_relation("e", 1, vec![]).unwrap();
        let lang = s.signature().restrict(&["meet", "join"]).unwrap();
        for class in crate::formula::ALL_CLASSES {
            let q = Query::new(vec![s.clone()], lang.clone(), Target::relation("e"), class);
            let v = run(&q);
            assert_eq!(v.is_definable(), !class.is_positive() && class != OpenStrictHorn, "{class}: {v:?}");
        }
    }
}
