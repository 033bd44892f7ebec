//! Term interpolation: definitions by cases, merging cases with a
//! discriminator term, and the Baker–Pixley procedure for classes with a
//! majority term.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::algebra::{tuples, FiniteStructure, Signature};
use crate::clone::{
    columns, discriminator, find_discriminator_term, find_majority_term, find_representing_term, quaternary_discriminator,
    search_row, term_operations, CaseDefinition, CloneBounds, FunctionTable, NotClosed, Representation, RowSearch,
};
use crate::closure::{Closure, Event, Status};
use crate::definability::{self, greedy_cover, Counterexample, Query, Verdict};
use crate::error::{Error, Result};
use crate::formula::{CompiledFormula, Formula, SyntacticClass};
use crate::subpowers::generated_subuniverse;
use crate::target::Target;
use crate::term::{var_name, Term};

/// A function symbol interpreted on every member of `class`, to be
/// expressed through the operations of `language`.
#[derive(Clone, Debug)]
pub struct InterpolationProblem {
    pub class: Vec<FiniteStructure>,
    pub language: Signature,
    pub target: String,
    pub bounds: CloneBounds,
    pub definability: definability::Bounds,
}

impl InterpolationProblem {
    pub fn new(class: Vec<FiniteStructure>, language: Signature, target: &str) -> InterpolationProblem {
        InterpolationProblem {
            class,
            language,
            target: target.to_string(),
            bounds: CloneBounds::default(),
            definability: definability::Bounds::default(),
        }
    }

    /// Language of the first member without the target symbol.
    pub fn over_rest(class: Vec<FiniteStructure>, target: &str) -> Result<InterpolationProblem> {
        let language = Query::complement_language(&class, &Target::function(target))?;
        Ok(InterpolationProblem::new(class, language, target))
    }

    pub fn function(&self) -> Result<FunctionTable> {
        if self.language.contains(&self.target) {
            return Err(Error::Query(format!("target `{}` belongs to the language", self.target)));
        }
        FunctionTable::from_symbol(&self.class, &self.target)
    }

    fn reducts(&self) -> Result<Vec<FiniteStructure>> {
        self.class.iter().map(|a| a.reduct(&self.language)).collect()
    }
}

fn x_vars(n: usize) -> Vec<String> {
    (0..n).map(|i| var_name("x", i)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CasesOutcome {
    Cases { definition: CaseDefinition },
    /// `Sg(ā)` in a member does not contain `f(ā)`.
    NotClosed { certificate: NotClosed },
    /// A map between substructures that does not preserve `f`.
    NotPreserved { counterexample: Box<Counterexample> },
    ResourceExceeded { report: String },
}

/// Definition of `f` by cases `t_i|φ_i` with open (or positive open) `φ_i`:
/// every subuniverse must be closed under `f` and every isomorphism (or
/// homomorphism) between substructures must preserve it. The terms cover
/// the columns greedily; `φ_i(x̄) = φ(x̄, t_i(x̄))` for a definition `φ` of the
/// graph of `f`.
pub fn find_term_by_cases(p: &InterpolationProblem, positive: bool) -> Result<CasesOutcome> {
    let f = p.function()?;
    let n = f.arity;
    let reducts = p.reducts()?;
    for (m, a) in reducts.iter().enumerate() {
        for t in tuples(a.size(), n) {
            let sg = generated_subuniverse(a, &t)?;
            let image = f.eval(m, a.size(), &t);
            if !sg.contains(image) {
                return Ok(CasesOutcome::NotClosed {
                    certificate: NotClosed {
                        columns: vec![(m, t.clone())],
                        generators: t.iter().map(|&v| vec![v]).collect(),
                        subuniverse: sg.elements.iter().map(|&v| vec![v]).collect(),
                        image: vec![image],
                    },
                });
            }
        }
    }
    let class = if positive {
        SyntacticClass::PositiveOpen
    } else {
        SyntacticClass::Open
    };
    let mut q = Query::new(p.class.clone(), p.language.clone(), Target::function(&p.target), class);
    q.bounds = p.definability;
    let phi = match definability::check(&q)? {
        Verdict::Definable { witness, .. } => witness,
        Verdict::NotDefinable { counterexample } => return Ok(CasesOutcome::NotPreserved { counterexample }),
        Verdict::ResourceExceeded { report } => return Ok(CasesOutcome::ResourceExceeded { report }),
    };
    let (cols, candidates) = match case_candidates(p, n)? {
        Some(c) => c,
        None => {
            return Ok(CasesOutcome::ResourceExceeded {
                report: "closure of a single tuple exceeded the row bound".into(),
            })
        }
    };
    let w = cols.len();
    let agree: Vec<FixedBitSet> = candidates
        .iter()
        .map(|t| {
            let mut s = FixedBitSet::with_capacity(w);
            s.extend((0..w).filter(|&c| t.1[c] == f.eval(cols[c].0, p.class[cols[c].0].size(), &cols[c].1) as u32));
            s
        })
        .collect();
    let mut need = FixedBitSet::with_capacity(w);
    need.insert_range(..);
    let pick = greedy_cover(&need, &agree).ok_or_else(|| Error::Internal("closed under f but no covering terms".into()))?;
    let z = var_name("z", 0);
    let cases: Vec<(Term, Formula)> = if let [i] = pick[..] {
        vec![(candidates[i].0.clone(), Formula::verum(&var_name("x", 0)))]
    } else {
        pick.into_iter()
            .map(|i| {
                let t = candidates[i].0.clone();
                let map: HashMap<String, Term> = [(z.clone(), t.clone())].into_iter().collect();
                (t, phi.substitute(&map))
            })
            .collect()
    };
    let definition = CaseDefinition {
        target: p.target.clone(),
        cases,
    };
    validate_cases(&p.class, &definition)?;
    Ok(CasesOutcome::Cases { definition })
}

/// Rows probed before giving up on the whole term clone.
pub const MAX_CLONE_ROWS: usize = 200_000;

/// Candidate terms with their values on every column: all term operations
/// when they fit in `MAX_CLONE_ROWS` rows, otherwise the first derivation of
/// `f(ā)` in `Sg(ā)` for each column `ā`.
#[allow(clippy::type_complexity)]
fn case_candidates(p: &InterpolationProblem, n: usize) -> Result<Option<(Vec<(usize, Vec<usize>)>, Vec<(Term, Vec<u32>)>)>> {
    let f = p.function()?;
    let mut small = p.bounds;
    small.max_rows = small.max_rows.min(MAX_CLONE_ROWS);
    match term_operations(&p.class, &p.language, n, small) {
        Ok(ops) if ops.fixpoint => {
            let rows = (0..ops.len()).map(|i| (ops.witness(i), ops.row(i).to_vec())).collect();
            return Ok(Some((ops.columns.clone(), rows)));
        }
        Ok(_) | Err(Error::Resource(_)) => {}
        Err(e) => return Err(e),
    }
    let cols = columns(&p.class, n);
    let vars: Vec<Term> = x_vars(n).into_iter().map(Term::var).collect();
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for (m, t) in &cols {
        let a = &p.class[*m];
        let want = f.eval(*m, a.size(), t) as u32;
        let mut c = Closure::new(&p.language, &[a], 1, p.bounds.max_rows)?;
        let mut found = None;
        let mut cb = |e: Event| match e {
            Event::New { row, values } if values[0] == want => {
                found = Some(row);
                true
            }
            _ => false,
        };
        let gens: Vec<Vec<u32>> = t.iter().map(|&v| vec![v as u32]).collect();
        let result = match c.seed(&gens, &mut cb) {
            Ok(true) => Ok(Status::Stopped),
            Ok(false) => c.run(None, &mut cb),
            Err(e) => Err(e),
        };
        match result {
            Ok(_) => {}
            Err(Error::Resource(_)) => return Ok(None),
            Err(e) => return Err(e),
        }
        let row = found.ok_or_else(|| Error::Internal(format!("f{t:?} missing from Sg{t:?}")))?;
        let term = c.term(row, &vars);
        if seen.insert(term.clone()) {
            let values = cols
                .iter()
                .map(|(mm, tt)| Ok(term.compile(p.class[*mm].signature(), &x_vars(n))?.eval(&p.class[*mm], tt) as u32))
                .collect::<Result<Vec<_>>>()?;
            out.push((term, values));
        }
    }
    Ok(Some((cols, out)))
}

/// Checks that the cases cover every tuple and agree with the target
/// wherever they hold.
pub fn validate_cases(k: &[FiniteStructure], d: &CaseDefinition) -> Result<()> {
    let f = FunctionTable::from_symbol(k, &d.target)?;
    let vars = x_vars(f.arity);
    for (m, a) in k.iter().enumerate() {
        let compiled: Vec<(crate::term::CompiledTerm, CompiledFormula)> = d
            .cases
            .iter()
            .map(|(t, phi)| Ok((t.compile(a.signature(), &vars)?, CompiledFormula::new(phi, a.signature(), &vars)?)))
            .collect::<Result<_>>()?;
        for args in tuples(a.size(), f.arity) {
            let want = f.eval(m, a.size(), &args);
            let mut covered = false;
            for (i, (t, phi)) in compiled.iter().enumerate() {
                if phi.eval(a, &args) {
                    covered = true;
                    if t.eval(a, &args) != want {
                        return Err(Error::Internal(format!("case {i} disagrees with {} at {args:?} in {}", d.target, a.name())));
                    }
                }
            }
            if !covered {
                return Err(Error::Internal(format!("no case holds at {args:?} in {}", a.name())));
            }
        }
    }
    Ok(())
}

fn is_discriminator(k: &[FiniteStructure], t: &Term) -> Result<bool> {
    let vars = x_vars(3);
    for a in k {
        let c = t.compile(a.signature(), &vars)?;
        if !tuples(a.size(), 3).all(|v| c.eval(a, &v) == discriminator(v[0], v[1], v[2])) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `p = q` (`holds`) or `p ≠ q` (not `holds`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Literal {
    pub p: Term,
    pub q: Term,
    pub holds: bool,
}

impl Literal {
    pub fn formula(&self) -> Formula {
        let e = Formula::eq(self.p.clone(), self.q.clone());
        if self.holds {
            e
        } else {
            Formula::not(e)
        }
    }

    fn negate(self) -> Literal {
        Literal { holds: !self.holds, ..self }
    }
}

/// Rewrites open formulas into single (in)equations with a quaternary
/// discriminator term `D(x1, x2, x3, x4)`.
struct Translator<'a> {
    d: &'a Term,
    anchor: Term,
}

impl Translator<'_> {
    fn apply(&self, args: [Term; 4]) -> Term {
        let map: HashMap<String, Term> = args.into_iter().enumerate().map(|(i, t)| (var_name("x", i), t)).collect();
        self.d.substitute(&map)
    }

    fn or(&self, a: Literal, b: Literal) -> Literal {
        let x = self.anchor.clone();
        match (a.holds, b.holds) {
            (true, true) => Literal {
                p: self.apply([a.p.clone(), a.q.clone(), x.clone(), b.p]),
                q: self.apply([a.p, a.q, x, b.q]),
                holds: true,
            },
            (false, true) => Literal {
                p: self.apply([a.p.clone(), a.q.clone(), b.p, x.clone()]),
                q: self.apply([a.p, a.q, b.q, x]),
                holds: true,
            },
            (true, false) => self.or(b, a),
            (false, false) => self.and(a.negate(), b.negate()).negate(),
        }
    }

    fn and(&self, a: Literal, b: Literal) -> Literal {
        self.or(a.negate(), b.negate()).negate()
    }

    fn translate(&self, f: &Formula) -> Result<Literal> {
        let fold = |fs: &[Formula], conj: bool| -> Result<Literal> {
            let mut it = fs.iter();
            let first = match it.next() {
                Some(g) => self.translate(g)?,
                None => Literal {
                    p: self.anchor.clone(),
                    q: self.anchor.clone(),
                    holds: conj,
                },
            };
            it.try_fold(first, |acc, g| {
                let l = self.translate(g)?;
                Ok(if conj { self.and(acc, l) } else { self.or(acc, l) })
            })
        };
        match f {
            Formula::Eq(p, q) => Ok(Literal {
                p: p.clone(),
                q: q.clone(),
                holds: true,
            }),
            Formula::Not(g) => Ok(self.translate(g)?.negate()),
            Formula::And(fs) => fold(fs, true),
            Formula::Or(fs) => fold(fs, false),
            Formula::Implies(a, b) => Ok(self.or(self.translate(a)?.negate(), self.translate(b)?)),
            Formula::Rel(..) | Formula::Exists(..) | Formula::Forall(..) => {
                Err(Error::Query(format!("case condition {f} is not an open formula of equations")))
            }
        }
    }
}

/// The equivalent (in)equation of an open formula over `K`, checked on
/// every member.
pub fn translate_condition(k: &[FiniteStructure], phi: &Formula, t: &Term, vars: &[String]) -> Result<Literal> {
    let anchor = Term::var(vars.first().ok_or_else(|| Error::Query("nullary target".into()))?);
    let d = quaternary_discriminator(t)?;
    let lit = Translator { d: &d, anchor }.translate(phi)?;
    let equiv = Formula::and(vec![
        Formula::implies(phi.clone(), lit.formula()),
        Formula::implies(lit.formula(), phi.clone()),
    ]);
    for a in k {
        let c = CompiledFormula::new(&equiv, a.signature(), vars)?;
        if let Some(v) = tuples(a.size(), vars.len()).find(|v| !c.eval(a, v)) {
            return Err(Error::Internal(format!("translation of {phi} fails at {v:?} in {}", a.name())));
        }
    }
    Ok(lit)
}

/// Merges `t_1|φ_1 ∪ … ∪ t_k|φ_k` into one term with the discriminator
/// term `t`: each `φ_i` becomes `p_i = q_i` or `p_i ≠ q_i`, and the cases are
/// merged right to left as `D(p_i, q_i, t_i, rest)` or `D(p_i, q_i, rest, t_i)`,
/// so the leftmost case that holds decides.
pub fn merge_cases_discriminator(k: &[FiniteStructure], cases: &CaseDefinition, t: &Term) -> Result<Term> {
    if !is_discriminator(k, t)? {
        return Err(Error::Query(format!("{t} is not a discriminator term for the class")));
    }
    validate_cases(k, cases)?;
    let f = FunctionTable::from_symbol(k, &cases.target)?;
    let vars = x_vars(f.arity);
    let d = quaternary_discriminator(t)?;
    let Some(((last, _), rest)) = cases.cases.split_last() else {
        return Err(Error::Query("no cases".into()));
    };
    let mut merged = last.clone();
    for (ti, phi) in rest.iter().rev() {
        let lit = translate_condition(k, phi, t, &vars)?;
        let (yes, no) = if lit.holds {
            (ti.clone(), merged)
        } else {
            (merged, ti.clone())
        };
        let map: HashMap<String, Term> = [lit.p, lit.q, yes, no]
            .into_iter()
            .enumerate()
            .map(|(i, s)| (var_name("x", i), s))
            .collect();
        merged = d.substitute(&map);
    }
    for (m, a) in k.iter().enumerate() {
        let c = merged.compile(a.signature(), &vars)?;
        if let Some(v) = tuples(a.size(), f.arity).find(|v| c.eval(a, v) != f.eval(m, a.size(), v)) {
            return Err(Error::Internal(format!("merged term disagrees with {} at {v:?}", cases.target)));
        }
    }
    Ok(merged)
}

/// Name given to the discriminator when it is added as a new operation.
pub const DISCRIMINATOR_SYMBOL: &str = "disc";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PixleyReport {
    /// A term representing the ternary discriminator on every member.
    pub discriminator: Option<Term>,
    /// The discriminator as a new operation, defined by positive cases or
    /// refuted by a counterexample.
    pub cases: CasesOutcome,
}

impl PixleyReport {
    pub fn quasiprimal(&self) -> bool {
        self.discriminator.is_some()
    }
}

/// Searches for a discriminator term, and independently decides whether the
/// discriminator is term valued with positive cases.
pub fn pixley_check(k: &[FiniteStructure], lang: &Signature, bounds: CloneBounds) -> Result<PixleyReport> {
    let discriminator_term = find_discriminator_term(k, lang, bounds)?;
    let expanded: Vec<FiniteStructure> = k
        .iter()
        .map(|a| a.reduct(lang)?.with_operation(DISCRIMINATOR_SYMBOL, 3, |v| discriminator(v[0], v[1], v[2])))
        .collect::<Result<_>>()?;
    let mut p = InterpolationProblem::new(expanded, lang.clone(), DISCRIMINATOR_SYMBOL);
    p.bounds = bounds;
    Ok(PixleyReport {
        discriminator: discriminator_term,
        cases: find_term_by_cases(&p, true)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum BakerPixley {
    /// `term` from the row scan; `interpolated` from the majority
    /// induction when the number of columns allows it.
    Term { term: Term, interpolated: Option<Term> },
    /// A subuniverse of a product of at most two members not closed under
    /// `f`.
    NotClosed { certificate: NotClosed },
}

/// Columns beyond which the majority induction is skipped: its term grows
/// by a factor of three per column.
pub const MAX_INDUCTION_COLUMNS: usize = 8;

/// Baker–Pixley: with a majority term, `f` is a term exactly when every
/// subuniverse of `A × B` for members `A`, `B` is closed under `f × f`.
pub fn baker_pixley_term(p: &InterpolationProblem) -> Result<BakerPixley> {
    let f = p.function()?;
    let majority = find_majority_term(&p.class, &p.language, p.bounds)?
        .ok_or_else(|| Error::Query("the class has no majority term in the language".into()))?;
    let term = match find_representing_term(&p.class, &p.language, &f, p.bounds)? {
        Representation::Term(t) => t,
        Representation::NotRepresentable(c) if c.columns.len() <= 2 => return Ok(BakerPixley::NotClosed { certificate: c }),
        Representation::NotRepresentable(c) => {
            return Err(Error::Internal(format!(
                "majority term present but the smallest certificate uses {} columns",
                c.columns.len()
            )))
        }
    };
    let vars = x_vars(f.arity);
    for (m, a) in p.class.iter().enumerate() {
        let c = term.compile(a.signature(), &vars)?;
        if tuples(a.size(), f.arity).any(|v| c.eval(a, &v) != f.eval(m, a.size(), &v)) {
            return Err(Error::Internal(format!("row scan term {term} does not represent {}", p.target)));
        }
    }
    let interpolated = majority_induction(p, &f, &majority)?;
    if let Some(t) = &interpolated {
        for (m, a) in p.class.iter().enumerate() {
            let c = t.compile(a.signature(), &vars)?;
            if tuples(a.size(), f.arity).any(|v| c.eval(a, &v) != f.eval(m, a.size(), &v)) {
                return Err(Error::Internal(format!("interpolated term does not represent {}", p.target)));
            }
        }
    }
    Ok(BakerPixley::Term { term, interpolated })
}

/// `t_C = M(t_{C−c1}, t_{C−c2}, t_{C−c3})` over sets `C` of columns, from
/// two-column interpolants.
fn majority_induction(p: &InterpolationProblem, f: &FunctionTable, m: &Term) -> Result<Option<Term>> {
    let mut cols = columns(&p.class, f.arity);
    let first: Vec<usize> = (0..p.class.len())
        .map(|i| (0..=i).find(|&j| p.class[j] == p.class[i]).unwrap())
        .collect();
    let mut seen = std::collections::HashSet::new();
    cols.retain(|(i, t)| seen.insert((first[*i], t.clone())));
    if cols.len() > MAX_INDUCTION_COLUMNS {
        return Ok(None);
    }
    let want: Vec<u32> = cols
        .iter()
        .map(|(i, t)| f.eval(*i, p.class[*i].size(), t) as u32)
        .collect();
    let mut memo: HashMap<Vec<usize>, Term> = HashMap::new();
    let all: Vec<usize> = (0..cols.len()).collect();
    interpolate(p, f.arity, &cols, &want, m, &all, &mut memo).map(Some)
}

fn interpolate(
    p: &InterpolationProblem,
    n: usize,
    cols: &[(usize, Vec<usize>)],
    want: &[u32],
    m: &Term,
    set: &[usize],
    memo: &mut HashMap<Vec<usize>, Term>,
) -> Result<Term> {
    if let Some(t) = memo.get(set) {
        return Ok(t.clone());
    }
    let t = if set.len() <= 2 {
        let sub: Vec<(usize, Vec<usize>)> = set.iter().map(|&i| cols[i].clone()).collect();
        let target: Vec<u32> = set.iter().map(|&i| want[i]).collect();
        match search_row(&p.class, &p.language, n, &sub, &target, p.bounds)? {
            RowSearch::Found(t) => t,
            RowSearch::Absent => return Err(Error::Internal("two-column interpolant missing after the row scan".into())),
        }
    } else {
        let parts = (0..3)
            .map(|j| {
                let smaller: Vec<usize> = set.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &c)| c).collect();
                interpolate(p, n, cols, want, m, &smaller, memo)
            })
            .collect::<Result<Vec<_>>>()?;
        let map: HashMap<String, Term> = parts.into_iter().enumerate().map(|(i, t)| (var_name("x", i), t)).collect();
        m.substitute(&map)
    };
    memo.insert(set.to_vec(), t.clone());
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{bool2, stone3};
    use crate::term::evaluate_term;

    fn with_disc(a: FiniteStructure) -> FiniteStructure {
        a.with_operation("d", 3, |v| discriminator(v[0], v[1], v[2])).unwrap()
    }

    #[test]
    fn discriminator_by_cases_over_sets() {
        let b = with_disc(bool2());
        let p = InterpolationProblem::new(vec![b], Signature::new(vec![], vec![]).unwrap(), "d");
        let CasesOutcome::Cases { definition } = find_term_by_cases(&p, false).unwrap() else { panic!() };
        let terms: Vec<&Term> = definition.cases.iter().map(|(t, _)| t).collect();
        assert_eq!(terms, vec![&Term::var("x1"), &Term::var("x3")]);
    }

    #[test]
    fn term_is_a_single_case() {
        let b = bool2().with_operation("f", 2, |v| v[0] & v[1]).unwrap();
        let p = InterpolationProblem::over_rest(vec![b], "f").unwrap();
        let CasesOutcome::Cases { definition } = find_term_by_cases(&p, true).unwrap() else { panic!() };
        assert_eq!(definition.cases.len(), 1);
    }

    #[test]
    fn negation_on_meet_semilattice_is_not_closed() {
        let b = bool2().reduct_to(&["meet", "neg"]).unwrap();
        let p = InterpolationProblem::over_rest(vec![b], "neg").unwrap();
        let CasesOutcome::NotClosed { certificate } = find_term_by_cases(&p, false).unwrap() else { panic!() };
        assert_eq!(certificate.generators, vec![vec![0]]);
        assert_eq!(certificate.image, vec![1]);
    }

    #[test]
    fn merge_on_bool2() {
        let b = with_disc(bool2());
        let k = vec![b.clone()];
        let t = find_discriminator_term(&k, bool2().signature(), CloneBounds::default()).unwrap().unwrap();
        let x = |i| Term::var(var_name("x", i));
        let eq = Formula::eq(x(0), x(1));
        let cases = CaseDefinition {
            target: "d".into(),
            cases: vec![(x(2), eq.clone()), (x(0), Formula::not(eq))],
        };
        let merged = merge_cases_discriminator(&k, &cases, &t).unwrap();
        for v in tuples(2, 3) {
            assert_eq!(evaluate_term(&b, &merged, &v).unwrap(), discriminator(v[0], v[1], v[2]));
        }
    }

    #[test]
    fn merge_on_quasiprimal_stone() {
        let s = with_disc(stone3());
        let x = |i| Term::var(var_name("x", i));
        let regular = Formula::eq(x(0), Term::app("star", vec![Term::app("star", vec![x(0)])]));
        let f = s.with_operation("f", 3, |v| if v[0] == 1 { v[2] } else { v[1] }).unwrap();
        let cases = CaseDefinition {
            target: "f".into(),
            cases: vec![(x(1), regular.clone()), (x(2), Formula::not(regular))],
        };
        let t = Term::app("d", vec![x(0), x(1), x(2)]);
        let merged = merge_cases_discriminator(std::slice::from_ref(&f), &cases, &t).unwrap();
        for v in tuples(3, 3) {
            assert_eq!(evaluate_term(&f, &merged, &v).unwrap(), if v[0] == 1 { v[2] } else { v[1] });
        }
        let p = InterpolationProblem::new(vec![f], s.signature().clone(), "f");
        assert!(matches!(find_term_by_cases(&p, false).unwrap(), CasesOutcome::Cases { .. }));
    }

    #[test]
    fn pixley() {
        let b = bool2();
        let r = pixley_check(std::slice::from_ref(&b), b.signature(), CloneBounds::default()).unwrap();
        assert!(r.quasiprimal());
        assert!(matches!(r.cases, CasesOutcome::Cases { .. }));
        let s = stone3();
        let r = pixley_check(std::slice::from_ref(&s), s.signature(), CloneBounds::default()).unwrap();
        assert!(!r.quasiprimal());
        let CasesOutcome::NotPreserved { counterexample } = r.cases else { panic!("{r:?}") };
        assert_eq!(counterexample.kind, crate::subpowers::MapKind::Hom);
    }

    #[test]
    fn baker_pixley_on_bool2() {
        for code in 0..16usize {
            let b = bool2().with_operation("f", 2, |v| (code >> (2 * v[0] + v[1])) & 1).unwrap();
            let p = InterpolationProblem::over_rest(vec![b.clone()], "f").unwrap();
            let BakerPixley::Term { term, interpolated } = baker_pixley_term(&p).unwrap() else { panic!() };
            assert!(interpolated.is_some());
            for v in tuples(2, 2) {
                assert_eq!(evaluate_term(&b, &term, &v).unwrap(), (code >> (2 * v[0] + v[1])) & 1);
            }
        }
        let b = bool2();
        let lat = b.signature().restrict(&["meet", "join", "zero", "one"]).unwrap();
        let p = InterpolationProblem::new(vec![b], lat, "neg");
        let BakerPixley::NotClosed { certificate } = baker_pixley_term(&p).unwrap() else { panic!() };
        assert_eq!(certificate.subuniverse, vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
    }
}
