//! First-order formulas, the s-expression DSL, model checking and
//! syntactic classification.
//!
//! The grammar is given in `docs/grammar.md` at the repository root.

mod classify;
mod eval;
mod parse;

pub use classify::{classify, contains, is_member, SyntacticClass, ALL_CLASSES};
pub use eval::{defines, evaluate, find_disagreement, CompiledFormula, Disagreement};
pub use parse::{parse_formula, parse_term};

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::Signature;
use crate::error::{Error, Result};
use crate::term::Term;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Formula {
    Eq(Term, Term),
    Rel(String, Vec<Term>),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(Vec<String>, Box<Formula>),
    Forall(Vec<String>, Box<Formula>),
}

impl Formula {
    pub fn eq(l: Term, r: Term) -> Formula {
        Formula::Eq(l, r)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(vars: Vec<String>, body: Formula) -> Formula {
        if vars.is_empty() {
            body
        } else {
            Formula::Exists(vars, Box::new(body))
        }
    }

    /// Conjunction; a single conjunct is returned as is.
    pub fn and(mut fs: Vec<Formula>) -> Formula {
        if fs.len() == 1 {
            fs.pop().unwrap()
        } else {
            Formula::And(fs)
        }
    }

    /// Disjunction; a single disjunct is returned as is.
    pub fn or(mut fs: Vec<Formula>) -> Formula {
        if fs.len() == 1 {
            fs.pop().unwrap()
        } else {
            Formula::Or(fs)
        }
    }

    /// `(= v v)` for the given variable.
    pub fn verum(v: &str) -> Formula {
        Formula::Eq(Term::var(v), Term::var(v))
    }

    /// `(not (= v v))` for the given variable.
    pub fn falsum(v: &str) -> Formula {
        Formula::not(Formula::verum(v))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Eq(..) | Formula::Rel(..))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut add = |t: &Term, bound: &Vec<String>| {
            for v in t.vars() {
                if !bound.contains(&v) {
                    out.insert(v);
                }
            }
        };
        match self {
            Formula::Eq(l, r) => {
                add(l, bound);
                add(r, bound);
            }
            Formula::Rel(_, ts) => ts.iter().for_each(|t| add(t, bound)),
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
                let n = bound.len();
                bound.extend(vs.iter().cloned());
                body.collect_free(bound, out);
                bound.truncate(n);
            }
        }
    }

    /// All variable names occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Eq(l, r) => {
                l.collect_vars(&mut out);
                r.collect_vars(&mut out);
            }
            Formula::Rel(_, ts) => ts.iter().for_each(|t| t.collect_vars(&mut out)),
            Formula::Exists(vs, _) | Formula::Forall(vs, _) => out.extend(vs.iter().cloned()),
            _ => {}
        });
        out
    }

    pub fn symbols(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let mut ops = BTreeSet::new();
        let mut rels = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Eq(l, r) => {
                l.collect_ops(&mut ops);
                r.collect_ops(&mut ops);
            }
            Formula::Rel(name, ts) => {
                rels.insert(name.clone());
                ts.iter().for_each(|t| t.collect_ops(&mut ops));
            }
            _ => {}
        });
        (ops, rels)
    }

    fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Not(g) => g.visit(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit(f)),
            Formula::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Formula::Exists(_, g) | Formula::Forall(_, g) => g.visit(f),
            _ => {}
        }
    }

    /// Checks every symbol against `sig` with the right arity.
    pub fn check(&self, sig: &Signature) -> Result<()> {
        let mut err = None;
        self.visit(&mut |f| {
            if err.is_some() {
                return;
            }
            let r = match f {
                Formula::Eq(l, r) => l.check(sig).and_then(|_| r.check(sig)),
                Formula::Rel(name, ts) => match sig.rel_index(name) {
                    None => Err(Error::UnknownSymbol(name.clone())),
                    Some(i) if sig.rels()[i].arity != ts.len() => Err(Error::Arity {
                        name: name.clone(),
                        expected: sig.rels()[i].arity,
                        found: ts.len(),
                    }),
                    Some(_) => ts.iter().try_for_each(|t| t.check(sig)),
                },
                _ => Ok(()),
            };
            if let Err(e) = r {
                err = Some(e);
            }
        });
        err.map_or(Ok(()), Err)
    }

    /// Substitutes free occurrences of variables by terms. Bound variables
    /// must not clash with variables of the substituted terms.
    pub fn substitute(&self, map: &HashMap<String, Term>) -> Formula {
        match self {
            Formula::Eq(l, r) => Formula::Eq(l.substitute(map), r.substitute(map)),
            Formula::Rel(n, ts) => Formula::Rel(n.clone(), ts.iter().map(|t| t.substitute(map)).collect()),
            Formula::Not(f) => Formula::not(f.substitute(map)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.substitute(map)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.substitute(map)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.substitute(map), b.substitute(map)),
            Formula::Exists(vs, body) | Formula::Forall(vs, body) => {
                let inner: HashMap<String, Term> = map
                    .iter()
                    .filter(|(k, _)| !vs.contains(k))
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect();
                let b = Box::new(body.substitute(&inner));
                match self {
                    Formula::Exists(..) => Formula::Exists(vs.clone(), b),
                    _ => Formula::Forall(vs.clone(), b),
                }
            }
        }
    }

    /// Number of atomic subformulas.
    pub fn atom_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |f| {
            if f.is_atomic() {
                n += 1
            }
        });
        n
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, head: &str, items: &[Formula]) -> fmt::Result {
            write!(f, "({head}")?;
            for i in items {
                write!(f, " {i}")?;
            }
            f.write_str(")")
        }
        fn binder(f: &mut fmt::Formatter<'_>, head: &str, vs: &[String], body: &Formula) -> fmt::Result {
            write!(f, "({head} ({}) {body})", vs.join(" "))
        }
        match self {
            Formula::Eq(l, r) => write!(f, "(= {l} {r})"),
            Formula::Rel(n, ts) => {
                write!(f, "(rel {n}")?;
                for t in ts {
                    write!(f, " {t}")?;
                }
                f.write_str(")")
            }
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(gs) => list(f, "and", gs),
            Formula::Or(gs) => list(f, "or", gs),
            Formula::Implies(a, b) => write!(f, "(implies {a} {b})"),
            Formula::Exists(vs, b) => binder(f, "exists", vs, b),
            Formula::Forall(vs, b) => binder(f, "forall", vs, b),
        }
    }
}
