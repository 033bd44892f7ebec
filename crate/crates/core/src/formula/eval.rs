use serde::{Deserialize, Serialize};

use super::Formula;
use crate::algebra::{tuples, FiniteStructure, Signature};
use crate::error::{Error, Result};
use crate::target::Target;
use crate::term::CompiledTerm;

#[derive(Debug, Clone)]
enum Node {
    Eq(CompiledTerm, CompiledTerm),
    Rel(usize, Vec<CompiledTerm>),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    Implies(Box<Node>, Box<Node>),
    /// `stages[0]` is tested before any bound slot is set, `stages[i + 1]`
    /// right after `slots[i]` is assigned. Conjunctive bodies are split so
    /// that each conjunct is tested as soon as its variables are fixed.
    Exists {
        slots: Vec<usize>,
        stages: Vec<Vec<Node>>,
    },
    Forall {
        slots: Vec<usize>,
        body: Box<Node>,
    },
}

/// A formula resolved against a signature, evaluated over slot vectors.
#[derive(Debug, Clone)]
pub struct CompiledFormula {
    root: Node,
    slots: usize,
    free: usize,
}

fn flatten_and(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(gs) => gs.iter().for_each(|g| flatten_and(g, out)),
        g => out.push(g.clone()),
    }
}

struct Compiler<'a> {
    sig: &'a Signature,
    names: Vec<String>,
}

impl Compiler<'_> {
    fn node(&mut self, f: &Formula) -> Result<Node> {
        Ok(match f {
            Formula::Eq(l, r) => Node::Eq(l.compile(self.sig, &self.names)?, r.compile(self.sig, &self.names)?),
            Formula::Rel(name, ts) => {
                let idx = self
                    .sig
                    .rel_index(name)
                    .ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
                if self.sig.rels()[idx].arity != ts.len() {
                    return Err(Error::Arity {
                        name: name.clone(),
                        expected: self.sig.rels()[idx].arity,
                        found: ts.len(),
                    });
                }
                Node::Rel(
                    idx,
                    ts.iter()
                        .map(|t| t.compile(self.sig, &self.names))
                        .collect::<Result<_>>()?,
                )
            }
            Formula::Not(g) => Node::Not(Box::new(self.node(g)?)),
            Formula::And(gs) => Node::And(gs.iter().map(|g| self.node(g)).collect::<Result<_>>()?),
            Formula::Or(gs) => Node::Or(gs.iter().map(|g| self.node(g)).collect::<Result<_>>()?),
            Formula::Implies(a, b) => Node::Implies(Box::new(self.node(a)?), Box::new(self.node(b)?)),
            Formula::Exists(..) => {
                let mut vars = Vec::new();
                let mut body = f;
                while let Formula::Exists(vs, b) = body {
                    vars.extend(vs.iter().cloned());
                    body = b;
                }
                let base = self.names.len();
                self.names.extend(vars.iter().cloned());
                let mut conjuncts = Vec::new();
                flatten_and(body, &mut conjuncts);
                let mut stages: Vec<Vec<Node>> = vec![Vec::new(); vars.len() + 1];
                for c in &conjuncts {
                    let fv = c.free_vars();
                    // Later binders shadow earlier ones with the same name.
                    let level = vars
                        .iter()
                        .enumerate()
                        .rev()
                        .filter(|(_, v)| fv.contains(*v))
                        .map(|(i, _)| i + 1)
                        .max()
                        .unwrap_or(0);
                    stages[level].push(self.node(c)?);
                }
                self.names.truncate(base);
                Node::Exists {
                    slots: (base..base + vars.len()).collect(),
                    stages,
                }
            }
            Formula::Forall(vs, body) => {
                let base = self.names.len();
                self.names.extend(vs.iter().cloned());
                let b = self.node(body)?;
                self.names.truncate(base);
                Node::Forall {
                    slots: (base..base + vs.len()).collect(),
                    body: Box::new(b),
                }
            }
        })
    }
}

fn max_slot(f: &Formula, depth: usize) -> usize {
    match f {
        Formula::Not(g) => max_slot(g, depth),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().map(|g| max_slot(g, depth)).max().unwrap_or(depth),
        Formula::Implies(a, b) => max_slot(a, depth).max(max_slot(b, depth)),
        Formula::Exists(vs, b) | Formula::Forall(vs, b) => max_slot(b, depth + vs.len()),
        _ => depth,
    }
}

impl CompiledFormula {
    /// `free` lists the names bound to the first slots, in order.
    pub fn new(f: &Formula, sig: &Signature, free: &[String]) -> Result<Self> {
        if let Some(v) = f.free_vars().into_iter().find(|v| !free.contains(v)) {
            return Err(Error::UnboundVariable(v));
        }
        let mut c = Compiler {
            sig,
            names: free.to_vec(),
        };
        let root = c.node(f)?;
        Ok(CompiledFormula {
            root,
            slots: max_slot(f, free.len()),
            free: free.len(),
        })
    }

    pub fn eval(&self, a: &FiniteStructure, free_vals: &[usize]) -> bool {
        let mut env = vec![0usize; self.slots.max(self.free)];
        env[..self.free].copy_from_slice(&free_vals[..self.free]);
        eval_node(&self.root, a, &mut env)
    }
}

fn eval_node(n: &Node, a: &FiniteStructure, env: &mut Vec<usize>) -> bool {
    match n {
        Node::Eq(l, r) => l.eval(a, env) == r.eval(a, env),
        Node::Rel(idx, ts) => {
            let vals: Vec<usize> = ts.iter().map(|t| t.eval(a, env)).collect();
            a.holds(*idx, &vals)
        }
        Node::Not(g) => !eval_node(g, a, env),
        Node::And(gs) => gs.iter().all(|g| eval_node(g, a, env)),
        Node::Or(gs) => gs.iter().any(|g| eval_node(g, a, env)),
        Node::Implies(p, q) => !eval_node(p, a, env) || eval_node(q, a, env),
        Node::Exists { slots, stages } => {
            if !stages[0].iter().all(|g| eval_node(g, a, env)) {
                return false;
            }
            search(slots, stages, 0, a, env)
        }
        Node::Forall { slots, body } => {
            for t in tuples(a.size(), slots.len()) {
                for (&s, v) in slots.iter().zip(t) {
                    env[s] = v;
                }
                if !eval_node(body, a, env) {
                    return false;
                }
            }
            true
        }
    }
}

fn search(slots: &[usize], stages: &[Vec<Node>], i: usize, a: &FiniteStructure, env: &mut Vec<usize>) -> bool {
    if i == slots.len() {
        return true;
    }
    for v in 0..a.size() {
        env[slots[i]] = v;
        if stages[i + 1].iter().all(|g| eval_node(g, a, env)) && search(slots, stages, i + 1, a, env) {
            return true;
        }
    }
    false
}

/// Tarskian satisfaction under a name-based assignment.
pub fn evaluate(a: &FiniteStructure, f: &Formula, assignment: &[(&str, usize)]) -> Result<bool> {
    let names: Vec<String> = assignment.iter().map(|(n, _)| n.to_string()).collect();
    let vals: Vec<usize> = assignment.iter().map(|&(_, v)| v).collect();
    if let Some(&v) = vals.iter().find(|&&v| v >= a.size()) {
        return Err(Error::Query(format!("element {v} out of range")));
    }
    Ok(CompiledFormula::new(f, a.signature(), &names)?.eval(a, &vals))
}

/// A tuple on which formula and target disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    pub member: usize,
    pub tuple: Vec<usize>,
    pub formula_holds: bool,
}

/// The first tuple (member-major, then lexicographic) where `f` and the
/// target disagree.
pub fn find_disagreement(k: &[FiniteStructure], f: &Formula, target: &Target) -> Result<Option<Disagreement>> {
    for (i, a) in k.iter().enumerate() {
        let vars = target.var_names(a.signature())?;
        if let Some(v) = f.free_vars().into_iter().find(|v| !vars.contains(v)) {
            return Err(Error::Query(format!(
                "free variable `{v}` is not among the target's variables {vars:?}"
            )));
        }
        let cf = CompiledFormula::new(f, a.signature(), &vars)?;
        let ext = target.extension(a)?;
        for (t, want) in tuples(a.size(), vars.len()).zip(ext) {
            let got = cf.eval(a, &t);
            if got != want {
                return Ok(Some(Disagreement {
                    member: i,
                    tuple: t,
                    formula_holds: got,
                }));
            }
        }
    }
    Ok(None)
}

/// Whether `f` defines the target in every member of `k`.
pub fn defines(k: &[FiniteStructure], f: &Formula, target: &Target) -> Result<bool> {
    Ok(find_disagreement(k, f, target)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{bool2, stone3};
    use crate::formula::parse_formula;

    #[test]
    fn half_double_star() {
        let s = stone3();
        let f = parse_formula("(= (star (star x1)) one)", s.signature()).unwrap();
        assert!(evaluate(&s, &f, &[("x1", 1)]).unwrap());
        assert!(!evaluate(&s, &f, &[("x1", 0)]).unwrap());
    }

    #[test]
    fn reflexive_equality() {
        let s = stone3();
        let f = parse_formula("(= x x)", s.signature()).unwrap();
        for a in 0..3 {
            assert!(evaluate(&s, &f, &[("x", a)]).unwrap());
        }
    }

    #[test]
    fn complement_exists() {
        let b = bool2();
        let f = parse_formula("(exists (z) (and (= (meet x z) zero) (= (join x z) one)))", b.signature()).unwrap();
        assert!(evaluate(&b, &f, &[("x", 0)]).unwrap());
        let s = stone3();
        let g = parse_formula("(exists (z) (and (= (meet x z) zero) (= (join x z) one)))", s.signature()).unwrap();
        assert!(!evaluate(&s, &g, &[("x", 1)]).unwrap());
    }

    #[test]
    fn uncovered_variable() {
        let s = stone3();
        let f = parse_formula("(= x y)", s.signature()).unwrap();
        assert!(matches!(evaluate(&s, &f, &[("x", 0)]), Err(Error::UnboundVariable(_))));
    }

    #[test]
    fn forall_and_nested() {
        let s = stone3();
        let f = parse_formula("(forall (y) (= (meet x y) y))", s.signature()).unwrap();
        assert!(evaluate(&s, &f, &[("x", 2)]).unwrap());
        assert!(!evaluate(&s, &f, &[("x", 1)]).unwrap());
        let g = parse_formula("(exists (u) (exists (v) (and (= (join u v) x) (not (= u v)))))", s.signature()).unwrap();
        assert!(evaluate(&s, &g, &[("x", 2)]).unwrap());
        assert!(!evaluate(&s, &g, &[("x", 0)]).unwrap());
    }

    #[test]
    fn defines_join_and_rejects_identity_for_star() {
        let b = bool2();
        let f = parse_formula("(= z1 (join x1 x2))", b.signature()).unwrap();
        assert!(defines(&[b], &f, &Target::function("join")).unwrap());
        let s = stone3();
        let g = parse_formula("(= z1 x1)", s.signature()).unwrap();
        let d = find_disagreement(&[s], &g, &Target::function("star")).unwrap().unwrap();
        assert_eq!(d.tuple, vec![0, 0]);
        assert!(d.formula_holds);
    }

    #[test]
    fn foreign_variable_is_arity_error() {
        let s = stone3();
        let g = parse_formula("(= z2 x1)", s.signature()).unwrap();
        assert!(defines(&[s], &g, &Target::function("star")).is_err());
    }
}
