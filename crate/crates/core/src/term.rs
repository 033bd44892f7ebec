//! Terms over operation symbols, referenced by name.
//!
//! Hot loops never walk the tree: [`Term::compile`] resolves symbols against
//! a structure's signature and variables against a slot list, producing a
//! postfix program.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{FiniteStructure, Signature};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

/// `x1`, `x2`, ... for argument positions and `z1`, ... for function values.
pub fn var_name(prefix: &str, index: usize) -> String {
    format!("{prefix}{}", index + 1)
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn app(op: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(op.into(), args)
    }

    pub fn constant(op: impl Into<String>) -> Term {
        Term::App(op.into(), Vec::new())
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_ops(&self, out: &mut BTreeSet<String>) {
        if let Term::App(op, args) = self {
            out.insert(op.clone());
            args.iter().for_each(|a| a.collect_ops(out));
        }
    }

    /// Simultaneous substitution of variables.
    pub fn substitute(&self, map: &HashMap<String, Term>) -> Term {
        match self {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::App(op, args) => Term::App(op.clone(), args.iter().map(|a| a.substitute(map)).collect()),
        }
    }

    pub fn rename_vars(&self, f: &impl Fn(&str) -> String) -> Term {
        match self {
            Term::Var(v) => Term::Var(f(v)),
            Term::App(op, args) => Term::App(op.clone(), args.iter().map(|a| a.rename_vars(f)).collect()),
        }
    }

    /// Checks symbols and arities against a signature.
    pub fn check(&self, sig: &Signature) -> Result<()> {
        if let Term::App(op, args) = self {
            let idx = sig.op_index(op).ok_or_else(|| Error::UnknownSymbol(op.clone()))?;
            let arity = sig.ops()[idx].arity;
            if arity != args.len() {
                return Err(Error::Arity {
                    name: op.clone(),
                    expected: arity,
                    found: args.len(),
                });
            }
            for a in args {
                a.check(sig)?;
            }
        }
        Ok(())
    }

    pub fn compile(&self, sig: &Signature, slots: &[String]) -> Result<CompiledTerm> {
        let mut code = Vec::with_capacity(self.size());
        self.emit(sig, slots, &mut code)?;
        Ok(CompiledTerm { code })
    }

    fn emit(&self, sig: &Signature, slots: &[String], code: &mut Vec<Instr>) -> Result<()> {
        match self {
            Term::Var(v) => {
                let s = slots
                    .iter()
                    .rposition(|x| x == v)
                    .ok_or_else(|| Error::UnboundVariable(v.clone()))?;
                code.push(Instr::Load(s));
            }
            Term::App(op, args) => {
                let idx = sig.op_index(op).ok_or_else(|| Error::UnknownSymbol(op.clone()))?;
                let arity = sig.ops()[idx].arity;
                if arity != args.len() {
                    return Err(Error::Arity {
                        name: op.clone(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                for a in args {
                    a.emit(sig, slots, code)?;
                }
                code.push(Instr::Apply(idx, arity));
            }
        }
        Ok(())
    }

    /// Bottom-up evaluation under a name-based environment.
    pub fn eval(&self, a: &FiniteStructure, env: &impl Fn(&str) -> Option<usize>) -> Result<usize> {
        match self {
            Term::Var(v) => env(v).ok_or_else(|| Error::UnboundVariable(v.clone())),
            Term::App(op, args) => {
                let idx = a
                    .signature()
                    .op_index(op)
                    .ok_or_else(|| Error::UnknownSymbol(op.clone()))?;
                let arity = a.signature().ops()[idx].arity;
                if arity != args.len() {
                    return Err(Error::Arity {
                        name: op.clone(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                let vals = args.iter().map(|t| t.eval(a, env)).collect::<Result<Vec<_>>>()?;
                Ok(a.apply(idx, &vals))
            }
        }
    }
}

/// Evaluates `t` with `x1, x2, ...` bound to the entries of `assignment`.
pub fn evaluate_term(a: &FiniteStructure, t: &Term, assignment: &[usize]) -> Result<usize> {
    for &v in assignment {
        if v >= a.size() {
            return Err(Error::Query(format!("element {v} out of range")));
        }
    }
    t.eval(a, &|name: &str| {
        name.strip_prefix('x')
            .and_then(|i| i.parse::<usize>().ok())
            .filter(|&i| i >= 1)
            .and_then(|i| assignment.get(i - 1).copied())
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Instr {
    Load(usize),
    Apply(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledTerm {
    code: Vec<Instr>,
}

impl CompiledTerm {
    pub fn eval(&self, a: &FiniteStructure, vals: &[usize]) -> usize {
        let mut stack: Vec<usize> = Vec::with_capacity(8);
        for ins in &self.code {
            match *ins {
                Instr::Load(s) => stack.push(vals[s]),
                Instr::Apply(op, arity) => {
                    let base = stack.len() - arity;
                    let v = a.apply(op, &stack[base..]);
                    stack.truncate(base);
                    stack.push(v);
                }
            }
        }
        stack[0]
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::App(op, args) if args.is_empty() => f.write_str(op),
            Term::App(op, args) => {
                write!(f, "({op}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{demorgan_m, power, stone3};

    fn star(t: Term) -> Term {
        Term::app("star", vec![t])
    }

    #[test]
    fn double_star_of_half() {
        let s = stone3();
        let t = star(star(Term::var("x1")));
        assert_eq!(evaluate_term(&s, &t, &[1]).unwrap(), 2);
    }

    #[test]
    fn projection() {
        let s = stone3();
        for a in 0..3 {
            assert_eq!(evaluate_term(&s, &Term::var("x1"), &[a]).unwrap(), a);
        }
    }

    #[test]
    fn demorgan_bar_fixes_a() {
        let m = demorgan_m();
        let t = Term::app("neg", vec![Term::var("x1")]);
        let a = m.parse_element("a").unwrap();
        assert_eq!(evaluate_term(&m, &t, &[a]).unwrap(), a);
    }

    #[test]
    fn errors() {
        let s = stone3();
        assert!(matches!(
            evaluate_term(&s, &Term::app("nope", vec![]), &[]),
            Err(Error::UnknownSymbol(_))
        ));
        assert!(matches!(
            evaluate_term(&s, &Term::var("x3"), &[0]),
            Err(Error::UnboundVariable(_))
        ));
        assert!(matches!(
            evaluate_term(&s, &Term::app("star", vec![]), &[]),
            Err(Error::Arity { .. })
        ));
    }

    #[test]
    fn compiled_matches_tree() {
        let s = stone3();
        let t = Term::app("join", vec![star(Term::var("x2")), Term::app("meet", vec![Term::var("x1"), Term::constant("one")])]);
        let slots = vec!["x1".to_string(), "x2".to_string()];
        let c = t.compile(s.signature(), &slots).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(c.eval(&s, &[a, b]), evaluate_term(&s, &t, &[a, b]).unwrap());
            }
        }
    }

    #[test]
    fn product_evaluation_is_componentwise() {
        let s = stone3();
        let p = power(&s, 2).unwrap();
        let t = Term::app("join", vec![star(Term::var("x1")), Term::app("meet", vec![Term::var("x1"), Term::var("x2")])]);
        for a in 0..9 {
            for b in 0..9 {
                let v = evaluate_term(&p, &t, &[a, b]).unwrap();
                let l = evaluate_term(&s, &t, &[a / 3, b / 3]).unwrap();
                let r = evaluate_term(&s, &t, &[a % 3, b % 3]).unwrap();
                assert_eq!(v, l * 3 + r);
            }
        }
    }

    #[test]
    fn display() {
        let t = Term::app("join", vec![Term::var("x1"), Term::constant("zero")]);
        assert_eq!(t.to_string(), "(join x1 zero)");
    }
}
