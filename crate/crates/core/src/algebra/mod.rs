//! Signatures and finite structures.
//!
//! Elements of a structure of size `n` are the integers `0..n`. Operation
//! tables are stored row-major: the entry for `(a_1, ..., a_k)` sits at
//! index `a_1 * n^(k-1) + ... + a_k`. Constants are operations of arity 0.

mod builtins;
mod io;
mod product;

pub use builtins::{bool2, builtin, demorgan_circ, demorgan_m, heyting3, stone3, BUILTIN_NAMES, DEMORGAN_CIRC};
pub use io::{from_json, to_json, AlgebraFile};
pub use product::{power, product, MixedRadix};

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
        }
    }
}

/// Operation and relation symbols. Names are unique across both kinds.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    ops: Vec<Symbol>,
    rels: Vec<Symbol>,
}

impl Signature {
    pub fn new(ops: Vec<Symbol>, rels: Vec<Symbol>) -> Result<Self> {
        let mut seen = HashSet::new();
        for s in ops.iter().chain(rels.iter()) {
            if !seen.insert(s.name.as_str()) {
                return Err(Error::DuplicateSymbol(s.name.clone()));
            }
        }
        Ok(Signature { ops, rels })
    }

    pub fn ops(&self) -> &[Symbol] {
        &self.ops
    }

    pub fn rels(&self) -> &[Symbol] {
        &self.rels
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|s| s.name == name)
    }

    pub fn rel_index(&self, name: &str) -> Option<usize> {
        self.rels.iter().position(|s| s.name == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.op_index(name).is_some() || self.rel_index(name).is_some()
    }

    /// Symbol inclusion with matching arities.
    pub fn is_sublanguage_of(&self, other: &Signature) -> bool {
        self.ops.iter().all(|s| other.ops.contains(s)) && self.rels.iter().all(|s| other.rels.contains(s))
    }

    /// The sublanguage consisting of the named symbols, in this signature's order.
    pub fn restrict<S: AsRef<str>>(&self, names: &[S]) -> Result<Signature> {
        for n in names {
            if !self.contains(n.as_ref()) {
                return Err(Error::NotSublanguage(n.as_ref().to_string()));
            }
        }
        let keep = |s: &&Symbol| names.iter().any(|n| n.as_ref() == s.name);
        Ok(Signature {
            ops: self.ops.iter().filter(keep).cloned().collect(),
            rels: self.rels.iter().filter(keep).cloned().collect(),
        })
    }
}

/// A finitary relation stored as a sorted tuple list plus a lookup set.
#[derive(Clone, Debug)]
pub struct Relation {
    arity: usize,
    tuples: Vec<Vec<usize>>,
    lookup: HashSet<Vec<usize>>,
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.tuples == other.tuples
    }
}

impl Eq for Relation {}

impl Relation {
    pub fn new(arity: usize, mut tuples: Vec<Vec<usize>>) -> Self {
        tuples.sort();
        tuples.dedup();
        let lookup = tuples.iter().cloned().collect();
        Relation {
            arity,
            tuples,
            lookup,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        self.lookup.contains(t)
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteStructure {
    name: String,
    sig: Signature,
    size: usize,
    ops: Vec<Vec<usize>>,
    rels: Vec<Relation>,
    names: Option<Vec<String>>,
}

/// Row-major index of an argument tuple in a table over a universe of size `n`.
#[inline]
pub fn table_index(n: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * n + a)
}

impl FiniteStructure {
    pub fn new(
        name: impl Into<String>,
        sig: Signature,
        size: usize,
        ops: Vec<Vec<usize>>,
        rels: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let name = name.into();
        if size == 0 {
            return Err(Error::InvalidStructure(format!("{name}: empty universe")));
        }
        if ops.len() != sig.ops.len() || rels.len() != sig.rels.len() {
            return Err(Error::InvalidStructure(format!(
                "{name}: table count does not match signature"
            )));
        }
        for (sym, table) in sig.ops.iter().zip(&ops) {
            let want = checked_pow(size, sym.arity).ok_or_else(|| {
                Error::Resource(format!("{name}: table for `{}` too large", sym.name))
            })?;
            if table.len() != want {
                return Err(Error::InvalidStructure(format!(
                    "{name}: table for `{}` has {} entries, expected {want}",
                    sym.name,
                    table.len()
                )));
            }
            if let Some(bad) = table.iter().find(|&&v| v >= size) {
                return Err(Error::InvalidStructure(format!(
                    "{name}: table for `{}` contains out-of-range value {bad}",
                    sym.name
                )));
            }
        }
        let mut relations = Vec::with_capacity(rels.len());
        for (sym, tuples) in sig.rels.iter().zip(rels) {
            for t in &tuples {
                if t.len() != sym.arity || t.iter().any(|&v| v >= size) {
                    return Err(Error::InvalidStructure(format!(
                        "{name}: bad tuple {t:?} in relation `{}`",
                        sym.name
                    )));
                }
            }
            relations.push(Relation::new(sym.arity, tuples));
        }
        Ok(FiniteStructure {
            name,
            sig,
            size,
            ops,
            rels: relations,
            names: None,
        })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.size {
            return Err(Error::InvalidStructure(format!(
                "{}: {} element names for {} elements",
                self.name,
                names.len(),
                self.size
            )));
        }
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::InvalidStructure(format!(
                    "{}: duplicate element name `{n}`",
                    self.name
                )));
            }
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn element_names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn element_name(&self, a: usize) -> String {
        match &self.names {
            Some(n) => n[a].clone(),
            None => a.to_string(),
        }
    }

    /// Resolves a display name or a decimal index.
    pub fn parse_element(&self, s: &str) -> Option<usize> {
        if let Some(names) = &self.names {
            if let Some(i) = names.iter().position(|n| n == s) {
                return Some(i);
            }
        }
        s.parse::<usize>().ok().filter(|&i| i < self.size)
    }

    pub fn op_table(&self, op: usize) -> &[usize] {
        &self.ops[op]
    }

    pub fn relation(&self, rel: usize) -> &Relation {
        &self.rels[rel]
    }

    #[inline]
    pub fn apply(&self, op: usize, args: &[usize]) -> usize {
        self.ops[op][table_index(self.size, args)]
    }

    pub fn holds(&self, rel: usize, args: &[usize]) -> bool {
        self.rels[rel].contains(args)
    }

    /// Restriction of the tables to the symbols of `l`.
    pub fn reduct(&self, l: &Signature) -> Result<FiniteStructure> {
        if !l.is_sublanguage_of(&self.sig) {
            let bad = l
                .ops
                .iter()
                .chain(&l.rels)
                .find(|s| !self.sig.ops.contains(s) && !self.sig.rels.contains(s))
                .map(|s| s.name.clone())
                .unwrap_or_default();
            return Err(Error::NotSublanguage(bad));
        }
        let ops = l
            .ops
            .iter()
            .map(|s| self.ops[self.sig.op_index(&s.name).unwrap()].clone())
            .collect();
        let rels = l
            .rels
            .iter()
            .map(|s| self.rels[self.sig.rel_index(&s.name).unwrap()].clone())
            .collect();
        Ok(FiniteStructure {
            name: self.name.clone(),
            sig: l.clone(),
            size: self.size,
            ops,
            rels,
            names: self.names.clone(),
        })
    }

    /// Reduct to the named symbols.
    pub fn reduct_to<S: AsRef<str>>(&self, names: &[S]) -> Result<FiniteStructure> {
        self.reduct(&self.sig.restrict(names)?)
    }

    /// Expansion by a new operation given as a function of its arguments.
    pub fn with_operation(
        &self,
        name: &str,
        arity: usize,
        f: impl Fn(&[usize]) -> usize,
    ) -> Result<FiniteStructure> {
        let table = tuples(self.size, arity).map(|t| f(&t)).collect();
        self.with_operation_table(name, arity, table)
    }

    pub fn with_operation_table(&self, name: &str, arity: usize, table: Vec<usize>) -> Result<FiniteStructure> {
        let mut ops = self.sig.ops.clone();
        ops.push(Symbol::new(name, arity));
        let sig = Signature::new(ops, self.sig.rels.clone())?;
        let mut tables = self.ops.clone();
        tables.push(table);
        let rels = self.rels.iter().map(|r| r.tuples.clone()).collect();
        let s = FiniteStructure::new(self.name.clone(), sig, self.size, tables, rels)?;
        Ok(FiniteStructure {
            names: self.names.clone(),
            ..s
        })
    }

    pub fn with_relation(&self, name: &str, arity: usize, tuples: Vec<Vec<usize>>) -> Result<FiniteStructure> {
        let mut rels = self.sig.rels.clone();
        rels.push(Symbol::new(name, arity));
        let sig = Signature::new(self.sig.ops.clone(), rels)?;
        let mut rel_tuples: Vec<Vec<Vec<usize>>> = self.rels.iter().map(|r| r.tuples.clone()).collect();
        rel_tuples.push(tuples);
        let s = FiniteStructure::new(self.name.clone(), sig, self.size, self.ops.clone(), rel_tuples)?;
        Ok(FiniteStructure {
            names: self.names.clone(),
            ..s
        })
    }

    /// Whether `set` is closed under every operation (constants included).
    pub fn is_closed(&self, set: &[bool]) -> bool {
        for (op, sym) in self.sig.ops.iter().enumerate() {
            let members: Vec<usize> = (0..self.size).filter(|&a| set[a]).collect();
            if sym.arity == 0 {
                if !set[self.ops[op][0]] {
                    return false;
                }
                continue;
            }
            for args in tuples_from(&members, sym.arity) {
                if !set[self.apply(op, &args)] {
                    return false;
                }
            }
        }
        true
    }
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// All tuples in `{0..n}^k` in lexicographic order.
pub fn tuples(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = checked_pow(n, k).unwrap_or(0);
    (0..total).map(move |mut idx| {
        let mut t = vec![0; k];
        for slot in t.iter_mut().rev() {
            *slot = idx % n;
            idx /= n;
        }
        t
    })
}

/// All `k`-tuples over `items`, lexicographic in item order.
pub fn tuples_from(items: &[usize], k: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    tuples(items.len(), k).map(move |t| t.into_iter().map(|i| items[i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signature_rejects_duplicates() {
        let r = Signature::new(vec![Symbol::new("f", 1)], vec![Symbol::new("f", 2)]);
        assert!(matches!(r, Err(Error::DuplicateSymbol(_))));
    }

    #[test]
    fn sublanguage_requires_matching_arity() {
        let big = Signature::new(vec![Symbol::new("f", 2), Symbol::new("c", 0)], vec![]).unwrap();
        let small = Signature::new(vec![Symbol::new("f", 2)], vec![]).unwrap();
        let wrong = Signature::new(vec![Symbol::new("f", 1)], vec![]).unwrap();
        assert!(small.is_sublanguage_of(&big));
        assert!(!wrong.is_sublanguage_of(&big));
        assert!(big.is_sublanguage_of(&big));
    }

    #[test]
    fn empty_universe_rejected() {
        let sig = Signature::default();
        assert!(FiniteStructure::new("e", sig, 0, vec![], vec![]).is_err());
    }

    #[test]
    fn bad_table_rejected() {
        let sig = Signature::new(vec![Symbol::new("f", 1)], vec![]).unwrap();
        assert!(FiniteStructure::new("a", sig.clone(), 2, vec![vec![0]], vec![]).is_err());
        assert!(FiniteStructure::new("a", sig, 2, vec![vec![0, 2]], vec![]).is_err());
    }

    #[test]
    fn reduct_drops_star() {
        let s = stone3();
        let r = s.reduct_to(&["join", "meet", "zero", "one"]).unwrap();
        assert_eq!(r.size(), 3);
        assert!(r.signature().op_index("star").is_none());
        assert_eq!(s.reduct(s.signature()).unwrap(), s);
    }

    #[test]
    fn heyting_reduct_is_stone() {
        let h = heyting3();
        let r = h.reduct(stone3().signature()).unwrap();
        assert_eq!(r.signature(), stone3().signature());
        for op in 0..r.signature().ops().len() {
            assert_eq!(r.op_table(op), stone3().op_table(op));
        }
    }

    #[test]
    fn closure_sweep() {
        let s = stone3();
        assert!(s.is_closed(&[true, false, true]));
        assert!(!s.is_closed(&[true, true, false]));
    }
}
