//! Term operations of a finite class, representing terms, and majority and
//! discriminator detection.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{tuples, FiniteStructure, Signature};
use crate::closure::{Closure, Deriv, Event, Status};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::term::{var_name, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloneBounds {
    pub depth: u32,
    pub max_rows: usize,
    /// Operation applications per closure.
    pub max_work: u64,
}

impl Default for CloneBounds {
    fn default() -> Self {
        CloneBounds {
            depth: 12,
            max_rows: 2_000_000,
            max_work: 400_000_000,
        }
    }
}

/// An `n`-ary function interpreted on every member of a class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionTable {
    pub arity: usize,
    /// Row-major table per member.
    pub tables: Vec<Vec<usize>>,
}

impl FunctionTable {
    pub fn from_symbol(k: &[FiniteStructure], name: &str) -> Result<Self> {
        let mut arity = None;
        let mut tables = Vec::new();
        for a in k {
            let i = a
                .signature()
                .op_index(name)
                .ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
            arity = Some(a.signature().ops()[i].arity);
            tables.push(a.op_table(i).to_vec());
        }
        Ok(FunctionTable {
            arity: arity.ok_or_else(|| Error::Query("empty class".into()))?,
            tables,
        })
    }

    pub fn from_fn(k: &[FiniteStructure], arity: usize, f: impl Fn(usize, &[usize]) -> usize) -> Self {
        FunctionTable {
            arity,
            tables: k
                .iter()
                .enumerate()
                .map(|(m, a)| tuples(a.size(), arity).map(|t| f(m, &t)).collect())
                .collect(),
        }
    }

    pub fn eval(&self, member: usize, n: usize, args: &[usize]) -> usize {
        self.tables[member][crate::algebra::table_index(n, args)]
    }
}

/// `(member, tuple)` pairs of `A^n` for every member, member-major.
pub fn columns(k: &[FiniteStructure], n: usize) -> Vec<(usize, Vec<usize>)> {
    k.iter()
        .enumerate()
        .flat_map(|(m, a)| tuples(a.size(), n).map(move |t| (m, t)))
        .collect()
}

pub(crate) fn check_class(k: &[FiniteStructure], lang: &Signature) -> Result<()> {
    if k.is_empty() {
        return Err(Error::Query("empty class".into()));
    }
    for a in k {
        for s in lang.ops().iter().chain(lang.rels()) {
            if !a.signature().ops().contains(s) && !a.signature().rels().contains(s) {
                return Err(Error::SignatureMismatch(s.name.clone()));
            }
        }
    }
    Ok(())
}

fn projections(cols: &[(usize, Vec<usize>)], n: usize) -> Vec<Vec<u32>> {
    (0..n)
        .map(|j| cols.iter().map(|(_, t)| t[j] as u32).collect())
        .collect()
}

fn var_terms(n: usize) -> Vec<Term> {
    (0..n).map(|j| Term::var(var_name("x", j))).collect()
}

/// The `n`-ary term operations of `lang` on `K`, as rows over all columns.
#[derive(Clone, Debug)]
pub struct TermOpTable {
    pub arity: usize,
    pub columns: Vec<(usize, Vec<usize>)>,
    pub fixpoint: bool,
    lang: Signature,
    rows: Vec<u32>,
    derivs: Vec<Deriv>,
    depths: Vec<u32>,
    index: HashMap<Vec<u32>, usize>,
}

impl TermOpTable {
    pub fn len(&self) -> usize {
        self.derivs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.derivs.is_empty()
    }

    pub fn row(&self, i: usize) -> &[u32] {
        let w = self.columns.len();
        &self.rows[i * w..(i + 1) * w]
    }

    pub fn depth(&self, i: usize) -> u32 {
        self.depths[i]
    }

    pub fn find(&self, row: &[u32]) -> Option<usize> {
        self.index.get(row).copied()
    }

    pub fn witness(&self, i: usize) -> Term {
        let gens = var_terms(self.arity);
        let mut memo = HashMap::new();
        self.build(i, &gens, &mut memo)
    }

    fn build(&self, i: usize, gens: &[Term], memo: &mut HashMap<usize, Term>) -> Term {
        if let Some(t) = memo.get(&i) {
            return t.clone();
        }
        let t = match &self.derivs[i] {
            Deriv::Gen(g) => gens[*g].clone(),
            Deriv::Op(op, args) => Term::app(
                self.lang.ops()[*op].name.clone(),
                args.iter().map(|&a| self.build(a as usize, gens, memo)).collect(),
            ),
        };
        memo.insert(i, t.clone());
        t
    }
}

pub fn term_operations(k: &[FiniteStructure], lang: &Signature, n: usize, bounds: CloneBounds) -> Result<TermOpTable> {
    check_class(k, lang)?;
    let cols = columns(k, n);
    let factors: Vec<&FiniteStructure> = cols.iter().map(|(m, _)| &k[*m]).collect();
    let mut c = Closure::new(lang, &factors, cols.len(), bounds.max_rows)?;
    c.set_max_work(bounds.max_work);
    let mut none = |_: Event| false;
    c.seed(&projections(&cols, n), &mut none)?;
    let status = c.run(Some(bounds.depth), &mut none)?;
    let w = cols.len();
    let mut rows = Vec::with_capacity(c.len() * w);
    let mut index = HashMap::new();
    for i in 0..c.len() {
        rows.extend_from_slice(c.row(i));
        index.insert(c.row(i).to_vec(), i);
    }
    Ok(TermOpTable {
        arity: n,
        fixpoint: status == Status::Fixpoint,
        lang: lang.clone(),
        derivs: (0..c.len()).map(|i| c.deriv(i).clone()).collect(),
        depths: (0..c.len()).map(|i| c.depth(i)).collect(),
        rows,
        index,
        columns: cols,
    })
}

pub(crate) enum RowSearch {
    Found(Term),
    Absent,
}

/// Looks for a term whose values on `cols` equal `target`.
pub(crate) fn search_row(
    k: &[FiniteStructure],
    lang: &Signature,
    n: usize,
    cols: &[(usize, Vec<usize>)],
    target: &[u32],
    bounds: CloneBounds,
) -> Result<RowSearch> {
    // Projections onto few columns are cheap and often already miss the target.
    for size in 1..=cols.len().min(2) {
        for pick in combinations(cols.len(), size) {
            let sub: Vec<(usize, Vec<usize>)> = pick.iter().map(|&i| cols[i].clone()).collect();
            let t: Vec<u32> = pick.iter().map(|&i| target[i]).collect();
            if subpower(k, lang, n, &sub, &t, bounds.max_rows)?.is_some() {
                return Ok(RowSearch::Absent);
            }
        }
    }
    let factors: Vec<&FiniteStructure> = cols.iter().map(|(m, _)| &k[*m]).collect();
    let mut c = Closure::new(lang, &factors, cols.len(), bounds.max_rows)?;
    c.set_max_work(bounds.max_work);
    let mut found = None;
    let mut cb = |e: Event| match e {
        Event::New { row, values } if values == target => {
            found = Some(row);
            true
        }
        _ => false,
    };
    let status = if c.seed(&projections(cols, n), &mut cb)? {
        Status::Stopped
    } else {
        c.run(Some(bounds.depth), &mut cb)?
    };
    match (found, status) {
        (Some(i), _) => Ok(RowSearch::Found(c.term(i, &var_terms(n)))),
        (None, Status::Fixpoint) => Ok(RowSearch::Absent),
        _ => Err(Error::Resource(format!("no fixpoint within term depth {}", bounds.depth))),
    }
}

/// Failure certificate: `Sg(p̄)` in the product over `columns` does not
/// contain `f(p̄)`, so it is not closed under `f × … × f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotClosed {
    /// `(member, tuple)` per product coordinate.
    pub columns: Vec<(usize, Vec<usize>)>,
    /// Generators `p_j`, one coordinate per column.
    pub generators: Vec<Vec<usize>>,
    /// Elements of the generated subuniverse, sorted.
    pub subuniverse: Vec<Vec<usize>>,
    /// `f` applied to the generators, not in the subuniverse.
    pub image: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Term(Term),
    NotRepresentable(NotClosed),
}

fn target_row(f: &FunctionTable, k: &[FiniteStructure], cols: &[(usize, Vec<usize>)]) -> Vec<u32> {
    cols.iter()
        .map(|(m, t)| f.eval(*m, k[*m].size(), t) as u32)
        .collect()
}

/// Elements of `Sg(p̄)` over `cols`, or `None` if the closure found `target`.
fn subpower(
    k: &[FiniteStructure],
    lang: &Signature,
    n: usize,
    cols: &[(usize, Vec<usize>)],
    target: &[u32],
    max_rows: usize,
) -> Result<Option<Vec<Vec<usize>>>> {
    let factors: Vec<&FiniteStructure> = cols.iter().map(|(m, _)| &k[*m]).collect();
    let mut c = Closure::new(lang, &factors, cols.len(), max_rows)?;
    let mut cb = |e: Event| matches!(e, Event::New { values, .. } if values == target);
    if c.seed(&projections(cols, n), &mut cb)? || c.run(None, &mut cb)? == Status::Stopped {
        return Ok(None);
    }
    let mut elems: Vec<Vec<usize>> = (0..c.len())
        .map(|i| c.row(i).iter().map(|&v| v as usize).collect())
        .collect();
    elems.sort();
    Ok(Some(elems))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Smallest set of columns (by size, then lexicographically, up to three
/// columns; otherwise all) whose generated subpower misses `f(p̄)`.
fn certificate(
    k: &[FiniteStructure],
    lang: &Signature,
    f: &FunctionTable,
    cols: &[(usize, Vec<usize>)],
    bounds: CloneBounds,
) -> Result<NotClosed> {
    let n = f.arity;
    let mut tries: Vec<Vec<usize>> = Vec::new();
    for size in 1..=cols.len().min(3) {
        tries.extend(combinations(cols.len(), size));
    }
    tries.push((0..cols.len()).collect());
    for pick in tries {
        let sub: Vec<(usize, Vec<usize>)> = pick.iter().map(|&i| cols[i].clone()).collect();
        let target = target_row(f, k, &sub);
        if let Some(elems) = subpower(k, lang, n, &sub, &target, bounds.max_rows)? {
            return Ok(NotClosed {
                generators: projections(&sub, n)
                    .into_iter()
                    .map(|r| r.into_iter().map(|v| v as usize).collect())
                    .collect(),
                image: target.iter().map(|&v| v as usize).collect(),
                subuniverse: elems,
                columns: sub,
            });
        }
    }
    Err(Error::Internal("no certificate although no term was found".into()))
}

/// A term of `lang` equal to `f` on every member, or the subpower
/// certificate showing there is none.
pub fn find_representing_term(
    k: &[FiniteStructure],
    lang: &Signature,
    f: &FunctionTable,
    bounds: CloneBounds,
) -> Result<Representation> {
    check_class(k, lang)?;
    let mut cols = columns(k, f.arity);
    // Duplicate coordinates generate isomorphic subpowers.
    let first: Vec<usize> = (0..k.len()).map(|m| (0..=m).find(|&i| k[i] == k[m]).unwrap()).collect();
    let mut seen = std::collections::HashSet::new();
    cols.retain(|(m, t)| seen.insert((first[*m], t.clone(), f.eval(*m, k[*m].size(), t))));
    let target = target_row(f, k, &cols);
    match search_row(k, lang, f.arity, &cols, &target, bounds)? {
        RowSearch::Found(t) => Ok(Representation::Term(t)),
        RowSearch::Absent => Ok(Representation::NotRepresentable(certificate(k, lang, f, &cols, bounds)?)),
    }
}

/// A majority term, searched on the columns where the identities bite.
pub fn find_majority_term(k: &[FiniteStructure], lang: &Signature, bounds: CloneBounds) -> Result<Option<Term>> {
    check_class(k, lang)?;
    let mut cols = Vec::new();
    let mut target = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (m, a) in k.iter().enumerate() {
        for x in 0..a.size() {
            for y in 0..a.size() {
                for t in [vec![x, x, y], vec![x, y, x], vec![y, x, x]] {
                    if seen.insert((m, t.clone())) {
                        cols.push((m, t));
                        target.push(x as u32);
                    }
                }
            }
        }
    }
    Ok(match search_row(k, lang, 3, &cols, &target, bounds)? {
        RowSearch::Found(t) => Some(t),
        RowSearch::Absent => None,
    })
}

/// `d(x, y, z) = z` if `x = y`, else `x`.
pub fn discriminator(x: usize, y: usize, z: usize) -> usize {
    if x == y {
        z
    } else {
        x
    }
}

pub fn find_discriminator_term(k: &[FiniteStructure], lang: &Signature, bounds: CloneBounds) -> Result<Option<Term>> {
    check_class(k, lang)?;
    let cols = columns(k, 3);
    let target: Vec<u32> = cols.iter().map(|(_, t)| discriminator(t[0], t[1], t[2]) as u32).collect();
    Ok(match search_row(k, lang, 3, &cols, &target, bounds)? {
        RowSearch::Found(t) => Some(t),
        RowSearch::Absent => None,
    })
}

/// `D(x1, x2, x3, x4) = t(t(x1, x2, x3), t(x1, x2, x4), x4)`.
pub fn quaternary_discriminator(t: &Term) -> Result<Term> {
    let allowed = ["x1", "x2", "x3"];
    if let Some(v) = t.vars().into_iter().find(|v| !allowed.contains(&v.as_str())) {
        return Err(Error::Query(format!("expected a ternary term in x1, x2, x3; found `{v}`")));
    }
    let x = |i: usize| Term::var(var_name("x", i));
    let at = |a: Term, b: Term, c: Term| {
        let map: HashMap<String, Term> = [("x1".to_string(), a), ("x2".to_string(), b), ("x3".to_string(), c)]
            .into_iter()
            .collect();
        t.substitute(&map)
    };
    Ok(at(at(x(0), x(1), x(2)), at(x(0), x(1), x(3)), x(3)))
}

/// `f = t_1|φ_1 ∪ … ∪ t_k|φ_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseDefinition {
    pub target: String,
    pub cases: Vec<(Term, Formula)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{bool2, stone3};
    use crate::term::evaluate_term;

    #[test]
    fn boolean_binary_clone() {
        let b = bool2();
        let t = term_operations(std::slice::from_ref(&b), b.signature(), 2, CloneBounds::default()).unwrap();
        assert!(t.fixpoint);
        assert_eq!(t.len(), 16);
        for i in 0..t.len() {
            let w = t.witness(i);
            for (c, (_, tup)) in t.columns.iter().enumerate() {
                assert_eq!(evaluate_term(&b, &w, tup).unwrap() as u32, t.row(i)[c]);
            }
        }
        assert_eq!(t.witness(0), Term::var("x1"));
    }

    #[test]
    fn stone_unary_clone() {
        let s = stone3();
        let t = term_operations(std::slice::from_ref(&s), s.signature(), 1, CloneBounds::default()).unwrap();
        assert!(t.fixpoint);
        let mut rows: Vec<Vec<u32>> = (0..t.len()).map(|i| t.row(i).to_vec()).collect();
        rows.sort();
        // 0, 1, x, x*, x**, x ∨ x*
        assert_eq!(rows, vec![vec![0, 0, 0], vec![0, 1, 2], vec![0, 2, 2], vec![2, 0, 0], vec![2, 1, 2], vec![2, 2, 2]]);
    }

    #[test]
    fn xor_and_negation_certificate() {
        let b = bool2();
        let xor = FunctionTable::from_fn(std::slice::from_ref(&b), 2, |_, v| v[0] ^ v[1]);
        let Representation::Term(t) = find_representing_term(std::slice::from_ref(&b), b.signature(), &xor, CloneBounds::default()).unwrap() else {
            panic!()
        };
        for v in tuples(2, 2) {
            assert_eq!(evaluate_term(&b, &t, &v).unwrap(), v[0] ^ v[1]);
        }
        let lat = b.signature().restrict(&["join", "meet", "zero", "one"]).unwrap();
        let neg = FunctionTable::from_symbol(std::slice::from_ref(&b), "neg").unwrap();
        let Representation::NotRepresentable(c) = find_representing_term(std::slice::from_ref(&b), &lat, &neg, CloneBounds::default()).unwrap() else {
            panic!()
        };
        assert_eq!(c.generators, vec![vec![0, 1]]);
        assert_eq!(c.subuniverse, vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(c.image, vec![1, 0]);
    }

    #[test]
    fn majority_and_discriminator() {
        let b = bool2();
        let m = find_majority_term(std::slice::from_ref(&b), b.signature(), CloneBounds::default()).unwrap().unwrap();
        for v in tuples(2, 3) {
            let r = evaluate_term(&b, &m, &v).unwrap();
            if v[0] == v[1] || v[0] == v[2] {
                assert_eq!(r, v[0]);
            } else {
                assert_eq!(r, v[1]);
            }
        }
        let d = find_discriminator_term(std::slice::from_ref(&b), b.signature(), CloneBounds::default()).unwrap().unwrap();
        for v in tuples(2, 3) {
            assert_eq!(evaluate_term(&b, &d, &v).unwrap(), discriminator(v[0], v[1], v[2]));
        }
        let dd = quaternary_discriminator(&d).unwrap();
        assert_eq!(evaluate_term(&b, &dd, &[0, 0, 1, 0]).unwrap(), 1);
        assert_eq!(evaluate_term(&b, &dd, &[0, 1, 1, 0]).unwrap(), 0);
        assert!(quaternary_discriminator(&Term::var("x4")).is_err());
    }

    #[test]
    fn semilattice_has_no_majority_and_stone_no_discriminator() {
        let b = bool2().reduct_to(&["meet"]).unwrap();
        assert!(find_majority_term(std::slice::from_ref(&b), b.signature(), CloneBounds::default()).unwrap().is_none());
        let s = stone3();
        assert!(find_discriminator_term(std::slice::from_ref(&s), s.signature(), CloneBounds::default()).unwrap().is_none());
    }
}
