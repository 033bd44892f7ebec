use fixedbitset::FixedBitSet;

use super::{Bounds, Counterexample};
use crate::algebra::{tuples, FiniteStructure, Signature};
use crate::closure::{Closure, Deriv, Event};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::subpowers::{generated_subuniverse, MapKind};
use crate::term::{CompiledTerm, Term};

/// Carried columns per subpower closure.
const CHUNK: usize = 1024;

/// A target relation laid out over columns `(member, tuple)`.
pub(crate) struct Problem<'a> {
    /// Members, reduced to the language.
    pub k: &'a [FiniteStructure],
    pub lang: &'a Signature,
    pub vars: Vec<String>,
    pub cols: Vec<(usize, Vec<usize>)>,
    pub in_r: FixedBitSet,
    pub bounds: Bounds,
}

/// An equation with its truth set over the columns in scope.
#[derive(Clone, Debug)]
pub(crate) struct Eqn {
    pub lhs: Term,
    pub rhs: Term,
    pub truth: FixedBitSet,
}

impl Eqn {
    pub fn atom(&self) -> Formula {
        Formula::eq(self.lhs.clone(), self.rhs.clone())
    }

    pub fn size(&self) -> usize {
        self.lhs.size() + self.rhs.size()
    }
}

/// The pointed substructure generated by one column, read on other columns.
pub(crate) struct View {
    pub col: usize,
    pub scope: Vec<usize>,
    /// Per element of `Sg(col)`: its value on `col`, then on each scope column.
    pub rows: Vec<Vec<u32>>,
    /// Equations true on `col` and false somewhere in scope, smallest first.
    pub eqns: Vec<Eqn>,
    /// Scope columns receiving a homomorphism from `col`.
    pub hom: FixedBitSet,
    /// `t_u = t_v` for distinct elements `u < v`, false on `col`.
    pub distinct: Vec<Eqn>,
    /// Scope columns receiving an isomorphism from `col`.
    pub iso: FixedBitSet,
}

/// A subpower closure over key columns that records, per carried column,
/// the first equation true on the key and false on that column.
pub(crate) struct Separation<'a> {
    pub closure: Closure<'a>,
    pub carry: Vec<usize>,
    pub found: Vec<Option<(Deriv, usize)>>,
}

impl<'a> Problem<'a> {
    pub fn new(k: &'a [FiniteStructure], lang: &'a Signature, vars: Vec<String>, ext: &[Vec<bool>], bounds: Bounds) -> Self {
        let r = vars.len();
        let mut cols = Vec::new();
        let mut bits = Vec::new();
        for (m, a) in k.iter().enumerate() {
            for (t, &b) in tuples(a.size(), r).zip(&ext[m]) {
                cols.push((m, t));
                bits.push(b);
            }
        }
        let mut in_r = FixedBitSet::with_capacity(cols.len());
        for (i, b) in bits.into_iter().enumerate() {
            in_r.set(i, b);
        }
        Problem {
            k,
            lang,
            vars,
            cols,
            in_r,
            bounds,
        }
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn width(&self) -> usize {
        self.cols.len()
    }

    pub fn var_terms(&self) -> Vec<Term> {
        self.vars.iter().map(Term::var).collect()
    }

    pub fn r_cols(&self) -> Vec<usize> {
        self.in_r.ones().collect()
    }

    pub fn bad(&self) -> FixedBitSet {
        let mut b = self.all();
        b.difference_with(&self.in_r);
        b
    }

    pub fn all(&self) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(self.width());
        b.insert_range(..);
        b
    }

    pub fn set_of(&self, cols: &[usize]) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(self.width());
        for &c in cols {
            b.insert(c);
        }
        b
    }

    fn offset(&self, m: usize) -> usize {
        self.k[..m].iter().map(|a| a.size().pow(self.arity() as u32)).sum()
    }

    /// Tuples of member `m` in the relation, lexicographically.
    pub fn member_tuples(&self, m: usize) -> Vec<Vec<usize>> {
        let off = self.offset(m);
        let len = self.k[m].size().pow(self.arity() as u32);
        self.in_r
            .ones()
            .filter(|&c| c >= off && c < off + len)
            .map(|c| self.cols[c].1.clone())
            .collect()
    }

    pub fn in_rel(&self, m: usize, t: &[usize]) -> bool {
        let n = self.k[m].size();
        let idx = t.iter().fold(0, |acc, &x| acc * n + x);
        self.in_r.contains(self.offset(m) + idx)
    }

    fn member(&self, c: usize) -> &'a FiniteStructure {
        &self.k[self.cols[c].0]
    }

    fn gens(&self, cols: &[usize]) -> Vec<Vec<u32>> {
        (0..self.arity())
            .map(|i| cols.iter().map(|&c| self.cols[c].1[i] as u32).collect())
            .collect()
    }

    /// Truth set of `lhs = rhs` over all columns.
    pub fn truth(&self, lhs: &Term, rhs: &Term) -> Result<FixedBitSet> {
        let compiled: Vec<(CompiledTerm, CompiledTerm)> = self
            .k
            .iter()
            .map(|a| Ok((lhs.compile(a.signature(), &self.vars)?, rhs.compile(a.signature(), &self.vars)?)))
            .collect::<Result<_>>()?;
        let mut b = FixedBitSet::with_capacity(self.width());
        for (i, (m, t)) in self.cols.iter().enumerate() {
            let (l, r) = &compiled[*m];
            b.set(i, l.eval(&self.k[*m], t) == r.eval(&self.k[*m], t));
        }
        Ok(b)
    }

    pub fn eqn(&self, lhs: Term, rhs: Term) -> Result<Eqn> {
        let truth = self.truth(&lhs, &rhs)?;
        Ok(Eqn { lhs, rhs, truth })
    }

    /// Whether `Sg(c)` is a one-element subuniverse.
    pub fn trivial(&self, c: usize) -> bool {
        let a = self.member(c);
        let t = &self.cols[c].1;
        let e = t[0];
        if t.iter().any(|&x| x != e) {
            return false;
        }
        let mut set = vec![false; a.size()];
        set[e] = true;
        a.is_closed(&set)
    }

    pub fn view(&self, col: usize, scope: &[usize]) -> Result<View> {
        let a = self.member(col);
        let mut factors = vec![a];
        factors.extend(scope.iter().map(|&d| self.member(d)));
        let mut cl = Closure::new(self.lang, &factors, 1, a.size() + 1)?;
        let mut all = vec![col];
        all.extend_from_slice(scope);
        let gens = self.gens(&all);
        let width = self.width();
        let mut hits: Vec<(Deriv, usize, FixedBitSet)> = Vec::new();
        let mut cb = |e: Event| {
            if let Event::Coincidence {
                row,
                deriv,
                values,
                stored,
            } = e
            {
                let mut truth = FixedBitSet::with_capacity(width);
                for (j, &d) in scope.iter().enumerate() {
                    truth.set(d, values[1 + j] == stored[1 + j]);
                }
                hits.push((deriv.to_owned(), row, truth));
            }
            false
        };
        cl.seed(&gens, &mut cb)?;
        cl.run(None, &mut cb)?;
        let vars = self.var_terms();
        let mut hom = self.set_of(scope);
        let mut eqns: Vec<Eqn> = hits
            .into_iter()
            .map(|(d, row, truth)| {
                hom.intersect_with(&truth);
                Eqn {
                    lhs: cl.deriv_to_term(&d, &vars),
                    rhs: cl.term(row, &vars),
                    truth,
                }
            })
            .collect();
        eqns.sort_by_key(Eqn::size);
        let rows: Vec<Vec<u32>> = (0..cl.len()).map(|i| cl.row(i).to_vec()).collect();
        let mut iso = hom.clone();
        let mut distinct = Vec::new();
        for u in 0..rows.len() {
            for v in u + 1..rows.len() {
                let mut truth = FixedBitSet::with_capacity(width);
                for (j, &d) in scope.iter().enumerate() {
                    truth.set(d, rows[u][1 + j] == rows[v][1 + j]);
                }
                iso.difference_with(&truth);
                distinct.push(Eqn {
                    lhs: cl.term(u, &vars),
                    rhs: cl.term(v, &vars),
                    truth,
                });
            }
        }
        distinct.sort_by_key(Eqn::size);
        Ok(View {
            col,
            scope: scope.to_vec(),
            rows,
            eqns,
            hom,
            distinct,
            iso,
        })
    }

    /// Counterexample given by the map `Sg(view.col) → Sg(d)`.
    pub fn view_counterexample(&self, v: &View, d: usize, kind: MapKind) -> Result<Counterexample> {
        let j = v.scope.iter().position(|&s| s == d).expect("column in scope");
        let mut pairs: Vec<(Vec<usize>, usize)> = v
            .rows
            .iter()
            .map(|r| (vec![r[0] as usize], r[1 + j] as usize))
            .collect();
        pairs.sort();
        let (m, t) = &self.cols[v.col];
        Ok(Counterexample {
            kind,
            source_factors: vec![*m],
            source: pairs.iter().map(|(s, _)| s.clone()).collect(),
            target_member: self.cols[d].0,
            target: generated_subuniverse(self.member(d), &self.cols[d].1)?.elements,
            map: pairs.iter().map(|(_, t)| *t).collect(),
            tuple: t.iter().map(|&x| vec![x]).collect(),
            image: self.cols[d].1.clone(),
        })
    }

    /// The one-element product maps onto the trivial column `d`.
    pub fn trivial_counterexample(&self, d: usize, kind: MapKind) -> Counterexample {
        let (m, t) = &self.cols[d];
        Counterexample {
            kind,
            source_factors: Vec::new(),
            source: vec![Vec::new()],
            target_member: *m,
            target: vec![t[0]],
            map: vec![t[0]],
            tuple: vec![Vec::new(); t.len()],
            image: t.clone(),
        }
    }

    /// Closure of `Sg(p̄)` in the product over `key`, carrying `carry`;
    /// stops once every carried column is separated from the key.
    pub fn separate(&self, key: &[usize], carry: &[usize]) -> Result<Separation<'a>> {
        if key.len() > self.bounds.max_product_coords {
            return Err(Error::Resource(format!(
                "subpower over {} coordinates exceeds the bound {}",
                key.len(),
                self.bounds.max_product_coords
            )));
        }
        let mut all = key.to_vec();
        all.extend_from_slice(carry);
        let factors: Vec<&FiniteStructure> = all.iter().map(|&c| self.member(c)).collect();
        let mut cl = Closure::new(self.lang, &factors, key.len(), self.bounds.max_rows)?;
        cl.set_max_work(self.bounds.max_work);
        let kw = key.len();
        let mut found: Vec<Option<(Deriv, usize)>> = vec![None; carry.len()];
        let mut left = carry.len();
        let mut cb = |e: Event| {
            if let Event::Coincidence {
                row,
                deriv,
                values,
                stored,
            } = e
            {
                for j in 0..found.len() {
                    if found[j].is_none() && values[kw + j] != stored[kw + j] {
                        found[j] = Some((deriv.to_owned(), row));
                        left -= 1;
                    }
                }
            }
            left == 0
        };
        if !carry.is_empty() && !cl.seed(&self.gens(&all), &mut cb)? {
            cl.run(None, &mut cb)?;
        }
        Ok(Separation {
            closure: cl,
            carry: carry.to_vec(),
            found,
        })
    }

    /// Separating equations for every column of `targets`, from closures
    /// keyed on `key` and carrying `targets` in chunks. `Err` holds the
    /// first column no equation separates, with the closure that shows it.
    pub fn separate_all(&self, key: &[usize], targets: &[usize]) -> Result<std::result::Result<Vec<Eqn>, (usize, Separation<'a>)>> {
        let vars = self.var_terms();
        let mut out = Vec::new();
        for chunk in targets.chunks(CHUNK) {
            let s = self.separate(key, chunk)?;
            if let Some(j) = s.found.iter().position(Option::is_none) {
                return Ok(Err((chunk[j], s)));
            }
            for (d, row) in s.found.iter().flatten() {
                out.push(self.eqn(s.closure.deriv_to_term(d, &vars), s.closure.term(*row, &vars))?);
            }
        }
        Ok(Ok(out))
    }

    /// Counterexample from a separation closure at fixpoint: the map from
    /// the subpower over the key to `Sg(d)` reading off the carried column.
    pub fn separation_counterexample(&self, key: &[usize], s: &Separation, d: usize, kind: MapKind) -> Result<Counterexample> {
        let j = s.carry.iter().position(|&c| c == d).expect("carried column");
        let kw = key.len();
        let cl = &s.closure;
        let mut pairs: Vec<(Vec<usize>, usize)> = (0..cl.len())
            .map(|i| {
                let r = cl.row(i);
                (r[..kw].iter().map(|&v| v as usize).collect(), r[kw + j] as usize)
            })
            .collect();
        pairs.sort();
        Ok(Counterexample {
            kind,
            source_factors: key.iter().map(|&c| self.cols[c].0).collect(),
            source: pairs.iter().map(|(s, _)| s.clone()).collect(),
            target_member: self.cols[d].0,
            target: generated_subuniverse(self.member(d), &self.cols[d].1)?.elements,
            map: pairs.iter().map(|(_, t)| *t).collect(),
            tuple: (0..self.arity())
                .map(|i| key.iter().map(|&c| self.cols[c].1[i]).collect())
                .collect(),
            image: self.cols[d].1.clone(),
        })
    }

    /// Members of `cols` not strictly above another under the homomorphism
    /// preorder, one per equivalence class (the lowest index).
    pub fn minimal(&self, cols: &[usize], hom: impl Fn(usize, usize) -> bool) -> Vec<usize> {
        cols.iter()
            .copied()
            .filter(|&c| {
                !cols
                    .iter()
                    .any(|&e| e != c && hom(e, c) && (!hom(c, e) || e < c))
            })
            .collect()
    }

    /// A conjunction of equations false on every column, or the trivial
    /// column no positive formula can exclude.
    pub fn refute_all(&self) -> Result<std::result::Result<Vec<Eqn>, usize>> {
        if let Some(d) = (0..self.width()).find(|&d| self.trivial(d)) {
            return Ok(Err(d));
        }
        let vars = self.var_terms();
        let mut killed = FixedBitSet::with_capacity(self.width());
        let mut pool = Vec::new();
        for d in 0..self.width() {
            if killed.contains(d) {
                continue;
            }
            let a = self.member(d);
            let mut cl = Closure::new(self.lang, &[a], 1, a.size() + 1)?;
            let mut none = |_: Event| false;
            cl.seed(&self.gens(&[d]), &mut none)?;
            cl.run(None, &mut none)?;
            let e = self.eqn(cl.term(0, &vars), cl.term(1, &vars))?;
            let mut k = self.all();
            k.difference_with(&e.truth);
            killed.union_with(&k);
            pool.push(e);
        }
        let kills: Vec<FixedBitSet> = pool
            .iter()
            .map(|e| {
                let mut k = self.all();
                k.difference_with(&e.truth);
                k
            })
            .collect();
        let pick = greedy_cover(&self.all(), &kills).expect("every column refuted");
        Ok(Ok(pick.into_iter().map(|i| pool[i].clone()).collect()))
    }
}

/// Greedy set cover of `need`; ties go to the lower index. Returns the
/// chosen indices in increasing order, or `None` if `need` is not covered.
pub(crate) fn greedy_cover(need: &FixedBitSet, sets: &[FixedBitSet]) -> Option<Vec<usize>> {
    let mut left = need.clone();
    let mut out = Vec::new();
    while !left.is_clear() {
        let mut best = None;
        let mut gain = 0;
        for (i, s) in sets.iter().enumerate() {
            let g = s.intersection_count(&left);
            if g > gain {
                gain = g;
                best = Some(i);
            }
        }
        let i = best?;
        left.difference_with(&sets[i]);
        out.push(i);
    }
    out.sort_unstable();
    Some(out)
}

/// Complement of `truth` within `within`.
pub(crate) fn falsity(truth: &FixedBitSet, within: &FixedBitSet) -> FixedBitSet {
    let mut k = within.clone();
    k.difference_with(truth);
    k
}
