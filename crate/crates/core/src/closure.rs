//! Subalgebra generation inside a product, one coordinate per factor.
//!
//! Rows are elements of the product. The first `key_width` coordinates
//! identify a row; the remaining coordinates are carried along. Two
//! derivations reaching the same key with different carried values form a
//! coincidence: an equation between terms that holds on the key coordinates
//! and fails on some carried coordinate.

use std::collections::HashMap;

use crate::algebra::{FiniteStructure, Signature};
use crate::error::{Error, Result};
use crate::term::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Deriv {
    Gen(usize),
    Op(usize, Vec<u32>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivRef<'a> {
    Gen(usize),
    Op(usize, &'a [u32]),
}

impl DerivRef<'_> {
    pub fn to_owned(self) -> Deriv {
        match self {
            DerivRef::Gen(g) => Deriv::Gen(g),
            DerivRef::Op(op, args) => Deriv::Op(op, args.to_vec()),
        }
    }
}

/// What a callback sees while the closure grows.
pub enum Event<'a> {
    New {
        row: usize,
        values: &'a [u32],
    },
    /// `values` is the full candidate row; it agrees with the stored row
    /// `stored` on the key.
    Coincidence {
        row: usize,
        deriv: DerivRef<'a>,
        values: &'a [u32],
        stored: &'a [u32],
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Fixpoint,
    Stopped,
    DepthLimit,
}

struct Coord<'a> {
    n: usize,
    tables: Vec<&'a [usize]>,
}

pub struct Closure<'a> {
    sig: &'a Signature,
    coords: Vec<Coord<'a>>,
    key_width: usize,
    rows: Vec<u32>,
    derivs: Vec<Deriv>,
    depths: Vec<u32>,
    index: HashMap<Box<[u32]>, u32>,
    old: usize,
    max_rows: usize,
    round: u32,
    scratch: Vec<u32>,
    work: u64,
    max_work: u64,
}

impl<'a> Closure<'a> {
    /// `factors[j]` interprets coordinate `j`; all factors share `sig`'s
    /// operation symbols (extra symbols in a factor are ignored).
    pub fn new(sig: &'a Signature, factors: &[&'a FiniteStructure], key_width: usize, max_rows: usize) -> Result<Self> {
        let mut coords = Vec::with_capacity(factors.len());
        for f in factors {
            let mut tables = Vec::with_capacity(sig.ops().len());
            for sym in sig.ops() {
                let idx = f
                    .signature()
                    .op_index(&sym.name)
                    .ok_or_else(|| Error::UnknownSymbol(sym.name.clone()))?;
                tables.push(f.op_table(idx));
            }
            coords.push(Coord { n: f.size(), tables });
        }
        Ok(Closure {
            sig,
            coords,
            key_width,
            rows: Vec::new(),
            derivs: Vec::new(),
            depths: Vec::new(),
            index: HashMap::new(),
            old: 0,
            max_rows,
            round: 0,
            scratch: Vec::new(),
            work: 0,
            max_work: u64::MAX,
        })
    }

    /// Caps the number of operation applications; exceeding it is a
    /// resource error.
    pub fn set_max_work(&mut self, max_work: u64) {
        self.max_work = max_work;
    }

    pub fn width(&self) -> usize {
        self.coords.len()
    }

    pub fn len(&self) -> usize {
        self.derivs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.derivs.is_empty()
    }

    pub fn row(&self, i: usize) -> &[u32] {
        let w = self.width();
        &self.rows[i * w..(i + 1) * w]
    }

    pub fn deriv(&self, i: usize) -> &Deriv {
        &self.derivs[i]
    }

    pub fn depth(&self, i: usize) -> u32 {
        self.depths[i]
    }

    pub fn find(&self, key: &[u32]) -> Option<usize> {
        self.index.get(key).map(|&i| i as usize)
    }

    /// Adds generator `g` with the given row, then the constants once every
    /// generator is in. Returns true if a callback asked to stop.
    pub fn seed(&mut self, gens: &[Vec<u32>], cb: &mut impl FnMut(Event) -> bool) -> Result<bool> {
        for (g, row) in gens.iter().enumerate() {
            self.scratch = row.clone();
            if self.offer(DerivRef::Gen(g), cb)? {
                return Ok(true);
            }
        }
        for (op, sym) in self.sig.ops().iter().enumerate() {
            if sym.arity == 0 {
                self.apply(op, &[]);
                if self.offer(DerivRef::Op(op, &[]), cb)? {
                    return Ok(true);
                }
            }
        }
        self.old = 0;
        Ok(false)
    }

    /// Writes `op(args)` into the scratch row.
    fn apply(&mut self, op: usize, args: &[u32]) {
        let w = self.width();
        self.scratch.clear();
        for (j, c) in self.coords.iter().enumerate() {
            let mut idx = 0usize;
            for &a in args {
                idx = idx * c.n + self.rows[a as usize * w + j] as usize;
            }
            self.scratch.push(c.tables[op][idx] as u32);
        }
    }

    /// Inserts the scratch row.
    fn offer(&mut self, deriv: DerivRef, cb: &mut impl FnMut(Event) -> bool) -> Result<bool> {
        let kw = self.key_width;
        let w = self.width();
        if let Some(&i) = self.index.get(&self.scratch[..kw]) {
            let i = i as usize;
            if self.scratch[kw..] != self.rows[i * w + kw..(i + 1) * w] {
                return Ok(cb(Event::Coincidence {
                    row: i,
                    deriv,
                    values: &self.scratch,
                    stored: &self.rows[i * w..(i + 1) * w],
                }));
            }
            return Ok(false);
        }
        if self.derivs.len() >= self.max_rows {
            return Err(Error::Resource(format!("closure exceeded {} elements", self.max_rows)));
        }
        let id = self.derivs.len();
        self.index.insert(self.scratch[..kw].into(), id as u32);
        self.rows.extend_from_slice(&self.scratch);
        self.derivs.push(deriv.to_owned());
        self.depths.push(self.round);
        Ok(cb(Event::New {
            row: id,
            values: &self.scratch,
        }))
    }

    /// One semi-naive round: every operation applied to argument tuples that
    /// use at least one row from the previous round, in lexicographic order
    /// of (operation, argument ids).
    pub fn step(&mut self, cb: &mut impl FnMut(Event) -> bool) -> Result<Option<Status>> {
        let old = self.old;
        let end = self.len();
        if old == end {
            return Ok(Some(Status::Fixpoint));
        }
        self.round += 1;
        for op in 0..self.sig.ops().len() {
            let k = self.sig.ops()[op].arity;
            if k == 0 {
                continue;
            }
            let mut args = vec![0u32; k];
            if self.walk(op, &mut args, 0, true, old, end, cb)? {
                return Ok(Some(Status::Stopped));
            }
        }
        self.old = end;
        Ok(None)
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        &mut self,
        op: usize,
        args: &mut Vec<u32>,
        pos: usize,
        all_old: bool,
        old: usize,
        end: usize,
        cb: &mut impl FnMut(Event) -> bool,
    ) -> Result<bool> {
        let last = pos + 1 == args.len();
        let start = if last && all_old { old } else { 0 };
        for a in start..end {
            args[pos] = a as u32;
            if last {
                self.work += 1;
                if self.work > self.max_work {
                    return Err(Error::Resource(format!("closure exceeded {} operation applications", self.max_work)));
                }
                self.apply(op, args);
                if self.offer(DerivRef::Op(op, args), cb)? {
                    return Ok(true);
                }
            } else if self.walk(op, args, pos + 1, all_old && a < old, old, end, cb)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Runs rounds until fixpoint, a stop request, or `max_depth` rounds.
    pub fn run(&mut self, max_depth: Option<u32>, cb: &mut impl FnMut(Event) -> bool) -> Result<Status> {
        loop {
            if max_depth.is_some_and(|d| self.round >= d) && self.old < self.len() {
                return Ok(Status::DepthLimit);
            }
            if let Some(s) = self.step(cb)? {
                return Ok(s);
            }
        }
    }

    /// Term witnessing a row; `gens[g]` names generator `g`.
    pub fn term(&self, row: usize, gens: &[Term]) -> Term {
        let mut memo: HashMap<usize, Term> = HashMap::new();
        self.term_memo(row, gens, &mut memo)
    }

    fn term_memo(&self, row: usize, gens: &[Term], memo: &mut HashMap<usize, Term>) -> Term {
        if let Some(t) = memo.get(&row) {
            return t.clone();
        }
        let t = self.deriv_term(&self.derivs[row].clone(), gens, memo);
        memo.insert(row, t.clone());
        t
    }

    pub fn deriv_to_term(&self, d: &Deriv, gens: &[Term]) -> Term {
        self.deriv_term(d, gens, &mut HashMap::new())
    }

    fn deriv_term(&self, d: &Deriv, gens: &[Term], memo: &mut HashMap<usize, Term>) -> Term {
        match d {
            Deriv::Gen(g) => gens[*g].clone(),
            Deriv::Op(op, args) => Term::app(
                self.sig.ops()[*op].name.clone(),
                args.iter().map(|&a| self.term_memo(a as usize, gens, memo)).collect(),
            ),
        }
    }
}
