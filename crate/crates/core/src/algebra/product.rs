use super::{checked_pow, tuples, FiniteStructure, Relation, Signature, Symbol};
use crate::error::{Error, Result};

/// Largest operation table a materialized product may carry.
const MAX_TABLE: usize = 1 << 26;

/// Mixed-radix encoding of tuples, leftmost coordinate most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedRadix {
    radices: Vec<usize>,
}

impl MixedRadix {
    pub fn new(radices: Vec<usize>) -> Self {
        MixedRadix { radices }
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn size(&self) -> usize {
        self.radices.iter().product()
    }

    pub fn encode(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.radices.len());
        coords
            .iter()
            .zip(&self.radices)
            .fold(0, |acc, (&c, &r)| acc * r + c)
    }

    pub fn decode(&self, mut code: usize) -> Vec<usize> {
        let mut out = vec![0; self.radices.len()];
        for (slot, &r) in out.iter_mut().zip(&self.radices).rev() {
            *slot = code % r;
            code /= r;
        }
        out
    }
}

/// Direct product with componentwise operations and relations.
pub fn product(factors: &[&FiniteStructure]) -> Result<FiniteStructure> {
    let first = factors
        .first()
        .ok_or_else(|| Error::InvalidStructure("product of no factors".into()))?;
    let sig = first.signature();
    for f in &factors[1..] {
        if f.signature() != sig {
            return Err(Error::SignatureMismatch(first_mismatch(sig, f.signature())));
        }
    }
    let radix = MixedRadix::new(factors.iter().map(|f| f.size()).collect());
    let size = factors
        .iter()
        .try_fold(1usize, |acc, f| acc.checked_mul(f.size()))
        .filter(|&s| s <= MAX_TABLE)
        .ok_or_else(|| Error::Resource("product universe too large".into()))?;
    let coords: Vec<Vec<usize>> = (0..size).map(|c| radix.decode(c)).collect();

    let mut ops = Vec::with_capacity(sig.ops().len());
    for (op, sym) in sig.ops().iter().enumerate() {
        let entries = checked_pow(size, sym.arity)
            .filter(|&e| e <= MAX_TABLE)
            .ok_or_else(|| Error::Resource(format!("product table for `{}` too large", sym.name)))?;
        let mut table = Vec::with_capacity(entries);
        let mut args = vec![0usize; sym.arity];
        for t in tuples(size, sym.arity) {
            let mut out = 0;
            for (i, f) in factors.iter().enumerate() {
                for (slot, &e) in args.iter_mut().zip(&t) {
                    *slot = coords[e][i];
                }
                out = out * f.size() + f.apply(op, &args);
            }
            table.push(out);
        }
        ops.push(table);
    }

    let mut rels = Vec::with_capacity(sig.rels().len());
    for rel in 0..sig.rels().len() {
        let per_factor: Vec<&Relation> = factors.iter().map(|f| f.relation(rel)).collect();
        let arity = per_factor[0].arity();
        let mut out = Vec::new();
        let counts: Vec<usize> = per_factor.iter().map(|r| r.len()).collect();
        let choice = MixedRadix::new(counts.clone());
        if counts.iter().all(|&c| c > 0) {
            for pick in 0..choice.size() {
                let which = choice.decode(pick);
                let tuple: Vec<usize> = (0..arity)
                    .map(|j| {
                        let cs: Vec<usize> = which
                            .iter()
                            .enumerate()
                            .map(|(i, &w)| per_factor[i].tuples()[w][j])
                            .collect();
                        radix.encode(&cs)
                    })
                    .collect();
                out.push(tuple);
            }
        }
        rels.push(out);
    }

    let name = factors.iter().map(|f| f.name()).collect::<Vec<_>>().join(" x ");
    let s = FiniteStructure::new(name, sig.clone(), size, ops, rels)?;
    let names = coords
        .iter()
        .map(|c| {
            let parts: Vec<String> = c
                .iter()
                .zip(factors)
                .map(|(&e, f)| f.element_name(e))
                .collect();
            format!("({})", parts.join(","))
        })
        .collect();
    s.with_names(names)
}

fn first_mismatch(a: &Signature, b: &Signature) -> String {
    let pick = |xs: &[Symbol], ys: &[Symbol]| {
        (0..xs.len().max(ys.len())).find_map(|i| match (xs.get(i), ys.get(i)) {
            (Some(x), Some(y)) if x == y => None,
            (Some(x), _) => Some(x.name.clone()),
            (None, Some(y)) => Some(y.name.clone()),
            (None, None) => None,
        })
    };
    pick(a.ops(), b.ops())
        .or_else(|| pick(a.rels(), b.rels()))
        .unwrap_or_default()
}

/// `a^k` as a product of `k` copies.
pub fn power(a: &FiniteStructure, k: usize) -> Result<FiniteStructure> {
    let factors: Vec<&FiniteStructure> = std::iter::repeat_n(a, k).collect();
    product(&factors)
}
