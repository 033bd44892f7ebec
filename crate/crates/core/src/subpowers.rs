//! Subuniverses, homomorphism search and pointed substructure types.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::algebra::{table_index, tuples, tuples_from, FiniteStructure, Signature};
use crate::closure::{Closure, Event, Status};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subuniverse {
    pub host_size: usize,
    /// Sorted, without repetitions.
    pub elements: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<usize>>,
}

impl Subuniverse {
    pub fn full(a: &FiniteStructure) -> Subuniverse {
        Subuniverse {
            host_size: a.size(),
            elements: (0..a.size()).collect(),
            generators: None,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn bits(&self) -> Vec<bool> {
        let mut b = vec![false; self.host_size];
        for &x in &self.elements {
            b[x] = true;
        }
        b
    }

    /// Position of `x` in `elements`.
    pub fn position(&self, x: usize) -> Option<usize> {
        self.elements.binary_search(&x).ok()
    }
}

/// Elements of `Sg(gens)` in discovery order: generators first (repeats
/// dropped), then constants, then by rounds of operation applications.
pub fn closure_order(a: &FiniteStructure, gens: &[usize]) -> Vec<usize> {
    let cols = [a];
    let mut c = Closure::new(a.signature(), &cols, 1, a.size() + 1).expect("own signature");
    let rows: Vec<Vec<u32>> = gens.iter().map(|&g| vec![g as u32]).collect();
    let mut none = |_: Event| false;
    c.seed(&rows, &mut none).expect("bounded by universe");
    c.run(None, &mut none).expect("bounded by universe");
    (0..c.len()).map(|i| c.row(i)[0] as usize).collect()
}

pub fn generated_subuniverse(a: &FiniteStructure, gens: &[usize]) -> Result<Subuniverse> {
    if let Some(&g) = gens.iter().find(|&&g| g >= a.size()) {
        return Err(Error::Query(format!("generator {g} out of range")));
    }
    let mut elements = closure_order(a, gens);
    elements.sort_unstable();
    Ok(Subuniverse {
        host_size: a.size(),
        elements,
        generators: Some(gens.to_vec()),
    })
}

/// Every nonempty subuniverse, sorted by size and then lexicographically.
pub fn all_subuniverses(a: &FiniteStructure, budget: usize) -> Result<Vec<Subuniverse>> {
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut queue: Vec<Subuniverse> = Vec::new();
    let base = generated_subuniverse(a, &[])?;
    let push = |s: Subuniverse, seen: &mut HashSet<Vec<usize>>, queue: &mut Vec<Subuniverse>| -> Result<()> {
        if !s.is_empty() && seen.insert(s.elements.clone()) {
            if seen.len() > budget {
                return Err(Error::Resource(format!(
                    "more than {budget} subuniverses (reached {})",
                    seen.len()
                )));
            }
            queue.push(s);
        }
        Ok(())
    };
    push(base.clone(), &mut seen, &mut queue)?;
    for x in 0..a.size() {
        push(generated_subuniverse(a, &[x])?, &mut seen, &mut queue)?;
    }
    let mut i = 0;
    while i < queue.len() {
        let s = queue[i].clone();
        let gens = s.generators.clone().unwrap_or_default();
        for x in 0..a.size() {
            if s.contains(x) {
                continue;
            }
            let mut g = gens.clone();
            g.push(x);
            push(generated_subuniverse(a, &g)?, &mut seen, &mut queue)?;
        }
        i += 1;
    }
    queue.sort_by(|s, t| (s.len(), &s.elements).cmp(&(t.len(), &t.elements)));
    Ok(queue)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Hom,
    Embedding,
    Isomorphism,
}

impl std::str::FromStr for MapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hom" => Ok(MapKind::Hom),
            "emb" => Ok(MapKind::Embedding),
            "iso" => Ok(MapKind::Isomorphism),
            _ => Err(Error::Query(format!("unknown map kind `{s}` (hom, emb, iso)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomMap {
    pub kind: MapKind,
    pub source: Subuniverse,
    pub target: Subuniverse,
    /// `images[i]` is the image of `source.elements[i]`.
    pub images: Vec<usize>,
}

impl HomMap {
    pub fn image(&self, x: usize) -> Option<usize> {
        self.source.position(x).map(|i| self.images[i])
    }

    pub fn inverse(&self) -> Option<HomMap> {
        if self.kind != MapKind::Isomorphism {
            return None;
        }
        let mut pairs: Vec<(usize, usize)> = self
            .source
            .elements
            .iter()
            .zip(&self.images)
            .map(|(&s, &t)| (t, s))
            .collect();
        pairs.sort_unstable();
        Some(HomMap {
            kind: self.kind,
            source: Subuniverse {
                generators: None,
                ..self.target.clone()
            },
            target: Subuniverse {
                generators: None,
                ..self.source.clone()
            },
            images: pairs.into_iter().map(|(_, s)| s).collect(),
        })
    }
}

/// Minimal-by-greedy generating set of `s`: each element not yet generated
/// becomes a generator, in increasing order.
pub fn greedy_generators(a: &FiniteStructure, s: &Subuniverse) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut have = vec![false; a.size()];
    for &x in &closure_order(a, &[]) {
        have[x] = true;
    }
    for &x in &s.elements {
        if !have[x] {
            gens.push(x);
            for y in closure_order(a, &gens) {
                have[y] = true;
            }
        }
    }
    gens
}

fn same_symbols(a: &Signature, b: &Signature) -> Result<()> {
    for s in a.ops() {
        match b.op_index(&s.name) {
            Some(i) if b.ops()[i].arity == s.arity => {}
            _ => return Err(Error::SignatureMismatch(s.name.clone())),
        }
    }
    for s in a.rels() {
        match b.rel_index(&s.name) {
            Some(i) if b.rels()[i].arity == s.arity => {}
            _ => return Err(Error::SignatureMismatch(s.name.clone())),
        }
    }
    Ok(())
}

/// Map determined by generator images, or `None` on a conflict.
/// Returns the pairs `(source, target)` of the generated partial map.
fn extend(a: &FiniteStructure, b: &FiniteStructure, gens: &[usize], images: &[usize], injective: bool) -> Option<Vec<(usize, usize)>> {
    let cols = [a, b];
    let mut c = Closure::new(a.signature(), &cols, 1, a.size() + 1).ok()?;
    let rows: Vec<Vec<u32>> = gens
        .iter()
        .zip(images)
        .map(|(&g, &t)| vec![g as u32, t as u32])
        .collect();
    let mut cb = |e: Event| matches!(e, Event::Coincidence { .. });
    if c.seed(&rows, &mut cb).ok()? || c.run(None, &mut cb).ok()? == Status::Stopped {
        return None;
    }
    let pairs: Vec<(usize, usize)> = (0..c.len()).map(|i| (c.row(i)[0] as usize, c.row(i)[1] as usize)).collect();
    if injective {
        let mut seen = HashSet::new();
        if !pairs.iter().all(|&(_, t)| seen.insert(t)) {
            return None;
        }
    }
    Some(pairs)
}

fn relations_ok(a: &FiniteStructure, b: &FiniteStructure, dom: &[usize], map: &HashMap<usize, usize>, reflect: bool) -> bool {
    for (ri, sym) in a.signature().rels().iter().enumerate() {
        let rb = b.signature().rel_index(&sym.name).expect("checked");
        if reflect {
            for t in tuples_from(dom, sym.arity) {
                let img: Vec<usize> = t.iter().map(|x| map[x]).collect();
                if a.holds(ri, &t) != b.holds(rb, &img) {
                    return false;
                }
            }
        } else {
            for t in a.relation(ri).tuples() {
                if t.iter().all(|x| map.contains_key(x)) {
                    let img: Vec<usize> = t.iter().map(|x| map[x]).collect();
                    if !b.holds(rb, &img) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// All maps of the given kind from `a0 ≤ a` to `b0 ≤ b`, ordered
/// lexicographically by the images of the generators of `a0`.
pub fn find_maps(a: &FiniteStructure, a0: &Subuniverse, b: &FiniteStructure, b0: &Subuniverse, kind: MapKind) -> Result<Vec<HomMap>> {
    same_symbols(a.signature(), b.signature())?;
    let gens = match &a0.generators {
        Some(g) => g.clone(),
        None => greedy_generators(a, a0),
    };
    let injective = kind != MapKind::Hom;
    let mut out = Vec::new();
    let mut images = Vec::with_capacity(gens.len());
    search(a, a0, b, b0, kind, &gens, &mut images, injective, &mut out);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn search(
    a: &FiniteStructure,
    a0: &Subuniverse,
    b: &FiniteStructure,
    b0: &Subuniverse,
    kind: MapKind,
    gens: &[usize],
    images: &mut Vec<usize>,
    injective: bool,
    out: &mut Vec<HomMap>,
) {
    let Some(pairs) = extend(a, b, &gens[..images.len()], images, injective) else {
        return;
    };
    if pairs.iter().any(|&(_, t)| !b0.contains(t)) {
        return;
    }
    if images.len() < gens.len() {
        for &t in &b0.elements {
            images.push(t);
            search(a, a0, b, b0, kind, gens, images, injective, out);
            images.pop();
        }
        return;
    }
    let map: HashMap<usize, usize> = pairs.into_iter().collect();
    if map.len() != a0.len() || !a0.elements.iter().all(|x| map.contains_key(x)) {
        return;
    }
    if !relations_ok(a, b, &a0.elements, &map, injective) {
        return;
    }
    if kind == MapKind::Isomorphism && map.len() != b0.len() {
        return;
    }
    out.push(HomMap {
        kind,
        source: a0.clone(),
        target: b0.clone(),
        images: a0.elements.iter().map(|x| map[x]).collect(),
    });
}

/// Independent check that `m` is a map of its kind.
pub fn verify_map(a: &FiniteStructure, b: &FiniteStructure, m: &HomMap) -> bool {
    if m.images.len() != m.source.len() || !a.is_closed(&m.source.bits()) || !b.is_closed(&m.target.bits()) {
        return false;
    }
    if m.images.iter().any(|&t| !m.target.contains(t)) {
        return false;
    }
    let map: HashMap<usize, usize> = m.source.elements.iter().copied().zip(m.images.iter().copied()).collect();
    for (op, sym) in a.signature().ops().iter().enumerate() {
        let Some(ob) = b.signature().op_index(&sym.name) else {
            return false;
        };
        for t in tuples_from(&m.source.elements, sym.arity) {
            let img: Vec<usize> = t.iter().map(|x| map[x]).collect();
            if map[&a.apply(op, &t)] != b.apply(ob, &img) {
                return false;
            }
        }
    }
    let injective = m.kind != MapKind::Hom;
    if injective && map.values().collect::<HashSet<_>>().len() != map.len() {
        return false;
    }
    if m.kind == MapKind::Isomorphism && map.len() != m.target.len() {
        return false;
    }
    relations_ok(a, b, &m.source.elements, &map, injective)
}

/// `(Sg(ā), ā)` renumbered canonically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointedStructure {
    #[serde(skip)]
    pub structure: Option<FiniteStructure>,
    pub point: Vec<usize>,
    /// Member of K it was first found in, and the host tuple.
    pub member: usize,
    pub host_point: Vec<usize>,
    /// `host_elements[i]` is the host element numbered `i`.
    pub host_elements: Vec<usize>,
    pub size: usize,
}

/// Structure induced on `elements` (in the given order, renumbered `0..`).
pub fn induced(a: &FiniteStructure, elements: &[usize], name: String) -> Result<FiniteStructure> {
    let mut pos = vec![usize::MAX; a.size()];
    for (i, &x) in elements.iter().enumerate() {
        pos[x] = i;
    }
    let m = elements.len();
    let sig = a.signature();
    let mut ops = Vec::new();
    for (op, sym) in sig.ops().iter().enumerate() {
        let mut table = Vec::with_capacity(m.pow(sym.arity as u32));
        for t in tuples(m, sym.arity) {
            let host: Vec<usize> = t.iter().map(|&i| elements[i]).collect();
            let v = pos[a.apply(op, &host)];
            if v == usize::MAX {
                return Err(Error::Query("element set is not closed".into()));
            }
            table.push(v);
        }
        ops.push(table);
    }
    let mut rels = Vec::new();
    for (ri, _) in sig.rels().iter().enumerate() {
        let ts: Vec<Vec<usize>> = a
            .relation(ri)
            .tuples()
            .iter()
            .filter(|t| t.iter().all(|&x| pos[x] != usize::MAX))
            .map(|t| t.iter().map(|&x| pos[x]).collect())
            .collect();
        rels.push(ts);
    }
    let s = FiniteStructure::new(name, sig.clone(), m, ops, rels)?;
    match a.element_names() {
        Some(_) => s.with_names(elements.iter().map(|&x| a.element_name(x)).collect()),
        None => Ok(s),
    }
}

fn table_bytes(s: &FiniteStructure, point: &[usize]) -> Vec<usize> {
    let mut out = vec![s.size()];
    out.extend_from_slice(point);
    for op in 0..s.signature().ops().len() {
        out.extend_from_slice(s.op_table(op));
    }
    for ri in 0..s.signature().rels().len() {
        out.push(s.relation(ri).len());
        for t in s.relation(ri).tuples() {
            out.extend_from_slice(t);
        }
    }
    out
}

/// Representatives of `(Sg(ā), ā)` for `ā ∈ A^n`, `A ∈ K`, up to
/// isomorphism fixing the point; sorted by size, then canonical bytes.
/// Empty substructures (no constants, `n = 0`) are skipped.
pub fn pointed_substructure_types(k: &[FiniteStructure], n: usize) -> Result<Vec<PointedStructure>> {
    let mut found: HashMap<Vec<usize>, PointedStructure> = HashMap::new();
    for (mi, a) in k.iter().enumerate() {
        for t in tuples(a.size(), n) {
            let elements = closure_order(a, &t);
            if elements.is_empty() {
                continue;
            }
            let s = induced(a, &elements, format!("{}[Sg{:?}]", a.name(), t))?;
            let point: Vec<usize> = t.iter().map(|x| elements.iter().position(|y| y == x).unwrap()).collect();
            let key = table_bytes(&s, &point);
            found.entry(key).or_insert(PointedStructure {
                size: s.size(),
                structure: Some(s),
                point,
                member: mi,
                host_point: t,
                host_elements: elements,
            });
        }
    }
    let mut out: Vec<(Vec<usize>, PointedStructure)> = found.into_iter().collect();
    out.sort_by(|x, y| (x.1.size, &x.0).cmp(&(y.1.size, &y.0)));
    Ok(out.into_iter().map(|(_, p)| p).collect())
}

fn element_colors(a: &FiniteStructure) -> Vec<Vec<usize>> {
    let n = a.size();
    let mut colors = vec![Vec::new(); n];
    for (op, sym) in a.signature().ops().iter().enumerate() {
        let mut hits = vec![0usize; n];
        for &v in a.op_table(op) {
            hits[v] += 1;
        }
        for x in 0..n {
            colors[x].push(hits[x]);
            if sym.arity >= 1 {
                let diag = a.op_table(op)[table_index(n, &vec![x; sym.arity])];
                colors[x].push(usize::from(diag == x));
            }
        }
    }
    for ri in 0..a.signature().rels().len() {
        let mut hits = vec![0usize; n];
        for t in a.relation(ri).tuples() {
            for &x in t {
                hits[x] += 1;
            }
        }
        for x in 0..n {
            colors[x].push(hits[x]);
        }
    }
    colors
}

/// Isomorphism-invariant encoding: the least table encoding over all
/// relabellings that list color classes in a fixed order. Exact.
pub fn canonical_form(a: &FiniteStructure) -> Vec<usize> {
    let n = a.size();
    let colors = element_colors(a);
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut keys: Vec<&Vec<usize>> = colors.iter().collect();
    keys.sort();
    keys.dedup();
    for k in keys {
        classes.push((0..n).filter(|&x| &colors[x] == k).collect());
    }
    let mut best: Option<Vec<usize>> = None;
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    relabel(a, &classes, 0, &mut order, &mut used, &mut best);
    let mut out = vec![n];
    out.extend(best.unwrap_or_default());
    out
}

fn relabel(a: &FiniteStructure, classes: &[Vec<usize>], ci: usize, order: &mut Vec<usize>, used: &mut [bool], best: &mut Option<Vec<usize>>) {
    let placed: usize = classes[..ci].iter().map(Vec::len).sum();
    if ci == classes.len() {
        let enc = encode(a, order);
        if best.as_ref().is_none_or(|b| enc < *b) {
            *best = Some(enc);
        }
        return;
    }
    if order.len() == placed + classes[ci].len() {
        relabel(a, classes, ci + 1, order, used, best);
        return;
    }
    for &x in &classes[ci] {
        if !used[x] {
            used[x] = true;
            order.push(x);
            relabel(a, classes, ci, order, used, best);
            order.pop();
            used[x] = false;
        }
    }
}

fn encode(a: &FiniteStructure, order: &[usize]) -> Vec<usize> {
    let n = a.size();
    let mut label = vec![0; n];
    for (i, &x) in order.iter().enumerate() {
        label[x] = i;
    }
    let mut out = Vec::new();
    for (op, sym) in a.signature().ops().iter().enumerate() {
        for t in tuples(n, sym.arity) {
            let host: Vec<usize> = t.iter().map(|&i| order[i]).collect();
            out.push(label[a.apply(op, &host)]);
        }
    }
    for ri in 0..a.signature().rels().len() {
        let mut ts: Vec<Vec<usize>> = a
            .relation(ri)
            .tuples()
            .iter()
            .map(|t| t.iter().map(|&x| label[x]).collect())
            .collect();
        ts.sort();
        out.push(ts.len());
        out.extend(ts.into_iter().flatten());
    }
    out
}

pub fn isomorphic(a: &FiniteStructure, b: &FiniteStructure) -> bool {
    a.signature() == b.signature() && a.size() == b.size() && canonical_form(a) == canonical_form(b)
}
