use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Formula;
use crate::error::Error;

/// The syntactic formula classes. Existential classes admit zero quantifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SyntacticClass {
    AtomicConj,
    PositiveOpen,
    OpenStrictHorn,
    OpenHorn,
    Open,
    #[serde(rename = "pp")]
    PP,
    ExistPositive,
    ExistHorn,
    Existential,
}

pub const ALL_CLASSES: [SyntacticClass; 9] = [
    SyntacticClass::AtomicConj,
    SyntacticClass::PositiveOpen,
    SyntacticClass::OpenStrictHorn,
    SyntacticClass::OpenHorn,
    SyntacticClass::Open,
    SyntacticClass::PP,
    SyntacticClass::ExistPositive,
    SyntacticClass::ExistHorn,
    SyntacticClass::Existential,
];

impl SyntacticClass {
    pub fn name(self) -> &'static str {
        use SyntacticClass::*;
        match self {
            AtomicConj => "atomic-conj",
            PositiveOpen => "pos-open",
            OpenStrictHorn => "open-strict-horn",
            OpenHorn => "open-horn",
            Open => "open",
            PP => "pp",
            ExistPositive => "exist-pos",
            ExistHorn => "exist-horn",
            Existential => "exist",
        }
    }

    pub fn is_existential(self) -> bool {
        use SyntacticClass::*;
        matches!(self, PP | ExistPositive | ExistHorn | Existential)
    }

    /// Quantifier-free counterpart of an existential class (identity on open ones).
    pub fn open_part(self) -> SyntacticClass {
        use SyntacticClass::*;
        match self {
            PP => AtomicConj,
            ExistPositive => PositiveOpen,
            ExistHorn => OpenHorn,
            Existential => Open,
            c => c,
        }
    }

    /// Classes whose formula sets contain this one's.
    pub fn supersets(self) -> Vec<SyntacticClass> {
        ALL_CLASSES.iter().copied().filter(|&c| contains(c, self)).collect()
    }

    /// Whether only negation-free formulas belong to the class.
    pub fn is_positive(self) -> bool {
        use SyntacticClass::*;
        matches!(self, AtomicConj | PositiveOpen | PP | ExistPositive)
    }
}

/// Inclusion of formula sets: `contains(big, small)`.
pub fn contains(big: SyntacticClass, small: SyntacticClass) -> bool {
    use SyntacticClass::*;
    let open_incl = |b: SyntacticClass, s: SyntacticClass| match (b, s) {
        (b, s) if b == s => true,
        (PositiveOpen | OpenStrictHorn | OpenHorn | Open, AtomicConj) => true,
        (Open, _) => true,
        (OpenHorn, OpenStrictHorn) => true,
        _ => false,
    };
    match (big.is_existential(), small.is_existential()) {
        (false, true) => false,
        _ => open_incl(big.open_part(), small.open_part()),
    }
}

impl fmt::Display for SyntacticClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SyntacticClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        ALL_CLASSES
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Query(format!("unknown class `{s}`")))
    }
}

fn has_quantifier(f: &Formula) -> bool {
    match f {
        Formula::Exists(..) | Formula::Forall(..) => true,
        Formula::Not(g) => has_quantifier(g),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().any(has_quantifier),
        Formula::Implies(a, b) => has_quantifier(a) || has_quantifier(b),
        _ => false,
    }
}

fn flatten_and(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::And(gs) => gs.iter().flat_map(flatten_and).collect(),
        g => vec![g],
    }
}

fn flatten_or(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::Or(gs) => gs.iter().flat_map(flatten_or).collect(),
        g => vec![g],
    }
}

fn is_positive(f: &Formula) -> bool {
    match f {
        Formula::Eq(..) | Formula::Rel(..) => true,
        Formula::And(gs) | Formula::Or(gs) => gs.iter().all(is_positive),
        _ => false,
    }
}

/// Positive-literal count of a clause, or `None` if it is not a clause.
/// `⋀atoms → clause` and `¬⋀atoms` count as the clause with the premises
/// negated.
fn clause_positives(f: &Formula) -> Option<usize> {
    if let Formula::Implies(p, q) = f {
        if !flatten_and(p).iter().all(|a| a.is_atomic()) {
            return None;
        }
        return clause_positives(q);
    }
    let mut pos = 0;
    for lit in flatten_or(f) {
        match lit {
            Formula::Eq(..) | Formula::Rel(..) => pos += 1,
            Formula::Not(a) if flatten_and(a).iter().all(|b| b.is_atomic()) => {}
            _ => return None,
        }
    }
    Some(pos)
}

fn horn(f: &Formula, strict: bool) -> bool {
    flatten_and(f).iter().all(|c| match clause_positives(c) {
        Some(p) => p == 1 || (!strict && p == 0),
        None => false,
    })
}

/// Every class of which `f` is literally a member.
pub fn classify(f: &Formula) -> BTreeSet<SyntacticClass> {
    use SyntacticClass::*;
    let mut body = f;
    let mut quantified = false;
    while let Formula::Exists(_, b) = body {
        body = b;
        quantified = true;
    }
    let mut out = BTreeSet::new();
    if has_quantifier(body) {
        return out;
    }
    let mut open = vec![Open];
    if flatten_and(body).iter().all(|a| a.is_atomic()) {
        open.push(AtomicConj);
    }
    if is_positive(body) {
        open.push(PositiveOpen);
    }
    if horn(body, false) {
        open.push(OpenHorn);
    }
    if horn(body, true) {
        open.push(OpenStrictHorn);
    }
    for c in open {
        if !quantified {
            out.insert(c);
        }
        out.insert(match c {
            AtomicConj => PP,
            PositiveOpen => ExistPositive,
            OpenHorn | OpenStrictHorn => ExistHorn,
            _ => Existential,
        });
    }
    out
}

pub fn is_member(f: &Formula, class: SyntacticClass) -> bool {
    classify(f).contains(&class)
}
