use super::{FiniteStructure, Signature, Symbol};

pub const BUILTIN_NAMES: [&str; 5] = ["stone3", "bool2", "demorganM", "heyting3", "demorganMcirc"];

/// The automorphism of M swapping the atoms `a` and `b`.
pub const DEMORGAN_CIRC: [usize; 4] = [0, 2, 1, 3];

pub fn builtin(name: &str) -> Option<FiniteStructure> {
    match name {
        "stone3" => Some(stone3()),
        "bool2" => Some(bool2()),
        "demorganM" => Some(demorgan_m()),
        "heyting3" => Some(heyting3()),
        "demorganMcirc" => Some(demorgan_circ()),
        _ => None,
    }
}

fn lattice_sig(unary: &str) -> Signature {
    Signature::new(
        vec![
            Symbol::new("join", 2),
            Symbol::new("meet", 2),
            Symbol::new(unary, 1),
            Symbol::new("zero", 0),
            Symbol::new("one", 0),
        ],
        vec![],
    )
    .expect("static signature")
}

fn table2(n: usize, f: impl Fn(usize, usize) -> usize) -> Vec<usize> {
    (0..n * n).map(|i| f(i / n, i % n)).collect()
}

fn names(ns: &[&str]) -> Vec<String> {
    ns.iter().map(|s| s.to_string()).collect()
}

/// The three-element Stone algebra on 0 < 1/2 < 1 (indices 0, 1, 2).
pub fn stone3() -> FiniteStructure {
    let star = vec![2, 0, 0];
    FiniteStructure::new(
        "stone3",
        lattice_sig("star"),
        3,
        vec![table2(3, usize::max), table2(3, usize::min), star, vec![0], vec![2]],
        vec![],
    )
    .and_then(|s| s.with_names(names(&["0", "1/2", "1"])))
    .expect("static table")
}

/// The two-element Boolean algebra.
pub fn bool2() -> FiniteStructure {
    FiniteStructure::new(
        "bool2",
        lattice_sig("neg"),
        2,
        vec![table2(2, usize::max), table2(2, usize::min), vec![1, 0], vec![0], vec![1]],
        vec![],
    )
    .and_then(|s| s.with_names(names(&["0", "1"])))
    .expect("static table")
}

/// The four-element De Morgan algebra on the two-atom Boolean lattice
/// `0, a, b, 1` (indices 0..4, encoded as bit sets) whose negation fixes
/// both atoms.
pub fn demorgan_m() -> FiniteStructure {
    FiniteStructure::new(
        "demorganM",
        lattice_sig("neg"),
        4,
        vec![table2(4, |x, y| x | y), table2(4, |x, y| x & y), vec![3, 1, 2, 0], vec![0], vec![3]],
        vec![],
    )
    .and_then(|s| s.with_names(names(&["0", "a", "b", "1"])))
    .expect("static table")
}

/// The Stone algebra 3 expanded by Heyting implication `imp`.
pub fn heyting3() -> FiniteStructure {
    stone3()
        .with_operation("imp", 2, |a| if a[0] <= a[1] { 2 } else { a[1] })
        .expect("static table")
        .renamed("heyting3")
}

/// M expanded by the atom swap as the unary operation `circ`.
pub fn demorgan_circ() -> FiniteStructure {
    demorgan_m()
        .with_operation("circ", 1, |a| DEMORGAN_CIRC[a[0]])
        .expect("static table")
        .renamed("demorganMcirc")
}
