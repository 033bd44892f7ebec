//! Baker–Pixley over the Boolean algebra: every binary function is a term,
//! and negation is not a term of the lattice operations with constants.

use findef::algebra::bool2;
use findef::terminterp::{baker_pixley_term, BakerPixley, InterpolationProblem};

fn main() -> findef::Result<()> {
    let b = bool2();
    for code in 0..16usize {
        let table = (0..4).map(|i| code >> i & 1).collect();
        let k = vec![b.with_operation_table("f", 2, table)?];
        let p = InterpolationProblem::new(k, b.signature().clone(), "f");
        if let BakerPixley::Term { term, .. } = baker_pixley_term(&p)? {
            println!("f{code:02}: {term}");
        }
    }
    let lattice = b.signature().restrict(&["join", "meet", "zero", "one"])?;
    let p = InterpolationProblem::new(vec![b], lattice, "neg");
    if let BakerPixley::NotClosed { certificate } = baker_pixley_term(&p)? {
        println!("neg: Sg{:?} = {:?} misses {:?}", certificate.generators, certificate.subuniverse, certificate.image);
    }
    Ok(())
}
