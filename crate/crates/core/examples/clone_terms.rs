//! Term operations, majority and discriminator terms, and term
//! representation with its failure certificate.

use findef::algebra::{bool2, stone3};
use findef::clone::{
    find_discriminator_term, find_majority_term, find_representing_term, term_operations, CloneBounds, FunctionTable,
    Representation,
};

fn main() -> findef::Result<()> {
    let b = [bool2()];
    let lang = b[0].signature().clone();
    let ops = term_operations(&b, &lang, 2, CloneBounds::default())?;
    println!("binary term operations of bool2: {}", ops.len());
    println!("majority: {:?}", find_majority_term(&b, &lang, CloneBounds::default())?.map(|t| t.to_string()));
    println!("discriminator: {:?}", find_discriminator_term(&b, &lang, CloneBounds::default())?.map(|t| t.to_string()));

    let s = [stone3()];
    let lattice = s[0].signature().restrict(&["join", "meet", "zero", "one"])?;
    let star = FunctionTable::from_symbol(&s, "star")?;
    match find_representing_term(&s, &lattice, &star, CloneBounds::default())? {
        Representation::Term(t) => println!("star = {t}"),
        Representation::NotRepresentable(c) => {
            println!("star is not a lattice term: Sg{:?} = {:?} misses {:?}", c.generators, c.subuniverse, c.image)
        }
    }
    Ok(())
}
