//! Subuniverses of the square of the four-element De Morgan algebra
//! expanded by the atom swap.

use findef::algebra::{demorgan_circ, power};
use findef::subpowers::{all_subuniverses, generated_subuniverse};

fn main() -> findef::Result<()> {
    let m = demorgan_circ();
    let sq = power(&m, 2)?;
    let subs = all_subuniverses(&sq, 100_000)?;
    println!("{} subuniverses of {}", subs.len(), sq.name());
    for s in &subs {
        let shown: Vec<String> = s.elements.iter().map(|&e| sq.element_name(e)).collect();
        println!("  {{{}}}", shown.join(", "));
    }
    let s = generated_subuniverse(&sq, &[6])?;
    let pairs: Vec<String> = s.elements.iter().map(|&e| sq.element_name(e)).collect();
    println!("Sg{{{}}} = {{{}}}", sq.element_name(6), pairs.join(", "));
    Ok(())
}
