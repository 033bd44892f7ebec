//! A first-order definition of principal congruences in the quasivariety
//! generated by the Stone algebra, checked on its products.

use findef::algebra::stone3;
use findef::congruences::{synthesize_dpc_formula, RelContext};
use findef::definability::Bounds;
use findef::formula::SyntacticClass;

fn main() -> findef::Result<()> {
    let ctx = RelContext::new(vec![stone3()])?;
    let r = synthesize_dpc_formula(&ctx, SyntacticClass::PositiveOpen, Bounds::default())?;
    match r.verdict.witness() {
        Some(w) => println!("(x3, x4) in Cg(x1, x2) iff {w}"),
        None => println!("{:?}", r.verdict),
    }
    println!("verified on: {}", r.verified_on.join(", "));
    Ok(())
}
