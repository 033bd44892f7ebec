//! Primitive positive definability of unary functions on the three-element
//! Stone algebra: `x ↦ x**` has a witness, the constant `1/2` a
//! counterexample.

use findef::algebra::stone3;
use findef::definability::{check, verify_counterexample, Query, Verdict};
use findef::formula::{defines, SyntacticClass};
use findef::target::Target;

fn main() -> findef::Result<()> {
    let base = stone3();
    for (name, table) in [("x**", vec![0, 2, 2]), ("1/2", vec![1, 1, 1])] {
        let a = base.with_operation_table("f", 1, table)?;
        let target = Target::function("f");
        let q = Query::new(vec![a.clone()], base.signature().clone(), target.clone(), SyntacticClass::PP);
        match check(&q)? {
            Verdict::Definable { witness, .. } => {
                assert!(defines(&[a], &witness, &target)?);
                println!("{name}: {witness}");
            }
            Verdict::NotDefinable { counterexample } => {
                verify_counterexample(&q, &counterexample)?;
                println!("{name}: not pp definable, {:?} with map {:?}", counterexample.kind, counterexample.map);
            }
            Verdict::ResourceExceeded { report } => println!("{name}: {report}"),
        }
    }
    Ok(())
}
