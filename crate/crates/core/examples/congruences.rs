//! Congruence lattices, relative congruences, congruence extension and the
//! Fraser–Horn property.

use findef::algebra::{demorgan_m, power, stone3, FiniteStructure, Signature};
use findef::congruences::{
    check_cep, check_fraser_horn, congruence_lattice, principal_congruence, quasivariety_membership,
    relative_principal_congruence, LatticeBounds, RelContext,
};

fn main() -> findef::Result<()> {
    let s = stone3();
    for a in [&s, &demorgan_m()] {
        let con = congruence_lattice(a, LatticeBounds::default())?;
        let shown: Vec<_> = con.iter().map(|c| c.blocks()).collect();
        println!("Con({}) = {shown:?}", a.name());
    }
    println!("Cg(1/2, 1) = {:?}", principal_congruence(&s, 1, 2).blocks());

    let ctx = RelContext::new(vec![s.clone()])?;
    let sq = power(&s, 2)?;
    println!("{} in the quasivariety: {}", sq.name(), quasivariety_membership(&ctx, &sq)?);
    let theta = relative_principal_congruence(&ctx, &sq, 1, 8)?;
    println!("relative Cg({}, {}) has {} blocks", sq.element_name(1), sq.element_name(8), theta.num_blocks());
    println!("congruence extension fails: {:?}", check_cep(&ctx, 4096)?);

    let set2 = FiniteStructure::new("set2", Signature::default(), 2, vec![], vec![])?;
    let skew = check_fraser_horn(&[set2])?.expect("sets have skew congruences");
    println!("skew congruence on set2 x set2: {:?}", skew.blocks);
    Ok(())
}
