//! Homomorphisms from the Stone algebra to the two-element Boolean algebra
//! over the common lattice signature.

use findef::algebra::{bool2, stone3};
use findef::subpowers::{find_maps, verify_map, MapKind, Subuniverse};

fn main() -> findef::Result<()> {
    let lang = ["join", "meet"];
    let a = stone3().reduct_to(&lang)?;
    let b = bool2().reduct_to(&lang)?;
    for kind in [MapKind::Hom, MapKind::Embedding] {
        let maps = find_maps(&a, &Subuniverse::full(&a), &b, &Subuniverse::full(&b), kind)?;
        println!("{kind:?}: {}", maps.len());
        for m in &maps {
            assert!(verify_map(&a, &b, m));
            println!("  {:?}", m.images);
        }
    }
    Ok(())
}
