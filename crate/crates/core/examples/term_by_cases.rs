//! The discriminator on the two-element Boolean algebra by cases, and a
//! two-case definition merged into a single term with a discriminator term.

use findef::algebra::{bool2, tuples};
use findef::clone::{discriminator, find_discriminator_term, CaseDefinition, CloneBounds};
use findef::formula::Formula;
use findef::term::{evaluate_term, Term};
use findef::terminterp::{find_term_by_cases, merge_cases_discriminator, validate_cases, CasesOutcome, InterpolationProblem};

fn main() -> findef::Result<()> {
    let b = bool2();
    let lang = b.signature().clone();
    let table = (0..8).map(|i| discriminator(i / 4, i / 2 % 2, i % 2)).collect();
    let k = vec![b.with_operation_table("d", 3, table)?];
    let p = InterpolationProblem::new(k.clone(), lang.clone(), "d");
    if let CasesOutcome::Cases { definition } = find_term_by_cases(&p, false)? {
        for (t, phi) in &definition.cases {
            println!("found: {t} if {phi}");
        }
    }

    let x = |i: usize| Term::var(format!("x{i}"));
    let same = Formula::eq(x(1), x(2));
    let cases = CaseDefinition {
        target: "d".into(),
        cases: vec![(x(1), Formula::not(same.clone())), (x(3), same)],
    };
    validate_cases(&k, &cases)?;
    let t = find_discriminator_term(&k, &lang, CloneBounds::default())?.expect("bool2 is quasiprimal");
    let merged = merge_cases_discriminator(&k, &cases, &t)?;
    for args in tuples(2, 3) {
        assert_eq!(evaluate_term(&k[0], &merged, &args)?, discriminator(args[0], args[1], args[2]));
    }
    println!("x1 if x1 != x2, x3 if x1 = x2 merges to {merged}");
    Ok(())
}
