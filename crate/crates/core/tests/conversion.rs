mod common;

use proptest::prelude::*;

use cobperturb::{fixed_to_free, free_to_fixed_sfx, CobolUnit, SourceForm, UnitKind};
use common::{conversion_violation, free_unit, random_free_program};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn random_programs_convert_cleanly(seed in any::<u64>()) {
        let (violation, _) = conversion_violation(seed);
        prop_assert!(violation.is_none(), "{}", violation.unwrap_or_default());
    }
}

#[test]
fn split_methods_are_exercised() {
    let checked: usize = (0..200).map(|s| conversion_violation(s).1).sum();
    assert!(checked > 100, "only {checked} continuation-split variants");
}

#[test]
fn generator_produces_long_lines() {
    let long = (0..100)
        .filter(|s| random_free_program(*s).lines().any(|l| l.len() > 72))
        .count();
    assert!(long > 50);
}

#[test]
fn continuation_layouts_collapse_to_one_free_form() {
    // The same statement split at different places. A break between
    // tokens keeps the space on the first line.
    let layouts = [
        "       MOVE 'ABCDEFGHIJ' TO WS-A.\n",
        "       MOVE 'ABCDE\n      -    'FGHIJ' TO WS-A.\n",
        "       MOVE 'ABCDEFGHIJ' \n      -    TO WS-A.\n",
        "       MOVE 'A\n      -    'BCDEFGHIJ' TO \n      -      WS-A.\n",
    ];
    let free: Vec<String> = layouts
        .iter()
        .map(|t| {
            let u = CobolUnit::parse(t, SourceForm::Fixed, UnitKind::Paragraph).unwrap();
            fixed_to_free(&u).unwrap().0.to_text()
        })
        .collect();
    assert!(free.iter().all(|f| f == "MOVE 'ABCDEFGHIJ' TO WS-A.\n"), "{free:?}");
}

#[test]
fn very_long_literal_splits_inside() {
    let lit = "X".repeat(90);
    let text = format!("    MOVE '{lit}' TO WS-A.\n");
    let sfx = free_to_fixed_sfx(&free_unit(&text)).unwrap().0;
    assert!(sfx.len() > 1);
    assert!(sfx.raw_lines().iter().all(|l| l.chars().count() <= 72));
    assert_eq!(fixed_to_free(&sfx).unwrap().0.to_text(), text);
}
