use logsing::catalog::{check_example, examples, ExampleMode};

#[test]
fn every_example_matches_its_stored_outcome() {
    for ex in examples() {
        let diffs = check_example(&ex).unwrap_or_else(|e| panic!("{}: {e}", ex.name));
        assert!(diffs.is_empty(), "{}: {diffs:?}", ex.name);
    }
}

#[test]
fn log_examples_store_a_leading_coefficient() {
    for ex in examples() {
        if let ExampleMode::Log { .. } = ex.mode {
            assert!(ex.expected.a.is_some(), "{}", ex.name);
            assert!(ex.expected.all_hold, "{}", ex.name);
        }
    }
}

#[test]
fn sources_round_trip_through_the_printer() {
    for ex in examples() {
        let spec = ex.spec().unwrap();
        let again = logsing::parser::parse_equation_with(
            &spec.to_dsl(),
            &logsing::parser::ParseOptions { n: Some(spec.n), max_deg: spec.max_deg },
        )
        .unwrap();
        assert_eq!(spec, again, "{}", ex.name);
    }
}
