//! Text format: fixture and random round trips, and a parser that reports
//! errors instead of panicking on arbitrary input.

use std::fs;
use std::path::Path;

use proptest::prelude::*;

use membrane_nets::dsl::{self, DslError};
use membrane_nets::samples;
use membrane_nets::verify::{random, random_net, random_system, NetParams, SystemParams};

fn fixture(name: &str) -> String {
    fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)).unwrap()
}

fn span_in_bounds(src: &str, e: &DslError) -> bool {
    let span = match e {
        DslError::Parse(p) => Some(p.span),
        DslError::Validation(v) => v.span,
    };
    span.is_none_or(|s| s.start <= s.end && s.end <= src.len() && s.line >= 1 && s.column >= 1)
}

#[test]
fn canonical_fixtures_are_fixed_points() {
    for name in ["two_membrane.tps", "branching.tps"] {
        let src = fixture(name);
        assert_eq!(dsl::print_psystem(&dsl::parse_psystem(&src).unwrap()), src, "{name}");
    }
    for name in ["two_membrane.tpn", "branching.tpn", "empty.tpn"] {
        let src = fixture(name);
        assert_eq!(dsl::print_petri(&dsl::parse_petri(&src).unwrap()), src, "{name}");
    }
}

#[test]
fn fixtures_hold_the_reference_models() {
    assert_eq!(dsl::parse_psystem(&fixture("two_membrane.tps")).unwrap(), samples::two_membrane_system());
    assert_eq!(dsl::parse_psystem(&fixture("commented.tps")).unwrap(), samples::two_membrane_system());
    assert_eq!(dsl::parse_petri(&fixture("two_membrane.tpn")).unwrap(), samples::two_membrane_net());
}

#[test]
fn thousand_random_models_round_trip() {
    let mut rng = random::rng(2024);
    for _ in 0..1000 {
        let sys = random_system(&mut rng, &SystemParams::default());
        assert_eq!(dsl::parse_psystem(&dsl::print_psystem(&sys)).unwrap(), sys);
        let net = random_net(&mut rng, &NetParams::default());
        assert_eq!(dsl::parse_petri(&dsl::print_petri(&net)).unwrap(), net);
    }
}

#[test]
fn errors_point_at_the_offending_token() {
    let src = "psystem {\n  alphabet a;\n  membrane 1 { rule r: a -> (a, sideways); }\n}";
    match dsl::parse_psystem(src).unwrap_err() {
        DslError::Parse(p) => {
            assert_eq!((p.span.line, p.span.column), (3, 33));
            assert_eq!(&src[p.span.start..p.span.end], "sideways");
        }
        e => panic!("unexpected {e:?}"),
    }
    let src = "petri { place p; transition t; p -> q; }";
    let e = dsl::parse_petri(src).unwrap_err();
    assert!(e.to_string().contains('q'), "{e}");
    assert!(span_in_bounds(src, &e));
}

#[test]
fn deep_nesting_is_rejected_not_overflowed() {
    let depth = 10_000;
    let src = format!("psystem {{ alphabet a; {} {} }}", "membrane 1 {".repeat(depth), "}".repeat(depth));
    assert!(dsl::parse_psystem(&src).is_err());
}

fn mutate(src: &str, edits: &[(usize, u8)]) -> Vec<u8> {
    let mut bytes = src.as_bytes().to_vec();
    for &(at, b) in edits {
        if bytes.is_empty() {
            bytes.push(b);
            continue;
        }
        match b % 3 {
            0 => {
                let i = at % bytes.len();
                bytes[i] = b;
            }
            1 => {
                bytes.remove(at % bytes.len());
            }
            _ => bytes.insert(at % (bytes.len() + 1), b),
        }
    }
    bytes
}

fn parse_both(bytes: &[u8]) -> Result<(), TestCaseError> {
    let src = String::from_utf8_lossy(bytes);
    for e in [dsl::parse_psystem(&src).err(), dsl::parse_petri(&src).err()].into_iter().flatten() {
        prop_assert!(span_in_bounds(&src, &e), "{:?}", e);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..256)) {
        parse_both(&bytes)?;
    }

    #[test]
    fn mutated_models_never_panic(
        which in 0..4usize,
        edits in proptest::collection::vec((any::<usize>(), any::<u8>()), 1..8),
    ) {
        let base = ["two_membrane.tps", "commented.tps", "two_membrane.tpn", "branching.tpn"][which];
        parse_both(&mutate(&fixture(base), &edits))?;
    }
}
