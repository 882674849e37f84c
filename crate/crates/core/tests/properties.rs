mod common;

use confweave::adl::{parse_library_file, parse_problem_file, tokenize, Diagnostic};
use confweave::emit::{pretty_library, pretty_problem};
use proptest::prelude::*;

use common::{fixture, random_fixture};

const PIECES: &[&str] = &[
    "template", "problem", "provides", "properties", "requires", "check", "subsetof", "accepts",
    "with", "A", "b", "x1", "_y", "(", ")", "{", "}", ",", ";", ".", " ", "\n", "\t", "// c\n",
    "$", "é", "0", "-",
];

fn soup() -> impl Strategy<Value = String> {
    proptest::collection::vec(proptest::sample::select(PIECES), 0..60).prop_map(|v| v.concat())
}

fn within(text: &str, d: &Diagnostic) -> bool {
    let s = &d.span;
    let lines = text.split('\n').count();
    s.offset + s.len <= text.len()
        && text.is_char_boundary(s.offset)
        && s.line >= 1
        && s.line as usize <= lines
        && s.col >= 1
}

proptest! {
    #[test]
    fn parsing_is_deterministic(text in soup()) {
        let a = parse_library_file("f", &text);
        let b = parse_library_file("f", &text);
        prop_assert_eq!(&a.0, &b.0);
        prop_assert_eq!(
            a.1.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            b.1.iter().map(|d| d.to_string()).collect::<Vec<_>>()
        );
        let p = parse_problem_file("f", &text);
        let q = parse_problem_file("f", &text);
        prop_assert_eq!(&p.0, &q.0);
        prop_assert_eq!(p.1.len(), q.1.len());
    }

    #[test]
    fn diagnostics_stay_in_bounds(text in soup()) {
        for d in parse_library_file("f", &text).1.iter().chain(parse_problem_file("f", &text).1.iter()) {
            prop_assert!(within(&text, d), "{:?} in {:?}", d, text);
        }
        for t in tokenize(&text).0 {
            prop_assert!(t.span.offset + t.span.len <= text.len());
        }
    }

    #[test]
    fn random_libraries_round_trip(seed in 0u64..10_000) {
        let f = random_fixture(seed);
        let printed = pretty_library(&f.library);
        let (again, diags) = parse_library_file("p", &printed);
        prop_assert!(diags.is_empty(), "{:?}", diags);
        prop_assert_eq!(&again, &f.library);
        let printed = pretty_problem(&f.problem);
        let (again, diags) = parse_problem_file("p", &printed);
        prop_assert!(diags.is_empty(), "{:?}", diags);
        prop_assert_eq!(&again, &f.problem);
    }
}

#[test]
fn fixture_files_round_trip() {
    for name in ["solver_library.adl", "library_no_constant.adl"] {
        let (lib, diags) = parse_library_file(name, &fixture(name));
        assert!(diags.is_empty());
        let (again, _) = parse_library_file(name, &pretty_library(&lib));
        assert_eq!(again, lib);
    }
    for name in ["sum_problem.adl", "bool_sum_no_constant.adl"] {
        let (p, diags) = parse_problem_file(name, &fixture(name));
        assert!(diags.is_empty());
        let (again, _) = parse_problem_file(name, &pretty_problem(&p));
        assert_eq!(again, p);
    }
}
