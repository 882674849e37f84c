use std::fmt::Write;

use crate::adl::{ComponentLibrary, Ident, ProblemSpec, Requirement, Template};

const INDENT: &str = "    ";

fn join(items: &[Ident]) -> String {
    items
        .iter()
        .map(|i| i.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

fn requirement(out: &mut String, r: &Requirement) {
    writeln!(out, "{}requires {} {};", INDENT, r.facility, r.name).unwrap();
}

pub fn pretty_template(t: &Template) -> String {
    let mut out = String::new();
    writeln!(out, "template {}({}) {{", t.name, join(&t.params)).unwrap();
    writeln!(out, "{}provides {};", INDENT, join(&t.provides)).unwrap();
    if !t.properties.is_empty() {
        writeln!(out, "{}properties {};", INDENT, join(&t.properties)).unwrap();
    }
    for r in &t.requires {
        requirement(&mut out, r);
    }
    for c in &t.checks {
        writeln!(out, "{}check {};", INDENT, c).unwrap();
    }
    out.push_str("}\n");
    out
}

/// Canonical source text for a library; templates separated by blank lines.
pub fn pretty_library(library: &ComponentLibrary) -> String {
    library
        .templates
        .iter()
        .map(pretty_template)
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn pretty_problem(problem: &ProblemSpec) -> String {
    let mut out = String::new();
    writeln!(out, "problem {} {{", problem.name).unwrap();
    for r in &problem.requires {
        requirement(&mut out, r);
    }
    for c in &problem.checks {
        writeln!(out, "{}check {};", INDENT, c).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adl::{parse_library, parse_problem};

    #[test]
    fn empty_library_prints_nothing() {
        assert_eq!(pretty_library(&ComponentLibrary::default()), "");
    }

    #[test]
    fn memory_manager() {
        let (lib, _) = parse_library("template MemoryManager ( ) {provides memory;}");
        assert_eq!(
            pretty_library(&lib),
            "template MemoryManager() {\n    provides memory;\n}\n"
        );
    }

    #[test]
    fn round_trip_three_templates() {
        let src = "template M() { provides memory; }
            template V(x, y) { provides var, thing; properties a, b;
                requires memory mem; requires var inner;
                check {a} subsetof x.properties; check y.provides subsetof {};
                check x accepts inner.x with {a}; check mem accepts y; }
            template W() { provides var; requires var inner2; check {} subsetof inner2.properties; }";
        let (lib, diags) = parse_library(src);
        assert!(diags.is_empty(), "{:?}", diags);
        let printed = pretty_library(&lib);
        let (again, diags) = parse_library(&printed);
        assert!(diags.is_empty(), "{:?}", diags);
        assert_eq!(again, lib);
        assert_eq!(pretty_library(&again), printed);
    }

    #[test]
    fn problem_round_trip() {
        let (p, _) = parse_problem(
            "problem P { requires var a; requires cons c; check c.x accepts a with {q, r}; check a.properties subsetof {q}; }",
        );
        let (again, _) = parse_problem(&pretty_problem(&p));
        assert_eq!(again, p);
    }
}
