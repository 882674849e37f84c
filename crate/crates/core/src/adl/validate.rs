//! Cross-reference checks between a library and a problem.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::ast::*;
use super::diagnostic::Diagnostic;

/// What a reference can denote once the implementation choices along it are known.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Denotes<'a> {
    Requirement(&'a str),
    Parameter,
}

struct Validator<'a> {
    library: &'a ComponentLibrary,
    providers: HashMap<&'a str, Vec<&'a Template>>,
    properties: HashSet<&'a str>,
    diags: Vec<Diagnostic>,
}

impl<'a> Validator<'a> {
    fn new(library: &'a ComponentLibrary) -> Self {
        let mut providers: HashMap<&str, Vec<&Template>> = HashMap::new();
        let mut properties = HashSet::new();
        for t in &library.templates {
            for f in &t.provides {
                providers.entry(f.as_str()).or_default().push(t);
            }
            properties.extend(t.properties.iter().map(Ident::as_str));
        }
        Validator {
            library,
            providers,
            properties,
            diags: Vec::new(),
        }
    }

    fn candidates(&self, facility: &str) -> &[&'a Template] {
        self.providers.get(facility).map(Vec::as_slice).unwrap_or(&[])
    }

    fn check_provider(&mut self, req: &Requirement) {
        if self.candidates(req.facility.as_str()).is_empty() {
            self.diags.push(Diagnostic::error(
                req.facility.span.clone(),
                format!("no implementation provides '{}'", req.facility),
            ));
        }
    }

    /// Follows the segments after the head. Returns every kind of entity the
    /// reference may denote, or `None` after reporting an error.
    fn navigate(&mut self, entref: &EntRef, head: Denotes<'a>) -> Option<HashSet<Denotes<'a>>> {
        let mut current: HashSet<Denotes<'a>> = HashSet::from([head]);
        for (i, seg) in entref.segments.iter().enumerate().skip(1) {
            let mut next = HashSet::new();
            let mut facilities = BTreeSet::new();
            for d in &current {
                if let Denotes::Requirement(facility) = d {
                    facilities.insert(*facility);
                    for t in self.candidates(facility) {
                        if t.has_param(seg.as_str()) {
                            next.insert(Denotes::Parameter);
                        }
                        if let Some(r) = t.requirement(seg.as_str()) {
                            next.insert(Denotes::Requirement(r.facility.as_str()));
                        }
                    }
                }
            }
            if facilities.is_empty() {
                let prefix = EntRef {
                    segments: entref.segments[..i].to_vec(),
                };
                self.diags.push(Diagnostic::error(
                    seg.span.clone(),
                    format!("cannot navigate into parameter '{}'", prefix),
                ));
                return None;
            }
            if next.is_empty() {
                let list: Vec<_> = facilities.into_iter().collect();
                self.diags.push(Diagnostic::error(
                    seg.span.clone(),
                    format!(
                        "no implementation of '{}' has a parameter or requirement named '{}'",
                        list.join("', '"),
                        seg
                    ),
                ));
                return None;
            }
            current = next;
        }
        Some(current)
    }

    fn check_literals(&mut self, items: &[Ident], attr: SetAttr) {
        for item in items {
            let known = match attr {
                SetAttr::Properties => self.properties.contains(item.as_str()),
                SetAttr::Provides => self.providers.contains_key(item.as_str()),
            };
            if !known {
                let what = match attr {
                    SetAttr::Properties => "no template has property",
                    SetAttr::Provides => "no template provides facility",
                };
                self.diags.push(Diagnostic::warning(
                    item.span.clone(),
                    format!("{} '{}'", what, item),
                ));
            }
        }
    }

    fn check_checks(&mut self, checks: &[Check], head: &dyn Fn(&str) -> Option<Denotes<'a>>) {
        for check in checks {
            let Some(shape) = check.shape() else { continue };
            let resolve = |v: &mut Self, entref: &EntRef| {
                // parse-time resolution already reported unknown heads
                let h = head(entref.head().as_str())?;
                v.navigate(entref, h)
            };
            match shape {
                CheckShape::Require {
                    items,
                    entity,
                    attr,
                }
                | CheckShape::Restrict {
                    entity,
                    attr,
                    items,
                } => {
                    resolve(self, entity);
                    self.check_literals(items, attr);
                }
                CheckShape::Accepts {
                    slot,
                    candidate,
                    with,
                } => {
                    if let Some(kinds) = resolve(self, slot) {
                        if !kinds.contains(&Denotes::Parameter) {
                            self.diags.push(Diagnostic::error(
                                slot.span(),
                                format!("accepts slot '{}' is not a parameter of any candidate implementation", slot),
                            ));
                        }
                    }
                    resolve(self, candidate);
                    self.check_literals(with, SetAttr::Properties);
                }
            }
        }
    }

    fn check_cycles(&mut self) {
        // template -> templates providing one of its required facilities
        let lib = self.library;
        let index: HashMap<&str, usize> = lib
            .templates
            .iter()
            .enumerate()
            .map(|(i, t)| (t.name.as_str(), i))
            .collect();
        let edges: Vec<Vec<usize>> = lib
            .templates
            .iter()
            .map(|t| {
                let mut out = BTreeSet::new();
                for r in &t.requires {
                    for c in self.candidates(r.facility.as_str()) {
                        out.insert(index[c.name.as_str()]);
                    }
                }
                out.into_iter().collect()
            })
            .collect();

        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Active,
            Done,
        }
        let mut marks = vec![Mark::New; edges.len()];
        let mut stack: Vec<usize> = Vec::new();
        let mut cycles = Vec::new();

        fn dfs(
            v: usize,
            edges: &[Vec<usize>],
            marks: &mut [Mark],
            stack: &mut Vec<usize>,
            cycles: &mut Vec<Vec<usize>>,
        ) {
            marks[v] = Mark::Active;
            stack.push(v);
            for &w in &edges[v] {
                match marks[w] {
                    Mark::New => dfs(w, edges, marks, stack, cycles),
                    Mark::Active => {
                        let start = stack.iter().position(|&x| x == w).unwrap();
                        cycles.push(stack[start..].to_vec());
                    }
                    Mark::Done => {}
                }
            }
            stack.pop();
            marks[v] = Mark::Done;
        }

        for v in 0..edges.len() {
            if marks[v] == Mark::New {
                dfs(v, &edges, &mut marks, &mut stack, &mut cycles);
            }
        }
        for cycle in cycles {
            let first = &lib.templates[cycle[0]];
            let mut names: Vec<&str> = cycle.iter().map(|&i| lib.templates[i].name.as_str()).collect();
            names.push(first.name.as_str());
            self.diags.push(Diagnostic::warning(
                first.name.span.clone(),
                format!("requirement cycle: {}", names.join(" -> ")),
            ));
        }
    }

    fn check_unused(&mut self, problem: &ProblemSpec) {
        let lib = self.library;
        let required: HashSet<&str> = problem
            .requires
            .iter()
            .chain(lib.templates.iter().flat_map(|t| t.requires.iter()))
            .map(|r| r.facility.as_str())
            .collect();
        for t in &lib.templates {
            if !t.provides.iter().any(|f| required.contains(f.as_str())) {
                self.diags.push(Diagnostic::warning(
                    t.name.span.clone(),
                    format!("template '{}' provides nothing that is required", t.name),
                ));
            }
        }
    }
}

/// Checks cross-references between a parsed library and problem.
///
/// Errors: a required facility with no provider, dotted references that no
/// candidate implementation can satisfy, and `accepts` slots that are not
/// parameters. Warnings: requirement cycles, property or facility names no
/// template carries, and templates that nothing can require.
pub fn validate(library: &ComponentLibrary, problem: &ProblemSpec) -> Vec<Diagnostic> {
    let mut v = Validator::new(library);

    for req in &problem.requires {
        v.check_provider(req);
    }
    for t in &library.templates {
        for req in &t.requires {
            v.check_provider(req);
        }
    }

    let problem_head = |name: &str| {
        problem
            .requirement(name)
            .map(|r| Denotes::Requirement(r.facility.as_str()))
    };
    v.check_checks(&problem.checks, &problem_head);
    for t in &library.templates {
        let head = |name: &str| {
            if t.has_param(name) {
                Some(Denotes::Parameter)
            } else {
                t.requirement(name)
                    .map(|r| Denotes::Requirement(r.facility.as_str()))
            }
        };
        v.check_checks(&t.checks, &head);
    }

    v.check_cycles();
    v.check_unused(problem);
    v.diags
}
