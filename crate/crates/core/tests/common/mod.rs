//! Seeded random libraries and problems, plus fixture loading.
#![allow(dead_code)]

use std::path::PathBuf;

use confweave::adl::{has_errors, parse_library, parse_problem, validate, ComponentLibrary, ProblemSpec};
use confweave::oracle::{candidate_tree, CandidateNode};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const MAX_ACTIVE_PATHS: usize = 12;
pub const MAX_CANDIDATES: usize = 4;
pub const MAX_DEPTH: usize = 3;
/// Keeps brute-force enumeration cheap.
pub const MAX_CONFIGURATIONS: u128 = 50_000;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn load(library: &str, problem: &str) -> (ComponentLibrary, ProblemSpec) {
    let (lib, d1) = parse_library(&fixture(library));
    let (prob, d2) = parse_problem(&fixture(problem));
    assert!(!has_errors(&d1) && !has_errors(&d2), "{:?} {:?}", d1, d2);
    (lib, prob)
}

#[derive(Debug, Clone)]
pub struct RandomFixture {
    pub seed: u64,
    pub library_src: String,
    pub problem_src: String,
    pub library: ComponentLibrary,
    pub problem: ProblemSpec,
}

struct Tpl {
    name: String,
    level: usize,
    provides: Vec<String>,
    properties: Vec<String>,
    params: Vec<String>,
    requires: Vec<(String, String)>,
    checks: Vec<String>,
}

const PROPS: [&str; 6] = ["p0", "p1", "p2", "p3", "p4", "p5"];
const LEVELS: usize = MAX_DEPTH;

fn subset(rng: &mut ChaCha8Rng, pool: &[&str], max: usize) -> Vec<String> {
    let n = rng.gen_range(0..=max.min(pool.len()));
    let mut v: Vec<String> = pool.choose_multiple(rng, n).map(|s| s.to_string()).collect();
    v.sort();
    v
}

fn nonempty_subset(rng: &mut ChaCha8Rng, pool: &[&str], max: usize) -> Vec<String> {
    loop {
        let v = subset(rng, pool, max);
        if !v.is_empty() {
            return v;
        }
    }
}

fn list(items: &[String]) -> String {
    format!("{{{}}}", items.join(", "))
}

fn generate_once(rng: &mut ChaCha8Rng) -> (String, String) {
    let facilities: Vec<Vec<String>> = (0..LEVELS)
        .map(|l| (0..rng.gen_range(1..=2)).map(|k| format!("f{}_{}", l, k)).collect())
        .collect();
    let mut templates: Vec<Tpl> = Vec::new();
    for (level, facs) in facilities.iter().enumerate() {
        for f in facs {
            for _ in 0..rng.gen_range(1..=MAX_CANDIDATES) {
                let mut params = Vec::new();
                if level + 1 < LEVELS {
                    for p in ["a", "b"] {
                        if rng.gen_bool(0.4) {
                            params.push(p.to_string());
                        }
                    }
                }
                let mut requires = Vec::new();
                if level + 1 < LEVELS {
                    for r in ["m", "n"] {
                        if rng.gen_bool(0.35) {
                            let f = facilities[level + 1].choose(rng).unwrap().clone();
                            requires.push((f, r.to_string()));
                        }
                    }
                }
                let mut t = Tpl {
                    name: format!("T{}", templates.len()),
                    level,
                    provides: vec![f.clone()],
                    properties: subset(rng, &PROPS, 3),
                    params,
                    requires,
                    checks: Vec::new(),
                };
                for _ in 0..rng.gen_range(0..=2) {
                    let choice = rng.gen_range(0..4);
                    if choice == 0 && !t.params.is_empty() {
                        let p = t.params.choose(rng).unwrap().clone();
                        t.checks.push(format!("{} subsetof {}.properties", list(&nonempty_subset(rng, &PROPS, 2)), p));
                    } else if choice == 1 && !t.params.is_empty() {
                        let p = t.params.choose(rng).unwrap().clone();
                        let f = facilities[0].choose(rng).unwrap().clone();
                        t.checks.push(format!("{{{}}} subsetof {}.provides", f, p));
                    } else if choice == 2 && !t.requires.is_empty() {
                        let (_, r) = t.requires.choose(rng).unwrap().clone();
                        t.checks.push(format!("{} subsetof {}.properties", list(&nonempty_subset(rng, &PROPS, 1)), r));
                    } else if choice == 3 && !t.requires.is_empty() {
                        let (_, r) = t.requires.choose(rng).unwrap().clone();
                        t.checks.push(format!("{}.properties subsetof {}", r, list(&subset(rng, &PROPS, 4))));
                    }
                }
                templates.push(t);
            }
        }
    }
    // accepts checks inside templates, against the params of the candidates
    // for one of their own requirements
    for i in 0..templates.len() {
        if templates[i].requires.is_empty() || !rng.gen_bool(0.4) {
            continue;
        }
        let (f, r) = templates[i].requires.choose(rng).unwrap().clone();
        let params: Vec<String> = templates
            .iter()
            .filter(|t| t.provides.contains(&f))
            .flat_map(|t| t.params.clone())
            .collect();
        let Some(p) = params.choose(rng).cloned() else {
            continue;
        };
        let t = &templates[i];
        let mut targets: Vec<String> = t.requires.iter().map(|(_, n)| n.clone()).collect();
        targets.extend(t.params.iter().cloned());
        let target = targets.choose(rng).unwrap().clone();
        templates[i].checks.push(format!("{}.{} accepts {}", r, p, target));
    }
    templates.shuffle(rng);
    for (i, t) in templates.iter_mut().enumerate() {
        t.name = format!("T{}", i);
    }

    let mut library = String::new();
    for t in &templates {
        library.push_str(&format!("template {}({}) {{\n", t.name, t.params.join(", ")));
        library.push_str(&format!("    provides {};\n", t.provides.join(", ")));
        if !t.properties.is_empty() {
            library.push_str(&format!("    properties {};\n", t.properties.join(", ")));
        }
        for (f, r) in &t.requires {
            library.push_str(&format!("    requires {} {};\n", f, r));
        }
        for c in &t.checks {
            library.push_str(&format!("    check {};\n", c));
        }
        library.push_str("}\n");
    }

    let reqs: Vec<(String, String)> = (0..rng.gen_range(1..=3))
        .map(|i| (facilities[0].choose(rng).unwrap().clone(), format!("r{}", i)))
        .collect();
    let candidates = |f: &str| -> Vec<&Tpl> {
        templates.iter().filter(|t| t.provides.iter().any(|p| p == f)).collect()
    };
    let mut checks = Vec::new();
    for _ in 0..rng.gen_range(0..=4) {
        let (f, r) = reqs.choose(rng).unwrap().clone();
        let cands = candidates(&f);
        match rng.gen_range(0..6) {
            0 => checks.push(format!("{} subsetof {}.properties", list(&nonempty_subset(rng, &PROPS, 2)), r)),
            1 => checks.push(format!("{}.properties subsetof {}", r, list(&subset(rng, &PROPS, 5)))),
            2 => {
                let nested: Vec<&String> = cands.iter().flat_map(|t| t.requires.iter().map(|(_, n)| n)).collect();
                if let Some(n) = nested.choose(rng) {
                    checks.push(format!("{} subsetof {}.{}.properties", list(&nonempty_subset(rng, &PROPS, 1)), r, n));
                }
            }
            3 | 4 => {
                let params: Vec<&String> = cands.iter().flat_map(|t| t.params.iter()).collect();
                if let Some(p) = params.choose(rng) {
                    let (_, other) = reqs.choose(rng).unwrap();
                    let with = if rng.gen_bool(0.3) {
                        format!(" with {}", list(&nonempty_subset(rng, &PROPS, 2)))
                    } else {
                        String::new()
                    };
                    checks.push(format!("{}.{} accepts {}{}", r, p, other, with));
                }
            }
            _ => {
                let other = facilities[0].choose(rng).unwrap();
                checks.push(format!("{{{}}} subsetof {}.provides", other, r));
            }
        }
    }
    let mut problem = String::from("problem Random {\n");
    for (f, r) in &reqs {
        problem.push_str(&format!("    requires {} {};\n", f, r));
    }
    for c in &checks {
        problem.push_str(&format!("    check {};\n", c));
    }
    problem.push_str("}\n");
    (library, problem)
}

fn max_active(node: &CandidateNode) -> usize {
    1 + node
        .candidates
        .iter()
        .map(|(_, children)| children.iter().map(max_active).sum::<usize>())
        .max()
        .unwrap_or(0)
}

fn count(node: &CandidateNode) -> u128 {
    node.candidates
        .iter()
        .map(|(_, children)| children.iter().map(count).product::<u128>())
        .sum()
}

/// A valid fixture within the size bounds, deterministic in `seed`.
pub fn random_fixture(seed: u64) -> RandomFixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let (library_src, problem_src) = generate_once(&mut rng);
        let (library, d1) = parse_library(&library_src);
        let (problem, d2) = parse_problem(&problem_src);
        if has_errors(&d1) || has_errors(&d2) || has_errors(&validate(&library, &problem)) {
            continue;
        }
        let Ok(tree) = candidate_tree(&library, &problem, MAX_DEPTH) else {
            continue;
        };
        let active: usize = tree.roots.iter().map(max_active).sum();
        let total: u128 = tree.roots.iter().map(count).product();
        if active > MAX_ACTIVE_PATHS || total > MAX_CONFIGURATIONS {
            continue;
        }
        return RandomFixture {
            seed,
            library_src,
            problem_src,
            library,
            problem,
        };
    }
}

pub fn random_suite(n: u64) -> Vec<RandomFixture> {
    (0..n).map(|i| random_fixture(0x5eed_0000 + i)).collect()
}
