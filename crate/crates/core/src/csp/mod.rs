//! Solving the compiled configuration problem: propagation to fixpoint,
//! chronological backtracking in the CSP's search order, and projection of
//! solutions onto implementation choices.

mod propagate;
mod search;
mod state;

use thiserror::Error;

use crate::encoder::{ConfigCsp, ConstraintKind, Literal, VarId, INACTIVE};

pub use crate::configuration::Configuration;
pub use propagate::{propagate, Conflict, Propagator};
pub use search::{SearchStats, Solver, SolverOptions};
pub use state::{SearchState, Wipeout};

/// A value for every CSP variable, indexed by [`VarId`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<u32>,
}

impl Assignment {
    pub fn new(values: Vec<u32>) -> Self {
        Assignment { values }
    }

    pub fn get(&self, var: VarId) -> u32 {
        self.values[var.0]
    }

    pub fn set(&mut self, var: VarId, value: u32) {
        self.values[var.0] = value;
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn holds(&self, lit: Literal) -> bool {
        self.get(lit.var) == lit.value
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub assignment: Assignment,
    pub configuration: Configuration,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("assignment has {found} values but the model has {expected} variables")]
pub struct MalformedAssignment {
    pub expected: usize,
    pub found: usize,
}

/// Restricts a solution to the active component variables.
pub fn project(csp: &ConfigCsp, assignment: &Assignment) -> Configuration {
    csp.components
        .iter()
        .filter_map(|c| {
            let code = assignment.get(c.var);
            if code == INACTIVE {
                return None;
            }
            let name = csp.symbols.implementation(code)?;
            Some((c.path.clone(), name.to_string()))
        })
        .collect()
}

fn solve_with(csp: &ConfigCsp, limit: Option<usize>, options: SolverOptions) -> Vec<Solution> {
    Solver::new(csp, options)
        .solve(limit)
        .into_iter()
        .map(|assignment| Solution {
            configuration: project(csp, &assignment),
            assignment,
        })
        .collect()
}

/// The first solution in search order, or `None` if unsatisfiable.
pub fn solve_first(csp: &ConfigCsp) -> Option<Solution> {
    solve_with(csp, Some(1), SolverOptions::default()).pop()
}

/// All solutions in search order, truncated at `limit`. Inactive
/// conditional variables are pinned to 0 and every bit is determined by the
/// component choices, so distinct solutions project to distinct
/// configurations.
pub fn solve_all(csp: &ConfigCsp, limit: Option<usize>) -> Vec<Solution> {
    solve_with(csp, limit, SolverOptions::default())
}

pub fn solve_all_with(csp: &ConfigCsp, limit: Option<usize>, options: SolverOptions) -> Vec<Solution> {
    solve_with(csp, limit, options)
}

/// Evaluates every constraint directly on a total assignment.
pub fn check_assignment(csp: &ConfigCsp, assignment: &Assignment) -> Result<bool, MalformedAssignment> {
    if assignment.len() != csp.vars.len() {
        return Err(MalformedAssignment {
            expected: csp.vars.len(),
            found: assignment.len(),
        });
    }
    let in_domain = csp
        .vars
        .iter()
        .enumerate()
        .all(|(i, v)| v.domain.contains(&assignment.values[i]));
    if !in_domain {
        return Ok(false);
    }
    let all = |lits: &[Literal]| lits.iter().all(|&l| assignment.holds(l));
    Ok(csp.constraints.iter().all(|c| match &c.kind {
        ConstraintKind::IffMembership { bit, var, codes } => {
            (assignment.get(*bit) == 1) == codes.contains(&assignment.get(*var))
        }
        ConstraintKind::ForceBit { bit, value } => assignment.get(*bit) == *value,
        ConstraintKind::ChannelReify { channel, guard } => {
            (assignment.get(*channel) == 1) == all(guard)
        }
        ConstraintKind::ChannelImply {
            channel,
            bit,
            value,
        } => assignment.get(*channel) == 0 || assignment.get(*bit) == *value,
        ConstraintKind::SentinelLink { var, prerequisite } => {
            (assignment.get(*var) == INACTIVE) == !all(prerequisite)
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adl::{parse_library, parse_problem, SetAttr};
    use crate::encoder::{encode, EntityId};

    fn csp(lib: &str, prob: &str) -> ConfigCsp {
        let (l, d1) = parse_library(lib);
        let (p, d2) = parse_problem(prob);
        assert!(d1.is_empty() && d2.is_empty(), "{:?} {:?}", d1, d2);
        encode(&l, &p, 4).unwrap()
    }

    const LIB: &str = "
        template Mem() { provides memory; }
        template Const() { provides var; properties eq1, le2; }
        template Bool() { provides var; properties le2, rm; requires memory mem; }
        template Disc() { provides var; properties rm; requires memory mem; }
        template BoolSum(a, b) { provides cons;
            check {le2} subsetof a.properties; check {eq1} subsetof b.properties; }
        template GacSum(a, b) { provides cons; requires memory mem;
            check {rm} subsetof a.properties; check {rm} subsetof b.properties; }
    ";

    #[test]
    fn fixing_a_component_collapses_its_bits() {
        let csp = csp(LIB, "problem P { requires var v; }");
        let mut state = SearchState::new(&csp);
        let bool_code = csp.symbols.code("Bool").unwrap();
        state.assign(csp.components[0].var, bool_code).unwrap();
        propagate(&csp, &mut state).unwrap();
        let bits = &csp.components[0].bits;
        let props: Vec<(String, u32)> = bits
            .properties
            .iter()
            .enumerate()
            .map(|(i, &b)| (csp.symbols.properties.name(i).to_string(), state.fixed(b).unwrap()))
            .collect();
        let expected: Vec<(String, u32)> = csp
            .symbols
            .properties
            .names()
            .iter()
            .map(|n| (n.clone(), u32::from(n == "le2" || n == "rm")))
            .collect();
        assert_eq!(props, expected);
        for (i, &b) in bits.provides.iter().enumerate() {
            let name = csp.symbols.facilities.name(i);
            assert_eq!(state.fixed(b), Some(u32::from(name == "var")), "{}", name);
        }
        // the memory requirement under Bool is now active, the one under Disc is not
        let mem_bool = csp.component("v=Bool/mem").unwrap();
        let mem_disc = csp.component("v=Disc/mem").unwrap();
        assert!(!state.contains(mem_bool.var, 0));
        assert_eq!(state.fixed(mem_disc.var), Some(0));
    }

    #[test]
    fn empty_constraint_list_is_a_fixpoint() {
        let mut csp = csp("template A() { provides f; } template B() { provides f; }", "problem P { requires f x; }");
        csp.constraints.clear();
        let mut state = SearchState::new(&csp);
        let before = state.snapshot();
        propagate(&csp, &mut state).unwrap();
        assert_eq!(state.snapshot(), before);
    }

    #[test]
    fn singleton_problem_has_one_solution() {
        let csp = csp("template A() { provides f; properties p; }", "problem P { requires f x; }");
        let first = solve_first(&csp).unwrap();
        assert_eq!(first.configuration.get("x"), Some("A"));
        assert_eq!(solve_all(&csp, None).len(), 1);
        assert!(check_assignment(&csp, &first.assignment).unwrap());
    }

    #[test]
    fn flipping_a_bit_breaks_the_assignment() {
        let csp = csp(LIB, "problem P { requires var v; requires cons c; check c.a accepts v; }");
        let sol = solve_first(&csp).unwrap();
        let bit = csp.components[0].bits.properties[0];
        let mut bad = sol.assignment.clone();
        bad.set(bit, 1 - bad.get(bit));
        assert!(!check_assignment(&csp, &bad).unwrap());
    }

    #[test]
    fn inactive_branches_are_vacuous() {
        let csp = csp(LIB, "problem P { requires var v; }");
        let sols = solve_all(&csp, None);
        assert_eq!(sols.len(), 3);
        let const_sol = sols.iter().find(|s| s.configuration.get("v") == Some("Const")).unwrap();
        let inactive = csp.component("v=Bool/mem").unwrap();
        assert_eq!(const_sol.assignment.get(inactive.var), 0);
        for &b in inactive.bits.properties.iter().chain(&inactive.bits.provides) {
            assert_eq!(const_sol.assignment.get(b), 0);
        }
        assert!(check_assignment(&csp, &const_sol.assignment).unwrap());
        assert_eq!(const_sol.configuration.len(), 1);
    }

    #[test]
    fn malformed_assignment() {
        let csp = csp(LIB, "problem P { requires var v; }");
        assert_eq!(
            check_assignment(&csp, &Assignment::new(vec![1])),
            Err(MalformedAssignment {
                expected: csp.vars.len(),
                found: 1
            })
        );
    }

    #[test]
    fn limit_one_matches_first() {
        let csp = csp(LIB, "problem P { requires var v; requires cons c; check c.a accepts v; }");
        let first = solve_first(&csp).unwrap();
        assert_eq!(solve_all(&csp, Some(1)), vec![first]);
    }

    #[test]
    fn backtracking_restores_the_root_state() {
        let csp = csp(LIB, "problem P { requires var v; requires var w; requires cons c;
            check c.a accepts v; check c.b accepts w; }");
        let mut solver = Solver::new(&csp, SolverOptions::default());
        solver.root_propagate().unwrap();
        let root = solver.state().snapshot();
        let sols = solver.solve(None);
        assert!(!sols.is_empty());
        assert_eq!(solver.state().level(), 0);
        assert_eq!(solver.state().snapshot(), root);
    }

    #[test]
    fn slot_bits_follow_the_owner() {
        let csp = csp(LIB, "problem P { requires cons c; }");
        for sol in solve_all(&csp, None) {
            for (s, slot) in csp.slots.iter().enumerate() {
                let owner = csp.components[slot.owner].var;
                let active = sol.assignment.get(owner) == slot.owner_code;
                let demanded: Vec<u32> = csp
                    .bits(EntityId::Slot(s))
                    .get(SetAttr::Properties)
                    .iter()
                    .map(|&b| sol.assignment.get(b))
                    .collect();
                if !active {
                    assert!(demanded.iter().all(|&b| b == 0));
                } else {
                    assert_eq!(demanded.iter().sum::<u32>(), 1);
                }
            }
        }
    }

    #[test]
    fn conflict_names_the_constraint() {
        let csp = csp(LIB, "problem P { requires var v; check {eq1, rm} subsetof v.properties; }");
        let mut state = SearchState::new(&csp);
        let err = propagate(&csp, &mut state).unwrap_err();
        let text = err.describe(&csp);
        assert!(text.contains("v.properties"), "{}", text);
        assert!(solve_first(&csp).is_none());
    }

    #[test]
    fn dynamic_order_finds_the_same_solution_set() {
        let csp = csp(LIB, "problem P { requires var v; requires var w; requires cons c;
            check c.a accepts v; check c.b accepts w; }");
        let mut a: Vec<_> = solve_all(&csp, None).into_iter().map(|s| s.configuration).collect();
        let mut b: Vec<_> = solve_all_with(&csp, None, SolverOptions { dynamic_order: true })
            .into_iter()
            .map(|s| s.configuration)
            .collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }
}
