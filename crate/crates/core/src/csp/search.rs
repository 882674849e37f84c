//! Chronological backtracking over the compiled CSP.

use crate::encoder::{ConfigCsp, VarId, VarKind};

use super::propagate::{Conflict, Propagator};
use super::state::SearchState;
use super::Assignment;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverOptions {
    /// Branch on the component variable with the smallest domain instead of
    /// following the CSP's static search order.
    pub dynamic_order: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub failures: u64,
    pub solutions: u64,
}

pub struct Solver<'a> {
    csp: &'a ConfigCsp,
    state: SearchState,
    propagator: Propagator,
    options: SolverOptions,
    stats: SearchStats,
    root: Option<Result<(), Conflict>>,
}

impl<'a> Solver<'a> {
    pub fn new(csp: &'a ConfigCsp, options: SolverOptions) -> Self {
        Solver {
            csp,
            state: SearchState::new(csp),
            propagator: Propagator::new(csp),
            options,
            stats: SearchStats::default(),
            root: None,
        }
    }

    /// Propagates at the root once; later calls return the cached outcome.
    pub fn root_propagate(&mut self) -> Result<(), Conflict> {
        if let Some(r) = self.root {
            return r;
        }
        let r = self.propagator.propagate_all(self.csp, &mut self.state);
        self.root = Some(r);
        r
    }

    pub fn state(&self) -> &SearchState {
        &self.state
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    /// Solutions in search order, at most `limit` of them.
    pub fn solve(&mut self, limit: Option<usize>) -> Vec<Assignment> {
        let mut out = Vec::new();
        if limit == Some(0) || self.root_propagate().is_err() {
            return out;
        }
        self.search(&mut out, limit);
        out
    }

    fn select(&self) -> Option<VarId> {
        let csp = self.csp;
        let open = |v: VarId| self.state.fixed(v).is_none();
        let component = if self.options.dynamic_order {
            csp.search
                .vars
                .iter()
                .map(|&i| csp.components[i].var)
                .filter(|&v| open(v))
                .min_by_key(|&v| self.state.size(v))
        } else {
            csp.search
                .vars
                .iter()
                .map(|&i| csp.components[i].var)
                .find(|&v| open(v))
        };
        // Bits and channels are functionally determined once every component
        // is fixed; branching on them is a fallback that should never fire.
        component.or_else(|| (0..csp.vars.len()).map(VarId).find(|&v| open(v)))
    }

    fn value_order(&self, var: VarId) -> Vec<u32> {
        let preferred = match self.csp.vars[var.0].kind {
            VarKind::Component(i) => self.csp.search.values[i].clone(),
            _ => self.csp.vars[var.0].domain.clone(),
        };
        preferred
            .into_iter()
            .filter(|&v| self.state.contains(var, v))
            .collect()
    }

    /// Returns true once `limit` solutions have been collected.
    fn search(&mut self, out: &mut Vec<Assignment>, limit: Option<usize>) -> bool {
        self.stats.nodes += 1;
        let Some(var) = self.select() else {
            let values = (0..self.state.var_count())
                .map(|v| self.state.fixed(VarId(v)).expect("all variables fixed"))
                .collect();
            out.push(Assignment::new(values));
            self.stats.solutions += 1;
            return limit.is_some_and(|l| out.len() >= l);
        };
        for value in self.value_order(var) {
            self.state.push_level();
            let ok = self.state.assign(var, value).is_ok()
                && self
                    .propagator
                    .propagate_from(self.csp, &mut self.state, &[var])
                    .is_ok();
            let stop = if ok {
                self.search(out, limit)
            } else {
                self.stats.failures += 1;
                false
            };
            self.state.pop_level();
            if stop {
                return true;
            }
        }
        false
    }
}
