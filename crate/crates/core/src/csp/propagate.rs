//! Domain-consistent propagators for each constraint kind, run to fixpoint
//! with a constraint queue.

use std::collections::VecDeque;

use thiserror::Error;

use crate::encoder::{ConfigCsp, ConstraintKind, Literal, VarId};

use super::state::{SearchState, Wipeout};

/// Propagation emptied a domain while running constraint `constraint`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("conflict in constraint #{constraint}")]
pub struct Conflict {
    pub constraint: usize,
}

impl Conflict {
    /// The violated constraint with its guard chain and origin.
    pub fn describe(&self, csp: &ConfigCsp) -> String {
        csp.describe_constraint(self.constraint)
    }
}

struct Ctx<'s> {
    state: &'s mut SearchState,
    changed: &'s mut Vec<VarId>,
    constraint: usize,
}

impl Ctx<'_> {
    fn conflict(&self) -> Conflict {
        Conflict {
            constraint: self.constraint,
        }
    }

    fn note(&mut self, var: VarId, r: Result<bool, Wipeout>) -> Result<(), Conflict> {
        match r {
            Ok(true) => {
                self.changed.push(var);
                Ok(())
            }
            Ok(false) => Ok(()),
            Err(Wipeout) => Err(self.conflict()),
        }
    }

    fn assign(&mut self, var: VarId, value: u32) -> Result<(), Conflict> {
        let r = self.state.assign(var, value);
        self.note(var, r)
    }

    fn remove(&mut self, var: VarId, value: u32) -> Result<(), Conflict> {
        let r = self.state.remove(var, value);
        self.note(var, r)
    }

    /// `Some(true)` entailed, `Some(false)` disentailed, `None` open.
    fn status(&self, lit: Literal) -> Option<bool> {
        if !self.state.contains(lit.var, lit.value) {
            Some(false)
        } else if self.state.fixed(lit.var).is_some() {
            Some(true)
        } else {
            None
        }
    }

    /// Truth of a conjunction: `Some(false)` if a literal is false,
    /// `Some(true)` if all are true, otherwise the open literals.
    fn conjunction(&self, lits: &[Literal]) -> Result<bool, Vec<Literal>> {
        let mut open = Vec::new();
        for &lit in lits {
            match self.status(lit) {
                Some(false) => return Ok(false),
                Some(true) => {}
                None => open.push(lit),
            }
        }
        if open.is_empty() {
            Ok(true)
        } else {
            Err(open)
        }
    }

    /// Enforces `flag <-> AND(lits)` where `flag` is given as a literal
    /// "true side" and a literal "false side" of the same variable.
    fn reify_conjunction(
        &mut self,
        lits: &[Literal],
        when_true: Literal,
        when_false: Literal,
    ) -> Result<(), Conflict> {
        match self.conjunction(lits) {
            Ok(true) => self.make(when_true)?,
            Ok(false) => self.make(when_false)?,
            Err(open) => {
                if self.status(when_true) == Some(true) {
                    for lit in open {
                        self.assign(lit.var, lit.value)?;
                    }
                } else if self.status(when_false) == Some(true) && open.len() == 1 {
                    self.remove(open[0].var, open[0].value)?;
                }
            }
        }
        Ok(())
    }

    fn make(&mut self, lit: Literal) -> Result<(), Conflict> {
        self.assign(lit.var, lit.value)
    }
}

fn run(csp: &ConfigCsp, index: usize, ctx: &mut Ctx<'_>) -> Result<(), Conflict> {
    match &csp.constraints[index].kind {
        ConstraintKind::IffMembership { bit, var, codes } => {
            match ctx.state.fixed(*bit) {
                Some(1) => {
                    let outside: Vec<u32> = ctx.state.values(*var).filter(|v| !codes.contains(v)).collect();
                    for v in outside {
                        ctx.remove(*var, v)?;
                    }
                }
                Some(_) => {
                    for &c in codes {
                        ctx.remove(*var, c)?;
                    }
                }
                None => {
                    let mut inside = false;
                    let mut outside = false;
                    for v in ctx.state.values(*var) {
                        if codes.contains(&v) {
                            inside = true;
                        } else {
                            outside = true;
                        }
                    }
                    match (inside, outside) {
                        (true, false) => ctx.assign(*bit, 1)?,
                        (false, true) => ctx.assign(*bit, 0)?,
                        _ => {}
                    }
                }
            }
            Ok(())
        }
        ConstraintKind::ForceBit { bit, value } => ctx.assign(*bit, *value),
        ConstraintKind::ChannelReify { channel, guard } => ctx.reify_conjunction(
            guard,
            Literal::new(*channel, 1),
            Literal::new(*channel, 0),
        ),
        ConstraintKind::ChannelImply {
            channel,
            bit,
            value,
        } => {
            if ctx.state.fixed(*channel) == Some(1) {
                ctx.assign(*bit, *value)?;
            }
            if !ctx.state.contains(*bit, *value) {
                ctx.assign(*channel, 0)?;
            }
            Ok(())
        }
        ConstraintKind::SentinelLink { var, prerequisite } => {
            // var != 0 <-> AND(prerequisite)
            match ctx.conjunction(prerequisite) {
                Ok(true) => ctx.remove(*var, 0),
                Ok(false) => ctx.assign(*var, 0),
                Err(open) => {
                    if !ctx.state.contains(*var, 0) {
                        for lit in open {
                            ctx.assign(lit.var, lit.value)?;
                        }
                    } else if ctx.state.fixed(*var) == Some(0) && open.len() == 1 {
                        ctx.remove(open[0].var, open[0].value)?;
                    }
                    Ok(())
                }
            }
        }
    }
}

/// Variable -> constraints over it, plus the work queue.
#[derive(Debug, Clone)]
pub struct Propagator {
    watches: Vec<Vec<usize>>,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    changed: Vec<VarId>,
}

impl Propagator {
    pub fn new(csp: &ConfigCsp) -> Self {
        let mut watches = vec![Vec::new(); csp.vars.len()];
        for (i, c) in csp.constraints.iter().enumerate() {
            let mut scope = c.kind.scope();
            scope.sort();
            scope.dedup();
            for v in scope {
                watches[v.0].push(i);
            }
        }
        Propagator {
            watches,
            queue: VecDeque::new(),
            queued: vec![false; csp.constraints.len()],
            changed: Vec::new(),
        }
    }

    fn enqueue(&mut self, c: usize) {
        if !self.queued[c] {
            self.queued[c] = true;
            self.queue.push_back(c);
        }
    }

    fn clear(&mut self) {
        for c in self.queue.drain(..) {
            self.queued[c] = false;
        }
        self.changed.clear();
    }

    /// Runs every constraint once, then anything touched, until fixpoint.
    pub fn propagate_all(&mut self, csp: &ConfigCsp, state: &mut SearchState) -> Result<(), Conflict> {
        for c in 0..csp.constraints.len() {
            self.enqueue(c);
        }
        self.fixpoint(csp, state)
    }

    /// Propagates the consequences of changes to `vars`.
    pub fn propagate_from(
        &mut self,
        csp: &ConfigCsp,
        state: &mut SearchState,
        vars: &[VarId],
    ) -> Result<(), Conflict> {
        for &v in vars {
            for i in 0..self.watches[v.0].len() {
                let c = self.watches[v.0][i];
                self.enqueue(c);
            }
        }
        self.fixpoint(csp, state)
    }

    fn fixpoint(&mut self, csp: &ConfigCsp, state: &mut SearchState) -> Result<(), Conflict> {
        while let Some(c) = self.queue.pop_front() {
            self.queued[c] = false;
            let mut changed = std::mem::take(&mut self.changed);
            let result = run(
                csp,
                c,
                &mut Ctx {
                    state,
                    changed: &mut changed,
                    constraint: c,
                },
            );
            if let Err(conflict) = result {
                self.changed = changed;
                self.clear();
                return Err(conflict);
            }
            for &v in &changed {
                for i in 0..self.watches[v.0].len() {
                    let w = self.watches[v.0][i];
                    self.enqueue(w);
                }
            }
            changed.clear();
            self.changed = changed;
        }
        Ok(())
    }
}

/// Prunes `state` to the propagation fixpoint of every constraint.
pub fn propagate(csp: &ConfigCsp, state: &mut SearchState) -> Result<(), Conflict> {
    Propagator::new(csp).propagate_all(csp, state)
}
