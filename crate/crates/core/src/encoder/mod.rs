//! Compiles a validated library and problem into a [`ConfigCsp`].
//!
//! Every requirement path becomes an integer variable over the codes of the
//! templates able to fill it. Each such variable, and each instantiated
//! template parameter, owns two Boolean arrays: one bit per known property
//! and one per known facility. Bits are tied to the implementation choice in
//! both directions, so an assigned component carries exactly its template's
//! sets. Checks become bit obligations; an obligation that only applies
//! under some implementation choices is lowered to a channelling variable
//! reified to the guard plus an implication from the channel to the bit.

mod model;
mod order;
mod symbols;

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::adl::{Check, CheckShape, ComponentLibrary, EntRef, ProblemSpec, SetAttr, Template};

pub use model::{
    BitArrays, ComponentVar, ConfigCsp, Constraint, ConstraintKind, CspVar, EntityId, Literal,
    ParamSlot, ParentLink, SearchOrder, VarId, VarKind,
};
pub use order::{set_search_order, set_search_order_by_name, OrderError};
pub use symbols::{build_symbols, Interner, SymbolTable, INACTIVE};

pub const DEFAULT_DEPTH_LIMIT: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("requirement '{path}' is nested deeper than the depth limit {limit}")]
    DepthExceeded { path: String, limit: usize },
    #[error("depth limit must be at least 1")]
    InvalidDepth,
}

/// Templates providing `facility`, in declaration order.
pub fn candidate_implementations<'a>(
    library: &'a ComponentLibrary,
    facility: &str,
) -> Vec<&'a Template> {
    library
        .templates
        .iter()
        .filter(|t| t.provides_facility(facility))
        .collect()
}

fn symbols_for(library: &ComponentLibrary, problem: &ProblemSpec) -> SymbolTable {
    let mut symbols = build_symbols(library);
    symbols.add_problem_names(problem);
    symbols
}

fn template_of<'a>(library: &'a ComponentLibrary, symbols: &SymbolTable, code: u32) -> &'a Template {
    let name = symbols.implementation(code).expect("valid implementation code");
    library.template(name).expect("symbol table built from this library")
}

fn expand_with(
    library: &ComponentLibrary,
    problem: &ProblemSpec,
    symbols: &SymbolTable,
    depth_limit: usize,
) -> Result<Vec<ComponentVar>, EncodeError> {
    if depth_limit == 0 {
        return Err(EncodeError::InvalidDepth);
    }
    let codes_for = |facility: &str| -> Vec<u32> {
        candidate_implementations(library, facility)
            .iter()
            .map(|t| symbols.code(t.name.as_str()).unwrap())
            .collect()
    };
    let mut vars: Vec<ComponentVar> = problem
        .requires
        .iter()
        .enumerate()
        .map(|(i, r)| ComponentVar {
            path: r.name.name.clone(),
            facility: r.facility.name.clone(),
            var: VarId(i),
            domain: codes_for(r.facility.as_str()),
            bits: BitArrays::default(),
            prerequisite: Vec::new(),
            parent: None,
            depth: 1,
        })
        .collect();

    // breadth first: parents always precede their children
    let mut next = 0;
    while next < vars.len() {
        let parent = vars[next].clone();
        for code in parent.candidates() {
            let template = template_of(library, symbols, code);
            for req in &template.requires {
                let path = format!("{}={}/{}", parent.path, template.name, req.name);
                if parent.depth + 1 > depth_limit {
                    return Err(EncodeError::DepthExceeded {
                        path,
                        limit: depth_limit,
                    });
                }
                let mut prerequisite = parent.prerequisite.clone();
                prerequisite.push(Literal::new(parent.var, code));
                let mut domain = vec![INACTIVE];
                domain.extend(codes_for(req.facility.as_str()));
                let id = VarId(vars.len());
                vars.push(ComponentVar {
                    path,
                    facility: req.facility.name.clone(),
                    var: id,
                    domain,
                    bits: BitArrays::default(),
                    prerequisite,
                    parent: Some(ParentLink {
                        component: next,
                        code,
                        requirement: req.name.name.clone(),
                    }),
                    depth: parent.depth + 1,
                });
            }
        }
        next += 1;
    }
    Ok(vars)
}

/// One component variable per requirement path, breadth first from the
/// problem's requirements. A conditional variable's prerequisite is its
/// parent's prerequisite plus the parent's implementation choice. The
/// returned variables have no bit arrays yet; [`encode`] allocates them.
pub fn expand(
    library: &ComponentLibrary,
    problem: &ProblemSpec,
    depth_limit: usize,
) -> Result<Vec<ComponentVar>, EncodeError> {
    let symbols = symbols_for(library, problem);
    expand_with(library, problem, &symbols, depth_limit)
}

/// Where a check is evaluated.
#[derive(Clone, Copy)]
enum Scope {
    Problem,
    Template { component: usize, code: u32 },
}

struct Encoder<'a> {
    library: &'a ComponentLibrary,
    problem: &'a ProblemSpec,
    symbols: SymbolTable,
    vars: Vec<CspVar>,
    components: Vec<ComponentVar>,
    slots: Vec<ParamSlot>,
    channels: Vec<VarId>,
    constraints: Vec<Constraint>,
    top_level: HashMap<String, usize>,
    children: HashMap<(usize, u32, String), usize>,
    slot_index: HashMap<(usize, u32, String), usize>,
    /// Per slot: bits its owner template demands, as (properties, provides) indices.
    slot_demands: Vec<(HashSet<usize>, HashSet<usize>)>,
}

impl<'a> Encoder<'a> {
    fn template(&self, code: u32) -> &'a Template {
        template_of(self.library, &self.symbols, code)
    }

    fn new_var(&mut self, name: String, domain: Vec<u32>, kind: VarKind) -> VarId {
        let id = VarId(self.vars.len());
        self.vars.push(CspVar { name, domain, kind });
        id
    }

    fn alloc_bits(&mut self, entity: EntityId, path: &str) -> BitArrays {
        let mut arrays = BitArrays::default();
        for attr in [SetAttr::Properties, SetAttr::Provides] {
            let names = self.symbols.names(attr).names().to_vec();
            for (index, name) in names.iter().enumerate() {
                let id = self.new_var(
                    format!("{}.{}[{}]", path, attr.keyword(), name),
                    vec![0, 1],
                    VarKind::Bit {
                        entity,
                        attr,
                        index,
                    },
                );
                match attr {
                    SetAttr::Properties => arrays.properties.push(id),
                    SetAttr::Provides => arrays.provides.push(id),
                }
            }
        }
        arrays
    }

    fn push(&mut self, kind: ConstraintKind, origin: impl Into<String>) {
        self.constraints.push(Constraint {
            kind,
            origin: origin.into(),
        });
    }

    fn bits(&self, entity: EntityId) -> &BitArrays {
        match entity {
            EntityId::Component(i) => &self.components[i].bits,
            EntityId::Slot(i) => &self.slots[i].bits,
        }
    }

    /// False when the bit is zero in every solution, so obligations
    /// conditioned on it can be dropped.
    fn may_have(&self, entity: EntityId, attr: SetAttr, index: usize) -> bool {
        match entity {
            EntityId::Component(i) => {
                let name = self.symbols.names(attr).name(index);
                self.components[i].candidates().any(|code| {
                    let t = self.template(code);
                    match attr {
                        SetAttr::Properties => t.has_property(name),
                        SetAttr::Provides => t.provides_facility(name),
                    }
                })
            }
            EntityId::Slot(s) => {
                let (props, provs) = &self.slot_demands[s];
                match attr {
                    SetAttr::Properties => props.contains(&index),
                    SetAttr::Provides => provs.contains(&index),
                }
            }
        }
    }

    fn guard(&self, scope: Scope) -> Vec<Literal> {
        match scope {
            Scope::Problem => Vec::new(),
            Scope::Template { component, code } => {
                let c = &self.components[component];
                let mut g = c.prerequisite.clone();
                g.push(Literal::new(c.var, code));
                g
            }
        }
    }

    /// Every entity `entref` can denote from `scope`, each with the extra
    /// implementation choices that make it so.
    fn resolve(&self, scope: Scope, entref: &EntRef) -> Vec<(Vec<Literal>, EntityId)> {
        let head = entref.head().as_str();
        let first = match scope {
            Scope::Problem => self.top_level.get(head).map(|&i| EntityId::Component(i)),
            Scope::Template { component, code } => self.member(component, code, head),
        };
        let mut current: Vec<(Vec<Literal>, EntityId)> = first.into_iter().map(|e| (Vec::new(), e)).collect();
        for seg in &entref.segments[1..] {
            let mut next = Vec::new();
            for (lits, entity) in current {
                // parameters have no members
                let EntityId::Component(i) = entity else { continue };
                let c = &self.components[i];
                for code in c.candidates() {
                    if let Some(member) = self.member(i, code, seg.as_str()) {
                        let mut l = lits.clone();
                        l.push(Literal::new(c.var, code));
                        next.push((l, member));
                    }
                }
            }
            current = next;
        }
        current
    }

    /// Parameter or sub-requirement `name` of component `i` implemented by `code`.
    fn member(&self, i: usize, code: u32, name: &str) -> Option<EntityId> {
        let key = (i, code, name.to_string());
        if let Some(&s) = self.slot_index.get(&key) {
            return Some(EntityId::Slot(s));
        }
        self.children.get(&key).map(|&c| EntityId::Component(c))
    }

    fn obligate(&mut self, guard: Vec<Literal>, bit: VarId, value: u32, origin: &str) {
        if guard.is_empty() {
            self.push(ConstraintKind::ForceBit { bit, value }, origin);
            return;
        }
        let k = self.channels.len();
        let channel = self.new_var(format!("channel[{}]", k), vec![0, 1], VarKind::Channel(k));
        self.channels.push(channel);
        self.push(ConstraintKind::ChannelReify { channel, guard }, origin);
        self.push(ConstraintKind::ChannelImply { channel, bit, value }, origin);
    }

    fn encode_check(&mut self, scope: Scope, check: &Check) {
        let Some(shape) = check.shape() else { return };
        let origin = match scope {
            Scope::Problem => format!("problem {}: check {}", self.problem.name, check),
            Scope::Template { component, code } => format!(
                "{}={}: check {}",
                self.components[component].path,
                self.template(code).name,
                check
            ),
        };
        let base = self.guard(scope);
        match shape {
            CheckShape::Require {
                items,
                entity,
                attr,
            } => {
                for (lits, e) in self.resolve(scope, entity) {
                    let guard: Vec<_> = base.iter().chain(&lits).copied().collect();
                    for item in items {
                        let index = self.symbols.names(attr).get(item.as_str()).expect("interned");
                        let bit = self.bits(e).get(attr)[index];
                        self.obligate(guard.clone(), bit, 1, &origin);
                    }
                }
            }
            CheckShape::Restrict {
                entity,
                attr,
                items,
            } => {
                let allowed: HashSet<&str> = items.iter().map(|i| i.as_str()).collect();
                for (lits, e) in self.resolve(scope, entity) {
                    let guard: Vec<_> = base.iter().chain(&lits).copied().collect();
                    for index in 0..self.symbols.names(attr).len() {
                        let name = self.symbols.names(attr).name(index);
                        if allowed.contains(name) || !self.may_have(e, attr, index) {
                            continue;
                        }
                        let bit = self.bits(e).get(attr)[index];
                        self.obligate(guard.clone(), bit, 0, &origin);
                    }
                }
            }
            CheckShape::Accepts {
                slot,
                candidate,
                with,
            } => {
                let granted: HashSet<&str> = with.iter().map(|i| i.as_str()).collect();
                let slots = self.resolve(scope, slot);
                let candidates = self.resolve(scope, candidate);
                for (slot_lits, s) in &slots {
                    for (cand_lits, k) in &candidates {
                        let guard: Vec<_> = base
                            .iter()
                            .chain(slot_lits)
                            .chain(cand_lits)
                            .copied()
                            .collect();
                        for attr in [SetAttr::Properties, SetAttr::Provides] {
                            for index in 0..self.symbols.names(attr).len() {
                                let name = self.symbols.names(attr).name(index);
                                if attr == SetAttr::Properties && granted.contains(name) {
                                    continue;
                                }
                                if !self.may_have(*s, attr, index) {
                                    continue;
                                }
                                let demanded = self.bits(*s).get(attr)[index];
                                let target = self.bits(*k).get(attr)[index];
                                let mut g = guard.clone();
                                g.push(Literal::new(demanded, 1));
                                self.obligate(g, target, 1, &origin);
                            }
                        }
                    }
                }
            }
        }
    }

    /// Bits are exact: 1 iff the chosen implementation has the property or
    /// facility. Inactive components (code 0) have all bits 0.
    fn encode_component_bits(&mut self, i: usize) {
        let c = self.components[i].clone();
        for attr in [SetAttr::Properties, SetAttr::Provides] {
            for (index, &bit) in c.bits.get(attr).iter().enumerate() {
                let name = self.symbols.names(attr).name(index);
                let codes: Vec<u32> = c
                    .candidates()
                    .filter(|&code| {
                        let t = self.template(code);
                        match attr {
                            SetAttr::Properties => t.has_property(name),
                            SetAttr::Provides => t.provides_facility(name),
                        }
                    })
                    .collect();
                let origin = format!("{}: {} of the chosen implementation", c.path, attr.keyword());
                if codes.is_empty() {
                    self.push(ConstraintKind::ForceBit { bit, value: 0 }, origin);
                } else {
                    self.push(
                        ConstraintKind::IffMembership {
                            bit,
                            var: c.var,
                            codes,
                        },
                        origin,
                    );
                }
            }
        }
        if c.is_conditional() {
            self.push(
                ConstraintKind::SentinelLink {
                    var: c.var,
                    prerequisite: c.prerequisite.clone(),
                },
                format!("{}: active exactly when its prerequisites hold", c.path),
            );
        }
    }

    fn encode_slot_bits(&mut self, s: usize) {
        let slot = self.slots[s].clone();
        let owner = self.components[slot.owner].var;
        for attr in [SetAttr::Properties, SetAttr::Provides] {
            for (index, &bit) in slot.bits.get(attr).iter().enumerate() {
                let origin = format!("{}: {} demanded of the parameter", slot.path, attr.keyword());
                if self.may_have(EntityId::Slot(s), attr, index) {
                    self.push(
                        ConstraintKind::IffMembership {
                            bit,
                            var: owner,
                            codes: vec![slot.owner_code],
                        },
                        origin,
                    );
                } else {
                    self.push(ConstraintKind::ForceBit { bit, value: 0 }, origin);
                }
            }
        }
    }
}

/// What `template` demands of its parameter `param`: the union of the
/// literal lists of its `{..} subsetof param.attr` checks.
fn parameter_demands(
    template: &Template,
    param: &str,
    symbols: &SymbolTable,
) -> (HashSet<usize>, HashSet<usize>) {
    let mut props = HashSet::new();
    let mut provs = HashSet::new();
    for check in &template.checks {
        if let Some(CheckShape::Require {
            items,
            entity,
            attr,
        }) = check.shape()
        {
            if entity.segments.len() == 1 && entity.head().as_str() == param {
                for item in items {
                    let index = symbols.names(attr).get(item.as_str()).expect("interned");
                    match attr {
                        SetAttr::Properties => props.insert(index),
                        SetAttr::Provides => provs.insert(index),
                    };
                }
            }
        }
    }
    (props, provs)
}

/// Compiles a validated library and problem into a configuration CSP.
///
/// The inputs must have passed [`crate::adl::validate`] without errors.
pub fn encode(
    library: &ComponentLibrary,
    problem: &ProblemSpec,
    depth_limit: usize,
) -> Result<ConfigCsp, EncodeError> {
    let symbols = symbols_for(library, problem);
    let components = expand_with(library, problem, &symbols, depth_limit)?;

    let mut enc = Encoder {
        library,
        problem,
        symbols,
        vars: Vec::new(),
        components,
        slots: Vec::new(),
        channels: Vec::new(),
        constraints: Vec::new(),
        top_level: HashMap::new(),
        children: HashMap::new(),
        slot_index: HashMap::new(),
        slot_demands: Vec::new(),
    };

    for i in 0..enc.components.len() {
        let c = &enc.components[i];
        let (name, domain) = (c.path.clone(), c.domain.clone());
        match &c.parent {
            None => {
                enc.top_level.insert(c.path.clone(), i);
            }
            Some(link) => {
                enc.children
                    .insert((link.component, link.code, link.requirement.clone()), i);
            }
        }
        enc.new_var(name, domain, VarKind::Component(i));
    }

    for i in 0..enc.components.len() {
        let codes: Vec<u32> = enc.components[i].candidates().collect();
        for code in codes {
            let template = enc.template(code);
            for param in &template.params {
                let s = enc.slots.len();
                enc.slot_index.insert((i, code, param.name.clone()), s);
                enc.slot_demands
                    .push(parameter_demands(template, param.as_str(), &enc.symbols));
                enc.slots.push(ParamSlot {
                    path: format!("{}={}/{}", enc.components[i].path, template.name, param),
                    owner: i,
                    owner_code: code,
                    param: param.name.clone(),
                    bits: BitArrays::default(),
                });
            }
        }
    }

    for i in 0..enc.components.len() {
        let path = enc.components[i].path.clone();
        enc.components[i].bits = enc.alloc_bits(EntityId::Component(i), &path);
    }
    for s in 0..enc.slots.len() {
        let path = enc.slots[s].path.clone();
        enc.slots[s].bits = enc.alloc_bits(EntityId::Slot(s), &path);
    }

    for i in 0..enc.components.len() {
        enc.encode_component_bits(i);
    }
    for s in 0..enc.slots.len() {
        enc.encode_slot_bits(s);
    }

    for check in &problem.checks {
        enc.encode_check(Scope::Problem, check);
    }
    for i in 0..enc.components.len() {
        let codes: Vec<u32> = enc.components[i].candidates().collect();
        for code in codes {
            let template = enc.template(code);
            for check in &template.checks {
                enc.encode_check(Scope::Template { component: i, code }, check);
            }
        }
    }

    let search = SearchOrder {
        vars: (0..enc.components.len()).collect(),
        values: enc.components.iter().map(|c| c.domain.clone()).collect(),
    };
    Ok(ConfigCsp {
        symbols: enc.symbols,
        vars: enc.vars,
        components: enc.components,
        slots: enc.slots,
        channels: enc.channels,
        constraints: enc.constraints,
        search,
    })
}
