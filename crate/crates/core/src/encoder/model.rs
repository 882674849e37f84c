//! The compiled configuration problem.

use std::fmt;

use crate::adl::SetAttr;

use super::symbols::SymbolTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

/// Something that owns a pair of bit arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntityId {
    Component(usize),
    Slot(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarKind {
    /// Implementation choice of `components[i]`.
    Component(usize),
    /// Membership bit `index` of an entity's property or provides set.
    Bit {
        entity: EntityId,
        attr: SetAttr,
        index: usize,
    },
    /// Channelling variable `channels[i]`.
    Channel(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CspVar {
    pub name: String,
    /// Sorted ascending.
    pub domain: Vec<u32>,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitArrays {
    pub properties: Vec<VarId>,
    pub provides: Vec<VarId>,
}

impl BitArrays {
    pub fn get(&self, attr: SetAttr) -> &[VarId] {
        match attr {
            SetAttr::Properties => &self.properties,
            SetAttr::Provides => &self.provides,
        }
    }
}

/// `var = value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub var: VarId,
    pub value: u32,
}

impl Literal {
    pub fn new(var: VarId, value: u32) -> Self {
        Literal { var, value }
    }
}

/// Where a conditional component hangs in the requirement tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParentLink {
    pub component: usize,
    pub code: u32,
    pub requirement: String,
}

/// One requirement path, i.e. one integer variable choosing an implementation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentVar {
    /// `name` at the top level, `<parent-path>=<Impl>/<name>` below it.
    pub path: String,
    pub facility: String,
    pub var: VarId,
    /// Candidate codes, plus the inactive code 0 for conditional variables.
    pub domain: Vec<u32>,
    pub bits: BitArrays,
    /// Conjunction of choices that must hold for this variable to be active.
    pub prerequisite: Vec<Literal>,
    pub parent: Option<ParentLink>,
    /// 1 for problem requirements.
    pub depth: usize,
}

impl ComponentVar {
    pub fn is_conditional(&self) -> bool {
        !self.prerequisite.is_empty()
    }

    /// Candidate codes without the sentinel.
    pub fn candidates(&self) -> impl Iterator<Item = u32> + '_ {
        self.domain.iter().copied().filter(|&c| c != 0)
    }
}

/// A template parameter as instantiated by one implementation choice. Its
/// bits hold the properties and facilities the implementation demands of
/// whatever is bound to the parameter; all zero while the owner has a
/// different implementation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamSlot {
    /// `<owner-path>=<Impl>/<param>`
    pub path: String,
    pub owner: usize,
    pub owner_code: u32,
    pub param: String,
    pub bits: BitArrays,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintKind {
    /// `bit = 1` iff `var` takes one of `codes`.
    IffMembership {
        bit: VarId,
        var: VarId,
        codes: Vec<u32>,
    },
    /// Unconditionally `bit = value`.
    ForceBit { bit: VarId, value: u32 },
    /// `channel = 1` iff every literal of `guard` holds.
    ChannelReify { channel: VarId, guard: Vec<Literal> },
    /// `channel = 1` implies `bit = value`.
    ChannelImply {
        channel: VarId,
        bit: VarId,
        value: u32,
    },
    /// `var = 0` iff some literal of `prerequisite` fails.
    SentinelLink {
        var: VarId,
        prerequisite: Vec<Literal>,
    },
}

impl ConstraintKind {
    pub fn scope(&self) -> Vec<VarId> {
        match self {
            ConstraintKind::IffMembership { bit, var, .. } => vec![*bit, *var],
            ConstraintKind::ForceBit { bit, .. } => vec![*bit],
            ConstraintKind::ChannelReify { channel, guard } => std::iter::once(*channel)
                .chain(guard.iter().map(|l| l.var))
                .collect(),
            ConstraintKind::ChannelImply { channel, bit, .. } => vec![*channel, *bit],
            ConstraintKind::SentinelLink { var, prerequisite } => std::iter::once(*var)
                .chain(prerequisite.iter().map(|l| l.var))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub kind: ConstraintKind,
    /// What produced the constraint, for conflict reports.
    pub origin: String,
}

/// Static branching order over component variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOrder {
    /// Component indices, each exactly once.
    pub vars: Vec<usize>,
    /// Per component index: its whole domain, most preferred first.
    pub values: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigCsp {
    pub symbols: SymbolTable,
    /// Component variables occupy ids `0..components.len()`.
    pub vars: Vec<CspVar>,
    pub components: Vec<ComponentVar>,
    pub slots: Vec<ParamSlot>,
    pub channels: Vec<VarId>,
    pub constraints: Vec<Constraint>,
    pub search: SearchOrder,
}

impl ConfigCsp {
    pub fn component(&self, path: &str) -> Option<&ComponentVar> {
        self.component_index(path).map(|i| &self.components[i])
    }

    pub fn component_index(&self, path: &str) -> Option<usize> {
        self.components.iter().position(|c| c.path == path)
    }

    pub fn var(&self, id: VarId) -> &CspVar {
        &self.vars[id.0]
    }

    pub fn bits(&self, entity: EntityId) -> &BitArrays {
        match entity {
            EntityId::Component(i) => &self.components[i].bits,
            EntityId::Slot(i) => &self.slots[i].bits,
        }
    }

    /// Renders a literal for humans: `pvw=BoolVar` or `pvw.properties[gac]=1`.
    pub fn describe_literal(&self, lit: Literal) -> String {
        let var = self.var(lit.var);
        match var.kind {
            VarKind::Component(_) => match self.symbols.implementation(lit.value) {
                Some(name) => format!("{}={}", var.name, name),
                None => format!("{}=inactive", var.name),
            },
            _ => format!("{}={}", var.name, lit.value),
        }
    }

    pub fn describe_constraint(&self, index: usize) -> String {
        let c = &self.constraints[index];
        let lits = |g: &[Literal]| {
            g.iter()
                .map(|&l| self.describe_literal(l))
                .collect::<Vec<_>>()
                .join(" & ")
        };
        let body = match &c.kind {
            ConstraintKind::IffMembership { bit, var, codes } => {
                let names: Vec<_> = codes
                    .iter()
                    .map(|&code| self.symbols.implementation(code).unwrap_or("?"))
                    .collect();
                format!(
                    "{} <-> {} in {{{}}}",
                    self.var(*bit).name,
                    self.var(*var).name,
                    names.join(", ")
                )
            }
            ConstraintKind::ForceBit { bit, value } => {
                format!("{} = {}", self.var(*bit).name, value)
            }
            ConstraintKind::ChannelReify { channel, guard } => {
                format!("{} <-> ({})", self.var(*channel).name, lits(guard))
            }
            ConstraintKind::ChannelImply {
                channel,
                bit,
                value,
            } => format!(
                "{} -> {} = {}",
                self.var(*channel).name,
                self.var(*bit).name,
                value
            ),
            ConstraintKind::SentinelLink { var, prerequisite } => format!(
                "{} active <-> ({})",
                self.var(*var).name,
                lits(prerequisite)
            ),
        };
        format!("#{} {} [{}]", index, body, c.origin)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}
