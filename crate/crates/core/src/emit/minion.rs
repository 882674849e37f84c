//! Minion 3 model text.
//!
//! Naming: component `i` is `v{i}` with bit arrays `v{i}_prop` and
//! `v{i}_prov`; parameter slot `j` owns `s{j}_prop` and `s{j}_prov`; channel
//! `k` is `ch{k}`. Each sentinel link gets an auxiliary 0/1 variable `sn{k}`
//! that is reified both to the prerequisite conjunction and to the variable
//! being non-zero.

use std::fmt::Write;

use thiserror::Error;

use crate::adl::SetAttr;
use crate::encoder::{ConfigCsp, ConstraintKind, EntityId, Literal, VarId, VarKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("model has no variables")]
    EmptyModel,
}

fn array_name(entity: EntityId, attr: SetAttr) -> String {
    let (prefix, i) = match entity {
        EntityId::Component(i) => ("v", i),
        EntityId::Slot(i) => ("s", i),
    };
    let suffix = match attr {
        SetAttr::Properties => "prop",
        SetAttr::Provides => "prov",
    };
    format!("{}{}_{}", prefix, i, suffix)
}

fn name(csp: &ConfigCsp, var: VarId) -> String {
    match &csp.var(var).kind {
        VarKind::Component(i) => format!("v{}", i),
        VarKind::Bit {
            entity,
            attr,
            index,
        } => format!("{}[{}]", array_name(*entity, *attr), index),
        VarKind::Channel(k) => format!("ch{}", k),
    }
}

fn eq(csp: &ConfigCsp, lit: Literal) -> String {
    format!("eq({},{})", name(csp, lit.var), lit.value)
}

fn conjunction(csp: &ConfigCsp, lits: &[Literal]) -> String {
    let parts: Vec<String> = lits.iter().map(|&l| eq(csp, l)).collect();
    format!("watched-and({{{}}})", parts.join(","))
}

fn int_list(values: impl IntoIterator<Item = u32>) -> String {
    let parts: Vec<String> = values.into_iter().map(|v| v.to_string()).collect();
    format!("[{}]", parts.join(","))
}

fn has_holes(domain: &[u32]) -> bool {
    match (domain.first(), domain.last()) {
        (Some(&lo), Some(&hi)) => (hi - lo + 1) as usize != domain.len(),
        _ => false,
    }
}

fn entities(csp: &ConfigCsp) -> impl Iterator<Item = EntityId> + '_ {
    (0..csp.components.len())
        .map(EntityId::Component)
        .chain((0..csp.slots.len()).map(EntityId::Slot))
}

fn variables(csp: &ConfigCsp, sentinels: usize, out: &mut String) {
    out.push_str("**VARIABLES**\n");
    for (i, c) in csp.components.iter().enumerate() {
        let (lo, hi) = match (c.domain.first(), c.domain.last()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => (0, 0),
        };
        writeln!(out, "# v{} = {}", i, c.path).unwrap();
        writeln!(out, "DISCRETE v{} {{{}..{}}}", i, lo, hi).unwrap();
    }
    for entity in entities(csp) {
        if let EntityId::Slot(j) = entity {
            writeln!(out, "# s{} = {}", j, csp.slots[j].path).unwrap();
        }
        let bits = csp.bits(entity);
        for attr in [SetAttr::Properties, SetAttr::Provides] {
            let n = bits.get(attr).len();
            if n > 0 {
                writeln!(out, "DISCRETE {}[{}] {{0..1}}", array_name(entity, attr), n).unwrap();
            }
        }
    }
    for k in 0..csp.channels.len() {
        writeln!(out, "DISCRETE ch{} {{0..1}}", k).unwrap();
    }
    for k in 0..sentinels {
        writeln!(out, "DISCRETE sn{} {{0..1}}", k).unwrap();
    }
}

fn search(csp: &ConfigCsp, sentinels: usize, out: &mut String) {
    out.push_str("**SEARCH**\n");
    let mut order: Vec<String> = Vec::new();
    let mut dirs: Vec<char> = Vec::new();
    for &i in &csp.search.vars {
        let preferred = &csp.search.values[i];
        let mut ascending = preferred.clone();
        ascending.sort_unstable();
        let mut descending = ascending.clone();
        descending.reverse();
        let dir = if *preferred == ascending {
            'a'
        } else if *preferred == descending {
            'd'
        } else {
            writeln!(out, "# VALUEPREF v{} {}", i, int_list(preferred.iter().copied())).unwrap();
            'a'
        };
        order.push(format!("v{}", i));
        dirs.push(dir);
    }
    // Everything else is determined by the components; list it so that a
    // solver branching only on VARORDER still assigns it.
    for (v, var) in csp.vars.iter().enumerate() {
        if !matches!(var.kind, VarKind::Component(_)) {
            order.push(name(csp, VarId(v)));
            dirs.push('a');
        }
    }
    for k in 0..sentinels {
        order.push(format!("sn{}", k));
        dirs.push('a');
    }
    writeln!(out, "VARORDER [{}]", order.join(",")).unwrap();
    let dirs: Vec<String> = dirs.iter().map(|d| d.to_string()).collect();
    writeln!(out, "VALORDER [{}]", dirs.join(",")).unwrap();
    out.push_str("PRINT ALL\n");
}

fn constraints(csp: &ConfigCsp, out: &mut String) {
    out.push_str("**CONSTRAINTS**\n");
    for (i, c) in csp.components.iter().enumerate() {
        if c.domain.is_empty() {
            writeln!(out, "false()").unwrap();
        } else if has_holes(&c.domain) {
            writeln!(out, "w-inset(v{},{})", i, int_list(c.domain.iter().copied())).unwrap();
        }
    }
    let mut sentinel = 0;
    for (index, c) in csp.constraints.iter().enumerate() {
        writeln!(out, "# {}", csp.describe_constraint(index)).unwrap();
        match &c.kind {
            ConstraintKind::IffMembership { bit, var, codes } => {
                let membership = match codes.as_slice() {
                    [code] => eq(csp, Literal::new(*var, *code)),
                    _ => {
                        let parts: Vec<String> =
                            codes.iter().map(|&code| eq(csp, Literal::new(*var, code))).collect();
                        format!("watched-or({{{}}})", parts.join(","))
                    }
                };
                writeln!(out, "reify({},{})", membership, name(csp, *bit)).unwrap();
            }
            ConstraintKind::ForceBit { bit, value } => {
                writeln!(out, "eq({},{})", name(csp, *bit), value).unwrap();
            }
            ConstraintKind::ChannelReify { channel, guard } => {
                writeln!(out, "reify({},{})", conjunction(csp, guard), name(csp, *channel)).unwrap();
            }
            ConstraintKind::ChannelImply {
                channel,
                bit,
                value,
            } => {
                writeln!(
                    out,
                    "reifyimply({},{})",
                    eq(csp, Literal::new(*bit, *value)),
                    name(csp, *channel)
                )
                .unwrap();
            }
            ConstraintKind::SentinelLink { var, prerequisite } => {
                let active = csp.var(*var).domain.iter().copied().filter(|&v| v != 0);
                writeln!(out, "reify({},sn{})", conjunction(csp, prerequisite), sentinel).unwrap();
                writeln!(out, "reify(w-inset({},{}),sn{})", name(csp, *var), int_list(active), sentinel)
                    .unwrap();
                sentinel += 1;
            }
        }
    }
}

pub fn emit_minion(csp: &ConfigCsp) -> Result<String, EmitError> {
    if csp.vars.is_empty() {
        return Err(EmitError::EmptyModel);
    }
    let sentinels = csp
        .constraints
        .iter()
        .filter(|c| matches!(c.kind, ConstraintKind::SentinelLink { .. }))
        .count();
    let mut out = String::from("MINION 3\n");
    variables(csp, sentinels, &mut out);
    search(csp, sentinels, &mut out);
    constraints(csp, &mut out);
    out.push_str("**EOF**\n");
    Ok(out)
}
