//! Brute-force reference semantics.
//!
//! Enumerates every total choice of implementations over the active
//! requirement paths and keeps the choices under which every check holds,
//! reading property and provides sets straight off the templates. Nothing
//! here goes through the CSP encoding; it exists to cross-check it.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::adl::{CheckKind, ComponentLibrary, EntRef, Ident, ProblemSpec, SetAttr, SetExpr, Template};
use crate::configuration::Configuration;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("requirement '{path}' is nested deeper than the depth limit {limit}")]
    DepthExceeded { path: String, limit: usize },
    #[error("depth limit must be at least 1")]
    InvalidDepth,
}

/// The implementations that could fill one requirement path, each with the
/// requirement paths it would open in turn.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateNode {
    pub path: String,
    pub candidates: Vec<(String, Vec<CandidateNode>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateTree {
    pub roots: Vec<CandidateNode>,
}

fn providers<'a>(library: &'a ComponentLibrary, facility: &str) -> Vec<&'a Template> {
    let mut out = Vec::new();
    for t in &library.templates {
        if t.provides.iter().any(|f| f.name == facility) {
            out.push(t);
        }
    }
    out
}

fn grow(
    library: &ComponentLibrary,
    path: String,
    facility: &str,
    depth: usize,
    limit: usize,
) -> Result<CandidateNode, OracleError> {
    if depth > limit {
        return Err(OracleError::DepthExceeded { path, limit });
    }
    let mut candidates = Vec::new();
    for t in providers(library, facility) {
        let mut children = Vec::new();
        for r in &t.requires {
            let child = format!("{}={}/{}", path, t.name.name, r.name.name);
            children.push(grow(library, child, &r.facility.name, depth + 1, limit)?);
        }
        candidates.push((t.name.name.clone(), children));
    }
    Ok(CandidateNode { path, candidates })
}

pub fn candidate_tree(
    library: &ComponentLibrary,
    problem: &ProblemSpec,
    depth_limit: usize,
) -> Result<CandidateTree, OracleError> {
    if depth_limit == 0 {
        return Err(OracleError::InvalidDepth);
    }
    let mut roots = Vec::new();
    for r in &problem.requires {
        roots.push(grow(library, r.name.name.clone(), &r.facility.name, 1, depth_limit)?);
    }
    Ok(CandidateTree { roots })
}

/// Every way to choose implementations for the nodes of `nodes` and
/// everything beneath the chosen ones.
fn choices(nodes: &[CandidateNode]) -> Vec<Vec<(String, String)>> {
    let mut acc: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for node in nodes {
        let mut options = Vec::new();
        for (name, children) in &node.candidates {
            for mut rest in choices(children) {
                rest.push((node.path.clone(), name.clone()));
                options.push(rest);
            }
        }
        let mut next = Vec::new();
        for prefix in &acc {
            for option in &options {
                let mut combined = prefix.clone();
                combined.extend(option.iter().cloned());
                next.push(combined);
            }
        }
        acc = next;
    }
    acc
}

/// All total configurations, ignoring checks.
pub fn all_configurations(tree: &CandidateTree) -> Vec<Configuration> {
    choices(&tree.roots)
        .into_iter()
        .map(|pairs| pairs.into_iter().collect())
        .collect()
}

enum Entity<'a> {
    Component(String),
    Parameter { template: &'a Template, name: String },
}

struct Evaluator<'a> {
    library: &'a ComponentLibrary,
    problem: &'a ProblemSpec,
    config: &'a Configuration,
}

impl<'a> Evaluator<'a> {
    fn template(&self, name: &str) -> &'a Template {
        self.library
            .templates
            .iter()
            .find(|t| t.name.name == name)
            .expect("configuration names library templates")
    }

    fn member(&self, path: &str, template: &'a Template, name: &str) -> Option<Entity<'a>> {
        if template.params.iter().any(|p| p.name == name) {
            return Some(Entity::Parameter {
                template,
                name: name.to_string(),
            });
        }
        if template.requires.iter().any(|r| r.name.name == name) {
            return Some(Entity::Component(format!("{}={}/{}", path, template.name.name, name)));
        }
        None
    }

    /// `None` when the reference does not denote anything under this configuration.
    fn resolve(&self, scope: Option<(&str, &'a Template)>, entref: &EntRef) -> Option<Entity<'a>> {
        let head = &entref.segments[0].name;
        let mut entity = match scope {
            None => {
                if self.problem.requires.iter().any(|r| &r.name.name == head) {
                    Entity::Component(head.clone())
                } else {
                    return None;
                }
            }
            Some((path, template)) => self.member(path, template, head)?,
        };
        for seg in &entref.segments[1..] {
            entity = match entity {
                Entity::Component(path) => {
                    let template = self.template(self.config.get(&path)?);
                    self.member(&path, template, &seg.name)?
                }
                Entity::Parameter { .. } => return None,
            };
        }
        Some(entity)
    }

    fn set(&self, entity: &Entity<'a>, attr: SetAttr) -> BTreeSet<String> {
        match entity {
            Entity::Component(path) => {
                let template = self.template(self.config.get(path).expect("active path"));
                let list = match attr {
                    SetAttr::Properties => &template.properties,
                    SetAttr::Provides => &template.provides,
                };
                list.iter().map(|i| i.name.clone()).collect()
            }
            Entity::Parameter { template, name } => {
                // what the template itself demands of the parameter
                let mut out = BTreeSet::new();
                for check in &template.checks {
                    if let CheckKind::SubsetOf {
                        lhs: SetExpr::Literal(items),
                        rhs: SetExpr::Attr { entity, attr: a },
                    } = &check.kind
                    {
                        if *a == attr && entity.segments.len() == 1 && &entity.segments[0].name == name {
                            out.extend(items.iter().map(|i| i.name.clone()));
                        }
                    }
                }
                out
            }
        }
    }

    fn holds(&self, scope: Option<(&str, &'a Template)>, kind: &CheckKind) -> bool {
        let names = |items: &[Ident]| -> BTreeSet<String> { items.iter().map(|i| i.name.clone()).collect() };
        match kind {
            CheckKind::SubsetOf { lhs, rhs } => match (lhs, rhs) {
                (SetExpr::Literal(items), SetExpr::Attr { entity, attr }) => match self.resolve(scope, entity) {
                    None => true,
                    Some(e) => names(items).is_subset(&self.set(&e, *attr)),
                },
                (SetExpr::Attr { entity, attr }, SetExpr::Literal(items)) => match self.resolve(scope, entity) {
                    None => true,
                    Some(e) => self.set(&e, *attr).is_subset(&names(items)),
                },
                _ => true,
            },
            CheckKind::Accepts {
                slot,
                candidate,
                with,
            } => {
                let (Some(s), Some(k)) = (self.resolve(scope, slot), self.resolve(scope, candidate)) else {
                    return true;
                };
                let granted = names(with);
                let demanded: BTreeSet<String> = self
                    .set(&s, SetAttr::Properties)
                    .difference(&granted)
                    .cloned()
                    .collect();
                demanded.is_subset(&self.set(&k, SetAttr::Properties))
                    && self
                        .set(&s, SetAttr::Provides)
                        .is_subset(&self.set(&k, SetAttr::Provides))
            }
        }
    }

    fn satisfied(&self) -> bool {
        if !self.problem.checks.iter().all(|c| self.holds(None, &c.kind)) {
            return false;
        }
        for (path, name) in self.config.iter() {
            let template = self.template(name);
            if !template
                .checks
                .iter()
                .all(|c| self.holds(Some((path, template)), &c.kind))
            {
                return false;
            }
        }
        true
    }
}

/// True iff every check of the problem and of every chosen template holds
/// under `config`. `config` must be total over its active paths.
pub fn satisfies(library: &ComponentLibrary, problem: &ProblemSpec, config: &Configuration) -> bool {
    Evaluator {
        library,
        problem,
        config,
    }
    .satisfied()
}

/// Every valid configuration, by exhaustive enumeration.
pub fn enumerate_configurations(
    library: &ComponentLibrary,
    problem: &ProblemSpec,
    depth_limit: usize,
) -> Result<BTreeSet<Configuration>, OracleError> {
    let tree = candidate_tree(library, problem, depth_limit)?;
    let mut seen = HashSet::new();
    let mut out = BTreeSet::new();
    for config in all_configurations(&tree) {
        if seen.insert(config.clone()) && satisfies(library, problem, &config) {
            out.insert(config);
        }
    }
    Ok(out)
}
