//! Syntax tree for component libraries and problem meta-components.
//!
//! Equality on every node is structural: identifiers compare by name only,
//! so a tree re-parsed from its pretty-printed form equals the original even
//! though every source location moved.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// A location in a source file. Lines and columns are 1-based; columns count
/// characters, `offset` and `len` count bytes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Span {
    pub file: Arc<str>,
    pub line: u32,
    pub col: u32,
    pub offset: usize,
    pub len: usize,
}

impl Span {
    pub fn end(&self) -> usize {
        self.offset + self.len
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.col)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    /// An identifier without a source location, for programmatically built trees.
    pub fn new(name: impl Into<String>) -> Self {
        Ident {
            name: name.into(),
            span: Span::default(),
        }
    }

    pub fn as_str(&self) -> &str {
        &self.name
    }
}

impl PartialEq for Ident {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl Eq for Ident {}

impl Hash for Ident {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.name.hash(state)
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// `requires <facility> <name>;`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Requirement {
    pub facility: Ident,
    pub name: Ident,
}

/// A dotted entity reference such as `sum1.lhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntRef {
    pub segments: Vec<Ident>,
}

impl EntRef {
    pub fn new<S: Into<String>>(segments: impl IntoIterator<Item = S>) -> Self {
        EntRef {
            segments: segments.into_iter().map(Ident::new).collect(),
        }
    }

    pub fn head(&self) -> &Ident {
        &self.segments[0]
    }

    pub fn span(&self) -> Span {
        self.segments
            .first()
            .map(|s| s.span.clone())
            .unwrap_or_default()
    }
}

impl fmt::Display for EntRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, seg) in self.segments.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            f.write_str(&seg.name)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SetAttr {
    Properties,
    Provides,
}

impl SetAttr {
    pub fn keyword(self) -> &'static str {
        match self {
            SetAttr::Properties => "properties",
            SetAttr::Provides => "provides",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetExpr {
    Literal(Vec<Ident>),
    Attr { entity: EntRef, attr: SetAttr },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckKind {
    SubsetOf { lhs: SetExpr, rhs: SetExpr },
    Accepts {
        slot: EntRef,
        candidate: EntRef,
        with: Vec<Ident>,
    },
}

#[derive(Debug, Clone)]
pub struct Check {
    pub kind: CheckKind,
    /// Location of the `check` keyword.
    pub span: Span,
}

impl Check {
    pub fn new(kind: CheckKind) -> Self {
        Check {
            kind,
            span: Span::default(),
        }
    }

    /// The normalized reading of a well-formed check.
    ///
    /// Returns `None` for a `subsetof` whose sides are both literals or both
    /// entity sets; validation rejects those before anything interprets them.
    pub fn shape(&self) -> Option<CheckShape<'_>> {
        match &self.kind {
            CheckKind::SubsetOf { lhs, rhs } => match (lhs, rhs) {
                (SetExpr::Literal(items), SetExpr::Attr { entity, attr }) => {
                    Some(CheckShape::Require {
                        items,
                        entity,
                        attr: *attr,
                    })
                }
                (SetExpr::Attr { entity, attr }, SetExpr::Literal(items)) => {
                    Some(CheckShape::Restrict {
                        entity,
                        attr: *attr,
                        items,
                    })
                }
                _ => None,
            },
            CheckKind::Accepts {
                slot,
                candidate,
                with,
            } => Some(CheckShape::Accepts {
                slot,
                candidate,
                with,
            }),
        }
    }

    /// Every entity reference mentioned by the check.
    pub fn entity_refs(&self) -> Vec<&EntRef> {
        match &self.kind {
            CheckKind::SubsetOf { lhs, rhs } => [lhs, rhs]
                .into_iter()
                .filter_map(|side| match side {
                    SetExpr::Attr { entity, .. } => Some(entity),
                    SetExpr::Literal(_) => None,
                })
                .collect(),
            CheckKind::Accepts {
                slot, candidate, ..
            } => vec![slot, candidate],
        }
    }
}

impl PartialEq for Check {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Check {}

/// How a check constrains entity sets.
#[derive(Debug, Clone, Copy)]
pub enum CheckShape<'a> {
    /// `{items} subsetof entity.attr`: every listed name must be present.
    Require {
        items: &'a [Ident],
        entity: &'a EntRef,
        attr: SetAttr,
    },
    /// `entity.attr subsetof {items}`: nothing outside the list may be present.
    Restrict {
        entity: &'a EntRef,
        attr: SetAttr,
        items: &'a [Ident],
    },
    /// `slot accepts candidate with {with}`.
    Accepts {
        slot: &'a EntRef,
        candidate: &'a EntRef,
        with: &'a [Ident],
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Template {
    pub name: Ident,
    pub params: Vec<Ident>,
    pub provides: Vec<Ident>,
    pub properties: Vec<Ident>,
    pub requires: Vec<Requirement>,
    pub checks: Vec<Check>,
}

impl Template {
    pub fn provides_facility(&self, facility: &str) -> bool {
        self.provides.iter().any(|f| f.name == facility)
    }

    pub fn has_property(&self, property: &str) -> bool {
        self.properties.iter().any(|p| p.name == property)
    }

    pub fn has_param(&self, name: &str) -> bool {
        self.params.iter().any(|p| p.name == name)
    }

    pub fn requirement(&self, name: &str) -> Option<&Requirement> {
        self.requires.iter().find(|r| r.name.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComponentLibrary {
    pub templates: Vec<Template>,
}

impl ComponentLibrary {
    pub fn template(&self, name: &str) -> Option<&Template> {
        self.templates.iter().find(|t| t.name.name == name)
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProblemSpec {
    pub name: Ident,
    pub requires: Vec<Requirement>,
    pub checks: Vec<Check>,
}

impl ProblemSpec {
    pub fn requirement(&self, name: &str) -> Option<&Requirement> {
        self.requires.iter().find(|r| r.name.name == name)
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[Ident]) -> fmt::Result {
    f.write_str("{")?;
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        f.write_str(&item.name)?;
    }
    f.write_str("}")
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetExpr::Literal(items) => write_list(f, items),
            SetExpr::Attr { entity, attr } => write!(f, "{}.{}", entity, attr.keyword()),
        }
    }
}

/// Canonical surface syntax, without the leading `check` and trailing `;`.
impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckKind::SubsetOf { lhs, rhs } => write!(f, "{} subsetof {}", lhs, rhs),
            CheckKind::Accepts {
                slot,
                candidate,
                with,
            } => {
                write!(f, "{} accepts {}", slot, candidate)?;
                if !with.is_empty() {
                    f.write_str(" with ")?;
                    write_list(f, with)?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind.fmt(f)
    }
}
