use std::collections::HashMap;

use crate::adl::{CheckKind, ComponentLibrary, Ident, ProblemSpec, SetAttr, SetExpr};

/// Code reserved for an inactive conditional component.
pub const INACTIVE: u32 = 0;

/// An interned, densely indexed set of names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interner {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Interner {
    pub fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        i
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

/// Integer encodings of implementations, properties and facilities.
///
/// Implementations get codes `1..=n` in library declaration order; code 0
/// is the inactive sentinel. Properties and facilities get dense indices
/// from 0 in order of first appearance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    implementations: Interner,
    pub properties: Interner,
    pub facilities: Interner,
}

impl SymbolTable {
    pub fn code(&self, implementation: &str) -> Option<u32> {
        self.implementations.get(implementation).map(|i| i as u32 + 1)
    }

    pub fn implementation(&self, code: u32) -> Option<&str> {
        if code == INACTIVE || code as usize > self.implementations.len() {
            return None;
        }
        Some(self.implementations.name(code as usize - 1))
    }

    pub fn implementation_count(&self) -> usize {
        self.implementations.len()
    }

    pub fn property(&self, name: &str) -> Option<usize> {
        self.properties.get(name)
    }

    pub fn facility(&self, name: &str) -> Option<usize> {
        self.facilities.get(name)
    }

    pub fn names(&self, attr: SetAttr) -> &Interner {
        match attr {
            SetAttr::Properties => &self.properties,
            SetAttr::Provides => &self.facilities,
        }
    }

    fn intern_literals(&mut self, kind: &CheckKind) {
        let mut add = |items: &[Ident], attr: SetAttr| {
            for item in items {
                match attr {
                    SetAttr::Properties => self.properties.intern(item.as_str()),
                    SetAttr::Provides => self.facilities.intern(item.as_str()),
                };
            }
        };
        match kind {
            CheckKind::SubsetOf { lhs, rhs } => match (lhs, rhs) {
                (SetExpr::Literal(items), SetExpr::Attr { attr, .. })
                | (SetExpr::Attr { attr, .. }, SetExpr::Literal(items)) => add(items, *attr),
                _ => {}
            },
            CheckKind::Accepts { with, .. } => add(with, SetAttr::Properties),
        }
    }

    /// Registers names that only the problem mentions, after the library's.
    pub fn add_problem_names(&mut self, problem: &ProblemSpec) {
        for req in &problem.requires {
            self.facilities.intern(req.facility.as_str());
        }
        for check in &problem.checks {
            self.intern_literals(&check.kind);
        }
    }
}

/// Builds the symbol table for a library. Properties and facilities are
/// collected from declarations first, then from check literals, so names
/// used only in checks still get a bit.
pub fn build_symbols(library: &ComponentLibrary) -> SymbolTable {
    let mut table = SymbolTable::default();
    for t in &library.templates {
        table.implementations.intern(t.name.as_str());
        for p in &t.properties {
            table.properties.intern(p.as_str());
        }
        for f in &t.provides {
            table.facilities.intern(f.as_str());
        }
        for r in &t.requires {
            table.facilities.intern(r.facility.as_str());
        }
    }
    for t in &library.templates {
        for check in &t.checks {
            table.intern_literals(&check.kind);
        }
    }
    table
}
