use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use super::model::ConfigCsp;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("unknown component variable '{0}'")]
    UnknownVariable(String),
    #[error("variable '{0}' is listed more than once in the variable order")]
    DuplicateVariable(String),
    #[error("code {code} is not in the domain of '{path}' or is listed twice")]
    InvalidPreference { path: String, code: u32 },
    #[error("'{name}' is not a candidate implementation for '{path}'")]
    UnknownImplementation { path: String, name: String },
}

/// Returns `csp` with a new search order. Listed variables come first, in
/// the given order, followed by the rest in declaration order. For each
/// variable with a preference list, the listed codes come first and the
/// remaining domain values follow in code order.
pub fn set_search_order(
    csp: &ConfigCsp,
    var_order: &[String],
    value_prefs: &BTreeMap<String, Vec<u32>>,
) -> Result<ConfigCsp, OrderError> {
    let mut vars = Vec::with_capacity(csp.components.len());
    let mut seen = HashSet::new();
    for path in var_order {
        let i = csp
            .component_index(path)
            .ok_or_else(|| OrderError::UnknownVariable(path.clone()))?;
        if !seen.insert(i) {
            return Err(OrderError::DuplicateVariable(path.clone()));
        }
        vars.push(i);
    }
    vars.extend((0..csp.components.len()).filter(|i| !seen.contains(i)));

    let mut values: Vec<Vec<u32>> = csp.components.iter().map(|c| c.domain.clone()).collect();
    for (path, prefs) in value_prefs {
        let i = csp
            .component_index(path)
            .ok_or_else(|| OrderError::UnknownVariable(path.clone()))?;
        let domain = &csp.components[i].domain;
        let mut listed = HashSet::new();
        for &code in prefs {
            if !domain.contains(&code) || !listed.insert(code) {
                return Err(OrderError::InvalidPreference {
                    path: path.clone(),
                    code,
                });
            }
        }
        let mut order = prefs.clone();
        order.extend(domain.iter().copied().filter(|c| !listed.contains(c)));
        values[i] = order;
    }

    let mut out = csp.clone();
    out.search.vars = vars;
    out.search.values = values;
    Ok(out)
}

/// Like [`set_search_order`], with preferences given as implementation names.
pub fn set_search_order_by_name(
    csp: &ConfigCsp,
    var_order: &[String],
    value_prefs: &BTreeMap<String, Vec<String>>,
) -> Result<ConfigCsp, OrderError> {
    let mut codes = BTreeMap::new();
    for (path, names) in value_prefs {
        let component = csp
            .component(path)
            .ok_or_else(|| OrderError::UnknownVariable(path.clone()))?;
        let mut list = Vec::with_capacity(names.len());
        for name in names {
            match csp.symbols.code(name) {
                Some(code) if component.domain.contains(&code) => list.push(code),
                _ => {
                    return Err(OrderError::UnknownImplementation {
                        path: path.clone(),
                        name: name.clone(),
                    })
                }
            }
        }
        codes.insert(path.clone(), list);
    }
    set_search_order(csp, var_order, &codes)
}
