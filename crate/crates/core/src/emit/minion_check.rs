//! Structural checker for the subset of the Minion 3 input language the
//! emitter produces. Written against the input grammar, not the emitter, so
//! it can catch emitter mistakes: section order, declarations before use,
//! array bounds, constraint arities and argument kinds, constants inside
//! variable bounds, and matching VARORDER/VALORDER lengths.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct MinionSyntaxError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MinionStats {
    /// Scalar variables plus array elements.
    pub variables: usize,
    /// Top-level constraint counts by name.
    pub constraints: BTreeMap<String, usize>,
    pub search_vars: usize,
}

impl MinionStats {
    pub fn count(&self, name: &str) -> usize {
        self.constraints.get(name).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy)]
struct Decl {
    len: Option<usize>,
    lo: i64,
    hi: i64,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Int(i64),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Tok::Int(text.parse().map_err(|_| format!("bad integer '{}'", text))?));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '-') {
                i += 1;
            }
            out.push(Tok::Word(chars[start..i].iter().collect()));
        } else if "()[]{},|.".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(format!("unexpected character '{}'", c));
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [Tok],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&'a Tok> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    fn expect(&mut self, c: char) -> Result<(), String> {
        match self.next() {
            Some(Tok::Sym(s)) if *s == c => Ok(()),
            other => Err(format!("expected '{}', found {:?}", c, other)),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<i64, String> {
        match self.next() {
            Some(Tok::Int(v)) => Ok(*v),
            other => Err(format!("expected integer, found {:?}", other)),
        }
    }

    fn word(&mut self) -> Result<&'a str, String> {
        match self.next() {
            Some(Tok::Word(w)) => Ok(w),
            other => Err(format!("expected name, found {:?}", other)),
        }
    }

    fn done(&self) -> Result<(), String> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(format!("trailing {:?}", t)),
        }
    }
}

/// `{lo..hi}`
fn bounds(c: &mut Cursor<'_>) -> Result<(i64, i64), String> {
    c.expect('{')?;
    let lo = c.int()?;
    c.expect('.')?;
    c.expect('.')?;
    let hi = c.int()?;
    c.expect('}')?;
    if lo > hi {
        return Err(format!("empty bounds {}..{}", lo, hi));
    }
    Ok((lo, hi))
}

struct Checker {
    decls: HashMap<String, Decl>,
    stats: MinionStats,
}

impl Checker {
    fn declare(&mut self, c: &mut Cursor<'_>) -> Result<(), String> {
        let name = c.word()?.to_string();
        let len = if c.eat('[') {
            let n = c.int()?;
            c.expect(']')?;
            if n < 1 {
                return Err(format!("array '{}' must have positive length", name));
            }
            Some(n as usize)
        } else {
            None
        };
        let (lo, hi) = bounds(c)?;
        c.done()?;
        if self.decls.contains_key(&name) {
            return Err(format!("'{}' declared twice", name));
        }
        self.stats.variables += len.unwrap_or(1);
        self.decls.insert(name, Decl { len, lo, hi });
        Ok(())
    }

    /// A scalar variable or an indexed array element; returns its bounds.
    fn var(&self, c: &mut Cursor<'_>) -> Result<(i64, i64), String> {
        let name = c.word()?;
        let decl = self
            .decls
            .get(name)
            .ok_or_else(|| format!("undeclared variable '{}'", name))?;
        match decl.len {
            Some(len) => {
                c.expect('[')?;
                let i = c.int()?;
                c.expect(']')?;
                if i < 0 || i as usize >= len {
                    return Err(format!("index {} out of bounds for '{}[{}]'", i, name, len));
                }
            }
            None => {
                if c.peek() == Some(&Tok::Sym('[')) {
                    return Err(format!("'{}' is not an array", name));
                }
            }
        }
        Ok((decl.lo, decl.hi))
    }

    fn bool_var(&self, c: &mut Cursor<'_>) -> Result<(), String> {
        let (lo, hi) = self.var(c)?;
        if lo < 0 || hi > 1 {
            return Err("reification target must be 0/1".into());
        }
        Ok(())
    }

    fn int_list(&self, c: &mut Cursor<'_>) -> Result<Vec<i64>, String> {
        c.expect('[')?;
        let mut out = Vec::new();
        if c.eat(']') {
            return Ok(out);
        }
        loop {
            out.push(c.int()?);
            if c.eat(']') {
                return Ok(out);
            }
            c.expect(',')?;
        }
    }

    fn constraint_set(&self, c: &mut Cursor<'_>) -> Result<usize, String> {
        c.expect('{')?;
        let mut n = 0;
        if c.eat('}') {
            return Ok(n);
        }
        loop {
            self.constraint(c)?;
            n += 1;
            if c.eat('}') {
                return Ok(n);
            }
            c.expect(',')?;
        }
    }

    fn constraint<'a>(&self, c: &mut Cursor<'a>) -> Result<&'a str, String> {
        let name = c.word()?;
        c.expect('(')?;
        match name {
            "eq" => {
                let (lo, hi) = self.var(c)?;
                c.expect(',')?;
                if matches!(c.peek(), Some(Tok::Int(_))) {
                    let v = c.int()?;
                    if v < lo || v > hi {
                        return Err(format!("constant {} outside bounds {}..{}", v, lo, hi));
                    }
                } else {
                    self.var(c)?;
                }
            }
            "w-inset" => {
                self.var(c)?;
                c.expect(',')?;
                let values = self.int_list(c)?;
                if values.windows(2).any(|w| w[0] >= w[1]) {
                    return Err("w-inset values must be strictly increasing".into());
                }
            }
            "reify" | "reifyimply" => {
                self.constraint(c)?;
                c.expect(',')?;
                self.bool_var(c)?;
            }
            "watched-or" | "watched-and" => {
                if self.constraint_set(c)? == 0 {
                    return Err(format!("{} needs at least one constraint", name));
                }
            }
            "false" | "true" => {}
            other => return Err(format!("unknown constraint '{}'", other)),
        }
        c.expect(')')?;
        Ok(name)
    }

    fn search_line(&mut self, c: &mut Cursor<'_>, key: &str, order_len: &mut Option<usize>) -> Result<(), String> {
        match key {
            "VARORDER" => {
                if order_len.is_some() {
                    return Err("VARORDER given twice".into());
                }
                c.expect('[')?;
                let mut n = 0;
                if !c.eat(']') {
                    loop {
                        self.var(c)?;
                        n += 1;
                        if c.eat(']') {
                            break;
                        }
                        c.expect(',')?;
                    }
                }
                *order_len = Some(n);
                self.stats.search_vars = n;
            }
            "VALORDER" => {
                let Some(n) = *order_len else {
                    return Err("VALORDER before VARORDER".into());
                };
                c.expect('[')?;
                let mut m = 0;
                if !c.eat(']') {
                    loop {
                        match c.word()? {
                            "a" | "d" => m += 1,
                            other => return Err(format!("bad value order '{}'", other)),
                        }
                        if c.eat(']') {
                            break;
                        }
                        c.expect(',')?;
                    }
                }
                if m != n {
                    return Err(format!("VALORDER has {} entries, VARORDER has {}", m, n));
                }
            }
            "PRINT" => match c.word()? {
                "ALL" | "NONE" => {}
                other => return Err(format!("bad PRINT argument '{}'", other)),
            },
            other => return Err(format!("unknown search directive '{}'", other)),
        }
        c.done()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Header,
    Variables,
    Search,
    Constraints,
    Eof,
}

pub fn check_minion(text: &str) -> Result<MinionStats, MinionSyntaxError> {
    let mut checker = Checker {
        decls: HashMap::new(),
        stats: MinionStats::default(),
    };
    let mut section = Section::Header;
    let mut order_len = None;
    let mut saw_header = false;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let err = |message: String| MinionSyntaxError { line, message };
        if !saw_header {
            if raw != "MINION 3" {
                return Err(err("first line must be 'MINION 3'".into()));
            }
            saw_header = true;
            continue;
        }
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let next = match body {
            "**VARIABLES**" => Some(Section::Variables),
            "**SEARCH**" => Some(Section::Search),
            "**CONSTRAINTS**" => Some(Section::Constraints),
            "**EOF**" => Some(Section::Eof),
            _ => None,
        };
        if let Some(next) = next {
            if next <= section {
                return Err(err(format!("section {} out of order", body)));
            }
            section = next;
            continue;
        }
        let toks = tokenize(body).map_err(err)?;
        let mut c = Cursor { toks: &toks, pos: 0 };
        let result = match section {
            Section::Header => Err("content before **VARIABLES**".to_string()),
            Section::Eof => Err("content after **EOF**".to_string()),
            Section::Variables => match c.word() {
                Ok("DISCRETE") | Ok("BOOL") => checker.declare(&mut c),
                Ok(other) => Err(format!("unknown variable kind '{}'", other)),
                Err(e) => Err(e),
            },
            Section::Search => match c.word() {
                Ok(key) => checker.search_line(&mut c, key, &mut order_len),
                Err(e) => Err(e),
            },
            Section::Constraints => checker.constraint(&mut c).and_then(|name| {
                c.done()?;
                *checker.stats.constraints.entry(name.to_string()).or_default() += 1;
                Ok(())
            }),
        };
        result.map_err(err)?;
    }
    if !saw_header {
        return Err(MinionSyntaxError {
            line: 1,
            message: "empty file".into(),
        });
    }
    if section != Section::Eof {
        return Err(MinionSyntaxError {
            line: text.lines().count(),
            message: "missing **EOF**".into(),
        });
    }
    Ok(checker.stats)
}
