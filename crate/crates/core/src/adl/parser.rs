//! Recursive-descent parser for the architecture description DSL.
//!
//! Errors are logged as diagnostics and the parser resynchronizes at the
//! next `;` or `}` (panic-mode recovery), so one run reports as many
//! problems as it can find.

use std::collections::HashSet;
use std::sync::Arc;

use super::ast::*;
use super::diagnostic::Diagnostic;
use super::lexer::{tokenize_file, Keyword, Token, TokenKind};

/// Marker for "a diagnostic was logged, resynchronize".
struct Recover;

type PResult<T> = Result<T, Recover>;

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    diags: Vec<Diagnostic>,
    eof: Span,
}

fn eof_span(file: &Arc<str>, text: &str) -> Span {
    let line = 1 + text.matches('\n').count() as u32;
    let last_line = text.rsplit('\n').next().unwrap_or("");
    Span {
        file: file.clone(),
        line,
        col: 1 + last_line.chars().count() as u32,
        offset: text.len(),
        len: 0,
    }
}

impl<'t> Parser<'t> {
    fn new(tokens: &'t [Token], eof: Span) -> Self {
        Parser {
            tokens,
            pos: 0,
            diags: Vec::new(),
            eof,
        }
    }

    fn peek(&self) -> Option<&'t TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, ahead: usize) -> Option<&'t TokenKind> {
        self.tokens.get(self.pos + ahead).map(|t| &t.kind)
    }

    fn span(&self) -> Span {
        self.tokens
            .get(self.pos)
            .map(|t| t.span.clone())
            .unwrap_or_else(|| self.eof.clone())
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek() == Some(kind)
    }

    fn at_keyword(&self, kw: Keyword) -> bool {
        self.peek() == Some(&TokenKind::Keyword(kw))
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let tok = self.tokens.get(self.pos);
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(kind) => kind.to_string(),
            None => "end of input".to_string(),
        }
    }

    fn fail<T>(&mut self, expected: &str) -> PResult<T> {
        let msg = format!("expected {}, found {}", expected, self.found());
        self.diags.push(Diagnostic::error(self.span(), msg));
        Err(Recover)
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Span> {
        if self.at(&kind) {
            Ok(self.bump().unwrap().span.clone())
        } else {
            self.fail(&kind.to_string())
        }
    }

    fn expect_keyword(&mut self, kw: Keyword) -> PResult<Span> {
        self.expect(TokenKind::Keyword(kw))
    }

    fn expect_ident(&mut self, what: &str) -> PResult<Ident> {
        match self.peek() {
            Some(TokenKind::Ident(name)) => {
                let span = self.bump().unwrap().span.clone();
                Ok(Ident {
                    name: name.clone(),
                    span,
                })
            }
            _ => self.fail(what),
        }
    }

    fn ident_list(&mut self, what: &str) -> PResult<Vec<Ident>> {
        let mut items = vec![self.expect_ident(what)?];
        while self.at(&TokenKind::Comma) {
            self.bump();
            items.push(self.expect_ident(what)?);
        }
        Ok(items)
    }

    /// Skip to just past the next `;`, or up to (not past) a `}` or a
    /// top-level keyword.
    fn sync_item(&mut self) {
        while let Some(kind) = self.peek() {
            match kind {
                TokenKind::Semi => {
                    self.bump();
                    return;
                }
                TokenKind::RBrace
                | TokenKind::Keyword(Keyword::Template)
                | TokenKind::Keyword(Keyword::Problem) => return,
                _ => {
                    self.bump();
                }
            }
        }
    }

    /// Skip past the next `}` or up to a top-level keyword.
    fn sync_block(&mut self) {
        while let Some(kind) = self.peek() {
            match kind {
                TokenKind::RBrace => {
                    self.bump();
                    return;
                }
                TokenKind::Keyword(Keyword::Template) | TokenKind::Keyword(Keyword::Problem) => {
                    return
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn requirement(&mut self) -> PResult<Requirement> {
        self.expect_keyword(Keyword::Requires)?;
        let facility = self.expect_ident("facility name")?;
        let name = self.expect_ident("requirement name")?;
        self.expect(TokenKind::Semi)?;
        Ok(Requirement { facility, name })
    }

    /// Parses `IDENT ("." IDENT)*`, stopping before a `.properties` or
    /// `.provides` suffix.
    fn entref(&mut self) -> PResult<EntRef> {
        let mut segments = vec![self.expect_ident("entity name")?];
        while self.at(&TokenKind::Dot) {
            match self.peek_at(1) {
                Some(TokenKind::Ident(_)) => {
                    self.bump();
                    segments.push(self.expect_ident("entity name")?);
                }
                _ => break,
            }
        }
        Ok(EntRef { segments })
    }

    fn set_attr(&mut self) -> PResult<SetAttr> {
        self.expect(TokenKind::Dot)?;
        match self.peek() {
            Some(TokenKind::Keyword(Keyword::Properties)) => {
                self.bump();
                Ok(SetAttr::Properties)
            }
            Some(TokenKind::Keyword(Keyword::Provides)) => {
                self.bump();
                Ok(SetAttr::Provides)
            }
            _ => self.fail("'properties' or 'provides'"),
        }
    }

    fn literal_set(&mut self) -> PResult<Vec<Ident>> {
        self.expect(TokenKind::LBrace)?;
        let items = if self.at(&TokenKind::RBrace) {
            Vec::new()
        } else {
            self.ident_list("identifier")?
        };
        self.expect(TokenKind::RBrace)?;
        Ok(items)
    }

    fn set_expr(&mut self) -> PResult<SetExpr> {
        if self.at(&TokenKind::LBrace) {
            return Ok(SetExpr::Literal(self.literal_set()?));
        }
        let entity = self.entref()?;
        let attr = self.set_attr()?;
        Ok(SetExpr::Attr { entity, attr })
    }

    fn check(&mut self) -> PResult<Check> {
        let span = self.expect_keyword(Keyword::Check)?;
        let kind = if self.at(&TokenKind::LBrace) {
            let lhs = SetExpr::Literal(self.literal_set()?);
            self.expect_keyword(Keyword::SubsetOf)?;
            let rhs = self.set_expr()?;
            CheckKind::SubsetOf { lhs, rhs }
        } else {
            let entity = self.entref()?;
            if self.at(&TokenKind::Dot) {
                let attr = self.set_attr()?;
                self.expect_keyword(Keyword::SubsetOf)?;
                let rhs = self.set_expr()?;
                CheckKind::SubsetOf {
                    lhs: SetExpr::Attr { entity, attr },
                    rhs,
                }
            } else if self.at_keyword(Keyword::Accepts) {
                self.bump();
                let candidate = self.entref()?;
                let with = if self.at_keyword(Keyword::With) {
                    self.bump();
                    self.expect(TokenKind::LBrace)?;
                    let items = self.ident_list("property name")?;
                    self.expect(TokenKind::RBrace)?;
                    items
                } else {
                    Vec::new()
                };
                CheckKind::Accepts {
                    slot: entity,
                    candidate,
                    with,
                }
            } else {
                return self.fail("'.', 'accepts' or 'subsetof'");
            }
        };
        self.expect(TokenKind::Semi)?;
        Ok(Check { kind, span })
    }

    fn template(&mut self) -> Option<Template> {
        let header = (|| -> PResult<(Ident, Vec<Ident>)> {
            self.expect_keyword(Keyword::Template)?;
            let name = self.expect_ident("template name")?;
            self.expect(TokenKind::LParen)?;
            let params = if self.at(&TokenKind::RParen) {
                Vec::new()
            } else {
                self.ident_list("parameter name")?
            };
            self.expect(TokenKind::RParen)?;
            self.expect(TokenKind::LBrace)?;
            Ok((name, params))
        })();
        let (name, params) = match header {
            Ok(h) => h,
            Err(Recover) => {
                self.sync_block();
                return None;
            }
        };

        let mut template = Template {
            name,
            params,
            ..Template::default()
        };
        let mut seen_provides = false;
        let mut seen_properties = false;
        // 0 provides, 1 properties, 2 requires, 3 check
        let mut stage = 0;
        loop {
            let item_span = self.span();
            let (item_stage, result) = match self.peek() {
                None
                | Some(TokenKind::RBrace)
                | Some(TokenKind::Keyword(Keyword::Template))
                | Some(TokenKind::Keyword(Keyword::Problem)) => break,
                Some(TokenKind::Keyword(Keyword::Provides)) => {
                    let dup = seen_provides;
                    seen_provides = true;
                    let r = (|| {
                        self.bump();
                        let items = self.ident_list("facility name")?;
                        self.expect(TokenKind::Semi)?;
                        Ok(items)
                    })();
                    if dup {
                        self.diags
                            .push(Diagnostic::error(item_span.clone(), "duplicate 'provides' clause"));
                    }
                    (0, r.map(|items| template.provides.extend(items)))
                }
                Some(TokenKind::Keyword(Keyword::Properties)) => {
                    let dup = seen_properties;
                    seen_properties = true;
                    let r = (|| {
                        self.bump();
                        let items = self.ident_list("property name")?;
                        self.expect(TokenKind::Semi)?;
                        Ok(items)
                    })();
                    if dup {
                        self.diags.push(Diagnostic::error(
                            item_span.clone(),
                            "duplicate 'properties' clause",
                        ));
                    }
                    (1, r.map(|items| template.properties.extend(items)))
                }
                Some(TokenKind::Keyword(Keyword::Requires)) => {
                    (2, self.requirement().map(|r| template.requires.push(r)))
                }
                Some(TokenKind::Keyword(Keyword::Check)) => {
                    (3, self.check().map(|c| template.checks.push(c)))
                }
                Some(_) => (
                    stage,
                    self.fail("'provides', 'properties', 'requires', 'check' or '}'"),
                ),
            };
            if item_stage < stage {
                let kw = ["provides", "properties", "requires", "check"][item_stage];
                let prev = ["provides", "properties", "requires", "check"][stage];
                self.diags.push(Diagnostic::error(
                    item_span,
                    format!("'{}' clause must come before '{}' clauses", kw, prev),
                ));
            }
            stage = stage.max(item_stage);
            if result.is_err() {
                self.sync_item();
            }
        }
        if self.expect(TokenKind::RBrace).is_err() {
            self.sync_block();
        }
        if !seen_provides {
            self.diags.push(Diagnostic::error(
                template.name.span.clone(),
                format!("template '{}' has no 'provides' clause", template.name),
            ));
        }
        Some(template)
    }

    fn problem(&mut self) -> Option<ProblemSpec> {
        let header = (|| -> PResult<Ident> {
            self.expect_keyword(Keyword::Problem)?;
            let name = self.expect_ident("problem name")?;
            self.expect(TokenKind::LBrace)?;
            Ok(name)
        })();
        let name = match header {
            Ok(name) => name,
            Err(Recover) => {
                self.sync_block();
                return None;
            }
        };
        let mut problem = ProblemSpec {
            name,
            ..ProblemSpec::default()
        };
        let mut seen_check = false;
        loop {
            let item_span = self.span();
            let result = match self.peek() {
                None
                | Some(TokenKind::RBrace)
                | Some(TokenKind::Keyword(Keyword::Template))
                | Some(TokenKind::Keyword(Keyword::Problem)) => break,
                Some(TokenKind::Keyword(Keyword::Requires)) => {
                    if seen_check {
                        self.diags.push(Diagnostic::error(
                            item_span,
                            "'requires' clause must come before 'check' clauses",
                        ));
                    }
                    self.requirement().map(|r| problem.requires.push(r))
                }
                Some(TokenKind::Keyword(Keyword::Check)) => {
                    seen_check = true;
                    self.check().map(|c| problem.checks.push(c))
                }
                Some(_) => self.fail("'requires', 'check' or '}'"),
            };
            if result.is_err() {
                self.sync_item();
            }
        }
        if self.expect(TokenKind::RBrace).is_err() {
            self.sync_block();
        }
        Some(problem)
    }
}

/// Structural checks on a single check: exactly one literal side in `subsetof`.
fn check_shape(check: &Check, diags: &mut Vec<Diagnostic>) {
    if let CheckKind::SubsetOf { lhs, rhs } = &check.kind {
        match (lhs, rhs) {
            (SetExpr::Literal(_), SetExpr::Literal(_)) => diags.push(Diagnostic::error(
                check.span.clone(),
                "'subsetof' needs an entity set on one side; both sides are literal sets",
            )),
            (SetExpr::Attr { .. }, SetExpr::Attr { .. }) => diags.push(Diagnostic::error(
                check.span.clone(),
                "'subsetof' between two entity sets is not supported",
            )),
            _ => {}
        }
    }
}

fn check_template(template: &Template, diags: &mut Vec<Diagnostic>) {
    let mut names = HashSet::new();
    let locals = template
        .params
        .iter()
        .chain(template.requires.iter().map(|r| &r.name));
    for name in locals {
        if !names.insert(name.name.as_str()) {
            diags.push(Diagnostic::error(
                name.span.clone(),
                format!("duplicate name '{}' in template '{}'", name, template.name),
            ));
        }
    }
    for check in &template.checks {
        check_shape(check, diags);
        for entref in check.entity_refs() {
            let head = entref.head();
            if !names.contains(head.name.as_str()) {
                diags.push(Diagnostic::error(
                    head.span.clone(),
                    format!(
                        "undeclared parameter or requirement '{}' in template '{}'",
                        head, template.name
                    ),
                ));
            }
        }
    }
}

fn check_problem(problem: &ProblemSpec, diags: &mut Vec<Diagnostic>) {
    let mut names = HashSet::new();
    for req in &problem.requires {
        if !names.insert(req.name.name.as_str()) {
            diags.push(Diagnostic::error(
                req.name.span.clone(),
                format!("duplicate requirement '{}'", req.name),
            ));
        }
    }
    for check in &problem.checks {
        check_shape(check, diags);
        for entref in check.entity_refs() {
            let head = entref.head();
            if !names.contains(head.name.as_str()) {
                diags.push(Diagnostic::error(
                    head.span.clone(),
                    format!("undeclared requirement '{}'", head),
                ));
            }
        }
    }
    if problem.requires.is_empty() {
        diags.push(Diagnostic::warning(
            problem.name.span.clone(),
            format!("problem '{}' has no requirements", problem.name),
        ));
    }
}

pub fn parse_library(text: &str) -> (ComponentLibrary, Vec<Diagnostic>) {
    parse_library_file("<input>", text)
}

/// Parses a component library; `file` names the source in diagnostics.
pub fn parse_library_file(file: &str, text: &str) -> (ComponentLibrary, Vec<Diagnostic>) {
    let (tokens, mut diags) = tokenize_file(file, text);
    let file: Arc<str> = Arc::from(file);
    let mut parser = Parser::new(&tokens, eof_span(&file, text));
    let mut library = ComponentLibrary::default();
    while parser.peek().is_some() {
        if parser.at_keyword(Keyword::Template) {
            if let Some(t) = parser.template() {
                library.templates.push(t);
            }
        } else {
            let _ = parser.fail::<()>("'template'");
            parser.bump();
            while parser.peek().is_some() && !parser.at_keyword(Keyword::Template) {
                parser.bump();
            }
        }
    }
    diags.append(&mut parser.diags);

    let mut seen = HashSet::new();
    for template in &library.templates {
        if !seen.insert(template.name.name.as_str()) {
            diags.push(Diagnostic::error(
                template.name.span.clone(),
                format!("duplicate template '{}'", template.name),
            ));
        }
        check_template(template, &mut diags);
    }
    (library, diags)
}

pub fn parse_problem(text: &str) -> (ProblemSpec, Vec<Diagnostic>) {
    parse_problem_file("<input>", text)
}

pub fn parse_problem_file(file: &str, text: &str) -> (ProblemSpec, Vec<Diagnostic>) {
    let (tokens, mut diags) = tokenize_file(file, text);
    let file: Arc<str> = Arc::from(file);
    let mut parser = Parser::new(&tokens, eof_span(&file, text));
    let mut problem = None;
    if parser.peek().is_none() {
        let _ = parser.fail::<()>("'problem'");
    }
    while parser.peek().is_some() {
        if parser.at_keyword(Keyword::Problem) {
            let span = parser.span();
            if let Some(p) = parser.problem() {
                if problem.is_some() {
                    parser
                        .diags
                        .push(Diagnostic::error(span, "only one problem per file is allowed"));
                } else {
                    problem = Some(p);
                }
            }
        } else {
            let _ = parser.fail::<()>("'problem'");
            parser.bump();
            while parser.peek().is_some() && !parser.at_keyword(Keyword::Problem) {
                parser.bump();
            }
        }
    }
    diags.append(&mut parser.diags);
    // a missing problem has already been reported
    let Some(problem) = problem else {
        return (ProblemSpec::default(), diags);
    };
    check_problem(&problem, &mut diags);
    (problem, diags)
}

/// Concatenates libraries in order. A template name already defined by an
/// earlier library is reported as an error and the later copy is dropped.
pub fn merge_libraries(
    libraries: impl IntoIterator<Item = ComponentLibrary>,
) -> (ComponentLibrary, Vec<Diagnostic>) {
    let mut merged = ComponentLibrary::default();
    let mut diags = Vec::new();
    let mut seen = HashSet::new();
    for library in libraries {
        let mut local = HashSet::new();
        for template in library.templates {
            let name = template.name.name.clone();
            if seen.contains(&name) && !local.contains(&name) {
                diags.push(Diagnostic::error(
                    template.name.span.clone(),
                    format!("template '{}' is already defined by an earlier library", name),
                ));
                continue;
            }
            local.insert(name.clone());
            seen.insert(name);
            merged.templates.push(template);
        }
    }
    (merged, diags)
}
