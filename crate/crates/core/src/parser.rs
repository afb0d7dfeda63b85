//! Text formats: programs, SE-interpretation sets, DIMACS CNF, and the
//! small QBF / 3-CNF inputs of the reduction generators.
//!
//! Program syntax:
//!
//! ```text
//! statement := head "." | head ":-" body "." | ":-" body "."
//! head      := atom ("|" atom)*
//! body      := literal ("," literal)*
//! literal   := atom | "not" atom
//! atom      := [a-z_][A-Za-z0-9_]*
//! ```
//!
//! `%` starts a line comment. User atoms may not start with `__`.

use std::fmt::Write as _;

use crate::ast::{is_reserved, Atom, AtomSet, AtomTable, Program, Rule};
use crate::error::{Error, Result, SourceSpan};
use crate::reductions::{Cnf3, Literal, Qbf2E};
use crate::sat::CnfInstance;
use crate::se::{SEPair, SESet};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Accept `__`-prefixed atoms, e.g. when reading back generated programs.
    pub allow_reserved: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    Not,
    Bar,
    If,
    Comma,
    Dot,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { chars: text.chars().peekable(), line: 1, column: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn span(&self) -> SourceSpan {
        SourceSpan { line: self.line, column: self.column }
    }

    fn next_token(&mut self) -> Result<Option<(Token, SourceSpan)>> {
        loop {
            match self.chars.peek() {
                None => return Ok(None),
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while let Some(&c) = self.chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some(_) => break,
            }
        }
        let span = self.span();
        let c = self.bump().expect("peeked");
        let token = match c {
            '|' => Token::Bar,
            ',' => Token::Comma,
            '.' => Token::Dot,
            ':' => {
                if self.chars.peek() == Some(&'-') {
                    self.bump();
                    Token::If
                } else {
                    return Err(syntax(span, "expected `:-`"));
                }
            }
            c if c.is_ascii_lowercase() || c == '_' => {
                let mut ident = String::from(c);
                while let Some(&c) = self.chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        ident.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if ident == "not" {
                    Token::Not
                } else {
                    Token::Ident(ident)
                }
            }
            c => return Err(syntax(span, &format!("unexpected character `{c}`"))),
        };
        Ok(Some((token, span)))
    }
}

fn syntax(span: SourceSpan, message: &str) -> Error {
    Error::Syntax { span, message: message.to_owned() }
}

struct ProgramParser<'a> {
    lexer: Lexer<'a>,
    lookahead: Option<(Token, SourceSpan)>,
    table: AtomTable,
    options: ParseOptions,
}

impl<'a> ProgramParser<'a> {
    fn peek(&mut self) -> Result<Option<&(Token, SourceSpan)>> {
        if self.lookahead.is_none() {
            self.lookahead = self.lexer.next_token()?;
        }
        Ok(self.lookahead.as_ref())
    }

    fn next(&mut self) -> Result<Option<(Token, SourceSpan)>> {
        self.peek()?;
        Ok(self.lookahead.take())
    }

    fn expect_next(&mut self) -> Result<(Token, SourceSpan)> {
        let span = self.lexer.span();
        self.next()?.ok_or_else(|| syntax(span, "unexpected end of input"))
    }

    fn atom(&mut self) -> Result<Atom> {
        match self.expect_next()? {
            (Token::Ident(name), span) => {
                if is_reserved(&name) && !self.options.allow_reserved {
                    return Err(Error::ReservedAtom { span, name });
                }
                Ok(self.table.intern(&name))
            }
            (_, span) => Err(syntax(span, "expected an atom")),
        }
    }

    fn body(&mut self, rule: &mut Rule) -> Result<()> {
        loop {
            if matches!(self.peek()?, Some((Token::Not, _))) {
                self.next()?;
                let a = self.atom()?;
                rule.neg.insert(a);
            } else {
                let a = self.atom()?;
                rule.pos.insert(a);
            }
            match self.expect_next()? {
                (Token::Comma, _) => continue,
                (Token::Dot, _) => return Ok(()),
                (_, span) => return Err(syntax(span, "expected `,` or `.`")),
            }
        }
    }

    fn statement(&mut self) -> Result<Option<Rule>> {
        let Some((token, span)) = self.peek()?.cloned() else {
            return Ok(None);
        };
        let mut rule = Rule::default();
        if token == Token::If {
            self.next()?;
            if matches!(self.peek()?, Some((Token::Dot, _))) {
                return Err(Error::EmptyRule { span });
            }
            self.body(&mut rule)?;
            return Ok(Some(rule));
        }
        loop {
            let a = self.atom()?;
            rule.head.insert(a);
            match self.expect_next()? {
                (Token::Bar, _) => continue,
                (Token::Dot, _) => return Ok(Some(rule)),
                (Token::If, _) => {
                    self.body(&mut rule)?;
                    return Ok(Some(rule));
                }
                (_, span) => return Err(syntax(span, "expected `|`, `:-` or `.`")),
            }
        }
    }
}

pub fn parse_program(text: &str) -> Result<Program> {
    parse_program_with(text, ParseOptions::default())
}

/// Parses a program; atom ids follow first occurrence in the text.
pub fn parse_program_with(text: &str, options: ParseOptions) -> Result<Program> {
    let mut parser =
        ProgramParser { lexer: Lexer::new(text), lookahead: None, table: AtomTable::new(), options };
    let mut rules = Vec::new();
    while let Some(rule) = parser.statement()? {
        rules.push(rule);
    }
    Ok(Program::from_rules(parser.table, rules))
}

/// One rule per line, in program order. The empty constraint renders as
/// `:- .`, which [`parse_program`] rejects.
pub fn render_program(program: &Program) -> String {
    let mut out = String::new();
    for rule in program.rules() {
        let _ = writeln!(out, "{}", rule.display(program.table()));
    }
    out
}

/// Parses an SE-interpretation set, interning atoms into `table`.
///
/// Each non-blank line is `x1 x2 ; y1 y2 y3`; `%` starts a comment and a
/// `#universe a b c` line adds atoms to the universe.
pub fn parse_se_set(text: &str, table: &mut AtomTable) -> Result<SESet> {
    let mut set = SESet::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('%').next().unwrap_or("");
        let trimmed = line.trim();
        let span = |col: usize| SourceSpan { line: lineno + 1, column: col + 1 };
        let first_col = line.len() - line.trim_start().len();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("#universe") {
            for name in rest.split_whitespace() {
                check_ident(name, span(first_col))?;
                set.universe.insert(table.intern(name));
            }
            continue;
        }
        if trimmed.starts_with('#') {
            return Err(syntax(span(first_col), "unknown directive"));
        }
        let mut parts = trimmed.split(';');
        let (Some(here), Some(there), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(syntax(span(first_col), "expected exactly one `;`"));
        };
        let mut intern_all = |s: &str| -> Result<AtomSet> {
            s.split_whitespace()
                .map(|n| {
                    check_ident(n, span(first_col))?;
                    Ok(table.intern(n))
                })
                .collect()
        };
        let here = intern_all(here)?;
        let there = intern_all(there)?;
        if !here.is_subset(&there) {
            return Err(Error::NotSubset { span: span(first_col) });
        }
        set.universe.extend(there.iter().copied());
        set.pairs.insert(SEPair { here, there });
    }
    Ok(set)
}

fn check_ident(name: &str, span: SourceSpan) -> Result<()> {
    let mut chars = name.chars();
    let ok = matches!(chars.next(), Some(c) if c.is_ascii_lowercase() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && name != "not";
    if ok {
        Ok(())
    } else {
        Err(syntax(span, &format!("invalid atom name `{name}`")))
    }
}

/// `X ; Y` with name-sorted atoms; `(∅, abc)` renders as `; a b c`.
pub fn render_se_pair(pair: &SEPair, table: &AtomTable) -> String {
    let here = table.format_set(&pair.here);
    let there = table.format_set(&pair.there);
    let mut line = String::new();
    if !here.is_empty() {
        line.push_str(&here);
        line.push(' ');
    }
    line.push(';');
    if !there.is_empty() {
        line.push(' ');
        line.push_str(&there);
    }
    line
}

/// Lines sorted by there-part, then here-part (as name lists). The universe
/// is written as a directive when it has atoms no pair mentions.
pub fn render_se_set(set: &SESet, table: &AtomTable) -> String {
    let mut keyed: Vec<(Vec<&str>, Vec<&str>, String)> = set
        .pairs
        .iter()
        .map(|p| (table.sorted_names(&p.there), table.sorted_names(&p.here), render_se_pair(p, table)))
        .collect();
    keyed.sort();
    let mut out = String::new();
    let covered: AtomSet = set.pairs.iter().flat_map(|p| p.there.iter().copied()).collect();
    if !set.universe.is_subset(&covered) {
        let _ = writeln!(out, "#universe {}", table.format_set(&set.universe));
    }
    for (_, _, line) in keyed {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// DIMACS with a leading `c <index> = <name>` block for labelled variables.
pub fn write_dimacs(cnf: &CnfInstance) -> String {
    let mut out = String::new();
    for index in 1..=cnf.num_vars() {
        if let Some(label) = cnf.label(index) {
            let _ = writeln!(out, "c {index} = {label}");
        }
    }
    let _ = writeln!(out, "p cnf {} {}", cnf.num_vars(), cnf.clauses().len());
    for clause in cnf.clauses() {
        for lit in clause {
            let _ = write!(out, "{lit} ");
        }
        out.push_str("0\n");
    }
    out
}

/// Reads plain DIMACS, checking the header counts against the body.
pub fn parse_dimacs(text: &str) -> Result<CnfInstance> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p") {
            let fields: Vec<&str> = rest.split_whitespace().collect();
            match fields.as_slice() {
                ["cnf", v, c] => {
                    let v = v.parse().map_err(|_| Error::Dimacs(format!("bad variable count `{v}`")))?;
                    let c = c.parse().map_err(|_| Error::Dimacs(format!("bad clause count `{c}`")))?;
                    header = Some((v, c));
                }
                _ => return Err(Error::Dimacs(format!("bad header `{line}`"))),
            }
            continue;
        }
        let (vars, _) = header.ok_or_else(|| Error::Dimacs("clause before header".into()))?;
        for tok in line.split_whitespace() {
            let lit: i32 = tok.parse().map_err(|_| Error::Dimacs(format!("bad literal `{tok}`")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() > vars {
                return Err(Error::Dimacs(format!("literal {lit} exceeds {vars} variables")));
            } else {
                current.push(lit);
            }
        }
    }
    let (vars, count) = header.ok_or_else(|| Error::Dimacs("missing header".into()))?;
    if !current.is_empty() {
        return Err(Error::Dimacs("unterminated clause".into()));
    }
    if clauses.len() != count {
        return Err(Error::Dimacs(format!("header announces {count} clauses, found {}", clauses.len())));
    }
    Ok(CnfInstance::new(vars, clauses))
}

/// Reads the `v ...` lines of a SAT solver's output into signed literals.
/// Returns `None` for an `s UNSATISFIABLE` answer.
pub fn parse_solver_model(text: &str) -> Result<Option<Vec<i32>>> {
    let mut lits = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.starts_with("s ") && line.contains("UNSAT") {
            return Ok(None);
        }
        if let Some(rest) = line.strip_prefix('v') {
            for tok in rest.split_whitespace() {
                let lit: i32 = tok.parse().map_err(|_| Error::Dimacs(format!("bad literal `{tok}`")))?;
                if lit != 0 {
                    lits.push(lit);
                }
            }
        }
    }
    Ok(Some(lits))
}

fn parse_literal_token(tok: &str, span: SourceSpan) -> Result<(String, bool)> {
    let (positive, body) = match tok.strip_prefix('-') {
        Some(rest) => (false, rest),
        None => (true, tok),
    };
    let name = if !body.is_empty() && body.chars().all(|c| c.is_ascii_digit()) {
        format!("v{body}")
    } else {
        check_ident(body, span)?;
        if is_reserved(body) {
            return Err(Error::ReservedAtom { span, name: body.to_owned() });
        }
        body.to_owned()
    };
    Ok((name, positive))
}

/// Reads `exists x1 x2` / `forall y1` / `term x1 -y1 x2` lines.
pub fn parse_qbf(text: &str) -> Result<Qbf2E> {
    let mut qbf = Qbf2E::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('%').next().unwrap_or("").trim();
        let span = SourceSpan { line: lineno + 1, column: 1 };
        let mut words = line.split_whitespace();
        match words.next() {
            None => continue,
            Some("exists") => {
                for w in words {
                    let (name, pos) = parse_literal_token(w, span)?;
                    if !pos {
                        return Err(syntax(span, "quantified variables cannot be negated"));
                    }
                    qbf.declare_exists(&name).map_err(|m| syntax(span, &m))?;
                }
            }
            Some("forall") => {
                for w in words {
                    let (name, pos) = parse_literal_token(w, span)?;
                    if !pos {
                        return Err(syntax(span, "quantified variables cannot be negated"));
                    }
                    qbf.declare_forall(&name).map_err(|m| syntax(span, &m))?;
                }
            }
            Some("term") => {
                let lits: Vec<Literal> = words
                    .map(|w| {
                        let (name, positive) = parse_literal_token(w, span)?;
                        let var = qbf.var(&name).ok_or_else(|| syntax(span, &format!("undeclared variable `{name}`")))?;
                        Ok(Literal { var, positive })
                    })
                    .collect::<Result<_>>()?;
                let term: [Literal; 3] =
                    lits.try_into().map_err(|_| syntax(span, "a term has exactly three literals"))?;
                qbf.terms.push(term);
            }
            Some(other) => return Err(syntax(span, &format!("unknown keyword `{other}`"))),
        }
    }
    Ok(qbf)
}

/// Reads `clause 1 -2 3` lines; numeric variables are named `v1`, `v2`, ...
pub fn parse_cnf3(text: &str) -> Result<Cnf3> {
    let mut cnf = Cnf3::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('%').next().unwrap_or("").trim();
        let span = SourceSpan { line: lineno + 1, column: 1 };
        let mut words = line.split_whitespace();
        match words.next() {
            None => continue,
            Some("clause") => {
                let lits: Vec<Literal> = words
                    .filter(|w| *w != "0")
                    .map(|w| {
                        let (name, positive) = parse_literal_token(w, span)?;
                        Ok(Literal { var: cnf.intern(&name), positive })
                    })
                    .collect::<Result<_>>()?;
                let clause: [Literal; 3] =
                    lits.try_into().map_err(|_| syntax(span, "a clause has exactly three literals"))?;
                cnf.clauses.push(clause);
            }
            Some(other) => return Err(syntax(span, &format!("unknown keyword `{other}`"))),
        }
    }
    Ok(cnf)
}
