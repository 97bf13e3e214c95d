//! Readers for the plain TPDB formats: `.trs` files with `(VAR ...)` and
//! `(RULES ...)` blocks, and `.srs` files with comma separated string rules.

use std::collections::HashSet;
use std::sync::Arc;

use crate::term::{ArityConflict, Rule, SystemKind, Term, Trs};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error(transparent)]
    Arity(#[from] ArityConflict),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Comma,
    Arrow,
    Ident(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Vec<Spanned> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = (line, col);
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
        } else if c.is_whitespace() {
            col += 1;
            i += 1;
        } else if let Some(tok) = single {
            out.push(Spanned { tok, line: start.0, col: start.1 });
            col += 1;
            i += 1;
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Spanned { tok: Tok::Arrow, line: start.0, col: start.1 });
            col += 2;
            i += 2;
        } else {
            let mut ident = String::new();
            while i < chars.len() {
                let c = chars[i];
                if c.is_whitespace() || matches!(c, '(' | ')' | ',') {
                    break;
                }
                if c == '-' && chars.get(i + 1) == Some(&'>') {
                    break;
                }
                ident.push(c);
                col += 1;
                i += 1;
            }
            out.push(Spanned { tok: Tok::Ident(ident), line: start.0, col: start.1 });
        }
    }
    out
}

struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Cursor {
    fn new(text: &str) -> Self {
        let line = text.lines().count().max(1);
        let col = text.lines().last().map_or(1, |l| l.chars().count() + 1);
        Cursor { toks: tokenize(text), pos: 0, end: (line, col) }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |s| (s.line, s.col))
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::Syntax { line, col, msg: msg.into() })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.error(format!("expected {what}")),
        }
    }

    /// Skips a balanced parenthesised region; the opening paren is already consumed.
    fn skip_block(&mut self) -> Result<(), ParseError> {
        let mut depth = 1;
        while depth > 0 {
            match self.next() {
                Some(Tok::LParen) => depth += 1,
                Some(Tok::RParen) => depth -= 1,
                Some(_) => {}
                None => return self.error("unterminated block"),
            }
        }
        Ok(())
    }
}

enum Block {
    Var(Vec<String>),
    Rules(usize),
}

/// Splits the file into its top-level blocks. Rule blocks are returned as
/// cursor positions so that they can be parsed once all variables are known.
fn blocks(cur: &mut Cursor) -> Result<Vec<Block>, ParseError> {
    let mut out = Vec::new();
    while cur.peek().is_some() {
        cur.expect(Tok::LParen, "`(`")?;
        let (line, col) = cur.here();
        let kw = cur.ident("block keyword")?;
        match kw.as_str() {
            "VAR" => {
                let mut vars = Vec::new();
                while let Some(Tok::Ident(_)) = cur.peek() {
                    vars.push(cur.ident("variable")?);
                }
                cur.expect(Tok::RParen, "`)` closing VAR")?;
                out.push(Block::Var(vars));
            }
            "RULES" => {
                out.push(Block::Rules(cur.pos));
                cur.skip_block()?;
            }
            "COMMENT" => cur.skip_block()?,
            "STRATEGY" | "THEORY" => {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    msg: format!("{kw} annotations are not supported"),
                })
            }
            other => {
                return Err(ParseError::Syntax { line, col, msg: format!("unknown block `{other}`") })
            }
        }
    }
    Ok(out)
}

/// Parses a TPDB term rewrite system.
pub fn parse_trs(text: &str) -> Result<Trs, ParseError> {
    let mut cur = Cursor::new(text);
    let blocks = blocks(&mut cur)?;
    let vars: HashSet<String> = blocks
        .iter()
        .filter_map(|b| match b {
            Block::Var(v) => Some(v.iter().cloned()),
            _ => None,
        })
        .flatten()
        .collect();
    let mut rules = Vec::new();
    for b in &blocks {
        if let Block::Rules(pos) = b {
            cur.pos = *pos;
            while cur.peek() != Some(&Tok::RParen) {
                let lhs = parse_term(&mut cur, &vars)?;
                cur.expect(Tok::Arrow, "`->`")?;
                let rhs = parse_term(&mut cur, &vars)?;
                if let Some(Tok::Ident(s)) = cur.peek() {
                    if s == "|" {
                        return cur.error("conditional rules are not supported");
                    }
                }
                rules.push(Rule::new(lhs, rhs));
                if cur.peek() == Some(&Tok::Comma) {
                    cur.pos += 1;
                }
            }
        }
    }
    Ok(Trs::new(rules, SystemKind::Term)?)
}

fn parse_term(cur: &mut Cursor, vars: &HashSet<String>) -> Result<Term, ParseError> {
    let name = cur.ident("term")?;
    if name == "|" || name == "==" {
        return cur.error(format!("unexpected `{name}`"));
    }
    if cur.peek() != Some(&Tok::LParen) {
        return Ok(if vars.contains(&name) {
            Term::var(name)
        } else {
            Term::constant(name)
        });
    }
    if vars.contains(&name) {
        return cur.error(format!("variable `{name}` applied to arguments"));
    }
    cur.pos += 1;
    let mut args = Vec::new();
    if cur.peek() == Some(&Tok::RParen) {
        cur.pos += 1;
        return Ok(Term::app(name, args));
    }
    loop {
        args.push(parse_term(cur, vars)?);
        match cur.next() {
            Some(Tok::Comma) => continue,
            Some(Tok::RParen) => break,
            _ => {
                cur.pos -= 1;
                return cur.error("expected `,` or `)` in argument list");
            }
        }
    }
    Ok(Term::app(name, args))
}

/// The single variable every string rule is applied to.
pub const SRS_VARIABLE: &str = "x";

/// Parses a TPDB string rewrite system into a unary term rewrite system.
/// The leftmost letter becomes the outermost symbol.
pub fn parse_srs(text: &str) -> Result<Trs, ParseError> {
    let mut cur = Cursor::new(text);
    let blocks = blocks(&mut cur)?;
    let var: Arc<str> = Arc::from(SRS_VARIABLE);
    let mut rules = Vec::new();
    for b in &blocks {
        match b {
            Block::Var(v) if !v.is_empty() => {
                return Err(ParseError::Syntax {
                    line: 1,
                    col: 1,
                    msg: "string rewrite systems have no variables".into(),
                })
            }
            Block::Var(_) => {}
            Block::Rules(pos) => {
                cur.pos = *pos;
                while cur.peek() != Some(&Tok::RParen) {
                    let lhs = letters(&mut cur)?;
                    if lhs.is_empty() {
                        return cur.error("empty left-hand side");
                    }
                    cur.expect(Tok::Arrow, "`->`")?;
                    let rhs = letters(&mut cur)?;
                    if rhs.is_empty() {
                        return cur.error("empty right-hand side");
                    }
                    rules.push(Rule::new(string_term(&lhs, &var), string_term(&rhs, &var)));
                    match cur.peek() {
                        Some(Tok::Comma) => cur.pos += 1,
                        Some(Tok::RParen) => {}
                        _ => return cur.error("expected `,` between string rules"),
                    }
                }
            }
        }
    }
    Ok(Trs::new(rules, SystemKind::String)?)
}

fn letters(cur: &mut Cursor) -> Result<Vec<String>, ParseError> {
    let mut out = Vec::new();
    while let Some(Tok::Ident(_)) = cur.peek() {
        out.push(cur.ident("letter")?);
    }
    Ok(out)
}

fn string_term(word: &[String], var: &Arc<str>) -> Term {
    word.iter()
        .rev()
        .fold(Term::Var(var.clone()), |t, a| Term::app(a.as_str(), vec![t]))
}

/// Dispatches on the system kind.
pub fn parse_system(text: &str, kind: SystemKind) -> Result<Trs, ParseError> {
    match kind {
        SystemKind::Term => parse_trs(text),
        SystemKind::String => parse_srs(text),
    }
}
