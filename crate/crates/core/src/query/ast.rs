//! Query syntax tree and its parser.
//!
//! Grammar (closure binds tighter than concatenation, which binds tighter
//! than alternation):
//!
//! ```text
//! pattern := alt
//! alt     := concat ('|' concat)*
//! concat  := closure+
//! closure := atom ('*' | '+' | '?')?
//! atom    := LABEL | '^' LABEL | '(' alt ')'
//! LABEL   := [A-Za-z0-9_:.]+ | '\'' any-chars-but-quote '\''
//! ```
//!
//! Whitespace separates concatenated atoms. `^a` is the inverse of label `a`,
//! i.e. an `a` edge walked from its head to its tail.

use std::fmt;

use thiserror::Error;

/// A label or inverse label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    pub label: String,
    pub inverted: bool,
}

impl Symbol {
    pub fn new(label: impl Into<String>, inverted: bool) -> Self {
        Self {
            label: label.into(),
            inverted,
        }
    }

    pub fn forward(label: impl Into<String>) -> Self {
        Self::new(label, false)
    }

    pub fn inverse(label: impl Into<String>) -> Self {
        Self::new(label, true)
    }

    /// The same label walked the other way.
    pub fn flipped(&self) -> Self {
        Self::new(self.label.clone(), !self.inverted)
    }

    /// Splits a whitespace-separated word such as `"a ^b c"` into symbols.
    pub fn parse_word(text: &str) -> Vec<Symbol> {
        text.split_whitespace()
            .map(|tok| match tok.strip_prefix('^') {
                Some(rest) => Symbol::inverse(rest),
                None => Symbol::forward(tok),
            })
            .collect()
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "^")?;
        }
        if is_bare_label(&self.label) {
            write!(f, "{}", self.label)
        } else {
            write!(f, "'{}'", self.label)
        }
    }
}

fn is_label_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | ':' | '.')
}

fn is_bare_label(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_label_char)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RegexAst {
    Label(Symbol),
    Concat(Vec<RegexAst>),
    Alt(Vec<RegexAst>),
    Star(Box<RegexAst>),
    Plus(Box<RegexAst>),
    Opt(Box<RegexAst>),
}

impl RegexAst {
    pub fn label(name: impl Into<String>) -> Self {
        RegexAst::Label(Symbol::forward(name))
    }

    pub fn inverse(name: impl Into<String>) -> Self {
        RegexAst::Label(Symbol::inverse(name))
    }

    /// Concatenation; nested concatenations are flattened and a single
    /// child is returned as is.
    pub fn concat(children: Vec<RegexAst>) -> Self {
        let mut flat = Vec::with_capacity(children.len());
        for c in children {
            match c {
                RegexAst::Concat(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            RegexAst::Concat(flat)
        }
    }

    /// Alternation, flattened like [`RegexAst::concat`].
    pub fn alt(children: Vec<RegexAst>) -> Self {
        let mut flat = Vec::with_capacity(children.len());
        for c in children {
            match c {
                RegexAst::Alt(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            RegexAst::Alt(flat)
        }
    }

    pub fn star(child: RegexAst) -> Self {
        RegexAst::Star(Box::new(child))
    }

    pub fn plus(child: RegexAst) -> Self {
        RegexAst::Plus(Box::new(child))
    }

    pub fn opt(child: RegexAst) -> Self {
        RegexAst::Opt(Box::new(child))
    }

    /// The pattern matching every word of `self` read backwards with each
    /// symbol inverted.
    pub fn reversed(&self) -> Self {
        match self {
            RegexAst::Label(s) => RegexAst::Label(s.flipped()),
            RegexAst::Concat(cs) => RegexAst::Concat(cs.iter().rev().map(RegexAst::reversed).collect()),
            RegexAst::Alt(cs) => RegexAst::Alt(cs.iter().map(RegexAst::reversed).collect()),
            RegexAst::Star(c) => RegexAst::star(c.reversed()),
            RegexAst::Plus(c) => RegexAst::plus(c.reversed()),
            RegexAst::Opt(c) => RegexAst::opt(c.reversed()),
        }
    }

    /// Every symbol occurring in the pattern, sorted and deduplicated.
    pub fn symbols(&self) -> Vec<Symbol> {
        fn walk(node: &RegexAst, out: &mut Vec<Symbol>) {
            match node {
                RegexAst::Label(s) => out.push(s.clone()),
                RegexAst::Concat(cs) | RegexAst::Alt(cs) => cs.iter().for_each(|c| walk(c, out)),
                RegexAst::Star(c) | RegexAst::Plus(c) | RegexAst::Opt(c) => walk(c, out),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }

    pub fn depth(&self) -> usize {
        match self {
            RegexAst::Label(_) => 1,
            RegexAst::Concat(cs) | RegexAst::Alt(cs) => 1 + cs.iter().map(RegexAst::depth).max().unwrap_or(0),
            RegexAst::Star(c) | RegexAst::Plus(c) | RegexAst::Opt(c) => 1 + c.depth(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            RegexAst::Alt(_) => 0,
            RegexAst::Concat(_) => 1,
            RegexAst::Star(_) | RegexAst::Plus(_) | RegexAst::Opt(_) => 2,
            RegexAst::Label(_) => 3,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            RegexAst::Label(s) => write!(f, "{s}"),
            RegexAst::Concat(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    c.fmt_at(f, 2)?;
                }
                Ok(())
            }
            RegexAst::Alt(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " | ")?;
                    }
                    c.fmt_at(f, 1)?;
                }
                Ok(())
            }
            RegexAst::Star(c) => {
                c.fmt_at(f, 3)?;
                write!(f, "*")
            }
            RegexAst::Plus(c) => {
                c.fmt_at(f, 3)?;
                write!(f, "+")
            }
            RegexAst::Opt(c) => {
                c.fmt_at(f, 3)?;
                write!(f, "?")
            }
        }
    }
}

impl fmt::Display for RegexAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

/// Syntax error; `column` is 1-based and counts characters.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at column {column}: {message}")]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Label(String),
    Caret,
    LParen,
    RParen,
    Pipe,
    Star,
    Plus,
    Question,
}

fn describe(tok: Option<&Token>) -> String {
    match tok {
        None => "end of pattern".into(),
        Some(Token::Label(l)) => format!("label '{l}'"),
        Some(Token::Caret) => "'^'".into(),
        Some(Token::LParen) => "'('".into(),
        Some(Token::RParen) => "')'".into(),
        Some(Token::Pipe) => "'|'".into(),
        Some(Token::Star) => "'*'".into(),
        Some(Token::Plus) => "'+'".into(),
        Some(Token::Question) => "'?'".into(),
    }
}

fn tokenize(text: &str) -> Result<(Vec<(Token, usize)>, usize), ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        let simple = match c {
            '^' => Some(Token::Caret),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            '|' => Some(Token::Pipe),
            '*' => Some(Token::Star),
            '+' => Some(Token::Plus),
            '?' => Some(Token::Question),
            _ => None,
        };
        if let Some(tok) = simple {
            tokens.push((tok, column));
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c == '\'' {
            let start = i + 1;
            let end = chars[start..]
                .iter()
                .position(|&c| c == '\'')
                .map(|p| start + p)
                .ok_or_else(|| ParseError {
                    column,
                    message: "unterminated quoted label".into(),
                })?;
            if end == start {
                return Err(ParseError {
                    column,
                    message: "empty quoted label".into(),
                });
            }
            tokens.push((Token::Label(chars[start..end].iter().collect()), column));
            i = end + 1;
        } else if is_label_char(c) {
            let start = i;
            while i < chars.len() && is_label_char(chars[i]) {
                i += 1;
            }
            tokens.push((Token::Label(chars[start..i].iter().collect()), column));
        } else {
            return Err(ParseError {
                column,
                message: format!("unexpected character '{c}'"),
            });
        }
    }
    Ok((tokens, chars.len() + 1))
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end_column: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end_column, |&(_, c)| c)
    }

    fn error(&self, message: String) -> ParseError {
        ParseError {
            column: self.column(),
            message,
        }
    }

    fn alt(&mut self) -> Result<RegexAst, ParseError> {
        let mut branches = vec![self.concat()?];
        while self.peek() == Some(&Token::Pipe) {
            self.pos += 1;
            branches.push(self.concat()?);
        }
        Ok(RegexAst::alt(branches))
    }

    fn concat(&mut self) -> Result<RegexAst, ParseError> {
        let mut parts = vec![self.closure()?];
        while matches!(self.peek(), Some(Token::Label(_) | Token::Caret | Token::LParen)) {
            parts.push(self.closure()?);
        }
        Ok(RegexAst::concat(parts))
    }

    fn closure(&mut self) -> Result<RegexAst, ParseError> {
        let atom = self.atom()?;
        let node = match self.peek() {
            Some(Token::Star) => RegexAst::star(atom),
            Some(Token::Plus) => RegexAst::plus(atom),
            Some(Token::Question) => RegexAst::opt(atom),
            _ => return Ok(atom),
        };
        self.pos += 1;
        Ok(node)
    }

    fn atom(&mut self) -> Result<RegexAst, ParseError> {
        match self.peek().cloned() {
            Some(Token::Label(name)) => {
                self.pos += 1;
                Ok(RegexAst::label(name))
            }
            Some(Token::Caret) => {
                self.pos += 1;
                match self.peek().cloned() {
                    Some(Token::Label(name)) => {
                        self.pos += 1;
                        Ok(RegexAst::inverse(name))
                    }
                    other => Err(self.error(format!("expected label after '^', found {}", describe(other.as_ref())))),
                }
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.alt()?;
                if self.peek() != Some(&Token::RParen) {
                    return Err(self.error(format!("expected ')', found {}", describe(self.peek()))));
                }
                self.pos += 1;
                Ok(inner)
            }
            other => Err(self.error(format!("expected label or '(', found {}", describe(other.as_ref())))),
        }
    }
}

/// Parses a pattern into a syntax tree.
pub fn parse_query(text: &str) -> Result<RegexAst, ParseError> {
    let (tokens, end_column) = tokenize(text)?;
    if tokens.is_empty() {
        return Err(ParseError {
            column: 1,
            message: "empty pattern".into(),
        });
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        end_column,
    };
    let ast = parser.alt()?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.error(format!("unexpected {}", describe(parser.peek()))));
    }
    Ok(ast)
}
