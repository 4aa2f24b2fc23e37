//! Abstract syntax trees and their prefix serialization.
//!
//! Trees serialize as `(fun child1 child2 ...)`; a node without children is
//! written as its bare function name, and a surface token (only found under
//! `UnkChunk` nodes) is written double-quoted. The parser also accepts a
//! parenthesized leaf such as `(water_NP)`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A node of an abstract syntax tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AbstractTree {
    /// Application of an abstract function to its arguments.
    App { fun: String, args: Vec<AbstractTree> },
    /// A surface token carried verbatim by an `UnkChunk` node.
    Token(String),
}

/// Root-to-node path as a list of child indices.
pub type TreePath = Vec<usize>;

impl AbstractTree {
    pub fn leaf(fun: impl Into<String>) -> Self {
        AbstractTree::App {
            fun: fun.into(),
            args: Vec::new(),
        }
    }

    pub fn app(fun: impl Into<String>, args: Vec<AbstractTree>) -> Self {
        AbstractTree::App {
            fun: fun.into(),
            args,
        }
    }

    pub fn token(tok: impl Into<String>) -> Self {
        AbstractTree::Token(tok.into())
    }

    /// Function name, or the token text for a token node.
    pub fn fun(&self) -> &str {
        match self {
            AbstractTree::App { fun, .. } => fun,
            AbstractTree::Token(t) => t,
        }
    }

    pub fn args(&self) -> &[AbstractTree] {
        match self {
            AbstractTree::App { args, .. } => args,
            AbstractTree::Token(_) => &[],
        }
    }

    pub fn is_token(&self) -> bool {
        matches!(self, AbstractTree::Token(_))
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.args().iter().map(AbstractTree::size).sum::<usize>()
    }

    /// Height, counting a leaf as depth 1.
    pub fn depth(&self) -> usize {
        1 + self.args().iter().map(AbstractTree::depth).max().unwrap_or(0)
    }

    pub fn subtree(&self, path: &[usize]) -> Option<&AbstractTree> {
        let mut node = self;
        for &i in path {
            node = node.args().get(i)?;
        }
        Some(node)
    }

    /// True if `other` occurs as a subtree of `self` (including `self`).
    pub fn contains_subtree(&self, other: &AbstractTree) -> bool {
        self == other || self.args().iter().any(|c| c.contains_subtree(other))
    }

    /// All function names in pre-order.
    pub fn functions(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_functions(&mut out);
        out
    }

    fn collect_functions<'a>(&'a self, out: &mut Vec<&'a str>) {
        if let AbstractTree::App { fun, args } = self {
            out.push(fun);
            for a in args {
                a.collect_functions(out);
            }
        }
    }
}

fn write_token(f: &mut fmt::Formatter<'_>, tok: &str) -> fmt::Result {
    f.write_str("\"")?;
    for c in tok.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            c => write!(f, "{c}")?,
        }
    }
    f.write_str("\"")
}

impl fmt::Display for AbstractTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbstractTree::Token(t) => write_token(f, t),
            AbstractTree::App { fun, args } if args.is_empty() => f.write_str(fun),
            AbstractTree::App { fun, args } => {
                write!(f, "({fun}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

// The order agrees with byte-wise comparison of the serialized forms:
// tokens (`"`) sort before applications (`(`), which sort before bare leaves.
impl Ord for AbstractTree {
    fn cmp(&self, other: &Self) -> Ordering {
        use AbstractTree::*;
        fn rank(t: &AbstractTree) -> u8 {
            match t {
                Token(_) => 0,
                App { args, .. } if !args.is_empty() => 1,
                App { .. } => 2,
            }
        }
        match (self, other) {
            (Token(_), Token(_)) => self.to_string().cmp(&other.to_string()),
            (App { fun: fa, args: aa }, App { fun: fb, args: ab })
                if !aa.is_empty() && !ab.is_empty() =>
            {
                fa.cmp(fb).then_with(|| {
                    for (x, y) in aa.iter().zip(ab) {
                        match x.cmp(y) {
                            Ordering::Equal => continue,
                            o => return o,
                        }
                    }
                    // `)` sorts after the space that would introduce another child.
                    ab.len().cmp(&aa.len())
                })
            }
            (App { fun: fa, args: aa }, App { fun: fb, args: ab })
                if aa.is_empty() && ab.is_empty() =>
            {
                fa.cmp(fb)
            }
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

impl PartialOrd for AbstractTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("tree syntax error at byte {pos}: {message}")]
pub struct TreeSyntaxError {
    pub pos: usize,
    pub message: String,
}

/// Characters allowed in function names.
pub fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_') && chars.all(is_ident_char)
}

struct TreeReader<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> TreeReader<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, TreeSyntaxError> {
        Err(TreeSyntaxError {
            pos: self.pos,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn ident(&mut self) -> Result<String, TreeSyntaxError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !is_ident_char(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        let name = &self.src[start..self.pos];
        if !is_identifier(name) {
            self.pos = start;
            return self.err("expected function name");
        }
        Ok(name.to_string())
    }

    fn quoted(&mut self) -> Result<String, TreeSyntaxError> {
        self.pos += 1;
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return self.err("unterminated token"),
                Some('"') => {
                    self.pos += 1;
                    return Ok(out);
                }
                Some('\\') => {
                    self.pos += 1;
                    match self.peek() {
                        Some(c @ ('"' | '\\')) => {
                            out.push(c);
                            self.pos += 1;
                        }
                        _ => return self.err("bad escape"),
                    }
                }
                Some(c) => {
                    out.push(c);
                    self.pos += c.len_utf8();
                }
            }
        }
    }

    fn tree(&mut self) -> Result<AbstractTree, TreeSyntaxError> {
        self.skip_ws();
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some('"') => Ok(AbstractTree::Token(self.quoted()?)),
            Some('(') => {
                self.pos += 1;
                self.skip_ws();
                let fun = self.ident()?;
                let mut args = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(')') => {
                            self.pos += 1;
                            return Ok(AbstractTree::App { fun, args });
                        }
                        None => return self.err("missing `)`"),
                        _ => args.push(self.tree()?),
                    }
                }
            }
            Some(_) => Ok(AbstractTree::leaf(self.ident()?)),
        }
    }
}

impl FromStr for AbstractTree {
    type Err = TreeSyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut r = TreeReader { src: s, pos: 0 };
        let t = r.tree()?;
        r.skip_ws();
        if r.pos != s.len() {
            return r.err("trailing input");
        }
        Ok(t)
    }
}
