//! Abstract and concrete syntax, and the line-oriented grammar file format.
//!
//! ```text
//! -- comments run to the end of the line
//! cat N ; cat CN ;
//! fun UseN : N -> CN ;
//! fun apple_N : N ;
//! lin eng apple_N = "apple" ;
//! lin eng UseN = $0 ;
//! start CN ;
//! chunkcats CN ;
//! ```
//!
//! Statements end with `;` (the final statement of a file may omit it).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::tree::{is_ident_char, is_identifier};

/// Root of a chunk-level tree built by the chunking fallback.
pub const CHUNKS: &str = "Chunks";
/// Wrapper around a surface token that no chunk category covers.
pub const UNK_CHUNK: &str = "UnkChunk";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Category(String);

impl Category {
    pub fn new(name: impl Into<String>) -> Self {
        Category(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Category {
    fn from(s: &str) -> Self {
        Category(s.to_string())
    }
}

impl PartialEq<str> for Category {
    fn eq(&self, other: &str) -> bool {
        self.0 == other
    }
}

impl PartialEq<&str> for Category {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDecl {
    pub name: String,
    pub args: Vec<Category>,
    pub result: Category,
}

impl FunctionDecl {
    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

impl fmt::Display for FunctionDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fun {} :", self.name)?;
        for a in &self.args {
            write!(f, " {a} ->")?;
        }
        write!(f, " {} ;", self.result)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinItem {
    Token(String),
    Arg(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearizationRule {
    pub function: String,
    pub items: Vec<LinItem>,
}

impl LinearizationRule {
    /// A rule whose whole yield is its only argument.
    pub fn is_pass_through(&self) -> bool {
        matches!(self.items.as_slice(), [LinItem::Arg(0)])
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GrammarError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: undeclared category `{name}`")]
    UndeclaredCategory { line: usize, name: String },
    #[error("line {line}: undeclared function `{name}`")]
    UndeclaredFunction { line: usize, name: String },
    #[error("line {line}: category `{name}` declared twice")]
    DuplicateCategory { line: usize, name: String },
    #[error("line {line}: function `{name}` declared twice")]
    DuplicateFunction { line: usize, name: String },
    #[error("line {line}: second `{language}` rule for `{function}`")]
    DuplicateRule {
        line: usize,
        function: String,
        language: String,
    },
    #[error("line {line}: rule for `{function}`: {message}")]
    BadRule {
        line: usize,
        function: String,
        message: String,
    },
    #[error("line {line}: `{name}` is reserved")]
    Reserved { line: usize, name: String },
    #[error("language `{language}`: cycle of pass-through rules through {categories:?}")]
    UnaryCycle {
        language: String,
        categories: Vec<String>,
    },
    #[error("grammar declares no categories")]
    NoCategories,
}

/// One abstract syntax with any number of concrete syntaxes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    categories: Vec<Category>,
    functions: Vec<FunctionDecl>,
    fun_index: HashMap<String, usize>,
    concretes: BTreeMap<String, BTreeMap<String, LinearizationRule>>,
    start: Category,
    chunk_categories: Vec<Category>,
}

impl Grammar {
    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn has_category(&self, name: &str) -> bool {
        self.categories.iter().any(|c| c == name)
    }

    /// Functions in declaration order.
    pub fn functions(&self) -> &[FunctionDecl] {
        &self.functions
    }

    pub fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.fun_index.get(name).map(|&i| &self.functions[i])
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.concretes.keys().map(String::as_str)
    }

    pub fn has_language(&self, lang: &str) -> bool {
        self.concretes.contains_key(lang)
    }

    pub fn rules(&self, lang: &str) -> Option<&BTreeMap<String, LinearizationRule>> {
        self.concretes.get(lang)
    }

    pub fn rule(&self, lang: &str, fun: &str) -> Option<&LinearizationRule> {
        self.concretes.get(lang)?.get(fun)
    }

    pub fn start(&self) -> &Category {
        &self.start
    }

    pub fn chunk_categories(&self) -> &[Category] {
        &self.chunk_categories
    }

    pub fn is_chunk_category(&self, cat: &Category) -> bool {
        self.chunk_categories.contains(cat)
    }
}

/// Serializes back to the grammar file format.
impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.categories {
            writeln!(f, "cat {c} ;")?;
        }
        for d in &self.functions {
            writeln!(f, "{d}")?;
        }
        writeln!(f, "start {} ;", self.start)?;
        if !self.chunk_categories.is_empty() {
            write!(f, "chunkcats")?;
            for c in &self.chunk_categories {
                write!(f, " {c}")?;
            }
            writeln!(f, " ;")?;
        }
        for (lang, rules) in &self.concretes {
            for d in &self.functions {
                if let Some(rule) = rules.get(&d.name) {
                    write!(f, "lin {lang} {} =", d.name)?;
                    for item in &rule.items {
                        match item {
                            LinItem::Token(t) => write!(f, " {}", quote(t))?,
                            LinItem::Arg(k) => write!(f, " ${k}")?,
                        }
                    }
                    writeln!(f, " ;")?;
                }
            }
        }
        Ok(())
    }
}

fn quote(t: &str) -> String {
    let mut s = String::with_capacity(t.len() + 2);
    s.push('"');
    for c in t.chars() {
        if c == '"' || c == '\\' {
            s.push('\\');
        }
        s.push(c);
    }
    s.push('"');
    s
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    ArgRef(usize),
    Colon,
    Arrow,
    Equals,
    Semi,
}

fn lex(source: &str) -> Result<Vec<(Tok, usize)>, GrammarError> {
    let mut out = Vec::new();
    for (lineno, line) in source.lines().enumerate() {
        let line_no = lineno + 1;
        let syntax = |message: String| GrammarError::Syntax {
            line: line_no,
            message,
        };
        let mut chars = line.char_indices().peekable();
        while let Some(&(i, c)) = chars.peek() {
            if c.is_whitespace() {
                chars.next();
            } else if line[i..].starts_with("--") {
                break;
            } else if line[i..].starts_with("->") {
                chars.next();
                chars.next();
                out.push((Tok::Arrow, line_no));
            } else if c == ':' || c == '=' || c == ';' {
                chars.next();
                let tok = match c {
                    ':' => Tok::Colon,
                    '=' => Tok::Equals,
                    _ => Tok::Semi,
                };
                out.push((tok, line_no));
            } else if c == '$' {
                chars.next();
                let mut digits = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    digits.push(d);
                    chars.next();
                }
                let k = digits
                    .parse()
                    .map_err(|_| syntax("expected argument number after `$`".into()))?;
                out.push((Tok::ArgRef(k), line_no));
            } else if c == '"' {
                chars.next();
                let mut s = String::new();
                let mut closed = false;
                while let Some((_, d)) = chars.next() {
                    match d {
                        '"' => {
                            closed = true;
                            break;
                        }
                        '\\' => match chars.next() {
                            Some((_, e @ ('"' | '\\'))) => s.push(e),
                            _ => return Err(syntax("bad escape in token".into())),
                        },
                        d => s.push(d),
                    }
                }
                if !closed {
                    return Err(syntax("unterminated token".into()));
                }
                out.push((Tok::Str(s), line_no));
            } else if is_ident_char(c) {
                let mut s = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if !is_ident_char(d) {
                        break;
                    }
                    s.push(d);
                    chars.next();
                }
                if !is_identifier(&s) {
                    return Err(syntax(format!("bad identifier `{s}`")));
                }
                out.push((Tok::Ident(s), line_no));
            } else {
                return Err(syntax(format!("unexpected character `{c}`")));
            }
        }
    }
    Ok(out)
}

enum Stmt {
    Cat(Vec<String>),
    Fun {
        name: String,
        sig: Vec<String>,
    },
    Lin {
        lang: String,
        fun: String,
        items: Vec<LinItem>,
    },
    Start(String),
    ChunkCats(Vec<String>),
}

fn parse_stmt(toks: &[Tok], line: usize) -> Result<Stmt, GrammarError> {
    let syntax = |message: &str| GrammarError::Syntax {
        line,
        message: message.to_string(),
    };
    let idents = |ts: &[Tok]| -> Result<Vec<String>, GrammarError> {
        ts.iter()
            .map(|t| match t {
                Tok::Ident(s) => Ok(s.clone()),
                _ => Err(syntax("expected category names")),
            })
            .collect()
    };
    let Some(Tok::Ident(kw)) = toks.first() else {
        return Err(syntax("statement must start with a keyword"));
    };
    match kw.as_str() {
        "cat" => {
            let names = idents(&toks[1..])?;
            if names.is_empty() {
                return Err(syntax("`cat` needs at least one name"));
            }
            Ok(Stmt::Cat(names))
        }
        "fun" => {
            let (Some(Tok::Ident(name)), Some(Tok::Colon)) = (toks.get(1), toks.get(2)) else {
                return Err(syntax("expected `fun <name> : <type>`"));
            };
            let mut sig = Vec::new();
            let mut rest = &toks[3..];
            loop {
                match rest {
                    [Tok::Ident(c)] => {
                        sig.push(c.clone());
                        break;
                    }
                    [Tok::Ident(c), Tok::Arrow, tail @ ..] if !tail.is_empty() => {
                        sig.push(c.clone());
                        rest = tail;
                    }
                    _ => return Err(syntax("malformed function type")),
                }
            }
            Ok(Stmt::Fun {
                name: name.clone(),
                sig,
            })
        }
        "lin" => {
            let (Some(Tok::Ident(lang)), Some(Tok::Ident(fun)), Some(Tok::Equals)) =
                (toks.get(1), toks.get(2), toks.get(3))
            else {
                return Err(syntax("expected `lin <lang> <fun> = <items>`"));
            };
            let items = toks[4..]
                .iter()
                .map(|t| match t {
                    Tok::Str(s) => Ok(LinItem::Token(s.clone())),
                    Tok::ArgRef(k) => Ok(LinItem::Arg(*k)),
                    _ => Err(syntax("linearization items are quoted tokens or `$k`")),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Stmt::Lin {
                lang: lang.clone(),
                fun: fun.clone(),
                items,
            })
        }
        "start" => match idents(&toks[1..])?.as_slice() {
            [c] => Ok(Stmt::Start(c.clone())),
            _ => Err(syntax("`start` takes exactly one category")),
        },
        "chunkcats" => Ok(Stmt::ChunkCats(idents(&toks[1..])?)),
        other => Err(syntax(&format!("unknown keyword `{other}`"))),
    }
}

/// Parses and checks a grammar file.
pub fn load_grammar(source: &str) -> Result<Grammar, GrammarError> {
    let toks = lex(source)?;
    let mut stmts = Vec::new();
    let mut cur: Vec<Tok> = Vec::new();
    let mut cur_line = 0;
    for (tok, line) in toks {
        if cur.is_empty() {
            cur_line = line;
        }
        if tok == Tok::Semi {
            if cur.is_empty() {
                return Err(GrammarError::Syntax {
                    line,
                    message: "empty statement".into(),
                });
            }
            stmts.push((parse_stmt(&cur, cur_line)?, cur_line));
            cur.clear();
        } else {
            cur.push(tok);
        }
    }
    if !cur.is_empty() {
        stmts.push((parse_stmt(&cur, cur_line)?, cur_line));
    }

    let mut categories: Vec<Category> = Vec::new();
    let mut cat_set = HashSet::new();
    for (stmt, line) in &stmts {
        if let Stmt::Cat(names) = stmt {
            for n in names {
                check_reserved(n, *line)?;
                if !cat_set.insert(n.clone()) {
                    return Err(GrammarError::DuplicateCategory {
                        line: *line,
                        name: n.clone(),
                    });
                }
                categories.push(Category::new(n.as_str()));
            }
        }
    }
    if categories.is_empty() {
        return Err(GrammarError::NoCategories);
    }
    let resolve = |name: &str, line: usize| -> Result<Category, GrammarError> {
        if cat_set.contains(name) {
            Ok(Category::new(name))
        } else {
            Err(GrammarError::UndeclaredCategory {
                line,
                name: name.to_string(),
            })
        }
    };

    let mut functions = Vec::new();
    let mut fun_index = HashMap::new();
    let mut start = None;
    let mut chunk_categories = Vec::new();
    for (stmt, line) in &stmts {
        match stmt {
            Stmt::Fun { name, sig } => {
                check_reserved(name, *line)?;
                let cats = sig
                    .iter()
                    .map(|c| resolve(c, *line))
                    .collect::<Result<Vec<_>, _>>()?;
                let (result, args) = cats.split_last().expect("signature is non-empty");
                if fun_index.insert(name.clone(), functions.len()).is_some() {
                    return Err(GrammarError::DuplicateFunction {
                        line: *line,
                        name: name.clone(),
                    });
                }
                functions.push(FunctionDecl {
                    name: name.clone(),
                    args: args.to_vec(),
                    result: result.clone(),
                });
            }
            Stmt::Start(c) => {
                if start.is_some() {
                    return Err(GrammarError::Syntax {
                        line: *line,
                        message: "`start` given twice".into(),
                    });
                }
                start = Some(resolve(c, *line)?);
            }
            Stmt::ChunkCats(cs) => {
                for c in cs {
                    let cat = resolve(c, *line)?;
                    if !chunk_categories.contains(&cat) {
                        chunk_categories.push(cat);
                    }
                }
            }
            Stmt::Cat(_) | Stmt::Lin { .. } => {}
        }
    }

    let mut concretes: BTreeMap<String, BTreeMap<String, LinearizationRule>> = BTreeMap::new();
    for (stmt, line) in &stmts {
        let Stmt::Lin { lang, fun, items } = stmt else {
            continue;
        };
        let line = *line;
        let Some(&fi) = fun_index.get(fun) else {
            return Err(GrammarError::UndeclaredFunction {
                line,
                name: fun.clone(),
            });
        };
        let bad = |message: String| GrammarError::BadRule {
            line,
            function: fun.clone(),
            message,
        };
        let arity = functions[fi].arity();
        if items.is_empty() {
            return Err(bad("linearization is empty".into()));
        }
        let mut seen = vec![false; arity];
        for item in items {
            match item {
                LinItem::Arg(k) if *k >= arity => {
                    return Err(bad(format!("argument ${k} out of range for arity {arity}")))
                }
                LinItem::Arg(k) if seen[*k] => {
                    return Err(bad(format!("argument ${k} used twice")))
                }
                LinItem::Arg(k) => seen[*k] = true,
                LinItem::Token(t) if t.is_empty() || t.chars().any(char::is_whitespace) => {
                    return Err(bad(format!("token {t:?} is empty or contains whitespace")))
                }
                LinItem::Token(_) => {}
            }
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(bad(format!("argument ${k} is never used")));
        }
        let rules = concretes.entry(lang.clone()).or_default();
        if rules.contains_key(fun) {
            return Err(GrammarError::DuplicateRule {
                line,
                function: fun.clone(),
                language: lang.clone(),
            });
        }
        rules.insert(
            fun.clone(),
            LinearizationRule {
                function: fun.clone(),
                items: items.clone(),
            },
        );
    }

    let grammar = Grammar {
        start: start.unwrap_or_else(|| categories[0].clone()),
        categories,
        functions,
        fun_index,
        concretes,
        chunk_categories,
    };
    for lang in grammar.concretes.keys() {
        pass_through_order(&grammar, lang)?;
    }
    Ok(grammar)
}

fn check_reserved(name: &str, line: usize) -> Result<(), GrammarError> {
    if name == CHUNKS || name == UNK_CHUNK {
        return Err(GrammarError::Reserved {
            line,
            name: name.to_string(),
        });
    }
    Ok(())
}

/// Orders categories so that for every pass-through rule `C <- B` in `lang`,
/// `B` comes before `C`. Fails on a cycle, which would make the set of trees
/// for a single span infinite.
pub(crate) fn pass_through_order(
    grammar: &Grammar,
    lang: &str,
) -> Result<Vec<Category>, GrammarError> {
    let n = grammar.categories.len();
    let idx: HashMap<&Category, usize> = grammar
        .categories
        .iter()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    let mut succ = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    if let Some(rules) = grammar.concretes.get(lang) {
        for rule in rules.values().filter(|r| r.is_pass_through()) {
            let decl = grammar.function(&rule.function).expect("rule checked at load");
            let (from, to) = (idx[&decl.args[0]], idx[&decl.result]);
            succ[from].push(to);
            indeg[to] += 1;
        }
    }
    // Kahn's algorithm, smallest index first for a stable order.
    let mut ready: std::collections::BTreeSet<usize> =
        (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &j in &succ[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                ready.insert(j);
            }
        }
    }
    if order.len() < n {
        let categories = (0..n)
            .filter(|&i| indeg[i] > 0)
            .map(|i| grammar.categories[i].to_string())
            .collect();
        return Err(GrammarError::UnaryCycle {
            language: lang.to_string(),
            categories,
        });
    }
    Ok(order
        .into_iter()
        .map(|i| grammar.categories[i].clone())
        .collect())
}
