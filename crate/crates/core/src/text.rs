//! Line-level input helpers shared by the file readers.

use std::fmt;

/// A skipped input line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineIssue {
    pub line: usize,
    pub message: String,
}

impl LineIssue {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        LineIssue {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for LineIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation() || matches!(c, '¿' | '¡' | '«' | '»' | '…' | '„' | '“' | '”' | '‘' | '’')
}

/// Whitespace tokenization with punctuation stripped from both ends of
/// every token. Case is preserved.
pub fn tokenize(sentence: &str) -> Vec<String> {
    sentence
        .split_whitespace()
        .map(|w| w.trim_matches(is_punct))
        .filter(|w| !w.is_empty())
        .map(String::from)
        .collect()
}
