//! Detection of multilingual multiword-expression candidates by comparing
//! parse forests over a shared abstract syntax, and extraction of a bilingual
//! lexicon of German nominal compounds from phrase-table pairs.

pub mod check;
pub mod cli;
pub mod compound;
pub mod detect;
pub mod grammar;
pub mod parser;
pub mod phrase;
pub mod text;
pub mod tree;

pub use grammar::{load_grammar, Category, Grammar};
pub use tree::AbstractTree;
