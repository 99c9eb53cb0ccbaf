//! Tokenization shared by lexical similarity, keyword extraction and metrics.
//!
//! Tokens are maximal runs of alphanumeric characters, lowercased. Every
//! other character (whitespace, punctuation, symbols) separates tokens and
//! is dropped.

/// Splits `text` into lowercased alphanumeric tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Replaces line breaks with spaces so a value fits on one protocol line.
pub fn single_line(text: &str) -> String {
    text.chars()
        .map(|c| if c == '\n' || c == '\r' { ' ' } else { c })
        .collect()
}
