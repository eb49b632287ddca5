//! Category → synonym lists, the stand-in for disambiguated synsets.
//!
//! The file format is line oriented:
//!
//! ```text
//! # comment
//! fuel: fuel | combustible | combustible material
//! barley:
//! ```
//!
//! Synonyms go through [`preprocess`](crate::corpus::preprocess), so a
//! synonym of several words becomes a multiword term. `\|`, `\#`, `\:` and
//! `\\` escape the separator characters.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use crate::corpus::preprocess;
use crate::error::{Error, Result};
use crate::vsm::Term;

/// Prefix accepted wherever a bundled data file may replace a path.
pub const BUILTIN_PREFIX: &str = "builtin:";

/// TOPICS category names of the Reuters newswire collection.
pub const REUTERS_TOPICS: &str = include_str!("../data/reuters-topics.txt");
/// Spelled-out names for the Reuters TOPICS, used by the direct approach.
pub const REUTERS_NAMES: &str = include_str!("../data/reuters-names.lex");
/// Sample synonym lexicon for the Reuters TOPICS. Hand-made; not a
/// reproduction of any lexical database.
pub const REUTERS_SAMPLE_LEXICON: &str = include_str!("../data/reuters-sample.lex");

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynsetMap {
    entries: BTreeMap<String, Vec<Term>>,
}

impl SynsetMap {
    pub fn get(&self, category: &str) -> Option<&[Term]> {
        self.entries.get(category).map(Vec::as_slice)
    }

    pub fn categories(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[Term])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Distinct terms over all entries.
    pub fn term_count(&self) -> usize {
        self.entries.values().flatten().collect::<HashSet<_>>().len()
    }
}

/// The terms a category name contributes on its own: the name is split on
/// `-`, and each piece is one (possibly multiword) term. `iron-steel`
/// yields `iron` and `steel`.
pub fn direct_terms(name: &str) -> Vec<Term> {
    let mut out = Vec::new();
    for piece in name.split('-') {
        let tokens = preprocess(piece);
        if !tokens.is_empty() {
            push_unique(&mut out, Term::new(tokens));
        }
    }
    out
}

fn push_unique(terms: &mut Vec<Term>, term: Term) {
    if !terms.contains(&term) {
        terms.push(term);
    }
}

/// Parses entries without injecting the category name. Used directly for
/// category-name override files, where `bop: balance of payments` must
/// *replace* the name.
pub fn parse_entries(text: &str) -> Result<Vec<(String, Vec<Term>)>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: String| Error::Lexicon {
            line: line_no,
            message,
        };
        let fields = split_unescaped(raw).map_err(err)?;
        let Some((category, synonyms)) = fields else {
            continue;
        };
        let category = category.trim().to_lowercase();
        if category.is_empty() {
            return Err(err("empty category name".into()));
        }
        if !seen.insert(category.clone()) {
            return Err(err(format!("duplicate category `{category}`")));
        }
        let mut terms = Vec::new();
        for syn in synonyms {
            let tokens = preprocess(&syn);
            if tokens.is_empty() {
                return Err(err(format!("empty synonym in entry `{category}`")));
            }
            push_unique(&mut terms, Term::new(tokens));
        }
        out.push((category, terms));
    }
    Ok(out)
}

/// Splits one line into `(category, synonyms)`, resolving escapes and
/// dropping comments. Blank and comment-only lines give `None`.
fn split_unescaped(line: &str) -> std::result::Result<Option<(String, Vec<String>)>, String> {
    let mut category: Option<String> = None;
    let mut fields: Vec<String> = Vec::new();
    let mut current = String::new();
    let mut chars = line.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => match chars.next() {
                Some(e @ ('|' | '#' | ':' | '\\')) => current.push(e),
                Some(e) => return Err(format!("unknown escape `\\{e}`")),
                None => return Err("dangling escape at end of line".into()),
            },
            '#' => break,
            ':' if category.is_none() => category = Some(std::mem::take(&mut current)),
            '|' if category.is_some() => fields.push(std::mem::take(&mut current)),
            _ => current.push(c),
        }
    }
    let Some(category) = category else {
        if current.trim().is_empty() {
            return Ok(None);
        }
        return Err("expected `category: synonym | ...`".into());
    };
    if !fields.is_empty() || !current.trim().is_empty() {
        fields.push(current);
    }
    Ok(Some((category, fields)))
}

/// Parses a lexicon, injecting each category's own name terms at the front
/// of its list when the file leaves them out.
pub fn parse_lexicon(text: &str) -> Result<SynsetMap> {
    let mut entries = BTreeMap::new();
    for (category, listed) in parse_entries(text)? {
        let mut terms = Vec::new();
        for t in direct_terms(&category).into_iter().chain(listed) {
            push_unique(&mut terms, t);
        }
        entries.insert(category, terms);
    }
    Ok(SynsetMap { entries })
}

/// Reads text from a path, or from bundled data when the path is
/// `builtin:<name>`.
pub fn read_source(path: &Path, builtin: impl Fn(&str) -> Option<&'static str>) -> Result<String> {
    let s = path.to_string_lossy();
    if let Some(name) = s.strip_prefix(BUILTIN_PREFIX) {
        return builtin(name)
            .map(str::to_string)
            .ok_or_else(|| Error::invalid(format!("no bundled data named `{name}`")));
    }
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Loads a lexicon file. `builtin:reuters` selects the bundled sample.
pub fn load_lexicon(path: &Path) -> Result<SynsetMap> {
    let text = read_source(path, |name| (name == "reuters").then_some(REUTERS_SAMPLE_LEXICON))?;
    parse_lexicon(&text)
}

/// All synonym terms of a category; categories missing from the map fall
/// back to their own name terms.
pub fn expand_category(category: &str, m: &SynsetMap) -> Vec<Term> {
    match m.get(category) {
        Some(terms) => terms.to_vec(),
        None => direct_terms(category),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        Term::parse(s)
    }

    #[test]
    fn fuel_entry() {
        let m = parse_lexicon("fuel: fuel | combustible | combustible material\n").unwrap();
        assert_eq!(
            m.get("fuel").unwrap(),
            &[t("fuel"), t("combustible"), t("combustible material")]
        );
        assert_eq!(
            expand_category("fuel", &m),
            vec![t("fuel"), t("combustible"), t("combustible material")]
        );
    }

    #[test]
    fn self_injection() {
        let m = parse_lexicon("barley:\ncrude: petroleum\n").unwrap();
        assert_eq!(m.get("barley").unwrap(), &[t("barley")]);
        assert_eq!(m.get("crude").unwrap(), &[t("crude"), t("petroleum")]);
    }

    #[test]
    fn empty_and_comments() {
        assert!(parse_lexicon("").unwrap().is_empty());
        let m = parse_lexicon("# header\n\n  # indented\nwheat: grain # trailing\n").unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.get("wheat").unwrap(), &[t("wheat"), t("grain")]);
    }

    #[test]
    fn fallback_and_hyphen_split() {
        let m = SynsetMap::default();
        assert_eq!(expand_category("grain", &m), vec![t("grain")]);
        assert_eq!(expand_category("iron-steel", &m), vec![t("iron"), t("steel")]);
        assert_eq!(direct_terms("balance of payments"), vec![t("balance of payments")]);
    }

    #[test]
    fn format_errors_carry_line_numbers() {
        let dup = parse_lexicon("a: b\n\na: c\n").unwrap_err();
        assert!(matches!(dup, Error::Lexicon { line: 3, .. }), "{dup}");
        let empty = parse_lexicon("a: b || c\n").unwrap_err();
        assert!(matches!(empty, Error::Lexicon { line: 1, .. }));
        let numeric = parse_lexicon("x:\ny: 1987\n").unwrap_err();
        assert!(matches!(numeric, Error::Lexicon { line: 2, .. }));
        let esc = parse_lexicon("a: b \\q\n").unwrap_err();
        assert!(esc.to_string().contains("unknown escape"), "{esc}");
        let no_colon = parse_lexicon("just words\n").unwrap_err();
        assert!(matches!(no_colon, Error::Lexicon { line: 1, .. }));
    }

    #[test]
    fn escapes_resolve() {
        let entries = parse_entries("a\\:b: x\\|y | z\\#w\n").unwrap();
        assert_eq!(entries[0].0, "a:b");
        // escaped separators become ordinary separators for preprocess
        assert_eq!(entries[0].1, vec![t("x y"), t("z w")]);
    }

    #[test]
    fn entries_are_duplicate_free() {
        let m = parse_lexicon("oil: oil | Oil | crude oil | crude  oil\n").unwrap();
        assert_eq!(m.get("oil").unwrap(), &[t("oil"), t("crude oil")]);
    }

    #[test]
    fn bundled_data_parses() {
        let m = parse_lexicon(REUTERS_SAMPLE_LEXICON).unwrap();
        assert_eq!(expand_category("fuel", &m)[1..], [t("combustible"), t("combustible material")]);
        assert!(expand_category("crude", &m).contains(&t("petroleum")));
        assert!(expand_category("groundnut", &m).contains(&t("peanut")));
        let topics = crate::corpus::parse_category_list(REUTERS_TOPICS);
        assert_eq!(topics.len(), 133);
        assert!(m.categories().all(|c| topics.iter().any(|t| t == c)));
        assert!(m.term_count() >= topics.len());
        parse_entries(REUTERS_NAMES).unwrap();
    }
}
