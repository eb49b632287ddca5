//! Reader and writer for the tagged newswire record format, plus the text
//! preprocessing shared by every other module.
//!
//! A record looks like this:
//!
//! ```text
//!      PATTERN-ID 6505 TRAINING-SET
//!     18-JUN-1987 11:44:27.20
//!     TOPICS:     bop trade  END-TOPICS
//!     PLACES:     italy      END-PLACES
//!     PEOPLE:                END-PEOPLE
//!     ORGS:                  END-ORGS
//!     EXCHANGES:             END-EXCHANGES
//!     COMPANIES:             END-COMPANIES
//!     ITALIAN BALANCE OF PAYMENTS IN DEFICIT IN MAY
//!         ROME, June 18 - Italy's overall balance of payments showed
//!     ...
//!      REUTER
//! ```
//!
//! Only the `TOPICS` field is kept; the other category fields are parsed
//! (so their `END-` markers are checked) and dropped.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const HEADER_TAG: &str = "PATTERN-ID";
const SENTINEL: &str = "REUTER";
const FIELDS: [&str; 6] = ["TOPICS", "PLACES", "PEOPLE", "ORGS", "EXCHANGES", "COMPANIES"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Training,
    Test,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: u32,
    /// Assigned by [`split_collection`]; freshly parsed documents are all
    /// `Training`.
    pub split: Split,
    /// The record's own split annotation (e.g. `TRAINING-SET`). Kept for
    /// round-tripping, never used for partitioning.
    pub annotation: Option<String>,
    pub dateline: String,
    pub title: String,
    pub body: String,
    pub topics: BTreeSet<String>,
}

impl Document {
    /// Title and body joined, the text every model sees.
    pub fn text(&self) -> String {
        if self.body.is_empty() {
            self.title.clone()
        } else {
            format!("{}\n{}", self.title, self.body)
        }
    }

    pub fn tokens(&self) -> Vec<String> {
        preprocess(&self.text())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collection {
    pub documents: Vec<Document>,
    /// The declared category set, L entries.
    pub categories: Vec<String>,
}

impl Collection {
    /// Replaces the category set with a declared list (e.g. the 135 TOPICS
    /// of a Reuters distribution), checking that every document label is in
    /// it.
    pub fn with_categories(mut self, declared: Vec<String>) -> Result<Self> {
        let mut seen = HashSet::new();
        let declared: Vec<String> = declared
            .into_iter()
            .map(|c| c.to_lowercase())
            .filter(|c| seen.insert(c.clone()))
            .collect();
        for doc in &self.documents {
            if let Some(bad) = doc.topics.iter().find(|t| !seen.contains(*t)) {
                return Err(Error::UnknownCategory {
                    doc_id: doc.doc_id,
                    category: bad.clone(),
                });
            }
        }
        self.categories = declared;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Preprocessed token lists, one per document, in collection order.
    pub fn token_lists(&self) -> Vec<Vec<String>> {
        self.documents.par_iter().map(Document::tokens).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollectionStats {
    pub doc_count: u64,
    pub word_occurrences: u64,
    pub words_per_doc_avg: f64,
    pub docs_with_topics: u64,
    /// Percentage in [0, 100].
    pub docs_with_topics_pct: f64,
    pub topic_occurrences: u64,
    pub topics_per_doc_avg: f64,
}

/// Lowercases, drops control characters and separators, and removes tokens
/// that are plain numbers.
///
/// Tokens are maximal runs of alphanumerics and apostrophes; apostrophes at
/// the edges of a token are stripped, so `Italy's` stays one token while
/// `'quoted'` becomes `quoted`. A token made only of digits is a number and
/// is dropped; `g7` survives. No stemming, no stopwords.
pub fn preprocess(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    lowered
        .split(|c: char| !(c.is_alphanumeric() || c == '\''))
        .map(|raw| raw.trim_matches('\''))
        .filter(|tok| !tok.is_empty() && !tok.chars().all(|c| c.is_ascii_digit()))
        .map(str::to_string)
        .collect()
}

struct OpenField {
    name: &'static str,
    content: String,
}

struct PendingRecord {
    doc_id: u32,
    annotation: Option<String>,
    dateline: Vec<String>,
    fields_seen: bool,
    topics: Option<BTreeSet<String>>,
    open: Option<OpenField>,
    title: Option<String>,
    body: Vec<String>,
}

impl PendingRecord {
    fn finish(self) -> Document {
        let mut body = self.body;
        while body.last().is_some_and(|l| l.trim().is_empty()) {
            body.pop();
        }
        Document {
            doc_id: self.doc_id,
            split: Split::Training,
            annotation: self.annotation,
            dateline: self.dateline.join("\n"),
            title: self.title.unwrap_or_default(),
            body: body.join("\n"),
            topics: self.topics.unwrap_or_default(),
        }
    }
}

struct Parser {
    docs: Vec<Document>,
    ids: HashSet<u32>,
    pending: Option<PendingRecord>,
}

impl Parser {
    fn last_good(&self) -> Option<u32> {
        self.docs.last().map(|d| d.doc_id)
    }

    fn fail(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            offset,
            last_good_id: self.last_good(),
            message: message.into(),
        }
    }

    fn line(&mut self, offset: usize, line: &str) -> Result<()> {
        let trimmed = line.trim();
        let first_word = trimmed.split_whitespace().next().unwrap_or("");

        if first_word == HEADER_TAG {
            if let Some(p) = &self.pending {
                return Err(self.unterminated(offset, p));
            }
            return self.start_record(offset, trimmed);
        }

        let Some(mut rec) = self.pending.take() else {
            // text between records is ignored
            return Ok(());
        };

        if let Some(mut field) = rec.open.take() {
            if trimmed.eq_ignore_ascii_case(SENTINEL) {
                self.pending = Some(rec);
                return Err(self.fail(offset, format!("missing END-{}", field.name)));
            }
            match close_field(field.name, trimmed) {
                Some(inner) => {
                    field.content.push(' ');
                    field.content.push_str(inner);
                    close_into(&mut rec, field);
                }
                None => {
                    field.content.push(' ');
                    field.content.push_str(trimmed);
                    rec.open = Some(field);
                }
            }
            self.pending = Some(rec);
            return Ok(());
        }

        if trimmed.eq_ignore_ascii_case(SENTINEL) {
            if rec.topics.is_none() {
                return Err(self.fail(offset, format!("record {} has no TOPICS field", rec.doc_id)));
            }
            self.ids.insert(rec.doc_id);
            self.docs.push(rec.finish());
            return Ok(());
        }

        if rec.title.is_none() {
            if let Some(name) = field_name(trimmed) {
                let rest = trimmed[name.len() + 1..].trim_start();
                let field = OpenField {
                    name,
                    content: String::new(),
                };
                rec.fields_seen = true;
                match close_field(name, rest) {
                    Some(inner) => close_into(&mut rec, OpenField {
                        content: inner.to_string(),
                        ..field
                    }),
                    None => {
                        rec.open = Some(OpenField {
                            content: rest.to_string(),
                            ..field
                        })
                    }
                }
            } else if !trimmed.is_empty() {
                if rec.fields_seen {
                    rec.title = Some(trimmed.to_string());
                } else {
                    rec.dateline.push(trimmed.to_string());
                }
            }
        } else if !(rec.body.is_empty() && trimmed.is_empty()) {
            rec.body.push(line.trim_end().to_string());
        }
        self.pending = Some(rec);
        Ok(())
    }

    fn start_record(&mut self, offset: usize, trimmed: &str) -> Result<()> {
        let mut parts = trimmed.split_whitespace().skip(1);
        let doc_id = parts
            .next()
            .and_then(|s| s.parse::<u32>().ok())
            .filter(|&id| id > 0)
            .ok_or_else(|| self.fail(offset, "PATTERN-ID without a positive integer id"))?;
        if self.ids.contains(&doc_id) {
            return Err(self.fail(offset, format!("duplicate doc_id {doc_id}")));
        }
        let annotation = parts.collect::<Vec<_>>().join(" ");
        self.pending = Some(PendingRecord {
            doc_id,
            annotation: (!annotation.is_empty()).then_some(annotation),
            dateline: Vec::new(),
            fields_seen: false,
            topics: None,
            open: None,
            title: None,
            body: Vec::new(),
        });
        Ok(())
    }

    fn unterminated(&self, offset: usize, p: &PendingRecord) -> Error {
        match &p.open {
            Some(f) => self.fail(offset, format!("missing END-{} in record {}", f.name, p.doc_id)),
            None => self.fail(offset, format!("record {} missing REUTER sentinel", p.doc_id)),
        }
    }
}

fn field_name(trimmed: &str) -> Option<&'static str> {
    FIELDS.into_iter().find(|name| {
        trimmed.len() > name.len()
            && trimmed.starts_with(name)
            && trimmed.as_bytes()[name.len()] == b':'
    })
}

/// Returns the content before `END-<name>` if the marker is on this line.
fn close_field<'a>(name: &str, text: &'a str) -> Option<&'a str> {
    let marker = format!("END-{name}");
    text.find(&marker).map(|at| text[..at].trim())
}

fn close_into(rec: &mut PendingRecord, field: OpenField) {
    if field.name == "TOPICS" {
        rec.topics = Some(
            field
                .content
                .split_whitespace()
                .map(|t| t.to_lowercase())
                .collect(),
        );
    }
}

/// Parses zero or more records. The collection's category set is the sorted
/// set of topic names seen; use [`Collection::with_categories`] to declare a
/// fixed list instead.
pub fn parse_collection(raw: &[u8]) -> Result<Collection> {
    let mut parser = Parser {
        docs: Vec::new(),
        ids: HashSet::new(),
        pending: None,
    };
    let mut offset = 0;
    for raw_line in raw.split(|&b| b == b'\n') {
        let line = String::from_utf8_lossy(raw_line);
        parser.line(offset, line.trim_end_matches('\r'))?;
        offset += raw_line.len() + 1;
    }
    if let Some(p) = &parser.pending {
        return Err(parser.unterminated(raw.len(), p));
    }
    let categories: BTreeSet<String> = parser
        .docs
        .iter()
        .flat_map(|d| d.topics.iter().cloned())
        .collect();
    Ok(Collection {
        documents: parser.docs,
        categories: categories.into_iter().collect(),
    })
}

/// Reads and concatenates one or more corpus files before parsing.
pub fn read_collection<P: AsRef<Path>>(paths: &[P]) -> Result<Collection> {
    let mut raw = Vec::new();
    for path in paths {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        raw.extend_from_slice(&bytes);
        if !raw.ends_with(b"\n") {
            raw.push(b'\n');
        }
    }
    parse_collection(&raw)
}

/// Reads a category list: names separated by whitespace, `#` starts a
/// comment.
pub fn read_category_list(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_category_list(&text))
}

pub fn parse_category_list(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .map(str::to_lowercase)
        .collect()
}

/// Emits a collection in the record format read by [`parse_collection`].
pub fn write_collection(c: &Collection) -> String {
    let mut out = String::new();
    for doc in &c.documents {
        write_record(&mut out, doc);
    }
    out
}

pub(crate) fn write_record(out: &mut String, doc: &Document) {
    match &doc.annotation {
        Some(a) => writeln!(out, "     {HEADER_TAG} {} {a}", doc.doc_id),
        None => writeln!(out, "     {HEADER_TAG} {}", doc.doc_id),
    }
    .unwrap();
    for line in doc.dateline.lines() {
        writeln!(out, "    {line}").unwrap();
    }
    let topics = doc.topics.iter().cloned().collect::<Vec<_>>().join(" ");
    for name in FIELDS {
        let content = if name == "TOPICS" { topics.as_str() } else { "" };
        let label = format!("{name}:");
        writeln!(out, "    {label:<11} {content:<10} END-{name}").unwrap();
    }
    writeln!(out, "    {}", doc.title).unwrap();
    for line in doc.body.lines() {
        writeln!(out, "{line}").unwrap();
    }
    writeln!(out, "     {SENTINEL}").unwrap();
}

/// Positional split: the first `train_count` documents train, the rest test.
pub fn split_collection(c: &Collection, train_count: usize) -> Result<(Collection, Collection)> {
    if train_count > c.documents.len() {
        return Err(Error::invalid(format!(
            "train_count {train_count} exceeds collection size {}",
            c.documents.len()
        )));
    }
    let tagged = |docs: &[Document], split: Split| Collection {
        documents: docs
            .iter()
            .cloned()
            .map(|mut d| {
                d.split = split;
                d
            })
            .collect(),
        categories: c.categories.clone(),
    };
    let (train, test) = c.documents.split_at(train_count);
    Ok((tagged(train, Split::Training), tagged(test, Split::Test)))
}

pub fn collection_stats(c: &Collection) -> CollectionStats {
    let doc_count = c.documents.len() as u64;
    let word_occurrences: u64 = c
        .documents
        .par_iter()
        .map(|d| d.tokens().len() as u64)
        .sum();
    let docs_with_topics = c.documents.iter().filter(|d| !d.topics.is_empty()).count() as u64;
    let topic_occurrences: u64 = c.documents.iter().map(|d| d.topics.len() as u64).sum();
    let ratio = |num: u64| {
        if doc_count == 0 {
            0.0
        } else {
            num as f64 / doc_count as f64
        }
    };
    CollectionStats {
        doc_count,
        word_occurrences,
        words_per_doc_avg: ratio(word_occurrences),
        docs_with_topics,
        docs_with_topics_pct: 100.0 * ratio(docs_with_topics),
        topic_occurrences,
        topics_per_doc_avg: ratio(topic_occurrences),
    }
}

fn thousands(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

/// Renders statistics for several subcollections side by side, one column
/// per `(label, stats)` pair.
pub fn render_stats(columns: &[(&str, CollectionStats)]) -> String {
    type Cell = fn(&CollectionStats) -> String;
    let rows: [(&str, &str, Cell); 7] = [
        ("Docs.", "Number", |s| thousands(s.doc_count)),
        ("Words", "Occurrences", |s| thousands(s.word_occurrences)),
        ("", "Doc. average", |s| format!("{:.0}", s.words_per_doc_avg)),
        ("Docs. with 1+ Topics", "Number", |s| thousands(s.docs_with_topics)),
        ("", "Percentage", |s| format!("{:.0}", s.docs_with_topics_pct)),
        ("Topics", "Occurrences", |s| thousands(s.topic_occurrences)),
        ("", "Doc. average", |s| format!("{:.2}", s.topics_per_doc_avg)),
    ];
    let mut out = String::new();
    write!(out, "{:<20} {:<12}", "", "").unwrap();
    for (label, _) in columns {
        write!(out, " {label:>12}").unwrap();
    }
    out.push('\n');
    for (group, name, cell) in rows {
        write!(out, "{group:<20} {name:<12}").unwrap();
        for (_, stats) in columns {
            write!(out, " {:>12}", cell(stats)).unwrap();
        }
        out.push('\n');
    }
    out
}
