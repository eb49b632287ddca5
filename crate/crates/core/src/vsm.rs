//! Sparse term-weight vectors, tf·idf document weighting and cosine
//! similarity.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// One or more tokens treated as a single term (`balance of payments`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term(Vec<String>);

impl Term {
    /// # Panics
    /// If `tokens` is empty.
    pub fn new(tokens: Vec<String>) -> Self {
        assert!(!tokens.is_empty(), "a term needs at least one token");
        Term(tokens)
    }

    /// Splits on whitespace; no other normalization.
    pub fn parse(s: &str) -> Self {
        Term::new(s.split_whitespace().map(str::to_string).collect())
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn is_multiword(&self) -> bool {
        self.0.len() > 1
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s.split_whitespace().next().is_none() {
            return Err(serde::de::Error::custom("empty term"));
        }
        Ok(Term::parse(&s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TermId(pub u32);

impl TermId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    terms: Vec<Term>,
    index: HashMap<Vec<String>, TermId>,
    max_len: usize,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vocabulary in first-seen order, skipping duplicates.
    pub fn from_terms<I: IntoIterator<Item = Term>>(terms: I) -> Self {
        let mut v = Vocabulary::new();
        for t in terms {
            v.insert(t);
        }
        v
    }

    /// Returns the id of `term`, adding it if new.
    pub fn insert(&mut self, term: Term) -> TermId {
        if let Some(&id) = self.index.get(term.tokens()) {
            return id;
        }
        let id = TermId(self.terms.len() as u32);
        self.max_len = self.max_len.max(term.tokens().len());
        self.index.insert(term.tokens().to_vec(), id);
        self.terms.push(term);
        id
    }

    pub fn id(&self, tokens: &[String]) -> Option<TermId> {
        self.index.get(tokens).copied()
    }

    pub fn term(&self, id: TermId) -> &Term {
        &self.terms[id.index()]
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, term: &Term) -> bool {
        self.index.contains_key(term.tokens())
    }

    pub fn max_term_len(&self) -> usize {
        self.max_len
    }
}

/// Non-negative sparse vector with strictly increasing term ids and no
/// stored zeros.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    entries: Vec<(TermId, f64)>,
    sum_sq: f64,
}

impl SparseVector {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Sorts by id, sums repeated ids and drops zeros. Negative or
    /// non-finite weights are rejected.
    pub fn new<I: IntoIterator<Item = (TermId, f64)>>(pairs: I) -> Result<Self> {
        let mut raw: Vec<(TermId, f64)> = pairs.into_iter().collect();
        if let Some(&(id, w)) = raw.iter().find(|(_, w)| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid(format!("weight {w} for term {} is not a non-negative number", id.0)));
        }
        raw.sort_by_key(|&(id, _)| id);
        let mut entries: Vec<(TermId, f64)> = Vec::with_capacity(raw.len());
        for (id, w) in raw {
            match entries.last_mut() {
                Some((last, acc)) if *last == id => *acc += w,
                _ => entries.push((id, w)),
            }
        }
        entries.retain(|&(_, w)| w != 0.0);
        Ok(Self::from_entries(entries))
    }

    /// `entries` must already satisfy the invariants.
    pub(crate) fn from_entries(entries: Vec<(TermId, f64)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(_, w)| w > 0.0 && w.is_finite()));
        let sum_sq = entries.iter().map(|&(_, w)| w * w).sum();
        SparseVector { entries, sum_sq }
    }

    pub fn entries(&self) -> &[(TermId, f64)] {
        &self.entries
    }

    pub fn get(&self, id: TermId) -> f64 {
        self.entries
            .binary_search_by_key(&id, |&(i, _)| i)
            .map_or(0.0, |pos| self.entries[pos].1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.sum_sq.sqrt()
    }

    /// Sum of weights (the L1 norm, since weights are non-negative).
    pub fn mass(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w).sum()
    }

    /// Multiplies every weight by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> SparseVector {
        assert!(factor > 0.0 && factor.is_finite());
        Self::from_entries(self.entries.iter().map(|&(id, w)| (id, w * factor)).collect())
    }

    /// The vector scaled to sum 1; the zero vector stays zero.
    pub fn l1_normalized(&self) -> SparseVector {
        if self.is_empty() {
            return SparseVector::empty();
        }
        let mass = self.mass();
        Self::from_entries(self.entries.iter().map(|&(id, w)| (id, w / mass)).collect())
    }

    /// JSON dump record `{"id": ..., "terms": {"term": weight}}`.
    pub fn dump(&self, id: &str, vocab: &Vocabulary) -> serde_json::Value {
        let terms: serde_json::Map<String, serde_json::Value> = self
            .entries
            .iter()
            .map(|&(tid, w)| (vocab.term(tid).to_string(), serde_json::Value::from(w)))
            .collect();
        serde_json::json!({ "id": id, "terms": terms })
    }
}

/// Document frequencies over a fixed vocabulary, plus the document count M.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DfTable {
    df: Vec<u32>,
    doc_count: u32,
}

impl DfTable {
    pub fn from_counts(df: Vec<u32>, doc_count: u32) -> Result<Self> {
        if let Some(bad) = df.iter().find(|&&d| d > doc_count) {
            return Err(Error::invalid(format!("df {bad} exceeds document count {doc_count}")));
        }
        Ok(DfTable { df, doc_count })
    }

    /// `None` when the term occurs in no document.
    pub fn df(&self, id: TermId) -> Option<u32> {
        self.df.get(id.index()).copied().filter(|&d| d > 0)
    }

    pub fn doc_count(&self) -> u32 {
        self.doc_count
    }

    pub fn counts(&self) -> &[u32] {
        &self.df
    }

    /// Number of terms with df ≥ 1.
    pub fn len(&self) -> usize {
        self.df.iter().filter(|&&d| d > 0).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Greedy longest match, left to right: at each position the longest
/// vocabulary term starting there is consumed, and consumed tokens are not
/// matched again.
pub fn match_terms(tokens: &[String], vocab: &Vocabulary) -> BTreeMap<TermId, u32> {
    let mut tf = BTreeMap::new();
    let max_len = vocab.max_term_len();
    let mut pos = 0;
    while pos < tokens.len() {
        let longest = (1..=max_len.min(tokens.len() - pos))
            .rev()
            .find_map(|len| vocab.id(&tokens[pos..pos + len]).map(|id| (id, len)));
        match longest {
            Some((id, len)) => {
                *tf.entry(id).or_insert(0) += 1;
                pos += len;
            }
            None => pos += 1,
        }
    }
    tf
}

pub fn build_df_table(docs: &[Vec<String>], vocab: &Vocabulary) -> DfTable {
    let df = docs
        .par_iter()
        .fold(
            || vec![0u32; vocab.len()],
            |mut acc, tokens| {
                for id in match_terms(tokens, vocab).into_keys() {
                    acc[id.index()] += 1;
                }
                acc
            },
        )
        .reduce(
            || vec![0u32; vocab.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    DfTable {
        df,
        doc_count: docs.len() as u32,
    }
}

/// For each vocabulary term, whether its token sequence appears contiguously
/// anywhere in `docs`. Unlike [`match_terms`], a term hidden inside a longer
/// match still counts as present.
pub fn terms_present(docs: &[Vec<String>], vocab: &Vocabulary) -> Vec<bool> {
    let mut by_first: HashMap<&str, Vec<TermId>> = HashMap::new();
    for (i, t) in vocab.terms().iter().enumerate() {
        by_first.entry(t.tokens()[0].as_str()).or_default().push(TermId(i as u32));
    }
    docs.par_iter()
        .fold(
            || vec![false; vocab.len()],
            |mut seen, tokens| {
                for pos in 0..tokens.len() {
                    let Some(cands) = by_first.get(tokens[pos].as_str()) else {
                        continue;
                    };
                    for &id in cands {
                        let t = vocab.term(id).tokens();
                        if tokens[pos..].starts_with(t) {
                            seen[id.index()] = true;
                        }
                    }
                }
                seen
            },
        )
        .reduce(
            || vec![false; vocab.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x |= y);
                a
            },
        )
}

/// wd_i = tf_i · log₂(M / df_i). Terms missing from the table are dropped,
/// as are zero weights (df = M).
pub fn document_vector(tf: &BTreeMap<TermId, u32>, dft: &DfTable) -> SparseVector {
    let m = f64::from(dft.doc_count());
    let entries = tf
        .iter()
        .filter_map(|(&id, &count)| {
            let df = dft.df(id)?;
            let w = f64::from(count) * (m / f64::from(df)).log2();
            (w > 0.0).then_some((id, w))
        })
        .collect();
    SparseVector::from_entries(entries)
}

/// Cosine of the angle between two non-negative vectors, 0 when either is
/// empty.
pub fn cosine(a: &SparseVector, b: &SparseVector) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let (mut i, mut j) = (0, 0);
    let (ea, eb) = (a.entries(), b.entries());
    let mut dot = 0.0;
    while i < ea.len() && j < eb.len() {
        match ea[i].0.cmp(&eb[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot += ea[i].1 * eb[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    let denom = (a.sum_sq * b.sum_sq).sqrt();
    if dot == 0.0 || denom == 0.0 {
        return 0.0;
    }
    (dot / denom).min(1.0)
}
