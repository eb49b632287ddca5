//! The four category models and document scoring.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{preprocess, Collection, Document};
use crate::error::{Error, Result};
use crate::lexicon::{direct_terms, SynsetMap};
use crate::vsm::{cosine, document_vector, match_terms, terms_present, DfTable, SparseVector, Term, TermId, Vocabulary};

pub const DEFAULT_MAX_TRAINING_TERMS: usize = 286;
pub const MODEL_FORMAT: &str = "catvec-model/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Approach {
    Direct,
    Lexicon,
    Training,
    Integrated,
}

impl Approach {
    pub const ALL: [Approach; 4] = [
        Approach::Direct,
        Approach::Lexicon,
        Approach::Training,
        Approach::Integrated,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Approach::Direct => "direct",
            Approach::Lexicon => "lexicon",
            Approach::Training => "training",
            Approach::Integrated => "integrated",
        }
    }

    /// Capitalized name used in report tables.
    pub fn label(self) -> &'static str {
        match self {
            Approach::Direct => "Direct",
            Approach::Lexicon => "Lexicon",
            Approach::Training => "Training",
            Approach::Integrated => "Integrated",
        }
    }

    pub fn needs_lexicon(self) -> bool {
        matches!(self, Approach::Lexicon | Approach::Integrated)
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Approach {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Approach::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::invalid(format!("unknown approach `{s}` (expected direct, lexicon, training or integrated)")))
    }
}

/// Category names with the terms each name contributes to the direct
/// approach.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategorySet {
    names: Vec<String>,
    terms: Vec<Vec<Term>>,
}

impl CategorySet {
    /// Name terms derived from the names themselves (see
    /// [`direct_terms`]).
    pub fn new(names: &[String]) -> Self {
        CategorySet {
            names: names.to_vec(),
            terms: names.iter().map(|n| direct_terms(n)).collect(),
        }
    }

    /// Like [`CategorySet::new`], but categories listed in `overrides` take
    /// their name terms from there (`bop` → `balance of payments`).
    pub fn with_overrides(names: &[String], overrides: &[(String, Vec<Term>)]) -> Self {
        let map: HashMap<&str, &Vec<Term>> = overrides
            .iter()
            .filter(|(_, t)| !t.is_empty())
            .map(|(n, t)| (n.as_str(), t))
            .collect();
        CategorySet {
            names: names.to_vec(),
            terms: names
                .iter()
                .map(|n| match map.get(n.as_str()) {
                    Some(t) => (*t).clone(),
                    None => direct_terms(n),
                })
                .collect(),
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn terms(&self, idx: usize) -> &[Term] {
        &self.terms[idx]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelMeta {
    /// Requested training terms minus the number that survived the filter,
    /// when positive.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub training_shortfall: Option<usize>,
    /// Lexicon terms removed because they never occur in training text.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lexicon_terms_dropped: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryModel {
    pub approach: Approach,
    pub vocab: Vocabulary,
    pub categories: Vec<String>,
    /// Parallel to `categories`.
    pub vectors: Vec<SparseVector>,
    pub meta: ModelMeta,
}

impl CategoryModel {
    pub fn vector(&self, category: &str) -> Option<&SparseVector> {
        self.categories
            .iter()
            .position(|c| c == category)
            .map(|i| &self.vectors[i])
    }

    pub fn category_count(&self) -> usize {
        self.categories.len()
    }

    /// Same vocabulary and vectors, whatever the approach tag says.
    pub fn same_vectors(&self, other: &CategoryModel) -> bool {
        self.vocab == other.vocab && self.categories == other.categories && self.vectors == other.vectors
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredAssignment {
    pub doc_id: u32,
    pub category: String,
    pub score: f64,
}

/// A collection with its preprocessed token lists.
#[derive(Debug, Clone)]
pub struct TokenizedCollection {
    pub collection: Collection,
    pub tokens: Vec<Vec<String>>,
}

impl TokenizedCollection {
    pub fn new(collection: Collection) -> Self {
        let tokens = collection.token_lists();
        TokenizedCollection { collection, tokens }
    }
}

fn binary_model(approach: Approach, names: &[String], per_category: Vec<Vec<Term>>) -> CategoryModel {
    let mut vocab = Vocabulary::new();
    let mut vectors = Vec::with_capacity(per_category.len());
    for terms in per_category {
        let mut ids: Vec<(TermId, f64)> = terms.into_iter().map(|t| (vocab.insert(t), 1.0)).collect();
        // a repeated term must stay at weight 1, not sum
        ids.sort_by_key(|&(id, _)| id);
        ids.dedup_by_key(|&mut (id, _)| id);
        vectors.push(SparseVector::from_entries(ids));
    }
    CategoryModel {
        approach,
        vocab,
        categories: names.to_vec(),
        vectors,
        meta: ModelMeta::default(),
    }
}

/// Category names are the only terms; each category vector has weight 1 on
/// its own name terms.
pub fn build_direct(cats: &CategorySet) -> CategoryModel {
    let per_category = (0..cats.len()).map(|k| cats.terms(k).to_vec()).collect();
    binary_model(Approach::Direct, cats.names(), per_category)
}

/// Name terms plus every synonym the lexicon lists, all with weight 1.
/// Categories the lexicon does not mention keep their name terms only.
pub fn build_lexicon(cats: &CategorySet, m: &SynsetMap) -> CategoryModel {
    let per_category = (0..cats.len())
        .map(|k| {
            let mut terms = cats.terms(k).to_vec();
            for syn in m.get(&cats.names()[k]).unwrap_or(&[]) {
                if !terms.contains(syn) {
                    terms.push(syn.clone());
                }
            }
            terms
        })
        .collect();
    binary_model(Approach::Lexicon, cats.names(), per_category)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSelection {
    /// Selected single-token terms, highest df first.
    pub vocab: Vocabulary,
    /// Category frequency per selected term.
    pub cf: Vec<u32>,
    /// Training document frequency per selected term.
    pub df: Vec<u32>,
    /// How many terms short of the requested count the selection is.
    pub shortfall: Option<usize>,
}

/// The inclusive category-frequency band `ceil(L/100) ..= floor(L/10)`.
pub fn cf_band(category_count: usize) -> (usize, usize) {
    (category_count.div_ceil(100), category_count / 10)
}

/// Keeps tokens whose category frequency lies in [`cf_band`], then the
/// `max_terms` of those with the highest document frequency (ties by token
/// order).
pub fn select_training_terms(train: &TokenizedCollection, max_terms: usize) -> TrainingSelection {
    let coll = &train.collection;
    let cat_index: HashMap<&str, usize> = coll
        .categories
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();

    let mut per_category: Vec<HashSet<&str>> = vec![HashSet::new(); coll.categories.len()];
    let mut df: HashMap<&str, u32> = HashMap::new();
    for (doc, tokens) in coll.documents.iter().zip(&train.tokens) {
        let distinct: HashSet<&str> = tokens.iter().map(String::as_str).collect();
        for &tok in &distinct {
            *df.entry(tok).or_insert(0) += 1;
        }
        for topic in &doc.topics {
            if let Some(&k) = cat_index.get(topic.as_str()) {
                per_category[k].extend(distinct.iter().copied());
            }
        }
    }
    let mut cf: HashMap<&str, u32> = HashMap::new();
    for set in &per_category {
        for &tok in set {
            *cf.entry(tok).or_insert(0) += 1;
        }
    }

    let (lo, hi) = cf_band(coll.categories.len());
    let mut survivors: Vec<(&str, u32, u32)> = cf
        .into_iter()
        .filter(|&(_, c)| c >= 1 && (lo..=hi).contains(&(c as usize)))
        .map(|(tok, c)| (tok, c, df[tok]))
        .collect();
    survivors.sort_by(|a, b| b.2.cmp(&a.2).then_with(|| a.0.cmp(b.0)));
    let shortfall = max_terms.checked_sub(survivors.len()).filter(|&s| s > 0);
    survivors.truncate(max_terms);

    TrainingSelection {
        vocab: Vocabulary::from_terms(survivors.iter().map(|(t, _, _)| Term::new(vec![t.to_string()]))),
        cf: survivors.iter().map(|s| s.1).collect(),
        df: survivors.iter().map(|s| s.2).collect(),
        shortfall,
    }
}

/// wc_ik = tf_ik · log₂(L / cf_i) over the selected terms, where tf_ik
/// counts occurrences in training documents labeled k. A document with
/// several labels contributes to each.
pub fn build_training(train: &TokenizedCollection, max_terms: usize) -> CategoryModel {
    let sel = select_training_terms(train, max_terms);
    let coll = &train.collection;
    let l = coll.categories.len();
    let cat_index: HashMap<&str, usize> = coll
        .categories
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();

    let mut tf: Vec<BTreeMap<TermId, u64>> = vec![BTreeMap::new(); l];
    for (doc, tokens) in coll.documents.iter().zip(&train.tokens) {
        let cats: Vec<usize> = doc
            .topics
            .iter()
            .filter_map(|t| cat_index.get(t.as_str()).copied())
            .collect();
        if cats.is_empty() {
            continue;
        }
        for tok in tokens {
            if let Some(id) = sel.vocab.id(std::slice::from_ref(tok)) {
                for &k in &cats {
                    *tf[k].entry(id).or_insert(0) += 1;
                }
            }
        }
    }

    let vectors = tf
        .into_iter()
        .map(|counts| {
            let entries = counts
                .into_iter()
                .filter_map(|(id, n)| {
                    let idf = (l as f64 / f64::from(sel.cf[id.index()])).log2();
                    let w = n as f64 * idf;
                    (w > 0.0).then_some((id, w))
                })
                .collect();
            SparseVector::from_entries(entries)
        })
        .collect();

    CategoryModel {
        approach: Approach::Training,
        vocab: sel.vocab,
        categories: coll.categories.clone(),
        vectors,
        meta: ModelMeta {
            training_shortfall: sel.shortfall,
            ..ModelMeta::default()
        },
    }
}

/// Lexicon-model terms that occur somewhere in the training text.
pub fn lexicon_terms_in_training(lex: &CategoryModel, train_tokens: &[Vec<String>]) -> HashSet<Term> {
    terms_present(train_tokens, &lex.vocab)
        .into_iter()
        .zip(lex.vocab.terms())
        .filter(|(present, _)| *present)
        .map(|(_, t)| t.clone())
        .collect()
}

/// Merges a lexicon model and a training model:
///
/// 1. lexicon terms not in `present` (terms seen in training text) are
///    dropped;
/// 2. per category, each source vector is scaled to sum 1 (zero vectors
///    stay zero);
/// 3. the vocabularies are united and overlapping weights added.
pub fn build_integrated(lex: &CategoryModel, trn: &CategoryModel, present: &HashSet<Term>) -> Result<CategoryModel> {
    if lex.categories != trn.categories {
        return Err(Error::invalid("lexicon and training models cover different categories"));
    }
    let mut vocab = Vocabulary::new();
    let lex_map: Vec<Option<TermId>> = lex
        .vocab
        .terms()
        .iter()
        .map(|t| present.contains(t).then(|| vocab.insert(t.clone())))
        .collect();
    let survivors = vocab.len();
    let trn_map: Vec<TermId> = trn.vocab.terms().iter().map(|t| vocab.insert(t.clone())).collect();

    let vectors = lex
        .vectors
        .iter()
        .zip(&trn.vectors)
        .map(|(lv, tv)| {
            let kept = SparseVector::from_entries(
                lv.entries()
                    .iter()
                    .filter(|(id, _)| lex_map[id.index()].is_some())
                    .copied()
                    .collect(),
            );
            let lex_part = kept
                .l1_normalized()
                .entries()
                .iter()
                .map(|&(id, w)| (lex_map[id.index()].unwrap(), w))
                .collect::<Vec<_>>();
            let trn_part = tv
                .l1_normalized()
                .entries()
                .iter()
                .map(|&(id, w)| (trn_map[id.index()], w))
                .collect::<Vec<_>>();
            SparseVector::new(lex_part.into_iter().chain(trn_part))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(CategoryModel {
        approach: Approach::Integrated,
        vocab,
        categories: lex.categories.clone(),
        vectors,
        meta: ModelMeta {
            training_shortfall: trn.meta.training_shortfall,
            lexicon_terms_dropped: Some(lex.vocab.len() - survivors),
        },
    })
}

/// Scores a document vector against every category, best first; ties go
/// to the lexicographically smaller category.
pub fn score_vector(doc_id: u32, doc_vec: &SparseVector, model: &CategoryModel) -> Vec<ScoredAssignment> {
    let mut out: Vec<ScoredAssignment> = model
        .categories
        .iter()
        .zip(&model.vectors)
        .map(|(cat, cv)| ScoredAssignment {
            doc_id,
            category: cat.clone(),
            score: cosine(doc_vec, cv),
        })
        .collect();
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.category.cmp(&b.category)));
    out
}

pub fn classify_tokens(doc_id: u32, tokens: &[String], model: &CategoryModel, dft: &DfTable) -> Vec<ScoredAssignment> {
    let v = document_vector(&match_terms(tokens, &model.vocab), dft);
    score_vector(doc_id, &v, model)
}

/// One score per category for `doc`, sorted by score descending.
pub fn classify(doc: &Document, model: &CategoryModel, dft: &DfTable) -> Vec<ScoredAssignment> {
    classify_tokens(doc.doc_id, &preprocess(&doc.text()), model, dft)
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    approach: Approach,
    categories: Vec<String>,
    vocab: Vec<Term>,
    vectors: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    df: Option<DfTable>,
    #[serde(default)]
    meta: ModelMeta,
}

/// Serializes a model (and optionally the df table it is used with) to the
/// cache JSON format.
pub fn model_to_json(model: &CategoryModel, dft: Option<&DfTable>) -> Result<String> {
    let vectors = model
        .categories
        .iter()
        .zip(&model.vectors)
        .map(|(c, v)| {
            let terms = v
                .entries()
                .iter()
                .map(|&(id, w)| (model.vocab.term(id).to_string(), w))
                .collect();
            (c.clone(), terms)
        })
        .collect();
    let file = ModelFile {
        format: MODEL_FORMAT.to_string(),
        approach: model.approach,
        categories: model.categories.clone(),
        vocab: model.vocab.terms().to_vec(),
        vectors,
        df: dft.cloned(),
        meta: model.meta.clone(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn model_from_json(json: &str) -> Result<(CategoryModel, Option<DfTable>)> {
    let file: ModelFile = serde_json::from_str(json)?;
    if file.format != MODEL_FORMAT {
        return Err(Error::ModelFormat(format!(
            "unsupported format tag `{}` (expected `{MODEL_FORMAT}`)",
            file.format
        )));
    }
    let vocab = Vocabulary::from_terms(file.vocab.iter().cloned());
    if vocab.len() != file.vocab.len() {
        return Err(Error::ModelFormat("vocabulary has duplicate terms".into()));
    }
    if let Some(df) = &file.df {
        if df.counts().len() != vocab.len() {
            return Err(Error::ModelFormat("df table does not match vocabulary size".into()));
        }
    }
    let mut vectors = Vec::with_capacity(file.categories.len());
    for cat in &file.categories {
        let terms = file.vectors.get(cat).cloned().unwrap_or_default();
        let mut pairs = Vec::with_capacity(terms.len());
        for (term, w) in terms {
            let id = vocab
                .id(Term::parse(&term).tokens())
                .ok_or_else(|| Error::ModelFormat(format!("vector for `{cat}` uses unknown term `{term}`")))?;
            pairs.push((id, w));
        }
        vectors.push(SparseVector::new(pairs).map_err(|e| Error::ModelFormat(e.to_string()))?);
    }
    Ok((
        CategoryModel {
            approach: file.approach,
            vocab,
            categories: file.categories,
            vectors,
            meta: file.meta,
        },
        file.df,
    ))
}

pub fn save_model(path: &Path, model: &CategoryModel, dft: Option<&DfTable>) -> Result<()> {
    std::fs::write(path, model_to_json(model, dft)?).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<(CategoryModel, Option<DfTable>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_collection;
    use crate::lexicon::parse_lexicon;
    use crate::vsm::build_df_table;

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn t(s: &str) -> Term {
        Term::parse(s)
    }

    fn corpus(records: &[(&str, &str)]) -> TokenizedCollection {
        let raw: String = records
            .iter()
            .enumerate()
            .map(|(i, (topics, text))| {
                format!(
                    " PATTERN-ID {}\n TOPICS: {topics} END-TOPICS\n T\n {text}\n REUTER\n",
                    i + 1
                )
            })
            .collect();
        TokenizedCollection::new(parse_collection(raw.as_bytes()).unwrap())
    }

    #[test]
    fn direct_singleton_and_composite() {
        let m = build_direct(&CategorySet::new(&names(&["grain"])));
        assert_eq!(m.vocab.terms(), &[t("grain")]);
        assert_eq!(m.vectors[0].entries(), &[(TermId(0), 1.0)]);

        let m = build_direct(&CategorySet::new(&names(&["iron-steel", "trade"])));
        assert_eq!(m.vocab.len(), 3);
        let v = m.vector("iron-steel").unwrap();
        assert_eq!(v.len(), 2);
        assert!(v.entries().iter().all(|&(_, w)| w == 1.0));
    }

    #[test]
    fn overrides_replace_name_terms() {
        let cats = CategorySet::with_overrides(
            &names(&["bop", "trade"]),
            &[("bop".into(), vec![t("balance of payments")])],
        );
        assert_eq!(cats.terms(0), &[t("balance of payments")]);
        assert_eq!(cats.terms(1), &[t("trade")]);
    }

    #[test]
    fn bundled_reuters_names_add_two_composites() {
        use crate::lexicon::{parse_entries, REUTERS_NAMES, REUTERS_TOPICS};
        let topics = crate::corpus::parse_category_list(REUTERS_TOPICS);
        let cats = CategorySet::with_overrides(&topics, &parse_entries(REUTERS_NAMES).unwrap());
        let m = build_direct(&cats);
        assert_eq!(m.vocab.len(), topics.len() + 2);
        assert!(m.vocab.contains(&t("balance of payments")));
    }

    #[test]
    fn lexicon_model() {
        let cats = CategorySet::new(&names(&["fuel", "crude"]));
        let lex = parse_lexicon("fuel: fuel | combustible | combustible material\n").unwrap();
        let m = build_lexicon(&cats, &lex);
        let fuel = m.vector("fuel").unwrap();
        assert_eq!(fuel.len(), 3);
        assert!(fuel.entries().iter().all(|&(_, w)| w == 1.0));
        assert_eq!(m.vector("crude").unwrap().len(), 1);

        let empty = build_lexicon(&cats, &SynsetMap::default());
        assert!(empty.same_vectors(&build_direct(&cats)));
    }

    #[test]
    fn shared_synonym_feeds_both_categories() {
        let cats = CategorySet::new(&names(&["crude", "fuel"]));
        let lex = parse_lexicon("crude: oil\nfuel: oil\n").unwrap();
        let m = build_lexicon(&cats, &lex);
        let oil = m.vocab.id(&["oil".to_string()]).unwrap();
        assert_eq!(m.vector("crude").unwrap().get(oil), 1.0);
        assert_eq!(m.vector("fuel").unwrap().get(oil), 1.0);

        let docs = vec![vec!["oil".to_string()], vec!["crude".into()], vec!["fuel".into()]];
        let dft = build_df_table(&docs, &m.vocab);
        let scores = classify_tokens(1, &["oil".to_string()], &m, &dft);
        assert!(scores.iter().all(|s| s.score > 0.0));
    }

    #[test]
    fn cf_band_values() {
        assert_eq!(cf_band(135), (2, 13));
        assert_eq!(cf_band(3), (1, 0));
        assert_eq!(cf_band(20), (1, 2));
        assert_eq!(cf_band(0), (0, 0));
    }

    #[test]
    fn selection_excludes_unlabeled_and_wide_terms() {
        // 20 categories: band is 1..=2
        let cats: Vec<String> = (0..20).map(|i| format!("c{i}")).collect();
        let mut recs: Vec<(String, String)> = cats
            .iter()
            .map(|c| (c.clone(), format!("export {c}word")))
            .collect();
        recs.push(("".into(), "orphan orphan".into()));
        recs.push(("c0 c1".into(), "pair".into()));
        let refs: Vec<(&str, &str)> = recs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let tc = corpus(&refs);
        let sel = select_training_terms(&tc, 286);
        let has = |w: &str| sel.vocab.contains(&t(w));
        assert!(!has("export"), "cf = 20 is outside the band");
        assert!(!has("orphan"), "cf = 0");
        assert!(has("pair"));
        assert!(has("c3word"));
        assert_eq!(sel.vocab.len(), 21);
        assert_eq!(sel.shortfall, Some(286 - 21));
        // df ties broken lexicographically
        assert_eq!(sel.vocab.terms()[0], t("c0word"));
    }

    #[test]
    fn training_weights() {
        // 20 categories so a term in 1 category has idf log2(20)
        let cats: Vec<String> = (0..20).map(|i| format!("c{i}")).collect();
        let mut recs: Vec<(String, String)> = cats.iter().map(|c| (c.clone(), "filler".into())).collect();
        recs.push(("c0".into(), "wheat wheat".into()));
        recs.push(("c0 c1".into(), "wheat".into()));
        let refs: Vec<(&str, &str)> = recs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let m = build_training(&corpus(&refs), 286);
        let wheat = m.vocab.id(&["wheat".to_string()]).unwrap();
        let idf = (20.0f64 / 2.0).log2();
        assert_eq!(m.vector("c0").unwrap().get(wheat), 3.0 * idf);
        assert_eq!(m.vector("c1").unwrap().get(wheat), 1.0 * idf);
        assert!(m.vector("c5").unwrap().get(wheat) == 0.0);
        assert!(!m.vocab.contains(&t("filler")));
    }

    #[test]
    fn integrated_merge_example() {
        let cats = CategorySet::new(&names(&["k"]));
        let mut lex = build_lexicon(&cats, &parse_lexicon("k: a | b\n").unwrap());
        // drop the injected name term `k` from consideration
        let present: HashSet<Term> = [t("a"), t("b"), t("c")].into_iter().collect();
        let mut trn_vocab = Vocabulary::new();
        let b = trn_vocab.insert(t("b"));
        let c = trn_vocab.insert(t("c"));
        let trn = CategoryModel {
            approach: Approach::Training,
            vocab: trn_vocab,
            categories: names(&["k"]),
            vectors: vec![SparseVector::new([(b, 4.0), (c, 4.0)]).unwrap()],
            meta: ModelMeta::default(),
        };
        lex.meta = ModelMeta::default();
        let m = build_integrated(&lex, &trn, &present).unwrap();
        let w = |s: &str| m.vector("k").unwrap().get(m.vocab.id(t(s).tokens()).unwrap());
        assert!((w("a") - 0.5).abs() < 1e-12);
        assert!((w("b") - 1.0).abs() < 1e-12);
        assert!((w("c") - 0.5).abs() < 1e-12);
        assert!(!m.vocab.contains(&t("k")));
        assert_eq!(m.meta.lexicon_terms_dropped, Some(1));
    }

    #[test]
    fn integrated_with_empty_training_vector() {
        let cats = CategorySet::new(&names(&["crude"]));
        let lex = build_lexicon(&cats, &parse_lexicon("crude: petroleum\n").unwrap());
        let trn = CategoryModel {
            approach: Approach::Training,
            vocab: Vocabulary::new(),
            categories: names(&["crude"]),
            vectors: vec![SparseVector::empty()],
            meta: ModelMeta::default(),
        };
        let present: HashSet<Term> = [t("petroleum")].into_iter().collect();
        let m = build_integrated(&lex, &trn, &present).unwrap();
        assert_eq!(m.vocab.terms(), &[t("petroleum")]);
        assert_eq!(m.vectors[0].entries(), &[(TermId(0), 1.0)]);
    }

    #[test]
    fn classify_direct_identity_and_zero() {
        let cats = CategorySet::new(&names(&["grain", "trade"]));
        let m = build_direct(&cats);
        let train = vec![vec!["grain".to_string()], vec!["trade".into()], vec!["x".into()]];
        let dft = build_df_table(&train, &m.vocab);
        let s = classify_tokens(9, &["grain".to_string()], &m, &dft);
        assert_eq!(s[0].category, "grain");
        assert!((s[0].score - 1.0).abs() < 1e-12);
        assert_eq!(s[1].score, 0.0);
        let s = classify_tokens(9, &["nothing".to_string()], &m, &dft);
        assert!(s.iter().all(|a| a.score == 0.0));
        // zero scores tie, name order
        assert_eq!(s[0].category, "grain");
    }

    #[test]
    fn model_json_round_trip() {
        let cats = CategorySet::new(&names(&["fuel", "iron-steel"]));
        let m = build_lexicon(&cats, &parse_lexicon("fuel: combustible material\n").unwrap());
        let dft = DfTable::from_counts(vec![1, 2, 0, 3], 5).unwrap();
        let json = model_to_json(&m, Some(&dft)).unwrap();
        assert!(json.contains(MODEL_FORMAT));
        let (back, df) = model_from_json(&json).unwrap();
        assert_eq!(back, m);
        assert_eq!(df, Some(dft));

        let bad = json.replace(MODEL_FORMAT, "other/9");
        assert!(matches!(model_from_json(&bad), Err(Error::ModelFormat(_))));
    }

    #[test]
    fn approach_names() {
        assert_eq!("Integrated".parse::<Approach>().unwrap(), Approach::Integrated);
        assert!("wordnet".parse::<Approach>().is_err());
    }
}
