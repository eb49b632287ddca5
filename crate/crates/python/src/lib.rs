//! Python bindings for `catvec`.
//!
//! ```python
//! import catvec
//! corpus, lexicon, train_count = catvec.synth(seed=42, n_docs=500)
//! result = catvec.run(catvec.Collection.parse(corpus), train_count, lexicon=catvec.Lexicon.parse(lexicon))
//! print(result.table)
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;

use catvec::categorizers::{
    self, build_direct, build_integrated, build_lexicon, build_training, classify_tokens, lexicon_terms_in_training,
    CategorySet, TokenizedCollection, DEFAULT_MAX_TRAINING_TERMS,
};
use catvec::corpus::{self, preprocess as preprocess_text};
use catvec::eval::{self, AssignedSet, DEFAULT_K_MAX};
use catvec::lexicon::{self, parse_entries};
use catvec::pipeline::{self, RunConfig, DEFAULT_TRAIN_COUNT};
use catvec::vsm::{build_df_table, DfTable, SparseVector, Term, TermId};
use catvec::{Approach, CategoryModel, Error, GoldStandard, Orientation, ScoredAssignment, Strategy};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyList;

create_exception!(catvec, CatvecError, PyException);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::InvalidArgument(_) => PyValueError::new_err(e.to_string()),
        other => CatvecError::new_err(other.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

#[pyfunction]
fn preprocess(text: &str) -> Vec<String> {
    preprocess_text(text)
}

/// Cosine of two sparse vectors given as `{term_index: weight}`.
#[pyfunction]
fn cosine(a: BTreeMap<u32, f64>, b: BTreeMap<u32, f64>) -> PyResult<f64> {
    let v = |m: BTreeMap<u32, f64>| SparseVector::new(m.into_iter().map(|(i, w)| (TermId(i), w))).map_err(to_py);
    Ok(catvec::vsm::cosine(&v(a)?, &v(b)?))
}

#[pyclass(module = "catvec", frozen, skip_from_py_object, get_all)]
#[derive(Clone)]
struct Document {
    doc_id: u32,
    title: String,
    body: String,
    topics: Vec<String>,
    annotation: Option<String>,
}

#[pymethods]
impl Document {
    fn tokens(&self) -> Vec<String> {
        preprocess_text(&format!("{}\n{}", self.title, self.body))
    }

    fn __repr__(&self) -> String {
        format!("Document(doc_id={}, topics={:?})", self.doc_id, self.topics)
    }
}

#[pyclass(module = "catvec", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Collection {
    inner: catvec::Collection,
}

#[pymethods]
impl Collection {
    /// Parses records from a string.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        corpus::parse_collection(text.as_bytes())
            .map(|inner| Collection { inner })
            .map_err(to_py)
    }

    /// Reads and concatenates corpus files.
    #[staticmethod]
    fn read(paths: Vec<PathBuf>) -> PyResult<Self> {
        corpus::read_collection(&paths).map(|inner| Collection { inner }).map_err(to_py)
    }

    #[getter]
    fn categories(&self) -> Vec<String> {
        self.inner.categories.clone()
    }

    /// A copy with a declared category list replacing the observed one.
    fn with_categories(&self, categories: Vec<String>) -> PyResult<Self> {
        self.inner
            .clone()
            .with_categories(categories)
            .map(|inner| Collection { inner })
            .map_err(to_py)
    }

    fn documents(&self) -> Vec<Document> {
        self.inner
            .documents
            .iter()
            .map(|d| Document {
                doc_id: d.doc_id,
                title: d.title.clone(),
                body: d.body.clone(),
                topics: d.topics.iter().cloned().collect(),
                annotation: d.annotation.clone(),
            })
            .collect()
    }

    /// Positional split into (training, test).
    fn split(&self, train_count: usize) -> PyResult<(Collection, Collection)> {
        let (a, b) = corpus::split_collection(&self.inner, train_count).map_err(to_py)?;
        Ok((Collection { inner: a }, Collection { inner: b }))
    }

    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let s = corpus::collection_stats(&self.inner);
        json_to_py(py, &serde_json::to_string(&s).map_err(|e| to_py(e.into()))?)
    }

    fn to_text(&self) -> String {
        corpus::write_collection(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Collection({} documents, {} categories)",
            self.inner.len(),
            self.inner.categories.len()
        )
    }
}

#[pyclass(module = "catvec", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Lexicon {
    inner: catvec::SynsetMap,
}

#[pymethods]
impl Lexicon {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        lexicon::parse_lexicon(text).map(|inner| Lexicon { inner }).map_err(to_py)
    }

    /// Loads a lexicon file; `builtin:reuters` gives the bundled sample.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        lexicon::load_lexicon(&path).map(|inner| Lexicon { inner }).map_err(to_py)
    }

    /// Synonyms of a category (its own name terms when it is not listed).
    fn expand(&self, category: &str) -> Vec<String> {
        lexicon::expand_category(category, &self.inner)
            .iter()
            .map(Term::to_string)
            .collect()
    }

    #[getter]
    fn categories(&self) -> Vec<String> {
        self.inner.categories().map(str::to_string).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

fn names_from(py_names: Option<HashMap<String, Vec<String>>>) -> Vec<(String, Vec<Term>)> {
    py_names
        .unwrap_or_default()
        .into_iter()
        .map(|(k, v)| {
            let terms = v
                .iter()
                .map(|s| preprocess_text(s))
                .filter(|t| !t.is_empty())
                .map(Term::new)
                .collect();
            (k.to_lowercase(), terms)
        })
        .collect()
}

/// A category model, optionally paired with the df table needed to score
/// documents.
#[pyclass(module = "catvec", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Model {
    inner: CategoryModel,
    df: Option<DfTable>,
}

#[pymethods]
impl Model {
    /// `names` maps category codes to spelled-out name terms.
    #[staticmethod]
    #[pyo3(signature = (categories, names=None))]
    fn direct(categories: Vec<String>, names: Option<HashMap<String, Vec<String>>>) -> Self {
        let cats = CategorySet::with_overrides(&categories, &names_from(names));
        Model {
            inner: build_direct(&cats),
            df: None,
        }
    }

    #[staticmethod]
    #[pyo3(signature = (categories, lexicon, names=None))]
    fn lexicon(categories: Vec<String>, lexicon: &Lexicon, names: Option<HashMap<String, Vec<String>>>) -> Self {
        let cats = CategorySet::with_overrides(&categories, &names_from(names));
        Model {
            inner: build_lexicon(&cats, &lexicon.inner),
            df: None,
        }
    }

    #[staticmethod]
    #[pyo3(signature = (train, max_terms=DEFAULT_MAX_TRAINING_TERMS))]
    fn training(train: &Collection, max_terms: usize) -> Self {
        let t = TokenizedCollection::new(train.inner.clone());
        let inner = build_training(&t, max_terms);
        let df = build_df_table(&t.tokens, &inner.vocab);
        Model { inner, df: Some(df) }
    }

    /// Merges a lexicon model and a training model built on `train`.
    #[staticmethod]
    fn integrated(lexicon_model: &Model, training_model: &Model, train: &Collection) -> PyResult<Self> {
        let tokens = train.inner.token_lists();
        let present = lexicon_terms_in_training(&lexicon_model.inner, &tokens);
        let inner = build_integrated(&lexicon_model.inner, &training_model.inner, &present).map_err(to_py)?;
        let df = build_df_table(&tokens, &inner.vocab);
        Ok(Model { inner, df: Some(df) })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let (inner, df) = categorizers::load_model(&path).map_err(to_py)?;
        Ok(Model { inner, df })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let (inner, df) = categorizers::model_from_json(text).map_err(to_py)?;
        Ok(Model { inner, df })
    }

    fn to_json(&self) -> PyResult<String> {
        categorizers::model_to_json(&self.inner, self.df.as_ref()).map_err(to_py)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        categorizers::save_model(&path, &self.inner, self.df.as_ref()).map_err(to_py)
    }

    /// The same model with document frequencies taken from `train`.
    fn with_df(&self, train: &Collection) -> Self {
        let df = build_df_table(&train.inner.token_lists(), &self.inner.vocab);
        Model {
            inner: self.inner.clone(),
            df: Some(df),
        }
    }

    #[getter]
    fn approach(&self) -> &'static str {
        self.inner.approach.as_str()
    }

    #[getter]
    fn categories(&self) -> Vec<String> {
        self.inner.categories.clone()
    }

    #[getter]
    fn vocab(&self) -> Vec<String> {
        self.inner.vocab.terms().iter().map(Term::to_string).collect()
    }

    /// `{term: weight}` for one category.
    fn vector(&self, category: &str) -> PyResult<BTreeMap<String, f64>> {
        let v = self
            .inner
            .vector(category)
            .ok_or_else(|| PyValueError::new_err(format!("unknown category `{category}`")))?;
        Ok(v.entries()
            .iter()
            .map(|&(id, w)| (self.inner.vocab.term(id).to_string(), w))
            .collect())
    }

    /// `[(category, score), ...]`, best first.
    #[pyo3(signature = (text, doc_id=0))]
    fn classify(&self, text: &str, doc_id: u32) -> PyResult<Vec<(String, f64)>> {
        let df = self
            .df
            .as_ref()
            .ok_or_else(|| PyValueError::new_err("model has no df table; call with_df(train) first"))?;
        Ok(classify_tokens(doc_id, &preprocess_text(text), &self.inner, df)
            .into_iter()
            .map(|s| (s.category, s.score))
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Model({}, {} categories, {} terms)",
            self.inner.approach,
            self.inner.category_count(),
            self.inner.vocab.len()
        )
    }
}

type PyGold = BTreeMap<u32, BTreeSet<String>>;

fn assigned_set(pairs: Vec<(u32, String)>) -> AssignedSet {
    pairs.into_iter().collect()
}

/// Category-oriented macro recall and precision.
#[pyfunction]
#[pyo3(signature = (assigned, gold, categories, orientation="category"))]
fn macro_rp(assigned: Vec<(u32, String)>, gold: PyGold, categories: Vec<String>, orientation: &str) -> PyResult<(f64, f64)> {
    Ok(eval::macro_rp_oriented(
        &assigned_set(assigned),
        &GoldStandard::from_map(gold),
        &categories,
        parse_orientation(orientation)?,
    ))
}

#[pyfunction]
fn micro_rp(assigned: Vec<(u32, String)>, gold: PyGold) -> (f64, f64) {
    eval::micro_rp(&assigned_set(assigned), &GoldStandard::from_map(gold))
}

fn parse_orientation(s: &str) -> PyResult<Orientation> {
    match s {
        "category" => Ok(Orientation::Category),
        "document" => Ok(Orientation::Document),
        other => Err(PyValueError::new_err(format!("unknown orientation `{other}`"))),
    }
}

fn parse_strategy(s: &str, k_max: usize) -> PyResult<Strategy> {
    match s {
        "threshold" => Ok(Strategy::Threshold),
        "k-per-doc" => Ok(Strategy::KPerDoc { k_max }),
        other => Err(PyValueError::new_err(format!("unknown strategy `{other}`"))),
    }
}

/// Sweeps thresholds (or k) over `(doc_id, category, score)` triples and
/// returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (scores, gold, categories, strategy="threshold", k_max=DEFAULT_K_MAX, orientation="category", approach="scores"))]
#[allow(clippy::too_many_arguments)]
fn sweep<'py>(
    py: Python<'py>,
    scores: Vec<(u32, String, f64)>,
    gold: PyGold,
    categories: Vec<String>,
    strategy: &str,
    k_max: usize,
    orientation: &str,
    approach: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let scores: Vec<ScoredAssignment> = scores
        .into_iter()
        .map(|(doc_id, category, score)| ScoredAssignment { doc_id, category, score })
        .collect();
    let report = eval::sweep(
        approach,
        &scores,
        &GoldStandard::from_map(gold),
        &categories,
        parse_strategy(strategy, k_max)?,
        parse_orientation(orientation)?,
    )
    .map_err(to_py)?;
    json_to_py(py, &serde_json::to_string(&report).map_err(|e| to_py(e.into()))?)
}

#[pyclass(module = "catvec", frozen, skip_from_py_object, get_all)]
struct RunResult {
    /// One dict per approach.
    reports: Py<PyList>,
    /// The comparison table printed by `catvec run`.
    table: String,
    train_docs: usize,
    test_docs: usize,
}

/// Builds the requested models on the first `train_count` documents,
/// scores the rest and evaluates.
#[pyfunction]
#[pyo3(signature = (
    collection,
    train_count=DEFAULT_TRAIN_COUNT,
    approaches=None,
    lexicon=None,
    names=None,
    strategy="threshold",
    k_max=DEFAULT_K_MAX,
    orientation="category",
    max_training_terms=DEFAULT_MAX_TRAINING_TERMS,
))]
#[allow(clippy::too_many_arguments)]
fn run(
    py: Python<'_>,
    collection: &Collection,
    train_count: usize,
    approaches: Option<Vec<String>>,
    lexicon: Option<&Lexicon>,
    names: Option<HashMap<String, Vec<String>>>,
    strategy: &str,
    k_max: usize,
    orientation: &str,
    max_training_terms: usize,
) -> PyResult<RunResult> {
    let approaches = match approaches {
        Some(list) => list
            .iter()
            .map(|s| s.parse::<Approach>())
            .collect::<catvec::Result<Vec<_>>>()
            .map_err(to_py)?,
        None => Approach::ALL.to_vec(),
    };
    let cfg = RunConfig {
        train_count,
        approaches,
        strategy: parse_strategy(strategy, k_max)?,
        orientation: parse_orientation(orientation)?,
        max_training_terms,
    };
    let names = names.map(|n| names_from(Some(n)));
    let lex = lexicon.map(|l| l.inner.clone());
    let coll = collection.inner.clone();
    let out = py
        .detach(move || pipeline::run(&cfg, &coll, names.as_deref(), lex.as_ref()))
        .map_err(to_py)?;
    let reports = out.reports();
    let json = eval::reports_to_json(&reports).map_err(to_py)?;
    let list = json_to_py(py, &json)?.cast_into::<PyList>()?.unbind();
    Ok(RunResult {
        reports: list,
        table: eval::render_report(&reports),
        train_docs: out.train_docs,
        test_docs: out.test_docs,
    })
}

/// Returns `(corpus_text, lexicon_text, train_count)`.
#[pyfunction]
#[pyo3(signature = (seed=42, n_docs=1000, n_categories=20, undertrained=1, train_fraction=0.8))]
fn synth(
    seed: u64,
    n_docs: usize,
    n_categories: usize,
    undertrained: usize,
    train_fraction: f64,
) -> PyResult<(String, String, usize)> {
    let s = catvec::synth::generate(&catvec::synth::SynthConfig {
        seed,
        n_docs,
        n_categories,
        undertrained,
        train_fraction,
        ..Default::default()
    })
    .map_err(to_py)?;
    Ok((s.corpus_text(), s.lexicon_text(), s.train_count))
}

/// Category-name overrides from a name file (or `builtin:reuters`).
#[pyfunction]
fn load_names(path: PathBuf) -> PyResult<HashMap<String, Vec<String>>> {
    let text = lexicon::read_source(&path, |n| (n == "reuters").then_some(lexicon::REUTERS_NAMES)).map_err(to_py)?;
    Ok(parse_entries(&text)
        .map_err(to_py)?
        .into_iter()
        .map(|(k, v)| (k, v.iter().map(Term::to_string).collect()))
        .collect())
}

#[pymodule]
#[pyo3(name = "catvec")]
fn catvec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CatvecError", m.py().get_type::<CatvecError>())?;
    m.add_class::<Document>()?;
    m.add_class::<Collection>()?;
    m.add_class::<Lexicon>()?;
    m.add_class::<Model>()?;
    m.add_class::<RunResult>()?;
    m.add_function(wrap_pyfunction!(preprocess, m)?)?;
    m.add_function(wrap_pyfunction!(cosine, m)?)?;
    m.add_function(wrap_pyfunction!(macro_rp, m)?)?;
    m.add_function(wrap_pyfunction!(micro_rp, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(synth, m)?)?;
    m.add_function(wrap_pyfunction!(load_names, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
