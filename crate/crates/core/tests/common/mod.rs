//! Random fixtures and brute-force reference implementations shared by the
//! oracle tests and the acceptance target.
//!
//! The reference code deliberately works on dense arrays and plain loops
//! and does not reuse any library helper beyond the constructors needed to
//! call the function under test.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use catvec::categorizers::{build_training, select_training_terms, TokenizedCollection};
use catvec::corpus::{Collection, Document, Split};
use catvec::eval::{macro_rp, micro_rp, AssignedSet};
use catvec::vsm::{cosine, document_vector, DfTable, SparseVector, TermId};
use catvec::GoldStandard;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FIXTURES: usize = 200;
pub const TOL: f64 = 1e-9;

const WORDS: [&str; 10] = [
    "wheat", "export", "tariff", "barley", "crude", "yen", "grain", "ship", "loan", "cocoa",
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn below(rng: &mut ChaCha8Rng, n: usize) -> usize {
    rng.random_range(0..n as u32) as usize
}

/// A small labeled collection: at most 10 documents over at most 10 words,
/// labels drawn from at most 5 active categories. The declared category
/// list is longer (up to 30 names) so that the category-frequency band is
/// usually non-empty.
pub struct TrainFixture {
    pub train: TokenizedCollection,
    pub max_terms: usize,
}

pub fn train_fixture(rng: &mut ChaCha8Rng) -> TrainFixture {
    let l = 1 + below(rng, 30);
    let categories: Vec<String> = (0..l).map(|i| format!("cat{i:02}")).collect();
    let active = 1 + below(rng, l.min(5));
    let n_words = 1 + below(rng, WORDS.len());
    let n_docs = 1 + below(rng, 10);
    let documents = (0..n_docs)
        .map(|i| {
            let len = below(rng, 12);
            let body: Vec<&str> = (0..len).map(|_| WORDS[below(rng, n_words)]).collect();
            let topics: BTreeSet<String> = (0..below(rng, 3))
                .map(|_| categories[below(rng, active)].clone())
                .collect();
            Document {
                doc_id: i as u32 + 1,
                split: Split::Training,
                annotation: None,
                dateline: String::new(),
                title: String::new(),
                body: body.join(" "),
                topics,
            }
        })
        .collect();
    let collection = Collection { documents, categories };
    TrainFixture {
        train: TokenizedCollection::new(collection),
        max_terms: 1 + below(rng, 10),
    }
}

/// Reference term selection: every distinct token, its cf and df by direct
/// counting, band filter with integer bounds found by search, sort, cut.
pub fn oracle_selection(f: &TrainFixture) -> Vec<(String, u32, u32)> {
    let docs = &f.train.collection.documents;
    let l = f.train.collection.categories.len();
    let lo = (0..=l).find(|c| 100 * c >= l).unwrap();
    let hi = (0..=l).rev().find(|c| 10 * c <= l).unwrap();
    let mut vocab: Vec<String> = f.train.tokens.iter().flatten().cloned().collect();
    vocab.sort();
    vocab.dedup();
    let mut rows = Vec::new();
    for w in vocab {
        let df = f.train.tokens.iter().filter(|t| t.contains(&w)).count() as u32;
        let cf = f
            .train
            .collection
            .categories
            .iter()
            .filter(|k| {
                docs.iter()
                    .zip(&f.train.tokens)
                    .any(|(d, t)| d.topics.contains(*k) && t.contains(&w))
            })
            .count() as u32;
        if cf >= 1 && cf as usize >= lo && cf as usize <= hi {
            rows.push((w, cf, df));
        }
    }
    rows.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)));
    rows.truncate(f.max_terms);
    rows
}

pub fn check_select_training_terms(seed: u64) -> Result<usize, String> {
    let mut r = rng(seed);
    let mut nonempty = 0;
    for n in 0..FIXTURES {
        let f = train_fixture(&mut r);
        let expected = oracle_selection(&f);
        let sel = select_training_terms(&f.train, f.max_terms);
        let got: Vec<(String, u32, u32)> = sel
            .vocab
            .terms()
            .iter()
            .zip(sel.cf.iter().zip(&sel.df))
            .map(|(t, (&cf, &df))| (t.to_string(), cf, df))
            .collect();
        if got != expected {
            return Err(format!("fixture {n}: got {got:?}, oracle {expected:?}"));
        }
        let want_short = f.max_terms.saturating_sub(expected.len());
        if sel.shortfall.unwrap_or(0) != want_short {
            return Err(format!("fixture {n}: shortfall {:?}, oracle {want_short}", sel.shortfall));
        }
        nonempty += usize::from(!expected.is_empty());
    }
    if nonempty < FIXTURES / 4 {
        return Err(format!("only {nonempty} fixtures selected any term"));
    }
    Ok(FIXTURES)
}

pub fn check_build_training(seed: u64) -> Result<usize, String> {
    let mut r = rng(seed);
    for n in 0..FIXTURES {
        let f = train_fixture(&mut r);
        let selected = oracle_selection(&f);
        let model = build_training(&f.train, f.max_terms);
        let l = f.train.collection.categories.len() as f64;
        for (k, cat) in f.train.collection.categories.iter().enumerate() {
            let v = &model.vectors[k];
            let mut nonzero = 0;
            for (term, cf, _) in &selected {
                let mut tf = 0u64;
                for (doc, tokens) in f.train.collection.documents.iter().zip(&f.train.tokens) {
                    if doc.topics.contains(cat) {
                        tf += tokens.iter().filter(|t| *t == term).count() as u64;
                    }
                }
                let want = tf as f64 * (l / f64::from(*cf)).log2();
                let id = model
                    .vocab
                    .id(std::slice::from_ref(term))
                    .ok_or_else(|| format!("fixture {n}: `{term}` missing from model vocabulary"))?;
                let got = v.get(id);
                if (got - want).abs() > TOL {
                    return Err(format!("fixture {n}: w[{term}][{cat}] = {got}, oracle {want}"));
                }
                nonzero += usize::from(want != 0.0);
            }
            if v.len() != nonzero {
                return Err(format!("fixture {n}: {cat} stores {} entries, oracle {nonzero}", v.len()));
            }
        }
        if model.vocab.len() != selected.len() {
            return Err(format!("fixture {n}: vocabulary size {}", model.vocab.len()));
        }
    }
    Ok(FIXTURES)
}

fn random_dense(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            if rng.random_bool(0.4) {
                0.0
            } else {
                rng.random_range(0.0..5.0)
            }
        })
        .collect()
}

pub fn sparse_from_dense(dense: &[f64]) -> SparseVector {
    SparseVector::new(
        dense
            .iter()
            .enumerate()
            .map(|(i, &w)| (TermId(i as u32), w)),
    )
    .expect("non-negative weights")
}

/// Σab / sqrt(Σa²·Σb²) on dense arrays, 0 for a zero vector.
pub fn oracle_cosine(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for i in 0..a.len() {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb).sqrt()
    }
}

pub fn check_cosine(seed: u64) -> Result<usize, String> {
    let mut r = rng(seed);
    for n in 0..FIXTURES {
        let dim = 1 + below(&mut r, 10);
        let a = random_dense(&mut r, dim);
        let b = random_dense(&mut r, dim);
        let got = cosine(&sparse_from_dense(&a), &sparse_from_dense(&b));
        let want = oracle_cosine(&a, &b);
        if (got - want).abs() > TOL {
            return Err(format!("fixture {n}: cosine({a:?}, {b:?}) = {got}, oracle {want}"));
        }
    }
    Ok(FIXTURES)
}

pub fn check_document_vector(seed: u64) -> Result<usize, String> {
    let mut r = rng(seed);
    for n in 0..FIXTURES {
        let dim = 1 + below(&mut r, 10);
        let m = 1 + below(&mut r, 10) as u32;
        let df: Vec<u32> = (0..dim).map(|_| r.random_range(0..=m)).collect();
        let tf: Vec<u32> = (0..dim)
            .map(|_| if r.random_bool(0.3) { 0 } else { r.random_range(1..6u32) })
            .collect();
        let table = DfTable::from_counts(df.clone(), m).unwrap();
        let tf_map: BTreeMap<TermId, u32> = tf
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (TermId(i as u32), c))
            .collect();
        let got = document_vector(&tf_map, &table);
        let mut stored = 0;
        for i in 0..dim {
            let want = if tf[i] == 0 || df[i] == 0 {
                0.0
            } else {
                f64::from(tf[i]) * (f64::from(m) / f64::from(df[i])).log2()
            };
            stored += usize::from(want != 0.0);
            let w = got.get(TermId(i as u32));
            if (w - want).abs() > TOL {
                return Err(format!("fixture {n}: term {i}: {w}, oracle {want} (tf {tf:?}, df {df:?}, M {m})"));
            }
        }
        if got.len() != stored {
            return Err(format!("fixture {n}: {} stored entries, oracle {stored}", got.len()));
        }
    }
    Ok(FIXTURES)
}

/// A gold standard and an assignment over at most 10 documents and 5
/// categories, as dense boolean matrices.
pub struct EvalFixture {
    pub categories: Vec<String>,
    pub gold: Vec<Vec<bool>>,
    pub assigned: Vec<Vec<bool>>,
}

impl EvalFixture {
    pub fn gold_standard(&self) -> GoldStandard {
        GoldStandard::from_map(
            self.gold
                .iter()
                .enumerate()
                .map(|(d, row)| (d as u32, self.names(row)))
                .collect(),
        )
    }

    pub fn assigned_set(&self) -> AssignedSet {
        self.assigned
            .iter()
            .enumerate()
            .flat_map(|(d, row)| self.names(row).into_iter().map(move |c| (d as u32, c)))
            .collect()
    }

    fn names(&self, row: &[bool]) -> BTreeSet<String> {
        row.iter()
            .zip(&self.categories)
            .filter(|(on, _)| **on)
            .map(|(_, c)| c.clone())
            .collect()
    }
}

pub fn eval_fixture(rng: &mut ChaCha8Rng) -> EvalFixture {
    let docs = 1 + below(rng, 10);
    let cats = 1 + below(rng, 5);
    let mut matrix = |p: f64| -> Vec<Vec<bool>> {
        (0..docs).map(|_| (0..cats).map(|_| rng.random_bool(p)).collect()).collect()
    };
    let gold = matrix(0.3);
    let assigned = matrix(0.35);
    EvalFixture {
        categories: (0..cats).map(|k| format!("k{k}")).collect(),
        gold,
        assigned,
    }
}

/// Per-category confusion counts (tp, fp, fn) from the dense matrices.
fn confusion(f: &EvalFixture) -> Vec<(usize, usize, usize)> {
    (0..f.categories.len())
        .map(|k| {
            let mut c = (0, 0, 0);
            for d in 0..f.gold.len() {
                match (f.assigned[d][k], f.gold[d][k]) {
                    (true, true) => c.0 += 1,
                    (true, false) => c.1 += 1,
                    (false, true) => c.2 += 1,
                    (false, false) => {}
                }
            }
            c
        })
        .collect()
}

pub fn oracle_macro(f: &EvalFixture) -> (f64, f64) {
    let (mut rs, mut rn, mut ps, mut pn) = (0.0, 0, 0.0, 0);
    for (tp, fp, fneg) in confusion(f) {
        if tp + fneg > 0 {
            rs += tp as f64 / (tp + fneg) as f64;
            rn += 1;
        }
        if tp + fp > 0 {
            ps += tp as f64 / (tp + fp) as f64;
            pn += 1;
        }
    }
    let mean = |s: f64, n: usize| if n == 0 { 0.0 } else { s / n as f64 };
    (mean(rs, rn), mean(ps, pn))
}

pub fn oracle_micro(f: &EvalFixture) -> (f64, f64) {
    let (mut tp, mut fp, mut fneg) = (0, 0, 0);
    for (a, b, c) in confusion(f) {
        tp += a;
        fp += b;
        fneg += c;
    }
    let div = |n: usize, d: usize| if d == 0 { 0.0 } else { n as f64 / d as f64 };
    (div(tp, tp + fneg), div(tp, tp + fp))
}

fn close(a: (f64, f64), b: (f64, f64)) -> bool {
    (a.0 - b.0).abs() <= TOL && (a.1 - b.1).abs() <= TOL
}

pub fn check_macro_rp(seed: u64) -> Result<usize, String> {
    let mut r = rng(seed);
    for n in 0..FIXTURES {
        let f = eval_fixture(&mut r);
        let got = macro_rp(&f.assigned_set(), &f.gold_standard(), &f.categories);
        let want = oracle_macro(&f);
        if !close(got, want) {
            return Err(format!("fixture {n}: macro {got:?}, oracle {want:?}"));
        }
    }
    Ok(FIXTURES)
}

pub fn check_micro_rp(seed: u64) -> Result<usize, String> {
    let mut r = rng(seed);
    for n in 0..FIXTURES {
        let f = eval_fixture(&mut r);
        let got = micro_rp(&f.assigned_set(), &f.gold_standard());
        let want = oracle_micro(&f);
        if !close(got, want) {
            return Err(format!("fixture {n}: micro {got:?}, oracle {want:?}"));
        }
    }
    Ok(FIXTURES)
}

/// Every oracle suite, by name.
pub type Suite = (&'static str, fn(u64) -> Result<usize, String>);

pub fn oracle_suites() -> [Suite; 6] {
    [
        ("cosine", check_cosine),
        ("document_vector", check_document_vector),
        ("build_training", check_build_training),
        ("select_training_terms", check_select_training_terms),
        ("macro_rp", check_macro_rp),
        ("micro_rp", check_micro_rp),
    ]
}
