//! End-to-end run: split, build the requested models on the training part,
//! score the test part, sweep.

use rayon::prelude::*;

use crate::categorizers::{
    build_direct, build_integrated, build_lexicon, build_training, classify_tokens, lexicon_terms_in_training,
    Approach, CategoryModel, CategorySet, ScoredAssignment, TokenizedCollection, DEFAULT_MAX_TRAINING_TERMS,
};
use crate::corpus::{split_collection, Collection};
use crate::error::{Error, Result};
use crate::eval::{sweep, EvalReport, GoldStandard, Orientation, Strategy};
use crate::lexicon::SynsetMap;
use crate::vsm::{build_df_table, DfTable, Term};

pub const DEFAULT_TRAIN_COUNT: usize = 21_450;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub train_count: usize,
    pub approaches: Vec<Approach>,
    pub strategy: Strategy,
    pub orientation: Orientation,
    pub max_training_terms: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            train_count: DEFAULT_TRAIN_COUNT,
            approaches: Approach::ALL.to_vec(),
            strategy: Strategy::Threshold,
            orientation: Orientation::Category,
            max_training_terms: DEFAULT_MAX_TRAINING_TERMS,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ApproachRun {
    pub model: CategoryModel,
    pub df: DfTable,
    /// Every (test document, category) score, documents in file order.
    pub scores: Vec<ScoredAssignment>,
    pub report: EvalReport,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub runs: Vec<ApproachRun>,
    pub gold: GoldStandard,
    pub train_docs: usize,
    pub test_docs: usize,
}

impl RunOutput {
    pub fn reports(&self) -> Vec<EvalReport> {
        self.runs.iter().map(|r| r.report.clone()).collect()
    }

    pub fn run(&self, approach: Approach) -> Option<&ApproachRun> {
        self.runs.iter().find(|r| r.model.approach == approach)
    }
}

/// Runs the requested approaches, always in the order direct, lexicon,
/// training, integrated.
pub fn run(
    cfg: &RunConfig,
    collection: &Collection,
    category_names: Option<&[(String, Vec<Term>)]>,
    lexicon: Option<&SynsetMap>,
) -> Result<RunOutput> {
    let mut approaches = cfg.approaches.clone();
    approaches.sort();
    approaches.dedup();
    if approaches.is_empty() {
        return Err(Error::invalid("no approaches requested"));
    }
    let needs_lexicon = approaches.iter().any(|a| a.needs_lexicon());
    if needs_lexicon && lexicon.is_none() {
        return Err(Error::invalid("the lexicon and integrated approaches need a lexicon"));
    }

    let (train, test) = split_collection(collection, cfg.train_count)?;
    if test.is_empty() {
        return Err(Error::Evaluation("the test split is empty".into()));
    }
    let train_docs = train.len();
    let test_docs = test.len();
    let train = TokenizedCollection::new(train);
    let test = TokenizedCollection::new(test);
    let gold = GoldStandard::from_collection(&test.collection);
    let cats = match category_names {
        Some(names) => CategorySet::with_overrides(&collection.categories, names),
        None => CategorySet::new(&collection.categories),
    };

    let lex_model = lexicon.filter(|_| needs_lexicon).map(|m| build_lexicon(&cats, m));
    let trn_model = approaches
        .iter()
        .any(|a| matches!(a, Approach::Training | Approach::Integrated))
        .then(|| build_training(&train, cfg.max_training_terms));

    let mut runs = Vec::with_capacity(approaches.len());
    for approach in approaches {
        let model = match approach {
            Approach::Direct => build_direct(&cats),
            Approach::Lexicon => lex_model.clone().expect("checked above"),
            Approach::Training => trn_model.clone().expect("built above"),
            Approach::Integrated => {
                let lex = lex_model.as_ref().expect("checked above");
                let present = lexicon_terms_in_training(lex, &train.tokens);
                build_integrated(lex, trn_model.as_ref().expect("built above"), &present)?
            }
        };
        let df = build_df_table(&train.tokens, &model.vocab);
        let scores: Vec<ScoredAssignment> = test
            .collection
            .documents
            .par_iter()
            .zip(&test.tokens)
            .flat_map_iter(|(doc, tokens)| classify_tokens(doc.doc_id, tokens, &model, &df))
            .collect();
        let report = sweep(
            approach.label(),
            &scores,
            &gold,
            &collection.categories,
            cfg.strategy,
            cfg.orientation,
        )?;
        runs.push(ApproachRun {
            model,
            df,
            scores,
            report,
        });
    }
    Ok(RunOutput {
        runs,
        gold,
        train_docs,
        test_docs,
    })
}
