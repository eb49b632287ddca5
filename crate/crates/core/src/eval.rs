//! Recall and precision under threshold and k-per-doc assignment, macro-
//! and micro-averaged.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::categorizers::ScoredAssignment;
use crate::corpus::Collection;
use crate::error::{Error, Result};

pub const THRESHOLD_LEVELS: usize = 11;
pub const DEFAULT_K_MAX: usize = 10;

/// `(doc_id, category)` pairs.
pub type AssignedSet = BTreeSet<(u32, String)>;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldStandard {
    docs: BTreeMap<u32, BTreeSet<String>>,
}

impl GoldStandard {
    pub fn from_collection(c: &Collection) -> Self {
        GoldStandard {
            docs: c
                .documents
                .iter()
                .map(|d| (d.doc_id, d.topics.clone()))
                .collect(),
        }
    }

    pub fn from_map(docs: BTreeMap<u32, BTreeSet<String>>) -> Self {
        GoldStandard { docs }
    }

    pub fn get(&self, doc_id: u32) -> Option<&BTreeSet<String>> {
        self.docs.get(&doc_id)
    }

    pub fn docs(&self) -> impl Iterator<Item = (u32, &BTreeSet<String>)> {
        self.docs.iter().map(|(&d, c)| (d, c))
    }

    pub fn contains(&self, doc_id: u32, category: &str) -> bool {
        self.docs.get(&doc_id).is_some_and(|c| c.contains(category))
    }

    /// Total number of (document, category) pairs to be assigned.
    pub fn pair_count(&self) -> usize {
        self.docs.values().map(BTreeSet::len).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Strategy {
    /// Thresholds 0.0, 0.1, …, 1.0.
    Threshold,
    KPerDoc { k_max: usize },
}

impl Strategy {
    pub fn label(self) -> &'static str {
        match self {
            Strategy::Threshold => "Threshold",
            Strategy::KPerDoc { .. } => "K-per-doc",
        }
    }
}

/// Which items macro-averaging averages over. Micro figures do not depend
/// on it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Category,
    Document,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RPPoint {
    /// Threshold, or k for k-per-doc.
    pub level: f64,
    pub macro_recall: f64,
    pub macro_precision: f64,
    pub micro_recall: f64,
    pub micro_precision: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Averages {
    pub macro_recall: f64,
    pub macro_precision: f64,
    pub micro_recall: f64,
    pub micro_precision: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub approach: String,
    pub strategy: Strategy,
    pub orientation: Orientation,
    pub points: Vec<RPPoint>,
    pub averages: Averages,
}

/// Pairs with `score >= t`. Zero scores are never assigned, even at t = 0.
pub fn assign_by_threshold(scores: &[ScoredAssignment], t: f64) -> Result<AssignedSet> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!("threshold {t} outside [0, 1]")));
    }
    Ok(scores
        .iter()
        .filter(|s| s.score > 0.0 && s.score >= t)
        .map(|s| (s.doc_id, s.category.clone()))
        .collect())
}

/// The top `k` nonzero-scored categories of each document; ties go to the
/// lexicographically smaller category.
pub fn assign_k_per_doc(scores: &[ScoredAssignment], k: usize) -> Result<AssignedSet> {
    if k < 1 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let mut by_doc: BTreeMap<u32, Vec<&ScoredAssignment>> = BTreeMap::new();
    for s in scores.iter().filter(|s| s.score > 0.0) {
        by_doc.entry(s.doc_id).or_default().push(s);
    }
    let mut out = AssignedSet::new();
    for (doc, mut list) in by_doc {
        list.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.category.cmp(&b.category)));
        out.extend(list.into_iter().take(k).map(|s| (doc, s.category.clone())));
    }
    Ok(out)
}

#[derive(Default, Clone, Copy)]
struct Counts {
    correct: usize,
    assigned: usize,
    expected: usize,
}

fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> f64 {
    let (sum, n) = values.flatten().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn macro_from(counts: impl Iterator<Item = Counts> + Clone) -> (f64, f64) {
    (
        mean_defined(counts.clone().map(|c| ratio(c.correct, c.expected))),
        mean_defined(counts.map(|c| ratio(c.correct, c.assigned))),
    )
}

/// Category-oriented macro recall and precision. Categories with nothing to
/// find are skipped for recall, categories with nothing assigned for
/// precision; when all are skipped the value is 0.
pub fn macro_rp(assigned: &AssignedSet, gold: &GoldStandard, categories: &[String]) -> (f64, f64) {
    macro_rp_oriented(assigned, gold, categories, Orientation::Category)
}

pub fn macro_rp_oriented(
    assigned: &AssignedSet,
    gold: &GoldStandard,
    categories: &[String],
    orientation: Orientation,
) -> (f64, f64) {
    match orientation {
        Orientation::Category => {
            let mut counts: HashMap<&str, Counts> = categories.iter().map(|c| (c.as_str(), Counts::default())).collect();
            for (_, cats) in gold.docs() {
                for c in cats {
                    if let Some(e) = counts.get_mut(c.as_str()) {
                        e.expected += 1;
                    }
                }
            }
            for (doc, c) in assigned {
                if let Some(e) = counts.get_mut(c.as_str()) {
                    e.assigned += 1;
                    if gold.contains(*doc, c) {
                        e.correct += 1;
                    }
                }
            }
            // fixed order keeps the floating-point sum deterministic
            macro_from(categories.iter().map(|c| counts[c.as_str()]))
        }
        Orientation::Document => {
            let mut counts: BTreeMap<u32, Counts> = BTreeMap::new();
            for (doc, cats) in gold.docs() {
                counts.entry(doc).or_default().expected += cats.len();
            }
            for (doc, c) in assigned {
                let e = counts.entry(*doc).or_default();
                e.assigned += 1;
                if gold.contains(*doc, c) {
                    e.correct += 1;
                }
            }
            macro_from(counts.values().copied())
        }
    }
}

/// Pooled recall and precision; 0/0 is 0.
pub fn micro_rp(assigned: &AssignedSet, gold: &GoldStandard) -> (f64, f64) {
    let correct = assigned.iter().filter(|(d, c)| gold.contains(*d, c)).count();
    (
        ratio(correct, gold.pair_count()).unwrap_or(0.0),
        ratio(correct, assigned.len()).unwrap_or(0.0),
    )
}

/// Recall and precision for a single category; `None` where undefined.
pub fn category_rp(assigned: &AssignedSet, gold: &GoldStandard, category: &str) -> (Option<f64>, Option<f64>) {
    let expected = gold.docs().filter(|(_, c)| c.contains(category)).count();
    let mine: Vec<u32> = assigned
        .iter()
        .filter(|(_, c)| c == category)
        .map(|(d, _)| *d)
        .collect();
    let correct = mine.iter().filter(|&&d| gold.contains(d, category)).count();
    (ratio(correct, expected), ratio(correct, mine.len()))
}

/// Assignment sets for every level of a strategy, paired with the level.
pub fn assignments(scores: &[ScoredAssignment], strategy: Strategy) -> Result<Vec<(f64, AssignedSet)>> {
    match strategy {
        Strategy::Threshold => (0..THRESHOLD_LEVELS)
            .map(|i| {
                let t = i as f64 / 10.0;
                assign_by_threshold(scores, t).map(|a| (t, a))
            })
            .collect(),
        Strategy::KPerDoc { k_max } => {
            if k_max < 1 {
                return Err(Error::invalid("k_max must be at least 1"));
            }
            (1..=k_max)
                .map(|k| assign_k_per_doc(scores, k).map(|a| (k as f64, a)))
                .collect()
        }
    }
}

pub fn sweep(
    approach: &str,
    scores: &[ScoredAssignment],
    gold: &GoldStandard,
    categories: &[String],
    strategy: Strategy,
    orientation: Orientation,
) -> Result<EvalReport> {
    let points: Vec<RPPoint> = assignments(scores, strategy)?
        .into_iter()
        .map(|(level, assigned)| {
            let (macro_recall, macro_precision) = macro_rp_oriented(&assigned, gold, categories, orientation);
            let (micro_recall, micro_precision) = micro_rp(&assigned, gold);
            RPPoint {
                level,
                macro_recall,
                macro_precision,
                micro_recall,
                micro_precision,
            }
        })
        .collect();
    let n = points.len() as f64;
    let avg = |f: fn(&RPPoint) -> f64| points.iter().map(f).sum::<f64>() / n;
    let averages = Averages {
        macro_recall: avg(|p| p.macro_recall),
        macro_precision: avg(|p| p.macro_precision),
        micro_recall: avg(|p| p.micro_recall),
        micro_precision: avg(|p| p.micro_precision),
    };
    Ok(EvalReport {
        approach: approach.to_string(),
        strategy,
        orientation,
        points,
        averages,
    })
}

/// One row per report with the four averaged figures at six decimals.
pub fn render_report(reports: &[EvalReport]) -> String {
    let first = reports.first().map_or("Threshold", |r| r.strategy.label());
    let width = reports
        .iter()
        .map(|r| r.approach.len())
        .chain([first.len(), 10])
        .max()
        .unwrap_or(10);
    let mut out = String::new();
    writeln!(
        out,
        "{first:<width$}  {:>9}  {:>9}  {:>9}  {:>9}",
        "Macro-R", "Macro-P", "Micro-R", "Micro-P"
    )
    .unwrap();
    for r in reports {
        let a = &r.averages;
        writeln!(
            out,
            "{:<width$}  {:>9.6}  {:>9.6}  {:>9.6}  {:>9.6}",
            r.approach, a.macro_recall, a.macro_precision, a.micro_recall, a.micro_precision
        )
        .unwrap();
    }
    out
}

/// Per-level detail of one report.
pub fn render_points(report: &EvalReport) -> String {
    let mut out = String::new();
    let level = match report.strategy {
        Strategy::Threshold => "t",
        Strategy::KPerDoc { .. } => "k",
    };
    writeln!(out, "{} ({})", report.approach, report.strategy.label()).unwrap();
    writeln!(out, "{level:>5}  {:>9}  {:>9}  {:>9}  {:>9}", "Macro-R", "Macro-P", "Micro-R", "Micro-P").unwrap();
    for p in &report.points {
        let lv = match report.strategy {
            Strategy::Threshold => format!("{:.1}", p.level),
            Strategy::KPerDoc { .. } => format!("{}", p.level as usize),
        };
        writeln!(
            out,
            "{lv:>5}  {:>9.6}  {:>9.6}  {:>9.6}  {:>9.6}",
            p.macro_recall, p.macro_precision, p.micro_recall, p.micro_precision
        )
        .unwrap();
    }
    out
}

pub fn reports_to_json(reports: &[EvalReport]) -> Result<String> {
    Ok(serde_json::to_string_pretty(reports)?)
}

/// CSV with header `doc_id,category,score`.
pub fn write_scores_csv(scores: &[ScoredAssignment]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["doc_id", "category", "score"])
        .map_err(|e| Error::ScoreFormat { line: 1, message: e.to_string() })?;
    for s in scores {
        w.write_record([s.doc_id.to_string(), s.category.clone(), s.score.to_string()])
            .map_err(|e| Error::ScoreFormat { line: 0, message: e.to_string() })?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::ScoreFormat { line: 0, message: e.to_string() })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn read_scores_csv(text: &str) -> Result<Vec<ScoredAssignment>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let fail = |message: String| Error::ScoreFormat { line, message };
        let rec = rec.map_err(|e| fail(e.to_string()))?;
        if rec.len() != 3 {
            return Err(fail(format!("expected 3 fields, found {}", rec.len())));
        }
        let doc_id = rec[0].parse().map_err(|_| fail(format!("bad doc_id `{}`", &rec[0])))?;
        let score: f64 = rec[2].parse().map_err(|_| fail(format!("bad score `{}`", &rec[2])))?;
        if !(0.0..=1.0).contains(&score) {
            return Err(fail(format!("score {score} outside [0, 1]")));
        }
        out.push(ScoredAssignment {
            doc_id,
            category: rec[1].to_lowercase(),
            score,
        });
    }
    Ok(out)
}
