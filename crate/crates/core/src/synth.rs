//! Deterministic synthetic corpora in the newswire record format.
//!
//! Each category owns a name word, two synonyms and a handful of topical
//! words; documents mix those with shared background vocabulary. Category
//! popularity follows a Zipf curve, and the last `undertrained` categories
//! never label a training document but do label test documents. Their
//! synonyms are sprinkled into a few unlabeled training documents so that
//! they are part of the training text.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{write_collection, Collection, Document, Split};
use crate::error::{Error, Result};

const SYLLABLES: [&str; 30] = [
    "ka", "lo", "mi", "tu", "re", "sa", "no", "vi", "de", "po", "zu", "ga", "be", "ri", "fo", "ne", "ta", "ku", "le",
    "mo", "si", "da", "pe", "ro", "ha", "ju", "we", "xi", "bo", "ny",
];
const MONTHS: [&str; 12] = [
    "JAN", "FEB", "MAR", "APR", "MAY", "JUN", "JUL", "AUG", "SEP", "OCT", "NOV", "DEC",
];
const BACKGROUND_WORDS: usize = 150;
const TOPICAL_WORDS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_docs: usize,
    pub n_categories: usize,
    /// How many categories (the least popular ones) get no training
    /// documents.
    pub undertrained: usize,
    /// Fraction of documents, in file order, that form the training split.
    pub train_fraction: f64,
    /// Exponent of the Zipf popularity curve over categories.
    pub zipf_exponent: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 42,
            n_docs: 1000,
            n_categories: 20,
            undertrained: 1,
            train_fraction: 0.8,
            zipf_exponent: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCategory {
    pub name: String,
    pub synonyms: Vec<String>,
    pub topical: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub collection: Collection,
    pub categories: Vec<SynthCategory>,
    pub train_count: usize,
    pub undertrained: Vec<String>,
}

impl SynthCorpus {
    /// The corpus in the record format.
    pub fn corpus_text(&self) -> String {
        write_collection(&self.collection)
    }

    /// A lexicon listing each category's synonyms.
    pub fn lexicon_text(&self) -> String {
        let mut out = String::from("# synthetic lexicon\n");
        for c in &self.categories {
            let mut syns = vec![c.name.clone()];
            syns.extend(c.synonyms.iter().cloned());
            writeln!(out, "{}: {}", c.name, syns.join(" | ")).unwrap();
        }
        out
    }
}

struct WordMaker {
    seen: HashSet<String>,
}

impl WordMaker {
    fn word(&mut self, rng: &mut ChaCha8Rng) -> String {
        loop {
            let n = rng.random_range(2..4u32);
            let w: String = (0..n)
                .map(|_| SYLLABLES[rng.random_range(0..SYLLABLES.len() as u32) as usize])
                .collect();
            if self.seen.insert(w.clone()) {
                return w;
            }
        }
    }
}

fn pick<'a>(rng: &mut ChaCha8Rng, words: &'a [String]) -> &'a str {
    &words[rng.random_range(0..words.len() as u32) as usize]
}

fn weighted(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut x = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if x < *w {
            return i;
        }
        x -= w;
    }
    weights.len() - 1
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthCorpus> {
    if cfg.n_docs < 1 || cfg.n_categories < 1 {
        return Err(Error::invalid("n_docs and n_categories must be at least 1"));
    }
    if cfg.undertrained > cfg.n_categories {
        return Err(Error::invalid("more undertrained categories than categories"));
    }
    if !(0.0..=1.0).contains(&cfg.train_fraction) {
        return Err(Error::invalid("train_fraction must lie in [0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut maker = WordMaker { seen: HashSet::new() };

    let background: Vec<String> = (0..BACKGROUND_WORDS).map(|_| maker.word(&mut rng)).collect();
    let categories: Vec<SynthCategory> = (0..cfg.n_categories)
        .map(|_| SynthCategory {
            name: maker.word(&mut rng),
            synonyms: (0..2).map(|_| maker.word(&mut rng)).collect(),
            topical: (0..TOPICAL_WORDS).map(|_| maker.word(&mut rng)).collect(),
        })
        .collect();
    let first_under = cfg.n_categories - cfg.undertrained;
    let popularity: Vec<f64> = (0..cfg.n_categories)
        .map(|r| 1.0 / ((r + 1) as f64).powf(cfg.zipf_exponent))
        .collect();
    let train_popularity: Vec<f64> = popularity
        .iter()
        .enumerate()
        .map(|(i, &w)| if i >= first_under { 0.0 } else { w })
        .collect();

    let train_count = (cfg.n_docs as f64 * cfg.train_fraction).floor() as usize;
    let mut documents = Vec::with_capacity(cfg.n_docs);
    for i in 0..cfg.n_docs {
        let training = i < train_count;
        let test_index = i.saturating_sub(train_count);
        let mut topics: BTreeSet<usize> = BTreeSet::new();
        if !training && test_index < cfg.undertrained {
            topics.insert(first_under + test_index);
        } else if rng.random_bool(0.7) {
            let weights = if training { &train_popularity } else { &popularity };
            if weights.iter().any(|&w| w > 0.0) {
                let n = if rng.random_bool(0.25) { 2 } else { 1 };
                for _ in 0..n {
                    topics.insert(weighted(&mut rng, weights));
                }
            }
        }

        let len = rng.random_range(40..120u32) as usize;
        let topic_list: Vec<usize> = topics.iter().copied().collect();
        let seed_under = training && topics.is_empty() && first_under < cfg.n_categories && rng.random_bool(0.3);
        let mut words: Vec<String> = Vec::with_capacity(len + 4);
        for _ in 0..len {
            let roll = rng.random::<f64>();
            if !topic_list.is_empty() && roll < 0.35 {
                let c = &categories[topic_list[rng.random_range(0..topic_list.len() as u32) as usize]];
                if roll < 0.05 {
                    let mut names = vec![c.name.clone()];
                    names.extend(c.synonyms.iter().cloned());
                    words.push(pick(&mut rng, &names).to_string());
                } else {
                    words.push(pick(&mut rng, &c.topical).to_string());
                }
            } else if roll > 0.97 {
                words.push(format!("{},{:03}", rng.random_range(1..10u32), rng.random_range(0..1000u32)));
            } else {
                words.push(pick(&mut rng, &background).to_string());
            }
        }
        if seed_under {
            let c = &categories[rng.random_range(first_under as u32..cfg.n_categories as u32) as usize];
            for s in &c.synonyms {
                let at = rng.random_range(0..words.len() as u32) as usize;
                words.insert(at, s.clone());
            }
        }

        let title = words.iter().take(5).map(|w| w.to_uppercase()).collect::<Vec<_>>().join(" ");
        let mut body = String::new();
        let mut line = String::from("    ");
        for (j, w) in words.iter().enumerate() {
            if line.len() + w.len() > 64 {
                body.push_str(line.trim_end());
                body.push('\n');
                line = String::from("    ");
            }
            line.push_str(w);
            line.push_str(if j % 11 == 10 { ". " } else { " " });
        }
        body.push_str(line.trim_end());

        let month = MONTHS[(i / 28) % 12];
        let dateline = format!(
            "{:02}-{month}-1987 {:02}:{:02}:{:02}.{:02}",
            i % 28 + 1,
            (i / 3600) % 24,
            (i / 60) % 60,
            i % 60,
            i % 100
        );
        documents.push(Document {
            doc_id: (i + 1) as u32,
            split: if training { Split::Training } else { Split::Test },
            annotation: Some(if training { "TRAINING-SET" } else { "TEST-SET" }.to_string()),
            dateline,
            title,
            body,
            topics: topics.iter().map(|&k| categories[k].name.clone()).collect(),
        });
    }

    let mut names: Vec<String> = categories.iter().map(|c| c.name.clone()).collect();
    names.sort();
    Ok(SynthCorpus {
        collection: Collection {
            documents,
            categories: names,
        },
        undertrained: categories[first_under..].iter().map(|c| c.name.clone()).collect(),
        categories,
        train_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_collection;
    use crate::lexicon::parse_lexicon;

    #[test]
    fn same_seed_same_bytes() {
        let cfg = SynthConfig {
            n_docs: 200,
            ..SynthConfig::default()
        };
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a.corpus_text(), b.corpus_text());
        assert_eq!(a.lexicon_text(), b.lexicon_text());
        let c = generate(&SynthConfig { seed: 7, ..cfg }).unwrap();
        assert_ne!(a.corpus_text(), c.corpus_text());
    }

    #[test]
    fn undertrained_category_only_in_test() {
        let cfg = SynthConfig {
            n_docs: 60,
            n_categories: 3,
            undertrained: 1,
            ..SynthConfig::default()
        };
        let s = generate(&cfg).unwrap();
        let u = &s.undertrained[0];
        let docs = &s.collection.documents;
        assert!(docs[..s.train_count].iter().all(|d| !d.topics.contains(u)));
        assert!(docs[s.train_count..].iter().any(|d| d.topics.contains(u)));
    }

    #[test]
    fn single_doc_round_trips() {
        let s = generate(&SynthConfig {
            n_docs: 1,
            ..SynthConfig::default()
        })
        .unwrap();
        let parsed = parse_collection(s.corpus_text().as_bytes()).unwrap();
        assert_eq!(parsed.documents.len(), 1);
        let mut expected = s.collection.documents[0].clone();
        expected.split = Split::Training;
        assert_eq!(parsed.documents[0], expected);
    }

    #[test]
    fn lexicon_parses() {
        let s = generate(&SynthConfig::default()).unwrap();
        let m = parse_lexicon(&s.lexicon_text()).unwrap();
        assert_eq!(m.len(), 20);
        assert!(m.iter().all(|(_, terms)| terms.len() == 3));
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(generate(&SynthConfig { n_docs: 0, ..SynthConfig::default() }).is_err());
        assert!(generate(&SynthConfig { n_categories: 0, ..SynthConfig::default() }).is_err());
        assert!(generate(&SynthConfig { n_categories: 2, undertrained: 3, ..SynthConfig::default() }).is_err());
    }
}
