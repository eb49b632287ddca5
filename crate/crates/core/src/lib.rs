//! Text categorization in the vector space model.
//!
//! Documents and categories are both represented as sparse term-weight
//! vectors and compared by cosine similarity. Four ways of building the
//! category vectors are provided:
//!
//! * [`categorizers::build_direct`]: category names are the only terms.
//! * [`categorizers::build_lexicon`]: category names expanded with synonyms
//!   from a [`lexicon::SynsetMap`].
//! * [`categorizers::build_training`]: tf·log₂(L/cf) weights learned from a
//!   labeled training collection.
//! * [`categorizers::build_integrated`]: the lexicon and training vectors,
//!   each scaled to unit mass per category, summed.
//!
//! The [`eval`] module sweeps assignment thresholds (or k-per-doc) and
//! reports macro- and micro-averaged recall and precision.

pub mod categorizers;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod lexicon;
pub mod pipeline;
pub mod synth;
pub mod vsm;

pub use categorizers::{Approach, CategoryModel, CategorySet, ScoredAssignment};
pub use corpus::{Collection, CollectionStats, Document, Split};
pub use error::{Error, Result};
pub use eval::{EvalReport, GoldStandard, Orientation, RPPoint, Strategy};
pub use lexicon::SynsetMap;
pub use vsm::{DfTable, SparseVector, Term, TermId, Vocabulary};
