//! Expert retrieval over bibliographic curriculum corpora.
//!
//! The pipeline turns each specialist's publication titles, keywords and
//! project titles into a bag of stemmed radicals, weighs the radicals with
//! TF-IDF, compresses the resulting sparse profile with a deep autoencoder,
//! and ranks specialists against free-text queries by cosine similarity in
//! the learned embedding space. A PCA projection of the embeddings supports
//! 3-D visualization.
//!
//! Modules follow the pipeline stages:
//!
//! - [`corpus`]: curriculum record parsing and corpus statistics
//! - [`textproc`]: language identification, normalization, stopwords, stemming
//! - [`vectorize`]: radical dictionary, TF-IDF weights, sparse specialist matrix
//! - [`neural`]: from-scratch autoencoder, cosine loss, Adam, training loop
//! - [`retrieve`]: embedding index, cosine ranking, PCA visualization export
//! - [`synth`]: seeded synthetic corpora for offline tests and benchmarks

pub mod corpus;
pub mod neural;
pub mod reference;
pub mod retrieve;
pub mod synth;
pub mod textproc;
pub mod vectorize;

pub use corpus::{CorpusStats, CurriculumRecord, Work, WorkKind};
pub use neural::{AdamState, AutoencoderModel, TrainConfig, TrainReport};
pub use retrieve::{EmbeddingIndex, PcaModel, QueryResult};
pub use textproc::{Language, StemRuleSet, StopwordTable, TextTables};
pub use vectorize::{
    SparseVector, SpecialistDocument, SpecialistMatrix, Vocabulary, WeightMode,
};
