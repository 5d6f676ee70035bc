//! Reference figures from the full-scale corpus this engine targets.
//!
//! The production workload is a national curriculum platform snapshot of all
//! researchers holding a doctorate. Desk-scale runs and the test suite use
//! the bundled synthetic corpora instead; these constants document the
//! full-scale deployment for sizing and for the `stats` report.

/// Curriculum records in the full-scale snapshot.
pub const RECORDS: usize = 308_256;

/// Conference papers across all records.
pub const CONFERENCE_PAPERS: u64 = 12_456_432;

/// Journal articles across all records.
pub const JOURNAL_ARTICLES: u64 = 6_897_234;

/// Research projects across all records.
pub const RESEARCH_PROJECTS: u64 = 234_897;

/// Extension projects across all records.
pub const EXTENSION_PROJECTS: u64 = 198_345;

/// Distinct radicals in the dictionary built from the full corpus; also the
/// autoencoder input width at full scale.
pub const DISTINCT_RADICALS: usize = 68_417;

/// Total radical occurrences across the full corpus.
pub const TERM_UTILIZATIONS: u64 = 193_440_564;

/// Minimum mean reconstruction loss reached when training at full scale.
pub const MIN_RECONSTRUCTION_LOSS: f64 = 0.33;

/// Approximate wall-clock minutes per training epoch at full scale.
pub const MINUTES_PER_EPOCH: f64 = 200.0;

/// Training epochs used for the full-scale model.
pub const TRAINING_EPOCHS: usize = 18;
