//! Radical dictionary with frequencies and TF-IDF, and the sparse
//! specialist–term matrix that feeds the autoencoder.
//!
//! Vocabulary build is a sequential reduction; once the vocabulary is
//! frozen, per-document vectorization is pure and freely parallelizable.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::corpus::{collect_texts, CurriculumRecord};
use crate::textproc::TextTables;

#[derive(Debug, Error)]
pub enum VectorizeError {
    #[error("empty corpus after processing")]
    EmptyCorpus,
    #[error("no term meets min_df={min_df}")]
    EmptyVocabulary { min_df: u32 },
    #[error("document frequency out of contract: df={df}, n_docs={n_docs}")]
    WeightContract { df: u32, n_docs: usize },
    #[error("matrix has no non-empty rows")]
    EmptyMatrix,
    #[error("duplicate specialist id \"{0}\"")]
    DuplicateId(String),
    #[error("invalid sparse vector: {0}")]
    InvalidVector(String),
    #[error("line {line}: {reason}")]
    BadFile { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One specialist's aggregated bag of radicals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialistDocument {
    pub specialist_id: String,
    pub radical_counts: BTreeMap<String, u32>,
}

impl SpecialistDocument {
    pub fn is_empty(&self) -> bool {
        self.radical_counts.is_empty()
    }

    pub fn total_count(&self) -> u64 {
        self.radical_counts.values().map(|&c| u64::from(c)).sum()
    }
}

/// Runs every collected text of every record through the treatment pipeline
/// and sums radical multiplicities per specialist. Specialists whose texts
/// all filter away yield an empty document; callers can flag those via
/// [`SpecialistDocument::is_empty`].
pub fn build_documents(
    records: &[CurriculumRecord],
    tables: &TextTables,
) -> Vec<SpecialistDocument> {
    records
        .iter()
        .map(|record| {
            let mut counts: BTreeMap<String, u32> = BTreeMap::new();
            for (text, _kind) in collect_texts(record) {
                for (radical, n) in tables.process(text) {
                    *counts.entry(radical).or_insert(0) += n;
                }
            }
            SpecialistDocument {
                specialist_id: record.specialist_id.clone(),
                radical_counts: counts,
            }
        })
        .collect()
}

/// Dictionary entry: dense index plus document and collection frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TermEntry {
    pub index: u32,
    pub df: u32,
    pub cf: u64,
}

/// The radical dictionary. Indices are assigned in lexicographic radical
/// order, so iteration order and index assignment are deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    entries: BTreeMap<String, TermEntry>,
    n_docs: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn get(&self, radical: &str) -> Option<&TermEntry> {
        self.entries.get(radical)
    }

    /// Entries in lexicographic radical order (also ascending index order).
    pub fn iter(&self) -> impl Iterator<Item = (&str, &TermEntry)> {
        self.entries.iter().map(|(r, e)| (r.as_str(), e))
    }

    /// Total radical occurrences across the corpus.
    pub fn total_cf(&self) -> u64 {
        self.entries.values().map(|e| e.cf).sum()
    }

    /// TSV export: a header line carrying `n_docs`, then
    /// `radical<TAB>index<TAB>df<TAB>cf` rows in index order.
    pub fn save_tsv(&self, mut writer: impl Write) -> io::Result<()> {
        writeln!(writer, "#n_docs\t{}", self.n_docs)?;
        for (radical, entry) in &self.entries {
            writeln!(writer, "{radical}\t{}\t{}\t{}", entry.index, entry.df, entry.cf)?;
        }
        Ok(())
    }

    pub fn load_tsv(reader: impl BufRead) -> Result<Vocabulary, VectorizeError> {
        let mut lines = reader.lines().enumerate();
        let (_, header) = lines.next().ok_or(VectorizeError::BadFile {
            line: 1,
            reason: "missing header".into(),
        })?;
        let header = header?;
        let n_docs: usize = header
            .strip_prefix("#n_docs\t")
            .and_then(|v| v.trim().parse().ok())
            .ok_or(VectorizeError::BadFile {
                line: 1,
                reason: "expected \"#n_docs<TAB><count>\" header".into(),
            })?;
        let mut entries = BTreeMap::new();
        for (idx, line) in lines {
            let line_no = idx + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(VectorizeError::BadFile {
                    line: line_no,
                    reason: format!("expected 4 fields, got {}", fields.len()),
                });
            }
            let parse_err = |what: &str| VectorizeError::BadFile {
                line: line_no,
                reason: format!("bad {what} field"),
            };
            let entry = TermEntry {
                index: fields[1].parse().map_err(|_| parse_err("index"))?,
                df: fields[2].parse().map_err(|_| parse_err("df"))?,
                cf: fields[3].parse().map_err(|_| parse_err("cf"))?,
            };
            if entries.insert(fields[0].to_string(), entry).is_some() {
                return Err(VectorizeError::BadFile {
                    line: line_no,
                    reason: format!("duplicate radical \"{}\"", fields[0]),
                });
            }
        }
        let vocab = Vocabulary { entries, n_docs };
        vocab.validate()?;
        Ok(vocab)
    }

    fn validate(&self) -> Result<(), VectorizeError> {
        let v = self.len();
        let mut seen = vec![false; v];
        for (radical, entry) in &self.entries {
            let bad = |reason: String| VectorizeError::BadFile { line: 0, reason };
            if entry.index as usize >= v || seen[entry.index as usize] {
                return Err(bad(format!(
                    "indices are not a permutation of 0..{v} (radical \"{radical}\")"
                )));
            }
            seen[entry.index as usize] = true;
            if entry.df == 0 || entry.df as usize > self.n_docs {
                return Err(bad(format!(
                    "radical \"{radical}\": df={} outside 1..={}",
                    entry.df, self.n_docs
                )));
            }
            if entry.cf < u64::from(entry.df) {
                return Err(bad(format!(
                    "radical \"{radical}\": cf={} smaller than df={}",
                    entry.cf, entry.df
                )));
            }
        }
        Ok(())
    }
}

/// Builds the dictionary over all documents. `min_df` prunes rare radicals
/// before indices are assigned; `min_df = 1` keeps everything.
pub fn build_vocabulary(
    documents: &[SpecialistDocument],
    min_df: u32,
) -> Result<Vocabulary, VectorizeError> {
    let n_docs = documents.len();
    if documents.iter().all(SpecialistDocument::is_empty) {
        return Err(VectorizeError::EmptyCorpus);
    }
    let mut freqs: BTreeMap<&str, (u32, u64)> = BTreeMap::new();
    for doc in documents {
        for (radical, &count) in &doc.radical_counts {
            let slot = freqs.entry(radical).or_insert((0, 0));
            slot.0 += 1;
            slot.1 += u64::from(count);
        }
    }
    let min_df = min_df.max(1);
    let mut entries = BTreeMap::new();
    let mut index = 0u32;
    for (radical, (df, cf)) in freqs {
        if df < min_df {
            continue;
        }
        entries.insert(radical.to_string(), TermEntry { index, df, cf });
        index += 1;
    }
    if entries.is_empty() {
        return Err(VectorizeError::EmptyVocabulary { min_df });
    }
    Ok(Vocabulary { entries, n_docs })
}

/// Plain TF-IDF: `tf * ln(n_docs / df)`. Zero when the term appears in
/// every document.
pub fn tfidf_weight(tf: u32, df: u32, n_docs: usize) -> Result<f64, VectorizeError> {
    if df == 0 || df as usize > n_docs {
        return Err(VectorizeError::WeightContract { df, n_docs });
    }
    Ok(f64::from(tf) * (n_docs as f64 / f64::from(df)).ln())
}

/// Which weight feeds the matrix: TF-IDF (default) or raw counts. The
/// dictionary keeps both frequency signals either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightMode {
    #[default]
    TfIdf,
    RawCount,
}

/// A sparse row in vocabulary space: strictly ascending indices, finite
/// non-negative weights, no explicit zeros. Non-empty vectors are stored
/// L2-normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    dim: usize,
    pairs: Vec<(u32, f64)>,
}

impl SparseVector {
    pub fn new(dim: usize, pairs: Vec<(u32, f64)>) -> Result<SparseVector, VectorizeError> {
        let mut last: Option<u32> = None;
        for &(index, weight) in &pairs {
            if index as usize >= dim {
                return Err(VectorizeError::InvalidVector(format!(
                    "index {index} out of range for dim {dim}"
                )));
            }
            if let Some(prev) = last {
                if index <= prev {
                    return Err(VectorizeError::InvalidVector(
                        "indices not strictly increasing".into(),
                    ));
                }
            }
            if !weight.is_finite() || weight <= 0.0 {
                return Err(VectorizeError::InvalidVector(format!(
                    "weight {weight} at index {index} not finite and positive"
                )));
            }
            last = Some(index);
        }
        Ok(SparseVector { dim, pairs })
    }

    pub fn empty(dim: usize) -> SparseVector {
        SparseVector { dim, pairs: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(u32, f64)] {
        &self.pairs
    }

    pub fn norm(&self) -> f64 {
        self.pairs.iter().map(|(_, w)| w * w).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.dim];
        for &(index, weight) in &self.pairs {
            dense[index as usize] = weight;
        }
        dense
    }

    fn l2_normalized(mut self) -> SparseVector {
        let norm = self.norm();
        if norm > 0.0 {
            for pair in &mut self.pairs {
                pair.1 /= norm;
            }
        }
        self
    }
}

/// Weights one document against a frozen vocabulary and L2-normalizes the
/// result. Out-of-vocabulary radicals are ignored; if everything drops out
/// (all radicals OOV, or every weight is zero) the vector comes back empty.
pub fn vectorize_document(
    doc: &SpecialistDocument,
    vocab: &Vocabulary,
    mode: WeightMode,
) -> SparseVector {
    let mut pairs = Vec::new();
    for (radical, &tf) in &doc.radical_counts {
        let Some(entry) = vocab.get(radical) else {
            continue;
        };
        let weight = match mode {
            WeightMode::TfIdf => tfidf_weight(tf, entry.df, vocab.n_docs())
                .expect("vocabulary invariants guarantee the weight contract"),
            WeightMode::RawCount => f64::from(tf),
        };
        if weight > 0.0 {
            pairs.push((entry.index, weight));
        }
    }
    pairs.sort_unstable_by_key(|&(index, _)| index);
    SparseVector { dim: vocab.len(), pairs }.l2_normalized()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRow {
    pub specialist_id: String,
    pub vector: SparseVector,
}

/// The specialist–term matrix: one L2-normalized sparse row per specialist,
/// rows sorted by specialist id.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecialistMatrix {
    dim: usize,
    rows: Vec<MatrixRow>,
}

impl SpecialistMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[MatrixRow] {
        &self.rows
    }

    pub fn row(&self, specialist_id: &str) -> Option<&MatrixRow> {
        self.rows
            .binary_search_by(|row| row.specialist_id.as_str().cmp(specialist_id))
            .ok()
            .map(|i| &self.rows[i])
    }

    /// One line per row: `specialist_id<TAB>index:weight,index:weight,...`.
    /// A `#dim` header makes the file self-describing; weights print in
    /// shortest round-trip form.
    pub fn save_tsv(&self, mut writer: impl Write) -> io::Result<()> {
        writeln!(writer, "#dim\t{}", self.dim)?;
        for row in &self.rows {
            write!(writer, "{}\t", row.specialist_id)?;
            for (i, (index, weight)) in row.vector.pairs().iter().enumerate() {
                if i > 0 {
                    write!(writer, ",")?;
                }
                write!(writer, "{index}:{weight}")?;
            }
            writeln!(writer)?;
        }
        Ok(())
    }

    pub fn load_tsv(reader: impl BufRead) -> Result<SpecialistMatrix, VectorizeError> {
        let mut lines = reader.lines().enumerate();
        let (_, header) = lines.next().ok_or(VectorizeError::BadFile {
            line: 1,
            reason: "missing header".into(),
        })?;
        let header = header?;
        let dim: usize = header
            .strip_prefix("#dim\t")
            .and_then(|v| v.trim().parse().ok())
            .ok_or(VectorizeError::BadFile {
                line: 1,
                reason: "expected \"#dim<TAB><count>\" header".into(),
            })?;
        let mut rows: Vec<MatrixRow> = Vec::new();
        for (idx, line) in lines {
            let line_no = idx + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (id, payload) = line.split_once('\t').ok_or(VectorizeError::BadFile {
                line: line_no,
                reason: "missing tab separator".into(),
            })?;
            let mut pairs = Vec::new();
            if !payload.is_empty() {
                for item in payload.split(',') {
                    let (index, weight) = item.split_once(':').ok_or(VectorizeError::BadFile {
                        line: line_no,
                        reason: format!("bad pair \"{item}\""),
                    })?;
                    let index: u32 = index.parse().map_err(|_| VectorizeError::BadFile {
                        line: line_no,
                        reason: format!("bad index \"{index}\""),
                    })?;
                    let weight: f64 = weight.parse().map_err(|_| VectorizeError::BadFile {
                        line: line_no,
                        reason: format!("bad weight \"{weight}\""),
                    })?;
                    pairs.push((index, weight));
                }
            }
            let vector = SparseVector::new(dim, pairs).map_err(|e| VectorizeError::BadFile {
                line: line_no,
                reason: e.to_string(),
            })?;
            if let Some(prev) = rows.last() {
                if prev.specialist_id.as_str() >= id {
                    return Err(VectorizeError::BadFile {
                        line: line_no,
                        reason: "rows not sorted by specialist id".into(),
                    });
                }
            }
            rows.push(MatrixRow {
                specialist_id: id.to_string(),
                vector,
            });
        }
        Ok(SpecialistMatrix { dim, rows })
    }
}

/// Assembles the matrix: one row per non-empty document, sorted by
/// specialist id. Returns the ids excluded for having no usable weights.
pub fn build_matrix(
    documents: &[SpecialistDocument],
    vocab: &Vocabulary,
    mode: WeightMode,
) -> Result<(SpecialistMatrix, Vec<String>), VectorizeError> {
    let mut rows = Vec::new();
    let mut excluded = Vec::new();
    for doc in documents {
        let vector = vectorize_document(doc, vocab, mode);
        if vector.is_empty() {
            excluded.push(doc.specialist_id.clone());
        } else {
            rows.push(MatrixRow {
                specialist_id: doc.specialist_id.clone(),
                vector,
            });
        }
    }
    rows.sort_by(|a, b| a.specialist_id.cmp(&b.specialist_id));
    for pair in rows.windows(2) {
        if pair[0].specialist_id == pair[1].specialist_id {
            return Err(VectorizeError::DuplicateId(pair[0].specialist_id.clone()));
        }
    }
    if rows.is_empty() {
        return Err(VectorizeError::EmptyMatrix);
    }
    excluded.sort();
    Ok((
        SpecialistMatrix {
            dim: vocab.len(),
            rows,
        },
        excluded,
    ))
}
