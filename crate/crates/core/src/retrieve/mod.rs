//! Embedding index construction, cosine-similarity ranking, and PCA export.
//!
//! The index and the PCA model are immutable after construction; queries are
//! read-only and may run concurrently without coordination.

mod pca;

pub use pca::{fit_pca, PcaModel};

use std::cmp::Ordering;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::thread;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use thiserror::Error;

use crate::corpus::CurriculumRecord;
use crate::neural::{AutoencoderModel, NeuralError};
use crate::textproc::TextTables;
use crate::vectorize::{
    vectorize_document, SparseVector, SpecialistDocument, SpecialistMatrix, Vocabulary,
    WeightMode,
};

const INDEX_MAGIC: &[u8; 4] = b"AIDX";
const INDEX_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum RetrieveError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index fingerprint does not match the supplied model")]
    FingerprintMismatch,
    #[error("empty query after indexing")]
    EmptyQuery,
    #[error("zero-norm vector")]
    ZeroNorm,
    #[error("k must be at least 1")]
    BadK,
    #[error("PCA requires at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("specialist \"{0}\" present in index but missing from records")]
    MissingRecord(String),
    #[error("not an index file (bad magic)")]
    NotAnIndexFile,
    #[error("unsupported index file version {0}")]
    UnsupportedVersion(u32),
    #[error("index file truncated or corrupt: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Neural(#[from] NeuralError),
}

/// Unit-normalized specialist embeddings, ordered by specialist id, plus the
/// fingerprint of the model that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingIndex {
    fingerprint: [u8; 32],
    dim: usize,
    ids: Vec<String>,
    embeddings: Vec<Vec<f64>>,
}

impl EmbeddingIndex {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fingerprint(&self) -> &[u8; 32] {
        &self.fingerprint
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn embedding(&self, i: usize) -> &[f64] {
        &self.embeddings[i]
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.ids
            .iter()
            .zip(&self.embeddings)
            .map(|(id, e)| (id.as_str(), e.as_slice()))
    }

    /// Binary `AIDX` export, little-endian.
    pub fn write_to(&self, mut w: impl Write) -> io::Result<()> {
        w.write_all(INDEX_MAGIC)?;
        w.write_u32::<LittleEndian>(INDEX_VERSION)?;
        w.write_all(&self.fingerprint)?;
        w.write_u64::<LittleEndian>(self.ids.len() as u64)?;
        w.write_u32::<LittleEndian>(self.dim as u32)?;
        for (id, embedding) in self.ids.iter().zip(&self.embeddings) {
            w.write_u32::<LittleEndian>(id.len() as u32)?;
            w.write_all(id.as_bytes())?;
            for &v in embedding {
                w.write_f64::<LittleEndian>(v)?;
            }
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), RetrieveError> {
        let mut file = BufWriter::new(File::create(path)?);
        self.write_to(&mut file)?;
        file.flush()?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<EmbeddingIndex, RetrieveError> {
        let truncated = |_| RetrieveError::Corrupt("unexpected end of file".into());
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)
            .map_err(|_| RetrieveError::Corrupt("missing header".into()))?;
        if &magic != INDEX_MAGIC {
            return Err(RetrieveError::NotAnIndexFile);
        }
        let version = r.read_u32::<LittleEndian>().map_err(truncated)?;
        if version != INDEX_VERSION {
            return Err(RetrieveError::UnsupportedVersion(version));
        }
        let mut fingerprint = [0u8; 32];
        r.read_exact(&mut fingerprint).map_err(truncated)?;
        let count = r.read_u64::<LittleEndian>().map_err(truncated)? as usize;
        let dim = r.read_u32::<LittleEndian>().map_err(truncated)? as usize;
        let mut ids = Vec::with_capacity(count);
        let mut embeddings = Vec::with_capacity(count);
        for _ in 0..count {
            let id_len = r.read_u32::<LittleEndian>().map_err(truncated)? as usize;
            let mut id_bytes = vec![0u8; id_len];
            r.read_exact(&mut id_bytes).map_err(truncated)?;
            let id = String::from_utf8(id_bytes)
                .map_err(|_| RetrieveError::Corrupt("id is not valid UTF-8".into()))?;
            let mut embedding = vec![0.0; dim];
            for v in &mut embedding {
                *v = r.read_f64::<LittleEndian>().map_err(truncated)?;
            }
            if (l2_norm(&embedding) - 1.0).abs() > 1e-9 {
                return Err(RetrieveError::Corrupt(format!(
                    "embedding for \"{id}\" is not unit norm"
                )));
            }
            ids.push(id);
            embeddings.push(embedding);
        }
        Ok(EmbeddingIndex {
            fingerprint,
            dim,
            ids,
            embeddings,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<EmbeddingIndex, RetrieveError> {
        EmbeddingIndex::read_from(BufReader::new(File::open(path)?))
    }
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn normalized(mut v: Vec<f64>) -> Option<Vec<f64>> {
    let n = l2_norm(&v);
    if n == 0.0 {
        return None;
    }
    for x in &mut v {
        *x /= n;
    }
    Some(v)
}

/// Encodes every matrix row and stores the unit-normalized embeddings.
/// Returns the ids of rows whose embedding collapsed to zero norm.
pub fn build_index(
    model: &AutoencoderModel,
    matrix: &SpecialistMatrix,
) -> Result<(EmbeddingIndex, Vec<String>), RetrieveError> {
    build_index_parallel(model, matrix, 1)
}

/// Same as [`build_index`] but encodes rows on `threads` workers. Output is
/// ordered by row, so the result does not depend on scheduling.
pub fn build_index_parallel(
    model: &AutoencoderModel,
    matrix: &SpecialistMatrix,
    threads: usize,
) -> Result<(EmbeddingIndex, Vec<String>), RetrieveError> {
    if model.input_dim() != matrix.dim() {
        return Err(RetrieveError::DimensionMismatch(format!(
            "model expects input width {}, matrix has {}",
            model.input_dim(),
            matrix.dim()
        )));
    }
    let rows = matrix.rows();
    let threads = threads.max(1).min(rows.len().max(1));
    let mut encoded: Vec<Option<Vec<f64>>> = Vec::with_capacity(rows.len());
    if threads <= 1 {
        for row in rows {
            encoded.push(Some(model.encode(&row.vector.to_dense())?));
        }
    } else {
        let chunk = rows.len().div_ceil(threads);
        let results: Vec<Result<Vec<Vec<f64>>, NeuralError>> = thread::scope(|scope| {
            let handles: Vec<_> = rows
                .chunks(chunk)
                .map(|slice| {
                    scope.spawn(move || {
                        slice
                            .iter()
                            .map(|row| model.encode(&row.vector.to_dense()))
                            .collect::<Result<Vec<_>, _>>()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("encoder worker panicked")).collect()
        });
        for chunk_result in results {
            for embedding in chunk_result? {
                encoded.push(Some(embedding));
            }
        }
    }

    let mut ids = Vec::with_capacity(rows.len());
    let mut embeddings = Vec::with_capacity(rows.len());
    let mut excluded = Vec::new();
    for (row, slot) in rows.iter().zip(encoded.iter_mut()) {
        let embedding = slot.take().expect("every row was encoded");
        match normalized(embedding) {
            Some(unit) => {
                ids.push(row.specialist_id.clone());
                embeddings.push(unit);
            }
            None => excluded.push(row.specialist_id.clone()),
        }
    }
    Ok((
        EmbeddingIndex {
            fingerprint: model.fingerprint(),
            dim: model.embedding_dim(),
            ids,
            embeddings,
        },
        excluded,
    ))
}

/// Plain cosine similarity; errors on a zero-norm operand.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64, RetrieveError> {
    if a.len() != b.len() {
        return Err(RetrieveError::DimensionMismatch(format!(
            "{} vs {}",
            a.len(),
            b.len()
        )));
    }
    let (na, nb) = (l2_norm(a), l2_norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(RetrieveError::ZeroNorm);
    }
    Ok(a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / (na * nb))
}

/// One ranked hit.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub specialist_id: String,
    pub score: f64,
    pub rank: usize,
}

/// Orders candidates by score descending, ties by id ascending.
fn ranking_order(a: &(f64, &str), b: &(f64, &str)) -> Ordering {
    b.0.partial_cmp(&a.0)
        .expect("scores are finite")
        .then_with(|| a.1.cmp(b.1))
}

/// Encodes a free-text query through the full treatment pipeline and ranks
/// every indexed specialist by cosine similarity, returning the top `k`.
///
/// The query's TF-IDF vector is L2-normalized before encoding, exactly like
/// the training rows, so query scale cannot perturb the ranking.
pub fn query(
    index: &EmbeddingIndex,
    model: &AutoencoderModel,
    vocab: &Vocabulary,
    tables: &TextTables,
    text: &str,
    k: usize,
    mode: WeightMode,
) -> Result<Vec<QueryResult>, RetrieveError> {
    if k == 0 {
        return Err(RetrieveError::BadK);
    }
    if model.fingerprint() != index.fingerprint {
        return Err(RetrieveError::FingerprintMismatch);
    }
    let vector = index_query_text(vocab, tables, text, mode)?;
    let embedding = embed_query(index, model, &vector)?;
    Ok(rank_embedding(index, &embedding, k))
}

/// Treatment + vocabulary weighting of a query text. Errors when every term
/// is a stopword or out of vocabulary.
pub fn index_query_text(
    vocab: &Vocabulary,
    tables: &TextTables,
    text: &str,
    mode: WeightMode,
) -> Result<SparseVector, RetrieveError> {
    let radical_counts = tables.process(text);
    let doc = SpecialistDocument {
        specialist_id: String::new(),
        radical_counts,
    };
    let vector = vectorize_document(&doc, vocab, mode);
    if vector.is_empty() {
        return Err(RetrieveError::EmptyQuery);
    }
    Ok(vector)
}

/// Encodes an already-weighted query vector into the unit embedding space.
pub fn embed_query(
    index: &EmbeddingIndex,
    model: &AutoencoderModel,
    vector: &SparseVector,
) -> Result<Vec<f64>, RetrieveError> {
    if vector.dim() != model.input_dim() {
        return Err(RetrieveError::DimensionMismatch(format!(
            "query vector width {} vs model input {}",
            vector.dim(),
            model.input_dim()
        )));
    }
    if index.dim != model.embedding_dim() {
        return Err(RetrieveError::DimensionMismatch(format!(
            "index width {} vs model embedding {}",
            index.dim,
            model.embedding_dim()
        )));
    }
    normalized(model.encode(&vector.to_dense())?).ok_or(RetrieveError::ZeroNorm)
}

/// Exhaustive scan of the index against a unit query embedding.
pub fn rank_embedding(index: &EmbeddingIndex, embedding: &[f64], k: usize) -> Vec<QueryResult> {
    let mut scored: Vec<(f64, &str)> = index
        .entries()
        .map(|(id, stored)| {
            // stored embeddings are unit norm, so the dot product is cosine
            let score: f64 = stored.iter().zip(embedding).map(|(a, b)| a * b).sum();
            (score, id)
        })
        .collect();
    scored.sort_by(ranking_order);
    scored
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(i, (score, id))| QueryResult {
            specialist_id: id.to_string(),
            score,
            rank: i + 1,
        })
        .collect()
}

/// Writes `id,area,x,y,z` rows (with a header) for every indexed specialist,
/// in index order and at full precision. Returns the data row count.
pub fn export_viz(
    index: &EmbeddingIndex,
    pca: &PcaModel,
    records: &[CurriculumRecord],
    mut writer: impl Write,
) -> Result<usize, RetrieveError> {
    let areas: std::collections::HashMap<&str, &str> = records
        .iter()
        .map(|r| (r.specialist_id.as_str(), r.major_area.as_str()))
        .collect();
    writeln!(writer, "id,area,x,y,z")?;
    let mut count = 0;
    for (id, embedding) in index.entries() {
        let area = areas
            .get(id)
            .copied()
            .ok_or_else(|| RetrieveError::MissingRecord(id.to_string()))?;
        let [x, y, z] = pca.project(embedding)?;
        writeln!(
            writer,
            "{},{},{x},{y},{z}",
            csv_field(id),
            csv_field(area)
        )?;
        count += 1;
    }
    Ok(count)
}

fn csv_field(value: &str) -> String {
    if value.contains([',', '"', '\n']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

/// Writes the visualization CSV to a file path.
pub fn export_viz_file(
    index: &EmbeddingIndex,
    pca: &PcaModel,
    records: &[CurriculumRecord],
    path: impl AsRef<Path>,
) -> Result<usize, RetrieveError> {
    let mut file = BufWriter::new(File::create(path)?);
    let count = export_viz(index, pca, records, &mut file)?;
    file.flush()?;
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CurriculumRecord, Work, WorkKind};
    use crate::neural::init_model;
    use crate::vectorize::{build_documents, build_matrix, build_vocabulary};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn record(id: &str, area: &str, titles: &[&str]) -> CurriculumRecord {
        CurriculumRecord {
            specialist_id: id.into(),
            name: format!("name {id}"),
            major_area: area.into(),
            works: titles
                .iter()
                .map(|t| Work {
                    kind: WorkKind::JournalArticle,
                    title: t.to_string(),
                    keywords: vec![],
                    year: None,
                })
                .collect(),
        }
    }

    /// Small corpus with distinctive per-specialist vocabulary.
    fn fixture() -> (Vec<CurriculumRecord>, Vocabulary, SpecialistMatrix, AutoencoderModel) {
        let records = vec![
            record("s1", "exatas", &["grafos e redes complexas", "algoritmos em grafos"]),
            record("s2", "humanas", &["sociologia da educacao", "educacao publica brasileira"]),
            record("s3", "biologicas", &["genetica molecular de plantas", "genetica de bacterias"]),
            record("s4", "exatas", &["mineracao de dados educacionais", "dados abertos"]),
            record("s5", "humanas", &["historia da filosofia", "filosofia da ciencia"]),
        ];
        let tables = TextTables::default();
        let docs = build_documents(&records, &tables);
        let vocab = build_vocabulary(&docs, 1).unwrap();
        let (matrix, _) = build_matrix(&docs, &vocab, WeightMode::TfIdf).unwrap();
        let model = init_model(&[vocab.len(), 16, 12, 8, 5], 0.01, 42).unwrap();
        (records, vocab, matrix, model)
    }

    #[test]
    fn build_index_normalizes_everything() {
        let (_, _, matrix, model) = fixture();
        let (index, excluded) = build_index(&model, &matrix).unwrap();
        assert_eq!(index.len(), matrix.len());
        assert!(excluded.is_empty());
        for (_, e) in index.entries() {
            assert!((l2_norm(e) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn build_index_is_deterministic_and_parallel_matches() {
        let (_, _, matrix, model) = fixture();
        let (a, _) = build_index(&model, &matrix).unwrap();
        let (b, _) = build_index(&model, &matrix).unwrap();
        assert_eq!(a, b);
        let (c, _) = build_index_parallel(&model, &matrix, 3).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn build_index_stores_model_fingerprint() {
        let (_, _, matrix, model) = fixture();
        let (index, _) = build_index(&model, &matrix).unwrap();
        assert_eq!(index.fingerprint(), &model.fingerprint());
    }

    #[test]
    fn build_index_rejects_dim_mismatch() {
        let (_, _, matrix, _) = fixture();
        let wrong = init_model(&[matrix.dim() + 3, 8, 6, 5, 4], 0.01, 1).unwrap();
        assert!(matches!(
            build_index(&wrong, &matrix),
            Err(RetrieveError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn cosine_similarity_examples() {
        let v = vec![0.6, 0.8];
        assert!((cosine_similarity(&v, &v).unwrap() - 1.0).abs() < 1e-12);
        assert!(cosine_similarity(&v, &[0.8, -0.6]).unwrap().abs() < 1e-12);
        assert!((cosine_similarity(&v, &[-0.6, -0.8]).unwrap() + 1.0).abs() < 1e-12);
        assert!(matches!(
            cosine_similarity(&v, &[0.0, 0.0]),
            Err(RetrieveError::ZeroNorm)
        ));
    }

    #[test]
    fn query_ranks_own_texts_first() {
        let (_, vocab, matrix, model) = fixture();
        let (index, _) = build_index(&model, &matrix).unwrap();
        let tables = TextTables::default();
        let results = query(
            &index,
            &model,
            &vocab,
            &tables,
            "genetica molecular de plantas e bacterias",
            3,
            WeightMode::TfIdf,
        )
        .unwrap();
        assert_eq!(results[0].specialist_id, "s3");
        assert!(results[0].score > results[1].score);
        assert_eq!(results[0].rank, 1);
        assert_eq!(results[1].rank, 2);
    }

    #[test]
    fn query_with_own_profile_scores_one() {
        let (_, vocab, matrix, model) = fixture();
        let (index, _) = build_index(&model, &matrix).unwrap();
        // feed s1's exact matrix row back through the embedding path
        let row = matrix.row("s1").unwrap();
        let embedding = embed_query(&index, &model, &row.vector).unwrap();
        let results = rank_embedding(&index, &embedding, 1);
        assert_eq!(results[0].specialist_id, "s1");
        assert!((results[0].score - 1.0).abs() < 1e-6);
        let _ = vocab;
    }

    #[test]
    fn query_of_stopwords_is_empty_query_error() {
        let (_, vocab, matrix, model) = fixture();
        let (index, _) = build_index(&model, &matrix).unwrap();
        let tables = TextTables::default();
        assert!(matches!(
            query(&index, &model, &vocab, &tables, "em no como", 3, WeightMode::TfIdf),
            Err(RetrieveError::EmptyQuery)
        ));
    }

    #[test]
    fn query_oov_terms_is_empty_query_error() {
        let (_, vocab, matrix, model) = fixture();
        let (index, _) = build_index(&model, &matrix).unwrap();
        let tables = TextTables::default();
        assert!(matches!(
            query(&index, &model, &vocab, &tables, "zzzzqqq wwwxxx", 3, WeightMode::TfIdf),
            Err(RetrieveError::EmptyQuery)
        ));
    }

    #[test]
    fn query_k_beyond_index_returns_everything_ranked() {
        let (_, vocab, matrix, model) = fixture();
        let (index, _) = build_index(&model, &matrix).unwrap();
        let tables = TextTables::default();
        let results = query(
            &index,
            &model,
            &vocab,
            &tables,
            "grafos e redes",
            50,
            WeightMode::TfIdf,
        )
        .unwrap();
        assert_eq!(results.len(), index.len());
        let ranks: Vec<usize> = results.iter().map(|r| r.rank).collect();
        assert_eq!(ranks, (1..=index.len()).collect::<Vec<_>>());
        for pair in results.windows(2) {
            assert!(
                pair[0].score > pair[1].score
                    || (pair[0].score == pair[1].score
                        && pair[0].specialist_id < pair[1].specialist_id)
            );
        }
    }

    #[test]
    fn query_rejects_foreign_model() {
        let (_, vocab, matrix, model) = fixture();
        let (index, _) = build_index(&model, &matrix).unwrap();
        let other = init_model(&[vocab.len(), 16, 12, 8, 5], 0.01, 99).unwrap();
        let tables = TextTables::default();
        assert!(matches!(
            query(&index, &other, &vocab, &tables, "grafos", 3, WeightMode::TfIdf),
            Err(RetrieveError::FingerprintMismatch)
        ));
    }

    #[test]
    fn query_scale_invariance_under_normalization() {
        let (_, vocab, matrix, model) = fixture();
        let (index, _) = build_index(&model, &matrix).unwrap();
        // tripling every term count leaves the normalized vector unchanged
        let doc_small = SpecialistDocument {
            specialist_id: String::new(),
            radical_counts: [("grafo".to_string(), 1u32), ("red".to_string(), 2u32)]
                .into_iter()
                .collect::<BTreeMap<_, _>>(),
        };
        let doc_big = SpecialistDocument {
            specialist_id: String::new(),
            radical_counts: doc_small
                .radical_counts
                .iter()
                .map(|(r, c)| (r.clone(), c * 3))
                .collect(),
        };
        let v_small = vectorize_document(&doc_small, &vocab, WeightMode::TfIdf);
        let v_big = vectorize_document(&doc_big, &vocab, WeightMode::TfIdf);
        assert_eq!(v_small, v_big);
        let e_small = embed_query(&index, &model, &v_small).unwrap();
        let e_big = embed_query(&index, &model, &v_big).unwrap();
        assert_eq!(rank_embedding(&index, &e_small, 5), rank_embedding(&index, &e_big, 5));
    }

    #[test]
    fn query_matches_brute_force_scan() {
        let (_, vocab, matrix, model) = fixture();
        let (index, _) = build_index(&model, &matrix).unwrap();
        let tables = TextTables::default();
        let texts = [
            "algoritmos e grafos",
            "educacao publica",
            "dados abertos educacionais",
            "filosofia da ciencia e historia",
        ];
        for text in texts {
            let vector = index_query_text(&vocab, &tables, text, WeightMode::TfIdf).unwrap();
            let embedding = embed_query(&index, &model, &vector).unwrap();
            let got = rank_embedding(&index, &embedding, 3);
            // independent oracle: cosine per entry, selection sort of pairs
            let mut pairs: Vec<(f64, String)> = index
                .entries()
                .map(|(id, e)| (cosine_similarity(e, &embedding).unwrap(), id.to_string()))
                .collect();
            pairs.sort_by(|a, b| {
                b.0.partial_cmp(&a.0).unwrap().then_with(|| a.1.cmp(&b.1))
            });
            for (result, (score, id)) in got.iter().zip(&pairs) {
                assert_eq!(&result.specialist_id, id);
                assert!((result.score - score).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn index_file_round_trip_is_bit_exact() {
        let (_, _, matrix, model) = fixture();
        let (index, _) = build_index(&model, &matrix).unwrap();
        let mut bytes = Vec::new();
        index.write_to(&mut bytes).unwrap();
        let loaded = EmbeddingIndex::read_from(bytes.as_slice()).unwrap();
        assert_eq!(loaded, index);
        let mut bytes2 = Vec::new();
        loaded.write_to(&mut bytes2).unwrap();
        assert_eq!(bytes, bytes2);
    }

    #[test]
    fn index_load_rejects_bad_magic_and_version() {
        let (_, _, matrix, model) = fixture();
        let (index, _) = build_index(&model, &matrix).unwrap();
        let mut bytes = Vec::new();
        index.write_to(&mut bytes).unwrap();
        let mut corrupted = bytes.clone();
        corrupted[0] = b'X';
        assert!(matches!(
            EmbeddingIndex::read_from(corrupted.as_slice()),
            Err(RetrieveError::NotAnIndexFile)
        ));
        let mut versioned = bytes.clone();
        versioned[4..8].copy_from_slice(&9u32.to_le_bytes());
        assert!(matches!(
            EmbeddingIndex::read_from(versioned.as_slice()),
            Err(RetrieveError::UnsupportedVersion(9))
        ));
        assert!(matches!(
            EmbeddingIndex::read_from(&bytes[..bytes.len() - 4]),
            Err(RetrieveError::Corrupt(_))
        ));
    }

    #[test]
    fn viz_export_writes_header_and_rows() {
        let (records, _, matrix, model) = fixture();
        let (index, _) = build_index(&model, &matrix).unwrap();
        let pca = fit_pca(&index).unwrap();
        let mut out = Vec::new();
        let count = export_viz(&index, &pca, &records, &mut out).unwrap();
        assert_eq!(count, index.len());
        let text = String::from_utf8(out.clone()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "id,area,x,y,z");
        assert_eq!(lines.len(), index.len() + 1);
        // re-export is byte-identical
        let mut again = Vec::new();
        export_viz(&index, &pca, &records, &mut again).unwrap();
        assert_eq!(out, again);
    }

    #[test]
    fn viz_export_allows_empty_area_but_not_missing_record() {
        let (mut records, _, matrix, model) = fixture();
        records[0].major_area = String::new();
        let (index, _) = build_index(&model, &matrix).unwrap();
        let pca = fit_pca(&index).unwrap();
        let mut out = Vec::new();
        assert_eq!(export_viz(&index, &pca, &records, &mut out).unwrap(), 5);
        records.remove(2);
        let mut out = Vec::new();
        match export_viz(&index, &pca, &records, &mut out) {
            Err(RetrieveError::MissingRecord(id)) => assert_eq!(id, "s3"),
            other => panic!("expected MissingRecord, got {other:?}"),
        }
    }

    #[test]
    fn ranking_is_total_even_with_duplicate_embeddings() {
        // two identical embeddings tie on every query; ids break the tie
        let e = normalized(vec![0.3, 0.4, 0.5]).unwrap();
        let index = EmbeddingIndex {
            fingerprint: [0; 32],
            dim: 3,
            ids: vec!["b".into(), "a".into(), "c".into()],
            embeddings: vec![e.clone(), e.clone(), normalized(vec![0.5, -0.4, 0.3]).unwrap()],
        };
        let results = rank_embedding(&index, &e, 3);
        assert_eq!(results[0].specialist_id, "a");
        assert_eq!(results[1].specialist_id, "b");
        assert_eq!(results[2].specialist_id, "c");
    }

    #[test]
    fn brute_force_equivalence_on_random_corpora() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for trial in 0..5 {
            let n = rng.gen_range(5..40);
            let dim = rng.gen_range(3..8);
            let embeddings: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    normalized((0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
                })
                .collect();
            let index = EmbeddingIndex {
                fingerprint: [trial as u8; 32],
                dim,
                ids: (0..n).map(|i| format!("id{i:03}")).collect(),
                embeddings,
            };
            let q = normalized((0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
            let k = rng.gen_range(1..=n);
            let got = rank_embedding(&index, &q, k);
            let mut oracle: Vec<(f64, String)> = index
                .entries()
                .map(|(id, e)| {
                    let dot: f64 = e.iter().zip(&q).map(|(a, b)| a * b).sum();
                    (dot, id.to_string())
                })
                .collect();
            oracle.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then_with(|| a.1.cmp(&b.1)));
            assert_eq!(got.len(), k);
            for (res, (score, id)) in got.iter().zip(&oracle) {
                assert_eq!(&res.specialist_id, id);
                assert_eq!(res.score, *score);
            }
        }
    }
}
