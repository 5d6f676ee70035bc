//! Curriculum record parsing, text field collection, and corpus statistics.
//!
//! Records arrive as UTF-8 JSON lines, one specialist per line, with keys
//! `id`, `name`, `area` and `works`. The format is neutral so that any
//! corpus export (or a synthetic one) can be ingested.

use std::collections::HashSet;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One specialist's identity plus their works.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurriculumRecord {
    /// Non-empty identifier, unique within a corpus.
    #[serde(rename = "id")]
    pub specialist_id: String,
    pub name: String,
    /// Coarse research-area label; may be empty. Used only to color
    /// visualization points.
    #[serde(rename = "area", default)]
    pub major_area: String,
    #[serde(default)]
    pub works: Vec<Work>,
}

/// A single published work or registered project.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Work {
    pub kind: WorkKind,
    pub title: String,
    #[serde(default)]
    pub keywords: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
}

/// The four work categories tracked by the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkKind {
    ConferencePaper,
    JournalArticle,
    ResearchProject,
    ExtensionProject,
}

impl WorkKind {
    pub const ALL: [WorkKind; 4] = [
        WorkKind::ConferencePaper,
        WorkKind::JournalArticle,
        WorkKind::ResearchProject,
        WorkKind::ExtensionProject,
    ];

    pub fn label(self) -> &'static str {
        match self {
            WorkKind::ConferencePaper => "conference_paper",
            WorkKind::JournalArticle => "journal_article",
            WorkKind::ResearchProject => "research_project",
            WorkKind::ExtensionProject => "extension_project",
        }
    }
}

/// Work-kind and term-level counts over a parsed corpus.
///
/// The term fields stay zero until vectorization has run; parsing alone
/// cannot know the dictionary.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub records: usize,
    pub conference_papers: usize,
    pub journal_articles: usize,
    pub research_projects: usize,
    pub extension_projects: usize,
    pub distinct_radicals: usize,
    pub term_utilizations: u64,
}

impl CorpusStats {
    pub fn count_for(&self, kind: WorkKind) -> usize {
        match kind {
            WorkKind::ConferencePaper => self.conference_papers,
            WorkKind::JournalArticle => self.journal_articles,
            WorkKind::ResearchProject => self.research_projects,
            WorkKind::ExtensionProject => self.extension_projects,
        }
    }

    pub fn works_total(&self) -> usize {
        self.conference_papers
            + self.journal_articles
            + self.research_projects
            + self.extension_projects
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: malformed record: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: duplicate specialist id \"{id}\"")]
    DuplicateId { id: String, line: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

const YEAR_MIN: i32 = 1900;
const YEAR_MAX: i32 = 2100;

/// Parses a line-delimited record stream, preserving input order.
///
/// Blank lines are skipped. Empty input yields an empty collection.
pub fn parse_records(reader: impl BufRead) -> Result<Vec<CurriculumRecord>, CorpusError> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: CurriculumRecord =
            serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
                line: line_no,
                reason: e.to_string(),
            })?;
        validate_record(&record, line_no)?;
        if !seen.insert(record.specialist_id.clone()) {
            return Err(CorpusError::DuplicateId {
                id: record.specialist_id,
                line: line_no,
            });
        }
        records.push(record);
    }
    Ok(records)
}

fn validate_record(record: &CurriculumRecord, line: usize) -> Result<(), CorpusError> {
    if record.specialist_id.is_empty() {
        return Err(CorpusError::Malformed {
            line,
            reason: "empty specialist id".into(),
        });
    }
    for work in &record.works {
        if let Some(year) = work.year {
            if !(YEAR_MIN..=YEAR_MAX).contains(&year) {
                return Err(CorpusError::Malformed {
                    line,
                    reason: format!("year {year} outside [{YEAR_MIN}, {YEAR_MAX}]"),
                });
            }
        }
    }
    Ok(())
}

/// Writes records back out as one JSON object per line.
pub fn serialize_records(
    records: &[CurriculumRecord],
    mut writer: impl Write,
) -> io::Result<()> {
    for record in records {
        let json = serde_json::to_string(record).expect("record serialization cannot fail");
        writeln!(writer, "{json}")?;
    }
    Ok(())
}

/// Gathers every text the pipeline mines from one record: one entry per work
/// title and one per keyword, each tagged with the owning work's kind.
///
/// Nothing is dropped or deduplicated here; empty titles survive and simply
/// contribute no tokens downstream.
pub fn collect_texts(record: &CurriculumRecord) -> Vec<(&str, WorkKind)> {
    let mut texts = Vec::new();
    for work in &record.works {
        texts.push((work.title.as_str(), work.kind));
        for keyword in &work.keywords {
            texts.push((keyword.as_str(), work.kind));
        }
    }
    texts
}

/// Counts records and works per kind. Term-level fields stay zero here.
pub fn corpus_stats(records: &[CurriculumRecord]) -> CorpusStats {
    let mut stats = CorpusStats {
        records: records.len(),
        ..CorpusStats::default()
    };
    for record in records {
        for work in &record.works {
            match work.kind {
                WorkKind::ConferencePaper => stats.conference_papers += 1,
                WorkKind::JournalArticle => stats.journal_articles += 1,
                WorkKind::ResearchProject => stats.research_projects += 1,
                WorkKind::ExtensionProject => stats.extension_projects += 1,
            }
        }
    }
    stats
}
