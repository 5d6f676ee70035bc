//! Text treatment: language identification, normalization, stopword removal
//! and stemming.
//!
//! The whole module is pure functions over immutable tables, so every
//! operation is safe to call from any number of threads.

mod stem_rules;
mod stopwords;

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

/// Detected text language. `Unknown` falls back to Portuguese tables
/// downstream, as the corpus is predominantly Brazilian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Language {
    Pt,
    En,
    Es,
    Unknown,
}

impl Language {
    pub const DETECTABLE: [Language; 3] = [Language::Pt, Language::En, Language::Es];

    pub fn code(self) -> &'static str {
        match self {
            Language::Pt => "pt",
            Language::En => "en",
            Language::Es => "es",
            Language::Unknown => "unknown",
        }
    }
}

/// A language must score at least this stopword fraction to be detected.
pub const LANGUAGE_SCORE_THRESHOLD: f64 = 0.15;

#[derive(Debug, Error)]
pub enum TextprocError {
    #[error("cannot load a table for the unknown language")]
    UnknownLanguage,
    #[error("line {line}: stopword \"{entry}\" is not normalized (lowercase, no diacritics, single token)")]
    NotNormalized { line: usize, entry: String },
    #[error("line {line}: bad stem rule: {reason}")]
    BadRule { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Per-language sets of normalized stopwords.
#[derive(Debug, Clone)]
pub struct StopwordTable {
    pt: HashSet<String>,
    en: HashSet<String>,
    es: HashSet<String>,
}

impl Default for StopwordTable {
    fn default() -> Self {
        fn build(words: &[&str]) -> HashSet<String> {
            words.iter().map(|w| w.to_string()).collect()
        }
        StopwordTable {
            pt: build(stopwords::PT),
            en: build(stopwords::EN),
            es: build(stopwords::ES),
        }
    }
}

impl StopwordTable {
    /// The set for `lang`; `Unknown` resolves to the Portuguese set.
    pub fn set(&self, lang: Language) -> &HashSet<String> {
        match lang {
            Language::Pt | Language::Unknown => &self.pt,
            Language::En => &self.en,
            Language::Es => &self.es,
        }
    }

    pub fn is_stopword(&self, lang: Language, token: &str) -> bool {
        self.set(lang).contains(token)
    }

    /// Replaces one language's set from a plain-text file, one entry per
    /// line. Entries must already be normalized.
    pub fn replace_from_file(
        &mut self,
        lang: Language,
        path: impl AsRef<Path>,
    ) -> Result<(), TextprocError> {
        let slot = match lang {
            Language::Pt => &mut self.pt,
            Language::En => &mut self.en,
            Language::Es => &mut self.es,
            Language::Unknown => return Err(TextprocError::UnknownLanguage),
        };
        let text = fs::read_to_string(path)?;
        let mut set = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let entry = raw.trim();
            if entry.is_empty() || entry.starts_with('#') {
                continue;
            }
            if entry != fold(entry) || entry.chars().any(char::is_whitespace) {
                return Err(TextprocError::NotNormalized {
                    line: idx + 1,
                    entry: entry.to_string(),
                });
            }
            set.insert(entry.to_string());
        }
        *slot = set;
        Ok(())
    }
}

/// One ordered suffix-replacement rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StemRule {
    pub suffix: String,
    pub min_stem_chars: usize,
    pub replacement: String,
}

impl StemRule {
    fn validated(
        suffix: &str,
        min_stem_chars: usize,
        replacement: &str,
        line: usize,
    ) -> Result<StemRule, TextprocError> {
        if suffix.is_empty() {
            return Err(TextprocError::BadRule {
                line,
                reason: "empty suffix".into(),
            });
        }
        if replacement.chars().count() > suffix.chars().count() {
            return Err(TextprocError::BadRule {
                line,
                reason: format!("replacement \"{replacement}\" longer than suffix \"{suffix}\""),
            });
        }
        if replacement.is_empty() && min_stem_chars == 0 {
            return Err(TextprocError::BadRule {
                line,
                reason: "stripping rule needs a minimum stem length of at least 1".into(),
            });
        }
        Ok(StemRule {
            suffix: suffix.to_string(),
            min_stem_chars,
            replacement: replacement.to_string(),
        })
    }
}

/// Per-language ordered stemming rules.
#[derive(Debug, Clone)]
pub struct StemRuleSet {
    pt: Vec<StemRule>,
    en: Vec<StemRule>,
    es: Vec<StemRule>,
}

impl Default for StemRuleSet {
    fn default() -> Self {
        fn build(rules: &[(&str, usize, &str)]) -> Vec<StemRule> {
            rules
                .iter()
                .map(|(suffix, min, replacement)| {
                    StemRule::validated(suffix, *min, replacement, 0)
                        .expect("built-in rule tables are valid")
                })
                .collect()
        }
        StemRuleSet {
            pt: build(stem_rules::PT_RULES),
            en: build(stem_rules::EN_RULES),
            es: build(stem_rules::ES_RULES),
        }
    }
}

impl StemRuleSet {
    /// Rules for `lang`; `Unknown` resolves to the Portuguese table.
    pub fn rules(&self, lang: Language) -> &[StemRule] {
        match lang {
            Language::Pt | Language::Unknown => &self.pt,
            Language::En => &self.en,
            Language::Es => &self.es,
        }
    }

    /// Replaces one language's rules from a TSV file with lines
    /// `suffix<TAB>min_stem_len<TAB>replacement` (replacement may be empty).
    pub fn replace_from_file(
        &mut self,
        lang: Language,
        path: impl AsRef<Path>,
    ) -> Result<(), TextprocError> {
        let slot = match lang {
            Language::Pt => &mut self.pt,
            Language::En => &mut self.en,
            Language::Es => &mut self.es,
            Language::Unknown => return Err(TextprocError::UnknownLanguage),
        };
        let text = fs::read_to_string(path)?;
        let mut rules = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').collect();
            if fields.len() < 2 || fields.len() > 3 {
                return Err(TextprocError::BadRule {
                    line: line_no,
                    reason: format!("expected 2 or 3 tab-separated fields, got {}", fields.len()),
                });
            }
            let min: usize = fields[1].trim().parse().map_err(|_| TextprocError::BadRule {
                line: line_no,
                reason: format!("bad minimum stem length \"{}\"", fields[1]),
            })?;
            let replacement = fields.get(2).copied().unwrap_or("");
            rules.push(StemRule::validated(fields[0], min, replacement, line_no)?);
        }
        *slot = rules;
        Ok(())
    }
}

/// The two immutable tables the pipeline needs, bundled for convenience.
#[derive(Debug, Clone, Default)]
pub struct TextTables {
    pub stopwords: StopwordTable,
    pub rules: StemRuleSet,
}

impl TextTables {
    pub fn process(&self, text: &str) -> BTreeMap<String, u32> {
        process(text, &self.stopwords, &self.rules)
    }
}

fn fold_char(c: char, out: &mut String) {
    match c {
        'à' | 'á' | 'â' | 'ã' | 'ä' | 'å' | 'ā' | 'ă' | 'ą' => out.push('a'),
        'è' | 'é' | 'ê' | 'ë' | 'ē' | 'ė' | 'ę' | 'ě' => out.push('e'),
        'ì' | 'í' | 'î' | 'ï' | 'ī' | 'į' => out.push('i'),
        'ò' | 'ó' | 'ô' | 'õ' | 'ö' | 'ō' | 'ő' | 'ø' => out.push('o'),
        'ù' | 'ú' | 'û' | 'ü' | 'ū' | 'ů' | 'ű' => out.push('u'),
        'ç' | 'ć' | 'č' => out.push('c'),
        'ñ' | 'ń' | 'ň' => out.push('n'),
        'ý' | 'ÿ' => out.push('y'),
        'š' | 'ś' => out.push('s'),
        'ž' | 'ź' | 'ż' => out.push('z'),
        'ł' => out.push('l'),
        'đ' | 'ď' => out.push('d'),
        'ť' => out.push('t'),
        'ř' => out.push('r'),
        'ğ' => out.push('g'),
        'æ' => out.push_str("ae"),
        'œ' => out.push_str("oe"),
        'ß' => out.push_str("ss"),
        _ => out.push(c),
    }
}

/// Lowercases and strips diacritics.
pub fn fold(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        for lc in c.to_lowercase() {
            fold_char(lc, &mut out);
        }
    }
    out
}

/// All folded tokens, including the short ones `normalize` drops. Language
/// identification needs single-letter function words like "o" and "a".
fn raw_tokens(text: &str) -> Vec<String> {
    fold(text)
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Lowercase, fold diacritics, split on non-alphanumeric runs, and drop
/// tokens shorter than two chars or made only of digits.
pub fn normalize(text: &str) -> Vec<String> {
    fold(text)
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2 && !t.chars().all(char::is_numeric))
        .map(str::to_owned)
        .collect()
}

/// Picks the language whose stopwords cover the largest fraction of the
/// text's tokens; `Unknown` when no language reaches the threshold. Ties
/// resolve pt > en > es.
pub fn detect_language(text: &str, table: &StopwordTable) -> Language {
    let tokens = raw_tokens(text);
    if tokens.is_empty() {
        return Language::Unknown;
    }
    let mut best = Language::Unknown;
    let mut best_score = 0.0;
    for lang in Language::DETECTABLE {
        let set = table.set(lang);
        let hits = tokens.iter().filter(|t| set.contains(t.as_str())).count();
        let score = hits as f64 / tokens.len() as f64;
        if score >= LANGUAGE_SCORE_THRESHOLD && score > best_score {
            best = lang;
            best_score = score;
        }
    }
    best
}

/// Order-preserving removal of `table[lang]` members.
pub fn remove_stopwords(
    tokens: Vec<String>,
    lang: Language,
    table: &StopwordTable,
) -> Vec<String> {
    let set = table.set(lang);
    tokens
        .into_iter()
        .filter(|t| !set.contains(t.as_str()))
        .collect()
}

/// Reduces a normalized token to its radical via the language's rule
/// cascade. The radical is never longer than the token and never empty for
/// non-empty input.
pub fn stem(token: &str, lang: Language, rules: &StemRuleSet) -> String {
    let mut current = token.to_string();
    for rule in rules.rules(lang) {
        if let Some(stem_part) = current.strip_suffix(rule.suffix.as_str()) {
            if stem_part.chars().count() >= rule.min_stem_chars
                && !(stem_part.is_empty() && rule.replacement.is_empty())
            {
                let mut next = String::with_capacity(stem_part.len() + rule.replacement.len());
                next.push_str(stem_part);
                next.push_str(&rule.replacement);
                current = next;
            }
        }
    }
    current
}

/// Full treatment of one text: detect language, normalize, drop stopwords,
/// stem, and count radical multiplicities.
///
/// Radicals that land exactly on a stopword of the detected language are
/// dropped as well, so the output never contains a stopword.
pub fn process(
    text: &str,
    table: &StopwordTable,
    rules: &StemRuleSet,
) -> BTreeMap<String, u32> {
    let lang = detect_language(text, table);
    let set = table.set(lang);
    let mut counts = BTreeMap::new();
    for token in remove_stopwords(normalize(text), lang, table) {
        let radical = stem(&token, lang, rules);
        if set.contains(radical.as_str()) {
            continue;
        }
        *counts.entry(radical).or_insert(0) += 1;
    }
    counts
}
