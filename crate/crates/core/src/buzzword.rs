//! Lexicon-based detection of ideological buzzwords and coded language.
//!
//! Text is normalized (NFKC, full case fold, whitespace collapsed) before
//! matching, and every normalized character remembers which original
//! characters produced it, so hits report spans into the text as given.
//! Spans count Unicode scalar values, end-exclusive.
//!
//! Lexicon files are JSON lines, one entry per line:
//!
//! ```text
//! {"lang": "nb", "term": "stem frp", "mode": "phrase", "note": "campaign slogan"}
//! ```
//!
//! `lang` is a language tag or `*`; `mode` is `word`, `phrase` or
//! `regex-lite`; `note` records where the term comes from. Blank lines are
//! ignored.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;
use unicode_segmentation::UnicodeSegmentation;

use crate::model::{BuzzwordHit, CharSpan, TextSource};

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("cannot read lexicon {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("bad lexicon {origin}:\n  {}", problems.join("\n  "))]
    BadLexicon { origin: String, problems: Vec<String> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatchMode {
    #[serde(rename = "word")]
    Word,
    #[serde(rename = "phrase")]
    Phrase,
    #[serde(rename = "regex-lite")]
    RegexLite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexiconEntry {
    pub lang: String,
    pub term: String,
    pub mode: MatchMode,
    #[serde(default)]
    pub note: String,
}

/// Normalized text plus, for each of its chars, the original char range.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub text: String,
    origin: Vec<(usize, usize)>,
}

impl Normalized {
    /// Original span covered by normalized chars `[start, end)`.
    pub fn original_span(&self, start: usize, end: usize) -> CharSpan {
        CharSpan::new(self.origin[start].0, self.origin[end - 1].1)
    }
}

fn fold_cluster(cluster: &str) -> String {
    let nfkc: String = cluster.nfkc().collect();
    caseless::default_case_fold_str(&nfkc).nfkc().collect()
}

/// Normalize with an offset map back into `text`.
pub fn normalize_mapped(text: &str) -> Normalized {
    let mut out = String::with_capacity(text.len());
    let mut origin = Vec::with_capacity(text.len());
    let mut pending_space: Option<(usize, usize)> = None;
    let mut char_pos = 0;
    for cluster in text.graphemes(true) {
        let width = cluster.chars().count();
        let span = (char_pos, char_pos + width);
        char_pos += width;
        let folded = fold_cluster(cluster);
        if folded.chars().all(char::is_whitespace) {
            if !out.is_empty() && pending_space.is_none() {
                pending_space = Some(span);
            }
            continue;
        }
        if let Some(space) = pending_space.take() {
            out.push(' ');
            origin.push(space);
        }
        for c in folded.chars() {
            if c.is_whitespace() {
                // Compatibility forms can expand to spaces inside a cluster.
                if !out.ends_with(' ') {
                    out.push(' ');
                    origin.push(span);
                }
            } else {
                out.push(c);
                origin.push(span);
            }
        }
    }
    if out.ends_with(' ') {
        out.pop();
        origin.pop();
    }
    Normalized { text: out, origin }
}

/// NFKC, case-folded, whitespace-collapsed.
pub fn normalize(text: &str) -> String {
    normalize_mapped(text).text
}

fn tokens(normalized: &str) -> Vec<&str> {
    normalized.unicode_words().collect()
}

/// A word token with char offsets into the normalized text.
struct Token<'a> {
    text: &'a str,
    start: usize,
    end: usize,
}

struct Indexed<'a> {
    norm: &'a Normalized,
    /// Char offsets of word-segmentation boundaries.
    boundaries: BTreeSet<usize>,
    /// Byte offset -> char offset.
    char_at: BTreeMap<usize, usize>,
    words: Vec<Token<'a>>,
}

impl<'a> Indexed<'a> {
    fn new(norm: &'a Normalized) -> Self {
        let text = norm.text.as_str();
        let mut char_at = BTreeMap::new();
        for (n, (byte, _)) in text.char_indices().enumerate() {
            char_at.insert(byte, n);
        }
        let total = text.chars().count();
        char_at.insert(text.len(), total);
        let mut boundaries = BTreeSet::from([0, total]);
        for (byte, _) in text.split_word_bound_indices() {
            boundaries.insert(char_at[&byte]);
        }
        let words = text
            .unicode_word_indices()
            .map(|(byte, w)| {
                let start = char_at[&byte];
                Token { text: w, start, end: char_at[&(byte + w.len())] }
            })
            .collect();
        Self { norm, boundaries, char_at, words }
    }

    fn chars(&self, byte_start: usize, byte_end: usize) -> (usize, usize) {
        (self.char_at[&byte_start], self.char_at[&byte_end])
    }

    fn on_boundaries(&self, start: usize, end: usize) -> bool {
        start < end && self.boundaries.contains(&start) && self.boundaries.contains(&end)
    }
}

#[derive(Debug, Clone)]
enum Matcher {
    Word(String),
    Phrase(Vec<String>),
    Regex(regex::Regex),
}

impl Matcher {
    fn compile(entry: &LexiconEntry) -> Result<Self, String> {
        let norm = normalize(&entry.term);
        match entry.mode {
            MatchMode::Word => Ok(Matcher::Word(norm)),
            MatchMode::Phrase => {
                let toks: Vec<String> = tokens(&norm).into_iter().map(String::from).collect();
                if toks.is_empty() {
                    return Err("phrase has no word tokens".into());
                }
                Ok(Matcher::Phrase(toks))
            }
            MatchMode::RegexLite => regex::Regex::new(&entry.term)
                .map(Matcher::Regex)
                .map_err(|e| format!("bad regex: {e}")),
        }
    }

    /// Matches as normalized char ranges.
    fn find(&self, idx: &Indexed<'_>) -> Vec<(usize, usize)> {
        let text = idx.norm.text.as_str();
        let mut found = Vec::new();
        match self {
            Matcher::Word(term) => {
                for (byte, _) in text.match_indices(term.as_str()) {
                    let (s, e) = idx.chars(byte, byte + term.len());
                    if idx.on_boundaries(s, e) {
                        found.push((s, e));
                    }
                }
                // match_indices skips overlapping occurrences; terms made of
                // whole words cannot overlap at boundaries in practice.
            }
            Matcher::Phrase(toks) => {
                for window in idx.words.windows(toks.len()) {
                    if window.iter().zip(toks).all(|(w, t)| w.text == t) {
                        found.push((window[0].start, window[toks.len() - 1].end));
                    }
                }
            }
            Matcher::Regex(re) => {
                for m in re.find_iter(text) {
                    let (s, e) = idx.chars(m.start(), m.end());
                    if idx.on_boundaries(s, e) {
                        found.push((s, e));
                    }
                }
            }
        }
        found
    }
}

#[derive(Debug, Clone)]
struct Compiled {
    entry: LexiconEntry,
    matcher: Matcher,
}

/// Validated, immutable set of lexicon entries.
#[derive(Debug, Clone, Default)]
pub struct Lexicons {
    entries: Vec<Compiled>,
}

impl Lexicons {
    pub fn from_entries(origin: &str, entries: Vec<(usize, LexiconEntry)>) -> Result<Self, LexiconError> {
        let mut problems = Vec::new();
        let mut seen: HashSet<(String, String)> = HashSet::new();
        let mut compiled = Vec::new();
        for (line, entry) in entries {
            if entry.term.trim().is_empty() {
                problems.push(format!("line {line}: empty term"));
                continue;
            }
            if entry.lang.trim().is_empty() {
                problems.push(format!("line {line}: empty lang"));
                continue;
            }
            if !seen.insert((entry.lang.clone(), normalize(&entry.term))) {
                problems.push(format!(
                    "line {line}: duplicate term {:?} for lang {:?}",
                    entry.term, entry.lang
                ));
                continue;
            }
            match Matcher::compile(&entry) {
                Ok(matcher) => compiled.push(Compiled { entry, matcher }),
                Err(e) => problems.push(format!("line {line}: {e}")),
            }
        }
        if problems.is_empty() {
            Ok(Self { entries: compiled })
        } else {
            Err(LexiconError::BadLexicon { origin: origin.to_string(), problems })
        }
    }

    pub fn parse(origin: &str, text: &str) -> Result<Self, LexiconError> {
        let mut entries = Vec::new();
        let mut problems = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<LexiconEntry>(line) {
                Ok(entry) => entries.push((n + 1, entry)),
                Err(e) => problems.push(format!("line {}: {e}", n + 1)),
            }
        }
        match Self::from_entries(origin, entries) {
            Err(LexiconError::BadLexicon { problems: more, .. }) => {
                problems.extend(more);
                Err(LexiconError::BadLexicon { origin: origin.to_string(), problems })
            }
            _ if !problems.is_empty() => {
                Err(LexiconError::BadLexicon { origin: origin.to_string(), problems })
            }
            ok => ok,
        }
    }

    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| LexiconError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&path.display().to_string(), &text)
    }

    /// Load several files as one set. Duplicates across files are errors too.
    pub fn load_all(paths: &[PathBuf]) -> Result<Self, LexiconError> {
        let mut merged = Lexicons::default();
        let mut seen: HashSet<(String, String)> = HashSet::new();
        for path in paths {
            let lex = Self::load(path)?;
            for c in &lex.entries {
                if !seen.insert((c.entry.lang.clone(), normalize(&c.entry.term))) {
                    return Err(LexiconError::BadLexicon {
                        origin: path.display().to_string(),
                        problems: vec![format!(
                            "term {:?} for lang {:?} already defined in an earlier file",
                            c.entry.term, c.entry.lang
                        )],
                    });
                }
            }
            merged.entries.extend(lex.entries);
        }
        Ok(merged)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.iter().map(|c| &c.entry)
    }

    /// Entry counts per language.
    pub fn languages(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for c in &self.entries {
            *out.entry(c.entry.lang.clone()).or_insert(0) += 1;
        }
        out
    }

    /// Stable fingerprint of the loaded entries, for cache keys.
    pub fn fingerprint(&self) -> String {
        let entries: Vec<&LexiconEntry> = self.entries().collect();
        crate::canonical::digest(&entries).expect("entries serialize")
    }

    /// Every lexicon applies to every text; a term hits at most once per
    /// span and matches of one term never overlap.
    pub fn detect(&self, text: &str, source: TextSource) -> Vec<BuzzwordHit> {
        if text.is_empty() || self.entries.is_empty() {
            return Vec::new();
        }
        let norm = normalize_mapped(text);
        let idx = Indexed::new(&norm);
        let mut seen: HashSet<(String, CharSpan)> = HashSet::new();
        let mut hits = Vec::new();
        for c in &self.entries {
            let mut last_end = 0;
            for (s, e) in c.matcher.find(&idx) {
                if s < last_end {
                    continue;
                }
                let span = norm.original_span(s, e);
                if !seen.insert((c.entry.term.clone(), span)) {
                    continue;
                }
                last_end = e;
                hits.push(BuzzwordHit {
                    term: c.entry.term.clone(),
                    surface: span.slice(text).unwrap_or_default().to_string(),
                    source,
                    span,
                });
            }
        }
        hits.sort_by(|a, b| (a.span.start, &a.term).cmp(&(b.span.start, &b.term)));
        hits
    }
}

/// The sample lexicon shipped with the crate.
pub const SAMPLE_LEXICON: &str = include_str!("../../../lexicons/sample.jsonl");

pub fn sample_lexicons() -> Lexicons {
    Lexicons::parse("sample.jsonl", SAMPLE_LEXICON).expect("bundled lexicon is valid")
}
