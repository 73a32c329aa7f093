//! Corpus model and resource loading.
//!
//! A corpus file holds one sentence record per line (JSON), grouped into
//! talks by consecutive `talk_id`. Each record aligns a tokenized source
//! sentence with a reference translation and zero or more interpreter
//! renditions keyed by experience rank. Loaders for the bilingual
//! dictionary, word frequency table, and pronunciation lexicon live here
//! too; all of them report the offending file and line on bad input.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::annotate::TermSpan;
use crate::error::{Error, Result};

/// Interpreter experience tier: one year (B), four years (A), fifteen (S).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rank {
    B,
    A,
    S,
}

impl Rank {
    pub const ALL: [Rank; 3] = [Rank::B, Rank::A, Rank::S];

    pub fn as_str(self) -> &'static str {
        match self {
            Rank::B => "B",
            Rank::A => "A",
            Rank::S => "S",
        }
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Rank {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "B" => Ok(Rank::B),
            "A" => Ok(Rank::A),
            "S" => Ok(Rank::S),
            other => Err(format!("unknown rank {other:?} (expected B, A, or S)")),
        }
    }
}

/// Which target text a judgment is made against: the offline translator's
/// reference, or one interpreter's rendition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Translator,
    Interpreter(Rank),
}

impl Side {
    pub const ALL: [Side; 4] = [
        Side::Translator,
        Side::Interpreter(Rank::B),
        Side::Interpreter(Rank::A),
        Side::Interpreter(Rank::S),
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Translator => "T",
            Side::Interpreter(r) => r.as_str(),
        }
    }

    pub fn rank(self) -> Option<Rank> {
        match self {
            Side::Translator => None,
            Side::Interpreter(r) => Some(r),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "T" => Ok(Side::Translator),
            other => other
                .parse::<Rank>()
                .map(Side::Interpreter)
                .map_err(|_| format!("unknown side {other:?} (expected T, B, A, or S)")),
        }
    }
}

macro_rules! string_serde {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(self.as_str())
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let raw = String::deserialize(d)?;
                raw.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(Rank);
string_serde!(Side);

/// One source-language token with its speech-synchronized timestamps.
#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub surface: String,
    pub pos: String,
    /// Seconds from talk start when the word begins.
    pub start_time: f64,
    /// Seconds from talk start when the word ends.
    pub end_time: f64,
    /// Running position within the whole talk.
    pub talk_word_index: usize,
    /// Position within the sentence.
    pub sent_word_index: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SourceSentence {
    pub sentence_index: usize,
    pub tokens: Vec<Token>,
}

/// A source sentence aligned with its reference translation and the
/// interpreter renditions available for it. `annotations` holds term spans
/// produced by the annotation pipeline (absent in a raw corpus).
#[derive(Clone, Debug, PartialEq)]
pub struct AlignedTriple {
    pub source: SourceSentence,
    pub reference: Vec<String>,
    pub interpretations: BTreeMap<Rank, Vec<String>>,
    pub annotations: Vec<TermSpan>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Talk {
    pub talk_id: String,
    pub triples: Vec<AlignedTriple>,
    /// Talk-specific dictionary (named entities, topic vocabulary).
    pub glossary: Option<BilingualDictionary>,
}

/// Source lemma (lowercased) to target translations.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BilingualDictionary {
    entries: BTreeMap<String, BTreeSet<String>>,
}

impl BilingualDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, source: &str, target: &str) {
        self.entries
            .entry(source.to_lowercase())
            .or_default()
            .insert(target.to_string());
    }

    /// Lookup is case-insensitive on the source side.
    pub fn lookup(&self, source: &str) -> Option<&BTreeSet<String>> {
        self.entries.get(&source.to_lowercase())
    }

    pub fn merge(&mut self, other: &BilingualDictionary) {
        for (k, vs) in &other.entries {
            self.entries.entry(k.clone()).or_default().extend(vs.iter().cloned());
        }
    }

    /// Number of (source, target) pairs.
    pub fn pair_count(&self) -> usize {
        self.entries.values().map(BTreeSet::len).sum()
    }

    pub fn source_count(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Word counts over a large monolingual corpus, used for rarity features.
/// Lookups match the raw surface exactly as tokenized; a miss is an
/// out-of-vocabulary signal, not an error.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FrequencyTable {
    counts: HashMap<String, u64>,
    total: u64,
}

impl FrequencyTable {
    pub fn from_counts(counts: impl IntoIterator<Item = (String, u64)>) -> Self {
        let mut table = FrequencyTable::default();
        for (word, count) in counts {
            *table.counts.entry(word).or_insert(0) += count;
            table.total += count;
        }
        table
    }

    pub fn lookup(&self, word: &str) -> Option<u64> {
        self.counts.get(word).copied()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn min_count(&self) -> Option<u64> {
        self.counts.values().min().copied()
    }

    pub fn max_count(&self) -> Option<u64> {
        self.counts.values().max().copied()
    }
}

/// Uppercased word to phoneme sequence; phonemes carry a trailing stress
/// digit when they are syllable nuclei.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PronunciationDictionary {
    entries: HashMap<String, Vec<String>>,
}

impl PronunciationDictionary {
    pub fn insert(&mut self, word: &str, phones: Vec<String>) {
        self.entries.entry(word.to_uppercase()).or_insert(phones);
    }

    pub fn lookup(&self, word: &str) -> Option<&[String]> {
        self.entries.get(&word.to_uppercase()).map(Vec::as_slice)
    }

    /// Number of syllable nuclei (stress-marked phonemes), if the word is known.
    pub fn syllables(&self, word: &str) -> Option<usize> {
        self.lookup(word).map(|phones| {
            phones
                .iter()
                .filter(|p| p.ends_with(|c: char| c.is_ascii_digit()))
                .count()
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// The non-corpus resources the feature extractor and annotator consume.
#[derive(Clone, Debug, Default)]
pub struct Resources {
    pub dictionary: BilingualDictionary,
    pub frequency: FrequencyTable,
    pub pronunciations: PronunciationDictionary,
}

#[derive(Serialize, Deserialize)]
struct TokenRecord {
    surface: String,
    pos: String,
    start: f64,
    end: f64,
}

#[derive(Serialize, Deserialize)]
struct SentenceRecord {
    talk_id: String,
    sentence_index: usize,
    tokens: Vec<TokenRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reference: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    interpretations: BTreeMap<Rank, Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    annotations: Vec<TermSpan>,
}

fn read_lines(path: &Path) -> Result<(String, Vec<String>)> {
    let label = path.display().to_string();
    let mut raw = String::new();
    File::open(path)?.read_to_string(&mut raw)?;
    let lines = raw
        .lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l).to_string())
        .collect();
    Ok((label, lines))
}

/// Load a line-delimited corpus file into talks, grouping consecutive
/// records by `talk_id` and assigning word indices.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<Talk>> {
    let file = File::open(path.as_ref())?;
    load_corpus_reader(BufReader::new(file), &path.as_ref().display().to_string())
}

pub fn load_corpus_reader<R: BufRead>(reader: R, label: &str) -> Result<Vec<Talk>> {
    let mut talks: Vec<Talk> = Vec::new();
    let mut seen_ids: BTreeSet<String> = BTreeSet::new();
    let mut word_counter = 0usize;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        let record: SentenceRecord = serde_json::from_str(line)
            .map_err(|e| Error::parse(label, lineno, e.to_string()))?;

        let reference = record
            .reference
            .ok_or_else(|| Error::alignment(label, lineno, "record lacks a reference translation"))?;

        let new_talk = !matches!(talks.last(), Some(talk) if talk.talk_id == record.talk_id);
        if new_talk {
            if !seen_ids.insert(record.talk_id.clone()) {
                return Err(Error::parse(
                    label,
                    lineno,
                    format!("talk {:?} reappears after other talks; records of a talk must be consecutive", record.talk_id),
                ));
            }
            talks.push(Talk { talk_id: record.talk_id.clone(), triples: Vec::new(), glossary: None });
            word_counter = 0;
        }
        let talk = talks.last_mut().expect("talk pushed above");
        if let Some(prev) = talk.triples.last() {
            if record.sentence_index <= prev.source.sentence_index {
                return Err(Error::parse(
                    label,
                    lineno,
                    format!(
                        "sentence_index {} does not increase over previous {}",
                        record.sentence_index, prev.source.sentence_index
                    ),
                ));
            }
        }

        let mut tokens = Vec::with_capacity(record.tokens.len());
        let mut prev_start = f64::NEG_INFINITY;
        for (pos_in_sent, t) in record.tokens.into_iter().enumerate() {
            if !t.start.is_finite() || !t.end.is_finite() {
                return Err(Error::timing(label, lineno, format!("non-finite timestamp on {:?}", t.surface)));
            }
            if t.end < t.start {
                return Err(Error::timing(
                    label,
                    lineno,
                    format!("token {:?} ends at {} before it starts at {}", t.surface, t.end, t.start),
                ));
            }
            if t.start < prev_start {
                return Err(Error::timing(
                    label,
                    lineno,
                    format!("token {:?} starts at {} before its predecessor at {}", t.surface, t.start, prev_start),
                ));
            }
            prev_start = t.start;
            tokens.push(Token {
                surface: t.surface,
                pos: t.pos,
                start_time: t.start,
                end_time: t.end,
                talk_word_index: word_counter,
                sent_word_index: pos_in_sent,
            });
            word_counter += 1;
        }

        let n_tokens = tokens.len();
        for span in &record.annotations {
            if span.start >= span.end || span.end > n_tokens {
                return Err(Error::parse(
                    label,
                    lineno,
                    format!("annotation span {}..{} out of range for {} tokens", span.start, span.end, n_tokens),
                ));
            }
        }

        talk.triples.push(AlignedTriple {
            source: SourceSentence { sentence_index: record.sentence_index, tokens },
            reference,
            interpretations: record.interpretations,
            annotations: record.annotations,
        });
    }
    Ok(talks)
}

/// Serialize talks back to the line-delimited corpus format. Word indices
/// are reassigned on load; glossaries are stored separately and not written.
pub fn write_corpus<W: Write>(talks: &[Talk], mut out: W) -> Result<()> {
    for talk in talks {
        for triple in &talk.triples {
            let record = SentenceRecord {
                talk_id: talk.talk_id.clone(),
                sentence_index: triple.source.sentence_index,
                tokens: triple
                    .source
                    .tokens
                    .iter()
                    .map(|t| TokenRecord {
                        surface: t.surface.clone(),
                        pos: t.pos.clone(),
                        start: t.start_time,
                        end: t.end_time,
                    })
                    .collect(),
                reference: Some(triple.reference.clone()),
                interpretations: triple.interpretations.clone(),
                annotations: triple.annotations.clone(),
            };
            let line = serde_json::to_string(&record).map_err(|e| Error::domain(e.to_string()))?;
            out.write_all(line.as_bytes())?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Load one or more `source<TAB>target` files into a single dictionary.
pub fn load_bilingual_dictionary<P: AsRef<Path>>(paths: &[P]) -> Result<BilingualDictionary> {
    let mut dict = BilingualDictionary::new();
    for path in paths {
        let (label, lines) = read_lines(path.as_ref())?;
        parse_dictionary_into(&mut dict, &label, &lines)?;
    }
    Ok(dict)
}

fn parse_dictionary_into(dict: &mut BilingualDictionary, label: &str, lines: &[String]) -> Result<()> {
    for (idx, line) in lines.iter().enumerate() {
        let lineno = idx + 1;
        let (source, target) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(label, lineno, "expected source<TAB>target"))?;
        if source.is_empty() || target.is_empty() {
            return Err(Error::parse(label, lineno, "empty source or target"));
        }
        dict.insert(source, target);
    }
    Ok(())
}

/// Load a `word<TAB>count` table; duplicate words accumulate.
pub fn load_frequency_table(path: impl AsRef<Path>) -> Result<FrequencyTable> {
    let (label, lines) = read_lines(path.as_ref())?;
    parse_frequency(&label, &lines)
}

fn parse_frequency(label: &str, lines: &[String]) -> Result<FrequencyTable> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    let mut total = 0u64;
    for (idx, line) in lines.iter().enumerate() {
        let lineno = idx + 1;
        let (word, count) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(label, lineno, "expected word<TAB>count"))?;
        let count: u64 = count
            .trim()
            .parse()
            .map_err(|e| Error::parse(label, lineno, format!("bad count {count:?}: {e}")))?;
        if count == 0 {
            return Err(Error::parse(label, lineno, "count must be positive"));
        }
        *counts.entry(word.to_string()).or_insert(0) += count;
        total += count;
    }
    Ok(FrequencyTable { counts, total })
}

/// Load a pronunciation lexicon in the plain-text convention used by the
/// CMU dictionary: `WORD  PH1 PH2 ...`, `;;;` comments, and alternate
/// pronunciations suffixed `WORD(2)` (the first listed wins).
pub fn load_pronunciation_dict(path: impl AsRef<Path>) -> Result<PronunciationDictionary> {
    let (label, lines) = read_lines(path.as_ref())?;
    parse_cmu(&label, &lines)
}

fn parse_cmu(label: &str, lines: &[String]) -> Result<PronunciationDictionary> {
    let mut dict = PronunciationDictionary::default();
    for (idx, line) in lines.iter().enumerate() {
        let lineno = idx + 1;
        if line.starts_with(";;;") || line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let word = fields.next().ok_or_else(|| Error::parse(label, lineno, "missing word"))?;
        let phones: Vec<String> = fields.map(str::to_string).collect();
        if phones.is_empty() {
            return Err(Error::parse(label, lineno, format!("no phonemes for {word:?}")));
        }
        let base = match word.find('(') {
            Some(i) if word.ends_with(')') => &word[..i],
            _ => word,
        };
        if base.is_empty() {
            return Err(Error::parse(label, lineno, "empty word"));
        }
        dict.insert(base, phones);
    }
    Ok(dict)
}

/// Attach per-talk glossaries from a directory of `<talk_id>.tsv` files in
/// the bilingual dictionary format. Talks without a file keep none.
pub fn load_talk_glossaries(dir: impl AsRef<Path>, talks: &mut [Talk]) -> Result<usize> {
    let mut attached = 0;
    for talk in talks.iter_mut() {
        let path = dir.as_ref().join(format!("{}.tsv", talk.talk_id));
        if path.is_file() {
            talk.glossary = Some(load_bilingual_dictionary(&[&path])?);
            attached += 1;
        }
    }
    Ok(attached)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::{Coverage, TermSpan};
    use std::io::Cursor;

    fn record(talk: &str, idx: usize, surfaces: &[(&str, &str)]) -> String {
        let tokens: Vec<String> = surfaces
            .iter()
            .enumerate()
            .map(|(i, (s, p))| {
                format!(
                    r#"{{"surface":"{s}","pos":"{p}","start":{},"end":{}}}"#,
                    i as f64 * 0.5,
                    i as f64 * 0.5 + 0.4
                )
            })
            .collect();
        format!(
            r#"{{"talk_id":"{talk}","sentence_index":{idx},"tokens":[{}],"reference":["x"],"interpretations":{{"B":["y"]}}}}"#,
            tokens.join(",")
        )
    }

    #[test]
    fn indices_run_across_sentences_and_restart_per_sentence() {
        let lines = [
            record("t1", 0, &[("We", "PRP"), ("saw", "VBD"), ("oceans", "NNS")]),
            record("t1", 1, &[("It", "PRP"), ("rained", "VBD")]),
        ]
        .join("\n");
        let talks = load_corpus_reader(Cursor::new(lines), "mem").unwrap();
        assert_eq!(talks.len(), 1);
        let all: Vec<&Token> = talks[0].triples.iter().flat_map(|t| &t.source.tokens).collect();
        let talk_idx: Vec<usize> = all.iter().map(|t| t.talk_word_index).collect();
        assert_eq!(talk_idx, vec![0, 1, 2, 3, 4]);
        let sent_idx: Vec<usize> = all.iter().map(|t| t.sent_word_index).collect();
        assert_eq!(sent_idx, vec![0, 1, 2, 0, 1]);
    }

    #[test]
    fn missing_reference_is_an_alignment_error() {
        let line = r#"{"talk_id":"t1","sentence_index":0,"tokens":[{"surface":"Hi","pos":"UH","start":0.0,"end":0.2}]}"#;
        let err = load_corpus_reader(Cursor::new(line), "mem").unwrap_err();
        assert!(matches!(err, Error::Alignment { line: 1, .. }), "{err}");
    }

    #[test]
    fn empty_interpretations_map_is_accepted() {
        let line = r#"{"talk_id":"t1","sentence_index":0,"tokens":[{"surface":"Hi","pos":"UH","start":0.0,"end":0.2}],"reference":["こんにちは"]}"#;
        let talks = load_corpus_reader(Cursor::new(line), "mem").unwrap();
        assert!(talks[0].triples[0].interpretations.is_empty());
    }

    #[test]
    fn reversed_token_timing_is_a_timing_error() {
        let line = r#"{"talk_id":"t1","sentence_index":0,"tokens":[{"surface":"Hi","pos":"UH","start":1.0,"end":0.2}],"reference":[]}"#;
        let err = load_corpus_reader(Cursor::new(line), "mem").unwrap_err();
        assert!(matches!(err, Error::Timing { line: 1, .. }), "{err}");
    }

    #[test]
    fn decreasing_start_times_are_a_timing_error() {
        let line = r#"{"talk_id":"t1","sentence_index":0,"tokens":[{"surface":"a","pos":"DT","start":2.0,"end":2.1},{"surface":"b","pos":"NN","start":1.0,"end":2.5}],"reference":[]}"#;
        let err = load_corpus_reader(Cursor::new(line), "mem").unwrap_err();
        assert!(matches!(err, Error::Timing { line: 1, .. }), "{err}");
    }

    #[test]
    fn unknown_rank_key_is_a_parse_error() {
        let line = r#"{"talk_id":"t1","sentence_index":0,"tokens":[],"reference":[],"interpretations":{"Z":[]}}"#;
        let err = load_corpus_reader(Cursor::new(line), "mem").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn non_increasing_sentence_index_is_rejected() {
        let lines = [record("t1", 1, &[("Hi", "UH")]), record("t1", 1, &[("Ho", "UH")])].join("\n");
        let err = load_corpus_reader(Cursor::new(lines), "mem").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn split_talks_are_rejected() {
        let lines = [
            record("t1", 0, &[("Hi", "UH")]),
            record("t2", 0, &[("Ho", "UH")]),
            record("t1", 1, &[("Hm", "UH")]),
        ]
        .join("\n");
        let err = load_corpus_reader(Cursor::new(lines), "mem").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn out_of_range_annotation_is_rejected() {
        let line = r#"{"talk_id":"t1","sentence_index":0,"tokens":[{"surface":"Hi","pos":"UH","start":0.0,"end":0.2}],"reference":[],"annotations":[{"side":"B","start":0,"end":2,"coverage":"untranslated","relevant":true,"needs_review":false}]}"#;
        let err = load_corpus_reader(Cursor::new(line), "mem").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn corpus_round_trips() {
        let mut talks = load_corpus_reader(
            Cursor::new([record("t1", 0, &[("We", "PRP"), ("ran", "VBD")]), record("t2", 3, &[("Go", "VB")])].join("\n")),
            "mem",
        )
        .unwrap();
        talks[0].triples[0].annotations.push(TermSpan {
            side: Side::Interpreter(Rank::B),
            start: 1,
            end: 2,
            coverage: Coverage::Untranslated,
            matched_translation: Some("走った".to_string()),
            relevant: true,
            needs_review: false,
        });
        let mut buf = Vec::new();
        write_corpus(&talks, &mut buf).unwrap();
        let reloaded = load_corpus_reader(Cursor::new(buf), "mem").unwrap();
        assert_eq!(talks, reloaded);
    }

    #[test]
    fn dictionary_lookup_is_case_insensitive_and_unions_files() {
        let mut dict = BilingualDictionary::new();
        dict.insert("Percent", "パーセント");
        dict.insert("percent", "百分率");
        let targets = dict.lookup("PERCENT").unwrap();
        assert!(targets.contains("パーセント") && targets.contains("百分率"));
        assert_eq!(dict.pair_count(), 2);
        assert_eq!(dict.source_count(), 1);
    }

    #[test]
    fn frequency_duplicates_accumulate_and_oov_is_none() {
        let table = FrequencyTable::from_counts(vec![
            ("ocean".to_string(), 10),
            ("ocean".to_string(), 5),
            ("the".to_string(), 100),
        ]);
        assert_eq!(table.lookup("ocean"), Some(15));
        assert_eq!(table.lookup("snowpack"), None);
        assert_eq!(table.total(), 115);
        assert_eq!(table.min_count(), Some(15));
        assert_eq!(table.max_count(), Some(100));
    }

    #[test]
    fn pronunciation_counts_stress_digits_and_collapses_variants() {
        let lines: Vec<String> = [
            ";;; fixture lexicon",
            "PERCENT  P ER0 S EH1 N T",
            "A  AH0",
            "A(2)  EY1",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let dict = parse_cmu("mem", &lines).unwrap();
        assert_eq!(dict.syllables("percent"), Some(2));
        assert_eq!(dict.syllables("a"), Some(1), "first variant wins");
        assert_eq!(dict.syllables("snowpack"), None);
        assert_eq!(dict.len(), 2);
    }

    #[test]
    fn dictionary_and_frequency_parsers_report_line_numbers() {
        let mut dict = BilingualDictionary::new();
        let err = parse_dictionary_into(
            &mut dict,
            "mem",
            &["ocean\t海".to_string(), "no tab here".to_string()],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");

        let err = parse_frequency("mem", &["the\t100".to_string(), "of\tmany".to_string()]).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }
}
