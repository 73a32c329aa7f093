//! Term annotation: finding candidate terms in a source sentence and
//! deciding, per target text, whether each was translated.
//!
//! A candidate term is a maximal run of adjacent tokens whose part of
//! speech marks nouns or numerals, minus a fixed stopword list. Runs are
//! decomposed into terms by matching dictionary translations against the
//! reference translation, longest sub-span first, leftmost first, each
//! token consumed at most once. A term is *relevant* when the reference
//! contains a translation for it (or a human judged the translator side as
//! covered); a relevant term an interpreter did not render literally or
//! non-literally is an untranslated term, the positive class downstream.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::corpus::{AlignedTriple, BilingualDictionary, Rank, Side, SourceSentence, Talk, Token};
use crate::error::{Error, Result};

/// Parts of speech eligible for candidate terms: numerals and nouns.
pub const CANDIDATE_POS: [&str; 5] = ["CD", "NN", "NNS", "NNP", "NNPS"];

pub fn is_candidate_pos(pos: &str) -> bool {
    CANDIDATE_POS.contains(&pos)
}

fn stopwords() -> &'static Vec<&'static str> {
    static LIST: OnceLock<Vec<&'static str>> = OnceLock::new();
    LIST.get_or_init(|| {
        include_str!("stopwords.txt")
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect()
    })
}

pub fn is_stopword(surface: &str) -> bool {
    let lower = surface.to_lowercase();
    stopwords().iter().any(|w| *w == lower)
}

/// A token may head or extend a candidate term.
pub fn is_candidate_token(token: &Token) -> bool {
    is_candidate_pos(&token.pos) && !is_stopword(&token.surface)
}

/// Maximal runs of adjacent candidate tokens, as `(start, end)` index pairs.
pub fn candidate_spans(sentence: &SourceSentence) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut run_start = None;
    for (i, token) in sentence.tokens.iter().enumerate() {
        if is_candidate_token(token) {
            run_start.get_or_insert(i);
        } else if let Some(start) = run_start.take() {
            spans.push((start, i));
        }
    }
    if let Some(start) = run_start {
        spans.push((start, sentence.tokens.len()));
    }
    spans
}

/// Reduce an English word to a dictionary headword form: lowercase, then
/// strip a plural suffix (`ies` -> `y`; `es` after a sibilant; else `s`).
pub fn lemmatize(word: &str) -> String {
    let w = word.to_lowercase();
    let n = w.len();
    if n > 4 && w.ends_with("ies") {
        return format!("{}y", &w[..n - 3]);
    }
    if w.ends_with("es") {
        let stem = &w[..n - 2];
        if stem.ends_with('s') || stem.ends_with('x') || stem.ends_with('z') || stem.ends_with("ch") || stem.ends_with("sh")
        {
            return stem.to_string();
        }
    }
    if n > 2 && w.ends_with('s') && !w.ends_with("ss") {
        return w[..n - 1].to_string();
    }
    w
}

/// True for digit strings with optional `.`/`,` groups: `40`, `3.14`, `25,000`.
pub fn is_numeral(s: &str) -> bool {
    if s.is_empty() {
        return false;
    }
    let mut prev_digit = false;
    for b in s.bytes() {
        match b {
            b'0'..=b'9' => prev_digit = true,
            b'.' | b',' => {
                if !prev_digit {
                    return false;
                }
                prev_digit = false;
            }
            _ => return false,
        }
    }
    prev_digit
}

const ONES: [&str; 20] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve",
    "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen",
];
const TENS: [&str; 10] = ["", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"];
const SCALE: [&str; 7] = ["", "thousand", "million", "billion", "trillion", "quadrillion", "quintillion"];

fn push_three_digits(n: u64, out: &mut Vec<&'static str>) {
    if n >= 100 {
        out.push(ONES[(n / 100) as usize]);
        out.push("hundred");
    }
    let rest = n % 100;
    if rest >= 20 {
        out.push(TENS[(rest / 10) as usize]);
        if !rest.is_multiple_of(10) {
            out.push(ONES[(rest % 10) as usize]);
        }
    } else if rest > 0 {
        out.push(ONES[rest as usize]);
    }
}

fn integer_words(digits: &str) -> Result<String> {
    let mut n: u128 = digits
        .parse()
        .map_err(|_| Error::domain(format!("numeral {digits:?} is too large to spell out")))?;
    if n == 0 {
        return Ok("zero".to_string());
    }
    let mut groups = Vec::new();
    while n > 0 {
        groups.push((n % 1000) as u64);
        n /= 1000;
    }
    if groups.len() > SCALE.len() {
        return Err(Error::domain(format!("numeral {digits:?} is too large to spell out")));
    }
    let mut words = Vec::new();
    for (i, g) in groups.iter().enumerate().rev() {
        if *g == 0 {
            continue;
        }
        push_three_digits(*g, &mut words);
        if !SCALE[i].is_empty() {
            words.push(SCALE[i]);
        }
    }
    Ok(words.join(" "))
}

/// Spell out a numeral token as lowercase space-separated words, short
/// scale, no hyphens or "and": `40` -> `forty`, `25000000` -> `twenty five
/// million`, `3.14` -> `three point one four`. Commas group thousands.
pub fn number_to_words(token: &str) -> Result<String> {
    if !is_numeral(token) {
        return Err(Error::domain(format!("{token:?} is not a numeral")));
    }
    let cleaned = token.replace(',', "");
    let mut parts = cleaned.split('.');
    let mut words = integer_words(parts.next().expect("split yields at least one part"))?;
    for frac in parts {
        words.push_str(" point");
        for d in frac.bytes() {
            words.push(' ');
            words.push_str(ONES[(d - b'0') as usize]);
        }
    }
    Ok(words)
}

/// How a target text covers a source term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coverage {
    Literal,
    Nonliteral,
    Untranslated,
}

impl Coverage {
    pub fn as_str(self) -> &'static str {
        match self {
            Coverage::Literal => "literal",
            Coverage::Nonliteral => "nonliteral",
            Coverage::Untranslated => "untranslated",
        }
    }
}

impl fmt::Display for Coverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A human judgment of one term against one target text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Translated,
    Nonliteral,
    Untranslated,
}

impl FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "translated" => Ok(Verdict::Translated),
            "nonliteral" => Ok(Verdict::Nonliteral),
            "untranslated" => Ok(Verdict::Untranslated),
            other => Err(format!("unknown verdict {other:?}")),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Translated => "translated",
            Verdict::Nonliteral => "nonliteral",
            Verdict::Untranslated => "untranslated",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HumanAnnotation {
    pub talk_id: String,
    pub sentence_index: usize,
    pub side: Side,
    pub start: usize,
    pub end: usize,
    pub verdict: Verdict,
}

/// Load `talk_id<TAB>sentence_index<TAB>side<TAB>start<TAB>end<TAB>verdict` records.
pub fn load_human_annotations(path: impl AsRef<Path>) -> Result<Vec<HumanAnnotation>> {
    let label = path.as_ref().display().to_string();
    let mut raw = String::new();
    File::open(path.as_ref())?.read_to_string(&mut raw)?;
    parse_human_annotations(&label, &raw)
}

fn parse_human_annotations(label: &str, raw: &str) -> Result<Vec<HumanAnnotation>> {
    let mut out = Vec::new();
    for (idx, line) in raw.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 6 {
            return Err(Error::parse(label, lineno, format!("expected 6 tab-separated fields, got {}", fields.len())));
        }
        let parse_usize = |s: &str, what: &str| {
            s.parse::<usize>()
                .map_err(|e| Error::parse(label, lineno, format!("bad {what} {s:?}: {e}")))
        };
        out.push(HumanAnnotation {
            talk_id: fields[0].to_string(),
            sentence_index: parse_usize(fields[1], "sentence index")?,
            side: fields[2].parse().map_err(|e| Error::parse(label, lineno, e))?,
            start: parse_usize(fields[3], "span start")?,
            end: parse_usize(fields[4], "span end")?,
            verdict: fields[5].parse().map_err(|e| Error::parse(label, lineno, e))?,
        });
    }
    Ok(out)
}

/// Indexed human verdicts; the last record for a key wins.
#[derive(Default)]
pub struct HumanIndex {
    verdicts: HashMap<(String, usize, Side, usize, usize), Verdict>,
}

impl HumanIndex {
    pub fn from_annotations(records: &[HumanAnnotation]) -> Self {
        let mut verdicts = HashMap::new();
        for r in records {
            verdicts.insert((r.talk_id.clone(), r.sentence_index, r.side, r.start, r.end), r.verdict);
        }
        HumanIndex { verdicts }
    }

    pub fn verdict(&self, talk_id: &str, sentence_index: usize, side: Side, start: usize, end: usize) -> Option<Verdict> {
        self.verdicts
            .get(&(talk_id.to_string(), sentence_index, side, start, end))
            .copied()
    }

    pub fn len(&self) -> usize {
        self.verdicts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verdicts.is_empty()
    }
}

/// The dictionaries consulted for one talk: the merged general dictionary
/// plus the talk's glossary, which takes precedence.
#[derive(Clone, Copy)]
pub struct DictSet<'a> {
    pub main: &'a BilingualDictionary,
    pub glossary: Option<&'a BilingualDictionary>,
}

impl<'a> DictSet<'a> {
    pub fn for_talk(main: &'a BilingualDictionary, talk: &'a Talk) -> Self {
        DictSet { main, glossary: talk.glossary.as_ref() }
    }

    fn translations_of(&self, key: &str, out: &mut Vec<String>) {
        if let Some(glossary) = self.glossary {
            if let Some(ts) = glossary.lookup(key) {
                out.extend(ts.iter().cloned());
            }
        }
        if let Some(ts) = self.main.lookup(key) {
            out.extend(ts.iter().cloned());
        }
    }
}

/// Candidate translation strings for an exact span, in match priority:
/// glossary before general dictionary, surface key before lemma key before
/// spelled-out numeral key, with the raw digit string as a final fallback.
fn span_translation_candidates(tokens: &[Token], dicts: &DictSet) -> Vec<String> {
    let surfaces: Vec<String> = tokens.iter().map(|t| t.surface.to_lowercase()).collect();
    let mut keys = vec![surfaces.join(" ")];
    let lemmas: Vec<String> = tokens.iter().map(|t| lemmatize(&t.surface)).collect();
    let lemma_key = lemmas.join(" ");
    if !keys.contains(&lemma_key) {
        keys.push(lemma_key);
    }
    if tokens.len() == 1 && is_numeral(&tokens[0].surface) {
        if let Ok(spelled) = number_to_words(&tokens[0].surface) {
            if !keys.contains(&spelled) {
                keys.push(spelled);
            }
        }
    }
    let mut candidates = Vec::new();
    for key in &keys {
        dicts.translations_of(key, &mut candidates);
    }
    if tokens.len() == 1 && is_numeral(&tokens[0].surface) {
        candidates.push(tokens[0].surface.clone());
        let stripped = tokens[0].surface.replace(',', "");
        if stripped != tokens[0].surface {
            candidates.push(stripped);
        }
    }
    let mut seen = Vec::new();
    candidates.retain(|c| {
        if seen.contains(c) {
            false
        } else {
            seen.push(c.clone());
            true
        }
    });
    candidates
}

fn join_target(tokens: &[String]) -> String {
    tokens.concat()
}

fn first_contained(candidates: &[String], target_joined: &str) -> Option<String> {
    candidates.iter().find_map(|c| {
        let needle: String = c.chars().filter(|ch| !ch.is_whitespace()).collect();
        if !needle.is_empty() && target_joined.contains(&needle) {
            Some(c.clone())
        } else {
            None
        }
    })
}

/// Does a translation of the span (or of any sub-span, longest first,
/// leftmost first) occur in the reference? Returns the matched translation.
pub fn relevance_test(
    sentence: &SourceSentence,
    span: (usize, usize),
    reference: &[String],
    dicts: &DictSet,
) -> Option<String> {
    let (start, end) = span;
    let target = join_target(reference);
    for len in (1..=end - start).rev() {
        for a in start..=end - len {
            let candidates = span_translation_candidates(&sentence.tokens[a..a + len], dicts);
            if let Some(t) = first_contained(&candidates, &target) {
                return Some(t);
            }
        }
    }
    None
}

/// Split a maximal candidate run into terms. Sub-spans whose dictionary
/// translation occurs in the reference become terms (longest first,
/// leftmost first, tokens consumed at most once); leftover tokens become
/// single-token terms with no reference match.
fn decompose_run(
    sentence: &SourceSentence,
    run: (usize, usize),
    reference: &[String],
    dicts: &DictSet,
) -> Vec<(usize, usize, Option<String>)> {
    let (start, end) = run;
    let target = join_target(reference);
    let mut consumed = vec![false; end - start];
    let mut terms = Vec::new();
    for len in (1..=end - start).rev() {
        for a in start..=end - len {
            if consumed[a - start..a + len - start].iter().any(|&c| c) {
                continue;
            }
            let candidates = span_translation_candidates(&sentence.tokens[a..a + len], dicts);
            if let Some(t) = first_contained(&candidates, &target) {
                consumed[a - start..a + len - start].iter_mut().for_each(|c| *c = true);
                terms.push((a, a + len, Some(t)));
            }
        }
    }
    for (offset, taken) in consumed.iter().enumerate() {
        if !taken {
            terms.push((start + offset, start + offset + 1, None));
        }
    }
    terms.sort_by_key(|&(a, _, _)| a);
    terms
}

/// Outcome of testing one term against one target text.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverageOutcome {
    pub coverage: Coverage,
    pub matched_translation: Option<String>,
    /// No dictionary match and no human record: needs a human pass.
    pub needs_review: bool,
}

fn outcome_from_verdict(human: Option<Verdict>) -> CoverageOutcome {
    let (coverage, needs_review) = match human {
        Some(Verdict::Translated) => (Coverage::Literal, false),
        Some(Verdict::Nonliteral) => (Coverage::Nonliteral, false),
        Some(Verdict::Untranslated) => (Coverage::Untranslated, false),
        None => (Coverage::Untranslated, true),
    };
    CoverageOutcome { coverage, matched_translation: None, needs_review }
}

/// Decide how a target rendition covers a term: a dictionary translation
/// occurring in it means literal; otherwise the human verdict decides;
/// with neither, the term counts as untranslated pending review.
pub fn coverage_test(
    span_tokens: &[Token],
    target_tokens: &[String],
    dicts: &DictSet,
    human: Option<Verdict>,
) -> CoverageOutcome {
    let candidates = span_translation_candidates(span_tokens, dicts);
    if let Some(t) = first_contained(&candidates, &join_target(target_tokens)) {
        return CoverageOutcome { coverage: Coverage::Literal, matched_translation: Some(t), needs_review: false };
    }
    outcome_from_verdict(human)
}

/// One term judged against one target text, stored on the sentence record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermSpan {
    pub side: Side,
    pub start: usize,
    pub end: usize,
    pub coverage: Coverage,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matched_translation: Option<String>,
    /// The reference covers this term, so failing to interpret it is a miss.
    pub relevant: bool,
    #[serde(default)]
    pub needs_review: bool,
}

/// In/out tag per source token; `I` marks tokens of untranslated terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tag {
    I,
    O,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TagSequence {
    pub tags: Vec<Tag>,
}

impl TagSequence {
    pub fn i_positions(&self) -> Vec<usize> {
        self.tags
            .iter()
            .enumerate()
            .filter_map(|(i, t)| (*t == Tag::I).then_some(i))
            .collect()
    }
}

impl fmt::Display for TagSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.tags {
            f.write_str(match t {
                Tag::I => "I",
                Tag::O => "O",
            })?;
        }
        Ok(())
    }
}

/// Tag every token of the given spans `I` and the rest `O`. Spans must not
/// overlap and must sit on candidate-eligible tokens.
pub fn assign_io_tags(sentence: &SourceSentence, spans: &[(usize, usize)]) -> Result<TagSequence> {
    let mut tags = vec![Tag::O; sentence.tokens.len()];
    let mut sorted: Vec<(usize, usize)> = spans.to_vec();
    sorted.sort_unstable();
    let mut prev_end = 0usize;
    for &(start, end) in &sorted {
        if start >= end || end > sentence.tokens.len() {
            return Err(Error::domain(format!("span {start}..{end} out of range")));
        }
        if start < prev_end {
            return Err(Error::domain(format!("span {start}..{end} overlaps a previous span")));
        }
        prev_end = end;
        for (i, tag) in tags[start..end].iter_mut().enumerate().map(|(o, t)| (start + o, t)) {
            if !is_candidate_token(&sentence.tokens[i]) {
                return Err(Error::domain(format!(
                    "token {:?} at {i} is not candidate-eligible",
                    sentence.tokens[i].surface
                )));
            }
            *tag = Tag::I;
        }
    }
    Ok(TagSequence { tags })
}

/// Untranslated-term spans of one rank, for gold tagging.
pub fn untranslated_spans(triple: &AlignedTriple, rank: Rank) -> Vec<(usize, usize)> {
    triple
        .annotations
        .iter()
        .filter(|s| s.side == Side::Interpreter(rank) && s.relevant && s.coverage == Coverage::Untranslated)
        .map(|s| (s.start, s.end))
        .collect()
}

/// Gold tags for one rank, derived from stored annotations.
pub fn gold_tags(triple: &AlignedTriple, rank: Rank) -> Result<TagSequence> {
    assign_io_tags(&triple.source, &untranslated_spans(triple, rank))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AnnotateSummary {
    pub sentences: usize,
    pub terms: usize,
    pub spans: usize,
    pub needs_review: usize,
}

/// Run the full annotation pipeline over a corpus, replacing any stored
/// annotations. For every candidate term this judges the translator side
/// (which also decides relevance) and each requested interpreter rank that
/// has a rendition for the sentence.
pub fn annotate_corpus(
    talks: &mut [Talk],
    dictionary: &BilingualDictionary,
    human: &[HumanAnnotation],
    ranks: Option<&[Rank]>,
) -> Result<AnnotateSummary> {
    for record in human {
        let talk = talks
            .iter()
            .find(|t| t.talk_id == record.talk_id)
            .ok_or_else(|| Error::domain(format!("human annotation refers to unknown talk {:?}", record.talk_id)))?;
        let triple = talk
            .triples
            .iter()
            .find(|tr| tr.source.sentence_index == record.sentence_index)
            .ok_or_else(|| {
                Error::domain(format!(
                    "human annotation refers to missing sentence {} of talk {:?}",
                    record.sentence_index, record.talk_id
                ))
            })?;
        if record.start >= record.end || record.end > triple.source.tokens.len() {
            return Err(Error::domain(format!(
                "human annotation span {}..{} out of range in talk {:?} sentence {}",
                record.start, record.end, record.talk_id, record.sentence_index
            )));
        }
    }

    let index = HumanIndex::from_annotations(human);
    let mut summary = AnnotateSummary::default();
    for talk in talks.iter_mut() {
        let dicts = DictSet { main: dictionary, glossary: talk.glossary.as_ref() };
        let talk_id = talk.talk_id.clone();
        for triple in &mut talk.triples {
            summary.sentences += 1;
            let mut spans = Vec::new();
            let sent_idx = triple.source.sentence_index;
            for run in candidate_spans(&triple.source) {
                for (start, end, ref_match) in decompose_run(&triple.source, run, &triple.reference, &dicts) {
                    summary.terms += 1;
                    let tokens = &triple.source.tokens[start..end];
                    let translator = match &ref_match {
                        Some(t) => CoverageOutcome {
                            coverage: Coverage::Literal,
                            matched_translation: Some(t.clone()),
                            needs_review: false,
                        },
                        None => outcome_from_verdict(index.verdict(&talk_id, sent_idx, Side::Translator, start, end)),
                    };
                    let relevant = translator.coverage != Coverage::Untranslated;
                    summary.needs_review += translator.needs_review as usize;
                    spans.push(TermSpan {
                        side: Side::Translator,
                        start,
                        end,
                        coverage: translator.coverage,
                        matched_translation: translator.matched_translation,
                        relevant,
                        needs_review: translator.needs_review,
                    });
                    for (&rank, rendition) in &triple.interpretations {
                        if let Some(wanted) = ranks {
                            if !wanted.contains(&rank) {
                                continue;
                            }
                        }
                        let side = Side::Interpreter(rank);
                        let outcome =
                            coverage_test(tokens, rendition, &dicts, index.verdict(&talk_id, sent_idx, side, start, end));
                        summary.needs_review += outcome.needs_review as usize;
                        spans.push(TermSpan {
                            side,
                            start,
                            end,
                            coverage: outcome.coverage,
                            matched_translation: outcome.matched_translation,
                            relevant,
                            needs_review: outcome.needs_review,
                        });
                    }
                }
            }
            spans.sort_by_key(|s| (s.start, s.end, s.side));
            summary.spans += spans.len();
            triple.annotations = spans;
        }
    }
    Ok(summary)
}

fn pct(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        100.0 * n as f64 / d as f64
    }
}

/// Term coverage tallies for one judged side.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverageRow {
    pub side: Side,
    pub judged: usize,
    pub literal: usize,
    pub nonliteral: usize,
    pub untranslated: usize,
}

impl CoverageRow {
    fn new(side: Side) -> Self {
        CoverageRow { side, judged: 0, literal: 0, nonliteral: 0, untranslated: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UntranslatedRow {
    pub rank: Rank,
    /// Relevant untranslated terms.
    pub terms: usize,
    /// The same, excluding terms still awaiting human review.
    pub terms_reviewed: usize,
    pub i_tokens: usize,
    pub i_token_pct_all: f64,
    pub i_token_pct_candidates: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct OverlapStats {
    /// Shared untranslated terms per rank pair.
    pub pairwise: Vec<(Rank, Rank, usize)>,
    /// Terms untranslated for every rank present.
    pub all_ranks: usize,
    /// Terms untranslated only for this rank: count and percent of its set.
    pub unique: Vec<(Rank, usize, f64)>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AnnotationStats {
    pub total_tokens: usize,
    pub candidate_tokens: usize,
    pub total_terms: usize,
    pub coverage_rows: Vec<CoverageRow>,
    pub untranslated: Vec<UntranslatedRow>,
    pub overlap: Option<OverlapStats>,
}

impl CoverageRow {
    pub fn literal_pct(&self) -> f64 {
        pct(self.literal, self.judged)
    }

    pub fn nonliteral_pct(&self) -> f64 {
        pct(self.nonliteral, self.judged)
    }

    pub fn untranslated_pct(&self) -> f64 {
        pct(self.untranslated, self.judged)
    }
}

/// Corpus-level annotation statistics: coverage tallies per judged side,
/// relevant untranslated terms and tag shares per rank, and the overlap of
/// untranslated term sets across ranks.
pub fn annotation_stats(talks: &[Talk]) -> AnnotationStats {
    let mut stats = AnnotationStats::default();
    let mut rows: HashMap<Side, CoverageRow> = HashMap::new();
    let mut untranslated_sets: HashMap<Rank, Vec<(usize, usize, usize, usize)>> = HashMap::new();
    let mut reviewed_terms: HashMap<Rank, usize> = HashMap::new();
    let mut i_tokens: HashMap<Rank, usize> = HashMap::new();

    for (talk_idx, talk) in talks.iter().enumerate() {
        for triple in &talk.triples {
            stats.total_tokens += triple.source.tokens.len();
            stats.candidate_tokens += triple.source.tokens.iter().filter(|t| is_candidate_token(t)).count();
            for span in &triple.annotations {
                let row = rows.entry(span.side).or_insert_with(|| CoverageRow::new(span.side));
                row.judged += 1;
                match span.coverage {
                    Coverage::Literal => row.literal += 1,
                    Coverage::Nonliteral => row.nonliteral += 1,
                    Coverage::Untranslated => row.untranslated += 1,
                }
                if span.side == Side::Translator {
                    stats.total_terms += 1;
                }
                if let Side::Interpreter(rank) = span.side {
                    if span.relevant && span.coverage == Coverage::Untranslated {
                        untranslated_sets.entry(rank).or_default().push((
                            talk_idx,
                            triple.source.sentence_index,
                            span.start,
                            span.end,
                        ));
                        *i_tokens.entry(rank).or_default() += span.end - span.start;
                        if !span.needs_review {
                            *reviewed_terms.entry(rank).or_default() += 1;
                        }
                    }
                }
            }
        }
    }

    stats.coverage_rows = Side::ALL.iter().filter_map(|s| rows.remove(s)).collect();
    let present: Vec<Rank> = Rank::ALL.iter().copied().filter(|r| untranslated_sets.contains_key(r)).collect();
    for &rank in &present {
        let set = &untranslated_sets[&rank];
        let toks = i_tokens.get(&rank).copied().unwrap_or(0);
        stats.untranslated.push(UntranslatedRow {
            rank,
            terms: set.len(),
            terms_reviewed: reviewed_terms.get(&rank).copied().unwrap_or(0),
            i_tokens: toks,
            i_token_pct_all: pct(toks, stats.total_tokens),
            i_token_pct_candidates: pct(toks, stats.candidate_tokens),
        });
    }
    if present.len() >= 2 {
        let mut overlap = OverlapStats::default();
        for (i, &a) in present.iter().enumerate() {
            for &b in &present[i + 1..] {
                let sa = &untranslated_sets[&a];
                let sb = &untranslated_sets[&b];
                let shared = sa.iter().filter(|t| sb.contains(t)).count();
                overlap.pairwise.push((a, b, shared));
            }
        }
        overlap.all_ranks = untranslated_sets[&present[0]]
            .iter()
            .filter(|t| present[1..].iter().all(|r| untranslated_sets[r].contains(t)))
            .count();
        for &rank in &present {
            let own = &untranslated_sets[&rank];
            let unique = own
                .iter()
                .filter(|t| present.iter().all(|r| *r == rank || !untranslated_sets[r].contains(t)))
                .count();
            overlap.unique.push((rank, unique, pct(unique, own.len())));
        }
        stats.overlap = Some(overlap);
    }
    stats
}

impl fmt::Display for AnnotationStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "tokens {}  candidate tokens {}  terms {}",
            self.total_tokens, self.candidate_tokens, self.total_terms
        )?;
        writeln!(f, "\ncoverage per judged side")?;
        writeln!(f, "{:<4} {:>7} {:>18} {:>18} {:>18}", "side", "judged", "literal", "nonliteral", "untranslated")?;
        for row in &self.coverage_rows {
            writeln!(
                f,
                "{:<4} {:>7} {:>10} ({:>4.1}%) {:>10} ({:>4.1}%) {:>10} ({:>4.1}%)",
                row.side.as_str(),
                row.judged,
                row.literal,
                row.literal_pct(),
                row.nonliteral,
                row.nonliteral_pct(),
                row.untranslated,
                row.untranslated_pct()
            )?;
        }
        writeln!(f, "\nuntranslated terms per rank (relevant terms only)")?;
        writeln!(
            f,
            "{:<4} {:>6} {:>9} {:>9} {:>11} {:>13}",
            "rank", "terms", "reviewed", "I-tokens", "%all-tokens", "%candidates"
        )?;
        for row in &self.untranslated {
            writeln!(
                f,
                "{:<4} {:>6} {:>9} {:>9} {:>11.1} {:>13.1}",
                row.rank.as_str(),
                row.terms,
                row.terms_reviewed,
                row.i_tokens,
                row.i_token_pct_all,
                row.i_token_pct_candidates
            )?;
        }
        if let Some(overlap) = &self.overlap {
            writeln!(f, "\nuntranslated term overlap")?;
            for (a, b, n) in &overlap.pairwise {
                writeln!(f, "{} & {}: {}", a, b, n)?;
            }
            writeln!(f, "all ranks: {}", overlap.all_ranks)?;
            for (rank, n, p) in &overlap.unique {
                writeln!(f, "only {}: {} ({:.1}%)", rank, n, p)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::AlignedTriple;
    use std::collections::BTreeMap;

    fn token(surface: &str, pos: &str, i: usize) -> Token {
        Token {
            surface: surface.to_string(),
            pos: pos.to_string(),
            start_time: i as f64 * 0.4,
            end_time: i as f64 * 0.4 + 0.35,
            talk_word_index: i,
            sent_word_index: i,
        }
    }

    fn sentence(words: &[(&str, &str)]) -> SourceSentence {
        SourceSentence {
            sentence_index: 0,
            tokens: words.iter().enumerate().map(|(i, (s, p))| token(s, p, i)).collect(),
        }
    }

    fn snowpack_sentence() -> SourceSentence {
        sentence(&[
            ("In", "IN"),
            ("California", "NNP"),
            (",", ","),
            ("there", "EX"),
            ("has", "VBZ"),
            ("been", "VBN"),
            ("a", "DT"),
            ("40", "CD"),
            ("percent", "NN"),
            ("decline", "NN"),
            ("in", "IN"),
            ("the", "DT"),
            ("Sierra", "NNP"),
            ("snowpack", "NN"),
            (".", "."),
        ])
    }

    #[test]
    fn candidate_spans_are_maximal_noun_numeral_runs() {
        let spans = candidate_spans(&snowpack_sentence());
        assert_eq!(spans, vec![(1, 2), (7, 10), (12, 14)]);
    }

    #[test]
    fn stopwords_split_runs() {
        let s = sentence(&[("something", "NN"), ("ocean", "NN"), ("things", "NNS")]);
        assert_eq!(candidate_spans(&s), vec![(1, 2)]);
    }

    #[test]
    fn lemmatize_strips_plural_suffixes() {
        assert_eq!(lemmatize("studies"), "study");
        assert_eq!(lemmatize("oceans"), "ocean");
        assert_eq!(lemmatize("boxes"), "box");
        assert_eq!(lemmatize("classes"), "class");
        assert_eq!(lemmatize("notes"), "note");
        assert_eq!(lemmatize("ties"), "tie");
        assert_eq!(lemmatize("snowpack"), "snowpack");
        assert_eq!(lemmatize("glass"), "glass");
        assert_eq!(lemmatize("California"), "california");
    }

    #[test]
    fn numeral_shapes() {
        for ok in ["40", "3.14", "1,000", "25000000", "1,000.5"] {
            assert!(is_numeral(ok), "{ok}");
        }
        for bad in ["", "40.", ".5", "1,,0", "12a", "-3", "percent"] {
            assert!(!is_numeral(bad), "{bad}");
        }
    }

    #[test]
    fn numbers_spell_out_short_scale() {
        assert_eq!(number_to_words("40").unwrap(), "forty");
        assert_eq!(number_to_words("24").unwrap(), "twenty four");
        assert_eq!(number_to_words("25000000").unwrap(), "twenty five million");
        assert_eq!(number_to_words("0").unwrap(), "zero");
        assert_eq!(number_to_words("115").unwrap(), "one hundred fifteen");
        assert_eq!(number_to_words("1,000").unwrap(), "one thousand");
        assert_eq!(number_to_words("3.14").unwrap(), "three point one four");
        assert!(number_to_words("snowpack").is_err());
    }

    fn jp(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn relevance_finds_longest_subspan_translation() {
        let mut dict = BilingualDictionary::new();
        dict.insert("percent", "パーセント");
        dict.insert("sierra snowpack", "シエラの積雪");
        let dicts = DictSet { main: &dict, glossary: None };
        let s = snowpack_sentence();
        let reference = jp(&["シエラ", "の", "積雪", "が", "40", "パーセント", "減っ", "た"]);

        assert_eq!(relevance_test(&s, (12, 14), &reference, &dicts), Some("シエラの積雪".to_string()));
        assert_eq!(relevance_test(&s, (7, 10), &reference, &dicts), Some("40".to_string()));
        assert_eq!(relevance_test(&s, (1, 2), &reference, &dicts), None);
    }

    #[test]
    fn decompose_consumes_tokens_left_to_right_longest_first() {
        let mut dict = BilingualDictionary::new();
        dict.insert("percent", "パーセント");
        dict.insert("decline", "減少");
        let dicts = DictSet { main: &dict, glossary: None };
        let s = snowpack_sentence();
        let reference = jp(&["40", "パーセント", "の", "減少"]);
        let terms = decompose_run(&s, (7, 10), &reference, &dicts);
        assert_eq!(
            terms,
            vec![
                (7, 8, Some("40".to_string())),
                (8, 9, Some("パーセント".to_string())),
                (9, 10, Some("減少".to_string())),
            ]
        );
    }

    #[test]
    fn coverage_prefers_dictionary_then_human_then_review() {
        let mut dict = BilingualDictionary::new();
        dict.insert("percent", "パーセント");
        let dicts = DictSet { main: &dict, glossary: None };
        let s = snowpack_sentence();
        let tokens = &s.tokens[8..9];

        let hit = coverage_test(tokens, &jp(&["4", "パーセント"]), &dicts, None);
        assert_eq!(hit.coverage, Coverage::Literal);
        assert_eq!(hit.matched_translation.as_deref(), Some("パーセント"));

        let miss = coverage_test(tokens, &jp(&["減っ", "た"]), &dicts, Some(Verdict::Nonliteral));
        assert_eq!(miss.coverage, Coverage::Nonliteral);
        assert!(!miss.needs_review);

        let unknown = coverage_test(tokens, &jp(&["減っ", "た"]), &dicts, None);
        assert_eq!(unknown.coverage, Coverage::Untranslated);
        assert!(unknown.needs_review);
    }

    #[test]
    fn io_tags_reject_overlap_and_non_candidates() {
        let s = snowpack_sentence();
        let tags = assign_io_tags(&s, &[(7, 8), (12, 14)]).unwrap();
        assert_eq!(tags.to_string(), "OOOOOOOIOOOOIIO");
        assert!(assign_io_tags(&s, &[(7, 9), (8, 10)]).is_err());
        assert!(assign_io_tags(&s, &[(0, 1)]).is_err(), "IN token is not a candidate");
        assert!(assign_io_tags(&s, &[(14, 16)]).is_err());
    }

    fn annotated_triple() -> (Vec<Talk>, BilingualDictionary, Vec<HumanAnnotation>) {
        let mut dict = BilingualDictionary::new();
        dict.insert("california", "カリフォルニア");
        dict.insert("percent", "パーセント");
        dict.insert("decline", "減少");
        let reference = jp(&["カリフォルニア", "で", "は", "シエラ", "の", "積雪", "が", "40", "パーセント", "減少", "し", "た"]);
        let rendition = jp(&["カリフォルニア", "で", "は", "4", "パーセント", "少なく", "なっ", "た"]);
        let mut interpretations = BTreeMap::new();
        interpretations.insert(Rank::B, rendition);
        let mut glossary = BilingualDictionary::new();
        glossary.insert("sierra snowpack", "シエラの積雪");
        let talk = Talk {
            talk_id: "t01".to_string(),
            triples: vec![AlignedTriple {
                source: snowpack_sentence(),
                reference,
                interpretations,
                annotations: Vec::new(),
            }],
            glossary: Some(glossary),
        };
        let human = vec![
            HumanAnnotation {
                talk_id: "t01".into(),
                sentence_index: 0,
                side: Side::Interpreter(Rank::B),
                start: 7,
                end: 8,
                verdict: Verdict::Untranslated,
            },
            HumanAnnotation {
                talk_id: "t01".into(),
                sentence_index: 0,
                side: Side::Interpreter(Rank::B),
                start: 9,
                end: 10,
                verdict: Verdict::Nonliteral,
            },
            HumanAnnotation {
                talk_id: "t01".into(),
                sentence_index: 0,
                side: Side::Interpreter(Rank::B),
                start: 12,
                end: 14,
                verdict: Verdict::Untranslated,
            },
        ];
        (vec![talk], dict, human)
    }

    #[test]
    fn pipeline_reproduces_expected_tagging() {
        let (mut talks, dict, human) = annotated_triple();
        annotate_corpus(&mut talks, &dict, &human, None).unwrap();
        let triple = &talks[0].triples[0];
        let tags = gold_tags(triple, Rank::B).unwrap();
        assert_eq!(tags.i_positions(), vec![7, 12, 13]);
        assert_eq!(tags.to_string(), "OOOOOOOIOOOOIIO");

        let sierra = triple
            .annotations
            .iter()
            .find(|s| s.side == Side::Interpreter(Rank::B) && s.start == 12)
            .unwrap();
        assert_eq!((sierra.start, sierra.end), (12, 14), "glossary keeps the two-token term whole");
        assert!(sierra.relevant);

        let percent = triple
            .annotations
            .iter()
            .find(|s| s.side == Side::Interpreter(Rank::B) && s.start == 8)
            .unwrap();
        assert_eq!(percent.coverage, Coverage::Literal);
    }

    #[test]
    fn pipeline_rejects_dangling_human_records() {
        let (mut talks, dict, _) = annotated_triple();
        let human = vec![HumanAnnotation {
            talk_id: "t99".into(),
            sentence_index: 0,
            side: Side::Translator,
            start: 0,
            end: 1,
            verdict: Verdict::Translated,
        }];
        assert!(annotate_corpus(&mut talks, &dict, &human, None).is_err());
    }

    #[test]
    fn unreferenced_term_needs_review_and_is_irrelevant() {
        let (mut talks, dict, human) = annotated_triple();
        talks[0].glossary = None;
        annotate_corpus(&mut talks, &dict, &human, None).unwrap();
        let triple = &talks[0].triples[0];
        let sierra_t = triple
            .annotations
            .iter()
            .find(|s| s.side == Side::Translator && s.start == 12)
            .unwrap();
        assert_eq!((sierra_t.start, sierra_t.end), (12, 13), "no glossary: run decomposes to single tokens");
        assert!(sierra_t.needs_review && !sierra_t.relevant);
        let tags = gold_tags(triple, Rank::B).unwrap();
        assert_eq!(tags.i_positions(), vec![7], "irrelevant terms drop out of gold tags");
    }

    #[test]
    fn stats_tally_terms_and_overlap() {
        let (mut talks, dict, mut human) = annotated_triple();
        let mut a_rendition = BTreeMap::new();
        a_rendition.extend(talks[0].triples[0].interpretations.clone());
        a_rendition.insert(Rank::A, jp(&["カリフォルニア", "で", "は", "40", "パーセント", "減少", "し", "た"]));
        talks[0].triples[0].interpretations = a_rendition;
        human.push(HumanAnnotation {
            talk_id: "t01".into(),
            sentence_index: 0,
            side: Side::Interpreter(Rank::A),
            start: 12,
            end: 14,
            verdict: Verdict::Untranslated,
        });
        annotate_corpus(&mut talks, &dict, &human, None).unwrap();
        let stats = annotation_stats(&talks);

        assert_eq!(stats.total_terms, 5);
        assert_eq!(stats.total_tokens, 15);
        assert_eq!(stats.candidate_tokens, 6);
        let t_row = &stats.coverage_rows[0];
        assert_eq!((t_row.side, t_row.judged, t_row.literal), (Side::Translator, 5, 5));
        let b_row = stats.untranslated.iter().find(|r| r.rank == Rank::B).unwrap();
        assert_eq!((b_row.terms, b_row.i_tokens), (2, 3));
        let a_row = stats.untranslated.iter().find(|r| r.rank == Rank::A).unwrap();
        assert_eq!((a_row.terms, a_row.i_tokens), (1, 2));
        let overlap = stats.overlap.as_ref().unwrap();
        assert_eq!(overlap.pairwise, vec![(Rank::B, Rank::A, 1)]);
        assert_eq!(overlap.all_ranks, 1);
        assert_eq!(overlap.unique, vec![(Rank::B, 1, 50.0), (Rank::A, 0, 0.0)]);
    }

    #[test]
    fn stats_on_empty_corpus_are_all_zero() {
        let stats = annotation_stats(&[]);
        assert_eq!(stats.total_tokens, 0);
        assert_eq!(stats.total_terms, 0);
        assert!(stats.coverage_rows.is_empty());
        assert!(stats.untranslated.is_empty());
        assert!(stats.overlap.is_none());
        let text = stats.to_string();
        assert!(!text.contains("NaN"), "{text}");
    }

    #[test]
    fn human_annotation_file_round_trip() {
        let raw = "t01\t0\tB\t7\t8\tuntranslated\nt01\t0\tT\t9\t10\ttranslated\n";
        let records = parse_human_annotations("mem", raw).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].side, Side::Interpreter(Rank::B));
        assert_eq!(records[1].side, Side::Translator);
        assert_eq!(records[1].verdict, Verdict::Translated);

        let err = parse_human_annotations("mem", "t01\t0\tB\t7\t8\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err = parse_human_annotations("mem", "t01\t0\tQ\t7\t8\tuntranslated\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }
}
