//! Sparse feature extraction for candidate tokens.
//!
//! Features come in five named groups so experiments can drop one group at
//! a time: position of the word in the talk (`elapsed_time`), local speech
//! rate (`word_timing`), corpus rarity and loanword evidence (`word_freq`),
//! word shape and part of speech for the token and its window predecessors
//! (`characteristic_syntax`), and the labels already predicted inside the
//! window (`history`). Extraction only ever sees the current token and the
//! window of earlier tokens, so a prediction never depends on words that
//! have not been spoken yet.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::annotate::{is_candidate_pos, is_numeral, lemmatize, number_to_words, Tag, CANDIDATE_POS};
use crate::corpus::{Resources, Token};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureGroup {
    ElapsedTime,
    WordTiming,
    WordFreq,
    CharacteristicSyntax,
    History,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 5] = [
        FeatureGroup::ElapsedTime,
        FeatureGroup::WordTiming,
        FeatureGroup::WordFreq,
        FeatureGroup::CharacteristicSyntax,
        FeatureGroup::History,
    ];

    /// The groups dropped one at a time in the standard ablation table.
    pub const ABLATABLE: [FeatureGroup; 4] = [
        FeatureGroup::ElapsedTime,
        FeatureGroup::WordTiming,
        FeatureGroup::WordFreq,
        FeatureGroup::CharacteristicSyntax,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureGroup::ElapsedTime => "elapsed_time",
            FeatureGroup::WordTiming => "word_timing",
            FeatureGroup::WordFreq => "word_freq",
            FeatureGroup::CharacteristicSyntax => "characteristic_syntax",
            FeatureGroup::History => "history",
        }
    }
}

impl fmt::Display for FeatureGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureGroup {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        FeatureGroup::ALL
            .iter()
            .copied()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| format!("unknown feature group {s:?}"))
    }
}

/// Which feature group a feature name belongs to.
pub fn group_of(name: &str) -> Option<FeatureGroup> {
    let rest = match name.strip_prefix("prev:") {
        Some(tail) => tail.split_once(':').map(|(_, r)| r).unwrap_or(tail),
        None => name,
    };
    let head = rest.split(':').next().unwrap_or(rest);
    match head {
        "elapsed" => Some(FeatureGroup::ElapsedTime),
        "timing" => Some(FeatureGroup::WordTiming),
        "freq" => Some(FeatureGroup::WordFreq),
        "char" | "pos" => Some(FeatureGroup::CharacteristicSyntax),
        "hist" => Some(FeatureGroup::History),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureConfig {
    /// Window size k: the current token plus k-1 predecessors.
    pub window_size: usize,
    /// Number of equal-width log-count bins for in-vocabulary words.
    pub frequency_bins: usize,
    /// Seconds of history counted by the local speech-rate feature.
    pub timing_horizon: f64,
    pub enabled: BTreeSet<FeatureGroup>,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            window_size: 8,
            frequency_bins: 9,
            timing_horizon: 5.0,
            enabled: FeatureGroup::ALL.into_iter().collect(),
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_size < 1 {
            return Err(Error::domain("window size must be at least 1"));
        }
        if self.frequency_bins < 2 {
            return Err(Error::domain("frequency bins must be at least 2"));
        }
        if self.timing_horizon.is_nan() || self.timing_horizon <= 0.0 {
            return Err(Error::domain("timing horizon must be positive"));
        }
        Ok(())
    }

    pub fn enabled(&self, group: FeatureGroup) -> bool {
        self.enabled.contains(&group)
    }

    /// A copy with the given group dropped.
    pub fn without(&self, group: FeatureGroup) -> FeatureConfig {
        let mut copy = self.clone();
        copy.enabled.remove(&group);
        copy
    }
}

/// Sparse named feature vector with deterministic iteration order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FeatureVector {
    values: BTreeMap<String, f64>,
}

impl FeatureVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, name: impl Into<String>, value: f64) {
        self.values.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// What the window remembers about one already-processed token.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowEntry {
    pub pos: String,
    pub is_numeral: bool,
    pub char_count: usize,
    pub start_time: f64,
    pub label: Tag,
}

impl WindowEntry {
    pub fn from_token(token: &Token, label: Tag) -> Self {
        WindowEntry {
            pos: token.pos.clone(),
            is_numeral: is_numeral(&token.surface),
            char_count: token.surface.chars().count(),
            start_time: token.start_time,
            label,
        }
    }
}

/// The k-1 most recent tokens before the current one, newest last. The
/// window never holds the current or any later token.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WindowState {
    entries: VecDeque<WindowEntry>,
    capacity: usize,
}

impl WindowState {
    pub fn new(config: &FeatureConfig) -> Self {
        WindowState { entries: VecDeque::new(), capacity: config.window_size.saturating_sub(1) }
    }

    pub fn push(&mut self, entry: WindowEntry) {
        if self.capacity == 0 {
            return;
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(entry);
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Predecessors newest first: slot 1 is the token right before the
    /// current one.
    pub fn recent(&self) -> impl Iterator<Item = (usize, &WindowEntry)> {
        self.entries.iter().rev().enumerate().map(|(i, e)| (i + 1, e))
    }
}

/// Talk-clock features: minutes elapsed and word offsets.
pub fn elapsed_time_features(token: &Token, out: &mut FeatureVector) {
    out.set("elapsed:minutes", token.start_time / 60.0);
    out.set("elapsed:talk_word_index", token.talk_word_index as f64);
    out.set("elapsed:sent_word_index", token.sent_word_index as f64);
}

/// Local speech rate: how many window tokens (current included) started
/// within the last `timing_horizon` seconds, plus the time gap to each
/// predecessor slot.
pub fn word_timing_features(config: &FeatureConfig, window: &WindowState, token: &Token, out: &mut FeatureVector) {
    let cutoff = token.start_time - config.timing_horizon;
    let recent = 1 + window.entries.iter().filter(|e| e.start_time > cutoff).count();
    out.set("timing:words_in_past_m", recent as f64);
    for (slot, entry) in window.recent() {
        out.set(format!("timing:delta:{slot}"), token.start_time - entry.start_time);
    }
}

fn katakana_only(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| ('\u{30A0}'..='\u{30FF}').contains(&c))
}

/// Corpus rarity, one-hot over equal-width log10-count bins between the
/// table's min and max counts, with a dedicated out-of-vocabulary
/// indicator, plus a loanword flag set when some dictionary translation of
/// the lemma is written entirely in Katakana.
pub fn frequency_features(config: &FeatureConfig, token: &Token, resources: &Resources, out: &mut FeatureVector) {
    match resources.frequency.lookup(&token.surface) {
        Some(count) => {
            let lo = (resources.frequency.min_count().unwrap_or(1) as f64).log10();
            let hi = (resources.frequency.max_count().unwrap_or(1) as f64).log10();
            let bins = config.frequency_bins;
            let idx = if hi <= lo {
                bins - 1
            } else {
                let width = (hi - lo) / bins as f64;
                (((count as f64).log10() - lo) / width).floor().clamp(0.0, (bins - 1) as f64) as usize
            };
            out.set(format!("freq:bin:{idx}"), 1.0);
        }
        None => out.set("freq:oov", 1.0),
    }
    let loan = resources
        .dictionary
        .lookup(&lemmatize(&token.surface))
        .map(|ts| ts.iter().any(|t| katakana_only(t)))
        .unwrap_or(false);
    out.set("freq:loanword", if loan { 1.0 } else { 0.0 });
}

fn vowel_groups(word: &str) -> usize {
    let mut groups = 0;
    let mut in_group = false;
    for c in word.chars() {
        if matches!(c.to_ascii_lowercase(), 'a' | 'e' | 'i' | 'o' | 'u') {
            if !in_group {
                groups += 1;
            }
            in_group = true;
        } else {
            in_group = false;
        }
    }
    groups
}

fn word_syllables(word: &str, resources: &Resources) -> usize {
    resources.pronunciations.syllables(word).unwrap_or_else(|| vowel_groups(word).max(1))
}

/// Syllable count via the pronunciation lexicon; numerals are spelled out
/// first; unknown words fall back to vowel-letter groups, floored at one.
pub fn syllable_count(surface: &str, resources: &Resources) -> usize {
    if is_numeral(surface) {
        if let Ok(spelled) = number_to_words(surface) {
            return spelled.split(' ').map(|w| word_syllables(w, resources)).sum();
        }
    }
    word_syllables(surface, resources)
}

fn pos_one_hot(prefix: &str, pos: &str, out: &mut FeatureVector) {
    let tag = if is_candidate_pos(pos) { pos } else { "other" };
    debug_assert!(CANDIDATE_POS.contains(&tag) || tag == "other");
    out.set(format!("{prefix}pos:{tag}"), 1.0);
}

/// Shape features of the current token: length, syllables, numeral flag,
/// and part-of-speech one-hot.
pub fn characteristic_features(token: &Token, resources: &Resources, out: &mut FeatureVector) {
    out.set("char:count", token.surface.chars().count() as f64);
    out.set("char:syllables", syllable_count(&token.surface, resources) as f64);
    out.set("char:is_numeral", if is_numeral(&token.surface) { 1.0 } else { 0.0 });
    pos_one_hot("", &token.pos, out);
}

fn predecessor_characteristics(window: &WindowState, out: &mut FeatureVector) {
    for (slot, entry) in window.recent() {
        out.set(format!("prev:{slot}:char:count"), entry.char_count as f64);
        out.set(format!("prev:{slot}:char:is_numeral"), if entry.is_numeral { 1.0 } else { 0.0 });
        pos_one_hot(&format!("prev:{slot}:"), &entry.pos, out);
    }
}

fn history_features(window: &WindowState, out: &mut FeatureVector) {
    for (slot, entry) in window.recent() {
        out.set(format!("hist:{slot}"), if entry.label == Tag::I { 1.0 } else { 0.0 });
    }
}

/// Extract the enabled feature groups for a candidate token given the
/// window of its predecessors. The token must carry a candidate part of
/// speech; extraction reads nothing later than the current token.
pub fn extract(config: &FeatureConfig, window: &WindowState, token: &Token, resources: &Resources) -> Result<FeatureVector> {
    config.validate()?;
    if !is_candidate_pos(&token.pos) {
        return Err(Error::domain(format!(
            "cannot extract features for POS {:?} (token {:?})",
            token.pos, token.surface
        )));
    }
    let mut out = FeatureVector::new();
    if config.enabled(FeatureGroup::ElapsedTime) {
        elapsed_time_features(token, &mut out);
    }
    if config.enabled(FeatureGroup::WordTiming) {
        word_timing_features(config, window, token, &mut out);
    }
    if config.enabled(FeatureGroup::WordFreq) {
        frequency_features(config, token, resources, &mut out);
    }
    if config.enabled(FeatureGroup::CharacteristicSyntax) {
        characteristic_features(token, resources, &mut out);
        predecessor_characteristics(window, &mut out);
    }
    if config.enabled(FeatureGroup::History) {
        history_features(window, &mut out);
    }
    Ok(out)
}

/// Dump examples as a TSV matrix: one column per feature name seen, one
/// row per example, and a final gold label column.
pub fn write_feature_matrix<W: Write>(examples: &[(FeatureVector, Tag)], mut out: W) -> Result<()> {
    let names: BTreeSet<&str> = examples.iter().flat_map(|(v, _)| v.names()).collect();
    let header: Vec<&str> = names.iter().copied().chain(["gold"]).collect();
    writeln!(out, "{}", header.join("\t"))?;
    for (vector, tag) in examples {
        let mut row: Vec<String> = names.iter().map(|n| vector.get(n).unwrap_or(0.0).to_string()).collect();
        row.push(match tag {
            Tag::I => "I".to_string(),
            Tag::O => "O".to_string(),
        });
        writeln!(out, "{}", row.join("\t"))?;
    }
    Ok(())
}
