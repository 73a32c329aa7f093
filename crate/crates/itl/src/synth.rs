//! Seeded synthetic corpora with a planted signal, for end-to-end
//! exercises and examples that need more data than the fixtures provide.
//!
//! A candidate token is planted as untranslated exactly when it is a rare
//! word *and* arrives on a fast stretch of speech (a small gap to the
//! previous word). Rarity alone therefore caps a frequency baseline near
//! 50% precision, while a model that also reads the timing features can
//! separate the classes — the corpus rewards exactly the signal the
//! tagger is built to pick up. Rarity and pace are drawn independently
//! per token, so no other feature group carries the timing signal.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::annotate::{Coverage, TermSpan};
use crate::corpus::{
    AlignedTriple, BilingualDictionary, FrequencyTable, PronunciationDictionary, Rank, Resources,
    Side, SourceSentence, Talk, Token,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SynthOptions {
    pub talks: usize,
    pub sentences_per_talk: usize,
    /// Tokens per sentence; odd positions (except the final period) are
    /// candidate nouns.
    pub tokens_per_sentence: usize,
    pub seed: u64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions { talks: 6, sentences_per_talk: 30, tokens_per_sentence: 12, seed: 7 }
    }
}

pub struct SynthCorpus {
    pub talks: Vec<Talk>,
    pub resources: Resources,
}

const FILLERS: [(&str, &str); 6] =
    [("the", "DT"), ("of", "IN"), ("and", "CC"), ("to", "TO"), ("was", "VBD"), ("very", "RB")];

const SYLLABLES: [&str; 14] =
    ["ba", "do", "fi", "gu", "ke", "lo", "mi", "nu", "po", "ra", "se", "ti", "vo", "zu"];

fn pseudo_word(rng: &mut ChaCha8Rng) -> String {
    (0..3).map(|_| SYLLABLES[rng.random_range(0..SYLLABLES.len())]).collect()
}

fn fresh_vocabulary(rng: &mut ChaCha8Rng, size: usize, taken: &mut Vec<String>) -> Vec<String> {
    let mut words = Vec::with_capacity(size);
    while words.len() < size {
        let word = pseudo_word(rng);
        if !taken.contains(&word) {
            taken.push(word.clone());
            words.push(word);
        }
    }
    words
}

/// Generate a corpus where gold untranslated terms are exactly the rare,
/// fast-speech candidate nouns, annotated for every interpreter rank.
pub fn planted_corpus(options: &SynthOptions) -> Result<SynthCorpus> {
    if options.talks == 0 || options.sentences_per_talk == 0 {
        return Err(Error::domain("synthetic corpus needs at least one talk and sentence"));
    }
    if options.tokens_per_sentence < 4 {
        return Err(Error::domain("synthetic sentences need at least 4 tokens"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut taken: Vec<String> = FILLERS.iter().map(|(w, _)| w.to_string()).collect();
    let common_vocab = fresh_vocabulary(&mut rng, 40, &mut taken);
    let rare_vocab = fresh_vocabulary(&mut rng, 40, &mut taken);
    // The last 40% of the rare vocabulary stays out of the frequency
    // table, so the corpus also exercises the out-of-vocabulary path.
    let rare_in_table = rare_vocab.len() * 6 / 10;

    let mut counts: Vec<(String, u64)> =
        FILLERS.iter().map(|(w, _)| (w.to_string(), 2_000_000_000)).collect();
    for word in &common_vocab {
        let exponent = 6.0 + rng.random_range(0.0..3.0);
        counts.push((word.clone(), 10f64.powf(exponent) as u64));
    }
    for word in &rare_vocab[..rare_in_table] {
        counts.push((word.clone(), rng.random_range(1..40)));
    }

    let mut talks = Vec::with_capacity(options.talks);
    for t in 0..options.talks {
        let mut clock = 0.0f64;
        let mut talk_word_index = 0usize;
        let mut triples = Vec::with_capacity(options.sentences_per_talk);
        for sentence_index in 0..options.sentences_per_talk {
            let mut tokens = Vec::with_capacity(options.tokens_per_sentence);
            let mut spans = Vec::new();
            for i in 0..options.tokens_per_sentence {
                let last = i == options.tokens_per_sentence - 1;
                let candidate = i % 2 == 1 && !last;
                let (surface, pos, gap) = if last {
                    (".".to_string(), ".".to_string(), 0.4 + rng.random_range(0.0..0.2))
                } else if candidate {
                    let rare = rng.random_bool(0.5);
                    let fast = rng.random_bool(0.5);
                    let word = if rare {
                        rare_vocab[rng.random_range(0..rare_vocab.len())].clone()
                    } else {
                        common_vocab[rng.random_range(0..common_vocab.len())].clone()
                    };
                    if rare && fast {
                        spans.push((i, i + 1));
                    }
                    let gap = if fast {
                        0.10 + rng.random_range(0.0..0.10)
                    } else {
                        0.80 + rng.random_range(0.0..0.40)
                    };
                    (word, "NN".to_string(), gap)
                } else {
                    let (w, p) = FILLERS[rng.random_range(0..FILLERS.len())];
                    (w.to_string(), p.to_string(), 0.4 + rng.random_range(0.0..0.2))
                };
                clock += gap;
                tokens.push(Token {
                    surface,
                    pos,
                    start_time: clock,
                    end_time: clock + 0.08,
                    talk_word_index,
                    sent_word_index: i,
                });
                talk_word_index += 1;
            }
            let annotations = spans
                .iter()
                .flat_map(|(start, end)| {
                    Rank::ALL.map(|rank| TermSpan {
                        side: Side::Interpreter(rank),
                        start: *start,
                        end: *end,
                        coverage: Coverage::Untranslated,
                        matched_translation: None,
                        relevant: true,
                        needs_review: false,
                    })
                })
                .collect();
            let interpretations =
                Rank::ALL.iter().map(|r| (*r, vec!["（合成）".to_string()])).collect::<BTreeMap<_, _>>();
            triples.push(AlignedTriple {
                source: SourceSentence { sentence_index, tokens },
                reference: vec!["（合成）".to_string()],
                interpretations,
                annotations,
            });
        }
        talks.push(Talk { talk_id: format!("synth{t:02}"), triples, glossary: None });
    }

    let resources = Resources {
        dictionary: BilingualDictionary::new(),
        frequency: FrequencyTable::from_counts(counts),
        pronunciations: PronunciationDictionary::default(),
    };
    Ok(SynthCorpus { talks, resources })
}
