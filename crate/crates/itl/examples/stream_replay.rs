//! Feed the bundled talk through the incremental tagger one token at a
//! time, the way a live captioning feed would arrive. An alert fires the
//! moment a risky word is spoken — the tagger never looks ahead, so its
//! output here matches the batch tagger exactly.
//!
//! The detector is a hand-built model that fires on candidates missing
//! from the frequency table; 40, Sierra, and snowpack are the words the
//! rank-B interpreter actually dropped.

use itl::corpus::{
    load_corpus, load_frequency_table, BilingualDictionary, PronunciationDictionary, Resources,
};
use itl::features::FeatureConfig;
use itl::model::{LinearModel, TrainConfig, REGISTRY_VERSION};
use itl::tagger::StreamTagger;

fn main() -> itl::Result<()> {
    let talks = load_corpus(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/corpus.jsonl"))?;
    let resources = Resources {
        dictionary: BilingualDictionary::new(),
        frequency: load_frequency_table(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/freq.tsv"))?,
        pronunciations: PronunciationDictionary::default(),
    };
    let model = LinearModel {
        weights: [("freq:oov".to_string(), 1.0)].into_iter().collect(),
        bias: -0.5,
        config: TrainConfig::default(),
        feature_registry_version: REGISTRY_VERSION.to_string(),
    };
    let config = FeatureConfig::default();

    for talk in &talks {
        let mut tagger = StreamTagger::new(&model, &config, &resources, 0.0)?;
        for triple in &talk.triples {
            for token in &triple.source.tokens {
                let prediction = tagger.push(triple.source.sentence_index, token)?;
                print!("{:6.2}s  {:<12}", token.start_time, token.surface);
                if let Some(score) = prediction.score {
                    print!("  score {score:+.2}");
                    if score > 0.0 {
                        print!("  ALERT");
                    }
                }
                println!();
            }
        }
    }
    Ok(())
}
