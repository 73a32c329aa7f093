//! Train the sliding-window tagger on a synthetic corpus and inspect
//! what it learned: the per-epoch objective trace, the strongest
//! weights, and the model digest that makes runs comparable.

use itl::annotate::Tag;
use itl::corpus::Rank;
use itl::features::FeatureConfig;
use itl::model::{train_traced, TrainConfig};
use itl::synth::{planted_corpus, SynthOptions};
use itl::tagger::{extract_examples, HistoryMode};

fn main() -> itl::Result<()> {
    let corpus = planted_corpus(&SynthOptions::default())?;
    let config = FeatureConfig::default();
    let examples = extract_examples(
        &corpus.talks,
        Rank::B,
        &config,
        &corpus.resources,
        HistoryMode::Gold,
    )?;
    let positives = examples.iter().filter(|(_, tag)| *tag == Tag::I).count();
    println!("{} candidate tokens, {} positive", examples.len(), positives);

    let train_config = TrainConfig { c: 1.0, epochs: 20, ..TrainConfig::default() };
    let (model, trace) = train_traced(&examples, &train_config)?;

    println!("\nobjective by epoch (best snapshot so far):");
    for (epoch, value) in trace.iter().enumerate() {
        println!("  {:>2}  {value:.6}", epoch + 1);
    }

    let mut weights: Vec<(&String, &f64)> = model.weights.iter().collect();
    weights.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()));
    println!("\nstrongest weights:");
    for (name, weight) in weights.iter().take(12) {
        println!("  {weight:+.4}  {name}");
    }
    println!("\nbias {:+.4}", model.bias);
    println!("model digest {}", model.digest(&config));
    Ok(())
}
