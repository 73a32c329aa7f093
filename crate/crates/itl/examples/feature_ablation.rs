//! Drop each feature group in turn and measure what it costs.
//!
//! The synthetic corpus plants its terms on rare words spoken in fast
//! stretches, so removing the word-timing group should hurt the most:
//! rarity alone cannot tell which rare words the interpreter will drop.

use itl::corpus::Rank;
use itl::eval::{ablation, CvOptions};
use itl::features::FeatureGroup;
use itl::synth::{planted_corpus, SynthOptions};

fn main() -> itl::Result<()> {
    let corpus = planted_corpus(&SynthOptions {
        talks: 4,
        sentences_per_talk: 20,
        ..SynthOptions::default()
    })?;

    let mut options = CvOptions::new(Rank::B);
    options.grid = vec![1.0, 10.0];
    options.bootstrap_iterations = 200;
    options.jobs = 4;

    let report = ablation(&corpus.talks, &corpus.resources, &options, &FeatureGroup::ABLATABLE)?;
    print!("{report}");

    let full = report
        .systems
        .iter()
        .find(|s| s.name == "svm:all")
        .expect("full system present")
        .mean_ap;
    println!("\nmean AP change when one group is removed (x100):");
    for system in report.systems.iter().filter(|s| s.name.starts_with("svm:-")) {
        println!("  {:+6.1}  {}", 100.0 * (system.mean_ap - full), &system.name["svm:-".len()..]);
    }
    Ok(())
}
