//! Corpus-level annotation statistics: coverage per judged side,
//! untranslated terms per interpreter rank, and the overlap of the
//! ranks' untranslated sets.

use itl::annotate::annotation_stats;
use itl::corpus::load_corpus;
use itl::synth::{planted_corpus, SynthOptions};

fn main() -> itl::Result<()> {
    let talks = load_corpus(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/corpus.jsonl"))?;
    println!("bundled mini corpus");
    print!("{}", annotation_stats(&talks));

    // The synthetic corpus annotates every rank, so the overlap section
    // appears too (its planted terms coincide exactly across ranks).
    let synth = planted_corpus(&SynthOptions::default())?;
    println!("\nsynthetic corpus, {} talks", synth.talks.len());
    print!("{}", annotation_stats(&synth.talks));
    Ok(())
}
