//! Precision-recall curves, average precision, and the paired bootstrap
//! significance test, computed over the bundled corpus at word level.
//!
//! Two rankers are compared: word rarity (out-of-vocabulary words rank
//! highest) and a flat baseline that scores every candidate the same.

use std::io;

use itl::annotate::{gold_tags, is_candidate_token, Tag};
use itl::corpus::{load_corpus, load_frequency_table, Rank};
use itl::eval::{average_precision, paired_bootstrap, pr_curve, write_pr_csv, ScoredSet};
use itl::tagger::rarity_score;

fn main() -> itl::Result<()> {
    let talks = load_corpus(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/corpus.jsonl"))?;
    let table = load_frequency_table(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/freq.tsv"))?;

    let mut rarity = ScoredSet::new();
    let mut flat = ScoredSet::new();
    for talk in &talks {
        for triple in &talk.triples {
            let tags = gold_tags(triple, Rank::B)?;
            for (index, token) in triple.source.tokens.iter().enumerate() {
                if !is_candidate_token(token) {
                    continue;
                }
                let gold = tags.tags[index] == Tag::I;
                let sentence = triple.source.sentence_index;
                rarity.push(rarity_score(&table, &token.surface), gold, sentence);
                flat.push(1.0, gold, sentence);
            }
        }
    }

    println!("rarity ranking: AP {:.3}", average_precision(&rarity)?);
    write_pr_csv(&pr_curve(&rarity)?, io::stdout().lock())?;

    println!("\nflat baseline: AP {:.3}", average_precision(&flat)?);
    write_pr_csv(&pr_curve(&flat)?, io::stdout().lock())?;

    let p = paired_bootstrap(&flat, &rarity, 2000, 42)?;
    println!("\npaired bootstrap, 2000 sentence resamples: p = {p:.3}");
    Ok(())
}
