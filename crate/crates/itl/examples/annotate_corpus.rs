//! Annotate the bundled mini corpus and print the gold IO tags.
//!
//! The pipeline judges every candidate term against the reference
//! translation and the rank-B interpreter's rendition, consulting the
//! bilingual dictionary, the talk glossary, and the human verdict file.
//! Words the interpreter left untranslated come out tagged I.

use itl::annotate::{annotate_corpus, gold_tags, load_human_annotations, Tag};
use itl::corpus::{load_bilingual_dictionary, load_corpus, load_talk_glossaries, Rank};

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn main() -> itl::Result<()> {
    let mut talks = load_corpus(fixture("corpus.jsonl"))?;
    let dictionary = load_bilingual_dictionary(&[fixture("dict.tsv")])?;
    load_talk_glossaries(fixture("glossary"), &mut talks)?;
    let human = load_human_annotations(fixture("human.tsv"))?;

    let summary = annotate_corpus(&mut talks, &dictionary, &human, Some(&[Rank::B]))?;
    println!(
        "{} sentences, {} judged terms, {} spans, {} awaiting review",
        summary.sentences, summary.terms, summary.spans, summary.needs_review
    );

    for talk in &talks {
        for triple in &talk.triples {
            let tags = gold_tags(triple, Rank::B)?;
            print!("\n{} #{}: ", talk.talk_id, triple.source.sentence_index);
            for (token, tag) in triple.source.tokens.iter().zip(&tags.tags) {
                match tag {
                    Tag::I => print!("[{}] ", token.surface),
                    Tag::O => print!("{} ", token.surface),
                }
            }
            println!();
        }
    }
    Ok(())
}
