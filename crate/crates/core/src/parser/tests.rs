use super::*;
use crate::fragments::{fragment_corpus, load_fragment};

fn opts(strategy: Strategy) -> ParseOptions {
    ParseOptions {
        strategy,
        ..ParseOptions::default()
    }
}

#[test]
fn tokenizer() {
    let t = tokenize("  John walks. ").unwrap();
    assert_eq!(t, vec![sym("john"), sym("walks")]);
    assert_eq!(tokenize(" ?"), Err(ParseError::EmptyInput));
}

#[test]
fn corpora_under_both_strategies() {
    for name in crate::fragments::fragment_names() {
        let p = load_fragment(name).unwrap();
        for item in fragment_corpus(name).unwrap() {
            for st in [Strategy::ShiftReduce, Strategy::Forest] {
                let r = parse(&p, &item.sentence, &opts(st)).unwrap();
                eprintln!(
                    "{st} {:?} {} {:?}",
                    item.sentence,
                    r.derivations.len(),
                    r.readings()
                );
                assert_eq!(r.grammatical(), item.grammatical, "{st}: {}", item.sentence);
                if let Some(n) = item.derivations {
                    assert_eq!(r.derivations.len(), n, "{st}: {}", item.sentence);
                }
                if let Some(n) = item.readings {
                    assert_eq!(r.readings().len(), n, "{st}: {}", item.sentence);
                }
            }
        }
    }
}
