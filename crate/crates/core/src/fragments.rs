//! Bundled grammar fragments and their judgment corpora.
//!
//! Corpus lines look like
//! `+ john walks | derivations=1 | readings=1 | src=id`: a `+` or `-`
//! judgment, the sentence, and optional `|`-separated annotations. `#`
//! starts a comment.

use thiserror::Error;

use crate::engine::Program;
use crate::grammar::{load_grammar, GrammarError};

pub const ENGLISH_AGREEMENT: &str = "english-agreement";
pub const DUTCH_CORE: &str = "dutch-core";

const FRAGMENTS: [(&str, &str, &str); 2] = [
    (
        ENGLISH_AGREEMENT,
        include_str!("../fragments/english-agreement.cug"),
        include_str!("../fragments/english-agreement.corpus"),
    ),
    (
        DUTCH_CORE,
        include_str!("../fragments/dutch-core.cug"),
        include_str!("../fragments/dutch-core.corpus"),
    ),
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FragmentError {
    #[error("unknown fragment '{0}' (known: english-agreement, dutch-core)")]
    Unknown(String),
    #[error("fragment {name}: {source}")]
    Grammar {
        name: String,
        #[source]
        source: GrammarError,
    },
    #[error("corpus line {line}: {msg}")]
    Corpus { line: usize, msg: String },
}

pub fn fragment_names() -> Vec<&'static str> {
    FRAGMENTS.iter().map(|f| f.0).collect()
}

/// Grammar source text of a bundled fragment.
pub fn fragment_source(name: &str) -> Result<&'static str, FragmentError> {
    FRAGMENTS
        .iter()
        .find(|f| f.0 == name)
        .map(|f| f.1)
        .ok_or_else(|| FragmentError::Unknown(name.into()))
}

pub fn fragment_corpus_text(name: &str) -> Result<&'static str, FragmentError> {
    FRAGMENTS
        .iter()
        .find(|f| f.0 == name)
        .map(|f| f.2)
        .ok_or_else(|| FragmentError::Unknown(name.into()))
}

/// Parse and validate a bundled grammar.
pub fn load_fragment(name: &str) -> Result<Program, FragmentError> {
    load_grammar(fragment_source(name)?).map_err(|source| FragmentError::Grammar {
        name: name.into(),
        source,
    })
}

pub fn fragment_corpus(name: &str) -> Result<Vec<CorpusItem>, FragmentError> {
    parse_corpus(fragment_corpus_text(name)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusItem {
    pub line: usize,
    pub grammatical: bool,
    pub sentence: String,
    pub derivations: Option<usize>,
    pub readings: Option<usize>,
    pub src: Option<String>,
}

pub fn parse_corpus(text: &str) -> Result<Vec<CorpusItem>, FragmentError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |msg: String| FragmentError::Corpus { line, msg };
        let mut parts = content.split('|').map(str::trim);
        let head = parts.next().unwrap_or_default();
        let (grammatical, sentence) = match head.split_at(1) {
            ("+", s) => (true, s.trim()),
            ("-", s) => (false, s.trim()),
            _ => return Err(err(format!("expected '+' or '-', got {head:?}"))),
        };
        if sentence.is_empty() {
            return Err(err("empty sentence".into()));
        }
        let mut item = CorpusItem {
            line,
            grammatical,
            sentence: sentence.to_string(),
            derivations: None,
            readings: None,
            src: None,
        };
        for ann in parts {
            let Some((k, v)) = ann.split_once('=') else {
                return Err(err(format!("annotation {ann:?} is not key=value")));
            };
            let num = || {
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| err(format!("{k} needs a number, got {v:?}")))
            };
            match k.trim() {
                "derivations" => item.derivations = Some(num()?),
                "readings" => item.readings = Some(num()?),
                "src" => item.src = Some(v.trim().to_string()),
                other => return Err(err(format!("unknown annotation {other:?}"))),
            }
        }
        if !grammatical && (item.derivations.unwrap_or(0) > 0 || item.readings.unwrap_or(0) > 0) {
            return Err(err("an ungrammatical item cannot expect derivations".into()));
        }
        out.push(item);
    }
    Ok(out)
}
