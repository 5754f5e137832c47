use std::io::Write;

use serde::Serialize;

use cug_core::{CorpusItem, ParseResult, Strategy};

use crate::{corpus, load, options, Fatal, JudgeArgs, StrategyArg};

#[derive(Serialize)]
struct StrategyRow {
    strategy: Strategy,
    derivation_count: usize,
    reading_count: usize,
    pass: bool,
}

#[derive(Serialize)]
struct Row<'a> {
    sentence: &'a str,
    expected_grammatical: bool,
    expected_derivations: Option<usize>,
    expected_readings: Option<usize>,
    results: Vec<StrategyRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    equivalent: Option<bool>,
    pass: bool,
}

fn matches(item: &CorpusItem, r: &ParseResult) -> bool {
    r.grammatical() == item.grammatical
        && item.derivations.is_none_or(|n| n == r.derivations.len())
        && item.readings.is_none_or(|n| n == r.readings().len())
}

pub(crate) fn cmd_judge(a: JudgeArgs) -> Result<u8, Fatal> {
    let program = load(&a.grammar)?;
    let items = corpus(&a.grammar, &a.corpus)?;
    let both = a.strategy == StrategyArg::Both;
    let mut out = std::io::stdout().lock();
    let mut failures = 0;
    for item in &items {
        let mut results = Vec::new();
        let mut rows = Vec::new();
        for s in a.strategy.strategies() {
            // unknown words count as "no derivation" here, with a diagnostic
            let r = cug_core::parse(&program, &item.sentence, &options(s)?)?;
            if !r.unknown.is_empty() {
                eprintln!(
                    "cug: line {}: unknown word(s) in '{}'",
                    item.line, item.sentence
                );
            }
            rows.push(StrategyRow {
                strategy: s,
                derivation_count: r.derivations.len(),
                reading_count: r.readings().len(),
                pass: matches(item, &r),
            });
            results.push(r);
        }
        let equivalent = both.then(|| results[0].signature() == results[1].signature());
        let pass = rows.iter().all(|r| r.pass) && equivalent != Some(false);
        if !pass {
            failures += 1;
        }
        if a.json {
            let row = Row {
                sentence: &item.sentence,
                expected_grammatical: item.grammatical,
                expected_derivations: item.derivations,
                expected_readings: item.readings,
                results: rows,
                equivalent,
                pass,
            };
            writeln!(out, "{}", serde_json::to_string(&row)?)?;
            continue;
        }
        let sign = if item.grammatical { '+' } else { '-' };
        for r in &rows {
            writeln!(
                out,
                "{} {:<6} {sign} {:<50} derivations={} readings={}",
                if r.pass { "PASS" } else { "FAIL" },
                r.strategy.name(),
                item.sentence,
                r.derivation_count,
                r.reading_count
            )?;
        }
        if let Some(eq) = equivalent {
            writeln!(
                out,
                "{} equiv  {sign} {}",
                if eq { "PASS" } else { "FAIL" },
                item.sentence
            )?;
            if !eq {
                counterexample(&results[0], &results[1], &mut out)?;
            }
        }
    }
    if !a.json {
        writeln!(
            out,
            "{} of {} entries passed",
            items.len() - failures,
            items.len()
        )?;
    }
    Ok(if failures == 0 { 0 } else { 1 })
}

/// Derivations found by only one of the two strategies.
fn counterexample(
    sr: &ParseResult,
    forest: &ParseResult,
    out: &mut impl Write,
) -> std::io::Result<()> {
    let (a, b) = (sr.signature(), forest.signature());
    writeln!(out, "  counterexample: {}", sr.sentence)?;
    for (name, mine, other) in [("sr", &a, &b), ("forest", &b, &a)] {
        for (tree, sem) in mine.iter().filter(|k| !other.contains(k)) {
            writeln!(out, "  only {name}:")?;
            for line in tree.lines() {
                writeln!(out, "    {line}")?;
            }
            writeln!(out, "    sem: {sem}")?;
        }
    }
    Ok(())
}
