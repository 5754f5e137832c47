use cug_core::engine::should_suspend;
use cug_core::fragments::load_fragment;
use cug_core::parser::{cf_parse, lexical_edges, recover, validate_backbone, DerivNode, ItemRule};
use cug_core::{
    load_grammar, parse, parse_grammar, Literal, ParseOptions, Solver, Store, Strategy,
};

fn traced() -> ParseOptions {
    ParseOptions {
        trace: true,
        ..ParseOptions::default()
    }
}

#[test]
fn adjunct_constraint_wakes_once_per_application() {
    let p = load_fragment("dutch-core").unwrap();
    let r = parse(&p, "johan opzettelijk een ongeluk veroorzaakt", &traced()).unwrap();
    assert_eq!(r.derivations.len(), 1);
    let events = &r.derivations[0].events;
    let wakes: Vec<_> = events.iter().filter(|e| e.is_wake()).collect();
    assert_eq!(wakes.len(), 3, "{events:#?}");
    // each wake follows a reduction that fed the verb an argument
    let mut reduces_before = Vec::new();
    let mut seen = 0;
    for e in events {
        match e {
            cug_core::Event::Reduce { .. } => seen += 1,
            cug_core::Event::Wake { .. } => reduces_before.push(seen),
            _ => {}
        }
    }
    assert_eq!(reduces_before, vec![2, 3, 4]);
}

/// Category skeleton: feature brackets dropped.
fn skeleton(cat: &str) -> String {
    let mut depth = 0;
    let mut out = String::new();
    for c in cat.chars() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            _ if depth == 0 => out.push(c),
            _ => {}
        }
    }
    out
}

fn leaf<'a>(n: &'a DerivNode, word: &str) -> Option<&'a DerivNode> {
    if n.words.as_deref() == Some(word) {
        return Some(n);
    }
    n.children.iter().find_map(|c| leaf(c, word))
}

#[test]
fn open_verb_category_is_fixed_by_the_context() {
    let mut p = load_fragment("dutch-core").unwrap();
    let extra = parse_grammar(":- target S.\nlex([verb], X).\n").unwrap();
    p.lexicon.extend(extra.lexicon);
    let r = parse(
        &p,
        "johan opzettelijk een ongeluk verb",
        &ParseOptions::default(),
    )
    .unwrap();
    let mut shapes: Vec<String> = r
        .derivations
        .iter()
        .map(|d| skeleton(&leaf(&d.tree, "verb").unwrap().category))
        .collect();
    shapes.sort();
    // the open verb may also take the noun before its determiner
    assert_eq!(shapes, [r"(n\((np/n)\(adj\(np\s))))", r"(np\(adj\(np\s)))"]);
}

#[test]
fn noun_phrase_alone_is_not_a_sentence() {
    let p = load_fragment("dutch-core").unwrap();
    let r = parse(&p, "johan", &traced()).unwrap();
    assert!(!r.grammatical());
}

#[test]
fn lexical_lookup_suspends_recursive_constraints() {
    let p = load_fragment("dutch-core").unwrap();
    let words = cug_core::parser::tokenize("veroorzaakt").unwrap();
    let edges = lexical_edges(&p, &words).unwrap();
    assert_eq!(edges.len(), 1);
    assert_eq!(edges[0].suspended.len(), 1);
    assert_eq!(edges[0].solutions, 1);

    let words = cug_core::parser::tokenize("de laatste tijd").unwrap();
    let edges = lexical_edges(&p, &words).unwrap();
    assert_eq!(edges.len(), 1);
    assert_eq!((edges[0].from, edges[0].to), (0, 3));
}

#[test]
fn block_on_third_argument() {
    let p = load_grammar(
        ":- target S.\n\
         :- block add_adjuncts/3 blocks [3].\n\
         add_adjuncts(X, X, _).\n",
    )
    .unwrap();
    let mut st = Store::new();
    let (a, b, c) = (st.fresh(), st.fresh(), st.fresh());
    let goal = Literal::new("add_adjuncts", vec![a.clone(), b.clone(), c.clone()]);
    assert_eq!(should_suspend(&goal, &p, &st), c.as_var());
    let np = st.basic("np");
    assert!(st.unify(&c, &np));
    assert_eq!(should_suspend(&goal, &p, &st), None);
}

#[test]
fn unknown_words_give_no_derivation() {
    let p = load_fragment("dutch-core").unwrap();
    for s in [Strategy::ShiftReduce, Strategy::Forest] {
        let opts = ParseOptions {
            strategy: s,
            ..ParseOptions::default()
        };
        let r = parse(&p, "johan slaapt", &opts).unwrap();
        assert!(!r.grammatical());
        assert_eq!(r.unknown.len(), 1);
    }
}

#[test]
fn forest_rejects_what_only_the_backbone_allows() {
    let p = load_fragment("dutch-core").unwrap();
    let words = cug_core::parser::tokenize("an wil bea kussen").unwrap();
    let bb = p.backbone.as_ref().unwrap();
    let items = cf_parse(bb, &words);
    assert!(!items.is_empty());
    let mut solver = Solver::new(&p, Store::new());
    assert!(recover(&mut solver, bb, &items, &words).unwrap().is_empty());
    assert!(recover(&mut solver, bb, &Default::default(), &words)
        .unwrap()
        .is_empty());
}

#[test]
fn crippled_backbone_is_reported() {
    let mut p = load_fragment("dutch-core").unwrap();
    let words = cug_core::parser::tokenize("johan opzettelijk een ongeluk veroorzaakt").unwrap();
    let r = cug_core::parser::parse_words(&p, &words, &ParseOptions::default()).unwrap();
    assert!(validate_backbone(&p, &words, &r.derivations).is_empty());
    let bb = p.backbone.as_mut().unwrap();
    bb.rules.retain(|r| r.rhs[0].as_ref() != "ADJ");
    assert_eq!(validate_backbone(&p, &words, &r.derivations).len(), 1);
    assert!(validate_backbone(&p, &words, &[]).is_empty());
}

#[test]
fn single_word_forest() {
    let p = load_fragment("dutch-core").unwrap();
    let words = cug_core::parser::tokenize("kussen").unwrap();
    let items = cf_parse(p.backbone.as_ref().unwrap(), &words);
    assert_eq!(items.len(), 1);
    assert!(items.iter().all(|i| i.rule == ItemRule::Lex));
}
