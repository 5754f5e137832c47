use super::*;
use crate::engine::Solver;
use crate::term::render;

const SMALL: &str = r#"
% toy grammar
:- target S.
:- block p/2 blocks [1].
p(X, Y) :- X = Y.
q([cat:np, vc:-]).
lex(john, NP).
lex([walks], NP\S) :- true.
lex([says], (NP\S)/S).
lex(x, X) :- q(X), Y^Z = A^b, p(A, Y).
"#;

#[test]
fn parses_small_grammar() {
    let g = parse_grammar(SMALL).unwrap();
    assert_eq!(g.clauses.len(), 2);
    assert_eq!(g.lexicon.len(), 4);
    assert_eq!(g.blocks[0].watched, vec![1]);
    let p = g.into_program().unwrap();
    assert!(p.defines("p", 2));
    let mut st = Store::new();
    let t = expand_target(&p, &mut st);
    assert_eq!(render(&t, &st), "[cat:s]");
    let tv = {
        let mut m = vec![None; p.lexicon[2].clause.nvars];
        st.instantiate(p.lexicon[2].category(), &mut m)
    };
    assert_eq!(render(&tv, &st), "([cat:np]\\[cat:s])/[cat:s]");
}

#[test]
fn slashes_associate() {
    let g = parse_grammar(":- target S.\nlex(a, NP\\NP\\S).\nlex(b, S/NP/NP).\n").unwrap();
    let mut st = Store::new();
    let inst = |i: usize, st: &mut Store| {
        let mut m = vec![None; g.lexicon[i].clause.nvars];
        st.instantiate(g.lexicon[i].category(), &mut m)
    };
    let a = inst(0, &mut st);
    let b = inst(1, &mut st);
    assert_eq!(render(&a, &st), "[cat:np]\\([cat:np]\\[cat:s])");
    assert_eq!(render(&b, &st), "([cat:s]/[cat:np])/[cat:np]");
}

#[test]
fn mixed_slashes_rejected() {
    let e = parse_grammar(":- target S.\nlex(a, NP\\S/NP).\n").unwrap_err();
    assert!(matches!(e, GrammarError::Syntax { line: 2, .. }), "{e}");
}

#[test]
fn errors_have_positions() {
    let e = parse_grammar(":- target S.\nlex(a, [cat:np).\n").unwrap_err();
    let GrammarError::Syntax { line, col, .. } = e else {
        panic!()
    };
    assert_eq!((line, col), (2, 15));
    assert!(matches!(
        parse_grammar(":- target S.\n:- target NP.\n"),
        Err(GrammarError::DuplicateTarget { line: 2 })
    ));
    assert!(matches!(
        load_grammar(":- target S.\np(X) :- r(X).\n"),
        Err(GrammarError::UndefinedPredicate { line: 2, .. })
    ));
    assert!(matches!(
        load_grammar("p(a).\n"),
        Err(GrammarError::MissingTarget)
    ));
    assert!(matches!(
        parse_grammar(":- target S.\n:- block p/1 blocks [2].\n"),
        Err(GrammarError::BadBlock { .. })
    ));
}

#[test]
fn printer_round_trips() {
    let g = parse_grammar(SMALL).unwrap();
    let once = g.to_text();
    let twice = parse_grammar(&once).unwrap().to_text();
    assert_eq!(once, twice);
}

#[test]
fn backbone_lines() {
    let text = ":- target S.\nlex(a, S).\ncfg start V.\ncfg V -> NP V : ba.\ncfg lex NP : [a], [b, c].\ncfg lex V : a.\n";
    let g = parse_grammar(text).unwrap();
    let bb = g.backbone.clone().unwrap();
    assert_eq!(bb.rules[0].rule, RuleSchema::Ba);
    assert_eq!(bb.lexical.len(), 3);
    assert_eq!(parse_grammar(&g.to_text()).unwrap().to_text(), g.to_text());
    g.into_program().unwrap();
    let bad = ":- target S.\nlex(a, S).\ncfg start V.\ncfg V -> NP V : ba.\n";
    assert!(matches!(load_grammar(bad), Err(GrammarError::Backbone(_))));
}

#[test]
fn application_shares_vc_and_sem() {
    let p = load_grammar(":- target S.\nlex(a, S).\n").unwrap();
    let mut st = Store::new();
    let x = st.fresh();
    let np = st.record(vec![("cat", Node::atom("np")), ("vc", Node::atom("-"))]);
    let s = st.basic("s");
    let iv = st.functor(s, "\\", np.clone());
    let sem = Node::atom("walk");
    let iv = {
        let ext = st.record(vec![("sem", sem)]);
        assert!(st.unify(&iv, &ext));
        iv
    };
    assert!(apply_rule(RuleSchema::Fa, &iv, &np, &mut st).is_none());
    let v = apply_rule(RuleSchema::Ba, &iv, &np, &mut st).unwrap();
    assert_eq!(render(&v, &st), "[cat:s,sem:walk,vc:'-']");
    let _ = (x, Solver::new(&p, Store::new()));
}
