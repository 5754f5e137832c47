//! Lexer and recursive-descent parser for grammar files.

use std::collections::HashMap;

use super::{Backbone, BackboneRule, GrammarError, GrammarSource, RuleSchema};
use crate::engine::{BlockDecl, Clause, LexEntry, Literal, Template};
use crate::term::{sym, Node, Sym, VarId};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Atom(String),
    Quoted(String),
    Var(String),
    Int(usize),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Colon,
    Neck,
    Arrow,
    Dot,
    Backslash,
    Slash,
    Caret,
    Eq,
    Plus,
    Minus,
    Eof,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, GrammarError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, msg: String| GrammarError::Syntax { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                advance(1, &mut i, &mut col);
                continue;
            }
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            _ => {}
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '\\' => Tok::Backslash,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '=' => Tok::Eq,
            '+' => Tok::Plus,
            ':' if chars.get(i + 1) == Some(&'-') => {
                advance(1, &mut i, &mut col);
                Tok::Neck
            }
            ':' => Tok::Colon,
            '-' if chars.get(i + 1) == Some(&'>') => {
                advance(1, &mut i, &mut col);
                Tok::Arrow
            }
            '-' => Tok::Minus,
            '\'' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j] != '\'' && chars[j] != '\n' {
                    j += 1;
                }
                if j >= chars.len() || chars[j] != '\'' {
                    return Err(err(l0, c0, "unterminated quoted atom".into()));
                }
                let s: String = chars[start..j].iter().collect();
                advance(j - i, &mut i, &mut col);
                Tok::Quoted(s)
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                advance(j - i - 1, &mut i, &mut col);
                Tok::Int(s.parse().unwrap())
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                advance(j - i - 1, &mut i, &mut col);
                if c.is_uppercase() || c == '_' {
                    Tok::Var(s)
                } else {
                    Tok::Atom(s)
                }
            }
            other => return Err(err(l0, c0, format!("unexpected character {other:?}"))),
        };
        advance(1, &mut i, &mut col);
        out.push(Spanned {
            tok,
            line: l0,
            col: c0,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

/// Macros standing for typed variables: a fresh open record of that category.
const MACROS: [(&str, &str); 4] = [("S", "s"), ("NP", "np"), ("ADJ", "adj"), ("N", "n")];

/// Clause-local variable numbering.
#[derive(Default)]
struct Scope {
    names: HashMap<String, usize>,
    count: usize,
}

impl Scope {
    fn fresh(&mut self) -> VarId {
        self.count += 1;
        VarId((self.count - 1) as u32)
    }

    fn named(&mut self, name: &str) -> VarId {
        if name == "_" {
            return self.fresh();
        }
        if let Some(&id) = self.names.get(name) {
            return VarId(id as u32);
        }
        let v = self.fresh();
        self.names.insert(name.to_string(), v.0 as usize);
        v
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = Result<T, GrammarError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn line(&self) -> usize {
        self.toks[self.pos].line
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let s = &self.toks[self.pos];
        Err(GrammarError::Syntax {
            line: s.line,
            col: s.col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> PResult<()> {
        if *self.peek() == t {
            self.next();
            Ok(())
        } else {
            self.error(format!("expected {what}, found {:?}", self.peek()))
        }
    }

    fn atom_name(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Atom(a) | Tok::Quoted(a) => {
                self.next();
                Ok(a)
            }
            other => self.error(format!("expected {what}, found {other:?}")),
        }
    }

    fn symbol(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Atom(a) | Tok::Quoted(a) | Tok::Var(a) => {
                self.next();
                Ok(a)
            }
            other => self.error(format!("expected {what}, found {other:?}")),
        }
    }

    // ---- terms -------------------------------------------------------

    fn term(&mut self, sc: &mut Scope) -> PResult<Node> {
        let left = self.slash_term(sc)?;
        if *self.peek() == Tok::Caret {
            self.next();
            let right = self.term(sc)?;
            return Ok(Node::caret(left, right));
        }
        Ok(left)
    }

    fn slash_term(&mut self, sc: &mut Scope) -> PResult<Node> {
        let first = self.primary(sc)?;
        let op = match self.peek() {
            Tok::Backslash => Tok::Backslash,
            Tok::Slash => Tok::Slash,
            _ => return Ok(first),
        };
        let mut operands = vec![first];
        while *self.peek() == op {
            self.next();
            operands.push(self.primary(sc)?);
        }
        if matches!(self.peek(), Tok::Backslash | Tok::Slash) {
            return self.error("mixed '\\' and '/' must be parenthesized");
        }
        let functor = |val: Node, dir: &str, arg: Node, sc: &mut Scope| {
            Node::record(
                vec![
                    (sym("val"), val),
                    (sym("dir"), Node::atom(dir)),
                    (sym("arg"), arg),
                ],
                sc.fresh(),
            )
        };
        if op == Tok::Backslash {
            // A\B\C = A\(B\C): arguments on the left, result on the right.
            let mut it = operands.into_iter().rev();
            let mut acc = it.next().unwrap();
            for arg in it {
                acc = functor(acc, "\\", arg, sc);
            }
            Ok(acc)
        } else {
            // A/B/C = (A/B)/C
            let mut it = operands.into_iter();
            let mut acc = it.next().unwrap();
            for arg in it {
                acc = functor(acc, "/", arg, sc);
            }
            Ok(acc)
        }
    }

    fn primary(&mut self, sc: &mut Scope) -> PResult<Node> {
        match self.peek().clone() {
            Tok::Var(name) => {
                self.next();
                if let Some((_, cat)) = MACROS.iter().find(|(m, _)| *m == name) {
                    return Ok(Node::record(
                        vec![(sym("cat"), Node::atom(cat))],
                        sc.fresh(),
                    ));
                }
                Ok(Node::Var(sc.named(&name)))
            }
            Tok::Atom(name) => {
                self.next();
                if *self.peek() == Tok::LParen {
                    self.next();
                    let args = self.args(sc)?;
                    return Ok(Node::compound(&name, args));
                }
                Ok(Node::atom(&name))
            }
            Tok::Quoted(name) => {
                self.next();
                Ok(Node::atom(&name))
            }
            Tok::Plus => {
                self.next();
                Ok(Node::atom("+"))
            }
            Tok::Minus => {
                self.next();
                Ok(Node::atom("-"))
            }
            Tok::LParen => {
                self.next();
                let t = self.term(sc)?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            Tok::LBrack => {
                self.next();
                let mut feats: Vec<(Sym, Node)> = Vec::new();
                if *self.peek() != Tok::RBrack {
                    loop {
                        let name = self.atom_name("feature name")?;
                        if feats.iter().any(|(k, _)| **k == *name) {
                            return self.error(format!("duplicate feature '{name}'"));
                        }
                        let value = match self.next() {
                            Tok::Colon => self.term(sc)?,
                            // `vc:-` lexes as a neck
                            Tok::Neck => Node::atom("-"),
                            other => return self.error(format!("expected ':', found {other:?}")),
                        };
                        feats.push((sym(&name), value));
                        if *self.peek() == Tok::Comma {
                            self.next();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RBrack, "']'")?;
                Ok(Node::record(feats, sc.fresh()))
            }
            other => self.error(format!("expected a term, found {other:?}")),
        }
    }

    fn args(&mut self, sc: &mut Scope) -> PResult<Vec<Node>> {
        let mut args = Vec::new();
        if *self.peek() == Tok::RParen {
            self.next();
            return Ok(args);
        }
        loop {
            args.push(self.term(sc)?);
            match self.next() {
                Tok::Comma => continue,
                Tok::RParen => return Ok(args),
                other => return self.error(format!("expected ',' or ')', found {other:?}")),
            }
        }
    }

    fn literal(&mut self, sc: &mut Scope) -> PResult<Literal> {
        if let Tok::Atom(name) = self.peek().clone() {
            if !matches!(self.peek_at(1), Tok::Eq) {
                self.next();
                let args = if *self.peek() == Tok::LParen {
                    self.next();
                    self.args(sc)?
                } else {
                    Vec::new()
                };
                return Ok(Literal::new(&name, args));
            }
        }
        let left = self.term(sc)?;
        self.expect(Tok::Eq, "'=' or a predicate call")?;
        let right = self.term(sc)?;
        Ok(Literal::new("=", vec![left, right]))
    }

    fn body(&mut self, sc: &mut Scope) -> PResult<Vec<Literal>> {
        let mut body = Vec::new();
        if *self.peek() == Tok::Neck {
            self.next();
            loop {
                body.push(self.literal(sc)?);
                if *self.peek() == Tok::Comma {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::Dot, "'.'")?;
        Ok(body)
    }

    fn token_list(&mut self) -> PResult<Vec<Sym>> {
        match self.peek().clone() {
            Tok::Atom(a) | Tok::Quoted(a) => {
                self.next();
                Ok(vec![sym(&a)])
            }
            Tok::LBrack => {
                self.next();
                let mut toks = Vec::new();
                loop {
                    toks.push(sym(&self.atom_name("word")?));
                    match self.next() {
                        Tok::Comma => continue,
                        Tok::RBrack => break,
                        other => {
                            return self.error(format!("expected ',' or ']', found {other:?}"))
                        }
                    }
                }
                Ok(toks)
            }
            other => self.error(format!("expected a word list, found {other:?}")),
        }
    }

    // ---- statements --------------------------------------------------

    fn directive(&mut self, g: &mut GrammarSource) -> PResult<()> {
        let line = self.line();
        let name = self.atom_name("directive name")?;
        match name.as_str() {
            "target" => {
                let mut sc = Scope::default();
                let node = self.term(&mut sc)?;
                self.expect(Tok::Dot, "'.'")?;
                if g.target.is_some() {
                    return Err(GrammarError::DuplicateTarget { line });
                }
                g.target = Some(Template {
                    node,
                    nvars: sc.count,
                });
            }
            "block" => {
                let pred = self.atom_name("predicate name")?;
                self.expect(Tok::Slash, "'/'")?;
                let Tok::Int(arity) = self.next() else {
                    return self.error("expected arity");
                };
                match self.next() {
                    Tok::Atom(k) if k == "blocks" => {}
                    _ => return self.error("expected 'blocks'"),
                }
                self.expect(Tok::LBrack, "'['")?;
                let mut watched = Vec::new();
                loop {
                    match self.next() {
                        Tok::Int(i) => watched.push(i),
                        _ => return self.error("expected argument position"),
                    }
                    match self.next() {
                        Tok::Comma => continue,
                        Tok::RBrack => break,
                        _ => return self.error("expected ',' or ']'"),
                    }
                }
                self.expect(Tok::Dot, "'.'")?;
                if watched.iter().any(|&w| w == 0 || w > arity) {
                    return Err(GrammarError::BadBlock {
                        line,
                        msg: format!("positions {watched:?} out of range for {pred}/{arity}"),
                    });
                }
                if g.blocks
                    .iter()
                    .any(|b| *b.pred == *pred && b.arity == arity)
                {
                    return Err(GrammarError::BadBlock {
                        line,
                        msg: format!("second block declaration for {pred}/{arity}"),
                    });
                }
                g.blocks.push(BlockDecl {
                    pred: sym(&pred),
                    arity,
                    watched,
                });
            }
            "rules" => {
                self.expect(Tok::LBrack, "'['")?;
                let mut rules = Vec::new();
                loop {
                    let r = self.atom_name("rule name")?;
                    match RuleSchema::from_name(&r) {
                        Some(rule) => rules.push(rule),
                        None => return self.error(format!("unknown rule '{r}'")),
                    }
                    match self.next() {
                        Tok::Comma => continue,
                        Tok::RBrack => break,
                        _ => return self.error("expected ',' or ']'"),
                    }
                }
                self.expect(Tok::Dot, "'.'")?;
                g.rules = rules;
            }
            other => return self.error(format!("unknown directive '{other}'")),
        }
        Ok(())
    }

    fn cfg(&mut self, bb: &mut Backbone) -> PResult<()> {
        let line = self.line();
        let first = self.symbol("backbone symbol")?;
        match (first.as_str(), self.peek().clone()) {
            ("lex", Tok::Var(_) | Tok::Atom(_)) => {
                let pre = self.symbol("preterminal")?;
                self.expect(Tok::Colon, "':'")?;
                loop {
                    let words = self.token_list()?;
                    bb.lexical.push((sym(&pre), words));
                    match self.next() {
                        Tok::Comma => continue,
                        Tok::Dot => break,
                        _ => return self.error("expected ',' or '.'"),
                    }
                }
            }
            ("start", Tok::Var(_) | Tok::Atom(_)) => {
                bb.start = Some(sym(&self.symbol("start symbol")?));
                self.expect(Tok::Dot, "'.'")?;
            }
            (_, Tok::Arrow) => {
                self.next();
                let mut rhs = Vec::new();
                while matches!(self.peek(), Tok::Var(_) | Tok::Atom(_)) {
                    rhs.push(sym(&self.symbol("symbol")?));
                }
                self.expect(Tok::Colon, "':'")?;
                let name = self.atom_name("rule name")?;
                let Some(rule) = RuleSchema::from_name(&name) else {
                    return self.error(format!("unknown rule '{name}'"));
                };
                self.expect(Tok::Dot, "'.'")?;
                if rhs.len() != 2 {
                    return Err(GrammarError::BadBackbone {
                        line,
                        msg: format!("{name} rules are binary, got {} daughters", rhs.len()),
                    });
                }
                bb.rules.push(BackboneRule {
                    lhs: sym(&first),
                    rhs,
                    rule,
                });
            }
            (_, other) => return self.error(format!("malformed cfg line at {other:?}")),
        }
        Ok(())
    }

    fn clause(&mut self, g: &mut GrammarSource) -> PResult<()> {
        let line = self.line();
        let mut sc = Scope::default();
        if matches!(self.peek(), Tok::Atom(a) if a == "lex") && *self.peek_at(1) == Tok::LParen {
            self.next();
            self.next();
            let tokens = self.token_list()?;
            self.expect(Tok::Comma, "','")?;
            let cat = self.term(&mut sc)?;
            self.expect(Tok::RParen, "')'")?;
            let body = self.body(&mut sc)?;
            g.lexicon.push(LexEntry {
                tokens,
                clause: Clause {
                    head: Literal::new("lex", vec![cat]),
                    body,
                    nvars: sc.count,
                },
            });
            g.lex_lines.push(line);
            return Ok(());
        }
        let head = self.literal(&mut sc)?;
        if &*head.pred == "=" {
            return Err(GrammarError::Syntax {
                line,
                col: 1,
                msg: "a clause head cannot be '='".into(),
            });
        }
        let body = self.body(&mut sc)?;
        g.clauses.push(Clause {
            head,
            body,
            nvars: sc.count,
        });
        g.clause_lines.push(line);
        Ok(())
    }
}

pub(super) fn parse(text: &str) -> Result<GrammarSource, GrammarError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let mut g = GrammarSource::default();
    let mut bb = Backbone::default();
    loop {
        match p.peek().clone() {
            Tok::Eof => break,
            Tok::Neck => {
                p.next();
                p.directive(&mut g)?;
            }
            Tok::Atom(a) if a == "cfg" && !matches!(p.peek_at(1), Tok::LParen) => {
                p.next();
                p.cfg(&mut bb)?;
            }
            _ => p.clause(&mut g)?,
        }
    }
    if !bb.rules.is_empty() || !bb.lexical.is_empty() || bb.start.is_some() {
        g.backbone = Some(bb);
    }
    Ok(g)
}
