use std::collections::HashMap;

use super::lexer::{tokenize, Tok, Token};
use super::{DslError, ParseError, SourceSpan, ValidationError};
use crate::multiset::{Alphabet, Multiset};
use crate::petri::{TimedPetriNet, Transition};
use crate::psystem::{Label, MembraneStructure, ModelError, Rule, Target, TimedPSystem};

/// Bound on membrane nesting, so hostile input cannot exhaust the stack.
const MAX_NESTING: usize = 256;

struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

fn invalid(span: SourceSpan, message: impl Into<String>) -> DslError {
    DslError::Validation(ValidationError {
        span: Some(span),
        message: message.into(),
    })
}

impl Cursor {
    fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Cursor {
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str], message: &str) -> ParseError {
        ParseError {
            span: self.span(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
            message: message.into(),
        }
    }

    fn is_word(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, message: &str) -> Result<SourceSpan, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            Err(self.error(&[&tok.describe()], message))
        }
    }

    fn keyword(&mut self, word: &str) -> Result<SourceSpan, ParseError> {
        if self.is_word(word) {
            Ok(self.bump().span)
        } else {
            Err(self.error(&[&format!("`{word}`")], "unexpected token"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, SourceSpan), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump().span)),
            _ => Err(self.error(&[what], "unexpected token")),
        }
    }

    fn int(&mut self, what: &str) -> Result<(u64, SourceSpan), ParseError> {
        match *self.peek() {
            Tok::Int(n) => Ok((n, self.bump().span)),
            _ => Err(self.error(&[what], "unexpected token")),
        }
    }

    fn small(&mut self, what: &str, min: u64) -> Result<u32, ParseError> {
        let span = self.span();
        let (n, _) = self.int(what)?;
        match u32::try_from(n) {
            Ok(v) if n >= min => Ok(v),
            _ => Err(ParseError {
                span,
                expected: vec![format!("{what} in {min}..=4294967295")],
                found: format!("integer `{n}`"),
                message: "value out of range".into(),
            }),
        }
    }

    fn positive(&mut self, what: &str) -> Result<u64, ParseError> {
        let span = self.span();
        let (n, _) = self.int(what)?;
        if n == 0 {
            return Err(ParseError {
                span,
                expected: vec![format!("{what} >= 1")],
                found: "integer `0`".into(),
                message: "value must be positive".into(),
            });
        }
        Ok(n)
    }

    fn end(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error(&["end of input"], "trailing input after model"))
        }
    }

    /// `eps` or one or more `name[^n]` factors.
    fn multiset(&mut self, alphabet: &Alphabet) -> Result<Multiset, DslError> {
        if self.is_word("eps") {
            self.bump();
            return Ok(Multiset::new());
        }
        if !matches!(self.peek(), Tok::Ident(_)) {
            return Err(self.error(&["symbol", "`eps`"], "expected a multiset").into());
        }
        let mut m = Multiset::new();
        while let Tok::Ident(name) = self.peek().clone() {
            if name == "eps" {
                return Err(self.error(&["symbol"], "`eps` cannot be combined with other factors").into());
            }
            let span = self.bump().span;
            let sym = alphabet
                .get(&name)
                .ok_or_else(|| invalid(span, format!("symbol `{name}` is not in the alphabet")))?;
            let n = if self.eat(&Tok::Caret) { self.positive("exponent")? } else { 1 };
            m.insert(sym, n).map_err(|_| invalid(span, "multiplicity overflow"))?;
        }
        Ok(m)
    }
}

struct Membrane {
    label: Label,
    parent: Option<Label>,
    contents: Multiset,
    span: SourceSpan,
}

struct Spanned<T> {
    value: T,
    span: SourceSpan,
}

struct PBuilder {
    alphabet: Alphabet,
    membranes: Vec<Membrane>,
    rules: Vec<Spanned<Rule>>,
}

impl PBuilder {
    fn membrane(&mut self, cur: &mut Cursor, parent: Option<Label>, depth: usize) -> Result<(), DslError> {
        if depth > MAX_NESTING {
            return Err(cur.error(&["`}`"], "membranes nested too deeply").into());
        }
        let span = cur.keyword("membrane")?;
        let label = cur.small("membrane label", 1)?;
        if let Some(m) = self.membranes.iter().find(|m| m.label == label) {
            let first = m.span;
            return Err(invalid(span, format!("membrane label {label} already declared at {first}")));
        }
        self.membranes.push(Membrane {
            label,
            parent,
            contents: Multiset::new(),
            span,
        });
        let me = self.membranes.len() - 1;
        cur.expect(Tok::LBrace, "membrane body")?;
        let mut seen_contents = false;
        loop {
            if cur.eat(&Tok::RBrace) {
                return Ok(());
            }
            if cur.is_word("contents") {
                let span = cur.bump().span;
                if seen_contents {
                    return Err(invalid(span, format!("membrane {label} has two contents declarations")));
                }
                seen_contents = true;
                self.membranes[me].contents = cur.multiset(&self.alphabet)?;
                cur.expect(Tok::Semi, "end of contents")?;
            } else if cur.is_word("rule") {
                self.rule(cur, Some(label))?;
            } else if cur.is_word("membrane") {
                self.membrane(cur, Some(label), depth + 1)?;
            } else {
                return Err(cur
                    .error(&["`contents`", "`rule`", "`membrane`", "`}`"], "unexpected token in membrane")
                    .into());
            }
        }
    }

    fn rule(&mut self, cur: &mut Cursor, enclosing: Option<Label>) -> Result<(), DslError> {
        let span = cur.keyword("rule")?;
        let (name, _) = cur.ident("rule name")?;
        let home = if cur.is_word("in") {
            cur.bump();
            cur.small("membrane label", 1)?
        } else if let Some(l) = enclosing {
            l
        } else {
            return Err(cur.error(&["`in`"], "rules outside a membrane must name their membrane").into());
        };
        cur.expect(Tok::Colon, "after rule name")?;
        let lhs = cur.multiset(&self.alphabet)?;
        cur.expect(Tok::Arrow, "between left- and right-hand side")?;
        let mut rule = Rule::new(name, home, lhs, 0);
        if cur.is_word("eps") {
            cur.bump();
        } else {
            if *cur.peek() != Tok::LParen {
                return Err(cur.error(&["`(`", "`eps`"], "expected right-hand side").into());
            }
            while cur.eat(&Tok::LParen) {
                let objects = cur.multiset(&self.alphabet)?;
                cur.expect(Tok::Comma, "between objects and target")?;
                let target = if cur.is_word("here") {
                    cur.bump();
                    Target::Here
                } else if cur.is_word("out") {
                    cur.bump();
                    Target::Out
                } else if cur.is_word("in") {
                    cur.bump();
                    Target::In(cur.small("membrane label", 1)?)
                } else {
                    return Err(cur.error(&["`here`", "`out`", "`in`"], "expected target").into());
                };
                cur.expect(Tok::RParen, "after target")?;
                rule.push_message(objects, target)
                    .map_err(|_| invalid(span, "multiplicity overflow"))?;
            }
        }
        if cur.eat(&Tok::At) {
            rule.delay = cur.small("delay", 0)?;
        }
        cur.expect(Tok::Semi, "end of rule")?;
        self.rules.push(Spanned { value: rule, span });
        Ok(())
    }

    fn build(self) -> Result<TimedPSystem, DslError> {
        let pairs: Vec<(Label, Option<Label>)> = self.membranes.iter().map(|m| (m.label, m.parent)).collect();
        let structure = MembraneStructure::new(&pairs).map_err(|e| self.explain(e))?;
        let mut initial = vec![Multiset::new(); structure.len()];
        for m in &self.membranes {
            initial[structure.index_of(m.label).expect("declared")] = m.contents.clone();
        }
        let rules = self.rules.iter().map(|r| r.value.clone()).collect();
        TimedPSystem::new(self.alphabet.clone(), structure, initial, rules).map_err(|e| self.explain(e))
    }

    fn explain(&self, e: ModelError) -> DslError {
        let rule_span = |name: &str| self.rules.iter().find(|r| r.value.name == name).map(|r| r.span);
        let span = match &e {
            ModelError::EmptyLhs(name) => rule_span(name),
            ModelError::DuplicateRule(name) => self.rules.iter().filter(|r| r.value.name == *name).nth(1).map(|r| r.span),
            ModelError::NoSuchChild { home, child } => self
                .rules
                .iter()
                .find(|r| r.value.home == *home && r.value.rhs.contains_key(&Target::In(*child)))
                .map(|r| r.span),
            ModelError::UnknownMembrane(l) => self.rules.iter().find(|r| r.value.home == *l).map(|r| r.span),
            _ => None,
        };
        DslError::Validation(ValidationError {
            span,
            message: e.to_string(),
        })
    }
}

/// Parses and validates a membrane system.
pub fn parse_psystem(src: &str) -> Result<TimedPSystem, DslError> {
    let mut cur = Cursor::new(src)?;
    cur.keyword("psystem")?;
    cur.expect(Tok::LBrace, "model body")?;
    cur.keyword("alphabet")?;
    let mut alphabet = Alphabet::new();
    while let Tok::Ident(name) = cur.peek().clone() {
        let span = cur.bump().span;
        if name == "eps" {
            return Err(invalid(span, "`eps` is reserved for the empty multiset"));
        }
        if alphabet.get(&name).is_some() {
            return Err(invalid(span, format!("symbol `{name}` declared twice")));
        }
        alphabet.intern(name);
    }
    cur.expect(Tok::Semi, "end of alphabet")?;
    let mut b = PBuilder {
        alphabet,
        membranes: Vec::new(),
        rules: Vec::new(),
    };
    if !cur.is_word("membrane") {
        return Err(cur.error(&["`membrane`"], "a system needs a skin membrane").into());
    }
    b.membrane(&mut cur, None, 0)?;
    loop {
        if cur.eat(&Tok::RBrace) {
            break;
        }
        if cur.is_word("rule") {
            b.rule(&mut cur, None)?;
        } else if cur.is_word("membrane") {
            return Err(invalid(cur.span(), "a system has exactly one skin membrane"));
        } else {
            return Err(cur.error(&["`rule`", "`}`"], "unexpected token after membrane tree").into());
        }
    }
    cur.end()?;
    b.build()
}

#[derive(Default)]
struct NetDraft {
    places: Vec<String>,
    transitions: Vec<Transition>,
    marking: HashMap<String, (u64, SourceSpan)>,
    declared: HashMap<String, SourceSpan>,
    arcs: Vec<(String, SourceSpan, u64, String, SourceSpan)>,
}

impl NetDraft {
    fn declare(&mut self, name: &str, span: SourceSpan) -> Result<(), DslError> {
        if let Some(first) = self.declared.insert(name.to_string(), span) {
            return Err(invalid(span, format!("name `{name}` already declared at {first}")));
        }
        Ok(())
    }

    fn build(self) -> Result<TimedPetriNet, DslError> {
        let place_ids: HashMap<&str, usize> = self.places.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
        let trans_ids: HashMap<String, usize> =
            self.transitions.iter().enumerate().map(|(i, t)| (t.name.clone(), i)).collect();
        let mut transitions = self.transitions.clone();
        for (from, fspan, w, to, tspan) in &self.arcs {
            let (p, t, input) = match (place_ids.get(from.as_str()), trans_ids.get(to), trans_ids.get(from), place_ids.get(to.as_str())) {
                (Some(&p), Some(&t), _, _) => (p, t, true),
                (_, _, Some(&t), Some(&p)) => (p, t, false),
                (None, _, None, _) => return Err(invalid(*fspan, format!("`{from}` is not a declared place or transition"))),
                (_, None, _, None) => return Err(invalid(*tspan, format!("`{to}` is not a declared place or transition"))),
                _ => return Err(invalid(*fspan, "arcs connect a place and a transition")),
            };
            let arcs = if input { &transitions[t].inputs } else { &transitions[t].outputs };
            let old = arcs.iter().find(|a| a.0 == p).map_or(0, |a| a.1);
            if old.checked_add(*w).is_none() {
                return Err(invalid(*fspan, "arc weight overflow"));
            }
            if input {
                transitions[t].add_input(p, *w);
            } else {
                transitions[t].add_output(p, *w);
            }
        }
        let mut initial = vec![0; self.places.len()];
        for (name, &(n, span)) in &self.marking {
            match place_ids.get(name.as_str()) {
                Some(&p) => initial[p] = n,
                None => return Err(invalid(span, format!("`{name}` is not a declared place"))),
            }
        }
        let places = self.places.clone();
        TimedPetriNet::new(places, transitions, initial).map_err(|e| {
            let span = match &e {
                crate::petri::NetError::EmptyPreset(name) | crate::petri::NetError::DuplicateName(name) => {
                    self.declared.get(name).copied()
                }
                _ => None,
            };
            DslError::Validation(ValidationError {
                span,
                message: e.to_string(),
            })
        })
    }
}

/// Parses and validates a timed net with localities.
pub fn parse_petri(src: &str) -> Result<TimedPetriNet, DslError> {
    let mut cur = Cursor::new(src)?;
    cur.keyword("petri")?;
    cur.expect(Tok::LBrace, "model body")?;
    let mut d = NetDraft::default();
    loop {
        if cur.eat(&Tok::RBrace) {
            break;
        }
        let statement = matches!(cur.peek2(), Tok::Ident(_) | Tok::Semi);
        if statement && cur.is_word("place") {
            cur.bump();
            let (name, span) = cur.ident("place name")?;
            d.declare(&name, span)?;
            d.places.push(name);
            while let Tok::Ident(name) = cur.peek().clone() {
                let span = cur.bump().span;
                d.declare(&name, span)?;
                d.places.push(name);
            }
            cur.expect(Tok::Semi, "end of place declaration")?;
        } else if statement && cur.is_word("transition") {
            cur.bump();
            let (name, span) = cur.ident("transition name")?;
            d.declare(&name, span)?;
            let delay = if cur.eat(&Tok::At) { cur.small("delay", 0)? } else { 0 };
            let locality = if cur.is_word("loc") {
                cur.bump();
                cur.expect(Tok::Eq, "after `loc`")?;
                cur.small("locality", 0)?
            } else {
                1
            };
            cur.expect(Tok::Semi, "end of transition declaration")?;
            d.transitions.push(Transition::new(name, locality, delay));
        } else if statement && cur.is_word("marking") {
            cur.bump();
            while let Tok::Ident(name) = cur.peek().clone() {
                let span = cur.bump().span;
                cur.expect(Tok::Eq, "after place in marking")?;
                let (n, _) = cur.int("token count")?;
                if d.marking.insert(name.clone(), (n, span)).is_some() {
                    return Err(invalid(span, format!("place `{name}` marked twice")));
                }
            }
            cur.expect(Tok::Semi, "end of marking")?;
        } else if let Tok::Ident(_) = cur.peek() {
            let (from, fspan) = cur.ident("place or transition")?;
            let w = if cur.eat(&Tok::Dash) {
                let w = cur.positive("arc weight")?;
                cur.expect(Tok::Arrow, "after arc weight")?;
                w
            } else if cur.eat(&Tok::Arrow) {
                1
            } else {
                return Err(cur.error(&["`-`", "`->`"], "expected an arc").into());
            };
            let (to, tspan) = cur.ident("place or transition")?;
            cur.expect(Tok::Semi, "end of arc")?;
            d.arcs.push((from, fspan, w, to, tspan));
        } else {
            return Err(cur
                .error(&["`place`", "`transition`", "`marking`", "arc", "`}`"], "unexpected token in net")
                .into());
        }
    }
    cur.end()?;
    d.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    const TWO: &str = "psystem { alphabet a b; membrane 1 { contents a b; rule r1: b -> (b, in 2) @0; \
                       membrane 2 { contents a^2 b; rule r2: a -> (a, out) @2; } } }";

    #[test]
    fn parses_two_membrane_example() {
        assert_eq!(parse_psystem(TWO).unwrap(), samples::two_membrane_system());
    }

    #[test]
    fn empty_single_membrane() {
        let s = parse_psystem("psystem { alphabet a; membrane 1 { contents eps; } }").unwrap();
        assert_eq!(s.structure().len(), 1);
        assert!(s.rules().is_empty());
        assert!(s.initial_contents()[0].is_empty());
    }

    #[test]
    fn in_target_to_non_child_is_invalid() {
        let e = parse_psystem("psystem { alphabet a b; membrane 1 { rule r: a -> (b, in 3) @1; } }").unwrap_err();
        match e {
            DslError::Validation(v) => {
                assert!(v.message.contains("no child membrane 3"), "{v}");
                assert_eq!(v.span.unwrap().line, 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn top_level_rules_need_a_home() {
        let ok = parse_psystem(
            "psystem { alphabet a; membrane 1 { membrane 2 { } } rule x in 2: a -> eps; rule y in 1: a -> eps; }",
        )
        .unwrap();
        assert_eq!(ok.rules()[0].home, 2);
        assert!(matches!(
            parse_psystem("psystem { alphabet a; membrane 1 { } rule x: a -> eps; }"),
            Err(DslError::Parse(_))
        ));
    }

    #[test]
    fn duplicate_labels_and_unknown_symbols() {
        let e = parse_psystem("psystem { alphabet a; membrane 1 { membrane 1 { } } }").unwrap_err();
        assert!(matches!(e, DslError::Validation(_)));
        let e = parse_psystem("psystem { alphabet a; membrane 1 { contents z; } }").unwrap_err();
        assert!(e.to_string().contains("`z`"));
    }

    #[test]
    fn parse_errors_name_expectations() {
        let e = parse_psystem("psystem { alphabet a; membrane 1 { contents a } }").unwrap_err();
        let DslError::Parse(p) = e else { panic!() };
        assert!(p.expected.iter().any(|x| x.contains(';')));
        assert_eq!(p.found, "`}`");
    }

    const NET: &str = "petri {
        place a_1 a_2 b_1 b_2;
        transition tr_r1_1 @0 loc=1;
        transition tr_r2_2 @2 loc=2;
        b_1 -1-> tr_r1_1; tr_r1_1 -1-> b_2;
        a_2 -1-> tr_r2_2; tr_r2_2 -1-> a_1;
        marking a_1=1 a_2=2 b_1=1 b_2=1;
    }";

    #[test]
    fn parses_two_membrane_net() {
        assert_eq!(parse_petri(NET).unwrap(), samples::two_membrane_net());
    }

    #[test]
    fn net_without_transitions_is_dead() {
        let n = parse_petri("petri { place p; marking p=3; }").unwrap();
        assert!(n.is_dead(&n.initial_state()));
    }

    #[test]
    fn undeclared_arc_endpoint_is_invalid() {
        let e = parse_petri("petri { place p; transition t; p -> t; t -> q; }").unwrap_err();
        let DslError::Validation(v) = e else { panic!() };
        assert!(v.message.contains("`q`"));
        assert!(parse_petri("petri { place p q; transition t; p -> q; }").is_err());
        assert!(parse_petri("petri { place p; transition t; }").is_err());
    }

    #[test]
    fn keywords_can_still_name_places() {
        let n = parse_petri("petri { place place; transition marking; place -> marking; }").unwrap();
        assert_eq!(n.places(), ["place"]);
        assert_eq!(n.transitions()[0].inputs, vec![(0, 1)]);
    }
}
