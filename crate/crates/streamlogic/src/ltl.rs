//! Temporal formulas over partial streams and their reference evaluator.
//!
//! The connectives are atoms, the boolean ones, next, until, and weak until.
//! Eventually and always are surface syntax only: `F x` desugars to
//! `true U x` and `G x` to `x W false` at construction time.
//!
//! Satisfaction is defined over arbitrary partial streams: an atom `a` holds
//! when position 0 carries the letter `a` (so it fails on an undefined
//! position), `X` shifts by one, `U` demands a witness suffix with the left
//! argument holding before it, and `W` also accepts the limit case where the
//! left argument holds forever. On a lasso stream every suffix is one of
//! finitely many, which makes [`LtlFormula::evaluate`] a terminating exact
//! check: until and weak until are computed as least and greatest fixpoints
//! over the suffix space.

use std::fmt;

use crate::stream::{Alphabet, LiftedLetter, UPStream};
use crate::ParseError;

/// Syntactic strata ordered by inclusion.
///
/// `Layer0` has atoms, the boolean connectives, and next; `G` adds until;
/// `Gdelta` adds weak until applied to `Gdelta` arguments (but no further
/// untils); `NegationFree` allows both unrestricted; `General` admits
/// negation. The strata control which translation backends apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stratum {
    Layer0,
    G,
    Gdelta,
    NegationFree,
    General,
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stratum::Layer0 => "Layer0",
            Stratum::G => "G",
            Stratum::Gdelta => "Gdelta",
            Stratum::NegationFree => "NegationFree",
            Stratum::General => "General",
        };
        write!(f, "{name}")
    }
}

/// Seed for a bounded fixpoint iteration: start from no suffixes or from all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixpointSeed {
    Empty,
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LtlNode {
    Atom(char),
    True,
    False,
    And(Box<LtlFormula>, Box<LtlFormula>),
    Or(Box<LtlFormula>, Box<LtlFormula>),
    Not(Box<LtlFormula>),
    Next(Box<LtlFormula>),
    Until(Box<LtlFormula>, Box<LtlFormula>),
    WeakUntil(Box<LtlFormula>, Box<LtlFormula>),
}

/// A temporal formula. Each node caches whether negation occurs below it.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LtlFormula {
    negation_free: bool,
    node: LtlNode,
}

impl LtlFormula {
    pub fn atom(letter: char) -> LtlFormula {
        LtlFormula { negation_free: true, node: LtlNode::Atom(letter) }
    }

    pub fn tt() -> LtlFormula {
        LtlFormula { negation_free: true, node: LtlNode::True }
    }

    pub fn ff() -> LtlFormula {
        LtlFormula { negation_free: true, node: LtlNode::False }
    }

    pub fn and(left: LtlFormula, right: LtlFormula) -> LtlFormula {
        LtlFormula {
            negation_free: left.negation_free && right.negation_free,
            node: LtlNode::And(Box::new(left), Box::new(right)),
        }
    }

    pub fn or(left: LtlFormula, right: LtlFormula) -> LtlFormula {
        LtlFormula {
            negation_free: left.negation_free && right.negation_free,
            node: LtlNode::Or(Box::new(left), Box::new(right)),
        }
    }

    // An associated constructor like the others, not an operator impl.
    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: LtlFormula) -> LtlFormula {
        LtlFormula { negation_free: false, node: LtlNode::Not(Box::new(inner)) }
    }

    pub fn next(inner: LtlFormula) -> LtlFormula {
        LtlFormula { negation_free: inner.negation_free, node: LtlNode::Next(Box::new(inner)) }
    }

    pub fn until(left: LtlFormula, right: LtlFormula) -> LtlFormula {
        LtlFormula {
            negation_free: left.negation_free && right.negation_free,
            node: LtlNode::Until(Box::new(left), Box::new(right)),
        }
    }

    pub fn weak_until(left: LtlFormula, right: LtlFormula) -> LtlFormula {
        LtlFormula {
            negation_free: left.negation_free && right.negation_free,
            node: LtlNode::WeakUntil(Box::new(left), Box::new(right)),
        }
    }

    /// `F x`, sugar for `true U x`.
    pub fn eventually(inner: LtlFormula) -> LtlFormula {
        LtlFormula::until(LtlFormula::tt(), inner)
    }

    /// `G x`, sugar for `x W false`.
    pub fn always(inner: LtlFormula) -> LtlFormula {
        LtlFormula::weak_until(inner, LtlFormula::ff())
    }

    pub fn node(&self) -> &LtlNode {
        &self.node
    }

    pub fn is_negation_free(&self) -> bool {
        self.negation_free
    }

    /// The letters the formula mentions.
    pub fn letters(&self) -> Vec<char> {
        let mut out = Vec::new();
        fn walk(f: &LtlFormula, out: &mut Vec<char>) {
            match &f.node {
                LtlNode::Atom(c) => {
                    if !out.contains(c) {
                        out.push(*c);
                    }
                }
                LtlNode::True | LtlNode::False => {}
                LtlNode::Not(x) | LtlNode::Next(x) => walk(x, out),
                LtlNode::And(l, r)
                | LtlNode::Or(l, r)
                | LtlNode::Until(l, r)
                | LtlNode::WeakUntil(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    /// Least stratum containing the formula.
    pub fn classify(&self) -> Stratum {
        match &self.node {
            LtlNode::Atom(_) | LtlNode::True | LtlNode::False => Stratum::Layer0,
            LtlNode::And(l, r) | LtlNode::Or(l, r) => l.classify().max(r.classify()),
            LtlNode::Next(x) => x.classify(),
            LtlNode::Not(_) => Stratum::General,
            LtlNode::Until(l, r) => {
                let c = l.classify().max(r.classify());
                if c <= Stratum::G {
                    Stratum::G
                } else if c <= Stratum::NegationFree {
                    Stratum::NegationFree
                } else {
                    Stratum::General
                }
            }
            LtlNode::WeakUntil(l, r) => {
                let c = l.classify().max(r.classify());
                if c <= Stratum::Gdelta {
                    Stratum::Gdelta
                } else if c <= Stratum::NegationFree {
                    Stratum::NegationFree
                } else {
                    Stratum::General
                }
            }
        }
    }

    /// Exact satisfaction on a lasso stream.
    pub fn evaluate(&self, s: &UPStream) -> bool {
        SuffixSpace::new(s).sat(self)[0]
    }

    /// Pushes every `X` inward until it wraps only atoms.
    ///
    /// Uses that `X` commutes with all the other connectives and collapses on
    /// the constants. Negation is pushed through as well; the evaluator
    /// agrees on both sides of that exchange, which the tests fuzz.
    pub fn push_next(&self) -> LtlFormula {
        fn push(f: &LtlFormula, shifts: usize) -> LtlFormula {
            match &f.node {
                LtlNode::Atom(c) => {
                    let mut out = LtlFormula::atom(*c);
                    for _ in 0..shifts {
                        out = LtlFormula::next(out);
                    }
                    out
                }
                LtlNode::True => LtlFormula::tt(),
                LtlNode::False => LtlFormula::ff(),
                LtlNode::Not(x) => LtlFormula::not(push(x, shifts)),
                LtlNode::Next(x) => push(x, shifts + 1),
                LtlNode::And(l, r) => LtlFormula::and(push(l, shifts), push(r, shifts)),
                LtlNode::Or(l, r) => LtlFormula::or(push(l, shifts), push(r, shifts)),
                LtlNode::Until(l, r) => LtlFormula::until(push(l, shifts), push(r, shifts)),
                LtlNode::WeakUntil(l, r) => {
                    LtlFormula::weak_until(push(l, shifts), push(r, shifts))
                }
            }
        }
        push(self, 0)
    }

    /// Checks that all letters in the formula belong to the alphabet.
    /// Intended for the front ends, which reject unknown letters before
    /// evaluating anything.
    pub fn link(&self, alphabet: &Alphabet) -> Result<(), char> {
        match self.letters().into_iter().find(|&c| !alphabet.contains(c)) {
            Some(c) => Err(c),
            None => Ok(()),
        }
    }

    /// Grammar: `~ X F G` bind tightest, then `&`, then `|`, then `U W`
    /// (right associative). `1` and `0` are the constants; lowercase letters
    /// are atoms.
    pub fn parse(text: &str) -> Result<LtlFormula, ParseError> {
        Parser::new(text).parse_all()
    }
}

/// One iteration step of the until unfolding, from an explicit seed.
///
/// The step sends a set `S` of suffixes to "psi holds, or phi holds and the
/// next suffix is in `S`". Iterating from the empty set climbs to the until;
/// iterating from all suffixes descends to the weak until.
pub fn h_iterate(
    phi: &LtlFormula,
    psi: &LtlFormula,
    n: usize,
    seed: FixpointSeed,
    s: &UPStream,
) -> bool {
    let space = SuffixSpace::new(s);
    let a = space.sat(phi);
    let b = space.sat(psi);
    let mut cur = vec![matches!(seed, FixpointSeed::Full); space.total];
    for _ in 0..n {
        cur = (0..space.total)
            .map(|i| b[i] || (a[i] && cur[space.next(i)]))
            .collect();
    }
    cur[0]
}

/// The finitely many suffixes of a lasso stream.
///
/// States are positions `0..P+Q` of the canonical form; position `i >= P`
/// stands for every suffix congruent to it modulo the cycle. The successor
/// of the last state wraps to `P`.
struct SuffixSpace<'a> {
    stream: &'a UPStream,
    prefix_len: usize,
    total: usize,
}

impl<'a> SuffixSpace<'a> {
    fn new(stream: &'a UPStream) -> SuffixSpace<'a> {
        let (p, q) = stream.lasso_params();
        SuffixSpace { stream, prefix_len: p, total: p + q }
    }

    fn next(&self, i: usize) -> usize {
        if i + 1 < self.total {
            i + 1
        } else {
            self.prefix_len
        }
    }

    /// Which suffixes satisfy the formula, one flag per state.
    fn sat(&self, f: &LtlFormula) -> Vec<bool> {
        match &f.node {
            LtlNode::Atom(c) => (0..self.total)
                .map(|i| self.stream.at(i) == LiftedLetter::Letter(*c))
                .collect(),
            LtlNode::True => vec![true; self.total],
            LtlNode::False => vec![false; self.total],
            LtlNode::And(l, r) => {
                let (a, b) = (self.sat(l), self.sat(r));
                (0..self.total).map(|i| a[i] && b[i]).collect()
            }
            LtlNode::Or(l, r) => {
                let (a, b) = (self.sat(l), self.sat(r));
                (0..self.total).map(|i| a[i] || b[i]).collect()
            }
            LtlNode::Not(x) => self.sat(x).into_iter().map(|v| !v).collect(),
            LtlNode::Next(x) => {
                let inner = self.sat(x);
                (0..self.total).map(|i| inner[self.next(i)]).collect()
            }
            LtlNode::Until(l, r) => self.fixpoint(l, r, false),
            LtlNode::WeakUntil(l, r) => self.fixpoint(l, r, true),
        }
    }

    /// Least (`seed_full = false`) or greatest (`true`) fixpoint of the
    /// until unfolding. The chain over at most `total` states stabilizes
    /// within `total` rounds.
    fn fixpoint(&self, l: &LtlFormula, r: &LtlFormula, seed_full: bool) -> Vec<bool> {
        let a = self.sat(l);
        let b = self.sat(r);
        let mut cur = vec![seed_full; self.total];
        loop {
            let next: Vec<bool> = (0..self.total)
                .map(|i| b[i] || (a[i] && cur[self.next(i)]))
                .collect();
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }
}

const PREC_UNTIL: u8 = 0;
const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_UNARY: u8 = 3;

impl LtlFormula {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = |f: &mut fmt::Formatter<'_>, own: u8, body: &dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result| {
            if own < min {
                write!(f, "(")?;
                body(f)?;
                write!(f, ")")
            } else {
                body(f)
            }
        };
        match &self.node {
            LtlNode::Atom(c) => write!(f, "{c}"),
            LtlNode::True => write!(f, "1"),
            LtlNode::False => write!(f, "0"),
            LtlNode::Not(x) => {
                write!(f, "~")?;
                x.fmt_prec(f, PREC_UNARY)
            }
            LtlNode::Next(x) => {
                write!(f, "X ")?;
                x.fmt_prec(f, PREC_UNARY)
            }
            LtlNode::Until(l, r) if matches!(l.node, LtlNode::True) => {
                write!(f, "F ")?;
                r.fmt_prec(f, PREC_UNARY)
            }
            LtlNode::WeakUntil(l, r) if matches!(r.node, LtlNode::False) => {
                write!(f, "G ")?;
                l.fmt_prec(f, PREC_UNARY)
            }
            LtlNode::And(l, r) => paren(f, PREC_AND, &|f| {
                l.fmt_prec(f, PREC_AND)?;
                write!(f, " & ")?;
                r.fmt_prec(f, PREC_AND + 1)
            }),
            LtlNode::Or(l, r) => paren(f, PREC_OR, &|f| {
                l.fmt_prec(f, PREC_OR)?;
                write!(f, " | ")?;
                r.fmt_prec(f, PREC_OR + 1)
            }),
            LtlNode::Until(l, r) => paren(f, PREC_UNTIL, &|f| {
                l.fmt_prec(f, PREC_UNTIL + 1)?;
                write!(f, " U ")?;
                r.fmt_prec(f, PREC_UNTIL)
            }),
            LtlNode::WeakUntil(l, r) => paren(f, PREC_UNTIL, &|f| {
                l.fmt_prec(f, PREC_UNTIL + 1)?;
                write!(f, " W ")?;
                r.fmt_prec(f, PREC_UNTIL)
            }),
        }
    }
}

impl fmt::Display for LtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl fmt::Debug for LtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LtlFormula({self})")
    }
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    text: &'a str,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Parser<'a> {
        Parser { chars: text.char_indices().collect(), pos: 0, text }
    }

    fn skip_ws(&mut self) {
        while let Some(&(_, c)) = self.chars.get(self.pos) {
            if c.is_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn here(&self) -> usize {
        self.chars.get(self.pos).map_or(self.text.len(), |&(i, _)| i)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn parse_all(&mut self) -> Result<LtlFormula, ParseError> {
        let f = self.parse_until()?;
        if let Some(c) = self.peek() {
            return Err(ParseError::new(self.here(), format!("unexpected {c:?}")));
        }
        Ok(f)
    }

    // until := or (('U' | 'W') until)?    right associative
    fn parse_until(&mut self) -> Result<LtlFormula, ParseError> {
        let left = self.parse_or()?;
        match self.peek() {
            Some('U') => {
                self.bump();
                Ok(LtlFormula::until(left, self.parse_until()?))
            }
            Some('W') => {
                self.bump();
                Ok(LtlFormula::weak_until(left, self.parse_until()?))
            }
            _ => Ok(left),
        }
    }

    fn parse_or(&mut self) -> Result<LtlFormula, ParseError> {
        let mut left = self.parse_and()?;
        while self.peek() == Some('|') {
            self.bump();
            left = LtlFormula::or(left, self.parse_and()?);
        }
        Ok(left)
    }

    fn parse_and(&mut self) -> Result<LtlFormula, ParseError> {
        let mut left = self.parse_unary()?;
        while self.peek() == Some('&') {
            self.bump();
            left = LtlFormula::and(left, self.parse_unary()?);
        }
        Ok(left)
    }

    fn parse_unary(&mut self) -> Result<LtlFormula, ParseError> {
        let at = self.here();
        match self.peek() {
            Some('~') => {
                self.bump();
                Ok(LtlFormula::not(self.parse_unary()?))
            }
            Some('X') => {
                self.bump();
                Ok(LtlFormula::next(self.parse_unary()?))
            }
            Some('F') => {
                self.bump();
                Ok(LtlFormula::eventually(self.parse_unary()?))
            }
            Some('G') => {
                self.bump();
                Ok(LtlFormula::always(self.parse_unary()?))
            }
            Some('(') => {
                self.bump();
                let f = self.parse_until()?;
                if self.peek() != Some(')') {
                    return Err(ParseError::new(self.here(), "expected `)`"));
                }
                self.bump();
                Ok(f)
            }
            Some('1') => {
                self.bump();
                Ok(LtlFormula::tt())
            }
            Some('0') => {
                self.bump();
                Ok(LtlFormula::ff())
            }
            Some(c) if c.is_ascii_lowercase() => {
                self.bump();
                Ok(LtlFormula::atom(c))
            }
            Some(c) => Err(ParseError::new(at, format!("unexpected {c:?}"))),
            None => Err(ParseError::new(at, "unexpected end of formula")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> UPStream {
        UPStream::parse(text).unwrap()
    }

    fn f(text: &str) -> LtlFormula {
        LtlFormula::parse(text).unwrap()
    }

    #[test]
    fn atoms_look_at_position_zero() {
        assert!(f("a").evaluate(&s("a|_")));
        assert!(!f("a").evaluate(&s("_a|_")));
        assert!(!f("a").evaluate(&s("|b")));
    }

    #[test]
    fn next_shifts_by_one() {
        assert!(f("X a").evaluate(&s("_a|_")));
        assert!(!f("X a").evaluate(&s("a|_")));
    }

    #[test]
    fn eventually_scans_all_suffixes() {
        for n in 0..=3 {
            let text = format!("{}a|_", "_".repeat(n));
            assert!(f("F a").evaluate(&s(&text)), "{text}");
        }
        assert!(!f("F a").evaluate(&s("|b")));
        assert!(f("F a").evaluate(&s("|ba")));
    }

    #[test]
    fn always_needs_every_suffix() {
        assert!(f("G a").evaluate(&s("|a")));
        assert!(!f("G a").evaluate(&s("a|b")));
        assert!(!f("G a").evaluate(&s("|ab")));
        assert!(!f("G a").evaluate(&s("a|_")));
    }

    #[test]
    fn infinitely_often_and_eventually_forever() {
        assert!(f("G F a").evaluate(&s("|_a")));
        assert!(f("G F a").evaluate(&s("|ba")));
        assert!(!f("G F a").evaluate(&s("a|b")));
        for n in 0..=3 {
            let text = format!("{}|a", "_".repeat(n));
            assert!(f("F G a").evaluate(&s(&text)), "{text}");
        }
        assert!(!f("F G a").evaluate(&s("|_a")));
    }

    #[test]
    fn until_requires_the_left_argument_up_to_the_witness() {
        assert!(f("a U b").evaluate(&s("aab|c")));
        assert!(!f("a U b").evaluate(&s("acb|c")));
        assert!(!f("a U b").evaluate(&s("|a")));
        assert!(f("a W b").evaluate(&s("|a")));
        assert!(f("a W b").evaluate(&s("aab|c")));
        assert!(!f("a W b").evaluate(&s("ac|a")));
    }

    #[test]
    fn weak_until_on_partial_streams() {
        // The left argument failing on an undefined position breaks the hold.
        assert!(!f("a W b").evaluate(&s("a_|a")));
        assert!(f("a W b").evaluate(&s("ab|_")));
    }

    #[test]
    fn until_is_a_least_fixpoint() {
        let phi = f("a");
        let psi = f("b");
        let t = s("aab|c");
        let (p, q) = t.lasso_params();
        let direct = LtlFormula::until(phi.clone(), psi.clone()).evaluate(&t);
        let iterated =
            (0..=p + q).any(|n| h_iterate(&phi, &psi, n, FixpointSeed::Empty, &t));
        assert_eq!(direct, iterated);
    }

    #[test]
    fn h_iterate_unfolds_step_by_step() {
        let t = s("_a|_");
        assert!(!h_iterate(&f("1"), &f("a"), 1, FixpointSeed::Empty, &t));
        assert!(h_iterate(&f("1"), &f("a"), 2, FixpointSeed::Empty, &t));
        assert!(!h_iterate(&f("1"), &f("a"), 0, FixpointSeed::Empty, &t));
        // From the full seed, zero steps accept everything.
        assert!(h_iterate(&f("a"), &f("0"), 0, FixpointSeed::Full, &t));
    }

    #[test]
    fn classify_finds_the_least_stratum() {
        assert_eq!(f("a").classify(), Stratum::Layer0);
        assert_eq!(f("X (a | b)").classify(), Stratum::Layer0);
        assert_eq!(f("F a").classify(), Stratum::G);
        assert_eq!(f("a U b").classify(), Stratum::G);
        assert_eq!(f("G a").classify(), Stratum::Gdelta);
        assert_eq!(f("G F a").classify(), Stratum::Gdelta);
        assert_eq!(f("F G a").classify(), Stratum::NegationFree);
        assert_eq!(f("(G a) U b").classify(), Stratum::NegationFree);
        assert_eq!(f("~G a").classify(), Stratum::General);
        assert_eq!(f("X ~a").classify(), Stratum::General);
    }

    #[test]
    fn push_next_distributes() {
        assert_eq!(f("X (a | b)").push_next(), f("X a | X b"));
        assert_eq!(f("X (a U b)").push_next(), f("X a U X b"));
        assert_eq!(f("X 1").push_next(), f("1"));
        assert_eq!(f("X X (a & 0)").push_next(), f("X X a & 0"));
        assert_eq!(f("X ~a").push_next(), f("~X a"));
    }

    #[test]
    fn push_next_preserves_meaning_and_stratum() {
        let cases = ["X (a U (b | X c))", "X G a", "X (a W b) & X F c"];
        let streams = ["|ab", "a_b|c", "|_a", "ab|_"];
        for ft in cases {
            let before = f(ft);
            let after = before.push_next();
            assert_eq!(before.classify(), after.classify(), "{ft}");
            for st in streams {
                assert_eq!(before.evaluate(&s(st)), after.evaluate(&s(st)), "{ft} on {st}");
            }
        }
    }

    #[test]
    fn parser_precedence() {
        assert_eq!(f("a U b & c"), LtlFormula::until(f("a"), f("b & c")));
        assert_eq!(f("a & b | c"), LtlFormula::or(f("a & b"), f("c")));
        assert_eq!(f("X a U b"), LtlFormula::until(f("X a"), f("b")));
        assert_eq!(f("a U b U c"), LtlFormula::until(f("a"), f("b U c")));
        assert_eq!(f("G F a"), LtlFormula::always(LtlFormula::eventually(f("a"))));
        assert!(LtlFormula::parse("a &").is_err());
        assert!(LtlFormula::parse("(a").is_err());
        assert!(LtlFormula::parse("a b").is_err());
        assert!(LtlFormula::parse("Z").is_err());
    }

    #[test]
    fn display_round_trips() {
        let cases = [
            "a U (b & X c)",
            "G F a",
            "F (a U b)",
            "~(a | b) & X X c",
            "a W (b W 0)",
            "(a U b) U c",
            "1",
        ];
        for text in cases {
            let parsed = f(text);
            assert_eq!(f(&parsed.to_string()), parsed, "{text} printed as {parsed}");
        }
    }

    #[test]
    fn link_rejects_foreign_letters() {
        let alphabet = Alphabet::new(['a', 'b']);
        assert_eq!(f("a U b").link(&alphabet), Ok(()));
        assert_eq!(f("a U c").link(&alphabet), Err('c'));
    }
}
