//! The domain of partial streams over a finite alphabet.
//!
//! A partial stream maps each position to a lifted letter: either a letter
//! of the alphabet or [`LiftedLetter::Bottom`], the undefined value. Streams
//! compare pointwise: `s <= t` when every position of `s` is either bottom or
//! agrees with `t`. Distinct letters never compare, so two streams have an
//! upper bound exactly when they agree wherever both are defined.
//!
//! [`UPStream`] represents the ultimately periodic streams as a finite prefix
//! plus a nonempty cycle, kept in a canonical form so that structural equality
//! coincides with pointwise equality. [`FiniteElement`] represents the compact
//! elements of the domain: streams defined at finitely many positions. These
//! double as the atoms of the geometric layer.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::ParseError;

/// A finite ordered set of distinct letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<char>,
}

impl Alphabet {
    /// Builds an alphabet from letters in the given order.
    ///
    /// Panics if a letter repeats; alphabets are sets.
    pub fn new(letters: impl IntoIterator<Item = char>) -> Alphabet {
        let letters: Vec<char> = letters.into_iter().collect();
        let mut seen = BTreeSet::new();
        for &c in &letters {
            assert!(seen.insert(c), "duplicate letter {c:?} in alphabet");
        }
        Alphabet { letters }
    }

    pub fn contains(&self, c: char) -> bool {
        self.letters.contains(&c)
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.letters {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A letter of the alphabet, or the undefined value below every letter.
///
/// The derived `Ord` is only a storage order (for sorted containers). The
/// domain order is [`LiftedLetter::leq`]: bottom below everything, letters
/// pairwise incomparable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LiftedLetter {
    Bottom,
    Letter(char),
}

impl LiftedLetter {
    /// Information order on lifted letters.
    pub fn leq(self, other: LiftedLetter) -> bool {
        self == LiftedLetter::Bottom || self == other
    }

    /// Least upper bound, when one exists. Two distinct letters have none.
    pub fn join(self, other: LiftedLetter) -> Option<LiftedLetter> {
        match (self, other) {
            (LiftedLetter::Bottom, x) | (x, LiftedLetter::Bottom) => Some(x),
            (a, b) if a == b => Some(a),
            _ => None,
        }
    }

    pub fn is_bottom(self) -> bool {
        self == LiftedLetter::Bottom
    }
}

impl fmt::Display for LiftedLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiftedLetter::Bottom => write!(f, "_"),
            LiftedLetter::Letter(c) => write!(f, "{c}"),
        }
    }
}

/// Two streams disagreed on a defined position, so no upper bound exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IncompatibleError {
    /// First position carrying two distinct letters.
    pub position: usize,
}

impl fmt::Display for IncompatibleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "streams conflict at position {}", self.position)
    }
}

impl std::error::Error for IncompatibleError {}

/// An ultimately periodic partial stream in canonical lasso form.
///
/// Canonical means: the cycle is primitive (not a repetition of a shorter
/// word), and the prefix is as short as possible (its last letter never equals
/// the letter the cycle would supply there). Under these two conditions the
/// representation of a stream is unique, so the derived equality is pointwise
/// equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UPStream {
    prefix: Vec<LiftedLetter>,
    cycle: Vec<LiftedLetter>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Length of the shortest word whose repetition yields `cycle`.
fn primitive_period(cycle: &[LiftedLetter]) -> usize {
    let n = cycle.len();
    'candidate: for p in 1..=n {
        if !n.is_multiple_of(p) {
            continue;
        }
        for i in p..n {
            if cycle[i] != cycle[i % p] {
                continue 'candidate;
            }
        }
        return p;
    }
    n
}

impl UPStream {
    /// Builds a stream from raw prefix and cycle, canonicalizing.
    ///
    /// Panics if the cycle is empty; every lasso needs a loop.
    pub fn new(prefix: Vec<LiftedLetter>, cycle: Vec<LiftedLetter>) -> UPStream {
        assert!(!cycle.is_empty(), "stream cycle must be nonempty");
        let mut prefix = prefix;
        let mut cycle = cycle;
        let p = primitive_period(&cycle);
        cycle.truncate(p);
        // Fold the prefix into the cycle while its tail repeats the loop.
        while let Some(&last) = prefix.last() {
            if last == *cycle.last().expect("nonempty cycle") {
                prefix.pop();
                cycle.rotate_right(1);
            } else {
                break;
            }
        }
        UPStream { prefix, cycle }
    }

    /// The everywhere undefined stream.
    pub fn bottom() -> UPStream {
        UPStream { prefix: Vec::new(), cycle: vec![LiftedLetter::Bottom] }
    }

    /// Parses the `PREFIX|CYCLE` literal form, with `_` for bottom.
    ///
    /// Examples: `|ab` repeats `ab` forever, `ab|_` is the word `ab` followed
    /// by bottoms, `a_|b` is defined at 0 and from 2 on.
    pub fn parse(text: &str) -> Result<UPStream, ParseError> {
        let bar = match text.find('|') {
            Some(i) => i,
            None => return Err(ParseError::new(text.len(), "expected `|` between prefix and cycle")),
        };
        if text[bar + 1..].contains('|') {
            let second = bar + 1 + text[bar + 1..].find('|').unwrap();
            return Err(ParseError::new(second, "more than one `|`"));
        }
        let mut letters = Vec::new();
        for (i, c) in text.char_indices() {
            if i == bar {
                continue;
            }
            match c {
                '_' => letters.push((i, LiftedLetter::Bottom)),
                c if c.is_ascii_lowercase() => letters.push((i, LiftedLetter::Letter(c))),
                _ => return Err(ParseError::new(i, format!("invalid stream symbol {c:?}"))),
            }
        }
        let split = letters.iter().take_while(|&&(i, _)| i < bar).count();
        let cycle: Vec<LiftedLetter> = letters[split..].iter().map(|&(_, l)| l).collect();
        if cycle.is_empty() {
            return Err(ParseError::new(text.len(), "cycle must be nonempty"));
        }
        let prefix = letters[..split].iter().map(|&(_, l)| l).collect();
        Ok(UPStream::new(prefix, cycle))
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn cycle_len(&self) -> usize {
        self.cycle.len()
    }

    /// Canonical prefix and cycle lengths, in that order.
    pub fn lasso_params(&self) -> (usize, usize) {
        (self.prefix.len(), self.cycle.len())
    }

    /// The letter at a position.
    pub fn at(&self, i: usize) -> LiftedLetter {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Drops the first `k` positions.
    pub fn suffix(&self, k: usize) -> UPStream {
        if k <= self.prefix.len() {
            UPStream::new(self.prefix[k..].to_vec(), self.cycle.clone())
        } else {
            let r = (k - self.prefix.len()) % self.cycle.len();
            let mut cycle = self.cycle.clone();
            cycle.rotate_left(r);
            UPStream::new(Vec::new(), cycle)
        }
    }

    /// Bound such that any pointwise property of `self` and `other` that is
    /// invariant under both cycles is decided by positions below it.
    fn joint_bound(&self, other: &UPStream) -> usize {
        self.prefix.len().max(other.prefix.len()) + lcm(self.cycle.len(), other.cycle.len())
    }

    /// Pointwise information order.
    pub fn leq(&self, other: &UPStream) -> bool {
        (0..self.joint_bound(other)).all(|i| self.at(i).leq(other.at(i)))
    }

    /// Pointwise least upper bound, or the first conflicting position.
    pub fn sup(&self, other: &UPStream) -> Result<UPStream, IncompatibleError> {
        let p = self.prefix.len().max(other.prefix.len());
        let q = lcm(self.cycle.len(), other.cycle.len());
        let mut letters = Vec::with_capacity(p + q);
        for i in 0..p + q {
            match self.at(i).join(other.at(i)) {
                Some(l) => letters.push(l),
                None => return Err(IncompatibleError { position: i }),
            }
        }
        let cycle = letters.split_off(p);
        Ok(UPStream::new(letters, cycle))
    }

    /// No undefined positions anywhere.
    pub fn is_total(&self) -> bool {
        self.prefix.iter().chain(&self.cycle).all(|l| !l.is_bottom())
    }

    /// The set of letters that occur in the stream.
    pub fn letters(&self) -> BTreeSet<char> {
        self.prefix
            .iter()
            .chain(&self.cycle)
            .filter_map(|l| match l {
                LiftedLetter::Letter(c) => Some(*c),
                LiftedLetter::Bottom => None,
            })
            .collect()
    }

    /// Prepends one letter.
    pub fn cons(&self, head: LiftedLetter) -> UPStream {
        let mut prefix = Vec::with_capacity(self.prefix.len() + 1);
        prefix.push(head);
        prefix.extend_from_slice(&self.prefix);
        UPStream::new(prefix, self.cycle.clone())
    }
}

impl fmt::Display for UPStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.prefix {
            write!(f, "{l}")?;
        }
        write!(f, "|")?;
        for l in &self.cycle {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// A stream defined at finitely many positions: a compact element of the
/// domain, and an atom of the geometric layer.
///
/// The derived `Ord` is a storage order only; the element order is
/// [`FiniteElement::leq`] (entry containment).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteElement {
    entries: BTreeMap<usize, char>,
}

impl FiniteElement {
    pub fn new(entries: impl IntoIterator<Item = (usize, char)>) -> FiniteElement {
        FiniteElement { entries: entries.into_iter().collect() }
    }

    /// The everywhere undefined element.
    pub fn empty() -> FiniteElement {
        FiniteElement { entries: BTreeMap::new() }
    }

    /// Defined at exactly one position.
    pub fn single(position: usize, letter: char) -> FiniteElement {
        FiniteElement::new([(position, letter)])
    }

    /// Parses the `{0:a,3:b}` literal form. `{}` is the empty element.
    pub fn parse(text: &str) -> Result<FiniteElement, ParseError> {
        let inner = text
            .strip_prefix('{')
            .ok_or_else(|| ParseError::new(0, "expected `{`"))?
            .strip_suffix('}')
            .ok_or_else(|| ParseError::new(text.len(), "expected `}`"))?;
        let mut entries = BTreeMap::new();
        if inner.trim().is_empty() {
            return Ok(FiniteElement { entries });
        }
        let mut offset = 1;
        for part in inner.split(',') {
            let item = part.trim();
            let (pos_text, letter_text) = item
                .split_once(':')
                .ok_or_else(|| ParseError::new(offset, "expected `position:letter`"))?;
            let position: usize = pos_text
                .trim()
                .parse()
                .map_err(|_| ParseError::new(offset, format!("invalid position {pos_text:?}")))?;
            let letter_text = letter_text.trim();
            let mut chars = letter_text.chars();
            let letter = match (chars.next(), chars.next()) {
                (Some(c), None) if c.is_ascii_lowercase() => c,
                _ => return Err(ParseError::new(offset, format!("invalid letter {letter_text:?}"))),
            };
            if entries.insert(position, letter).is_some() {
                return Err(ParseError::new(offset, format!("position {position} repeated")));
            }
            offset += part.len() + 1;
        }
        Ok(FiniteElement { entries })
    }

    /// The positions where the element is defined.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, char)> + '_ {
        self.entries.iter().map(|(&i, &c)| (i, c))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn letters(&self) -> BTreeSet<char> {
        self.entries.values().copied().collect()
    }

    /// Element order: defined entries of `self` all appear in `other`.
    pub fn leq(&self, other: &FiniteElement) -> bool {
        self.entries.iter().all(|(i, c)| other.entries.get(i) == Some(c))
    }

    /// Whether the element lies below a stream, pointwise.
    pub fn leq_stream(&self, s: &UPStream) -> bool {
        self.entries.iter().all(|(&i, &c)| s.at(i) == LiftedLetter::Letter(c))
    }

    /// Least upper bound of two elements, or `None` when they carry distinct
    /// letters at a shared position.
    pub fn sup(&self, other: &FiniteElement) -> Option<FiniteElement> {
        let mut entries = self.entries.clone();
        for (&i, &c) in &other.entries {
            if let Some(prev) = entries.insert(i, c) {
                if prev != c {
                    return None;
                }
            }
        }
        Some(FiniteElement { entries })
    }

    pub fn compatible(&self, other: &FiniteElement) -> bool {
        self.sup(other).is_some()
    }

    /// Moves every entry one position later. This is the action of "next" on
    /// atoms: position `i` becomes `i + 1` and position 0 is left undefined.
    pub fn shift(&self) -> FiniteElement {
        FiniteElement { entries: self.entries.iter().map(|(&i, &c)| (i + 1, c)).collect() }
    }

    /// The stream that is exactly this element: its written-out support
    /// followed by bottoms.
    pub fn embed(&self) -> UPStream {
        match self.entries.keys().next_back() {
            None => UPStream::bottom(),
            Some(&max) => {
                let prefix = (0..=max)
                    .map(|i| match self.entries.get(&i) {
                        Some(&c) => LiftedLetter::Letter(c),
                        None => LiftedLetter::Bottom,
                    })
                    .collect();
                UPStream::new(prefix, vec![LiftedLetter::Bottom])
            }
        }
    }

    /// The `{0:a,3:b}` literal form, which `parse` accepts back.
    pub fn literal(&self) -> String {
        let mut out = String::from("{");
        for (i, (pos, letter)) in self.entries.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("{pos}:{letter}"));
        }
        out.push('}');
        out
    }
}

/// Padded-word rendering: `{1:a}` shows as `_a_^ω`, the empty element as `_^ω`.
impl fmt::Display for FiniteElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(&max) = self.entries.keys().next_back() {
            for i in 0..=max {
                match self.entries.get(&i) {
                    Some(c) => write!(f, "{c}")?,
                    None => write!(f, "_")?,
                }
            }
        }
        write!(f, "_^ω")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> UPStream {
        UPStream::parse(text).unwrap()
    }

    /// Pointwise comparison by brute force, far past any period.
    fn pointwise_leq(a: &UPStream, b: &UPStream, horizon: usize) -> bool {
        (0..horizon).all(|i| a.at(i).leq(b.at(i)))
    }

    #[test]
    fn canonical_cycle_is_primitive() {
        assert_eq!(s("|abab"), s("|ab"));
        assert_eq!(s("|aaa"), s("|a"));
        assert_eq!(s("|ab").cycle_len(), 2);
    }

    #[test]
    fn canonical_prefix_is_minimal() {
        assert_eq!(s("ab|b"), s("a|b"));
        assert_eq!(s("abab|ab"), s("|ab"));
        assert_eq!(s("a_|_"), s("a|_"));
        assert_eq!(s("aa|a"), s("|a"));
    }

    #[test]
    fn canonicalization_is_idempotent() {
        for text in ["ab|ba", "|a", "_a|ab", "abc|cb"] {
            let t = s(text);
            let again = UPStream::new(
                (0..t.prefix_len()).map(|i| t.at(i)).collect(),
                (t.prefix_len()..t.prefix_len() + t.cycle_len()).map(|i| t.at(i)).collect(),
            );
            assert_eq!(t, again);
        }
    }

    #[test]
    fn at_walks_prefix_then_cycle() {
        let t = s("a_|b");
        assert_eq!(t.at(0), LiftedLetter::Letter('a'));
        assert_eq!(t.at(1), LiftedLetter::Bottom);
        assert_eq!(t.at(2), LiftedLetter::Letter('b'));
        assert_eq!(t.at(100), LiftedLetter::Letter('b'));
    }

    #[test]
    fn suffix_drops_positions() {
        assert_eq!(s("ab|c").suffix(1), s("b|c"));
        assert_eq!(s("ab|c").suffix(5), s("|c"));
        assert_eq!(s("|ab").suffix(1), s("|ba"));
        assert_eq!(s("|ab").suffix(2), s("|ab"));
        // Suffix past the prefix lands on a rotation of the cycle.
        assert_eq!(s("a|bc").suffix(2), s("|cb"));
    }

    #[test]
    fn suffix_composes() {
        let t = s("ab_|cd");
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(t.suffix(i).suffix(j), t.suffix(i + j));
            }
        }
    }

    #[test]
    fn leq_matches_pointwise_oracle() {
        // Bottom positions may be filled; letters must match.
        assert!(s("|_a").leq(&s("|ba")));
        assert!(s("a|_").leq(&s("a|b")));
        assert!(!s("a|_").leq(&s("b|b")));
        assert!(!s("|ab").leq(&s("|ba")));
        let cases = [
            ("|_a", "|ba"),
            ("a|_", "|ab"),
            ("_|ab", "b|ab"),
            ("|ab", "|ab"),
            ("ab|_", "|ab"),
            ("|a", "|ab"),
        ];
        for (x, y) in cases {
            let (x, y) = (s(x), s(y));
            assert_eq!(x.leq(&y), pointwise_leq(&x, &y, 64), "{x} vs {y}");
        }
    }

    #[test]
    fn bottom_is_least_and_totals_are_maximal() {
        let b = UPStream::bottom();
        for t in ["|ab", "a|b", "ab|_", "|_"] {
            assert!(b.leq(&s(t)));
        }
        // A total stream sits below nothing except itself.
        assert!(s("|ab").leq(&s("|ab")));
        assert!(!s("|ab").leq(&s("|ab").suffix(1)));
    }

    #[test]
    fn sup_joins_compatible_streams() {
        let joined = s("a_|__").sup(&s("_b|__")).unwrap();
        assert_eq!(joined, s("ab|_"));
        // Filling different cycle slots works across periods.
        let joined = s("|a_").sup(&s("|_b")).unwrap();
        assert_eq!(joined, s("|ab"));
        assert!(s("|a_").leq(&joined));
        assert!(s("|_b").leq(&joined));
    }

    #[test]
    fn sup_reports_first_conflict() {
        let err = s("ab|_").sup(&s("ac|_")).unwrap_err();
        assert_eq!(err.position, 1);
        let err = s("|a").sup(&s("|b")).unwrap_err();
        assert_eq!(err.position, 0);
    }

    #[test]
    fn parse_rejects_bad_literals() {
        assert!(UPStream::parse("ab").is_err());
        assert!(UPStream::parse("ab|").is_err());
        assert!(UPStream::parse("a|b|c").is_err());
        assert!(UPStream::parse("aB|c").is_err());
        assert_eq!(UPStream::parse("ab|").unwrap_err().position, 3);
    }

    #[test]
    fn display_round_trips() {
        for text in ["|ab", "a|b", "ab|_", "a_|b", "|_"] {
            let t = s(text);
            assert_eq!(s(&t.to_string()), t);
        }
    }

    #[test]
    fn is_total_spots_bottoms() {
        assert!(s("ab|ba").is_total());
        assert!(!s("a_|b").is_total());
        assert!(!s("ab|_").is_total());
    }

    #[test]
    fn finite_element_embeds_as_padded_word() {
        let d = FiniteElement::new([(0, 'a'), (3, 'b')]);
        assert_eq!(d.embed(), s("a__b|_"));
        assert_eq!(FiniteElement::empty().embed(), UPStream::bottom());
        assert!(d.leq_stream(&d.embed()));
    }

    #[test]
    fn atom_leq_checks_each_entry() {
        let d = FiniteElement::single(1, 'a');
        assert!(d.leq_stream(&s("_a|_")));
        assert!(d.leq_stream(&s("|ba")));
        assert!(!d.leq_stream(&s("|ab")));
        assert!(FiniteElement::empty().leq_stream(&UPStream::bottom()));
    }

    #[test]
    fn element_order_is_entry_containment() {
        let small = FiniteElement::single(2, 'b');
        let big = FiniteElement::new([(0, 'a'), (2, 'b')]);
        assert!(small.leq(&big));
        assert!(!big.leq(&small));
        assert!(FiniteElement::empty().leq(&small));
    }

    #[test]
    fn element_sup_and_compatibility() {
        let left = FiniteElement::new([(0, 'a'), (2, 'b')]);
        let right = FiniteElement::new([(1, 'c'), (2, 'b')]);
        let joined = left.sup(&right).unwrap();
        assert_eq!(joined, FiniteElement::new([(0, 'a'), (1, 'c'), (2, 'b')]));
        let clash = FiniteElement::single(0, 'b');
        assert!(left.sup(&clash).is_none());
        assert!(!left.compatible(&clash));
    }

    #[test]
    fn shift_moves_support() {
        let d = FiniteElement::new([(0, 'a'), (2, 'b')]);
        assert_eq!(d.shift(), FiniteElement::new([(1, 'a'), (3, 'b')]));
        assert_eq!(FiniteElement::empty().shift(), FiniteElement::empty());
    }

    #[test]
    fn element_literals_round_trip() {
        for text in ["{}", "{0:a}", "{0:a,3:b}"] {
            let d = FiniteElement::parse(text).unwrap();
            assert_eq!(d.literal(), text);
        }
        assert!(FiniteElement::parse("{0:a,0:b}").is_err());
        assert!(FiniteElement::parse("{x:a}").is_err());
    }

    #[test]
    fn padded_display() {
        assert_eq!(FiniteElement::single(1, 'a').to_string(), "_a_^ω");
        assert_eq!(FiniteElement::single(0, 'a').to_string(), "a_^ω");
        assert_eq!(FiniteElement::empty().to_string(), "_^ω");
    }
}
