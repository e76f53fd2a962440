//! A stream filter driven by a letter predicate, studied end to end:
//! the bottom-up iterates that approximate it, its closed form on
//! ultimately periodic streams, and executable checks that filtering a
//! stream with infinitely many kept letters yields a total stream.
//!
//! The bridge between the temporal statement ("infinitely often a kept
//! letter") and the geometric one goes through two formula families:
//! `psi_nk` says at least k of the first n positions are kept, `phi_k`
//! says the first k output positions are defined. The transfer check
//! confirms the first forces the second across the filter, and
//! [`filter_spec_check`] assembles the full input/output specification.

use std::collections::BTreeMap;
use std::fmt;

use crate::geometry::{geom_sat, next_geom, or_all, GeomFormula, Valuation};
use crate::ltl::LtlFormula;
use crate::stream::{Alphabet, LiftedLetter, UPStream};
use crate::translation::{f_translate, lasso_budget, TranslateError};
use crate::ParseError;

/// Truth values of a flat three-point domain: undefined below two
/// incomparable definite answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftedBool {
    Bottom,
    True,
    False,
}

impl LiftedBool {
    pub fn parse(text: &str) -> Option<LiftedBool> {
        match text {
            "tt" => Some(LiftedBool::True),
            "ff" => Some(LiftedBool::False),
            "bot" => Some(LiftedBool::Bottom),
            _ => None,
        }
    }
}

impl fmt::Display for LiftedBool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            LiftedBool::Bottom => "bot",
            LiftedBool::True => "tt",
            LiftedBool::False => "ff",
        };
        write!(f, "{text}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FilterError {
    NotTotal,
    /// The predicate gives no definite answer on this letter, so the
    /// filter stalls: a monotone map cannot produce output past an
    /// undefined test.
    BottomOnLetter(char),
    UnassignedLetter(char),
    KExceedsN { n: usize, k: usize },
    Translate(TranslateError),
}

impl fmt::Display for FilterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterError::NotTotal => write!(f, "stream must be total"),
            FilterError::BottomOnLetter(l) => {
                write!(f, "predicate is undefined on letter {l:?}")
            }
            FilterError::UnassignedLetter(l) => {
                write!(f, "no predicate entry for alphabet letter {l:?}")
            }
            FilterError::KExceedsN { n, k } => {
                write!(f, "cannot place {k} hits among {n} positions")
            }
            FilterError::Translate(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for FilterError {}

impl From<TranslateError> for FilterError {
    fn from(e: TranslateError) -> FilterError {
        FilterError::Translate(e)
    }
}

impl From<crate::geometry::GeomError> for FilterError {
    fn from(e: crate::geometry::GeomError) -> FilterError {
        FilterError::Translate(TranslateError::Geom(e))
    }
}

/// A letter test with three-valued answers, total on its alphabet.
#[derive(Debug, Clone)]
pub struct Predicate {
    alphabet: Alphabet,
    table: BTreeMap<char, LiftedBool>,
}

impl Predicate {
    pub fn new(
        alphabet: Alphabet,
        table: impl IntoIterator<Item = (char, LiftedBool)>,
    ) -> Result<Predicate, FilterError> {
        let table: BTreeMap<char, LiftedBool> = table.into_iter().collect();
        for l in alphabet.letters() {
            if !table.contains_key(l) {
                return Err(FilterError::UnassignedLetter(*l));
            }
        }
        Ok(Predicate { alphabet, table })
    }

    /// Reads a comma-separated table like "a=tt,b=ff"; the listed letters
    /// become the alphabet. Values are tt, ff, or bot.
    pub fn parse(text: &str) -> Result<Predicate, ParseError> {
        let mut table = BTreeMap::new();
        let mut offset = 0;
        for part in text.split(',') {
            let err = |message: String| ParseError { position: offset, message };
            let (letter, value) = part
                .split_once('=')
                .ok_or_else(|| err(format!("expected letter=value, got {part:?}")))?;
            let mut chars = letter.chars();
            let (Some(l), None) = (chars.next(), chars.next()) else {
                return Err(err(format!("predicate key must be one letter, got {letter:?}")));
            };
            let v = LiftedBool::parse(value)
                .ok_or_else(|| err(format!("predicate value must be tt, ff or bot, got {value:?}")))?;
            if table.insert(l, v).is_some() {
                return Err(err(format!("letter {l:?} assigned twice")));
            }
            offset += part.len() + 1;
        }
        if table.is_empty() {
            return Err(ParseError { position: 0, message: "empty predicate table".to_string() });
        }
        let alphabet = Alphabet::new(table.keys().copied());
        Ok(Predicate { alphabet, table })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Letters outside the table read as undefined.
    pub fn value(&self, letter: char) -> LiftedBool {
        self.table.get(&letter).copied().unwrap_or(LiftedBool::Bottom)
    }

    /// The standing assumption of the case study: no letter tests as
    /// undefined.
    pub fn never_bottom(&self) -> Result<(), FilterError> {
        match self.bottom_letter() {
            Some(l) => Err(FilterError::BottomOnLetter(l)),
            None => Ok(()),
        }
    }

    pub fn bottom_letter(&self) -> Option<char> {
        self.table
            .iter()
            .find(|(_, v)| **v == LiftedBool::Bottom)
            .map(|(l, _)| *l)
    }
}

/// The temporal formula whose "infinitely often" closure says infinitely
/// many positions are kept: the disjunction of the letters testing true.
pub fn psi_p(p: &Predicate) -> Result<LtlFormula, FilterError> {
    p.never_bottom()?;
    let kept = p
        .alphabet
        .letters()
        .iter()
        .filter(|l| p.value(**l) == LiftedBool::True)
        .map(|l| LtlFormula::atom(*l));
    Ok(kept.reduce(LtlFormula::or).unwrap_or_else(LtlFormula::ff))
}

/// The disjunction of every alphabet letter: a position satisfies it
/// exactly when the position is defined.
pub fn any_letter(alphabet: &Alphabet) -> LtlFormula {
    alphabet
        .letters()
        .iter()
        .map(|l| LtlFormula::atom(*l))
        .reduce(LtlFormula::or)
        .unwrap_or_else(LtlFormula::ff)
}

/// The n-th bottom-up iterate of the filter on s. Each step inspects one
/// input position: an undefined test freezes the rest of the output at
/// bottom, a true test emits the letter, a false test skips it. The
/// result is always a finite word followed by a bottom tail.
pub fn apply_gn(p: &Predicate, n: usize, s: &UPStream) -> UPStream {
    let mut kept: Vec<LiftedLetter> = Vec::new();
    for position in 0..n {
        match s.at(position) {
            LiftedLetter::Bottom => break,
            LiftedLetter::Letter(l) => match p.value(l) {
                LiftedBool::Bottom => break,
                LiftedBool::True => kept.push(LiftedLetter::Letter(l)),
                LiftedBool::False => {}
            },
        }
    }
    UPStream::new(kept, vec![LiftedLetter::Bottom])
}

/// The filter itself, in closed form on an ultimately periodic total
/// stream: keep the true-testing letters of the prefix, then repeat the
/// kept letters of one cycle pass. A pass keeping nothing leaves the
/// output frozen after the prefix.
pub fn limit_filter(p: &Predicate, s: &UPStream) -> Result<UPStream, FilterError> {
    if !s.is_total() {
        return Err(FilterError::NotTotal);
    }
    p.never_bottom()?;
    for l in s.letters() {
        if p.value(l) == LiftedBool::Bottom {
            return Err(FilterError::BottomOnLetter(l));
        }
    }
    let (prefix_len, cycle_len) = s.lasso_params();
    let keep = |range: std::ops::Range<usize>| -> Vec<LiftedLetter> {
        range
            .filter_map(|i| match s.at(i) {
                LiftedLetter::Letter(l) if p.value(l) == LiftedBool::True => {
                    Some(LiftedLetter::Letter(l))
                }
                _ => None,
            })
            .collect()
    };
    let kept_prefix = keep(0..prefix_len);
    let kept_cycle = keep(prefix_len..prefix_len + cycle_len);
    if kept_cycle.is_empty() {
        Ok(UPStream::new(kept_prefix, vec![LiftedLetter::Bottom]))
    } else {
        Ok(UPStream::new(kept_prefix, kept_cycle))
    }
}

fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// "At least k of the first n positions hit psi": the join over all
/// increasing k-tuples below n of the conjunction of the shifted
/// translations. The empty tuple makes k = 0 the true formula.
pub fn psi_nk(psi: &LtlFormula, n: usize, k: usize) -> Result<GeomFormula, FilterError> {
    if k > n {
        return Err(FilterError::KExceedsN { n, k });
    }
    let base = f_translate(psi)?;
    let shifted: Vec<GeomFormula> = (0..n)
        .scan(base, |acc, _| {
            let out = acc.clone();
            *acc = next_geom(acc);
            Some(out)
        })
        .collect();
    let disjuncts: Vec<GeomFormula> = increasing_tuples(n, k)
        .into_iter()
        .map(|tuple| crate::geometry::and_all(tuple.iter().map(|i| &shifted[*i])))
        .collect();
    Ok(or_all(disjuncts.iter()))
}

/// "The first k positions satisfy phi": the conjunction of the first k
/// shifts of phi's translation. With phi the any-letter disjunction this
/// says the first k positions are defined.
pub fn phi_k(phi: &LtlFormula, k: usize) -> Result<GeomFormula, FilterError> {
    let base = f_translate(phi)?;
    let conjuncts: Vec<GeomFormula> = (0..k)
        .scan(base, |acc, _| {
            let out = acc.clone();
            *acc = next_geom(acc);
            Some(out)
        })
        .collect();
    Ok(crate::geometry::and_all(conjuncts.iter()))
}

/// Both halves of the transfer property for one (n, k) instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransferCheck {
    /// k hits among the first n inputs force k defined outputs of the
    /// n-th iterate.
    pub iterate_ok: bool,
    /// The same with the filter's limit in place of the iterate.
    pub limit_ok: bool,
}

impl TransferCheck {
    pub fn both(&self) -> bool {
        self.iterate_ok && self.limit_ok
    }
}

/// Checks, by direct evaluation, that k kept letters among the first n
/// input positions force the first k output positions to be defined,
/// both for the n-th iterate and for the limit.
pub fn transfer_check(
    p: &Predicate,
    s: &UPStream,
    n: usize,
    k: usize,
) -> Result<TransferCheck, FilterError> {
    if !s.is_total() {
        return Err(FilterError::NotTotal);
    }
    let psi = psi_p(p)?;
    let hits = psi_nk(&psi, n, k)?;
    let defined = phi_k(&any_letter(p.alphabet()), k)?;
    let budget = lasso_budget(s) + n;
    let input_hits = geom_sat(&Valuation::stream(s.clone()), &hits, budget)?;
    let sat_out = |out: UPStream| -> Result<bool, FilterError> {
        Ok(geom_sat(&Valuation::stream(out), &defined, budget)?.is_holds())
    };
    let iterate_ok = !input_hits.is_holds() || sat_out(apply_gn(p, n, s))?;
    let limit_ok = !input_hits.is_holds() || sat_out(limit_filter(p, s)?)?;
    Ok(TransferCheck { iterate_ok, limit_ok })
}

/// The least n >= k such that at least k of the first n positions hit
/// psi, or None when no such n exists. On an ultimately periodic stream
/// hits past the prefix recur with the cycle's period, so searching
/// positions below prefix + (k+1) * cycle is exhaustive.
pub fn witness_n(s: &UPStream, psi: &LtlFormula, k: usize) -> Result<Option<usize>, FilterError> {
    if !s.is_total() {
        return Err(FilterError::NotTotal);
    }
    let base = f_translate(psi)?;
    let (prefix_len, cycle_len) = s.lasso_params();
    let bound = prefix_len + (k + 1) * cycle_len;
    let v = Valuation::stream(s.clone());
    let budget = lasso_budget(s) + bound;
    let mut hit_count = vec![0usize; bound + 1];
    let mut shifted = base;
    for i in 0..bound {
        let hit = geom_sat(&v, &shifted, budget)?.is_holds();
        hit_count[i + 1] = hit_count[i] + usize::from(hit);
        shifted = next_geom(&shifted);
    }
    Ok((k..=bound).find(|n| hit_count[*n] >= k))
}

/// The full input/output specification of the filter, checked at one
/// stream: if kept letters occur infinitely often, the filtered stream
/// must be total, and every k up to k_max must admit a witness n whose
/// transfer instance holds. Vacuously true otherwise.
pub fn filter_spec_check(
    p: &Predicate,
    s: &UPStream,
    k_max: usize,
) -> Result<bool, FilterError> {
    if !s.is_total() {
        return Err(FilterError::NotTotal);
    }
    let psi = psi_p(p)?;
    let infinitely_often = LtlFormula::always(LtlFormula::eventually(psi.clone()));
    if !infinitely_often.evaluate(s) {
        return Ok(true);
    }
    let output_total = LtlFormula::always(any_letter(p.alphabet())).evaluate(&limit_filter(p, s)?);
    let mut witnessed = true;
    for k in 0..=k_max {
        match witness_n(s, &psi, k)? {
            None => witnessed = false,
            Some(n) => witnessed = witnessed && transfer_check(p, s, n, k)?.both(),
        }
    }
    Ok(output_total && witnessed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::LtlFormula;

    fn is_a() -> Predicate {
        Predicate::parse("a=tt,b=ff").unwrap()
    }

    fn stream(text: &str) -> UPStream {
        UPStream::parse(text).unwrap()
    }

    #[test]
    fn kept_letter_formula_is_the_true_disjunction() {
        assert_eq!(psi_p(&is_a()).unwrap().to_string(), "a");
        let none = Predicate::parse("a=ff,b=ff").unwrap();
        assert_eq!(psi_p(&none).unwrap(), LtlFormula::ff());
        let both = Predicate::parse("a=tt,b=tt").unwrap();
        assert_eq!(psi_p(&both).unwrap().to_string(), "a | b");
        let infinitely_often = LtlFormula::always(LtlFormula::eventually(psi_p(&is_a()).unwrap()));
        assert!(infinitely_often.evaluate(&stream("|ab")));
        let stalled = Predicate::parse("a=bot,b=ff").unwrap();
        assert_eq!(psi_p(&stalled), Err(FilterError::BottomOnLetter('a')));
    }

    #[test]
    fn predicate_tables_are_validated() {
        let alphabet = Alphabet::new(['a', 'b']);
        assert!(matches!(
            Predicate::new(alphabet, [('a', LiftedBool::True)]),
            Err(FilterError::UnassignedLetter('b'))
        ));
        assert!(Predicate::parse("a=tt,a=ff").is_err());
        assert!(Predicate::parse("ab=tt").is_err());
        assert!(Predicate::parse("a=maybe").is_err());
    }

    #[test]
    fn iterates_grow_one_inspected_position_at_a_time() {
        let p = is_a();
        let s = stream("|ab");
        assert_eq!(apply_gn(&p, 0, &s), UPStream::bottom());
        assert_eq!(apply_gn(&p, 1, &s).to_string(), "a|_");
        assert_eq!(apply_gn(&p, 2, &s).to_string(), "a|_");
        assert_eq!(apply_gn(&p, 3, &s).to_string(), "aa|_");
        for text in ["|ab", "ba|ab", "bb|ba", "|b", "aaa|a"] {
            let s = stream(text);
            for n in 0..8 {
                assert!(apply_gn(&p, n, &s).leq(&apply_gn(&p, n + 1, &s)));
            }
        }
    }

    #[test]
    fn an_undefined_test_freezes_the_iterates() {
        let p = Predicate::parse("a=bot").unwrap();
        assert_eq!(apply_gn(&p, 5, &stream("|a")), UPStream::bottom());
        assert_eq!(limit_filter(&p, &stream("|a")), Err(FilterError::BottomOnLetter('a')));
    }

    #[test]
    fn limit_keeps_one_cycle_pass() {
        let p = is_a();
        assert_eq!(limit_filter(&p, &stream("|ab")).unwrap().to_string(), "|a");
        assert_eq!(limit_filter(&p, &stream("|b")).unwrap(), UPStream::bottom());
        assert_eq!(limit_filter(&p, &stream("ba|ab")).unwrap().to_string(), "|a");
        assert_eq!(limit_filter(&p, &stream("ab|b")).unwrap().to_string(), "a|_");
        assert_eq!(limit_filter(&p, &stream("_a|a")), Err(FilterError::NotTotal));
    }

    #[test]
    fn iterates_stabilize_to_the_limit() {
        let p = is_a();
        for text in ["|ab", "ba|ab", "bb|ba", "|b", "aaa|a", "abab|ba"] {
            let s = stream(text);
            let (prefix_len, cycle_len) = s.lasso_params();
            let limit = limit_filter(&p, &s).unwrap();
            for m in 0..=20 {
                let n = prefix_len + (m + 1) * (cycle_len + 1);
                let iterate = apply_gn(&p, n, &s);
                assert!(iterate.leq(&limit));
                for i in 0..m {
                    assert_eq!(iterate.at(i), limit.at(i), "position {i} of {text} at n={n}");
                }
            }
        }
    }

    #[test]
    fn hit_count_formulas_enumerate_tuples() {
        let a = LtlFormula::atom('a');
        assert!(phi_k(&a, 0).unwrap().is_top());
        assert!(psi_nk(&a, 0, 0).unwrap().is_top());
        assert_eq!(psi_nk(&a, 1, 1).unwrap(), f_translate(&a).unwrap());
        assert_eq!(psi_nk(&a, 3, 2).unwrap().disjuncts().unwrap().len(), 3);
        assert_eq!(psi_nk(&a, 2, 3), Err(FilterError::KExceedsN { n: 2, k: 3 }));
    }

    #[test]
    fn defined_prefix_formula_matches_the_temporal_reading() {
        let p = is_a();
        let phi = any_letter(p.alphabet());
        for text in ["a|_", "ab|_", "|ab", "_|a", "|_"] {
            let s = stream(text);
            for k in 0..4 {
                let geometric = geom_sat(
                    &Valuation::stream(s.clone()),
                    &phi_k(&phi, k).unwrap(),
                    lasso_budget(&s) + k,
                )
                .unwrap()
                .is_holds();
                let temporal = (0..k).all(|m| {
                    let mut f = phi.clone();
                    for _ in 0..m {
                        f = LtlFormula::next(f);
                    }
                    f.evaluate(&s)
                });
                let defined = (0..k).all(|i| !s.at(i).is_bottom());
                assert_eq!(geometric, temporal, "{text} k={k}");
                assert_eq!(geometric, defined, "{text} k={k}");
            }
        }
    }

    #[test]
    fn transfer_holds_on_the_worked_cases() {
        let p = is_a();
        let t = transfer_check(&p, &stream("|ab"), 2, 1).unwrap();
        assert!(t.iterate_ok && t.limit_ok);
        for n in 1..5 {
            let t = transfer_check(&p, &stream("|b"), n, n).unwrap();
            assert!(t.both(), "vacuous case n={n}");
        }
    }

    #[test]
    fn transfer_sweep_stays_clean() {
        for pred in ["a=tt,b=ff", "a=ff,b=tt", "a=tt,b=tt"] {
            let p = Predicate::parse(pred).unwrap();
            for text in ["|ab", "ba|ab", "bb|ba", "|b", "|a", "abba|bab"] {
                let s = stream(text);
                for n in 0..=6 {
                    for k in 0..=n.min(3) {
                        let t = transfer_check(&p, &s, n, k).unwrap();
                        assert!(t.both(), "pred={pred} s={text} n={n} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn witness_search_finds_the_least_n() {
        let a = LtlFormula::atom('a');
        assert_eq!(witness_n(&stream("_a|_a"), &a, 1), Err(FilterError::NotTotal));
        assert_eq!(witness_n(&stream("|ba"), &a, 2).unwrap(), Some(4));
        assert_eq!(witness_n(&stream("|b"), &a, 1).unwrap(), None);
        assert_eq!(witness_n(&stream("|ba"), &a, 0).unwrap(), Some(0));
    }

    #[test]
    fn witness_agrees_with_direct_formula_evaluation() {
        let a = LtlFormula::atom('a');
        for text in ["|ba", "b|ab", "aab|b", "|b", "a|b"] {
            let s = stream(text);
            let (prefix_len, cycle_len) = s.lasso_params();
            for k in 0..=3 {
                let bound = prefix_len + (k + 1) * cycle_len;
                let direct = (k..=bound).find(|n| {
                    geom_sat(
                        &Valuation::stream(s.clone()),
                        &psi_nk(&a, *n, k).unwrap(),
                        lasso_budget(&s) + n,
                    )
                    .unwrap()
                    .is_holds()
                });
                assert_eq!(witness_n(&s, &a, k).unwrap(), direct, "{text} k={k}");
            }
        }
    }

    #[test]
    fn witnesses_for_every_k_characterize_infinitely_often() {
        let a = LtlFormula::atom('a');
        let infinitely_often = LtlFormula::always(LtlFormula::eventually(a.clone()));
        for text in ["|ba", "b|ab", "aab|b", "|b", "a|b", "aaaaa|b", "|a"] {
            let s = stream(text);
            let (prefix_len, _) = s.lasso_params();
            let threshold = prefix_len + 1;
            let holds = infinitely_often.evaluate(&s);
            assert_eq!(
                holds,
                witness_n(&s, &a, threshold).unwrap().is_some(),
                "threshold witness on {text}"
            );
            if holds {
                for k in 0..=threshold {
                    assert!(witness_n(&s, &a, k).unwrap().is_some(), "{text} k={k}");
                }
            }
        }
    }

    #[test]
    fn specification_verdicts() {
        let p = is_a();
        assert!(filter_spec_check(&p, &stream("|ab"), 4).unwrap());
        assert!(filter_spec_check(&p, &stream("|b"), 4).unwrap());
        assert!(filter_spec_check(&p, &stream("bb|ba"), 3).unwrap());
        assert_eq!(filter_spec_check(&p, &stream("_|a"), 2), Err(FilterError::NotTotal));
    }
}
