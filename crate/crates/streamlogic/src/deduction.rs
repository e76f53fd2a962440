//! A kernel-style checker for derivations over a theory of sequents.
//!
//! A derivation is a finite tree; each node names a rule, states its
//! conclusion sequent, and carries the premises plus whatever instantiation
//! data the rule schema needs. [`check`] verifies every node against its
//! schema with nothing clever in between: theory membership is literal
//! (up to the normalized form listed joins always have), and countable
//! joins are rejected rather than approximated, since their rule instances
//! cannot be finitely inspected.
//!
//! [`soundness_check`] is the empirical backstop: over every truth table
//! on a small atom universe, a checked derivation's conclusion must hold
//! in every model of the theory.

use std::fmt;

use serde_json::{json, Value};

use crate::geometry::{
    all_table_valuations, and_geom, geom_from_json, geom_sat, geom_to_json, or_all,
    sequent_from_json, sequent_to_json, theory_model, GeomError, GeomFormula, PrintCaps,
    Sequent, Theory, Valuation,
};
use crate::stream::FiniteElement;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Th,
    Ax,
    Cut,
    AndL1,
    AndL2,
    AndR,
    TrueR,
    JoinL,
    JoinR,
    Dist,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Th => "Th",
            Rule::Ax => "Ax",
            Rule::Cut => "Cut",
            Rule::AndL1 => "AndL1",
            Rule::AndL2 => "AndL2",
            Rule::AndR => "AndR",
            Rule::TrueR => "TrueR",
            Rule::JoinL => "JoinL",
            Rule::JoinR => "JoinR",
            Rule::Dist => "Dist",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        Some(match name {
            "Th" => Rule::Th,
            "Ax" => Rule::Ax,
            "Cut" => Rule::Cut,
            "AndL1" => Rule::AndL1,
            "AndL2" => Rule::AndL2,
            "AndR" => Rule::AndR,
            "TrueR" => Rule::TrueR,
            "JoinL" => Rule::JoinL,
            "JoinR" => Rule::JoinR,
            "Dist" => Rule::Dist,
            _ => return None,
        })
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Instantiation data a rule schema cannot reconstruct from conclusion and
/// premises alone.
#[derive(Debug, Clone, PartialEq)]
pub enum RuleData {
    None,
    /// The two conjuncts a projection rule splits.
    Conjuncts { left: GeomFormula, right: GeomFormula },
    /// The join a injection rule targets, and which disjunct it starts from.
    JoinIndex { family: Vec<GeomFormula>, index: usize },
    /// Factor and parts of a distribution instance.
    Dist { factor: GeomFormula, parts: Vec<GeomFormula> },
    /// The middle formula of a cut, recorded for readability.
    Interpolant(GeomFormula),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub rule: Rule,
    pub conclusion: Sequent,
    pub premises: Vec<Derivation>,
    pub data: RuleData,
}

/// Where in the tree a check failed (child indices from the root) and why.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleViolation {
    pub path: Vec<usize>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckError {
    TheoryNotFinite,
    /// A formula in the tree is a countable join; its rule instances
    /// cannot be finitely verified.
    InfiniteJoinUnsupported { path: Vec<usize> },
    Violation(RuleViolation),
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckError::TheoryNotFinite => {
                write!(f, "the checker needs a theory in listed-sequent form")
            }
            CheckError::InfiniteJoinUnsupported { path } => {
                write!(f, "countable join at {path:?} cannot be checked")
            }
            CheckError::Violation(v) => write!(f, "rule violation at {:?}: {}", v.path, v.reason),
        }
    }
}

impl std::error::Error for CheckError {}

/// Verifies every node of the derivation against its rule schema, with the
/// theory's sequents as the only admitted leaves besides the logical rules.
pub fn check(d: &Derivation, theory: &Theory) -> Result<(), CheckError> {
    let sequents = theory.sequents().ok_or(CheckError::TheoryNotFinite)?;
    let mut path = Vec::new();
    check_node(d, sequents, &mut path)
}

fn check_node(
    d: &Derivation,
    sequents: &[Sequent],
    path: &mut Vec<usize>,
) -> Result<(), CheckError> {
    require_finite(d, path)?;
    let fail = |reason: String| {
        Err(CheckError::Violation(RuleViolation { path: path.clone(), reason }))
    };
    match d.rule {
        Rule::Th => {
            expect_leaf(d, path)?;
            expect_no_data(d, path)?;
            if !sequents.contains(&d.conclusion) {
                return fail(format!("sequent {} is not in the theory", d.conclusion));
            }
        }
        Rule::Ax => {
            expect_leaf(d, path)?;
            expect_no_data(d, path)?;
            if d.conclusion.ante != d.conclusion.cons {
                return fail("axiom requires identical sides".to_string());
            }
        }
        Rule::Cut => {
            if d.premises.len() != 2 {
                return fail(format!("cut takes 2 premises, got {}", d.premises.len()));
            }
            let (p1, p2) = (&d.premises[0].conclusion, &d.premises[1].conclusion);
            if p1.cons != p2.ante {
                return fail("cut premises do not share a middle formula".to_string());
            }
            match &d.data {
                RuleData::None => {}
                RuleData::Interpolant(i) if *i == p1.cons => {}
                RuleData::Interpolant(_) => {
                    return fail("recorded interpolant differs from the premises".to_string())
                }
                _ => return fail("cut carries unexpected data".to_string()),
            }
            if d.conclusion.ante != p1.ante || d.conclusion.cons != p2.cons {
                return fail("cut conclusion must chain the premise endpoints".to_string());
            }
        }
        Rule::AndL1 | Rule::AndL2 => {
            expect_leaf(d, path)?;
            let (left, right) = match &d.data {
                RuleData::Conjuncts { left, right } => (left, right),
                _ => return fail("projection needs its two conjuncts recorded".to_string()),
            };
            if d.conclusion.ante != and_geom(left, right) {
                return fail("antecedent is not the meet of the recorded conjuncts".to_string());
            }
            let projected = if d.rule == Rule::AndL1 { left } else { right };
            if d.conclusion.cons != *projected {
                return fail("consequent is not the projected conjunct".to_string());
            }
        }
        Rule::AndR => {
            expect_no_data(d, path)?;
            if d.premises.len() != 2 {
                return fail(format!("pairing takes 2 premises, got {}", d.premises.len()));
            }
            let (p1, p2) = (&d.premises[0].conclusion, &d.premises[1].conclusion);
            if p1.ante != d.conclusion.ante || p2.ante != d.conclusion.ante {
                return fail("pairing premises must share the conclusion's antecedent".to_string());
            }
            if d.conclusion.cons != and_geom(&p1.cons, &p2.cons) {
                return fail("consequent is not the meet of the premise consequents".to_string());
            }
        }
        Rule::TrueR => {
            expect_leaf(d, path)?;
            expect_no_data(d, path)?;
            if !d.conclusion.cons.is_top() {
                return fail("truth introduction requires a true consequent".to_string());
            }
        }
        Rule::JoinL => {
            expect_no_data(d, path)?;
            for p in &d.premises {
                if p.conclusion.cons != d.conclusion.cons {
                    return fail("case split premises must share the consequent".to_string());
                }
            }
            let antes: Vec<&GeomFormula> = d.premises.iter().map(|p| &p.conclusion.ante).collect();
            if d.conclusion.ante != or_all(antes) {
                return fail("antecedent is not the join of the premise antecedents".to_string());
            }
        }
        Rule::JoinR => {
            expect_leaf(d, path)?;
            let (family, index) = match &d.data {
                RuleData::JoinIndex { family, index } => (family, *index),
                _ => return fail("injection needs its join family recorded".to_string()),
            };
            let Some(member) = family.get(index) else {
                return fail(format!("index {index} outside a family of {}", family.len()));
            };
            if d.conclusion.ante != *member {
                return fail("antecedent is not the indexed family member".to_string());
            }
            if d.conclusion.cons != or_all(family.iter()) {
                return fail("consequent is not the join of the family".to_string());
            }
        }
        Rule::Dist => {
            expect_leaf(d, path)?;
            let (factor, parts) = match &d.data {
                RuleData::Dist { factor, parts } => (factor, parts),
                _ => return fail("distribution needs factor and parts recorded".to_string()),
            };
            if d.conclusion.ante != and_geom(factor, &or_all(parts.iter())) {
                return fail("antecedent is not factor meet join-of-parts".to_string());
            }
            let distributed: Vec<GeomFormula> =
                parts.iter().map(|p| and_geom(factor, p)).collect();
            if d.conclusion.cons != or_all(distributed.iter()) {
                return fail("consequent is not the join of factored parts".to_string());
            }
        }
    }
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        check_node(p, sequents, path)?;
        path.pop();
    }
    Ok(())
}

fn require_finite(d: &Derivation, path: &[usize]) -> Result<(), CheckError> {
    let infinite = CheckError::InfiniteJoinUnsupported { path: path.to_vec() };
    if !d.conclusion.ante.is_finite() || !d.conclusion.cons.is_finite() {
        return Err(infinite);
    }
    let data_finite = match &d.data {
        RuleData::None => true,
        RuleData::Conjuncts { left, right } => left.is_finite() && right.is_finite(),
        RuleData::JoinIndex { family, .. } => family.iter().all(GeomFormula::is_finite),
        RuleData::Dist { factor, parts } => {
            factor.is_finite() && parts.iter().all(GeomFormula::is_finite)
        }
        RuleData::Interpolant(i) => i.is_finite(),
    };
    if !data_finite {
        return Err(infinite);
    }
    Ok(())
}

fn expect_leaf(d: &Derivation, path: &[usize]) -> Result<(), CheckError> {
    if d.premises.is_empty() {
        Ok(())
    } else {
        Err(CheckError::Violation(RuleViolation {
            path: path.to_vec(),
            reason: format!("{} takes no premises", d.rule),
        }))
    }
}

fn expect_no_data(d: &Derivation, path: &[usize]) -> Result<(), CheckError> {
    if d.data == RuleData::None {
        Ok(())
    } else {
        Err(CheckError::Violation(RuleViolation {
            path: path.to_vec(),
            reason: format!("{} carries unexpected data", d.rule),
        }))
    }
}

/// Leaf stating a theory sequent.
pub fn thm(sequent: Sequent) -> Derivation {
    Derivation { rule: Rule::Th, conclusion: sequent, premises: Vec::new(), data: RuleData::None }
}

/// Leaf deriving a formula from itself.
pub fn ax(phi: GeomFormula) -> Derivation {
    Derivation {
        rule: Rule::Ax,
        conclusion: Sequent::new(phi.clone(), phi),
        premises: Vec::new(),
        data: RuleData::None,
    }
}

/// Chains two derivations through their shared middle formula.
pub fn cut(d1: Derivation, d2: Derivation) -> Derivation {
    let middle = d1.conclusion.cons.clone();
    let conclusion = Sequent::new(d1.conclusion.ante.clone(), d2.conclusion.cons.clone());
    Derivation {
        rule: Rule::Cut,
        conclusion,
        premises: vec![d1, d2],
        data: RuleData::Interpolant(middle),
    }
}

/// Projects the left conjunct out of a meet.
pub fn and_l1(left: GeomFormula, right: GeomFormula) -> Derivation {
    Derivation {
        rule: Rule::AndL1,
        conclusion: Sequent::new(and_geom(&left, &right), left.clone()),
        premises: Vec::new(),
        data: RuleData::Conjuncts { left, right },
    }
}

/// Projects the right conjunct out of a meet.
pub fn and_l2(left: GeomFormula, right: GeomFormula) -> Derivation {
    Derivation {
        rule: Rule::AndL2,
        conclusion: Sequent::new(and_geom(&left, &right), right.clone()),
        premises: Vec::new(),
        data: RuleData::Conjuncts { left, right },
    }
}

/// Pairs two derivations sharing an antecedent.
pub fn and_r(d1: Derivation, d2: Derivation) -> Derivation {
    let conclusion = Sequent::new(
        d1.conclusion.ante.clone(),
        and_geom(&d1.conclusion.cons, &d2.conclusion.cons),
    );
    Derivation { rule: Rule::AndR, conclusion, premises: vec![d1, d2], data: RuleData::None }
}

/// Everything entails truth.
pub fn true_r(phi: GeomFormula) -> Derivation {
    Derivation {
        rule: Rule::TrueR,
        conclusion: Sequent::new(phi, GeomFormula::top()),
        premises: Vec::new(),
        data: RuleData::None,
    }
}

/// Case split: each premise handles one disjunct of the antecedent. The
/// consequent must be supplied so the zero-premise split is well defined.
pub fn join_l(premises: Vec<Derivation>, consequent: GeomFormula) -> Derivation {
    let ante = or_all(premises.iter().map(|p| &p.conclusion.ante));
    Derivation {
        rule: Rule::JoinL,
        conclusion: Sequent::new(ante, consequent),
        premises,
        data: RuleData::None,
    }
}

/// Falsity entails anything: the case split with no cases.
pub fn ex_falso(consequent: GeomFormula) -> Derivation {
    join_l(Vec::new(), consequent)
}

/// Injects one member of a family into the family's join.
pub fn join_r(family: Vec<GeomFormula>, index: usize) -> Derivation {
    let conclusion = Sequent::new(family[index].clone(), or_all(family.iter()));
    Derivation {
        rule: Rule::JoinR,
        conclusion,
        premises: Vec::new(),
        data: RuleData::JoinIndex { family, index },
    }
}

/// Distributes a factor over a join.
pub fn dist(factor: GeomFormula, parts: Vec<GeomFormula>) -> Derivation {
    let ante = and_geom(&factor, &or_all(parts.iter()));
    let distributed: Vec<GeomFormula> = parts.iter().map(|p| and_geom(&factor, p)).collect();
    let conclusion = Sequent::new(ante, or_all(distributed.iter()));
    Derivation {
        rule: Rule::Dist,
        conclusion,
        premises: Vec::new(),
        data: RuleData::Dist { factor, parts },
    }
}

#[derive(Debug, Clone)]
pub enum SoundnessVerdict {
    Sound,
    Counterexample(Valuation),
}

impl SoundnessVerdict {
    pub fn is_sound(&self) -> bool {
        matches!(self, SoundnessVerdict::Sound)
    }
}

/// Sweeps every truth table over the universe: in each model of the theory,
/// the conclusion's antecedent must force its consequent. Valuations the
/// three-valued checker cannot settle are skipped, which cannot happen for
/// the listed formulas a checked derivation contains.
pub fn soundness_check(
    d: &Derivation,
    theory: &Theory,
    universe: &[FiniteElement],
) -> Result<SoundnessVerdict, GeomError> {
    if universe.len() > 12 {
        return Err(GeomError::UniverseTooLarge { size: universe.len() });
    }
    let budget = 4;
    for v in all_table_valuations(universe)? {
        if theory_model(&v, theory, budget)? != crate::geometry::SatResult::Holds {
            continue;
        }
        let ante = geom_sat(&v, &d.conclusion.ante, budget)?;
        let cons = geom_sat(&v, &d.conclusion.cons, budget)?;
        if ante.is_holds() && cons.is_fails() {
            return Ok(SoundnessVerdict::Counterexample(v));
        }
    }
    Ok(SoundnessVerdict::Sound)
}

/// Every atom mentioned anywhere in the tree, when all formulas are listed.
pub fn derivation_atoms(d: &Derivation) -> Option<std::collections::BTreeSet<FiniteElement>> {
    let mut out = d.conclusion.finite_atoms()?;
    match &d.data {
        RuleData::None => {}
        RuleData::Conjuncts { left, right } => {
            out.extend(left.finite_atoms()?);
            out.extend(right.finite_atoms()?);
        }
        RuleData::JoinIndex { family, .. } => {
            for f in family {
                out.extend(f.finite_atoms()?);
            }
        }
        RuleData::Dist { factor, parts } => {
            out.extend(factor.finite_atoms()?);
            for p in parts {
                out.extend(p.finite_atoms()?);
            }
        }
        RuleData::Interpolant(i) => out.extend(i.finite_atoms()?),
    }
    for p in &d.premises {
        out.extend(derivation_atoms(p)?);
    }
    Some(out)
}

fn rule_data_to_json(data: &RuleData) -> Value {
    let caps = PrintCaps::default();
    match data {
        RuleData::None => Value::Null,
        RuleData::Conjuncts { left, right } => json!({
            "left": geom_to_json(left, caps),
            "right": geom_to_json(right, caps),
        }),
        RuleData::JoinIndex { family, index } => json!({
            "family": family.iter().map(|f| geom_to_json(f, caps)).collect::<Vec<_>>(),
            "index": index,
        }),
        RuleData::Dist { factor, parts } => json!({
            "factor": geom_to_json(factor, caps),
            "parts": parts.iter().map(|f| geom_to_json(f, caps)).collect::<Vec<_>>(),
        }),
        RuleData::Interpolant(i) => json!({ "interpolant": geom_to_json(i, caps) }),
    }
}

fn rule_data_from_json(v: &Value) -> Result<RuleData, String> {
    if v.is_null() {
        return Ok(RuleData::None);
    }
    let obj = v.as_object().ok_or("rule data must be an object or null")?;
    if let (Some(l), Some(r)) = (obj.get("left"), obj.get("right")) {
        return Ok(RuleData::Conjuncts { left: geom_from_json(l)?, right: geom_from_json(r)? });
    }
    if let (Some(fam), Some(idx)) = (obj.get("family"), obj.get("index")) {
        let family = fam
            .as_array()
            .ok_or("family must be an array")?
            .iter()
            .map(geom_from_json)
            .collect::<Result<Vec<_>, _>>()?;
        let index = idx.as_u64().ok_or("index must be a number")? as usize;
        return Ok(RuleData::JoinIndex { family, index });
    }
    if let (Some(f), Some(ps)) = (obj.get("factor"), obj.get("parts")) {
        let parts = ps
            .as_array()
            .ok_or("parts must be an array")?
            .iter()
            .map(geom_from_json)
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(RuleData::Dist { factor: geom_from_json(f)?, parts });
    }
    if let Some(i) = obj.get("interpolant") {
        return Ok(RuleData::Interpolant(geom_from_json(i)?));
    }
    Err("unrecognized rule data shape".to_string())
}

pub fn derivation_to_json(d: &Derivation) -> Value {
    json!({
        "rule": d.rule.name(),
        "conclusion": sequent_to_json(&d.conclusion, PrintCaps::default()),
        "premises": d.premises.iter().map(derivation_to_json).collect::<Vec<_>>(),
        "data": rule_data_to_json(&d.data),
    })
}

pub fn derivation_from_json(v: &Value) -> Result<Derivation, String> {
    let obj = v.as_object().ok_or("derivation must be an object")?;
    let rule_name = obj
        .get("rule")
        .and_then(Value::as_str)
        .ok_or("derivation missing \"rule\"")?;
    let rule = Rule::from_name(rule_name).ok_or_else(|| format!("unknown rule {rule_name:?}"))?;
    let conclusion =
        sequent_from_json(obj.get("conclusion").ok_or("derivation missing \"conclusion\"")?)?;
    let premises = match obj.get("premises") {
        None => Vec::new(),
        Some(p) => p
            .as_array()
            .ok_or("premises must be an array")?
            .iter()
            .map(derivation_from_json)
            .collect::<Result<Vec<_>, _>>()?,
    };
    let data = match obj.get("data") {
        None => RuleData::None,
        Some(d) => rule_data_from_json(d)?,
    };
    Ok(Derivation { rule, conclusion, premises, data })
}

/// Reads a theory file: an object with a "sequents" array.
pub fn theory_from_json(v: &Value) -> Result<Theory, String> {
    let obj = v.as_object().ok_or("theory must be an object")?;
    let seqs = obj
        .get("sequents")
        .and_then(Value::as_array)
        .ok_or("theory missing \"sequents\" array")?;
    let sequents = seqs.iter().map(sequent_from_json).collect::<Result<Vec<_>, _>>()?;
    Ok(Theory::Finite(sequents))
}

/// Writes a listed theory in the file format [`theory_from_json`] reads.
pub fn finite_theory_to_json(t: &Theory) -> Result<Value, GeomError> {
    let seqs = t.sequents().ok_or(GeomError::ExpectedFiniteTheory)?;
    Ok(json!({
        "sequents": seqs
            .iter()
            .map(|s| sequent_to_json(s, PrintCaps::default()))
            .collect::<Vec<_>>(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::or_geom;

    fn el(text: &str) -> FiniteElement {
        FiniteElement::parse(text).unwrap()
    }

    fn atom(text: &str) -> GeomFormula {
        GeomFormula::atom(el(text))
    }

    fn empty() -> Theory {
        Theory::top_theory()
    }

    #[test]
    fn axioms_and_truth_introduction() {
        assert_eq!(check(&ax(GeomFormula::top()), &empty()), Ok(()));
        assert_eq!(check(&ax(atom("{0:a}")), &empty()), Ok(()));
        assert_eq!(check(&true_r(atom("{0:a}")), &empty()), Ok(()));
        let bogus = Derivation {
            rule: Rule::Ax,
            conclusion: Sequent::new(atom("{0:a}"), atom("{0:b}")),
            premises: Vec::new(),
            data: RuleData::None,
        };
        assert!(matches!(check(&bogus, &empty()), Err(CheckError::Violation(v)) if v.path.is_empty()));
    }

    #[test]
    fn theory_membership_is_literal() {
        let t = Theory::finite([Sequent::new(atom("{0:a}"), atom("{1:c}"))]);
        assert_eq!(check(&thm(Sequent::new(atom("{0:a}"), atom("{1:c}"))), &t), Ok(()));
        let stranger = thm(Sequent::new(atom("{0:a}"), atom("{1:b}")));
        assert!(matches!(check(&stranger, &t), Err(CheckError::Violation(_))));
        assert_eq!(
            check(&thm(Sequent::fact(atom("{0:a}"))), &Theory::Meet(vec![])),
            Err(CheckError::TheoryNotFinite)
        );
    }

    #[test]
    fn cut_chains_through_the_theory() {
        let t = Theory::finite([Sequent::new(atom("{0:a}"), atom("{1:c}"))]);
        let d = cut(ax(atom("{0:a}")), thm(Sequent::new(atom("{0:a}"), atom("{1:c}"))));
        assert_eq!(d.conclusion, Sequent::new(atom("{0:a}"), atom("{1:c}")));
        assert_eq!(check(&d, &t), Ok(()));
    }

    #[test]
    fn projections_check_their_side() {
        let d1 = and_l1(atom("{0:a}"), atom("{0:b}"));
        assert_eq!(check(&d1, &empty()), Ok(()));
        assert_eq!(d1.conclusion.cons, atom("{0:a}"));
        let mut tampered = and_l2(atom("{0:a}"), atom("{0:b}"));
        tampered.conclusion.cons = atom("{0:a}");
        assert!(matches!(check(&tampered, &empty()), Err(CheckError::Violation(_))));
    }

    #[test]
    fn pairing_rebuilds_the_meet() {
        let d = and_r(
            and_l1(atom("{0:a}"), atom("{1:b}")),
            and_l2(atom("{0:a}"), atom("{1:b}")),
        );
        let meet = and_geom(&atom("{0:a}"), &atom("{1:b}"));
        assert_eq!(d.conclusion, Sequent::new(meet.clone(), meet));
        assert_eq!(check(&d, &empty()), Ok(()));
    }

    #[test]
    fn case_split_covers_every_disjunct() {
        let family = vec![atom("{0:a}"), atom("{0:b}")];
        let joined = or_geom(&family[0], &family[1]);
        let d = join_l(
            vec![join_r(family.clone(), 0), join_r(family.clone(), 1)],
            joined.clone(),
        );
        assert_eq!(d.conclusion, Sequent::new(joined.clone(), joined.clone()));
        assert_eq!(check(&d, &empty()), Ok(()));
        assert_eq!(check(&ex_falso(joined), &empty()), Ok(()));
    }

    #[test]
    fn injection_requires_the_right_member() {
        let family = vec![atom("{0:a}"), atom("{0:b}")];
        let fine = join_r(family.clone(), 1);
        assert_eq!(check(&fine, &empty()), Ok(()));
        let mut tampered = join_r(family, 1);
        tampered.conclusion.ante = atom("{1:a}");
        assert!(matches!(check(&tampered, &empty()), Err(CheckError::Violation(_))));
    }

    #[test]
    fn distribution_normalizes_both_sides_equal() {
        let d = dist(atom("{0:a}"), vec![atom("{1:b}"), atom("{2:c}")]);
        assert_eq!(d.conclusion.ante, d.conclusion.cons);
        assert_eq!(check(&d, &empty()), Ok(()));
    }

    #[test]
    fn violations_carry_the_failing_path() {
        let mut inner = ax(atom("{0:a}"));
        inner.conclusion.cons = atom("{0:b}");
        let d = cut(ax(atom("{0:a}")), cut(inner, ax(atom("{0:b}"))));
        match check(&d, &empty()) {
            Err(CheckError::Violation(v)) => assert_eq!(v.path, vec![1, 0]),
            other => panic!("expected a violation, got {other:?}"),
        }
    }

    #[test]
    fn countable_joins_are_rejected() {
        let omega = GeomFormula::omega(|n| GeomFormula::atom(FiniteElement::single(n, 'a')));
        let d = true_r(omega);
        assert_eq!(
            check(&d, &empty()),
            Err(CheckError::InfiniteJoinUnsupported { path: vec![] })
        );
    }

    #[test]
    fn checked_derivations_are_sound_on_small_universes() {
        let t = Theory::finite([Sequent::new(atom("{0:a}"), atom("{1:c}"))]);
        let trees = [
            cut(ax(atom("{0:a}")), thm(Sequent::new(atom("{0:a}"), atom("{1:c}")))),
            and_r(
                and_l1(atom("{0:a}"), atom("{1:b}")),
                and_l2(atom("{0:a}"), atom("{1:b}")),
            ),
            dist(atom("{0:a}"), vec![atom("{1:b}"), atom("{1:c}")]),
            true_r(atom("{1:b}")),
        ];
        let universe = [el("{0:a}"), el("{1:b}"), el("{1:c}")];
        for d in &trees {
            assert_eq!(check(d, &t), Ok(()));
            assert!(soundness_check(d, &t, &universe).unwrap().is_sound());
        }
    }

    #[test]
    fn sweep_catches_an_unsound_claim() {
        let bogus = Derivation {
            rule: Rule::Ax,
            conclusion: Sequent::new(atom("{0:a}"), atom("{0:b}")),
            premises: Vec::new(),
            data: RuleData::None,
        };
        let universe = [el("{0:a}"), el("{0:b}")];
        assert!(!soundness_check(&bogus, &empty(), &universe).unwrap().is_sound());
        let too_big: Vec<FiniteElement> =
            (0..13).map(|i| FiniteElement::single(i, 'a')).collect();
        assert!(matches!(
            soundness_check(&bogus, &empty(), &too_big),
            Err(GeomError::UniverseTooLarge { size: 13 })
        ));
    }

    #[test]
    fn derivations_round_trip_through_json() {
        let t = Theory::finite([Sequent::new(atom("{0:a}"), atom("{1:c}"))]);
        let trees = [
            cut(ax(atom("{0:a}")), thm(Sequent::new(atom("{0:a}"), atom("{1:c}")))),
            join_l(
                vec![
                    join_r(vec![atom("{0:a}"), atom("{0:b}")], 0),
                    join_r(vec![atom("{0:a}"), atom("{0:b}")], 1),
                ],
                or_geom(&atom("{0:a}"), &atom("{0:b}")),
            ),
            dist(atom("{0:a}"), vec![atom("{1:b}"), atom("{2:c}")]),
        ];
        for d in &trees {
            let v = derivation_to_json(d);
            let back = derivation_from_json(&v).unwrap();
            assert_eq!(&back, d);
            assert_eq!(check(&back, &t), Ok(()));
        }
    }

    #[test]
    fn theory_files_round_trip() {
        let t = Theory::finite([
            Sequent::new(atom("{0:a}"), atom("{1:c}")),
            Sequent::fact(or_geom(&atom("{0:a}"), &atom("{0:b}"))),
        ]);
        let v = finite_theory_to_json(&t).unwrap();
        let back = theory_from_json(&v).unwrap();
        assert_eq!(back.sequents().unwrap(), t.sequents().unwrap());
        assert!(theory_from_json(&json!({"rules": []})).is_err());
    }

    #[test]
    fn atom_collection_spans_the_tree() {
        let d = cut(ax(atom("{0:a}")), thm(Sequent::new(atom("{0:a}"), atom("{1:c}"))));
        let atoms = derivation_atoms(&d).unwrap();
        assert_eq!(atoms, [el("{0:a}"), el("{1:c}")].into_iter().collect());
    }
}
