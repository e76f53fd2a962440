//! Compiling temporal formulas into observation logic.
//!
//! Formulas in the until fragment become positive formulas; negation-free
//! formulas become theories. Until and weak until compile to countable
//! joins and meets of unfoldings of a step operator.
//!
//! Every generated family carries the stabilization hint (p, q) -> p + q.
//! A stream with those lasso parameters has at most p + q distinct
//! suffixes, so the unfolding chains are monotone over a space of that
//! size and stabilize within p + q steps; member n of a family is the
//! (n + 1)-st unfolding, making members 0 through p + q - 1 exhaustive.

use std::fmt;
use std::sync::Mutex;

use crate::geometry::{
    and_geom, lasso_sum_hint, next_geom, or_geom, theory_model, GeomError, GeomFormula,
    Sequent, Theory, TheoryFamily, Valuation,
};
use crate::ltl::{LtlFormula, LtlNode, Stratum};
use crate::stream::{FiniteElement, UPStream};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TranslateError {
    /// The formula translation needs the fragment without weak until.
    NotAGFormula,
    /// The theory translation needs a negation-free formula.
    NegationPresent,
    /// The shortcut translation only handles eventually/always towers.
    UnsupportedShape,
    /// A generated family failed to stabilize within its own hint.
    /// Signals a defect in hint construction, never retried.
    BudgetInsufficient { budget: usize },
    Geom(GeomError),
}

impl fmt::Display for TranslateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TranslateError::NotAGFormula => {
                write!(f, "formula falls outside the until fragment")
            }
            TranslateError::NegationPresent => {
                write!(f, "theory translation requires a negation-free formula")
            }
            TranslateError::UnsupportedShape => {
                write!(f, "shortcut translation handles only eventually/always towers")
            }
            TranslateError::BudgetInsufficient { budget } => {
                write!(f, "satisfaction undecided at budget {budget}")
            }
            TranslateError::Geom(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for TranslateError {}

impl From<GeomError> for TranslateError {
    fn from(e: GeomError) -> TranslateError {
        TranslateError::Geom(e)
    }
}

/// The unfolding step for until at the formula level:
/// theta maps to psi \/ (phi /\ next theta).
#[derive(Clone)]
pub struct HOperator {
    phi: GeomFormula,
    psi: GeomFormula,
}

impl HOperator {
    pub fn new(phi: GeomFormula, psi: GeomFormula) -> HOperator {
        HOperator { phi, psi }
    }

    pub fn apply(&self, theta: &GeomFormula) -> GeomFormula {
        or_geom(&self.psi, &and_geom(&self.phi, &next_geom(theta)))
    }

    pub fn iterate(&self, n: usize, seed: &GeomFormula) -> GeomFormula {
        let mut acc = seed.clone();
        for _ in 0..n {
            acc = self.apply(&acc);
        }
        acc
    }
}

/// The unfolding step for until at the theory level:
/// v maps to u joined with (t met with the shift of v).
#[derive(Clone)]
pub struct THOperator {
    t: Theory,
    u: Theory,
}

impl THOperator {
    pub fn new(t: Theory, u: Theory) -> THOperator {
        THOperator { t, u }
    }

    pub fn apply(&self, v: Theory) -> Theory {
        self.u.clone().join(self.t.clone().meet(v.next()))
    }

    pub fn iterate(&self, n: usize, seed: &Theory) -> Theory {
        let mut acc = seed.clone();
        for _ in 0..n {
            acc = self.apply(acc);
        }
        acc
    }
}

/// Translates a formula of the until fragment (no weak until, no negation)
/// into a positive formula satisfied by exactly the streams that satisfy
/// the input. Until becomes a hinted countable join of unfoldings.
pub fn f_translate(phi: &LtlFormula) -> Result<GeomFormula, TranslateError> {
    if phi.classify() > Stratum::G {
        return Err(TranslateError::NotAGFormula);
    }
    Ok(match phi.node() {
        LtlNode::Atom(c) => GeomFormula::atom(FiniteElement::single(0, *c)),
        LtlNode::True => GeomFormula::top(),
        LtlNode::False => GeomFormula::bottom(),
        LtlNode::And(l, r) => and_geom(&f_translate(l)?, &f_translate(r)?),
        LtlNode::Or(l, r) => or_geom(&f_translate(l)?, &f_translate(r)?),
        LtlNode::Next(x) => next_geom(&f_translate(x)?),
        LtlNode::Until(l, r) => {
            let h = HOperator::new(f_translate(l)?, f_translate(r)?);
            // Member n is the (n+1)-st unfolding. Checks scan members in
            // order, so grow the chain once and hand out clones.
            let members = Mutex::new(Vec::new());
            GeomFormula::omega_hinted(
                move |n| {
                    let mut members = members.lock().expect("member cache");
                    while members.len() <= n {
                        let prev =
                            members.last().cloned().unwrap_or_else(GeomFormula::bottom);
                        members.push(h.apply(&prev));
                    }
                    members[n].clone()
                },
                lasso_sum_hint(),
            )
        }
        LtlNode::WeakUntil(_, _) | LtlNode::Not(_) => return Err(TranslateError::NotAGFormula),
    })
}

/// Translates a negation-free formula into a theory whose stream models
/// are exactly the streams satisfying the input. Formulas of the until
/// fragment become a single fact; conjunction, disjunction and next map to
/// the theory combinators; weak until and until become hinted countable
/// meets and joins of unfoldings.
pub fn t_translate(phi: &LtlFormula) -> Result<Theory, TranslateError> {
    if !phi.is_negation_free() {
        return Err(TranslateError::NegationPresent);
    }
    if phi.classify() <= Stratum::G {
        return Ok(Theory::finite([Sequent::fact(f_translate(phi)?)]));
    }
    Ok(match phi.node() {
        LtlNode::And(l, r) => t_translate(l)?.meet(t_translate(r)?),
        LtlNode::Or(l, r) => t_translate(l)?.join(t_translate(r)?),
        LtlNode::Next(x) => t_translate(x)?.next(),
        LtlNode::WeakUntil(l, r) => {
            let op = THOperator::new(t_translate(l)?, t_translate(r)?);
            Theory::MeetOmega(TheoryFamily::hinted(
                memoized_iterates(op, Theory::top_theory()),
                lasso_sum_hint(),
            ))
        }
        LtlNode::Until(l, r) => {
            let op = THOperator::new(t_translate(l)?, t_translate(r)?);
            Theory::JoinOmega(TheoryFamily::hinted(
                memoized_iterates(op, Theory::bottom_theory()),
                lasso_sum_hint(),
            ))
        }
        // Everything else is classified at or below the until fragment
        // and was handled above.
        _ => unreachable!("covered by the until-fragment branch"),
    })
}

/// Shortcut translation for towers of eventually/always over the base
/// layer: always becomes a countable meet of shifts, eventually a
/// countable join of shifts. Model-equivalent to [`t_translate`] on
/// stream valuations; the shift hint is exact because suffixes of a
/// lasso stream repeat with period q past the prefix.
pub fn simplified_translate(phi: &LtlFormula) -> Result<Theory, TranslateError> {
    match phi.node() {
        LtlNode::Until(l, r) if matches!(l.node(), LtlNode::True) => {
            let inner = simplified_translate(r)?;
            Ok(Theory::JoinOmega(TheoryFamily::hinted(
                move |m| shift_many(inner.clone(), m),
                lasso_sum_hint(),
            )))
        }
        LtlNode::WeakUntil(l, r) if matches!(r.node(), LtlNode::False) => {
            let inner = simplified_translate(l)?;
            Ok(Theory::MeetOmega(TheoryFamily::hinted(
                move |n| shift_many(inner.clone(), n),
                lasso_sum_hint(),
            )))
        }
        _ if phi.classify() == Stratum::Layer0 => {
            Ok(Theory::finite([Sequent::fact(f_translate(phi)?)]))
        }
        _ => Err(TranslateError::UnsupportedShape),
    }
}

fn shift_many(t: Theory, n: usize) -> Theory {
    (0..n).fold(t, |acc, _| acc.next())
}

/// Member n as the (n+1)-st unfolding from the seed, each computed once.
/// Satisfaction checks walk members front to back, so the chain grows
/// incrementally and later scans of the same theory reuse it.
fn memoized_iterates(op: THOperator, seed: Theory) -> impl Fn(usize) -> Theory + Send + Sync {
    let members: Mutex<Vec<Theory>> = Mutex::new(Vec::new());
    move |n| {
        let mut members = members.lock().expect("member cache");
        while members.len() <= n {
            let prev = members.last().cloned().unwrap_or_else(|| seed.clone());
            members.push(op.apply(prev));
        }
        members[n].clone()
    }
}

/// The budget sufficient to decide any theory this module generates
/// against the stream: every hint evaluates to exactly this number.
pub fn lasso_budget(s: &UPStream) -> usize {
    let (p, q) = s.lasso_params();
    p + q
}

/// Decides satisfaction by translating to a theory and model checking the
/// stream's valuation. An undecided answer means a hint failed to cover
/// its family and is reported as an error, never coerced to a boolean.
pub fn holds_via_geometry(phi: &LtlFormula, s: &UPStream) -> Result<bool, TranslateError> {
    let theory = t_translate(phi)?;
    resolve_model(&Valuation::stream(s.clone()), &theory, lasso_budget(s))
}

/// Model checks and insists on a definite answer.
pub fn resolve_model(v: &Valuation, t: &Theory, budget: usize) -> Result<bool, TranslateError> {
    match theory_model(v, t, budget)? {
        crate::geometry::SatResult::Holds => Ok(true),
        crate::geometry::SatResult::Fails => Ok(false),
        crate::geometry::SatResult::UnknownAtBudget(b) => {
            Err(TranslateError::BudgetInsufficient { budget: b })
        }
    }
}

/// Structural probe: does any theory-level countable join occur, sampling
/// the first `samples` members of each countable meet? Used to confirm
/// that translations of formulas below the weak-until ceiling stay within
/// countable meets of listed theories.
pub fn contains_join_omega(t: &Theory, samples: usize) -> bool {
    match t {
        Theory::Finite(_) | Theory::StreamGenerated(_) => false,
        Theory::Meet(parts) | Theory::JoinFin(parts) => {
            parts.iter().any(|p| contains_join_omega(p, samples))
        }
        Theory::MeetOmega(fam) => {
            (0..samples).any(|n| contains_join_omega(&fam.member(n), samples))
        }
        Theory::JoinOmega(_) => true,
        Theory::NextT(inner) => contains_join_omega(inner, samples),
    }
}
