//! Positive logic of finite observations over partial streams.
//!
//! An atom is a finite stream element read as the observation "the stream
//! extends this element". Formulas are joins of finite conjunctions of
//! atoms; a join is either listed outright or given by a countable
//! generator. Theories are sets of sequents between formulas, closed under
//! the same two flavors of meet and join plus a shift operator. Everything
//! is checked against valuations: a stream induces one, and finite truth
//! tables over an explicit atom universe support exhaustive enumeration.
//!
//! Generator nodes carry an optional stabilization hint, a function of the
//! lasso parameters (P, Q) of a stream valuation bounding how many members
//! decide the answer. Hints must be total, at least 1, and must not grow
//! when a stream is replaced by one of its suffixes; every hint built in
//! this crate is (p, q) -> p + q, which qualifies. A node without a hint
//! degrades to a three-valued answer instead of guessing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde_json::{json, Value};

use crate::stream::{Alphabet, FiniteElement, UPStream};

/// Errors raised by satisfaction checks and brute-force tooling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeomError {
    /// A table valuation was asked about an atom it does not cover.
    AtomOutsideUniverse { atom: String },
    /// Shifting is only meaningful for stream valuations.
    TableValuationCannotShift,
    /// Exhaustive enumeration refuses universes past 16 atoms.
    UniverseTooLarge { size: usize },
    /// An operation needed a theory in listed-sequent form.
    ExpectedFiniteTheory,
}

impl fmt::Display for GeomError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeomError::AtomOutsideUniverse { atom } => {
                write!(f, "atom {atom} lies outside the valuation's universe")
            }
            GeomError::TableValuationCannotShift => {
                write!(f, "table valuations cannot be shifted")
            }
            GeomError::UniverseTooLarge { size } => {
                write!(f, "universe of {size} atoms is too large to enumerate")
            }
            GeomError::ExpectedFiniteTheory => {
                write!(f, "expected a theory in listed-sequent form")
            }
        }
    }
}

impl std::error::Error for GeomError {}

/// Assigns truth to atoms. A stream answers every atom; a table answers
/// only the atoms of its universe and errors elsewhere.
#[derive(Clone, Debug)]
pub enum Valuation {
    Stream(UPStream),
    Table { universe: Vec<FiniteElement>, truth: BTreeSet<FiniteElement> },
}

impl Valuation {
    pub fn stream(s: UPStream) -> Valuation {
        Valuation::Stream(s)
    }

    pub fn table(
        universe: impl IntoIterator<Item = FiniteElement>,
        truth: impl IntoIterator<Item = FiniteElement>,
    ) -> Valuation {
        Valuation::Table {
            universe: universe.into_iter().collect(),
            truth: truth.into_iter().collect(),
        }
    }

    pub fn atom(&self, d: &FiniteElement) -> Result<bool, GeomError> {
        match self {
            Valuation::Stream(s) => Ok(d.leq_stream(s)),
            Valuation::Table { universe, truth } => {
                if universe.contains(d) {
                    Ok(truth.contains(d))
                } else {
                    Err(GeomError::AtomOutsideUniverse { atom: d.literal() })
                }
            }
        }
    }

    /// Like [`Valuation::atom`] but answers `None` outside a table's
    /// universe instead of erroring. Streams always answer.
    pub fn atom_in_universe(&self, d: &FiniteElement) -> Option<bool> {
        match self {
            Valuation::Stream(s) => Some(d.leq_stream(s)),
            Valuation::Table { universe, truth } => {
                universe.contains(d).then(|| truth.contains(d))
            }
        }
    }

    /// Lasso parameters (prefix length, cycle length) when the valuation
    /// comes from a stream. Only then can stabilization hints be used.
    pub fn lasso(&self) -> Option<(usize, usize)> {
        match self {
            Valuation::Stream(s) => Some(s.lasso_params()),
            Valuation::Table { .. } => None,
        }
    }

    /// The valuation of the stream's tail.
    pub fn shifted(&self) -> Result<Valuation, GeomError> {
        match self {
            Valuation::Stream(s) => Ok(Valuation::Stream(s.suffix(1))),
            Valuation::Table { .. } => Err(GeomError::TableValuationCannotShift),
        }
    }
}

/// A finite conjunction of atoms; the empty conjunction is truth.
/// Conjunction of conjunctions is union, so the type is always in
/// flattened form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ConjFormula {
    atoms: BTreeSet<FiniteElement>,
}

impl ConjFormula {
    pub fn top() -> ConjFormula {
        ConjFormula { atoms: BTreeSet::new() }
    }

    pub fn atom(d: FiniteElement) -> ConjFormula {
        ConjFormula { atoms: BTreeSet::from([d]) }
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = FiniteElement>) -> ConjFormula {
        ConjFormula { atoms: atoms.into_iter().collect() }
    }

    pub fn and(&self, other: &ConjFormula) -> ConjFormula {
        ConjFormula { atoms: self.atoms.union(&other.atoms).cloned().collect() }
    }

    pub fn atoms(&self) -> impl Iterator<Item = &FiniteElement> + '_ {
        self.atoms.iter()
    }

    pub fn is_top(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Moves every atom one position later.
    pub fn shift(&self) -> ConjFormula {
        ConjFormula { atoms: self.atoms.iter().map(FiniteElement::shift).collect() }
    }
}

impl fmt::Display for ConjFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_conj(self, PrintCaps::default()))
    }
}

impl fmt::Debug for ConjFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConjFormula({self})")
    }
}

/// Satisfaction of a conjunction: every atom must hold.
pub fn conj_sat(v: &Valuation, gamma: &ConjFormula) -> Result<bool, GeomError> {
    for atom in gamma.atoms() {
        if !v.atom(atom)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Hints map lasso parameters to a member count that decides the node.
pub type StabilizationHint = Arc<dyn Fn(usize, usize) -> usize + Send + Sync>;

/// The hint attached by every generator this crate constructs.
pub fn lasso_sum_hint() -> StabilizationHint {
    Arc::new(|p, q| p + q)
}

fn combine_hints(
    a: &Option<StabilizationHint>,
    b: &Option<StabilizationHint>,
) -> Option<StabilizationHint> {
    match (a, b) {
        (Some(x), Some(y)) => {
            let (x, y) = (x.clone(), y.clone());
            Some(Arc::new(move |p, q| x(p, q).max(y(p, q))))
        }
        _ => None,
    }
}

/// A countable join given by a total generator. Every node carries its own
/// member cache, shared by clones, so repeated scans of composite joins
/// stay polynomial instead of re-deriving the whole tree per request.
#[derive(Clone)]
pub struct OmegaJoin {
    family: Arc<dyn Fn(usize) -> GeomFormula + Send + Sync>,
    hint: Option<StabilizationHint>,
    cache: Arc<Mutex<BTreeMap<usize, GeomFormula>>>,
}

impl OmegaJoin {
    fn new(
        family: impl Fn(usize) -> GeomFormula + Send + Sync + 'static,
        hint: Option<StabilizationHint>,
    ) -> OmegaJoin {
        OmegaJoin {
            family: Arc::new(family),
            hint,
            cache: Arc::new(Mutex::new(BTreeMap::new())),
        }
    }

    /// The n-th member, computed at most once per node. The generator runs
    /// without the cache lock held, so a composite built from this same
    /// node cannot deadlock; at worst a race recomputes the member.
    pub fn member(&self, n: usize) -> GeomFormula {
        if let Some(hit) = self.cache.lock().expect("member cache").get(&n) {
            return hit.clone();
        }
        let value = (self.family)(n);
        self.cache
            .lock()
            .expect("member cache")
            .entry(n)
            .or_insert(value)
            .clone()
    }

    pub fn has_hint(&self) -> bool {
        self.hint.is_some()
    }

    pub fn hint_bound(&self, p: usize, q: usize) -> Option<usize> {
        self.hint.as_ref().map(|h| h(p, q))
    }
}

/// A positive formula: a finitely listed join of conjunctions, or a
/// countable join. The empty listed join is falsity; the join of just the
/// empty conjunction is truth.
#[derive(Clone)]
pub enum GeomFormula {
    Finite(BTreeSet<ConjFormula>),
    Omega(OmegaJoin),
}

impl GeomFormula {
    pub fn bottom() -> GeomFormula {
        GeomFormula::Finite(BTreeSet::new())
    }

    pub fn top() -> GeomFormula {
        GeomFormula::Finite(BTreeSet::from([ConjFormula::top()]))
    }

    pub fn atom(d: FiniteElement) -> GeomFormula {
        GeomFormula::Finite(BTreeSet::from([ConjFormula::atom(d)]))
    }

    pub fn finite_join(disjuncts: impl IntoIterator<Item = ConjFormula>) -> GeomFormula {
        GeomFormula::Finite(absorb(disjuncts.into_iter().collect()))
    }

    pub fn omega(family: impl Fn(usize) -> GeomFormula + Send + Sync + 'static) -> GeomFormula {
        GeomFormula::Omega(OmegaJoin::new(family, None))
    }

    pub fn omega_hinted(
        family: impl Fn(usize) -> GeomFormula + Send + Sync + 'static,
        hint: StabilizationHint,
    ) -> GeomFormula {
        GeomFormula::Omega(OmegaJoin::new(family, Some(hint)))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, GeomFormula::Finite(_))
    }

    pub fn disjuncts(&self) -> Option<&BTreeSet<ConjFormula>> {
        match self {
            GeomFormula::Finite(ds) => Some(ds),
            GeomFormula::Omega(_) => None,
        }
    }

    /// Syntactic falsity: the empty listed join.
    pub fn is_bottom(&self) -> bool {
        matches!(self, GeomFormula::Finite(ds) if ds.is_empty())
    }

    /// Syntactic truth: some disjunct is the empty conjunction.
    pub fn is_top(&self) -> bool {
        matches!(self, GeomFormula::Finite(ds) if ds.contains(&ConjFormula::top()))
    }

    /// All atoms of a listed join; `None` for generator nodes.
    pub fn finite_atoms(&self) -> Option<BTreeSet<FiniteElement>> {
        match self {
            GeomFormula::Finite(ds) => {
                Some(ds.iter().flat_map(|c| c.atoms().cloned()).collect())
            }
            GeomFormula::Omega(_) => None,
        }
    }
}

/// Equality is set equality of listed joins. Generator nodes never compare
/// equal, not even to themselves: their extension is not inspectable.
impl PartialEq for GeomFormula {
    fn eq(&self, other: &GeomFormula) -> bool {
        match (self, other) {
            (GeomFormula::Finite(a), GeomFormula::Finite(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for GeomFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_geom(self, PrintCaps::default()))
    }
}

impl fmt::Debug for GeomFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GeomFormula({self})")
    }
}

/// Keeps only the minimal conjuncts of a disjunct set. A conjunction whose
/// atom set contains another's is the stronger statement, so it adds no
/// models to the join and is dropped. The antichain form is what keeps
/// iterated meets of listed joins from multiplying out indefinitely.
fn absorb(disjuncts: BTreeSet<ConjFormula>) -> BTreeSet<ConjFormula> {
    let mut kept: Vec<ConjFormula> = Vec::with_capacity(disjuncts.len());
    for c in disjuncts {
        if kept.iter().any(|k| k.atoms.is_subset(&c.atoms)) {
            continue;
        }
        kept.retain(|k| !c.atoms.is_subset(&k.atoms));
        kept.push(c);
    }
    kept.into_iter().collect()
}

/// Join of two formulas. Listed joins unite; a generator joins a listed
/// operand member-wise and two generators join member-wise in lockstep.
/// Member-wise joining is exact in both directions because a hint makes
/// "some member below the hint" equivalent to "some member at all".
pub fn or_geom(a: &GeomFormula, b: &GeomFormula) -> GeomFormula {
    match (a, b) {
        (GeomFormula::Finite(x), GeomFormula::Finite(y)) => {
            GeomFormula::Finite(absorb(x.union(y).cloned().collect()))
        }
        (GeomFormula::Finite(_), GeomFormula::Omega(o)) => {
            let fixed = a.clone();
            let inner = o.clone();
            GeomFormula::Omega(OmegaJoin::new(
                move |n| or_geom(&fixed, &inner.member(n)),
                o.hint.clone(),
            ))
        }
        (GeomFormula::Omega(_), GeomFormula::Finite(_)) => or_geom(b, a),
        (GeomFormula::Omega(x), GeomFormula::Omega(y)) => {
            let (fx, fy) = (x.clone(), y.clone());
            GeomFormula::Omega(OmegaJoin::new(
                move |n| or_geom(&fx.member(n), &fy.member(n)),
                combine_hints(&x.hint, &y.hint),
            ))
        }
    }
}

/// Meet of two formulas, distributing conjunction over the joins. Listed
/// operands multiply out. Against a generator the listed side is pushed
/// into every member. Two generators combine through cumulative joins:
/// member k of the result is (join of the first k+1 members of one side)
/// meet (same for the other), so a witness pair (i, j) appears at member
/// max(i, j) and the combined hint stays exact.
pub fn and_geom(a: &GeomFormula, b: &GeomFormula) -> GeomFormula {
    match (a, b) {
        (GeomFormula::Finite(x), GeomFormula::Finite(y)) => {
            let mut out = BTreeSet::new();
            for cx in x {
                for cy in y {
                    out.insert(cx.and(cy));
                }
            }
            GeomFormula::Finite(absorb(out))
        }
        (GeomFormula::Finite(_), GeomFormula::Omega(o)) => {
            let fixed = a.clone();
            let inner = o.clone();
            GeomFormula::Omega(OmegaJoin::new(
                move |n| and_geom(&fixed, &inner.member(n)),
                o.hint.clone(),
            ))
        }
        (GeomFormula::Omega(_), GeomFormula::Finite(_)) => and_geom(b, a),
        (GeomFormula::Omega(x), GeomFormula::Omega(y)) => {
            let (fx, fy) = (x.clone(), y.clone());
            GeomFormula::Omega(OmegaJoin::new(
                move |k| and_geom(&cumulative_or(&fx, k), &cumulative_or(&fy, k)),
                combine_hints(&x.hint, &y.hint),
            ))
        }
    }
}

fn cumulative_or(o: &OmegaJoin, k: usize) -> GeomFormula {
    let mut acc = o.member(0);
    for n in 1..=k {
        acc = or_geom(&acc, &o.member(n));
    }
    acc
}

/// Join of any number of formulas; the empty join is falsity. Listed
/// operands are united in one pass so the antichain normalization runs
/// once, not once per operand.
pub fn or_all<'a>(parts: impl IntoIterator<Item = &'a GeomFormula>) -> GeomFormula {
    let mut listed: BTreeSet<ConjFormula> = BTreeSet::new();
    let mut lazy: Option<GeomFormula> = None;
    for p in parts {
        match p {
            GeomFormula::Finite(ds) => listed.extend(ds.iter().cloned()),
            omega => {
                lazy = Some(match &lazy {
                    None => omega.clone(),
                    Some(acc) => or_geom(acc, omega),
                });
            }
        }
    }
    let finite = GeomFormula::Finite(absorb(listed));
    match lazy {
        None => finite,
        Some(acc) => or_geom(&finite, &acc),
    }
}

/// Meet of any number of formulas; the empty meet is truth.
pub fn and_all<'a>(parts: impl IntoIterator<Item = &'a GeomFormula>) -> GeomFormula {
    let mut acc = GeomFormula::top();
    for p in parts {
        acc = and_geom(&acc, p);
    }
    acc
}

/// Shifts a formula one position later. Satisfaction against a stream
/// equals satisfaction of the original against the stream's tail; hints
/// survive because they never grow under suffixing.
pub fn next_geom(f: &GeomFormula) -> GeomFormula {
    match f {
        GeomFormula::Finite(ds) => {
            GeomFormula::Finite(ds.iter().map(ConjFormula::shift).collect())
        }
        GeomFormula::Omega(o) => {
            let inner = o.clone();
            GeomFormula::Omega(OmegaJoin::new(
                move |n| next_geom(&inner.member(n)),
                o.hint.clone(),
            ))
        }
    }
}

/// Outcome of a satisfaction check. `UnknownAtBudget` only arises from
/// generator nodes lacking a usable hint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatResult {
    Holds,
    Fails,
    UnknownAtBudget(usize),
}

impl SatResult {
    pub fn from_bool(b: bool) -> SatResult {
        if b {
            SatResult::Holds
        } else {
            SatResult::Fails
        }
    }

    pub fn is_holds(self) -> bool {
        self == SatResult::Holds
    }

    pub fn is_fails(self) -> bool {
        self == SatResult::Fails
    }

    pub fn to_bool(self) -> Option<bool> {
        match self {
            SatResult::Holds => Some(true),
            SatResult::Fails => Some(false),
            SatResult::UnknownAtBudget(_) => None,
        }
    }

    fn and(self, other: SatResult) -> SatResult {
        match (self, other) {
            (SatResult::Fails, _) | (_, SatResult::Fails) => SatResult::Fails,
            (SatResult::UnknownAtBudget(b), _) | (_, SatResult::UnknownAtBudget(b)) => {
                SatResult::UnknownAtBudget(b)
            }
            _ => SatResult::Holds,
        }
    }

    fn or(self, other: SatResult) -> SatResult {
        match (self, other) {
            (SatResult::Holds, _) | (_, SatResult::Holds) => SatResult::Holds,
            (SatResult::UnknownAtBudget(b), _) | (_, SatResult::UnknownAtBudget(b)) => {
                SatResult::UnknownAtBudget(b)
            }
            _ => SatResult::Fails,
        }
    }

    fn implies(self, cons: SatResult) -> SatResult {
        match self {
            SatResult::Fails => SatResult::Holds,
            SatResult::Holds => cons,
            SatResult::UnknownAtBudget(b) => match cons {
                SatResult::Holds => SatResult::Holds,
                _ => SatResult::UnknownAtBudget(b),
            },
        }
    }
}

impl fmt::Display for SatResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SatResult::Holds => write!(f, "holds"),
            SatResult::Fails => write!(f, "fails"),
            SatResult::UnknownAtBudget(b) => write!(f, "unknown at budget {b}"),
        }
    }
}

/// Satisfaction of a formula. Listed joins are decided exactly. A
/// generator is scanned up to min(hint bound, budget): a holding member
/// settles it; exhausting a hint bound with no unknowns refutes it;
/// anything else is unknown at the budget.
pub fn geom_sat(v: &Valuation, f: &GeomFormula, budget: usize) -> Result<SatResult, GeomError> {
    debug_assert!(budget >= 1, "budget must be positive");
    match f {
        GeomFormula::Finite(ds) => {
            for conj in ds {
                if conj_sat(v, conj)? {
                    return Ok(SatResult::Holds);
                }
            }
            Ok(SatResult::Fails)
        }
        GeomFormula::Omega(o) => {
            let bound = v.lasso().and_then(|(p, q)| o.hint_bound(p, q));
            let scan = bound.map_or(budget, |h| h.min(budget));
            let mut unknown = false;
            for n in 0..scan {
                match geom_sat(v, &o.member(n), budget)? {
                    SatResult::Holds => return Ok(SatResult::Holds),
                    SatResult::UnknownAtBudget(_) => unknown = true,
                    SatResult::Fails => {}
                }
            }
            match bound {
                Some(h) if scan >= h && !unknown => Ok(SatResult::Fails),
                _ => Ok(SatResult::UnknownAtBudget(budget)),
            }
        }
    }
}

/// A sequent between positive formulas. Facts carry truth as antecedent.
#[derive(Clone, PartialEq)]
pub struct Sequent {
    pub ante: GeomFormula,
    pub cons: GeomFormula,
}

impl Sequent {
    pub fn new(ante: GeomFormula, cons: GeomFormula) -> Sequent {
        Sequent { ante, cons }
    }

    pub fn fact(cons: GeomFormula) -> Sequent {
        Sequent { ante: GeomFormula::top(), cons }
    }

    pub fn is_fact(&self) -> bool {
        self.ante.is_top()
    }

    /// All atoms when both sides are listed joins.
    pub fn finite_atoms(&self) -> Option<BTreeSet<FiniteElement>> {
        let mut out = self.ante.finite_atoms()?;
        out.extend(self.cons.finite_atoms()?);
        Some(out)
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_sequent(self, PrintCaps::default()))
    }
}

impl fmt::Debug for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sequent({self})")
    }
}

/// A valuation models a sequent when satisfying the antecedent forces the
/// consequent.
pub fn sequent_sat(v: &Valuation, s: &Sequent, budget: usize) -> Result<SatResult, GeomError> {
    let ante = geom_sat(v, &s.ante, budget)?;
    if ante.is_fails() {
        return Ok(SatResult::Holds);
    }
    let cons = geom_sat(v, &s.cons, budget)?;
    Ok(ante.implies(cons))
}

/// A countable family of theories given by a total generator. Like
/// [`OmegaJoin`], each node caches its members, shared across clones.
#[derive(Clone)]
pub struct TheoryFamily {
    family: Arc<dyn Fn(usize) -> Theory + Send + Sync>,
    hint: Option<StabilizationHint>,
    cache: Arc<Mutex<BTreeMap<usize, Theory>>>,
}

impl TheoryFamily {
    pub fn new(family: impl Fn(usize) -> Theory + Send + Sync + 'static) -> TheoryFamily {
        TheoryFamily::from_parts(family, None)
    }

    pub fn hinted(
        family: impl Fn(usize) -> Theory + Send + Sync + 'static,
        hint: StabilizationHint,
    ) -> TheoryFamily {
        TheoryFamily::from_parts(family, Some(hint))
    }

    fn from_parts(
        family: impl Fn(usize) -> Theory + Send + Sync + 'static,
        hint: Option<StabilizationHint>,
    ) -> TheoryFamily {
        TheoryFamily {
            family: Arc::new(family),
            hint,
            cache: Arc::new(Mutex::new(BTreeMap::new())),
        }
    }

    /// The n-th member, computed at most once per node; the generator runs
    /// with the cache lock released.
    pub fn member(&self, n: usize) -> Theory {
        if let Some(hit) = self.cache.lock().expect("member cache").get(&n) {
            return hit.clone();
        }
        let value = (self.family)(n);
        self.cache
            .lock()
            .expect("member cache")
            .entry(n)
            .or_insert(value)
            .clone()
    }

    pub fn has_hint(&self) -> bool {
        self.hint.is_some()
    }

    pub fn hint_bound(&self, p: usize, q: usize) -> Option<usize> {
        self.hint.as_ref().map(|h| h(p, q))
    }
}

/// A theory of sequents, possibly assembled from countable meets and joins.
///
/// `Finite` lists its sequents. `Meet` and `MeetOmega` are intersections of
/// model classes; `JoinFin` and `JoinOmega` are unions. `NextT` shifts a
/// theory wholesale. `StreamGenerated` stands for the theory axiomatizing
/// stream-shaped valuations over an alphabet: its models among streams are
/// all of them, and it is checked schema-wise against tables, never listed.
#[derive(Clone)]
pub enum Theory {
    Finite(Vec<Sequent>),
    Meet(Vec<Theory>),
    MeetOmega(TheoryFamily),
    JoinFin(Vec<Theory>),
    JoinOmega(TheoryFamily),
    NextT(Box<Theory>),
    StreamGenerated(Alphabet),
}

impl Theory {
    pub fn finite(sequents: impl IntoIterator<Item = Sequent>) -> Theory {
        Theory::Finite(sequents.into_iter().collect())
    }

    /// The theory with one fact stating truth: every valuation models it.
    pub fn top_theory() -> Theory {
        Theory::Finite(vec![])
    }

    /// The theory with the fact "falsity": no valuation models it.
    pub fn bottom_theory() -> Theory {
        Theory::Finite(vec![Sequent::fact(GeomFormula::bottom())])
    }

    pub fn sequents(&self) -> Option<&[Sequent]> {
        match self {
            Theory::Finite(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Theory::Finite(_))
    }

    /// Meet of two theories: models are the common models. Listed theories
    /// concatenate. A generator absorbs a listed operand member-wise, and
    /// two generators meet in lockstep; both are exact because the meet
    /// quantifies over all members anyway.
    pub fn meet(self, other: Theory) -> Theory {
        match (self, other) {
            (Theory::Finite(mut a), Theory::Finite(b)) => {
                for seq in b {
                    if !a.contains(&seq) {
                        a.push(seq);
                    }
                }
                Theory::Finite(a)
            }
            (Theory::Finite(a), Theory::MeetOmega(m)) | (Theory::MeetOmega(m), Theory::Finite(a)) => {
                let fixed = Theory::Finite(a);
                let inner = m.clone();
                Theory::MeetOmega(TheoryFamily::from_parts(
                    move |n| fixed.clone().meet(inner.member(n)),
                    m.hint.clone(),
                ))
            }
            (Theory::MeetOmega(x), Theory::MeetOmega(y)) => {
                let (fx, fy) = (x.clone(), y.clone());
                Theory::MeetOmega(TheoryFamily::from_parts(
                    move |n| fx.member(n).meet(fy.member(n)),
                    combine_hints(&x.hint, &y.hint),
                ))
            }
            (Theory::Meet(mut xs), Theory::Meet(ys)) => {
                xs.extend(ys);
                Theory::Meet(xs)
            }
            (Theory::Meet(mut xs), y) => {
                xs.push(y);
                Theory::Meet(xs)
            }
            (x, Theory::Meet(mut ys)) => {
                ys.insert(0, x);
                Theory::Meet(ys)
            }
            (x, y) => Theory::Meet(vec![x, y]),
        }
    }

    /// Join of two theories: models are the models of either side. Two
    /// listed theories materialize into one listed theory. A generator
    /// joins a listed operand member-wise (exact: a union distributes over
    /// an intersection when one side is constant). Two generators produce
    /// the meet over k of (join of the first k+1 members of each side):
    /// a model of either side models every such member, and a model of
    /// neither side fails the member at k = max of the two failing
    /// indices. Failing indices stay below the hints, so the combined
    /// hint stays exact.
    pub fn join(self, other: Theory) -> Theory {
        match (self, other) {
            (a @ Theory::Finite(_), b @ Theory::Finite(_)) => {
                materialize_join_fin(&[a, b]).expect("both operands listed")
            }
            (Theory::Finite(a), Theory::MeetOmega(m)) | (Theory::MeetOmega(m), Theory::Finite(a)) => {
                let fixed = Theory::Finite(a);
                let inner = m.clone();
                Theory::MeetOmega(TheoryFamily::from_parts(
                    move |n| fixed.clone().join(inner.member(n)),
                    m.hint.clone(),
                ))
            }
            (Theory::MeetOmega(x), Theory::MeetOmega(y)) => {
                let (fx, fy) = (x.clone(), y.clone());
                Theory::MeetOmega(TheoryFamily::from_parts(
                    move |k| {
                        Theory::JoinFin(vec![
                            cumulative_meet(&fx, k),
                            cumulative_meet(&fy, k),
                        ])
                    },
                    combine_hints(&x.hint, &y.hint),
                ))
            }
            (Theory::JoinFin(mut xs), Theory::JoinFin(ys)) => {
                xs.extend(ys);
                Theory::JoinFin(xs)
            }
            (Theory::JoinFin(mut xs), y) => {
                xs.push(y);
                Theory::JoinFin(xs)
            }
            (x, Theory::JoinFin(mut ys)) => {
                ys.insert(0, x);
                Theory::JoinFin(ys)
            }
            (x, y) => Theory::JoinFin(vec![x, y]),
        }
    }

    /// Shifts the theory one position later. Listed sequents shift their
    /// formulas; generators shift member-wise; the stream theory and
    /// already-wrapped nodes stay symbolic.
    pub fn next(self) -> Theory {
        match self {
            Theory::Finite(seqs) => Theory::Finite(
                seqs.into_iter()
                    .map(|s| Sequent::new(next_geom(&s.ante), next_geom(&s.cons)))
                    .collect(),
            ),
            Theory::Meet(parts) => Theory::Meet(parts.into_iter().map(Theory::next).collect()),
            Theory::JoinFin(parts) => {
                Theory::JoinFin(parts.into_iter().map(Theory::next).collect())
            }
            Theory::MeetOmega(m) => {
                let inner = m.clone();
                Theory::MeetOmega(TheoryFamily::from_parts(
                    move |n| inner.member(n).next(),
                    m.hint.clone(),
                ))
            }
            Theory::JoinOmega(m) => {
                let inner = m.clone();
                Theory::JoinOmega(TheoryFamily::from_parts(
                    move |n| inner.member(n).next(),
                    m.hint.clone(),
                ))
            }
            t @ (Theory::NextT(_) | Theory::StreamGenerated(_)) => Theory::NextT(Box::new(t)),
        }
    }
}

fn cumulative_meet(family: &TheoryFamily, k: usize) -> Theory {
    let mut acc = family.member(0);
    for n in 1..=k {
        acc = acc.meet(family.member(n));
    }
    acc
}

/// Materializes a finite join of listed theories: one sequent per choice of
/// a sequent from each part, antecedents met and consequents joined.
/// Sequents with syntactically true consequents are dropped and duplicates
/// collapse; neither changes the model class.
pub fn materialize_join_fin(parts: &[Theory]) -> Result<Theory, GeomError> {
    let mut listed = Vec::with_capacity(parts.len());
    for p in parts {
        listed.push(p.sequents().ok_or(GeomError::ExpectedFiniteTheory)?);
    }
    let mut out: Vec<Sequent> = vec![Sequent::new(GeomFormula::top(), GeomFormula::bottom())];
    for part in listed {
        let mut next = Vec::new();
        for acc in &out {
            for seq in part {
                let combined = Sequent::new(
                    and_geom(&acc.ante, &seq.ante),
                    or_geom(&acc.cons, &seq.cons),
                );
                if combined.cons.is_top() {
                    continue;
                }
                if !next.contains(&combined) {
                    next.push(combined);
                }
            }
        }
        out = next;
    }
    Ok(Theory::Finite(out))
}

/// Is the valuation a model of the theory? Listed sequents are exact; meets
/// and joins combine three-valued answers; generator nodes scan up to
/// min(hint bound, budget) as in [`geom_sat`].
pub fn theory_model(v: &Valuation, t: &Theory, budget: usize) -> Result<SatResult, GeomError> {
    debug_assert!(budget >= 1, "budget must be positive");
    match t {
        Theory::Finite(seqs) => {
            let mut acc = SatResult::Holds;
            for s in seqs {
                acc = acc.and(sequent_sat(v, s, budget)?);
                if acc.is_fails() {
                    return Ok(acc);
                }
            }
            Ok(acc)
        }
        Theory::Meet(parts) => {
            let mut acc = SatResult::Holds;
            for p in parts {
                acc = acc.and(theory_model(v, p, budget)?);
                if acc.is_fails() {
                    return Ok(acc);
                }
            }
            Ok(acc)
        }
        Theory::JoinFin(parts) => {
            let mut acc = SatResult::Fails;
            for p in parts {
                acc = acc.or(theory_model(v, p, budget)?);
                if acc.is_holds() {
                    return Ok(acc);
                }
            }
            Ok(acc)
        }
        Theory::MeetOmega(fam) => {
            let bound = v.lasso().and_then(|(p, q)| fam.hint_bound(p, q));
            let scan = bound.map_or(budget, |h| h.min(budget));
            let mut unknown = false;
            for n in 0..scan {
                match theory_model(v, &fam.member(n), budget)? {
                    SatResult::Fails => return Ok(SatResult::Fails),
                    SatResult::UnknownAtBudget(_) => unknown = true,
                    SatResult::Holds => {}
                }
            }
            match bound {
                Some(h) if scan >= h && !unknown => Ok(SatResult::Holds),
                _ => Ok(SatResult::UnknownAtBudget(budget)),
            }
        }
        Theory::JoinOmega(fam) => {
            let bound = v.lasso().and_then(|(p, q)| fam.hint_bound(p, q));
            let scan = bound.map_or(budget, |h| h.min(budget));
            let mut unknown = false;
            for n in 0..scan {
                match theory_model(v, &fam.member(n), budget)? {
                    SatResult::Holds => return Ok(SatResult::Holds),
                    SatResult::UnknownAtBudget(_) => unknown = true,
                    SatResult::Fails => {}
                }
            }
            match bound {
                Some(h) if scan >= h && !unknown => Ok(SatResult::Fails),
                _ => Ok(SatResult::UnknownAtBudget(budget)),
            }
        }
        Theory::NextT(inner) => theory_model(&v.shifted()?, inner, budget),
        Theory::StreamGenerated(alphabet) => match v {
            // Stream valuations model the stream theory by construction.
            Valuation::Stream(_) => Ok(SatResult::Holds),
            Valuation::Table { universe, truth } => {
                Ok(SatResult::from_bool(table_models_stream_theory(
                    alphabet, universe, truth,
                )))
            }
        },
    }
}

/// Checks a truth table against every stream-theory sequent whose atoms all
/// lie inside the table's universe. A partial check, but refutations are
/// genuine.
fn table_models_stream_theory(
    alphabet: &Alphabet,
    universe: &[FiniteElement],
    truth: &BTreeSet<FiniteElement>,
) -> bool {
    let empty = FiniteElement::empty();
    if universe.contains(&empty) && !truth.contains(&empty) {
        return false;
    }
    for d in universe {
        if truth.contains(d) && !d.letters().iter().all(|&c| alphabet.contains(c)) {
            return false;
        }
    }
    for d in universe {
        for e in universe {
            if e.leq(d) && truth.contains(d) && !truth.contains(e) {
                return false;
            }
            if truth.contains(d) && truth.contains(e) {
                match d.sup(e) {
                    None => return false,
                    Some(s) => {
                        if universe.contains(&s) && !truth.contains(&s) {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

/// Verifies a valuation against the stream-theory sequent schemas
/// instantiated at the sampled atom pairs: order sequents, the bottom-atom
/// fact, incompatibility, and binary suprema. Atoms a table does not cover
/// are skipped.
pub fn stream_theory_check(
    v: &Valuation,
    alphabet: &Alphabet,
    sample: &[(FiniteElement, FiniteElement)],
) -> Result<bool, GeomError> {
    debug_assert!(
        sample
            .iter()
            .flat_map(|(d, e)| d.letters().into_iter().chain(e.letters()))
            .all(|c| alphabet.contains(c)),
        "sample atoms must use alphabet letters"
    );
    if v.atom_in_universe(&FiniteElement::empty()) == Some(false) {
        return Ok(false);
    }
    for (d, e) in sample {
        for (x, y) in [(d, e), (e, d)] {
            if y.leq(x)
                && v.atom_in_universe(x) == Some(true)
                && v.atom_in_universe(y) == Some(false)
            {
                return Ok(false);
            }
        }
        if v.atom_in_universe(d) == Some(true) && v.atom_in_universe(e) == Some(true) {
            match d.sup(e) {
                None => return Ok(false),
                Some(s) => {
                    if v.atom_in_universe(&s) == Some(false) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Every truth table over the universe, in binary-counter order: valuation
/// number m makes atom i true exactly when bit i of m is set.
pub fn all_table_valuations(universe: &[FiniteElement]) -> Result<Vec<Valuation>, GeomError> {
    if universe.len() > 16 {
        return Err(GeomError::UniverseTooLarge { size: universe.len() });
    }
    let n = universe.len();
    let mut out = Vec::with_capacity(1 << n);
    for mask in 0u32..(1 << n) {
        let truth = universe
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, d)| d.clone())
            .collect::<BTreeSet<_>>();
        out.push(Valuation::Table { universe: universe.to_vec(), truth });
    }
    Ok(out)
}

/// Caps for rendering objects with generator nodes: `depth` members of each
/// generator are expanded and lists are cut off after `width` entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrintCaps {
    pub depth: usize,
    pub width: usize,
}

impl Default for PrintCaps {
    fn default() -> PrintCaps {
        PrintCaps { depth: 3, width: 8 }
    }
}

pub fn format_conj(c: &ConjFormula, caps: PrintCaps) -> String {
    if c.is_top() {
        return "true".to_string();
    }
    let mut parts: Vec<String> = c.atoms().take(caps.width).map(|a| a.to_string()).collect();
    if c.atoms().count() > caps.width {
        parts.push("...".to_string());
    }
    parts.join(" & ")
}

pub fn format_geom(f: &GeomFormula, caps: PrintCaps) -> String {
    match f {
        GeomFormula::Finite(ds) => {
            if ds.is_empty() {
                return "false".to_string();
            }
            let mut parts: Vec<String> =
                ds.iter().take(caps.width).map(|c| format_conj(c, caps)).collect();
            if ds.len() > caps.width {
                parts.push("...".to_string());
            }
            parts.join(" \\/ ")
        }
        GeomFormula::Omega(o) => {
            let members: Vec<String> = (0..caps.depth)
                .map(|n| format_geom(&o.member(n), caps))
                .collect();
            format!("JOIN_n[{}, ...]", members.join(", "))
        }
    }
}

pub fn format_sequent(s: &Sequent, caps: PrintCaps) -> String {
    format!("{} |- {}", format_geom(&s.ante, caps), format_geom(&s.cons, caps))
}

pub fn format_theory(t: &Theory, caps: PrintCaps) -> String {
    match t {
        Theory::Finite(seqs) => {
            if seqs.is_empty() {
                return "{}".to_string();
            }
            let mut parts: Vec<String> =
                seqs.iter().take(caps.width).map(|s| format_sequent(s, caps)).collect();
            if seqs.len() > caps.width {
                parts.push("...".to_string());
            }
            format!("{{ {} }}", parts.join("; "))
        }
        Theory::Meet(parts) => {
            let inner: Vec<String> = parts.iter().map(|p| format_theory(p, caps)).collect();
            format!("MEET({})", inner.join(", "))
        }
        Theory::JoinFin(parts) => {
            let inner: Vec<String> = parts.iter().map(|p| format_theory(p, caps)).collect();
            format!("JOIN({})", inner.join(", "))
        }
        Theory::MeetOmega(fam) => {
            let members: Vec<String> = (0..caps.depth)
                .map(|n| format_theory(&fam.member(n), caps))
                .collect();
            format!("MEET_n[{}, ...]", members.join(", "))
        }
        Theory::JoinOmega(fam) => {
            let members: Vec<String> = (0..caps.depth)
                .map(|n| format_theory(&fam.member(n), caps))
                .collect();
            format!("JOIN_n[{}, ...]", members.join(", "))
        }
        Theory::NextT(inner) => format!("NEXT({})", format_theory(inner, caps)),
        Theory::StreamGenerated(a) => format!("STREAMTHEORY({a})"),
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_theory(self, PrintCaps::default()))
    }
}

impl fmt::Debug for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Theory({self})")
    }
}

/// JSON for a formula: a listed join is an array of conjunctions, each an
/// array of atom literals. Generators expand `depth` members and flag the
/// truncation.
pub fn geom_to_json(f: &GeomFormula, caps: PrintCaps) -> Value {
    match f {
        GeomFormula::Finite(ds) => Value::Array(
            ds.iter()
                .map(|c| {
                    Value::Array(c.atoms().map(|a| Value::String(a.literal())).collect())
                })
                .collect(),
        ),
        GeomFormula::Omega(o) => {
            let members: Vec<Value> =
                (0..caps.depth).map(|n| geom_to_json(&o.member(n), caps)).collect();
            json!({ "kind": "join_n", "members": members, "truncated": true })
        }
    }
}

/// Parses the listed-join JSON form produced by [`geom_to_json`].
pub fn geom_from_json(v: &Value) -> Result<GeomFormula, String> {
    let disjuncts = v.as_array().ok_or("formula must be an array of conjunctions")?;
    let mut out = BTreeSet::new();
    for d in disjuncts {
        let atoms = d.as_array().ok_or("conjunction must be an array of atom literals")?;
        let mut conj = Vec::new();
        for a in atoms {
            let text = a.as_str().ok_or("atom must be a string literal")?;
            let elem = FiniteElement::parse(text).map_err(|e| e.to_string())?;
            conj.push(elem);
        }
        out.insert(ConjFormula::from_atoms(conj));
    }
    Ok(GeomFormula::Finite(out))
}

pub fn sequent_to_json(s: &Sequent, caps: PrintCaps) -> Value {
    json!({ "ante": geom_to_json(&s.ante, caps), "cons": geom_to_json(&s.cons, caps) })
}

pub fn sequent_from_json(v: &Value) -> Result<Sequent, String> {
    let obj = v.as_object().ok_or("sequent must be an object")?;
    let ante = obj.get("ante").ok_or("sequent missing \"ante\"")?;
    let cons = obj.get("cons").ok_or("sequent missing \"cons\"")?;
    Ok(Sequent::new(geom_from_json(ante)?, geom_from_json(cons)?))
}

pub fn theory_to_json(t: &Theory, caps: PrintCaps) -> Value {
    match t {
        Theory::Finite(seqs) => json!({
            "kind": "finite",
            "sequents": seqs.iter().map(|s| sequent_to_json(s, caps)).collect::<Vec<_>>(),
        }),
        Theory::Meet(parts) => json!({
            "kind": "meet",
            "parts": parts.iter().map(|p| theory_to_json(p, caps)).collect::<Vec<_>>(),
        }),
        Theory::JoinFin(parts) => json!({
            "kind": "join",
            "parts": parts.iter().map(|p| theory_to_json(p, caps)).collect::<Vec<_>>(),
        }),
        Theory::MeetOmega(fam) => json!({
            "kind": "meet_n",
            "members": (0..caps.depth).map(|n| theory_to_json(&fam.member(n), caps)).collect::<Vec<_>>(),
            "truncated": true,
        }),
        Theory::JoinOmega(fam) => json!({
            "kind": "join_n",
            "members": (0..caps.depth).map(|n| theory_to_json(&fam.member(n), caps)).collect::<Vec<_>>(),
            "truncated": true,
        }),
        Theory::NextT(inner) => json!({ "kind": "next", "inner": theory_to_json(inner, caps) }),
        Theory::StreamGenerated(a) => json!({ "kind": "stream_theory", "alphabet": a.to_string() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> UPStream {
        UPStream::parse(text).unwrap()
    }

    fn el(text: &str) -> FiniteElement {
        FiniteElement::parse(text).unwrap()
    }

    fn vs(text: &str) -> Valuation {
        Valuation::stream(s(text))
    }

    #[test]
    fn conjunctions_need_every_atom() {
        assert_eq!(conj_sat(&vs("|a"), &ConjFormula::atom(el("{0:a}"))), Ok(true));
        assert_eq!(conj_sat(&vs("|b"), &ConjFormula::top()), Ok(true));
        let both = ConjFormula::from_atoms([el("{0:a}"), el("{1:b}")]);
        assert_eq!(conj_sat(&vs("ab|_"), &both), Ok(true));
        let more = both.and(&ConjFormula::atom(el("{2:a}")));
        assert_eq!(conj_sat(&vs("ab|_"), &more), Ok(false));
    }

    #[test]
    fn empty_join_fails_everywhere() {
        assert_eq!(geom_sat(&vs("|a"), &GeomFormula::bottom(), 4), Ok(SatResult::Fails));
        assert_eq!(geom_sat(&vs("|a"), &GeomFormula::top(), 4), Ok(SatResult::Holds));
    }

    #[test]
    fn hinted_generator_finds_a_witness() {
        // Member n observes the letter a at position n.
        let f = GeomFormula::omega_hinted(
            |n| GeomFormula::atom(FiniteElement::single(n, 'a')),
            lasso_sum_hint(),
        );
        assert_eq!(geom_sat(&vs("_a|_"), &f, 8), Ok(SatResult::Holds));
        assert_eq!(geom_sat(&vs("|b"), &f, 8), Ok(SatResult::Fails));
    }

    #[test]
    fn unhinted_generator_degrades_to_unknown() {
        let f = GeomFormula::omega(|n| GeomFormula::atom(FiniteElement::single(n, 'a')));
        assert_eq!(geom_sat(&vs("|b"), &f, 5), Ok(SatResult::UnknownAtBudget(5)));
        // A witness inside the budget still settles it.
        assert_eq!(geom_sat(&vs("_a|_"), &f, 5), Ok(SatResult::Holds));
    }

    #[test]
    fn hint_is_unusable_for_tables() {
        let f = GeomFormula::omega_hinted(
            |n| GeomFormula::atom(FiniteElement::single(n, 'a')),
            lasso_sum_hint(),
        );
        let v = Valuation::table([el("{0:a}")], []);
        // Members past the universe error rather than guess.
        assert!(matches!(geom_sat(&v, &f, 3), Err(GeomError::AtomOutsideUniverse { .. })));
    }

    #[test]
    fn meet_with_truth_is_identity() {
        let phi = or_geom(
            &GeomFormula::atom(el("{0:a}")),
            &and_geom(&GeomFormula::atom(el("{1:b}")), &GeomFormula::atom(el("{2:c}"))),
        );
        assert_eq!(and_geom(&GeomFormula::top(), &phi), phi);
        assert_eq!(or_geom(&GeomFormula::bottom(), &phi), phi);
    }

    #[test]
    fn meet_distributes_over_listed_joins() {
        let a = GeomFormula::atom(el("{0:a}"));
        let b = GeomFormula::atom(el("{0:b}"));
        let c = GeomFormula::atom(el("{1:c}"));
        let left = and_geom(&or_geom(&a, &b), &c);
        let expected = or_geom(&and_geom(&a, &c), &and_geom(&b, &c));
        assert_eq!(left, expected);
    }

    #[test]
    fn shifting_formulas_tracks_the_tail() {
        let phi = or_geom(
            &GeomFormula::atom(el("{0:a}")),
            &and_geom(&GeomFormula::atom(el("{0:b}")), &GeomFormula::atom(el("{1:a}"))),
        );
        for text in ["|ab", "ba|a", "_a|b", "|_"] {
            let t = s(text);
            let lhs = geom_sat(&Valuation::stream(t.clone()), &next_geom(&phi), 6).unwrap();
            let rhs = geom_sat(&Valuation::stream(t.suffix(1)), &phi, 6).unwrap();
            assert_eq!(lhs, rhs, "{text}");
        }
    }

    #[test]
    fn generator_meets_and_joins_stay_exact() {
        // Two hinted generators: "a somewhere" and "b somewhere".
        let fa = GeomFormula::omega_hinted(
            |n| GeomFormula::atom(FiniteElement::single(n, 'a')),
            lasso_sum_hint(),
        );
        let fb = GeomFormula::omega_hinted(
            |n| GeomFormula::atom(FiniteElement::single(n, 'b')),
            lasso_sum_hint(),
        );
        let both = and_geom(&fa, &fb);
        let either = or_geom(&fa, &fb);
        for (text, has_a, has_b) in
            [("|ab", true, true), ("|a", true, false), ("|c", false, false), ("b|c", false, true)]
        {
            let v = vs(text);
            assert_eq!(
                geom_sat(&v, &both, 16).unwrap(),
                SatResult::from_bool(has_a && has_b),
                "meet on {text}"
            );
            assert_eq!(
                geom_sat(&v, &either, 16).unwrap(),
                SatResult::from_bool(has_a || has_b),
                "join on {text}"
            );
        }
    }

    #[test]
    fn empty_theory_holds_everywhere() {
        assert_eq!(theory_model(&vs("|a"), &Theory::top_theory(), 4), Ok(SatResult::Holds));
        assert_eq!(theory_model(&vs("|a"), &Theory::bottom_theory(), 4), Ok(SatResult::Fails));
    }

    #[test]
    fn shifted_theories_track_the_tail() {
        let t = Theory::finite([Sequent::fact(GeomFormula::atom(el("{0:a}")))]);
        for text in ["|ab", "ba|b", "_|a"] {
            let stream = s(text);
            let lhs =
                theory_model(&Valuation::stream(stream.clone()), &t.clone().next(), 6).unwrap();
            let rhs = theory_model(&Valuation::stream(stream.suffix(1)), &t, 6).unwrap();
            assert_eq!(lhs, rhs, "{text}");
        }
        assert!(matches!(
            theory_model(&Valuation::table([el("{0:a}")], []), &Theory::NextT(Box::new(Theory::top_theory())), 4),
            Err(GeomError::TableValuationCannotShift)
        ));
    }

    #[test]
    fn materialize_pairs_choice_functions() {
        let t1 = Theory::finite([Sequent::new(
            GeomFormula::atom(el("{0:a}")),
            GeomFormula::atom(el("{0:b}")),
        )]);
        let t2 = Theory::finite([Sequent::new(
            GeomFormula::atom(el("{1:c}")),
            GeomFormula::atom(el("{1:a}")),
        )]);
        let m = materialize_join_fin(&[t1, t2]).unwrap();
        let seqs = m.sequents().unwrap();
        assert_eq!(seqs.len(), 1);
        assert_eq!(
            seqs[0].ante,
            and_geom(&GeomFormula::atom(el("{0:a}")), &GeomFormula::atom(el("{1:c}")))
        );
        assert_eq!(
            seqs[0].cons,
            or_geom(&GeomFormula::atom(el("{0:b}")), &GeomFormula::atom(el("{1:a}")))
        );
    }

    #[test]
    fn materialize_fans_out_facts() {
        let t1 = Theory::finite([
            Sequent::fact(GeomFormula::atom(el("{0:a}"))),
            Sequent::fact(GeomFormula::atom(el("{1:b}"))),
        ]);
        let t2 = Theory::finite([Sequent::fact(GeomFormula::atom(el("{2:c}")))]);
        let m = materialize_join_fin(&[t1, t2]).unwrap();
        let seqs = m.sequents().unwrap();
        assert_eq!(seqs.len(), 2);
        assert!(seqs.iter().all(|s| s.is_fact()));
        assert_eq!(
            seqs[0].cons,
            or_geom(&GeomFormula::atom(el("{0:a}")), &GeomFormula::atom(el("{2:c}")))
        );
    }

    #[test]
    fn materialized_join_is_the_union_of_model_classes() {
        let universe = [el("{0:a}"), el("{0:b}"), el("{1:a}"), el("{1:b}")];
        let t1 = Theory::finite([
            Sequent::new(GeomFormula::atom(el("{0:a}")), GeomFormula::atom(el("{1:a}"))),
            Sequent::fact(GeomFormula::atom(el("{0:b}"))),
        ]);
        let t2 = Theory::finite([Sequent::new(
            GeomFormula::atom(el("{1:b}")),
            GeomFormula::atom(el("{0:a}")),
        )]);
        let m = materialize_join_fin(&[t1.clone(), t2.clone()]).unwrap();
        for v in all_table_valuations(&universe).unwrap() {
            let in_union = theory_model(&v, &t1, 4).unwrap().is_holds()
                || theory_model(&v, &t2, 4).unwrap().is_holds();
            let in_join = theory_model(&v, &m, 4).unwrap().is_holds();
            assert_eq!(in_union, in_join);
        }
    }

    #[test]
    fn stream_valuations_pass_the_stream_theory() {
        let alphabet = Alphabet::new(['a', 'b']);
        let sample = [
            (el("{0:a}"), el("{0:a,1:b}")),
            (el("{0:a}"), el("{0:b}")),
            (el("{1:b}"), el("{0:a}")),
            (FiniteElement::empty(), el("{2:a}")),
        ];
        for text in ["|ab", "a|b", "_b|a", "|_"] {
            assert_eq!(stream_theory_check(&vs(text), &alphabet, &sample), Ok(true), "{text}");
        }
        assert_eq!(stream_theory_check(&vs("|a"), &alphabet, &[]), Ok(true));
    }

    #[test]
    fn clashing_table_fails_the_stream_theory() {
        let universe = [el("{0:a}"), el("{0:b}")];
        let v = Valuation::table(universe.clone(), universe.clone());
        let sample = [(el("{0:a}"), el("{0:b}"))];
        let alphabet = Alphabet::new(['a', 'b']);
        assert_eq!(stream_theory_check(&v, &alphabet, &sample), Ok(false));
        let t = Theory::StreamGenerated(alphabet);
        assert_eq!(theory_model(&v, &t, 4), Ok(SatResult::Fails));
    }

    #[test]
    fn downward_closure_is_enforced_on_tables() {
        // {0:a, 1:b} true but {0:a} false violates the order sequents.
        let universe = [el("{0:a}"), el("{0:a,1:b}")];
        let v = Valuation::table(universe, [el("{0:a,1:b}")]);
        let t = Theory::StreamGenerated(Alphabet::new(['a', 'b']));
        assert_eq!(theory_model(&v, &t, 4), Ok(SatResult::Fails));
        let sample = [(el("{0:a}"), el("{0:a,1:b}"))];
        assert_eq!(
            stream_theory_check(&v, &Alphabet::new(['a', 'b']), &sample),
            Ok(false)
        );
    }

    #[test]
    fn table_enumeration_counts_and_orders() {
        assert_eq!(all_table_valuations(&[]).unwrap().len(), 1);
        let universe = [el("{0:a}"), el("{1:b}")];
        let vals = all_table_valuations(&universe).unwrap();
        assert_eq!(vals.len(), 4);
        // Valuation 1 sets exactly the first atom.
        assert_eq!(vals[1].atom(&el("{0:a}")), Ok(true));
        assert_eq!(vals[1].atom(&el("{1:b}")), Ok(false));
        let big: Vec<FiniteElement> = (0..17).map(|i| FiniteElement::single(i, 'a')).collect();
        assert_eq!(
            all_table_valuations(&big).err(),
            Some(GeomError::UniverseTooLarge { size: 17 })
        );
    }

    #[test]
    fn printing_follows_the_caps() {
        let caps = PrintCaps::default();
        let phi = or_geom(
            &GeomFormula::atom(el("{0:a}")),
            &and_geom(&GeomFormula::atom(el("{0:b}")), &GeomFormula::atom(el("{1:a}"))),
        );
        assert_eq!(format_geom(&phi, caps), "a_^\u{3c9} \\/ b_^\u{3c9} & _a_^\u{3c9}");
        assert_eq!(format_geom(&GeomFormula::bottom(), caps), "false");
        assert_eq!(format_geom(&GeomFormula::top(), caps), "true");
        let seq = Sequent::fact(GeomFormula::atom(el("{1:b}")));
        assert_eq!(format_sequent(&seq, caps), "true |- _b_^\u{3c9}");
        let t = Theory::finite([seq]);
        assert_eq!(format_theory(&t, caps), "{ true |- _b_^\u{3c9} }");
        assert_eq!(format_theory(&Theory::top_theory(), caps), "{}");
        let fam = TheoryFamily::new(|_| Theory::top_theory());
        assert_eq!(format_theory(&Theory::MeetOmega(fam), caps), "MEET_n[{}, {}, {}, ...]");
        let next = Theory::NextT(Box::new(Theory::StreamGenerated(Alphabet::new(['a']))));
        assert_eq!(format_theory(&next, caps), "NEXT(STREAMTHEORY(a))");
    }

    #[test]
    fn formula_json_round_trips() {
        let phi = or_geom(
            &GeomFormula::atom(el("{0:a}")),
            &and_geom(&GeomFormula::atom(el("{0:b}")), &GeomFormula::atom(el("{1:a}"))),
        );
        let v = geom_to_json(&phi, PrintCaps::default());
        assert_eq!(geom_from_json(&v).unwrap(), phi);
        let seq = Sequent::new(GeomFormula::top(), phi);
        let sv = sequent_to_json(&seq, PrintCaps::default());
        assert_eq!(sequent_from_json(&sv).unwrap(), seq);
        assert!(geom_from_json(&json!("nope")).is_err());
        assert!(geom_from_json(&json!([["{0:"]])).is_err());
    }
}
