//! Domain types shared by every other module: elements, instances,
//! solutions and the error parameter.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::constraint::Constraint;
use crate::error::{Error, Result};

/// Identifier of a ground element. The natural order on ids is the
/// canonical order used for every tie-break.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(pub u32);

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type IdSet = BTreeSet<ElementId>;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Element {
    pub id: ElementId,
    pub cost: u64,
    pub profit: u64,
}

impl Element {
    pub fn new(id: u32, cost: u64, profit: u64) -> Self {
        Self { id: ElementId(id), cost, profit }
    }
}

/// The error parameter, kept as a reduced fraction.
///
/// Construction accepts `0 < ε ≤ 1/2`. The closed upper end is only useful
/// for the structural helpers (`q_of`, class layouts); the approximation
/// entry points reject `ε = 1/2` through [`Epsilon::require_below_half`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Epsilon {
    num: u64,
    den: u64,
}

impl Epsilon {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 || num.checked_mul(2).map_or(true, |n2| n2 > den) {
            return Err(Error::InvalidEpsilon { num, den });
        }
        let g = num.gcd(&den);
        Ok(Self { num: num / g, den: den / g })
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn is_below_half(&self) -> bool {
        2 * u128::from(self.num) < u128::from(self.den)
    }

    pub fn require_below_half(&self) -> Result<()> {
        if self.is_below_half() {
            Ok(())
        } else {
            Err(Error::InvalidEpsilon { num: self.num, den: self.den })
        }
    }

    pub fn to_ratio(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    /// `⌊ε⁻¹⌋`, the cardinality bound for enumerated skeletons.
    pub fn inverse_floor(&self) -> u64 {
        self.den / self.num
    }

    /// `ε / k`.
    pub fn divided_by(&self, k: u64) -> Result<Self> {
        let den = self.den.checked_mul(k).ok_or(Error::Overflow("epsilon scaling"))?;
        Self::new(self.num, den)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Epsilon {
    type Err = Error;

    /// Parses `"p/q"`; a bare integer `p` is read as `p/1`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Precondition(format!("cannot parse epsilon {s:?}; expected p/q"));
        let (num, den) = match s.trim().split_once('/') {
            Some((n, d)) => (n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?),
            None => (s.trim().parse().map_err(|_| bad())?, 1),
        };
        Self::new(num, den)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Violation {
    DuplicateId(ElementId),
    DanglingId(ElementId),
    UncoveredId(ElementId),
    SelfLoop(ElementId),
    VertexOutOfRange { id: ElementId, vertex: u32 },
    OracleGroundMismatch,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateId(id) => write!(f, "duplicate id {id}"),
            Violation::DanglingId(id) => write!(f, "dangling id {id}"),
            Violation::UncoveredId(id) => write!(f, "element {id} is not covered by the constraint"),
            Violation::SelfLoop(id) => write!(f, "edge {id} is a self-loop"),
            Violation::VertexOutOfRange { id, vertex } => {
                write!(f, "edge {id} uses vertex {vertex} outside the vertex range")
            }
            Violation::OracleGroundMismatch => write!(f, "the two matroids have different ground sets"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// A budgeted constrained instance: elements, a constraint over their ids
/// and a budget.
#[derive(Clone, Debug)]
pub struct BcInstance {
    elements: Vec<Element>,
    index: BTreeMap<ElementId, usize>,
    constraint: Constraint,
    budget: u64,
}

impl BcInstance {
    /// Builds and validates an instance. Elements are stored in id order.
    pub fn new(elements: Vec<Element>, constraint: Constraint, budget: u64) -> Result<Self> {
        let instance = Self::new_unchecked(elements, constraint, budget);
        let report = validate_instance(&instance);
        if report.is_ok() {
            Ok(instance)
        } else {
            Err(Error::InvalidInstance(report))
        }
    }

    /// Builds an instance without validation; duplicates are kept so that
    /// [`validate_instance`] can report them.
    pub fn new_unchecked(mut elements: Vec<Element>, constraint: Constraint, budget: u64) -> Self {
        elements.sort_by_key(|e| e.id);
        let mut index = BTreeMap::new();
        for (i, e) in elements.iter().enumerate() {
            index.entry(e.id).or_insert(i);
        }
        Self { elements, index, constraint, budget }
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, id: ElementId) -> Option<&Element> {
        self.index.get(&id).map(|&i| &self.elements[i])
    }

    pub fn contains(&self, id: ElementId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn ids(&self) -> IdSet {
        self.index.keys().copied().collect()
    }

    pub fn constraint(&self) -> &Constraint {
        &self.constraint
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn cost(&self, id: ElementId) -> Result<u64> {
        self.element(id).map(|e| e.cost).ok_or(Error::UnknownId(id))
    }

    pub fn profit(&self, id: ElementId) -> Result<u64> {
        self.element(id).map(|e| e.profit).ok_or(Error::UnknownId(id))
    }

    pub fn cost_of<'a>(&self, ids: impl IntoIterator<Item = &'a ElementId>) -> Result<u64> {
        ids.into_iter().try_fold(0u64, |acc, &id| {
            acc.checked_add(self.cost(id)?).ok_or(Error::Overflow("cost sum"))
        })
    }

    pub fn profit_of<'a>(&self, ids: impl IntoIterator<Item = &'a ElementId>) -> Result<u64> {
        ids.into_iter().try_fold(0u64, |acc, &id| {
            acc.checked_add(self.profit(id)?).ok_or(Error::Overflow("profit sum"))
        })
    }

    pub fn max_profit(&self) -> u64 {
        self.elements.iter().map(|e| e.profit).max().unwrap_or(0)
    }

    /// The sub-instance on `keep ∩ E` with the constraint restricted to it
    /// and the same budget.
    pub fn restrict_to(&self, keep: &IdSet) -> BcInstance {
        let elements = self.elements.iter().filter(|e| keep.contains(&e.id)).copied().collect();
        let kept: IdSet = keep.iter().filter(|id| self.contains(**id)).copied().collect();
        BcInstance::new_unchecked(elements, self.constraint.restrict(&kept), self.budget)
    }

    pub fn with_budget(&self, budget: u64) -> BcInstance {
        BcInstance { budget, ..self.clone() }
    }
}

/// Reports duplicate ids, dangling constraint references, elements the
/// constraint does not cover and malformed matching edges.
pub fn validate_instance(instance: &BcInstance) -> ValidationReport {
    let mut violations = Vec::new();
    for pair in instance.elements.windows(2) {
        if pair[0].id == pair[1].id && violations.last() != Some(&Violation::DuplicateId(pair[0].id)) {
            violations.push(Violation::DuplicateId(pair[0].id));
        }
    }
    violations.extend(instance.constraint.structural_violations());
    let ground = instance.constraint.ground();
    violations.extend(ground.iter().filter(|id| !instance.contains(**id)).map(|&id| Violation::DanglingId(id)));
    violations.extend(instance.index.keys().filter(|id| !ground.contains(id)).map(|&id| Violation::UncoveredId(id)));
    ValidationReport { violations }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscardReason {
    OverBudget,
    InfeasibleSingleton,
}

#[derive(Clone, Debug)]
pub struct Preprocessed {
    pub instance: BcInstance,
    pub discarded: Vec<(ElementId, DiscardReason)>,
}

/// Drops every element that cannot belong to any solution: those costing
/// more than the budget and those whose singleton is infeasible.
pub fn preprocess_discard(instance: &BcInstance) -> Preprocessed {
    let mut discarded = Vec::new();
    let mut keep = IdSet::new();
    for e in instance.elements() {
        if e.cost > instance.budget {
            discarded.push((e.id, DiscardReason::OverBudget));
        } else if !instance.constraint.feasible_unchecked(&[e.id]) {
            discarded.push((e.id, DiscardReason::InfeasibleSingleton));
        } else {
            keep.insert(e.id);
        }
    }
    let instance = if discarded.is_empty() { instance.clone() } else { instance.restrict_to(&keep) };
    Preprocessed { instance, discarded }
}

/// `S` is feasible for the constraint and `c(S) ≤ β`.
pub fn is_solution(instance: &BcInstance, set: &IdSet) -> Result<bool> {
    let cost = instance.cost_of(set)?;
    Ok(cost <= instance.budget && instance.constraint.is_feasible(set)?)
}

/// A feasible, budget-respecting element set with cached totals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub element_ids: IdSet,
    pub total_cost: u64,
    pub total_profit: u64,
}

impl Solution {
    pub fn new(instance: &BcInstance, element_ids: IdSet) -> Result<Self> {
        if !is_solution(instance, &element_ids)? {
            return Err(Error::NotASolution(format!("{:?}", element_ids.iter().map(|e| e.0).collect::<Vec<_>>())));
        }
        Ok(Self {
            total_cost: instance.cost_of(&element_ids)?,
            total_profit: instance.profit_of(&element_ids)?,
            element_ids,
        })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.element_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.element_ids.is_empty()
    }
}

/// Size-then-lexicographic order on id sets.
pub(crate) fn canonical_cmp(a: &IdSet, b: &IdSet) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter()))
}
