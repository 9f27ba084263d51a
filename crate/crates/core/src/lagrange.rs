//! Lagrangian relaxation of the budget: the estimate `α` of OPT and the
//! solver for residual instances whose elements are all non-profitable.
//!
//! For a multiplier `λ ≥ 0` every element gets weight `p(e) − λ·c(e)` and an
//! inner oracle returns a feasible set of maximum weight. Bisection on `λ`
//! brackets the budget between a cheap set `S⁻` (within budget) and an
//! expensive one `S⁺`. Candidates pooled from all probes are patched,
//! greedily augmented and the most profitable one wins.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::constraint::{Constraint, MatchingGraph};
use crate::enumerate::{canonical_slice_cmp, for_each_feasible, optimum, Flow, Item};
use crate::error::{Error, Result};
use crate::instance::{canonical_cmp, BcInstance, ElementId, IdSet, Solution};

/// Size guard of the exact optimum used by the exact estimate.
pub const EXACT_ALPHA_GUARD: usize = 24;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaMode {
    /// `α = OPT` by exhaustive search, `γ = 2` for the class range.
    Exact,
    /// Lagrangian heuristic, declared `γ = 4`.
    #[default]
    Lagrangian,
}

impl AlphaMode {
    pub fn gamma(self) -> u64 {
        match self {
            AlphaMode::Exact => 2,
            AlphaMode::Lagrangian => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InnerOracle {
    /// Exhaustive maximum weight when at most `guard` elements have positive
    /// weight, greedy otherwise.
    Exact { guard: usize },
    Greedy,
}

#[derive(Clone, Debug)]
pub struct LagrangeConfig {
    pub iterations: u32,
    pub inner: InnerOracle,
    /// Solve exactly when the instance has at most this many elements.
    pub fallback_threshold: Option<usize>,
}

impl Default for LagrangeConfig {
    fn default() -> Self {
        Self { iterations: 64, inner: InnerOracle::Exact { guard: 20 }, fallback_threshold: Some(20) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaEstimate {
    pub alpha: u64,
    pub gamma: u64,
}

/// Estimate of OPT with `OPT/γ ≤ α ≤ OPT`; `α` is always the profit of a
/// solution.
pub fn approx_opt(instance: &BcInstance, mode: AlphaMode, config: &LagrangeConfig) -> Result<AlphaEstimate> {
    let alpha = match mode {
        AlphaMode::Exact => {
            if instance.len() > EXACT_ALPHA_GUARD {
                return Err(Error::GuardExceeded { size: instance.len(), guard: EXACT_ALPHA_GUARD });
            }
            optimum(instance, &instance.ids()).1
        }
        AlphaMode::Lagrangian => lagrangian_heuristic(instance, config)?.total_profit,
    };
    Ok(AlphaEstimate { alpha, gamma: mode.gamma() })
}

/// A solution with profit at least `OPT − 2·max p(e)` on the tested range.
pub fn non_profitable_solver(instance: &BcInstance, config: &LagrangeConfig) -> Result<Solution> {
    if config.fallback_threshold.is_some_and(|t| instance.len() <= t) {
        let (set, _) = optimum(instance, &instance.ids());
        return Solution::new(instance, set);
    }
    lagrangian_heuristic(instance, config)
}

fn lambda_parts(lambda: &BigRational) -> Result<(i128, i128)> {
    if lambda < &BigRational::zero() {
        return Err(Error::Precondition("negative multiplier".into()));
    }
    let num = lambda.numer().to_i128().ok_or(Error::Overflow("multiplier numerator"))?;
    let den = lambda.denom().to_i128().ok_or(Error::Overflow("multiplier denominator"))?;
    Ok((num, den))
}

fn weighted_items(instance: &BcInstance, lambda: &BigRational) -> Result<Vec<Item>> {
    let (num, den) = lambda_parts(lambda)?;
    let mut items = Vec::new();
    for e in instance.elements() {
        let gain = i128::from(e.profit).checked_mul(den).ok_or(Error::Overflow("lagrangian weight"))?;
        let loss = i128::from(e.cost).checked_mul(num).ok_or(Error::Overflow("lagrangian weight"))?;
        let value = gain.checked_sub(loss).ok_or(Error::Overflow("lagrangian weight"))?;
        if value > 0 {
            items.push(Item { id: e.id, cost: e.cost, value });
        }
    }
    Ok(items)
}

/// Maximum-weight feasible set for weights `p(e) − λ·c(e)`, ignoring the
/// budget. Exact ties go to the cheaper set, then the canonically smaller.
pub fn lagrangian_probe(instance: &BcInstance, lambda: &BigRational, inner: InnerOracle) -> Result<IdSet> {
    let items = weighted_items(instance, lambda)?;
    let constraint = instance.constraint();
    match inner {
        InnerOracle::Exact { guard } if items.len() <= guard => {
            let mut best: (i128, u64, Vec<ElementId>) = (0, 0, Vec::new());
            for_each_feasible(constraint, &items, None, usize::MAX, &mut |set, cost, value| {
                let better = match value.cmp(&best.0) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => cost.cmp(&best.1).then_with(|| canonical_slice_cmp(set, &best.2)).is_lt(),
                };
                if better {
                    best = (value, cost, set.to_vec());
                }
                Flow::Continue
            });
            Ok(best.2.into_iter().collect())
        }
        _ => {
            let mut order = items;
            order.sort_by(|a, b| b.value.cmp(&a.value).then(a.cost.cmp(&b.cost)).then(a.id.cmp(&b.id)));
            let mut chosen = Vec::new();
            for item in order {
                chosen.push(item.id);
                if !constraint.feasible_unchecked(&chosen) {
                    chosen.pop();
                }
            }
            Ok(chosen.into_iter().collect())
        }
    }
}

fn cost_of(instance: &BcInstance, set: &IdSet) -> u64 {
    set.iter().map(|&id| instance.element(id).map_or(0, |e| e.cost)).sum()
}

fn profit_of(instance: &BcInstance, set: &IdSet) -> u64 {
    set.iter().map(|&id| instance.element(id).map_or(0, |e| e.profit)).sum()
}

fn within_budget(instance: &BcInstance, set: &IdSet) -> bool {
    cost_of(instance, set) <= instance.budget()
}

/// `p(a)/c(a)` against `p(b)/c(b)`; zero cost counts as infinite density.
fn density_cmp(pa: u64, ca: u64, pb: u64, cb: u64) -> Ordering {
    match (ca, cb) {
        (0, 0) => pa.cmp(&pb),
        (0, _) => Ordering::Greater,
        (_, 0) => Ordering::Less,
        _ => (u128::from(pa) * u128::from(cb)).cmp(&(u128::from(pb) * u128::from(ca))),
    }
}

/// Drops the least profitable-per-cost element until the budget holds.
fn repair(instance: &BcInstance, set: &IdSet) -> IdSet {
    let mut out = set.clone();
    while !within_budget(instance, &out) {
        let worst = out
            .iter()
            .copied()
            .filter_map(|id| instance.element(id))
            .min_by(|a, b| density_cmp(a.profit, a.cost, b.profit, b.cost).then(b.id.cmp(&a.id)))
            .map(|e| e.id);
        match worst {
            Some(id) => {
                out.remove(&id);
            }
            None => break,
        }
    }
    out
}

fn augment(instance: &BcInstance, order: &[ElementId], set: &IdSet) -> IdSet {
    let mut current: Vec<ElementId> = set.iter().copied().collect();
    let mut cost = cost_of(instance, set);
    for &id in order {
        if set.contains(&id) {
            continue;
        }
        let c = instance.element(id).map_or(u64::MAX, |e| e.cost);
        let Some(next) = cost.checked_add(c) else { continue };
        if next > instance.budget() {
            continue;
        }
        current.push(id);
        if instance.constraint().feasible_unchecked(&current) {
            cost = next;
        } else {
            current.pop();
        }
    }
    current.into_iter().collect()
}

/// Components of the symmetric difference of two matchings, each listed in
/// path (or cycle) order, sorted by smallest id.
fn alternating_components(graph: &MatchingGraph, diff: &IdSet) -> Vec<Vec<ElementId>> {
    let mut incident: BTreeMap<u32, Vec<ElementId>> = BTreeMap::new();
    for &id in diff {
        if let Some((u, v)) = graph.endpoints(id) {
            incident.entry(u).or_default().push(id);
            incident.entry(v).or_default().push(id);
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &root in diff {
        if seen.contains(&root) || graph.endpoints(root).is_none() {
            continue;
        }
        // Collect the component.
        let mut comp = BTreeSet::new();
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            if !comp.insert(id) {
                continue;
            }
            let (u, v) = graph.endpoints(id).expect("edge of diff");
            for w in [u, v] {
                stack.extend(incident[&w].iter().copied().filter(|e| !comp.contains(e)));
            }
        }
        // Walk it from a path end, or from its smallest vertex if it is a cycle.
        let vertices: BTreeSet<u32> =
            comp.iter().filter_map(|&id| graph.endpoints(id)).flat_map(|(u, v)| [u, v]).collect();
        let start = vertices
            .iter()
            .copied()
            .find(|w| incident[w].iter().filter(|e| comp.contains(e)).count() == 1)
            .unwrap_or_else(|| *vertices.first().expect("nonempty component"));
        let mut ordered = Vec::with_capacity(comp.len());
        let mut at = start;
        let mut used = BTreeSet::new();
        while let Some(&next) = incident[&at].iter().filter(|e| comp.contains(e) && !used.contains(*e)).min() {
            used.insert(next);
            ordered.push(next);
            let (u, v) = graph.endpoints(next).expect("edge of diff");
            at = if u == at { v } else { u };
        }
        // Branching cannot occur in a union of two matchings; keep any leftovers anyway.
        ordered.extend(comp.iter().copied().filter(|e| !used.contains(e)));
        seen.extend(comp);
        out.push(ordered);
    }
    out
}

fn swap_in(current: &IdSet, part: &[ElementId], minus: &IdSet, plus: &IdSet) -> IdSet {
    let mut out = current.clone();
    for id in part {
        if minus.contains(id) {
            out.remove(id);
        }
    }
    for id in part {
        if plus.contains(id) {
            out.insert(*id);
        }
    }
    out
}

/// Starting from `S⁻`, swaps in whole alternating components of `S⁻ Δ S⁺`
/// while the budget holds; a component that does not fit is tried piecewise
/// by contiguous segments.
fn patch_matching(instance: &BcInstance, graph: &MatchingGraph, minus: &IdSet, plus: &IdSet) -> Vec<IdSet> {
    let diff: IdSet = minus.symmetric_difference(plus).copied().collect();
    let mut current = minus.clone();
    let mut out = Vec::new();
    let feasible = |s: &IdSet| {
        let v: Vec<ElementId> = s.iter().copied().collect();
        instance.constraint().feasible_unchecked(&v) && within_budget(instance, s)
    };
    for comp in alternating_components(graph, &diff) {
        let whole = swap_in(&current, &comp, minus, plus);
        if feasible(&whole) {
            current = whole;
            out.push(current.clone());
            continue;
        }
        let mut best: Option<(u64, IdSet)> = None;
        for i in 0..comp.len() {
            for j in i + 1..=comp.len() {
                let trial = swap_in(&current, &comp[i..j], minus, plus);
                if !feasible(&trial) {
                    continue;
                }
                let p = profit_of(instance, &trial);
                if best.as_ref().is_none_or(|(bp, _)| p > *bp) {
                    best = Some((p, trial));
                }
            }
        }
        if let Some((_, trial)) = best {
            out.push(trial);
        }
    }
    out.push(current);
    out
}

fn best_singleton(instance: &BcInstance) -> Option<IdSet> {
    instance
        .elements()
        .iter()
        .filter(|e| e.cost <= instance.budget() && instance.constraint().feasible_unchecked(&[e.id]))
        .max_by(|a, b| a.profit.cmp(&b.profit).then(b.id.cmp(&a.id)))
        .map(|e| [e.id].into_iter().collect())
}

/// The Lagrangian search without any exact fallback.
pub fn lagrangian_heuristic(instance: &BcInstance, config: &LagrangeConfig) -> Result<Solution> {
    if instance.is_empty() {
        return Ok(Solution::empty());
    }
    let mut within: Vec<IdSet> = Vec::new();
    let mut over: Vec<IdSet> = Vec::new();
    let file = |s: IdSet, within: &mut Vec<IdSet>, over: &mut Vec<IdSet>| {
        if within_budget(instance, &s) {
            within.push(s);
        } else {
            over.push(s);
        }
    };

    let mut lo = BigRational::zero();
    let mut hi = BigRational::from_integer(BigInt::from(instance.max_profit()) + 1);
    let at_lo = lagrangian_probe(instance, &lo, config.inner)?;
    let at_hi = lagrangian_probe(instance, &hi, config.inner)?;
    let mut plus = at_lo.clone();
    let mut minus = at_hi.clone();
    let bracketed = !within_budget(instance, &at_lo) && within_budget(instance, &at_hi);
    file(at_lo, &mut within, &mut over);
    file(at_hi, &mut within, &mut over);

    if bracketed {
        let two = BigRational::from_integer(BigInt::from(2));
        for _ in 0..config.iterations {
            let mid = (&lo + &hi) / &two;
            let probe = match lagrangian_probe(instance, &mid, config.inner) {
                Ok(s) => s,
                Err(Error::Overflow(_)) => break,
                Err(e) => return Err(e),
            };
            if within_budget(instance, &probe) {
                hi = mid;
                minus = probe.clone();
            } else {
                lo = mid;
                plus = probe.clone();
            }
            file(probe, &mut within, &mut over);
        }
    }

    let mut candidates = within;
    if bracketed {
        if let Constraint::Matching(graph) = instance.constraint() {
            candidates.extend(patch_matching(instance, graph, &minus, &plus));
        }
    }
    candidates.extend(over.iter().map(|s| repair(instance, s)));
    candidates.extend(best_singleton(instance));

    let mut order: Vec<ElementId> = instance.ids().into_iter().collect();
    order.sort_by(|&a, &b| {
        let (ea, eb) = (instance.element(a).expect("id"), instance.element(b).expect("id"));
        density_cmp(eb.profit, eb.cost, ea.profit, ea.cost).then(a.cmp(&b))
    });
    let augmented: Vec<IdSet> = candidates.iter().map(|s| augment(instance, &order, s)).collect();
    candidates.extend(augmented);

    let mut best = IdSet::new();
    let mut best_profit = 0u64;
    for s in candidates {
        let v: Vec<ElementId> = s.iter().copied().collect();
        if !within_budget(instance, &s) || !instance.constraint().feasible_unchecked(&v) {
            continue;
        }
        let p = profit_of(instance, &s);
        if p > best_profit || (p == best_profit && canonical_cmp(&s, &best).is_lt()) {
            best = s;
            best_profit = p;
        }
    }
    Solution::new(instance, best)
}
