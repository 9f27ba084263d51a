//! Exhaustive ground truth: exact optimum, profitable elements and
//! brute-force checkers for every structural property used by the scheme.
//! All of these are exponential and guarded by an element-count limit.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::classes::{class_partition, q_of, ClassLayout};
use crate::constraint::Constraint;
use crate::enumerate::{for_each_feasible, optimum, profit_items, Flow, Item};
use crate::error::{Error, Result};
use crate::instance::{is_solution, BcInstance, ElementId, Epsilon, IdSet, Solution};
use crate::matroid::Matroid;

pub const BRUTE_FORCE_GUARD: usize = 24;
pub const VERIFIER_GUARD: usize = 20;
pub const AXIOM_GUARD: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    /// No valid `b` for this `Δ` and `a`.
    Exchange { delta: IdSet, a: ElementId },
    /// Best set found when no qualifying set exists.
    Set { set: IdSet, profit: u64 },
    /// Number of the failed replacement property, 1 to 4.
    Replacement { property: u8 },
    /// Bounded feasible set without a substitution inside `R`.
    Substitution { g: IdSet },
    Axiom { axiom: String, a: IdSet, b: IdSet },
    WeakExchange { a: IdSet, b: IdSet, d: IdSet },
    Solver { profit: u64, opt: u64, max_profit: u64 },
    DownwardClosed { set: IdSet, subset: IdSet },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub property: String,
    pub passed: bool,
    pub cases_checked: u64,
    pub counterexample: Option<Counterexample>,
}

impl VerificationReport {
    fn new(property: &str, cases_checked: u64, counterexample: Option<Counterexample>) -> Self {
        Self { property: property.to_string(), passed: counterexample.is_none(), cases_checked, counterexample }
    }
}

fn guard(size: usize, limit: usize) -> Result<()> {
    if size > limit {
        return Err(Error::GuardExceeded { size, guard: limit });
    }
    Ok(())
}

fn unit_items(instance: &BcInstance) -> Vec<Item> {
    instance.elements().iter().map(|e| Item { id: e.id, cost: e.cost, value: 0 }).collect()
}

fn set_of(v: &[ElementId]) -> IdSet {
    v.iter().copied().collect()
}

/// Exact optimum; ties go to the canonically smallest set.
pub fn brute_force_opt(instance: &BcInstance) -> Result<Solution> {
    guard(instance.len(), BRUTE_FORCE_GUARD)?;
    let (set, _) = optimum(instance, &instance.ids());
    Solution::new(instance, set)
}

/// `H = {e : p(e) > ε·OPT}`.
pub fn profitable_set(instance: &BcInstance, epsilon: &Epsilon) -> Result<IdSet> {
    let opt = brute_force_opt(instance)?.total_profit;
    Ok(profitable_given_opt(instance, epsilon, opt))
}

fn profitable_given_opt(instance: &BcInstance, epsilon: &Epsilon, opt: u64) -> IdSet {
    let bound = u128::from(epsilon.numerator()) * u128::from(opt);
    instance
        .elements()
        .iter()
        .filter(|e| u128::from(e.profit) * u128::from(epsilon.denominator()) > bound)
        .map(|e| e.id)
        .collect()
}

/// Checks that `x` is an exchange set for class `r`: for every bounded
/// feasible `Δ` and every `a ∈ (Δ ∩ K_r) ∖ X` some `b ∈ (K_r ∩ X) ∖ Δ` has
/// `c(b) ≤ c(a)` and keeps `Δ − a + b` bounded feasible.
pub fn verify_exchange_set(instance: &BcInstance, layout: &ClassLayout, r: i64, x: &IdSet) -> Result<VerificationReport> {
    guard(instance.len(), VERIFIER_GUARD)?;
    let class = class_partition(instance, layout).remove(&r).unwrap_or_default();
    let pool: Vec<ElementId> = class.intersection(x).copied().collect();
    let cost = |id: ElementId| instance.element(id).map_or(u64::MAX, |e| e.cost);
    let constraint = instance.constraint();
    let mut cases = 0u64;
    let mut failure = None;
    for_each_feasible(constraint, &unit_items(instance), None, layout.q_cap(), &mut |delta, _, _| {
        for &a in delta.iter().filter(|a| class.contains(a) && !x.contains(a)) {
            cases += 1;
            let found = pool.iter().any(|&b| {
                if delta.contains(&b) || cost(b) > cost(a) {
                    return false;
                }
                let swapped: Vec<ElementId> = delta.iter().map(|&e| if e == a { b } else { e }).collect();
                constraint.feasible_unchecked(&swapped)
            });
            if !found {
                failure = Some(Counterexample::Exchange { delta: set_of(delta), a });
                return Flow::Stop;
            }
        }
        Flow::Continue
    });
    Ok(VerificationReport::new("exchange", cases, failure))
}

/// The four replacement properties of `z` for `s`.
pub fn verify_replacement(instance: &BcInstance, epsilon: &Epsilon, s: &IdSet, z: &IdSet) -> Result<VerificationReport> {
    guard(instance.len(), BRUTE_FORCE_GUARD)?;
    let q = q_of(epsilon);
    if !instance.constraint().is_feasible(s)? || num_bigint::BigUint::from(s.len()) > q {
        return Err(Error::Precondition("S must be bounded feasible".into()));
    }
    let h = profitable_set(instance, epsilon)?;
    let s_in_h: IdSet = s.intersection(&h).copied().collect();
    let mut kept: IdSet = s.difference(&h).copied().collect();
    kept.extend(z.iter().copied());

    let failed = if !(instance.constraint().is_feasible(&kept)? && num_bigint::BigUint::from(kept.len()) <= q) {
        Some(1)
    } else if instance.cost_of(z)? > instance.cost_of(&s_in_h)? {
        Some(2)
    } else if u128::from(instance.profit_of(&kept)?) * u128::from(epsilon.denominator())
        < u128::from(epsilon.denominator() - epsilon.numerator()) * u128::from(instance.profit_of(s)?)
    {
        Some(3)
    } else if z.len() > s_in_h.len() {
        Some(4)
    } else {
        None
    };
    Ok(VerificationReport::new("replacement", 4, failed.map(|property| Counterexample::Replacement { property })))
}

/// `(1 − 4ε)`, the default representative threshold.
pub fn default_threshold(epsilon: &Epsilon) -> BigRational {
    BigRational::one() - epsilon.to_ratio() * BigRational::from_integer(BigInt::from(4))
}

/// Searches for a solution `S` with `S ∩ H ⊆ R` and `p(S) ≥ θ·OPT`.
pub fn verify_representative(
    instance: &BcInstance,
    epsilon: &Epsilon,
    r: &IdSet,
    threshold: Option<BigRational>,
) -> Result<VerificationReport> {
    let opt = brute_force_opt(instance)?.total_profit;
    let theta = threshold.unwrap_or_else(|| default_threshold(epsilon));
    let target = theta * BigRational::from_integer(BigInt::from(opt));
    let h = profitable_given_opt(instance, epsilon, opt);
    let allowed: IdSet = instance.ids().into_iter().filter(|id| !h.contains(id) || r.contains(id)).collect();
    let items = profit_items(instance, &allowed);
    let mut cases = 0u64;
    let mut best: (u64, Vec<ElementId>) = (0, Vec::new());
    let flow = for_each_feasible(instance.constraint(), &items, Some(instance.budget()), usize::MAX, &mut |set, _, value| {
        cases += 1;
        let value = value as u64;
        if value > best.0 {
            best = (value, set.to_vec());
        }
        if BigRational::from_integer(BigInt::from(value)) >= target {
            Flow::Stop
        } else {
            Flow::Continue
        }
    });
    let failure = (flow == Flow::Continue).then(|| Counterexample::Set { set: set_of(&best.1), profit: best.0 });
    Ok(VerificationReport::new("representative", cases, failure))
}

struct SubstitutionSearch<'a> {
    constraint: &'a Constraint,
    cost: &'a dyn Fn(ElementId) -> u64,
    // Per class: remaining count and candidate pool.
    demands: Vec<(usize, Vec<ElementId>)>,
    budget: u64,
}

impl SubstitutionSearch<'_> {
    fn search(&self, class: usize, from: usize, need: usize, chosen: &mut Vec<ElementId>, spent: u64) -> bool {
        if spent > self.budget || !self.constraint.feasible_unchecked(chosen) {
            return false;
        }
        if class == self.demands.len() {
            return true;
        }
        if need == 0 {
            let next_need = self.demands.get(class + 1).map_or(0, |d| d.0);
            return self.search(class + 1, 0, next_need, chosen, spent);
        }
        let pool = &self.demands[class].1;
        for i in from..pool.len() {
            if pool.len() - i < need {
                break;
            }
            chosen.push(pool[i]);
            let found = self.search(class, i + 1, need - 1, chosen, spent + (self.cost)(pool[i]));
            chosen.pop();
            if found {
                return true;
            }
        }
        false
    }
}

/// Every bounded feasible `G` has a substitution `Z ⊆ R`: `(G ∖ H) ∪ Z`
/// bounded feasible, `c(Z) ≤ c(G ∩ H)`, the same number of elements as
/// `G ∩ H` in every class, and `Z` disjoint from `G ∖ H`.
pub fn verify_substitutions(instance: &BcInstance, epsilon: &Epsilon, layout: &ClassLayout, r: &IdSet) -> Result<VerificationReport> {
    guard(instance.len(), VERIFIER_GUARD)?;
    let h = profitable_set(instance, epsilon)?;
    let classes = class_partition(instance, layout);
    let class_of: BTreeMap<ElementId, i64> = classes.iter().flat_map(|(&k, ids)| ids.iter().map(move |&id| (id, k))).collect();
    let cost = |id: ElementId| instance.element(id).map_or(u64::MAX, |e| e.cost);
    let constraint = instance.constraint();
    let mut cases = 0u64;
    let mut failure = None;
    for_each_feasible(constraint, &unit_items(instance), None, layout.q_cap(), &mut |g, _, _| {
        cases += 1;
        let rest: Vec<ElementId> = g.iter().copied().filter(|e| !h.contains(e)).collect();
        let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
        let mut budget = 0u64;
        for &e in g.iter().filter(|e| h.contains(e)) {
            budget += cost(e);
            if let Some(&k) = class_of.get(&e) {
                *counts.entry(k).or_default() += 1;
            }
        }
        let demands: Vec<(usize, Vec<ElementId>)> = counts
            .iter()
            .map(|(k, &n)| (n, classes[k].iter().copied().filter(|e| r.contains(e) && !rest.contains(e)).collect()))
            .collect();
        let search = SubstitutionSearch { constraint, cost: &cost, demands, budget };
        let first_need = search.demands.first().map_or(0, |d| d.0);
        let mut chosen = rest.clone();
        if !search.search(0, 0, first_need, &mut chosen, 0) {
            failure = Some(Counterexample::Substitution { g: set_of(g) });
            return Flow::Stop;
        }
        Flow::Continue
    });
    Ok(VerificationReport::new("substitution", cases, failure))
}

/// Empty set independent, hereditary property and the exchange axiom,
/// checked over every subset of the ground set.
pub fn check_matroid_axioms(matroid: &dyn Matroid) -> Result<VerificationReport> {
    let ground: Vec<ElementId> = matroid.ground().iter().copied().collect();
    let n = ground.len();
    guard(n, AXIOM_GUARD)?;
    let members = |mask: usize| -> Vec<ElementId> { (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ground[i]).collect() };
    let independent: Vec<bool> = (0..1usize << n).map(|m| matroid.independent(&members(m))).collect();
    let fail = |axiom: &str, a: usize, b: usize| Counterexample::Axiom {
        axiom: axiom.to_string(),
        a: set_of(&members(a)),
        b: set_of(&members(b)),
    };
    let mut cases = 1u64;
    if !independent[0] {
        return Ok(VerificationReport::new("axioms", cases, Some(fail("empty", 0, 0))));
    }
    let mut by_size: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for mask in 0..1usize << n {
        if !independent[mask] {
            continue;
        }
        by_size[mask.count_ones() as usize].push(mask);
        for i in 0..n {
            if mask >> i & 1 == 1 {
                cases += 1;
                if !independent[mask & !(1 << i)] {
                    return Ok(VerificationReport::new("axioms", cases, Some(fail("hereditary", mask, mask & !(1 << i)))));
                }
            }
        }
    }
    // Exchange for |A| = |B| + 1 implies it for all larger gaps.
    for k in 0..n {
        for &b in &by_size[k] {
            for &a in &by_size[k + 1] {
                cases += 1;
                let extra = a & !b;
                if !(0..n).any(|i| extra >> i & 1 == 1 && independent[b | 1 << i]) {
                    return Ok(VerificationReport::new("axioms", cases, Some(fail("exchange", a, b))));
                }
            }
        }
    }
    Ok(VerificationReport::new("axioms", cases, None))
}

/// `D ⊆ A ∖ B`, `|D| = max(|A| − 2|B|, 0)` and `B ∪ D` feasible.
pub fn verify_weak_exchange(constraint: &Constraint, a: &IdSet, b: &IdSet, d: &IdSet) -> Result<VerificationReport> {
    let mut union = b.clone();
    union.extend(d.iter().copied());
    let ok = d.iter().all(|e| a.contains(e) && !b.contains(e))
        && d.len() == a.len().saturating_sub(2 * b.len())
        && constraint.is_feasible(&union)?;
    let failure = (!ok).then(|| Counterexample::WeakExchange { a: a.clone(), b: b.clone(), d: d.clone() });
    Ok(VerificationReport::new("weak-exchange", 1, failure))
}

/// `solution` is a solution with `p ≥ OPT − 2·max p(e)`.
pub fn verify_np_solver(instance: &BcInstance, solution: &Solution) -> Result<VerificationReport> {
    let opt = brute_force_opt(instance)?.total_profit;
    let max_profit = instance.max_profit();
    let profit = instance.profit_of(&solution.element_ids)?;
    let ok = is_solution(instance, &solution.element_ids)? && u128::from(profit) + 2 * u128::from(max_profit) >= u128::from(opt);
    let failure = (!ok).then_some(Counterexample::Solver { profit, opt, max_profit });
    Ok(VerificationReport::new("npsolver", 1, failure))
}

/// Every feasible set stays feasible after removing any one element.
pub fn check_downward_closed(constraint: &Constraint) -> Result<VerificationReport> {
    let ground = constraint.ground();
    guard(ground.len(), VERIFIER_GUARD)?;
    let mut cases = 0u64;
    let mut failure = None;
    let ids: Vec<ElementId> = ground.into_iter().collect();
    // Enumerate all subsets, not just feasible ones, so that pruning cannot hide a violation.
    let n = ids.len();
    for mask in 0..1u64 << n {
        let set: Vec<ElementId> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ids[i]).collect();
        if !constraint.feasible_unchecked(&set) {
            continue;
        }
        for skip in 0..set.len() {
            cases += 1;
            let sub: Vec<ElementId> = set.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &e)| e).collect();
            if !constraint.feasible_unchecked(&sub) {
                failure = Some(Counterexample::DownwardClosed { set: set_of(&set), subset: set_of(&sub) });
                return Ok(VerificationReport::new("downward-closed", cases, failure));
            }
        }
    }
    Ok(VerificationReport::new("downward-closed", cases, failure))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::MatchingGraph;
    use crate::exchange::exset_matching;
    use crate::instance::Element;
    use crate::matroid::{GraphicMatroid, UniformMatroid};
    use std::sync::Arc;

    fn ids(v: &[u32]) -> IdSet {
        v.iter().map(|&i| ElementId(i)).collect()
    }

    fn free(elements: Vec<Element>, budget: u64) -> BcInstance {
        let ground: IdSet = elements.iter().map(|e| e.id).collect();
        let n = ground.len();
        let m = Arc::new(UniformMatroid::new(ground, n));
        BcInstance::new(elements, Constraint::matroid_intersection(m.clone(), m), budget).unwrap()
    }

    fn eps(n: u64, d: u64) -> Epsilon {
        Epsilon::new(n, d).unwrap()
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_opt(&free(vec![], 0)).unwrap().total_profit, 0);
        let one = free(vec![Element::new(4, 2, 7)], 2);
        assert_eq!(brute_force_opt(&one).unwrap().element_ids, ids(&[4]));
        let k = free(vec![Element::new(0, 6, 6), Element::new(1, 5, 5), Element::new(2, 5, 5)], 10);
        let s = brute_force_opt(&k).unwrap();
        assert_eq!((s.total_profit, s.element_ids), (10, ids(&[1, 2])));
    }

    #[test]
    fn guard_is_enforced() {
        let big = free((0..25).map(|i| Element::new(i, 1, 1)).collect(), 3);
        assert_eq!(brute_force_opt(&big).unwrap_err(), Error::GuardExceeded { size: 25, guard: 24 });
    }

    #[test]
    fn profitable_set_boundaries() {
        let zero = free(vec![Element::new(0, 5, 3), Element::new(1, 5, 0)], 1);
        assert_eq!(profitable_set(&zero, &eps(1, 4)).unwrap(), ids(&[0]));
        // OPT = 100: p = 25 is not above ε·OPT.
        let inst = free(vec![Element::new(0, 1, 75), Element::new(1, 1, 25)], 2);
        assert_eq!(profitable_set(&inst, &eps(1, 4)).unwrap(), ids(&[0]));
        let flat = free(vec![Element::new(0, 1, 1), Element::new(1, 1, 1), Element::new(2, 1, 1)], 3);
        assert!(profitable_set(&flat, &eps(2, 5)).unwrap().is_empty());
    }

    fn matching_instance() -> BcInstance {
        // A 4-cycle plus a chord, eight parallel-free edges over 5 vertices.
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3), (3, 4), (4, 0)];
        let g = MatchingGraph::new(5, edges.iter().enumerate().map(|(i, &e)| (ElementId(i as u32), e)));
        let elements = (0..8).map(|i| Element::new(i, (i * 7 % 5 + 1) as u64, 40 + (i % 3) as u64)).collect();
        BcInstance::new(elements, Constraint::Matching(g), 9).unwrap()
    }

    #[test]
    fn exchange_checker_examples() {
        let inst = matching_instance();
        let layout = ClassLayout::with_gamma(eps(1, 4), 42, 2).unwrap();
        for (r, class) in class_partition(&inst, &layout) {
            assert!(verify_exchange_set(&inst, &layout, r, &class).unwrap().passed);
            let x = exset_matching(&inst, &layout, r).unwrap();
            assert!(verify_exchange_set(&inst, &layout, r, &x.elements).unwrap().passed);
            if !class.is_empty() {
                let report = verify_exchange_set(&inst, &layout, r, &IdSet::new()).unwrap();
                assert!(!report.passed);
                assert!(matches!(report.counterexample, Some(Counterexample::Exchange { .. })));
            }
        }
    }

    #[test]
    fn replacement_examples() {
        let inst = free(vec![Element::new(0, 2, 75), Element::new(1, 1, 25), Element::new(2, 0, 1)], 3);
        let e = eps(1, 4);
        let s = ids(&[0, 1]);
        let h = profitable_set(&inst, &e).unwrap();
        let s_h: IdSet = s.intersection(&h).copied().collect();
        assert!(verify_replacement(&inst, &e, &s, &s_h).unwrap().passed);
        let r = verify_replacement(&inst, &e, &s, &IdSet::new()).unwrap();
        assert_eq!(r.counterexample, Some(Counterexample::Replacement { property: 3 }));
        let r = verify_replacement(&inst, &e, &ids(&[0]), &ids(&[0, 2])).unwrap();
        assert_eq!(r.counterexample, Some(Counterexample::Replacement { property: 4 }));
    }

    #[test]
    fn representative_examples() {
        let inst = matching_instance();
        let e = eps(1, 4);
        assert!(verify_representative(&inst, &e, &inst.ids(), None).unwrap().passed);
        let zero = free(vec![Element::new(0, 1, 0)], 1);
        assert!(verify_representative(&zero, &e, &IdSet::new(), None).unwrap().passed);
        // Requiring the full optimum without profitable elements fails.
        let strict = verify_representative(&inst, &e, &IdSet::new(), Some(BigRational::one())).unwrap();
        assert!(!strict.passed);
    }

    #[test]
    fn substitutions_inside_the_full_class_union() {
        let inst = matching_instance();
        let e = eps(1, 4);
        let opt = brute_force_opt(&inst).unwrap().total_profit;
        let layout = ClassLayout::with_gamma(e, opt, 2).unwrap();
        assert!(verify_substitutions(&inst, &e, &layout, &inst.ids()).unwrap().passed);
    }

    #[test]
    fn axioms_hold_for_graphic_and_fail_for_a_non_matroid() {
        let tri = GraphicMatroid::new(3, [(ElementId(0), (0, 1)), (ElementId(1), (1, 2)), (ElementId(2), (0, 2))]).unwrap();
        assert!(check_matroid_axioms(&tri).unwrap().passed);

        #[derive(Debug)]
        struct Pairs(IdSet);
        impl Matroid for Pairs {
            fn ground(&self) -> &IdSet {
                &self.0
            }
            // {0,1} and {2} only: violates exchange.
            fn independent(&self, set: &[ElementId]) -> bool {
                let s = set_of(set);
                s.is_subset(&ids(&[0, 1])) || s.is_subset(&ids(&[2]))
            }
        }
        let report = check_matroid_axioms(&Pairs(ids(&[0, 1, 2]))).unwrap();
        assert!(matches!(report.counterexample, Some(Counterexample::Axiom { ref axiom, .. }) if axiom == "exchange"));
    }

    #[test]
    fn downward_closed_for_matchings() {
        assert!(check_downward_closed(matching_instance().constraint()).unwrap().passed);
    }

    #[test]
    fn weak_exchange_and_solver_reports() {
        let inst = matching_instance();
        let c = inst.constraint();
        assert!(verify_weak_exchange(c, &ids(&[0, 2]), &IdSet::new(), &ids(&[0, 2])).unwrap().passed);
        assert!(!verify_weak_exchange(c, &ids(&[0, 2]), &IdSet::new(), &ids(&[0])).unwrap().passed);
        let opt = brute_force_opt(&inst).unwrap();
        assert!(verify_np_solver(&inst, &opt).unwrap().passed);
        assert!(verify_np_solver(&inst, &Solution::empty()).unwrap().passed == (opt.total_profit <= 2 * inst.max_profit()));
    }
}
