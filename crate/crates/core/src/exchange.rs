//! Exchange sets, one per profit class.
//!
//! An exchange set `X ⊆ K_r` guarantees that any bounded feasible `Δ` and
//! any `a ∈ (Δ ∩ K_r) ∖ X` admit some `b ∈ X ∖ Δ` of no larger cost with
//! `Δ − a + b` still bounded feasible.
//!
//! * Matching: `k(ε) = 6q(ε)` rounds of greedy minimum-cost matchings of at
//!   most `N(ε) = 3q(ε)` edges each, every round drawing from the edges not
//!   yet taken.
//! * Matroid intersection: the chain recursion. The first matroid decides
//!   which elements may extend the current chain `S`; the second supplies a
//!   minimum-cost basis `B_S` of its restriction to those candidates,
//!   truncated at `q(ε)`. Every `B_S` joins `X` and each `b ∈ B_S` spawns the
//!   branch `S + b`.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::classes::{class_partition, ClassLayout};
use crate::constraint::{Constraint, MatchingGraph, MatroidPair};
use crate::error::{Error, Result};
use crate::instance::{BcInstance, ElementId, IdSet};
use crate::matroid::{min_cost_basis, restrict_truncate, Matroid};

#[derive(Clone, Debug)]
pub struct ExchangeConfig {
    /// Also run the chain recursion with the matroid roles exchanged and
    /// take the union.
    pub swap_roles: bool,
    /// Maximum number of expanded branches per class.
    pub branch_budget: usize,
}

impl Default for ExchangeConfig {
    fn default() -> Self {
        Self { swap_roles: false, branch_budget: 1_000_000 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExchangeStats {
    /// Sizes of the greedy matchings, one per round (matching only).
    pub round_sizes: Vec<usize>,
    /// Distinct branches expanded by the chain recursion.
    pub branches: usize,
    /// Longest chain reached.
    pub max_chain_len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExchangeSet {
    pub class_index: i64,
    pub elements: IdSet,
    pub stats: ExchangeStats,
}

/// Ordered list of elements in order of discovery.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Chain(pub Vec<ElementId>);

impl Chain {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_set(&self) -> IdSet {
        self.0.iter().copied().collect()
    }
}

fn to_usize(v: &BigUint) -> usize {
    v.to_usize().unwrap_or(usize::MAX)
}

/// Scans `edges` by ascending `(cost, id)` and keeps an edge iff it is
/// vertex-disjoint from those kept so far, stopping at `limit` edges.
pub fn greedy_min_cost_matching(
    edges: &IdSet,
    graph: &MatchingGraph,
    cost: impl Fn(ElementId) -> u64,
    limit: usize,
) -> IdSet {
    let mut order: Vec<ElementId> = edges.iter().copied().filter(|id| graph.endpoints(*id).is_some()).collect();
    order.sort_by_key(|&id| (cost(id), id));
    let mut used = BTreeSet::new();
    let mut chosen = IdSet::new();
    for id in order {
        if chosen.len() >= limit {
            break;
        }
        let (u, v) = graph.endpoints(id).expect("filtered above");
        if u != v && !used.contains(&u) && !used.contains(&v) {
            used.insert(u);
            used.insert(v);
            chosen.insert(id);
        }
    }
    chosen
}

fn class_of(instance: &BcInstance, layout: &ClassLayout, r: i64) -> Result<IdSet> {
    if !layout.index_range().contains(&r) {
        return Err(Error::Precondition(format!("class {r} outside {:?}", layout.index_range())));
    }
    Ok(class_partition(instance, layout).remove(&r).unwrap_or_default())
}

/// Exchange set for class `r` of a matching instance.
pub fn exset_matching(instance: &BcInstance, layout: &ClassLayout, r: i64) -> Result<ExchangeSet> {
    let Constraint::Matching(graph) = instance.constraint() else {
        return Err(Error::WrongConstraint { expected: "matching" });
    };
    let class = class_of(instance, layout, r)?;
    let per_round = to_usize(&(layout.q() * 3u32));
    let rounds = to_usize(&(layout.q() * 6u32));
    exset_matching_with_limits(instance, graph, class, r, rounds, per_round)
}

pub(crate) fn exset_matching_with_limits(
    instance: &BcInstance,
    graph: &MatchingGraph,
    class: IdSet,
    r: i64,
    rounds: usize,
    per_round: usize,
) -> Result<ExchangeSet> {
    let cost = |id: ElementId| instance.element(id).map_or(u64::MAX, |e| e.cost);
    let mut pool = class;
    let mut elements = IdSet::new();
    let mut round_sizes = Vec::new();
    for _ in 0..rounds {
        if pool.is_empty() {
            break;
        }
        let m = greedy_min_cost_matching(&pool, graph, cost, per_round);
        if m.is_empty() {
            break;
        }
        round_sizes.push(m.len());
        for id in &m {
            pool.remove(id);
        }
        elements.extend(m);
    }
    Ok(ExchangeSet { class_index: r, elements, stats: ExchangeStats { round_sizes, ..Default::default() } })
}

/// `U_S = {e ∈ class ∖ S : S + e independent in the gating matroid}`.
pub fn extension_candidates(chain: &Chain, class: &IdSet, gate: &dyn Matroid) -> IdSet {
    let in_chain = chain.as_set();
    let mut probe = chain.0.clone();
    class
        .iter()
        .copied()
        .filter(|e| !in_chain.contains(e))
        .filter(|&e| {
            probe.push(e);
            let ok = gate.independent(&probe);
            probe.pop();
            ok
        })
        .collect()
}

struct ChainSearch<'a> {
    instance: &'a BcInstance,
    class: &'a IdSet,
    gate: &'a dyn Matroid,
    basis_source: &'a Arc<dyn Matroid>,
    q: usize,
    budget: usize,
    visited: BTreeSet<Vec<ElementId>>,
    found: IdSet,
    stats: ExchangeStats,
}

impl ChainSearch<'_> {
    fn extend(&mut self, chain: &mut Chain) -> Result<()> {
        if chain.len() > self.q {
            return Ok(());
        }
        // U_S and B_S depend only on the set S.
        let mut key = chain.0.clone();
        key.sort_unstable();
        if !self.visited.insert(key) {
            return Ok(());
        }
        self.stats.branches += 1;
        if self.stats.branches > self.budget {
            return Err(Error::BranchBudgetExceeded { limit: self.budget });
        }
        self.stats.max_chain_len = self.stats.max_chain_len.max(chain.len());

        let candidates = extension_candidates(chain, self.class, self.gate);
        let restricted = restrict_truncate(self.basis_source.clone(), &candidates, self.q);
        let instance = self.instance;
        let basis = min_cost_basis(&restricted, |id| instance.element(id).map_or(u64::MAX, |e| e.cost));
        self.found.extend(basis.iter().copied());
        for b in basis {
            chain.0.push(b);
            let res = self.extend(chain);
            chain.0.pop();
            res?;
        }
        Ok(())
    }
}

fn chain_recursion(
    instance: &BcInstance,
    pair: &MatroidPair,
    class: &IdSet,
    q: usize,
    budget: usize,
) -> Result<(IdSet, ExchangeStats)> {
    let mut search = ChainSearch {
        instance,
        class,
        gate: pair.first().as_ref(),
        basis_source: pair.second(),
        q,
        budget,
        visited: BTreeSet::new(),
        found: IdSet::new(),
        stats: ExchangeStats::default(),
    };
    search.extend(&mut Chain::default())?;
    Ok((search.found, search.stats))
}

/// Exchange set for class `r` of a matroid-intersection instance.
pub fn exset_matroid_intersection(
    instance: &BcInstance,
    layout: &ClassLayout,
    r: i64,
    config: &ExchangeConfig,
) -> Result<ExchangeSet> {
    let Constraint::MatroidIntersection(pair) = instance.constraint() else {
        return Err(Error::WrongConstraint { expected: "matroid intersection" });
    };
    let class = class_of(instance, layout, r)?;
    let q = layout.q_cap();
    let (mut elements, mut stats) = chain_recursion(instance, pair, &class, q, config.branch_budget)?;
    if config.swap_roles {
        let (more, more_stats) = chain_recursion(instance, &pair.swapped(), &class, q, config.branch_budget)?;
        elements.extend(more);
        stats.branches += more_stats.branches;
        stats.max_chain_len = stats.max_chain_len.max(more_stats.max_chain_len);
    }
    Ok(ExchangeSet { class_index: r, elements, stats })
}

fn swap_candidate(delta: &IdSet, a: ElementId, b: ElementId) -> Vec<ElementId> {
    delta.iter().copied().filter(|&e| e != a).chain(std::iter::once(b)).collect()
}

fn shift_preconditions<'a>(
    instance: &'a BcInstance,
    delta: &IdSet,
    a: ElementId,
    b: ElementId,
    q: usize,
) -> Result<&'a MatroidPair> {
    let Constraint::MatroidIntersection(pair) = instance.constraint() else {
        return Err(Error::WrongConstraint { expected: "matroid intersection" });
    };
    if !delta.contains(&a) || delta.contains(&b) {
        return Err(Error::Precondition("shift requires a ∈ Δ and b ∉ Δ".into()));
    }
    if !instance.contains(b) {
        return Err(Error::UnknownId(b));
    }
    if !instance.constraint().is_bounded_feasible(delta, q)? {
        return Err(Error::Precondition("Δ must be bounded feasible".into()));
    }
    Ok(pair)
}

/// `c(b) ≤ c(a)` and `Δ − a + b` is independent in both matroids with at
/// most `q` elements.
pub fn is_shift(instance: &BcInstance, delta: &IdSet, a: ElementId, b: ElementId, q: usize) -> Result<bool> {
    let pair = shift_preconditions(instance, delta, a, b, q)?;
    let swapped = swap_candidate(delta, a, b);
    Ok(instance.cost(b)? <= instance.cost(a)?
        && swapped.len() <= q
        && pair.first().independent(&swapped)
        && pair.second().independent(&swapped))
}

/// `c(b) ≤ c(a)` and `Δ − a + b` is independent (within `q`) in the second
/// matroid but not in the first.
pub fn is_semi_shift(instance: &BcInstance, delta: &IdSet, a: ElementId, b: ElementId, q: usize) -> Result<bool> {
    let pair = shift_preconditions(instance, delta, a, b, q)?;
    let swapped = swap_candidate(delta, a, b);
    Ok(instance.cost(b)? <= instance.cost(a)?
        && swapped.len() <= q
        && pair.second().independent(&swapped)
        && !pair.first().independent(&swapped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Element, Epsilon};
    use crate::matroid::{PartitionMatroid, UniformMatroid};

    fn ids(v: &[u32]) -> IdSet {
        v.iter().map(|&i| ElementId(i)).collect()
    }

    fn path_graph() -> MatchingGraph {
        MatchingGraph::new(4, [(ElementId(0), (0, 1)), (ElementId(1), (1, 2)), (ElementId(2), (2, 3))])
    }

    #[test]
    fn greedy_matching_examples() {
        let g = path_graph();
        let costs = [1u64, 0, 2];
        let cost = |id: ElementId| costs[id.0 as usize];
        assert!(greedy_min_cost_matching(&ids(&[0, 1, 2]), &g, cost, 0).is_empty());
        assert_eq!(greedy_min_cost_matching(&ids(&[0, 1, 2]), &g, cost, 3), ids(&[1]));

        let tri = MatchingGraph::new(3, [(ElementId(0), (0, 1)), (ElementId(1), (1, 2)), (ElementId(2), (0, 2))]);
        assert_eq!(greedy_min_cost_matching(&ids(&[0, 1, 2]), &tri, |id| id.0 as u64 + 1, 2), ids(&[0]));
    }

    fn star(k: u32, eps: Epsilon) -> (BcInstance, ClassLayout) {
        let g = MatchingGraph::new(k + 1, (0..k).map(|i| (ElementId(i), (0, i + 1))));
        let elements = (0..k).map(|i| Element::new(i, u64::from(i) + 1, 100)).collect();
        let inst = BcInstance::new(elements, Constraint::Matching(g), 100).unwrap();
        (inst, ClassLayout::with_gamma(eps, 50, 2).unwrap())
    }

    #[test]
    fn star_takes_one_edge_per_round() {
        let (inst, layout) = star(5, Epsilon::new(1, 2).unwrap());
        let x = exset_matching(&inst, &layout, 1).unwrap();
        assert_eq!(x.elements, ids(&[0, 1, 2, 3, 4]));
        assert_eq!(x.stats.round_sizes, vec![1; 5]);
        assert!(exset_matching(&inst, &layout, 2).unwrap().elements.is_empty());
    }

    #[test]
    fn round_limits_cap_the_exchange_set() {
        let (inst, _) = star(5, Epsilon::new(1, 2).unwrap());
        let Constraint::Matching(g) = inst.constraint() else { unreachable!() };
        let x = exset_matching_with_limits(&inst, g, inst.ids(), 1, 2, 1).unwrap();
        // Two rounds, cheapest edge first.
        assert_eq!(x.elements, ids(&[0, 1]));
    }

    #[test]
    fn wrong_constraint_is_an_error() {
        let (inst, layout) = star(2, Epsilon::new(1, 4).unwrap());
        assert_eq!(
            exset_matroid_intersection(&inst, &layout, 1, &ExchangeConfig::default()).unwrap_err(),
            Error::WrongConstraint { expected: "matroid intersection" }
        );
    }

    #[test]
    fn extension_candidates_examples() {
        let class = ids(&[1, 2, 3, 4]);
        let free = UniformMatroid::new(class.clone(), 4);
        assert_eq!(extension_candidates(&Chain::default(), &class, &free), class);
        let tight = UniformMatroid::new(class.clone(), 1);
        assert!(extension_candidates(&Chain(vec![ElementId(2)]), &class, &tight).is_empty());
        let part = PartitionMatroid::new(vec![vec![ElementId(1), ElementId(2)], vec![ElementId(3), ElementId(4)]], vec![1, 2]).unwrap();
        assert_eq!(extension_candidates(&Chain(vec![ElementId(1)]), &class, &part), ids(&[3, 4]));
    }

    fn mi_instance(elements: Vec<Element>, m1: Arc<dyn Matroid>, m2: Arc<dyn Matroid>) -> BcInstance {
        BcInstance::new(elements, Constraint::matroid_intersection(m1, m2), 1000).unwrap()
    }

    #[test]
    fn single_element_class() {
        let g = ids(&[0]);
        let m: Arc<dyn Matroid> = Arc::new(UniformMatroid::new(g, 1));
        let inst = mi_instance(vec![Element::new(0, 3, 10)], m.clone(), m);
        let layout = ClassLayout::with_gamma(Epsilon::new(1, 4).unwrap(), 5, 2).unwrap();
        let x = exset_matroid_intersection(&inst, &layout, 1, &ExchangeConfig::default()).unwrap();
        assert_eq!(x.elements, ids(&[0]));
        let empty = exset_matroid_intersection(&inst, &layout, 2, &ExchangeConfig::default()).unwrap();
        assert!(empty.elements.is_empty());
    }

    #[test]
    fn branch_budget_fails_loudly() {
        let g: IdSet = (0..8).map(ElementId).collect();
        let m: Arc<dyn Matroid> = Arc::new(UniformMatroid::new(g.clone(), 4));
        let inst = mi_instance((0..8).map(|i| Element::new(i, 1, 10)).collect(), m.clone(), m);
        let layout = ClassLayout::with_gamma(Epsilon::new(1, 4).unwrap(), 5, 2).unwrap();
        let config = ExchangeConfig { branch_budget: 3, ..Default::default() };
        assert_eq!(
            exset_matroid_intersection(&inst, &layout, 1, &config).unwrap_err(),
            Error::BranchBudgetExceeded { limit: 3 }
        );
    }

    #[test]
    fn shift_examples() {
        let g = ids(&[0, 1, 2]);
        let free: Arc<dyn Matroid> = Arc::new(UniformMatroid::new(g.clone(), 3));
        let inst = mi_instance(
            vec![Element::new(0, 5, 1), Element::new(1, 3, 1), Element::new(2, 9, 1)],
            free.clone(),
            free,
        );
        let delta = ids(&[0]);
        assert!(is_shift(&inst, &delta, ElementId(0), ElementId(1), 10).unwrap());
        assert!(!is_semi_shift(&inst, &delta, ElementId(0), ElementId(1), 10).unwrap());
        assert!(!is_shift(&inst, &delta, ElementId(0), ElementId(2), 10).unwrap());
        assert!(!is_semi_shift(&inst, &delta, ElementId(0), ElementId(2), 10).unwrap());
        assert!(is_shift(&inst, &delta, ElementId(0), ElementId(0), 10).is_err());
    }

    #[test]
    fn semi_shift_when_first_matroid_blocks() {
        // First matroid: {0,1} one block of capacity 1 and {2} free; second free.
        let g = ids(&[0, 1, 2]);
        let m1: Arc<dyn Matroid> =
            Arc::new(PartitionMatroid::new(vec![vec![ElementId(0), ElementId(1)], vec![ElementId(2)]], vec![1, 1]).unwrap());
        let m2: Arc<dyn Matroid> = Arc::new(UniformMatroid::new(g, 3));
        let inst = mi_instance(vec![Element::new(0, 5, 1), Element::new(1, 3, 1), Element::new(2, 4, 1)], m1, m2);
        let delta = ids(&[1, 2]);
        // Δ − 2 + 0 = {0, 1} violates the first block.
        assert!(is_semi_shift(&inst, &delta, ElementId(2), ElementId(0), 10).unwrap() == false);
        let delta = ids(&[0, 2]);
        assert!(is_shift(&inst, &delta, ElementId(0), ElementId(1), 10).unwrap());
        let delta = ids(&[1]);
        assert!(matches!(is_shift(&inst, &delta, ElementId(1), ElementId(0), 10), Ok(false)));
    }
}
