//! Independence-oracle matroids, the derived restriction/truncation and
//! contraction oracles, greedy minimum-cost bases and the exchange
//! constructions used by the rest of the crate.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::constraint::Constraint;
use crate::error::{Error, Result};
use crate::instance::{ElementId, IdSet};

/// A matroid given by its ground set and an independence predicate.
///
/// `independent` receives distinct ids of the ground set in any order and
/// must be pure.
pub trait Matroid: fmt::Debug + Send + Sync {
    fn ground(&self) -> &IdSet;

    fn independent(&self, set: &[ElementId]) -> bool;
}

/// Checked independence query: every id must belong to the ground set.
pub fn is_independent(oracle: &dyn Matroid, set: &IdSet) -> Result<bool> {
    if let Some(&id) = set.iter().find(|id| !oracle.ground().contains(id)) {
        return Err(Error::UnknownId(id));
    }
    let v: Vec<ElementId> = set.iter().copied().collect();
    Ok(oracle.independent(&v))
}

#[derive(Clone, Debug)]
pub struct UniformMatroid {
    ground: IdSet,
    rank: usize,
}

impl UniformMatroid {
    pub fn new(ground: IdSet, rank: usize) -> Self {
        Self { ground, rank }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

impl Matroid for UniformMatroid {
    fn ground(&self) -> &IdSet {
        &self.ground
    }

    fn independent(&self, set: &[ElementId]) -> bool {
        set.len() <= self.rank
    }
}

/// Disjoint blocks with per-block capacities; the ground set is the union
/// of the blocks.
#[derive(Clone, Debug)]
pub struct PartitionMatroid {
    ground: IdSet,
    block_of: BTreeMap<ElementId, usize>,
    capacities: Vec<usize>,
}

impl PartitionMatroid {
    pub fn new(blocks: Vec<Vec<ElementId>>, capacities: Vec<usize>) -> Result<Self> {
        if blocks.len() != capacities.len() {
            return Err(Error::Precondition(format!(
                "partition matroid has {} blocks but {} capacities",
                blocks.len(),
                capacities.len()
            )));
        }
        let mut block_of = BTreeMap::new();
        for (b, block) in blocks.iter().enumerate() {
            for &id in block {
                if block_of.insert(id, b).is_some() {
                    return Err(Error::Precondition(format!("element {id} appears in two partition blocks")));
                }
            }
        }
        Ok(Self { ground: block_of.keys().copied().collect(), block_of, capacities })
    }

    pub fn blocks(&self) -> Vec<Vec<ElementId>> {
        let mut blocks = vec![Vec::new(); self.capacities.len()];
        for (&id, &b) in &self.block_of {
            blocks[b].push(id);
        }
        blocks
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }
}

impl Matroid for PartitionMatroid {
    fn ground(&self) -> &IdSet {
        &self.ground
    }

    fn independent(&self, set: &[ElementId]) -> bool {
        let mut used = vec![0usize; self.capacities.len()];
        for id in set {
            match self.block_of.get(id) {
                Some(&b) => {
                    used[b] += 1;
                    if used[b] > self.capacities[b] {
                        return false;
                    }
                }
                None => return false,
            }
        }
        true
    }
}

/// Cycle matroid of a multigraph: a set of edges is independent iff it is
/// acyclic. Self-loops are never independent.
#[derive(Clone, Debug)]
pub struct GraphicMatroid {
    ground: IdSet,
    vertex_count: u32,
    edges: BTreeMap<ElementId, (u32, u32)>,
}

impl GraphicMatroid {
    pub fn new(vertex_count: u32, edges: impl IntoIterator<Item = (ElementId, (u32, u32))>) -> Result<Self> {
        let edges: BTreeMap<_, _> = edges.into_iter().collect();
        if let Some((id, _)) = edges.iter().find(|(_, &(u, v))| u >= vertex_count || v >= vertex_count) {
            return Err(Error::Precondition(format!("graphic edge {id} uses a vertex outside 0..{vertex_count}")));
        }
        Ok(Self { ground: edges.keys().copied().collect(), vertex_count, edges })
    }

    pub fn vertex_count(&self) -> u32 {
        self.vertex_count
    }

    pub fn edges(&self) -> &BTreeMap<ElementId, (u32, u32)> {
        &self.edges
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let up = parent[parent[x as usize] as usize];
        parent[x as usize] = up;
        x = up;
    }
    x
}

impl Matroid for GraphicMatroid {
    fn ground(&self) -> &IdSet {
        &self.ground
    }

    fn independent(&self, set: &[ElementId]) -> bool {
        let mut parent: Vec<u32> = (0..self.vertex_count).collect();
        for id in set {
            let Some(&(u, v)) = self.edges.get(id) else { return false };
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                return false;
            }
            parent[ru as usize] = rv;
        }
        true
    }
}

/// `[M ∩ U]_{≤q}`: independent sets are `{A ⊆ U : A ∈ I(M), |A| ≤ q}`.
#[derive(Clone, Debug)]
pub struct RestrictedTruncatedMatroid {
    base: Arc<dyn Matroid>,
    ground: IdSet,
    cap: usize,
}

impl RestrictedTruncatedMatroid {
    pub fn cap(&self) -> usize {
        self.cap
    }
}

impl Matroid for RestrictedTruncatedMatroid {
    fn ground(&self) -> &IdSet {
        &self.ground
    }

    fn independent(&self, set: &[ElementId]) -> bool {
        set.len() <= self.cap && set.iter().all(|id| self.ground.contains(id)) && self.base.independent(set)
    }
}

/// Restricts `base` to `universe` (intersected with its ground set) and
/// truncates it at cardinality `cap`.
pub fn restrict_truncate(base: Arc<dyn Matroid>, universe: &IdSet, cap: usize) -> RestrictedTruncatedMatroid {
    let ground = universe.intersection(base.ground()).copied().collect();
    RestrictedTruncatedMatroid { base, ground, cap }
}

/// `M / F` for an independent `F`: ground `E ∖ F`, and `A` is independent
/// iff `A ∪ F` is independent in `M`.
#[derive(Clone, Debug)]
pub struct ContractedMatroid {
    base: Arc<dyn Matroid>,
    fixed: Vec<ElementId>,
    ground: IdSet,
}

impl ContractedMatroid {
    pub fn new(base: Arc<dyn Matroid>, fixed: &IdSet) -> Self {
        let ground = base.ground().difference(fixed).copied().collect();
        Self { base, fixed: fixed.iter().copied().collect(), ground }
    }
}

impl Matroid for ContractedMatroid {
    fn ground(&self) -> &IdSet {
        &self.ground
    }

    fn independent(&self, set: &[ElementId]) -> bool {
        if set.iter().any(|id| !self.ground.contains(id)) {
            return false;
        }
        let mut joined = Vec::with_capacity(set.len() + self.fixed.len());
        joined.extend_from_slice(set);
        joined.extend_from_slice(&self.fixed);
        self.base.independent(&joined)
    }
}

/// Minimum-cost basis by the greedy scan in ascending `(cost, id)` order.
pub fn min_cost_basis(oracle: &dyn Matroid, cost: impl Fn(ElementId) -> u64) -> IdSet {
    let mut order: Vec<ElementId> = oracle.ground().iter().copied().collect();
    order.sort_by_key(|&id| (cost(id), id));
    let mut basis = Vec::new();
    for id in order {
        basis.push(id);
        if !oracle.independent(&basis) {
            basis.pop();
        }
    }
    basis.into_iter().collect()
}

/// Greedily extends `b` by elements of `a ∖ b` (ascending id) until `take`
/// elements were added or `a ∖ b` is exhausted.
fn greedy_extension(oracle: &dyn Matroid, a: &IdSet, b: &IdSet, take: usize) -> IdSet {
    let mut current: Vec<ElementId> = b.iter().copied().collect();
    let mut added = IdSet::new();
    for &e in a.difference(b) {
        if added.len() == take {
            break;
        }
        current.push(e);
        if oracle.independent(&current) {
            added.insert(e);
        } else {
            current.pop();
        }
    }
    added
}

/// Given feasible `a` and `b`, returns `D ⊆ a ∖ b` with
/// `|D| = max(|a| − 2|b|, 0)` and `b ∪ D` feasible.
///
/// Matroid intersection: extend `b` inside each matroid by
/// `max(|a| − |b|, 0)` elements of `a` and intersect the two extensions.
/// Matching: keep the edges of `a` avoiding every endpoint of `b`.
/// The result is trimmed to the exact size, dropping the largest ids.
pub fn weak_exchange_extend(constraint: &Constraint, a: &IdSet, b: &IdSet) -> Result<IdSet> {
    if !constraint.is_feasible(a)? || !constraint.is_feasible(b)? {
        return Err(Error::Infeasible);
    }
    let target = a.len().saturating_sub(2 * b.len());
    let mut d: IdSet = match constraint {
        Constraint::MatroidIntersection(pair) => {
            let take = a.len().saturating_sub(b.len());
            let d1 = greedy_extension(pair.first().as_ref(), a, b, take);
            let d2 = greedy_extension(pair.second().as_ref(), a, b, take);
            d1.intersection(&d2).copied().collect()
        }
        Constraint::Matching(graph) => {
            let covered: std::collections::BTreeSet<u32> =
                b.iter().filter_map(|id| graph.endpoints(*id)).flat_map(|(u, v)| [u, v]).collect();
            a.iter()
                .copied()
                .filter(|id| graph.endpoints(*id).is_some_and(|(u, v)| !covered.contains(&u) && !covered.contains(&v)))
                .collect()
        }
    };
    if d.len() < target {
        return Err(Error::Postcondition(format!("exchange produced {} elements, needed {target}", d.len())));
    }
    while d.len() > target {
        d.pop_last();
    }
    Ok(d)
}

/// For independent `a_set`, `b_set` and `a ∈ a_set ∖ b_set` with
/// `b_set + a` dependent, returns the smallest `b ∈ b_set ∖ a_set` with
/// `a_set − a + b` independent.
pub fn exchange_witness(oracle: &dyn Matroid, a_set: &IdSet, b_set: &IdSet, a: ElementId) -> Option<ElementId> {
    let base: Vec<ElementId> = a_set.iter().copied().filter(|&e| e != a).collect();
    b_set.difference(a_set).copied().find(|&b| {
        let mut s = base.clone();
        s.push(b);
        oracle.independent(&s)
    })
}
