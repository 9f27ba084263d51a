//! The two constraint families: matchings in a general graph and the
//! intersection of two matroids on a common ground set.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::instance::{ElementId, IdSet, Violation};
use crate::matroid::{restrict_truncate, ContractedMatroid, Matroid};

/// Undirected multigraph whose edges are the ground elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingGraph {
    vertex_count: u32,
    edges: BTreeMap<ElementId, (u32, u32)>,
}

impl MatchingGraph {
    pub fn new(vertex_count: u32, edges: impl IntoIterator<Item = (ElementId, (u32, u32))>) -> Self {
        Self { vertex_count, edges: edges.into_iter().collect() }
    }

    pub fn vertex_count(&self) -> u32 {
        self.vertex_count
    }

    pub fn edges(&self) -> &BTreeMap<ElementId, (u32, u32)> {
        &self.edges
    }

    pub fn endpoints(&self, id: ElementId) -> Option<(u32, u32)> {
        self.edges.get(&id).copied()
    }

    fn is_matching(&self, set: &[ElementId]) -> bool {
        let mut seen: Vec<u32> = Vec::with_capacity(2 * set.len());
        for id in set {
            let Some(&(u, v)) = self.edges.get(id) else { return false };
            if u == v || seen.contains(&u) || seen.contains(&v) {
                return false;
            }
            seen.push(u);
            seen.push(v);
        }
        true
    }
}

#[derive(Clone, Debug)]
pub struct MatroidPair {
    first: Arc<dyn Matroid>,
    second: Arc<dyn Matroid>,
}

impl MatroidPair {
    pub fn new(first: Arc<dyn Matroid>, second: Arc<dyn Matroid>) -> Self {
        Self { first, second }
    }

    pub fn first(&self) -> &Arc<dyn Matroid> {
        &self.first
    }

    pub fn second(&self) -> &Arc<dyn Matroid> {
        &self.second
    }

    pub fn swapped(&self) -> Self {
        Self { first: self.second.clone(), second: self.first.clone() }
    }
}

#[derive(Clone, Debug)]
pub enum Constraint {
    Matching(MatchingGraph),
    MatroidIntersection(MatroidPair),
}

impl Constraint {
    pub fn matroid_intersection(first: Arc<dyn Matroid>, second: Arc<dyn Matroid>) -> Self {
        Constraint::MatroidIntersection(MatroidPair::new(first, second))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Constraint::Matching(_) => "matching",
            Constraint::MatroidIntersection(_) => "matroid intersection",
        }
    }

    pub fn ground(&self) -> IdSet {
        match self {
            Constraint::Matching(g) => g.edges.keys().copied().collect(),
            Constraint::MatroidIntersection(p) => p.first.ground().union(p.second.ground()).copied().collect(),
        }
    }

    pub fn contains(&self, id: ElementId) -> bool {
        match self {
            Constraint::Matching(g) => g.edges.contains_key(&id),
            Constraint::MatroidIntersection(p) => p.first.ground().contains(&id) || p.second.ground().contains(&id),
        }
    }

    pub(crate) fn structural_violations(&self) -> Vec<Violation> {
        match self {
            Constraint::Matching(g) => g
                .edges
                .iter()
                .flat_map(|(&id, &(u, v))| {
                    let mut out = Vec::new();
                    if u == v {
                        out.push(Violation::SelfLoop(id));
                    }
                    for w in [u, v] {
                        if w >= g.vertex_count && !out.contains(&Violation::VertexOutOfRange { id, vertex: w }) {
                            out.push(Violation::VertexOutOfRange { id, vertex: w });
                        }
                    }
                    out
                })
                .collect(),
            Constraint::MatroidIntersection(p) => {
                if p.first.ground() == p.second.ground() {
                    vec![]
                } else {
                    vec![Violation::OracleGroundMismatch]
                }
            }
        }
    }

    /// Feasibility of a set of distinct ground ids, without id checks.
    pub(crate) fn feasible_unchecked(&self, set: &[ElementId]) -> bool {
        match self {
            Constraint::Matching(g) => g.is_matching(set),
            Constraint::MatroidIntersection(p) => p.first.independent(set) && p.second.independent(set),
        }
    }

    pub fn is_feasible(&self, set: &IdSet) -> Result<bool> {
        if let Some(&id) = set.iter().find(|id| !self.contains(**id)) {
            return Err(Error::UnknownId(id));
        }
        let v: Vec<ElementId> = set.iter().copied().collect();
        Ok(self.feasible_unchecked(&v))
    }

    pub fn is_bounded_feasible(&self, set: &IdSet, q: usize) -> Result<bool> {
        Ok(self.is_feasible(set)? && set.len() <= q)
    }

    /// `C / F`: the constraint on the remaining ground whose feasible sets
    /// are exactly `{A : A ∪ F feasible}`. Matching edges sharing a vertex
    /// with `F` leave the ground set; matroids are contracted by `F`.
    pub fn residual(&self, fixed: &IdSet) -> Result<Constraint> {
        if !self.is_feasible(fixed)? {
            return Err(Error::Infeasible);
        }
        Ok(match self {
            Constraint::Matching(g) => {
                let blocked: BTreeSet<u32> = fixed.iter().filter_map(|id| g.endpoints(*id)).flat_map(|(u, v)| [u, v]).collect();
                Constraint::Matching(MatchingGraph {
                    vertex_count: g.vertex_count,
                    edges: g
                        .edges
                        .iter()
                        .filter(|(id, (u, v))| !fixed.contains(id) && !blocked.contains(u) && !blocked.contains(v))
                        .map(|(&id, &e)| (id, e))
                        .collect(),
                })
            }
            Constraint::MatroidIntersection(p) => Constraint::matroid_intersection(
                Arc::new(ContractedMatroid::new(p.first.clone(), fixed)),
                Arc::new(ContractedMatroid::new(p.second.clone(), fixed)),
            ),
        })
    }

    /// Restriction of the ground set to `keep`.
    pub fn restrict(&self, keep: &IdSet) -> Constraint {
        match self {
            Constraint::Matching(g) => Constraint::Matching(MatchingGraph {
                vertex_count: g.vertex_count,
                edges: g.edges.iter().filter(|(id, _)| keep.contains(id)).map(|(&id, &e)| (id, e)).collect(),
            }),
            Constraint::MatroidIntersection(p) => Constraint::matroid_intersection(
                Arc::new(restrict_truncate(p.first.clone(), keep, usize::MAX)),
                Arc::new(restrict_truncate(p.second.clone(), keep, usize::MAX)),
            ),
        }
    }
}

pub fn is_feasible(constraint: &Constraint, set: &IdSet) -> Result<bool> {
    constraint.is_feasible(set)
}

/// Feasible and of cardinality at most `q`.
pub fn is_bounded_feasible(constraint: &Constraint, set: &IdSet, q: usize) -> Result<bool> {
    constraint.is_bounded_feasible(set, q)
}

pub fn residual_constraint(constraint: &Constraint, fixed: &IdSet) -> Result<Constraint> {
    constraint.residual(fixed)
}
