use crate::constraint::Constraint;
use crate::instance::{BcInstance, ElementId, IdSet};

#[derive(Clone, Copy, Debug)]
pub(crate) struct Item {
    pub id: ElementId,
    pub cost: u64,
    pub value: i128,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Flow {
    Continue,
    Stop,
}

/// Items for `ids` (in id order) valued by profit.
pub(crate) fn profit_items(instance: &BcInstance, ids: &IdSet) -> Vec<Item> {
    ids.iter()
        .filter_map(|&id| instance.element(id))
        .map(|e| Item { id: e.id, cost: e.cost, value: i128::from(e.profit) })
        .collect()
}

/// Depth-first walk over every feasible subset of `items` with at most
/// `max_size` elements and (when given) cost within `budget`, in
/// lexicographic order of the item sequence, starting with the empty set.
/// Both pruning rules are sound because the families are downward closed.
pub(crate) fn for_each_feasible<F>(
    constraint: &Constraint,
    items: &[Item],
    budget: Option<u64>,
    max_size: usize,
    visit: &mut F,
) -> Flow
where
    F: FnMut(&[ElementId], u64, i128) -> Flow,
{
    let mut current = Vec::new();
    walk(constraint, items, budget, max_size, 0, &mut current, 0, 0, visit)
}

#[allow(clippy::too_many_arguments)]
fn walk<F>(
    constraint: &Constraint,
    items: &[Item],
    budget: Option<u64>,
    max_size: usize,
    start: usize,
    current: &mut Vec<ElementId>,
    cost: u64,
    value: i128,
    visit: &mut F,
) -> Flow
where
    F: FnMut(&[ElementId], u64, i128) -> Flow,
{
    if visit(current, cost, value) == Flow::Stop {
        return Flow::Stop;
    }
    if current.len() >= max_size {
        return Flow::Continue;
    }
    for (i, item) in items.iter().enumerate().skip(start) {
        let Some(next_cost) = cost.checked_add(item.cost) else { continue };
        if budget.is_some_and(|b| next_cost > b) {
            continue;
        }
        current.push(item.id);
        let flow = if constraint.feasible_unchecked(current) {
            walk(constraint, items, budget, max_size, i + 1, current, next_cost, value + item.value, visit)
        } else {
            Flow::Continue
        };
        current.pop();
        if flow == Flow::Stop {
            return Flow::Stop;
        }
    }
    Flow::Continue
}

/// Size first, then lexicographic on ascending id sequences.
pub(crate) fn canonical_slice_cmp(a: &[ElementId], b: &[ElementId]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Maximum-value feasible subset of `items` within `budget`. Among equal
/// values the canonically smallest set wins.
pub(crate) fn best_subset(constraint: &Constraint, items: &[Item], budget: Option<u64>) -> (IdSet, i128) {
    let mut best: Vec<ElementId> = Vec::new();
    let mut best_value = 0i128;
    for_each_feasible(constraint, items, budget, usize::MAX, &mut |set, _, value| {
        if value > best_value || (value == best_value && canonical_slice_cmp(set, &best).is_lt()) {
            best = set.to_vec();
            best_value = value;
        }
        Flow::Continue
    });
    (best.into_iter().collect(), best_value)
}

/// Exact optimum of `instance` restricted to `ids`.
pub(crate) fn optimum(instance: &BcInstance, ids: &IdSet) -> (IdSet, u64) {
    let items = profit_items(instance, ids);
    let (set, value) = best_subset(instance.constraint(), &items, Some(instance.budget()));
    (set, value as u64)
}
