use std::sync::Arc;

use proptest::prelude::*;
use repset_core::oracle::{brute_force_opt, check_matroid_axioms, verify_np_solver};
use repset_core::{
    approx_opt, eptas, min_cost_basis, non_profitable_solver, preprocess_discard, rep_set, solve, AlphaMode,
    BcInstance, ClassLayout, Constraint, Element, ElementId, Epsilon, GraphicMatroid, IdSet, LagrangeConfig,
    MatchingGraph, Matroid, PartitionMatroid, RepSetConfig, SolverConfig, UniformMatroid,
};

fn matching_instance() -> impl Strategy<Value = BcInstance> {
    (3u32..7, prop::collection::vec((0u32..7, 1u32..7, 0u64..20, 0u64..40), 0..9), 0u64..60).prop_map(
        |(v, edges, budget)| {
            let graph = MatchingGraph::new(
                v,
                edges.iter().enumerate().map(|(i, &(a, d, _, _))| (ElementId(i as u32), (a % v, (a + d % (v - 1).max(1) + 1) % v))),
            );
            let elements = edges.iter().enumerate().map(|(i, &(_, _, c, p))| Element::new(i as u32, c, p)).collect();
            BcInstance::new(elements, Constraint::Matching(graph), budget).expect("valid matching instance")
        },
    )
}

fn intersection_instance() -> impl Strategy<Value = BcInstance> {
    (prop::collection::vec((0u64..20, 0u64..40, 0usize..3, 0u32..5, 0u32..5), 0..9), 0usize..4, 0u64..60).prop_map(
        |(items, rank, budget)| {
            let ground: IdSet = (0..items.len() as u32).map(ElementId).collect();
            let mut blocks = vec![Vec::new(); 3];
            for (i, item) in items.iter().enumerate() {
                blocks[item.2].push(ElementId(i as u32));
            }
            let partition = PartitionMatroid::new(blocks, vec![1, 1, 2]).expect("disjoint blocks");
            let graphic = GraphicMatroid::new(5, items.iter().enumerate().map(|(i, it)| (ElementId(i as u32), (it.3, it.4))))
                .expect("graphic");
            let first: Arc<dyn Matroid> = if rank % 2 == 0 { Arc::new(partition) } else { Arc::new(UniformMatroid::new(ground, rank + 1)) };
            let elements = items.iter().enumerate().map(|(i, it)| Element::new(i as u32, it.0, it.1)).collect();
            BcInstance::new(elements, Constraint::matroid_intersection(first, Arc::new(graphic)), budget)
                .expect("valid intersection instance")
        },
    )
}

fn any_instance() -> impl Strategy<Value = BcInstance> {
    prop_oneof![matching_instance(), intersection_instance()]
}

fn epsilon() -> impl Strategy<Value = Epsilon> {
    prop_oneof![Just((1, 3)), Just((1, 4)), Just((1, 10)), Just((2, 7))].prop_map(|(n, d)| Epsilon::new(n, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solve_is_a_near_optimal_solution(inst in any_instance(), eps in epsilon()) {
        let opt = brute_force_opt(&inst).unwrap().total_profit;
        let out = solve(&inst, eps, &SolverConfig::default()).unwrap();
        prop_assert!(repset_core::is_solution(&inst, &out.solution.element_ids).unwrap());
        let (n, d) = (u128::from(eps.numerator()), u128::from(eps.denominator()));
        prop_assert!(u128::from(out.solution.total_profit) * d >= (d - n) * u128::from(opt));
    }

    #[test]
    fn eptas_does_not_depend_on_threads(inst in any_instance()) {
        let eps = Epsilon::new(1, 4).unwrap();
        let one = eptas(&inst, eps, &SolverConfig::default()).unwrap();
        let many = eptas(&inst, eps, &SolverConfig { threads: 3, ..Default::default() }).unwrap();
        prop_assert_eq!(one.solution, many.solution);
        prop_assert_eq!(one.trace, many.trace);
    }

    #[test]
    fn rep_set_lies_in_the_classes(inst in any_instance(), eps in epsilon()) {
        let inst = preprocess_discard(&inst).instance;
        let rep = rep_set(&inst, eps, &RepSetConfig::default()).unwrap();
        for (r, x) in &rep.per_class {
            for id in &x.elements {
                prop_assert_eq!(rep.layout.class_of_profit(inst.profit(*id).unwrap()), Some(*r));
            }
        }
    }

    #[test]
    fn alpha_brackets_opt(inst in any_instance()) {
        let opt = brute_force_opt(&inst).unwrap().total_profit;
        let exact = approx_opt(&inst, AlphaMode::Exact, &LagrangeConfig::default()).unwrap();
        prop_assert_eq!(exact.alpha, opt);
        let lag = approx_opt(&preprocess_discard(&inst).instance, AlphaMode::Lagrangian, &LagrangeConfig::default()).unwrap();
        prop_assert!(lag.alpha <= opt && 4 * lag.alpha >= opt);
    }

    #[test]
    fn np_solver_loses_at_most_two_elements(inst in any_instance()) {
        let inst = preprocess_discard(&inst).instance;
        let forced = LagrangeConfig { fallback_threshold: None, ..Default::default() };
        let s = non_profitable_solver(&inst, &forced).unwrap();
        prop_assert!(verify_np_solver(&inst, &s).unwrap().passed);
    }

    #[test]
    fn greedy_basis_is_a_basis(n in 0u32..9, rank in 0usize..6, costs in prop::collection::vec(0u64..5, 9)) {
        let ground: IdSet = (0..n).map(ElementId).collect();
        let m = UniformMatroid::new(ground, rank);
        prop_assert!(check_matroid_axioms(&m).unwrap().passed);
        let basis = min_cost_basis(&m, |id| costs[id.0 as usize]);
        prop_assert_eq!(basis.len(), rank.min(n as usize));
        let mut sorted: Vec<u64> = (0..n as usize).map(|i| costs[i]).collect();
        sorted.sort_unstable();
        let cheapest: u64 = sorted.iter().take(basis.len()).sum();
        prop_assert_eq!(basis.iter().map(|id| costs[id.0 as usize]).sum::<u64>(), cheapest);
    }

    #[test]
    fn epsilon_round_trips(num in 1u64..50, extra in 0u64..50) {
        let eps = Epsilon::new(num, 2 * num + extra).unwrap();
        prop_assert_eq!(eps.to_string().parse::<Epsilon>().unwrap(), eps);
    }

    #[test]
    fn every_profit_has_at_most_one_class(alpha in 1u64..300, den in 3u64..30, p in 0u64..700) {
        let layout = ClassLayout::with_gamma(Epsilon::new(1, den).unwrap(), alpha, 2).unwrap();
        let hits = layout.index_range().filter(|&r| {
            let (lo, hi) = layout.bounds(r).unwrap();
            let ratio = num_rational::BigRational::new(p.into(), (2 * alpha).into());
            lo < ratio && ratio <= hi
        }).count();
        prop_assert!(hits <= 1);
        prop_assert_eq!(hits == 1, layout.class_of_profit(p).is_some());
    }
}
