//! The approximation scheme: guess the profitable part `F` of a solution
//! inside the representative set, complete it on the residual instance of
//! non-profitable elements, keep the best completion.

use rayon::prelude::*;
use serde::Serialize;

use crate::classes::small_profit_pool;
use crate::enumerate::{for_each_feasible, profit_items, Flow};
use crate::error::{Error, Result};
use crate::instance::{canonical_cmp, is_solution, preprocess_discard, BcInstance, Epsilon, IdSet, Solution};
use crate::lagrange::{approx_opt, non_profitable_solver, AlphaEstimate, LagrangeConfig};
use crate::repset::{rep_set_with_alpha, RepSetConfig};

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub repset: RepSetConfig,
    /// Maximum number of skeletons `F` to enumerate.
    pub enumeration_cap: u64,
    /// Worker threads; 0 and 1 run inline. Results do not depend on it.
    pub threads: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { repset: RepSetConfig::default(), enumeration_cap: 10_000_000, threads: 1 }
    }
}

/// `I_F(α)`: elements `E(α) ∖ F` that survive the residual constraint
/// `C / F`, with budget `β − c(F)`.
#[derive(Clone, Debug)]
pub struct ResidualInstance {
    pub fixed: IdSet,
    pub instance: BcInstance,
}

pub fn residual_instance(parent: &BcInstance, epsilon: &Epsilon, alpha: u64, fixed: &IdSet) -> Result<ResidualInstance> {
    if !is_solution(parent, fixed)? {
        return Err(Error::NotASolution(format!("{:?}", fixed.iter().map(|e| e.0).collect::<Vec<_>>())));
    }
    let budget = parent.budget() - parent.cost_of(fixed)?;
    let constraint = parent.constraint().residual(fixed)?;
    let ground = constraint.ground();
    let keep: IdSet = small_profit_pool(parent, alpha, epsilon)
        .into_iter()
        .filter(|id| !fixed.contains(id) && ground.contains(id))
        .collect();
    let elements = parent.elements().iter().filter(|e| keep.contains(&e.id)).copied().collect();
    let instance = BcInstance::new(elements, constraint.restrict(&keep), budget)?;
    Ok(ResidualInstance { fixed: fixed.clone(), instance })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    /// Position of the skeleton in canonical order.
    pub index: u64,
    pub profit: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EptasOutcome {
    pub solution: Solution,
    /// The parameter the scheme ran with.
    pub epsilon: String,
    pub alpha: AlphaEstimate,
    pub rep_size: usize,
    pub enumerated: u64,
    /// Every strict improvement of the incumbent.
    pub trace: Vec<TraceEntry>,
}

fn extend(parent: &BcInstance, epsilon: &Epsilon, alpha: u64, fixed: &IdSet, lagrange: &LagrangeConfig) -> Result<(IdSet, u64)> {
    let residual = residual_instance(parent, epsilon, alpha, fixed)?;
    let tail = non_profitable_solver(&residual.instance, lagrange)?;
    let mut set = fixed.clone();
    set.extend(tail.element_ids);
    let profit = parent.profit_of(&set)?;
    Ok((set, profit))
}

/// Runs the scheme with parameter `ε` directly.
pub fn eptas(instance: &BcInstance, epsilon: Epsilon, config: &SolverConfig) -> Result<EptasOutcome> {
    epsilon.require_below_half()?;
    let repset_config = RepSetConfig { threads: config.threads, ..config.repset.clone() };
    let alpha = approx_opt(instance, repset_config.alpha_mode, &repset_config.lagrange)?;
    let rep = rep_set_with_alpha(instance, epsilon, alpha, &repset_config)?;

    let max_size = usize::try_from(epsilon.inverse_floor()).unwrap_or(usize::MAX);
    let items = profit_items(instance, &rep.elements);
    let mut skeletons: Vec<IdSet> = Vec::new();
    let mut overflow = false;
    for_each_feasible(instance.constraint(), &items, Some(instance.budget()), max_size, &mut |set, _, _| {
        if skeletons.len() as u64 >= config.enumeration_cap {
            overflow = true;
            return Flow::Stop;
        }
        skeletons.push(set.iter().copied().collect());
        Flow::Continue
    });
    if overflow {
        return Err(Error::EnumerationCapExceeded { cap: config.enumeration_cap });
    }
    skeletons.sort_by(canonical_cmp);

    let lagrange = &repset_config.lagrange;
    let run = |f: &IdSet| extend(instance, &epsilon, alpha.alpha, f, lagrange);
    let completed: Vec<(IdSet, u64)> = if config.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
        pool.install(|| skeletons.par_iter().map(run).collect::<Result<_>>())?
    } else {
        skeletons.iter().map(run).collect::<Result<_>>()?
    };

    let mut best = IdSet::new();
    let mut best_profit = 0u64;
    let mut trace = Vec::new();
    for (index, (set, profit)) in completed.into_iter().enumerate() {
        if profit > best_profit {
            best = set;
            best_profit = profit;
            trace.push(TraceEntry { index: index as u64, profit });
        }
    }
    let solution = Solution::new(instance, best).map_err(|e| Error::Postcondition(e.to_string()))?;
    Ok(EptasOutcome {
        solution,
        epsilon: epsilon.to_string(),
        alpha,
        rep_size: rep.elements.len(),
        enumerated: skeletons.len() as u64,
        trace,
    })
}

/// `(1 − ε)`-approximate solution: preprocesses, then runs the scheme with
/// parameter `ε/8`.
pub fn solve(instance: &BcInstance, epsilon: Epsilon, config: &SolverConfig) -> Result<EptasOutcome> {
    epsilon.require_below_half()?;
    let pre = preprocess_discard(instance);
    eptas(&pre.instance, epsilon.divided_by(8)?, config)
}
