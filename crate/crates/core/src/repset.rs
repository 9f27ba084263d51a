//! Representative sets: the union of one exchange set per profit class.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::classes::ClassLayout;
use crate::constraint::Constraint;
use crate::error::{Error, Result};
use crate::exchange::{exset_matching, exset_matroid_intersection, ExchangeConfig, ExchangeSet};
use crate::instance::{BcInstance, Epsilon, IdSet};
use crate::lagrange::{approx_opt, AlphaEstimate, AlphaMode, LagrangeConfig};

#[derive(Clone, Debug, Default)]
pub struct RepSetConfig {
    pub alpha_mode: AlphaMode,
    pub lagrange: LagrangeConfig,
    pub exchange: ExchangeConfig,
    /// Worker threads for the per-class constructions; 0 and 1 run inline.
    pub threads: usize,
}

#[derive(Clone, Debug)]
pub struct RepresentativeSet {
    pub elements: IdSet,
    pub alpha: AlphaEstimate,
    pub layout: ClassLayout,
    pub per_class: BTreeMap<i64, ExchangeSet>,
}

pub fn rep_set(instance: &BcInstance, epsilon: Epsilon, config: &RepSetConfig) -> Result<RepresentativeSet> {
    epsilon.require_below_half()?;
    let alpha = approx_opt(instance, config.alpha_mode, &config.lagrange)?;
    rep_set_with_alpha(instance, epsilon, alpha, config)
}

/// Representative set for a precomputed estimate.
pub fn rep_set_with_alpha(
    instance: &BcInstance,
    epsilon: Epsilon,
    alpha: AlphaEstimate,
    config: &RepSetConfig,
) -> Result<RepresentativeSet> {
    epsilon.require_below_half()?;
    let layout = ClassLayout::with_gamma(epsilon, alpha.alpha, alpha.gamma)?;
    let indices: Vec<i64> = layout.index_range().collect();
    let build = |r: i64| match instance.constraint() {
        Constraint::Matching(_) => exset_matching(instance, &layout, r),
        Constraint::MatroidIntersection(_) => exset_matroid_intersection(instance, &layout, r, &config.exchange),
    };
    let built: Vec<ExchangeSet> = if config.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
        pool.install(|| indices.par_iter().map(|&r| build(r)).collect::<Result<_>>())?
    } else {
        indices.iter().map(|&r| build(r)).collect::<Result<_>>()?
    };

    let mut elements = IdSet::new();
    let mut per_class = BTreeMap::new();
    for x in built {
        elements.extend(x.elements.iter().copied());
        per_class.insert(x.class_index, x);
    }
    let rep = RepresentativeSet { elements, alpha, layout, per_class };
    if matches!(instance.constraint(), Constraint::Matching(_)) {
        check_matching_bounds(&rep)?;
    }
    Ok(rep)
}

/// Size guarantees of the matching construction: every round has at most
/// `3q` edges, every exchange set at most `18q²` and, at `γ = 2`, the union
/// at most `54q³`. For a wider range the union bound is `18q²` per class.
pub fn check_matching_bounds(rep: &RepresentativeSet) -> Result<()> {
    let q = rep.layout.q();
    let per_round = q * 3u32;
    let per_class = q * q * 18u32;
    for x in rep.per_class.values() {
        if let Some(m) = x.stats.round_sizes.iter().find(|&&m| BigUint::from(m) > per_round) {
            return Err(Error::Postcondition(format!("round of {m} edges exceeds 3q")));
        }
        if BigUint::from(x.elements.len()) > per_class {
            return Err(Error::Postcondition(format!("class {} has {} elements, above 18q²", x.class_index, x.elements.len())));
        }
    }
    let total = if rep.alpha.gamma == 2 { q * q * q * 54u32 } else { per_class * rep.layout.class_count() };
    if BigUint::from(rep.elements.len()) > total {
        return Err(Error::Postcondition(format!("representative set of {} elements exceeds its bound", rep.elements.len())));
    }
    Ok(())
}
