//! Seeded instance generation.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::format::{ConstraintSpec, ElementRecord, InstanceFile, MatroidSpec, SCHEMA_VERSION};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Matching,
    MatroidIntersection,
}

#[derive(Clone, Debug)]
pub struct GenOptions {
    pub seed: u64,
    pub size: u32,
    pub kind: Kind,
    pub cost: (u64, u64),
    pub profit: (u64, u64),
    /// Budget as a percentage of the total cost, drawn from this range.
    pub budget_percent: (u64, u64),
}

impl GenOptions {
    pub fn new(seed: u64, size: u32, kind: Kind) -> Self {
        Self { seed, size, kind, cost: (1, 100), profit: (1, 100), budget_percent: (25, 75) }
    }
}

fn random_edges(rng: &mut ChaCha8Rng, size: u32, vertices: u32) -> BTreeMap<u32, [u32; 2]> {
    (0..size)
        .map(|id| {
            let u = rng.gen_range(0..vertices);
            let mut v = rng.gen_range(0..vertices - 1);
            if v >= u {
                v += 1;
            }
            (id, [u.min(v), u.max(v)])
        })
        .collect()
}

fn random_matroid(rng: &mut ChaCha8Rng, size: u32, family: u8) -> MatroidSpec {
    match family {
        0 => MatroidSpec::Uniform { rank: rng.gen_range(1..=(size as usize / 2 + 1)) },
        1 => {
            let count = rng.gen_range(1..=size.min(4) as usize);
            let mut blocks = vec![Vec::new(); count];
            for id in 0..size {
                blocks[rng.gen_range(0..count)].push(id);
            }
            let capacities = blocks.iter().map(|b| if b.is_empty() { 0 } else { rng.gen_range(1..=b.len()) }).collect();
            MatroidSpec::Partition { blocks, capacities }
        }
        _ => {
            let vertices = rng.gen_range(3..=6);
            MatroidSpec::Graphic { vertices, edges: random_edges(rng, size, vertices) }
        }
    }
}

/// Pairs of families used for intersection instances: uniform 0,
/// partition 1, graphic 2.
const PAIRS: [(u8, u8); 5] = [(1, 2), (1, 1), (2, 0), (1, 0), (2, 2)];

pub fn generate(options: &GenOptions) -> Result<InstanceFile, CliError> {
    for (name, (lo, hi)) in [("cost", options.cost), ("profit", options.profit), ("budget percent", options.budget_percent)] {
        if lo > hi {
            return Err(CliError::Usage(format!("empty {name} range {lo}..={hi}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let size = options.size;
    let elements: Vec<ElementRecord> = (0..size)
        .map(|id| ElementRecord {
            id,
            cost: rng.gen_range(options.cost.0..=options.cost.1),
            profit: rng.gen_range(options.profit.0..=options.profit.1),
        })
        .collect();
    let constraint = match options.kind {
        Kind::Matching if size == 0 => ConstraintSpec::Matching { vertices: 0, edges: BTreeMap::new() },
        Kind::Matching => {
            let vertices = rng.gen_range(3..=size / 2 + 3);
            ConstraintSpec::Matching { vertices, edges: random_edges(&mut rng, size, vertices) }
        }
        Kind::MatroidIntersection => {
            let (a, b) = *PAIRS.choose(&mut rng).expect("nonempty");
            let mut pair = [random_matroid(&mut rng, size, a), random_matroid(&mut rng, size, b)];
            if rng.gen_bool(0.5) {
                pair.swap(0, 1);
            }
            ConstraintSpec::MatroidIntersection { matroids: pair }
        }
    };
    let total: u64 = elements.iter().map(|e| e.cost).sum();
    let percent = rng.gen_range(options.budget_percent.0..=options.budget_percent.1);
    let budget = total * percent / 100;
    Ok(InstanceFile { version: SCHEMA_VERSION, elements, constraint, budget })
}

/// The fixed evaluation corpus: `per_kind` matching and `per_kind`
/// intersection instances with 6 to 14 elements, named `m000`, `x000`, ...
pub fn corpus(seed: u64, per_kind: usize) -> Vec<(String, InstanceFile)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(2 * per_kind);
    for (prefix, kind) in [("m", Kind::Matching), ("x", Kind::MatroidIntersection)] {
        for i in 0..per_kind {
            let options = GenOptions::new(rng.gen(), rng.gen_range(6..=14), kind);
            let file = generate(&options).expect("default ranges are valid");
            out.push((format!("{prefix}{i:03}"), file));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_zero_is_empty() {
        let file = generate(&GenOptions::new(1, 0, Kind::Matching)).unwrap();
        assert!(file.elements.is_empty());
        assert!(file.to_instance().unwrap().is_empty());
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = generate(&GenOptions::new(42, 10, Kind::MatroidIntersection)).unwrap().to_json();
        let b = generate(&GenOptions::new(42, 10, Kind::MatroidIntersection)).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn generated_files_validate() {
        let file = generate(&GenOptions::new(7, 12, Kind::Matching)).unwrap();
        let parsed = InstanceFile::parse(&file.to_json()).unwrap();
        assert_eq!(parsed, file);
        assert_eq!(parsed.to_instance().unwrap().len(), 12);
        for seed in 0..50 {
            generate(&GenOptions::new(seed, 9, Kind::MatroidIntersection)).unwrap().to_instance().unwrap();
        }
    }

    #[test]
    fn corpus_respects_ranges() {
        for (_, file) in corpus(2024, 20) {
            assert!((6..=14).contains(&file.elements.len()));
            let total: u64 = file.elements.iter().map(|e| e.cost).sum();
            assert!(4 * file.budget <= 3 * total && 4 * file.budget + 4 >= total);
            assert!(file.elements.iter().all(|e| (1..=100).contains(&e.cost) && (1..=100).contains(&e.profit)));
        }
    }

    #[test]
    fn bad_range_is_a_usage_error() {
        let mut options = GenOptions::new(1, 3, Kind::Matching);
        options.cost = (5, 1);
        assert_eq!(generate(&options).unwrap_err().exit_code(), 2);
    }
}
