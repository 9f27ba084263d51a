//! The `solve`, `verify` and `bench` commands as library functions.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use repset_core::lagrange::lagrangian_heuristic;
use repset_core::oracle::{
    brute_force_opt, check_downward_closed, check_matroid_axioms, profitable_set, verify_exchange_set,
    verify_np_solver, verify_replacement, verify_representative, verify_substitutions, verify_weak_exchange,
    VerificationReport,
};
use repset_core::{
    approx_opt, eptas, exset_matching, exset_matroid_intersection, non_profitable_solver, preprocess_discard,
    rep_set, solve, weak_exchange_extend, AlphaMode, BcInstance, ClassLayout, Constraint, ElementId, Epsilon,
    ExchangeConfig, IdSet, LagrangeConfig, RepSetConfig, SolverConfig,
};
use serde::Serialize;

use crate::format::InstanceFile;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SolveMode {
    /// The scheme at `ε/8`, guaranteeing `(1 − ε)·OPT`.
    Solve,
    /// The scheme at `ε` itself.
    Eptas,
    /// Exhaustive optimum.
    Brute,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum AlphaArg {
    Exact,
    Lagrangian,
}

impl From<AlphaArg> for AlphaMode {
    fn from(a: AlphaArg) -> Self {
        match a {
            AlphaArg::Exact => AlphaMode::Exact,
            AlphaArg::Lagrangian => AlphaMode::Lagrangian,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Property {
    Exchange,
    Representative,
    Replacement,
    Substitution,
    Axioms,
    WeakExchange,
    Npsolver,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub epsilon: Epsilon,
    pub alpha: AlphaMode,
    pub enumeration_cap: u64,
    pub branch_budget: usize,
    pub fallback: Option<usize>,
    pub threads: usize,
    pub swap_roles: bool,
}

impl RunOptions {
    pub fn new(epsilon: Epsilon) -> Self {
        let solver = SolverConfig::default();
        Self {
            epsilon,
            alpha: AlphaMode::default(),
            enumeration_cap: solver.enumeration_cap,
            branch_budget: ExchangeConfig::default().branch_budget,
            fallback: LagrangeConfig::default().fallback_threshold,
            threads: 1,
            swap_roles: false,
        }
    }

    pub fn lagrange(&self) -> LagrangeConfig {
        LagrangeConfig { fallback_threshold: self.fallback, ..Default::default() }
    }

    pub fn repset(&self) -> RepSetConfig {
        RepSetConfig {
            alpha_mode: self.alpha,
            lagrange: self.lagrange(),
            exchange: ExchangeConfig { swap_roles: self.swap_roles, branch_budget: self.branch_budget },
            threads: self.threads,
        }
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig { repset: self.repset(), enumeration_cap: self.enumeration_cap, threads: self.threads }
    }
}

pub fn load(path: &Path) -> Result<(InstanceFile, BcInstance), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let file = InstanceFile::parse(&text)?;
    let instance = file.to_instance()?;
    Ok((file, instance))
}

fn ids(set: &IdSet) -> Vec<u32> {
    set.iter().map(|e| e.0).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveRecord {
    pub mode: String,
    pub epsilon: String,
    /// Parameter the scheme actually ran with.
    pub internal_epsilon: Option<String>,
    pub solution: Vec<u32>,
    pub profit: u64,
    pub cost: u64,
    pub alpha: Option<u64>,
    pub gamma: Option<u64>,
    pub rep_size: Option<usize>,
    pub enumerated: Option<u64>,
    pub ms_total: Option<u64>,
}

pub fn run_solve(instance: &BcInstance, mode: SolveMode, options: &RunOptions) -> Result<SolveRecord, CliError> {
    let start = Instant::now();
    let mut record = match mode {
        SolveMode::Brute => {
            let s = brute_force_opt(instance)?;
            SolveRecord {
                mode: "brute".into(),
                epsilon: options.epsilon.to_string(),
                internal_epsilon: None,
                solution: ids(&s.element_ids),
                profit: s.total_profit,
                cost: s.total_cost,
                alpha: None,
                gamma: None,
                rep_size: None,
                enumerated: None,
                ms_total: None,
            }
        }
        SolveMode::Solve | SolveMode::Eptas => {
            let out = if mode == SolveMode::Solve {
                solve(instance, options.epsilon, &options.solver())?
            } else {
                eptas(instance, options.epsilon, &options.solver())?
            };
            SolveRecord {
                mode: if mode == SolveMode::Solve { "solve" } else { "eptas" }.into(),
                epsilon: options.epsilon.to_string(),
                internal_epsilon: Some(out.epsilon),
                solution: ids(&out.solution.element_ids),
                profit: out.solution.total_profit,
                cost: out.solution.total_cost,
                alpha: Some(out.alpha.alpha),
                gamma: Some(out.alpha.gamma),
                rep_size: Some(out.rep_size),
                enumerated: Some(out.enumerated),
                ms_total: None,
            }
        }
    };
    record.ms_total = Some(start.elapsed().as_millis() as u64);
    Ok(record)
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyRecord {
    pub property: String,
    pub passed: bool,
    pub reports: Vec<VerificationReport>,
}

/// Exchange sets for every class of the layout built from `α`, checked
/// exhaustively. `inject` replaces the constructed sets.
fn verify_exchange(instance: &BcInstance, options: &RunOptions, inject: Option<&IdSet>) -> Result<Vec<VerificationReport>, CliError> {
    let alpha = approx_opt(instance, options.alpha, &options.lagrange())?;
    let layout = ClassLayout::with_gamma(options.epsilon, alpha.alpha, alpha.gamma)?;
    let exchange = ExchangeConfig { swap_roles: options.swap_roles, branch_budget: options.branch_budget };
    let mut reports = Vec::new();
    for r in layout.index_range() {
        let x = match (inject, instance.constraint()) {
            (Some(x), _) => x.clone(),
            (None, Constraint::Matching(_)) => exset_matching(instance, &layout, r)?.elements,
            (None, Constraint::MatroidIntersection(_)) => exset_matroid_intersection(instance, &layout, r, &exchange)?.elements,
        };
        reports.push(verify_exchange_set(instance, &layout, r, &x)?);
    }
    Ok(reports)
}

/// All feasible subsets of the instance, by bitmask.
fn feasible_sets(instance: &BcInstance, guard: usize) -> Result<Vec<IdSet>, CliError> {
    if instance.len() > guard {
        return Err(repset_core::Error::GuardExceeded { size: instance.len(), guard }.into());
    }
    let all: Vec<ElementId> = instance.ids().into_iter().collect();
    let mut out = Vec::new();
    for mask in 0..1u64 << all.len() {
        let set: IdSet = (0..all.len()).filter(|i| mask >> i & 1 == 1).map(|i| all[i]).collect();
        if instance.constraint().is_feasible(&set)? {
            out.push(set);
        }
    }
    Ok(out)
}

fn verify_weak_exchange_all(instance: &BcInstance) -> Result<VerificationReport, CliError> {
    let sets = feasible_sets(instance, 12)?;
    let mut cases = 0u64;
    for a in &sets {
        for b in &sets {
            cases += 1;
            let d = weak_exchange_extend(instance.constraint(), a, b)?;
            let mut report = verify_weak_exchange(instance.constraint(), a, b, &d)?;
            if !report.passed {
                report.cases_checked = cases;
                return Ok(report);
            }
        }
    }
    Ok(VerificationReport { property: "weak-exchange".into(), passed: true, cases_checked: cases, counterexample: None })
}

pub fn run_verify(
    instance: &BcInstance,
    property: Property,
    options: &RunOptions,
    inject: Option<&IdSet>,
) -> Result<VerifyRecord, CliError> {
    let eps = &options.epsilon;
    let reports = match property {
        Property::Exchange => verify_exchange(instance, options, inject)?,
        Property::Representative => {
            let r = match inject {
                Some(r) => r.clone(),
                None => rep_set(instance, *eps, &options.repset())?.elements,
            };
            vec![verify_representative(instance, eps, &r, None)?]
        }
        Property::Substitution => {
            let rep = rep_set(instance, *eps, &options.repset())?;
            let r = inject.cloned().unwrap_or_else(|| rep.elements.clone());
            vec![verify_substitutions(instance, eps, &rep.layout, &r)?]
        }
        Property::Replacement => {
            let s = brute_force_opt(instance)?.element_ids;
            let z = match inject {
                Some(z) => z.clone(),
                None => s.intersection(&profitable_set(instance, eps)?).copied().collect(),
            };
            vec![verify_replacement(instance, eps, &s, &z)?]
        }
        Property::Axioms => match instance.constraint() {
            Constraint::Matching(_) => vec![check_downward_closed(instance.constraint())?],
            Constraint::MatroidIntersection(pair) => {
                vec![check_matroid_axioms(pair.first().as_ref())?, check_matroid_axioms(pair.second().as_ref())?]
            }
        },
        Property::WeakExchange => vec![verify_weak_exchange_all(instance)?],
        Property::Npsolver => {
            let pre = preprocess_discard(instance).instance;
            let solution = if options.fallback.is_some() {
                non_profitable_solver(&pre, &options.lagrange())?
            } else {
                lagrangian_heuristic(&pre, &options.lagrange())?
            };
            vec![verify_np_solver(&pre, &solution)?]
        }
    };
    let name = format!("{property:?}").to_lowercase();
    Ok(VerifyRecord { property: name, passed: reports.iter().all(|r| r.passed), reports })
}

pub const BENCH_HEADER: [&str; 10] =
    ["instance", "epsilon", "opt", "profit", "ratio", "rep_size", "enumerated", "alpha", "gamma", "ms_total"];

/// Instance files (`*.json`) of a corpus directory in name order.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

/// One CSV row per (instance, ε): exact optimum against `solve`.
pub fn run_bench<W: Write>(dir: &Path, epsilons: &[Epsilon], template: &RunOptions, out: W) -> Result<usize, CliError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(BENCH_HEADER)?;
    let mut rows = 0;
    for path in corpus_files(dir)? {
        let (_, instance) = load(&path)?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let opt = brute_force_opt(&instance)?.total_profit;
        for &epsilon in epsilons {
            let options = RunOptions { epsilon, ..template.clone() };
            let record = run_solve(&instance, SolveMode::Solve, &options)?;
            let ratio = if opt == 0 { 1.0 } else { record.profit as f64 / opt as f64 };
            writer.write_record([
                name.clone(),
                epsilon.to_string(),
                opt.to_string(),
                record.profit.to_string(),
                format!("{ratio:.6}"),
                record.rep_size.unwrap_or(0).to_string(),
                record.enumerated.unwrap_or(0).to_string(),
                record.alpha.unwrap_or(0).to_string(),
                record.gamma.unwrap_or(0).to_string(),
                record.ms_total.unwrap_or(0).to_string(),
            ])?;
            rows += 1;
        }
    }
    writer.flush()?;
    Ok(rows)
}
