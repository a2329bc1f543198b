//! Batch verification: declarative suites of experiments and machine-readable reports.
//!
//! ```
//! use stiefel::verify::{run_suite, RunOptions, Suite};
//! let suite = Suite::from_toml_str("[[experiment]]\nname = \"g\"\ntag = \"siegel-gamma\"\nsamples = 5\n").unwrap();
//! let report = run_suite(&suite, &RunOptions::default()).unwrap();
//! assert!(report.pass);
//! ```

mod config;
mod experiments;
mod report;

use rayon::prelude::*;
use std::time::Instant;

pub use config::{ExperimentSpec, Suite, Tag, Tolerance, DEFAULT_SEED, DEFAULT_SUITE, SEED_ENV};
pub use report::{Check, Expected, Observed, Record, Report, Status, SCHEMA};

use crate::error::{Error, Result};
use crate::rng::derive_seed;

/// Overrides applied on top of the suite file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Replaces the suite seed.
    pub seed: Option<u64>,
}

/// `STIEFEL_SEED` parsed as an integer, if set.
pub fn seed_from_env() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| Error::Config(format!("{SEED_ENV}='{s}' is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

/// Seed of an experiment: its own, or one derived from the suite seed and its name.
pub fn experiment_seed(spec: &ExperimentSpec, suite_seed: u64) -> u64 {
    spec.seed.unwrap_or_else(|| derive_seed(suite_seed, &spec.name))
}

/// Run one experiment. Estimator failures end up in the record, not in `Err`.
pub fn run_experiment(spec: &ExperimentSpec, suite_seed: u64, default_tol: Tolerance) -> Record {
    let seed = experiment_seed(spec, suite_seed);
    let start = Instant::now();
    let outcome = spec.validate().and_then(|_| {
        let mut ctx = experiments::Ctx::new(spec, seed, default_tol);
        experiments::run(&mut ctx)?;
        Ok(ctx.finish())
    });
    Record::from_outcome(&spec.name, spec.tag, seed, outcome, start.elapsed().as_secs_f64())
}

/// Run every experiment of the suite concurrently; records keep the suite order.
pub fn run_suite(suite: &Suite, opts: &RunOptions) -> Result<Report> {
    suite.validate()?;
    let seed = opts.seed.unwrap_or(suite.seed);
    let go = || -> Vec<Record> {
        suite.experiments.par_iter().map(|e| run_experiment(e, seed, suite.tolerance)).collect()
    };
    let records = match opts.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(go),
        None => go(),
    };
    Ok(Report::new(seed, records))
}

/// `tag: required fields  description`, one line per tag.
pub fn list_tags() -> String {
    Tag::ALL
        .iter()
        .map(|t| format!("{:<26} [{}]  {}", t.as_str(), t.required().join(", "), t.describe()))
        .collect::<Vec<_>>()
        .join("\n")
}
