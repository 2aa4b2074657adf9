pub mod lingam;
pub mod missing;
pub mod randomize;
pub mod sample;
pub mod validate;

use rayon::prelude::*;

use crate::error::CliError;

/// Runs `f` for every iteration, possibly in parallel, and returns the results
/// in iteration order; the first failing iteration's error wins.
pub(crate) fn fan_out<T: Send>(
    iterations: u64,
    f: impl Fn(u64) -> Result<T, CliError> + Sync,
) -> Result<Vec<T>, CliError> {
    let results: Vec<Result<T, CliError>> = (0..iterations).into_par_iter().map(&f).collect();
    results.into_iter().collect()
}

pub(crate) fn iteration_name(prefix: &str, i: u64, ext: &str) -> String {
    format!("{prefix}_{i:04}.{ext}")
}
