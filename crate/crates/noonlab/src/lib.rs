//! Circuit language, command-line front end and audits on top of
//! [`noonlab_core`].

pub mod audit;
pub mod checks;
pub mod dsl;
pub mod exec;
pub mod output;
pub mod presets;
pub mod sweep;

pub use noonlab_core as core;

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "NOONLAB_THREADS";

/// Sizes the global worker pool from `NOONLAB_THREADS` when it holds a
/// positive integer. Later calls are no-ops.
pub fn init_threads() {
    let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    else {
        return;
    };
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
}
