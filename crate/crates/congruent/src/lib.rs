//! Certification harness, report formats and mesh export for the congruent-section
//! bodies of `congruent-core`.

// NaN must fail tolerance checks, hence `!(x <= tol)`
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod harness;
pub mod lemmas;
pub mod mesh;
pub mod output;

pub use config::{parse_config, parse_config_str, ConfigError, Param, RunConfig, Suite};
pub use harness::{
    resolve, run, run_resolved, sample_sphere, HarnessError, Resolved, RunReport, SuiteReport,
};
