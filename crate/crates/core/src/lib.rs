//! Quantitative flexibility metrics for computing systems.
//!
//! `flexmeter` turns benchmark measurement campaigns into per-system
//! flexibility scores. Performance is first normalized by the *intrinsic
//! workload* of each application (the architecture-neutral count of
//! arithmetic, logic and compare operations it needs), then each system's row
//! of normalized performance is reduced to a unitless score in `[0, 1]`.
//!
//! The modules follow the pipeline:
//!
//! * [`workload`] and [`kernels`]: operation profiles, classification and
//!   intrinsic workload extraction, with instrumented reference kernels.
//! * [`model`]: campaign types and validation.
//! * [`campaign_io`]: the CSV and text file formats.
//! * [`metrics`]: normalized performance, flexibility estimators,
//!   versatility, efficiency and ranking.
//! * [`synth`]: seeded synthetic campaigns from architecture-class profiles.
//! * [`report`] and [`commands`]: tables, scatter plots and the CLI.
//!
//! ```
//! use flexmeter::{example, metrics};
//!
//! let campaign = example::campaign();
//! let scores = metrics::score_campaign(&campaign, Default::default()).unwrap();
//! assert_eq!(scores.len(), 25);
//! assert!(scores.iter().all(|s| (0.0..=1.0).contains(&s.flexibility)));
//! ```

pub mod campaign_io;
pub mod commands;
pub mod example;
pub mod kernels;
pub mod metrics;
pub mod model;
pub mod report;
pub mod synth;
pub mod workload;

// The guide's code listings run as doctests, one module per chapter.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/workload.md")]
    pub mod workload {}
    #[doc = include_str!("../../../book/src/flexibility.md")]
    pub mod flexibility {}
    #[doc = include_str!("../../../book/src/campaigns.md")]
    pub mod campaigns {}
    #[doc = include_str!("../../../book/src/synthetic.md")]
    pub mod synthetic {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
