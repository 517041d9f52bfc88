//! Implementations of the `flexmeter` subcommands.
//!
//! Each command returns its output (or the files it wrote) instead of
//! printing, so the binary stays a thin wrapper and the commands can be
//! tested in-process.

use std::fs;
use std::path::{Path, PathBuf};

use crate::campaign_io::{read_campaign, write_campaign, IoError};
use crate::metrics::{score_campaign_with, FlexibilityEstimator, GapPolicy, MetricsError, RankKey};
use crate::model::Campaign;
use crate::report::{
    omitted_txt, ranking_csv, scatter, scatter_csv, scatter_svg, scores_csv, Axis, AxisScale,
};
use crate::synth::{default_presets, distribute, parse_profiles, synth_campaign};
use crate::workload::{classify, default_table, intrinsic_workload, parse_profile, parse_table, workload_line};

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl CommandError {
    /// 1 usage, 2 validation, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Usage(_) => 1,
            CommandError::Validation(_) => 2,
            CommandError::Io(_) => 3,
        }
    }
}

impl From<IoError> for CommandError {
    fn from(e: IoError) -> Self {
        if e.is_io() {
            CommandError::Io(e.to_string())
        } else {
            CommandError::Validation(e.to_string())
        }
    }
}

impl From<MetricsError> for CommandError {
    fn from(e: MetricsError) -> Self {
        CommandError::Validation(e.to_string())
    }
}

fn read_text(path: &Path) -> Result<String, CommandError> {
    fs::read_to_string(path).map_err(|e| CommandError::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), CommandError> {
    fs::write(path, text).map_err(|e| CommandError::Io(format!("{}: {e}", path.display())))
}

/// Extracts the intrinsic workload of one profile as a `workloads.txt` line.
/// The application id defaults to the profile's file stem.
pub fn cmd_extract(
    profile_path: &Path,
    table_path: Option<&Path>,
    app_id: Option<&str>,
) -> Result<String, CommandError> {
    let at = |e: &dyn std::fmt::Display, p: &Path| {
        CommandError::Validation(format!("{}: {e}", p.display()))
    };
    let profile = parse_profile(&read_text(profile_path)?).map_err(|e| at(&e, profile_path))?;
    let table = match table_path {
        Some(p) => parse_table(&read_text(p)?).map_err(|e| at(&e, p))?,
        None => default_table(),
    };
    let extraction =
        intrinsic_workload(&classify(&profile, &table)).map_err(|e| at(&e, profile_path))?;
    let id = match app_id {
        Some(id) => id.to_string(),
        None => profile_path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("app")
            .to_string(),
    };
    Ok(workload_line(&id, &extraction.workload))
}

fn load(paths: &[PathBuf]) -> Result<Campaign, CommandError> {
    if paths.is_empty() {
        return Err(CommandError::Usage("no campaign files given".into()));
    }
    Ok(read_campaign(paths)?)
}

/// Score table for a campaign, ranked by flexibility.
pub fn cmd_score(
    paths: &[PathBuf],
    estimator: FlexibilityEstimator,
    policy: GapPolicy,
) -> Result<String, CommandError> {
    let c = load(paths)?;
    Ok(scores_csv(&score_campaign_with(&c, estimator, policy)?))
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub estimator: FlexibilityEstimator,
    pub policy: GapPolicy,
    pub axes: Vec<Axis>,
    pub scale: AxisScale,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            estimator: FlexibilityEstimator::default(),
            policy: GapPolicy::default(),
            axes: Axis::ALL.to_vec(),
            scale: AxisScale::default(),
        }
    }
}

/// Writes scores, rankings and scatter plots into `out_dir`; returns the
/// files written, in write order.
pub fn cmd_report(
    paths: &[PathBuf],
    opts: &ReportOptions,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, CommandError> {
    let c = load(paths)?;
    if c.systems.is_empty() {
        return Err(CommandError::Usage("no systems".into()));
    }
    if opts.axes.is_empty() {
        return Err(CommandError::Usage("no axes selected".into()));
    }
    let scores = score_campaign_with(&c, opts.estimator, opts.policy)?;
    fs::create_dir_all(out_dir)
        .map_err(|e| CommandError::Io(format!("{}: {e}", out_dir.display())))?;

    let mut written = Vec::new();
    let mut emit = |name: String, text: String| -> Result<(), CommandError> {
        let p = out_dir.join(name);
        write_file(&p, &text)?;
        written.push(p);
        Ok(())
    };
    emit("scores.csv".into(), scores_csv(&scores))?;
    for key in RankKey::ALL {
        emit(format!("ranking_{}.csv", key.name()), ranking_csv(&scores, key))?;
    }
    let mut axes = opts.axes.clone();
    axes.sort();
    axes.dedup();
    let mut scatters = Vec::new();
    for axis in axes {
        let sc = scatter(&scores, axis, opts.scale);
        emit(format!("scatter_{axis}.csv"), scatter_csv(&sc))?;
        emit(format!("scatter_{axis}.svg"), scatter_svg(&sc, opts.scale))?;
        scatters.push(sc);
    }
    emit("omitted.txt".into(), omitted_txt(&scatters))?;
    Ok(written)
}

#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub config: Option<PathBuf>,
    pub per_class: usize,
    /// Total systems, split over the profiles; overrides `per_class`.
    pub systems: Option<usize>,
    pub n_apps: usize,
    pub seed: u64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            config: None,
            per_class: 5,
            systems: None,
            n_apps: 14,
            seed: 0,
        }
    }
}

/// Generates a synthetic campaign and writes its files into `out_dir`.
pub fn cmd_synth(opts: &SynthOptions, out_dir: &Path) -> Result<Campaign, CommandError> {
    let profiles = match &opts.config {
        Some(p) => parse_profiles(&read_text(p)?)
            .map_err(|e| CommandError::Validation(format!("{}: {e}", p.display())))?,
        None => default_presets(),
    };
    if profiles.is_empty() {
        return Err(CommandError::Validation("config defines no profiles".into()));
    }
    let counts = match opts.systems {
        Some(total) if total < profiles.len() => {
            return Err(CommandError::Usage(format!(
                "--systems {total} is fewer than the {} profiles",
                profiles.len()
            )))
        }
        Some(total) => distribute(total, profiles.len()),
        None => vec![opts.per_class; profiles.len()],
    };
    let with_counts: Vec<_> = profiles.into_iter().zip(counts).collect();
    let c = synth_campaign(&with_counts, opts.n_apps, opts.seed)
        .map_err(|e| CommandError::Usage(e.to_string()))?;
    write_campaign(&c, out_dir)?;
    Ok(c)
}
