use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use flexmeter::commands::{
    cmd_extract, cmd_report, cmd_score, cmd_synth, CommandError, ReportOptions, SynthOptions,
};
use flexmeter::metrics::{FlexibilityEstimator, GapPolicy};
use flexmeter::report::{Axis, AxisScale};

#[derive(Parser)]
#[command(name = "flexmeter", version, about = "Flexibility metrics for computing systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    #[value(name = "gm_am")]
    GmAm,
    #[value(name = "gm_max")]
    GmMax,
    #[value(name = "inv_cv")]
    InvCv,
}

impl From<EstimatorArg> for FlexibilityEstimator {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::GmAm => FlexibilityEstimator::GmOverAm,
            EstimatorArg::GmMax => FlexibilityEstimator::GmOverMax,
            EstimatorArg::InvCv => FlexibilityEstimator::InvOnePlusCv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GapArg {
    /// Drop an application for all systems if any system has a gap on it
    Column,
    /// Drop gaps per system; scores become non-comparable
    System,
}

impl From<GapArg> for GapPolicy {
    fn from(g: GapArg) -> Self {
        match g {
            GapArg::Column => GapPolicy::ExcludeColumn,
            GapArg::System => GapPolicy::PerSystem,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    #[value(name = "peak_perf")]
    PeakPerf,
    #[value(name = "energy_eff")]
    EnergyEff,
    #[value(name = "area_eff")]
    AreaEff,
    #[value(name = "mean_perf")]
    MeanPerf,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::PeakPerf => Axis::PeakPerf,
            AxisArg::EnergyEff => Axis::EnergyEff,
            AxisArg::AreaEff => Axis::AreaEff,
            AxisArg::MeanPerf => Axis::MeanPerf,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Extract the intrinsic workload of an operation profile
    Extract {
        profile: PathBuf,
        /// Classification table replacing the default one
        #[arg(long)]
        table: Option<PathBuf>,
        /// Application id (defaults to the profile file stem)
        #[arg(long)]
        app: Option<String>,
    },
    /// Score every system of a campaign
    Score {
        /// Campaign files or directories
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "gm_am")]
        estimator: EstimatorArg,
        #[arg(long, value_enum, default_value = "column")]
        gaps: GapArg,
        /// Write the table here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write scores, rankings and scatter plots
    Report {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(long, value_enum, value_delimiter = ',')]
        axes: Vec<AxisArg>,
        #[arg(long, value_enum, default_value = "gm_am")]
        estimator: EstimatorArg,
        #[arg(long, value_enum, default_value = "column")]
        gaps: GapArg,
        #[arg(long)]
        log_x: bool,
        #[arg(long)]
        log_y: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic campaign
    Synth {
        /// Profile config (`profile <class> base <v> spread <v> support <v> epo <v>`)
        #[arg(long)]
        config: Option<PathBuf>,
        /// Systems generated per profile
        #[arg(long, default_value_t = 5)]
        per_class: usize,
        /// Total systems, split round-robin over profiles (overrides --per-class)
        #[arg(long)]
        systems: Option<usize>,
        #[arg(long, default_value_t = 14)]
        apps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CommandError> {
    match cli.command {
        Command::Extract {
            profile,
            table,
            app,
        } => {
            println!("{}", cmd_extract(&profile, table.as_deref(), app.as_deref())?);
        }
        Command::Score {
            paths,
            estimator,
            gaps,
            out,
        } => {
            let table = cmd_score(&paths, estimator.into(), gaps.into())?;
            match out {
                Some(p) => std::fs::write(&p, table)
                    .map_err(|e| CommandError::Io(format!("{}: {e}", p.display())))?,
                None => print!("{table}"),
            }
        }
        Command::Report {
            paths,
            axes,
            estimator,
            gaps,
            log_x,
            log_y,
            out,
        } => {
            let mut opts = ReportOptions {
                estimator: estimator.into(),
                policy: gaps.into(),
                scale: AxisScale { log_x, log_y },
                ..ReportOptions::default()
            };
            if !axes.is_empty() {
                opts.axes = axes.into_iter().map(Axis::from).collect();
            }
            for f in cmd_report(&paths, &opts, &out)? {
                println!("{}", f.display());
            }
        }
        Command::Synth {
            config,
            per_class,
            systems,
            apps,
            seed,
            out,
        } => {
            let opts = SynthOptions {
                config,
                per_class,
                systems,
                n_apps: apps,
                seed,
            };
            let c = cmd_synth(&opts, &out)?;
            println!(
                "wrote {} systems, {} applications to {}",
                c.systems.len(),
                c.applications.len(),
                out.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
