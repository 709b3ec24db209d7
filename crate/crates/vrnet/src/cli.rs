//! Command-line surface: `eval` prints the closed-form metrics, `sweep`
//! writes an experiment series as CSV, `sim` runs the session simulator.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on config or model errors.

use std::env;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::config::{load_config, set_key, validate, ConfigError, RunConfig};
use crate::csv::{sig6, write_csv, CsvError};
use crate::model::{InvalidParameter, PerfMetrics};
use crate::sim::{control_overhead, validate_against_model, SimError, SimStats, StreamingMode};
use crate::sweep::{sweep, SweepError, SweepParameter, SweepSpec};

/// Tolerances applied when `sim` checks a stop-and-wait run against the
/// closed-form model.
pub const SIM_LATENCY_TOLERANCE: f64 = 1.0e-6;
pub const SIM_THROUGHPUT_TOLERANCE: f64 = 1.0e-3;

/// Environment variable consulted for a default config path.
pub const CONFIG_ENV_VAR: &str = "VRNET_CONFIG";

#[derive(Debug, Parser)]
#[command(
    name = "vrnet",
    version,
    about = "Performance model and session simulator for VR streaming over UDP/Ethernet"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the closed-form metrics for one configuration.
    Eval {
        /// Config file; falls back to $VRNET_CONFIG, then to the baseline.
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        /// Override one config key, e.g. --set mtu=9000. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Evaluate a series over one link parameter and write it as CSV.
    Sweep {
        #[arg(long, value_enum)]
        param: ParamArg,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
    },
    /// Run the discrete-event session simulator.
    Sim {
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Streaming window length in seconds.
        #[arg(long, value_name = "SECONDS")]
        duration: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ParamArg {
    #[value(name = "cable_m")]
    CableM,
    #[value(name = "data_rate_bps")]
    DataRateBps,
    #[value(name = "ppr")]
    Ppr,
}

impl From<ParamArg> for SweepParameter {
    fn from(arg: ParamArg) -> Self {
        match arg {
            ParamArg::CableM => SweepParameter::CableLength,
            ParamArg::DataRateBps => SweepParameter::DataRate,
            ParamArg::Ppr => SweepParameter::PacketProcessingRate,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    #[value(name = "stop_and_wait")]
    StopAndWait,
    #[value(name = "pipelined")]
    Pipelined,
}

impl From<ModeArg> for StreamingMode {
    fn from(arg: ModeArg) -> Self {
        match arg {
            ModeArg::StopAndWait => StreamingMode::StopAndWait,
            ModeArg::Pipelined => StreamingMode::Pipelined,
        }
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] InvalidParameter),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error("{0}")]
    BadOverride(String),
}

/// Parses `argv` and runs the selected command, returning the process exit
/// code instead of exiting so tests can drive it directly.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Eval { config, set } => run_eval(config, set),
        Command::Sweep {
            param,
            from,
            to,
            steps,
            out,
            config,
        } => run_sweep(param.into(), from, to, steps, out, config),
        Command::Sim {
            config,
            mode,
            duration,
        } => run_sim(config, mode.map(Into::into), duration),
    }
}

/// Loads the config from the `--config` flag, the environment variable, or
/// the built-in baseline, in that order of preference.
fn base_config(flag: Option<PathBuf>) -> Result<RunConfig, CliError> {
    let from_env = env::var_os(CONFIG_ENV_VAR)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from);
    match flag.or(from_env) {
        Some(path) => Ok(load_config(&path)?),
        None => Ok(RunConfig::default()),
    }
}

fn run_eval(config: Option<PathBuf>, overrides: Vec<String>) -> Result<(), CliError> {
    let mut cfg = base_config(config)?;
    for assignment in &overrides {
        let (key, value) = assignment.split_once('=').ok_or_else(|| {
            CliError::BadOverride(format!("expected KEY=VALUE in --set, got `{assignment}`"))
        })?;
        set_key(&mut cfg, key.trim(), value.trim())?;
    }
    validate(&cfg)?;
    let metrics = cfg.params.evaluate()?;
    print_metrics(&metrics);
    if metrics.is_overloaded() {
        eprintln!("warning: utilization exceeds 1; the offered load overruns the data rate");
    }
    Ok(())
}

fn run_sweep(
    parameter: SweepParameter,
    from: f64,
    to: f64,
    steps: usize,
    out: PathBuf,
    config: Option<PathBuf>,
) -> Result<(), CliError> {
    let cfg = base_config(config)?;
    let series = sweep(&SweepSpec {
        parameter,
        start: from,
        stop: to,
        steps,
        baseline: cfg.params,
    })?;
    write_csv(&series, &out)?;
    println!(
        "wrote {} points for {} to {}",
        series.points.len(),
        parameter.key(),
        out.display()
    );
    Ok(())
}

fn run_sim(
    config: Option<PathBuf>,
    mode: Option<StreamingMode>,
    duration: Option<f64>,
) -> Result<(), CliError> {
    let mut cfg = base_config(config)?;
    if let Some(mode) = mode {
        cfg.mode = mode;
    }
    if let Some(duration) = duration {
        cfg.duration_s = duration;
    }
    let stats = cfg.session().run()?;
    let overhead = control_overhead(&stats)?;
    print_stats(&stats, overhead);

    match cfg.mode {
        StreamingMode::StopAndWait => {
            let metrics = cfg.params.evaluate()?;
            let report = validate_against_model(
                &stats,
                &metrics,
                SIM_LATENCY_TOLERANCE,
                SIM_THROUGHPUT_TOLERANCE,
            )?;
            row(
                "model_validation",
                format!(
                    "{} (max latency dev {:.3e}, throughput dev {:.3e})",
                    if report.passed { "PASS" } else { "FAIL" },
                    report.max_latency_rel_dev,
                    report.throughput_rel_dev
                ),
            );
        }
        StreamingMode::Pipelined => {
            row("model_validation", "n/a (stop_and_wait only)");
        }
    }
    Ok(())
}

fn row(name: &str, value: impl std::fmt::Display) {
    println!("{name:<21} {value}");
}

fn print_metrics(m: &PerfMetrics) {
    row("max_payload", format!("{} bytes", m.max_payload_bytes));
    row("frames_per_vr_frame", m.frames_per_vr_frame);
    row("data_network_delay", format!("{} us", sig6(m.data_network_delay_s * 1.0e6)));
    row("eth_data_latency", format!("{} us", sig6(m.eth_data_latency_s * 1.0e6)));
    row("ack_latency", format!("{} us", sig6(m.ack_latency_s * 1.0e6)));
    row("total_latency", format!("{} us", sig6(m.total_latency_s * 1.0e6)));
    row("throughput", format!("{} Gbps", sig6(m.throughput_bps / 1.0e9)));
    row("utilization", sig6(m.utilization));
}

fn print_stats(s: &SimStats, overhead: f64) {
    row("mode", s.config.mode);
    row("streaming_duration", format!("{} s", sig6(s.streaming_duration_s)));
    row("session_duration", format!("{} s", sig6(s.session_duration_s)));
    row("vr_frames_generated", s.vr_frames_generated);
    row("vr_frames_completed", s.vr_frames_completed);
    row("achieved_fps", sig6(s.achieved_fps));
    row("data_packets_sent", s.data_packets_sent);
    row("data_packets_acked", s.data_packets_acked);
    row("health_pings", s.health_pings_sent);
    row("goodput", format!("{} Gbps", sig6(s.goodput_bps / 1.0e9)));
    row("stream_bytes", s.stream_bytes);
    row("control_bytes", s.control_bytes);
    row("total_bytes", s.total_bytes);
    row("control_overhead", format_fraction(overhead));
}

fn format_fraction(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:.3e}")
    }
}
