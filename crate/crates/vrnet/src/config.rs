//! Flat `key = value` configuration files and single-key overrides.
//!
//! Seventeen scalar keys cover the whole parameter space; anything absent
//! falls back to the baseline. Units are baked into the key names so a bare
//! number can never be misread.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::SystemParams;
use crate::sim::{SessionConfig, StreamingMode};
use crate::sweep::baseline_config;

/// Every key accepted in a config document, in canonical render order.
pub const CONFIG_KEYS: [&str; 17] = [
    "mtu",
    "eth_header",
    "ip_header",
    "udp_header",
    "vr_header",
    "vr_frame_bytes",
    "fps",
    "data_packet_bytes",
    "ack_packet_bytes",
    "cable_m",
    "prop_mps",
    "switch_delay_s",
    "ppr",
    "data_rate_bps",
    "health_check_s",
    "mode",
    "duration_s",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("unknown key `{key}`")]
    UnknownKey { key: String },
    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// A full run configuration: model parameters plus the simulator mode and
/// streaming duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub mode: StreamingMode,
    pub duration_s: f64,
}

impl RunConfig {
    pub fn session(&self) -> SessionConfig {
        SessionConfig {
            params: self.params,
            mode: self.mode,
            duration_s: self.duration_s,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: baseline_config(),
            mode: StreamingMode::StopAndWait,
            duration_s: 1.0,
        }
    }
}

/// Parses a config document on top of the baseline defaults and validates
/// the result. Lines are `key = value`; `#` starts a comment; blank lines
/// are ignored; later assignments win.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut config = RunConfig::default();
    parse_into(&mut config, text)?;
    validate(&config)?;
    Ok(config)
}

/// Reads and parses a config file, reporting I/O failures with the path.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

/// Applies assignments from `text` without the final validation pass, so
/// callers can stack further overrides first.
pub fn parse_into(config: &mut RunConfig, text: &str) -> Result<(), ConfigError> {
    for (index, raw_line) in text.lines().enumerate() {
        let line = index + 1;
        let content = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Line {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        set_key(config, key.trim(), value.trim())
            .map_err(|err| ConfigError::Line {
                line,
                message: err.to_string(),
            })?;
    }
    Ok(())
}

/// Assigns one key. Used for config lines and for `--set key=value` flags.
pub fn set_key(config: &mut RunConfig, key: &str, value: &str) -> Result<(), ConfigError> {
    let link = &mut config.params.link;
    let headers = &mut config.params.headers;
    let workload = &mut config.params.workload;
    match key {
        "mtu" => headers.mtu = parse_bytes(key, value)?,
        "eth_header" => headers.eth_header = parse_bytes(key, value)?,
        "ip_header" => headers.ip_header = parse_bytes(key, value)?,
        "udp_header" => headers.udp_header = parse_bytes(key, value)?,
        "vr_header" => headers.vr_header = parse_bytes(key, value)?,
        "vr_frame_bytes" => workload.vr_frame_bytes = parse_bytes(key, value)?,
        "fps" => workload.fps = parse_number(key, value)?,
        "data_packet_bytes" => link.data_packet_bytes = parse_bytes(key, value)?,
        "ack_packet_bytes" => link.ack_packet_bytes = parse_bytes(key, value)?,
        "cable_m" => link.cable_m = parse_number(key, value)?,
        "prop_mps" => link.prop_mps = parse_number(key, value)?,
        "switch_delay_s" => link.switch_delay_s = parse_number(key, value)?,
        "ppr" => link.ppr = parse_number(key, value)?,
        "data_rate_bps" => link.data_rate_bps = parse_number(key, value)?,
        "health_check_s" => workload.health_check_s = parse_number(key, value)?,
        "mode" => {
            config.mode = value.parse().map_err(|reason| ConfigError::InvalidValue {
                key: key.to_string(),
                reason,
            })?
        }
        "duration_s" => config.duration_s = parse_number(key, value)?,
        other => {
            return Err(ConfigError::UnknownKey {
                key: other.to_string(),
            })
        }
    }
    Ok(())
}

/// Checks the assembled configuration against the model preconditions,
/// reporting violations by key name.
pub fn validate(config: &RunConfig) -> Result<(), ConfigError> {
    config
        .params
        .validate()
        .map_err(|err| ConfigError::InvalidValue {
            key: err.field.to_string(),
            reason: err.reason,
        })?;
    if !(config.duration_s > 0.0 && config.duration_s.is_finite()) {
        return Err(ConfigError::InvalidValue {
            key: "duration_s".to_string(),
            reason: format!(
                "streaming duration must be positive and finite (got {})",
                config.duration_s
            ),
        });
    }
    Ok(())
}

/// Renders a configuration with every key present, in canonical order.
/// `parse_config(render_config(c))` reproduces `c` exactly.
pub fn render_config(config: &RunConfig) -> String {
    let h = &config.params.headers;
    let l = &config.params.link;
    let w = &config.params.workload;
    let mut out = String::new();
    for key in CONFIG_KEYS {
        let value = match key {
            "mtu" => h.mtu.to_string(),
            "eth_header" => h.eth_header.to_string(),
            "ip_header" => h.ip_header.to_string(),
            "udp_header" => h.udp_header.to_string(),
            "vr_header" => h.vr_header.to_string(),
            "vr_frame_bytes" => w.vr_frame_bytes.to_string(),
            "fps" => w.fps.to_string(),
            "data_packet_bytes" => l.data_packet_bytes.to_string(),
            "ack_packet_bytes" => l.ack_packet_bytes.to_string(),
            "cable_m" => l.cable_m.to_string(),
            "prop_mps" => l.prop_mps.to_string(),
            "switch_delay_s" => l.switch_delay_s.to_string(),
            "ppr" => l.ppr.to_string(),
            "data_rate_bps" => l.data_rate_bps.to_string(),
            "health_check_s" => w.health_check_s.to_string(),
            "mode" => config.mode.to_string(),
            "duration_s" => config.duration_s.to_string(),
            _ => unreachable!(),
        };
        out.push_str(key);
        out.push_str(" = ");
        out.push_str(&value);
        out.push('\n');
    }
    out
}

fn parse_number(key: &str, value: &str) -> Result<f64, ConfigError> {
    let parsed: f64 = value.parse().map_err(|_| ConfigError::InvalidValue {
        key: key.to_string(),
        reason: format!("cannot parse `{value}` as a number"),
    })?;
    if parsed.is_nan() {
        return Err(ConfigError::InvalidValue {
            key: key.to_string(),
            reason: "NaN is not a valid value".to_string(),
        });
    }
    Ok(parsed)
}

fn parse_bytes(key: &str, value: &str) -> Result<u64, ConfigError> {
    let number = parse_number(key, value)?;
    if !(number >= 0.0 && number.fract() == 0.0 && number <= 2.0_f64.powi(53)) {
        return Err(ConfigError::InvalidValue {
            key: key.to_string(),
            reason: format!("`{value}` is not a whole byte count"),
        });
    }
    Ok(number as u64)
}
