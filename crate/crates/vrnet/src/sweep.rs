//! Single-parameter experiment series over the closed-form model.
//!
//! A sweep holds every parameter at a fixed baseline and varies exactly one
//! link parameter across a uniform grid, evaluating the full metric bundle
//! at each point. The engine is stateless: every point equals an independent
//! [`crate::model::evaluate`] call at that parameter value.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::model::{
    HeaderStack, InvalidParameter, LinkParams, PerfMetrics, SystemParams, VRWorkload,
};

/// The link parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    CableLength,
    DataRate,
    PacketProcessingRate,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 3] = [
        SweepParameter::CableLength,
        SweepParameter::DataRate,
        SweepParameter::PacketProcessingRate,
    ];

    /// Config-key spelling of the parameter; also the CSV `param_name`.
    pub fn key(self) -> &'static str {
        match self {
            SweepParameter::CableLength => "cable_m",
            SweepParameter::DataRate => "data_rate_bps",
            SweepParameter::PacketProcessingRate => "ppr",
        }
    }

    /// Default sweep window: 0-1000 m for cable length, 0.1-2.5 Gbit/s for
    /// data rate, and a symmetric decade around the baseline processing rate.
    pub fn default_range(self) -> (f64, f64) {
        match self {
            SweepParameter::CableLength => (0.0, 1000.0),
            SweepParameter::DataRate => (1.0e8, 2.5e9),
            SweepParameter::PacketProcessingRate => (5.0e4, 5.0e5),
        }
    }

    fn apply(self, baseline: &SystemParams, value: f64) -> SystemParams {
        let mut params = *baseline;
        match self {
            SweepParameter::CableLength => params.link.cable_m = value,
            SweepParameter::DataRate => params.link.data_rate_bps = value,
            SweepParameter::PacketProcessingRate => params.link.ppr = value,
        }
        params
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for SweepParameter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SweepParameter::ALL
            .into_iter()
            .find(|p| p.key() == s)
            .ok_or_else(|| format!("unknown sweep parameter `{s}`; expected cable_m, data_rate_bps or ppr"))
    }
}

#[derive(Debug, Clone, Error)]
pub enum SweepError {
    #[error("sweep range must satisfy start < stop (got start {start}, stop {stop})")]
    EmptyRange { start: f64, stop: f64 },
    #[error("sweep needs at least 2 steps (got {0})")]
    TooFewSteps(usize),
    #[error("sweep point {parameter} = {value} is invalid: {source}")]
    InvalidPoint {
        parameter: &'static str,
        value: f64,
        source: InvalidParameter,
    },
}

/// Description of one sweep: the varied parameter, its grid, and the
/// baseline every other parameter is held at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub baseline: SystemParams,
}

/// One evaluated grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub metrics: PerfMetrics,
}

/// An ordered series of evaluated points, strictly ascending in the swept
/// parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSeries {
    pub parameter: SweepParameter,
    pub points: Vec<SweepPoint>,
}

/// The reference configuration: standard header stack over a 1500-byte MTU,
/// a 10 m gigabit link through one switch, and a 60 fps stream of 1 MiB
/// VR frames with a 50 ms health check.
pub fn baseline_config() -> SystemParams {
    SystemParams {
        headers: HeaderStack {
            eth_header: 14,
            ip_header: 20,
            udp_header: 8,
            vr_header: 26,
            mtu: 1500,
        },
        link: LinkParams {
            cable_m: 10.0,
            prop_mps: 2.0e8,
            data_rate_bps: 1.0e9,
            switch_delay_s: 1.0e-6,
            ppr: 205_000.0,
            data_packet_bytes: 1500,
            // The acknowledgement size is not pinned by the parameter table;
            // a minimum Ethernet frame is the documented default.
            ack_packet_bytes: 64,
        },
        workload: VRWorkload {
            vr_frame_bytes: 1 << 20,
            fps: 60.0,
            health_check_s: 0.05,
        },
    }
}

/// Evaluates `spec.steps` uniformly spaced points from `start` to `stop`
/// inclusive. The returned series is deterministic and order-independent:
/// each point is a pure function of the baseline and its parameter value.
pub fn sweep(spec: &SweepSpec) -> Result<SweepSeries, SweepError> {
    // `>=` would let NaN endpoints through; demand a well-ordered range.
    if spec.start.partial_cmp(&spec.stop) != Some(std::cmp::Ordering::Less) {
        return Err(SweepError::EmptyRange {
            start: spec.start,
            stop: spec.stop,
        });
    }
    if spec.steps < 2 {
        return Err(SweepError::TooFewSteps(spec.steps));
    }

    let span = spec.stop - spec.start;
    let last = (spec.steps - 1) as f64;
    let mut points = Vec::with_capacity(spec.steps);
    for i in 0..spec.steps {
        let value = if i + 1 == spec.steps {
            spec.stop
        } else {
            spec.start + span * i as f64 / last
        };
        let params = spec.parameter.apply(&spec.baseline, value);
        let metrics = params.evaluate().map_err(|source| SweepError::InvalidPoint {
            parameter: spec.parameter.key(),
            value,
            source,
        })?;
        points.push(SweepPoint { value, metrics });
    }
    Ok(SweepSeries {
        parameter: spec.parameter,
        points,
    })
}
