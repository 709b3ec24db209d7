//! Closed-form performance model of a point-to-point VR stream over
//! UDP/Ethernet.
//!
//! The model composes per-packet latency out of serialization, propagation,
//! switch and packet-processing delays, and derives steady-state throughput,
//! VR frame fragmentation and link utilization from it. All operations are
//! pure functions over validated parameter sets: times are seconds, sizes are
//! exact byte counts, rates are bits (or packets) per second.

use thiserror::Error;

/// A parameter set violated a model precondition.
///
/// `field` carries the name of the offending parameter using the same
/// spelling as the config-file keys, so errors surfaced through any layer
/// point back at the input that caused them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid parameter `{field}`: {reason}")]
pub struct InvalidParameter {
    pub field: &'static str,
    pub reason: String,
}

fn invalid(field: &'static str, reason: impl Into<String>) -> InvalidParameter {
    InvalidParameter {
        field,
        reason: reason.into(),
    }
}

/// Protocol header sizes and the link MTU, all in bytes.
///
/// The MTU is treated as the full on-wire Ethernet frame budget, so the
/// Ethernet header is subtracted from it alongside the IP, UDP and
/// application headers when computing the usable payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeaderStack {
    pub eth_header: u64,
    pub ip_header: u64,
    pub udp_header: u64,
    pub vr_header: u64,
    pub mtu: u64,
}

impl HeaderStack {
    /// Combined size of all headers carried by one data packet.
    pub fn header_total(&self) -> u64 {
        self.eth_header + self.ip_header + self.udp_header + self.vr_header
    }

    pub fn validate(&self) -> Result<(), InvalidParameter> {
        let total = self.header_total();
        if total >= self.mtu {
            return Err(invalid(
                "mtu",
                format!(
                    "headers total {total} bytes; the MTU ({} bytes) must be strictly larger",
                    self.mtu
                ),
            ));
        }
        Ok(())
    }
}

/// Physical and per-hop parameters of the client-server link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    /// Cable length in meters.
    pub cable_m: f64,
    /// Signal propagation speed in meters per second.
    pub prop_mps: f64,
    /// Link data rate in bits per second.
    pub data_rate_bps: f64,
    /// Fixed delay added by the switch, in seconds, once per direction.
    pub switch_delay_s: f64,
    /// Packet processing rate in packets per second; every packet pays
    /// `1 / ppr` seconds at the receiving endpoint.
    pub ppr: f64,
    /// On-wire size of one data packet in bytes.
    pub data_packet_bytes: u64,
    /// On-wire size of one acknowledgement packet in bytes.
    pub ack_packet_bytes: u64,
}

impl LinkParams {
    pub fn validate(&self) -> Result<(), InvalidParameter> {
        if self.prop_mps.is_nan() || self.prop_mps <= 0.0 {
            return Err(invalid(
                "prop_mps",
                format!("propagation speed must be positive (got {})", self.prop_mps),
            ));
        }
        if self.data_rate_bps.is_nan() || self.data_rate_bps <= 0.0 {
            return Err(invalid(
                "data_rate_bps",
                format!("data rate must be positive (got {})", self.data_rate_bps),
            ));
        }
        if self.ppr.is_nan() || self.ppr <= 0.0 {
            return Err(invalid(
                "ppr",
                format!("packet processing rate must be positive (got {})", self.ppr),
            ));
        }
        if self.switch_delay_s.is_nan() || self.switch_delay_s < 0.0 {
            return Err(invalid(
                "switch_delay_s",
                format!("switch delay must be non-negative (got {})", self.switch_delay_s),
            ));
        }
        if self.cable_m.is_nan() || self.cable_m < 0.0 {
            return Err(invalid(
                "cable_m",
                format!("cable length must be non-negative (got {})", self.cable_m),
            ));
        }
        Ok(())
    }
}

/// VR traffic source description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VRWorkload {
    /// Size of one rendered VR frame in bytes.
    pub vr_frame_bytes: u64,
    /// VR frames produced per second.
    pub fps: f64,
    /// Period of the liveness ping/pong exchange, in seconds.
    pub health_check_s: f64,
}

impl VRWorkload {
    pub fn validate(&self) -> Result<(), InvalidParameter> {
        if self.vr_frame_bytes == 0 {
            return Err(invalid("vr_frame_bytes", "VR frame size must be positive"));
        }
        if self.fps.is_nan() || self.fps <= 0.0 {
            return Err(invalid(
                "fps",
                format!("frame rate must be positive (got {})", self.fps),
            ));
        }
        if self.health_check_s.is_nan() || self.health_check_s <= 0.0 {
            return Err(invalid(
                "health_check_s",
                format!(
                    "health check period must be positive (got {})",
                    self.health_check_s
                ),
            ));
        }
        Ok(())
    }
}

/// The three parameter groups that fully describe one system configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub headers: HeaderStack,
    pub link: LinkParams,
    pub workload: VRWorkload,
}

impl SystemParams {
    pub fn validate(&self) -> Result<(), InvalidParameter> {
        validate_system(&self.headers, &self.link, &self.workload)
    }

    pub fn evaluate(&self) -> Result<PerfMetrics, InvalidParameter> {
        evaluate(&self.headers, &self.link, &self.workload)
    }
}

/// Validates the individual parameter groups plus the cross-group constraint
/// that a data packet fits in the MTU.
pub fn validate_system(
    headers: &HeaderStack,
    link: &LinkParams,
    workload: &VRWorkload,
) -> Result<(), InvalidParameter> {
    headers.validate()?;
    link.validate()?;
    if link.data_packet_bytes > headers.mtu {
        return Err(invalid(
            "data_packet_bytes",
            format!(
                "data packet ({} bytes) does not fit in the MTU ({} bytes)",
                link.data_packet_bytes, headers.mtu
            ),
        ));
    }
    workload.validate()?;
    Ok(())
}

/// All closed-form outputs for one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerfMetrics {
    /// Usable payload per data packet: MTU minus all headers.
    pub max_payload_bytes: u64,
    /// Serialization plus propagation delay of one data packet.
    pub data_network_delay_s: f64,
    /// One-way latency of a data packet including switch and processing.
    pub eth_data_latency_s: f64,
    /// One-way latency of an acknowledgement including switch and processing.
    pub ack_latency_s: f64,
    /// Data latency plus acknowledgement latency: one full send/ack cycle.
    pub total_latency_s: f64,
    /// Data packet bits divided by the total per-packet latency.
    pub throughput_bps: f64,
    /// Ethernet frames needed to carry one VR frame.
    pub frames_per_vr_frame: u64,
    /// Fraction of the link data rate consumed by the stream and its acks.
    pub utilization: f64,
}

impl PerfMetrics {
    /// True when the offered load exceeds the link data rate. Overload is a
    /// warning condition, not an error: the closed form stays well defined.
    pub fn is_overloaded(&self) -> bool {
        self.utilization > 1.0
    }
}

/// Usable payload of one data packet: MTU minus all protocol headers.
pub fn max_payload_size(headers: &HeaderStack) -> Result<u64, InvalidParameter> {
    headers.validate()?;
    Ok(headers.mtu - headers.header_total())
}

/// Serialization plus propagation delay for a packet of `packet_bytes`.
pub fn data_network_delay(packet_bytes: u64, link: &LinkParams) -> Result<f64, InvalidParameter> {
    link.validate()?;
    Ok(packet_bytes as f64 * 8.0 / link.data_rate_bps + link.cable_m / link.prop_mps)
}

/// One-way latency of a full data packet: network delay plus the switch
/// delay plus the per-packet processing time at the receiver.
pub fn ethernet_data_latency(link: &LinkParams) -> Result<f64, InvalidParameter> {
    Ok(data_network_delay(link.data_packet_bytes, link)? + link.switch_delay_s + link.ppr.recip())
}

/// One-way latency of an acknowledgement, composed the same way as the data
/// direction but over the acknowledgement packet size.
pub fn ack_latency(link: &LinkParams) -> Result<f64, InvalidParameter> {
    Ok(data_network_delay(link.ack_packet_bytes, link)? + link.switch_delay_s + link.ppr.recip())
}

/// One full data/acknowledgement cycle: both one-way latencies back to back.
pub fn total_latency(link: &LinkParams) -> Result<f64, InvalidParameter> {
    Ok(ethernet_data_latency(link)? + ack_latency(link)?)
}

/// Steady-state throughput of the acknowledged stream: the bits of one data
/// packet delivered per send/ack cycle. Note this prices the full on-wire
/// frame, not just its payload.
pub fn throughput(link: &LinkParams) -> Result<f64, InvalidParameter> {
    Ok(link.data_packet_bytes as f64 * 8.0 / total_latency(link)?)
}

/// Number of Ethernet frames needed to carry one VR frame; a partial final
/// frame still counts as a frame.
pub fn frames_per_vr_frame(
    workload: &VRWorkload,
    headers: &HeaderStack,
) -> Result<u64, InvalidParameter> {
    workload.validate()?;
    let payload = max_payload_size(headers)?;
    Ok(workload.vr_frame_bytes.div_ceil(payload))
}

/// Fraction of the link data rate consumed by the stream: data plus
/// acknowledgement bytes for every fragment of every VR frame per second.
/// Values above 1.0 indicate overload; see [`PerfMetrics::is_overloaded`].
pub fn network_utilization(
    link: &LinkParams,
    workload: &VRWorkload,
    headers: &HeaderStack,
) -> Result<f64, InvalidParameter> {
    validate_system(headers, link, workload)?;
    let frames = frames_per_vr_frame(workload, headers)?;
    let bytes_per_fragment = (link.data_packet_bytes + link.ack_packet_bytes) as f64;
    Ok(bytes_per_fragment * frames as f64 * workload.fps * 8.0 / link.data_rate_bps)
}

/// Evaluates every metric for one configuration in a single call.
///
/// The result is field-wise identical to the standalone operations: this
/// function routes through them rather than re-deriving anything.
pub fn evaluate(
    headers: &HeaderStack,
    link: &LinkParams,
    workload: &VRWorkload,
) -> Result<PerfMetrics, InvalidParameter> {
    validate_system(headers, link, workload)?;
    Ok(PerfMetrics {
        max_payload_bytes: max_payload_size(headers)?,
        data_network_delay_s: data_network_delay(link.data_packet_bytes, link)?,
        eth_data_latency_s: ethernet_data_latency(link)?,
        ack_latency_s: ack_latency(link)?,
        total_latency_s: total_latency(link)?,
        throughput_bps: throughput(link)?,
        frames_per_vr_frame: frames_per_vr_frame(workload, headers)?,
        utilization: network_utilization(link, workload, headers)?,
    })
}
