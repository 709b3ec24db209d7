//! Deterministic discrete-event simulation of one streaming session:
//! three-message establishment, fragmented video streaming with per-packet
//! acknowledgements and a periodic health check, and a two-message close.
//!
//! The simulator exists to cross-validate the closed-form model: in
//! stop-and-wait mode every per-packet round trip reproduces the analytic
//! total latency, and the measured cycle throughput reproduces the analytic
//! throughput.

mod engine;
mod event;
mod message;

pub use engine::{
    run_session, ClientState, ServerState, SessionConfig, SimStats, StreamingMode,
};
pub use event::{Action, Endpoint, EventQueue, SimEvent, TimerKind};
pub use message::{MessageKind, SimMessage};

use thiserror::Error;

use crate::model::{InvalidParameter, PerfMetrics};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] InvalidParameter),
    #[error("session recorded no traffic; control overhead is undefined")]
    NoTraffic,
    #[error("statistics and metrics come from different parameter sets")]
    ConfigMismatch,
    #[error("model validation requires a stop-and-wait run")]
    NotStopAndWait,
    #[error("model validation requires at least one latency sample")]
    NoSamples,
}

/// Share of all bytes on the wire spent on control messages: establishment,
/// health checks and teardown. Acks of data packets count as stream traffic.
pub fn control_overhead(stats: &SimStats) -> Result<f64, SimError> {
    if stats.total_bytes == 0 {
        return Err(SimError::NoTraffic);
    }
    Ok(stats.control_bytes as f64 / stats.total_bytes as f64)
}

/// Outcome of checking a simulation run against the closed-form model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub samples: usize,
    /// Largest relative deviation of a round-trip sample from the analytic
    /// total latency.
    pub max_latency_rel_dev: f64,
    /// Relative deviation of the measured cycle throughput (data packet bits
    /// per mean round trip) from the analytic throughput.
    pub throughput_rel_dev: f64,
    pub measured_throughput_bps: f64,
    pub latency_tolerance: f64,
    pub throughput_tolerance: f64,
    pub passed: bool,
}

/// Compares an uncongested stop-and-wait run against the closed-form
/// metrics for the same configuration.
///
/// Fails with [`SimError::ConfigMismatch`] when `metrics` was not produced
/// by the configuration the statistics came from.
pub fn validate_against_model(
    stats: &SimStats,
    metrics: &PerfMetrics,
    latency_tolerance: f64,
    throughput_tolerance: f64,
) -> Result<ValidationReport, SimError> {
    if stats.config.mode != StreamingMode::StopAndWait {
        return Err(SimError::NotStopAndWait);
    }
    if stats.latency_samples_s.is_empty() {
        return Err(SimError::NoSamples);
    }
    let expected = stats.config.params.evaluate()?;
    if expected != *metrics {
        return Err(SimError::ConfigMismatch);
    }

    let total = metrics.total_latency_s;
    let max_latency_rel_dev = stats
        .latency_samples_s
        .iter()
        .map(|sample| (sample - total).abs() / total)
        .fold(0.0, f64::max);

    // Cycle throughput: every sample is one full send/ack cycle carrying one
    // data packet, so bits per mean cycle is the measured counterpart of the
    // analytic throughput.
    let cycle_sum: f64 = stats.latency_samples_s.iter().sum();
    let bits = (stats.latency_samples_s.len() as u64
        * stats.config.params.link.data_packet_bytes
        * 8) as f64;
    let measured_throughput_bps = bits / cycle_sum;
    let throughput_rel_dev =
        (measured_throughput_bps - metrics.throughput_bps).abs() / metrics.throughput_bps;

    Ok(ValidationReport {
        samples: stats.latency_samples_s.len(),
        max_latency_rel_dev,
        throughput_rel_dev,
        measured_throughput_bps,
        latency_tolerance,
        throughput_tolerance,
        passed: max_latency_rel_dev <= latency_tolerance
            && throughput_rel_dev <= throughput_tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{total_latency, VRWorkload};
    use crate::sweep::baseline_config;

    /// Ten exact-fit fragments per frame at one frame per second: the link
    /// is idle almost all the time, so stop-and-wait runs uncongested.
    fn low_load_config(duration_s: f64) -> SessionConfig {
        let mut params = baseline_config();
        params.workload = VRWorkload {
            vr_frame_bytes: 14_320,
            fps: 1.0,
            health_check_s: 0.05,
        };
        SessionConfig {
            params,
            mode: StreamingMode::StopAndWait,
            duration_s,
        }
    }

    #[test]
    fn uncongested_round_trips_match_the_model() {
        let cfg = low_load_config(0.5);
        let stats = cfg.run().unwrap();
        assert_eq!(stats.latency_samples_s.len(), 10);
        let expected = total_latency(&cfg.params.link).unwrap();
        for sample in &stats.latency_samples_s {
            assert!(
                ((sample - expected) / expected).abs() < 1e-9,
                "sample {sample} vs model {expected}"
            );
        }
    }

    #[test]
    fn validation_passes_on_an_uncongested_run() {
        let cfg = low_load_config(0.5);
        let stats = cfg.run().unwrap();
        let metrics = cfg.params.evaluate().unwrap();
        let report = validate_against_model(&stats, &metrics, 1e-6, 1e-3).unwrap();
        assert!(report.passed, "{report:?}");
        assert!(report.max_latency_rel_dev < 1e-6);
        assert!(report.throughput_rel_dev < 1e-3);
    }

    #[test]
    fn validation_rejects_metrics_from_a_different_configuration() {
        let cfg = low_load_config(0.2);
        let stats = cfg.run().unwrap();
        let mut other = cfg.params;
        other.link.cable_m = 1000.0;
        let metrics = other.evaluate().unwrap();
        assert_eq!(
            validate_against_model(&stats, &metrics, 1e-6, 1e-3),
            Err(SimError::ConfigMismatch)
        );
    }

    #[test]
    fn validation_rejects_pipelined_runs() {
        let mut cfg = low_load_config(0.2);
        cfg.mode = StreamingMode::Pipelined;
        let stats = cfg.run().unwrap();
        let metrics = cfg.params.evaluate().unwrap();
        assert_eq!(
            validate_against_model(&stats, &metrics, 1e-6, 1e-3),
            Err(SimError::NotStopAndWait)
        );
    }

    #[test]
    fn zero_duration_is_rejected() {
        let cfg = low_load_config(0.2);
        let err = run_session(
            &cfg.params.headers,
            &cfg.params.link,
            &cfg.params.workload,
            StreamingMode::StopAndWait,
            0.0,
        )
        .unwrap_err();
        assert!(matches!(err, SimError::Model(ref p) if p.field == "duration_s"));
    }

    #[test]
    fn control_overhead_requires_traffic() {
        let cfg = low_load_config(0.2);
        let stats = cfg.run().unwrap();
        let empty = SimStats {
            control_bytes: 0,
            total_bytes: 0,
            ..stats
        };
        assert_eq!(control_overhead(&empty), Err(SimError::NoTraffic));
    }

    #[test]
    fn overhead_with_health_checks_disabled_is_handshake_and_close_only() {
        let mut cfg = low_load_config(0.2);
        cfg.params.workload.health_check_s = 1.0e9;
        let stats = cfg.run().unwrap();
        assert_eq!(stats.health_pings_sent, 0);
        // Three establishment messages plus two close messages.
        assert_eq!(stats.control_bytes, 5 * cfg.params.link.ack_packet_bytes);
        let overhead = control_overhead(&stats).unwrap();
        let expected = stats.control_bytes as f64 / stats.total_bytes as f64;
        assert_eq!(overhead, expected);
    }

    #[test]
    fn bytes_are_conserved_and_every_data_packet_acked() {
        for mode in [StreamingMode::StopAndWait, StreamingMode::Pipelined] {
            let mut cfg = low_load_config(0.3);
            cfg.mode = mode;
            let stats = cfg.run().unwrap();
            assert_eq!(stats.bytes_sent, stats.bytes_delivered);
            assert_eq!(stats.data_packets_sent, stats.data_packets_acked);
            assert_eq!(stats.data_packets_sent, stats.data_packets_delivered);
            assert_eq!(stats.health_pings_sent, stats.health_pongs_received);
        }
    }

    #[test]
    fn repeated_runs_are_bit_identical() {
        let cfg = low_load_config(0.3);
        assert_eq!(cfg.run().unwrap(), cfg.run().unwrap());
    }

    #[test]
    fn health_check_count_tracks_the_period() {
        let mut cfg = low_load_config(0.26);
        cfg.params.workload.health_check_s = 0.05;
        let stats = cfg.run().unwrap();
        let expected = (0.26_f64 / 0.05).floor() as i64;
        let got = stats.health_pings_sent as i64;
        assert!((got - expected).abs() <= 1, "got {got}, expected ~{expected}");
        assert_eq!(stats.health_pings_sent, stats.health_pongs_received);
    }

    #[test]
    fn partial_final_fragment_keeps_full_wire_size_but_true_payload() {
        let mut cfg = low_load_config(0.2);
        // 1433 bytes: one full fragment plus a single payload byte.
        cfg.params.workload.vr_frame_bytes = 1433;
        let stats = cfg.run().unwrap();
        assert_eq!(stats.data_packets_sent, 2);
        let data_wire = 2 * cfg.params.link.data_packet_bytes;
        let ack_wire = 2 * cfg.params.link.ack_packet_bytes;
        assert_eq!(stats.stream_bytes, data_wire + ack_wire);
        // Goodput counts delivered payload, not wire padding.
        let payload_bits = 1433.0 * 8.0;
        assert!((stats.goodput_bps - payload_bits / 0.2).abs() < 1e-6);
    }

    #[test]
    fn session_outlives_streaming_window() {
        let cfg = low_load_config(0.2);
        let stats = cfg.run().unwrap();
        assert!(stats.session_duration_s > stats.streaming_duration_s);
        assert_eq!(stats.streaming_duration_s, 0.2);
    }

    #[test]
    fn completed_stats_transfer_between_threads() {
        fn check<T: Send + Sync + 'static>() {}
        check::<SimStats>();
        check::<SessionConfig>();
        check::<ValidationReport>();
    }

    #[test]
    fn distinct_sessions_run_in_parallel_with_identical_results() {
        let cfg = low_load_config(0.2);
        let sequential = cfg.run().unwrap();
        let handles: Vec<_> = (0..4).map(|_| std::thread::spawn(move || cfg.run().unwrap())).collect();
        for handle in handles {
            assert_eq!(handle.join().unwrap(), sequential);
        }
    }

    #[test]
    fn achieved_fps_counts_only_fully_acked_frames() {
        let mut cfg = low_load_config(0.5);
        cfg.params.workload.fps = 4.0;
        let stats = cfg.run().unwrap();
        assert_eq!(stats.vr_frames_generated, 2);
        assert_eq!(stats.vr_frames_completed, 2);
        assert_eq!(stats.achieved_fps, 2.0 / 0.5);
    }
}
