//! The discrete-event session engine.
//!
//! One engine instance owns both endpoints, the event queue and the
//! counters for a single session. There is no randomness anywhere: event
//! ordering ties are broken by insertion order, so identical inputs produce
//! bit-identical statistics.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::model::{
    frames_per_vr_frame, max_payload_size, validate_system, HeaderStack, InvalidParameter,
    LinkParams, SystemParams, VRWorkload,
};

use super::event::{Action, Endpoint, EventQueue, SimEvent, TimerKind};
use super::message::{MessageKind, SimMessage};
use super::SimError;

/// Transmission discipline used during the streaming phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamingMode {
    /// The server sends the next data packet only after the previous one is
    /// acknowledged. Per-packet round trips match the closed-form latency.
    StopAndWait,
    /// The server serializes fragments back to back; acknowledgements return
    /// asynchronously.
    Pipelined,
}

impl StreamingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            StreamingMode::StopAndWait => "stop_and_wait",
            StreamingMode::Pipelined => "pipelined",
        }
    }
}

impl fmt::Display for StreamingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StreamingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "stop_and_wait" => Ok(StreamingMode::StopAndWait),
            "pipelined" => Ok(StreamingMode::Pipelined),
            other => Err(format!(
                "unknown streaming mode `{other}`; expected stop_and_wait or pipelined"
            )),
        }
    }
}

/// Everything a session run depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionConfig {
    pub params: SystemParams,
    pub mode: StreamingMode,
    pub duration_s: f64,
}

impl SessionConfig {
    pub fn run(&self) -> Result<SimStats, SimError> {
        run_session(
            &self.params.headers,
            &self.params.link,
            &self.params.workload,
            self.mode,
            self.duration_s,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClientState {
    Idle,
    ConnectSent,
    Established,
    Streaming,
    CloseSent,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServerState {
    Listening,
    Accepting,
    Established,
    Streaming,
    Closed,
}

/// Aggregate results of one simulated session.
#[derive(Debug, Clone, PartialEq)]
pub struct SimStats {
    /// Configuration the session ran with.
    pub config: SessionConfig,
    /// Round-trip time of every acknowledged data packet, measured from the
    /// moment its first bit hit the wire to the arrival of its ack.
    pub latency_samples_s: Vec<f64>,
    /// Application payload bits delivered, per second of streaming window.
    pub goodput_bps: f64,
    /// Bytes of establishment, health-check and teardown messages.
    pub control_bytes: u64,
    /// Bytes of data packets and their acknowledgements.
    pub stream_bytes: u64,
    /// All bytes put on the wire.
    pub total_bytes: u64,
    pub bytes_sent: u64,
    pub bytes_delivered: u64,
    pub data_packets_sent: u64,
    pub data_packets_delivered: u64,
    pub data_packets_acked: u64,
    pub health_pings_sent: u64,
    pub health_pongs_received: u64,
    pub vr_frames_generated: u64,
    /// VR frames whose every fragment was acknowledged.
    pub vr_frames_completed: u64,
    /// Completed frames divided by the streaming window.
    pub achieved_fps: f64,
    /// Configured length of the streaming window.
    pub streaming_duration_s: f64,
    /// Time of the final event, from session request to close ack.
    pub session_duration_s: f64,
}

/// Runs one full session: three-message establishment, `duration_s` seconds
/// of streaming with per-packet acks and periodic health checks, then a
/// two-message close once all traffic has drained.
///
/// Per-direction delivery time is the sum of serialization, propagation,
/// switch delay and packet processing, exactly as in the closed-form model.
/// Each direction serializes one packet at a time and delivers losslessly,
/// in order.
pub fn run_session(
    headers: &HeaderStack,
    link: &LinkParams,
    workload: &VRWorkload,
    mode: StreamingMode,
    duration_s: f64,
) -> Result<SimStats, SimError> {
    validate_system(headers, link, workload)?;
    if !(duration_s > 0.0 && duration_s.is_finite()) {
        return Err(SimError::Model(InvalidParameter {
            field: "duration_s",
            reason: format!("streaming duration must be positive and finite (got {duration_s})"),
        }));
    }
    let config = SessionConfig {
        params: SystemParams {
            headers: *headers,
            link: *link,
            workload: *workload,
        },
        mode,
        duration_s,
    };
    let mut engine = Engine::new(config)?;
    engine.run();
    Ok(engine.finish())
}

struct PendingFragment {
    frame_id: u64,
    payload_bytes: u64,
}

struct InflightData {
    ser_start: f64,
    frame_id: u64,
}

struct ClientSide {
    state: ClientState,
    egress_free_at: f64,
    next_seq: u64,
    stream_start: f64,
    stream_end: f64,
}

struct ServerSide {
    state: ServerState,
    egress_free_at: f64,
    next_seq: u64,
    stream_start: f64,
    stream_end: f64,
    pending: VecDeque<PendingFragment>,
    awaiting_ack: Option<u64>,
    inflight: BTreeMap<u64, InflightData>,
    frame_remaining: BTreeMap<u64, u64>,
    frames_generated: u64,
    frames_completed: u64,
}

#[derive(Default)]
struct Counters {
    bytes_sent: u64,
    bytes_delivered: u64,
    control_bytes: u64,
    stream_bytes: u64,
    data_packets_sent: u64,
    data_packets_delivered: u64,
    data_packets_acked: u64,
    payload_bytes_delivered: u64,
    pings_sent: u64,
    pongs_received: u64,
}

struct Engine {
    cfg: SessionConfig,
    /// Propagation delay of the cable, per direction.
    prop_s: f64,
    /// Switch delay plus per-packet processing time, per direction.
    fixed_s: f64,
    /// Usable payload of a full fragment.
    full_payload: u64,
    /// Fragments per VR frame.
    fragments: u64,
    /// Payload carried by the final, possibly partial fragment. Its on-wire
    /// size stays `data_packet_bytes` so every fragment prices identically.
    last_payload: u64,
    queue: EventQueue,
    now: f64,
    client: ClientSide,
    server: ServerSide,
    counters: Counters,
    samples: Vec<f64>,
    close_requested: bool,
}

impl Engine {
    fn new(cfg: SessionConfig) -> Result<Self, SimError> {
        let link = &cfg.params.link;
        let full_payload = max_payload_size(&cfg.params.headers)?;
        let fragments = frames_per_vr_frame(&cfg.params.workload, &cfg.params.headers)?;
        let last_payload = cfg.params.workload.vr_frame_bytes - (fragments - 1) * full_payload;
        Ok(Engine {
            prop_s: link.cable_m / link.prop_mps,
            fixed_s: link.switch_delay_s + link.ppr.recip(),
            full_payload,
            fragments,
            last_payload,
            cfg,
            queue: EventQueue::new(),
            now: 0.0,
            client: ClientSide {
                state: ClientState::Idle,
                egress_free_at: 0.0,
                next_seq: 0,
                stream_start: 0.0,
                stream_end: 0.0,
            },
            server: ServerSide {
                state: ServerState::Listening,
                egress_free_at: 0.0,
                next_seq: 0,
                stream_start: 0.0,
                stream_end: 0.0,
                pending: VecDeque::new(),
                awaiting_ack: None,
                inflight: BTreeMap::new(),
                frame_remaining: BTreeMap::new(),
                frames_generated: 0,
                frames_completed: 0,
            },
            counters: Counters::default(),
            samples: Vec::new(),
            close_requested: false,
        })
    }

    fn run(&mut self) {
        self.client.state = ClientState::ConnectSent;
        self.send_control(Endpoint::Client, MessageKind::SessionRequest);

        loop {
            match self.queue.pop() {
                Some(event) => self.handle(event),
                None => {
                    // All traffic has drained. If the session is still open
                    // the client tears it down, no earlier than the end of
                    // its streaming window.
                    if !self.close_requested && self.client.state == ClientState::Streaming {
                        self.close_requested = true;
                        let at = self.now.max(self.client.stream_end);
                        self.queue.push(at, Action::Timer(TimerKind::InitiateClose));
                    } else {
                        break;
                    }
                }
            }
        }

        assert_eq!(self.client.state, ClientState::Closed, "client did not close");
        assert_eq!(self.server.state, ServerState::Closed, "server did not close");
    }

    fn handle(&mut self, event: SimEvent) {
        debug_assert!(
            event.time >= self.now,
            "event time regressed: {} < {}",
            event.time,
            self.now
        );
        self.now = event.time;
        match event.action {
            Action::Deliver { to, msg } => {
                self.counters.bytes_delivered += msg.size;
                match to {
                    Endpoint::Client => self.client_receive(msg),
                    Endpoint::Server => self.server_receive(msg),
                }
            }
            Action::Timer(TimerKind::GenerateFrame { index }) => self.generate_frame(index),
            Action::Timer(TimerKind::HealthPing { index }) => self.send_health_ping(index),
            Action::Timer(TimerKind::InitiateClose) => self.initiate_close(),
        }
    }

    /// Puts a message on the wire. Each direction serializes one packet at a
    /// time; delivery happens serialization + propagation + fixed delays
    /// later. Returns the assigned sequence number and serialization start.
    fn send(
        &mut self,
        from: Endpoint,
        kind: MessageKind,
        frame_id: Option<u64>,
        ack_of: Option<u64>,
        wire_bytes: u64,
        payload_bytes: u64,
    ) -> (u64, f64) {
        let ser_s = wire_bytes as f64 * 8.0 / self.cfg.params.link.data_rate_bps;
        let now = self.now;
        let (seq, ser_start) = match from {
            Endpoint::Client => {
                let start = now.max(self.client.egress_free_at);
                self.client.egress_free_at = start + ser_s;
                let seq = self.client.next_seq;
                self.client.next_seq += 1;
                (seq, start)
            }
            Endpoint::Server => {
                let start = now.max(self.server.egress_free_at);
                self.server.egress_free_at = start + ser_s;
                let seq = self.server.next_seq;
                self.server.next_seq += 1;
                (seq, start)
            }
        };
        let arrival = ser_start + ser_s + self.prop_s + self.fixed_s;

        self.counters.bytes_sent += wire_bytes;
        if kind.is_control() {
            self.counters.control_bytes += wire_bytes;
        } else {
            self.counters.stream_bytes += wire_bytes;
        }

        let msg = SimMessage {
            kind,
            seq,
            frame_id,
            ack_of,
            size: wire_bytes,
            payload_bytes,
            send_time: ser_start,
        };
        self.queue.push(
            arrival,
            Action::Deliver {
                to: from.peer(),
                msg,
            },
        );
        (seq, ser_start)
    }

    fn send_control(&mut self, from: Endpoint, kind: MessageKind) {
        let size = self.cfg.params.link.ack_packet_bytes;
        self.send(from, kind, None, None, size, 0);
    }

    fn client_receive(&mut self, msg: SimMessage) {
        match msg.kind {
            MessageKind::SessionAccept => {
                assert_eq!(self.client.state, ClientState::ConnectSent, "unexpected accept");
                self.client.state = ClientState::Established;
                self.send_control(Endpoint::Client, MessageKind::SessionConfirm);
                // With the confirm on the wire the client considers the
                // streaming phase open.
                self.client.state = ClientState::Streaming;
                self.client.stream_start = self.now;
                self.client.stream_end = self.now + self.cfg.duration_s;
                let first_ping =
                    self.client.stream_start + self.cfg.params.workload.health_check_s;
                if first_ping < self.client.stream_end {
                    self.queue
                        .push(first_ping, Action::Timer(TimerKind::HealthPing { index: 1 }));
                }
            }
            MessageKind::Data => {
                assert_eq!(self.client.state, ClientState::Streaming, "data outside streaming");
                self.counters.data_packets_delivered += 1;
                self.counters.payload_bytes_delivered += msg.payload_bytes;
                let ack_size = self.cfg.params.link.ack_packet_bytes;
                self.send(
                    Endpoint::Client,
                    MessageKind::Ack,
                    msg.frame_id,
                    Some(msg.seq),
                    ack_size,
                    0,
                );
            }
            MessageKind::HealthPong => {
                assert_eq!(self.client.state, ClientState::Streaming, "pong outside streaming");
                self.counters.pongs_received += 1;
            }
            MessageKind::CloseAck => {
                assert_eq!(self.client.state, ClientState::CloseSent, "unexpected close ack");
                self.client.state = ClientState::Closed;
            }
            other => panic!("client received unexpected message kind {other:?}"),
        }
    }

    fn server_receive(&mut self, msg: SimMessage) {
        match msg.kind {
            MessageKind::SessionRequest => {
                assert_eq!(self.server.state, ServerState::Listening, "unexpected request");
                self.server.state = ServerState::Accepting;
                self.send_control(Endpoint::Server, MessageKind::SessionAccept);
            }
            MessageKind::SessionConfirm => {
                assert_eq!(self.server.state, ServerState::Accepting, "unexpected confirm");
                self.server.state = ServerState::Established;
                self.server.stream_start = self.now;
                self.server.stream_end = self.now + self.cfg.duration_s;
                self.queue
                    .push(self.now, Action::Timer(TimerKind::GenerateFrame { index: 0 }));
            }
            MessageKind::Ack => self.server_handle_ack(msg),
            MessageKind::HealthPing => {
                assert_eq!(self.server.state, ServerState::Streaming, "ping outside streaming");
                self.send_control(Endpoint::Server, MessageKind::HealthPong);
            }
            MessageKind::SessionClose => {
                assert_eq!(self.server.state, ServerState::Streaming, "unexpected close");
                self.server.state = ServerState::Closed;
                self.send_control(Endpoint::Server, MessageKind::CloseAck);
            }
            other => panic!("server received unexpected message kind {other:?}"),
        }
    }

    fn server_handle_ack(&mut self, msg: SimMessage) {
        let data_seq = msg.ack_of.expect("ack without a data sequence reference");
        let info = self
            .server
            .inflight
            .remove(&data_seq)
            .expect("ack for a packet that is not in flight");
        self.samples.push(self.now - info.ser_start);
        self.counters.data_packets_acked += 1;

        let remaining = self
            .server
            .frame_remaining
            .get_mut(&info.frame_id)
            .expect("ack for an unknown frame");
        *remaining -= 1;
        if *remaining == 0 {
            self.server.frame_remaining.remove(&info.frame_id);
            self.server.frames_completed += 1;
        }

        if self.cfg.mode == StreamingMode::StopAndWait {
            debug_assert_eq!(self.server.awaiting_ack, Some(data_seq));
            self.server.awaiting_ack = None;
            if self.now < self.server.stream_end {
                self.try_send_next_pending();
            } else {
                // Streaming window over: drop the backlog and let the
                // in-flight tail drain.
                self.server.pending.clear();
            }
        }
    }

    fn generate_frame(&mut self, index: u64) {
        if self.server.state == ServerState::Established {
            self.server.state = ServerState::Streaming;
        }
        assert_eq!(self.server.state, ServerState::Streaming, "frame outside streaming");
        self.server.frames_generated += 1;
        self.server.frame_remaining.insert(index, self.fragments);

        for fragment in 0..self.fragments {
            let payload = if fragment + 1 == self.fragments {
                self.last_payload
            } else {
                self.full_payload
            };
            match self.cfg.mode {
                StreamingMode::Pipelined => {
                    self.send_data_packet(index, payload);
                }
                StreamingMode::StopAndWait => {
                    self.server.pending.push_back(PendingFragment {
                        frame_id: index,
                        payload_bytes: payload,
                    });
                }
            }
        }
        if self.cfg.mode == StreamingMode::StopAndWait && self.server.awaiting_ack.is_none() {
            self.try_send_next_pending();
        }

        let next = index + 1;
        let at = self.server.stream_start + next as f64 / self.cfg.params.workload.fps;
        if at < self.server.stream_end {
            self.queue
                .push(at, Action::Timer(TimerKind::GenerateFrame { index: next }));
        }
    }

    fn send_data_packet(&mut self, frame_id: u64, payload_bytes: u64) -> u64 {
        let wire = self.cfg.params.link.data_packet_bytes;
        let (seq, ser_start) = self.send(
            Endpoint::Server,
            MessageKind::Data,
            Some(frame_id),
            None,
            wire,
            payload_bytes,
        );
        self.server.inflight.insert(seq, InflightData { ser_start, frame_id });
        self.counters.data_packets_sent += 1;
        seq
    }

    fn try_send_next_pending(&mut self) {
        debug_assert!(self.server.awaiting_ack.is_none());
        if let Some(fragment) = self.server.pending.pop_front() {
            let seq = self.send_data_packet(fragment.frame_id, fragment.payload_bytes);
            self.server.awaiting_ack = Some(seq);
        }
    }

    fn send_health_ping(&mut self, index: u64) {
        debug_assert_eq!(self.client.state, ClientState::Streaming);
        self.send_control(Endpoint::Client, MessageKind::HealthPing);
        self.counters.pings_sent += 1;

        let next = index + 1;
        let at = self.client.stream_start + next as f64 * self.cfg.params.workload.health_check_s;
        if at < self.client.stream_end {
            self.queue
                .push(at, Action::Timer(TimerKind::HealthPing { index: next }));
        }
    }

    fn initiate_close(&mut self) {
        assert_eq!(self.client.state, ClientState::Streaming, "close from wrong state");
        self.client.state = ClientState::CloseSent;
        self.send_control(Endpoint::Client, MessageKind::SessionClose);
    }

    fn finish(self) -> SimStats {
        debug_assert_eq!(self.counters.bytes_sent, self.counters.bytes_delivered);
        let duration = self.cfg.duration_s;
        SimStats {
            config: self.cfg,
            goodput_bps: self.counters.payload_bytes_delivered as f64 * 8.0 / duration,
            control_bytes: self.counters.control_bytes,
            stream_bytes: self.counters.stream_bytes,
            total_bytes: self.counters.bytes_sent,
            bytes_sent: self.counters.bytes_sent,
            bytes_delivered: self.counters.bytes_delivered,
            data_packets_sent: self.counters.data_packets_sent,
            data_packets_delivered: self.counters.data_packets_delivered,
            data_packets_acked: self.counters.data_packets_acked,
            health_pings_sent: self.counters.pings_sent,
            health_pongs_received: self.counters.pongs_received,
            vr_frames_generated: self.server.frames_generated,
            vr_frames_completed: self.server.frames_completed,
            achieved_fps: self.server.frames_completed as f64 / duration,
            streaming_duration_s: duration,
            session_duration_s: self.now,
            latency_samples_s: self.samples,
        }
    }
}
