//! Message vocabulary of the simulated session protocol.

/// Kind of a simulated message. The session runs three phases: a three-way
/// establishment, streaming (fragmented video with per-packet acks and a
/// periodic liveness exchange), and a two-way close.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageKind {
    SessionRequest,
    SessionAccept,
    SessionConfirm,
    Data,
    Ack,
    HealthPing,
    HealthPong,
    SessionClose,
    CloseAck,
}

impl MessageKind {
    /// Control-plane messages: establishment, health checks and teardown.
    /// Acks of data packets belong to the stream, not the control plane.
    pub fn is_control(self) -> bool {
        !matches!(self, MessageKind::Data | MessageKind::Ack)
    }
}

/// One message in flight between the client and the server.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimMessage {
    pub kind: MessageKind,
    /// Per-sender sequence number, strictly increasing.
    pub seq: u64,
    /// VR frame this data packet (or its ack) belongs to.
    pub frame_id: Option<u64>,
    /// For acks: sequence number of the data packet being acknowledged.
    pub ack_of: Option<u64>,
    /// On-wire size in bytes.
    pub size: u64,
    /// Application payload bytes carried (data packets only).
    pub payload_bytes: u64,
    /// Time the first bit hit the wire.
    pub send_time: f64,
}
