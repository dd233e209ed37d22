//! Constant-bit-rate on/off traffic: each user subscribes to one content
//! stream and receives its frames in order, pausing periodically.
//!
//! Every content has a single global frame clock: frame `s` is generated at
//! wall time `s * delta` with `delta = frame_bits / rate`. A flow starting
//! at offset `tau` picks up the stream live — from the frame being generated
//! at `tau` — and then delivers consecutive frames at full rate for `on_s`
//! seconds, pauses `off_s`, and repeats. Flows of one content therefore
//! carry identical `(content, seq)` streams shifted in time, which is what
//! makes overheard multicast frames reusable later.

use crate::queueing::Frame;
use crate::rng::{substream, stream};
use rand::Rng;

/// One user's subscription: content, rate, and phase.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSpec {
    pub user: usize,
    pub content: u8,
    pub rate_bps: f64,
    /// Wall time the flow starts delivering, seconds.
    pub start_offset_s: f64,
    pub on_s: f64,
    pub off_s: f64,
    pub frame_bits: u64,
    /// Global sequence number of the first delivered frame.
    pub start_seq: u64,
}

impl FlowSpec {
    pub fn new(
        user: usize,
        content: u8,
        rate_bps: f64,
        start_offset_s: f64,
        frame_bits: u64,
    ) -> Self {
        let delta = frame_bits as f64 / rate_bps;
        Self {
            user,
            content,
            rate_bps,
            start_offset_s,
            on_s: 2.0,
            off_s: 1.0,
            frame_bits,
            start_seq: (start_offset_s / delta).floor() as u64,
        }
    }

    /// Seconds between frames while the flow is on.
    pub fn interarrival_s(&self) -> f64 {
        self.frame_bits as f64 / self.rate_bps
    }

    /// Arrival time of the flow's `j`-th delivered frame: on-time `j*delta`
    /// stretched by one pause per completed on-phase.
    pub fn arrival_time_s(&self, j: u64) -> f64 {
        let d = j as f64 * self.interarrival_s();
        let cycles = (d / self.on_s).floor();
        self.start_offset_s + (self.on_s + self.off_s) * cycles + (d - self.on_s * cycles)
    }

    pub fn seq(&self, j: u64) -> u64 {
        self.start_seq + j
    }
}

/// Draws K subscriptions: content uniform over the catalog, start offset
/// uniform in [0, 0.5) s. Each user has its own random substream, so one
/// user's draw never depends on K.
pub fn assign_flows(
    k_users: usize,
    n_contents: u8,
    rate_bps: f64,
    frame_bits: u64,
    master_seed: u64,
) -> Vec<FlowSpec> {
    (0..k_users)
        .map(|user| {
            let mut rng = substream(master_seed, &[stream::TRAFFIC, user as u64]);
            let content = rng.random_range(0..n_contents);
            let offset = rng.random_range(0.0..0.5);
            FlowSpec::new(user, content, rate_bps, offset, frame_bits)
        })
        .collect()
}

/// Frames of `flow` arriving in the half-open window `(t0, t1]`, in order.
pub fn arrivals_in(flow: &FlowSpec, t0: f64, t1: f64) -> Vec<Frame> {
    let mut out = Vec::new();
    if t1 < flow.start_offset_s {
        return out;
    }
    // Invert the schedule approximately, then walk forward. The approximate
    // index is a couple of frames early at worst, never late.
    let period = flow.on_s + flow.off_s;
    let u = (t0 - flow.start_offset_s).max(0.0);
    let cycles = (u / period).floor();
    let within = u - period * cycles;
    let on_time = flow.on_s * cycles + within.min(flow.on_s);
    let mut j = ((on_time / flow.interarrival_s()).floor() as u64).saturating_sub(2);
    while flow.arrival_time_s(j) <= t0 {
        j += 1;
    }
    loop {
        let at = flow.arrival_time_s(j);
        if at > t1 {
            break;
        }
        out.push(Frame {
            content: flow.content,
            seq: flow.seq(j),
            size_bits: flow.frame_bits,
            arrival_s: at,
            retx_count: 0,
        });
        j += 1;
    }
    out
}
