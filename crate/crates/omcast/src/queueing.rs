//! Per-user AP queues, head-of-line (HOL) delay registers, and user-side
//! caches of opportunistically received frames.
//!
//! Registers evolve in milliseconds through four pure operators applied once
//! per slot, in order:
//!
//! ```text
//! psi   = min(M, Z)        if served, else -eps*T      (service reduction)
//! Ztil  = max(0, Z - psi)                              (post-service HOL)
//! phi   = min(M', Ztil)    if dropped, else 0          (drop reduction)
//! Z'    = max(0, Ztil - phi)                           (next-slot HOL)
//! Q'    = max(0, Q - b - d) + A                        (queue length, bits)
//! ```
//!
//! `M` is the arrival gap in ms spanned by the removed head frames (the gap
//! from the old HOL frame to the first survivor), or the current register
//! value when the removal empties the queue. An unserved user simply ages by
//! `eps*T`, the slot duration expressed in ms.

use std::collections::{HashSet, VecDeque};

/// One fixed-size data frame of a content stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub content: u8,
    pub seq: u64,
    pub size_bits: u64,
    /// Arrival time at the AP queue, seconds.
    pub arrival_s: f64,
    /// Transmission attempts that ended in error so far.
    pub retx_count: u8,
}

/// FIFO queue of one user's pending frames plus its delay registers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UserQueue {
    frames: VecDeque<Frame>,
    /// Total queued bits; always equals the sum of frame sizes.
    pub q_bits: u64,
    /// HOL delay register Z in ms, measured at the current slot start.
    pub z_ms: f64,
    /// Post-service register Ztilde of the previous slot, kept for metrics.
    pub z_tilde_ms: f64,
}

impl UserQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn hol(&self) -> Option<&Frame> {
        self.frames.front()
    }

    pub fn frame(&self, idx: usize) -> &Frame {
        &self.frames[idx]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Frame> {
        self.frames.iter()
    }

    /// Appends a frame; sequence numbers of one user arrive in order.
    pub fn push_back(&mut self, f: Frame) {
        debug_assert!(
            self.frames.back().map_or(true, |b| b.seq < f.seq),
            "arrivals must be in sequence order"
        );
        self.q_bits += f.size_bits;
        self.frames.push_back(f);
    }

    /// Removes and returns the frame at `idx`.
    pub fn remove(&mut self, idx: usize) -> Frame {
        let f = self.frames.remove(idx).expect("index in range");
        self.q_bits -= f.size_bits;
        f
    }

    /// Increments the retransmission counter of the frame at `idx` and
    /// returns the new count.
    pub fn bump_retx(&mut self, idx: usize) -> u8 {
        let f = &mut self.frames[idx];
        f.retx_count += 1;
        f.retx_count
    }

    /// True when a frame with this sequence number is queued.
    pub fn contains_seq(&self, seq: u64) -> bool {
        // Sequence numbers are strictly increasing front to back.
        self.frames
            .binary_search_by(|f| f.seq.cmp(&seq))
            .is_ok()
    }

    /// HOL delay in ms measured at `now_s`; 0 for an empty queue.
    pub fn hol_delay_ms(&self, now_s: f64) -> f64 {
        self.hol().map_or(0.0, |f| (now_s - f.arrival_s) * 1000.0)
    }
}

/// Outcome of presenting an arriving frame to the AP queue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnqueueOutcome {
    Queued,
    /// The user already holds this frame in its cache; the AP discards the
    /// arrival and the frame counts as served.
    CacheServed,
}

/// User-side cache of frames received while listed as an unintended group
/// member. Occupancy is in frames; `peak` tracks the high-water mark.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UserCache {
    set: HashSet<(u8, u64)>,
    pub peak: usize,
}

impl UserCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn occupancy(&self) -> usize {
        self.set.len()
    }

    pub fn contains(&self, content: u8, seq: u64) -> bool {
        self.set.contains(&(content, seq))
    }
}

/// Inserts a frame id into the cache; idempotent, and peak occupancy never
/// decreases.
pub fn cache_insert(cache: &mut UserCache, content: u8, seq: u64) {
    cache.set.insert((content, seq));
    cache.peak = cache.peak.max(cache.set.len());
}

/// Everything the AP tracks per user.
#[derive(Debug, Clone, PartialEq)]
pub struct UserState {
    pub user: usize,
    /// Content stream this user subscribes to.
    pub content: u8,
    /// Average SNR in dB (large-scale, fixed for the session).
    pub snr_db: f64,
    pub queue: UserQueue,
    pub cache: UserCache,
    /// Next sequence number this user's flow will present to the AP.
    /// Frames at or beyond it are the user's future.
    pub next_expected_seq: u64,
}

impl UserState {
    pub fn new(user: usize, content: u8, snr_db: f64, start_seq: u64) -> Self {
        Self {
            user,
            content,
            snr_db,
            queue: UserQueue::new(),
            cache: UserCache::new(),
            next_expected_seq: start_seq,
        }
    }

    /// True when this user still wants the frame: right content, not cached,
    /// and either waiting in its AP queue or not yet arrived from the source.
    /// Frames the user has already consumed past are stale.
    pub fn needs(&self, content: u8, seq: u64) -> bool {
        content == self.content
            && !self.cache.contains(content, seq)
            && (seq >= self.next_expected_seq || self.queue.contains_seq(seq))
    }
}

/// Presents an arriving frame to the user's AP queue. Cache hits are
/// discarded (the user already holds the data); the flow position advances
/// either way.
pub fn enqueue(state: &mut UserState, frame: Frame) -> EnqueueOutcome {
    state.next_expected_seq = state.next_expected_seq.max(frame.seq + 1);
    if state.cache.contains(frame.content, frame.seq) {
        EnqueueOutcome::CacheServed
    } else {
        state.queue.push_back(frame);
        EnqueueOutcome::Queued
    }
}

// ---------------------------------------------------------------------------
// Pure register operators.
// ---------------------------------------------------------------------------

/// Queue-length recursion in bits: `max(0, q - b - d) + a`. Arrivals of the
/// current slot are added after service.
pub fn update_queue_length(q: u64, b: u64, d: u64, a: u64) -> u64 {
    q.saturating_sub(b).saturating_sub(d) + a
}

/// Service reduction of the HOL register, ms. A served user gives up the
/// spanned arrival gap `m_ms` (clamped by `z_ms`); an unserved user ages by
/// the slot duration, entering as a negative reduction.
pub fn psi(served: bool, m_ms: f64, z_ms: f64, slot_s: f64, epsilon: f64) -> f64 {
    if served {
        m_ms.min(z_ms)
    } else {
        -(epsilon * slot_s)
    }
}

/// Post-service HOL register: `max(0, z - psi)`.
pub fn update_intermediate_hol(z_ms: f64, psi_ms: f64) -> f64 {
    (z_ms - psi_ms).max(0.0)
}

/// Drop reduction of the post-service register, ms.
pub fn phi(dropped: bool, m_ms: f64, z_tilde_ms: f64) -> f64 {
    if dropped {
        m_ms.min(z_tilde_ms)
    } else {
        0.0
    }
}

/// Next-slot HOL register: `max(0, z_tilde - phi)`.
pub fn update_hol(z_tilde_ms: f64, phi_ms: f64) -> f64 {
    (z_tilde_ms - phi_ms).max(0.0)
}

/// Smallest whole-frame head prefix whose removal pulls the HOL arrival
/// forward by strictly more than `threshold_ms` (the per-slot aging bound),
/// together with its bit count. Falls back to the whole queue when no
/// interior boundary reaches the threshold; `None` on an empty queue.
pub fn drop_quantum(queue: &UserQueue, threshold_ms: f64) -> Option<(usize, u64)> {
    let hol = queue.hol()?;
    let mut bits = 0u64;
    for j in 0..queue.len() {
        bits += queue.frame(j).size_bits;
        if let Some(next) = (j + 1 < queue.len()).then(|| queue.frame(j + 1)) {
            let gap_ms = (next.arrival_s - hol.arrival_s) * 1000.0;
            if gap_ms > threshold_ms {
                return Some((j + 1, bits));
            }
        }
    }
    Some((queue.len(), bits))
}
