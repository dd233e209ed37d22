//! MAC-layer slot transaction: sounding/feedback overhead accounting, TXOP
//! burst packing, per-member reception outcomes, and retransmission
//! bookkeeping.
//!
//! A downlink slot runs: NDPA, NDP, CSI feedback from every group member
//! (polled one by one), the data burst (one copy on air, multicast), one ACK
//! exchange per member, then DIFS and the mean backoff. Data airtime is
//! capped by the TXOP limit; frames are never fragmented.

use crate::phy::{
    select_mcs, user_rate, ChannelMatrix, McsTable, NoiseModel, Precoder,
    multicast_precoder,
};
use crate::queueing::{cache_insert, Frame, UserState};

/// Per-exchange durations in microseconds plus the mean backoff, composing
/// the realized slot time.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingModel {
    pub ndpa_us: f64,
    pub ndp_us: f64,
    pub csi_fb_us_per_user: f64,
    pub csi_poll_us: f64,
    pub data_preamble_us: f64,
    pub ack_us_per_user: f64,
    pub ack_req_us: f64,
    pub sifs_us: f64,
    pub difs_us: f64,
    pub backoff_slot_us: f64,
    pub backoff_slots_mean: f64,
}

impl Default for TimingModel {
    fn default() -> Self {
        Self {
            ndpa_us: 68.0,
            ndp_us: 48.0,
            csi_fb_us_per_user: 120.0,
            csi_poll_us: 44.0,
            data_preamble_us: 40.0,
            ack_us_per_user: 32.0,
            ack_req_us: 28.0,
            sifs_us: 16.0,
            difs_us: 34.0,
            backoff_slot_us: 9.0,
            backoff_slots_mean: 7.5,
        }
    }
}

impl TimingModel {
    pub fn validate(&self) -> Result<(), MacError> {
        let fields = [
            self.ndpa_us,
            self.ndp_us,
            self.csi_fb_us_per_user,
            self.csi_poll_us,
            self.data_preamble_us,
            self.ack_us_per_user,
            self.ack_req_us,
            self.sifs_us,
            self.difs_us,
            self.backoff_slot_us,
            self.backoff_slots_mean,
        ];
        if fields.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(MacError::InvalidTiming);
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MacError {
    #[error("timing model fields must be finite and non-negative")]
    InvalidTiming,
    #[error("group size must be between 1 and 4, got {0}")]
    BadGroupSize(usize),
}

/// Fixed per-slot overhead (everything except data airtime), seconds.
pub fn overhead_s(group_size: usize, timing: &TimingModel) -> f64 {
    let g = group_size as f64;
    let us = timing.ndpa_us
        + timing.sifs_us
        + timing.ndp_us
        + timing.sifs_us
        + timing.csi_fb_us_per_user
        + (g - 1.0) * (timing.csi_poll_us + timing.sifs_us + timing.csi_fb_us_per_user)
        + timing.data_preamble_us
        + g * (timing.sifs_us + timing.ack_us_per_user)
        + (g - 1.0) * timing.ack_req_us
        + timing.difs_us
        + timing.backoff_slots_mean * timing.backoff_slot_us;
    us * 1e-6
}

/// Total slot duration: overhead plus data airtime, seconds.
pub fn slot_duration(
    group_size: usize,
    burst_bits: u64,
    phy_rate_bps: f64,
    timing: &TimingModel,
) -> f64 {
    overhead_s(group_size, timing) + burst_bits as f64 / phy_rate_bps
}

/// Largest whole-frame count whose airtime fits the TXOP budget.
pub fn max_whole_frames(t_max_s: f64, rate_bps: f64, frame_bits: u64) -> usize {
    if rate_bps <= 0.0 || frame_bits == 0 {
        return 0;
    }
    (t_max_s * rate_bps / frame_bits as f64).floor() as usize
}

/// A planned burst for one slot: which head frames the owner's queue sheds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BurstPlan {
    /// Frames the owner already holds in its cache; removed without airtime.
    pub purge_seqs: Vec<u64>,
    /// Frames actually put on air, in queue order.
    pub transmit_seqs: Vec<u64>,
    /// Bits on air (one multicast copy).
    pub airtime_bits: u64,
    /// Useful bits served across the group: each frame counts once per
    /// member that still needs it.
    pub served_bits: u64,
    pub airtime_s: f64,
}

/// Plans the burst for `owner` at `rate_bps`: purges owner-cached frames,
/// then takes the maximal remaining head prefix whose airtime fits
/// `t_max_s`. With `retx_only`, only frames already marked for
/// retransmission are eligible to transmit.
pub fn pack_burst(
    owner: &UserState,
    group: &[&UserState],
    rate_bps: f64,
    t_max_s: f64,
    retx_only: bool,
) -> BurstPlan {
    let mut plan = BurstPlan::default();
    let mut full = false;
    for f in owner.queue.iter() {
        if owner.cache.contains(f.content, f.seq) {
            plan.purge_seqs.push(f.seq);
            continue;
        }
        if full || (retx_only && f.retx_count == 0) {
            full = true;
            continue;
        }
        let bits = plan.airtime_bits + f.size_bits;
        if rate_bps <= 0.0 || bits as f64 / rate_bps > t_max_s {
            full = true;
            continue;
        }
        plan.airtime_bits = bits;
        plan.transmit_seqs.push(f.seq);
        let mut copies = 0u64;
        for u in group {
            if u.user == owner.user || u.needs(f.content, f.seq) {
                copies += 1;
            }
        }
        plan.served_bits += f.size_bits * copies;
    }
    plan.airtime_s = if rate_bps > 0.0 {
        plan.airtime_bits as f64 / rate_bps
    } else {
        0.0
    };
    plan
}

/// Link parameters the group can sustain under the given channel draws.
#[derive(Debug, Clone)]
pub struct LinkPlan {
    pub mcs: u8,
    pub rate_bps: f64,
    pub precoder: Precoder,
    /// Per-member achievable spectral efficiency, aligned with the group.
    pub member_rates: Vec<f64>,
}

/// Builds the shared precoder for the group and selects the highest MCS
/// every member can decode. `None` when some member cannot sustain even the
/// lowest entry or the channels are degenerate.
pub fn group_link(
    channels: &[ChannelMatrix],
    group: &[usize],
    noise: &NoiseModel,
    table: &McsTable,
) -> Option<LinkPlan> {
    let members: Vec<&ChannelMatrix> = group.iter().map(|&u| &channels[u]).collect();
    let precoder = multicast_precoder(&members).ok()?;
    let member_rates: Vec<f64> = members
        .iter()
        .map(|h| user_rate(h, &precoder, noise))
        .collect();
    let mcs = select_mcs(&member_rates, table)?;
    Some(LinkPlan {
        mcs,
        rate_bps: table.rate_bps(mcs),
        precoder,
        member_rates,
    })
}

/// How a frame left an AP queue during a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Removal {
    /// ACKed by the intended user.
    Delivered,
    /// The user already held the payload in its cache.
    CacheServed,
    /// Dropped after exhausting retransmission attempts.
    Lost,
}

/// Everything a slot transaction did, for metric accounting.
#[derive(Debug, Clone, Default)]
pub struct SlotOutcome {
    pub duration_s: f64,
    pub airtime_s: f64,
    pub intended: Option<usize>,
    pub group: Vec<usize>,
    pub mcs: Option<u8>,
    /// Queue removals: (user, frame, class).
    pub removals: Vec<(usize, Frame, Removal)>,
    /// Cache fills at unintended members: (user, content, seq).
    pub cached: Vec<(usize, u8, u64)>,
    /// Useful bits served toward the intended user's group.
    pub served_bits: u64,
    /// Intended user's reception failed this slot.
    pub intended_errored: bool,
}

/// Immutable context shared by every slot transaction of a session.
pub struct TransactCtx<'a> {
    pub timing: &'a TimingModel,
    pub table: &'a McsTable,
    pub noise: &'a NoiseModel,
    pub t_max_s: f64,
    /// Failed attempts beyond which a frame is abandoned.
    pub retx_limit: u8,
    /// Channel draws at the transmit phase, indexed by user; `None` disables
    /// reception errors entirely.
    pub tx_channels: Option<&'a [ChannelMatrix]>,
}

fn reception_ok(
    ctx: &TransactCtx,
    user: usize,
    precoder: &Precoder,
    required_eff: f64,
) -> bool {
    match ctx.tx_channels {
        None => true,
        Some(chans) => user_rate(&chans[user], precoder, ctx.noise) >= required_eff,
    }
}

/// Executes one service slot: re-sounds the group (fresh `channels`),
/// reselects the MCS, packs and transmits the burst, applies per-member
/// reception outcomes, and updates queues, caches, and retransmission
/// counters. Returns the realized slot duration and all removals.
pub fn transact(
    states: &mut [UserState],
    intended: usize,
    group: &[usize],
    retx_only: bool,
    channels: &[ChannelMatrix],
    ctx: &TransactCtx,
) -> SlotOutcome {
    debug_assert!(group.contains(&intended));
    let mut out = SlotOutcome {
        intended: Some(intended),
        group: group.to_vec(),
        ..SlotOutcome::default()
    };

    let link = group_link(channels, group, ctx.noise, ctx.table);
    let Some(link) = link else {
        // No sustainable rate: the sounding exchange still happened, but no
        // data goes on air this slot.
        out.duration_s = overhead_s(group.len(), ctx.timing);
        return out;
    };
    out.mcs = Some(link.mcs);

    let plan = {
        let owner = &states[intended];
        let members: Vec<&UserState> = group.iter().map(|&u| &states[u]).collect();
        pack_burst(owner, &members, link.rate_bps, ctx.t_max_s, retx_only)
    };
    out.airtime_s = plan.airtime_s;
    out.served_bits = plan.served_bits;
    out.duration_s = slot_duration(group.len(), plan.airtime_bits, link.rate_bps, ctx.timing);

    // Owner-cached frames leave the queue without touching the air.
    for &seq in &plan.purge_seqs {
        let idx = position_of(&states[intended], seq);
        let f = states[intended].queue.remove(idx);
        out.removals.push((intended, f, Removal::CacheServed));
    }

    if plan.transmit_seqs.is_empty() {
        return out;
    }

    let required_eff = ctx.table.entry(link.mcs).required_eff;
    let intended_ok = reception_ok(ctx, intended, &link.precoder, required_eff);
    out.intended_errored = !intended_ok;

    // Intended user: deliver on success; otherwise count the attempt and
    // abandon frames past the retry budget.
    for &seq in &plan.transmit_seqs {
        let idx = position_of(&states[intended], seq);
        if intended_ok {
            let f = states[intended].queue.remove(idx);
            out.removals.push((intended, f, Removal::Delivered));
        } else if states[intended].queue.bump_retx(idx) > ctx.retx_limit {
            let f = states[intended].queue.remove(idx);
            out.removals.push((intended, f, Removal::Lost));
        }
    }

    // Unintended members overhear the burst and cache what they still need;
    // their reception errors are final (no retransmission for them).
    for &u in group {
        if u == intended {
            continue;
        }
        if !reception_ok(ctx, u, &link.precoder, required_eff) {
            continue;
        }
        let content = states[intended].content;
        for &seq in &plan.transmit_seqs {
            if states[u].needs(content, seq) {
                cache_insert(&mut states[u].cache, content, seq);
                out.cached.push((u, content, seq));
            }
        }
    }

    out
}

fn position_of(state: &UserState, seq: u64) -> usize {
    state
        .queue
        .iter()
        .position(|f| f.seq == seq)
        .expect("planned frame still queued")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::PhyConfig;
    use crate::queueing::enqueue;
    use num_complex::Complex64;

    fn timing() -> TimingModel {
        TimingModel::default()
    }

    #[test]
    fn overhead_matches_hand_sum_for_single_user() {
        // 68+16+48+16+120+40+(16+32)+34+7.5*9 = 457.5 us.
        let t = overhead_s(1, &timing());
        assert!((t - 457.5e-6).abs() < 1e-12);
    }

    #[test]
    fn group_of_four_adds_three_poll_feedback_and_ack_rounds() {
        // 3*(44+16+120) + 3*(16+32) + 3*28 = 768 us.
        let t = timing();
        let diff = slot_duration(4, 40_000, 65e6, &t) - slot_duration(1, 40_000, 65e6, &t);
        assert!((diff - 768e-6).abs() < 1e-12);
    }

    #[test]
    fn data_airtime_is_bits_over_rate() {
        let t = timing();
        let airtime = slot_duration(2, 65_000, 65e6, &t) - overhead_s(2, &t);
        assert!((airtime - 1.0e-3).abs() < 1e-15);
    }

    #[test]
    fn overhead_increases_with_group_size() {
        let t = timing();
        for g in 1..4 {
            assert!(overhead_s(g + 1, &t) > overhead_s(g, &t));
        }
    }

    #[test]
    fn max_whole_frames_matches_hand_values() {
        assert_eq!(max_whole_frames(3e-3, 65e6, 8000), 24);
        assert_eq!(max_whole_frames(3e-3, 6.5e6, 8000), 2);
        assert_eq!(max_whole_frames(3e-3, 0.0, 8000), 0);
    }

    fn frame(seq: u64, arrival_s: f64) -> Frame {
        Frame { content: 0, seq, size_bits: 8000, arrival_s, retx_count: 0 }
    }

    fn loaded_user(user: usize, n: usize) -> UserState {
        let mut st = UserState::new(user, 0, 30.0, 0);
        for j in 0..n {
            enqueue(&mut st, frame(j as u64, 0.008 * j as f64));
        }
        st
    }

    #[test]
    fn pack_fills_txop_at_top_rate() {
        let owner = loaded_user(0, 30);
        let plan = pack_burst(&owner, &[&owner], 65e6, 3e-3, false);
        assert_eq!(plan.transmit_seqs.len(), 24);
        assert_eq!(plan.airtime_bits, 24 * 8000);
        assert_eq!(plan.served_bits, 24 * 8000);
        assert!(plan.airtime_s <= 3e-3);
    }

    #[test]
    fn pack_fits_two_frames_at_bottom_rate() {
        let owner = loaded_user(0, 30);
        let plan = pack_burst(&owner, &[&owner], 6.5e6, 3e-3, false);
        assert_eq!(plan.transmit_seqs, vec![0, 1]);
    }

    #[test]
    fn pack_of_empty_queue_is_empty() {
        let owner = UserState::new(0, 0, 30.0, 0);
        let plan = pack_burst(&owner, &[&owner], 65e6, 3e-3, false);
        assert!(plan.transmit_seqs.is_empty());
        assert_eq!(plan.served_bits, 0);
    }

    #[test]
    fn pack_purges_owner_cached_frames_without_airtime() {
        let mut owner = loaded_user(0, 5);
        cache_insert(&mut owner.cache, 0, 1);
        cache_insert(&mut owner.cache, 0, 3);
        let plan = pack_burst(&owner, &[&owner], 65e6, 3e-3, false);
        assert_eq!(plan.purge_seqs, vec![1, 3]);
        assert_eq!(plan.transmit_seqs, vec![0, 2, 4]);
        assert_eq!(plan.airtime_bits, 3 * 8000);
    }

    #[test]
    fn served_bits_count_each_needing_member() {
        let owner = loaded_user(0, 10);
        // Same content, behind the owner: needs every burst frame.
        let all_needing = loaded_user(1, 10);
        // Same content but already past these frames.
        let mut done = UserState::new(2, 0, 30.0, 100);
        done.next_expected_seq = 100;
        let plan = pack_burst(&owner, &[&owner, &all_needing, &done], 65e6, 3e-3, false);
        assert_eq!(plan.transmit_seqs.len(), 10);
        assert_eq!(plan.airtime_bits, 10 * 8000);
        assert_eq!(plan.served_bits, 2 * 10 * 8000);
    }

    #[test]
    fn retx_only_pack_stops_at_first_fresh_frame() {
        let mut owner = loaded_user(0, 5);
        owner.queue.bump_retx(0);
        owner.queue.bump_retx(1);
        let plan = pack_burst(&owner, &[&owner], 65e6, 3e-3, true);
        assert_eq!(plan.transmit_seqs, vec![0, 1]);
    }

    /// Flat channel `scale * e_axis` on every subcarrier.
    fn flat_channel(user: usize, axis: usize, scale: f64, cfg: &PhyConfig) -> ChannelMatrix {
        let mut data = vec![Complex64::new(0.0, 0.0); cfg.n_subcarriers * cfg.n_tx];
        for sc in 0..cfg.n_subcarriers {
            data[sc * cfg.n_tx + axis] = Complex64::new(scale, 0.0);
        }
        ChannelMatrix::from_data(user, 0, cfg.n_subcarriers, cfg.n_rx, cfg.n_tx, data)
            .expect("consistent dimensions")
    }

    fn ctx<'a>(
        timing: &'a TimingModel,
        table: &'a McsTable,
        noise: &'a NoiseModel,
        tx: Option<&'a [ChannelMatrix]>,
    ) -> TransactCtx<'a> {
        TransactCtx { timing, table, noise, t_max_s: 3e-3, retx_limit: 3, tx_channels: tx }
    }

    #[test]
    fn error_free_transact_delivers_burst_and_fills_caches() {
        let cfg = PhyConfig::default();
        let table = McsTable::default_20mhz();
        let noise = NoiseModel::default();
        let t = timing();
        // strength 10 => gain 100 => log2(101) ~ 6.66 b/s/Hz => top MCS.
        let channels = vec![
            flat_channel(0, 0, 10.0, &cfg),
            flat_channel(1, 0, 10.0, &cfg),
        ];
        let mut states = vec![loaded_user(0, 30), loaded_user(1, 30)];
        let c = ctx(&t, &table, &noise, None);
        let out = transact(&mut states, 0, &[0, 1], false, &channels, &c);

        assert_eq!(out.mcs, Some(7));
        assert!(!out.intended_errored);
        let delivered: Vec<u64> = out
            .removals
            .iter()
            .filter(|(u, _, r)| *u == 0 && *r == Removal::Delivered)
            .map(|(_, f, _)| f.seq)
            .collect();
        assert_eq!(delivered, (0..24).collect::<Vec<_>>());
        assert_eq!(states[0].queue.len(), 6);
        // The unintended member cached every burst frame it still needed.
        assert_eq!(out.cached.len(), 24);
        assert_eq!(states[1].cache.occupancy(), 24);
        // Its own queue is untouched until its own service slot.
        assert_eq!(states[1].queue.len(), 30);
    }

    #[test]
    fn transact_purges_owner_cached_frames_as_cache_served() {
        let cfg = PhyConfig::default();
        let table = McsTable::default_20mhz();
        let noise = NoiseModel::default();
        let t = timing();
        let channels = vec![flat_channel(0, 0, 10.0, &cfg)];
        let mut states = vec![loaded_user(0, 4)];
        cache_insert(&mut states[0].cache, 0, 0);
        cache_insert(&mut states[0].cache, 0, 2);
        let c = ctx(&t, &table, &noise, None);
        let out = transact(&mut states, 0, &[0], false, &channels, &c);
        let purged: Vec<u64> = out
            .removals
            .iter()
            .filter(|(_, _, r)| *r == Removal::CacheServed)
            .map(|(_, f, _)| f.seq)
            .collect();
        assert_eq!(purged, vec![0, 2]);
        assert!(states[0].queue.is_empty());
    }

    #[test]
    fn intended_error_marks_frames_and_exhaustion_loses_them() {
        let cfg = PhyConfig::default();
        let table = McsTable::default_20mhz();
        let noise = NoiseModel::default();
        let t = timing();
        let channels = vec![flat_channel(0, 0, 10.0, &cfg)];
        // Transmit-phase channel too weak to decode anything.
        let tx = vec![flat_channel(0, 0, 0.01, &cfg)];
        let mut states = vec![loaded_user(0, 2)];
        let c = ctx(&t, &table, &noise, Some(&tx));

        let out = transact(&mut states, 0, &[0], false, &channels, &c);
        assert!(out.intended_errored);
        assert_eq!(states[0].queue.len(), 2);
        assert_eq!(states[0].queue.hol().unwrap().retx_count, 1);

        // Three failed retransmissions exhaust the budget.
        for expect in [2u8, 3] {
            let out = transact(&mut states, 0, &[0], true, &channels, &c);
            assert!(out.intended_errored);
            assert_eq!(states[0].queue.hol().unwrap().retx_count, expect);
        }
        let out = transact(&mut states, 0, &[0], true, &channels, &c);
        let lost = out
            .removals
            .iter()
            .filter(|(_, _, r)| *r == Removal::Lost)
            .count();
        assert_eq!(lost, 2);
        assert!(states[0].queue.is_empty());
    }

    #[test]
    fn unintended_errors_get_no_retransmission() {
        let cfg = PhyConfig::default();
        let table = McsTable::default_20mhz();
        let noise = NoiseModel::default();
        let t = timing();
        let channels = vec![
            flat_channel(0, 0, 10.0, &cfg),
            flat_channel(1, 0, 10.0, &cfg),
        ];
        // Intended decodes fine; the unintended member's transmit-phase
        // channel is dead.
        let tx = vec![
            flat_channel(0, 0, 10.0, &cfg),
            flat_channel(1, 0, 0.01, &cfg),
        ];
        let mut states = vec![loaded_user(0, 5), loaded_user(1, 5)];
        let c = ctx(&t, &table, &noise, Some(&tx));
        let out = transact(&mut states, 0, &[0, 1], false, &channels, &c);
        assert!(!out.intended_errored);
        assert!(out.cached.is_empty());
        assert_eq!(states[1].cache.occupancy(), 0);
        // No frame anywhere is marked for retransmission.
        assert!(states[1].queue.iter().all(|f| f.retx_count == 0));
        assert!(states[0].queue.iter().all(|f| f.retx_count == 0));
    }

    #[test]
    fn degenerate_link_spends_overhead_only() {
        let cfg = PhyConfig::default();
        let table = McsTable::default_20mhz();
        let noise = NoiseModel::default();
        let t = timing();
        // Gain too weak for the lowest MCS: link selection fails.
        let channels = vec![flat_channel(0, 0, 0.5, &cfg)];
        let mut states = vec![loaded_user(0, 5)];
        let c = ctx(&t, &table, &noise, None);
        let out = transact(&mut states, 0, &[0], false, &channels, &c);
        assert_eq!(out.mcs, None);
        assert!((out.duration_s - overhead_s(1, &t)).abs() < 1e-12);
        assert_eq!(states[0].queue.len(), 5);
        assert!(out.removals.is_empty());
    }
}
