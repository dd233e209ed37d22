//! Slot-level scheduling policies: a drift-plus-penalty rule that trades
//! head-of-line (HOL) delay growth against airtime and useful throughput,
//! plus weighted-delay (MLWDF) and round-robin baselines sharing the same
//! group formation and TXOP packing machinery.
//!
//! Serving user `k` for a slot of length `T` with `b` useful bits scores
//!
//! ```text
//! score_k = Z_k^2 - (sum_{j != k} Z_j + V) * eps * T_k + V * beta * b_k
//! ```
//!
//! and idling for a quantum `T0` scores `-(sum_j Z_j + V) * eps * T0`; the
//! slot action is the argmax. After service, queues shed their minimum drop
//! quantum `L` whenever the post-service register satisfies
//! `Ztilde^2 >= V * beta * v * L`, which caps the register near
//! `sqrt(V * v * beta * L_max)`.

use crate::mac::{
    group_link, pack_burst, slot_duration, BurstPlan, TimingModel,
};
use crate::phy::{
    grouping_metric, multicast_precoder, user_rate, ChannelMatrix, McsTable, NoiseModel,
};
use crate::queueing::UserState;

/// Control weights of the drift-plus-penalty scheduler.
#[derive(Debug, Clone, PartialEq)]
pub struct LoParams {
    /// Penalty weight V on airtime and throughput terms.
    pub v: f64,
    /// Useful-bit reward weight beta.
    pub beta: f64,
    /// Per-user drop weight v_k (uniform).
    pub drop_weight: f64,
    /// Unit conversion: register ms per second of elapsed time.
    pub epsilon: f64,
    /// Largest drop quantum considered by the register ceiling, bits.
    pub l_max_bits: u64,
    /// TXOP data-airtime cap, seconds.
    pub t_max_s: f64,
}

impl Default for LoParams {
    fn default() -> Self {
        Self {
            v: 1000.0,
            beta: 4e-5,
            drop_weight: 125.0,
            epsilon: 1000.0,
            l_max_bits: 8000,
            t_max_s: 3e-3,
        }
    }
}

impl LoParams {
    pub fn validate(&self) -> Result<(), SchedulerError> {
        let ok = self.v > 0.0
            && self.beta > 0.0
            && self.drop_weight > 0.0
            && self.epsilon > 0.0
            && self.l_max_bits > 0
            && self.t_max_s > 0.0;
        if ok {
            Ok(())
        } else {
            Err(SchedulerError::InvalidParams)
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SchedulerError {
    #[error("scheduler parameters must all be positive")]
    InvalidParams,
}

/// Register ceiling implied by the drop rule: `sqrt(V * v * beta * L_max)`,
/// in ms. Defaults give exactly 200.
pub fn z_max(p: &LoParams) -> f64 {
    (p.v * p.drop_weight * p.beta * p.l_max_bits as f64).sqrt()
}

/// Score of serving one candidate for a slot of `t_s` seconds carrying
/// `b_bits` useful bits, given its register `z_ms` and everyone else's sum.
pub fn lo_score(z_ms: f64, sum_z_others_ms: f64, t_s: f64, b_bits: u64, p: &LoParams) -> f64 {
    z_ms * z_ms - (sum_z_others_ms + p.v) * p.epsilon * t_s + p.v * p.beta * b_bits as f64
}

/// Score of idling for `t_idle_s`: every register ages, nothing is served.
pub fn idle_score(sum_z_all_ms: f64, t_idle_s: f64, p: &LoParams) -> f64 {
    -(sum_z_all_ms + p.v) * p.epsilon * t_idle_s
}

/// Drop decision: shed `l_bits` iff `z_tilde^2` has reached the scaled
/// threshold (boundary inclusive); otherwise keep everything.
pub fn lo_drop(z_tilde_ms: f64, l_bits: u64, p: &LoParams) -> u64 {
    if z_tilde_ms * z_tilde_ms >= p.v * p.beta * p.drop_weight * l_bits as f64 {
        l_bits
    } else {
        0
    }
}

/// One slot's action.
#[derive(Debug, Clone, PartialEq)]
pub enum SchedulerDecision {
    /// No transmission; time advances by the idle quantum.
    Idle,
    Serve {
        intended: usize,
        /// Multicast set; `group[0] == intended`.
        group: Vec<usize>,
        /// Retransmission slot: unconditional priority, unicast to the
        /// intended user.
        retx: bool,
        /// Objective value that won the argmax, when the policy scores
        /// candidates.
        score: Option<f64>,
    },
}

/// Shared inputs every policy needs each slot.
pub struct SchedCtx<'a> {
    pub table: &'a McsTable,
    pub noise: &'a NoiseModel,
    pub timing: &'a TimingModel,
    pub t_max_s: f64,
    /// Multicast set size cap (4: one intended + three listeners).
    pub max_group: usize,
    /// Time advanced by an idle slot, seconds.
    pub idle_quantum_s: f64,
}

/// User whose HOL frame awaits retransmission, if any. Frames marked for
/// retry always sit at the queue head.
pub fn pending_retx(states: &[UserState]) -> Option<usize> {
    states
        .iter()
        .find(|s| s.queue.hol().is_some_and(|f| f.retx_count > 0))
        .map(|s| s.user)
}

/// Multicast set around `intended`: the up-to-three same-content users that
/// still need at least one frame of the prospective burst window, ranked by
/// channel correlation with the intended user (ties to the lower index).
pub fn form_group(
    intended: usize,
    states: &[UserState],
    channels: &[ChannelMatrix],
    ctx: &SchedCtx,
) -> Vec<usize> {
    let owner = &states[intended];
    // Widest window any MCS could carry: the non-cached head prefix at the
    // top table rate.
    let window = pack_burst(
        owner,
        &[owner],
        ctx.table.rate_bps(ctx.table.top().index),
        ctx.t_max_s,
        false,
    )
    .transmit_seqs;

    let mut ranked: Vec<(f64, usize)> = states
        .iter()
        .filter(|u| u.user != intended && u.content == owner.content)
        .filter(|u| window.iter().any(|&seq| u.needs(owner.content, seq)))
        .map(|u| (grouping_metric(&channels[intended], &channels[u.user]), u.user))
        .collect();
    ranked.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));

    let mut group = vec![intended];
    group.extend(ranked.iter().take(ctx.max_group - 1).map(|&(_, u)| u));
    group
}

/// A fully planned candidate slot: group, sustainable MCS, packed burst,
/// and its duration.
#[derive(Debug, Clone)]
pub struct CandidatePlan {
    pub group: Vec<usize>,
    pub mcs: u8,
    pub rate_bps: f64,
    pub burst: BurstPlan,
    pub t_s: f64,
}

/// Plans serving `intended` under the given channel knowledge. `None` when
/// no common MCS is sustainable.
pub fn plan_candidate(
    intended: usize,
    states: &[UserState],
    channels: &[ChannelMatrix],
    ctx: &SchedCtx,
    retx_only: bool,
) -> Option<CandidatePlan> {
    let group = if retx_only {
        vec![intended]
    } else {
        form_group(intended, states, channels, ctx)
    };
    let link = group_link(channels, &group, ctx.noise, ctx.table)?;
    let members: Vec<&UserState> = group.iter().map(|&u| &states[u]).collect();
    let burst = pack_burst(
        &states[intended],
        &members,
        link.rate_bps,
        ctx.t_max_s,
        retx_only,
    );
    let t_s = slot_duration(group.len(), burst.airtime_bits, link.rate_bps, ctx.timing);
    Some(CandidatePlan { group, mcs: link.mcs, rate_bps: link.rate_bps, burst, t_s })
}

fn retx_decision(states: &[UserState]) -> Option<SchedulerDecision> {
    pending_retx(states).map(|u| SchedulerDecision::Serve {
        intended: u,
        group: vec![u],
        retx: true,
        score: None,
    })
}

/// Drift-plus-penalty selection: plans every backlogged candidate from the
/// (outdated) channel knowledge, scores it, and compares against idling.
pub fn lo_select(
    states: &[UserState],
    channels: &[ChannelMatrix],
    p: &LoParams,
    ctx: &SchedCtx,
) -> SchedulerDecision {
    if let Some(d) = retx_decision(states) {
        return d;
    }
    let sum_z_all: f64 = states.iter().map(|s| s.queue.z_ms).sum();
    let mut best: Option<(f64, f64, usize, CandidatePlan)> = None;
    for s in states {
        if s.queue.is_empty() {
            continue;
        }
        let Some(plan) = plan_candidate(s.user, states, channels, ctx, false) else {
            continue;
        };
        let z = s.queue.z_ms;
        let score = lo_score(z, sum_z_all - z, plan.t_s, plan.burst.served_bits, p);
        let better = match &best {
            None => true,
            Some((bs, bz, bu, _)) => {
                score > *bs || (score == *bs && (z > *bz || (z == *bz && s.user < *bu)))
            }
        };
        if better {
            best = Some((score, z, s.user, plan));
        }
    }
    match best {
        Some((score, _, user, plan)) if score >= idle_score(sum_z_all, ctx.idle_quantum_s, p) => {
            SchedulerDecision::Serve { intended: user, group: plan.group, retx: false, score: Some(score) }
        }
        _ => SchedulerDecision::Idle,
    }
}

/// Mean unicast spectral efficiency of one user under its own matched
/// precoder; 0 for a degenerate channel.
pub fn unicast_eff(channels: &[ChannelMatrix], user: usize, noise: &NoiseModel) -> f64 {
    match multicast_precoder(&[&channels[user]]) {
        Ok(prec) => user_rate(&channels[user], &prec, noise),
        Err(_) => 0.0,
    }
}

/// Estimated unicast PHY rate after link adaptation (bit/s): the rate of
/// the highest table row the user's channel sustains, 0 when none.
pub fn unicast_rate_bps(channels: &[ChannelMatrix], user: usize, ctx: &SchedCtx) -> f64 {
    let eff = unicast_eff(channels, user, ctx.noise);
    ctx.table
        .select_single(eff)
        .map_or(0.0, |i| ctx.table.rate_bps(i))
}

/// Weighted-delay baseline: serves the backlogged user maximizing
/// `Z_k * r_k` with `r_k` the estimated unicast rate the link adaptation
/// would run (outdated knowledge); grouping and packing as the main policy.
pub fn mlwdf_select(
    states: &[UserState],
    channels: &[ChannelMatrix],
    ctx: &SchedCtx,
) -> SchedulerDecision {
    if let Some(d) = retx_decision(states) {
        return d;
    }
    let mut best: Option<(f64, f64, usize)> = None;
    for s in states {
        if s.queue.is_empty() {
            continue;
        }
        let z = s.queue.z_ms;
        let w = z * unicast_rate_bps(channels, s.user, ctx);
        let better = match &best {
            None => true,
            Some((bw, bz, bu)) => w > *bw || (w == *bw && (z > *bz || (z == *bz && s.user < *bu))),
        };
        if better {
            best = Some((w, z, s.user));
        }
    }
    match best {
        Some((_, _, user)) => SchedulerDecision::Serve {
            intended: user,
            group: form_group(user, states, channels, ctx),
            retx: false,
            score: None,
        },
        None => SchedulerDecision::Idle,
    }
}

/// Round-robin baseline: cyclic polling with reserved slices. Each turn
/// goes to the user under the persistent cursor whether or not that user
/// has traffic; an empty queue wastes the whole turn as an idle slice
/// ([`rr_slice_s`]). The cursor advances on every poll; only a
/// retransmission (which repairs the previous transmission out of turn)
/// leaves it untouched. Returns the decision and the updated cursor.
pub fn rr_select(
    states: &[UserState],
    channels: &[ChannelMatrix],
    ctx: &SchedCtx,
    cursor: usize,
) -> (SchedulerDecision, usize) {
    if let Some(d) = retx_decision(states) {
        return (d, cursor);
    }
    let k = states.len();
    let u = cursor % k;
    let decision = if states[u].queue.is_empty() {
        SchedulerDecision::Idle
    } else {
        SchedulerDecision::Serve {
            intended: u,
            group: form_group(u, states, channels, ctx),
            retx: false,
            score: None,
        }
    };
    (decision, (u + 1) % k)
}

/// Duration of one round-robin slice: the single-destination exchange
/// overhead plus the full airtime budget. An owner with nothing queued
/// keeps the slice anyway and it is burned in full — the baseline is
/// deliberately oblivious to backlog and rate.
pub fn rr_slice_s(timing: &TimingModel, t_max_s: f64) -> f64 {
    crate::mac::overhead_s(1, timing) + t_max_s
}

/// Deadline policy for the baselines: every head frame older than the
/// deadline at the measurement instant is shed. Returns (user, frames,
/// bits) per affected queue.
pub fn baseline_deadline_drop(
    states: &[UserState],
    deadline_ms: f64,
    now_s: f64,
) -> Vec<(usize, usize, u64)> {
    let mut drops = Vec::new();
    for s in states {
        let mut n = 0;
        let mut bits = 0;
        for f in s.queue.iter() {
            if (now_s - f.arrival_s) * 1000.0 > deadline_ms {
                n += 1;
                bits += f.size_bits;
            } else {
                break;
            }
        }
        if n > 0 {
            drops.push((s.user, n, bits));
        }
    }
    drops
}

/// Minimum drop quantum for the drop rule, honoring the per-slot aging
/// bound `epsilon * t_max` as the gap threshold.
pub fn drop_quantum_for(state: &UserState, p: &LoParams) -> Option<(usize, u64)> {
    crate::queueing::drop_quantum(&state.queue, p.epsilon * p.t_max_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::PhyConfig;
    use crate::queueing::{enqueue, Frame};
    use num_complex::Complex64;

    fn frame(seq: u64, arrival_s: f64) -> Frame {
        Frame { content: 0, seq, size_bits: 8000, arrival_s, retx_count: 0 }
    }

    #[test]
    fn score_matches_hand_values() {
        let p = LoParams::default();
        assert!((lo_score(100.0, 50.0, 0.002, 12_000, &p) - 8380.0).abs() < 1e-9);
        assert!((lo_score(50.0, 100.0, 0.002, 24_000, &p) - 1260.0).abs() < 1e-9);
        assert!((lo_score(0.0, 50.0, 0.002, 0, &p) + 2100.0).abs() < 1e-9);
    }

    #[test]
    fn register_ceiling_matches_hand_values() {
        let p = LoParams::default();
        assert_eq!(z_max(&p), 200.0);
        let quadrupled = LoParams { l_max_bits: 32_000, ..p.clone() };
        assert_eq!(z_max(&quadrupled), 400.0);
        let heavier = LoParams { v: 4000.0, ..p };
        assert_eq!(z_max(&heavier), 400.0);
    }

    #[test]
    fn drop_rule_thresholds() {
        let p = LoParams::default();
        assert_eq!(lo_drop(250.0, 8000, &p), 8000);
        assert_eq!(lo_drop(150.0, 8000, &p), 0);
        // Boundary is inclusive: 200^2 == 40_000 exactly.
        assert_eq!(lo_drop(200.0, 8000, &p), 8000);
    }

    #[test]
    fn drop_rule_below_unit_threshold_never_fires() {
        let p = LoParams::default();
        let limit = (p.v * p.beta * p.drop_weight).sqrt();
        for l in [1u64, 100, 8000, 16_000, 64_000] {
            assert_eq!(lo_drop(limit * 0.999, l, &p), 0);
        }
    }

    fn flat_channel(user: usize, axis: usize, scale: f64, cfg: &PhyConfig) -> ChannelMatrix {
        let mut data = vec![Complex64::new(0.0, 0.0); cfg.n_subcarriers * cfg.n_tx];
        for sc in 0..cfg.n_subcarriers {
            data[sc * cfg.n_tx + axis] = Complex64::new(scale, 0.0);
        }
        ChannelMatrix::from_data(user, 0, cfg.n_subcarriers, cfg.n_rx, cfg.n_tx, data)
            .expect("consistent dimensions")
    }

    struct Fixture {
        table: McsTable,
        noise: NoiseModel,
        timing: TimingModel,
    }

    impl Fixture {
        fn new() -> Self {
            Self {
                table: McsTable::default_20mhz(),
                noise: NoiseModel::default(),
                timing: TimingModel::default(),
            }
        }
        fn ctx(&self) -> SchedCtx<'_> {
            SchedCtx {
                table: &self.table,
                noise: &self.noise,
                timing: &self.timing,
                t_max_s: 3e-3,
                max_group: 4,
                idle_quantum_s: 5e-4,
            }
        }
    }

    fn backlogged(user: usize, content: u8, n: usize, first_arrival_s: f64, z_ms: f64) -> UserState {
        let mut st = UserState::new(user, content, 30.0, 0);
        for j in 0..n {
            enqueue(
                &mut st,
                Frame {
                    content,
                    seq: j as u64,
                    size_bits: 8000,
                    arrival_s: first_arrival_s + 0.008 * j as f64,
                    retx_count: 0,
                },
            );
        }
        st.queue.z_ms = z_ms;
        st
    }

    #[test]
    fn select_prefers_longer_waiting_user() {
        let fx = Fixture::new();
        let cfg = PhyConfig::default();
        let states = vec![
            backlogged(0, 0, 10, 0.0, 150.0),
            backlogged(1, 1, 10, 0.0, 10.0),
        ];
        let channels = vec![
            flat_channel(0, 0, 10.0, &cfg),
            flat_channel(1, 1, 10.0, &cfg),
        ];
        let d = lo_select(&states, &channels, &LoParams::default(), &fx.ctx());
        match d {
            SchedulerDecision::Serve { intended, retx, .. } => {
                assert_eq!(intended, 0);
                assert!(!retx);
            }
            other => panic!("expected service, got {other:?}"),
        }
    }

    #[test]
    fn select_serves_the_only_backlogged_user() {
        let fx = Fixture::new();
        let cfg = PhyConfig::default();
        let states = vec![
            backlogged(0, 0, 5, 0.0, 40.0),
            UserState::new(1, 1, 30.0, 0),
        ];
        let channels = vec![
            flat_channel(0, 0, 10.0, &cfg),
            flat_channel(1, 1, 10.0, &cfg),
        ];
        let d = lo_select(&states, &channels, &LoParams::default(), &fx.ctx());
        assert!(matches!(d, SchedulerDecision::Serve { intended: 0, .. }));
    }

    #[test]
    fn select_idles_when_everything_is_empty() {
        let fx = Fixture::new();
        let cfg = PhyConfig::default();
        let states = vec![UserState::new(0, 0, 30.0, 0), UserState::new(1, 1, 30.0, 0)];
        let channels = vec![
            flat_channel(0, 0, 10.0, &cfg),
            flat_channel(1, 1, 10.0, &cfg),
        ];
        assert_eq!(
            lo_select(&states, &channels, &LoParams::default(), &fx.ctx()),
            SchedulerDecision::Idle
        );
        let (d, cur) = rr_select(&states, &channels, &fx.ctx(), 1);
        assert_eq!(d, SchedulerDecision::Idle);
        // The poll still consumed user 1's turn.
        assert_eq!(cur, 0);
        assert_eq!(mlwdf_select(&states, &channels, &fx.ctx()), SchedulerDecision::Idle);
    }

    #[test]
    fn pending_retransmission_preempts_scoring() {
        let fx = Fixture::new();
        let cfg = PhyConfig::default();
        let mut states = vec![
            backlogged(0, 0, 10, 0.0, 199.0),
            backlogged(1, 1, 10, 0.0, 1.0),
        ];
        states[1].queue.bump_retx(0);
        let channels = vec![
            flat_channel(0, 0, 10.0, &cfg),
            flat_channel(1, 1, 10.0, &cfg),
        ];
        for d in [
            lo_select(&states, &channels, &LoParams::default(), &fx.ctx()),
            mlwdf_select(&states, &channels, &fx.ctx()),
            rr_select(&states, &channels, &fx.ctx(), 0).0,
        ] {
            match d {
                SchedulerDecision::Serve { intended, group, retx, .. } => {
                    assert_eq!(intended, 1);
                    assert_eq!(group, vec![1]);
                    assert!(retx);
                }
                other => panic!("expected retransmission service, got {other:?}"),
            }
        }
    }

    #[test]
    fn group_takes_three_strongest_correlated_listeners() {
        let fx = Fixture::new();
        let cfg = PhyConfig::default();
        // Users 1..=5 share content 0 and need the burst; correlation with
        // user 0 grows with index.
        let mut states = vec![backlogged(0, 0, 10, 0.0, 50.0)];
        let mut channels = vec![flat_channel(0, 0, 10.0, &cfg)];
        for u in 1..=5 {
            states.push(backlogged(u, 0, 0, 0.0, 0.0));
            channels.push(flat_channel(u, 0, u as f64, &cfg));
        }
        let group = form_group(0, &states, &channels, &fx.ctx());
        assert_eq!(group, vec![0, 5, 4, 3]);
    }

    #[test]
    fn group_ties_break_toward_lower_index() {
        let fx = Fixture::new();
        let cfg = PhyConfig::default();
        let mut states = vec![backlogged(0, 0, 10, 0.0, 50.0)];
        let mut channels = vec![flat_channel(0, 0, 10.0, &cfg)];
        for u in 1..=5 {
            states.push(backlogged(u, 0, 0, 0.0, 0.0));
            channels.push(flat_channel(u, 0, 2.0, &cfg));
        }
        let group = form_group(0, &states, &channels, &fx.ctx());
        assert_eq!(group, vec![0, 1, 2, 3]);
    }

    #[test]
    fn group_is_unicast_without_content_peers() {
        let fx = Fixture::new();
        let cfg = PhyConfig::default();
        let states = vec![
            backlogged(0, 0, 10, 0.0, 50.0),
            backlogged(1, 1, 10, 0.0, 50.0),
        ];
        let channels = vec![
            flat_channel(0, 0, 10.0, &cfg),
            flat_channel(1, 0, 10.0, &cfg),
        ];
        assert_eq!(form_group(0, &states, &channels, &fx.ctx()), vec![0]);
    }

    #[test]
    fn group_skips_peers_with_nothing_to_gain() {
        let fx = Fixture::new();
        let cfg = PhyConfig::default();
        // User 1 shares the content but has consumed past every window
        // frame; user 2 still needs them.
        let mut sated = UserState::new(1, 0, 30.0, 100);
        sated.queue.z_ms = 0.0;
        let states = vec![
            backlogged(0, 0, 10, 0.0, 50.0),
            sated,
            backlogged(2, 0, 0, 0.0, 0.0),
        ];
        let channels = vec![
            flat_channel(0, 0, 10.0, &cfg),
            flat_channel(1, 0, 10.0, &cfg),
            flat_channel(2, 0, 10.0, &cfg),
        ];
        assert_eq!(form_group(0, &states, &channels, &fx.ctx()), vec![0, 2]);
    }

    #[test]
    fn weighted_delay_argmax_uses_rate_times_register() {
        let fx = Fixture::new();
        let cfg = PhyConfig::default();
        let mut states = vec![
            backlogged(0, 0, 5, 0.0, 100.0),
            backlogged(1, 1, 5, 0.0, 50.0),
        ];
        // Flat gain 2 sustains the bottom table rate; gain 3.5 sustains the
        // third row, three times faster. Weights: 100*r vs 50*3r.
        let equal = vec![
            flat_channel(0, 0, 2.0_f64.sqrt(), &cfg),
            flat_channel(1, 1, 2.0_f64.sqrt(), &cfg),
        ];
        let skewed = vec![
            flat_channel(0, 0, 2.0_f64.sqrt(), &cfg),
            flat_channel(1, 1, 3.5_f64.sqrt(), &cfg),
        ];
        assert!(matches!(
            mlwdf_select(&states, &equal, &fx.ctx()),
            SchedulerDecision::Serve { intended: 0, .. }
        ));
        assert!(matches!(
            mlwdf_select(&states, &skewed, &fx.ctx()),
            SchedulerDecision::Serve { intended: 1, .. }
        ));
        // Register values drive the product too.
        states[0].queue.z_ms = 10.0;
        assert!(matches!(
            mlwdf_select(&states, &equal, &fx.ctx()),
            SchedulerDecision::Serve { intended: 1, .. }
        ));
    }

    #[test]
    fn round_robin_polls_every_user_in_cyclic_order() {
        let fx = Fixture::new();
        let cfg = PhyConfig::default();
        let states = vec![
            UserState::new(0, 0, 30.0, 0),
            backlogged(1, 1, 5, 0.0, 10.0),
            UserState::new(2, 2, 30.0, 0),
            backlogged(3, 3, 5, 0.0, 10.0),
        ];
        let channels: Vec<ChannelMatrix> =
            (0..4).map(|u| flat_channel(u, 0, 10.0, &cfg)).collect();
        // Starting at user 2 the polls visit 2, 3, 0, 1 in turn; empty
        // queues (users 0 and 2) waste their turn as idle slots.
        let mut cursor = 2;
        let mut trace = Vec::new();
        for _ in 0..4 {
            let (d, c) = rr_select(&states, &channels, &fx.ctx(), cursor);
            trace.push(match d {
                SchedulerDecision::Serve { intended, .. } => Some(intended),
                SchedulerDecision::Idle => None,
            });
            cursor = c;
        }
        assert_eq!(trace, vec![None, Some(3), None, Some(1)]);
        assert_eq!(cursor, 2);
    }

    #[test]
    fn round_robin_wastes_turns_on_idle_users() {
        let fx = Fixture::new();
        let cfg = PhyConfig::default();
        let states = vec![
            UserState::new(0, 0, 30.0, 0),
            backlogged(1, 1, 5, 0.0, 10.0),
        ];
        let channels = vec![
            flat_channel(0, 0, 10.0, &cfg),
            flat_channel(1, 0, 10.0, &cfg),
        ];
        // The backlogged user is served on alternate polls only: the idle
        // peer's turn is not reassigned.
        let mut cursor = 0;
        let mut served = 0;
        for i in 0..6 {
            let (d, c) = rr_select(&states, &channels, &fx.ctx(), cursor);
            match d {
                SchedulerDecision::Serve { intended, .. } => {
                    assert_eq!(intended, 1);
                    assert_eq!(i % 2, 1);
                    served += 1;
                }
                SchedulerDecision::Idle => assert_eq!(i % 2, 0),
            }
            cursor = c;
        }
        assert_eq!(served, 3);
    }

    #[test]
    fn deadline_drop_sheds_only_overdue_heads() {
        let mut st = UserState::new(0, 0, 30.0, 0);
        enqueue(&mut st, frame(0, 0.0));
        enqueue(&mut st, frame(1, 0.002));
        enqueue(&mut st, frame(2, 0.1));
        let states = vec![st, UserState::new(1, 1, 30.0, 0)];
        // At t=0.201: delays are 201, 199 and 101 ms.
        let drops = baseline_deadline_drop(&states, 200.0, 0.201);
        assert_eq!(drops, vec![(0, 1, 8000)]);
        // At t=0.199 nothing is overdue.
        assert!(baseline_deadline_drop(&states, 200.0, 0.199).is_empty());
    }

    #[test]
    fn candidate_plan_packs_group_bits() {
        let fx = Fixture::new();
        let cfg = PhyConfig::default();
        let states = vec![
            backlogged(0, 0, 30, 0.0, 50.0),
            backlogged(1, 0, 0, 0.0, 0.0),
        ];
        let channels = vec![
            flat_channel(0, 0, 10.0, &cfg),
            flat_channel(1, 0, 10.0, &cfg),
        ];
        let plan = plan_candidate(0, &states, &channels, &fx.ctx(), false).unwrap();
        assert_eq!(plan.group, vec![0, 1]);
        assert_eq!(plan.mcs, 7);
        assert_eq!(plan.burst.transmit_seqs.len(), 24);
        // Both members need every frame: bits count twice.
        assert_eq!(plan.burst.served_bits, 2 * 24 * 8000);
        assert!(plan.t_s > 0.0 && plan.burst.airtime_s <= fx.ctx().t_max_s);
    }
}
