//! Session simulator: ties channel draws, scheduling, the MAC transaction,
//! drop rules, and traffic injection into a deterministic slot loop, and
//! reduces sessions into outage and capacity statistics.
//!
//! Each slot, in order: (1) head-of-line delay registers are re-measured
//! from frame timestamps at the slot-start instant, (2) the scheduler picks
//! an action using the most recent (hence outdated) channel knowledge,
//! (3) the MAC transaction executes against freshly sounded channels,
//! (4) the drop rule sheds overdue queue heads, (5) frames arriving during
//! the slot are enqueued. Deliveries commit at the slot-start instant, so a
//! delivered frame's recorded delay equals the register its queue showed
//! when the decision was made.

use crate::mac::{transact, Removal, SlotOutcome, TimingModel, TransactCtx};
use crate::phy::{
    snr_db_to_gain, ChannelMatrix, ChannelModel, McsTable, NoiseModel, PhyConfig,
};
use crate::queueing::{
    enqueue, phi, psi, update_hol, update_intermediate_hol, EnqueueOutcome, UserState,
};
use crate::rng::{session_master, stream, substream};
use crate::scheduler::{
    baseline_deadline_drop, drop_quantum_for, lo_drop, lo_select, mlwdf_select, rr_select,
    rr_slice_s, LoParams, SchedCtx, SchedulerDecision,
};
use crate::traffic::{arrivals_in, assign_flows, FlowSpec};
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchedulerKind {
    Lo,
    Mlwdf,
    Rr,
}

impl SchedulerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SchedulerKind::Lo => "lo",
            SchedulerKind::Mlwdf => "mlwdf",
            SchedulerKind::Rr => "rr",
        }
    }
}

impl std::str::FromStr for SchedulerKind {
    type Err = SimError;
    fn from_str(s: &str) -> Result<Self, SimError> {
        match s {
            "lo" => Ok(SchedulerKind::Lo),
            "mlwdf" => Ok(SchedulerKind::Mlwdf),
            "rr" => Ok(SchedulerKind::Rr),
            other => Err(SimError::Invalid(format!(
                "unknown scheduler '{other}' (expected lo, mlwdf, or rr)"
            ))),
        }
    }
}

/// One experiment scenario: population, deployment case, load, horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scheduler: SchedulerKind,
    pub multicast: bool,
    pub users: usize,
    /// Deployment case: 1 draws user SNR uniformly in [18, 45] dB,
    /// 2 in [30, 45] dB.
    pub case: u8,
    pub load_bps: f64,
    pub duration_s: f64,
    pub sessions: usize,
    pub seed: u64,
    pub n_contents: u8,
    pub frame_bits: u64,
    /// Delivery deadline in ms; later deliveries count late.
    pub deadline_ms: f64,
    pub idle_quantum_s: f64,
    pub retx_limit: u8,
    pub max_group: usize,
    /// Evaluate reception against transmit-phase channel draws.
    pub error_model: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            scheduler: SchedulerKind::Lo,
            multicast: true,
            users: 10,
            case: 1,
            load_bps: 1e6,
            duration_s: 30.0,
            sessions: 100,
            seed: 1,
            n_contents: 10,
            frame_bits: 8000,
            deadline_ms: 200.0,
            idle_quantum_s: 5e-4,
            retx_limit: 3,
            max_group: 4,
            error_model: false,
        }
    }
}

impl ScenarioConfig {
    pub fn snr_range_db(&self) -> (f64, f64) {
        match self.case {
            1 => (18.0, 45.0),
            _ => (30.0, 45.0),
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.users == 0 {
            return Err(SimError::Invalid("users must be at least 1".into()));
        }
        if !(self.case == 1 || self.case == 2) {
            return Err(SimError::Invalid(format!(
                "case must be 1 or 2, got {}",
                self.case
            )));
        }
        if !(self.load_bps >= 0.0 && self.load_bps.is_finite()) {
            return Err(SimError::Invalid("load must be finite and >= 0".into()));
        }
        if !(self.duration_s > 0.0) {
            return Err(SimError::Invalid("duration must be positive".into()));
        }
        if self.sessions == 0 {
            return Err(SimError::Invalid("sessions must be at least 1".into()));
        }
        if self.n_contents == 0 {
            return Err(SimError::Invalid("content count must be at least 1".into()));
        }
        if self.frame_bits == 0 {
            return Err(SimError::Invalid("frame size must be positive".into()));
        }
        if !(self.deadline_ms > 0.0) {
            return Err(SimError::Invalid("deadline must be positive".into()));
        }
        if !(self.idle_quantum_s > 0.0) {
            return Err(SimError::Invalid("idle quantum must be positive".into()));
        }
        if !(1..=4).contains(&self.max_group) {
            return Err(SimError::Invalid(format!(
                "group size cap must be 1..=4, got {}",
                self.max_group
            )));
        }
        Ok(())
    }
}

/// Model parameters shared by all scenarios of an experiment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimParams {
    pub phy: PhyConfig,
    pub table: McsTable,
    pub timing: TimingModel,
    pub lo: LoParams,
    pub noise: NoiseModel,
}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Phy(#[from] crate::phy::PhyError),
}

/// Number of 10 ms delay-histogram buckets; the last bucket collects
/// everything at or beyond 200 ms.
pub const DELAY_BUCKETS: usize = 21;

/// Per-user session counters. Frames reconcile exactly:
/// `arrived = delivered + lost + cache_served + residual`.
#[derive(Debug, Clone, PartialEq)]
pub struct UserMetrics {
    pub user: usize,
    pub content: u8,
    pub snr_db: f64,
    pub arrived: u64,
    pub delivered: u64,
    /// Delivered with delay beyond the deadline (subset of `delivered`).
    pub late: u64,
    pub lost: u64,
    pub cache_served: u64,
    /// Frames still queued when the session ended.
    pub residual: u64,
    pub peak_cache: usize,
    pub delay_sum_ms: f64,
    pub delay_max_ms: f64,
    pub delay_hist: [u64; DELAY_BUCKETS],
    pub max_z_ms: f64,
}

impl UserMetrics {
    fn new(user: usize, content: u8, snr_db: f64) -> Self {
        Self {
            user,
            content,
            snr_db,
            arrived: 0,
            delivered: 0,
            late: 0,
            lost: 0,
            cache_served: 0,
            residual: 0,
            peak_cache: 0,
            delay_sum_ms: 0.0,
            delay_max_ms: 0.0,
            delay_hist: [0; DELAY_BUCKETS],
            max_z_ms: 0.0,
        }
    }

    pub fn mean_delay_ms(&self) -> f64 {
        if self.delivered == 0 {
            0.0
        } else {
            self.delay_sum_ms / self.delivered as f64
        }
    }

    fn record_delivery(&mut self, delay_ms: f64, deadline_ms: f64) {
        self.delivered += 1;
        if delay_ms > deadline_ms {
            self.late += 1;
        }
        self.delay_sum_ms += delay_ms;
        self.delay_max_ms = self.delay_max_ms.max(delay_ms);
        let bucket = ((delay_ms / 10.0).floor() as usize).min(DELAY_BUCKETS - 1);
        self.delay_hist[bucket] += 1;
    }
}

/// Everything one session produced.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionLedger {
    pub session: usize,
    pub users: Vec<UserMetrics>,
    pub slots: u64,
    pub idle_slots: u64,
    pub sim_time_s: f64,
    pub delivered_bits: u64,
    pub max_z_ms: f64,
    pub max_delivery_delay_ms: f64,
}

/// Strictly-more-than-1% rule on one user's session.
pub fn user_outage(m: &UserMetrics) -> bool {
    m.arrived > 0 && 100 * (m.lost + m.late) > m.arrived
}

/// Strictly-more-than-1% rule pooled over all user-sessions.
pub fn system_outage(ledgers: &[SessionLedger]) -> bool {
    let mut total: u64 = 0;
    let mut bad: u64 = 0;
    for l in ledgers {
        for m in &l.users {
            total += 1;
            if user_outage(m) {
                bad += 1;
            }
        }
    }
    total > 0 && 100 * bad > total
}

/// Nearest-rank 99th percentile of per-user peak cache occupancy pooled
/// over sessions; 0 when there are no samples.
pub fn cache_percentile(ledgers: &[SessionLedger]) -> usize {
    let mut peaks: Vec<usize> = ledgers
        .iter()
        .flat_map(|l| l.users.iter().map(|m| m.peak_cache))
        .collect();
    if peaks.is_empty() {
        return 0;
    }
    peaks.sort_unstable();
    let rank = ((0.99 * peaks.len() as f64).ceil() as usize).max(1);
    peaks[rank - 1]
}

/// Largest `k` in `[k_min, k_max]` accepted by `probe` (assumed monotone:
/// pass up to some threshold, fail beyond); `k_min - 1` if even `k_min`
/// fails.
pub fn capacity_search_with(
    mut probe: impl FnMut(usize) -> bool,
    k_min: usize,
    k_max: usize,
) -> usize {
    assert!(k_min >= 1 && k_min <= k_max);
    if !probe(k_min) {
        return k_min - 1;
    }
    if probe(k_max) {
        return k_max;
    }
    // Invariant: lo passes, hi fails.
    let (mut lo, mut hi) = (k_min, k_max);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if probe(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Runs the scenario at `k` users and decides whether the system supports
/// them (no pooled outage). Stops running sessions as soon as the outage
/// count can no longer stay within the threshold, since it only grows.
pub fn probe_supported(
    template: &ScenarioConfig,
    params: &SimParams,
    k: usize,
) -> Result<bool, SimError> {
    let cfg = ScenarioConfig { users: k, ..template.clone() };
    let final_total = (k * cfg.sessions) as u64;
    let mut bad: u64 = 0;
    for s in 0..cfg.sessions {
        let ledger = run_session(&cfg, params, s)?;
        bad += ledger.users.iter().filter(|m| user_outage(m)).count() as u64;
        if 100 * bad > final_total {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Capacity probe over real sessions: runs `template` with `users = k` for
/// the configured session count and checks the pooled outage rule.
pub fn capacity_search(
    template: &ScenarioConfig,
    params: &SimParams,
    k_min: usize,
    k_max: usize,
) -> Result<usize, SimError> {
    let mut failure: Option<SimError> = None;
    let result = capacity_search_with(
        |k| {
            if failure.is_some() {
                return false;
            }
            match probe_supported(template, params, k) {
                Ok(pass) => pass,
                Err(e) => {
                    failure = Some(e);
                    false
                }
            }
        },
        k_min,
        k_max,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(result),
    }
}

/// Capacity search followed by a full set of sessions at the capacity
/// operating point to collect the cache statistic there. Returns
/// `(capacity, cache_p99)`; the cache statistic is 0 when even `k_min`
/// fails (no operating point to measure).
pub fn capacity_and_cache(
    template: &ScenarioConfig,
    params: &SimParams,
    k_min: usize,
    k_max: usize,
) -> Result<(usize, usize), SimError> {
    let capacity = capacity_search(template, params, k_min, k_max)?;
    if capacity < k_min {
        return Ok((capacity, 0));
    }
    let cfg = ScenarioConfig { users: capacity, ..template.clone() };
    let ledgers = run_many(&cfg, params)?;
    Ok((capacity, cache_percentile(&ledgers)))
}

/// Runs every session of the scenario in order.
pub fn run_many(cfg: &ScenarioConfig, params: &SimParams) -> Result<Vec<SessionLedger>, SimError> {
    (0..cfg.sessions).map(|s| run_session(cfg, params, s)).collect()
}

/// One grid point of the throughput-versus-SNR sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub snr_db: f64,
    /// MAC throughput with link adaptation (Mbit/s), averaged over draws.
    pub adaptive_mbps: f64,
    /// MAC throughput per fixed MCS row (Mbit/s); a draw whose channel
    /// cannot sustain the row contributes zero.
    pub per_mcs_mbps: Vec<f64>,
}

/// Single-user MAC throughput against average SNR, averaged over fresh
/// channel draws per grid point. Each draw fills one TXOP with whole
/// frames at the evaluated rate; throughput counts the exchange overhead,
/// so the adaptive curve is the staircase's upper envelope and each fixed
/// row saturates below its PHY rate.
pub fn throughput_sweep(
    params: &SimParams,
    snrs_db: &[f64],
    draws: usize,
    frame_bits: u64,
    seed: u64,
) -> Result<Vec<SweepPoint>, SimError> {
    use crate::mac::{max_whole_frames, slot_duration};

    let model = ChannelModel::new(params.phy.clone())?;
    let n_rows = params.table.entries().len();
    let t_max_s = params.lo.t_max_s;
    let mac_mbps = |rate_bps: f64| {
        let frames = max_whole_frames(t_max_s, rate_bps, frame_bits);
        if frames == 0 {
            return 0.0;
        }
        let bits = frames as u64 * frame_bits;
        bits as f64 / slot_duration(1, bits, rate_bps, &params.timing) / 1e6
    };

    let mut out = Vec::with_capacity(snrs_db.len());
    for (pt, &snr_db) in snrs_db.iter().enumerate() {
        let gain = snr_db_to_gain(snr_db, &params.noise);
        let mut adaptive = 0.0;
        let mut per_mcs = vec![0.0; n_rows];
        for draw in 0..draws {
            let ch = model.draw(draw, gain, seed, pt as u64);
            let eff = crate::scheduler::unicast_eff(
                std::slice::from_ref(&ch),
                0,
                &params.noise,
            );
            if let Some(row) = params.table.select_single(eff) {
                adaptive += mac_mbps(params.table.rate_bps(row));
            }
            for (m, entry) in params.table.entries().iter().enumerate() {
                if entry.required_eff <= eff {
                    per_mcs[m] += mac_mbps(entry.rate_mbps * 1e6);
                }
            }
        }
        let n = draws.max(1) as f64;
        adaptive /= n;
        for v in &mut per_mcs {
            *v /= n;
        }
        out.push(SweepPoint { snr_db, adaptive_mbps: adaptive, per_mcs_mbps: per_mcs });
    }
    Ok(out)
}

fn draw_all(
    model: &ChannelModel,
    gains: &[f64],
    master: u64,
    epoch: u64,
) -> Vec<ChannelMatrix> {
    gains
        .iter()
        .enumerate()
        .map(|(u, &g)| model.draw(u, g, master, epoch))
        .collect()
}

/// Simulates one session and returns its ledger. Deterministic in
/// `(cfg, session)`: every random quantity comes from tagged substreams of
/// the session master seed.
pub fn run_session(
    cfg: &ScenarioConfig,
    params: &SimParams,
    session: usize,
) -> Result<SessionLedger, SimError> {
    cfg.validate()?;
    params.lo.validate().map_err(|e| SimError::Invalid(e.to_string()))?;
    params.timing.validate().map_err(|e| SimError::Invalid(e.to_string()))?;

    let master = session_master(cfg.seed, session as u64);
    let flows: Vec<FlowSpec> = assign_flows(
        cfg.users,
        cfg.n_contents,
        cfg.load_bps,
        cfg.frame_bits,
        master,
    );

    let (snr_lo, snr_hi) = cfg.snr_range_db();
    let snrs: Vec<f64> = (0..cfg.users)
        .map(|u| {
            let mut rng = substream(master, &[stream::SNR, u as u64]);
            rng.random_range(snr_lo..snr_hi)
        })
        .collect();
    let gains: Vec<f64> = snrs.iter().map(|&s| snr_db_to_gain(s, &params.noise)).collect();

    let mut states: Vec<UserState> = flows
        .iter()
        .zip(&snrs)
        .map(|(f, &snr)| UserState::new(f.user, f.content, snr, f.start_seq))
        .collect();
    let mut metrics: Vec<UserMetrics> = flows
        .iter()
        .zip(&snrs)
        .map(|(f, &snr)| UserMetrics::new(f.user, f.content, snr))
        .collect();

    let model = ChannelModel::new(params.phy.clone())?;
    // Channel knowledge available to the scheduler: refreshed by each
    // sounding exchange, so it is one service slot old when used.
    let mut known = draw_all(&model, &gains, master, 0);
    let mut soundings: u64 = 0;

    let mut ledger = SessionLedger {
        session,
        users: Vec::new(),
        slots: 0,
        idle_slots: 0,
        sim_time_s: 0.0,
        delivered_bits: 0,
        max_z_ms: 0.0,
        max_delivery_delay_ms: 0.0,
    };

    let mut rr_cursor = 0usize;
    let mut t = 0.0f64;
    while t < cfg.duration_s {
        // (1) Re-measure registers from frame timestamps.
        let mut old_hol: Vec<Option<f64>> = Vec::with_capacity(cfg.users);
        for (s, m) in states.iter_mut().zip(metrics.iter_mut()) {
            let z = s.queue.hol_delay_ms(t);
            s.queue.z_ms = z;
            m.max_z_ms = m.max_z_ms.max(z);
            ledger.max_z_ms = ledger.max_z_ms.max(z);
            old_hol.push(s.queue.hol().map(|f| f.arrival_s));
        }

        let ctx = SchedCtx {
            table: &params.table,
            noise: &params.noise,
            timing: &params.timing,
            t_max_s: params.lo.t_max_s,
            max_group: if cfg.multicast { cfg.max_group } else { 1 },
            idle_quantum_s: cfg.idle_quantum_s,
        };

        // (2) Scheduling on the known (outdated) channels.
        let decision = match cfg.scheduler {
            SchedulerKind::Lo => lo_select(&states, &known, &params.lo, &ctx),
            SchedulerKind::Mlwdf => mlwdf_select(&states, &known, &ctx),
            SchedulerKind::Rr => {
                let (d, cur) = rr_select(&states, &known, &ctx, rr_cursor);
                rr_cursor = cur;
                d
            }
        };

        // (3) MAC transaction on freshly sounded channels.
        let outcome: Option<SlotOutcome> = match &decision {
            SchedulerDecision::Idle => None,
            SchedulerDecision::Serve { intended, group, retx, .. } => {
                soundings += 1;
                let sounding = draw_all(&model, &gains, master, 2 * soundings);
                let tx_draws = cfg
                    .error_model
                    .then(|| draw_all(&model, &gains, master, 2 * soundings + 1));
                let tctx = TransactCtx {
                    timing: &params.timing,
                    table: &params.table,
                    noise: &params.noise,
                    t_max_s: params.lo.t_max_s,
                    retx_limit: cfg.retx_limit,
                    tx_channels: tx_draws.as_deref(),
                };
                let out = transact(&mut states, *intended, group, *retx, &sounding, &tctx);
                known = sounding;
                Some(out)
            }
        };
        // A round-robin turn whose owner has nothing queued burns the full
        // slice; a backlogged owner's turn runs its natural exchange.
        let slot_s = match (cfg.scheduler, &decision) {
            (SchedulerKind::Rr, SchedulerDecision::Idle) => {
                rr_slice_s(&params.timing, params.lo.t_max_s)
            }
            _ => outcome.as_ref().map_or(cfg.idle_quantum_s, |o| o.duration_s),
        };
        let served_user = outcome.as_ref().and_then(|o| o.intended);

        // Deliveries commit at the slot-start instant.
        if let Some(out) = &outcome {
            for (user, frame, class) in &out.removals {
                let m = &mut metrics[*user];
                match class {
                    Removal::Delivered => {
                        let delay_ms = (t - frame.arrival_s) * 1000.0;
                        m.record_delivery(delay_ms, cfg.deadline_ms);
                        ledger.delivered_bits += frame.size_bits;
                        ledger.max_delivery_delay_ms =
                            ledger.max_delivery_delay_ms.max(delay_ms);
                    }
                    Removal::CacheServed => m.cache_served += 1,
                    Removal::Lost => m.lost += 1,
                }
            }
        }

        // (4) Register pipeline and drop step.
        for u in 0..cfg.users {
            let z = states[u].queue.z_ms;
            let served = served_user == Some(u);
            let removed = outcome
                .as_ref()
                .is_some_and(|o| o.removals.iter().any(|(ru, _, _)| *ru == u));
            let m_ms = if !removed {
                0.0
            } else if states[u].queue.is_empty() {
                z
            } else {
                let new_hol = states[u].queue.hol().unwrap().arrival_s;
                (new_hol - old_hol[u].expect("removals imply a previous head")) * 1000.0
            };
            let p = psi(served, m_ms, z, slot_s, params.lo.epsilon);
            let z_tilde = update_intermediate_hol(z, p);
            states[u].queue.z_tilde_ms = z_tilde;

            match cfg.scheduler {
                SchedulerKind::Lo => {
                    if let Some((n_frames, l_bits)) = drop_quantum_for(&states[u], &params.lo) {
                        if lo_drop(z_tilde, l_bits, &params.lo) > 0 {
                            let pre_hol = states[u].queue.hol().unwrap().arrival_s;
                            for _ in 0..n_frames {
                                let f = states[u].queue.remove(0);
                                if states[u].cache.contains(f.content, f.seq) {
                                    metrics[u].cache_served += 1;
                                } else {
                                    metrics[u].lost += 1;
                                }
                            }
                            let drop_m = match states[u].queue.hol() {
                                Some(f) => (f.arrival_s - pre_hol) * 1000.0,
                                None => z_tilde,
                            };
                            states[u].queue.z_ms =
                                update_hol(z_tilde, phi(true, drop_m, z_tilde));
                        }
                    }
                }
                SchedulerKind::Mlwdf | SchedulerKind::Rr => {}
            }
        }
        if matches!(cfg.scheduler, SchedulerKind::Mlwdf | SchedulerKind::Rr) {
            // Baselines shed heads that are overdue by the end of the slot.
            for (u, n_frames, _bits) in baseline_deadline_drop(&states, cfg.deadline_ms, t + slot_s)
            {
                for _ in 0..n_frames {
                    let f = states[u].queue.remove(0);
                    if states[u].cache.contains(f.content, f.seq) {
                        metrics[u].cache_served += 1;
                    } else {
                        metrics[u].lost += 1;
                    }
                }
            }
        }

        // (5) Arrivals stamped inside the slot join at its end.
        let t_next = t + slot_s;
        let window_end = t_next.min(cfg.duration_s);
        if cfg.load_bps > 0.0 {
            for flow in &flows {
                for frame in arrivals_in(flow, t, window_end) {
                    let u = flow.user;
                    metrics[u].arrived += 1;
                    if enqueue(&mut states[u], frame) == EnqueueOutcome::CacheServed {
                        metrics[u].cache_served += 1;
                    }
                }
            }
        }

        ledger.slots += 1;
        if outcome.is_none() {
            ledger.idle_slots += 1;
        }
        t = t_next;
    }

    ledger.sim_time_s = t;
    for (m, s) in metrics.iter_mut().zip(&states) {
        m.residual = s.queue.len() as u64;
        m.peak_cache = s.cache.peak;
        debug_assert_eq!(
            m.arrived,
            m.delivered + m.lost + m.cache_served + m.residual,
            "frame conservation violated for user {}",
            m.user
        );
    }
    ledger.users = metrics;
    Ok(ledger)
}
