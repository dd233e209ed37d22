//! Flat key-value configuration files.
//!
//! The on-disk format is one `key = value` binding per line, with dotted
//! section prefixes (`phy.*`, `mac.*`, `lo.*`, `traffic.*`, `sim.*`),
//! `#` comments, and blank lines. Every key has a default, so an empty
//! file is a valid configuration; unknown and duplicate keys are rejected
//! with the offending key path and line number. [`AppConfig::serialize`]
//! emits the complete key set in canonical order and round-trips through
//! [`AppConfig::parse_str`] unchanged, which makes it double as the
//! manifest echoed next to result files.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::mac::MacError;
use crate::phy::PhyError;
use crate::scheduler::SchedulerError;
use crate::sim::{ScenarioConfig, SimError, SimParams};

/// Environment variable naming the default configuration file used by the
/// command-line tool when `--config` is not given.
pub const ENV_CONFIG: &str = "OMCAST_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given more than once")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: `{key}` expects {expected}, got `{value}`")]
    BadValue { line: usize, key: String, value: String, expected: &'static str },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Phy(#[from] PhyError),
    #[error(transparent)]
    Mac(#[from] MacError),
    #[error(transparent)]
    Scheduler(#[from] SchedulerError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Complete application configuration: the scenario under study, the
/// physical/MAC/scoring parameters, and where result files go.
#[derive(Debug, Clone, PartialEq)]
pub struct AppConfig {
    pub scenario: ScenarioConfig,
    pub params: SimParams,
    pub out_dir: PathBuf,
}

impl Default for AppConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioConfig::default(),
            params: SimParams::default(),
            out_dir: PathBuf::from("out"),
        }
    }
}

fn parse_as<T: FromStr>(
    key: &str,
    value: &str,
    line: usize,
    expected: &'static str,
) -> Result<T, ConfigError> {
    value.parse::<T>().map_err(|_| ConfigError::BadValue {
        line,
        key: key.to_string(),
        value: value.to_string(),
        expected,
    })
}

impl AppConfig {
    /// Parses a configuration text into defaults-plus-overrides and
    /// validates the result.
    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = AppConfig::default();
        let mut seen: HashSet<String> = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let content = content.trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                text: content.to_string(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(ConfigError::DuplicateKey { line, key: key.to_string() });
            }
            cfg.apply(key, value, line)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and parses the file at `path`.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::parse_str(&std::fs::read_to_string(path)?)
    }

    /// Re-checks every constraint on the current values.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params.phy.validate()?;
        self.params.timing.validate()?;
        self.params.lo.validate()?;
        self.scenario.validate()?;
        Ok(())
    }

    fn apply(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        let s = &mut self.scenario;
        let p = &mut self.params;
        match key {
            "phy.n_subcarriers" => p.phy.n_subcarriers = parse_as(key, value, line, "an integer")?,
            "phy.n_tx" => p.phy.n_tx = parse_as(key, value, line, "an integer")?,
            "phy.n_rx" => p.phy.n_rx = parse_as(key, value, line, "an integer")?,
            "phy.n_streams" => p.phy.n_streams = parse_as(key, value, line, "an integer")?,
            "phy.n_taps" => p.phy.n_taps = parse_as(key, value, line, "an integer")?,
            "phy.tap_decay_db" => p.phy.tap_decay_db = parse_as(key, value, line, "a number")?,
            "phy.noise_n0" => p.noise.n0 = parse_as(key, value, line, "a number")?,
            "mac.ndpa_us" => p.timing.ndpa_us = parse_as(key, value, line, "a number")?,
            "mac.ndp_us" => p.timing.ndp_us = parse_as(key, value, line, "a number")?,
            "mac.csi_fb_us_per_user" => {
                p.timing.csi_fb_us_per_user = parse_as(key, value, line, "a number")?
            }
            "mac.csi_poll_us" => p.timing.csi_poll_us = parse_as(key, value, line, "a number")?,
            "mac.data_preamble_us" => {
                p.timing.data_preamble_us = parse_as(key, value, line, "a number")?
            }
            "mac.ack_us_per_user" => {
                p.timing.ack_us_per_user = parse_as(key, value, line, "a number")?
            }
            "mac.ack_req_us" => p.timing.ack_req_us = parse_as(key, value, line, "a number")?,
            "mac.sifs_us" => p.timing.sifs_us = parse_as(key, value, line, "a number")?,
            "mac.difs_us" => p.timing.difs_us = parse_as(key, value, line, "a number")?,
            "mac.backoff_slot_us" => {
                p.timing.backoff_slot_us = parse_as(key, value, line, "a number")?
            }
            "mac.backoff_slots_mean" => {
                p.timing.backoff_slots_mean = parse_as(key, value, line, "a number")?
            }
            "lo.v" => p.lo.v = parse_as(key, value, line, "a number")?,
            "lo.beta" => p.lo.beta = parse_as(key, value, line, "a number")?,
            "lo.drop_weight" => p.lo.drop_weight = parse_as(key, value, line, "a number")?,
            "lo.epsilon" => p.lo.epsilon = parse_as(key, value, line, "a number")?,
            "lo.l_max_bits" => p.lo.l_max_bits = parse_as(key, value, line, "an integer")?,
            "lo.t_max_s" => p.lo.t_max_s = parse_as(key, value, line, "a number")?,
            "traffic.load_mbps" => {
                s.load_bps = parse_as::<f64>(key, value, line, "a number")? * 1e6
            }
            "traffic.frame_bits" => s.frame_bits = parse_as(key, value, line, "an integer")?,
            "traffic.contents" => s.n_contents = parse_as(key, value, line, "an integer")?,
            "sim.scheduler" => {
                s.scheduler = parse_as(key, value, line, "one of lo|mlwdf|rr")?
            }
            "sim.multicast" => s.multicast = parse_as(key, value, line, "true or false")?,
            "sim.users" => s.users = parse_as(key, value, line, "an integer")?,
            "sim.case" => s.case = parse_as(key, value, line, "1 or 2")?,
            "sim.duration_s" => s.duration_s = parse_as(key, value, line, "a number")?,
            "sim.sessions" => s.sessions = parse_as(key, value, line, "an integer")?,
            "sim.seed" => s.seed = parse_as(key, value, line, "an integer")?,
            "sim.deadline_ms" => s.deadline_ms = parse_as(key, value, line, "a number")?,
            "sim.idle_quantum_s" => s.idle_quantum_s = parse_as(key, value, line, "a number")?,
            "sim.retx_limit" => s.retx_limit = parse_as(key, value, line, "an integer")?,
            "sim.max_group" => s.max_group = parse_as(key, value, line, "an integer")?,
            "sim.error_model" => s.error_model = parse_as(key, value, line, "true or false")?,
            "sim.out_dir" => self.out_dir = PathBuf::from(value),
            _ => {
                return Err(ConfigError::UnknownKey { line, key: key.to_string() });
            }
        }
        Ok(())
    }

    /// Emits every key with its current value, in canonical order. The
    /// output parses back to an equal configuration.
    pub fn serialize(&self) -> String {
        let s = &self.scenario;
        let p = &self.params;
        let mut out = String::new();
        out.push_str("# omcast configuration (complete key set)\n");
        let pairs: Vec<(&str, String)> = vec![
            ("phy.n_subcarriers", p.phy.n_subcarriers.to_string()),
            ("phy.n_tx", p.phy.n_tx.to_string()),
            ("phy.n_rx", p.phy.n_rx.to_string()),
            ("phy.n_streams", p.phy.n_streams.to_string()),
            ("phy.n_taps", p.phy.n_taps.to_string()),
            ("phy.tap_decay_db", p.phy.tap_decay_db.to_string()),
            ("phy.noise_n0", p.noise.n0.to_string()),
            ("mac.ndpa_us", p.timing.ndpa_us.to_string()),
            ("mac.ndp_us", p.timing.ndp_us.to_string()),
            ("mac.csi_fb_us_per_user", p.timing.csi_fb_us_per_user.to_string()),
            ("mac.csi_poll_us", p.timing.csi_poll_us.to_string()),
            ("mac.data_preamble_us", p.timing.data_preamble_us.to_string()),
            ("mac.ack_us_per_user", p.timing.ack_us_per_user.to_string()),
            ("mac.ack_req_us", p.timing.ack_req_us.to_string()),
            ("mac.sifs_us", p.timing.sifs_us.to_string()),
            ("mac.difs_us", p.timing.difs_us.to_string()),
            ("mac.backoff_slot_us", p.timing.backoff_slot_us.to_string()),
            ("mac.backoff_slots_mean", p.timing.backoff_slots_mean.to_string()),
            ("lo.v", p.lo.v.to_string()),
            ("lo.beta", p.lo.beta.to_string()),
            ("lo.drop_weight", p.lo.drop_weight.to_string()),
            ("lo.epsilon", p.lo.epsilon.to_string()),
            ("lo.l_max_bits", p.lo.l_max_bits.to_string()),
            ("lo.t_max_s", p.lo.t_max_s.to_string()),
            ("traffic.load_mbps", (s.load_bps / 1e6).to_string()),
            ("traffic.frame_bits", s.frame_bits.to_string()),
            ("traffic.contents", s.n_contents.to_string()),
            ("sim.scheduler", s.scheduler.as_str().to_string()),
            ("sim.multicast", s.multicast.to_string()),
            ("sim.users", s.users.to_string()),
            ("sim.case", s.case.to_string()),
            ("sim.duration_s", s.duration_s.to_string()),
            ("sim.sessions", s.sessions.to_string()),
            ("sim.seed", s.seed.to_string()),
            ("sim.deadline_ms", s.deadline_ms.to_string()),
            ("sim.idle_quantum_s", s.idle_quantum_s.to_string()),
            ("sim.retx_limit", s.retx_limit.to_string()),
            ("sim.max_group", s.max_group.to_string()),
            ("sim.error_model", s.error_model.to_string()),
            ("sim.out_dir", self.out_dir.display().to_string()),
        ];
        for (k, v) in pairs {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::SchedulerKind;

    #[test]
    fn empty_text_yields_defaults() {
        let cfg = AppConfig::parse_str("").unwrap();
        assert_eq!(cfg, AppConfig::default());
    }

    #[test]
    fn comments_blanks_and_spacing_are_tolerated() {
        let text = "\n# leading comment\n  sim.users   =  24  # trailing note\n\n";
        let cfg = AppConfig::parse_str(text).unwrap();
        assert_eq!(cfg.scenario.users, 24);
    }

    #[test]
    fn overrides_land_in_every_section() {
        let text = "\
            phy.n_taps = 6\n\
            phy.noise_n0 = 2.5\n\
            mac.sifs_us = 10\n\
            lo.v = 500\n\
            traffic.load_mbps = 2\n\
            sim.scheduler = mlwdf\n\
            sim.multicast = false\n\
            sim.case = 2\n\
            sim.out_dir = results/run1\n";
        let cfg = AppConfig::parse_str(text).unwrap();
        assert_eq!(cfg.params.phy.n_taps, 6);
        assert_eq!(cfg.params.noise.n0, 2.5);
        assert_eq!(cfg.params.timing.sifs_us, 10.0);
        assert_eq!(cfg.params.lo.v, 500.0);
        assert_eq!(cfg.scenario.load_bps, 2e6);
        assert_eq!(cfg.scenario.scheduler, SchedulerKind::Mlwdf);
        assert!(!cfg.scenario.multicast);
        assert_eq!(cfg.scenario.case, 2);
        assert_eq!(cfg.out_dir, PathBuf::from("results/run1"));
    }

    #[test]
    fn unknown_key_is_rejected_by_path() {
        let err = AppConfig::parse_str("sim.userz = 5\n").unwrap_err();
        match err {
            ConfigError::UnknownKey { line, key } => {
                assert_eq!(line, 1);
                assert_eq!(key, "sim.userz");
            }
            other => panic!("expected UnknownKey, got {other:?}"),
        }
    }

    #[test]
    fn bad_value_names_key_and_expectation() {
        let err = AppConfig::parse_str("sim.users = many\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("sim.users"), "{msg}");
        assert!(msg.contains("integer"), "{msg}");
    }

    #[test]
    fn duplicate_key_is_rejected() {
        let err = AppConfig::parse_str("sim.users = 5\nsim.users = 6\n").unwrap_err();
        assert!(matches!(err, ConfigError::DuplicateKey { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn missing_equals_is_a_syntax_error() {
        let err = AppConfig::parse_str("sim.users 5\n").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 1, .. }), "{err:?}");
    }

    #[test]
    fn invalid_scenario_fails_validation() {
        assert!(AppConfig::parse_str("sim.case = 3\n").is_err());
        assert!(AppConfig::parse_str("sim.users = 0\n").is_err());
        assert!(AppConfig::parse_str("lo.v = -1\n").is_err());
    }

    #[test]
    fn serialize_round_trips_defaults_and_overrides() {
        let default = AppConfig::default();
        let re = AppConfig::parse_str(&default.serialize()).unwrap();
        assert_eq!(re, default);

        for load in ["0.5", "1", "2", "5"] {
            let text = format!(
                "traffic.load_mbps = {load}\nsim.scheduler = rr\nsim.seed = 99\n"
            );
            let cfg = AppConfig::parse_str(&text).unwrap();
            let re = AppConfig::parse_str(&cfg.serialize()).unwrap();
            assert_eq!(re, cfg);
        }
    }

    #[test]
    fn serialize_mentions_every_known_key() {
        // Guards against a new key being applied but dropped from the
        // canonical emission (which would silently break round-trips).
        let text = AppConfig::default().serialize();
        for key in [
            "phy.n_subcarriers",
            "mac.backoff_slots_mean",
            "lo.t_max_s",
            "traffic.load_mbps",
            "sim.error_model",
            "sim.out_dir",
        ] {
            assert!(text.contains(key), "serialized config lacks {key}");
        }
        let re = AppConfig::parse_str(&text).unwrap();
        assert_eq!(re, AppConfig::default());
    }
}
