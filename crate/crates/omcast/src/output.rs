//! Result emission: per-user record streams and summary tables as CSV.
//!
//! All emission is deterministic: rows follow session then user order,
//! numbers use Rust's shortest round-trip formatting, and no timestamps or
//! environment details are embedded. Re-running the same configuration
//! therefore produces byte-identical files.

use std::io;
use std::path::{Path, PathBuf};

use crate::config::AppConfig;
use crate::sim::{SchedulerKind, SessionLedger, SweepPoint};

/// Header of the per-user record stream.
pub const RECORDS_HEADER: &str = "session,user,snr_db,content,arrived,delivered,late,lost,\
cache_served,residual,peak_cache,mean_delay_ms";

/// Header of the capacity/cache summary table.
pub const SUMMARY_HEADER: &str = "scheduler,multicast,load_mbps,capacity,cache_p99";

/// One row of the summary table: the outcome of a capacity search for a
/// scheduler/delivery-mode/load combination, plus the cache statistic
/// observed at the capacity operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub scheduler: SchedulerKind,
    pub multicast: bool,
    pub load_bps: f64,
    pub capacity: usize,
    pub cache_p99: usize,
}

/// Renders one record per session per user, in session-major order.
pub fn records_csv(ledgers: &[SessionLedger]) -> String {
    let mut out = String::from(RECORDS_HEADER);
    out.push('\n');
    for ledger in ledgers {
        for m in &ledger.users {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                ledger.session,
                m.user,
                m.snr_db,
                m.content,
                m.arrived,
                m.delivered,
                m.late,
                m.lost,
                m.cache_served,
                m.residual,
                m.peak_cache,
                m.mean_delay_ms(),
            ));
        }
    }
    out
}

/// Renders the summary table in the given row order.
pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.scheduler.as_str(),
            r.multicast,
            r.load_bps / 1e6,
            r.capacity,
            r.cache_p99,
        ));
    }
    out
}

/// Writes the record stream and a manifest echo of the configuration into
/// `dir`, creating it if needed. Returns the records path.
pub fn write_run_outputs(
    dir: &Path,
    cfg: &AppConfig,
    ledgers: &[SessionLedger],
) -> io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("manifest.cfg"), cfg.serialize())?;
    let records = dir.join("records.csv");
    std::fs::write(&records, records_csv(ledgers))?;
    Ok(records)
}

/// Writes the summary table and a manifest echo into `dir`. Returns the
/// summary path.
pub fn write_summary_outputs(
    dir: &Path,
    cfg: &AppConfig,
    rows: &[SummaryRow],
) -> io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("manifest.cfg"), cfg.serialize())?;
    let summary = dir.join("summary.csv");
    std::fs::write(&summary, summary_csv(rows))?;
    Ok(summary)
}

/// Renders the throughput-versus-SNR staircase: one row per grid point
/// with the adaptive envelope and every fixed-MCS column.
pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let n_rows = points.first().map_or(0, |p| p.per_mcs_mbps.len());
    let mut out = String::from("snr_db,adaptive_mbps");
    for m in 0..n_rows {
        out.push_str(&format!(",mcs{m}_mbps"));
    }
    out.push('\n');
    for p in points {
        out.push_str(&format!("{},{}", p.snr_db, p.adaptive_mbps));
        for v in &p.per_mcs_mbps {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

/// Writes the staircase data and a manifest echo into `dir`. Returns the
/// data path.
pub fn write_sweep_outputs(
    dir: &Path,
    cfg: &AppConfig,
    points: &[SweepPoint],
) -> io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("manifest.cfg"), cfg.serialize())?;
    let sweep = dir.join("snr_sweep.csv");
    std::fs::write(&sweep, sweep_csv(points))?;
    Ok(sweep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{run_many, ScenarioConfig, SimParams};

    fn small_run() -> Vec<SessionLedger> {
        let cfg = ScenarioConfig {
            users: 3,
            duration_s: 2.0,
            sessions: 2,
            case: 2,
            load_bps: 0.5e6,
            seed: 5,
            ..ScenarioConfig::default()
        };
        run_many(&cfg, &SimParams::default()).unwrap()
    }

    #[test]
    fn records_have_one_row_per_user_session() {
        let ledgers = small_run();
        let text = records_csv(&ledgers);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(RECORDS_HEADER));
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 2 * 3);
        // Session-major, user-minor emission order.
        let firsts: Vec<String> = rows
            .iter()
            .map(|r| r.split(',').take(2).collect::<Vec<_>>().join(","))
            .collect();
        assert_eq!(firsts[0], "0,0");
        assert_eq!(firsts[3], "1,0");
        for r in &rows {
            assert_eq!(r.split(',').count(), RECORDS_HEADER.split(',').count());
        }
    }

    #[test]
    fn records_are_byte_identical_across_reruns() {
        let a = records_csv(&small_run());
        let b = records_csv(&small_run());
        assert_eq!(a, b);
    }

    #[test]
    fn summary_renders_loads_in_mbps() {
        let rows = vec![
            SummaryRow {
                scheduler: SchedulerKind::Lo,
                multicast: true,
                load_bps: 0.5e6,
                capacity: 78,
                cache_p99: 41,
            },
            SummaryRow {
                scheduler: SchedulerKind::Rr,
                multicast: false,
                load_bps: 2e6,
                capacity: 19,
                cache_p99: 0,
            },
        ];
        let text = summary_csv(&rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SUMMARY_HEADER);
        assert_eq!(lines[1], "lo,true,0.5,78,41");
        assert_eq!(lines[2], "rr,false,2,19,0");
    }

    #[test]
    fn sweep_rows_carry_every_mcs_column() {
        let points = vec![
            SweepPoint { snr_db: 20.0, adaptive_mbps: 10.0, per_mcs_mbps: vec![5.0, 9.0] },
            SweepPoint { snr_db: 30.0, adaptive_mbps: 20.0, per_mcs_mbps: vec![5.5, 19.0] },
        ];
        let text = sweep_csv(&points);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "snr_db,adaptive_mbps,mcs0_mbps,mcs1_mbps");
        assert_eq!(lines[1], "20,10,5,9");
        assert_eq!(lines[2], "30,20,5.5,19");
    }

    #[test]
    fn run_outputs_land_in_a_fresh_directory() {
        let dir = std::env::temp_dir().join(format!("omcast-out-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let cfg = crate::config::AppConfig::default();
        let ledgers = small_run();
        let records = write_run_outputs(&dir, &cfg, &ledgers).unwrap();
        assert!(records.exists());
        let manifest = std::fs::read_to_string(dir.join("manifest.cfg")).unwrap();
        assert_eq!(
            crate::config::AppConfig::parse_str(&manifest).unwrap(),
            cfg,
            "manifest echo must parse back to the same configuration"
        );
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
