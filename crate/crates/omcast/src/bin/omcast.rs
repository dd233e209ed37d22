//! Command-line front end: runs scenarios, searches user capacity, and
//! tabulates the throughput-versus-SNR staircase. All heavy lifting lives
//! in the library; this binary only resolves the configuration, dispatches,
//! and reports.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use omcast::config::{AppConfig, ConfigError, ENV_CONFIG};
use omcast::output::{write_run_outputs, write_summary_outputs, write_sweep_outputs, SummaryRow};
use omcast::sim::{
    capacity_and_cache, run_many, system_outage, throughput_sweep, user_outage, ScenarioConfig,
    SchedulerKind,
};

#[derive(Parser)]
#[command(
    name = "omcast",
    version,
    about = "Deterministic downlink simulator for opportunistic multicast scheduling"
)]
struct Cli {
    /// Configuration file; defaults to $OMCAST_CONFIG, else built-ins.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the configured scenario and write one record per session per user.
    Run,
    /// Search the supported user count for scheduler and delivery-mode combinations.
    Capacity {
        /// Traffic loads in Mbit/s (default: the configured load).
        #[arg(long, value_delimiter = ',', value_name = "MBPS")]
        loads: Vec<f64>,
        /// Smallest user count probed.
        #[arg(long, default_value_t = 4)]
        k_min: usize,
        /// Largest user count probed.
        #[arg(long, default_value_t = 120)]
        k_max: usize,
    },
    /// Tabulate single-user MAC throughput against SNR (adaptive + fixed MCS).
    SweepSnr {
        /// Lowest SNR grid point, dB.
        #[arg(long, default_value_t = 0.0)]
        from_db: f64,
        /// Highest SNR grid point, dB.
        #[arg(long, default_value_t = 45.0)]
        to_db: f64,
        /// Grid spacing, dB.
        #[arg(long, default_value_t = 1.0)]
        step_db: f64,
        /// Channel draws averaged per grid point.
        #[arg(long, default_value_t = 200)]
        draws: usize,
    },
}

fn resolve_config(flag: Option<PathBuf>) -> Result<AppConfig, ConfigError> {
    if let Some(path) = flag {
        return AppConfig::load(&path);
    }
    if let Some(path) = std::env::var_os(ENV_CONFIG) {
        return AppConfig::load(std::path::Path::new(&path));
    }
    Ok(AppConfig::default())
}

fn cmd_run(cfg: &AppConfig) -> Result<(), Box<dyn std::error::Error>> {
    let ledgers = run_many(&cfg.scenario, &cfg.params)?;
    let path = write_run_outputs(&cfg.out_dir, cfg, &ledgers)?;
    let total: usize = ledgers.iter().map(|l| l.users.len()).sum();
    let bad: usize = ledgers
        .iter()
        .flat_map(|l| l.users.iter())
        .filter(|m| user_outage(m))
        .count();
    let max_z = ledgers.iter().fold(0.0f64, |a, l| a.max(l.max_z_ms));
    println!(
        "scheduler={} multicast={} users={} sessions={}: outage {}/{} user-sessions \
         (system {}), max Z {:.1} ms",
        cfg.scenario.scheduler.as_str(),
        cfg.scenario.multicast,
        cfg.scenario.users,
        cfg.scenario.sessions,
        bad,
        total,
        if system_outage(&ledgers) { "OUTAGE" } else { "ok" },
        max_z,
    );
    println!("wrote {} ({} records)", path.display(), total);
    Ok(())
}

fn cmd_capacity(
    cfg: &AppConfig,
    loads_mbps: &[f64],
    k_min: usize,
    k_max: usize,
) -> Result<(), Box<dyn std::error::Error>> {
    let loads: Vec<f64> = if loads_mbps.is_empty() {
        vec![cfg.scenario.load_bps]
    } else {
        loads_mbps.iter().map(|m| m * 1e6).collect()
    };
    let mut rows = Vec::new();
    for &load_bps in &loads {
        for scheduler in [SchedulerKind::Lo, SchedulerKind::Mlwdf, SchedulerKind::Rr] {
            for multicast in [true, false] {
                let template = ScenarioConfig {
                    scheduler,
                    multicast,
                    load_bps,
                    ..cfg.scenario.clone()
                };
                let (capacity, cache_p99) =
                    capacity_and_cache(&template, &cfg.params, k_min, k_max)?;
                println!(
                    "load={}M scheduler={} multicast={}: capacity={} cache_p99={}",
                    load_bps / 1e6,
                    scheduler.as_str(),
                    multicast,
                    capacity,
                    cache_p99,
                );
                rows.push(SummaryRow { scheduler, multicast, load_bps, capacity, cache_p99 });
            }
        }
    }
    let path = write_summary_outputs(&cfg.out_dir, cfg, &rows)?;
    println!("wrote {} ({} rows)", path.display(), rows.len());
    Ok(())
}

fn cmd_sweep(
    cfg: &AppConfig,
    from_db: f64,
    to_db: f64,
    step_db: f64,
    draws: usize,
) -> Result<(), Box<dyn std::error::Error>> {
    if !(step_db > 0.0) || to_db < from_db || draws == 0 {
        return Err("sweep grid must satisfy from_db <= to_db, step_db > 0, draws > 0".into());
    }
    let mut snrs = Vec::new();
    let mut s = from_db;
    while s <= to_db + 1e-9 {
        snrs.push(s);
        s += step_db;
    }
    let points = throughput_sweep(
        &cfg.params,
        &snrs,
        draws,
        cfg.scenario.frame_bits,
        cfg.scenario.seed,
    )?;
    let path = write_sweep_outputs(&cfg.out_dir, cfg, &points)?;
    println!("wrote {} ({} grid points)", path.display(), points.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve_config(cli.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.cmd {
        Cmd::Run => cmd_run(&cfg),
        Cmd::Capacity { loads, k_min, k_max } => cmd_capacity(&cfg, &loads, k_min, k_max),
        Cmd::SweepSnr { from_db, to_db, step_db, draws } => {
            cmd_sweep(&cfg, from_db, to_db, step_db, draws)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
