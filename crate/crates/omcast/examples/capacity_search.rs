//! User-capacity search: bisect the largest population the system carries
//! without breaking the 1% outage budget.

use omcast::sim::{capacity_search_with, probe_supported, ScenarioConfig, SimParams};

fn main() {
    let template = ScenarioConfig {
        users: 0, // overwritten per probe
        case: 2,
        load_bps: 1e6,
        duration_s: 5.0,
        sessions: 3,
        seed: 11,
        ..ScenarioConfig::default()
    };
    let params = SimParams::default();

    println!("probing supported user counts (3 sessions x 5 s each):");
    let capacity = capacity_search_with(
        |k| {
            let pass = probe_supported(&template, &params, k).expect("valid scenario");
            println!("  k = {k:>3}: {}", if pass { "supported" } else { "outage" });
            pass
        },
        4,
        96,
    );
    println!("\ncapacity = {capacity} users");
    println!("(bisection touches O(log K) points; failing probes stop early,");
    println!(" as soon as the pooled outage budget cannot recover)");
}
