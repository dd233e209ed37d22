//! Deterministic discrete-event simulator for a single-AP downlink WLAN with
//! opportunistic multicast and delay-aware scheduling.
//!
//! Start with the runnable examples:
//!
//! ```text
//! cargo run --release -p omcast --example channel_model
//! cargo run --release -p omcast --example multicast_precoding
//! cargo run --release -p omcast --example link_adaptation
//! cargo run --release -p omcast --example mac_timing
//! cargo run --release -p omcast --example hol_recursions
//! cargo run --release -p omcast --example lo_scoring
//! cargo run --release -p omcast --example single_session
//! cargo run --release -p omcast --example compare_schedulers
//! cargo run --release -p omcast --example capacity_search
//! cargo run --release -p omcast --example cache_growth
//! ```
//!
//! A thin CLI (`omcast run | capacity | sweep-snr`) wraps the same library
//! entry points for batch experiments; see the README.

pub mod config;
pub mod mac;
pub mod output;
pub mod phy;
pub mod queueing;
pub mod rng;
pub mod scheduler;
pub mod sim;
pub mod traffic;
