//! Link adaptation: mapping a measured spectral efficiency onto the MCS
//! ladder with a safety margin, and the resulting staircase of PHY rates.

use omcast::phy::{snr_db_to_gain, ChannelModel, McsTable, NoiseModel, PhyConfig};
use omcast::scheduler::unicast_eff;

fn main() {
    let table = McsTable::default_20mhz();
    println!("MCS ladder (20 MHz, margin already folded into the thresholds):");
    for e in table.entries() {
        println!(
            "  mcs{}: {:>5.1} Mbit/s, needs {:>6.4} b/s/Hz on the worst subcarrier",
            e.index, e.rate_mbps, e.required_eff
        );
    }

    let cfg = PhyConfig::default();
    let noise = NoiseModel::default();
    let model = ChannelModel::new(cfg).expect("default config is valid");

    println!("\none fresh channel draw per SNR point (seed 5):");
    println!("{:>7} {:>10} {:>9} {:>11}", "snr_db", "eff", "mcs", "rate_mbps");
    for snr_db in (0..=24).step_by(2) {
        let gain = snr_db_to_gain(snr_db as f64, &noise);
        let ch = model.draw(0, gain, 5, snr_db as u64);
        let eff = unicast_eff(std::slice::from_ref(&ch), 0, &noise);
        match table.select_single(eff) {
            Some(m) => println!(
                "{snr_db:>7} {eff:>10.3} {:>9} {:>11.1}",
                format!("mcs{m}"),
                table.entry(m).rate_mbps
            ),
            None => println!("{snr_db:>7} {eff:>10.3} {:>9} {:>11}", "-", "no link"),
        }
    }
    println!("\n(single draws fade; the staircase is monotone only on average)");
}
