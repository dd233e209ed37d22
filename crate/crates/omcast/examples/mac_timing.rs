//! MAC slot anatomy: sounding, feedback, data, and acknowledgement
//! overheads, and how many whole frames fit one TXOP at each rate.

use omcast::mac::{max_whole_frames, overhead_s, slot_duration, TimingModel};
use omcast::phy::McsTable;

fn main() {
    let timing = TimingModel::default();
    let table = McsTable::default_20mhz();
    let t_max_s = 3e-3;
    let frame_bits = 8000;

    println!("per-slot exchange overhead by destination count:");
    for group in 1..=4 {
        println!("  {group} destination(s): {:>8.1} us", overhead_s(group, &timing) * 1e6);
    }
    println!(
        "  (each extra destination adds {:.1} us of polling and feedback)\n",
        (overhead_s(2, &timing) - overhead_s(1, &timing)) * 1e6
    );

    println!("whole 8000-bit frames that fit a {} ms TXOP:", t_max_s * 1e3);
    println!("{:>6} {:>11} {:>8} {:>12} {:>13}", "mcs", "rate_mbps", "frames", "airtime_ms", "full_slot_ms");
    for e in table.entries() {
        let rate = e.rate_mbps * 1e6;
        let frames = max_whole_frames(t_max_s, rate, frame_bits);
        let bits = frames as u64 * frame_bits;
        let airtime = bits as f64 / rate;
        let slot = slot_duration(4, bits, rate, &timing);
        println!(
            "{:>6} {:>11.1} {:>8} {:>12.3} {:>13.3}",
            format!("mcs{}", e.index),
            e.rate_mbps,
            frames,
            airtime * 1e3,
            slot * 1e3
        );
    }
    println!(
        "\nthe TXOP budget caps data airtime; overhead rides on top, so a \
         4-destination slot at mcs7 runs {:.4} ms total",
        slot_duration(4, 24 * frame_bits, 65e6, &timing) * 1e3
    );
}
