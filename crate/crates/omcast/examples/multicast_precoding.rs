//! Multicast precoding: a shared beam serves several receivers at once.
//! Shows the unit power budget, the per-member rates, and how the group
//! rate is pinned by its weakest member.

use num_complex::Complex64;
use omcast::phy::{
    multicast_precoder, user_rate, ChannelMatrix, ChannelModel, NoiseModel, PhyConfig,
};

fn main() {
    let cfg = PhyConfig::default();
    let noise = NoiseModel::default();
    let model = ChannelModel::new(cfg.clone()).expect("default config is valid");

    // Draw three users at the same average gain and grow the group.
    let gain = 50.0;
    let channels: Vec<ChannelMatrix> =
        (0..3).map(|u| model.draw(u, gain, 9, 0)).collect();

    for size in 1..=3 {
        let members: Vec<&ChannelMatrix> = channels.iter().take(size).collect();
        let prec = multicast_precoder(&members).expect("non-degenerate draws");
        let rates: Vec<f64> = members.iter().map(|ch| user_rate(ch, &prec, &noise)).collect();
        let min = rates.iter().cloned().fold(f64::INFINITY, f64::min);
        println!(
            "group of {size}: peak subcarrier power {:.6}  member rates {:?}  min {min:.3} b/s/Hz",
            prec.max_norm_sq(),
            rates.iter().map(|r| (r * 1000.0).round() / 1000.0).collect::<Vec<_>>(),
        );
    }
    println!("(the shared beam cannot favor one member for free: the minimum rules)\n");

    // A hand-checkable case: two single-subcarrier, orthogonal channels of
    // unit norm. The combined beam splits power evenly, so each member sees
    // |h w|^2 = 1/2 and rate log2(1 + 0.5) with unit noise.
    let e0 = ChannelMatrix::from_data(
        0,
        0,
        1,
        1,
        2,
        vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    )
    .unwrap();
    let e1 = ChannelMatrix::from_data(
        1,
        0,
        1,
        1,
        2,
        vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    )
    .unwrap();
    let prec = multicast_precoder(&[&e0, &e1]).unwrap();
    let r0 = user_rate(&e0, &prec, &noise);
    let expected = 1.5f64.log2();
    println!("orthogonal pair: rate {r0:.12} b/s/Hz, log2(1.5) = {expected:.12}");
    println!("difference: {:.2e}", (r0 - expected).abs());
}
