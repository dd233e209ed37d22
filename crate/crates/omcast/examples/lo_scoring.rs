//! The drift-plus-penalty scorer: why it serves whom it serves, when it
//! prefers to idle, and where the register ceiling comes from.

use omcast::scheduler::{idle_score, lo_drop, lo_score, z_max, LoParams};

fn main() {
    let p = LoParams::default();
    println!(
        "parameters: V={} beta={} drop_weight={} eps={} L_max={} T_max={} ms\n",
        p.v,
        p.beta,
        p.drop_weight,
        p.epsilon,
        p.l_max_bits,
        p.t_max_s * 1e3
    );

    // Three candidates competing for one slot. Scores trade the squared
    // register (urgency) against airtime spent for everyone else, plus a
    // throughput reward on the bits the slot would move.
    println!("candidate scores (others' registers sum to 50 ms in every case):");
    let cases = [
        ("long wait, fat burst ", 90.0, 0.0034575, 192_000u64),
        ("long wait, thin burst", 90.0, 0.0016900, 16_000),
        ("short wait, fat burst", 12.0, 0.0034575, 192_000),
    ];
    for (label, z, slot_s, bits) in cases {
        let s = lo_score(z, 50.0, slot_s, bits, &p);
        println!("  {label}: Z={z:>5.1} ms, T={:.4} ms, b={bits:>6} -> score {s:>10.1}", slot_s * 1e3);
    }
    let idle = idle_score(140.0, 0.0005, &p);
    println!("  idling half a millisecond while 140 ms of registers age: {idle:>10.1}");
    println!("  (the scheduler serves only candidates beating the idle option)\n");

    // The drop rule compares the relaxed register against the price of the
    // bits it would throw away; the ceiling is where one frame's price is
    // always paid.
    println!("drop rule on a queue holding one 8000-bit frame:");
    for zt in [150.0, 199.9, 200.0, 230.0] {
        println!("  Z~ = {zt:>6.1} ms -> sheds {} bits", lo_drop(zt, 8000, &p));
    }
    println!(
        "\nregister ceiling z_max = sqrt(V * v * beta * L_max) = {} ms",
        z_max(&p)
    );
    println!("beyond it the scheme sheds backlog rather than let waits grow.");
}
