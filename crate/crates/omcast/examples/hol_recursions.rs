//! The delay-register pipeline, step by step: how the head-of-line (HOL)
//! register Z ages, relaxes on service, and drives the drop decision.

use omcast::queueing::{
    phi, psi, update_hol, update_intermediate_hol, update_queue_length,
};

fn main() {
    let eps = 1000.0; // register ms per second of real time

    println!("a queue whose head has waited 50 ms gets served;");
    println!("the next head arrived 30 ms later, so the HOL gap M = 30 ms:");
    let z = 50.0;
    let m = 30.0;
    let p = psi(true, m, z, 0.0, eps);
    let zt = update_intermediate_hol(z, p);
    println!("  psi  = min(M, Z)        = {p} ms");
    println!("  Z~   = max(0, Z - psi)  = {zt} ms  (the new head's current wait)\n");

    println!("an unserved queue just ages by the slot it sat through:");
    let slot_s = 0.002;
    let p_idle = psi(false, 0.0, 40.0, slot_s, eps);
    let zt_idle = update_intermediate_hol(40.0, p_idle);
    println!("  psi  = -eps*T           = {p_idle} ms");
    println!("  Z~   = Z - psi          = {zt_idle} ms  (40 ms + 2 ms slot)\n");

    println!("dropping relaxes the register the same way service does:");
    let zt2 = 203.0;
    let f = phi(true, 8.0, zt2);
    let z_next = update_hol(zt2, f);
    println!("  Z~   = {zt2} ms, dropped prefix moves HOL up by M' = 8 ms");
    println!("  phi  = min(M', Z~)      = {f} ms");
    println!("  Z'   = max(0, Z~ - phi) = {z_next} ms\n");

    println!("queue length bookkeeping is exact in bits:");
    let q = update_queue_length(40_000, 16_000, 8_000, 24_000);
    println!("  40000 - served 16000 - dropped 8000 + arrived 24000 = {q} bits");

    println!("\nemptied queues reset: serving the whole backlog returns psi = Z,");
    let p_all = psi(true, 120.0, 120.0, 0.0, eps);
    println!("  psi = {p_all} ms, so Z~ = {}", update_intermediate_hol(120.0, p_all));
}
