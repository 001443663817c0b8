//! Delay bound of a token-bucket flow through a rate-latency server, then
//! through a server that only serves in bursts.
//!
//! `cargo run --example delay_bound`

use upp_nc::ncops::{convolve_with_rate_latency, horizontal_deviation, leaky_bucket, rate_latency, stair};
use upp_nc::numeric::{int, rat};
use upp_nc::Result;

fn main() -> Result<()> {
    let alpha = leaky_bucket(int(1), int(1))?;
    let beta = rate_latency(int(2), int(1))?;
    println!("h(leaky-bucket(1, 1), rate-latency(2, 1)) = {}", horizontal_deviation(&alpha, &beta)?);

    // A server that delivers 3 units every 2 time units, smoothed by a link of rate 2.
    let bursts = stair(int(3), int(2))?;
    let smoothed = convolve_with_rate_latency(&bursts, &int(2), &rat(1, 4))?;
    println!("stair(3, 2) * rate-latency(2, 1/4): {}", smoothed.parameters_text());
    for k in 0..9 {
        let t = rat(k, 2);
        println!("  t = {t:>3}: {} -> {}", bursts.value_at(&t)?, smoothed.value_at(&t)?);
    }
    println!("h(leaky-bucket(1, 1), smoothed) = {}", horizontal_deviation(&alpha, &smoothed)?);

    let greedy = leaky_bucket(int(1), int(2))?;
    println!("h(leaky-bucket(1, 2), smoothed) = {}", horizontal_deviation(&greedy, &smoothed)?);
    Ok(())
}
