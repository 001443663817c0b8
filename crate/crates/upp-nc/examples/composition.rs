//! Composition `f ∘ g`, with and without the ultimately affine shortcuts.
//!
//! `cargo run --example composition`

use upp_nc::composition::{compose_with, ComposeMode};
use upp_nc::ncops::{rate_latency, stair};
use upp_nc::numeric::{int, rat};
use upp_nc::{Curve, Result};

fn show(name: &str, f: &Curve, g: &Curve) -> Result<()> {
    println!("== {name}");
    for mode in [ComposeMode::Auto, ComposeMode::ForceGeneral] {
        let (h, report) = compose_with(f, g, mode)?;
        println!("{mode:?}: h {}", h.parameters_text());
        for line in report.to_string().lines() {
            println!("    {line}");
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    let doubling = rate_latency(int(2), int(0))?;
    let ceil = stair(int(1), int(1))?;
    let h = upp_nc::composition::compose(&doubling, &ceil)?;
    let samples: Vec<String> = (0..8).map(|k| h.value_at(&rat(k, 2)).map(|v| v.to_string())).collect::<Result<_>>()?;
    println!("2 * ceil(t) at t = 0, 1/2, ..., 7/2: {}\n", samples.join(", "));

    // Two staircases with integer periods: d_h = d_f * d_g, c_h = c_f * c_g.
    show("stair(3, 2) o stair(4, 5)", &stair(int(3), int(2))?, &stair(int(4), int(5))?)?;

    // Fractional parameters inflate the general period; the inner rate-latency
    // curve lets the specialized path keep one period of f.
    show("stair(1/2, 7/3) o rate-latency(11/2, 1)", &stair(rat(1, 2), rat(7, 3))?, &rate_latency(rat(11, 2), int(1))?)?;
    Ok(())
}
