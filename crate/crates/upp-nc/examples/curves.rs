//! Build a few standard curves, evaluate them, cut them and print their shape.
//!
//! `cargo run --example curves`

use upp_nc::ncops::{delay_element, leaky_bucket, rate_latency, stair};
use upp_nc::numeric::{format_rational, int, rat};
use upp_nc::{Curve, Result};

fn describe(name: &str, c: &Curve) -> Result<()> {
    let cls = c.classify();
    let shape = if cls.is_wui {
        "weakly ultimately infinite"
    } else if cls.is_uc {
        "ultimately constant"
    } else if cls.ua.is_some() {
        "ultimately affine"
    } else {
        "ultimately pseudo-periodic"
    };
    println!("{name}: {} ({shape})", c.parameters_text());
    let values: Vec<String> = (0..6).map(|k| c.value_at(&rat(k, 2)).map(|v| v.to_string())).collect::<Result<_>>()?;
    println!("  f(0), f(1/2), ..., f(5/2) = {}", values.join(", "));
    Ok(())
}

fn main() -> Result<()> {
    let staircase = stair(rat(1, 2), rat(3, 4))?;
    describe("stair(1/2, 3/4)", &staircase)?;
    describe("rate-latency(2, 1)", &rate_latency(int(2), int(1))?)?;
    describe("leaky-bucket(1, 1)", &leaky_bucket(int(1), int(1))?)?;
    describe("delay(3)", &delay_element(int(3))?)?;

    // Unroll a few periods of the staircase into a finite sequence.
    let cut = staircase.cut(&int(0), &int(3), true)?;
    println!("\nstaircase on [0, 3] has {} elements:", cut.len());
    for e in cut.elements() {
        println!("  {e}");
    }

    let t = rat(7, 2);
    println!("\nstaircase({}) = {}", format_rational(&t), staircase.value_at(&t)?);

    // The same function with a longer transient is recognised as equivalent
    // and shrinks back under minimization.
    let long = Curve::new(staircase.cut(&int(0), &rat(9, 4), false)?, rat(3, 2), rat(3, 4), rat(1, 2))?;
    println!("long form {} equivalent: {}", long.parameters_text(), long.equivalent(&staircase));
    println!("minimized: {}", long.minimize().parameters_text());

    println!("\n{}", staircase.to_json());
    Ok(())
}
