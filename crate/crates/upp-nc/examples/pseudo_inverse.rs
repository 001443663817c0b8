//! Lower and upper pseudo-inverses, on whole curves and on finite sequences.
//!
//! `cargo run --example pseudo_inverse`

use upp_nc::ncops::{constant, rate_latency, stair};
use upp_nc::numeric::{int, rat};
use upp_nc::pseudoinverse::{
    lower_pseudo_inverse, lower_pseudo_inverse_at, lower_pseudo_inverse_sequence, upper_pseudo_inverse,
};
use upp_nc::Result;

fn main() -> Result<()> {
    let f = stair(int(1), int(1))?;
    let lo = lower_pseudo_inverse(&f)?;
    let up = upper_pseudo_inverse(&f)?;
    println!("f = ceil(t): {}", f.parameters_text());
    println!("lpi(f): {}", lo.parameters_text());
    println!("upi(f): {}", up.parameters_text());
    println!("{:>5} {:>8} {:>8}", "y", "lpi", "upi");
    for k in 0..9 {
        let y = rat(k, 2);
        println!("{:>5} {:>8} {:>8}", y.to_string(), lo.value_at(&y)?.to_string(), up.value_at(&y)?.to_string());
    }

    // lpi(lpi(f)) gives back a left-continuous f.
    let back = lower_pseudo_inverse(&lo)?;
    println!("\nlpi(lpi(f)) equivalent to f: {}", back.equivalent(&f));

    // Rate-latency curves swap their period and height.
    let beta = rate_latency(int(3), int(2))?;
    println!("beta {} -> lpi {}", beta.parameters_text(), lower_pseudo_inverse(&beta)?.parameters_text());

    // A single value, without building the whole inverse.
    println!("lpi(beta)(9) = {}", lower_pseudo_inverse_at(&beta, &int(9))?);

    // An ultimately constant curve never reaches values above its level.
    let level = lower_pseudo_inverse(&constant(int(2)))?;
    println!("lpi(2)(2) = {}, lpi(2)(5/2) = {}", level.value_at(&int(2))?, level.value_at(&rat(5, 2))?);

    // By-sequence variant on a finite piece.
    let s = f.cut(&int(0), &int(3), false)?;
    let inv = lower_pseudo_inverse_sequence(&s)?;
    println!("\nby-sequence lpi of ceil on [0, 3[:");
    for e in inv.elements() {
        println!("  {e}");
    }
    Ok(())
}
