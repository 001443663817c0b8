//! Compare the pseudo-inverses against the brute-force definitions on random
//! curves. Needs the `testing` feature.
//!
//! `cargo run --features testing --example differential -- [seed] [count]`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use upp_nc::oracle::{oracle_lpi_unbounded, oracle_upi_unbounded, random_curve, random_kind, scan_points, GeneratorConfig};
use upp_nc::pseudoinverse::{lower_pseudo_inverse, upper_pseudo_inverse};
use upp_nc::numeric::Rational;
use upp_nc::Result;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let count = args.next().and_then(|s| s.parse().ok()).unwrap_or(50);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = GeneratorConfig::default();
    let (mut probes, mut mismatches) = (0usize, 0usize);
    for _ in 0..count {
        let kind = random_kind(&mut rng);
        let f = random_curve(&mut rng, kind, &cfg);
        let lo = lower_pseudo_inverse(&f)?;
        let up = upper_pseudo_inverse(&f)?;
        let horizon = lo.pseudo_period_start() + lo.pseudo_period_length() * Rational::from_integer(2.into());
        for y in scan_points(&lo, &horizon, &Rational::new(1.into(), 4.into())) {
            probes += 2;
            mismatches += usize::from(lo.value_at(&y)? != oracle_lpi_unbounded(&f, &y));
            mismatches += usize::from(up.value_at(&y)? != oracle_upi_unbounded(&f, &y));
        }
    }
    println!("{count} curves, {probes} probes, {mismatches} mismatches");
    Ok(())
}
