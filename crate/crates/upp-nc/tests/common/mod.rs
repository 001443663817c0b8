#![allow(dead_code)]

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use upp_nc::numeric::Rational;
use upp_nc::oracle::scan_points;
use upp_nc::Curve;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Breakpoints of `f` on `[0, horizon]` and the midpoints between them.
pub fn probe_points(f: &Curve, horizon: &Rational) -> Vec<Rational> {
    let pts = scan_points(f, horizon, &Rational::zero());
    let two = Rational::from_integer(2.into());
    let mut out = Vec::with_capacity(2 * pts.len());
    for w in pts.windows(2) {
        out.push(w[0].clone());
        out.push((&w[0] + &w[1]) / &two);
    }
    out.extend(pts.last().cloned());
    out
}

/// One period past the start of the periodic part, twice.
pub fn two_periods(f: &Curve) -> Rational {
    let d = f.pseudo_period_length();
    f.pseudo_period_start() + d + d
}
