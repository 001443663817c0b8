//! Per-flow strict service curve of an IWRR scheduler, and the time saved by
//! the specialized composition.
//!
//! `cargo run --release --example iwrr [config.json]`

use upp_nc::cli::run_bench;
use upp_nc::ncops::{iwrr_gamma, iwrr_psi, iwrr_service_curve, iwrr_u, IwrrConfig};
use upp_nc::numeric::Rational;
use upp_nc::Result;

fn main() -> Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/iwrr-default.json").into());
    let text = std::fs::read_to_string(&path).map_err(|e| upp_nc::Error::Parse(format!("{path}: {e}")))?;
    let cfg = IwrrConfig::from_json(&text)?;

    println!("flow {} of {}, L_tot = {}", cfg.flow_index, cfg.weights.len(), cfg.l_tot());
    let l = &cfg.min_packet[cfg.flow_index - 1];
    for k in 0..cfg.weights[cfg.flow_index - 1] {
        let x = Rational::from_integer(k.into()) * l;
        println!("  psi({x}) = {}", iwrr_psi(&x, &cfg));
    }
    println!("U:     {}", iwrr_u(&cfg)?.parameters_text());
    println!("gamma: {}", iwrr_gamma(&cfg)?.parameters_text());
    let service = iwrr_service_curve(&cfg)?;
    println!("beta_i = gamma o beta: {}", service.parameters_text());

    let r = run_bench(&cfg, 9)?;
    println!("\n{:>12} {:>10} {:>10} {:>10}", "", "p25 ms", "p50 ms", "p75 ms");
    for row in [&r.general, &r.specialized] {
        let ms = |d: std::time::Duration| format!("{:.3}", d.as_secs_f64() * 1e3);
        println!("{:>12} {:>10} {:>10} {:>10}", row.label, ms(row.p25), ms(row.p50), ms(row.p75));
    }
    println!("median ratio {:.1}, equal results: {}", r.median_ratio(), r.equivalent);
    Ok(())
}
