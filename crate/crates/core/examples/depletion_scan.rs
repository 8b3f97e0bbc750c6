//! Bracket the smallest condensate that survives uniform depletion.

use condensate_linear::config::RunConfig;
use condensate_linear::pipeline::run_scan;

fn main() -> condensate_linear::Result<()> {
    let cfg = RunConfig::from_toml(condensate_linear::acceptance::DEPLETION_CFG)?;
    let scan = run_scan(&cfg, None)?;
    for r in &scan.rows {
        let (v, what) = if r.admissible { ("admissible", "margin") } else { ("breakdown", "τ*") };
        println!("m_c0 = {:>5.2}  {v:<10}  {what} = {:.6e}", r.m_c0, r.margin_or_tau_star);
    }
    println!("sup g = {:.9}", scan.sup_g);
    if let Some(t) = scan.threshold {
        println!("threshold m_c0* = {t:.9}, squared/2 = {:.9}", t * t / 2.0);
    }
    Ok(())
}
