//! The damping function: small-x slope, large-x power law and a short table.

use condensate_linear::gamma::{gamma_paper, phi_integral, small_x_slope};

fn main() -> condensate_linear::Result<()> {
    let slope = small_x_slope([1e-2, 5e-3, 2.5e-3], 1e-12)?;
    println!("lim Γ(x)/x  = {slope:.10}   (π⁴/15 = {:.10})", std::f64::consts::PI.powi(4) / 15.0);
    println!("∫ y²/sinh y = {:.10}", phi_integral(1e-13));
    println!();
    println!("{:>8} {:>16} {:>12} {:>10}", "x", "Γ(x)", "error", "Γ/x⁵");
    for x in [0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0] {
        let g = gamma_paper(x, 1e-10)?;
        println!("{x:>8} {:>16.9e} {:>12.2e} {:>10.6}", g.value, g.error, g.value / x.powi(5));
    }
    Ok(())
}
