//! The t^(-1/2) relaxation on the shipped decay configuration.

use condensate_linear::config::RunConfig;
use condensate_linear::pipeline::run_pipeline;

fn main() -> condensate_linear::Result<()> {
    let cfg = RunConfig::from_toml(condensate_linear::acceptance::DECAY_CFG)?;
    let a = run_pipeline(&cfg, None)?;
    let an = &a.analysis;
    if let (Some(u), Some(m)) = (&an.decay_u, &an.decay_mc) {
        println!("fit window t ∈ [{:.1}, {:.1}], {} points", u.window.0, u.window.1, u.points);
        println!("‖u − u∞‖       slope {:.4}  fitted C = {:.3}", u.slope.unwrap(), u.c_fit.unwrap());
        println!("m_c² gap       slope {:.4}  fitted C = {:.3}", m.slope.unwrap(), m.c_fit.unwrap());
    }
    if let Some(b) = an.theorem2_bound {
        println!("combined bound holds: {} (worst ratio {:.3})", b.holds, b.worst_ratio);
    }
    if let Some(n) = an.smallk_norm {
        println!("∫_{{k<1}} u²/k dμ = {:.3} → {:.3} → {:.3} under refinement (marginal: {})", n.value, n.refined[0], n.refined[1], n.marginal);
    }
    Ok(())
}
