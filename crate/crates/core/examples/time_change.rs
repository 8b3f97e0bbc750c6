//! From τ back to physical time: admissibility, t(τ), and its inverse.

use std::sync::Arc;

use condensate_linear::collision::{assemble_linearized, ReductionConstants};
use condensate_linear::grid::{build_grid, equilibrium_weights};
use condensate_linear::spectral::{spectral_decompose, Eigensolver, MassShift};
use condensate_linear::timechange::{build_map, SamplePolicy};
use condensate_linear::Error;

fn main() -> condensate_linear::Result<()> {
    let grid = build_grid(40.0, 400)?;
    let w = equilibrium_weights(&grid);
    let op = assemble_linearized(&grid, &w, &ReductionConstants::default());
    let eig = spectral_decompose(&op, &grid, 1e-12, Eigensolver::Householder)?;
    let shift: Arc<dyn MassShift> = Arc::new(eig.mass_shift(&vec![-1.0; grid.len()]));
    let taus = SamplePolicy::default().samples();
    println!("lim g = {:.6}", shift.limit().unwrap());

    let map = build_map(10.0, shift.clone(), &taus)?;
    println!("m_c0 = 10: margin {:.4}, q_c(∞) = {:.6}", map.verdict.margin, map.q_inf.unwrap());
    for t in [0.1, 1.0, 10.0, 100.0] {
        let inv = map.invert(t)?;
        println!("  t = {t:>6} → τ = {:.6e}, q_c = {:.6}", inv.tau, map.q_at(inv.tau));
    }

    match build_map(5.0, shift, &taus) {
        Err(Error::Inadmissible { tau_star, g_at }) => {
            println!("m_c0 = 5: breakdown at τ* = {tau_star:.6e} where g = {g_at:.4}")
        }
        other => println!("m_c0 = 5: unexpected {other:?}"),
    }
    Ok(())
}
