//! Evolve a bump in τ: energy stays fixed, the distance to c·k shrinks and
//! the dμ-mass settles at a new value.

use condensate_linear::collision::{assemble_linearized, ReductionConstants};
use condensate_linear::field::{HarmonicField, Sector};
use condensate_linear::grid::{build_grid, equilibrium_weights};
use condensate_linear::profile::parse_profile;
use condensate_linear::spectral::{spectral_decompose, trajectory, Eigensolver};

fn main() -> condensate_linear::Result<()> {
    let grid = build_grid(40.0, 400)?;
    let w = equilibrium_weights(&grid);
    let op = assemble_linearized(&grid, &w, &ReductionConstants::default());
    let eig = spectral_decompose(&op, &grid, 1e-12, Eigensolver::Householder)?;

    let f0 = parse_profile("gauss_bump(1, 3, 0.5)")?.sample(grid.nodes())?;
    let field = HarmonicField::radial(f0);
    let taus = [0.0, 1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0];
    let traj = trajectory(&eig, &grid, &w, &field, &taus, &[])?;
    let s = traj.sector(Sector::RADIAL)?;
    println!("{:>8} {:>14} {:>14} {:>12}", "τ", "mass", "energy", "‖v − u∞‖");
    for j in 0..taus.len() {
        println!("{:>8} {:>14.8} {:>14.10} {:>12.4e}", taus[j], s.m0[j], s.m1[j], s.dist_to_limit[j]);
    }
    Ok(())
}
