//! Assemble the linearized operator on a coarse grid and check its structure.

use condensate_linear::collision::{
    assemble_linearized, damping_coefficient, expected_half_ratio, q3_radial, ReductionConstants,
};
use condensate_linear::gamma::{gamma_table, ArgumentScale};
use condensate_linear::grid::{build_grid, equilibrium_weights};
use condensate_linear::spectral::{spectral_decompose, Eigensolver};

fn main() -> condensate_linear::Result<()> {
    let grid = build_grid(20.0, 200)?;
    let w = equilibrium_weights(&grid);
    let consts = ReductionConstants::default();
    let op = assemble_linearized(&grid, &w, &consts);

    let q = q3_radial(&w.n0, &grid, &consts)?;
    let worst = q.rate.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    println!("max |Q₃(n₀)|          {worst:.2e}");
    println!("‖A k‖ / ‖A‖‖k‖        {:.2e}", op.kernel_residual(grid.nodes()));

    let eig = spectral_decompose(&op, &grid, 1e-12, Eigensolver::Jacobi)?;
    println!("λ_min                 {:.6e}", eig.lambda_min());
    println!("slowest eigenvalue    {:.6e}", eig.slowest_rate());
    println!("kernel dimension      {}", eig.kernel_count(1e-9));

    let table = gamma_table(&grid, ArgumentScale::Half, 1e-10)?;
    let r = damping_coefficient(&op, &grid, &w, &table)?;
    println!(
        "d/(M Γ(k/2))          {:.9} on rows {}..{} (spread {:.1e}), expected {:.9}",
        r.mean_ratio,
        r.resolved.0,
        r.resolved.1,
        r.spread_resolved,
        expected_half_ratio(&consts)
    );
    Ok(())
}
