//! Two-phase simplex on a small bounded LP, plus an infeasible one.

use drsc::lp::{solve, LinearProgram};

fn main() -> drsc::Result<()> {
    // max x1 over the simplex with x1 + 0.5 x2 <= 0.6.
    let lp = LinearProgram::new(3)
        .maximize(vec![1.0, 0.0, 0.0])
        .bounds(0.0, 1.0)
        .eq(vec![1.0; 3], 1.0)
        .le(vec![1.0, 0.5, 0.0], 0.6);
    let sol = solve(&lp)?;
    println!("status {:?}, value {:.6}, point {:.6?}", sol.status, sol.objective_value, sol.point);
    println!("certificate {:?}", sol.certificate);

    let empty = LinearProgram::new(2).maximize(vec![1.0, 1.0]).bounds(0.0, 1.0).ge(vec![1.0, 1.0], 3.0);
    let sol = solve(&empty)?;
    println!("status {:?}, phase-one residual {:.3}", sol.status, sol.certificate.phase_one_objective);
    Ok(())
}
