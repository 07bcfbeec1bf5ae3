//! Flat Dirichlet draws, the regular sub-simplex rescale and the 2-D projection.

use drsc::simplex::{project_to_plane, rescale_inverse, rescale_to_standard, RegularSubSimplex};
use drsc::{sample_flat_dirichlet, RngState};

fn main() -> drsc::Result<()> {
    let n = 4;
    let draws = 100_000;
    let mut rng = RngState::new(1);
    let mut mean = vec![0.0; n];
    for _ in 0..draws {
        let x = sample_flat_dirichlet(n, &mut rng)?;
        mean.iter_mut().zip(x.as_slice()).for_each(|(m, v)| *m += v / draws as f64);
    }
    println!("marginal means over {draws} draws (expect {:.4}): {mean:.4?}", 1.0 / n as f64);

    // Round trip through the sub-simplex with offset t.
    let sub = RegularSubSimplex::new(vec![0.1, 0.0, 0.2])?;
    let y = sample_flat_dirichlet(3, &mut rng)?;
    let x = rescale_inverse(&y, &sub)?;
    let back = rescale_to_standard(&x, &sub)?;
    println!("y  = {:.6?}", y.as_slice());
    println!("x  = {:.6?}  (inside sub-simplex: {})", x.as_slice(), sub.contains(x.as_slice()));
    println!("y' = {:.6?}", back.as_slice());
    println!("plane(x) = {:.6?}", project_to_plane(&x)?);
    Ok(())
}
