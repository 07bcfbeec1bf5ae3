//! Writes an SVG scatter of DRSC draws on the x1 x2 <= 0.1 region.
//! Usage: render_scatter [out.svg]

use drsc::sampler::sample_vectors;
use drsc::simplex::project_to_plane;
use drsc::svg::scatter_svg;
use drsc::{ConstraintSet, DrscSampler, Monomial, PolynomialConstraint};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "scatter.svg".into());
    let cs = ConstraintSet::new(3)?
        .with_nonlinear(PolynomialConstraint::new(vec![Monomial { coef: 1.0, exponents: vec![1, 1, 0] }], 0.1)?)?;
    let (xs, _) = sample_vectors(&DrscSampler::new(cs)?, 3000, 2, 1)?;
    let pts = xs.iter().map(project_to_plane).collect::<drsc::Result<Vec<_>>>()?;
    std::fs::write(&out, scatter_svg(&pts))?;
    println!("wrote {} points to {out}", pts.len());
    Ok(())
}
