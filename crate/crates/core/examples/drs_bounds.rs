//! DRS with lower and upper bounds: every draw is feasible, but the
//! distribution is not uniform (see `gof_uniformity`).

use drsc::sampler::sample_vectors;
use drsc::{BoundsSpec, DrsSampler};

fn main() -> drsc::Result<()> {
    let bounds = BoundsSpec::new(vec![0.05, 0.0, 0.1, 0.0], vec![0.4, 0.5, 0.8, 1.0])?;
    let sampler = DrsSampler::new(bounds.clone());
    let (xs, stats) = sample_vectors(&sampler, 20_000, 3, 1)?;
    let all_ok = xs.iter().all(|x| bounds.contains(x.as_slice()));
    println!("{} draws, all within bounds: {all_ok}", xs.len());
    println!("rescale steps per draw: {:.3}", stats.rescales_per_sample());
    for x in xs.iter().take(5) {
        println!("  {:.4?}", x.as_slice());
    }
    Ok(())
}
