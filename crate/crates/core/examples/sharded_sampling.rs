//! Sharded sampling is a pure function of (seed, threads): reruns match bitwise,
//! and a different thread count gives a different but equally valid stream.

use drsc::sampler::sample_vectors;
use drsc::{ConstraintSet, LinearConstraint, RejectionSampler};

fn main() -> drsc::Result<()> {
    let cs = ConstraintSet::new(4)?.with_linear(LinearConstraint::le(vec![1.0, 1.0, 0.0, 0.0], 0.5)?)?;
    let s = RejectionSampler::new(cs);
    let (a, _) = sample_vectors(&s, 100_000, 9, 4)?;
    let (b, _) = sample_vectors(&s, 100_000, 9, 4)?;
    let (c, stats) = sample_vectors(&s, 100_000, 9, 1)?;
    println!("4 threads twice, identical: {}", a == b);
    println!("1 thread vs 4 threads, identical: {}", a == c);
    println!("acceptance rate {:.4}", stats.acceptance_rate());
    Ok(())
}
