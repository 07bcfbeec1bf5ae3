//! DRSC on a constraint file: induced simplices, then feasible draws for a
//! linear and a polynomial constraint.

use drsc::sampler::sample_vectors;
use drsc::{compute_thetas, ConstraintSet, DrscSampler};

const INSTANCES: &[(&str, &str)] = &[
    ("sum_ge", r#"{"n": 3, "linear": [{"a": [1, 1, 0], "b": 0.6, "rel": ">="}]}"#),
    ("sum_eq", r#"{"n": 3, "linear": [{"a": [1, 1, 0], "b": 0.6, "rel": "=="}]}"#),
    ("skew_le", r#"{"n": 3, "linear": [{"a": [1, 0.5, 0], "b": 0.6, "rel": "<="}]}"#),
    ("product", r#"{"n": 3, "nonlinear": [{"terms": [{"coef": 1, "exp": [1, 1, 0]}], "b": 0.1}]}"#),
];

fn main() -> drsc::Result<()> {
    for (name, json) in INSTANCES {
        let cs = ConstraintSet::from_json_str(json)?;
        let fam = compute_thetas(&cs)?;
        let sampler = DrscSampler::with_family(cs.clone(), fam.clone());
        let (xs, stats) = sample_vectors(&sampler, 10_000, 11, 1)?;
        let bad = xs.iter().filter(|x| !cs.is_satisfied(x.as_slice())).count();
        println!(
            "{name:>8}: theta {:.4?} empty {:?}  acceptance {:.3}  rescales/draw {:.3}  infeasible {bad}",
            fam.thetas(),
            fam.empty_flags(),
            stats.acceptance_rate(),
            stats.rescales_per_sample(),
        );
    }
    Ok(())
}
