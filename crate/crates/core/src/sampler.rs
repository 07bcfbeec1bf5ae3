//! A common interface over the DRS, DRSC and rejection samplers, plus
//! deterministic sharded sampling.

use serde::Serialize;

use crate::constraints::ConstraintSet;
use crate::drs::{drs_sample, BoundsSpec, DEFAULT_MAX_ITERS};
use crate::drsc::{compute_thetas, drsc_sample, InducedSimplexFamily, DEFAULT_MAX_RESTARTS};
use crate::error::{Error, Result};
use crate::simplex::{flat_dirichlet_unchecked, RngState, SimplexVector};

#[derive(Clone, Debug, PartialEq)]
pub struct Draw {
    pub vector: SimplexVector,
    pub restarts: usize,
    pub rescales: usize,
}

pub trait Sampler: Sync {
    fn dim(&self) -> usize;
    fn name(&self) -> &'static str;
    fn draw(&self, rng: &mut RngState) -> Result<Draw>;
}

#[derive(Clone, Debug)]
pub struct DrsSampler {
    pub bounds: BoundsSpec,
    pub max_iters: usize,
}

impl DrsSampler {
    pub fn new(bounds: BoundsSpec) -> Self {
        DrsSampler { bounds, max_iters: DEFAULT_MAX_ITERS }
    }
}

impl Sampler for DrsSampler {
    fn dim(&self) -> usize {
        self.bounds.dim()
    }

    fn name(&self) -> &'static str {
        "drs"
    }

    fn draw(&self, rng: &mut RngState) -> Result<Draw> {
        let d = drs_sample(&self.bounds, rng, self.max_iters)?;
        Ok(Draw { vector: d.vector, restarts: 0, rescales: d.steps })
    }
}

#[derive(Clone, Debug)]
pub struct DrscSampler {
    pub constraints: ConstraintSet,
    pub family: InducedSimplexFamily,
    pub max_restarts: usize,
}

impl DrscSampler {
    pub fn new(constraints: ConstraintSet) -> Result<Self> {
        let family = compute_thetas(&constraints)?;
        Ok(Self::with_family(constraints, family))
    }

    pub fn with_family(constraints: ConstraintSet, family: InducedSimplexFamily) -> Self {
        DrscSampler { constraints, family, max_restarts: DEFAULT_MAX_RESTARTS }
    }
}

impl Sampler for DrscSampler {
    fn dim(&self) -> usize {
        self.constraints.dim()
    }

    fn name(&self) -> &'static str {
        "drsc"
    }

    fn draw(&self, rng: &mut RngState) -> Result<Draw> {
        let d = drsc_sample(&self.constraints, &self.family, rng, self.max_restarts)?;
        Ok(Draw { vector: d.vector, restarts: d.restarts, rescales: d.rescales })
    }
}

/// Accept-reject from the flat Dirichlet: exactly uniform on the feasible
/// region, used as ground truth.
#[derive(Clone, Debug)]
pub struct RejectionSampler {
    pub constraints: ConstraintSet,
    pub max_attempts: usize,
}

impl RejectionSampler {
    pub fn new(constraints: ConstraintSet) -> Self {
        RejectionSampler { constraints, max_attempts: DEFAULT_MAX_RESTARTS }
    }
}

impl Sampler for RejectionSampler {
    fn dim(&self) -> usize {
        self.constraints.dim()
    }

    fn name(&self) -> &'static str {
        "reject"
    }

    fn draw(&self, rng: &mut RngState) -> Result<Draw> {
        let n = self.constraints.dim();
        for restarts in 0..=self.max_attempts {
            let x = flat_dirichlet_unchecked(n, rng);
            if self.constraints.is_satisfied(x.as_slice()) {
                return Ok(Draw { vector: x, restarts, rescales: 0 });
            }
        }
        Err(Error::SamplingFailure {
            restarts: self.max_attempts,
            accepted: 0,
            acceptance_rate: 1.0 / (self.max_attempts as f64 + 1.0),
        })
    }
}

/// Aggregate counters over a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SamplingStats {
    pub samples: usize,
    pub restarts: usize,
    pub rescales: usize,
}

impl SamplingStats {
    fn record(&mut self, d: &Draw) {
        self.samples += 1;
        self.restarts += d.restarts;
        self.rescales += d.rescales;
    }

    fn merge(&mut self, other: &SamplingStats) {
        self.samples += other.samples;
        self.restarts += other.restarts;
        self.rescales += other.rescales;
    }

    /// Accepted draws per flat-Dirichlet attempt.
    pub fn acceptance_rate(&self) -> f64 {
        self.samples as f64 / (self.samples + self.restarts).max(1) as f64
    }

    pub fn rescales_per_sample(&self) -> f64 {
        self.rescales as f64 / self.samples.max(1) as f64
    }
}

/// Sizes of the `threads` shards of an `n`-sample run.
pub fn shard_sizes(n: usize, threads: usize) -> Vec<usize> {
    let k = threads.max(1);
    (0..k).map(|w| n / k + usize::from(w < n % k)).collect()
}

/// Runs `n` draws split over `threads` workers; worker `w` uses
/// `RngState::for_worker(seed, w)`. `init` creates a per-worker accumulator
/// and `visit` feeds it each draw; accumulators come back in worker order.
pub fn run_sharded<S, A, I, V>(
    sampler: &S,
    n: usize,
    seed: u64,
    threads: usize,
    init: I,
    visit: V,
) -> Result<Vec<(A, SamplingStats)>>
where
    S: Sampler + ?Sized,
    A: Send,
    I: Fn() -> A + Sync,
    V: Fn(&mut A, &Draw) + Sync,
{
    let sizes = shard_sizes(n, threads);
    let work = |w: usize, count: usize| -> Result<(A, SamplingStats)> {
        let mut rng = RngState::for_worker(seed, w as u64);
        let mut acc = init();
        let mut stats = SamplingStats::default();
        for _ in 0..count {
            let d = sampler.draw(&mut rng)?;
            stats.record(&d);
            visit(&mut acc, &d);
        }
        Ok((acc, stats))
    };
    if sizes.len() == 1 {
        return Ok(vec![work(0, sizes[0])?]);
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = sizes
            .iter()
            .enumerate()
            .map(|(w, &count)| {
                let work = &work;
                scope.spawn(move || work(w, count))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sampling worker panicked"))
            .collect()
    })
}

/// Collects `n` vectors (concatenated in worker order) and the merged statistics.
pub fn sample_vectors<S: Sampler + ?Sized>(
    sampler: &S,
    n: usize,
    seed: u64,
    threads: usize,
) -> Result<(Vec<SimplexVector>, SamplingStats)> {
    let shards = run_sharded(sampler, n, seed, threads, Vec::new, |acc: &mut Vec<SimplexVector>, d| {
        acc.push(d.vector.clone())
    })?;
    let mut out = Vec::with_capacity(n);
    let mut stats = SamplingStats::default();
    for (vs, st) in shards {
        out.extend(vs);
        stats.merge(&st);
    }
    Ok((out, stats))
}

pub(crate) fn merge_stats<'a>(it: impl IntoIterator<Item = &'a SamplingStats>) -> SamplingStats {
    let mut s = SamplingStats::default();
    it.into_iter().for_each(|x| s.merge(x));
    s
}
