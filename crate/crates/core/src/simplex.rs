//! Points on the standard simplex, regular sub-simplices and the rescale maps
//! between them.
//!
//! The standard (n-1)-simplex is `S = {x in R^n : x >= 0, sum(x) = 1}`. A
//! regular sub-simplex `{x in S : x_i >= t_i}` is a scaled copy of `S` with
//! scale `s = 1 - sum(t)` and vertices `t + s * e_j`; the rescale map
//! `y = (x - t) / s` sends it onto `S` vertex by vertex.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest deviation of the coordinate sum from 1 that is silently renormalized.
pub const RENORMALIZE_TOL: f64 = 1e-9;

/// Slack for membership of a point in a sub-simplex.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// A point on the standard simplex: nonnegative entries summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplexVector(Vec<f64>);

impl SimplexVector {
    /// Validates `entries` and renormalizes them onto the unit sum.
    ///
    /// Entries must be finite and nonnegative (values above `-1e-12` are
    /// clamped to zero) and their sum must be within [`RENORMALIZE_TOL`] of 1.
    pub fn new(mut entries: Vec<f64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::Dimension(format!(
                "a simplex vector needs at least 2 entries, got {}",
                entries.len()
            )));
        }
        for v in entries.iter_mut() {
            if !v.is_finite() {
                return Err(Error::Input(format!("non-finite entry {v}")));
            }
            if *v < 0.0 {
                if *v < -MEMBERSHIP_TOL {
                    return Err(Error::Input(format!("negative entry {v}")));
                }
                *v = 0.0;
            }
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > RENORMALIZE_TOL {
            return Err(Error::Input(format!(
                "entries sum to {sum}, which is not within {RENORMALIZE_TOL:e} of 1"
            )));
        }
        if sum != 1.0 {
            entries.iter_mut().for_each(|v| *v /= sum);
        }
        Ok(SimplexVector(entries))
    }

    /// Wraps entries that the caller guarantees to be on the simplex.
    pub(crate) fn from_raw(entries: Vec<f64>) -> Self {
        SimplexVector(entries)
    }

    /// The `j`-th unit vector of dimension `n`.
    pub fn vertex(n: usize, j: usize) -> Self {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        SimplexVector(e)
    }

    /// The barycenter `[1/n, ..., 1/n]`.
    pub fn barycenter(n: usize) -> Self {
        SimplexVector(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl std::ops::Index<usize> for SimplexVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl AsRef<[f64]> for SimplexVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// The regular sub-simplex `{x in S : x_i >= t_i}` for an offset vector `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularSubSimplex {
    offset: Vec<f64>,
    scale: f64,
}

impl RegularSubSimplex {
    pub fn new(offset: Vec<f64>) -> Result<Self> {
        if offset.len() < 2 {
            return Err(Error::Dimension(format!(
                "offset needs at least 2 entries, got {}",
                offset.len()
            )));
        }
        if let Some(v) = offset.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Input(format!("offset entries must be >= 0, got {v}")));
        }
        let scale = 1.0 - offset.iter().sum::<f64>();
        if scale <= 0.0 {
            return Err(Error::DegenerateSimplex { scale });
        }
        Ok(RegularSubSimplex { offset, scale })
    }

    /// The sub-simplex `{x in S : x_i >= theta}` anchored on a single coordinate.
    pub fn single(n: usize, i: usize, theta: f64) -> Result<Self> {
        let mut t = vec![0.0; n];
        t[i] = theta;
        Self::new(t)
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    /// Vertex `t + s * e_j`.
    pub fn vertex(&self, j: usize) -> Vec<f64> {
        let mut v = self.offset.clone();
        v[j] += self.scale;
        v
    }

    /// Whether `x` satisfies `x_i >= t_i - 1e-12` on every active coordinate.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.offset.len()
            && self
                .offset
                .iter()
                .zip(x)
                .all(|(&t, &v)| t == 0.0 || v >= t - MEMBERSHIP_TOL)
    }
}

/// Maps `x` from the sub-simplex onto the standard simplex: `y = (x - t) / s`.
pub fn rescale_to_standard(x: &SimplexVector, sub: &RegularSubSimplex) -> Result<SimplexVector> {
    if x.dim() != sub.dim() {
        return Err(Error::Dimension(format!(
            "vector has dimension {}, sub-simplex has {}",
            x.dim(),
            sub.dim()
        )));
    }
    if sub.scale <= 0.0 {
        return Err(Error::DegenerateSimplex { scale: sub.scale });
    }
    if !sub.contains(x.as_slice()) {
        return Err(Error::Precondition(format!(
            "{:?} is not inside the sub-simplex with offset {:?}",
            x.as_slice(),
            sub.offset
        )));
    }
    let mut y: Vec<f64> = x
        .as_slice()
        .iter()
        .zip(&sub.offset)
        .map(|(&v, &t)| ((v - t) / sub.scale).max(0.0))
        .collect();
    let sum: f64 = y.iter().sum();
    y.iter_mut().for_each(|v| *v /= sum);
    Ok(SimplexVector(y))
}

/// Maps `y` from the standard simplex into the sub-simplex: `x = s * y + t`.
pub fn rescale_inverse(y: &SimplexVector, sub: &RegularSubSimplex) -> Result<SimplexVector> {
    if y.dim() != sub.dim() {
        return Err(Error::Dimension(format!(
            "vector has dimension {}, sub-simplex has {}",
            y.dim(),
            sub.dim()
        )));
    }
    if sub.scale <= 0.0 {
        return Err(Error::DegenerateSimplex { scale: sub.scale });
    }
    let x = y
        .as_slice()
        .iter()
        .zip(&sub.offset)
        .map(|(&v, &t)| sub.scale * v + t)
        .collect();
    Ok(SimplexVector(x))
}

/// Projects a 3-D simplex vector to the plane, sending `e_1, e_2, e_3` to
/// `(0, 0)`, `(1, 0)` and `(1/2, sqrt(3)/2)`.
pub fn project_to_plane(x: &SimplexVector) -> Result<[f64; 2]> {
    if x.dim() != 3 {
        return Err(Error::Dimension(format!(
            "planar projection needs n = 3, got {}",
            x.dim()
        )));
    }
    Ok(project_coords(x.as_slice()))
}

const HALF_SQRT3: f64 = 0.866_025_403_784_438_6;

/// Unchecked planar projection of barycentric coordinates.
pub(crate) fn project_coords(x: &[f64]) -> [f64; 2] {
    [x[1] + 0.5 * x[2], HALF_SQRT3 * x[2]]
}

/// Inverse of [`project_coords`]: barycentric coordinates of a planar point.
pub(crate) fn unproject(p: [f64; 2]) -> [f64; 3] {
    let x3 = p[1] / HALF_SQRT3;
    let x2 = p[0] - 0.5 * x3;
    [1.0 - x2 - x3, x2, x3]
}

/// Seeded, platform-independent random stream (ChaCha8).
///
/// Worker `k` of a sharded run uses stream `k` of the same seed, so shards
/// never overlap and `RngState::new(seed)` equals `RngState::for_worker(seed, 0)`.
#[derive(Clone, Debug)]
pub struct RngState {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self::for_worker(seed, 0)
    }

    pub fn for_worker(seed: u64, worker: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(worker);
        RngState { seed, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl RngCore for RngState {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Draws a point uniformly from the standard (n-1)-simplex by normalizing
/// `n` unit-rate exponential variates.
pub fn sample_flat_dirichlet(n: usize, rng: &mut RngState) -> Result<SimplexVector> {
    if n < 2 {
        return Err(Error::Dimension(format!("flat Dirichlet needs n >= 2, got {n}")));
    }
    Ok(flat_dirichlet_unchecked(n, rng))
}

pub(crate) fn flat_dirichlet_unchecked(n: usize, rng: &mut RngState) -> SimplexVector {
    let mut e: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let sum: f64 = e.iter().sum();
    e.iter_mut().for_each(|v| *v /= sum);
    SimplexVector(e)
}
