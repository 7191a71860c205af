//! Exact sampling of determinantal point processes with projection kernels.
//!
//! Points are drawn one at a time. Given `x_1, …, x_i`, the next point has
//! density `(n − v_i(x)) / (n − i)` with respect to `μ`, where
//! `v_i(x) = k_xᵀ G_i⁻¹ k_x`. Each conditional is sampled by rejection from the
//! uniform measure, and `G_i` is only ever touched through its Cholesky
//! factor, which grows by one row per accepted point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::ProjectionKernel;

/// Consecutive rejections after which the sampler gives up.
pub const MAX_PROPOSALS: usize = 1_000_000;

/// Smallest admissible Schur complement, as a fraction of `n`.
const PIVOT_FLOOR: f64 = 1e-10;

/// Slack allowed for `v_i(x)` above `K(x, x) = n`.
const ENVELOPE_SLACK: f64 = 1e-8;

/// A reproducible random stream: the same `(seed, stream_id)` always yields
/// the same numbers, whichever thread consumes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// A sibling stream for auxiliary randomness of the same trial. Tags
    /// occupy the top byte of the stream id, so they never collide with
    /// trial indices below 2^56.
    pub fn substream(&self, tag: u8) -> Self {
        Self::new(self.seed, self.stream_id ^ ((tag as u64) << 56))
    }

    pub fn generator(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// An ordered list of unit vectors in `R^{d+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfiguration {
    d: usize,
    coords: Vec<f64>,
}

impl PointConfiguration {
    /// An empty configuration on `S^d`.
    pub fn empty(d: usize) -> Self {
        Self { d, coords: Vec::new() }
    }

    /// Validates that every point has `d + 1` coordinates and unit norm.
    pub fn new(d: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = d + 1;
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::Domain(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::Domain(format!("point {i} has norm {norm}, expected 1")));
            }
            coords.extend_from_slice(p);
        }
        Ok(Self { d, coords })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.coords.len() / (self.d + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let dim = self.d + 1;
        &self.coords[i * dim..(i + 1) * dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.d + 1)
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn uniform_point(rng: &mut ChaCha8Rng, out: &mut [f64]) {
    loop {
        for x in out.iter_mut() {
            *x = rng.sample(StandardNormal);
        }
        let norm = dot(out, out).sqrt();
        if norm > 0.0 {
            out.iter_mut().for_each(|x| *x /= norm);
            return;
        }
    }
}

/// `n` independent uniform points on `S^d`.
pub fn sample_uniform(d: usize, n: usize, rng: RngStream) -> PointConfiguration {
    let dim = d + 1;
    let mut gen = rng.generator();
    let mut coords = vec![0.0; n * dim];
    for p in coords.chunks_exact_mut(dim) {
        uniform_point(&mut gen, p);
    }
    PointConfiguration { d, coords }
}

/// One exact draw from the determinantal process of `kernel`.
///
/// The result always has exactly `kernel.trace()` points.
pub fn sample_dpp<K: ProjectionKernel + ?Sized>(kernel: &K, rng: RngStream) -> Result<PointConfiguration> {
    let d = kernel.dim();
    let n = kernel.trace();
    let dim = d + 1;
    let nf = n as f64;
    let floor = PIVOT_FLOOR * nf;

    let mut gen = rng.generator();
    let mut coords = Vec::with_capacity(n * dim);
    // row a of the Cholesky factor, length a + 1
    let mut chol: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut y = vec![0.0; n];
    let mut x = vec![0.0; dim];

    for i in 0..n {
        let mut proposals = 0usize;
        let pivot_sq = loop {
            if proposals == MAX_PROPOSALS {
                return Err(Error::SamplerStall { index: i, proposals });
            }
            proposals += 1;
            uniform_point(&mut gen, &mut x);
            let u: f64 = gen.random();
            // accept iff u < 1 − v/n
            let threshold = nf * (1.0 - u);

            let mut v = 0.0;
            let mut rejected = false;
            for a in 0..i {
                let t = dot(&x, &coords[a * dim..(a + 1) * dim]).clamp(-1.0, 1.0);
                let row = &chol[a];
                let ya = (kernel.eval(t) - dot(&row[..a], &y[..a])) / row[a];
                y[a] = ya;
                v += ya * ya;
                if v >= threshold {
                    rejected = true;
                    break;
                }
            }
            if v > nf * (1.0 + ENVELOPE_SLACK) {
                return Err(Error::Degeneracy {
                    index: i,
                    detail: format!("conditional variance {v} exceeds K(x,x) = {n}"),
                });
            }
            if !rejected {
                break nf - v;
            }
        };
        if pivot_sq < floor {
            return Err(Error::Degeneracy {
                index: i,
                detail: format!("Cholesky pivot {pivot_sq} below floor {floor}"),
            });
        }
        let mut row = y[..i].to_vec();
        row.push(pivot_sq.sqrt());
        chol.push(row);
        coords.extend_from_slice(&x);
    }
    Ok(PointConfiguration { d, coords })
}

/// Runs `trial` for `t = 0..trials` with `RngStream::new(seed, t)`, in
/// parallel on the current rayon pool. Results come back in trial order and
/// the first failing trial (by index) determines the error.
pub fn run_trials<T, F>(trials: usize, seed: u64, trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(RngStream) -> Result<T> + Sync,
{
    let results: Vec<Result<T>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| trial(RngStream::new(seed, t)))
        .collect();
    results.into_iter().collect()
}
