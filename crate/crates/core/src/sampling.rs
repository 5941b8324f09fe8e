//! Seeded sampling of shell points, boundary points and directions.
//!
//! Candidates are drawn sequentially from one generator, evaluated in parallel
//! batches, and accepted in draw order, so the result does not depend on the
//! number of threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distance::{project_to_boundary, shell_sample_with, BoundaryPoint, ShellSample};
use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::linalg::{self, ComplexVector, RealPoint};

/// Which side of the boundary to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Inside,
    Outside,
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inside" => Ok(Side::Inside),
            "outside" => Ok(Side::Outside),
            _ => Err(Error::Argument(format!("side must be inside or outside, got `{s}`"))),
        }
    }
}

/// Standard normal from Box–Muller.
pub fn normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Uniform point on the unit sphere of ℝ^m.
pub fn unit_vector(rng: &mut impl Rng, m: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| normal(rng)).collect();
        let nrm = linalg::norm(&v);
        if nrm > 1e-12 {
            return v.into_iter().map(|x| x / nrm).collect();
        }
    }
}

/// Generator for the directions attached to sample `index`.
pub fn direction_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng
}

/// Uniform unit vector of ℂⁿ.
pub fn unit_complex(rng: &mut impl Rng, n: usize) -> ComplexVector {
    ComplexVector::from_real(&unit_vector(rng, 2 * n))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SamplingStats {
    pub draws: usize,
    pub evaluated: usize,
    pub accepted: usize,
}

fn max_draws(count: usize) -> usize {
    2_000 * count + 200_000
}

/// Draw, prefilter, evaluate in parallel and accept in order.
fn collect<T: Send>(
    spec: &DomainSpec,
    count: usize,
    seed: u64,
    what: &str,
    prefilter: impl Fn(&[f64]) -> bool,
    eval: impl Fn(&RealPoint) -> Option<T> + Sync,
) -> Result<(Vec<T>, SamplingStats)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut stats = SamplingStats::default();
    let limit = max_draws(count);
    while out.len() < count {
        let want = 2 * (count - out.len()).max(8);
        let mut batch = Vec::with_capacity(want);
        while batch.len() < want && stats.draws < limit {
            let z = spec.sample_box.sample(&mut rng);
            stats.draws += 1;
            if prefilter(&z) {
                batch.push(RealPoint(z));
            }
        }
        if batch.is_empty() {
            return Err(Error::Sampling(format!(
                "only {} of {count} {what} found after {} draws; widen the shell or the sample box",
                out.len(),
                stats.draws
            )));
        }
        stats.evaluated += batch.len();
        let results: Vec<Option<T>> = batch.par_iter().map(&eval).collect();
        for r in results.into_iter().flatten() {
            if out.len() < count {
                out.push(r);
            }
        }
    }
    stats.accepted = out.len();
    Ok((out, stats))
}

/// Estimated distance |r|/‖∇r‖ and the sign of r.
fn first_order_distance(spec: &DomainSpec, z: &[f64]) -> Option<(f64, f64)> {
    let d = spec.f.eval_derivatives(z).ok()?;
    let g = linalg::norm(&d.gradient);
    (g > 0.0).then(|| (d.value.abs() / g, d.value))
}

/// `count` points with 0 < |δ| ≤ `shell` on the requested side, with full δ-data.
pub fn sample_shell(
    spec: &DomainSpec,
    shell: f64,
    count: usize,
    seed: u64,
    side: Side,
) -> Result<(Vec<ShellSample>, SamplingStats)> {
    if !(shell > 0.0) || count == 0 {
        return Err(Error::Argument("shell width and sample count must be positive".into()));
    }
    let sign_ok = move |v: f64| match side {
        Side::Inside => v < 0.0,
        Side::Outside => v > 0.0,
    };
    collect(
        spec,
        count,
        seed,
        "shell points",
        |z| first_order_distance(spec, z).is_some_and(|(d, v)| sign_ok(v) && d <= 1.5 * shell),
        |z| {
            let b = project_to_boundary(spec, z).ok()?;
            let s = shell_sample_with(spec, z, b).ok()?;
            (s.delta != 0.0 && s.delta.abs() <= shell && sign_ok(s.delta)).then_some(s)
        },
    )
}

/// `count` boundary points: projections of sample-box points near the zero set
/// that land inside the sample box.
pub fn sample_boundary(spec: &DomainSpec, count: usize, seed: u64) -> Result<(Vec<BoundaryPoint>, SamplingStats)> {
    if count == 0 {
        return Err(Error::Argument("sample count must be positive".into()));
    }
    let reach = 3.0 * spec.shell_width;
    collect(
        spec,
        count,
        seed,
        "boundary points",
        |z| first_order_distance(spec, z).is_some_and(|(d, _)| d <= reach),
        |z| {
            let b = project_to_boundary(spec, z).ok()?;
            spec.sample_box.contains(b.q.as_slice()).then_some(b)
        },
    )
}
