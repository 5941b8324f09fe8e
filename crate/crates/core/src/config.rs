//! Named numeric tolerances and defaults.
//!
//! Every threshold used by the library lives here so reports can echo them
//! back verbatim (see [`Defaults`]).

use serde::Serialize;

/// Newton stopping tolerance on the closest-point (KKT) residual.
pub const KKT_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 50;
pub const MULTISTART_SEEDS: usize = 32;
/// Seed of the deterministic multistart generator used by the projector.
pub const MULTISTART_SEED: u64 = 0x5eed_0fb0_da12;
/// Two candidate projections whose distances differ by less than this are ambiguous.
pub const AMBIGUITY_TOL: f64 = 1e-8;
/// Candidates closer than this (in space) are treated as the same point.
pub const CANDIDATE_MERGE_TOL: f64 = 1e-6;

/// Finite-difference step for the δ-Hessian, as a multiple of the domain scale.
pub const DELTA_HESSIAN_STEP: f64 = 1e-5;
/// Normal annihilation beyond this (relative to 1 + ‖𝓗_δ‖) is an accuracy error.
pub const NORMAL_ANNIHILATION_FAIL: f64 = 1e-4;
/// Offset along −ν used to take boundary limits of δ-Hessians, times scale.
pub const BOUNDARY_OFFSET: f64 = 1e-4;

/// Relative semidefiniteness tolerance ε in tol = ε·(1 + ‖𝓗_δ‖₂).
pub const SEMIDEF_EPS: f64 = 1e-8;
/// Tighter ε used by the aperture bisection so degenerate forms report γ = 0.
pub const GAMMA_EPS: f64 = 1e-10;
pub const GAMMA_CAP: f64 = 1e3;
pub const GAMMA_PROBE: f64 = 1e-4;
pub const GAMMA_BISECT_MAX_ITER: usize = 60;
pub const GAMMA_BISECT_WIDTH: f64 = 1e-6;
pub const CONE_RESOLUTION: usize = 64;

pub const DEFAULT_SHELL_FRACTION: f64 = 0.1;
pub const DEFAULT_SAMPLES: usize = 500;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_SEED: u64 = 20_110_517;
/// Random directions drawn per shell point in addition to the exact eigen check.
pub const DIRECTIONS_PER_SAMPLE: usize = 8;

/// Snapshot of the defaults, serialized into every report.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Defaults {
    pub kkt_tol: f64,
    pub newton_max_iter: usize,
    pub multistart_seeds: usize,
    pub delta_hessian_step: f64,
    pub boundary_offset: f64,
    pub semidef_eps: f64,
    pub gamma_eps: f64,
    pub gamma_cap: f64,
    pub cone_resolution: usize,
    pub shell_fraction: f64,
    pub samples: usize,
    pub tol: f64,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            kkt_tol: KKT_TOL,
            newton_max_iter: NEWTON_MAX_ITER,
            multistart_seeds: MULTISTART_SEEDS,
            delta_hessian_step: DELTA_HESSIAN_STEP,
            boundary_offset: BOUNDARY_OFFSET,
            semidef_eps: SEMIDEF_EPS,
            gamma_eps: GAMMA_EPS,
            gamma_cap: GAMMA_CAP,
            cone_resolution: CONE_RESOLUTION,
            shell_fraction: DEFAULT_SHELL_FRACTION,
            samples: DEFAULT_SAMPLES,
            tol: DEFAULT_TOL,
        }
    }
}
