//! Slack of the δ²-inequalities behind the positivity-propagation results,
//! sampled verification reports, and the Diederich–Fornæss exponent.
//!
//! Slack is RHS − LHS; with D = δ², a = ∂D, g = ∇D:
//!
//! | kind | slack(V) |
//! |------|----------|
//! | oka | \|⟨a,V⟩\|²/D − 𝓛_D(V,V) |
//! | psh | \|⟨a,V⟩\|²/(2D) − 𝓛_D(V,V) |
//! | gamma(γ) | (1 + 2/(2+γ²))·\|⟨a,V⟩\|²/(2D) − 𝓛_D(V,V) |
//! | convex | ⟨g,V⟩²/(2D) − 𝓗_D(V,V) |
//! | cconvex | (⟨g,V⟩² + ⟨g,iV⟩²)/(2D) − 𝓗_D(V,V) |
//!
//! Outside the domain only `convex` applies, and there δ is convex iff
//! 𝓗_D(V,V) − ⟨g,V⟩²/(2D) = 2δ𝓗_δ(V,V) ≥ 0, so the slack changes sign.

use std::time::Instant;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::config::{Defaults, DIRECTIONS_PER_SAMPLE, GAMMA_CAP};
use crate::distance::{project_to_boundary, project_local, shell_sample_with, BoundaryPoint, ShellSample};
use crate::error::{Error, Result};
use crate::forms::{classify_with_forms, tangent_frame, PositivityReport};
use crate::geometry::{DomainSource, DomainSpec};
use crate::linalg::{self, ComplexVector, RealPoint, C64};
use crate::sampling::{direction_rng, sample_boundary, sample_shell, unit_complex, SamplingStats, Side};

/// Which inequality to check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "name")]
pub enum TheoremKind {
    Oka,
    Convex,
    Cconvex,
    Psh,
    Gamma { gamma: f64 },
}

impl TheoremKind {
    /// Parse `oka|convex|cconvex|psh|gamma`; `gamma` needs an aperture.
    pub fn parse(name: &str, gamma: Option<f64>) -> Result<Self> {
        match (name, gamma) {
            ("oka", _) => Ok(TheoremKind::Oka),
            ("convex", _) => Ok(TheoremKind::Convex),
            ("cconvex", _) => Ok(TheoremKind::Cconvex),
            ("psh", _) => Ok(TheoremKind::Psh),
            ("gamma", Some(g)) if g >= 0.0 => Ok(TheoremKind::Gamma { gamma: g }),
            ("gamma", Some(g)) => Err(Error::Argument(format!("gamma must be nonnegative, got {g}"))),
            ("gamma", None) => Err(Error::Argument("kind `gamma` needs an aperture (--gamma)".into())),
            _ => Err(Error::Argument(format!(
                "unknown kind `{name}`; expected oka, convex, cconvex, psh or gamma"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TheoremKind::Oka => "oka",
            TheoremKind::Convex => "convex",
            TheoremKind::Cconvex => "cconvex",
            TheoremKind::Psh => "psh",
            TheoremKind::Gamma { .. } => "gamma",
        }
    }

    /// Coefficient c in c·|⟨∂D,V⟩|²/D for the complex kinds.
    fn complex_coefficient(&self) -> Option<f64> {
        match *self {
            TheoremKind::Oka => Some(1.0),
            TheoremKind::Psh => Some(0.5),
            TheoremKind::Gamma { gamma } => Some(0.5 * (1.0 + 2.0 / (2.0 + gamma * gamma))),
            _ => None,
        }
    }
}

fn check_side(kind: TheoremKind, side: Side) -> Result<()> {
    if side == Side::Outside && kind != TheoremKind::Convex {
        return Err(Error::Argument(format!(
            "kind `{}` is only defined inside the domain; use --side inside",
            kind.name()
        )));
    }
    Ok(())
}

/// The slack as a quadratic form: Hermitian n×n for the complex kinds
/// (slack(V) = V* M V), real symmetric 2n×2n otherwise (slack(V) = vᵀ M v).
#[derive(Debug, Clone)]
pub enum SlackForm {
    Complex(DMatrix<C64>),
    Real(DMatrix<f64>),
}

impl SlackForm {
    pub fn eval(&self, v: &ComplexVector) -> f64 {
        match self {
            SlackForm::Complex(m) => {
                let n = v.n();
                let mut s = C64::new(0.0, 0.0);
                for i in 0..n {
                    for j in 0..n {
                        s += v.0[i].conj() * m[(i, j)] * v.0[j];
                    }
                }
                s.re
            }
            SlackForm::Real(m) => {
                let x = v.to_real();
                crate::geometry::bilinear(m, &x, &x)
            }
        }
    }

    /// Minimum over unit V and a minimizer.
    pub fn min(&self) -> (f64, ComplexVector) {
        match self {
            SlackForm::Complex(m) => linalg::herm_min_eig(m),
            SlackForm::Real(m) => {
                let (vals, vecs) = linalg::sym_eigen(m);
                let v: Vec<f64> = vecs.column(0).iter().copied().collect();
                (vals[0], ComplexVector::from_real(&v))
            }
        }
    }
}

pub fn slack_form(kind: TheoremKind, s: &ShellSample, side: Side) -> Result<SlackForm> {
    check_side(kind, side)?;
    let d = s.d.value;
    if d == 0.0 {
        return Err(Error::Singular("slack requested on the boundary (δ = 0)".into()));
    }
    if let Some(c) = kind.complex_coefficient() {
        // |⟨a,V⟩|² = V* (ā aᵀ) V and 𝓛_D(V,V) = V* Lᵀ V
        let a = s.complex_gradient_d();
        let n = a.n();
        let l = &s.d.forms.l;
        let m = DMatrix::from_fn(n, n, |i, j| a.0[i].conj() * a.0[j] * (c / d) - l[(j, i)]);
        return Ok(SlackForm::Complex((&m + m.adjoint()) * C64::new(0.5, 0.0)));
    }
    let g = nalgebra::DVector::from_column_slice(&s.d.gradient);
    let mut rhs = &g * g.transpose();
    if kind == TheoremKind::Cconvex {
        // ⟨g, iV⟩ = (Jᵀg)ᵀ v with Jᵀ(x, y) = (y, −x)
        let jg = nalgebra::DVector::from_vec(linalg::mul_i_real(&s.d.gradient).iter().map(|v| -v).collect());
        rhs += &jg * jg.transpose();
    }
    let m = rhs / (2.0 * d) - &s.d.forms.h;
    let m = match side {
        Side::Inside => m,
        Side::Outside => -m,
    };
    Ok(SlackForm::Real((&m + m.transpose()) * 0.5))
}

/// RHS − LHS of the inequality of `kind` at `q` in direction `v` (unit).
pub fn theorem_slack(kind: TheoremKind, spec: &DomainSpec, q: &RealPoint, v: &ComplexVector) -> Result<f64> {
    if v.n() != spec.n() {
        return Err(Error::Argument("direction dimension differs from the domain".into()));
    }
    let b = project_to_boundary(spec, q)?;
    let s = shell_sample_with(spec, q, b)?;
    let side = if s.delta > 0.0 { Side::Outside } else { Side::Inside };
    Ok(slack_form(kind, &s, side)?.eval(v))
}

/// Boundary hypothesis of a kind, checked on boundary points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub condition: String,
    pub samples: usize,
    pub satisfied: usize,
    /// Smallest value of the quantity whose sign decides the condition.
    pub min_value: f64,
    pub holds: bool,
}

fn hypothesis_value(kind: TheoremKind, r: &PositivityReport) -> (&'static str, f64, bool) {
    match kind {
        TheoremKind::Oka => ("pseudoconvex: min eig of L_delta on CT", r.min_eig_l_ct, r.pseudoconvex),
        TheoremKind::Convex => ("convex: min eig of H_delta on RT", r.min_eig_h_rt, r.convex),
        TheoremKind::Cconvex => ("C-convex: min eig of H_delta on CT", r.min_eig_h_ct, r.c_convex),
        TheoremKind::Psh => ("delta psh on the boundary: min eig of L_delta on RT", r.min_eig_l_rt, r.min_eig_l_rt >= -r.tol),
        TheoremKind::Gamma { .. } => ("gamma-psh: min of L_delta on the cone", r.cone_min, r.gamma_psh),
    }
}

/// Classification at the given boundary points, in order, evaluated in parallel.
pub fn classify_points(spec: &DomainSpec, points: &[BoundaryPoint], gamma: f64) -> Result<Vec<PositivityReport>> {
    use rayon::prelude::*;
    points
        .par_iter()
        .map(|p| {
            let forms = crate::distance::boundary_delta_forms(spec, p)?;
            classify_with_forms(&forms, &tangent_frame(spec, p)?, gamma)
        })
        .collect()
}

fn check_hypothesis(kind: TheoremKind, reports: &[PositivityReport]) -> HypothesisCheck {
    let mut check = HypothesisCheck {
        condition: String::new(),
        samples: reports.len(),
        satisfied: 0,
        min_value: f64::INFINITY,
        holds: true,
    };
    for r in reports {
        let (name, v, ok) = hypothesis_value(kind, r);
        check.condition = name.to_string();
        check.min_value = check.min_value.min(v);
        if ok {
            check.satisfied += 1;
        }
    }
    check.holds = check.satisfied == check.samples;
    check
}

/// One row of the optional per-sample table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRow {
    pub index: usize,
    pub point: Vec<f64>,
    pub delta: f64,
    pub slack: f64,
}

/// Outcome of a sampled verification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub kind: TheoremKind,
    pub domain: String,
    pub source: DomainSource,
    pub side: Side,
    pub shell_width: f64,
    pub samples: usize,
    pub seed: u64,
    /// Minimum over samples of the exact minimum over unit directions.
    pub min_slack: f64,
    /// Minimum over samples and the random directions only.
    pub sampled_min_slack: f64,
    pub argmin_point: Vec<f64>,
    pub argmin_delta: f64,
    /// Minimizing direction, real coordinates.
    pub argmin_direction: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub hypothesis: HypothesisCheck,
    /// Largest halved shell width that passed, when certification was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified_shell: Option<f64>,
    pub sampling: SamplingStats,
    pub defaults: Defaults,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_secs: Option<f64>,
    #[serde(skip)]
    pub rows: Vec<SampleRow>,
}

/// Parameters of [`verify_theorem`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub shell: f64,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub side: Side,
    /// Halve the shell (at most 10 times) until the check passes.
    pub certify: bool,
    /// Boundary points used for the hypothesis check.
    pub hypothesis_samples: usize,
}

impl VerifyOptions {
    pub fn new(spec: &DomainSpec) -> Self {
        VerifyOptions {
            shell: spec.shell_width,
            samples: crate::config::DEFAULT_SAMPLES,
            seed: crate::config::DEFAULT_SEED,
            tol: crate::config::DEFAULT_TOL,
            side: Side::Inside,
            certify: false,
            hypothesis_samples: 32,
        }
    }
}

struct SlackScan {
    min_slack: f64,
    sampled_min: f64,
    argmin: usize,
    direction: ComplexVector,
    rows: Vec<SampleRow>,
}

fn scan(kind: TheoremKind, samples: &[ShellSample], seed: u64, side: Side) -> Result<SlackScan> {
    use rayon::prelude::*;
    let per: Vec<(f64, ComplexVector, f64)> = samples
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let form = slack_form(kind, s, side)?;
            let (m, v) = form.min();
            let mut rng = direction_rng(seed, i);
            let n = s.point.n();
            let sampled = (0..DIRECTIONS_PER_SAMPLE)
                .map(|_| form.eval(&unit_complex(&mut rng, n)))
                .fold(f64::INFINITY, f64::min);
            Ok((m, v, sampled))
        })
        .collect::<Result<_>>()?;
    let argmin = (0..per.len()).min_by(|&a, &b| per[a].0.total_cmp(&per[b].0)).expect("nonempty");
    Ok(SlackScan {
        min_slack: per[argmin].0,
        sampled_min: per.iter().map(|p| p.2).fold(f64::INFINITY, f64::min),
        argmin,
        direction: per[argmin].1.clone(),
        rows: samples
            .iter()
            .zip(&per)
            .enumerate()
            .map(|(i, (s, p))| SampleRow {
                index: i,
                point: s.point.0.clone(),
                delta: s.delta,
                slack: p.0,
            })
            .collect(),
    })
}

/// Sample the shell and record the smallest slack, exact in the direction.
pub fn verify_theorem(kind: TheoremKind, spec: &DomainSpec, opts: &VerifyOptions) -> Result<TheoremReport> {
    check_side(kind, opts.side)?;
    if !(opts.tol > 0.0) {
        return Err(Error::Argument("tolerance must be positive".into()));
    }
    let start = Instant::now();
    let mut shell = opts.shell;
    let (samples, stats) = sample_shell(spec, shell, opts.samples, opts.seed, opts.side)?;
    let gamma = match kind {
        TheoremKind::Gamma { gamma } => gamma,
        _ => 0.0,
    };
    let hyp_points: Vec<BoundaryPoint> = samples
        .iter()
        .take(opts.hypothesis_samples)
        .map(|s| s.boundary.clone())
        .collect();
    let hypothesis = check_hypothesis(kind, &classify_points(spec, &hyp_points, gamma)?);
    let mut sc = scan(kind, &samples, opts.seed, opts.side)?;
    let mut best_samples = samples;
    let mut stats = stats;
    let mut certified = None;
    if opts.certify {
        let mut halvings = 0;
        while sc.min_slack < -opts.tol && halvings < 10 {
            shell *= 0.5;
            halvings += 1;
            let (s, st) = sample_shell(spec, shell, opts.samples, opts.seed, opts.side)?;
            sc = scan(kind, &s, opts.seed, opts.side)?;
            best_samples = s;
            stats = st;
        }
        if sc.min_slack >= -opts.tol {
            certified = Some(shell);
        }
    }
    let worst = &best_samples[sc.argmin];
    Ok(TheoremReport {
        kind,
        domain: spec.name.clone(),
        source: spec.source.clone(),
        side: opts.side,
        shell_width: shell,
        samples: best_samples.len(),
        seed: opts.seed,
        min_slack: sc.min_slack,
        sampled_min_slack: sc.sampled_min,
        argmin_point: worst.point.0.clone(),
        argmin_delta: worst.delta,
        argmin_direction: sc.direction.to_real(),
        tolerance: opts.tol,
        pass: sc.min_slack >= -opts.tol,
        hypothesis,
        certified_shell: certified,
        sampling: stats,
        defaults: Defaults::default(),
        runtime_secs: Some(start.elapsed().as_secs_f64()),
        rows: sc.rows,
    })
}

/// η = 1 − 2/(2+γ²)
pub fn df_exponent(gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::Argument(format!("gamma must be nonnegative, got {gamma}")));
    }
    if gamma.is_infinite() {
        return Ok(1.0);
    }
    Ok(1.0 - 2.0 / (2.0 + gamma * gamma))
}

/// 𝓛 of −(−δ)^η as a Hermitian matrix M (𝓛(V,V) = V* M V) at an interior sample:
/// η(−δ)^{η−2}[(−δ)𝓛_δ + (1−η) ∂δ ∂δ*]. Also returns the bracket alone.
fn levi_power_matrix(s: &ShellSample, eta: f64) -> (DMatrix<C64>, DMatrix<C64>) {
    let a = s.complex_gradient();
    let n = a.n();
    let md = -s.delta;
    let l = &s.delta_forms.l;
    let bracket = DMatrix::from_fn(n, n, |i, j| l[(j, i)] * md + a.0[i].conj() * a.0[j] * (1.0 - eta));
    let bracket = (&bracket + bracket.adjoint()) * C64::new(0.5, 0.0);
    let pre = eta * md.powf(eta - 2.0);
    (&bracket * C64::new(pre, 0.0), bracket)
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Argument(format!("eta must lie in (0, 1), got {eta}")));
    }
    Ok(())
}

/// 𝓛(V,V) of −(−δ)^η at an interior point q.
pub fn levi_power(spec: &DomainSpec, q: &RealPoint, eta: f64, v: &ComplexVector) -> Result<f64> {
    check_eta(eta)?;
    if v.n() != spec.n() {
        return Err(Error::Argument("direction dimension differs from the domain".into()));
    }
    let b = project_to_boundary(spec, q)?;
    let s = shell_sample_with(spec, q, b)?;
    if s.delta >= 0.0 {
        return Err(Error::Domain("levi_power needs an interior point (δ < 0)".into()));
    }
    Ok(SlackForm::Complex(levi_power_matrix(&s, eta).0).eval(v))
}

/// Levi form of −(−δ)^η in direction V by second differences along V and iV,
/// step h = 1e-3·|δ|.
pub fn levi_power_fd(spec: &DomainSpec, s: &ShellSample, eta: f64, v: &ComplexVector) -> Result<f64> {
    let h = 1e-3 * s.delta.abs();
    let u = |z: &[f64]| -> Result<f64> {
        let b = project_local(spec, z, &s.boundary)?;
        let d = linalg::norm(&linalg::sub(z, b.q.as_slice()));
        let delta = if spec.f.value(z)? < 0.0 { -d } else { d };
        Ok(-(-delta).powf(eta))
    };
    let z = s.point.as_slice();
    let u0 = u(z)?;
    let mut total = 0.0;
    for dir in [v.to_real(), v.mul_i().to_real()] {
        let zp: Vec<f64> = z.iter().zip(&dir).map(|(a, b)| a + h * b).collect();
        let zm: Vec<f64> = z.iter().zip(&dir).map(|(a, b)| a - h * b).collect();
        total += (u(&zp)? - 2.0 * u0 + u(&zm)?) / (h * h);
    }
    Ok(0.25 * total)
}

/// Outcome of the exponent computation and its verification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DFResult {
    pub domain: String,
    pub source: DomainSource,
    /// Minimum over boundary samples of the largest admissible aperture.
    pub gamma_star: f64,
    pub eta: f64,
    /// False when γ* = 0: no positive exponent is certified.
    pub certified: bool,
    pub message: String,
    pub boundary_samples: usize,
    pub pseudoconvex_samples: usize,
    pub shell_width: f64,
    pub shell_samples: usize,
    pub seed: u64,
    /// Minimum over shell samples of min_V 𝓛(−(−δ)^η)(V,V)/(η(−δ)^{η−1}(1 + ‖𝓗_δ‖)).
    pub min_levi_power: f64,
    pub argmin_point: Vec<f64>,
    pub argmin_direction: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
    /// Largest η ∈ (0, 1) for which every shell sample passes.
    pub empirical_max_eta: f64,
    /// Largest relative deviation between the factorized Levi form and finite differences.
    pub fd_check_max_rel: f64,
    pub defaults: Defaults,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_secs: Option<f64>,
}

/// Minimum of the normalized Levi form of −(−δ)^η over all unit V at one sample.
/// Normalizing by η(−δ)^{η−1} leaves 𝓛_δ + (1−η)|∂δ V|²/(−δ), of order one.
fn normalized_levi_power(s: &ShellSample, eta: f64) -> (f64, ComplexVector) {
    let (_, bracket) = levi_power_matrix(s, eta);
    let (m, v) = linalg::herm_min_eig(&bracket);
    (m / ((-s.delta) * (1.0 + s.delta_forms.norm())), v)
}

/// Parameters of [`df_verify`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfOptions {
    pub shell: f64,
    pub boundary_samples: usize,
    pub shell_samples: usize,
    pub seed: u64,
    pub tol: f64,
    /// Number of shell samples on which the finite-difference cross-check runs.
    pub fd_checks: usize,
}

impl DfOptions {
    pub fn new(spec: &DomainSpec) -> Self {
        DfOptions {
            shell: spec.shell_width,
            boundary_samples: 64,
            shell_samples: crate::config::DEFAULT_SAMPLES,
            seed: crate::config::DEFAULT_SEED,
            tol: crate::config::DEFAULT_TOL,
            fd_checks: 10,
        }
    }
}

/// γ* over boundary samples, η = df_exponent(γ*), and an eigen-exact check
/// that −(−δ)^η has nonnegative Levi form on interior shell samples.
pub fn df_verify(spec: &DomainSpec, opts: &DfOptions) -> Result<DFResult> {
    let start = Instant::now();
    let (bpts, _) = sample_boundary(spec, opts.boundary_samples, opts.seed)?;
    let reports = classify_points(spec, &bpts, 0.0)?;
    let gamma_star = reports.iter().map(|r| r.max_gamma).fold(f64::INFINITY, f64::min);
    let pseudoconvex = reports.iter().filter(|r| r.pseudoconvex).count();
    let eta = df_exponent(gamma_star)?.clamp(0.0, 1.0 - f64::EPSILON);
    let (samples, _) = sample_shell(spec, opts.shell, opts.shell_samples, opts.seed, Side::Inside)?;

    let min_at = |eta: f64| -> (f64, usize, ComplexVector) {
        let mut best = (f64::INFINITY, 0, ComplexVector::zeros(spec.n()));
        for (i, s) in samples.iter().enumerate() {
            let (m, v) = normalized_levi_power(s, eta);
            if m < best.0 {
                best = (m, i, v);
            }
        }
        best
    };
    // bisection for the largest passing η; the normalized form decreases in η
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if min_at(1.0 - 1e-12).0 >= -opts.tol {
        lo = 1.0;
    } else {
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if min_at(mid).0 >= -opts.tol {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let empirical_max_eta = lo;

    let certified = gamma_star > 0.0;
    let eval_eta = if certified { eta } else { 0.0 };
    let (min_lp, arg, dir) = min_at(eval_eta.max(f64::MIN_POSITIVE));
    let mut fd_max: f64 = 0.0;
    if certified {
        for (i, s) in samples.iter().take(opts.fd_checks).enumerate() {
            let (_, v) = normalized_levi_power(s, eta);
            let random = unit_complex(&mut direction_rng(opts.seed, i), spec.n());
            for w in [v, random] {
                let exact = SlackForm::Complex(levi_power_matrix(s, eta).0).eval(&w);
                let fd = levi_power_fd(spec, s, eta, &w)?;
                let pre = eta * (-s.delta).powf(eta - 2.0);
                let a = crate::geometry::apply_complex_gradient(&s.gradient, &w).norm_sqr();
                let scale = pre * ((-s.delta) * s.delta_forms.levi(&w).abs() + (1.0 - eta) * a) + pre * (-s.delta) * 1e-6;
                fd_max = fd_max.max((exact - fd).abs() / scale);
            }
        }
    }
    let pass = certified && min_lp >= -opts.tol;
    let message = if !certified {
        "no positive exponent certified: gamma* = 0 on the sampled boundary".to_string()
    } else if pass {
        format!("-(-delta)^eta is plurisubharmonic on the sampled shell for eta = {eta:.6}")
    } else {
        format!("Levi form of -(-delta)^eta is negative on the shell for eta = {eta:.6}")
    };
    let worst = &samples[arg];
    Ok(DFResult {
        domain: spec.name.clone(),
        source: spec.source.clone(),
        gamma_star,
        eta: if certified { eta } else { 0.0 },
        certified,
        message,
        boundary_samples: bpts.len(),
        pseudoconvex_samples: pseudoconvex,
        shell_width: opts.shell,
        shell_samples: samples.len(),
        seed: opts.seed,
        min_levi_power: min_lp,
        argmin_point: worst.point.0.clone(),
        argmin_direction: dir.to_real(),
        tolerance: opts.tol,
        pass,
        empirical_max_eta,
        fd_check_max_rel: fd_max,
        defaults: Defaults::default(),
        runtime_secs: Some(start.elapsed().as_secs_f64()),
    })
}

/// Numeric and closed-form minimum of f(w, c) = 2(v − w)² + (t − c)² subject to
/// c = ±γ|w| (the reduction of 2‖V′ − W′‖² + (t − c)² with |c| = γ‖W′‖ to the
/// ray of V′), together with the minimizing c₀ = γ(tγ + 2v)/(2 + γ²).
pub fn cone_minimizer_check(vprime_norm: f64, t: f64, gamma: f64) -> Result<(f64, f64, f64)> {
    let v = vprime_norm;
    if !(gamma > 0.0) || !(v >= 0.0) || !t.is_finite() {
        return Err(Error::Argument("need gamma > 0, |V'| >= 0 and finite t".into()));
    }
    if t < gamma * v {
        return Err(Error::Argument(format!(
            "t = {t} is below gamma*|V'| = {}: V already lies in the cone",
            gamma * v
        )));
    }
    let closed = 2.0 * (t - v * gamma).powi(2) / (2.0 + gamma * gamma);
    let c0 = gamma * (t * gamma + 2.0 * v) / (2.0 + gamma * gamma);
    // one-dimensional quadratics in w on each branch c = σγ|w|, w ≥ 0 or w ≤ 0
    let mut best = f64::INFINITY;
    for sigma in [1.0, -1.0] {
        for sign in [1.0, -1.0] {
            let f = |w: f64| 2.0 * (v - w).powi(2) + (t - sigma * gamma * w.abs()).powi(2);
            let reach = 4.0 * (v + t.abs() / gamma + 1.0);
            let (mut lo, mut hi) = if sign > 0.0 { (0.0, reach) } else { (-reach, 0.0) };
            let r = 0.5 * (5f64.sqrt() - 1.0);
            let mut x1 = hi - r * (hi - lo);
            let mut x2 = lo + r * (hi - lo);
            let (mut f1, mut f2) = (f(x1), f(x2));
            for _ in 0..200 {
                if f1 < f2 {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - r * (hi - lo);
                    f1 = f(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + r * (hi - lo);
                    f2 = f(x2);
                }
            }
            best = best.min(f(0.5 * (lo + hi))).min(f(0.0));
        }
    }
    Ok((best, closed, c0))
}

/// Classification of sampled boundary points with a summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifySummary {
    pub domain: String,
    pub source: DomainSource,
    pub samples: usize,
    pub seed: u64,
    pub gamma_query: f64,
    pub convex: usize,
    pub pseudoconvex: usize,
    pub c_convex: usize,
    pub gamma_psh: usize,
    /// Points where convex ⇒ ℂ-convex ⇒ pseudoconvex is violated.
    pub chain_violations: usize,
    pub min_max_gamma: f64,
    pub points: Vec<PositivityReport>,
    pub defaults: Defaults,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_secs: Option<f64>,
}

pub fn classify_sweep(spec: &DomainSpec, samples: usize, seed: u64, gamma: f64) -> Result<ClassifySummary> {
    let start = Instant::now();
    let (pts, _) = sample_boundary(spec, samples, seed)?;
    let points = classify_points(spec, &pts, gamma)?;
    let count = |f: fn(&PositivityReport) -> bool| points.iter().filter(|r| f(r)).count();
    Ok(ClassifySummary {
        domain: spec.name.clone(),
        source: spec.source.clone(),
        samples: points.len(),
        seed,
        gamma_query: gamma,
        convex: count(|r| r.convex),
        pseudoconvex: count(|r| r.pseudoconvex),
        c_convex: count(|r| r.c_convex),
        gamma_psh: count(|r| r.gamma_psh),
        chain_violations: count(|r| (r.convex && !r.c_convex) || (r.c_convex && !r.pseudoconvex)),
        min_max_gamma: points.iter().map(|r| r.max_gamma).fold(GAMMA_CAP, f64::min),
        points,
        defaults: Defaults::default(),
        runtime_secs: Some(start.elapsed().as_secs_f64()),
    })
}

/// δ, ∇δ, forms and the boundary classification at the projection of one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointAnalysis {
    pub domain: String,
    pub point: Vec<f64>,
    pub delta: f64,
    pub gradient: Vec<f64>,
    pub boundary_point: Vec<f64>,
    pub newton_iterations: usize,
    /// 𝓗_δ as rows.
    pub hessian_delta: Vec<Vec<f64>>,
    /// 𝓛_δ as rows of [re, im].
    pub levi_delta: Vec<Vec<[f64; 2]>>,
    pub complement_delta: Vec<Vec<[f64; 2]>>,
    pub boundary: PositivityReport,
    pub defaults: Defaults,
}

pub fn analyze_point(spec: &DomainSpec, z: &RealPoint, gamma: f64) -> Result<PointAnalysis> {
    let b = project_to_boundary(spec, z)?;
    let forms_at_z = if b.q.dist(z) > 0.0 {
        Some(shell_sample_with(spec, z, b.clone())?)
    } else {
        None
    };
    let bforms = crate::distance::boundary_delta_forms(spec, &b)?;
    let report = classify_with_forms(&bforms, &tangent_frame(spec, &b)?, gamma)?;
    let (delta, forms) = match &forms_at_z {
        Some(s) => (s.delta, &s.delta_forms),
        None => (0.0, &bforms),
    };
    let rows = |m: &DMatrix<C64>| -> Vec<Vec<[f64; 2]>> {
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
    };
    Ok(PointAnalysis {
        domain: spec.name.clone(),
        point: z.0.clone(),
        delta,
        gradient: b.normal.clone(),
        boundary_point: b.q.0.clone(),
        newton_iterations: b.iterations,
        hessian_delta: (0..forms.h.nrows()).map(|i| forms.h.row(i).iter().copied().collect()).collect(),
        levi_delta: rows(&forms.l),
        complement_delta: rows(&forms.q),
        boundary: report,
        defaults: Defaults::default(),
    })
}

/// One row of the boundary sweep table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub point: Vec<f64>,
    pub min_eig_l_ct: f64,
    pub min_eig_h_rt: f64,
    pub max_gamma: f64,
    pub eta: f64,
}

pub fn sweep(spec: &DomainSpec, samples: usize, seed: u64) -> Result<Vec<SweepRow>> {
    let (pts, _) = sample_boundary(spec, samples, seed)?;
    classify_points(spec, &pts, 0.0)?
        .into_iter()
        .map(|r| {
            Ok(SweepRow {
                eta: df_exponent(r.max_gamma)?,
                point: r.point,
                min_eig_l_ct: r.min_eig_l_ct,
                min_eig_h_rt: r.min_eig_h_rt,
                max_gamma: r.max_gamma,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use approx::assert_relative_eq;

    fn pt(v: &[f64]) -> RealPoint {
        RealPoint(v.to_vec())
    }

    #[test]
    fn oka_slack_in_the_ball() {
        let s = catalog::ball(2);
        let v = ComplexVector::basis(2, 1);
        let slack = theorem_slack(TheoremKind::Oka, &s, &pt(&[0.9, 0.0, 0.0, 0.0]), &v).unwrap();
        assert_relative_eq!(slack, 0.2 / 1.8, epsilon = 1e-6);
    }

    #[test]
    fn convex_slack_of_half_space() {
        let s = catalog::half_space(2);
        let q = pt(&[0.1, 0.2, -0.3, 0.1]);
        let normal = ComplexVector::from_real(&[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(theorem_slack(TheoremKind::Convex, &s, &q, &normal).unwrap(), 0.0);
        let v = ComplexVector::basis(2, 0);
        assert_eq!(theorem_slack(TheoremKind::Convex, &s, &q, &v).unwrap(), 0.0);
    }

    #[test]
    fn gamma_zero_is_oka() {
        let s = catalog::complex_ellipsoid(&[2.0, 1.0]);
        let q = pt(&[0.6, 0.1, 0.1, 0.05]);
        let mut rng = direction_rng(5, 0);
        for _ in 0..5 {
            let v = unit_complex(&mut rng, 2);
            let a = theorem_slack(TheoremKind::Oka, &s, &q, &v).unwrap();
            let b = theorem_slack(TheoremKind::Gamma { gamma: 0.0 }, &s, &q, &v).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn exponent_formula() {
        assert_relative_eq!(df_exponent(1.0).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(df_exponent(2f64.sqrt()).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(df_exponent(0.0).unwrap(), 0.0);
        assert_eq!(df_exponent(f64::INFINITY).unwrap(), 1.0);
        assert!(df_exponent(-1.0).is_err());
    }

    #[test]
    fn levi_power_of_half_space() {
        let s = catalog::half_space(2);
        let q = pt(&[0.0, 0.0, -0.5, 0.0]);
        let v = ComplexVector::basis(2, 1);
        // |⟨∂δ,V⟩|² = 1/4, 𝓛_δ = 0: η(−δ)^{η−2}(1−η)/4 at δ = −0.5, η = 1/2
        let expect = 0.5 * 0.5f64.powf(-1.5) * 0.5 * 0.25;
        assert_relative_eq!(levi_power(&s, &q, 0.5, &v).unwrap(), expect, epsilon = 1e-12);
        assert!(levi_power(&s, &pt(&[0.0, 0.0, 0.5, 0.0]), 0.5, &v).is_err());
        assert!(levi_power(&s, &q, 1.0, &v).is_err());
    }

    #[test]
    fn minimizer_closed_form() {
        let (num, closed, c0) = cone_minimizer_check(0.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(num, 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(closed, 2.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(c0, 1.0 / 3.0, epsilon = 1e-15);
        let (num, closed, _) = cone_minimizer_check(0.5, 0.5, 1.0).unwrap();
        assert!(num.abs() < 1e-12 && closed == 0.0);
        let (num, closed, _) = cone_minimizer_check(0.0, 1.0, GAMMA_CAP).unwrap();
        assert!(num < 1e-5 && closed < 1e-5);
        assert!((num - closed).abs() < 1e-10);
        assert!(cone_minimizer_check(1.0, 0.5, 1.0).is_err());
        assert!(cone_minimizer_check(1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!(TheoremKind::parse("oka", None).unwrap(), TheoremKind::Oka);
        assert!(TheoremKind::parse("gamma", None).is_err());
        assert!(TheoremKind::parse("nope", None).is_err());
        assert_eq!(TheoremKind::parse("gamma", Some(1.0)).unwrap(), TheoremKind::Gamma { gamma: 1.0 });
    }

    #[test]
    fn outside_only_for_convex() {
        let s = catalog::ball(2);
        let mut o = VerifyOptions::new(&s);
        o.side = Side::Outside;
        assert!(matches!(verify_theorem(TheoremKind::Oka, &s, &o), Err(Error::Argument(_))));
    }
}
