//! Signed distance to the boundary, the closest-point projection, and the
//! Hessian data of δ and D = δ².
//!
//! δ < 0 inside, δ > 0 outside. The projection solves the closest-point
//! conditions r(q) = 0, z − q ∥ ∇r(q) by Lagrange–Newton from several starts
//! and refuses to choose between two equally close boundary points.

use nalgebra::DMatrix;

use crate::config::{
    AMBIGUITY_TOL, BOUNDARY_OFFSET, CANDIDATE_MERGE_TOL, DELTA_HESSIAN_STEP, KKT_TOL,
    NEWTON_MAX_ITER, NORMAL_ANNIHILATION_FAIL,
};
use crate::error::{Error, Result};
use crate::geometry::{unitary_transform, DefiningFunction, DomainSpec, HessianForms};
use crate::linalg::{self, ComplexVector, RealPoint, C64};

/// A point on the zero set with its outward unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint {
    pub q: RealPoint,
    /// ν = ∇r(q)/‖∇r(q)‖
    pub normal: Vec<f64>,
    /// r(q)
    pub residual: f64,
    pub iterations: usize,
}

impl BoundaryPoint {
    /// Wrap a point already on the zero set (within `KKT_TOL·scale`).
    pub fn at(spec: &DomainSpec, q: RealPoint) -> Result<Self> {
        let d = spec.f.eval_derivatives(q.as_slice())?;
        if d.value.abs() > 1e-10 * spec.scale.max(1.0) {
            return Err(Error::Argument(format!("r(q) = {:.3e} is not on the boundary", d.value)));
        }
        let g = linalg::norm(&d.gradient);
        if g == 0.0 {
            return Err(Error::Construction("vanishing gradient at boundary point".into()));
        }
        Ok(BoundaryPoint {
            normal: d.gradient.iter().map(|x| x / g).collect(),
            q,
            residual: d.value,
            iterations: 0,
        })
    }

    /// ν as a complex vector.
    pub fn complex_normal(&self) -> ComplexVector {
        ComplexVector::from_real(&self.normal)
    }
}

struct Candidate {
    q: Vec<f64>,
    dist: f64,
    iterations: usize,
}

/// Move `x0` onto the zero set along the gradient (Newton on r alone).
fn push_to_zero_set(f: &DefiningFunction, x0: &[f64]) -> Option<Vec<f64>> {
    let mut x = x0.to_vec();
    let mut r = f.value(&x).ok()?;
    for _ in 0..NEWTON_MAX_ITER {
        if r.abs() <= KKT_TOL {
            return Some(x);
        }
        let g = f.gradient(&x).ok()?;
        let gg = linalg::dot(&g, &g);
        if gg == 0.0 {
            return None;
        }
        let mut t = 1.0;
        loop {
            let y: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - t * r * b / gg).collect();
            if let Ok(ry) = f.value(&y) {
                if ry.abs() < r.abs() {
                    x = y;
                    r = ry;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-6 {
                return None;
            }
        }
    }
    (r.abs() <= 1e3 * KKT_TOL).then_some(x)
}

fn kkt_residual(f: &DefiningFunction, z: &[f64], q: &[f64], lambda: f64) -> Option<f64> {
    let d = f.eval_derivatives(q).ok()?;
    let mut s = d.value * d.value;
    for i in 0..q.len() {
        let v = q[i] - z[i] + lambda * d.gradient[i];
        s += v * v;
    }
    Some(s.sqrt())
}

/// Lagrange–Newton on F(q, λ) = [q − z + λ∇r(q); r(q)] from a start on (or near) the zero set.
fn kkt_newton(f: &DefiningFunction, z: &[f64], q0: &[f64]) -> Option<Candidate> {
    let m = z.len();
    let mut q = q0.to_vec();
    let g0 = f.gradient(&q).ok()?;
    let gg = linalg::dot(&g0, &g0);
    if gg == 0.0 {
        return None;
    }
    let mut lambda = linalg::dot(&linalg::sub(z, &q), &g0) / gg;
    let tol = KKT_TOL * (1.0 + linalg::norm(z));
    let mut res = kkt_residual(f, z, &q, lambda)?;
    let mut converged_at = None;
    for it in 0..NEWTON_MAX_ITER {
        if res <= tol && converged_at.is_none() {
            converged_at = Some(it);
        }
        // two extra steps past the tolerance polish q to rounding level
        if let Some(c) = converged_at {
            if it >= c + 2 {
                break;
            }
        }
        let d = f.eval_derivatives(&q).ok()?;
        let mut jac = DMatrix::zeros(m + 1, m + 1);
        let mut rhs = vec![0.0; m + 1];
        for i in 0..m {
            for j in 0..m {
                jac[(i, j)] = lambda * d.hessian[(i, j)] + if i == j { 1.0 } else { 0.0 };
            }
            jac[(i, m)] = d.gradient[i];
            jac[(m, i)] = d.gradient[i];
            rhs[i] = -(q[i] - z[i] + lambda * d.gradient[i]);
        }
        rhs[m] = -d.value;
        let step = linalg::solve(jac, &rhs)?;
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-8 {
            let qn: Vec<f64> = q.iter().zip(&step).map(|(a, b)| a + t * b).collect();
            let ln = lambda + t * step[m];
            if let Some(rn) = kkt_residual(f, z, &qn, ln) {
                if rn < (1.0 - 1e-4 * t) * res || (converged_at.is_some() && rn <= res.max(tol)) {
                    q = qn;
                    lambda = ln;
                    res = rn;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if res > tol {
        return None;
    }
    Some(Candidate {
        dist: linalg::norm(&linalg::sub(z, &q)),
        iterations: converged_at.unwrap_or(NEWTON_MAX_ITER),
        q,
    })
}

fn finish(spec: &DomainSpec, c: Candidate) -> Result<BoundaryPoint> {
    let d = spec.f.eval_derivatives(&c.q)?;
    let g = linalg::norm(&d.gradient);
    if g == 0.0 {
        return Err(Error::Construction("vanishing gradient at projection".into()));
    }
    Ok(BoundaryPoint {
        normal: d.gradient.iter().map(|x| x / g).collect(),
        q: RealPoint(c.q),
        residual: d.value,
        iterations: c.iterations,
    })
}

fn check_point(spec: &DomainSpec, z: &RealPoint) -> Result<()> {
    if z.as_slice().len() != 2 * spec.n() {
        return Err(Error::Argument(format!(
            "point has {} coordinates, expected {}",
            z.as_slice().len(),
            2 * spec.n()
        )));
    }
    spec.f.value(z.as_slice()).map(|_| ())
}

/// Closest boundary point b(z), from multistart Lagrange–Newton.
pub fn project_to_boundary(spec: &DomainSpec, z: &RealPoint) -> Result<BoundaryPoint> {
    check_point(spec, z)?;
    let zs = z.as_slice();
    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(spec.anchors.len() + 1);
    if let Some(s) = push_to_zero_set(&spec.f, zs) {
        starts.push(s);
    }
    starts.extend(spec.anchors.iter().cloned());
    let mut cands: Vec<Candidate> = starts.iter().filter_map(|s| kkt_newton(&spec.f, zs, s)).collect();
    if cands.is_empty() {
        return Err(Error::Convergence(format!(
            "closest-point Newton failed from all {} starts at {:?}",
            starts.len(),
            zs
        )));
    }
    // stable order: ties keep the earliest start
    let best = (0..cands.len())
        .min_by(|&a, &b| cands[a].dist.total_cmp(&cands[b].dist))
        .expect("nonempty");
    for (i, c) in cands.iter().enumerate() {
        if i != best
            && (c.dist - cands[best].dist).abs() <= AMBIGUITY_TOL
            && linalg::norm(&linalg::sub(&c.q, &cands[best].q)) > CANDIDATE_MERGE_TOL
        {
            return Err(Error::Ambiguity {
                d1: cands[best].dist,
                d2: c.dist,
            });
        }
    }
    finish(spec, cands.swap_remove(best))
}

/// Projection by a single Newton solve started at a nearby boundary point.
pub(crate) fn project_local(spec: &DomainSpec, z: &[f64], start: &BoundaryPoint) -> Result<BoundaryPoint> {
    let c = kkt_newton(&spec.f, z, start.q.as_slice())
        .ok_or_else(|| Error::Convergence(format!("local closest-point Newton failed at {z:?}")))?;
    finish(spec, c)
}

fn signed(spec: &DomainSpec, z: &[f64], b: &BoundaryPoint) -> Result<f64> {
    let d = linalg::norm(&linalg::sub(z, b.q.as_slice()));
    Ok(if spec.f.value(z)? < 0.0 { -d } else { d })
}

/// δ(z): −‖z − b(z)‖ inside, +‖z − b(z)‖ outside.
pub fn signed_distance(spec: &DomainSpec, z: &RealPoint) -> Result<f64> {
    let b = project_to_boundary(spec, z)?;
    signed(spec, z.as_slice(), &b)
}

/// ∇δ(z) = ν(b(z)).
pub fn delta_gradient(spec: &DomainSpec, z: &RealPoint) -> Result<Vec<f64>> {
    Ok(project_to_boundary(spec, z)?.normal)
}

/// Central differences of the normal field ν∘b around `z`, symmetrized.
fn normal_field_jacobian(spec: &DomainSpec, z: &[f64], base: &BoundaryPoint) -> Result<DMatrix<f64>> {
    let m = z.len();
    let h = DELTA_HESSIAN_STEP * spec.scale;
    let mut jac = DMatrix::zeros(m, m);
    for j in 0..m {
        let mut zp = z.to_vec();
        let mut zm = z.to_vec();
        zp[j] += h;
        zm[j] -= h;
        let np = project_local(spec, &zp, base)?.normal;
        let nm = project_local(spec, &zm, base)?.normal;
        for i in 0..m {
            jac[(i, j)] = (np[i] - nm[i]) / (2.0 * h);
        }
    }
    let sym = (&jac + jac.transpose()) * 0.5;
    let nu = nalgebra::DVector::from_column_slice(&base.normal);
    let defect = (&sym * &nu).amax();
    let scale = 1.0 + linalg::spectral_norm_sym(&sym);
    if defect > NORMAL_ANNIHILATION_FAIL * scale {
        return Err(Error::Accuracy(format!(
            "δ-Hessian does not annihilate the normal: |H·ν| = {defect:.3e}"
        )));
    }
    Ok(sym)
}

/// Hessian forms of δ at `z`.
pub fn delta_hessian(spec: &DomainSpec, z: &RealPoint) -> Result<HessianForms> {
    let b = project_to_boundary(spec, z)?;
    let h = normal_field_jacobian(spec, z.as_slice(), &b)?;
    Ok(HessianForms::from_real_hessian(h, z.clone(), "delta"))
}

/// Boundary value of the δ-Hessian forms at `p`, taken as the limit from the
/// interior: 2·H(p − sν) − H(p − 2sν) with s = `BOUNDARY_OFFSET`·scale
/// (linear extrapolation to s = 0).
pub fn boundary_delta_forms(spec: &DomainSpec, p: &BoundaryPoint) -> Result<HessianForms> {
    let s = BOUNDARY_OFFSET * spec.scale;
    let z1 = p.q.offset(&p.normal, -s);
    let z2 = p.q.offset(&p.normal, -2.0 * s);
    let b1 = project_local(spec, z1.as_slice(), p)?;
    let b2 = project_local(spec, z2.as_slice(), p)?;
    let h1 = normal_field_jacobian(spec, z1.as_slice(), &b1)?;
    let h2 = normal_field_jacobian(spec, z2.as_slice(), &b2)?;
    Ok(HessianForms::from_real_hessian(h1 * 2.0 - h2, p.q.clone(), "delta"))
}

/// D = δ² with its gradient and Hessian forms.
#[derive(Debug, Clone, PartialEq)]
pub struct DForms {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub forms: HessianForms,
}

/// Everything known about δ at a shell point.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellSample {
    pub point: RealPoint,
    pub boundary: BoundaryPoint,
    pub delta: f64,
    /// ∇δ = ν(b(z))
    pub gradient: Vec<f64>,
    pub delta_forms: HessianForms,
    pub d: DForms,
}

impl ShellSample {
    /// ∂δ as a complex vector (entries δ_{z_k}).
    pub fn complex_gradient(&self) -> ComplexVector {
        crate::geometry::complex_gradient(&self.gradient)
    }

    /// ∂D = 2δ ∂δ
    pub fn complex_gradient_d(&self) -> ComplexVector {
        crate::geometry::complex_gradient(&self.d.gradient)
    }
}

/// D-forms from δ-data: ∇D = 2δ∇δ, 𝓗_D = 2∇δ∇δᵀ + 2δ𝓗_δ (and hence
/// 𝓛_D = 2∂δ ∂δ* + 2δ𝓛_δ).
pub fn d_forms_from(delta: f64, gradient: &[f64], delta_forms: &HessianForms) -> Result<DForms> {
    if delta == 0.0 {
        return Err(Error::Singular("D-forms requested on the boundary (δ = 0)".into()));
    }
    let m = gradient.len();
    let g = nalgebra::DVector::from_column_slice(gradient);
    let h = &g * g.transpose() * 2.0 + &delta_forms.h * (2.0 * delta);
    debug_assert_eq!(h.nrows(), m);
    Ok(DForms {
        value: delta * delta,
        gradient: gradient.iter().map(|x| 2.0 * delta * x).collect(),
        forms: HessianForms::from_real_hessian(h, delta_forms.point.clone(), "delta^2"),
    })
}

/// Full δ-data at `z` starting from a known projection.
pub(crate) fn shell_sample_with(spec: &DomainSpec, z: &RealPoint, b: BoundaryPoint) -> Result<ShellSample> {
    let delta = signed(spec, z.as_slice(), &b)?;
    let h = normal_field_jacobian(spec, z.as_slice(), &b)?;
    let delta_forms = HessianForms::from_real_hessian(h, z.clone(), "delta");
    let d = d_forms_from(delta, &b.normal, &delta_forms)?;
    Ok(ShellSample {
        point: z.clone(),
        gradient: b.normal.clone(),
        boundary: b,
        delta,
        delta_forms,
        d,
    })
}

pub fn shell_sample(spec: &DomainSpec, z: &RealPoint) -> Result<ShellSample> {
    let b = project_to_boundary(spec, z)?;
    shell_sample_with(spec, z, b)
}

/// D = δ², ∇D and the Hessian forms of D at `z`.
pub fn d_forms(spec: &DomainSpec, z: &RealPoint) -> Result<DForms> {
    Ok(shell_sample(spec, z)?.d)
}

/// Residuals of the post-conditions of an adapted frame.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FrameResiduals {
    /// ‖U*U − I‖
    pub unitarity: f64,
    /// distance of the image of q from (0′, δ(q))
    pub image: f64,
    /// max over q and the midpoint of its normal segment of ‖∇_w δ − e_{x_{2n−1}}‖∞
    pub gradient: f64,
}

/// Unitary coordinates w with z = U·w + shift placing b(q) at 0 and the outward
/// normal along Re w_n.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedFrame {
    pub base: BoundaryPoint,
    pub u: DMatrix<C64>,
    pub shift: ComplexVector,
    /// q in the new coordinates, (0′, a) with a = δ(q)
    pub image: RealPoint,
    pub delta: f64,
    pub residuals: FrameResiduals,
}

impl AdaptedFrame {
    pub fn to_local(&self, z: &RealPoint) -> RealPoint {
        let zc = ComplexVector::from_real(z.as_slice()).sub(&self.shift);
        let w: Vec<C64> = (0..zc.n())
            .map(|k| (0..zc.n()).map(|j| self.u[(j, k)].conj() * zc.0[j]).sum())
            .collect();
        RealPoint::from_complex(&w)
    }

    /// The domain expressed in the adapted coordinates.
    pub fn transformed(&self, spec: &DomainSpec) -> Result<DomainSpec> {
        unitary_transform(spec, &self.u, &self.shift)
    }
}

/// The unitary matrix with columns (ℂT basis…, ν).
pub(crate) fn adapted_unitary(nu: &ComplexVector) -> DMatrix<C64> {
    let n = nu.n();
    let mut cols = linalg::complex_complement(nu);
    cols.push(nu.clone());
    DMatrix::from_fn(n, n, |i, j| cols[j].0[i])
}

pub fn adapted_frame(spec: &DomainSpec, q_interior: &RealPoint) -> Result<AdaptedFrame> {
    let b = project_to_boundary(spec, q_interior)?;
    let delta = signed(spec, q_interior.as_slice(), &b)?;
    let nu = b.complex_normal();
    let u = adapted_unitary(&nu);
    let n = spec.n();
    let mut frame = AdaptedFrame {
        shift: ComplexVector::from_real(b.q.as_slice()),
        image: RealPoint::zeros(n),
        base: b,
        u,
        delta,
        residuals: FrameResiduals {
            unitarity: 0.0,
            image: 0.0,
            gradient: 0.0,
        },
    };
    frame.image = frame.to_local(q_interior);
    let mut expected = vec![0.0; 2 * n];
    expected[2 * n - 2] = delta;
    let ur = linalg::real_rep(&frame.u);
    let mut grad_res: f64 = 0.0;
    let mid = frame.base.q.offset(&frame.base.normal, 0.5 * delta);
    for z in [q_interior.clone(), mid] {
        let g = delta_gradient(spec, &z)?;
        let gw = ur.transpose() * nalgebra::DVector::from_vec(g);
        for (i, v) in gw.iter().enumerate() {
            let e = if i == 2 * n - 2 { 1.0 } else { 0.0 };
            grad_res = grad_res.max((v - e).abs());
        }
    }
    frame.residuals = FrameResiduals {
        unitarity: linalg::unitarity_defect(&frame.u),
        image: linalg::norm(&linalg::sub(frame.image.as_slice(), &expected)),
        gradient: grad_res,
    };
    Ok(frame)
}
