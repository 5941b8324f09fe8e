//! Tangent frames, positivity of forms on ℂT and ℝT, and the cone
//! ℝT^γ = {V ∈ ℝT : |⟨V, iν⟩| ≤ γ‖V − ⟨V, iν⟩iν‖}.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::config::{GAMMA_BISECT_MAX_ITER, GAMMA_BISECT_WIDTH, GAMMA_CAP, GAMMA_EPS, GAMMA_PROBE, SEMIDEF_EPS};
use crate::distance::{boundary_delta_forms, BoundaryPoint};
use crate::error::{Error, Result};
use crate::geometry::{apply_complex_gradient, DomainSpec, FormKind, HessianForms};
use crate::linalg::{self, ComplexVector, C64};

/// Orthonormal frames of the tangent spaces at a boundary point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentFrame {
    pub point: BoundaryPoint,
    /// ν
    pub normal: ComplexVector,
    /// iν
    pub i_normal: ComplexVector,
    /// Orthonormal basis of ℂT (n − 1 vectors, Hermitian-orthonormal).
    pub complex_basis: Vec<ComplexVector>,
    /// Orthonormal basis of ℝT (2n − 1 vectors): u₁, iu₁, …, iν.
    pub real_basis: Vec<ComplexVector>,
}

impl TangentFrame {
    /// ℂT as a real subspace: u₁, iu₁, …
    pub fn complex_tangent_real_basis(&self) -> Vec<ComplexVector> {
        self.complex_basis.iter().flat_map(|u| [u.clone(), u.mul_i()]).collect()
    }

    /// Largest violation of ⟨∂r, u⟩ = 0 on ℂT and ⟨∇r, v⟩ = 0 on ℝT, with ∇r = ν.
    pub fn relation_residual(&self) -> f64 {
        let nu = &self.point.normal;
        let c = self
            .complex_basis
            .iter()
            .map(|u| apply_complex_gradient(nu, u).norm())
            .fold(0.0, f64::max);
        let r = self
            .real_basis
            .iter()
            .map(|v| linalg::dot(nu, &v.to_real()).abs())
            .fold(0.0, f64::max);
        c.max(r)
    }

    /// max |⟨b_j, b_k⟩ − δ_jk| over the real basis (real inner product).
    pub fn gram_residual(&self) -> f64 {
        let b: Vec<Vec<f64>> = self.real_basis.iter().map(|v| v.to_real()).collect();
        let mut worst: f64 = 0.0;
        for (j, x) in b.iter().enumerate() {
            for (k, y) in b.iter().enumerate() {
                let e = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((linalg::dot(x, y) - e).abs());
            }
        }
        worst
    }
}

/// Frames at `p`. Needs n ≥ 2 (ℂT is trivial in ℂ¹).
pub fn tangent_frame(spec: &DomainSpec, p: &BoundaryPoint) -> Result<TangentFrame> {
    let n = spec.n();
    if n < 2 {
        return Err(Error::Argument("tangent frames need n >= 2".into()));
    }
    let g = spec.f.gradient(p.q.as_slice())?;
    let gn = linalg::norm(&g);
    if gn < 1e-12 {
        return Err(Error::Construction(format!("degenerate gradient at {:?}", p.q.as_slice())));
    }
    let nu = ComplexVector::from_real(&g.iter().map(|x| x / gn).collect::<Vec<_>>());
    let complex_basis = linalg::complex_complement(&nu);
    let i_normal = nu.mul_i();
    let mut real_basis: Vec<ComplexVector> = complex_basis.iter().flat_map(|u| [u.clone(), u.mul_i()]).collect();
    real_basis.push(i_normal.clone());
    Ok(TangentFrame {
        point: p.clone(),
        normal: nu,
        i_normal,
        complex_basis,
        real_basis,
    })
}

/// Aperture of the cone ℝT^γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeSpec {
    pub gamma: f64,
    /// Apertures at or above this are treated as the whole of ℝT.
    pub gamma_cap: f64,
}

impl ConeSpec {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0) {
            return Err(Error::Argument(format!("cone aperture must be nonnegative, got {gamma}")));
        }
        Ok(ConeSpec {
            gamma,
            gamma_cap: GAMMA_CAP,
        })
    }

    /// Largest normal fraction t = |⟨V, iν⟩|/‖V‖ in the cone.
    pub fn max_normal_fraction(&self) -> f64 {
        let g = self.gamma.min(self.gamma_cap);
        g / (1.0 + g * g).sqrt()
    }
}

/// Whether V ∈ ℝT lies in the cone of aperture γ.
pub fn cone_membership(frame: &TangentFrame, v: &ComplexVector, cone: &ConeSpec) -> Result<bool> {
    if v.n() != frame.normal.n() {
        return Err(Error::Argument("vector dimension differs from the frame".into()));
    }
    let x = v.to_real();
    let nrm = linalg::norm(&x);
    let along_nu = linalg::dot(&x, &frame.normal.to_real());
    if along_nu.abs() > 1e-8 * nrm.max(1e-300) && nrm > 0.0 {
        return Err(Error::Argument(format!(
            "vector is not in the real tangent space (normal component {along_nu:.3e})"
        )));
    }
    if cone.gamma >= cone.gamma_cap {
        return Ok(true);
    }
    let t = linalg::dot(&x, &frame.i_normal.to_real());
    let w = linalg::norm(&v.sub(&frame.i_normal.scale(C64::new(t, 0.0))).to_real());
    Ok(t.abs() <= cone.gamma * w + 1e-12 * nrm)
}

/// Basis for [`restricted_min_eig`]: `Complex` spans over ℂ, `Real` over ℝ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Span {
    Complex,
    Real,
}

/// Minimal eigenvalue of `which` (H or L) restricted to the span of an
/// orthonormal basis. For H over a complex span the real span {u, iu} is used.
pub fn restricted_min_eig(forms: &HessianForms, which: FormKind, basis: &[ComplexVector], span: Span) -> Result<f64> {
    if basis.is_empty() {
        return Err(Error::Argument("empty basis".into()));
    }
    for b in basis {
        if b.n() != forms.n() {
            return Err(Error::Argument("basis dimension differs from the forms".into()));
        }
    }
    let k = basis.len();
    match span {
        Span::Complex => {
            for j in 0..k {
                for l in 0..k {
                    let e = if j == l { 1.0 } else { 0.0 };
                    if (basis[j].hdot(&basis[l]) - C64::new(e, 0.0)).norm() > 1e-8 {
                        return Err(Error::Argument("basis is not orthonormal".into()));
                    }
                }
            }
        }
        Span::Real => {
            for j in 0..k {
                for l in 0..k {
                    let e = if j == l { 1.0 } else { 0.0 };
                    if (basis[j].hdot(&basis[l]).re - e).abs() > 1e-8 {
                        return Err(Error::Argument("basis is not orthonormal".into()));
                    }
                }
            }
        }
    }
    match (which, span) {
        (FormKind::Q, _) => Err(Error::Argument("restricted eigenvalues are defined for H and L only".into())),
        (FormKind::L, Span::Complex) => {
            // c* M c = 𝓛(Σ c_j b_j, Σ c_j b_j) with M_{lj} = 𝓛(b_j, b_l)
            let m = DMatrix::from_fn(k, k, |l, j| forms.apply(FormKind::L, &basis[j], &basis[l]).unwrap());
            let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
            Ok(linalg::herm_min_eig(&m).0)
        }
        (FormKind::H, Span::Complex) => {
            let real: Vec<ComplexVector> = basis.iter().flat_map(|u| [u.clone(), u.mul_i()]).collect();
            restricted_min_eig(forms, FormKind::H, &real, Span::Real)
        }
        (which, Span::Real) => {
            let m = real_gram_form(forms, which, basis);
            Ok(linalg::sym_eigen(&m).0[0])
        }
    }
}

/// M_jk = Re F(b_j, b_k), symmetrized.
fn real_gram_form(forms: &HessianForms, which: FormKind, basis: &[ComplexVector]) -> DMatrix<f64> {
    let k = basis.len();
    let m = DMatrix::from_fn(k, k, |j, l| forms.apply(which, &basis[j], &basis[l]).unwrap().re);
    (&m + m.transpose()) * 0.5
}

/// min xᵀAx + 2gᵀx over the unit sphere (trust-region boundary problem).
pub(crate) fn min_on_sphere(a: &DMatrix<f64>, g: &[f64]) -> f64 {
    let (lam, vecs) = linalg::sym_eigen(a);
    let d = lam.len();
    let gc: Vec<f64> = (0..d).map(|i| (0..d).map(|j| vecs[(j, i)] * g[j]).sum()).collect();
    let gnorm = linalg::norm(g);
    let l1 = lam[0];
    let objective = |x: &[f64]| -> f64 { (0..d).map(|i| lam[i] * x[i] * x[i] + 2.0 * gc[i] * x[i]).sum() };
    if gnorm == 0.0 {
        return l1;
    }
    let group_tol = 1e-12 * (1.0 + lam.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    let in_group: Vec<bool> = lam.iter().map(|&v| v - l1 <= group_tol).collect();
    let g_group = (0..d).filter(|&i| in_group[i]).map(|i| gc[i] * gc[i]).sum::<f64>().sqrt();
    if g_group <= 1e-13 * gnorm {
        // hard case candidate: μ = λ₁ with the remaining mass on the λ₁-eigenspace
        let rest: f64 = (0..d)
            .filter(|&i| !in_group[i])
            .map(|i| (gc[i] / (lam[i] - l1)).powi(2))
            .sum();
        if rest <= 1.0 {
            return l1 - (0..d)
                .filter(|&i| !in_group[i])
                .map(|i| gc[i] * gc[i] / (lam[i] - l1))
                .sum::<f64>();
        }
    }
    // φ(μ) = Σ g_i²/(λ_i − μ)² is increasing on (−∞, λ₁); φ(λ₁ − ‖g‖) ≤ 1
    let phi = |mu: f64| -> f64 { (0..d).map(|i| (gc[i] / (lam[i] - mu)).powi(2)).sum() };
    let (mut lo, mut hi) = (l1 - gnorm, l1);
    if lo >= hi {
        // ‖g‖ below the spacing of floats at λ₁: the minimum is λ₁ − 2‖g‖ to rounding
        return l1 - 2.0 * gnorm;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = lo;
    let mut x: Vec<f64> = (0..d).map(|i| -gc[i] / (lam[i] - mu)).collect();
    let nx = linalg::norm(&x);
    if nx > 0.0 {
        x.iter_mut().for_each(|v| *v /= nx);
    }
    // the normalized point is feasible; its value is within rounding of the minimum
    objective(&x)
}

/// Data of 𝓛 on ℝT split along iν and the real ℂT basis.
struct ConeData {
    c: f64,
    a: DMatrix<f64>,
    b: Vec<f64>,
}

fn cone_data(forms: &HessianForms, frame: &TangentFrame) -> ConeData {
    let e = frame.complex_tangent_real_basis();
    let inu = &frame.i_normal;
    ConeData {
        c: forms.levi(inu),
        a: real_gram_form(forms, FormKind::L, &e),
        b: e.iter().map(|ej| forms.apply(FormKind::L, inu, ej).unwrap().re).collect(),
    }
}

/// Minimum of 𝓛 over unit V = t·iν + s·w (w unit in ℂT, s = √(1 − t²)) at fixed t.
fn slice_min(data: &ConeData, t: f64) -> f64 {
    let s2 = (1.0 - t * t).max(0.0);
    let s = s2.sqrt();
    let a = &data.a * s2;
    let g: Vec<f64> = data.b.iter().map(|v| v * t * s).collect();
    t * t * data.c + min_on_sphere(&a, &g)
}

/// min 𝓛(V,V) over unit V in the cone, by scanning t over `resolution` slices of
/// [−T, T], T = γ/√(1+γ²), minimizing exactly on each slice and refining the best
/// slice by golden section. Without the refinement the error would be O(resolution⁻²).
pub fn cone_min(forms: &HessianForms, frame: &TangentFrame, cone: &ConeSpec, resolution: usize) -> Result<f64> {
    if resolution < 16 {
        return Err(Error::Argument(format!("resolution must be at least 16, got {resolution}")));
    }
    if forms.n() != frame.normal.n() {
        return Err(Error::Argument("forms and frame dimensions differ".into()));
    }
    let data = cone_data(forms, frame);
    let tmax = cone.max_normal_fraction();
    if tmax == 0.0 {
        return Ok(slice_min(&data, 0.0));
    }
    let ts: Vec<f64> = (0..resolution)
        .map(|k| -tmax + 2.0 * tmax * k as f64 / (resolution - 1) as f64)
        .collect();
    let vals: Vec<f64> = ts.iter().map(|&t| slice_min(&data, t)).collect();
    let best = (0..resolution).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).expect("nonempty");
    let mut lo = ts[best.saturating_sub(1)];
    let mut hi = ts[(best + 1).min(resolution - 1)];
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = slice_min(&data, x1);
    let mut f2 = slice_min(&data, x2);
    for _ in 0..80 {
        if hi - lo < 1e-13 {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = slice_min(&data, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = slice_min(&data, x2);
        }
    }
    Ok(vals[best].min(f1).min(f2))
}

/// Largest γ ∈ [0, γ_cap] with cone_min(γ) ≥ −eps·(1 + ‖𝓗‖), given boundary forms.
pub fn max_gamma_forms(forms: &HessianForms, frame: &TangentFrame, eps: f64, resolution: usize) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::Argument("tolerance must be positive".into()));
    }
    let tol = eps * (1.0 + forms.norm());
    let ok = |g: f64| -> Result<bool> { Ok(cone_min(forms, frame, &ConeSpec::new(g)?, resolution)? >= -tol) };
    if ok(GAMMA_CAP)? {
        return Ok(GAMMA_CAP);
    }
    if !ok(GAMMA_PROBE)? {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (GAMMA_PROBE, GAMMA_CAP);
    for _ in 0..GAMMA_BISECT_MAX_ITER {
        if hi - lo <= GAMMA_BISECT_WIDTH {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Largest aperture γ for which 𝓛_δ ≥ −tol·(1 + ‖𝓗_δ‖) on the cone at `p`.
pub fn max_gamma(spec: &DomainSpec, p: &BoundaryPoint, tol: f64) -> Result<f64> {
    let forms = boundary_delta_forms(spec, p)?;
    let frame = tangent_frame(spec, p)?;
    max_gamma_forms(&forms, &frame, tol, crate::config::CONE_RESOLUTION)
}

/// Boundary positivity data of δ at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityReport {
    pub point: Vec<f64>,
    pub normal: Vec<f64>,
    pub min_eig_l_ct: f64,
    pub min_eig_h_rt: f64,
    pub min_eig_h_ct: f64,
    /// 𝓛_δ on ℝT (the hypothesis of plurisubharmonicity of δ on the boundary)
    pub min_eig_l_rt: f64,
    /// 𝓛_δ on all of ℂⁿ
    pub min_eig_l_full: f64,
    pub gamma_query: f64,
    pub cone_min: f64,
    pub max_gamma: f64,
    /// Threshold used for every flag: ε·(1 + ‖𝓗_δ‖)
    pub tol: f64,
    pub convex: bool,
    pub pseudoconvex: bool,
    pub c_convex: bool,
    pub gamma_psh: bool,
}

/// Classify the boundary at `p` from the δ-Hessian (limit from the interior).
pub fn classify_boundary(spec: &DomainSpec, p: &BoundaryPoint, gamma_query: f64) -> Result<PositivityReport> {
    let forms = boundary_delta_forms(spec, p)?;
    classify_with_forms(&forms, &tangent_frame(spec, p)?, gamma_query)
}

pub fn classify_with_forms(forms: &HessianForms, frame: &TangentFrame, gamma_query: f64) -> Result<PositivityReport> {
    let cone = ConeSpec::new(gamma_query)?;
    let res = crate::config::CONE_RESOLUTION;
    let min_eig_l_ct = restricted_min_eig(forms, FormKind::L, &frame.complex_basis, Span::Complex)?;
    let min_eig_h_rt = restricted_min_eig(forms, FormKind::H, &frame.real_basis, Span::Real)?;
    let min_eig_h_ct = restricted_min_eig(forms, FormKind::H, &frame.complex_basis, Span::Complex)?;
    let min_eig_l_rt = restricted_min_eig(forms, FormKind::L, &frame.real_basis, Span::Real)?;
    let min_eig_l_full = linalg::herm_min_eig(&forms.l).0;
    let cmin = cone_min(forms, frame, &cone, res)?;
    let mg = max_gamma_forms(forms, frame, GAMMA_EPS, res)?;
    let tol = SEMIDEF_EPS * (1.0 + forms.norm());
    Ok(PositivityReport {
        point: frame.point.q.0.clone(),
        normal: frame.point.normal.clone(),
        min_eig_l_ct,
        min_eig_h_rt,
        min_eig_h_ct,
        min_eig_l_rt,
        min_eig_l_full,
        gamma_query,
        cone_min: cmin,
        max_gamma: mg,
        tol,
        convex: min_eig_h_rt >= -tol,
        pseudoconvex: min_eig_l_ct >= -tol,
        c_convex: min_eig_h_ct >= -tol,
        gamma_psh: cmin >= -tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::geometry::hessian_forms;
    use crate::linalg::RealPoint;
    use approx::assert_relative_eq;

    fn bp(spec: &DomainSpec, q: &[f64]) -> BoundaryPoint {
        BoundaryPoint::at(spec, RealPoint(q.to_vec())).unwrap()
    }

    #[test]
    fn sphere_problem_matches_brute_force() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, -0.5]);
        let g = [0.4, -0.2];
        let brute = (0..200_000)
            .map(|k| {
                let th = k as f64 * std::f64::consts::TAU / 200_000.0;
                let x = [th.cos(), th.sin()];
                a[(0, 0)] * x[0] * x[0] + 2.0 * a[(0, 1)] * x[0] * x[1] + a[(1, 1)] * x[1] * x[1]
                    + 2.0 * (g[0] * x[0] + g[1] * x[1])
            })
            .fold(f64::INFINITY, f64::min);
        assert_relative_eq!(min_on_sphere(&a, &g), brute, epsilon = 1e-9);
    }

    #[test]
    fn sphere_problem_hard_case() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 2.0]));
        assert_relative_eq!(min_on_sphere(&a, &[0.0, 0.3]), -1.0 - 0.09 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(min_on_sphere(&a, &[0.0, 0.0]), -1.0);
        // gradient below float spacing at λ₁ with a repeated eigenvalue
        let id = DMatrix::<f64>::identity(2, 2);
        let m = min_on_sphere(&id, &[3e-17, -4e-17]);
        assert!(m.is_finite() && (m - (1.0 - 1e-16)).abs() < 1e-15);
    }

    #[test]
    fn half_space_frame() {
        let s = catalog::half_space(3);
        let f = tangent_frame(&s, &bp(&s, &[0.1, 0.0, 0.0, 0.2, 0.0, 0.3])).unwrap();
        assert_eq!(f.complex_basis, vec![ComplexVector::basis(3, 0), ComplexVector::basis(3, 1)]);
        assert_eq!(*f.real_basis.last().unwrap(), ComplexVector::basis(3, 2).mul_i());
        assert!(f.gram_residual() < 1e-15 && f.relation_residual() < 1e-15);
    }

    #[test]
    fn ball_frame_and_cone() {
        let s = catalog::ball(2);
        let f = tangent_frame(&s, &bp(&s, &[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(f.complex_basis, vec![ComplexVector::basis(2, 1)]);
        assert_eq!(f.i_normal, ComplexVector::basis(2, 0).mul_i());
        let e2 = ComplexVector::basis(2, 1);
        let ie1 = ComplexVector::basis(2, 0).mul_i();
        assert!(cone_membership(&f, &e2, &ConeSpec::new(0.0).unwrap()).unwrap());
        assert!(!cone_membership(&f, &ie1, &ConeSpec::new(0.0).unwrap()).unwrap());
        let diag = ie1.add(&e2).scale(C64::new(0.5f64.sqrt(), 0.0));
        assert!(cone_membership(&f, &diag, &ConeSpec::new(1.0).unwrap()).unwrap());
        assert!(cone_membership(&f, &ie1, &ConeSpec::new(GAMMA_CAP).unwrap()).unwrap());
        let e1 = ComplexVector::basis(2, 0);
        assert!(matches!(cone_membership(&f, &e1, &ConeSpec::new(1.0).unwrap()), Err(Error::Argument(_))));
        assert!(ConeSpec::new(-1.0).is_err());
    }

    #[test]
    fn restricted_eigenvalues() {
        let s = catalog::ball(2);
        let p = bp(&s, &[1.0, 0.0, 0.0, 0.0]);
        let f = tangent_frame(&s, &p).unwrap();
        let zero = HessianForms::from_real_hessian(DMatrix::zeros(4, 4), p.q.clone(), "0");
        assert_eq!(restricted_min_eig(&zero, FormKind::L, &f.complex_basis, Span::Complex).unwrap(), 0.0);
        let forms = boundary_delta_forms(&s, &p).unwrap();
        assert_relative_eq!(
            restricted_min_eig(&forms, FormKind::L, &f.complex_basis, Span::Complex).unwrap(),
            0.5,
            epsilon = 1e-7
        );
        let bad = vec![ComplexVector::basis(2, 0).scale(C64::new(2.0, 0.0))];
        assert!(restricted_min_eig(&forms, FormKind::L, &bad, Span::Complex).is_err());
        assert!(restricted_min_eig(&forms, FormKind::Q, &f.complex_basis, Span::Complex).is_err());

        let slab = catalog::parabolic_slab();
        let p0 = bp(&slab, &[0.0; 4]);
        let fr = tangent_frame(&slab, &p0).unwrap();
        let r = hessian_forms(&slab.f, &p0.q).unwrap();
        assert_relative_eq!(
            restricted_min_eig(&r, FormKind::L, &fr.real_basis, Span::Real).unwrap(),
            -0.5,
            epsilon = 1e-14
        );
    }

    #[test]
    fn slab_cone_minimum() {
        let s = catalog::parabolic_slab();
        let p = bp(&s, &[0.0; 4]);
        let forms = boundary_delta_forms(&s, &p).unwrap();
        let f = tangent_frame(&s, &p).unwrap();
        assert!(cone_min(&forms, &f, &ConeSpec::new(0.0).unwrap(), 64).unwrap().abs() < 1e-8);
        for g in [0.5, 1.0, 2.0] {
            let v = cone_min(&forms, &f, &ConeSpec::new(g).unwrap(), 64).unwrap();
            assert_relative_eq!(v, -g * g / (2.0 * (1.0 + g * g)), epsilon = 1e-6);
        }
        assert!(cone_min(&forms, &f, &ConeSpec::new(1.0).unwrap(), 8).is_err());
        assert_eq!(max_gamma(&s, &p, GAMMA_EPS).unwrap(), 0.0);
    }

    #[test]
    fn model_aperture() {
        let s = catalog::model(2.0);
        let p = bp(&s, &[0.0; 4]);
        assert_relative_eq!(max_gamma(&s, &p, GAMMA_EPS).unwrap(), 1.0, epsilon = 1e-4);
    }

    #[test]
    fn classification() {
        let s = catalog::ball(2);
        let r = classify_boundary(&s, &bp(&s, &[1.0, 0.0, 0.0, 0.0]), 5.0).unwrap();
        assert!(r.convex && r.pseudoconvex && r.c_convex && r.gamma_psh);
        assert_eq!(r.max_gamma, GAMMA_CAP);
        assert!(r.cone_min >= 0.25 - 1e-7);

        let s = catalog::non_pseudoconvex_graph();
        let r = classify_boundary(&s, &bp(&s, &[0.0; 4]), 0.0).unwrap();
        assert!(!r.pseudoconvex);
        assert_relative_eq!(r.min_eig_l_ct, -1.0, epsilon = 1e-6);

        let s = catalog::parabolic_slab();
        let r = classify_boundary(&s, &bp(&s, &[0.0; 4]), 0.1).unwrap();
        assert!(r.pseudoconvex && !r.gamma_psh);
    }
}
