//! Defining functions, domain specs and the three Hessian forms 𝓗, 𝓛, 𝓠.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::linalg::{self, mul_i_real, real_rep, ComplexVector, RealPoint, C64};

/// Axis-aligned box in ℝ²ⁿ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() || !lo.len().is_multiple_of(2) {
            return Err(Error::Argument("box bounds must have equal, even length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::Argument("box needs lo < hi in every coordinate".into()));
        }
        Ok(BBox { lo, hi })
    }

    /// The cube [−h, h]^{2n}.
    pub fn cube(n: usize, half_width: f64) -> Self {
        BBox {
            lo: vec![-half_width; 2 * n],
            hi: vec![half_width; 2 * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.lo.len()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (a, b))| *v >= *a && *v <= *b)
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| rng.gen_range(*a..*b))
            .collect()
    }

    pub fn corners(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        let d = self.dim();
        (0..(1usize << d)).map(move |mask| {
            (0..d)
                .map(|i| if mask >> i & 1 == 1 { self.hi[i] } else { self.lo[i] })
                .collect()
        })
    }

    /// Smallest box containing the image of this box under `x ↦ m·x + t`.
    pub fn image(&self, m: &DMatrix<f64>, t: &[f64]) -> BBox {
        let d = self.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for c in self.corners() {
            for i in 0..d {
                let v: f64 = (0..d).map(|j| m[(i, j)] * c[j]).sum::<f64>() + t[i];
                lo[i] = lo[i].min(v);
                hi[i] = hi[i].max(v);
            }
        }
        BBox { lo, hi }
    }
}

/// `w ↦ U·w + shift` on ℂⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    pub u: DMatrix<C64>,
    pub shift: ComplexVector,
    real: DMatrix<f64>,
    real_shift: Vec<f64>,
}

impl AffineMap {
    pub fn new(u: DMatrix<C64>, shift: ComplexVector) -> Self {
        let real = real_rep(&u);
        let real_shift = shift.to_real();
        AffineMap {
            u,
            shift,
            real,
            real_shift,
        }
    }

    pub fn apply(&self, w: &[f64]) -> Vec<f64> {
        let d = w.len();
        (0..d)
            .map(|i| (0..d).map(|j| self.real[(i, j)] * w[j]).sum::<f64>() + self.real_shift[i])
            .collect()
    }

    /// Inverse of a unitary affine map.
    pub fn apply_inverse(&self, x: &[f64]) -> Vec<f64> {
        let d = x.len();
        let y = linalg::sub(x, &self.real_shift);
        (0..d)
            .map(|i| (0..d).map(|j| self.real[(j, i)] * y[j]).sum::<f64>())
            .collect()
    }

    pub fn real_matrix(&self) -> &DMatrix<f64> {
        &self.real
    }

    /// `self ∘ inner`
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        let u = &self.u * &inner.u;
        let s = nalgebra::DVector::from_vec(inner.shift.0.clone());
        let moved = &self.u * s;
        let shift = ComplexVector(moved.iter().copied().collect()).add(&self.shift);
        AffineMap::new(u, shift)
    }
}

/// Value, real gradient and real Hessian of a defining function at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivatives {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: DMatrix<f64>,
}

/// A defining function: an expression over the box `bbox`, optionally
/// precomposed with a unitary affine change of coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct DefiningFunction {
    pub name: String,
    pub n: usize,
    pub expr: Expr,
    /// Box in the coordinates of `expr`.
    pub bbox: BBox,
    pub coords: Option<AffineMap>,
}

impl DefiningFunction {
    pub fn new(name: impl Into<String>, n: usize, expr: Expr, bbox: BBox) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("dimension must be at least 1".into()));
        }
        if bbox.dim() != 2 * n {
            return Err(Error::Argument(format!(
                "bounding box has {} coordinates, expected {}",
                bbox.dim(),
                2 * n
            )));
        }
        if let Some(k) = expr.max_index() {
            if k >= n {
                return Err(Error::Argument(format!("expression uses z{} but n = {n}", k + 1)));
            }
        }
        Ok(DefiningFunction {
            name: name.into(),
            n,
            expr,
            bbox,
            coords: None,
        })
    }

    fn to_expr_coords(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != 2 * self.n {
            return Err(Error::Argument(format!(
                "point has {} coordinates, expected {}",
                z.len(),
                2 * self.n
            )));
        }
        let x = match &self.coords {
            Some(map) => map.apply(z),
            None => z.to_vec(),
        };
        if !self.bbox.contains(&x) {
            return Err(Error::Domain(format!("point {z:?} lies outside the bounding box")));
        }
        Ok(x)
    }

    pub fn contains(&self, z: &[f64]) -> bool {
        self.to_expr_coords(z).is_ok()
    }

    pub fn value(&self, z: &[f64]) -> Result<f64> {
        Ok(self.expr.eval(&self.to_expr_coords(z)?))
    }

    /// Exact value, gradient and Hessian at `z`.
    pub fn eval_derivatives(&self, z: &[f64]) -> Result<Derivatives> {
        let x = self.to_expr_coords(z)?;
        let jet = self.expr.eval_jet(&x);
        let m = x.len();
        let h = DMatrix::from_row_slice(m, m, &jet.hess);
        match &self.coords {
            None => Ok(Derivatives {
                value: jet.value,
                gradient: jet.grad,
                hessian: h,
            }),
            Some(map) => {
                let a = map.real_matrix();
                let g = a.transpose() * nalgebra::DVector::from_vec(jet.grad);
                Ok(Derivatives {
                    value: jet.value,
                    gradient: g.iter().copied().collect(),
                    hessian: a.transpose() * h * a,
                })
            }
        }
    }

    pub fn gradient(&self, z: &[f64]) -> Result<Vec<f64>> {
        Ok(self.eval_derivatives(z)?.gradient)
    }
}

/// Complex gradient ∂f = (f_{z_k}) = ½(f_x − i f_y) from a real gradient.
pub fn complex_gradient(grad: &[f64]) -> ComplexVector {
    ComplexVector(grad.chunks(2).map(|c| C64::new(0.5 * c[0], -0.5 * c[1])).collect())
}

/// ⟨∂f, V⟩ = Σ f_{z_k} V_k
pub fn apply_complex_gradient(grad: &[f64], v: &ComplexVector) -> C64 {
    complex_gradient(grad).0.iter().zip(&v.0).map(|(a, b)| a * b).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormKind {
    /// Real Hessian 𝓗
    H,
    /// Levi form 𝓛
    L,
    /// Complement of the Levi form 𝓠
    Q,
}

/// 𝓗, 𝓛 and 𝓠 of a function at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianForms {
    pub h: DMatrix<f64>,
    /// L_{kl} = f_{z_k z̄_l}
    pub l: DMatrix<C64>,
    /// Q_{kl} = f_{z_k z_l}
    pub q: DMatrix<C64>,
    pub point: RealPoint,
    pub function: String,
}

impl HessianForms {
    /// Assemble the complex second derivatives from a real 2n×2n Hessian.
    pub fn from_real_hessian(h: DMatrix<f64>, point: RealPoint, function: impl Into<String>) -> Self {
        let n = h.nrows() / 2;
        let mut l = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        let mut q = l.clone();
        for k in 0..n {
            for j in 0..n {
                let (xk, yk, xj, yj) = (2 * k, 2 * k + 1, 2 * j, 2 * j + 1);
                // ∂_{z_k} ∂_{z̄_j} = ¼(∂x_k − i∂y_k)(∂x_j + i∂y_j)
                l[(k, j)] = C64::new(
                    0.25 * (h[(xk, xj)] + h[(yk, yj)]),
                    0.25 * (h[(xk, yj)] - h[(yk, xj)]),
                );
                // ∂_{z_k} ∂_{z_j} = ¼(∂x_k − i∂y_k)(∂x_j − i∂y_j)
                q[(k, j)] = C64::new(
                    0.25 * (h[(xk, xj)] - h[(yk, yj)]),
                    -0.25 * (h[(xk, yj)] + h[(yk, xj)]),
                );
            }
        }
        HessianForms {
            h,
            l,
            q,
            point,
            function: function.into(),
        }
    }

    pub fn n(&self) -> usize {
        self.l.nrows()
    }

    fn check_dims(&self, a: &ComplexVector, b: &ComplexVector) -> Result<()> {
        let n = self.n();
        if a.n() != n || b.n() != n {
            return Err(Error::Argument(format!(
                "vectors of dimension {} and {} for forms of dimension {n}",
                a.n(),
                b.n()
            )));
        }
        Ok(())
    }

    /// Evaluate one of the forms on (A, B).
    ///
    /// 𝓗(A,B) = 2 Re Σ f_{z_k z_l} A_k B_l + 2 Σ f_{z_k z̄_l} A_k B̄_l, computed from
    /// the real matrix: its real part is aᵀ H b and its imaginary part is
    /// ½(aᵀ H (ib) − (ia)ᵀ H b).
    pub fn apply(&self, which: FormKind, a: &ComplexVector, b: &ComplexVector) -> Result<C64> {
        self.check_dims(a, b)?;
        let n = self.n();
        Ok(match which {
            FormKind::H => {
                let (ar, br) = (a.to_real(), b.to_real());
                let (iar, ibr) = (mul_i_real(&ar), mul_i_real(&br));
                C64::new(
                    bilinear(&self.h, &ar, &br),
                    0.5 * (bilinear(&self.h, &ar, &ibr) - bilinear(&self.h, &iar, &br)),
                )
            }
            FormKind::L => {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..n {
                    for j in 0..n {
                        s += self.l[(k, j)] * a.0[k] * b.0[j].conj();
                    }
                }
                s
            }
            FormKind::Q => {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..n {
                    for j in 0..n {
                        s += self.q[(k, j)] * a.0[k] * b.0[j];
                    }
                }
                C64::new(s.re, 0.0)
            }
        })
    }

    /// 𝓛(V,V), real.
    pub fn levi(&self, v: &ComplexVector) -> f64 {
        self.apply(FormKind::L, v, v).map(|c| c.re).unwrap_or(f64::NAN)
    }

    /// 𝓗(V,V), real.
    pub fn real_hessian(&self, v: &ComplexVector) -> f64 {
        let x = v.to_real();
        bilinear(&self.h, &x, &x)
    }

    /// ‖H‖₂
    pub fn norm(&self) -> f64 {
        linalg::spectral_norm_sym(&self.h)
    }
}

pub(crate) fn bilinear(m: &DMatrix<f64>, a: &[f64], b: &[f64]) -> f64 {
    let d = a.len();
    let mut s = 0.0;
    for i in 0..d {
        let mut row = 0.0;
        for j in 0..d {
            row += m[(i, j)] * b[j];
        }
        s += a[i] * row;
    }
    s
}

/// Residual of 𝓗(A,B) + 𝓗(iA,iB) − 4𝓛(A,B).
pub fn check_4l_identity(forms: &HessianForms, a: &ComplexVector, b: &ComplexVector) -> Result<C64> {
    let h1 = forms.apply(FormKind::H, a, b)?;
    let h2 = forms.apply(FormKind::H, &a.mul_i(), &b.mul_i())?;
    let l = forms.apply(FormKind::L, a, b)?;
    Ok(h1 + h2 - l * 4.0)
}

pub fn eval_derivatives(f: &DefiningFunction, z: &RealPoint) -> Result<Derivatives> {
    f.eval_derivatives(z.as_slice())
}

pub fn hessian_forms(f: &DefiningFunction, z: &RealPoint) -> Result<HessianForms> {
    let d = f.eval_derivatives(z.as_slice())?;
    Ok(HessianForms::from_real_hessian(d.hessian, z.clone(), f.name.clone()))
}

/// f(p+W) − [f(p) + 2 Re⟨∂f(p), W⟩ + 𝓠(W,W) + 𝓛(W,W)]
pub fn taylor_residual(f: &DefiningFunction, p: &RealPoint, w: &ComplexVector) -> Result<f64> {
    if w.n() != p.n() {
        return Err(Error::Argument("direction and point dimensions differ".into()));
    }
    let d = f.eval_derivatives(p.as_slice())?;
    let q = p.offset(&w.to_real(), 1.0);
    let fq = f.value(q.as_slice())?;
    let forms = HessianForms::from_real_hessian(d.hessian, p.clone(), f.name.clone());
    let lin = 2.0 * apply_complex_gradient(&d.gradient, w).re;
    let quad = forms.apply(FormKind::Q, w, w)?.re + forms.levi(w);
    Ok(fq - (d.value + lin + quad))
}

/// Where a domain came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DomainSource {
    Catalog {
        id: String,
        params: serde_json::Map<String, serde_json::Value>,
    },
    Expression {
        text: String,
    },
    /// r = Re z_n + h
    Graph {
        h: String,
    },
}

/// A smoothly bounded domain {r < 0} restricted to a bounding box.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub name: String,
    pub source: DomainSource,
    pub f: DefiningFunction,
    /// Box in the current coordinates inside which `f` can be evaluated.
    pub bbox: BBox,
    /// Region from which verification samples are drawn.
    pub sample_box: BBox,
    pub shell_width: f64,
    /// Length scale (roughly the smallest radius of curvature, capped at 1).
    pub scale: f64,
    /// Spread-out points on the zero set, used as multistart seeds by the projector.
    pub anchors: Vec<Vec<f64>>,
}

const VALIDATION_SAMPLES: usize = 4096;
const VALIDATION_SEED: u64 = 0x0b0d_a12e;
const MAX_VALIDATION_ROOTS: usize = 256;
const GRADIENT_FLOOR: f64 = 1e-6;

impl DomainSpec {
    /// Build and validate a domain. `scale` and `shell_width` default to the
    /// curvature estimate from validation and 0.1·scale.
    pub fn new(
        name: impl Into<String>,
        source: DomainSource,
        f: DefiningFunction,
        sample_box: Option<BBox>,
        scale: Option<f64>,
        shell_width: Option<f64>,
    ) -> Result<Self> {
        let bbox = f.bbox.clone();
        let sample_box = sample_box.unwrap_or_else(|| bbox.clone());
        if sample_box.dim() != bbox.dim() {
            return Err(Error::spec("sample_box", "dimension differs from bbox"));
        }
        let roots = validate_zero_set(&f, &bbox)?;
        let scale = match scale {
            Some(s) if s > 0.0 => s,
            Some(_) => return Err(Error::spec("scale", "must be positive")),
            None => curvature_scale(&f, &roots),
        };
        let shell_width = match shell_width {
            Some(w) if w > 0.0 => w,
            Some(_) => return Err(Error::spec("shell_width", "must be positive")),
            None => crate::config::DEFAULT_SHELL_FRACTION * scale,
        };
        let anchors = spread_subset(&roots, crate::config::MULTISTART_SEEDS);
        Ok(DomainSpec {
            name: name.into(),
            source,
            f,
            bbox,
            sample_box,
            shell_width,
            scale,
            anchors,
        })
    }

    pub fn n(&self) -> usize {
        self.f.n
    }

    pub fn with_sample_box(mut self, sample_box: BBox) -> Result<Self> {
        if sample_box.dim() != self.bbox.dim() {
            return Err(Error::Argument("sample box dimension differs from bbox".into()));
        }
        self.sample_box = sample_box;
        Ok(self)
    }

    pub fn with_shell_width(mut self, w: f64) -> Self {
        self.shell_width = w;
        self
    }
}

/// Sample the box, require a sign change of r and a nonvanishing gradient at
/// the zero crossings found. Returns the crossings.
fn validate_zero_set(f: &DefiningFunction, bbox: &BBox) -> Result<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(VALIDATION_SEED);
    let mut prev: Option<(Vec<f64>, f64)> = None;
    let mut roots = Vec::new();
    let (mut neg, mut pos) = (false, false);
    for _ in 0..VALIDATION_SAMPLES {
        let z = bbox.sample(&mut rng);
        let v = match f.value(&z) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if !v.is_finite() {
            return Err(Error::Construction(format!("defining function is not finite at {z:?}")));
        }
        neg |= v < 0.0;
        pos |= v > 0.0;
        if let Some((pz, pv)) = &prev {
            if (*pv < 0.0) != (v < 0.0) && roots.len() < MAX_VALIDATION_ROOTS {
                if let Some(root) = bisect_segment(f, pz, *pv, &z) {
                    roots.push(root);
                }
            }
        }
        prev = Some((z, v));
    }
    if !(neg && pos) {
        return Err(Error::Construction(
            "zero set of the defining function does not meet the bounding box".into(),
        ));
    }
    for root in &roots {
        let g = f.gradient(root)?;
        if linalg::norm(&g) < GRADIENT_FLOOR {
            return Err(Error::Construction(format!(
                "gradient of the defining function vanishes on the zero set near {root:?}"
            )));
        }
    }
    Ok(roots)
}

fn bisect_segment(f: &DefiningFunction, a: &[f64], va: f64, b: &[f64]) -> Option<Vec<f64>> {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let at = |t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let v = f.value(&at(mid)).ok()?;
        if (v < 0.0) == (va < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(at(0.5 * (lo + hi)))
}

/// Greedy farthest-point selection of at most `k` points, starting from the first.
fn spread_subset(points: &[Vec<f64>], k: usize) -> Vec<Vec<f64>> {
    if points.is_empty() {
        return Vec::new();
    }
    let mut chosen = vec![points[0].clone()];
    let mut gap: Vec<f64> = points.iter().map(|p| linalg::norm(&linalg::sub(p, &points[0]))).collect();
    while chosen.len() < k.min(points.len()) {
        let (i, &g) = gap
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");
        if g == 0.0 {
            break;
        }
        chosen.push(points[i].clone());
        for (j, p) in points.iter().enumerate() {
            gap[j] = gap[j].min(linalg::norm(&linalg::sub(p, &points[i])));
        }
    }
    chosen
}

/// min(1, 1/κ_max) over the given boundary points, κ being principal curvatures.
pub(crate) fn curvature_scale(f: &DefiningFunction, roots: &[Vec<f64>]) -> f64 {
    let mut kmax: f64 = 0.0;
    for p in roots {
        if let Ok(d) = f.eval_derivatives(p) {
            let g = nalgebra::DVector::from_vec(d.gradient.clone());
            let gn = g.norm();
            if gn == 0.0 {
                continue;
            }
            let nu = &g / gn;
            let m = g.len();
            let proj = DMatrix::identity(m, m) - &nu * nu.transpose();
            let shape = &proj * &d.hessian * &proj / gn;
            kmax = kmax.max(linalg::spectral_norm_sym(&shape));
        }
    }
    if kmax <= 1.0 {
        1.0
    } else {
        1.0 / kmax
    }
}

/// The domain in coordinates w with z = U·w + shift, i.e. defining function r∘(U·+shift).
pub fn unitary_transform(spec: &DomainSpec, u: &DMatrix<C64>, shift: &ComplexVector) -> Result<DomainSpec> {
    let n = spec.n();
    if u.nrows() != n || u.ncols() != n || shift.n() != n {
        return Err(Error::Argument(format!("transform dimensions do not match n = {n}")));
    }
    let defect = linalg::unitarity_defect(u);
    if defect > 1e-12 {
        return Err(Error::Argument(format!("matrix is not unitary (defect {defect:.2e})")));
    }
    let map = AffineMap::new(u.clone(), shift.clone());
    let composed = match &spec.f.coords {
        Some(outer) => outer.compose(&map),
        None => map.clone(),
    };
    let mut f = spec.f.clone();
    f.coords = Some(composed);
    // boxes in the new coordinates: w = Uᵀ(z − shift)
    let inv = map.real_matrix().transpose();
    let neg_shift: Vec<f64> = {
        let s = shift.to_real();
        let t = &inv * nalgebra::DVector::from_vec(s);
        t.iter().map(|v| -v).collect()
    };
    let bbox = spec.bbox.image(&inv, &neg_shift);
    let sample_box = spec.sample_box.image(&inv, &neg_shift);
    let anchors = spec
        .anchors
        .iter()
        .map(|a| {
            let w = &inv * nalgebra::DVector::from_column_slice(a);
            w.iter().zip(&neg_shift).map(|(x, s)| x + s).collect()
        })
        .collect();
    Ok(DomainSpec {
        name: spec.name.clone(),
        source: spec.source.clone(),
        f,
        bbox,
        sample_box,
        shell_width: spec.shell_width,
        scale: spec.scale,
        anchors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn func(src: &str, n: usize) -> DefiningFunction {
        DefiningFunction::new("t", n, Expr::parse(src, n).unwrap(), BBox::cube(n, 2.0)).unwrap()
    }

    fn cv(v: &[(f64, f64)]) -> ComplexVector {
        ComplexVector(v.iter().map(|&(a, b)| C64::new(a, b)).collect())
    }

    #[test]
    fn ball_derivatives() {
        let f = func("abs2(z1) + abs2(z2) - 1", 2);
        let d = f.eval_derivatives(&[0.5, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(d.value, -0.75);
        assert_eq!(d.gradient, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(d.hessian, DMatrix::identity(4, 4) * 2.0);
    }

    #[test]
    fn half_space_derivatives() {
        let f = func("re(z2)", 2);
        let d = f.eval_derivatives(&[0.3, -0.1, 0.7, 1.2]).unwrap();
        assert_eq!(d.gradient, vec![0.0, 0.0, 1.0, 0.0]);
        assert_eq!(d.hessian, DMatrix::zeros(4, 4));
    }

    #[test]
    fn outside_box_is_domain_error() {
        let f = func("re(z1)", 1);
        assert!(matches!(f.value(&[3.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn monomial_levi_matrix() {
        // f = |z1|^2 |z2|^2 at (1, 1): f_{z1 z̄1} = |z2|^2 = 1, f_{z1 z̄2} = z̄1 z2 = 1
        let f = func("abs2(z1)*abs2(z2)", 2);
        let forms = hessian_forms(&f, &RealPoint(vec![1.0, 0.0, 1.0, 0.0])).unwrap();
        for k in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(forms.l[(k, j)].re, 1.0, epsilon = 1e-14);
                assert_relative_eq!(forms.l[(k, j)].im, 0.0, epsilon = 1e-14);
            }
        }
        let vals = linalg::herm_eigenvalues(&forms.l);
        assert_relative_eq!(vals[0], 0.0, epsilon = 1e-14);
        assert_relative_eq!(vals[1], 2.0, epsilon = 1e-14);
        let a = cv(&[(1.0, 0.0), (-1.0, 0.0)]);
        assert!(forms.apply(FormKind::L, &a, &a).unwrap().norm() < 1e-14);
        let e1 = ComplexVector::basis(2, 0);
        assert_relative_eq!(forms.apply(FormKind::L, &e1, &e1).unwrap().re * 4.0, 4.0);
        assert!(check_4l_identity(&forms, &e1, &e1).unwrap().norm() < 1e-13);
    }

    #[test]
    fn sum_of_squares_forms() {
        let f = func("abs2(z1) + abs2(z2)", 2);
        let forms = hessian_forms(&f, &RealPoint(vec![0.1, 0.2, 0.3, 0.4])).unwrap();
        assert!((forms.l.clone() - DMatrix::identity(2, 2).map(|v: f64| C64::new(v, 0.0))).norm() < 1e-15);
        assert!(forms.q.norm() < 1e-15);
        let a = cv(&[(0.3, -1.0), (2.0, 0.5)]);
        let h = forms.apply(FormKind::H, &a, &a).unwrap();
        assert_relative_eq!(h.re, 2.0 * a.norm().powi(2), epsilon = 1e-13);
        assert!(h.im.abs() < 1e-14);
        let l1 = cv(&[(1.0, 0.0), (0.0, 0.0)]);
        assert_eq!(forms.apply(FormKind::L, &l1, &l1).unwrap(), C64::new(1.0, 0.0));
        let zero = ComplexVector::zeros(2);
        assert_eq!(forms.apply(FormKind::H, &zero, &a).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn pluriharmonic_cancellation() {
        // Re(z1^2) = x1^2 - x2^2: L = 0, Q(V,V) = Re(V1^2)
        let f = func("re(z1)^2 - im(z1)^2", 2);
        let forms = hessian_forms(&f, &RealPoint(vec![0.2, 0.1, -0.3, 0.0])).unwrap();
        assert!(forms.l.norm() < 1e-15);
        let v = cv(&[(0.6, 0.8), (0.1, 0.0)]);
        let vv = v.0[0] * v.0[0];
        assert_relative_eq!(forms.apply(FormKind::Q, &v, &v).unwrap().re, vv.re, epsilon = 1e-14);
        let e1 = ComplexVector::basis(2, 0);
        let s = forms.apply(FormKind::H, &e1, &e1).unwrap()
            + forms.apply(FormKind::H, &e1.mul_i(), &e1.mul_i()).unwrap();
        assert!(s.norm() < 1e-14);
    }

    #[test]
    fn dimension_mismatch() {
        let f = func("abs2(z1) + abs2(z2) - 1", 2);
        let forms = hessian_forms(&f, &RealPoint::zeros(2)).unwrap();
        let a = ComplexVector::zeros(3);
        assert!(matches!(forms.apply(FormKind::L, &a, &a), Err(Error::Argument(_))));
        assert!(matches!(check_4l_identity(&forms, &a, &a), Err(Error::Argument(_))));
    }

    #[test]
    fn taylor_of_cubic() {
        // Re(z1^3) = x^3 - 3xy^2; at p = 0 all terms through second order vanish
        let f = func("x1^3 - 3*x1*x2^2", 2);
        let p = RealPoint::zeros(2);
        let r1 = taylor_residual(&f, &p, &cv(&[(0.1, 0.0), (0.0, 0.0)])).unwrap();
        let r2 = taylor_residual(&f, &p, &cv(&[(0.05, 0.0), (0.0, 0.0)])).unwrap();
        assert_relative_eq!(r1, 0.001, epsilon = 1e-15);
        assert_relative_eq!(r2, 0.000125, epsilon = 1e-16);
        assert_relative_eq!(r1 / r2, 8.0, epsilon = 1e-9);
    }

    #[test]
    fn taylor_exact_for_quadratics() {
        let f = func("2*abs2(z1) - re(z1)*im(z2) + 3*im(z1)^2 - re(z2) + 0.5", 2);
        let p = RealPoint(vec![0.2, -0.4, 0.1, 0.3]);
        let w = cv(&[(0.3, 0.2), (-0.5, 0.7)]);
        assert!(taylor_residual(&f, &p, &w).unwrap().abs() < 1e-12);
    }

    #[test]
    fn empty_zero_set_rejected() {
        let f = DefiningFunction::new("far", 2, Expr::parse("abs2(z1)+abs2(z2)-1", 2).unwrap(), BBox::cube(2, 0.3)).unwrap();
        let src = DomainSource::Expression { text: String::new() };
        assert!(matches!(DomainSpec::new("far", src, f, None, None, None), Err(Error::Construction(_))));
    }

    #[test]
    fn vanishing_gradient_rejected() {
        let f = func("re(z1)^3", 1);
        let src = DomainSource::Expression { text: String::new() };
        assert!(matches!(DomainSpec::new("cusp", src, f, None, None, None), Err(Error::Construction(_))));
    }

    #[test]
    fn non_unitary_rejected() {
        let spec = crate::catalog::ball(2);
        let u = DMatrix::from_row_slice(2, 2, &[C64::new(2.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(matches!(unitary_transform(&spec, &u, &ComplexVector::zeros(2)), Err(Error::Argument(_))));
    }

    #[test]
    fn identity_transform_keeps_values() {
        let spec = crate::catalog::ball(2);
        let id = DMatrix::identity(2, 2).map(|v: f64| C64::new(v, 0.0));
        let t = unitary_transform(&spec, &id, &ComplexVector::zeros(2)).unwrap();
        let z = [0.3, 0.1, -0.2, 0.5];
        assert_eq!(t.f.eval_derivatives(&z).unwrap(), spec.f.eval_derivatives(&z).unwrap());
        assert_eq!(t.bbox, spec.bbox);
    }

    #[test]
    fn swap_maps_ball_to_ball() {
        let spec = crate::catalog::ball(2);
        let c = |v: f64| C64::new(v, 0.0);
        let swap = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let t = unitary_transform(&spec, &swap, &ComplexVector::zeros(2)).unwrap();
        let z = [0.3, 0.1, -0.2, 0.5];
        assert_relative_eq!(t.f.value(&z).unwrap(), spec.f.value(&z).unwrap(), epsilon = 1e-15);
    }
}
