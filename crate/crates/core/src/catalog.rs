//! Built-in domains.
//!
//! | id | defining function | role |
//! |----|-------------------|------|
//! | `ball` | Σ\|z_j\|² − 1 | strongly pseudoconvex, convex |
//! | `complex-ellipsoid` | Σ a_j\|z_j\|² − 1 | convex, circular |
//! | `real-ellipsoid` | Σ a_j x_{2j−1}² + b_j x_{2j}² − 1 | convex, not circular |
//! | `half-space` | Re z_n | flat |
//! | `parabolic-slab` | Re z₂ − (Im z₂)² | Levi flat, δ not psh on the boundary |
//! | `model` | Re z₂ + \|z₁\|² − β(Im z₂)² | γ-psh exactly for γ ≤ √(2/β) |
//! | `non-pseudoconvex-graph` | Re z₂ − \|z₁\|² | fails pseudoconvexity |
//! | `ball-image` | \|z₁\|² + \|z₂ − c z₁²\|² − 1 | biholomorphic image of the ball, not convex |

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{curvature_scale, BBox, DefiningFunction, DomainSource, DomainSpec};

pub const IDS: &[(&str, &str)] = &[
    ("ball", "unit ball, params: n"),
    ("complex-ellipsoid", "sum a_j |z_j|^2 < 1, params: a (list)"),
    ("real-ellipsoid", "sum a_j x_{2j-1}^2 + b_j x_{2j}^2 < 1, params: a, b (lists)"),
    ("half-space", "Re z_n < 0, params: n"),
    ("parabolic-slab", "Re z2 - (Im z2)^2 < 0"),
    ("model", "Re z2 + |z1|^2 - beta (Im z2)^2 < 0, params: beta"),
    ("non-pseudoconvex-graph", "Re z2 - |z1|^2 < 0"),
    ("ball-image", "|z1|^2 + |z2 - c z1^2|^2 < 1, params: c"),
];

fn build(
    id: &str,
    params: Map<String, Value>,
    n: usize,
    expr: Expr,
    bbox: BBox,
    sample_box: Option<BBox>,
    scale: f64,
) -> DomainSpec {
    let f = DefiningFunction::new(id, n, expr, bbox).expect("catalog function");
    DomainSpec::new(
        id,
        DomainSource::Catalog {
            id: id.to_string(),
            params,
        },
        f,
        sample_box,
        Some(scale),
        None,
    )
    .expect("catalog domain validates")
}

fn params_of(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

pub fn ball(n: usize) -> DomainSpec {
    let expr = Expr::sum((0..n).map(Expr::abs2)) - Expr::c(1.0);
    build("ball", params_of(&[("n", n.into())]), n, expr, BBox::cube(n, 1.25), None, 1.0)
}

pub fn complex_ellipsoid(a: &[f64]) -> DomainSpec {
    let n = a.len();
    let expr = Expr::sum(a.iter().enumerate().map(|(k, &ak)| Expr::c(ak) * Expr::abs2(k))) - Expr::c(1.0);
    let half: Vec<f64> = a.iter().flat_map(|&ak| [ak.powf(-0.5) + 0.25; 2]).collect();
    let bbox = BBox::new(half.iter().map(|h| -h).collect(), half).unwrap();
    let (amin, amax) = minmax(a);
    // smallest radius of curvature: (shortest semi-axis)² / longest semi-axis
    let scale = (amin.sqrt() / amax).min(1.0);
    build(
        "complex-ellipsoid",
        params_of(&[("a", a.to_vec().into())]),
        n,
        expr,
        bbox,
        None,
        scale,
    )
}

pub fn real_ellipsoid(a: &[f64], b: &[f64]) -> DomainSpec {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let expr = Expr::sum(
        (0..n).map(|k| Expr::c(a[k]) * Expr::re(k).powi(2) + Expr::c(b[k]) * Expr::im(k).powi(2)),
    ) - Expr::c(1.0);
    let coeffs: Vec<f64> = (0..n).flat_map(|k| [a[k], b[k]]).collect();
    let half: Vec<f64> = coeffs.iter().map(|c| c.powf(-0.5) + 0.25).collect();
    let bbox = BBox::new(half.iter().map(|h| -h).collect(), half).unwrap();
    let (cmin, cmax) = minmax(&coeffs);
    let scale = (cmin.sqrt() / cmax).min(1.0);
    build(
        "real-ellipsoid",
        params_of(&[("a", a.to_vec().into()), ("b", b.to_vec().into())]),
        n,
        expr,
        bbox,
        None,
        scale,
    )
}

pub fn half_space(n: usize) -> DomainSpec {
    build(
        "half-space",
        params_of(&[("n", n.into())]),
        n,
        Expr::re(n - 1),
        BBox::cube(n, 1.0),
        Some(BBox::cube(n, 0.5)),
        1.0,
    )
}

pub fn parabolic_slab() -> DomainSpec {
    build(
        "parabolic-slab",
        Map::new(),
        2,
        Expr::re(1) - Expr::im(1).powi(2),
        BBox::cube(2, 1.0),
        Some(BBox::cube(2, 0.5)),
        0.5,
    )
}

/// Half-width of the sampling patch of the model domain around the origin.
pub const MODEL_PATCH: f64 = 1e-4;

pub fn model(beta: f64) -> DomainSpec {
    assert!(beta > 0.0, "model needs beta > 0");
    let expr = Expr::re(1) + Expr::abs2(0) - Expr::c(beta) * Expr::im(1).powi(2);
    // principal curvatures at the origin are 2, 2 and -2β
    let scale = (1.0 / (2.0 * beta.max(1.0))).min(0.5);
    // the model describes the boundary near 0 only; sampling stays in a small patch
    build(
        "model",
        params_of(&[("beta", beta.into())]),
        2,
        expr,
        BBox::cube(2, 1.0),
        Some(BBox::cube(2, MODEL_PATCH)),
        scale,
    )
}

pub fn non_pseudoconvex_graph() -> DomainSpec {
    build(
        "non-pseudoconvex-graph",
        Map::new(),
        2,
        Expr::re(1) - Expr::abs2(0),
        BBox::cube(2, 1.0),
        Some(BBox::cube(2, 0.5)),
        0.5,
    )
}

/// Preimage of the unit ball under (z₁, z₂) ↦ (z₁, z₂ − c z₁²).
pub fn ball_image(c: f64) -> DomainSpec {
    // Re, Im of z2 - c z1^2 with z1^2 = (x1² − x2²) + 2i x1 x2
    let re = Expr::re(1) - Expr::c(c) * (Expr::re(0).powi(2) - Expr::im(0).powi(2));
    let im = Expr::im(1) - Expr::c(2.0 * c) * Expr::re(0) * Expr::im(0);
    let expr = Expr::abs2(0) + re.powi(2) + im.powi(2) - Expr::c(1.0);
    let h2 = 1.0 + c.abs() + 0.25;
    let bbox = BBox::new(vec![-1.25, -1.25, -h2, -h2], vec![1.25, 1.25, h2, h2]).unwrap();
    let f = DefiningFunction::new("ball-image", 2, expr.clone(), bbox.clone()).unwrap();
    let scale = curvature_scale(&f, &radial_boundary_points(&f, 2048));
    build("ball-image", params_of(&[("c", c.into())]), 2, expr, bbox, None, scale)
}

/// Boundary points along deterministic rays from the origin (star-shaped domains).
fn radial_boundary_points(f: &DefiningFunction, count: usize) -> Vec<Vec<f64>> {
    use rand::SeedableRng;
    use crate::sampling::unit_vector;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let m = 2 * f.n;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let d = unit_vector(&mut rng, m);
        let at = |t: f64| -> Vec<f64> { d.iter().map(|x| x * t).collect() };
        let mut t = 0.0;
        let step = 0.02;
        while f.value(&at(t + step)).map(|v| v < 0.0).unwrap_or(false) {
            t += step;
        }
        let (mut lo, mut hi) = (t, t + step);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            match f.value(&at(mid)) {
                Ok(v) if v < 0.0 => lo = mid,
                _ => hi = mid,
            }
        }
        out.push(at(0.5 * (lo + hi)));
    }
    out
}

fn minmax(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

fn get_f64(params: &Map<String, Value>, key: &str, default: f64) -> Result<f64> {
    match params.get(key) {
        None => Ok(default),
        Some(v) => v
            .as_f64()
            .ok_or_else(|| Error::spec(format!("params.{key}"), "expected a number")),
    }
}

fn get_list(params: &Map<String, Value>, key: &str, default: &[f64]) -> Result<Vec<f64>> {
    match params.get(key) {
        None => Ok(default.to_vec()),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| {
                v.as_f64()
                    .filter(|x| *x > 0.0)
                    .ok_or_else(|| Error::spec(format!("params.{key}"), "expected positive numbers"))
            })
            .collect(),
        Some(_) => Err(Error::spec(format!("params.{key}"), "expected a list of numbers")),
    }
}

fn get_n(params: &Map<String, Value>, n: Option<usize>) -> Result<usize> {
    let from_params = match params.get("n") {
        None => None,
        Some(v) => Some(
            v.as_u64()
                .filter(|k| *k >= 1)
                .ok_or_else(|| Error::spec("params.n", "expected a positive integer"))? as usize,
        ),
    };
    match (n, from_params) {
        (Some(a), Some(b)) if a != b => Err(Error::spec("n", "conflicts with params.n")),
        (a, b) => Ok(a.or(b).unwrap_or(2)),
    }
}

/// Resolve a catalog id with optional dimension and parameters.
pub fn lookup(id: &str, n: Option<usize>, params: &Map<String, Value>) -> Result<DomainSpec> {
    let known: Vec<&str> = match id {
        "ball" | "half-space" => vec!["n"],
        "complex-ellipsoid" => vec!["a"],
        "real-ellipsoid" => vec!["a", "b"],
        "model" => vec!["beta"],
        "ball-image" => vec!["c"],
        "parabolic-slab" | "non-pseudoconvex-graph" => vec![],
        _ => {
            return Err(Error::spec(
                "catalog",
                format!("unknown domain `{id}`; see `catalog` for the list"),
            ))
        }
    };
    if let Some(k) = params.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(Error::spec(format!("params.{k}"), format!("not a parameter of `{id}`")));
    }
    let fixed_two = |n: Option<usize>| -> Result<()> {
        match n {
            Some(k) if k != 2 => Err(Error::spec("n", format!("`{id}` is defined for n = 2 only"))),
            _ => Ok(()),
        }
    };
    let check_len = |len: usize| -> Result<()> {
        match n {
            Some(k) if k != len => Err(Error::spec("n", "does not match the parameter list length")),
            _ if len == 0 => Err(Error::spec("params", "parameter lists must be non-empty")),
            _ => Ok(()),
        }
    };
    match id {
        "ball" => Ok(ball(get_n(params, n)?)),
        "half-space" => Ok(half_space(get_n(params, n)?)),
        "complex-ellipsoid" => {
            let a = get_list(params, "a", &[2.0, 1.0])?;
            check_len(a.len())?;
            Ok(complex_ellipsoid(&a))
        }
        "real-ellipsoid" => {
            let a = get_list(params, "a", &[1.0, 2.0])?;
            let b = get_list(params, "b", &[1.5, 1.25])?;
            if a.len() != b.len() {
                return Err(Error::spec("params.b", "must have the same length as params.a"));
            }
            check_len(a.len())?;
            Ok(real_ellipsoid(&a, &b))
        }
        "model" => {
            fixed_two(n)?;
            let beta = get_f64(params, "beta", 2.0)?;
            if !(beta > 0.0) {
                return Err(Error::spec("params.beta", "must be positive"));
            }
            Ok(model(beta))
        }
        "ball-image" => {
            fixed_two(n)?;
            let c = get_f64(params, "c", 0.6)?;
            if !(c.abs() <= 2.0) {
                return Err(Error::spec("params.c", "expected |c| <= 2"));
            }
            Ok(ball_image(c))
        }
        "parabolic-slab" => {
            fixed_two(n)?;
            Ok(parabolic_slab())
        }
        _ => {
            fixed_two(n)?;
            Ok(non_pseudoconvex_graph())
        }
    }
}

/// Every catalog entry with default parameters.
pub fn all() -> Vec<DomainSpec> {
    IDS.iter()
        .map(|(id, _)| lookup(id, None, &Map::new()).expect("defaults resolve"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_entries_build() {
        let specs = all();
        assert_eq!(specs.len(), IDS.len());
        for s in &specs {
            assert!(s.scale > 0.0 && s.scale <= 1.0, "{} scale {}", s.name, s.scale);
            assert!((s.shell_width - 0.1 * s.scale).abs() < 1e-15);
        }
    }

    #[test]
    fn ball_image_scale_reflects_curvature() {
        let s = ball_image(0.6);
        // maximal principal curvature is about 5.26
        assert!(s.scale > 0.17 && s.scale < 0.2, "scale {}", s.scale);
    }

    #[test]
    fn unknown_id_and_params() {
        assert!(matches!(lookup("torus", None, &Map::new()), Err(Error::Spec { .. })));
        let mut p = Map::new();
        p.insert("gamma".into(), 1.0.into());
        assert!(matches!(lookup("model", None, &p), Err(Error::Spec { .. })));
        assert!(matches!(lookup("model", Some(3), &Map::new()), Err(Error::Spec { .. })));
    }

    #[test]
    fn ball_in_three_dimensions() {
        let s = lookup("ball", Some(3), &Map::new()).unwrap();
        assert_eq!(s.n(), 3);
        assert_eq!(s.f.value(&[0.0; 6]).unwrap(), -1.0);
    }
}
