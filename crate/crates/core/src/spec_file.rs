//! Domain spec files (JSON, schema version 1).
//!
//! ```json
//! {
//!   "version": 1,
//!   "name": "model-b2",
//!   "n": 2,
//!   "graph": "abs2(z1) - 2*im(z2)^2",
//!   "bbox": [[-1, 1], [-1, 1], [-1, 1], [-1, 1]],
//!   "sample_box": [[-1e-4, 1e-4], [-1e-4, 1e-4], [-1e-4, 1e-4], [-1e-4, 1e-4]],
//!   "shell_width": 0.025
//! }
//! ```
//!
//! Exactly one of `catalog` (with optional `params`), `expression` (r itself)
//! or `graph` (h in r = Re z_n + h) must be present. Boxes are lists of 2n
//! `[lo, hi]` pairs or `{"lo": [...], "hi": [...]}`.

use std::path::Path;

use serde::Deserialize;
use serde_json::{Map, Value};

use crate::catalog;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{BBox, DefiningFunction, DomainSource, DomainSpec};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    version: Option<u32>,
    name: Option<String>,
    n: Option<usize>,
    catalog: Option<String>,
    expression: Option<String>,
    graph: Option<String>,
    params: Option<Map<String, Value>>,
    bbox: Option<RawBox>,
    sample_box: Option<RawBox>,
    shell_width: Option<f64>,
    scale: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawBox {
    Pairs(Vec<[f64; 2]>),
    LoHi { lo: Vec<f64>, hi: Vec<f64> },
}

fn to_box(raw: RawBox, field: &str, n: usize) -> Result<BBox> {
    let (lo, hi) = match raw {
        RawBox::Pairs(p) => p.into_iter().map(|[a, b]| (a, b)).unzip(),
        RawBox::LoHi { lo, hi } => (lo, hi),
    };
    if lo.len() != 2 * n || hi.len() != 2 * n {
        return Err(Error::spec(field, format!("expected {} coordinate ranges for n = {n}", 2 * n)));
    }
    BBox::new(lo, hi).map_err(|e| Error::spec(field, e.to_string()))
}

fn json_error(e: serde_json::Error) -> Error {
    let at = format!("line {}, column {}", e.line(), e.column());
    if e.is_data() {
        let msg = e.to_string();
        let field = msg
            .split('`')
            .nth(1)
            .filter(|_| msg.starts_with("unknown field") || msg.starts_with("missing field"))
            .unwrap_or("spec")
            .to_string();
        Error::spec(field, format!("{msg} ({at})"))
    } else {
        Error::spec("json", format!("{e} ({at})"))
    }
}

/// Parse and validate a spec from JSON text.
pub fn parse_domain_spec_str(text: &str) -> Result<DomainSpec> {
    let raw: RawSpec = serde_json::from_str(text).map_err(json_error)?;
    if let Some(v) = raw.version {
        if v != SCHEMA_VERSION {
            return Err(Error::spec("version", format!("unsupported schema version {v}, expected {SCHEMA_VERSION}")));
        }
    }
    let sources = [raw.catalog.is_some(), raw.expression.is_some(), raw.graph.is_some()];
    if sources.iter().filter(|&&b| b).count() != 1 {
        return Err(Error::spec("catalog", "exactly one of `catalog`, `expression`, `graph` is required"));
    }
    if raw.params.is_some() && raw.catalog.is_none() {
        return Err(Error::spec("params", "only catalog entries take params"));
    }
    if let Some(w) = raw.shell_width {
        if !(w > 0.0) {
            return Err(Error::spec("shell_width", "must be positive"));
        }
    }
    if let Some(s) = raw.scale {
        if !(s > 0.0) {
            return Err(Error::spec("scale", "must be positive"));
        }
    }

    if let Some(id) = &raw.catalog {
        let mut spec = catalog::lookup(id, raw.n, &raw.params.clone().unwrap_or_default())?;
        let n = spec.n();
        if let Some(name) = raw.name {
            spec.name = name;
        }
        if let Some(b) = raw.bbox {
            let bbox = to_box(b, "bbox", n)?;
            let mut f = spec.f.clone();
            f.bbox = bbox;
            let sb = match raw.sample_box {
                Some(s) => Some(to_box(s, "sample_box", n)?),
                None if spec.sample_box != spec.bbox => Some(spec.sample_box.clone()),
                None => None,
            };
            return DomainSpec::new(
                spec.name.clone(),
                spec.source.clone(),
                f,
                sb,
                Some(raw.scale.unwrap_or(spec.scale)),
                raw.shell_width,
            );
        }
        if let Some(s) = raw.sample_box {
            spec = spec.with_sample_box(to_box(s, "sample_box", n)?)?;
        }
        if let Some(s) = raw.scale {
            spec.scale = s;
            spec.shell_width = crate::config::DEFAULT_SHELL_FRACTION * s;
        }
        if let Some(w) = raw.shell_width {
            spec = spec.with_shell_width(w);
        }
        return Ok(spec);
    }

    let n = raw.n.ok_or_else(|| Error::spec("n", "required for expression and graph specs"))?;
    if n == 0 {
        return Err(Error::spec("n", "must be at least 1"));
    }
    let bbox = to_box(raw.bbox.ok_or_else(|| Error::spec("bbox", "required for expression and graph specs"))?, "bbox", n)?;
    let sample_box = match raw.sample_box {
        Some(s) => Some(to_box(s, "sample_box", n)?),
        None => None,
    };
    let parse = |field: &str, src: &str| -> Result<Expr> {
        Expr::parse(src, n).map_err(|e| Error::spec(field, e.to_string()))
    };
    let (expr, source) = if let Some(text) = &raw.expression {
        (parse("expression", text)?, DomainSource::Expression { text: text.clone() })
    } else {
        let h = raw.graph.as_deref().expect("one source");
        (Expr::re(n - 1) + parse("graph", h)?, DomainSource::Graph { h: h.to_string() })
    };
    let name = raw.name.unwrap_or_else(|| "custom".to_string());
    let f = DefiningFunction::new(name.clone(), n, expr, bbox).map_err(|e| Error::spec("expression", e.to_string()))?;
    DomainSpec::new(name, source, f, sample_box, raw.scale, raw.shell_width)
}

/// Read, parse and validate a spec file.
pub fn parse_domain_spec(path: &Path) -> Result<DomainSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_domain_spec_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_round_trip() {
        let s = parse_domain_spec_str(r#"{"version": 1, "catalog": "ball", "n": 2}"#).unwrap();
        assert_eq!(s, catalog::ball(2));
    }

    #[test]
    fn expression_ball_matches_catalog_values() {
        let s = parse_domain_spec_str(
            r#"{"version": 1, "name": "b", "n": 2, "expression": "abs2(z1) + abs2(z2) - 1",
                "bbox": {"lo": [-1.25, -1.25, -1.25, -1.25], "hi": [1.25, 1.25, 1.25, 1.25]}}"#,
        )
        .unwrap();
        let c = catalog::ball(2);
        let z = [0.3, -0.2, 0.5, 0.1];
        assert_eq!(s.f.eval_derivatives(&z).unwrap(), c.f.eval_derivatives(&z).unwrap());
        assert_eq!(s.bbox, c.bbox);
    }

    #[test]
    fn graph_spec_is_model() {
        let s = parse_domain_spec_str(
            r#"{"version": 1, "n": 2, "graph": "abs2(z1) - 2*im(z2)^2",
                "bbox": [[-1, 1], [-1, 1], [-1, 1], [-1, 1]]}"#,
        )
        .unwrap();
        let m = catalog::model(2.0);
        let z = [0.3, -0.2, 0.5, 0.1];
        assert_eq!(s.f.value(&z).unwrap(), m.f.value(&z).unwrap());
    }

    #[test]
    fn diagnostics() {
        let bad = |t: &str| parse_domain_spec_str(t).unwrap_err();
        assert!(matches!(bad(r#"{"catalog": "ball", "colour": 1}"#), Error::Spec { field, .. } if field == "colour"));
        assert!(matches!(bad("{\n  \"catalog\": \"ball\",\n"), Error::Spec { field, message } if field == "json" && message.contains("line")));
        assert!(matches!(bad(r#"{"n": 2}"#), Error::Spec { field, .. } if field == "catalog"));
        assert!(matches!(bad(r#"{"version": 2, "catalog": "ball"}"#), Error::Spec { field, .. } if field == "version"));
        assert!(matches!(bad(r#"{"n": 2, "expression": "abs2(z1) +"}"#), Error::Spec { field, .. } if field == "bbox"));
        assert!(matches!(
            bad(r#"{"n": 1, "expression": "abs2(z1) + ", "bbox": [[-2, 2], [-2, 2]]}"#),
            Error::Spec { field, .. } if field == "expression"
        ));
        assert!(matches!(bad(r#"{"n": 1, "expression": "abs2(z1) - 1", "bbox": [[-2, 2]]}"#), Error::Spec { field, .. } if field == "bbox"));
    }

    #[test]
    fn bbox_without_zero_set() {
        let e = parse_domain_spec_str(
            r#"{"n": 2, "expression": "abs2(z1) + abs2(z2) - 1", "bbox": [[-0.3, 0.3], [-0.3, 0.3], [-0.3, 0.3], [-0.3, 0.3]]}"#,
        )
        .unwrap_err();
        assert!(matches!(e, Error::Construction(_)));
    }
}
