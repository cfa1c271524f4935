//! JSON documents for specs, maps, bundles and point lists.
//!
//! Exact objects never contain floats: rationals are `"p/q"` strings and
//! exponent vectors are integer arrays. Every top-level document carries
//! `"format": 1`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, AutoKind, MultiPoly, PolyMap, TriangularAuto, Q};
use crate::construct::{ConstructionBundle, ConstructionError, Family, ZSpec};
use crate::text::{parse_poly, parse_rational, ParseError};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("bad rational literal `{0}`")]
    Rational(String),
    #[error("polynomial: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error("invalid document: {0}")]
    Invalid(String),
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<u32>,
    coef: String,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    num_vars: usize,
    terms: Vec<TermJson>,
}

/// W-polynomials in a spec may be written as text for convenience.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PolyInput {
    Text(String),
    Exact(PolyJson),
}

#[derive(Serialize, Deserialize)]
struct MapJson {
    num_vars: usize,
    components: Vec<PolyJson>,
}

#[derive(Serialize, Deserialize)]
struct AutoJson {
    kind: String,
    forward: MapJson,
    inverse: MapJson,
}

#[derive(Serialize, Deserialize)]
struct SpecBody {
    n: usize,
    points: Vec<Vec<String>>,
    w_polys: Vec<PolyInput>,
}

#[derive(Serialize, Deserialize)]
struct SpecDoc {
    format: u32,
    #[serde(flatten)]
    body: SpecBody,
}

#[derive(Serialize, Deserialize)]
struct BundleDoc {
    format: u32,
    family: String,
    n: usize,
    core_map: MapJson,
    post_autos: Vec<AutoJson>,
    full_map: MapJson,
    betas: Vec<String>,
    r_poly: PolyJson,
    z_normalized: SpecBody,
    z_source: SpecBody,
    degree: u32,
    degree_bound: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    collinear: Option<bool>,
    #[serde(default)]
    notes: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct PointsDoc {
    format: u32,
    points: Vec<Vec<String>>,
}

fn check_version(v: u32) -> Result<(), IoError> {
    if v != FORMAT_VERSION {
        return Err(IoError::Version(v));
    }
    Ok(())
}

fn rational(text: &str) -> Result<Q, IoError> {
    parse_rational(text).ok_or_else(|| IoError::Rational(text.to_string()))
}

fn point_out(p: &[Q]) -> Vec<String> {
    p.iter().map(Q::to_string).collect()
}

fn point_in(p: &[String]) -> Result<Vec<Q>, IoError> {
    p.iter().map(|s| rational(s)).collect()
}

fn poly_out(p: &MultiPoly) -> PolyJson {
    PolyJson {
        num_vars: p.num_vars(),
        terms: p
            .terms()
            .map(|(m, c)| TermJson {
                exp: m.exponents().to_vec(),
                coef: c.to_string(),
            })
            .collect(),
    }
}

fn poly_in(p: &PolyJson) -> Result<MultiPoly, IoError> {
    let terms = p
        .terms
        .iter()
        .map(|t| Ok((t.exp.clone(), rational(&t.coef)?)))
        .collect::<Result<Vec<_>, IoError>>()?;
    Ok(MultiPoly::from_terms(p.num_vars, terms)?)
}

fn map_out(m: &PolyMap) -> MapJson {
    MapJson {
        num_vars: m.num_vars(),
        components: m.components().iter().map(poly_out).collect(),
    }
}

fn map_in(m: &MapJson) -> Result<PolyMap, IoError> {
    let comps = m.components.iter().map(poly_in).collect::<Result<Vec<_>, _>>()?;
    let map = PolyMap::new(comps)?;
    if map.num_vars() != m.num_vars {
        return Err(IoError::Invalid(format!(
            "map declares {} variables but has {} components",
            m.num_vars,
            map.num_vars()
        )));
    }
    Ok(map)
}

fn auto_out(a: &TriangularAuto) -> AutoJson {
    AutoJson {
        kind: a.kind().to_string(),
        forward: map_out(a.forward()),
        inverse: map_out(a.inverse()),
    }
}

fn auto_in(a: &AutoJson) -> Result<TriangularAuto, IoError> {
    let kind: AutoKind = a.kind.parse()?;
    Ok(TriangularAuto::from_parts(kind, map_in(&a.forward)?, map_in(&a.inverse)?)?)
}

fn spec_out(s: &ZSpec) -> SpecBody {
    SpecBody {
        n: s.n(),
        points: s.points().iter().map(|p| point_out(p)).collect(),
        w_polys: s.w_polys().iter().map(|q| PolyInput::Exact(poly_out(q))).collect(),
    }
}

fn spec_in(s: &SpecBody) -> Result<ZSpec, IoError> {
    let points = s.points.iter().map(|p| point_in(p)).collect::<Result<Vec<_>, _>>()?;
    let w_polys = s
        .w_polys
        .iter()
        .map(|q| match q {
            PolyInput::Text(t) => Ok(parse_poly(t, s.n)?),
            PolyInput::Exact(p) => poly_in(p),
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    Ok(ZSpec::new(s.n, points, w_polys)?)
}

pub fn spec_to_json(spec: &ZSpec) -> String {
    let doc = SpecDoc {
        format: FORMAT_VERSION,
        body: spec_out(spec),
    };
    serde_json::to_string_pretty(&doc).expect("spec serializes")
}

/// Reads a spec; W-polynomials may be strings in the text grammar.
pub fn spec_from_json(text: &str) -> Result<ZSpec, IoError> {
    let doc: SpecDoc = serde_json::from_str(text)?;
    check_version(doc.format)?;
    spec_in(&doc.body)
}

/// Number of duplicate points in a spec document (before deduplication).
pub fn spec_duplicate_count(text: &str) -> Result<usize, IoError> {
    let doc: SpecDoc = serde_json::from_str(text)?;
    let points = doc.body.points.iter().map(|p| point_in(p)).collect::<Result<Vec<_>, _>>()?;
    Ok(ZSpec::count_duplicates(&points))
}

pub fn map_to_json(map: &PolyMap) -> String {
    serde_json::to_string_pretty(&map_out(map)).expect("map serializes")
}

pub fn map_from_json(text: &str) -> Result<PolyMap, IoError> {
    map_in(&serde_json::from_str(text)?)
}

pub fn bundle_to_json(b: &ConstructionBundle) -> String {
    let doc = BundleDoc {
        format: FORMAT_VERSION,
        family: b.family.to_string(),
        n: b.n(),
        core_map: map_out(&b.core_map),
        post_autos: b.post_autos.iter().map(auto_out).collect(),
        full_map: map_out(&b.full_map),
        betas: point_out(&b.betas),
        r_poly: poly_out(&b.r_poly),
        z_normalized: spec_out(&b.z_normalized),
        z_source: spec_out(&b.z_source),
        degree: b.degree,
        degree_bound: b.degree_bound,
        collinear: b.collinear,
        notes: b.notes.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("bundle serializes")
}

/// Reads a bundle and checks that the stored map equals the composition of
/// its stored factors.
pub fn bundle_from_json(text: &str) -> Result<ConstructionBundle, IoError> {
    let doc: BundleDoc = serde_json::from_str(text)?;
    check_version(doc.format)?;
    let family: Family = doc.family.parse().map_err(IoError::Invalid)?;
    let bundle = ConstructionBundle {
        family,
        core_map: map_in(&doc.core_map)?,
        post_autos: doc.post_autos.iter().map(auto_in).collect::<Result<Vec<_>, _>>()?,
        full_map: map_in(&doc.full_map)?,
        betas: point_in(&doc.betas)?,
        r_poly: poly_in(&doc.r_poly)?,
        z_normalized: spec_in(&doc.z_normalized)?,
        z_source: spec_in(&doc.z_source)?,
        degree: doc.degree,
        degree_bound: doc.degree_bound,
        collinear: doc.collinear,
        notes: doc.notes,
    };
    if bundle.n() != doc.n {
        return Err(IoError::Invalid(format!("n = {} but the map has {} variables", doc.n, bundle.n())));
    }
    if bundle.recompose()? != bundle.full_map {
        return Err(IoError::Invalid("full_map is not the composition of its factors".into()));
    }
    Ok(bundle)
}

pub fn points_to_json(points: &[Vec<Q>]) -> String {
    let doc = PointsDoc {
        format: FORMAT_VERSION,
        points: points.iter().map(|p| point_out(p)).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("points serialize")
}

pub fn points_from_json(text: &str) -> Result<Vec<Vec<Q>>, IoError> {
    let doc: PointsDoc = serde_json::from_str(text)?;
    check_version(doc.format)?;
    doc.points.iter().map(|p| point_in(p)).collect()
}
