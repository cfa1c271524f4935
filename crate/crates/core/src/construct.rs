//! Builders for the explicit maps: the core map `g`, the point-complement
//! maps `sigma_{n,r}`, and the conjugated maps that avoid a user-given
//! `Z = F x W` in the user's own coordinates.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::Zero;
use thiserror::Error;

use crate::algebra::{
    invert_triangular, lagrange_interpolate, qi, AlgebraError, AutoKind, MultiPoly, PolyMap, TotalDegree,
    TriangularAuto, Q,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("point {index} has {got} coordinates, expected {expected}")]
    PointDimension { index: usize, got: usize, expected: usize },
    #[error("polynomial q{index} uses z1 or z2; W-polynomials may only use z3..zn")]
    ForbiddenVariable { index: usize },
    #[error("polynomial q{index} has {got} variables, expected {expected}")]
    PolyVars { index: usize, got: usize, expected: usize },
    #[error("n = 2 leaves no room for W-polynomials")]
    NoRoomForW,
    #[error("duplicate root {0} of r")]
    DuplicateRoot(String),
    #[error("r must be a non-constant polynomial in z1")]
    BadR,
    #[error("this construction needs at least one point in F")]
    EmptyF,
    #[error("the point-complement construction takes no W-polynomials")]
    UnexpectedW,
    #[error("invalid parameters: {0}")]
    Parameter(String),
    #[error("constructed degree {degree} exceeds bound {bound}")]
    BoundViolated { degree: u32, bound: u32 },
}

/// The avoided set `Z = F x W`.
///
/// `points` are either plane points (first two coordinates, theorem
/// pipeline) or full `n`-dimensional points (point-complement pipeline).
/// `w_polys` are polynomials in `n` variables that only involve `z3..zn`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZSpec {
    n: usize,
    points: Vec<Vec<Q>>,
    w_polys: Vec<MultiPoly>,
}

impl ZSpec {
    /// Validates and deduplicates (keeping first occurrences).
    pub fn new(n: usize, points: Vec<Vec<Q>>, w_polys: Vec<MultiPoly>) -> Result<Self, ConstructionError> {
        if n < 2 {
            return Err(ConstructionError::DimensionTooSmall(n));
        }
        if n == 2 && !w_polys.is_empty() {
            return Err(ConstructionError::NoRoomForW);
        }
        let expected = points.first().map_or(2, Vec::len);
        for (index, p) in points.iter().enumerate() {
            if p.len() != expected || (expected != 2 && expected != n) {
                return Err(ConstructionError::PointDimension {
                    index,
                    got: p.len(),
                    expected: if expected == n { n } else { 2 },
                });
            }
        }
        for (index, q) in w_polys.iter().enumerate() {
            if q.num_vars() != n {
                return Err(ConstructionError::PolyVars {
                    index: index + 1,
                    got: q.num_vars(),
                    expected: n,
                });
            }
            if !q.uses_only(|k| k >= 2) {
                return Err(ConstructionError::ForbiddenVariable { index: index + 1 });
            }
        }
        let mut unique: Vec<Vec<Q>> = Vec::with_capacity(points.len());
        for p in points {
            if !unique.contains(&p) {
                unique.push(p);
            }
        }
        Ok(ZSpec {
            n,
            points: unique,
            w_polys,
        })
    }

    /// Number of repeated points that [`ZSpec::new`] would drop.
    pub fn count_duplicates(points: &[Vec<Q>]) -> usize {
        points
            .iter()
            .enumerate()
            .filter(|(i, p)| points[..*i].contains(p))
            .count()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[Vec<Q>] {
        &self.points
    }

    pub fn w_polys(&self) -> &[MultiPoly] {
        &self.w_polys
    }

    /// Number of points `l`.
    pub fn l(&self) -> usize {
        self.points.len()
    }

    /// Number of W-polynomials `m`.
    pub fn m(&self) -> usize {
        self.w_polys.len()
    }

    /// Largest total degree among the W-polynomials (0 when there are none).
    pub fn d(&self) -> u32 {
        self.w_polys
            .iter()
            .filter_map(|q| q.total_degree().finite())
            .max()
            .unwrap_or(0)
    }

    /// Exact test of `w in F x W`, with `F` read in the plane or in full
    /// `n`-space depending on the stored point dimension.
    pub fn contains(&self, w: &[Q]) -> Result<bool, AlgebraError> {
        if w.len() != self.n {
            return Err(AlgebraError::ArityMismatch {
                expected: self.n,
                got: w.len(),
            });
        }
        let on_f = self.points.iter().any(|p| p[..] == w[..p.len()]);
        if !on_f {
            return Ok(false);
        }
        for q in &self.w_polys {
            if !q.eval(w)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    LemmaG,
    TheoremF,
    PropSigma,
    ExampleManyPoints,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::LemmaG => "lemma-g",
            Family::TheoremF => "theorem-f",
            Family::PropSigma => "prop-sigma",
            Family::ExampleManyPoints => "example-many-points",
        }
    }

    /// Families whose core map is `g` (triangular reduction with W-terms).
    pub fn uses_g(self) -> bool {
        !matches!(self, Family::PropSigma)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lemma-g" => Ok(Family::LemmaG),
            "theorem-f" => Ok(Family::TheoremF),
            "prop-sigma" => Ok(Family::PropSigma),
            "example-many-points" => Ok(Family::ExampleManyPoints),
            other => Err(format!("unknown family `{other}`")),
        }
    }
}

/// A constructed map with everything needed to solve and audit it.
///
/// `full_map = post_autos[k-1] ∘ ... ∘ post_autos[0] ∘ core_map`, where each
/// automorphism contributes its forward map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionBundle {
    pub family: Family,
    pub core_map: PolyMap,
    pub post_autos: Vec<TriangularAuto>,
    pub full_map: PolyMap,
    pub betas: Vec<Q>,
    pub r_poly: MultiPoly,
    pub z_normalized: ZSpec,
    pub z_source: ZSpec,
    pub degree: u32,
    pub degree_bound: u32,
    /// Set for the point-complement family: whether `F` lies on a line.
    pub collinear: Option<bool>,
    pub notes: Vec<String>,
}

impl ConstructionBundle {
    pub fn n(&self) -> usize {
        self.full_map.num_vars()
    }

    /// `F` is empty and the map is the identity.
    pub fn is_identity(&self) -> bool {
        self.betas.is_empty()
    }

    /// Recomposes the recorded factors.
    pub fn recompose(&self) -> Result<PolyMap, AlgebraError> {
        compose_chain(&self.core_map, &self.post_autos)
    }

    /// Evaluates `full_map` through its recorded factors. The expanded map can
    /// have high degree and heavy cancellation, so this is the numerically
    /// stable way to push complex points forward.
    pub fn eval_complex(&self, z: &[Complex64]) -> Result<Vec<Complex64>, AlgebraError> {
        let start = self.core_map.eval_complex(z)?;
        self.post_autos
            .iter()
            .try_fold(start, |acc, a| a.forward().eval_complex(&acc))
    }

    /// Pulls a target point back through the post-automorphisms, exactly.
    pub fn pull_back(&self, w: &[Q]) -> Result<Vec<Q>, AlgebraError> {
        self.post_autos
            .iter()
            .rev()
            .try_fold(w.to_vec(), |acc, a| a.inverse().eval(&acc))
    }

    pub fn pull_back_complex(&self, w: &[Complex64]) -> Result<Vec<Complex64>, AlgebraError> {
        self.post_autos
            .iter()
            .rev()
            .try_fold(w.to_vec(), |acc, a| a.inverse().eval_complex(&acc))
    }
}

fn compose_chain(core: &PolyMap, autos: &[TriangularAuto]) -> Result<PolyMap, AlgebraError> {
    autos.iter().try_fold(core.clone(), |acc, a| a.forward().compose(&acc))
}

/// `r(z1) = prod (z1 - beta_j)` in `n` variables.
pub fn build_r(betas: &[Q], n: usize) -> Result<MultiPoly, ConstructionError> {
    for (i, b) in betas.iter().enumerate() {
        if betas[..i].contains(b) {
            return Err(ConstructionError::DuplicateRoot(b.to_string()));
        }
    }
    let z1 = MultiPoly::var(n, 0);
    Ok(betas.iter().fold(MultiPoly::one(n), |acc, b| {
        &acc * &(&z1 - &MultiPoly::constant(n, b.clone()))
    }))
}

/// How far the normalizing shear may reach.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShearMode {
    /// `z1 -> z1 + c z2`.
    Plane,
    /// `z1 -> z1 + sum_{k>=2} c_k z_k`.
    Full,
}

/// Finds the smallest non-negative integer shear that gives the points
/// pairwise distinct first coordinates.
///
/// The returned automorphism lives in `n` variables. Candidates are tried in
/// order of increasing coefficient sum, then lexicographically with larger
/// `c2` first. Points keep their own dimension in the output.
pub fn normalize_first_coords(
    points: &[Vec<Q>],
    n: usize,
    mode: ShearMode,
) -> Result<(TriangularAuto, Vec<Vec<Q>>), ConstructionError> {
    let dim = points.first().map_or(n, Vec::len);
    let reach = match mode {
        ShearMode::Plane => 1,
        ShearMode::Full => dim - 1,
    };
    let apply = |c: &[u64]| -> Vec<Vec<Q>> {
        points
            .iter()
            .map(|p| {
                let mut out = p.clone();
                for (k, &ck) in c.iter().enumerate() {
                    if ck != 0 {
                        out[0] += &p[k + 1] * qi(ck as i64);
                    }
                }
                out
            })
            .collect()
    };
    let distinct = |imgs: &[Vec<Q>]| {
        imgs.iter()
            .enumerate()
            .all(|(i, a)| imgs[..i].iter().all(|b| b[0] != a[0]))
    };

    let mut sum = 0u64;
    loop {
        for c in compositions(sum, reach) {
            let imgs = apply(&c);
            if distinct(&imgs) {
                let mut first = MultiPoly::var(n, 0);
                for (k, &ck) in c.iter().enumerate() {
                    first = first + MultiPoly::var(n, k + 1).scale(&qi(ck as i64));
                }
                let mut comps = vec![first];
                comps.extend((1..n).map(|k| MultiPoly::var(n, k)));
                let auto = invert_triangular(PolyMap::new(comps)?, AutoKind::ShearNd)?;
                return Ok((auto, imgs));
            }
        }
        sum += 1;
    }
}

/// All vectors of `parts` non-negative integers summing to `total`, with
/// larger leading entries first.
fn compositions(total: u64, parts: usize) -> Vec<Vec<u64>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for head in (0..=total).rev() {
        for mut tail in compositions(total - head, parts - 1) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// The core map
/// `g = (z1 + z2 (r z2 + 1) + sum z2^{i+1} q_i, r z2 + 1, z3, ..., zn)`.
pub fn build_g(r: &MultiPoly, w_polys: &[MultiPoly], n: usize) -> Result<PolyMap, ConstructionError> {
    if n < 2 {
        return Err(ConstructionError::DimensionTooSmall(n));
    }
    if n == 2 && !w_polys.is_empty() {
        return Err(ConstructionError::NoRoomForW);
    }
    if r.num_vars() != n || !r.uses_only(|k| k == 0) || r.total_degree().finite().unwrap_or(0) == 0 {
        return Err(ConstructionError::BadR);
    }
    for (index, q) in w_polys.iter().enumerate() {
        if q.num_vars() != n {
            return Err(ConstructionError::PolyVars {
                index: index + 1,
                got: q.num_vars(),
                expected: n,
            });
        }
        if !q.uses_only(|k| k >= 2) {
            return Err(ConstructionError::ForbiddenVariable { index: index + 1 });
        }
    }
    let z1 = MultiPoly::var(n, 0);
    let z2 = MultiPoly::var(n, 1);
    let one = MultiPoly::one(n);
    let second = &(r * &z2) + &one;
    let mut first = &z1 + &(&z2 * &second);
    for (i, q) in w_polys.iter().enumerate() {
        first = first + z2.pow(i as u32 + 2) * q.clone();
    }
    let mut comps = vec![first, second];
    comps.extend((2..n).map(|k| MultiPoly::var(n, k)));
    Ok(PolyMap::new(comps)?)
}

/// `sigma_{n,r}`; for `n = 2` this coincides with `g` without W-terms.
pub fn build_sigma_map(r: &MultiPoly, n: usize) -> Result<PolyMap, ConstructionError> {
    let g = build_g(r, &[], n)?;
    if n == 2 {
        return Ok(g);
    }
    let z = |k: usize| MultiPoly::var(n, k);
    let mut comps = vec![g.component(0).clone(), g.component(1) + &z(2)];
    for k in 2..n - 1 {
        comps.push(z(k).pow(2) + z(k + 1));
    }
    comps.push(z(n - 1).pow(2));
    Ok(PolyMap::new(comps)?)
}

fn theorem_bound(l: usize, m: usize, d: u32) -> u32 {
    let l = l as u32;
    let g_bound = if m == 0 { l + 2 } else { (l + 2).max(m as u32 + d + 1) };
    1.max(l.saturating_sub(1)) * g_bound
}

fn lemma_bound(l: usize, m: usize, d: u32) -> u32 {
    let l = l as u32;
    if m == 0 {
        l + 2
    } else {
        (l + 2).max(m as u32 + d + 1)
    }
}

fn finite_degree(map: &PolyMap) -> u32 {
    map.degree().finite().unwrap_or(0)
}

fn check_bound(degree: u32, bound: u32) -> Result<(), ConstructionError> {
    if degree > bound {
        return Err(ConstructionError::BoundViolated { degree, bound });
    }
    Ok(())
}

/// Shift `(z1, z2 + L2(z1), ..., zn + Ln(z1))` with `L_i(betas[j]) = targets[j][i]`
/// for the listed coordinates `i`; other coordinates are left alone.
fn interpolation_shift(
    betas: &[Q],
    targets: &[Vec<Q>],
    coords: std::ops::Range<usize>,
    n: usize,
) -> Result<TriangularAuto, ConstructionError> {
    let mut comps = vec![MultiPoly::var(n, 0)];
    for k in 1..n {
        let zk = MultiPoly::var(n, k);
        if coords.contains(&k) {
            let nodes: Vec<(Q, Q)> = betas
                .iter()
                .zip(targets)
                .map(|(b, p)| (b.clone(), p[k].clone()))
                .collect();
            let l = lagrange_interpolate(&nodes)?.relabel(n, &[0]);
            comps.push(zk + l);
        } else {
            comps.push(zk);
        }
    }
    Ok(invert_triangular(PolyMap::new(comps)?, AutoKind::LagrangeShift)?)
}

fn identity_bundle(spec: &ZSpec, family: Family) -> ConstructionBundle {
    let n = spec.n();
    ConstructionBundle {
        family,
        core_map: PolyMap::identity(n),
        post_autos: Vec::new(),
        full_map: PolyMap::identity(n),
        betas: Vec::new(),
        r_poly: MultiPoly::one(n),
        z_normalized: spec.clone(),
        z_source: spec.clone(),
        degree: 1,
        degree_bound: 1,
        collinear: None,
        notes: vec!["F is empty: the identity map already has the required image".to_string()],
    }
}

/// The bare map `g` with prescribed roots of `r`; its avoided set is
/// `{beta_j} x {0} x W`.
pub fn build_lemma_bundle(betas: &[Q], w_polys: Vec<MultiPoly>, n: usize) -> Result<ConstructionBundle, ConstructionError> {
    if betas.is_empty() {
        return Err(ConstructionError::BadR);
    }
    let r = build_r(betas, n)?;
    let points: Vec<Vec<Q>> = betas.iter().map(|b| vec![b.clone(), Q::zero()]).collect();
    let spec = ZSpec::new(n, points, w_polys)?;
    let g = build_g(&r, spec.w_polys(), n)?;
    let degree = finite_degree(&g);
    let degree_bound = lemma_bound(spec.l(), spec.m(), spec.d());
    check_bound(degree, degree_bound)?;
    Ok(ConstructionBundle {
        family: Family::LemmaG,
        core_map: g.clone(),
        post_autos: Vec::new(),
        full_map: g,
        betas: betas.to_vec(),
        r_poly: r,
        z_normalized: spec.clone(),
        z_source: spec,
        degree,
        degree_bound,
        collinear: None,
        notes: Vec::new(),
    })
}

/// Map with image `A^n \ (F x W)` for plane points `F`.
///
/// Pipeline: shear `t` so first coordinates separate, `r` from those first
/// coordinates, `g`, shift `h` matching second coordinates, and finally
/// `T^{-1}` to return to the caller's coordinates.
pub fn build_theorem_map(spec: &ZSpec) -> Result<ConstructionBundle, ConstructionError> {
    let n = spec.n();
    if spec.points().first().is_some_and(|p| p.len() != 2) && n != 2 {
        return Err(ConstructionError::PointDimension {
            index: 0,
            got: spec.points()[0].len(),
            expected: 2,
        });
    }
    if spec.l() == 0 {
        return Ok(identity_bundle(spec, Family::TheoremF));
    }

    let (t, normalized) = normalize_first_coords(spec.points(), n, ShearMode::Plane)?;
    let betas: Vec<Q> = normalized.iter().map(|p| p[0].clone()).collect();
    let r = build_r(&betas, n)?;
    let g = build_g(&r, spec.w_polys(), n)?;
    let h = interpolation_shift(&betas, &normalized, 1..2, n)?;
    let post_autos = vec![h, t.inverted()];
    let full_map = compose_chain(&g, &post_autos)?;

    let degree = finite_degree(&full_map);
    let degree_bound = theorem_bound(spec.l(), spec.m(), spec.d());
    check_bound(degree, degree_bound)?;

    let mut notes = Vec::new();
    if !t.forward().is_identity() {
        notes.push("normalizing shear applied to separate first coordinates".to_string());
    }
    Ok(ConstructionBundle {
        family: Family::TheoremF,
        core_map: g,
        post_autos,
        full_map,
        betas,
        r_poly: r,
        z_normalized: ZSpec::new(n, normalized, spec.w_polys().to_vec())?,
        z_source: spec.clone(),
        degree,
        degree_bound,
        collinear: None,
        notes,
    })
}

/// Whether all points lie on one affine line (exact rank test).
pub fn collinear(points: &[Vec<Q>]) -> bool {
    let Some(base) = points.first() else {
        return true;
    };
    let diffs: Vec<Vec<Q>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let Some(dir) = diffs.iter().find(|v| v.iter().any(|x| !x.is_zero())) else {
        return true;
    };
    diffs.iter().all(|u| {
        (0..u.len()).all(|a| (a + 1..u.len()).all(|b| &u[a] * &dir[b] == &u[b] * &dir[a]))
    })
}

/// Map with image `A^n \ F` for a finite `F` in `n`-space.
pub fn build_sigma(spec: &ZSpec) -> Result<ConstructionBundle, ConstructionError> {
    let n = spec.n();
    if spec.m() > 0 {
        return Err(ConstructionError::UnexpectedW);
    }
    if spec.l() == 0 {
        return Err(ConstructionError::EmptyF);
    }
    if let Some((index, p)) = spec.points().iter().enumerate().find(|(_, p)| p.len() != n) {
        return Err(ConstructionError::PointDimension {
            index,
            got: p.len(),
            expected: n,
        });
    }

    let (t, normalized) = normalize_first_coords(spec.points(), n, ShearMode::Full)?;
    let betas: Vec<Q> = normalized.iter().map(|p| p[0].clone()).collect();
    let r = build_r(&betas, n)?;
    let sigma = build_sigma_map(&r, n)?;
    let h = interpolation_shift(&betas, &normalized, 1..n, n)?;
    let post_autos = vec![h, t.inverted()];
    let full_map = compose_chain(&sigma, &post_autos)?;

    let l = spec.l() as u32;
    let is_line = collinear(&normalized);
    let degree = finite_degree(&full_map);
    let degree_bound = if is_line || l <= 2 { l + 2 } else { (l - 1) * (l + 2) };
    check_bound(degree, degree_bound)?;

    let mut notes = Vec::new();
    if is_line {
        notes.push("F is collinear: the shift is affine".to_string());
    }
    if !t.forward().is_identity() {
        notes.push("normalizing shear applied to separate first coordinates".to_string());
    }
    Ok(ConstructionBundle {
        family: Family::PropSigma,
        core_map: sigma,
        post_autos,
        full_map,
        betas,
        r_poly: r,
        z_normalized: ZSpec::new(n, normalized, Vec::new())?,
        z_source: spec.clone(),
        degree,
        degree_bound,
        collinear: Some(is_line),
        notes,
    })
}

/// `(d-2) * (d-2)! / (d-n)!`.
pub fn many_points_count(n: usize, d: usize) -> BigUint {
    let mut count = BigUint::from(d - 2);
    for k in (d - n + 1)..=(d - 2) {
        count *= BigUint::from(k);
    }
    count
}

/// The map whose complement is the grid
/// `{1..d-2} x {0} x {1..d-2} x {1..d-3} x ... x {1..d-n+1}`,
/// returned with that grid enumerated.
pub fn build_many_points_example(n: usize, d: usize) -> Result<(ConstructionBundle, Vec<Vec<Q>>), ConstructionError> {
    if n <= 2 || d < n {
        return Err(ConstructionError::Parameter(format!("need d >= n > 2, got n = {n}, d = {d}")));
    }
    let points: Vec<Vec<Q>> = (1..=d - 2).map(|j| vec![qi(j as i64), Q::zero()]).collect();
    let w_polys: Vec<MultiPoly> = (1..=n - 2)
        .map(|i| {
            let z = MultiPoly::var(n, i + 1);
            (1..=d - i - 1).fold(MultiPoly::one(n), |acc, j| {
                &acc * &(&z - &MultiPoly::constant(n, qi(j as i64)))
            })
        })
        .collect();
    let spec = ZSpec::new(n, points, w_polys)?;
    let mut bundle = build_theorem_map(&spec)?;
    bundle.family = Family::ExampleManyPoints;
    bundle.degree_bound = d as u32;
    if bundle.degree != d as u32 {
        return Err(ConstructionError::BoundViolated {
            degree: bundle.degree,
            bound: d as u32,
        });
    }

    // odometer over the factor ranges
    let mut ranges: Vec<Vec<i64>> = vec![(1..=d as i64 - 2).collect(), vec![0]];
    for i in 1..=n - 2 {
        ranges.push((1..=(d - i - 1) as i64).collect());
    }
    let mut complement = Vec::new();
    let mut idx = vec![0usize; n];
    'outer: loop {
        complement.push(idx.iter().zip(&ranges).map(|(&i, r)| qi(r[i])).collect::<Vec<Q>>());
        for k in (0..n).rev() {
            idx[k] += 1;
            if idx[k] < ranges[k].len() {
                continue 'outer;
            }
            idx[k] = 0;
        }
        break;
    }
    let expected = many_points_count(n, d);
    if BigUint::from(complement.len()) != expected {
        return Err(ConstructionError::Parameter(format!(
            "enumerated {} complement points, formula gives {expected}",
            complement.len()
        )));
    }
    bundle
        .notes
        .push(format!("complement of the image has {} points", complement.len()));
    Ok((bundle, complement))
}

impl ConstructionBundle {
    /// Degree as a [`TotalDegree`], recomputed from the stored map.
    pub fn observed_degree(&self) -> TotalDegree {
        self.full_map.degree()
    }

    pub fn l(&self) -> usize {
        self.betas.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn z(n: usize, k: usize) -> MultiPoly {
        MultiPoly::var(n, k)
    }

    fn c(n: usize, v: i64) -> MultiPoly {
        MultiPoly::constant(n, qi(v))
    }

    fn pt(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| qi(x)).collect()
    }

    fn nodal(n: usize) -> MultiPoly {
        z(n, 2).pow(2) - z(n, 3).pow(3) - z(n, 3).pow(2)
    }

    /// The Example 2.2 map, typed in by hand.
    fn example_map() -> PolyMap {
        let n = 4;
        let r = z(n, 0).pow(2) - c(n, 1);
        let first = z(n, 0) + z(n, 1) * (&r * &z(n, 1) + c(n, 1)) + z(n, 1).pow(2) * nodal(n);
        PolyMap::new(vec![first, &r * &z(n, 1) + c(n, 1), z(n, 2), z(n, 3)]).unwrap()
    }

    #[test]
    fn r_from_roots() {
        assert_eq!(build_r(&[qi(0)], 1).unwrap(), z(1, 0));
        assert_eq!(build_r(&[qi(1), qi(-1)], 1).unwrap(), z(1, 0).pow(2) - c(1, 1));
        assert_eq!(
            build_r(&[qi(1), qi(2)], 1).unwrap(),
            z(1, 0).pow(2) - c(1, 3) * z(1, 0) + c(1, 2)
        );
        assert!(matches!(build_r(&[qi(1), qi(1)], 1), Err(ConstructionError::DuplicateRoot(_))));
    }

    #[test]
    fn normalizer_search() {
        let (t, imgs) = normalize_first_coords(&[pt(&[0, 0]), pt(&[1, 1])], 2, ShearMode::Plane).unwrap();
        assert!(t.forward().is_identity());
        assert_eq!(imgs, vec![pt(&[0, 0]), pt(&[1, 1])]);

        let (t, imgs) = normalize_first_coords(&[pt(&[0, 0]), pt(&[0, 1])], 2, ShearMode::Plane).unwrap();
        assert_eq!(*t.forward().component(0), z(2, 0) + z(2, 1));
        assert_eq!(imgs, vec![pt(&[0, 0]), pt(&[1, 1])]);

        let (_, imgs) =
            normalize_first_coords(&[pt(&[0, 0]), pt(&[0, 1]), pt(&[0, 2])], 2, ShearMode::Plane).unwrap();
        assert_eq!(imgs, vec![pt(&[0, 0]), pt(&[1, 1]), pt(&[2, 2])]);
    }

    #[test]
    fn full_shear_uses_later_coordinates() {
        // second coordinates agree, so z2 alone never separates them
        let pts = vec![pt(&[0, 0, 0]), pt(&[0, 0, 1])];
        let (t, imgs) = normalize_first_coords(&pts, 3, ShearMode::Full).unwrap();
        assert_eq!(*t.forward().component(0), z(3, 0) + z(3, 2));
        assert_ne!(imgs[0][0], imgs[1][0]);
    }

    #[test]
    fn g_small_case() {
        let n = 2;
        let g = build_g(&z(n, 0), &[], n).unwrap();
        let expected = PolyMap::new(vec![
            z(n, 0) + z(n, 1) * (z(n, 0) * z(n, 1) + c(n, 1)),
            z(n, 0) * z(n, 1) + c(n, 1),
        ])
        .unwrap();
        assert_eq!(g, expected);
        assert_eq!(g.degree(), TotalDegree::Finite(3));
    }

    #[test]
    fn g_reproduces_nodal_example() {
        let n = 4;
        let r = build_r(&[qi(1), qi(-1)], n).unwrap();
        let g = build_g(&r, &[nodal(n)], n).unwrap();
        assert_eq!(g, example_map());
        assert_eq!(g.component(0).total_degree(), TotalDegree::Finite(5));
        assert_eq!(*g.component(2), z(n, 2));
        assert_eq!(*g.component(3), z(n, 3));
    }

    #[test]
    fn g_rejects_bad_inputs() {
        assert!(matches!(build_g(&c(3, 2), &[], 3), Err(ConstructionError::BadR)));
        assert!(matches!(
            build_g(&z(3, 0), &[z(3, 1)], 3),
            Err(ConstructionError::ForbiddenVariable { index: 1 })
        ));
        assert!(matches!(build_g(&z(2, 0), &[c(2, 1)], 2), Err(ConstructionError::NoRoomForW)));
    }

    #[test]
    fn second_component_is_one_over_z() {
        let n = 4;
        let betas = [qi(3), qi(-2), Q::new(1.into(), 2.into())];
        let r = build_r(&betas, n).unwrap();
        let g = build_g(&r, &[nodal(n)], n).unwrap();
        for b in &betas {
            for x in [pt(&[0, 0]), pt(&[5, -7])] {
                let p = vec![b.clone(), Q::zero(), x[0].clone(), x[1].clone()];
                assert!(g.component(1).eval(&p).unwrap().is_one());
            }
        }
    }

    #[test]
    fn theorem_reproduces_nodal_example() {
        let spec = ZSpec::new(4, vec![pt(&[1, 0]), pt(&[-1, 0])], vec![nodal(4)]).unwrap();
        let b = build_theorem_map(&spec).unwrap();
        assert_eq!(b.full_map, example_map());
        assert_eq!(b.degree, 5);
        assert_eq!(b.degree_bound, 5);
        assert_eq!(b.recompose().unwrap(), b.full_map);
    }

    #[test]
    fn theorem_single_point_plane() {
        let spec = ZSpec::new(2, vec![pt(&[0, 0])], vec![]).unwrap();
        let b = build_theorem_map(&spec).unwrap();
        assert_eq!(b.full_map, build_g(&z(2, 0), &[], 2).unwrap());
        assert_eq!(b.degree, 3);
    }

    #[test]
    fn theorem_empty_f_is_identity() {
        let spec = ZSpec::new(3, vec![], vec![]).unwrap();
        let b = build_theorem_map(&spec).unwrap();
        assert!(b.full_map.is_identity());
        assert_eq!(b.degree_bound, 1);
    }

    #[test]
    fn theorem_with_shear_and_shift_avoids_original_points() {
        let n = 3;
        let w = z(n, 2) - c(n, 4);
        let spec = ZSpec::new(n, vec![pt(&[0, 0]), pt(&[0, 1]), pt(&[2, 3])], vec![w]).unwrap();
        let b = build_theorem_map(&spec).unwrap();
        assert_eq!(b.recompose().unwrap(), b.full_map);
        assert!(b.degree <= b.degree_bound);
        // pulling a point of F x W back lands on {beta} x {0} x W
        for p in spec.points() {
            let w = vec![p[0].clone(), p[1].clone(), qi(4)];
            let back = b.pull_back(&w).unwrap();
            assert!(b.betas.contains(&back[0]));
            assert!(back[1].is_zero());
        }
    }

    #[test]
    fn sigma_origin_three_space() {
        let n = 3;
        let spec = ZSpec::new(n, vec![pt(&[0, 0, 0])], vec![]).unwrap();
        let b = build_sigma(&spec).unwrap();
        let expected = PolyMap::new(vec![
            z(n, 0) + z(n, 1) * (z(n, 0) * z(n, 1) + c(n, 1)),
            z(n, 0) * z(n, 1) + c(n, 1) + z(n, 2),
            z(n, 2).pow(2),
        ])
        .unwrap();
        assert_eq!(b.full_map, expected);
        assert_eq!(b.degree, 3);
    }

    #[test]
    fn sigma_two_collinear_points() {
        let spec = ZSpec::new(4, vec![pt(&[0, 0, 0, 0]), pt(&[1, 0, 0, 0])], vec![]).unwrap();
        let b = build_sigma(&spec).unwrap();
        assert_eq!(b.collinear, Some(true));
        assert_eq!(b.degree, 4);
    }

    #[test]
    fn sigma_rejects_bad_specs() {
        let empty = ZSpec::new(3, vec![], vec![]).unwrap();
        assert!(matches!(build_sigma(&empty), Err(ConstructionError::EmptyF)));
        let with_w = ZSpec::new(3, vec![pt(&[0, 0, 0])], vec![z(3, 2)]).unwrap();
        assert!(matches!(build_sigma(&with_w), Err(ConstructionError::UnexpectedW)));
    }

    #[test]
    fn collinearity_test() {
        assert!(collinear(&[pt(&[0, 0, 1]), pt(&[2, 4, 1]), pt(&[-1, -2, 1])]));
        assert!(!collinear(&[pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1])]));
        assert!(collinear(&[pt(&[3, 3])]));
    }

    #[test]
    fn spec_dedup_and_validation() {
        let spec = ZSpec::new(2, vec![pt(&[1, 2]), pt(&[1, 2]), pt(&[0, 0])], vec![]).unwrap();
        assert_eq!(spec.l(), 2);
        assert_eq!(ZSpec::count_duplicates(&[pt(&[1, 2]), pt(&[1, 2])]), 1);
        assert!(matches!(
            ZSpec::new(3, vec![pt(&[1, 2]), pt(&[1])], vec![]),
            Err(ConstructionError::PointDimension { index: 1, .. })
        ));
        assert!(ZSpec::new(1, vec![], vec![]).is_err());
    }

    #[test]
    fn many_points_small() {
        let (b, pts) = build_many_points_example(3, 4).unwrap();
        assert_eq!(b.degree, 4);
        let expected: Vec<Vec<Q>> = [[1, 0, 1], [1, 0, 2], [2, 0, 1], [2, 0, 2]].iter().map(|p| pt(p)).collect();
        assert_eq!(pts, expected);
        let (_, pts) = build_many_points_example(4, 5).unwrap();
        assert_eq!(pts.len(), 18);
        assert!(build_many_points_example(3, 2).is_err());
    }
}
