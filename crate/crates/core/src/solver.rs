//! Preimage solving by triangular elimination.
//!
//! For the `g` family, a target `w` is pulled back through the recorded
//! automorphisms, the last `n - 2` coordinates are fixed, `z1` is eliminated,
//! and what remains is a univariate equation in `z2`:
//!
//! ```text
//! 0 = 1 - w2 + z2 * r(w1 - w2 z2 - sum alpha_i z2^{i+1}),   alpha_i = q_i(w3..wn)
//! ```
//!
//! A nonzero constant there is an exact proof that `w` has no preimage.
//! The point-complement maps add a square-root tower for `z3..zn` in front of
//! the same reduction.

use num_complex::Complex64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{q_to_f64, AlgebraError, MultiPoly, Q};
use crate::construct::{ConstructionBundle, Family};
use crate::roots::{find_all_roots, refine_exact, RootError, UniPolyC, DEFAULT_MAX_ITER, DEFAULT_TOL, ROOT_SPACING};

/// Default bound on `|f(z) - w|` (max-norm) for a witness to count.
pub const WITNESS_TOL: f64 = 1e-8;
/// Default spacing for merging square-root branches.
pub const BRANCH_SPACING: f64 = 1e-7;
/// Exact Newton steps applied to roots of an exact residual.
const EXACT_REFINE_STEPS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error("target has {got} coordinates, map has {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("bundle family {0} does not support this reduction")]
    WrongFamily(Family),
}

/// A target point: rational points get exact classification, complex ones
/// only the numeric path.
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Rational(Vec<Q>),
    Complex(Vec<Complex64>),
}

impl Target {
    pub fn len(&self) -> usize {
        match self {
            Target::Rational(v) => v.len(),
            Target::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        match self {
            Target::Rational(v) => v.iter().map(|x| Complex64::new(q_to_f64(x), 0.0)).collect(),
            Target::Complex(v) => v.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictKind {
    /// Residual is a nonzero constant: no preimage.
    Empty,
    /// Residual vanishes identically: every `z2` works.
    AllZ2,
    /// Residual has positive degree: finitely many `z2`.
    Finite,
}

impl VerdictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::Empty => "empty",
            VerdictKind::AllZ2 => "all-z2",
            VerdictKind::Finite => "finite",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Residual {
    Exact(MultiPoly),
    Numeric(UniPolyC),
}

impl Residual {
    pub fn degree(&self) -> Option<usize> {
        match self {
            Residual::Exact(p) => p.total_degree().finite().map(|d| d as usize),
            Residual::Numeric(p) => p.degree(),
        }
    }
}

/// Outcome of the exact (or, for complex targets, numeric) classification.
#[derive(Clone, Debug, PartialEq)]
pub struct SolvabilityVerdict {
    pub kind: VerdictKind,
    pub residual: Residual,
    /// For exact `Empty`: the constant `c` in `0 = c`.
    pub empty_constant: Option<Q>,
    /// False when the verdict rests on floating-point arithmetic.
    pub exact: bool,
}

impl SolvabilityVerdict {
    pub(crate) fn exact_from(residual: MultiPoly) -> Self {
        let (kind, empty_constant) = if residual.is_zero() {
            (VerdictKind::AllZ2, None)
        } else if let Some(c) = residual.as_constant() {
            (VerdictKind::Empty, Some(c))
        } else {
            (VerdictKind::Finite, None)
        };
        SolvabilityVerdict {
            kind,
            residual: Residual::Exact(residual),
            empty_constant,
            exact: true,
        }
    }

    pub(crate) fn numeric_from(residual: UniPolyC) -> Self {
        let kind = match residual.degree() {
            None => VerdictKind::AllZ2,
            Some(0) => VerdictKind::Empty,
            Some(_) => VerdictKind::Finite,
        };
        SolvabilityVerdict {
            kind,
            residual: Residual::Numeric(residual),
            empty_constant: None,
            exact: false,
        }
    }

    pub fn is_exact_empty(&self) -> bool {
        self.exact && self.kind == VerdictKind::Empty
    }
}

/// Witnesses found for a target.
#[derive(Clone, Debug, PartialEq)]
pub struct PreimageSet {
    pub witnesses: Vec<Vec<Complex64>>,
    /// `|f(z) - w|` in max-norm, per witness.
    pub residuals: Vec<f64>,
    /// Set only by exact classification.
    pub exact_empty: bool,
    pub verdict: SolvabilityVerdict,
    /// Candidates discarded by the forward check.
    pub rejected: usize,
}

impl PreimageSet {
    fn empty(verdict: SolvabilityVerdict) -> Self {
        PreimageSet {
            witnesses: Vec::new(),
            residuals: Vec::new(),
            exact_empty: verdict.is_exact_empty(),
            verdict,
            rejected: 0,
        }
    }
}

/// Solver knobs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub root_tol: f64,
    pub max_iter: usize,
    pub branch_spacing: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: WITNESS_TOL,
            root_tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            branch_spacing: BRANCH_SPACING,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolveOptions {
            tol,
            ..Default::default()
        }
    }
}

fn check_dim(bundle: &ConstructionBundle, w: &Target) -> Result<(), SolveError> {
    if w.len() != bundle.n() {
        return Err(SolveError::Dimension {
            expected: bundle.n(),
            got: w.len(),
        });
    }
    Ok(())
}

/// Ascending coefficients of `r` in `z1`.
fn r_coeffs(bundle: &ConstructionBundle) -> Vec<Q> {
    bundle
        .r_poly
        .univariate_coeffs(0)
        .expect("r is univariate in z1 by construction")
}

fn r_coeffs_complex(bundle: &ConstructionBundle) -> Vec<Complex64> {
    r_coeffs(bundle)
        .iter()
        .map(|c| Complex64::new(q_to_f64(c), 0.0))
        .collect()
}

/// Residual equation of the identity map: `z2 - w2 = 0` always has a solution.
fn identity_verdict(bundle: &ConstructionBundle, w: &Target) -> SolvabilityVerdict {
    let n = bundle.n();
    match w {
        Target::Rational(v) => {
            SolvabilityVerdict::exact_from(MultiPoly::var(n, 1) - MultiPoly::constant(n, v[1].clone()))
        }
        Target::Complex(v) => SolvabilityVerdict::numeric_from(UniPolyC::new(vec![-v[1], Complex64::new(1.0, 0.0)])),
    }
}

/// Builds and classifies the residual equation in `z2` for the `g` family.
pub fn residual_poly_g(bundle: &ConstructionBundle, w: &Target) -> Result<SolvabilityVerdict, SolveError> {
    check_dim(bundle, w)?;
    if !bundle.family.uses_g() {
        return Err(SolveError::WrongFamily(bundle.family));
    }
    if bundle.is_identity() {
        return Ok(identity_verdict(bundle, w));
    }
    let n = bundle.n();
    let w_polys = bundle.z_normalized.w_polys();
    match w {
        Target::Rational(v) => {
            let wp = bundle.pull_back(v)?;
            let z2 = MultiPoly::var(n, 1);
            let mut inner = MultiPoly::constant(n, wp[0].clone()) - z2.scale(&wp[1]);
            for (i, q) in w_polys.iter().enumerate() {
                let alpha = q.eval(&wp)?;
                inner = inner - z2.pow(i as u32 + 2).scale(&alpha);
            }
            let mut images: Vec<MultiPoly> = (0..n).map(|k| MultiPoly::var(n, k)).collect();
            images[0] = inner;
            let r_of = bundle.r_poly.substitute(&images)?;
            let residual = MultiPoly::constant(n, Q::one() - &wp[1]) + &z2 * &r_of;
            Ok(SolvabilityVerdict::exact_from(residual))
        }
        Target::Complex(v) => {
            let wp = bundle.pull_back_complex(v)?;
            let inner = g_inner_complex(bundle, &wp)?;
            let r_of = inner.compose_into(&r_coeffs_complex(bundle));
            let one = Complex64::new(1.0, 0.0);
            let residual = UniPolyC::constant(one - wp[1]).add(&UniPolyC::monomial(one, 1).mul(&r_of));
            Ok(SolvabilityVerdict::numeric_from(residual))
        }
    }
}

/// `w1 - w2 z2 - sum alpha_i z2^{i+1}` as a polynomial in `z2`.
fn g_inner_complex(bundle: &ConstructionBundle, wp: &[Complex64]) -> Result<UniPolyC, SolveError> {
    let mut coeffs = vec![wp[0], -wp[1]];
    for (i, q) in bundle.z_normalized.w_polys().iter().enumerate() {
        let alpha = q.eval_complex(wp)?;
        while coeffs.len() < i + 3 {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        coeffs[i + 2] -= alpha;
    }
    Ok(UniPolyC::new(coeffs))
}

/// `|f(z) - w|` in max-norm, evaluated through the bundle's factors.
fn forward_error(bundle: &ConstructionBundle, z: &[Complex64], target: &[Complex64]) -> f64 {
    match bundle.eval_complex(z) {
        Ok(img) => img
            .iter()
            .zip(target)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    }
}

/// Forward check of candidate domain points against the original target.
fn verify_candidates(
    bundle: &ConstructionBundle,
    candidates: Vec<Vec<Complex64>>,
    target: &[Complex64],
    opts: &SolveOptions,
    verdict: SolvabilityVerdict,
) -> PreimageSet {
    let mut set = PreimageSet::empty(verdict);
    for z in candidates {
        let err = forward_error(bundle, &z, target);
        let duplicate = set.witnesses.iter().any(|u| {
            u.iter().zip(&z).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) <= ROOT_SPACING
        });
        if err <= opts.tol && !duplicate {
            set.witnesses.push(z);
            set.residuals.push(err);
        } else if err > opts.tol {
            set.rejected += 1;
        }
    }
    set
}

/// Roots of a residual in `z2`, or the canonical `z2 = 0` if it vanishes.
fn z2_candidates(residual: &UniPolyC, opts: &SolveOptions) -> Result<Vec<Complex64>, RootError> {
    match residual.degree() {
        None => Ok(vec![Complex64::new(0.0, 0.0)]),
        Some(0) => Ok(Vec::new()),
        Some(_) => Ok(find_all_roots(residual, opts.root_tol, opts.max_iter)?.roots),
    }
}

fn residual_as_complex(verdict: &SolvabilityVerdict) -> UniPolyC {
    match &verdict.residual {
        Residual::Exact(p) => UniPolyC::from_rationals(&p.univariate_coeffs(1).expect("residual is univariate in z2")),
        Residual::Numeric(p) => p.clone(),
    }
}

/// Preimage witnesses for the `g` family.
pub fn preimage_g(bundle: &ConstructionBundle, w: &Target, opts: &SolveOptions) -> Result<PreimageSet, SolveError> {
    let verdict = residual_poly_g(bundle, w)?;
    let target = w.to_complex();
    if verdict.kind == VerdictKind::Empty {
        return Ok(PreimageSet::empty(verdict));
    }
    if bundle.is_identity() {
        return Ok(verify_candidates(bundle, vec![target.clone()], &target, opts, verdict));
    }
    let wp = match w {
        Target::Rational(v) => bundle
            .pull_back(v)?
            .iter()
            .map(|x| Complex64::new(q_to_f64(x), 0.0))
            .collect(),
        Target::Complex(v) => bundle.pull_back_complex(v)?,
    };
    let inner = g_inner_complex(bundle, &wp)?;
    let residual = residual_as_complex(&verdict);
    let exact_coeffs = match &verdict.residual {
        Residual::Exact(p) => p.univariate_coeffs(1).filter(|c| c.len() > 1),
        Residual::Numeric(_) => None,
    };
    let lift = |z2: Complex64| {
        let mut z = wp.clone();
        z[0] = inner.eval(z2);
        z[1] = z2;
        z
    };
    let candidates = z2_candidates(&residual, opts)?
        .into_iter()
        .map(|z2| {
            let z = lift(z2);
            match &exact_coeffs {
                // roots in a tight cluster can stall short of the tolerance in f64
                Some(c) if forward_error(bundle, &z, &target) > opts.tol => lift(refine_exact(c, z2, EXACT_REFINE_STEPS)),
                _ => z,
            }
        })
        .collect();
    Ok(verify_candidates(bundle, candidates, &target, opts, verdict))
}

/// Exact polynomial satisfied by every `z3` of the square-root tower:
/// `z4 = w3 - z3^2, ..., zn = w_{n-1} - z_{n-1}^2` and `zn^2 = wn`.
///
/// Returned as ascending coefficients; `None` for `n = 2` (no tower).
pub fn tower_polynomial(wp: &[Q]) -> Option<Vec<Q>> {
    let n = wp.len();
    if n < 3 {
        return None;
    }
    let x = MultiPoly::var(1, 0);
    let mut y = x;
    for wk in &wp[2..n - 1] {
        y = MultiPoly::constant(1, wk.clone()) - y.pow(2);
    }
    let p = y.pow(2) - MultiPoly::constant(1, wp[n - 1].clone());
    p.univariate_coeffs(0)
}

/// The unique root of `p` if `p = a (x - c)^N`, exactly.
fn single_root(coeffs: &[Q]) -> Option<Q> {
    let deg = coeffs.len() - 1;
    let lead = &coeffs[deg];
    let c = -&coeffs[deg - 1] / (lead * Q::from_integer(deg.into()));
    let x = MultiPoly::var(1, 0);
    let model = (x - MultiPoly::constant(1, c.clone())).pow(deg as u32).scale(lead);
    (model.univariate_coeffs(0)? == coeffs).then_some(c)
}

/// Classifies a target for the point-complement family.
///
/// For rational targets the decision is exact: the tower polynomial either
/// has a single rational root `c` (then the residual is formed exactly with
/// `z3 = c`), or at least two distinct roots, one of which differs from `w2`
/// and gives a residual of positive degree.
pub fn classify_sigma(bundle: &ConstructionBundle, w: &Target) -> Result<SolvabilityVerdict, SolveError> {
    check_dim(bundle, w)?;
    if bundle.family != Family::PropSigma {
        return Err(SolveError::WrongFamily(bundle.family));
    }
    let n = bundle.n();
    match w {
        Target::Rational(v) => {
            let wp = bundle.pull_back(v)?;
            let z3 = match tower_polynomial(&wp) {
                None => Some(Q::zero()),
                Some(p) => single_root(&p),
            };
            match z3 {
                Some(c) => {
                    let s = &wp[1] - &c;
                    let z2 = MultiPoly::var(n, 1);
                    let mut images: Vec<MultiPoly> = (0..n).map(|k| MultiPoly::var(n, k)).collect();
                    images[0] = MultiPoly::constant(n, wp[0].clone()) - z2.scale(&s);
                    let r_of = bundle.r_poly.substitute(&images)?;
                    let residual = MultiPoly::constant(n, Q::one() - &s) + &z2 * &r_of;
                    Ok(SolvabilityVerdict::exact_from(residual))
                }
                None => {
                    // several tower branches; report a residual of positive degree
                    let wc = w.to_complex_pulled(bundle)?;
                    Ok(SolvabilityVerdict {
                        kind: VerdictKind::Finite,
                        residual: Residual::Numeric(first_solvable_residual(bundle, &wc)),
                        empty_constant: None,
                        exact: true,
                    })
                }
            }
        }
        Target::Complex(_) => {
            let wc = w.to_complex_pulled(bundle)?;
            Ok(SolvabilityVerdict::numeric_from(first_solvable_residual(bundle, &wc)))
        }
    }
}

fn first_solvable_residual(bundle: &ConstructionBundle, wp: &[Complex64]) -> UniPolyC {
    let residuals: Vec<UniPolyC> = sigma_branches(wp, BRANCH_SPACING)
        .iter()
        .map(|b| sigma_residual(bundle, wp, b))
        .collect();
    let pick = residuals.iter().position(|r| r.degree() != Some(0)).unwrap_or(0);
    residuals[pick].clone()
}

impl Target {
    fn to_complex_pulled(&self, bundle: &ConstructionBundle) -> Result<Vec<Complex64>, AlgebraError> {
        match self {
            Target::Rational(v) => Ok(bundle
                .pull_back(v)?
                .iter()
                .map(|x| Complex64::new(q_to_f64(x), 0.0))
                .collect()),
            Target::Complex(v) => bundle.pull_back_complex(v),
        }
    }
}

/// All sign choices of the tower `zn = ±sqrt(wn)`, `zk = ±sqrt(wk - z_{k+1})`,
/// as tails `(z3, ..., zn)`, with near-duplicates merged.
pub fn sigma_branches(wp: &[Complex64], spacing: f64) -> Vec<Vec<Complex64>> {
    let n = wp.len();
    if n < 3 {
        return vec![Vec::new()];
    }
    // built from zn downwards; stored reversed until the end
    let mut tails: Vec<Vec<Complex64>> = Vec::new();
    let root = wp[n - 1].sqrt();
    for s in [root, -root] {
        tails.push(vec![s]);
    }
    for k in (2..n - 1).rev() {
        let mut next = Vec::with_capacity(tails.len() * 2);
        for t in &tails {
            let above = *t.last().unwrap();
            let root = (wp[k] - above).sqrt();
            for s in [root, -root] {
                let mut u = t.clone();
                u.push(s);
                next.push(u);
            }
        }
        tails = next;
    }
    let mut out: Vec<Vec<Complex64>> = Vec::new();
    for mut t in tails {
        t.reverse();
        let dup = out
            .iter()
            .any(|u| u.iter().zip(&t).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) <= spacing);
        if !dup {
            out.push(t);
        }
    }
    out
}

/// `1 - (w2 - z3) + z2 r(w1 - (w2 - z3) z2)` on one branch.
fn sigma_residual(bundle: &ConstructionBundle, wp: &[Complex64], tail: &[Complex64]) -> UniPolyC {
    let z3 = tail.first().copied().unwrap_or(Complex64::new(0.0, 0.0));
    let s = wp[1] - z3;
    let inner = UniPolyC::new(vec![wp[0], -s]);
    let r_of = inner.compose_into(&r_coeffs_complex(bundle));
    let one = Complex64::new(1.0, 0.0);
    UniPolyC::constant(one - s).add(&UniPolyC::monomial(one, 1).mul(&r_of))
}

/// Preimage witnesses for the point-complement family.
pub fn preimage_sigma(bundle: &ConstructionBundle, w: &Target, opts: &SolveOptions) -> Result<PreimageSet, SolveError> {
    let verdict = classify_sigma(bundle, w)?;
    if verdict.kind == VerdictKind::Empty {
        return Ok(PreimageSet::empty(verdict));
    }
    let target = w.to_complex();
    let wp = w.to_complex_pulled(bundle)?;
    let mut candidates = Vec::new();
    let mut first_error = None;
    for tail in sigma_branches(&wp, opts.branch_spacing) {
        let residual = sigma_residual(bundle, &wp, &tail);
        let z3 = tail.first().copied().unwrap_or(Complex64::new(0.0, 0.0));
        let s = wp[1] - z3;
        match z2_candidates(&residual, opts) {
            Ok(roots) => {
                for z2 in roots {
                    let mut z = vec![wp[0] - s * z2, z2];
                    z.extend_from_slice(&tail);
                    candidates.push(z);
                }
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    let set = verify_candidates(bundle, candidates, &target, opts, verdict);
    if set.witnesses.is_empty() {
        if let Some(e) = first_error {
            return Err(e.into());
        }
    }
    Ok(set)
}

/// Classification for any bundle family.
pub fn classify(bundle: &ConstructionBundle, w: &Target) -> Result<SolvabilityVerdict, SolveError> {
    if bundle.family == Family::PropSigma {
        classify_sigma(bundle, w)
    } else {
        residual_poly_g(bundle, w)
    }
}

/// Preimage witnesses for any bundle family.
pub fn preimage(bundle: &ConstructionBundle, w: &Target, opts: &SolveOptions) -> Result<PreimageSet, SolveError> {
    if bundle.family == Family::PropSigma {
        preimage_sigma(bundle, w, opts)
    } else {
        preimage_g(bundle, w, opts)
    }
}

/// Exact membership of a rational point in the avoided set, tested in the
/// normalized coordinates after pulling back through the recorded
/// automorphisms.
pub fn membership_in_z(bundle: &ConstructionBundle, w: &[Q]) -> Result<bool, SolveError> {
    if w.len() != bundle.n() {
        return Err(SolveError::Dimension {
            expected: bundle.n(),
            got: w.len(),
        });
    }
    if bundle.is_identity() {
        return Ok(false);
    }
    let wp = bundle.pull_back(w)?;
    if !bundle.betas.contains(&wp[0]) {
        return Ok(false);
    }
    if bundle.family == Family::PropSigma {
        return Ok(wp[1..].iter().all(Zero::is_zero));
    }
    if !wp[1].is_zero() {
        return Ok(false);
    }
    for q in bundle.z_normalized.w_polys() {
        if !q.eval(&wp)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}
