//! All complex roots of a univariate polynomial: Aberth–Ehrlich simultaneous
//! iteration followed by Newton polishing.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use num_traits::Zero;

use crate::algebra::{q_to_f64, Q};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 200;
/// Spacing below which two roots are treated as the same point.
pub const ROOT_SPACING: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("polynomial is constant; it has no roots to find")]
    Constant,
    #[error("no convergence after {iterations} iterations (worst relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("derivative vanishes at {0}")]
    DerivativeVanishes(Complex64),
    #[error("non-finite coefficient")]
    NonFinite,
}

/// Complex univariate polynomial, ascending coefficients, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPolyC {
    coeffs: Vec<Complex64>,
}

impl UniPolyC {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        UniPolyC { coeffs }
    }

    pub fn from_rationals(coeffs: &[Q]) -> Self {
        Self::new(coeffs.iter().map(|c| Complex64::new(q_to_f64(c), 0.0)).collect())
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(c: Complex64, k: usize) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Value and first derivative by Horner.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `sum_k |a_k| |z|^k`, the scale residuals are measured against; the
    /// ratio `|p(z)| / scale_at(z)` is the relative backward error at `z`.
    pub fn scale_at(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn add(&self, other: &UniPolyC) -> UniPolyC {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        UniPolyC::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&zero) + other.coeffs.get(k).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn mul(&self, other: &UniPolyC) -> UniPolyC {
        if self.is_zero() || other.is_zero() {
            return UniPolyC::new(vec![]);
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPolyC::new(out)
    }

    /// `outer(self)` for an outer polynomial given by ascending coefficients.
    pub fn compose_into(&self, outer: &[Complex64]) -> UniPolyC {
        outer.iter().rev().fold(UniPolyC::new(vec![]), |acc, c| {
            acc.mul(self).add(&UniPolyC::constant(*c))
        })
    }
}

/// Roots of a polynomial together with the worst relative residual.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub max_residual: f64,
}

impl RootSet {
    /// Roots with near-coincident entries merged at `spacing`.
    pub fn distinct(&self, spacing: f64) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = Vec::new();
        for r in &self.roots {
            if out.iter().all(|s| (s - r).norm() > spacing) {
                out.push(*r);
            }
        }
        out
    }
}

fn relative_residual(p: &UniPolyC, z: Complex64) -> f64 {
    p.eval(z).norm() / p.scale_at(z)
}

/// Finds all `deg p` roots (with multiplicity).
///
/// Starting points sit on the circle of radius `1 + max |a_k / a_d|` at fixed
/// angles, so repeated runs give identical output. Every returned root
/// satisfies `|p(z)| <= tol * sum_k |a_k| |z|^k`.
pub fn find_all_roots(p: &UniPolyC, tol: f64, max_iter: usize) -> Result<RootSet, RootError> {
    let degree = match p.degree() {
        None | Some(0) => return Err(RootError::Constant),
        Some(d) => d,
    };
    if p.coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(RootError::NonFinite);
    }
    let lead = p.coeffs[degree];
    let monic = UniPolyC::new(p.coeffs.iter().map(|c| c / lead).collect());

    // zero roots factor out exactly
    let zeros = monic.coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let reduced = UniPolyC::new(monic.coeffs[zeros..].to_vec());
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];

    let rd = degree - zeros;
    if rd == 1 {
        roots.push(-reduced.coeffs[0]);
    } else if rd > 1 {
        roots.extend(aberth(&reduced, tol, max_iter)?);
    }

    for r in roots.iter_mut() {
        if let Ok(polished) = polish_root(p, *r) {
            if polished.converged && relative_residual(p, polished.root) <= relative_residual(p, *r) {
                *r = polished.root;
            }
        }
    }

    let max_residual = roots.iter().map(|&r| relative_residual(p, r)).fold(0.0, f64::max);
    if max_residual > tol || !max_residual.is_finite() {
        return Err(RootError::NoConvergence {
            iterations: max_iter,
            residual: max_residual,
        });
    }
    Ok(RootSet { roots, max_residual })
}

fn aberth(p: &UniPolyC, tol: f64, max_iter: usize) -> Result<Vec<Complex64>, RootError> {
    let d = p.degree().unwrap();
    let cauchy = 1.0 + p.coeffs[..d].iter().map(|c| c.norm()).fold(0.0, f64::max);
    // Fujiwara's bound is also a root bound and far tighter when coefficients
    // span many orders of magnitude; starting too far out stalls the iteration.
    let fujiwara = 2.0
        * p.coeffs[..d]
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let c = if k == 0 { c.norm() / 2.0 } else { c.norm() };
                c.powf(1.0 / (d - k) as f64)
            })
            .fold(0.0, f64::max);
    let radius = if fujiwara > 0.0 { cauchy.min(fujiwara) } else { cauchy };
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / d as f64 + 0.4))
        .collect();
    let mut done = vec![false; d];

    for _ in 0..max_iter {
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (v, dv) = p.eval_with_derivative(z[i]);
            if v.norm() <= f64::EPSILON * p.scale_at(z[i]) {
                done[i] = true;
                continue;
            }
            let ratio = v / dv;
            let repulsion: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| {
                    let diff = z[i] - z[j];
                    if diff.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                // perturb off a stationary point
                z[i] += Complex64::new(1e-3, 1e-3) * radius;
                continue;
            }
            z[i] -= step;
            if step.norm() <= 1e-15 * z[i].norm().max(1.0) {
                done[i] = true;
            }
        }
        if done.iter().all(|&x| x) {
            return Ok(z);
        }
    }

    let worst = z.iter().map(|&r| relative_residual(p, r)).fold(0.0, f64::max);
    if worst <= tol {
        // slow linear convergence near a multiple root, but residual is fine
        return Ok(z);
    }
    Err(RootError::NoConvergence {
        iterations: max_iter,
        residual: worst,
    })
}

/// Gaussian rational `re + im i`.
type GaussQ = (Q, Q);

fn gauss_mul(a: &GaussQ, b: &GaussQ) -> GaussQ {
    (&a.0 * &b.0 - &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0)
}

/// Newton refinement with the polynomial evaluated exactly over Q(i).
///
/// Each iterate is an `f64` point, so the exact arithmetic stays small, but
/// `p` and `p'` carry no rounding error; near-multiple roots that stall in
/// floating point keep improving until the `f64` iterate stops moving.
/// Returns the seed if the derivative vanishes or a step makes things worse.
pub fn refine_exact(coeffs: &[Q], seed: Complex64, max_steps: usize) -> Complex64 {
    let exact = |z: Complex64| -> Option<GaussQ> { Some((Q::from_float(z.re)?, Q::from_float(z.im)?)) };
    let zero = || (Q::zero(), Q::zero());
    let mut z = seed;
    let mut best = (f64::INFINITY, seed);
    for _ in 0..=max_steps {
        let Some(x) = exact(z) else { break };
        let (mut p, mut dp) = (zero(), zero());
        for c in coeffs.iter().rev() {
            let t = gauss_mul(&dp, &x);
            dp = (t.0 + &p.0, t.1 + &p.1);
            let t = gauss_mul(&p, &x);
            p = (t.0 + c, t.1);
        }
        let size = q_to_f64(&(&p.0 * &p.0 + &p.1 * &p.1));
        if size >= best.0 {
            break;
        }
        best = (size, z);
        let den = &dp.0 * &dp.0 + &dp.1 * &dp.1;
        if size == 0.0 || den.is_zero() {
            break;
        }
        let step_re = (&p.0 * &dp.0 + &p.1 * &dp.1) / &den;
        let step_im = (&p.1 * &dp.0 - &p.0 * &dp.1) / &den;
        let next = Complex64::new(q_to_f64(&(&x.0 - step_re)), q_to_f64(&(&x.1 - step_im)));
        if next == z || !next.re.is_finite() || !next.im.is_finite() {
            break;
        }
        z = next;
    }
    best.1
}

/// Outcome of Newton polishing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Polished {
    pub root: Complex64,
    pub converged: bool,
}

/// Newton iterations from `seed`; returns the seed unchanged with
/// `converged = false` if the iteration does not settle.
pub fn polish_root(p: &UniPolyC, seed: Complex64) -> Result<Polished, RootError> {
    if p.degree().unwrap_or(0) == 0 {
        return Err(RootError::Constant);
    }
    let mut z = seed;
    for _ in 0..60 {
        let (v, dv) = p.eval_with_derivative(z);
        if v.norm() == 0.0 {
            return Ok(Polished { root: z, converged: true });
        }
        if dv.norm() == 0.0 {
            return Err(RootError::DerivativeVanishes(z));
        }
        let step = v / dv;
        let next = z - step;
        if !next.re.is_finite() || !next.im.is_finite() {
            break;
        }
        z = next;
        if step.norm() <= 4.0 * f64::EPSILON * z.norm().max(1e-300) {
            return Ok(Polished { root: z, converged: true });
        }
    }
    if relative_residual(p, z) <= 4.0 * f64::EPSILON * (p.coeffs.len() as f64) {
        return Ok(Polished { root: z, converged: true });
    }
    Ok(Polished {
        root: seed,
        converged: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    fn assert_close(got: &[Complex64], want: &[Complex64], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (g, w) in sorted(got.to_vec()).iter().zip(sorted(want.to_vec())) {
            assert!((g - w).norm() <= tol, "{g} vs {w}");
        }
    }

    #[test]
    fn imaginary_pair() {
        let p = UniPolyC::from_real(&[1.0, 0.0, 1.0]);
        let rs = find_all_roots(&p, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert_close(&rs.roots, &[c(0.0, -1.0), c(0.0, 1.0)], 1e-12);
    }

    #[test]
    fn cubic_with_zero_root() {
        let p = UniPolyC::from_real(&[0.0, -1.0, 0.0, 1.0]);
        let rs = find_all_roots(&p, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert_close(&rs.roots, &[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 1e-12);
    }

    #[test]
    fn expanded_product_of_linear_factors() {
        // (z-1)(z-2)(z-3) = z^3 - 6z^2 + 11z - 6
        let p = UniPolyC::from_real(&[-6.0, 11.0, -6.0, 1.0]);
        let rs = find_all_roots(&p, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert_close(&rs.roots, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)], 1e-10);
        assert!(rs.max_residual <= DEFAULT_TOL);
    }

    #[test]
    fn double_root_still_meets_residual() {
        let p = UniPolyC::from_real(&[1.0, -2.0, 1.0]);
        let rs = find_all_roots(&p, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(rs.roots.len(), 2);
        assert_eq!(rs.distinct(1e-6).len(), 1);
    }

    #[test]
    fn constants_are_rejected() {
        assert_eq!(
            find_all_roots(&UniPolyC::from_real(&[3.0]), DEFAULT_TOL, 10),
            Err(RootError::Constant)
        );
        assert_eq!(
            find_all_roots(&UniPolyC::new(vec![]), DEFAULT_TOL, 10),
            Err(RootError::Constant)
        );
    }

    #[test]
    fn non_convergence_is_reported() {
        let p = UniPolyC::from_real(&[1.0, 0.3, -2.0, 0.7, 1.5, 0.0, 1.0]);
        match find_all_roots(&p, DEFAULT_TOL, 1) {
            Err(RootError::NoConvergence { iterations: 1, .. }) => {}
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn polish_sqrt_two() {
        let p = UniPolyC::from_real(&[-2.0, 0.0, 1.0]);
        let out = polish_root(&p, c(1.4, 0.0)).unwrap();
        assert!(out.converged);
        assert!((out.root - c(2f64.sqrt(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn polish_exact_root_is_fixed() {
        let p = UniPolyC::from_real(&[-6.0, 11.0, -6.0, 1.0]);
        let out = polish_root(&p, c(2.0, 0.0)).unwrap();
        assert_eq!(out.root, c(2.0, 0.0));
        let sq = UniPolyC::from_real(&[0.0, 0.0, 1.0]);
        assert_eq!(polish_root(&sq, c(0.0, 0.0)).unwrap().root, c(0.0, 0.0));
    }

    #[test]
    fn polish_reports_vanishing_derivative() {
        let p = UniPolyC::from_real(&[1.0, 0.0, 1.0]);
        assert_eq!(
            polish_root(&p, c(0.0, 0.0)),
            Err(RootError::DerivativeVanishes(c(0.0, 0.0)))
        );
    }

    #[test]
    fn compose_into_matches_pointwise() {
        let inner = UniPolyC::from_real(&[1.0, -2.0]);
        let outer = [c(0.5, 0.0), c(0.0, 1.0), c(3.0, 0.0)];
        let composed = inner.compose_into(&outer);
        let x = c(0.3, -0.7);
        let y = inner.eval(x);
        let direct = outer[0] + outer[1] * y + outer[2] * y * y;
        assert!((composed.eval(x) - direct).norm() < 1e-12);
    }

    #[test]
    fn exact_refinement_sharpens_a_cluster() {
        let q = |n: i64, d: i64| Q::new(n.into(), d.into());
        // (z - 1)(z - 1001/1000)(z - 999/1000)
        let coeffs = [q(-999999, 1000000), q(2999999, 1000000), q(-3, 1), q(1, 1)];
        let exact = refine_exact(&coeffs, c(1.0012, 0.0), 8);
        assert!((exact - c(1.001, 0.0)).norm() < 1e-14, "{exact}");
        assert_eq!(refine_exact(&coeffs, c(1.0, 0.0), 8), c(1.0, 0.0));
    }
}
