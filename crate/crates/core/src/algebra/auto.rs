//! Triangular and affine automorphisms with explicit inverses.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use super::{AlgebraError, MultiPoly, PolyMap, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AutoKind {
    /// Invertible affine map in the first two coordinates, identity elsewhere.
    Affine2d,
    /// `z1 -> z1 + sum_{k>=2} c_k z_k`, identity elsewhere.
    ShearNd,
    /// `(z1, z2 + L2(z1), ..., zn + Ln(z1))`.
    LagrangeShift,
}

impl AutoKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AutoKind::Affine2d => "affine-2d",
            AutoKind::ShearNd => "shear-nd",
            AutoKind::LagrangeShift => "lagrange-shift",
        }
    }
}

impl fmt::Display for AutoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AutoKind {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "affine-2d" => Ok(AutoKind::Affine2d),
            "shear-nd" => Ok(AutoKind::ShearNd),
            "lagrange-shift" => Ok(AutoKind::LagrangeShift),
            other => Err(AlgebraError::UnsupportedShape(format!("unknown kind `{other}`"))),
        }
    }
}

/// An automorphism of affine space stored together with its inverse.
///
/// Both compositions are checked to be the identity when the value is built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangularAuto {
    kind: AutoKind,
    forward: PolyMap,
    inverse: PolyMap,
}

impl TriangularAuto {
    pub fn identity(n: usize, kind: AutoKind) -> Self {
        TriangularAuto {
            kind,
            forward: PolyMap::identity(n),
            inverse: PolyMap::identity(n),
        }
    }

    /// Accepts a forward/inverse pair after checking both round trips.
    pub fn from_parts(kind: AutoKind, forward: PolyMap, inverse: PolyMap) -> Result<Self, AlgebraError> {
        let n = forward.num_vars();
        let id = PolyMap::identity(n);
        if forward.compose(&inverse)? != id || inverse.compose(&forward)? != id {
            return Err(AlgebraError::NotInverse);
        }
        Ok(TriangularAuto {
            kind,
            forward,
            inverse,
        })
    }

    pub fn kind(&self) -> AutoKind {
        self.kind
    }

    pub fn forward(&self) -> &PolyMap {
        &self.forward
    }

    pub fn inverse(&self) -> &PolyMap {
        &self.inverse
    }

    pub fn num_vars(&self) -> usize {
        self.forward.num_vars()
    }

    /// The same automorphism read backwards.
    pub fn inverted(&self) -> TriangularAuto {
        TriangularAuto {
            kind: self.kind,
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }
}

/// Computes the inverse of a supported triangular shape.
pub fn invert_triangular(forward: PolyMap, kind: AutoKind) -> Result<TriangularAuto, AlgebraError> {
    let n = forward.num_vars();
    let inverse = match kind {
        AutoKind::Affine2d => invert_affine_2d(&forward)?,
        AutoKind::ShearNd => invert_shear(&forward)?,
        AutoKind::LagrangeShift => invert_shift(&forward)?,
    };
    debug_assert_eq!(inverse.num_vars(), n);
    TriangularAuto::from_parts(kind, forward, inverse)
}

fn unsupported(msg: impl Into<String>) -> AlgebraError {
    AlgebraError::UnsupportedShape(msg.into())
}

fn check_identity_tail(forward: &PolyMap, from: usize) -> Result<(), AlgebraError> {
    let n = forward.num_vars();
    for k in from..n {
        if *forward.component(k) != MultiPoly::var(n, k) {
            return Err(unsupported(format!("component {} is not the identity", k + 1)));
        }
    }
    Ok(())
}

/// Reads an affine polynomial `c + sum a_k z_k`, returning `(c, a)`.
fn affine_coeffs(p: &MultiPoly) -> Option<(Q, Vec<Q>)> {
    let n = p.num_vars();
    if p.total_degree().finite().unwrap_or(0) > 1 {
        return None;
    }
    let constant = p.coeff(&vec![0; n]);
    let linear = (0..n)
        .map(|k| {
            let mut e = vec![0; n];
            e[k] = 1;
            p.coeff(&e)
        })
        .collect();
    Some((constant, linear))
}

fn invert_affine_2d(forward: &PolyMap) -> Result<PolyMap, AlgebraError> {
    let n = forward.num_vars();
    if n < 2 {
        return Err(unsupported("affine-2d needs at least two coordinates"));
    }
    check_identity_tail(forward, 2)?;
    let (b1, a1) = affine_coeffs(forward.component(0)).ok_or_else(|| unsupported("component 1 is not affine"))?;
    let (b2, a2) = affine_coeffs(forward.component(1)).ok_or_else(|| unsupported("component 2 is not affine"))?;
    if a1[2..].iter().chain(&a2[2..]).any(|c| !c.is_zero()) {
        return Err(unsupported("affine part mixes in coordinates beyond the plane"));
    }
    let det = &a1[0] * &a2[1] - &a1[1] * &a2[0];
    if det.is_zero() {
        return Err(AlgebraError::Singular);
    }
    // [a b; c d]^{-1} = [d -b; -c a] / det, applied to (z - b)
    let (a, b, c, d) = (&a1[0] / &det, &a1[1] / &det, &a2[0] / &det, &a2[1] / &det);
    let u = MultiPoly::var(n, 0) - MultiPoly::constant(n, b1);
    let v = MultiPoly::var(n, 1) - MultiPoly::constant(n, b2);
    let first = u.scale(&d) - v.scale(&b);
    let second = v.scale(&a) - u.scale(&c);
    let mut comps = vec![first, second];
    comps.extend((2..n).map(|k| MultiPoly::var(n, k)));
    PolyMap::new(comps)
}

fn invert_shear(forward: &PolyMap) -> Result<PolyMap, AlgebraError> {
    let n = forward.num_vars();
    check_identity_tail(forward, 1)?;
    let (c0, lin) = affine_coeffs(forward.component(0)).ok_or_else(|| unsupported("shear component is not linear"))?;
    if !c0.is_zero() || !lin[0].is_one() {
        return Err(unsupported("shear must have the form z1 + sum c_k z_k"));
    }
    let mut first = MultiPoly::var(n, 0);
    for (k, c) in lin.iter().enumerate().skip(1) {
        first = first - MultiPoly::var(n, k).scale(c);
    }
    let mut comps = vec![first];
    comps.extend((1..n).map(|k| MultiPoly::var(n, k)));
    PolyMap::new(comps)
}

fn invert_shift(forward: &PolyMap) -> Result<PolyMap, AlgebraError> {
    let n = forward.num_vars();
    if *forward.component(0) != MultiPoly::var(n, 0) {
        return Err(unsupported("lagrange shift must fix z1"));
    }
    let mut comps = vec![MultiPoly::var(n, 0)];
    for k in 1..n {
        let zk = MultiPoly::var(n, k);
        let shift = forward.component(k) - &zk;
        if !shift.uses_only(|v| v == 0) {
            return Err(unsupported(format!("shift in component {} depends on more than z1", k + 1)));
        }
        comps.push(zk - shift);
    }
    PolyMap::new(comps)
}
