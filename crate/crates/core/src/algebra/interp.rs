use num_traits::Zero;

use super::{AlgebraError, MultiPoly, Q};

/// Exact interpolating polynomial through `nodes`, univariate (one variable).
///
/// Uses Newton divided differences; the result has degree at most
/// `nodes.len() - 1`.
pub fn lagrange_interpolate(nodes: &[(Q, Q)]) -> Result<MultiPoly, AlgebraError> {
    if nodes.is_empty() {
        return Err(AlgebraError::NoNodes);
    }
    for (i, (xi, _)) in nodes.iter().enumerate() {
        if nodes[..i].iter().any(|(xj, _)| xj == xi) {
            return Err(AlgebraError::DuplicateNode(xi.to_string()));
        }
    }

    let xs: Vec<&Q> = nodes.iter().map(|(x, _)| x).collect();
    let mut dd: Vec<Q> = nodes.iter().map(|(_, y)| y.clone()).collect();
    for level in 1..nodes.len() {
        for i in (level..nodes.len()).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (xs[i] - xs[i - level]);
        }
    }

    // Horner over the Newton basis
    let x = MultiPoly::var(1, 0);
    let mut acc = MultiPoly::constant(1, dd[nodes.len() - 1].clone());
    for i in (0..nodes.len() - 1).rev() {
        acc = &acc * &(&x - &MultiPoly::constant(1, xs[i].clone()));
        if !dd[i].is_zero() {
            acc = &acc + &MultiPoly::constant(1, dd[i].clone());
        }
    }
    Ok(acc)
}
