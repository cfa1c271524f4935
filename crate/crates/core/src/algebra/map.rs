use num_complex::Complex64;

use super::{AlgebraError, MultiPoly, TotalDegree, Q};

/// A polynomial endomorphism of affine `n`-space, one component per
/// coordinate of the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    num_vars: usize,
    components: Vec<MultiPoly>,
}

impl PolyMap {
    pub fn new(components: Vec<MultiPoly>) -> Result<Self, AlgebraError> {
        let n = components.len();
        if n == 0 {
            return Err(AlgebraError::EmptyMap);
        }
        if let Some(bad) = components.iter().find(|c| c.num_vars() != n) {
            return Err(AlgebraError::VarCountMismatch {
                left: n,
                right: bad.num_vars(),
            });
        }
        Ok(PolyMap {
            num_vars: n,
            components,
        })
    }

    pub fn identity(n: usize) -> Self {
        PolyMap {
            num_vars: n,
            components: (0..n).map(|k| MultiPoly::var(n, k)).collect(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn components(&self) -> &[MultiPoly] {
        &self.components
    }

    pub fn component(&self, k: usize) -> &MultiPoly {
        &self.components[k]
    }

    pub fn is_identity(&self) -> bool {
        *self == PolyMap::identity(self.num_vars)
    }

    /// Maximum total degree over the components.
    pub fn degree(&self) -> TotalDegree {
        self.components
            .iter()
            .map(MultiPoly::total_degree)
            .max()
            .unwrap_or(TotalDegree::ZeroPolynomial)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PolyMap) -> Result<PolyMap, AlgebraError> {
        if self.num_vars != inner.num_vars {
            return Err(AlgebraError::ArityMismatch {
                expected: self.num_vars,
                got: inner.num_vars,
            });
        }
        let components = self
            .components
            .iter()
            .map(|c| c.substitute(&inner.components))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PolyMap {
            num_vars: self.num_vars,
            components,
        })
    }

    pub fn eval(&self, point: &[Q]) -> Result<Vec<Q>, AlgebraError> {
        self.components.iter().map(|c| c.eval(point)).collect()
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Result<Vec<Complex64>, AlgebraError> {
        self.components.iter().map(|c| c.eval_complex(point)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize, k: usize) -> MultiPoly {
        MultiPoly::var(n, k)
    }

    #[test]
    fn identity_is_neutral() {
        let n = 2;
        let f = PolyMap::new(vec![z(n, 0) * z(n, 1), z(n, 1).pow(3) + z(n, 0)]).unwrap();
        let id = PolyMap::identity(n);
        assert_eq!(id.compose(&f).unwrap(), f);
        assert_eq!(f.compose(&id).unwrap(), f);
        assert_eq!(f.degree(), TotalDegree::Finite(3));
    }

    #[test]
    fn component_var_mismatch() {
        assert!(PolyMap::new(vec![z(2, 0), z(3, 0)]).is_err());
        assert!(matches!(PolyMap::new(vec![]), Err(AlgebraError::EmptyMap)));
        let a = PolyMap::identity(2);
        let b = PolyMap::identity(3);
        assert!(a.compose(&b).is_err());
    }
}
