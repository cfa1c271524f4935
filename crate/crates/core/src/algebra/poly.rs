//! Sparse multivariate polynomials with exact rational coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{AlgebraError, Q};

/// Exponent vector of a single term.
///
/// Ordered graded-lexicographically: larger total degree first compares
/// greater, ties broken lexicographically with `z1 > z2 > ... > zn`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(num_vars: usize) -> Self {
        Monomial(vec![0; num_vars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total degree of a polynomial.
///
/// The zero polynomial has no numeric degree; it gets its own variant so that
/// nobody accidentally adds or multiplies it like an integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TotalDegree {
    ZeroPolynomial,
    Finite(u32),
}

impl TotalDegree {
    pub fn finite(self) -> Option<u32> {
        match self {
            TotalDegree::ZeroPolynomial => None,
            TotalDegree::Finite(d) => Some(d),
        }
    }
}

impl fmt::Display for TotalDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TotalDegree::ZeroPolynomial => f.write_str("-inf"),
            TotalDegree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// A polynomial in `num_vars` variables over the rationals.
///
/// Variables are indexed from 0 internally; variable `k` is printed as
/// `z{k+1}`. Terms with zero coefficient are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    num_vars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl MultiPoly {
    pub fn zero(num_vars: usize) -> Self {
        MultiPoly {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(num_vars: usize) -> Self {
        Self::constant(num_vars, Q::one())
    }

    pub fn constant(num_vars: usize, c: Q) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(Monomial::one(num_vars), c);
        p
    }

    /// The coordinate function of variable `var` (0-based).
    pub fn var(num_vars: usize, var: usize) -> Self {
        assert!(var < num_vars, "variable index {var} out of range for {num_vars} variables");
        let mut e = vec![0; num_vars];
        e[var] = 1;
        let mut p = Self::zero(num_vars);
        p.add_term(Monomial(e), Q::one());
        p
    }

    /// Builds `sum c_k * x^k` with `x` the variable `var`, from ascending coefficients.
    pub fn univariate(num_vars: usize, var: usize, coeffs: &[Q]) -> Self {
        assert!(var < num_vars);
        let mut p = Self::zero(num_vars);
        for (k, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; num_vars];
            e[var] = k as u32;
            p.add_term(Monomial(e), c.clone());
        }
        p
    }

    /// Builds a polynomial from raw terms; duplicates are summed and zeros dropped.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (Vec<u32>, Q)>,
    {
        let mut p = Self::zero(num_vars);
        for (e, c) in terms {
            if e.len() != num_vars {
                return Err(AlgebraError::VarCountMismatch {
                    left: num_vars,
                    right: e.len(),
                });
            }
            p.add_term(Monomial(e), c);
        }
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Q)> + '_ {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, exponents: &[u32]) -> Q {
        self.terms
            .get(&Monomial(exponents.to_vec()))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    /// The constant value if the polynomial has no non-constant terms.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.total_degree() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> TotalDegree {
        // graded order: the last key has the largest total degree
        match self.terms.keys().next_back() {
            None => TotalDegree::ZeroPolynomial,
            Some(m) => TotalDegree::Finite(m.total_degree()),
        }
    }

    /// Degree in a single variable.
    pub fn degree_in(&self, var: usize) -> TotalDegree {
        self.terms
            .keys()
            .map(|m| m.0[var])
            .max()
            .map_or(TotalDegree::ZeroPolynomial, TotalDegree::Finite)
    }

    /// Whether every term only involves variables from `allowed`.
    pub fn uses_only(&self, allowed: impl Fn(usize) -> bool) -> bool {
        self.terms
            .keys()
            .all(|m| m.0.iter().enumerate().all(|(k, &e)| e == 0 || allowed(k)))
    }

    /// Ascending coefficients in `var`, provided no other variable occurs.
    pub fn univariate_coeffs(&self, var: usize) -> Option<Vec<Q>> {
        if !self.uses_only(|k| k == var) {
            return None;
        }
        let deg = self.degree_in(var).finite().unwrap_or(0) as usize;
        let mut out = vec![Q::zero(); deg + 1];
        for (m, c) in &self.terms {
            out[m.0[var] as usize] = c.clone();
        }
        Some(out)
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_vars(&self, other: &MultiPoly) -> Result<(), AlgebraError> {
        if self.num_vars != other.num_vars {
            return Err(AlgebraError::VarCountMismatch {
                left: self.num_vars,
                right: other.num_vars,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
        self.check_vars(other)?;
        let mut out = MultiPoly::zero(self.num_vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Q) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.num_vars);
        }
        MultiPoly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, mut k: u32) -> MultiPoly {
        let mut base = self.clone();
        let mut acc = MultiPoly::one(self.num_vars);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Re-embeds the polynomial into `num_vars` variables, sending variable
    /// `k` to variable `index_map[k]`.
    pub fn relabel(&self, num_vars: usize, index_map: &[usize]) -> MultiPoly {
        assert_eq!(index_map.len(), self.num_vars);
        let mut out = MultiPoly::zero(num_vars);
        for (m, c) in &self.terms {
            let mut e = vec![0; num_vars];
            for (k, &x) in m.0.iter().enumerate() {
                e[index_map[k]] += x;
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[Q]) -> Result<Q, AlgebraError> {
        if point.len() != self.num_vars {
            return Err(AlgebraError::ArityMismatch {
                expected: self.num_vars,
                got: point.len(),
            });
        }
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Floating-point evaluation at a complex point, as a direct sum of terms
    /// with per-variable power tables.
    pub fn eval_complex(&self, point: &[Complex64]) -> Result<Complex64, AlgebraError> {
        if point.len() != self.num_vars {
            return Err(AlgebraError::ArityMismatch {
                expected: self.num_vars,
                got: point.len(),
            });
        }
        let powers: Vec<Vec<Complex64>> = (0..self.num_vars)
            .map(|k| {
                let deg = self.degree_in(k).finite().unwrap_or(0) as usize;
                let mut v = Vec::with_capacity(deg + 1);
                v.push(Complex64::new(1.0, 0.0));
                for i in 1..=deg {
                    v.push(v[i - 1] * point[k]);
                }
                v
            })
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = Complex64::new(q_to_f64(c), 0.0);
            for (k, &e) in m.0.iter().enumerate() {
                t *= powers[k][e as usize];
            }
            acc += t;
        }
        if !acc.re.is_finite() || !acc.im.is_finite() {
            return Err(AlgebraError::NonFinite);
        }
        Ok(acc)
    }

    /// Composition: replaces variable `k` by `images[k]`.
    ///
    /// The result lives in the common variable count of the images.
    pub fn substitute(&self, images: &[MultiPoly]) -> Result<MultiPoly, AlgebraError> {
        if images.len() != self.num_vars {
            return Err(AlgebraError::ArityMismatch {
                expected: self.num_vars,
                got: images.len(),
            });
        }
        let target_vars = match images.first() {
            Some(p) => p.num_vars,
            None => {
                // zero-variable polynomial is a constant
                return Ok(self.clone());
            }
        };
        if let Some(bad) = images.iter().find(|p| p.num_vars != target_vars) {
            return Err(AlgebraError::VarCountMismatch {
                left: target_vars,
                right: bad.num_vars,
            });
        }
        let mut powers: Vec<Vec<MultiPoly>> = images
            .iter()
            .map(|p| vec![MultiPoly::one(target_vars), p.clone()])
            .collect();
        for k in 0..self.num_vars {
            let deg = self.degree_in(k).finite().unwrap_or(0) as usize;
            while powers[k].len() <= deg {
                let next = &powers[k][powers[k].len() - 1] * &images[k];
                powers[k].push(next);
            }
        }
        let mut out = MultiPoly::zero(target_vars);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(target_vars, c.clone());
            for (k, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &powers[k][e as usize];
                }
            }
            for (tm, tc) in t.terms {
                out.add_term(tm, tc);
            }
        }
        Ok(out)
    }

    /// Largest absolute coefficient, as a float.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|c| q_to_f64(&c.abs()))
            .fold(0.0, f64::max)
    }
}

pub(crate) fn q_to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&MultiPoly> for &MultiPoly {
            type Output = MultiPoly;

            /// Panics if the operands have different variable counts; use the
            /// `try_` method to get an error instead.
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                self.$checked(rhs).expect("polynomial variable counts differ")
            }
        }

        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;

            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        MultiPoly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        -&self
    }
}
