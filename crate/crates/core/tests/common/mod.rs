#![allow(dead_code)]

use affine_surject::algebra::{invert_triangular, AutoKind, MultiPoly, PolyMap, Q};
use affine_surject::text::{format_poly, parse_poly};
use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn small_q() -> impl Strategy<Value = Q> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

pub fn nonzero_q() -> impl Strategy<Value = Q> {
    small_q().prop_filter("nonzero", |c| *c != q(0, 1))
}

/// Sparse polynomial in `n` variables with per-variable degree at most `max_deg`.
pub fn poly(n: usize, max_deg: u32, max_terms: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((prop::collection::vec(0..=max_deg, n), small_q()), 0..=max_terms)
        .prop_map(move |terms| MultiPoly::from_terms(n, terms).unwrap())
}

/// Polynomial in `z1` only, as a polynomial in `n` variables.
pub fn poly_in_z1(n: usize, max_deg: u32) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec(small_q(), 0..=(max_deg as usize + 1)).prop_map(move |c| MultiPoly::univariate(n, 0, &c))
}

pub fn point(n: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(small_q(), n)
}

pub fn map(n: usize, max_deg: u32, max_terms: usize) -> impl Strategy<Value = PolyMap> {
    prop::collection::vec(poly(n, max_deg, max_terms), n).prop_map(|c| PolyMap::new(c).unwrap())
}

pub fn ring_axioms(a: &MultiPoly, b: &MultiPoly, c: &MultiPoly) -> Result<(), TestCaseError> {
    let n = a.num_vars();
    let zero = MultiPoly::zero(n);
    let one = MultiPoly::one(n);
    prop_assert_eq!(&(a + b) + c, a + &(b + c));
    prop_assert_eq!(a + b, b + a);
    prop_assert_eq!(&(a * b) * c, a * &(b * c));
    prop_assert_eq!(a * b, b * a);
    prop_assert_eq!(a * &(b + c), &(a * b) + &(a * c));
    prop_assert_eq!(a + &zero, a.clone());
    prop_assert_eq!(a * &one, a.clone());
    prop_assert_eq!(a - a, zero.clone());
    prop_assert_eq!(a * &zero, zero);
    Ok(())
}

/// `(F o G)(x) = F(G(x))` and `p(G)(x) = p(G(x))`.
pub fn compose_eval(f: &PolyMap, g: &PolyMap, x: &[Q]) -> Result<(), TestCaseError> {
    let fg = f.compose(g).unwrap();
    let gx = g.eval(x).unwrap();
    prop_assert_eq!(fg.eval(x).unwrap(), f.eval(&gx).unwrap());
    let p = f.component(0);
    let sub = p.substitute(g.components()).unwrap();
    prop_assert_eq!(sub.eval(x).unwrap(), p.eval(&gx).unwrap());
    Ok(())
}

/// Lagrange-style shift `(z1, z2 + L2(z1), z3 + L3(z1))`.
pub fn shift_map() -> impl Strategy<Value = PolyMap> {
    (poly_in_z1(3, 4), poly_in_z1(3, 4)).prop_map(|(l2, l3)| {
        PolyMap::new(vec![MultiPoly::var(3, 0), MultiPoly::var(3, 1) + l2, MultiPoly::var(3, 2) + l3]).unwrap()
    })
}

/// Shear `z1 + c2 z2 + c3 z3`.
pub fn shear_map() -> impl Strategy<Value = PolyMap> {
    (small_q(), small_q()).prop_map(|(c2, c3)| {
        let z = |k| MultiPoly::var(3, k);
        PolyMap::new(vec![z(0) + z(1).scale(&c2) + z(2).scale(&c3), z(1), z(2)]).unwrap()
    })
}

/// Invertible affine map of the plane, identity on `z3`.
pub fn affine_map() -> impl Strategy<Value = PolyMap> {
    (prop::collection::vec(small_q(), 6))
        .prop_filter("invertible", |v| &v[0] * &v[3] != &v[1] * &v[2])
        .prop_map(|v| {
            let z = |k| MultiPoly::var(3, k);
            let c = |x: &Q| MultiPoly::constant(3, x.clone());
            PolyMap::new(vec![
                z(0).scale(&v[0]) + z(1).scale(&v[1]) + c(&v[4]),
                z(0).scale(&v[2]) + z(1).scale(&v[3]) + c(&v[5]),
                z(2),
            ])
            .unwrap()
        })
}

pub fn auto_case() -> impl Strategy<Value = (PolyMap, AutoKind)> {
    prop_oneof![
        shift_map().prop_map(|m| (m, AutoKind::LagrangeShift)),
        shear_map().prop_map(|m| (m, AutoKind::ShearNd)),
        affine_map().prop_map(|m| (m, AutoKind::Affine2d)),
    ]
}

pub fn auto_round_trip(forward: &PolyMap, kind: AutoKind, x: &[Q]) -> Result<(), TestCaseError> {
    let a = invert_triangular(forward.clone(), kind).unwrap();
    let id = PolyMap::identity(3);
    prop_assert_eq!(a.forward().compose(a.inverse()).unwrap(), id.clone());
    prop_assert_eq!(a.inverse().compose(a.forward()).unwrap(), id);
    let y = a.forward().eval(x).unwrap();
    prop_assert_eq!(a.inverse().eval(&y).unwrap(), x.to_vec());
    Ok(())
}

pub fn print_parse(p: &MultiPoly) -> Result<(), TestCaseError> {
    let n = p.num_vars();
    let text = format_poly(p, 'z');
    prop_assert_eq!(&parse_poly(&text, n).unwrap(), p, "text: {}", text);
    let wtext = format_poly(p, 'w');
    prop_assert_eq!(&parse_poly(&wtext, n).unwrap(), p);
    Ok(())
}
