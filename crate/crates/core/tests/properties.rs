mod common;

use affine_surject::algebra::{MultiPoly, Q};
use affine_surject::construct::{build_sigma, build_theorem_map, ZSpec};
use affine_surject::roots::{find_all_roots, UniPolyC, DEFAULT_MAX_ITER, DEFAULT_TOL};
use affine_surject::solver::{classify, membership_in_z, Target};
use common::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn ints(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x, 1)).collect()
}

/// Random theorem-family input whose `W` contains `tail`.
fn spec_with_anchor() -> impl Strategy<Value = (ZSpec, Vec<Q>)> {
    (3usize..=4)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec((-5i64..=5, -5i64..=5), 0..=6),
                prop::collection::vec(poly(n - 2, 2, 3), 0..=2),
                prop::collection::vec(-3i64..=3, n - 2),
            )
        })
        .prop_map(|(n, pts, polys, tail)| {
            let tail = ints(&tail);
            let map: Vec<usize> = (2..n).collect();
            let w_polys = polys
                .into_iter()
                .map(|p| {
                    let c = p.eval(&tail).unwrap();
                    (p - MultiPoly::constant(n - 2, c)).relabel(n, &map)
                })
                .collect();
            let points = pts.into_iter().map(|(a, b)| ints(&[a, b])).collect();
            (ZSpec::new(n, points, w_polys).unwrap(), tail)
        })
}

fn theorem_bound(l: usize, m: usize, d: u32) -> u32 {
    if l == 0 {
        return 1;
    }
    let l = l as u32;
    let second = if m == 0 { l + 2 } else { (l + 2).max(m as u32 + d + 1) };
    1.max(l.saturating_sub(1)) * second
}

fn match_roots(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    let mut used = vec![false; b.len()];
    a.len() == b.len()
        && a.iter().all(|x| {
            let best = (0..b.len())
                .filter(|&j| !used[j])
                .min_by(|&i, &j| (b[i] - x).norm().partial_cmp(&(b[j] - x).norm()).unwrap());
            match best {
                Some(j) if (b[j] - x).norm() <= tol * x.norm().max(1.0) => {
                    used[j] = true;
                    true
                }
                _ => false,
            }
        })
}

fn complex_coeffs(max_deg: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..=max_deg + 1).prop_map(|v| {
        let mut c: Vec<Complex64> = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
        let last = c.len() - 1;
        c[last] += Complex64::new(1.5, 0.0);
        c
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_axioms_hold(a in poly(3, 2, 4), b in poly(3, 2, 4), c in poly(3, 2, 4)) {
        ring_axioms(&a, &b, &c)?;
    }

    #[test]
    fn composition_matches_evaluation(f in map(3, 2, 3), g in map(3, 2, 3), x in point(3)) {
        compose_eval(&f, &g, &x)?;
    }

    #[test]
    fn automorphisms_invert((m, kind) in auto_case(), x in point(3)) {
        auto_round_trip(&m, kind, &x)?;
    }

    #[test]
    fn printed_polynomials_reparse(p in poly(4, 3, 6)) {
        print_parse(&p)?;
    }

    #[test]
    fn power_matches_repeated_product(p in poly(2, 2, 3), k in 0u32..5) {
        let mut acc = MultiPoly::one(2);
        for _ in 0..k {
            acc = &acc * &p;
        }
        prop_assert_eq!(p.pow(k), acc);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theorem_degree_within_bound((spec, _) in spec_with_anchor()) {
        let b = build_theorem_map(&spec).unwrap();
        let bound = theorem_bound(spec.l(), spec.m(), spec.d());
        prop_assert_eq!(b.degree_bound, bound);
        prop_assert!(b.degree <= bound, "degree {} > {}", b.degree, bound);
        prop_assert_eq!(b.recompose().unwrap(), b.full_map.clone());
    }

    #[test]
    fn membership_iff_exact_empty((spec, tail) in spec_with_anchor(), extra in prop::collection::vec(point(4), 6)) {
        let b = build_theorem_map(&spec).unwrap();
        let n = spec.n();
        let mut probes: Vec<Vec<Q>> = spec
            .points()
            .iter()
            .map(|p| p.iter().chain(&tail).cloned().collect())
            .collect();
        for p in &probes {
            prop_assert!(membership_in_z(&b, p).unwrap());
        }
        probes.extend(extra.into_iter().map(|mut p| { p.truncate(n); p }));
        for p in &probes {
            let member = membership_in_z(&b, p).unwrap();
            let empty = classify(&b, &Target::Rational(p.clone())).unwrap().is_exact_empty();
            prop_assert_eq!(member, empty, "at {:?}", p);
        }
    }

    #[test]
    fn sigma_membership_iff_exact_empty(
        pts in prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 1..=3),
        extra in prop::collection::vec(prop::collection::vec(-2i64..=2, 3), 6),
    ) {
        let points: Vec<Vec<Q>> = pts.iter().map(|p| ints(p)).collect();
        let b = build_sigma(&ZSpec::new(3, points.clone(), vec![]).unwrap()).unwrap();
        prop_assert!(b.degree <= b.degree_bound);
        for p in points.iter().cloned().chain(extra.iter().map(|p| ints(p))) {
            let member = membership_in_z(&b, &p).unwrap();
            let empty = classify(&b, &Target::Rational(p.clone())).unwrap().is_exact_empty();
            prop_assert_eq!(member, empty, "at {:?}", p);
        }
    }

    #[test]
    fn roots_invariant_under_scaling(c in complex_coeffs(8), s in (0.1f64..10.0, -3.0f64..3.0)) {
        let p = UniPolyC::new(c.clone());
        let scale = Complex64::from_polar(s.0, s.1);
        let sp = UniPolyC::new(c.iter().map(|x| x * scale).collect());
        let r1 = find_all_roots(&p, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let r2 = find_all_roots(&sp, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        prop_assert_eq!(r1.roots.len(), p.degree().unwrap());
        prop_assert!(match_roots(&r1.roots, &r2.roots, 1e-6));
    }

    #[test]
    fn vieta_relations(c in complex_coeffs(10)) {
        let p = UniPolyC::new(c.clone());
        let d = p.degree().unwrap();
        let rs = find_all_roots(&p, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let lead = c[d];
        let sum: Complex64 = rs.roots.iter().sum();
        let prod: Complex64 = rs.roots.iter().product();
        let want_sum = -c[d - 1] / lead;
        let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
        let want_prod = c[0] / lead * sign;
        prop_assert!((sum - want_sum).norm() <= 1e-8 * want_sum.norm().max(1.0));
        prop_assert!((prod - want_prod).norm() <= 1e-8 * want_prod.norm().max(1.0));
    }
}
