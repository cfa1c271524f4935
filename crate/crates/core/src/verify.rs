//! Audits of constructed maps: random surjectivity sampling on a rational
//! grid, exact emptiness on probes of the avoided set, and degree bounds.

use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{qi, MultiPoly, PolyMap, Q};
use crate::construct::{build_many_points_example, ConstructionBundle, Family};
use crate::roots::{find_all_roots, UniPolyC};
use crate::solver::{classify, membership_in_z, preimage, Residual, SolveError, SolveOptions, Target};
use crate::text::format_poly;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("probe {index} is not a point of Z")]
    ProbeNotInZ { index: usize },
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// How to spread independent samples over threads.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    /// Data-parallel over samples (sequential when built without the
    /// `parallel` feature).
    #[default]
    Parallel,
    Sequential,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BundleSummary {
    pub family: String,
    pub n: usize,
    pub l: usize,
    pub m: usize,
    pub d: u32,
    pub degree: u32,
}

impl BundleSummary {
    pub fn of(bundle: &ConstructionBundle) -> Self {
        BundleSummary {
            family: bundle.family.to_string(),
            n: bundle.n(),
            l: bundle.l(),
            m: bundle.z_normalized.m(),
            d: bundle.z_normalized.d(),
            degree: bundle.degree,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FailureRecord {
    pub kind: String,
    pub point: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    pub detail: String,
}

/// Result of one or more audits.
///
/// `elapsed` is kept out of the JSON so that reruns with the same inputs
/// produce identical documents.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub format: u32,
    pub bundle: BundleSummary,
    pub degree_observed: u32,
    pub degree_bound: u32,
    pub samples_tested: usize,
    pub samples_with_witness: usize,
    pub z_probes_tested: usize,
    pub z_probes_empty: usize,
    pub failures: Vec<FailureRecord>,
    pub seed: u64,
    pub pass: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl AuditReport {
    fn blank(bundle: BundleSummary, degree_observed: u32, degree_bound: u32) -> Self {
        AuditReport {
            format: crate::io::FORMAT_VERSION,
            bundle,
            degree_observed,
            degree_bound,
            samples_tested: 0,
            samples_with_witness: 0,
            z_probes_tested: 0,
            z_probes_empty: 0,
            failures: Vec::new(),
            seed: 0,
            pass: false,
            elapsed: Duration::ZERO,
        }
    }

    fn for_bundle(bundle: &ConstructionBundle) -> Self {
        Self::blank(BundleSummary::of(bundle), bundle.degree, bundle.degree_bound)
    }

    fn finish(mut self, started: Instant) -> Self {
        self.elapsed = started.elapsed();
        self.pass = self.passes();
        self
    }

    fn passes(&self) -> bool {
        self.failures.is_empty()
            && self.samples_with_witness == self.samples_tested
            && self.z_probes_empty == self.z_probes_tested
            && self.degree_observed <= self.degree_bound
    }

    /// Combines two fragments about the same bundle.
    pub fn merge(mut self, other: AuditReport) -> AuditReport {
        self.samples_tested += other.samples_tested;
        self.samples_with_witness += other.samples_with_witness;
        self.z_probes_tested += other.z_probes_tested;
        self.z_probes_empty += other.z_probes_empty;
        self.failures.extend(other.failures);
        self.degree_observed = self.degree_observed.max(other.degree_observed);
        if other.samples_tested > 0 {
            self.seed = other.seed;
        }
        self.elapsed += other.elapsed;
        self.pass = self.passes();
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Short human-readable summary.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "family {}  n={} l={} m={} d={}\n\
             degree {} (bound {})\n\
             surjectivity samples: {}/{} with verified witness\n\
             Z probes: {}/{} exactly empty\n",
            self.bundle.family,
            self.bundle.n,
            self.bundle.l,
            self.bundle.m,
            self.bundle.d,
            self.degree_observed,
            self.degree_bound,
            self.samples_with_witness,
            self.samples_tested,
            self.z_probes_empty,
            self.z_probes_tested,
        );
        for f in self.failures.iter().take(10) {
            out.push_str(&format!("  FAIL {} at ({}): {}\n", f.kind, f.point.join(", "), f.detail));
        }
        if self.failures.len() > 10 {
            out.push_str(&format!("  ... {} more failures\n", self.failures.len() - 10));
        }
        out.push_str(if self.pass { "PASS" } else { "FAIL" });
        out
    }
}

/// Parameters for [`audit_surjectivity`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleConfig {
    pub samples: usize,
    pub seed: u64,
    /// Coordinates are drawn uniformly from `[-grid, grid]`.
    pub grid: i64,
    pub tol: f64,
    pub execution: Execution,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            samples: 200,
            seed: 42,
            grid: 10,
            tol: crate::solver::WITNESS_TOL,
            execution: Execution::Parallel,
        }
    }
}

fn point_strings(p: &[Q]) -> Vec<String> {
    p.iter().map(Q::to_string).collect()
}

fn residual_text(r: &Residual) -> String {
    match r {
        Residual::Exact(p) => format_poly(p, 'z'),
        Residual::Numeric(p) => format!("{:?}", p.coeffs()),
    }
}

/// Runs `f` over `0..count`, keeping index order in the output.
fn run_indexed<T, F>(count: usize, execution: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..count).into_par_iter().map(f).collect()
        }
        _ => (0..count).map(f).collect(),
    }
}

/// Deterministic stream for sample `index`: one ChaCha stream per index, so
/// parallel and serial runs draw the same points.
fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn draw_point(rng: &mut ChaCha8Rng, n: usize, grid: i64) -> Vec<Q> {
    (0..n).map(|_| qi(rng.gen_range(-grid..=grid))).collect()
}

const MAX_REDRAWS: usize = 1000;

/// Samples grid points outside `Z` and demands a verified preimage witness for
/// each.
pub fn audit_surjectivity(bundle: &ConstructionBundle, cfg: &SampleConfig) -> AuditReport {
    let started = Instant::now();
    let opts = SolveOptions::with_tol(cfg.tol);
    let n = bundle.n();
    let outcomes = run_indexed(cfg.samples, cfg.execution, |i| {
        let mut rng = sample_rng(cfg.seed, i);
        let mut w = draw_point(&mut rng, n, cfg.grid);
        let mut redraws = 0;
        while membership_in_z(bundle, &w).unwrap_or(false) {
            redraws += 1;
            if redraws > MAX_REDRAWS {
                return Err(FailureRecord {
                    kind: "sampling".into(),
                    point: point_strings(&w),
                    residual: None,
                    detail: "could not draw a point outside Z".into(),
                });
            }
            w = draw_point(&mut rng, n, cfg.grid);
        }
        match preimage(bundle, &Target::Rational(w.clone()), &opts) {
            Ok(set) if !set.witnesses.is_empty() => Ok(()),
            Ok(set) => Err(FailureRecord {
                kind: "no-witness".into(),
                point: point_strings(&w),
                residual: Some(residual_text(&set.verdict.residual)),
                detail: format!(
                    "verdict {}, {} candidates rejected by forward check",
                    set.verdict.kind.as_str(),
                    set.rejected
                ),
            }),
            Err(e) => Err(FailureRecord {
                kind: "solver-error".into(),
                point: point_strings(&w),
                residual: None,
                detail: e.to_string(),
            }),
        }
    });

    let mut report = AuditReport::for_bundle(bundle);
    report.seed = cfg.seed;
    report.samples_tested = outcomes.len();
    for o in outcomes {
        match o {
            Ok(()) => report.samples_with_witness += 1,
            Err(f) => report.failures.push(f),
        }
    }
    report.finish(started)
}

/// Every probe must lie in `Z` and classify as exactly empty.
pub fn audit_z_avoidance(bundle: &ConstructionBundle, probes: &[Vec<Q>]) -> Result<AuditReport, VerifyError> {
    let started = Instant::now();
    for (index, p) in probes.iter().enumerate() {
        if !membership_in_z(bundle, p)? {
            return Err(VerifyError::ProbeNotInZ { index });
        }
    }
    let mut report = AuditReport::for_bundle(bundle);
    for p in probes {
        report.z_probes_tested += 1;
        let verdict = classify(bundle, &Target::Rational(p.clone()))?;
        if verdict.is_exact_empty() {
            report.z_probes_empty += 1;
        } else {
            report.failures.push(FailureRecord {
                kind: "not-empty".into(),
                point: point_strings(p),
                residual: Some(residual_text(&verdict.residual)),
                detail: format!("verdict {}", verdict.kind.as_str()),
            });
        }
    }
    Ok(report.finish(started))
}

/// Recomputes the degree and checks it against the family's bound; for
/// collinear point-complement maps and the many-points example the degree
/// must hit the bound exactly.
pub fn audit_degree(bundle: &ConstructionBundle) -> AuditReport {
    let started = Instant::now();
    let mut report = AuditReport::for_bundle(bundle);
    let observed = bundle.full_map.degree().finite().unwrap_or(0);
    report.degree_observed = observed;
    let mut fail = |detail: String| {
        report.failures.push(FailureRecord {
            kind: "degree".into(),
            point: Vec::new(),
            residual: None,
            detail,
        })
    };
    if observed != bundle.degree {
        fail(format!("stored degree {} but map has degree {observed}", bundle.degree));
    }
    if observed > bundle.degree_bound {
        fail(format!("degree {observed} exceeds bound {}", bundle.degree_bound));
    }
    let exact = match bundle.family {
        Family::PropSigma if bundle.collinear == Some(true) => Some(bundle.l() as u32 + 2),
        Family::ExampleManyPoints => Some(bundle.degree_bound),
        _ => None,
    };
    if let Some(want) = exact {
        if observed != want {
            fail(format!("degree {observed} should equal {want}"));
        }
    }
    report.finish(started)
}

/// Probes the toolkit can generate on its own: the points of `F` for the
/// point-complement family, the enumerated complement for the many-points
/// example, and `F x {0}` when the all-zero tail lies in `W`.
pub fn default_probes(bundle: &ConstructionBundle) -> Vec<Vec<Q>> {
    let n = bundle.n();
    match bundle.family {
        Family::PropSigma => bundle.z_source.points().to_vec(),
        Family::ExampleManyPoints => {
            let d = bundle.degree_bound as usize;
            build_many_points_example(n, d).map(|(_, pts)| pts).unwrap_or_default()
        }
        _ => bundle
            .z_source
            .points()
            .iter()
            .map(|p| {
                let mut w = p.clone();
                w.resize(n, Q::zero());
                w
            })
            .filter(|w| membership_in_z(bundle, w).unwrap_or(false))
            .collect(),
    }
}

/// Points `(t^3 - t, t^2 - 1)` on the nodal cubic `w3^2 = w4^3 + w4^2`.
pub fn nodal_cubic_points(ts: impl IntoIterator<Item = i64>) -> Vec<(Q, Q)> {
    ts.into_iter()
        .map(|t| {
            let t = qi(t);
            (&t * &t * &t - &t, &t * &t - qi(1))
        })
        .collect()
}

/// Runs all three audits.
pub fn audit_bundle(bundle: &ConstructionBundle, cfg: &SampleConfig, probes: &[Vec<Q>]) -> Result<AuditReport, VerifyError> {
    let degree = audit_degree(bundle);
    let z = audit_z_avoidance(bundle, probes)?;
    let sampled = audit_surjectivity(bundle, cfg);
    Ok(degree.merge(z).merge(sampled))
}

/// The classical map onto the plane minus `(0, -1)`:
/// `(z1 (z1 z2 + 1) - z2, z1 z2)`.
pub fn jelonek_map() -> PolyMap {
    let z1 = MultiPoly::var(2, 0);
    let z2 = MultiPoly::var(2, 1);
    let one = MultiPoly::one(2);
    let z1z2 = &z1 * &z2;
    PolyMap::new(vec![&z1 * &(&z1z2 + &one) - z2, z1z2]).expect("two components in two variables")
}

/// Residual equation in `z1` for Jelonek's map at a rational target.
///
/// Using `z1 z2 = w2` in the first equation gives `z2 = (w2 + 1) z1 - w1`;
/// substituting that into `z1 z2 - w2` leaves `(w2 + 1) z1^2 - w1 z1 - w2`.
pub fn jelonek_residual(w: &[Q]) -> MultiPoly {
    let n = 2;
    let z1 = MultiPoly::var(n, 0);
    let z2_of_z1 = z1.scale(&(&w[1] + qi(1))) - MultiPoly::constant(n, w[0].clone());
    let second = jelonek_map().component(1).clone() - MultiPoly::constant(n, w[1].clone());
    second
        .substitute(&[z1, z2_of_z1])
        .expect("two images for two variables")
}

/// Witnesses for Jelonek's map; empty when the residual is a nonzero constant.
pub fn jelonek_preimage(w: &[Q], tol: f64) -> Result<(MultiPoly, Vec<Vec<num_complex::Complex64>>), SolveError> {
    use num_complex::Complex64;
    let residual = jelonek_residual(w);
    if residual.as_constant().is_some() && !residual.is_zero() {
        return Ok((residual, Vec::new()));
    }
    let coeffs = residual.univariate_coeffs(0).expect("residual is univariate in z1");
    let roots = find_all_roots(&UniPolyC::from_rationals(&coeffs), crate::roots::DEFAULT_TOL, crate::roots::DEFAULT_MAX_ITER)?;
    let map = jelonek_map();
    let target: Vec<Complex64> = w.iter().map(|x| Complex64::new(crate::algebra::q_to_f64(x), 0.0)).collect();
    let scale = Complex64::new(crate::algebra::q_to_f64(&(&w[1] + qi(1))), 0.0);
    let mut witnesses = Vec::new();
    for z1 in roots.roots {
        let z = vec![z1, scale * z1 - target[0]];
        let img = map.eval_complex(&z)?;
        let err = img.iter().zip(&target).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if err <= tol {
            witnesses.push(z);
        }
    }
    Ok((residual, witnesses))
}

/// End-to-end check of Jelonek's map: `(0, -1)` is exactly empty, grid samples
/// elsewhere have witnesses, and the degree is 3.
pub fn jelonek_fixture(cfg: &SampleConfig) -> AuditReport {
    let started = Instant::now();
    let map = jelonek_map();
    let degree = map.degree().finite().unwrap_or(0);
    let summary = BundleSummary {
        family: "jelonek".into(),
        n: 2,
        l: 1,
        m: 0,
        d: 0,
        degree,
    };
    let mut report = AuditReport::blank(summary, degree, 3);
    report.seed = cfg.seed;

    let hole = vec![qi(0), qi(-1)];
    report.z_probes_tested = 1;
    let residual = jelonek_residual(&hole);
    if residual.as_constant().is_some_and(|c| !c.is_zero()) {
        report.z_probes_empty = 1;
    } else {
        report.failures.push(FailureRecord {
            kind: "not-empty".into(),
            point: point_strings(&hole),
            residual: Some(format_poly(&residual, 'z')),
            detail: "residual is not a nonzero constant".into(),
        });
    }

    let outcomes = run_indexed(cfg.samples, cfg.execution, |i| {
        let mut rng = sample_rng(cfg.seed, i);
        let mut w = draw_point(&mut rng, 2, cfg.grid);
        while w == hole {
            w = draw_point(&mut rng, 2, cfg.grid);
        }
        match jelonek_preimage(&w, cfg.tol) {
            Ok((_, ws)) if !ws.is_empty() => Ok(()),
            Ok((res, _)) => Err(FailureRecord {
                kind: "no-witness".into(),
                point: point_strings(&w),
                residual: Some(format_poly(&res, 'z')),
                detail: "no candidate passed the forward check".into(),
            }),
            Err(e) => Err(FailureRecord {
                kind: "solver-error".into(),
                point: point_strings(&w),
                residual: None,
                detail: e.to_string(),
            }),
        }
    });
    report.samples_tested = outcomes.len();
    for o in outcomes {
        match o {
            Ok(()) => report.samples_with_witness += 1,
            Err(f) => report.failures.push(f),
        }
    }
    if degree != 3 {
        report.failures.push(FailureRecord {
            kind: "degree".into(),
            point: Vec::new(),
            residual: None,
            detail: format!("degree {degree}, expected 3"),
        });
    }
    report.finish(started)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_sigma, build_theorem_map, ZSpec};
    use crate::text::parse_poly;

    fn pt(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| qi(x)).collect()
    }

    fn example() -> ConstructionBundle {
        let nodal = parse_poly("z3^2 - z4^3 - z4^2", 4).unwrap();
        build_theorem_map(&ZSpec::new(4, vec![pt(&[1, 0]), pt(&[-1, 0])], vec![nodal]).unwrap()).unwrap()
    }

    fn nodal_probes() -> Vec<Vec<Q>> {
        let mut out = Vec::new();
        for b in [1, -1] {
            for (x, y) in nodal_cubic_points([0, 1, -1, 2, -2, 3]) {
                out.push(vec![qi(b), qi(0), x, y]);
            }
        }
        out
    }

    #[test]
    fn example_surjectivity_sampling() {
        let cfg = SampleConfig {
            samples: 200,
            ..Default::default()
        };
        let r = audit_surjectivity(&example(), &cfg);
        assert_eq!(r.samples_with_witness, 200, "{}", r.summary());
        assert!(r.pass);
    }

    #[test]
    fn identity_bundle_sampling() {
        let b = build_theorem_map(&ZSpec::new(3, vec![], vec![]).unwrap()).unwrap();
        let r = audit_surjectivity(&b, &SampleConfig { samples: 20, ..Default::default() });
        assert_eq!(r.samples_with_witness, 20);
    }

    #[test]
    fn example_z_probes_are_empty() {
        let r = audit_z_avoidance(&example(), &nodal_probes()).unwrap();
        assert_eq!(r.z_probes_tested, 12);
        assert_eq!(r.z_probes_empty, 12);
        assert!(r.pass);
    }

    #[test]
    fn probe_outside_z_is_rejected() {
        let err = audit_z_avoidance(&example(), &[pt(&[1, 0, 3, 2])]).unwrap_err();
        assert!(matches!(err, VerifyError::ProbeNotInZ { index: 0 }));
    }

    #[test]
    fn sigma_probes_and_degree() {
        let pts: Vec<Vec<Q>> = (0..4).map(|k| pt(&[k, 2 * k, -k])).collect();
        let b = build_sigma(&ZSpec::new(3, pts.clone(), vec![]).unwrap()).unwrap();
        let r = audit_z_avoidance(&b, &default_probes(&b)).unwrap();
        assert_eq!(r.z_probes_empty, 4);
        let d = audit_degree(&b);
        assert_eq!(d.degree_observed, 6);
        assert!(d.pass);
    }

    #[test]
    fn many_points_probes() {
        let (b, pts) = build_many_points_example(3, 4).unwrap();
        assert_eq!(default_probes(&b), pts);
        let r = audit_z_avoidance(&b, &pts).unwrap();
        assert_eq!((r.z_probes_tested, r.z_probes_empty), (4, 4));
        assert_eq!(audit_degree(&b).degree_observed, 4);
    }

    #[test]
    fn example_degree_bound() {
        let r = audit_degree(&example());
        assert_eq!((r.degree_observed, r.degree_bound), (5, 5));
        assert!(r.pass);
    }

    #[test]
    fn jelonek_reduction() {
        let w = pt(&[3, 5]);
        let res = jelonek_residual(&w);
        let expected = parse_poly("6*z1^2 - 3*z1 - 5", 2).unwrap();
        assert_eq!(res, expected);
        assert_eq!(jelonek_residual(&pt(&[0, -1])), MultiPoly::one(2));
        let (_, ws) = jelonek_preimage(&pt(&[0, 0]), 1e-8).unwrap();
        assert!(ws.iter().any(|z| z.iter().all(|c| c.norm() < 1e-12)));
    }

    #[test]
    fn jelonek_fixture_passes() {
        let r = jelonek_fixture(&SampleConfig::default());
        assert!(r.pass, "{}", r.summary());
        assert_eq!(r.degree_observed, 3);
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let b = example();
        let par = SampleConfig { samples: 50, execution: Execution::Parallel, ..Default::default() };
        let seq = SampleConfig { execution: Execution::Sequential, ..par };
        assert_eq!(audit_surjectivity(&b, &par).to_json(), audit_surjectivity(&b, &seq).to_json());
    }
}
