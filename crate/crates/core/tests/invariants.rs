//! Structural invariants of kernels, subgradient sets, certificates and solvers.

use rand::Rng;

use invexkit::algebra::{
    abs_atom, concave_composite, fractional, identity_positive, log_compose, make_convex_atom,
    power_compose, ratio_compose, weighted_sum, ConvexAtomSpec, ScalarConcaveSpec,
};
use invexkit::analysis::sampler::{rng, PointSampler};
use invexkit::analysis::{check_pseudoconvex_structural, SamplerConfig};
use invexkit::cli::CATALOG;
use invexkit::solve::{projected_descent_box, subgradient_descent, DescentConfig, StepRule};
use invexkit::{BoxRegion, InvexError, KernelFn, SubgradientSet, Vector};

#[test]
fn kernels_vanish_exactly_on_the_diagonal() {
    let cfg = SamplerConfig::default().with_pairs(1_000);
    for e in &CATALOG {
        let f = e.build().unwrap();
        let k = f.kernel().unwrap();
        assert!(!matches!(k, KernelFn::Explicit(_)), "{}", e.id);
        let mut s = PointSampler::new(&f, &cfg).unwrap();
        for _ in 0..1_000 {
            let x = s.point();
            let eta = k.eval(&x, &x).unwrap();
            assert!(
                eta.iter().all(|v| *v == 0.0),
                "{}: eta(x, x) = {eta:?} at {x:?}",
                e.id
            );
        }
    }
}

#[test]
fn extreme_points_span_the_coordinate_ranges() {
    let mut r = rng(7);
    for _ in 0..500 {
        let n = r.random_range(1..=2);
        let smooth: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        let lo: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..0.0)).collect();
        let hi: Vec<f64> = (0..n)
            .map(|i| {
                if r.random_bool(0.3) {
                    lo[i]
                } else {
                    r.random_range(0.0..1.0)
                }
            })
            .collect();
        let s = SubgradientSet::new(smooth, lo, hi).unwrap();
        let pts = s.extreme_points().unwrap();
        assert_eq!(pts.len(), 1 << s.nondegenerate());
        for i in 0..n {
            let (a, b) = s.coordinate_range(i);
            let min = pts.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min);
            let max = pts.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max);
            assert_eq!((min, max), (a, b));
        }
        assert!(pts.iter().all(|p| s.contains(p, 0.0)));
    }
}

#[test]
fn weighted_sums_need_one_shared_kernel() {
    let fx = fractional(&abs_atom(1.0), &identity_positive()).unwrap();
    let lx = log_compose(&identity_positive()).unwrap();
    let left = weighted_sum(&weighted_sum(&fx, &lx, 1.0, 1.0).unwrap(), &fx, 1.0, 1.0).unwrap();
    let right = weighted_sum(&fx, &weighted_sum(&lx, &fx, 1.0, 1.0).unwrap(), 1.0, 1.0).unwrap();
    assert_eq!(left.kernel().unwrap(), right.kernel().unwrap());
    for x in [0.3, 1.0, 4.0] {
        assert!((left.eval(&[x]).unwrap() - right.eval(&[x]).unwrap()).abs() < 1e-14);
    }
    let sq = make_convex_atom(ConvexAtomSpec::AffinePositive { a: 2.0, b: 1.0 }).unwrap();
    let pair = weighted_sum(&fx, &lx, 1.0, 1.0).unwrap();
    assert!(matches!(
        weighted_sum(&pair, &sq, 1.0, 1.0),
        Err(InvexError::KernelMismatch { .. })
    ));
}

#[test]
fn scaled_kernels_have_positive_alpha() {
    let shifted = make_convex_atom(ConvexAtomSpec::Abs {
        shift: 0.0,
        offset: 0.1,
    })
    .unwrap();
    let sqrt_phi =
        ScalarConcaveSpec::new("sqrt", |t| t.sqrt(), |t| 0.5 / t.sqrt(), 0.0, f64::INFINITY)
            .unwrap();
    let fs = [
        fractional(&abs_atom(1.0), &identity_positive()).unwrap(),
        concave_composite(&sqrt_phi, &shifted).unwrap(),
        log_compose(&shifted).unwrap(),
        power_compose(&shifted, 0.5).unwrap(),
        ratio_compose(&abs_atom(0.0), 1.0).unwrap(),
    ];
    for f in &fs {
        let cfg = SamplerConfig::default()
            .with_pairs(10_000)
            .with_region(f.sample_region().clone());
        let r = check_pseudoconvex_structural(f.kernel().unwrap(), &cfg).unwrap();
        assert!(
            r.passed && r.worst_violation < 0.0,
            "{}: {}",
            f.signature(),
            r.summary()
        );
    }
}

#[test]
fn descent_reaches_known_minima_of_one_dimensional_entries() {
    let cases: [(&str, f64, [f64; 4]); 5] = [
        ("abslog", 0.0, [0.1, 0.5, 3.0, 9.0]),
        ("fracx", 0.0, [0.1, 0.5, 3.0, 9.0]),
        ("fraclog", 1.0, [0.1, 0.5, 3.0, 9.0]),
        ("pert2", -6.0, [-10.0, -3.0, 2.0, 8.0]),
        ("tangentDemo", 0.0, [-1.0, -0.5, 0.3, 1.0]),
    ];
    for (id, f_star, starts) in cases {
        let f = CATALOG
            .iter()
            .find(|e| e.id == id)
            .unwrap()
            .build()
            .unwrap();
        let cfg = DescentConfig::new(StepRule::Polyak { f_star }).with_max_iter(100_000);
        for x0 in starts {
            let t = subgradient_descent(&f, &Vector::from_slice(&[x0]).unwrap(), &cfg).unwrap();
            assert!(
                t.final_value() <= f_star + 1e-6 && t.len() <= 100_001,
                "{id} from {x0}: f = {} after {} steps",
                t.final_value(),
                t.len() - 1
            );
        }
    }
}

#[test]
fn projected_iterates_stay_in_box_and_domain() {
    let fx = fractional(&abs_atom(1.0), &identity_positive()).unwrap();
    let bounds = BoxRegion::cube(1, 0.01, 0.5).unwrap();
    let cfg = DescentConfig::new(StepRule::Constant { s: 0.7 }).with_max_iter(500);
    for x0 in [0.02, 0.2, 0.49] {
        let t =
            projected_descent_box(&fx, &bounds, &Vector::from_slice(&[x0]).unwrap(), &cfg).unwrap();
        assert!(t
            .iterates
            .iter()
            .all(|x| bounds.contains(x) && fx.domain().contains(x)));
        assert!((t.final_point()[0] - 0.5).abs() < 1e-12);
    }
}
