//! Property tests over constructed functions, kernels, least-norm
//! subgradients and check reproducibility.

use approx::assert_relative_eq;
use nalgebra::DMatrix;
use proptest::prelude::*;

use invexkit::algebra::{
    abs_atom, compose_transform, concave_composite, fractional, identity_positive, log_compose,
    make_convex_atom, power_compose, ratio_compose, separable_sum, weighted_sum, ConvexAtomSpec,
    ScalarConcaveSpec, Transform,
};
use invexkit::analysis::{check_invexity, check_quasiconvex, min_norm_subgradient, SamplerConfig};
use invexkit::cli::CATALOG;
use invexkit::{DomainSpec, FunctionObject, SubgradientSet};

fn rotation() -> Transform {
    let (c, s) = (0.6, 0.8);
    Transform::new(
        "rot",
        DomainSpec::all_space(2),
        move |x| vec![c * x[0] - s * x[1], s * x[0] + c * x[1]],
        move |_| DMatrix::from_row_slice(2, 2, &[c, -s, s, c]),
        move |_| DMatrix::from_row_slice(2, 2, &[c, s, -s, c]),
    )
}

fn constructions() -> Vec<FunctionObject> {
    let sq = make_convex_atom(ConvexAtomSpec::Square).unwrap();
    let sqn = make_convex_atom(ConvexAtomSpec::SquaredNorm { dim: 2 }).unwrap();
    let shifted = make_convex_atom(ConvexAtomSpec::Abs {
        shift: 0.5,
        offset: 0.2,
    })
    .unwrap();
    let exp = make_convex_atom(ConvexAtomSpec::Exp).unwrap();
    let sqrt_phi =
        ScalarConcaveSpec::new("sqrt", |t| t.sqrt(), |t| 0.5 / t.sqrt(), 0.0, f64::INFINITY)
            .unwrap();
    let mut out: Vec<FunctionObject> = CATALOG.iter().map(|e| e.build().unwrap()).collect();
    out.extend([
        compose_transform(&sqn, &rotation()).unwrap(),
        concave_composite(&sqrt_phi, &shifted).unwrap(),
        power_compose(&shifted, 0.3).unwrap(),
        ratio_compose(&sq, 2.0).unwrap(),
        log_compose(&exp).unwrap(),
        fractional(&sq, &identity_positive()).unwrap(),
        separable_sum(&[
            log_compose(&shifted).unwrap(),
            power_compose(&shifted, 0.7).unwrap(),
        ])
        .unwrap(),
        weighted_sum(&sq, &abs_atom(1.0), 0.25, 3.0).unwrap(),
    ]);
    out
}

#[test]
fn every_construction_passes_invexity() {
    let cfg = SamplerConfig::default().with_pairs(20_000);
    for f in constructions() {
        let r = check_invexity(&f, &cfg, 1e-9).unwrap();
        assert!(r.passed, "{}: {}", f.signature(), r.summary());
    }
}

fn eta(id: &str, x: &[f64], y: &[f64]) -> Vec<f64> {
    let entry = CATALOG.iter().find(|e| e.id == id).unwrap();
    entry.build().unwrap().kernel().unwrap().eval(x, y).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fraction_kernel_closed_form(x in 0.05f64..10.0, y in 0.05f64..10.0) {
        assert_relative_eq!(eta("fracx", &[x], &[y])[0], x / y * (y - x), max_relative = 1e-12, epsilon = 1e-14);
        assert_relative_eq!(eta("fraclog", &[x], &[y])[0], x / y * (y - x), max_relative = 1e-12, epsilon = 1e-14);
    }

    #[test]
    fn abslog_kernel_closed_form(x in 0.05f64..10.0, y in 0.05f64..10.0) {
        assert_relative_eq!(eta("abslog", &[x], &[y])[0], x * (y / x).ln(), max_relative = 1e-12, epsilon = 1e-14);
    }

    #[test]
    fn regularizer_kernels_closed_form(x in prop::array::uniform2(-5.0f64..5.0), y in prop::array::uniform2(-5.0f64..5.0)) {
        let lr = eta("logreg", &x, &y);
        let pr = eta("powreg", &x, &y);
        let rr = eta("ratioreg", &x, &y);
        for i in 0..2 {
            let d = y[i] - x[i];
            let (ax, ay) = (x[i].abs(), y[i].abs());
            assert_relative_eq!(lr[i], (1.0 + ax) / (1.0 + ay) * d, max_relative = 1e-12, epsilon = 1e-14);
            assert_relative_eq!(pr[i], ((ay + 0.1) / (ax + 0.1)).powf(-0.5) * d, max_relative = 1e-12, epsilon = 1e-14);
            assert_relative_eq!(rr[i], ((ax + 1.0) / (ay + 1.0)).powi(2) * d, max_relative = 1e-12, epsilon = 1e-14);
        }
    }

    #[test]
    fn least_norm_element_is_optimal(
        parts in prop::collection::vec((-3.0f64..3.0, -2.0f64..2.0, 0.0f64..3.0), 1..6),
        probes in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 6), 50),
    ) {
        let smooth: Vec<f64> = parts.iter().map(|p| p.0).collect();
        let lo: Vec<f64> = parts.iter().map(|p| p.1).collect();
        let hi: Vec<f64> = parts.iter().map(|p| p.1 + p.2).collect();
        let s = SubgradientSet::new(smooth.clone(), lo.clone(), hi.clone()).unwrap();
        let z = min_norm_subgradient(&s);
        let zn: f64 = z.iter().map(|a| a * a).sum::<f64>();
        prop_assert!(s.contains(&z, 1e-12));
        for t in &probes {
            let w: Vec<f64> = (0..smooth.len()).map(|i| smooth[i] + lo[i] + t[i] * (hi[i] - lo[i])).collect();
            let wn: f64 = w.iter().map(|a| a * a).sum();
            prop_assert!(zn <= wn + 1e-12);
            let vi: f64 = z.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() - zn;
            prop_assert!(vi >= -1e-12);
        }
    }

    #[test]
    fn checks_are_reproducible(seed in 0u64..1_000) {
        let f = CATALOG.iter().find(|e| e.id == "logreg").unwrap().build().unwrap();
        let cfg = SamplerConfig::default().with_pairs(500).with_seed(seed);
        prop_assert_eq!(check_quasiconvex(&f, &cfg).unwrap(), check_quasiconvex(&f, &cfg).unwrap());
        prop_assert_eq!(check_invexity(&f, &cfg, 1e-9).unwrap(), check_invexity(&f, &cfg, 1e-9).unwrap());
    }
}
