//! Convex building blocks with exact smooth+box subdifferentials.

use std::sync::Arc;

use rand::Rng;

use crate::algebra::probe_points;
use crate::error::{InvexError, Result};
use crate::model::{
    function::{EvalFn, SubdiffFn},
    AlphaRule, BoxRegion, Certificates, Certification, DomainKind, DomainSpec, FunctionObject,
    KernelFn, Provenance, SubgradientSet, KINK_TOL,
};

/// Pairs drawn for the sampled midpoint convexity/concavity certificate.
pub const MIDPOINT_PAIRS: usize = 10_000;
/// Relative slack of the sampled midpoint inequality.
pub const MIDPOINT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexAtomSpec {
    /// `|x - shift| + offset` on R.
    Abs { shift: f64, offset: f64 },
    /// `x^2` on R.
    Square,
    /// `|x|^2` on R^n.
    SquaredNorm { dim: usize },
    /// `a x + b` with `a > 0`, on the half-line where it is positive.
    AffinePositive { a: f64, b: f64 },
    /// `<c, x> + d` on R^n.
    Affine { coeffs: Vec<f64>, offset: f64 },
    /// `|x|_1` on R^n.
    Norm1 { dim: usize },
    /// `sum_i |x_i - s_i|` on R^n.
    SumAbsShifted { shifts: Vec<f64> },
    /// `e^x` on R.
    Exp,
}

fn abs_subgradient(d: f64) -> (f64, f64, f64) {
    if d.abs() <= KINK_TOL {
        (0.0, -1.0, 1.0)
    } else {
        (d.signum(), 0.0, 0.0)
    }
}

fn sum_abs(shifts: Vec<f64>) -> (Arc<EvalFn>, Arc<SubdiffFn>) {
    let s1 = shifts.clone();
    let eval = Arc::new(move |x: &[f64]| x.iter().zip(&s1).map(|(v, s)| (v - s).abs()).sum());
    let subdiff = Arc::new(move |x: &[f64]| {
        let n = x.len();
        let (mut sm, mut lo, mut hi) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for i in 0..n {
            (sm[i], lo[i], hi[i]) = abs_subgradient(x[i] - shifts[i]);
        }
        SubgradientSet::with_box(sm, lo, hi)
    });
    (eval, subdiff)
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

/// Build a convex atom. Its kernel is `y - x` and it is certified convex by construction.
pub fn make_convex_atom(spec: ConvexAtomSpec) -> Result<FunctionObject> {
    let mut concave = false;
    let (signature, domain, kinks, eval, subdiff): (
        String,
        DomainSpec,
        Vec<Vec<f64>>,
        Arc<EvalFn>,
        Arc<SubdiffFn>,
    ) = match spec {
        ConvexAtomSpec::Abs { shift, offset } => {
            if !shift.is_finite() || !offset.is_finite() {
                return Err(InvexError::InvalidSpec(
                    "abs parameters must be finite".into(),
                ));
            }
            (
                format!("abs[shift={shift},offset={offset}]"),
                DomainSpec::all_space(1),
                vec![vec![shift]],
                Arc::new(move |x: &[f64]| (x[0] - shift).abs() + offset),
                Arc::new(move |x: &[f64]| {
                    let (s, l, h) = abs_subgradient(x[0] - shift);
                    SubgradientSet::with_box(vec![s], vec![l], vec![h])
                }),
            )
        }
        ConvexAtomSpec::Square => (
            "square".to_string(),
            DomainSpec::all_space(1),
            vec![vec![]],
            Arc::new(|x: &[f64]| x[0] * x[0]),
            Arc::new(|x: &[f64]| SubgradientSet::singleton(vec![2.0 * x[0]])),
        ),
        ConvexAtomSpec::SquaredNorm { dim } => {
            if dim == 0 {
                return Err(InvexError::InvalidSpec("dimension must be positive".into()));
            }
            (
                format!("sqnorm[n={dim}]"),
                DomainSpec::all_space(dim),
                vec![vec![]; dim],
                Arc::new(|x: &[f64]| x.iter().map(|v| v * v).sum()),
                Arc::new(|x: &[f64]| {
                    SubgradientSet::singleton(x.iter().map(|v| 2.0 * v).collect())
                }),
            )
        }
        ConvexAtomSpec::AffinePositive { a, b } => {
            if !(a > 0.0 && a.is_finite() && b.is_finite()) {
                return Err(InvexError::InvalidSpec(
                    "affine_pos needs a finite a > 0 and finite b".into(),
                ));
            }
            concave = true;
            let threshold = -b / a;
            let domain = DomainSpec::new(
                DomainKind::HalfLine {
                    threshold,
                    strict: true,
                },
                BoxRegion::cube(1, threshold + 0.05, threshold + 10.0)?,
            )?;
            (
                format!("affine_pos[a={a},b={b}]"),
                domain,
                vec![vec![]],
                Arc::new(move |x: &[f64]| a * x[0] + b),
                Arc::new(move |_: &[f64]| SubgradientSet::singleton(vec![a])),
            )
        }
        ConvexAtomSpec::Affine { coeffs, offset } => {
            if coeffs.is_empty() || coeffs.iter().chain([&offset]).any(|v| !v.is_finite()) {
                return Err(InvexError::InvalidSpec(
                    "affine needs finite coefficients".into(),
                ));
            }
            concave = true;
            let n = coeffs.len();
            let c1 = coeffs.clone();
            let c2 = coeffs.clone();
            (
                format!("affine[c=({}),d={offset}]", fmt_list(&coeffs)),
                DomainSpec::all_space(n),
                vec![vec![]; n],
                Arc::new(move |x: &[f64]| {
                    x.iter().zip(&c1).map(|(v, c)| v * c).sum::<f64>() + offset
                }),
                Arc::new(move |_: &[f64]| SubgradientSet::singleton(c2.clone())),
            )
        }
        ConvexAtomSpec::Norm1 { dim } => {
            if dim == 0 {
                return Err(InvexError::InvalidSpec("dimension must be positive".into()));
            }
            let (eval, subdiff) = sum_abs(vec![0.0; dim]);
            (
                format!("norm1[n={dim}]"),
                DomainSpec::all_space(dim),
                vec![vec![0.0]; dim],
                eval,
                subdiff,
            )
        }
        ConvexAtomSpec::SumAbsShifted { shifts } => {
            if shifts.is_empty() || shifts.iter().any(|v| !v.is_finite()) {
                return Err(InvexError::InvalidSpec(
                    "shifts must be finite and nonempty".into(),
                ));
            }
            let n = shifts.len();
            let kinks = shifts.iter().map(|s| vec![*s]).collect();
            let signature = format!("sum_abs[s=({})]", fmt_list(&shifts));
            let (eval, subdiff) = sum_abs(shifts);
            (signature, DomainSpec::all_space(n), kinks, eval, subdiff)
        }
        ConvexAtomSpec::Exp => (
            "exp".to_string(),
            DomainSpec::all_space(1),
            vec![vec![]],
            Arc::new(|x: &[f64]| x[0].exp()),
            Arc::new(|x: &[f64]| SubgradientSet::singleton(vec![x[0].exp()])),
        ),
    };
    let certificates = Certificates {
        convex: Some(Certification::ByConstruction),
        concave: concave.then_some(Certification::ByConstruction),
        invex: Some(Certification::ByConstruction),
    };
    Ok(FunctionObject::assemble(
        signature,
        domain,
        kinks,
        eval,
        subdiff,
        Provenance::ConvexAtom,
    )
    .with_kernel(KernelFn::scaled(AlphaRule::unit()), Provenance::ConvexAtom)
    .with_certificates(certificates))
}

fn midpoint_gap(f: &FunctionObject, sign: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let region = f.sample_region();
    let mut rng = crate::analysis::sampler::rng(42);
    let mut pts = probe_points(f, 64);
    while pts.len() < 2 * MIDPOINT_PAIRS {
        pts.push(
            (0..f.dim())
                .map(|i| rng.random_range(region.lo()[i]..=region.hi()[i]))
                .collect(),
        );
    }
    for pair in pts.chunks_exact(2).take(MIDPOINT_PAIRS) {
        let (a, b) = (&pair[0], &pair[1]);
        let mid: Vec<f64> = a.iter().zip(b).map(|(u, v)| 0.5 * (u + v)).collect();
        let (fa, fb, fm) = (
            sign * f.eval_unchecked(a),
            sign * f.eval_unchecked(b),
            sign * f.eval_unchecked(&mid),
        );
        let slack = MIDPOINT_TOL * (1.0 + fa.abs() + fb.abs());
        if fm > 0.5 * (fa + fb) + slack {
            return Some((a.clone(), b.clone()));
        }
    }
    None
}

/// Attach a sampled convexity certificate to user-supplied rules.
pub fn certify_convex_sampled(f: &FunctionObject) -> Result<FunctionObject> {
    if let Some((a, b)) = midpoint_gap(f, 1.0) {
        return Err(InvexError::InvalidSpec(format!(
            "midpoint convexity fails between {a:?} and {b:?}"
        )));
    }
    let mut certs = f.certificates().clone();
    certs.convex.get_or_insert(Certification::Sampled);
    let mut out = f.clone().with_certificates(certs);
    if out.kernel().is_none() {
        out = out.with_kernel(KernelFn::scaled(AlphaRule::unit()), Provenance::Declared);
    }
    Ok(out)
}

/// Attach a sampled concavity certificate to user-supplied rules.
pub fn certify_concave_sampled(f: &FunctionObject) -> Result<FunctionObject> {
    if let Some((a, b)) = midpoint_gap(f, -1.0) {
        return Err(InvexError::InvalidSpec(format!(
            "midpoint concavity fails between {a:?} and {b:?}"
        )));
    }
    let mut certs = f.certificates().clone();
    certs.concave.get_or_insert(Certification::Sampled);
    Ok(f.clone().with_certificates(certs))
}

/// Shorthand for `|x - shift|`.
pub fn abs_atom(shift: f64) -> FunctionObject {
    make_convex_atom(ConvexAtomSpec::Abs { shift, offset: 0.0 }).expect("finite shift")
}

/// Shorthand for the identity `x` on `x > 0`.
pub fn identity_positive() -> FunctionObject {
    make_convex_atom(ConvexAtomSpec::AffinePositive { a: 1.0, b: 0.0 }).expect("valid atom")
}
