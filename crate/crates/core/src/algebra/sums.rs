//! Separable sums and nonnegative combinations.

use std::sync::Arc;

use crate::algebra::compose::merged_kinks;
use crate::error::{InvexError, Result};
use crate::model::{
    Certificates, Certification, DomainSpec, FunctionObject, KernelFn, Provenance, SubgradientSet,
};

/// `f(x) = sum_i f_i(x_i)` with the componentwise kernel `[eta_i(x_i, y_i)]`.
pub fn separable_sum(parts: &[FunctionObject]) -> Result<FunctionObject> {
    if parts.is_empty() {
        return Err(InvexError::InvalidSpec("separable sum of no parts".into()));
    }
    let mut kernels = Vec::with_capacity(parts.len());
    for p in parts {
        if p.dim() != 1 {
            return Err(InvexError::DimMismatch {
                expected: 1,
                got: p.dim(),
            });
        }
        kernels.push(
            p.kernel()
                .cloned()
                .ok_or_else(|| InvexError::MissingKernel(p.signature().to_string()))?,
        );
    }
    if parts.len() == 1 {
        return Ok(parts[0].clone());
    }
    let domains: Vec<&DomainSpec> = parts.iter().map(FunctionObject::domain).collect();
    let domain = DomainSpec::product(&domains)?;
    let bodies: Vec<_> = parts.iter().map(|p| Arc::clone(p.body())).collect();
    let kinks = parts.iter().map(|p| p.kinks()[0].clone()).collect();
    let eval = {
        let bodies = bodies.clone();
        Arc::new(move |x: &[f64]| {
            bodies
                .iter()
                .enumerate()
                .map(|(i, b)| b.eval_unchecked(&x[i..i + 1]))
                .sum()
        })
    };
    let subdiff = Arc::new(move |x: &[f64]| {
        let pieces: Vec<SubgradientSet> = bodies
            .iter()
            .enumerate()
            .map(|(i, b)| b.subdiff_unchecked(&x[i..i + 1]))
            .collect();
        SubgradientSet::stack(&pieces)
    });
    let names: Vec<&str> = parts.iter().map(FunctionObject::signature).collect();
    let all = |pick: fn(&Certificates) -> bool| parts.iter().all(|p| pick(p.certificates()));
    let certificates = Certificates {
        convex: all(|c| c.convex.is_some()).then_some(Certification::ByConstruction),
        concave: all(|c| c.concave.is_some()).then_some(Certification::ByConstruction),
        invex: all(|c| c.invex.is_some()).then_some(Certification::ByConstruction),
    };
    Ok(FunctionObject::assemble(
        format!("sep[{}]", names.join(";")),
        domain,
        kinks,
        eval,
        subdiff,
        Provenance::SeparableSum,
    )
    .with_kernel(KernelFn::Componentwise(kernels), Provenance::SeparableSum)
    .with_certificates(certificates))
}

/// `a f + b g` for `a, b >= 0`, allowed only when both kernels are
/// descriptor-equal; the result carries that shared kernel.
pub fn weighted_sum(
    f: &FunctionObject,
    g: &FunctionObject,
    a: f64,
    b: f64,
) -> Result<FunctionObject> {
    if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
        return Err(InvexError::Param(format!(
            "weights ({a}, {b}) must be finite and nonnegative"
        )));
    }
    if f.dim() != g.dim() {
        return Err(InvexError::DimMismatch {
            expected: f.dim(),
            got: g.dim(),
        });
    }
    let describe = |h: &FunctionObject| {
        h.kernel()
            .map(KernelFn::describe)
            .unwrap_or_else(|| "<none>".to_string())
    };
    let kernel = match (f.kernel(), g.kernel()) {
        (Some(kf), Some(kg)) if kf == kg => kf.clone(),
        _ => {
            return Err(InvexError::KernelMismatch {
                left: describe(f),
                right: describe(g),
            })
        }
    };
    if a == 1.0 && b == 0.0 {
        return Ok(f.clone());
    }
    if a == 0.0 && b == 1.0 {
        return Ok(g.clone());
    }
    let domain = f.domain().narrower(g.domain())?;
    let (fb, gb) = (Arc::clone(f.body()), Arc::clone(g.body()));
    let eval = {
        let (fb, gb) = (Arc::clone(&fb), Arc::clone(&gb));
        Arc::new(move |x: &[f64]| a * fb.eval_unchecked(x) + b * gb.eval_unchecked(x))
    };
    let subdiff = Arc::new(move |x: &[f64]| {
        fb.subdiff_unchecked(x)
            .scale(a)
            .add(&gb.subdiff_unchecked(x).scale(b))
            .expect("equal dimensions")
    });
    let (cf, cg) = (f.certificates(), g.certificates());
    let both = |p: bool, q: bool| (p && q).then_some(Certification::ByConstruction);
    let certificates = Certificates {
        convex: both(cf.convex.is_some(), cg.convex.is_some()),
        concave: both(cf.concave.is_some(), cg.concave.is_some()),
        invex: both(cf.invex.is_some(), cg.invex.is_some()),
    };
    Ok(FunctionObject::assemble(
        format!("({a}*{} + {b}*{})", f.signature(), g.signature()),
        domain,
        merged_kinks(f, g),
        eval,
        subdiff,
        Provenance::WeightedSum,
    )
    .with_kernel(kernel, Provenance::WeightedSum)
    .with_certificates(certificates))
}
