//! Kernel descriptors `eta(x, y)` for the invexity inequality
//! `f(y) - f(x) >= <xi, eta(x, y)>` for every `xi` in the subdifferential at `x`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{InvexError, Result};
use crate::model::function::Body;
use crate::model::vector::{dot, Vector};

/// Below this subgradient norm the canonical kernel treats `x` as stationary.
pub const CANONICAL_STATIONARITY_TOL: f64 = 1e-10;

pub type PairScalarFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;
pub type PairVectorFn = dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync;
pub type PointMapFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
pub type MatrixFn = dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync;

/// A closure with a stable identity. Two rules are equal iff their ids are.
///
/// Ids are canonical strings that include every parameter, so equal ids mean
/// the same formula.
pub struct Rule<F: ?Sized> {
    id: String,
    f: Arc<F>,
}

impl<F: ?Sized> Clone for Rule<F> {
    fn clone(&self) -> Self {
        Rule {
            id: self.id.clone(),
            f: Arc::clone(&self.f),
        }
    }
}

impl<F: ?Sized> fmt::Debug for Rule<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rule({})", self.id)
    }
}

impl<F: ?Sized> PartialEq for Rule<F> {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl<F: ?Sized> Rule<F> {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn func(&self) -> &F {
        &self.f
    }
}

pub type AlphaRule = Rule<PairScalarFn>;

impl Rule<PairScalarFn> {
    pub fn alpha(
        id: impl Into<String>,
        f: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Rule {
            id: id.into(),
            f: Arc::new(f),
        }
    }

    /// `alpha == 1`, the kernel `y - x` of a convex function.
    pub fn unit() -> Self {
        Self::alpha("unit", |_, _| 1.0)
    }
}

impl Rule<PairVectorFn> {
    pub fn pair(
        id: impl Into<String>,
        f: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Rule {
            id: id.into(),
            f: Arc::new(f),
        }
    }
}

impl Rule<PointMapFn> {
    pub fn map(
        id: impl Into<String>,
        f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Rule {
            id: id.into(),
            f: Arc::new(f),
        }
    }
}

impl Rule<MatrixFn> {
    pub fn matrix(
        id: impl Into<String>,
        f: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        Rule {
            id: id.into(),
            f: Arc::new(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum CanonicalVariant {
    /// `(f(y) - f(x)) xi / |xi|^2`; valid for differentiable functions.
    Smooth,
    /// `-|f(y) - f(x)| xi / |xi|^2` with `xi` the least-norm subgradient.
    Nonsmooth,
}

#[derive(Clone)]
pub enum KernelFn {
    /// `alpha(x, y) * (y - x)`.
    ScaledDifference(AlphaRule),
    /// `[eta_i(x_i, y_i)]_i` built from one-dimensional kernels.
    Componentwise(Vec<KernelFn>),
    /// `(D Phi(x))^{-1} (Phi(y) - Phi(x))`.
    JacobianTransform {
        phi: Rule<PointMapFn>,
        jac_inv: Rule<MatrixFn>,
    },
    /// Case-defined kernel built from the least-norm subgradient of a function
    /// whose stationary points are all global minimizers.
    Canonical {
        function: Arc<Body>,
        variant: CanonicalVariant,
    },
    Explicit(Rule<PairVectorFn>),
}

impl fmt::Debug for KernelFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

impl PartialEq for KernelFn {
    fn eq(&self, other: &Self) -> bool {
        use KernelFn::*;
        match (self, other) {
            (ScaledDifference(a), ScaledDifference(b)) => a == b,
            (Componentwise(a), Componentwise(b)) => a == b,
            (
                JacobianTransform { phi, jac_inv },
                JacobianTransform {
                    phi: phi2,
                    jac_inv: jac_inv2,
                },
            ) => phi == phi2 && jac_inv == jac_inv2,
            (
                Canonical { function, variant },
                Canonical {
                    function: function2,
                    variant: variant2,
                },
            ) => variant == variant2 && function.signature() == function2.signature(),
            (Explicit(a), Explicit(b)) => a == b,
            _ => false,
        }
    }
}

impl KernelFn {
    pub fn scaled(alpha: AlphaRule) -> Self {
        KernelFn::ScaledDifference(alpha)
    }

    /// Canonical textual form; equal descriptors have equal descriptions.
    pub fn describe(&self) -> String {
        match self {
            KernelFn::ScaledDifference(a) => format!("scaled_difference[{}]", a.id()),
            KernelFn::Componentwise(parts) => {
                let inner: Vec<String> = parts.iter().map(|p| p.describe()).collect();
                format!("componentwise[{}]", inner.join(";"))
            }
            KernelFn::JacobianTransform { phi, jac_inv } => {
                format!("jacobian_transform[{};{}]", phi.id(), jac_inv.id())
            }
            KernelFn::Canonical { function, variant } => {
                format!("canonical[{:?};{}]", variant, function.signature())
            }
            KernelFn::Explicit(r) => format!("explicit[{}]", r.id()),
        }
    }

    /// Whether `eta(x, x) = 0` holds by construction.
    pub fn vanishes_on_diagonal(&self) -> bool {
        match self {
            KernelFn::Componentwise(parts) => parts.iter().all(KernelFn::vanishes_on_diagonal),
            KernelFn::Explicit(_) => false,
            _ => true,
        }
    }

    /// Evaluate `eta(x, y)` without any domain check.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        if x.len() != y.len() {
            return Err(InvexError::DimMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        match self {
            KernelFn::ScaledDifference(alpha) => {
                let a = (alpha.func())(x, y);
                if !a.is_finite() {
                    return Err(InvexError::Domain { point: y.to_vec() });
                }
                Ok(x.iter().zip(y).map(|(xi, yi)| a * (yi - xi)).collect())
            }
            KernelFn::Componentwise(parts) => {
                if parts.len() != x.len() {
                    return Err(InvexError::DimMismatch {
                        expected: parts.len(),
                        got: x.len(),
                    });
                }
                let mut out = Vec::with_capacity(x.len());
                for (i, part) in parts.iter().enumerate() {
                    let v = part.eval(&x[i..i + 1], &y[i..i + 1])?;
                    out.push(v[0]);
                }
                Ok(out)
            }
            KernelFn::JacobianTransform { phi, jac_inv } => {
                let px = (phi.func())(x);
                let py = (phi.func())(y);
                let m = (jac_inv.func())(x);
                if m.iter().any(|v| !v.is_finite()) {
                    return Err(InvexError::SingularJacobian { point: x.to_vec() });
                }
                let d = DVector::from_iterator(px.len(), py.iter().zip(&px).map(|(a, b)| a - b));
                let eta = m * d;
                if eta.iter().any(|v| !v.is_finite()) {
                    return Err(InvexError::Domain { point: y.to_vec() });
                }
                Ok(eta.iter().copied().collect())
            }
            KernelFn::Canonical { function, variant } => canonical_eval(function, *variant, x, y),
            KernelFn::Explicit(rule) => {
                let v = (rule.func())(x, y);
                if v.len() != x.len() {
                    return Err(InvexError::DimMismatch {
                        expected: x.len(),
                        got: v.len(),
                    });
                }
                if v.iter().any(|e| !e.is_finite()) {
                    return Err(InvexError::Domain { point: y.to_vec() });
                }
                Ok(v)
            }
        }
    }
}

fn canonical_eval(
    body: &Body,
    variant: CanonicalVariant,
    x: &[f64],
    y: &[f64],
) -> Result<Vec<f64>> {
    let xi = body.subdiff_unchecked(x).min_norm_element();
    let sq = dot(&xi, &xi);
    if sq.sqrt() <= CANONICAL_STATIONARITY_TOL {
        return Ok(vec![0.0; x.len()]);
    }
    let df = body.eval_unchecked(y) - body.eval_unchecked(x);
    if !df.is_finite() {
        return Err(InvexError::Domain { point: y.to_vec() });
    }
    let coef = match variant {
        CanonicalVariant::Smooth => df,
        CanonicalVariant::Nonsmooth => -df.abs(),
    } / sq;
    Ok(xi.iter().map(|v| coef * v).collect())
}

/// Evaluate a kernel at `(x, y)`. Canonical kernels also check that both
/// points lie in the owning function's domain.
pub fn kernel_eval(k: &KernelFn, x: &Vector, y: &Vector) -> Result<Vector> {
    if let KernelFn::Canonical { function, .. } = k {
        for p in [x, y] {
            if !function.domain().contains(p) {
                return Err(InvexError::Domain { point: p.to_vec() });
            }
        }
    }
    Vector::new(k.eval(x, y)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio_abs_plus_one() -> KernelFn {
        KernelFn::scaled(AlphaRule::alpha("ratio[abs1]", |x, y| {
            (1.0 + x[0].abs()) / (1.0 + y[0].abs())
        }))
    }

    #[test]
    fn scaled_difference_fraction_example() {
        let k = KernelFn::scaled(AlphaRule::alpha("x/y", |x, y| x[0] / y[0]));
        assert_eq!(k.eval(&[2.0], &[4.0]).unwrap(), vec![1.0]);
    }

    #[test]
    fn diagonal_is_zero() {
        let k = KernelFn::Componentwise(vec![
            ratio_abs_plus_one(),
            KernelFn::scaled(AlphaRule::unit()),
        ]);
        assert_eq!(k.eval(&[1.5, -2.0], &[1.5, -2.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn componentwise_log_regularizer_example() {
        let k = KernelFn::Componentwise(vec![ratio_abs_plus_one(), ratio_abs_plus_one()]);
        assert_eq!(k.eval(&[0.0, 0.0], &[3.0, 0.0]).unwrap(), vec![0.75, 0.0]);
    }

    #[test]
    fn descriptor_equality() {
        let a = KernelFn::scaled(AlphaRule::unit());
        let b = KernelFn::scaled(AlphaRule::unit());
        assert_eq!(a, b);
        assert_ne!(a, ratio_abs_plus_one());
        assert_ne!(
            KernelFn::Componentwise(vec![a.clone()]),
            KernelFn::Componentwise(vec![a.clone(), b])
        );
        let e = KernelFn::Explicit(Rule::pair("zero", |x, _| vec![0.0; x.len()]));
        assert_ne!(a, e);
        assert!(!e.vanishes_on_diagonal());
    }

    #[test]
    fn jacobian_transform_log() {
        let k = KernelFn::JacobianTransform {
            phi: Rule::map("log", |x| vec![x[0].ln()]),
            jac_inv: Rule::matrix("x", |x| DMatrix::from_element(1, 1, x[0])),
        };
        let eta = k.eval(&[1.0], &[std::f64::consts::E]).unwrap();
        assert!((eta[0] - 1.0).abs() < 1e-15);
        assert_eq!(k.eval(&[2.0], &[2.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn singular_jacobian_is_reported() {
        let k = KernelFn::JacobianTransform {
            phi: Rule::map("id", |x| x.to_vec()),
            jac_inv: Rule::matrix("inf", |_| DMatrix::from_element(1, 1, f64::INFINITY)),
        };
        assert!(matches!(
            k.eval(&[1.0], &[2.0]),
            Err(InvexError::SingularJacobian { .. })
        ));
    }

    #[test]
    fn non_finite_alpha_is_a_domain_error() {
        let k = KernelFn::scaled(AlphaRule::alpha("x/y", |x, y| x[0] / y[0]));
        assert!(matches!(
            k.eval(&[1.0], &[0.0]),
            Err(InvexError::Domain { .. })
        ));
    }
}
