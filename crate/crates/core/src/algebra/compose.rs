//! Transformations, quotients and concave compositions of convex functions.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::algebra::{probe_points, PROBES};
use crate::error::{InvexError, Result};
use crate::model::kernel::{MatrixFn, PointMapFn};
use crate::model::{
    AlphaRule, Certificates, Certification, DomainSpec, FunctionObject, KernelFn, Provenance, Rule,
    SubgradientSet,
};

/// Allowed deviation of `JacInv(x) * Jac(x)` from the identity.
pub const JACOBIAN_INVERSE_TOL: f64 = 1e-10;
/// Grid points used to validate a scalar concave outer function.
pub const CONCAVE_GRID: usize = 10_000;

type CoordInverse = dyn Fn(usize, f64) -> Option<f64> + Send + Sync;

/// A differentiable map `Phi: X -> R^n` with nonsingular Jacobian.
#[derive(Clone)]
pub struct Transform {
    signature: String,
    domain: DomainSpec,
    phi: Rule<PointMapFn>,
    jac: Rule<MatrixFn>,
    jac_inv: Rule<MatrixFn>,
    coord_inverse: Option<Arc<CoordInverse>>,
}

impl fmt::Debug for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Transform({})", self.signature)
    }
}

impl Transform {
    pub fn new(
        signature: impl Into<String>,
        domain: DomainSpec,
        phi: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        jac: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
        jac_inv: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        let signature = signature.into();
        Transform {
            phi: Rule::map(format!("phi[{signature}]"), phi),
            jac: Rule::matrix(format!("jac[{signature}]"), jac),
            jac_inv: Rule::matrix(format!("jac_inv[{signature}]"), jac_inv),
            signature,
            domain,
            coord_inverse: None,
        }
    }

    /// For diagonal maps: `inverse(i, t)` solves `Phi_i(x_i) = t`. Needed to
    /// carry kink loci of a nonsmooth outer function back to `X`.
    pub fn with_coordinate_inverse(
        mut self,
        inverse: impl Fn(usize, f64) -> Option<f64> + Send + Sync + 'static,
    ) -> Self {
        self.coord_inverse = Some(Arc::new(inverse));
        self
    }

    /// `log x` on `x > 0`.
    pub fn log() -> Self {
        Transform::new(
            "log",
            DomainSpec::positive_half_line(),
            |x| vec![x[0].ln()],
            |x| DMatrix::from_element(1, 1, 1.0 / x[0]),
            |x| DMatrix::from_element(1, 1, x[0]),
        )
        .with_coordinate_inverse(|_, t| Some(t.exp()))
    }

    pub fn signature(&self) -> &str {
        &self.signature
    }
}

/// `f = g o Phi` with kernel `(D Phi(x))^{-1} (Phi(y) - Phi(x))`.
///
/// A nonsmooth `g` (one with kink loci) is only accepted with a diagonal
/// Jacobian, which keeps the subdifferential in smooth+box form.
pub fn compose_transform(g: &FunctionObject, t: &Transform) -> Result<FunctionObject> {
    if !g.is_convex_certified() {
        return Err(InvexError::Precondition(format!(
            "`{}` is not certified convex",
            g.signature()
        )));
    }
    let n = t.domain.dim();
    if g.dim() != n {
        return Err(InvexError::DimMismatch {
            expected: n,
            got: g.dim(),
        });
    }
    let nonsmooth = g.has_kinks();
    let probe = FunctionObject::from_rules(
        "probe",
        t.domain.clone(),
        |_| 0.0,
        |x| SubgradientSet::singleton(vec![0.0; x.len()]),
    );
    for x in probe_points(&probe, PROBES / 10) {
        let px = (t.phi.func())(&x);
        if px.len() != n {
            return Err(InvexError::DimMismatch {
                expected: n,
                got: px.len(),
            });
        }
        if !g.domain().contains(&px) {
            return Err(InvexError::Domain { point: px });
        }
        let j = (t.jac.func())(&x);
        let ji = (t.jac_inv.func())(&x);
        if j.shape() != (n, n) || ji.shape() != (n, n) {
            return Err(InvexError::InvalidSpec("Jacobian must be n x n".into()));
        }
        let residual = (&ji * &j - DMatrix::<f64>::identity(n, n)).amax();
        if !(residual <= JACOBIAN_INVERSE_TOL) {
            return Err(InvexError::SingularJacobian { point: x });
        }
        if nonsmooth && (0..n).any(|r| (0..n).any(|c| r != c && j[(r, c)] != 0.0)) {
            return Err(InvexError::Representation(
                "non-diagonal Jacobian with a nonsmooth outer function".into(),
            ));
        }
    }

    let kinks = if nonsmooth {
        let inverse = t.coord_inverse.as_ref().ok_or_else(|| {
            InvexError::Representation(
                "nonsmooth outer function needs a coordinate inverse to locate kinks".into(),
            )
        })?;
        g.kinks()
            .iter()
            .enumerate()
            .map(|(i, ks)| ks.iter().filter_map(|k| inverse(i, *k)).collect())
            .collect()
    } else {
        vec![Vec::new(); n]
    };

    let g_body = Arc::clone(g.body());
    let phi = t.phi.clone();
    let eval = {
        let g_body = Arc::clone(&g_body);
        let phi = phi.clone();
        Arc::new(move |x: &[f64]| g_body.eval_unchecked(&(phi.func())(x)))
    };
    let jac = t.jac.clone();
    let subdiff = Arc::new(move |x: &[f64]| {
        let inner = g_body.subdiff_unchecked(&(phi.func())(x));
        let j = (jac.func())(x);
        if nonsmooth {
            let d: Vec<f64> = (0..x.len()).map(|i| j[(i, i)]).collect();
            inner.scale_diagonal(&d)
        } else {
            let s = DVector::from_column_slice(inner.smooth_part());
            SubgradientSet::singleton((j.transpose() * s).iter().copied().collect())
        }
    });
    let kernel = KernelFn::JacobianTransform {
        phi: t.phi.clone(),
        jac_inv: t.jac_inv.clone(),
    };
    Ok(FunctionObject::assemble(
        format!("compose[{};{}]", g.signature(), t.signature),
        t.domain.clone(),
        kinks,
        eval,
        subdiff,
        Provenance::JacobianTransform,
    )
    .with_kernel(kernel, Provenance::JacobianTransform)
    .with_certificates(invex_certified()))
}

fn invex_certified() -> Certificates {
    Certificates {
        invex: Some(Certification::ByConstruction),
        ..Certificates::default()
    }
}

pub(crate) fn merged_kinks(a: &FunctionObject, b: &FunctionObject) -> Vec<Vec<f64>> {
    a.kinks()
        .iter()
        .zip(b.kinks())
        .map(|(ka, kb)| {
            let mut k: Vec<f64> = ka.iter().chain(kb).copied().collect();
            k.sort_by(f64::total_cmp);
            k.dedup();
            k
        })
        .collect()
}

/// `f = g / h` for convex `g >= 0` and concave `h > 0`, with kernel
/// `(h(x) / h(y)) (y - x)`.
pub fn fractional(g: &FunctionObject, h: &FunctionObject) -> Result<FunctionObject> {
    if !g.is_convex_certified() {
        return Err(InvexError::Precondition(format!(
            "numerator `{}` is not certified convex",
            g.signature()
        )));
    }
    if !h.is_concave_certified() {
        return Err(InvexError::Precondition(format!(
            "denominator `{}` is not certified concave",
            h.signature()
        )));
    }
    if g.dim() != h.dim() {
        return Err(InvexError::DimMismatch {
            expected: g.dim(),
            got: h.dim(),
        });
    }
    let domain = g.domain().narrower(h.domain())?;
    let g = g.restrict(domain.clone())?;
    for x in probe_points(&g, PROBES) {
        let gv = g.eval_unchecked(&x);
        if !(gv >= 0.0) {
            return Err(InvexError::SignViolation {
                what: "numerator",
                value: gv,
                point: x,
            });
        }
        let hv = h.eval_unchecked(&x);
        if !(hv > 0.0) {
            return Err(InvexError::SignViolation {
                what: "denominator",
                value: hv,
                point: x,
            });
        }
    }

    let (gb, hb) = (Arc::clone(g.body()), Arc::clone(h.body()));
    let eval = {
        let (gb, hb) = (Arc::clone(&gb), Arc::clone(&hb));
        Arc::new(move |x: &[f64]| gb.eval_unchecked(x) / hb.eval_unchecked(x))
    };
    let hb_alpha = Arc::clone(&hb);
    let subdiff = Arc::new(move |x: &[f64]| {
        let hv = hb.eval_unchecked(x);
        let fv = gb.eval_unchecked(x) / hv;
        gb.subdiff_unchecked(x)
            .add(&hb.subdiff_unchecked(x).scale(-fv))
            .expect("equal dimensions")
            .scale(1.0 / hv)
    });
    let alpha = AlphaRule::alpha(format!("ratio[{}]", h.signature()), move |x, y| {
        hb_alpha.eval_unchecked(x) / hb_alpha.eval_unchecked(y)
    });
    Ok(FunctionObject::assemble(
        format!("frac[{};{}]", g.signature(), h.signature()),
        domain,
        merged_kinks(&g, h),
        eval,
        subdiff,
        Provenance::Fractional,
    )
    .with_kernel(KernelFn::scaled(alpha), Provenance::Fractional)
    .with_certificates(invex_certified()))
}

type ScalarFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A concave, continuously differentiable, strictly increasing `phi` on an
/// open interval.
#[derive(Clone)]
pub struct ScalarConcaveSpec {
    signature: String,
    phi: Arc<ScalarFn>,
    phi_prime: Arc<ScalarFn>,
    lo: f64,
    hi: f64,
}

impl fmt::Debug for ScalarConcaveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ScalarConcaveSpec({} on ({}, {}))",
            self.signature, self.lo, self.hi
        )
    }
}

impl ScalarConcaveSpec {
    /// Validates `phi' > 0` and midpoint concavity on a grid of the interval
    /// (infinite ends are truncated 1000 units out).
    pub fn new(
        signature: impl Into<String>,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        phi_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        lo: f64,
        hi: f64,
    ) -> Result<Self> {
        if !(lo < hi) || lo.is_nan() || hi.is_nan() {
            return Err(InvexError::InvalidSpec(format!(
                "empty interval ({lo}, {hi})"
            )));
        }
        let a = if lo.is_finite() {
            lo + 1e-6
        } else if hi.is_finite() {
            hi - 1e3
        } else {
            -1e3
        };
        let b = if hi.is_finite() {
            hi - 1e-6
        } else {
            a.max(0.0) + 1e3
        };
        let grid: Vec<f64> = (0..CONCAVE_GRID)
            .map(|i| a + (b - a) * i as f64 / (CONCAVE_GRID - 1) as f64)
            .collect();
        for &t in &grid {
            let d = phi_prime(t);
            if !(d > 0.0) || !d.is_finite() {
                return Err(InvexError::InvalidSpec(format!(
                    "phi' = {d} is not positive at {t}"
                )));
            }
        }
        for w in grid.windows(3) {
            let (fa, fm, fb) = (phi(w[0]), phi(w[1]), phi(w[2]));
            let slack = 1e-10 * (1.0 + fa.abs() + fb.abs());
            if fm < 0.5 * (fa + fb) - slack {
                return Err(InvexError::InvalidSpec(format!(
                    "phi fails midpoint concavity around {}",
                    w[1]
                )));
            }
        }
        Ok(ScalarConcaveSpec {
            signature: signature.into(),
            phi: Arc::new(phi),
            phi_prime: Arc::new(phi_prime),
            lo,
            hi,
        })
    }

    /// `log t` on `(0, inf)`.
    pub fn log() -> Self {
        Self::new("log", f64::ln, |t| 1.0 / t, 0.0, f64::INFINITY).expect("log is concave")
    }

    /// `t^p` on `(0, inf)` for `0 < p < 1`.
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(InvexError::Param(format!(
                "exponent p = {p} must lie in (0, 1)"
            )));
        }
        Self::new(
            format!("pow[p={p}]"),
            move |t| t.powf(p),
            move |t| p * t.powf(p - 1.0),
            0.0,
            f64::INFINITY,
        )
    }

    /// `t / (t + c)` on `(-c, inf)` for `c > 0`.
    pub fn ratio(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(InvexError::Param(format!("shift c = {c} must be positive")));
        }
        Self::new(
            format!("ratio[c={c}]"),
            move |t| t / (t + c),
            move |t| c / ((t + c) * (t + c)),
            -c,
            f64::INFINITY,
        )
    }

    pub fn signature(&self) -> &str {
        &self.signature
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.phi)(t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        (self.phi_prime)(t)
    }
}

fn concave_composite_with(
    phi: &ScalarConcaveSpec,
    g: &FunctionObject,
    signature: String,
    alpha: AlphaRule,
    provenance: Provenance,
) -> Result<FunctionObject> {
    if !g.is_convex_certified() {
        return Err(InvexError::Precondition(format!(
            "`{}` is not certified convex",
            g.signature()
        )));
    }
    for x in probe_points(g, PROBES) {
        let v = g.eval_unchecked(&x);
        if !(phi.lo < v && v < phi.hi) {
            return Err(InvexError::Range {
                value: v,
                lo: phi.lo,
                hi: phi.hi,
                point: x,
            });
        }
    }
    let gb = Arc::clone(g.body());
    let eval = {
        let (gb, phi) = (Arc::clone(&gb), Arc::clone(&phi.phi));
        Arc::new(move |x: &[f64]| phi(gb.eval_unchecked(x)))
    };
    let phi_prime = Arc::clone(&phi.phi_prime);
    let subdiff = Arc::new(move |x: &[f64]| {
        gb.subdiff_unchecked(x)
            .scale(phi_prime(gb.eval_unchecked(x)))
    });
    Ok(FunctionObject::assemble(
        signature,
        g.domain().clone(),
        g.kinks().to_vec(),
        eval,
        subdiff,
        provenance,
    )
    .with_kernel(KernelFn::scaled(alpha), provenance)
    .with_certificates(invex_certified()))
}

/// `f = phi(g(x))` with kernel `(phi'(g(y)) / phi'(g(x))) (y - x)`.
pub fn concave_composite(phi: &ScalarConcaveSpec, g: &FunctionObject) -> Result<FunctionObject> {
    let gb = Arc::clone(g.body());
    let dphi = Arc::clone(&phi.phi_prime);
    let alpha = AlphaRule::alpha(
        format!("phiprime_ratio[{};{}]", phi.signature, g.signature()),
        move |x, y| dphi(gb.eval_unchecked(y)) / dphi(gb.eval_unchecked(x)),
    );
    concave_composite_with(
        phi,
        g,
        format!("concave[{};{}]", phi.signature, g.signature()),
        alpha,
        Provenance::ConcaveComposite,
    )
}

/// `log g(x)` for convex `g > 0`; kernel `(g(x) / g(y)) (y - x)`.
pub fn log_compose(g: &FunctionObject) -> Result<FunctionObject> {
    let gb = Arc::clone(g.body());
    let alpha = AlphaRule::alpha(format!("ratio[{}]", g.signature()), move |x, y| {
        gb.eval_unchecked(x) / gb.eval_unchecked(y)
    });
    concave_composite_with(
        &ScalarConcaveSpec::log(),
        g,
        format!("log[{}]", g.signature()),
        alpha,
        Provenance::LogComposite,
    )
}

/// `g(x)^p` for convex `g > 0` and `0 < p < 1`; kernel `(g(y) / g(x))^(p-1) (y - x)`.
pub fn power_compose(g: &FunctionObject, p: f64) -> Result<FunctionObject> {
    let phi = ScalarConcaveSpec::power(p)?;
    let gb = Arc::clone(g.body());
    let alpha = AlphaRule::alpha(
        format!("pow_ratio[p={p};{}]", g.signature()),
        move |x, y| (gb.eval_unchecked(y) / gb.eval_unchecked(x)).powf(p - 1.0),
    );
    concave_composite_with(
        &phi,
        g,
        format!("pow[p={p};{}]", g.signature()),
        alpha,
        Provenance::PowerComposite,
    )
}

/// `g(x) / (g(x) + c)` for convex `g` and `c > 0`; kernel
/// `((g(x) + c) / (g(y) + c))^2 (y - x)`.
pub fn ratio_compose(g: &FunctionObject, c: f64) -> Result<FunctionObject> {
    let phi = ScalarConcaveSpec::ratio(c)?;
    let gb = Arc::clone(g.body());
    let alpha = AlphaRule::alpha(
        format!("shift_sq_ratio[c={c};{}]", g.signature()),
        move |x, y| {
            let r = (gb.eval_unchecked(x) + c) / (gb.eval_unchecked(y) + c);
            r * r
        },
    );
    concave_composite_with(
        &phi,
        g,
        format!("ratio[c={c};{}]", g.signature()),
        alpha,
        Provenance::RatioComposite,
    )
}
