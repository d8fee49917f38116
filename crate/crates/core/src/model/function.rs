use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{InvexError, Result};
use crate::model::domain::{BoxRegion, DomainSpec};
use crate::model::kernel::{kernel_eval, KernelFn};
use crate::model::subgradient::SubgradientSet;
use crate::model::Vector;

/// A point within this distance of a declared kink locus gets the interval
/// (nonsmooth) form of the subdifferential.
pub const KINK_TOL: f64 = 1e-12;

pub type EvalFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
pub type SubdiffFn = dyn Fn(&[f64]) -> SubgradientSet + Send + Sync;

/// The evaluation part of a function: value, subdifferential, domain and
/// kink loci. Kernels refer back to it without owning the full object.
pub struct Body {
    signature: String,
    domain: DomainSpec,
    kinks: Vec<Vec<f64>>,
    eval: Arc<EvalFn>,
    subdiff: Arc<SubdiffFn>,
}

impl fmt::Debug for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Body")
            .field("signature", &self.signature)
            .field("domain", &self.domain)
            .field("kinks", &self.kinks)
            .finish()
    }
}

impl Body {
    pub fn signature(&self) -> &str {
        &self.signature
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Kink loci per coordinate: coordinate `i` is nonsmooth at each value in `kinks()[i]`.
    pub fn kinks(&self) -> &[Vec<f64>] {
        &self.kinks
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    pub(crate) fn subdiff_unchecked(&self, x: &[f64]) -> SubgradientSet {
        (self.subdiff)(x)
    }

    pub(crate) fn eval_fn(&self) -> Arc<EvalFn> {
        Arc::clone(&self.eval)
    }

    pub(crate) fn subdiff_fn(&self) -> Arc<SubdiffFn> {
        Arc::clone(&self.subdiff)
    }
}

/// Which construction justifies a function's kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    ConvexAtom,
    JacobianTransform,
    Fractional,
    ConcaveComposite,
    LogComposite,
    PowerComposite,
    RatioComposite,
    SeparableSum,
    WeightedSum,
    StationarityAudit,
    QuasarConvex,
    PolyakLojasiewicz,
    /// User-supplied rules, nothing certified.
    Declared,
}

/// Record of a grid audit that certified stationarity implies global minimality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRecord {
    pub region: BoxRegion,
    pub grid_density: usize,
    pub points_per_axis: usize,
    pub floor: f64,
    pub exclusion_radius: f64,
    pub known_min: Option<Vector>,
    pub min_subgradient_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Certification {
    ByConstruction,
    /// Sampled midpoint inequality; weaker than construction.
    Sampled,
    Audited(Box<AuditRecord>),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Certificates {
    pub convex: Option<Certification>,
    pub concave: Option<Certification>,
    /// Every stationary point is a global minimizer (on the audited region for audits).
    pub invex: Option<Certification>,
}

#[derive(Clone, Debug)]
pub struct FunctionObject {
    body: Arc<Body>,
    kernel: Option<KernelFn>,
    provenance: Provenance,
    certificates: Certificates,
    lipschitz_note: Option<f64>,
}

impl FunctionObject {
    /// Wrap user-supplied rules. Nothing is certified and no kernel is attached.
    pub fn from_rules(
        signature: impl Into<String>,
        domain: DomainSpec,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        subdiff: impl Fn(&[f64]) -> SubgradientSet + Send + Sync + 'static,
    ) -> Self {
        let dim = domain.dim();
        FunctionObject::assemble(
            signature.into(),
            domain,
            vec![Vec::new(); dim],
            Arc::new(eval),
            Arc::new(subdiff),
            Provenance::Declared,
        )
    }

    pub(crate) fn assemble(
        signature: String,
        domain: DomainSpec,
        kinks: Vec<Vec<f64>>,
        eval: Arc<EvalFn>,
        subdiff: Arc<SubdiffFn>,
        provenance: Provenance,
    ) -> Self {
        debug_assert_eq!(kinks.len(), domain.dim());
        FunctionObject {
            body: Arc::new(Body {
                signature,
                domain,
                kinks,
                eval,
                subdiff,
            }),
            kernel: None,
            provenance,
            certificates: Certificates::default(),
            lipschitz_note: None,
        }
    }

    fn rebuild_body(&self, domain: DomainSpec, kinks: Vec<Vec<f64>>) -> Self {
        FunctionObject {
            body: Arc::new(Body {
                signature: self.body.signature.clone(),
                domain,
                kinks,
                eval: self.body.eval_fn(),
                subdiff: self.body.subdiff_fn(),
            }),
            ..self.clone()
        }
    }

    /// Declare kink loci per coordinate.
    pub fn with_kinks(self, kinks: Vec<Vec<f64>>) -> Result<Self> {
        if kinks.len() != self.dim() {
            return Err(InvexError::DimMismatch {
                expected: self.dim(),
                got: kinks.len(),
            });
        }
        let domain = self.body.domain.clone();
        Ok(self.rebuild_body(domain, kinks))
    }

    /// Restrict to a smaller domain. Canonical kernels bound to the old body are dropped.
    pub fn restrict(&self, domain: DomainSpec) -> Result<Self> {
        if !self.body.domain.contains_domain(&domain) {
            return Err(InvexError::InvalidSpec(format!(
                "cannot restrict `{}` to a domain it does not contain",
                self.signature()
            )));
        }
        let mut out = self.rebuild_body(domain, self.body.kinks.clone());
        if matches!(out.kernel, Some(KernelFn::Canonical { .. })) {
            out.kernel = None;
            out.certificates.invex = None;
        }
        Ok(out)
    }

    /// Replace the sample region, keeping the domain.
    pub fn with_sample_region(&self, region: BoxRegion) -> Result<Self> {
        let domain = self.body.domain.with_sample_region(region)?;
        Ok(self.rebuild_body(domain, self.body.kinks.clone()))
    }

    pub fn with_kernel(mut self, kernel: KernelFn, provenance: Provenance) -> Self {
        self.kernel = Some(kernel);
        self.provenance = provenance;
        self
    }

    pub(crate) fn with_certificates(mut self, certificates: Certificates) -> Self {
        self.certificates = certificates;
        self
    }

    pub(crate) fn with_lipschitz_note(mut self, bound: f64) -> Self {
        self.lipschitz_note = Some(bound);
        self
    }

    pub fn body(&self) -> &Arc<Body> {
        &self.body
    }

    pub fn signature(&self) -> &str {
        &self.body.signature
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.body.domain
    }

    pub fn sample_region(&self) -> &BoxRegion {
        self.body.domain.sample_region()
    }

    pub fn kinks(&self) -> &[Vec<f64>] {
        &self.body.kinks
    }

    pub fn kernel(&self) -> Option<&KernelFn> {
        self.kernel.as_ref()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn certificates(&self) -> &Certificates {
        &self.certificates
    }

    pub fn lipschitz_note(&self) -> Option<f64> {
        self.lipschitz_note
    }

    pub fn is_convex_certified(&self) -> bool {
        self.certificates.convex.is_some()
    }

    pub fn is_concave_certified(&self) -> bool {
        self.certificates.concave.is_some()
    }

    pub fn has_kinks(&self) -> bool {
        self.body.kinks.iter().any(|k| !k.is_empty())
    }

    /// True if some coordinate of `x` lies within `tol` of one of its kink loci.
    pub fn near_kink(&self, x: &[f64], tol: f64) -> bool {
        self.body
            .kinks
            .iter()
            .zip(x)
            .any(|(ks, v)| ks.iter().any(|k| (v - k).abs() <= tol))
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(InvexError::DimMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if !self.body.domain.contains(x) {
            return Err(InvexError::Domain { point: x.to_vec() });
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let v = self.body.eval_unchecked(x);
        if !v.is_finite() {
            return Err(InvexError::Domain { point: x.to_vec() });
        }
        Ok(v)
    }

    pub fn subdiff(&self, x: &[f64]) -> Result<SubgradientSet> {
        self.check_point(x)?;
        Ok(self.body.subdiff_unchecked(x))
    }

    /// `eta(x, y)` of the attached kernel, with both points checked against the domain.
    pub fn kernel_at(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        let k = self
            .kernel
            .as_ref()
            .ok_or_else(|| InvexError::MissingKernel(self.signature().to_string()))?;
        self.check_point(x)?;
        self.check_point(y)?;
        kernel_eval(k, x, y)
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.body.eval_unchecked(x)
    }

    pub(crate) fn subdiff_unchecked(&self, x: &[f64]) -> SubgradientSet {
        self.body.subdiff_unchecked(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn neg_square() -> FunctionObject {
        FunctionObject::from_rules(
            "neg_square",
            DomainSpec::all_space(1),
            |x| -x[0] * x[0],
            |x| SubgradientSet::singleton(vec![-2.0 * x[0]]),
        )
    }

    #[test]
    fn evaluation_outside_domain_is_an_error() {
        let f = neg_square()
            .restrict(DomainSpec::positive_half_line())
            .unwrap();
        assert!(matches!(f.eval(&[-1.0]), Err(InvexError::Domain { .. })));
        assert!(matches!(f.subdiff(&[0.0]), Err(InvexError::Domain { .. })));
        assert_eq!(f.eval(&[2.0]).unwrap(), -4.0);
        assert!(f.eval(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn non_finite_value_is_rejected() {
        let f = FunctionObject::from_rules(
            "log",
            DomainSpec::all_space(1),
            |x| x[0].ln(),
            |x| SubgradientSet::singleton(vec![1.0 / x[0]]),
        );
        assert!(f.eval(&[-1.0]).is_err());
    }

    #[test]
    fn kinks_and_kernel_requirements() {
        let f = neg_square().with_kinks(vec![vec![0.0]]).unwrap();
        assert!(f.near_kink(&[1e-13], KINK_TOL));
        assert!(!f.near_kink(&[1e-6], KINK_TOL));
        let x = Vector::scalar(1.0).unwrap();
        assert!(matches!(
            f.kernel_at(&x, &x),
            Err(InvexError::MissingKernel(_))
        ));
        assert!(neg_square().with_kinks(vec![]).is_err());
    }

    #[test]
    fn restrict_rejects_larger_domain() {
        let f = neg_square()
            .restrict(DomainSpec::positive_half_line())
            .unwrap();
        assert!(f.restrict(DomainSpec::all_space(1)).is_err());
    }
}
