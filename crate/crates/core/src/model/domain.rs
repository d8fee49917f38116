use serde::Serialize;

use crate::error::{InvexError, Result};
use crate::model::Vector;

/// Minimum distance kept between a sample region and an open domain boundary.
pub const BOUNDARY_MARGIN: f64 = 1e-6;

/// A closed axis-aligned box `[lo, hi]` with finite bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxRegion {
    lo: Vector,
    hi: Vector,
}

impl BoxRegion {
    pub fn new(lo: Vector, hi: Vector) -> Result<Self> {
        if lo.dim() != hi.dim() {
            return Err(InvexError::DimMismatch {
                expected: lo.dim(),
                got: hi.dim(),
            });
        }
        if lo.iter().zip(hi.iter()).any(|(l, h)| l > h) {
            return Err(InvexError::InvalidSpec(format!(
                "box bounds out of order: lo {lo}, hi {hi}"
            )));
        }
        Ok(BoxRegion { lo, hi })
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(Vector::new(vec![lo; dim])?, Vector::new(vec![hi; dim])?)
    }

    pub fn lo(&self) -> &Vector {
        &self.lo
    }

    pub fn hi(&self) -> &Vector {
        &self.hi
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(self.hi.iter()))
                .all(|(v, (l, h))| l <= v && v <= h)
    }

    pub fn clamp(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lo.iter().zip(self.hi.iter()))
            .map(|(v, (l, h))| v.clamp(*l, *h))
            .collect()
    }

    /// All `2^dim` corners, enumerated with coordinate 0 varying fastest.
    pub fn corners(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .map(|i| {
                        if mask >> i & 1 == 1 {
                            self.hi[i]
                        } else {
                            self.lo[i]
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(self.hi.iter())
            .map(|(l, h)| 0.5 * (l + h))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DomainKind {
    AllSpace {
        dim: usize,
    },
    /// `x_i > 0` for every coordinate.
    PositiveOrthant {
        dim: usize,
    },
    Box {
        lo: Vector,
        hi: Vector,
        open: bool,
    },
    /// One-dimensional `x > threshold` (strict) or `x >= threshold`.
    HalfLine {
        threshold: f64,
        strict: bool,
    },
}

impl DomainKind {
    pub fn dim(&self) -> usize {
        match self {
            DomainKind::AllSpace { dim } | DomainKind::PositiveOrthant { dim } => *dim,
            DomainKind::Box { lo, .. } => lo.dim(),
            DomainKind::HalfLine { .. } => 1,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            DomainKind::AllSpace { .. } => true,
            DomainKind::PositiveOrthant { .. } => x.iter().all(|v| *v > 0.0),
            DomainKind::Box { lo, hi, open } => {
                x.iter().zip(lo.iter().zip(hi.iter())).all(|(v, (l, h))| {
                    if *open {
                        l < v && v < h
                    } else {
                        l <= v && v <= h
                    }
                })
            }
            DomainKind::HalfLine { threshold, strict } => {
                if *strict {
                    x[0] > *threshold
                } else {
                    x[0] >= *threshold
                }
            }
        }
    }

    /// Per-coordinate interval `(lo, hi, lo_open, hi_open)` bounding the domain.
    /// Every supported kind is a product of intervals.
    fn interval(&self, i: usize) -> (f64, f64, bool, bool) {
        match self {
            DomainKind::AllSpace { .. } => (f64::NEG_INFINITY, f64::INFINITY, true, true),
            DomainKind::PositiveOrthant { .. } => (0.0, f64::INFINITY, true, true),
            DomainKind::Box { lo, hi, open } => (lo[i], hi[i], *open, *open),
            DomainKind::HalfLine { threshold, strict } => {
                (*threshold, f64::INFINITY, *strict, true)
            }
        }
    }
}

/// The domain of a function together with the box that samplers draw from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainSpec {
    kind: DomainKind,
    sample_region: BoxRegion,
}

impl DomainSpec {
    pub fn new(kind: DomainKind, sample_region: BoxRegion) -> Result<Self> {
        if kind.dim() != sample_region.dim() {
            return Err(InvexError::DimMismatch {
                expected: kind.dim(),
                got: sample_region.dim(),
            });
        }
        if let DomainKind::Box { lo, hi, .. } = &kind {
            if lo.dim() != hi.dim() || lo.iter().zip(hi.iter()).any(|(l, h)| l >= h) {
                return Err(InvexError::InvalidSpec("degenerate domain box".into()));
            }
        }
        for i in 0..kind.dim() {
            let (lo, hi, lo_open, hi_open) = kind.interval(i);
            let margin_lo = if lo_open { BOUNDARY_MARGIN } else { 0.0 };
            let margin_hi = if hi_open { BOUNDARY_MARGIN } else { 0.0 };
            if sample_region.lo()[i] < lo + margin_lo || sample_region.hi()[i] > hi - margin_hi {
                return Err(InvexError::InvalidSpec(format!(
                    "sample region coordinate {i} [{}, {}] not inside domain with margin",
                    sample_region.lo()[i],
                    sample_region.hi()[i]
                )));
            }
        }
        Ok(DomainSpec {
            kind,
            sample_region,
        })
    }

    /// R^n sampled on `[-5, 5]^n`.
    pub fn all_space(dim: usize) -> Self {
        Self::new(
            DomainKind::AllSpace { dim },
            BoxRegion::cube(dim, -5.0, 5.0).expect("valid cube"),
        )
        .expect("valid domain")
    }

    /// `x > 0` sampled on `[0.05, 10]`.
    pub fn positive_half_line() -> Self {
        Self::new(
            DomainKind::HalfLine {
                threshold: 0.0,
                strict: true,
            },
            BoxRegion::cube(1, 0.05, 10.0).expect("valid cube"),
        )
        .expect("valid domain")
    }

    pub fn with_sample_region(&self, region: BoxRegion) -> Result<Self> {
        Self::new(self.kind.clone(), region)
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn sample_region(&self) -> &BoxRegion {
        &self.sample_region
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.kind.contains(x)
    }

    /// Every supported domain kind is convex.
    pub fn is_convex(&self) -> bool {
        matches!(
            self.kind,
            DomainKind::AllSpace { .. }
                | DomainKind::PositiveOrthant { .. }
                | DomainKind::Box { .. }
                | DomainKind::HalfLine { .. }
        )
    }

    /// True if every point of `other` lies in `self`.
    pub fn contains_domain(&self, other: &DomainSpec) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        (0..self.dim()).all(|i| {
            let (a_lo, a_hi, a_lo_open, a_hi_open) = self.kind.interval(i);
            let (b_lo, b_hi, b_lo_open, b_hi_open) = other.kind.interval(i);
            let lo_ok = b_lo > a_lo || (b_lo == a_lo && (b_lo_open || !a_lo_open));
            let hi_ok = b_hi < a_hi || (b_hi == a_hi && (b_hi_open || !a_hi_open));
            lo_ok && hi_ok
        })
    }

    /// The smaller of two nested domains; errors if neither contains the other.
    pub fn narrower(&self, other: &DomainSpec) -> Result<DomainSpec> {
        if self.contains_domain(other) {
            Ok(other.clone())
        } else if other.contains_domain(self) {
            Ok(self.clone())
        } else {
            Err(InvexError::InvalidSpec(
                "operand domains are not nested".into(),
            ))
        }
    }

    /// Cartesian product of one-dimensional domains, when it stays representable.
    pub fn product(parts: &[&DomainSpec]) -> Result<DomainSpec> {
        if parts.iter().any(|p| p.dim() != 1) {
            return Err(InvexError::InvalidSpec(
                "product domains need one-dimensional factors".into(),
            ));
        }
        let n = parts.len();
        let region = BoxRegion::new(
            Vector::new(parts.iter().map(|p| p.sample_region.lo()[0]).collect())?,
            Vector::new(parts.iter().map(|p| p.sample_region.hi()[0]).collect())?,
        )?;
        let kind = if parts
            .iter()
            .all(|p| matches!(p.kind, DomainKind::AllSpace { .. }))
        {
            DomainKind::AllSpace { dim: n }
        } else if parts.iter().all(|p| {
            p.kind
                == DomainKind::HalfLine {
                    threshold: 0.0,
                    strict: true,
                }
        }) {
            DomainKind::PositiveOrthant { dim: n }
        } else {
            return Err(InvexError::InvalidSpec(
                "product of mixed one-dimensional domains is not representable".into(),
            ));
        };
        DomainSpec::new(kind, region)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_line_membership_is_strict() {
        let d = DomainSpec::positive_half_line();
        assert!(d.contains(&[1e-9]));
        assert!(!d.contains(&[0.0]));
        assert!(!d.contains(&[-1.0]));
        assert!(!d.contains(&[1.0, 2.0]));
    }

    #[test]
    fn sample_region_must_keep_margin_from_open_boundary() {
        let kind = DomainKind::HalfLine {
            threshold: 0.0,
            strict: true,
        };
        assert!(DomainSpec::new(kind.clone(), BoxRegion::cube(1, 0.0, 1.0).unwrap()).is_err());
        assert!(DomainSpec::new(kind, BoxRegion::cube(1, 1e-5, 1.0).unwrap()).is_ok());
    }

    #[test]
    fn nesting() {
        let all = DomainSpec::all_space(1);
        let pos = DomainSpec::positive_half_line();
        assert!(all.contains_domain(&pos));
        assert!(!pos.contains_domain(&all));
        assert_eq!(all.narrower(&pos).unwrap(), pos);
        assert_eq!(pos.narrower(&all).unwrap(), pos);
    }

    #[test]
    fn corners_enumerate_all_vertices() {
        let b = BoxRegion::cube(2, -1.0, 1.0).unwrap();
        let c = b.corners();
        assert_eq!(c.len(), 4);
        assert!(c.contains(&vec![-1.0, 1.0]));
        assert_eq!(b.clamp(&[3.0, -0.5]), vec![1.0, -0.5]);
    }

    #[test]
    fn product_of_real_lines() {
        let a = DomainSpec::all_space(1);
        let p = DomainSpec::product(&[&a, &a]).unwrap();
        assert_eq!(p.kind(), &DomainKind::AllSpace { dim: 2 });
        assert_eq!(p.sample_region(), &BoxRegion::cube(2, -5.0, 5.0).unwrap());
    }
}
