//! Clarke subdifferentials restricted to the form `smooth + [lo, hi]`.
//!
//! Every function built by this crate has a subdifferential of this shape at
//! every point of its domain: absolute values contribute per-coordinate
//! intervals, smooth terms contribute a single vector, and scaling, Minkowski
//! sums and separable stacking all keep the form.

use serde::Serialize;

use crate::error::{InvexError, Result};
use crate::model::vector::dot;

/// Upper bound on nondegenerate intervals for corner enumeration.
pub const MAX_ENUMERATED_INTERVALS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubgradientSet {
    smooth: Vec<f64>,
    box_lo: Vec<f64>,
    box_hi: Vec<f64>,
}

impl SubgradientSet {
    pub fn new(smooth: Vec<f64>, box_lo: Vec<f64>, box_hi: Vec<f64>) -> Result<Self> {
        let n = smooth.len();
        if box_lo.len() != n || box_hi.len() != n {
            return Err(InvexError::DimMismatch {
                expected: n,
                got: box_lo.len().max(box_hi.len()),
            });
        }
        let all = smooth.iter().chain(&box_lo).chain(&box_hi);
        if let Some(index) = all.clone().position(|v| !v.is_finite()) {
            return Err(InvexError::NonFinite {
                index: index % n.max(1),
            });
        }
        if box_lo.iter().zip(&box_hi).any(|(l, h)| l > h) {
            return Err(InvexError::InvalidSpec(
                "subgradient box has lo > hi".into(),
            ));
        }
        Ok(SubgradientSet {
            smooth,
            box_lo,
            box_hi,
        })
    }

    /// The gradient of a function differentiable at the point.
    pub fn singleton(gradient: Vec<f64>) -> Self {
        let n = gradient.len();
        SubgradientSet {
            smooth: gradient,
            box_lo: vec![0.0; n],
            box_hi: vec![0.0; n],
        }
    }

    /// `smooth + [lo, hi]` where the box is given per coordinate.
    pub fn with_box(smooth: Vec<f64>, box_lo: Vec<f64>, box_hi: Vec<f64>) -> Self {
        Self::new(smooth, box_lo, box_hi).expect("well-formed subgradient set")
    }

    pub fn dim(&self) -> usize {
        self.smooth.len()
    }

    pub fn smooth_part(&self) -> &[f64] {
        &self.smooth
    }

    pub fn box_lo(&self) -> &[f64] {
        &self.box_lo
    }

    pub fn box_hi(&self) -> &[f64] {
        &self.box_hi
    }

    /// Number of coordinates with `lo < hi`.
    pub fn nondegenerate(&self) -> usize {
        self.box_lo
            .iter()
            .zip(&self.box_hi)
            .filter(|(l, h)| l < h)
            .count()
    }

    pub fn is_singleton(&self) -> bool {
        self.nondegenerate() == 0
    }

    /// Lower and upper end of the represented interval in coordinate `i`.
    pub fn coordinate_range(&self, i: usize) -> (f64, f64) {
        (
            self.smooth[i] + self.box_lo[i],
            self.smooth[i] + self.box_hi[i],
        )
    }

    /// Multiply the whole set by a scalar; a negative factor flips the box.
    pub fn scale(&self, c: f64) -> Self {
        let smooth = self.smooth.iter().map(|v| c * v).collect();
        let (lo, hi) = self
            .box_lo
            .iter()
            .zip(&self.box_hi)
            .map(|(l, h)| {
                if c >= 0.0 {
                    (c * l, c * h)
                } else {
                    (c * h, c * l)
                }
            })
            .unzip();
        SubgradientSet {
            smooth,
            box_lo: lo,
            box_hi: hi,
        }
    }

    /// Per-coordinate scaling by `d_i`, the image under a diagonal linear map.
    pub fn scale_diagonal(&self, d: &[f64]) -> Self {
        let mut out = self.clone();
        for (i, &di) in d.iter().enumerate().take(self.dim()) {
            out.smooth[i] = di * self.smooth[i];
            let (a, b) = (di * self.box_lo[i], di * self.box_hi[i]);
            out.box_lo[i] = a.min(b);
            out.box_hi[i] = a.max(b);
        }
        out
    }

    /// Minkowski sum.
    pub fn add(&self, other: &SubgradientSet) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(InvexError::DimMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let zip = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        Ok(SubgradientSet {
            smooth: zip(&self.smooth, &other.smooth),
            box_lo: zip(&self.box_lo, &other.box_lo),
            box_hi: zip(&self.box_hi, &other.box_hi),
        })
    }

    /// Stack per-coordinate scalar sets into one set (separable sums).
    pub fn stack(parts: &[SubgradientSet]) -> Self {
        let mut out = SubgradientSet::singleton(Vec::with_capacity(parts.len()));
        for p in parts {
            out.smooth.extend_from_slice(&p.smooth);
            out.box_lo.extend_from_slice(&p.box_lo);
            out.box_hi.extend_from_slice(&p.box_hi);
        }
        out
    }

    /// `smooth + corner` for every corner of the box, enumerating only the
    /// nondegenerate coordinates; `2^k` points for `k` nondegenerate intervals.
    pub fn extreme_points(&self) -> Result<Vec<Vec<f64>>> {
        let free: Vec<usize> = (0..self.dim())
            .filter(|&i| self.box_lo[i] < self.box_hi[i])
            .collect();
        let k = free.len();
        if k > MAX_ENUMERATED_INTERVALS {
            return Err(InvexError::CombinatorialLimit {
                nondegenerate: k,
                limit: MAX_ENUMERATED_INTERVALS,
            });
        }
        let base: Vec<f64> = (0..self.dim())
            .map(|i| self.smooth[i] + self.box_lo[i])
            .collect();
        Ok((0..1usize << k)
            .map(|mask| {
                let mut p = base.clone();
                for (bit, &i) in free.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        p[i] = self.smooth[i] + self.box_hi[i];
                    }
                }
                p
            })
            .collect())
    }

    /// The unique least-norm element: per coordinate, 0 clamped into the interval.
    pub fn min_norm_element(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                let (lo, hi) = self.coordinate_range(i);
                0.0f64.clamp(lo, hi)
            })
            .collect()
    }

    /// Largest value of `<xi, d>` over the set.
    pub fn support(&self, d: &[f64]) -> f64 {
        (0..self.dim())
            .map(|i| {
                let (lo, hi) = self.coordinate_range(i);
                (lo * d[i]).max(hi * d[i])
            })
            .sum()
    }

    /// Smallest value of `<xi, d>` over the set.
    pub fn lower_support(&self, d: &[f64]) -> f64 {
        -self.support(&d.iter().map(|v| -v).collect::<Vec<_>>())
    }

    pub fn contains(&self, xi: &[f64], tol: f64) -> bool {
        xi.len() == self.dim()
            && (0..self.dim()).all(|i| {
                let (lo, hi) = self.coordinate_range(i);
                lo - tol <= xi[i] && xi[i] <= hi + tol
            })
    }

    /// `<smooth, d>` shortcut used by finite-difference checks.
    pub fn smooth_dot(&self, d: &[f64]) -> f64 {
        dot(&self.smooth, d)
    }
}

/// Free-function form of [`SubgradientSet::extreme_points`].
pub fn subgradient_extreme_points(s: &SubgradientSet) -> Result<Vec<Vec<f64>>> {
    s.extreme_points()
}
