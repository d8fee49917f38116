//! Seeded point and pair sampling over a function's sample region.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{InvexError, Result};
use crate::model::{BoxRegion, FunctionObject};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_PAIRS: usize = 100_000;
pub const DEFAULT_KINK_PROBABILITY: f64 = 0.1;

/// The crate-wide generator: ChaCha8 seeded from a 64-bit integer.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    /// `None` means the function's own sample region.
    pub region: Option<BoxRegion>,
    pub pair_count: usize,
    /// Per-coordinate probability of placing the coordinate exactly on a kink locus.
    pub kink_probability: f64,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            region: None,
            pair_count: DEFAULT_PAIRS,
            kink_probability: DEFAULT_KINK_PROBABILITY,
            seed: DEFAULT_SEED,
        }
    }
}

impl SamplerConfig {
    pub fn with_region(mut self, region: BoxRegion) -> Self {
        self.region = Some(region);
        self
    }

    pub fn with_pairs(mut self, pair_count: usize) -> Self {
        self.pair_count = pair_count;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_kink_probability(mut self, p: f64) -> Self {
        self.kink_probability = p;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.pair_count == 0 {
            return Err(InvexError::Param("pair_count must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.kink_probability) {
            return Err(InvexError::Param(format!(
                "kink probability {} is not in [0, 1]",
                self.kink_probability
            )));
        }
        Ok(())
    }
}

/// Draws points for one function from a validated region.
pub struct PointSampler<'a> {
    f: &'a FunctionObject,
    region: BoxRegion,
    kinks: Vec<Vec<f64>>,
    kink_probability: f64,
    rng: ChaCha8Rng,
}

impl<'a> PointSampler<'a> {
    pub fn new(f: &'a FunctionObject, cfg: &SamplerConfig) -> Result<Self> {
        cfg.validate()?;
        let region = resolve_region(f, cfg)?;
        let kinks = f
            .kinks()
            .iter()
            .enumerate()
            .map(|(i, ks)| {
                ks.iter()
                    .copied()
                    .filter(|k| region.lo()[i] <= *k && *k <= region.hi()[i])
                    .collect()
            })
            .collect();
        Ok(PointSampler {
            f,
            region,
            kinks,
            kink_probability: cfg.kink_probability,
            rng: rng(cfg.seed),
        })
    }

    pub fn region(&self) -> &BoxRegion {
        &self.region
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A point of the region; each coordinate independently lands on one of
    /// its kink loci with the configured probability.
    pub fn point(&mut self) -> Vec<f64> {
        loop {
            let x: Vec<f64> = (0..self.region.dim())
                .map(|i| {
                    let ks = &self.kinks[i];
                    if !ks.is_empty()
                        && self.kink_probability > 0.0
                        && self.rng.random_bool(self.kink_probability)
                    {
                        ks[self.rng.random_range(0..ks.len())]
                    } else {
                        self.rng
                            .random_range(self.region.lo()[i]..=self.region.hi()[i])
                    }
                })
                .collect();
            if self.f.domain().contains(&x) {
                return x;
            }
        }
    }
}

/// The configured region, or the function's sample region, after checking
/// that it lies inside the domain.
pub fn resolve_region(f: &FunctionObject, cfg: &SamplerConfig) -> Result<BoxRegion> {
    let region = cfg
        .region
        .clone()
        .unwrap_or_else(|| f.sample_region().clone());
    if region.dim() != f.dim() {
        return Err(InvexError::DimMismatch {
            expected: f.dim(),
            got: region.dim(),
        });
    }
    let probes = if region.dim() <= 10 {
        region.corners()
    } else {
        vec![region.lo().to_vec(), region.hi().to_vec()]
    };
    if let Some(p) = probes.into_iter().find(|p| !f.domain().contains(p)) {
        return Err(InvexError::Domain { point: p });
    }
    Ok(region)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::abs_atom;

    #[test]
    fn same_seed_same_points() {
        let f = abs_atom(1.0);
        let cfg = SamplerConfig::default();
        let mut a = PointSampler::new(&f, &cfg).unwrap();
        let mut b = PointSampler::new(&f, &cfg).unwrap();
        for _ in 0..100 {
            assert_eq!(a.point(), b.point());
        }
    }

    #[test]
    fn kink_loci_are_hit() {
        let f = abs_atom(1.0);
        let mut s = PointSampler::new(&f, &SamplerConfig::default()).unwrap();
        let hits = (0..10_000).filter(|_| s.point()[0] == 1.0).count();
        assert!((800..1200).contains(&hits), "{hits}");
    }

    #[test]
    fn region_outside_domain_is_rejected() {
        let f = crate::algebra::identity_positive();
        let cfg = SamplerConfig::default().with_region(BoxRegion::cube(1, -1.0, 1.0).unwrap());
        assert!(PointSampler::new(&f, &cfg).is_err());
        assert!(SamplerConfig::default().with_pairs(0).validate().is_err());
    }
}
