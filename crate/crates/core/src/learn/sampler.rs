//! Seeded subset samplers used by the sampling equivalence oracle.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::attrs::AttributeSet;
use crate::error::{Error, Result};

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th independent stream under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// The distribution subsets are drawn from.
#[derive(Clone, Debug, PartialEq)]
pub enum SamplerKind {
    /// Every attribute independently with probability 1/2.
    Uniform,
    /// Attribute `i` independently with probability `p[i]`.
    Biased(Vec<f64>),
}

impl SamplerKind {
    pub fn descriptor(&self) -> String {
        self.to_string()
    }

    pub fn validate(&self, universe_len: usize) -> Result<()> {
        if let SamplerKind::Biased(probs) = self {
            if probs.len() != universe_len {
                return Err(Error::invalid(format!(
                    "{} inclusion probabilities for {universe_len} attributes",
                    probs.len()
                )));
            }
            if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(Error::invalid(format!("inclusion probability {p} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplerKind::Uniform => write!(f, "uniform"),
            SamplerKind::Biased(p) => {
                let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                write!(f, "biased:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    /// `uniform` or `biased:p1,p2,...`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "uniform" {
            return Ok(SamplerKind::Uniform);
        }
        let probs = s
            .strip_prefix("biased:")
            .ok_or_else(|| Error::invalid(format!("unknown sampler {s:?}")))?;
        let probs = probs
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::invalid(format!("bad probability {p:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::invalid(format!("inclusion probability {p} outside [0, 1]")));
        }
        Ok(SamplerKind::Biased(probs))
    }
}

/// Draws subsets of a fixed universe from a seeded ChaCha8 stream.
#[derive(Clone, Debug)]
pub struct SubsetSampler {
    kind: SamplerKind,
    universe_len: usize,
    rng: ChaCha8Rng,
}

impl SubsetSampler {
    pub fn new(kind: SamplerKind, universe_len: usize, seed: u64) -> Result<Self> {
        kind.validate(universe_len)?;
        Ok(Self {
            kind,
            universe_len,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn draw(&mut self) -> AttributeSet {
        let mut set = AttributeSet::empty(self.universe_len);
        match &self.kind {
            SamplerKind::Uniform => {
                for w in set.words_mut() {
                    *w = self.rng.next_u64();
                }
                set.clear_tail();
            }
            SamplerKind::Biased(probs) => {
                for (i, &p) in probs.iter().enumerate() {
                    if self.rng.gen_bool(p) {
                        set.insert(i);
                    }
                }
            }
        }
        set
    }

    pub fn kind(&self) -> &SamplerKind {
        &self.kind
    }

    pub fn descriptor(&self) -> String {
        self.kind.descriptor()
    }
}

pub fn uniform_sampler(universe_len: usize, seed: u64) -> SubsetSampler {
    SubsetSampler::new(SamplerKind::Uniform, universe_len, seed).expect("uniform sampler is always valid")
}

pub fn biased_sampler(probabilities: Vec<f64>, seed: u64) -> Result<SubsetSampler> {
    let n = probabilities.len();
    SubsetSampler::new(SamplerKind::Biased(probabilities), n, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_inclusion_frequency() {
        let n = 10;
        let mut s = uniform_sampler(n, 11);
        let draws = 100_000;
        let mut counts = vec![0usize; n];
        for _ in 0..draws {
            for i in s.draw().iter() {
                counts[i] += 1;
            }
        }
        for c in counts {
            let f = c as f64 / draws as f64;
            assert!((0.49..=0.51).contains(&f), "frequency {f}");
        }
    }

    #[test]
    fn reproducible_under_seed() {
        let mut a = uniform_sampler(70, 42);
        let mut b = uniform_sampler(70, 42);
        let mut c = uniform_sampler(70, 43);
        let xs: Vec<_> = (0..50).map(|_| a.draw()).collect();
        let ys: Vec<_> = (0..50).map(|_| b.draw()).collect();
        let zs: Vec<_> = (0..50).map(|_| c.draw()).collect();
        assert_eq!(xs, ys);
        assert_ne!(xs, zs);
        assert!(xs.iter().all(|x| x.universe_len() == 70));

        let mut p = biased_sampler(vec![0.3; 5], 9).unwrap();
        let mut q = biased_sampler(vec![0.3; 5], 9).unwrap();
        assert!((0..50).all(|_| p.draw() == q.draw()));
    }

    #[test]
    fn empty_universe_draws_empty_set() {
        let mut s = uniform_sampler(0, 1);
        assert!((0..10).all(|_| s.draw().is_empty()));
    }

    #[test]
    fn degenerate_biases() {
        let mut ones = biased_sampler(vec![1.0; 6], 3).unwrap();
        let mut zeros = biased_sampler(vec![0.0; 6], 3).unwrap();
        for _ in 0..100 {
            assert!(ones.draw().is_full());
            assert!(zeros.draw().is_empty());
        }
        assert!(biased_sampler(vec![0.5, 1.5], 0).is_err());
        assert!(biased_sampler(vec![-0.1], 0).is_err());
        assert!(SubsetSampler::new(SamplerKind::Biased(vec![0.5]), 2, 0).is_err());
    }

    #[test]
    fn half_bias_matches_uniform_distribution() {
        // Chi-squared goodness of fit against the uniform law on 2^4 subsets,
        // for both samplers. 15 degrees of freedom, p = 0.001 critical value.
        const CRITICAL: f64 = 37.697;
        let n = 4;
        let draws = 64_000;
        let chi2 = |mut draw: Box<dyn FnMut() -> AttributeSet>| {
            let mut hist = vec![0f64; 1 << n];
            for _ in 0..draws {
                hist[draw().lectic_rank() as usize] += 1.0;
            }
            let expected = draws as f64 / (1 << n) as f64;
            hist.iter().map(|o| (o - expected).powi(2) / expected).sum::<f64>()
        };
        let mut b = biased_sampler(vec![0.5; n], 5).unwrap();
        let mut u = uniform_sampler(n, 5);
        assert!(chi2(Box::new(move || b.draw())) < CRITICAL);
        assert!(chi2(Box::new(move || u.draw())) < CRITICAL);
    }

    #[test]
    fn descriptor_round_trips() {
        for kind in [SamplerKind::Uniform, SamplerKind::Biased(vec![0.25, 1.0, 0.0])] {
            assert_eq!(kind.descriptor().parse::<SamplerKind>().unwrap(), kind);
        }
        assert!("gaussian".parse::<SamplerKind>().is_err());
        assert!("biased:0.2,x".parse::<SamplerKind>().is_err());
    }

    #[test]
    fn derived_seeds_differ() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| derive_seed(7, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_eq!(derive_seed(7, 3), derive_seed(7, 3));
    }
}
