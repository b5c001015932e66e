//! Seeded sample points in a coordinate box, with rejection of points where
//! the quantities under test are singular.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const DEFAULT_SEED: u64 = 20170101;
const DRAWS_PER_POINT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleBox {
    pub lo: f64,
    pub hi: f64,
}

impl Default for SampleBox {
    fn default() -> Self {
        SampleBox { lo: -1.0, hi: 1.0 }
    }
}

/// `count` points in `dim` dimensions, each accepted by `admissible`.
pub fn sample_points(
    dim: usize,
    count: usize,
    seed: u64,
    domain: SampleBox,
    admissible: impl Fn(&[f64]) -> bool,
) -> Result<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let budget = DRAWS_PER_POINT * count.max(1);
    let mut tried = 0;
    while out.len() < count {
        if tried == budget {
            return Err(Error::Sampling {
                wanted: count,
                found: out.len(),
                tried,
            });
        }
        tried += 1;
        let p: Vec<f64> = (0..dim).map(|_| rng.gen_range(domain.lo..domain.hi)).collect();
        if admissible(&p) {
            out.push(p);
        }
    }
    Ok(out)
}
