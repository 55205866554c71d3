//! Random instances of the dyadic and factorial almost-chain constructions.

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chain::ChainFamily;
use crate::error::{Error, Result};
use crate::tree::{sample_branch, sample_extension, Branch, Symbol, TailPolicy, TreeKind};

/// Extra random symbols drawn past the truncation depth so that generators
/// stay distinct beyond it.
pub const PREFIX_SLACK: usize = 8;

fn collect_distinct<R, F>(rng: &mut R, count: usize, mut draw: F, seen: &mut HashSet<Branch>, out: &mut Vec<Branch>) -> Result<()>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> Result<Branch>,
{
    let retry_budget = 4 * count + 16;
    let mut retries = 0;
    let target = out.len() + count;
    while out.len() < target {
        let b = draw(rng)?;
        if seen.insert(b.clone()) {
            out.push(b);
        } else {
            retries += 1;
            if retries > retry_budget {
                return Err(Error::SamplingCollisions(retries));
            }
        }
    }
    Ok(())
}

/// `count` distinct dyadic generators with uniform random prefixes and the
/// periodic tail `10`.
pub fn sample_dyadic41<R: Rng + ?Sized>(rng: &mut R, count: usize, depth: usize) -> Result<ChainFamily> {
    let policy = TailPolicy::new(depth + PREFIX_SLACK, vec![1, 0]);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    collect_distinct(
        rng,
        count,
        |r| sample_branch(TreeKind::Dyadic, r, &policy),
        &mut seen,
        &mut out,
    )?;
    ChainFamily::new(TreeKind::Dyadic, out, depth)
}

/// Where the factorial sampler plants a full fan of children.
///
/// A spine `y` is drawn at random; for every width `w` in `widths` with
/// `w ≤ depth`, one generator is planted through each child `y|(w−1)⌢i`,
/// `i < w`. The remaining generators are uniform random branches.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensitySeeding {
    pub widths: Vec<usize>,
}

impl Default for DensitySeeding {
    fn default() -> Self {
        DensitySeeding {
            widths: vec![4, 6, 8, 10, 12, 20, 24, 30, 40],
        }
    }
}

impl DensitySeeding {
    pub fn none() -> Self {
        DensitySeeding { widths: Vec::new() }
    }

    /// The longest prefix of `widths` whose planted generators fit in `count`.
    pub fn fitting(&self, count: usize, depth: usize) -> Self {
        let mut widths = Vec::new();
        let mut used = 0;
        for &w in &self.widths {
            let cost = if w >= 1 && w <= depth { w } else { 0 };
            if used + cost > count {
                break;
            }
            used += cost;
            widths.push(w);
        }
        DensitySeeding { widths }
    }

    pub fn planted_count(&self, depth: usize) -> usize {
        self.widths.iter().filter(|&&w| w >= 1 && w <= depth).sum()
    }
}

pub fn sample_factorial53<R: Rng + ?Sized>(
    rng: &mut R,
    count: usize,
    depth: usize,
    seeding: &DensitySeeding,
) -> Result<ChainFamily> {
    let kind = TreeKind::Factorial;
    let policy = TailPolicy::new(depth + PREFIX_SLACK, vec![0]);
    let planted = seeding.planted_count(depth);
    if planted > count {
        return Err(Error::Precondition(format!(
            "density seeding plants {planted} generators but only {count} were requested"
        )));
    }
    let spine = sample_branch(kind, rng, &policy)?;
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    for &w in seeding.widths.iter().filter(|&&w| w >= 1 && w <= depth) {
        let base = spine.truncate(w - 1);
        for i in 0..w as Symbol {
            let start = base.child(i)?;
            collect_distinct(rng, 1, |r| sample_extension(&start, r, &policy), &mut seen, &mut out)?;
        }
    }
    let rest = count - out.len();
    collect_distinct(rng, rest, |r| sample_branch(kind, r, &policy), &mut seen, &mut out)?;
    ChainFamily::new(kind, out, depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::verify_almost_chain;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dyadic_sampler_is_deterministic_and_passes() {
        let a = sample_dyadic41(&mut ChaCha8Rng::seed_from_u64(3), 64, 12).unwrap();
        let b = sample_dyadic41(&mut ChaCha8Rng::seed_from_u64(3), 64, 12).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 64);
        assert!(verify_almost_chain(&a).passed());
    }

    #[test]
    fn factorial_sampler_plants_fans() {
        let seeding = DensitySeeding { widths: vec![4, 6] };
        let fam = sample_factorial53(&mut ChaCha8Rng::seed_from_u64(5), 32, 10, &seeding).unwrap();
        assert_eq!(fam.len(), 32);
        assert!(verify_almost_chain(&fam).passed());
        assert!(sample_factorial53(&mut ChaCha8Rng::seed_from_u64(5), 5, 10, &seeding).is_err());
    }
}
