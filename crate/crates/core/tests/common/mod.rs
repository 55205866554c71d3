//! Independent reference implementations used by the integration tests.
//!
//! Everything here works on plain symbol vectors and never calls the
//! library's membership or ordering code.

#![allow(dead_code)]

use std::cmp::Ordering;

use cdelab::chain::ChainFamily;
use cdelab::construct::sample_dyadic41;
use cdelab::tree::{Branch, TreeKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn seeded_dyadic(seed: u64, count: usize, depth: usize) -> ChainFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_dyadic41(&mut rng, count, depth).expect("sampling succeeds")
}

/// The first `len` symbols of a branch, unrolled from its prefix and period.
pub fn unroll(x: &Branch, len: usize) -> Vec<u32> {
    let (p, q) = (x.prefix(), x.period());
    (0..len)
        .map(|i| if i < p.len() { p[i] } else { q[(i - p.len()) % q.len()] })
        .collect()
}

/// Lexicographic order of a finite sequence against a long enough unrolled
/// branch: a proper initial segment is below.
pub fn node_below(sigma: &[u32], x: &[u32]) -> bool {
    for (a, b) in sigma.iter().zip(x) {
        match a.cmp(b) {
            Ordering::Less => return true,
            Ordering::Greater => return false,
            Ordering::Equal => {}
        }
    }
    true
}

/// `σ ∈ A_x` on the dyadic tree: σ lies below x and is not `x|n⌢0` with `x(n) = 1`.
pub fn dyadic_member(sigma: &[u32], x: &[u32]) -> bool {
    let n = sigma.len();
    let exceptional = n > 0 && sigma[n - 1] == 0 && x[n - 1] == 1 && sigma[..n - 1] == x[..n - 1];
    node_below(sigma, x) && !exceptional
}

/// All dyadic nodes of length at most `depth`, shortest first.
pub fn dyadic_nodes(depth: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    let mut level = vec![Vec::new()];
    for _ in 0..depth {
        level = level
            .iter()
            .flat_map(|s: &Vec<u32>| {
                [0, 1].map(|b| {
                    let mut t = s.clone();
                    t.push(b);
                    t
                })
            })
            .collect();
        out.extend(level.iter().cloned());
    }
    out
}

/// Outcome of the brute-force lifting decision.
#[derive(Debug, PartialEq, Eq)]
pub enum BruteLifting {
    Sat,
    /// Some node at level ≥ k already breaks inclusion between two generators.
    Unsat { level: usize },
}

/// Decides whether some choice of memberships at levels below `k` turns the
/// sets of a dyadic family into a chain under inclusion.
///
/// With few free bits every assignment is tried. Otherwise every shallow node
/// is given a vector of the form `[i ≥ t]`, which covers all chains on those
/// nodes. Every candidate is checked against every pair of generators.
pub fn brute_force_lifting(family: &ChainFamily, k: usize) -> BruteLifting {
    assert_eq!(family.kind(), TreeKind::Dyadic);
    let depth = family.depth();
    let r = family.len();
    let gens: Vec<Vec<u32>> = family.generators().iter().map(|g| unroll(g, depth + 1)).collect();
    let nodes = dyadic_nodes(depth);
    let table: Vec<Vec<bool>> = nodes
        .iter()
        .map(|s| gens.iter().map(|x| dyadic_member(s, x)).collect())
        .collect();
    let includes = |bits: &[bool]| (0..r).all(|i| (i + 1..r).all(|j| !bits[i] || bits[j]));

    for (s, bits) in nodes.iter().zip(&table) {
        if s.len() >= k && !includes(bits) {
            return BruteLifting::Unsat { level: s.len() };
        }
    }
    let shallow: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i].len() < k).collect();
    let free = shallow.len() * r;
    if free <= 16 {
        for mask in 0u32..(1 << free) {
            let ok = shallow.iter().enumerate().all(|(slot, _)| {
                let bits: Vec<bool> = (0..r).map(|g| mask >> (slot * r + g) & 1 == 1).collect();
                includes(&bits)
            });
            if ok {
                return BruteLifting::Sat;
            }
        }
        return BruteLifting::Unsat { level: 0 };
    }
    let total = (r as u64 + 1).pow(shallow.len() as u32);
    for code in 0..total {
        let mut c = code;
        let ok = shallow.iter().all(|_| {
            let t = (c % (r as u64 + 1)) as usize;
            c /= r as u64 + 1;
            let bits: Vec<bool> = (0..r).map(|g| g >= t).collect();
            includes(&bits)
        });
        if ok {
            return BruteLifting::Sat;
        }
    }
    BruteLifting::Unsat { level: 0 }
}
