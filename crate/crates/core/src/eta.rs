//! Minimal norms of extension witnesses on finite truncations.
//!
//! For a node σ with membership vector `b`, a measure supported on the cuts
//! `⊥ < g_0 < g_1 < … < ⊤` satisfies the generator constraints exactly when its
//! running sums `S_i = μ(A_{g_i})` stay in the tube `[b_i − ε, b_i + ε]` and its
//! total mass is within `ε` of 1. The least total variation of such a path is
//! computed by a taut-string sweep.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{a_membership, ChainFamily, MembershipVector};
use crate::error::{Error, Result};
use crate::measure::{CutPoint, SignedMeasure};
use crate::tree::{count_up_to, for_each_node_up_to, lex_cmp, Branch, Symbol, TreeKind, TreeNode};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tube {
    /// `b_1..b_m`; the terminal target 1 is implicit.
    pub targets: Vec<f64>,
    pub epsilon: f64,
}

impl Tube {
    pub fn new(targets: Vec<f64>, epsilon: f64) -> Result<Tube> {
        if epsilon.is_nan() || epsilon < 0.0 || !epsilon.is_finite() {
            return Err(Error::Precondition(format!("tube tolerance {epsilon} must be finite and ≥ 0")));
        }
        if targets.iter().any(|t| !t.is_finite()) {
            return Err(Error::Precondition("tube targets must be finite".into()));
        }
        Ok(Tube { targets, epsilon })
    }

    pub fn from_membership(v: &MembershipVector, epsilon: f64) -> Result<Tube> {
        Tube::new(v.as_f64(), epsilon)
    }

    /// Number of constraints including the terminal one.
    pub fn len(&self) -> usize {
        self.targets.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Constraint `i` as a closed interval; `i = targets.len()` is the terminal one.
    pub fn interval(&self, i: usize) -> (f64, f64) {
        let b = self.targets.get(i).copied().unwrap_or(1.0);
        (b - self.epsilon, b + self.epsilon)
    }
}

/// Flat sets of the cost-to-reach functions and the accumulated cost.
fn sweep(t: &Tube) -> (f64, Vec<(f64, f64)>) {
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    let mut cost = 0.0;
    let mut flats = Vec::with_capacity(t.len());
    for i in 0..t.len() {
        let (a, b) = t.interval(i);
        if b < lo {
            cost += lo - b;
            lo = b;
            hi = b;
        } else if a > hi {
            cost += a - hi;
            lo = a;
            hi = a;
        } else {
            lo = lo.max(a);
            hi = hi.min(b);
        }
        flats.push((lo, hi));
    }
    (cost, flats)
}

/// Least `Σ|v_i|` over increment sequences whose running sums stay in the tube.
pub fn min_norm_taut_string(t: &Tube) -> f64 {
    sweep(t).0
}

/// An optimal sequence of running sums `S_1..S_{m+1}`.
pub fn taut_string_path(t: &Tube) -> Vec<f64> {
    let (_, flats) = sweep(t);
    let mut path = vec![0.0; flats.len()];
    let mut next = flats.last().map(|f| f.0).unwrap_or(0.0);
    for (i, &(lo, hi)) in flats.iter().enumerate().rev() {
        next = next.clamp(lo, hi);
        path[i] = next;
    }
    path
}

/// The cut-supported measure realizing `path` against the generators of `family`:
/// the increment `S_1` sits at `⊥`, `S_{i+1} − S_i` at the cut just above `g_{i−1}`,
/// and the final increment at `⊤`.
pub fn optimal_measure(family: &ChainFamily, path: &[f64]) -> Result<SignedMeasure<f64>> {
    let gens = family.generators();
    if path.len() != gens.len() + 1 {
        return Err(Error::Precondition(format!(
            "path of length {} does not match {} generators",
            path.len(),
            gens.len()
        )));
    }
    let mut prev = 0.0;
    let mut atoms = Vec::with_capacity(path.len());
    for (i, &s) in path.iter().enumerate() {
        let cut = if i == 0 {
            CutPoint::Bottom
        } else if i == gens.len() {
            CutPoint::Top
        } else {
            CutPoint::Branch(gens[i - 1].clone())
        };
        atoms.push((cut, s - prev));
        prev = s;
    }
    Ok(SignedMeasure::from_atoms(atoms))
}

/// Membership vector of `sigma` using the sorted generator order: the
/// generators above σ form a suffix and those with `σ ∈ S_x` extend σ's parent.
fn fast_membership(family: &ChainFamily, sigma: &TreeNode) -> MembershipVector {
    let gens = family.generators();
    let first_above = gens.partition_point(|g| lex_cmp(sigma, g) != std::cmp::Ordering::Less);
    let mut bits = vec![false; gens.len()];
    for b in &mut bits[first_above..] {
        *b = true;
    }
    let n = sigma.len();
    if n > 0 && sigma.last() == Some(0) {
        let parent = sigma.truncate(n - 1);
        let (a, b) = extension_range(gens, &parent);
        for (i, bit) in bits.iter_mut().enumerate().take(b).skip(a) {
            if family.kind().marks_exception(gens[i].symbol(n - 1)) {
                *bit = false;
            }
        }
    }
    for (&i, amendment) in family.amendments() {
        bits[i] = amendment.apply(sigma, bits[i]);
    }
    MembershipVector(bits)
}

/// Index range of the generators extending `prefix`.
fn extension_range(gens: &[Branch], prefix: &TreeNode) -> (usize, usize) {
    let p = prefix.symbols();
    let key = |g: &Branch| (0..p.len()).map(|i| g.symbol(i)).cmp(p.iter().copied());
    let a = gens.partition_point(|g| key(g) == std::cmp::Ordering::Less);
    let b = gens.partition_point(|g| key(g) != std::cmp::Ordering::Greater);
    (a, b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtaScope {
    /// Every node with `h ≤ |σ| ≤ depth`.
    Exhaustive,
    /// Only nodes `g|j⌢0` for generators `g`; every non-monotone vector occurs there.
    GeneratorNeighbourhood,
    /// Exhaustive when the tree below depth has at most `EXHAUSTIVE_BUDGET` nodes.
    Auto,
}

pub const EXHAUSTIVE_BUDGET: u128 = 1 << 23;

#[derive(Clone, Debug, PartialEq)]
pub struct EtaEstimate {
    pub value: f64,
    /// Lex-least node attaining the value.
    pub argmax: Option<TreeNode>,
    pub nodes_examined: u64,
    pub scope: EtaScope,
}

impl fmt::Display for EtaEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "eta >= {} ({} nodes", self.value, self.nodes_examined)?;
        if let Some(s) = &self.argmax {
            write!(f, ", attained at {s}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug)]
struct Best {
    value: f64,
    node: Option<TreeNode>,
    count: u64,
}

impl Best {
    fn empty() -> Best {
        Best {
            value: f64::NEG_INFINITY,
            node: None,
            count: 0,
        }
    }

    fn offer(&mut self, value: f64, node: &TreeNode) {
        self.count += 1;
        let better = value > self.value
            || (value == self.value && self.node.as_ref().is_some_and(|n| node < n));
        if better {
            self.value = value;
            self.node = Some(node.clone());
        }
    }

    fn merge(mut self, other: Best) -> Best {
        self.count += other.count;
        match other.node {
            Some(n) => {
                self.count -= 1;
                self.offer(other.value, &n);
                self
            }
            None => self,
        }
    }
}

fn score(family: &ChainFamily, sigma: &TreeNode, epsilon: f64) -> f64 {
    let v = fast_membership(family, sigma);
    min_norm_taut_string(&Tube {
        targets: v.as_f64(),
        epsilon,
    })
}

/// `max { η(σ) : h ≤ |σ| ≤ depth }` where `η(σ)` is the least norm of a
/// cut-supported measure meeting σ's generator constraints within `ε`.
pub fn eta_lower_estimate(family: &ChainFamily, horizon: usize, epsilon: f64, scope: EtaScope) -> Result<EtaEstimate> {
    let depth = family.depth();
    if horizon > depth {
        return Err(Error::Precondition(format!("horizon {horizon} exceeds depth {depth}")));
    }
    Tube::new(Vec::new(), epsilon)?;
    let scope = match scope {
        EtaScope::Auto => match count_up_to(family.kind(), depth) {
            Some(c) if c <= EXHAUSTIVE_BUDGET => EtaScope::Exhaustive,
            _ => EtaScope::GeneratorNeighbourhood,
        },
        s => s,
    };
    let best = match scope {
        EtaScope::Exhaustive => exhaustive(family, horizon, epsilon)?,
        _ => neighbourhood(family, horizon, epsilon),
    };
    Ok(EtaEstimate {
        value: if best.node.is_some() { best.value } else { 0.0 },
        argmax: best.node,
        nodes_examined: best.count,
        scope,
    })
}

fn exhaustive(family: &ChainFamily, horizon: usize, epsilon: f64) -> Result<Best> {
    let kind = family.kind();
    let depth = family.depth();
    let total = count_up_to(kind, depth).unwrap_or(u128::MAX);
    if total > EXHAUSTIVE_BUDGET {
        return Err(Error::Budget {
            what: "nodes for an exhaustive eta scan",
            needed: total,
            budget: EXHAUSTIVE_BUDGET,
        });
    }
    // Split at the first level with enough nodes to keep every thread busy.
    let split = (0..=depth)
        .find(|&l| kind.level_size(l).is_some_and(|s| s >= 256))
        .unwrap_or(depth);
    let mut top = Best::empty();
    let mut roots = Vec::new();
    for_each_node_up_to(kind, split, EXHAUSTIVE_BUDGET, |sigma| {
        if sigma.len() == split {
            roots.push(sigma.clone());
        } else if sigma.len() >= horizon {
            top.offer(score(family, sigma, epsilon), sigma);
        }
    })?;
    let below = roots
        .par_iter()
        .map(|root| {
            let mut best = Best::empty();
            let mut node = root.clone();
            subtree(family, &mut node, horizon, depth, epsilon, &mut best);
            best
        })
        .reduce(Best::empty, Best::merge);
    Ok(top.merge(below))
}

fn subtree(family: &ChainFamily, node: &mut TreeNode, horizon: usize, depth: usize, epsilon: f64, best: &mut Best) {
    if node.len() >= horizon {
        let s = score(family, node, epsilon);
        best.offer(s, node);
    }
    if node.len() == depth {
        return;
    }
    let arity = family.kind().arity_at(node.len());
    for i in 0..arity as Symbol {
        node.push(i).expect("symbol within arity");
        subtree(family, node, horizon, depth, epsilon, best);
        node.pop();
    }
}

/// The nodes `g|j⌢0` with `h ≤ j+1 ≤ depth`, plus every amended node in range.
pub fn neighbourhood_nodes(family: &ChainFamily, horizon: usize) -> BTreeSet<TreeNode> {
    let depth = family.depth();
    let mut nodes = BTreeSet::new();
    for g in family.generators() {
        for j in horizon.saturating_sub(1)..depth {
            let mut n = g.truncate(j);
            n.push(0).expect("0 is always admissible");
            if n.len() >= horizon {
                nodes.insert(n);
            }
        }
    }
    for a in family.amendments().values() {
        for n in a.added.iter().chain(&a.removed) {
            if n.len() >= horizon && n.len() <= depth {
                nodes.insert(n.clone());
            }
        }
    }
    nodes
}

fn neighbourhood(family: &ChainFamily, horizon: usize, epsilon: f64) -> Best {
    let nodes: Vec<TreeNode> = neighbourhood_nodes(family, horizon).into_iter().collect();
    nodes
        .par_iter()
        .map(|sigma| {
            let mut b = Best::empty();
            b.offer(score(family, sigma, epsilon), sigma);
            b
        })
        .reduce(Best::empty, Best::merge)
}

/// Child symbols `i ≤ n` such that some generator passes through `prefix⌢i`.
pub fn children_hit(family: &ChainFamily, prefix: &TreeNode) -> BTreeSet<Symbol> {
    let gens = family.generators();
    let (a, b) = extension_range(gens, prefix);
    gens[a..b].iter().map(|g| g.symbol(prefix.len())).collect()
}

/// Fraction of the `n+1` children of `y|n` hit by some generator.
pub fn density_profile(family: &ChainFamily, y: &Branch, n: usize) -> Result<f64> {
    if family.kind() != TreeKind::Factorial {
        return Err(Error::Precondition("density profiles need the factorial tree".into()));
    }
    let hit = children_hit(family, &y.truncate(n));
    Ok(hit.len() as f64 / (n + 1) as f64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountingReport {
    pub n: usize,
    pub p: usize,
    pub k: usize,
    pub hit: usize,
    /// `|I|·(2p+1) ≥ 2p·(n+1)`.
    pub density_claim: bool,
    /// `|I ∩ J_i|` for the blocks `J_i = [2ki, 2k(i+1))`.
    pub block_counts: Vec<usize>,
    /// Every block count exceeds `k`.
    pub block_claim: bool,
}

impl CountingReport {
    pub fn passed(&self) -> bool {
        self.density_claim && self.block_claim
    }
}

pub fn verify_counting_claims(hit: &BTreeSet<Symbol>, p: usize, k: usize, n: usize) -> Result<CountingReport> {
    if p == 0 || k == 0 || n + 1 != 2 * p * k {
        return Err(Error::Precondition(format!("need n + 1 = 2pk with p, k ≥ 1 (n = {n}, p = {p}, k = {k})")));
    }
    let in_range = hit.iter().filter(|&&i| (i as usize) <= n).count();
    let density_claim = (in_range as u128) * (2 * p as u128 + 1) >= 2 * p as u128 * (n as u128 + 1);
    let block_counts: Vec<usize> = (0..p)
        .map(|i| {
            hit.range((2 * k * i) as Symbol..(2 * k * (i + 1)) as Symbol)
                .count()
        })
        .collect();
    let block_claim = block_counts.iter().all(|&c| c > k);
    Ok(CountingReport {
        n,
        p,
        k,
        hit: in_range,
        density_claim,
        block_counts,
        block_claim,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlternatingWitness {
    pub sigma: TreeNode,
    pub xs: Vec<Branch>,
    pub p: usize,
    /// Level of the density point `y|n`; zero for the trivial case.
    pub n: usize,
    pub density: f64,
    /// Child symbols `m_j` of `y|n` chosen for the generators.
    pub children: Vec<Symbol>,
    pub counting: Option<CountingReport>,
}

impl AlternatingWitness {
    /// Whether memberships of σ alternate `1, 0, 1, …` along `xs`, which are increasing.
    pub fn verify(&self) -> bool {
        self.xs.len() == self.p
            && self.xs.windows(2).all(|w| lex_cmp(&w[0], &w[1]) == std::cmp::Ordering::Less)
            && self
                .xs
                .iter()
                .enumerate()
                .all(|(j, x)| a_membership(&self.sigma, x) == (j % 2 == 0))
    }

    /// The tube of σ's memberships along `xs`.
    pub fn tube(&self, epsilon: f64) -> Result<Tube> {
        let bits = MembershipVector(self.xs.iter().map(|x| a_membership(&self.sigma, x)).collect());
        Tube::from_membership(&bits, epsilon)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AlternatingSearch {
    Found(AlternatingWitness),
    NotFound { best_density: f64 },
}

/// Scans the prefixes `y|n` of generators with `2p | n+1` for density above
/// `2p/(2p+1)`, then picks children of alternating parity from consecutive
/// blocks and sets `σ = y|n⌢0`.
pub fn find_alternating_witness(family: &ChainFamily, p: usize) -> Result<AlternatingSearch> {
    if family.kind() != TreeKind::Factorial {
        return Err(Error::Precondition("alternating witnesses need the factorial tree".into()));
    }
    if p == 0 {
        return Err(Error::Precondition("p must be at least 1".into()));
    }
    let gens = family.generators();
    if p == 1 {
        return Ok(match gens.first() {
            Some(x) => AlternatingSearch::Found(AlternatingWitness {
                sigma: TreeNode::root(TreeKind::Factorial),
                xs: vec![x.clone()],
                p: 1,
                n: 0,
                density: 1.0,
                children: Vec::new(),
                counting: None,
            }),
            None => AlternatingSearch::NotFound { best_density: 0.0 },
        });
    }
    let mut best_density = 0.0f64;
    let mut seen = BTreeSet::new();
    for y in gens {
        let mut n = 2 * p - 1;
        while n < family.depth() {
            let prefix = y.truncate(n);
            if seen.insert(prefix.clone()) {
                let hit = children_hit(family, &prefix);
                let density = hit.len() as f64 / (n + 1) as f64;
                best_density = best_density.max(density);
                if hit.len() * (2 * p + 1) > 2 * p * (n + 1) {
                    if let Some(w) = extract(family, &prefix, &hit, p, density)? {
                        return Ok(AlternatingSearch::Found(w));
                    }
                }
            }
            n += 2 * p;
        }
    }
    Ok(AlternatingSearch::NotFound { best_density })
}

fn extract(
    family: &ChainFamily,
    prefix: &TreeNode,
    hit: &BTreeSet<Symbol>,
    p: usize,
    density: f64,
) -> Result<Option<AlternatingWitness>> {
    let n = prefix.len();
    let k = (n + 1) / (2 * p);
    let counting = verify_counting_claims(hit, p, k, n)?;
    if !counting.passed() {
        return Ok(None);
    }
    let gens = family.generators();
    let mut children = Vec::with_capacity(p);
    let mut xs = Vec::with_capacity(p);
    for j in 0..p {
        let block = (2 * k * j) as Symbol..(2 * k * (j + 1)) as Symbol;
        let Some(&m) = hit.range(block).find(|&&m| m as usize % 2 == j % 2) else {
            return Ok(None);
        };
        let (a, _) = extension_range(gens, &prefix.child(m)?);
        children.push(m);
        xs.push(gens[a].clone());
    }
    let witness = AlternatingWitness {
        sigma: prefix.child(0)?,
        xs,
        p,
        n,
        density,
        children,
        counting: Some(counting),
    };
    Ok(witness.verify().then_some(witness))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tube(b: &[f64], eps: f64) -> Tube {
        Tube::new(b.to_vec(), eps).unwrap()
    }

    #[test]
    fn taut_string_examples() {
        assert_eq!(min_norm_taut_string(&tube(&[1.0, 0.0, 1.0], 0.0)), 3.0);
        assert_eq!(min_norm_taut_string(&tube(&[1.0, 0.0, 1.0], 0.25)), 1.75);
        assert_eq!(min_norm_taut_string(&tube(&[0.0, 0.0, 1.0, 1.0], 0.0)), 1.0);
        assert_eq!(min_norm_taut_string(&tube(&[], 0.0)), 1.0);
        assert_eq!(taut_string_path(&tube(&[1.0, 0.0, 1.0], 0.25)), vec![0.75, 0.25, 0.75, 0.75]);
    }

    #[test]
    fn path_cost_matches_minimum() {
        let t = tube(&[0.0, 1.0, 0.0, 0.0, 1.0, 0.0], 0.1);
        let path = taut_string_path(&t);
        let mut prev = 0.0;
        let mut cost = 0.0;
        for (i, s) in path.iter().enumerate() {
            let (a, b) = t.interval(i);
            assert!(*s >= a - 1e-12 && *s <= b + 1e-12);
            cost += (s - prev).abs();
            prev = *s;
        }
        assert!((cost - min_norm_taut_string(&t)).abs() < 1e-12);
    }

    #[test]
    fn invalid_tubes_rejected() {
        assert!(Tube::new(vec![1.0], -0.1).is_err());
        assert!(Tube::new(vec![f64::NAN], 0.0).is_err());
    }

    #[test]
    fn single_generator_estimate_is_one() {
        let fam = ChainFamily::new(TreeKind::Dyadic, vec![Branch::parse(TreeKind::Dyadic, "0|01").unwrap()], 8).unwrap();
        let e = eta_lower_estimate(&fam, 0, 0.0, EtaScope::Exhaustive).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.nodes_examined, 511);
    }

    #[test]
    fn split_pair_estimate_is_three() {
        let d = TreeKind::Dyadic;
        let fam = ChainFamily::new(d, vec![Branch::parse(d, "|01").unwrap(), Branch::parse(d, "|10").unwrap()], 6).unwrap();
        let e = eta_lower_estimate(&fam, 1, 0.0, EtaScope::Exhaustive).unwrap();
        assert_eq!(e.value, 3.0);
        assert_eq!(e.argmax, Some(TreeNode::parse(d, "0").unwrap()));
        let n = eta_lower_estimate(&fam, 1, 0.0, EtaScope::GeneratorNeighbourhood).unwrap();
        assert_eq!((n.value, n.argmax), (e.value, e.argmax));
    }

    #[test]
    fn fast_membership_matches_definition() {
        let d = TreeKind::Dyadic;
        let gens = ["|01", "|10", "0|10", "011|01", "1|01", "00|01"]
            .iter()
            .map(|s| Branch::parse(d, s).unwrap())
            .collect();
        let fam = ChainFamily::new(d, gens, 7).unwrap();
        for_each_node_up_to(d, 7, 1 << 10, |s| {
            assert_eq!(fast_membership(&fam, s), fam.membership_vector(s), "{s}");
        })
        .unwrap();
    }

    #[test]
    fn optimal_measure_meets_constraints() {
        let d = TreeKind::Dyadic;
        let fam = ChainFamily::new(d, vec![Branch::parse(d, "|01").unwrap(), Branch::parse(d, "|10").unwrap()], 6).unwrap();
        let sigma = TreeNode::parse(d, "0").unwrap();
        let t = Tube::from_membership(&fam.membership_vector(&sigma), 0.0).unwrap();
        let mu = optimal_measure(&fam, &taut_string_path(&t)).unwrap();
        assert_eq!(mu.total_variation(), 3.0);
        assert_eq!(mu.evaluate(&fam.generators()[0]), 1.0);
        assert_eq!(mu.evaluate(&fam.generators()[1]), 0.0);
        assert_eq!(mu.total_mass(), 1.0);
    }

    #[test]
    fn counting_claims() {
        let full: BTreeSet<Symbol> = (0..12).collect();
        assert!(verify_counting_claims(&full, 3, 2, 11).unwrap().passed());
        let gap: BTreeSet<Symbol> = (0..12).filter(|i| !(4..8).contains(i)).collect();
        let r = verify_counting_claims(&gap, 3, 2, 11).unwrap();
        assert!(!r.block_claim);
        assert_eq!(r.block_counts, vec![4, 0, 4]);
        assert!(verify_counting_claims(&full, 3, 2, 10).is_err());
    }

    #[test]
    fn density_examples() {
        let f = TreeKind::Factorial;
        let spine = Branch::new(f, vec![0; 9], vec![0]).unwrap();
        let mut gens = Vec::new();
        for i in (0..10).step_by(2) {
            let mut prefix = vec![0; 9];
            prefix.push(i);
            gens.push(Branch::new(f, prefix, vec![0]).unwrap());
        }
        let fam = ChainFamily::new(f, gens, 12).unwrap();
        assert_eq!(density_profile(&fam, &spine, 9).unwrap(), 0.5);
        let off = Branch::new(f, vec![0, 1], vec![0]).unwrap();
        assert_eq!(density_profile(&fam, &off, 9).unwrap(), 0.0);
    }

    #[test]
    fn full_fan_gives_witness() {
        let f = TreeKind::Factorial;
        let gens = (0..6)
            .map(|i| Branch::new(f, vec![0, 1, 2, 1, 3, i], vec![0]).unwrap())
            .collect();
        let fam = ChainFamily::new(f, gens, 8).unwrap();
        let AlternatingSearch::Found(w) = find_alternating_witness(&fam, 3).unwrap() else {
            panic!("expected a witness");
        };
        assert!(w.verify());
        assert_eq!(w.children, vec![0, 3, 4]);
        assert!(min_norm_taut_string(&w.tube(0.25).unwrap()) >= 1.0);
        assert!(matches!(
            find_alternating_witness(&fam, 5).unwrap(),
            AlternatingSearch::NotFound { .. }
        ));
    }
}
