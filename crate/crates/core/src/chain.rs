//! Almost chains `A_x = {σ : σ ≺ x} \ S_x` indexed by sorted generator
//! branches, where `S_x = {x|n⌢0 : x(n) marks an exception}`. The dyadic and
//! factorial constructions share this code and differ only in
//! [`TreeKind::marks_exception`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{for_each_node_up_to, lex_cmp, Branch, TreeKind, TreeNode, DEFAULT_LEVEL_BUDGET};

/// Nodes explicitly added to or removed from a generated set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Amendment {
    pub added: BTreeSet<TreeNode>,
    pub removed: BTreeSet<TreeNode>,
}

impl Amendment {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty()
    }

    /// Applies the amendment to a base membership bit.
    pub fn apply(&self, node: &TreeNode, base: bool) -> bool {
        if base {
            !self.removed.contains(node)
        } else {
            self.added.contains(node)
        }
    }
}

/// `σ ∈ S_x`: σ = x|(n−1)⌢0 where `x(n−1)` marks an exception.
#[inline]
pub fn in_exception_set(sigma: &TreeNode, x: &Branch) -> bool {
    let n = sigma.len();
    if n == 0 || sigma.last() != Some(0) {
        return false;
    }
    let s = sigma.symbols();
    x.kind().marks_exception(x.symbol(n - 1)) && (0..n - 1).all(|i| s[i] == x.symbol(i))
}

/// The exception set `S_x` truncated to `n < depth` (so nodes of length at most `depth`).
pub fn s_set(x: &Branch, depth: usize) -> Vec<TreeNode> {
    (0..depth)
        .filter(|&n| x.kind().marks_exception(x.symbol(n)))
        .map(|n| {
            let mut node = x.truncate(n);
            // 0 is admissible at every position of both trees.
            node.push(0).expect("0 is always admissible");
            node
        })
        .collect()
}

/// `σ ∈ A_x`.
#[inline]
pub fn a_membership(sigma: &TreeNode, x: &Branch) -> bool {
    lex_cmp(sigma, x) == Ordering::Less && !in_exception_set(sigma, x)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MembershipVector(pub Vec<bool>);

impl MembershipVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of positions `i` with `bits[i] = 1` and `bits[i+1] = 0`.
    pub fn descents(&self) -> usize {
        self.0.windows(2).filter(|w| w[0] && !w[1]).count()
    }

    pub fn is_monotone(&self) -> bool {
        self.descents() == 0
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }
}

impl fmt::Display for MembershipVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Ordered family `{A_x : x ∈ X}` truncated at `depth`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainFamily {
    kind: TreeKind,
    generators: Vec<Branch>,
    depth: usize,
    amendments: BTreeMap<usize, Amendment>,
}

impl ChainFamily {
    /// Sorts and deduplicates the generators. Dyadic generators must have
    /// both symbols in their tail.
    pub fn new(kind: TreeKind, mut generators: Vec<Branch>, depth: usize) -> Result<Self> {
        for g in &generators {
            if g.kind() != kind {
                return Err(Error::KindMismatch {
                    left: kind,
                    right: g.kind(),
                });
            }
            if !g.is_admissible_generator() {
                return Err(Error::Precondition(format!(
                    "generator {g} does not take both symbols infinitely often"
                )));
            }
        }
        generators.sort_by(lex_cmp);
        generators.dedup();
        Ok(ChainFamily {
            kind,
            generators,
            depth,
            amendments: BTreeMap::new(),
        })
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn generators(&self) -> &[Branch] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn with_depth(&self, depth: usize) -> ChainFamily {
        ChainFamily {
            depth,
            ..self.clone()
        }
    }

    pub fn amendments(&self) -> &BTreeMap<usize, Amendment> {
        &self.amendments
    }

    /// Replaces the set of generator `index` by `(A_x ∪ added) \ removed`.
    /// Used to load hand-edited families.
    pub fn amend(&mut self, index: usize, amendment: Amendment) -> Result<()> {
        if index >= self.len() {
            return Err(Error::Precondition(format!("no generator with index {index}")));
        }
        for node in amendment.added.iter().chain(&amendment.removed) {
            if node.kind() != self.kind {
                return Err(Error::KindMismatch {
                    left: self.kind,
                    right: node.kind(),
                });
            }
        }
        if amendment.is_empty() {
            self.amendments.remove(&index);
        } else {
            self.amendments.insert(index, amendment);
        }
        Ok(())
    }

    pub fn index_of(&self, x: &Branch) -> Option<usize> {
        self.generators.binary_search_by(|g| lex_cmp(g, x)).ok()
    }

    /// Membership of `sigma` in the set of generator `index`, amendments included.
    #[inline]
    pub fn contains(&self, sigma: &TreeNode, index: usize) -> bool {
        let base = a_membership(sigma, &self.generators[index]);
        match self.amendments.get(&index) {
            Some(a) => a.apply(sigma, base),
            None => base,
        }
    }

    pub fn membership_vector(&self, sigma: &TreeNode) -> MembershipVector {
        MembershipVector((0..self.len()).map(|i| self.contains(sigma, i)).collect())
    }

    /// `{σ : σ ∈ A_lower \ A_upper, |σ| ≤ depth}` for generator indices `lower < upper`.
    ///
    /// Without amendments, σ ∈ A_lower forces σ ≺ lower ≺ upper, so σ ∉ A_upper
    /// only through `S_upper`; amendments add their own nodes to the candidates.
    pub fn violation_set(&self, lower: usize, upper: usize) -> Vec<TreeNode> {
        let mut candidates: BTreeSet<TreeNode> = s_set(&self.generators[upper], self.depth)
            .into_iter()
            .collect();
        if let Some(a) = self.amendments.get(&lower) {
            candidates.extend(a.added.iter().cloned());
        }
        if let Some(a) = self.amendments.get(&upper) {
            candidates.extend(a.removed.iter().cloned());
        }
        candidates
            .into_iter()
            .filter(|s| s.len() <= self.depth && self.contains(s, lower) && !self.contains(s, upper))
            .collect()
    }

    pub fn divergence(&self, lower: usize, upper: usize) -> usize {
        self.generators[lower]
            .divergence(&self.generators[upper])
            .expect("generators are pairwise distinct")
    }
}

#[derive(Clone, Debug)]
pub struct PairViolations {
    pub lower: usize,
    pub upper: usize,
    pub divergence: usize,
    pub nodes: Vec<TreeNode>,
    /// Nodes whose length exceeds `divergence + 1`.
    pub out_of_bound: Vec<TreeNode>,
}

#[derive(Clone, Debug)]
pub struct ChainReport {
    pub pairs_checked: usize,
    /// Pairs with a nonempty violation set.
    pub violations: Vec<PairViolations>,
}

impl ChainReport {
    pub fn passed(&self) -> bool {
        self.violations.iter().all(|v| v.out_of_bound.is_empty())
    }

    pub fn failures(&self) -> impl Iterator<Item = &PairViolations> {
        self.violations.iter().filter(|v| !v.out_of_bound.is_empty())
    }

    /// Deepest level at which any violation occurs.
    pub fn max_violation_level(&self) -> Option<usize> {
        self.violations
            .iter()
            .flat_map(|v| v.nodes.iter().map(|n| n.len()))
            .max()
    }
}

/// Checks `A_x ⊆* A_y` for every pair `x ≺ y` by certifying that all
/// violations lie at or below one level past the divergence of `x` and `y`.
pub fn verify_almost_chain(family: &ChainFamily) -> ChainReport {
    let r = family.len();
    let mut violations = Vec::new();
    for lower in 0..r {
        for upper in lower + 1..r {
            let nodes = family.violation_set(lower, upper);
            if nodes.is_empty() {
                continue;
            }
            let divergence = family.divergence(lower, upper);
            let out_of_bound = nodes
                .iter()
                .filter(|n| n.len() > divergence + 1)
                .cloned()
                .collect();
            violations.push(PairViolations {
                lower,
                upper,
                divergence,
                nodes,
                out_of_bound,
            });
        }
    }
    ChainReport {
        pairs_checked: r * r.saturating_sub(1) / 2,
        violations,
    }
}

pub fn membership_vector(sigma: &TreeNode, family: &ChainFamily) -> MembershipVector {
    family.membership_vector(sigma)
}

#[derive(Clone, Debug)]
pub struct Atom {
    pub vector: MembershipVector,
    /// Member nodes in lexicographic order.
    pub nodes: Vec<TreeNode>,
}

/// Groups the nodes with `min_level ≤ |σ| ≤ depth` by membership vector.
/// Atoms are ordered by their first node.
pub fn atoms(family: &ChainFamily, min_level: usize) -> Result<Vec<Atom>> {
    let mut groups: BTreeMap<MembershipVector, Vec<TreeNode>> = BTreeMap::new();
    for_each_node_up_to(family.kind(), family.depth(), DEFAULT_LEVEL_BUDGET, |node| {
        if node.len() >= min_level {
            groups
                .entry(family.membership_vector(node))
                .or_default()
                .push(node.clone());
        }
    })?;
    let mut out: Vec<Atom> = groups
        .into_iter()
        .map(|(vector, nodes)| Atom { vector, nodes })
        .collect();
    out.sort_by(|a, b| a.nodes[0].cmp(&b.nodes[0]));
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
struct AmendmentFile {
    generator: String,
    #[serde(default)]
    added: Vec<String>,
    #[serde(default)]
    removed: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ChainFile {
    kind: TreeKind,
    depth: usize,
    generators: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    amendments: Vec<AmendmentFile>,
}

impl ChainFamily {
    /// `{kind, depth, generators: [branch literals]}` plus optional amendments.
    pub fn to_json(&self) -> Result<String> {
        let file = ChainFile {
            kind: self.kind,
            depth: self.depth,
            generators: self.generators.iter().map(|g| g.to_string()).collect(),
            amendments: self
                .amendments
                .iter()
                .map(|(&i, a)| AmendmentFile {
                    generator: self.generators[i].to_string(),
                    added: a.added.iter().map(|n| n.to_string()).collect(),
                    removed: a.removed.iter().map(|n| n.to_string()).collect(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ChainFile = serde_json::from_str(text)?;
        let generators = file
            .generators
            .iter()
            .map(|s| Branch::parse(file.kind, s))
            .collect::<Result<Vec<_>>>()?;
        let mut family = ChainFamily::new(file.kind, generators, file.depth)?;
        for a in file.amendments {
            let g = Branch::parse(file.kind, &a.generator)?;
            let index = family
                .index_of(&g)
                .ok_or_else(|| Error::Precondition(format!("amendment for unknown generator {g}")))?;
            let parse = |v: &[String]| {
                v.iter()
                    .map(|s| TreeNode::parse(file.kind, s))
                    .collect::<Result<BTreeSet<_>>>()
            };
            family.amend(
                index,
                Amendment {
                    added: parse(&a.added)?,
                    removed: parse(&a.removed)?,
                },
            )?;
        }
        Ok(family)
    }

    /// Membership matrix: one row per node (in the given order), one 0/1 column per generator.
    pub fn write_membership_csv<W: Write>(&self, out: W, nodes: &[TreeNode]) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["node".to_string()];
        header.extend(self.generators.iter().map(|g| g.to_string()));
        w.write_record(&header)?;
        for node in nodes {
            let mut row = vec![node.to_string()];
            row.extend(
                self.membership_vector(node)
                    .0
                    .iter()
                    .map(|&b| if b { "1".to_string() } else { "0".to_string() }),
            );
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const D: TreeKind = TreeKind::Dyadic;
    const F: TreeKind = TreeKind::Factorial;

    fn node(kind: TreeKind, s: &str) -> TreeNode {
        TreeNode::parse(kind, s).unwrap()
    }

    fn branch(kind: TreeKind, s: &str) -> Branch {
        Branch::parse(kind, s).unwrap()
    }

    #[test]
    fn s_set_examples() {
        let x = branch(D, "|10");
        assert_eq!(s_set(&x, 4), vec![node(D, "0"), node(D, "100")]);
        // 000… is not a legal generator, but S_x is still defined.
        let zero = Branch::new(D, vec![], vec![0]).unwrap();
        assert!(s_set(&zero, 10).is_empty());
        let f = Branch::new(F, vec![0, 1, 2, 3], vec![0]).unwrap();
        assert_eq!(s_set(&f, 4), vec![node(F, "0,0"), node(F, "0,1,2,0")]);
    }

    #[test]
    fn membership_examples() {
        let x = branch(D, "|10");
        assert!(a_membership(&node(D, "10"), &x));
        assert!(!a_membership(&node(D, "0"), &x));
        assert!(!a_membership(&node(D, "11"), &x));
    }

    #[test]
    fn root_vector_is_all_ones() {
        let fam = ChainFamily::new(
            D,
            vec![branch(D, "0|10"), branch(D, "11|01"), branch(D, "01|10")],
            6,
        )
        .unwrap();
        let v = fam.membership_vector(&TreeNode::root(D));
        assert!(v.0.iter().all(|&b| b));
        let top = node(D, "111111");
        assert!(fam.membership_vector(&top).0.iter().all(|&b| !b));
    }

    #[test]
    fn split_pair_has_descent_at_falsifier_node() {
        // x = 0101…, y = 1010…: divergence 0, σ = x|1 = ⟨0⟩ ∈ A_x \ A_y.
        let fam = ChainFamily::new(D, vec![branch(D, "|01"), branch(D, "|10")], 5).unwrap();
        let sigma = node(D, "0");
        assert_eq!(fam.membership_vector(&sigma).to_string(), "10");
        let report = verify_almost_chain(&fam);
        assert!(report.passed());
        assert_eq!(report.violations[0].nodes, vec![sigma]);
    }

    #[test]
    fn single_generator_is_vacuous() {
        let fam = ChainFamily::new(D, vec![branch(D, "|10")], 8).unwrap();
        let report = verify_almost_chain(&fam);
        assert!(report.passed());
        assert_eq!(report.pairs_checked, 0);
    }

    #[test]
    fn corrupted_family_fails_with_node_listed() {
        let mut fam = ChainFamily::new(D, vec![branch(D, "|01"), branch(D, "|10")], 6).unwrap();
        // 0011 lies far below the divergence level 0; drop it from A_y.
        let bad = node(D, "0011");
        assert!(fam.contains(&bad, 0) && fam.contains(&bad, 1));
        fam.amend(
            1,
            Amendment {
                removed: [bad.clone()].into(),
                ..Default::default()
            },
        )
        .unwrap();
        let report = verify_almost_chain(&fam);
        assert!(!report.passed());
        let failure = report.failures().next().unwrap();
        assert_eq!(failure.out_of_bound, vec![bad]);
    }

    #[test]
    fn factorial_violations_stay_at_divergence_plus_one() {
        let gens = vec![
            Branch::new(F, vec![0, 1, 2, 3, 2], vec![0]).unwrap(),
            Branch::new(F, vec![0, 1, 2, 3, 3], vec![0]).unwrap(),
            Branch::new(F, vec![0, 1, 0, 1], vec![0]).unwrap(),
            Branch::new(F, vec![0, 0, 1, 3], vec![0]).unwrap(),
        ];
        let fam = ChainFamily::new(F, gens, 8).unwrap();
        let report = verify_almost_chain(&fam);
        assert!(report.passed());
        // x = 0,1,2,3,2 ≺ y = 0,1,2,3,3 diverge at 4 with y(4) odd and x(4) even > 0.
        let v = report
            .violations
            .iter()
            .find(|v| v.divergence == 4)
            .unwrap();
        assert_eq!(v.nodes, vec![node(F, "0,1,2,3,0")]);
    }

    #[test]
    fn atoms_partition_nodes() {
        let fam = ChainFamily::new(D, vec![branch(D, "|01"), branch(D, "1|10")], 6).unwrap();
        let atoms = atoms(&fam, 0).unwrap();
        let total: usize = atoms.iter().map(|a| a.nodes.len()).sum();
        assert_eq!(total, 127);
        let deep = super::atoms(&fam, 3).unwrap();
        assert!(deep.len() <= fam.len() + 1);
    }

    #[test]
    fn json_round_trip_with_amendments() {
        let mut fam = ChainFamily::new(D, vec![branch(D, "|01"), branch(D, "|10")], 6).unwrap();
        fam.amend(
            0,
            Amendment {
                added: [node(D, "111")].into(),
                ..Default::default()
            },
        )
        .unwrap();
        let text = fam.to_json().unwrap();
        assert_eq!(ChainFamily::from_json(&text).unwrap(), fam);
    }

    #[test]
    fn generators_are_sorted_and_deduplicated() {
        let fam = ChainFamily::new(
            D,
            vec![branch(D, "1|01"), branch(D, "|01"), branch(D, "|10")],
            4,
        )
        .unwrap();
        assert_eq!(fam.len(), 2);
        assert!(lex_cmp(&fam.generators()[0], &fam.generators()[1]) == Ordering::Less);
    }

    #[test]
    fn illegal_dyadic_generator_rejected() {
        let zero = Branch::new(D, vec![1], vec![0]).unwrap();
        assert!(ChainFamily::new(D, vec![zero], 4).is_err());
    }
}
