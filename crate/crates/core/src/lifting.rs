//! Finite chain liftings: modify every `A_x` below a level budget `k` so that
//! the modified sets `C_x` form a genuine chain.
//!
//! `C_x ⊆ C_y` for all `x ≺ y` says that at every node σ the vector
//! `(C_{x_0}(σ), C_{x_1}(σ), …)` is nondecreasing. Nodes of level `≥ k` cannot be
//! touched, so a violation there refutes every candidate of budget `k`.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Rational64;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{a_membership, Amendment, ChainFamily};
use crate::error::{Error, Result};
use crate::measure::{CutPoint, MeasureAssignment, SignedMeasure};
use crate::tree::{for_each_node_up_to, lex_cmp, Branch, TreeKind, TreeNode};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LiftingCandidate {
    pub budget: usize,
    /// Keyed by generator index.
    pub modifications: BTreeMap<usize, Amendment>,
}

impl LiftingCandidate {
    pub fn new(budget: usize) -> Self {
        LiftingCandidate {
            budget,
            modifications: BTreeMap::new(),
        }
    }

    pub fn modified_nodes(&self) -> usize {
        self.modifications
            .values()
            .map(|a| a.added.len() + a.removed.len())
            .sum()
    }

    /// Every modified node lies below the budget and every index names a generator.
    pub fn validate(&self, family: &ChainFamily) -> Result<()> {
        for (&i, a) in &self.modifications {
            if i >= family.len() {
                return Err(Error::MalformedCandidate(format!("no generator with index {i}")));
            }
            if let Some(n) = a.added.iter().chain(&a.removed).find(|n| n.len() >= self.budget) {
                return Err(Error::MalformedCandidate(format!(
                    "node {n} of level {} is outside budget {}",
                    n.len(),
                    self.budget
                )));
            }
        }
        Ok(())
    }

    /// `C_x(σ)` for generator `index`.
    pub fn contains(&self, family: &ChainFamily, sigma: &TreeNode, index: usize) -> bool {
        let base = family.contains(sigma, index);
        match self.modifications.get(&index) {
            Some(a) => a.apply(sigma, base),
            None => base,
        }
    }

    /// The family with the modifications folded into its amendments.
    pub fn apply_to(&self, family: &ChainFamily) -> Result<ChainFamily> {
        let mut out = family.clone();
        for (&i, a) in &self.modifications {
            let x = &family.generators()[i];
            let mut nodes: BTreeSet<&TreeNode> = a.added.iter().chain(&a.removed).collect();
            let previous = family.amendments().get(&i);
            if let Some(p) = previous {
                nodes.extend(p.added.iter().chain(&p.removed));
            }
            let mut merged = Amendment::default();
            for n in nodes {
                let base = a_membership(n, x);
                let now = self.contains(family, n, i);
                if now && !base {
                    merged.added.insert(n.clone());
                } else if !now && base {
                    merged.removed.insert(n.clone());
                }
            }
            out.amend(i, merged)?;
        }
        Ok(out)
    }

    /// `{budget, modifications: [{generator, added, removed}]}`.
    pub fn to_json(&self, family: &ChainFamily) -> Result<String> {
        let file = CandidateFile {
            budget: self.budget,
            modifications: self
                .modifications
                .iter()
                .map(|(&i, a)| ModificationRecord {
                    generator: family.generators()[i].to_string(),
                    added: a.added.iter().map(|n| n.to_string()).collect(),
                    removed: a.removed.iter().map(|n| n.to_string()).collect(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(family: &ChainFamily, text: &str) -> Result<Self> {
        let file: CandidateFile = serde_json::from_str(text)?;
        let kind = family.kind();
        let mut out = LiftingCandidate::new(file.budget);
        for m in file.modifications {
            let x = Branch::parse(kind, &m.generator)?;
            let i = family
                .index_of(&x)
                .ok_or_else(|| Error::MalformedCandidate(format!("{x} is not a generator")))?;
            let entry = out.modifications.entry(i).or_default();
            for n in &m.added {
                entry.added.insert(TreeNode::parse(kind, n)?);
            }
            for n in &m.removed {
                entry.removed.insert(TreeNode::parse(kind, n)?);
            }
        }
        out.validate(family)?;
        Ok(out)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ModificationRecord {
    generator: String,
    added: Vec<String>,
    removed: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CandidateFile {
    budget: usize,
    modifications: Vec<ModificationRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainCheck {
    Pass,
    /// `node ∈ C_lower \ C_upper` for adjacent generator indices.
    Violation { lower: usize, upper: usize, node: TreeNode },
}

impl ChainCheck {
    pub fn passed(&self) -> bool {
        matches!(self, ChainCheck::Pass)
    }
}

/// Nodes of level `≤ depth` whose vector under `candidate` fails to be
/// nondecreasing, each with the first adjacent pair it breaks.
fn violations(candidate: &LiftingCandidate, family: &ChainFamily) -> Result<BTreeMap<TreeNode, (usize, usize)>> {
    // Adjacent pairs suffice: a drop between two generators is a drop between
    // some consecutive ones at the same node.
    let amended = candidate.apply_to(family)?;
    let per_pair: Vec<Vec<TreeNode>> = (0..amended.len().saturating_sub(1))
        .into_par_iter()
        .map(|i| amended.violation_set(i, i + 1))
        .collect();
    let mut out = BTreeMap::new();
    for (i, nodes) in per_pair.into_iter().enumerate() {
        for n in nodes {
            out.entry(n).or_insert((i, i + 1));
        }
    }
    Ok(out)
}

fn shallow_first(a: &TreeNode, b: &TreeNode) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Whether `C_x ⊆ C_y` for all generators `x ≺ y` on nodes of level `≤ depth`.
/// A failure reports the shallowest violating node.
pub fn is_chain(candidate: &LiftingCandidate, family: &ChainFamily) -> Result<ChainCheck> {
    candidate.validate(family)?;
    let v = violations(candidate, family)?;
    Ok(match v.into_iter().min_by(|a, b| shallow_first(&a.0, &b.0)) {
        None => ChainCheck::Pass,
        Some((node, (lower, upper))) => ChainCheck::Violation { lower, upper, node },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Falsification {
    pub x: Branch,
    pub y: Branch,
    pub sigma: TreeNode,
    pub m: usize,
    pub budget: usize,
}

impl Falsification {
    /// Checks every defining condition against `family`.
    pub fn verify(&self, family: &ChainFamily) -> bool {
        let (Some(ix), Some(iy)) = (family.index_of(&self.x), family.index_of(&self.y)) else {
            return false;
        };
        let m = self.m;
        m > self.budget
            && m < family.depth()
            && lex_cmp(&self.x, &self.y) == std::cmp::Ordering::Less
            && self.x.divergence(&self.y) == Some(m)
            && self.x.symbol(m) == 0
            && self.y.symbol(m) == 1
            && self.sigma == self.x.truncate(m + 1)
            && family.contains(&self.sigma, ix)
            && !family.contains(&self.sigma, iy)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&CertificateFile {
            x: self.x.to_string(),
            y: self.y.to_string(),
            sigma: self.sigma.to_string(),
            m: self.m,
            budget: self.budget,
        })?)
    }

    pub fn from_json(kind: TreeKind, text: &str) -> Result<Self> {
        let f: CertificateFile = serde_json::from_str(text)?;
        Ok(Falsification {
            x: Branch::parse(kind, &f.x)?,
            y: Branch::parse(kind, &f.y)?,
            sigma: TreeNode::parse(kind, &f.sigma)?,
            m: f.m,
            budget: f.budget,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CertificateFile {
    x: String,
    y: String,
    sigma: String,
    m: usize,
    budget: usize,
}

/// A pair `x ≺ y` splitting at the deepest level `m > k` with `m + 1 ≤ depth`,
/// and `σ = x|(m+1) ∈ A_x \ A_y`.
pub fn falsify(family: &ChainFamily, k: usize) -> Result<Option<Falsification>> {
    if family.kind() != TreeKind::Dyadic {
        return Err(Error::Precondition("falsification certificates need the dyadic tree".into()));
    }
    let gens = family.generators();
    // The divergence of x_i ≺ x_j is the least adjacent divergence between
    // them, so the deepest split is attained by an adjacent pair.
    let best = (0..gens.len().saturating_sub(1))
        .into_par_iter()
        .filter_map(|i| {
            let cert = Falsification {
                x: gens[i].clone(),
                y: gens[i + 1].clone(),
                sigma: gens[i].truncate(family.divergence(i, i + 1) + 1),
                m: family.divergence(i, i + 1),
                budget: k,
            };
            cert.verify(family).then_some((cert.m, std::cmp::Reverse(i), cert))
        })
        .max_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    Ok(best.map(|(_, _, c)| c))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnsatCertificate {
    Falsified(Falsification),
    /// `node` has level `≥ k`, so its vector cannot be changed, and it drops
    /// between `lower` and `upper`.
    Exhausted { node: TreeNode, lower: usize, upper: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiftingVerdict {
    Sat(LiftingCandidate),
    Unsat(UnsatCertificate),
    Unknown { violating_nodes: usize, budget: usize },
}

impl LiftingVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            LiftingVerdict::Sat(_) => "SAT",
            LiftingVerdict::Unsat(_) => "UNSAT",
            LiftingVerdict::Unknown { .. } => "UNKNOWN",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            LiftingVerdict::Sat(_) => 0,
            LiftingVerdict::Unsat(_) => 1,
            LiftingVerdict::Unknown { .. } => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Most violating nodes the exact search will repair.
    pub max_nodes: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 1 << 20 }
    }
}

/// Decides whether a candidate of budget `k` makes the family a chain.
///
/// A greedy pass replaces every shallow vector by its upward hull
/// `C_{x_i}(σ) = ⋁_{j ≤ i} A_{x_j}(σ)`; if that does not verify, each shallow
/// node is assigned the nondecreasing vector closest to its own.
pub fn search_lifting(family: &ChainFamily, k: usize, budget: SearchBudget) -> Result<LiftingVerdict> {
    if k > family.depth() {
        return Err(Error::Precondition(format!("budget {k} exceeds depth {}", family.depth())));
    }
    let base = violations(&LiftingCandidate::new(k), family)?;
    if let Some((node, &(lower, upper))) = base
        .iter()
        .filter(|(n, _)| n.len() >= k)
        .min_by(|a, b| shallow_first(a.0, b.0))
    {
        if family.kind() == TreeKind::Dyadic {
            if let Some(f) = falsify(family, k)? {
                return Ok(LiftingVerdict::Unsat(UnsatCertificate::Falsified(f)));
            }
        }
        return Ok(LiftingVerdict::Unsat(UnsatCertificate::Exhausted {
            node: node.clone(),
            lower,
            upper,
        }));
    }
    if base.len() > budget.max_nodes {
        return Ok(LiftingVerdict::Unknown {
            violating_nodes: base.len(),
            budget: budget.max_nodes,
        });
    }
    let r = family.len();
    let greedy = repair(family, k, base.keys(), |bits| {
        let mut seen = false;
        bits.iter()
            .map(|&b| {
                seen |= b;
                seen
            })
            .collect()
    });
    if is_chain(&greedy, family)?.passed() {
        return Ok(LiftingVerdict::Sat(greedy));
    }
    let exact = repair(family, k, base.keys(), |bits| {
        let best = (0..=r)
            .min_by_key(|&t| bits.iter().enumerate().filter(|&(i, &b)| b != (i >= t)).count())
            .unwrap_or(r);
        (0..r).map(|i| i >= best).collect()
    });
    if is_chain(&exact, family)?.passed() {
        return Ok(LiftingVerdict::Sat(exact));
    }
    Ok(LiftingVerdict::Unknown {
        violating_nodes: base.len(),
        budget: budget.max_nodes,
    })
}

fn repair<'a, I, F>(family: &ChainFamily, k: usize, nodes: I, fix: F) -> LiftingCandidate
where
    I: Iterator<Item = &'a TreeNode>,
    F: Fn(&[bool]) -> Vec<bool>,
{
    let mut cand = LiftingCandidate::new(k);
    for sigma in nodes {
        let bits = family.membership_vector(sigma).0;
        for (i, (&old, new)) in bits.iter().zip(fix(&bits)).enumerate() {
            if old != new {
                let a = cand.modifications.entry(i).or_default();
                if new {
                    a.added.insert(sigma.clone());
                } else {
                    a.removed.insert(sigma.clone());
                }
            }
        }
    }
    cand
}

/// Dirac measures at the cut where each node's lifted vector switches on:
/// `⊥` if every `C_x` contains it, otherwise the cut just above the last
/// generator whose set misses it.
pub struct RetractionFamily<'a> {
    family: &'a ChainFamily,
    candidate: &'a LiftingCandidate,
}

impl<'a> RetractionFamily<'a> {
    pub fn new(family: &'a ChainFamily, candidate: &'a LiftingCandidate) -> Result<Self> {
        if !is_chain(candidate, family)?.passed() {
            return Err(Error::Precondition("retractions need a chain candidate".into()));
        }
        Ok(RetractionFamily { family, candidate })
    }

    pub fn point(&self, sigma: &TreeNode) -> CutPoint {
        let gens = self.family.generators();
        match (0..gens.len()).find(|&i| self.candidate.contains(self.family, sigma, i)) {
            Some(0) => CutPoint::Bottom,
            Some(p) => CutPoint::Branch(gens[p - 1].clone()),
            None => match gens.last() {
                Some(g) => CutPoint::Branch(g.clone()),
                None => CutPoint::Top,
            },
        }
    }
}

impl MeasureAssignment<Rational64> for RetractionFamily<'_> {
    fn kind(&self) -> TreeKind {
        self.family.kind()
    }

    fn for_each_entry(&self, visit: &mut dyn FnMut(&TreeNode, &SignedMeasure<Rational64>)) -> Result<()> {
        for_each_node_up_to(self.family.kind(), self.family.depth(), u128::MAX, |sigma| {
            let mu = SignedMeasure::from_atoms([(self.point(sigma), Rational64::one())]);
            visit(sigma, &mu);
        })
    }
}
