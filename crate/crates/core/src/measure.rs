//! Points of the compact line as cuts of the generator order, finitely
//! supported signed measures on them, and the explicit norm-3 witnesses for
//! the dyadic construction.
//!
//! A cut anchored at a node or branch `a` is the ultrafilter containing `A_x`
//! exactly when `a ≺ x`. So a measure evaluated on `A_x` sums the weights of
//! the cuts strictly below `x`; `⊥` lies below every generator and `⊤` above.

use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::chain::{a_membership, ChainFamily};
use crate::error::{Error, Result};
use crate::tree::{for_each_node_up_to, lex_cmp, Branch, TreeKind, TreeNode, DEFAULT_LEVEL_BUDGET};

/// Scalar type for measure weights: exact rationals for verification,
/// `f64` for optimisation.
pub trait Weight:
    Clone + Debug + Display + PartialEq + PartialOrd + Zero + One + Signed + Send + Sync + 'static
{
    fn to_f64(&self) -> f64;
    fn parse_weight(text: &str) -> Result<Self>;
}

impl Weight for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }

    /// Accepts decimals and `a/b` fractions.
    fn parse_weight(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.contains('/') {
            return Rational64::parse_weight(text).map(|r| r.to_f64());
        }
        f64::from_str(text).map_err(|e| Error::InvalidLiteral {
            literal: text.to_string(),
            reason: e.to_string(),
        })
    }
}

impl Weight for Rational64 {
    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }

    fn parse_weight(text: &str) -> Result<Self> {
        Rational64::from_str(text.trim()).map_err(|e| Error::InvalidLiteral {
            literal: text.to_string(),
            reason: e.to_string(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CutPoint {
    Bottom,
    Node(TreeNode),
    Branch(Branch),
    Top,
}

impl CutPoint {
    /// Whether the ultrafilter of this cut contains `A_x`.
    #[inline]
    pub fn precedes(&self, x: &Branch) -> bool {
        match self {
            CutPoint::Bottom => true,
            CutPoint::Top => false,
            CutPoint::Node(n) => lex_cmp(n, x) == Ordering::Less,
            CutPoint::Branch(b) => lex_cmp(b, x) == Ordering::Less,
        }
    }

    pub fn kind(&self) -> Option<TreeKind> {
        match self {
            CutPoint::Node(n) => Some(n.kind()),
            CutPoint::Branch(b) => Some(b.kind()),
            _ => None,
        }
    }

    pub fn parse(kind: TreeKind, text: &str) -> Result<CutPoint> {
        match text.trim() {
            "BOT" => Ok(CutPoint::Bottom),
            "TOP" => Ok(CutPoint::Top),
            t if t.contains('|') => Branch::parse(kind, t).map(CutPoint::Branch),
            t => TreeNode::parse(kind, t).map(CutPoint::Node),
        }
    }
}

impl Ord for CutPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        use CutPoint::*;
        match (self, other) {
            (Bottom, Bottom) | (Top, Top) => Ordering::Equal,
            (Bottom, _) | (_, Top) => Ordering::Less,
            (_, Bottom) | (Top, _) => Ordering::Greater,
            (Node(a), Node(b)) => lex_cmp(a, b),
            (Node(a), Branch(b)) => lex_cmp(a, b),
            (Branch(a), Node(b)) => lex_cmp(a, b),
            (Branch(a), Branch(b)) => lex_cmp(a, b),
        }
    }
}

impl PartialOrd for CutPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CutPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutPoint::Bottom => f.write_str("BOT"),
            CutPoint::Top => f.write_str("TOP"),
            CutPoint::Node(n) => write!(f, "{n}"),
            CutPoint::Branch(b) => write!(f, "{b}"),
        }
    }
}

impl<W: Weight> fmt::Display for SignedMeasure<W> {
    /// `1 δ[101] - 1 δ[11]`; the zero measure prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("0");
        }
        for (i, (cut, w)) in self.atoms.iter().enumerate() {
            let sep = match (i, w.is_negative()) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            write!(f, "{sep}{} δ[{cut}]", w.abs())?;
        }
        Ok(())
    }
}

/// A finite combination of Dirac measures at cuts, stored with strictly
/// increasing cuts and no zero weights.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedMeasure<W> {
    atoms: Vec<(CutPoint, W)>,
}

impl<W: Weight> SignedMeasure<W> {
    pub fn zero() -> Self {
        SignedMeasure { atoms: Vec::new() }
    }

    pub fn dirac(cut: CutPoint) -> Self {
        SignedMeasure {
            atoms: vec![(cut, W::one())],
        }
    }

    /// Sorts the atoms, merges equal cuts and drops zero weights.
    pub fn from_atoms<I: IntoIterator<Item = (CutPoint, W)>>(atoms: I) -> Self {
        let mut raw: Vec<(CutPoint, W)> = atoms.into_iter().collect();
        raw.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(CutPoint, W)> = Vec::with_capacity(raw.len());
        for (cut, w) in raw {
            match merged.last_mut() {
                Some((c, acc)) if *c == cut => *acc = acc.clone() + w,
                _ => merged.push((cut, w)),
            }
        }
        merged.retain(|(_, w)| !w.is_zero());
        SignedMeasure { atoms: merged }
    }

    pub fn atoms(&self) -> &[(CutPoint, W)] {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn plus(&self, other: &SignedMeasure<W>) -> SignedMeasure<W> {
        SignedMeasure::from_atoms(self.atoms.iter().chain(&other.atoms).cloned())
    }

    pub fn scaled(&self, factor: &W) -> SignedMeasure<W> {
        SignedMeasure::from_atoms(
            self.atoms
                .iter()
                .map(|(c, w)| (c.clone(), w.clone() * factor.clone())),
        )
    }

    /// `μ(A_x)`: the weight of all cuts strictly below `x`.
    pub fn evaluate(&self, x: &Branch) -> W {
        self.atoms
            .iter()
            .filter(|(c, _)| c.precedes(x))
            .fold(W::zero(), |acc, (_, w)| acc + w.clone())
    }

    /// `‖μ‖ = μ⁺(K) + μ⁻(K)`.
    pub fn total_variation(&self) -> W {
        self.atoms
            .iter()
            .fold(W::zero(), |acc, (_, w)| acc + w.abs())
    }

    pub fn total_mass(&self) -> W {
        self.atoms
            .iter()
            .fold(W::zero(), |acc, (_, w)| acc + w.clone())
    }

    pub fn positive_part(&self) -> SignedMeasure<W> {
        SignedMeasure {
            atoms: self
                .atoms
                .iter()
                .filter(|(_, w)| w.is_positive())
                .cloned()
                .collect(),
        }
    }

    pub fn negative_part(&self) -> SignedMeasure<W> {
        SignedMeasure {
            atoms: self
                .atoms
                .iter()
                .filter(|(_, w)| w.is_negative())
                .map(|(c, w)| (c.clone(), w.abs()))
                .collect(),
        }
    }

    /// Weight of the cuts `c` with `lower ≼ c ≺ upper`.
    pub fn mass_between(&self, lower: &Branch, upper: &Branch) -> W {
        self.atoms
            .iter()
            .filter(|(c, _)| !c.precedes(lower) && c.precedes(upper))
            .fold(W::zero(), |acc, (_, w)| acc + w.clone())
    }

    pub fn map_weights<V: Weight, F: Fn(&W) -> V>(&self, f: F) -> SignedMeasure<V> {
        SignedMeasure::from_atoms(self.atoms.iter().map(|(c, w)| (c.clone(), f(w))))
    }

    pub fn to_f64(&self) -> SignedMeasure<f64> {
        self.map_weights(|w| w.to_f64())
    }

    pub(crate) fn to_records(&self) -> Vec<AtomRecord> {
        self.atoms
            .iter()
            .map(|(c, w)| AtomRecord {
                cut: c.to_string(),
                weight: w.to_string(),
            })
            .collect()
    }

    pub(crate) fn from_records(kind: TreeKind, records: &[AtomRecord]) -> Result<Self> {
        let atoms = records
            .iter()
            .map(|r| Ok((CutPoint::parse(kind, &r.cut)?, W::parse_weight(&r.weight)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(SignedMeasure::from_atoms(atoms))
    }

    /// `[{cut, weight}]` with cut literals (`BOT`, `TOP`, node or branch) and weights as strings.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_records())?)
    }

    pub fn from_json(kind: TreeKind, text: &str) -> Result<Self> {
        let records: Vec<AtomRecord> = serde_json::from_str(text)?;
        Self::from_records(kind, &records)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub(crate) struct AtomRecord {
    pub cut: String,
    pub weight: String,
}

/// A measure attached to each isolated point (tree node) in some scope.
pub trait MeasureAssignment<W: Weight> {
    fn kind(&self) -> TreeKind;
    fn for_each_entry(&self, visit: &mut dyn FnMut(&TreeNode, &SignedMeasure<W>)) -> Result<()>;
}

/// The witness measure `μ_σ` of a dyadic node.
///
/// * last symbol 1 (or the root): `δ_{p(σ)}`;
/// * last symbol 0 and all earlier symbols 1: `δ_{p(σ)} − δ_{p(σ′)} + δ_⊤`;
/// * otherwise: `δ_{p(σ)} − δ_{p(σ′)} + δ_{p(σ″)}`,
///
/// where `σ′ = σ|(n−1)⌢1` and `σ″ = σ|m⌢1` for the last `m < n−1` with `σ(m) = 0`.
/// The atom at `⊤` is invisible to every generator and brings the total mass to 1.
pub fn witness_measure(sigma: &TreeNode) -> Result<SignedMeasure<Rational64>> {
    if sigma.kind() != TreeKind::Dyadic {
        return Err(Error::KindMismatch {
            left: TreeKind::Dyadic,
            right: sigma.kind(),
        });
    }
    let one = Rational64::one();
    let here = (CutPoint::Node(sigma.clone()), one);
    let n = sigma.len();
    if n == 0 || sigma.last() == Some(1) {
        return Ok(SignedMeasure::from_atoms([here]));
    }
    let s = sigma.symbols();
    let sigma1 = sigma.truncate(n - 1).child(1)?;
    let mut atoms = vec![here, (CutPoint::Node(sigma1), -one)];
    match (0..n - 1).rev().find(|&m| s[m] == 0) {
        Some(m) => atoms.push((CutPoint::Node(sigma.truncate(m).child(1)?), one)),
        None => atoms.push((CutPoint::Top, one)),
    }
    Ok(SignedMeasure::from_atoms(atoms))
}

/// `δ_σ(A_x)`.
pub fn delta_point(sigma: &TreeNode, x: &Branch) -> bool {
    a_membership(sigma, x)
}

#[derive(Clone, Debug)]
pub struct WitnessMismatch {
    pub generator: usize,
    pub value: Rational64,
    pub expected: bool,
}

#[derive(Clone, Debug)]
pub struct WitnessCheck {
    pub node: TreeNode,
    pub total_variation: Rational64,
    pub mismatches: Vec<WitnessMismatch>,
}

impl WitnessCheck {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Exact check that `μ_σ(A_x) = δ_σ(A_x)` for every generator of a dyadic family.
pub fn verify_witness_claim(sigma: &TreeNode, family: &ChainFamily) -> Result<WitnessCheck> {
    if family.kind() != TreeKind::Dyadic {
        return Err(Error::Precondition("witness measures need a dyadic family".into()));
    }
    let mu = witness_measure(sigma)?;
    let mismatches = (0..family.len())
        .filter_map(|i| {
            let value = mu.evaluate(&family.generators()[i]);
            let expected = family.contains(sigma, i);
            let target = if expected {
                Rational64::one()
            } else {
                Rational64::zero()
            };
            (value != target).then_some(WitnessMismatch {
                generator: i,
                value,
                expected,
            })
        })
        .collect();
    Ok(WitnessCheck {
        node: sigma.clone(),
        total_variation: mu.total_variation(),
        mismatches,
    })
}

#[derive(Clone, Debug)]
pub struct WitnessFamilyReport {
    pub nodes_checked: u64,
    pub pairs_checked: u64,
    pub max_total_variation: Rational64,
    pub failures: Vec<WitnessCheck>,
    pub failure_count: u64,
}

impl WitnessFamilyReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

const MAX_REPORTED_FAILURES: usize = 16;

/// Runs [`verify_witness_claim`] for every node of length at most the family depth.
pub fn verify_witness_family(family: &ChainFamily) -> Result<WitnessFamilyReport> {
    if family.kind() != TreeKind::Dyadic {
        return Err(Error::Precondition("witness measures need a dyadic family".into()));
    }
    let mut report = WitnessFamilyReport {
        nodes_checked: 0,
        pairs_checked: 0,
        max_total_variation: Rational64::zero(),
        failures: Vec::new(),
        failure_count: 0,
    };
    let mut inner: Result<()> = Ok(());
    for_each_node_up_to(TreeKind::Dyadic, family.depth(), DEFAULT_LEVEL_BUDGET, |sigma| {
        if inner.is_err() {
            return;
        }
        match verify_witness_claim(sigma, family) {
            Ok(check) => {
                report.nodes_checked += 1;
                report.pairs_checked += family.len() as u64;
                if check.total_variation > report.max_total_variation {
                    report.max_total_variation = check.total_variation;
                }
                if !check.passed() {
                    report.failure_count += 1;
                    if report.failures.len() < MAX_REPORTED_FAILURES {
                        report.failures.push(check);
                    }
                }
            }
            Err(e) => inner = Err(e),
        }
    })?;
    inner?;
    Ok(report)
}

/// The witness family `(μ_σ)` over all nodes up to the depth of a dyadic family.
pub struct WitnessFamily<'a> {
    family: &'a ChainFamily,
}

impl<'a> WitnessFamily<'a> {
    pub fn new(family: &'a ChainFamily) -> Result<Self> {
        if family.kind() != TreeKind::Dyadic {
            return Err(Error::Precondition("witness measures need a dyadic family".into()));
        }
        Ok(WitnessFamily { family })
    }
}

impl MeasureAssignment<Rational64> for WitnessFamily<'_> {
    fn kind(&self) -> TreeKind {
        TreeKind::Dyadic
    }

    fn for_each_entry(&self, visit: &mut dyn FnMut(&TreeNode, &SignedMeasure<Rational64>)) -> Result<()> {
        for_each_node_up_to(TreeKind::Dyadic, self.family.depth(), DEFAULT_LEVEL_BUDGET, |sigma| {
            let mu = witness_measure(sigma).expect("dyadic node");
            visit(sigma, &mu);
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const D: TreeKind = TreeKind::Dyadic;

    fn node(s: &str) -> TreeNode {
        TreeNode::parse(D, s).unwrap()
    }

    fn branch(s: &str) -> Branch {
        Branch::parse(D, s).unwrap()
    }

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    fn cut(s: &str) -> CutPoint {
        CutPoint::Node(node(s))
    }

    #[test]
    fn evaluate_examples() {
        let x = branch("|10");
        let mu: SignedMeasure<Rational64> = SignedMeasure::dirac(cut("10"));
        assert_eq!(mu.evaluate(&x), r(1));
        assert_eq!(SignedMeasure::<Rational64>::zero().evaluate(&x), r(0));
        // σ = 0 ≺ x ≺ σ′ = 11
        let mu = SignedMeasure::from_atoms([(cut("0"), r(1)), (cut("11"), r(-1))]);
        assert_eq!(mu.evaluate(&x), r(1));
        let bot_top = SignedMeasure::from_atoms([(CutPoint::Bottom, r(2)), (CutPoint::Top, r(5))]);
        assert_eq!(bot_top.evaluate(&x), r(2));
    }

    #[test]
    fn total_variation_examples() {
        let a = SignedMeasure::<Rational64>::dirac(cut("0"));
        assert_eq!(a.total_variation(), r(1));
        let three = SignedMeasure::from_atoms([(cut("0"), r(1)), (cut("01"), r(-1)), (cut("1"), r(1))]);
        assert_eq!(three.total_variation(), r(3));
        let cancel = SignedMeasure::from_atoms([(cut("0"), r(1)), (cut("0"), r(-1))]);
        assert_eq!(cancel.total_variation(), r(0));
        assert!(cancel.is_zero());
    }

    #[test]
    fn witness_examples() {
        assert_eq!(
            witness_measure(&node("1")).unwrap(),
            SignedMeasure::dirac(cut("1"))
        );
        assert_eq!(
            witness_measure(&node("10")).unwrap(),
            SignedMeasure::from_atoms([(cut("10"), r(1)), (cut("11"), r(-1)), (CutPoint::Top, r(1))])
        );
        assert_eq!(
            witness_measure(&node("100")).unwrap(),
            SignedMeasure::from_atoms([(cut("100"), r(1)), (cut("101"), r(-1)), (cut("11"), r(1))])
        );
        assert_eq!(
            witness_measure(&TreeNode::root(D)).unwrap(),
            SignedMeasure::dirac(CutPoint::Node(TreeNode::root(D)))
        );
        assert!(witness_measure(&TreeNode::root(TreeKind::Factorial)).is_err());
    }

    #[test]
    fn witness_claim_cases() {
        // σ ∈ S_x: σ = x|2⌢0 with x(2) = 1.
        let x = branch("011|01");
        let sigma = node("010");
        assert!(!a_membership(&sigma, &x));
        let mu = witness_measure(&sigma).unwrap();
        assert_eq!(mu.evaluate(&x), r(0));
        // x ≺ σ
        let low = branch("00|01");
        assert_eq!(mu.evaluate(&low), r(0));
        // σ ∈ A_x
        let high = branch("1|10");
        assert!(a_membership(&sigma, &high));
        assert_eq!(mu.evaluate(&high), r(1));
    }

    #[test]
    fn cut_literals() {
        let c = CutPoint::parse(D, "BOT").unwrap();
        assert_eq!(c, CutPoint::Bottom);
        assert_eq!(CutPoint::parse(D, "01|10").unwrap().to_string(), "01|10");
        assert_eq!(CutPoint::parse(D, "011").unwrap(), cut("011"));
        assert_eq!(CutPoint::parse(D, "").unwrap(), CutPoint::Node(TreeNode::root(D)));
    }

    #[test]
    fn measure_json_round_trip() {
        let mu = SignedMeasure::from_atoms([
            (CutPoint::Bottom, Rational64::new(1, 3)),
            (cut("01"), r(-2)),
            (CutPoint::Branch(branch("1|10")), r(1)),
        ]);
        let text = mu.to_json().unwrap();
        assert_eq!(SignedMeasure::<Rational64>::from_json(D, &text).unwrap(), mu);
        let float = SignedMeasure::<f64>::from_json(D, &text).unwrap();
        assert!((float.total_variation() - (1.0 / 3.0 + 3.0)).abs() < 1e-12);
    }

    #[test]
    fn positive_and_negative_parts() {
        let mu = SignedMeasure::from_atoms([(cut("0"), r(2)), (cut("1"), r(-3))]);
        assert_eq!(mu.positive_part().total_mass(), r(2));
        assert_eq!(mu.negative_part().total_mass(), r(3));
        assert_eq!(
            mu.positive_part().total_mass() + mu.negative_part().total_mass(),
            mu.total_variation()
        );
    }
}
