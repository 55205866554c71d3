//! Tree universes, nodes, eventually periodic branches and the lexicographic
//! order on nodes and branches.
//!
//! Two universes are supported. In the dyadic tree every symbol is `0` or `1`;
//! in the factorial tree the symbol at position `i` is at most `i`, so the
//! root has one child, each node of length one has two children, and level
//! `n` holds `n!` nodes.
//!
//! Branches are infinite sequences given by a finite prefix followed by a
//! repeating word. Every comparison between two branches therefore stops
//! after `max(prefix lengths) + lcm(period lengths)` symbols.

use std::cmp::Ordering;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Symbol = u32;

/// Default cap on the number of nodes a single level enumeration may produce.
pub const DEFAULT_LEVEL_BUDGET: u128 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeKind {
    Dyadic,
    Factorial,
}

impl TreeKind {
    /// Number of admissible symbols at position `index`.
    pub fn arity_at(self, index: usize) -> usize {
        match self {
            TreeKind::Dyadic => 2,
            TreeKind::Factorial => index + 1,
        }
    }

    pub fn admits(self, index: usize, symbol: Symbol) -> bool {
        (symbol as usize) < self.arity_at(index)
    }

    /// The symbol condition that puts `x|n⌢0` into the exception set of `x`:
    /// `x(n) = 1` on the dyadic tree, `x(n)` odd on the factorial tree.
    pub fn marks_exception(self, symbol: Symbol) -> bool {
        match self {
            TreeKind::Dyadic => symbol == 1,
            TreeKind::Factorial => symbol % 2 == 1,
        }
    }

    /// Number of nodes of length `level`, or `None` on overflow.
    pub fn level_size(self, level: usize) -> Option<u128> {
        (0..level).try_fold(1u128, |acc, i| acc.checked_mul(self.arity_at(i) as u128))
    }

    fn check_symbols(self, symbols: &[Symbol], offset: usize) -> Result<()> {
        for (i, &s) in symbols.iter().enumerate() {
            if !self.admits(offset + i, s) {
                return Err(Error::InvalidSymbol {
                    kind: self,
                    index: offset + i,
                    symbol: s,
                });
            }
        }
        Ok(())
    }
}

/// A finite sequence in one of the tree universes. The empty sequence is the root.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeNode {
    kind: TreeKind,
    symbols: Vec<Symbol>,
}

impl TreeNode {
    pub fn root(kind: TreeKind) -> Self {
        TreeNode {
            kind,
            symbols: Vec::new(),
        }
    }

    pub fn new(kind: TreeKind, symbols: Vec<Symbol>) -> Result<Self> {
        kind.check_symbols(&symbols, 0)?;
        Ok(TreeNode { kind, symbols })
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_root(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_root()
    }

    pub fn last(&self) -> Option<Symbol> {
        self.symbols.last().copied()
    }

    /// `self|n`, the initial segment of length `n` (or the node itself if shorter).
    pub fn truncate(&self, n: usize) -> TreeNode {
        TreeNode {
            kind: self.kind,
            symbols: self.symbols[..n.min(self.len())].to_vec(),
        }
    }

    pub fn child(&self, symbol: Symbol) -> Result<TreeNode> {
        let mut next = self.clone();
        next.push(symbol)?;
        Ok(next)
    }

    pub fn push(&mut self, symbol: Symbol) -> Result<()> {
        if !self.kind.admits(self.len(), symbol) {
            return Err(Error::InvalidSymbol {
                kind: self.kind,
                index: self.len(),
                symbol,
            });
        }
        self.symbols.push(symbol);
        Ok(())
    }

    pub fn pop(&mut self) -> Option<Symbol> {
        self.symbols.pop()
    }

    pub fn is_prefix_of<S: LexSequence + ?Sized>(&self, other: &S) -> bool {
        self.symbols
            .iter()
            .enumerate()
            .all(|(i, &s)| other.symbol_at(i) == Some(s))
    }

    pub fn parse(kind: TreeKind, literal: &str) -> Result<TreeNode> {
        let symbols = parse_symbols(kind, literal.trim())?;
        TreeNode::new(kind, symbols).map_err(|e| Error::InvalidLiteral {
            literal: literal.to_string(),
            reason: e.to_string(),
        })
    }
}

impl fmt::Display for TreeNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_symbols(self.kind, &self.symbols))
    }
}

/// An infinite sequence `prefix ⌢ period ⌢ period ⌢ …`, kept in canonical form:
/// the period is primitive and the prefix does not end with the last symbol of
/// the period. Structural equality is then equality of sequences.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Branch {
    kind: TreeKind,
    prefix: Vec<Symbol>,
    period: Vec<Symbol>,
}

impl Branch {
    pub fn new(kind: TreeKind, prefix: Vec<Symbol>, period: Vec<Symbol>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidPolicy("tail word must be nonempty".into()));
        }
        kind.check_symbols(&prefix, 0)?;
        // Tail symbols only need checking until positions exceed every tail symbol.
        let max_tail = *period.iter().max().unwrap() as usize;
        let start = prefix.len();
        for i in start..=start.max(max_tail) {
            let s = period[(i - start) % period.len()];
            if !kind.admits(i, s) {
                return Err(Error::InvalidSymbol {
                    kind,
                    index: i,
                    symbol: s,
                });
            }
        }
        let mut branch = Branch {
            kind,
            prefix,
            period,
        };
        branch.canonicalize();
        Ok(branch)
    }

    fn canonicalize(&mut self) {
        let len = self.period.len();
        let root = (1..=len)
            .find(|&d| len.is_multiple_of(d) && (0..len).all(|i| self.period[i] == self.period[i % d]))
            .unwrap_or(len);
        self.period.truncate(root);
        while let (Some(&p), Some(&t)) = (self.prefix.last(), self.period.last()) {
            if p != t {
                break;
            }
            self.prefix.pop();
            self.period.rotate_right(1);
        }
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn prefix(&self) -> &[Symbol] {
        &self.prefix
    }

    pub fn period(&self) -> &[Symbol] {
        &self.period
    }

    #[inline]
    pub fn symbol(&self, i: usize) -> Symbol {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    /// `x|n` as a tree node.
    pub fn truncate(&self, n: usize) -> TreeNode {
        TreeNode {
            kind: self.kind,
            symbols: (0..n).map(|i| self.symbol(i)).collect(),
        }
    }

    /// Dyadic generators must take both symbols infinitely often.
    pub fn is_admissible_generator(&self) -> bool {
        match self.kind {
            TreeKind::Dyadic => self.period.contains(&0) && self.period.contains(&1),
            TreeKind::Factorial => true,
        }
    }

    /// First index where the two branches differ, `None` if they are equal.
    pub fn divergence(&self, other: &Branch) -> Option<usize> {
        let bound = self.prefix.len().max(other.prefix.len())
            + lcm(self.period.len(), other.period.len());
        (0..bound).find(|&i| self.symbol(i) != other.symbol(i))
    }

    pub fn parse(kind: TreeKind, literal: &str) -> Result<Branch> {
        let bad = |reason: String| Error::InvalidLiteral {
            literal: literal.to_string(),
            reason,
        };
        let (prefix, tail) = literal
            .trim()
            .split_once('|')
            .ok_or_else(|| bad("missing '|' between prefix and tail".into()))?;
        let prefix = parse_symbols(kind, prefix)?;
        let period = parse_symbols(kind, tail)?;
        Branch::new(kind, prefix, period).map_err(|e| bad(e.to_string()))
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}|{}",
            format_symbols(self.kind, &self.prefix),
            format_symbols(self.kind, &self.period)
        )
    }
}

impl Serialize for TreeNode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Serialize for Branch {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn parse_symbols(kind: TreeKind, text: &str) -> Result<Vec<Symbol>> {
    let bad = |reason: &str| Error::InvalidLiteral {
        literal: text.to_string(),
        reason: reason.to_string(),
    };
    if text.is_empty() {
        return Ok(Vec::new());
    }
    match kind {
        TreeKind::Dyadic => text
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(bad("dyadic literals use bare bits")),
            })
            .collect(),
        TreeKind::Factorial => text
            .split(',')
            .map(|t| t.trim().parse::<Symbol>().map_err(|_| bad("expected comma-separated integers")))
            .collect(),
    }
}

fn format_symbols(kind: TreeKind, symbols: &[Symbol]) -> String {
    match kind {
        TreeKind::Dyadic => symbols.iter().map(|s| char::from(b'0' + *s as u8)).collect(),
        TreeKind::Factorial => symbols
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(","),
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Shape of a sequence for the purpose of bounding comparisons.
#[derive(Clone, Copy, Debug)]
pub enum SequenceShape {
    Finite(usize),
    Periodic { prefix: usize, period: usize },
}

/// Anything that can be placed in the lexicographic order: nodes and branches.
pub trait LexSequence {
    fn kind(&self) -> TreeKind;
    fn symbol_at(&self, i: usize) -> Option<Symbol>;
    fn shape(&self) -> SequenceShape;
}

impl LexSequence for TreeNode {
    fn kind(&self) -> TreeKind {
        self.kind
    }
    #[inline]
    fn symbol_at(&self, i: usize) -> Option<Symbol> {
        self.symbols.get(i).copied()
    }
    fn shape(&self) -> SequenceShape {
        SequenceShape::Finite(self.len())
    }
}

impl LexSequence for Branch {
    fn kind(&self) -> TreeKind {
        self.kind
    }
    #[inline]
    fn symbol_at(&self, i: usize) -> Option<Symbol> {
        Some(self.symbol(i))
    }
    fn shape(&self) -> SequenceShape {
        SequenceShape::Periodic {
            prefix: self.prefix.len(),
            period: self.period.len(),
        }
    }
}

/// Lexicographic comparison without the kind check. An initial segment is
/// below every proper extension.
#[inline]
pub fn lex_cmp<A, B>(a: &A, b: &B) -> Ordering
where
    A: LexSequence + ?Sized,
    B: LexSequence + ?Sized,
{
    debug_assert_eq!(a.kind(), b.kind());
    use SequenceShape::*;
    let limit = match (a.shape(), b.shape()) {
        (Finite(x), Finite(y)) => x.min(y),
        (Finite(x), Periodic { .. }) => x,
        (Periodic { .. }, Finite(y)) => y,
        (Periodic { prefix: pa, period: la }, Periodic { prefix: pb, period: lb }) => {
            pa.max(pb) + lcm(la, lb)
        }
    };
    for i in 0..limit {
        // Both symbols exist for i < limit.
        let (sa, sb) = (a.symbol_at(i).unwrap(), b.symbol_at(i).unwrap());
        if sa != sb {
            return sa.cmp(&sb);
        }
    }
    match (a.shape(), b.shape()) {
        (Finite(x), Finite(y)) => x.cmp(&y),
        (Finite(_), Periodic { .. }) => Ordering::Less,
        (Periodic { .. }, Finite(_)) => Ordering::Greater,
        (Periodic { .. }, Periodic { .. }) => Ordering::Equal,
    }
}

pub fn lex_compare<A, B>(a: &A, b: &B) -> Result<Ordering>
where
    A: LexSequence + ?Sized,
    B: LexSequence + ?Sized,
{
    if a.kind() != b.kind() {
        return Err(Error::KindMismatch {
            left: a.kind(),
            right: b.kind(),
        });
    }
    Ok(lex_cmp(a, b))
}

/// All nodes of length `level`, in increasing lexicographic order.
pub fn enumerate_level(kind: TreeKind, level: usize) -> Result<Vec<TreeNode>> {
    enumerate_level_with_budget(kind, level, DEFAULT_LEVEL_BUDGET)
}

pub fn enumerate_level_with_budget(kind: TreeKind, level: usize, budget: u128) -> Result<Vec<TreeNode>> {
    let count = kind.level_size(level).unwrap_or(u128::MAX);
    if count > budget {
        return Err(Error::Budget {
            what: "level enumeration",
            needed: count,
            budget,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut current = vec![0 as Symbol; level];
    loop {
        out.push(TreeNode {
            kind,
            symbols: current.clone(),
        });
        // Odometer step, last position fastest.
        let mut i = level;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if (current[i] as usize) + 1 < kind.arity_at(i) {
                current[i] += 1;
                break;
            }
            current[i] = 0;
        }
    }
}

/// Number of nodes of length at most `max_level`, or `None` on overflow.
pub fn count_up_to(kind: TreeKind, max_level: usize) -> Option<u128> {
    (0..=max_level).try_fold(0u128, |acc, n| acc.checked_add(kind.level_size(n)?))
}

/// Visits every node of length at most `max_level` in lexicographic order
/// (preorder with children in increasing symbol order) using one buffer.
pub fn for_each_node_up_to<F>(kind: TreeKind, max_level: usize, budget: u128, mut visit: F) -> Result<()>
where
    F: FnMut(&TreeNode),
{
    let needed = count_up_to(kind, max_level).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::Budget {
            what: "node traversal",
            needed,
            budget,
        });
    }
    let mut node = TreeNode::root(kind);
    walk(&mut node, max_level, &mut visit);
    Ok(())
}

fn walk<F: FnMut(&TreeNode)>(node: &mut TreeNode, max_level: usize, visit: &mut F) {
    visit(node);
    if node.len() == max_level {
        return;
    }
    for s in 0..node.kind.arity_at(node.len()) as Symbol {
        node.symbols.push(s);
        walk(node, max_level, visit);
        node.symbols.pop();
    }
}

/// How a sampled branch is finished: a random prefix of `prefix_len` symbols
/// followed by the repeating word `tail`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailPolicy {
    pub prefix_len: usize,
    pub tail: Vec<Symbol>,
}

impl TailPolicy {
    pub fn new(prefix_len: usize, tail: Vec<Symbol>) -> Self {
        TailPolicy { prefix_len, tail }
    }

    pub fn validate(&self, kind: TreeKind) -> Result<()> {
        if self.tail.is_empty() {
            return Err(Error::InvalidPolicy("tail word must be nonempty".into()));
        }
        if kind == TreeKind::Dyadic && !(self.tail.contains(&0) && self.tail.contains(&1)) {
            return Err(Error::InvalidPolicy(
                "dyadic tails must contain both 0 and 1".into(),
            ));
        }
        // Probe the tail at the earliest position it can start.
        let probe: Vec<Symbol> = vec![0; self.prefix_len];
        Branch::new(kind, probe, self.tail.clone())
            .map(|_| ())
            .map_err(|e| Error::InvalidPolicy(e.to_string()))
    }
}

/// Draws a branch whose prefix symbols are uniform over the admissible
/// symbols at each position (for the factorial tree, `x(n)` uniform on `0..=n`).
pub fn sample_branch<R: Rng + ?Sized>(kind: TreeKind, rng: &mut R, policy: &TailPolicy) -> Result<Branch> {
    policy.validate(kind)?;
    let prefix = (0..policy.prefix_len)
        .map(|i| rng.gen_range(0..kind.arity_at(i)) as Symbol)
        .collect();
    Branch::new(kind, prefix, policy.tail.clone())
}

/// Like [`sample_branch`] but with a fixed initial segment.
pub fn sample_extension<R: Rng + ?Sized>(start: &TreeNode, rng: &mut R, policy: &TailPolicy) -> Result<Branch> {
    policy.validate(start.kind)?;
    let kind = start.kind;
    let mut prefix = start.symbols.clone();
    while prefix.len() < policy.prefix_len {
        let i = prefix.len();
        prefix.push(rng.gen_range(0..kind.arity_at(i)) as Symbol);
    }
    Branch::new(kind, prefix, policy.tail.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use Ordering::*;

    fn node(kind: TreeKind, s: &str) -> TreeNode {
        TreeNode::parse(kind, s).unwrap()
    }

    fn branch(kind: TreeKind, s: &str) -> Branch {
        Branch::parse(kind, s).unwrap()
    }

    #[test]
    fn lex_examples() {
        let d = TreeKind::Dyadic;
        assert_eq!(lex_cmp(&node(d, "10"), &branch(d, "|10")), Less);
        assert_eq!(lex_cmp(&node(d, "01"), &node(d, "1")), Less);
        assert_eq!(lex_cmp(&node(d, "11"), &branch(d, "10|1")), Greater);
        assert_eq!(lex_cmp(&branch(d, "10|1"), &node(d, "11")), Less);
        assert_eq!(lex_cmp(&node(d, ""), &node(d, "0")), Less);
        assert_eq!(lex_cmp(&node(d, "0"), &node(d, "0")), Equal);
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        let a = TreeNode::root(TreeKind::Dyadic);
        let b = TreeNode::root(TreeKind::Factorial);
        assert!(matches!(lex_compare(&a, &b), Err(Error::KindMismatch { .. })));
    }

    #[test]
    fn branches_compare_through_tails() {
        let d = TreeKind::Dyadic;
        let a = branch(d, "1|01");
        let b = branch(d, "|10");
        assert_eq!(a, b);
        assert_eq!(lex_cmp(&a, &b), Equal);
        let c = branch(d, "|1100");
        let e = branch(d, "|110");
        // 1100 1100 vs 110 110 110: first difference at index 3
        assert_eq!(a.divergence(&a), None);
        assert_eq!(c.divergence(&e), Some(3));
        assert_eq!(lex_cmp(&c, &e), Less);
    }

    #[test]
    fn canonical_form_folds_period_and_prefix() {
        let d = TreeKind::Dyadic;
        let b = Branch::new(d, vec![0, 1, 0], vec![1, 0, 1, 0]).unwrap();
        assert!(b.prefix().is_empty());
        assert_eq!(b.period(), &[0, 1]);
        assert_eq!(b.to_string(), "|01");
        let f = Branch::parse(TreeKind::Factorial, "0,1,0|0").unwrap();
        assert_eq!(f.to_string(), "0,1|0");
    }

    #[test]
    fn level_sizes() {
        assert_eq!(enumerate_level(TreeKind::Dyadic, 3).unwrap().len(), 8);
        assert_eq!(enumerate_level(TreeKind::Factorial, 3).unwrap().len(), 6);
        for kind in [TreeKind::Dyadic, TreeKind::Factorial] {
            let root = enumerate_level(kind, 0).unwrap();
            assert_eq!(root, vec![TreeNode::root(kind)]);
        }
    }

    #[test]
    fn level_budget_is_enforced() {
        assert!(matches!(
            enumerate_level(TreeKind::Factorial, 30),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn levels_are_strictly_increasing() {
        for kind in [TreeKind::Dyadic, TreeKind::Factorial] {
            let level = enumerate_level(kind, 5).unwrap();
            assert!(level.windows(2).all(|w| lex_cmp(&w[0], &w[1]) == Less));
        }
    }

    #[test]
    fn traversal_is_lexicographic() {
        let mut seen = Vec::new();
        for_each_node_up_to(TreeKind::Factorial, 4, 1 << 20, |n| seen.push(n.clone())).unwrap();
        assert_eq!(seen.len() as u128, count_up_to(TreeKind::Factorial, 4).unwrap());
        assert!(seen.windows(2).all(|w| lex_cmp(&w[0], &w[1]) == Less));
    }

    #[test]
    fn invalid_symbols_rejected() {
        assert!(TreeNode::new(TreeKind::Factorial, vec![1]).is_err());
        assert!(TreeNode::new(TreeKind::Dyadic, vec![2]).is_err());
        assert!(Branch::new(TreeKind::Factorial, vec![0], vec![3]).is_err());
        assert!(Branch::new(TreeKind::Factorial, vec![0, 0, 0, 0], vec![3]).is_ok());
    }

    #[test]
    fn sampling_policy_echo_and_determinism() {
        let d = TreeKind::Dyadic;
        let policy = TailPolicy::new(12, vec![1, 0]);
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        let a = sample_branch(d, &mut r1, &policy).unwrap();
        let b = sample_branch(d, &mut r2, &policy).unwrap();
        assert_eq!(a, b);
        for i in 12..40 {
            assert_eq!(a.symbol(i), if (i - 12) % 2 == 0 { 1 } else { 0 });
        }
        assert!(a.is_admissible_generator());
    }

    #[test]
    fn factorial_sampling_respects_bounds() {
        let policy = TailPolicy::new(30, vec![0]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let x = sample_branch(TreeKind::Factorial, &mut rng, &policy).unwrap();
            assert!((0..60).all(|n| x.symbol(n) as usize <= n));
        }
    }

    #[test]
    fn dyadic_policy_needs_both_symbols() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let policy = TailPolicy::new(5, vec![0]);
        assert!(matches!(
            sample_branch(TreeKind::Dyadic, &mut rng, &policy),
            Err(Error::InvalidPolicy(_))
        ));
    }

    #[test]
    fn literals_round_trip() {
        let f = TreeKind::Factorial;
        let b = branch(f, "0,1,2|0");
        assert_eq!(Branch::parse(f, &b.to_string()).unwrap(), b);
        let n = node(f, "0,1,2,3");
        assert_eq!(n.to_string(), "0,1,2,3");
        assert!(Branch::parse(TreeKind::Dyadic, "0101").is_err());
    }
}
