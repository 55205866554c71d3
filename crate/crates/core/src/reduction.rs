//! Norm reduction for families of extension witnesses.
//!
//! Given measures `μ_σ` of norm below `2k+1`, each entry of large norm is
//! replaced by the alternating combination `Σ_{i ≤ 2k−2} (−1)^i δ_{x^i}` where
//! `x^i` is the least cut at which the cumulative positive and negative masses
//! have crossed a nested ladder of thresholds. The replacement has norm at
//! most `2k−1`.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::chain::ChainFamily;
use crate::error::{Error, Result};
use crate::measure::{AtomRecord, CutPoint, MeasureAssignment, SignedMeasure, Weight};
use crate::tree::{TreeKind, TreeNode};

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureFamily<W> {
    kind: TreeKind,
    entries: BTreeMap<TreeNode, SignedMeasure<W>>,
}

impl<W: Weight> MeasureFamily<W> {
    pub fn new(kind: TreeKind) -> Self {
        MeasureFamily {
            kind,
            entries: BTreeMap::new(),
        }
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn insert(&mut self, node: TreeNode, measure: SignedMeasure<W>) -> Result<()> {
        if node.kind() != self.kind {
            return Err(Error::KindMismatch {
                left: self.kind,
                right: node.kind(),
            });
        }
        self.entries.insert(node, measure);
        Ok(())
    }

    pub fn get(&self, node: &TreeNode) -> Option<&SignedMeasure<W>> {
        self.entries.get(node)
    }

    pub fn entries(&self) -> &BTreeMap<TreeNode, SignedMeasure<W>> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `sup_σ ‖μ_σ‖`.
    pub fn bound(&self) -> W {
        self.entries
            .values()
            .map(|m| m.total_variation())
            .fold(W::zero(), |acc, v| if v > acc { v } else { acc })
    }

    /// `{kind, bound, entries: [{node, measure}]}`.
    pub fn to_json(&self) -> Result<String> {
        let file = FamilyFile {
            kind: self.kind,
            bound: self.bound().to_string(),
            entries: self
                .entries
                .iter()
                .map(|(n, m)| EntryRecord {
                    node: n.to_string(),
                    measure: m.to_records(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: FamilyFile = serde_json::from_str(text)?;
        let mut fam: MeasureFamily<W> = MeasureFamily::new(file.kind);
        for e in &file.entries {
            fam.insert(
                TreeNode::parse(file.kind, &e.node)?,
                SignedMeasure::from_records(file.kind, &e.measure)?,
            )?;
        }
        let stated = W::parse_weight(&file.bound)?;
        if (stated.to_f64() - fam.bound().to_f64()).abs() > 1e-9 {
            return Err(Error::Precondition(format!(
                "stated bound {} disagrees with the entries ({})",
                file.bound,
                fam.bound()
            )));
        }
        Ok(fam)
    }
}

impl<W: Weight> MeasureAssignment<W> for MeasureFamily<W> {
    fn kind(&self) -> TreeKind {
        self.kind
    }

    fn for_each_entry(&self, visit: &mut dyn FnMut(&TreeNode, &SignedMeasure<W>)) -> Result<()> {
        for (n, m) in &self.entries {
            visit(n, m);
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct EntryRecord {
    node: String,
    measure: Vec<AtomRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct FamilyFile {
    kind: TreeKind,
    bound: String,
    entries: Vec<EntryRecord>,
}

/// `(μ⁺[⊥, x], μ⁻[⊥, x])`, the positive and negative mass of the cuts `≼ x`.
pub fn cumulative<W: Weight>(mu: &SignedMeasure<W>, x: &CutPoint) -> (W, W) {
    let mut pos = W::zero();
    let mut neg = W::zero();
    for (c, w) in mu.atoms() {
        if c > x {
            break;
        }
        if w.is_positive() {
            pos = pos + w.clone();
        } else {
            neg = neg + w.abs();
        }
    }
    (pos, neg)
}

/// Least `k ≥ 1` with `bound < 2k + 1`.
pub fn least_odd_level(bound: f64) -> usize {
    let mut k = 1;
    while bound >= (2 * k + 1) as f64 {
        k += 1;
    }
    k
}

/// Threshold `i` of the ladder for level `k`: `(uses positive mass, level)`.
///
/// Even `i = 2j` tests `μ⁺[⊥, x] ≥ j+1 − tol`, odd `i = 2j+1` tests
/// `μ⁻[⊥, x] ≥ j+1 − tol`. For `k = 2` the tolerances are `δ/4, δ/2, δ`;
/// otherwise `δ/2^k` for `i = 0`, `δ/2^{k−2(j+1)}` for `i = 2j+1` and
/// `δ/2^{k−2j}` for `i = 2j ≥ 2`.
pub fn threshold(k: usize, i: usize, delta: f64) -> (bool, f64) {
    let j = i / 2;
    let tol = if k == 2 {
        delta / [4.0, 2.0, 1.0][i]
    } else if i == 0 {
        delta / 2f64.powi(k as i32)
    } else if i % 2 == 1 {
        delta / 2f64.powi(k as i32 - 2 * (j as i32 + 1))
    } else {
        delta / 2f64.powi(k as i32 - 2 * j as i32)
    };
    (i.is_multiple_of(2), (j + 1) as f64 - tol)
}

/// Sorted cut universe: the support of `mu`, the generator cuts, `⊥` and `⊤`.
/// Cumulative masses are constant between consecutive support cuts, so a
/// minimum over this universe is the infimum over the whole line.
pub fn cut_universe<W: Weight>(mu: &SignedMeasure<W>, family: &ChainFamily) -> Vec<CutPoint> {
    let mut cuts: Vec<CutPoint> = mu.atoms().iter().map(|(c, _)| c.clone()).collect();
    cuts.extend(family.generators().iter().cloned().map(CutPoint::Branch));
    cuts.push(CutPoint::Bottom);
    cuts.push(CutPoint::Top);
    cuts.sort();
    cuts.dedup();
    cuts
}

/// The points `x^0 ≼ … ≼ x^{2k−2}`: `x^i` is the least cut of `universe` at
/// which thresholds `0..=i` all hold.
pub fn threshold_points(mu: &SignedMeasure<f64>, k: usize, delta: f64, universe: &[CutPoint]) -> Result<Vec<CutPoint>> {
    if k == 0 || delta <= 0.0 {
        return Err(Error::Precondition("need k ≥ 1 and δ > 0".into()));
    }
    let profile: Vec<(f64, f64)> = universe.iter().map(|c| cumulative(mu, c)).collect();
    let mut points = Vec::with_capacity(2 * k - 1);
    let mut start = 0;
    for i in 0..2 * k - 1 {
        let (positive, level) = threshold(k, i, delta);
        // Cumulative masses are nondecreasing, so the nested condition holds
        // from the previous point onwards once this threshold holds.
        let found = (start..universe.len()).find(|&u| {
            let (pos, neg) = profile[u];
            if positive {
                pos >= level
            } else {
                neg >= level
            }
        });
        match found {
            Some(u) => {
                points.push(universe[u].clone());
                start = u;
            }
            None => return Err(Error::ThresholdUnreached { index: i }),
        }
    }
    Ok(points)
}

#[derive(Clone, Debug)]
pub struct ReduceOptions {
    pub delta: f64,
    pub max_exceptional: usize,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            delta: 0.5,
            max_exceptional: 16,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ThresholdProfile {
    pub k: usize,
    pub delta: f64,
    pub points: BTreeMap<TreeNode, Vec<CutPoint>>,
}

#[derive(Clone, Debug)]
pub struct ReductionOutcome {
    pub k: usize,
    pub delta: f64,
    pub reduced: MeasureFamily<f64>,
    pub profile: ThresholdProfile,
    pub passthrough: Vec<TreeNode>,
    /// Entries whose threshold ladder broke off, with the first unreached index.
    pub exceptional: Vec<(TreeNode, usize)>,
    pub input_bound: f64,
    pub output_bound: f64,
}

impl ReductionOutcome {
    /// One past the deepest exceptional entry.
    pub fn exceptional_horizon(&self) -> usize {
        self.exceptional.iter().map(|(n, _)| n.len() + 1).max().unwrap_or(0)
    }
}

/// Replaces every entry of norm above `2k−1−δ/4` by its alternating Dirac
/// combination. Entries whose thresholds are never reached pass through and
/// are listed as exceptional.
pub fn reduce_family(fam: &MeasureFamily<f64>, family: &ChainFamily, opts: &ReduceOptions) -> Result<ReductionOutcome> {
    let delta = opts.delta;
    let c = fam.bound();
    let k = least_odd_level(c);
    if delta <= 0.0 || c + 3.0 * delta >= (2 * k + 1) as f64 {
        return Err(Error::Precondition(format!(
            "need δ > 0 and c + 3δ < 2k + 1 (c = {c}, δ = {delta}, k = {k})"
        )));
    }
    if fam.kind() != family.kind() {
        return Err(Error::KindMismatch {
            left: fam.kind(),
            right: family.kind(),
        });
    }
    let keep_below = (2 * k - 1) as f64 - delta / 4.0;
    let mut reduced = MeasureFamily::new(fam.kind());
    let mut points = BTreeMap::new();
    let mut passthrough = Vec::new();
    let mut exceptional = Vec::new();
    for (node, mu) in fam.entries() {
        if mu.total_variation() <= keep_below {
            passthrough.push(node.clone());
            reduced.insert(node.clone(), mu.clone())?;
            continue;
        }
        let universe = cut_universe(mu, family);
        match threshold_points(mu, k, delta, &universe) {
            Ok(xs) => {
                let nu = SignedMeasure::from_atoms(
                    xs.iter()
                        .enumerate()
                        .map(|(i, c)| (c.clone(), if i % 2 == 0 { 1.0 } else { -1.0 })),
                );
                reduced.insert(node.clone(), nu)?;
                points.insert(node.clone(), xs);
            }
            Err(Error::ThresholdUnreached { index }) => {
                exceptional.push((node.clone(), index));
                reduced.insert(node.clone(), mu.clone())?;
            }
            Err(e) => return Err(e),
        }
    }
    if exceptional.len() > opts.max_exceptional {
        return Err(Error::ExceptionalCapExceeded {
            count: exceptional.len(),
            cap: opts.max_exceptional,
        });
    }
    let output_bound = reduced.bound();
    Ok(ReductionOutcome {
        k,
        delta,
        reduced,
        profile: ThresholdProfile { k, delta, points },
        passthrough,
        exceptional,
        input_bound: c,
        output_bound,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeviationRow {
    pub node: TreeNode,
    /// Generator index, or `None` for the total-mass constraint.
    pub generator: Option<usize>,
    pub deviation: f64,
    /// Beyond the horizon, hence a failure.
    pub flagged: bool,
}

#[derive(Clone, Debug)]
pub struct ClosenessReport {
    pub horizon: usize,
    pub epsilon: f64,
    pub entries_checked: u64,
    pub violations: u64,
    pub tolerated: u64,
    pub max_deviation_beyond: f64,
    /// First violating rows (capped).
    pub rows: Vec<DeviationRow>,
}

impl ClosenessReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// `node, generator, deviation, flagged`; the total-mass row uses `TOTAL`.
    pub fn write_csv<W: Write>(&self, out: W, family: &ChainFamily) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["node", "generator", "deviation", "flagged"])?;
        for row in &self.rows {
            let generator = match row.generator {
                Some(i) => family.generators()[i].to_string(),
                None => "TOTAL".to_string(),
            };
            w.write_record([
                row.node.to_string(),
                generator,
                row.deviation.to_string(),
                row.flagged.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

const MAX_ROWS: usize = 10_000;

/// Checks `|μ_σ(A_x) − δ_σ(A_x)| < ε` for every generator and `|μ_σ(K) − 1| < ε`
/// for every entry with `|σ| ≥ horizon`. Shallower deviations are reported and
/// tolerated. With `ε = 0` agreement must be exact.
pub fn closeness_check<W, A>(assignment: &A, family: &ChainFamily, horizon: usize, epsilon: f64) -> Result<ClosenessReport>
where
    W: Weight,
    A: MeasureAssignment<W> + ?Sized,
{
    if epsilon < 0.0 {
        return Err(Error::Precondition("ε must be nonnegative".into()));
    }
    if assignment.kind() != family.kind() {
        return Err(Error::KindMismatch {
            left: assignment.kind(),
            right: family.kind(),
        });
    }
    let mut report = ClosenessReport {
        horizon,
        epsilon,
        entries_checked: 0,
        violations: 0,
        tolerated: 0,
        max_deviation_beyond: 0.0,
        rows: Vec::new(),
    };
    let off = |dev: &W| {
        if epsilon == 0.0 {
            !dev.is_zero()
        } else {
            dev.to_f64() >= epsilon
        }
    };
    assignment.for_each_entry(&mut |sigma, mu| {
        report.entries_checked += 1;
        let beyond = sigma.len() >= horizon;
        let mut record = |generator: Option<usize>, dev: W| {
            let d = dev.to_f64();
            if beyond && d > report.max_deviation_beyond {
                report.max_deviation_beyond = d;
            }
            if off(&dev) {
                if beyond {
                    report.violations += 1;
                } else {
                    report.tolerated += 1;
                }
                if report.rows.len() < MAX_ROWS {
                    report.rows.push(DeviationRow {
                        node: sigma.clone(),
                        generator,
                        deviation: d,
                        flagged: beyond,
                    });
                }
            }
        };
        for (i, x) in family.generators().iter().enumerate() {
            let target = if family.contains(sigma, i) { W::one() } else { W::zero() };
            record(Some(i), (mu.evaluate(x) - target).abs());
        }
        record(None, (mu.total_mass() - W::one()).abs());
    })?;
    Ok(report)
}

/// Counts of the four forbidden configurations of a three-point reduction,
/// split by whether the entry lies beyond the horizon.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepReplay {
    pub beyond: [u64; 4],
    pub below: [u64; 4],
    pub entries: u64,
    pub pairs: u64,
}

impl StepReplay {
    pub fn clean_beyond_horizon(&self) -> bool {
        self.beyond.iter().all(|&c| c == 0)
    }
}

/// For every reduced entry with three points and every generator pair
/// `s ≺ t`, flags the configurations that would make `ν_σ − δ_σ` fail to
/// vanish on `A_s` or `A_t`:
///
/// 1. `σ ∈ A_s` and `t ≼ x^0`;
/// 2. `σ ∉ A_t`, `x^0 ≺ s` and `t ≼ x^1`;
/// 3. `σ ∈ A_s`, `x^1 ≺ s` and `t ≼ x^2`;
/// 4. `σ ∉ A_t` and `x^2 ≺ s`.
pub fn replay_steps(outcome: &ReductionOutcome, family: &ChainFamily, horizon: usize) -> StepReplay {
    let gens = family.generators();
    let mut replay = StepReplay::default();
    for (sigma, xs) in &outcome.profile.points {
        if xs.len() != 3 {
            continue;
        }
        replay.entries += 1;
        // rank = index of the first generator above the cut.
        let rank: Vec<usize> = xs
            .iter()
            .map(|c| gens.partition_point(|g| !c.precedes(g)))
            .collect();
        let below_s = |i: usize, s: usize| rank[i] <= s;
        let above_t = |i: usize, t: usize| rank[i] > t;
        let counts = if sigma.len() >= horizon {
            &mut replay.beyond
        } else {
            &mut replay.below
        };
        for s in 0..gens.len() {
            let in_s = family.contains(sigma, s);
            for t in s + 1..gens.len() {
                replay.pairs += 1;
                let out_t = !family.contains(sigma, t);
                if in_s && above_t(0, t) {
                    counts[0] += 1;
                }
                if out_t && below_s(0, s) && above_t(1, t) {
                    counts[1] += 1;
                }
                if in_s && below_s(1, s) && above_t(2, t) {
                    counts[2] += 1;
                }
                if out_t && below_s(2, s) {
                    counts[3] += 1;
                }
            }
        }
    }
    replay
}
