//! Perturbed measure families for exercising the norm reduction.

use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::chain::ChainFamily;
use crate::error::{Error, Result};
use crate::measure::{CutPoint, MeasureAssignment, SignedMeasure, WitnessFamily};
use crate::reduction::MeasureFamily;
use crate::tree::{for_each_node_up_to, TreeNode};

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseOptions {
    /// Total variation of the noise that generators can see.
    pub visible: f64,
    /// Total weight of dipoles placed on adjacent cuts `τ`, `τ⌢0`.
    pub dipole: f64,
    /// Number of shallow entries replaced by a single heavy atom.
    pub garbage: usize,
    /// Entries of level at most this may be replaced.
    pub garbage_level: usize,
    /// Weight of the heavy atom.
    pub garbage_weight: f64,
}

impl Default for NoiseOptions {
    fn default() -> Self {
        NoiseOptions {
            visible: 0.05,
            dipole: 0.2,
            garbage: 0,
            garbage_level: 3,
            garbage_weight: 2.95,
        }
    }
}

/// Collects the entries of level at most `levels` of any assignment.
pub fn materialize<A>(assignment: &A, levels: usize) -> Result<MeasureFamily<f64>>
where
    A: MeasureAssignment<Rational64> + ?Sized,
{
    let mut out = MeasureFamily::new(assignment.kind());
    let mut failed = None;
    assignment.for_each_entry(&mut |sigma, mu| {
        if sigma.len() <= levels && failed.is_none() {
            if let Err(e) = out.insert(sigma.clone(), mu.to_f64()) {
                failed = Some(e);
            }
        }
    })?;
    match failed {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// The witness measures of every node of level at most `levels`.
pub fn witness_measure_family(family: &ChainFamily, levels: usize) -> Result<MeasureFamily<f64>> {
    materialize(&WitnessFamily::new(&family.with_depth(levels))?, levels)
}

fn random_node<R: Rng + ?Sized>(rng: &mut R, family: &ChainFamily, max_level: usize) -> Result<TreeNode> {
    let kind = family.kind();
    let level = rng.gen_range(0..=max_level);
    let mut node = TreeNode::root(kind);
    for i in 0..level {
        node.push(rng.gen_range(0..kind.arity_at(i)) as u32)?;
    }
    Ok(node)
}

/// Adds to every entry one visible atom of weight in `[−visible, visible]` at a
/// random generator cut and dipoles `+w δ_τ − w δ_{τ⌢0}` of total weight at
/// most `dipole`; dipoles are invisible to every generator. Then replaces
/// `garbage` shallow entries by `garbage_weight · δ_c` at a random cut.
/// Returns the perturbed family and the replaced nodes.
pub fn perturb<R: Rng + ?Sized>(
    base: &MeasureFamily<f64>,
    family: &ChainFamily,
    rng: &mut R,
    opts: &NoiseOptions,
) -> Result<(MeasureFamily<f64>, Vec<TreeNode>)> {
    if opts.visible < 0.0 || opts.dipole < 0.0 {
        return Err(Error::Precondition("noise levels must be nonnegative".into()));
    }
    let gens = family.generators();
    let depth = family.depth();
    let mut out = MeasureFamily::new(base.kind());
    for (sigma, mu) in base.entries() {
        let mut atoms: Vec<(CutPoint, f64)> = mu.atoms().to_vec();
        if opts.visible > 0.0 && !gens.is_empty() {
            let g = gens.choose(rng).expect("nonempty").clone();
            atoms.push((CutPoint::Branch(g), rng.gen_range(-opts.visible..=opts.visible)));
        }
        let mut left = opts.dipole;
        for _ in 0..rng.gen_range(0..=2) {
            if left <= 0.0 {
                break;
            }
            let w = rng.gen_range(0.0..=left);
            left -= w;
            let tau = random_node(rng, family, depth.saturating_sub(1))?;
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            atoms.push((CutPoint::Node(tau.child(0)?), -sign * w));
            atoms.push((CutPoint::Node(tau), sign * w));
        }
        out.insert(sigma.clone(), SignedMeasure::from_atoms(atoms))?;
    }
    let mut shallow: Vec<TreeNode> = Vec::new();
    for_each_node_up_to(base.kind(), opts.garbage_level, 1 << 20, |n| {
        if base.get(n).is_some() {
            shallow.push(n.clone());
        }
    })?;
    let replaced: Vec<TreeNode> = shallow.choose_multiple(rng, opts.garbage).cloned().collect();
    for sigma in &replaced {
        let c = CutPoint::Node(random_node(rng, family, depth)?);
        out.insert(sigma.clone(), SignedMeasure::from_atoms([(c, opts.garbage_weight)]))?;
    }
    let mut replaced = replaced;
    replaced.sort();
    Ok((out, replaced))
}
