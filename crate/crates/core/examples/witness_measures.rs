//! Prints the three-atom witness measures of a few nodes and checks them
//! exactly against every generator of a sampled family.

use cdelab::construct::sample_dyadic41;
use cdelab::measure::{verify_witness_claim, verify_witness_family, witness_measure};
use cdelab::tree::{TreeKind, TreeNode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> cdelab::Result<()> {
    for literal in ["", "1", "0", "110", "1010", "0110"] {
        let sigma = TreeNode::parse(TreeKind::Dyadic, literal)?;
        let mu = witness_measure(&sigma)?;
        println!(
            "mu[{:>4}] = {:<40} |mu| = {}  mass = {}",
            if literal.is_empty() { "()" } else { literal },
            mu.to_string(),
            mu.total_variation(),
            mu.total_mass()
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let family = sample_dyadic41(&mut rng, 64, 10)?;
    let sigma = TreeNode::parse(TreeKind::Dyadic, "10110")?;
    let check = verify_witness_claim(&sigma, &family)?;
    println!("\n{sigma}: {} mismatches over {} generators", check.mismatches.len(), family.len());

    let report = verify_witness_family(&family)?;
    println!(
        "all nodes to depth {}: {} nodes, {} pairs, max norm {}, {} failures",
        family.depth(),
        report.nodes_checked,
        report.pairs_checked,
        report.max_total_variation,
        report.failure_count
    );
    Ok(())
}
