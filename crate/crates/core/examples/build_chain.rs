//! Samples a small family of dyadic generators, checks that their sets form an
//! almost chain and shows how isolated points group by membership vector.
//!
//!     cargo run --example build_chain -- [generators] [depth] [seed]

use cdelab::chain::{atoms, verify_almost_chain};
use cdelab::construct::sample_dyadic41;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arg(i: usize, default: u64) -> u64 {
    std::env::args().nth(i).and_then(|s| s.parse().ok()).unwrap_or(default)
}

fn main() -> cdelab::Result<()> {
    let (count, depth, seed) = (arg(1, 8) as usize, arg(2, 6) as usize, arg(3, 7));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let family = sample_dyadic41(&mut rng, count, depth)?;

    println!("generators (sorted):");
    for (i, g) in family.generators().iter().enumerate() {
        println!("  x{i} = {g}");
    }

    let report = verify_almost_chain(&family);
    println!(
        "{} pairs, {} with violations, all within one level of divergence: {}",
        report.pairs_checked,
        report.violations.len(),
        report.passed()
    );
    for v in report.violations.iter().take(4) {
        let nodes: Vec<String> = v.nodes.iter().map(|n| n.to_string()).collect();
        println!("  x{} vs x{} split at {}: {}", v.lower, v.upper, v.divergence, nodes.join(" "));
    }

    // Non-monotone vectors are exactly the points where the sets fail to nest.
    let groups = atoms(&family, 1)?;
    let bumpy = groups.iter().filter(|a| !a.vector.is_monotone()).count();
    println!("{} atoms below depth {depth}, {bumpy} with a non-monotone vector", groups.len());
    for a in groups.iter().filter(|a| !a.vector.is_monotone()).take(5) {
        println!("  {}  descents {}  first node {}", a.vector, a.vector.descents(), a.nodes[0]);
    }

    println!("\n{}", family.to_json()?);
    Ok(())
}
