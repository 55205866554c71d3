//! Tries to repair an almost chain into a true chain by changing memberships
//! only at levels below a budget `k`, and prints the certificate either way.

use cdelab::chain::ChainFamily;
use cdelab::construct::sample_dyadic41;
use cdelab::lifting::{falsify, is_chain, search_lifting, LiftingVerdict, RetractionFamily, SearchBudget, UnsatCertificate};
use cdelab::reduction::closeness_check;
use cdelab::tree::{Branch, TreeKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn report(family: &ChainFamily, k: usize) -> cdelab::Result<()> {
    let verdict = search_lifting(family, k, SearchBudget::default())?;
    print!("  k = {k}: {}", verdict.label());
    match &verdict {
        LiftingVerdict::Sat(c) => {
            println!(", {} memberships changed, chain: {}", c.modified_nodes(), is_chain(c, family)?.passed());
            let retraction = RetractionFamily::new(family, c)?;
            // The diracs follow the lifted sets, so they can only disagree below level k.
            let close = closeness_check(&retraction, family, k, 0.0)?;
            println!(
                "    dirac family at the lifted cuts: {} violations from level {k}, {} below",
                close.violations, close.tolerated
            );
        }
        LiftingVerdict::Unsat(UnsatCertificate::Falsified(f)) => {
            println!(", {} is in A_x but not A_y for x = {}, y = {} (split at {})", f.sigma, f.x, f.y, f.m)
        }
        LiftingVerdict::Unsat(UnsatCertificate::Exhausted { node, lower, upper }) => {
            println!(", node {node} cannot be fixed for x{lower} < x{upper}")
        }
        LiftingVerdict::Unknown { violating_nodes, .. } => println!(", {violating_nodes} nodes left open"),
    }
    Ok(())
}

fn main() -> cdelab::Result<()> {
    let pair = ChainFamily::new(
        TreeKind::Dyadic,
        vec![Branch::parse(TreeKind::Dyadic, "0|01")?, Branch::parse(TreeKind::Dyadic, "1|10")?],
        6,
    )?;
    println!("two generators splitting at the root:");
    for k in 1..=3 {
        report(&pair, k)?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let family = sample_dyadic41(&mut rng, 16, 12)?;
    println!("16 sampled generators, depth 12:");
    for k in [2, 4, 6, 8] {
        report(&family, k)?;
    }
    match falsify(&family, 4)? {
        Some(f) => println!("certificate for k = 4:\n{}", f.to_json()?),
        None => println!("no certificate for k = 4"),
    }
    Ok(())
}
