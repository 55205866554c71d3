//! On the factorial tree, dense child fans force membership vectors that
//! alternate `p` times, and the cost of extending grows with `p`.
//!
//!     cargo run --release --example alternating_growth -- [generators] [depth]

use cdelab::construct::{sample_factorial53, DensitySeeding};
use cdelab::eta::{eta_lower_estimate, find_alternating_witness, min_norm_taut_string, AlternatingSearch, EtaScope};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> cdelab::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<usize>().ok());
    let count = args.next().flatten().unwrap_or(256);
    let depth = args.next().flatten().unwrap_or(24);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let seeding = DensitySeeding::default().fitting(count, depth);
    let family = sample_factorial53(&mut rng, count, depth, &seeding)?;
    println!("{} generators to depth {depth}, fans planted at widths {:?}", family.len(), seeding.widths);

    for p in 2..=6 {
        match find_alternating_witness(&family, p)? {
            AlternatingSearch::Found(w) => {
                let cost = min_norm_taut_string(&w.tube(0.25)?);
                let counting = w.counting.as_ref().map(|c| format!("{:?}", c.block_counts)).unwrap_or_default();
                println!(
                    "p = {p}: sigma = {} at n = {}, density {:.2}, children {:?}, blocks {counting}, cost at 1/4: {cost}",
                    w.sigma, w.n, w.density, w.children
                );
            }
            AlternatingSearch::NotFound { best_density } => {
                println!("p = {p}: none (best density {best_density:.2})")
            }
        }
    }

    for d in (8..=depth).step_by(4) {
        let est = eta_lower_estimate(&family.with_depth(d), 0, 0.25, EtaScope::Auto)?;
        println!("depth {d:>2}: {est}");
    }
    Ok(())
}
