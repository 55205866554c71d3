//! Pushes a noisy family of extension witnesses with norms slightly above 3
//! back to norm at most 3 while keeping it close to the generator constraints.

use cdelab::construct::sample_dyadic41;
use cdelab::noise::{perturb, witness_measure_family, NoiseOptions};
use cdelab::reduction::{closeness_check, reduce_family, replay_steps, ReduceOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> cdelab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let family = sample_dyadic41(&mut rng, 32, 9)?;
    let eps = 0.1;
    let base = witness_measure_family(&family, 9)?;
    let opts = NoiseOptions {
        visible: eps / 2.0,
        garbage: 3,
        ..Default::default()
    };
    let (noisy, garbage) = perturb(&base, &family, &mut rng, &opts)?;
    let replaced: Vec<String> = garbage.iter().map(|n| n.to_string()).collect();
    println!("{} entries, sup norm {:.3}, junk at {}", noisy.len(), noisy.bound(), replaced.join(" "));

    let out = reduce_family(&noisy, &family, &ReduceOptions { delta: 0.5, max_exceptional: 16 })?;
    println!(
        "k = {}: output norm {:.3}, {} reduced, {} passed through, {} exceptional",
        out.k,
        out.output_bound,
        out.profile.points.len(),
        out.passthrough.len(),
        out.exceptional.len()
    );
    if let Some((sigma, points)) = out.profile.points.iter().find(|(_, p)| p.len() > 1) {
        println!("  {sigma}: {} -> {}", noisy.get(sigma).expect("entry"), out.reduced.get(sigma).expect("entry"));
        let cuts: Vec<String> = points.iter().map(|c| c.to_string()).collect();
        println!("  threshold cuts {}", cuts.join(" < "));
    }

    let horizon = out.exceptional_horizon().max(2);
    let close = closeness_check(&out.reduced, &family, horizon, 2.0 * eps)?;
    println!(
        "closeness at {} beyond level {horizon}: {} violations, max deviation {:.3}",
        2.0 * eps,
        close.violations,
        close.max_deviation_beyond
    );
    let steps = replay_steps(&out, &family, horizon);
    println!("step patterns beyond the horizon {:?}, below {:?}", steps.beyond, steps.below);
    Ok(())
}
