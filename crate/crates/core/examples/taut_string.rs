//! Least-norm extension witnesses for a single isolated point.
//!
//! A point whose membership vector along the sorted generators is `b` needs a
//! measure whose running sums stay within `ε` of `b` and end near 1. The
//! taut string finds the cheapest such path; the breakpoint oracle confirms it.

use cdelab::chain::MembershipVector;
use cdelab::eta::{min_norm_taut_string, taut_string_path, Tube};
use cdelab::oracle::min_norm_lp_oracle;

fn show(bits: &[bool], eps: f64) -> cdelab::Result<()> {
    let v = MembershipVector(bits.to_vec());
    let tube = Tube::from_membership(&v, eps)?;
    let norm = min_norm_taut_string(&tube);
    let path: Vec<String> = taut_string_path(&tube).iter().map(|s| format!("{s:.2}")).collect();
    println!(
        "{v}  eps {eps:<4}  descents {}  norm {norm:.3}  oracle {:.3}  path [{}]",
        v.descents(),
        min_norm_lp_oracle(&tube)?,
        path.join(" ")
    );
    Ok(())
}

fn main() -> cdelab::Result<()> {
    let cases: [&[bool]; 5] = [
        &[false, false, true, true],
        &[true, false, true],
        &[true, false, true, false, true],
        &[false, true, false, true, false, true],
        &[true, false, false, true, true, false, true],
    ];
    for bits in cases {
        for eps in [0.0, 0.1, 0.25] {
            show(bits, eps)?;
        }
    }
    // With exact constraints every descent costs two units on top of the final mass.
    Ok(())
}
