//! Independent exact solver for tube problems.
//!
//! Some optimal path only visits values in `{0} ∪ {b_i ± ε} ∪ {1 ± ε}`, so a
//! shortest path over those breakpoints, one layer per constraint, finds the
//! minimum.

use crate::error::{Error, Result};
use crate::eta::Tube;

pub const ORACLE_BUDGET: usize = 14;

pub fn min_norm_lp_oracle(t: &Tube) -> Result<f64> {
    let m = t.targets.len();
    if m > ORACLE_BUDGET {
        return Err(Error::Budget {
            what: "tube constraints for the oracle",
            needed: m as u128,
            budget: ORACLE_BUDGET as u128,
        });
    }
    let mut points = vec![0.0];
    for i in 0..t.len() {
        let (a, b) = t.interval(i);
        points.push(a);
        points.push(b);
    }
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut cost: Vec<f64> = points.iter().map(|&p| if p == 0.0 { 0.0 } else { f64::INFINITY }).collect();
    for i in 0..t.len() {
        let (a, b) = t.interval(i);
        let next: Vec<f64> = points
            .iter()
            .map(|&p| {
                if p < a || p > b {
                    return f64::INFINITY;
                }
                points
                    .iter()
                    .zip(&cost)
                    .map(|(&q, &c)| c + (p - q).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        cost = next;
    }
    Ok(cost.into_iter().fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_increment_examples() {
        let t = |b: &[f64], e: f64| Tube::new(b.to_vec(), e).unwrap();
        assert_eq!(min_norm_lp_oracle(&t(&[1.0, 0.0, 1.0], 0.0)).unwrap(), 3.0);
        assert_eq!(min_norm_lp_oracle(&t(&[1.0, 0.0, 1.0], 0.25)).unwrap(), 1.75);
        assert_eq!(min_norm_lp_oracle(&t(&[0.0, 1.0, 1.0], 0.0)).unwrap(), 1.0);
        assert!(min_norm_lp_oracle(&t(&[0.0; 15], 0.0)).is_err());
    }
}
