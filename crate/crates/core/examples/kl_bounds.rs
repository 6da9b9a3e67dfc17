//! How the KL confidence bounds tighten with samples.
//!
//! For an empirical mean of 0.3 and horizon index t = 10^4, prints the lower and
//! upper bounds as the sample count grows, next to the Hoeffding radius
//! `sqrt(ln t / (2n))` they improve on.

use placement_bandit::{kl_bernoulli, lower_confidence, upper_confidence};

fn main() -> placement_bandit::Result<()> {
    let mu = 0.3;
    let t = 10_000;
    println!("{:>7} {:>9} {:>9} {:>11}", "n", "lower", "upper", "hoeffding");
    for n in [1u64, 10, 100, 1_000, 10_000, 100_000] {
        let lo = lower_confidence(mu, n, t);
        let hi = upper_confidence(mu, n, t);
        let hoeffding = ((t as f64).ln() / (2.0 * n as f64)).sqrt();
        println!("{n:>7} {lo:>9.5} {hi:>9.5} {:>11.5}", hoeffding);
    }
    println!("\nD(0.3 || 0.5) = {:.6}", kl_bernoulli(0.3, 0.5)?);
    Ok(())
}
