//! The prefixing penalty R'_alpha for a binary chain U -> X -> Z, with
//! the grid oracle alongside.

use osrb_lab::measures::{AlphaOrder, Channel, Pmf};
use osrb_lab::rates::{r_prime, r_prime_grid_oracle, OptimizerSettings};

fn main() -> osrb_lab::Result<()> {
    let p_u = Pmf::from_probs(vec![0.4, 0.6])?;
    let x_given_u = Channel::bsc(0.15)?;
    let z_given_x = Channel::bsc(0.25)?;
    let opt = OptimizerSettings::default();

    println!("{:>6} {:>10} {:>10} {:>10} {:>7}", "alpha", "R'", "grid", "I(U;Z)", "start");
    for a in [1.5, 2.0, 4.0, f64::INFINITY] {
        let a = AlphaOrder::new(a)?;
        let r = r_prime(&p_u, &x_given_u, &z_given_x, a, &opt)?;
        let g = r_prime_grid_oracle(&p_u, &x_given_u, &z_given_x, a, 0.01)?;
        println!(
            "{:>6} {:>10.6} {:>10.6} {:>10.6} {:>7}",
            a.to_string(),
            r.value_bits,
            g,
            r.feasible_bits,
            r.trace.best_start
        );
    }
    Ok(())
}
