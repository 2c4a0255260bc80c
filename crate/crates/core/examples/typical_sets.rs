//! Strongly typical sets and their tilted laws.

use osrb_lab::measures::{shannon_entropy, Channel, JointPmf, Pmf};
use osrb_lab::typicality::{joint_typical_set, typical_set};

fn main() -> osrb_lab::Result<()> {
    let p = Pmf::from_probs(vec![0.7, 0.3])?;
    println!("H(X) = {:.4} bits", shannon_entropy(&p));
    println!("{:>3} {:>8} {:>10} {:>12}", "n", "|T|", "P(T)", "log2|T| / n");
    for n in [6, 10, 14, 18] {
        let ts = typical_set(&p, n, 0.1)?;
        println!(
            "{n:>3} {:>8} {:>10.6} {:>12.4}",
            ts.len(),
            ts.mass(),
            (ts.len() as f64).log2() / n as f64
        );
    }

    let j = JointPmf::from_input_and_channel(&Pmf::uniform(2), &Channel::bsc(0.1)?)?;
    let jts = joint_typical_set(&j, 8, 0.2)?;
    println!(
        "\njoint set at n = 8: {} pairs over {} typical u-sequences",
        jts.len(),
        jts.u_sequences().len()
    );
    let first: Vec<(u64, f64)> = jts.conditional(0).take(3).collect();
    println!("first conditional members of u = {}: {first:?}", jts.u_sequences()[0]);
    Ok(())
}
