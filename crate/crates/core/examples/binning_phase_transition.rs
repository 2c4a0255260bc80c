//! Expected Tsallis-2 divergence of a random binning over blocklengths,
//! for rates on either side of H~_2(X|Z).

use osrb_lab::binning::{expected_divergence_mc, expected_tsallis_exact_iid};
use osrb_lab::measures::{cond_renyi_entropy, AlphaOrder, Channel, JointPmf, Pmf};
use osrb_lab::numeric::bins_for_rate;

fn main() -> osrb_lab::Result<()> {
    let j = JointPmf::from_side_info(&Pmf::uniform(2), &Channel::bsc(0.25)?)?;
    let h2 = cond_renyi_entropy(&j, AlphaOrder::new(2.0)?);
    println!("H~_2(X|Z) = {h2:.4} bits");

    for (label, rate) in [("below", h2 - 0.2), ("above", h2 + 0.2)] {
        println!("\nrate {rate:.4} ({label} threshold)");
        println!("{:>3} {:>6} {:>12}", "n", "M", "E[T_2]");
        for n in (2..=12).step_by(2) {
            let m = bins_for_rate(n, rate);
            println!("{n:>3} {m:>6} {:>12.6}", expected_tsallis_exact_iid(&j, n, m, 2)?);
        }
    }

    let mc = expected_divergence_mc(&j, 6, h2 - 0.2, AlphaOrder::new(2.0)?, 2000, 1)?;
    println!("\nMonte Carlo at n = 6: {:.6} +/- {:.6}", mc.mean, mc.stderr);
    Ok(())
}
