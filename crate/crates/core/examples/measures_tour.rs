//! Divergences and entropies on a pair of small distributions.

use osrb_lab::measures::*;

fn main() -> osrb_lab::Result<()> {
    let p = Pmf::from_probs(vec![0.5, 0.3, 0.2])?;
    let q = Pmf::from_probs(vec![0.25, 0.25, 0.5])?;

    println!("TV(p, q)        = {:.6}", total_variation(&p, &q)?);
    println!("KL(p || q)      = {:.6} nats", kl_divergence(&p, &q)?);
    println!("D_inf(p || q)   = {:.6} bits", d_infinity(&p, &q)?);
    for a in [0.5, 2.0, 4.0] {
        let a = AlphaOrder::new(a)?;
        println!(
            "alpha = {a:<4}  Tsallis {:.6}  Renyi {:.6} nats",
            tsallis_divergence(&p, &q, a)?,
            renyi_divergence(&p, &q, a)?
        );
    }

    let j = JointPmf::from_side_info(&Pmf::uniform(2), &Channel::bsc(0.25)?)?;
    println!("H(X|Z)          = {:.6} bits", conditional_entropy(&j));
    for a in [AlphaOrder::new(2.0)?, AlphaOrder::Infinity] {
        println!("{:<16}= {:.6} bits", format!("H~_{a}(X|Z)"), cond_renyi_entropy(&j, a));
    }
    println!("I(X;Z)          = {:.6} bits", mutual_information(&j));
    println!("Sibson I_2      = {:.6} bits", sibson_mi(&j, AlphaOrder::new(2.0)?)?);
    Ok(())
}
