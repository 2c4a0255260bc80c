//! Secrecy rates of a binary wiretap channel across leakage orders.

use osrb_lab::measures::{AlphaOrder, Channel, JointPmf, Pmf};
use osrb_lab::rates::{secrecy_rate, secrecy_rate_iid_variant, EncoderInput, OptimizerSettings};

fn main() -> osrb_lab::Result<()> {
    let main = Channel::bsc(0.1)?;
    let eve = Channel::bsc(0.3)?;
    let px = Pmf::uniform(2);
    let opt = OptimizerSettings::default();
    let deterministic = EncoderInput::Deterministic(px.clone());
    let stochastic = EncoderInput::Stochastic {
        p_u: Pmf::uniform(2),
        ch_xu: Channel::bsc(0.05)?,
    };
    let joint = JointPmf::from_input_and_channel(&px, &eve)?;

    println!("{:>6} {:>14} {:>14} {:>14}", "alpha", "deterministic", "prefixed", "iid variant");
    for a in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
        let a = AlphaOrder::new(a)?;
        let d = secrecy_rate(&main, &eve, &deterministic, a, &opt)?.threshold_bits;
        let (s, v) = if a.above_one() {
            (
                format!("{:.6}", secrecy_rate(&main, &eve, &stochastic, a, &opt)?.threshold_bits),
                format!("{:.6}", secrecy_rate_iid_variant(&joint, &main, a)?.threshold_bits),
            )
        } else {
            ("-".into(), "-".into())
        };
        println!("{:>6} {d:>14.6} {s:>14} {v:>14}", a.to_string());
    }
    Ok(())
}
