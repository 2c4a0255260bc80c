#![allow(dead_code)]

use osrb_lab::seed::Rng;
use osrb_lab::{Channel, JointPmf, Pmf};
use rand::Rng as _;

/// Dirichlet(1) draw, bounded away from zero.
pub fn pmf(rng: &mut Rng, k: usize) -> Pmf {
    let w: Vec<f64> = (0..k).map(|_| -(rng.gen::<f64>().max(1e-9)).ln() + 1e-3).collect();
    Pmf::from_weights(&w).unwrap()
}

pub fn channel(rng: &mut Rng, inputs: usize, outputs: usize) -> Channel {
    let rows = (0..inputs).map(|_| pmf(rng, outputs).probs().to_vec()).collect();
    Channel::from_rows(rows).unwrap()
}

pub fn joint(rng: &mut Rng, rows: usize, cols: usize) -> JointPmf {
    let p = pmf(rng, rows);
    JointPmf::from_input_and_channel(&p, &channel(rng, rows, cols)).unwrap()
}

/// Joint over (X, Z) with random alphabet sizes in the given ranges.
pub fn joint_sized(rng: &mut Rng, x: std::ops::RangeInclusive<usize>, z: std::ops::RangeInclusive<usize>) -> JointPmf {
    let rows = rng.gen_range(x);
    let cols = rng.gen_range(z);
    joint(rng, rows, cols)
}

pub fn binary(rng: &mut Rng) -> Pmf {
    pmf(rng, 2)
}
