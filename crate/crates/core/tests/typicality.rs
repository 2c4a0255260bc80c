mod common;

use osrb_lab::measures::{shannon_entropy, Channel, JointPmf, Pmf};
use osrb_lab::seed::rng_from_seed;
use osrb_lab::typicality::*;

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[test]
fn frozen_binomial_values() {
    // Bernoulli(0.3), n = 10, eps = 0.15: admitted counts of ones are 2, 3 and 4
    let p = Pmf::from_probs(vec![0.7, 0.3]).unwrap();
    let ts = typical_set(&p, 10, 0.15).unwrap();
    let want: f64 = (2..=4).map(|k| binomial(10, k) * 0.3f64.powi(k as i32) * 0.7f64.powi(10 - k as i32)).sum();
    assert_eq!(ts.len(), 45 + 120 + 210);
    assert!((ts.mass() - want).abs() < 1e-12);
    assert!((ts.mass() - 0.7004233215).abs() < 1e-9);
}

#[test]
fn weak_law_lower_bound() {
    let mut rng = rng_from_seed(31);
    for _ in 0..10 {
        let p = common::pmf(&mut rng, 3);
        for n in [6, 9, 12] {
            let eps = 0.3;
            let Ok(ts) = typical_set(&p, n, eps) else { continue };
            let chebyshev: f64 = p.probs().iter().map(|q| q * (1.0 - q) / (n as f64 * eps * eps)).sum();
            assert!(ts.mass() >= 1.0 - chebyshev - 1e-12);
        }
    }
}

#[test]
fn entropy_sandwich() {
    let mut rng = rng_from_seed(32);
    for _ in 0..10 {
        let p = common::pmf(&mut rng, 3);
        let (n, eps) = (10, 0.2);
        let Ok(ts) = typical_set(&p, n, eps) else { continue };
        let h = shannon_entropy(&p);
        let delta = eps * p.probs().iter().map(|q| q.log2().abs()).sum::<f64>();
        for pos in 0..ts.len() {
            let bits: f64 = -ts.digits(pos).iter().map(|&x| p.probs()[x].log2()).sum::<f64>() / n as f64;
            assert!((bits - h).abs() < delta + 1e-12);
        }
        assert!((ts.len() as f64).log2() <= n as f64 * (h + delta) + 1e-9);
    }
}

#[test]
fn tilted_law_is_rescaled_iid_law() {
    let p = Pmf::from_probs(vec![0.6, 0.25, 0.15]).unwrap();
    let ts = typical_set(&p, 7, 0.25).unwrap();
    let total: f64 = ts.log_probs().iter().map(|l| l.exp()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    for (pos, &seq) in ts.members().iter().enumerate() {
        let iid: f64 = ts.digits(pos).iter().map(|&x| p.probs()[x].ln()).sum();
        let ratio = tilted_log_prob(&ts, seq).unwrap() - iid;
        assert!((ratio + ts.mass().ln()).abs() < 1e-10);
        assert!(ratio <= -ts.mass().ln() + 1e-12);
    }
    let outside = (0..3u64.pow(7)).find(|s| ts.position(*s).is_none()).unwrap();
    assert!(tilted_log_prob(&ts, outside).is_err());
}

#[test]
fn zero_probability_symbols_never_appear() {
    let p = Pmf::from_probs(vec![0.5, 0.5, 0.0]).unwrap();
    let ts = typical_set(&p, 6, 0.2).unwrap();
    for pos in 0..ts.len() {
        assert!(!ts.digits(pos).contains(&2));
    }
}

#[test]
fn json_round_trip() {
    let p = Pmf::from_probs(vec![0.7, 0.3]).unwrap();
    let ts = typical_set(&p, 9, 0.12).unwrap();
    let back = TypicalSet::from_json_str(&ts.to_json_string()).unwrap();
    assert_eq!(back.members(), ts.members());
    assert_eq!(back.mass(), ts.mass());
}

#[test]
fn joint_set_conditionals_normalize() {
    let j = JointPmf::from_input_and_channel(&Pmf::from_probs(vec![0.4, 0.6]).unwrap(), &Channel::bsc(0.2).unwrap()).unwrap();
    let jts = joint_typical_set(&j, 6, 0.2).unwrap();
    let u_total: f64 = jts.u_log_probs().iter().map(|l| l.exp()).sum();
    assert!((u_total - 1.0).abs() < 1e-12);
    for k in 0..jts.u_sequences().len() {
        let c: f64 = jts.conditional(k).map(|(_, l)| l.exp()).sum();
        assert!((c - 1.0).abs() < 1e-12);
        let s = s_kernel_vector(&jts, &Channel::bsc(0.1).unwrap(), k).unwrap();
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let u = jts.u_sequences()[k];
        assert!((s_kernel(&jts, &Channel::bsc(0.1).unwrap(), u, 5).unwrap() - s[5]).abs() < 1e-15);
    }
}

#[test]
fn sequence_index_round_trip() {
    for idx in 0..81u64 {
        assert_eq!(sequence_index(&sequence_digits(idx, 3, 4), 3), idx);
    }
    assert_eq!(sequence_digits(5, 2, 4), vec![0, 1, 0, 1]);
}

#[test]
fn guard_and_empty_set() {
    assert!(typical_set(&Pmf::uniform(4), 13, 0.1).unwrap_err().is_guard());
    assert!(typical_set(&Pmf::from_probs(vec![0.7, 0.3]).unwrap(), 3, 0.01).is_err());
}
