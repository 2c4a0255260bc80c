//! Entropies in bits.

use crate::numeric::{ksum, log_sum_exp, nats_to_bits};

use super::divergence::raw;
use super::types::{AlphaOrder, JointPmf, Pmf};

/// Tolerance for [`is_singleton`].
pub const SINGLETON_TOL: f64 = 1e-12;

pub fn shannon_entropy(p: &Pmf) -> f64 {
    raw::shannon_bits(p.probs())
}

/// `H(X|Z) = Σ_z p(z) H(X|Z=z)`; rows of `j` are X.
pub fn conditional_entropy(j: &JointPmf) -> f64 {
    let pz = j.col_marginal();
    let terms = (0..j.cols()).filter_map(|z| {
        j.x_given_z(z)
            .map(|cond| pz.probs()[z] * raw::shannon_bits(&cond))
    });
    ksum(terms).max(0.0)
}

/// `I(X;Z) = H(X) − H(X|Z)`.
pub fn mutual_information(j: &JointPmf) -> f64 {
    (shannon_entropy(&j.row_marginal()) - conditional_entropy(j)).max(0.0)
}

/// Rényi entropy `(1/(1−α)) log₂ Σ p^α`; `One` is Shannon, `Infinity` is
/// the min-entropy.
pub fn renyi_entropy(p: &Pmf, a: AlphaOrder) -> f64 {
    match a {
        AlphaOrder::One => shannon_entropy(p),
        AlphaOrder::Infinity => -p.max_prob().log2(),
        AlphaOrder::Finite(al) => {
            let ls = log_sum_exp(p.probs().iter().filter(|v| **v > 0.0).map(|v| al * v.ln()));
            nats_to_bits(ls / (1.0 - al)).max(0.0)
        }
    }
}

/// Conditional Rényi entropy `H̃_α(X|Z) = (1/(1−α)) log₂ Σ_z p(z) Σ_x p(x|z)^α`.
///
/// At `One` this is `H(X|Z)`; at `Infinity` it is `−log₂ max p(x|z)` over
/// columns with `p(z) > 0`. Evaluated in the log domain so very large
/// orders do not underflow.
pub fn cond_renyi_entropy(j: &JointPmf, a: AlphaOrder) -> f64 {
    match a {
        AlphaOrder::One => conditional_entropy(j),
        AlphaOrder::Infinity => {
            let best = (0..j.cols())
                .filter_map(|z| j.x_given_z(z))
                .flat_map(|c| c.into_iter())
                .fold(0.0, f64::max);
            (-best.log2()).max(0.0)
        }
        AlphaOrder::Finite(al) => {
            let pz = j.col_marginal();
            let mut terms = Vec::new();
            for z in 0..j.cols() {
                let w = pz.probs()[z];
                if w <= 0.0 {
                    continue;
                }
                for x in 0..j.rows() {
                    let v = j.get(x, z);
                    if v > 0.0 {
                        terms.push(w.ln() + al * (v / w).ln());
                    }
                }
            }
            nats_to_bits(log_sum_exp(terms) / (1.0 - al)).max(0.0)
        }
    }
}

/// True iff every `p(x|z)` with `p(z) > 0` takes the same value.
pub fn is_singleton(j: &JointPmf) -> bool {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for cond in (0..j.cols()).filter_map(|z| j.x_given_z(z)) {
        for v in cond {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    hi - lo <= SINGLETON_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Channel;

    fn pmf(v: &[f64]) -> Pmf {
        Pmf::from_probs(v.to_vec()).unwrap()
    }

    /// p(z) uniform, p(x|z=0) = (0.75, 0.25), p(x|z=1) = (0.25, 0.75).
    fn tilted_joint() -> JointPmf {
        JointPmf::from_side_info(&Pmf::uniform(2), &Channel::bsc(0.25).unwrap()).unwrap()
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(shannon_entropy(&Pmf::uniform(2)), 1.0);
        assert_eq!(shannon_entropy(&Pmf::point_mass(3, 1)), 0.0);
        assert!((shannon_entropy(&pmf(&[0.1, 0.9])) - 0.4690).abs() < 1e-4);
    }

    #[test]
    fn conditional_entropy_examples() {
        let ind = JointPmf::independent(&Pmf::uniform(2), &Pmf::uniform(2));
        assert!((conditional_entropy(&ind) - 1.0).abs() < 1e-15);
        let same = JointPmf::from_matrix(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        assert_eq!(conditional_entropy(&same), 0.0);
        assert!((conditional_entropy(&tilted_joint()) - 0.8113).abs() < 1e-4);
    }

    #[test]
    fn mutual_information_examples() {
        let ind = JointPmf::independent(&pmf(&[0.2, 0.8]), &pmf(&[0.6, 0.4]));
        assert!(mutual_information(&ind) < 1e-15);
        let same = JointPmf::from_matrix(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        assert!((mutual_information(&same) - 1.0).abs() < 1e-15);
        let bsc = JointPmf::from_input_and_channel(&Pmf::uniform(2), &Channel::bsc(0.3).unwrap()).unwrap();
        assert!((mutual_information(&bsc) - 0.1187).abs() < 1e-4);
    }

    #[test]
    fn renyi_entropy_examples() {
        for a in [0.5, 2.0, 7.0] {
            let v = renyi_entropy(&Pmf::uniform(5), AlphaOrder::Finite(a));
            assert!((v - 5f64.log2()).abs() < 1e-12);
        }
        assert!((renyi_entropy(&Pmf::uniform(5), AlphaOrder::Infinity) - 5f64.log2()).abs() < 1e-12);
        let p = pmf(&[0.75, 0.25]);
        assert!((renyi_entropy(&p, AlphaOrder::Finite(2.0)) + 0.625f64.log2()).abs() < 1e-12);
        assert!((renyi_entropy(&p, AlphaOrder::Infinity) - (4.0f64 / 3.0).log2()).abs() < 1e-12);
    }

    #[test]
    fn cond_renyi_examples() {
        let px = pmf(&[0.3, 0.7]);
        let ind = JointPmf::independent(&px, &pmf(&[0.4, 0.6]));
        for a in [0.5, 2.0, 3.0] {
            let a = AlphaOrder::Finite(a);
            assert!((cond_renyi_entropy(&ind, a) - renyi_entropy(&px, a)).abs() < 1e-12);
        }
        let j = tilted_joint();
        assert!((cond_renyi_entropy(&j, AlphaOrder::Finite(2.0)) + 0.625f64.log2()).abs() < 1e-12);
        assert!((cond_renyi_entropy(&j, AlphaOrder::Infinity) - (4.0f64 / 3.0).log2()).abs() < 1e-12);
        assert_eq!(cond_renyi_entropy(&j, AlphaOrder::One), conditional_entropy(&j));
    }

    #[test]
    fn singleton_examples() {
        assert!(is_singleton(&JointPmf::independent(&Pmf::uniform(3), &pmf(&[0.2, 0.8]))));
        assert!(!is_singleton(&tilted_joint()));
        let one_symbol = JointPmf::from_matrix(vec![vec![0.4, 0.6]]).unwrap();
        assert!(is_singleton(&one_symbol));
    }
}
