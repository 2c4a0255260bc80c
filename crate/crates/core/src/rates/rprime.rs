//! The channel-prefixing penalty `R′_α` and a brute-force grid oracle.
//!
//! For a chain `U → X → Z` with laws `p(u)`, `p(x|u)`, `p(z|x)`, the
//! quantity is the supremum over tilt channels `t(z|u,x)` of
//!
//! `−c · Σ_{u,x} p(u,x) D(t(·|u,x) ‖ p(·|x)) + Σ_u p(u) D(τ(·|u) ‖ p(z))`
//!
//! where `τ(z|u) = Σ_x p(x|u) t(z|u,x)`, `p(z)` is the output marginal of
//! the chain, and `c = α/(α−1)` for finite `α > 1` or `c = 1` at infinity.
//! At `t = p(z|x)` the objective equals `I(U;Z)`.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{AlphaOrder, Channel, Pmf};
use crate::numeric::{ksum, nats_to_bits};
use crate::seed::{derive_seed, rng_from_seed};

/// Largest alphabet accepted for `U`, `X` or `Z`.
pub const RPRIME_ALPHABET_GUARD: usize = 8;

/// Settings for the multi-start ascent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    /// Random starts in addition to the feasible start `t = p(z|x)`.
    pub starts: usize,
    pub max_iter: usize,
    /// Stop when an accepted step improves the objective by less than this (nats).
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            starts: 20,
            max_iter: 4000,
            tol: 1e-15,
            seed: 0,
        }
    }
}

/// A conditional `t(z|u,x)`, stored `[u][x][z]` row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TiltChannel {
    pub u: usize,
    pub x: usize,
    pub z: usize,
    pub t: Vec<f64>,
}

impl TiltChannel {
    pub fn row(&self, u: usize, x: usize) -> &[f64] {
        let s = (u * self.x + x) * self.z;
        &self.t[s..s + self.z]
    }
}

/// Summary of the ascent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub starts: usize,
    pub best_start: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Largest minus smallest final value over starts (bits).
    pub spread_bits: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RPrime {
    pub value_bits: f64,
    pub tilt: TiltChannel,
    pub trace: OptimizerTrace,
    /// Objective at `t = p(z|x)`, which is `I(U;Z)` (bits).
    pub feasible_bits: f64,
}

fn coefficient(a: AlphaOrder) -> Result<f64> {
    match a {
        AlphaOrder::Finite(al) if al > 1.0 => Ok(al / (al - 1.0)),
        AlphaOrder::Infinity => Ok(1.0),
        _ => Err(Error::UnsupportedOrder {
            op: "r_prime",
            alpha: a.to_string(),
        }),
    }
}

/// Validated chain data shared by the optimizer and the oracle.
struct Problem {
    ku: usize,
    kx: usize,
    kz: usize,
    c: f64,
    pu: Vec<f64>,
    /// `p(u,x)`, `[u][x]`.
    w: Vec<f64>,
    /// `p(x|u)`, `[u][x]`.
    xu: Vec<f64>,
    /// `p(z|x)`, `[x][z]`.
    zx: Vec<f64>,
    pz: Vec<f64>,
}

impl Problem {
    fn new(p_u: &Pmf, ch_xu: &Channel, ch_zx: &Channel, a: AlphaOrder) -> Result<Self> {
        let c = coefficient(a)?;
        if p_u.labels() != ch_xu.in_labels() {
            return Err(Error::AlphabetMismatch("p(u) vs inputs of p(x|u)".into()));
        }
        if ch_xu.out_labels() != ch_zx.in_labels() {
            return Err(Error::AlphabetMismatch("outputs of p(x|u) vs inputs of p(z|x)".into()));
        }
        let (ku, kx, kz) = (p_u.len(), ch_xu.outputs(), ch_zx.outputs());
        let biggest = ku.max(kx).max(kz);
        if biggest > RPRIME_ALPHABET_GUARD {
            return Err(Error::Guard {
                what: "r_prime alphabet size",
                value: biggest as f64,
                limit: RPRIME_ALPHABET_GUARD as f64,
            });
        }
        let pu = p_u.probs().to_vec();
        let mut xu = Vec::with_capacity(ku * kx);
        let mut w = Vec::with_capacity(ku * kx);
        for u in 0..ku {
            for x in 0..kx {
                xu.push(ch_xu.get(u, x));
                w.push(pu[u] * ch_xu.get(u, x));
            }
        }
        let zx: Vec<f64> = (0..kx).flat_map(|x| ch_zx.row(x).to_vec()).collect();
        let px: Vec<f64> = (0..kx).map(|x| ksum((0..ku).map(|u| w[u * kx + x]))).collect();
        let pz = (0..kz).map(|z| ksum((0..kx).map(|x| px[x] * zx[x * kz + z]))).collect();
        Ok(Problem {
            ku,
            kx,
            kz,
            c,
            pu,
            w,
            xu,
            zx,
            pz,
        })
    }

    fn p_zx(&self, x: usize) -> &[f64] {
        &self.zx[x * self.kz..(x + 1) * self.kz]
    }

    /// Contribution of auxiliary symbol `u` to the objective (nats), for the
    /// rows `t[x]` of that symbol.
    fn objective_u(&self, u: usize, rows: &[f64]) -> f64 {
        let (kx, kz) = (self.kx, self.kz);
        let mut penalty = Vec::new();
        let mut tau = vec![0.0; kz];
        for x in 0..kx {
            let wx = self.w[u * kx + x];
            if wx <= 0.0 {
                continue;
            }
            let t = &rows[x * kz..(x + 1) * kz];
            let p = self.p_zx(x);
            for z in 0..kz {
                if t[z] > 0.0 {
                    if p[z] <= 0.0 {
                        return f64::NEG_INFINITY;
                    }
                    penalty.push(wx * t[z] * (t[z] / p[z]).ln());
                }
                tau[z] += self.xu[u * kx + x] * t[z];
            }
        }
        let gain = ksum((0..kz).filter(|&z| tau[z] > 0.0).map(|z| tau[z] * (tau[z] / self.pz[z]).ln()));
        -self.c * ksum(penalty) + self.pu[u] * gain
    }

    fn objective(&self, t: &[f64]) -> f64 {
        let block = self.kx * self.kz;
        ksum((0..self.ku).map(|u| self.objective_u(u, &t[u * block..(u + 1) * block])))
    }

    fn feasible(&self) -> Vec<f64> {
        (0..self.ku).flat_map(|_| self.zx.iter().copied()).collect()
    }

    /// The same chain seen from auxiliary symbol `u` alone.
    fn single(&self, u: usize) -> Problem {
        let kx = self.kx;
        Problem {
            ku: 1,
            kx,
            kz: self.kz,
            c: self.c,
            pu: vec![self.pu[u]],
            w: self.w[u * kx..(u + 1) * kx].to_vec(),
            xu: self.xu[u * kx..(u + 1) * kx].to_vec(),
            zx: self.zx.clone(),
            pz: self.pz.clone(),
        }
    }
}

/// Softmax coordinates restricted to the support of each `p(·|x)`.
struct Param<'a> {
    pr: &'a Problem,
    /// Support indices per `x`.
    support: Vec<Vec<usize>>,
    /// Offsets of each active `(u,x)` block into θ.
    blocks: Vec<(usize, usize, usize)>,
    dim: usize,
    /// Tilt used for rows outside the active blocks.
    base: Vec<f64>,
}

impl<'a> Param<'a> {
    fn new(pr: &'a Problem) -> Self {
        Self::on_face(pr, &vec![true; pr.kz]).expect("full face is feasible")
    }

    /// Tilts whose rows put mass only on the outputs marked in `allowed`.
    /// `None` if some row with positive weight would have no mass left.
    fn on_face(pr: &'a Problem, allowed: &[bool]) -> Option<Self> {
        let support: Vec<Vec<usize>> = (0..pr.kx)
            .map(|x| (0..pr.kz).filter(|&z| allowed[z] && pr.p_zx(x)[z] > 0.0).collect())
            .collect();
        let mut base = pr.feasible();
        for u in 0..pr.ku {
            for x in 0..pr.kx {
                if pr.w[u * pr.kx + x] <= 0.0 {
                    continue;
                }
                let tot = ksum(support[x].iter().map(|&z| pr.p_zx(x)[z]));
                if tot <= 0.0 {
                    return None;
                }
                let row = &mut base[(u * pr.kx + x) * pr.kz..(u * pr.kx + x + 1) * pr.kz];
                for z in 0..pr.kz {
                    row[z] = if support[x].contains(&z) { pr.p_zx(x)[z] / tot } else { 0.0 };
                }
            }
        }
        let mut blocks = Vec::new();
        let mut dim = 0;
        for u in 0..pr.ku {
            for x in 0..pr.kx {
                if pr.w[u * pr.kx + x] > 0.0 && support[x].len() > 1 {
                    blocks.push((u, x, dim));
                    dim += support[x].len();
                }
            }
        }
        Some(Param {
            pr,
            support,
            blocks,
            dim,
            base,
        })
    }

    fn tilt(&self, theta: &[f64]) -> Vec<f64> {
        let mut t = self.base.clone();
        let kz = self.pr.kz;
        for &(u, x, off) in &self.blocks {
            let s = &self.support[x];
            let th = &theta[off..off + s.len()];
            let mx = th.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let e: Vec<f64> = th.iter().map(|v| (v - mx).exp()).collect();
            let tot = ksum(e.iter().copied());
            let row = &mut t[(u * self.pr.kx + x) * kz..(u * self.pr.kx + x + 1) * kz];
            row.iter_mut().for_each(|r| *r = 0.0);
            for (k, &z) in s.iter().enumerate() {
                row[z] = e[k] / tot;
            }
        }
        t
    }

    fn theta_from(&self, t: &[f64]) -> Vec<f64> {
        let mut theta = vec![0.0; self.dim];
        let kz = self.pr.kz;
        for &(u, x, off) in &self.blocks {
            for (k, &z) in self.support[x].iter().enumerate() {
                theta[off + k] = t[(u * self.pr.kx + x) * kz + z].ln();
            }
        }
        theta
    }

    fn gradient(&self, t: &[f64]) -> Vec<f64> {
        let pr = self.pr;
        let (kx, kz) = (pr.kx, pr.kz);
        let mut tau = vec![0.0; pr.ku * kz];
        for u in 0..pr.ku {
            for x in 0..kx {
                for z in 0..kz {
                    tau[u * kz + z] += pr.xu[u * kx + x] * t[(u * kx + x) * kz + z];
                }
            }
        }
        let mut g = vec![0.0; self.dim];
        for &(u, x, off) in &self.blocks {
            let wx = pr.w[u * kx + x];
            let s = &self.support[x];
            let row = &t[(u * kx + x) * kz..(u * kx + x + 1) * kz];
            let dz: Vec<f64> = s
                .iter()
                .map(|&z| {
                    let lt = (row[z] / pr.p_zx(x)[z]).ln();
                    let lg = (tau[u * kz + z] / pr.pz[z]).ln();
                    wx * (-pr.c * (lt + 1.0) + lg + 1.0)
                })
                .collect();
            let mean = ksum(s.iter().zip(&dz).map(|(&z, d)| row[z] * d));
            for (k, &z) in s.iter().enumerate() {
                g[off + k] = row[z] * (dz[k] - mean);
            }
        }
        g
    }
}

struct Run {
    value: f64,
    t: Vec<f64>,
    iterations: usize,
    converged: bool,
}

fn ascend(param: &Param, mut theta: Vec<f64>, opt: &OptimizerSettings) -> Run {
    let mut t = param.tilt(&theta);
    let mut value = param.pr.objective(&t);
    let mut step = 1.0;
    let mut converged = param.dim == 0;
    let mut iterations = 0;
    while !converged && iterations < opt.max_iter {
        iterations += 1;
        let g = param.gradient(&t);
        let g2 = ksum(g.iter().map(|v| v * v));
        if g2 < 1e-30 {
            converged = true;
            break;
        }
        let mut accepted = false;
        while step > 1e-14 {
            let cand: Vec<f64> = theta.iter().zip(&g).map(|(a, b)| a + step * b).collect();
            let ct = param.tilt(&cand);
            let cv = param.pr.objective(&ct);
            if cv >= value + 1e-4 * step * g2 {
                let gain = cv - value;
                theta = cand;
                t = ct;
                value = cv;
                accepted = true;
                step *= 2.0;
                if gain < opt.tol {
                    converged = true;
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            converged = true;
        }
    }
    let (t, value, extra, settled) = polish(param, t, value, opt);
    Run {
        value,
        t,
        iterations: iterations + extra,
        converged: converged || settled,
    }
}

/// Alternating maximization. The gain term is `max_r Σ τ ln(r/p_z)`, so for
/// fixed `r_u = τ_u` the best rows are `t(z|u,x) ∝ p(z|x) (τ_u(z)/p(z))^{1/c}`.
/// Each sweep does not decrease the objective.
fn polish(param: &Param, mut t: Vec<f64>, mut value: f64, opt: &OptimizerSettings) -> (Vec<f64>, f64, usize, bool) {
    let pr = param.pr;
    let (kx, kz) = (pr.kx, pr.kz);
    for it in 1..=opt.max_iter {
        let mut next = t.clone();
        for &(u, x, _) in &param.blocks {
            let mut tau = vec![0.0; kz];
            for x2 in 0..kx {
                for z in 0..kz {
                    tau[z] += pr.xu[u * kx + x2] * t[(u * kx + x2) * kz + z];
                }
            }
            let s = &param.support[x];
            let logs: Vec<f64> = s
                .iter()
                .map(|&z| {
                    if tau[z] > 0.0 {
                        pr.p_zx(x)[z].ln() + (tau[z] / pr.pz[z]).ln() / pr.c
                    } else {
                        f64::NEG_INFINITY
                    }
                })
                .collect();
            let mx = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let e: Vec<f64> = logs.iter().map(|l| (l - mx).exp()).collect();
            let tot = ksum(e.iter().copied());
            let row = &mut next[(u * kx + x) * kz..(u * kx + x + 1) * kz];
            row.iter_mut().for_each(|r| *r = 0.0);
            for (k, &z) in s.iter().enumerate() {
                row[z] = e[k] / tot;
            }
        }
        let nv = pr.objective(&next);
        if !(nv > value) {
            return (t, value, it, true);
        }
        let gain = nv - value;
        t = next;
        value = nv;
        if gain < opt.tol {
            return (t, value, it, true);
        }
    }
    (t, value, opt.max_iter, false)
}

/// At `c = 1` the supremum may sit on a face of the simplex, where rows
/// of one auxiliary symbol share a reduced output support. The objective
/// splits over `u`, so each symbol is re-optimized on every proper face
/// and keeps its best block. Returns the improved tilt, if any.
fn face_pass(pr: &Problem, t: &[f64], opt: &OptimizerSettings) -> Option<Vec<f64>> {
    let block = pr.kx * pr.kz;
    let mut out = t.to_vec();
    let mut improved = false;
    for u in 0..pr.ku {
        let sub = pr.single(u);
        let current = &t[u * block..(u + 1) * block];
        let mut best = sub.objective(current);
        let faces: Vec<Run> = (1..(1usize << pr.kz) - 1)
            .into_par_iter()
            .filter_map(|mask| {
                let allowed: Vec<bool> = (0..pr.kz).map(|z| mask >> z & 1 == 1).collect();
                let param = Param::on_face(&sub, &allowed)?;
                let theta = param.theta_from(&param.base);
                Some(ascend(&param, theta, opt))
            })
            .collect();
        for run in faces {
            if run.value > best {
                best = run.value;
                out[u * block..(u + 1) * block].copy_from_slice(&run.t);
                improved = true;
            }
        }
    }
    improved.then_some(out)
}

/// Maximizes the `R′_α` objective by multi-start gradient ascent.
///
/// Start 0 is `t = p(z|x)`; start `k ≥ 1` draws softmax coordinates
/// uniformly in `[−3, 3]` from `derive_seed(opt.seed, "start", k)`. The best
/// final value wins, ties going to the lowest start index. At `α = ∞` each
/// auxiliary symbol is also optimized on every proper face of the output
/// simplex.
pub fn r_prime(
    p_u: &Pmf,
    ch_xu: &Channel,
    ch_zx: &Channel,
    a: AlphaOrder,
    opt: &OptimizerSettings,
) -> Result<RPrime> {
    let pr = Problem::new(p_u, ch_xu, ch_zx, a)?;
    let param = Param::new(&pr);
    let feasible = pr.feasible();
    let feasible_value = pr.objective(&feasible);
    let runs: Vec<Run> = (0..=opt.starts)
        .into_par_iter()
        .map(|k| {
            let theta = if k == 0 {
                param.theta_from(&feasible)
            } else {
                let mut rng = rng_from_seed(derive_seed(opt.seed, "start", k as u64));
                (0..param.dim).map(|_| rng.gen_range(-3.0..=3.0)).collect()
            };
            ascend(&param, theta, opt)
        })
        .collect();
    let mut best = 0;
    for (k, r) in runs.iter().enumerate() {
        if r.value > runs[best].value {
            best = k;
        }
    }
    let hi = runs.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);
    let lo = runs.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
    let chosen = &runs[best];
    // the feasible point is always available
    let (mut value, mut t) = if chosen.value >= feasible_value {
        (chosen.value, chosen.t.clone())
    } else {
        (feasible_value, feasible)
    };
    if pr.c == 1.0 {
        if let Some(better) = face_pass(&pr, &t, opt) {
            value = pr.objective(&better);
            t = better;
        }
    }
    Ok(RPrime {
        value_bits: nats_to_bits(value),
        tilt: TiltChannel {
            u: pr.ku,
            x: pr.kx,
            z: pr.kz,
            t,
        },
        trace: OptimizerTrace {
            starts: runs.len(),
            best_start: best,
            iterations: chosen.iterations,
            converged: chosen.converged,
            spread_bits: nats_to_bits(hi - lo),
        },
        feasible_bits: nats_to_bits(feasible_value),
    })
}

/// Evaluates the `R′_α` objective (bits) at a given tilt.
pub fn r_prime_objective(
    p_u: &Pmf,
    ch_xu: &Channel,
    ch_zx: &Channel,
    a: AlphaOrder,
    tilt: &TiltChannel,
) -> Result<f64> {
    let pr = Problem::new(p_u, ch_xu, ch_zx, a)?;
    if (tilt.u, tilt.x, tilt.z) != (pr.ku, pr.kx, pr.kz) || tilt.t.len() != pr.ku * pr.kx * pr.kz {
        return Err(Error::AlphabetMismatch("tilt channel shape".into()));
    }
    Ok(nats_to_bits(pr.objective(&tilt.t)))
}

/// Grid maximum of the `R′_α` objective for binary `U`, `X`, `Z`.
///
/// Each `t(0|u,x)` ranges over `0, step, 2·step, …, 1`. The objective is a
/// sum of per-`u` terms that each involve only `t(·|u,0)` and `t(·|u,1)`,
/// so the maximum over the four-dimensional grid equals the sum of
/// per-`u` maxima over two-dimensional grids.
pub fn r_prime_grid_oracle(p_u: &Pmf, ch_xu: &Channel, ch_zx: &Channel, a: AlphaOrder, step: f64) -> Result<f64> {
    if !(0.005..=0.05).contains(&step) {
        return Err(Error::invalid_arg("step", format!("must lie in [0.005, 0.05], got {step}")));
    }
    let pr = Problem::new(p_u, ch_xu, ch_zx, a)?;
    if (pr.ku, pr.kx, pr.kz) != (2, 2, 2) {
        return Err(Error::invalid_arg("alphabets", "grid oracle needs binary U, X and Z"));
    }
    let mut grid: Vec<f64> = (0..)
        .map(|k| k as f64 * step)
        .take_while(|v| *v <= 1.0 + 1e-12)
        .map(|v| v.min(1.0))
        .collect();
    if *grid.last().unwrap() < 1.0 {
        grid.push(1.0);
    }
    let mut total = Vec::with_capacity(2);
    for u in 0..2 {
        let mut best = f64::NEG_INFINITY;
        for &a0 in &grid {
            for &a1 in &grid {
                let rows = [a0, 1.0 - a0, a1, 1.0 - a1];
                best = best.max(pr.objective_u(u, &rows));
            }
        }
        total.push(best);
    }
    Ok(nats_to_bits(ksum(total)))
}
