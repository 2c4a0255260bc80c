//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use osrb_lab::binning::{
    expected_divergence_enum, expected_divergence_mc, expected_tsallis_exact, expected_tsallis_exact_iid,
    osrb_sweep, tsallis2_closed_form, OsrbMode,
};
use osrb_lab::cli::{render_records, Format};
use osrb_lab::measures::{
    cond_renyi_entropy, conditional_entropy, is_singleton, mutual_information, renyi_divergence,
    renyi_entropy, total_variation, tsallis_divergence,
};
use osrb_lab::numeric::{bits_to_nats, median};
use osrb_lab::rates::{
    osrb_threshold_iid, osrb_threshold_typical, r_prime, r_prime_grid_oracle, secrecy_rate, EncoderInput,
    OptimizerSettings,
};
use osrb_lab::seed::rng_from_seed;
use osrb_lab::wiretap::{sweep_experiment, Experiment};
use osrb_lab::{AlphaOrder, Channel, JointPmf, Pmf};
use rand::Rng as _;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn finite(a: f64) -> AlphaOrder {
    AlphaOrder::new(a).unwrap()
}

fn side_info_joint() -> JointPmf {
    JointPmf::from_side_info(&Pmf::uniform(2), &Channel::bsc(0.25).unwrap()).unwrap()
}

fn criterion_1() -> Outcome {
    let mut rng = rng_from_seed(101);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for _ in 0..100 {
        let j = common::joint_sized(&mut rng, 2..=3, 1..=3);
        for m in [2u64, 3] {
            for alpha in [2u32, 3, 4] {
                let exact = expected_tsallis_exact(&j, m, alpha).unwrap();
                let brute = expected_divergence_enum(&j, m, finite(alpha as f64)).unwrap();
                let rel = (exact - brute).abs() / brute.abs().max(1e-300);
                worst = worst.max(if brute == 0.0 { (exact - brute).abs() } else { rel });
                cases += 1;
            }
        }
    }
    outcome(worst <= 1e-10, format!("{cases} cases, max relative error {worst:.2e} (limit 1e-10)"))
}

fn criterion_2() -> Outcome {
    let mut rng = rng_from_seed(101);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let j = common::joint_sized(&mut rng, 2..=3, 1..=3);
        for m in [2u64, 3] {
            let brute = expected_divergence_enum(&j, m, finite(2.0)).unwrap();
            worst = worst.max((tsallis2_closed_form(&j, m) - brute).abs());
        }
    }
    let worked = tsallis2_closed_form(&side_info_joint(), 2);
    let ok = worst <= 1e-12 && (worked - 0.625).abs() <= 1e-12;
    outcome(ok, format!("max abs error {worst:.2e} (limit 1e-12); worked instance {worked}"))
}

fn strictly(values: &[f64], decreasing: bool) -> bool {
    values.windows(2).all(|w| if decreasing { w[1] < w[0] } else { w[1] > w[0] })
}

fn criterion_3() -> Outcome {
    let j = side_info_joint();
    let h2 = cond_renyi_entropy(&j, finite(2.0));
    let series = |rate: f64| -> Vec<f64> {
        (2..=12)
            .map(|n| expected_tsallis_exact_iid(&j, n, osrb_lab::numeric::bins_for_rate(n, rate), 2).unwrap())
            .collect()
    };
    let below = series(h2 - 0.2);
    let above = series(h2 + 0.2);
    let factor = below[below.len() - 1] / below[0];
    let dec = strictly(&below, true);
    let inc = strictly(&above, false);
    let ok = dec && factor <= 2f64.powf(-1.5) && inc;
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ");
    outcome(
        ok,
        format!(
            "H2 = {h2:.4}; below: strictly decreasing = {dec}, factor {factor:.4} (limit {:.4}), [{}]; above: strictly increasing = {inc}, [{}]",
            2f64.powf(-1.5),
            fmt(&below),
            fmt(&above)
        ),
    )
}

const ALPHAS: [f64; 6] = [0.5, 0.9, 1.1, 2.0, 3.0, 8.0];

fn criterion_4() -> Outcome {
    let mut rng = rng_from_seed(404);
    let mut failures: Vec<String> = Vec::new();
    let mut note = |ok: bool, what: &str| {
        if !ok && !failures.iter().any(|f| f == what) {
            failures.push(what.to_string());
        }
    };
    for _ in 0..200 {
        let (kx, kz) = (rng.gen_range(2..=3), rng.gen_range(1..=3));
        let j = common::joint(&mut rng, kx, kz);
        let px = common::pmf(&mut rng, kx);
        let pz = common::pmf(&mut rng, kz);
        let indep = JointPmf::independent(&px, &pz);
        let h: Vec<f64> = ALPHAS.iter().map(|&a| cond_renyi_entropy(&j, finite(a))).collect();
        for (k, &a) in ALPHAS.iter().enumerate() {
            let v = cond_renyi_entropy(&indep, finite(a));
            note((v - renyi_entropy(&px, finite(a))).abs() <= 1e-12, "(1) independence");
            note(h[k] >= 0.0, "(8) nonnegativity");
        }
        let singleton = is_singleton(&j);
        for w in h.windows(2) {
            note(w[1] <= w[0] + 1e-12, "(2) monotone");
            if !singleton {
                note(w[0] - w[1] > 1e-9, "(2) strict margin");
            }
        }
        let hc = conditional_entropy(&j);
        for a in [1.0 - 1e-4, 1.0 + 1e-4] {
            note((cond_renyi_entropy(&j, finite(a)) - hc).abs() <= 1e-3, "(3) continuity at one");
        }
        // X − Y − Z by composing a random channel after Y
        let ky = rng.gen_range(1..=3);
        let jxy = common::joint(&mut rng, kx, ky);
        let yz = common::channel(&mut rng, ky, kz);
        let xz = JointPmf::from_input_and_channel(&jxy.row_marginal(), &jxy.z_given_x().compose(&yz).unwrap()).unwrap();
        for &a in ALPHAS.iter().filter(|a| **a > 1.0) {
            note(
                cond_renyi_entropy(&jxy, finite(a)) <= cond_renyi_entropy(&xz, finite(a)) + 1e-12,
                "(4) data processing",
            );
        }
        // convexity in p(z) with p(x|z) fixed
        let xz_ch = common::channel(&mut rng, kz, kx);
        let (p1, p2) = (common::pmf(&mut rng, kz), common::pmf(&mut rng, kz));
        let lam: f64 = rng.gen();
        let mix = Pmf::from_probs(p1.probs().iter().zip(p2.probs()).map(|(a, b)| lam * a + (1.0 - lam) * b).collect())
            .unwrap();
        let side = |p: &Pmf| JointPmf::from_side_info(p, &xz_ch).unwrap();
        for &a in ALPHAS.iter().filter(|a| **a > 1.0) {
            let f = |p: &Pmf| cond_renyi_entropy(&side(p), finite(a));
            note(f(&mix) <= lam * f(&p1) + (1.0 - lam) * f(&p2) + 1e-12, "(5) convexity");
        }
        let maxp = (0..kz).filter_map(|z| j.x_given_z(z)).flatten().fold(0.0, f64::max);
        note((cond_renyi_entropy(&j, finite(1e4)) + maxp.log2()).abs() <= 1e-3, "(6) large order");
        for n in [2usize, 3] {
            let jn = j.product(n);
            for &a in &ALPHAS {
                let v = cond_renyi_entropy(&jn, finite(a));
                note((v - n as f64 * cond_renyi_entropy(&j, finite(a))).abs() <= 1e-9, "(7) additivity");
            }
        }
        let flat = Channel::constant(kz, &Pmf::uniform(kx));
        let sj = JointPmf::from_side_info(&pz, &flat).unwrap();
        let base = cond_renyi_entropy(&sj, finite(ALPHAS[0]));
        for &a in &ALPHAS[1..] {
            note((cond_renyi_entropy(&sj, finite(a)) - base).abs() <= 1e-12, "(9) singleton");
        }
    }
    if failures.is_empty() {
        outcome(true, "200 joints, nine properties at alpha in {0.5, 0.9, 1.1, 2, 3, 8}")
    } else {
        outcome(false, format!("violated: {}", failures.join(", ")))
    }
}

fn criterion_5() -> Outcome {
    let mut rng = rng_from_seed(505);
    let mut bad = Vec::new();
    let grid = [0.25, 0.5, 0.9, 1.0, 1.1, 1.5, 2.0, 4.0, 8.0, f64::INFINITY];
    for i in 0..500 {
        let k = rng.gen_range(2..=5);
        let (p, q) = (common::pmf(&mut rng, k), common::pmf(&mut rng, k));
        let a = if rng.gen::<bool>() {
            rng.gen_range(0.05..0.95)
        } else {
            rng.gen_range(1.05..10.0)
        };
        let t = tsallis_divergence(&p, &q, finite(a)).unwrap();
        let d = renyi_divergence(&p, &q, finite(a)).unwrap();
        if (a > 1.0 && t < d - 1e-12) || (a < 1.0 && t > d + 1e-12) {
            bad.push(format!("tsallis/renyi #{i}"));
        }
        let ds: Vec<f64> = grid.iter().map(|&g| renyi_divergence(&p, &q, AlphaOrder::new(g).unwrap()).unwrap()).collect();
        if ds.windows(2).any(|w| w[1] < w[0] - 1e-12) {
            bad.push(format!("monotonicity #{i}"));
        }
        let j = common::joint_sized(&mut rng, 2..=4, 2..=4);
        let flat = j.flatten();
        let prod = JointPmf::independent(&j.row_marginal(), &j.col_marginal()).flatten();
        let tv = total_variation(&flat, &prod).unwrap();
        let mi_nats = bits_to_nats(mutual_information(&j));
        if tv > (0.5 * mi_nats).sqrt() + 1e-12 {
            bad.push(format!("pinsker #{i}"));
        }
        let px = j.row_marginal();
        let ch = j.z_given_x();
        for a in [finite(rng.gen_range(1.05..10.0)), AlphaOrder::Infinity] {
            let lhs = osrb_threshold_iid(&j, a).threshold_bits;
            let rhs = osrb_threshold_typical(&px, &ch, a).unwrap().threshold_bits;
            if lhs > rhs + 1e-12 {
                bad.push(format!("comparison #{i} at {a}"));
            }
        }
    }
    if bad.is_empty() {
        outcome(true, "500 instances each: T vs D in nats, Renyi monotonicity, Pinsker, threshold comparison")
    } else {
        outcome(false, format!("{} violations, first: {}", bad.len(), bad[0]))
    }
}

fn criterion_6() -> Outcome {
    let mut rng = rng_from_seed(606);
    let opt = OptimizerSettings::default();
    let step = 0.01;
    let slack = 1e-3 + step;
    let mut worst_gap: f64 = 0.0;
    let mut worst_below: f64 = 0.0;
    let mut feasible_ok = true;
    for _ in 0..50 {
        let pu = common::binary(&mut rng);
        let xu = common::channel(&mut rng, 2, 2);
        let zx = common::channel(&mut rng, 2, 2);
        for a in [finite(1.5), finite(2.0), finite(4.0), AlphaOrder::Infinity] {
            let r = r_prime(&pu, &xu, &zx, a, &opt).unwrap();
            let g = r_prime_grid_oracle(&pu, &xu, &zx, a, step).unwrap();
            worst_gap = worst_gap.max((r.value_bits - g).abs());
            worst_below = worst_below.max(g - r.value_bits);
            let iuz = mutual_information(&JointPmf::from_input_and_channel(&pu, &xu.compose(&zx).unwrap()).unwrap());
            feasible_ok &= r.value_bits >= iuz - 1e-9;
        }
    }
    let mut indep_worst: f64 = 0.0;
    for _ in 0..10 {
        let pu = common::binary(&mut rng);
        let xu = common::channel(&mut rng, 2, 2);
        let zx = Channel::constant(2, &common::binary(&mut rng));
        for a in [finite(1.5), finite(2.0), finite(4.0), AlphaOrder::Infinity] {
            indep_worst = indep_worst.max(r_prime(&pu, &xu, &zx, a, &opt).unwrap().value_bits);
        }
    }
    let ok = worst_gap <= slack && worst_below <= 1e-9 && feasible_ok && indep_worst <= 1e-6;
    outcome(
        ok,
        format!(
            "200 fits: max |opt - grid| {worst_gap:.2e} (limit {slack:.3}), max grid excess {worst_below:.2e}, feasible bound held = {feasible_ok}; independent-output max {indep_worst:.2e}"
        ),
    )
}

fn criterion_7() -> Outcome {
    let main = Channel::bsc(0.1).unwrap();
    let eve = Channel::bsc(0.3).unwrap();
    let x = EncoderInput::Deterministic(Pmf::uniform(2));
    let opt = OptimizerSettings::default();
    let rate = |a| secrecy_rate(&main, &eve, &x, a, &opt).unwrap().threshold_bits;
    let (r1, r2, ri) = (rate(AlphaOrder::One), rate(finite(2.0)), rate(AlphaOrder::Infinity));
    let near = rate(finite(1.0001));
    let ok = (r1 - 0.4123).abs() <= 1e-4
        && (r2 - 0.3169).abs() <= 1e-4
        && (ri - 0.0456).abs() <= 1e-4
        && (near - r1).abs() <= 5e-3;
    outcome(ok, format!("alpha=1 {r1:.5}, alpha=2 {r2:.5}, alpha=inf {ri:.5}, alpha=1.0001 {near:.5}"))
}

const WIRETAP_EPS: f64 = 0.35;
const WIRETAP_NS: [usize; 4] = [4, 6, 8, 10];

fn wiretap_experiment(r1: f64, r2: f64) -> Experiment {
    Experiment::new(
        WIRETAP_NS.to_vec(),
        r1,
        r2,
        finite(2.0),
        WIRETAP_EPS,
        32,
        1,
        Pmf::uniform(2),
        None,
        Channel::bsc(0.1).unwrap(),
        Channel::bsc(0.3).unwrap(),
    )
    .unwrap()
}

fn medians(exp: &Experiment) -> (Vec<f64>, Vec<f64>) {
    let recs = sweep_experiment(exp).unwrap();
    let at = |n: usize, f: fn(&osrb_lab::wiretap::ExperimentRecord) -> f64| {
        median(&recs.iter().filter(|r| r.n == n).map(f).collect::<Vec<_>>())
    };
    (
        WIRETAP_NS.iter().map(|&n| at(n, |r| r.leakage)).collect(),
        WIRETAP_NS.iter().map(|&n| at(n, |r| r.error_prob)).collect(),
    )
}

fn criterion_8() -> Outcome {
    let main = Channel::bsc(0.1).unwrap();
    let eve = Channel::bsc(0.3).unwrap();
    let u = Pmf::uniform(2);
    let threshold = osrb_threshold_typical(&u, &eve, finite(2.0)).unwrap().threshold_bits;
    let hxy = conditional_entropy(&JointPmf::from_input_and_channel(&u, &main).unwrap().transpose());
    let r2 = hxy + 0.15;
    let (lb, eb) = medians(&wiretap_experiment(threshold - 0.15 - r2, r2));
    let (la, _) = medians(&wiretap_experiment(threshold + 0.15 - r2, r2));
    let noninc = |v: &[f64]| v.windows(2).all(|w| w[1] <= w[0]);
    let nondec = |v: &[f64]| v.windows(2).all(|w| w[1] >= w[0]);
    let (a, b, c) = (noninc(&lb), noninc(&eb), nondec(&la));
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ");
    outcome(
        a && b && c,
        format!(
            "eps {WIRETAP_EPS}, 32 codes, n = 4,6,8,10; below: leakage [{}] nonincreasing = {a}, error [{}] nonincreasing = {b}; above: leakage [{}] nondecreasing = {c}",
            fmt(&lb),
            fmt(&eb),
            fmt(&la)
        ),
    )
}

fn criterion_9() -> Outcome {
    // one-shot bound, natural logarithms throughout
    let mut rng = rng_from_seed(909);
    let mut checked = 0;
    let mut violations = 0;
    let mut worst_ratio: f64 = 0.0;
    while checked < 100 {
        let kx = rng.gen_range(4..=10);
        let kz = rng.gen_range(1..=3);
        let m: u64 = rng.gen_range(2..=3);
        let pz = common::pmf(&mut rng, kz);
        let rows: Vec<Vec<f64>> = (0..kz)
            .map(|_| {
                let w: Vec<f64> = (0..kx).map(|_| 1.0 + 0.3 * rng.gen::<f64>()).collect();
                let s: f64 = w.iter().sum();
                w.iter().map(|v| v / s).collect()
            })
            .collect();
        let j = JointPmf::from_side_info(&pz, &Channel::from_rows(rows).unwrap()).unwrap();
        let maxp = (0..kz).filter_map(|z| j.x_given_z(z)).flatten().fold(0.0, f64::max);
        let side = m as f64 * ((m * kz as u64) as f64).ln() * maxp;
        if side >= 1.0 {
            continue;
        }
        checked += 1;
        let measured = bits_to_nats(expected_divergence_enum(&j, m, AlphaOrder::Infinity).unwrap());
        let bound = 2.0 * side.sqrt();
        worst_ratio = worst_ratio.max(measured / bound);
        if measured > bound {
            violations += 1;
        }
    }
    let j = side_info_joint();
    let hinf = cond_renyi_entropy(&j, AlphaOrder::Infinity);
    let rate = hinf - 0.25;
    let means: Vec<f64> = (2..=10)
        .map(|n| expected_divergence_mc(&j, n, rate, AlphaOrder::Infinity, 2000, 99).unwrap().mean)
        .collect();
    let trend = means.windows(2).all(|w| w[1] <= w[0]);
    let fmt = means.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ");
    outcome(
        violations == 0 && trend,
        format!(
            "one-shot bound: {checked} instances, {violations} violations, max measured/bound {worst_ratio:.3}; MC trend at R = {rate:.4}: [{fmt}] nonincreasing = {trend}"
        ),
    )
}

fn run_bin(args: &[&str], threads: &str) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_osrb-lab"))
        .args(args)
        .env("OSRB_LAB_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).display().to_string();
    side_info_joint().save(path("joint.json")).unwrap();
    Pmf::uniform(2).save(path("px.json")).unwrap();
    Channel::bsc(0.1).unwrap().save(path("main.json")).unwrap();
    Channel::bsc(0.3).unwrap().save(path("eve.json")).unwrap();
    std::fs::write(
        path("sweep.json"),
        r#"{"ns":[4,6],"r1":0.1,"r2":0.6,"alpha":2,"eps":0.35,"codes":8,"seed":7,
            "encoder":"deterministic","input":"px.json","main":"main.json","eve":"eve.json"}"#,
    )
    .unwrap();
    let mut identical = true;
    let mut runs = 0;
    for (name, args) in [
        ("osrb", vec!["osrb", "--joint", "JOINT", "--alpha", "2,inf", "--rate", "0.4", "--n", "2..6", "--mode", "mc", "--trials", "200", "--seed", "5"]),
        ("wiretap", vec!["wiretap", "--config", "CONFIG"]),
    ] {
        let mut outputs = Vec::new();
        for (k, threads) in ["1", "4", "1", "0"].iter().enumerate() {
            let out = path(&format!("{name}{k}.csv"));
            let mut a: Vec<String> = args
                .iter()
                .map(|s| match *s {
                    "JOINT" => path("joint.json"),
                    "CONFIG" => path("sweep.json"),
                    other => other.to_string(),
                })
                .collect();
            a.extend(["--out".to_string(), out.clone()]);
            let refs: Vec<&str> = a.iter().map(|s| s.as_str()).collect();
            let res = run_bin(&refs, threads);
            identical &= res.status.success();
            outputs.push(std::fs::read(&out).unwrap_or_default());
            runs += 1;
        }
        identical &= outputs.windows(2).all(|w| w[0] == w[1]) && !outputs[0].is_empty();
    }
    // in-process: the same sweep rendered under different pool sizes
    let j = side_info_joint();
    let render = |threads| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            let recs = osrb_sweep(&j, &[3, 5], 0.5, finite(3.0), OsrbMode::Mc, 300, 11).unwrap();
            render_records(&recs, Format::Json).unwrap()
        })
    };
    identical &= render(1) == render(3);
    outcome(identical, format!("{runs} CLI runs at 1/4/1/auto threads plus in-process pools: byte-identical = {identical}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("exact expectation vs enumeration", criterion_1, Duration::from_secs(10)),
        ("alpha=2 closed form", criterion_2, Duration::from_secs(1)),
        ("alpha=2 phase transition", criterion_3, Duration::from_secs(5)),
        ("conditional Renyi entropy properties", criterion_4, Duration::from_secs(30)),
        ("divergence inequalities", criterion_5, Duration::from_secs(30)),
        ("R' optimizer vs grid oracle", criterion_6, Duration::from_secs(300)),
        ("secrecy rates", criterion_7, Duration::from_secs(1)),
        ("wiretap sweep trends", criterion_8, Duration::from_secs(300)),
        ("D_inf one-shot bound and decay", criterion_9, Duration::from_secs(120)),
        ("reproducibility across thread counts", criterion_10, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (k, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        let took = start.elapsed();
        let in_time = took <= *limit;
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "{} [{:>2}] {name}: {} ({:.2} s, limit {} s{})",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            out.detail,
            took.as_secs_f64(),
            limit.as_secs(),
            if in_time { "" } else { ", over time" }
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
