use osrb_lab::measures::{tsallis_divergence, AlphaOrder, Channel, Pmf};
use osrb_lab::seed::rng_from_seed;
use osrb_lab::typicality::sequence_digits;
use osrb_lab::wiretap::*;
use rand::Rng as _;

fn bsc(p: f64) -> Channel {
    Channel::bsc(p).unwrap()
}

fn code(n: usize, r1: f64, r2: f64, seed: u64) -> WiretapCode {
    build_code(CodeSource::deterministic(&Pmf::uniform(2), n, 0.35).unwrap(), r1, r2, seed).unwrap()
}

fn bin_masses(c: &WiretapCode, f: u64) -> Vec<f64> {
    let d = c.label_distribution();
    (1..=c.m1()).map(|m| d[((m - 1) * c.m2() + f - 1) as usize]).collect()
}

#[test]
fn simulated_error_matches_exact() {
    let main = bsc(0.05);
    let c = code(4, 0.5, 0.5, 3);
    let f = (1..=c.m2()).find(|&f| bin_masses(&c, f).iter().sum::<f64>() > 0.0).unwrap();
    let exact = error_prob(&c, f, &main).unwrap();
    let masses = bin_masses(&c, f);
    let total: f64 = masses.iter().sum();
    let mut rng = rng_from_seed(9);
    let trials = 20_000;
    let mut errors = 0;
    for _ in 0..trials {
        let mut r = rng.gen::<f64>() * total;
        let mut m = 1;
        for (k, w) in masses.iter().enumerate() {
            if r < *w {
                m = k as u64 + 1;
                break;
            }
            r -= w;
        }
        let cw = encode_with(&c, m, f, &mut rng).unwrap();
        let y = sequence_digits(cw.x, 2, 4)
            .into_iter()
            .fold(0u64, |acc, x| 2 * acc + if rng.gen::<f64>() < 0.05 { 1 - x as u64 } else { x as u64 });
        if decode(&c, f, y, &main).unwrap().m != m {
            errors += 1;
        }
    }
    let rate = errors as f64 / trials as f64;
    let sd = (exact * (1.0 - exact) / trials as f64).sqrt();
    assert!((rate - exact).abs() <= 4.0 * sd + 1e-3, "simulated {rate}, exact {exact}");
}

#[test]
fn noiseless_main_channel_never_errs() {
    let c = code(6, 0.3, 0.4, 5);
    let (f, recs) = select_f(&c, &Channel::identity(2), &bsc(0.3), AlphaOrder::new(2.0).unwrap()).unwrap();
    assert!(recs.iter().all(|r| r.error_prob.abs() < 1e-15));
    assert!(recs.iter().any(|r| r.f == f));
    let cw = encode(&c, c.labels()[0].0, c.labels()[0].1, 1).unwrap();
    let back = decode(&c, c.labels()[0].1, cw.x, &Channel::identity(2)).unwrap();
    assert_eq!(back.item, cw.x);
}

#[test]
fn leakage_matches_brute_force() {
    let eve = bsc(0.3);
    let c = code(4, 0.5, 0.5, 11);
    let a = AlphaOrder::new(2.0).unwrap();
    let pz1 = [0.5f64, 0.5];
    for f in 1..=c.m2() {
        let Ok(got) = leakage(&c, f, &eve, a) else { continue };
        let total: f64 = bin_masses(&c, f).iter().sum();
        let mut joint = vec![0.0; c.m1() as usize * 16];
        for m in 1..=c.m1() {
            for i in c.bin(m, f) {
                let w = c.source().item_log_prob(i).exp() / total;
                let x = sequence_digits(c.source().item(i), 2, 4);
                for z in 0..16u64 {
                    let zd = sequence_digits(z, 2, 4);
                    let l: f64 = x.iter().zip(&zd).map(|(&xi, &zi)| eve.get(xi, zi)).product();
                    joint[(m as usize - 1) * 16 + z as usize] += w * l;
                }
            }
        }
        let q: Vec<f64> = (0..c.m1() as usize * 16).map(|_| pz1[0].powi(4) / c.m1() as f64).collect();
        let want = tsallis_divergence(&Pmf::from_probs(joint).unwrap(), &Pmf::from_probs(q).unwrap(), a).unwrap();
        assert!((got - want).abs() < 1e-12, "f={f}: {got} vs {want}");
    }
}

#[test]
fn labels_replay_from_seed() {
    let a = code(6, 0.3, 0.4, 42);
    let b = code(6, 0.3, 0.4, 42);
    assert_eq!(a.labels(), b.labels());
    assert_ne!(a.labels(), code(6, 0.3, 0.4, 43).labels());
    assert!((a.label_distribution().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!((0.0..=1.0).contains(&a.label_tv()));
}

#[test]
fn label_law_flattens_with_blocklength() {
    let tv_at = |n: usize| -> f64 {
        let tvs: Vec<f64> = (0..16).map(|s| code(n, 0.2, 0.3, s).label_tv()).collect();
        osrb_lab::numeric::median(&tvs)
    };
    assert!(tv_at(12) < tv_at(4));
}

#[test]
fn empty_bin_policy_reports_discards() {
    let src = CodeSource::deterministic(&Pmf::uniform(2), 4, 0.35).unwrap();
    let (c, discards) = build_code_with_policy(src.clone(), 0.5, 0.5, 7).unwrap();
    assert!(discards <= MAX_ATTEMPTS);
    if discards < MAX_ATTEMPTS {
        assert!(c.empty_bins() as f64 <= EMPTY_BIN_LIMIT * (c.m1() * c.m2()) as f64);
    }
    let (crowded, d) = build_code_with_policy(src, 1.0, 1.0, 7).unwrap();
    assert_eq!(d, MAX_ATTEMPTS);
    assert!(crowded.empty_bins() > 0);
}

#[test]
fn stochastic_codes_run() {
    let src = CodeSource::stochastic(&Pmf::uniform(2), &bsc(0.1), 4, 0.4).unwrap();
    let c = build_code(src, 0.25, 0.25, 2).unwrap();
    let (_, recs) = select_f(&c, &bsc(0.05), &bsc(0.3), AlphaOrder::Infinity).unwrap();
    assert!(recs.iter().all(|r| r.leakage >= 0.0 && (0.0..=1.0).contains(&r.error_prob)));
    let m = c.labels()[0];
    let cw = encode(&c, m.0, m.1, 3).unwrap();
    assert!(cw.u.is_some());
}

#[test]
fn config_paths_resolve_relative_to_file() {
    let dir = tempfile::tempdir().unwrap();
    Pmf::uniform(2).save(dir.path().join("px.json")).unwrap();
    bsc(0.1).save(dir.path().join("main.json")).unwrap();
    bsc(0.3).save(dir.path().join("eve.json")).unwrap();
    let cfg = ExperimentConfig::from_json_str(
        r#"{"ns":[4],"r1":0.1,"r2":0.5,"alpha":2,"eps":0.35,"codes":3,"seed":1,
            "encoder":"deterministic","input":"px.json","main":"main.json","eve":"eve.json"}"#,
    )
    .unwrap();
    let exp = cfg.resolve(dir.path()).unwrap();
    let recs = sweep_experiment(&exp).unwrap();
    assert_eq!(recs.len(), 3);
    assert_eq!(recs[1].code_seed, exp.code_seed(4, 1));
    assert!(cfg.resolve(dir.path().join("nowhere")).is_err());
}
