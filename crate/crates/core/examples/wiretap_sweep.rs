//! A small wiretap coding sweep: writes a config and its inputs to a
//! temporary directory, runs it and prints per-blocklength medians.

use osrb_lab::cli::{emit_records, Format};
use osrb_lab::measures::{Channel, Pmf};
use osrb_lab::numeric::median;
use osrb_lab::wiretap::{sweep_experiment, ExperimentConfig};

fn main() -> osrb_lab::Result<()> {
    let dir = tempfile::tempdir().expect("temporary directory");
    Pmf::uniform(2).save(dir.path().join("px.json"))?;
    Channel::bsc(0.1)?.save(dir.path().join("main.json"))?;
    Channel::bsc(0.3)?.save(dir.path().join("eve.json"))?;
    let config = ExperimentConfig::from_json_str(
        r#"{"ns":[4,6,8],"r1":0.05,"r2":0.62,"alpha":2,"eps":0.35,"codes":16,"seed":1,
            "encoder":"deterministic","input":"px.json","main":"main.json","eve":"eve.json"}"#,
    )?;
    let exp = config.resolve(dir.path())?;
    let records = sweep_experiment(&exp)?;

    println!("{:>3} {:>14} {:>14}", "n", "median leak", "median error");
    for &n in &exp.ns {
        let at = |f: fn(&osrb_lab::wiretap::ExperimentRecord) -> f64| {
            median(&records.iter().filter(|r| r.n == n).map(f).collect::<Vec<_>>())
        };
        println!("{n:>3} {:>14.6} {:>14.6}", at(|r| r.leakage), at(|r| r.error_prob));
    }

    let out = dir.path().join("sweep.csv");
    emit_records(&records, Format::Csv, &out)?;
    print!("\n{}", std::fs::read_to_string(&out).expect("written csv").lines().take(3).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}
