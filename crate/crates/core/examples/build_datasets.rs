//! Labeled datasets under both aggregations, saved and reloaded.

use loadcast::dataset::{load_dataset, save_dataset, write_csv};
use loadcast::fleet::Fleet;
use loadcast::pipeline::{generate_dataset, GenerateSpec};
use loadcast::sampling::Protocol;
use loadcast::solver::SolverConfig;
use loadcast::summarize::{Aggregation, Split};

fn main() -> anyhow::Result<()> {
    let fleet = Fleet::default_fleet();
    let dir = tempfile::tempdir()?;
    for (protocol, aggregation) in [
        (Protocol::OneStage, Aggregation::OThrML),
        (Protocol::TwoStage, Aggregation::OBefML),
    ] {
        let spec = GenerateSpec {
            class: "A'".parse()?,
            protocol,
            n: 200,
            k: 9,
            aggregation,
            seed: 11,
            solver: SolverConfig::exact(),
        };
        let (data, stats) = generate_dataset(&fleet, &spec)?;
        let path = dir.path().join(format!("{aggregation}.bin"));
        save_dataset(&path, &data, &fleet.hash())?;
        let (header, back) = load_dataset(&path)?;
        assert_eq!(back, data);
        println!(
            "{aggregation}: {} examples from {} solves, test split {}, fleet {}",
            data.len(),
            stats.solves,
            data.part(Split::Test).len(),
            &header.fleet_hash[..12]
        );
        let mut csv = Vec::new();
        write_csv(&mut csv, &data)?;
        for line in String::from_utf8(csv)?.lines().take(3) {
            println!("    {line}");
        }
    }
    Ok(())
}
