//! Train a small regression network, checkpoint it and predict with it.

use loadcast::fleet::Fleet;
use loadcast::neural::{load_checkpoint, save_checkpoint, train, Checkpoint, ModelKind, NetworkConfig};
use loadcast::pipeline::{generate_dataset, GenerateSpec};
use loadcast::sampling::{DataClass, Protocol};
use loadcast::solver::SolverConfig;
use loadcast::summarize::Aggregation;
use loadcast::InstanceSketch;

fn main() -> anyhow::Result<()> {
    let fleet = Fleet::default_fleet();
    let class: DataClass = "A'".parse()?;
    let spec = GenerateSpec {
        class,
        protocol: Protocol::OneStage,
        n: 4000,
        k: 1,
        aggregation: Aggregation::OThrML,
        seed: 1,
        solver: SolverConfig::exact(),
    };
    let (data, _) = generate_dataset(&fleet, &spec)?;

    let mut cfg = NetworkConfig::new(ModelKind::RegMlp, class.max_counts(&fleet));
    cfg.max_epochs = 60;
    cfg.patience = 10;
    let (net, report) = train(cfg, &data, &fleet)?;
    println!(
        "{} parameters, {} epochs (best {}), validation MAE {:.3}, {:.1} s",
        net.num_parameters(),
        report.epochs_run,
        report.best_epoch,
        report.validation_mae,
        report.wall_clock_secs
    );

    let dir = tempfile::tempdir()?;
    let path = dir.path().join("regmlp.ck");
    save_checkpoint(
        &path,
        &Checkpoint {
            network: net,
            fleet_hash: fleet.hash(),
            report: Some(report),
        },
    )?;
    let back = load_checkpoint(&path)?;
    let sketch = InstanceSketch::new([1, 0, 1, 0, 2, 0, 0, 1, 0, 0], [9, 4]);
    println!(
        "prediction for {:?}: {:?}",
        sketch.to_vector(),
        back.network.predict(&sketch)?.to_vector()
    );
    Ok(())
}
