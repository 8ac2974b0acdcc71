//! Networks trained on small instances, tested on a class never seen in
//! training. The classification head cannot represent the larger counts.

use loadcast::eval::{mae_metrics, Predictor};
use loadcast::fleet::Fleet;
use loadcast::neural::{train, ModelKind, NetworkConfig};
use loadcast::pipeline::{generate_dataset, GenerateSpec};
use loadcast::sampling::{DataClass, Protocol};
use loadcast::solver::SolverConfig;
use loadcast::summarize::{Aggregation, Split, Summary};
use loadcast::Error;

fn main() -> anyhow::Result<()> {
    let fleet = Fleet::default_fleet();
    let gen = |class: &str, n| -> anyhow::Result<_> {
        let spec = GenerateSpec {
            class: class.parse()?,
            protocol: Protocol::OneStage,
            n,
            k: 1,
            aggregation: Aggregation::OThrML,
            seed: 8,
            solver: SolverConfig::exact(),
        };
        Ok(generate_dataset(&fleet, &spec)?.0)
    };
    let train_a = gen("A'", 3000)?;
    let test_d = gen("D'", 300)?;
    let sketches: Vec<_> = test_d.examples.iter().map(|e| e.input).collect();
    let targets: Vec<Summary> = test_d.examples.iter().map(|e| e.target).collect();
    let a: DataClass = "A'".parse()?;

    for kind in [ModelKind::RegMlp, ModelKind::ClassMlp] {
        let mut cfg = NetworkConfig::new(kind, a.max_counts(&fleet));
        cfg.max_epochs = 30;
        let (net, report) = train(cfg, &train_a, &fleet)?;
        print!("{kind}: validation MAE on A' {:.3}; ", report.validation_mae);
        match Predictor::Network(net).predict_all(&sketches, &fleet) {
            Ok(preds) => println!("MAE on D' {:.3}", mae_metrics(&preds, &targets, &fleet)?.mae),
            Err(e @ Error::UnsupportedInput { .. }) => println!("NA on D' ({e})"),
            Err(e) => return Err(e.into()),
        }
    }
    println!("D' test split holds {} examples", test_d.part(Split::Test).len());
    Ok(())
}
