//! Score networks and heuristics on test splits of both aggregations.

use loadcast::eval::{evaluate_suite, suite_csv, suite_text, EvalSet, Predictor, SuiteModel};
use loadcast::fleet::Fleet;
use loadcast::neural::{train, ModelKind, NetworkConfig};
use loadcast::pipeline::{generate_dataset, GenerateSpec};
use loadcast::sampling::{DataClass, Protocol};
use loadcast::solver::SolverConfig;
use loadcast::summarize::{Aggregation, Split};

fn main() -> anyhow::Result<()> {
    let fleet = Fleet::default_fleet();
    let class: DataClass = "A'".parse()?;
    let mut sets = Vec::new();
    let mut models = Vec::new();
    for (protocol, aggregation) in [
        (Protocol::OneStage, Aggregation::OThrML),
        (Protocol::TwoStage, Aggregation::OBefML),
    ] {
        let spec = GenerateSpec {
            class,
            protocol,
            n: 2000,
            k: 5,
            aggregation,
            seed: 4,
            solver: SolverConfig::exact(),
        };
        let (data, _) = generate_dataset(&fleet, &spec)?;
        for kind in [ModelKind::RegMlp, ModelKind::LinReg] {
            let mut cfg = NetworkConfig::new(kind, class.max_counts(&fleet));
            cfg.max_epochs = 40;
            let (net, _) = train(cfg, &data, &fleet)?;
            models.push(SuiteModel {
                predictor: Predictor::Network(net),
                aggregation: Some(aggregation),
                trials: vec![],
            });
        }
        let test = data.part(Split::Test);
        sets.push(EvalSet {
            name: format!("{class}"),
            aggregation,
            sketches: test.iter().map(|e| e.input).collect(),
            targets: test.iter().map(|e| e.target).collect(),
        });
    }
    for p in [Predictor::HeurV, Predictor::HeurS] {
        models.push(SuiteModel {
            predictor: p,
            aggregation: None,
            trials: vec![],
        });
    }
    let cells = evaluate_suite(&models, &sets, &fleet)?;
    print!("{}", suite_text(&cells));
    println!();
    print!("{}", suite_csv(&cells));
    Ok(())
}
