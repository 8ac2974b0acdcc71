//! Random hyperparameter search over small classification networks.

use loadcast::fleet::Fleet;
use loadcast::neural::{random_search, ModelKind, NetworkConfig, SearchSpace};
use loadcast::pipeline::{generate_dataset, GenerateSpec};
use loadcast::sampling::{DataClass, Protocol};
use loadcast::solver::SolverConfig;
use loadcast::summarize::Aggregation;

fn main() -> anyhow::Result<()> {
    let fleet = Fleet::default_fleet();
    let class: DataClass = "A'".parse()?;
    let spec = GenerateSpec {
        class,
        protocol: Protocol::TwoStage,
        n: 2000,
        k: 5,
        aggregation: Aggregation::OBefML,
        seed: 2,
        solver: SolverConfig::exact(),
    };
    let (data, _) = generate_dataset(&fleet, &spec)?;

    let mut base = NetworkConfig::new(ModelKind::ClassMlp, class.max_counts(&fleet));
    base.max_epochs = 25;
    let result = random_search(&base, &SearchSpace::desk(), 4, &data, &fleet, 9)?;
    for (i, t) in result.trials.iter().enumerate() {
        println!(
            "trial {i}: {}x{} l1 {:.1e} l2 {:.1e} -> validation {:.3}, test {:.3}",
            t.config.hidden_layers,
            t.config.hidden_width,
            t.config.l1,
            t.config.l2,
            t.validation_mae,
            t.test_mae.unwrap_or(f64::NAN)
        );
    }
    let (lo, hi) = result.validation_range();
    println!("best trial {} (validation range {lo:.3}..{hi:.3})", result.best);
    Ok(())
}
