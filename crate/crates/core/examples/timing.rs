//! Prediction latency percentiles next to the exact solver's.

use loadcast::eval::{benchmark_prediction, solve_time_percentiles, Predictor};
use loadcast::fleet::Fleet;
use loadcast::neural::{ModelKind, Network, NetworkConfig};
use loadcast::sampling::{generate_1s, DataClass};
use loadcast::solver::SolverConfig;

fn main() -> anyhow::Result<()> {
    let fleet = Fleet::default_fleet();
    let class: DataClass = "A'".parse()?;
    let instances = generate_1s(2000, class, &fleet, 6)?;
    let sketches: Vec<_> = instances.iter().map(|i| i.sketch).collect();

    let solve = solve_time_percentiles(&instances, &fleet, &SolverConfig::exact())?;
    println!(
        "{:<12} P5 {:.4} ms  P50 {:.4} ms  P95 {:.4} ms",
        "solve_lpp", solve.p5, solve.p50, solve.p95
    );
    // Latency does not depend on the weights, so untrained networks will do.
    let mut predictors = vec![Predictor::HeurV, Predictor::HeurS];
    for kind in ModelKind::ALL {
        predictors.push(Predictor::Network(Network::new(NetworkConfig::new(
            kind,
            class.max_counts(&fleet),
        ))?));
    }
    for p in &predictors {
        let t = benchmark_prediction(p, &sketches, 3, &fleet)?;
        println!(
            "{:<12} P5 {:.4} ms  P50 {:.4} ms  P95 {:.4} ms  ({:.0}x faster than solving)",
            p.name(),
            t.p5,
            t.p50,
            t.p95,
            solve.p50 / t.p50
        );
    }
    Ok(())
}
