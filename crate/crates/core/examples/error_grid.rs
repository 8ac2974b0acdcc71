//! Where the errors are: MAE binned by available slots and containers.

use loadcast::eval::{error_grid, Predictor};
use loadcast::fleet::Fleet;
use loadcast::pipeline::{generate_dataset, GenerateSpec};
use loadcast::sampling::Protocol;
use loadcast::solver::SolverConfig;
use loadcast::summarize::{Aggregation, Summary};

fn main() -> anyhow::Result<()> {
    let fleet = Fleet::default_fleet();
    let spec = GenerateSpec {
        class: "A'".parse()?,
        protocol: Protocol::OneStage,
        n: 3000,
        k: 1,
        aggregation: Aggregation::OThrML,
        seed: 12,
        solver: SolverConfig::exact(),
    };
    let (data, _) = generate_dataset(&fleet, &spec)?;
    let sketches: Vec<_> = data.examples.iter().map(|e| e.input).collect();
    let targets: Vec<Summary> = data.examples.iter().map(|e| e.target).collect();
    let preds = Predictor::HeurV.predict_all(&sketches, &fleet)?;
    let grid = error_grid(&preds, &targets, &sketches, &fleet, (10, 10))?;
    println!("HeurV overall MAE {:.3}", grid.overall_mae());
    if let Some(((x, y), cell)) = grid.max_bin(20) {
        println!(
            "worst bin: slots {}.., containers {}..: MAE {:.3} over {}",
            x * 10,
            y * 10,
            cell.mae(),
            cell.count
        );
    }
    print!("{}", grid.to_csv());
    Ok(())
}
