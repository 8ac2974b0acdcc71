//! The two greedy baselines on a hand-made sketch and on sampled ones.

use loadcast::eval::mae_metrics;
use loadcast::fleet::Fleet;
use loadcast::heuristics::{heur_s, heur_s_plan, heur_v};
use loadcast::sampling::{generate_1s, DataClass};
use loadcast::solver::{solve_lpp, SolverConfig};
use loadcast::summarize::{summarize, Summary};
use loadcast::InstanceSketch;

fn main() -> anyhow::Result<()> {
    let fleet = Fleet::default_fleet();
    let sketch = InstanceSketch::new([1, 0, 0, 1, 0, 1, 0, 0, 0, 1], [6, 4]);
    println!("HeurV {:?}", heur_v(&sketch, &fleet).to_vector());
    println!("HeurS {:?}", heur_s(&sketch, &fleet).to_vector());
    for load in heur_s_plan(&sketch, &fleet) {
        let pats: Vec<String> = load.patterns.iter().map(|p| p.to_string()).collect();
        println!(
            "    type {} #{}: {}",
            load.type_index + 1,
            load.railcar_index,
            pats.join(" ")
        );
    }

    let class: DataClass = "A'".parse()?;
    let instances = generate_1s(500, class, &fleet, 3)?;
    let targets: Vec<Summary> = instances
        .iter()
        .map(|i| solve_lpp(i, &fleet, &SolverConfig::exact()).map(|s| summarize(&s)))
        .collect::<Result<_, _>>()?;
    let v: Vec<Summary> = instances.iter().map(|i| heur_v(&i.sketch, &fleet)).collect();
    let s: Vec<Summary> = instances.iter().map(|i| heur_s(&i.sketch, &fleet)).collect();
    println!(
        "MAE on 500 {class} instances: HeurV {:.3}, HeurS {:.3}",
        mae_metrics(&v, &targets, &fleet)?.mae,
        mae_metrics(&s, &targets, &fleet)?.mae
    );
    Ok(())
}
