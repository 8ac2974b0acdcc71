//! Exact solve of one instance, checked against the exhaustive oracle on a
//! small one.

use loadcast::fleet::{ContainerLength, Fleet};
use loadcast::sampling::{generate_1s, DataClass};
use loadcast::solver::{brute_force_lpp, solve_lpp, verify_solution, SolverConfig};
use loadcast::summarize::summarize;
use loadcast::{FullInstance, InstanceSketch};

fn main() -> anyhow::Result<()> {
    let fleet = Fleet::default_fleet();
    let class: DataClass = "A'".parse()?;
    let inst = generate_1s(1, class, &fleet, 5)?.remove(0);
    let sol = solve_lpp(&inst, &fleet, &SolverConfig::exact())?;
    println!("sketch  {:?}", inst.sketch.to_vector());
    println!("summary {:?}", summarize(&sol).to_vector());
    println!(
        "objective {:?}, verified {}",
        sol.objective.triple(),
        verify_solution(&inst, &fleet, &sol)
    );
    for car in &sol.railcars {
        let pats: Vec<String> = car.patterns.iter().map(|p| p.to_string()).collect();
        println!("    type {} #{}: {}", car.type_id, car.railcar_index, pats.join(" "));
    }

    // One 2-platform railcar and five containers: small enough for brute force.
    let spec40 = fleet.container_spec(ContainerLength::L40);
    let spec53 = fleet.container_spec(ContainerLength::L53);
    let small = FullInstance {
        sketch: InstanceSketch::new([0, 0, 0, 0, 0, 0, 0, 0, 0, 1], [3, 2]),
        weights: [
            vec![spec40.tare + 5_000.0, spec40.max_gross(), 12_000.0],
            vec![spec53.max_gross(), spec53.tare],
        ],
    };
    let exact = solve_lpp(&small, &fleet, &SolverConfig::exact())?;
    let brute = brute_force_lpp(&small, &fleet)?;
    println!(
        "small instance: exact {:?}, brute force {:?}",
        exact.objective.triple(),
        brute.objective.triple()
    );
    Ok(())
}
