//! One-stage instances and two-stage cohorts drawn from a data class.

use loadcast::fleet::Fleet;
use loadcast::sampling::{generate_1s, generate_2s, DataClass};

fn main() -> anyhow::Result<()> {
    let fleet = Fleet::default_fleet();
    let class: DataClass = "A'".parse()?;
    println!(
        "class {class}: containers {:?}, platforms {:?}",
        class.container_range, class.platform_range
    );

    for inst in generate_1s(5, class, &fleet, 42)? {
        let s = inst.sketch;
        println!(
            "sketch {:?}: {} platforms, {} slots, {} containers",
            s.to_vector(),
            s.total_platforms(&fleet),
            s.total_slots(&fleet),
            s.total_containers()
        );
    }

    // Members of a cohort share the sketch and differ only in weights.
    for cohort in generate_2s(2, 3, class, &fleet, 42)? {
        println!("cohort {} sketch {:?}", cohort.index, cohort.sketch.to_vector());
        for m in &cohort.members {
            let total: f64 = m.weights.iter().flatten().sum();
            println!("    total gross weight {total:.0} kg");
        }
    }
    Ok(())
}
