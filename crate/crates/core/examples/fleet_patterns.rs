//! Railcar types of the built-in fleet and the loading patterns each
//! platform admits.

use loadcast::fleet::{enumerate_patterns, pattern_weight_feasible, Fleet};

fn main() -> anyhow::Result<()> {
    let fleet = Fleet::default_fleet();
    println!("fleet {}", fleet.hash());
    for t in fleet.railcar_types() {
        println!(
            "type {:>2}: {} platforms, {} ft, {} slots",
            t.id,
            t.platform_count(),
            t.total_length(),
            t.slots()
        );
        for (i, p) in t.platforms.iter().enumerate() {
            let pats: Vec<String> = enumerate_patterns(p).iter().map(|q| q.to_string()).collect();
            println!("    platform {i} ({} ft): {}", p.length_ft(), pats.join(" "));
        }
    }

    // A heavy container over a light one may break the center-of-mass limit.
    let platform = &fleet.railcar_type(0).platforms[0];
    let stack = enumerate_patterns(platform)
        .into_iter()
        .find(|q| q.top.is_some())
        .expect("stackable");
    for (b, t) in [(30_000.0, 5_000.0), (5_000.0, 30_000.0)] {
        println!(
            "{stack} bottom {b} kg, top {t} kg: feasible = {}",
            pattern_weight_feasible(&stack, b, t, platform)?
        );
    }
    Ok(())
}
