use loadcast::fleet::{ContainerLength, Fleet};
use loadcast::rng::substream;
use loadcast::solver::{brute_force_lpp, solve_lpp, verify_solution, SolverConfig};
use loadcast::summarize::summarize;
use loadcast::{FullInstance, InstanceSketch};
use proptest::prelude::*;
use rand::Rng;

/// A random instance with at most `max_platforms` platforms and
/// `max_containers` containers; weights lean toward the extremes so that
/// stacking limits bind often.
fn tiny_instance(fleet: &Fleet, seed: u64, max_platforms: u32, max_containers: u32) -> FullInstance {
    let mut rng = substream(seed, &[99]);
    let per_type = fleet.platforms_per_type();
    let mut railcars = [0u32; 10];
    let target = rng.gen_range(1..=max_platforms);
    let mut used = 0;
    for _ in 0..20 {
        let j = rng.gen_range(0..10);
        if used + per_type[j] <= target {
            railcars[j] += 1;
            used += per_type[j];
        }
    }
    let n = rng.gen_range(0..=max_containers);
    let n40 = rng.gen_range(0..=n);
    let weights = std::array::from_fn(|i| {
        let spec = fleet.container_spec(ContainerLength::ALL[i]);
        let count = if i == 0 { n40 } else { n - n40 };
        (0..count)
            .map(|_| match rng.gen_range(0..4) {
                0 => spec.tare,
                1 => spec.max_gross(),
                _ => spec.tare + rng.gen_range(0.0..=spec.net_capacity),
            })
            .collect()
    });
    FullInstance {
        sketch: InstanceSketch::new(railcars, [n40, n - n40]),
        weights,
    }
}

#[test]
fn exact_matches_brute_force_on_tiny_instances() {
    let fleet = Fleet::default_fleet();
    for seed in 0..400 {
        let inst = tiny_instance(&fleet, seed, 4, 8);
        let exact = solve_lpp(&inst, &fleet, &SolverConfig::exact()).unwrap();
        let brute = brute_force_lpp(&inst, &fleet).unwrap();
        assert!(verify_solution(&inst, &fleet, &exact), "seed {seed}");
        assert!(verify_solution(&inst, &fleet, &brute), "seed {seed}");
        assert_eq!(exact.objective, brute.objective, "seed {seed}: {inst:?}");
        assert!(!exact.node_limit_hit);
    }
}

#[test]
fn exact_matches_brute_force_at_oracle_cap() {
    let fleet = Fleet::default_fleet();
    for seed in 1000..1100 {
        let inst = tiny_instance(&fleet, seed, 6, 10);
        let exact = solve_lpp(&inst, &fleet, &SolverConfig::exact()).unwrap();
        let brute = brute_force_lpp(&inst, &fleet).unwrap();
        assert_eq!(exact.objective, brute.objective, "seed {seed}: {inst:?}");
    }
}

#[test]
fn repeated_solves_are_identical() {
    let fleet = Fleet::default_fleet();
    let class = "A'".parse().unwrap();
    for inst in loadcast::sampling::generate_1s(30, class, &fleet, 77).unwrap() {
        let a = solve_lpp(&inst, &fleet, &SolverConfig::exact()).unwrap();
        let b = solve_lpp(&inst, &fleet, &SolverConfig::exact()).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}

#[test]
fn gap_mode_stays_within_gap() {
    let fleet = Fleet::default_fleet();
    let class = "A'".parse().unwrap();
    for inst in loadcast::sampling::generate_1s(30, class, &fleet, 78).unwrap() {
        let exact = solve_lpp(&inst, &fleet, &SolverConfig::exact()).unwrap();
        let gap = solve_lpp(&inst, &fleet, &SolverConfig::gap(0.05)).unwrap();
        let s = loadcast::solver::Scalarizer::for_instance(&inst.sketch, &fleet);
        assert!(verify_solution(&inst, &fleet, &gap));
        assert!(s.value(&gap.objective) as f64 >= 0.95 * s.value(&exact.objective) as f64);
        let zero = solve_lpp(&inst, &fleet, &SolverConfig::gap(0.0)).unwrap();
        assert_eq!(zero, exact);
    }
}

#[test]
fn node_limit_returns_feasible_flagged_solution() {
    let fleet = Fleet::default_fleet();
    let class = "D'".parse().unwrap();
    let inst = &loadcast::sampling::generate_1s(1, class, &fleet, 5).unwrap()[0];
    let sol = solve_lpp(inst, &fleet, &SolverConfig::exact().with_node_limit(1)).unwrap();
    assert!(sol.node_limit_hit);
    assert!(verify_solution(inst, &fleet, &sol));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn loaded_never_exceeds_used_slots(seed in any::<u64>()) {
        let fleet = Fleet::default_fleet();
        let inst = tiny_instance(&fleet, seed, 10, 30);
        let sol = solve_lpp(&inst, &fleet, &SolverConfig::exact()).unwrap();
        let s = summarize(&sol);
        let slots: u32 = s.railcars_used.iter().enumerate().map(|(j, u)| u * fleet.railcar_type(j).slots()).sum();
        prop_assert!(sol.objective.loaded_containers <= slots);
        prop_assert!(s.fits_within(&inst.sketch));
    }

    #[test]
    fn more_railcars_never_load_fewer(seed in any::<u64>(), j in 0usize..10) {
        let fleet = Fleet::default_fleet();
        let inst = tiny_instance(&fleet, seed, 8, 20);
        let base = solve_lpp(&inst, &fleet, &SolverConfig::exact()).unwrap();
        let mut more = inst.clone();
        more.sketch.railcar_counts[j] += 1;
        let bigger = solve_lpp(&more, &fleet, &SolverConfig::exact()).unwrap();
        prop_assert!(bigger.objective.loaded_containers >= base.objective.loaded_containers);
    }

    #[test]
    fn fewer_containers_never_load_more(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let fleet = Fleet::default_fleet();
        let inst = tiny_instance(&fleet, seed, 8, 20);
        prop_assume!(inst.num_containers() > 0);
        let base = solve_lpp(&inst, &fleet, &SolverConfig::exact()).unwrap();
        let mut less = inst.clone();
        let k = pick.index(inst.num_containers());
        let n40 = inst.weights[0].len();
        if k < n40 { less.weights[0].remove(k); } else { less.weights[1].remove(k - n40); }
        less.sketch.container_counts = [less.weights[0].len() as u32, less.weights[1].len() as u32];
        let smaller = solve_lpp(&less, &fleet, &SolverConfig::exact()).unwrap();
        prop_assert!(smaller.objective.loaded_containers <= base.objective.loaded_containers);
    }
}
