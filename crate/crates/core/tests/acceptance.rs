//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! `cargo test --test acceptance` runs everything; trailing arguments pick
//! criteria by number (`-- 1 3 8`). Failures are reported, and the process
//! exits nonzero on a failure only when `LOADCAST_ACCEPTANCE_STRICT=1`.

use std::collections::BTreeMap;
use std::fs;
use std::process::Command;
use std::time::Instant;

use anyhow::{anyhow, ensure, Result};
use loadcast::eval::{
    benchmark_prediction, error_grid, mae_metrics, slot_weights, solve_time_percentiles, MetricReport, Predictor,
};
use loadcast::fleet::{ContainerLength, Fleet};
use loadcast::neural::{
    gradient_gap, kink_distance, random_search, train, ModelKind, Network, NetworkConfig, SearchSpace,
};
use loadcast::pipeline::{generate_dataset, GenerateSpec};
use loadcast::rng::substream;
use loadcast::sampling::{generate_1s, generate_2s, DataClass, Protocol};
use loadcast::solver::{brute_force_lpp, solve_lpp, Scalarizer, SolverConfig};
use loadcast::summarize::{build_dataset_obefml, Aggregation, Dataset, SolvedCohort, Split, Summary};
use loadcast::{Error, FullInstance, InstanceSketch};
use rand::Rng;

// Pinned tolerances and sizes.
const C1_INSTANCES: u64 = 1_000;
const C1_MAX_PLATFORMS: u32 = 4;
const C1_MAX_CONTAINERS: u32 = 8;
const C1_BUDGET_SECS: f64 = 300.0;
const C2_WORKERS: [&str; 2] = ["1", "8"];
const C3_IDENTITY_TOL: f64 = 1e-12;
const C3_REPORTS: usize = 100;
const C4_POINTS: usize = 20;
const C4_STEP: f64 = 1e-5;
const C4_MAX_REL_ERR: f64 = 1e-4;
const C4_KINK_MARGIN: f64 = 1e-3;
const C5_PREDICTIONS: usize = 10_000;
const C6_EXAMPLES: usize = 20_000;
const C6_K: usize = 25;
const C6_TRIALS: usize = 5;
const C6_PATIENCE: usize = 20;
const C6_MAX_EPOCHS: usize = 400;
const C6_BUDGET_SECS: f64 = 2.0 * 3600.0;
const C7_TEST_COHORTS: usize = 2_000;
const C8_COHORTS_PER_K: usize = 50;
const C8_KS: [usize; 4] = [1, 3, 25, 100];
const C9_LIMIT_MS: f64 = 5.0;
const C9_SPEEDUP: f64 = 10.0;
const C9_SKETCHES: usize = 2_000;
const C9_REPS: usize = 5;
const C10_HEAD: usize = 812;
const C11_BIN: u32 = 2;
const C11_MIN_COUNT: u64 = 20;
const C11_BAND: i64 = 2;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn a_prime() -> DataClass {
    "A'".parse().unwrap()
}

fn spec(class: &str, protocol: Protocol, aggregation: Aggregation, n: usize, seed: u64) -> GenerateSpec {
    GenerateSpec {
        class: class.parse().unwrap(),
        protocol,
        n,
        k: if protocol == Protocol::TwoStage { C6_K } else { 1 },
        aggregation,
        seed,
        solver: SolverConfig::exact(),
    }
}

fn sketches_and_targets(data: &Dataset, split: Option<Split>) -> (Vec<InstanceSketch>, Vec<Summary>) {
    let rows: Vec<_> = match split {
        Some(s) => data.part(s),
        None => data.examples.iter().collect(),
    };
    (
        rows.iter().map(|e| e.input).collect(),
        rows.iter().map(|e| e.target).collect(),
    )
}

// ---------------------------------------------------------------------------
// 1: exact solver against brute force

fn tiny_instance(fleet: &Fleet, seed: u64) -> FullInstance {
    let mut rng = substream(seed, &[0xacce, 1]);
    let per_type = fleet.platforms_per_type();
    let target = rng.gen_range(1..=C1_MAX_PLATFORMS);
    let mut railcars = [0u32; 10];
    let mut used = 0;
    for _ in 0..20 {
        let j = rng.gen_range(0..10);
        if used + per_type[j] <= target {
            railcars[j] += 1;
            used += per_type[j];
        }
    }
    let n = rng.gen_range(0..=C1_MAX_CONTAINERS);
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

fn criterion_1(fleet: &Fleet) -> Result<Outcome> {
    let t = Instant::now();
    let mut mismatches = 0;
    for seed in 0..C1_INSTANCES {
        let inst = tiny_instance(fleet, seed);
        let exact = solve_lpp(&inst, fleet, &SolverConfig::exact())?;
        let brute = brute_force_lpp(&inst, fleet)?;
        if exact.objective != brute.objective {
            mismatches += 1;
        }
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        mismatches == 0 && secs < C1_BUDGET_SECS,
        format!("{C1_INSTANCES} instances, {mismatches} objective mismatches, {secs:.1} s"),
    )
}

// ---------------------------------------------------------------------------
// 2: byte-identical generation

fn criterion_2() -> Result<Outcome> {
    let dir = tempfile::tempdir()?;
    let mut notes = Vec::new();
    let mut pass = true;
    let plans: [&[&str]; 2] = [
        &[
            "generate",
            "--class",
            "A'",
            "--protocol",
            "1s",
            "--agg",
            "othrml",
            "--n",
            "2000",
        ],
        &[
            "generate",
            "--class",
            "B'",
            "--protocol",
            "2s",
            "--agg",
            "obefml",
            "--n",
            "300",
            "--k",
            "10",
        ],
    ];
    for (i, plan) in plans.iter().enumerate() {
        let mut files = Vec::new();
        for (run, workers) in [C2_WORKERS[0], C2_WORKERS[0], C2_WORKERS[1]].iter().enumerate() {
            let out = dir.path().join(format!("p{i}_r{run}.bin"));
            let status = Command::new(env!("CARGO_BIN_EXE_loadcast"))
                .args(*plan)
                .args(["--seed", "77", "--workers", workers, "--out"])
                .arg(&out)
                .env_remove("LOADCAST_CONFIG")
                .env_remove("LOADCAST_FLEET")
                .output()?;
            ensure!(
                status.status.success(),
                "generate failed: {}",
                String::from_utf8_lossy(&status.stderr)
            );
            files.push(fs::read(&out)?);
        }
        let same = files.windows(2).all(|w| w[0] == w[1]);
        pass &= same;
        notes.push(format!(
            "{} ({} bytes): {}",
            plan[2],
            files[0].len(),
            if same { "identical" } else { "DIFFER" }
        ));
    }
    outcome(
        pass,
        format!("two runs with 1 worker and one with 8: {}", notes.join("; ")),
    )
}

// ---------------------------------------------------------------------------
// 3: metrics

fn criterion_3(fleet: &Fleet) -> Result<Outcome> {
    let w = slot_weights(fleet);
    let j = (0..10)
        .find(|&j| w[j] == 6)
        .ok_or_else(|| anyhow!("no railcar type with six slots"))?;
    let mut t = [3u32; 12];
    t[10] = 9;
    t[11] = 4;
    let mut p = t;
    p[j] -= 1;
    p[11] += 1;
    let r = mae_metrics(&[Summary::from_vector(p)], &[Summary::from_vector(t)], fleet)?;
    let hand = r.mae == 7.0 && r.mae_slots == 6.0 && r.mae_conts == 1.0;

    let mut rng = substream(3, &[0xacce, 3]);
    let mut worst: f64 = 0.0;
    for _ in 0..C3_REPORTS {
        let n = rng.gen_range(1..200);
        let mut ps = Vec::new();
        let mut ts = Vec::new();
        for _ in 0..n {
            ps.push(Summary::from_vector(std::array::from_fn(|_| rng.gen_range(0..40))));
            ts.push(Summary::from_vector(std::array::from_fn(|_| rng.gen_range(0..40))));
        }
        let r: MetricReport = mae_metrics(&ps, &ts, fleet)?;
        worst = worst.max((r.mae - (r.mae_slots + r.mae_conts)).abs());
    }
    outcome(
        hand && worst <= C3_IDENTITY_TOL,
        format!(
            "hand example (type {}) gives {}/{}/{}; identity gap {worst:e} over {C3_REPORTS} reports",
            j + 1,
            r.mae,
            r.mae_slots,
            r.mae_conts
        ),
    )
}

// ---------------------------------------------------------------------------
// 4: gradients

fn criterion_4() -> Result<Outcome> {
    const MAX: [u32; 12] = [6, 6, 10, 10, 30, 30, 10, 30, 6, 15, 30, 30];
    let mut rng = substream(4, &[0xacce, 4]);
    let mut notes = Vec::new();
    let mut pass = true;
    for kind in [ModelKind::ClassMlp, ModelKind::RegMlp] {
        let mut worst: f64 = 0.0;
        let mut checked = 0;
        let mut rejected = 0;
        while checked < C4_POINTS {
            let mut cfg = NetworkConfig::new(kind, MAX);
            cfg.hidden_layers = 2;
            cfg.hidden_width = 16;
            cfg.l1 = rng.gen_range(0.0..1e-3);
            cfg.l2 = rng.gen_range(0.0..1e-3);
            cfg.init_seed = rng.gen();
            let mut net = Network::new(cfg)?;
            // Points near a trained network: the initializer's scale plus
            // jitter, with every parameter kept off the L1 kink at zero.
            for p in net.parameters_mut() {
                let base = *p;
                *p = loop {
                    let v = base + rng.gen_range(-0.1..0.1);
                    if v.abs() >= C4_KINK_MARGIN {
                        break v;
                    }
                };
            }
            let xs: Vec<[u32; 12]> = (0..4)
                .map(|_| std::array::from_fn(|j| rng.gen_range(0..=MAX[j])))
                .collect();
            let ys: Vec<[u32; 12]> = xs
                .iter()
                .map(|x| std::array::from_fn(|j| rng.gen_range(0..=x[j])))
                .collect();
            if kink_distance(&net, &xs, &ys) < C4_KINK_MARGIN {
                rejected += 1;
                continue;
            }
            worst = worst.max(gradient_gap(&net, &xs, &ys, C4_STEP)?);
            checked += 1;
        }
        pass &= worst < C4_MAX_REL_ERR;
        notes.push(format!(
            "{kind}: max rel err {worst:.2e} over {checked} points ({rejected} near kinks redrawn)"
        ));
    }
    outcome(pass, notes.join("; "))
}

// ---------------------------------------------------------------------------
// 6: orderings on A'

struct Trained {
    aggregation: Aggregation,
    data: Dataset,
    best: BTreeMap<&'static str, (Network, f64)>,
}

fn criterion_6(fleet: &Fleet, out: &mut Vec<Trained>) -> Result<Outcome> {
    let t = Instant::now();
    let mut pass = true;
    let mut lines = Vec::new();
    for (protocol, aggregation, seed) in [
        (Protocol::TwoStage, Aggregation::OBefML, 601),
        (Protocol::OneStage, Aggregation::OThrML, 602),
    ] {
        let (data, _) = generate_dataset(fleet, &spec("A'", protocol, aggregation, C6_EXAMPLES, seed))?;
        ensure!(data.len() == C6_EXAMPLES);
        let (tx, ty) = sketches_and_targets(&data, Some(Split::Test));
        let mut best = BTreeMap::new();
        let mut maes: BTreeMap<&'static str, f64> = BTreeMap::new();
        for kind in ModelKind::ALL {
            let mut base = NetworkConfig::new(kind, a_prime().max_counts(fleet));
            base.patience = C6_PATIENCE;
            base.max_epochs = C6_MAX_EPOCHS;
            let r = random_search(&base, &SearchSpace::desk(), C6_TRIALS, &data, fleet, seed)?;
            let tr = r.best_trial();
            let test = tr.test_mae.ok_or_else(|| anyhow!("no test split"))?;
            let (lo, hi) = r.test_range().unwrap_or((f64::NAN, f64::NAN));
            lines.push(format!(
                "    {aggregation} {:<8} test MAE {test:.3} (trials {lo:.3}..{hi:.3}; chosen {}x{}, l1 {:.1e}, l2 {:.1e}, {} epochs)",
                kind.name(),
                tr.config.hidden_layers,
                tr.config.hidden_width,
                tr.config.l1,
                tr.config.l2,
                tr.report.epochs_run
            ));
            maes.insert(kind.name(), test);
            best.insert(kind.name(), (tr.network.clone(), test));
        }
        for h in [Predictor::HeurV, Predictor::HeurS] {
            let preds = h.predict_all(&tx, fleet)?;
            let mae = mae_metrics(&preds, &ty, fleet)?.mae;
            lines.push(format!("    {aggregation} {:<8} test MAE {mae:.3}", h.name()));
            maes.insert(
                if matches!(h, Predictor::HeurV) {
                    "HeurV"
                } else {
                    "HeurS"
                },
                mae,
            );
        }
        for mlp in ["ClassMLP", "RegMLP"] {
            for baseline in ["LogReg", "LinReg", "HeurV", "HeurS"] {
                if maes[mlp] >= maes[baseline] {
                    pass = false;
                    lines.push(format!(
                        "    {aggregation}: {mlp} {:.3} is not below {baseline} {:.3}",
                        maes[mlp], maes[baseline]
                    ));
                }
            }
        }
        out.push(Trained {
            aggregation,
            data,
            best,
        });
    }
    let secs = t.elapsed().as_secs_f64();
    pass &= secs < C6_BUDGET_SECS;
    outcome(pass, format!("{:.0} s total\n{}", secs, lines.join("\n")))
}

// ---------------------------------------------------------------------------
// 5: feasibility over 10k predictions per predictor

fn criterion_5(fleet: &Fleet, trained: &[Trained]) -> Result<Outcome> {
    let sketches: Vec<InstanceSketch> = generate_1s(C5_PREDICTIONS, a_prime(), fleet, 55)?
        .into_iter()
        .map(|i| i.sketch)
        .collect();
    let t = trained
        .first()
        .ok_or_else(|| anyhow!("criterion 6 produced no models"))?;
    let mut predictors: Vec<Predictor> = t.best.values().map(|(n, _)| Predictor::Network(n.clone())).collect();
    predictors.extend([Predictor::HeurV, Predictor::HeurS]);
    let mut total = 0;
    let mut notes = Vec::new();
    for p in &predictors {
        let mut violations = 0;
        for s in &sketches {
            if !p.predict(s, fleet)?.fits_within(s) {
                violations += 1;
            }
        }
        total += violations;
        notes.push(format!("{} {violations}", p.name()));
    }
    outcome(
        total == 0,
        format!("{} predictions each; violations: {}", sketches.len(), notes.join(", ")),
    )
}

// ---------------------------------------------------------------------------
// 7: extraneous class

fn criterion_7(fleet: &Fleet, trained: &[Trained]) -> Result<Outcome> {
    let t = trained
        .iter()
        .find(|t| t.aggregation == Aggregation::OBefML)
        .ok_or_else(|| anyhow!("no median-aggregated models"))?;
    let (test_d, _) = generate_dataset(
        fleet,
        &spec("D'", Protocol::TwoStage, Aggregation::OBefML, C7_TEST_COHORTS, 701),
    )?;
    let (sx, sy) = sketches_and_targets(&test_d, None);

    let reg_a = &t.best["RegMLP"].0;
    let preds_a = Predictor::Network(reg_a.clone()).predict_all(&sx, fleet)?;
    let mae_a = mae_metrics(&preds_a, &sy, fleet)?.mae;
    let valid = preds_a.iter().zip(&sx).all(|(p, s)| p.fits_within(s)) && mae_a.is_finite();

    let class_a = &t.best["ClassMLP"].0;
    let mut unsupported = 0;
    let mut exceeding = 0;
    for s in &sx {
        let beyond = s
            .to_vector()
            .iter()
            .zip(a_prime().max_counts(fleet))
            .any(|(v, m)| *v > m);
        if beyond {
            exceeding += 1;
            if matches!(class_a.predict(s), Err(Error::UnsupportedInput { .. })) {
                unsupported += 1;
            }
        }
    }
    let na_ok = exceeding > 0 && unsupported == exceeding;

    let mut parts = vec![t.data.clone()];
    for (class, seed) in [("B'", 702), ("C'", 703)] {
        parts.push(
            generate_dataset(
                fleet,
                &spec(class, Protocol::TwoStage, Aggregation::OBefML, C6_EXAMPLES, seed),
            )?
            .0,
        );
    }
    let union = Dataset::merge(parts);
    let mut cfg = *reg_a.config();
    let classes: Vec<DataClass> = ["A'", "B'", "C'"].iter().map(|c| c.parse().unwrap()).collect();
    let union_max =
        loadcast::neural::combine_max_counts(&classes.iter().map(|c| c.max_counts(fleet)).collect::<Vec<_>>());
    cfg.input_scale = union_max.map(|m| m.max(1) as f64);
    let (reg_u, _) = train(cfg, &union, fleet)?;
    let preds_u = Predictor::Network(reg_u).predict_all(&sx, fleet)?;
    let mae_u = mae_metrics(&preds_u, &sy, fleet)?.mae;

    outcome(
        valid && na_ok && mae_u < mae_a,
        format!(
            "D' ({} cohorts): RegMLP trained on A' MAE {mae_a:.3}, on A'+B'+C' MAE {mae_u:.3}; \
             ClassMLP unsupported on {unsupported}/{exceeding} sketches beyond its head",
            sx.len()
        ),
    )
}

// ---------------------------------------------------------------------------
// 8: lower-median member

fn criterion_8(fleet: &Fleet) -> Result<Outcome> {
    let mut checked = 0;
    let mut wrong = 0;
    for (i, &k) in C8_KS.iter().enumerate() {
        let cohorts = generate_2s(C8_COHORTS_PER_K, k, a_prime(), fleet, 800 + i as u64)?;
        let solved: Vec<SolvedCohort> = cohorts
            .into_iter()
            .map(|c| {
                let members = c
                    .members
                    .into_iter()
                    .map(|m| solve_lpp(&m, fleet, &SolverConfig::exact()).map(|s| (m, s)))
                    .collect::<loadcast::Result<Vec<_>>>()?;
                Ok(SolvedCohort {
                    index: c.index,
                    sketch: c.sketch,
                    members,
                })
            })
            .collect::<Result<_>>()?;
        let data = build_dataset_obefml(&solved, fleet, 0, None);
        for (c, e) in solved.iter().zip(&data.examples) {
            let scal = Scalarizer::for_instance(&c.sketch, fleet);
            let mut values: Vec<i64> = c.members.iter().map(|(_, s)| scal.value(&s.objective)).collect();
            values.sort_unstable();
            let lower_median = values[(values.len() - 1) / 2];
            let chosen = c
                .members
                .iter()
                .find(|(m, _)| m.weights == e.weights)
                .ok_or_else(|| anyhow!("selected member not in cohort"))?;
            if scal.value(&chosen.1.objective) != lower_median {
                wrong += 1;
            }
            checked += 1;
        }
    }
    outcome(
        wrong == 0,
        format!("{checked} cohorts with k in {C8_KS:?}, {wrong} mismatches"),
    )
}

// ---------------------------------------------------------------------------
// 9: latency

fn criterion_9(fleet: &Fleet, trained: &[Trained]) -> Result<Outcome> {
    let instances = generate_1s(C9_SKETCHES, a_prime(), fleet, 909)?;
    let sketches: Vec<InstanceSketch> = instances.iter().map(|i| i.sketch).collect();
    let solve = solve_time_percentiles(&instances, fleet, &SolverConfig::exact())?;
    let mut predictors = Vec::new();
    for t in trained {
        let net = &t.best["RegMLP"].0;
        let c = net.config();
        predictors.push((
            format!("RegMLP {} {}x{}", t.aggregation, c.hidden_layers, c.hidden_width),
            Predictor::Network(net.clone()),
        ));
    }
    predictors.push(("HeurV".into(), Predictor::HeurV));
    predictors.push(("HeurS".into(), Predictor::HeurS));
    let mut pass = !predictors.is_empty();
    let mut notes = vec![format!("solve_lpp median {:.4} ms", solve.p50)];
    for (name, p) in &predictors {
        let t = benchmark_prediction(p, &sketches, C9_REPS, fleet)?;
        let speedup = solve.p50 / t.p50;
        let ok = t.p50 < C9_LIMIT_MS && speedup >= C9_SPEEDUP;
        pass &= ok;
        notes.push(format!(
            "{name} median {:.4} ms ({speedup:.1}x){}",
            t.p50,
            if ok { "" } else { " <-" }
        ));
    }
    outcome(pass, notes.join("; "))
}

// ---------------------------------------------------------------------------
// 10: head size

fn criterion_10() -> Result<Outcome> {
    let mut max = [50u32; 12];
    max[10] = 150;
    max[11] = 150;
    let mut cfg = NetworkConfig::new(ModelKind::ClassMlp, max);
    cfg.hidden_width = 8;
    let net = Network::new(cfg)?;
    let probs = net.forward(&InstanceSketch::from_vector([1; 12]), false)?;
    outcome(
        cfg.output_size() == C10_HEAD && probs.len() == C10_HEAD,
        format!(
            "configured {} outputs, forward pass returns {}",
            cfg.output_size(),
            probs.len()
        ),
    )
}

// ---------------------------------------------------------------------------
// 11: where the largest errors sit

fn criterion_11(fleet: &Fleet, trained: &[Trained]) -> Result<Outcome> {
    let mut pass = !trained.is_empty();
    let mut notes = Vec::new();
    for t in trained {
        let (sx, sy) = sketches_and_targets(&t.data, Some(Split::Test));
        for kind in ["ClassMLP", "RegMLP"] {
            let preds = Predictor::Network(t.best[kind].0.clone()).predict_all(&sx, fleet)?;
            let grid = error_grid(&preds, &sy, &sx, fleet, (C11_BIN, C11_BIN))?;
            let ((bx, by), cell) = grid
                .max_bin(C11_MIN_COUNT)
                .ok_or_else(|| anyhow!("no populated bins"))?;
            let off = (bx as i64 - by as i64).abs() > C11_BAND;
            pass &= off;
            notes.push(format!(
                "{} {kind}: worst bin slots {}..{}, containers {}..{} (MAE {:.3}, n {}){}",
                t.aggregation,
                bx * C11_BIN,
                (bx + 1) * C11_BIN,
                by * C11_BIN,
                (by + 1) * C11_BIN,
                cell.mae(),
                cell.count,
                if off { "" } else { " on the diagonal" }
            ));
        }
    }
    outcome(pass, notes.join("; "))
}

// ---------------------------------------------------------------------------

fn main() {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let want = |n: u32| wanted.is_empty() || wanted.contains(&n);
    let fleet = Fleet::default_fleet();
    let mut results: BTreeMap<u32, Outcome> = BTreeMap::new();
    let mut trained = Vec::new();

    let run = |n: u32, f: &mut dyn FnMut() -> Result<Outcome>, results: &mut BTreeMap<u32, Outcome>| {
        let t = Instant::now();
        let o = f().unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!("error: {e:#}"),
        });
        println!(
            "{} criterion {n}: {} [{:.1} s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
        results.insert(n, o);
    };

    for (n, f) in [
        (
            1u32,
            &mut (|| criterion_1(&fleet)) as &mut dyn FnMut() -> Result<Outcome>,
        ),
        (2, &mut criterion_2),
        (3, &mut || criterion_3(&fleet)),
        (4, &mut criterion_4),
        (8, &mut || criterion_8(&fleet)),
        (10, &mut criterion_10),
    ] {
        if want(n) {
            run(n, f, &mut results);
        }
    }
    if [5, 6, 7, 9, 11].iter().any(|&n| want(n)) {
        run(6, &mut || criterion_6(&fleet, &mut trained), &mut results);
        if !want(6) {
            results.remove(&6);
        }
        for n in [5u32, 7, 9, 11] {
            if want(n) {
                let f: &mut dyn FnMut() -> Result<Outcome> = match n {
                    5 => &mut || criterion_5(&fleet, &trained),
                    7 => &mut || criterion_7(&fleet, &trained),
                    9 => &mut || criterion_9(&fleet, &trained),
                    _ => &mut || criterion_11(&fleet, &trained),
                };
                run(n, f, &mut results);
            }
        }
    }

    println!();
    let failed: Vec<u32> = results.iter().filter(|(_, o)| !o.pass).map(|(n, _)| *n).collect();
    for (n, o) in &results {
        println!("{:>2} {}", n, if o.pass { "PASS" } else { "FAIL" });
    }
    println!(
        "acceptance: {}/{} criteria passed",
        results.len() - failed.len(),
        results.len()
    );
    if !failed.is_empty() && std::env::var("LOADCAST_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
