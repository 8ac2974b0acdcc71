//! Error metrics, latency percentiles, error grids and the model-comparison
//! suite.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fleet::{Fleet, NUM_FEATURES, NUM_RAILCAR_TYPES};
use crate::heuristics::{heur_s, heur_v};
use crate::neural::Network;
use crate::sampling::{FullInstance, InstanceSketch};
use crate::solver::{solve_lpp, SolverConfig};
use crate::summarize::{Aggregation, Summary};

/// Weight of each summary coordinate: slots per railcar type, then 1 per
/// container length.
pub fn slot_weights(fleet: &Fleet) -> [u64; NUM_FEATURES] {
    std::array::from_fn(|j| {
        if j < NUM_RAILCAR_TYPES {
            fleet.railcar_type(j).slots() as u64
        } else {
            1
        }
    })
}

/// Slot-weighted absolute error of one prediction, split into the railcar
/// part and the container part.
pub fn example_error(pred: &Summary, target: &Summary, weights: &[u64; NUM_FEATURES]) -> (u64, u64) {
    let (p, t) = (pred.to_vector(), target.to_vector());
    let mut slots = 0;
    let mut conts = 0;
    for j in 0..NUM_FEATURES {
        let e = p[j].abs_diff(t[j]) as u64 * weights[j];
        if j < NUM_RAILCAR_TYPES {
            slots += e;
        } else {
            conts += e;
        }
    }
    (slots, conts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub n: usize,
    pub mae: f64,
    pub mae_slots: f64,
    pub mae_conts: f64,
    /// Standard errors of the three means.
    pub se: f64,
    pub se_slots: f64,
    pub se_conts: f64,
}

fn mean_and_se(sum: u64, sum_sq: u128, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = sum as f64 / nf;
    if n < 2 {
        return (mean, 0.0);
    }
    // integer sums keep the variance exact up to the final division
    let num = sum_sq as f64 * nf - (sum as f64) * (sum as f64);
    let var = (num / (nf * (nf - 1.0))).max(0.0);
    (mean, (var / nf).sqrt())
}

pub fn mae_metrics(predictions: &[Summary], targets: &[Summary], fleet: &Fleet) -> Result<MetricReport> {
    if predictions.len() != targets.len() {
        return Err(Error::InvalidInput(format!(
            "{} predictions for {} targets",
            predictions.len(),
            targets.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::InvalidInput("no predictions to score".into()));
    }
    let w = slot_weights(fleet);
    let mut sums = [0u64; 3];
    let mut squares = [0u128; 3];
    for (p, t) in predictions.iter().zip(targets) {
        let (s, c) = example_error(p, t, &w);
        for (k, e) in [s + c, s, c].into_iter().enumerate() {
            sums[k] += e;
            squares[k] += (e as u128) * (e as u128);
        }
    }
    let n = predictions.len();
    let (mae, se) = mean_and_se(sums[0], squares[0], n);
    let (mae_slots, se_slots) = mean_and_se(sums[1], squares[1], n);
    let (mae_conts, se_conts) = mean_and_se(sums[2], squares[2], n);
    Ok(MetricReport {
        n,
        mae,
        mae_slots,
        mae_conts,
        se,
        se_slots,
        se_conts,
    })
}

// ---------------------------------------------------------------------------
// Predictors

/// Anything that maps a sketch to a summary.
#[derive(Debug, Clone)]
pub enum Predictor {
    Network(Network),
    HeurV,
    HeurS,
}

impl Predictor {
    pub fn name(&self) -> String {
        match self {
            Predictor::Network(n) => n.kind().to_string(),
            Predictor::HeurV => "HeurV".into(),
            Predictor::HeurS => "HeurS".into(),
        }
    }

    pub fn predict(&self, sketch: &InstanceSketch, fleet: &Fleet) -> Result<Summary> {
        match self {
            Predictor::Network(n) => n.predict(sketch),
            Predictor::HeurV => Ok(heur_v(sketch, fleet)),
            Predictor::HeurS => Ok(heur_s(sketch, fleet)),
        }
    }

    /// Predictions for many sketches, in order. Fails if any single
    /// prediction fails or exceeds its sketch.
    pub fn predict_all(&self, sketches: &[InstanceSketch], fleet: &Fleet) -> Result<Vec<Summary>> {
        let preds: Vec<Summary> = match self {
            Predictor::Network(n) => {
                let xs: Vec<[u32; NUM_FEATURES]> = sketches.iter().map(|s| s.to_vector()).collect();
                n.predict_batch(&xs)?.into_iter().map(Summary::from_vector).collect()
            }
            _ => sketches
                .par_iter()
                .map(|s| self.predict(s, fleet))
                .collect::<Result<_>>()?,
        };
        if let Some(i) = preds.iter().zip(sketches).position(|(p, s)| !p.fits_within(s)) {
            return Err(Error::InvalidInput(format!(
                "{} predicted {} for sketch {}",
                self.name(),
                preds[i],
                sketches[i]
            )));
        }
        Ok(preds)
    }
}

// ---------------------------------------------------------------------------
// Timing

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub n: usize,
    /// Percentiles in milliseconds.
    pub p5: f64,
    pub p50: f64,
    pub p95: f64,
    pub mean: f64,
}

/// Percentile `q` in [0, 1] of sorted data, linear between order
/// statistics.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl TimingReport {
    pub fn from_millis(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput("no timing samples".into()));
        }
        samples.sort_by(f64::total_cmp);
        Ok(TimingReport {
            n: samples.len(),
            p5: percentile(&samples, 0.05),
            p50: percentile(&samples, 0.5),
            p95: percentile(&samples, 0.95),
            mean: samples.iter().sum::<f64>() / samples.len() as f64,
        })
    }
}

/// Wall-clock time of single-sketch predictions on the calling thread.
/// One untimed pass over the sketches warms caches first.
pub fn benchmark_prediction(
    predictor: &Predictor,
    sketches: &[InstanceSketch],
    repetitions: usize,
    fleet: &Fleet,
) -> Result<TimingReport> {
    for s in sketches {
        std::hint::black_box(predictor.predict(s, fleet)?);
    }
    let mut samples = Vec::with_capacity(sketches.len() * repetitions);
    for _ in 0..repetitions {
        for s in sketches {
            let t = Instant::now();
            let out = predictor.predict(std::hint::black_box(s), fleet)?;
            samples.push(t.elapsed().as_secs_f64() * 1e3);
            std::hint::black_box(out);
        }
    }
    TimingReport::from_millis(samples)
}

/// Wall-clock time of each solve on the calling thread.
pub fn solve_time_percentiles(
    instances: &[FullInstance],
    fleet: &Fleet,
    config: &SolverConfig,
) -> Result<TimingReport> {
    if let Some(first) = instances.first() {
        std::hint::black_box(solve_lpp(first, fleet, config)?);
    }
    let mut samples = Vec::with_capacity(instances.len());
    for inst in instances {
        let t = Instant::now();
        let sol = solve_lpp(std::hint::black_box(inst), fleet, config)?;
        samples.push(t.elapsed().as_secs_f64() * 1e3);
        std::hint::black_box(sol);
    }
    TimingReport::from_millis(samples)
}

// ---------------------------------------------------------------------------
// Error grid

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCell {
    pub error_sum: u64,
    pub count: u64,
}

impl GridCell {
    pub fn mae(&self) -> f64 {
        self.error_sum as f64 / self.count as f64
    }
}

/// MAE binned by available slots (x) and available containers (y). Keys
/// are bin indices; bin `i` covers `[i * width, (i + 1) * width)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorGrid {
    pub bin_width: (u32, u32),
    pub cells: BTreeMap<(u32, u32), GridCell>,
}

impl ErrorGrid {
    pub fn overall_mae(&self) -> f64 {
        let (e, n) = self
            .cells
            .values()
            .fold((0, 0), |(e, n), c| (e + c.error_sum, n + c.count));
        e as f64 / n as f64
    }

    /// Bin with the highest MAE among bins holding at least `min_count`
    /// examples.
    pub fn max_bin(&self, min_count: u64) -> Option<((u32, u32), GridCell)> {
        self.cells
            .iter()
            .filter(|(_, c)| c.count >= min_count)
            .max_by(|a, b| a.1.mae().total_cmp(&b.1.mae()))
            .map(|(k, c)| (*k, *c))
    }

    /// Rows `bin_x,bin_y,mae,count`, bins given by their lower edges.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_x,bin_y,mae,count\n");
        for ((x, y), c) in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                x * self.bin_width.0,
                y * self.bin_width.1,
                c.mae(),
                c.count
            );
        }
        out
    }
}

pub fn error_grid(
    predictions: &[Summary],
    targets: &[Summary],
    sketches: &[InstanceSketch],
    fleet: &Fleet,
    bin_width: (u32, u32),
) -> Result<ErrorGrid> {
    if predictions.len() != targets.len() || targets.len() != sketches.len() {
        return Err(Error::InvalidInput(
            "predictions, targets and sketches differ in length".into(),
        ));
    }
    if bin_width.0 == 0 || bin_width.1 == 0 {
        return Err(Error::InvalidInput("bin widths must be positive".into()));
    }
    let w = slot_weights(fleet);
    let mut cells: BTreeMap<(u32, u32), GridCell> = BTreeMap::new();
    for ((p, t), s) in predictions.iter().zip(targets).zip(sketches) {
        let (a, b) = example_error(p, t, &w);
        let key = (s.total_slots(fleet) / bin_width.0, s.total_containers() / bin_width.1);
        let cell = cells.entry(key).or_default();
        cell.error_sum += a + b;
        cell.count += 1;
    }
    Ok(ErrorGrid { bin_width, cells })
}

// ---------------------------------------------------------------------------
// Model comparison

/// A predictor under evaluation. Trained models carry the aggregation of
/// their training data and, optionally, the other networks of their
/// hyperparameter search so the suite can report the spread.
#[derive(Debug, Clone)]
pub struct SuiteModel {
    pub predictor: Predictor,
    /// `None` for predictors that apply to every test set.
    pub aggregation: Option<Aggregation>,
    pub trials: Vec<Network>,
}

#[derive(Debug, Clone)]
pub struct EvalSet {
    pub name: String,
    pub aggregation: Aggregation,
    pub sketches: Vec<InstanceSketch>,
    pub targets: Vec<Summary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteCell {
    pub model: String,
    pub dataset: String,
    pub aggregation: Aggregation,
    /// `None` when the model cannot represent some sketch of the set.
    pub report: Option<MetricReport>,
    /// MAE range over the search trials that could score the set.
    pub trial_range: Option<(f64, f64)>,
}

fn score(p: &Predictor, set: &EvalSet, fleet: &Fleet) -> Result<Option<MetricReport>> {
    match p.predict_all(&set.sketches, fleet) {
        Ok(preds) => Ok(Some(mae_metrics(&preds, &set.targets, fleet)?)),
        Err(Error::UnsupportedInput { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn evaluate_suite(models: &[SuiteModel], sets: &[EvalSet], fleet: &Fleet) -> Result<Vec<SuiteCell>> {
    let mut cells = Vec::new();
    for set in sets {
        for m in models {
            if m.aggregation.is_some_and(|a| a != set.aggregation) {
                continue;
            }
            let report = score(&m.predictor, set, fleet)?;
            let mut lo_hi: Option<(f64, f64)> = None;
            for t in &m.trials {
                if let Some(r) = score(&Predictor::Network(t.clone()), set, fleet)? {
                    lo_hi = Some(lo_hi.map_or((r.mae, r.mae), |(lo, hi)| (lo.min(r.mae), hi.max(r.mae))));
                }
            }
            cells.push(SuiteCell {
                model: m.predictor.name(),
                dataset: set.name.clone(),
                aggregation: set.aggregation,
                report,
                trial_range: lo_hi,
            });
        }
    }
    Ok(cells)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("NA".into(), |x| format!("{x:.4}"))
}

pub fn suite_csv(cells: &[SuiteCell]) -> String {
    let mut out = String::from(
        "model,dataset,aggregation,n,mae,mae_sd,mae_slots,mae_slots_sd,mae_conts,mae_conts_sd,range_min,range_max\n",
    );
    for c in cells {
        let r = c.report;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            c.model,
            c.dataset,
            c.aggregation,
            r.map_or("NA".into(), |r| r.n.to_string()),
            fmt_opt(r.map(|r| r.mae)),
            fmt_opt(r.map(|r| r.se)),
            fmt_opt(r.map(|r| r.mae_slots)),
            fmt_opt(r.map(|r| r.se_slots)),
            fmt_opt(r.map(|r| r.mae_conts)),
            fmt_opt(r.map(|r| r.se_conts)),
            fmt_opt(c.trial_range.map(|t| t.0)),
            fmt_opt(c.trial_range.map(|t| t.1)),
        );
    }
    out
}

/// Aligned text table, one row per cell; standard errors in parentheses.
pub fn suite_text(cells: &[SuiteCell]) -> String {
    let header = ["model", "dataset", "agg", "MAE", "MAE_slots", "MAE_conts", "range"];
    let mut rows: Vec<[String; 7]> = vec![header.map(String::from)];
    for c in cells {
        let with_se = |m: Option<(f64, f64)>| m.map_or("NA".to_string(), |(v, se)| format!("{v:.3} ({se:.3})"));
        rows.push([
            c.model.clone(),
            c.dataset.clone(),
            c.aggregation.to_string(),
            with_se(c.report.map(|r| (r.mae, r.se))),
            with_se(c.report.map(|r| (r.mae_slots, r.se_slots))),
            with_se(c.report.map(|r| (r.mae_conts, r.se_conts))),
            c.trial_range
                .map_or(String::new(), |(lo, hi)| format!("[{lo:.3}, {hi:.3}]")),
        ]);
    }
    let widths: Vec<usize> = (0..7)
        .map(|k| rows.iter().map(|r| r[k].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in &rows {
        let line: Vec<String> = r.iter().zip(&widths).map(|(v, w)| format!("{v:<w$}")).collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}
