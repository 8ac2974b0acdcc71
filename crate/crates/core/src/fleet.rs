//! Containers, railcars, platforms and their loading rules.
//!
//! A [`Fleet`] holds ten railcar types and one [`ContainerSpec`] per
//! container length. Fleets are loaded from a JSON document (see
//! [`FleetConfig`]) and validated before use; after construction they are
//! immutable.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Number of railcar types in a fleet.
pub const NUM_RAILCAR_TYPES: usize = 10;
/// Number of container length classes.
pub const NUM_LENGTHS: usize = 2;
/// Width of the input and output count vectors (railcar types + lengths).
pub const NUM_FEATURES: usize = NUM_RAILCAR_TYPES + NUM_LENGTHS;

const DEFAULT_FLEET_JSON: &str = include_str!("../data/default_fleet.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ContainerLength {
    L40,
    L53,
}

impl ContainerLength {
    pub const ALL: [ContainerLength; NUM_LENGTHS] = [ContainerLength::L40, ContainerLength::L53];

    pub fn feet(self) -> u32 {
        match self {
            ContainerLength::L40 => 40,
            ContainerLength::L53 => 53,
        }
    }

    /// Position of this length in per-length arrays.
    pub fn index(self) -> usize {
        match self {
            ContainerLength::L40 => 0,
            ContainerLength::L53 => 1,
        }
    }

    pub fn from_feet(feet: u32) -> Option<Self> {
        match feet {
            40 => Some(ContainerLength::L40),
            53 => Some(ContainerLength::L53),
            _ => None,
        }
    }
}

impl fmt::Display for ContainerLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}ft", self.feet())
    }
}

/// Representative tare and net capacity of a container of one length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContainerSpec {
    pub length: ContainerLength,
    pub tare: f64,
    pub net_capacity: f64,
    pub empty_probability: f64,
}

impl ContainerSpec {
    /// Heaviest gross weight a container of this spec can carry.
    pub fn max_gross(&self) -> f64 {
        self.tare + self.net_capacity
    }
}

/// A single container. The gross weight is unknown for sketches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Container {
    pub id: usize,
    pub length: ContainerLength,
    pub gross_weight: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotHeights {
    pub bottom_center: f64,
    pub top_center: f64,
}

/// One platform of a railcar: a bottom slot and a top slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlatformType {
    pub length: ContainerLength,
    pub weight_capacity: f64,
    pub tare: f64,
    pub top_53_capable: bool,
    pub com_threshold: f64,
    pub slot_heights: SlotHeights,
    /// Height of the platform tare's centroid.
    pub tare_height: f64,
}

impl PlatformType {
    pub fn length_ft(&self) -> u32 {
        self.length.feet()
    }

    /// Whether the bottom slot accepts a container of `len`.
    pub fn accepts_bottom(&self, len: ContainerLength) -> bool {
        len.feet() <= self.length.feet()
    }

    /// Whether the top slot accepts `top` when `bottom` is loaded below it.
    pub fn accepts_top(&self, bottom: ContainerLength, top: ContainerLength) -> bool {
        if !self.accepts_bottom(bottom) {
            return false;
        }
        match top {
            ContainerLength::L40 => true,
            ContainerLength::L53 => {
                self.top_53_capable && (self.length == ContainerLength::L53 || bottom == ContainerLength::L40)
            }
        }
    }

    /// Height of the combined center of mass for the given slot loads.
    pub fn com_height(&self, bottom_weight: f64, top_weight: f64) -> f64 {
        let moment = self.tare * self.tare_height
            + bottom_weight * self.slot_heights.bottom_center
            + top_weight * self.slot_heights.top_center;
        moment / (self.tare + bottom_weight + top_weight)
    }

    fn loads_fit(&self, bottom_weight: f64, top_weight: f64) -> bool {
        bottom_weight + top_weight <= self.weight_capacity
            && self.com_height(bottom_weight, top_weight) <= self.com_threshold
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RailcarType {
    pub id: u8,
    pub platforms: Vec<PlatformType>,
}

impl RailcarType {
    pub fn platform_count(&self) -> usize {
        self.platforms.len()
    }

    /// Two slots per platform.
    pub fn slots(&self) -> u32 {
        2 * self.platforms.len() as u32
    }

    pub fn total_length(&self) -> u32 {
        self.platforms.iter().map(|p| p.length_ft()).sum()
    }
}

/// Which containers occupy the two slots of a platform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LoadingPattern {
    pub bottom: Option<ContainerLength>,
    pub top: Option<ContainerLength>,
}

impl LoadingPattern {
    pub const EMPTY: LoadingPattern = LoadingPattern {
        bottom: None,
        top: None,
    };

    pub fn new(bottom: Option<ContainerLength>, top: Option<ContainerLength>) -> Self {
        LoadingPattern { bottom, top }
    }

    pub fn is_empty(&self) -> bool {
        self.bottom.is_none() && self.top.is_none()
    }

    pub fn occupied(&self) -> usize {
        self.bottom.is_some() as usize + self.top.is_some() as usize
    }

    /// Containers per length held by this pattern.
    pub fn counts(&self) -> [u32; NUM_LENGTHS] {
        let mut c = [0; NUM_LENGTHS];
        for len in [self.bottom, self.top].into_iter().flatten() {
            c[len.index()] += 1;
        }
        c
    }
}

impl fmt::Display for LoadingPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.bottom, self.top) {
            (None, None) => write!(f, "-"),
            (Some(b), None) => write!(f, "B{}", b.feet()),
            (Some(b), Some(t)) => write!(f, "B{}+T{}", b.feet(), t.feet()),
            (None, Some(t)) => write!(f, "T{}", t.feet()),
        }
    }
}

/// All loading patterns a platform admits, empty pattern first, then
/// ordered by `(bottom, top)`.
pub fn enumerate_patterns(platform: &PlatformType) -> Vec<LoadingPattern> {
    let options = [None, Some(ContainerLength::L40), Some(ContainerLength::L53)];
    let mut out = Vec::new();
    for bottom in options {
        for top in options {
            let valid = match (bottom, top) {
                (None, None) => true,
                (None, Some(_)) => false,
                (Some(b), None) => platform.accepts_bottom(b),
                (Some(b), Some(t)) => platform.accepts_top(b, t),
            };
            if valid {
                out.push(LoadingPattern { bottom, top });
            }
        }
    }
    out.sort();
    out
}

/// Weight capacity and center-of-mass check for one loaded platform.
///
/// Unoccupied slots must be given a weight of zero.
pub fn pattern_weight_feasible(
    pattern: &LoadingPattern,
    bottom_weight: f64,
    top_weight: f64,
    platform: &PlatformType,
) -> Result<bool> {
    for (name, w) in [("bottom", bottom_weight), ("top", top_weight)] {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidInput(format!(
                "{name} weight must be finite and nonnegative, got {w}"
            )));
        }
    }
    if pattern.bottom.is_none() && bottom_weight != 0.0 {
        return Err(Error::InvalidInput(
            "bottom slot is empty but a bottom weight was supplied".into(),
        ));
    }
    if pattern.top.is_none() && top_weight != 0.0 {
        return Err(Error::InvalidInput(
            "top slot is empty but a top weight was supplied".into(),
        ));
    }
    if pattern.is_empty() {
        return Ok(true);
    }
    Ok(platform.loads_fit(bottom_weight, top_weight))
}

/// Unchecked variant used on hot paths where inputs are known valid.
#[inline]
pub(crate) fn loads_fit(platform: &PlatformType, bottom_weight: f64, top_weight: f64) -> bool {
    platform.loads_fit(bottom_weight, top_weight)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fleet {
    railcar_types: Vec<RailcarType>,
    container_specs: [ContainerSpec; NUM_LENGTHS],
}

impl Fleet {
    /// The shipped synthetic fleet.
    pub fn default_fleet() -> Fleet {
        Fleet::from_json_str(DEFAULT_FLEET_JSON).expect("shipped fleet config is valid")
    }

    pub fn default_config_json() -> &'static str {
        DEFAULT_FLEET_JSON
    }

    pub fn from_json_str(text: &str) -> Result<Fleet> {
        let config: FleetConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("fleet config: {e}")))?;
        config.validate()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Fleet> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Fleet::from_json_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Build a fleet from already constructed parts, applying the same
    /// validation as the JSON loader.
    pub fn new(railcar_types: Vec<RailcarType>, container_specs: [ContainerSpec; NUM_LENGTHS]) -> Result<Fleet> {
        let fleet = Fleet {
            railcar_types,
            container_specs,
        };
        fleet.to_config().validate()
    }

    pub fn railcar_types(&self) -> &[RailcarType] {
        &self.railcar_types
    }

    /// Railcar type at position `j` (0-based; its id is `j + 1`).
    pub fn railcar_type(&self, j: usize) -> &RailcarType {
        &self.railcar_types[j]
    }

    pub fn container_spec(&self, len: ContainerLength) -> &ContainerSpec {
        &self.container_specs[len.index()]
    }

    pub fn container_specs(&self) -> &[ContainerSpec; NUM_LENGTHS] {
        &self.container_specs
    }

    pub fn platforms_per_type(&self) -> [u32; NUM_RAILCAR_TYPES] {
        std::array::from_fn(|j| self.railcar_types[j].platform_count() as u32)
    }

    pub fn lengths_per_type(&self) -> [u32; NUM_RAILCAR_TYPES] {
        std::array::from_fn(|j| self.railcar_types[j].total_length())
    }

    pub fn to_config(&self) -> FleetConfig {
        FleetConfig {
            version: Some(1),
            description: None,
            railcar_types: self
                .railcar_types
                .iter()
                .map(|t| RailcarTypeConfig {
                    id: t.id as u32,
                    platforms: t
                        .platforms
                        .iter()
                        .map(|p| PlatformConfig {
                            length_ft: p.length_ft(),
                            capacity_kg: p.weight_capacity,
                            tare_kg: p.tare,
                            top_53_capable: p.top_53_capable,
                            com_threshold_m: p.com_threshold,
                            h_bottom_m: p.slot_heights.bottom_center,
                            h_top_m: p.slot_heights.top_center,
                            h_tare_m: p.tare_height,
                        })
                        .collect(),
                })
                .collect(),
            container_specs: ContainerSpecsConfig {
                l40: spec_config(&self.container_specs[0]),
                l53: spec_config(&self.container_specs[1]),
            },
        }
    }

    /// SHA-256 over the canonical JSON form of the fleet's physical data.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(&self.to_config()).expect("fleet serializes");
        hex::encode(Sha256::digest(&canonical))
    }

    pub fn hash_bytes(&self) -> [u8; 32] {
        let canonical = serde_json::to_vec(&self.to_config()).expect("fleet serializes");
        let digest = Sha256::digest(&canonical);
        let mut out = [0u8; 32];
        out.copy_from_slice(digest.as_slice());
        out
    }
}

fn spec_config(spec: &ContainerSpec) -> ContainerSpecConfig {
    ContainerSpecConfig {
        tare_kg: spec.tare,
        net_capacity_kg: spec.net_capacity,
        empty_probability: spec.empty_probability,
    }
}

/// Slot count per railcar type.
pub fn slots_of(fleet: &Fleet) -> [u32; NUM_RAILCAR_TYPES] {
    std::array::from_fn(|j| fleet.railcar_type(j).slots())
}

// ---------------------------------------------------------------------------
// JSON schema

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FleetConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub railcar_types: Vec<RailcarTypeConfig>,
    pub container_specs: ContainerSpecsConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RailcarTypeConfig {
    pub id: u32,
    pub platforms: Vec<PlatformConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlatformConfig {
    pub length_ft: u32,
    pub capacity_kg: f64,
    pub tare_kg: f64,
    pub top_53_capable: bool,
    pub com_threshold_m: f64,
    pub h_bottom_m: f64,
    pub h_top_m: f64,
    pub h_tare_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContainerSpecsConfig {
    #[serde(rename = "L40")]
    pub l40: ContainerSpecConfig,
    #[serde(rename = "L53")]
    pub l53: ContainerSpecConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContainerSpecConfig {
    pub tare_kg: f64,
    pub net_capacity_kg: f64,
    pub empty_probability: f64,
}

impl FleetConfig {
    /// Check every constraint and build the fleet. Error messages name the
    /// offending JSON path.
    pub fn validate(&self) -> Result<Fleet> {
        let mut problems = Vec::new();
        if self.railcar_types.len() != NUM_RAILCAR_TYPES {
            problems.push(format!(
                "railcar_types: expected exactly {NUM_RAILCAR_TYPES} railcar types, found {}",
                self.railcar_types.len()
            ));
        }
        let mut ids: Vec<u32> = self.railcar_types.iter().map(|t| t.id).collect();
        ids.sort_unstable();
        let expected: Vec<u32> = (1..=self.railcar_types.len() as u32).collect();
        if ids != expected {
            problems.push(format!(
                "railcar_types: ids must be unique and cover 1..={}, found {:?}",
                self.railcar_types.len(),
                ids
            ));
        }
        for (ti, t) in self.railcar_types.iter().enumerate() {
            let at = format!("railcar_types[{ti}] (id {})", t.id);
            if t.platforms.is_empty() || t.platforms.len() > 5 {
                problems.push(format!(
                    "{at}: a railcar has one to five platforms, found {}",
                    t.platforms.len()
                ));
            }
            for (pi, p) in t.platforms.iter().enumerate() {
                check_platform(&format!("{at}.platforms[{pi}]"), p, &mut problems);
            }
        }
        for (name, s) in [
            ("container_specs.L40", &self.container_specs.l40),
            ("container_specs.L53", &self.container_specs.l53),
        ] {
            positive(&format!("{name}.tare_kg"), s.tare_kg, &mut problems);
            positive(&format!("{name}.net_capacity_kg"), s.net_capacity_kg, &mut problems);
            if !(0.0..=1.0).contains(&s.empty_probability) {
                problems.push(format!(
                    "{name}.empty_probability: must lie in [0, 1], got {}",
                    s.empty_probability
                ));
            }
        }
        if !problems.is_empty() {
            return Err(Error::Config(problems.join("; ")));
        }

        let mut railcar_types: Vec<RailcarType> = self
            .railcar_types
            .iter()
            .map(|t| RailcarType {
                id: t.id as u8,
                platforms: t
                    .platforms
                    .iter()
                    .map(|p| PlatformType {
                        length: ContainerLength::from_feet(p.length_ft).expect("checked"),
                        weight_capacity: p.capacity_kg,
                        tare: p.tare_kg,
                        top_53_capable: p.top_53_capable,
                        com_threshold: p.com_threshold_m,
                        slot_heights: SlotHeights {
                            bottom_center: p.h_bottom_m,
                            top_center: p.h_top_m,
                        },
                        tare_height: p.h_tare_m,
                    })
                    .collect(),
            })
            .collect();
        railcar_types.sort_by_key(|t| t.id);
        let spec = |len, c: &ContainerSpecConfig| ContainerSpec {
            length: len,
            tare: c.tare_kg,
            net_capacity: c.net_capacity_kg,
            empty_probability: c.empty_probability,
        };
        Ok(Fleet {
            railcar_types,
            container_specs: [
                spec(ContainerLength::L40, &self.container_specs.l40),
                spec(ContainerLength::L53, &self.container_specs.l53),
            ],
        })
    }
}

fn positive(at: &str, v: f64, problems: &mut Vec<String>) {
    if !(v.is_finite() && v > 0.0) {
        problems.push(format!("{at}: must be a positive number, got {v}"));
    }
}

fn check_platform(at: &str, p: &PlatformConfig, problems: &mut Vec<String>) {
    if ContainerLength::from_feet(p.length_ft).is_none() {
        problems.push(format!("{at}.length_ft: must be 40 or 53, got {}", p.length_ft));
    }
    positive(&format!("{at}.capacity_kg"), p.capacity_kg, problems);
    positive(&format!("{at}.tare_kg"), p.tare_kg, problems);
    for (name, v) in [
        ("com_threshold_m", p.com_threshold_m),
        ("h_bottom_m", p.h_bottom_m),
        ("h_top_m", p.h_top_m),
        ("h_tare_m", p.h_tare_m),
    ] {
        if !v.is_finite() {
            problems.push(format!("{at}.{name}: must be finite, got {v}"));
        }
    }
    if p.h_top_m <= p.h_bottom_m {
        problems.push(format!(
            "{at}: h_top_m ({}) must exceed h_bottom_m ({})",
            p.h_top_m, p.h_bottom_m
        ));
    }
    // Keeps the center-of-mass test monotone in both slot weights.
    if p.h_bottom_m < p.com_threshold_m {
        problems.push(format!(
            "{at}: h_bottom_m ({}) must not be below com_threshold_m ({})",
            p.h_bottom_m, p.com_threshold_m
        ));
    }
    if p.h_tare_m > p.com_threshold_m {
        problems.push(format!(
            "{at}: h_tare_m ({}) must not exceed com_threshold_m ({}), otherwise an empty platform is infeasible",
            p.h_tare_m, p.com_threshold_m
        ));
    }
}
