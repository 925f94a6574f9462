//! Seeded Monte-Carlo verification of the analytical movement and
//! hop-count models.
//!
//! Two movement modes are provided. `ModelFaithful` samples the exact
//! probabilistic structure behind the closed-form crossing
//! distributions: every cell crossing survives with probability `p_c`,
//! each surviving crossing is a region transit with probability `p_r`
//! and each region transit an area transit with probability `p_a`.
//! `Geometric` walks the actual hexagonal region graph and king-move
//! area grid and counts true geometric boundary exits; its exit
//! fractions intentionally differ from the per-vertex-class closed
//! forms and are reported as data, not asserted.
//!
//! Lives are independent work units. The random stream of life `i` is
//! a counter-based split of `(seed, i)`, and records are written into
//! disjoint index ranges, so any worker count produces bitwise
//! identical aggregates.

use std::collections::BTreeMap;
use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::{ModelError, Result};
use crate::geometry::bruteforce::{hex_cells, hex_distance, HEX_DIRS, KING_DIRS};
use crate::geometry::AreaSpec;
use crate::movement::{CrossingModel, GeometricPmf, MobilityParams};

/// Movement simulation mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMode {
    /// Sample the analytical classification chain directly.
    ModelFaithful,
    /// Walk the actual region graph and area grid.
    Geometric,
}

impl SimMode {
    /// Canonical configuration token.
    pub fn token(&self) -> &'static str {
        match self {
            SimMode::ModelFaithful => "model-faithful",
            SimMode::Geometric => "geometric",
        }
    }
}

/// Configuration of one movement simulation run.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    /// Master seed; life `i` uses a stream split from `(seed, i)`.
    pub seed: u64,
    /// Number of active lives to simulate.
    pub life_count: u64,
    /// Worker threads; any value yields identical results.
    pub worker_count: usize,
    /// Mobility rates of the simulated node.
    pub mobility: MobilityParams,
    /// Area geometry (carries the region geometry).
    pub area: AreaSpec,
    /// Number of areas in the surrounding coverage; carried for
    /// reporting, the walk itself tracks one node through identical
    /// areas.
    pub area_count: usize,
    /// Inter-area band; carried for reporting.
    pub band: u32,
    /// Simulation mode.
    pub mode: SimMode,
}

/// Crossing counts of one simulated active life.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LifeRecord {
    /// Total cell boundary crossings (`C`).
    pub cell_crossings: u64,
    /// Region-or-area boundary crossings (`R`).
    pub region_crossings: u64,
    /// Area boundary crossings (`A`).
    pub area_crossings: u64,
    /// Drawn active-life duration in seconds.
    pub life_duration_s: f64,
}

/// Integer-valued empirical distribution.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmpiricalPmf {
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl EmpiricalPmf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: u64) {
        *self.counts.entry(value).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, value: u64) -> u64 {
        self.counts.get(&value).copied().unwrap_or(0)
    }

    pub fn frequency(&self, value: u64) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(value) as f64 / self.total as f64
        }
    }

    pub fn max_value(&self) -> Option<u64> {
        self.counts.keys().next_back().copied()
    }

    /// Mean of the empirical distribution.
    pub fn mean(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.counts
            .iter()
            .map(|(&v, &c)| v as f64 * c as f64)
            .sum::<f64>()
            / self.total as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&v, &c)| (v, c))
    }
}

/// Aggregate result of a movement simulation.
#[derive(Debug, Clone)]
pub struct MovementSummary {
    /// Per-life records in life-index order.
    pub records: Vec<LifeRecord>,
    /// Empirical distribution of `C`.
    pub cell_pmf: EmpiricalPmf,
    /// Empirical distribution of `R`.
    pub region_pmf: EmpiricalPmf,
    /// Empirical distribution of `A`.
    pub area_pmf: EmpiricalPmf,
    /// Fraction of crossing attempts survived; estimates `p_c`.
    pub survival_fraction: f64,
    /// Region exits per surviving crossing. Estimates the region
    /// transit probability in model-faithful mode and the aggregate
    /// geometric exit fraction in geometric mode.
    pub region_exit_fraction: f64,
    /// Area exits per region exit.
    pub area_exit_fraction: f64,
}

/// SplitMix64 step; used to derive independent per-life streams.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn life_rng(seed: u64, life_index: u64) -> ChaCha8Rng {
    let mixed = splitmix64(seed ^ splitmix64(life_index.wrapping_add(1)));
    ChaCha8Rng::seed_from_u64(mixed)
}

fn sample_exp<R: Rng>(rng: &mut R, rate: f64) -> f64 {
    let unit: f64 = rng.sample(Exp1);
    unit / rate
}

/// Weighted sampling table over vertex indices.
struct WeightedTable {
    cumulative: Vec<f64>,
    indices: Vec<u32>,
}

impl WeightedTable {
    fn new(weights: impl Iterator<Item = (u32, f64)>) -> Self {
        let mut cumulative = Vec::new();
        let mut indices = Vec::new();
        let mut acc = 0.0;
        for (index, w) in weights {
            acc += w;
            cumulative.push(acc);
            indices.push(index);
        }
        WeightedTable { cumulative, indices }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> u32 {
        let total = *self.cumulative.last().expect("non-empty table");
        let x: f64 = rng.random::<f64>() * total;
        let pos = self.cumulative.partition_point(|&c| c <= x);
        self.indices[pos.min(self.indices.len() - 1)]
    }
}

/// Hex region walk tables: per-cell neighbors and stationary samplers.
struct RegionWalk {
    neighbors: Vec<[Option<u32>; 6]>,
    stationary: WeightedTable,
    border: WeightedTable,
}

impl RegionWalk {
    fn build(ring_count: u32) -> Self {
        let cells = hex_cells(ring_count);
        let index: std::collections::HashMap<(i64, i64), u32> = cells
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i as u32))
            .collect();
        let l = i64::from(ring_count);
        let mut neighbors = Vec::with_capacity(cells.len());
        let mut degrees = Vec::with_capacity(cells.len());
        let mut border = Vec::new();
        for (i, &(q, r)) in cells.iter().enumerate() {
            let mut nb = [None; 6];
            let mut degree = 0.0;
            for (d, (dq, dr)) in HEX_DIRS.iter().enumerate() {
                if let Some(&j) = index.get(&(q + dq, r + dr)) {
                    nb[d] = Some(j);
                    degree += 1.0;
                }
            }
            neighbors.push(nb);
            degrees.push(degree);
            if hex_distance(q, r) == l {
                border.push((i as u32, degree));
            }
        }
        RegionWalk {
            neighbors,
            stationary: WeightedTable::new(
                degrees.iter().enumerate().map(|(i, &d)| (i as u32, d)),
            ),
            border: WeightedTable::new(border.into_iter()),
        }
    }
}

/// King-move area grid tables.
struct AreaWalk {
    neighbors: Vec<[Option<u32>; 8]>,
    stationary: WeightedTable,
    border: WeightedTable,
}

impl AreaWalk {
    fn build(side: u32) -> Self {
        let m = i64::from(side);
        let idx = |x: i64, y: i64| (x * m + y) as u32;
        let mut neighbors = Vec::with_capacity((m * m) as usize);
        let mut degrees = Vec::with_capacity((m * m) as usize);
        let mut border = Vec::new();
        for x in 0..m {
            for y in 0..m {
                let mut nb = [None; 8];
                let mut degree = 0.0;
                for (d, (dx, dy)) in KING_DIRS.iter().enumerate() {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx >= 0 && nx < m && ny >= 0 && ny < m {
                        nb[d] = Some(idx(nx, ny));
                        degree += 1.0;
                    }
                }
                neighbors.push(nb);
                degrees.push(degree);
                if x == 0 || y == 0 || x == m - 1 || y == m - 1 {
                    border.push((idx(x, y), degree));
                }
            }
        }
        AreaWalk {
            neighbors,
            stationary: WeightedTable::new(
                degrees.iter().enumerate().map(|(i, &d)| (i as u32, d)),
            ),
            border: WeightedTable::new(border.into_iter()),
        }
    }
}

fn run_life_faithful(
    rng: &mut ChaCha8Rng,
    mobility: &MobilityParams,
    model: &CrossingModel,
) -> LifeRecord {
    let duration = sample_exp(rng, mobility.life_rate);
    let p_c = mobility.survive_cell_prob;
    let p_r = model.region_transit_prob;
    let p_a = model.area_transit_prob;
    let mut record = LifeRecord { life_duration_s: duration, ..Default::default() };
    while rng.random::<f64>() < p_c {
        record.cell_crossings += 1;
        if rng.random::<f64>() < p_r {
            record.region_crossings += 1;
            if rng.random::<f64>() < p_a {
                record.area_crossings += 1;
            }
        }
    }
    record
}

fn run_life_geometric(
    rng: &mut ChaCha8Rng,
    mobility: &MobilityParams,
    region: &RegionWalk,
    area: &AreaWalk,
) -> LifeRecord {
    let duration = sample_exp(rng, mobility.life_rate);
    let mut remaining = duration;
    let mut cell = region.stationary.sample(rng) as usize;
    let mut region_pos = area.stationary.sample(rng) as usize;
    let mut record = LifeRecord { life_duration_s: duration, ..Default::default() };
    loop {
        let dwell = sample_exp(rng, mobility.cell_departure_rate);
        if dwell >= remaining {
            break;
        }
        remaining -= dwell;
        record.cell_crossings += 1;
        let dir = rng.random_range(0..6usize);
        match region.neighbors[cell][dir] {
            Some(next) => cell = next as usize,
            None => {
                // Crossed the region border.
                record.region_crossings += 1;
                let king = rng.random_range(0..8usize);
                match area.neighbors[region_pos][king] {
                    Some(next_region) => region_pos = next_region as usize,
                    None => {
                        // Crossed the area border as well; re-enter a
                        // fresh area at a stationary border region.
                        record.area_crossings += 1;
                        region_pos = area.border.sample(rng) as usize;
                    }
                }
                // Enter the new region on its border ring.
                cell = region.border.sample(rng) as usize;
            }
        }
    }
    record
}

/// Run the movement simulation described by `config`, classifying
/// crossings with the probabilities of `model` in model-faithful mode.
pub fn simulate_movement(config: &SimConfig, model: &CrossingModel) -> Result<MovementSummary> {
    if config.life_count < 1 {
        return Err(ModelError::domain("life_count must be >= 1"));
    }
    if config.worker_count < 1 {
        return Err(ModelError::domain("worker_count must be >= 1"));
    }
    let walk_tables = match config.mode {
        SimMode::Geometric => Some((
            RegionWalk::build(config.area.region.ring_count),
            AreaWalk::build(config.area.regions_per_side),
        )),
        SimMode::ModelFaithful => None,
    };

    let life_count = config.life_count as usize;
    let mut records = vec![LifeRecord::default(); life_count];
    let chunk = life_count.div_ceil(config.worker_count);
    thread::scope(|scope| {
        for (w, slice) in records.chunks_mut(chunk).enumerate() {
            let base = (w * chunk) as u64;
            let mobility = &config.mobility;
            let tables = &walk_tables;
            scope.spawn(move || {
                for (offset, record) in slice.iter_mut().enumerate() {
                    let mut rng = life_rng(config.seed, base + offset as u64);
                    *record = match tables {
                        None => run_life_faithful(&mut rng, mobility, model),
                        Some((region, area)) => {
                            run_life_geometric(&mut rng, mobility, region, area)
                        }
                    };
                }
            });
        }
    });

    let mut cell_pmf = EmpiricalPmf::new();
    let mut region_pmf = EmpiricalPmf::new();
    let mut area_pmf = EmpiricalPmf::new();
    let (mut cells, mut regions, mut areas) = (0u64, 0u64, 0u64);
    for record in &records {
        cell_pmf.add(record.cell_crossings);
        region_pmf.add(record.region_crossings);
        area_pmf.add(record.area_crossings);
        cells += record.cell_crossings;
        regions += record.region_crossings;
        areas += record.area_crossings;
    }
    let attempts = cells + config.life_count;
    Ok(MovementSummary {
        records,
        cell_pmf,
        region_pmf,
        area_pmf,
        survival_fraction: cells as f64 / attempts as f64,
        region_exit_fraction: if cells > 0 { regions as f64 / cells as f64 } else { 0.0 },
        area_exit_fraction: if regions > 0 { areas as f64 / regions as f64 } else { 0.0 },
    })
}

/// Result of a hop-count chain simulation.
#[derive(Debug, Clone)]
pub struct HopSimSummary {
    /// Time-weighted state frequencies over `0..=D`.
    pub frequencies: Vec<f64>,
    /// Time-weighted mean hop count.
    pub mean: f64,
}

/// Simulate the hop-count chain: hold an exponential dwell in the
/// current state, then re-draw the state uniformly over `0..=D`.
/// Doubling the dwell rate for MN-to-MN sessions rescales every holding
/// time by one half and leaves the time-weighted distribution
/// unchanged.
pub fn simulate_hops(
    seed: u64,
    transition_count: u64,
    max_diameter: u32,
    mn_to_mn: bool,
) -> Result<HopSimSummary> {
    if max_diameter < 1 {
        return Err(ModelError::domain("max_diameter must be >= 1"));
    }
    if transition_count < 1 {
        return Err(ModelError::domain("transition_count must be >= 1"));
    }
    let rate = if mn_to_mn { 2.0 } else { 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed));
    let states = max_diameter as usize + 1;
    let mut occupancy = vec![0.0f64; states];
    let mut state = rng.random_range(0..states);
    for _ in 0..transition_count {
        occupancy[state] += sample_exp(&mut rng, rate);
        state = rng.random_range(0..states);
    }
    let total: f64 = occupancy.iter().sum();
    let frequencies: Vec<f64> = occupancy.iter().map(|t| t / total).collect();
    let mean = frequencies.iter().enumerate().map(|(j, f)| j as f64 * f).sum();
    Ok(HopSimSummary { frequencies, mean })
}

/// Distance and goodness-of-fit measures between an empirical pmf and a
/// closed-form geometric pmf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonReport {
    /// Total variation distance over the union support, analytic tail
    /// beyond the empirical maximum included.
    pub tv_distance: f64,
    /// Pearson chi-square statistic over bins with expected count of at
    /// least 5; smaller bins are merged into the tail bin.
    pub chi_square: f64,
    /// Degrees of freedom of the chi-square statistic (bins minus one).
    pub chi_square_dof: usize,
}

/// Compare an empirical distribution against an analytic geometric pmf.
pub fn compare_empirical(
    empirical: &EmpiricalPmf,
    analytic: &GeometricPmf,
) -> Result<ComparisonReport> {
    if empirical.total() == 0 {
        return Err(ModelError::EmptyPmf);
    }
    let vmax = empirical.max_value().unwrap_or(0);
    let mut tv = 0.0;
    for v in 0..=vmax {
        tv += (empirical.frequency(v) - analytic.pmf(v)).abs();
    }
    tv += analytic.tail(vmax + 1);
    tv *= 0.5;

    let n = empirical.total() as f64;
    let mut chi_square = 0.0;
    let mut kept = 0usize;
    let mut kept_expected = 0.0;
    let mut kept_observed = 0u64;
    for v in 0..=vmax {
        let expected = n * analytic.pmf(v);
        if expected >= 5.0 {
            let observed = empirical.count(v) as f64;
            chi_square += (observed - expected) * (observed - expected) / expected;
            kept += 1;
            kept_expected += expected;
            kept_observed += empirical.count(v);
        }
    }
    let tail_expected = (n - kept_expected).max(0.0);
    let tail_observed = (empirical.total() - kept_observed) as f64;
    if tail_expected > 0.0 {
        chi_square += (tail_observed - tail_expected) * (tail_observed - tail_expected)
            / tail_expected;
    }
    Ok(ComparisonReport { tv_distance: tv, chi_square, chi_square_dof: kept })
}
