//! Mobile-node movement model: the Life-to-Mobility Ratio, boundary
//! crossing probabilities, dwell rates, crossing-count distributions and
//! the inter-area transition matrix.
//!
//! The active life of a mobile node is exponential with rate `lambda`;
//! the dwell time in one cell is exponential with rate `mu`. A node
//! survives a cell crossing with probability `p_c = mu / (mu + lambda)`,
//! crosses a region boundary at a typical surviving step with
//! probability `p_sr`, and so on up the hierarchy. All crossing-count
//! distributions come out geometric, so the module keeps closed-form
//! pmf handles rather than materialized arrays.

use crate::error::{ModelError, Result};

/// Hard cap for pmf truncation horizons; geometric tails make anything
/// near this limit pathological rather than expensive.
pub const PMF_HORIZON_CAP: u64 = 10_000_000;

/// Active-life and cell-dwell rates together with derived quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityParams {
    /// Active-life rate `lambda` (1/s).
    pub life_rate: f64,
    /// Cell departure rate `mu` (1/s).
    pub cell_departure_rate: f64,
    /// Life-to-Mobility Ratio `rho_c = lambda / mu`.
    pub rho_c: f64,
    /// Probability of surviving one cell crossing,
    /// `p_c = 1 / (1 + rho_c)`.
    pub survive_cell_prob: f64,
    /// Mean active life `1 / lambda` (s).
    pub mean_life_s: f64,
    /// Mean cell dwell `1 / mu` (s).
    pub mean_cell_dwell_s: f64,
}

/// Build [`MobilityParams`] from the mean active life and the
/// Life-to-Mobility Ratio.
pub fn mobility_params(mean_life_s: f64, rho_c: f64) -> Result<MobilityParams> {
    if mean_life_s <= 0.0 || !mean_life_s.is_finite() {
        return Err(ModelError::domain("mean_life_s must be positive and finite"));
    }
    if rho_c <= 0.0 || !rho_c.is_finite() {
        return Err(ModelError::domain("rho_c must be positive and finite"));
    }
    let life_rate = 1.0 / mean_life_s;
    let cell_departure_rate = life_rate / rho_c;
    Ok(MobilityParams {
        life_rate,
        cell_departure_rate,
        rho_c,
        survive_cell_prob: 1.0 / (1.0 + rho_c),
        mean_life_s,
        mean_cell_dwell_s: rho_c * mean_life_s,
    })
}

/// Which form of the boundary-crossing probabilities to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossingMode {
    /// Reduced closed forms: the 17/36 region coefficient rounds to 1/2
    /// and the 35/32 area coefficient rounds to 1. This is the default
    /// used by all downstream metrics.
    Approx,
    /// Unreduced coefficients 17/36 and 35/32, kept selectable for
    /// sensitivity studies.
    Exact,
}

/// Boundary-crossing probabilities and exit rates for a given geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingModel {
    /// Probability `p_sr` that a typical step crosses the region
    /// boundary (survival included).
    pub region_exit_step_prob: f64,
    /// Probability `p_r` of moving through a whole region during the
    /// remaining active life.
    pub region_transit_prob: f64,
    /// Probability `p_sa` that a typical region transition crosses the
    /// area boundary.
    pub area_exit_step_prob: f64,
    /// Probability `p_a` of moving through a whole area during the
    /// remaining active life.
    pub area_transit_prob: f64,
    /// Region exit rate `eta_r = mu * p_sr` (1/s).
    pub region_exit_rate: f64,
    /// Area exit rate `eta_a = mu * p_sr * p_sa` (1/s).
    pub area_exit_rate: f64,
    /// Coefficient mode the model was built with.
    pub mode: CrossingMode,
}

/// Build the crossing model for an `L`-ring region inside an `M x M`
/// area.
pub fn crossing_model(
    params: &MobilityParams,
    ring_count: u32,
    regions_per_side: u32,
    mode: CrossingMode,
) -> Result<CrossingModel> {
    if ring_count < 1 {
        return Err(ModelError::domain("ring_count must be >= 1"));
    }
    if regions_per_side < 2 {
        return Err(ModelError::domain("regions_per_side must be >= 2"));
    }
    let rho = params.rho_c;
    let l = f64::from(ring_count);
    let m = f64::from(regions_per_side);
    let region_denom = l * (3.0 * l + 1.0);
    let area_denom = (2.0 * m - 1.0) * (m - 1.0);

    let (region_exit_step_prob, region_transit_prob, area_exit_step_prob) = match mode {
        CrossingMode::Approx => {
            let p_sr = 1.0 / (2.0 * region_denom * (1.0 + rho));
            let p_r = 1.0 / (1.0 + 2.0 * rho * (1.0 + rho) * region_denom);
            let p_sa = p_r / area_denom;
            (p_sr, p_r, p_sa)
        }
        CrossingMode::Exact => {
            let p_sr = (17.0 / 36.0) * params.survive_cell_prob / region_denom;
            let p_r = 1.0 / (1.0 + rho / p_sr);
            let p_sa = (35.0 / 32.0) * p_r / area_denom;
            (p_sr, p_r, p_sa)
        }
    };
    let area_transit_prob = 1.0 / (1.0 + rho / (region_exit_step_prob * area_exit_step_prob));
    Ok(CrossingModel {
        region_exit_step_prob,
        region_transit_prob,
        area_exit_step_prob,
        area_transit_prob,
        region_exit_rate: params.cell_departure_rate * region_exit_step_prob,
        area_exit_rate: params.cell_departure_rate
            * region_exit_step_prob
            * area_exit_step_prob,
        mode,
    })
}

fn saturating_exponent(n: u64) -> i32 {
    n.min(i32::MAX as u64) as i32
}

/// Closed-form geometric pmf `p(k) = (1 - g) g^(k - start)` for
/// `k >= start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricPmf {
    ratio: f64,
    start: u64,
}

impl GeometricPmf {
    /// Geometric pmf starting at `start` with common ratio `ratio`.
    pub fn new(ratio: f64, start: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&ratio) {
            return Err(ModelError::domain("geometric ratio must lie in [0, 1)"));
        }
        Ok(GeometricPmf { ratio, start })
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    /// Probability mass at `k`.
    pub fn pmf(&self, k: u64) -> f64 {
        if k < self.start {
            0.0
        } else {
            (1.0 - self.ratio) * self.ratio.powi(saturating_exponent(k - self.start))
        }
    }

    /// Closed-form mean `start + g / (1 - g)`.
    pub fn mean(&self) -> f64 {
        self.start as f64 + self.ratio / (1.0 - self.ratio)
    }

    /// Closed-form variance `g / (1 - g)^2`.
    pub fn variance(&self) -> f64 {
        self.ratio / ((1.0 - self.ratio) * (1.0 - self.ratio))
    }

    /// Tail mass `P(K >= k)`.
    pub fn tail(&self, k: u64) -> f64 {
        if k <= self.start {
            1.0
        } else {
            self.ratio.powi(saturating_exponent(k - self.start))
        }
    }

    /// Smallest value `v` with `tail(v) < tail_mass`, capped at
    /// `start + PMF_HORIZON_CAP`.
    pub fn horizon(&self, tail_mass: f64) -> u64 {
        if self.ratio == 0.0 {
            return self.start + 1;
        }
        let n = (tail_mass.ln() / self.ratio.ln()).floor() as u64 + 1;
        self.start + n.min(PMF_HORIZON_CAP)
    }

    /// Mean computed by direct summation. The sum runs to a deeper
    /// horizon (tail mass below 1e-16) than the normalization check so
    /// the truncated tail cannot disturb the ninth digit of a small
    /// mean. Used to cross-check the closed form.
    pub fn summed_mean(&self) -> f64 {
        let hi = self.horizon(1e-16);
        (self.start..hi).map(|k| k as f64 * self.pmf(k)).sum()
    }

    /// Variance computed by direct summation over the deep horizon.
    pub fn summed_variance(&self) -> f64 {
        let hi = self.horizon(1e-16);
        let mean = self.summed_mean();
        (self.start..hi)
            .map(|k| {
                let d = k as f64 - mean;
                d * d * self.pmf(k)
            })
            .sum()
    }

    /// Total mass over the truncation horizon.
    pub fn summed_mass(&self) -> f64 {
        let hi = self.horizon(1e-12);
        (self.start..hi).map(|k| self.pmf(k)).sum()
    }
}

/// Crossing-count distributions of one active life and their moments.
///
/// `C` counts every cell boundary crossing, `R` the region-or-area
/// crossings among them and `A` the area crossings among those; hence
/// `C >= R >= A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingDistributions {
    /// Distribution of `C`, geometric from 0 with ratio `p_c`.
    pub cell_crossings: GeometricPmf,
    /// Distribution of `R`, geometric from 0.
    pub region_crossings: GeometricPmf,
    /// Distribution of `A`, geometric from 0.
    pub area_crossings: GeometricPmf,
    /// Exit count `M_cb`: cell crossings until the region is exited,
    /// geometric from 1 with parameter `p_sr`.
    pub region_exit_steps: GeometricPmf,
    /// Exit count `M_rb`: region transitions until the area is exited,
    /// geometric from 1 with parameter `p_sa`.
    pub area_exit_steps: GeometricPmf,
    /// `E[C] = 1 / rho_c`.
    pub mean_cell: f64,
    /// `Var[C] = (1 + rho_c) / rho_c^2`.
    pub var_cell: f64,
    /// `E[R] = p_r / rho_c`.
    pub mean_region: f64,
    /// `Var[R] = (1 + rho_c / p_r) p_r^2 / rho_c^2`.
    pub var_region: f64,
    /// `E[A] = p_r p_a / rho_c`.
    pub mean_area: f64,
    /// `Var[A] = (1 + rho_c / (p_r p_a)) (p_r p_a)^2 / rho_c^2`.
    pub var_area: f64,
    /// `E[M_c] = E[C] - E[R]`: crossings that stay inside one region.
    pub mean_cell_only: f64,
    /// `E[M_r] = E[R] - E[A]`: region crossings that stay inside one
    /// area.
    pub mean_region_only: f64,
    /// `E[M_c^I] = E[M_c] A(0)`: cell crossings local to one area.
    pub mean_cell_internal: f64,
    /// `E[M_r^I] = E[M_r] A(0)`: region crossings local to one area.
    pub mean_region_internal: f64,
}

/// Build the crossing-count distributions for the given mobility
/// parameters and crossing model.
pub fn crossing_distributions(
    params: &MobilityParams,
    model: &CrossingModel,
) -> Result<CrossingDistributions> {
    let p_c = params.survive_cell_prob;
    if !(p_c > 0.0 && p_c < 1.0) {
        return Err(ModelError::domain("survive_cell_prob must lie in (0, 1)"));
    }
    let rho = params.rho_c;
    let p_r = model.region_transit_prob;
    let p_a = model.area_transit_prob;

    let ratio_region = p_c * p_r / (1.0 - p_c * (1.0 - p_r));
    let ratio_area = p_c * p_r * p_a / (1.0 - p_c * (1.0 - p_r * p_a));

    let cell_crossings = GeometricPmf::new(p_c, 0)?;
    let region_crossings = GeometricPmf::new(ratio_region, 0)?;
    let area_crossings = GeometricPmf::new(ratio_area, 0)?;
    let region_exit_steps = GeometricPmf::new(1.0 - model.region_exit_step_prob, 1)?;
    let area_exit_steps = GeometricPmf::new(1.0 - model.area_exit_step_prob, 1)?;

    let mean_cell = 1.0 / rho;
    let mean_region = p_r / rho;
    let mean_area = p_r * p_a / rho;
    let local_prob = area_crossings.pmf(0); // A(0)
    let mean_cell_only = mean_cell - mean_region;
    let mean_region_only = mean_region - mean_area;
    Ok(CrossingDistributions {
        cell_crossings,
        region_crossings,
        area_crossings,
        region_exit_steps,
        area_exit_steps,
        mean_cell,
        var_cell: (1.0 + rho) / (rho * rho),
        mean_region,
        var_region: (1.0 + rho / p_r) * p_r * p_r / (rho * rho),
        mean_area,
        var_area: (1.0 + rho / (p_r * p_a)) * (p_r * p_a) * (p_r * p_a) / (rho * rho),
        mean_cell_only,
        mean_region_only,
        mean_cell_internal: mean_cell_only * local_prob,
        mean_region_internal: mean_region_only * local_prob,
    })
}

/// Number of area transitions `K` a node is expected to survive:
/// `K = max(1, ceil((eta_a / lambda)(1/epsilon - 1)))`.
pub fn survivable_transitions(
    model: &CrossingModel,
    life_rate: f64,
    epsilon: f64,
) -> Result<u32> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(ModelError::domain("epsilon must lie in (0, 1)"));
    }
    if life_rate <= 0.0 || life_rate.is_nan() {
        return Err(ModelError::domain("life_rate must be positive"));
    }
    let bound = (model.area_exit_rate / life_rate) * (1.0 / epsilon - 1.0);
    let k = bound.ceil().max(1.0);
    Ok(if k >= u32::MAX as f64 { u32::MAX } else { k as u32 })
}

/// Sub-stochastic inter-area transition matrix.
///
/// Entry `(i, j)` is `A(|i - j|)` inside the band `1 <= |i - j| <= K`,
/// plus `A(1)` at the circular wrap positions `|i - j| = J - 1`; the
/// diagonal is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct InterAreaMatrix {
    area_count: usize,
    band: usize,
    entries: Vec<f64>,
}

impl InterAreaMatrix {
    /// Number of areas `J`.
    pub fn area_count(&self) -> usize {
        self.area_count
    }

    /// Effective band width `K` after capping at `(J - 1) / 2`.
    pub fn band(&self) -> usize {
        self.band
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.area_count + j]
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.entries[i * self.area_count..(i + 1) * self.area_count]
            .iter()
            .sum()
    }

    /// Matrix-vector product `P v`.
    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.area_count {
            return Err(ModelError::Dimension(format!(
                "vector length {} does not match area count {}",
                v.len(),
                self.area_count
            )));
        }
        Ok((0..self.area_count)
            .map(|i| {
                (0..self.area_count)
                    .map(|j| self.get(i, j) * v[j])
                    .sum()
            })
            .collect())
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

/// Build the inter-area transition matrix from the area-crossing pmf.
///
/// The band is capped at `floor((J - 1) / 2)` so the circular structure
/// stays well formed; the cap must leave at least one band.
pub fn inter_area_matrix(
    area_count: usize,
    band: u32,
    area_pmf: impl Fn(u64) -> f64,
) -> Result<InterAreaMatrix> {
    if area_count < 2 {
        return Err(ModelError::domain("area_count must be >= 2"));
    }
    if band < 1 {
        return Err(ModelError::domain("band must be >= 1"));
    }
    let band_eff = (band as usize).min((area_count - 1) / 2);
    if band_eff < 1 {
        return Err(ModelError::domain(
            "effective band is empty; need area_count >= 3",
        ));
    }
    let j = area_count;
    let mut entries = vec![0.0; j * j];
    for row in 0..j {
        for col in 0..j {
            let d = row.abs_diff(col);
            let mut value = 0.0;
            if (1..=band_eff).contains(&d) {
                value += area_pmf(d as u64);
            }
            if d == j - 1 {
                value += area_pmf(1);
            }
            if value < 0.0 {
                return Err(ModelError::domain("area pmf produced a negative entry"));
            }
            entries[row * j + col] = value;
        }
    }
    let matrix = InterAreaMatrix { area_count: j, band: band_eff, entries };
    for i in 0..j {
        if matrix.row_sum(i) > 1.0 {
            return Err(ModelError::domain(format!(
                "row {i} of the inter-area matrix sums above 1"
            )));
        }
    }
    Ok(matrix)
}

/// Estimated node speed in km/h implied by a Life-to-Mobility Ratio:
/// one across-flats cell width `sqrt(3) r` per mean cell dwell
/// `rho_c * mean_life`.
pub fn estimate_speed(rho_c: f64, cell_radius_km: f64, mean_life_s: f64) -> f64 {
    let width_km = 3.0_f64.sqrt() * cell_radius_km;
    let dwell_s = rho_c * mean_life_s;
    width_km / dwell_s * 3600.0
}
