//! Forwarding-plane hop-count chain and control-plane event rates.
//!
//! The hop count between two communicating nodes is a CTMC on states
//! `0..=D` that re-draws uniformly at region-change epochs, so its
//! stationary distribution is uniform. The control-plane side solves
//! the per-area event-rate balance `Y = Y_I + P Y` for the total event
//! rate vector and derives the per-type network-update rates from it.

use nalgebra::{DMatrix, DVector};

use crate::error::{ModelError, Result};
use crate::movement::{CrossingDistributions, InterAreaMatrix};

/// Maximum number of fixed-point iterations before the event-rate
/// solver reports non-convergence.
pub const FIXED_POINT_ITERATION_CAP: usize = 1_000_000;
const FIXED_POINT_TOLERANCE: f64 = 1e-10;
const SOLVER_AGREEMENT_TOLERANCE: f64 = 1e-9;

/// Stationary hop-count model for a network of maximum diameter `D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopCountModel {
    /// Maximum network diameter in router hops.
    pub max_diameter: u32,
    /// State dwell rate: the region exit rate for a fixed correspondent,
    /// doubled when both endpoints move. Does not affect the stationary
    /// distribution.
    pub dwell_rate: f64,
}

impl HopCountModel {
    /// Uniform per-target transition weight `q = 1/D`.
    pub fn transition_uniform(&self) -> f64 {
        1.0 / f64::from(self.max_diameter)
    }

    /// Stationary probability of any single state, `1 / (D + 1)`.
    pub fn state_probability(&self) -> f64 {
        1.0 / (f64::from(self.max_diameter) + 1.0)
    }

    /// Full stationary vector over states `0..=D`.
    pub fn stationary(&self) -> Vec<f64> {
        vec![self.state_probability(); self.max_diameter as usize + 1]
    }

    /// Mean hop count `D / 2`.
    pub fn mean(&self) -> f64 {
        f64::from(self.max_diameter) / 2.0
    }

    /// Variance of the hop count, computed directly from the stationary
    /// distribution; equals `D (D + 2) / 12` for the uniform
    /// distribution on `{0..D}`.
    pub fn variance(&self) -> f64 {
        let p = self.state_probability();
        let mean = self.mean();
        (0..=self.max_diameter)
            .map(|j| {
                let d = f64::from(j) - mean;
                d * d * p
            })
            .sum()
    }

    /// Same model with the dwell rate set from the region exit rate;
    /// MN-to-MN sessions leave a state at twice the rate.
    pub fn with_dwell_rate(mut self, region_exit_rate: f64, mn_to_mn: bool) -> Self {
        self.dwell_rate = if mn_to_mn { 2.0 * region_exit_rate } else { region_exit_rate };
        self
    }
}

/// Build the hop-count model for a maximum diameter `D >= 1`.
pub fn hop_count_model(max_diameter: u32) -> Result<HopCountModel> {
    if max_diameter < 1 {
        return Err(ModelError::domain("max_diameter must be >= 1"));
    }
    Ok(HopCountModel { max_diameter, dwell_rate: 1.0 })
}

/// Solve the total event-rate system `Y = Y_I + P Y`.
///
/// The primary path is a dense LU solve of `(I - P) Y = Y_I`; every call
/// also runs the fixed-point iteration from `Y_I` as an independent
/// route and requires the two to agree.
pub fn solve_event_rates(matrix: &InterAreaMatrix, origination: &[f64]) -> Result<Vec<f64>> {
    let j = matrix.area_count();
    if origination.len() != j {
        return Err(ModelError::Dimension(format!(
            "origination length {} does not match area count {}",
            origination.len(),
            j
        )));
    }
    if origination.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(ModelError::domain(
            "origination rates must be finite and non-negative",
        ));
    }

    let p = DMatrix::from_row_slice(j, j, matrix.entries());
    let system = DMatrix::identity(j, j) - &p;
    let b = DVector::from_column_slice(origination);
    let direct = system
        .lu()
        .solve(&b)
        .ok_or_else(|| ModelError::domain("event-rate system is singular"))?;

    // Independent route: plain fixed-point iteration from the
    // origination vector.
    let mut x = b.clone();
    let mut converged = false;
    for _ in 0..FIXED_POINT_ITERATION_CAP {
        let next = &b + &p * &x;
        let scale = next.amax().max(1.0);
        let delta = (&next - &x).amax();
        x = next;
        if delta <= FIXED_POINT_TOLERANCE * scale {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(ModelError::NonConvergence { iterations: FIXED_POINT_ITERATION_CAP });
    }
    let scale = direct.amax().max(1.0);
    if (&direct - &x).amax() > SOLVER_AGREEMENT_TOLERANCE * scale {
        return Err(ModelError::domain(
            "direct solve and fixed-point iteration disagree",
        ));
    }
    Ok(direct.iter().copied().collect())
}

/// Per-area event and network-update rate vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct RateVectors {
    /// New active-life origination rate per area (`Y_I`).
    pub origination: Vec<f64>,
    /// Total event rate per area (`Y_a`), originations plus transfers.
    pub total: Vec<f64>,
    /// MSF-local update rate per area: `Y_a * E[M_c^I]`.
    pub local: Vec<f64>,
    /// Intra-area inter-MSF update rate per area: `Y_a * E[M_r^I]`.
    pub intra_area: Vec<f64>,
    /// Inter-area update rate per area: `P Y_a`.
    pub inter_area: Vec<f64>,
    /// `E[M_c^I]` the local vector was derived with.
    pub mean_cell_internal: f64,
    /// `E[M_r^I]` the intra-area vector was derived with.
    pub mean_region_internal: f64,
}

impl RateVectors {
    pub fn area_count(&self) -> usize {
        self.total.len()
    }

    /// Total network-update event rate per area: local + intra + inter.
    pub fn update_totals(&self) -> Vec<f64> {
        (0..self.total.len())
            .map(|i| self.local[i] + self.intra_area[i] + self.inter_area[i])
            .collect()
    }

    /// Share of the local update rate driven by in-area originations.
    pub fn local_from_origination(&self) -> Vec<f64> {
        self.origination.iter().map(|g| g * self.mean_cell_internal).collect()
    }

    /// Share of the local update rate driven by transfers from other
    /// areas.
    pub fn local_from_transfer(&self) -> Vec<f64> {
        self.transfer_inflow()
            .into_iter()
            .map(|g| g * self.mean_cell_internal)
            .collect()
    }

    /// Share of the intra-area update rate driven by in-area
    /// originations.
    pub fn intra_from_origination(&self) -> Vec<f64> {
        self.origination.iter().map(|g| g * self.mean_region_internal).collect()
    }

    /// Share of the intra-area update rate driven by transfers.
    pub fn intra_from_transfer(&self) -> Vec<f64> {
        self.transfer_inflow()
            .into_iter()
            .map(|g| g * self.mean_region_internal)
            .collect()
    }

    fn transfer_inflow(&self) -> Vec<f64> {
        (0..self.total.len()).map(|i| self.total[i] - self.origination[i]).collect()
    }
}

/// Derive the per-type network-update rates from the solved totals.
pub fn update_rates(
    total: &[f64],
    distributions: &CrossingDistributions,
    matrix: &InterAreaMatrix,
) -> Result<RateVectors> {
    if total.len() != matrix.area_count() {
        return Err(ModelError::Dimension(format!(
            "total rate length {} does not match area count {}",
            total.len(),
            matrix.area_count()
        )));
    }
    let inter_area = matrix.mul_vec(total)?;
    let origination: Vec<f64> =
        total.iter().zip(&inter_area).map(|(t, x)| t - x).collect();
    let local: Vec<f64> =
        total.iter().map(|t| t * distributions.mean_cell_internal).collect();
    let intra_area: Vec<f64> =
        total.iter().map(|t| t * distributions.mean_region_internal).collect();
    Ok(RateVectors {
        origination,
        total: total.to_vec(),
        local,
        intra_area,
        inter_area,
        mean_cell_internal: distributions.mean_cell_internal,
        mean_region_internal: distributions.mean_region_internal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::movement::{
        crossing_distributions, crossing_model, inter_area_matrix, mobility_params,
        CrossingMode,
    };
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn hop_model_examples() {
        let m = hop_count_model(20).unwrap();
        assert_eq!(m.mean(), 10.0);
        assert!(rel(m.state_probability(), 1.0 / 21.0) < 1e-15);

        let m = hop_count_model(10).unwrap();
        assert_eq!(m.mean(), 5.0);
        assert!(rel(m.variance(), 10.0) < 1e-12);

        let m = hop_count_model(1).unwrap();
        assert_eq!(m.stationary().len(), 2);
        assert_eq!(m.mean(), 0.5);

        assert!(hop_count_model(0).is_err());
    }

    #[test]
    fn hop_variance_is_uniform_moment() {
        // Independent oracle: raw second moment of the uniform
        // distribution on {0..D}.
        for d in 1..=50u32 {
            let m = hop_count_model(d).unwrap();
            let p = 1.0 / (f64::from(d) + 1.0);
            let second: f64 = (0..=d).map(|j| f64::from(j) * f64::from(j) * p).sum();
            let oracle = second - m.mean() * m.mean();
            assert!((m.variance() - oracle).abs() < 1e-9, "D={d}");
            let closed = f64::from(d) * (f64::from(d) + 2.0) / 12.0;
            assert!(rel(m.variance(), closed) < 1e-12, "D={d}");
        }
    }

    #[test]
    fn hop_stationary_solves_global_balance() {
        // Build the generator of the re-draw chain and solve pi Q = 0
        // numerically.
        for d in [1u32, 5, 10, 20] {
            let n = d as usize + 1;
            let model = hop_count_model(d).unwrap().with_dwell_rate(0.37, false);
            let q_rate = model.dwell_rate * model.transition_uniform();
            let mut gen = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        gen[(i, j)] = q_rate;
                    }
                }
                gen[(i, i)] = -(n as f64 - 1.0) * q_rate;
            }
            // Solve pi Q = 0 with sum(pi) = 1: replace one column by ones.
            let mut system = gen.transpose();
            for j in 0..n {
                system[(n - 1, j)] = 1.0;
            }
            let mut b = DVector::zeros(n);
            b[n - 1] = 1.0;
            let pi = system.lu().solve(&b).expect("balance system solvable");
            for (j, expect) in model.stationary().iter().enumerate() {
                assert!((pi[j] - expect).abs() < 1e-10, "D={d} state {j}");
            }
        }
    }

    #[test]
    fn mn_to_mn_rate_doubling_preserves_stationary_law() {
        let single = hop_count_model(12).unwrap().with_dwell_rate(0.2, false);
        let double = hop_count_model(12).unwrap().with_dwell_rate(0.2, true);
        assert_eq!(double.dwell_rate, 2.0 * single.dwell_rate);
        assert_eq!(single.stationary(), double.stationary());
        assert_eq!(single.mean(), double.mean());
        assert_eq!(single.variance(), double.variance());
    }

    fn table_setup(rho: f64) -> (Vec<f64>, CrossingDistributions, InterAreaMatrix) {
        let params = mobility_params(3600.0, rho).unwrap();
        let model = crossing_model(&params, 4, 5, CrossingMode::Approx).unwrap();
        let dists = crossing_distributions(&params, &model).unwrap();
        let pmf = dists.area_crossings;
        let matrix = inter_area_matrix(10, 2, move |k| pmf.pmf(k)).unwrap();
        let totals = solve_event_rates(&matrix, &[100.0; 10]).unwrap();
        (totals, dists, matrix)
    }

    #[test]
    fn zero_matrix_returns_origination() {
        let matrix = inter_area_matrix(6, 1, |_| 0.0).unwrap();
        let b = vec![5.0, 4.0, 3.0, 2.0, 1.0, 0.0];
        let y = solve_event_rates(&matrix, &b).unwrap();
        for (a, e) in y.iter().zip(&b) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn four_area_cycle_is_symmetric() {
        let matrix = inter_area_matrix(4, 1, |_| 0.2).unwrap();
        let y = solve_event_rates(&matrix, &[100.0; 4]).unwrap();
        // gamma = 100 + 0.4 gamma on every row by symmetry.
        for v in &y {
            assert!(rel(*v, 100.0 / 0.6) < 1e-10);
        }
    }

    #[test]
    fn ten_area_band_solution() {
        let (totals, _, matrix) = table_setup(0.01);
        // Frozen from an independent dense solve of the banded system
        // with A(1) = 0.23633474, A(2) = 0.09054019 (rho_c = 0.01
        // crossing model); corner rows carry a single wrap entry, so the
        // solution dips toward the corners.
        let expect = [
            239.180_4, 245.843_7, 271.176_3, 278.646_2, 282.368_2, 282.368_2,
            278.646_2, 271.176_3, 245.843_7, 239.180_4,
        ];
        for (a, e) in totals.iter().zip(expect) {
            assert!(rel(*a, e) < 1e-5, "{a} vs {e}");
        }
        // Interior rows see the full two-sided band, so the circulant
        // row-sum estimate bounds every entry from above.
        let circulant = 100.0
            / (1.0 - matrix.row_sum(4));
        for v in &totals {
            assert!(*v <= circulant * (1.0 + 1e-12));
        }
        assert!(rel(totals[4], circulant) < 0.05);
    }

    #[test]
    fn direct_and_fixed_point_agree_on_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for case in 0..100 {
            let j = rng.random_range(3..=50usize);
            let band = rng.random_range(1..=4u32);
            let scale: f64 = rng.random_range(0.01..0.4);
            let ratio: f64 = rng.random_range(0.1..0.9);
            let matrix = inter_area_matrix(j, band, |k| {
                scale * ratio.powi(k as i32) / (2.0 * band as f64)
            })
            .unwrap();
            let b: Vec<f64> = (0..j).map(|_| rng.random_range(0.0..500.0)).collect();
            let direct = solve_event_rates(&matrix, &b).unwrap();
            // Re-run the fixed point by hand as the reference route.
            let mut x = b.clone();
            for _ in 0..100_000 {
                let next: Vec<f64> = matrix
                    .mul_vec(&x)
                    .unwrap()
                    .iter()
                    .zip(&b)
                    .map(|(p, o)| p + o)
                    .collect();
                let delta = next
                    .iter()
                    .zip(&x)
                    .map(|(a, c)| (a - c).abs())
                    .fold(0.0f64, f64::max);
                x = next;
                if delta < 1e-13 {
                    break;
                }
            }
            for (a, e) in direct.iter().zip(&x) {
                assert!(
                    (a - e).abs() <= 1e-9 * e.abs().max(1.0),
                    "case {case}: {a} vs {e}"
                );
            }
        }
    }

    #[test]
    fn solver_rejects_bad_input() {
        let matrix = inter_area_matrix(4, 1, |_| 0.2).unwrap();
        assert!(matches!(
            solve_event_rates(&matrix, &[1.0, 2.0]),
            Err(ModelError::Dimension(_))
        ));
        assert!(solve_event_rates(&matrix, &[1.0, -2.0, 0.0, 0.0]).is_err());
        // Row sums exactly 1: construction passes, iteration cannot
        // converge.
        let critical = inter_area_matrix(4, 1, |_| 0.5).unwrap();
        assert!(matches!(
            solve_event_rates(&critical, &[1.0; 4]),
            Err(ModelError::NonConvergence { .. })
        ));
    }

    #[test]
    fn update_rate_vectors_satisfy_balance() {
        let (totals, dists, matrix) = table_setup(0.01);
        let rates = update_rates(&totals, &dists, &matrix).unwrap();
        for i in 0..rates.area_count() {
            // Y_a = Y_I + P Y_a componentwise.
            let back = rates.origination[i] + rates.inter_area[i];
            assert!(rel(back, rates.total[i]) < 1e-10);
            assert!(rel(rates.local[i], rates.total[i] * dists.mean_cell_internal) < 1e-12);
            assert!(
                rel(rates.intra_area[i], rates.total[i] * dists.mean_region_internal)
                    < 1e-12
            );
            assert!((rates.origination[i] - 100.0).abs() < 1e-7);
            // Eq-style decomposition: the origination and transfer
            // shares add back to the aggregates.
            assert!(
                rel(
                    rates.local_from_origination()[i] + rates.local_from_transfer()[i],
                    rates.local[i]
                ) < 1e-9
            );
            assert!(
                rel(
                    rates.intra_from_origination()[i] + rates.intra_from_transfer()[i],
                    rates.intra_area[i]
                ) < 1e-9
            );
        }
    }

    #[test]
    fn combined_update_rate_near_origination_at_unit_lmr() {
        let (totals, dists, matrix) = table_setup(1.0);
        let rates = update_rates(&totals, &dists, &matrix).unwrap();
        for u in rates.update_totals() {
            assert!(rel(u, 100.0) < 0.05, "{u}");
        }
    }

    #[test]
    fn local_rate_example_at_circulant_totals() {
        // 288.8 events per area with E[M_c^I] = 31.6 gives about 9127
        // local updates per area.
        let (_, dists, matrix) = table_setup(0.01);
        let totals = vec![288.808_547_485; 10];
        let rates = update_rates(&totals, &dists, &matrix).unwrap();
        for v in &rates.local {
            assert!(rel(*v, 9127.0) < 2e-3, "{v}");
        }
    }

    #[test]
    fn zero_matrix_gives_zero_inter_area_rate() {
        let matrix = inter_area_matrix(5, 1, |_| 0.0).unwrap();
        let params = mobility_params(3600.0, 0.5).unwrap();
        let model = crossing_model(&params, 4, 5, CrossingMode::Approx).unwrap();
        let dists = crossing_distributions(&params, &model).unwrap();
        let totals = solve_event_rates(&matrix, &[42.0; 5]).unwrap();
        let rates = update_rates(&totals, &dists, &matrix).unwrap();
        assert!(rates.inter_area.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rates_scale_linearly_with_origination() {
        let (_, dists, matrix) = table_setup(0.1);
        let y1 = solve_event_rates(&matrix, &[100.0; 10]).unwrap();
        let y3 = solve_event_rates(&matrix, &[300.0; 10]).unwrap();
        let r1 = update_rates(&y1, &dists, &matrix).unwrap();
        let r3 = update_rates(&y3, &dists, &matrix).unwrap();
        for i in 0..10 {
            assert!(rel(y3[i], 3.0 * y1[i]) < 1e-9);
            assert!(rel(r3.local[i], 3.0 * r1.local[i]) < 1e-9);
            assert!(rel(r3.inter_area[i], 3.0 * r1.inter_area[i]) < 1e-9);
        }
        // Componentwise monotonicity in the origination vector.
        let mut bumped = vec![100.0; 10];
        bumped[3] += 50.0;
        let yb = solve_event_rates(&matrix, &bumped).unwrap();
        for i in 0..10 {
            assert!(yb[i] >= y1[i] - 1e-12);
        }
    }
}
