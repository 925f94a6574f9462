//! Composition of the public model operations for one experiment
//! configuration. Every value the harness emits is produced here by
//! calling the model crate; no formula is duplicated at this layer.

use hmlbn_model::error::ModelError;
use hmlbn_model::geometry::{build_area, build_region, AreaSpec};
use hmlbn_model::metrics::{
    handoff_life_metrics, handoff_times, mers_baseline, update_costs, CostBreakdown,
    HandoffReport, Scheme,
};
use hmlbn_model::movement::{
    crossing_distributions, crossing_model, inter_area_matrix, mobility_params,
    survivable_transitions, CrossingDistributions, CrossingModel, InterAreaMatrix,
    MobilityParams,
};
use hmlbn_model::sim::{simulate_movement, MovementSummary, SimConfig};
use hmlbn_model::traffic::{solve_event_rates, update_rates, RateVectors};

use crate::config::ExperimentConfig;

/// Everything the analytic chain derives for one Life-to-Mobility
/// Ratio.
pub struct Analysis {
    pub rho_c: f64,
    pub params: MobilityParams,
    pub model: CrossingModel,
    pub distributions: CrossingDistributions,
    /// Survivable-transition bound before band capping.
    pub survivable: u32,
    pub matrix: InterAreaMatrix,
    pub rates: RateVectors,
}

/// Run the analytic chain for one `rho_c`.
pub fn analyze(config: &ExperimentConfig, rho_c: f64) -> Result<Analysis, ModelError> {
    let params = mobility_params(config.mobility.mean_life_s, rho_c)?;
    let model = crossing_model(
        &params,
        config.geometry.rings,
        config.geometry.regions_per_side,
        config.analytic_mode,
    )?;
    let distributions = crossing_distributions(&params, &model)?;
    let survivable = match config.geometry.band {
        Some(k) => k,
        None => survivable_transitions(&model, params.life_rate, config.geometry.epsilon)?,
    };
    let pmf = distributions.area_crossings;
    let matrix =
        inter_area_matrix(config.geometry.area_count, survivable, move |k| pmf.pmf(k))?;
    let origination = vec![config.network.origination_rate; config.geometry.area_count];
    let totals = solve_event_rates(&matrix, &origination)?;
    let rates = update_rates(&totals, &distributions, &matrix)?;
    Ok(Analysis { rho_c, params, model, distributions, survivable, matrix, rates })
}

/// Hand-off reports for the three schemes at one analysis point.
pub fn scheme_reports(
    config: &ExperimentConfig,
    analysis: &Analysis,
) -> Result<[HandoffReport; 3], ModelError> {
    let costs = config.cost_params();
    let mut out = Vec::with_capacity(3);
    for scheme in [Scheme::Hmlbn, Scheme::Hmip, Scheme::Bmip] {
        let times = handoff_times(scheme, &costs)?;
        out.push(handoff_life_metrics(
            &times,
            &analysis.distributions,
            analysis.params.life_rate,
            config.interpretation,
        )?);
    }
    Ok([out[0], out[1], out[2]])
}

/// Cost breakdowns for the three schemes at one analysis point.
pub fn scheme_costs(
    config: &ExperimentConfig,
    analysis: &Analysis,
) -> Result<[CostBreakdown; 3], ModelError> {
    let costs = config.cost_params();
    Ok([
        update_costs(Scheme::Hmlbn, &analysis.rates, &costs)?,
        update_costs(Scheme::Hmip, &analysis.rates, &costs)?,
        update_costs(Scheme::Bmip, &analysis.rates, &costs)?,
    ])
}

/// Baseline combined update rate: the mean per-area update rate at
/// `rho_c = 1`.
pub fn mers(config: &ExperimentConfig) -> Result<f64, ModelError> {
    let analysis = analyze(config, 1.0)?;
    Ok(mers_baseline(&analysis.rates))
}

/// Area geometry derived from the configuration.
pub fn area_spec(config: &ExperimentConfig) -> Result<AreaSpec, ModelError> {
    let region = build_region(config.geometry.rings, config.geometry.cell_radius_km)?;
    build_area(config.geometry.regions_per_side, region)
}

/// Movement simulation for one `rho_c` under the configured mode and
/// seed.
pub fn simulate(
    config: &ExperimentConfig,
    rho_c: f64,
) -> Result<(Analysis, MovementSummary), ModelError> {
    let analysis = analyze(config, rho_c)?;
    let sim_config = SimConfig {
        seed: config.simulation.seed,
        life_count: config.simulation.life_count,
        worker_count: config.simulation.worker_count,
        mobility: analysis.params,
        area: area_spec(config)?,
        area_count: config.geometry.area_count,
        band: analysis.survivable,
        mode: config.simulation.mode,
    };
    let summary = simulate_movement(&sim_config, &analysis.model)?;
    Ok((analysis, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_chain_reproduces_known_anchors() {
        let config = ExperimentConfig::default();
        let analysis = analyze(&config, 0.01).unwrap();
        assert_eq!(analysis.distributions.mean_cell, 100.0);
        assert_eq!(analysis.survivable, 13);
        assert_eq!(analysis.matrix.band(), 4);
        let reports = scheme_reports(&config, &analysis).unwrap();
        assert!((reports[0].intensity - 0.0435).abs() < 0.002);
        let mers = mers(&config).unwrap();
        assert!((mers - 100.0).abs() < 5.0);
    }

    #[test]
    fn explicit_band_overrides_epsilon() {
        let mut config = ExperimentConfig::default();
        config.geometry.band = Some(2);
        let analysis = analyze(&config, 0.01).unwrap();
        assert_eq!(analysis.survivable, 2);
        assert_eq!(analysis.matrix.band(), 2);
    }
}
