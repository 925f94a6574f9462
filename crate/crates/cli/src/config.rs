//! Experiment configuration: a flat sectioned key-value file with every
//! omitted field taking its standard default.
//!
//! The format is INI-style: `[section]` headers, one `key = value` pair
//! per line, `#` or `;` comments. Unknown sections and keys are
//! rejected with the offending line number; validation errors name the
//! violated `section.key`.

use serde::Serialize;
use thiserror::Error;

use hmlbn_model::metrics::{CostParams, Interpretation};
use hmlbn_model::movement::CrossingMode;
use hmlbn_model::sim::SimMode;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("validation error: {field}: {message}")]
    Validation { field: String, message: String },
}

fn invalid(field: &str, message: &str) -> ConfigError {
    ConfigError::Validation { field: field.into(), message: message.into() }
}

/// Coverage geometry: region rings, area grid and the inter-area cycle.
#[derive(Debug, Clone, Serialize)]
pub struct GeometryConfig {
    /// Region ring count `L`.
    pub rings: u32,
    /// Cell radius `r` in km.
    pub cell_radius_km: f64,
    /// Regions per area side `M`.
    pub regions_per_side: u32,
    /// Number of areas `J` in the coverage cycle.
    pub area_count: usize,
    /// Tail probability for the survivable-transition bound `K`.
    pub epsilon: f64,
    /// Optional explicit band `K`, overriding the epsilon-derived bound.
    pub band: Option<u32>,
}

/// Mobility model parameters.
#[derive(Debug, Clone, Serialize)]
pub struct MobilityConfig {
    /// Mean active life `T_l` in seconds.
    pub mean_life_s: f64,
    /// Life-to-Mobility Ratio sweep grid.
    pub rho_c: Vec<f64>,
}

/// Network topology parameters.
#[derive(Debug, Clone, Serialize)]
pub struct NetworkConfig {
    /// Maximum network diameter `D` in router hops.
    pub max_diameter: u32,
    /// Average links between LER and AMRR (`h_1`).
    pub h1: f64,
    /// Average links between AMRR and ALER (`h_2`).
    pub h2: f64,
    /// Average links between two AMRRs (`h_3`).
    pub h3: f64,
    /// New active-life origination rate per area per unit time.
    pub origination_rate: f64,
}

/// Signaling and processing cost parameters.
#[derive(Debug, Clone, Serialize)]
pub struct CostsConfig {
    pub s_u_bytes: f64,
    pub s_r_bytes: f64,
    pub d_w_s: f64,
    pub r_w_bps: f64,
    pub d_r_s: f64,
    pub r_r_bps: f64,
    pub t_h_s: f64,
    pub t_o_s: f64,
    pub mips: f64,
    pub l0_instr: f64,
    pub l1_instr: f64,
    pub l2_instr: f64,
    pub l3_instr: f64,
    pub t_st_s: f64,
    pub session_rate_bps: f64,
    pub hop_delay_s: f64,
    pub hop_loss: f64,
    pub instr_per_byte_hop: f64,
}

/// Simulation parameters.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationConfig {
    pub seed: u64,
    pub life_count: u64,
    pub worker_count: usize,
    /// `model-faithful` or `geometric`.
    #[serde(serialize_with = "serialize_sim_mode")]
    pub mode: SimMode,
}

fn serialize_sim_mode<S: serde::Serializer>(mode: &SimMode, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(mode.token())
}

/// Full experiment configuration with standard defaults for every
/// omitted field.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub geometry: GeometryConfig,
    pub mobility: MobilityConfig,
    pub network: NetworkConfig,
    pub costs: CostsConfig,
    pub simulation: SimulationConfig,
    /// Crossing-probability coefficient mode; set by `--mode`.
    #[serde(serialize_with = "serialize_crossing_mode")]
    pub analytic_mode: CrossingMode,
    /// MIP hand-off weighting; set by `--interpretation`.
    #[serde(serialize_with = "serialize_interpretation")]
    pub interpretation: Interpretation,
}

fn serialize_crossing_mode<S: serde::Serializer>(
    mode: &CrossingMode,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.serialize_str(match mode {
        CrossingMode::Approx => "paper-approx",
        CrossingMode::Exact => "exact",
    })
}

fn serialize_interpretation<S: serde::Serializer>(
    interp: &Interpretation,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.serialize_str(interp.token())
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            geometry: GeometryConfig {
                rings: 4,
                cell_radius_km: 5.0,
                regions_per_side: 5,
                area_count: 10,
                epsilon: 1e-3,
                band: None,
            },
            mobility: MobilityConfig {
                mean_life_s: 3600.0,
                rho_c: vec![
                    0.01, 0.017783, 0.031623, 0.056234, 0.1, 0.17783, 0.31623,
                    0.56234, 1.0, 1.7783, 3.1623, 5.6234, 10.0,
                ],
            },
            network: NetworkConfig {
                max_diameter: 20,
                h1: 4.0,
                h2: 2.0,
                h3: 6.0,
                origination_rate: 100.0,
            },
            costs: CostsConfig {
                s_u_bytes: 512.0,
                s_r_bytes: 256.0,
                d_w_s: 2e-3,
                r_w_bps: 1e8,
                d_r_s: 0.01,
                r_r_bps: 2e6,
                t_h_s: 10.0,
                t_o_s: 3.0,
                mips: 1e6,
                l0_instr: 10.0,
                l1_instr: 100.0,
                l2_instr: 100.0,
                l3_instr: 100.0,
                t_st_s: 1.0,
                session_rate_bps: 64_000.0,
                hop_delay_s: 5e-3,
                hop_loss: 0.005,
                instr_per_byte_hop: 1.0,
            },
            simulation: SimulationConfig {
                seed: 1,
                life_count: 100_000,
                worker_count: 4,
                mode: SimMode::ModelFaithful,
            },
            analytic_mode: CrossingMode::Approx,
            interpretation: Interpretation::TableLiteral,
        }
    }
}

impl ExperimentConfig {
    /// Parse a configuration text, starting from the defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut config = ExperimentConfig::default();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| ConfigError::Parse {
                    line: line_no,
                    message: "unterminated section header".into(),
                })?;
                section = name.trim().to_string();
                if !matches!(
                    section.as_str(),
                    "geometry" | "mobility" | "network" | "costs" | "simulation"
                ) {
                    return Err(ConfigError::Parse {
                        line: line_no,
                        message: format!("unknown section [{section}]"),
                    });
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Parse {
                line: line_no,
                message: "expected `key = value`".into(),
            })?;
            let key = key.trim();
            let value = value.trim();
            if section.is_empty() {
                return Err(ConfigError::Parse {
                    line: line_no,
                    message: format!("key `{key}` appears before any [section]"),
                });
            }
            config
                .apply(&section, key, value)
                .map_err(|message| ConfigError::Parse { line: line_no, message })?;
        }
        config.validate()?;
        Ok(config)
    }

    fn apply(&mut self, section: &str, key: &str, value: &str) -> Result<(), String> {
        match (section, key) {
            ("geometry", "L") => self.geometry.rings = parse(key, value)?,
            ("geometry", "r_km") => self.geometry.cell_radius_km = parse(key, value)?,
            ("geometry", "M") => self.geometry.regions_per_side = parse(key, value)?,
            ("geometry", "J") => self.geometry.area_count = parse(key, value)?,
            ("geometry", "epsilon") => self.geometry.epsilon = parse(key, value)?,
            ("geometry", "K") => self.geometry.band = Some(parse(key, value)?),
            ("mobility", "T_l_s") => self.mobility.mean_life_s = parse(key, value)?,
            ("mobility", "rho_c") => {
                self.mobility.rho_c = value
                    .split(',')
                    .map(|item| parse("rho_c", item.trim()))
                    .collect::<Result<Vec<f64>, _>>()?;
            }
            ("network", "D") => self.network.max_diameter = parse(key, value)?,
            ("network", "h1") => self.network.h1 = parse(key, value)?,
            ("network", "h2") => self.network.h2 = parse(key, value)?,
            ("network", "h3") => self.network.h3 = parse(key, value)?,
            ("network", "origination_rate") => {
                self.network.origination_rate = parse(key, value)?
            }
            ("costs", "s_u_bytes") => self.costs.s_u_bytes = parse(key, value)?,
            ("costs", "s_r_bytes") => self.costs.s_r_bytes = parse(key, value)?,
            ("costs", "d_w_s") => self.costs.d_w_s = parse(key, value)?,
            ("costs", "R_w_bps") => self.costs.r_w_bps = parse(key, value)?,
            ("costs", "d_r_s") => self.costs.d_r_s = parse(key, value)?,
            ("costs", "R_r_bps") => self.costs.r_r_bps = parse(key, value)?,
            ("costs", "t_h_s") => self.costs.t_h_s = parse(key, value)?,
            ("costs", "t_o_s") => self.costs.t_o_s = parse(key, value)?,
            ("costs", "mips") => self.costs.mips = parse(key, value)?,
            ("costs", "L0_instr") => self.costs.l0_instr = parse(key, value)?,
            ("costs", "L1_instr") => self.costs.l1_instr = parse(key, value)?,
            ("costs", "L2_instr") => self.costs.l2_instr = parse(key, value)?,
            ("costs", "L3_instr") => self.costs.l3_instr = parse(key, value)?,
            ("costs", "T_st_s") => self.costs.t_st_s = parse(key, value)?,
            ("costs", "session_rate_bps") => {
                self.costs.session_rate_bps = parse(key, value)?
            }
            ("costs", "hop_delay_s") => self.costs.hop_delay_s = parse(key, value)?,
            ("costs", "hop_loss") => self.costs.hop_loss = parse(key, value)?,
            ("costs", "instr_per_byte_hop") => {
                self.costs.instr_per_byte_hop = parse(key, value)?
            }
            ("simulation", "seed") => self.simulation.seed = parse(key, value)?,
            ("simulation", "life_count") => self.simulation.life_count = parse(key, value)?,
            ("simulation", "worker_count") => {
                self.simulation.worker_count = parse(key, value)?
            }
            ("simulation", "mode") => {
                self.simulation.mode = match value {
                    "model-faithful" => SimMode::ModelFaithful,
                    "geometric" => SimMode::Geometric,
                    other => {
                        return Err(format!(
                            "mode must be `model-faithful` or `geometric`, got `{other}`"
                        ))
                    }
                }
            }
            _ => return Err(format!("unknown key `{key}` in section [{section}]")),
        }
        Ok(())
    }

    /// Check every module precondition before any run.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let g = &self.geometry;
        if g.rings < 1 {
            return Err(invalid("geometry.L", "must be >= 1"));
        }
        if g.cell_radius_km <= 0.0 || g.cell_radius_km.is_nan() {
            return Err(invalid("geometry.r_km", "must be positive"));
        }
        if g.regions_per_side < 2 {
            return Err(invalid("geometry.M", "must be >= 2"));
        }
        if g.area_count < 3 {
            return Err(invalid("geometry.J", "must be >= 3 for a circular band"));
        }
        if g.epsilon.is_nan() || g.epsilon <= 0.0 || g.epsilon >= 1.0 {
            return Err(invalid("geometry.epsilon", "must lie in (0, 1)"));
        }
        if let Some(k) = g.band {
            if k < 1 {
                return Err(invalid("geometry.K", "must be >= 1"));
            }
        }
        let m = &self.mobility;
        if m.mean_life_s <= 0.0 || m.mean_life_s.is_nan() {
            return Err(invalid("mobility.T_l_s", "must be positive"));
        }
        if m.rho_c.is_empty() {
            return Err(invalid("mobility.rho_c", "needs at least one value"));
        }
        for &rho in &m.rho_c {
            if rho <= 0.0 || !rho.is_finite() {
                return Err(invalid("mobility.rho_c", "every value must be positive"));
            }
        }
        let n = &self.network;
        if n.max_diameter < 2 {
            return Err(invalid("network.D", "must be >= 2"));
        }
        for (name, v) in [("h1", n.h1), ("h2", n.h2), ("h3", n.h3)] {
            if v <= 0.0 || v.is_nan() {
                return Err(invalid(&format!("network.{name}"), "must be positive"));
            }
        }
        if n.origination_rate <= 0.0 || n.origination_rate.is_nan() {
            return Err(invalid("network.origination_rate", "must be positive"));
        }
        self.cost_params().validate().map_err(|e| ConfigError::Validation {
            field: "costs".into(),
            message: e.to_string(),
        })?;
        let s = &self.simulation;
        if s.life_count < 1 {
            return Err(invalid("simulation.life_count", "must be >= 1"));
        }
        if s.worker_count < 1 {
            return Err(invalid("simulation.worker_count", "must be >= 1"));
        }
        Ok(())
    }

    /// Project the cost section (plus the network hop counts) onto the
    /// model's cost parameters.
    pub fn cost_params(&self) -> CostParams {
        CostParams {
            proc_local_instr: self.costs.l0_instr,
            proc_ler_instr: self.costs.l1_instr,
            proc_amrr_instr: self.costs.l2_instr,
            proc_aler_instr: self.costs.l3_instr,
            radio_rate_bps: self.costs.r_r_bps,
            wire_rate_bps: self.costs.r_w_bps,
            radio_latency_s: self.costs.d_r_s,
            wire_latency_s: self.costs.d_w_s,
            registration_bytes: self.costs.s_r_bytes,
            update_bytes: self.costs.s_u_bytes,
            hops_ler_amrr: self.network.h1,
            hops_amrr_aler: self.network.h2,
            hops_amrr_amrr: self.network.h3,
            mips: self.costs.mips,
            session_teardown_s: self.costs.t_st_s,
            heartbeat_interval_s: self.costs.t_h_s,
            heartbeat_timeout_s: self.costs.t_o_s,
            hop_delay_s: self.costs.hop_delay_s,
            hop_loss: self.costs.hop_loss,
            session_rate_bps: self.costs.session_rate_bps,
            instr_per_byte_hop: self.costs.instr_per_byte_hop,
        }
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find(['#', ';']) {
        Some(pos) => &line[..pos],
        None => line,
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| format!("invalid value `{value}` for `{key}`: {e}"))
}
