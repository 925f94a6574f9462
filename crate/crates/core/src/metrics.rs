//! Comparative metrics for the three mobility-management categories:
//! link counts and triangular-routing penalties, hand-off times and
//! intensity, and control-plane update costs.
//!
//! H-MLBN routes sessions on the optimal path; the Mobile IP categories
//! anchor traffic at one or two Home Agents, which lengthens the path
//! and adds per-hop delay and loss. Hand-off and cost formulas follow
//! the hand-off type mapping: cell-level, region-level and area-level
//! events map onto each category's own hand-off types.

use crate::error::{ModelError, Result};
use crate::movement::CrossingDistributions;
use crate::traffic::RateVectors;

/// Signaling, processing and link parameters of the cost model.
///
/// Delivery costs are expressed in byte-hops and processing costs in
/// instructions, built from the message-size/hop/instruction primitives
/// below. The classic cost elements map onto them as: radio
/// registration leg `s_r`, update over the LER-AMRR path `s_u h_1`,
/// over the AMRR-ALER path `s_u h_2` and between AMRRs `s_u h_3` (see
/// [`CostParams::delivery_elements`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams {
    /// Instructions for a local tracking operation at the LER (`L_0`).
    pub proc_local_instr: f64,
    /// Instructions for creating a network update at the LER (`L_1`).
    pub proc_ler_instr: f64,
    /// Instructions for reflecting an update at the AMRR (`L_2`).
    pub proc_amrr_instr: f64,
    /// Instructions for processing an update at the ALER (`L_3`).
    pub proc_aler_instr: f64,
    /// Radio link serving rate in bits/s (`R_r`). Not used by the
    /// implemented time formulas, retained for completeness.
    pub radio_rate_bps: f64,
    /// Wireline link serving rate in bits/s (`R_w`).
    pub wire_rate_bps: f64,
    /// Radio link latency in seconds (`d_r`). Retained for completeness.
    pub radio_latency_s: f64,
    /// Wireline link latency in seconds (`d_w`).
    pub wire_latency_s: f64,
    /// Average registration message size in bytes (`s_r`).
    pub registration_bytes: f64,
    /// Average network update message size in bytes (`s_u`).
    pub update_bytes: f64,
    /// Average links between LER and AMRR (`h_1`).
    pub hops_ler_amrr: f64,
    /// Average links between AMRR and ALER (`h_2`).
    pub hops_amrr_aler: f64,
    /// Average links between two AMRRs (`h_3`).
    pub hops_amrr_amrr: f64,
    /// Network processor speed in instructions per second.
    pub mips: f64,
    /// Session teardown / re-establishment interval in seconds (`T_st`).
    pub session_teardown_s: f64,
    /// Heartbeat interval in seconds (`t_h`).
    pub heartbeat_interval_s: f64,
    /// Heartbeat reply timeout in seconds (`t_o`).
    pub heartbeat_timeout_s: f64,
    /// Average per-hop packet delay in seconds (`delta`).
    pub hop_delay_s: f64,
    /// Per-hop packet loss probability (`p_l`).
    pub hop_loss: f64,
    /// Average session traffic rate in bits/s (`R`).
    pub session_rate_bps: f64,
    /// Composite-cost weight: instructions considered equivalent to one
    /// byte-hop. The default of 1 makes the composite a plain sum.
    pub instr_per_byte_hop: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        CostParams {
            proc_local_instr: 10.0,
            proc_ler_instr: 100.0,
            proc_amrr_instr: 100.0,
            proc_aler_instr: 100.0,
            radio_rate_bps: 2.0e6,
            wire_rate_bps: 1.0e8,
            radio_latency_s: 0.01,
            wire_latency_s: 2.0e-3,
            registration_bytes: 256.0,
            update_bytes: 512.0,
            hops_ler_amrr: 4.0,
            hops_amrr_aler: 2.0,
            hops_amrr_amrr: 6.0,
            mips: 1.0e6,
            session_teardown_s: 1.0,
            heartbeat_interval_s: 10.0,
            heartbeat_timeout_s: 3.0,
            hop_delay_s: 5.0e-3,
            hop_loss: 0.005,
            session_rate_bps: 64_000.0,
            instr_per_byte_hop: 1.0,
        }
    }
}

impl CostParams {
    /// Check the parameter invariants.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("proc_local_instr", self.proc_local_instr),
            ("proc_ler_instr", self.proc_ler_instr),
            ("proc_amrr_instr", self.proc_amrr_instr),
            ("proc_aler_instr", self.proc_aler_instr),
            ("radio_rate_bps", self.radio_rate_bps),
            ("wire_rate_bps", self.wire_rate_bps),
            ("radio_latency_s", self.radio_latency_s),
            ("wire_latency_s", self.wire_latency_s),
            ("registration_bytes", self.registration_bytes),
            ("update_bytes", self.update_bytes),
            ("hops_ler_amrr", self.hops_ler_amrr),
            ("hops_amrr_aler", self.hops_amrr_aler),
            ("hops_amrr_amrr", self.hops_amrr_amrr),
            ("mips", self.mips),
            ("heartbeat_interval_s", self.heartbeat_interval_s),
            ("hop_delay_s", self.hop_delay_s),
            ("hop_loss", self.hop_loss),
            ("session_rate_bps", self.session_rate_bps),
            ("instr_per_byte_hop", self.instr_per_byte_hop),
        ];
        for (name, value) in positive {
            if value <= 0.0 || !value.is_finite() {
                return Err(ModelError::Domain(format!("{name} must be positive")));
            }
        }
        if self.hop_loss >= 1.0 {
            return Err(ModelError::domain("hop_loss must be below 1"));
        }
        if self.heartbeat_timeout_s < 0.0 || self.session_teardown_s < 0.0 {
            return Err(ModelError::domain(
                "heartbeat_timeout_s and session_teardown_s must be non-negative",
            ));
        }
        if self.heartbeat_timeout_s >= self.heartbeat_interval_s {
            return Err(ModelError::domain(
                "heartbeat_timeout_s must be below heartbeat_interval_s",
            ));
        }
        Ok(())
    }

    /// Per-message delivery cost elements `(C_0, C_1, C_2, C_3)` in
    /// byte-hops: the radio registration leg and the update over each of
    /// the three wireline paths.
    pub fn delivery_elements(&self) -> (f64, f64, f64, f64) {
        (
            self.registration_bytes,
            self.update_bytes * self.hops_ler_amrr,
            self.update_bytes * self.hops_amrr_aler,
            self.update_bytes * self.hops_amrr_amrr,
        )
    }

    /// Per-link transfer-plus-latency time for one update message.
    fn update_link_time(&self) -> f64 {
        self.update_bytes * 8.0 / self.wire_rate_bps + self.wire_latency_s
    }
}

/// Mobility-management categories under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Hierarchical mobility label based network.
    Hmlbn,
    /// Hierarchical Mobile IP family (regional registration, MAP based,
    /// MPLS micro-mobility extensions).
    Hmip,
    /// Basic Mobile IP family.
    Bmip,
}

/// Session-path topology used for the link-count comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    /// Optimal routing.
    Hmlbn,
    /// Mobile IP with one Home Agent anchoring both endpoints.
    MipOneHa,
    /// Mobile IP with a Home Agent per endpoint.
    MipTwoHa,
}

/// Average session link count (access legs excluded) for a network of
/// maximum diameter `D > 1`.
pub fn link_count(max_diameter: u32, topology: Topology) -> Result<u64> {
    if max_diameter <= 1 {
        return Err(ModelError::domain("max_diameter must be above 1"));
    }
    let d = u64::from(max_diameter);
    Ok(match topology {
        // ceil(D/2 - 1)
        Topology::Hmlbn => (d - 2).div_ceil(2),
        // mean of the {0..2D} hop chain plus the home link
        Topology::MipOneHa => d,
        // ceil((3D + 1) / 2)
        Topology::MipTwoHa => (3 * d + 1).div_ceil(2),
    })
}

/// Network- and user-facing penalties of triangular routing relative to
/// the optimal path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoutingPenalty {
    /// Extra links occupied by the session.
    pub extra_links: u64,
    /// Excess link utilization `(Z_mip - Z_mlbn) R` in bits/s.
    pub excess_utilization_bps: f64,
    /// Additional one-way delay `(Z_mip - Z_mlbn) delta` in seconds.
    pub extra_delay_s: f64,
    /// Additional loss probability `1 - (1 - p_l)^(Z_mip - Z_mlbn)`.
    pub extra_loss: f64,
}

/// Penalties of a Mobile IP topology versus the optimal H-MLBN path.
pub fn routing_penalties(
    max_diameter: u32,
    topology: Topology,
    params: &CostParams,
) -> Result<RoutingPenalty> {
    if topology == Topology::Hmlbn {
        return Err(ModelError::domain(
            "penalties are defined relative to the optimal topology",
        ));
    }
    let base = link_count(max_diameter, Topology::Hmlbn)?;
    let mip = link_count(max_diameter, topology)?;
    let extra = mip - base;
    let extra_f = extra as f64;
    Ok(RoutingPenalty {
        extra_links: extra,
        excess_utilization_bps: extra_f * params.session_rate_bps,
        extra_delay_s: extra_f * params.hop_delay_s,
        extra_loss: 1.0 - (1.0 - params.hop_loss).powi(extra as i32),
    })
}

/// Mean hand-off detection time for heartbeat interval `t_h` and reply
/// timeout `t_o`: the mean residual life of the gap
/// `T_g ~ Uniform[t_h - t_o, t_h + t_o]`, which is
/// `t_h / 2 + t_o^2 / (6 t_h)`.
pub fn handoff_detection_time(
    heartbeat_interval_s: f64,
    heartbeat_timeout_s: f64,
) -> Result<f64> {
    if heartbeat_interval_s <= 0.0 || heartbeat_interval_s.is_nan() {
        return Err(ModelError::domain("heartbeat_interval_s must be positive"));
    }
    if heartbeat_timeout_s < 0.0 || heartbeat_timeout_s >= heartbeat_interval_s {
        return Err(ModelError::domain(
            "heartbeat_timeout_s must lie in [0, heartbeat_interval_s)",
        ));
    }
    Ok(heartbeat_interval_s / 2.0
        + heartbeat_timeout_s * heartbeat_timeout_s / (6.0 * heartbeat_interval_s))
}

/// Per-type hand-off times of one scheme, organized by the slot each
/// type occupies in the hand-off type mapping: cell-level,
/// region-level and area-level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeHandoffTimes {
    pub scheme: Scheme,
    /// Hand-off detection time `T_hd`.
    pub detection_s: f64,
    /// Serving-LER re-registration time `T_rr` (H-MLBN); folded into
    /// the per-type terms for the MIP categories.
    pub reregistration_s: f64,
    /// Network update component of the cell-level type.
    pub update_cell_s: f64,
    /// Network update component of the region-level type.
    pub update_region_s: f64,
    /// Network update component of the area-level type (session
    /// teardown included where it applies).
    pub update_area_s: f64,
    /// Total cell-level hand-off time.
    pub total_cell_s: f64,
    /// Total region-level hand-off time.
    pub total_region_s: f64,
    /// Total area-level hand-off time.
    pub total_area_s: f64,
}

/// Compute the per-type hand-off times of a scheme.
///
/// H-MLBN: the cell-level (local tracking) hand-off is executed by the
/// serving LER alone, so it carries only the re-registration time; the
/// region- and area-level types add detection and the network update.
/// The MIP categories always pay the detection time, and their
/// area-level (inter-HA) hand-off additionally pays two session
/// teardown intervals.
pub fn handoff_times(scheme: Scheme, params: &CostParams) -> Result<SchemeHandoffTimes> {
    params.validate()?;
    let detection =
        handoff_detection_time(params.heartbeat_interval_s, params.heartbeat_timeout_s)?;
    let link = params.update_link_time();
    let mips = params.mips;
    let (h1, h2, h3) =
        (params.hops_ler_amrr, params.hops_amrr_aler, params.hops_amrr_amrr);
    let l0 = params.proc_local_instr;
    let (l1, l2, l3) =
        (params.proc_ler_instr, params.proc_amrr_instr, params.proc_aler_instr);
    Ok(match scheme {
        Scheme::Hmlbn => {
            let rereg = l0 / mips;
            let intra = link * (h1 + h2) + (l1 + l2 + l3) / mips;
            let inter = link * (h1 + 3.0 * (h2 + h3)) + (l1 + 5.0 * l2 + 2.0 * l3) / mips;
            SchemeHandoffTimes {
                scheme,
                detection_s: detection,
                reregistration_s: rereg,
                update_cell_s: 0.0,
                update_region_s: intra,
                update_area_s: inter,
                total_cell_s: rereg,
                total_region_s: detection + rereg + intra,
                total_area_s: detection + rereg + inter,
            }
        }
        Scheme::Hmip => {
            let intra_rfa = 2.0 * link * h2 + 4.0 * l1 / mips;
            let inter_rfa = 4.0 * link * h2 + 6.0 * l1 / mips;
            let inter_ha =
                2.0 * params.session_teardown_s + 4.0 * link * h2 + 6.0 * l1 / mips;
            SchemeHandoffTimes {
                scheme,
                detection_s: detection,
                reregistration_s: 0.0,
                update_cell_s: intra_rfa,
                update_region_s: inter_rfa,
                update_area_s: inter_ha,
                total_cell_s: detection + intra_rfa,
                total_region_s: detection + inter_rfa,
                total_area_s: detection + inter_ha,
            }
        }
        Scheme::Bmip => {
            let intra_ha = 2.0 * link * h1 + 4.0 * l1 / mips;
            let inter_ha =
                2.0 * params.session_teardown_s + 2.0 * link * h1 + 4.0 * l1 / mips;
            SchemeHandoffTimes {
                scheme,
                detection_s: detection,
                reregistration_s: 0.0,
                update_cell_s: intra_ha,
                update_region_s: intra_ha,
                update_area_s: inter_ha,
                total_cell_s: detection + intra_ha,
                total_region_s: detection + intra_ha,
                total_area_s: detection + inter_ha,
            }
        }
    })
}

/// Which crossing expectations weight the MIP hand-off types.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpretation {
    /// Use the in-area expectations `E[M_c^I]`, `E[M_r^I]` for every
    /// scheme, exactly as the hand-off type mapping lists them.
    TableLiteral,
    /// Use the unscaled `E[M_c]`, `E[M_r]` for the MIP categories,
    /// which reproduces the reported MIP intensity levels.
    FigureMatch,
}

impl Interpretation {
    /// Canonical command-line token.
    pub fn token(&self) -> &'static str {
        match self {
            Interpretation::TableLiteral => "table2-literal",
            Interpretation::FigureMatch => "figure-match",
        }
    }
}

/// Lifetime hand-off metrics for one scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HandoffReport {
    pub times: SchemeHandoffTimes,
    pub interpretation: Interpretation,
    /// Expected cell-level hand-offs per active life used as the weight.
    pub cell_events: f64,
    /// Expected region-level hand-offs per active life.
    pub region_events: f64,
    /// Expected area-level hand-offs per active life.
    pub area_events: f64,
    /// Time spent in hand-off processing per active life, `T_ho^l` (s).
    pub lifetime_handoff_s: f64,
    /// Hand-off intensity `rho_h = lambda * T_ho^l`.
    pub intensity: f64,
}

/// Combine per-type times with the crossing expectations into the
/// lifetime hand-off total and intensity.
pub fn handoff_life_metrics(
    times: &SchemeHandoffTimes,
    distributions: &CrossingDistributions,
    life_rate: f64,
    interpretation: Interpretation,
) -> Result<HandoffReport> {
    if life_rate <= 0.0 || !life_rate.is_finite() {
        return Err(ModelError::domain("life_rate must be positive"));
    }
    let mip = times.scheme != Scheme::Hmlbn;
    let (cell_events, region_events) = match interpretation {
        Interpretation::FigureMatch if mip => {
            (distributions.mean_cell_only, distributions.mean_region_only)
        }
        _ => (distributions.mean_cell_internal, distributions.mean_region_internal),
    };
    let area_events = distributions.mean_area;
    let lifetime = cell_events * times.total_cell_s
        + region_events * times.total_region_s
        + area_events * times.total_area_s;
    Ok(HandoffReport {
        times: *times,
        interpretation,
        cell_events,
        region_events,
        area_events,
        lifetime_handoff_s: lifetime,
        intensity: life_rate * lifetime,
    })
}

/// Per-area control-plane cost vectors of one scheme.
///
/// Delivery costs are in byte-hops per unit time, processing costs in
/// instructions per unit time; the composite converts instructions to
/// byte-hop equivalents with the configured weight and adds the two.
#[derive(Debug, Clone, PartialEq)]
pub struct CostBreakdown {
    pub scheme: Scheme,
    pub delivery_local: Vec<f64>,
    pub delivery_intra: Vec<f64>,
    pub delivery_inter: Vec<f64>,
    pub processing_local: Vec<f64>,
    pub processing_intra: Vec<f64>,
    pub processing_inter: Vec<f64>,
    pub composite: Vec<f64>,
}

impl CostBreakdown {
    pub fn area_count(&self) -> usize {
        self.composite.len()
    }

    /// Combined delivery cost per area.
    pub fn delivery_total(&self) -> Vec<f64> {
        (0..self.area_count())
            .map(|i| self.delivery_local[i] + self.delivery_intra[i] + self.delivery_inter[i])
            .collect()
    }

    /// Combined processing cost per area.
    pub fn processing_total(&self) -> Vec<f64> {
        (0..self.area_count())
            .map(|i| {
                self.processing_local[i] + self.processing_intra[i] + self.processing_inter[i]
            })
            .collect()
    }

    fn mean(values: &[f64]) -> f64 {
        values.iter().sum::<f64>() / values.len() as f64
    }

    pub fn delivery_mean(&self) -> f64 {
        Self::mean(&self.delivery_total())
    }

    pub fn processing_mean(&self) -> f64 {
        Self::mean(&self.processing_total())
    }

    pub fn composite_mean(&self) -> f64 {
        Self::mean(&self.composite)
    }
}

/// Control-plane update costs of one scheme for the given rate vectors.
///
/// The MIP cost functions follow the per-category registration paths
/// (factor 2 for request/reply). The H-MLBN functions reuse its update
/// message paths: local updates need only the radio re-registration
/// leg, new originations propagate over `h_1 + h_2` links, intra-area
/// updates over `h_1 + h_2`, inter-area updates over
/// `h_1 + 3(h_2 + h_3)`, with the matching instruction counts.
pub fn update_costs(
    scheme: Scheme,
    rates: &RateVectors,
    params: &CostParams,
) -> Result<CostBreakdown> {
    params.validate()?;
    let j = rates.area_count();
    if [
        rates.origination.len(),
        rates.local.len(),
        rates.intra_area.len(),
        rates.inter_area.len(),
    ]
    .iter()
    .any(|&len| len != j)
    {
        return Err(ModelError::Dimension(
            "rate vectors must share one area count".into(),
        ));
    }
    let s_r = params.registration_bytes;
    let s_u = params.update_bytes;
    let (h1, h2, h3) =
        (params.hops_ler_amrr, params.hops_amrr_aler, params.hops_amrr_amrr);
    let l0 = params.proc_local_instr;
    let (l1, l2, l3) =
        (params.proc_ler_instr, params.proc_amrr_instr, params.proc_aler_instr);

    let mut breakdown = CostBreakdown {
        scheme,
        delivery_local: vec![0.0; j],
        delivery_intra: vec![0.0; j],
        delivery_inter: vec![0.0; j],
        processing_local: vec![0.0; j],
        processing_intra: vec![0.0; j],
        processing_inter: vec![0.0; j],
        composite: vec![0.0; j],
    };
    for i in 0..j {
        let g_orig = rates.origination[i];
        let g_local = rates.local[i];
        let g_intra = rates.intra_area[i];
        let g_inter = rates.inter_area[i];
        let (dl, di, dt, pl, pi, pt) = match scheme {
            Scheme::Hmlbn => (
                2.0 * s_r * (g_orig + g_local) + s_u * (h1 + h2) * g_orig,
                (2.0 * s_r + s_u * (h1 + h2)) * g_intra,
                (2.0 * s_r + s_u * (h1 + 3.0 * (h2 + h3))) * g_inter,
                (l1 + l2 + l3) * g_orig + l0 * g_local,
                (l1 + l2 + l3) * g_intra,
                (l1 + 5.0 * l2 + 2.0 * l3) * g_inter,
            ),
            Scheme::Hmip => (
                2.0 * (s_r + 2.0 * s_u * h2) * g_orig + 2.0 * (s_r + s_u * h2) * g_local,
                2.0 * (s_r + s_u * h2) * g_intra,
                2.0 * (s_r + 2.0 * s_u * h2) * g_inter,
                2.0 * l1 * (3.0 * g_orig + 2.0 * g_local),
                6.0 * l1 * g_intra,
                6.0 * l1 * g_inter,
            ),
            Scheme::Bmip => (
                2.0 * (s_r + s_u * h1) * (g_orig + g_local),
                0.0,
                2.0 * (s_r + s_u * h1) * g_inter,
                4.0 * l1 * (g_orig + g_local),
                0.0,
                4.0 * l1 * g_inter,
            ),
        };
        breakdown.delivery_local[i] = dl;
        breakdown.delivery_intra[i] = di;
        breakdown.delivery_inter[i] = dt;
        breakdown.processing_local[i] = pl;
        breakdown.processing_intra[i] = pi;
        breakdown.processing_inter[i] = pt;
        breakdown.composite[i] =
            dl + di + dt + (pl + pi + pt) / params.instr_per_byte_hop;
    }
    Ok(breakdown)
}

/// Baseline update rate: mean combined per-area update rate of the
/// supplied vectors. Feed it the rates computed at `rho_c = 1` to get
/// the minimum event rate of significance.
pub fn mers_baseline(rates: &RateVectors) -> f64 {
    let totals = rates.update_totals();
    totals.iter().sum::<f64>() / totals.len() as f64
}
