//! CSV emission for the ten result figures and the run manifest.
//!
//! One CSV per figure (figure 18 produces three, one per crossing
//! level), each with a mandatory header row and numbers formatted to
//! six significant digits. Output is deterministic for a given
//! `(config, seed)` regardless of the simulation worker count.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use hmlbn_model::error::ModelError;
use hmlbn_model::metrics::{link_count, routing_penalties, Topology};
use hmlbn_model::movement::{estimate_speed, GeometricPmf};
use hmlbn_model::sim::EmpiricalPmf;

use crate::config::ExperimentConfig;
use crate::pipeline;

/// Errors of the figure runner.
#[derive(Debug, thiserror::Error)]
pub enum FigureError {
    #[error("unknown figure id `{0}` (expected 16..25)")]
    UnknownFigure(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Identifier of one result figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FigureId(pub u32);

impl FigureId {
    pub fn parse(text: &str) -> Result<Self, FigureError> {
        match text.parse::<u32>() {
            Ok(id) if (16..=25).contains(&id) => Ok(FigureId(id)),
            _ => Err(FigureError::UnknownFigure(text.to_string())),
        }
    }

    pub fn all() -> impl Iterator<Item = FigureId> {
        (16..=25).map(FigureId)
    }
}

/// Format a float with six significant digits, decimal notation inside
/// a sane magnitude window and scientific notation outside it.
pub fn format_sig(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let magnitude = value.abs().log10().floor() as i32;
    if (-4..6).contains(&magnitude) {
        let decimals = (5 - magnitude).max(0) as usize;
        format!("{value:.decimals$}")
    } else {
        format!("{value:.5e}")
    }
}

fn write_csv(path: &Path, header: &str, rows: &[Vec<String>]) -> Result<(), FigureError> {
    let mut text = String::with_capacity(rows.len() * 32 + header.len() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        let _ = writeln!(text, "{}", row.join(","));
    }
    fs::write(path, text).map_err(|source| FigureError::Io { path: path.to_path_buf(), source })
}

fn fig16(config: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>, FigureError> {
    let rows = config
        .mobility
        .rho_c
        .iter()
        .map(|&rho| {
            let speed = estimate_speed(
                rho,
                config.geometry.cell_radius_km,
                config.mobility.mean_life_s,
            );
            vec![format_sig(rho), format_sig(speed)]
        })
        .collect::<Vec<_>>();
    let path = out.join("figure16.csv");
    write_csv(&path, "rho_c,speed_kmh", &rows)?;
    Ok(vec![path])
}

fn fig17(config: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>, FigureError> {
    let mut rows = Vec::new();
    for &rho in &config.mobility.rho_c {
        let analysis = pipeline::analyze(config, rho)?;
        let d = &analysis.distributions;
        rows.push(vec![
            format_sig(rho),
            format_sig(d.mean_cell),
            format_sig(d.mean_region),
            format_sig(d.mean_area),
        ]);
    }
    let path = out.join("figure17.csv");
    write_csv(&path, "rho_c,E_C,E_R,E_A", &rows)?;
    Ok(vec![path])
}

/// Row horizon for the distribution overlays: cover the analytic mass
/// down to a 1e-6 tail and every observed value.
fn overlay_rows(
    rho: f64,
    analytic: &GeometricPmf,
    empirical: &EmpiricalPmf,
) -> Vec<Vec<String>> {
    let hi = analytic.horizon(1e-6).max(empirical.max_value().unwrap_or(0) + 1);
    (0..hi)
        .map(|k| {
            vec![
                format_sig(rho),
                k.to_string(),
                format_sig(analytic.pmf(k)),
                format_sig(empirical.frequency(k)),
            ]
        })
        .collect()
}

fn fig18(config: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>, FigureError> {
    let mut cell_rows = Vec::new();
    let mut region_rows = Vec::new();
    let mut area_rows = Vec::new();
    for &rho in &config.mobility.rho_c {
        let (analysis, summary) = pipeline::simulate(config, rho)?;
        let d = &analysis.distributions;
        cell_rows.extend(overlay_rows(rho, &d.cell_crossings, &summary.cell_pmf));
        region_rows.extend(overlay_rows(rho, &d.region_crossings, &summary.region_pmf));
        area_rows.extend(overlay_rows(rho, &d.area_crossings, &summary.area_pmf));
    }
    let header = "rho_c,k,analytic_p,empirical_p";
    let paths = [
        out.join("figure18a.csv"),
        out.join("figure18b.csv"),
        out.join("figure18c.csv"),
    ];
    write_csv(&paths[0], header, &cell_rows)?;
    write_csv(&paths[1], header, &region_rows)?;
    write_csv(&paths[2], header, &area_rows)?;
    Ok(paths.to_vec())
}

fn fig19(config: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>, FigureError> {
    let params = config.cost_params();
    let mut rows = Vec::new();
    for d in 2..=config.network.max_diameter {
        let z0 = link_count(d, Topology::Hmlbn)?;
        let z1 = link_count(d, Topology::MipOneHa)?;
        let z2 = link_count(d, Topology::MipTwoHa)?;
        let p1 = routing_penalties(d, Topology::MipOneHa, &params)?;
        let p2 = routing_penalties(d, Topology::MipTwoHa, &params)?;
        rows.push(vec![
            d.to_string(),
            z0.to_string(),
            z1.to_string(),
            z2.to_string(),
            format_sig(p1.excess_utilization_bps),
            format_sig(p2.excess_utilization_bps),
        ]);
    }
    let path = out.join("figure19.csv");
    write_csv(&path, "D,Z_mlbn,Z_mip1,Z_mip2,U_l_1,U_l_2", &rows)?;
    Ok(vec![path])
}

fn fig20(config: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>, FigureError> {
    let params = config.cost_params();
    let mut rows = Vec::new();
    for d in 2..=config.network.max_diameter {
        let p1 = routing_penalties(d, Topology::MipOneHa, &params)?;
        let p2 = routing_penalties(d, Topology::MipTwoHa, &params)?;
        rows.push(vec![
            d.to_string(),
            format_sig(p1.extra_delay_s),
            format_sig(p2.extra_delay_s),
            format_sig(p1.extra_loss),
            format_sig(p2.extra_loss),
        ]);
    }
    let path = out.join("figure20.csv");
    write_csv(&path, "D,delay_1ha,delay_2ha,loss_1ha,loss_2ha", &rows)?;
    Ok(vec![path])
}

fn fig21(config: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>, FigureError> {
    let mut rows = Vec::new();
    for &rho in &config.mobility.rho_c {
        let analysis = pipeline::analyze(config, rho)?;
        let [mlbn, hmip, bmip] = pipeline::scheme_reports(config, &analysis)?;
        rows.push(vec![
            format_sig(rho),
            format_sig(mlbn.intensity),
            format_sig(hmip.intensity),
            format_sig(bmip.intensity),
        ]);
    }
    let path = out.join("figure21.csv");
    write_csv(&path, "rho_c,rho_h_mlbn,rho_h_hmip,rho_h_bmip", &rows)?;
    Ok(vec![path])
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn fig22(config: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>, FigureError> {
    let mers = pipeline::mers(config)?;
    let mut rows = Vec::new();
    for &rho in &config.mobility.rho_c {
        let analysis = pipeline::analyze(config, rho)?;
        rows.push(vec![
            format_sig(rho),
            format_sig(mean(&analysis.rates.local)),
            format_sig(mean(&analysis.rates.intra_area)),
            format_sig(mean(&analysis.rates.inter_area)),
            format_sig(mers),
        ]);
    }
    let path = out.join("figure22.csv");
    write_csv(&path, "rho_c,rate_LA,rate_IA,rate_TA,MERS", &rows)?;
    Ok(vec![path])
}

/// Which cost aggregate a figure plots.
#[derive(Clone, Copy)]
enum CostKind {
    Delivery,
    Processing,
    Composite,
}

fn fig_costs(
    config: &ExperimentConfig,
    out: &Path,
    figure: u32,
    kind: CostKind,
) -> Result<Vec<PathBuf>, FigureError> {
    let mut rows = Vec::new();
    for &rho in &config.mobility.rho_c {
        let analysis = pipeline::analyze(config, rho)?;
        let breakdowns = pipeline::scheme_costs(config, &analysis)?;
        let mut row = vec![format_sig(rho)];
        for b in &breakdowns {
            let value = match kind {
                CostKind::Delivery => b.delivery_mean(),
                CostKind::Processing => b.processing_mean(),
                CostKind::Composite => b.composite_mean(),
            };
            row.push(format_sig(value));
        }
        rows.push(row);
    }
    let path = out.join(format!("figure{figure}.csv"));
    write_csv(&path, "rho_c,cost_mlbn,cost_hmip,cost_bmip", &rows)?;
    Ok(vec![path])
}

/// Produce the CSV file(s) of one figure. Returns the written paths.
pub fn run_figure(
    id: FigureId,
    config: &ExperimentConfig,
    out: &Path,
) -> Result<Vec<PathBuf>, FigureError> {
    match id.0 {
        16 => fig16(config, out),
        17 => fig17(config, out),
        18 => fig18(config, out),
        19 => fig19(config, out),
        20 => fig20(config, out),
        21 => fig21(config, out),
        22 => fig22(config, out),
        23 => fig_costs(config, out, 23, CostKind::Delivery),
        24 => fig_costs(config, out, 24, CostKind::Processing),
        25 => fig_costs(config, out, 25, CostKind::Composite),
        other => Err(FigureError::UnknownFigure(other.to_string())),
    }
}

/// One manifest entry per produced figure.
#[derive(Debug, Serialize)]
pub struct ManifestFigure {
    pub id: u32,
    pub files: Vec<String>,
    pub wall_ms: u128,
}

/// Machine-readable record of a full run.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub seed: u64,
    pub versions: ManifestVersions,
    pub config: ExperimentConfig,
    pub figures: Vec<ManifestFigure>,
}

#[derive(Debug, Serialize)]
pub struct ManifestVersions {
    pub model: &'static str,
    pub harness: &'static str,
}

/// Run every figure and write `manifest.json` last; a failed figure
/// leaves no manifest behind.
pub fn run_all(config: &ExperimentConfig, out: &Path) -> Result<Manifest, FigureError> {
    let mut figures = Vec::new();
    for id in FigureId::all() {
        let start = Instant::now();
        let files = run_figure(id, config, out)?;
        figures.push(ManifestFigure {
            id: id.0,
            files: files
                .iter()
                .map(|p| p.file_name().unwrap_or_default().to_string_lossy().into_owned())
                .collect(),
            wall_ms: start.elapsed().as_millis(),
        });
    }
    let manifest = Manifest {
        seed: config.simulation.seed,
        versions: ManifestVersions {
            model: hmlbn_model::VERSION,
            harness: env!("CARGO_PKG_VERSION"),
        },
        config: config.clone(),
        figures,
    };
    let path = out.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest)
        .expect("manifest serialization cannot fail");
    fs::write(&path, text).map_err(|source| FigureError::Io { path, source })?;
    Ok(manifest)
}

/// Write the per-life simulation records as a columnar CSV.
pub fn write_records(
    records: &[hmlbn_model::sim::LifeRecord],
    path: &Path,
) -> Result<(), FigureError> {
    let rows: Vec<Vec<String>> = records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            vec![
                i.to_string(),
                r.cell_crossings.to_string(),
                r.region_crossings.to_string(),
                r.area_crossings.to_string(),
                format_sig(r.life_duration_s),
            ]
        })
        .collect();
    write_csv(path, "seed_index,C,R,A,duration", &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(866.0254037844), "866.025");
        assert_eq!(format_sig(0.0123456789), "0.0123457");
        assert_eq!(format_sig(100.0), "100.000");
        assert_eq!(format_sig(-0.030000000000000002), "-0.0300000");
        assert_eq!(format_sig(12345678.0), "1.23457e7");
        assert_eq!(format_sig(3.2e-7), "3.20000e-7");
    }

    #[test]
    fn figure_id_parsing() {
        assert!(FigureId::parse("16").is_ok());
        assert!(FigureId::parse("25").is_ok());
        assert!(FigureId::parse("15").is_err());
        assert!(FigureId::parse("26").is_err());
        assert!(FigureId::parse("abc").is_err());
        assert_eq!(FigureId::all().count(), 10);
    }
}
