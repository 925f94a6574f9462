//! Mobility Region / Mobility Area geometry and the random-walk graphs.
//!
//! A Mobility Region (MR) is an `L`-ring cluster of hexagonal RAN cells
//! served by one edge router; a Mobility Area (MA) is an `M x M` grid of
//! MRs. Movement inside an MR is a random walk on the hex adjacency
//! graph (interior degree 6, edge degree 4, corner degree 3); movement
//! between MRs inside an MA is a random walk on the king-move grid graph
//! (degrees 8, 5, 3). Both graphs have the standard random-walk
//! stationary distribution `pi_u = d_u / 2|E|`.

use crate::error::{ModelError, Result};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Geometry of a Mobility Region: an `L`-ring hexagonal cell cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSpec {
    /// Number of cell rings around the center cell (`L`).
    pub ring_count: u32,
    /// Hexagon cell radius in km (`r`).
    pub cell_radius_km: f64,
    /// Total number of cells, `N = 3L(L+1) + 1`.
    pub cell_count: u64,
    /// Cell height `r * sqrt(3) / 2` in km.
    pub cell_height_km: f64,
    /// Area of one hexagonal cell, `(3 sqrt(3) / 2) r^2`, in km^2.
    pub cell_area_km2: f64,
    /// Region coverage area `N * cell_area` in km^2.
    pub region_area_km2: f64,
    /// Circumradius of the region, `(sqrt(3)/2)(2L+1) r`, in km.
    pub circumradius_km: f64,
    /// Side of the equal-area approximating square in km.
    pub square_side_km: f64,
}

/// Build a [`RegionSpec`] from the ring count and cell radius.
pub fn build_region(ring_count: u32, cell_radius_km: f64) -> Result<RegionSpec> {
    if ring_count < 1 {
        return Err(ModelError::domain("ring_count must be >= 1"));
    }
    if cell_radius_km <= 0.0 || !cell_radius_km.is_finite() {
        return Err(ModelError::domain("cell_radius_km must be positive and finite"));
    }
    let l = u64::from(ring_count);
    let cell_count = 3 * l * (l + 1) + 1;
    let cell_area_km2 = 1.5 * SQRT3 * cell_radius_km * cell_radius_km;
    let circumradius_km = 0.5 * SQRT3 * (2.0 * ring_count as f64 + 1.0) * cell_radius_km;
    Ok(RegionSpec {
        ring_count,
        cell_radius_km,
        cell_count,
        cell_height_km: 0.5 * SQRT3 * cell_radius_km,
        cell_area_km2,
        region_area_km2: cell_count as f64 * cell_area_km2,
        circumradius_km,
        // The square has the same area as a hexagon with circumradius R.
        square_side_km: (1.5 * SQRT3).sqrt() * circumradius_km,
    })
}

/// Geometry of a Mobility Area: an `M x M` square grid of regions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaSpec {
    /// Regions per side (`M`).
    pub regions_per_side: u32,
    /// Region geometry the area is built from.
    pub region: RegionSpec,
    /// Total number of regions, `M^2`.
    pub region_count: u64,
    /// Exact coverage, `M^2 * A_r`, in km^2.
    pub area_km2: f64,
    /// Square-approximation coverage `(9 sqrt(3) / 8) [M r (2L+1)]^2` in km^2.
    pub area_square_approx_km2: f64,
}

/// Coverage report for a Mobility Area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaCoverage {
    /// `M^2 * A_r`: the canonical coverage number.
    pub area_exact_km2: f64,
    /// The square-of-squares approximation with the exact `9 sqrt(3) / 8`
    /// coefficient.
    pub area_approx_km2: f64,
}

/// Build an [`AreaSpec`] from the grid side and the underlying region.
pub fn build_area(regions_per_side: u32, region: RegionSpec) -> Result<AreaSpec> {
    if regions_per_side < 2 {
        return Err(ModelError::domain("regions_per_side must be >= 2"));
    }
    let m = f64::from(regions_per_side);
    let side = m * region.cell_radius_km * (2.0 * f64::from(region.ring_count) + 1.0);
    Ok(AreaSpec {
        regions_per_side,
        region,
        region_count: u64::from(regions_per_side) * u64::from(regions_per_side),
        area_km2: m * m * region.region_area_km2,
        area_square_approx_km2: (9.0 * SQRT3 / 8.0) * side * side,
    })
}

/// Both coverage figures for an area.
pub fn area_coverage(area: &AreaSpec) -> AreaCoverage {
    AreaCoverage {
        area_exact_km2: area.area_km2,
        area_approx_km2: area.area_square_approx_km2,
    }
}

/// Vertex-class counts, degrees and stationary probabilities of a
/// region or area walk graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkGraphSummary {
    /// Number of interior vertices.
    pub interior_vertices: u64,
    /// Number of edge (non-corner border) vertices.
    pub edge_vertices: u64,
    /// Number of corner vertices.
    pub corner_vertices: u64,
    /// Sum of all vertex degrees, `2|E|`.
    pub degree_sum: u64,
    /// Degree of an interior vertex.
    pub interior_degree: u32,
    /// Degree of an edge vertex.
    pub edge_degree: u32,
    /// Degree of a corner vertex.
    pub corner_degree: u32,
    /// Stationary probability of one interior vertex, `d / 2|E|`.
    pub pi_interior: f64,
    /// Stationary probability of one edge vertex.
    pub pi_edge: f64,
    /// Stationary probability of one corner vertex.
    pub pi_corner: f64,
    /// Alternative corner weight computed as if corners had degree 4,
    /// i.e. `4 / 2|E|`. Only set for the area graph; the 35/32
    /// coefficient of the exact area exit probability is derived with
    /// this weighting, so it is kept selectable next to the
    /// degree-consistent default.
    pub pi_corner_alt: Option<f64>,
}

impl WalkGraphSummary {
    /// Total stationary mass `sum(class_count * pi)`; equals 1 for the
    /// degree-consistent weights.
    pub fn stationary_total(&self) -> f64 {
        self.interior_vertices as f64 * self.pi_interior
            + self.edge_vertices as f64 * self.pi_edge
            + self.corner_vertices as f64 * self.pi_corner
    }

    /// Degree-sum identity check value `sum(class_count * degree)`.
    pub fn degree_total(&self) -> u64 {
        self.interior_vertices * u64::from(self.interior_degree)
            + self.edge_vertices * u64::from(self.edge_degree)
            + self.corner_vertices * u64::from(self.corner_degree)
    }
}

/// Walk graph of an `L`-ring Mobility Region.
///
/// Closed-form counts: `|V^I| = 3L(L-1)+1`, `|V^E| = 6(L-1)`,
/// `|V^C| = 6`, `2|E| = 6L(3L+1)`, with degrees 6/4/3.
pub fn region_graph(ring_count: u32) -> Result<WalkGraphSummary> {
    if ring_count < 1 {
        return Err(ModelError::domain("ring_count must be >= 1"));
    }
    let l = u64::from(ring_count);
    let degree_sum = 6 * l * (3 * l + 1);
    let inv = 1.0 / degree_sum as f64;
    Ok(WalkGraphSummary {
        interior_vertices: 3 * l * (l - 1) + 1,
        edge_vertices: 6 * (l - 1),
        corner_vertices: 6,
        degree_sum,
        interior_degree: 6,
        edge_degree: 4,
        corner_degree: 3,
        pi_interior: 6.0 * inv,
        pi_edge: 4.0 * inv,
        pi_corner: 3.0 * inv,
        pi_corner_alt: None,
    })
}

/// Walk graph of an `M x M` Mobility Area with king-move adjacency.
///
/// Closed-form counts: `|V^I| = (M-2)^2`, `|V^E| = 4(M-2)`, `|V^C| = 4`,
/// `2|E| = 4(2M-1)(M-1)`, with degrees 8/5/3.
pub fn area_graph(regions_per_side: u32) -> Result<WalkGraphSummary> {
    if regions_per_side < 2 {
        return Err(ModelError::domain("regions_per_side must be >= 2"));
    }
    let m = u64::from(regions_per_side);
    let degree_sum = 4 * (2 * m - 1) * (m - 1);
    let inv = 1.0 / degree_sum as f64;
    Ok(WalkGraphSummary {
        interior_vertices: (m - 2) * (m - 2),
        edge_vertices: 4 * (m - 2),
        corner_vertices: 4,
        degree_sum,
        interior_degree: 8,
        edge_degree: 5,
        corner_degree: 3,
        pi_interior: 8.0 * inv,
        pi_edge: 5.0 * inv,
        pi_corner: 3.0 * inv,
        pi_corner_alt: Some(4.0 * inv),
    })
}

/// Exhaustive graph constructions used as cross-checks for the
/// closed-form counters. These enumerate the actual tessellations and
/// never share code with the closed forms above.
pub mod bruteforce {
    /// Class counts obtained by enumerating a graph and classifying
    /// vertices by degree.
    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub struct GraphCounts {
        pub interior: u64,
        pub edge: u64,
        pub corner: u64,
        pub degree_sum: u64,
    }

    /// Axial-coordinate neighbor offsets of a hexagonal lattice.
    pub(crate) const HEX_DIRS: [(i64, i64); 6] =
        [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

    pub(crate) fn hex_distance(q: i64, r: i64) -> i64 {
        (q.abs() + r.abs() + (q + r).abs()) / 2
    }

    /// All axial cells of an `L`-ring hexagonal region.
    pub fn hex_cells(ring_count: u32) -> Vec<(i64, i64)> {
        let l = i64::from(ring_count);
        let mut cells = Vec::new();
        for q in -l..=l {
            for r in -l..=l {
                if hex_distance(q, r) <= l {
                    cells.push((q, r));
                }
            }
        }
        cells
    }

    /// Enumerate the `L`-ring hex region graph and count vertex classes
    /// by degree (6 interior, 4 edge, 3 corner).
    pub fn hex_region_counts(ring_count: u32) -> GraphCounts {
        let cells = hex_cells(ring_count);
        let set: std::collections::HashSet<(i64, i64)> = cells.iter().copied().collect();
        let mut counts = GraphCounts { interior: 0, edge: 0, corner: 0, degree_sum: 0 };
        for &(q, r) in &cells {
            let degree = HEX_DIRS
                .iter()
                .filter(|(dq, dr)| set.contains(&(q + dq, r + dr)))
                .count() as u64;
            counts.degree_sum += degree;
            match degree {
                6 => counts.interior += 1,
                4 => counts.edge += 1,
                3 => counts.corner += 1,
                d => unreachable!("hex region vertex with degree {d}"),
            }
        }
        counts
    }

    /// King-move neighbor offsets on a square grid.
    pub(crate) const KING_DIRS: [(i64, i64); 8] = [
        (1, 0),
        (1, 1),
        (0, 1),
        (-1, 1),
        (-1, 0),
        (-1, -1),
        (0, -1),
        (1, -1),
    ];

    /// Enumerate the `M x M` king-move grid graph and count vertex
    /// classes by degree (8 interior, 5 edge, 3 corner).
    pub fn king_area_counts(side: u32) -> GraphCounts {
        let m = i64::from(side);
        let mut counts = GraphCounts { interior: 0, edge: 0, corner: 0, degree_sum: 0 };
        for x in 0..m {
            for y in 0..m {
                let degree = KING_DIRS
                    .iter()
                    .filter(|(dx, dy)| {
                        let (nx, ny) = (x + dx, y + dy);
                        nx >= 0 && nx < m && ny >= 0 && ny < m
                    })
                    .count() as u64;
                counts.degree_sum += degree;
                match degree {
                    8 => counts.interior += 1,
                    5 => counts.edge += 1,
                    3 => counts.corner += 1,
                    d => unreachable!("king grid vertex with degree {d}"),
                }
            }
        }
        counts
    }
}
