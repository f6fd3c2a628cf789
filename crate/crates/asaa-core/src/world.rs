//! Egocentric occupancy grid and its Euclidean distance field.
//!
//! The grid is a fixed-size window of voxels that recenters on the robot
//! while cells stay anchored to world positions, so content survives
//! recentering at the same world coordinates. A cell counts as occupied
//! when it was hit within the last `occupied_window` seconds. Voxels
//! inside a reported dynamic-obstacle cylinder (inflated by one cell) are
//! forced free so moving obstacles never smear into the static map.
//!
//! The distance transform runs per axis on squared distances held in
//! integer units of the finest resolution, which keeps the field exactly
//! equal to a brute-force nearest-occupied-cell scan.

use crate::geometry::{Stamp, Vec3};
use alloc::vec;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;

#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct GridConfig {
    /// Horizontal window extent, m.
    pub side: f64,
    /// Horizontal cell size, m.
    pub resolution: f64,
    /// Vertical window extent, m.
    pub z_side: f64,
    /// Vertical cell size, m.
    pub z_resolution: f64,
    /// A hit keeps its cell occupied for this long, s.
    pub occupied_window: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            side: 6.4,
            resolution: 0.1,
            z_side: 3.2,
            z_resolution: 0.4,
            occupied_window: 1.0,
        }
    }
}

impl GridConfig {
    pub fn cells_xy(&self) -> usize {
        let n = self.side / self.resolution;
        debug_assert!((n - n.round()).abs() < 1e-9, "side must be a whole number of cells");
        n.round() as usize
    }

    pub fn cells_z(&self) -> usize {
        let n = self.z_side / self.z_resolution;
        debug_assert!((n - n.round()).abs() < 1e-9, "z_side must be a whole number of cells");
        n.round() as usize
    }

    /// Squared vertical cell size in units of the squared horizontal one.
    /// Whole by construction of the defaults; the integer distance
    /// transform depends on it.
    fn z_weight(&self) -> i64 {
        let r = self.z_resolution / self.resolution;
        let w = r * r;
        debug_assert!((w - w.round()).abs() < 1e-9, "z_resolution^2 must be a multiple of resolution^2");
        w.round() as i64
    }
}

/// Ground-anchored cylinder around a tracked obstacle whose voxels are
/// forced free on every scan.
#[derive(Clone, Copy, Debug)]
pub struct DynamicRegion {
    pub center: Vec3,
    pub radius: f64,
    pub height: f64,
}

#[derive(Clone, Debug)]
pub struct OccupancyGrid {
    cfg: GridConfig,
    /// Absolute index of the window's minimum corner cell.
    origin: [i64; 3],
    /// Last hit stamp per cell; never-hit cells hold -inf.
    stamps: Vec<f64>,
}

fn cell_of(p: Vec3, cfg: &GridConfig) -> [i64; 3] {
    [
        (p.x / cfg.resolution).floor() as i64,
        (p.y / cfg.resolution).floor() as i64,
        (p.z / cfg.z_resolution).floor() as i64,
    ]
}

impl OccupancyGrid {
    pub fn new(cfg: GridConfig, center: Vec3) -> Self {
        let n = cfg.cells_xy() * cfg.cells_xy() * cfg.cells_z();
        let mut grid = Self { cfg, origin: [0; 3], stamps: vec![f64::NEG_INFINITY; n] };
        grid.origin = grid.origin_for(center);
        grid
    }

    pub fn config(&self) -> &GridConfig {
        &self.cfg
    }

    fn dims(&self) -> [usize; 3] {
        [self.cfg.cells_xy(), self.cfg.cells_xy(), self.cfg.cells_z()]
    }

    fn origin_for(&self, center: Vec3) -> [i64; 3] {
        let c = cell_of(center, &self.cfg);
        let d = self.dims();
        [c[0] - d[0] as i64 / 2, c[1] - d[1] as i64 / 2, c[2] - d[2] as i64 / 2]
    }

    fn index_of(&self, cell: [i64; 3]) -> Option<usize> {
        let d = self.dims();
        let mut local = [0usize; 3];
        for a in 0..3 {
            let rel = cell[a] - self.origin[a];
            if rel < 0 || rel >= d[a] as i64 {
                return None;
            }
            local[a] = rel as usize;
        }
        Some((local[2] * d[1] + local[1]) * d[0] + local[0])
    }

    fn center_of_local(&self, x: usize, y: usize, z: usize) -> Vec3 {
        Vec3::new(
            (self.origin[0] + x as i64) as f64 * self.cfg.resolution + 0.5 * self.cfg.resolution,
            (self.origin[1] + y as i64) as f64 * self.cfg.resolution + 0.5 * self.cfg.resolution,
            (self.origin[2] + z as i64) as f64 * self.cfg.z_resolution + 0.5 * self.cfg.z_resolution,
        )
    }

    /// Moves the window so `center` sits in the middle cell, copying the
    /// overlap so surviving cells keep their world position.
    pub fn recenter(&mut self, center: Vec3) {
        let new_origin = self.origin_for(center);
        if new_origin == self.origin {
            return;
        }
        let d = self.dims();
        let mut fresh = vec![f64::NEG_INFINITY; self.stamps.len()];
        for z in 0..d[2] {
            for y in 0..d[1] {
                for x in 0..d[0] {
                    let cell = [
                        new_origin[0] + x as i64,
                        new_origin[1] + y as i64,
                        new_origin[2] + z as i64,
                    ];
                    if let Some(old) = self.index_of(cell) {
                        fresh[(z * d[1] + y) * d[0] + x] = self.stamps[old];
                    }
                }
            }
        }
        self.origin = new_origin;
        self.stamps = fresh;
    }

    /// One sensing cycle: recenter on the robot, stamp the cells of the
    /// scan points, then force voxels inside inflated dynamic cylinders
    /// free. Clearing runs last so it wins over a same-cycle hit.
    pub fn integrate_scan(
        &mut self,
        robot: Vec3,
        points: &[Vec3],
        dynamic_regions: &[DynamicRegion],
        now: Stamp,
    ) {
        self.recenter(robot);
        for &p in points {
            if let Some(i) = self.index_of(cell_of(p, &self.cfg)) {
                if self.stamps[i] < now {
                    self.stamps[i] = now;
                }
            }
        }
        for region in dynamic_regions {
            let r = region.radius + self.cfg.resolution;
            let lo = cell_of(
                Vec3::new(region.center.x - r, region.center.y - r, -self.cfg.z_resolution),
                &self.cfg,
            );
            let hi = cell_of(
                Vec3::new(
                    region.center.x + r,
                    region.center.y + r,
                    region.height + self.cfg.z_resolution,
                ),
                &self.cfg,
            );
            for cz in lo[2]..=hi[2] {
                for cy in lo[1]..=hi[1] {
                    for cx in lo[0]..=hi[0] {
                        let Some(i) = self.index_of([cx, cy, cz]) else { continue };
                        let x = (cx - self.origin[0]) as usize;
                        let y = (cy - self.origin[1]) as usize;
                        let z = (cz - self.origin[2]) as usize;
                        let c = self.center_of_local(x, y, z);
                        let dx = c.x - region.center.x;
                        let dy = c.y - region.center.y;
                        if dx * dx + dy * dy <= r * r
                            && c.z >= -self.cfg.z_resolution
                            && c.z <= region.height + self.cfg.z_resolution
                        {
                            self.stamps[i] = f64::NEG_INFINITY;
                        }
                    }
                }
            }
        }
    }

    pub fn is_occupied_cell(&self, cell: [i64; 3], now: Stamp) -> bool {
        self.index_of(cell)
            .map(|i| now - self.stamps[i] <= self.cfg.occupied_window)
            .unwrap_or(false)
    }

    pub fn is_occupied(&self, p: Vec3, now: Stamp) -> bool {
        self.is_occupied_cell(cell_of(p, &self.cfg), now)
    }

    pub fn occupied_count(&self, now: Stamp) -> usize {
        self.stamps.iter().filter(|&&s| now - s <= self.cfg.occupied_window).count()
    }

    /// Exact distance field: per cell, the Euclidean distance between
    /// cell centers to the nearest occupied cell; the window side when no
    /// cell is occupied.
    pub fn compute_edf(&self, now: Stamp) -> DistanceField {
        let d = self.dims();
        let mut units: Vec<i64> = self
            .stamps
            .iter()
            .map(|&s| if now - s <= self.cfg.occupied_window { 0 } else { UNITS_INF })
            .collect();

        let max_dim = d[0].max(d[1]).max(d[2]);
        let mut scratch = EdtScratch::new(max_dim);

        // z pass, then y, then x; strides follow the (z, y, x) layout.
        let wz = self.cfg.z_weight();
        for y in 0..d[1] {
            for x in 0..d[0] {
                let base = y * d[0] + x;
                scratch.run(&mut units, base, d[1] * d[0], d[2], wz);
            }
        }
        for z in 0..d[2] {
            for x in 0..d[0] {
                let base = z * d[1] * d[0] + x;
                scratch.run(&mut units, base, d[0], d[1], 1);
            }
        }
        for z in 0..d[2] {
            for y in 0..d[1] {
                let base = (z * d[1] + y) * d[0];
                scratch.run(&mut units, base, 1, d[0], 1);
            }
        }

        let res = self.cfg.resolution;
        let side = self.cfg.side;
        let dist = units
            .iter()
            .map(|&u| if u >= UNITS_INF { side } else { (u as f64).sqrt() * res })
            .collect();
        DistanceField { cfg: self.cfg, origin: self.origin, dims: d, dist }
    }

    /// Reference implementation for tests: all-pairs nearest occupied
    /// cell in the same integer units and conversion as `compute_edf`.
    #[doc(hidden)]
    pub fn brute_force_edf(&self, now: Stamp) -> DistanceField {
        let d = self.dims();
        let wz = self.cfg.z_weight();
        let mut occupied = Vec::new();
        for z in 0..d[2] {
            for y in 0..d[1] {
                for x in 0..d[0] {
                    let i = (z * d[1] + y) * d[0] + x;
                    if now - self.stamps[i] <= self.cfg.occupied_window {
                        occupied.push([x as i64, y as i64, z as i64]);
                    }
                }
            }
        }
        let res = self.cfg.resolution;
        let side = self.cfg.side;
        let mut dist = vec![side; self.stamps.len()];
        if !occupied.is_empty() {
            for z in 0..d[2] {
                for y in 0..d[1] {
                    for x in 0..d[0] {
                        let mut best = i64::MAX;
                        for o in &occupied {
                            let dx = x as i64 - o[0];
                            let dy = y as i64 - o[1];
                            let dz = z as i64 - o[2];
                            let u = dx * dx + dy * dy + wz * dz * dz;
                            if u < best {
                                best = u;
                            }
                        }
                        dist[(z * d[1] + y) * d[0] + x] = (best as f64).sqrt() * res;
                    }
                }
            }
        }
        DistanceField { cfg: self.cfg, origin: self.origin, dims: d, dist }
    }
}

/// Large finite sentinel for cells with no occupied source; never mixed
/// into envelope arithmetic.
const UNITS_INF: i64 = i64::MAX / 4;

/// Reused buffers for the one-dimensional squared-distance transform.
struct EdtScratch {
    line: Vec<i64>,
    out: Vec<i64>,
    hull: Vec<usize>,
    /// Boundary between hull parabolas as an exact rational num/den.
    bn: Vec<i64>,
    bd: Vec<i64>,
}

impl EdtScratch {
    fn new(n: usize) -> Self {
        Self {
            line: vec![0; n],
            out: vec![0; n],
            hull: vec![0; n],
            bn: vec![0; n + 1],
            bd: vec![1; n + 1],
        }
    }

    /// Lower envelope of parabolas with exact integer comparisons:
    /// out[i] = min over j of line[j] + w*(i-j)^2. Cells at UNITS_INF
    /// contribute no parabola.
    fn run(&mut self, data: &mut [i64], base: usize, stride: usize, n: usize, w: i64) {
        for i in 0..n {
            self.line[i] = data[base + i * stride];
        }
        let mut k = usize::MAX; // hull top; MAX = empty
        for q in 0..n {
            let fq = self.line[q];
            if fq >= UNITS_INF {
                continue;
            }
            loop {
                if k == usize::MAX {
                    k = 0;
                    self.hull[0] = q;
                    break;
                }
                let p = self.hull[k];
                let num = fq - self.line[p] + w * ((q * q - p * p) as i64);
                let den = 2 * w * (q - p) as i64;
                if k > 0
                    && (num as i128) * (self.bd[k] as i128) <= (self.bn[k] as i128) * (den as i128)
                {
                    k -= 1;
                    continue;
                }
                k += 1;
                self.hull[k] = q;
                self.bn[k] = num;
                self.bd[k] = den;
                break;
            }
        }
        if k == usize::MAX {
            return;
        }
        let top = k;
        let mut j = 0usize;
        for i in 0..n {
            while j < top && self.bn[j + 1] < (i as i64) * self.bd[j + 1] {
                j += 1;
            }
            let p = self.hull[j];
            let d = (i as i64) - (p as i64);
            self.out[i] = self.line[p] + w * d * d;
        }
        for i in 0..n {
            data[base + i * stride] = self.out[i];
        }
    }
}

#[derive(Clone, Debug)]
pub struct DistanceField {
    cfg: GridConfig,
    origin: [i64; 3],
    dims: [usize; 3],
    dist: Vec<f64>,
}

impl DistanceField {
    /// Distance of the cell containing `p`; the saturation value for
    /// points outside the window (unknown space counts as free).
    pub fn query(&self, p: Vec3) -> f64 {
        let cell = cell_of(p, &self.cfg);
        let mut local = [0usize; 3];
        for a in 0..3 {
            let rel = cell[a] - self.origin[a];
            if rel < 0 || rel >= self.dims[a] as i64 {
                return self.saturation();
            }
            local[a] = rel as usize;
        }
        self.dist[(local[2] * self.dims[1] + local[1]) * self.dims[0] + local[0]]
    }

    pub fn saturation(&self) -> f64 {
        self.cfg.side
    }

    #[doc(hidden)]
    pub fn raw(&self) -> &[f64] {
        &self.dist
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn small() -> GridConfig {
        GridConfig { side: 3.2, resolution: 0.1, z_side: 1.6, z_resolution: 0.4, occupied_window: 1.0 }
    }

    #[test]
    fn cell_counts_follow_the_config() {
        let cfg = GridConfig::default();
        assert_eq!(cfg.cells_xy(), 64);
        assert_eq!(cfg.cells_z(), 8);
        assert_eq!(cfg.z_weight(), 16);
    }

    #[test]
    fn a_scan_point_occupies_its_cell() {
        let mut g = OccupancyGrid::new(small(), Vec3::ZERO);
        let p = Vec3::new(0.55, -0.32, 0.3);
        g.integrate_scan(Vec3::ZERO, &[p], &[], 0.0);
        assert!(g.is_occupied(p, 0.0));
        assert!(!g.is_occupied(Vec3::new(1.0, 1.0, 0.3), 0.0));
    }

    #[test]
    fn hits_expire_after_the_window() {
        let mut g = OccupancyGrid::new(small(), Vec3::ZERO);
        let p = Vec3::new(0.5, 0.0, 0.2);
        g.integrate_scan(Vec3::ZERO, &[p], &[], 0.0);
        assert!(g.is_occupied(p, 1.0), "boundary is inclusive");
        assert!(!g.is_occupied(p, 1.001));
    }

    #[test]
    fn dynamic_clearing_wins_over_a_same_cycle_hit() {
        let mut g = OccupancyGrid::new(small(), Vec3::ZERO);
        let p = Vec3::new(0.5, 0.0, 0.2);
        let region = DynamicRegion { center: Vec3::new(0.5, 0.0, 0.9), radius: 0.3, height: 1.8 };
        g.integrate_scan(Vec3::ZERO, &[p], &[region], 0.0);
        assert!(!g.is_occupied(p, 0.0));

        // Same hit with the region elsewhere sticks.
        g.integrate_scan(
            Vec3::ZERO,
            &[p],
            &[DynamicRegion { center: Vec3::new(-1.0, 0.0, 0.9), radius: 0.3, height: 1.8 }],
            0.1,
        );
        assert!(g.is_occupied(p, 0.1));
    }

    #[test]
    fn recentering_keeps_world_positions() {
        let mut g = OccupancyGrid::new(small(), Vec3::ZERO);
        let p = Vec3::new(0.55, 0.25, 0.2);
        g.integrate_scan(Vec3::ZERO, &[p], &[], 0.0);
        g.integrate_scan(Vec3::new(0.1, 0.0, 0.0), &[], &[], 0.1);
        assert!(g.is_occupied(p, 0.1), "cell survived a one-cell move at its world spot");
        g.integrate_scan(Vec3::new(0.73, -0.41, 0.0), &[], &[], 0.2);
        assert!(g.is_occupied(p, 0.2));
        // Moving far enough drops it out of the window.
        g.integrate_scan(Vec3::new(5.0, 0.0, 0.0), &[], &[], 0.3);
        assert!(!g.is_occupied(p, 0.3));
    }

    #[test]
    fn single_cell_field_has_resolution_at_neighbors() {
        let mut g = OccupancyGrid::new(small(), Vec3::ZERO);
        let p = Vec3::new(0.05, 0.05, 0.2);
        g.integrate_scan(Vec3::ZERO, &[p], &[], 0.0);
        let f = g.compute_edf(0.0);
        assert_eq!(f.query(p), 0.0);
        assert_eq!(f.query(Vec3::new(0.15, 0.05, 0.2)), 0.1);
        assert_eq!(f.query(Vec3::new(-0.05, 0.05, 0.2)), 0.1);
        assert_eq!(f.query(Vec3::new(0.05, 0.15, 0.2)), 0.1);
        assert_eq!(f.query(Vec3::new(0.05, -0.05, 0.2)), 0.1);
        // Vertical neighbors sit one coarse cell away.
        assert_eq!(f.query(Vec3::new(0.05, 0.05, 0.6)), 0.4);
        let diag = f.query(Vec3::new(0.15, 0.15, 0.2));
        assert!((diag - 0.1 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn empty_grid_saturates_everywhere() {
        let g = OccupancyGrid::new(small(), Vec3::ZERO);
        let f = g.compute_edf(0.0);
        assert_eq!(f.query(Vec3::ZERO), 3.2);
        assert_eq!(f.query(Vec3::new(50.0, 0.0, 0.0)), 3.2, "outside the window");
        assert!(f.raw().iter().all(|&d| d == 3.2));
    }

    #[test]
    fn matches_brute_force_on_random_grids() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..12 {
            let mut g = OccupancyGrid::new(small(), Vec3::ZERO);
            let n = rng.gen_range(0..40);
            let pts: Vec<Vec3> = (0..n)
                .map(|_| {
                    Vec3::new(
                        rng.gen_range(-1.6..1.6),
                        rng.gen_range(-1.6..1.6),
                        rng.gen_range(-0.8..0.8),
                    )
                })
                .collect();
            g.integrate_scan(Vec3::ZERO, &pts, &[], 0.0);
            let fast = g.compute_edf(0.0);
            let slow = g.brute_force_edf(0.0);
            assert!(
                fast.raw().iter().zip(slow.raw()).all(|(a, b)| a == b),
                "field must equal brute force exactly"
            );
        }
    }

    #[test]
    fn field_is_lipschitz_between_neighbor_cells() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let cfg = small();
        let mut g = OccupancyGrid::new(cfg, Vec3::ZERO);
        let pts: Vec<Vec3> = (0..30)
            .map(|_| {
                Vec3::new(rng.gen_range(-1.6..1.6), rng.gen_range(-1.6..1.6), rng.gen_range(-0.8..0.8))
            })
            .collect();
        g.integrate_scan(Vec3::ZERO, &pts, &[], 0.0);
        let f = g.compute_edf(0.0);
        let (nx, ny, nz) = (cfg.cells_xy(), cfg.cells_xy(), cfg.cells_z());
        let at = |x: usize, y: usize, z: usize| f.raw()[(z * ny + y) * nx + x];
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    if x + 1 < nx {
                        assert!((at(x, y, z) - at(x + 1, y, z)).abs() <= cfg.resolution + 1e-12);
                    }
                    if y + 1 < ny {
                        assert!((at(x, y, z) - at(x, y + 1, z)).abs() <= cfg.resolution + 1e-12);
                    }
                    if z + 1 < nz {
                        assert!((at(x, y, z) - at(x, y, z + 1)).abs() <= cfg.z_resolution + 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn recomputing_changes_nothing() {
        let mut g = OccupancyGrid::new(small(), Vec3::ZERO);
        g.integrate_scan(Vec3::ZERO, &[Vec3::new(0.3, 0.3, 0.2)], &[], 0.0);
        let a = g.compute_edf(0.0);
        let b = g.compute_edf(0.0);
        assert_eq!(a.raw(), b.raw());
    }

    #[test]
    fn query_tracks_true_distance_near_an_obstacle() {
        // A filled box face one cell thick; queries next to it stay
        // within one cell of the continuous point-to-plane distance.
        let mut g = OccupancyGrid::new(small(), Vec3::ZERO);
        let mut pts = Vec::new();
        for ky in -10..=10 {
            for kz in 0..4 {
                pts.push(Vec3::new(1.0 + 0.05, ky as f64 * 0.1, kz as f64 * 0.4 + 0.2));
            }
        }
        g.integrate_scan(Vec3::ZERO, &pts, &[], 0.0);
        let f = g.compute_edf(0.0);
        for k in 1..8 {
            let p = Vec3::new(1.05 - k as f64 * 0.1, 0.05, 0.2);
            let truth = (k as f64) * 0.1;
            assert!((f.query(p) - truth).abs() <= 0.1 + 1e-12);
        }
    }
}
