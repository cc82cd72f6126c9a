//! Tomosynthesis scan geometry and construction of a centrosymmetric system
//! matrix.
//!
//! The scene is two-dimensional. The detector lies on `y = 0`, centred on a
//! vertical symmetry axis. The reconstruction region is an `n_x x n_y` grid
//! of square voxels whose lower boundary sits at `y = h_m`, also centred on
//! the axis. The emitter swings about a horizontal axis through the centre
//! of the object's lower boundary, at distance `h_e`, through angles
//! `-γ..=γ`.
//!
//! Emitter angles come in `±θ` pairs and detector bins are placed
//! symmetrically about the axis. With voxels in snake order (see
//! [`SnakeNumbering`]) the reflection of ray `i` is ray `M - i + 1` and the
//! reflection of voxel `j` is voxel `N - j + 1`, so the matrix satisfies
//! `w[i][j] == w[M-i+1][N-j+1]`. [`build_system`] traces only the first half
//! of the rays and fills the second half by that rule.
//!
//! Ray coordinates are measured from the symmetry axis, so mirroring a ray is
//! an exact sign flip.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::centro::{CentroSymmetricSystem, DEFAULT_SYMMETRY_TOL};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    /// Number of voxel columns (even).
    pub n_x: usize,
    /// Number of voxel rows.
    pub n_y: usize,
    /// Edge length of a square voxel in meters.
    pub voxel_size: f64,
    /// World x-coordinate of the symmetry axis, in meters. Tracing happens in
    /// axis-relative coordinates; this only positions exported geometry.
    pub center_x: f64,
    /// Height of the region's lower boundary above the detector, in meters.
    pub y_bottom: f64,
}

impl GridSpec {
    pub fn new(n_x: usize, n_y: usize, voxel_size: f64, y_bottom: f64) -> Result<Self> {
        let grid = Self {
            n_x,
            n_y,
            voxel_size,
            center_x: 0.0,
            y_bottom,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// A square region of side `object_size` split into `n x n` voxels.
    pub fn square(n: usize, object_size: f64, y_bottom: f64) -> Result<Self> {
        Self::new(n, n, object_size / n as f64, y_bottom)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_x == 0 || !self.n_x.is_multiple_of(2) {
            return Err(Error::Geometry(format!(
                "n_x must be even and positive, got {}",
                self.n_x
            )));
        }
        if self.n_y == 0 {
            return Err(Error::Geometry("n_y must be positive".into()));
        }
        if !(self.voxel_size > 0.0 && self.voxel_size.is_finite()) {
            return Err(Error::Geometry(format!(
                "voxel size must be positive, got {}",
                self.voxel_size
            )));
        }
        if !(self.y_bottom.is_finite() && self.center_x.is_finite()) {
            return Err(Error::Geometry("grid position must be finite".into()));
        }
        Ok(())
    }

    pub fn n_voxels(&self) -> usize {
        self.n_x * self.n_y
    }

    pub fn width(&self) -> f64 {
        self.n_x as f64 * self.voxel_size
    }

    pub fn height(&self) -> f64 {
        self.n_y as f64 * self.voxel_size
    }

    pub fn y_top(&self) -> f64 {
        self.y_bottom + self.height()
    }

    fn x_left(&self) -> f64 {
        -0.5 * self.width()
    }

    pub fn numbering(&self) -> SnakeNumbering {
        SnakeNumbering {
            n_x: self.n_x,
            n_y: self.n_y,
        }
    }
}

/// Vertical boustrophedon voxel numbering.
///
/// Columns `c` run left to right and rows `r` top to bottom, both 1-based.
/// Odd columns are numbered downwards, even columns upwards. For even `n_x`
/// this makes the left-right mirror of voxel `j` the voxel `N - j + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SnakeNumbering {
    n_x: usize,
    n_y: usize,
}

impl SnakeNumbering {
    pub fn new(n_x: usize, n_y: usize) -> Self {
        Self { n_x, n_y }
    }

    pub fn len(&self) -> usize {
        self.n_x * self.n_y
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, c: usize, r: usize) -> Result<usize> {
        if !(1..=self.n_x).contains(&c) || !(1..=self.n_y).contains(&r) {
            return Err(Error::Index(format!(
                "voxel ({c}, {r}) outside a {}x{} grid",
                self.n_x, self.n_y
            )));
        }
        Ok(self.index_unchecked(c, r))
    }

    fn index_unchecked(&self, c: usize, r: usize) -> usize {
        let base = (c - 1) * self.n_y;
        if c % 2 == 1 {
            base + r
        } else {
            base + self.n_y - r + 1
        }
    }

    pub fn inverse(&self, j: usize) -> Result<(usize, usize)> {
        if !(1..=self.len()).contains(&j) {
            return Err(Error::Index(format!(
                "voxel index {j} outside 1..={}",
                self.len()
            )));
        }
        let c = (j - 1) / self.n_y + 1;
        let k = (j - 1) % self.n_y + 1;
        let r = if c % 2 == 1 { k } else { self.n_y - k + 1 };
        Ok((c, r))
    }

    /// Reorders snake-ordered values into row-major (top row first).
    pub fn to_row_major<T: Copy>(&self, snake: &[T]) -> Vec<T> {
        assert_eq!(snake.len(), self.len(), "image length does not match grid");
        let mut out = Vec::with_capacity(snake.len());
        for r in 1..=self.n_y {
            for c in 1..=self.n_x {
                out.push(snake[self.index_unchecked(c, r) - 1]);
            }
        }
        out
    }

    /// Reorders row-major values into snake order.
    pub fn from_row_major<T: Copy + Default>(&self, row_major: &[T]) -> Vec<T> {
        assert_eq!(
            row_major.len(),
            self.len(),
            "image length does not match grid"
        );
        let mut out = vec![T::default(); row_major.len()];
        for r in 1..=self.n_y {
            for c in 1..=self.n_x {
                out[self.index_unchecked(c, r) - 1] = row_major[(r - 1) * self.n_x + (c - 1)];
            }
        }
        out
    }
}

pub fn snake_index(c: usize, r: usize, grid: &GridSpec) -> Result<usize> {
    grid.numbering().index(c, r)
}

pub fn snake_inverse(j: usize, grid: &GridSpec) -> Result<(usize, usize)> {
    grid.numbering().inverse(j)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanGeometry {
    /// Number of emitter positions (even).
    pub k: usize,
    /// Half-angle of the swing in radians.
    pub gamma: f64,
    /// Distance from the rotation axis (object lower boundary) to the emitter.
    pub h_e: f64,
    /// Distance from the object lower boundary down to the detector.
    pub h_m: f64,
    /// Detector extent.
    pub l_m: f64,
    /// Detector pixel count.
    pub n_p: usize,
    /// Focal spot size. Stored for completeness; pencil rays ignore it.
    pub a_e: f64,
    /// Number of equal-width readout bins across the detector. `None` picks
    /// bins about half a voxel wide, capped at `n_p`.
    pub detector_bins: Option<usize>,
}

impl Default for ScanGeometry {
    fn default() -> Self {
        Self {
            k: 24,
            gamma: 30f64.to_radians(),
            h_e: 1.0,
            h_m: 0.25,
            l_m: 0.43,
            n_p: 1024,
            a_e: 7e-4,
            detector_bins: None,
        }
    }
}

impl ScanGeometry {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Geometry(m));
        if self.k == 0 || !self.k.is_multiple_of(2) {
            return bad(format!(
                "emitter position count must be even and positive, got {}",
                self.k
            ));
        }
        if !(self.gamma > 0.0 && self.gamma < std::f64::consts::FRAC_PI_2) {
            return bad(format!(
                "gamma must lie in (0, 90) degrees, got {}",
                self.gamma.to_degrees()
            ));
        }
        for (name, v) in [("h_e", self.h_e), ("h_m", self.h_m), ("l_m", self.l_m)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.a_e >= 0.0 && self.a_e.is_finite()) {
            return bad(format!("a_e must be non-negative, got {}", self.a_e));
        }
        if self.n_p == 0 {
            return bad("n_p must be positive".into());
        }
        if let Some(b) = self.detector_bins {
            if b == 0 || b > self.n_p {
                return bad(format!(
                    "detector_bins must lie in 1..={}, got {b}",
                    self.n_p
                ));
            }
        }
        Ok(())
    }

    pub fn bins_for(&self, grid: &GridSpec) -> usize {
        self.detector_bins.unwrap_or_else(|| {
            let half_voxel = 0.5 * grid.voxel_size;
            ((self.l_m / half_voxel).ceil() as usize).clamp(1, self.n_p)
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Emitter {
    /// Inclination from vertical in radians.
    pub angle: f64,
    /// Horizontal offset from the symmetry axis.
    pub x: f64,
    pub y: f64,
}

/// `K` emitter positions at angles `-γ + (k-1)·2γ/(K-1)`.
///
/// The second half is produced by negating the first, so
/// `θ[k] == -θ[K-k+1]` holds exactly.
pub fn emitter_positions(geom: &ScanGeometry) -> Result<Vec<Emitter>> {
    geom.validate()?;
    let k = geom.k;
    let step = 2.0 * geom.gamma / (k - 1) as f64;
    let first: Vec<Emitter> = (0..k / 2)
        .map(|i| {
            let angle = -geom.gamma + i as f64 * step;
            Emitter {
                angle,
                x: geom.h_e * angle.sin(),
                y: geom.h_m + geom.h_e * angle.cos(),
            }
        })
        .collect();
    let second = first.iter().rev().map(|e| Emitter {
        angle: -e.angle,
        x: -e.x,
        y: e.y,
    });
    Ok(first.iter().copied().chain(second).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Ray {
    /// Emitter position, axis-relative.
    pub source: [f64; 2],
    /// Detector bin centre, axis-relative, on `y = 0`.
    pub target: [f64; 2],
    /// 1-based emitter position index.
    pub position: usize,
    /// 1-based detector bin index.
    pub bin: usize,
}

impl Ray {
    pub fn mirrored(&self, k: usize, bins: usize) -> Ray {
        Ray {
            source: [-self.source[0], self.source[1]],
            target: [-self.target[0], self.target[1]],
            position: k - self.position + 1,
            bin: bins - self.bin + 1,
        }
    }
}

/// Rays ordered position-major, bin-minor, left to right.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RaySet {
    pub rays: Vec<Ray>,
    pub detector_bins: usize,
}

impl RaySet {
    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }
}

/// Parameter interval `[t0, t1] ⊂ [0, 1]` of the segment inside the grid,
/// or `None` when the segment misses it.
fn clip_to_grid(ray: &Ray, grid: &GridSpec) -> Option<(f64, f64)> {
    let [sx, sy] = ray.source;
    let (dx, dy) = (ray.target[0] - sx, ray.target[1] - sy);
    let (x0, x1) = (grid.x_left(), -grid.x_left());
    let (y0, y1) = (grid.y_bottom, grid.y_top());
    let mut t0 = 0.0_f64;
    let mut t1 = 1.0_f64;
    for (d, lo, hi, s) in [(dx, x0, x1, sx), (dy, y0, y1, sy)] {
        if d == 0.0 {
            if s < lo || s > hi {
                return None;
            }
        } else {
            let (a, b) = ((lo - s) / d, (hi - s) / d);
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            t0 = t0.max(a);
            t1 = t1.min(b);
        }
    }
    (t1 > t0).then_some((t0, t1))
}

/// Length of the part of the ray inside the grid.
pub fn chord_length(ray: &Ray, grid: &GridSpec) -> f64 {
    let len = (ray.target[0] - ray.source[0]).hypot(ray.target[1] - ray.source[1]);
    clip_to_grid(ray, grid).map_or(0.0, |(t0, t1)| (t1 - t0) * len)
}

/// Rays whose chord is at most this fraction of a voxel edge are dropped.
const MIN_CHORD_FRACTION: f64 = 1e-9;

/// Enumerates the rays that cross the reconstruction region.
///
/// Only the first half of the emitter positions is tested; each surviving
/// ray keeps its mirror image, so ray `M - i + 1` is the reflection of ray
/// `i`.
pub fn enumerate_rays(geom: &ScanGeometry, grid: &GridSpec) -> Result<RaySet> {
    geom.validate()?;
    grid.validate()?;
    if geom.h_m != grid.y_bottom {
        return Err(Error::Geometry(format!(
            "grid lower boundary {} does not match h_m {}",
            grid.y_bottom, geom.h_m
        )));
    }
    let emitters = emitter_positions(geom)?;
    if emitters.iter().any(|e| e.y <= grid.y_top()) {
        return Err(Error::Geometry(
            "emitter passes through or below the top of the region".into(),
        ));
    }
    let bins = geom.bins_for(grid);
    let pitch = geom.l_m / bins as f64;
    let centre = 0.5 * (bins as f64 + 1.0);
    let min_chord = MIN_CHORD_FRACTION * grid.voxel_size;
    let mut first = Vec::new();
    for (k, e) in emitters.iter().take(geom.k / 2).enumerate() {
        for q in 1..=bins {
            let ray = Ray {
                source: [e.x, e.y],
                target: [(q as f64 - centre) * pitch, 0.0],
                position: k + 1,
                bin: q,
            };
            if chord_length(&ray, grid) > min_chord {
                first.push(ray);
            }
        }
    }
    if first.is_empty() {
        return Err(Error::EmptyRaySet);
    }
    let second: Vec<Ray> = first
        .iter()
        .rev()
        .map(|r| r.mirrored(geom.k, bins))
        .collect();
    first.extend(second);
    Ok(RaySet {
        rays: first,
        detector_bins: bins,
    })
}

/// Intersection lengths of a ray with every voxel it crosses, as 1-based
/// snake indices in increasing order.
///
/// The segment is cut at every grid line it crosses (parametric ray
/// traversal); each piece is assigned to the voxel containing its midpoint.
pub fn ray_weights(ray: &Ray, grid: &GridSpec) -> Result<Vec<(usize, f64)>> {
    let [sx, sy] = ray.source;
    let (dx, dy) = (ray.target[0] - sx, ray.target[1] - sy);
    let len = dx.hypot(dy);
    if len == 0.0 {
        return Err(Error::DegenerateRay);
    }
    let Some((t0, t1)) = clip_to_grid(ray, grid) else {
        return Ok(Vec::new());
    };
    let v = grid.voxel_size;
    let x_left = grid.x_left();
    let y_top = grid.y_top();

    let mut ts = Vec::with_capacity(grid.n_x + grid.n_y + 3);
    ts.push(t0);
    ts.push(t1);
    if dx != 0.0 {
        for c in 0..=grid.n_x {
            let t = (x_left + c as f64 * v - sx) / dx;
            if t > t0 && t < t1 {
                ts.push(t);
            }
        }
    }
    if dy != 0.0 {
        for r in 0..=grid.n_y {
            let t = (grid.y_bottom + r as f64 * v - sy) / dy;
            if t > t0 && t < t1 {
                ts.push(t);
            }
        }
    }
    ts.sort_by(f64::total_cmp);

    let numbering = grid.numbering();
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(ts.len());
    for w in ts.windows(2) {
        let seg = (w[1] - w[0]) * len;
        if seg <= 0.0 {
            continue;
        }
        let tm = 0.5 * (w[0] + w[1]);
        let (x, y) = (sx + tm * dx, sy + tm * dy);
        let c = (((x - x_left) / v).floor() as isize + 1).clamp(1, grid.n_x as isize) as usize;
        let r = (((y_top - y) / v).floor() as isize + 1).clamp(1, grid.n_y as isize) as usize;
        out.push((numbering.index_unchecked(c, r), seg));
    }
    out.sort_by_key(|&(j, _)| j);
    out.dedup_by(|b, a| {
        if a.0 == b.0 {
            a.1 += b.1;
            true
        } else {
            false
        }
    });
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SystemMetadata {
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
    pub fill_ratio: f64,
    pub emitter_positions: usize,
    pub detector_bins: usize,
    pub object_width: f64,
    pub object_height: f64,
    pub voxel_size: f64,
    pub geometry: ScanGeometry,
}

/// A traced system matrix with the geometry that produced it.
#[derive(Clone, Debug)]
pub struct TomoSystem {
    pub matrix: Matrix,
    pub rays: RaySet,
    pub grid: GridSpec,
    pub metadata: SystemMetadata,
}

impl TomoSystem {
    /// Attaches projection data, producing a checked system.
    pub fn with_rhs(&self, p: Vec<f64>) -> Result<CentroSymmetricSystem> {
        CentroSymmetricSystem::new(self.matrix.clone(), p, DEFAULT_SYMMETRY_TOL)
    }
}

fn trace_rows(rays: &[Ray], grid: &GridSpec) -> Result<Vec<Vec<(usize, f64)>>> {
    rays.par_iter()
        .map(|ray| {
            ray_weights(ray, grid).map(|row| row.into_iter().map(|(j, w)| (j - 1, w)).collect())
        })
        .collect()
}

/// Traces rows `1..=M/2` and fills the rest by `w[M-i+1][N-j+1] = w[i][j]`.
pub fn build_system(geom: &ScanGeometry, grid: &GridSpec) -> Result<TomoSystem> {
    let rays = enumerate_rays(geom, grid)?;
    let m = rays.len();
    let n = grid.n_voxels();
    let mut rows = trace_rows(&rays.rays[..m / 2], grid)?;
    let mirrored: Vec<Vec<(usize, f64)>> = rows
        .iter()
        .rev()
        .map(|row| row.iter().rev().map(|&(j, w)| (n - 1 - j, w)).collect())
        .collect();
    rows.extend(mirrored);
    let matrix = Matrix::from_sorted_rows(m, n, rows);
    let metadata = SystemMetadata {
        rows: m,
        cols: n,
        nnz: matrix.nnz(),
        fill_ratio: matrix.fill_ratio(),
        emitter_positions: geom.k,
        detector_bins: rays.detector_bins,
        object_width: grid.width(),
        object_height: grid.height(),
        voxel_size: grid.voxel_size,
        geometry: *geom,
    };
    Ok(TomoSystem {
        matrix,
        rays,
        grid: *grid,
        metadata,
    })
}

/// Traces every ray independently, mirror images included. Used to check
/// that the mirror fill of [`build_system`] matches the geometry.
pub fn trace_all_rows(rays: &RaySet, grid: &GridSpec) -> Result<Matrix> {
    let rows = trace_rows(&rays.rays, grid)?;
    Ok(Matrix::from_sorted_rows(rays.len(), grid.n_voxels(), rows))
}

/// Symmetric renumbering of a polar grid with `n_rings` rings of `n_sectors`
/// sectors.
///
/// The conventional numbering is ring-major: cell `(ring, sector)` has
/// number `(ring - 1) * n_sectors + sector`, with sectors counted
/// counter-clockwise starting at the symmetry axis. The mirror of sector `s`
/// across that axis is sector `n_sectors - s + 1`. The returned vector maps
/// each conventional number `c` to its new number `perm[c - 1]`; in the new
/// numbering cells `j` and `N - j + 1` are mirror images.
pub fn polar_symmetric_numbering(n_rings: usize, n_sectors: usize) -> Result<Vec<usize>> {
    if n_sectors == 0 || !n_sectors.is_multiple_of(2) {
        return Err(Error::Geometry(format!(
            "sector count must be even and positive, got {n_sectors}"
        )));
    }
    if n_rings == 0 {
        return Err(Error::Geometry("ring count must be positive".into()));
    }
    let n = n_rings * n_sectors;
    let half = n_sectors / 2;
    let mut perm = vec![0; n];
    for ring in 1..=n_rings {
        for s in 1..=half {
            let j = (ring - 1) * half + s;
            perm[(ring - 1) * n_sectors + s - 1] = j;
            perm[(ring - 1) * n_sectors + (n_sectors - s + 1) - 1] = n - j + 1;
        }
    }
    Ok(perm)
}

/// Conventional number of the mirror image of polar cell `c`.
pub fn polar_mirror(c: usize, n_sectors: usize) -> usize {
    let ring = (c - 1) / n_sectors;
    let s = (c - 1) % n_sectors + 1;
    ring * n_sectors + (n_sectors - s + 1)
}

fn validate_permutation(perm: &[usize], n: usize, what: &str) -> Result<()> {
    if perm.len() != n {
        return Err(Error::Permutation(format!(
            "{what} has length {}, expected {n}",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if !(1..=n).contains(&p) || std::mem::replace(&mut seen[p - 1], true) {
            return Err(Error::Permutation(format!(
                "{what} is not a permutation of 1..={n}"
            )));
        }
    }
    Ok(())
}

/// Inverse of a 1-based permutation.
pub fn invert_permutation(perm: &[usize]) -> Result<Vec<usize>> {
    validate_permutation(perm, perm.len(), "permutation")?;
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p - 1] = i + 1;
    }
    Ok(inv)
}

/// Renumbers rows and columns: old row `i` becomes row `row_perm[i - 1]`,
/// old column `j` becomes column `col_perm[j - 1]`.
pub fn apply_permutation(
    matrix: &Matrix,
    rhs: &[f64],
    row_perm: &[usize],
    col_perm: &[usize],
) -> Result<(Matrix, Vec<f64>)> {
    let (m, n) = matrix.shape();
    validate_permutation(row_perm, m, "row permutation")?;
    validate_permutation(col_perm, n, "column permutation")?;
    if rhs.len() != m {
        return Err(Error::DimensionMismatch {
            context: "right-hand side",
            expected: m,
            found: rhs.len(),
        });
    }
    let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
    let mut new_rhs = vec![0.0; m];
    for i in 0..m {
        let target = row_perm[i] - 1;
        new_rhs[target] = rhs[i];
        matrix.for_each_in_row(i, |j, v| per_row[target].push((col_perm[j] - 1, v)));
    }
    for row in &mut per_row {
        row.sort_by_key(|&(j, _)| j);
    }
    Ok((matrix.map_storage_like(per_row, m, n), new_rhs))
}

/// Geometry plus grid, as read from a key/value configuration file.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanConfig {
    pub geometry: ScanGeometry,
    pub grid: GridSpec,
    pub object_size: f64,
}

pub const DEFAULT_OBJECT_SIZE: f64 = 0.1;

impl Default for ScanConfig {
    fn default() -> Self {
        Self::table_case(32)
    }
}

impl ScanConfig {
    /// The `n x n` case of the benchmark series: `K = 3n/4` positions
    /// (24 for 32x32, 48 for 64x64, 96 for 128x128), default geometry.
    pub fn table_case(n: usize) -> Self {
        let geometry = ScanGeometry {
            k: (3 * n / 4).max(2).div_ceil(2) * 2,
            ..ScanGeometry::default()
        };
        let object_size = DEFAULT_OBJECT_SIZE;
        Self {
            grid: GridSpec {
                n_x: n,
                n_y: n,
                voxel_size: object_size / n as f64,
                center_x: 0.0,
                y_bottom: geometry.h_m,
            },
            geometry,
            object_size,
        }
    }

    /// Parses `key = value` lines. Blank lines and `#` comments are ignored;
    /// absent keys keep their defaults. Angles are in degrees.
    pub fn parse(text: &str) -> Result<Self> {
        let mut geometry = ScanGeometry::default();
        let mut object_size = DEFAULT_OBJECT_SIZE;
        let mut nx = 32usize;
        let mut ny = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Config(format!("line {}: {msg}", lineno + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let float = || {
                value
                    .parse::<f64>()
                    .map_err(|_| err(format!("`{key}` expects a number, got `{value}`")))
            };
            let int = || {
                value
                    .parse::<usize>()
                    .map_err(|_| err(format!("`{key}` expects an integer, got `{value}`")))
            };
            match key {
                "k" => geometry.k = int()?,
                "gamma_deg" => geometry.gamma = float()?.to_radians(),
                "h_e" => geometry.h_e = float()?,
                "h_m" => geometry.h_m = float()?,
                "l_m" => geometry.l_m = float()?,
                "n_p" => geometry.n_p = int()?,
                "a_e" => geometry.a_e = float()?,
                "det_bins" => geometry.detector_bins = Some(int()?),
                "grid_nx" => nx = int()?,
                "grid_ny" => ny = Some(int()?),
                "obj_size" => object_size = float()?,
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        if !(object_size > 0.0 && object_size.is_finite()) {
            return Err(Error::Config(format!(
                "obj_size must be positive, got {object_size}"
            )));
        }
        let grid = GridSpec {
            n_x: nx,
            n_y: ny.unwrap_or(nx),
            voxel_size: object_size / nx.max(1) as f64,
            center_x: 0.0,
            y_bottom: geometry.h_m,
        };
        geometry.validate()?;
        grid.validate()?;
        Ok(Self {
            geometry,
            grid,
            object_size,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::file(path))?;
        Self::parse(&text)
    }

    pub fn to_config_string(&self) -> String {
        let g = &self.geometry;
        let mut s = format!(
            "k = {}\ngamma_deg = {}\nh_e = {}\nh_m = {}\nl_m = {}\nn_p = {}\na_e = {}\ngrid_nx = {}\ngrid_ny = {}\nobj_size = {}\n",
            g.k,
            g.gamma.to_degrees(),
            g.h_e,
            g.h_m,
            g.l_m,
            g.n_p,
            g.a_e,
            self.grid.n_x,
            self.grid.n_y,
            self.object_size
        );
        if let Some(b) = g.detector_bins {
            s.push_str(&format!("det_bins = {b}\n"));
        }
        s
    }

    pub fn build(&self) -> Result<TomoSystem> {
        build_system(&self.geometry, &self.grid)
    }
}
