//! Shepp–Logan phantom on a snake-numbered voxel grid, and forward
//! projection of images through a system matrix.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::GridSpec;
use crate::matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Ellipse {
    /// Centre in normalised `[-1, 1]²` coordinates, y pointing up.
    pub center: (f64, f64),
    pub semi_axes: (f64, f64),
    /// Counter-clockwise rotation in radians.
    pub angle: f64,
    pub density: f64,
}

impl Ellipse {
    pub fn new(center: (f64, f64), semi_axes: (f64, f64), angle_deg: f64, density: f64) -> Self {
        assert!(
            semi_axes.0 > 0.0 && semi_axes.1 > 0.0,
            "semi-axes must be positive"
        );
        Self {
            center,
            semi_axes,
            angle: angle_deg.to_radians(),
            density,
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (dx, dy) = (x - self.center.0, y - self.center.1);
        let (s, c) = self.angle.sin_cos();
        let u = (dx * c + dy * s) / self.semi_axes.0;
        let v = (-dx * s + dy * c) / self.semi_axes.1;
        u * u + v * v <= 1.0
    }
}

/// Shepp–Logan intensities. The geometry is shared; the modified set
/// (Toft) raises the contrast of the interior features.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PhantomKind {
    #[default]
    SheppLogan,
    ModifiedSheppLogan,
}

// (x, y, a, b, angle in degrees, original density, modified density)
const SHEPP_LOGAN_TABLE: [(f64, f64, f64, f64, f64, f64, f64); 10] = [
    (0.0, 0.0, 0.69, 0.92, 0.0, 2.0, 1.0),
    (0.0, -0.0184, 0.6624, 0.874, 0.0, -0.98, -0.8),
    (0.22, 0.0, 0.11, 0.31, -18.0, -0.02, -0.2),
    (-0.22, 0.0, 0.16, 0.41, 18.0, -0.02, -0.2),
    (0.0, 0.35, 0.21, 0.25, 0.0, 0.01, 0.1),
    (0.0, 0.1, 0.046, 0.046, 0.0, 0.01, 0.1),
    (0.0, -0.1, 0.046, 0.046, 0.0, 0.01, 0.1),
    (-0.08, -0.605, 0.046, 0.023, 0.0, 0.01, 0.1),
    (0.0, -0.606, 0.023, 0.023, 0.0, 0.01, 0.1),
    (0.06, -0.605, 0.023, 0.046, 0.0, 0.01, 0.1),
];

pub fn phantom_ellipses(kind: PhantomKind) -> Vec<Ellipse> {
    SHEPP_LOGAN_TABLE
        .iter()
        .map(|&(x, y, a, b, deg, orig, modified)| {
            let density = match kind {
                PhantomKind::SheppLogan => orig,
                PhantomKind::ModifiedSheppLogan => modified,
            };
            Ellipse::new((x, y), (a, b), deg, density)
        })
        .collect()
}

/// The standard ten-ellipse Shepp–Logan phantom.
pub fn shepp_logan_ellipses() -> Vec<Ellipse> {
    phantom_ellipses(PhantomKind::SheppLogan)
}

/// Keeps only the ellipses whose mirror image across the vertical axis is
/// also in the set (or that are their own mirror), giving a phantom that is
/// exactly left-right symmetric.
pub fn symmetric_subset(ellipses: &[Ellipse]) -> Vec<Ellipse> {
    ellipses
        .iter()
        .filter(|e| {
            ellipses.iter().any(|o| {
                o.center.0 == -e.center.0
                    && o.center.1 == e.center.1
                    && o.semi_axes == e.semi_axes
                    && o.angle == -e.angle
                    && o.density == e.density
            })
        })
        .copied()
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhantomImage {
    pub grid: GridSpec,
    /// Voxel values in snake order.
    pub values: Vec<f64>,
    pub value_range: (f64, f64),
}

/// Samples each voxel centre; the value is the summed density of the
/// ellipses containing it.
///
/// The grid's physical extent maps onto `[-1, 1]` along its longer side, and
/// both axes share that scale.
pub fn rasterize(ellipses: &[Ellipse], grid: &GridSpec) -> PhantomImage {
    let half = 0.5 * grid.width().max(grid.height());
    let numbering = grid.numbering();
    let mut row_major = Vec::with_capacity(grid.n_voxels());
    for r in 1..=grid.n_y {
        let y = (0.5 * grid.height() - (r as f64 - 0.5) * grid.voxel_size) / half;
        for c in 1..=grid.n_x {
            let x = ((c as f64 - 0.5) * grid.voxel_size - 0.5 * grid.width()) / half;
            row_major.push(
                ellipses
                    .iter()
                    .filter(|e| e.contains(x, y))
                    .map(|e| e.density)
                    .sum::<f64>(),
            );
        }
    }
    let values = numbering.from_row_major(&row_major);
    let value_range = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    PhantomImage {
        grid: *grid,
        values,
        value_range,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussianNoise {
    pub sigma: f64,
    pub seed: u64,
}

/// `p = A f`, plus optional seeded iid Gaussian noise.
pub fn forward_project(a: &Matrix, f: &[f64], noise: Option<GaussianNoise>) -> Result<Vec<f64>> {
    let mut p = a.matvec(f)?;
    if let Some(GaussianNoise { sigma, seed }) = noise {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::Config(format!(
                "noise sigma must be finite and non-negative, got {sigma}"
            )));
        }
        let dist =
            Normal::new(0.0, sigma).map_err(|e| Error::Config(format!("noise sigma: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in &mut p {
            *v += dist.sample(&mut rng);
        }
    }
    Ok(p)
}
