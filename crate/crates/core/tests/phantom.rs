mod common;

use symsplit::centro::split_system;
use symsplit::example1 as ex;
use symsplit::geometry::{GridSpec, ScanConfig};
use symsplit::matrix::norm2;
use symsplit::phantom::{
    forward_project, phantom_ellipses, rasterize, shepp_logan_ellipses, symmetric_subset, Ellipse,
    GaussianNoise, PhantomKind,
};
use symsplit::pipeline::simulate;

/// Point-in-ellipse test with the rotation applied to the point rather than
/// the ellipse.
fn inside(e: &Ellipse, x: f64, y: f64) -> bool {
    let (s, c) = (-e.angle).sin_cos();
    let (dx, dy) = (x - e.center.0, y - e.center.1);
    let (u, v) = (c * dx - s * dy, s * dx + c * dy);
    (u / e.semi_axes.0).powi(2) + (v / e.semi_axes.1).powi(2) <= 1.0
}

#[test]
fn snake_image_unscrambles_to_a_raster_scan() {
    let ellipses = shepp_logan_ellipses();
    for (n_x, n_y) in [(32, 32), (16, 24), (24, 16)] {
        let grid = GridSpec::new(n_x, n_y, 0.01, 0.1).unwrap();
        let img = rasterize(&ellipses, &grid);
        let raster = grid.numbering().to_row_major(&img.values);
        let half = 0.5 * (n_x.max(n_y) as f64);
        let mut mismatches = 0;
        for r in 0..n_y {
            for c in 0..n_x {
                let x = (c as f64 + 0.5 - 0.5 * n_x as f64) / half;
                let y = (0.5 * n_y as f64 - r as f64 - 0.5) / half;
                let want: f64 = ellipses
                    .iter()
                    .filter(|e| inside(e, x, y))
                    .map(|e| e.density)
                    .sum();
                if (raster[r * n_x + c] - want).abs() > 1e-12 {
                    mismatches += 1;
                }
            }
        }
        // sample points landing on an ellipse boundary may round either way
        assert!(mismatches <= 2, "{n_x}x{n_y}: {mismatches} voxels differ");
    }
}

#[test]
fn symmetric_subset_is_closed_under_mirroring() {
    let all = shepp_logan_ellipses();
    let sym = symmetric_subset(&all);
    assert!(sym.len() < all.len());
    assert!(sym.len() >= 6);
    for e in &sym {
        assert!(sym
            .iter()
            .any(|o| o.center.0 == -e.center.0 && o.angle == -e.angle));
    }
}

#[test]
fn mirror_symmetric_phantom_has_no_antisymmetric_data() {
    let tomo = ScanConfig::table_case(32).build().unwrap();
    let img = rasterize(&symmetric_subset(&shepp_logan_ellipses()), &tomo.grid);
    let n = img.values.len();
    let asym = (0..n)
        .map(|j| (img.values[j] - img.values[n - 1 - j]).abs())
        .fold(0.0, f64::max);
    assert_eq!(asym, 0.0);
    let p = forward_project(&tomo.matrix, &img.values, None).unwrap();
    let m = p.len();
    for i in 0..m / 2 {
        assert!((p[i] - p[m - 1 - i]).abs() <= 1e-12 * norm2(&p));
    }
    let split = split_system(&tomo.with_rhs(p.clone()).unwrap());
    assert!(norm2(&split.p1) <= 1e-12 * norm2(&p));
    assert!(norm2(&split.p2) > 0.0);
}

#[test]
fn full_phantom_is_not_mirror_symmetric() {
    let sim = simulate(
        &ScanConfig::table_case(32),
        Some(PhantomKind::SheppLogan),
        None,
    )
    .unwrap();
    let split = split_system(&sim.system);
    assert!(norm2(&split.p1) > 1e-6 * norm2(sim.system.rhs()));
}

#[test]
fn seeded_noise_is_reproducible() {
    let tomo = ScanConfig::table_case(32).build().unwrap();
    let img = rasterize(
        &phantom_ellipses(PhantomKind::ModifiedSheppLogan),
        &tomo.grid,
    );
    let noise = |seed| Some(GaussianNoise { sigma: 0.01, seed });
    let a = forward_project(&tomo.matrix, &img.values, noise(7)).unwrap();
    let b = forward_project(&tomo.matrix, &img.values, noise(7)).unwrap();
    let c = forward_project(&tomo.matrix, &img.values, noise(8)).unwrap();
    let clean = forward_project(&tomo.matrix, &img.values, None).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    let dev: Vec<f64> = a.iter().zip(&clean).map(|(x, y)| x - y).collect();
    let rms = norm2(&dev) / (dev.len() as f64).sqrt();
    assert!((rms - 0.01).abs() < 0.002, "noise rms {rms}");
    let negative = Some(GaussianNoise {
        sigma: -1.0,
        seed: 0,
    });
    let bad = forward_project(&tomo.matrix, &img.values, negative);
    assert!(bad.is_err());
}

#[test]
fn unit_vector_projects_onto_a_column() {
    let a = ex::matrix();
    let mut e1 = vec![0.0; 6];
    e1[0] = 1.0;
    assert_eq!(
        forward_project(&a, &e1, None).unwrap(),
        vec![1.0, 2.0, 7.0, 1.0]
    );
    assert!(forward_project(&a, &[1.0; 5], None).is_err());
}
