//! Shared fixtures for the benchmarks.

use attractor_core::{ConvexSet, Domain, Family, Mapping, Point};

pub fn point(v: &[f64]) -> Point {
    Point::new(v.to_vec()).expect("finite coordinates")
}

/// `T x = c x` on the cube `[-1, 1]^dim`.
pub fn scaled_cube(c: f64, dim: usize) -> Mapping {
    let domain = Domain::Box {
        lower: Point::new(vec![-1.0; dim]).unwrap(),
        upper: Point::new(vec![1.0; dim]).unwrap(),
    };
    Mapping::new(Family::Scale { factor: c }, domain).unwrap()
}

/// A rotation of the unit disc.
pub fn disc_rotation(angle: f64) -> Mapping {
    let disc = Domain::Ball {
        center: point(&[0.0, 0.0]),
        radius: 1.0,
    };
    Mapping::new(Family::Rotation2d { angle }, disc).unwrap()
}

/// Box `[0, 1]^dim` cut by the halfspace `sum x_i <= 1`, which needs Dykstra.
pub fn cut_cube(dim: usize) -> ConvexSet {
    let cube = ConvexSet::bounding_box(
        Point::new(vec![0.0; dim]).unwrap(),
        Point::new(vec![1.0; dim]).unwrap(),
    )
    .unwrap();
    let cut = ConvexSet::halfspace(Point::new(vec![1.0; dim]).unwrap(), 1.0).unwrap();
    ConvexSet::intersection(vec![cube, cut]).unwrap()
}
