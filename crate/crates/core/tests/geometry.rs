use cliffrac_core::error::Error;
use cliffrac_core::geometry::*;
use cliffrac_core::metrics::{box_counts, BoundaryOf};

fn p(c: &[f64]) -> Point {
    Point::from_f64(c)
}

#[test]
fn surface_spec_examples() {
    let s = build_surface_spec(1, 1.0, 1.0, 1).unwrap();
    let l = s.level(1);
    assert_eq!((l.a, l.c), (0.25, 0.125));
    assert_eq!(s.rectangle_list(1).unwrap().len(), 2);
    let s = build_surface_spec(2, 2.0, 3.0, 4).unwrap();
    let l = s.level(1);
    assert_eq!(l.a, 0.0625);
    assert!((l.c - 0.001953125).abs() < 1e-15);
    assert!(matches!(build_surface_spec(1, 0.5, 1.0, 1), Err(Error::InvalidParameter(_))));
}

#[test]
fn rectangle_examples() {
    let s = build_surface_spec(1, 1.0, 1.0, 1).unwrap();
    let r = s.rectangle_list(1).unwrap();
    assert_eq!(r[0], Rect::from_slices(&[0.625, 0.0], &[0.75, 0.5]).unwrap());
    assert_eq!(r[1], Rect::from_slices(&[0.875, 0.0], &[1.0, 0.5]).unwrap());
    assert_eq!(build_surface_spec(1, 2.0, 3.0, 1).unwrap().rectangle_list(1).unwrap().len(), 8);
    assert!(s.rectangle_list(0).is_err());
}

#[test]
fn membership_and_distance_examples() {
    let t = FractalSurface::new(build_surface_spec(1, 1.0, 1.0, 1).unwrap()).unwrap();
    assert!(membership(&t, &p(&[0.5, -0.5])));
    assert!(membership(&t, &p(&[0.7, 0.3])));
    assert!(!membership(&t, &p(&[0.5, 0.3])));
    assert!((distance_to_boundary(&t, &p(&[0.5, -1.1])) - 0.1).abs() < 1e-12);
    assert_eq!(distance_to_boundary(&t, &p(&[0.7, 0.5])), 0.0);
    assert_eq!(distance_to_boundary(&t, &p(&[0.625, 0.2])), 0.0);
}

#[test]
fn voxel_invariants() {
    let t = FractalSurface::new(build_surface_spec(1, 2.0, 3.0, 4).unwrap()).unwrap();
    let v = voxelize(&t, 7, &t.default_bounds()).unwrap();
    let counts = v.label_counts();
    assert_eq!(counts.iter().sum::<usize>(), v.len());
    for lin in 0..v.len() {
        let label = v.label(lin);
        assert_eq!(label.is_boundary(), t.cell_meets_boundary(&v.grid.cell(lin)));
        assert!(v.dist[lin] >= 0.0);
        assert_eq!(v.dist[lin] == 0.0, label.is_boundary(), "cell {lin}");
        if !label.is_boundary() {
            assert_eq!(label.is_inner(), t.contains(&v.center(lin)));
        }
    }
}

#[test]
fn voxel_boundary_matches_box_count() {
    let t = FractalSurface::new(build_surface_spec(1, 2.0, 3.0, 8).unwrap()).unwrap();
    let bounds = t.default_bounds();
    let v = voxelize(&t, 10, &bounds).unwrap();
    let n = box_counts(&BoundaryOf(&t), &bounds, 10, 10).unwrap()[0];
    assert_eq!(v.boundary_count() as u64, n);
}

#[test]
fn oversized_grids_are_rejected() {
    let b = Ball::unit(2);
    assert!(matches!(voxelize(&b, 11, &b.default_bounds()), Err(Error::GridTooLarge { .. })));
}

#[test]
fn ball_and_box_shapes() {
    let b = Ball::new(1, 2.0).unwrap();
    assert!(b.contains(&p(&[1.0, 1.0])) && !b.contains(&p(&[2.0, 0.1])));
    assert!((b.distance(&p(&[3.0, 0.0])) - 1.0).abs() < 1e-12);
    assert!(Ball::new(1, -1.0).is_err());
    let c = SolidBox::unit(1);
    assert!(c.contains(&p(&[1.0, 0.0])));
    assert!((c.distance(&p(&[0.5, 0.25])) - 0.25).abs() < 1e-12);
    assert!(!c.contains(&p(&[1.5, 0.5])));
}
