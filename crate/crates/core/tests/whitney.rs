use cliffrac_core::clifford::{BladeIndex, Multivector};
use cliffrac_core::geometry::{Point, Rect};
use cliffrac_core::metrics::ols;
use cliffrac_core::whitney::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn circle(count: usize, r: f64) -> Vec<Point> {
    (0..count)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
            Point::from_f64(&[r * t.cos(), r * t.sin()])
        })
        .collect()
}

fn sphere_points(count: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let v = Point::from_f64(&[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
        let r = v.norm();
        if r > 0.1 && r <= 1.0 {
            out.push(v.scale(1.0 / r));
        }
    }
    out
}

fn quadratic(n: usize) -> Polynomial {
    let m = n + 1;
    let mut terms = vec![(MultiIndex::zero(m), Multivector::scalar(n, 0.5))];
    terms.push((MultiIndex::unit(m, 0), Multivector::basis(n, 1).scale(2.0)));
    terms.push((MultiIndex::unit(m, 1), Multivector::scalar(n, -1.0)));
    let mut e = [0u8; 9];
    e[0] = 1;
    e[1] = 1;
    terms.push((MultiIndex::new(&e[..m]), Multivector::scalar(n, 0.75)));
    e = [0u8; 9];
    e[m - 1] = 2;
    terms.push((MultiIndex::new(&e[..m]), Multivector::basis(n, n).scale(-0.3)));
    Polynomial::new(n, terms).unwrap()
}

#[test]
fn bold_f_examples() {
    let pts = circle(16, 1.0);
    let id = LipschitzJet::from_polynomial(&Polynomial::identity(1), 2, 1.0, pts.clone()).unwrap();
    let f0 = assemble_bold_f(&id, 0).unwrap();
    for (p, v) in pts.iter().zip(&f0) {
        assert_eq!(*v, p.to_multivector());
    }
    for v in assemble_bold_f(&id, 1).unwrap() {
        assert!(v.is_zero(), "{v:?}");
    }
    let c = Multivector::from_coeffs(1, vec![1.5, -2.0]).unwrap();
    let constant = LipschitzJet::from_polynomial(&Polynomial::constant(c.clone()), 3, 0.5, pts).unwrap();
    for i in 1..=2 {
        assert!(assemble_bold_f(&constant, i).unwrap().iter().all(|v| v.is_zero()));
    }
    assert!(assemble_bold_f(&constant, 3).is_err());
}

#[test]
fn bold_f_is_the_dirac_of_the_source() {
    let p = quadratic(2);
    let pts = sphere_points(10, 1);
    let jet = LipschitzJet::from_polynomial(&p, 3, 1.0, pts.clone()).unwrap();
    let bold = assemble_bold_f(&jet, 1).unwrap();
    for (x, b) in pts.iter().zip(&bold) {
        let mut d = Multivector::zero(2);
        for j in 0..=2 {
            let dj = p.derivative(&MultiIndex::unit(3, j), x);
            dj.left_blade_acc(if j == 0 { BladeIndex::SCALAR } else { BladeIndex::generator(j) }, 1.0, &mut d);
        }
        assert!(d.distance(b) < 1e-12);
    }
}

#[test]
fn decomposition_of_a_point() {
    let b = Rect::centered_cube(1, 1.0);
    let origin = Carrier::points(vec![Point::from_f64(&[0.0, 0.0])]).unwrap();
    let cubes = whitney_decompose(&b, &origin, 8).unwrap();
    assert!(!cubes.is_empty());
    let covered: f64 = cubes.iter().map(|c| c.cell.volume()).sum();
    assert!((covered - 4.0).abs() < 1e-12);
    for c in &cubes {
        let d = origin.distance_to_rect(&c.cell);
        if c.collar {
            assert_eq!(c.level, 8);
            assert!(d < c.cell.diam());
        } else {
            assert!(d >= c.cell.diam() && d <= 4.0 * c.cell.diam(), "{c:?}");
        }
    }
    let max_level = cubes.iter().map(|c| c.level).max().unwrap();
    let min_level = cubes.iter().map(|c| c.level).min().unwrap();
    assert_eq!(max_level, 8);
    assert!(min_level <= 2);
}

#[test]
fn decomposition_of_full_bounds_is_empty() {
    let b = Rect::centered_cube(1, 1.0);
    assert!(whitney_decompose(&b, &Carrier::region(b), 6).unwrap().is_empty());
    assert!(Carrier::points(vec![]).is_err());
}

#[test]
fn proportionality_audit() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pts: Vec<Point> =
        (0..200).map(|_| Point::from_f64(&[rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)])).collect();
    let carrier = Carrier::points(pts).unwrap();
    let b = Rect::centered_cube(2, 1.0);
    let cubes: Vec<WhitneyCube> =
        whitney_decompose(&b, &carrier, 6).unwrap().into_iter().filter(|c| !c.collar && c.level > 0).collect();
    assert!(cubes.len() > 1000);
    for _ in 0..1000 {
        let c = cubes[rng.gen_range(0..cubes.len())];
        let ratio = carrier.distance_to_rect(&c.cell) / c.cell.diam();
        assert!((1.0..=4.0).contains(&ratio), "{ratio}");
    }
}

#[test]
fn constant_jet_extends_to_the_constant() {
    let c = Multivector::from_coeffs(1, vec![2.0, -0.5]).unwrap();
    let jet = LipschitzJet::from_polynomial(&Polynomial::constant(c.clone()), 1, 0.5, circle(64, 1.0)).unwrap();
    let ext = WhitneyExtension::new(&jet, &Rect::centered_cube(1, 2.0), 10).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let x = Point::from_f64(&[rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]);
        assert!(extend(&ext, &x).unwrap().distance(&c) < 1e-12);
        assert!(dirac_power_extension(&ext, 1, &x).unwrap().norm() < 1e-9);
    }
}

#[test]
fn partition_of_unity() {
    let jet = LipschitzJet::zero(2, 1, 1.0, sphere_points(300, 3)).unwrap();
    let ext = WhitneyExtension::new(&jet, &Rect::centered_cube(2, 1.5), 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..300 {
        let x = Point::from_f64(&[rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)]);
        let sum: f64 = ext.partition(&x).unwrap().iter().map(|p| p.1).sum();
        assert!((sum - 1.0).abs() < 1e-12, "{sum}");
    }
    assert!(ext.eval(&Point::from_f64(&[3.0, 0.0, 0.0])).is_err());
}

#[test]
fn polynomial_jets_are_reproduced() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 1..=3usize {
        let n = 1;
        // keep the source degree at k - 1
        let p = match k {
            1 => Polynomial::constant(Multivector::from_coeffs(1, vec![0.25, 1.0]).unwrap()),
            2 => Polynomial::identity(n),
            _ => quadratic(n),
        };
        assert!(p.degree() <= k - 1);
        let jet = LipschitzJet::from_polynomial(&p, k, 1.0, circle(200, 1.0)).unwrap();
        let ext = WhitneyExtension::new(&jet, &Rect::centered_cube(1, 2.0), 10).unwrap();
        for _ in 0..100 {
            let x = Point::from_f64(&[rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]);
            assert!(ext.eval(&x).unwrap().distance(&p.eval(&x)) < 1e-8, "k={k}");
        }
        for (i, pt) in jet.points().iter().enumerate().step_by(17) {
            assert_eq!(ext.eval(pt).unwrap(), *jet.component(i, &MultiIndex::zero(2)).unwrap());
        }
    }
    let p = quadratic(2);
    let jet = LipschitzJet::from_polynomial(&p, 3, 1.0, sphere_points(200, 9)).unwrap();
    let ext = WhitneyExtension::new(&jet, &Rect::centered_cube(2, 1.5), 7).unwrap();
    for _ in 0..50 {
        let x = Point::from_f64(&[rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)]);
        assert!(ext.eval(&x).unwrap().distance(&p.eval(&x)) < 1e-8);
    }
}

#[test]
fn dirac_powers_approach_bold_f() {
    let p = quadratic(1);
    let pts = circle(512, 1.0);
    let jet = LipschitzJet::from_polynomial(&p, 3, 1.0, pts.clone()).unwrap();
    let ext = WhitneyExtension::new(&jet, &Rect::centered_cube(1, 2.0), 12).unwrap();
    for i in 0..=2 {
        let bold = assemble_bold_f(&jet, i).unwrap();
        for idx in (0..pts.len()).step_by(37) {
            for d in [1e-2, 1e-3] {
                let x = pts[idx].scale(1.0 + d);
                let v = ext.dirac_power(i, &x).unwrap();
                assert!(v.distance(&bold[idx]) < 1e-6 + 10.0 * d, "i={i} d={d}");
            }
            assert_eq!(ext.dirac_power(i, &pts[idx]).unwrap(), bold[idx]);
        }
    }
    assert!(ext.dirac_power(4, &Point::from_f64(&[0.0, 0.0])).is_err());
    assert!(ext.dirac_power(3, &pts[0]).is_err());
}

#[test]
fn analytic_derivatives_match_finite_differences() {
    let jet = LipschitzJet::sample(1, 2, 0.5, circle(128, 1.0), |p, j| {
        let s = (p[1].abs() + 0.1).sqrt();
        if j.order() == 0 { Multivector::scalar(1, s) } else { Multivector::scalar(1, p[j.exponents()[1] as usize]) }
    })
    .unwrap();
    let ext = WhitneyExtension::new(&jet, &Rect::centered_cube(1, 2.0), 10).unwrap();
    for x in [[0.3, 0.2], [1.4, -0.1], [-0.2, 1.3]] {
        let x = Point::from_f64(&x);
        let dist = ext.nearest(&x).1;
        let h = dist / 640.0;
        let j = MultiIndex::unit(2, 0);
        let exact = ext.partial(&j, &x).unwrap();
        let fd = |h: f64| {
            let e = Point::axis(1, 0).scale(h);
            (&ext.eval(&(x + e)).unwrap() - &ext.eval(&(x - e)).unwrap()).scale(0.5 / h)
        };
        let e1 = fd(h).distance(&exact);
        let e2 = fd(h / 2.0).distance(&exact);
        assert!(e2 < 1e-6 || e1 / e2 > 3.0, "{e1} {e2}");
    }
}

#[test]
fn growth_bound_has_no_upward_trend() {
    let nu = 0.5;
    let pts = circle(1 << 13, 1.0);
    let jet = LipschitzJet::sample(1, 1, nu, pts.clone(), |p, _| Multivector::scalar(1, p[1].abs().powf(nu))).unwrap();
    let ext = WhitneyExtension::new(&jet, &Rect::centered_cube(1, 2.0), 14).unwrap();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in 3..=8 {
        let d = (-(s as f64)).exp2();
        let mut worst: f64 = 0.0;
        for i in (0..pts.len()).step_by(256).chain([0, 1, pts.len() - 1]) {
            for sign in [1.0, -1.0] {
                let x = pts[i].scale(1.0 + sign * d);
                let dist = ext.nearest(&x).1;
                worst = worst.max(ext.dirac_power(1, &x).unwrap().norm() * dist.powf(1.0 - nu));
            }
        }
        xs.push(s as f64);
        ys.push(worst.log2());
    }
    let slope = ols(&xs, &ys).unwrap().slope;
    assert!(slope <= 0.1, "slope {slope}");
}

#[test]
fn lipschitz_constants() {
    let c = Multivector::from_coeffs(2, vec![0.0, 3.0, 4.0, 0.0]).unwrap();
    let jet = LipschitzJet::from_polynomial(&Polynomial::constant(c), 1, 0.3, sphere_points(50, 1)).unwrap();
    let est = estimate_lip_constant(&jet).unwrap();
    assert!((est.m - 5.0).abs() < 1e-12);
    assert_eq!(est.remainder_sup, 0.0);

    let x0 = LipschitzJet::sample(2, 1, 1.0, sphere_points(400, 2), |p, _| Multivector::scalar(2, p[0])).unwrap();
    let est = estimate_lip_constant(&x0).unwrap();
    assert!(est.m <= 1.0 + 1e-12 && est.m > 0.97, "{}", est.m);
    assert!(!est.inconsistent);

    let step = LipschitzJet::sample(1, 1, 1.0, circle(400, 1.0), |p, _| Multivector::scalar(1, if p[1] > 0.0 { 1.0 } else { 0.0 }))
        .unwrap();
    assert!(estimate_lip_constant(&step).unwrap().inconsistent);
    let one = LipschitzJet::zero(1, 1, 1.0, circle(1, 1.0)).unwrap();
    assert!(estimate_lip_constant(&one).is_err());
}

#[test]
fn jet_file_round_trip() {
    let jet = LipschitzJet::from_polynomial(&quadratic(1), 2, 0.75, circle(5, 1.0)).unwrap();
    let mut buf = Vec::new();
    jet.write_json(&mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.contains("\"components\":{\"0 0\":") && text.contains("\"nu\":0.75"));
    assert_eq!(LipschitzJet::read_json(&buf[..]).unwrap(), jet);
    let broken = text.replace("\"0 1\"", "\"0 2\"");
    assert!(LipschitzJet::read_json(broken.as_bytes()).is_err());
    assert!(LipschitzJet::zero(1, 0, 0.5, vec![]).is_err());
    assert!(LipschitzJet::zero(1, 1, 1.5, vec![]).is_err());
}
