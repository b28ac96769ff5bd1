use std::f64::consts::FRAC_PI_4;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use super::*;
use crate::linalg::Vec3;

fn conformal_hand_christoffel(p: &Vec3) -> Tensor3 {
    // Half-space, k = -1: g = z^-2 δ.
    let z = p.z;
    let mut gam = ZERO3;
    gam[0][0][2] = -1.0 / z;
    gam[0][2][0] = -1.0 / z;
    gam[1][1][2] = -1.0 / z;
    gam[1][2][1] = -1.0 / z;
    gam[2][2][2] = -1.0 / z;
    gam[2][0][0] = 1.0 / z;
    gam[2][1][1] = 1.0 / z;
    gam
}

fn max_tensor3_diff(a: &Tensor3, b: &Tensor3) -> f64 {
    let mut m = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                m = m.max((a[i][j][k] - b[i][j][k]).abs());
            }
        }
    }
    m
}

fn finite_difference_twin(m: &ChartMetric) -> ChartMetric {
    let inner = m.clone();
    ChartMetric::from_fn(
        move |p| inner.components(p).unwrap(),
        {
            let dom = m.clone();
            move |p| dom.contains(p)
        },
        "fd-twin",
    )
}

#[test]
fn euclidean_christoffel_and_curvature_vanish() {
    let m = ChartMetric::euclidean();
    let p = Vec3::new(0.3, -2.0, 5.0);
    let c = m.christoffel_at(&p).unwrap();
    assert_eq!(max_tensor3_diff(&c.christoffel, &ZERO3), 0.0);
    let t = m.riemann_at(&p).unwrap();
    assert!(t.riemann.iter().flatten().flatten().flatten().all(|x| *x == 0.0));
    let k = m
        .sectional_curvature(&p, &Vec3::new(1.0, 0.0, 0.0), &Vec3::new(0.0, 1.0, 1.0))
        .unwrap();
    assert_eq!(k, 0.0);
}

#[test]
fn half_space_christoffel_matches_hand_values() {
    let m = ChartMetric::half_space(-1.0);
    let p = Vec3::new(0.0, 0.0, 1.0);
    let c = m.christoffel_at(&p).unwrap();
    let expected = conformal_hand_christoffel(&p);
    assert!(max_tensor3_diff(&c.christoffel, &expected) < 1e-15);
    assert_abs_diff_eq!(c.christoffel[0][0][2], -1.0);
    assert_abs_diff_eq!(c.christoffel[2][1][1], 1.0);

    // Same values through the finite-difference fallback.
    let fd = finite_difference_twin(&m);
    let c_fd = fd.christoffel_at(&p).unwrap();
    assert!(max_tensor3_diff(&c_fd.christoffel, &expected) < 1e-9);
}

#[test]
fn warped_sine_christoffel_at_quarter_pi() {
    // dt² + sin²t (dx² + dy²): Γ^t_xx = −f f' = −½, Γ^x_tx = f'/f = 1.
    let m = ChartMetric::warped(Profile::sin_plus(0.0));
    let p = Vec3::new(FRAC_PI_4, 0.4, -1.0);
    let c = m.christoffel_at(&p).unwrap();
    let g = &c.christoffel;
    assert_abs_diff_eq!(g[0][1][1], -0.5, epsilon = 1e-14);
    assert_abs_diff_eq!(g[0][2][2], -0.5, epsilon = 1e-14);
    assert_abs_diff_eq!(g[1][0][1], 1.0, epsilon = 1e-14);
    assert_abs_diff_eq!(g[1][1][0], 1.0, epsilon = 1e-14);
    assert_abs_diff_eq!(g[2][0][2], 1.0, epsilon = 1e-14);
    let mut expected = ZERO3;
    expected[0][1][1] = -0.5;
    expected[0][2][2] = -0.5;
    expected[1][0][1] = 1.0;
    expected[1][1][0] = 1.0;
    expected[2][0][2] = 1.0;
    expected[2][2][0] = 1.0;
    assert!(max_tensor3_diff(g, &expected) < 1e-14);
}

#[test]
fn outside_domain_and_singular_metric_errors() {
    let m = ChartMetric::half_space(-1.0);
    assert!(matches!(
        m.christoffel_at(&Vec3::new(0.0, 0.0, -1.0)),
        Err(GeometryError::PointOutsideDomain(_))
    ));
    let degenerate = ChartMetric::from_fn(|_| Mat3::from_diagonal(&Vec3::new(1.0, 1.0, 0.0)), |_| true, "deg");
    assert!(matches!(
        degenerate.christoffel_at(&Vec3::zeros()),
        Err(GeometryError::SingularMetric(_))
    ));
}

#[test]
fn space_forms_have_constant_sectional_curvature() {
    let planes = [
        (Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)),
        (Vec3::new(1.0, 2.0, -1.0), Vec3::new(0.5, 0.0, 3.0)),
        (Vec3::new(0.0, 1.0, 1.0), Vec3::new(-2.0, 0.3, 0.1)),
    ];
    for (m, k, pts) in [
        (
            ChartMetric::half_space(-1.0),
            -1.0,
            vec![Vec3::new(0.0, 0.0, 1.0), Vec3::new(2.0, -1.0, 0.3), Vec3::new(0.1, 0.1, 4.0)],
        ),
        (
            ChartMetric::half_space(-2.5),
            -2.5,
            vec![Vec3::new(0.5, 0.0, 1.5)],
        ),
        (
            ChartMetric::sphere(1.0),
            1.0,
            vec![Vec3::zeros(), Vec3::new(1.0, -0.5, 2.0), Vec3::new(-3.0, 0.0, 0.2)],
        ),
        (ChartMetric::sphere(4.0), 4.0, vec![Vec3::new(0.2, 0.3, -0.1)]),
    ] {
        for p in &pts {
            for (x, y) in &planes {
                let s = m.sectional_curvature(p, x, y).unwrap();
                assert!((s - k).abs() < 1e-10, "{}: K = {s} at {p:?}", m.label());
            }
        }
    }
}

#[test]
fn finite_difference_curvature_is_accurate_to_1e6() {
    let exact = ChartMetric::sphere(1.0);
    let fd = finite_difference_twin(&exact);
    let p = Vec3::new(0.4, -0.2, 0.7);
    let s = fd
        .sectional_curvature(&p, &Vec3::new(1.0, 0.0, 0.0), &Vec3::new(0.0, 0.0, 1.0))
        .unwrap();
    assert!((s - 1.0).abs() < 1e-6, "{s}");
}

#[test]
fn degenerate_plane_is_rejected() {
    let m = ChartMetric::euclidean();
    let x = Vec3::new(1.0, 2.0, 3.0);
    assert!(matches!(
        m.sectional_curvature(&Vec3::zeros(), &x, &(x * 2.0)),
        Err(GeometryError::DegeneratePlane(_))
    ));
}

#[test]
fn riemann_symmetries_on_product_metric() {
    let m = ChartMetric::product_revolution(Profile::sin_plus(2.0));
    for p in [Vec3::new(0.0, 0.3, 0.2), Vec3::new(1.0, -2.0, 2.5)] {
        let t = m.riemann_at(&p).unwrap();
        let r = t.lowered();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        assert!((r[a][b][c][d] + r[b][a][c][d]).abs() < 1e-12);
                        assert!((r[a][b][c][d] + r[a][b][d][c]).abs() < 1e-12);
                        assert!((r[a][b][c][d] - r[c][d][a][b]).abs() < 1e-12);
                        let bianchi = r[a][b][c][d] + r[b][c][a][d] + r[c][a][b][d];
                        assert!(bianchi.abs() < 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn product_metric_is_flat_along_t_and_matches_gauss_curvature() {
    // The t-direction splits off, and the (u, v) plane carries the Gauss
    // curvature of the surface of revolution: K = −f'' / (f (1 + f'²)²).
    let m = ChartMetric::product_revolution(Profile::sin_plus(2.0));
    let v: f64 = 0.7;
    let p = Vec3::new(0.0, 1.0, v);
    let (f, f1, f2) = (2.0 + v.sin(), v.cos(), -v.sin());
    let expected = -f2 / (f * (1.0 + f1 * f1).powi(2));
    let k = m
        .sectional_curvature(&p, &Vec3::new(0.0, 1.0, 0.0), &Vec3::new(0.0, 0.0, 1.0))
        .unwrap();
    assert!((k - expected).abs() < 1e-12, "{k} vs {expected}");
    let kt = m
        .sectional_curvature(&p, &Vec3::new(1.0, 0.0, 0.0), &Vec3::new(0.0, 1.0, 0.3))
        .unwrap();
    assert!(kt.abs() < 1e-12);
}

#[test]
fn volume_form_values() {
    let m = ChartMetric::euclidean();
    let e = Mat3::identity();
    let (e1, e2, e3) = (e.column(0).into_owned(), e.column(1).into_owned(), e.column(2).into_owned());
    assert_eq!(m.volume_form(&Vec3::zeros(), &e1, &e2, &e3).unwrap(), 1.0);
    assert_eq!(m.volume_form(&Vec3::zeros(), &e1, &e1, &e3).unwrap(), 0.0);
    let h = ChartMetric::half_space(-1.0);
    let v = h.volume_form(&Vec3::new(0.0, 0.0, 2.0), &e1, &e2, &e3).unwrap();
    assert_abs_diff_eq!(v, 0.125, epsilon = 1e-15);
}

#[test]
fn covariant_derivative_of_circle_ruling_in_half_space() {
    // α(u) = (cos u, sin u, 1), Z = (cos u, sin u, 0).
    let m = ChartMetric::half_space(-1.0);
    for u in [0.0, 0.7, 2.0, 4.5_f64] {
        let (s, c) = u.sin_cos();
        let p = Vec3::new(c, s, 1.0);
        let vel = Vec3::new(-s, c, 0.0);
        let z = Vec3::new(c, s, 0.0);
        let dz = Vec3::new(-s, c, 0.0);
        let d = m.covariant_derivative_along(&p, &vel, &z, &dz).unwrap();
        assert!((d - Vec3::new(-s, c, 0.0)).norm() < 1e-15);
    }
    let e = ChartMetric::euclidean();
    let d = e
        .covariant_derivative_along(&Vec3::zeros(), &Vec3::x(), &Vec3::y(), &Vec3::zeros())
        .unwrap();
    assert_eq!(d, Vec3::zeros());
}

#[test]
fn covariant_derivative_of_unit_meridian_ruling() {
    // Product ℝ × Σ, f = 2 + sin v, base α(u) = (0, u, v0), Z = ∂_v / √(1+cos²v0).
    // ∇_{α'} Z = cos v / (√(1+cos²v) (2+sin v)) · ∂_u.
    let m = ChartMetric::product_revolution(Profile::sin_plus(2.0));
    for v0 in [0.0, 0.5, 1.2_f64] {
        let p = Vec3::new(0.0, 0.3, v0);
        let n = (1.0 + v0.cos().powi(2)).sqrt();
        let z = Vec3::new(0.0, 0.0, 1.0 / n);
        let d = m
            .covariant_derivative_along(&p, &Vec3::new(0.0, 1.0, 0.0), &z, &Vec3::zeros())
            .unwrap();
        let coef = v0.cos() / (n * (2.0 + v0.sin()));
        assert!((d - Vec3::new(0.0, coef, 0.0)).norm() < 1e-14, "{d:?}");
    }
}

#[test]
fn metric_compatibility_along_a_transported_pair() {
    // d/du g(V,W) = g(∇V, W) + g(V, ∇W) checked with central differences
    // along a curve for arbitrary smooth fields.
    let m = ChartMetric::sphere(1.0);
    let curve = |u: f64| Vec3::new(0.3 * u.cos(), 0.5 * u, 0.2 * u.sin());
    let dcurve = |u: f64| Vec3::new(-0.3 * u.sin(), 0.5, 0.2 * u.cos());
    let vf = |u: f64| Vec3::new(1.0 + u, u * u, -0.5);
    let dvf = |u: f64| Vec3::new(1.0, 2.0 * u, 0.0);
    let wf = |u: f64| Vec3::new(u.sin(), 1.0, u.cos());
    let dwf = |u: f64| Vec3::new(u.cos(), 0.0, -u.sin());
    let f = |u: f64| m.inner(&curve(u), &vf(u), &wf(u)).unwrap();
    for u in [0.1, 0.9, 1.7] {
        let h = 1e-4;
        let lhs = (f(u + h) - f(u - h)) / (2.0 * h);
        let p = curve(u);
        let nv = m.covariant_derivative_along(&p, &dcurve(u), &vf(u), &dvf(u)).unwrap();
        let nw = m.covariant_derivative_along(&p, &dcurve(u), &wf(u), &dwf(u)).unwrap();
        let rhs = m.inner(&p, &nv, &wf(u)).unwrap() + m.inner(&p, &vf(u), &nw).unwrap();
        assert!((lhs - rhs).abs() < 1e-6, "{lhs} vs {rhs}");
    }
}

#[test]
fn metric_cross_product_is_positively_oriented() {
    let m = ChartMetric::sphere(1.0);
    let p = Vec3::new(0.5, 0.1, -0.3);
    let c = m.christoffel_at(&p).unwrap();
    let a = Vec3::new(1.0, 0.2, 0.0);
    let b = Vec3::new(0.0, 1.0, 0.5);
    let x = c.cross(&a, &b);
    assert!(c.inner(&x, &a).abs() < 1e-14);
    assert!(c.inner(&x, &b).abs() < 1e-14);
    assert!(c.volume(&a, &b, &x) > 0.0);
}

fn point_in(metric: &str) -> impl Strategy<Value = Vec3> {
    let z_lo = if metric == "half_space" { 0.2 } else { -2.0 };
    (-2.0..2.0f64, -2.0..2.0f64, z_lo..3.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn vector() -> impl Strategy<Value = Vec3> {
    (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

proptest! {
    #[test]
    fn christoffel_is_symmetric_exact(p in point_in("half_space")) {
        for m in [ChartMetric::sphere(1.0), ChartMetric::half_space(-1.0),
                  ChartMetric::product_revolution(Profile::sin_plus(2.0))] {
            let c = m.christoffel_at(&p).unwrap().christoffel;
            for i in 0..3 { for j in 0..3 { for k in 0..3 {
                prop_assert!((c[i][j][k] - c[i][k][j]).abs() < 1e-12);
            }}}
        }
    }

    #[test]
    fn christoffel_is_symmetric_finite_difference(p in point_in("half_space")) {
        let fd = finite_difference_twin(&ChartMetric::sphere(1.0));
        let h = DEFAULT_FD_STEP;
        let c = fd.christoffel_at(&p).unwrap().christoffel;
        for i in 0..3 { for j in 0..3 { for k in 0..3 {
            prop_assert!((c[i][j][k] - c[i][k][j]).abs() < 10.0 * h * h);
        }}}
    }

    #[test]
    fn volume_form_is_alternating_and_multilinear(
        p in point_in("half_space"), a in vector(), b in vector(), c in vector(), d in vector(), s in -2.0..2.0f64
    ) {
        let m = ChartMetric::half_space(-1.0);
        let v = |x: &Vec3, y: &Vec3, z: &Vec3| m.volume_form(&p, x, y, z).unwrap();
        let base = v(&a, &b, &c);
        let scale = 1.0 + base.abs() + v(&d, &b, &c).abs();
        prop_assert!((v(&b, &a, &c) + base).abs() <= 1e-12 * scale);
        prop_assert!((v(&a, &c, &b) + base).abs() <= 1e-12 * scale);
        prop_assert!(v(&a, &a, &c).abs() <= 1e-12 * scale);
        let lin = v(&(a * s + d), &b, &c) - (s * base + v(&d, &b, &c));
        prop_assert!(lin.abs() <= 1e-11 * scale * (1.0 + s.abs()));
    }

    #[test]
    fn sectional_curvature_is_scale_invariant(p in point_in("sphere"), x in vector(), y in vector()) {
        let m = ChartMetric::product_revolution(Profile::sin_plus(2.0));
        prop_assume!(m.christoffel_at(&p).unwrap().normalized_gram(&x, &y) > 1e-4);
        let k1 = m.sectional_curvature(&p, &x, &y).unwrap();
        let k2 = m.sectional_curvature(&p, &(x * 2.0), &y).unwrap();
        prop_assert!((k1 - k2).abs() < 1e-12 * (1.0 + k1.abs()));
    }
}

#[test]
fn polynomial_profile_derivatives() {
    let p = Profile::Polynomial(vec![1.0, 2.0, 0.0, 3.0]);
    let t = 0.5;
    let d = p.derivatives(t);
    assert_abs_diff_eq!(d[0], 1.0 + 2.0 * t + 3.0 * t.powi(3), epsilon = 1e-15);
    assert_abs_diff_eq!(d[1], 2.0 + 9.0 * t * t, epsilon = 1e-15);
    assert_abs_diff_eq!(d[2], 18.0 * t, epsilon = 1e-15);
    assert_abs_diff_eq!(d[3], 18.0, epsilon = 1e-15);
}
