//! Invariants of ruled surfaces in a metric with non-constant curvature.

use proptest::prelude::*;
use ruledgeo::ruled_surface::RulingSweep;
use ruledgeo::striction::evolution_from_state;
use ruledgeo::surfaces::{CurvePreset, MetricPreset, RulingPreset, SurfacePreset, TrigSeries};
use ruledgeo::{Profile, Vec3};

fn series(c: f64, a: f64, b: f64) -> TrigSeries {
    TrigSeries { constant: c, cos: vec![a], sin: vec![b] }
}

fn surface(p: [f64; 6]) -> ruledgeo::ruled_surface::RuledSurfaceSpec {
    SurfacePreset {
        metric: MetricPreset::Warped { profile: Profile::sin_plus(2.0) },
        base: CurvePreset::Trig { components: [series(0.0, p[0], 0.2), series(0.1, 0.3, p[1]), series(-0.2, p[2], 0.0)] },
        ruling: RulingPreset::Curve {
            curve: CurvePreset::Trig { components: [series(1.0, p[3], 0.0), series(0.2, 0.0, p[4]), series(p[5], 0.1, 0.0)] },
        },
        normalize: true,
    }
    .build((0.0, 1.0))
    .unwrap()
}

fn params() -> impl Strategy<Value = [f64; 6]> {
    prop::array::uniform6(-0.5f64..0.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn angle_term_is_constant_along_rulings(p in params(), u in 0.0f64..1.0) {
        let spec = surface(p);
        let sweep = RulingSweep::new(&spec, u, -1.0, 2.0).unwrap();
        let b = *sweep.base();
        let g0 = spec.metric.inner(&b.point, &b.velocity, &b.ruling).unwrap();
        for (_, y) in sweep.samples() {
            let x = Vec3::new(y[0], y[1], y[2]);
            let g = spec.metric.inner(&x, &Vec3::new(y[6], y[7], y[8]), &Vec3::new(y[3], y[4], y[5])).unwrap();
            prop_assert!((g - g0).abs() < 1e-9);
        }
    }

    #[test]
    fn evolution_derivatives_are_consistent(p in params(), u in 0.0f64..1.0, v in -0.8f64..0.8) {
        let spec = surface(p);
        let sweep = RulingSweep::new(&spec, u, -1.0, 1.0).unwrap();
        let h = 1e-2;
        let at = |v: f64| evolution_from_state(&spec.metric, u, v, &sweep.state_at(v).unwrap()).unwrap();
        let d5 = |f: &dyn Fn(f64) -> f64| (f(v - 2.0 * h) - 8.0 * f(v - h) + 8.0 * f(v + h) - f(v + 2.0 * h)) / (12.0 * h);
        let s = at(v);
        let df = d5(&|x| at(x).f);
        let d2f = d5(&|x| at(x).dfdv);
        prop_assert!((df - s.dfdv).abs() < 1e-6 * (1.0 + s.dfdv.abs()), "{} vs {}", df, s.dfdv);
        prop_assert!((d2f - s.d2fdv2).abs() < 1e-5 * (1.0 + s.d2fdv2.abs()), "{} vs {}", d2f, s.d2fdv2);
    }
}
