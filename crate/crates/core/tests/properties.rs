use std::sync::Arc;

use nalgebra::DVector;
use proptest::prelude::*;

use sasaki_core::curvature::sectional_curvature;
use sasaki_core::map::{pullback_one_form, pullback_two_form};
use sasaki_core::space_forms::*;
use sasaki_core::transforms::{d_homothety, HomothetyRatio};
use sasaki_core::*;

fn plane(n: usize) -> Arc<Chart> {
    Arc::new(Chart::euclidean(format!("R{n}"), n, 2.0))
}

/// `Σ c_i sin(x_i) x_{i+1} + c_0 e^{x_0 x_1}` on `ℝ³`.
fn test_scalar(c: [f64; 4]) -> ScalarField {
    ScalarField::from_fn(plane(3), move |x| {
        let mut v = (&x[0] * &x[1]).exp().scale(c[0]);
        for i in 0..3 {
            v += (&x[i].sin() * &x[(i + 1) % 3]).scale(c[i + 1]);
        }
        vec![v]
    })
}

fn bent_map(a: [f64; 3]) -> SmoothMap {
    SmoothMap::from_fn("bend", plane(3), plane(3), move |x| {
        vec![
            &x[0] + (&x[1] * &x[2]).scale(a[0]),
            &x[1] + x[0].sin().scale(a[1]),
            &x[2] + (&x[0] * &x[0]).scale(a[2]),
        ]
    })
}

fn coeffs() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0..1.0f64)
}

fn point3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.8..0.8f64, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn d_of_d_vanishes(c in coeffs(), p in point3()) {
        let df = test_scalar(c).differential();
        let dd = df.exterior_derivative(&p).unwrap();
        prop_assert!(dd.amax() < 1e-12, "{dd}");
    }

    #[test]
    fn jets_match_central_differences(c in coeffs(), p in point3()) {
        let f = test_scalar(c);
        let j = f.jet(&p, 2).unwrap();
        let h = 1e-5;
        for i in 0..3 {
            let (mut a, mut b) = (p.clone(), p.clone());
            a[i] += h;
            b[i] -= h;
            let fd = (f.value(&a).unwrap() - f.value(&b).unwrap()) / (2.0 * h);
            prop_assert!((fd - j.d(i)).abs() < 1e-5);
            let (ga, gb) = (f.jet(&a, 1).unwrap(), f.jet(&b, 1).unwrap());
            for k in 0..3 {
                let fd2 = (ga.d(k) - gb.d(k)) / (2.0 * h);
                prop_assert!((fd2 - j.dd(i, k)).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn metric_jets_match_central_differences(p in prop::collection::vec(-0.6..0.6f64, 5)) {
        let s = sphere_structure(2).unwrap();
        let h = 1e-5;
        let jets = s.g().field().jets(&p, 1).unwrap();
        for i in 0..5 {
            let (mut a, mut b) = (p.clone(), p.clone());
            a[i] += h;
            b[i] -= h;
            let (ga, gb) = (s.g().value(&a).unwrap(), s.g().value(&b).unwrap());
            for (m, jet) in jets.iter().enumerate() {
                let fd = (ga[(m / 5, m % 5)] - gb[(m / 5, m % 5)]) / (2.0 * h);
                prop_assert!((fd - jet.d(i)).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn pullback_is_functorial(a in prop::array::uniform3(-0.5..0.5f64), b in prop::array::uniform3(-0.5..0.5f64), p in point3()) {
        let (phi, psi) = (bent_map(a), bent_map(b));
        let h = heisenberg_structure(1).unwrap();
        let eta = OneForm::from_fn(plane(3), {
            let r = h.eta().field().rule().clone();
            move |x| r(x)
        });
        let deta = eta.d_field();
        let composite = phi.then(&psi);
        let (y, jac) = phi.jacobian(&p).unwrap();
        let lhs = pullback_one_form(&composite, &eta, &p).unwrap();
        let rhs = jac.transpose() * pullback_one_form(&psi, &eta, &y).unwrap();
        prop_assert!((lhs - rhs).amax() < 1e-12);
        let lhs = pullback_two_form(&composite, &deta, &p).unwrap();
        let rhs = jac.transpose() * pullback_two_form(&psi, &deta, &y).unwrap() * &jac;
        prop_assert!((lhs - rhs).amax() < 1e-12);
    }

    #[test]
    fn sectional_curvature_depends_only_on_the_plane(
        p in prop::collection::vec(-0.5..0.5f64, 3),
        x in prop::collection::vec(-1.0..1.0f64, 3),
        y in prop::collection::vec(-1.0..1.0f64, 3),
        m in prop::array::uniform4(-2.0..2.0f64),
    ) {
        let det = m[0] * m[3] - m[1] * m[2];
        prop_assume!(det.abs() > 0.2);
        let (x, y) = (DVector::from_vec(x), DVector::from_vec(y));
        prop_assume!((x.norm() * y.norm() - x.dot(&y).abs()) > 0.1 * x.norm() * y.norm());
        let s = hyperbolic_structure(1, -7.0).unwrap();
        let k0 = sectional_curvature(s.g(), &p, &x, &y).unwrap();
        let (u, v) = (&x * m[0] + &y * m[1], &x * m[2] + &y * m[3]);
        let k1 = sectional_curvature(s.g(), &p, &u, &v).unwrap();
        prop_assert!((k0 - k1).abs() < 1e-9 * (1.0 + k0.abs()));
    }

    #[test]
    fn homothety_composes(a in 0.2..5.0f64, b in 0.2..5.0f64, p in prop::collection::vec(-0.7..0.7f64, 3)) {
        let s = sphere_structure(1).unwrap();
        let (ra, rb, rab) = (HomothetyRatio::new(a).unwrap(), HomothetyRatio::new(b).unwrap(), HomothetyRatio::new(a * b).unwrap());
        let two = d_homothety(&d_homothety(&s, ra).unwrap(), rb).unwrap();
        let one = d_homothety(&s, rab).unwrap();
        let scale = 1.0 + a * b * (1.0 + a * b);
        prop_assert!((two.g().value(&p).unwrap() - one.g().value(&p).unwrap()).amax() < 1e-10 * scale);
        prop_assert!((two.eta().value(&p).unwrap() - one.eta().value(&p).unwrap()).amax() < 1e-10 * scale);
        prop_assert!((two.reeb().value(&p).unwrap() - one.reeb().value(&p).unwrap()).amax() < 1e-10);
        prop_assert!((two.phi_curvature().unwrap() - one.phi_curvature().unwrap()).abs() < 1e-10 * (1.0 + (4.0 / (a * b)).abs()));
    }

    #[test]
    fn random_unitaries_are_unitary(seed in 0u64..10_000, d in 1usize..6) {
        let mut t = sasaki_core::verification::RigidTransform::identity(sasaki_core::verification::RigidKind::Unitary, d - 1);
        t.u = sasaki_core::verification::random_unitary(d, seed);
        prop_assert!(t.unitarity_defect() < 1e-12);
    }
}
