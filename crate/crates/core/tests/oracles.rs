use std::f64::consts::PI;

use nalgebra::DVector;

use sasaki_core::immersions::*;
use sasaki_core::map::pullback_metric;
use sasaki_core::space_forms::*;
use sasaki_core::transforms::*;
use sasaki_core::verification::*;
use sasaki_core::*;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[test]
fn spec_parameters() {
    let s = SpaceFormSpec::from_c(1, -7.0).unwrap();
    assert_eq!(s.b(), -1.0);
    assert_eq!(s.family(), Family::Hyperbolic);
    assert_eq!(SpaceFormSpec::from_b(2, 1.0).unwrap().c(), 1.0);
    assert_eq!(SpaceFormSpec::from_c(3, -3.0).unwrap().family(), Family::Null);
    assert!(matches!(SpaceFormSpec::from_c(0, 1.0), Err(GeometryError::Parameter(_))));
    assert_eq!(ball_radius(-1.0), 1.0);
    assert_eq!(ball_radius(-0.25), 2.0);
}

#[test]
fn holomorphic_curvature_is_four_b() {
    for (n, b) in [(1, 1.0), (2, 1.0), (1, -1.0), (2, -0.5), (2, 0.0)] {
        let k = kahler_space_form(n, b).unwrap();
        let r = holomorphic_curvature_suite(&k, 4.0 * b, 20, 3, 1e-6).unwrap();
        assert!(r.pass, "n={n} b={b}: {:?}", r.residuals);
        assert!(kahler_suite(&k, 20, 3, 1e-9).unwrap().pass);
    }
}

#[test]
fn homothety_moves_phi_curvature() {
    for (c, a) in [(1.0, 2.0), (1.0, 0.5), (-7.0, 2.0), (-3.0, 3.0)] {
        let s = sasakian_space_form(SpaceFormSpec::from_c(2, c).unwrap()).unwrap();
        let t = d_homothety(&s, HomothetyRatio::new(a).unwrap()).unwrap();
        let expected = (c + 3.0) / a - 3.0;
        assert!(axiom_suite(&t, 30, 5, 1e-8).unwrap().pass);
        let r = curvature_suite(&t, expected, 20, 5, 1e-6).unwrap();
        assert!(r.pass, "c={c} a={a}: {:?}", r.residuals);
    }
}

#[test]
fn transverse_deformation_adds_i_ddbar() {
    for n in [1, 2] {
        let s = heisenberg_structure(n).unwrap();
        let eps = 0.1;
        let f = ScalarField::from_fn(s.chart().clone(), move |x| {
            vec![(&(&x[1] * &x[1]) * &x[2]).scale(eps) + x[2].sin().scale(eps)]
        });
        let df = OneForm::from_fn(s.chart().clone(), move |x| {
            let mut v = vec![Jet::constant(0.0); 2 * n + 1];
            v[1] = (&x[1] * &x[2]).scale(2.0 * eps);
            v[2] = (&x[1] * &x[1]).scale(eps) + x[2].cos().scale(eps);
            v
        });
        let bf = BasicFunction::new(&s, f, df).unwrap();
        let t = transverse_deformation(&s, &bf).unwrap();
        assert!(axiom_suite(&t, 50, 2, 1e-8).unwrap().pass);
        for p in s.chart().sample(3, 20).unwrap() {
            let d1 = t.eta().exterior_derivative(&p).unwrap();
            let d0 = s.eta().exterior_derivative(&p).unwrap();
            let w = basic_i_ddbar(&s, &bf, &p).unwrap();
            assert!(((d1 - d0) * 0.5 - w).amax() < 1e-9);
        }
    }
}

#[test]
fn projective_volume_and_bergman_constant() {
    let q = Quadrature::default();
    for n in [1, 2] {
        for k in 1..=3u32 {
            let m = LineBundleModel::projective(n, k).unwrap();
            let nodes = q.nodes(n, m.decay(), 0, 1).unwrap();
            let vol = integrate_volume(&m, &nodes, |_| Ok(1.0)).unwrap();
            let want = PI.powi(n as i32) / if n == 2 { 2.0 } else { 1.0 };
            assert!((vol - want).abs() < 1e-10, "vol {vol}");
            let b = orthonormalize_sections(&m, &q).unwrap();
            let dim = binomial(n + k as usize, n);
            assert_eq!(b.len() as f64, dim);
            let pts = m.base().chart().sample(4, 30).unwrap();
            let (var, mean) = bergman_variation(&b, &pts).unwrap();
            assert!(var < 1e-10);
            assert!((mean - dim / want).abs() < 1e-10 * mean);
        }
    }
}

#[test]
fn segal_bargmann_gram_is_pi_factorial() {
    let m = LineBundleModel::gaussian(8).unwrap();
    let raw = SectionBasis::raw(&m, &Quadrature::default()).unwrap();
    let mut fact = 1.0;
    for j in 0..=8 {
        if j > 0 {
            fact *= j as f64;
        }
        assert!((raw.gram()[(j, j)].re - PI * fact).abs() < 1e-10 * fact);
    }
    let sb = segal_bargmann_immersion(40, 1.0, 1e-8).unwrap();
    assert!((sb.embedding.basis.bergman_constant().unwrap() - 1.0 / PI).abs() < 1e-12);
    let v = sb.embedding.basis.values(&[0.6, 0.0]);
    assert!((v[2].re - 0.36 / 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn calabi_pulls_back_flat_to_hyperbolic_within_tail() {
    let source = kahler_space_form(1, -1.0).unwrap();
    assert!((calabi_coefficient(-1.0, &[2]) - 0.5f64.sqrt()).abs() < 1e-15);
    for d in [5, 10, 20] {
        let c = calabi_map(1, -1.0, d).unwrap();
        let flat = kahler_space_form(c.target_complex_dim(), 0.0).unwrap();
        let bound = c.tail_bound(0.5);
        for (x, y) in [(0.0, 0.0), (0.3, -0.2), (0.5, 0.0), (-0.1, 0.45)] {
            let g = pullback_metric(&c.map, flat.g(), &[x, y]).unwrap();
            let h = source.g().value(&[x, y]).unwrap();
            assert!((g - h).amax() <= bound, "d={d}");
        }
    }
}

#[test]
fn kodaira_cone_norm_is_root_bergman() {
    let q = Quadrature::default();
    for k in 1..=3u32 {
        let m = LineBundleModel::projective(1, k).unwrap();
        let b = orthonormalize_sections(&m, &q).unwrap();
        let f = kodaira_cone_map(&b).unwrap();
        let ratios: Vec<f64> = f
            .source()
            .sample(9, 40)
            .unwrap()
            .iter()
            .map(|p| tau_ratio(&f, k, p).unwrap())
            .collect();
        for r in ratios {
            assert!((r * r - f64::from(k + 1) / PI).abs() < 1e-10);
        }
    }
}

#[test]
fn linear_inclusions_are_sasakian() {
    for c in [1.0, -3.0, -7.0] {
        let m = linear_inclusion(1, 3, c).unwrap();
        let s1 = sasakian_space_form(SpaceFormSpec::from_c(1, c).unwrap()).unwrap();
        let s2 = sasakian_space_form(SpaceFormSpec::from_c(3, c).unwrap()).unwrap();
        let r = immersion_suite(&m, &s1, &s2, 50, 1, 1e-9).unwrap();
        assert!(r.pass, "c={c}: {:?}", r.residuals);
        let bad = scale_image(&m, 1.01, 0);
        assert!(!immersion_suite(&bad, &s1, &s2, 50, 1, 1e-9).unwrap().pass);
    }
}

#[test]
fn gauss_legendre_is_exact_for_polynomials() {
    let (x, w) = gauss_legendre(6);
    for p in 0..12 {
        let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
        let exact = if p % 2 == 0 { 2.0 / f64::from(p + 1) } else { 0.0 };
        assert!((approx - exact).abs() < 1e-14);
    }
}

#[test]
fn sectional_curvature_of_round_sphere() {
    let s = sphere_structure(1).unwrap();
    let p = [0.2, -0.1, 0.3];
    let r = s.reeb().value(&p).unwrap();
    let x = DVector::from_vec(vec![1.0, 0.3, -0.2]);
    let k = sasaki_core::curvature::sectional_curvature(s.g(), &p, &x, &r).unwrap();
    assert!((k - 1.0).abs() < 1e-9);
}
