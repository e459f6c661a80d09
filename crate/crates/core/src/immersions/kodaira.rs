use std::sync::Arc;

use crate::chart::{Chart, SampleBlock};
use crate::complex::norm_sq;
use crate::error::{GeometryError, Result};
use crate::jet::Jet;
use crate::map::{ConeLift, SmoothMap};
use crate::space_forms::{
    boothby_wang_sphere_presentation, sphere_structure, stereographic, ContactMetricStructure, LineBundleModel,
};

use super::maps::cone_radius_chart;
use super::quadrature::Quadrature;
use super::sections::{orthonormalize_sections, BasisState, SectionBasis};

/// `e^{iθ} √(h^k(w)) (s_0(w), …, s_D(w))` as real pairs, scaled by `t`.
fn ambient(basis: &SectionBasis, theta: &Jet, w: &[Jet], t: &Jet) -> Vec<Jet> {
    let half = basis.model().log_weight()(&norm_sq(w)).scale(0.5).exp();
    let c = &(&theta.cos() * &half) * t;
    let s = &(&theta.sin() * &half) * t;
    let mut z = Vec::with_capacity(2 * basis.len());
    for (re, im) in basis.jets(w) {
        z.push(&c * &re - &s * &im);
        z.push(&c * &im + &s * &re);
    }
    z
}

/// Kodaira CR embedding with its source and target structures.
#[derive(Clone, Debug)]
pub struct KodairaEmbedding {
    pub map: SmoothMap,
    pub source: ContactMetricStructure,
    pub target: ContactMetricStructure,
    pub basis: SectionBasis,
}

/// `(θ, w) ↦ e^{iθ} √(h^k) s(w)` from the unit bundle of `L^{−k}` into
/// `S^{2D−1}`, with the cone lift `(θ, w, t) ↦ t e^{iθ} √(h^k) s(w)`.
pub fn kodaira_cr_embedding(basis: &SectionBasis) -> Result<KodairaEmbedding> {
    if basis.state() != BasisState::Rescaled {
        return Err(GeometryError::State(
            "the CR embedding needs an orthonormal basis rescaled to unit Bergman kernel".into(),
        ));
    }
    let d = basis.len();
    if d < 2 {
        return Err(GeometryError::Dimension("the CR embedding needs at least two sections".into()));
    }
    let source = boothby_wang_sphere_presentation(basis.model())?;
    let target = sphere_structure(d - 1)?;
    let b = basis.clone();
    let map = SmoothMap::from_fn(
        format!("φ_{}[{}]", basis.k(), basis.model().label()),
        source.chart().clone(),
        target.chart().clone(),
        move |x| stereographic(&ambient(&b, &x[0], &x[1..], &Jet::constant(1.0))),
    );
    let b = basis.clone();
    let cone_src = Arc::new(Chart::product(
        format!("C({})", source.chart().label()),
        &[source.chart(), &cone_radius_chart()],
    ));
    let lift = SmoothMap::from_fn(
        format!("Cφ_{}", basis.k()),
        cone_src,
        Arc::new(Chart::euclidean(format!("C^{d}"), 2 * d, 2.0)),
        move |q| {
            let m = q.len() - 1;
            ambient(&b, &q[0], &q[1..m], &q[m])
        },
    );
    Ok(KodairaEmbedding {
        map: map.with_cone(ConeLift { map: lift, exponent: 1.0 }),
        source,
        target,
        basis: basis.clone(),
    })
}

/// `φ_k = ψ̃_k ∘ p_k` on the cone of `L^{−1}`: `(θ, w, t) ↦ t^k e^{ikθ}
/// √(h^k(w)) s(w) ∈ ℂ^D`, so that `|φ_k| = √(B_k) t^k`.
pub fn kodaira_cone_map(basis: &SectionBasis) -> Result<SmoothMap> {
    if basis.state() == BasisState::Raw {
        return Err(GeometryError::State("the cone map needs an orthonormal basis".into()));
    }
    let n = basis.model().base().complex_dim();
    let d = basis.len();
    let k = basis.k();
    let chart = Arc::new(Chart::product(
        format!("C(S(L^-1)→{})", basis.model().base().label()),
        &[
            &Chart::new(
                "θ",
                1,
                Arc::new(|p: &[f64]| p[0] > -std::f64::consts::PI && p[0] < std::f64::consts::PI),
                vec![SampleBlock::Interval {
                    lo: -std::f64::consts::PI,
                    hi: std::f64::consts::PI,
                }],
            )?,
            basis.model().base().chart(),
            &cone_radius_chart(),
        ],
    ));
    let b = basis.clone();
    let kf = f64::from(k);
    Ok(SmoothMap::from_fn(
        format!("φ_{k}∘p_{k}"),
        chart,
        Arc::new(Chart::euclidean(format!("C^{d}"), 2 * d, 2.0)),
        move |q| {
            let t = q[2 * n + 1].powi(k as i32);
            ambient(&b, &q[0].scale(kf), &q[1..=2 * n], &t)
        },
    ))
}

/// `|φ_k(q)|/t^k`, the square root of the kernel at the base point.
pub fn tau_ratio(cone_map: &SmoothMap, k: u32, q: &[f64]) -> Result<f64> {
    let z = cone_map.image(q)?;
    let t = q[q.len() - 1];
    Ok(z.iter().map(|v| v * v).sum::<f64>().sqrt() / t.powi(k as i32))
}

/// Truncated Segal–Bargmann immersion of the flat model into a sphere.
#[derive(Clone, Debug)]
pub struct SegalBargmann {
    pub embedding: KodairaEmbedding,
    pub radius: f64,
    pub tail_bound: f64,
}

/// `e^{−|z|²}Σ_{j>d}|z|^{2j}/j! ≤ r^{2(d+1)}/(d+1)!` on `|z| ≤ r`.
pub fn segal_bargmann_tail(cutoff: usize, radius: f64) -> f64 {
    let m = cutoff as f64 + 1.0;
    let lnf: f64 = (2..=cutoff + 1).map(|k| (k as f64).ln()).sum();
    (2.0 * m * radius.ln() - lnf).exp()
}

/// Orthonormal monomials `z^j/√(π j!)` for `j ≤ d` under `e^{−|z|²}`,
/// rescaled by the value of the kernel at the origin to `z^j/√j!`.
pub fn segal_bargmann_immersion(cutoff: usize, radius: f64, tol: f64) -> Result<SegalBargmann> {
    let tail = segal_bargmann_tail(cutoff, radius);
    if !(tail <= tol) {
        return Err(GeometryError::Truncation { bound: tail, tol });
    }
    let model = LineBundleModel::gaussian(cutoff)?;
    let basis = orthonormalize_sections(&model, &Quadrature::default())?.rescaled_at(&[0.0, 0.0])?;
    Ok(SegalBargmann {
        embedding: kodaira_cr_embedding(&basis)?,
        radius,
        tail_bound: tail,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::immersions::sections::{bergman_kernel, rescale};

    #[test]
    fn cone_map_norm_is_root_kernel() {
        let m = LineBundleModel::projective(1, 2).unwrap();
        let b = orthonormalize_sections(&m, &Quadrature::default()).unwrap();
        let f = kodaira_cone_map(&b).unwrap();
        for q in f.source().sample(2, 20).unwrap() {
            let r = tau_ratio(&f, 2, &q).unwrap();
            assert!((r * r - 3.0 / PI).abs() < 1e-10);
        }
    }

    #[test]
    fn raw_basis_is_refused() {
        let m = LineBundleModel::projective(1, 1).unwrap();
        let b = orthonormalize_sections(&m, &Quadrature::default()).unwrap();
        assert!(kodaira_cr_embedding(&b).is_err());
        let pts = m.base().chart().sample(1, 10).unwrap();
        let r = rescale(&b, &pts, 1e-8).unwrap();
        assert!(kodaira_cr_embedding(&r).is_ok());
        assert!((bergman_kernel(&r, &[0.2, 0.1]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn segal_bargmann_tail_is_checked() {
        assert!(matches!(
            segal_bargmann_immersion(5, 1.0, 1e-8),
            Err(GeometryError::Truncation { .. })
        ));
        let sb = segal_bargmann_immersion(20, 1.0, 1e-8).unwrap();
        assert!(sb.tail_bound < 1e-8);
    }
}
