use std::sync::Arc;

use crate::chart::Chart;
use crate::complex::{angular_form, norm_sq};
use crate::error::{GeometryError, Result};
use crate::field::OneForm;
use crate::jet::Jet;
use crate::map::{ConeLift, SmoothMap};
use crate::space_forms::{
    heisenberg_structure, horizontal_lift_structure, kahler_space_form, sasakian_space_form, sphere_point,
    ContactMetricStructure, Family, KahlerStructure, SpaceFormSpec,
};

use super::multi_index::{degree, ln_factorial, ln_multi_factorial, monomial, MultiIndexBasis};

/// `M(n, c) → M(N, c)`: `(t, z) ↦ (t, z, 0)` for `c ≤ −3`, and the
/// restriction of `ℂ^{n+1} ⊂ ℂ^{N+1}` to spheres for `c > −3`.
pub fn linear_inclusion(n: usize, big_n: usize, c: f64) -> Result<SmoothMap> {
    if n > big_n {
        return Err(GeometryError::Parameter(format!("linear inclusion needs n <= N, got {n} > {big_n}")));
    }
    let src = sasakian_space_form(SpaceFormSpec::from_c(n, c)?)?;
    let tgt = sasakian_space_form(SpaceFormSpec::from_c(big_n, c)?)?;
    let label = format!("ι[{n}→{big_n}]");
    if n == big_n {
        return Ok(SmoothMap::identity(src.chart().clone()).with_label(label));
    }
    let extra = 2 * (big_n - n);
    match Family::of(c) {
        Family::Elliptic => {
            let map = SmoothMap::from_fn(label.clone(), src.chart().clone(), tgt.chart().clone(), move |u| {
                let mut x = sphere_point(u);
                x.extend(std::iter::repeat_n(Jet::constant(0.0), extra - 1));
                x
            });
            let cone_src = Arc::new(Chart::product(
                format!("C({})", src.chart().label()),
                &[src.chart(), &cone_radius_chart()],
            ));
            let dim_amb = 2 * big_n + 2;
            let lift = SmoothMap::from_fn(
                format!("C{label}"),
                cone_src,
                Arc::new(Chart::euclidean(format!("C^{}", big_n + 1), dim_amb, 2.0)),
                move |q| {
                    let m = q.len() - 1;
                    let mut x: Vec<Jet> = sphere_point(&q[..m]).iter().map(|v| v * &q[m]).collect();
                    x.extend(std::iter::repeat_n(Jet::constant(0.0), extra));
                    x
                },
            );
            Ok(map.with_cone(ConeLift { map: lift, exponent: 1.0 }))
        }
        _ => Ok(SmoothMap::from_fn(label, src.chart().clone(), tgt.chart().clone(), move |x| {
            let mut y = x.to_vec();
            y.extend(std::iter::repeat_n(Jet::constant(0.0), extra));
            y
        })),
    }
}

/// The radial cone coordinate `t > 0`.
pub fn cone_radius_chart() -> Chart {
    Chart::new(
        "t>0",
        1,
        Arc::new(|p: &[f64]| p[0] > 0.0 && p[0].is_finite()),
        vec![crate::chart::SampleBlock::Interval { lo: 0.5, hi: 2.0 }],
    )
    .expect("nonempty")
}

/// Truncated Calabi map of the ball `F(n, b)` into flat `ℂ^M`.
#[derive(Clone, Debug)]
pub struct CalabiMap {
    pub map: SmoothMap,
    pub basis: MultiIndexBasis,
    pub b: f64,
    pub coefficients: Vec<f64>,
}

impl CalabiMap {
    /// Bound on the metric residual at `|z| ≤ r`:
    /// `2 Σ_{m>d} m q^{m−1}` with `q = |b| r²`.
    pub fn tail_bound(&self, r: f64) -> f64 {
        calabi_tail_bound(self.b, self.basis.cutoff(), r)
    }

    pub fn target_complex_dim(&self) -> usize {
        self.basis.len()
    }
}

pub fn calabi_tail_bound(b: f64, d: usize, r: f64) -> f64 {
    let q = b.abs() * r * r;
    if q >= 1.0 {
        return f64::INFINITY;
    }
    let d = d as i32;
    2.0 * (f64::from(d + 1) * q.powi(d) * (1.0 - q) + q.powi(d + 1)) / ((1.0 - q) * (1.0 - q))
}

/// `√(|b|^{|j|−1} (|j|−1)!/j!)`; at `b = −1` this is `√((|j|−1)!/j!)`.
pub fn calabi_coefficient(b: f64, j: &[u32]) -> f64 {
    let m = degree(j);
    (f64::from(m - 1) * b.abs().ln() + ln_factorial(m - 1) - ln_multi_factorial(j))
        .mul_add(0.5, 0.0)
        .exp()
}

/// `f(z) = (…, √(|b|^{|j|−1}(|j|−1)!/j!) z^j, …)` for `1 ≤ |j| ≤ d`, so that
/// `|f|² = −log(1 + b|z|²)/|b|` up to the truncation and
/// `f*ω_flat = ω_hyp`.
pub fn calabi_map(n: usize, b: f64, cutoff: usize) -> Result<CalabiMap> {
    if !(b < 0.0) {
        return Err(GeometryError::Parameter(format!("Calabi map needs b < 0, got {b}")));
    }
    let basis = MultiIndexBasis::new(n, cutoff)?;
    let source = kahler_space_form(n, b)?;
    let m = basis.len();
    let target = Arc::new(Chart::euclidean(format!("C^{m}"), 2 * m, 2.0));
    let coefficients: Vec<f64> = basis.indices().iter().map(|j| calabi_coefficient(b, j)).collect();
    let (idx, coef) = (basis.indices().to_vec(), coefficients.clone());
    let map = SmoothMap::from_fn(format!("calabi[{n},{b},d={cutoff}]"), source.chart().clone(), target, move |z| {
        let mut out = Vec::with_capacity(2 * idx.len());
        for (j, c) in idx.iter().zip(&coef) {
            let (re, im) = monomial(z, j);
            out.push(re.scale(*c));
            out.push(im.scale(*c));
        }
        out
    });
    Ok(CalabiMap {
        map,
        basis,
        b,
        coefficients,
    })
}

/// Product immersion for `c = −3` with its source and target structures.
#[derive(Clone, Debug)]
pub struct NullProductImmersion {
    pub map: SmoothMap,
    pub source: ContactMetricStructure,
    pub target: ContactMetricStructure,
    pub parts: Vec<CalabiMap>,
}

impl NullProductImmersion {
    pub fn tail_bound(&self, r: f64) -> f64 {
        self.parts.iter().map(|p| p.tail_bound(r)).fold(0.0, f64::max)
    }
}

/// `ℝ × ℂ^k × Π F(n_i, b_i) → M(N', −3)`,
/// `(t, z_0, z_1, …) ↦ (t, z_0, f_1(z_1), …)`, with
/// `N' = k + Σ (C(n_i + d, d) − 1)`. The source carries
/// `η = dt + d^c(|z_0|²/2 + Σ ψ_i)` over the product Kähler base.
pub fn product_immersion_null(k: usize, parts: &[(usize, f64)], cutoff: usize) -> Result<NullProductImmersion> {
    if k == 0 && parts.is_empty() {
        return Err(GeometryError::Parameter("product immersion needs k >= 1 or a hyperbolic factor".into()));
    }
    let calabi: Vec<CalabiMap> = parts
        .iter()
        .map(|&(n, b)| calabi_map(n, b, cutoff))
        .collect::<Result<_>>()?;
    let mut factors: Vec<KahlerStructure> = Vec::new();
    let mut betas: Vec<(usize, Option<f64>)> = Vec::new();
    if k > 0 {
        factors.push(kahler_space_form(k, 0.0)?);
        betas.push((2 * k, None));
    }
    for &(n, b) in parts {
        factors.push(kahler_space_form(n, b)?);
        betas.push((2 * n, Some(b)));
    }
    let label = format!(
        "C^{k}×{}",
        parts.iter().map(|(n, b)| format!("F({n},{b})")).collect::<Vec<_>>().join("×")
    );
    let base = KahlerStructure::product(label.clone(), &factors)?;
    let beta = OneForm::from_fn(base.chart().clone(), {
        let betas = betas.clone();
        move |x| {
            let mut out = Vec::with_capacity(x.len());
            let mut off = 0;
            for (d, b) in &betas {
                let z = &x[off..off + d];
                let c = match b {
                    None => Jet::constant(1.0),
                    Some(b) => (norm_sq(z).scale(*b) + 1.0).recip(),
                };
                out.extend(angular_form(z, &c));
                off += d;
            }
            out
        }
    });
    let source = horizontal_lift_structure(format!("ℝ×{label}"), base, beta, (-2.0, 2.0))?
        .with_phi_curvature(if parts.is_empty() { Some(-3.0) } else { None });
    let big_n = k + calabi.iter().map(CalabiMap::target_complex_dim).sum::<usize>();
    let target = heisenberg_structure(big_n)?;
    let rules: Vec<_> = calabi.iter().map(|c| c.map.rule().clone()).collect();
    let dims: Vec<usize> = parts.iter().map(|(n, _)| 2 * n).collect();
    let map = SmoothMap::from_fn(
        format!("({})", label),
        source.chart().clone(),
        target.chart().clone(),
        move |x| {
            let mut y: Vec<Jet> = x[..1 + 2 * k].to_vec();
            let mut off = 1 + 2 * k;
            for (d, r) in dims.iter().zip(&rules) {
                y.extend(r(&x[off..off + d]));
                off += d;
            }
            y
        },
    );
    Ok(NullProductImmersion {
        map,
        source,
        target,
        parts: calabi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::pullback_two_form;

    #[test]
    fn coefficients_at_b_minus_one() {
        assert_eq!(calabi_coefficient(-1.0, &[1]), 1.0);
        assert!((calabi_coefficient(-1.0, &[2]) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((calabi_coefficient(-1.0, &[1, 1]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn calabi_pullback_is_hyperbolic_form() {
        let c = calabi_map(1, -1.0, 25).unwrap();
        let src = kahler_space_form(1, -1.0).unwrap();
        let flat = kahler_space_form(c.target_complex_dim(), 0.0).unwrap();
        for p in [[0.3, 0.1], [-0.2, 0.4], [0.0, -0.5]] {
            let w = pullback_two_form(&c.map, flat.omega(), &p).unwrap();
            assert!((w - src.omega().value(&p).unwrap()).amax() < 1e-8);
        }
        assert!(c.tail_bound(0.5) < 1e-7);
    }

    #[test]
    fn inclusion_rejects_bad_dimensions() {
        assert!(linear_inclusion(3, 2, 1.0).is_err());
        assert!(calabi_map(1, 0.5, 3).is_err());
    }
}
