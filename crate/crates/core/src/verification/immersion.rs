use crate::error::{GeometryError, Result};
use crate::jet::Jet;
use crate::map::SmoothMap;
use crate::space_forms::ContactMetricStructure;

use super::axioms::check_samples;
use super::report::{evaluate, ReportBuilder, VerificationReport};

const CONE_RADII: [f64; 3] = [0.5, 1.0, 2.0];

/// Residuals of `φ*η₂ = η₁`, `φ*g₂ = g₁`, `φ_*R₁ = R₂∘φ` and
/// `φ_*Φ₁ = Φ₂φ_*` at one source point, plus the cone radius identity when
/// the map carries a cone lift.
pub fn immersion_residuals(
    map: &SmoothMap,
    s1: &ContactMetricStructure,
    s2: &ContactMetricStructure,
    p: &[f64],
) -> Result<Vec<f64>> {
    let (y, jac) = map.jacobian(p)?;
    let e1 = s1.eta().value(p)?;
    let g1 = s1.g().value(p)?;
    let r1 = s1.reeb().value(p)?;
    let ph1 = s1.phi().value(p)?;
    let e2 = s2.eta().value(&y)?;
    let g2 = s2.g().value(&y)?;
    let r2 = s2.reeb().value(&y)?;
    let ph2 = s2.phi().value(&y)?;

    let eta = (jac.transpose() * &e2 - &e1).amax() / (1.0 + e1.amax());
    let metric = (jac.transpose() * &g2 * &jac - &g1).amax() / (1.0 + g1.amax());
    let reeb = (&jac * &r1 - &r2).amax() / (1.0 + r2.amax());
    let lhs = &jac * &ph1;
    let phi = (&lhs - &ph2 * &jac).amax() / (1.0 + lhs.amax());
    let mut out = vec![eta, metric, reeb, phi];
    if let Some(cone) = map.cone() {
        let mut worst: f64 = 0.0;
        for t in CONE_RADII {
            let mut q = p.to_vec();
            q.push(t);
            let z = cone.map.apply(&Jet::seed(&q, 0));
            let r = z.iter().map(|v| v.value() * v.value()).sum::<f64>().sqrt();
            let want = t.powf(cone.exponent);
            worst = worst.max((r - want).abs() / want);
        }
        out.push(worst);
    }
    Ok(out)
}

/// The Sasakian-immersion identities at seeded source points.
pub fn immersion_suite(
    map: &SmoothMap,
    s1: &ContactMetricStructure,
    s2: &ContactMetricStructure,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    check_samples(samples)?;
    let points = s1.chart().sample(seed, samples)?;
    immersion_suite_points(map, s1, s2, &points, seed, tol)
}

/// The immersion suite at caller-supplied source points.
pub fn immersion_suite_points(
    map: &SmoothMap,
    s1: &ContactMetricStructure,
    s2: &ContactMetricStructure,
    points: &[Vec<f64>],
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    check_samples(points.len())?;
    if map.source().dim() != s1.dim() || map.target().dim() != s2.dim() {
        return Err(GeometryError::Dimension(format!(
            "map `{}` is {}→{}, structures are {}→{}",
            map.label(),
            map.source().dim(),
            map.target().dim(),
            s1.dim(),
            s2.dim()
        )));
    }
    let mut columns = vec!["eta", "metric", "reeb", "phi"];
    if map.cone().is_some() {
        columns.push("cone_radius");
    }
    let b = ReportBuilder::new("immersion", &format!("{}: {} → {}", map.label(), s1.label(), s2.label()), seed, tol, &columns);
    let rows = evaluate(points, |_, p| immersion_residuals(map, s1, s2, p))?;
    Ok(b.finish(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space_forms::sphere_structure;

    #[test]
    fn identity_passes() {
        let s = sphere_structure(1).unwrap();
        let id = SmoothMap::identity(s.chart().clone());
        let r = immersion_suite(&id, &s, &s, 30, 1, 1e-12).unwrap();
        assert!(r.pass, "{:?}", r.residuals);
    }
}
