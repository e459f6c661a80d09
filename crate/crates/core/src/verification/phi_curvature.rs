use nalgebra::DVector;
use rand::Rng;

use crate::curvature::curvature_at;
use crate::error::{GeometryError, Result};
use crate::space_forms::{ContactMetricStructure, KahlerStructure};

use super::axioms::check_samples;
use super::report::{evaluate, sample_rng, ReportBuilder, VerificationReport};

const RESAMPLE: usize = 10;

/// One `(X, ΦX)` evaluation: `X ⊥ R` with `|X|_g = 1`.
#[derive(Clone, Debug)]
pub struct PhiSection {
    pub h: f64,
    pub transverse: Option<f64>,
    pub frame: f64,
    pub resampled: usize,
}

/// `H(X) = Sec(X, ΦX)` at `p` for a seeded random `X ⊥ R`, together with
/// `Sec^T(π_*X, π_*ΦX)` on the transverse base when available.
pub fn phi_section(s: &ContactMetricStructure, p: &[f64], seed: u64, index: usize) -> Result<PhiSection> {
    if !s.supports_curvature() {
        return Err(GeometryError::State(format!(
            "`{}` does not carry second derivatives of its metric",
            s.label()
        )));
    }
    let n = s.dim();
    let curv = curvature_at(s.g(), p)?;
    let g = &curv.metric;
    let e = s.eta().value(p)?;
    let r = s.reeb().value(p)?;
    let ph = s.phi().value(p)?;
    let base = s.transverse().map(|t| -> Result<_> {
        let (q, jac) = t.projection.jacobian(p)?;
        Ok((curvature_at(t.base.g(), &q)?, jac))
    });
    let base = base.transpose()?;
    let mut rng = sample_rng(seed, index);
    let mut last = GeometryError::DegeneratePlane { denominator: 0.0 };
    for attempt in 0..RESAMPLE {
        let v = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let x = &v - &r * e.dot(&v);
        let norm = (x.transpose() * g * &x)[0].sqrt();
        if !(norm > 1e-12) {
            continue;
        }
        let x = x / norm;
        let y = &ph * &x;
        let h = match curv.sectional(&x, &y) {
            Ok(h) => h,
            Err(err) => {
                last = err;
                continue;
            }
        };
        let transverse = match &base {
            Some((bc, jac)) => match bc.sectional(&(jac * &x), &(jac * &y)) {
                Ok(k) => Some(k),
                Err(err) => {
                    last = err;
                    continue;
                }
            },
            None => None,
        };
        let yy = (y.transpose() * g * &y)[0];
        let frame = [
            (yy.sqrt() - 1.0).abs(),
            (x.transpose() * g * &r)[0].abs(),
            (y.transpose() * g * &r)[0].abs(),
            (x.transpose() * g * &y)[0].abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        return Ok(PhiSection {
            h,
            transverse,
            frame,
            resampled: attempt,
        });
    }
    Err(last)
}

/// `|H − c|/(1 + |c|)`, `|H − (Sec^T − 3)|` and the orthonormality of the
/// frame `(X, ΦX, R)` at seeded `(p, X)` pairs.
pub fn curvature_suite(
    s: &ContactMetricStructure,
    c_expected: f64,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    check_samples(samples)?;
    let with_t = s.transverse().is_some();
    let columns: &[&str] = if with_t {
        &["phi_curvature", "transverse_relation", "frame"]
    } else {
        &["phi_curvature", "frame"]
    };
    let mut b = ReportBuilder::new("curvature", s.label(), seed, tol, columns);
    let points = s.chart().sample(seed, samples)?;
    let sections: Vec<Result<PhiSection>> = {
        use rayon::prelude::*;
        points.par_iter().enumerate().map(|(i, p)| phi_section(s, p, seed, i)).collect()
    };
    let sections: Vec<PhiSection> = sections.into_iter().collect::<Result<_>>()?;
    let resampled: usize = sections.iter().map(|x| x.resampled).sum();
    if resampled > 0 {
        b.note(format!("{resampled} degenerate planes resampled"));
    }
    let rows = evaluate(&points, |i, _| {
        let x = &sections[i];
        let mut out = vec![(x.h - c_expected).abs() / (1.0 + c_expected.abs())];
        if let Some(t) = x.transverse {
            out.push((x.h - (t - 3.0)).abs());
        }
        out.push(x.frame);
        Ok(out)
    })?;
    Ok(b.finish(rows))
}

/// `|Sec(X, JX) − expected|/(1 + |expected|)` at seeded points.
pub fn holomorphic_curvature_suite(
    k: &KahlerStructure,
    expected: f64,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    check_samples(samples)?;
    let b = ReportBuilder::new("curvature", k.label(), seed, tol, &["holomorphic_curvature"]);
    let points = k.chart().sample(seed, samples)?;
    let n = k.dim();
    let rows = evaluate(&points, |i, p| {
        let mut rng = sample_rng(seed, i);
        let x = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let h = k.holomorphic_sectional_curvature(p, &x)?;
        Ok(vec![(h - expected).abs() / (1.0 + expected.abs())])
    })?;
    Ok(b.finish(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space_forms::{heisenberg_structure, sphere_structure};

    #[test]
    fn sphere_has_phi_curvature_one() {
        let s = sphere_structure(1).unwrap();
        let r = curvature_suite(&s, 1.0, 20, 3, 1e-6).unwrap();
        assert!(r.pass, "{:?}", r.residuals);
    }

    #[test]
    fn heisenberg_has_phi_curvature_minus_three() {
        let s = heisenberg_structure(1).unwrap();
        let r = curvature_suite(&s, -3.0, 20, 3, 1e-6).unwrap();
        assert!(r.pass, "{:?}", r.residuals);
        let r = curvature_suite(&s, -2.9, 20, 3, 1e-6).unwrap();
        assert!(!r.pass);
    }
}
