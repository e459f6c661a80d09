use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{GeometryError, Result};
use crate::space_forms::{ContactMetricStructure, KahlerStructure};

use super::report::{evaluate, sample_rng, ReportBuilder, VerificationReport};

pub const AXIOMS: [&str; 6] = [
    "eta_reeb",
    "reeb_in_kernel_deta",
    "phi_squared",
    "metric_compat",
    "killing",
    "tame_positivity",
];

fn random_vector(seed: u64, index: usize, n: usize) -> DVector<f64> {
    let mut rng = sample_rng(seed, index);
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

pub(crate) fn check_samples(samples: usize) -> Result<()> {
    if samples < 1 {
        return Err(GeometryError::Parameter("samples must be >= 1".into()));
    }
    Ok(())
}

/// Residuals of the six defining identities of a Sasakian structure at one
/// point, each normalized as `|Δ| / (1 + scale)`.
pub fn axiom_residuals(s: &ContactMetricStructure, p: &[f64], x: &DVector<f64>) -> Result<Vec<f64>> {
    let n = s.dim();
    let e = s.eta().value(p)?;
    let r = s.reeb().value(p)?;
    let ph = s.phi().value(p)?;
    let de = s.eta().exterior_derivative(p)?;

    let eta_reeb = (e.dot(&r) - 1.0).abs();
    let iota = de.transpose() * &r;
    let reeb_kernel = iota.amax() / (1.0 + de.amax() * r.amax());
    let phi2 = &ph * &ph + DMatrix::identity(n, n) - &r * e.transpose();
    let phi_squared = phi2.amax() / (1.0 + ph.amax() * ph.amax());

    let gj = s.g().jets(p, 1)?;
    let g = DMatrix::from_fn(n, n, |i, j| gj[i * n + j].value());
    let compat = &g - (&de * &ph * 0.5 + &e * e.transpose());
    let metric_compat = compat.amax() / (1.0 + g.amax());

    // (L_R g)_ij = R^k ∂_k g_ij + g_kj ∂_i R^k + g_ik ∂_j R^k
    let rj = s.reeb().jets(p, 1)?;
    let mut killing: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut a = 0.0;
            let mut b = 0.0;
            for k in 0..n {
                let t1 = r[k] * gj[i * n + j].d(k);
                let t2 = g[(k, j)] * rj[k].d(i);
                let t3 = g[(i, k)] * rj[k].d(j);
                a += t1 + t2 + t3;
                b += t1.abs() + t2.abs() + t3.abs();
            }
            killing = killing.max(a.abs());
            scale = scale.max(b);
        }
    }
    let killing = killing / (1.0 + scale);

    let xh = x - &r * e.dot(x);
    let q = 0.5 * (xh.transpose() * &de * &ph * &xh)[0] / xh.norm_squared().max(f64::MIN_POSITIVE);
    let tame = (-q).max(0.0);
    Ok(vec![eta_reeb, reeb_kernel, phi_squared, metric_compat, killing, tame])
}

/// The six Sasakian identities at `samples` seeded chart points.
pub fn axiom_suite(s: &ContactMetricStructure, samples: usize, seed: u64, tol: f64) -> Result<VerificationReport> {
    check_samples(samples)?;
    let b = ReportBuilder::new("axioms", s.label(), seed, tol, &AXIOMS);
    let points = s.chart().sample(seed, samples)?;
    let n = s.dim();
    let rows = evaluate(&points, |i, p| axiom_residuals(s, p, &random_vector(seed, i, n)))?;
    Ok(b.finish(rows))
}

pub const KAHLER_IDENTITIES: [&str; 4] = ["j_squared", "compat", "closed", "positivity"];

/// `J² = −Id`, `g = ω(·, J·)`, `dω = 0` and `g > 0` at sampled points.
pub fn kahler_suite(k: &KahlerStructure, samples: usize, seed: u64, tol: f64) -> Result<VerificationReport> {
    check_samples(samples)?;
    let b = ReportBuilder::new("axioms", k.label(), seed, tol, &KAHLER_IDENTITIES);
    let points = k.chart().sample(seed, samples)?;
    let n = k.dim();
    let rows = evaluate(&points, |_, p| {
        let j = k.j().value(p)?;
        let g = k.g().value(p)?;
        let wj = k.omega().jets(p, 1)?;
        let w = DMatrix::from_fn(n, n, |a, c| wj[a * n + c].value());
        let j2 = (&j * &j + DMatrix::identity(n, n)).amax();
        let compat = (&w * &j - &g).amax() / (1.0 + g.amax());
        let mut closed: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for a in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let v = wj[c * n + d].d(a) + wj[d * n + a].d(c) + wj[a * n + c].d(d);
                    closed = closed.max(v.abs());
                    scale = scale.max(wj[c * n + d].d(a).abs());
                }
            }
        }
        let ev = g.symmetric_eigenvalues().min();
        Ok(vec![j2, compat, closed / (1.0 + scale), (-ev).max(0.0)])
    })?;
    Ok(b.finish(rows))
}
