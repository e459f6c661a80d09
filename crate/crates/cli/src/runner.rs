use std::sync::Arc;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use sasaki_core::immersions::{
    bergman_kernel, calabi_map, integrate_volume, kodaira_cr_embedding, linear_inclusion, orthonormalize_sections,
    product_immersion_null, rescale, segal_bargmann_immersion, KodairaEmbedding, Quadrature, SectionBasis,
};
use sasaki_core::space_forms::{
    ball_radius, boothby_wang_sphere_presentation, heisenberg_structure, hyperbolic_structure, kahler_space_form,
    sasakian_space_form, sphere_structure, ContactMetricStructure, LineBundleModel, SpaceFormSpec,
};
use sasaki_core::transforms::{d_homothety, HomothetyRatio};
use sasaki_core::verification::{
    axiom_suite, curvature_suite, evaluate, holomorphic_curvature_suite, immersion_residuals, immersion_suite,
    immersion_suite_points, kahler_suite, random_unitary, recover_rigid_transform, sample_rng, scale_image,
    with_defect, ReportBuilder, RigidKind, RigidTransform, VerificationReport,
};
use sasaki_core::{Chart, GeometryError, SampleBlock, SmoothMap};

use crate::config::{DefectTarget, Plan, StructureKind, Suite};

type Result<T> = sasaki_core::Result<T>;

const CALABI_STEP: usize = 5;
const MONOTONE_SLACK: f64 = 1.1;

fn contact_structure(p: &Plan) -> Result<ContactMetricStructure> {
    let s = match p.structure {
        StructureKind::Sphere => match p.c_value() {
            Some(c) => sasakian_space_form(SpaceFormSpec::from_c(p.n, c)?)?,
            None => sphere_structure(p.n)?,
        },
        StructureKind::Heisenberg => heisenberg_structure(p.n)?,
        StructureKind::Hyperbolic => hyperbolic_structure(p.n, p.c_value().expect("validated"))?,
        StructureKind::BoothbyWang => boothby_wang_sphere_presentation(&LineBundleModel::projective(p.n, p.k)?)?,
        StructureKind::Kahler => {
            return Err(GeometryError::Parameter("kahler is not a contact structure".into()));
        }
    };
    let s = match p.a {
        Some(a) => d_homothety(&s, HomothetyRatio::new(a)?)?,
        None => s,
    };
    Ok(match p.defect {
        Some((DefectTarget::Tensor(t), f)) => with_defect(&s, t, f),
        _ => s,
    })
}

fn kahler_b(p: &Plan) -> f64 {
    p.b_value().unwrap_or(0.0)
}

/// Chart of `ℝ × {|z| < r}` sampled with `t ∈ [−2, 2]`.
fn ball_bundle_chart(label: &str, n: usize, r: f64) -> Chart {
    let t = Chart::new("t", 1, Arc::new(|_: &[f64]| true), vec![SampleBlock::Interval { lo: -2.0, hi: 2.0 }])
        .expect("nonempty");
    let ball = Chart::new(
        format!("|z|<{r}"),
        2 * n,
        Arc::new(move |q: &[f64]| q.iter().map(|v| v * v).sum::<f64>() < r * r),
        vec![SampleBlock::Ball { dim: 2 * n, radius: r }],
    )
    .expect("nonempty");
    Chart::product(label, &[&t, &ball])
}

fn sections(p: &Plan) -> Result<(LineBundleModel, SectionBasis)> {
    let model = LineBundleModel::projective(p.n, p.k)?;
    let basis = orthonormalize_sections(&model, &Quadrature::default())?;
    Ok((model, basis))
}

fn kodaira(p: &Plan) -> Result<KodairaEmbedding> {
    let (model, basis) = sections(p)?;
    let pts = model.base().chart().sample(p.seed, p.samples.max(20))?;
    kodaira_cr_embedding(&rescale(&basis, &pts, 1e-6)?)
}

fn axioms(p: &Plan) -> Result<VerificationReport> {
    if p.structure == StructureKind::Kahler {
        return kahler_suite(&kahler_space_form(p.n, kahler_b(p))?, p.samples, p.seed, p.tol);
    }
    axiom_suite(&contact_structure(p)?, p.samples, p.seed, p.tol)
}

fn curvature(p: &Plan) -> Result<VerificationReport> {
    if p.structure == StructureKind::Kahler {
        let b = kahler_b(p);
        let k = kahler_space_form(p.n, b)?;
        return holomorphic_curvature_suite(&k, p.expected.unwrap_or(4.0 * b), p.samples, p.seed, p.tol);
    }
    let s = contact_structure(p)?;
    let expected = p
        .expected
        .or(s.phi_curvature())
        .ok_or_else(|| GeometryError::Parameter(format!("`{}` has no known φ-curvature; pass --expected", s.label())))?;
    curvature_suite(&s, expected, p.samples, p.seed, p.tol)
}

fn map_defect(p: &Plan, map: SmoothMap, from: usize) -> SmoothMap {
    match p.defect {
        Some((DefectTarget::Map, f)) => scale_image(&map, f, from),
        _ => map,
    }
}

fn immersion(p: &Plan) -> Result<VerificationReport> {
    match p.structure {
        StructureKind::Sphere | StructureKind::Heisenberg | StructureKind::Hyperbolic => {
            let c = match p.structure {
                StructureKind::Heisenberg => -3.0,
                _ => p.c_value().unwrap_or(1.0),
            };
            let s1 = sasakian_space_form(SpaceFormSpec::from_c(1, c)?)?;
            let s2 = sasakian_space_form(SpaceFormSpec::from_c(p.n, c)?)?;
            let from = if c > -3.0 { 0 } else { 1 };
            let map = map_defect(p, linear_inclusion(1, p.n, c)?, from);
            immersion_suite(&map, &s1, &s2, p.samples, p.seed, p.tol)
        }
        StructureKind::BoothbyWang => {
            let e = kodaira(p)?;
            let map = map_defect(p, e.map.clone(), 0);
            immersion_suite(&map, &e.source, &e.target, p.samples, p.seed, p.tol)
        }
        StructureKind::Kahler => {
            let b = kahler_b(p);
            if b == 0.0 {
                let sb = segal_bargmann_immersion(p.cutoff.unwrap_or(40), 1.0, p.tol)?;
                let e = sb.embedding;
                let chart = ball_bundle_chart("S^1×{|z|<1}", 1, 1.0);
                let pts = chart.sample(p.seed, p.samples)?;
                let map = map_defect(p, e.map.clone(), 0);
                return immersion_suite_points(&map, &e.source, &e.target, &pts, p.seed, p.tol);
            }
            let im = product_immersion_null(0, &[(p.n, b)], p.cutoff.unwrap_or(25))?;
            let r = 0.5 * ball_radius(b);
            let pts = ball_bundle_chart("half ball", p.n, r).sample(p.seed, p.samples)?;
            let map = map_defect(p, im.map.clone(), 1);
            let mut rep = immersion_suite_points(&map, &im.source, &im.target, &pts, p.seed, p.tol)?;
            rep.notes.push(format!("tail bound at |z| = {r}: {:e}", im.tail_bound(r)));
            Ok(rep)
        }
    }
}

fn matrix_distance(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn rigidity(p: &Plan) -> Result<VerificationReport> {
    let (phi1, phi2, source, target, spec, truth) = match p.structure {
        StructureKind::BoothbyWang => {
            let e = kodaira(p)?;
            let u0 = random_unitary(e.basis.len(), p.seed);
            let e1 = kodaira_cr_embedding(&e.basis.transformed(&u0)?)?;
            let spec = SpaceFormSpec::from_c(e.basis.len() - 1, 1.0)?;
            let mut t = RigidTransform::identity(RigidKind::Unitary, spec.n());
            t.u = u0;
            (e1.map, e.map, e.source, e.target, spec, t)
        }
        StructureKind::Sphere | StructureKind::Heisenberg => {
            let c = if p.structure == StructureKind::Heisenberg { -3.0 } else { p.c_value().unwrap_or(1.0) };
            let spec = SpaceFormSpec::from_c(p.n, c)?;
            let s = sasakian_space_form(spec)?;
            let id = SmoothMap::identity(s.chart().clone());
            let mut t = if c > -3.0 {
                RigidTransform::identity(RigidKind::Unitary, p.n)
            } else {
                RigidTransform::identity(RigidKind::Product, p.n)
            };
            t.u = random_unitary(t.u.nrows(), p.seed);
            if t.kind == RigidKind::Product {
                t.a = p.a.unwrap_or(0.7);
                let mut rng = sample_rng(p.seed, 1);
                t.w = DVector::from_fn(p.n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            }
            (t.compose(&id), id, s.clone(), s, spec, t)
        }
        _ => return Err(GeometryError::Unsupported("rigidity structure".into())),
    };
    let t = recover_rigid_transform(&phi1, &phi2, &source, spec, p.samples.max(4), p.seed, p.tol)?;
    let round = t.compose(&phi2);
    let u_error = matrix_distance(&t.u, &truth.u);
    let a_error = (t.a - truth.a).abs();
    let w_error = (&t.w - &truth.w).iter().map(|c| c.norm()).fold(0.0, f64::max);
    let unitarity = t.unitarity_defect();
    let columns = [
        "alignment",
        "u_error",
        "a_error",
        "w_error",
        "unitarity",
        "roundtrip_eta",
        "roundtrip_metric",
        "roundtrip_reeb",
        "roundtrip_phi",
    ];
    let mut b = ReportBuilder::new("rigidity", &format!("{} ≅ {}", phi1.label(), phi2.label()), p.seed, p.tol, &columns)
        .tolerance_for("alignment", 10.0 * p.tol)
        .tolerance_for("u_error", 10.0 * p.tol);
    for col in ["roundtrip_eta", "roundtrip_metric", "roundtrip_reeb", "roundtrip_phi"] {
        b = b.tolerance_for(col, 1e-8f64.max(p.tol));
    }
    let points = source.chart().sample(p.seed, p.samples.max(4))?;
    let holdout: Vec<Vec<f64>> = points.iter().skip(1).step_by(2).cloned().collect();
    let rows = evaluate(&holdout, |_, x| {
        let y1 = phi1.image(x)?;
        let ty = t.apply_point(&phi2.image(x)?);
        let align = y1.iter().zip(&ty).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let r = immersion_residuals(&round, &source, &target, x)?;
        Ok(vec![align, u_error, a_error, w_error, unitarity, r[0], r[1], r[2], r[3]])
    })?;
    Ok(b.finish(rows))
}

fn bergman(p: &Plan) -> Result<VerificationReport> {
    if p.structure == StructureKind::Kahler {
        let cutoff = p.cutoff.unwrap_or(40);
        let sb = segal_bargmann_immersion(cutoff, 1.0, p.tol)?;
        let basis = &sb.embedding.basis;
        let gram = gram_defect(basis);
        let disc = Chart::new(
            "|z|<1",
            2,
            Arc::new(|q: &[f64]| q[0] * q[0] + q[1] * q[1] < 1.0),
            vec![SampleBlock::Ball { dim: 2, radius: 1.0 }],
        )?;
        let pts = disc.sample(p.seed, p.samples)?;
        let b = ReportBuilder::new("bergman", basis.model().label(), p.seed, p.tol, &["gram_identity", "epsilon"]);
        let rows = evaluate(&pts, |_, x| Ok(vec![gram, (bergman_kernel(basis, x)? - 1.0).abs()]))?;
        return Ok(b.finish(rows));
    }
    let (model, basis) = sections(p)?;
    let q = Quadrature::default();
    let nodes = q.nodes(model.base().complex_dim(), model.decay(), 0, 1)?;
    let volume = integrate_volume(&model, &nodes, |_| Ok(1.0))?;
    let nodes = q.nodes(model.base().complex_dim(), model.decay(), model.degree(), 1)?;
    let total = integrate_volume(&model, &nodes, |x| bergman_kernel(&basis, x))?;
    let pts = model.base().chart().sample(p.seed, p.samples)?;
    let values: Vec<f64> = pts.iter().map(|x| bergman_kernel(&basis, x)).collect::<Result<_>>()?;
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let dim = basis.len() as f64;
    let gram = gram_defect(&basis);
    let oracle = (mean * volume - dim).abs() / dim;
    let integral = (total - dim).abs() / dim;
    let b = ReportBuilder::new(
        "bergman",
        basis.model().label(),
        p.seed,
        p.tol,
        &["gram_identity", "variation", "volume_oracle", "kernel_integral"],
    );
    let rows = evaluate(&pts, |i, _| Ok(vec![gram, (values[i] - mean).abs() / mean, oracle, integral]))?;
    let mut rep = b.finish(rows);
    rep.notes.push(format!("B = {mean:.15e}, volume = {volume:.15e}, sections = {dim}"));
    Ok(rep)
}

fn gram_defect(basis: &SectionBasis) -> f64 {
    let g = basis.section_gram();
    let d = g.nrows();
    let target = if let Some(b) = basis.bergman_constant() {
        DMatrix::<Complex64>::identity(d, d) / Complex64::new(b, 0.0)
    } else {
        DMatrix::identity(d, d)
    };
    matrix_distance(&g, &target) / target[(0, 0)].norm()
}

fn calabi_sweep(p: &Plan) -> Result<VerificationReport> {
    let b = p.b_value().unwrap_or(-1.0);
    let top = p.cutoff.unwrap_or(25);
    let mut cutoffs: Vec<usize> = (1..=top / CALABI_STEP).map(|i| i * CALABI_STEP).collect();
    if cutoffs.last() != Some(&top) {
        cutoffs.push(top);
    }
    let r = 0.5 * ball_radius(b);
    let pts = ball_bundle_chart("half ball", p.n, r).sample(p.seed, p.samples)?;
    let maps: Vec<_> = cutoffs
        .iter()
        .map(|&d| product_immersion_null(0, &[(p.n, b)], d))
        .collect::<Result<_>>()?;
    let names: Vec<String> = cutoffs.iter().map(|d| format!("d={d:02}")).collect();
    let mut columns: Vec<&str> = names.iter().map(String::as_str).collect();
    columns.push("monotonicity");
    let mut builder = ReportBuilder::new("calabi-sweep", &format!("calabi F({},{b})", p.n), p.seed, p.tol, &columns);
    for name in &names[..names.len() - 1] {
        builder = builder.tolerance_for(name, f64::INFINITY);
    }
    let rows = evaluate(&pts, |_, x| {
        maps.iter()
            .map(|m| Ok(immersion_residuals(&m.map, &m.source, &m.target, x)?.into_iter().fold(0.0, f64::max)))
            .collect::<Result<Vec<f64>>>()
    })?;
    let maxima: Vec<f64> = (0..cutoffs.len())
        .map(|c| rows.iter().map(|r| r.residuals[c]).fold(0.0, f64::max))
        .collect();
    let increase = maxima
        .windows(2)
        .map(|w| (w[1] - MONOTONE_SLACK * w[0]).max(0.0))
        .fold(0.0, f64::max);
    let rows = rows
        .into_iter()
        .map(|mut r| {
            r.residuals.push(increase);
            r
        })
        .collect();
    let mut rep = builder.finish(rows);
    let tails: Vec<String> = cutoffs
        .iter()
        .map(|&d| Ok(format!("d={d}: {:e}", calabi_map(p.n, b, d)?.tail_bound(r))))
        .collect::<Result<_>>()?;
    rep.notes.push(format!("tail bounds: {}", tails.join(", ")));
    Ok(rep)
}

/// Executes a validated plan.
pub fn execute(p: &Plan) -> Result<VerificationReport> {
    match p.suite {
        Suite::Axioms => axioms(p),
        Suite::Curvature => curvature(p),
        Suite::Immersion => immersion(p),
        Suite::Rigidity => rigidity(p),
        Suite::Bergman => bergman(p),
        Suite::CalabiSweep => calabi_sweep(p),
    }
}

/// A failed report carrying the error, for runs that could not finish.
pub fn error_report(p: &Plan, err: &GeometryError, started: Instant) -> VerificationReport {
    let mut rep = ReportBuilder::new(p.suite.name(), p.structure.name(), p.seed, p.tol, &[]).finish(Vec::new());
    rep.notes.push(err.to_string());
    rep.wall_time_s = started.elapsed().as_secs_f64();
    rep
}
