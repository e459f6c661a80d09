//! One line per acceptance criterion; exits non-zero when any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DVector;
use num_complex::Complex64;

use sasaki_cli::{report_json, run, RunConfig, StructureKind, Suite};
use sasaki_core::immersions::*;
use sasaki_core::space_forms::*;
use sasaki_core::transforms::*;
use sasaki_core::verification::*;
use sasaki_core::{Jet, OneForm, Result, ScalarField, SmoothMap};

type Criterion = (&'static str, fn() -> Result<Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn worst(r: &VerificationReport) -> f64 {
    r.residuals.values().map(|s| s.max).fold(0.0, f64::max)
}

fn models(n: usize) -> Result<Vec<ContactMetricStructure>> {
    Ok(vec![sphere_structure(n)?, heisenberg_structure(n)?, hyperbolic_structure(n, -7.0)?])
}

fn axioms() -> Result<Outcome> {
    let mut max: f64 = 0.0;
    let mut pass = true;
    for n in 1..=3 {
        for s in models(n)? {
            let r = axiom_suite(&s, 200, 7, 1e-8)?;
            pass &= r.pass && r.residuals.len() == 6;
            max = max.max(worst(&r));
        }
    }
    Ok(Outcome { pass, detail: format!("9 structures × 200 samples, max residual {max:.2e} (tol 1e-8)") })
}

fn curvature() -> Result<Outcome> {
    let (mut h, mut rel): (f64, f64) = (0.0, 0.0);
    let mut pass = true;
    for n in 1..=2 {
        for c in [1.0, -3.0, -7.0] {
            let s = sasakian_space_form(SpaceFormSpec::from_c(n, c)?)?;
            let r = curvature_suite(&s, c, 50, 11, 1e-6)?;
            let hc = r.max("phi_curvature").unwrap_or(f64::NAN);
            let tr = r.max("transverse_relation").unwrap_or(f64::NAN);
            pass &= r.pass && hc < 1e-6 && tr < 1e-6;
            h = h.max(hc);
            rel = rel.max(tr);
        }
    }
    Ok(Outcome {
        pass,
        detail: format!("c ∈ {{1, −3, −7}}: max |H − c|/(1+|c|) {h:.2e}, max |H − (Sec^T − 3)| {rel:.2e} (tol 1e-6)"),
    })
}

fn transforms() -> Result<Outcome> {
    let mut law: f64 = 0.0;
    let mut identity_exact = true;
    let mut axioms_pass = true;
    for s in models(1)? {
        let pts = s.chart().sample(3, 40)?;
        for (a, b) in [(2.0, 0.5), (0.3, 3.0), (1.7, 1.3)] {
            let two = d_homothety(&d_homothety(&s, HomothetyRatio::new(a)?)?, HomothetyRatio::new(b)?)?;
            let one = d_homothety(&s, HomothetyRatio::new(a * b)?)?;
            for p in &pts {
                law = law.max((two.g().value(p)? - one.g().value(p)?).amax());
                law = law.max((two.eta().value(p)? - one.eta().value(p)?).amax());
                law = law.max((two.reeb().value(p)? - one.reeb().value(p)?).amax());
                law = law.max((two.phi().value(p)? - one.phi().value(p)?).amax());
            }
            axioms_pass &= axiom_suite(&one, 50, 3, 1e-8)?.pass;
        }
        let id = d_homothety(&s, HomothetyRatio::new(1.0)?)?;
        for p in &pts {
            identity_exact &= id.g().value(p)? == s.g().value(p)?
                && id.eta().value(p)? == s.eta().value(p)?
                && id.reeb().value(p)? == s.reeb().value(p)?
                && id.phi().value(p)? == s.phi().value(p)?;
        }
    }
    let mut deform: f64 = 0.0;
    for n in 1..=2 {
        let s = heisenberg_structure(n)?;
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
        let bf = BasicFunction::new(&s, f, df)?;
        let t = transverse_deformation(&s, &bf)?;
        axioms_pass &= axiom_suite(&t, 100, 3, 1e-8)?.pass;
        for p in s.chart().sample(5, 50)? {
            let lhs = (t.eta().exterior_derivative(&p)? - s.eta().exterior_derivative(&p)?) * 0.5;
            deform = deform.max((lhs - basic_i_ddbar(&s, &bf, &p)?).amax());
        }
    }
    Ok(Outcome {
        pass: law < 1e-10 && identity_exact && axioms_pass && deform < 1e-9,
        detail: format!(
            "composition {law:.2e} (tol 1e-10), a=1 exact {identity_exact}, transformed axioms {axioms_pass}, ½dη̃ − ½dη − i∂∂̄f {deform:.2e} (tol 1e-9)"
        ),
    })
}

fn immersions() -> Result<Outcome> {
    let mut incl: f64 = 0.0;
    let mut pass = true;
    for c in [1.0, -3.0, -7.0] {
        for (n, big) in [(1, 2), (1, 3), (2, 3)] {
            let m = linear_inclusion(n, big, c)?;
            let s1 = sasakian_space_form(SpaceFormSpec::from_c(n, c)?)?;
            let s2 = sasakian_space_form(SpaceFormSpec::from_c(big, c)?)?;
            let r = immersion_suite(&m, &s1, &s2, 100, 5, 1e-9)?;
            pass &= r.pass;
            incl = incl.max(worst(&r));
        }
    }
    let mut cfg = RunConfig::new(Suite::CalabiSweep, StructureKind::Kahler);
    cfg.n = Some(1);
    cfg.b = Some(-1.0);
    cfg.cutoff = Some(25);
    cfg.samples = Some(100);
    cfg.seed = Some(5);
    cfg.tol = Some(1e-7);
    let sweep = run(&cfg).map_err(|e| sasaki_core::GeometryError::Parameter(e.to_string()))?.report;
    let maxima: Vec<f64> = [5, 10, 15, 20, 25]
        .iter()
        .map(|d| sweep.max(&format!("d={d:02}")).unwrap_or(f64::NAN))
        .collect();
    let monotone = maxima.windows(2).all(|w| w[1] < w[0]);
    let last = maxima[4];
    pass &= monotone && last < 1e-7;
    let shown: Vec<String> = maxima.iter().map(|v| format!("{v:.1e}")).collect();
    Ok(Outcome {
        pass,
        detail: format!(
            "inclusions max {incl:.2e} (tol 1e-9); Calabi on |z| ≤ 0.5 over d = 5..25: [{}], monotone {monotone}, d=25 < 1e-7",
            shown.join(", ")
        ),
    })
}

fn kodaira() -> Result<Outcome> {
    let q = Quadrature::default();
    let m = LineBundleModel::projective(1, 1)?;
    let b = orthonormalize_sections(&m, &q)?;
    let pts = m.base().chart().sample(13, 200)?;
    let e = kodaira_cr_embedding(&rescale(&b, &pts, 1e-6)?)?;
    let imm = immersion_suite(&e.map, &e.source, &e.target, 200, 13, 1e-7)?;
    let mut tau: f64 = 0.0;
    let mut var: f64 = 0.0;
    let mut oracle: f64 = 0.0;
    let fine = Quadrature { radial: 40, angular: 24, polar: 24, ..Quadrature::default() };
    for k in 1..=3u32 {
        let m = LineBundleModel::projective(1, k)?;
        let b = orthonormalize_sections(&m, &q)?;
        let cone = kodaira_cone_map(&b)?;
        let ratios: Vec<f64> = cone.source().sample(17, 200)?.iter().map(|p| tau_ratio(&cone, k, p)).collect::<Result<_>>()?;
        let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(l, h), r| (l.min(*r), h.max(*r)));
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        tau = tau.max((hi - lo) / mean);
        let (v, bk) = bergman_variation(&b, &m.base().chart().sample(19, 200)?)?;
        var = var.max(v);
        // ∫ Σ h^k |s_j|² against ∫ 1 on an independent, finer rule.
        let nodes = fine.nodes(1, m.decay(), m.degree(), 2)?;
        let total = integrate_volume(&m, &nodes, |x| {
            let s = x.iter().map(|v| v * v).sum::<f64>();
            Ok(m.weight_at(s) * b.values(x).iter().map(|c| c.norm_sqr()).sum::<f64>())
        })?;
        let volume = integrate_volume(&m, &fine.nodes(1, m.decay(), 0, 2)?, |_| Ok(1.0))?;
        oracle = oracle.max((total / volume - bk).abs() / bk).max((bk - f64::from(k + 1) / PI).abs() / bk);
    }
    Ok(Outcome {
        pass: imm.pass && tau < 1e-6 && var < 1e-6 && oracle < 1e-6,
        detail: format!(
            "CP^1 k=1 immersion max {:.2e} (tol 1e-7); τ ratio variation {tau:.2e}, Bergman variation {var:.2e}, quadrature cross-check {oracle:.2e} (tol 1e-6)",
            worst(&imm)
        ),
    })
}

fn rigidity() -> Result<Outcome> {
    let q = Quadrature::default();
    let m = LineBundleModel::projective(1, 2)?;
    let b = orthonormalize_sections(&m, &q)?;
    let base = rescale(&b, &m.base().chart().sample(1, 100)?, 1e-6)?;
    let e = kodaira_cr_embedding(&base)?;
    let spec = SpaceFormSpec::from_c(base.len() - 1, 1.0)?;
    let mut u_err: f64 = 0.0;
    let mut round: f64 = 0.0;
    for seed in 0..10 {
        let u0 = random_unitary(base.len(), 100 + seed);
        let e1 = kodaira_cr_embedding(&base.transformed(&u0)?)?;
        let t = recover_rigid_transform(&e1.map, &e.map, &e.source, spec, 60, seed, 1e-9)?;
        u_err = u_err.max((&t.u - &u0).iter().map(|c| c.norm()).fold(0.0, f64::max));
        round = round.max(worst(&immersion_suite(&t.compose(&e.map), &e.source, &e.target, 30, seed, 1e-8)?));
    }
    let spec = SpaceFormSpec::from_c(1, -3.0)?;
    let s = sasakian_space_form(spec)?;
    let id = SmoothMap::identity(s.chart().clone());
    let mut t0 = RigidTransform::identity(RigidKind::Product, 1);
    t0.u = random_unitary(1, 5);
    t0.a = 0.7;
    t0.w = DVector::from_vec(vec![Complex64::new(0.3, -0.45)]);
    let phi1 = t0.compose(&id);
    let t = recover_rigid_transform(&phi1, &id, &s, spec, 40, 3, 1e-10)?;
    let cmax = |m: &[Complex64]| m.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let trans = (t.a - t0.a).abs().max(cmax((&t.w - &t0.w).as_slice())).max(cmax((&t.u - &t0.u).as_slice()));
    round = round.max(worst(&immersion_suite(&t.compose(&id), &s, &s, 30, 3, 1e-8)?));
    Ok(Outcome {
        pass: u_err < 1e-8 && trans < 1e-10 && round < 1e-8,
        detail: format!(
            "10 unitaries on S^5: max |U − U0| {u_err:.2e} (tol 1e-8); M(1,−3) translation {trans:.2e} (tol 1e-10); round trip {round:.2e}"
        ),
    })
}

fn mutation() -> Result<Outcome> {
    let (mut detected, mut total) = (0, 0);
    let mut missed = Vec::new();
    for c in [1.0, -3.0, -7.0] {
        let s = sasakian_space_form(SpaceFormSpec::from_c(1, c)?)?;
        let id = SmoothMap::identity(s.chart().clone());
        for t in Tensor::ALL {
            let d = with_defect(&s, t, 1.01);
            let checks = [
                ("axioms", !axiom_suite(&d, 50, 1, 1e-8)?.pass),
                ("curvature", !curvature_suite(&d, c, 20, 1, 1e-6)?.pass),
                ("immersion source", !immersion_suite(&id, &d, &s, 20, 1, 1e-8)?.pass),
                ("immersion target", !immersion_suite(&id, &s, &d, 20, 1, 1e-8)?.pass),
            ];
            for (suite, hit) in checks {
                total += 1;
                if hit {
                    detected += 1;
                } else {
                    missed.push(format!("{suite}/{}/c={c}", t.name()));
                }
            }
        }
        let big = sasakian_space_form(SpaceFormSpec::from_c(2, c)?)?;
        let bad = scale_image(&linear_inclusion(1, 2, c)?, 1.01, 0);
        total += 1;
        if !immersion_suite(&bad, &s, &big, 20, 1, 1e-9)?.pass {
            detected += 1;
        } else {
            missed.push(format!("map/c={c}"));
        }
    }
    Ok(Outcome {
        pass: detected == total,
        detail: format!("{detected}/{total} one-percent defects detected{}", if missed.is_empty() { String::new() } else { format!(", missed {missed:?}") }),
    })
}

fn determinism() -> Result<Outcome> {
    let strip = |s: String| s.lines().filter(|l| !l.contains("\"wall_time_s\"")).collect::<Vec<_>>().join("\n");
    let mut configs = Vec::new();
    for (suite, structure) in [
        (Suite::Axioms, StructureKind::Sphere),
        (Suite::Curvature, StructureKind::Hyperbolic),
        (Suite::Immersion, StructureKind::BoothbyWang),
        (Suite::Rigidity, StructureKind::Heisenberg),
        (Suite::Bergman, StructureKind::BoothbyWang),
    ] {
        let mut c = RunConfig::new(suite, structure);
        c.n = Some(2);
        c.seed = Some(42);
        c.samples = Some(40);
        if structure == StructureKind::Hyperbolic {
            c.c = Some(-7.0);
        }
        if structure == StructureKind::BoothbyWang {
            c.n = Some(1);
            c.k = Some(2);
        }
        configs.push(c);
    }
    let mut identical = 0;
    for c in &configs {
        let once = |c: &RunConfig| {
            run(c)
                .map(|o| strip(report_json(&o.report)))
                .map_err(|e| sasaki_core::GeometryError::Parameter(e.to_string()))
        };
        if once(c)? == once(c)? {
            identical += 1;
        }
    }
    Ok(Outcome {
        pass: identical == configs.len(),
        detail: format!("{identical}/{} reports byte-identical across two runs (timing excluded)", configs.len()),
    })
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("axiom suites", axioms),
        ("φ-sectional curvature", curvature),
        ("transforms", transforms),
        ("immersions", immersions),
        ("Boothby–Wang and Kodaira", kodaira),
        ("rigidity", rigidity),
        ("mutation testing", mutation),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f().unwrap_or_else(|e| Outcome { pass: false, detail: format!("error: {e}") });
        if !out.pass {
            failed += 1;
        }
        println!(
            "{} criterion {} ({name}): {} [{:.2}s]",
            if out.pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
