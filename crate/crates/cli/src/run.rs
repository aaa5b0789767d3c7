//! Dispatch of experiment specs to the library.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use coiso::families::{
    aligned_triple, diagonal_phases, half_rotation, lagrangian_bases, random_symplectic_loop, random_unitary_loop,
    random_windings, unitary_matrix_loop, unitary_orbit, RandomSection, UnitaryFamily,
};
use coiso::hypergeo::{
    complex_ellipsoid, cylinder, ellipsoid, hyperplane, leaf_minimality, leafwise_mean_curvature, levi_form, polynomial,
    second_fundamental_form, sphere, tangent_splitting, transverse_curvature_bracket, transverse_curvature_sff, Extension,
    LagrangianGraphProduct, LevelSetHypersurface, Polynomial,
};
use coiso::maslov::{
    admissible_frames, connection_integral_index, disc_boundary_index, is_leafwise_special, maslov_index,
    pushforward_section, refined_index, BoundaryFamily, CanonicalGrading, CanonicalTwist, CoisotropicSubmanifold,
    DiscIndex, FormGrading, Grading,
};
use coiso::oracle::{classical_maslov, tangent_rank_constraints, tangent_rank_orbit};
use coiso::symplin::{grassmannian_dim, random_coisotropic, SymplecticSpace};
use coiso::{rng, CoisotropicLoop, Error, MaslovSection, Tolerances};
use nalgebra::{Complex, DMatrix, DVector};
use rayon::prelude::*;

use crate::error::CliError;
use crate::report::{Recorder, Report, Value};
use crate::spec::{
    Boundary, DiscParams, ExperimentSpec, Fixture, GradingSpec, GrassmannianParams, InvarianceParams, LoopFamily,
    MaslovParams, SectionSpec, SurfaceParams, Term,
};
use crate::trace::emit_phase_trace;

/// Runs a validated spec. Schema problems are returned as errors; computation
/// failures are recorded in the report.
pub fn run(spec: &ExperimentSpec) -> Result<Report, CliError> {
    spec.validate()?;
    let tol = spec.tolerances()?;
    let seed = spec.seed();
    let mut rec = Recorder::default();
    let outcome = match spec {
        ExperimentSpec::GrassmannianDim(j) => grassmannian(&j.parameters, &tol, seed, &mut rec),
        ExperimentSpec::MaslovIndex(j) => maslov(&j.parameters, &tol, &mut rec, seed),
        ExperimentSpec::InvarianceSuite(j) => invariance(&j.parameters, &tol, seed, &mut rec),
        ExperimentSpec::DiscIndex(j) => disc(&j.parameters, &tol, &mut rec),
        ExperimentSpec::HypersurfaceReport(j) => surface_report(&j.parameters, &tol, seed, &mut rec),
        ExperimentSpec::MinimalityScan(j) => minimality_scan(&j.parameters, &tol, seed, &mut rec),
    };
    let error = outcome.err().map(|e| e.to_string());
    let passed = error.is_none() && rec.comparisons.iter().all(|c| c.pass);
    let tolerances: BTreeMap<String, f64> = tol.entries().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    Ok(Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        spec: spec.clone(),
        tolerances,
        items: rec.items,
        comparisons: rec.comparisons,
        windings: rec.windings,
        passed,
        error,
        wall_time_s: None,
    })
}

type Outcome = Result<(), CliError>;

fn space(n: usize, tol: &Tolerances) -> Result<SymplecticSpace<f64>, CliError> {
    Ok(SymplecticSpace::with_tolerances(n, tol.clone())?)
}

fn grassmannian(p: &GrassmannianParams, tol: &Tolerances, seed: u64, rec: &mut Recorder) -> Outcome {
    let s = space(p.n, tol)?;
    let dim = grassmannian_dim(p.n, p.k)? as i64;
    rec.item("dimension", Value::Integer(dim));
    let ranks: Vec<(usize, usize)> = (0..p.samples)
        .into_par_iter()
        .map(|i| {
            let c = random_coisotropic(&s, p.k, rng::child_seed(seed, i as u64))?;
            Ok((tangent_rank_orbit(&s, c.space()), tangent_rank_constraints(&s, c.space())?))
        })
        .collect::<coiso::Result<_>>()?;
    for (i, (orbit, constraints)) in ranks.into_iter().enumerate() {
        rec.exact(format!("orbit rank at sample {i}"), orbit as i64, dim);
        rec.exact(format!("constraint rank at sample {i}"), constraints as i64, dim);
    }
    Ok(())
}

/// Unitary path generating a loop family, with its rank.
fn unitary_path(family: &LoopFamily, seed: u64) -> (UnitaryFamily<f64>, usize) {
    match family {
        LoopFamily::LagrangianRotation { n } => (half_rotation(*n), 0),
        LoopFamily::DiagonalPhases { k, windings, .. } => (diagonal_phases(windings.clone()), *k),
        LoopFamily::RandomUnitary { n, k, windings, amplitude, modes } => {
            (random_unitary_loop(*n, seed, windings.clone(), *amplitude, *modes), *k)
        }
        LoopFamily::Constant { n, k } => (diagonal_phases(vec![0; *n]), *k),
    }
}

fn frame_constant(g: &CoisotropicLoop) -> coiso::Result<MaslovSection> {
    MaslovSection::on_loop(g, vec![Complex::new(1.0, 0.0); g.len()])
}

fn maslov(p: &MaslovParams, tol: &Tolerances, rec: &mut Recorder, seed: u64) -> Outcome {
    let n = p.family.n();
    let s = space(n, tol)?;
    let (u, k) = unitary_path(&p.family, seed);
    let gamma = CoisotropicLoop::from_family(&s, k, unitary_orbit(n, k, u.clone()), p.m)?;
    let (gamma, zeta, w) = match p.section {
        SectionSpec::FrameConstant => refined_index(&gamma, &frame_constant)?,
        SectionSpec::CanonicalTwist { winding } => {
            let rule = CanonicalTwist::new(winding);
            refined_index(&gamma, &|g| MaslovSection::from_rule(g, &rule))?
        }
    };
    rec.index("maslov index", &w);
    rec.item("samples", Value::Integer(gamma.len() as i64));
    rec.scalar("closure defect", gamma.closure_defect());
    match p.section {
        SectionSpec::CanonicalTwist { winding } => {
            rec.exact("index against the twist winding", w.degree, winding);
        }
        SectionSpec::FrameConstant if k == 0 => {
            let fine = (8 * gamma.len()).max(4096);
            let thetas: Vec<f64> = (0..fine).map(|i| std::f64::consts::TAU * i as f64 / fine as f64).collect();
            let classical = classical_maslov(&lagrangian_bases(&u, &thetas))?;
            rec.item("classical index", Value::Integer(classical));
            rec.exact("index against the classical det² winding", w.degree, -classical);
            if let LoopFamily::LagrangianRotation { n } = p.family {
                rec.exact("|index| against n", w.degree.abs(), n as i64);
            }
        }
        SectionSpec::FrameConstant => {}
    }
    rec.bound("index rounding residual", w.residual, tol.winding_residual);
    if let Some(path) = &p.trace {
        emit_phase_trace(&gamma, &zeta, Path::new(path))?;
    }
    Ok(())
}

fn invariance(p: &InvarianceParams, tol: &Tolerances, seed: u64, rec: &mut Recorder) -> Outcome {
    let s = space(p.n, tol)?;
    let (n, k) = (p.n, p.k);
    let cases: Vec<(i64, i64, Vec<i64>)> = (0..p.cases)
        .into_par_iter()
        .map(|i| -> coiso::Result<(i64, i64, Vec<i64>)> {
            let cs = rng::child_seed(seed, i as u64);
            let fam = unitary_orbit(n, k, random_unitary_loop(n, cs, random_windings(n, cs, 2), 0.3, 2));
            let mats = if i % 2 == 0 {
                unitary_matrix_loop(random_unitary_loop(n, cs ^ 1, random_windings(n, cs ^ 2, 2), 0.3, 1))
            } else {
                random_symplectic_loop(n, cs ^ 1, random_windings(n, cs ^ 2, 2), 0.15, 1)
            };
            let w = rng::symmetric_int(&mut rng::stream(cs, 5), 2);
            let t = aligned_triple(&s, k, fam, mats, &RandomSection::new(w, cs), p.m)?;
            let before = maslov_index(&t.gamma, &t.zeta)?;
            let (g2, z2) = pushforward_section(&t.a, &t.gamma, &t.zeta)?;
            let after = maslov_index(&g2, &z2)?;
            let mut reframed = Vec::with_capacity(p.reframings);
            let mut g = rng::stream(cs, 6);
            let id = DMatrix::<Complex<f64>>::identity(k, k);
            for _ in 0..p.reframings {
                let frames = t
                    .gamma
                    .frames()
                    .iter()
                    .map(|f| f.reframed(&id, &rng::random_orthogonal(n - k, &mut g)))
                    .collect::<coiso::Result<Vec<_>>>()?;
                let closing = t.gamma.closing_frame().reframed(&id, &rng::random_orthogonal(n - k, &mut g))?;
                reframed.push(maslov_index(&t.gamma.with_frames(frames, closing)?, &t.zeta)?.degree);
            }
            Ok((before.degree, after.degree, reframed))
        })
        .collect::<coiso::Result<_>>()?;
    for (i, (before, after, reframed)) in cases.into_iter().enumerate() {
        rec.item(format!("case {i} index"), Value::Integer(before));
        rec.exact(format!("case {i} index after the symplectic loop"), after, before);
        for (j, r) in reframed.into_iter().enumerate() {
            rec.exact(format!("case {i} reframing {j}"), r, before);
        }
    }
    Ok(())
}

fn terms(t: &[Term], nvars: usize) -> Result<Polynomial<f64>, CliError> {
    Ok(Polynomial::new(nvars, t.iter().map(|t| (t.coefficient, t.exponents.clone())).collect())?)
}

fn hypersurface(f: &Fixture, tol: &Tolerances) -> Result<LevelSetHypersurface<f64>, CliError> {
    let s = space(f.n(), tol)?;
    Ok(match f {
        Fixture::Hyperplane { .. } => hyperplane(&s),
        Fixture::Sphere { r, .. } => sphere(&s, *r),
        Fixture::Cylinder { .. } => cylinder(&s),
        Fixture::Ellipsoid { axes, .. } => ellipsoid(&s, axes)?,
        Fixture::ComplexEllipsoid { axes } => complex_ellipsoid(&s, axes)?,
        Fixture::Polynomial { n, terms: t } => polynomial(&s, terms(t, 2 * n)?)?,
        Fixture::LagrangianGraph { .. } => return Err(CliError::Schema("not a hypersurface fixture".into())),
    })
}

fn boundary(b: &Boundary, n: usize) -> BoundaryFamily<f64> {
    match b.clone() {
        Boundary::Hopf { radius, turns } => Arc::new(move |t: f64| {
            let mut p = DVector::zeros(2 * n);
            p[0] = radius * (turns as f64 * t).cos();
            p[n] = radius * (turns as f64 * t).sin();
            p
        }),
        Boundary::Ellipse { center, u, v, w } => {
            let (c, u, v) = (DVector::from_vec(center), DVector::from_vec(u), DVector::from_vec(v));
            let w = w.map(DVector::from_vec).unwrap_or_else(|| DVector::zeros(2 * n));
            Arc::new(move |t: f64| &c + &u * t.cos() + &v * t.sin() + &w * (2.0 * t).sin())
        }
    }
}

fn disc(p: &DiscParams, tol: &Tolerances, rec: &mut Recorder) -> Outcome {
    let y = Arc::new(hypersurface(&p.fixture, tol)?);
    let n = p.fixture.n();
    let grading: Box<dyn Grading<f64>> = match &p.grading {
        GradingSpec::Canonical => Box::new(CanonicalGrading { tol: tol.clone() }),
        GradingSpec::Form { rows } => {
            let form = DMatrix::from_fn(rows.len(), n, |a, j| Complex::new(rows[a][j][0], rows[a][j][1]));
            Box::new(FormGrading { form, tol: tol.clone() })
        }
    };
    let b = boundary(&p.boundary, n);
    let mut m = p.m;
    let d: DiscIndex<f64> = loop {
        match disc_boundary_index(y.clone() as Arc<dyn CoisotropicSubmanifold<f64>>, b.clone(), grading.as_ref(), m) {
            Err(Error::Aliasing { .. }) if 2 * m <= tol.max_loop_samples.min(1 << 16) => m *= 2,
            r => break r?,
        }
    };
    let frames = admissible_frames(&d.tangent_loop, &d.charge)?;
    let c = connection_integral_index(&frames, tol)?;
    rec.index("disc boundary index", &d.winding);
    rec.index("connection integral index", &c);
    rec.item("samples", Value::Integer(d.tangent_loop.len() as i64));
    rec.exact("two-route index agreement", c.degree, d.winding.degree);
    rec.bound("boundary index rounding residual", d.winding.residual, tol.winding_residual);
    rec.bound("connection index rounding residual", c.residual, tol.winding_residual);
    if matches!(p.fixture, Fixture::Hyperplane { .. }) && p.grading == GradingSpec::Canonical {
        // totally geodesic with the canonical grading parallel
        rec.exact("vanishing on the hyperplane", d.winding.degree, 0);
    }
    if let Some(path) = &p.trace {
        emit_phase_trace(&d.tangent_loop, &d.charge, Path::new(path))?;
    }
    Ok(())
}

fn points(y: &LevelSetHypersurface<f64>, p: &SurfaceParams, seed: u64) -> Result<Vec<DVector<f64>>, CliError> {
    match &p.at {
        Some(at) => {
            let pts: Vec<DVector<f64>> = at.iter().map(|x| DVector::from_vec(x.clone())).collect();
            for q in &pts {
                y.check_on_surface(q)?;
            }
            Ok(pts)
        }
        None => Ok(y.sample_points(p.points, seed)?),
    }
}

/// Per-point quantities of a hypersurface report.
struct PointReport {
    levi_eigenvalues: Vec<f64>,
    positive_definite: bool,
    flat: bool,
    levi_e1: f64,
    f_e1_f1: f64,
    sff_symmetry: f64,
    route_distance: f64,
    reassembly: f64,
    non_11: f64,
    mean_curvature: f64,
    mean_consistency: f64,
    leaf_minimal: bool,
    leaf_curvature: f64,
}

fn point_report(y: &LevelSetHypersurface<f64>, q: &DVector<f64>) -> coiso::Result<PointReport> {
    let split = tangent_splitting(y, q)?;
    let levi = levi_form(y, &split)?;
    let blocks = second_fundamental_form(y, &split)?;
    let sff = transverse_curvature_sff(y, &split)?;
    let mut route_distance = 0.0f64;
    let mut reassembly = sff.reassembly_residual;
    for ext in [Extension::Projected, Extension::Transported] {
        let br = transverse_curvature_bracket(y, &split, ext)?;
        route_distance = route_distance.max(sff.distance(&br));
        reassembly = reassembly.max(br.reassembly_residual);
    }
    let h = leafwise_mean_curvature(y, &split)?;
    let leaf = leaf_minimality(y, &split)?;
    let k = split.frame.k();
    Ok(PointReport {
        levi_eigenvalues: levi.eigenvalues.clone(),
        positive_definite: levi.positive_definite,
        flat: levi.flat,
        levi_e1: levi.quadratic[(0, 0)],
        f_e1_f1: sff.components[0][(0, k)],
        sff_symmetry: blocks.symmetry_residual().max(blocks.leaf_symmetry_residual()),
        route_distance,
        reassembly,
        non_11: sff.non_11_part(),
        mean_curvature: h.norm(),
        mean_consistency: h.consistency_residual(),
        leaf_minimal: leaf.minimal,
        leaf_curvature: leaf.flow_curvature.norm(),
    })
}

fn fold_max(v: impl Iterator<Item = f64>) -> f64 {
    v.fold(0.0, f64::max)
}

fn surface_report(p: &SurfaceParams, tol: &Tolerances, seed: u64, rec: &mut Recorder) -> Outcome {
    if let Fixture::LagrangianGraph { terms: t, p: nv, m } = &p.fixture {
        return product_report(terms(t, *nv)?, *m, p, seed, rec);
    }
    let y = hypersurface(&p.fixture, tol)?;
    let pts = points(&y, p, seed)?;
    let reports: Vec<PointReport> = pts.par_iter().map(|q| point_report(&y, q)).collect::<coiso::Result<_>>()?;
    rec.item("points", Value::Integer(pts.len() as i64));
    let eig = DMatrix::from_fn(reports.len(), reports[0].levi_eigenvalues.len(), |i, j| reports[i].levi_eigenvalues[j]);
    rec.matrix("levi eigenvalues", &eig);
    rec.flag("levi positive definite at all points", reports.iter().all(|r| r.positive_definite));
    rec.flag("levi flat at all points", reports.iter().all(|r| r.flat));
    rec.vector("levi value on e_1", reports.iter().map(|r| r.levi_e1).collect());
    rec.vector("F(e_1, f_1) along the characteristic direction", reports.iter().map(|r| r.f_e1_f1).collect());
    rec.vector("leafwise mean curvature norm", reports.iter().map(|r| r.mean_curvature).collect());
    rec.flag("leaf minimal at all points", reports.iter().all(|r| r.leaf_minimal));
    rec.vector("in-hypersurface leaf curvature", reports.iter().map(|r| r.leaf_curvature).collect());
    rec.bound("second fundamental form symmetry", fold_max(reports.iter().map(|r| r.sff_symmetry)), 1e-5);
    rec.bound("bracket and second fundamental form routes", fold_max(reports.iter().map(|r| r.route_distance)), tol.route_agreement);
    rec.bound("type decomposition reassembly", fold_max(reports.iter().map(|r| r.reassembly)), 1e-6);
    rec.bound("curvature outside type (1,1)", fold_max(reports.iter().map(|r| r.non_11)), tol.integrability);
    rec.bound("leafwise mean curvature patterns", fold_max(reports.iter().map(|r| r.mean_consistency)), 1e-6);
    match &p.fixture {
        Fixture::Sphere { r, .. } => {
            let worst = fold_max(reports.iter().flat_map(|x| x.levi_eigenvalues.iter().map(|e| (e - 1.0 / r).abs())));
            rec.compare("levi eigenvalues against 1/r", 1.0 / r + worst, 1.0 / r, 1e-4);
        }
        Fixture::Hyperplane { .. } | Fixture::Cylinder { .. } => {
            rec.bound("levi form in flat directions", fold_max(reports.iter().flat_map(|x| x.levi_eigenvalues.iter().map(|e| e.abs()))), 1e-6);
        }
        _ => {}
    }
    Ok(())
}

fn product_report(f: Polynomial<f64>, m: usize, p: &SurfaceParams, seed: u64, rec: &mut Recorder) -> Outcome {
    let y = LagrangianGraphProduct::new(f, m)?;
    let pts = y.sample_points(p.points, seed);
    let rows: Vec<(f64, f64, f64, f64)> = pts
        .par_iter()
        .map(|q| {
            let exact = y.sff_closed_form(q);
            let numeric = y.sff_numeric(q)?;
            let diff = exact.normals.iter().zip(&numeric.normals).map(|(a, b)| (&a.a - &b.a).amax()).fold(0.0, f64::max);
            Ok((exact.leaf_symmetry_residual(), numeric.leaf_symmetry_residual(), numeric.symmetry_residual(), diff))
        })
        .collect::<coiso::Result<_>>()?;
    rec.item("points", Value::Integer(pts.len() as i64));
    rec.item("leaf dimension", Value::Integer(y.leaf_dim() as i64));
    rec.bound("leaf symmetry, closed form", fold_max(rows.iter().map(|r| r.0)), 1e-5);
    rec.bound("leaf symmetry, finite differences", fold_max(rows.iter().map(|r| r.1)), 1e-5);
    rec.bound("second fundamental form symmetry", fold_max(rows.iter().map(|r| r.2)), 1e-5);
    rec.bound("closed form against finite differences", fold_max(rows.iter().map(|r| r.3)), 1e-5);
    Ok(())
}

fn minimality_scan(p: &SurfaceParams, tol: &Tolerances, seed: u64, rec: &mut Recorder) -> Outcome {
    let y = hypersurface(&p.fixture, tol)?;
    let pts = points(&y, p, seed)?;
    let rows: Vec<(bool, f64, f64)> = pts
        .par_iter()
        .map(|q| {
            let split = tangent_splitting(&y, q)?;
            let m = leaf_minimality(&y, &split)?;
            Ok((m.minimal, m.flow_curvature.norm(), m.residual))
        })
        .collect::<coiso::Result<_>>()?;
    let special = is_leafwise_special(&y, &pts)?;
    rec.item("points", Value::Integer(pts.len() as i64));
    rec.vector("in-hypersurface leaf curvature", rows.iter().map(|r| r.1).collect());
    rec.flag("leaf minimal at all points", rows.iter().all(|r| r.0));
    rec.flag("leafwise special", special.special);
    rec.scalar("largest leafwise mean curvature", special.max_norm);
    if let Some(w) = &special.witness {
        rec.vector("witness point", w.iter().copied().collect());
    }
    rec.bound("flow and frame routes", fold_max(rows.iter().map(|r| r.2)), 1e-4);
    if matches!(p.fixture, Fixture::Hyperplane { .. } | Fixture::Sphere { .. }) {
        rec.bound("leaf curvature on a fixture with minimal leaves", fold_max(rows.iter().map(|r| r.1)), tol.minimality);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_json(text: &str) -> Report {
        run(&ExperimentSpec::from_json(text).unwrap()).unwrap()
    }

    #[test]
    fn grassmannian_dimension_example() {
        let r = run_json(r#"{"kind":"grassmannian-dim","parameters":{"n":3,"k":1,"samples":3}}"#);
        assert!(r.passed);
        assert_eq!(r.items[0].value, Value::Integer(7));
    }

    #[test]
    fn rotation_index_example() {
        let r = run_json(r#"{"kind":"maslov-index","parameters":{"family":{"name":"lagrangian-rotation","n":1},"M":64}}"#);
        assert!(r.passed, "{r:?}");
        assert_eq!(r.windings[0].degree.abs(), 1);
        assert!(r.windings[0].residual < 0.05);
    }

    #[test]
    fn computation_errors_land_in_the_report() {
        // the boundary misses the hyperplane {x_1 = 1}
        let r = run_json(
            r#"{"kind":"disc-index","parameters":{"fixture":{"name":"hyperplane","n":2},"boundary":{"name":"ellipse","center":[0,0,0,0],"u":[0,1,0,0],"v":[0,0,0,1]}}}"#,
        );
        assert!(!r.passed);
        assert!(r.error.is_some());
    }
}
