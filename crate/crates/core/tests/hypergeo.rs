use coiso::hypergeo::{
    complex_ellipsoid, cylinder, ellipsoid, hyperplane, is_integrable_prekahler, leaf_minimality, leafwise_mean_curvature,
    levi_form, second_fundamental_form, sff_vector, sphere, tangent_splitting, transverse_curvature_bracket,
    transverse_curvature_sff, Extension, LagrangianGraphProduct, LevelSetHypersurface, Polynomial,
};
use coiso::linalg;
use coiso::maslov::is_leafwise_special;
use coiso::oracle::curve_sff;
use coiso::rng;
use coiso::symplin::SymplecticSpace;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn space(n: usize) -> SymplecticSpace<f64> {
    SymplecticSpace::new(n).unwrap()
}

fn fixtures() -> Vec<LevelSetHypersurface<f64>> {
    vec![
        sphere(&space(2), 1.0),
        sphere(&space(3), 1.7),
        cylinder(&space(2)),
        cylinder(&space(3)),
        complex_ellipsoid(&space(2), &[1.0, 1.3]).unwrap(),
        ellipsoid(&space(2), &[1.0, 1.2, 0.8, 1.5]).unwrap(),
        ellipsoid(&space(3), &[1.0, 1.1, 1.4, 0.9, 1.3, 1.2]).unwrap(),
    ]
}

fn cubic() -> Polynomial<f64> {
    Polynomial::new(
        2,
        vec![(1.0 / 3.0, vec![3, 0]), (1.0, vec![1, 2]), (1.0 / 6.0, vec![0, 3]), (-0.5, vec![2, 1])],
    )
    .unwrap()
}

#[test]
fn second_fundamental_form_is_symmetric() {
    for y in fixtures() {
        for p in y.sample_points(32, 11).unwrap() {
            let split = tangent_splitting(&y, &p).unwrap();
            let blocks = second_fundamental_form(&y, &split).unwrap();
            assert!(blocks.symmetry_residual() < 1e-5, "{}", y.name());
            assert!(blocks.leaf_symmetry_residual() < 1e-5, "{}", y.name());
        }
    }
}

#[test]
fn product_fixture_leaf_symmetry() {
    let y = LagrangianGraphProduct::new(cubic(), 1).unwrap();
    assert_eq!(y.leaf_dim(), 2);
    for q in y.sample_points(32, 5) {
        let exact = y.sff_closed_form(&q);
        let numeric = y.sff_numeric(&q).unwrap();
        assert!(exact.leaf_symmetry_residual() < 1e-12);
        assert!(numeric.leaf_symmetry_residual() < 1e-5);
        assert!(numeric.symmetry_residual() < 1e-5);
        for (a, b) in exact.normals.iter().zip(&numeric.normals) {
            assert!((&a.a - &b.a).amax() < 1e-5);
        }
    }
}

#[test]
fn sff_matches_the_curve_oracle() {
    for y in [sphere(&space(2), 1.0), complex_ellipsoid(&space(2), &[1.0, 1.3]).unwrap(), sphere(&space(3), 0.6)] {
        for p in y.sample_points(6, 3).unwrap() {
            let split = tangent_splitting(&y, &p).unwrap();
            let s = sff_vector(&y, &split);
            let basis = split.frame.tangent_basis();
            let rho = |q: &DVector<f64>| y.value(q);
            for i in 0..basis.ncols() {
                for j in i..basis.ncols() {
                    let (v, w) = (basis.column(i).into_owned(), basis.column(j).into_owned());
                    let oracle = curve_sff(&rho, &p, &split.normal, &v, &w, 1e-3).unwrap();
                    assert!((s(&v, &w).dot(&split.normal) - oracle).abs() < 1e-5, "{} {i} {j}", y.name());
                }
            }
        }
    }
}

#[test]
fn leafwise_mean_curvature_patterns_agree() {
    for y in fixtures() {
        for p in y.sample_points(8, 2).unwrap() {
            let split = tangent_splitting(&y, &p).unwrap();
            let h = leafwise_mean_curvature(&y, &split).unwrap();
            assert!(h.consistency_residual() < 1e-6, "{}", y.name());
        }
    }
}

#[test]
fn curvature_routes_agree_and_reassemble() {
    for y in fixtures() {
        for p in y.sample_points(4, 9).unwrap() {
            let split = tangent_splitting(&y, &p).unwrap();
            let sff = transverse_curvature_sff(&y, &split).unwrap();
            assert!(sff.reassembly_residual < 1e-6);
            assert!(sff.is_type_11(1e-5), "{}", y.name());
            for ext in [Extension::Projected, Extension::Transported] {
                let br = transverse_curvature_bracket(&y, &split, ext).unwrap();
                assert!(br.reassembly_residual < 1e-6);
                assert!(sff.distance(&br) < 1e-3, "{} {ext:?} {:e}", y.name(), sff.distance(&br));
            }
        }
    }
}

#[test]
fn integrability_on_random_ellipsoids() {
    for seed in 0..6u64 {
        let n = 2 + (seed as usize % 2);
        let s = space(n);
        let mut g = rng::stream(seed, 0);
        let axes: Vec<f64> = (0..2 * n).map(|_| 1.0 + 0.3 * rng::normal::<f64>(&mut g).tanh()).collect();
        let y = ellipsoid(&s, &axes).unwrap();
        for p in y.sample_points(3, seed).unwrap() {
            let split = tangent_splitting(&y, &p).unwrap();
            let r = is_integrable_prekahler(&y, &split).unwrap();
            assert!(r.integrable);
            assert!(r.sff_non_11 < 1e-5 && r.bracket_non_11 < 1e-3);
        }
    }
}

fn realified(v: &DMatrix<nalgebra::Complex<f64>>) -> DMatrix<f64> {
    linalg::realify(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn invariants_do_not_depend_on_the_frame(seed in any::<u64>(), which in 0usize..7) {
        let y = &fixtures()[which];
        let p = &y.sample_points(1, seed).unwrap()[0];
        let split = tangent_splitting(y, p).unwrap();
        let k = split.frame.k();
        let v = rng::random_unitary::<f64>(k, &mut rng::stream(seed, 1));
        let turned = split.rotated(&v).unwrap();
        let r = realified(&v);

        let (l1, l2) = (levi_form(y, &split).unwrap(), levi_form(y, &turned).unwrap());
        for (a, b) in l1.eigenvalues.iter().zip(&l2.eigenvalues) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        prop_assert!((r.transpose() * &l1.quadratic * &r - &l2.quadratic).amax() < 1e-9);

        let (f1, f2) = (transverse_curvature_sff(y, &split).unwrap(), transverse_curvature_sff(y, &turned).unwrap());
        prop_assert!((r.transpose() * &f1.components[0] * &r - &f2.components[0]).amax() < 1e-9);
        prop_assert!((f1.non_11_part() - f2.non_11_part()).abs() < 1e-9);

        let (h1, h2) = (leafwise_mean_curvature(y, &split).unwrap(), leafwise_mean_curvature(y, &turned).unwrap());
        prop_assert!((&h1.vector - &h2.vector).amax() < 1e-9);
        prop_assert!((leaf_minimality(y, &split).unwrap().minimal) == (leaf_minimality(y, &turned).unwrap().minimal));
    }
}

fn order(errors: &[f64]) -> f64 {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).fold(f64::INFINITY, f64::min)
}

#[test]
fn finite_differences_converge_at_second_order() {
    let s = space(2);
    let exact = sphere(&s, 1.0);
    let p = exact.sample_points(1, 21).unwrap().remove(0);
    let split = tangent_splitting(&exact, &p).unwrap();
    let levi = levi_form(&exact, &split).unwrap().quadratic;
    let sff = second_fundamental_form(&exact, &split).unwrap();
    let mut levi_err = Vec::new();
    let mut sff_err = Vec::new();
    for h in [0.02, 0.01, 0.005] {
        let y = sphere(&s, 1.0).numeric().with_step(h);
        let sp = tangent_splitting(&y, &p).unwrap();
        // compare in the exact frame
        let sp = coiso::hypergeo::TangentSplitting { frame: split.frame.clone(), ..sp };
        levi_err.push((levi_form(&y, &sp).unwrap().quadratic - &levi).amax());
        let blocks = second_fundamental_form(&y, &sp).unwrap();
        sff_err.push((&blocks.normals[0].a - &sff.normals[0].a).amax().max((&blocks.normals[0].b - &sff.normals[0].b).amax()));
    }
    assert!(order(&levi_err) >= 1.8, "{levi_err:?}");
    assert!(order(&sff_err) >= 1.8, "{sff_err:?}");
}

#[test]
fn leaf_minimality_examples() {
    let s = space(2);
    let p = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
    let flat = hyperplane(&s);
    assert!(leaf_minimality(&flat, &tangent_splitting(&flat, &p).unwrap()).unwrap().minimal);
    let round = sphere(&s, 1.0);
    for q in round.sample_points(8, 4).unwrap() {
        let m = leaf_minimality(&round, &tangent_splitting(&round, &q).unwrap()).unwrap();
        assert!(m.minimal && m.flow_curvature.norm() < 1e-5);
    }
    let e = complex_ellipsoid(&s, &[1.0, 1.3]).unwrap();
    let q = DVector::from_vec(vec![0.6, 0.5, 0.4, 0.3]);
    let q = &q / e.value(&q);
    let m = leaf_minimality(&e, &tangent_splitting(&e, &q).unwrap()).unwrap();
    assert!(!m.minimal && m.flow_curvature.norm() > 1e-2);
}

#[test]
fn leafwise_special_examples() {
    let s = space(2);
    let flat = hyperplane(&s);
    let pts = flat.sample_points(16, 8).unwrap();
    assert!(is_leafwise_special(&flat, &pts).unwrap().special);
    // Hopf circles are great circles, with mean curvature of norm 1 in C^2
    let round = sphere(&s, 1.0);
    let pts = round.sample_points(16, 8).unwrap();
    let r = is_leafwise_special(&round, &pts).unwrap();
    assert!(!r.special && (r.max_norm - 1.0).abs() < 1e-6);
}

#[test]
fn generic_scalar_smoke_test() {
    let s = SymplecticSpace::<f32>::new(2).unwrap();
    let y = sphere(&s, 1.0f32);
    let p = DVector::from_vec(vec![0.6f32, 0.0, 0.8, 0.0]);
    let split = tangent_splitting(&y, &p).unwrap();
    let l = levi_form(&y, &split).unwrap();
    assert!((l.eigenvalues[0] - 1.0).abs() < 1e-4);
}
