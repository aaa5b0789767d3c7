use std::sync::Arc;

use coiso::families::{diagonal_phases, lagrangian_rotation, random_symplectic_loop, random_unitary_loop, unitary_matrix_loop, unitary_orbit};
use coiso::grassmann::{pushforward, transverse_frame_loop, CoisotropicLoop, SymplecticMatrixLoop};
use coiso::symplin::{standard_model, SymplecticSpace};
use proptest::prelude::*;

fn space(n: usize) -> SymplecticSpace<f64> {
    SymplecticSpace::new(n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn doubling_the_grid_keeps_even_samples(seed in any::<u64>(), k in 0usize..=2) {
        let s = space(2);
        let fam = unitary_orbit(2, k, random_unitary_loop(2, seed, vec![1, 0], 0.3, 2));
        let l = CoisotropicLoop::from_family(&s, k, fam, 32).unwrap();
        let fine = l.resample(2 * l.len()).unwrap();
        prop_assert_eq!(fine.len(), 2 * l.len());
        for i in 0..l.len() {
            prop_assert_eq!(fine.samples()[2 * i].space().basis(), l.samples()[i].space().basis());
        }
    }

    #[test]
    fn pushforward_by_inverse_returns_the_loop(seed in any::<u64>(), k in 0usize..=2) {
        let s = space(2);
        let fam = unitary_orbit(2, k, random_unitary_loop(2, seed, vec![0, 1], 0.3, 1));
        let gamma = CoisotropicLoop::from_family(&s, k, fam, 64).unwrap();
        let a = SymplecticMatrixLoop::from_family(&s, random_symplectic_loop(2, seed, vec![1, 0], 0.1, 1), gamma.len()).unwrap();
        let (a, gamma) = coiso::grassmann::align_grids(&a, &gamma).unwrap();
        let back = pushforward(&a, &pushforward(&a.inverse(), &gamma).unwrap()).unwrap();
        prop_assert_eq!(back.len(), gamma.len());
        for (x, y) in back.samples().iter().zip(gamma.samples()) {
            prop_assert!(x.space().max_angle(y.space()).unwrap() < 1e-8);
        }
    }

    #[test]
    fn kernel_dimension_is_exact(seed in any::<u64>(), (n, k) in (1usize..=3).prop_flat_map(|n| (Just(n), 0..=n))) {
        let s = space(n);
        let w: Vec<i64> = (0..n as i64).map(|j| j - 1).collect();
        let fam = unitary_orbit(n, k, random_unitary_loop(n, seed, w, 0.2, 1));
        let l = CoisotropicLoop::from_family(&s, k, fam, 16).unwrap();
        for c in l.samples() {
            prop_assert_eq!(c.kernel().dim(), n - k);
        }
        prop_assert!(l.max_step().unwrap() <= s.tol().loop_step);
    }
}

#[test]
fn constant_loop() {
    let s = space(2);
    let c = standard_model(&s, 1).unwrap().space().clone();
    let l = CoisotropicLoop::from_family(&s, 1, Arc::new(move |_| Ok(c.clone())), 16).unwrap();
    assert_eq!(l.len(), 16);
    assert_eq!(l.closure_defect(), 0.0);
    let t = transverse_frame_loop(&l);
    assert!((t.monodromy[(0, 0)] - nalgebra::Complex::new(1.0, 0.0)).norm() < 1e-14);
}

#[test]
fn lagrangian_rotation_loop() {
    let s = space(2);
    let l = CoisotropicLoop::from_family(&s, 0, lagrangian_rotation(2), 64).unwrap();
    let half = &l.samples()[l.len() / 2];
    let angles = coiso::symplin::principal_angles(half.space(), l.samples()[0].space()).unwrap();
    assert!(angles.iter().all(|a| (a - std::f64::consts::FRAC_PI_2).abs() < 1e-12));

    let s1 = space(1);
    let l = CoisotropicLoop::from_family(&s1, 0, lagrangian_rotation(1), 64).unwrap();
    let t = transverse_frame_loop(&l);
    assert!((t.monodromy[(0, 0)] + nalgebra::Complex::new(1.0, 0.0)).norm() < 1e-9);
}

#[test]
fn two_routes_to_a_rotated_loop() {
    let s = space(2);
    let c = standard_model(&s, 1).unwrap().space().clone();
    let gamma = CoisotropicLoop::from_family(&s, 1, Arc::new(move |_| Ok(c.clone())), 32).unwrap();
    let rot = diagonal_phases::<f64>(vec![1, 0]);
    let a = SymplecticMatrixLoop::from_family(&s, unitary_matrix_loop(rot.clone()), 32).unwrap();
    let pushed = pushforward(&a, &gamma).unwrap();
    let direct = CoisotropicLoop::from_family(&s, 1, unitary_orbit(2, 1, rot), pushed.len()).unwrap();
    for (x, y) in pushed.samples().iter().zip(direct.samples()) {
        assert!(x.space().max_angle(y.space()).unwrap() < 1e-9);
    }
}

#[test]
fn full_rank_loop_has_empty_transverse_frames() {
    let s = space(2);
    let c = standard_model(&s, 2).unwrap().space().clone();
    let l = CoisotropicLoop::from_family(&s, 2, Arc::new(move |_| Ok(c.clone())), 4).unwrap();
    let t = transverse_frame_loop(&l);
    assert!(t.frames.iter().all(|f| f.ncols() == 0));
    assert_eq!(t.monodromy.shape(), (0, 0));
}
