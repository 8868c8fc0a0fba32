use std::f64::consts::PI;

use cil_core::grid::{make_grid, pointwise_inverse, sup_distance, trace, MatrixSymbol, TorusGrid};
use cil_core::symbols::{
    bott_loop, bott_projection, index_projection, smooth_phase_unitary, theta_circle_form,
    theta_path, unitary_exponential, CirclePair, Unitary,
};
use cil_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CASES: u64 = 100;

fn random_modes(rng: &mut ChaCha8Rng, dim: usize) -> Vec<(Vec<i32>, f64, f64)> {
    (0..rng.gen_range(1..4))
        .map(|_| {
            (
                (0..dim).map(|_| rng.gen_range(-3..=3)).collect(),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(0.0..2.0 * PI),
            )
        })
        .collect()
}

fn random_unitary(grid: &TorusGrid, rng: &mut ChaCha8Rng) -> Unitary {
    smooth_phase_unitary(grid, &random_modes(rng, grid.dim()))
}

fn random_circle(grid: &TorusGrid, rng: &mut ChaCha8Rng) -> CirclePair {
    let modes = random_modes(rng, grid.dim());
    CirclePair::from_angle(grid, |t| {
        modes
            .iter()
            .map(|(m, a, phi)| {
                let arg: f64 = m.iter().zip(t).map(|(k, x)| *k as f64 * x).sum();
                a * (arg + phi).cos()
            })
            .sum()
    })
}

fn diag_10(grid: &TorusGrid) -> MatrixSymbol {
    let z = Complex64::new(0.0, 0.0);
    MatrixSymbol::constant(grid, 2, 2, &[Complex64::new(1.0, 0.0), z, z, z])
}

#[test]
fn bott_projection_is_a_rank_one_projection() {
    let g = make_grid(2, &[16, 16]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..CASES {
        let q = bott_projection(&random_unitary(&g, &mut rng), &random_circle(&g, &mut rng)).unwrap();
        assert!(q.idempotency_defect() < 1e-11);
        assert!(q.self_adjoint_defect() < 1e-11);
        let tr = trace(&q).unwrap();
        assert!(tr.data().iter().all(|z| (z - 1.0).norm() < 1e-11));
    }
}

#[test]
fn theta_path_is_a_loop_matching_the_circle_form() {
    let g = make_grid(1, &[16]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..CASES {
        let u = random_unitary(&g, &mut rng);
        for t in [0.0, 1.0] {
            assert!(sup_distance(&theta_path(&u, t), &diag_10(&g)).unwrap() < 1e-12);
        }
        for i in 1..10 {
            let t = i as f64 / 10.0;
            let q = theta_path(&u, t);
            assert!(q.projection_defect() < 1e-11);
            let circle = theta_circle_form(&u, Complex64::from_polar(1.0, 2.0 * PI * t)).unwrap();
            assert!(sup_distance(&q, &circle).unwrap() < 1e-11);
        }
    }
}

#[test]
fn index_projection_of_exact_inverse_pair() {
    let g = make_grid(2, &[8, 8]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..CASES {
        let a = random_unitary(&g, &mut rng).into_symbol();
        let b = pointwise_inverse(&a, 1e-8).unwrap();
        let p = index_projection(&a, &b).unwrap();
        assert!(sup_distance(&p, &diag_10(&g)).unwrap() < 1e-12);
    }
}

#[test]
fn exponential_of_projections_is_identity() {
    let g = make_grid(2, &[8, 8]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..CASES {
        let q = bott_projection(&random_unitary(&g, &mut rng), &random_circle(&g, &mut rng)).unwrap();
        let e = unitary_exponential(&q).unwrap();
        assert!(sup_distance(&e, &MatrixSymbol::identity(&g, 2)).unwrap() < 1e-10);
    }
}

#[test]
fn bott_loops_are_unitary() {
    let g = make_grid(2, &[8, 8]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..CASES {
        let q = bott_projection(&random_unitary(&g, &mut rng), &random_circle(&g, &mut rng)).unwrap();
        let z = Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI));
        assert!(bott_loop(&q, z).unwrap().unitarity_defect() < 1e-11);
        let at_one = bott_loop(&q, Complex64::new(1.0, 0.0)).unwrap();
        assert!(sup_distance(&at_one, &MatrixSymbol::identity(&g, 2)).unwrap() < 1e-12);
    }
}
