use cil_core::lattice::{
    adjoint, apply, band_symbol_index, exact_kernel_band, fredholm_index, multiplier_kernel_dims,
    Certificate, LatticeOperator, LatticeVector, LimitForm, Multiplier, Term, Window,
};
use cil_core::scenarios::{mult_jk, step_toeplitz};
use cil_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize, k: usize, radius: i64) -> LatticeVector {
    let mut v = LatticeVector::zero(k);
    for _ in 0..rng.gen_range(1..12) {
        let p: Vec<i64> = (0..dim).map(|_| rng.gen_range(-radius..=radius)).collect();
        let val: Vec<Complex64> = (0..k)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        v.entries.insert(p, val);
    }
    v
}

/// 2×2 band operator on ℤ with non-constant coefficients near the origin.
fn matrix_band_operator() -> LatticeOperator {
    let id = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
    let zero = vec![c(0.0, 0.0); 4];
    let varying = |label: &str, seed: f64, minus: Vec<Complex64>| {
        let m = minus.clone();
        Multiplier::new(
            2,
            label,
            Window::interval(-3, 3),
            LimitForm::EventuallyConstant {
                minus,
                plus: vec![c(0.0, 0.0); 4],
            },
            move |p| {
                let j = p[0];
                if j < -3 {
                    m.clone()
                } else if j > 3 {
                    vec![c(0.0, 0.0); 4]
                } else {
                    let x = j as f64 + seed;
                    vec![c(x.sin(), 0.3), c(0.0, x.cos()), c(0.5, -x), c(x * x / 9.0, 0.0)]
                }
            },
        )
    };
    let shift = Multiplier::new(
        2,
        "tail",
        Window::interval(-3, 3),
        LimitForm::EventuallyConstant {
            minus: vec![c(0.0, 0.0); 4],
            plus: vec![c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)],
        },
        |p| {
            if p[0] > 3 {
                vec![c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]
            } else if p[0] < -3 {
                vec![c(0.0, 0.0); 4]
            } else {
                vec![c(0.2, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(0.7, 0.0)]
            }
        },
    );
    LatticeOperator::new(
        1,
        2,
        vec![
            Term { shift: vec![0], multiplier: varying("a", 0.1, id) },
            Term { shift: vec![2], multiplier: shift },
            Term { shift: vec![-1], multiplier: varying("b", 1.3, zero) },
        ],
    )
    .unwrap()
}

#[test]
fn adjoint_pairing_holds_for_random_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let operators: Vec<(LatticeOperator, usize)> = vec![
        (step_toeplitz(0), 1),
        (step_toeplitz(7), 1),
        (mult_jk(), 2),
        (matrix_band_operator(), 1),
    ];
    for (a, dim) in &operators {
        let adj = adjoint(a);
        for _ in 0..100 {
            let u = random_vector(&mut rng, *dim, a.k(), 10);
            let v = random_vector(&mut rng, *dim, a.k(), 10);
            let lhs = apply(a, &u).inner(&v);
            let rhs = u.inner(&apply(&adj, &v));
            assert!((lhs - rhs).norm() < 1e-12);
            // A** = A on vectors.
            let twice = apply(&adjoint(&adj), &u);
            let once = apply(a, &u);
            let diff = once
                .entries
                .iter()
                .map(|(p, x)| {
                    let y = twice.get(p);
                    x.iter().zip(&y).map(|(s, t)| (s - t).norm()).fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            assert!(diff < 1e-14);
        }
    }
}

#[test]
fn step_operator_index_is_independent_of_step() {
    for n0 in [-3, 0, 7] {
        let a = step_toeplitz(n0);
        let r = fredholm_index(&a, &Window::symmetric(1, 64)).unwrap();
        assert_eq!((r.ker_dim, r.coker_dim, r.index), (Some(0), Some(1), -1));
        let certs: Vec<Certificate> = r.methods.iter().map(|m| m.certificate).collect();
        assert_eq!(certs, vec![Certificate::ExactBand, Certificate::Winding]);
    }
}

#[test]
fn cokernel_vector_of_step_operator() {
    // δ_{n₀−1} − δ_{n₀} spans ker A*.
    let n0 = 2;
    let a = step_toeplitz(n0);
    let mut v = LatticeVector::delta(1, vec![n0 - 1], 0);
    v.entries.insert(vec![n0], vec![c(-1.0, 0.0)]);
    let out = apply(&adjoint(&a), &v);
    assert!(out.entries.values().all(|x| x[0].norm() < 1e-15));
}

#[test]
fn results_are_stable_under_window_growth() {
    let cases: Vec<(LatticeOperator, Window)> = vec![
        (step_toeplitz(0), Window::symmetric(1, 64)),
        (step_toeplitz(-3), Window::symmetric(1, 10)),
        (matrix_band_operator(), Window::symmetric(1, 8)),
        (mult_jk(), Window::symmetric(2, 20)),
    ];
    for (a, w) in cases {
        let small = fredholm_index(&a, &w).unwrap();
        let large = fredholm_index(&a, &w.scaled(1.5)).unwrap();
        assert_eq!(
            (small.ker_dim, small.coker_dim),
            (large.ker_dim, large.coker_dim)
        );
    }
}

#[test]
fn adjoint_negates_the_index() {
    let cases: Vec<(LatticeOperator, Window)> = vec![
        (step_toeplitz(0), Window::symmetric(1, 64)),
        (step_toeplitz(7), Window::symmetric(1, 64)),
        (matrix_band_operator(), Window::symmetric(1, 8)),
        (mult_jk(), Window::symmetric(2, 50)),
        (LatticeOperator::shift(vec![3]), Window::symmetric(1, 8)),
    ];
    for (a, w) in cases {
        let r = fredholm_index(&a, &w).unwrap();
        let r_star = fredholm_index(&adjoint(&a), &w.expand(3)).unwrap();
        assert_eq!(r_star.index, -r.index);
        assert_eq!(r_star.ker_dim, r.coker_dim);
    }
}

#[test]
fn matrix_band_operator_counts() {
    let a = matrix_band_operator();
    let r = exact_kernel_band(&a, &Window::symmetric(1, 8)).unwrap();
    assert_eq!(r.index, r.ker_dim.unwrap() as i64 - r.coker_dim.unwrap() as i64);
    // Limit operators: c₊Y₂ with c₊ invertible 2×2 on the right, I on the left,
    // so the index is 2·2 − 0.
    assert_eq!(r.index, 4);
}

#[test]
fn winding_and_exact_band_agree_on_scalar_shifted_steps() {
    // b(M)Y_s + c(M) with a step b; the index is −s on the right tail.
    for s in [-3i64, -1, 1, 2] {
        let n0 = 1;
        let b = Multiplier::new(
            1,
            "b",
            Window::interval(n0, n0),
            LimitForm::EventuallyConstant { minus: vec![c(0.0, 0.0)], plus: vec![c(1.0, 0.0)] },
            move |p| vec![c(if p[0] >= n0 { 1.0 } else { 0.0 }, 0.0)],
        );
        let cm = Multiplier::new(
            1,
            "c",
            Window::interval(n0, n0),
            LimitForm::EventuallyConstant { minus: vec![c(1.0, 0.0)], plus: vec![c(0.0, 0.0)] },
            move |p| vec![c(if p[0] >= n0 { 0.0 } else { 1.0 }, 0.0)],
        );
        let a = LatticeOperator::new(
            1,
            1,
            vec![Term { shift: vec![s], multiplier: b }, Term { shift: vec![0], multiplier: cm }],
        )
        .unwrap();
        let exact = exact_kernel_band(&a, &Window::symmetric(1, 16)).unwrap();
        let wind = band_symbol_index(&a).unwrap();
        assert_eq!(exact.index, wind.index, "s = {s}");
        assert_eq!(exact.index, s);
    }
}

#[test]
fn mult_jk_counts_and_window_check() {
    let r = multiplier_kernel_dims(&mult_jk(), &Window::symmetric(2, 50)).unwrap();
    assert_eq!((r.ker_dim, r.coker_dim, r.index), (Some(1), Some(1), 0));
}
