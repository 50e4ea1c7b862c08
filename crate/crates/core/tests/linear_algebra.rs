use icdlab::oracle::{random_density_with, random_pure_state_with, seeded_rng};
use icdlab::qmat::{
    dual_basis, hermitian_eig, partial_transpose, psd_sqrt, restricted_inverse, CVector, Mat4,
    Subsystem, Vec4, C64,
};
use icdlab::qstate::{mix, ppt_min_eigenvalue, spin_flip, spin_flip_overlap, PureState};
use icdlab::{DensityMatrix, Vec2, WeightedEnsemble};
use proptest::prelude::*;

fn entries(n: usize, range: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-range..range, n)
}

fn hermitian(e: &[f64]) -> Mat4 {
    let mut m = Mat4::zeros();
    let mut k = 0;
    for i in 0..4 {
        m[(i, i)] = C64::new(e[k], 0.0);
        k += 1;
        for j in i + 1..4 {
            m[(i, j)] = C64::new(e[k], e[k + 1]);
            m[(j, i)] = m[(i, j)].conj();
            k += 2;
        }
    }
    m
}

fn vec4(e: &[f64]) -> Vec4 {
    CVector(std::array::from_fn(|i| C64::new(e[2 * i], e[2 * i + 1])))
}

fn vec2(e: &[f64]) -> Vec2 {
    CVector([C64::new(e[0], e[1]), C64::new(e[2], e[3])])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn eig_reconstructs(e in entries(16, 10.0)) {
        let h = hermitian(&e);
        let eig = hermitian_eig(&h).unwrap();
        prop_assert!(eig.reconstruct().max_abs_diff(&h) <= 1e-10);
        for w in eig.values.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn sqrt_squares_back(e in entries(32, 1.0)) {
        let g = Mat4::from_fn(|i, j| C64::new(e[4 * i + j], e[16 + 4 * i + j]));
        let h = g * g.adjoint();
        let r = psd_sqrt(&h).unwrap();
        prop_assert!((r * r).max_abs_diff(&h) <= 1e-9);
    }

    #[test]
    fn partial_transpose_is_an_involution(e in entries(32, 5.0)) {
        let m = Mat4::from_fn(|i, j| C64::new(e[4 * i + j], e[16 + 4 * i + j]));
        for s in [Subsystem::First, Subsystem::Second] {
            prop_assert_eq!(partial_transpose(&partial_transpose(&m, s), s), m);
        }
    }

    #[test]
    fn dual_of_dual_is_original(e in entries(24, 1.0)) {
        let vs: Vec<Vec4> = e.chunks(8).map(vec4).collect();
        prop_assume!(icdlab::qmat::gram_determinant(&vs) > 1e-6);
        let back = dual_basis(&dual_basis(&vs).unwrap()).unwrap();
        for (a, b) in vs.iter().zip(&back) {
            prop_assert!(a.max_abs_diff(b) <= 1e-9);
        }
    }

    #[test]
    fn restricted_inverse_inverts_on_the_span(e in entries(16, 1.0), w in prop::collection::vec(0.1..2.0f64, 2)) {
        let vs: Vec<Vec4> = e.chunks(8).map(vec4).collect();
        prop_assume!(icdlab::qmat::gram_determinant(&vs) > 1e-4);
        let m = vs[0].outer(&vs[0]).scale_real(w[0]) + vs[1].outer(&vs[1]).scale_real(w[1]);
        let inv = restricted_inverse(&m, &vs).unwrap();
        for v in &vs {
            prop_assert!((inv * m).mul_vec(v).max_abs_diff(v) <= 1e-9);
        }
    }

    #[test]
    fn mixtures_are_states(
        w in prop::collection::vec(0.0..1.0f64, 1..6),
        e in entries(48, 1.0),
    ) {
        let total: f64 = w.iter().sum();
        prop_assume!(total > 1e-3);
        let states: Vec<PureState> = e
            .chunks(8)
            .take(w.len())
            .filter_map(|c| PureState::from_unnormalized(vec4(c)).ok())
            .collect();
        prop_assume!(states.len() == w.len());
        let ens = WeightedEnsemble::new(w.iter().map(|x| x / total).collect(), states).unwrap();
        let rho = mix(&ens).unwrap();
        prop_assert!(DensityMatrix::new(*rho.matrix()).is_ok());
    }

    #[test]
    fn spin_flip_is_an_involution(seed in any::<u64>()) {
        let rho = random_density_with(&mut seeded_rng(seed));
        let once = DensityMatrix::new(spin_flip(&rho)).unwrap();
        prop_assert!(spin_flip(&once).max_abs_diff(rho.matrix()) <= 1e-12);
    }

    #[test]
    fn products_have_no_spin_flip_overlap(a in entries(4, 1.0), b in entries(4, 1.0)) {
        let (a, b) = (vec2(&a), vec2(&b));
        prop_assume!(a.norm() > 1e-3 && b.norm() > 1e-3);
        let psi = PureState::product(&a.normalized().unwrap(), &b.normalized().unwrap()).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let overlap = (*rho.matrix() * spin_flip(&rho)).trace();
        prop_assert!(overlap.norm() <= 1e-12);
        prop_assert!(spin_flip_overlap(psi.amplitudes()).norm() <= 1e-12);
    }
}

#[test]
fn pt_spectrum_is_bounded_below() {
    let mut rng = seeded_rng(101);
    for _ in 0..10_000 {
        let rho = random_density_with(&mut rng);
        assert!(ppt_min_eigenvalue(&rho) >= -0.5);
    }
    for _ in 0..1_000 {
        let rho = DensityMatrix::from_pure(&random_pure_state_with(&mut rng));
        assert!(ppt_min_eigenvalue(&rho) >= -0.5 - 1e-12);
    }
}
