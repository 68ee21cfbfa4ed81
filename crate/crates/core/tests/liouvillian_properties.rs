use nalgebra::Matrix4;
use num_complex::Complex64;
use proptest::prelude::*;
use tripod_eit::density::Matrix4c;
use tripod_eit::liouvillian::{liouvillian, unvectorize, vec_index, vectorize};
use tripod_eit::steady_state::kernel_dimension;
use tripod_eit::{Configuration, RelaxationRates, TripodModel};

fn model(config: Configuration, omega_c: f64, ratio: f64, delta: f64, delta_z: f64, delta_c: f64) -> TripodModel {
    TripodModel::new(config)
        .with_coupling_rabi(omega_c)
        .with_probe_rabi(ratio * omega_c)
        .with_coupling_detuning(delta_c)
        .with_raman_detuning(delta)
        .with_delta_z(delta_z)
}

fn any_model() -> impl Strategy<Value = TripodModel> {
    (
        prop_oneof![Just(Configuration::Config1), Just(Configuration::Config2)],
        1e-4..2e-2f64,
        1e-3..0.5f64,
        -1e-3..1e-3f64,
        -3e-4..3e-4f64,
        -0.5..0.5f64,
    )
        .prop_map(|(c, w, r, d, z, dc)| model(c, w, r, d, z, dc))
}

fn hermitian() -> impl Strategy<Value = Matrix4c> {
    prop::collection::vec(-1.0..1.0f64, 16).prop_map(|v| {
        let mut m = Matrix4c::zeros();
        let mut k = 0;
        for i in 0..4 {
            m[(i, i)] = Complex64::from(v[k]);
            k += 1;
            for j in i + 1..4 {
                m[(i, j)] = Complex64::new(v[k], v[k + 1]);
                m[(j, i)] = m[(i, j)].conj();
                k += 2;
            }
        }
        m
    })
}

#[test]
fn column_stacking_index() {
    let mut m = Matrix4c::zeros();
    m[(2, 1)] = Complex64::new(3.0, -1.0);
    let v = vectorize(&m);
    assert_eq!(vec_index(2, 1), 6);
    assert_eq!(v[6], Complex64::new(3.0, -1.0));
    assert_eq!(unvectorize(&v), m);
}

#[test]
fn without_relaxation_generator_is_anti_hermitian() {
    let m = model(Configuration::Config2, 8.6e-3, 0.01, 2e-5, 2.8e-5, 0.0).with_rates(RelaxationRates::zero());
    let l = liouvillian(&m).matrix;
    let defect = (l + l.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(defect < 1e-18, "{defect}");
    let eig = l.schur().eigenvalues().expect("complex Schur is triangular");
    for z in eig.iter() {
        assert!(z.re.abs() < 1e-15, "eigenvalue {z}");
    }
}

#[test]
fn pure_dephasing_decays_coherence_only() {
    let l = liouvillian(&TripodModel::new(Configuration::Config1));
    let mut rho = Matrix4::zeros();
    rho[(1, 3)] = Complex64::from(1.0);
    let out = l.apply(&rho);
    let rates = RelaxationRates::default();
    assert!((out[(1, 3)] + Complex64::from(rates.raman_bar)).norm() < 1e-20);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn preserves_trace(m in any_model()) {
        let l = liouvillian(&m);
        prop_assert!(l.trace_defect() <= 1e-15 * l.norm_inf());
    }

    #[test]
    fn maps_hermitian_to_hermitian(m in any_model(), rho in hermitian()) {
        let out = liouvillian(&m).apply(&rho);
        let err = (out - out.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-16, "{}", err);
    }

    #[test]
    fn kernel_is_one_dimensional(m in any_model()) {
        prop_assert_eq!(kernel_dimension(&liouvillian(&m)), 1);
    }

    #[test]
    fn vectorize_round_trip(rho in hermitian()) {
        prop_assert_eq!(unvectorize(&vectorize(&rho)), rho);
    }
}
