use nalgebra::DMatrix;
use proptest::prelude::*;
use scissors_core::gaussian::symplectic_deviation;
use scissors_core::{beamsplitter, phase_rotation, squeezer, tmsv, vacuum, SymplecticOp};

const MODES: usize = 3;

#[derive(Debug, Clone)]
enum Gate {
    Bs(f64, usize, usize),
    Sq(f64, usize),
    Rot(f64, usize),
}

fn gate() -> impl Strategy<Value = Gate> {
    prop_oneof![
        (0.0..=1.0f64, 0..MODES, 0..MODES)
            .prop_filter("distinct modes", |(_, a, b)| a != b)
            .prop_map(|(t, a, b)| Gate::Bs(t, a, b)),
        (-1.0..1.0f64, 0..MODES).prop_map(|(r, m)| Gate::Sq(r, m)),
        (-3.2..3.2f64, 0..MODES).prop_map(|(th, m)| Gate::Rot(th, m)),
    ]
}

fn op(g: &Gate) -> SymplecticOp<f64> {
    match *g {
        Gate::Bs(t, a, b) => beamsplitter(t, (a, b), MODES).unwrap(),
        Gate::Sq(r, m) => squeezer(r, m, MODES).unwrap(),
        Gate::Rot(th, m) => phase_rotation(th, m, MODES).unwrap(),
    }
}

fn circuit(gates: &[Gate]) -> SymplecticOp<f64> {
    gates
        .iter()
        .fold(SymplecticOp::identity(MODES), |acc, g| op(g).compose(&acc))
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn circuits_preserve_the_symplectic_form(gates in prop::collection::vec(gate(), 1..12)) {
        let s = circuit(&gates);
        let scale = max_abs(s.matrix()).powi(2).max(1.0);
        prop_assert!(symplectic_deviation(s.matrix()) <= 1e-12 * scale);
    }

    #[test]
    fn inverse_undoes_the_circuit(gates in prop::collection::vec(gate(), 1..12)) {
        let s = circuit(&gates);
        let id = s.inverse().compose(&s);
        let err = max_abs(&(id.matrix() - DMatrix::identity(2 * MODES, 2 * MODES)));
        prop_assert!(err <= 1e-10 * max_abs(s.matrix()).powi(2).max(1.0));
    }

    #[test]
    fn pure_inputs_stay_pure(mu in 0.0..3.0f64, gates in prop::collection::vec(gate(), 1..8)) {
        let state = tmsv(mu).unwrap().tensor(&vacuum(1).unwrap());
        let out = state.apply_symplectic(&circuit(&gates)).unwrap();
        out.check_physical().unwrap();
        for nu in out.symplectic_eigenvalues().unwrap() {
            prop_assert!((nu - 1.0).abs() < 1e-8, "nu = {}", nu);
        }
    }

    #[test]
    fn loss_keeps_states_physical(mu in 0.0..3.0f64, eta in 0.0..=1.0f64, gates in prop::collection::vec(gate(), 1..8)) {
        let state = tmsv(mu).unwrap().tensor(&vacuum(1).unwrap());
        let out = state.apply_symplectic(&circuit(&gates)).unwrap().pure_loss(eta, 1).unwrap();
        out.check_physical().unwrap();
    }
}

#[test]
fn balanced_beamsplitter_on_two_vacua_is_trivial() {
    let v = vacuum::<f64>(2).unwrap();
    let out = v.apply_symplectic(&beamsplitter(0.5, (0, 1), 2).unwrap()).unwrap();
    assert!(max_abs(&(out.cov() - DMatrix::identity(4, 4))) < 1e-15);
}
