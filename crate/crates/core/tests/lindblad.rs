use locstab::channels;
use locstab::lindblad::{self, LindbladModel};
use locstab::linalg;
use locstab::models;
use locstab::states::{product_operator, Register};
use locstab::Error;

fn ising() -> LindbladModel {
    lindblad::ising_davies(3, 1.0, 0.5, 1.0).unwrap()
}

#[test]
fn two_level_spectrum() {
    let reg = Register::qubits(1);
    let site = reg.region(&[0]).unwrap();
    let m = lindblad::davies_generator(&reg, &[linalg::pauli('Z')], &[(site, linalg::pauli('X'))], 1.0).unwrap();
    let gap = lindblad::spectral_gap(&m).unwrap();
    let sum = (-1f64).exp() + 1f64.exp();
    // Coherences relax at half the rate of populations.
    assert!((gap.symmetrized - sum / 2.0).abs() < 1e-9, "{gap:?}");
    assert!(m.kms_residual().unwrap() < 1e-12);
    let g = models::gibbs_state(&reg, &linalg::pauli('Z'), 1.0).unwrap();
    assert!(m.steady.trace_distance(&g).unwrap() < 1e-12);
}

#[test]
fn heisenberg_variance_contracts_at_the_gap() {
    let m = ising();
    let reg = m.register.clone();
    let o = product_operator(&reg, &[(0, linalg::pauli('X')), (1, linalg::pauli('Y'))]);
    let v0 = lindblad::gns_variance(&m.steady, &o);
    for t in [0.5, 1.0, 2.0, 4.0] {
        let ot = lindblad::heisenberg(&m, &o, t).unwrap();
        let vt = lindblad::gns_variance(&m.steady, &ot);
        assert!(vt <= (-2.0 * m.gap * t).exp() * v0 * (1.0 + 1e-9) + 1e-14, "t = {t}: {vt} vs {v0}");
    }
}

#[test]
fn prefactor_variance_two_ways() {
    let m = ising();
    let reg = m.register.clone();
    let mut r = models::rng(5);
    let inst = models::random_instrument(&mut r, &reg, reg.region(&[0]).unwrap(), 2);
    for t in &channels::apply_instrument(&m.steady, &inst).unwrap().outcomes {
        let (direct, renyi) = lindblad::gns_prefactor_variance(&t.state, &m.steady).unwrap();
        assert!((direct - renyi).abs() < 1e-9 * (1.0 + direct), "{direct} vs {renyi}");
    }
}

#[test]
fn relaxation_respects_the_prefactor_bound() {
    let m = ising();
    let reg = m.register.clone();
    let mut r = models::rng(6);
    let rho0 = models::random_state(&mut r, &reg, None);
    let times: Vec<f64> = (0..=20).map(|i| 0.5 * i as f64).collect();
    let rep = lindblad::convergence_check(&m, &rho0, &times).unwrap();
    assert!(rep.rate_ok);
    // Trace norm is at most the χ²-type bound `prefactor·e^{−γt}` up to the fitted constant.
    assert!(rep.fitted_constant <= 1.0 + 1e-9, "{}", rep.fitted_constant);
}

#[test]
fn detectability_projectors_are_idempotent() {
    let m = ising();
    let a = m.register.region(&[0]).unwrap();
    let dl = lindblad::dl_recovery(&m, &a, 2).unwrap();
    assert!(dl.max_idempotence_residual() < 1e-9);
    let x = dl.apply(m.steady.matrix());
    assert!(linalg::max_abs_diff(&x, m.steady.matrix()) < 1e-10);
}

#[test]
fn detectability_error_shrinks_with_sweeps() {
    let m = ising();
    let reg = m.register.clone();
    let a = reg.region(&[0]).unwrap();
    let mut r = models::rng(1);
    let inst = models::random_instrument(&mut r, &reg, a.clone(), 2);
    let e1 = lindblad::detectability_recovery(&m, &a, 1, &inst).unwrap();
    let e30 = lindblad::detectability_recovery(&m, &a, 30, &inst).unwrap();
    assert!(e30 < 1e-6 && e30 < e1, "{e1} {e30}");
}

#[test]
fn non_commuting_model_has_no_dl_recovery() {
    let reg = Register::qubits(2);
    let x = linalg::pauli('X');
    let terms = vec![
        product_operator(&reg, &[(0, linalg::pauli('Z')), (1, linalg::pauli('Z'))]),
        product_operator(&reg, &[(0, x.clone())]),
    ];
    let couplings: Vec<_> = (0..2).map(|i| (reg.region(&[i]).unwrap(), x.clone())).collect();
    let m = lindblad::davies_generator(&reg, &terms, &couplings, 1.0).unwrap();
    assert!(!m.commuting);
    let a = reg.region(&[0]).unwrap();
    assert!(matches!(lindblad::dl_recovery(&m, &a, 1), Err(Error::NotCommuting)));
}

#[test]
fn dimension_cap() {
    assert!(lindblad::ising_davies(6, 1.0, 0.5, 1.0).is_err());
}
