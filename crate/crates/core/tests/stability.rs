use locstab::channels::{ChannelMap, KrausInstrument};
use locstab::linalg::{self, CMatrix};
use locstab::models;
use locstab::stability::{self, CircuitPair, SrcGeometry};
use locstab::states::{Register, RegionPartition};
use locstab::Error;

fn z_measurement(reg: &Register) -> KrausInstrument {
    KrausInstrument::new(reg, reg.region(&[0]).unwrap(), vec![linalg::ket_bra(2, 0, 0), linalg::ket_bra(2, 1, 1)]).unwrap()
}

fn x_measurement(reg: &Register) -> KrausInstrument {
    let id = linalg::identity(2);
    let x = linalg::pauli('X');
    KrausInstrument::new(
        reg,
        reg.region(&[0]).unwrap(),
        vec![(&id + &x).unscale(2.0), (&id - &x).unscale(2.0)],
    )
    .unwrap()
}

/// Kraus operators `|a, a⊕b⟩⟨a, b|`: dephase, then CNOT.
fn dephase_cnot() -> Vec<CMatrix> {
    let mut ops = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            let mut k = CMatrix::zeros(4, 4);
            k[(2 * a + (a ^ b), 2 * a + b)] = linalg::cr(1.0);
            ops.push(k);
        }
    }
    ops
}

fn brickwork(reg: &Register, gate: impl Fn() -> Vec<CMatrix>) -> Vec<ChannelMap> {
    (0..reg.n_sites() / 2)
        .map(|i| ChannelMap::kraus(reg.region(&[2 * i, 2 * i + 1]).unwrap(), gate()))
        .collect()
}

#[test]
fn incoherent_cat_depends_on_the_measured_basis() {
    let reg = Register::qubits(4);
    let part = stability::chain_abbc(&reg, 1, 1, 1).unwrap();
    let rho = models::cat_state(4, false);
    let z = stability::stability_score(&rho, &z_measurement(&reg), &part).unwrap();
    let x = stability::stability_score(&rho, &x_measurement(&reg), &part).unwrap();
    assert!((z.trajectory_error - 1.0).abs() < 1e-9, "{}", z.trajectory_error);
    assert!(x.trajectory_error < 1e-9, "{}", x.trajectory_error);
}

#[test]
fn coherent_cat_is_unstable_under_x() {
    let reg = Register::qubits(4);
    let part = stability::chain_abbc(&reg, 1, 1, 1).unwrap();
    let rho = models::cat_state(4, true);
    let x = stability::stability_score(&rho, &x_measurement(&reg), &part).unwrap();
    assert!(x.trajectory_error > 0.5, "{}", x.trajectory_error);
}

#[test]
fn dressed_recovery_after_unitary_layer() {
    let reg = Register::qubits(6);
    let mut r = models::rng(21);
    let mut rho = models::random_state(&mut r, &Register::qubits(1), None);
    for _ in 1..6 {
        rho = rho.tensor(&models::random_state(&mut r, &Register::qubits(1), None)).unwrap();
    }
    let us: Vec<CMatrix> = (0..3).map(|_| models::random_unitary(&mut r, 4)).collect();
    let forward: Vec<ChannelMap> = us
        .iter()
        .enumerate()
        .map(|(i, u)| ChannelMap::kraus(reg.region(&[2 * i, 2 * i + 1]).unwrap(), vec![u.clone()]))
        .collect();
    let reverse: Vec<ChannelMap> = us
        .iter()
        .enumerate()
        .map(|(i, u)| ChannelMap::kraus(reg.region(&[2 * i, 2 * i + 1]).unwrap(), vec![u.adjoint()]))
        .collect();
    let circuit = CircuitPair {
        forward: vec![forward],
        reverse: vec![reverse],
    };
    let part = stability::chain_abbc(&reg, 1, 2, 2).unwrap();
    let inst = models::random_instrument(&mut r, &reg, reg.region(&[0]).unwrap(), 2);
    let rep = stability::dressed_recovery(&rho, &circuit, &inst, &part).unwrap();
    assert!(rep.trajectory_error < 1e-9, "{}", rep.trajectory_error);
}

#[test]
fn dressed_recovery_with_dephasing_gates() {
    let n = 6;
    let reg = Register::qubits(n);
    let rho = models::gibbs_state(&reg, &models::commuting_ising(n, 1.0, 0.5), 1.0).unwrap();
    let circuit = CircuitPair {
        forward: vec![brickwork(&reg, dephase_cnot)],
        reverse: vec![brickwork(&reg, dephase_cnot)],
    };
    assert!(circuit.reversibility_residual(&rho).unwrap() < 1e-12);
    let part = stability::chain_abbc(&reg, 1, 2, 2).unwrap();
    // Z on the control commutes with the gates, so dressing must reproduce the
    // undressed error on the original state.
    let dressed = stability::dressed_recovery(&rho, &circuit, &z_measurement(&reg), &part).unwrap();
    let base = stability::stability_score(&rho, &z_measurement(&reg), &part).unwrap();
    assert!(
        (dressed.trajectory_error - base.trajectory_error).abs() < 1e-10,
        "{} vs {}",
        dressed.trajectory_error,
        base.trajectory_error
    );
}

#[test]
fn irreversible_gates_are_rejected() {
    let reg = Register::qubits(4);
    let rho = models::gibbs_state(&reg, &models::tfim(4), 0.5).unwrap();
    let dep = vec![ChannelMap::depolarizing(&reg, &reg.region(&[0, 1]).unwrap())];
    let id = vec![ChannelMap::kraus(reg.region(&[0, 1]).unwrap(), vec![linalg::identity(4)])];
    let circuit = CircuitPair {
        forward: vec![dep],
        reverse: vec![id],
    };
    let part = stability::chain_abbc(&reg, 1, 1, 1).unwrap();
    let err = stability::dressed_recovery(&rho, &circuit, &z_measurement(&reg), &part).unwrap_err();
    assert!(matches!(err, Error::NotLocallyReversible(_)));
    let deep = CircuitPair::identity(3);
    assert!(stability::dressed_recovery(&rho, &deep, &z_measurement(&reg), &part).is_err());
}

#[test]
fn correlation_length_grows_with_beta() {
    let n = 6;
    let reg = Register::qubits(n);
    let geom = SrcGeometry {
        a: reg.region(&[0]).unwrap(),
        separations: (1..n).collect(),
        restarts: 2,
        seed: 4,
    };
    let eta = |beta: f64| {
        let rho = models::gibbs_state(&reg, &models::tfim(n), beta).unwrap();
        stability::src_profile(&rho, &geom).unwrap().eta().unwrap()
    };
    let (cold, hot) = (eta(2.0), eta(0.3));
    assert!(cold > hot, "η(2) = {cold}, η(0.3) = {hot}");
}

#[test]
fn buffer_growth_reduces_error_on_six_sites() {
    let n = 6;
    let reg = Register::qubits(n);
    let rho = models::gibbs_state(&reg, &models::tfim(n), 0.3).unwrap();
    let inst = x_measurement(&reg);
    let errs: Vec<f64> = [(0, 1), (1, 1), (1, 2)]
        .iter()
        .map(|&(r1, r2)| {
            let part = stability::chain_abbc(&reg, 1, r1, r2).unwrap();
            stability::stability_score(&rho, &inst, &part).unwrap().trajectory_error
        })
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

#[test]
fn parity_postselection_by_petz_is_not_exact() {
    let rho = models::parity_state(4);
    let reg = rho.register().clone();
    let mut r = models::rng(8);
    let g = models::ginibre(&mut r, 2, 2);
    let k = g.unscale(linalg::operator_norm(&g));
    let inst = KrausInstrument::new(&reg, reg.region(&[0]).unwrap(), vec![k.clone()]).unwrap();
    let explicit = models::parity_reset_channel(&k).unwrap();
    assert!(stability::postselection_error_with(&rho, &inst, 0, &explicit).unwrap() < 1e-9);
    let part = RegionPartition::abbc(&reg, &[0], &[1], &[2], &[3]).unwrap();
    let rep = stability::implement_postselection(&rho, &inst, &part).unwrap();
    assert!(rep.average_error > 1e-3, "{}", rep.average_error);
}
