//! Values frozen from an independent dense numpy implementation.

use locstab::channels::{self, KrausInstrument};
use locstab::correlators::{CorrelatorParams, RhoPowers};
use locstab::linalg::{self, CMatrix};
use locstab::lindblad;
use locstab::markov;
use locstab::models;
use locstab::purification;
use locstab::stability;
use locstab::states::{product_operator, RegionPartition, Register};

fn close(got: f64, want: f64, rel: f64) {
    assert!(
        (got - want).abs() <= rel * want.abs(),
        "got {got:.15e}, want {want:.15e}"
    );
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

#[test]
fn e4_purified_marginal_defect() {
    let fx = models::counterexample("E4", 4).unwrap();
    let d = purification::tfd_local_computability_defect(&fx.state, &fx.partition).unwrap();
    close(d, 1.123724356957945e-1, 1e-10);
}

#[test]
fn tfim_connected_cpq() {
    let n = 8;
    let reg = Register::qubits(n);
    let rho = models::gibbs_state(&reg, &models::tfim(n), 0.3).unwrap();
    let rp = RhoPowers::new(rho.matrix()).unwrap();
    let prm = CorrelatorParams { p: 0.5, q: 0.5 };
    let x = linalg::pauli('X');
    let o1 = product_operator(&reg, &[(0, x.clone())]);
    let want = [3.958275481359863e-2, 3.124794211584181e-5, 3.516675761705557e-8];
    for (j, w) in (1..=3).zip(want) {
        let o2 = product_operator(&reg, &[(j, x.clone())]);
        let d = (rp.cpq(&(&o1 * &o2), prm) - rp.cpq(&o1, prm) * rp.cpq(&o2, prm)).abs();
        close(d, w, 1e-6);
    }
}

#[test]
fn ising_davies_gap() {
    let m = lindblad::ising_davies(3, 1.0, 0.5, 1.0).unwrap();
    close(m.gap, 0.7049279508052968, 1e-9);
}

#[test]
fn tfim_stability_errors() {
    let n = 8;
    let reg = Register::qubits(n);
    let rho = models::gibbs_state(&reg, &models::tfim(n), 0.3).unwrap();
    let inst = x_measurement(&reg);
    let cases = [
        ((0, 1), 3.811506949196809e-3),
        ((1, 1), 3.710587683321477e-3),
        ((1, 2), 1.770365271108725e-5),
    ];
    for ((r1, r2), want) in cases {
        let part = stability::chain_abbc(&reg, 1, r1, r2).unwrap();
        let rep = stability::stability_score(&rho, &inst, &part).unwrap();
        close(rep.trajectory_error, want, 1e-7);
    }
}

#[test]
fn e4_petz_fails_and_rotation_does_not_hurt() {
    let fx = models::counterexample("E4", 4).unwrap();
    let err = markov::petz_recovery_error(&fx.state, &fx.partition).unwrap();
    assert!(err > 0.01, "{err}");
    let ts: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.25).collect();
    let scan = markov::rotated_petz_scan(&fx.state, &fx.partition, &ts).unwrap();
    let f0 = markov::rotated_petz_scan(&fx.state, &fx.partition, &[0.0]).unwrap();
    assert!(scan.best_fidelity >= f0.best_fidelity - 1e-12);
}

#[test]
fn e3_recovery_needs_a_second_buffer() {
    let fx = models::counterexample("E3", 3).unwrap();
    let reg = fx.state.register().clone();
    let post = KrausInstrument::new(&reg, reg.region(&[0]).unwrap(), vec![linalg::ket_bra(2, 1, 1)]).unwrap();
    let sigma = channels::apply_instrument(&fx.state, &post).unwrap().outcomes[0].state.clone();
    let part = RegionPartition::abbc(&reg, &[0], &[1], &[], &[2]).unwrap();
    let r = channels::stitch_then_recover(&fx.state, &part).unwrap();
    close(r.apply_state(&sigma).trace_distance(&fx.state).unwrap(), 0.75, 1e-12);
}

#[test]
fn mirror_swap_decomposition() {
    let mut swap = CMatrix::zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            swap[(2 * b + a, 2 * a + b)] = linalg::cr(1.0);
        }
    }
    let m = purification::choi_decompose(&swap, 2).unwrap();
    assert!(m.reconstruction_error() < 1e-12);
}
