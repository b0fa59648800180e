use locstab::correlators::CorrelatorParams;
use locstab::linalg;
use locstab::markov;
use locstab::models;
use locstab::purification;
use locstab::states::{DensityMatrix, RegionPartition, Register};
use locstab::Error;

#[test]
fn e4_witness_search_finds_a_defect() {
    let fx = models::counterexample("E4", 4).unwrap();
    let ws = markov::local_computability_witness_search(&fx.state, &fx.partition, CorrelatorParams { p: 0.5, q: 0.5 }, 64, 1)
        .unwrap();
    assert!(ws.witness.is_some());
    assert!(ws.max_defect > markov::WITNESS_THRESHOLD, "{}", ws.max_defect);
}

#[test]
fn fidelity_point_is_rejected_by_witness_search() {
    let fx = models::counterexample("E4", 4).unwrap();
    let r = markov::local_computability_witness_search(&fx.state, &fx.partition, CorrelatorParams { p: 1.0, q: 1.0 }, 4, 1);
    assert!(r.is_err());
}

#[test]
fn exact_markov_chain_has_no_witness() {
    let mut r = models::rng(12);
    let rho = models::random_qmc(&mut r, 2, 2, 2, 1);
    let part = RegionPartition::abc(rho.register(), &[0], &[1], &[2]).unwrap();
    let ws = markov::local_computability_witness_search(&rho, &part, CorrelatorParams { p: 0.5, q: 0.5 }, 32, 2).unwrap();
    assert!(ws.witness.is_none(), "{}", ws.max_defect);
}

#[test]
fn classical_chain_mie_bound() {
    let reg = Register::qubits(3);
    let rho = models::gibbs_state(&reg, &models::commuting_ising(3, 1.0, 0.5), 1.0).unwrap();
    let part = RegionPartition::abc(&reg, &[0], &[1], &[2]).unwrap();
    let rep = purification::classical_mie(&rho, &part).unwrap();
    assert!(rep.bound_holds, "{rep:?}");
    assert!(rep.cmi.abs() < 1e-10);
    let quantum = models::gibbs_state(&reg, &models::tfim(3), 1.0).unwrap();
    assert!(matches!(purification::classical_mie(&quantum, &part), Err(Error::NotClassical)));
}

#[test]
fn bipartite_stabilizer_identity() {
    let stab = models::stabilizer_state(&["XX", "ZZ"]).unwrap();
    let reg = stab.state().register().clone();
    let part = RegionPartition::new(
        &reg,
        vec![("A", reg.region(&[0]).unwrap()), ("B", reg.region(&[1]).unwrap())],
    )
    .unwrap();
    let (mi, s) = purification::stabilizer_tfd_identity(&stab, &part).unwrap();
    assert!((mi - 2.0).abs() < 1e-10 && (mi - s).abs() < 1e-10, "{mi} {s}");
}

#[test]
fn tfd_correlator_vanishes_on_products() {
    let mut r = models::rng(2);
    let one = Register::qubits(1);
    let rho = models::random_state(&mut r, &one, None)
        .tensor(&models::random_state(&mut r, &one, None))
        .unwrap();
    let reg = rho.register().clone();
    let o1 = models::ginibre(&mut r, 4, 4);
    let o2 = models::ginibre(&mut r, 4, 4);
    let c = purification::tfd_connected_correlator(&rho, &o1, &reg.region(&[0]).unwrap(), &o2, &reg.region(&[1]).unwrap())
        .unwrap();
    assert!(c < 1e-10, "{c}");
}

#[test]
fn pure_state_purifies_to_a_product_with_its_mirror() {
    let mut r = models::rng(4);
    let reg = Register::qubits(2);
    let v = models::random_pure_vector(&mut r, 4);
    let rho = DensityMatrix::pure(reg.clone(), &v).unwrap();
    let ps = purification::canonical_purify(&rho).unwrap();
    let mirror = ps.marginal(&ps.doubled().region(&[2, 3]).unwrap()).unwrap();
    let purity = linalg::trace(&(mirror.matrix() * mirror.matrix())).re;
    assert!((purity - 1.0).abs() < 1e-10);
}
