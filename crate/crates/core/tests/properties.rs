use proptest::prelude::*;

use locstab::channels;
use locstab::correlators::{self, CorrelatorParams};
use locstab::info;
use locstab::linalg;
use locstab::markov;
use locstab::models;
use locstab::purification;
use locstab::states::{RegionPartition, Register};

fn dims() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(2usize..=3, 2..=3).prop_filter("small", |d| d.iter().product::<usize>() <= 18)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_keeps_trace_and_positivity(d in dims(), seed in any::<u64>()) {
        let reg = Register::chain(&d).unwrap();
        let mut r = models::rng(seed);
        let rho = models::random_state(&mut r, &reg, None);
        let m = rho.partial_trace(&reg.region(&[0]).unwrap()).unwrap();
        prop_assert!((linalg::trace(m.matrix()).re - 1.0).abs() < 1e-12);
        prop_assert!(linalg::eigenvalues_hermitian(m.matrix()).iter().all(|&l| l > -1e-12));
    }

    #[test]
    fn strong_subadditivity(seed in any::<u64>(), rank in 1usize..=8) {
        let reg = Register::qubits(3);
        let mut r = models::rng(seed);
        let rho = models::random_state(&mut r, &reg, Some(rank));
        let part = RegionPartition::abc(&reg, &[0], &[1], &[2]).unwrap();
        prop_assert!(info::cmi_of_partition(&rho, &part).unwrap() > -1e-10);
        let a = reg.region(&[0]).unwrap();
        let c = reg.region(&[2]).unwrap();
        let mi = info::mutual_information(&rho, &a, &c).unwrap();
        prop_assert!(mi > -1e-10 && mi <= 2.0 + 1e-10);
    }

    #[test]
    fn relative_entropy_monotone_under_partial_trace(seed in any::<u64>()) {
        let reg = Register::qubits(2);
        let mut r = models::rng(seed);
        let rho = models::random_state(&mut r, &reg, None);
        let sigma = models::random_state(&mut r, &reg, None);
        let keep = reg.region(&[0]).unwrap();
        let full = info::relative_entropy(&rho, &sigma).unwrap();
        let part = info::relative_entropy(&rho.partial_trace(&keep).unwrap(), &sigma.partial_trace(&keep).unwrap()).unwrap();
        prop_assert!(part <= full + 1e-9);
    }

    #[test]
    fn random_channels_are_cptp(seed in any::<u64>(), k in 1usize..=4) {
        let reg = Register::qubits(2);
        let mut r = models::rng(seed);
        let phi = models::random_channel(&mut r, &reg, reg.region(&[1]).unwrap(), k);
        prop_assert!(phi.choi_min_eigenvalue(&reg).unwrap() > -1e-10);
        prop_assert!(phi.trace_preservation_residual(&reg).unwrap() < 1e-10);
    }

    #[test]
    fn cpq_symmetry_and_range(seed in any::<u64>(), p in 0.01f64..=1.0, q in 0.01f64..=1.0) {
        let reg = Register::chain(&[3]).unwrap();
        let mut r = models::rng(seed);
        let rho = models::random_state(&mut r, &reg, None);
        let o = models::ginibre(&mut r, 3, 3);
        let prm = CorrelatorParams::new(p, q).unwrap();
        let a = correlators::cpq(&o, &rho, prm).unwrap();
        let b = correlators::cpq(&o.adjoint(), &rho, prm.swapped()).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
        prop_assert!(a <= linalg::operator_norm(&o) + 1e-9);
    }

    #[test]
    fn purification_reproduces_the_state(d in dims(), seed in any::<u64>()) {
        let reg = Register::chain(&d).unwrap();
        let mut r = models::rng(seed);
        let rho = models::random_state(&mut r, &reg, None);
        let ps = purification::canonical_purify(&rho).unwrap();
        let base = ps.marginal(&ps.doubled().region(&(0..d.len()).collect::<Vec<_>>()).unwrap()).unwrap();
        prop_assert!(linalg::max_abs_diff(base.matrix(), rho.matrix()) < 1e-10);
    }

    #[test]
    fn mirror_decomposition_reconstructs(seed in any::<u64>(), d in 2usize..=3) {
        let mut r = models::rng(seed);
        let o = models::ginibre(&mut r, d * d, d * d);
        prop_assert!(purification::choi_decompose(&o, d).unwrap().reconstruction_error() < 1e-10);
    }

    #[test]
    fn instruments_preserve_markov_on_average(seed in any::<u64>(), k in 1usize..=4) {
        let reg = Register::qubits(3);
        let mut r = models::rng(seed);
        let rho = models::random_state(&mut r, &reg, None);
        let part = RegionPartition::abc(&reg, &[0], &[1], &[2]).unwrap();
        let inst = models::random_instrument(&mut r, &reg, reg.region(&[0]).unwrap(), k);
        let (lhs, rhs) = markov::measurement_average_cmi(&rho, &inst, &part).unwrap();
        prop_assert!(lhs <= rhs + 1e-9);
        let total: f64 = channels::apply_instrument(&rho, &inst).unwrap().outcomes.iter().map(|t| t.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }
}
