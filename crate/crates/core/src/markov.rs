//! Quantum Markov chain certification, the averaged-CMI inequality under local
//! instruments, and a sampled search for local-computability witnesses.

use rayon::prelude::*;

use crate::channels::{self, KrausInstrument};
use crate::correlators::{self, CorrelatorParams};
use crate::error::{Error, Result};
use crate::info;
use crate::linalg::{self, CMatrix};
use crate::models;
use crate::states::{DensityMatrix, RegionPartition};

pub const QMC_TOL: f64 = 1e-8;
/// Width of the band between "passes" and "fails" for each criterion.
pub const HYSTERESIS: f64 = 10.0;
pub const REGULARIZATION_EPS: f64 = 1e-6;
pub const WITNESS_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct QMCReport {
    pub cmi: f64,
    pub petz_recovery_error: f64,
    pub is_qmc: bool,
    pub witness_unitary: Option<CMatrix>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Verdict {
    Pass,
    Fail,
    Band,
}

fn verdict(x: f64, tol: f64) -> Verdict {
    if x < tol {
        Verdict::Pass
    } else if x >= HYSTERESIS * tol {
        Verdict::Fail
    } else {
        Verdict::Band
    }
}

/// `‖P_{ρ_BC,Tr_C}(ρ_AB) − ρ_ABC‖₁`.
pub fn petz_recovery_error(rho: &DensityMatrix, part: &RegionPartition) -> Result<f64> {
    let b = part.buffer()?;
    let c = part.get("C")?;
    let map = channels::petz_map(rho, &b, c)?;
    channels::recovery_error(&map, rho, rho)
}

/// Checks `I(A:C|B) = 0` and exact Petz recovery. Both criteria must land on the
/// same side of `tol`, and neither may fall in `[tol, 10·tol)`.
pub fn certify_qmc(rho: &DensityMatrix, part: &RegionPartition, tol: f64) -> Result<QMCReport> {
    let cmi = info::cmi_of_partition(rho, part)?;
    let err = petz_recovery_error(rho, part)?;
    let is_qmc = match (verdict(cmi, tol), verdict(err, tol)) {
        (Verdict::Pass, Verdict::Pass) => true,
        (Verdict::Fail, Verdict::Fail) => false,
        _ => return Err(Error::Inconclusive { cmi, recovery: err }),
    };
    Ok(QMCReport {
        cmi,
        petz_recovery_error: err,
        is_qmc,
        witness_unitary: None,
    })
}

/// `(Σ_k p_k I(A:C|B)_{σ_k}, I(A:C|B)_ρ)` for an instrument acting on A.
pub fn measurement_average_cmi(
    rho: &DensityMatrix,
    inst: &KrausInstrument,
    part: &RegionPartition,
) -> Result<(f64, f64)> {
    if !inst.support().is_subset(part.get("A")?) {
        return Err(Error::SupportMismatch("instrument must act inside A".into()));
    }
    let rhs = info::cmi_of_partition(rho, part)?;
    let ens = channels::apply_instrument(rho, inst)?;
    let mut lhs = 0.0;
    for t in &ens.outcomes {
        lhs += t.probability * info::cmi_of_partition(&t.state, part)?;
    }
    Ok((lhs, rhs))
}

#[derive(Clone, Debug)]
pub struct WitnessSearch {
    /// First sampled unitary on A whose defect exceeds the threshold.
    pub witness: Option<CMatrix>,
    pub sample_index: Option<usize>,
    /// Defect of the witness on the state as given (before regularization).
    pub raw_defect: Option<f64>,
    /// Largest defect seen on the (possibly regularized) state.
    pub max_defect: f64,
    /// Mixing weight used to make the state full rank; zero if it already was.
    pub eps: f64,
    pub samples: usize,
}

/// Mixes in `ε·1/d` when `rho` is rank deficient. Returns the state and the ε used.
pub fn regularize_full_rank(rho: &DensityMatrix) -> Result<(DensityMatrix, f64)> {
    let sp = linalg::psd_eig(rho.matrix())?;
    if sp.rank() == sp.dim() {
        return Ok((rho.clone(), 0.0));
    }
    let mixed = DensityMatrix::maximally_mixed(rho.register().clone());
    Ok((rho.mix(&mixed, REGULARIZATION_EPS)?, REGULARIZATION_EPS))
}

/// Samples Haar unitaries `U_A` and returns the first with
/// `|C_{p,q}(U, ρ_AB) − C_{p,q}(U, ρ_ABC)| > 1e−6`.
pub fn local_computability_witness_search(
    rho: &DensityMatrix,
    part: &RegionPartition,
    params: CorrelatorParams,
    n_samples: usize,
    seed: u64,
) -> Result<WitnessSearch> {
    if (params.p * params.q - 1.0).abs() < 1e-15 {
        return Err(Error::ParamsOutOfRange("p·q = 1 is excluded".into()));
    }
    CorrelatorParams::new(params.p, params.q)?;
    let (reg_rho, eps) = regularize_full_rank(rho)?;
    let d_a = rho.register().dim_of(part.get("A")?.sites());
    let defects: Vec<(f64, CMatrix)> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut r = models::rng(models::sub_seed(seed, i as u64));
            let u = models::random_unitary(&mut r, d_a);
            let d = correlators::local_computability_defect(&reg_rho, &u, part, params).map(f64::abs);
            d.map(|d| (d, u))
        })
        .collect::<Result<_>>()?;
    let max_defect = defects.iter().map(|d| d.0).fold(0.0, f64::max);
    let hit = defects.iter().position(|d| d.0 > WITNESS_THRESHOLD);
    let (witness, raw_defect) = match hit {
        Some(i) => {
            let u = defects[i].1.clone();
            let raw = correlators::local_computability_defect(rho, &u, part, params)?.abs();
            (Some(u), Some(raw))
        }
        None => (None, None),
    };
    Ok(WitnessSearch {
        witness,
        sample_index: hit,
        raw_defect,
        max_defect,
        eps,
        samples: n_samples,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RotatedPetzScan {
    pub best_t: f64,
    pub best_fidelity: f64,
    pub best_bures: f64,
    pub cmi: f64,
}

/// Best fidelity `F(ρ_ABC, R_t(ρ_AB))` over a grid of rotation parameters.
pub fn rotated_petz_scan(rho: &DensityMatrix, part: &RegionPartition, ts: &[f64]) -> Result<RotatedPetzScan> {
    let b = part.buffer()?;
    let c = part.get("C")?;
    let mut best = (0.0, -1.0);
    for &t in ts {
        let map = channels::rotated_petz_map(rho, &b, c, t)?;
        let f = map.apply_state(rho).fidelity(rho)?;
        if f > best.1 {
            best = (t, f);
        }
    }
    Ok(RotatedPetzScan {
        best_t: best.0,
        best_fidelity: best.1,
        best_bures: (2.0 * (1.0 - best.1.min(1.0))).sqrt(),
        cmi: info::cmi_of_partition(rho, part)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::Register;

    #[test]
    fn product_state_is_qmc() {
        let mut r = models::rng(1);
        let reg = Register::qubits(3);
        let parts: Vec<_> = (0..3)
            .map(|_| models::random_state(&mut r, &Register::qubits(1), None))
            .collect();
        let rho = parts[0].tensor(&parts[1]).unwrap().tensor(&parts[2]).unwrap();
        let part = RegionPartition::abc(&reg, &[0], &[1], &[2]).unwrap();
        let rep = certify_qmc(&rho, &part, QMC_TOL).unwrap();
        assert!(rep.is_qmc);
    }

    #[test]
    fn hysteresis_band() {
        assert_eq!(verdict(5e-8, 1e-8), Verdict::Band);
        assert_eq!(verdict(1e-7, 1e-8), Verdict::Fail);
        assert_eq!(verdict(1e-9, 1e-8), Verdict::Pass);
    }

    #[test]
    fn fidelity_point_excluded() {
        let fx = models::counterexample("E4", 4).unwrap();
        let p = CorrelatorParams { p: 1.0, q: 1.0 };
        assert!(local_computability_witness_search(&fx.state, &fx.partition, p, 1, 0).is_err());
    }
}
