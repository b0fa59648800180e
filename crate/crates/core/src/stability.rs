//! Trajectory recovery scores, correlation/CMI decay profiles, local implementation
//! of postselection, and recovery dressed by locally reversible circuits.

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{self, ChannelMap, KrausInstrument};
use crate::correlators;
use crate::error::{Error, Result};
use crate::fit::{self, LinearFit};
use crate::info;
use crate::states::{DensityMatrix, Region, RegionPartition, Register};

pub const FIT_FLOOR: f64 = 1e-12;
pub const MIN_FIT_POINTS: usize = 3;
/// Fitted slopes of `ln(value)` above this are treated as non-decaying.
pub const NO_DECAY_SLOPE: f64 = -1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitFlag {
    Converged,
    Floor,
    NoDecay,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SrcSample {
    pub r: usize,
    pub correlation: f64,
    pub cmi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub flag: FitFlag,
    /// Decay length `−1/slope`, present only for converged fits.
    pub length: Option<f64>,
    /// `exp(intercept)`.
    pub prefactor: Option<f64>,
    pub fit: Option<LinearFit>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SRCProfile {
    pub samples: Vec<SrcSample>,
    pub correlation: DecayFit,
    pub cmi: DecayFit,
}

impl SRCProfile {
    pub fn eta(&self) -> Option<f64> {
        self.correlation.length
    }

    pub fn zeta(&self) -> Option<f64> {
        self.cmi.length
    }
}

/// Separation scan around a fixed region `A`.
///
/// For separation `r`, `C` is every site at distance `≥ r` from `A` and `B` the
/// sites strictly in between.
#[derive(Clone, Debug)]
pub struct SrcGeometry {
    pub a: Region,
    pub separations: Vec<usize>,
    pub restarts: usize,
    pub seed: u64,
}

/// `(A, B, C)` for separation `r`, or `None` when `C` is empty.
pub fn separation_partition(reg: &Register, a: &Region, r: usize) -> Result<Option<RegionPartition>> {
    let rest = a.complement(reg);
    let mut b = Vec::new();
    let mut c = Vec::new();
    for &s in rest.sites() {
        let d = reg.distance(a, &Region::from_positions(&[s]));
        if d >= r as i64 {
            c.push(s);
        } else {
            b.push(s);
        }
    }
    if c.is_empty() {
        return Ok(None);
    }
    RegionPartition::abc(reg, a.sites(), &b, &c).map(Some)
}

pub fn decay_fit(rs: &[f64], values: &[f64]) -> DecayFit {
    match fit::log_linear_fit(rs, values, FIT_FLOOR, MIN_FIT_POINTS) {
        Err(_) => DecayFit {
            flag: FitFlag::Floor,
            length: None,
            prefactor: None,
            fit: None,
        },
        Ok((f, _)) if f.slope > NO_DECAY_SLOPE => DecayFit {
            flag: FitFlag::NoDecay,
            length: None,
            prefactor: Some(f.intercept.exp()),
            fit: Some(f),
        },
        Ok((f, _)) => DecayFit {
            flag: FitFlag::Converged,
            length: Some(-1.0 / f.slope),
            prefactor: Some(f.intercept.exp()),
            fit: Some(f),
        },
    }
}

/// Records `operator_correlation(A, C)` and `I(A:C|B)` for each separation and fits
/// their decay lengths `η` and `ζ`.
pub fn src_profile(rho: &DensityMatrix, geom: &SrcGeometry) -> Result<SRCProfile> {
    let reg = rho.register();
    let mut seps = geom.separations.clone();
    seps.sort_unstable();
    seps.dedup();
    let parts: Vec<(usize, RegionPartition)> = seps
        .iter()
        .filter_map(|&r| separation_partition(reg, &geom.a, r).transpose().map(|p| p.map(|p| (r, p))))
        .collect::<Result<_>>()?;
    if parts.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewSamples(parts.len()));
    }
    let samples: Vec<SrcSample> = parts
        .par_iter()
        .map(|(r, p)| {
            let c = p.get("C")?;
            let corr = correlators::operator_correlation(rho, &geom.a, c, geom.restarts, geom.seed)?;
            Ok(SrcSample {
                r: *r,
                correlation: corr.value,
                cmi: info::cmi_of_partition(rho, p)?.max(0.0),
            })
        })
        .collect::<Result<_>>()?;
    let rs: Vec<f64> = samples.iter().map(|s| s.r as f64).collect();
    let corr: Vec<f64> = samples.iter().map(|s| s.correlation).collect();
    let cmi: Vec<f64> = samples.iter().map(|s| s.cmi).collect();
    Ok(SRCProfile {
        correlation: decay_fit(&rs, &corr),
        cmi: decay_fit(&rs, &cmi),
        samples,
    })
}

/// `r₁ = ⌈η r / (η + 2ζ)⌉`, or `⌈r/2⌉` without fitted lengths.
pub fn default_split(r: usize, eta: Option<f64>, zeta: Option<f64>) -> (usize, usize) {
    let r1 = match (eta, zeta) {
        (Some(e), Some(z)) if e > 0.0 && z > 0.0 => (e * r as f64 / (e + 2.0 * z)).ceil() as usize,
        _ => r.div_ceil(2),
    };
    let r1 = r1.min(r);
    (r1, r - r1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub a: Vec<usize>,
    pub r: usize,
    pub r1: usize,
    pub r2: usize,
    /// `Σ_k p_k ‖R(σ_k) − ρ‖₁`.
    pub trajectory_error: f64,
    /// `‖R(Φ(ρ)) − ρ‖₁`.
    pub channel_error: f64,
    pub outcome_errors: Vec<(usize, f64, f64)>,
    /// Decay length fitted over a radius scan, when one was run.
    pub xi: Option<f64>,
}

fn check_instrument(inst: &KrausInstrument, part: &RegionPartition) -> Result<()> {
    if !inst.support().is_subset(part.get("A")?) {
        return Err(Error::PartitionInvalid("instrument must act inside A".into()));
    }
    part.get("B1")?;
    part.get("B2")?;
    Ok(())
}

fn score_with(
    map: &ChannelMap,
    rho: &DensityMatrix,
    target: &DensityMatrix,
    inst: &KrausInstrument,
    part: &RegionPartition,
) -> Result<StabilityReport> {
    let ens = channels::apply_instrument(rho, inst)?;
    let mut traj = 0.0;
    let mut outcome_errors = Vec::with_capacity(ens.outcomes.len());
    for t in &ens.outcomes {
        let e = map.apply_state(&t.state).trace_distance(target)?;
        traj += t.probability * e;
        outcome_errors.push((t.outcome, t.probability, e));
    }
    let avg = DensityMatrix::from_unnormalized(rho.register().clone(), ens.average())?;
    let chan = map.apply_state(&avg).trace_distance(target)?;
    let r1 = part.get("B1")?.len();
    let r2 = part.get("B2")?.len();
    Ok(StabilityReport {
        a: part.get("A")?.sites().to_vec(),
        r: r1 + r2,
        r1,
        r2,
        trajectory_error: traj,
        channel_error: chan,
        outcome_errors,
        xi: None,
    })
}

/// Scores recovery of every instrument trajectory by `stitch_then_recover`.
pub fn stability_score(rho: &DensityMatrix, inst: &KrausInstrument, part: &RegionPartition) -> Result<StabilityReport> {
    check_instrument(inst, part)?;
    let map = channels::stitch_then_recover(rho, part)?;
    score_with(&map, rho, rho, inst, part)
}

/// `A = [0, a_len)` at the left end of a chain, then `B₁`, `B₂` and `C = rest`.
pub fn chain_abbc(reg: &Register, a_len: usize, r1: usize, r2: usize) -> Result<RegionPartition> {
    let n = reg.n_sites();
    if a_len + r1 + r2 >= n {
        return Err(Error::PartitionInvalid(format!("{a_len}+{r1}+{r2} sites leave no C in a chain of {n}")));
    }
    let a: Vec<usize> = (0..a_len).collect();
    let b1: Vec<usize> = (a_len..a_len + r1).collect();
    let b2: Vec<usize> = (a_len + r1..a_len + r1 + r2).collect();
    let c: Vec<usize> = (a_len + r1 + r2..n).collect();
    RegionPartition::abbc(reg, &a, &b1, &b2, &c)
}

/// Scores buffer radii `1..=r_max` on a chain with the given split rule, and fits `ξ`
/// from the trajectory errors.
pub fn stability_scan(
    rho: &DensityMatrix,
    inst: &KrausInstrument,
    a_len: usize,
    radii: &[usize],
    split: impl Fn(usize) -> (usize, usize) + Sync,
) -> Result<Vec<StabilityReport>> {
    let reg = rho.register();
    let mut reports: Vec<StabilityReport> = radii
        .par_iter()
        .map(|&r| {
            let (r1, r2) = split(r);
            let part = chain_abbc(reg, a_len, r1, r2)?;
            stability_score(rho, inst, &part)
        })
        .collect::<Result<_>>()?;
    let rs: Vec<f64> = reports.iter().map(|x| x.r as f64).collect();
    let es: Vec<f64> = reports.iter().map(|x| x.trajectory_error).collect();
    let xi = decay_fit(&rs, &es).length;
    for rep in reports.iter_mut() {
        rep.xi = xi;
    }
    Ok(reports)
}

#[derive(Clone, Debug)]
pub struct PostselectionReport {
    /// `Φ_k = R_k ∘ Tr_{AB₁}` per retained outcome.
    pub channels: Vec<ChannelMap>,
    /// `(outcome, p_k, ‖Φ_k(ρ) − σ_k‖₁)`.
    pub outcome_errors: Vec<(usize, f64, f64)>,
    pub average_error: f64,
}

/// Implements each postselected branch by a channel that discards `AB₁` and
/// Petz-recovers `σ_k` from `B₂`.
pub fn implement_postselection(
    rho: &DensityMatrix,
    inst: &KrausInstrument,
    part: &RegionPartition,
) -> Result<PostselectionReport> {
    check_instrument(inst, part)?;
    let ens = channels::apply_instrument(rho, inst)?;
    let mut chans = Vec::new();
    let mut errs = Vec::new();
    let mut avg = 0.0;
    for t in &ens.outcomes {
        let phi = channels::stitch_then_recover(&t.state, part)?;
        let e = phi.apply_state(rho).trace_distance(&t.state)?;
        avg += t.probability * e;
        errs.push((t.outcome, t.probability, e));
        chans.push(phi);
    }
    Ok(PostselectionReport {
        channels: chans,
        outcome_errors: errs,
        average_error: avg,
    })
}

/// `‖Φ(ρ) − σ‖₁` for an explicit candidate channel and the normalized branch `σ`
/// of a single Kraus operator.
pub fn postselection_error_with(rho: &DensityMatrix, inst: &KrausInstrument, k: usize, phi: &ChannelMap) -> Result<f64> {
    let ens = channels::apply_instrument(rho, inst)?;
    let t = ens
        .outcomes
        .iter()
        .find(|t| t.outcome == k)
        .ok_or_else(|| Error::SupportMismatch(format!("outcome {k} has zero probability")))?;
    phi.apply_state(rho).trace_distance(&t.state)
}

/// Forward layers `F_t` and reverse layers `D_t`; gate `ℓ` of `D_t` undoes gate `ℓ`
/// of `F_t` and has the same support.
#[derive(Clone, Debug)]
pub struct CircuitPair {
    pub forward: Vec<Vec<ChannelMap>>,
    pub reverse: Vec<Vec<ChannelMap>>,
}

pub const REVERSIBILITY_TOL: f64 = 1e-8;
pub const MAX_DRESSING_DEPTH: usize = 2;
pub const MAX_DRESSING_SITES: usize = 8;

impl CircuitPair {
    pub fn depth(&self) -> usize {
        self.forward.len()
    }

    pub fn identity(depth: usize) -> CircuitPair {
        CircuitPair {
            forward: vec![Vec::new(); depth],
            reverse: vec![Vec::new(); depth],
        }
    }

    /// `F(ρ)`.
    pub fn apply_forward(&self, rho: &DensityMatrix) -> DensityMatrix {
        self.forward
            .iter()
            .flatten()
            .fold(rho.clone(), |acc, g| g.apply_state(&acc))
    }

    /// Worst `‖(D_{k,ℓ} ∘ F_{k,ℓ})(ρ_{k−1}) − ρ_{k−1}‖₁` with `ρ_{k−1} = F_{k−1}⋯F_1(ρ)`.
    pub fn reversibility_residual(&self, rho: &DensityMatrix) -> Result<f64> {
        if self.forward.len() != self.reverse.len() {
            return Err(Error::NotLocallyReversible(f64::INFINITY));
        }
        let mut cur = rho.clone();
        let mut worst: f64 = 0.0;
        for (fl, dl) in self.forward.iter().zip(&self.reverse) {
            if fl.len() != dl.len() {
                return Err(Error::NotLocallyReversible(f64::INFINITY));
            }
            for (f, d) in fl.iter().zip(dl) {
                if f.support() != d.support() {
                    return Err(Error::NotLocallyReversible(f64::INFINITY));
                }
                let back = d.apply_state(&f.apply_state(&cur));
                worst = worst.max(back.trace_distance(&cur)?);
            }
            cur = fl.iter().fold(cur, |acc, g| g.apply_state(&acc));
        }
        Ok(worst)
    }

    /// Gates `(t, ℓ)` in the light cone grown layer by layer from `seed`.
    pub fn light_cone(&self, seed: &Region) -> Vec<(usize, usize)> {
        let mut region = seed.clone();
        let mut gates = Vec::new();
        for (t, layer) in self.forward.iter().enumerate() {
            let hits: Vec<usize> = (0..layer.len())
                .filter(|&l| !layer[l].support().is_disjoint(&region))
                .collect();
            for &l in &hits {
                region = region.union(&layer[l].support());
                gates.push((t, l));
            }
        }
        gates
    }
}

/// `R′ = F_{R↑} ∘ R ∘ D_{R↓}` with `R` the stitch-then-recover map of `ρ`.
pub fn dressed_map(rho: &DensityMatrix, circuit: &CircuitPair, part: &RegionPartition) -> Result<ChannelMap> {
    let base = channels::stitch_then_recover(rho, part)?;
    let cone = circuit.light_cone(&base.support());
    let mut seq = Vec::new();
    for &(t, l) in cone.iter().rev() {
        seq.push(circuit.reverse[t][l].clone());
    }
    seq.push(base);
    for &(t, l) in &cone {
        seq.push(circuit.forward[t][l].clone());
    }
    Ok(ChannelMap::Sequence(seq))
}

/// Stability report for `ρ′ = F(ρ)` using the recovery of `ρ` dressed by the circuit.
pub fn dressed_recovery(
    rho: &DensityMatrix,
    circuit: &CircuitPair,
    inst: &KrausInstrument,
    part: &RegionPartition,
) -> Result<StabilityReport> {
    if circuit.depth() > MAX_DRESSING_DEPTH {
        return Err(Error::ParamsOutOfRange(format!("circuit depth {}", circuit.depth())));
    }
    if rho.register().n_sites() > MAX_DRESSING_SITES {
        return Err(Error::DimensionCap {
            dim: rho.register().n_sites(),
            cap: MAX_DRESSING_SITES,
        });
    }
    check_instrument(inst, part)?;
    let res = circuit.reversibility_residual(rho)?;
    if res > REVERSIBILITY_TOL {
        return Err(Error::NotLocallyReversible(res));
    }
    let rho_p = circuit.apply_forward(rho);
    let map = dressed_map(rho, circuit, part)?;
    score_with(&map, &rho_p, &rho_p, inst, part)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::models;

    #[test]
    fn split_rules() {
        assert_eq!(default_split(5, None, None), (3, 2));
        assert_eq!(default_split(4, Some(1.0), Some(0.5)), (2, 2));
    }

    #[test]
    fn product_state_is_recoverable() {
        let mut r = models::rng(3);
        let one = Register::qubits(1);
        let mut rho = models::random_state(&mut r, &one, None);
        for _ in 0..4 {
            rho = rho.tensor(&models::random_state(&mut r, &one, None)).unwrap();
        }
        let reg = rho.register().clone();
        let part = chain_abbc(&reg, 1, 1, 1).unwrap();
        let inst = models::random_instrument(&mut r, &reg, Region::new(&reg, &[0]).unwrap(), 3);
        let rep = stability_score(&rho, &inst, &part).unwrap();
        assert!(rep.trajectory_error < 1e-8, "{}", rep.trajectory_error);
        assert!(rep.channel_error <= rep.trajectory_error + 1e-9);
    }

    #[test]
    fn separation_partition_on_chain() {
        let reg = Register::qubits(5);
        let a = Region::new(&reg, &[0]).unwrap();
        let p = separation_partition(&reg, &a, 2).unwrap().unwrap();
        assert_eq!(p.get("B").unwrap().sites(), &[1]);
        assert_eq!(p.get("C").unwrap().sites(), &[2, 3, 4]);
        assert!(separation_partition(&reg, &a, 5).unwrap().is_none());
    }

    #[test]
    fn identity_circuit_is_reversible() {
        let rho = models::ghz(3);
        let c = CircuitPair::identity(1);
        assert_eq!(c.reversibility_residual(&rho).unwrap(), 0.0);
        let x = ChannelMap::kraus(Region::new(rho.register(), &[0]).unwrap(), vec![linalg::pauli('X')]);
        let bad = CircuitPair {
            forward: vec![vec![x]],
            reverse: vec![vec![ChannelMap::kraus(
                Region::new(rho.register(), &[0]).unwrap(),
                vec![linalg::identity(2)],
            )]],
        };
        assert!(bad.reversibility_residual(&rho).unwrap() > 0.1);
    }
}
