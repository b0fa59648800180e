//! Kraus instruments, channel maps and recovery channels.
//!
//! Every `ChannelMap` acts on operators of a full register. Sites outside its
//! support are left untouched. Superoperators use column-stacking
//! vectorization, `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::states::{DensityMatrix, Region, RegionPartition, Register, SiteLayout};

pub const COMPLETENESS_TOL: f64 = 1e-9;
pub const OUTCOME_DROP: f64 = 1e-12;
pub const CHOI_TOL: f64 = 1e-9;
/// Largest support dimension for which dense superoperators are formed.
pub const SUPEROP_DIM_CAP: usize = 64;

#[derive(Clone, Debug)]
pub struct KrausInstrument {
    support: Region,
    ops: Vec<CMatrix>,
    trace_preserving: bool,
}

impl KrausInstrument {
    pub fn new(reg: &Register, support: Region, ops: Vec<CMatrix>) -> Result<Self> {
        if let Some(&s) = support.sites().iter().find(|&&s| s >= reg.n_sites()) {
            return Err(Error::SupportMismatch(format!("site {s} outside register")));
        }
        let d = reg.dim_of(support.sites());
        if ops.is_empty() {
            return Err(Error::SupportMismatch("no Kraus operators".into()));
        }
        for k in &ops {
            if k.nrows() != d || k.ncols() != d {
                return Err(Error::SupportMismatch(format!(
                    "Kraus operator is {}x{}, support dimension is {d}",
                    k.nrows(),
                    k.ncols()
                )));
            }
        }
        let s = completeness(&ops);
        let top = linalg::eigenvalues_hermitian(&s)[0];
        if top > 1.0 + COMPLETENESS_TOL {
            return Err(Error::SupportMismatch(format!("Σ F†F has eigenvalue {top} > 1")));
        }
        let trace_preserving = linalg::frobenius(&(s - linalg::identity(d))) <= COMPLETENESS_TOL;
        Ok(KrausInstrument {
            support,
            ops,
            trace_preserving,
        })
    }

    pub fn support(&self) -> &Region {
        &self.support
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// Same Kraus operators viewed as a channel map.
    pub fn to_channel(&self) -> ChannelMap {
        ChannelMap::Kraus {
            support: self.support.clone(),
            ops: self.ops.clone(),
        }
    }

    /// Single-outcome sub-instrument for postselection on outcome `k`.
    pub fn outcome(&self, reg: &Register, k: usize) -> Result<KrausInstrument> {
        KrausInstrument::new(reg, self.support.clone(), vec![self.ops[k].clone()])
    }
}

pub fn completeness(ops: &[CMatrix]) -> CMatrix {
    let d = ops[0].ncols();
    ops.iter().fold(linalg::zeros(d, d), |acc, k| acc + k.adjoint() * k)
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub outcome: usize,
    pub probability: f64,
    pub state: DensityMatrix,
}

#[derive(Clone, Debug)]
pub struct TrajectoryEnsemble {
    pub outcomes: Vec<Trajectory>,
}

impl TrajectoryEnsemble {
    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|t| t.probability).sum()
    }

    /// `Σ p_k σ_k`.
    pub fn average(&self) -> CMatrix {
        let d = self.outcomes[0].state.dim();
        self.outcomes
            .iter()
            .fold(linalg::zeros(d, d), |acc, t| acc + t.state.matrix().scale(t.probability))
    }
}

/// Trajectories `σ_k = F_k ρ F_k† / p_k` on the full register.
pub fn apply_instrument(rho: &DensityMatrix, inst: &KrausInstrument) -> Result<TrajectoryEnsemble> {
    let reg = rho.register();
    if inst.support.sites().iter().any(|&s| s >= reg.n_sites()) {
        return Err(Error::SupportMismatch("instrument support outside register".into()));
    }
    let lay = SiteLayout::new(reg.site_dims(), inst.support.sites());
    if inst.ops[0].nrows() != lay.d_sub {
        return Err(Error::SupportMismatch("Kraus dimension does not match support".into()));
    }
    let mut outcomes = Vec::new();
    for (k, f) in inst.ops.iter().enumerate() {
        let s = lay.conjugate(f, rho.matrix());
        let p = linalg::trace(&s).re;
        if p < OUTCOME_DROP {
            continue;
        }
        outcomes.push(Trajectory {
            outcome: k,
            probability: p,
            state: DensityMatrix::trusted(reg.clone(), linalg::hermitian_part(&s).unscale(p)),
        });
    }
    if inst.trace_preserving {
        let tot: f64 = outcomes.iter().map(|t| t.probability).sum();
        for t in outcomes.iter_mut() {
            t.probability /= tot;
        }
    }
    if outcomes.is_empty() {
        return Err(Error::SupportMismatch("every outcome has zero probability".into()));
    }
    Ok(TrajectoryEnsemble { outcomes })
}

/// Completes a contraction `op` to the two-outcome instrument `{op, √(1 − op†op)}`.
/// Operators with norm above one are rescaled first; the scale is returned.
pub fn complete_to_channel(reg: &Register, support: Region, op: &CMatrix) -> Result<(KrausInstrument, f64)> {
    let norm = linalg::operator_norm(op);
    let scale = if norm > 1.0 { 1.0 / norm } else { 1.0 };
    let f = op.scale(scale);
    let d = f.nrows();
    let rest = linalg::identity(d) - f.adjoint() * &f;
    let g = linalg::matrix_power_on_support(&linalg::hermitian_part(&rest), 0.5)?;
    Ok((KrausInstrument::new(reg, support, vec![f, g])?, scale))
}

/// `X ↦ Outer (Inner Tr_D(X) Inner† ⊗ 1_D) Outer†` with `D ⊆ S`.
/// `inner` acts on `S \ D`, `outer` on `S`.
#[derive(Clone, Debug)]
pub struct Sandwich {
    pub support: Region,
    pub discard: Region,
    pub inner: CMatrix,
    pub outer: CMatrix,
}

#[derive(Clone, Debug)]
pub enum ChannelMap {
    Identity,
    Kraus { support: Region, ops: Vec<CMatrix> },
    Sandwich(Sandwich),
    /// Dense superoperator on the support (column stacking).
    Superop { support: Region, matrix: CMatrix },
    /// Applied first to last.
    Sequence(Vec<ChannelMap>),
}

impl ChannelMap {
    pub fn kraus(support: Region, ops: Vec<CMatrix>) -> ChannelMap {
        ChannelMap::Kraus { support, ops }
    }

    /// `Φ(X) = Tr_A(X) ⊗ 1_A / d_A`.
    pub fn depolarizing(reg: &Register, a: &Region) -> ChannelMap {
        let d = reg.dim_of(a.sites());
        ChannelMap::Sandwich(Sandwich {
            support: a.clone(),
            discard: a.clone(),
            inner: linalg::identity(1),
            outer: linalg::identity(d).unscale((d as f64).sqrt()),
        })
    }

    /// `X ↦ (1 − p) X + p Tr_A(X) ⊗ 1_A / d_A`.
    pub fn partial_depolarizing(reg: &Register, a: &Region, p: f64) -> Result<ChannelMap> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ParamsOutOfRange(format!("depolarizing rate {p}")));
        }
        let d = reg.dim_of(a.sites());
        let mut ops = vec![linalg::identity(d).scale((1.0 - p).sqrt())];
        for x in 0..d {
            for z in 0..d {
                ops.push(linalg::weyl(d, x, z).scale(p.sqrt() / d as f64));
            }
        }
        Ok(ChannelMap::Kraus {
            support: a.clone(),
            ops,
        })
    }

    /// `self ∘ first`.
    pub fn after(self, first: ChannelMap) -> ChannelMap {
        compose(&self, &first)
    }

    pub fn support(&self) -> Region {
        match self {
            ChannelMap::Identity => Region::empty(),
            ChannelMap::Kraus { support, .. } => support.clone(),
            ChannelMap::Sandwich(s) => s.support.clone(),
            ChannelMap::Superop { support, .. } => support.clone(),
            ChannelMap::Sequence(v) => v.iter().fold(Region::empty(), |acc, m| acc.union(&m.support())),
        }
    }

    /// Applies the map to an operator on the full register.
    pub fn apply(&self, reg: &Register, x: &CMatrix) -> CMatrix {
        let dims = reg.site_dims();
        match self {
            ChannelMap::Identity => x.clone(),
            ChannelMap::Kraus { support, ops } => {
                let lay = SiteLayout::new(dims, support.sites());
                ops.iter()
                    .fold(linalg::zeros(x.nrows(), x.ncols()), |acc, k| acc + lay.conjugate(k, x))
            }
            ChannelMap::Sandwich(s) => apply_sandwich(s, reg, x),
            ChannelMap::Superop { support, matrix } => apply_superop(matrix, dims, support.sites(), x),
            ChannelMap::Sequence(v) => v.iter().fold(x.clone(), |acc, m| m.apply(reg, &acc)),
        }
    }

    /// Applies the map to a state. The output is not renormalized.
    pub fn apply_state(&self, rho: &DensityMatrix) -> DensityMatrix {
        let out = self.apply(rho.register(), rho.matrix());
        DensityMatrix::trusted(rho.register().clone(), linalg::hermitian_part(&out))
    }

    /// Same map with site `i` renamed to `map[i]`.
    fn relabel(&self, map: &dyn Fn(usize) -> usize) -> ChannelMap {
        let rl = |r: &Region| {
            let mut v: Vec<usize> = r.sites().iter().map(|&s| map(s)).collect();
            v.sort_unstable();
            Region::from_sorted(v)
        };
        match self {
            ChannelMap::Identity => ChannelMap::Identity,
            ChannelMap::Kraus { support, ops } => ChannelMap::Kraus {
                support: rl(support),
                ops: ops.clone(),
            },
            ChannelMap::Sandwich(s) => ChannelMap::Sandwich(Sandwich {
                support: rl(&s.support),
                discard: rl(&s.discard),
                inner: s.inner.clone(),
                outer: s.outer.clone(),
            }),
            ChannelMap::Superop { support, matrix } => ChannelMap::Superop {
                support: rl(support),
                matrix: matrix.clone(),
            },
            ChannelMap::Sequence(v) => ChannelMap::Sequence(v.iter().map(|m| m.relabel(map)).collect()),
        }
    }

    /// Dense superoperator restricted to `support()`, with the support sub-register.
    pub fn support_superop(&self, reg: &Register) -> Result<(Region, CMatrix)> {
        let sup = self.support();
        let sub = reg.sub(&sup);
        let d = sub.dim();
        if d > SUPEROP_DIM_CAP {
            return Err(Error::DimensionCap {
                dim: d,
                cap: SUPEROP_DIM_CAP,
            });
        }
        let local = self.relabel(&|s| sup.sites().binary_search(&s).expect("site in support"));
        let mut m = linalg::zeros(d * d, d * d);
        for j in 0..d {
            for i in 0..d {
                let out = local.apply(&sub, &linalg::ket_bra(d, i, j));
                let col = j * d + i;
                for (r, z) in out.iter().enumerate() {
                    m[(r, col)] = *z;
                }
            }
        }
        Ok((sup, m))
    }

    /// Choi matrix `Σ |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)` on the support.
    pub fn choi(&self, reg: &Register) -> Result<CMatrix> {
        let sup = self.support();
        let sub = reg.sub(&sup);
        let d = sub.dim();
        if d > SUPEROP_DIM_CAP {
            return Err(Error::DimensionCap {
                dim: d,
                cap: SUPEROP_DIM_CAP,
            });
        }
        let local = self.relabel(&|s| sup.sites().binary_search(&s).expect("site in support"));
        let mut j = linalg::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                let out = local.apply(&sub, &linalg::ket_bra(d, a, b));
                for r in 0..d {
                    for c in 0..d {
                        j[(a * d + r, b * d + c)] = out[(r, c)];
                    }
                }
            }
        }
        Ok(j)
    }

    pub fn choi_min_eigenvalue(&self, reg: &Register) -> Result<f64> {
        let j = self.choi(reg)?;
        Ok(linalg::eigenvalues_hermitian(&j).last().copied().unwrap_or(0.0))
    }

    /// `‖Φ†(1) − 1‖₂` on the support.
    pub fn trace_preservation_residual(&self, reg: &Register) -> Result<f64> {
        let (_, m) = self.support_superop(reg)?;
        let d = (m.nrows() as f64).sqrt().round() as usize;
        let id = linalg::vec_col(&linalg::identity(d));
        let dual = m.adjoint() * id.clone();
        Ok((dual - id).norm())
    }

    /// Kraus operators on the support.
    pub fn kraus_ops(&self, reg: &Register) -> Result<(Region, Vec<CMatrix>)> {
        match self {
            ChannelMap::Kraus { support, ops } => Ok((support.clone(), ops.clone())),
            ChannelMap::Sandwich(s) => Ok((s.support.clone(), sandwich_kraus(s, reg))),
            _ => {
                let sup = self.support();
                let d = reg.dim_of(sup.sites());
                let j = self.choi(reg)?;
                let sp = linalg::hermitian_eig(&j)?;
                let mut ops = Vec::new();
                for (k, &l) in sp.values.iter().enumerate() {
                    if l <= CHOI_TOL {
                        continue;
                    }
                    let v = sp.vectors.column(k);
                    // Choi vector |v⟩ = Σ |a⟩ ⊗ K|a⟩ up to normalization.
                    let kop = CMatrix::from_fn(d, d, |r, a| v[a * d + r] * l.sqrt());
                    ops.push(kop);
                }
                Ok((sup, ops))
            }
        }
    }

    pub fn to_json(&self, reg: &Register) -> Result<String> {
        let (support, ops) = self.kraus_ops(reg)?;
        let rec = ChannelRecord {
            support: support.sites().to_vec(),
            dims: support.sites().iter().map(|&s| reg.site_dims()[s]).collect(),
            kraus: ops
                .iter()
                .map(|k| {
                    let mut v = Vec::with_capacity(k.len());
                    for i in 0..k.nrows() {
                        for j in 0..k.ncols() {
                            v.push([k[(i, j)].re, k[(i, j)].im]);
                        }
                    }
                    v
                })
                .collect(),
        };
        serde_json::to_string(&rec).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(reg: &Register, s: &str) -> Result<ChannelMap> {
        let rec: ChannelRecord = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let support = reg.region(&rec.support)?;
        let d = reg.dim_of(support.sites());
        let mut ops = Vec::new();
        for k in rec.kraus {
            if k.len() != d * d {
                return Err(Error::Parse("Kraus operator has wrong size".into()));
            }
            ops.push(CMatrix::from_row_iterator(d, d, k.iter().map(|p| C64::new(p[0], p[1]))));
        }
        Ok(ChannelMap::Kraus { support, ops })
    }
}

#[derive(Serialize, Deserialize)]
struct ChannelRecord {
    support: Vec<usize>,
    dims: Vec<usize>,
    kraus: Vec<Vec<[f64; 2]>>,
}

/// `outer ∘ inner`: applies `inner` first.
pub fn compose(outer: &ChannelMap, inner: &ChannelMap) -> ChannelMap {
    let mut v = Vec::new();
    for m in [inner, outer] {
        match m {
            ChannelMap::Sequence(s) => v.extend(s.iter().cloned()),
            ChannelMap::Identity => {}
            other => v.push(other.clone()),
        }
    }
    if v.is_empty() {
        ChannelMap::Identity
    } else {
        ChannelMap::Sequence(v)
    }
}

fn apply_sandwich(s: &Sandwich, reg: &Register, x: &CMatrix) -> CMatrix {
    let dims = reg.site_dims();
    let kept = reg.all().minus(&s.discard);
    let kept_lay = SiteLayout::new(dims, kept.sites());
    let mut y = if s.discard.is_empty() {
        x.clone()
    } else {
        kept_lay.trace_rest(x)
    };
    let inner_sites = s.support.minus(&s.discard);
    if !inner_sites.is_empty() {
        let kept_dims: Vec<usize> = kept.sites().iter().map(|&i| dims[i]).collect();
        let pos = inner_sites.positions_in(&kept);
        y = SiteLayout::new(&kept_dims, &pos).conjugate(&s.inner, &y);
    } else {
        y *= s.inner[(0, 0)] * s.inner[(0, 0)].conj();
    }
    let lifted = if s.discard.is_empty() { y } else { kept_lay.embed(&y) };
    if s.support.is_empty() {
        return lifted;
    }
    SiteLayout::new(dims, s.support.sites()).conjugate(&s.outer, &lifted)
}

fn sandwich_kraus(s: &Sandwich, reg: &Register) -> Vec<CMatrix> {
    let dims = reg.site_dims();
    let sdims: Vec<usize> = s.support.sites().iter().map(|&i| dims[i]).collect();
    let inner_sites = s.support.minus(&s.discard);
    let pos = inner_sites.positions_in(&s.support);
    let lay = SiteLayout::new(&sdims, &pos);
    let dd = lay.d_rest;
    let mut ops = Vec::with_capacity(dd * dd);
    for i in 0..dd {
        for j in 0..dd {
            let mut m = linalg::zeros(lay.d_sub * dd, lay.d_sub * dd);
            for a in 0..lay.d_sub {
                for b in 0..lay.d_sub {
                    m[(lay.idx(a, i), lay.idx(b, j))] = s.inner[(a, b)];
                }
            }
            ops.push(&s.outer * m);
        }
    }
    ops
}

fn apply_superop(m: &CMatrix, dims: &[usize], support: &[usize], x: &CMatrix) -> CMatrix {
    let lay = SiteLayout::new(dims, support);
    let ds = lay.d_sub;
    let mut out = linalg::zeros(x.nrows(), x.ncols());
    for r1 in 0..lay.d_rest {
        for r2 in 0..lay.d_rest {
            let block = CMatrix::from_fn(ds, ds, |a, b| x[(lay.idx(a, r1), lay.idx(b, r2))]);
            let nb = linalg::unvec_col(&(m * linalg::vec_col(&block)), ds);
            for a in 0..ds {
                for b in 0..ds {
                    out[(lay.idx(a, r1), lay.idx(b, r2))] = nb[(a, b)];
                }
            }
        }
    }
    out
}

/// Petz map of `ρ_BC` for `Tr_C`, returned as the full-register map `P ∘ Tr_C`:
/// `X ↦ ρ_BC^{1/2} (ρ_B^{-1/2} Tr_C(X) ρ_B^{-1/2} ⊗ 1_C) ρ_BC^{1/2}`.
pub fn petz_map(rho: &DensityMatrix, b: &Region, c: &Region) -> Result<ChannelMap> {
    rotated_petz_map(rho, b, c, 0.0)
}

/// `X ↦ ρ_BC^{-it} P(ρ_B^{it} X ρ_B^{-it}) ρ_BC^{it}`.
pub fn rotated_petz_map(rho: &DensityMatrix, b: &Region, c: &Region, t: f64) -> Result<ChannelMap> {
    if !b.is_disjoint(c) {
        return Err(Error::RegionsOverlap);
    }
    let bc = b.union(c);
    let rho_bc = rho.partial_trace(&bc)?;
    let outer = linalg::complex_power_on_support(rho_bc.matrix(), 0.5, -t)?;
    let inner = if b.is_empty() {
        linalg::identity(1)
    } else {
        let rho_b = rho.partial_trace(b)?;
        linalg::complex_power_on_support(rho_b.matrix(), -0.5, t)?
    };
    Ok(ChannelMap::Sandwich(Sandwich {
        support: bc,
        discard: c.clone(),
        inner,
        outer,
    }))
}

/// `R = P ∘ Tr_{AB₁}` with `P` the Petz map of `ρ_{AB₁B₂}` for `Tr_{AB₁}`.
pub fn stitch_then_recover(rho: &DensityMatrix, part: &RegionPartition) -> Result<ChannelMap> {
    stitch_then_recover_rotated(rho, part, 0.0)
}

pub fn stitch_then_recover_rotated(rho: &DensityMatrix, part: &RegionPartition, t: f64) -> Result<ChannelMap> {
    let a = part.get("A")?;
    let b1 = part.get("B1")?;
    let b2 = part.get("B2")?;
    if a.is_empty() {
        return Err(Error::PartitionInvalid("A is empty".into()));
    }
    rotated_petz_map(rho, b2, &a.union(b1), t)
}

/// Trace-distance error `‖R(ρ) − ρ_target‖₁`.
pub fn recovery_error(map: &ChannelMap, input: &DensityMatrix, target: &DensityMatrix) -> Result<f64> {
    map.apply_state(input).trace_distance(target)
}

pub fn identity_instrument(reg: &Register, support: Region) -> KrausInstrument {
    let d = reg.dim_of(support.sites());
    KrausInstrument::new(reg, support, vec![linalg::identity(d)]).expect("identity instrument")
}

/// Projective measurement in the computational basis of `support`.
pub fn computational_measurement(reg: &Register, support: Region) -> KrausInstrument {
    let d = reg.dim_of(support.sites());
    let ops = (0..d).map(|i| linalg::ket_bra(d, i, i)).collect();
    KrausInstrument::new(reg, support, ops).expect("projective measurement")
}

/// Projective measurement in the eigenbasis of a Hermitian single-support operator.
pub fn eigenbasis_measurement(reg: &Register, support: Region, obs: &CMatrix) -> Result<KrausInstrument> {
    let sp = linalg::hermitian_eig(obs)?;
    let ops = (0..sp.dim())
        .map(|k| {
            let v = sp.vectors.column(k).into_owned();
            linalg::projector(&v)
        })
        .collect();
    KrausInstrument::new(reg, support, ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    #[test]
    fn identity_instrument_single_outcome() {
        let reg = Register::qubits(2);
        let rho = DensityMatrix::maximally_mixed(reg.clone());
        let ens = apply_instrument(&rho, &identity_instrument(&reg, reg.region(&[0]).unwrap())).unwrap();
        assert_eq!(ens.outcomes.len(), 1);
        assert!((ens.outcomes[0].probability - 1.0).abs() < 1e-15);
    }

    #[test]
    fn depolarizing_replaces_support() {
        let reg = Register::qubits(2);
        let a = reg.region(&[1]).unwrap();
        let rho = DensityMatrix::basis(reg.clone(), 3);
        let out = ChannelMap::depolarizing(&reg, &a).apply_state(&rho);
        let expect = linalg::real_diag(&[0.0, 0.0, 0.5, 0.5]);
        assert!(max_abs_diff(out.matrix(), &expect) < 1e-15);
    }

    #[test]
    fn sandwich_kraus_matches_direct() {
        let reg = Register::chain(&[2, 3, 2]).unwrap();
        let d = reg.dim();
        let m = CMatrix::from_fn(d, d, |i, j| C64::new(((i * 7 + j * 3) % 5) as f64, ((i + j) % 3) as f64 - 1.0));
        let rho = DensityMatrix::from_unnormalized(reg.clone(), &m * m.adjoint()).unwrap();
        let p = petz_map(&rho, &reg.region(&[1]).unwrap(), &reg.region(&[0, 2]).unwrap()).unwrap();
        let (sup, ops) = p.kraus_ops(&reg).unwrap();
        let k = ChannelMap::kraus(sup, ops);
        let x = rho.matrix();
        assert!(max_abs_diff(&p.apply(&reg, x), &k.apply(&reg, x)) < 1e-12);
    }

    #[test]
    fn channel_json_round_trip() {
        let reg = Register::qubits(2);
        let a = reg.region(&[0]).unwrap();
        let ch = ChannelMap::partial_depolarizing(&reg, &a, 0.3).unwrap();
        let js = ch.to_json(&reg).unwrap();
        let back = ChannelMap::from_json(&reg, &js).unwrap();
        let rho = DensityMatrix::basis(reg.clone(), 1);
        assert!(max_abs_diff(&ch.apply(&reg, rho.matrix()), &back.apply(&reg, rho.matrix())) < 1e-15);
    }
}
