//! Canonical purification `|√ρ⟩`, mirror-block operators and the
//! thermofield-double checks built on them.
//!
//! Site `i` of the base register is paired with mirror site `i + n` of the doubled
//! register. Complex conjugation is taken in the computational basis.

use crate::error::{Error, Result};
use crate::info;
use crate::linalg::{self, cr, CMatrix, CVector};
use crate::models::StabilizerState;
use crate::states::{DensityMatrix, Region, RegionPartition, Register, SiteLayout};

pub const PURIFY_CAP: usize = 64;

#[derive(Clone, Debug)]
pub struct PurifiedState {
    base: Register,
    doubled: Register,
    psi: CVector,
}

impl PurifiedState {
    pub fn base(&self) -> &Register {
        &self.base
    }

    pub fn doubled(&self) -> &Register {
        &self.doubled
    }

    pub fn vector(&self) -> &CVector {
        &self.psi
    }

    pub fn mirror_of(&self, site: usize) -> usize {
        site + self.base.n_sites()
    }

    /// `R ∪ R̄`.
    pub fn paired(&self, r: &Region) -> Region {
        let mut s: Vec<usize> = r.sites().to_vec();
        s.extend(r.sites().iter().map(|&i| self.mirror_of(i)));
        Region::from_positions(&s)
    }

    /// `R̄` alone.
    pub fn mirror(&self, r: &Region) -> Region {
        let s: Vec<usize> = r.sites().iter().map(|&i| self.mirror_of(i)).collect();
        Region::from_positions(&s)
    }

    /// Reduced state on a region of the doubled register.
    pub fn marginal(&self, r: &Region) -> Result<DensityMatrix> {
        let n2 = self.doubled.n_sites();
        if r.sites().iter().any(|&s| s >= n2) {
            return Err(Error::BadRegion(format!("{:?}", r.sites())));
        }
        let lay = SiteLayout::new(self.doubled.site_dims(), r.sites());
        let m = linalg::hermitian_part(&lay.vector_marginal(&self.psi));
        DensityMatrix::new(self.doubled.sub(r), m)
    }

    /// `⟨√ρ| O_R ⊗ 1 |√ρ⟩` for `O` acting on region `r` of the doubled register.
    pub fn expectation(&self, op: &CMatrix, r: &Region) -> Result<linalg::C64> {
        let lay = SiteLayout::new(self.doubled.site_dims(), r.sites());
        if op.nrows() != lay.d_sub || op.ncols() != lay.d_sub {
            return Err(Error::SupportMismatch("operator does not match region".into()));
        }
        Ok(self.psi.dotc(&lay.apply_vec(op, &self.psi)))
    }

    /// The base region `R` when `block` is exactly `R ∪ R̄` for some base region `R`.
    pub fn paired_block(&self, block: &Region) -> Result<Region> {
        let n = self.base.n_sites();
        let base: Vec<usize> = block.sites().iter().copied().filter(|&s| s < n).collect();
        let r = Region::from_positions(&base);
        if self.paired(&r) != *block || r.is_empty() {
            return Err(Error::UnpairedBlock);
        }
        Ok(r)
    }
}

/// `|√ρ⟩ = (√ρ ⊗ 1) Σ_i |i, i⟩`, with amplitude `√ρ[i, k]` on `|i⟩|k̄⟩`.
pub fn canonical_purify(rho: &DensityMatrix) -> Result<PurifiedState> {
    let d = rho.dim();
    if d > PURIFY_CAP {
        return Err(Error::DimensionCap { dim: d, cap: PURIFY_CAP });
    }
    let base = rho.register().clone();
    let mut dims = base.site_dims().to_vec();
    dims.extend_from_slice(base.site_dims());
    let mut coords = base.coords().to_vec();
    coords.extend_from_slice(base.coords());
    let doubled = Register::new(dims, Some(coords), PURIFY_CAP * PURIFY_CAP)?;
    let s = linalg::matrix_power_on_support(rho.matrix(), 0.5)?;
    let psi = CVector::from_fn(d * d, |idx, _| s[(idx / d, idx % d)]);
    Ok(PurifiedState { base, doubled, psi })
}

/// Operator on `A ∪ Ā` with the decomposition `O = O⁽¹⁾ − O⁽²⁾ + iO⁽³⁾ − iO⁽⁴⁾`,
/// each part `Σ_i λ_i O_i ⊗ O_i*` with `λ_i ≥ 0`.
#[derive(Clone, Debug)]
pub struct MirrorOperator {
    pub op: CMatrix,
    pub d: usize,
    /// `(λ_i, O_i)` for each of the four parts.
    pub terms: [Vec<(f64, CMatrix)>; 4],
}

impl MirrorOperator {
    pub fn part(&self, k: usize) -> CMatrix {
        let dd = self.d * self.d;
        self.terms[k].iter().fold(linalg::zeros(dd, dd), |acc, (l, o)| {
            acc + linalg::kron(o, &o.map(|z| z.conj())).scale(*l)
        })
    }

    pub fn reconstruct(&self) -> CMatrix {
        let i = linalg::c(0.0, 1.0);
        self.part(0) - self.part(1) + self.part(2) * i - self.part(3) * i
    }

    pub fn reconstruction_error(&self) -> f64 {
        linalg::max_abs_diff(&self.reconstruct(), &self.op)
    }
}

/// Normalized Weyl basis `X^a Z^b / √d`.
pub fn weyl_basis(d: usize) -> Vec<CMatrix> {
    let s = 1.0 / (d as f64).sqrt();
    let mut v = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            v.push(linalg::weyl(d, a, b).scale(s));
        }
    }
    v
}

/// Decomposes an operator on `A ∪ Ā` (A factor first, each of dimension `d`).
pub fn choi_decompose(o: &CMatrix, d: usize) -> Result<MirrorOperator> {
    if o.nrows() != d * d || o.ncols() != d * d {
        return Err(Error::UnpairedBlock);
    }
    let basis = weyl_basis(d);
    let nb = basis.len();
    let conj: Vec<CMatrix> = basis.iter().map(|b| b.map(|z| z.conj())).collect();
    // c_ij = ⟨B_i ⊗ B_j*, O⟩ = Tr(B_i† ⊗ B_j^T · O) evaluated blockwise.
    let mut coef = linalg::zeros(nb, nb);
    for i in 0..nb {
        for j in 0..nb {
            coef[(i, j)] = linalg::hs_inner(&linalg::kron(&basis[i], &conj[j]), o);
        }
    }
    let h = (&coef + coef.adjoint()).scale(0.5);
    let k = (&coef - coef.adjoint()) * linalg::c(0.0, -0.5);
    let split = |m: &CMatrix| -> (Vec<(f64, CMatrix)>, Vec<(f64, CMatrix)>) {
        let sp = linalg::hermitian_eig(&linalg::hermitian_part(m)).expect("hermitian coefficient matrix");
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for (idx, &l) in sp.values.iter().enumerate() {
            if l.abs() < 1e-15 {
                continue;
            }
            let v = sp.vectors.column(idx);
            let oi = basis
                .iter()
                .zip(v.iter())
                .fold(linalg::zeros(d, d), |acc, (b, &c)| acc + b * c);
            if l > 0.0 {
                pos.push((l, oi));
            } else {
                neg.push((-l, oi));
            }
        }
        (pos, neg)
    };
    let (p1, p2) = split(&h);
    let (p3, p4) = split(&k);
    Ok(MirrorOperator {
        op: o.clone(),
        d,
        terms: [p1, p2, p3, p4],
    })
}

/// `‖ρ^{√ρ_ABC}_{AĀ} − ρ^{√ρ_AB}_{AĀ}‖_p` for `p = 1` or `2`.
pub fn tfd_marginal_difference(rho: &DensityMatrix, part: &RegionPartition, p: f64) -> Result<f64> {
    let a = part.get("A")?;
    let ab = a.union(&part.buffer()?);
    let full = canonical_purify(rho)?;
    let m1 = full.marginal(&full.paired(a))?;
    let rho_ab = rho.partial_trace(&ab)?;
    let small = canonical_purify(&rho_ab)?;
    let a_in = Region::from_positions(&a.positions_in(&ab));
    let m2 = small.marginal(&small.paired(&a_in))?;
    let diff = m1.matrix() - m2.matrix();
    if p == 1.0 {
        Ok(linalg::trace_norm_hermitian(&diff))
    } else {
        linalg::schatten_norm(&diff, p)
    }
}

/// 2-norm difference of the `AĀ` marginals of `|√ρ_ABC⟩` and `|√ρ_AB⟩`.
pub fn tfd_local_computability_defect(rho: &DensityMatrix, part: &RegionPartition) -> Result<f64> {
    tfd_marginal_difference(rho, part, 2.0)
}

/// `|⟨O₁O₂⟩ − ⟨O₁⟩⟨O₂⟩|` on `|√ρ⟩`, with `O_i` on `A_i ∪ Ā_i` (A factor first).
pub fn tfd_connected_correlator(
    rho: &DensityMatrix,
    o1: &CMatrix,
    a1: &Region,
    o2: &CMatrix,
    a2: &Region,
) -> Result<f64> {
    if !a1.is_disjoint(a2) {
        return Err(Error::RegionsOverlap);
    }
    let ps = canonical_purify(rho)?;
    let b1 = ps.paired(a1);
    let b2 = ps.paired(a2);
    let dims = ps.doubled().site_dims().to_vec();
    let l1 = SiteLayout::new(&dims, b1.sites());
    let l2 = SiteLayout::new(&dims, b2.sites());
    if o1.nrows() != l1.d_sub || o2.nrows() != l2.d_sub {
        return Err(Error::UnpairedBlock);
    }
    let psi = ps.vector();
    let v1 = l1.apply_vec(&o1.adjoint(), psi);
    let v2 = l2.apply_vec(o2, psi);
    let joint = v1.dotc(&v2);
    let e1 = psi.dotc(&l1.apply_vec(o1, psi));
    let e2 = psi.dotc(&v2);
    Ok((joint - e1 * e2).norm())
}

/// Both sides of the stabilizer identities on `|√ρ⟩`.
///
/// Two-part partitions `{A, B}` give `(I(A:B)_ρ, S(AĀ))`; three-part partitions
/// `{A, B, C}` give `(I(A:C) + I(A:C|B), I(AĀ:CC̄))`.
pub fn stabilizer_tfd_identity(stab: &StabilizerState, part: &RegionPartition) -> Result<(f64, f64)> {
    let rho = stab.state();
    let ps = canonical_purify(rho)?;
    let a = part.get("A")?;
    let pure = |r: &Region| -> Result<f64> { info::entropy_of(&ps_state(&ps)?, r) };
    match part.parts().len() {
        2 => {
            let b = part.get("B")?;
            let lhs = info::mutual_information(rho, a, b)?;
            let rhs = pure(&ps.paired(a))?;
            Ok((lhs, rhs))
        }
        3 => {
            let b = part.get("B")?;
            let c = part.get("C")?;
            let lhs = info::mutual_information(rho, a, c)? + info::conditional_mutual_information(rho, a, c, b)?;
            let psr = ps_state(&ps)?;
            let rhs = info::mutual_information(&psr, &ps.paired(a), &ps.paired(c))?;
            Ok((lhs, rhs))
        }
        k => Err(Error::PartitionInvalid(format!("expected 2 or 3 parts, got {k}"))),
    }
}

fn ps_state(ps: &PurifiedState) -> Result<DensityMatrix> {
    DensityMatrix::pure(ps.doubled().clone(), ps.vector())
}

#[derive(Clone, Debug, PartialEq)]
pub struct MieReport {
    /// `Σ_{s_B} p(s_B) S(AĀ)` after measuring `B ∪ B̄` in the computational basis.
    pub mie: f64,
    pub cmi: f64,
    pub bound_holds: bool,
}

/// Measurement-induced entanglement of `|√ρ⟩` for a diagonal `ρ`.
pub fn classical_mie(rho: &DensityMatrix, part: &RegionPartition) -> Result<MieReport> {
    let m = rho.matrix();
    let d = rho.dim();
    let off = (0..d)
        .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| m[(i, j)].norm())
        .fold(0.0, f64::max);
    if off > 1e-12 {
        return Err(Error::NotClassical);
    }
    let a = part.get("A")?;
    let b = part.buffer()?;
    let c = part.get("C")?;
    let reg = rho.register();
    let abc = a.union(&b).union(c);
    let p_abc = rho.partial_trace(&abc)?;
    let sub_dims = p_abc.register().site_dims().to_vec();
    let pos_b = b.positions_in(&abc);
    let pos_ac = a.union(c).positions_in(&abc);
    let pos_a_in_ac = a.positions_in(&a.union(c));
    let lay_b = SiteLayout::new(&sub_dims, &pos_b);
    let d_a = reg.dim_of(a.sites());
    let d_c = reg.dim_of(c.sites());
    let ac_dims: Vec<usize> = pos_ac.iter().map(|&i| sub_dims[i]).collect();
    let lay_a = SiteLayout::new(&ac_dims, &pos_a_in_ac);
    debug_assert_eq!(lay_b.d_rest, d_a * d_c);
    let pm = p_abc.matrix();
    let mut mie = 0.0;
    for sb in 0..lay_b.d_sub {
        let probs: Vec<f64> = (0..lay_b.d_rest).map(|r| pm[(lay_b.idx(sb, r), lay_b.idx(sb, r))].re.max(0.0)).collect();
        let pb: f64 = probs.iter().sum();
        if pb < 1e-15 {
            continue;
        }
        // Post-measurement state Σ √p(a,c|b) |a c⟩|a c⟩; its AĀ marginal is
        // M[a, a'] = Σ_c √(p(a,c|b) p(a',c|b)) in the |a ā⟩ basis.
        let mut mm = linalg::zeros(d_a, d_a);
        for x in 0..d_a {
            for y in 0..d_a {
                let mut acc = 0.0;
                for r in 0..d_c {
                    acc += (probs[lay_a.idx(x, r)] * probs[lay_a.idx(y, r)]).sqrt();
                }
                mm[(x, y)] = cr(acc / pb);
            }
        }
        mie += pb * info::entropy_of_spectrum(&linalg::eigenvalues_hermitian(&mm));
    }
    let cmi = info::cmi_of_partition(rho, part)?;
    Ok(MieReport {
        mie,
        cmi,
        bound_holds: cmi <= mie + 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    #[test]
    fn maximally_mixed_qubit_purifies_to_bell() {
        let rho = DensityMatrix::maximally_mixed(Register::qubits(1));
        let ps = canonical_purify(&rho).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let v = ps.vector();
        assert!((v[0].re - s).abs() < 1e-12 && (v[3].re - s).abs() < 1e-12);
        assert!(v[1].norm() < 1e-12 && v[2].norm() < 1e-12);
    }

    #[test]
    fn base_marginal_round_trip() {
        let mut r = models::rng(9);
        let reg = Register::qubits(2);
        let rho = models::random_state(&mut r, &reg, None);
        let ps = canonical_purify(&rho).unwrap();
        let m = ps.marginal(&reg.all()).unwrap();
        assert!(linalg::max_abs_diff(m.matrix(), rho.matrix()) < 1e-10);
    }

    #[test]
    fn unitary_mirror_is_single_positive_term() {
        let mut r = models::rng(4);
        let u = models::random_unitary(&mut r, 2);
        let o = linalg::kron(&u, &u.map(|z| z.conj()));
        let m = choi_decompose(&o, 2).unwrap();
        assert_eq!(m.terms[0].len(), 1);
        assert!(m.terms[1..].iter().all(|t| t.iter().all(|(l, _)| *l < 1e-12)));
        assert!(m.reconstruction_error() < 1e-12);
    }

    #[test]
    fn wrong_block_rejected() {
        assert!(matches!(choi_decompose(&linalg::identity(3), 2), Err(Error::UnpairedBlock)));
    }

    #[test]
    fn classical_product_has_no_mie() {
        let reg = Register::qubits(3);
        let diag = [0.3, 0.7];
        let p: Vec<f64> = (0..8)
            .map(|i| diag[(i >> 2) & 1] * diag[(i >> 1) & 1] * diag[i & 1])
            .collect();
        let rho = DensityMatrix::new(reg.clone(), linalg::real_diag(&p)).unwrap();
        let part = RegionPartition::abc(&reg, &[0], &[1], &[2]).unwrap();
        let rep = classical_mie(&rho, &part).unwrap();
        assert!(rep.mie.abs() < 1e-12);
    }
}
