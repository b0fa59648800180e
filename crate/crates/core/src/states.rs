//! Qudit registers, regions and density matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};

pub const DEFAULT_DIM_CAP: usize = 4096;
pub const STATE_HERM_TOL: f64 = 1e-9;
pub const STATE_TRACE_TOL: f64 = 1e-9;
pub const STATE_NEG_TOL: f64 = 1e-10;

fn default_cap() -> usize {
    DEFAULT_DIM_CAP
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    site_dims: Vec<usize>,
    coords: Vec<Vec<i64>>,
    #[serde(skip, default = "default_cap")]
    cap: usize,
}

impl Register {
    pub fn new(site_dims: Vec<usize>, coords: Option<Vec<Vec<i64>>>, cap: usize) -> Result<Self> {
        if site_dims.iter().any(|&d| d < 2) {
            return Err(Error::BadRegion("site dimensions must be at least 2".into()));
        }
        let coords = match coords {
            Some(c) => {
                if c.len() != site_dims.len() {
                    return Err(Error::BadRegion("one coordinate per site required".into()));
                }
                c
            }
            None => (0..site_dims.len() as i64).map(|i| vec![i]).collect(),
        };
        let dim = site_dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .unwrap_or(usize::MAX);
        if dim > cap {
            return Err(Error::DimensionCap { dim, cap });
        }
        Ok(Register {
            site_dims,
            coords,
            cap,
        })
    }

    /// 1D chain with default coordinates and cap.
    pub fn chain(site_dims: &[usize]) -> Result<Self> {
        Self::new(site_dims.to_vec(), None, DEFAULT_DIM_CAP)
    }

    pub fn qubits(n: usize) -> Self {
        Self::chain(&vec![2; n]).expect("qubit register within cap")
    }

    pub fn with_cap(mut self, cap: usize) -> Result<Self> {
        if self.dim() > cap {
            return Err(Error::DimensionCap {
                dim: self.dim(),
                cap,
            });
        }
        self.cap = cap;
        Ok(self)
    }

    pub fn site_dims(&self) -> &[usize] {
        &self.site_dims
    }

    pub fn coords(&self) -> &[Vec<i64>] {
        &self.coords
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn n_sites(&self) -> usize {
        self.site_dims.len()
    }

    pub fn dim(&self) -> usize {
        self.site_dims.iter().product()
    }

    pub fn dim_of(&self, sites: &[usize]) -> usize {
        sites.iter().map(|&s| self.site_dims[s]).product()
    }

    pub fn all(&self) -> Region {
        Region((0..self.n_sites()).collect())
    }

    pub fn region(&self, sites: &[usize]) -> Result<Region> {
        Region::new(self, sites)
    }

    /// Register restricted to `sites` (in increasing order).
    pub fn sub(&self, sites: &Region) -> Register {
        Register {
            site_dims: sites.0.iter().map(|&s| self.site_dims[s]).collect(),
            coords: sites.0.iter().map(|&s| self.coords[s].clone()).collect(),
            cap: self.cap,
        }
    }

    pub fn concat(&self, other: &Register) -> Result<Register> {
        let mut dims = self.site_dims.clone();
        dims.extend_from_slice(&other.site_dims);
        let offset = self.coords.iter().map(|c| c.first().copied().unwrap_or(0)).max().unwrap_or(-1) + 1;
        let mut coords = self.coords.clone();
        let shift_dim = other.coords.first().map(|c| c.len()).unwrap_or(1);
        for c in &other.coords {
            let mut c = c.clone();
            if shift_dim > 0 {
                c[0] += offset;
            }
            coords.push(c);
        }
        Register::new(dims, Some(coords), self.cap.max(other.cap))
    }

    /// Chebyshev distance between two site sets.
    pub fn distance(&self, a: &Region, b: &Region) -> i64 {
        let mut best = i64::MAX;
        for &i in a.sites() {
            for &j in b.sites() {
                let d = self.coords[i]
                    .iter()
                    .zip(&self.coords[j])
                    .map(|(x, y)| (x - y).abs())
                    .max()
                    .unwrap_or(0);
                best = best.min(d);
            }
        }
        best
    }
}

/// Sorted, duplicate-free set of site indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Region(Vec<usize>);

impl Region {
    pub fn new(reg: &Register, sites: &[usize]) -> Result<Region> {
        let mut s = sites.to_vec();
        s.sort_unstable();
        s.dedup();
        if let Some(&bad) = s.iter().find(|&&i| i >= reg.n_sites()) {
            return Err(Error::BadRegion(format!("site {bad} outside register of {} sites", reg.n_sites())));
        }
        Ok(Region(s))
    }

    pub fn empty() -> Region {
        Region(vec![])
    }

    pub fn range(r: std::ops::Range<usize>) -> Region {
        Region(r.collect())
    }

    /// Region from arbitrary indices, sorted and deduplicated, without a register check.
    pub fn from_positions(p: &[usize]) -> Region {
        let mut s = p.to_vec();
        s.sort_unstable();
        s.dedup();
        Region(s)
    }

    pub(crate) fn from_sorted(s: Vec<usize>) -> Region {
        debug_assert!(s.windows(2).all(|w| w[0] < w[1]));
        Region(s)
    }

    pub fn sites(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, s: usize) -> bool {
        self.0.binary_search(&s).is_ok()
    }

    pub fn union(&self, o: &Region) -> Region {
        let mut s = self.0.clone();
        s.extend_from_slice(&o.0);
        s.sort_unstable();
        s.dedup();
        Region(s)
    }

    pub fn minus(&self, o: &Region) -> Region {
        Region(self.0.iter().copied().filter(|s| !o.contains(*s)).collect())
    }

    pub fn is_disjoint(&self, o: &Region) -> bool {
        self.0.iter().all(|s| !o.contains(*s))
    }

    pub fn is_subset(&self, o: &Region) -> bool {
        self.0.iter().all(|s| o.contains(*s))
    }

    pub fn complement(&self, reg: &Register) -> Region {
        reg.all().minus(self)
    }

    /// Positions of this region's sites inside `outer`.
    pub fn positions_in(&self, outer: &Region) -> Vec<usize> {
        self.0
            .iter()
            .map(|s| outer.0.binary_search(s).expect("region not contained"))
            .collect()
    }
}

/// Labeled disjoint regions covering a register.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionPartition {
    parts: Vec<(String, Region)>,
}

impl RegionPartition {
    pub fn new(reg: &Register, parts: Vec<(&str, Region)>) -> Result<Self> {
        let mut seen = vec![false; reg.n_sites()];
        for (label, r) in &parts {
            for &s in r.sites() {
                if s >= reg.n_sites() {
                    return Err(Error::PartitionInvalid(format!("site {s} of {label} out of range")));
                }
                if seen[s] {
                    return Err(Error::PartitionInvalid(format!("site {s} appears twice")));
                }
                seen[s] = true;
            }
        }
        if let Some(s) = seen.iter().position(|&b| !b) {
            return Err(Error::PartitionInvalid(format!("site {s} not covered")));
        }
        Ok(RegionPartition {
            parts: parts.into_iter().map(|(l, r)| (l.to_string(), r)).collect(),
        })
    }

    /// A, B, C tripartition.
    pub fn abc(reg: &Register, a: &[usize], b: &[usize], c: &[usize]) -> Result<Self> {
        Self::new(
            reg,
            vec![("A", reg.region(a)?), ("B", reg.region(b)?), ("C", reg.region(c)?)],
        )
    }

    /// A, B1, B2, C partition.
    pub fn abbc(reg: &Register, a: &[usize], b1: &[usize], b2: &[usize], c: &[usize]) -> Result<Self> {
        Self::new(
            reg,
            vec![
                ("A", reg.region(a)?),
                ("B1", reg.region(b1)?),
                ("B2", reg.region(b2)?),
                ("C", reg.region(c)?),
            ],
        )
    }

    pub fn get(&self, label: &str) -> Result<&Region> {
        self.parts
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, r)| r)
            .ok_or_else(|| Error::PartitionInvalid(format!("missing region {label}")))
    }

    pub fn parts(&self) -> &[(String, Region)] {
        &self.parts
    }

    /// B for a tripartition, B1 ∪ B2 for a four-way partition.
    pub fn buffer(&self) -> Result<Region> {
        if let Ok(b) = self.get("B") {
            return Ok(b.clone());
        }
        Ok(self.get("B1")?.union(self.get("B2")?))
    }
}

/// Index bookkeeping for splitting a register into a site subset and its complement.
#[derive(Clone, Debug)]
pub struct SiteLayout {
    pub d_sub: usize,
    pub d_rest: usize,
    /// Full index of `(sub, rest)` at `sub * d_rest + rest`.
    full: Vec<usize>,
}

impl SiteLayout {
    pub fn new(dims: &[usize], subset: &[usize]) -> SiteLayout {
        let n = dims.len();
        let in_sub: Vec<bool> = (0..n).map(|i| subset.contains(&i)).collect();
        let d_sub: usize = (0..n).filter(|&i| in_sub[i]).map(|i| dims[i]).product();
        let d_rest: usize = (0..n).filter(|&i| !in_sub[i]).map(|i| dims[i]).product();
        let total = d_sub * d_rest;
        let mut full = vec![0usize; total];
        let mut digits = vec![0usize; n];
        for idx in 0..total {
            let mut rem = idx;
            for i in (0..n).rev() {
                digits[i] = rem % dims[i];
                rem /= dims[i];
            }
            let (mut s, mut r) = (0usize, 0usize);
            for i in 0..n {
                if in_sub[i] {
                    s = s * dims[i] + digits[i];
                } else {
                    r = r * dims[i] + digits[i];
                }
            }
            full[s * d_rest + r] = idx;
        }
        SiteLayout { d_sub, d_rest, full }
    }

    #[inline]
    pub fn idx(&self, s: usize, r: usize) -> usize {
        self.full[s * self.d_rest + r]
    }

    /// Trace over the complement, keeping the subset.
    pub fn trace_rest(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.d_sub, self.d_sub);
        for s1 in 0..self.d_sub {
            for s2 in 0..self.d_sub {
                let mut acc = C64::new(0.0, 0.0);
                for r in 0..self.d_rest {
                    acc += x[(self.idx(s1, r), self.idx(s2, r))];
                }
                out[(s1, s2)] = acc;
            }
        }
        out
    }

    /// `op ⊗ 1_rest` as a full matrix.
    pub fn embed(&self, op: &CMatrix) -> CMatrix {
        let d = self.d_sub * self.d_rest;
        let mut out = CMatrix::zeros(d, d);
        for s1 in 0..self.d_sub {
            for s2 in 0..self.d_sub {
                let v = op[(s1, s2)];
                if v == C64::new(0.0, 0.0) {
                    continue;
                }
                for r in 0..self.d_rest {
                    out[(self.idx(s1, r), self.idx(s2, r))] = v;
                }
            }
        }
        out
    }

    /// `(op ⊗ 1_rest) x` without forming the embedded operator.
    pub fn left_mul(&self, op: &CMatrix, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(x.nrows(), x.ncols());
        for r in 0..self.d_rest {
            for s1 in 0..self.d_sub {
                let i1 = self.idx(s1, r);
                for s2 in 0..self.d_sub {
                    let v = op[(s1, s2)];
                    if v == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let i2 = self.idx(s2, r);
                    for col in 0..x.ncols() {
                        out[(i1, col)] += v * x[(i2, col)];
                    }
                }
            }
        }
        out
    }

    /// `x (op ⊗ 1_rest)`.
    pub fn right_mul(&self, x: &CMatrix, op: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(x.nrows(), x.ncols());
        for r in 0..self.d_rest {
            for s1 in 0..self.d_sub {
                let i1 = self.idx(s1, r);
                for s2 in 0..self.d_sub {
                    let v = op[(s2, s1)];
                    if v == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let i2 = self.idx(s2, r);
                    for row in 0..x.nrows() {
                        out[(row, i1)] += x[(row, i2)] * v;
                    }
                }
            }
        }
        out
    }

    /// `(op ⊗ 1) x (op ⊗ 1)†`.
    pub fn conjugate(&self, op: &CMatrix, x: &CMatrix) -> CMatrix {
        self.right_mul(&self.left_mul(op, x), &op.adjoint())
    }

    /// `(op ⊗ 1) v` for a state vector.
    pub fn apply_vec(&self, op: &CMatrix, v: &CVector) -> CVector {
        let mut out = CVector::zeros(v.len());
        for r in 0..self.d_rest {
            for s1 in 0..self.d_sub {
                let mut acc = C64::new(0.0, 0.0);
                for s2 in 0..self.d_sub {
                    acc += op[(s1, s2)] * v[self.idx(s2, r)];
                }
                out[self.idx(s1, r)] = acc;
            }
        }
        out
    }

    /// Reduced density matrix of a pure state vector on the subset.
    pub fn vector_marginal(&self, v: &CVector) -> CMatrix {
        let m = CMatrix::from_fn(self.d_sub, self.d_rest, |s, r| v[self.idx(s, r)]);
        &m * m.adjoint()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    register: Register,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validated constructor: Hermitian, PSD within the clipping window, unit trace.
    pub fn new(register: Register, matrix: CMatrix) -> Result<Self> {
        let d = register.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::InvalidState(format!(
                "matrix is {}x{}, register needs {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !linalg::is_finite(&matrix) {
            return Err(Error::Nonfinite);
        }
        let herm = linalg::anti_hermitian_residual(&matrix);
        if herm > STATE_HERM_TOL {
            return Err(Error::InvalidState(format!("not Hermitian ({herm:.3e})")));
        }
        let tr = linalg::trace(&matrix).re;
        if (tr - 1.0).abs() > STATE_TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let matrix = linalg::hermitian_part(&matrix);
        let lmin = linalg::eigenvalues_hermitian(&matrix).last().copied().unwrap_or(0.0);
        if lmin < -STATE_NEG_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {lmin:.3e}")));
        }
        Ok(DensityMatrix { register, matrix })
    }

    /// Normalizes a PSD matrix to unit trace, then validates.
    pub fn from_unnormalized(register: Register, matrix: CMatrix) -> Result<Self> {
        let tr = linalg::trace(&matrix).re;
        if !(tr > 0.0) {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        Self::new(register, matrix.unscale(tr))
    }

    /// Skips validation; callers guarantee a valid state up to rounding.
    pub(crate) fn trusted(register: Register, matrix: CMatrix) -> Self {
        DensityMatrix { register, matrix }
    }

    pub fn pure(register: Register, psi: &CVector) -> Result<Self> {
        let n = psi.norm();
        if n == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let v = psi.unscale(n);
        Self::new(register, linalg::projector(&v))
    }

    pub fn maximally_mixed(register: Register) -> Self {
        let d = register.dim();
        DensityMatrix {
            matrix: linalg::identity(d).unscale(d as f64),
            register,
        }
    }

    /// Computational basis state `|i⟩⟨i|`.
    pub fn basis(register: Register, i: usize) -> Self {
        let d = register.dim();
        DensityMatrix {
            matrix: linalg::ket_bra(d, i, i),
            register,
        }
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let register = self.register.concat(&other.register)?;
        Ok(DensityMatrix {
            matrix: linalg::kron(&self.matrix, &other.matrix),
            register,
        })
    }

    pub fn partial_trace(&self, keep: &Region) -> Result<DensityMatrix> {
        if let Some(&bad) = keep.sites().iter().find(|&&s| s >= self.register.n_sites()) {
            return Err(Error::BadRegion(format!("site {bad} out of range")));
        }
        Ok(DensityMatrix {
            matrix: partial_trace_matrix(&self.matrix, self.register.site_dims(), keep.sites()),
            register: self.register.sub(keep),
        })
    }

    pub fn marginal(&self, sites: &[usize]) -> Result<DensityMatrix> {
        self.partial_trace(&Region::new(&self.register, sites)?)
    }

    pub fn purity(&self) -> f64 {
        linalg::hs_inner(&self.matrix, &self.matrix).re
    }

    pub fn spectrum(&self) -> Vec<f64> {
        linalg::eigenvalues_hermitian(&self.matrix)
    }

    /// Convex mixture `(1-t) self + t other`.
    pub fn mix(&self, other: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        self.same_register(other)?;
        Ok(DensityMatrix {
            matrix: self.matrix.scale(1.0 - t) + other.matrix.scale(t),
            register: self.register.clone(),
        })
    }

    fn same_register(&self, other: &DensityMatrix) -> Result<()> {
        if self.register.site_dims() != other.register.site_dims() {
            return Err(Error::RegisterMismatch);
        }
        Ok(())
    }

    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        self.same_register(other)?;
        Ok(linalg::trace_norm_hermitian(&(&self.matrix - &other.matrix)))
    }

    /// Uhlmann fidelity `‖√a √b‖₁`.
    pub fn fidelity(&self, other: &DensityMatrix) -> Result<f64> {
        self.same_register(other)?;
        Ok(fidelity_matrices(&self.matrix, &other.matrix)?.min(1.0))
    }

    /// `√(2 − 2F)`.
    pub fn bures_distance(&self, other: &DensityMatrix) -> Result<f64> {
        let f = self.fidelity(other)?;
        Ok((2.0 - 2.0 * f).max(0.0).sqrt())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&StateRecord::from(self)).expect("state serializes")
    }

    pub fn from_json(s: &str) -> Result<DensityMatrix> {
        let rec: StateRecord = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        rec.try_into()
    }
}

pub fn partial_trace_matrix(m: &CMatrix, dims: &[usize], keep: &[usize]) -> CMatrix {
    SiteLayout::new(dims, keep).trace_rest(m)
}

pub(crate) fn fidelity_matrices(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    let sa = linalg::matrix_power_on_support(a, 0.5)?;
    let sb = linalg::matrix_power_on_support(b, 0.5)?;
    Ok(linalg::singular_values(&(sa * sb)).iter().sum())
}

#[derive(Serialize, Deserialize)]
struct StateRecord {
    site_dims: Vec<usize>,
    coords: Vec<Vec<i64>>,
    matrix: Vec<[f64; 2]>,
}

impl From<&DensityMatrix> for StateRecord {
    fn from(s: &DensityMatrix) -> Self {
        let d = s.dim();
        let mut matrix = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let z = s.matrix[(i, j)];
                matrix.push([z.re, z.im]);
            }
        }
        StateRecord {
            site_dims: s.register.site_dims.clone(),
            coords: s.register.coords.clone(),
            matrix,
        }
    }
}

impl TryFrom<StateRecord> for DensityMatrix {
    type Error = Error;
    fn try_from(rec: StateRecord) -> Result<Self> {
        let register = Register::new(rec.site_dims, Some(rec.coords), DEFAULT_DIM_CAP)?;
        let d = register.dim();
        if rec.matrix.len() != d * d {
            return Err(Error::Parse(format!("expected {} entries, found {}", d * d, rec.matrix.len())));
        }
        let m = CMatrix::from_row_iterator(d, d, rec.matrix.iter().map(|p| C64::new(p[0], p[1])));
        // Keep the stored entries bit-for-bit; validate on a copy.
        DensityMatrix::new(register.clone(), m.clone())?;
        Ok(DensityMatrix::trusted(register, m))
    }
}

/// Embeds an operator acting on `sites` into the full register.
pub fn embed_operator(op: &CMatrix, reg: &Register, sites: &Region) -> CMatrix {
    SiteLayout::new(reg.site_dims(), sites.sites()).embed(op)
}

/// Tensor product of single-site operators, identity elsewhere.
pub fn product_operator(reg: &Register, ops: &[(usize, CMatrix)]) -> CMatrix {
    let mats: Vec<CMatrix> = (0..reg.n_sites())
        .map(|i| {
            ops.iter()
                .find(|(s, _)| *s == i)
                .map(|(_, m)| m.clone())
                .unwrap_or_else(|| linalg::identity(reg.site_dims()[i]))
        })
        .collect();
    linalg::kron_all(&mats)
}

pub fn expectation(rho: &DensityMatrix, op: &CMatrix) -> C64 {
    linalg::hs_inner(&op.adjoint(), rho.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cr, max_abs_diff};

    fn bell() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = CVector::from_vec(vec![cr(s), cr(0.0), cr(0.0), cr(s)]);
        DensityMatrix::pure(Register::qubits(2), &v).unwrap()
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let r = bell().marginal(&[1]).unwrap();
        assert!(max_abs_diff(r.matrix(), &linalg::identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn tensor_basis_states() {
        let a = DensityMatrix::basis(Register::qubits(1), 0);
        let b = DensityMatrix::basis(Register::qubits(1), 1);
        let ab = a.tensor(&b).unwrap();
        assert!(max_abs_diff(ab.matrix(), &linalg::ket_bra(4, 1, 1)) < 1e-15);
        let mm = DensityMatrix::maximally_mixed(Register::qubits(1));
        let mm2 = mm.tensor(&mm).unwrap();
        assert!(max_abs_diff(mm2.matrix(), &linalg::identity(4).scale(0.25)) < 1e-15);
    }

    #[test]
    fn orthogonal_distances() {
        let a = DensityMatrix::basis(Register::qubits(1), 0);
        let b = DensityMatrix::basis(Register::qubits(1), 1);
        assert!((a.trace_distance(&b).unwrap() - 2.0).abs() < 1e-14);
        assert!((a.bures_distance(&b).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        let m = DensityMatrix::maximally_mixed(Register::qubits(1));
        assert!((a.fidelity(&m).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        assert!((a.fidelity(&a).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn validation() {
        let reg = Register::qubits(1);
        assert!(DensityMatrix::new(reg.clone(), linalg::identity(2)).is_err());
        assert!(DensityMatrix::new(reg.clone(), linalg::pauli('X')).is_err());
        let bad = linalg::real_diag(&[1.5, -0.5]);
        assert!(DensityMatrix::new(reg, bad).is_err());
        assert!(matches!(
            Register::chain(&[2; 13]),
            Err(Error::DimensionCap { .. })
        ));
    }

    #[test]
    fn partition_checks() {
        let reg = Register::qubits(4);
        assert!(RegionPartition::abc(&reg, &[0], &[1, 2], &[3]).is_ok());
        assert!(RegionPartition::abc(&reg, &[0], &[1, 2], &[2, 3]).is_err());
        assert!(RegionPartition::abc(&reg, &[0], &[1], &[3]).is_err());
        assert!(matches!(reg.region(&[7]), Err(Error::BadRegion(_))));
    }

    #[test]
    fn layout_left_right_match_embedding() {
        let dims = [2, 3, 2];
        let reg = Register::chain(&dims).unwrap();
        let sub = reg.region(&[0, 2]).unwrap();
        let lay = SiteLayout::new(&dims, sub.sites());
        let op = CMatrix::from_fn(4, 4, |i, j| C64::new((i + 2 * j) as f64, i as f64 - j as f64));
        let x = CMatrix::from_fn(12, 12, |i, j| C64::new((i * j) as f64 * 0.1, (i + j) as f64));
        let e = lay.embed(&op);
        assert!(max_abs_diff(&lay.left_mul(&op, &x), &(&e * &x)) < 1e-10);
        assert!(max_abs_diff(&lay.right_mul(&x, &op), &(&x * &e)) < 1e-10);
    }
}
