//! Dense complex matrices: Hermitian spectra, functions on the support, Schatten norms.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Eigenvalues at or below this fraction of the largest one are treated as kernel.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Negative eigenvalues down to `-CLIP_TOL * max` are clipped to zero.
pub const CLIP_TOL: f64 = 1e-10;
/// Relative anti-Hermitian residual accepted by `hermitian_eig`.
pub const HERM_TOL: f64 = 1e-9;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[derive(Clone, Debug)]
pub struct HermitianSpectrum {
    /// Descending.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, ordered like `values`.
    pub vectors: CMatrix,
    pub support_mask: Vec<bool>,
}

impl HermitianSpectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn max_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn rank(&self) -> usize {
        self.support_mask.iter().filter(|&&s| s).count()
    }

    /// `V diag(f(λ)) V†`, with `f` applied only on the support.
    pub fn apply_on_support<F: Fn(f64) -> C64>(&self, f: F) -> CMatrix {
        let w: Vec<C64> = self
            .values
            .iter()
            .zip(&self.support_mask)
            .map(|(&l, &s)| if s { f(l) } else { C64::new(0.0, 0.0) })
            .collect();
        scale_columns_conj(&self.vectors, &w)
    }

    /// `V diag(f(λ)) V†` over every eigenvalue.
    pub fn apply_all<F: Fn(f64) -> C64>(&self, f: F) -> CMatrix {
        let w: Vec<C64> = self.values.iter().map(|&l| f(l)).collect();
        scale_columns_conj(&self.vectors, &w)
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply_all(cr)
    }

    /// Projector onto the support.
    pub fn support_projector(&self) -> CMatrix {
        self.apply_on_support(|_| cr(1.0))
    }
}

fn scale_columns_conj(v: &CMatrix, w: &[C64]) -> CMatrix {
    let mut vw = v.clone();
    for (j, wj) in w.iter().enumerate() {
        vw.column_mut(j).scale_mut_c(*wj);
    }
    &vw * v.adjoint()
}

trait ScaleC {
    fn scale_mut_c(&mut self, w: C64);
}

impl<S: nalgebra::StorageMut<C64, nalgebra::Dyn, nalgebra::U1>> ScaleC
    for nalgebra::Matrix<C64, nalgebra::Dyn, nalgebra::U1, S>
{
    fn scale_mut_c(&mut self, w: C64) {
        for x in self.iter_mut() {
            *x *= w;
        }
    }
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn zeros(r: usize, c: usize) -> CMatrix {
    CMatrix::zeros(r, c)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_all(ms: &[CMatrix]) -> CMatrix {
    ms.iter()
        .fold(identity(1), |acc, m| kron(&acc, m))
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn anti_hermitian_residual(m: &CMatrix) -> f64 {
    frobenius(&(m - m.adjoint()))
}

/// Hermitian eigendecomposition, eigenvalues descending.
pub fn hermitian_eig(m: &CMatrix) -> Result<HermitianSpectrum> {
    if !m.is_square() {
        return Err(Error::NotHermitian(f64::INFINITY));
    }
    if !is_finite(m) {
        return Err(Error::Nonfinite);
    }
    let scale = frobenius(m);
    let res = anti_hermitian_residual(m);
    if res > HERM_TOL * scale.max(f64::MIN_POSITIVE) && res > 0.0 {
        return Err(Error::NotHermitian(res / scale.max(f64::MIN_POSITIVE)));
    }
    Ok(eig_unchecked(&hermitian_part(m)))
}

/// Eigendecomposition of a matrix already known to be Hermitian.
pub(crate) fn eig_unchecked(h: &CMatrix) -> HermitianSpectrum {
    let n = h.nrows();
    if n == 0 {
        return HermitianSpectrum {
            values: vec![],
            vectors: zeros(0, 0),
            support_mask: vec![],
        };
    }
    let se = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = zeros(n, n);
    for (j, &i) in order.iter().enumerate() {
        vectors.set_column(j, &se.eigenvectors.column(i));
    }
    let lmax = values[0];
    let thr = SUPPORT_TOL * lmax.max(0.0);
    let support_mask = values.iter().map(|&l| l > thr && l > 0.0).collect();
    HermitianSpectrum {
        values,
        vectors,
        support_mask,
    }
}

/// Spectrum of a PSD matrix with the clipping window enforced.
pub fn psd_eig(m: &CMatrix) -> Result<HermitianSpectrum> {
    let mut sp = hermitian_eig(m)?;
    let lmax = sp.max_value().max(0.0);
    let lmin = sp.values.last().copied().unwrap_or(0.0);
    if lmin < -CLIP_TOL * lmax {
        return Err(Error::NegativeEigenvalue(lmin));
    }
    for l in sp.values.iter_mut() {
        if *l < 0.0 {
            *l = 0.0;
        }
    }
    Ok(sp)
}

/// `M^r` on the support of a PSD matrix; kernel maps to zero for any `r`.
pub fn matrix_power_on_support(m: &CMatrix, r: f64) -> Result<CMatrix> {
    Ok(psd_eig(m)?.apply_on_support(|l| cr(l.powf(r))))
}

/// `f(M)` on the support of a PSD matrix.
pub fn psd_function<F: Fn(f64) -> C64>(m: &CMatrix, f: F) -> Result<CMatrix> {
    Ok(psd_eig(m)?.apply_on_support(f))
}

/// `M^{r + i t}` on the support of a PSD matrix.
pub fn complex_power_on_support(m: &CMatrix, r: f64, t: f64) -> Result<CMatrix> {
    Ok(psd_eig(m)?.apply_on_support(|l| {
        let ln = l.ln();
        C64::from_polar((r * ln).exp(), t * ln)
    }))
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return vec![];
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `(Σ σ_i^p)^{1/p}`; `p = f64::INFINITY` gives the operator norm.
pub fn schatten_norm(m: &CMatrix, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::UnsupportedExponent(p));
    }
    let s = singular_values(m);
    Ok(schatten_from_singular(&s, p))
}

pub(crate) fn schatten_from_singular(s: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return s.iter().copied().fold(0.0, f64::max);
    }
    if p == 1.0 {
        return s.iter().sum();
    }
    if p == 2.0 {
        return s.iter().map(|x| x * x).sum::<f64>().sqrt();
    }
    let smax = s.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0.0;
    }
    smax * s.iter().map(|x| (x / smax).powf(p)).sum::<f64>().powf(1.0 / p)
}

pub fn operator_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Trace norm of a Hermitian matrix as the sum of absolute eigenvalues.
pub fn trace_norm_hermitian(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(hermitian_part(m))
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .sum()
}

pub fn eigenvalues_hermitian(m: &CMatrix) -> Vec<f64> {
    eig_unchecked(&hermitian_part(m)).values
}

pub fn pauli(label: char) -> CMatrix {
    let o = cr(0.0);
    let l = cr(1.0);
    let i = c(0.0, 1.0);
    match label {
        'I' => identity(2),
        'X' => CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        'Y' => CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        'Z' => CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        _ => panic!("unknown Pauli label {label}"),
    }
}

/// Generalized Pauli `X^a Z^b` on a `d`-level system.
pub fn weyl(d: usize, a: usize, b: usize) -> CMatrix {
    let mut m = zeros(d, d);
    for j in 0..d {
        let phase = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * ((b * j) % d) as f64 / d as f64);
        m[((j + a) % d, j)] = phase;
    }
    m
}

pub fn real_diag(d: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(d.len(), d.iter().map(|&x| cr(x))))
}

pub fn ket(d: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(d);
    v[i] = cr(1.0);
    v
}

pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn ket_bra(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = zeros(d, d);
    m[(i, j)] = cr(1.0);
    m
}

/// Column-stacking vectorization.
pub fn vec_col(m: &CMatrix) -> CVector {
    CVector::from_iterator(m.len(), m.iter().copied())
}

pub fn unvec_col(v: &CVector, d: usize) -> CMatrix {
    CMatrix::from_iterator(d, d, v.iter().copied())
}

/// Hilbert-Schmidt inner product `Tr(a† b)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_z_spectrum() {
        let sp = hermitian_eig(&pauli('Z')).unwrap();
        assert_eq!(sp.values, vec![1.0, -1.0]);
    }

    #[test]
    fn identity_spectrum() {
        let sp = hermitian_eig(&identity(2)).unwrap();
        assert!((sp.values[0] - 1.0).abs() < 1e-15 && (sp.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(0.0), cr(0.0)]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
        let mut n = identity(2);
        n[(0, 0)] = cr(f64::NAN);
        assert_eq!(hermitian_eig(&n).unwrap_err(), Error::Nonfinite);
    }

    #[test]
    fn pseudo_inverse_sqrt_of_projector() {
        let p = ket_bra(2, 0, 0);
        let r = matrix_power_on_support(&p, -0.5).unwrap();
        assert!(max_abs_diff(&r, &p) < 1e-15);
        let h = matrix_power_on_support(&identity(2).scale(0.5), 0.5).unwrap();
        assert!(max_abs_diff(&h, &identity(2).scale(std::f64::consts::FRAC_1_SQRT_2)) < 1e-15);
    }

    #[test]
    fn negative_eigenvalue_rejected() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![cr(1.0), cr(-1e-6)]));
        assert!(matches!(matrix_power_on_support(&m, 0.5), Err(Error::NegativeEigenvalue(_))));
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![cr(1.0), cr(-1e-12)]));
        assert!(matrix_power_on_support(&m, 0.5).is_ok());
    }

    #[test]
    fn schatten_basics() {
        assert!((schatten_norm(&identity(4), 1.0).unwrap() - 4.0).abs() < 1e-12);
        assert!((schatten_norm(&pauli('X'), f64::INFINITY).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(schatten_norm(&pauli('X'), 0.5), Err(Error::UnsupportedExponent(_))));
    }

    #[test]
    fn weyl_qubit_matches_pauli() {
        assert!(max_abs_diff(&weyl(2, 1, 0), &pauli('X')) < 1e-15);
        assert!(max_abs_diff(&weyl(2, 0, 1), &pauli('Z')) < 1e-15);
    }
}
