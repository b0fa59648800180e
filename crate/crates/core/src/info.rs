//! Entropies (bits), mutual information, α-z Rényi divergences and continuity bounds.

use crate::error::{Error, Result};
use crate::linalg::{self, cr};
use crate::states::{DensityMatrix, Region, RegionPartition};

/// `−Σ λ log₂ λ` over the support.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.spectrum())
}

pub fn entropy_of_spectrum(values: &[f64]) -> f64 {
    let lmax = values.iter().copied().fold(0.0, f64::max);
    let thr = linalg::SUPPORT_TOL * lmax;
    let s: f64 = values
        .iter()
        .filter(|&&l| l > thr && l > 0.0)
        .map(|&l| -l * l.log2())
        .sum();
    s.max(0.0)
}

/// Entropy of the marginal on `region`; zero for the empty region.
pub fn entropy_of(rho: &DensityMatrix, region: &Region) -> Result<f64> {
    if region.is_empty() {
        return Ok(0.0);
    }
    if region.len() == rho.register().n_sites() {
        return Ok(von_neumann_entropy(rho));
    }
    Ok(von_neumann_entropy(&rho.partial_trace(region)?))
}

/// `I(A:C) = S(A) + S(C) − S(AC)`.
pub fn mutual_information(rho: &DensityMatrix, a: &Region, c: &Region) -> Result<f64> {
    if !a.is_disjoint(c) {
        return Err(Error::RegionsOverlap);
    }
    Ok(entropy_of(rho, a)? + entropy_of(rho, c)? - entropy_of(rho, &a.union(c))?)
}

/// `I(A:C|B) = S(AB) + S(BC) − S(ABC) − S(B)`.
pub fn conditional_mutual_information(rho: &DensityMatrix, a: &Region, c: &Region, b: &Region) -> Result<f64> {
    if !a.is_disjoint(c) || !a.is_disjoint(b) || !b.is_disjoint(c) {
        return Err(Error::RegionsOverlap);
    }
    let ab = a.union(b);
    let bc = b.union(c);
    Ok(entropy_of(rho, &ab)? + entropy_of(rho, &bc)? - entropy_of(rho, &ab.union(c))? - entropy_of(rho, b)?)
}

/// CMI for a partition labeled A, B, C (or A, B1, B2, C with B = B1 ∪ B2).
pub fn cmi_of_partition(rho: &DensityMatrix, part: &RegionPartition) -> Result<f64> {
    conditional_mutual_information(rho, part.get("A")?, part.get("C")?, &part.buffer()?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyReport {
    pub entropies: Vec<(String, f64)>,
    pub mutual_information_ac: f64,
    pub cmi: f64,
}

/// Entropies of every union of partition labels, plus `I(A:C)` and `I(A:C|B)`.
pub fn entropy_report(rho: &DensityMatrix, part: &RegionPartition) -> Result<EntropyReport> {
    let parts = part.parts();
    let n = parts.len();
    let mut entropies = Vec::new();
    for mask in 1u32..(1 << n) {
        let mut label = String::new();
        let mut r = Region::empty();
        for (i, (l, reg)) in parts.iter().enumerate() {
            if mask & (1 << i) != 0 {
                label.push_str(l);
                r = r.union(reg);
            }
        }
        entropies.push((label, entropy_of(rho, &r)?));
    }
    let a = part.get("A")?;
    let c = part.get("C")?;
    Ok(EntropyReport {
        entropies,
        mutual_information_ac: mutual_information(rho, a, c)?,
        cmi: cmi_of_partition(rho, part)?,
    })
}

/// Umegaki relative entropy in bits; `+∞` when `supp ρ ⊄ supp σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.register().site_dims() != sigma.register().site_dims() {
        return Err(Error::RegisterMismatch);
    }
    let sr = linalg::psd_eig(rho.matrix())?;
    let ss = linalg::psd_eig(sigma.matrix())?;
    if !support_contained(&sr, &ss) {
        return Ok(f64::INFINITY);
    }
    let log_r = sr.apply_on_support(|l| cr(l.log2()));
    let log_s = ss.apply_on_support(|l| cr(l.log2()));
    Ok(linalg::hs_inner(rho.matrix(), &(log_r - log_s)).re)
}

fn support_contained(a: &linalg::HermitianSpectrum, b: &linalg::HermitianSpectrum) -> bool {
    let pb = b.support_projector();
    let pa = a.support_projector();
    let leak = &pa - &pb * &pa;
    linalg::frobenius(&leak) < 1e-7
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DivergenceParams {
    pub alpha: f64,
    pub z: f64,
}

impl DivergenceParams {
    pub fn new(alpha: f64, z: f64) -> Result<Self> {
        if !(alpha > 0.0) || (alpha - 1.0).abs() < 1e-15 || !(z > 0.0) || !alpha.is_finite() || !z.is_finite() {
            return Err(Error::ParamsOutOfRange(format!("alpha={alpha}, z={z}")));
        }
        Ok(DivergenceParams { alpha, z })
    }

    /// `(p, q) = ((1−α)/z, α/z)`.
    pub fn to_pq(&self) -> (f64, f64) {
        ((1.0 - self.alpha) / self.z, self.alpha / self.z)
    }
}

/// `D_{α,z}(ρ‖σ) = 1/(α−1) log₂ Tr[(σ^{(1−α)/2z} ρ^{α/z} σ^{(1−α)/2z})^z]`.
/// Support violations return `+∞`.
pub fn alpha_z_divergence(rho: &DensityMatrix, sigma: &DensityMatrix, params: DivergenceParams) -> Result<f64> {
    if rho.register().site_dims() != sigma.register().site_dims() {
        return Err(Error::RegisterMismatch);
    }
    let DivergenceParams { alpha, z } = params;
    let sr = linalg::psd_eig(rho.matrix())?;
    let ss = linalg::psd_eig(sigma.matrix())?;
    if alpha > 1.0 && !support_contained(&sr, &ss) {
        return Ok(f64::INFINITY);
    }
    let rp = sr.apply_on_support(|l| cr(l.powf(alpha / z)));
    let sp = ss.apply_on_support(|l| cr(l.powf((1.0 - alpha) / (2.0 * z))));
    let m = &sp * rp * &sp;
    let q: f64 = linalg::eigenvalues_hermitian(&m)
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| l.powf(z))
        .sum();
    if q <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let tr = linalg::trace(rho.matrix()).re;
    Ok((q / tr).log2() / (alpha - 1.0))
}

/// Binary entropy in bits.
pub fn h2(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// `κ(x) = (1 + x) h₂(x / (1 + x))`.
pub fn kappa(x: f64) -> f64 {
    (1.0 + x) * h2(x / (1.0 + x))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fact2Bounds {
    /// `δ log min{d_AB, d_C} + 2κ(δ/2)`, bounds the CMI of the original state.
    pub bound_original: f64,
    /// `δ log min{d_B, d_C} + 2κ(δ/2)`, bounds the CMI of the recovered state.
    pub bound_recovered: f64,
    /// `5 √δ log min{d_AB, d_C}`.
    pub simplified: f64,
}

/// CMI bounds implied by a recovery with trace-distance error `delta`.
pub fn fact2_cmi_bounds(delta: f64, d_ab: usize, d_b: usize, d_c: usize) -> Result<Fact2Bounds> {
    if !(0.0..=2.0 + 1e-12).contains(&delta) {
        return Err(Error::ParamsOutOfRange(format!("delta={delta}")));
    }
    let k = 2.0 * kappa(delta / 2.0);
    let l1 = (d_ab.min(d_c) as f64).log2();
    let l2 = (d_b.min(d_c) as f64).log2();
    Ok(Fact2Bounds {
        bound_original: delta * l1 + k,
        bound_recovered: delta * l2 + k,
        simplified: 5.0 * delta.sqrt() * l1.max(1.0),
    })
}

/// `log₂(d_A) ε + ε log₂(1/ε)`.
pub fn mi_from_trace_distance_bound(eps: f64, d_a: usize) -> f64 {
    if eps <= 0.0 {
        return 0.0;
    }
    (d_a as f64).log2() * eps + eps * (1.0 / eps).log2()
}

/// Pinsker: `½‖ρ_AC − ρ_A⊗ρ_C‖₁ ≤ √((ln 2 / 2) I(A:C))` with `I` in bits.
pub fn pinsker_bound(mi_bits: f64) -> f64 {
    (std::f64::consts::LN_2 / 2.0 * mi_bits.max(0.0)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::Register;

    #[test]
    fn maximally_mixed_entropy() {
        let rho = DensityMatrix::maximally_mixed(Register::qubits(3));
        assert!((von_neumann_entropy(&rho) - 3.0).abs() < 1e-12);
        let p = DensityMatrix::basis(Register::qubits(2), 2);
        assert!(von_neumann_entropy(&p).abs() < 1e-12);
    }

    #[test]
    fn fact2_endpoints() {
        let b = fact2_cmi_bounds(0.0, 4, 2, 2).unwrap();
        assert_eq!(b.bound_original, 0.0);
        assert_eq!(b.bound_recovered, 0.0);
        let b = fact2_cmi_bounds(2.0, 2, 2, 2).unwrap();
        assert!(b.simplified >= b.bound_original);
        assert!((b.simplified - 5.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn envelope_plug_in() {
        assert_eq!(mi_from_trace_distance_bound(0.0, 2), 0.0);
        assert!((mi_from_trace_distance_bound(1.0, 2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn divergence_params_checked() {
        assert!(DivergenceParams::new(1.0, 1.0).is_err());
        assert!(DivergenceParams::new(2.0, 0.0).is_err());
        assert!(DivergenceParams::new(0.5, 2.0).is_ok());
    }
}
