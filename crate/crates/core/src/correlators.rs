//! The nonlinear correlator family `C_{p,q}(O, ρ) = ‖ρ^{p/2} O ρ^{q/2}‖_{2/(p+q)}`
//! and the operator-correlation norm.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, cr, CMatrix, HermitianSpectrum};
use crate::models;
use crate::states::{embed_operator, DensityMatrix, Region, RegionPartition, SiteLayout};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelatorParams {
    pub p: f64,
    pub q: f64,
}

impl CorrelatorParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        let ok = |x: f64| x > 0.0 && x <= 1.0;
        if !ok(p) || !ok(q) {
            return Err(Error::ParamsOutOfRange(format!("(p, q) = ({p}, {q})")));
        }
        Ok(CorrelatorParams { p, q })
    }

    /// `s = 1/(p+q)`.
    pub fn s(&self) -> f64 {
        1.0 / (self.p + self.q)
    }

    pub fn swapped(&self) -> CorrelatorParams {
        CorrelatorParams { p: self.q, q: self.p }
    }
}

/// Default scan grid `{0.25, 0.5, 0.75, 1}²`.
pub fn default_grid() -> Vec<CorrelatorParams> {
    let v = [0.25, 0.5, 0.75, 1.0];
    v.iter()
        .flat_map(|&p| v.iter().map(move |&q| CorrelatorParams { p, q }))
        .collect()
}

/// Spectrum of ρ reused across several correlator evaluations.
pub struct RhoPowers {
    sp: HermitianSpectrum,
}

impl RhoPowers {
    pub fn new(rho: &CMatrix) -> Result<Self> {
        Ok(RhoPowers {
            sp: linalg::psd_eig(rho)?,
        })
    }

    pub fn power(&self, r: f64) -> CMatrix {
        self.sp.apply_on_support(|l| cr(l.powf(r)))
    }

    pub fn cpq(&self, o: &CMatrix, params: CorrelatorParams) -> f64 {
        let a = self.power(params.p / 2.0);
        let b = if params.p == params.q { a.clone() } else { self.power(params.q / 2.0) };
        let m = a * o * b;
        linalg::schatten_from_singular(&linalg::singular_values(&m), 2.0 * params.s())
    }
}

/// `C_{p,q}(O, ρ)` with `O` on the full register of `rho`.
pub fn cpq(o: &CMatrix, rho: &DensityMatrix, params: CorrelatorParams) -> Result<f64> {
    if o.nrows() != rho.dim() || o.ncols() != rho.dim() {
        return Err(Error::SupportMismatch("operator does not match register".into()));
    }
    Ok(RhoPowers::new(rho.matrix())?.cpq(o, params))
}

/// `C_{p,q}` of an operator supported on `region`.
pub fn cpq_local(o: &CMatrix, region: &Region, rho: &DensityMatrix, params: CorrelatorParams) -> Result<f64> {
    cpq(&embed_operator(o, rho.register(), region), rho, params)
}

/// `F₁(O, ρ) = F(ρ, OρO†)`.
pub fn fidelity_correlator(o: &CMatrix, rho: &DensityMatrix) -> Result<f64> {
    cpq(o, rho, CorrelatorParams { p: 1.0, q: 1.0 })
}

/// `F_{1/2}(O, ρ) = [Tr(√ρ O √ρ O†)]^{1/2}`.
pub fn renyi1_correlator(o: &CMatrix, rho: &DensityMatrix) -> Result<f64> {
    cpq(o, rho, CorrelatorParams { p: 0.5, q: 0.5 })
}

/// `Tr(OρO†ρ) / Tr(ρ²)`.
pub fn renyi2_correlator(o: &CMatrix, rho: &DensityMatrix) -> Result<f64> {
    let r = rho.matrix();
    let num = linalg::trace(&(o * r * o.adjoint() * r)).re;
    Ok(num / rho.purity())
}

/// `‖ρ^{1/2} O ρ^{1/2}‖₂`, the Rényi-2 numerator before squaring.
pub fn renyi2_numerator_norm(o: &CMatrix, rho: &DensityMatrix) -> Result<f64> {
    let h = linalg::matrix_power_on_support(rho.matrix(), 0.5)?;
    Ok(linalg::frobenius(&(&h * o * &h)))
}

#[derive(Clone, Debug)]
pub struct CorrelationEstimate {
    pub value: f64,
    /// Witness pair `(O_A, O_C)` on the sub-registers of A and C.
    pub lower_witness: (CMatrix, CMatrix),
    /// `‖ρ_AC − ρ_A ⊗ ρ_C‖₁`.
    pub upper_envelope: f64,
    pub restarts: usize,
    pub iterations: usize,
}

const ALT_TOL: f64 = 1e-10;
const ALT_MAX_ITERS: usize = 200;

/// Polar factor `V U†` of `M = U Σ V†`, so that `Tr(M · VU†) = ‖M‖₁`.
fn dual_unitary(m: &CMatrix) -> (CMatrix, f64) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u");
    let vt = svd.v_t.expect("v_t");
    let val: f64 = svd.singular_values.iter().sum();
    (vt.adjoint() * u.adjoint(), val)
}

/// Lower bound on `sup |⟨O_A O_C⟩ − ⟨O_A⟩⟨O_C⟩|` over unit-norm operators by alternating
/// trace-norm dual updates from random Hermitian starts.
pub fn operator_correlation(
    rho: &DensityMatrix,
    a: &Region,
    c: &Region,
    restarts: usize,
    seed: u64,
) -> Result<CorrelationEstimate> {
    if !a.is_disjoint(c) {
        return Err(Error::RegionsOverlap);
    }
    let ac = a.union(c);
    let rho_ac = rho.partial_trace(&ac)?;
    let dims = rho_ac.register().site_dims().to_vec();
    let pa = a.positions_in(&ac);
    let pc = c.positions_in(&ac);
    let rho_a = rho.partial_trace(a)?;
    let rho_c = rho.partial_trace(c)?;
    let lay_a = SiteLayout::new(&dims, &pa);
    let lay_c = SiteLayout::new(&dims, &pc);
    // ρ_A ⊗ ρ_C in the A∪C ordering: embed each factor and multiply (they commute).
    let prod = lay_a.embed(rho_a.matrix()) * lay_c.embed(rho_c.matrix());
    let delta = rho_ac.matrix() - prod;
    let envelope = linalg::trace_norm_hermitian(&delta);
    let da = lay_a.d_sub;

    let run = |r: usize| -> (f64, CMatrix, CMatrix, usize) {
        let mut rng = models::rng(models::sub_seed(seed, r as u64));
        let mut oa = models::random_hermitian_unit(&mut rng, da);
        let mut oc;
        let mut prev = -1.0;
        let mut val;
        let mut it = 0;
        loop {
            it += 1;
            // M_C = Tr_A[Δ (O_A ⊗ 1)]
            let mc = lay_c.trace_rest(&lay_a.right_mul(&delta, &oa));
            let (u, _) = dual_unitary(&mc);
            oc = u;
            let ma = lay_a.trace_rest(&lay_c.right_mul(&delta, &oc));
            let (u, v) = dual_unitary(&ma);
            oa = u;
            val = v;
            if (val - prev).abs() < ALT_TOL || it >= ALT_MAX_ITERS {
                break;
            }
            prev = val;
        }
        (val, oa, oc, it)
    };
    let results: Vec<_> = (0..restarts.max(1)).into_par_iter().map(run).collect();
    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if r.0 > results[best].0 {
            best = i;
        }
    }
    let iterations = results.iter().map(|r| r.3).sum();
    let (_, oa, oc, _) = results.into_iter().nth(best).expect("one restart");
    // Certify by direct evaluation of the witness.
    let w = lay_a.embed(&oa) * lay_c.embed(&oc);
    let certified = linalg::hs_inner(&w.adjoint(), &delta).norm();
    Ok(CorrelationEstimate {
        value: certified,
        lower_witness: (oa, oc),
        upper_envelope: envelope,
        restarts: restarts.max(1),
        iterations,
    })
}

/// `C_{p,q}(O_A, ρ_AB) − C_{p,q}(O_A, ρ_ABC)`; for `p > q` the symmetric form with `O_A†` is used.
pub fn local_computability_defect(
    rho: &DensityMatrix,
    o_a: &CMatrix,
    part: &RegionPartition,
    params: CorrelatorParams,
) -> Result<f64> {
    let (o, params) = if params.p <= params.q {
        (o_a.clone(), params)
    } else {
        (o_a.adjoint(), params.swapped())
    };
    let a = part.get("A")?;
    let ab = a.union(&part.buffer()?);
    let rho_ab = rho.partial_trace(&ab)?;
    let a_in_ab = Region::from_positions(&a.positions_in(&ab));
    let c_ab = cpq_local(&o, &a_in_ab, &rho_ab, params)?;
    let c_abc = cpq_local(&o, a, rho, params)?;
    Ok(c_ab - c_abc)
}

/// `|C_{p,q}(O₁O₂, ρ) − C_{p,q}(O₁, ρ) C_{p,q}(O₂, ρ)|`.
pub fn cpq_clustering_defect(
    rho: &DensityMatrix,
    o1: &CMatrix,
    a1: &Region,
    o2: &CMatrix,
    a2: &Region,
    params: CorrelatorParams,
) -> Result<f64> {
    if !a1.is_disjoint(a2) {
        return Err(Error::RegionsOverlap);
    }
    let reg = rho.register();
    let e1 = embed_operator(o1, reg, a1);
    let e2 = embed_operator(o2, reg, a2);
    let rp = RhoPowers::new(rho.matrix())?;
    let joint = rp.cpq(&(&e1 * &e2), params);
    Ok((joint - rp.cpq(&e1, params) * rp.cpq(&e2, params)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, pauli};
    use crate::states::Register;

    #[test]
    fn identity_operator_gives_one() {
        let mut r = models::rng(5);
        let reg = Register::qubits(2);
        let rho = models::random_state(&mut r, &reg, None);
        for prm in default_grid() {
            assert!((cpq(&linalg::identity(4), &rho, prm).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn orthogonal_fidelity_correlator() {
        let rho = DensityMatrix::basis(Register::qubits(1), 0);
        assert!(fidelity_correlator(&pauli('X'), &rho).unwrap().abs() < 1e-12);
    }

    #[test]
    fn params_rejected_at_zero() {
        assert!(CorrelatorParams::new(0.0, 0.5).is_err());
        assert!(CorrelatorParams::new(0.5, 1.5).is_err());
    }

    #[test]
    fn dual_unitary_attains_trace_norm() {
        let mut r = models::rng(2);
        let m = models::ginibre(&mut r, 3, 3);
        let (u, v) = dual_unitary(&m);
        assert!((linalg::trace(&(&m * &u)).re - v).abs() < 1e-10);
        assert!(max_abs_diff(&(u.adjoint() * &u), &linalg::identity(3)) < 1e-10);
    }
}
