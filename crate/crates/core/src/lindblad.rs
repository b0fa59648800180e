//! Detailed-balanced Lindbladians: Davies generators, spectral gaps, relaxation and
//! the detectability-lemma recovery tower for commuting Hamiltonians.
//!
//! Superoperators act on column-stacked vectors, `vec(AXB) = (Bᵀ ⊗ A) vec(X)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{self, KrausInstrument};
use crate::error::{Error, Result};
use crate::fit::{self, LinearFit};
use crate::info::{self, DivergenceParams};
use crate::linalg::{self, cr, CMatrix};
use crate::states::{embed_operator, DensityMatrix, Region, Register, SiteLayout};

pub const MAX_LINDBLAD_DIM: usize = 32;
pub const BALANCE_TOL: f64 = 1e-8;
pub const BOHR_MERGE_TOL: f64 = 1e-9;
pub const KERNEL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BalanceKind {
    Gns,
    Kms,
}

#[derive(Clone, Debug)]
pub struct Jump {
    pub op: CMatrix,
    /// Energy raised by the jump.
    pub omega: f64,
    pub rate: f64,
    /// Index of the coupling it came from.
    pub term: usize,
}

#[derive(Clone, Debug)]
pub struct LindbladModel {
    pub register: Register,
    pub hamiltonian: CMatrix,
    pub beta: f64,
    pub jumps: Vec<Jump>,
    pub balance: BalanceKind,
    /// Full generator.
    pub superop: CMatrix,
    /// Generator of each coupling separately.
    pub local: Vec<CMatrix>,
    /// Sites touched by each local generator.
    pub local_supports: Vec<Region>,
    pub steady: DensityMatrix,
    pub gap: f64,
    /// Number of Bohr frequencies merged because they lay within `1e−9`.
    pub merged_frequencies: usize,
    pub commuting: bool,
}

fn spre(a: &CMatrix) -> CMatrix {
    linalg::kron(&linalg::identity(a.nrows()), a)
}

fn spost(b: &CMatrix) -> CMatrix {
    linalg::kron(&b.transpose(), &linalg::identity(b.nrows()))
}

/// `J X J† − ½{J†J, X}` as a superoperator.
pub fn dissipator(j: &CMatrix) -> CMatrix {
    let jdj = j.adjoint() * j;
    linalg::kron(&j.map(|z| z.conj()), j) - spre(&jdj).scale(0.5) - spost(&jdj).scale(0.5)
}

/// GNS weight `Γ(X) = Xρ`.
pub fn gamma_gns(rho: &CMatrix) -> CMatrix {
    spost(rho)
}

/// KMS weight `Γ(X) = ρ^{1/2} X ρ^{1/2}`.
pub fn gamma_kms(rho: &CMatrix) -> Result<CMatrix> {
    let h = linalg::matrix_power_on_support(rho, 0.5)?;
    Ok(spre(&h) * spost(&h))
}

/// `‖LΓ − ΓL†‖₂ / ‖L‖₂`.
pub fn balance_residual(l: &CMatrix, gamma: &CMatrix) -> f64 {
    let n = linalg::frobenius(l).max(1e-300);
    linalg::frobenius(&(l * gamma - gamma * l.adjoint())) / n
}

/// Sites on which `op` acts non-trivially.
pub fn operator_support(reg: &Register, op: &CMatrix) -> Region {
    let dims = reg.site_dims();
    let mut sites = Vec::new();
    for s in 0..reg.n_sites() {
        let lay = SiteLayout::new(dims, &(0..reg.n_sites()).filter(|&i| i != s).collect::<Vec<_>>());
        let reduced = lay.trace_rest(op).unscale(dims[s] as f64);
        let back = lay.embed(&reduced);
        if linalg::max_abs_diff(&back, op) > 1e-12 {
            sites.push(s);
        }
    }
    Region::from_positions(&sites)
}

/// Davies generator with jumps `S(ω)` of each coupling at rates `e^{−βω/2}`.
///
/// `terms` are the local pieces of the Hamiltonian; they are only used to decide
/// whether the model is commuting.
pub fn davies_generator(
    reg: &Register,
    terms: &[CMatrix],
    couplings: &[(Region, CMatrix)],
    beta: f64,
) -> Result<LindbladModel> {
    let d = reg.dim();
    if d > MAX_LINDBLAD_DIM {
        return Err(Error::DimensionCap {
            dim: d,
            cap: MAX_LINDBLAD_DIM,
        });
    }
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::ParamsOutOfRange(format!("beta={beta}")));
    }
    let h = terms.iter().fold(linalg::zeros(d, d), |acc, t| acc + t);
    let sp = linalg::hermitian_eig(&h)?;
    let e = &sp.values;
    let v = &sp.vectors;
    let mut jumps = Vec::new();
    let mut merged = 0;
    for (ti, (region, op)) in couplings.iter().enumerate() {
        let s = embed_operator(op, reg, region);
        let sd = v.adjoint() * s * v;
        let mut comps: Vec<(f64, CMatrix)> = Vec::new();
        for a in 0..d {
            for b in 0..d {
                if sd[(a, b)].norm() < 1e-14 {
                    continue;
                }
                let w = e[a] - e[b];
                let slot = comps.iter().position(|(k, _)| (k - w).abs() < BOHR_MERGE_TOL);
                let idx = match slot {
                    Some(i) => {
                        if comps[i].0 != w {
                            merged += 1;
                        }
                        i
                    }
                    None => {
                        comps.push((w, linalg::zeros(d, d)));
                        comps.len() - 1
                    }
                };
                comps[idx].1[(a, b)] += sd[(a, b)];
            }
        }
        for (w, ad) in comps {
            jumps.push(Jump {
                op: v * ad * v.adjoint(),
                omega: w,
                rate: (-beta * w / 2.0).exp(),
                term: ti,
            });
        }
    }
    let steady = crate::models::gibbs_state(reg, &h, beta)?;
    let mut local = vec![linalg::zeros(d * d, d * d); couplings.len()];
    let mut supports = vec![Region::empty(); couplings.len()];
    for j in &jumps {
        local[j.term] += dissipator(&j.op).scale(j.rate);
        supports[j.term] = supports[j.term].union(&operator_support(reg, &j.op));
    }
    let superop = local.iter().fold(linalg::zeros(d * d, d * d), |acc, l| acc + l);
    let commuting = terms.iter().enumerate().all(|(i, a)| {
        terms[i + 1..]
            .iter()
            .all(|b| linalg::frobenius(&(a * b - b * a)) < 1e-10)
    });
    let mut model = LindbladModel {
        register: reg.clone(),
        hamiltonian: h,
        beta,
        jumps,
        balance: BalanceKind::Gns,
        superop,
        local,
        local_supports: supports,
        steady,
        gap: 0.0,
        merged_frequencies: merged,
        commuting,
    };
    model.gap = spectral_gap(&model)?.symmetrized;
    Ok(model)
}

/// Davies model of the commuting Ising chain with `X_i` couplings on every site.
pub fn ising_davies(n: usize, j: f64, h: f64, beta: f64) -> Result<LindbladModel> {
    let reg = Register::qubits(n);
    let terms = crate::models::commuting_ising_terms(n, j, h);
    let couplings: Vec<(Region, CMatrix)> = (0..n)
        .map(|i| (Region::from_positions(&[i]), linalg::pauli('X')))
        .collect();
    davies_generator(&reg, &terms, &couplings, beta)
}

/// Purely dissipative model from explicit jump operators, with `Gibbs(H, β)` as the
/// reference state.
pub fn custom_model(reg: &Register, h: &CMatrix, beta: f64, jumps: &[CMatrix]) -> Result<LindbladModel> {
    let d = reg.dim();
    if d > MAX_LINDBLAD_DIM {
        return Err(Error::DimensionCap {
            dim: d,
            cap: MAX_LINDBLAD_DIM,
        });
    }
    let superop = jumps.iter().fold(linalg::zeros(d * d, d * d), |acc, j| acc + dissipator(j));
    let steady = crate::models::gibbs_state(reg, h, beta)?;
    let mut model = LindbladModel {
        register: reg.clone(),
        hamiltonian: h.clone(),
        beta,
        jumps: jumps
            .iter()
            .map(|j| Jump {
                op: j.clone(),
                omega: 0.0,
                rate: 1.0,
                term: 0,
            })
            .collect(),
        balance: BalanceKind::Gns,
        local: vec![superop.clone()],
        local_supports: vec![reg.all()],
        superop,
        steady,
        gap: 0.0,
        merged_frequencies: 0,
        commuting: true,
    };
    model.gap = spectral_gap(&model)?.symmetrized;
    Ok(model)
}

impl LindbladModel {
    pub fn dim(&self) -> usize {
        self.register.dim()
    }

    pub fn gns_residual(&self) -> f64 {
        balance_residual(&self.superop, &gamma_gns(self.steady.matrix()))
    }

    pub fn kms_residual(&self) -> Result<f64> {
        Ok(balance_residual(&self.superop, &gamma_kms(self.steady.matrix())?))
    }

    /// `‖L vec(ρ)‖₂`.
    pub fn steady_residual(&self) -> f64 {
        let v = &self.superop * linalg::vec_col(self.steady.matrix());
        v.norm()
    }

    /// Normalized kernel vector of `L`, independent of the stored Gibbs state.
    pub fn kernel_state(&self) -> Result<DensityMatrix> {
        let x = self.symmetrized(&self.superop)?;
        let sp = linalg::hermitian_eig(&x)?;
        let (g, _) = self.gamma_roots()?;
        let k = (0..sp.dim())
            .min_by(|&i, &j| sp.values[i].abs().total_cmp(&sp.values[j].abs()))
            .expect("non-empty spectrum");
        let v = g * sp.vectors.column(k);
        let m = linalg::unvec_col(&v, self.dim());
        let tr = linalg::trace(&m);
        DensityMatrix::new(self.register.clone(), linalg::hermitian_part(&(m / tr)))
    }

    /// `(G^{1/2}, G^{−1/2})` for the GNS weight.
    fn gamma_roots(&self) -> Result<(CMatrix, CMatrix)> {
        let d = self.dim();
        let rt = linalg::matrix_power_on_support(self.steady.matrix(), 0.5)?;
        let irt = linalg::matrix_power_on_support(self.steady.matrix(), -0.5)?;
        let id = linalg::identity(d);
        Ok((linalg::kron(&rt.transpose(), &id), linalg::kron(&irt.transpose(), &id)))
    }

    /// `G^{−1/2} L G^{1/2}`, Hermitian under detailed balance.
    fn symmetrized(&self, l: &CMatrix) -> Result<CMatrix> {
        let (g, gi) = self.gamma_roots()?;
        let x = &gi * l * &g;
        let res = linalg::anti_hermitian_residual(&x) / linalg::frobenius(&x).max(1e-300);
        if res > BALANCE_TOL {
            return Err(Error::NotDetailedBalanced(res));
        }
        Ok(linalg::hermitian_part(&x))
    }

    /// Spectral decomposition `e^{Lt} = G^{1/2} V e^{Λt} V† G^{−1/2}`.
    fn propagator(&self, t: f64) -> Result<CMatrix> {
        let x = self.symmetrized(&self.superop)?;
        let sp = linalg::hermitian_eig(&x)?;
        let (g, gi) = self.gamma_roots()?;
        let e = sp.apply_all(|l| cr((l * t).exp()));
        Ok(g * e * gi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub symmetrized: f64,
    pub raw: f64,
}

/// Second-smallest eigenvalue of `−G^{−1/2} L G^{1/2}`, and the same quantity read
/// off the non-Hermitian spectrum of `L` via a Schur decomposition.
pub fn spectral_gap(model: &LindbladModel) -> Result<GapReport> {
    let x = model.symmetrized(&model.superop)?;
    let mut ev: Vec<f64> = linalg::eigenvalues_hermitian(&x).iter().map(|l| -l).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let symmetrized = ev.get(1).copied().unwrap_or(0.0);
    let scale = linalg::frobenius(&model.superop).max(1.0);
    let raw_ev = model
        .superop
        .clone()
        .schur()
        .eigenvalues()
        .ok_or(Error::Nonfinite)?;
    let mut re: Vec<f64> = raw_ev.iter().map(|z| -z.re).collect();
    re.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let raw = re
        .iter()
        .copied()
        .find(|&r| r > KERNEL_TOL * scale)
        .unwrap_or(0.0);
    Ok(GapReport { symmetrized, raw })
}

/// `e^{Lt}(ρ₀)`.
pub fn evolve(model: &LindbladModel, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    let p = model.propagator(t)?;
    let v = p * linalg::vec_col(rho0.matrix());
    let m = linalg::hermitian_part(&linalg::unvec_col(&v, model.dim()));
    Ok(DensityMatrix::trusted(rho0.register().clone(), m))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub times: Vec<f64>,
    pub errors: Vec<f64>,
    pub fit: Option<LinearFit>,
    pub fitted_rate: Option<f64>,
    pub gap: f64,
    pub rate_ok: bool,
    /// `2^{D₂(ρ₀‖ρ)/2}`, the relaxation prefactor.
    pub prefactor: f64,
    /// Smallest `K` with `error(t) ≤ K e^{−γt} · prefactor` on the grid.
    pub fitted_constant: f64,
}

/// Relaxation errors `‖e^{Lt}ρ₀ − ρ‖₁` on a time grid with a log-linear rate fit.
pub fn convergence_check(model: &LindbladModel, rho0: &DensityMatrix, times: &[f64]) -> Result<ConvergenceReport> {
    let (g, gi) = model.gamma_roots()?;
    let x = model.symmetrized(&model.superop)?;
    let sp = linalg::hermitian_eig(&x)?;
    let v0 = &gi * linalg::vec_col(rho0.matrix());
    let errors: Vec<f64> = times
        .par_iter()
        .map(|&t| {
            let e = sp.apply_all(|l| cr((l * t).exp()));
            let v = &g * (e * &v0);
            let m = linalg::hermitian_part(&linalg::unvec_col(&v, model.dim()));
            linalg::trace_norm_hermitian(&(m - model.steady.matrix()))
        })
        .collect();
    let fitres = fit::log_linear_fit(times, &errors, 1e-12, 3).ok().map(|(f, _)| f);
    let fitted_rate = fitres.map(|f| -f.slope);
    let prefactor = (1.0 + gns_prefactor_variance(rho0, &model.steady)?.0).sqrt();
    let fitted_constant = times
        .iter()
        .zip(&errors)
        .map(|(&t, &e)| e / ((-model.gap * t).exp() * prefactor))
        .fold(0.0, f64::max);
    Ok(ConvergenceReport {
        times: times.to_vec(),
        errors,
        fit: fitres,
        fitted_rate,
        gap: model.gap,
        rate_ok: fitted_rate.is_some_and(|r| r >= 0.9 * model.gap),
        prefactor,
        fitted_constant,
    })
}

/// `Var_ρ(ρ̃ρ⁻¹ − 1)` computed directly and as `2^{D₂(ρ̃‖ρ)} − 1`.
pub fn gns_prefactor_variance(rho_t: &DensityMatrix, rho: &DensityMatrix) -> Result<(f64, f64)> {
    let inv = linalg::matrix_power_on_support(rho.matrix(), -1.0)?;
    let d = rho.dim();
    let x = rho_t.matrix() * inv - linalg::identity(d);
    let r = rho.matrix();
    let direct = linalg::trace(&(&x * r * x.adjoint())).re - linalg::trace(&(r * &x)).norm_sqr();
    let d2 = info::alpha_z_divergence(rho_t, rho, DivergenceParams { alpha: 2.0, z: 1.0 })?;
    Ok((direct, d2.exp2() - 1.0))
}

/// `Tr(ρ O†O) − |Tr(ρO)|²`.
pub fn gns_variance(rho: &DensityMatrix, o: &CMatrix) -> f64 {
    let r = rho.matrix();
    linalg::trace(&(r * o.adjoint() * o)).re - linalg::trace(&(r * o)).norm_sqr()
}

/// `e^{L†t}(O)`.
pub fn heisenberg(model: &LindbladModel, o: &CMatrix, t: f64) -> Result<CMatrix> {
    let p = model.propagator(t)?;
    Ok(linalg::unvec_col(&(p.adjoint() * linalg::vec_col(o)), model.dim()))
}

/// `‖e^{βH/2} F e^{−βH/2}‖_∞`.
pub fn imaginary_time_dressing_norm(h: &CMatrix, f: &CMatrix, beta: f64) -> Result<f64> {
    let sp = linalg::hermitian_eig(h)?;
    let up = sp.apply_all(|l| cr((beta * l / 2.0).exp()));
    let dn = sp.apply_all(|l| cr((-beta * l / 2.0).exp()));
    Ok(linalg::operator_norm(&(up * f * dn)))
}

/// Kernel projectors of the local generators and the light-cone layering of the tower.
#[derive(Clone, Debug)]
pub struct DLRecovery {
    pub projectors: Vec<CMatrix>,
    pub supports: Vec<Region>,
    /// Projector indices applied in each sweep.
    pub layers: Vec<Vec<usize>>,
    pub depth: usize,
    pub light_cone: Region,
}

impl DLRecovery {
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        let d = x.nrows();
        let mut v = linalg::vec_col(x);
        for layer in &self.layers {
            for &i in layer {
                v = &self.projectors[i] * v;
            }
        }
        linalg::unvec_col(&v, d)
    }

    pub fn max_idempotence_residual(&self) -> f64 {
        self.projectors
            .iter()
            .map(|p| linalg::frobenius(&(p * p - p)))
            .fold(0.0, f64::max)
    }
}

/// Spectral projectors onto `ker L_i` and `m` sweeps grown from `A`.
pub fn dl_recovery(model: &LindbladModel, a: &Region, m: usize) -> Result<DLRecovery> {
    if !model.commuting {
        return Err(Error::NotCommuting);
    }
    let gamma = gamma_gns(model.steady.matrix());
    let (g, gi) = model.gamma_roots()?;
    let mut projectors = Vec::with_capacity(model.local.len());
    for l in &model.local {
        let res = balance_residual(l, &gamma);
        if res > BALANCE_TOL {
            return Err(Error::NotLocallyBalanced(res));
        }
        let x = linalg::hermitian_part(&(&gi * l * &g));
        let sp = linalg::hermitian_eig(&x)?;
        let scale = sp.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        let k = sp.apply_all(|l| if l.abs() <= KERNEL_TOL * scale { cr(1.0) } else { cr(0.0) });
        projectors.push(&g * k * &gi);
    }
    let mut region = a.clone();
    let mut layers = Vec::with_capacity(m);
    for _ in 0..m {
        let hit: Vec<usize> = (0..projectors.len())
            .filter(|&i| !model.local_supports[i].is_disjoint(&region))
            .collect();
        for &i in &hit {
            region = region.union(&model.local_supports[i]);
        }
        layers.push(hit);
    }
    Ok(DLRecovery {
        projectors,
        supports: model.local_supports.clone(),
        layers,
        depth: m,
        light_cone: region,
    })
}

/// `Σ_k p_k ‖R_m(σ_k) − ρ‖₁` for an instrument on `A` applied to the steady state.
pub fn detectability_recovery(model: &LindbladModel, a: &Region, m: usize, inst: &KrausInstrument) -> Result<f64> {
    if !inst.support().is_subset(a) {
        return Err(Error::SupportMismatch("instrument must act inside A".into()));
    }
    let rec = dl_recovery(model, a, m)?;
    let ens = channels::apply_instrument(&model.steady, inst)?;
    let rho = model.steady.matrix();
    Ok(ens
        .outcomes
        .iter()
        .map(|t| t.probability * linalg::trace_norm_hermitian(&(rec.apply(t.state.matrix()) - rho)))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;

    fn qubit_davies(beta: f64) -> LindbladModel {
        let reg = Register::qubits(1);
        let all = reg.all();
        davies_generator(&reg, &[pauli('Z')], &[(all, pauli('X'))], beta).unwrap()
    }

    #[test]
    fn infinite_temperature_steady_state() {
        let m = qubit_davies(0.0);
        assert!(linalg::max_abs_diff(m.steady.matrix(), &linalg::identity(2).scale(0.5)) < 1e-14);
        assert!(m.steady_residual() < 1e-12);
    }

    #[test]
    fn two_level_rates() {
        let m = qubit_davies(1.0);
        assert!(m.gns_residual() < 1e-10);
        let sum = (-1.0f64).exp() + 1.0f64.exp();
        let g = spectral_gap(&m).unwrap();
        assert!((g.symmetrized - sum / 2.0).abs() < 1e-10);
        assert!((g.raw - g.symmetrized).abs() < 1e-7);
    }

    #[test]
    fn dressing_of_commuting_operator() {
        let h = pauli('Z');
        let v = imaginary_time_dressing_norm(&h, &pauli('Z'), 2.0).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }
}
