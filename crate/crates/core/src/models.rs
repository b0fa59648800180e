//! Fixture factory: named states, Hamiltonians, stabilizer states and seeded random objects.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::{ChannelMap, KrausInstrument};
use crate::error::{Error, Result};
use crate::linalg::{self, c, cr, CMatrix, CVector, C64};
use crate::states::{product_operator, DensityMatrix, Region, RegionPartition, Register};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derived seed for the `index`-th sample of a stream, independent of thread scheduling.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixtureSpec {
    pub name: String,
    pub n: usize,
    pub beta: Option<f64>,
    pub dims: Vec<usize>,
    pub seed: Option<u64>,
    pub provenance: String,
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub spec: FixtureSpec,
    pub state: DensityMatrix,
    pub partition: RegionPartition,
}

// ---------------------------------------------------------------- Hamiltonians

/// `H = −J Σ Z_i Z_{i+1} − h_x Σ X_i − h_z Σ Z_i` on an open chain.
pub fn ising_chain(n: usize, j: f64, hx: f64, hz: f64) -> CMatrix {
    let reg = Register::qubits(n);
    let d = reg.dim();
    let mut h = linalg::zeros(d, d);
    // Diagonal part directly from bit strings.
    for x in 0..d {
        let z = |i: usize| if (x >> (n - 1 - i)) & 1 == 0 { 1.0 } else { -1.0 };
        let mut e = 0.0;
        for i in 0..n.saturating_sub(1) {
            e -= j * z(i) * z(i + 1);
        }
        for i in 0..n {
            e -= hz * z(i);
        }
        h[(x, x)] = cr(e);
    }
    if hx != 0.0 {
        for x in 0..d {
            for i in 0..n {
                let y = x ^ (1 << (n - 1 - i));
                h[(y, x)] -= cr(hx);
            }
        }
    }
    h
}

/// Transverse-field Ising chain with `J = h = 1`.
pub fn tfim(n: usize) -> CMatrix {
    ising_chain(n, 1.0, 1.0, 0.0)
}

/// Classical (commuting) Ising chain `−J Σ ZZ − h Σ Z`.
pub fn commuting_ising(n: usize, j: f64, h: f64) -> CMatrix {
    ising_chain(n, j, 0.0, h)
}

/// Local terms `−J Z_i Z_{i+1}` and `−h Z_i` of the commuting chain, embedded.
pub fn commuting_ising_terms(n: usize, j: f64, h: f64) -> Vec<CMatrix> {
    let reg = Register::qubits(n);
    let z = linalg::pauli('Z');
    let mut terms = Vec::new();
    for i in 0..n.saturating_sub(1) {
        terms.push(product_operator(&reg, &[(i, z.clone()), (i + 1, z.clone())]).scale(-j));
    }
    for i in 0..n {
        terms.push(product_operator(&reg, &[(i, z.clone())]).scale(-h));
    }
    terms
}

/// `e^{−βH} / Z`.
pub fn gibbs_state(reg: &Register, h: &CMatrix, beta: f64) -> Result<DensityMatrix> {
    if !(beta >= 0.0) {
        return Err(Error::ParamsOutOfRange(format!("beta={beta}")));
    }
    let sp = linalg::hermitian_eig(h)?;
    let emin = sp.values.last().copied().unwrap_or(0.0);
    let m = sp.apply_all(|e| cr((-beta * (e - emin)).exp()));
    DensityMatrix::from_unnormalized(reg.clone(), m)
}

/// `ln Z` for the open classical chain `−J Σ Z Z − h Σ Z` by transfer matrices.
pub fn transfer_matrix_log_partition(n: usize, j: f64, h: f64, beta: f64) -> f64 {
    let s = [1.0, -1.0];
    let mut v = [(beta * h * s[0]).exp(), (beta * h * s[1]).exp()];
    for _ in 1..n {
        let mut w = [0.0; 2];
        for (b, wb) in w.iter_mut().enumerate() {
            for a in 0..2 {
                *wb += v[a] * (beta * j * s[a] * s[b]).exp();
            }
            *wb *= (beta * h * s[b]).exp();
        }
        v = w;
    }
    (v[0] + v[1]).ln()
}

// ---------------------------------------------------------------- named states

/// Coherent `(|0…0⟩ + |1…1⟩)/√2` or incoherent `½(|0…0⟩⟨0…0| + |1…1⟩⟨1…1|)`.
pub fn cat_state(n: usize, coherent: bool) -> DensityMatrix {
    let reg = Register::qubits(n);
    let d = reg.dim();
    if coherent {
        let mut v = CVector::zeros(d);
        v[0] = cr(std::f64::consts::FRAC_1_SQRT_2);
        v[d - 1] = cr(std::f64::consts::FRAC_1_SQRT_2);
        DensityMatrix::pure(reg, &v).expect("cat state")
    } else {
        let mut diag = vec![0.0; d];
        diag[0] = 0.5;
        diag[d - 1] = 0.5;
        DensityMatrix::new(reg, linalg::real_diag(&diag)).expect("cat state")
    }
}

pub fn ghz(n: usize) -> DensityMatrix {
    cat_state(n, true)
}

/// Diagonal state from integer weights over a common denominator.
fn rational_diagonal(reg: Register, weights: &[u64], denom: u64) -> DensityMatrix {
    let diag: Vec<f64> = weights.iter().map(|&w| w as f64 / denom as f64).collect();
    DensityMatrix::new(reg, linalg::real_diag(&diag)).expect("rational fixture")
}

/// Uniform mixture over even-parity bit strings on `n` qubits.
pub fn parity_state(n: usize) -> DensityMatrix {
    let d = 1usize << n;
    let w: Vec<u64> = (0..d).map(|x| u64::from(x.count_ones() % 2 == 0)).collect();
    rational_diagonal(Register::qubits(n), &w, (d / 2) as u64)
}

/// `½|0⟩⟨0| ⊗ 1/2^{n−1} + ½|1⟩⟨1| ⊗ ρ_parity`.
pub fn e1_state(n: usize) -> Result<DensityMatrix> {
    if n < 3 {
        return Err(Error::ParamsOutOfRange("E1 needs n ≥ 3".into()));
    }
    let d = 1usize << n;
    let half = d >> 1;
    let w: Vec<u64> = (0..d)
        .map(|x| {
            if x < half {
                1
            } else if (x - half).count_ones().is_multiple_of(2) {
                2
            } else {
                0
            }
        })
        .collect();
    Ok(rational_diagonal(Register::qubits(n), &w, d as u64))
}

/// Qubit–qutrit–qubit state with `I(A:C) = I(A:C|B) = 0`.
pub fn e3_state() -> DensityMatrix {
    let reg = Register::chain(&[2, 3, 2]).expect("E3 register");
    let idx = |a: usize, b: usize, cc: usize| a * 6 + b * 2 + cc;
    // Entries over denominator 4.
    let mut m = linalg::zeros(12, 12);
    for (i, j) in [(idx(0, 0, 0), idx(0, 0, 0)), (idx(0, 0, 0), idx(0, 1, 1)), (idx(0, 1, 1), idx(0, 0, 0)), (idx(0, 1, 1), idx(0, 1, 1))] {
        m[(i, j)] = cr(1.0 / 4.0);
    }
    m[(idx(1, 2, 0), idx(1, 2, 0))] = cr(1.0 / 4.0);
    m[(idx(1, 2, 1), idx(1, 2, 1))] = cr(1.0 / 4.0);
    DensityMatrix::new(reg, m).expect("E3 state")
}

/// `(1/16)(1 + ½(Z₁Z₂ + Z₃Z₄))`.
pub fn e4_state() -> DensityMatrix {
    let w: Vec<u64> = (0..16u32)
        .map(|x| {
            let z = |i: u32| if (x >> (3 - i)) & 1 == 0 { 1i64 } else { -1 };
            (2 + z(0) * z(1) + z(2) * z(3)) as u64
        })
        .collect();
    rational_diagonal(Register::qubits(4), &w, 32)
}

/// Paper counterexamples with their natural partitions.
pub fn counterexample(name: &str, n: usize) -> Result<Fixture> {
    let (state, partition, prov, n_eff) = match name {
        "E1" => {
            let s = e1_state(n)?;
            let reg = s.register().clone();
            let a: Vec<usize> = (0..n - 1).collect();
            let p = RegionPartition::new(
                &reg,
                vec![("A", reg.region(&a)?), ("B", Region::empty()), ("C", reg.region(&[n - 1])?)],
            )?;
            (s, p, "zero MI but not locally implementable", n)
        }
        "E2" => {
            if n < 3 {
                return Err(Error::ParamsOutOfRange("E2 needs n ≥ 3".into()));
            }
            let s = parity_state(n);
            let reg = s.register().clone();
            let c: Vec<usize> = (2..n).collect();
            let p = RegionPartition::abc(&reg, &[0], &[1], &c)?;
            (s, p, "nonzero CMI but locally implementable", n)
        }
        "E3" => {
            let s = e3_state();
            let reg = s.register().clone();
            let p = RegionPartition::abc(&reg, &[0], &[1], &[2])?;
            (s, p, "zero MI and CMI but not locally recoverable", 3)
        }
        "E4" => {
            let s = e4_state();
            let reg = s.register().clone();
            let p = RegionPartition::abc(&reg, &[0], &[1, 2], &[3])?;
            (s, p, "non-Markov but zero MI in canonical purification", 4)
        }
        other => return Err(Error::BadName(other.to_string())),
    };
    let dims = state.register().site_dims().to_vec();
    Ok(Fixture {
        spec: FixtureSpec {
            name: name.to_string(),
            n: n_eff,
            beta: None,
            dims,
            seed: None,
            provenance: prov.to_string(),
        },
        state,
        partition,
    })
}

/// Explicit two-site channel reproducing `KρK†/p` on the parity state, for `K` on qubit 0.
///
/// Measures qubits 0 and 1 in the computational basis and prepares
/// `τ_0 ∝ |α0⟩⟨α0| + |β1⟩⟨β1|` on even parity, `τ_1 ∝ |α1⟩⟨α1| + |β0⟩⟨β0|` on odd,
/// with `|α⟩ = K|0⟩`, `|β⟩ = K|1⟩`.
pub fn parity_reset_channel(k: &CMatrix) -> Result<ChannelMap> {
    let alpha = k.column(0).into_owned();
    let beta = k.column(1).into_owned();
    let norm = alpha.norm_squared() + beta.norm_squared();
    if norm <= 0.0 {
        return Err(Error::ParamsOutOfRange("zero Kraus operator".into()));
    }
    let e0 = linalg::ket(2, 0);
    let e1 = linalg::ket(2, 1);
    let kron_v = |a: &CVector, b: &CVector| -> CVector {
        CVector::from_iterator(4, (0..4).map(|i| a[i / 2] * b[i % 2]))
    };
    let tau = |first: &CVector, second: &CVector| -> CMatrix {
        (linalg::projector(first) + linalg::projector(second)).unscale(norm)
    };
    let tau0 = tau(&kron_v(&alpha, &e0), &kron_v(&beta, &e1));
    let tau1 = tau(&kron_v(&alpha, &e1), &kron_v(&beta, &e0));
    let mut ops = Vec::new();
    for x in 0..4usize {
        let t = if x.count_ones() % 2 == 0 { &tau0 } else { &tau1 };
        let sp = linalg::psd_eig(t)?;
        for (j, &mu) in sp.values.iter().enumerate() {
            if !sp.support_mask[j] {
                continue;
            }
            let v = sp.vectors.column(j).into_owned();
            let bra = linalg::ket(4, x);
            ops.push((v * bra.adjoint()).scale(mu.sqrt()));
        }
    }
    Ok(ChannelMap::kraus(Region::range(0..2), ops))
}

// ---------------------------------------------------------------- stabilizers

/// Pauli string with sign, e.g. `"-XZI"`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliString {
    pub negative: bool,
    pub x: Vec<bool>,
    pub z: Vec<bool>,
}

impl PauliString {
    pub fn parse(s: &str) -> Result<PauliString> {
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let mut x = Vec::new();
        let mut z = Vec::new();
        for ch in body.chars() {
            let (a, b) = match ch {
                'I' => (false, false),
                'X' => (true, false),
                'Y' => (true, true),
                'Z' => (false, true),
                _ => return Err(Error::Parse(format!("bad Pauli letter {ch}"))),
            };
            x.push(a);
            z.push(b);
        }
        if x.is_empty() {
            return Err(Error::Parse("empty Pauli string".into()));
        }
        Ok(PauliString { negative, x, z })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn letters(&self) -> String {
        let body: String = self
            .x
            .iter()
            .zip(&self.z)
            .map(|(&a, &b)| match (a, b) {
                (false, false) => 'I',
                (true, false) => 'X',
                (true, true) => 'Y',
                (false, true) => 'Z',
            })
            .collect();
        if self.negative {
            format!("-{body}")
        } else {
            body
        }
    }

    pub fn commutes_with(&self, o: &PauliString) -> bool {
        let s = (0..self.n())
            .filter(|&i| (self.x[i] && o.z[i]) ^ (self.z[i] && o.x[i]))
            .count();
        s % 2 == 0
    }

    pub fn matrix(&self) -> CMatrix {
        let reg = Register::qubits(self.n());
        let ops: Vec<(usize, CMatrix)> = (0..self.n())
            .map(|i| {
                let l = match (self.x[i], self.z[i]) {
                    (false, false) => 'I',
                    (true, false) => 'X',
                    (true, true) => 'Y',
                    (false, true) => 'Z',
                };
                (i, linalg::pauli(l))
            })
            .collect();
        let m = product_operator(&reg, &ops);
        if self.negative {
            -m
        } else {
            m
        }
    }
}

fn gf2_rank(rows: &[Vec<bool>]) -> usize {
    let mut m: Vec<Vec<bool>> = rows.to_vec();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for col in 0..cols {
        if let Some(p) = (rank..m.len()).find(|&r| m[r][col]) {
            m.swap(rank, p);
            for r in 0..m.len() {
                if r != rank && m[r][col] {
                    let pivot = m[rank].clone();
                    for (a, b) in m[r].iter_mut().zip(pivot) {
                        *a ^= b;
                    }
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Maximally mixed state on a stabilizer code space. Only constructible through
/// `stabilizer_state`, so stabilizer-specific routines can require it by type.
#[derive(Clone, Debug)]
pub struct StabilizerState {
    generators: Vec<PauliString>,
    state: DensityMatrix,
}

impl StabilizerState {
    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }
}

/// `ρ ∝ Π_j (1 + g_j)/2`.
pub fn stabilizer_state(generators: &[&str]) -> Result<StabilizerState> {
    let gens: Vec<PauliString> = generators.iter().map(|s| PauliString::parse(s)).collect::<Result<_>>()?;
    stabilizer_state_from(gens)
}

pub fn stabilizer_state_from(gens: Vec<PauliString>) -> Result<StabilizerState> {
    let n = gens.first().map(|g| g.n()).ok_or_else(|| Error::NonCommutingGenerators("no generators".into()))?;
    if gens.iter().any(|g| g.n() != n) {
        return Err(Error::NonCommutingGenerators("generators act on different qubit counts".into()));
    }
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            if !gens[i].commutes_with(&gens[j]) {
                return Err(Error::NonCommutingGenerators(format!(
                    "{} and {} anticommute",
                    gens[i].letters(),
                    gens[j].letters()
                )));
            }
        }
    }
    let rows: Vec<Vec<bool>> = gens.iter().map(|g| g.x.iter().chain(&g.z).copied().collect()).collect();
    if gf2_rank(&rows) != gens.len() {
        return Err(Error::NonCommutingGenerators("generators are dependent".into()));
    }
    let reg = Register::qubits(n);
    let d = reg.dim();
    let id = linalg::identity(d);
    let mut p = id.clone();
    for g in &gens {
        p *= (&id + g.matrix()).scale(0.5);
    }
    let tr = linalg::trace(&p).re;
    if tr < 0.5 {
        // Independent commuting generators with a sign clash, e.g. {Z, -Z} style products.
        return Err(Error::NonCommutingGenerators("empty code space".into()));
    }
    let state = DensityMatrix::new(reg, linalg::hermitian_part(&p).unscale(tr))?;
    Ok(StabilizerState { generators: gens, state })
}

/// Random independent commuting generators with random signs.
pub fn random_stabilizer_group(rng: &mut Rng64, n: usize, k: usize) -> StabilizerState {
    let k = k.min(n);
    loop {
        let mut gens: Vec<PauliString> = Vec::new();
        let mut tries = 0;
        while gens.len() < k && tries < 1000 {
            tries += 1;
            let g = PauliString {
                negative: rng.random_bool(0.5),
                x: (0..n).map(|_| rng.random_bool(0.5)).collect(),
                z: (0..n).map(|_| rng.random_bool(0.5)).collect(),
            };
            if g.x.iter().chain(&g.z).all(|b| !b) {
                continue;
            }
            if !gens.iter().all(|h| h.commutes_with(&g)) {
                continue;
            }
            let mut rows: Vec<Vec<bool>> = gens.iter().map(|h| h.x.iter().chain(&h.z).copied().collect()).collect();
            rows.push(g.x.iter().chain(&g.z).copied().collect());
            if gf2_rank(&rows) != rows.len() {
                continue;
            }
            gens.push(g);
        }
        if gens.len() == k {
            if let Ok(s) = stabilizer_state_from(gens) {
                return s;
            }
        }
    }
}

// ---------------------------------------------------------------- random objects

pub fn gaussian_c(rng: &mut Rng64) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

pub fn ginibre(rng: &mut Rng64, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| gaussian_c(rng))
}

/// Ginibre ensemble `G G† / Tr`, rank `rank`.
pub fn random_density_matrix(rng: &mut Rng64, d: usize, rank: usize) -> CMatrix {
    let g = ginibre(rng, d, rank.max(1));
    let m = &g * g.adjoint();
    let tr = linalg::trace(&m).re;
    m.unscale(tr)
}

pub fn random_state(rng: &mut Rng64, reg: &Register, rank: Option<usize>) -> DensityMatrix {
    let d = reg.dim();
    DensityMatrix::trusted(reg.clone(), random_density_matrix(rng, d, rank.unwrap_or(d)))
}

pub fn random_pure_vector(rng: &mut Rng64, d: usize) -> CVector {
    let v = CVector::from_fn(d, |_, _| gaussian_c(rng));
    let n = v.norm();
    v.unscale(n)
}

/// Haar unitary: QR of a Ginibre matrix with the phases of `R`'s diagonal removed.
pub fn random_unitary(rng: &mut Rng64, d: usize) -> CMatrix {
    let g = ginibre(rng, d, d);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let ph = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { cr(1.0) };
        for i in 0..d {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Random Hermitian matrix with unit operator norm.
pub fn random_hermitian_unit(rng: &mut Rng64, d: usize) -> CMatrix {
    let g = ginibre(rng, d, d);
    let h = linalg::hermitian_part(&g);
    let n = linalg::operator_norm(&h);
    h.unscale(n)
}

/// `k` Kraus operators from the isometry of stacked Ginibre blocks.
pub fn random_kraus(rng: &mut Rng64, d: usize, k: usize) -> Vec<CMatrix> {
    let g = ginibre(rng, k * d, d);
    let q = g.qr().q();
    (0..k).map(|i| q.rows(i * d, d).into_owned()).collect()
}

pub fn random_instrument(rng: &mut Rng64, reg: &Register, support: Region, k: usize) -> KrausInstrument {
    let d = reg.dim_of(support.sites());
    KrausInstrument::new(reg, support, random_kraus(rng, d, k)).expect("isometry blocks are complete")
}

pub fn random_channel(rng: &mut Rng64, reg: &Register, support: Region, k: usize) -> ChannelMap {
    let d = reg.dim_of(support.sites());
    ChannelMap::kraus(support, random_kraus(rng, d, k))
}

// ---------------------------------------------------------------- Markov fixtures

/// Random exact quantum Markov chain on `dims = [d_A, d_B, d_C]`-style registers.
///
/// `variant % 3` selects `ρ_A ⊗ ρ_B ⊗ ρ_C`, `ρ_AB ⊗ ρ_C`, or the classical-conditional
/// state `Σ_b p_b ρ_A^b ⊗ |b⟩⟨b| ⊗ ρ_C^b`.
pub fn random_qmc(rng: &mut Rng64, d_a: usize, d_b: usize, d_c: usize, variant: usize) -> DensityMatrix {
    let reg = Register::chain(&[d_a, d_b, d_c]).expect("small register");
    let m = match variant % 3 {
        0 => {
            let a = random_density_matrix(rng, d_a, d_a);
            let b = random_density_matrix(rng, d_b, d_b);
            let cc = random_density_matrix(rng, d_c, d_c);
            linalg::kron_all(&[a, b, cc])
        }
        1 => {
            let ab = random_density_matrix(rng, d_a * d_b, d_a * d_b);
            let cc = random_density_matrix(rng, d_c, d_c);
            linalg::kron(&ab, &cc)
        }
        _ => {
            let w: Vec<f64> = (0..d_b).map(|_| rng.random::<f64>() + 0.05).collect();
            let tot: f64 = w.iter().sum();
            let mut m = linalg::zeros(d_a * d_b * d_c, d_a * d_b * d_c);
            for (b, wb) in w.iter().enumerate() {
                let a = random_density_matrix(rng, d_a, d_a);
                let cc = random_density_matrix(rng, d_c, d_c);
                m += linalg::kron_all(&[a, linalg::ket_bra(d_b, b, b), cc]).scale(wb / tot);
            }
            m
        }
    };
    DensityMatrix::trusted(reg, linalg::hermitian_part(&m))
}

/// Listing for the CLI.
pub fn fixture_registry() -> Vec<FixtureSpec> {
    let named = |name: &str, n: usize, dims: Vec<usize>, prov: &str| FixtureSpec {
        name: name.into(),
        n,
        beta: None,
        dims,
        seed: None,
        provenance: prov.into(),
    };
    vec![
        named("E1", 4, vec![2; 4], "zero MI but not locally implementable"),
        named("E2", 4, vec![2; 4], "nonzero CMI but locally implementable"),
        named("E3", 3, vec![2, 3, 2], "zero MI and CMI but not locally recoverable"),
        named("E4", 4, vec![2; 4], "non-Markov but zero MI in canonical purification"),
        named("cat-coherent", 4, vec![2; 4], "coherent cat state"),
        named("cat-incoherent", 4, vec![2; 4], "incoherent cat state"),
        FixtureSpec {
            name: "gibbs-tfim".into(),
            n: 8,
            beta: Some(0.3),
            dims: vec![2; 8],
            seed: None,
            provenance: "transverse-field Ising Gibbs chain, J = h = 1".into(),
        },
        FixtureSpec {
            name: "gibbs-commuting-ising".into(),
            n: 3,
            beta: Some(1.0),
            dims: vec![2; 3],
            seed: None,
            provenance: "classical Ising Gibbs chain, J = 1, h = 0.5".into(),
        },
        FixtureSpec {
            name: "random-qmc".into(),
            n: 3,
            beta: None,
            dims: vec![2, 2, 2],
            seed: Some(0),
            provenance: "random".into(),
        },
        FixtureSpec {
            name: "random-state".into(),
            n: 3,
            beta: None,
            dims: vec![2, 2, 2],
            seed: Some(0),
            provenance: "random".into(),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    #[test]
    fn gibbs_infinite_temperature() {
        let reg = Register::qubits(3);
        let g = gibbs_state(&reg, &tfim(3), 0.0).unwrap();
        assert!(max_abs_diff(g.matrix(), &linalg::identity(8).scale(0.125)) < 1e-14);
    }

    #[test]
    fn gibbs_single_qubit_closed_form() {
        let reg = Register::qubits(1);
        let g = gibbs_state(&reg, &linalg::pauli('Z'), 1.0).unwrap();
        let z = (-1f64).exp() + 1f64.exp();
        assert!((g.matrix()[(0, 0)].re - (-1f64).exp() / z).abs() < 1e-14);
        assert!((g.matrix()[(1, 1)].re - 1f64.exp() / z).abs() < 1e-14);
    }

    #[test]
    fn stabilizer_examples() {
        let s = stabilizer_state(&["ZZ"]).unwrap();
        assert!(max_abs_diff(s.state().matrix(), &linalg::real_diag(&[0.5, 0.0, 0.0, 0.5])) < 1e-15);
        let bell = stabilizer_state(&["XX", "ZZ"]).unwrap();
        let h = 0.5;
        let mut expect = linalg::zeros(4, 4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            expect[(i, j)] = cr(h);
        }
        assert!(max_abs_diff(bell.state().matrix(), &expect) < 1e-15);
        assert!(matches!(stabilizer_state(&["XI", "ZI"]), Err(Error::NonCommutingGenerators(_))));
        assert!(matches!(stabilizer_state(&["ZZ", "ZZ"]), Err(Error::NonCommutingGenerators(_))));
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut r = rng(3);
        let u = random_unitary(&mut r, 5);
        assert!(max_abs_diff(&(u.adjoint() * &u), &linalg::identity(5)) < 1e-12);
    }

    #[test]
    fn rank_one_ginibre_is_pure() {
        let mut r = rng(1);
        let s = random_state(&mut r, &Register::qubits(2), Some(1));
        assert!((s.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bad_fixture_name() {
        assert!(matches!(counterexample("E9", 4), Err(Error::BadName(_))));
    }
}
