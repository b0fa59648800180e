//! Named verification suites.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use locstab::channels::{self, KrausInstrument};
use locstab::correlators::{self, CorrelatorParams, RhoPowers};
use locstab::linalg::{self, CMatrix};
use locstab::models::{self, Rng64};
use locstab::states::{product_operator, DensityMatrix, Region, RegionPartition, Register};
use locstab::{fit, info, lindblad, markov, purification, stability};

use crate::{CheckRecord as C, CliError, Config, GroupResult, Result, SuiteResult};

const EXACT: f64 = 1e-9;
const FUZZ_SLACK: f64 = 1e-9;
const DISTANCE_SLACK: f64 = 1e-10;

type Group = fn(&Config) -> locstab::Result<GroupResult>;

fn groups_of(name: &str) -> Option<Vec<(&'static str, Group)>> {
    let g: Vec<(&'static str, Group)> = match name {
        "counterexamples" => vec![("e1", e1), ("e2", e2), ("e3", e3), ("e4", e4)],
        "cpq-properties" => vec![("cpq", cpq_properties), ("clustering", clustering), ("distances", distances)],
        "markov" => vec![("qmc", qmc_exactness), ("averaged-cmi", averaged_cmi), ("certify", certify)],
        "stability-scan" => vec![("scan", stability_scan), ("cat", cat_states)],
        "lindblad" => vec![("davies", davies), ("two-level", two_level)],
        "purification" => vec![("tfd", tfd), ("stabilizer", stabilizer), ("mirror", mirror)],
        _ => return None,
    };
    Some(g)
}

/// Runs suite `name`; `all` concatenates every suite in listing order.
pub fn run(name: &str, cfg: &Config) -> Result<SuiteResult> {
    let t0 = Instant::now();
    let names: Vec<&str> = if name == "all" {
        crate::SUITES.iter().copied().filter(|&s| s != "all").collect()
    } else {
        vec![name]
    };
    let mut groups = Vec::new();
    for n in &names {
        groups.extend(groups_of(n).ok_or_else(|| CliError::UnknownSuite(name.into()))?);
    }
    let results: Vec<GroupResult> = groups
        .par_iter()
        .map(|(gname, f)| {
            f(cfg).unwrap_or_else(|e| {
                let mut g = GroupResult::default();
                g.push(C::errored(gname, "group aborted", &e));
                g
            })
        })
        .collect();
    Ok(SuiteResult::from_groups(name, cfg.seed, results, t0.elapsed()))
}

fn region(reg: &Register, s: &[usize]) -> locstab::Result<Region> {
    Region::new(reg, s)
}

fn project(k: usize) -> CMatrix {
    linalg::ket_bra(2, k, k)
}

fn x_projectors() -> Vec<CMatrix> {
    let id = linalg::identity(2);
    let x = linalg::pauli('X');
    vec![(&id + &x).unscale(2.0), (&id - &x).unscale(2.0)]
}

fn random_rank_state(r: &mut Rng64, reg: &Register) -> DensityMatrix {
    let rank = 1 + r.random_range(0..reg.dim());
    models::random_state(r, reg, Some(rank))
}

fn random_pq(r: &mut Rng64) -> CorrelatorParams {
    CorrelatorParams {
        p: 1.0 - r.random::<f64>() * 0.99,
        q: 1.0 - r.random::<f64>() * 0.99,
    }
}

fn fmax(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

// ------------------------------------------------------------ counterexamples

fn e1(_: &Config) -> locstab::Result<GroupResult> {
    let n = 4;
    let fx = models::counterexample("E1", n)?;
    let rho = &fx.state;
    let reg = rho.register().clone();
    let a = fx.partition.get("A")?.clone();
    let c = fx.partition.get("C")?.clone();
    let post = KrausInstrument::new(&reg, region(&reg, &[0])?, vec![project(1)])?;
    let sigma = channels::apply_instrument(rho, &post)?.outcomes[0].state.clone();
    let target = linalg::identity(1 << (n - 1)).unscale((1 << (n - 1)) as f64);
    let mut marg = 0.0f64;
    for k in 1..n {
        let m = rho.partial_trace(&region(&reg, &[k])?.complement(&reg))?;
        marg = marg.max(linalg::max_abs_diff(m.matrix(), &target));
    }
    let mut g = GroupResult::default();
    let r = "E1: I(A1..A3:A4)";
    g.push(C::eq("e1.mi", r, info::mutual_information(rho, &a, &c)?, 0.5, EXACT));
    g.push(C::eq("e1.mi_postselected", r, info::mutual_information(&sigma, &a, &c)?, 1.0, EXACT));
    g.push(C::le("e1.marginal", "E1: Tr_k rho = I/8", marg, 1e-12));
    Ok(g)
}

fn e2(cfg: &Config) -> locstab::Result<GroupResult> {
    let rho = models::parity_state(4);
    let reg = rho.register().clone();
    let mut r = models::rng(models::sub_seed(cfg.seed, 2));
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let gm = models::ginibre(&mut r, 2, 2);
        let k = gm.unscale(linalg::operator_norm(&gm));
        let inst = KrausInstrument::new(&reg, region(&reg, &[0])?, vec![k.clone()])?;
        let phi = models::parity_reset_channel(&k)?;
        worst = worst.max(stability::postselection_error_with(&rho, &inst, 0, &phi)?);
    }
    let mut g = GroupResult::default();
    g.push(C::le("e2.parity_channel", "E2: two-site parity channel", worst, 1e-8));
    Ok(g)
}

fn e3(_: &Config) -> locstab::Result<GroupResult> {
    let fx = models::counterexample("E3", 3)?;
    let rho = &fx.state;
    let reg = rho.register().clone();
    let a = region(&reg, &[0])?;
    let c = region(&reg, &[2])?;
    let post = KrausInstrument::new(&reg, a.clone(), vec![project(1)])?;
    let ens = channels::apply_instrument(rho, &post)?;
    let sigma = &ens.outcomes[0].state;
    let part = RegionPartition::abbc(&reg, &[0], &[1], &[], &[2])?;
    let mut best = f64::INFINITY;
    for i in -20..=20 {
        let map = channels::stitch_then_recover_rotated(rho, &part, i as f64 * 0.25)?;
        best = best.min(map.apply_state(sigma).trace_distance(rho)?);
    }
    let mut g = GroupResult::default();
    g.push(C::eq("e3.mi", "E3: I(A:C)", info::mutual_information(rho, &a, &c)?, 0.0, EXACT));
    g.push(C::eq("e3.cmi", "E3: I(A:C|B)", info::cmi_of_partition(rho, &fx.partition)?, 0.0, EXACT));
    g.push(C::eq("e3.probability", "E3: postselection probability", ens.outcomes[0].probability, 0.5, 0.0));
    g.push(C::ge("e3.recovery_error", "E3: no recovery on AB", best, 0.1));
    Ok(g)
}

fn e4(_: &Config) -> locstab::Result<GroupResult> {
    let fx = models::counterexample("E4", 4)?;
    let rho = &fx.state;
    let reg = rho.register();
    let l3 = 3f64.log2();
    let ps = purification::canonical_purify(rho)?;
    let doubled = DensityMatrix::pure(ps.doubled().clone(), ps.vector())?;
    let a = region(reg, &[0])?;
    let c = region(reg, &[3])?;
    let mut g = GroupResult::default();
    g.push(C::eq("e4.s1234", "E4: S(1234)", info::entropy_of(rho, &reg.all())?, 3.5, EXACT));
    g.push(C::eq("e4.s23", "E4: S(23)", info::entropy_of(rho, &region(reg, &[1, 2])?)?, 2.0, EXACT));
    g.push(C::eq(
        "e4.s123",
        "E4: S(123)",
        info::entropy_of(rho, &region(reg, &[0, 1, 2])?)?,
        4.0 - 0.75 * l3,
        EXACT,
    ));
    g.push(C::eq(
        "e4.cmi",
        "E4: I(1:4|2,3)",
        info::cmi_of_partition(rho, &fx.partition)?,
        2.5 - 1.5 * l3,
        EXACT,
    ));
    g.push(C::eq(
        "e4.tfd_mi",
        "E4: I(AA':CC') on the purification",
        info::mutual_information(&doubled, &ps.paired(&a), &ps.paired(&c))?,
        0.0,
        EXACT,
    ));
    Ok(g)
}

// ------------------------------------------------------------- cpq-properties

const CPQ_CASES: usize = 1000;

fn cpq_case(prop: usize, seed: u64, i: usize, slack: f64) -> locstab::Result<bool> {
    let mut r = models::rng(models::sub_seed(seed ^ (0x70 + prop as u64), i as u64));
    let d = 2 + r.random_range(0..7);
    let reg = Register::chain(&[d])?;
    let ok = match prop {
        0 => {
            let rank = 1 + r.random_range(0..d - 1);
            let rho = models::random_state(&mut r, &reg, Some(rank));
            let p = linalg::psd_eig(rho.matrix())?.support_projector();
            let q = linalg::identity(d) - &p;
            let o_zero = &q * models::ginibre(&mut r, d, d) * &p;
            let o = models::ginibre(&mut r, d, d);
            let prm = random_pq(&mut r);
            let rp = RhoPowers::new(rho.matrix())?;
            rp.cpq(&o_zero, prm).abs() < slack && rp.cpq(&o, prm) > 0.0
        }
        1 => {
            let rho = random_rank_state(&mut r, &reg);
            let o = models::ginibre(&mut r, d, d);
            let rp = RhoPowers::new(rho.matrix())?;
            let grid = [0.2, 0.4, 0.6, 0.8, 1.0];
            let v = |a: usize, b: usize| rp.cpq(&o, CorrelatorParams { p: grid[a], q: grid[b] });
            (0..5).all(|a| {
                (0..5).all(|b| {
                    (a + 1 == 5 || v(a + 1, b) <= v(a, b) + slack) && (b + 1 == 5 || v(a, b + 1) <= v(a, b) + slack)
                })
            })
        }
        2 => {
            let rho = random_rank_state(&mut r, &reg);
            let o = models::ginibre(&mut r, d, d);
            let v = correlators::cpq(&o, &rho, random_pq(&mut r))?;
            let ev = linalg::trace(&(rho.matrix() * &o)).norm();
            ev <= v + slack && v <= linalg::operator_norm(&o) + slack
        }
        3 => {
            let rho = random_rank_state(&mut r, &reg);
            let o = models::ginibre(&mut r, d, d);
            let prm = random_pq(&mut r);
            (correlators::cpq(&o, &rho, prm)? - correlators::cpq(&o.adjoint(), &rho, prm.swapped())?).abs() <= slack
        }
        4 => {
            let (d1, d2) = [(2, 2), (2, 3), (3, 2), (2, 4), (4, 2)][r.random_range(0..5)];
            let r1 = random_rank_state(&mut r, &Register::chain(&[d1])?);
            let r2 = random_rank_state(&mut r, &Register::chain(&[d2])?);
            let o1 = models::ginibre(&mut r, d1, d1);
            let o2 = models::ginibre(&mut r, d2, d2);
            let o1 = o1.unscale(linalg::operator_norm(&o1));
            let o2 = o2.unscale(linalg::operator_norm(&o2));
            let prm = random_pq(&mut r);
            let joint = correlators::cpq(&linalg::kron(&o1, &o2), &r1.tensor(&r2)?, prm)?;
            (joint - correlators::cpq(&o1, &r1, prm)? * correlators::cpq(&o2, &r2, prm)?).abs() <= slack
        }
        5 => {
            let rho = random_rank_state(&mut r, &reg);
            let o = models::ginibre(&mut r, d, d);
            let rp = RhoPowers::new(rho.matrix())?;
            let a = random_pq(&mut r);
            let b = random_pq(&mut r);
            let th: f64 = r.random();
            let m = CorrelatorParams {
                p: (1.0 - th) * a.p + th * b.p,
                q: (1.0 - th) * a.q + th * b.q,
            };
            rp.cpq(&o, m) <= rp.cpq(&o, a).powf(1.0 - th) * rp.cpq(&o, b).powf(th) * (1.0 + slack) + 1e-300
        }
        _ => {
            let db = 2 + r.random_range(0..3);
            let reg2 = Register::chain(&[2, db])?;
            let rho = random_rank_state(&mut r, &reg2);
            let o = models::ginibre(&mut r, 2, 2);
            let a = region(&reg2, &[0])?;
            let k = 1 + r.random_range(0..4);
            let phi = models::random_channel(&mut r, &reg2, region(&reg2, &[1])?, k);
            let prm = random_pq(&mut r);
            let before = correlators::cpq_local(&o, &a, &rho, prm)?;
            correlators::cpq_local(&o, &a, &phi.apply_state(&rho), prm)? >= before - slack
        }
    };
    Ok(ok)
}

fn cpq_properties(cfg: &Config) -> locstab::Result<GroupResult> {
    let names = ["positivity", "monotonicity", "range", "symmetry", "multiplicativity", "log_convexity", "dpi"];
    let slack = cfg.slack(FUZZ_SLACK);
    let mut g = GroupResult::default();
    for (p, name) in names.iter().enumerate() {
        let oks: Vec<bool> = (0..CPQ_CASES)
            .into_par_iter()
            .map(|i| cpq_case(p, cfg.seed, i, slack))
            .collect::<locstab::Result<_>>()?;
        let v = oks.iter().filter(|&&b| !b).count();
        g.push(C::new(
            &format!("cpq.{name}"),
            "C_pq property violations per 1000 cases",
            crate::Relation::Eq,
            v as f64,
            0.0,
            0.0,
        ));
    }
    Ok(g)
}

fn clustering(cfg: &Config) -> locstab::Result<GroupResult> {
    let n = 8;
    let reg = Register::qubits(n);
    cfg_dim(cfg, reg.dim())?;
    let rho = models::gibbs_state(&reg, &models::tfim(n), 0.3)?;
    let rp = RhoPowers::new(rho.matrix())?;
    let prm = CorrelatorParams { p: 0.5, q: 0.5 };
    let x = linalg::pauli('X');
    let o1 = product_operator(&reg, &[(0, x.clone())]);
    let c1 = rp.cpq(&o1, prm);
    let defects: Vec<f64> = (1..n)
        .map(|j| {
            let o2 = product_operator(&reg, &[(j, x.clone())]);
            (rp.cpq(&(&o1 * &o2), prm) - c1 * rp.cpq(&o2, prm)).abs()
        })
        .collect();
    let increases = defects[..3].windows(2).filter(|w| w[1] >= w[0]).count();
    let mut g = GroupResult::default();
    g.push(C::eq(
        "clustering.monotone",
        "C_pq connected correlator, thermal Ising chain: non-decreasing steps over 3 distances",
        increases as f64,
        0.0,
        0.0,
    ));
    g.push(C::le(
        "clustering.far",
        "C_pq connected correlator at maximal separation",
        defects[n - 2],
        1e-3,
    ));
    let xs: Vec<f64> = (1..=3).map(|j| j as f64).collect();
    if let Ok((f, _)) = fit::log_linear_fit(&xs, &defects[..3], 1e-14, 3) {
        g.fit("clustering.decay_length", -1.0 / f.slope);
    }
    Ok(g)
}

fn cfg_dim(cfg: &Config, dim: usize) -> locstab::Result<()> {
    if dim > cfg.cap_dim {
        return Err(locstab::Error::DimensionCap { dim, cap: cfg.cap_dim });
    }
    Ok(())
}

fn distances(cfg: &Config) -> locstab::Result<GroupResult> {
    let s = cfg.slack(DISTANCE_SLACK);
    let shapes: [&[usize]; 7] = [&[4], &[6], &[2, 2], &[2, 3], &[3, 2], &[2, 4], &[4, 2]];
    let res: Vec<[bool; 4]> = (0..10_000usize)
        .into_par_iter()
        .map(|i| {
            let mut r = models::rng(models::sub_seed(cfg.seed ^ 0x12, i as u64));
            let reg = Register::chain(shapes[i % shapes.len()])?;
            let rho = random_rank_state(&mut r, &reg);
            let sigma = random_rank_state(&mut r, &reg);
            let t = rho.trace_distance(&sigma)?;
            let f = rho.fidelity(&sigma)?;
            let db = rho.bures_distance(&sigma)?;
            let fvg = 1.0 - f <= t / 2.0 + s && t / 2.0 <= (1.0 - f * f).max(0.0).sqrt() + s;
            let bures = t / 2.0 <= db + s && db <= t.sqrt() + s;
            let h = linalg::frobenius(
                &(linalg::matrix_power_on_support(rho.matrix(), 0.5)?
                    - linalg::matrix_power_on_support(sigma.matrix(), 0.5)?),
            );
            let two = db <= h + s && h <= 2f64.sqrt() * db + s;
            let pinsker = if reg.n_sites() == 2 {
                let a = region(&reg, &[0])?;
                let c = region(&reg, &[1])?;
                let est = correlators::operator_correlation(&rho, &a, &c, 1, i as u64)?;
                let mi = info::mutual_information(&rho, &a, &c)?;
                est.value <= est.upper_envelope + s && est.upper_envelope <= 2.0 * info::pinsker_bound(mi) + s
            } else {
                true
            };
            Ok([fvg, bures, two, pinsker])
        })
        .collect::<locstab::Result<_>>()?;
    let mut g = GroupResult::default();
    for (j, name) in ["fuchs_van_de_graaf", "bures_trace", "bures_two_norm", "pinsker_chain"].iter().enumerate() {
        let v = res.iter().filter(|x| !x[j]).count();
        g.push(C::eq(
            &format!("distance.{name}"),
            "distance inequality violations per 10000 pairs",
            v as f64,
            0.0,
            0.0,
        ));
    }
    Ok(g)
}

// --------------------------------------------------------------------- markov

fn qmc_exactness(cfg: &Config) -> locstab::Result<GroupResult> {
    let dims = [(2, 2, 2), (2, 3, 2), (3, 2, 2), (2, 2, 3)];
    let res: Vec<(f64, f64)> = (0..200usize)
        .into_par_iter()
        .map(|i| {
            let mut r = models::rng(models::sub_seed(cfg.seed ^ 0x55, i as u64));
            let (da, db, dc) = dims[i % dims.len()];
            let rho = models::random_qmc(&mut r, da, db, dc, i);
            let part = RegionPartition::abc(rho.register(), &[0], &[1], &[2])?;
            Ok((
                markov::petz_recovery_error(&rho, &part)?,
                info::cmi_of_partition(&rho, &part)?.abs(),
            ))
        })
        .collect::<locstab::Result<_>>()?;
    let mut g = GroupResult::default();
    let r = "exact Markov chains: Petz recovery";
    g.push(C::le("qmc.recovery_error", r, fmax(res.iter().map(|x| x.0)), 1e-8));
    g.push(C::le("qmc.cmi", r, fmax(res.iter().map(|x| x.1)), 1e-10));
    Ok(g)
}

fn averaged_cmi(cfg: &Config) -> locstab::Result<GroupResult> {
    let reg = Register::qubits(3);
    let part = RegionPartition::abc(&reg, &[0], &[1], &[2])?;
    let slack = cfg.slack(FUZZ_SLACK);
    let gaps: Vec<f64> = (0..10_000usize)
        .into_par_iter()
        .map(|i| {
            let mut r = models::rng(models::sub_seed(cfg.seed ^ 0x66, i as u64));
            let rho = random_rank_state(&mut r, &reg);
            let k = 1 + r.random_range(0..4);
            let inst = models::random_instrument(&mut r, &reg, region(&reg, &[0])?, k);
            let (lhs, rhs) = markov::measurement_average_cmi(&rho, &inst, &part)?;
            Ok(lhs - rhs)
        })
        .collect::<locstab::Result<_>>()?;
    let mut g = GroupResult::default();
    let v = gaps.iter().filter(|&&x| x > slack).count();
    g.push(C::eq(
        "averaged_cmi.violations",
        "averaged CMI after measuring A never exceeds the CMI",
        v as f64,
        0.0,
        0.0,
    ));
    g.fit("averaged_cmi.max_excess", gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    Ok(g)
}

fn certify(cfg: &Config) -> locstab::Result<GroupResult> {
    let mut g = GroupResult::default();
    let e4 = models::counterexample("E4", 4)?;
    let rep = markov::certify_qmc(&e4.state, &e4.partition, markov::QMC_TOL)?;
    g.push(C::eq(
        "certify.e4_not_markov",
        "E4 is certified non-Markov",
        rep.is_qmc as u8 as f64,
        0.0,
        0.0,
    ));
    let e3 = models::counterexample("E3", 3)?;
    let rep = markov::certify_qmc(&e3.state, &e3.partition, markov::QMC_TOL)?;
    g.push(C::eq("certify.e3_markov", "E3 is certified Markov", rep.is_qmc as u8 as f64, 1.0, 0.0));
    let ws = markov::local_computability_witness_search(
        &e4.state,
        &e4.partition,
        CorrelatorParams { p: 0.5, q: 0.5 },
        64,
        cfg.seed,
    )?;
    g.push(C::ge(
        "certify.e4_witness",
        "local computability witness on E4",
        ws.max_defect,
        markov::WITNESS_THRESHOLD,
    ));
    g.fit("certify.e4_witness_defect", ws.max_defect);
    Ok(g)
}

// ------------------------------------------------------------- stability-scan

#[derive(serde::Serialize)]
pub struct ScanRow {
    pub model: String,
    pub beta: f64,
    pub r: usize,
    pub r1: Option<usize>,
    pub r2: Option<usize>,
    pub traj_error: Option<f64>,
    pub chan_error: Option<f64>,
    pub corr: Option<f64>,
    pub cmi: Option<f64>,
}

/// Stability errors over radii for an `X`-measurement on the first site of a
/// thermal Ising chain, with correlation and CMI at each separation.
pub fn stability_rows(n: usize, beta: f64, seed: u64) -> locstab::Result<(Vec<ScanRow>, Option<f64>)> {
    let reg = Register::qubits(n);
    let rho = models::gibbs_state(&reg, &models::tfim(n), beta)?;
    let inst = KrausInstrument::new(&reg, region(&reg, &[0])?, x_projectors())?;
    let radii: Vec<usize> = (1..n - 1).collect();
    // Extra buffer sites go next to C first.
    let split = |r: usize| {
        let (r1, r2) = stability::default_split(r, None, None);
        (r2, r1)
    };
    let reps = stability::stability_scan(&rho, &inst, 1, &radii, split)?;
    let a = region(&reg, &[0])?;
    let rows = reps
        .par_iter()
        .map(|rep| {
            let part = stability::separation_partition(&reg, &a, rep.r + 1)?;
            let (corr, cmi) = match part {
                Some(p) => (
                    Some(correlators::operator_correlation(&rho, &a, p.get("C")?, 2, seed)?.value),
                    Some(info::cmi_of_partition(&rho, &p)?.max(0.0)),
                ),
                None => (None, None),
            };
            Ok(ScanRow {
                model: "tfim".into(),
                beta,
                r: rep.r,
                r1: Some(rep.r1),
                r2: Some(rep.r2),
                traj_error: Some(rep.trajectory_error),
                chan_error: Some(rep.channel_error),
                corr,
                cmi,
            })
        })
        .collect::<locstab::Result<Vec<_>>>()?;
    Ok((rows, reps.first().and_then(|r| r.xi)))
}

fn stability_scan(cfg: &Config) -> locstab::Result<GroupResult> {
    let n = 8;
    cfg_dim(cfg, 1 << n)?;
    let (rows, xi) = stability_rows(n, 0.3, cfg.seed)?;
    let errs: Vec<f64> = rows.iter().filter_map(|r| r.traj_error).collect();
    let increases = errs.windows(2).filter(|w| w[1] > w[0] + 1e-12).count();
    let mut g = GroupResult::default();
    g.push(C::eq(
        "stability.monotone",
        "trajectory recovery error is non-increasing in r",
        increases as f64,
        0.0,
        0.0,
    ));
    g.push(C::le(
        "stability.decay",
        "error at the largest radius below the error at r = 1",
        *errs.last().unwrap_or(&f64::NAN),
        errs[0],
    ));
    if let Some(x) = xi {
        g.fit("stability.xi", x);
    }
    g.tables.push((
        "stability_scan.csv".into(),
        crate::csv_text(&rows).map_err(|e| locstab::Error::Parse(e.to_string()))?,
    ));
    Ok(g)
}

fn cat_states(_: &Config) -> locstab::Result<GroupResult> {
    let n = 4;
    let reg = Register::qubits(n);
    let part = stability::chain_abbc(&reg, 1, 1, 1)?;
    let a = region(&reg, &[0])?;
    let z = KrausInstrument::new(&reg, a.clone(), vec![project(0), project(1)])?;
    let x = KrausInstrument::new(&reg, a, x_projectors())?;
    let inc = models::cat_state(n, false);
    let z_err = stability::stability_score(&inc, &z, &part)?.trajectory_error;
    let x_err = stability::stability_score(&inc, &x, &part)?.trajectory_error;
    let mut g = GroupResult::default();
    g.push(C::ge("cat.incoherent_z", "incoherent cat: Z-measurement is unstable", z_err, 0.5));
    g.push(C::le("cat.incoherent_x", "incoherent cat: X-measurement is stable", x_err, 1e-8));
    Ok(g)
}

// ------------------------------------------------------------------- lindblad

#[derive(serde::Serialize)]
pub struct LindbladRow {
    pub model: String,
    pub beta: f64,
    pub kind: &'static str,
    pub x: f64,
    pub error: f64,
    pub gap: f64,
    pub bound: Option<f64>,
}

pub struct LindbladScan {
    pub rows: Vec<LindbladRow>,
    pub model: lindblad::LindbladModel,
    pub convergence: lindblad::ConvergenceReport,
    pub dl_fit: Option<fit::LinearFit>,
}

/// Relaxation and detectability-lemma recovery errors for the Ising Davies model.
pub fn lindblad_scan(n: usize, j: f64, h: f64, beta: f64, times: &[f64], ms: &[usize], seed: u64) -> locstab::Result<LindbladScan> {
    let model = lindblad::ising_davies(n, j, h, beta)?;
    let reg = model.register.clone();
    let mut r = models::rng(models::sub_seed(seed, 10));
    let inst = models::random_instrument(&mut r, &reg, region(&reg, &[0])?, 2);
    let sigma = channels::apply_instrument(&model.steady, &inst)?.outcomes[0].state.clone();
    let conv = lindblad::convergence_check(&model, &sigma, times)?;
    let a = region(&reg, &[0])?;
    let dl: Vec<f64> = ms
        .par_iter()
        .map(|&m| lindblad::detectability_recovery(&model, &a, m, &inst))
        .collect::<locstab::Result<_>>()?;
    let xs: Vec<f64> = ms.iter().map(|&m| m as f64).collect();
    let dl_fit = fit::log_linear_fit(&xs, &dl, 1e-14, 3).ok().map(|x| x.0);
    let name = format!("ising-davies-{n}");
    let mut rows: Vec<LindbladRow> = times
        .iter()
        .zip(&conv.errors)
        .map(|(&t, &e)| LindbladRow {
            model: name.clone(),
            beta,
            kind: "t",
            x: t,
            error: e,
            gap: model.gap,
            bound: Some(conv.prefactor * (-model.gap * t).exp()),
        })
        .collect();
    rows.extend(ms.iter().zip(&dl).map(|(&m, &e)| LindbladRow {
        model: name.clone(),
        beta,
        kind: "m",
        x: m as f64,
        error: e,
        gap: model.gap,
        bound: None,
    }));
    Ok(LindbladScan {
        rows,
        model,
        convergence: conv,
        dl_fit,
    })
}

fn davies(cfg: &Config) -> locstab::Result<GroupResult> {
    let times: Vec<f64> = (0..16).map(|i| 2.5 + 0.5 * i as f64).collect();
    let ms: Vec<usize> = (1..=12).collect();
    let scan = lindblad_scan(3, 1.0, 0.5, 1.0, &times, &ms, cfg.seed)?;
    let model = &scan.model;
    let mut g = GroupResult::default();
    g.push(C::le("davies.gns_residual", "Davies generator is GNS detailed balanced", model.gns_residual(), 1e-8));
    g.push(C::le(
        "davies.steady_state",
        "kernel of the generator is the Gibbs state",
        model.kernel_state()?.trace_distance(&model.steady)?,
        1e-8,
    ));
    let rate = scan.convergence.fitted_rate.unwrap_or(f64::NAN);
    g.push(C::ge("davies.rate", "fitted relaxation rate at least 0.9 gap", rate, 0.9 * model.gap));
    let (slope, r2) = scan.dl_fit.map_or((f64::NAN, f64::NAN), |f| (f.slope, f.r2));
    g.push(C::le("davies.dl_slope", "detectability-lemma error decays in m", slope, 0.0));
    g.push(C::ge("davies.dl_r2", "detectability-lemma error is log-linear in m", r2, 0.95));
    g.fit("davies.gap", model.gap);
    g.fit("davies.fitted_rate", rate);
    g.fit("davies.prefactor", scan.convergence.prefactor);
    g.fit("davies.fitted_constant", scan.convergence.fitted_constant);
    g.fit("davies.dl_slope", slope);
    g.tables.push((
        "lindblad_scan.csv".into(),
        crate::csv_text(&scan.rows).map_err(|e| locstab::Error::Parse(e.to_string()))?,
    ));
    Ok(g)
}

fn two_level(_: &Config) -> locstab::Result<GroupResult> {
    let reg = Register::qubits(1);
    let one = Region::new(&reg, &[0])?;
    let model = lindblad::davies_generator(&reg, &[linalg::pauli('Z')], &[(one, linalg::pauli('X'))], 1.0)?;
    let rates = (-1f64).exp() + 1f64.exp();
    let mut g = GroupResult::default();
    g.push(C::le("two_level.gns_residual", "two-level Davies detailed balance", model.gns_residual(), 1e-10));
    g.push(C::le("two_level.kms_residual", "two-level Davies KMS balance", model.kms_residual()?, 1e-10));
    g.push(C::eq("two_level.gap", "two-level Davies gap is half the rate sum", model.gap, rates / 2.0, 1e-9));
    Ok(g)
}

// --------------------------------------------------------------- purification

fn tfd(_: &Config) -> locstab::Result<GroupResult> {
    let fx = models::counterexample("E4", 4)?;
    let e4 = &fx.state;
    let reg = e4.register();
    let qmc = e4
        .partial_trace(&region(reg, &[0, 1])?)?
        .tensor(&e4.partial_trace(&region(reg, &[2, 3])?)?)?;
    let mut g = GroupResult::default();
    g.push(C::le(
        "tfd.exact_qmc",
        "exact Markov chain: purified marginals agree",
        purification::tfd_local_computability_defect(&qmc, &fx.partition)?,
        1e-9,
    ));
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 1..=10 {
        let rho = qmc.mix(e4, i as f64 / 10.0)?;
        xs.push(info::cmi_of_partition(&rho, &fx.partition)?.max(0.0).sqrt());
        ys.push(purification::tfd_local_computability_defect(&rho, &fx.partition)?);
    }
    let f = fit::proportional_fit(&xs, &ys)?;
    g.push(C::ge(
        "tfd.sqrt_cmi_fit",
        "purified marginal defect against sqrt(CMI) along an interpolation to E4: R^2",
        f.r2,
        0.9,
    ));
    g.fit("tfd.k", f.k);
    g.fit("tfd.k_envelope", f.k_envelope);
    g.fit("tfd.r2", f.r2);
    Ok(g)
}

fn stabilizer(cfg: &Config) -> locstab::Result<GroupResult> {
    let res: Vec<f64> = (0..100usize)
        .into_par_iter()
        .map(|i| {
            let mut r = models::rng(models::sub_seed(cfg.seed ^ 0x11, i as u64));
            let n = 3 + (i % 2);
            let k = 1 + r.random_range(0..n);
            let stab = models::random_stabilizer_group(&mut r, n, k);
            let reg = stab.state().register().clone();
            let a_len = 1 + r.random_range(0..n - 1);
            let c_len = 1 + r.random_range(0..n - a_len);
            let a: Vec<usize> = (0..a_len).collect();
            let b: Vec<usize> = (a_len..n - c_len).collect();
            let c: Vec<usize> = (n - c_len..n).collect();
            let part = RegionPartition::abc(&reg, &a, &b, &c)?;
            let (lhs, rhs) = purification::stabilizer_tfd_identity(&stab, &part)?;
            Ok((lhs - rhs).abs())
        })
        .collect::<locstab::Result<_>>()?;
    let mut g = GroupResult::default();
    g.push(C::le(
        "stabilizer.identity",
        "stabilizer states: I(A:C) + I(A:C|B) = I(AA':CC')",
        fmax(res),
        1e-8,
    ));
    Ok(g)
}

fn mirror(cfg: &Config) -> locstab::Result<GroupResult> {
    let mut r = models::rng(models::sub_seed(cfg.seed, 0x3));
    let mut worst = 0.0f64;
    for d in [2, 3] {
        let o = models::ginibre(&mut r, d * d, d * d);
        worst = worst.max(purification::choi_decompose(&o, d)?.reconstruction_error());
    }
    let reg = Register::qubits(3);
    let h = models::commuting_ising(3, 1.0, 0.5);
    let rho = models::gibbs_state(&reg, &h, 1.0)?;
    let part = RegionPartition::abc(&reg, &[0], &[1], &[2])?;
    let mie = purification::classical_mie(&rho, &part)?;
    let mut g = GroupResult::default();
    g.push(C::le("mirror.decomposition", "mirror operator decomposition reconstructs O", worst, 1e-10));
    g.push(C::eq(
        "mirror.classical_mie",
        "classical Gibbs chain: MIE bound holds",
        mie.bound_holds as u8 as f64,
        1.0,
        0.0,
    ));
    g.fit("mirror.classical_mie", mie.mie);
    Ok(g)
}
