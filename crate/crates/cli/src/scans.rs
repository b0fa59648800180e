//! Parameter scans writing CSV tables and a JSON report.

use rayon::prelude::*;
use serde::Serialize;

use locstab::models;
use locstab::states::{Region, Register};
use locstab::stability::{self, SRCProfile, SrcGeometry};

use crate::suites::{self, ScanRow};
use crate::{csv_text, Config, Result};

/// Files produced by a scan: `(name, contents)`.
pub struct ScanOutput {
    pub files: Vec<(String, String)>,
    pub summary: String,
}

impl ScanOutput {
    pub fn write(&self, cfg: &Config) -> Result<()> {
        for (name, body) in &self.files {
            crate::write_file(&cfg.out.join(name), body)?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct GibbsFit {
    model: String,
    beta: f64,
    eta: Option<f64>,
    zeta: Option<f64>,
}

#[derive(Serialize)]
struct GibbsReport<'a> {
    model: &'a str,
    n: usize,
    seed: u64,
    profiles: Vec<(f64, &'a SRCProfile)>,
}

fn json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn hamiltonian(model: &str, n: usize) -> Result<locstab::linalg::CMatrix> {
    match model {
        "tfim" => Ok(models::tfim(n)),
        "ising" => Ok(models::commuting_ising(n, 1.0, 0.5)),
        _ => Err(locstab::Error::BadName(model.into()).into()),
    }
}

/// Correlation and CMI decay profiles of Gibbs chains over a range of β.
pub fn gibbs(model: &str, n: usize, betas: &[f64], cfg: &Config) -> Result<ScanOutput> {
    let reg = Register::qubits(n);
    cfg.check_dim(reg.dim())?;
    let h = hamiltonian(model, n)?;
    let geom = SrcGeometry {
        a: Region::new(&reg, &[0])?,
        separations: (1..n).collect(),
        restarts: 2,
        seed: cfg.seed,
    };
    let profiles: Vec<SRCProfile> = betas
        .par_iter()
        .map(|&b| {
            let rho = models::gibbs_state(&reg, &h, b)?;
            stability::src_profile(&rho, &geom)
        })
        .collect::<locstab::Result<_>>()?;
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for (&beta, p) in betas.iter().zip(&profiles) {
        rows.extend(p.samples.iter().map(|s| ScanRow {
            model: model.into(),
            beta,
            r: s.r,
            r1: None,
            r2: None,
            traj_error: None,
            chan_error: None,
            corr: Some(s.correlation),
            cmi: Some(s.cmi),
        }));
        fits.push(GibbsFit {
            model: model.into(),
            beta,
            eta: p.eta(),
            zeta: p.zeta(),
        });
    }
    let etas: Vec<String> = fits
        .iter()
        .map(|f| format!("β={}: η={}", f.beta, f.eta.map_or("n/a".into(), |e| format!("{e:.4}"))))
        .collect();
    let report = GibbsReport {
        model,
        n,
        seed: cfg.seed,
        profiles: betas.iter().copied().zip(&profiles).collect(),
    };
    Ok(ScanOutput {
        files: vec![
            ("gibbs_scan.csv".into(), csv_text(&rows)?),
            ("gibbs_fits.csv".into(), csv_text(&fits)?),
            ("gibbs_scan.json".into(), json(&report)),
        ],
        summary: etas.join("\n"),
    })
}

/// Recovery errors over radii on transverse-field Ising Gibbs chains.
pub fn stability(n: usize, betas: &[f64], cfg: &Config) -> Result<ScanOutput> {
    cfg.check_dim(1 << n)?;
    let per_beta: Vec<(Vec<ScanRow>, Option<f64>)> = betas
        .par_iter()
        .map(|&b| suites::stability_rows(n, b, cfg.seed))
        .collect::<locstab::Result<_>>()?;
    let summary = betas
        .iter()
        .zip(&per_beta)
        .map(|(b, (_, xi))| format!("β={b}: ξ={}", xi.map_or("n/a".into(), |x| format!("{x:.4}"))))
        .collect::<Vec<_>>()
        .join("\n");
    let rows: Vec<ScanRow> = per_beta.into_iter().flat_map(|x| x.0).collect();
    Ok(ScanOutput {
        files: vec![("stability_scan.csv".into(), csv_text(&rows)?)],
        summary,
    })
}

#[derive(Serialize)]
struct LindbladReport<'a> {
    n: usize,
    j: f64,
    h: f64,
    beta: f64,
    seed: u64,
    gap: f64,
    gns_residual: f64,
    convergence: &'a locstab::lindblad::ConvergenceReport,
    dl_fit: Option<locstab::fit::LinearFit>,
}

/// Relaxation on `t ∈ [0, tmax]` and recovery depth `m ∈ 1..=mmax` for the Ising Davies model.
pub fn lindblad(n: usize, j: f64, h: f64, beta: f64, tmax: f64, mmax: usize, cfg: &Config) -> Result<ScanOutput> {
    cfg.check_dim(1 << (2 * n))?;
    let steps = 40;
    let times: Vec<f64> = (1..=steps).map(|i| tmax * i as f64 / steps as f64).collect();
    let ms: Vec<usize> = (1..=mmax).collect();
    let scan = suites::lindblad_scan(n, j, h, beta, &times, &ms, cfg.seed)?;
    let report = LindbladReport {
        n,
        j,
        h,
        beta,
        seed: cfg.seed,
        gap: scan.model.gap,
        gns_residual: scan.model.gns_residual(),
        convergence: &scan.convergence,
        dl_fit: scan.dl_fit,
    };
    let summary = format!(
        "gap {:.5}, fitted rate {}",
        scan.model.gap,
        scan.convergence.fitted_rate.map_or("n/a".into(), |r| format!("{r:.5}"))
    );
    Ok(ScanOutput {
        files: vec![
            ("lindblad_scan.csv".into(), csv_text(&scan.rows)?),
            ("lindblad_scan.json".into(), json(&report)),
        ],
        summary,
    })
}
