//! Verification suites, parameter scans and plot data for `locstab`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

pub mod plot;
pub mod scans;
pub mod suites;

pub const SUITES: [&str; 7] = [
    "counterexamples",
    "cpq-properties",
    "markov",
    "stability-scan",
    "lindblad",
    "purification",
    "all",
];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("unknown suite `{0}` (expected one of {list})", list = SUITES.join(", "))]
    UnknownSuite(String),
    #[error("cannot write {path}: {source}")]
    WriteFailure { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {0}")]
    ParseFailure(String),
    #[error("system dimension {dim} exceeds --cap-dim {cap}")]
    CapExceeded { dim: usize, cap: usize },
    #[error(transparent)]
    Core(#[from] locstab::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Run-wide settings. Unset fields fall back to the config file, then defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub seed: u64,
    /// Overrides the slack of every inequality fuzz check when set.
    pub tol: Option<f64>,
    pub out: PathBuf,
    pub cap_dim: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            tol: None,
            out: PathBuf::from("out"),
            cap_dim: 256,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub cap_dim: Option<usize>,
}

impl Overrides {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Overrides> {
        let mut o = Overrides::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || CliError::ParseFailure(format!("config line {}: `{raw}`", i + 1));
            let (k, v) = line.split_once('=').ok_or_else(bad)?;
            let v = v.trim().trim_matches('"');
            match k.trim() {
                "seed" => o.seed = Some(v.parse().map_err(|_| bad())?),
                "tol" => o.tol = Some(v.parse().map_err(|_| bad())?),
                "out" => o.out = Some(PathBuf::from(v)),
                "cap-dim" | "cap_dim" => o.cap_dim = Some(v.parse().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        Ok(o)
    }

    pub fn from_file(path: &Path) -> Result<Overrides> {
        let text = fs::read_to_string(path).map_err(|_| CliError::ParseFailure(path.display().to_string()))?;
        Overrides::parse(&text)
    }

    /// `self` wins over `file`, which wins over the defaults.
    pub fn resolve(&self, file: &Overrides) -> Config {
        let d = Config::default();
        Config {
            seed: self.seed.or(file.seed).unwrap_or(d.seed),
            tol: self.tol.or(file.tol),
            out: self.out.clone().or_else(|| file.out.clone()).unwrap_or(d.out),
            cap_dim: self.cap_dim.or(file.cap_dim).unwrap_or(d.cap_dim),
        }
    }
}

impl Config {
    pub fn slack(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if dim > self.cap_dim {
            return Err(CliError::CapExceeded { dim, cap: self.cap_dim });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `|measured − expected| ≤ tol`
    Eq,
    /// `measured ≤ expected + tol`
    Le,
    /// `measured ≥ expected − tol`
    Ge,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub paper_ref: String,
    pub measured: f64,
    pub expected: f64,
    pub tol: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(id: &str, reference: &str, rel: Relation, measured: f64, expected: f64, tol: f64) -> CheckRecord {
        let pass = match rel {
            Relation::Eq => (measured - expected).abs() <= tol,
            Relation::Le => measured <= expected + tol,
            Relation::Ge => measured >= expected - tol,
        };
        CheckRecord {
            id: id.into(),
            paper_ref: reference.into(),
            measured,
            expected,
            tol,
            relation: rel,
            pass,
        }
    }

    pub fn eq(id: &str, reference: &str, measured: f64, expected: f64, tol: f64) -> CheckRecord {
        CheckRecord::new(id, reference, Relation::Eq, measured, expected, tol)
    }

    pub fn le(id: &str, reference: &str, measured: f64, bound: f64) -> CheckRecord {
        CheckRecord::new(id, reference, Relation::Le, measured, bound, 0.0)
    }

    pub fn ge(id: &str, reference: &str, measured: f64, bound: f64) -> CheckRecord {
        CheckRecord::new(id, reference, Relation::Ge, measured, bound, 0.0)
    }

    /// A check that could not be evaluated.
    pub fn errored(id: &str, reference: &str, err: &dyn std::fmt::Display) -> CheckRecord {
        CheckRecord {
            id: id.into(),
            paper_ref: format!("{reference} (error: {err})"),
            measured: f64::NAN,
            expected: f64::NAN,
            tol: 0.0,
            relation: Relation::Eq,
            pass: false,
        }
    }
}

/// Outcome of one group of checks: records plus fitted constants.
#[derive(Clone, Debug, Default)]
pub struct GroupResult {
    pub checks: Vec<CheckRecord>,
    pub fitted: BTreeMap<String, f64>,
    /// `(file name, contents)` written next to results.json.
    pub tables: Vec<(String, String)>,
}

impl GroupResult {
    pub fn push(&mut self, c: CheckRecord) {
        self.checks.push(c);
    }

    pub fn fit(&mut self, key: &str, v: f64) {
        self.fitted.insert(key.into(), v);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    /// Fitted constants, recorded but never asserted.
    pub fitted: BTreeMap<String, f64>,
    pub pass: bool,
    #[serde(skip)]
    pub wall_time: Duration,
    #[serde(skip)]
    pub tables: Vec<(String, String)>,
}

impl SuiteResult {
    pub fn from_groups(suite: &str, seed: u64, groups: Vec<GroupResult>, wall_time: Duration) -> SuiteResult {
        let mut checks = Vec::new();
        let mut fitted = BTreeMap::new();
        let mut tables = Vec::new();
        for g in groups {
            checks.extend(g.checks);
            fitted.extend(g.fitted);
            tables.extend(g.tables);
        }
        let pass = checks.iter().all(|c| c.pass);
        SuiteResult {
            suite: suite.into(),
            seed,
            checks,
            fitted,
            pass,
            wall_time,
            tables,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn failed(&self) -> Vec<&CheckRecord> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| CliError::WriteFailure {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| CliError::WriteFailure {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs a suite and writes `results.json` plus any tables into `cfg.out`.
pub fn run_suite(name: &str, cfg: &Config) -> Result<SuiteResult> {
    let res = suites::run(name, cfg)?;
    write_file(&cfg.out.join("results.json"), &res.to_json())?;
    for (file, body) in &res.tables {
        write_file(&cfg.out.join(file), body)?;
    }
    Ok(res)
}

/// Serializes rows with a header into CSV text.
pub fn csv_text<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::ParseFailure(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::ParseFailure(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf8"))
}

/// `start:stop:step`, inclusive of `stop` up to rounding, or a single value.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let bad = || CliError::ParseFailure(format!("range `{s}`"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    match parts.as_slice() {
        [v] => Ok(vec![*v]),
        [a, b, st] if *st > 0.0 && b >= a => {
            let n = ((b - a) / st + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| a + i as f64 * st).map(|x| (x * 1e12).round() / 1e12).collect())
        }
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_precedence() {
        let file = Overrides::parse("seed = 3\n# comment\ntol=1e-6\nout = \"x\"\n").unwrap();
        let flags = Overrides {
            seed: Some(9),
            ..Default::default()
        };
        let c = flags.resolve(&file);
        assert_eq!(c.seed, 9);
        assert_eq!(c.tol, Some(1e-6));
        assert_eq!(c.out, PathBuf::from("x"));
        assert_eq!(c.cap_dim, 256);
        assert!(Overrides::parse("bogus = 1").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0.1:0.3:0.1").unwrap(), vec![0.1, 0.2, 0.3]);
        assert_eq!(parse_range("2").unwrap(), vec![2.0]);
        assert!(parse_range("1:0:0.1").is_err());
    }

    #[test]
    fn relations() {
        assert!(CheckRecord::eq("a", "", 1.0, 1.0 + 1e-10, 1e-9).pass);
        assert!(!CheckRecord::le("a", "", 2.0, 1.0).pass);
        assert!(CheckRecord::ge("a", "", 2.0, 1.0).pass);
        assert!(!CheckRecord::ge("a", "", f64::NAN, 1.0).pass);
    }
}
