//! Monte Carlo sweeps over `(N, k)` cells and their CSV report.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::stats::{summarize, z_score};

use super::cell::Cell;
use super::config::{Backend, Group, Mode, SweepConfig};

pub const CSV_HEADER: &str =
    "group,mode,backend,n_qubits,rank_k,samples,seed,sample_mean,sample_variance,variance_se,analytic_variance,abs_rel_err";

#[derive(Clone, Debug, PartialEq)]
pub struct VarianceReport {
    pub group: Group,
    pub mode: Mode,
    pub backend: Backend,
    pub n_qubits: usize,
    pub rank_k: usize,
    pub samples: usize,
    pub master_seed: u64,
    pub sample_mean: f64,
    pub sample_variance: f64,
    pub variance_se: f64,
    pub analytic_variance: f64,
    pub abs_rel_err: f64,
    /// Certified worst-case lower bound; not part of the CSV.
    pub lower_bound: f64,
}

impl VarianceReport {
    pub fn z(&self) -> f64 {
        z_score(self.sample_variance, self.analytic_variance, self.variance_se)
    }

    /// How far the sample variance sits below the lower bound, in standard errors.
    pub fn bound_violation_se(&self) -> f64 {
        if self.sample_variance >= self.lower_bound {
            0.0
        } else {
            z_score(self.sample_variance, self.lower_bound, self.variance_se)
        }
    }
}

impl SweepConfig {
    pub fn cells(&self) -> Result<Vec<Cell>> {
        if self.qubits.is_empty() || self.ranks.is_empty() {
            return Err(Error::Config("qubit and rank lists must be nonempty".into()));
        }
        let mut cells = Vec::new();
        for &n in &self.qubits {
            for &k in &self.ranks {
                cells.push(Cell::new(
                    self.group,
                    self.mode,
                    self.backend,
                    n,
                    k,
                    self.samples,
                    self.master_seed,
                    &self.observable,
                )?);
            }
        }
        Ok(cells)
    }
}

/// All trial values of a cell, in trial order.
pub fn cell_values(cell: &Cell) -> Result<Vec<f64>> {
    (0..cell.samples).into_par_iter().map(|t| cell.run_trial(t)).collect()
}

pub fn run_cell(cell: &Cell) -> Result<VarianceReport> {
    let values = cell_values(cell)?;
    let s = summarize(&values)?;
    let analytic = cell.analytic_variance()?;
    let abs_rel_err = if analytic > 0.0 { (s.variance - analytic).abs() / analytic } else { f64::NAN };
    Ok(VarianceReport {
        group: cell.group,
        mode: cell.mode,
        backend: cell.backend,
        n_qubits: cell.qubits,
        rank_k: cell.rank,
        samples: cell.samples,
        master_seed: cell.master_seed,
        sample_mean: s.mean,
        sample_variance: s.variance,
        variance_se: s.variance_se,
        analytic_variance: analytic,
        abs_rel_err,
        lower_bound: cell.lower_bound()?,
    })
}

/// Runs cells, optionally on a dedicated pool of `threads` workers. Results do not
/// depend on the worker count.
pub fn run_cells(cells: &[Cell], threads: Option<usize>) -> Result<Vec<VarianceReport>> {
    let work = || cells.iter().map(run_cell).collect::<Result<Vec<_>>>();
    let mut reports = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::Resource(format!("cannot build thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    reports.sort_by_key(|r| (r.n_qubits, r.rank_k));
    Ok(reports)
}

pub fn run_sweep(cfg: &SweepConfig, threads: Option<usize>) -> Result<Vec<VarianceReport>> {
    run_cells(&cfg.cells()?, threads)
}

/// `printf("%.{digits}g")`.
pub fn format_g(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn csv_string(reports: &[VarianceReport]) -> String {
    let mut rows: Vec<&VarianceReport> = reports.iter().collect();
    rows.sort_by_key(|r| (r.n_qubits, r.rank_k));
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let g = |x: f64| format_g(x, 12);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.group,
            r.mode,
            r.backend,
            r.n_qubits,
            r.rank_k,
            r.samples,
            r.master_seed,
            g(r.sample_mean),
            g(r.sample_variance),
            g(r.variance_se),
            g(r.analytic_variance),
            g(r.abs_rel_err)
        ));
    }
    out
}

pub fn emit_csv(reports: &[VarianceReport], path: &Path) -> Result<()> {
    if reports.is_empty() {
        return Err(Error::Domain("no reports to write".into()));
    }
    fs::write(path, csv_string(reports))?;
    Ok(())
}

/// `results.csv` → `results.csv.meta`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".meta");
    PathBuf::from(name)
}

/// Writes the resolved configuration next to the CSV, in config-file syntax.
pub fn write_sidecar(cfg: &SweepConfig, csv: &Path) -> Result<PathBuf> {
    let path = sidecar_path(csv);
    let text = format!("# resolved configuration, lcu-lab {}\n{}", env!("CARGO_PKG_VERSION"), cfg.to_text());
    fs::write(&path, text)?;
    Ok(path)
}

/// Outcome of the per-cell 3 SE rule with a small allowance for 4 SE outliers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToleranceSummary {
    pub cells: usize,
    pub max_z: f64,
    pub beyond_three: usize,
    pub beyond_four: usize,
    pub allowed_outliers: usize,
}

impl ToleranceSummary {
    pub fn from_z(zs: &[f64]) -> Self {
        Self {
            cells: zs.len(),
            max_z: zs.iter().cloned().fold(0.0, f64::max),
            beyond_three: zs.iter().filter(|&&z| z > 3.0).count(),
            beyond_four: zs.iter().filter(|&&z| z > 4.0).count(),
            allowed_outliers: (zs.len() / 20).max(1),
        }
    }

    pub fn passed(&self) -> bool {
        self.beyond_four == 0 && self.beyond_three <= self.allowed_outliers
    }
}

pub fn tolerance(reports: &[VarianceReport]) -> ToleranceSummary {
    ToleranceSummary::from_z(&reports.iter().map(VarianceReport::z).collect::<Vec<_>>())
}
