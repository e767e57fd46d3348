//! Trace distributions over a census: histograms, the Katz–Sarnak
//! normalization, asymmetry, mean trace and the per-stratum count check.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::census::Database;
use crate::families::{table2_expected, Stratum};
use crate::Result;

/// `3⌊2√p⌋`, the Serre bound on `|t|` for genus 3.
pub fn trace_bound(p: u32) -> i64 {
    let mut s = 0i64;
    while (s + 1) * (s + 1) <= 4 * p as i64 {
        s += 1;
    }
    3 * s
}

/// `N_{p,3}(t)` for `t` in `[-B, B]`, `B = 3⌊2√p⌋`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceHistogram {
    pub p: u32,
    pub counts: Vec<u64>,
}

impl TraceHistogram {
    pub fn bound(&self) -> i64 {
        trace_bound(self.p)
    }

    pub fn get(&self, t: i64) -> u64 {
        let b = self.bound();
        if t.abs() > b { 0 } else { self.counts[(t + b) as usize] }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn traces(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        let b = self.bound();
        self.counts.iter().enumerate().map(move |(i, &c)| (i as i64 - b, c))
    }
}

pub fn trace_histogram(db: &Database) -> TraceHistogram {
    let b = trace_bound(db.p);
    let mut counts = vec![0u64; 2 * b as usize + 1];
    for r in &db.records {
        for t in &r.twists {
            let tr = t.trace(db.p);
            assert!(tr.abs() <= b, "trace {tr} outside the Serre bound");
            counts[(tr + b) as usize] += 1;
        }
    }
    TraceHistogram { p: db.p, counts }
}

/// `N^KS(τ) = √p / N · N_{p,3}(t)` at `τ = t/√p`, with `N` the number of
/// classes in the histogram.
#[derive(Clone, Debug, PartialEq)]
pub struct KsDensity {
    pub p: u32,
    pub points: Vec<(f64, f64)>,
}

impl KsDensity {
    /// `Σ N^KS · (1/√p)`.
    pub fn integral(&self) -> f64 {
        self.points.iter().map(|&(_, d)| d).sum::<f64>() / (self.p as f64).sqrt()
    }
}

pub fn ks_density(hist: &TraceHistogram) -> KsDensity {
    let sp = (hist.p as f64).sqrt();
    let total = hist.total();
    let points = hist
        .traces()
        .map(|(t, c)| {
            let d = if total == 0 { 0.0 } else { sp * c as f64 / total as f64 };
            (t as f64 / sp, d)
        })
        .collect();
    KsDensity { p: hist.p, points }
}

/// `(τ, N^KS(τ) − N^KS(−τ))` on the same grid.
pub fn asymmetry(dens: &KsDensity) -> Vec<(f64, f64)> {
    let n = dens.points.len();
    (0..n).map(|i| (dens.points[i].0, dens.points[i].1 - dens.points[n - 1 - i].1)).collect()
}

/// The mean of `t/√p` over all twists, kept as `Σt / n` until printed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeanTrace {
    pub p: u32,
    pub trace_sum: i64,
    pub count: u64,
}

impl MeanTrace {
    pub fn value(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        self.trace_sum as f64 / self.count as f64 / (self.p as f64).sqrt()
    }
}

pub fn mean_normalized_trace(db: &Database) -> MeanTrace {
    let mut trace_sum = 0;
    let mut count = 0;
    for r in &db.records {
        for t in &r.twists {
            trace_sum += t.trace(db.p);
            count += 1;
        }
    }
    MeanTrace { p: db.p, trace_sum, count }
}

/// Rounds to one significant digit, e.g. `0.00437 → 0.004`.
pub fn round_one_digit(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let e = x.abs().log10().floor();
    let scale = 10f64.powf(e);
    (x / scale).round() * scale
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table2Check {
    /// `None` for the total row.
    pub stratum: Option<Stratum>,
    pub observed_geometric: u64,
    pub expected_geometric: u64,
    pub observed_arithmetic: u64,
    pub expected_arithmetic: u64,
}

impl Table2Check {
    pub fn matches(&self) -> bool {
        self.observed_geometric == self.expected_geometric && self.observed_arithmetic == self.expected_arithmetic
    }

    pub fn label(&self) -> &'static str {
        self.stratum.map_or("total", |s| s.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table2Report {
    pub p: u32,
    pub rows: Vec<Table2Check>,
}

impl Table2Report {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(Table2Check::matches)
    }
}

pub fn verify_table2(db: &Database) -> Table2Report {
    let observed = db.stratum_counts();
    let rows = table2_expected(db.p)
        .into_iter()
        .map(|e| {
            let (g, a) = match e.stratum {
                Some(s) => {
                    let row = observed[s.id() as usize];
                    (row.1, row.2)
                }
                None => (db.records.len() as u64, db.twist_count()),
            };
            Table2Check {
                stratum: e.stratum,
                observed_geometric: g,
                expected_geometric: e.geometric,
                observed_arithmetic: a,
                expected_arithmetic: e.arithmetic,
            }
        })
        .collect();
    Table2Report { p: db.p, rows }
}

/// Twelve significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// Writes `trace_hist.csv`, `ks.csv`, `asymmetry.csv` and `strata.csv`.
pub fn emit_csv(db: &Database, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir)?;
    let p = db.p;
    let empty = db.records.is_empty();
    let hist = trace_histogram(db);
    let dens = ks_density(&hist);
    let mut paths = Vec::new();
    let mut emit = |name: &str, header: &str, rows: Vec<String>| -> Result<()> {
        let path = dir.join(name);
        let mut f = fs::File::create(&path)?;
        writeln!(f, "{header}")?;
        for r in rows {
            writeln!(f, "{r}")?;
        }
        paths.push(path);
        Ok(())
    };
    let rows = |v: Vec<String>| if empty { Vec::new() } else { v };
    emit("trace_hist.csv", "p,t,count", rows(hist.traces().map(|(t, c)| format!("{p},{t},{c}")).collect()))?;
    emit(
        "ks.csv",
        "p,tau,density",
        rows(dens.points.iter().map(|&(t, d)| format!("{p},{},{}", format_float(t), format_float(d))).collect()),
    )?;
    emit(
        "asymmetry.csv",
        "p,tau,diff",
        rows(asymmetry(&dens).iter().map(|&(t, d)| format!("{p},{},{}", format_float(t), format_float(d))).collect()),
    )?;
    let report = verify_table2(db);
    emit(
        "strata.csv",
        "p,group,observed_geom,expected_geom,observed_arith,expected_arith",
        rows(
            report
                .rows
                .iter()
                .filter(|r| r.stratum.is_some())
                .map(|r| {
                    format!(
                        "{p},{},{},{},{},{}",
                        r.label(),
                        r.observed_geometric,
                        r.expected_geometric,
                        r.observed_arithmetic,
                        r.expected_arithmetic
                    )
                })
                .collect(),
        ),
    )?;
    Ok(paths)
}
