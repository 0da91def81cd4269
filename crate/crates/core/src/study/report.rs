//! Text summary of a dataset directory, computed from its CSVs alone.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_rational::Ratio;

use super::{stats, StudyError};
use crate::instance::parse_ratio;

const REQUIRED: [&str; 3] = ["tts.csv", "iterations.csv", "ratio.csv"];

struct Table {
    file: String,
    header: csv::StringRecord,
    rows: Vec<csv::StringRecord>,
}

impl Table {
    fn read(dir: &Path, file: &str) -> Result<Self, StudyError> {
        let mut rdr = csv::Reader::from_path(dir.join(file))?;
        let header = rdr.headers()?.clone();
        let rows = rdr.records().collect::<Result<Vec<_>, _>>()?;
        Ok(Table {
            file: file.to_string(),
            header,
            rows,
        })
    }

    fn col(&self, name: &str) -> Result<usize, StudyError> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| self.malformed(format!("missing column {name}")))
    }

    fn malformed(&self, reason: String) -> StudyError {
        StudyError::Malformed {
            file: self.file.clone(),
            reason,
        }
    }

    fn parse<T: std::str::FromStr>(&self, row: &csv::StringRecord, col: usize) -> Result<T, StudyError> {
        let s = row.get(col).unwrap_or("");
        s.parse()
            .map_err(|_| self.malformed(format!("cannot parse {s:?} in column {}", &self.header[col])))
    }

    fn ratio(&self, row: &csv::StringRecord, col: usize) -> Result<Ratio<u64>, StudyError> {
        parse_ratio(row.get(col).unwrap_or("")).map_err(|e| self.malformed(e))
    }
}

type Cell = (usize, Ratio<u64>);

fn advantage_section(t: &Table, out: &mut String) -> Result<(), StudyError> {
    let (alg, var, n, r, seed, tts) = (
        t.col("algorithm")?,
        t.col("variant")?,
        t.col("n")?,
        t.col("r")?,
        t.col("seed")?,
        t.col("tts")?,
    );
    // (n, r, seed) → (grover, optimized, equidistant)
    let mut per: BTreeMap<(usize, Ratio<u64>, u64), [Option<f64>; 3]> = BTreeMap::new();
    for row in &t.rows {
        let key = (t.parse(row, n)?, t.ratio(row, r)?, t.parse(row, seed)?);
        let slot = match (&row[alg], &row[var]) {
            ("grover", _) => 0,
            ("rba", "optimized") => 1,
            ("rba", "equidistant") => 2,
            (a, v) => return Err(t.malformed(format!("unknown algorithm/variant {a}/{v}"))),
        };
        per.entry(key).or_default()[slot] = Some(t.parse(row, tts)?);
    }
    let mut cells: BTreeMap<Cell, [Vec<f64>; 2]> = BTreeMap::new();
    for ((n, r, _), [g, o, e]) in per {
        let Some(g) = g.filter(|g| g.is_finite() && *g > 0.0) else {
            continue;
        };
        let cell = cells.entry((n, r)).or_default();
        for (i, rba) in [o, e].into_iter().enumerate() {
            if let Some(x) = rba.filter(|x| x.is_finite() && *x > 0.0) {
                cell[i].push(g / x);
            }
        }
    }
    writeln!(out, "median TTS ratio Grover/RBA").unwrap();
    writeln!(
        out,
        "{:>4} {:>6} {:>12} {:>12} {:>5}",
        "n", "r", "optimized", "equidistant", "count"
    )
    .unwrap();
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
    for ((n, r), [o, e]) in &cells {
        writeln!(
            out,
            "{n:>4} {:>6} {:>12} {:>12} {:>5}",
            r.to_string(),
            fmt(stats::median(o)),
            fmt(stats::median(e)),
            o.len().max(e.len())
        )
        .unwrap();
    }
    Ok(())
}

fn iterations_section(t: &Table, out: &mut String) -> Result<(), StudyError> {
    let (alg, n, r, med) = (
        t.col("algorithm")?,
        t.col("n")?,
        t.col("r")?,
        t.col("median_iterations")?,
    );
    let mut cells: BTreeMap<Cell, [Option<f64>; 2]> = BTreeMap::new();
    for row in &t.rows {
        let slot = match &row[alg] {
            "rba" => 0,
            "grover" => 1,
            a => return Err(t.malformed(format!("unknown algorithm {a}"))),
        };
        cells.entry((t.parse(row, n)?, t.ratio(row, r)?)).or_default()[slot] = Some(t.parse(row, med)?);
    }
    writeln!(out, "\nmedian iterations to the failure target").unwrap();
    writeln!(out, "{:>4} {:>6} {:>8} {:>8}", "n", "r", "rba", "grover").unwrap();
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x}"));
    for ((n, r), [a, g]) in &cells {
        writeln!(out, "{n:>4} {:>6} {:>8} {:>8}", r.to_string(), fmt(*a), fmt(*g)).unwrap();
    }
    Ok(())
}

fn ratio_section(t: &Table, out: &mut String) -> Result<(), StudyError> {
    let (l, ratio) = (t.col("L")?, t.col("tts_ratio")?);
    let mut by_l: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for row in &t.rows {
        by_l.entry(t.parse(row, l)?)
            .or_default()
            .push(t.parse(row, ratio)?);
    }
    writeln!(out, "\nmedian TTS ratio equidistant/optimized by L").unwrap();
    let mut ls = Vec::new();
    let mut ms = Vec::new();
    for (l, v) in &by_l {
        if let Some(m) = stats::median(v) {
            writeln!(out, "{l:>4} {m:>10.4} ({} pairs)", v.len()).unwrap();
            ls.push(*l as f64);
            ms.push(m);
        }
    }
    match stats::spearman(&ls, &ms) {
        Some(rho) => writeln!(out, "Spearman(L, median ratio) = {rho:.4}").unwrap(),
        None => writeln!(out, "Spearman(L, median ratio) undefined").unwrap(),
    }
    Ok(())
}

fn bp_section(t: &Table, out: &mut String) -> Result<(), StudyError> {
    let (wi, rate, residual) = (t.col("wi")?, t.col("rate")?, t.col("residual")?);
    writeln!(out, "\ngradient variance decay").unwrap();
    for row in &t.rows {
        let w: usize = t.parse(row, wi)?;
        let rate: f64 = t.parse(row, rate)?;
        let res: f64 = t.parse(row, residual)?;
        writeln!(
            out,
            "  dE/dw{w}: rate {rate:.4} per variable (rms residual {res:.3})"
        )
        .unwrap();
    }
    Ok(())
}

fn thresholds_section(t: &Table, out: &mut String) -> Result<(), StudyError> {
    let (n, r, seed, first, second) = (
        t.col("n")?,
        t.col("r")?,
        t.col("seed")?,
        t.col("tts_first")?,
        t.col("tts_second")?,
    );
    let mut best: BTreeMap<(usize, Ratio<u64>, u64), (f64, f64)> = BTreeMap::new();
    for row in &t.rows {
        let e = best
            .entry((t.parse(row, n)?, t.ratio(row, r)?, t.parse(row, seed)?))
            .or_insert((f64::INFINITY, f64::INFINITY));
        e.0 = e.0.min(t.parse(row, first)?);
        e.1 = e.1.min(t.parse(row, second)?);
    }
    let wins = best.values().filter(|(a, b)| b < a).count();
    writeln!(
        out,
        "\nthreshold below E2 lowers the best TTS on {wins} of {} instances",
        best.len()
    )
    .unwrap();
    Ok(())
}

/// Summary of the CSVs in `dir`. `bp_fit.csv` and `thresholds.csv` are
/// reported when present.
pub fn report(dir: &Path) -> Result<String, StudyError> {
    let missing: Vec<String> = REQUIRED
        .iter()
        .filter(|f| !dir.join(f).is_file())
        .map(|f| f.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(StudyError::MissingFiles {
            dir: dir.to_path_buf(),
            files: missing,
        });
    }
    let mut out = String::new();
    advantage_section(&Table::read(dir, "tts.csv")?, &mut out)?;
    iterations_section(&Table::read(dir, "iterations.csv")?, &mut out)?;
    ratio_section(&Table::read(dir, "ratio.csv")?, &mut out)?;
    if dir.join("bp_fit.csv").is_file() {
        bp_section(&Table::read(dir, "bp_fit.csv")?, &mut out)?;
    }
    if dir.join("thresholds.csv").is_file() {
        thresholds_section(&Table::read(dir, "thresholds.csv")?, &mut out)?;
    }
    Ok(out)
}
