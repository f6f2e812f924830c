//! CSV tables and file checks.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use quatl1::{CellSummary, QMatrix, QVector, Quaternion, TrialResult};

pub const SWEEP_HEADER: [&str; 8] =
    ["m", "n", "s", "trials", "successes", "success_rate", "mean_error", "mean_solve_ms"];
pub const TRIAL_HEADER: [&str; 9] = ["m", "n", "s", "trial", "seed", "error_l2", "perfect", "status", "solve_ms"];
pub const SIGNAL_HEADER: [&str; 9] =
    ["index", "re", "im_i", "im_j", "im_k", "re_rec", "im_i_rec", "im_j_rec", "im_k_rec"];
pub const INSTANCE_HEADER: [&str; 7] = ["kind", "row", "col", "re", "im_i", "im_j", "im_k"];
pub const VECTOR_HEADER: [&str; 5] = ["index", "re", "im_i", "im_j", "im_k"];

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Fails unless `path` can be written, without truncating an existing file.
pub fn check_writable(path: &Path) -> Result<()> {
    if path.is_dir() {
        bail!("output path {} is a directory", path.display());
    }
    let existed = path.exists();
    OpenOptions::new()
        .write(true)
        .create(true)
        .truncate(false)
        .open(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    if !existed {
        fs::remove_file(path).ok();
    }
    Ok(())
}

pub fn check_readable(path: &Path) -> Result<()> {
    if !path.is_file() {
        bail!("input file {} does not exist", path.display());
    }
    fs::File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(())
}

fn write_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
    }
    let mut file = fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    file.write_all(&buf).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn write_sweep(path: &Path, m: usize, cells: &[CellSummary]) -> Result<()> {
    write_rows(
        path,
        &SWEEP_HEADER,
        cells.iter().map(|c| {
            vec![
                m.to_string(),
                c.n.to_string(),
                c.s.to_string(),
                c.trials.to_string(),
                c.successes.to_string(),
                real(c.success_rate),
                real(c.mean_error),
                real(c.mean_solve_ms),
            ]
        }),
    )
}

/// `trials` must be grouped by cell in trial order.
pub fn write_trials(path: &Path, trials: &[TrialResult], per_cell: usize) -> Result<()> {
    write_rows(
        path,
        &TRIAL_HEADER,
        trials.iter().enumerate().map(|(i, t)| {
            vec![
                t.spec.m.to_string(),
                t.spec.n.to_string(),
                t.spec.s.to_string(),
                (i % per_cell).to_string(),
                t.spec.seed.to_string(),
                real(t.error_l2),
                t.perfect.to_string(),
                t.solver_status.as_str().to_string(),
                real(t.solve_time.as_secs_f64() * 1e3),
            ]
        }),
    )
}

pub fn write_signals(path: &Path, original: &QVector, recovered: &QVector) -> Result<()> {
    write_rows(
        path,
        &SIGNAL_HEADER,
        original.iter().zip(recovered.iter()).enumerate().map(|(i, (a, b))| {
            std::iter::once(i.to_string())
                .chain(a.components().into_iter().chain(b.components()).map(real))
                .collect()
        }),
    )
}

pub fn write_vector(path: &Path, x: &QVector) -> Result<()> {
    write_rows(
        path,
        &VECTOR_HEADER,
        x.iter()
            .enumerate()
            .map(|(i, q)| std::iter::once(i.to_string()).chain(q.components().into_iter().map(real)).collect()),
    )
}

pub fn write_instance(path: &Path, a: &QMatrix, y: &QVector) -> Result<()> {
    let row = |kind: &str, i: usize, j: usize, q: Quaternion| {
        [kind.to_string(), i.to_string(), j.to_string()]
            .into_iter()
            .chain(q.components().into_iter().map(real))
            .collect::<Vec<_>>()
    };
    let mut rows = Vec::with_capacity(a.rows() * a.cols() + y.len());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            rows.push(row("a", i, j, a.get(i, j)));
        }
    }
    for (i, q) in y.iter().enumerate() {
        rows.push(row("y", i, 0, *q));
    }
    write_rows(path, &INSTANCE_HEADER, rows)
}

fn open_csv(path: &Path, header: &[&str]) -> Result<csv::Reader<fs::File>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let found = rdr.headers().with_context(|| format!("{}: line 1: unreadable header", path.display()))?;
    if found.iter().ne(header.iter().copied()) {
        bail!("{}: line 1: expected header {}, got {}", path.display(), header.join(","), found.iter().collect::<Vec<_>>().join(","));
    }
    Ok(rdr)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, name: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = rec.get(idx).ok_or_else(|| anyhow!("missing column {name}"))?;
    raw.parse().map_err(|e| anyhow!("column {name}: cannot parse {raw:?}: {e}"))
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

/// One `(n, s, rate)` cell per row of a sweep CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCell {
    pub n: usize,
    pub s: usize,
    pub rate: f64,
}

/// Rate cells of a sweep CSV, plus `m` when every row agrees on it.
pub fn read_sweep(path: &Path) -> Result<(Option<usize>, Vec<RateCell>)> {
    let mut rdr = open_csv(path, &SWEEP_HEADER)?;
    let mut cells = Vec::new();
    let mut ms = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            anyhow!("{}: line {line}: {e}", path.display())
        })?;
        let parse = || -> Result<(usize, RateCell)> {
            let m = field(&rec, 0, "m")?;
            let cell = RateCell { n: field(&rec, 1, "n")?, s: field(&rec, 2, "s")?, rate: field(&rec, 5, "success_rate")? };
            for (i, name) in SWEEP_HEADER.iter().enumerate().filter(|(i, _)| ![0, 1, 2, 5].contains(i)) {
                rec.get(i)
                    .ok_or_else(|| anyhow!("missing column {name}"))?
                    .parse::<f64>()
                    .map_err(|e| anyhow!("column {name}: {e}"))?;
            }
            if !(0.0..=1.0).contains(&cell.rate) {
                bail!("success_rate {} outside [0, 1]", cell.rate);
            }
            Ok((m, cell))
        };
        let (m, cell) = parse().with_context(|| format!("{}: line {}", path.display(), line_of(&rec)))?;
        if !seen.insert((cell.n, cell.s)) {
            bail!("{}: line {}: duplicate cell n={}, s={}", path.display(), line_of(&rec), cell.n, cell.s);
        }
        cells.push(cell);
        ms.push(m);
    }
    if cells.is_empty() {
        bail!("{}: no data rows", path.display());
    }
    let m = ms.iter().all(|&m| m == ms[0]).then_some(ms[0]);
    Ok((m, cells))
}

/// Reads `kind,row,col,re,im_i,im_j,im_k` rows: `a` rows fill `A[row, col]`,
/// `y` rows fill `y[row]` (col must be 0). Missing `A` entries are zero;
/// every `y` entry must be present.
pub fn read_instance(path: &Path) -> Result<(QMatrix, QVector)> {
    let mut rdr = open_csv(path, &INSTANCE_HEADER)?;
    let mut a_entries = Vec::new();
    let mut y_entries = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            anyhow!("{}: line {line}: {e}", path.display())
        })?;
        let parse = || -> Result<(String, usize, usize, Quaternion)> {
            let kind = rec.get(0).unwrap_or_default().to_string();
            let c: [f64; 4] = [field(&rec, 3, "re")?, field(&rec, 4, "im_i")?, field(&rec, 5, "im_j")?, field(&rec, 6, "im_k")?];
            Ok((kind, field(&rec, 1, "row")?, field(&rec, 2, "col")?, Quaternion::from_components(c)?))
        };
        let line = line_of(&rec);
        let (kind, i, j, q) = parse().with_context(|| format!("{}: line {line}", path.display()))?;
        match kind.as_str() {
            "a" => a_entries.push((line, i, j, q)),
            "y" if j == 0 => y_entries.push((line, i, q)),
            "y" => bail!("{}: line {line}: y rows need col 0", path.display()),
            other => bail!("{}: line {line}: unknown kind {other:?}", path.display()),
        }
    }
    let n = y_entries.iter().map(|e| e.1 + 1).max().unwrap_or(0);
    let m = a_entries.iter().map(|e| e.2 + 1).max().unwrap_or(0);
    if n == 0 || m == 0 {
        bail!("{}: instance needs at least one a row and one y row", path.display());
    }
    let mut a = vec![None; n * m];
    for (line, i, j, q) in a_entries {
        if i >= n {
            bail!("{}: line {line}: row {i} has no matching y entry", path.display());
        }
        if a[i * m + j].replace(q).is_some() {
            bail!("{}: line {line}: duplicate entry a[{i}, {j}]", path.display());
        }
    }
    let mut y = vec![None; n];
    for (line, i, q) in y_entries {
        if y[i].replace(q).is_some() {
            bail!("{}: line {line}: duplicate entry y[{i}]", path.display());
        }
    }
    let y: Option<Vec<Quaternion>> = y.into_iter().collect();
    let y = y.ok_or_else(|| anyhow!("{}: y has missing rows", path.display()))?;
    let a = QMatrix::new(n, m, a.into_iter().map(|q| q.unwrap_or(Quaternion::ZERO)).collect())?;
    Ok((a, QVector::new(y)))
}
