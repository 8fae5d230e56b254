use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::dimension::CoveringRecord;
use crate::error::{Error, Result};
use crate::io::RunConfig;

const HEADER: [&str; 5] = ["window_x", "window_y", "r", "rho", "count"];

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Invalid(format!("{}: {e}", path.display()))
}

/// 17 significant digits: enough to reproduce any `f64`.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `# key: value` config lines, the header and one row per record.
pub fn write_covering_csv<W: Write>(
    out: W,
    records: &[CoveringRecord],
    config: &RunConfig,
) -> std::io::Result<()> {
    let mut out = out;
    for (k, v) in config.entries() {
        writeln!(out, "# {k}: {}", v.replace('\n', " "))?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        let y = if r.dim == 2 {
            num(r.window_center[1])
        } else {
            String::new()
        };
        w.write_record([
            num(r.window_center[0]),
            y,
            num(r.r),
            num(r.rho),
            r.count.to_string(),
        ])?;
    }
    w.flush()
}

pub fn emit_covering_csv(
    records: &[CoveringRecord],
    config: &RunConfig,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| io_err(path, e))?;
    let mut buf = BufWriter::new(f);
    write_covering_csv(&mut buf, records, config).map_err(|e| io_err(path, e))?;
    buf.flush().map_err(|e| io_err(path, e))
}

/// Inverse of [`emit_covering_csv`].
pub fn read_covering_csv(path: impl AsRef<Path>) -> Result<(RunConfig, Vec<CoveringRecord>)> {
    let path = path.as_ref();
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| io_err(path, e))?;
    let mut config = RunConfig::new();
    for line in BufReader::new(text.as_bytes()).lines() {
        let line = line.map_err(|e| io_err(path, e))?;
        let Some(rest) = line.strip_prefix("# ") else {
            break;
        };
        let (k, v) = rest
            .split_once(": ")
            .ok_or_else(|| io_err(path, format!("bad config line {line:?}")))?;
        config.set(k, v);
    }
    let mut rd = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = rd.headers().map_err(|e| io_err(path, e))?.clone();
    if header.iter().ne(HEADER) {
        return Err(io_err(path, format!("unexpected header {header:?}")));
    }
    let mut records = Vec::new();
    for row in rd.records() {
        let row = row.map_err(|e| io_err(path, e))?;
        let f = |i: usize| -> Result<f64> {
            row[i]
                .parse()
                .map_err(|_| io_err(path, format!("bad number {:?}", &row[i])))
        };
        let dim = if row[1].is_empty() { 1 } else { 2 };
        records.push(CoveringRecord {
            window_center: [f(0)?, if dim == 2 { f(1)? } else { 0.0 }],
            dim,
            r: f(2)?,
            rho: f(3)?,
            count: row[4]
                .parse()
                .map_err(|_| io_err(path, format!("bad count {:?}", &row[4])))?,
        });
    }
    Ok((config, records))
}
