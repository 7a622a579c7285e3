//! Text formats: CSV rows for residual grids and the compact grid syntax
//! accepted on the command line.
//!
//! Grid syntax is a comma-separated list of items:
//!
//! * `123`: a single integer
//! * `2^16`: a power
//! * `2^16..2^24`: every power of the base between the two exponents
//! * `10..20`: every integer in the closed range

use crate::errfit::ResidualRow;
use crate::error::{Error, Result};
use std::io::Write;

/// Longest grid the parser will expand.
pub const MAX_GRID_LEN: usize = 1_000_000;

/// Reals in CSV output: 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_u64(s: &str) -> Result<u64> {
    s.trim()
        .parse::<u64>()
        .map_err(|e| Error::Parse(format!("bad integer {s:?}: {e}")))
}

fn parse_power(s: &str) -> Result<(u64, u32)> {
    let (base, exp) = s
        .split_once('^')
        .ok_or_else(|| Error::Parse(format!("expected base^exp, got {s:?}")))?;
    let base = parse_u64(base)?;
    let exp = exp
        .trim()
        .parse::<u32>()
        .map_err(|e| Error::Parse(format!("bad exponent in {s:?}: {e}")))?;
    Ok((base, exp))
}

fn checked_pow(base: u64, exp: u32) -> Result<u64> {
    base.checked_pow(exp)
        .ok_or_else(|| Error::Parse(format!("{base}^{exp} overflows")))
}

/// Expand a grid expression into a list of integers, in the order given.
pub fn parse_grid(s: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(Error::Parse("empty grid item".into()));
        }
        if let Some((lo, hi)) = item.split_once("..") {
            if lo.contains('^') || hi.contains('^') {
                let (b1, e1) = parse_power(lo)?;
                let (b2, e2) = parse_power(hi)?;
                if b1 != b2 {
                    return Err(Error::Parse(format!("mixed bases in {item:?}")));
                }
                if e1 > e2 {
                    return Err(Error::Parse(format!("decreasing range {item:?}")));
                }
                if out.len() + (e2 - e1) as usize >= MAX_GRID_LEN {
                    return Err(Error::Parse(format!("grid longer than {MAX_GRID_LEN}")));
                }
                for e in e1..=e2 {
                    out.push(checked_pow(b1, e)?);
                }
            } else {
                let (lo, hi) = (parse_u64(lo)?, parse_u64(hi)?);
                if lo > hi {
                    return Err(Error::Parse(format!("decreasing range {item:?}")));
                }
                if (hi - lo) as u128 + out.len() as u128 >= MAX_GRID_LEN as u128 {
                    return Err(Error::Parse(format!("grid longer than {MAX_GRID_LEN}")));
                }
                out.extend(lo..=hi);
            }
        } else if item.contains('^') {
            let (b, e) = parse_power(item)?;
            out.push(checked_pow(b, e)?);
        } else {
            out.push(parse_u64(item)?);
        }
        if out.len() > MAX_GRID_LEN {
            return Err(Error::Parse(format!("grid longer than {MAX_GRID_LEN}")));
        }
    }
    Ok(out)
}

/// Read rows with header `x,T,R`. Extra columns are ignored.
pub fn parse_residual_csv(input: &str) -> Result<Vec<ResidualRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse(format!("csv header: {e}")))?
        .clone();
    for col in ["x", "T", "R"] {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::Parse(format!("csv is missing column {col:?}")));
        }
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.deserialize::<ResidualRow>().enumerate() {
        let row = rec.map_err(|e| Error::Parse(format!("csv row {}: {e}", i + 1)))?;
        if !row.r.is_finite() {
            return Err(Error::Parse(format!("csv row {}: R is not finite", i + 1)));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Write rows with header `x,T,R`.
pub fn write_residual_csv<W: std::io::Write>(out: W, rows: &[ResidualRow]) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(out);
    writeln!(w, "x,T,R")?;
    for r in rows {
        writeln!(w, "{},{},{}", r.x, r.t, fmt_real(r.r))?;
    }
    w.flush()
}
