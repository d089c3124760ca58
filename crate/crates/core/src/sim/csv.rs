//! CSV output: comma separated, LF line endings, 6 significant digits.

use std::fs;
use std::path::Path;

use super::{AsymptoticPoint, SweepPoint, SweepResult};
use crate::capacity::{biawgn_capacity, SnrPoint};
use crate::error::{Error, Result};

pub const SWEEP_HEADER: &str = "snr_db,blocks,bit_errors,ber,block_errors,bler,effective_rate";
const ASYMPTOTIC_HEADER: &str = "snr_db,rate,capacity,exponent,pe";
const DESIGN_HEADER: &str = "rate,design_snr_db,capacity";

/// `%g`-style formatting with 6 significant digits.
pub(crate) fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..6).contains(&exp) {
        format!("{}e{exp}", strip_zeros(mantissa))
    } else {
        strip_zeros(&format!("{x:.*}", (5 - exp) as usize)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub(crate) fn sweep_to_string(result: &SweepResult) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for p in &result.points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt_g(p.snr_db),
            p.blocks,
            p.bit_errors,
            fmt_g(p.ber()),
            p.block_errors,
            fmt_g(p.bler()),
            fmt_g(p.effective_rate)
        ));
    }
    out
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    write_text(path, &sweep_to_string(result))
}

/// Reads a sweep CSV back. The information-bit total is reconstructed from
/// the printed BER and is therefore approximate.
pub fn read_sweep_csv(path: &Path) -> Result<SweepResult> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, l)) if l.trim_end() == SWEEP_HEADER => {}
        Some((n, l)) => return Err(Error::parse(path, n, format!("unexpected header '{l}'"))),
        None => return Err(Error::parse(path, 1, "empty file")),
    }
    let mut points = Vec::new();
    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.trim_end().split(',').collect();
        if cols.len() != 7 {
            return Err(Error::parse(path, n, format!("expected 7 columns, found {}", cols.len())));
        }
        let float = |i: usize| {
            cols[i]
                .parse::<f64>()
                .map_err(|_| Error::parse(path, n, format!("bad number '{}'", cols[i])))
        };
        let int = |i: usize| {
            cols[i]
                .parse::<u64>()
                .map_err(|_| Error::parse(path, n, format!("bad count '{}'", cols[i])))
        };
        let bit_errors = int(2)?;
        let ber = float(3)?;
        let blocks = int(1)?;
        let effective_rate = float(6)?;
        let info_bits = if ber > 0.0 { (bit_errors as f64 / ber).round() as u64 } else { 0 };
        points.push(SweepPoint {
            snr_db: float(0)?,
            blocks,
            bit_errors,
            info_bits,
            block_errors: int(4)?,
            effective_rate,
        });
        // the BLER column is derived; check it parses
        float(5)?;
    }
    Ok(SweepResult { points })
}

pub fn write_asymptotic_csv(points: &[AsymptoticPoint], path: &Path) -> Result<()> {
    write_text(path, &asymptotic_to_string(points))
}

pub(crate) fn asymptotic_to_string(points: &[AsymptoticPoint]) -> String {
    let mut out = String::from(ASYMPTOTIC_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_g(p.snr_db),
            fmt_g(p.rate),
            fmt_g(p.capacity),
            fmt_g(p.exponent),
            fmt_g(p.pe)
        ));
    }
    out
}

pub fn write_design_snr_csv(rate: f64, snr: SnrPoint, path: &Path) -> Result<()> {
    write_text(path, &design_snr_to_string(rate, snr)?)
}

pub(crate) fn design_snr_to_string(rate: f64, snr: SnrPoint) -> Result<String> {
    let c = biawgn_capacity(snr.amplitude())?;
    Ok(format!("{DESIGN_HEADER}\n{},{},{}\n", fmt_g(rate), fmt_g(snr.db()), fmt_g(c)))
}
