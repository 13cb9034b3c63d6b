//! Text checkpoints for encodings.
//!
//! ```text
//! soire-checkpoint 1
//! bound 6
//! alphabet abc
//! operators a b c ? * + . & | none
//! w
//! <T rows of |B| values>
//! u
//! <t> <t'> <value>      (1-based, (t, t') lexicographic)
//! end
//! ```
//!
//! Values are written with 17 significant digits, which round-trips every f64.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::alphabet::Alphabet;
use crate::encoding::{Column, Encoding};
use crate::error::{Error, Result};

pub const CHECKPOINT_VERSION: u32 = 1;
const MAGIC: &str = "soire-checkpoint";

fn fmt_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_checkpoint_string(e: &Encoding) -> String {
    let sigma = e.alphabet();
    let mut out = String::new();
    writeln!(out, "{MAGIC} {CHECKPOINT_VERSION}").unwrap();
    writeln!(out, "bound {}", e.bound()).unwrap();
    writeln!(out, "alphabet {}", sigma.as_string()).unwrap();
    let names: Vec<String> = (0..e.width())
        .map(|k| Column::from_index(k, sigma.len()).name(sigma))
        .collect();
    writeln!(out, "operators {}", names.join(" ")).unwrap();
    out.push_str("w\n");
    for t in 0..e.bound() {
        let row: Vec<String> = e.w_row(t).iter().map(|&x| fmt_value(x)).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out.push_str("u\n");
    for t in 0..e.bound() {
        for c in t + 2..e.bound() {
            writeln!(out, "{} {} {}", t + 1, c + 1, fmt_value(e.u(t, c))).unwrap();
        }
    }
    out.push_str("end\n");
    out
}

pub fn save_checkpoint(e: &Encoding, path: &Path) -> Result<()> {
    fs::write(path, to_checkpoint_string(e))?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Encoding> {
    let text = fs::read_to_string(path)?;
    parse_checkpoint(&text, &path.display().to_string())
}

/// Parses checkpoint text; `origin` names the source in diagnostics.
pub fn parse_checkpoint(text: &str, origin: &str) -> Result<Encoding> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| Error::malformed(origin, 0, format!("unexpected end of file, expected {what}")))
    };

    let (ln, header) = next("header")?;
    let version = header
        .strip_prefix(MAGIC)
        .map(str::trim)
        .ok_or_else(|| Error::malformed(origin, ln, "not a checkpoint file"))?;
    if version != CHECKPOINT_VERSION.to_string() {
        return Err(Error::malformed(origin, ln, format!("unsupported version {version}")));
    }

    let (ln, line) = next("bound")?;
    let bound: usize = line
        .strip_prefix("bound ")
        .and_then(|v| v.trim().parse().ok())
        .filter(|&b: &usize| b >= 1)
        .ok_or_else(|| Error::malformed(origin, ln, "expected `bound <positive integer>`"))?;

    let (ln, line) = next("alphabet")?;
    let sigma = line
        .strip_prefix("alphabet ")
        .ok_or_else(|| Error::malformed(origin, ln, "expected `alphabet <symbols>`"))
        .and_then(|s| Alphabet::parse(s).map_err(|e| Error::malformed(origin, ln, e.to_string())))?;

    let mut e = Encoding::zeros(&sigma, bound);
    let (ln, line) = next("operators")?;
    let expected: Vec<String> = (0..e.width())
        .map(|k| Column::from_index(k, sigma.len()).name(&sigma))
        .collect();
    if line.strip_prefix("operators ").map(|s| s.split(' ').collect::<Vec<_>>())
        != Some(expected.iter().map(String::as_str).collect())
    {
        return Err(Error::malformed(origin, ln, "operator order does not match this version"));
    }

    let (ln, line) = next("w")?;
    if line != "w" {
        return Err(Error::malformed(origin, ln, "expected `w`"));
    }
    let width = e.width();
    for t in 0..bound {
        let (ln, line) = next("a row of w")?;
        let values = parse_values(line, origin, ln)?;
        if values.len() != width {
            return Err(Error::malformed(origin, ln, format!("expected {width} values")));
        }
        e.w_flat_mut()[t * width..(t + 1) * width].copy_from_slice(&values);
    }

    let (ln, line) = next("u")?;
    if line != "u" {
        return Err(Error::malformed(origin, ln, "expected `u`"));
    }
    for t in 0..bound {
        for c in t + 2..bound {
            let (ln, line) = next("a u entry")?;
            let parts: Vec<&str> = line.split(' ').collect();
            let ok = parts.len() == 3
                && parts[0].parse::<usize>().ok() == Some(t + 1)
                && parts[1].parse::<usize>().ok() == Some(c + 1);
            if !ok {
                return Err(Error::malformed(origin, ln, format!("expected u entry `{} {} <value>`", t + 1, c + 1)));
            }
            let value = parse_values(parts[2], origin, ln)?[0];
            e.set_u(t, c, value);
        }
    }
    let (ln, line) = next("end")?;
    if line != "end" {
        return Err(Error::malformed(origin, ln, "expected `end`"));
    }
    Ok(e)
}

fn parse_values(line: &str, origin: &str, ln: usize) -> Result<Vec<f64>> {
    line.split(' ')
        .map(|v| {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::malformed(origin, ln, format!("bad number `{v}`")))
        })
        .collect()
}
