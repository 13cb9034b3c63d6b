//! The thirty benchmark target expressions, one prefix form per line.

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::soire::Soire;

pub const TABLE: &str = include_str!("../fixtures/targets.txt");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixture {
    pub id: usize,
    pub prefix: String,
}

impl Fixture {
    /// The expression over the alphabet of its own symbols.
    pub fn soire(&self) -> Result<Soire> {
        let sigma = Alphabet::from_symbols_in(&self.prefix)?;
        Soire::parse_prefix(&self.prefix, &sigma)
    }

    pub fn soire_over(&self, sigma: &Alphabet) -> Result<Soire> {
        Soire::parse_prefix(&self.prefix, sigma)
    }
}

/// Parses `<id>\t<prefix>` lines; `#` starts a comment line.
pub fn parse_fixtures(text: &str, origin: &str) -> Result<Vec<Fixture>> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let ln = k + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, prefix) = line
            .split_once('\t')
            .ok_or_else(|| Error::malformed(origin, ln, "expected `<id>\\t<prefix>`"))?;
        let id = id
            .trim()
            .parse()
            .map_err(|_| Error::malformed(origin, ln, format!("bad id `{id}`")))?;
        if !crate::notation::validate_prefix(prefix) {
            return Err(Error::malformed(origin, ln, format!("`{prefix}` is not a prefix form")));
        }
        out.push(Fixture {
            id,
            prefix: prefix.to_string(),
        });
    }
    Ok(out)
}

pub fn fixtures() -> Vec<Fixture> {
    parse_fixtures(TABLE, "targets.txt").expect("bundled fixtures parse")
}

pub fn fixture(id: usize) -> Result<Fixture> {
    fixtures()
        .into_iter()
        .find(|f| f.id == id)
        .ok_or_else(|| Error::Config(format!("no fixture with id {id}")))
}
