//! Labeled string collections and their file format.
//!
//! ```text
//! #alphabet=abc
//! +	ab
//! -	ba
//! +
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sample {
    pub text: String,
    pub label: bool,
}

impl Sample {
    pub fn new(text: impl Into<String>, label: bool) -> Sample {
        Sample { text: text.into(), label }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

/// One split of labeled strings over an alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub alphabet: Alphabet,
    pub samples: Vec<Sample>,
}

impl Dataset {
    pub fn new(alphabet: Alphabet, samples: Vec<Sample>) -> Dataset {
        Dataset { alphabet, samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn positives(&self) -> impl Iterator<Item = &Sample> {
        self.samples.iter().filter(|s| s.label)
    }

    pub fn negatives(&self) -> impl Iterator<Item = &Sample> {
        self.samples.iter().filter(|s| !s.label)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("#alphabet={}\n", self.alphabet.as_string());
        for s in &self.samples {
            writeln!(out, "{}\t{}", if s.label { '+' } else { '-' }, s.text).unwrap();
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Dataset> {
        let text = fs::read_to_string(path)?;
        Dataset::parse(&text, &path.display().to_string())
    }

    /// Parses the dataset format; `origin` names the source in diagnostics.
    pub fn parse(text: &str, origin: &str) -> Result<Dataset> {
        let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
        let (ln, header) = lines
            .next()
            .ok_or_else(|| Error::malformed(origin, 1, "empty file, expected `#alphabet=`"))?;
        let alphabet = header
            .strip_prefix("#alphabet=")
            .ok_or_else(|| Error::malformed(origin, ln, "expected `#alphabet=<symbols>`"))
            .and_then(|s| Alphabet::parse(s).map_err(|e| Error::malformed(origin, ln, e.to_string())))?;
        let mut samples = Vec::new();
        for (ln, line) in lines {
            let (label, body) = line
                .split_once('\t')
                .ok_or_else(|| Error::malformed(origin, ln, "expected `<label>\\t<string>`"))?;
            let label = match label {
                "+" => true,
                "-" => false,
                other => return Err(Error::malformed(origin, ln, format!("bad label `{other}`"))),
            };
            if let Some(c) = body.chars().find(|&c| !alphabet.contains(c)) {
                return Err(Error::malformed(origin, ln, format!("character `{c}` is not in the alphabet")));
            }
            samples.push(Sample::new(body, label));
        }
        Ok(Dataset { alphabet, samples })
    }
}

/// Train, validation and test splits of one generated dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct Splits {
    pub train: Dataset,
    pub validation: Dataset,
    pub test: Dataset,
}

impl Splits {
    pub fn get(&self, split: Split) -> &Dataset {
        match split {
            Split::Train => &self.train,
            Split::Validation => &self.validation,
            Split::Test => &self.test,
        }
    }

    /// Writes `train.txt`, `validation.txt` and `test.txt` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for split in Split::ALL {
            self.get(split).save(&dir.join(format!("{}.txt", split.name())))?;
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Splits> {
        let load = |split: Split| Dataset::load(&dir.join(format!("{}.txt", split.name())));
        Ok(Splits {
            train: load(Split::Train)?,
            validation: load(Split::Validation)?,
            test: load(Split::Test)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let sigma = Alphabet::parse("abc").unwrap();
        let d = Dataset::new(
            sigma,
            vec![Sample::new("ab", true), Sample::new("", false), Sample::new("cba", true)],
        );
        let text = d.to_text();
        assert_eq!(text, "#alphabet=abc\n+\tab\n-\t\n+\tcba\n");
        assert_eq!(Dataset::parse(&text, "mem").unwrap(), d);
    }

    #[test]
    fn diagnostics_carry_lines() {
        let err = Dataset::parse("#alphabet=ab\n+\tab\n?\tb\n", "d.txt").unwrap_err();
        assert!(matches!(err, Error::Malformed { line: 3, .. }), "{err}");
        let err = Dataset::parse("#alphabet=ab\n+\tabz\n", "d.txt").unwrap_err();
        assert!(matches!(err, Error::Malformed { line: 2, .. }), "{err}");
        assert!(Dataset::parse("alphabet=ab\n", "d.txt").is_err());
    }
}
