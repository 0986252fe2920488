//! Sweep configuration: a flat `key = value` file merged with command-line overrides.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    SpecialOrthogonal,
    Unitary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Coherent,
    Incoherent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Gaussian,
    Dense,
    Both,
}

impl FromStr for Group {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "so" | "special_orthogonal" | "special-orthogonal" | "fermionic" => Ok(Group::SpecialOrthogonal),
            "u" | "su" | "unitary" => Ok(Group::Unitary),
            other => Err(Error::Config(format!("unknown group '{other}'"))),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "coherent" => Ok(Mode::Coherent),
            "incoherent" => Ok(Mode::Incoherent),
            other => Err(Error::Config(format!("unknown mode '{other}'"))),
        }
    }
}

impl FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" => Ok(Backend::Gaussian),
            "dense" => Ok(Backend::Dense),
            "both" => Ok(Backend::Both),
            other => Err(Error::Config(format!("unknown backend '{other}'"))),
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::SpecialOrthogonal => "special_orthogonal",
            Group::Unitary => "unitary",
        })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Coherent => "coherent",
            Mode::Incoherent => "incoherent",
        })
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Gaussian => "gaussian",
            Backend::Dense => "dense",
            Backend::Both => "both",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub group: Group,
    pub mode: Mode,
    pub qubits: Vec<usize>,
    pub ranks: Vec<usize>,
    pub samples: usize,
    pub observable: String,
    pub backend: Backend,
    pub master_seed: u64,
    pub output_path: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            group: Group::SpecialOrthogonal,
            mode: Mode::Coherent,
            qubits: vec![2, 4, 6],
            ranks: vec![1, 2, 4],
            samples: 1000,
            observable: "Z1".into(),
            backend: Backend::Gaussian,
            master_seed: 0,
            output_path: None,
        }
    }
}

/// Values supplied on the command line; each `Some` wins over the file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub group: Option<Group>,
    pub mode: Option<Mode>,
    pub qubits: Option<Vec<usize>>,
    pub ranks: Option<Vec<usize>>,
    pub samples: Option<usize>,
    pub observable: Option<String>,
    pub backend: Option<Backend>,
    pub master_seed: Option<u64>,
    pub output_path: Option<PathBuf>,
}

pub fn parse_list(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let (a, b) = (parse_count(a)?, parse_count(b)?);
            if a > b {
                return Err(Error::Config(format!("empty range '{part}'")));
            }
            out.extend(a..=b);
        } else {
            out.push(parse_count(part)?);
        }
    }
    if out.is_empty() {
        return Err(Error::Config(format!("empty list '{s}'")));
    }
    Ok(out)
}

fn parse_count(s: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| Error::Config(format!("'{s}' is not a nonnegative integer")))
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl SweepConfig {
    /// Applies `key = value` lines from a config file on top of `self`.
    pub fn merge_text(mut self, text: &str) -> Result<Self> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let value = value.trim();
            match key.trim() {
                "group" => self.group = value.parse()?,
                "mode" => self.mode = value.parse()?,
                "qubits" => self.qubits = parse_list(value)?,
                "ranks" => self.ranks = parse_list(value)?,
                "samples" => self.samples = parse_count(value)?,
                "observable" => self.observable = value.to_string(),
                "backend" => self.backend = value.parse()?,
                "seed" => self.master_seed = value.parse().map_err(|_| Error::Config(format!("bad seed '{value}'")))?,
                "out" => self.output_path = Some(PathBuf::from(value)),
                other => return Err(Error::Config(format!("line {}: unknown key '{other}'", lineno + 1))),
            }
        }
        Ok(self)
    }

    pub fn apply(mut self, o: &Overrides) -> Self {
        if let Some(v) = o.group {
            self.group = v;
        }
        if let Some(v) = o.mode {
            self.mode = v;
        }
        if let Some(v) = &o.qubits {
            self.qubits = v.clone();
        }
        if let Some(v) = &o.ranks {
            self.ranks = v.clone();
        }
        if let Some(v) = o.samples {
            self.samples = v;
        }
        if let Some(v) = &o.observable {
            self.observable = v.clone();
        }
        if let Some(v) = o.backend {
            self.backend = v;
        }
        if let Some(v) = o.master_seed {
            self.master_seed = v;
        }
        if let Some(v) = &o.output_path {
            self.output_path = Some(v.clone());
        }
        self
    }

    /// Defaults, then the optional file, then command-line overrides.
    pub fn resolve(file: Option<&std::path::Path>, overrides: &Overrides) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            cfg = cfg.merge_text(&text)?;
        }
        Ok(cfg.apply(overrides))
    }

    /// Renders the configuration in the file format `merge_text` reads.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("group = {}\n", self.group));
        s.push_str(&format!("mode = {}\n", self.mode));
        s.push_str(&format!("qubits = {}\n", join(&self.qubits)));
        s.push_str(&format!("ranks = {}\n", join(&self.ranks)));
        s.push_str(&format!("samples = {}\n", self.samples));
        s.push_str(&format!("observable = {}\n", self.observable));
        s.push_str(&format!("backend = {}\n", self.backend));
        s.push_str(&format!("seed = {}\n", self.master_seed));
        if let Some(p) = &self.output_path {
            s.push_str(&format!("out = {}\n", p.display()));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let text = "# comment\ngroup = unitary\nqubits = 2, 3\nranks = 1..3\nsamples = 50 # trailing\nbackend = dense\nseed = 9\n";
        let cfg = SweepConfig::default().merge_text(text).unwrap();
        assert_eq!(cfg.group, Group::Unitary);
        assert_eq!(cfg.qubits, vec![2, 3]);
        assert_eq!(cfg.ranks, vec![1, 2, 3]);
        assert_eq!(cfg.samples, 50);
        let cfg = cfg.apply(&Overrides { samples: Some(7), ..Default::default() });
        assert_eq!(cfg.samples, 7);
        assert_eq!(cfg.master_seed, 9);
        let again = SweepConfig::default().merge_text(&cfg.to_text()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn rejects_garbage() {
        assert!(SweepConfig::default().merge_text("colour = red").is_err());
        assert!(SweepConfig::default().merge_text("qubits = two").is_err());
        assert!(SweepConfig::default().merge_text("just words").is_err());
        assert!("sp".parse::<Group>().is_err());
    }
}
