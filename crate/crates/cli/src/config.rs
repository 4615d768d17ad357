//! Run configuration, its hash and the run manifest.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use cobweb_core::{GridLayout, HierarchyConfig, MembershipKind, SigmaPolicy};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MembershipMode {
    /// Every column treated as nominal.
    Nominal,
    Rect,
    #[default]
    Fuzzy,
}

impl MembershipMode {
    pub fn kind(self) -> MembershipKind {
        match self {
            MembershipMode::Rect => MembershipKind::Rectangular,
            _ => MembershipKind::Gaussian,
        }
    }
}

impl fmt::Display for MembershipMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MembershipMode::Nominal => "nominal",
            MembershipMode::Rect => "rect",
            MembershipMode::Fuzzy => "fuzzy",
        })
    }
}

/// `cell` or `fixed:<value>`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SigmaArg {
    #[default]
    Cell,
    Fixed(f64),
}

impl SigmaArg {
    pub fn policy(self) -> SigmaPolicy<f64> {
        match self {
            SigmaArg::Cell => SigmaPolicy::CellWidth,
            SigmaArg::Fixed(s) => SigmaPolicy::Fixed(s),
        }
    }
}

impl FromStr for SigmaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "cell" {
            return Ok(SigmaArg::Cell);
        }
        let value = s
            .strip_prefix("fixed:")
            .ok_or_else(|| format!("expected `cell` or `fixed:<value>`, got `{s}`"))?;
        match value.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(SigmaArg::Fixed(v)),
            _ => Err(format!("sigma must be a positive number, got `{value}`")),
        }
    }
}

impl fmt::Display for SigmaArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaArg::Cell => f.write_str("cell"),
            SigmaArg::Fixed(v) => write!(f, "fixed:{v}"),
        }
    }
}

impl Serialize for SigmaArg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SigmaArg {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Everything that determines a run's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub schema: Option<PathBuf>,
    pub delimiter: char,
    pub membership: MembershipMode,
    pub grid_size: usize,
    pub sigma: SigmaArg,
    pub seed: u64,
    pub literal_grid: bool,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        RunConfig {
            input: input.into(),
            schema: None,
            delimiter: ',',
            membership: MembershipMode::default(),
            grid_size: 4,
            sigma: SigmaArg::default(),
            seed: 0,
            literal_grid: false,
        }
    }

    pub fn layout(&self) -> GridLayout {
        if self.literal_grid {
            GridLayout::Literal
        } else {
            GridLayout::Offset
        }
    }

    pub fn hierarchy(&self) -> HierarchyConfig<f64> {
        HierarchyConfig::default()
            .with_membership(self.membership.kind())
            .with_grid_size(self.grid_size)
            .with_sigma(self.sigma.policy())
            .with_layout(self.layout())
    }

    /// SHA-256 of the canonical JSON encoding, hex.
    pub fn hash(&self) -> String {
        hash_json(self)
    }
}

pub fn hash_json<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_vec(value).expect("config serializes");
    Sha256::digest(&json)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// One line naming the config hash and seed, prefixed by `comment`.
pub fn provenance_line(comment: &str, hash: &str, seed: u64) -> String {
    format!("{comment} config_hash={hash} seed={seed}\n")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub outputs: Vec<String>,
    pub summary: serde_json::Value,
    /// Seconds since the Unix epoch; the only field that varies between reruns.
    pub generated_at: u64,
}

impl Manifest {
    pub fn new<C: Serialize>(command: &str, config: &C, seed: u64) -> Self {
        Manifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: hash_json(config),
            seed,
            config: serde_json::to_value(config).expect("config serializes"),
            outputs: Vec::new(),
            summary: serde_json::Value::Null,
            generated_at: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_parsing() {
        assert_eq!("cell".parse::<SigmaArg>(), Ok(SigmaArg::Cell));
        assert_eq!("fixed:1".parse::<SigmaArg>(), Ok(SigmaArg::Fixed(1.0)));
        assert!("fixed:0".parse::<SigmaArg>().is_err());
        assert!("fixed:-2".parse::<SigmaArg>().is_err());
        assert!("wide".parse::<SigmaArg>().is_err());
        assert_eq!(SigmaArg::Fixed(0.5).to_string(), "fixed:0.5");
    }

    #[test]
    fn config_round_trip_and_hash() {
        let mut cfg = RunConfig::new("data.csv");
        cfg.sigma = SigmaArg::Fixed(1.0);
        let json = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
        assert_eq!(cfg.hash().len(), 64);
        let mut other = cfg.clone();
        other.seed = 1;
        assert_ne!(other.hash(), cfg.hash());
    }

    #[test]
    fn hierarchy_config_follows_mode() {
        let mut cfg = RunConfig::new("x");
        cfg.membership = MembershipMode::Rect;
        cfg.literal_grid = true;
        let h = cfg.hierarchy();
        assert_eq!(h.membership, MembershipKind::Rectangular);
        assert_eq!(h.layout, GridLayout::Literal);
    }
}
