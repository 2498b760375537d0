//! Run parameters and their layering: built-in defaults, then an optional
//! JSON config file, then command-line flags.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

/// A photon number `N` or an inclusive range `A-B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhotonRange {
    pub min: u32,
    pub max: u32,
}

impl PhotonRange {
    pub fn single(n: u32) -> Self {
        PhotonRange { min: n, max: n }
    }

    pub fn is_single(&self) -> bool {
        self.min == self.max
    }
}

impl FromStr for PhotonRange {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let parse = |t: &str| t.trim().parse::<u32>().with_context(|| format!("invalid photon number {t:?}"));
        let (min, max) = match s.split_once("..=").or_else(|| s.split_once('-')) {
            Some((a, b)) => (parse(a)?, parse(b)?),
            None => {
                let n = parse(s)?;
                (n, n)
            }
        };
        if min == 0 || min > max {
            bail!("photon numbers must satisfy 1 <= min <= max, got {s:?}");
        }
        Ok(PhotonRange { min, max })
    }
}

impl fmt::Display for PhotonRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_single() {
            write!(f, "{}", self.min)
        } else {
            write!(f, "{}-{}", self.min, self.max)
        }
    }
}

impl Serialize for PhotonRange {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_single() {
            s.serialize_u32(self.min)
        } else {
            s.collect_str(self)
        }
    }
}

impl<'de> Deserialize<'de> for PhotonRange {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(u32),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(n) => PhotonRange::from_str(&n.to_string()),
            Raw::Text(t) => PhotonRange::from_str(&t),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Every tunable of a run. Unset fields fall through to the layer below.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<PhotonRange>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settings: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub starts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fix_phase: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<Level>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

macro_rules! overlay_fields {
    ($base:expr, $top:expr, $($field:ident),*) => {
        Parameters { $($field: $top.$field.or($base.$field)),* }
    };
}

impl Parameters {
    /// Fields set in `top` win over those in `self`.
    pub fn overlay(self, top: Parameters) -> Parameters {
        overlay_fields!(
            self,
            top,
            command,
            target,
            n,
            settings,
            seed,
            starts,
            radius,
            grid,
            tolerance,
            max_iterations,
            fix_phase,
            range,
            count,
            order,
            format,
            level,
            threads
        )
    }

    /// Reads a config file: either a bare parameter object or a run manifest,
    /// whose `parameters` entry is used.
    pub fn from_file(path: &Path) -> anyhow::Result<Parameters> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut value: serde_json::Value =
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        if let Some(inner) = value.get_mut("parameters") {
            value = inner.take();
        }
        serde_json::from_value(value).with_context(|| format!("invalid config {}", path.display()))
    }
}
