use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::nodal::FormSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    ConstantsTable,
    CombVerify,
    BerezinVerify,
    KernelCheck,
    JetCov,
    ZeroCount,
    NodalLength,
    Pairing,
    #[serde(rename = "euler-3d")]
    Euler3d,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 9] = [
        Self::ConstantsTable,
        Self::CombVerify,
        Self::BerezinVerify,
        Self::KernelCheck,
        Self::JetCov,
        Self::ZeroCount,
        Self::NodalLength,
        Self::Pairing,
        Self::Euler3d,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::ConstantsTable => "constants-table",
            Self::CombVerify => "comb-verify",
            Self::BerezinVerify => "berezin-verify",
            Self::KernelCheck => "kernel-check",
            Self::JetCov => "jet-cov",
            Self::ZeroCount => "zero-count",
            Self::NodalLength => "nodal-length",
            Self::Pairing => "pairing",
            Self::Euler3d => "euler-3d",
        }
    }

    /// Whether the kind draws random samples.
    pub fn is_statistical(self) -> bool {
        matches!(
            self,
            Self::JetCov | Self::ZeroCount | Self::NodalLength | Self::Pairing | Self::Euler3d
        )
    }

    /// Relative slack on top of `3·stderr` for the pass rule, absorbing the
    /// finite-Λ bias of a leading-order prediction.
    pub fn default_tolerance(self) -> f64 {
        match self {
            Self::ZeroCount => 0.03,
            Self::NodalLength | Self::Pairing | Self::KernelCheck => 0.05,
            Self::Euler3d => 0.15,
            _ => 0.0,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| HarnessError::UnknownKind(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(HarnessError::InvalidConfig(format!("unknown format `{s}`"))),
        }
    }
}

fn default_samples() -> usize {
    1000
}

fn default_nodes() -> usize {
    16
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Torus dimension; for the exact kinds, the largest dimension tabulated.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Grid points per axis for mesh extraction.
    #[serde(default)]
    pub grid: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub threads: Option<usize>,
    /// Test form for `pairing`.
    #[serde(default)]
    pub form: Option<FormSpec>,
    /// Gauss–Legendre nodes per sign branch for `pairing`.
    #[serde(default = "default_nodes")]
    pub quadrature_nodes: usize,
    /// Overrides [`ExperimentKind::default_tolerance`].
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    /// Report `seconds = 0` so identical runs give identical files.
    #[serde(default)]
    pub no_timing: bool,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            n: None,
            lambda: None,
            samples: default_samples(),
            grid: None,
            seed: 0,
            threads: None,
            form: None,
            quadrature_nodes: default_nodes(),
            tolerance: None,
            out: None,
            format: OutputFormat::Csv,
            no_timing: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or_else(|| self.kind.default_tolerance())
    }

    /// Dimension after applying the kind's default, checked for the kind.
    pub fn dimension(&self) -> Result<usize, HarnessError> {
        use ExperimentKind::*;
        let (default, allowed): (usize, &[usize]) = match self.kind {
            ConstantsTable | BerezinVerify => (9, &[]),
            CombVerify => (8, &[]),
            KernelCheck | JetCov => (2, &[]),
            ZeroCount => (1, &[1]),
            NodalLength => (2, &[2]),
            Pairing => (1, &[1, 2, 3]),
            Euler3d => (3, &[3]),
        };
        let n = self.n.unwrap_or(default);
        if n == 0 || (!allowed.is_empty() && !allowed.contains(&n)) {
            return Err(HarnessError::InvalidConfig(format!(
                "{} does not support n = {n}",
                self.kind
            )));
        }
        Ok(n)
    }

    pub fn cutoff(&self) -> Result<f64, HarnessError> {
        match self.lambda {
            Some(l) if l >= 1.0 && l.is_finite() => Ok(l),
            Some(l) => Err(HarnessError::InvalidConfig(format!("lambda must be at least 1, got {l}"))),
            None => Err(HarnessError::InvalidConfig(format!("{} needs lambda", self.kind))),
        }
    }

    /// Grid points per axis: the configured value or about 12 per wavelength,
    /// rounded up to a multiple of 8.
    pub fn grid_points(&self, lambda: f64) -> usize {
        self.grid.unwrap_or_else(|| ((12.0 * lambda).ceil() as usize).div_ceil(8) * 8)
    }

    /// Checks kind-specific completeness before anything runs.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.samples == 0 {
            return Err(HarnessError::InvalidConfig("samples must be at least 1".into()));
        }
        self.dimension()?;
        if matches!(self.kind, ExperimentKind::KernelCheck) || self.kind.is_statistical() {
            self.cutoff()?;
        }
        if self.threads == Some(0) {
            return Err(HarnessError::InvalidConfig("threads must be at least 1".into()));
        }
        if let Some(t) = self.tolerance {
            if t.is_nan() || t < 0.0 {
                return Err(HarnessError::InvalidConfig("tolerance must be non-negative".into()));
            }
        }
        if self.form.is_some() && self.kind != ExperimentKind::Pairing {
            return Err(HarnessError::InvalidConfig("form is only used by pairing".into()));
        }
        Ok(())
    }
}
