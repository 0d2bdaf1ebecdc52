//! Job configuration: a TOML file with sections, validated on load.

use crate::corecore::CoreCoreModel;
use crate::data::{parse_molecule, BasisVariant, Element, Series};
use crate::electronic::{CiOptions, ElectronicOptions, ScfOptions};
use crate::integrals::{IntegralOptions, QuadratureOptions};
use crate::vibrational::VibOptions;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    /// Two atoms, lighter first, e.g. "NaK".
    pub molecule: String,
    /// Series used for both atoms unless overridden.
    pub series: Series,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series_m: Option<Series>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series_m_prime: Option<Series>,
    #[serde(default)]
    pub basis_variant: BasisVariant,
    #[serde(default = "default_states")]
    pub states: Vec<StateName>,
    pub output_dir: PathBuf,
    pub grid: GridSpec,
    #[serde(default)]
    pub corecore: CoreCoreModel,
    #[serde(default)]
    pub vibrational: VibConfig,
    #[serde(default)]
    pub numerics: NumericsConfig,
}

fn default_states() -> Vec<StateName> {
    vec![StateName::X, StateName::A]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StateName {
    X,
    #[serde(rename = "a")]
    A,
}

impl StateName {
    pub fn tag(self) -> &'static str {
        match self {
            StateName::X => "X",
            StateName::A => "a",
        }
    }

    pub fn spin(self) -> crate::electronic::Spin {
        match self {
            StateName::X => crate::electronic::Spin::Singlet,
            StateName::A => crate::electronic::Spin::Triplet,
        }
    }
}

/// Either `min`/`max`/`step` or an explicit `points` list, plus optional
/// `extra` points (for instance a far point fixing the asymptote).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: Vec<f64>,
}

impl GridSpec {
    /// Sorted, de-duplicated grid in bohr.
    pub fn resolve(&self) -> Result<Vec<f64>> {
        let mut r = match (&self.points, self.min, self.max, self.step) {
            (Some(p), None, None, None) => p.clone(),
            (None, Some(a), Some(b), Some(h)) => {
                if !(h > 0.0 && b >= a) {
                    return Err(Error::Config(format!("grid: need step > 0 and max >= min, got {a}..{b} step {h}")));
                }
                let n = ((b - a) / h + 1e-9).floor() as usize;
                (0..=n).map(|i| a + h * i as f64).collect()
            }
            _ => return Err(Error::Config("grid: give either 'points' or all of 'min', 'max', 'step'".into())),
        };
        r.extend(&self.extra);
        if r.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::Config("grid: distances must be positive".into()));
        }
        r.sort_by(f64::total_cmp);
        r.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        if r.len() < 3 {
            return Err(Error::Config("grid: need at least three distances".into()));
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VibConfig {
    /// Upper bound on levels; all bound levels when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_levels: Option<usize>,
    pub tolerance_cm1: f64,
    /// Mass numbers of M and M′; most abundant isotopes when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub isotopes: Option<[u32; 2]>,
}

impl Default for VibConfig {
    fn default() -> Self {
        VibConfig {
            max_levels: None,
            tolerance_cm1: 0.01,
            isotopes: None,
        }
    }
}

impl VibConfig {
    pub fn options(&self) -> VibOptions {
        VibOptions {
            max_levels: self.max_levels,
            tolerance_cm1: self.tolerance_cm1,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsConfig {
    pub cpp: bool,
    pub cpp_two_electron: bool,
    pub quadrature_tolerance: f64,
    pub schwarz: f64,
    pub lindep: f64,
    pub scf_max_iterations: usize,
    pub ci_dense_limit: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        let e = ElectronicOptions::default();
        NumericsConfig {
            cpp: e.integrals.cpp,
            cpp_two_electron: e.integrals.cpp_two_electron,
            quadrature_tolerance: e.integrals.quadrature.tolerance,
            schwarz: e.integrals.schwarz,
            lindep: e.scf.lindep_threshold,
            scf_max_iterations: e.scf.max_iterations,
            ci_dense_limit: e.ci.dense_limit,
        }
    }
}

impl NumericsConfig {
    pub fn electronic_options(&self) -> ElectronicOptions {
        ElectronicOptions {
            integrals: IntegralOptions {
                quadrature: QuadratureOptions {
                    tolerance: self.quadrature_tolerance,
                    ..Default::default()
                },
                schwarz: self.schwarz,
                cpp_two_electron: self.cpp_two_electron,
                cpp: self.cpp,
            },
            scf: ScfOptions {
                max_iterations: self.scf_max_iterations,
                lindep_threshold: self.lindep,
                ..Default::default()
            },
            ci: CiOptions {
                dense_limit: self.ci_dense_limit,
                ..Default::default()
            },
        }
    }
}

impl JobConfig {
    pub fn atoms(&self) -> Result<(Element, Element)> {
        parse_molecule(&self.molecule).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn series_of(&self) -> [Series; 2] {
        [self.series_m.unwrap_or(self.series), self.series_m_prime.unwrap_or(self.series)]
    }

    pub fn parse(path: &Path, text: &str) -> Result<JobConfig> {
        let cfg: JobConfig = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(0);
            Error::parse(path, line, e.message().to_string())
        })?;
        cfg.normalized()
    }

    pub fn load(path: &Path) -> Result<JobConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        JobConfig::parse(path, &text)
    }

    /// Validates and puts the lighter atom first.
    pub fn normalized(mut self) -> Result<JobConfig> {
        let (a, b) = self.atoms()?;
        if a.mass_rank() > b.mass_rank() {
            log::warn!("{}: lighter atom must come first; using {b}{a}", self.molecule);
            self.molecule = format!("{b}{a}");
            std::mem::swap(&mut self.series_m, &mut self.series_m_prime);
            if let Some(iso) = &mut self.vibrational.isotopes {
                iso.swap(0, 1);
            }
        }
        self.grid.resolve()?;
        self.corecore.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.states.is_empty() {
            return Err(Error::Config("states: at least one of \"X\", \"a\" is required".into()));
        }
        self.states.sort();
        self.states.dedup();
        if !(self.vibrational.tolerance_cm1 > 0.0) {
            return Err(Error::Config("vibrational.tolerance_cm1 must be positive".into()));
        }
        Ok(self)
    }

    /// Effective configuration with every default written out.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Comment block embedded at the top of every artifact.
    pub fn header(&self) -> Vec<String> {
        vec![
            format!("alkdimer {}", env!("CARGO_PKG_VERSION")),
            CONFIG_BEGIN.to_string(),
            self.to_toml().trim_end().to_string(),
            CONFIG_END.to_string(),
        ]
    }

    /// Recovers the configuration embedded in an artifact.
    pub fn from_artifact(path: &Path, text: &str) -> Result<JobConfig> {
        let mut inside = false;
        let mut body = String::new();
        for line in text.lines() {
            let Some(c) = line.strip_prefix('#') else { break };
            let c = c.strip_prefix(' ').unwrap_or(c);
            if c == CONFIG_BEGIN {
                inside = true;
            } else if c == CONFIG_END {
                return JobConfig::parse(path, &body);
            } else if inside {
                body.push_str(c);
                body.push('\n');
            }
        }
        Err(Error::parse(path, 0, "no embedded configuration"))
    }
}

const CONFIG_BEGIN: &str = "--- config ---";
const CONFIG_END: &str = "--- end config ---";
