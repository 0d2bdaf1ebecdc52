//! Input data: basis sets, core parameters, experimental atomic levels and
//! the reference tables used for regression and comparison.
//!
//! Everything here is immutable after loading.

mod basis;
mod core_params;
mod keyvalue;
mod levels;
mod reference;

pub use basis::{
    count_functions, load_basis, AtomBasisSet, AtomShell, BasisVariant, ContractionBlock,
    RadialFunction, Series,
};
pub use core_params::{load_core_parameters, CoreParameters};
pub use keyvalue::{parse_key_values, KeyValue};
pub use levels::{load_levels, ExperimentalLevels, Level};
pub use reference::{
    load_atomic_deltas, load_basis_sizes, load_reference_table, load_vcc_reference, AtomicDeltaRow, BasisSizeRow,
    ReferenceDipoleTable, ReferenceRow, VccReferenceRow,
};

use crate::{Error, Result};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// The five alkali atoms handled by the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub enum Element {
    Li,
    Na,
    K,
    Rb,
    Cs,
}

impl Element {
    pub const ALL: [Element; 5] = [Element::Li, Element::Na, Element::K, Element::Rb, Element::Cs];

    pub fn label(self) -> &'static str {
        match self {
            Element::Li => "Li",
            Element::Na => "Na",
            Element::K => "K",
            Element::Rb => "Rb",
            Element::Cs => "Cs",
        }
    }

    /// Position in the Li < Na < K < Rb < Cs mass ordering.
    pub fn mass_rank(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Element {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Li" => Ok(Element::Li),
            "Na" => Ok(Element::Na),
            "K" => Ok(Element::K),
            "Rb" => Ok(Element::Rb),
            "Cs" => Ok(Element::Cs),
            other => Err(Error::Invalid(format!("unknown alkali atom '{other}'"))),
        }
    }
}

/// Splits a molecule label such as `"NaK"` into its two atoms.
pub fn parse_molecule(label: &str) -> Result<(Element, Element)> {
    let bytes = label.as_bytes();
    let split = (1..bytes.len())
        .find(|&i| bytes[i].is_ascii_uppercase())
        .ok_or_else(|| Error::Invalid(format!("cannot split molecule label '{label}'")))?;
    Ok((label[..split].parse()?, label[split..].parse()?))
}

/// Name of the environment variable overriding the bundled data directory.
pub const DATA_DIR_ENV: &str = "ALKDIMER_DATA";

/// Layout of the data directory.
#[derive(Debug, Clone)]
pub struct DataDir {
    root: PathBuf,
}

impl DataDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        DataDir { root: root.into() }
    }

    /// `$ALKDIMER_DATA` if set, otherwise the repository's `data/` directory.
    pub fn from_env() -> Self {
        match std::env::var_os(DATA_DIR_ENV) {
            Some(p) => DataDir::new(p),
            None => DataDir::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data")),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn basis_path(&self, atom: Element, series: Series, variant: BasisVariant) -> PathBuf {
        let dir = match variant {
            BasisVariant::Raw => "raw",
            BasisVariant::Curated => "curated",
        };
        self.root.join("basis").join(dir).join(format!("{atom}_{series}.basis"))
    }

    pub fn curation_changelog(&self) -> PathBuf {
        self.root.join("basis").join("curated").join("CHANGELOG")
    }

    pub fn core_path(&self, atom: Element, series: Series) -> PathBuf {
        self.root.join("core").join(format!("{atom}_{series}.core"))
    }

    pub fn levels_path(&self, atom: Element) -> PathBuf {
        self.root.join("levels").join(format!("{atom}.levels"))
    }

    pub fn seed_ecp_path(&self, atom: Element) -> PathBuf {
        self.root.join("ecp").join("seed").join(format!("{atom}.ecp"))
    }

    /// Fitted ECP for a basis series (written by `atom-fit`).
    pub fn fitted_ecp_path(&self, atom: Element, series: Series) -> PathBuf {
        self.root.join("fitted").join(format!("{atom}_{series}.ecp"))
    }

    /// Core parameters with fitted cutoff radii (written by `atom-fit`).
    pub fn fitted_core_path(&self, atom: Element, series: Series) -> PathBuf {
        self.root.join("fitted").join(format!("{atom}_{series}.core"))
    }

    pub fn reference_path(&self, name: &str) -> PathBuf {
        self.root.join("reference").join(name)
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn molecule_labels_split() {
        assert_eq!(parse_molecule("NaK").unwrap(), (Element::Na, Element::K));
        assert_eq!(parse_molecule("RbCs").unwrap(), (Element::Rb, Element::Cs));
        assert!(parse_molecule("Xx").is_err());
        assert!(parse_molecule("li").is_err());
    }
}
