use super::{parse_molecule, read_file, Element, Series};
use crate::{Error, Result};
use serde::Deserialize;
use std::path::Path;

/// One row of the reference dipole table (magnitudes in debye, distances in bohr).
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ReferenceRow {
    pub molecule: String,
    pub series: String,
    #[serde(rename = "D_Re")]
    pub d_re: f64,
    #[serde(rename = "Re")]
    pub re: f64,
    #[serde(rename = "D_Rd")]
    pub d_rd: f64,
    #[serde(rename = "Rd")]
    pub rd: f64,
    #[serde(rename = "D_v0")]
    pub d_v0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceDipoleTable {
    pub rows: Vec<ReferenceRow>,
}

impl ReferenceDipoleTable {
    pub fn get(&self, molecule: &str, series: Series) -> Option<&ReferenceRow> {
        let s = series.to_string();
        self.rows.iter().find(|r| r.molecule == molecule && r.series == s)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct BasisSizeRow {
    pub molecule: String,
    pub series: String,
    pub functions: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct AtomicDeltaRow {
    pub atom: String,
    pub level: String,
    pub l: usize,
    #[serde(rename = "delta_A")]
    pub delta_a: Option<f64>,
    #[serde(rename = "delta_B")]
    pub delta_b: Option<f64>,
    #[serde(rename = "delta_C")]
    pub delta_c: Option<f64>,
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path, expected_header: &[&str]) -> Result<Vec<T>> {
    let text = read_file(path)?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .clone();
    if header.iter().ne(expected_header.iter().copied()) {
        return Err(Error::parse(
            path,
            1,
            format!("expected header '{}'", expected_header.join(",")),
        ));
    }
    rdr.deserialize()
        .map(|r| {
            r.map_err(|e: csv::Error| {
                let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
                Error::parse(path, line, e.to_string())
            })
        })
        .collect()
}

fn check_molecule(path: &Path, row: usize, molecule: &str, series: &str) -> Result<()> {
    let (a, b): (Element, Element) =
        parse_molecule(molecule).map_err(|e| Error::parse(path, row, e.to_string()))?;
    if a.mass_rank() >= b.mass_rank() {
        return Err(Error::parse(path, row, format!("{molecule}: lighter atom must come first")));
    }
    series
        .parse::<Series>()
        .map_err(|e| Error::parse(path, row, e.to_string()))?;
    Ok(())
}

pub fn load_reference_table(path: &Path) -> Result<ReferenceDipoleTable> {
    let rows: Vec<ReferenceRow> =
        read_rows(path, &["molecule", "series", "D_Re", "Re", "D_Rd", "Rd", "D_v0"])?;
    for (i, r) in rows.iter().enumerate() {
        let line = i + 2;
        check_molecule(path, line, &r.molecule, &r.series)?;
        if [r.d_re, r.re, r.d_rd, r.rd, r.d_v0].iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::parse(path, line, "values must be non-negative"));
        }
        if !(r.rd > r.re) {
            return Err(Error::parse(path, line, "Rd must exceed Re"));
        }
    }
    Ok(ReferenceDipoleTable { rows })
}

pub fn load_basis_sizes(path: &Path) -> Result<Vec<BasisSizeRow>> {
    let rows: Vec<BasisSizeRow> = read_rows(path, &["molecule", "series", "functions"])?;
    for (i, r) in rows.iter().enumerate() {
        check_molecule(path, i + 2, &r.molecule, &r.series)?;
    }
    Ok(rows)
}

pub fn load_atomic_deltas(path: &Path) -> Result<Vec<AtomicDeltaRow>> {
    read_rows(path, &["atom", "level", "l", "delta_A", "delta_B", "delta_C"])
}

/// Reference core-core terms at the equilibrium distance (cm⁻¹).
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct VccReferenceRow {
    pub molecule: String,
    #[serde(rename = "Re")]
    pub re: f64,
    #[serde(rename = "V_disp_cm1")]
    pub v_disp_cm1: f64,
    #[serde(rename = "V_rep_pavolini_cm1")]
    pub v_rep_pavolini_cm1: Option<f64>,
    #[serde(rename = "V_rep_jeung_A_cm1")]
    pub v_rep_jeung_a_cm1: Option<f64>,
    #[serde(rename = "V_rep_jeung_E_cm1")]
    pub v_rep_jeung_e_cm1: Option<f64>,
}

pub fn load_vcc_reference(path: &Path) -> Result<Vec<VccReferenceRow>> {
    let rows: Vec<VccReferenceRow> = read_rows(
        path,
        &["molecule", "Re", "V_disp_cm1", "V_rep_pavolini_cm1", "V_rep_jeung_A_cm1", "V_rep_jeung_E_cm1"],
    )?;
    for (i, r) in rows.iter().enumerate() {
        check_molecule(path, i + 2, &r.molecule, "A")?;
        if !(r.re > 0.0) {
            return Err(Error::parse(path, i + 2, "Re must be positive"));
        }
    }
    Ok(rows)
}
