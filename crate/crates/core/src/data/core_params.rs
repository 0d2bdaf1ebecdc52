use super::keyvalue::{parse_f64, parse_key_values};
use super::{read_file, Element, Series};
use crate::units::{cm1_to_hartree, hartree_to_cm1};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

/// Ionic-core parameters of one alkali atom for one basis series.
#[derive(Debug, Clone, PartialEq)]
pub struct CoreParameters {
    pub atom: Element,
    pub series: Option<Series>,
    /// Ion dipole polarizability (bohr³).
    pub alpha_d: f64,
    pub alpha_source: String,
    /// Cutoff radii ρ_s, ρ_p, ρ_d, ρ_f (bohr).
    pub rho: [f64; 4],
    pub charge: f64,
    /// Neutral-atom ionization energy (hartree).
    pub ionization_energy: f64,
    /// M⁺ ionization energy (hartree).
    pub ion_ionization_energy: f64,
    /// Isotope masses in amu keyed by mass number.
    pub masses: BTreeMap<u32, f64>,
    pub default_isotope: u32,
}

impl CoreParameters {
    /// Cutoff radius for channel ℓ; channels above f share ρ_f.
    pub fn rho(&self, l: usize) -> f64 {
        self.rho[l.min(3)]
    }

    pub fn mass_amu(&self, isotope: Option<u32>) -> Result<f64> {
        let a = isotope.unwrap_or(self.default_isotope);
        self.masses
            .get(&a)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("no mass for isotope {a}{}", self.atom)))
    }

    pub fn validate(&self) -> Result<()> {
        let who = format!("{} core parameters", self.atom);
        if !(self.alpha_d > 0.0) {
            return Err(Error::Invalid(format!("{who}: alpha_d must be positive")));
        }
        if self.rho.iter().any(|&r| !(r > 0.0)) {
            return Err(Error::Invalid(format!("{who}: cutoff radii must be positive")));
        }
        if self.charge != 1.0 {
            return Err(Error::Invalid(format!("{who}: core charge must be 1")));
        }
        if !(self.ionization_energy > 0.0) || !(self.ion_ionization_energy > self.ionization_energy) {
            return Err(Error::Invalid(format!(
                "{who}: ionization energies must be positive with the ion value larger"
            )));
        }
        if !self.masses.contains_key(&self.default_isotope) {
            return Err(Error::Invalid(format!("{who}: default isotope has no mass")));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "atom = {}", self.atom);
        if let Some(series) = self.series {
            let _ = writeln!(s, "series = {series}");
        }
        let _ = writeln!(s, "charge = {}", self.charge);
        let _ = writeln!(s, "alpha_d = {}", self.alpha_d);
        let _ = writeln!(s, "alpha_source = {}", self.alpha_source);
        for (l, name) in ["s", "p", "d", "f"].iter().enumerate() {
            let _ = writeln!(s, "rho_{name} = {}", self.rho[l]);
        }
        let _ = writeln!(s, "ionization_energy_cm1 = {}", hartree_to_cm1(self.ionization_energy));
        let _ = writeln!(s, "ion_ionization_energy_cm1 = {}", hartree_to_cm1(self.ion_ionization_energy));
        for (a, m) in &self.masses {
            let _ = writeln!(s, "mass_amu.{a} = {m}");
        }
        let _ = writeln!(s, "default_isotope = {}", self.default_isotope);
        s
    }

    pub fn parse(path: &Path, text: &str) -> Result<CoreParameters> {
        let mut atom = None;
        let mut series = None;
        let mut alpha = None;
        let mut alpha_source = String::new();
        let mut rho = [None; 4];
        let mut charge = None;
        let mut ie = None;
        let mut ion_ie = None;
        let mut masses = BTreeMap::new();
        let mut default_isotope = None;

        for kv in parse_key_values(path, text)? {
            let bad = |msg: String| Error::parse(path, kv.line, msg);
            match kv.key.as_str() {
                "atom" => atom = Some(kv.value.parse::<Element>().map_err(|e| bad(e.to_string()))?),
                "series" => series = Some(kv.value.parse::<Series>().map_err(|e| bad(e.to_string()))?),
                "charge" => charge = Some(parse_f64(path, &kv)?),
                "alpha_d" => alpha = Some(parse_f64(path, &kv)?),
                "alpha_source" => alpha_source = kv.value.clone(),
                "rho_s" => rho[0] = Some(parse_f64(path, &kv)?),
                "rho_p" => rho[1] = Some(parse_f64(path, &kv)?),
                "rho_d" => rho[2] = Some(parse_f64(path, &kv)?),
                "rho_f" => rho[3] = Some(parse_f64(path, &kv)?),
                "ionization_energy_cm1" => ie = Some(cm1_to_hartree(parse_f64(path, &kv)?)),
                "ion_ionization_energy_cm1" => ion_ie = Some(cm1_to_hartree(parse_f64(path, &kv)?)),
                "default_isotope" => {
                    default_isotope = Some(kv.value.parse::<u32>().map_err(|_| bad("default_isotope: expected an integer".into()))?)
                }
                key => match key.strip_prefix("mass_amu.") {
                    Some(a) => {
                        let a: u32 = a.parse().map_err(|_| bad(format!("bad mass number in '{key}'")))?;
                        masses.insert(a, parse_f64(path, &kv)?);
                    }
                    None => return Err(bad(format!("unknown key '{key}'"))),
                },
            }
        }
        let missing = |k: &str| Error::parse(path, 0, format!("missing mandatory key '{k}'"));
        let rho_s = rho[0].ok_or_else(|| missing("rho_s"))?;
        let rho_p = rho[1].ok_or_else(|| missing("rho_p"))?;
        let rho_d = rho[2].ok_or_else(|| missing("rho_d"))?;
        let params = CoreParameters {
            atom: atom.ok_or_else(|| missing("atom"))?,
            series,
            alpha_d: alpha.ok_or_else(|| missing("alpha_d"))?,
            alpha_source,
            rho: [rho_s, rho_p, rho_d, rho[3].unwrap_or(rho_d)],
            charge: charge.unwrap_or(1.0),
            ionization_energy: ie.ok_or_else(|| missing("ionization_energy_cm1"))?,
            ion_ionization_energy: ion_ie.ok_or_else(|| missing("ion_ionization_energy_cm1"))?,
            masses,
            default_isotope: default_isotope.ok_or_else(|| missing("default_isotope"))?,
        };
        params
            .validate()
            .map_err(|e| Error::parse(path, 0, e.to_string()))?;
        Ok(params)
    }
}

pub fn load_core_parameters(path: &Path) -> Result<CoreParameters> {
    CoreParameters::parse(path, &read_file(path)?)
}
