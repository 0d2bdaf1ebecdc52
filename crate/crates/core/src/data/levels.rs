use super::keyvalue::{parse_f64, parse_key_values};
use super::{read_file, Element};
use crate::units::{cm1_to_hartree, hartree_to_cm1};
use crate::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub term: String,
    pub l: usize,
    /// Binding energy below the ionization limit (hartree).
    pub binding: f64,
}

/// Experimental one-electron levels of a neutral alkali atom.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentalLevels {
    pub atom: Element,
    pub ionization_limit: f64,
    pub levels: Vec<Level>,
}

impl ExperimentalLevels {
    /// Levels of symmetry ℓ sorted from most to least bound.
    pub fn for_l(&self, l: usize) -> Vec<&Level> {
        let mut v: Vec<&Level> = self.levels.iter().filter(|x| x.l == l).collect();
        v.sort_by(|a, b| b.binding.total_cmp(&a.binding));
        v
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels.iter().any(|l| !(l.binding > 0.0)) {
            return Err(Error::Invalid(format!("{}: binding energies must be positive", self.atom)));
        }
        for l in 0..3 {
            if self.for_l(l).len() < 2 {
                return Err(Error::Invalid(format!(
                    "{}: need at least two levels with l = {l}",
                    self.atom
                )));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "atom = {}", self.atom);
        let _ = writeln!(s, "ionization_limit_cm1 = {}", hartree_to_cm1(self.ionization_limit));
        for lv in &self.levels {
            let _ = writeln!(s, "level = {} {} {}", lv.term, lv.l, hartree_to_cm1(lv.binding));
        }
        s
    }

    pub fn parse(path: &Path, text: &str) -> Result<ExperimentalLevels> {
        let mut atom = None;
        let mut limit = None;
        let mut levels = Vec::new();
        for kv in parse_key_values(path, text)? {
            match kv.key.as_str() {
                "atom" => atom = Some(kv.value.parse::<Element>().map_err(|e| Error::parse(path, kv.line, e.to_string()))?),
                "ionization_limit_cm1" => limit = Some(cm1_to_hartree(parse_f64(path, &kv)?)),
                "level" => {
                    let toks: Vec<&str> = kv.value.split_whitespace().collect();
                    let parsed = (toks.len() == 3)
                        .then(|| Some((toks[1].parse::<usize>().ok()?, toks[2].parse::<f64>().ok()?)))
                        .flatten();
                    let (l, cm) = parsed
                        .ok_or_else(|| Error::parse(path, kv.line, "expected 'level = <term> <l> <binding_cm1>'"))?;
                    if !(cm > 0.0) {
                        return Err(Error::parse(path, kv.line, "binding energy must be positive"));
                    }
                    levels.push(Level {
                        term: toks[0].to_string(),
                        l,
                        binding: cm1_to_hartree(cm),
                    });
                }
                key => return Err(Error::parse(path, kv.line, format!("unknown key '{key}'"))),
            }
        }
        let out = ExperimentalLevels {
            atom: atom.ok_or_else(|| Error::parse(path, 0, "missing mandatory key 'atom'"))?,
            ionization_limit: limit
                .ok_or_else(|| Error::parse(path, 0, "missing mandatory key 'ionization_limit_cm1'"))?,
            levels,
        };
        out.validate().map_err(|e| Error::parse(path, 0, e.to_string()))?;
        Ok(out)
    }
}

pub fn load_levels(path: &Path) -> Result<ExperimentalLevels> {
    ExperimentalLevels::parse(path, &read_file(path)?)
}
