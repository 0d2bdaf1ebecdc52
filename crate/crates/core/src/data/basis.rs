use super::{read_file, Element};
use crate::{Error, Result};
use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

/// Basis-set series label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub enum Series {
    A,
    B,
    C,
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Series::A => "A",
            Series::B => "B",
            Series::C => "C",
        })
    }
}

impl FromStr for Series {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" => Ok(Series::A),
            "B" => Ok(Series::B),
            "C" => Ok(Series::C),
            other => Err(Error::Invalid(format!("unknown basis series '{other}'"))),
        }
    }
}

/// Whether a basis file is the verbatim exponent table or the typo-corrected one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisVariant {
    #[default]
    Raw,
    Curated,
}

impl fmt::Display for BasisVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisVariant::Raw => "raw",
            BasisVariant::Curated => "curated",
        })
    }
}

impl FromStr for BasisVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "raw" => Ok(BasisVariant::Raw),
            "curated" => Ok(BasisVariant::Curated),
            other => Err(Error::Invalid(format!("unknown basis variant '{other}'"))),
        }
    }
}

/// A contracted function: indices into the shell's primitive list with
/// coefficients referring to normalized primitives.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionBlock {
    pub primitives: Vec<usize>,
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomShell {
    pub l: usize,
    pub exponents: Vec<f64>,
    pub contractions: Vec<ContractionBlock>,
}

/// One radial function of a shell: `(exponent, coefficient)` pairs over
/// normalized primitives. A free primitive has a single pair with coefficient 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFunction {
    pub l: usize,
    pub primitives: Vec<(f64, f64)>,
}

impl AtomShell {
    pub fn free_primitives(&self) -> Vec<usize> {
        let used: HashSet<usize> = self
            .contractions
            .iter()
            .flat_map(|c| c.primitives.iter().copied())
            .collect();
        (0..self.exponents.len()).filter(|i| !used.contains(i)).collect()
    }

    /// Contracted blocks plus free primitives.
    pub fn function_count(&self) -> usize {
        self.contractions.len() + self.free_primitives().len()
    }

    /// Radial functions in file order: contracted blocks first, then free primitives.
    pub fn radial_functions(&self) -> Vec<RadialFunction> {
        let mut out: Vec<RadialFunction> = self
            .contractions
            .iter()
            .map(|c| RadialFunction {
                l: self.l,
                primitives: c
                    .primitives
                    .iter()
                    .zip(&c.coefficients)
                    .map(|(&i, &c)| (self.exponents[i], c))
                    .collect(),
            })
            .collect();
        out.extend(self.free_primitives().into_iter().map(|i| RadialFunction {
            l: self.l,
            primitives: vec![(self.exponents[i], 1.0)],
        }));
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomBasisSet {
    pub atom: Element,
    pub series: Series,
    pub variant: BasisVariant,
    pub shells: Vec<AtomShell>,
}

pub(crate) fn shell_letter(l: usize) -> char {
    ['s', 'p', 'd', 'f'].get(l).copied().unwrap_or('?')
}

fn shell_from_letter(s: &str) -> Option<usize> {
    match s {
        "s" => Some(0),
        "p" => Some(1),
        "d" => Some(2),
        "f" => Some(3),
        _ => None,
    }
}

impl AtomBasisSet {
    pub fn validate(&self) -> Result<()> {
        if self.shells.is_empty() {
            return Err(Error::Invalid(format!("{} basis: no shells", self.atom)));
        }
        for sh in &self.shells {
            let tag = format!("{} {} shell", self.atom, shell_letter(sh.l));
            if sh.l > 3 {
                return Err(Error::Invalid(format!("{tag}: angular momentum above f")));
            }
            if sh.exponents.is_empty() {
                return Err(Error::Invalid(format!("{tag}: no exponents")));
            }
            for &e in &sh.exponents {
                if !(e > 0.0 && e.is_finite()) {
                    return Err(Error::Invalid(format!("{tag}: non-positive exponent {e}")));
                }
            }
            let mut seen = HashSet::new();
            for &e in &sh.exponents {
                if !seen.insert(e.to_bits()) {
                    return Err(Error::Invalid(format!("{tag}: duplicate exponent {e}")));
                }
            }
            let mut owner = HashSet::new();
            for c in &sh.contractions {
                if c.primitives.is_empty() || c.primitives.len() != c.coefficients.len() {
                    return Err(Error::Invalid(format!("{tag}: malformed contraction")));
                }
                for &i in &c.primitives {
                    if i >= sh.exponents.len() {
                        return Err(Error::Invalid(format!("{tag}: contraction references unknown primitive {i}")));
                    }
                    if !owner.insert(i) {
                        return Err(Error::Invalid(format!("{tag}: primitive {i} in two contractions")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Number of contracted functions per angular momentum, indexed by ℓ.
    pub fn shell_counts(&self) -> [usize; 4] {
        let mut out = [0; 4];
        for sh in &self.shells {
            out[sh.l] += sh.function_count();
        }
        out
    }

    /// Radial functions of every shell, ordered by ℓ then file order.
    pub fn radial_functions(&self) -> Vec<RadialFunction> {
        let mut shells: Vec<&AtomShell> = self.shells.iter().collect();
        shells.sort_by_key(|s| s.l);
        shells.iter().flat_map(|s| s.radial_functions()).collect()
    }

    /// Highest angular momentum in the basis.
    pub fn max_l(&self) -> usize {
        self.shells.iter().map(|s| s.l).max().unwrap_or(0)
    }

    /// Returns a copy with one more free primitive in shell `l`.
    pub fn with_extra_primitive(&self, l: usize, exponent: f64) -> AtomBasisSet {
        let mut out = self.clone();
        match out.shells.iter_mut().find(|s| s.l == l) {
            Some(sh) => sh.exponents.push(exponent),
            None => out.shells.push(AtomShell {
                l,
                exponents: vec![exponent],
                contractions: Vec::new(),
            }),
        }
        out
    }

    /// Serializes back to the basis-file format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "atom {} series {}", self.atom, self.series);
        let _ = writeln!(s, "variant {}", self.variant);
        for sh in &self.shells {
            let _ = writeln!(s, "shell {}", shell_letter(sh.l));
            let mut in_block = vec![false; sh.exponents.len()];
            for c in &sh.contractions {
                let _ = writeln!(s, "contract");
                for (&i, &coef) in c.primitives.iter().zip(&c.coefficients) {
                    in_block[i] = true;
                    let _ = writeln!(s, "  {} {}", sh.exponents[i], coef);
                }
                let _ = writeln!(s, "end");
            }
            for (i, e) in sh.exponents.iter().enumerate() {
                if !in_block[i] {
                    let _ = writeln!(s, "{e}");
                }
            }
        }
        s
    }

    pub fn parse(path: &Path, text: &str) -> Result<AtomBasisSet> {
        let mut atom = None;
        let mut series = None;
        let mut variant = BasisVariant::Raw;
        let mut shells: Vec<AtomShell> = Vec::new();
        let mut block: Option<ContractionBlock> = None;
        let mut last_line = 0;

        let num = |tok: &str, line: usize| -> Result<f64> {
            tok.parse::<f64>()
                .map_err(|_| Error::parse(path, line, format!("'{tok}' is not a number")))
        };

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            last_line = line;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            match toks[0] {
                "atom" => {
                    if toks.len() != 4 || toks[2] != "series" {
                        return Err(Error::parse(path, line, "expected 'atom <label> series <A|B|C>'"));
                    }
                    atom = Some(toks[1].parse::<Element>().map_err(|e| Error::parse(path, line, e.to_string()))?);
                    series = Some(toks[3].parse::<Series>().map_err(|e| Error::parse(path, line, e.to_string()))?);
                }
                "variant" => {
                    if toks.len() != 2 {
                        return Err(Error::parse(path, line, "expected 'variant raw|curated'"));
                    }
                    variant = toks[1].parse().map_err(|e: Error| Error::parse(path, line, e.to_string()))?;
                }
                "shell" => {
                    if block.is_some() {
                        return Err(Error::parse(path, line, "'shell' inside contraction block"));
                    }
                    let l = toks
                        .get(1)
                        .and_then(|t| shell_from_letter(t))
                        .filter(|_| toks.len() == 2)
                        .ok_or_else(|| Error::parse(path, line, "expected 'shell <s|p|d|f>'"))?;
                    if shells.iter().any(|s| s.l == l) {
                        return Err(Error::parse(path, line, format!("shell {} declared twice", toks[1])));
                    }
                    shells.push(AtomShell {
                        l,
                        exponents: Vec::new(),
                        contractions: Vec::new(),
                    });
                }
                "contract" => {
                    if shells.is_empty() {
                        return Err(Error::parse(path, line, "'contract' before any shell"));
                    }
                    if block.is_some() {
                        return Err(Error::parse(path, line, "nested contraction block"));
                    }
                    block = Some(ContractionBlock {
                        primitives: Vec::new(),
                        coefficients: Vec::new(),
                    });
                }
                "end" => {
                    let b = block
                        .take()
                        .ok_or_else(|| Error::parse(path, line, "'end' without 'contract'"))?;
                    if b.primitives.is_empty() {
                        return Err(Error::parse(path, line, "empty contraction block"));
                    }
                    shells.last_mut().unwrap().contractions.push(b);
                }
                _ => {
                    let shell = shells
                        .last_mut()
                        .ok_or_else(|| Error::parse(path, line, "exponent before any shell"))?;
                    let exp = num(toks[0], line)?;
                    if !(exp > 0.0 && exp.is_finite()) {
                        return Err(Error::parse(path, line, format!("non-positive exponent {exp}")));
                    }
                    if shell.exponents.contains(&exp) {
                        return Err(Error::parse(path, line, format!("duplicate exponent {exp}")));
                    }
                    match block.as_mut() {
                        Some(b) => {
                            if toks.len() != 2 {
                                return Err(Error::parse(path, line, "expected 'exponent coefficient'"));
                            }
                            b.primitives.push(shell.exponents.len());
                            b.coefficients.push(num(toks[1], line)?);
                        }
                        None => {
                            if toks.len() != 1 {
                                return Err(Error::parse(path, line, "expected a single exponent"));
                            }
                        }
                    }
                    shell.exponents.push(exp);
                }
            }
        }
        if block.is_some() {
            return Err(Error::parse(path, last_line, "unterminated contraction block"));
        }
        let atom = atom.ok_or_else(|| Error::parse(path, 0, "missing 'atom' header"))?;
        let series = series.unwrap_or(Series::A);
        let basis = AtomBasisSet {
            atom,
            series,
            variant,
            shells,
        };
        basis.validate()?;
        Ok(basis)
    }
}

pub fn load_basis(path: &Path) -> Result<AtomBasisSet> {
    AtomBasisSet::parse(path, &read_file(path)?)
}

/// Number of real solid-harmonic functions, Σ (2ℓ+1) × functions per shell.
pub fn count_functions(basis: &AtomBasisSet) -> usize {
    basis
        .shells
        .iter()
        .map(|s| (2 * s.l + 1) * s.function_count())
        .sum()
}
