//! Semi-local effective core potentials
//! V = -q/r + v_local(r) + Σ_ℓ v_ℓ(r) P_ℓ with v(r) = Σ_k c_k r^{n_k} e^{-β_k r²}.

use crate::data::Element;
use crate::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcpTerm {
    pub c: f64,
    pub beta: f64,
    /// Power of r, 0, 1 or 2.
    pub n: u8,
}

impl EcpTerm {
    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        self.c * r.powi(self.n as i32) * (-self.beta * r * r).exp()
    }
}

/// Semi-local ECP for one atom. The -q/r tail comes from the core charge.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EcpSpec {
    pub atom: Option<Element>,
    /// Terms for ℓ = s, p, d, f.
    pub channels: [Vec<EcpTerm>; 4],
    pub local: Vec<EcpTerm>,
}

fn eval_terms(terms: &[EcpTerm], r: f64) -> f64 {
    terms.iter().map(|t| t.eval(r)).sum()
}

const CHANNEL_NAMES: [&str; 5] = ["s", "p", "d", "f", "local"];

impl EcpSpec {
    /// v_ℓ(r) for ℓ ≤ 3; higher ℓ feel only the local part.
    pub fn channel(&self, l: usize, r: f64) -> f64 {
        self.channels.get(l).map_or(0.0, |t| eval_terms(t, r))
    }

    pub fn local_value(&self, r: f64) -> f64 {
        eval_terms(&self.local, r)
    }

    pub fn is_empty(&self) -> bool {
        self.local.is_empty() && self.channels.iter().all(|c| c.is_empty())
    }

    pub fn has_semilocal(&self) -> bool {
        self.channels.iter().any(|c| !c.is_empty())
    }

    fn all_terms(&self) -> impl Iterator<Item = &EcpTerm> {
        self.channels.iter().flatten().chain(self.local.iter())
    }

    /// Radius beyond which every term is below e^{-40} of its prefactor.
    pub fn range(&self) -> f64 {
        self.all_terms()
            .map(|t| (40.0 / t.beta).sqrt() + t.n as f64)
            .fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        for t in self.all_terms() {
            if !(t.beta > 0.0 && t.beta.is_finite()) || !t.c.is_finite() {
                return Err(Error::Invalid(format!("ECP term with exponent {} and coefficient {}", t.beta, t.c)));
            }
            if t.n > 2 {
                return Err(Error::Invalid(format!("ECP term with power r^{} (allowed 0, 1, 2)", t.n)));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(a) = self.atom {
            let _ = writeln!(s, "atom = {a}");
        }
        for (l, terms) in self.channels.iter().enumerate() {
            for t in terms {
                let _ = writeln!(s, "term {} {:e} {:e} {}", CHANNEL_NAMES[l], t.c, t.beta, t.n);
            }
        }
        for t in &self.local {
            let _ = writeln!(s, "term local {:e} {:e} {}", t.c, t.beta, t.n);
        }
        s
    }

    /// Parses `atom = X` plus `term <s|p|d|f|local> <c> <beta> <n>` lines.
    pub fn parse(path: &Path, text: &str) -> Result<EcpSpec> {
        let mut spec = EcpSpec::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix("term") {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 4 {
                    return Err(Error::parse(path, line, "expected 'term <l> <c> <beta> <n>'"));
                }
                let slot = CHANNEL_NAMES
                    .iter()
                    .position(|n| *n == toks[0])
                    .or_else(|| toks[0].parse::<usize>().ok().filter(|&l| l <= 3))
                    .ok_or_else(|| Error::parse(path, line, format!("unknown channel '{}'", toks[0])))?;
                let num = |t: &str| {
                    t.parse::<f64>()
                        .map_err(|_| Error::parse(path, line, format!("'{t}' is not a number")))
                };
                let c = num(toks[1])?;
                let beta = num(toks[2])?;
                let n: u8 = toks[3]
                    .parse()
                    .map_err(|_| Error::parse(path, line, "power must be 0, 1 or 2"))?;
                let term = EcpTerm { c, beta, n };
                if !(beta > 0.0) || n > 2 || !c.is_finite() {
                    return Err(Error::parse(path, line, "exponent must be positive and power 0, 1 or 2"));
                }
                if slot == 4 {
                    spec.local.push(term);
                } else {
                    spec.channels[slot].push(term);
                }
            } else if let Some((k, v)) = content.split_once('=') {
                match k.trim() {
                    "atom" => {
                        spec.atom = Some(v.trim().parse().map_err(|e: Error| Error::parse(path, line, e.to_string()))?)
                    }
                    other => return Err(Error::parse(path, line, format!("unknown key '{other}'"))),
                }
            } else {
                return Err(Error::parse(path, line, format!("cannot parse '{content}'")));
            }
        }
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<EcpSpec> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        EcpSpec::parse(path, &text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_round_trip() {
        let text = "atom = Na\nterm s 3.5 0.8 0\nterm p -1.0 0.5 2\nterm local 0.1 2.0 1\n";
        let spec = EcpSpec::parse(Path::new("e"), text).unwrap();
        assert_eq!(spec.channels[0].len(), 1);
        assert_eq!(spec.channels[1][0].n, 2);
        assert_eq!(spec.local.len(), 1);
        let again = EcpSpec::parse(Path::new("e"), &spec.to_text()).unwrap();
        assert_eq!(spec, again);
        assert!((spec.channel(0, 1.0) - 3.5 * (-0.8f64).exp()).abs() < 1e-15);
        assert_eq!(spec.channel(5, 1.0), 0.0);
    }

    #[test]
    fn rejects_bad_terms() {
        assert!(EcpSpec::parse(Path::new("e"), "term s 1.0 -2.0 0\n").is_err());
        assert!(EcpSpec::parse(Path::new("e"), "term g 1.0 2.0 0\n").is_err());
        assert!(EcpSpec::parse(Path::new("e"), "term s 1.0 2.0 3\n").is_err());
    }
}
