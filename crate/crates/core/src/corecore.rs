//! Core-core energy terms and assembly of total potential curves.
//!
//! The electronic CI energy is complemented by the Coulomb repulsion of the
//! two unit cores, the attraction of each core charge to the dipole it
//! induces on the other core, an optional London dispersion between the
//! polarizable cores, and an optional exponential short-range repulsion.
//! None of these terms touch the wavefunction, so dipoles are unaffected.

use crate::curve::{parabola_vertex, Curve, PotentialCurve};
use crate::data::CoreParameters;
use crate::units::hartree_to_cm1;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Energies entering the London formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DispersionSource {
    /// First ionization energies of the neutral atoms.
    #[default]
    NeutralAtomIp,
    /// Ionization energies of the M⁺ ions.
    IonIp,
}

/// Radius below which the dispersion term is frozen.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DispersionCutoff {
    /// Two bohr inside the minimum of V′.
    #[default]
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Repulsion {
    /// Prefactor (hartree).
    pub a: f64,
    /// Decay constant (1/bohr).
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoreCoreModel {
    pub coulomb: bool,
    pub induced_dipole: bool,
    pub dispersion: bool,
    pub repulsion: Option<Repulsion>,
    pub dispersion_source: DispersionSource,
    pub dispersion_cutoff: DispersionCutoff,
}

impl Default for CoreCoreModel {
    fn default() -> Self {
        CoreCoreModel {
            coulomb: true,
            induced_dipole: true,
            dispersion: false,
            repulsion: None,
            dispersion_source: DispersionSource::NeutralAtomIp,
            dispersion_cutoff: DispersionCutoff::Auto,
        }
    }
}

impl CoreCoreModel {
    /// No terms at all.
    pub fn none() -> Self {
        CoreCoreModel {
            coulomb: false,
            induced_dipole: false,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(rep) = self.repulsion {
            if !(rep.a >= 0.0 && rep.b > 0.0) {
                return Err(Error::Invalid(format!("repulsion needs A >= 0 and b > 0, got A = {}, b = {}", rep.a, rep.b)));
            }
        }
        if let DispersionCutoff::Fixed(r) = self.dispersion_cutoff {
            if !(r >= 0.0) {
                return Err(Error::Invalid(format!("dispersion cutoff must be >= 0, got {r}")));
            }
        }
        Ok(())
    }
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Invalid(format!("internuclear distance must be positive, got {r}")))
    }
}

/// −(α + α′)/(2R⁴).
pub fn induced_dipole_term(a: &CoreParameters, b: &CoreParameters, r: f64) -> Result<f64> {
    check_r(r)?;
    Ok(-(a.alpha_d + b.alpha_d) / (2.0 * r.powi(4)))
}

/// −(3αα′/2R⁶)·EE′/(E + E′).
pub fn london_dispersion(a: &CoreParameters, b: &CoreParameters, r: f64, source: DispersionSource) -> Result<f64> {
    check_r(r)?;
    let (ea, eb) = match source {
        DispersionSource::NeutralAtomIp => (a.ionization_energy, b.ionization_energy),
        DispersionSource::IonIp => (a.ion_ionization_energy, b.ion_ionization_energy),
    };
    if !(ea > 0.0 && eb > 0.0) {
        return Err(Error::Invalid("dispersion needs positive ionization energies".into()));
    }
    Ok(-1.5 * a.alpha_d * b.alpha_d / r.powi(6) * ea * eb / (ea + eb))
}

pub fn repulsion_term(rep: Repulsion, r: f64) -> f64 {
    rep.a * (-rep.b * r).exp()
}

/// Individual core-core contributions at one distance (hartree).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoreCoreTerms {
    pub coulomb: f64,
    pub induced_dipole: f64,
    pub dispersion: f64,
    pub repulsion: f64,
}

impl CoreCoreTerms {
    /// Sum of everything except the Coulomb repulsion.
    pub fn corrections(&self) -> f64 {
        self.induced_dipole + self.dispersion + self.repulsion
    }
}

/// Enabled terms at R; dispersion is frozen below `r_cut`.
pub fn terms(model: &CoreCoreModel, cores: [&CoreParameters; 2], r: f64, r_cut: f64) -> Result<CoreCoreTerms> {
    check_r(r)?;
    let [a, b] = cores;
    Ok(CoreCoreTerms {
        coulomb: if model.coulomb { a.charge * b.charge / r } else { 0.0 },
        induced_dipole: if model.induced_dipole { induced_dipole_term(a, b, r)? } else { 0.0 },
        dispersion: if model.dispersion {
            london_dispersion(a, b, r.max(r_cut), model.dispersion_source)?
        } else {
            0.0
        },
        repulsion: model.repulsion.map_or(0.0, |rep| repulsion_term(rep, r)),
    })
}

/// Curves produced from one electronic energy curve.
#[derive(Debug, Clone)]
pub struct AssembledCurves {
    /// E_CI plus 1/R (when enabled), zero at the largest grid point.
    pub v_prime: PotentialCurve,
    /// V′ plus the enabled correction terms, zero at the largest grid point.
    pub v: PotentialCurve,
    /// Dispersion cutoff actually used (bohr), if dispersion is on.
    pub dispersion_cutoff: Option<f64>,
}

fn rereference(mut c: Curve) -> Curve {
    let last = c.values[c.values.len() - 1];
    for v in &mut c.values {
        *v -= last;
    }
    c
}

/// Adds the model's core-core terms to an electronic energy curve.
pub fn assemble(electronic: &PotentialCurve, cores: [&CoreParameters; 2], model: &CoreCoreModel) -> Result<AssembledCurves> {
    model.validate()?;
    let coulomb_only = CoreCoreModel {
        coulomb: model.coulomb,
        ..CoreCoreModel::none()
    };
    let mut v_prime = electronic.clone();
    for (v, &r) in v_prime.values.iter_mut().zip(&electronic.r) {
        *v += terms(&coulomb_only, cores, r, 0.0)?.coulomb;
    }
    v_prime.label = format!("{} V'", electronic.label);
    let v_prime = rereference(v_prime);
    let r_cut = match (model.dispersion, model.dispersion_cutoff) {
        (false, _) => None,
        (true, DispersionCutoff::Fixed(r)) => Some(r),
        (true, DispersionCutoff::Auto) => Some(summarize(&v_prime, None).map_or(0.0, |s| (s.r_e - 2.0).max(0.0))),
    };
    let mut v = v_prime.clone();
    for (val, &r) in v.values.iter_mut().zip(&electronic.r) {
        *val += terms(model, cores, r, r_cut.unwrap_or(0.0))?.corrections();
    }
    v.label = format!("{} V", electronic.label);
    Ok(AssembledCurves {
        v_prime,
        v: rereference(v),
        dispersion_cutoff: r_cut,
    })
}

/// Characteristic distances of a potential curve and its dipole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSummary {
    pub r_e: f64,
    pub d_e_cm1: f64,
    /// Position and value of the dipole extremum (largest |D|).
    pub r_d: Option<f64>,
    pub d_rd: Option<f64>,
    /// Dipole interpolated at R_e.
    pub d_re: Option<f64>,
}

/// Interior grid index of the smallest value, or None when the minimum
/// sits on the grid edge.
fn interior_min(values: &[f64]) -> Option<usize> {
    let i = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)?;
    (i > 0 && i + 1 < values.len()).then_some(i)
}

fn vertex_at(c: &Curve, i: usize) -> (f64, f64) {
    parabola_vertex([c.r[i - 1], c.r[i], c.r[i + 1]], [c.values[i - 1], c.values[i], c.values[i + 1]])
}

/// Equilibrium distance and well depth by a parabola through the three
/// lowest grid points; dipole extremum likewise.
pub fn summarize(curve: &PotentialCurve, dipole: Option<&Curve>) -> Result<CurveSummary> {
    let asymptote = curve.values[curve.len() - 1];
    let i = interior_min(&curve.values)
        .filter(|&i| curve.values[i] < asymptote)
        .ok_or_else(|| Error::NoWell(format!("{}: no interior minimum below the asymptote", curve.label)))?;
    let (r_e, v_e) = vertex_at(curve, i);
    let mut out = CurveSummary {
        r_e,
        d_e_cm1: hartree_to_cm1(asymptote - v_e),
        r_d: None,
        d_rd: None,
        d_re: None,
    };
    if let Some(d) = dipole {
        let s = d.spline();
        out.d_re = s.try_eval(r_e);
        let mag: Vec<f64> = d.values.iter().map(|v| -v.abs()).collect();
        if let Some(j) = interior_min(&mag) {
            let (rd, drd) = vertex_at(d, j);
            out.r_d = Some(rd);
            out.d_rd = Some(drd);
        }
    }
    Ok(out)
}

/// reference − computed on the computed grid; the reference is splined and
/// never extrapolated.
pub fn empirical_shift(reference: &PotentialCurve, computed: &PotentialCurve) -> Result<Curve> {
    if computed.r_min() < reference.r_min() || computed.r_max() > reference.r_max() {
        return Err(Error::Invalid(format!(
            "computed grid [{}, {}] extends beyond the reference range [{}, {}]",
            computed.r_min(),
            computed.r_max(),
            reference.r_min(),
            reference.r_max()
        )));
    }
    let s = reference.spline();
    Ok(computed.map(format!("shift {} - {}", reference.label, computed.label), |r, v| s.eval(r) - v))
}

/// Adds a shift curve, interpolating it when the grids differ.
pub fn apply_shift(curve: &PotentialCurve, shift: &Curve) -> Result<PotentialCurve> {
    if curve.same_grid(shift) {
        let mut out = curve.clone();
        for (v, s) in out.values.iter_mut().zip(&shift.values) {
            *v += s;
        }
        return Ok(out);
    }
    if curve.r_min() < shift.r_min() || curve.r_max() > shift.r_max() {
        return Err(Error::Invalid("shift curve does not cover the curve's grid".into()));
    }
    let s = shift.spline();
    Ok(curve.map(curve.label.clone(), |r, v| v + s.eval(r)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn morse_summary() {
        let (de, a, re) = (0.02, 0.5, 7.3);
        let r: Vec<f64> = (0..400).map(|i| 4.0 + 0.05 * i as f64).collect();
        let v: Vec<f64> = r.iter().map(|x| de * ((1.0 - (-a * (x - re)).exp()).powi(2) - 1.0)).collect();
        let c = Curve::new(r, v, "morse").unwrap();
        let s = summarize(&c, None).unwrap();
        assert!((s.r_e - re).abs() < 1e-3, "{}", s.r_e);
    }

    #[test]
    fn repulsive_curve_has_no_well() {
        let r: Vec<f64> = (1..30).map(|i| i as f64).collect();
        let v: Vec<f64> = r.iter().map(|x| 1.0 / x).collect();
        let c = Curve::new(r, v, "rep").unwrap();
        assert!(matches!(summarize(&c, None), Err(Error::NoWell(_))));
    }
}
