//! Calibration of cutoff radii and ECP channels against experimental levels.

use super::{check_atoms, level_label, solve_atom, AtomicSpectrum, ChannelProblem};
use crate::data::{AtomBasisSet, CoreParameters, Element, ExperimentalLevels, Series};
use crate::integrals::{EcpSpec, EcpTerm};
use crate::optimize::{golden_section, nelder_mead, NelderMeadOptions};
use crate::units::{fmt12, hartree_to_cm1};
use crate::{Error, Result};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy)]
pub struct CutoffFitOptions {
    /// Weights of the lowest and second-lowest level residuals.
    pub weights: (f64, f64),
    pub bracket: (f64, f64),
    /// Bracket width at which the golden-section search stops (bohr).
    pub tolerance: f64,
    /// Copy the fitted ρ_d into ρ_f.
    pub tie_f_to_d: bool,
}

impl Default for CutoffFitOptions {
    fn default() -> Self {
        CutoffFitOptions {
            weights: (1.0, 0.3),
            bracket: (0.2, 10.0),
            tolerance: 1e-8,
            tie_f_to_d: true,
        }
    }
}

/// Result of fitting one ℓ channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelFit {
    pub l: usize,
    pub rho: f64,
    /// Computed minus experimental binding energy (cm⁻¹) of the lowest two levels.
    pub residuals_cm1: Vec<f64>,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub atom: Element,
    pub channels: Vec<ChannelFit>,
    pub iterations: usize,
    pub converged: bool,
}

/// Samples used to bracket the minimum over ρ.
const BRACKET_SAMPLES: usize = 49;

fn targets(levels: &ExperimentalLevels, l: usize) -> Result<Vec<f64>> {
    let t: Vec<f64> = levels.for_l(l).iter().take(2).map(|lv| lv.binding).collect();
    if t.len() < 2 {
        return Err(Error::Fit(format!("{}: need two experimental levels with l = {l}", levels.atom)));
    }
    Ok(t)
}

/// Residuals in cm⁻¹ (computed minus experimental binding) for eigenvalues `e`.
fn residuals(e: &[f64], target: &[f64]) -> Vec<f64> {
    target
        .iter()
        .enumerate()
        .map(|(i, t)| hartree_to_cm1(e.get(i).map_or(0.0, |&x| -x) - t))
        .collect()
}

fn weighted(res: &[f64], w: (f64, f64)) -> f64 {
    w.0 * res[0] * res[0] + w.1 * res[1] * res[1]
}

/// Weighted Cauchy loss: quadratic below `scale`, logarithmic above, so a
/// level the basis cannot represent does not dominate the fit.
fn robust(res: &[f64], w: (f64, f64), scale: f64) -> f64 {
    let l = |d: f64| scale * scale * (1.0 + (d / scale).powi(2)).ln();
    w.0 * l(res[0]) + w.1 * l(res[1])
}

struct RhoSearch {
    rho: f64,
    value: f64,
    evaluations: usize,
    /// Minimum fell strictly inside the bracket.
    interior: bool,
    /// Objective varies over the bracket.
    sensitive: bool,
    landscape: Vec<(f64, f64)>,
}

/// Minimizes a ρ-dependent objective: geometric sampling to bracket, then
/// golden section between the neighbours of the best sample.
fn search_rho(mut f: impl FnMut(f64) -> f64, opts: &CutoffFitOptions) -> RhoSearch {
    let (lo, hi) = opts.bracket;
    let ratio = (hi / lo).powf(1.0 / (BRACKET_SAMPLES - 1) as f64);
    let landscape: Vec<(f64, f64)> = (0..BRACKET_SAMPLES)
        .map(|i| {
            let r = lo * ratio.powi(i as i32);
            (r, f(r))
        })
        .collect();
    let (imin, &(rmin, vmin)) = landscape
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("non-empty landscape");
    let vmax = landscape.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let sensitive = vmax - vmin > 1e-9 * (1.0 + vmax.abs());
    let mut evaluations = BRACKET_SAMPLES;
    let interior = imin > 0 && imin + 1 < BRACKET_SAMPLES;
    if !sensitive || !interior {
        return RhoSearch {
            rho: rmin,
            value: vmin,
            evaluations,
            interior,
            sensitive,
            landscape,
        };
    }
    let (a, b) = (landscape[imin - 1].0, landscape[imin + 1].0);
    let (rho, value) = golden_section(
        |r| {
            evaluations += 1;
            f(r)
        },
        a,
        b,
        opts.tolerance,
    );
    let (rho, value) = if value <= vmin { (rho, value) } else { (rmin, vmin) };
    RhoSearch {
        rho,
        value,
        evaluations,
        interior,
        sensitive,
        landscape,
    }
}

fn landscape_text(l: &[(f64, f64)]) -> String {
    l.iter()
        .step_by(6)
        .map(|(r, v)| format!("rho={r:.3}: {v:.4e}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Fits ρ_s, ρ_p, ρ_d to the two lowest experimental levels of each ℓ
/// (weighted least squares), returning updated core parameters.
pub fn fit_cutoffs(
    basis: &AtomBasisSet,
    core: &CoreParameters,
    ecp: &EcpSpec,
    levels: &ExperimentalLevels,
    opts: &CutoffFitOptions,
) -> Result<(CoreParameters, FitReport)> {
    check_atoms(basis, core, ecp)?;
    let mut fitted = core.clone();
    let mut channels = Vec::new();
    let mut iterations = 0;
    for l in 0..3 {
        let target = targets(levels, l)?;
        let prob = ChannelProblem::new(basis, l, core.charge, &ecp.local)?;
        let terms = &ecp.channels[l];
        let obj = |rho: f64| weighted(&residuals(&prob.energies(terms, core.alpha_d, rho), &target), opts.weights);
        let s = search_rho(obj, opts);
        if !s.sensitive {
            return Err(Error::Fit(format!(
                "{} l = {l}: residuals insensitive to the cutoff radius",
                basis.atom
            )));
        }
        if !s.interior {
            return Err(Error::Fit(format!(
                "{} l = {l}: no bracket for the cutoff radius in [{}, {}] ({})",
                basis.atom,
                opts.bracket.0,
                opts.bracket.1,
                landscape_text(&s.landscape)
            )));
        }
        iterations += s.evaluations;
        fitted.rho[l] = s.rho;
        channels.push(ChannelFit {
            l,
            rho: s.rho,
            residuals_cm1: residuals(&prob.energies(terms, core.alpha_d, s.rho), &target),
            evaluations: s.evaluations,
        });
    }
    if opts.tie_f_to_d {
        fitted.rho[3] = fitted.rho[2];
    }
    Ok((
        fitted,
        FitReport {
            atom: basis.atom,
            channels,
            iterations,
            converged: true,
        },
    ))
}

#[derive(Debug, Clone, Copy)]
pub struct EcpFitOptions {
    pub cutoffs: CutoffFitOptions,
    /// Penalty (cm⁻² per bohr²) keeping ρ_ℓ near its starting value; the
    /// two levels per channel leave one direction of (c, β, ρ) free.
    pub rho_anchor: f64,
    /// Lowest-level residual (cm⁻¹) counted as converged.
    pub target_cm1: f64,
    pub simplex: NelderMeadOptions,
    /// Simplex restarts from the best point.
    pub restarts: usize,
    /// Exponents (bohr⁻²) seeding the coarse multi-start, each with both signs.
    pub start_exponents: [f64; 4],
    pub start_evaluations: usize,
    /// Admissible term exponents and coefficient magnitude.
    pub beta_range: (f64, f64),
    pub max_coefficient: f64,
    /// Residual (cm⁻¹) above which the loss grows only logarithmically.
    pub loss_scale_cm1: f64,
}

impl Default for EcpFitOptions {
    fn default() -> Self {
        EcpFitOptions {
            cutoffs: CutoffFitOptions {
                tolerance: 1e-7,
                ..CutoffFitOptions::default()
            },
            rho_anchor: 100.0,
            target_cm1: 5.0,
            simplex: NelderMeadOptions {
                max_evaluations: 1500,
                f_tol: 1e-16,
                x_tol: 1e-9,
            },
            restarts: 2,
            start_exponents: [0.15, 0.5, 1.5, 5.0],
            start_evaluations: 250,
            beta_range: (0.1, 30.0),
            max_coefficient: 100.0,
            loss_scale_cm1: 50.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EcpFit {
    pub ecp: EcpSpec,
    pub core: CoreParameters,
    pub report: FitReport,
}

fn unpack(template: &[EcpTerm], x: &[f64]) -> Vec<EcpTerm> {
    template
        .iter()
        .enumerate()
        .map(|(k, t)| EcpTerm {
            c: x[2 * k],
            beta: x[2 * k + 1].exp(),
            n: t.n,
        })
        .collect()
}

/// Fits the s, p, d channel terms of `seed` (coefficients and exponents)
/// with the cutoff radius of each channel re-fitted at every trial point.
/// The f channel and the local part are kept from the seed.
pub fn fit_ecp(
    basis: &AtomBasisSet,
    core: &CoreParameters,
    levels: &ExperimentalLevels,
    seed: &EcpSpec,
    opts: &EcpFitOptions,
) -> Result<EcpFit> {
    if seed.is_empty() {
        return Err(Error::Fit("empty ECP".into()));
    }
    check_atoms(basis, core, seed)?;
    if let Some(l) = (0..3).find(|&l| seed.channels[l].is_empty()) {
        return Err(Error::Fit(format!("seed ECP has no terms for l = {l}")));
    }
    let mut ecp = seed.clone();
    ecp.atom = Some(basis.atom);
    let mut fitted = core.clone();
    let mut channels = Vec::new();
    let mut iterations = 0;
    let mut converged = true;
    for l in 0..3 {
        let target = targets(levels, l)?;
        let prob = ChannelProblem::new(basis, l, core.charge, &seed.local)?;
        let template = seed.channels[l].clone();
        let rho0 = core.rho[l];
        let objective = |x: &[f64]| -> f64 {
            let terms = unpack(&template, x);
            if terms
                .iter()
                .any(|t| !(t.beta >= opts.beta_range.0 && t.beta <= opts.beta_range.1 && t.c.abs() <= opts.max_coefficient))
            {
                return f64::INFINITY;
            }
            let s = search_rho(
                |rho| robust(&residuals(&prob.energies(&terms, core.alpha_d, rho), &target), opts.cutoffs.weights, opts.loss_scale_cm1),
                &opts.cutoffs,
            );
            let r0 = residuals(&prob.energies(&terms, core.alpha_d, s.rho), &target)[0];
            let excess = (r0.abs() - 0.5 * opts.target_cm1).max(0.0);
            s.value + opts.rho_anchor * (s.rho - rho0).powi(2) + 1e4 * excess * excess
        };
        let steps_for = |x: &[f64]| -> Vec<f64> {
            x.iter()
                .enumerate()
                .map(|(i, v)| if i % 2 == 0 { 0.2 * v.abs().max(0.05) } else { 0.2 })
                .collect()
        };
        // coarse multi-start over exponent scale and sign, then polish the best
        let mut starts: Vec<Vec<f64>> = vec![template.iter().flat_map(|t| [t.c, t.beta.ln()]).collect()];
        for &b in &opts.start_exponents {
            for c in [2.0, -2.0] {
                starts.push(template.iter().flat_map(|_| [c, f64::ln(b)]).collect());
            }
        }
        let quick = NelderMeadOptions {
            max_evaluations: opts.start_evaluations,
            ..opts.simplex
        };
        let mut best: Option<(f64, Vec<f64>)> = None;
        for x0 in &starts {
            let r = nelder_mead(objective, x0, &steps_for(x0), quick);
            iterations += r.evaluations;
            if best.as_ref().is_none_or(|b| r.value < b.0) {
                best = Some((r.value, r.x));
            }
        }
        let mut x = best.expect("at least one start").1;
        for _ in 0..=opts.restarts {
            let r = nelder_mead(objective, &x, &steps_for(&x), opts.simplex);
            iterations += r.evaluations;
            x = r.x;
        }
        let terms = unpack(&template, &x);
        let s = search_rho(
            |rho| robust(&residuals(&prob.energies(&terms, core.alpha_d, rho), &target), opts.cutoffs.weights, opts.loss_scale_cm1),
            &opts.cutoffs,
        );
        let res = residuals(&prob.energies(&terms, core.alpha_d, s.rho), &target);
        if !(res[0].abs() <= opts.target_cm1) {
            converged = false;
        }
        fitted.rho[l] = s.rho;
        ecp.channels[l] = terms;
        channels.push(ChannelFit {
            l,
            rho: s.rho,
            residuals_cm1: res,
            evaluations: iterations,
        });
    }
    if opts.cutoffs.tie_f_to_d {
        fitted.rho[3] = fitted.rho[2];
    }
    Ok(EcpFit {
        ecp,
        core: fitted,
        report: FitReport {
            atom: basis.atom,
            channels,
            iterations,
            converged,
        },
    })
}

/// One row of the level-deviation table.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationRow {
    pub atom: Element,
    pub series: Series,
    pub level: String,
    pub l: usize,
    /// Computed minus experimental binding energy; `None` when either is missing.
    pub delta_cm1: Option<f64>,
}

/// Pairs computed and experimental levels of each ℓ in order of binding.
/// Rows cover every experimental level and at least the two lowest
/// computed levels per ℓ.
pub fn deviation_report(spectrum: &AtomicSpectrum, levels: &ExperimentalLevels) -> Vec<DeviationRow> {
    let mut rows = Vec::new();
    let max_l = spectrum.binding.len().max(levels.levels.iter().map(|x| x.l + 1).max().unwrap_or(0));
    for l in 0..max_l {
        let exp = levels.for_l(l);
        let comp = spectrum.binding.get(l).cloned().unwrap_or_default();
        let n = exp.len().max(comp.len().min(2));
        for i in 0..n {
            let delta = match (comp.get(i), exp.get(i)) {
                (Some(c), Some(e)) => Some(hartree_to_cm1(c - e.binding)),
                _ => None,
            };
            rows.push(DeviationRow {
                atom: spectrum.atom,
                series: spectrum.series,
                level: exp.get(i).map_or_else(|| level_label(spectrum.atom, l, i), |e| e.term.clone()),
                l,
                delta_cm1: delta,
            });
        }
    }
    rows
}

pub fn deviation_csv(rows: &[DeviationRow]) -> String {
    let mut s = String::from("atom,series,level,l,delta_cm1\n");
    for r in rows {
        let d = r.delta_cm1.map(fmt12).unwrap_or_default();
        let _ = writeln!(s, "{},{},{},{},{}", r.atom, r.series, r.level, r.l, d);
    }
    s
}

/// Convenience: spectrum of the fitted model.
pub fn fitted_spectrum(basis: &AtomBasisSet, fit: &EcpFit) -> Result<AtomicSpectrum> {
    solve_atom(basis, &fit.core, &fit.ecp)
}
