//! Vibrational levels of a diatomic potential (J = 0) and vibrationally
//! averaged dipoles.
//!
//! The primary solver is a sinc discrete-variable representation on a
//! uniform grid; a Numerov shooting solver with node counting provides an
//! independent check of the eigenvalues.

use crate::curve::{CubicSpline, DipoleCurve, PotentialCurve};
use crate::linalg::sym_eigen;
use crate::optimize::golden_section;
use crate::units::{fmt12, hartree_to_cm1, AMU_TO_ME};
use crate::{Error, Result};
use nalgebra::DMatrix;

/// A radial potential on [inner, ∞).
pub trait Potential: Sync {
    fn value(&self, r: f64) -> f64;
    /// Smallest radius the potential is defined at.
    fn inner(&self) -> f64;
    /// Radius beyond which the potential is at its asymptote (or the end of
    /// the domain for a confining potential).
    fn outer(&self) -> f64;
    /// Dissociation limit; None for confining potentials.
    fn asymptote(&self) -> Option<f64>;
}

/// Natural spline through a curve, constant beyond its last point.
pub struct SplinePotential {
    spline: CubicSpline,
    r_min: f64,
    r_max: f64,
    last: f64,
}

impl SplinePotential {
    pub fn new(curve: &PotentialCurve) -> SplinePotential {
        SplinePotential {
            spline: curve.spline(),
            r_min: curve.r_min(),
            r_max: curve.r_max(),
            last: curve.values[curve.len() - 1],
        }
    }
}

impl Potential for SplinePotential {
    fn value(&self, r: f64) -> f64 {
        if r >= self.r_max {
            self.last
        } else {
            self.spline.eval(r)
        }
    }
    fn inner(&self) -> f64 {
        self.r_min
    }
    fn outer(&self) -> f64 {
        self.r_max
    }
    fn asymptote(&self) -> Option<f64> {
        Some(self.last)
    }
}

/// Closed-form potential on a fixed domain with hard walls.
pub struct AnalyticPotential<F: Fn(f64) -> f64 + Sync> {
    pub f: F,
    pub domain: (f64, f64),
}

impl<F: Fn(f64) -> f64 + Sync> Potential for AnalyticPotential<F> {
    fn value(&self, r: f64) -> f64 {
        (self.f)(r)
    }
    fn inner(&self) -> f64 {
        self.domain.0
    }
    fn outer(&self) -> f64 {
        self.domain.1
    }
    fn asymptote(&self) -> Option<f64> {
        None
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VibOptions {
    /// Upper bound on the number of levels; all bound levels when None.
    pub max_levels: Option<usize>,
    /// Largest eigenvalue change between refinements (cm⁻¹).
    pub tolerance_cm1: f64,
    pub max_refinements: usize,
    /// Initial spacing as a fraction of π/k_max.
    pub spacing_factor: f64,
    /// Run the Numerov cross-check.
    pub cross_check: bool,
}

impl Default for VibOptions {
    fn default() -> Self {
        VibOptions {
            max_levels: None,
            tolerance_cm1: 0.01,
            max_refinements: 8,
            spacing_factor: 0.6,
            cross_check: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VibLevel {
    pub v: usize,
    /// Energy above the well bottom (cm⁻¹).
    pub energy_cm1: f64,
    /// Energy on the potential's own scale (hartree).
    pub energy: f64,
    pub dipole_debye: Option<f64>,
    /// Classical turning points (bohr).
    pub r_in: f64,
    pub r_out: f64,
    /// Numerov eigenvalue above the well bottom (cm⁻¹).
    pub numerov_cm1: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct VibrationalTable {
    /// Reduced mass in electron masses.
    pub mu: f64,
    pub well_bottom: f64,
    pub levels: Vec<VibLevel>,
    /// DVR grid (bohr) and normalized wavefunctions χ_v(r_i), ∫χ² dr = 1.
    pub grid: Vec<f64>,
    pub wavefunctions: Vec<Vec<f64>>,
    pub refinements: usize,
}

pub fn reduced_mass(m1_amu: f64, m2_amu: f64) -> f64 {
    m1_amu * m2_amu / (m1_amu + m2_amu) * AMU_TO_ME
}

fn spacing(grid: &[f64]) -> f64 {
    grid[1] - grid[0]
}

/// Minimum of the potential: coarse scan then golden section.
fn well_bottom(pot: &dyn Potential) -> (f64, f64) {
    let (a, b) = (pot.inner(), pot.outer());
    let n = 2000;
    let step = (b - a) / n as f64;
    let (i, _) = (0..=n)
        .map(|i| (i, pot.value(a + step * i as f64)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap();
    let lo = (a + step * (i as f64 - 1.0)).max(a);
    let hi = (a + step * (i as f64 + 1.0)).min(b);
    golden_section(|r| pot.value(r), lo, hi, 1e-10)
}

/// Kinetic matrix of the sinc DVR, (−1)^{i−j}/(2μh²)·{π²/3, 2/(i−j)²}.
fn dvr_hamiltonian(pot: &dyn Potential, mu: f64, grid: &[f64]) -> DMatrix<f64> {
    let n = grid.len();
    let h = spacing(grid);
    let pref = 1.0 / (2.0 * mu * h * h);
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            pref * std::f64::consts::PI.powi(2) / 3.0 + pot.value(grid[i])
        } else {
            let d = i as f64 - j as f64;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            pref * sign * 2.0 / (d * d)
        }
    })
}

struct DvrSolution {
    grid: Vec<f64>,
    /// Levels below the dissociation limit.
    bound: usize,
    energies: Vec<f64>,
    vectors: Vec<Vec<f64>>,
}

/// Bound levels are kept up to the first one that has not decayed at the
/// inner end of the domain.
fn dvr_solve(pot: &dyn Potential, mu: f64, a: f64, b: f64, h: f64, want: usize) -> DvrSolution {
    let n = ((b - a) / h).ceil() as usize + 1;
    let h = (b - a) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
    let (e, v) = sym_eigen(&dvr_hamiltonian(pot, mu, &grid));
    let limit = pot.asymptote().unwrap_or(f64::INFINITY);
    let bound = e.iter().take(want).take_while(|&&x| x < limit).count();
    let scale = 1.0 / h.sqrt();
    let mut vectors = Vec::new();
    for k in 0..bound {
        let col = v.column(k);
        // sign convention: positive at the inner turning region
        let first = col.iter().copied().find(|x| x.abs() > 1e-6).unwrap_or(1.0);
        let s = if first < 0.0 { -scale } else { scale };
        let chi: Vec<f64> = col.iter().map(|x| x * s).collect();
        if inner_edge_amplitude(&chi) > INNER_EDGE_AMPLITUDE {
            break;
        }
        vectors.push(chi);
    }
    DvrSolution {
        grid,
        bound,
        energies: e[..vectors.len()].to_vec(),
        vectors,
    }
}

/// Normalized amplitudes tolerated at the inner end of the domain and at a
/// trimmed outer edge.
const INNER_EDGE_AMPLITUDE: f64 = 1e-4;
const EDGE_AMPLITUDE: f64 = 1e-6;

fn edge_amplitude(chi: &[f64]) -> f64 {
    chi.iter().rev().take(3).fold(0.0, |m, x| m.max(x.abs()))
}

fn inner_edge_amplitude(chi: &[f64]) -> f64 {
    chi[0].abs()
}

/// Turning points of E in the well around `r_min`.
fn turning_points(pot: &dyn Potential, e: f64, r_min: f64) -> (f64, f64) {
    let find = |mut lo: f64, mut hi: f64| {
        // V(lo) - e and V(hi) - e differ in sign
        let f_lo = pot.value(lo) - e;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (pot.value(mid) - e).signum() == f_lo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let inner = if pot.value(pot.inner()) > e { find(pot.inner(), r_min) } else { pot.inner() };
    let mut outer_end = pot.outer();
    while pot.value(outer_end) < e && pot.asymptote().is_some_and(|a| a > e) && outer_end < 1e4 {
        outer_end *= 2.0;
    }
    let outer = if pot.value(outer_end) > e { find(outer_end, r_min) } else { outer_end };
    (inner, outer)
}

/// Vibrational levels by sinc DVR with automatic refinement of grid
/// spacing until every level moves by less than the tolerance. The grid
/// spans the potential's domain, trimmed to the support of the requested
/// levels when their number is limited and widened again if the highest
/// one has not decayed at the edge.
pub fn solve_levels(pot: &dyn Potential, mu: f64, opts: &VibOptions) -> Result<VibrationalTable> {
    if !(mu > 0.0) {
        return Err(Error::Invalid(format!("reduced mass must be positive, got {mu}")));
    }
    let (r_e, v_min) = well_bottom(pot);
    let top = match pot.asymptote() {
        Some(a) if a <= v_min => return Err(Error::NoWell("potential minimum is not below the asymptote".into())),
        Some(a) => a,
        None => pot.value(pot.inner()).max(pot.value(pot.outer())),
    };
    let k_max = (2.0 * mu * (top - v_min)).sqrt();
    let mut h = opts.spacing_factor * std::f64::consts::PI / k_max;
    let a = pot.inner();
    let mut b = pot.outer();
    let want = opts.max_levels.unwrap_or(usize::MAX);
    let tol = opts.tolerance_cm1;
    let mut prev = dvr_solve(pot, mu, a, b, h, want);
    if want < usize::MAX && prev.energies.len() == want && prev.bound == want {
        // only the requested levels matter: match the spacing to their
        // energy range and cut the domain where they have decayed
        let e_top = prev.energies[want - 1];
        h = h.max(opts.spacing_factor * std::f64::consts::PI / (4.0 * mu * (e_top - v_min)).sqrt());
        let (_, r_out) = turning_points(pot, e_top, r_e);
        let kappa = (2.0 * mu * (top - e_top)).sqrt();
        b = b.min(r_out + (20.0 / kappa).max(1.0));
        prev = dvr_solve(pot, mu, a, b, h, want);
    }
    let mut refinements = 0;
    let solution = loop {
        refinements += 1;
        if refinements > opts.max_refinements {
            return Err(Error::Numerical(format!(
                "vibrational levels not converged to {tol} cm^-1 after {} refinements",
                opts.max_refinements
            )));
        }
        h *= 0.8;
        if b < pot.outer() && prev.vectors.last().is_some_and(|v| edge_amplitude(v) > EDGE_AMPLITUDE) {
            b = pot.outer().min(a + (b - a) * 1.25);
        }
        let next = dvr_solve(pot, mu, a, b, h, want);
        let common = prev.energies.len().min(next.energies.len());
        let shift = (0..common)
            .map(|k| hartree_to_cm1((next.energies[k] - prev.energies[k]).abs()))
            .fold(0.0, f64::max);
        // a level appearing just below threshold is a real change; demand equal counts
        let same_count = prev.bound == next.bound && prev.energies.len() == next.energies.len();
        log::debug!(
            "DVR refinement {refinements}: {} points, {} levels, max shift {shift:.3e} cm-1",
            next.grid.len(),
            next.energies.len()
        );
        if common == 0 {
            break next;
        }
        if shift < tol && same_count {
            if next.energies.len() < next.bound {
                log::warn!(
                    "{} of {} bound levels reach the inner end of the potential at R = {a} and are omitted",
                    next.bound - next.energies.len(),
                    next.bound
                );
            }
            break next;
        }
        prev = next;
    };
    if solution.energies.is_empty() && solution.bound > 0 {
        return Err(Error::Numerical(format!(
            "every bound level reaches the inner end of the potential at R = {a}; extend the grid inwards"
        )));
    }
    if solution.energies.is_empty() {
        return Err(Error::NoBoundLevel("no level below the dissociation limit".into()));
    }
    let mut levels: Vec<VibLevel> = solution
        .energies
        .iter()
        .enumerate()
        .map(|(v, &e)| {
            let (r_in, r_out) = turning_points(pot, e, r_e);
            VibLevel {
                v,
                energy_cm1: hartree_to_cm1(e - v_min),
                energy: e,
                dipole_debye: None,
                r_in,
                r_out,
                numerov_cm1: None,
            }
        })
        .collect();
    if opts.cross_check {
        let numerov = numerov_levels(pot, mu, (a, *solution.grid.last().unwrap()), levels.len(), spacing(&solution.grid) / 8.0);
        for (lv, e) in levels.iter_mut().zip(numerov) {
            lv.numerov_cm1 = Some(hartree_to_cm1(e - v_min));
        }
    }
    Ok(VibrationalTable {
        mu,
        well_bottom: v_min,
        levels,
        grid: solution.grid,
        wavefunctions: solution.vectors,
        refinements,
    })
}

/// Number of nodes of the outward Numerov solution at energy e, counting a
/// sign change at the outer wall. By Sturm oscillation this is the number of
/// Dirichlet eigenvalues below e.
fn numerov_count(pot: &dyn Potential, mu: f64, a: f64, b: f64, n: usize, e: f64) -> usize {
    let h = (b - a) / n as f64;
    let c = h * h / 12.0;
    let f = |r: f64| 2.0 * mu * (pot.value(r) - e);
    // ratio form: q_i = ψ_i (1 - c f_i), propagate ψ ratios to avoid overflow
    let mut nodes = 0;
    let mut psi_prev = 0.0;
    let mut psi = 1e-30;
    let mut f_prev = f(a);
    let mut f_cur = f(a + h);
    for i in 1..n {
        let f_next = f(a + h * (i + 1) as f64);
        let next = (psi * (2.0 + 10.0 * c * f_cur) - psi_prev * (1.0 - c * f_prev)) / (1.0 - c * f_next);
        if next == 0.0 || (next < 0.0) != (psi < 0.0) {
            nodes += 1;
        }
        let scale = if next.abs() > 1e100 { 1e-100 } else { 1.0 };
        psi_prev = psi * scale;
        psi = next * scale;
        f_prev = f_cur;
        f_cur = f_next;
    }
    nodes
}

/// The lowest `count` eigenvalues between hard walls at `domain`, by
/// bisection on the node count, Richardson-extrapolated in the step size.
pub fn numerov_levels(pot: &dyn Potential, mu: f64, domain: (f64, f64), count: usize, h: f64) -> Vec<f64> {
    let (a, b) = domain;
    let n = ((b - a) / h).ceil() as usize;
    let (_, v_min) = well_bottom(pot);
    let solve = |n: usize| -> Vec<f64> {
        let mut hi = v_min + 1.0;
        while numerov_count(pot, mu, a, b, n, hi) < count {
            hi = v_min + 2.0 * (hi - v_min);
        }
        (0..count)
            .map(|v| {
                let (mut lo, mut up) = (v_min, hi);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + up);
                    if numerov_count(pot, mu, a, b, n, mid) > v {
                        up = mid;
                    } else {
                        lo = mid;
                    }
                    if up - lo < 1e-14 * (1.0 + mid.abs()) {
                        break;
                    }
                }
                0.5 * (lo + up)
            })
            .collect()
    };
    let coarse = solve(n);
    let fine = solve(2 * n);
    coarse.iter().zip(&fine).map(|(c, f)| f + (f - c) / 15.0).collect()
}

impl VibrationalTable {
    /// Drops levels whose wavefunction exceeds `threshold` beyond `r_max`.
    pub fn truncate_to_support(&mut self, r_max: f64, threshold: f64) -> usize {
        let keep = (0..self.levels.len())
            .take_while(|&v| self.amplitude_beyond(v, r_max) <= threshold)
            .count();
        let dropped = self.levels.len() - keep;
        self.levels.truncate(keep);
        self.wavefunctions.truncate(keep);
        dropped
    }

    fn amplitude_beyond(&self, v: usize, r_max: f64) -> f64 {
        self.grid
            .iter()
            .zip(&self.wavefunctions[v])
            .filter(|(r, _)| **r > r_max)
            .map(|(_, x)| x.abs())
            .fold(0.0, f64::max)
    }

    /// ∫χ_v χ_w dr on the DVR grid.
    pub fn overlap(&self, v: usize, w: usize) -> f64 {
        let h = spacing(&self.grid);
        self.wavefunctions[v].iter().zip(&self.wavefunctions[w]).map(|(a, b)| a * b).sum::<f64>() * h
    }

    /// Sign changes of χ_v, ignoring the numerically zero tails.
    pub fn nodes(&self, v: usize) -> usize {
        let chi = &self.wavefunctions[v];
        let peak = chi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut count = 0;
        let mut last = 0.0;
        for &x in chi {
            if x.abs() < 1e-6 * peak {
                continue;
            }
            if last != 0.0 && (x < 0.0) != (last < 0.0) {
                count += 1;
            }
            last = x;
        }
        count
    }

    /// ⟨χ_v| f(R) |χ_v⟩ with the DVR quadrature.
    pub fn expectation(&self, v: usize, f: impl Fn(f64) -> f64) -> f64 {
        let h = spacing(&self.grid);
        self.grid
            .iter()
            .zip(&self.wavefunctions[v])
            .map(|(&r, &x)| x * x * f(r))
            .sum::<f64>()
            * h
    }

    /// Largest |E_DVR − E_Numerov| (cm⁻¹) over the checked levels.
    pub fn cross_check_deviation(&self) -> Option<f64> {
        self.levels
            .iter()
            .map(|l| l.numerov_cm1.map(|n| (n - l.energy_cm1).abs()))
            .try_fold(0.0f64, |m, d| d.map(|d| m.max(d)))
    }

    /// `v,E_cm1,D_debye,Rin_bohr,Rout_bohr` with `#` header lines.
    pub fn to_csv(&self, header: &[String]) -> String {
        let mut s = String::new();
        for h in header {
            for line in h.lines() {
                s.push_str("# ");
                s.push_str(line);
                s.push('\n');
            }
        }
        s.push_str(&format!("# reduced_mass_me = {}\n", fmt12(self.mu)));
        s.push_str("v,E_cm1,D_debye,Rin_bohr,Rout_bohr\n");
        for l in &self.levels {
            let d = l.dipole_debye.map(fmt12).unwrap_or_default();
            s.push_str(&format!("{},{},{},{},{}\n", l.v, fmt12(l.energy_cm1), d, fmt12(l.r_in), fmt12(l.r_out)));
        }
        s
    }
}

/// Fills ⟨D⟩_v from a dipole curve splined onto the DVR grid.
pub fn average_dipole(table: &mut VibrationalTable, dipole: &DipoleCurve) -> Result<()> {
    let spline = dipole.spline();
    let h = spacing(&table.grid);
    for v in 0..table.levels.len() {
        let chi = &table.wavefunctions[v];
        let mut sum = 0.0;
        for (&r, &x) in table.grid.iter().zip(chi) {
            if !spline.contains(r) {
                if x.abs() > 1e-8 {
                    return Err(Error::Invalid(format!(
                        "dipole grid [{}, {}] does not cover level v = {v} (amplitude {x:.1e} at R = {r})",
                        dipole.r_min(),
                        dipole.r_max()
                    )));
                }
                continue;
            }
            sum += x * x * spline.eval(r);
        }
        table.levels[v].dipole_debye = Some(sum * h);
    }
    Ok(())
}
