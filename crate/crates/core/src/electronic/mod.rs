//! Hartree-Fock reference, two-electron full CI and permanent dipoles at a
//! fixed internuclear distance.

mod ci;
mod scf;

pub use ci::{CiHamiltonian, CiOptions, CiState, Spin, N_BLOCKS};
pub use scf::{scf, ClassOrbitals, ScfOptions, ScfResult};

use crate::integrals::{build_eri, build_operators, GeometrySpec, IntegralOptions, OperatorMatrices, TwoElectronTensor};
use crate::units::au_to_debye;
use crate::Result;
use std::ops::Range;

#[derive(Debug, Clone, Default)]
pub struct ElectronicOptions {
    pub integrals: IntegralOptions,
    pub scf: ScfOptions,
    pub ci: CiOptions,
}

/// Lowest state of one spin block with its dipole.
#[derive(Debug, Clone)]
pub struct StateResult {
    pub state: CiState,
    /// Dipole in atomic units; negative means excess electron charge on the
    /// first (lighter) atom.
    pub dipole_au: f64,
}

impl StateResult {
    pub fn dipole_debye(&self) -> f64 {
        au_to_debye(self.dipole_au)
    }
}

#[derive(Debug, Clone)]
pub struct ElectronicPoint {
    pub r: f64,
    pub scf_energy: f64,
    pub scf_iterations: usize,
    pub n_functions: usize,
    pub dropped: usize,
    pub singlet: StateResult,
    pub triplet: StateResult,
}

impl ElectronicPoint {
    pub fn state(&self, spin: Spin) -> &StateResult {
        match spin {
            Spin::Singlet => &self.singlet,
            Spin::Triplet => &self.triplet,
        }
    }
}

/// Lowest CI state of the requested spin.
pub fn full_ci(scf: &ScfResult, ops: &OperatorMatrices, eri: &TwoElectronTensor, spin: Spin, opts: &CiOptions) -> Result<CiState> {
    CiHamiltonian::new(ops, eri, scf).lowest(spin, opts)
}

/// Dipole in atomic units from the electronic z expectation (relative to the
/// operator origin). The sign is that of the electron displacement along the
/// M → M′ axis: electrons piling up on M give a negative value.
pub fn dipole_au(electronic_z: f64, ops: &OperatorMatrices, geom: &GeometrySpec) -> f64 {
    let nuclear: f64 = (0..2)
        .map(|c| geom.centers[c].core.charge * (geom.position(c)[2] - ops.dipole_origin[2]))
        .sum();
    electronic_z - nuclear
}

pub fn dipole_debye(electronic_z: f64, ops: &OperatorMatrices, geom: &GeometrySpec) -> f64 {
    au_to_debye(dipole_au(electronic_z, ops, geom))
}

pub fn class_ranges(class_start: &[usize]) -> Vec<Range<usize>> {
    class_start.windows(2).map(|w| w[0]..w[1]).collect()
}

/// Integrals, SCF, and both CI blocks at one geometry.
pub fn compute_point(geom: &GeometrySpec, opts: &ElectronicOptions) -> Result<ElectronicPoint> {
    let basis = geom.basis()?;
    let ops = build_operators(geom, &basis, &opts.integrals)?;
    let eri = build_eri(&basis, &ops, &opts.integrals);
    let reference = scf(&ops, &eri, &class_ranges(&basis.class_start), &opts.scf)?;
    let ham = CiHamiltonian::new(&ops, &eri, &reference);
    let solve = |spin| -> Result<StateResult> {
        let state = ham.lowest(spin, &opts.ci)?;
        let dipole_au = dipole_au(ham.electronic_z(&state), &ops, geom);
        Ok(StateResult { state, dipole_au })
    };
    Ok(ElectronicPoint {
        r: geom.r,
        scf_energy: reference.energy,
        scf_iterations: reference.iterations,
        n_functions: basis.n_functions(),
        dropped: reference.dropped,
        singlet: solve(Spin::Singlet)?,
        triplet: solve(Spin::Triplet)?,
    })
}
